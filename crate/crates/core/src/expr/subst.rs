//! Substitution of function symbols and jets by expressions.
//!
//! Binding a symbol `f` (or one of its derivatives `f[a]`) replaces every
//! derivative `f[b]` with `b >= a` by the matching partial derivative of the
//! binding. Binding a jet `u` replaces every higher jet of the same field by
//! the corresponding total derivative of the binding.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use super::{to_text, Atom, Expr, FuncSym, JetVar, Monomial, Poly};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BindKey {
    Func(FuncSym),
    Jet(JetVar),
}

impl BindKey {
    pub fn describe(&self) -> String {
        match self {
            BindKey::Func(f) => to_text(&Expr::func(f.clone()), None),
            BindKey::Jet(j) => j.to_string(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SubstError {
    #[error("cyclic binding through `{0}`")]
    Cycle(String),
    #[error("binding for `{symbol}` depends on `{jet}`, which is not among its dependencies")]
    InconsistentDeps { symbol: String, jet: String },
    #[error("bindings disagree on `{0}`")]
    InconsistentBinding(String),
    #[error("`{func}` depends on the bound jet `{jet}`; bind the function as well")]
    BoundJetInDeps { func: String, jet: String },
    #[error("substitution makes a denominator vanish")]
    ZeroDenominator,
}

/// A set of bindings, applied with memoization.
#[derive(Clone, Debug, Default)]
pub struct Bindings {
    entries: BTreeMap<BindKey, Expr>,
}

impl Bindings {
    pub fn new() -> Self {
        Bindings::default()
    }

    /// Binds a function symbol (or derivative). The binding may only involve
    /// jets among the symbol's dependencies.
    pub fn bind_func(&mut self, f: FuncSym, e: Expr) -> Result<(), SubstError> {
        for j in e.jets() {
            if f.dep_index(&j).is_none() {
                return Err(SubstError::InconsistentDeps {
                    symbol: to_text(&Expr::func(f.clone()), None),
                    jet: j.to_string(),
                });
            }
        }
        self.entries.insert(BindKey::Func(f), e);
        Ok(())
    }

    pub fn bind_jet(&mut self, j: JetVar, e: Expr) {
        self.entries.insert(BindKey::Jet(j), e);
    }

    pub fn get(&self, k: &BindKey) -> Option<&Expr> {
        self.entries.get(k)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BindKey, &Expr)> {
        self.entries.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// True when some binding applies to `f` (any derivative of the same function).
    pub fn binds_function(&self, f: &FuncSym) -> bool {
        self.entries
            .keys()
            .any(|k| matches!(k, BindKey::Func(g) if g.same_function(f)))
    }

    pub fn apply(&self, e: &Expr) -> Result<Expr, SubstError> {
        Substituter::new(self).apply(e)
    }

    pub fn substituter(&self) -> Substituter<'_> {
        Substituter::new(self)
    }
}

/// Applies [`Bindings`] while caching resolved atoms across calls.
pub struct Substituter<'b> {
    b: &'b Bindings,
    resolved: HashMap<BindKey, Expr>,
    atoms: HashMap<Atom, Option<Expr>>,
    stack: Vec<BindKey>,
}

impl<'b> Substituter<'b> {
    pub fn new(b: &'b Bindings) -> Self {
        Substituter {
            b,
            resolved: HashMap::new(),
            atoms: HashMap::new(),
            stack: Vec::new(),
        }
    }

    pub fn apply(&mut self, e: &Expr) -> Result<Expr, SubstError> {
        if self.b.is_empty() {
            return Ok(e.clone());
        }
        let num = self.apply_poly(e.numer())?;
        if e.denom().is_one() {
            return Ok(num);
        }
        let den = self.apply_poly(e.denom())?;
        num.checked_div(&den).ok_or(SubstError::ZeroDenominator)
    }

    fn apply_poly(&mut self, p: &Poly) -> Result<Expr, SubstError> {
        let mut untouched: Vec<(Monomial, super::Coeff)> = Vec::new();
        let mut parts: Vec<Expr> = Vec::new();
        for (m, c) in p.terms() {
            let mut keep: Vec<(Atom, u32)> = Vec::new();
            let mut factor = Expr::one();
            let mut replaced = false;
            for (a, e) in m.factors() {
                match self.atom(a)? {
                    None => keep.push((a.clone(), *e)),
                    Some(r) => {
                        replaced = true;
                        factor = &factor * &r.pow(*e as i32).unwrap();
                    }
                }
            }
            if replaced {
                let rest = Expr::from_poly(Poly::term(Monomial::from_factors(keep), c.clone()));
                parts.push(&factor * &rest);
            } else {
                untouched.push((m.clone(), c.clone()));
            }
        }
        parts.push(Expr::from_poly(Poly::from_terms(untouched)));
        Ok(Expr::sum(parts))
    }

    /// Replacement for an atom, or `None` when no binding applies.
    fn atom(&mut self, a: &Atom) -> Result<Option<Expr>, SubstError> {
        if let Some(r) = self.atoms.get(a) {
            return Ok(r.clone());
        }
        let r = match a {
            Atom::Jet(j) => self.jet(j)?,
            Atom::Func(f) => self.func(f)?,
        };
        self.atoms.insert(a.clone(), r.clone());
        Ok(r)
    }

    fn jet(&mut self, j: &JetVar) -> Result<Option<Expr>, SubstError> {
        let mut found: Option<Expr> = None;
        let keys: Vec<JetVar> = self
            .b
            .entries
            .keys()
            .filter_map(|k| match k {
                BindKey::Jet(b) if b.field() == j.field() && b.t_order() <= j.t_order() && b.x_order() <= j.x_order() => {
                    Some(b.clone())
                }
                _ => None,
            })
            .collect();
        for b in keys {
            let mut e = self.resolve(&BindKey::Jet(b.clone()))?;
            for _ in b.t_order()..j.t_order() {
                e = e.total_t();
            }
            for _ in b.x_order()..j.x_order() {
                e = e.total_x();
            }
            // Total derivatives may introduce atoms that are themselves bound.
            let e = self.apply(&e)?;
            match &found {
                Some(prev) if *prev != e => return Err(SubstError::InconsistentBinding(j.to_string())),
                _ => found = Some(e),
            }
        }
        Ok(found)
    }

    fn func(&mut self, f: &FuncSym) -> Result<Option<Expr>, SubstError> {
        let keys: Vec<FuncSym> = self
            .b
            .entries
            .keys()
            .filter_map(|k| match k {
                BindKey::Func(g) if g.same_function(f) && g.orders().iter().zip(f.orders()).all(|(a, b)| a <= b) => {
                    Some(g.clone())
                }
                _ => None,
            })
            .collect();
        if keys.is_empty() {
            for d in f.deps() {
                for k in self.b.entries.keys() {
                    if let BindKey::Jet(b) = k {
                        if b.field() == d.field() && b.t_order() <= d.t_order() && b.x_order() <= d.x_order() {
                            return Err(SubstError::BoundJetInDeps {
                                func: to_text(&Expr::func(f.clone()), None),
                                jet: d.to_string(),
                            });
                        }
                    }
                }
            }
            return Ok(None);
        }
        let mut found: Option<Expr> = None;
        for g in keys {
            let mut e = self.resolve(&BindKey::Func(g.clone()))?;
            for ((d, a), b) in f.deps().iter().zip(g.orders()).zip(f.orders()) {
                for _ in *a..*b {
                    e = e.partial(d);
                }
            }
            let e = self.apply(&e)?;
            match &found {
                Some(prev) if *prev != e => {
                    return Err(SubstError::InconsistentBinding(to_text(&Expr::func(f.clone()), None)))
                }
                _ => found = Some(e),
            }
        }
        Ok(found)
    }

    /// The binding for `k` with every other binding applied.
    fn resolve(&mut self, k: &BindKey) -> Result<Expr, SubstError> {
        if let Some(e) = self.resolved.get(k) {
            return Ok(e.clone());
        }
        if self.stack.contains(k) {
            return Err(SubstError::Cycle(k.describe()));
        }
        self.stack.push(k.clone());
        let raw = self.b.entries[k].clone();
        let r = self.apply(&raw);
        self.stack.pop();
        let r = r?;
        self.resolved.insert(k.clone(), r.clone());
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse, Context};
    use super::*;

    fn ctx() -> Context {
        let mut c = Context::with_fields(["rho", "v", "eps", "gamma"]);
        let z = ["rho", "eps", "gamma"]
            .iter()
            .map(|f| JetVar::field_var(*f))
            .chain(["rho", "v", "eps", "gamma"].iter().map(|f| JetVar::new(*f, 0, 1)))
            .collect::<Vec<_>>();
        c.declare_func("s", z.clone());
        c.declare_func("q", z.clone());
        c.declare_func("Js", z);
        c.declare_func("s0", [JetVar::field_var("rho"), JetVar::field_var("eps")]);
        c.declare_func("s1", [JetVar::field_var("rho"), JetVar::field_var("gamma")]);
        c.declare_func("q1", [JetVar::field_var("rho"), JetVar::field_var("eps"), JetVar::field_var("gamma")]);
        c.declare_func("q2", [JetVar::field_var("rho"), JetVar::field_var("eps"), JetVar::field_var("gamma")]);
        c.declare_func("q3", [JetVar::field_var("rho"), JetVar::field_var("eps"), JetVar::field_var("gamma")]);
        c
    }

    fn bind(b: &mut Bindings, c: &Context, name: &str, src: &str) {
        let f = super::super::parse_func(name, c).unwrap();
        b.bind_func(f, parse(src, c).unwrap()).unwrap();
    }

    #[test]
    fn derivative_symbols_follow_the_binding() {
        let c = ctx();
        let mut b = Bindings::new();
        bind(&mut b, &c, "s", "s0 + s1*rho_x^2");
        let e = parse("s[rho_x]", &c).unwrap();
        assert_eq!(b.apply(&e).unwrap(), parse("2*s1*rho_x", &c).unwrap());
        let e = parse("s[rho_x, rho_x]", &c).unwrap();
        assert_eq!(b.apply(&e).unwrap(), parse("2*s1", &c).unwrap());
    }

    #[test]
    fn flux_derivative() {
        let c = ctx();
        let mut b = Bindings::new();
        bind(&mut b, &c, "q", "q1*eps_x + q2*rho_x + q3*v_x");
        let e = parse("q[v_x]", &c).unwrap();
        assert_eq!(b.apply(&e).unwrap(), parse("q3", &c).unwrap());
    }

    #[test]
    fn jet_binding_extends_to_derivatives() {
        let c = ctx();
        let mut b = Bindings::new();
        b.bind_jet(JetVar::field_var("rho"), Expr::one());
        assert!(b.apply(&parse("rho_x", &c).unwrap()).unwrap().is_zero());
        assert_eq!(b.apply(&parse("rho*v", &c).unwrap()).unwrap(), parse("v", &c).unwrap());
        let err = b.apply(&parse("s", &c).unwrap()).unwrap_err();
        assert!(matches!(err, SubstError::BoundJetInDeps { .. }));
    }

    #[test]
    fn chained_and_gradient_bindings() {
        let c = ctx();
        let mut b = Bindings::new();
        bind(&mut b, &c, "q", "q1*eps_x");
        bind(&mut b, &c, "Js", "q*s0[eps]");
        bind(&mut b, &c, "s0[eps]", "1/eps");
        let e = parse("Js[eps_x]", &c).unwrap();
        assert_eq!(b.apply(&e).unwrap(), parse("q1/eps", &c).unwrap());
        let e = parse("s0[eps, eps]", &c).unwrap();
        assert_eq!(b.apply(&e).unwrap(), parse("-1/eps^2", &c).unwrap());
        assert!(b.apply(&parse("s0", &c).unwrap()).unwrap() == parse("s0", &c).unwrap());
    }

    #[test]
    fn cycles_and_inconsistencies_are_errors() {
        let c = ctx();
        let mut b = Bindings::new();
        bind(&mut b, &c, "q", "Js");
        bind(&mut b, &c, "Js", "q + 1");
        assert!(matches!(b.apply(&parse("q", &c).unwrap()), Err(SubstError::Cycle(_))));

        let mut b = Bindings::new();
        let s0 = super::super::parse_func("s0", &c).unwrap();
        assert!(matches!(
            b.bind_func(s0, parse("rho_x", &c).unwrap()),
            Err(SubstError::InconsistentDeps { .. })
        ));

        let mut b = Bindings::new();
        bind(&mut b, &c, "s0[eps]", "1/eps");
        bind(&mut b, &c, "s0[rho]", "eps");
        assert!(matches!(
            b.apply(&parse("s0[rho, eps]", &c).unwrap()),
            Err(SubstError::InconsistentBinding(_))
        ));
    }
}
