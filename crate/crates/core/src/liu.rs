//! The constrained entropy inequality and the conditions it imposes.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::balance::{entropy_production, extend_constraint};
use crate::expr::{Atom, Coeff, Context, Expr, FuncSym, JetVar};
use crate::jet::{classify, DerivativeClassification};
use crate::matrix::principal_minors;
use crate::model::ModelSpec;

/// Principal minors are emitted up to this order.
pub const MAX_MINOR_ORDER: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("multiplier {0} cannot be determined from the highest-derivative coefficients")]
    Unresolved(String),
    #[error("inequality is not linear in `{0}`")]
    NotLinear(String),
    #[error("{0}")]
    Invariant(String),
}

#[derive(Clone, Debug, Default)]
pub struct LiuOptions {
    /// Keep every extension instead of pruning.
    pub all_extensions: bool,
    /// Extension depth; defaults to the state-space order.
    pub order: Option<u32>,
}

/// `Λ_i^(k)` attached to the `k`-th extension of constraint `law`.
#[derive(Clone, Debug, PartialEq)]
pub struct Multiplier {
    pub law: usize,
    pub order: u32,
    pub symbol: FuncSym,
}

pub fn multiplier_symbol(law: usize, order: u32, z: &[JetVar]) -> FuncSym {
    FuncSym::new(format!("Lambda{}k{}", law + 1, order), z.iter().cloned())
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierSolution {
    pub multiplier: Multiplier,
    pub expr: Expr,
}

/// Coefficient of a highest derivative that must vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct ZetaEquality {
    pub jet: JetVar,
    pub expr: Expr,
}

/// Coefficient of one monomial in the higher derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct FormEntry {
    pub monomial: Vec<(JetVar, u32)>,
    pub expr: Expr,
}

impl FormEntry {
    pub fn degree(&self) -> u32 {
        self.monomial.iter().map(|(_, e)| e).sum()
    }

    pub fn monomial_text(&self) -> String {
        self.monomial
            .iter()
            .map(|(j, e)| if *e == 1 { j.to_string() } else { format!("{j}^{e}") })
            .collect::<Vec<_>>()
            .join("*")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minor {
    pub indices: Vec<usize>,
    pub expr: Expr,
}

/// The part of the inequality homogeneous of an even degree in the higher
/// derivatives; it must be nonnegative for every value of them.
#[derive(Clone, Debug, PartialEq)]
pub struct EvenForm {
    pub degree: u32,
    pub entries: Vec<FormEntry>,
    /// Variables indexing the symmetric matrix of a quadratic form.
    pub vars: Vec<JetVar>,
    /// Principal minors of that matrix, each required to be `>= 0`.
    pub minors: Vec<Minor>,
}

impl EvenForm {
    /// The form itself as an expression in the higher derivatives.
    pub fn expr(&self) -> Expr {
        Expr::sum(self.entries.iter().map(|e| &e.expr * &monomial_expr(&e.monomial)))
    }
}

pub fn monomial_expr(m: &[(JetVar, u32)]) -> Expr {
    Expr::product(m.iter().map(|(j, e)| Expr::jet(j.clone()).pow(*e as i32).unwrap()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RestrictionSet {
    pub multipliers: Vec<MultiplierSolution>,
    pub zeta_equalities: Vec<ZetaEquality>,
    pub odd_equalities: Vec<FormEntry>,
    pub even_forms: Vec<EvenForm>,
    pub residual: Expr,
    pub side_conditions: Vec<Expr>,
}

impl RestrictionSet {
    /// Every expression required to vanish.
    pub fn equalities(&self) -> Vec<Expr> {
        self.zeta_equalities
            .iter()
            .map(|z| z.expr.clone())
            .chain(self.odd_equalities.iter().map(|o| o.expr.clone()))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct LiuReport {
    pub model: String,
    pub hash: String,
    pub classification: DerivativeClassification,
    /// Selected `(constraint index, extension order)` pairs.
    pub constraints: Vec<(usize, u32)>,
    pub constraint_names: Vec<String>,
    pub restrictions: RestrictionSet,
    pub zeta_degree: u32,
    pub eta_degree: u32,
    pub diagnostics: Vec<String>,
    /// Declarations for printing: the model's symbols plus the multipliers.
    pub context: Context,
}

/// The time part `Σ_j c_j DΦ_j/Dt` of a constraint, whose extensions carry
/// all of its time derivatives.
fn time_part(model: &ModelSpec, idx: usize) -> Expr {
    let c = &model.constraints[idx];
    Expr::sum(model.laws.iter().zip(&c.coeffs).map(|(l, k)| k * &l.phi.total_t()))
}

/// Extension `(i, k)` is kept for `k = 0`, and for `k >= 1` when it carries a
/// time derivative `u_{t x^k}` whose spatial counterpart `u_{x^k}` is a state
/// variable. With `all`, every pair up to `depth` is kept.
pub fn select_constraints(model: &ModelSpec, depth: u32, all: bool) -> Vec<(usize, u32)> {
    let mut out = Vec::new();
    for k in 0..=depth {
        for i in 0..model.constraints.len() {
            if k == 0 || all {
                out.push((i, k));
                continue;
            }
            let ext = time_part(model, i).total_x_n(k);
            let keep = ext
                .jets()
                .iter()
                .any(|j| j.t_order() == 1 && j.x_order() == k && model.state.contains(&JetVar::new(j.field(), 0, k)));
            if keep {
                out.push((i, k));
            }
        }
    }
    out.sort_by_key(|&(i, k)| (k, i));
    out
}

/// `entropy production − Σ Λ_i^(k) D^k E_i/Dx^k` over the selected pairs.
pub fn constrained_inequality(model: &ModelSpec, selection: &[(usize, u32)]) -> Expr {
    let z = model.state_vars();
    let parts: Vec<Expr> = selection
        .par_iter()
        .map(|&(i, k)| &Expr::func(multiplier_symbol(i, k, &z)) * &extend_constraint(model, i, k))
        .collect();
    &entropy_production(model) - &Expr::sum(parts)
}

/// One summand of the inequality split by highest derivative.
struct Piece {
    /// Coefficient of each highest derivative (index into ζ).
    zeta: BTreeMap<usize, Expr>,
    /// Terms free of highest derivatives.
    rest: Expr,
    zeta_degree: u32,
    eta_degree: u32,
}

fn split_piece(e: &Expr, zeta: &[JetVar], eta: &[JetVar]) -> Result<Piece, EngineError> {
    let table = e
        .collect(zeta)
        .map_err(|err| EngineError::Invariant(err.to_string()))?;
    let eta_atoms: BTreeSet<Atom> = eta.iter().cloned().map(Atom::Jet).collect();
    let mut piece = Piece {
        zeta: BTreeMap::new(),
        rest: Expr::zero(),
        zeta_degree: 0,
        eta_degree: 0,
    };
    for (key, c) in table {
        let deg: u32 = key.iter().sum();
        piece.zeta_degree = piece.zeta_degree.max(deg);
        piece.eta_degree = piece.eta_degree.max(c.degree_in(&eta_atoms));
        match deg {
            0 => piece.rest = c,
            1 => {
                let a = key.iter().position(|&p| p == 1).unwrap();
                piece.zeta.insert(a, c);
            }
            _ => {
                let a = key.iter().position(|&p| p > 0).unwrap();
                return Err(EngineError::NotLinear(zeta[a].to_string()));
            }
        }
    }
    Ok(piece)
}

/// `c0 + Σ coef[u] Λ_u = 0`.
#[derive(Clone)]
struct LinEq {
    jet: usize,
    c0: Expr,
    coef: BTreeMap<usize, Expr>,
}

impl LinEq {
    fn substitute(&mut self, u: usize, sol: &LinEq) {
        let Some(a) = self.coef.remove(&u) else { return };
        self.c0 = &self.c0 + &(&a * &sol.c0);
        for (w, b) in &sol.coef {
            let v = self.coef.remove(w).unwrap_or_else(Expr::zero);
            let nv = &v + &(&a * b);
            if !nv.is_zero() {
                self.coef.insert(*w, nv);
            }
        }
    }
}

struct Solved {
    values: BTreeMap<usize, Expr>,
    leftover: Vec<(usize, Expr)>,
    pivots: Vec<Expr>,
}

/// Determines the multipliers from the time-derivative coefficients, level by
/// level from the highest extension order down; within a level, equations
/// with fewer unknowns go first and ties go to the lower law index.
fn solve(
    mults: &[Multiplier],
    time_jets: &[(usize, u32)],
    entropy: &Piece,
    pieces: &[Piece],
) -> Result<Solved, EngineError> {
    let depth = mults.iter().map(|m| m.order).max().unwrap_or(0);
    let mut values: BTreeMap<usize, Expr> = BTreeMap::new();
    let mut leftover = Vec::new();
    let mut pivots = Vec::new();
    let mut carried: Vec<LinEq> = Vec::new();
    for k in (0..=depth).rev() {
        let mut eqs: Vec<LinEq> = std::mem::take(&mut carried);
        for &(a, order) in time_jets {
            if order != k {
                continue;
            }
            let mut eq = LinEq {
                jet: a,
                c0: entropy.zeta.get(&a).cloned().unwrap_or_else(Expr::zero),
                coef: BTreeMap::new(),
            };
            for (u, p) in pieces.iter().enumerate() {
                if let Some(c) = p.zeta.get(&a) {
                    eq.coef.insert(u, -c);
                }
            }
            eqs.push(eq);
        }
        for eq in eqs.iter_mut() {
            let known: Vec<usize> = eq.coef.keys().filter(|u| values.contains_key(u)).copied().collect();
            for u in known {
                let a = eq.coef.remove(&u).unwrap();
                eq.c0 = &eq.c0 + &(&a * &values[&u]);
            }
        }
        let level: BTreeSet<usize> = (0..mults.len()).filter(|&u| mults[u].order == k).collect();
        let mut chain: Vec<(usize, LinEq)> = Vec::new();
        loop {
            let pick = eqs
                .iter()
                .enumerate()
                .filter(|(_, e)| e.coef.keys().all(|u| level.contains(u)) && !e.coef.is_empty())
                .min_by_key(|(n, e)| (e.coef.len(), *n));
            let Some((n, _)) = pick else { break };
            let eq = eqs.remove(n);
            let (&u, a) = eq.coef.iter().next().unwrap();
            if a.as_constant().is_none() {
                pivots.push(a.clone());
            }
            let inv = a.recip().expect("nonzero pivot");
            let mut sol = LinEq {
                jet: eq.jet,
                c0: -(&eq.c0 * &inv),
                coef: BTreeMap::new(),
            };
            for (w, b) in &eq.coef {
                if *w != u {
                    sol.coef.insert(*w, -(b * &inv));
                }
            }
            for other in eqs.iter_mut() {
                other.substitute(u, &sol);
            }
            chain.push((u, sol));
        }
        for (u, mut sol) in chain.into_iter().rev() {
            let deps: Vec<usize> = sol.coef.keys().copied().collect();
            for w in deps {
                let b = sol.coef.remove(&w).unwrap();
                let Some(vw) = values.get(&w) else {
                    return Err(EngineError::Unresolved(mults[w].symbol.name().to_string()));
                };
                sol.c0 = &sol.c0 + &(&b * vw);
            }
            values.insert(u, sol.c0);
        }
        for u in &level {
            if !values.contains_key(u) {
                return Err(EngineError::Unresolved(mults[*u].symbol.name().to_string()));
            }
        }
        for eq in eqs {
            if eq.coef.is_empty() {
                if !eq.c0.is_zero() {
                    leftover.push((eq.jet, eq.c0));
                }
            } else {
                carried.push(eq);
            }
        }
    }
    if let Some(eq) = carried.first() {
        let u = *eq.coef.keys().next().unwrap();
        return Err(EngineError::Unresolved(mults[u].symbol.name().to_string()));
    }
    Ok(Solved {
        values,
        leftover,
        pivots,
    })
}

/// Symmetric matrix of a quadratic form given by its monomial coefficients,
/// indexed by the variables of `order` that occur.
pub fn quadratic_matrix(entries: &[FormEntry], order: &[JetVar]) -> (Vec<JetVar>, Vec<Vec<Expr>>) {
    let vars: Vec<JetVar> = order
        .iter()
        .filter(|j| entries.iter().any(|e| e.monomial.iter().any(|(v, _)| v == *j)))
        .cloned()
        .collect();
    let n = vars.len();
    let mut m = vec![vec![Expr::zero(); n]; n];
    let half = Coeff::new(1.into(), 2.into());
    for e in entries {
        let idx: Vec<usize> = e.monomial.iter().map(|(j, _)| vars.iter().position(|v| v == j).unwrap()).collect();
        if idx.len() == 1 {
            m[idx[0]][idx[0]] = e.expr.clone();
        } else {
            let h = e.expr.scale(&half);
            m[idx[0]][idx[1]] = h.clone();
            m[idx[1]][idx[0]] = h;
        }
    }
    (vars, m)
}

/// Splits the multiplier-free inequality by degree in the higher derivatives.
pub fn emit_restrictions(
    rest: &Expr,
    eta: &[JetVar],
    diagnostics: &mut Vec<String>,
) -> Result<(Vec<FormEntry>, Vec<EvenForm>, Expr), EngineError> {
    let table = rest
        .collect(eta)
        .map_err(|err| EngineError::Invariant(err.to_string()))?;
    let mut odd = Vec::new();
    let mut even: BTreeMap<u32, Vec<FormEntry>> = BTreeMap::new();
    let mut residual = Expr::zero();
    let mut entries: Vec<FormEntry> = table
        .into_iter()
        .map(|(key, c)| FormEntry {
            monomial: key
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| (eta[i].clone(), e))
                .collect(),
            expr: c,
        })
        .collect();
    entries.sort_by(|a, b| {
        let ka: Vec<(usize, u32)> = a.monomial.iter().map(|(j, e)| (eta.iter().position(|x| x == j).unwrap(), *e)).collect();
        let kb: Vec<(usize, u32)> = b.monomial.iter().map(|(j, e)| (eta.iter().position(|x| x == j).unwrap(), *e)).collect();
        (a.degree(), ka).cmp(&(b.degree(), kb))
    });
    for entry in entries {
        let d = entry.degree();
        if d == 0 {
            residual = entry.expr;
        } else if d % 2 == 1 {
            odd.push(entry);
        } else {
            even.entry(d).or_default().push(entry);
        }
    }
    let mut forms = Vec::new();
    for (degree, entries) in even {
        let mut form = EvenForm {
            degree,
            entries,
            vars: Vec::new(),
            minors: Vec::new(),
        };
        if degree == 2 {
            let (vars, m) = quadratic_matrix(&form.entries, eta);
            let n = vars.len();
            if n > MAX_MINOR_ORDER {
                diagnostics.push(format!(
                    "quadratic form in {n} higher derivatives: principal minors above order {MAX_MINOR_ORDER} omitted"
                ));
            }
            form.minors = principal_minors(&m, MAX_MINOR_ORDER)
                .into_iter()
                .map(|(indices, expr)| Minor { indices, expr })
                .collect();
            form.vars = vars;
        } else {
            diagnostics.push(format!(
                "form of degree {degree}: nonnegativity is left to numeric sampling"
            ));
        }
        forms.push(form);
    }
    Ok((odd, forms, residual))
}

fn assert_free(e: &Expr, what: &str, banned: &BTreeSet<JetVar>) -> Result<(), EngineError> {
    if let Some(j) = e.jets().iter().find(|j| banned.contains(j)) {
        return Err(EngineError::Invariant(format!("{what} still contains `{j}`")));
    }
    Ok(())
}

/// Runs the whole procedure on a validated model.
pub fn derive(model: &ModelSpec, opts: &LiuOptions) -> Result<LiuReport, EngineError> {
    let depth = opts.order.unwrap_or(model.state.order());
    let class = classify(&model.state, &model.fields, depth);
    let mut diagnostics = Vec::new();
    if model.state.order() == 0 {
        diagnostics.push("state space of order 0: classical procedure without extensions".into());
    }
    let selection = select_constraints(model, depth, opts.all_extensions);
    for k in 1..=depth {
        for i in 0..model.constraints.len() {
            if !selection.contains(&(i, k)) {
                diagnostics.push(format!(
                    "extension {k} of `{}` not used: it adds no time derivative of a state variable",
                    model.constraints[i].name
                ));
            }
        }
    }
    let z = model.state_vars();
    let mults: Vec<Multiplier> = selection
        .iter()
        .map(|&(i, k)| Multiplier {
            law: i,
            order: k,
            symbol: multiplier_symbol(i, k, &z),
        })
        .collect();

    let zeta = class.highest.clone();
    let eta = class.higher.clone();
    let entropy = split_piece(&entropy_production(model), &zeta, &eta)?;
    let pieces: Vec<Piece> = selection
        .par_iter()
        .map(|&(i, k)| split_piece(&extend_constraint(model, i, k), &zeta, &eta))
        .collect::<Result<_, _>>()?;
    let zeta_degree = pieces.iter().map(|p| p.zeta_degree).chain([entropy.zeta_degree]).max().unwrap();
    let eta_degree = pieces.iter().map(|p| p.eta_degree).chain([entropy.eta_degree]).max().unwrap();

    let time_jets: Vec<(usize, u32)> = zeta
        .iter()
        .enumerate()
        .filter(|(_, j)| j.t_order() > 0)
        .map(|(a, j)| (a, j.x_order()))
        .collect();
    let solved = solve(&mults, &time_jets, &entropy, &pieces)?;

    let combine = |get: &(dyn Fn(&Piece) -> Option<Expr> + Sync)| -> Expr {
        let mut terms: Vec<Expr> = pieces
            .par_iter()
            .enumerate()
            .filter_map(|(u, p)| get(p).map(|c| -(&solved.values[&u] * &c)))
            .collect();
        if let Some(c) = get(&entropy) {
            terms.push(c);
        }
        Expr::sum(terms)
    };

    let mut zeta_equalities = Vec::new();
    let leftover: BTreeMap<usize, Expr> = solved.leftover.into_iter().collect();
    for (a, jet) in zeta.iter().enumerate() {
        let e = if jet.t_order() > 0 {
            match leftover.get(&a) {
                Some(e) => e.clone(),
                None => continue,
            }
        } else {
            combine(&|p| p.zeta.get(&a).cloned())
        };
        if !e.is_zero() {
            zeta_equalities.push(ZetaEquality {
                jet: jet.clone(),
                expr: e,
            });
        }
    }
    let rest = combine(&|p| Some(p.rest.clone()));
    let (odd, even, residual) = emit_restrictions(&rest, &eta, &mut diagnostics)?;

    let banned: BTreeSet<JetVar> = zeta.iter().chain(&eta).cloned().collect();
    for z in &zeta_equalities {
        assert_free(&z.expr, "highest-derivative coefficient", &banned)?;
    }
    for o in &odd {
        assert_free(&o.expr, "odd-degree coefficient", &banned)?;
    }
    for f in &even {
        for e in &f.entries {
            assert_free(&e.expr, "even-degree coefficient", &banned)?;
        }
    }
    assert_free(&residual, "residual inequality", &banned)?;

    let mut side: Vec<Expr> = Vec::new();
    for p in solved.pivots {
        let p = p.monic_numerator();
        if !side.contains(&p) {
            side.push(p);
        }
    }

    let mut context = model.context.clone();
    for m in &mults {
        context.insert_func(m.symbol.clone());
    }
    let multipliers = mults
        .into_iter()
        .enumerate()
        .map(|(u, m)| MultiplierSolution {
            multiplier: m,
            expr: solved.values[&u].clone(),
        })
        .collect();
    Ok(LiuReport {
        model: model.name.clone(),
        hash: model.hash(),
        classification: class,
        constraints: selection,
        constraint_names: model.constraints.iter().map(|c| c.name.clone()).collect(),
        restrictions: RestrictionSet {
            multipliers,
            zeta_equalities,
            odd_equalities: odd,
            even_forms: even,
            residual,
            side_conditions: side,
        },
        zeta_degree,
        eta_degree,
        diagnostics,
        context,
    })
}

impl LiuReport {
    pub fn multiplier(&self, law: usize, order: u32) -> Option<&Expr> {
        self.restrictions
            .multipliers
            .iter()
            .find(|m| m.multiplier.law == law && m.multiplier.order == order)
            .map(|m| &m.expr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::models::{BuiltinModel, GRADE2, KORTEWEG};

    fn names(v: &[JetVar]) -> Vec<String> {
        v.iter().map(|j| j.to_string()).collect()
    }

    fn check_fixture(b: &BuiltinModel) -> LiuReport {
        let model = b.model().unwrap();
        let rep = derive(&model, &LiuOptions::default()).unwrap();
        assert_eq!(names(&rep.classification.highest), b.highest);
        assert_eq!(names(&rep.classification.higher), b.higher);
        let hat: Vec<String> = rep.classification.hat_z.iter().map(|j| j.to_string()).collect();
        let mut want: Vec<String> = b.hat_z.iter().map(|s| s.to_string()).collect();
        want.sort_by_key(|s| rep.classification.hat_z.iter().position(|j| j.to_string() == *s));
        assert_eq!(hat, want);
        let ctx = &rep.context;
        assert_eq!(rep.restrictions.multipliers.len(), b.multipliers.len());
        for &(i, k, want) in b.multipliers {
            let got = rep.multiplier(i - 1, k).unwrap();
            assert_eq!(got, &parse(want, ctx).unwrap(), "Lambda{i}k{k} = {}", crate::expr::to_text(got, Some(ctx)));
        }
        let z = &rep.restrictions.zeta_equalities;
        assert_eq!(z.len(), b.zeta_equalities.len());
        for (got, &(jet, want)) in z.iter().zip(b.zeta_equalities) {
            assert_eq!(got.jet.to_string(), jet);
            assert_eq!(got.expr, parse(want, ctx).unwrap());
        }
        rep
    }

    fn no_zeta_or_eta(rep: &LiuReport) {
        let c = &rep.classification;
        let banned: BTreeSet<JetVar> = c.highest.iter().chain(&c.higher).cloned().collect();
        let rs = &rep.restrictions;
        let mut all: Vec<&Expr> = vec![&rs.residual];
        all.extend(rs.multipliers.iter().map(|m| &m.expr));
        all.extend(rs.zeta_equalities.iter().map(|z| &z.expr));
        all.extend(rs.odd_equalities.iter().map(|o| &o.expr));
        for f in &rs.even_forms {
            all.extend(f.entries.iter().map(|e| &e.expr));
        }
        for e in all {
            assert!(e.jets().is_disjoint(&banned));
        }
    }

    #[test]
    fn grade2_derivation() {
        let rep = check_fixture(&GRADE2);
        assert_eq!(rep.constraints.len(), 8);
        assert_eq!(rep.restrictions.odd_equalities.len(), 4);
        let forms = &rep.restrictions.even_forms;
        assert_eq!(forms.len(), 1);
        assert_eq!((forms[0].degree, forms[0].entries.len(), forms[0].minors.len()), (2, 10, 15));
        assert_eq!((rep.zeta_degree, rep.eta_degree), (1, 2));
        no_zeta_or_eta(&rep);
    }

    #[test]
    fn korteweg_derivation() {
        let rep = check_fixture(&KORTEWEG);
        let k: Vec<u32> = rep.constraints.iter().map(|c| c.1).collect();
        assert_eq!(k, [0, 0, 0, 1, 1, 1, 2]);
        assert_eq!((rep.zeta_degree, rep.eta_degree), (1, 2));
        let forms = &rep.restrictions.even_forms;
        assert_eq!((forms[0].degree, forms[0].entries.len(), forms[0].minors.len()), (2, 6, 7));
        no_zeta_or_eta(&rep);

        let model = KORTEWEG.model().unwrap();
        let full = constrained_inequality(&model, &rep.constraints);
        let eta: BTreeSet<Atom> = rep.classification.higher.iter().cloned().map(Atom::Jet).collect();
        assert_eq!(full.degree_in(&eta), 2);
        let all = derive(&model, &LiuOptions { all_extensions: true, order: None }).unwrap();
        assert_eq!(all.constraints.len(), 9);
        assert_eq!(all.eta_degree, 3);
    }

    #[test]
    fn selection_keeps_only_needed_extensions() {
        let model = GRADE2.model().unwrap();
        let sel = select_constraints(&model, 1, false);
        assert_eq!(sel.len(), 8);
        assert!(sel.windows(2).all(|w| (w[0].1, w[0].0) < (w[1].1, w[1].0)));
        let model = KORTEWEG.model().unwrap();
        assert_eq!(select_constraints(&model, 2, true).len(), 9);
    }
}
