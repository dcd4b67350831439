//! Atoms of the symbolic calculus: jet variables and constitutive function symbols.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

/// A field together with its orders of differentiation in `t` and `x`.
///
/// Mixed derivatives commute, so `(field, t, x)` is a canonical coordinate:
/// `rho_tx` and `rho_xt` are the same variable.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct JetVar {
    field: Arc<str>,
    t: u32,
    x: u32,
}

impl JetVar {
    pub fn new(field: impl Into<Arc<str>>, t: u32, x: u32) -> Self {
        JetVar {
            field: field.into(),
            t,
            x,
        }
    }

    /// The undifferentiated field variable.
    pub fn field_var(field: impl Into<Arc<str>>) -> Self {
        JetVar::new(field, 0, 0)
    }

    pub fn field(&self) -> &str {
        &self.field
    }

    pub fn field_arc(&self) -> &Arc<str> {
        &self.field
    }

    pub fn t_order(&self) -> u32 {
        self.t
    }

    pub fn x_order(&self) -> u32 {
        self.x
    }

    pub fn is_field(&self) -> bool {
        self.t == 0 && self.x == 0
    }

    pub fn dt(&self) -> JetVar {
        JetVar::new(self.field.clone(), self.t + 1, self.x)
    }

    pub fn dx(&self) -> JetVar {
        JetVar::new(self.field.clone(), self.t, self.x + 1)
    }

    pub fn dx_n(&self, n: u32) -> JetVar {
        JetVar::new(self.field.clone(), self.t, self.x + n)
    }

    /// Text suffix, `""` for the bare field, otherwise `_t..tx..x`.
    pub fn suffix(&self) -> String {
        if self.is_field() {
            return String::new();
        }
        let mut s = String::with_capacity(1 + (self.t + self.x) as usize);
        s.push('_');
        s.extend(std::iter::repeat_n('t', self.t as usize));
        s.extend(std::iter::repeat_n('x', self.x as usize));
        s
    }
}

impl Ord for JetVar {
    fn cmp(&self, other: &Self) -> Ordering {
        if !Arc::ptr_eq(&self.field, &other.field) {
            match self.field.cmp(&other.field) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        (self.t, self.x).cmp(&(other.t, other.x))
    }
}

impl PartialOrd for JetVar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.field, self.suffix())
    }
}

impl fmt::Debug for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(PartialEq, Eq, Hash)]
struct FuncData {
    name: Arc<str>,
    deps: Arc<[JetVar]>,
    orders: Vec<u32>,
}

/// A constitutive function symbol, or one of its partial derivatives.
///
/// `orders[i]` counts how many times the symbol has been differentiated with
/// respect to `deps[i]`; all zeros is the undifferentiated symbol. Dependencies
/// are kept sorted and duplicate-free, so two symbols compare equal exactly when
/// name, dependencies and orders agree. Schwarz symmetry is built in.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FuncSym(Arc<FuncData>);

impl FuncSym {
    /// Base (undifferentiated) symbol. Dependencies are sorted and deduplicated.
    pub fn new(name: impl Into<Arc<str>>, deps: impl IntoIterator<Item = JetVar>) -> Self {
        let mut deps: Vec<JetVar> = deps.into_iter().collect();
        deps.sort();
        deps.dedup();
        let n = deps.len();
        FuncSym(Arc::new(FuncData {
            name: name.into(),
            deps: deps.into(),
            orders: vec![0; n],
        }))
    }

    /// Symbol with explicit derivative orders; `deps` must already be canonical.
    pub fn with_orders(name: Arc<str>, deps: Arc<[JetVar]>, orders: Vec<u32>) -> Self {
        debug_assert_eq!(deps.len(), orders.len());
        debug_assert!(deps.windows(2).all(|w| w[0] < w[1]));
        FuncSym(Arc::new(FuncData { name, deps, orders }))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn name_arc(&self) -> &Arc<str> {
        &self.0.name
    }

    pub fn deps(&self) -> &[JetVar] {
        &self.0.deps
    }

    pub fn deps_arc(&self) -> &Arc<[JetVar]> {
        &self.0.deps
    }

    pub fn orders(&self) -> &[u32] {
        &self.0.orders
    }

    pub fn total_order(&self) -> u32 {
        self.0.orders.iter().sum()
    }

    pub fn is_base(&self) -> bool {
        self.0.orders.iter().all(|&o| o == 0)
    }

    pub fn base(&self) -> FuncSym {
        if self.is_base() {
            return self.clone();
        }
        FuncSym::with_orders(
            self.0.name.clone(),
            self.0.deps.clone(),
            vec![0; self.0.deps.len()],
        )
    }

    pub fn dep_index(&self, v: &JetVar) -> Option<usize> {
        self.0.deps.binary_search(v).ok()
    }

    /// Partial derivative with respect to `v`, or `None` when `v` is not a dependency.
    pub fn differentiate(&self, v: &JetVar) -> Option<FuncSym> {
        let i = self.dep_index(v)?;
        let mut orders = self.0.orders.clone();
        orders[i] += 1;
        Some(FuncSym::with_orders(
            self.0.name.clone(),
            self.0.deps.clone(),
            orders,
        ))
    }

    /// Derivative with the given orders added on top of the current ones.
    pub fn add_orders(&self, extra: &[u32]) -> FuncSym {
        let orders = self
            .0
            .orders
            .iter()
            .zip(extra)
            .map(|(a, b)| a + b)
            .collect();
        FuncSym::with_orders(self.0.name.clone(), self.0.deps.clone(), orders)
    }

    /// Same name and dependencies (possibly different derivative orders).
    pub fn same_function(&self, other: &FuncSym) -> bool {
        self.0.name == other.0.name && self.0.deps == other.0.deps
    }

    /// Dependencies listed with multiplicity, e.g. `[rho, rho, v_x]`.
    pub fn derivative_list(&self) -> Vec<JetVar> {
        let mut out = Vec::new();
        for (d, &o) in self.0.deps.iter().zip(self.0.orders.iter()) {
            for _ in 0..o {
                out.push(d.clone());
            }
        }
        out
    }
}

impl Ord for FuncSym {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0
            .name
            .cmp(&other.0.name)
            .then_with(|| self.0.orders.cmp(&other.0.orders))
            .then_with(|| self.0.deps.cmp(&other.0.deps))
    }
}

impl PartialOrd for FuncSym {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for FuncSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.name())?;
        for (i, d) in self.deps().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")?;
        if !self.is_base() {
            write!(f, "[")?;
            for (i, d) in self.derivative_list().iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{d}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// A symbolic atom. Jets order before function symbols.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Jet(JetVar),
    Func(FuncSym),
}

impl Atom {
    pub fn as_jet(&self) -> Option<&JetVar> {
        match self {
            Atom::Jet(j) => Some(j),
            Atom::Func(_) => None,
        }
    }

    pub fn as_func(&self) -> Option<&FuncSym> {
        match self {
            Atom::Func(f) => Some(f),
            Atom::Jet(_) => None,
        }
    }

    /// Partial derivative of the atom itself with respect to a jet.
    pub(crate) fn partial(&self, v: &JetVar) -> AtomPartial {
        match self {
            Atom::Jet(j) if j == v => AtomPartial::One,
            Atom::Jet(_) => AtomPartial::Zero,
            Atom::Func(f) => match f.differentiate(v) {
                Some(d) => AtomPartial::Atom(Atom::Func(d)),
                None => AtomPartial::Zero,
            },
        }
    }
}

pub(crate) enum AtomPartial {
    Zero,
    One,
    Atom(Atom),
}

impl From<JetVar> for Atom {
    fn from(j: JetVar) -> Self {
        Atom::Jet(j)
    }
}

impl From<FuncSym> for Atom {
    fn from(f: FuncSym) -> Self {
        Atom::Func(f)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Jet(j) => write!(f, "{j}"),
            Atom::Func(s) => write!(f, "{s:?}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j(f: &str, t: u32, x: u32) -> JetVar {
        JetVar::new(f, t, x)
    }

    #[test]
    fn deps_are_sorted_and_deduplicated() {
        let s = FuncSym::new("s", [j("rho", 0, 1), j("eps", 0, 0), j("rho", 0, 0), j("eps", 0, 0)]);
        assert_eq!(s.deps(), &[j("eps", 0, 0), j("rho", 0, 0), j("rho", 0, 1)]);
        assert_eq!(s.orders(), &[0, 0, 0]);
    }

    #[test]
    fn derivative_increments_matching_order() {
        let s = FuncSym::new("s", [j("rho", 0, 0), j("eps", 0, 0), j("rho", 0, 1)]);
        let d = s.differentiate(&j("rho", 0, 1)).unwrap();
        assert_eq!(d.orders(), &[0, 0, 1]);
        assert!(s.differentiate(&j("v", 0, 1)).is_none());
        let dd = d.differentiate(&j("eps", 0, 0)).unwrap();
        let dd2 = s
            .differentiate(&j("eps", 0, 0))
            .unwrap()
            .differentiate(&j("rho", 0, 1))
            .unwrap();
        assert_eq!(dd, dd2);
    }

    #[test]
    fn jet_suffix_text() {
        assert_eq!(j("rho", 1, 2).to_string(), "rho_txx");
        assert_eq!(j("v", 0, 0).to_string(), "v");
    }
}
