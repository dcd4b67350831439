//! Symbolic expression kernel.
//!
//! Every [`Expr`] is kept in rational normal form: a quotient of two expanded
//! polynomials over [`Atom`]s with exact rational coefficients, reduced by their
//! greatest common divisor, with a denominator whose leading coefficient is 1.
//! Structural equality of two normal forms is therefore equality of the
//! rational functions they denote.

mod atom;
mod parse;
mod poly;
mod print;
mod subst;

use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use atom::{Atom, FuncSym, JetVar};
pub use parse::{parse, parse_func, parse_jet, parse_jet_list, Context, ParseError, ParseErrorKind};
pub use poly::{coeff_to_f64, Coeff, Monomial, Poly};
pub use print::{func_latex, jet_latex, name_latex, to_latex, to_text, Printer};
pub use subst::{BindKey, Bindings, SubstError, Substituter};

/// An expression in rational normal form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Expr {
    num: Poly,
    den: Poly,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("no value for atom `{0}`")]
    MissingAtom(String),
    #[error("division by zero at {env}")]
    DivisionByZero { env: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CollectError {
    #[error("expression is not polynomial in the collected variables: denominator contains `{factor}`")]
    NotPolynomial { factor: String },
}

impl Default for Expr {
    fn default() -> Self {
        Expr::zero()
    }
}

impl std::fmt::Debug for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", to_text(self, None))
    }
}

impl Expr {
    pub fn zero() -> Self {
        Expr {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Expr::int(1)
    }

    pub fn int(n: i64) -> Self {
        Expr::rational(Coeff::from_integer(n.into()))
    }

    pub fn rational(c: Coeff) -> Self {
        Expr {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Expr::rational(Coeff::new(n.into(), d.into()))
    }

    pub fn atom(a: Atom) -> Self {
        Expr {
            num: Poly::atom(a),
            den: Poly::one(),
        }
    }

    pub fn jet(j: JetVar) -> Self {
        Expr::atom(Atom::Jet(j))
    }

    pub fn func(f: FuncSym) -> Self {
        Expr::atom(Atom::Func(f))
    }

    pub fn from_poly(p: Poly) -> Self {
        Expr {
            num: p,
            den: Poly::one(),
        }
    }

    /// Builds the normal form of `num / den`. Panics when `den` is zero.
    pub fn from_parts(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Expr::zero();
        }
        if let Some(c) = den.as_constant() {
            return Expr {
                num: num.scale(&c.recip()),
                den: Poly::one(),
            };
        }
        if den.is_monomial() {
            let (dm, dc) = den.terms()[0].clone();
            let g = dm.gcd(&num.monomial_content());
            let num = num.div_monomial(&g).unwrap().scale(&dc.recip());
            let dm = dm.div(&g).unwrap();
            return Expr {
                num,
                den: Poly::term(dm, Coeff::one()),
            };
        }
        let g = poly::gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        };
        if let Some(c) = den.as_constant() {
            return Expr {
                num: num.scale(&c.recip()),
                den: Poly::one(),
            };
        }
        let lc = den.leading().unwrap().1.recip();
        Expr {
            num: num.scale(&lc),
            den: den.scale(&lc),
        }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<Coeff> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut s = self.num.atoms();
        s.extend(self.den.atoms());
        s
    }

    /// Every jet the expression depends on, including through function symbol
    /// dependencies.
    pub fn jets(&self) -> BTreeSet<JetVar> {
        let mut out = BTreeSet::new();
        for a in self.atoms() {
            match a {
                Atom::Jet(j) => {
                    out.insert(j);
                }
                Atom::Func(f) => out.extend(f.deps().iter().cloned()),
            }
        }
        out
    }

    /// Jets that occur as atoms (not only as function symbol dependencies).
    pub fn explicit_jets(&self) -> BTreeSet<JetVar> {
        self.atoms()
            .into_iter()
            .filter_map(|a| a.as_jet().cloned())
            .collect()
    }

    pub fn funcs(&self) -> BTreeSet<FuncSym> {
        self.atoms()
            .into_iter()
            .filter_map(|a| a.as_func().cloned())
            .collect()
    }

    pub fn contains_atom(&self, a: &Atom) -> bool {
        self.num.contains_atom(a) || self.den.contains_atom(a)
    }

    pub fn recip(&self) -> Option<Expr> {
        if self.is_zero() {
            None
        } else {
            Some(Expr::from_parts(self.den.clone(), self.num.clone()))
        }
    }

    pub fn checked_div(&self, other: &Expr) -> Option<Expr> {
        Some(self * &other.recip()?)
    }

    pub fn pow(&self, e: i32) -> Option<Expr> {
        if e >= 0 {
            let e = e as u32;
            if self.den.is_one() {
                return Some(Expr::from_poly(self.num.pow(e)));
            }
            // Already reduced, so powers stay reduced.
            let num = self.num.pow(e);
            let den = self.den.pow(e);
            return Some(Expr { num, den });
        }
        self.recip()?.pow(-e)
    }

    pub fn scale(&self, c: &Coeff) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Sum of many expressions, grouping equal denominators.
    pub fn sum<I: IntoIterator<Item = Expr>>(items: I) -> Expr {
        let mut groups: BTreeMap<DenKey, Poly> = BTreeMap::new();
        for e in items {
            if e.is_zero() {
                continue;
            }
            let slot = groups.entry(DenKey(e.den)).or_default();
            *slot = slot.add(&e.num);
        }
        let mut acc = Expr::zero();
        for (DenKey(den), num) in groups {
            if num.is_zero() {
                continue;
            }
            let part = if den.is_one() {
                Expr::from_poly(num)
            } else {
                Expr::from_parts(num, den)
            };
            acc = &acc + &part;
        }
        acc
    }

    pub fn product<I: IntoIterator<Item = Expr>>(items: I) -> Expr {
        items.into_iter().fold(Expr::one(), |a, b| &a * &b)
    }

    /// Partial derivative with every other jet held fixed.
    pub fn partial(&self, v: &JetVar) -> Expr {
        let dn = self.num.partial(v);
        if self.den.is_one() {
            return Expr::from_poly(dn);
        }
        let dd = self.den.partial(v);
        if dd.is_zero() {
            return Expr::from_parts(dn, self.den.clone());
        }
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        Expr::from_parts(num, self.den.mul(&self.den))
    }

    fn total(&self, in_time: bool) -> Expr {
        let dn = self.num.total_derivative(in_time);
        if self.den.is_one() {
            return Expr::from_poly(dn);
        }
        let dd = self.den.total_derivative(in_time);
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        Expr::from_parts(num, self.den.mul(&self.den))
    }

    /// Chain-rule operator `D/Dx`.
    pub fn total_x(&self) -> Expr {
        self.total(false)
    }

    /// Chain-rule operator `D/Dt`.
    pub fn total_t(&self) -> Expr {
        self.total(true)
    }

    pub fn total_x_n(&self, n: u32) -> Expr {
        (0..n).fold(self.clone(), |e, _| e.total_x())
    }

    /// Total degree of the numerator in the given atoms (denominator ignored).
    pub fn degree_in(&self, atoms: &BTreeSet<Atom>) -> u32 {
        self.num
            .terms()
            .iter()
            .map(|(m, _)| {
                m.factors()
                    .iter()
                    .filter(|(a, _)| atoms.contains(a))
                    .map(|(_, e)| e)
                    .sum::<u32>()
            })
            .max()
            .unwrap_or(0)
    }

    /// Coefficients of the monomials in `vars`. The key is the multi-index of
    /// exponents, aligned with `vars`.
    pub fn collect(&self, vars: &[JetVar]) -> Result<BTreeMap<Vec<u32>, Expr>, CollectError> {
        let atoms: Vec<Atom> = vars.iter().cloned().map(Atom::Jet).collect();
        self.collect_atoms(&atoms)
    }

    pub fn collect_atoms(&self, vars: &[Atom]) -> Result<BTreeMap<Vec<u32>, Expr>, CollectError> {
        for v in vars {
            if self.den.contains_atom(v) {
                return Err(CollectError::NotPolynomial {
                    factor: to_text(&Expr::atom(v.clone()), None),
                });
            }
        }
        let index: BTreeMap<&Atom, usize> = vars.iter().enumerate().map(|(i, a)| (a, i)).collect();
        let mut buckets: BTreeMap<Vec<u32>, Vec<(Monomial, Coeff)>> = BTreeMap::new();
        for (m, c) in self.num.terms() {
            let mut key = vec![0u32; vars.len()];
            let mut rest = Vec::new();
            for (a, e) in m.factors() {
                match index.get(a) {
                    Some(&i) => key[i] = *e,
                    None => rest.push((a.clone(), *e)),
                }
            }
            buckets
                .entry(key)
                .or_default()
                .push((Monomial::from_factors(rest), c.clone()));
        }
        Ok(buckets
            .into_iter()
            .map(|(k, terms)| {
                let p = Poly::from_terms(terms);
                let e = if self.den.is_one() {
                    Expr::from_poly(p)
                } else {
                    Expr::from_parts(p, self.den.clone())
                };
                (k, e)
            })
            .filter(|(_, e)| !e.is_zero())
            .collect())
    }

    /// Floating-point value under an assignment of every atom.
    pub fn evaluate(&self, env: &BTreeMap<Atom, f64>) -> Result<f64, EvalError> {
        self.evaluate_with(&|a| env.get(a).copied())
            .map_err(|e| match e {
                EvalError::DivisionByZero { .. } => EvalError::DivisionByZero {
                    env: format_env(env),
                },
                other => other,
            })
    }

    pub fn evaluate_with(&self, env: &dyn Fn(&Atom) -> Option<f64>) -> Result<f64, EvalError> {
        let missing = |a: Atom| EvalError::MissingAtom(to_text(&Expr::atom(a), None));
        let n = self.num.eval(env).map_err(missing)?;
        if self.den.is_one() {
            return Ok(n);
        }
        let d = self.den.eval(env).map_err(missing)?;
        if d == 0.0 || !d.is_finite() {
            return Err(EvalError::DivisionByZero { env: String::new() });
        }
        Ok(n / d)
    }

    /// Scale-free form of the equation `self = 0`: the numerator divided by its
    /// leading coefficient.
    pub fn monic_numerator(&self) -> Expr {
        Expr::from_poly(self.num.monic())
    }

    /// Leading coefficient of the numerator is negative.
    pub fn leading_is_negative(&self) -> bool {
        self.num.leading().is_some_and(|(_, c)| c.is_negative())
    }

    /// Number of terms in the numerator.
    pub fn len(&self) -> usize {
        self.num.len()
    }

    pub fn is_empty(&self) -> bool {
        self.num.is_empty()
    }

    /// `self / other` is a nonzero rational constant.
    pub fn proportional_to(&self, other: &Expr) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        match self.checked_div(other) {
            Some(q) => q.as_constant().is_some(),
            None => false,
        }
    }
}

fn format_env(env: &BTreeMap<Atom, f64>) -> String {
    let parts: Vec<String> = env
        .iter()
        .map(|(a, v)| format!("{}={}", to_text(&Expr::atom(a.clone()), None), v))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

#[derive(PartialEq, Eq)]
struct DenKey(Poly);

impl Ord for DenKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let a = self.0.terms();
        let b = other.0.terms();
        a.len().cmp(&b.len()).then_with(|| {
            for (x, y) in a.iter().zip(b) {
                let o = x.0.cmp(&y.0).then_with(|| x.1.cmp(&y.1));
                if o != std::cmp::Ordering::Equal {
                    return o;
                }
            }
            std::cmp::Ordering::Equal
        })
    }
}

impl PartialOrd for DenKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            if self.den.is_one() {
                return Expr::from_poly(self.num.add(&rhs.num));
            }
            return Expr::from_parts(self.num.add(&rhs.num), self.den.clone());
        }
        if self.den.is_monomial() && rhs.den.is_monomial() {
            let ma = &self.den.terms()[0].0;
            let mb = &rhs.den.terms()[0].0;
            let l = ma.lcm(mb);
            let na = self.num.mul_monomial(&l.div(ma).unwrap());
            let nb = rhs.num.mul_monomial(&l.div(mb).unwrap());
            return Expr::from_parts(na.add(&nb), Poly::term(l, Coeff::one()));
        }
        let g = poly::gcd(&self.den, &rhs.den);
        let ca = rhs.den.div_exact(&g).unwrap();
        let cb = self.den.div_exact(&g).unwrap();
        let num = self.num.mul(&ca).add(&rhs.num.mul(&cb));
        Expr::from_parts(num, self.den.mul(&ca))
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        self + &(-rhs)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        if self.is_zero() || rhs.is_zero() {
            return Expr::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Expr::from_poly(self.num.mul(&rhs.num));
        }
        Expr::from_parts(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }
}

impl Div for &Expr {
    type Output = Expr;
    fn div(self, rhs: &Expr) -> Expr {
        self.checked_div(rhs).expect("division by zero expression")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                (&self).$m(rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<JetVar> for Expr {
    fn from(j: JetVar) -> Self {
        Expr::jet(j)
    }
}

impl From<FuncSym> for Expr {
    fn from(f: FuncSym) -> Self {
        Expr::func(f)
    }
}
