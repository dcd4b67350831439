//! Sparse multivariate polynomials over the rationals, keyed by [`Atom`]s.
//!
//! Terms are kept sorted in ascending graded-lexicographic order with the
//! smallest atom as the most significant variable. Zero coefficients are never
//! stored.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::atom::{Atom, AtomPartial, JetVar};

pub type Coeff = BigRational;

/// Power product of atoms, sorted by atom with positive exponents.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Atom, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn atom(a: Atom) -> Self {
        Monomial(vec![(a, 1)])
    }

    pub fn atom_pow(a: Atom, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(a, e)])
        }
    }

    /// Builds from unsorted factors; repeated atoms are merged.
    pub fn from_factors(factors: impl IntoIterator<Item = (Atom, u32)>) -> Self {
        let mut map: BTreeMap<Atom, u32> = BTreeMap::new();
        for (a, e) in factors {
            if e > 0 {
                *map.entry(a).or_insert(0) += e;
            }
        }
        Monomial(map.into_iter().collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn factors(&self) -> &[(Atom, u32)] {
        &self.0
    }

    pub fn exponent(&self, a: &Atom) -> u32 {
        match self.0.binary_search_by(|(b, _)| b.cmp(a)) {
            Ok(i) => self.0[i].1,
            Err(_) => 0,
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    pub fn pow(&self, e: u32) -> Monomial {
        if e == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|(a, k)| (a.clone(), k * e)).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (a, e) in &self.0 {
            if j < other.0.len() && &other.0[j].0 == a {
                let f = other.0[j].1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((a.clone(), e - f)),
                }
                j += 1;
            } else if j < other.0.len() && other.0[j].0 < *a {
                return None;
            } else {
                out.push((a.clone(), *e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Componentwise minimum of exponents.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1.min(other.0[j].1)));
                    i += 1;
                    j += 1;
                }
            }
        }
        Monomial(out)
    }

    /// Componentwise maximum of exponents.
    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let g = self.gcd(other);
        self.mul(other).div(&g).expect("gcd divides product")
    }

    /// Splits into (the part made of atoms accepted by `pred`, the rest).
    pub fn split(&self, mut pred: impl FnMut(&Atom) -> bool) -> (Monomial, Monomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.0.iter().cloned().partition(|(x, _)| pred(x));
        (Monomial(a), Monomial(b))
    }

    pub fn without(&self, a: &Atom) -> (u32, Monomial) {
        let e = self.exponent(a);
        if e == 0 {
            return (0, self.clone());
        }
        (e, Monomial(self.0.iter().filter(|(b, _)| b != a).cloned().collect()))
    }

    fn lex_cmp(&self, other: &Monomial) -> Ordering {
        let mut i = 0;
        loop {
            match (self.0.get(i), other.0.get(i)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((a, ea)), Some((b, eb))) => match a.cmp(b) {
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(eb);
                        }
                    }
                    // `self` carries the more significant atom.
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                },
            }
            i += 1;
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.lex_cmp(other))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Debug for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (a, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{a:?}")?;
            if *e != 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse polynomial: ascending sorted terms, no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: Vec<(Monomial, Coeff)>,
}

impl std::fmt::Debug for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*{m:?}")?;
        }
        Ok(())
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly {
                terms: vec![(Monomial::one(), c)],
            }
        }
    }

    pub fn atom(a: Atom) -> Self {
        Poly {
            terms: vec![(Monomial::atom(a), Coeff::one())],
        }
    }

    pub fn term(m: Monomial, c: Coeff) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    /// Builds from arbitrary terms, merging duplicates and dropping zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Coeff)>) -> Self {
        let mut map: BTreeMap<Monomial, Coeff> = BTreeMap::new();
        for (m, c) in terms {
            if c.is_zero() {
                continue;
            }
            match map.entry(m) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(c);
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    *o.get_mut() += c;
                    if o.get().is_zero() {
                        o.remove();
                    }
                }
            }
        }
        Poly {
            terms: map.into_iter().collect(),
        }
    }

    pub fn terms(&self) -> &[(Monomial, Coeff)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, Coeff)> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    /// The constant value, when the polynomial has no atoms.
    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.as_slice() {
            [] => Some(Coeff::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn leading(&self) -> Option<&(Monomial, Coeff)> {
        self.terms.last()
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, k: &Coeff) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        if k.is_one() {
            return self.clone();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        if m.is_one() {
            return self.clone();
        }
        Poly {
            terms: self.terms.iter().map(|(t, c)| (t.mul(m), c.clone())).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, k: &Coeff) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(t, c)| (t.mul(m), c * k))
                .collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &a[i].1 + &b[j].1;
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Poly { terms: out }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return other.mul_term(m, c);
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return self.mul_term(m, c);
        }
        let (small, large) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut map: BTreeMap<Monomial, Coeff> = BTreeMap::new();
        for (m1, c1) in &small.terms {
            for (m2, c2) in &large.terms {
                let m = m1.mul(m2);
                let c = c1 * c2;
                match map.entry(m) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(c);
                    }
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        *o.get_mut() += c;
                    }
                }
            }
        }
        Poly {
            terms: map.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        if e == 0 {
            return Poly::one();
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return Poly::term(m.pow(e), num_traits::pow(c.clone(), e as usize));
        }
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Partial derivative with respect to a jet variable (function symbols
    /// depending on it gain a derivative order).
    pub fn partial(&self, v: &JetVar) -> Poly {
        let mut out: Vec<(Monomial, Coeff)> = Vec::new();
        for (m, c) in &self.terms {
            for (idx, (a, e)) in m.factors().iter().enumerate() {
                let rest = || {
                    let mut f: Vec<(Atom, u32)> = m.factors().to_vec();
                    if *e == 1 {
                        f.remove(idx);
                    } else {
                        f[idx].1 -= 1;
                    }
                    f
                };
                match a.partial(v) {
                    AtomPartial::Zero => {}
                    AtomPartial::One => {
                        let f = rest();
                        out.push((Monomial(f), c * Coeff::from_integer((*e).into())));
                    }
                    AtomPartial::Atom(d) => {
                        let mut f = rest();
                        f.push((d, 1));
                        out.push((
                            Monomial::from_factors(f),
                            c * Coeff::from_integer((*e).into()),
                        ));
                    }
                }
            }
        }
        Poly::from_terms(out)
    }

    /// Chain-rule derivative along `t` (`in_time`) or `x`: every jet gains one
    /// order, function symbols expand over their dependencies.
    pub fn total_derivative(&self, in_time: bool) -> Poly {
        let bump = |j: &JetVar| if in_time { j.dt() } else { j.dx() };
        let mut out: Vec<(Monomial, Coeff)> = Vec::new();
        for (m, c) in &self.terms {
            for (idx, (a, e)) in m.factors().iter().enumerate() {
                let mut rest: Vec<(Atom, u32)> = m.factors().to_vec();
                if *e == 1 {
                    rest.remove(idx);
                } else {
                    rest[idx].1 -= 1;
                }
                let k = c * Coeff::from_integer((*e).into());
                match a {
                    Atom::Jet(j) => {
                        let mut f = rest;
                        f.push((Atom::Jet(bump(j)), 1));
                        out.push((Monomial::from_factors(f), k));
                    }
                    Atom::Func(fs) => {
                        for d in fs.deps() {
                            let mut f = rest.clone();
                            f.push((Atom::Func(fs.differentiate(d).unwrap()), 1));
                            f.push((Atom::Jet(bump(d)), 1));
                            out.push((Monomial::from_factors(f), k.clone()));
                        }
                    }
                }
            }
        }
        Poly::from_terms(out)
    }

    /// Every distinct atom occurring in the polynomial.
    pub fn atoms(&self) -> std::collections::BTreeSet<Atom> {
        let mut s = std::collections::BTreeSet::new();
        for (m, _) in &self.terms {
            for (a, _) in m.factors() {
                if !s.contains(a) {
                    s.insert(a.clone());
                }
            }
        }
        s
    }

    pub fn contains_atom(&self, a: &Atom) -> bool {
        self.terms.iter().any(|(m, _)| m.exponent(a) > 0)
    }

    pub fn degree_in(&self, a: &Atom) -> u32 {
        self.terms.iter().map(|(m, _)| m.exponent(a)).max().unwrap_or(0)
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        let Some((first, _)) = it.next() else {
            return Monomial::one();
        };
        let mut g = first.clone();
        for (m, _) in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    pub fn div_monomial(&self, m: &Monomial) -> Option<Poly> {
        if m.is_one() {
            return Some(self.clone());
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (t, c) in &self.terms {
            terms.push((t.div(m)?, c.clone()));
        }
        // Dividing by a monomial preserves the order.
        Some(Poly { terms })
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        if d.terms.len() == 1 {
            let (m, c) = &d.terms[0];
            return self.div_monomial(m).map(|p| p.scale(&c.recip()));
        }
        let (lm, lc) = d.leading().cloned().unwrap();
        let lc_inv = lc.recip();
        let mut r = self.clone();
        let mut q: Vec<(Monomial, Coeff)> = Vec::new();
        while let Some((rm, rc)) = r.leading().cloned() {
            let tm = rm.div(&lm)?;
            let tc = rc * &lc_inv;
            r = r.sub(&d.mul_term(&tm, &tc));
            q.push((tm, tc));
        }
        Some(Poly::from_terms(q))
    }

    /// View as a polynomial in `x` with coefficients free of `x`.
    fn univariate(&self, x: &Atom) -> Vec<Poly> {
        let deg = self.degree_in(x) as usize;
        let mut buckets: Vec<Vec<(Monomial, Coeff)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.without(x);
            buckets[e as usize].push((rest, c.clone()));
        }
        buckets.into_iter().map(Poly::from_terms).collect()
    }

    fn from_univariate(coeffs: &[Poly], x: &Atom) -> Poly {
        let mut terms = Vec::new();
        for (e, c) in coeffs.iter().enumerate() {
            let xm = Monomial::atom_pow(x.clone(), e as u32);
            for (m, k) in &c.terms {
                terms.push((m.mul(&xm), k.clone()));
            }
        }
        Poly::from_terms(terms)
    }

    pub fn eval(&self, env: &dyn Fn(&Atom) -> Option<f64>) -> Result<f64, Atom> {
        let mut total = 0.0;
        for (m, c) in &self.terms {
            let mut v = coeff_to_f64(c);
            for (a, e) in m.factors() {
                let x = env(a).ok_or_else(|| a.clone())?;
                v *= x.powi(*e as i32);
            }
            total += v;
        }
        Ok(total)
    }
}

pub fn coeff_to_f64(c: &Coeff) -> f64 {
    use num_traits::ToPrimitive;
    c.to_f64().unwrap_or_else(|| {
        // Fall back on a scaled division for huge numerators/denominators.
        let n = c.numer().to_f64().unwrap_or(f64::NAN);
        let d = c.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Greatest common divisor, normalized to leading coefficient 1.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    let ca = a.monomial_content();
    let cb = b.monomial_content();
    let mc = ca.gcd(&cb);
    let a1 = a.div_monomial(&ca).unwrap();
    let b1 = b.div_monomial(&cb).unwrap();
    let g = gcd_rec(&a1, &b1);
    g.mul_monomial(&mc).monic()
}

fn gcd_rec(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a.is_monomial() || b.is_monomial() {
        let (m, p) = if a.is_monomial() { (a, b) } else { (b, a) };
        let g = m.terms[0].0.gcd(&p.monomial_content());
        return Poly::term(g, Coeff::one());
    }
    let va = a.atoms();
    let vb = b.atoms();
    // An atom present in only one argument can be eliminated via content.
    if let Some(x) = va.iter().find(|x| !vb.contains(*x)) {
        let c = content(a, x);
        return gcd_rec(&c, b);
    }
    if let Some(x) = vb.iter().find(|x| !va.contains(*x)) {
        let c = content(b, x);
        return gcd_rec(a, &c);
    }
    let x = va
        .iter()
        .min_by_key(|x| a.degree_in(x).max(b.degree_in(x)))
        .unwrap()
        .clone();
    let ua = a.univariate(&x);
    let ub = b.univariate(&x);
    let ca = content_of(&ua);
    let cb = content_of(&ub);
    let c = gcd_rec(&ca, &cb);
    let pa: Vec<Poly> = ua.iter().map(|p| p.div_exact(&ca).unwrap()).collect();
    let pb: Vec<Poly> = ub.iter().map(|p| p.div_exact(&cb).unwrap()).collect();
    let g = primitive_prs(pa, pb);
    let g = Poly::from_univariate(&g, &x);
    c.mul(&g).monic()
}

fn content(p: &Poly, x: &Atom) -> Poly {
    content_of(&p.univariate(x))
}

fn content_of(coeffs: &[Poly]) -> Poly {
    let mut g = Poly::zero();
    for c in coeffs {
        if c.is_zero() {
            continue;
        }
        g = if g.is_zero() { c.monic() } else { gcd_rec(&g, c) };
        if g.is_constant() {
            return Poly::one();
        }
    }
    if g.is_zero() {
        Poly::one()
    } else {
        g
    }
}

fn trim(u: &mut Vec<Poly>) {
    while u.len() > 1 && u.last().is_some_and(Poly::is_zero) {
        u.pop();
    }
    if u.len() == 1 && u[0].is_zero() {
        u.clear();
    }
}

fn prem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let mut r: Vec<Poly> = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lcb = &b[db];
    while !r.is_empty() && r.len() > db {
        let dr = r.len() - 1;
        let lcr = r[dr].clone();
        let shift = dr - db;
        let mut next: Vec<Poly> = r.iter().map(|c| c.mul(lcb)).collect();
        for (i, bc) in b.iter().enumerate() {
            next[i + shift] = next[i + shift].sub(&bc.mul(&lcr));
        }
        r = next;
        trim(&mut r);
    }
    r
}

fn primitive_prs(mut a: Vec<Poly>, mut b: Vec<Poly>) -> Vec<Poly> {
    trim(&mut a);
    trim(&mut b);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        if b.is_empty() {
            return a;
        }
        if b.len() == 1 {
            return vec![Poly::one()];
        }
        let r = prem(&a, &b);
        if r.is_empty() {
            return b;
        }
        let c = content_of(&r);
        let pr: Vec<Poly> = r.iter().map(|p| p.div_exact(&c).unwrap()).collect();
        a = b;
        b = pr;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(name: &str) -> Poly {
        Poly::atom(Atom::Jet(JetVar::field_var(name)))
    }

    fn c(n: i64) -> Poly {
        Poly::constant(Coeff::from_integer(n.into()))
    }

    #[test]
    fn grlex_orders_by_degree_first() {
        let a = Monomial::atom(Atom::Jet(JetVar::field_var("a")));
        let b2 = Monomial::atom_pow(Atom::Jet(JetVar::field_var("b")), 2);
        assert!(a < b2);
        let b = Monomial::atom(Atom::Jet(JetVar::field_var("b")));
        // `a` is the more significant variable.
        assert!(b < a);
    }

    #[test]
    fn exact_division_round_trips() {
        let (x, y) = (var("x"), var("y"));
        let p = x.add(&y).mul(&x.sub(&y)).mul(&x.add(&c(3)));
        let q = p.div_exact(&x.add(&y)).unwrap();
        assert_eq!(q, x.sub(&y).mul(&x.add(&c(3))));
        assert!(p.div_exact(&x.add(&c(7))).is_none());
    }

    #[test]
    fn gcd_of_products() {
        let (x, y, z) = (var("x"), var("y"), var("z"));
        let common = x.mul(&y).add(&z).add(&c(1));
        let a = common.mul(&x.sub(&z)).mul(&y);
        let b = common.mul(&common).mul(&x.add(&y));
        assert_eq!(gcd(&a, &b), common.monic());
        assert_eq!(gcd(&x, &y), Poly::one());
        assert_eq!(gcd(&x.mul(&x).mul(&y), &x.mul(&z)), x);
    }

    #[test]
    fn partial_of_power() {
        let x = var("x");
        let p = x.pow(3);
        assert_eq!(p.partial(&JetVar::field_var("x")), x.pow(2).scale(&Coeff::from_integer(3.into())));
    }
}
