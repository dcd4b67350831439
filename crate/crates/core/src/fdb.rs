//! Higher total x-derivatives of a composite function by explicit enumeration
//! of the Diophantine index sets, with the iterated derivative as oracle.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::expr::{Expr, FuncSym};

/// `k = (k_1..k_m)` with `Σ i k_i = m`, and an `m × s` matrix `q` whose
/// row sums are the `k_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiophantineSolution {
    pub k: Vec<u32>,
    pub q: Vec<Vec<u32>>,
}

impl DiophantineSolution {
    /// `p_j = Σ_i q_ij`.
    pub fn p(&self) -> Vec<u32> {
        let s = self.q.first().map_or(0, |r| r.len());
        (0..s).map(|j| self.q.iter().map(|r| r[j]).sum()).collect()
    }

    /// `Σ_j p_j = Σ_i k_i`.
    pub fn order(&self) -> u32 {
        self.k.iter().sum()
    }

    /// `m! / (∏ (i!)^{k_i} ∏∏ q_ij!)`.
    pub fn weight(&self) -> BigRational {
        let m = self.k.len() as u32;
        let mut den = BigInt::one();
        for (i, row) in self.q.iter().enumerate() {
            den *= factorial(i as u32 + 1).pow(self.k[i]);
            for &x in row {
                den *= factorial(x);
            }
        }
        BigRational::new(factorial(m), den)
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, b| a * b)
}

/// Vectors `k` with `Σ i k_i = m`, lexicographic.
fn partitions(m: u32) -> Vec<Vec<u32>> {
    fn rec(i: u32, m: u32, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i > m {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for k in 0..=left / i {
            cur.push(k);
            rec(i + 1, m, left - k * i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, m, m, &mut Vec::new(), &mut out);
    out
}

/// Ways to write `n` as an ordered sum of `s` nonnegative parts, lexicographic.
fn compositions(n: u32, s: usize) -> Vec<Vec<u32>> {
    if s == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, s - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All solutions, ordered by `k` and then row-major by `q`.
pub fn enumerate_solutions(m: u32, s: usize) -> Vec<DiophantineSolution> {
    assert!(m >= 1 && s >= 1);
    let mut out = Vec::new();
    for k in partitions(m) {
        let rows: Vec<Vec<Vec<u32>>> = k.iter().map(|&ki| compositions(ki, s)).collect();
        let mut idx = vec![0usize; rows.len()];
        'odometer: loop {
            out.push(DiophantineSolution {
                k: k.clone(),
                q: idx.iter().zip(&rows).map(|(&i, r)| r[i].clone()).collect(),
            });
            for pos in (0..rows.len()).rev() {
                idx[pos] += 1;
                if idx[pos] < rows[pos].len() {
                    continue 'odometer;
                }
                idx[pos] = 0;
            }
            break;
        }
    }
    out
}

/// `D^m F / Dx^m` from the closed formula.
pub fn faa_di_bruno(f: &FuncSym, m: u32) -> Expr {
    let w = f.deps();
    let terms = enumerate_solutions(m, w.len()).into_iter().map(|sol| {
        let deriv = Expr::func(f.add_orders(&sol.p()));
        let mut factors = vec![Expr::rational(sol.weight()), deriv];
        for (i, row) in sol.q.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                if e > 0 {
                    factors.push(Expr::jet(w[j].dx_n(i as u32 + 1)).pow(e as i32).unwrap());
                }
            }
        }
        Expr::product(factors)
    });
    Expr::sum(terms)
}

/// `D^m F / Dx^m` by `m` applications of the total derivative.
pub fn iterated(f: &FuncSym, m: u32) -> Expr {
    Expr::func(f.clone()).total_x_n(m)
}

/// A function `F` of the fields `w1..ws`.
pub fn opaque(s: usize) -> FuncSym {
    FuncSym::new("F", (1..=s).map(|j| crate::expr::JetVar::field_var(format!("w{j}"))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Context};

    #[test]
    fn small_enumerations() {
        let one = enumerate_solutions(1, 1);
        assert_eq!(one, [DiophantineSolution { k: vec![1], q: vec![vec![1]] }]);
        let two = enumerate_solutions(2, 1);
        assert_eq!(two.len(), 2);
        assert_eq!(two[0].k, [0, 1]);
        assert_eq!(two[0].q, [vec![0], vec![1]]);
        assert_eq!(two[1].k, [2, 0]);
        assert_eq!(two[1].q, [vec![2], vec![0]]);
    }

    #[test]
    fn low_order_expansions() {
        let f = opaque(2);
        let mut c = Context::with_fields(["w1", "w2"]);
        c.insert_func(f.clone());
        assert_eq!(faa_di_bruno(&f, 1), parse("F[w1]*w1_x + F[w2]*w2_x", &c).unwrap());
        let g = opaque(1);
        let mut c = Context::with_fields(["w1"]);
        c.insert_func(g.clone());
        assert_eq!(faa_di_bruno(&g, 2), parse("F[w1,w1]*w1_x^2 + F[w1]*w1_xx", &c).unwrap());
    }

    #[test]
    fn matches_iterated_derivative() {
        let f = opaque(3);
        assert_eq!(faa_di_bruno(&f, 4), iterated(&f, 4));
        let g = opaque(2);
        assert_eq!(enumerate_solutions(3, 2).len(), iterated(&g, 3).len());
    }

    #[test]
    fn solutions_satisfy_the_equations() {
        for m in 1..=6 {
            for s in 1..=3 {
                let sols = enumerate_solutions(m, s);
                for (a, sol) in sols.iter().enumerate() {
                    let total: u32 = sol.k.iter().enumerate().map(|(i, k)| (i as u32 + 1) * k).sum();
                    assert_eq!(total, m);
                    for (row, &k) in sol.q.iter().zip(&sol.k) {
                        assert_eq!(row.iter().sum::<u32>(), k);
                    }
                    assert_eq!(sol.p().iter().sum::<u32>(), sol.order());
                    assert!(sols[a + 1..].iter().all(|o| o != sol));
                }
            }
        }
    }
}
