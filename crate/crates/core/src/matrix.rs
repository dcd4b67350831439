//! Symbolic determinants by memoized cofactor expansion.

use std::collections::HashMap;

use crate::expr::Expr;

/// Determinant of the submatrix with the given row and column bitmasks.
struct Minors<'m> {
    m: &'m [Vec<Expr>],
    memo: HashMap<(u64, u64), Expr>,
}

impl Minors<'_> {
    fn det(&mut self, rows: u64, cols: u64) -> Expr {
        if rows == 0 {
            return Expr::one();
        }
        if let Some(d) = self.memo.get(&(rows, cols)) {
            return d.clone();
        }
        let r0 = rows.trailing_zeros() as usize;
        let rest = rows & !(1u64 << r0);
        let mut terms = Vec::new();
        let mut sign = true;
        let mut c = cols;
        while c != 0 {
            let j = c.trailing_zeros() as usize;
            c &= c - 1;
            let a = &self.m[r0][j];
            if !a.is_zero() {
                let sub = self.det(rest, cols & !(1u64 << j));
                if !sub.is_zero() {
                    let t = a * &sub;
                    terms.push(if sign { t } else { -t });
                }
            }
            sign = !sign;
        }
        let d = Expr::sum(terms);
        self.memo.insert((rows, cols), d.clone());
        d
    }
}

pub fn determinant(m: &[Vec<Expr>]) -> Expr {
    let n = m.len();
    assert!(n <= 63 && m.iter().all(|r| r.len() == n), "square matrix expected");
    let mask = (1u64 << n) - 1;
    Minors { m, memo: HashMap::new() }.det(mask, mask)
}

/// Every principal minor of order `1..=max_order`, keyed by its index set,
/// listed by order and then lexicographically.
pub fn principal_minors(m: &[Vec<Expr>], max_order: usize) -> Vec<(Vec<usize>, Expr)> {
    let n = m.len();
    assert!(n <= 63 && m.iter().all(|r| r.len() == n), "square matrix expected");
    let mut minors = Minors { m, memo: HashMap::new() };
    let mut out = Vec::new();
    for k in 1..=max_order.min(n) {
        for set in subsets(n, k) {
            let mask = set.iter().fold(0u64, |acc, &i| acc | (1u64 << i));
            out.push((set, minors.det(mask, mask)));
        }
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Context};

    #[test]
    fn determinant_of_symbolic_matrix() {
        let c = Context::with_fields(["a", "b", "c", "d"]);
        let p = |s: &str| parse(s, &c).unwrap();
        let m = vec![vec![p("a"), p("b")], vec![p("c"), p("d")]];
        assert_eq!(determinant(&m), p("a*d - b*c"));
        let m3 = vec![
            vec![p("2"), p("0"), p("1")],
            vec![p("1"), p("3"), p("2")],
            vec![p("1"), p("1"), p("1")],
        ];
        assert_eq!(determinant(&m3), Expr::int(0));
    }

    #[test]
    fn principal_minors_in_order() {
        let c = Context::with_fields(["a", "b", "d"]);
        let p = |s: &str| parse(s, &c).unwrap();
        let m = vec![vec![p("a"), p("b")], vec![p("b"), p("d")]];
        let pm = principal_minors(&m, 2);
        assert_eq!(pm.len(), 3);
        assert_eq!(pm[0], (vec![0], p("a")));
        assert_eq!(pm[1], (vec![1], p("d")));
        assert_eq!(pm[2], (vec![0, 1], p("a*d - b^2")));
    }
}
