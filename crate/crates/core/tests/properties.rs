use std::collections::BTreeSet;

use liu_core::expr::{parse, to_text, Atom, Context, Expr, FuncSym, JetVar};
use liu_core::liu::monomial_expr;
use proptest::prelude::*;

const CASES: u32 = 1000;

fn context() -> Context {
    let mut c = Context::with_fields(["u", "w"]);
    c.declare_func("f", [JetVar::field_var("u"), JetVar::new("u", 0, 1)]);
    c.declare_func("g", [JetVar::field_var("w")]);
    c
}

fn sym(name: &str) -> FuncSym {
    context().func(name).unwrap().clone()
}

fn leaf() -> impl Strategy<Value = Expr> {
    let f = sym("f");
    let fu = f.differentiate(&JetVar::field_var("u")).unwrap();
    let g = sym("g");
    prop_oneof![
        (-4i64..=4).prop_map(Expr::int),
        (-3i64..=3, 1i64..=4).prop_map(|(n, d)| Expr::frac(n, d)),
        (prop_oneof![Just("u"), Just("w")], 0u32..=1, 0u32..=2).prop_map(|(n, t, x)| Expr::jet(JetVar::new(n, t, x))),
        prop_oneof![Just(f), Just(fu), Just(g)].prop_map(Expr::func),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a + &b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a - &b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a * &b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.checked_div(&b).unwrap_or(a)),
            (inner, 0i32..=2).prop_map(|(a, e)| a.pow(e).unwrap()),
        ]
    })
}

/// Polynomial in `u_xxx` and `w_xxx` whose coefficients never mention them.
fn polynomial() -> impl Strategy<Value = Expr> {
    prop::collection::vec((expr(), 0u32..=2, 0u32..=2), 1..4).prop_map(|terms| {
        Expr::sum(terms.into_iter().map(|(c, a, b)| {
            &c * &monomial_expr(&[(JetVar::new("u", 0, 3), a), (JetVar::new("w", 0, 3), b)])
        }))
    })
}

fn reconstruct(e: &Expr, vars: &[JetVar]) -> Option<Expr> {
    let table = e.collect(vars).ok()?;
    Some(Expr::sum(table.iter().map(|(k, c)| {
        let m: Vec<(JetVar, u32)> = vars.iter().cloned().zip(k.iter().copied()).collect();
        c * &monomial_expr(&m)
    })))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn print_parse_round_trip(e in expr()) {
        let c = context();
        let text = to_text(&e, Some(&c));
        let back = parse(&text, &c).unwrap();
        prop_assert_eq!(back, e, "{}", text);
    }

    #[test]
    fn ring_identities(a in expr(), b in expr(), c in expr()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &Expr::one(), a.clone());
        prop_assert_eq!(&a + &Expr::zero(), a.clone());
        if !a.is_zero() {
            prop_assert_eq!(a.checked_div(&a).unwrap(), Expr::one());
        }
    }

    #[test]
    fn leibniz_rule(a in expr(), b in expr()) {
        let ab = &a * &b;
        prop_assert_eq!(ab.total_x(), &(&a.total_x() * &b) + &(&a * &b.total_x()));
        prop_assert_eq!(ab.total_t(), &(&a.total_t() * &b) + &(&a * &b.total_t()));
        let v = JetVar::new("u", 0, 1);
        prop_assert_eq!(ab.partial(&v), &(&a.partial(&v) * &b) + &(&a * &b.partial(&v)));
    }

    #[test]
    fn total_derivatives_commute(e in expr()) {
        prop_assert_eq!(e.total_x().total_t(), e.total_t().total_x());
    }

    #[test]
    fn collect_reconstructs(p in polynomial(), e in expr()) {
        let vars = [JetVar::new("u", 0, 3), JetVar::new("w", 0, 3)];
        prop_assert_eq!(reconstruct(&p, &vars).unwrap(), p.clone());
        let table = p.collect(&vars).unwrap();
        let banned: BTreeSet<Atom> = vars.iter().cloned().map(Atom::Jet).collect();
        prop_assert!(table.values().all(|c| c.atoms().is_disjoint(&banned)));
        let jets: Vec<JetVar> = e.jets().into_iter().take(2).collect();
        if let Some(r) = reconstruct(&e, &jets) {
            prop_assert_eq!(r, e);
        }
    }
}
