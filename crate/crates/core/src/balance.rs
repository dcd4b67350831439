//! Balance residuals, their spatial extensions and the entropy production.

use num_integer::binomial;

use crate::expr::{Expr, JetVar};
use crate::model::{BalanceLaw, EntropyForm, ModelSpec};

/// `DΦ/Dt + D(Ψ + χ)/Dx − Γ`.
pub fn residual(law: &BalanceLaw) -> Expr {
    let flux = &law.psi + &law.chi;
    &(&law.phi.total_t() + &flux.total_x()) - &law.gamma
}

/// `D^m E / Dx^m` by iterated total derivatives.
pub fn extend(law: &BalanceLaw, m: u32) -> Expr {
    residual(law).total_x_n(m)
}

fn binom(m: u32, h: u32) -> Expr {
    Expr::int(binomial(m as i64, h as i64))
}

/// `D^m E / Dx^m` written out term by term with the Leibniz rule:
/// `Σ_h C(m,h) [D^h(∂Φ/∂u) u_{t x^(m-h)} + D^h(∂Ψ/∂u) u_{x^(m-h+1)}
/// + D^h(∂χ/∂z) ∂^(m-h+1) z] − D^m Γ`.
pub fn extend_leibniz(law: &BalanceLaw, m: u32) -> Expr {
    let mut terms = Vec::new();
    let parts = [(&law.phi, true), (&law.psi, false), (&law.chi, false)];
    for (e, in_time) in parts {
        for z in e.jets() {
            let d = e.partial(&z);
            for h in 0..=m {
                let jet = if in_time {
                    z.dt().dx_n(m - h)
                } else {
                    z.dx_n(m - h + 1)
                };
                terms.push(&(&binom(m, h) * &d.total_x_n(h)) * &Expr::jet(jet));
            }
        }
    }
    &Expr::sum(terms) - &law.gamma.total_x_n(m)
}

/// The combination `Σ_j c_j E_j` used as the `idx`-th constraint.
pub fn constraint_residual(model: &ModelSpec, idx: usize) -> Expr {
    let c = &model.constraints[idx];
    Expr::sum(
        model
            .laws
            .iter()
            .zip(&c.coeffs)
            .filter(|(_, k)| !k.is_zero())
            .map(|(l, k)| k * &residual(l)),
    )
}

/// `D^m` of the `idx`-th constraint.
pub fn extend_constraint(model: &ModelSpec, idx: usize, m: u32) -> Expr {
    constraint_residual(model, idx).total_x_n(m)
}

/// Left-hand side of the entropy inequality.
///
/// Material form: `m (Ds/Dt + v Ds/Dx) + DJ/Dx`. Divergence form:
/// `Ds/Dt + D(v s + J)/Dx`, or `Ds/Dt + DJ/Dx` without a velocity.
pub fn entropy_production(model: &ModelSpec) -> Expr {
    let s = Expr::func(model.entropy.density.clone());
    let j = Expr::func(model.entropy.flux.clone());
    let v = model.velocity_var().map(Expr::jet);
    match model.entropy.form {
        EntropyForm::Material => {
            let mass = Expr::jet(model.entropy.mass.clone().unwrap_or_else(|| JetVar::field_var("rho")));
            let mut inner = s.total_t();
            if let Some(v) = &v {
                inner = &inner + &(v * &s.total_x());
            }
            &(&mass * &inner) + &j.total_x()
        }
        EntropyForm::Divergence => {
            let flux = match &v {
                Some(v) => &(v * &s) + &j,
                None => j,
            };
            &s.total_t() + &flux.total_x()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Context};

    fn ctx() -> Context {
        let mut c = Context::with_fields(["rho", "v", "eps"]);
        c.declare_func(
            "T",
            [JetVar::field_var("rho"), JetVar::field_var("eps"), JetVar::new("rho", 0, 1), JetVar::new("v", 0, 1)],
        );
        c
    }

    fn law(c: &Context, phi: &str, psi: &str, chi: &str, gamma: &str) -> BalanceLaw {
        BalanceLaw {
            name: "e".into(),
            phi: parse(phi, c).unwrap(),
            psi: parse(psi, c).unwrap(),
            chi: parse(chi, c).unwrap(),
            gamma: parse(gamma, c).unwrap(),
        }
    }

    #[test]
    fn mass_law() {
        let c = ctx();
        let mass = law(&c, "rho", "rho*v", "0", "0");
        assert_eq!(residual(&mass), parse("rho_t + rho_x*v + rho*v_x", &c).unwrap());
        assert_eq!(extend(&mass, 0), residual(&mass));
        assert_eq!(extend(&mass, 1), parse("rho_tx + rho_xx*v + 2*rho_x*v_x + rho*v_xx", &c).unwrap());
        let two = extend(&mass, 2);
        assert!(two.jets().contains(&JetVar::new("rho", 1, 2)));
        assert!(two.jets().contains(&JetVar::new("v", 0, 3)));
    }

    #[test]
    fn leibniz_form_agrees() {
        let c = ctx();
        let laws = [
            law(&c, "rho", "rho*v", "0", "0"),
            law(&c, "rho*v", "rho*v^2", "-T", "0"),
            law(&c, "rho*eps + rho*v^2/2", "rho*v*eps + rho*v^3/2", "-T*v", "rho*T"),
            law(&c, "0", "0", "0", "0"),
        ];
        for l in &laws {
            for m in 0..=3 {
                assert_eq!(extend(l, m), extend_leibniz(l, m), "m = {m}");
            }
        }
        assert!(residual(&laws[3]).is_zero());
    }

    #[test]
    fn momentum_law() {
        let c = ctx();
        let mom = law(&c, "rho*v", "rho*v^2", "-T", "0");
        let want = "rho_t*v + rho*v_t + rho_x*v^2 + 2*rho*v*v_x \
                    - T[rho]*rho_x - T[eps]*eps_x - T[rho_x]*rho_xx - T[v_x]*v_xx";
        assert_eq!(residual(&mom), parse(want, &c).unwrap());
    }

    #[test]
    fn entropy_forms() {
        let text = "[fields]\nnames = rho\n[state]\norder = 0\nvars = rho\n[entropy]\ndensity = s(rho)\nflux = J()\n[balance mass]\nphi = rho\n";
        let m = ModelSpec::parse(text).unwrap();
        let c = &m.context;
        assert_eq!(entropy_production(&m), parse("s[rho]*rho_t", c).unwrap());
        let text = text.replace("names = rho", "names = rho, v\nvelocity = v").replace("J()", "J()\nform = material\nmass = rho");
        let m = ModelSpec::parse(&text).unwrap();
        let c = &m.context;
        assert_eq!(entropy_production(&m), parse("rho*s[rho]*rho_t + rho*v*s[rho]*rho_x", c).unwrap());
        let div = text.replace("form = material", "form = divergence");
        let m = ModelSpec::parse(&div).unwrap();
        let e = entropy_production(&m);
        assert_eq!(e.collect(&[JetVar::new("v", 0, 1)]).unwrap()[&vec![1]], parse("s", &m.context).unwrap());
    }
}
