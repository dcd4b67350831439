//! Text and LaTeX renderings of normal forms.

use num_traits::{One, Signed};

use super::{Atom, Coeff, Context, Expr, FuncSym, JetVar, Monomial, Poly};

/// Renders expressions against an optional declaration context.
///
/// A function symbol is written in short form (`s[rho_x]`) when the context
/// declares it with the same dependencies, otherwise in full form
/// (`s(rho, rho_x)[rho_x]`) so the output stays re-parsable.
pub struct Printer<'c> {
    ctx: Option<&'c Context>,
}

impl<'c> Printer<'c> {
    pub fn new(ctx: Option<&'c Context>) -> Self {
        Printer { ctx }
    }

    pub fn text(&self, e: &Expr) -> String {
        if e.denom().is_one() {
            return self.poly_text(e.numer());
        }
        let num = self.poly_text(e.numer());
        let num = if e.numer().len() > 1 { format!("({num})") } else { num };
        let den_single = e.denom().len() == 1 && {
            let (m, c) = &e.denom().terms()[0];
            c.is_one() && m.factors().len() == 1
        };
        let den = self.poly_text(e.denom());
        if den_single {
            format!("{num}/{den}")
        } else {
            format!("{num}/({den})")
        }
    }

    pub fn poly_text(&self, p: &Poly) -> String {
        if p.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in p.terms().iter().rev().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let c = c.abs();
            if m.is_one() {
                out.push_str(&coeff_text(&c));
                continue;
            }
            if !c.is_one() {
                out.push_str(&coeff_text(&c));
                out.push('*');
            }
            out.push_str(&self.monomial_text(m));
        }
        out
    }

    pub fn monomial_text(&self, m: &Monomial) -> String {
        if m.is_one() {
            return "1".into();
        }
        let parts: Vec<String> = m
            .factors()
            .iter()
            .map(|(a, e)| {
                let a = self.atom_text(a);
                if *e == 1 {
                    a
                } else {
                    format!("{a}^{e}")
                }
            })
            .collect();
        parts.join("*")
    }

    pub fn atom_text(&self, a: &Atom) -> String {
        match a {
            Atom::Jet(j) => j.to_string(),
            Atom::Func(f) => self.func_text(f),
        }
    }

    pub fn func_text(&self, f: &FuncSym) -> String {
        let short = self
            .ctx
            .and_then(|c| c.func(f.name()))
            .is_some_and(|d| d.deps() == f.deps());
        let mut s = f.name().to_string();
        if !short {
            s.push('(');
            s.push_str(&join_jets(f.deps()));
            s.push(')');
        }
        if !f.is_base() {
            s.push('[');
            s.push_str(&join_jets(&f.derivative_list()));
            s.push(']');
        }
        s
    }

    pub fn latex(&self, e: &Expr) -> String {
        if e.denom().is_one() {
            return self.poly_latex(e.numer());
        }
        let (num, den) = (e.numer(), e.denom());
        if num.len() == 1 && num.terms()[0].1.is_negative() {
            return format!("-\\frac{{{}}}{{{}}}", self.poly_latex(&num.neg()), self.poly_latex(den));
        }
        format!("\\frac{{{}}}{{{}}}", self.poly_latex(num), self.poly_latex(den))
    }

    pub fn poly_latex(&self, p: &Poly) -> String {
        if p.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in p.terms().iter().rev().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let c = c.abs();
            if m.is_one() {
                out.push_str(&coeff_latex(&c));
                continue;
            }
            if !c.is_one() {
                out.push_str(&coeff_latex(&c));
                out.push_str("\\,");
            }
            let parts: Vec<String> = m
                .factors()
                .iter()
                .map(|(a, e)| {
                    let base = atom_latex(a);
                    if *e == 1 {
                        base
                    } else if matches!(a, Atom::Func(f) if !f.is_base()) {
                        format!("\\left({base}\\right)^{{{e}}}")
                    } else {
                        format!("{base}^{{{e}}}")
                    }
                })
                .collect();
            out.push_str(&parts.join("\\,"));
        }
        out
    }
}

fn join_jets(js: &[JetVar]) -> String {
    js.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(", ")
}

fn coeff_text(c: &Coeff) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn coeff_latex(c: &Coeff) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", c.numer(), c.denom())
    }
}

const GREEK: &[(&str, &str)] = &[
    ("alpha", "\\alpha"),
    ("beta", "\\beta"),
    ("gamma", "\\gamma"),
    ("delta", "\\delta"),
    ("eps", "\\varepsilon"),
    ("epsilon", "\\varepsilon"),
    ("zeta", "\\zeta"),
    ("eta", "\\eta"),
    ("theta", "\\theta"),
    ("kappa", "\\kappa"),
    ("lambda", "\\lambda"),
    ("mu", "\\mu"),
    ("nu", "\\nu"),
    ("xi", "\\xi"),
    ("pi", "\\pi"),
    ("rho", "\\rho"),
    ("sigma", "\\sigma"),
    ("tau", "\\tau"),
    ("phi", "\\phi"),
    ("chi", "\\chi"),
    ("psi", "\\psi"),
    ("omega", "\\omega"),
    ("Gamma", "\\Gamma"),
    ("Lambda", "\\Lambda"),
    ("Phi", "\\Phi"),
    ("Psi", "\\Psi"),
    ("Js", "J_s"),
];

/// LaTeX for an identifier: Greek names become commands and a trailing
/// number becomes a subscript (`s1` is `s_{1}`, `tau1` is `\tau_{1}`).
pub fn name_latex(name: &str) -> String {
    if let Some(rest) = name.strip_prefix("Lambda") {
        if let Some((i, k)) = rest.split_once('k') {
            if !i.is_empty() && !k.is_empty() && i.bytes().all(|b| b.is_ascii_digit()) && k.bytes().all(|b| b.is_ascii_digit()) {
                return format!("\\Lambda^{{({k})}}_{{{i}}}");
            }
        }
    }
    let split = name.trim_end_matches(|c: char| c.is_ascii_digit()).len();
    let (stem, digits) = name.split_at(split);
    let stem = GREEK
        .iter()
        .find(|(n, _)| *n == stem)
        .map(|(_, l)| l.to_string())
        .unwrap_or_else(|| {
            if stem.len() > 1 {
                format!("\\mathrm{{{stem}}}")
            } else {
                stem.to_string()
            }
        });
    if digits.is_empty() || stem.is_empty() {
        if stem.is_empty() {
            return digits.to_string();
        }
        stem
    } else {
        format!("{stem}_{{{digits}}}")
    }
}

pub fn jet_latex(j: &JetVar) -> String {
    let base = name_latex(j.field());
    if j.is_field() {
        return base;
    }
    let tail = &j.suffix()[1..];
    format!("{base}_{{,{tail}}}")
}

fn atom_latex(a: &Atom) -> String {
    match a {
        Atom::Jet(j) => jet_latex(j),
        Atom::Func(f) => func_latex(f),
    }
}

pub fn func_latex(f: &FuncSym) -> String {
    let name = name_latex(f.name());
    if f.is_base() {
        return name;
    }
    let n = f.total_order();
    let top = if n == 1 {
        format!("\\partial {name}")
    } else {
        format!("\\partial^{{{n}}} {name}")
    };
    let mut bottom = Vec::new();
    for (d, &o) in f.deps().iter().zip(f.orders()) {
        match o {
            0 => {}
            1 => bottom.push(format!("\\partial {}", jet_latex(d))),
            _ => bottom.push(format!("\\partial {}^{{{o}}}", jet_latex(d))),
        }
    }
    format!("\\frac{{{top}}}{{{}}}", bottom.join(" "))
}

pub fn to_text(e: &Expr, ctx: Option<&Context>) -> String {
    Printer::new(ctx).text(e)
}

pub fn to_latex(e: &Expr, ctx: Option<&Context>) -> String {
    Printer::new(ctx).latex(e)
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn ctx() -> Context {
        let mut c = Context::with_fields(["rho", "v", "eps"]);
        c.declare_func("s", [JetVar::field_var("rho"), JetVar::new("rho", 0, 1)]);
        c
    }

    #[test]
    fn text_round_trips() {
        let c = ctx();
        for src in [
            "rho*v - 3/4*eps^2",
            "s[rho_x, rho_x]*rho_x/(rho + 1)",
            "-rho/eps^2",
            "(rho - v)/(rho*eps)",
            "q(rho, eps)[eps] + 2",
        ] {
            let e = parse(src, &c).unwrap();
            let t = to_text(&e, Some(&c));
            assert_eq!(parse(&t, &c).unwrap(), e, "{src} printed as {t}");
            let bare = Context::with_fields(["rho", "v", "eps"]);
            let t = to_text(&e, None);
            assert_eq!(parse(&t, &bare).unwrap(), e, "{src} printed as {t}");
        }
    }

    #[test]
    fn short_and_full_forms() {
        let c = ctx();
        let e = parse("s[rho_x]", &c).unwrap();
        assert_eq!(to_text(&e, Some(&c)), "s[rho_x]");
        assert_eq!(to_text(&e, None), "s(rho, rho_x)[rho_x]");
    }

    #[test]
    fn latex_notation() {
        let c = ctx();
        let e = parse("s[rho_x]*rho_xx", &c).unwrap();
        assert_eq!(to_latex(&e, Some(&c)), "\\rho_{,xx}\\,\\frac{\\partial s}{\\partial \\rho_{,x}}");
        assert_eq!(name_latex("Lambda2k1"), "\\Lambda^{(1)}_{2}");
        assert_eq!(name_latex("s0"), "s_{0}");
        assert_eq!(name_latex("tau1"), "\\tau_{1}");
        assert_eq!(jet_latex(&JetVar::new("eps", 1, 1)), "\\varepsilon_{,tx}");
    }
}
