//! Rendering of derivation and check reports as JSON, plain text and LaTeX.

use std::fmt::Write;

use serde_json::{json, Value};

use crate::checker::{EqualityReport, EqualityStatus, MaxEntropyReport, QuantityResult, ScenarioReport};
use crate::expr::{jet_latex, name_latex, to_latex, to_text, Context, Expr, JetVar};
use crate::liu::{FormEntry, LiuReport};

fn jets(v: &[JetVar]) -> Value {
    Value::Array(v.iter().map(|j| Value::String(j.to_string())).collect())
}

fn txt(e: &Expr, ctx: &Context) -> String {
    to_text(e, Some(ctx))
}

fn entry_json(e: &FormEntry, ctx: &Context) -> Value {
    json!({"monomial": e.monomial_text(), "expr": txt(&e.expr, ctx)})
}

pub fn derive_json(rep: &LiuReport) -> Value {
    let ctx = &rep.context;
    let rs = &rep.restrictions;
    let c = &rep.classification;
    let multipliers: Vec<Value> = rs
        .multipliers
        .iter()
        .map(|m| json!({"i": m.multiplier.law + 1, "k": m.multiplier.order, "expr": txt(&m.expr, ctx)}))
        .collect();
    let even: Vec<Value> = rs
        .even_forms
        .iter()
        .map(|f| {
            json!({
                "degree": f.degree,
                "entries": f.entries.iter().map(|e| entry_json(e, ctx)).collect::<Vec<_>>(),
                "minorConditions": f.minors.iter().map(|m| txt(&m.expr, ctx)).collect::<Vec<_>>(),
            })
        })
        .collect();
    let constraints: Vec<Value> = rep
        .constraints
        .iter()
        .map(|&(i, k)| json!({"name": rep.constraint_names[i], "i": i + 1, "k": k}))
        .collect();
    json!({
        "model": rep.model,
        "hash": rep.hash,
        "classification": {
            "state": jets(&c.state),
            "highest": jets(&c.highest),
            "higher": jets(&c.higher),
            "hatZ": jets(&c.hat_z),
        },
        "constraints": constraints,
        "degrees": {"zeta": rep.zeta_degree, "eta": rep.eta_degree},
        "multipliers": multipliers,
        "equalities": rs.equalities().iter().map(|e| txt(e, ctx)).collect::<Vec<_>>(),
        "zetaEqualities": rs.zeta_equalities.iter()
            .map(|z| json!({"jet": z.jet.to_string(), "expr": txt(&z.expr, ctx)}))
            .collect::<Vec<_>>(),
        "oddFormEqualities": rs.odd_equalities.iter().map(|e| entry_json(e, ctx)).collect::<Vec<_>>(),
        "evenForms": even,
        "residual": txt(&rs.residual, ctx),
        "sideConditions": rs.side_conditions.iter().map(|e| txt(e, ctx)).collect::<Vec<_>>(),
        "diagnostics": rep.diagnostics,
    })
}

fn list(v: &[JetVar]) -> String {
    v.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(", ")
}

pub fn derive_text(rep: &LiuReport) -> String {
    let ctx = &rep.context;
    let rs = &rep.restrictions;
    let c = &rep.classification;
    let mut o = String::new();
    let _ = writeln!(o, "model {} ({})", rep.model, rep.hash);
    let _ = writeln!(o, "\nclassification");
    let _ = writeln!(o, "  state      {}", list(&c.state));
    let _ = writeln!(o, "  highest    {}", list(&c.highest));
    let _ = writeln!(o, "  higher     {}", list(&c.higher));
    let _ = writeln!(o, "  hat Z      {}", list(&c.hat_z));
    let sel: Vec<String> = rep
        .constraints
        .iter()
        .map(|&(i, k)| if k == 0 { rep.constraint_names[i].clone() } else { format!("D^{k} {}", rep.constraint_names[i]) })
        .collect();
    let _ = writeln!(o, "\nconstraints ({}): {}", sel.len(), sel.join(", "));
    let _ = writeln!(o, "degree {} in the highest derivatives, {} in the higher", rep.zeta_degree, rep.eta_degree);
    let _ = writeln!(o, "\nmultipliers");
    for m in &rs.multipliers {
        let _ = writeln!(o, "  {} = {}", m.multiplier.symbol.name(), txt(&m.expr, ctx));
    }
    if !rs.zeta_equalities.is_empty() {
        let _ = writeln!(o, "\nhighest-derivative equalities");
        for z in &rs.zeta_equalities {
            let _ = writeln!(o, "  [{}] {} = 0", z.jet, txt(&z.expr, ctx));
        }
    }
    if !rs.odd_equalities.is_empty() {
        let _ = writeln!(o, "\nodd-degree equalities");
        for e in &rs.odd_equalities {
            let _ = writeln!(o, "  [{}] {} = 0", e.monomial_text(), txt(&e.expr, ctx));
        }
    }
    for f in &rs.even_forms {
        let _ = writeln!(o, "\nform of degree {} (nonnegative)", f.degree);
        for e in &f.entries {
            let _ = writeln!(o, "  [{}] {}", e.monomial_text(), txt(&e.expr, ctx));
        }
        for m in &f.minors {
            let vars: Vec<String> = m.indices.iter().map(|&i| f.vars[i].to_string()).collect();
            let _ = writeln!(o, "  minor ({}): {} >= 0", vars.join(", "), txt(&m.expr, ctx));
        }
    }
    let _ = writeln!(o, "\nresidual inequality\n  {} >= 0", txt(&rs.residual, ctx));
    if !rs.side_conditions.is_empty() {
        let _ = writeln!(o, "\nside conditions");
        for e in &rs.side_conditions {
            let _ = writeln!(o, "  {} != 0", txt(e, ctx));
        }
    }
    if !rep.diagnostics.is_empty() {
        let _ = writeln!(o, "\ndiagnostics");
        for d in &rep.diagnostics {
            let _ = writeln!(o, "  {d}");
        }
    }
    o
}

fn monomial_latex(e: &FormEntry) -> String {
    e.monomial
        .iter()
        .map(|(j, p)| if *p == 1 { jet_latex(j) } else { format!("{}^{{{p}}}", jet_latex(j)) })
        .collect::<Vec<_>>()
        .join(" ")
}

/// A LaTeX fragment, one `align*` block per group of conditions.
pub fn derive_latex(rep: &LiuReport) -> String {
    let ctx = &rep.context;
    let rs = &rep.restrictions;
    let tex = |e: &Expr| to_latex(e, Some(ctx));
    let mut o = String::new();
    let _ = writeln!(o, "% model {} ({})", rep.model, rep.hash);
    let block = |o: &mut String, title: &str, lines: Vec<String>| {
        if lines.is_empty() {
            return;
        }
        let _ = writeln!(o, "\n\\paragraph{{{title}}}\n\\begin{{align*}}");
        let n = lines.len();
        for (i, l) in lines.into_iter().enumerate() {
            let _ = writeln!(o, "  {l}{}", if i + 1 < n { " \\\\" } else { "" });
        }
        let _ = writeln!(o, "\\end{{align*}}");
    };
    block(
        &mut o,
        "Multipliers",
        rs.multipliers
            .iter()
            .map(|m| format!("{} &= {}", name_latex(m.multiplier.symbol.name()), tex(&m.expr)))
            .collect(),
    );
    block(
        &mut o,
        "Highest-derivative equalities",
        rs.zeta_equalities.iter().map(|z| format!("{} &= 0", tex(&z.expr))).collect(),
    );
    block(
        &mut o,
        "Odd-degree equalities",
        rs.odd_equalities
            .iter()
            .map(|e| format!("{} &= 0 && [{}]", tex(&e.expr), monomial_latex(e)))
            .collect(),
    );
    for f in &rs.even_forms {
        let mut lines: Vec<String> = f
            .entries
            .iter()
            .map(|e| format!("[{}] &\\colon {}", monomial_latex(e), tex(&e.expr)))
            .collect();
        lines.extend(f.minors.iter().map(|m| format!("{} &\\ge 0", tex(&m.expr))));
        block(&mut o, &format!("Form of degree {}", f.degree), lines);
    }
    block(&mut o, "Residual inequality", vec![format!("{} &\\ge 0", tex(&rs.residual))]);
    block(
        &mut o,
        "Side conditions",
        rs.side_conditions.iter().map(|e| format!("{} &\\ne 0", tex(e))).collect(),
    );
    o
}

/// Everything computed by `check`.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub model: String,
    pub hash: String,
    pub solution: String,
    pub equalities: EqualityReport,
    pub max_entropy: MaxEntropyReport,
    pub scenarios: Vec<ScenarioReport>,
    pub context: Context,
}

impl CheckOutcome {
    pub fn equalities_pass(&self) -> bool {
        self.equalities.all_pass()
    }
}

fn status_json(s: &EqualityStatus, ctx: &Context) -> Value {
    match s {
        EqualityStatus::Satisfied => json!({"status": "satisfied"}),
        EqualityStatus::Conditional(names) => json!({"status": "conditional", "conditions": names}),
        EqualityStatus::Failed(e) => json!({"status": "failed", "residue": txt(e, ctx)}),
    }
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn quantity_json(q: &QuantityResult) -> Value {
    json!({
        "name": q.name,
        "relation": q.relation.as_str(),
        "min": num(q.min),
        "max": num(q.max),
        "failures": q.failures,
        "pass": q.pass,
        "firstFailure": q.first_failure.as_ref().map(|p| {
            p.iter().map(|(j, v)| (j.to_string(), num(*v))).collect::<serde_json::Map<_, _>>()
        }),
    })
}

pub fn check_json(c: &CheckOutcome) -> Value {
    let ctx = &c.context;
    let eq = &c.equalities;
    json!({
        "model": c.model,
        "hash": c.hash,
        "solution": c.solution,
        "equalities": eq.results.iter().map(|r| {
            let mut v = status_json(&r.status, ctx);
            v["source"] = Value::String(r.source.clone());
            v
        }).collect::<Vec<_>>(),
        "equalitiesPass": eq.all_pass(),
        "residual": txt(&eq.residual, ctx),
        "expectedResidual": eq.expected_residual.as_ref().map(|e| txt(e, ctx)),
        "residualMatches": eq.residual_matches,
        "evenForms": eq.forms.iter().map(|f| json!({
            "degree": f.degree,
            "expr": txt(&f.expr, ctx),
            "minorConditions": f.minors.iter().map(|(_, m)| txt(m, ctx)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "maxEntropy": {
            "status": c.max_entropy.status.as_str(),
            "detail": c.max_entropy.detail,
            "form": c.max_entropy.form.iter().map(|(m, e)| json!({"monomial": m, "expr": txt(e, ctx)})).collect::<Vec<_>>(),
        },
        "scenarios": c.scenarios.iter().map(|s| json!({
            "name": s.name,
            "expectViolation": s.expect_violation,
            "points": s.points,
            "seed": s.seed,
            "tol": s.tol,
            "redraws": s.redraws,
            "singular": s.singular,
            "conditions": s.conditions.iter().map(quantity_json).collect::<Vec<_>>(),
            "inequalities": s.quantities.iter().map(quantity_json).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

fn quantity_line(o: &mut String, q: &QuantityResult) {
    let _ = writeln!(
        o,
        "    {:<5} {} {} 0: min {}, max {}, {} failing",
        if q.pass { "ok" } else { "FAIL" },
        q.name,
        q.relation.as_str(),
        q.min,
        q.max,
        q.failures
    );
    if let Some(p) = &q.first_failure {
        let at: Vec<String> = p.iter().map(|(j, v)| format!("{j} = {v}")).collect();
        let _ = writeln!(o, "          first at {}", at.join(", "));
    }
}

pub fn check_text(c: &CheckOutcome) -> String {
    let ctx = &c.context;
    let eq = &c.equalities;
    let mut o = String::new();
    let _ = writeln!(o, "model {} ({}), solution {}", c.model, c.hash, c.solution);
    let _ = writeln!(o, "\nequalities");
    for r in &eq.results {
        match &r.status {
            EqualityStatus::Satisfied => {
                let _ = writeln!(o, "  ok    {}", r.source);
            }
            EqualityStatus::Conditional(names) => {
                let _ = writeln!(o, "  ok    {} (using {})", r.source, names.join(", "));
            }
            EqualityStatus::Failed(e) => {
                let _ = writeln!(o, "  FAIL  {}: {} != 0", r.source, txt(e, ctx));
            }
        }
    }
    let _ = writeln!(o, "\nresidual inequality\n  {} >= 0", txt(&eq.residual, ctx));
    match eq.residual_matches {
        Some(true) => {
            let _ = writeln!(o, "  matches the expected residual");
        }
        Some(false) => {
            let _ = writeln!(o, "  differs from the expected residual");
        }
        None => {}
    }
    for f in &eq.forms {
        if f.expr.is_zero() {
            let _ = writeln!(o, "\nform of degree {} vanishes", f.degree);
        } else {
            let _ = writeln!(o, "\nform of degree {}\n  {} >= 0", f.degree, txt(&f.expr, ctx));
        }
    }
    let _ = writeln!(
        o,
        "\nmaximum entropy at equilibrium: {} ({})",
        c.max_entropy.status.as_str(),
        c.max_entropy.detail
    );
    for s in &c.scenarios {
        let _ = writeln!(
            o,
            "\nscenario {}{}: {} points, seed {}, tol {:e}, {} redrawn, {} singular",
            s.name,
            if s.expect_violation { " (expected to violate)" } else { "" },
            s.points,
            s.seed,
            s.tol,
            s.redraws,
            s.singular
        );
        let _ = writeln!(o, "  conditions");
        for q in &s.conditions {
            quantity_line(&mut o, q);
        }
        let _ = writeln!(o, "  inequalities");
        for q in &s.quantities {
            quantity_line(&mut o, q);
        }
    }
    o
}

pub fn check_latex(c: &CheckOutcome) -> String {
    let ctx = &c.context;
    let eq = &c.equalities;
    let mut o = String::new();
    let _ = writeln!(o, "% model {} ({}), solution {}", c.model, c.hash, c.solution);
    let _ = writeln!(o, "\\begin{{align*}}\n  {} &\\ge 0\n\\end{{align*}}", to_latex(&eq.residual, Some(ctx)));
    for r in &eq.results {
        if let EqualityStatus::Failed(e) = &r.status {
            let _ = writeln!(o, "% failed: {}\n\\[ {} \\ne 0 \\]", r.source, to_latex(e, Some(ctx)));
        }
    }
    o
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::liu::{derive, LiuOptions};
    use crate::models::{GRADE2, KORTEWEG};

    #[test]
    fn json_schema_and_reparse() {
        let model = GRADE2.model().unwrap();
        let rep = derive(&model, &LiuOptions::default()).unwrap();
        let v = derive_json(&rep);
        for key in ["model", "hash", "classification", "multipliers", "equalities", "evenForms", "residual", "sideConditions"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["classification"]["highest"].as_array().unwrap().len(), 12);
        assert_eq!(v["classification"]["hatZ"].as_array().unwrap().len(), 4);
        let ms = v["multipliers"].as_array().unwrap();
        assert_eq!(ms.len(), 8);
        for m in ms {
            let e = parse(m["expr"].as_str().unwrap(), &rep.context).unwrap();
            let got = rep.multiplier(m["i"].as_u64().unwrap() as usize - 1, m["k"].as_u64().unwrap() as u32).unwrap();
            assert_eq!(&e, got);
        }
        let res = parse(v["residual"].as_str().unwrap(), &rep.context).unwrap();
        assert_eq!(res, rep.restrictions.residual);
    }

    #[test]
    fn text_and_latex_render() {
        let model = KORTEWEG.model().unwrap();
        let rep = derive(&model, &LiuOptions::default()).unwrap();
        let t = derive_text(&rep);
        assert!(t.contains("D^2 mass"));
        assert!(t.contains("Lambda1k2 = "));
        let l = derive_latex(&rep);
        assert!(l.contains("\\begin{align*}"));
        assert_eq!(l.matches("\\begin{align*}").count(), l.matches("\\end{align*}").count());
        assert_eq!(derive_json(&rep), derive_json(&derive(&model, &LiuOptions::default()).unwrap()));
    }
}
