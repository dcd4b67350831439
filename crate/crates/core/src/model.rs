//! Model specifications: fields, state space, balance laws, entropy pair.

use std::collections::BTreeSet;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::expr::{parse, parse_jet, parse_jet_list, to_text, Context, Expr, FuncSym, JetVar, ParseError};
use crate::jet::StateSpace;
use crate::matrix::determinant;
use crate::modelfile::{read_sections, split_list, Entry, FileError, Section};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("{0}")]
    Parse(FileError),
    #[error("{0}")]
    Validation(String),
}

impl From<FileError> for ModelError {
    fn from(e: FileError) -> Self {
        ModelError::Parse(e)
    }
}

fn invalid(msg: impl Into<String>) -> ModelError {
    ModelError::Validation(msg.into())
}

/// `D Φ/Dt + D(Ψ + χ)/Dx = Γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct BalanceLaw {
    pub name: String,
    pub phi: Expr,
    pub psi: Expr,
    pub chi: Expr,
    pub gamma: Expr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntropyForm {
    /// `m (Ds/Dt + v Ds/Dx) + DJ/Dx`, with `m` the declared mass field.
    Material,
    /// `Ds/Dt + D(v s + J)/Dx`.
    Divergence,
}

impl EntropyForm {
    pub fn as_str(self) -> &'static str {
        match self {
            EntropyForm::Material => "material",
            EntropyForm::Divergence => "divergence",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropySpec {
    pub density: FuncSym,
    pub flux: FuncSym,
    pub form: EntropyForm,
    pub mass: Option<JetVar>,
}

/// A constraint used in place of a law: `Σ_j coeffs[j] E_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub coeffs: Vec<Expr>,
}

#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub name: String,
    pub fields: Vec<String>,
    pub velocity: Option<String>,
    pub state: StateSpace,
    pub unknowns: Vec<FuncSym>,
    pub entropy: EntropySpec,
    pub laws: Vec<BalanceLaw>,
    pub constraints: Vec<Constraint>,
    pub context: Context,
}

fn parse_at(entry: &Entry, ctx: &Context) -> Result<Expr, ModelError> {
    parse(&entry.value, ctx).map_err(|e| ModelError::Parse(FileError::from_expr(&e, entry)))
}

fn expr_err(e: ParseError, entry: &Entry) -> ModelError {
    ModelError::Parse(FileError::from_expr(&e, entry))
}

fn is_ident(s: &str) -> bool {
    let mut c = s.chars();
    matches!(c.next(), Some(f) if f.is_ascii_alphabetic()) && c.all(|ch| ch.is_ascii_alphanumeric())
}

/// Parses `name` or `name(dep, ...)`; a bare name depends on `default`.
pub(crate) fn parse_decl(text: &str, entry: &Entry, ctx: &Context, default: &[JetVar]) -> Result<FuncSym, ModelError> {
    let text = text.trim();
    let (name, deps) = match text.find('(') {
        None => (text, default.to_vec()),
        Some(p) => {
            let Some(body) = text[p + 1..].trim_end().strip_suffix(')') else {
                return Err(ModelError::Parse(FileError::at(entry.line, entry.col, format!("expected `)` in `{text}`"))));
            };
            let deps = parse_jet_list(body, ctx).map_err(|e| expr_err(e, entry))?;
            (text[..p].trim(), deps)
        }
    };
    if !is_ident(name) {
        return Err(ModelError::Parse(FileError::at(entry.line, entry.col, format!("invalid symbol name `{name}`"))));
    }
    Ok(FuncSym::new(name, deps))
}

fn known_keys(sec: &Section, keys: &[&str]) -> Result<(), ModelError> {
    for e in &sec.entries {
        if !keys.contains(&e.key.as_str()) {
            return Err(ModelError::Parse(FileError::at(
                e.line,
                1,
                format!("unknown key `{}` in section [{}]", e.key, sec.name),
            )));
        }
    }
    Ok(())
}

pub fn decl_text(f: &FuncSym) -> String {
    let deps: Vec<String> = f.deps().iter().map(|d| d.to_string()).collect();
    format!("{}({})", f.name(), deps.join(", "))
}

impl ModelSpec {
    /// Parses and validates a model file.
    pub fn parse(text: &str) -> Result<ModelSpec, ModelError> {
        let sections = read_sections(text, &["unknowns"])?;
        let mut name = String::new();
        let mut fields_sec = None;
        let mut state_sec = None;
        let mut unknowns_sec = None;
        let mut entropy_sec = None;
        let mut constraints_sec = None;
        let mut balances = Vec::new();
        for s in &sections {
            match s.kind() {
                "" => {
                    known_keys(s, &["name"])?;
                    if let Some(e) = s.get("name") {
                        name = e.value.clone();
                    }
                }
                "fields" => fields_sec = Some(s),
                "state" => state_sec = Some(s),
                "unknowns" => unknowns_sec = Some(s),
                "entropy" => entropy_sec = Some(s),
                "constraints" => constraints_sec = Some(s),
                "balance" => balances.push(s),
                other => {
                    return Err(ModelError::Parse(FileError::at(s.line, 1, format!("unknown section [{other}]"))));
                }
            }
        }

        let fields_sec = fields_sec.ok_or_else(|| invalid("no [fields] section"))?;
        known_keys(fields_sec, &["names", "velocity"])?;
        let fields: Vec<String> = fields_sec
            .get("names")
            .map(|e| split_list(&e.value))
            .unwrap_or_default();
        if fields.is_empty() {
            return Err(invalid("no fields declared"));
        }
        let mut seen = BTreeSet::new();
        for f in &fields {
            if !is_ident(f) {
                let e = fields_sec.get("names").unwrap();
                return Err(ModelError::Parse(FileError::at(e.line, e.col, format!("invalid field name `{f}`"))));
            }
            if !seen.insert(f.clone()) {
                return Err(invalid(format!("field `{f}` declared twice")));
            }
        }
        let velocity = fields_sec.get("velocity").map(|e| e.value.clone());
        if let Some(v) = &velocity {
            if !fields.contains(v) {
                return Err(invalid(format!("velocity `{v}` is not a declared field")));
            }
        }
        let mut ctx = Context::with_fields(&fields);

        let state_sec = state_sec.ok_or_else(|| invalid("no [state] section"))?;
        known_keys(state_sec, &["order", "vars"])?;
        let order_e = state_sec.get("order").ok_or_else(|| invalid("state order missing"))?;
        let order: u32 = order_e.value.parse().map_err(|_| {
            ModelError::Parse(FileError::at(order_e.line, order_e.col, "state order must be a nonnegative integer"))
        })?;
        let vars_e = state_sec.get("vars").ok_or_else(|| invalid("state variables missing"))?;
        let mut vars = Vec::new();
        for v in split_list(&vars_e.value) {
            vars.push(parse_jet(&v, &ctx).map_err(|e| expr_err(e, vars_e))?);
        }
        let state = StateSpace::new(order, vars).map_err(|e| invalid(e.to_string()))?;
        let z: Vec<JetVar> = state.members().iter().cloned().collect();

        let mut unknowns = Vec::new();
        if let Some(sec) = unknowns_sec {
            for e in &sec.entries {
                for item in split_list(&e.value) {
                    let f = parse_decl(&item, e, &ctx, &z)?;
                    if ctx.is_field(f.name()) || unknowns.iter().any(|u: &FuncSym| u.name() == f.name()) {
                        return Err(invalid(format!("symbol `{}` declared twice", f.name())));
                    }
                    unknowns.push(f);
                }
            }
        }
        for u in &unknowns {
            ctx.insert_func(u.clone());
        }

        let entropy_sec = entropy_sec.ok_or_else(|| invalid("no [entropy] section"))?;
        known_keys(entropy_sec, &["density", "flux", "form", "mass"])?;
        let mut entropy_sym = |key: &str, default: &str| -> Result<FuncSym, ModelError> {
            match entropy_sec.get(key) {
                None => {
                    if let Some(f) = ctx.func(default) {
                        return Ok(f.clone());
                    }
                    let f = FuncSym::new(default, z.clone());
                    ctx.insert_func(f.clone());
                    Ok(f)
                }
                Some(e) => {
                    if !e.value.contains('(') {
                        if let Some(f) = ctx.func(e.value.trim()) {
                            return Ok(f.clone());
                        }
                    }
                    let f = parse_decl(&e.value, e, &ctx, &z)?;
                    if ctx.is_field(f.name()) {
                        return Err(invalid(format!("`{}` is a field", f.name())));
                    }
                    ctx.insert_func(f.clone());
                    Ok(f)
                }
            }
        };
        let density = entropy_sym("density", "s")?;
        let flux = entropy_sym("flux", "Js")?;
        let form = match entropy_sec.get("form").map(|e| e.value.as_str()) {
            None | Some("divergence") => EntropyForm::Divergence,
            Some("material") => EntropyForm::Material,
            Some(other) => {
                let e = entropy_sec.get("form").unwrap();
                return Err(ModelError::Parse(FileError::at(
                    e.line,
                    e.col,
                    format!("entropy form must be `material` or `divergence`, found `{other}`"),
                )));
            }
        };
        let mass = match entropy_sec.get("mass") {
            None => None,
            Some(e) => {
                let j = parse_jet(&e.value, &ctx).map_err(|err| expr_err(err, e))?;
                if !j.is_field() {
                    return Err(invalid(format!("mass `{j}` must be a field")));
                }
                Some(j)
            }
        };

        let mut laws = Vec::new();
        for sec in &balances {
            known_keys(sec, &["phi", "psi", "chi", "gamma"])?;
            let lname = sec.label().to_string();
            if !is_ident(&lname) {
                return Err(ModelError::Parse(FileError::at(sec.line, 1, format!("invalid balance name `{lname}`"))));
            }
            if laws.iter().any(|l: &BalanceLaw| l.name == lname) {
                return Err(invalid(format!("balance `{lname}` declared twice")));
            }
            let get = |k: &str| -> Result<Expr, ModelError> {
                match sec.get(k) {
                    None => Ok(Expr::zero()),
                    Some(e) => parse_at(e, &ctx),
                }
            };
            laws.push(BalanceLaw {
                name: lname,
                phi: get("phi")?,
                psi: get("psi")?,
                chi: get("chi")?,
                gamma: get("gamma")?,
            });
        }

        let constraints = match constraints_sec {
            None => identity_constraints(&laws),
            Some(sec) => parse_constraints(sec, &laws, &ctx)?,
        };

        let model = ModelSpec {
            name: if name.is_empty() { "unnamed".into() } else { name },
            fields,
            velocity,
            state,
            unknowns,
            entropy: EntropySpec {
                density,
                flux,
                form,
                mass,
            },
            laws,
            constraints,
            context: ctx,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn field_vars(&self) -> Vec<JetVar> {
        self.fields.iter().map(|f| JetVar::field_var(f.as_str())).collect()
    }

    pub fn velocity_var(&self) -> Option<JetVar> {
        self.velocity.as_ref().map(|v| JetVar::field_var(v.as_str()))
    }

    pub fn state_vars(&self) -> Vec<JetVar> {
        self.state.ordered(&self.fields)
    }

    /// Checks the structural invariants of every component.
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.laws.is_empty() {
            return Err(invalid("no balance laws declared"));
        }
        for m in self.state.members() {
            if !self.fields.iter().any(|f| f == m.field()) {
                return Err(invalid(format!("state variable `{m}` refers to an undeclared field")));
            }
        }
        let in_z = |j: &JetVar| self.state.contains(j);
        let in_fields = |j: &JetVar| j.is_field() && self.fields.iter().any(|f| f == j.field());
        let check_deps = |f: &FuncSym, what: &str| -> Result<(), ModelError> {
            for d in f.deps() {
                if !in_z(d) {
                    return Err(invalid(format!("{what} `{}` depends on `{d}`, which is not a state variable", f.name())));
                }
            }
            Ok(())
        };
        for u in &self.unknowns {
            check_deps(u, "unknown")?;
        }
        check_deps(&self.entropy.density, "entropy density")?;
        check_deps(&self.entropy.flux, "entropy flux")?;
        if self.entropy.form == EntropyForm::Material {
            match &self.entropy.mass {
                None => return Err(invalid("material entropy form requires `mass`")),
                Some(m) if !in_fields(m) => return Err(invalid(format!("mass `{m}` is not a field"))),
                _ => {}
            }
        }
        for law in &self.laws {
            for (part, e) in [("phi", &law.phi), ("psi", &law.psi)] {
                for j in e.jets() {
                    if !in_fields(&j) {
                        return Err(invalid(format!(
                            "balance `{}`: {part} may depend on fields only, found `{j}`",
                            law.name
                        )));
                    }
                }
            }
            for (part, e) in [("chi", &law.chi), ("gamma", &law.gamma)] {
                for j in e.jets() {
                    if !in_fields(&j) && !in_z(&j) {
                        return Err(invalid(format!(
                            "balance `{}`: {part} may depend on fields and state variables only, found `{j}`",
                            law.name
                        )));
                    }
                }
            }
        }
        let n = self.laws.len();
        if self.constraints.len() != n {
            return Err(invalid(format!("{} constraints given for {n} balance laws", self.constraints.len())));
        }
        for c in &self.constraints {
            if c.coeffs.len() != n {
                return Err(invalid(format!("constraint `{}` has the wrong length", c.name)));
            }
            for e in &c.coeffs {
                for j in e.jets() {
                    if !in_fields(&j) {
                        return Err(invalid(format!(
                            "constraint `{}`: coefficients may depend on fields only, found `{j}`",
                            c.name
                        )));
                    }
                }
            }
        }
        let m: Vec<Vec<Expr>> = self.constraints.iter().map(|c| c.coeffs.clone()).collect();
        if determinant(&m).is_zero() {
            return Err(invalid("constraint combinations are not invertible"));
        }
        Ok(())
    }

    /// Canonical JSON description; the report hash is taken over its bytes.
    pub fn to_json(&self) -> Value {
        let ctx = Some(&self.context);
        let t = |e: &Expr| to_text(e, ctx);
        let laws: Vec<Value> = self
            .laws
            .iter()
            .map(|l| {
                json!({
                    "name": l.name,
                    "phi": t(&l.phi),
                    "psi": t(&l.psi),
                    "chi": t(&l.chi),
                    "gamma": t(&l.gamma),
                })
            })
            .collect();
        let constraints: Vec<Value> = self
            .constraints
            .iter()
            .map(|c| json!({"name": c.name, "expr": self.constraint_text(c)}))
            .collect();
        json!({
            "name": self.name,
            "fields": self.fields,
            "velocity": self.velocity,
            "state": {
                "order": self.state.order(),
                "vars": self.state_vars().iter().map(|j| j.to_string()).collect::<Vec<_>>(),
            },
            "unknowns": self.unknowns.iter().map(decl_text).collect::<Vec<_>>(),
            "entropy": {
                "density": decl_text(&self.entropy.density),
                "flux": decl_text(&self.entropy.flux),
                "form": self.entropy.form.as_str(),
                "mass": self.entropy.mass.as_ref().map(|m| m.to_string()),
            },
            "balances": laws,
            "constraints": constraints,
        })
    }

    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(&self.to_json()).expect("model JSON");
        let digest = Sha256::digest(&bytes);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn constraint_ctx(&self) -> Context {
        let mut c = self.context.clone();
        for l in &self.laws {
            c.declare_field(&l.name);
        }
        c
    }

    /// `Σ coeff * law` in the expression grammar, law names standing for the laws.
    pub fn constraint_text(&self, c: &Constraint) -> String {
        let ctx = self.constraint_ctx();
        let e = Expr::sum(
            self.laws
                .iter()
                .zip(&c.coeffs)
                .map(|(l, k)| k * &Expr::jet(JetVar::field_var(l.name.as_str()))),
        );
        to_text(&e, Some(&ctx))
    }

    pub fn is_identity_combination(&self) -> bool {
        self.constraints.iter().enumerate().all(|(i, c)| {
            c.coeffs
                .iter()
                .enumerate()
                .all(|(j, e)| if i == j { *e == Expr::one() } else { e.is_zero() })
        })
    }

    /// The model in the file format; parsing the output gives back this model.
    pub fn to_model_file(&self) -> String {
        let ctx = Some(&self.context);
        let mut s = String::new();
        s.push_str(&format!("name = {}\n\n[fields]\nnames = {}\n", self.name, self.fields.join(", ")));
        if let Some(v) = &self.velocity {
            s.push_str(&format!("velocity = {v}\n"));
        }
        let vars: Vec<String> = self.state_vars().iter().map(|j| j.to_string()).collect();
        s.push_str(&format!("\n[state]\norder = {}\nvars = {}\n", self.state.order(), vars.join(", ")));
        if !self.unknowns.is_empty() {
            s.push_str("\n[unknowns]\n");
            for u in &self.unknowns {
                s.push_str(&decl_text(u));
                s.push('\n');
            }
        }
        s.push_str(&format!(
            "\n[entropy]\ndensity = {}\nflux = {}\nform = {}\n",
            decl_text(&self.entropy.density),
            decl_text(&self.entropy.flux),
            self.entropy.form.as_str()
        ));
        if let Some(m) = &self.entropy.mass {
            s.push_str(&format!("mass = {m}\n"));
        }
        for l in &self.laws {
            s.push_str(&format!(
                "\n[balance {}]\nphi = {}\npsi = {}\nchi = {}\ngamma = {}\n",
                l.name,
                to_text(&l.phi, ctx),
                to_text(&l.psi, ctx),
                to_text(&l.chi, ctx),
                to_text(&l.gamma, ctx)
            ));
        }
        if !self.is_identity_combination() {
            s.push_str("\n[constraints]\n");
            for c in &self.constraints {
                s.push_str(&format!("{} = {}\n", c.name, self.constraint_text(c)));
            }
        }
        s
    }
}

fn identity_constraints(laws: &[BalanceLaw]) -> Vec<Constraint> {
    let n = laws.len();
    laws.iter()
        .enumerate()
        .map(|(i, l)| Constraint {
            name: l.name.clone(),
            coeffs: (0..n).map(|j| if i == j { Expr::one() } else { Expr::zero() }).collect(),
        })
        .collect()
}

fn parse_constraints(sec: &Section, laws: &[BalanceLaw], ctx: &Context) -> Result<Vec<Constraint>, ModelError> {
    let mut cctx = ctx.clone();
    for l in laws {
        if ctx.is_field(&l.name) || ctx.func(&l.name).is_some() {
            return Err(invalid(format!("balance name `{}` clashes with a declared symbol", l.name)));
        }
        cctx.declare_field(&l.name);
    }
    let vars: Vec<JetVar> = laws.iter().map(|l| JetVar::field_var(l.name.as_str())).collect();
    let mut out = Vec::new();
    for e in &sec.entries {
        let expr = parse_at(e, &cctx)?;
        let table = expr
            .collect(&vars)
            .map_err(|err| invalid(format!("constraint `{}`: {err}", e.key)))?;
        let mut coeffs = vec![Expr::zero(); laws.len()];
        for (mono, c) in table {
            let deg: u32 = mono.iter().sum();
            if deg != 1 {
                return Err(invalid(format!(
                    "constraint `{}` must be a linear combination of balance laws",
                    e.key
                )));
            }
            let i = mono.iter().position(|&p| p == 1).unwrap();
            coeffs[i] = c;
        }
        out.push(Constraint {
            name: e.key.clone(),
            coeffs,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
name = heat
[fields]
names = u
[state]
order = 1
vars = u, u_x
[unknowns]
q
[entropy]
density = s(u, u_x)
flux = J
form = divergence
[balance energy]
phi = u
chi = q
";

    #[test]
    fn parses_and_round_trips() {
        let m = ModelSpec::parse(SMALL).unwrap();
        assert_eq!(m.name, "heat");
        assert_eq!(m.laws.len(), 1);
        assert_eq!(m.entropy.density.deps().len(), 2);
        assert!(m.laws[0].psi.is_zero());
        let again = ModelSpec::parse(&m.to_model_file()).unwrap();
        assert_eq!(again.to_json(), m.to_json());
        assert_eq!(again.hash(), m.hash());
    }

    #[test]
    fn empty_model_is_a_validation_error() {
        assert!(matches!(ModelSpec::parse(""), Err(ModelError::Validation(_))));
    }

    #[test]
    fn rejects_bad_dependencies_and_identifiers() {
        let bad = SMALL.replace("phi = u", "phi = u_x");
        assert!(matches!(ModelSpec::parse(&bad), Err(ModelError::Validation(_))));
        let bad = SMALL.replace("chi = q", "chi = w");
        assert!(matches!(ModelSpec::parse(&bad), Err(ModelError::Parse(_))));
        let bad = SMALL.replace("density = s(u, u_x)", "density = s(u, u_xx)");
        assert!(ModelSpec::parse(&bad).is_err());
        let bad = SMALL.replace("chi = q", "chi = q +");
        match ModelSpec::parse(&bad) {
            Err(ModelError::Parse(e)) => assert_eq!(e.line, 15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn singular_constraints_are_rejected() {
        let bad = format!("{SMALL}[constraints]\nenergy = 0*energy\n");
        assert!(matches!(ModelSpec::parse(&bad), Err(ModelError::Validation(_))));
    }
}
