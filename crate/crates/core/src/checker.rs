//! Verification of candidate constitutive equations against a derived
//! restriction set: equalities symbolically, inequalities by sampling.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::expr::{parse, parse_func, to_text, Atom, Bindings, Context, Expr, FuncSym, JetVar, SubstError};
use crate::jet::sort_jets;
use crate::liu::{monomial_expr, quadratic_matrix, FormEntry, LiuReport, MAX_MINOR_ORDER};
use crate::matrix::principal_minors;
use crate::model::{parse_decl, ModelError, ModelSpec};
use crate::modelfile::{read_sections, Entry, FileError};

pub const DEFAULT_POINTS: usize = 1000;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_TOL: f64 = 1e-12;
const MAX_RESAMPLE: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Ne,
    Ge,
    Gt,
    Le,
    Lt,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Ne => "!=",
            Relation::Ge => ">=",
            Relation::Gt => ">",
            Relation::Le => "<=",
            Relation::Lt => "<",
        }
    }

    /// Whether `value = lhs - rhs` satisfies the relation up to `tol`.
    pub fn holds(self, value: f64, tol: f64) -> bool {
        match self {
            Relation::Eq => value.abs() <= tol,
            Relation::Ne => value.abs() > tol,
            Relation::Ge | Relation::Gt => value >= -tol,
            Relation::Le | Relation::Lt => value <= tol,
        }
    }
}

/// `name: lhs REL rhs [solve X]`.
#[derive(Clone, Debug)]
pub struct Condition {
    pub name: String,
    pub lhs: Expr,
    pub rel: Relation,
    pub rhs: Expr,
    /// Symbol eliminated by this equality during reduction.
    pub solve: Option<FuncSym>,
}

impl Condition {
    pub fn difference(&self) -> Expr {
        &self.lhs - &self.rhs
    }
}

/// Closed-form values for ansatz symbols and the sampling box.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    /// The scenario is meant to break some condition; conditions are
    /// reported instead of enforced.
    pub expect_violation: bool,
    pub bindings: Vec<(FuncSym, Expr)>,
}

#[derive(Clone, Debug)]
pub struct Sampling {
    pub points: usize,
    pub seed: u64,
    pub tol: f64,
    pub ranges: BTreeMap<JetVar, (f64, f64)>,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            points: DEFAULT_POINTS,
            seed: DEFAULT_SEED,
            tol: DEFAULT_TOL,
            ranges: BTreeMap::new(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CandidateSolution {
    pub name: String,
    pub ansatz: Vec<FuncSym>,
    pub bindings: Vec<(FuncSym, Expr)>,
    pub conditions: Vec<Condition>,
    pub expected_residual: Option<Expr>,
    pub scenarios: Vec<Scenario>,
    pub sampling: Sampling,
    pub context: Context,
}

fn file_err(e: &Entry, msg: impl Into<String>) -> ModelError {
    ModelError::Parse(FileError::at(e.line, e.col, msg))
}

fn expr_at(e: &Entry, text: &str, offset: usize, ctx: &Context) -> Result<Expr, ModelError> {
    parse(text, ctx).map_err(|err| {
        let mut f = FileError::from_expr(&err, e);
        if err.line == 1 {
            f.col += offset;
        }
        ModelError::Parse(f)
    })
}

fn func_at(e: &Entry, text: &str, ctx: &Context) -> Result<FuncSym, ModelError> {
    parse_func(text, ctx).map_err(|err| ModelError::Parse(FileError::from_expr(&err, e)))
}

fn split_relation(text: &str) -> Option<(usize, Relation, usize)> {
    let b = text.as_bytes();
    let mut depth = 0i32;
    for i in 0..b.len() {
        match b[i] {
            b'(' | b'[' => depth += 1,
            b')' | b']' => depth -= 1,
            _ if depth != 0 => {}
            b'>' | b'<' | b'!' | b'=' => {
                let two = b.get(i + 1) == Some(&b'=');
                let rel = match (b[i], two) {
                    (b'>', true) => Relation::Ge,
                    (b'>', false) => Relation::Gt,
                    (b'<', true) => Relation::Le,
                    (b'<', false) => Relation::Lt,
                    (b'!', true) => Relation::Ne,
                    (b'=', _) => Relation::Eq,
                    _ => return None,
                };
                let len = if two && b[i] != b'=' { 2 } else { 1 };
                return Some((i, rel, i + len));
            }
            _ => {}
        }
    }
    None
}

fn parse_condition(e: &Entry, ctx: &Context) -> Result<Condition, ModelError> {
    let text = e.value.as_str();
    let Some((name, body)) = text.split_once(':') else {
        return Err(file_err(e, "expected `name: lhs REL rhs`"));
    };
    let name = name.trim().to_string();
    let body_off = name.len() + 1;
    let (body, solve) = match body.rfind(" solve ") {
        Some(p) => (&body[..p], Some(body[p + 7..].trim())),
        None => (body, None),
    };
    let Some((at, rel, after)) = split_relation(body) else {
        return Err(file_err(e, format!("condition `{name}` has no relation")));
    };
    let lhs = expr_at(e, &body[..at], body_off, ctx)?;
    let rhs = expr_at(e, &body[after..], body_off + after, ctx)?;
    let solve = match solve {
        None => None,
        Some(s) => {
            if rel != Relation::Eq {
                return Err(file_err(e, format!("condition `{name}`: only equalities can be solved")));
            }
            Some(func_at(e, s, ctx)?)
        }
    };
    Ok(Condition {
        name,
        lhs,
        rel,
        rhs,
        solve,
    })
}

fn parse_range(e: &Entry) -> Result<(f64, f64), ModelError> {
    let parts: Vec<&str> = e.value.split(',').map(str::trim).collect();
    let bad = || file_err(e, "expected `low, high`");
    if parts.len() != 2 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn model_symbols(model: &ModelSpec) -> Vec<FuncSym> {
    let mut v = model.unknowns.clone();
    v.push(model.entropy.density.clone());
    v.push(model.entropy.flux.clone());
    v
}

impl CandidateSolution {
    pub fn parse(text: &str, model: &ModelSpec) -> Result<CandidateSolution, ModelError> {
        let sections = read_sections(text, &["ansatz", "conditions"])?;
        let mut ctx = model.context.clone();
        let mut sol = CandidateSolution {
            name: String::new(),
            ansatz: Vec::new(),
            bindings: Vec::new(),
            conditions: Vec::new(),
            expected_residual: None,
            scenarios: Vec::new(),
            sampling: Sampling::default(),
            context: Context::new(),
        };
        let z: Vec<JetVar> = model.state_vars();
        for s in &sections {
            if s.kind() == "ansatz" {
                for e in &s.entries {
                    for item in crate::modelfile::split_list(&e.value) {
                        let f = parse_decl(&item, e, &ctx, &z)?;
                        if ctx.is_field(f.name()) || ctx.func(f.name()).is_some() {
                            return Err(ModelError::Validation(format!("ansatz symbol `{}` is already declared", f.name())));
                        }
                        ctx.insert_func(f.clone());
                        sol.ansatz.push(f);
                    }
                }
            }
        }
        let symbols = model_symbols(model);
        for s in &sections {
            match s.kind() {
                "" => {
                    for e in &s.entries {
                        match e.key.as_str() {
                            "name" => sol.name = e.value.clone(),
                            other => return Err(file_err(e, format!("unknown key `{other}`"))),
                        }
                    }
                }
                "ansatz" => {}
                "bindings" => {
                    for e in &s.entries {
                        let Some(f) = symbols.iter().find(|f| f.name() == e.key) else {
                            return Err(file_err(e, format!("`{}` is not a constitutive symbol of the model", e.key)));
                        };
                        let value = expr_at(e, &e.value, 0, &ctx)?;
                        sol.bindings.push((f.clone(), value));
                    }
                }
                "conditions" => {
                    for e in &s.entries {
                        let c = parse_condition(e, &ctx)?;
                        if sol.conditions.iter().any(|o| o.name == c.name) {
                            return Err(file_err(e, format!("condition `{}` declared twice", c.name)));
                        }
                        sol.conditions.push(c);
                    }
                }
                "expect" => {
                    for e in &s.entries {
                        match e.key.as_str() {
                            "residual" => sol.expected_residual = Some(expr_at(e, &e.value, 0, &ctx)?),
                            other => return Err(file_err(e, format!("unknown key `{other}`"))),
                        }
                    }
                }
                "scenario" => {
                    let mut sc = Scenario {
                        name: s.label().to_string(),
                        expect_violation: false,
                        bindings: Vec::new(),
                    };
                    for e in &s.entries {
                        if e.key == "expect" {
                            sc.expect_violation = match e.value.as_str() {
                                "violation" => true,
                                "pass" => false,
                                _ => return Err(file_err(e, "expect must be `pass` or `violation`")),
                            };
                            continue;
                        }
                        let f = func_at(e, &e.key, &ctx)?;
                        if !sol.ansatz.iter().any(|a| a.same_function(&f)) {
                            return Err(file_err(e, format!("`{}` is not an ansatz symbol", e.key)));
                        }
                        sc.bindings.push((f, expr_at(e, &e.value, 0, &ctx)?));
                    }
                    sol.scenarios.push(sc);
                }
                "sampling" => {
                    for e in &s.entries {
                        match e.key.as_str() {
                            "points" => {
                                sol.sampling.points = e.value.parse().map_err(|_| file_err(e, "expected an integer"))?
                            }
                            "seed" => sol.sampling.seed = e.value.parse().map_err(|_| file_err(e, "expected an integer"))?,
                            "tol" => sol.sampling.tol = e.value.parse().map_err(|_| file_err(e, "expected a number"))?,
                            key => {
                                let j = crate::expr::parse_jet(key, &ctx)
                                    .map_err(|err| ModelError::Parse(FileError::at(e.line, 1, err.message)))?;
                                sol.sampling.ranges.insert(j, parse_range(e)?);
                            }
                        }
                    }
                }
                other => {
                    return Err(ModelError::Parse(FileError::at(s.line, 1, format!("unknown section [{other}]"))));
                }
            }
        }
        for f in &symbols {
            if !sol.bindings.iter().any(|(g, _)| g == f) {
                return Err(ModelError::Validation(format!("unbound symbol `{}`", f.name())));
            }
        }
        sol.bindings_checked()?;
        sol.context = ctx;
        Ok(sol)
    }

    fn bindings_checked(&self) -> Result<Bindings, ModelError> {
        let mut b = Bindings::new();
        for (f, e) in &self.bindings {
            b.bind_func(f.clone(), e.clone()).map_err(|err| ModelError::Validation(err.to_string()))?;
        }
        Ok(b)
    }

    pub fn binding_set(&self) -> Bindings {
        self.bindings_checked().expect("validated bindings")
    }

    pub fn binding(&self, name: &str) -> Option<&Expr> {
        self.bindings.iter().find(|(f, _)| f.name() == name).map(|(_, e)| e)
    }

    /// Bindings for the solved conditions, each eliminating its symbol.
    pub fn condition_bindings(&self) -> Result<Vec<(String, Bindings)>, CheckError> {
        let mut out = Vec::new();
        let mut acc = Bindings::new();
        for c in &self.conditions {
            let Some(x) = &c.solve else { continue };
            let diff = c.difference();
            let table = diff
                .collect_atoms(&[Atom::Func(x.clone())])
                .map_err(|e| CheckError::Condition(c.name.clone(), e.to_string()))?;
            if table.keys().any(|k| k[0] > 1) || !table.contains_key(&vec![1]) {
                return Err(CheckError::Condition(c.name.clone(), "not linear in the solved symbol".into()));
            }
            let a = &table[&vec![1]];
            let b = table.get(&vec![0]).cloned().unwrap_or_else(Expr::zero);
            let value = -(&b / a);
            acc.bind_func(x.clone(), value)
                .map_err(|e| CheckError::Condition(c.name.clone(), e.to_string()))?;
            out.push((c.name.clone(), acc.clone()));
        }
        Ok(out)
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum CheckError {
    #[error("condition `{0}`: {1}")]
    Condition(String, String),
    #[error("substitution failed: {0}")]
    Subst(#[from] SubstError),
    #[error("scenario `{0}`: {1}")]
    Scenario(String, String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum EqualityStatus {
    Satisfied,
    /// Zero after eliminating the symbols of the named conditions.
    Conditional(Vec<String>),
    Failed(Expr),
}

#[derive(Clone, Debug)]
pub struct EqualityResult {
    /// What the equality is: the coefficient of a jet or monomial.
    pub source: String,
    pub status: EqualityStatus,
}

#[derive(Clone, Debug)]
pub struct FormResult {
    pub degree: u32,
    pub expr: Expr,
    pub minors: Vec<(Vec<usize>, Expr)>,
    pub vars: Vec<JetVar>,
}

#[derive(Clone, Debug)]
pub struct EqualityReport {
    pub results: Vec<EqualityResult>,
    pub residual: Expr,
    pub expected_residual: Option<Expr>,
    pub residual_matches: Option<bool>,
    pub forms: Vec<FormResult>,
}

impl EqualityReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| !matches!(r.status, EqualityStatus::Failed(_)))
    }
}

/// Substitutes the solution and then the solved conditions one at a time.
struct Reducer {
    bindings: Bindings,
    conditions: Vec<(String, Bindings)>,
}

impl Reducer {
    fn new(sol: &CandidateSolution) -> Result<Self, CheckError> {
        Ok(Reducer {
            bindings: sol.binding_set(),
            conditions: sol.condition_bindings()?,
        })
    }

    fn bind(&self, e: &Expr) -> Result<Expr, CheckError> {
        Ok(self.bindings.apply(e)?)
    }

    /// The bound expression fully reduced, with the conditions that changed it.
    fn reduce(&self, bound: &Expr) -> Result<(Expr, Vec<String>), CheckError> {
        let mut used = Vec::new();
        let mut cur = bound.clone();
        for (name, b) in &self.conditions {
            if cur.is_zero() {
                break;
            }
            let next = b.apply(bound)?;
            if next != cur {
                used.push(name.clone());
            }
            cur = next;
        }
        Ok((cur, used))
    }

    fn full(&self, e: &Expr) -> Result<Expr, CheckError> {
        let bound = self.bind(e)?;
        Ok(self.reduce(&bound)?.0)
    }
}

fn check_one(r: &Reducer, e: &Expr) -> Result<EqualityStatus, CheckError> {
    let bound = r.bind(e)?;
    if bound.is_zero() {
        return Ok(EqualityStatus::Satisfied);
    }
    let (reduced, used) = r.reduce(&bound)?;
    Ok(if reduced.is_zero() {
        EqualityStatus::Conditional(used)
    } else {
        EqualityStatus::Failed(reduced.monic_numerator())
    })
}

/// Decides every emitted equality exactly and reduces the residual inequality
/// and the even forms under the solution.
pub fn check_equalities(rep: &LiuReport, sol: &CandidateSolution) -> Result<EqualityReport, CheckError> {
    let r = Reducer::new(sol)?;
    let rs = &rep.restrictions;
    let mut items: Vec<(String, &Expr)> = Vec::new();
    for z in &rs.zeta_equalities {
        items.push((format!("coefficient of {}", z.jet), &z.expr));
    }
    for o in &rs.odd_equalities {
        items.push((format!("coefficient of {}", o.monomial_text()), &o.expr));
    }
    let statuses: Vec<Result<EqualityStatus, CheckError>> = items.par_iter().map(|(_, e)| check_one(&r, e)).collect();
    let mut results = Vec::new();
    for ((source, _), status) in items.into_iter().zip(statuses) {
        results.push(EqualityResult {
            source,
            status: status?,
        });
    }
    let residual = r.full(&rs.residual)?;
    let expected_residual = match &sol.expected_residual {
        Some(e) => Some(r.full(e)?),
        None => None,
    };
    let residual_matches = expected_residual.as_ref().map(|e| *e == residual);
    let mut forms = Vec::new();
    for f in &rs.even_forms {
        let entries: Vec<FormEntry> = f
            .entries
            .par_iter()
            .map(|e| {
                Ok(FormEntry {
                    monomial: e.monomial.clone(),
                    expr: r.full(&e.expr)?,
                })
            })
            .collect::<Result<Vec<_>, CheckError>>()?
            .into_iter()
            .filter(|e| !e.expr.is_zero())
            .collect();
        let expr = Expr::sum(entries.iter().map(|e| &e.expr * &monomial_expr(&e.monomial)));
        let (vars, minors) = if f.degree == 2 {
            let (vars, m) = quadratic_matrix(&entries, &rep.classification.higher);
            (vars, principal_minors(&m, MAX_MINOR_ORDER))
        } else {
            (Vec::new(), Vec::new())
        };
        forms.push(FormResult {
            degree: f.degree,
            expr,
            minors,
            vars,
        });
    }
    Ok(EqualityReport {
        results,
        residual,
        expected_residual,
        residual_matches,
        forms,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MaxEntropyStatus {
    Pass,
    Fail,
    Undetermined,
    Skipped,
}

impl MaxEntropyStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            MaxEntropyStatus::Pass => "pass",
            MaxEntropyStatus::Fail => "fail",
            MaxEntropyStatus::Undetermined => "undetermined",
            MaxEntropyStatus::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug)]
pub struct MaxEntropyReport {
    pub status: MaxEntropyStatus,
    /// Nonzero coefficients of the gradient form, as `(monomial, coefficient)`.
    pub form: Vec<(String, Expr)>,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sign {
    Pos,
    NonNeg,
    Zero,
    NonPos,
    Neg,
}

impl Sign {
    fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::NonNeg => Sign::NonPos,
            Sign::Zero => Sign::Zero,
            Sign::NonPos => Sign::NonNeg,
            Sign::Neg => Sign::Pos,
        }
    }

    fn of_relation(r: Relation) -> Option<Sign> {
        match r {
            Relation::Gt => Some(Sign::Pos),
            Relation::Ge => Some(Sign::NonNeg),
            Relation::Eq => Some(Sign::Zero),
            Relation::Le => Some(Sign::NonPos),
            Relation::Lt => Some(Sign::Neg),
            Relation::Ne => None,
        }
    }
}

/// Sign of `e` when it is a constant or a constant multiple of a declared
/// sign condition.
fn known_sign(e: &Expr, conditions: &[Condition]) -> Option<Sign> {
    let of_const = |c: &crate::expr::Coeff| {
        use num_traits::{Signed, Zero};
        if c.is_zero() {
            Sign::Zero
        } else if c.is_positive() {
            Sign::Pos
        } else {
            Sign::Neg
        }
    };
    if let Some(c) = e.as_constant() {
        return Some(of_const(&c));
    }
    for c in conditions {
        let Some(s) = Sign::of_relation(c.rel) else { continue };
        let d = c.difference();
        if d.is_zero() {
            continue;
        }
        if let Some(k) = (e / &d).as_constant() {
            return Some(match of_const(&k) {
                Sign::Pos => s,
                Sign::Neg => s.flip(),
                _ => Sign::Zero,
            });
        }
    }
    None
}

/// Gradients of the state space: its members of positive x-order.
fn gradients(model: &ModelSpec) -> Vec<JetVar> {
    model.state_vars().into_iter().filter(|j| j.x_order() > 0).collect()
}

/// The entropy binding must be an equilibrium part plus a negative
/// semidefinite quadratic form in the gradients.
pub fn max_entropy_at_equilibrium(model: &ModelSpec, sol: &CandidateSolution) -> MaxEntropyReport {
    let name = model.entropy.density.name();
    let Some(s) = sol.binding(name) else {
        return MaxEntropyReport {
            status: MaxEntropyStatus::Skipped,
            form: Vec::new(),
            detail: format!("no binding for `{name}`"),
        };
    };
    let grads = gradients(model);
    let skipped = |detail: String| MaxEntropyReport {
        status: MaxEntropyStatus::Skipped,
        form: Vec::new(),
        detail,
    };
    let table = match s.collect(&grads) {
        Ok(t) => t,
        Err(e) => return skipped(format!("entropy is not polynomial in the gradients: {e}")),
    };
    let mut entries = Vec::new();
    for (key, c) in &table {
        let deg: u32 = key.iter().sum();
        if deg == 0 {
            continue;
        }
        if deg != 2 {
            return skipped("entropy is not an equilibrium part plus a quadratic form in the gradients".into());
        }
        entries.push(FormEntry {
            monomial: key
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| (grads[i].clone(), e))
                .collect(),
            expr: c.clone(),
        });
    }
    let form: Vec<(String, Expr)> = entries.iter().map(|e| (e.monomial_text(), e.expr.clone())).collect();
    if entries.is_empty() {
        return MaxEntropyReport {
            status: MaxEntropyStatus::Pass,
            form,
            detail: "no gradient dependence".into(),
        };
    }
    let (vars, m) = quadratic_matrix(&entries, &grads);
    let neg: Vec<Vec<Expr>> = m.iter().map(|r| r.iter().map(|e| -e).collect()).collect();
    let minors = principal_minors(&neg, vars.len());

    let mut undetermined = Vec::new();
    for (idx, minor) in &minors {
        match known_sign(minor, &sol.conditions) {
            Some(Sign::Pos | Sign::NonNeg | Sign::Zero) => {}
            Some(_) => {
                let what: Vec<String> = idx.iter().map(|&i| vars[i].to_string()).collect();
                return MaxEntropyReport {
                    status: MaxEntropyStatus::Fail,
                    form,
                    detail: format!(
                        "the gradient form is not negative semidefinite: minor over ({}) of its negative is {}",
                        what.join(", "),
                        to_text(minor, Some(&sol.context))
                    ),
                };
            }
            None => undetermined.push(minor.clone()),
        }
    }
    if undetermined.is_empty() {
        return MaxEntropyReport {
            status: MaxEntropyStatus::Pass,
            form,
            detail: "negative semidefinite by the declared conditions".into(),
        };
    }
    // Fall back to the scenarios.
    let mut checked = 0;
    for sc in &sol.scenarios {
        let Ok(inst) = scenario_bindings(sc) else { continue };
        for minor in &undetermined {
            let Ok(e) = inst.apply(minor) else { continue };
            let vals = sample_values(model, &sol.sampling, &[e], &sol.sampling.ranges, sol.sampling.points.min(200));
            let Ok(vals) = vals else { continue };
            checked += 1;
            if let Some(v) = vals.iter().filter_map(|v| v.first().copied()).find(|v| *v < -sol.sampling.tol) {
                return MaxEntropyReport {
                    status: MaxEntropyStatus::Fail,
                    form,
                    detail: format!("scenario `{}`: a principal minor of the negated form takes the value {v:e}", sc.name),
                };
            }
        }
    }
    MaxEntropyReport {
        status: if checked > 0 { MaxEntropyStatus::Pass } else { MaxEntropyStatus::Undetermined },
        form,
        detail: if checked > 0 {
            "negative semidefinite at every sampled point".into()
        } else {
            "sign of the gradient form is not determined by the declared conditions".into()
        },
    }
}

fn scenario_bindings(sc: &Scenario) -> Result<Bindings, CheckError> {
    let mut b = Bindings::new();
    for (f, e) in &sc.bindings {
        b.bind_func(f.clone(), e.clone())
            .map_err(|err| CheckError::Scenario(sc.name.clone(), err.to_string()))?;
    }
    Ok(b)
}

fn default_range(model: &ModelSpec, j: &JetVar) -> (f64, f64) {
    if j.x_order() > 0 || model.velocity.as_deref() == Some(j.field()) {
        (-1.0, 1.0)
    } else {
        (0.5, 2.0)
    }
}

/// The jets drawn at each point, in a fixed order.
fn sample_vars(model: &ModelSpec, extra: &[&Expr]) -> Vec<JetVar> {
    let mut set: BTreeSet<JetVar> = model.field_vars().into_iter().collect();
    set.extend(model.state.members().iter().cloned());
    for e in extra {
        set.extend(e.jets());
    }
    let mut v: Vec<JetVar> = set.into_iter().collect();
    sort_jets(&mut v, &model.fields);
    v
}

/// Values of `exprs` at `n` deterministic points; a point where some value is
/// singular is redrawn from the same stream.
fn sample_values(
    model: &ModelSpec,
    sampling: &Sampling,
    exprs: &[Expr],
    ranges: &BTreeMap<JetVar, (f64, f64)>,
    n: usize,
) -> Result<Vec<Vec<f64>>, CheckError> {
    Ok(sample_points(model, sampling.seed, exprs, ranges, n)?.into_iter().map(|p| p.values).collect())
}

struct PointValues {
    point: Vec<(JetVar, f64)>,
    values: Vec<f64>,
    redraws: usize,
    singular: bool,
}

fn sample_points(
    model: &ModelSpec,
    seed: u64,
    exprs: &[Expr],
    ranges: &BTreeMap<JetVar, (f64, f64)>,
    n: usize,
) -> Result<Vec<PointValues>, CheckError> {
    let refs: Vec<&Expr> = exprs.iter().collect();
    let vars = sample_vars(model, &refs);
    for e in exprs {
        if let Some(f) = e.funcs().into_iter().next() {
            return Err(CheckError::Scenario(
                String::new(),
                format!("`{}` has no numeric value", to_text(&Expr::func(f), None)),
            ));
        }
    }
    let bounds: Vec<(f64, f64)> = vars
        .iter()
        .map(|j| ranges.get(j).copied().unwrap_or_else(|| default_range(model, j)))
        .collect();
    let out: Vec<PointValues> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut redraws = 0;
            loop {
                let point: Vec<(JetVar, f64)> = vars
                    .iter()
                    .zip(&bounds)
                    .map(|(j, &(lo, hi))| (j.clone(), if lo == hi { lo } else { rng.gen_range(lo..hi) }))
                    .collect();
                let env: BTreeMap<Atom, f64> = point.iter().map(|(j, v)| (Atom::Jet(j.clone()), *v)).collect();
                let values: Option<Vec<f64>> = exprs
                    .iter()
                    .map(|e| e.evaluate(&env).ok().filter(|v| v.is_finite()))
                    .collect();
                match values {
                    Some(values) => {
                        return PointValues {
                            point,
                            values,
                            redraws,
                            singular: false,
                        }
                    }
                    None if redraws + 1 >= MAX_RESAMPLE => {
                        return PointValues {
                            point,
                            values: vec![f64::NAN; exprs.len()],
                            redraws,
                            singular: true,
                        }
                    }
                    None => redraws += 1,
                }
            }
        })
        .collect();
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct QuantityResult {
    pub name: String,
    /// Relation the sampled value must satisfy: `>= 0` unless a condition says otherwise.
    pub relation: Relation,
    pub min: f64,
    pub max: f64,
    pub failures: usize,
    pub pass: bool,
    pub first_failure: Option<Vec<(JetVar, f64)>>,
}

#[derive(Clone, Debug)]
pub struct ScenarioReport {
    pub name: String,
    pub expect_violation: bool,
    pub points: usize,
    pub seed: u64,
    pub tol: f64,
    pub conditions: Vec<QuantityResult>,
    pub quantities: Vec<QuantityResult>,
    pub redraws: usize,
    pub singular: usize,
}

impl ScenarioReport {
    pub fn conditions_hold(&self) -> bool {
        self.conditions.iter().all(|c| c.pass)
    }

    pub fn inequalities_hold(&self) -> bool {
        self.quantities.iter().all(|q| q.pass)
    }

    pub fn residual(&self) -> Option<&QuantityResult> {
        self.quantities.iter().find(|q| q.name == "residual")
    }
}

/// Samples the residual inequality, the even forms and the scenario's own
/// conditions under each scenario of the solution.
pub fn check_inequalities(
    model: &ModelSpec,
    eq: &EqualityReport,
    sol: &CandidateSolution,
    sampling: &Sampling,
) -> Result<Vec<ScenarioReport>, CheckError> {
    let reducer = Reducer::new(sol)?;
    let mut reports = Vec::new();
    for sc in &sol.scenarios {
        let inst = scenario_bindings(sc)?;
        let scen_err = |e: CheckError| match e {
            CheckError::Scenario(_, m) => CheckError::Scenario(sc.name.clone(), m),
            CheckError::Subst(s) => CheckError::Scenario(sc.name.clone(), s.to_string()),
            other => other,
        };
        let mut cond_exprs = Vec::new();
        let mut cond_meta = Vec::new();
        for c in &sol.conditions {
            if c.solve.is_some() {
                continue;
            }
            let e = reducer.reduce(&c.difference()).map_err(scen_err)?.0;
            let e = inst.apply(&e).map_err(|e| scen_err(e.into()))?;
            cond_exprs.push(e);
            cond_meta.push((format!("condition {}", c.name), c.rel));
        }
        let mut q_exprs = vec![inst.apply(&eq.residual).map_err(|e| scen_err(e.into()))?];
        let mut q_meta = vec![("residual".to_string(), Relation::Ge)];
        for f in &eq.forms {
            if f.expr.is_zero() {
                continue;
            }
            q_exprs.push(inst.apply(&f.expr).map_err(|e| scen_err(e.into()))?);
            q_meta.push((format!("form of degree {}", f.degree), Relation::Ge));
            for (idx, m) in &f.minors {
                let what: Vec<String> = idx.iter().map(|&i| f.vars[i].to_string()).collect();
                q_exprs.push(inst.apply(m).map_err(|e| scen_err(e.into()))?);
                q_meta.push((format!("principal minor ({})", what.join(", ")), Relation::Ge));
            }
        }
        let all: Vec<Expr> = cond_exprs.iter().chain(&q_exprs).cloned().collect();
        let pts = sample_points(model, sampling.seed, &all, &sampling.ranges, sampling.points).map_err(scen_err)?;
        let summarize = |offset: usize, meta: &[(String, Relation)]| -> Vec<QuantityResult> {
            meta.iter()
                .enumerate()
                .map(|(k, (name, rel))| {
                    let mut q = QuantityResult {
                        name: name.clone(),
                        relation: *rel,
                        min: f64::INFINITY,
                        max: f64::NEG_INFINITY,
                        failures: 0,
                        pass: true,
                        first_failure: None,
                    };
                    for p in pts.iter().filter(|p| !p.singular) {
                        let v = p.values[offset + k];
                        q.min = q.min.min(v);
                        q.max = q.max.max(v);
                        if !rel.holds(v, sampling.tol) {
                            q.failures += 1;
                            if q.first_failure.is_none() {
                                q.first_failure = Some(p.point.clone());
                            }
                        }
                    }
                    q.pass = q.failures == 0;
                    q
                })
                .collect()
        };
        let conditions = summarize(0, &cond_meta);
        let quantities = summarize(cond_exprs.len(), &q_meta);
        let report = ScenarioReport {
            name: sc.name.clone(),
            expect_violation: sc.expect_violation,
            points: sampling.points,
            seed: sampling.seed,
            tol: sampling.tol,
            conditions,
            quantities,
            redraws: pts.iter().map(|p| p.redraws).sum(),
            singular: pts.iter().filter(|p| p.singular).count(),
        };
        if !sc.expect_violation && !report.conditions_hold() {
            let bad: Vec<&str> = report
                .conditions
                .iter()
                .filter(|c| !c.pass)
                .map(|c| c.name.as_str())
                .collect();
            return Err(CheckError::Scenario(sc.name.clone(), format!("violates {}", bad.join(", "))));
        }
        reports.push(report);
    }
    Ok(reports)
}

/// Evaluates `e` at one assignment of jets; used by tests and the CLI.
pub fn evaluate_at(e: &Expr, point: &[(JetVar, f64)]) -> Option<f64> {
    let env: BTreeMap<Atom, f64> = point.iter().map(|(j, v)| (Atom::Jet(j.clone()), *v)).collect();
    e.evaluate(&env).ok()
}

/// Applies a scenario's instantiation to an expression.
pub fn instantiate(sc: &Scenario, e: &Expr) -> Result<Expr, CheckError> {
    Ok(scenario_bindings(sc)?.apply(e)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liu::{derive, LiuOptions};
    use crate::models::{BuiltinModel, GRADE2, KORTEWEG};

    struct Run {
        eq: EqualityReport,
        scenarios: Vec<ScenarioReport>,
        max_entropy: MaxEntropyReport,
    }

    fn run(b: &BuiltinModel, name: &str) -> Run {
        let model = b.model().unwrap();
        let rep = derive(&model, &LiuOptions::default()).unwrap();
        let sol = CandidateSolution::parse(b.solution(name).unwrap(), &model).unwrap();
        let eq = check_equalities(&rep, &sol).unwrap();
        let scenarios = check_inequalities(&model, &eq, &sol, &sol.sampling).unwrap();
        let max_entropy = max_entropy_at_equilibrium(&model, &sol);
        Run {
            eq,
            scenarios,
            max_entropy,
        }
    }

    #[test]
    fn relation_parsing() {
        assert_eq!(split_relation("a >= b"), Some((2, Relation::Ge, 4)));
        assert_eq!(split_relation("a<b"), Some((1, Relation::Lt, 2)));
        assert_eq!(split_relation("f[x] != 0"), Some((5, Relation::Ne, 7)));
        assert_eq!(split_relation("s(rho) = 1"), Some((7, Relation::Eq, 8)));
        assert_eq!(split_relation("a + b"), None);
        assert!(Relation::Ge.holds(-1e-13, 1e-12));
        assert!(!Relation::Gt.holds(-1e-3, 1e-12));
        assert!(Relation::Eq.holds(0.0, 0.0));
    }

    #[test]
    fn grade2_full_solution() {
        let r = run(&GRADE2, "grade2");
        assert_eq!(r.eq.results.len(), 8);
        assert!(r.eq.all_pass());
        assert_eq!(r.eq.residual_matches, Some(true));
        assert_eq!(r.max_entropy.status, MaxEntropyStatus::Pass);
    }

    #[test]
    fn grade2_reduced_solution_and_scenarios() {
        let r = run(&GRADE2, "grade2-g0");
        assert!(r.eq.all_pass());
        assert_eq!(r.eq.residual_matches, Some(true));
        let fourier = r.scenarios.iter().find(|s| s.name == "fourier").unwrap();
        assert!(fourier.conditions_hold() && fourier.inequalities_hold());
        assert!(fourier.residual().unwrap().min >= 0.0);
        assert_eq!(fourier.singular, 0);
        let strong = r.scenarios.iter().find(|s| s.name == "strong-coupling").unwrap();
        assert!(strong.expect_violation);
        assert!(!strong.inequalities_hold());
        assert!(strong.residual().unwrap().first_failure.is_some());
    }

    #[test]
    fn zero_solution() {
        let r = run(&GRADE2, "grade2-zero");
        assert!(r.eq.results.iter().all(|e| e.status == EqualityStatus::Satisfied));
        assert!(r.eq.residual.is_zero());
        assert_eq!(r.max_entropy.status, MaxEntropyStatus::Pass);
    }

    #[test]
    fn korteweg_solution() {
        let r = run(&KORTEWEG, "korteweg");
        assert!(r.eq.all_pass());
        assert_eq!(r.eq.residual_matches, Some(true));
        let cap = r.scenarios.iter().find(|s| s.name == "capillary").unwrap();
        assert!(cap.inequalities_hold());
        assert!(!r.scenarios.iter().find(|s| s.name == "strong-coupling").unwrap().inequalities_hold());
        assert_eq!(r.max_entropy.status, MaxEntropyStatus::Pass);
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = run(&GRADE2, "grade2-g0");
        let b = run(&GRADE2, "grade2-g0");
        let (x, y) = (a.scenarios[1].residual().unwrap(), b.scenarios[1].residual().unwrap());
        assert_eq!(x.min.to_bits(), y.min.to_bits());
        assert_eq!(x.failures, y.failures);
    }

    #[test]
    fn wrong_binding_is_detected() {
        let model = GRADE2.model().unwrap();
        let rep = derive(&model, &LiuOptions::default()).unwrap();
        let text = GRADE2.solution("grade2-g0").unwrap().replace("*rho_x*gamma_x\n", "*rho_x*gamma_x*2\n");
        let sol = CandidateSolution::parse(&text, &model).unwrap();
        let eq = check_equalities(&rep, &sol).unwrap();
        assert!(!eq.all_pass() || eq.residual_matches == Some(false));
    }

    #[test]
    fn missing_binding_is_rejected() {
        let model = GRADE2.model().unwrap();
        let text = "[bindings]\ns = 0\nJs = 0\nT = 0\nq = 0\n";
        match CandidateSolution::parse(text, &model) {
            Err(ModelError::Validation(m)) => assert!(m.contains("unbound symbol `phi`"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn violating_scenario_is_an_error() {
        let model = GRADE2.model().unwrap();
        let rep = derive(&model, &LiuOptions::default()).unwrap();
        let text = GRADE2.solution("grade2-g0").unwrap().replace("expect = violation", "");
        let sol = CandidateSolution::parse(&text, &model).unwrap();
        let eq = check_equalities(&rep, &sol).unwrap();
        match check_inequalities(&model, &eq, &sol, &sol.sampling) {
            Err(CheckError::Scenario(name, _)) => assert_eq!(name, "strong-coupling"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn equilibrium_states_produce_nothing() {
        let model = GRADE2.model().unwrap();
        let rep = derive(&model, &LiuOptions::default()).unwrap();
        let sol = CandidateSolution::parse(GRADE2.solution("grade2-g0").unwrap(), &model).unwrap();
        let eq = check_equalities(&rep, &sol).unwrap();
        let mut sampling = sol.sampling.clone();
        sampling.points = 50;
        for j in gradients(&model) {
            sampling.ranges.insert(j, (0.0, 0.0));
        }
        for s in check_inequalities(&model, &eq, &sol, &sampling).unwrap() {
            let r = s.residual().unwrap();
            assert_eq!((r.min, r.max), (0.0, 0.0));
        }
    }

    #[test]
    fn maximum_entropy_gate() {
        let model = GRADE2.model().unwrap();
        for (from, to, want) in [
            ("maxent: s1 <= 0", "maxent: s1 > 0", MaxEntropyStatus::Fail),
            ("maxent: s1 <= 0", "maxent: s1 >= 0", MaxEntropyStatus::Fail),
            ("maxent: s1 <= 0", "maxent: -s1 >= 0", MaxEntropyStatus::Pass),
            ("s = s0 + s1*rho_x^2", "s = s0 + rho_x^2", MaxEntropyStatus::Fail),
            ("s = s0 + s1*rho_x^2", "s = s0 - rho_x^2 - eps_x^2", MaxEntropyStatus::Pass),
            ("s = s0 + s1*rho_x^2", "s = s0", MaxEntropyStatus::Pass),
        ] {
            let text = GRADE2.solution("grade2-g0").unwrap();
            assert!(text.contains(from));
            let sol = CandidateSolution::parse(&text.replace(from, to), &model).unwrap();
            assert_eq!(max_entropy_at_equilibrium(&model, &sol).status, want, "{to}");
        }
        let text = GRADE2.solution("grade2-g0").unwrap().replace("maxent: s1 <= 0", "");
        let sol = CandidateSolution::parse(&text, &model).unwrap();
        assert_eq!(max_entropy_at_equilibrium(&model, &sol).status, MaxEntropyStatus::Pass);
        let text = text.replace("s1 = -1", "s1 = 1");
        let text = text.replace("[scenario strong-coupling]", "[scenario unused]\nexpect = violation\n[scenario strong-coupling]");
        let sol = CandidateSolution::parse(&text, &model).unwrap();
        assert_eq!(max_entropy_at_equilibrium(&model, &sol).status, MaxEntropyStatus::Fail);
    }
}
