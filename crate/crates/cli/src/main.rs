use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use liu_core::checker::{
    check_equalities, check_inequalities, max_entropy_at_equilibrium, CandidateSolution, CheckError, EqualityStatus,
};
use liu_core::expr::{to_text, Context};
use liu_core::fdb::{enumerate_solutions, faa_di_bruno, iterated, opaque};
use liu_core::liu::{derive, EngineError, LiuOptions};
use liu_core::model::{ModelError, ModelSpec};
use liu_core::models::builtin;
use liu_core::report::{self, CheckOutcome};

const MAX_FDB_ORDER: u32 = 8;

#[derive(Parser)]
#[command(name = "liu", version, about = "Entropy-inequality restrictions for gradient-dependent continua")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Latex,
}

#[derive(clap::Args)]
struct Output {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct Engine {
    /// Use every extension up to the depth instead of the pruned set.
    #[arg(long)]
    all_extensions: bool,
    /// Depth of the extended equations; defaults to the state-space order.
    #[arg(long)]
    order: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Derive the restriction set of a model.
    Derive {
        /// Model file, or the id of a built-in model.
        model: String,
        #[command(flatten)]
        output: Output,
        #[command(flatten)]
        engine: Engine,
    },
    /// Check a candidate solution against the derived restrictions.
    Check {
        model: String,
        /// Solution file, or the name of a built-in solution.
        solution: String,
        #[command(flatten)]
        output: Output,
        #[command(flatten)]
        engine: Engine,
        /// Sample the inequalities at this many points per scenario.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Print the m-th x-derivative of F(w1..ws) from the closed formula.
    Fdb {
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 1)]
        s: usize,
        /// Compare against iterated differentiation.
        #[arg(long)]
        verify: bool,
    },
    /// Print a parsed model as JSON.
    Export {
        model: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    kind: &'static str,
    code: u8,
    message: String,
}

impl Failure {
    fn new(kind: &'static str, code: u8, message: impl Into<String>) -> Self {
        Failure {
            kind,
            code,
            message: message.into(),
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Parse(e) => Failure::new("parse", 1, e.to_string()),
            ModelError::Validation(m) => Failure::new("validation", 2, m),
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        Failure::new("engine", 3, e.to_string())
    }
}

impl From<CheckError> for Failure {
    fn from(e: CheckError) -> Self {
        match e {
            CheckError::Subst(_) => Failure::new("engine", 3, e.to_string()),
            _ => Failure::new("validation", 2, e.to_string()),
        }
    }
}

/// A path, or failing that the text of a built-in fixture.
fn read_source(arg: &str, fallback: impl FnOnce(&str) -> Option<&'static str>) -> Result<(String, String), Failure> {
    let path = Path::new(arg);
    if path.exists() {
        let text = fs::read_to_string(path).map_err(|e| Failure::new("io", 1, format!("{arg}: {e}")))?;
        let name = path.file_stem().map_or(arg.to_string(), |s| s.to_string_lossy().into_owned());
        return Ok((name, text));
    }
    match fallback(arg) {
        Some(text) => Ok((arg.to_string(), text.to_string())),
        None => Err(Failure::new("io", 1, format!("{arg}: no such file or built-in"))),
    }
}

fn load_model(arg: &str) -> Result<(ModelSpec, Option<&'static str>), Failure> {
    let builtin_id = builtin(arg).ok().map(|b| b.id);
    let (_, text) = read_source(arg, |id| builtin(id).ok().map(|b| b.model_text))?;
    let model = ModelSpec::parse(&text)?;
    model.validate()?;
    Ok((model, if Path::new(arg).exists() { None } else { builtin_id }))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::new("io", 1, format!("{}: {e}", p.display()))),
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::new("io", 1, e.to_string())),
            _ => Ok(()),
        },
    }
}

fn options(e: &Engine) -> LiuOptions {
    LiuOptions {
        all_extensions: e.all_extensions,
        order: e.order,
    }
}

fn cmd_derive(model: &str, output: &Output, engine: &Engine) -> Result<(), Failure> {
    let (model, _) = load_model(model)?;
    let rep = derive(&model, &options(engine))?;
    let text = match output.format {
        Format::Text => report::derive_text(&rep),
        Format::Json => report::to_json_string(&report::derive_json(&rep)),
        Format::Latex => report::derive_latex(&rep),
    };
    emit(&output.out, &text)
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    model_arg: &str,
    solution_arg: &str,
    output: &Output,
    engine: &Engine,
    sample: Option<usize>,
    seed: Option<u64>,
    tol: Option<f64>,
) -> Result<(), Failure> {
    let (model, id) = load_model(model_arg)?;
    let (sol_name, sol_text) = read_source(solution_arg, |name| id.and_then(|id| builtin(id).ok()?.solution(name)))?;
    let sol = CandidateSolution::parse(&sol_text, &model)?;
    let rep = derive(&model, &options(engine))?;
    let equalities = check_equalities(&rep, &sol)?;
    let max_entropy = max_entropy_at_equilibrium(&model, &sol);
    let scenarios = match sample {
        Some(points) => {
            let mut sampling = sol.sampling.clone();
            sampling.points = points;
            if let Some(s) = seed {
                sampling.seed = s;
            }
            if let Some(t) = tol {
                sampling.tol = t;
            }
            check_inequalities(&model, &equalities, &sol, &sampling)?
        }
        None => Vec::new(),
    };
    let mut ctx = rep.context.clone();
    ctx.extend(&sol.context);
    let outcome = CheckOutcome {
        model: rep.model.clone(),
        hash: rep.hash.clone(),
        solution: if sol.name.is_empty() { sol_name } else { sol.name.clone() },
        equalities,
        max_entropy,
        scenarios,
        context: ctx,
    };
    let text = match output.format {
        Format::Text => report::check_text(&outcome),
        Format::Json => report::to_json_string(&report::check_json(&outcome)),
        Format::Latex => report::check_latex(&outcome),
    };
    emit(&output.out, &text)?;
    if outcome.equalities_pass() {
        return Ok(());
    }
    let failed: Vec<String> = outcome
        .equalities
        .results
        .iter()
        .filter_map(|r| match &r.status {
            EqualityStatus::Failed(e) => Some(format!("{}: {}", r.source, to_text(e, Some(&outcome.context)))),
            _ => None,
        })
        .collect();
    Err(Failure::new("equality", 4, format!("{} equalities fail; {}", failed.len(), failed.join("; "))))
}

fn cmd_fdb(m: u32, s: usize, verify: bool) -> Result<(), Failure> {
    if !(1..=MAX_FDB_ORDER).contains(&m) {
        return Err(Failure::new("validation", 2, format!("m must lie in 1..={MAX_FDB_ORDER}, got {m}")));
    }
    if s < 1 {
        return Err(Failure::new("validation", 2, "s must be at least 1"));
    }
    let f = opaque(s);
    let mut ctx = Context::with_fields((1..=s).map(|j| format!("w{j}")));
    ctx.insert_func(f.clone());
    let e = faa_di_bruno(&f, m);
    let mut text = format!("{}\n", to_text(&e, Some(&ctx)));
    text += &format!("# {} index sets, {} terms\n", enumerate_solutions(m, s).len(), e.len());
    if verify {
        text += if e == iterated(&f, m) { "MATCH\n" } else { "MISMATCH\n" };
    }
    emit(&None, &text)
}

fn cmd_export(model: &str, out: &Option<PathBuf>) -> Result<(), Failure> {
    let (model, _) = load_model(model)?;
    emit(out, &report::to_json_string(&model.to_json()))
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("LIU_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::new("validation", 2, format!("LIU_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::new("engine", 3, e.to_string()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Derive { model, output, engine } => cmd_derive(&model, &output, &engine),
        Command::Check {
            model,
            solution,
            output,
            engine,
            sample,
            seed,
            tol,
        } => cmd_check(&model, &solution, &output, &engine, sample, seed, tol),
        Command::Fdb { m, s, verify } => cmd_fdb(m, s, verify),
        Command::Export { model, out } => cmd_export(&model, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error[{}]: {}", f.kind, f.message.replace('\n', " "));
            ExitCode::from(f.code)
        }
    }
}
