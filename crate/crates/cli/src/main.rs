use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use scclab::axioms::{check_many, AxiomId, CheckOptions};
use scclab::classify::classify;
use scclab::fuzz::{all_variants, fuzz_characterization, fuzz_equivalences, fuzz_relationships};
use scclab::identify::{identify, identify_auto};
use scclab::io::{
    classification_to_value, estimate_from_counts, parse_params, parse_scc_with, recovery_to_value,
    report_to_value, serialize_scc, to_canonical_string,
};
use scclab::models::{generate_scc, ModelSpec, ModelTag};
use scclab::{Error, Scc, ToleranceConfig, Universe};

#[derive(Parser)]
#[command(name = "scclab", version, about = "Exact-arithmetic lab for stochastic choice correspondences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct TolArgs {
    /// Relative tolerance for equalities (float data).
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the full dataset of a parameter document.
    Gen {
        #[arg(long)]
        model: String,
        #[arg(long)]
        params: PathBuf,
        /// Use the empty-collection variant.
        #[arg(long)]
        empty: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate a model on one menu, or one collection of it.
    Eval {
        #[arg(long)]
        params: PathBuf,
        /// Comma-separated labels.
        #[arg(long)]
        menu: String,
        /// Comma-separated labels; empty for the empty collection.
        #[arg(long)]
        set: Option<String>,
    },
    /// Check axioms on a dataset.
    Check {
        scc: PathBuf,
        /// Comma-separated axiom names, or `all`.
        #[arg(long, default_value = "all")]
        axioms: String,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long, default_value_t = 10)]
        witness_cap: usize,
        /// Attribute carriers for POS2, e.g. "a,b;c".
        #[arg(long)]
        attributes: Option<String>,
    },
    /// Recover parameters of a model from a dataset.
    Identify {
        scc: PathBuf,
        /// Model tag or `auto`.
        #[arg(long, default_value = "auto")]
        model: String,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Decide membership in every model class.
    Classify {
        scc: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long)]
        attributes: Option<String>,
    },
    /// Randomized characterization checks.
    Fuzz {
        /// Model tag or `all`.
        #[arg(long, default_value = "all")]
        model: String,
        /// Empty-collection variant (single model only).
        #[arg(long)]
        empty: bool,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Comma-separated universe sizes.
        #[arg(long, default_value = "3,4", value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Estimate a float dataset from a counts table.
    Estimate {
        counts: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<bool, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_value(v: &Value) -> Result<(), Failure> {
    emit(&to_canonical_string(v), None)
}

fn tolerance(tol: &TolArgs) -> Result<ToleranceConfig, Failure> {
    let mut t = ToleranceConfig::default();
    if let Some(eps) = tol.tol {
        t = t.with_eps_eq(eps);
    }
    t.validate()?;
    Ok(t)
}

fn load_scc(path: &Path, tol: &ToleranceConfig) -> Result<Scc, Failure> {
    Ok(parse_scc_with(&read(path)?, tol)?)
}

fn carriers(u: &Universe, text: &str) -> Result<Vec<scclab::Mask>, Failure> {
    text.split(';').map(|c| u.parse_set(c).map_err(Failure::Lib)).collect()
}

fn options(scc: &Scc, tol: ToleranceConfig, cap: usize, attributes: Option<&str>) -> Result<CheckOptions, Failure> {
    let mut opts = CheckOptions { tol, witness_cap: cap, attributes: None };
    if let Some(text) = attributes {
        opts = opts.with_attributes(carriers(scc.universe(), text)?);
    }
    Ok(opts)
}

fn load_spec(path: &Path) -> Result<(ModelSpec, Universe), Failure> {
    Ok(parse_params(&read(path)?)?)
}

fn gen(model: &str, params: &Path, empty: bool, output: Option<&Path>) -> Outcome {
    let tag: ModelTag = model.parse()?;
    let (spec, u) = load_spec(params)?;
    if spec.tag() != tag {
        return Err(Failure::Usage(format!("--model {tag} but the document holds {}", spec.tag())));
    }
    let spec = if empty && !spec.empty_variant {
        ModelSpec::new(spec.params, true)?
    } else {
        spec
    };
    let scc = generate_scc(&spec, &u)?;
    emit(&(serialize_scc(&scc) + "\n"), output)?;
    Ok(true)
}

fn eval(params: &Path, menu: &str, set: Option<&str>) -> Outcome {
    let (spec, u) = load_spec(params)?;
    spec.validate(u.len())?;
    let s = u.parse_set(menu)?;
    if s.is_empty() {
        return Err(Failure::Usage("--menu must name at least one item".into()));
    }
    let v = match set {
        Some(text) => {
            let t = u.parse_set(text)?;
            json!({"menu": u.labels_of(s), "set": u.labels_of(t), "p": spec.eval(t, s)?.to_string()})
        }
        None => {
            let rows: Vec<Value> = spec
                .row(s)?
                .iter()
                .map(|(t, p)| json!({"set": u.labels_of(*t), "p": p.to_string()}))
                .collect();
            json!({"menu": u.labels_of(s), "rows": rows})
        }
    };
    emit_value(&v)?;
    Ok(true)
}

fn check(path: &Path, axioms: &str, tol: &TolArgs, cap: usize, attributes: Option<&str>) -> Outcome {
    let tol = tolerance(tol)?;
    let scc = load_scc(path, &tol)?;
    let opts = options(&scc, tol, cap, attributes)?;
    let list: Vec<AxiomId> = if axioms.trim().eq_ignore_ascii_case("all") {
        scclab::axioms::applicable_axioms(&scc, &opts)
    } else {
        axioms.split(',').map(str::parse).collect::<Result<_, _>>()?
    };
    let reports = check_many(&scc, &list, &opts)?;
    let holds = reports.iter().all(|r| r.holds);
    let values: Vec<Value> = reports.iter().map(|r| report_to_value(r, scc.universe())).collect();
    emit_value(&Value::Array(values))?;
    Ok(holds)
}

fn identify_cmd(path: &Path, model: &str, tol: &TolArgs) -> Outcome {
    let tol = tolerance(tol)?;
    let scc = load_scc(path, &tol)?;
    let opts = CheckOptions::with_tol(tol);
    let result = if model.eq_ignore_ascii_case("auto") {
        identify_auto(&scc, &opts)
    } else {
        identify(&scc, model.parse()?, &opts)
    };
    let u = scc.universe();
    match result {
        Ok(r) => {
            emit_value(&recovery_to_value(&r, u))?;
            Ok(true)
        }
        Err(Error::PreconditionFailed(report)) => {
            emit_value(&json!({
                "identified": false,
                "reason": "precondition_failed",
                "report": report_to_value(&report, u),
            }))?;
            Ok(false)
        }
        Err(Error::RoundTripFailed) => {
            emit_value(&json!({"identified": false, "reason": "round_trip_failed"}))?;
            Ok(false)
        }
        Err(e) => Err(e.into()),
    }
}

fn classify_cmd(path: &Path, tol: &TolArgs, attributes: Option<&str>) -> Outcome {
    let tol = tolerance(tol)?;
    let scc = load_scc(path, &tol)?;
    let opts = options(&scc, tol, 10, attributes)?;
    let report = classify(&scc, &opts)?;
    emit_value(&classification_to_value(&report))?;
    Ok(report.relationship_violations.is_empty())
}

fn fuzz(model: &str, empty: bool, trials: usize, n: &[usize], seed: u64) -> Outcome {
    let to_value = |v: Result<Value, serde_json::Error>| v.map_err(|e| Failure::Lib(e.into()));
    if model.eq_ignore_ascii_case("all") {
        if empty {
            return Err(Failure::Usage("--empty needs a single --model".into()));
        }
        let mut ok = true;
        let mut runs = Vec::new();
        for (tag, ev) in all_variants() {
            let s = fuzz_characterization(tag, ev, trials, n, seed)?;
            ok &= s.failures == 0;
            runs.push(to_value(serde_json::to_value(&s))?);
        }
        let rel = fuzz_relationships(trials, n, seed)?;
        let eq = fuzz_equivalences(trials, n, seed)?;
        ok &= rel.total_failures() == 0 && eq.failures.is_empty();
        emit_value(&json!({
            "characterization": runs,
            "relationships": to_value(serde_json::to_value(&rel))?,
            "equivalences": to_value(serde_json::to_value(&eq))?,
        }))?;
        return Ok(ok);
    }
    let s = fuzz_characterization(model.parse()?, empty, trials, n, seed)?;
    emit_value(&to_value(serde_json::to_value(&s))?)?;
    Ok(s.failures == 0)
}

fn estimate(path: &Path, output: Option<&Path>) -> Outcome {
    let scc = estimate_from_counts(&read(path)?)?;
    emit(&(serialize_scc(&scc) + "\n"), output)?;
    Ok(true)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Gen { model, params, empty, output } => gen(&model, &params, empty, output.as_deref()),
        Command::Eval { params, menu, set } => eval(&params, &menu, set.as_deref()),
        Command::Check { scc, axioms, tol, witness_cap, attributes } => {
            check(&scc, &axioms, &tol, witness_cap, attributes.as_deref())
        }
        Command::Identify { scc, model, tol } => identify_cmd(&scc, &model, &tol),
        Command::Classify { scc, tol, attributes } => classify_cmd(&scc, &tol, attributes.as_deref()),
        Command::Fuzz { model, empty, trials, n, seed } => fuzz(&model, empty, trials, &n, seed),
        Command::Estimate { counts, output } => estimate(&counts, output.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
