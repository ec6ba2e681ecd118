//! `leakage-lab`: information measures, event-probability bounds,
//! mechanism leakage, composition accounting, bound verification, and the
//! noisy-ERM experiment, with JSON input and output.
//!
//! Exit codes: 0 success, 1 domain error (machine-readable JSON on
//! stderr), 2 usage error.

// Doc comments below double as clap help text; the <placeholders> in them
// are not HTML.
#![allow(rustdoc::invalid_html_tags, rustdoc::broken_intra_doc_links)]

use clap::{Args, Parser, Subcommand};
use leakage_core::adaptive::{budget_significance, CompositionLedger};
use leakage_core::bounds::{
    alpha_div_bound, four_param_bound, hellinger_p_bound, hellinger_sq_bound, json_f64, ml_bound,
    sibson_bound, FdivGenerator,
};
use leakage_core::harness::{bound_verification_suite, noisy_erm_experiment, ExperimentConfig};
use leakage_core::measures::{
    beta_approx_max_information, f_mutual_information, max_information, maximal_leakage,
    renyi_divergence_joint_product, sibson_mi,
};
use leakage_core::mechanisms::{
    additive_noise_leakage, leakage_formula, provenance_note, MechanismSpec, NoiseKind,
};
use leakage_core::orlicz::{theorem1_bound, theorem2_bound, OrliczFn};
use leakage_core::{Alpha, Error, Event, FKind, JointDist, SCHEMA};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "leakage-lab", version, about = "Information measures and event-probability bounds on finite joint distributions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report measure values in bits instead of nats.
    #[arg(long, global = true)]
    bits: bool,
    /// Write the JSON report to this path instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a dependence measure on a joint distribution.
    Measure(MeasureArgs),
    /// Evaluate an event-probability bound and its exact comparison.
    Bound(BoundArgs),
    /// Closed-form maximal leakage of an additive-noise mechanism.
    Mechanism(MechanismArgs),
    /// Add leakage budgets and derive the adjusted significance level.
    Compose(ComposeArgs),
    /// Run the bound verification suite over random instances.
    Verify(VerifyArgs),
    /// Run an experiment (currently: noisy-erm).
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct MeasureArgs {
    /// Path to the joint distribution JSON.
    #[arg(long)]
    joint: PathBuf,
    /// sibson | renyi | ml | max-info | beta-max-info:<beta> | kl | tv |
    /// chi2 | squared-hellinger | hellinger-p
    #[arg(long)]
    kind: String,
    /// Order for sibson/renyi: a positive real, "1", or "inf".
    #[arg(long)]
    alpha: Option<String>,
    /// Order for hellinger-p.
    #[arg(long)]
    p: Option<f64>,
}

#[derive(Args)]
struct BoundArgs {
    /// Path to the joint distribution JSON.
    #[arg(long)]
    joint: PathBuf,
    /// Event: a JSON file path, or builtin "diagonal" | "full" |
    /// "threshold:<eta>" (numeric labels, |x - y| > eta).
    #[arg(long)]
    event: String,
    /// ml | sibson | alpha-div | four-param[:<alpha_prime>] | hellinger-p |
    /// hellinger-sq | fdiv:<hellinger-p|squared-hellinger> |
    /// theorem2:<psi> | theorem1:<phi>,<psi> with psi/phi from the Orlicz
    /// registry ("power:alpha=<a>", "exp-minus-one", "linear").
    #[arg(long)]
    family: String,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    p: Option<f64>,
}

#[derive(Args)]
struct MechanismArgs {
    /// laplace | gaussian | exponential
    #[arg(long)]
    noise: String,
    /// Output range of the noiseless statistic, "lo,hi".
    #[arg(long)]
    range: String,
    /// Noise scale: b for laplace/exponential, sigma for gaussian.
    #[arg(long)]
    scale: f64,
}

#[derive(Args)]
struct ComposeArgs {
    /// Comma-separated per-step leakage budgets in nats.
    #[arg(long)]
    steps: String,
    /// Target false-discovery probability.
    #[arg(long)]
    delta: f64,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    instances: usize,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment name; only "noisy-erm" is defined.
    name: String,
    /// Samples per trial.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Hypothesis count.
    #[arg(long, default_value_t = 50)]
    k: usize,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Comma-separated accuracy grid in (0,1).
    #[arg(long)]
    eta: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(value) => {
            let rendered = serde_json::to_string_pretty(&value).expect("serializable report");
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, rendered + "\n") {
                        eprintln!("{}", error_json("Io", &e.to_string()));
                        return ExitCode::from(1);
                    }
                }
                None => println!("{rendered}"),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", error_json(e.code(), &e.to_string()));
            ExitCode::from(1)
        }
    }
}

fn error_json(code: &str, message: &str) -> String {
    serde_json::json!({ "schema": SCHEMA, "error": code, "message": message }).to_string()
}

fn run(cli: &Cli) -> Result<serde_json::Value, Error> {
    match &cli.command {
        Command::Measure(args) => measure(args, cli.bits),
        Command::Bound(args) => bound(args),
        Command::Mechanism(args) => mechanism(args, cli.bits),
        Command::Compose(args) => compose(args),
        Command::Verify(args) => {
            let report = bound_verification_suite(args.seed, args.instances)?;
            Ok(serde_json::to_value(report).expect("serializable report"))
        }
        Command::Experiment(args) => experiment(args),
    }
}

fn load_joint(path: &PathBuf) -> Result<JointDist, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
    JointDist::from_json_str(&text)
}

/// CLI-level guard: orders this close to 1 are almost certainly a typo for
/// the exact limit; the library itself accepts anything outside 1e-9.
const CLI_DEGENERATE_WINDOW: f64 = 1e-6;

fn parse_alpha(raw: &Option<String>, kind: &str) -> Result<Alpha, Error> {
    let s = raw
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter(format!("--alpha is required for {kind}")))?;
    let alpha = Alpha::parse(s)?;
    if let Alpha::Finite(a) = alpha {
        if (a - 1.0).abs() < CLI_DEGENERATE_WINDOW {
            return Err(Error::DegenerateAlpha { alpha: a });
        }
    }
    Ok(alpha)
}

fn finite_alpha(raw: &Option<String>, kind: &str) -> Result<f64, Error> {
    match parse_alpha(raw, kind)? {
        Alpha::Finite(a) => Ok(a),
        other => Err(Error::InvalidParameter(format!(
            "{kind} needs a finite alpha > 1, got {other}"
        ))),
    }
}

fn in_unit(v: f64, what: &str) -> Result<f64, Error> {
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!(
            "{what} must lie in (0,1), got {v}"
        )))
    }
}

fn measure(args: &MeasureArgs, bits: bool) -> Result<serde_json::Value, Error> {
    let joint = load_joint(&args.joint)?;
    let kind = args.kind.as_str();
    let value = match kind {
        "sibson" => sibson_mi(&joint, parse_alpha(&args.alpha, "sibson")?)?,
        "renyi" => renyi_divergence_joint_product(&joint, parse_alpha(&args.alpha, "renyi")?)?,
        "ml" | "maximal-leakage" => maximal_leakage(&joint)?,
        "max-info" | "max-information" => max_information(&joint),
        "kl" => f_mutual_information(&joint, &FKind::Kl)?,
        "tv" => f_mutual_information(&joint, &FKind::TotalVariation)?,
        "chi2" => f_mutual_information(&joint, &FKind::ChiSquared)?,
        "squared-hellinger" => f_mutual_information(&joint, &FKind::SquaredHellinger)?,
        "hellinger-p" => {
            let p = args.p.ok_or_else(|| {
                Error::InvalidParameter("--p is required for hellinger-p".into())
            })?;
            f_mutual_information(&joint, &FKind::HellingerP(p))?
        }
        other => {
            if let Some(rest) = other.strip_prefix("beta-max-info:") {
                let beta: f64 = rest.parse().map_err(|_| {
                    Error::InvalidParameter(format!("cannot parse beta in {other:?}"))
                })?;
                beta_approx_max_information(&joint, in_unit(beta, "beta")?)?
            } else {
                return Err(Error::InvalidParameter(format!(
                    "unknown measure kind {other:?}"
                )));
            }
        }
    };
    let (value, unit) = convert_units(value, bits);
    Ok(serde_json::json!({
        "schema": SCHEMA,
        "kind": kind,
        "alpha": args.alpha,
        "p": args.p,
        "value": json_f64(value),
        "unit": unit,
    }))
}

fn convert_units(value: f64, bits: bool) -> (f64, &'static str) {
    if bits {
        (value / std::f64::consts::LN_2, "bits")
    } else {
        (value, "nats")
    }
}

fn resolve_event(spec: &str, joint: &JointDist) -> Result<Event, Error> {
    let (nx, ny) = (joint.nx(), joint.ny());
    match spec {
        "diagonal" => {
            if nx != ny {
                return Err(Error::ShapeMismatch {
                    expected: (nx, nx),
                    found: (nx, ny),
                });
            }
            Ok(Event::diagonal(nx))
        }
        "full" => Ok(Event::full(nx, ny)),
        other => {
            if let Some(rest) = other.strip_prefix("threshold:") {
                let eta: f64 = rest.parse().map_err(|_| {
                    Error::InvalidParameter(format!("cannot parse threshold in {other:?}"))
                })?;
                let parse = |s: &String| -> Result<f64, Error> {
                    s.parse().map_err(|_| {
                        Error::InvalidParameter(format!(
                            "threshold events need numeric labels, got {s:?}"
                        ))
                    })
                };
                let xs: Vec<f64> = joint.x_labels().iter().map(parse).collect::<Result<_, _>>()?;
                let ys: Vec<f64> = joint.y_labels().iter().map(parse).collect::<Result<_, _>>()?;
                Ok(Event::from_fn(nx, ny, |x, y| (xs[x] - ys[y]).abs() > eta))
            } else {
                let text = std::fs::read_to_string(other).map_err(|e| {
                    Error::InvalidParameter(format!("cannot read event {other:?}: {e}"))
                })?;
                Event::from_json_str(&text, nx, ny)
            }
        }
    }
}

fn bound(args: &BoundArgs) -> Result<serde_json::Value, Error> {
    let joint = load_joint(&args.joint)?;
    let event = resolve_event(&args.event, &joint)?;
    let (family, param) = match args.family.split_once(':') {
        Some((f, p)) => (f, Some(p)),
        None => (args.family.as_str(), None),
    };
    let report = match family {
        "ml" => ml_bound(&joint, &event)?,
        "sibson" => sibson_bound(&joint, &event, parse_alpha(&args.alpha, "sibson")?)?,
        "alpha-div" => alpha_div_bound(&joint, &event, finite_alpha(&args.alpha, "alpha-div")?)?,
        "four-param" => {
            let alpha = finite_alpha(&args.alpha, "four-param")?;
            let alpha_prime = match param {
                Some(s) => s.parse().map_err(|_| {
                    Error::InvalidParameter(format!("cannot parse alpha_prime in {:?}", args.family))
                })?,
                None => alpha,
            };
            four_param_bound(&joint, &event, alpha, alpha_prime)?
        }
        "hellinger-p" => {
            let p = args.p.ok_or_else(|| {
                Error::InvalidParameter("--p is required for hellinger-p".into())
            })?;
            hellinger_p_bound(&joint, &event, p)?
        }
        "hellinger-sq" => hellinger_sq_bound(&joint, &event)?,
        "fdiv" => {
            let gen = match param {
                Some("squared-hellinger") => FdivGenerator::squared_hellinger(),
                Some("hellinger-p") | None => {
                    let p = args.p.ok_or_else(|| {
                        Error::InvalidParameter("--p is required for fdiv:hellinger-p".into())
                    })?;
                    FdivGenerator::hellinger_p(p)?
                }
                Some(other) => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown fdiv generator {other:?}"
                    )))
                }
            };
            leakage_core::bounds::fdiv_bound(&joint, &event, &gen)?
        }
        "theorem2" => {
            let psi = OrliczFn::from_registry(param.ok_or_else(|| {
                Error::InvalidParameter("theorem2 needs a psi name, e.g. theorem2:power:alpha=2".into())
            })?)?;
            theorem2_bound(&joint, &event, &psi)?
        }
        "theorem1" => {
            let spec = param.ok_or_else(|| {
                Error::InvalidParameter(
                    "theorem1 needs phi,psi names, e.g. theorem1:power:alpha=2,power:alpha=2".into(),
                )
            })?;
            let (phi, psi) = spec.split_once(',').ok_or_else(|| {
                Error::InvalidParameter("theorem1 expects two comma-separated registry names".into())
            })?;
            theorem1_bound(&joint, &event, &OrliczFn::from_registry(phi)?, &OrliczFn::from_registry(psi)?)?
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown bound family {other:?}"
            )))
        }
    };
    Ok(report.to_json())
}

fn mechanism(args: &MechanismArgs, bits: bool) -> Result<serde_json::Value, Error> {
    let (lo, hi) = args
        .range
        .split_once(',')
        .ok_or_else(|| Error::InvalidParameter("--range expects \"lo,hi\"".into()))?;
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("cannot parse range start {lo:?}")))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("cannot parse range end {hi:?}")))?;
    let noise = match args.noise.as_str() {
        "laplace" => NoiseKind::Laplace { b: args.scale },
        "gaussian" => NoiseKind::Gaussian { sigma: args.scale },
        "exponential" => NoiseKind::Exponential { b: args.scale },
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown noise kind {other:?}"
            )))
        }
    };
    let spec = MechanismSpec::new(lo, hi, noise)?;
    let leakage = additive_noise_leakage(&spec);
    let mut value = serde_json::json!({
        "schema": SCHEMA,
        "noise": args.noise,
        "range": [lo, hi],
        "scale": args.scale,
        "formula": leakage_formula(&spec),
        "provenance_note": provenance_note(&spec),
    });
    if bits {
        value["leakage_bits"] = json_f64(leakage / std::f64::consts::LN_2);
    } else {
        value["leakage_nats"] = json_f64(leakage);
    }
    Ok(value)
}

fn compose(args: &ComposeArgs) -> Result<serde_json::Value, Error> {
    let mut ledger = CompositionLedger::new();
    for (i, part) in args.steps.split(',').enumerate() {
        let step: f64 = part.trim().parse().map_err(|_| {
            Error::InvalidParameter(format!("cannot parse step {i} in {:?}", args.steps))
        })?;
        ledger = ledger.compose(step, &format!("step{i}"))?;
    }
    let sigma = budget_significance(&ledger, args.delta)?;
    Ok(serde_json::json!({
        "schema": SCHEMA,
        "steps": ledger.steps().iter().map(|s| s.leakage_bound).collect::<Vec<_>>(),
        "total_nats": ledger.total(),
        "delta": args.delta,
        "adjusted_significance": sigma,
    }))
}

fn experiment(args: &ExperimentArgs) -> Result<serde_json::Value, Error> {
    if args.name != "noisy-erm" {
        return Err(Error::InvalidParameter(format!(
            "unknown experiment {:?}; available: noisy-erm",
            args.name
        )));
    }
    let mut cfg = ExperimentConfig::uniform_binary(args.n, args.k, args.trials, args.seed);
    if let Some(grid) = &args.eta {
        let mut etas = Vec::new();
        for part in grid.split(',') {
            let eta: f64 = part.trim().parse().map_err(|_| {
                Error::InvalidParameter(format!("cannot parse eta grid {grid:?}"))
            })?;
            etas.push(in_unit(eta, "eta")?);
        }
        cfg.eta_grid = etas;
    }
    let report = noisy_erm_experiment(&cfg)?;
    Ok(serde_json::to_value(report).expect("serializable report"))
}
