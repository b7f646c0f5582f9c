use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use expobs_core::algebra::{conjugacy_invariance_report, law_suite, Conjugacy};
use expobs_core::circle::{
    analyze_rotation_case, certify_with, interval_pipeline, rotation_number, verify,
    verify_with_delta, wandering_intervals, Certificate, PLCircleMap, PLIntervalMap, DEFAULT_N_MAX,
    DEFAULT_Q_MAX,
};
use expobs_core::relation::{indistinguishability_quotient, OrbitDistanceTable};
use expobs_core::report::{analyze, AnalysisRequest};
use expobs_core::scalar::{format_scalar, parse_scalar, ExactScalar};
use expobs_core::symbolic::{
    check_ball_inclusion, find_asymptotic_pair, obs_stable_equiv, stable_equiv, sym_distance,
    Alphabet, CylinderObservable, EPPoint, EPPointDoc, Side, Subshift,
};
use expobs_core::{FiniteSystem, Observable};

/// Exact analysis of expansive observables.
#[derive(Parser, Debug)]
#[command(name = "expobs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full report for a finite system.
    Analyze(AnalyzeArgs),
    /// `δ*` of an observable, or `e*` when none is given.
    Dstar(DstarArgs),
    /// Indistinguishability blocks at a threshold.
    Quotient(QuotientArgs),
    /// Seeded subalgebra and power-law suite.
    Laws(LawsArgs),
    /// Transport of expansivity constants along a conjugacy.
    Conjugacy(ConjugacyArgs),
    /// Shift-space engine.
    #[command(subcommand)]
    Symbolic(SymbolicCommand),
    /// Piecewise-linear circle homeomorphisms.
    #[command(subcommand)]
    Circle(CircleCommand),
    /// Piecewise-linear interval homeomorphisms.
    #[command(subcommand)]
    Interval(IntervalCommand),
    /// SVG figure from an `analyze` report.
    Plot(PlotArgs),
}

#[derive(Args, Debug)]
struct Output {
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[arg(long)]
    system: PathBuf,
    /// Observable file; repeat for several. The file stem names the observable.
    #[arg(long = "observable")]
    observables: Vec<PathBuf>,
    /// Resolution `h` as "p/q"; defaults to the mesh.
    #[arg(long)]
    resolution: Option<String>,
    /// Quotient threshold as "p/q"; repeatable, defaults to `h`.
    #[arg(long = "threshold")]
    thresholds: Vec<String>,
    /// Recorded in the provenance block.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct DstarArgs {
    #[arg(long)]
    system: PathBuf,
    #[arg(long)]
    observable: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct QuotientArgs {
    #[arg(long)]
    system: PathBuf,
    #[arg(long)]
    threshold: String,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct LawsArgs {
    #[arg(long)]
    system: PathBuf,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ConjugacyArgs {
    /// `{ "source": system, "target": system, "h": { y: x } }`.
    #[arg(long)]
    conjugacy: PathBuf,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Subcommand, Debug)]
enum SymbolicCommand {
    /// Search an asymptotic pair in a subshift of finite type.
    Pair {
        #[arg(long)]
        subshift: PathBuf,
        #[arg(long, default_value_t = 8)]
        bound: usize,
    },
    /// Check that a dynamical ball lies in an observable stable set.
    Ball {
        /// Symbols of the alphabet, one character each.
        #[arg(long, default_value = "01")]
        alphabet: String,
        /// Point as inline JSON or a file.
        #[arg(long)]
        point: String,
        /// Cylinder observable as inline JSON or a file.
        #[arg(long)]
        observable: String,
        #[arg(long)]
        epsilon: String,
        #[arg(long, default_value = "s")]
        side: String,
        #[arg(long, default_value_t = 8)]
        bound: usize,
    },
    /// Stable-set membership of `y` relative to `x`.
    Stable {
        #[arg(long, default_value = "01")]
        alphabet: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value = "s")]
        side: String,
        #[arg(long)]
        observable: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum CircleCommand {
    /// Build a non-pseudoexpansivity certificate.
    Certify {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        delta: String,
        #[arg(long, default_value_t = DEFAULT_Q_MAX)]
        q_max: u32,
        #[arg(long, default_value_t = DEFAULT_N_MAX)]
        n_max: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Replay a certificate; exits 2 on any violated inequality.
    Verify {
        #[arg(long)]
        cert: PathBuf,
        /// Replay against a different threshold.
        #[arg(long)]
        delta: Option<String>,
    },
    /// Rotation number and wandering components.
    Rotnum {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value_t = DEFAULT_Q_MAX)]
        q_max: u32,
    },
    /// Finite-grid analysis of a rigid rotation.
    Rigid {
        #[arg(long)]
        map: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum IntervalCommand {
    Certify {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        delta: String,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args, Debug)]
struct PlotArgs {
    #[arg(long)]
    report: PathBuf,
    #[command(flatten)]
    output: Output,
}

/// Whether every checked mathematical property held.
#[derive(Debug, PartialEq, Eq)]
enum Verdict {
    Holds,
    Violated,
}

impl Verdict {
    fn from(ok: bool) -> Self {
        if ok {
            Verdict::Holds
        } else {
            Verdict::Violated
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Inline JSON or a path to a JSON file.
fn json_arg(arg: &str) -> Result<String> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        read(Path::new(arg))
    }
}

fn scalar(text: &str, what: &str) -> Result<ExactScalar> {
    parse_scalar(text).with_context(|| format!("--{what} expects \"p/q\""))
}

fn emit_text(text: &str, output: Option<&Output>) -> Result<()> {
    match output.and_then(|o| o.out.as_ref()) {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit(value: &Value, output: Option<&Output>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit_text(&text, output)
}

fn load_system(path: &Path) -> Result<FiniteSystem> {
    FiniteSystem::parse(&read(path)?).with_context(|| format!("invalid system {}", path.display()))
}

fn load_observable(system: &FiniteSystem, path: &Path) -> Result<Observable> {
    Observable::parse(system, &read(path)?)
        .with_context(|| format!("invalid observable {}", path.display()))
}

fn point(alphabet: &Alphabet, arg: &str) -> Result<EPPoint> {
    let doc: EPPointDoc = serde_json::from_str(&json_arg(arg)?).context("invalid point")?;
    Ok(EPPoint::from_doc(alphabet, &doc)?)
}

fn alphabet(symbols: &str) -> Result<Alphabet> {
    Ok(Alphabet::new(symbols.chars().collect())?)
}

fn point_value(alphabet: &Alphabet, p: &EPPoint) -> Value {
    serde_json::to_value(p.to_doc(alphabet)).expect("points serialize")
}

fn run_analyze(args: &AnalyzeArgs) -> Result<Verdict> {
    let system = load_system(&args.system)?;
    let mut request = AnalysisRequest::new(system.clone());
    for path in &args.observables {
        let name = path.file_stem().map_or_else(
            || path.display().to_string(),
            |s| s.to_string_lossy().into_owned(),
        );
        request
            .observables
            .push((name, load_observable(&system, path)?));
    }
    request.resolution = args
        .resolution
        .as_deref()
        .map(|r| scalar(r, "resolution"))
        .transpose()?;
    request.thresholds = args
        .thresholds
        .iter()
        .map(|t| scalar(t, "threshold"))
        .collect::<Result<_>>()?;
    request.seed = args.seed;
    let report = analyze(&request)?;
    let periodic_ok = report["periodic"]
        .as_array()
        .into_iter()
        .flatten()
        .flat_map(|level| level["observables"].as_array().into_iter().flatten())
        .all(|o| o["flag_holds"] == true);
    emit(&report, Some(&args.output))?;
    Ok(Verdict::from(periodic_ok))
}

fn run_symbolic(cmd: &SymbolicCommand) -> Result<Verdict> {
    match cmd {
        SymbolicCommand::Pair { subshift, bound } => {
            let shift = Subshift::parse(&read(subshift)?)?;
            let (x, y) = find_asymptotic_pair(&shift, *bound)?;
            let a = shift.alphabet();
            emit(
                &json!({ "x": point_value(a, &x), "y": point_value(a, &y), "distance": format_scalar(&sym_distance(&x, &y)?) }),
                None,
            )?;
            Ok(Verdict::Holds)
        }
        SymbolicCommand::Ball {
            alphabet: symbols,
            point: p,
            observable,
            epsilon,
            side,
            bound,
        } => {
            let a = alphabet(symbols)?;
            let x = point(&a, p)?;
            let phi = CylinderObservable::parse(&a, &json_arg(observable)?)?;
            let side: Side = side.parse()?;
            let report =
                check_ball_inclusion(&x, &phi, &scalar(epsilon, "epsilon")?, side, *bound, &a)?;
            emit(&serde_json::to_value(&report)?, None)?;
            Ok(Verdict::from(report.passed))
        }
        SymbolicCommand::Stable {
            alphabet: symbols,
            x,
            y,
            side,
            observable,
        } => {
            let a = alphabet(symbols)?;
            let (x, y) = (point(&a, x)?, point(&a, y)?);
            let side: Side = side.parse()?;
            let mut out = json!({ "stable": stable_equiv(&x, &y, side)?, "distance": format_scalar(&sym_distance(&x, &y)?) });
            if let Some(obs) = observable {
                let phi = CylinderObservable::parse(&a, &json_arg(obs)?)?;
                out["observable_stable"] = json!(obs_stable_equiv(&x, &y, &phi, side)?);
            }
            emit(&out, None)?;
            Ok(Verdict::Holds)
        }
    }
}

fn print_checks(report: &expobs_core::circle::VerifyReport) {
    for check in &report.checks {
        let status = if check.passed { "ok  " } else { "FAIL" };
        eprintln!(
            "{status} {}{}",
            check.name,
            if check.detail.is_empty() {
                String::new()
            } else {
                format!(": {}", check.detail)
            }
        );
    }
}

fn run_circle(cmd: &CircleCommand) -> Result<Verdict> {
    match cmd {
        CircleCommand::Certify {
            map,
            delta,
            q_max,
            n_max,
            output,
        } => {
            let f = PLCircleMap::parse(&read(map)?)?;
            let cert = certify_with(&f, &scalar(delta, "delta")?, *q_max, *n_max)?;
            let report = verify(&cert)?;
            emit(&cert.to_value(), Some(output))?;
            Ok(Verdict::from(report.passed))
        }
        CircleCommand::Verify { cert, delta } => {
            let cert = Certificate::parse(&read(cert)?)?;
            let report = match delta {
                Some(d) => verify_with_delta(&cert, &scalar(d, "delta")?)?,
                None => verify(&cert)?,
            };
            print_checks(&report);
            emit(&serde_json::to_value(&report)?, None)?;
            Ok(Verdict::from(report.passed))
        }
        CircleCommand::Rotnum { map, q_max } => {
            let f = PLCircleMap::parse(&read(map)?)?;
            let out = match rotation_number(&f.lift, *q_max) {
                Some(r) => {
                    let mut out = json!({ "rotation_number": format_scalar(&r.value()), "p": r.p.to_string(), "q": r.q });
                    out["wandering"] = wandering_intervals(&f.lift, *q_max)?.to_value();
                    out
                }
                None => {
                    json!({ "rotation_number": null, "note": format!("no periodic orbit of period <= {q_max}") })
                }
            };
            emit(&out, None)?;
            Ok(Verdict::Holds)
        }
        CircleCommand::Rigid { map } => {
            let f = PLCircleMap::parse(&read(map)?)?;
            let report = analyze_rotation_case(&f.lift)?;
            emit(&serde_json::to_value(&report)?, None)?;
            Ok(Verdict::from(report.isometry && report.single_block))
        }
    }
}

fn run(cli: &Cli) -> Result<Verdict> {
    match &cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Dstar(args) => {
            let system = load_system(&args.system)?;
            let table = OrbitDistanceTable::new(&system);
            let out = match &args.observable {
                Some(path) => {
                    json!({ "delta_star": table.delta_star(&load_observable(&system, path)?)?.to_string() })
                }
                None => json!({ "e_star": format_scalar(&table.e_star()?) }),
            };
            emit(&out, None)?;
            Ok(Verdict::Holds)
        }
        Command::Quotient(args) => {
            let system = load_system(&args.system)?;
            let t = scalar(&args.threshold, "threshold")?;
            let q = indistinguishability_quotient(&system, &t);
            emit(
                &json!({ "threshold": format_scalar(&t), "blocks": q.labelled(&system) }),
                Some(&args.output),
            )?;
            Ok(Verdict::Holds)
        }
        Command::Laws(args) => {
            let system = load_system(&args.system)?;
            let report = law_suite(&system, args.seed, args.trials)?;
            emit(&serde_json::to_value(&report)?, Some(&args.output))?;
            Ok(Verdict::from(report.passed))
        }
        Command::Conjugacy(args) => {
            let c = Conjugacy::parse(&read(&args.conjugacy)?)?;
            let report = conjugacy_invariance_report(&c, args.seed, args.samples)?;
            emit(&serde_json::to_value(&report)?, Some(&args.output))?;
            Ok(Verdict::from(report.passed))
        }
        Command::Symbolic(cmd) => run_symbolic(cmd),
        Command::Circle(cmd) => run_circle(cmd),
        Command::Interval(IntervalCommand::Certify { map, delta, output }) => {
            let f = PLIntervalMap::parse(&read(map)?)?;
            let cert = interval_pipeline(&f, &scalar(delta, "delta")?)?;
            let report = verify(&cert)?;
            emit(&cert.to_value(), Some(output))?;
            Ok(Verdict::from(report.passed))
        }
        Command::Plot(args) => {
            let report: Value =
                serde_json::from_str(&read(&args.report)?).context("report is not JSON")?;
            if report.get("inputs").is_none() {
                bail!("{} is not an analyze report", args.report.display());
            }
            emit_text(&expobs_core::plot::render(&report)?, Some(&args.output))?;
            Ok(Verdict::Holds)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Verdict::Holds) => ExitCode::SUCCESS,
        Ok(Verdict::Violated) => {
            eprintln!("property violation");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
