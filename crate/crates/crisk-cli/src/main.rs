//! `crisk` — run conditional risk analyses on scenario files.
//!
//! Every subcommand reads a scenario (`--scenario file.json`), runs one
//! operation, and writes a run report as JSON (default) or a human table.
//! Exit codes: 0 success, 2 validation error, 3 solver non-convergence,
//! 4 property-check failure.

use clap::{Parser, Subcommand, ValueEnum};
use crisk::diagnostics::{
    fatou_lebesgue_harness, james_check, james_perturbed_check, simons_check, BlockFn, BlockSet,
    Halfspace, PerturbationSpec, ProperConvexBlockFn, SigmaConvexSampling, SimonsFlag,
    SimonsInstance,
};
use crisk::duality::{attainment_check_with, conjugate, represent, DualVariable};
use crisk::risk::check_axioms_with;
use crisk::scenario::{
    consolidated_report, load_scenario, RunReport, Scenario, Timing, Tolerances,
};
use crisk::{Error, RandomVariable};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

const EXIT_VALIDATION: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_PROPERTY: u8 = 4;

#[derive(Parser)]
#[command(
    name = "crisk",
    version,
    about = "Conditional risk measures, duality and compactness diagnostics on finite spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario file (JSON).
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,

    /// Output path, or `-` for stdout.
    #[arg(long, global = true, default_value = "-")]
    out: String,

    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Base tolerance; per-check tolerances are documented multiples of it.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum PerturbedKind {
    /// Indicator of the named polytope (H-representation required).
    Indicator,
    /// The blockwise L1 norm, restricted to the polytope when one is given.
    Norm1,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a measure at a position.
    Eval {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        position: String,
    },
    /// Fenchel conjugate of a measure at a dual candidate (a named position
    /// read as the density y).
    Conjugate {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        dual: String,
    },
    /// Robust representation: value, maximizer and gap per block.
    Represent {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        position: String,
    },
    /// Attainment of the representation supremum, with certificates.
    Attain {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        position: String,
    },
    /// Randomized risk-measure axiom suite.
    Axioms {
        #[arg(long)]
        measure: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Supremum attainment over a polytope versus its compactness.
    James {
        #[arg(long)]
        polytope: String,
        /// Position names used as functionals (default: all positions).
        #[arg(long = "functional")]
        functionals: Vec<String>,
    },
    /// Perturbed attainment for a proper convex block function.
    JamesPerturbed {
        /// Polytope used as the function's domain.
        #[arg(long)]
        polytope: Option<String>,
        #[arg(long, value_enum, default_value_t = PerturbedKind::Indicator)]
        kind: PerturbedKind,
        #[arg(long = "functional")]
        functionals: Vec<String>,
    },
    /// Sup-limsup equality check on an instance file.
    Simons {
        /// Instance file (JSON): domain size, prefix/cycle tables, subset.
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_support: usize,
        #[arg(long, default_value_t = 4)]
        grid_steps: usize,
        #[arg(long = "tail-ratio")]
        tail_ratios: Vec<f64>,
    },
    /// Fatou/Lebesgue continuity harness along convergent sequences.
    Fatou {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        position: String,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
    /// Consolidated report over every (measure, position) pair.
    Report {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli, start) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(classify(&err))
        }
    }
}

fn classify(err: &Error) -> u8 {
    match err {
        Error::SolverNonConvergence { .. } | Error::InfeasiblePenalty { .. } => EXIT_SOLVER,
        _ => EXIT_VALIDATION,
    }
}

fn require_scenario(cli: &Cli) -> Result<(Scenario, String), Error> {
    let path = cli.scenario.as_ref().ok_or_else(|| Error::Validation {
        field: "scenario",
        index: None,
        message: "--scenario <path> is required".into(),
    })?;
    Ok((load_scenario(path)?, path.display().to_string()))
}

fn functionals_by_name(
    scenario: &Scenario,
    names: &[String],
) -> Result<(Vec<String>, Vec<RandomVariable>), Error> {
    if names.is_empty() {
        Ok((
            scenario.positions.keys().cloned().collect(),
            scenario.positions.values().cloned().collect(),
        ))
    } else {
        let mut fs = Vec::with_capacity(names.len());
        for name in names {
            fs.push(scenario.position(name)?.clone());
        }
        Ok((names.to_vec(), fs))
    }
}

/// Runs the command; `Ok(code)` carries the exit code, report written.
fn run(cli: &Cli, start: Instant) -> Result<u8, Error> {
    let tolerances = Tolerances::from_base(cli.tol);
    let (scenario, scenario_path) = require_scenario(cli)?;
    let (results, code) = dispatch(cli, &scenario, &tolerances)?;
    let report = RunReport {
        command: std::env::args().skip(1).collect::<Vec<_>>().join(" "),
        scenario: scenario_path,
        seed: cli.seed,
        tolerances,
        results,
        timing: Timing::since(start),
    };
    let rendered = match cli.format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            text
        }
        Format::Table => render_table(&serde_json::to_value(&report)?),
    };
    if cli.out == "-" {
        print!("{rendered}");
    } else {
        std::fs::write(&cli.out, rendered)?;
    }
    Ok(code)
}

fn dispatch(
    cli: &Cli,
    scenario: &Scenario,
    tolerances: &Tolerances,
) -> Result<(serde_json::Value, u8), Error> {
    let space = &scenario.space;
    match &cli.command {
        Command::Eval { measure, position } => {
            let value = scenario
                .measure(measure)?
                .eval(scenario.position(position)?, space)?;
            Ok((
                serde_json::json!({
                    "measure": measure,
                    "position": position,
                    "value": value,
                }),
                0,
            ))
        }
        Command::Conjugate { measure, dual } => {
            let candidate = DualVariable::new(scenario.position(dual)?.clone());
            let admissible = candidate.admissible_blocks(space)?;
            let value = conjugate(scenario.measure(measure)?, &candidate, space)?;
            Ok((
                serde_json::json!({
                    "measure": measure,
                    "dual": dual,
                    "admissible": admissible,
                    "conjugate": value,
                }),
                0,
            ))
        }
        Command::Represent { measure, position } => {
            let result = represent(
                scenario.measure(measure)?,
                scenario.position(position)?,
                space,
            )?;
            let gap_ok = result.gap.max_abs() <= tolerances.represent_gap;
            Ok((
                serde_json::json!({
                    "measure": measure,
                    "position": position,
                    "value": result.value,
                    "maximizer": result.maximizer,
                    "gap": result.gap,
                    "gap_tolerance": tolerances.represent_gap,
                    "gap_ok": gap_ok,
                    "iterations": result.iterations,
                    "certificates": result.certificates,
                }),
                if gap_ok { 0 } else { EXIT_PROPERTY },
            ))
        }
        Command::Attain { measure, position } => {
            let report = attainment_check_with(
                scenario.measure(measure)?,
                scenario.position(position)?,
                space,
                tolerances.attainment,
            )?;
            let all = report.attained.iter().all(|&b| b);
            Ok((
                serde_json::json!({
                    "measure": measure,
                    "position": position,
                    "attained": report.attained,
                    "residual": report.residual,
                    "tolerance": report.tolerance,
                    "witness": report.witness,
                    "certificates": report.certificates,
                }),
                if all { 0 } else { EXIT_PROPERTY },
            ))
        }
        Command::Axioms { measure, trials } => {
            let report = check_axioms_with(
                scenario.measure(measure)?,
                space,
                *trials,
                cli.seed,
                &tolerances.axiom_tolerances(),
            )?;
            let pass = report.all_pass();
            Ok((
                serde_json::to_value(&report)?,
                if pass { 0 } else { EXIT_PROPERTY },
            ))
        }
        Command::James {
            polytope,
            functionals,
        } => {
            let (names, fs) = functionals_by_name(scenario, functionals)?;
            let report = james_check(scenario.polytope(polytope)?, &fs, space)?;
            let consistent = report.verdict_consistent;
            Ok((
                serde_json::json!({
                    "polytope": polytope,
                    "functionals": names,
                    "report": report,
                }),
                if consistent { 0 } else { EXIT_PROPERTY },
            ))
        }
        Command::JamesPerturbed {
            polytope,
            kind,
            functionals,
        } => {
            let (names, fs) = functionals_by_name(scenario, functionals)?;
            let domain_of = |name: &String| -> Result<Vec<Vec<Halfspace>>, Error> {
                scenario
                    .polytope(name)?
                    .sets()
                    .iter()
                    .enumerate()
                    .map(|(k, set)| match set {
                        BlockSet::Halfspaces(hs) => Ok(hs.clone()),
                        BlockSet::Vertices(_) => Err(Error::Validation {
                            field: "polytopes",
                            index: Some(k),
                            message: format!(
                                "polytope `{name}`: block {k} is vertex-represented; \
                                 the perturbed check needs halfspaces"
                            ),
                        }),
                    })
                    .collect()
            };
            let blocks = match kind {
                PerturbedKind::Indicator => {
                    let name = polytope.as_ref().ok_or_else(|| Error::Validation {
                        field: "polytope",
                        index: None,
                        message: "--polytope is required for the indicator kind".into(),
                    })?;
                    domain_of(name)?
                        .into_iter()
                        .enumerate()
                        .map(|(k, hs)| BlockFn::indicator(hs, space.algebra().block(k).len()))
                        .collect()
                }
                PerturbedKind::Norm1 => {
                    let domains = match polytope {
                        Some(name) => domain_of(name)?,
                        None => vec![Vec::new(); space.m()],
                    };
                    domains
                        .into_iter()
                        .enumerate()
                        .map(|(k, domain)| {
                            let mut f = BlockFn::l1_norm(space.algebra().block(k).len());
                            f.domain = domain;
                            f
                        })
                        .collect()
                }
            };
            let f = ProperConvexBlockFn::new(space, blocks)?;
            let report = james_perturbed_check(&f, &fs, space)?;
            let consistent = report.consistent;
            Ok((
                serde_json::json!({
                    "polytope": polytope,
                    "functionals": names,
                    "report": report,
                }),
                if consistent { 0 } else { EXIT_PROPERTY },
            ))
        }
        Command::Simons {
            instance,
            max_support,
            grid_steps,
            tail_ratios,
        } => {
            let text = std::fs::read_to_string(instance)?;
            let instance: SimonsInstance = serde_json::from_str(&text)?;
            let mut sampling = SigmaConvexSampling {
                max_support: *max_support,
                grid_steps: *grid_steps,
                ..Default::default()
            };
            if !tail_ratios.is_empty() {
                sampling.tail_ratios = tail_ratios.clone();
            }
            let report = simons_check(&instance, &sampling, space)?;
            let code = match report.flag {
                SimonsFlag::TheoremViolation => EXIT_PROPERTY,
                _ => 0,
            };
            Ok((serde_json::to_value(&report)?, code))
        }
        Command::Fatou {
            measure,
            position,
            scale,
        } => {
            let spec = PerturbationSpec {
                scale: *scale,
                ..Default::default()
            };
            let report = fatou_lebesgue_harness(
                scenario.measure(measure)?,
                scenario.position(position)?,
                &spec,
                space,
            )?;
            let pass = report.pass;
            Ok((
                serde_json::json!({
                    "measure": measure,
                    "position": position,
                    "report": report,
                }),
                if pass { 0 } else { EXIT_PROPERTY },
            ))
        }
        Command::Report { trials } => {
            let report = consolidated_report(scenario, *trials, cli.seed, tolerances);
            let mut code = 0u8;
            for axioms in &report.axioms {
                match (&axioms.report, &axioms.error) {
                    (Some(r), _) if !r.all_pass() => code = code.max(EXIT_PROPERTY),
                    (_, Some(_)) => code = code.max(EXIT_VALIDATION),
                    _ => {}
                }
            }
            for pair in &report.pairs {
                if pair.error.is_some() {
                    code = code.max(EXIT_VALIDATION);
                }
                if let Some(r) = &pair.represent {
                    if !r.gap_ok {
                        code = code.max(EXIT_PROPERTY);
                    }
                }
                if let Some(a) = &pair.attainment {
                    if !a.attained.iter().all(|&b| b) {
                        code = code.max(EXIT_PROPERTY);
                    }
                }
            }
            Ok((serde_json::to_value(&report)?, code))
        }
    }
}

/// Lossy human-readable rendering of the JSON report.
fn render_table(value: &serde_json::Value) -> String {
    let mut out = String::new();
    render_value(value, 0, None, &mut out);
    out
}

fn render_value(value: &serde_json::Value, indent: usize, key: Option<&str>, out: &mut String) {
    use serde_json::Value;
    let pad = "  ".repeat(indent);
    let label = key.map(|k| format!("{k}: ")).unwrap_or_default();
    match value {
        Value::Object(map) => {
            if let Some(k) = key {
                out.push_str(&format!("{pad}{k}:\n"));
            }
            for (k, v) in map {
                render_value(v, indent + usize::from(key.is_some()), Some(k), out);
            }
        }
        Value::Array(items) if items.iter().all(|v| !v.is_object() && !v.is_array()) => {
            let inline: Vec<String> = items.iter().map(render_scalar).collect();
            out.push_str(&format!("{pad}{label}[{}]\n", inline.join(", ")));
        }
        Value::Array(items) => {
            out.push_str(&format!("{pad}{label}\n"));
            for (i, item) in items.iter().enumerate() {
                let slot = format!("[{i}]");
                render_value(item, indent + 1, Some(&slot), out);
            }
        }
        scalar => {
            out.push_str(&format!("{pad}{label}{}\n", render_scalar(scalar)));
        }
    }
}

fn render_scalar(value: &serde_json::Value) -> String {
    match value {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
