//! `unifact`: generate instances, verify the law suites, classify to Fock
//! form.
//!
//! Exit codes: 0 success, 2 invalid input or capacity, 3 failed law or
//! certification.

mod instance;
mod report;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use unifact::{spectrum, Tolerance};

use instance::{Instance, UnitMode};
use report::Report;

#[derive(Parser)]
#[command(name = "unifact", version, about = "Boolean algebras of type I factors at desk scale")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum UnitArg {
    Product,
    #[value(alias = "random_multiplicative")]
    RandomMultiplicative,
}

#[derive(Subcommand)]
enum Command {
    /// Write an instance file for a site decomposition.
    Generate {
        /// Per-site dimensions, comma separated (each at least 2).
        #[arg(long, value_delimiter = ',', required = true)]
        sites: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Unit recipe stored in the instance.
        #[arg(long, value_enum, default_value = "product")]
        unit: UnitArg,
        /// Scramble the whole family by a seeded global unitary.
        #[arg(long)]
        conjugate_seed: Option<u64>,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run law suites against an instance and emit a JSON report.
    Verify {
        instance: PathBuf,
        /// Suite name or "all".
        #[arg(long, default_value = "all")]
        suite: String,
        /// Multiplicative factor applied to every tolerance.
        #[arg(long, default_value_t = 1.0)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify an instance onto discrete Fock form (discovering a unit
    /// first when the instance does not carry one).
    Classify {
        instance: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include the spectral eigenbases in the output.
        #[arg(long)]
        verbose: bool,
    },
}

/// Failure modes mapped onto the exit-code contract.
enum Failure {
    /// Unreadable or invalid input: exit 2.
    Input(String),
    /// A law failed or a certification error surfaced: exit 3.
    Law(String),
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Law(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Generate { sites, seed, unit, conjugate_seed, out } => {
            let inst = Instance {
                sites,
                unit_mode: Some(match unit {
                    UnitArg::Product => UnitMode::Product,
                    UnitArg::RandomMultiplicative => UnitMode::RandomMultiplicative,
                }),
                unit: None,
                conjugate_seed,
                seed,
            };
            // validate before writing: sites must build, units must certify
            let f = inst.build_factorization().map_err(input_err)?;
            let tol = Tolerance::default();
            let omega = inst.resolve_unit(&f).map_err(input_err)?.expect("mode set");
            unifact::UnitalSpec::new(f, omega, &tol).map_err(input_err)?;
            emit(&inst, out.as_deref()).map_err(input_err_io)?;
            Ok(())
        }
        Command::Verify { instance, suite, tol, out } => {
            let inst = load_instance(&instance)?;
            let tolerance = scaled_tol(tol)?;
            let names: Vec<&str> = if suite == "all" {
                suites::ALL_SUITES.to_vec()
            } else if suites::ALL_SUITES.contains(&suite.as_str()) {
                vec![suite.as_str()]
            } else {
                return Err(Failure::Input(format!(
                    "unknown suite '{suite}' (expected one of {:?} or \"all\")",
                    suites::ALL_SUITES
                )));
            };
            let started = Instant::now();
            let mut report = Report::new(inst.clone());
            for name in names {
                let suite = suites::run_suite(name, &inst, &tolerance)
                    .map_err(|e| Failure::Law(format!("suite {name}: {e}")))?;
                for check in &suite.checks {
                    eprintln!(
                        "{name}/{}: {} (deviation {:.3e})",
                        check.law,
                        if check.pass { "pass" } else { "FAIL" },
                        check.max_deviation
                    );
                }
                report.suites.push(suite);
            }
            report.wall_time = started.elapsed().as_secs_f64();
            let all_pass = report.all_pass();
            let failing = report.first_failing_law().map(str::to_string);
            emit(&report, out.as_deref()).map_err(input_err_io)?;
            if all_pass {
                Ok(())
            } else {
                Err(Failure::Law(format!(
                    "law '{}' failed",
                    failing.unwrap_or_default()
                )))
            }
        }
        Command::Classify { instance, tol, out, verbose } => {
            let inst = load_instance(&instance)?;
            let tolerance = scaled_tol(tol)?;
            let seed = inst.seed.wrapping_add(46);
            let (_, u) = inst.build_unital(&tolerance).map_err(law_err)?;
            let r = spectrum::spectral_resolution(&u, &tolerance).map_err(law_err)?;
            let cls = unifact::fock::classify_to_fock(&u, &r, seed, &tolerance).map_err(law_err)?;
            eprintln!(
                "legs {:?}, masses {:?}, conjugation deviation {:.3e}",
                cls.fock.leg_dims(),
                cls.fock.masses(),
                cls.conjugation_deviation
            );
            #[derive(Serialize)]
            struct ResolutionPoint {
                label: u32,
                dim: usize,
                mu: f64,
                #[serde(skip_serializing_if = "Option::is_none")]
                eigenbasis: Option<unifact::MatrixC>,
            }
            #[derive(Serialize)]
            struct ClassifyOutput {
                fock: unifact::FockSpace,
                unitary: unifact::MatrixC,
                vacuum_deviation: f64,
                exp_deviation: f64,
                conjugation_deviation: f64,
                resolution: Vec<ResolutionPoint>,
                instance: Instance,
            }
            let resolution = r
                .points()
                .iter()
                .map(|p| ResolutionPoint {
                    label: p.label,
                    dim: p.dim(),
                    mu: p.mu,
                    eigenbasis: verbose.then(|| p.basis.clone()),
                })
                .collect();
            let payload = ClassifyOutput {
                fock: cls.fock,
                unitary: cls.unitary,
                vacuum_deviation: cls.vacuum_deviation,
                exp_deviation: cls.exp_deviation,
                conjugation_deviation: cls.conjugation_deviation,
                resolution,
                instance: inst,
            };
            emit(&payload, out.as_deref()).map_err(input_err_io)?;
            Ok(())
        }
    }
}

fn load_instance(path: &std::path::Path) -> Result<Instance, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    let inst: Instance = serde_json::from_str(&text)
        .map_err(|e| Failure::Input(format!("invalid instance {}: {e}", path.display())))?;
    // early shape validation so bad instances exit 2, not 3
    inst.build_factorization().map_err(input_err)?;
    Ok(inst)
}

fn scaled_tol(factor: f64) -> Result<Tolerance, Failure> {
    if !factor.is_finite() || factor <= 0.0 {
        return Err(Failure::Input("tolerance factor must be positive".into()));
    }
    let t = Tolerance::default().scaled(factor);
    t.validate().map_err(input_err)?;
    Ok(t)
}

fn emit<T: Serialize>(value: &T, out: Option<&std::path::Path>) -> std::io::Result<()> {
    let json = serde_json::to_string_pretty(value).expect("serializable");
    match out {
        Some(path) => std::fs::write(path, json + "\n"),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn input_err(e: unifact::Error) -> Failure {
    Failure::Input(e.to_string())
}

fn input_err_io(e: std::io::Error) -> Failure {
    Failure::Input(e.to_string())
}

fn law_err(e: unifact::Error) -> Failure {
    Failure::Law(e.to_string())
}
