use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use grafting_core::complex::{build_complex, cycle_rank, BuildParams};
use grafting_core::schema::{parse_curve_spec, ConfigFile, StructureRecord};
use grafting_core::surface::{goldman_decompose, graft_along, validate_configuration, CheckedConfiguration, Curve};
use grafting_core::torus::{self, Mode, TorusClass};
use grafting_core::verify::{run_suite, Suite, SuiteParams};
use log::info;

#[derive(Parser)]
#[command(
    name = "grafting",
    version,
    about = "Exact grafting computations on surfaces with meridian charts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Torus homology arithmetic on classes written `p,q`.
    Torus {
        #[command(subcommand)]
        op: TorusOp,
    },
    /// Graft the configuration's structure along one curve.
    ///
    /// Curve syntax: `label@chart=p,q[@chart=p,q][:mult]`, for example
    /// `gamma@beta=1,-1`. A bare `label` is a curve missing every chart.
    Graft {
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        curve: String,
    },
    /// Enumerate the grafting complex around the configuration's structure.
    Complex {
        config: PathBuf,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 1)]
        twist_bound: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run an identity sweep.
    Verify {
        /// flatsharp, sharp_flat, dehn_twist, goldman, iterated, two_meridian or oracle
        #[arg(long)]
        suite: String,
        #[arg(long)]
        k_max: Option<i64>,
        #[arg(long, default_value_t = 5)]
        range: i64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Also write the report as JSON to this path.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Halve the real curves of a configuration into a grafting multicurve.
    Decompose { config: PathBuf },
}

#[derive(Subcommand)]
enum TorusOp {
    Intersect {
        #[arg(allow_hyphen_values = true)]
        a: TorusClass,
        #[arg(allow_hyphen_values = true)]
        b: TorusClass,
    },
    Resolve {
        #[arg(long)]
        mode: Mode,
        #[arg(allow_hyphen_values = true)]
        a: TorusClass,
        #[arg(allow_hyphen_values = true)]
        b: TorusClass,
    },
    Twist {
        #[arg(long, allow_hyphen_values = true)]
        about: TorusClass,
        #[arg(short = 'k', allow_hyphen_values = true)]
        k: i64,
        #[arg(allow_hyphen_values = true)]
        target: TorusClass,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

enum Failure {
    Domain(String),
    Input(String),
    Verification,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Input(_) => 2,
            Failure::Verification => 3,
        }
    }
}

fn load(path: &Path) -> Result<CheckedConfiguration, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let config = ConfigFile::from_json(&text)
        .and_then(ConfigFile::into_configuration)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    validate_configuration(&config).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_or_print(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn torus_op(op: TorusOp) -> Result<(), Failure> {
    let domain = |e: torus::TorusError| Failure::Domain(e.to_string());
    match op {
        TorusOp::Intersect { a, b } => println!(
            "geometric={} algebraic={}",
            torus::geometric_intersection(a, b),
            torus::algebraic_intersection(a, b)
        ),
        TorusOp::Resolve { mode, a, b } => println!("{}", torus::resolve(a, b, mode).map_err(domain)?),
        TorusOp::Twist { about, k, target } => {
            println!("{}", torus::dehn_twist(target, about, k).map_err(domain)?)
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Torus { op } => torus_op(op),
        Command::Graft { config, curve } => {
            let cfg = load(&config)?;
            let curve: Curve = parse_curve_spec(&curve).map_err(|e| Failure::Input(e.to_string()))?;
            let out = graft_along(cfg.model(), &cfg.seed(), &curve).map_err(|e| Failure::Domain(e.to_string()))?;
            println!("{}", StructureRecord::new(&out).to_json());
            Ok(())
        }
        Command::Complex {
            config,
            depth,
            twist_bound,
            format,
            output,
            threads,
        } => {
            let cfg = load(&config)?;
            let mut params = BuildParams::new(twist_bound, depth);
            params.threads = threads;
            let graph = build_complex(&cfg, &cfg.seed(), &params).map_err(|e| Failure::Domain(e.to_string()))?;
            let text = match format {
                Format::Dot => graph.to_dot(),
                Format::Json => graph.to_json() + "\n",
            };
            write_or_print(output.as_deref(), &text)?;
            let ranks = graph.ranks();
            let summary = format!(
                "vertices={} edges={} rank={} graft_rank={} elementary_rank={}",
                graph.vertices.len(),
                graph.edges.len(),
                cycle_rank(&graph),
                ranks.graft,
                ranks.elementary
            );
            if output.is_some() {
                println!("{summary}");
            } else {
                eprintln!("{summary}");
            }
            Ok(())
        }
        Command::Verify {
            suite,
            k_max,
            range,
            trials,
            seed,
            json,
        } => {
            let suite: Suite = suite
                .parse()
                .map_err(|e: grafting_core::VerifyError| Failure::Input(e.to_string()))?;
            if k_max.is_some_and(|k| k < 0) || range < 0 {
                return Err(Failure::Input("--k-max and --range must be nonnegative".into()));
            }
            let params = SuiteParams {
                k_max,
                range,
                trials,
                seed,
            };
            info!("running {suite}");
            let report = run_suite(suite, &params).map_err(|e| Failure::Domain(e.to_string()))?;
            print!("{}", report.to_text());
            if let Some(path) = json {
                write_or_print(Some(&path), &(report.to_json() + "\n"))?;
            }
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::Decompose { config } => {
            let cfg = load(&config)?;
            let sigma = goldman_decompose(cfg.lambda()).map_err(|e| Failure::Domain(e.to_string()))?;
            println!("{}", sigma.key());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("GRAFTING_LOG", "warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Domain(msg) | Failure::Input(msg) => eprintln!("error: {msg}"),
                Failure::Verification => eprintln!("verification failed"),
            }
            ExitCode::from(f.code())
        }
    }
}
