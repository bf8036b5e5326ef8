use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use debris_linker::classical::{gibbs_from_track, keplerian_integrals_link};
use debris_linker::coplanar::correct_track;
use debris_linker::linkage::{newton_solve, LinkageOptions, LinkageSolution, Method};
use debris_linker::radar::{interpolate_track, parse_attributable, parse_track, write_attributable, write_track};
use debris_linker::scenario::{run_scenario, ElementsRecord, MethodName, Scenario};
use debris_linker::{Error, MU_EARTH};

const EXIT_NO_SOLUTION: u8 = 2;
const EXIT_BAD_INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "debris-linker", version, about = "Preliminary orbits from pairs of short radar tracks")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Records,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the two noisy tracks of the first trial of a scenario.
    Simulate {
        /// Scenario file; the built-in reference scenario when omitted.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for track1.txt and track2.txt.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Reduce a track file to an attributable (JSON).
    Interpolate {
        track: PathBuf,
        /// Move the lines of sight onto the fitted orbit plane first.
        #[arg(long)]
        coplanar: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Link two attributable files.
    Link {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, default_value = "infang-quadratic")]
        method: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Gibbs orbit from observations 1, 2 and 4 of a track file.
    Gibbs {
        track: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a Monte Carlo scenario and write the comparison report.
    Run {
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Restrict to these methods (repeatable).
        #[arg(long)]
        method: Vec<String>,
        #[arg(long)]
        coplanar: bool,
        /// Directory for the report; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    BadInput(String),
    NoSolution(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. }
            | Error::InvalidInput(_)
            | Error::Io(_)
            | Error::DegenerateTimes
            | Error::TooFewObservations { .. }
            | Error::PolarSingularity { .. } => Failure::BadInput(e.to_string()),
            other => Failure::NoSolution(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::BadInput(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::BadInput(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| Failure::BadInput(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_scenario(path: Option<&Path>, seed: Option<u64>) -> Result<Scenario, Failure> {
    let mut sc = match path {
        Some(p) => Scenario::from_toml(&read(p)?)?,
        None => Scenario::reference(),
    };
    if let Some(s) = seed {
        sc.seed = s;
    }
    Ok(sc)
}

#[derive(Serialize)]
struct SolutionRecord {
    method: String,
    branch: Option<String>,
    preferred: bool,
    iterations: usize,
    residual: f64,
    delta_deg: [f64; 4],
    l_score: f64,
    consistency: f64,
    elements: [ElementsRecord; 2],
}

impl From<&LinkageSolution> for SolutionRecord {
    fn from(s: &LinkageSolution) -> Self {
        SolutionRecord {
            method: s.method.name().into(),
            branch: s.branch.map(|b| b.to_string()),
            preferred: s.preferred,
            iterations: s.iterations,
            residual: s.residual_norm,
            delta_deg: s.delta.to_vec().map(f64::to_degrees).into(),
            l_score: s.l_score,
            consistency: s.consistency,
            elements: [ElementsRecord::from(&s.elements[0]), ElementsRecord::from(&s.elements[1])],
        }
    }
}

fn elements_line(e: &ElementsRecord) -> String {
    format!(
        "{}\t{:.4}\t{:.6}\t{:.4}\t{:.4}\t{:.4}\t{:.4}",
        e.epoch, e.a_km, e.e, e.i_deg, e.raan_deg, e.argp_deg, e.mean_anomaly_deg
    )
}

fn render_solutions(sols: &[SolutionRecord], format: Format) -> String {
    let mut s = String::new();
    match format {
        Format::Records => {
            for r in sols {
                s.push_str(&serde_json::to_string(r).expect("record serialises"));
                s.push('\n');
            }
        }
        Format::Table => {
            let _ = writeln!(s, "method\tbranch\tpreferred\titer\tresidual\tepoch_mjd\ta_km\te\tI\tOmega\tomega\tell");
            for r in sols {
                let _ = writeln!(
                    s,
                    "{}\t{}\t{}\t{}\t{:.3e}\t{}",
                    r.method,
                    r.branch.as_deref().unwrap_or("-"),
                    r.preferred,
                    r.iterations,
                    r.residual,
                    elements_line(&r.elements[0])
                );
            }
        }
    }
    s
}

fn run(cli: Cli) -> Result<(), Failure> {
    let format = cli.format;
    match cli.command {
        Command::Simulate { scenario, seed, out } => {
            let sc = load_scenario(scenario.as_deref(), seed)?;
            sc.validate()?;
            let tracks = sc.noisy_tracks(0, 0)?;
            for (i, t) in tracks.iter().enumerate() {
                let path = out.join(format!("track{}.txt", i + 1));
                write(&path, &write_track(t))?;
                println!("{}", path.display());
            }
        }
        Command::Interpolate { track, coplanar, out } => {
            let mut t = parse_track(&read(&track)?)?;
            if coplanar {
                t = correct_track(&t)?.0;
            }
            emit(out.as_deref(), &write_attributable(&interpolate_track(&t)?))?;
        }
        Command::Link { first, second, method, out } => {
            let a1 = parse_attributable(&read(&first)?)?;
            let a2 = parse_attributable(&read(&second)?)?;
            let m: MethodName = method.parse()?;
            let opts = LinkageOptions::default();
            let (sols, why) = match m {
                MethodName::InfangLinear | MethodName::InfangQuadratic => {
                    let which = if m == MethodName::InfangLinear { Method::Linear } else { Method::Quadratic };
                    let outcome = newton_solve(&a1, &a2, which, &opts)?;
                    let why: Vec<String> = outcome
                        .failures
                        .iter()
                        .map(|f| format!("{} {}: {}", f.method.name(), f.branch.map(|b| b.to_string()).unwrap_or_default(), f.error))
                        .collect();
                    (outcome.solutions, why.join("; "))
                }
                MethodName::Ki => (keplerian_integrals_link(&a1, &a2, MU_EARTH)?, String::new()),
                MethodName::Gibbs => return Err(Failure::BadInput("gibbs works on a track file; use the gibbs subcommand".into())),
            };
            if sols.is_empty() {
                return Err(Failure::NoSolution(if why.is_empty() { "no solution".into() } else { why }));
            }
            let recs: Vec<SolutionRecord> = sols.iter().map(SolutionRecord::from).collect();
            emit(out.as_deref(), &render_solutions(&recs, format))?;
        }
        Command::Gibbs { track, out } => {
            let t = parse_track(&read(&track)?)?;
            let (_, el) = gibbs_from_track(&t, MU_EARTH)?;
            let rec = ElementsRecord::from(&el);
            let text = match format {
                Format::Records => serde_json::to_string(&rec).expect("record serialises") + "\n",
                Format::Table => format!("epoch_mjd\ta_km\te\tI\tOmega\tomega\tell\n{}\n", elements_line(&rec)),
            };
            emit(out.as_deref(), &text)?;
        }
        Command::Run { scenario, seed, method, coplanar, out } => {
            let mut sc = load_scenario(scenario.as_deref(), seed)?;
            if !method.is_empty() {
                sc.methods = method.iter().map(|m| m.parse()).collect::<Result<_, _>>()?;
            }
            sc.coplanar |= coplanar;
            let report = run_scenario(&sc)?;
            let (name, text) = match format {
                Format::Table => ("report.txt", report.to_table()),
                Format::Records => ("report.jsonl", report.to_records()),
            };
            match out {
                Some(dir) => {
                    write(&dir.join(name), &text)?;
                    print!("{}", report.summary_table());
                }
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DEBRIS_LINKER_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_BAD_INPUT) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::BadInput(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_BAD_INPUT)
        }
        Err(Failure::NoSolution(m)) => {
            eprintln!("no solution: {m}");
            ExitCode::from(EXIT_NO_SOLUTION)
        }
    }
}
