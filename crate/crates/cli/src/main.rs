use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use isbeam::config::{parse_override, Diagnostic, DiagnosticKind, FileConfig};
use isbeam::experiments::{
    gap_study, prop1_study, single_study, sweep_res, sweep_tx_antennas, timing_study, write_study, ResultTable, Study,
};
use isbeam::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_GUARD: u8 = 3;
const EXIT_RUNTIME: u8 = 4;

#[derive(Parser)]
#[command(
    name = "isbeam",
    version,
    about = "Passive beamforming simulation studies for IS-aided MIMO links"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a study and write its CSV and manifest.
    Run {
        #[command(flatten)]
        common: Common,
        /// Output directory.
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Check a configuration without running anything.
    Validate {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// TOML configuration; the reference scenario when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = StudyArg::Single)]
    study: StudyArg,
    /// Master seed (overrides `seed` in the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Measurement mode (overrides `experiment.mode`).
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Override a config key, e.g. `--set n=200` or `--set experiment.trials=5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StudyArg {
    Single,
    SweepM,
    SweepN,
    Gap,
    Prop1,
    Timing,
}

impl From<StudyArg> for Study {
    fn from(s: StudyArg) -> Study {
        match s {
            StudyArg::Single => Study::Single,
            StudyArg::SweepM => Study::SweepM,
            StudyArg::SweepN => Study::SweepN,
            StudyArg::Gap => Study::Gap,
            StudyArg::Prop1 => Study::Prop1,
            StudyArg::Timing => Study::Timing,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Expected,
    Sampled,
}

enum Failure {
    Config(String),
    Diagnostics(Vec<Diagnostic>),
    Runtime(Error),
}

impl Failure {
    fn report(&self) -> u8 {
        match self {
            Failure::Config(msg) => {
                eprintln!("error: {msg}");
                EXIT_CONFIG
            }
            Failure::Diagnostics(diags) => {
                for d in diags {
                    eprintln!("error: {d}");
                }
                if diags.iter().any(|d| d.kind == DiagnosticKind::Config) {
                    EXIT_CONFIG
                } else {
                    EXIT_GUARD
                }
            }
            Failure::Runtime(e) => {
                eprintln!("error: {e}");
                match e {
                    Error::BudgetExceeded { .. } => EXIT_GUARD,
                    Error::InvalidParameter { .. } | Error::Config(_) => EXIT_CONFIG,
                    _ => EXIT_RUNTIME,
                }
            }
        }
    }
}

fn load(common: &Common) -> Result<(FileConfig, Study), Failure> {
    let mut overrides = Vec::new();
    for text in &common.overrides {
        overrides.push(parse_override(text).map_err(|e| Failure::Config(e.to_string()))?);
    }
    if let Some(seed) = common.seed {
        overrides.push(parse_override(&format!("seed={seed}")).map_err(|e| Failure::Config(e.to_string()))?);
    }
    if let Some(mode) = common.mode {
        let name = match mode {
            ModeArg::Expected => "expected",
            ModeArg::Sampled => "sampled",
        };
        overrides.push(parse_override(&format!("experiment.mode={name}")).map_err(|e| Failure::Config(e.to_string()))?);
    }
    let cfg = FileConfig::load(common.config.as_deref(), &overrides).map_err(|e| Failure::Config(e.to_string()))?;
    Ok((cfg, common.study.into()))
}

fn checked(common: &Common) -> Result<(FileConfig, Study), Failure> {
    let (cfg, study) = load(common)?;
    let diags = cfg.diagnostics(study);
    if diags.is_empty() {
        Ok((cfg, study))
    } else {
        Err(Failure::Diagnostics(diags))
    }
}

fn print_summary(table: &ResultTable) {
    for r in table.rate_rows() {
        println!(
            "{:>6}  {:<20} {:>9.4} bit/s/Hz  (± {:.4}, {} trials)",
            r.sweep_value,
            r.algorithm.name(),
            r.rate.mean,
            r.rate.stderr,
            r.rate.count
        );
    }
    for r in table.gap_rows() {
        println!(
            "{:>6}  {:<20} C = {:.4}  C - lower = {:.4}  upper - C = {:.4}",
            r.n,
            r.algorithm.name(),
            r.capacity.mean,
            r.gap_lower.mean,
            r.gap_upper.mean
        );
    }
    for r in table.match_rows() {
        let t = r.samples.map_or_else(|| "inf".to_string(), |t| t.to_string());
        println!(
            "{t:>7}  {:<12} exact = {:.3}  per-element = {:.3}",
            r.mode, r.exact_match.mean, r.element_match.mean
        );
    }
    for r in table.timing_rows() {
        println!(
            "{:>6}  {:<20} {:.3e} s  (x{:.2})",
            r.n,
            r.algorithm.name(),
            r.median_s,
            r.ratio_to_first
        );
    }
}

fn run(common: &Common, out: &std::path::Path) -> Result<(), Failure> {
    let (cfg, study) = checked(common)?;
    let spec = cfg.spec(study).map_err(Failure::Runtime)?;
    let table = match study {
        Study::Single => single_study(&spec),
        Study::SweepM => sweep_tx_antennas(&spec),
        Study::SweepN => sweep_res(&spec),
        Study::Gap => gap_study(&spec),
        Study::Prop1 => prop1_study(&spec),
        Study::Timing => timing_study(&spec),
    }
    .map_err(Failure::Runtime)?;
    print_summary(&table);
    let manifest = write_study(out, study, &spec, &table).map_err(Failure::Runtime)?;
    for f in &manifest.files {
        println!("wrote {}", f.path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { common, out } => run(common, out),
        Command::Validate { common } => checked(common).map(|_| println!("ok")),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => ExitCode::from(f.report()),
    }
}
