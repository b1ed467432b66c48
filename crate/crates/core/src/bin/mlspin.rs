use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mlspin::checks::run_checks;
use mlspin::config::SimConfig;
use mlspin::init::initial_state;
use mlspin::integrator::step_rk4;
use mlspin::momentum::{invariant_record, InvariantRecord};
use mlspin::snapshot::{read_snapshot, write_snapshot};
use mlspin::{Error, Model, State};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_INVALID_CONFIG: u8 = 2;
const EXIT_BLOW_UP: u8 = 3;

/// Energy growth beyond this factor of the initial value counts as blow-up.
const BLOW_UP_FACTOR: f64 = 1e6;

const CSV_HEADER: &str = "t,H,P1,P2,P3,Pc1,Pc2,Pc3,J1,J2,J3,Jc1,Jc2,Jc3,pi_norm,div_A_max,div_Pi_max,gauss_residual";

#[derive(Parser)]
#[command(name = "mlspin", version, about = "Maxwell-Lorentz spinning-charge simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configuration and write invariants.csv (and snapshots) to --out.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override fields.seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        quiet: bool,
    },
    /// Evaluate every residual on the initial state (or a snapshot) and print
    /// a pass/fail table.
    Check {
        config: PathBuf,
        /// Check this snapshot instead of the configured initial state.
        #[arg(long)]
        state: Option<PathBuf>,
        /// Override fields.seed; also seeds the random probe vectors.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        quiet: bool,
    },
}

enum Failure {
    Config(String),
    BlowUp(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BlowUp { .. } => Failure::BlowUp(e.to_string()),
            _ => Failure::Other(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

fn load_config(path: &Path, seed: Option<u64>) -> Result<SimConfig, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let mut cfg = SimConfig::from_json(&text).map_err(|e| match e {
        Error::Config { line, message } => Failure::Config(format!("{}:{line}: {message}", path.display())),
        other => Failure::Config(format!("{}: {other}", path.display())),
    })?;
    if let Some(s) = seed {
        cfg.fields.seed = s;
    }
    Ok(cfg)
}

fn setup(cfg: &SimConfig) -> Result<(Model, State), Failure> {
    let invalid = |e: Error| Failure::Config(e.to_string());
    let model = cfg.model().map_err(invalid)?;
    let y0 = initial_state(&model, &cfg.particle_init(), &cfg.field_init()).map_err(invalid)?;
    Ok((model, y0))
}

fn csv_row(r: &InvariantRecord) -> String {
    let vals = [
        r.t,
        r.h,
        r.p.x,
        r.p.y,
        r.p.z,
        r.p_c.x,
        r.p_c.y,
        r.p_c.z,
        r.j.x,
        r.j.y,
        r.j.z,
        r.j_c.x,
        r.j_c.y,
        r.j_c.z,
        r.pi_norm,
        r.div_a_max,
        r.div_pi_max,
        r.gauss_residual,
    ];
    vals.iter().map(|v| format!("{v:.16e}")).collect::<Vec<_>>().join(",")
}

fn write_snapshot_file(dir: &Path, step: usize, y: &State) -> Result<(), Failure> {
    let mut w = BufWriter::new(File::create(dir.join(format!("snapshot_{step:06}.bin")))?);
    write_snapshot(&mut w, y)?;
    w.flush()?;
    Ok(())
}

fn simulate(config: &Path, out: &Path, seed: Option<u64>, quiet: bool) -> Result<(), Failure> {
    let cfg = load_config(config, seed)?;
    let run = cfg.run_config().map_err(|e| Failure::Config(e.to_string()))?;
    let (model, y0) = setup(&cfg)?;
    fs::create_dir_all(out)?;
    let mut csv = BufWriter::new(File::create(out.join("invariants.csv"))?);
    writeln!(csv, "{CSV_HEADER}")?;

    let steps = run.steps();
    let snap_every = cfg.run.snapshot_every;
    let record = invariant_record(&model, 0.0, &y0)?;
    let h0 = record.h;
    writeln!(csv, "{}", csv_row(&record))?;
    if snap_every > 0 {
        write_snapshot_file(out, 0, &y0)?;
    }
    if !quiet {
        eprintln!("N = {}, dt = {:e}, {steps} steps, H(0) = {h0:.12e}", cfg.grid.n, run.dt);
    }

    let mut y = y0;
    let report_every = (steps / 10).max(1);
    for n in 1..=steps {
        let t = n as f64 * run.dt;
        y = step_rk4(&model, &y, run.dt, run.reproject_gauge).map_err(|e| match e {
            Error::BlowUp { .. } => Failure::BlowUp(Error::BlowUp { t }.to_string()),
            other => other.into(),
        })?;
        let last = n == steps;
        if n % run.observe_every == 0 || last {
            let r = invariant_record(&model, t, &y)?;
            writeln!(csv, "{}", csv_row(&r))?;
            if !r.h.is_finite() || r.h.abs() > BLOW_UP_FACTOR * h0.abs().max(f64::MIN_POSITIVE) {
                csv.flush()?;
                return Err(Failure::BlowUp(Error::BlowUp { t }.to_string()));
            }
            if !quiet && (n % report_every == 0 || last) {
                eprintln!("t = {t:.4}  H = {:.12e}  dH/H = {:.3e}", r.h, (r.h - h0) / h0.abs().max(f64::MIN_POSITIVE));
            }
        }
        if snap_every > 0 && (n % snap_every == 0 || last) {
            write_snapshot_file(out, n, &y)?;
        }
    }
    csv.flush()?;
    Ok(())
}

fn check(config: &Path, state: Option<&Path>, seed: Option<u64>, quiet: bool) -> Result<bool, Failure> {
    let cfg = load_config(config, seed)?;
    let (model, mut y0) = setup(&cfg)?;
    if let Some(path) = state {
        y0 = read_snapshot(&mut BufReader::new(File::open(path)?))?;
        if y0.grid() != model.grid() {
            return Err(Failure::Config(format!("{}: snapshot grid differs from config grid", path.display())));
        }
    }
    if !quiet {
        eprintln!("checking {}", state.unwrap_or(config).display());
    }
    let report = run_checks(&model, &y0, &cfg.checks, cfg.fields.seed)?;
    print!("{report}");
    Ok(report.all_passed())
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("MLSPIN_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Config(format!("MLSPIN_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Other(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = configure_threads().and_then(|()| match &cli.command {
        Command::Simulate { config, out, seed, quiet } => simulate(config, out, *seed, *quiet).map(|()| true),
        Command::Check { config, state, seed, quiet } => check(config, state.as_deref(), *seed, *quiet),
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(Failure::Config(msg)) => {
            eprintln!("invalid config: {msg}");
            ExitCode::from(EXIT_INVALID_CONFIG)
        }
        Err(Failure::BlowUp(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(EXIT_BLOW_UP)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
