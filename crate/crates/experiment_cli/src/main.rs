use clap::{Args, Parser, Subcommand};
use experiment_cli::{parse_config, replay_plan, run, CliError, ExperimentKind, RunRecord, OUT_ENV};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "experiment_cli", version, about = "Runs controllability experiments from TOML configs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output root; defaults to the config's `out`, then $SATCTL_OUT, then ./runs.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed in 0..=2^63-1 (TOML integers are signed).
    #[arg(long, value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
    seed: Option<u64>,
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct Replay {
    /// Stored plan (plan.json from a reach or exact_projection run).
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed in 0..=2^63-1 (TOML integers are signed).
    #[arg(long, value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
    seed: Option<u64>,
    #[arg(long)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    #[command(name = "span_check", alias = "span-check")]
    SpanCheck(Common),
    #[command(name = "determining_modes", alias = "determining-modes")]
    DeterminingModes(Common),
    #[command(name = "scaling_sweep", alias = "scaling-sweep")]
    ScalingSweep(Common),
    #[command(name = "reach")]
    Reach(Common),
    #[command(name = "exact_projection", alias = "exact-projection")]
    ExactProjection(Common),
    #[command(name = "gramian")]
    Gramian(Common),
    #[command(name = "support_mc", alias = "support-mc")]
    SupportMc(Common),
    #[command(name = "envelope_check", alias = "envelope-check")]
    EnvelopeCheck(Common),
    /// Re-solve a stored plan and compare with its recorded errors.
    #[command(name = "replay")]
    Replay(Replay),
}

fn out_root(flag: Option<PathBuf>, config: Option<&str>) -> PathBuf {
    flag.or_else(|| config.map(PathBuf::from))
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs"))
}

fn run_config(kind: ExperimentKind, c: Common) -> Result<(RunRecord, PathBuf, bool), CliError> {
    let text = std::fs::read_to_string(&c.config).map_err(|e| CliError::Invalid(format!("{}: {e}", c.config.display())))?;
    let mut cfg = parse_config(&text)?;
    if cfg.kind != kind {
        return Err(CliError::Invalid(format!("config kind is {} but the subcommand is {kind}", cfg.kind)));
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    let root = out_root(c.out, cfg.out.as_deref());
    let record = run(&cfg, &root)?;
    let dir = experiment_cli::run_dir(&root, kind.name(), &record.config_hash);
    Ok((record, dir, c.verbose))
}

fn report(record: &RunRecord, dir: &Path, verbose: bool) {
    for v in &record.verdicts {
        let mut line = format!("{} {}", if v.passed { "PASS" } else { "FAIL" }, v.name);
        if let (Some(x), Some(t)) = (v.value, v.tolerance) {
            line.push_str(&format!(" value={x:.6e} tol={t:.6e}"));
        }
        if !v.detail.is_empty() {
            line.push_str(&format!(" ({})", v.detail));
        }
        println!("{line}");
    }
    println!("{} {} -> {}", if record.passed { "PASS" } else { "FAIL" }, record.kind, dir.display());
    if verbose {
        for d in &record.diagnostics {
            eprintln!("diagnostic: {d}");
        }
        eprintln!("payload: {}", record.payload);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::SpanCheck(c) => run_config(ExperimentKind::SpanCheck, c),
        Command::DeterminingModes(c) => run_config(ExperimentKind::DeterminingModes, c),
        Command::ScalingSweep(c) => run_config(ExperimentKind::ScalingSweep, c),
        Command::Reach(c) => run_config(ExperimentKind::Reach, c),
        Command::ExactProjection(c) => run_config(ExperimentKind::ExactProjection, c),
        Command::Gramian(c) => run_config(ExperimentKind::Gramian, c),
        Command::SupportMc(c) => run_config(ExperimentKind::SupportMc, c),
        Command::EnvelopeCheck(c) => run_config(ExperimentKind::EnvelopeCheck, c),
        Command::Replay(r) => {
            let root = out_root(r.out, None);
            replay_plan(&r.plan, &root, r.seed.unwrap_or(0)).map(|rec| {
                let dir = experiment_cli::run_dir(&root, "replay", &rec.config_hash);
                (rec, dir, r.verbose)
            })
        }
    };
    match result {
        Ok((record, dir, verbose)) => {
            report(&record, &dir, verbose);
            if record.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
