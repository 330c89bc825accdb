//! `fama` command line: sweeps, single-trial inspection and the verify suite.
//!
//! Exit status: 0 on success, 1 on runtime failure, 2 on a usage or
//! configuration problem (including refusing to overwrite results).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fama_core::{
    build_pair, correlation_matrix, design_geport_traced, design_strategy, sample_channels, C64, Strategy,
};

use crate::config::{db_to_linear, Axis, Config, ConfigError};
use crate::experiment::{compare_strategies, run_experiment, run_experiment_with_workers, TargetUser};
use crate::output::{format_sig, plot_data, results_csv, Manifest};
use crate::verify::{run_suite, Fault};

#[derive(Debug, Parser)]
#[command(name = "fama", version, about = "Multiport fluid-antenna slow-FAMA simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Average SE versus SNR (`[sweep] snr_db`).
    SweepSnr(SweepArgs),
    /// Average SE versus the number of active ports (`[sweep] active_ports`).
    SweepL(SweepArgs),
    /// Average SE versus the number of ports on a fixed aperture (`[sweep] ports`).
    SweepN(SweepArgs),
    /// One channel draw at full verbosity.
    Single(SingleArgs),
    /// Oracle and identity checks on small random instances.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// TOML config, or a manifest.json from an earlier run. Defaults to the baseline setup.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config value, e.g. `--set seed=7 --set system.snr_db=5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, default_value = "results")]
    output_dir: PathBuf,
    /// Parallel trial workers (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Overwrite existing result files.
    #[arg(long)]
    force: bool,
}

#[derive(Debug, Args)]
struct SingleArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Trial index whose channel draw is inspected.
    #[arg(long, default_value_t = 0)]
    trial: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FaultArg {
    LemmaSign,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, hide = true)]
    inject_fault: Option<FaultArg>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Self::Usage(e.to_string())
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match cli.command {
        Command::SweepSnr(a) => sweep(Axis::Snr, "sweep-snr", &a),
        Command::SweepL(a) => sweep(Axis::ActivePorts, "sweep-l", &a),
        Command::SweepN(a) => sweep(Axis::Ports, "sweep-n", &a),
        Command::Single(a) => single(&a),
        Command::Verify(a) => verify(&a),
    };
    match outcome {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            2
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            1
        }
    }
}

fn load_config(args: &ConfigArgs) -> Result<Config, ConfigError> {
    let base = match &args.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    base.with_overrides(&args.overrides)
}

fn plot_name(axis: Axis) -> &'static str {
    match axis {
        Axis::Snr => "plot_snr.dat",
        Axis::ActivePorts => "plot_l.dat",
        Axis::Ports => "plot_n.dat",
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Failure::Runtime(format!("writing {}: {e}", path.display())))
}

fn sweep(axis: Axis, command: &str, args: &SweepArgs) -> Result<(), Failure> {
    let config = load_config(&args.config)?;
    let spec = config.experiment(axis)?;
    if args.workers == Some(0) {
        return Err(Failure::Usage("--workers must be at least 1".into()));
    }
    let outputs = ["results.csv", plot_name(axis), "manifest.json"];
    let dir = &args.output_dir;
    if !args.force {
        if let Some(existing) = outputs.iter().map(|f| dir.join(f)).find(|p| p.exists()) {
            return Err(Failure::Usage(format!(
                "{} exists; pass --force to overwrite",
                existing.display()
            )));
        }
    }
    std::fs::create_dir_all(dir).map_err(|e| Failure::Runtime(format!("creating {}: {e}", dir.display())))?;

    let started = Instant::now();
    let result = match args.workers {
        Some(w) => run_experiment_with_workers(&spec, w),
        None => run_experiment(&spec),
    }
    .map_err(|e| Failure::Runtime(e.to_string()))?;
    let wall = started.elapsed().as_secs_f64();

    let labels = config.sweep_labels(axis);
    write_file(dir, outputs[0], &results_csv(&result, &labels))?;
    write_file(dir, outputs[1], &plot_data(&result, &labels, axis.label()))?;
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        workers: args.workers.unwrap_or_else(rayon::current_num_threads),
        wall_time_s: wall,
        outputs: outputs.iter().map(|s| s.to_string()).collect(),
        config: &config,
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| Failure::Runtime(e.to_string()))?;
    write_file(dir, outputs[2], &(json + "\n"))?;

    let mut out = std::io::stdout().lock();
    let _ = writeln!(
        out,
        "{command}: {} trials, seed {}, {:.1} s -> {}",
        spec.trials,
        spec.master_seed,
        wall,
        dir.display()
    );
    for (cmp, label) in compare_strategies(&result).iter().zip(&labels) {
        let _ = write!(out, "  {} = {}:", axis.label(), format_sig(*label, 6));
        for (s, m) in &cmp.ranking {
            let _ = write!(out, " {s} {m:.4}");
        }
        let _ = writeln!(out);
    }
    Ok(())
}

fn fmt_c(z: C64) -> String {
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{}{}{}i", format_sig(z.re, 6), sign, format_sig(z.im.abs(), 6))
}

fn single(args: &SingleArgs) -> Result<(), Failure> {
    let config = load_config(&args.config)?;
    let snr = db_to_linear(config.system.snr_db);
    let system = config.system_config(snr)?;
    let strategies = config.strategies()?;
    let geport = config.geport_options()?;
    let users = match config.target_user()? {
        TargetUser::All => (0..system.users).collect::<Vec<_>>(),
        TargetUser::Index(k) if k < system.users => vec![k],
        TargetUser::Index(_) => return Err(Failure::Usage("run.target_user: index out of range".into())),
    };
    let runtime = |e: fama_core::FamaError| Failure::Runtime(format!("trial {}: {e}", args.trial));
    let corr = correlation_matrix(&system.topology).map_err(runtime)?;
    let h = sample_channels(&corr, system.users, system.users, config.run.seed, args.trial).map_err(runtime)?;
    let l = system.active_ports;

    let mut out = std::io::stdout().lock();
    let _ = writeln!(
        out,
        "seed {} trial {}: N = {} ports, K = M = {}, L = {}, snr {} dB ({} linear)",
        config.run.seed,
        args.trial,
        system.num_ports(),
        system.users,
        l,
        format_sig(config.system.snr_db, 6),
        format_sig(snr, 12)
    );
    let _ = writeln!(out, "ports and users are numbered from 1");
    for &k in &users {
        let pair = build_pair(&h, k, snr).map_err(runtime)?;
        let _ = writeln!(out, "user {}:", k + 1);
        for &s in &strategies {
            let d = design_strategy(s, &pair, &h, k, snr, l, &geport).map_err(runtime)?;
            let ports: Vec<String> = d.ports.iter().map(|p| (p + 1).to_string()).collect();
            let w: Vec<String> = d.w.iter().map(|&z| fmt_c(z)).collect();
            let _ = writeln!(
                out,
                "  {:<9} sinr {}  se {}  ports [{}]  w [{}]{}",
                s.name(),
                format_sig(d.achieved_sinr, 12),
                format_sig(d.spectral_efficiency(), 12),
                ports.join(" "),
                w.join(" "),
                if d.degenerate { "  (degenerate)" } else { "" }
            );
        }
        if strategies.contains(&Strategy::Geport) {
            let (_, trace) = design_geport_traced(&pair, l, &geport).map_err(runtime)?;
            let _ = writeln!(out, "  geport removals (step: port, eigenvalue before, accumulated loss):");
            for (n, ((p, lam), loss)) in trace
                .removed
                .iter()
                .zip(&trace.eigenvalues)
                .zip(&trace.accumulated_loss)
                .enumerate()
            {
                let _ = writeln!(
                    out,
                    "    {:>4}: port {:>4}  {}  {}",
                    n + 1,
                    p + 1,
                    format_sig(*lam, 10),
                    format_sig(*loss, 10)
                );
            }
            let _ = writeln!(out, "  geport final loss {}", format_sig(trace.final_loss, 12));
        }
    }
    Ok(())
}

fn verify(args: &VerifyArgs) -> Result<(), Failure> {
    let fault = match args.inject_fault {
        Some(FaultArg::LemmaSign) => Fault::LemmaSign,
        None => Fault::None,
    };
    let outcomes = run_suite(fault).map_err(|e| Failure::Runtime(e.to_string()))?;
    let mut out = std::io::stdout().lock();
    for o in &outcomes {
        let _ = writeln!(
            out,
            "{} {:<34} {:>5} cases, {} failures, worst {:.3e}",
            if o.passed() { "PASS" } else { "FAIL" },
            o.name,
            o.cases,
            o.failures,
            o.worst
        );
    }
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    if failed > 0 {
        return Err(Failure::Runtime(format!("{failed} check(s) failed")));
    }
    Ok(())
}
