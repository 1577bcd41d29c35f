use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ctreg::config::ExperimentConfig;
use ctreg::experiment::{self, Summary};
use ctreg::Error;

/// Continuous-time kernel regression along trajectories.
///
/// Configuration is layered: built-in defaults, then `--config FILE`
/// (`key = value` lines), then `--set key=value`, then the named flags.
#[derive(Parser)]
#[command(name = "ctreg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the system and write trajectory.csv and samples.csv
    Simulate(Opts),
    /// Select centers, fit at each checkpoint, write the final estimate
    Fit(Opts),
    /// Evaluate a saved estimate on the grid
    EvalGrid {
        #[command(flatten)]
        opts: Opts,
        /// Estimate file; defaults to OUTPUT_DIR/estimate.csv
        #[arg(long)]
        estimate: Option<PathBuf>,
    },
    /// Power function of the selected centers on the grid
    Power(Opts),
    /// Excitation constants per window
    PeCheck(Opts),
    /// Error bound ingredients and, for synthetic data, the bounds
    Bounds(Opts),
    /// Every artifact of the full recipe
    Run(Opts),
}

macro_rules! config_flags {
    ($($field:ident => $help:literal),* $(,)?) => {
        #[derive(Args)]
        struct Opts {
            /// Configuration file with `key = value` lines
            #[arg(long, short)]
            config: Option<PathBuf>,
            /// Any configuration key, repeatable
            #[arg(long = "set", value_name = "KEY=VALUE")]
            set: Vec<String>,
            $(
                #[doc = $help]
                #[arg(long, value_name = "VALUE")]
                $field: Option<String>,
            )*
        }

        impl Opts {
            fn flags(&self) -> Vec<(&'static str, &str)> {
                let mut v = Vec::new();
                $(
                    if let Some(x) = &self.$field {
                        v.push((stringify!($field), x.as_str()));
                    }
                )*
                v
            }
        }
    };
}

config_flags! {
    kernel => "matern | gaussian",
    beta => "Kernel length scale",
    distance_mode => "norm | squared",
    gamma => "Regularization",
    gamma_sweep => "Comma-separated γ values for the sweep (run)",
    eta => "Center separation",
    system => "lorenz | csv",
    csv_path => "Samples file t,x1..xd,y",
    sigma => "Lorenz σ",
    r => "Lorenz r",
    b => "Lorenz b",
    rhs_mode => "standard | variant",
    x0 => "Initial state, comma-separated",
    t_end => "Horizon in seconds",
    h => "Integrator step",
    subsample => "Keep every n-th integrator step",
    center_subsample => "Keep every n-th sample as a center candidate",
    method => "1 | 2 | erm",
    axes => "State components seen by the regressor",
    interp => "cubic | linear",
    quadrature => "samples | centers",
    grid_bounds => "x1min,x1max,x2min,x2max or auto",
    grid_resolution => "Grid points per axis",
    delta => "Excitation window length or auto",
    checkpoints => "Fit times, comma-separated",
    seed => "Seed for the synthetic observable",
    observable => "lorenz_test | synthetic",
    output_dir => "Artifact directory",
    history_stride => "Record method-2 coefficients every n steps",
}

fn build_config(opts: &Opts) -> ctreg::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &opts.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
    }
    for kv in &opts.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        cfg.apply(k, v)?;
    }
    for (k, v) in opts.flags() {
        cfg.apply(k, v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn report(s: &Summary) {
    println!("centers: {}", s.n_centers);
    for (t, e) in &s.rmse {
        println!("rmse at t = {t}: {e:.6e}");
    }
    if let Some(pe) = &s.pe {
        println!(
            "excitation: gamma1 = {:.6e}, gamma2 = {:.6e}, delta = {}, windows = {}",
            pe.gamma1, pe.gamma2, pe.delta, pe.windows_checked
        );
    }
    for f in &s.files {
        println!("wrote {}", f.display());
    }
}

fn execute(cmd: &Command) -> ctreg::Result<Summary> {
    match cmd {
        Command::Simulate(o) => experiment::simulate(&build_config(o)?),
        Command::Fit(o) => experiment::fit(&build_config(o)?),
        Command::EvalGrid { opts, estimate } => {
            let cfg = build_config(opts)?;
            let path = estimate.clone().unwrap_or_else(|| cfg.output_dir.join("estimate.csv"));
            experiment::eval_grid(&cfg, &path)
        }
        Command::Power(o) => experiment::power(&build_config(o)?),
        Command::PeCheck(o) => experiment::pe_report(&build_config(o)?),
        Command::Bounds(o) => experiment::bounds(&build_config(o)?),
        Command::Run(o) => experiment::run(&build_config(o)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli.command) {
        Ok(s) => {
            report(&s);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
