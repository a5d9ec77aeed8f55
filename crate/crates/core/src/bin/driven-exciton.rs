use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use driven_exciton::harness::{
    load_config, run_coeffs, run_fig1, run_fig2, run_sweep, run_validate, write_table,
    write_validation, HarnessError, ScenarioConfig, SweepAxis,
};
use driven_exciton::params::Fig2Variant;

#[derive(Parser)]
#[command(name = "driven-exciton", version, about = "Driven exciton in a Lorentzian bath: figures, sweeps, validation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// Scenario config file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides [output] dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Number of bath modes (odd, >= 101).
    #[arg(long, global = true)]
    grid_j: Option<usize>,
    /// Bath half-width in units of Γ (>= 20).
    #[arg(long, global = true)]
    grid_w_mult: Option<f64>,
    /// Step rule R: dt <= R·ħ/fastest rate.
    #[arg(long, global = true)]
    dt_rule: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Driven and undriven mean exciton number.
    Fig1,
    /// Phase of the decoherence factor for panel a, b or c.
    Fig2 { variant: Fig2Variant },
    /// Run the cross-validation battery; exit 1 if anything fails.
    Validate,
    /// Summary observables along one parameter axis.
    Sweep {
        /// xi, delta, gamma, m_coupling, n0 or dphi
        #[arg(long)]
        axis: SweepAxis,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        values: Vec<f64>,
    },
    /// Raw u, w, A, B paths.
    Coeffs,
}

fn config(g: &Global) -> Result<ScenarioConfig, HarnessError> {
    let base = match &g.config {
        Some(path) => load_config(path)?,
        None => ScenarioConfig::default(),
    };
    let out = g.out.as_ref().map(|p| p.to_string_lossy().into_owned());
    Ok(base.with_overrides(g.grid_j, g.grid_w_mult, g.dt_rule, out.as_deref())?)
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn run(cli: Cli) -> Result<ExitCode, HarnessError> {
    let cfg = config(&cli.global)?;
    let dir = Path::new(&cfg.output.dir);
    let plot = cfg.output.plot;
    match cli.command {
        Command::Fig1 => report(&write_table(dir, "fig1", &run_fig1(&cfg)?, plot)?),
        Command::Fig2 { variant } => {
            let stem = match variant {
                Fig2Variant::A => "fig2a",
                Fig2Variant::B => "fig2b",
                Fig2Variant::C => "fig2c",
            };
            report(&write_table(dir, stem, &run_fig2(&cfg, variant)?, plot)?)
        }
        Command::Coeffs => report(&write_table(dir, "coeffs", &run_coeffs(&cfg)?, plot)?),
        Command::Sweep { axis, values } => {
            let table = run_sweep(&cfg, axis, &values)?;
            report(&write_table(dir, "sweep", &table, plot)?)
        }
        Command::Validate => {
            let v = run_validate(&cfg)?;
            report(&write_validation(dir, &v)?);
            for r in &v.reports {
                for c in &r.channels {
                    println!(
                        "{} {:<18} {:<10} max_abs_error={:.3e}",
                        if c.pass { "PASS" } else { "FAIL" },
                        r.label,
                        c.channel,
                        c.max_abs_error
                    );
                }
            }
            if !v.pass() {
                eprintln!("validation failed: {}", v.failures().join(", "));
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
