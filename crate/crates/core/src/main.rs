//! Command-line interface: single-point correlations, parameter sweeps,
//! optimal-drive evaluation, amplitude tables and a self-check suite.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use magnon_blockade::sweep::{parse_config, run_sweep, write_csv, Method, RunSpec};
use magnon_blockade::{
    check, closed_form_amplitudes, g2_analytic, g2_zero, optimal_drive, steady_state_for,
    truncated_solve, Error, Result,
};

#[derive(Parser)]
#[command(
    name = "magnon-blockade",
    version,
    about = "Chiral cavity-magnon simulator: directional photon blockade under two-photon driving"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Config file (flat `key = value` lines; see README)
    #[arg(long)]
    config: PathBuf,
    /// Override the per-mode occupation cutoff for the master method
    #[arg(long, value_parser = clap::value_parser!(usize))]
    truncation: Option<usize>,
    /// Override the computation method (analytic|master|both)
    #[arg(long)]
    method: Option<String>,
    /// Apply the a<->b parameter swap (reverse the bias field)
    #[arg(long)]
    reverse_field: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Second-order correlations of both modes at the config base point
    G2(ConfigArgs),
    /// Run the sweep described by the config and write a CSV table
    Sweep {
        #[command(flatten)]
        common: ConfigArgs,
        /// Output CSV path (overrides the config `output` key)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Number of worker threads for grid points
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print the drive amplitude and phase that null the pair amplitude
    Optimal {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print all ten amplitudes, closed form and block solve side by side
    Amplitudes {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the built-in invariant suite
    Check,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load_spec(common: &ConfigArgs) -> Result<RunSpec> {
    let text = std::fs::read_to_string(&common.config)?;
    let mut spec = parse_config(&text)?;
    if let Some(t) = common.truncation {
        spec.truncation = t;
    }
    if let Some(m) = &common.method {
        spec.method = Method::parse(m)?;
    }
    if common.reverse_field {
        spec.reverse_field = true;
    }
    spec.validate()?;
    Ok(spec)
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::G2(common) => {
            let spec = load_spec(&common)?;
            run_g2(&spec)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { common, out, jobs } => {
            let mut spec = load_spec(&common)?;
            if let Some(path) = out {
                spec.output = Some(path);
            }
            let out_path = spec.output.clone().ok_or_else(|| {
                Error::InvalidParams(
                    "no output path: pass --out or set `output` in the config".into(),
                )
            })?;
            let table = match jobs {
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build()
                    .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?
                    .install(|| run_sweep(&spec)),
                None => run_sweep(&spec),
            }?;
            write_csv(&table, &out_path)?;
            let flagged = table
                .column("status")
                .map(|idx| table.rows.iter().filter(|r| r[idx] != Some(0.0)).count())
                .unwrap_or(0);
            println!(
                "wrote {} rows x {} columns to {} ({} flagged)",
                table.rows.len(),
                table.columns.len(),
                out_path.display(),
                flagged
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Optimal { config } => {
            let text = std::fs::read_to_string(&config)?;
            let spec = parse_config(&text)?;
            let params = spec.effective_params(&[]).normalized()?;
            let d = optimal_drive(&params)?;
            println!("e_opt   = {:.17e}", d.e_opt);
            if d.phase_degenerate {
                println!("phi_opt = undefined (no probe: any phase is optimal at e = 0)");
            } else {
                println!(
                    "phi_opt = {:.17} rad = {:.17} pi",
                    d.phi_opt,
                    d.phi_opt / std::f64::consts::PI
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Amplitudes { config } => {
            let text = std::fs::read_to_string(&config)?;
            let spec = parse_config(&text)?;
            let params = spec.effective_params(&[]).normalized()?;
            let oracle = truncated_solve(&params)?;
            let closed = closed_form_amplitudes(&params)?;
            println!(
                "{:<6} {:>24} {:>24} {:>24} {:>24} {:>10}",
                "state", "closed re", "closed im", "solve re", "solve im", "rel diff"
            );
            for ((label, c), (_, o)) in closed.entries().iter().zip(oracle.entries().iter()) {
                let rel = (c - o).norm() / c.norm().max(o.norm()).max(1e-250);
                println!(
                    "{:<6} {:>24.16e} {:>24.16e} {:>24.16e} {:>24.16e} {:>10.2e}",
                    label, c.re, c.im, o.re, o.im, rel
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check => {
            let results = check::run_all();
            let mut failed = 0;
            for r in &results {
                let mark = if r.passed { "PASS" } else { "FAIL" };
                println!("[{mark}] {} — {}", r.name, r.detail);
                if !r.passed {
                    failed += 1;
                }
            }
            if failed == 0 {
                println!("all {} checks passed", results.len());
                Ok(ExitCode::SUCCESS)
            } else {
                println!("{failed} of {} checks failed", results.len());
                Ok(ExitCode::from(2))
            }
        }
    }
}

fn run_g2(spec: &RunSpec) -> Result<()> {
    let mut params = spec.forward_params(&[]).normalized()?;
    if spec.use_optimal_drive {
        let d = optimal_drive(&params)?;
        params.e_l = d.e_opt;
        params.e_r = d.e_opt;
        println!("e_opt   = {:.17e}", d.e_opt);
        if !d.phase_degenerate {
            println!("phi_opt = {:.17} rad", d.phi_opt);
        }
    }
    if spec.reverse_field {
        params = params.swapped();
    }

    if spec.method.analytic() {
        match closed_form_amplitudes(&params) {
            Ok(amps) => {
                for mode in &spec.modes {
                    match g2_analytic(&amps, *mode) {
                        Ok(v) => println!("g2({mode}, analytic) = {v:.17e}"),
                        Err(Error::UndefinedCorrelation { .. }) => {
                            println!("g2({mode}, analytic) = decoupled")
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
            Err(e @ Error::SingularDenominator { .. }) => {
                println!("analytic route singular at these parameters: {e}")
            }
            Err(e) => return Err(e),
        }
    }
    if spec.method.master() {
        let rho = steady_state_for(&params, spec.truncation)?;
        for mode in &spec.modes {
            match g2_zero(&rho, *mode) {
                Ok(v) => println!("g2({mode}, master)   = {v:.17e}"),
                Err(Error::EmptyMode { .. }) => println!("g2({mode}, master)   = empty mode"),
                Err(e) => return Err(e),
            }
            println!("n_{mode} = {:.17e}", rho.occupation(*mode)?);
        }
    }
    Ok(())
}
