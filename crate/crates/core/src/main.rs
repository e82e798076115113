//! Command-line interface: config-driven solves, truncation-length and
//! perturbation sweeps, config validation, and recomputation of diagnostics
//! from saved outputs.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cdeuler::config::RunConfig;
use cdeuler::diagnostics::diagnostics;
use cdeuler::error::Error;
use cdeuler::output::{
    fmt17, read_key_values, read_solution, write_file_text, write_solution,
};
use cdeuler::solver::{
    sigma_scaling_study, solve_length_sweep, solve_truncated, study_ratios, PairAgreement,
};

#[derive(Parser)]
#[command(
    name = "cdeuler",
    about = "Axisymmetric subsonic Euler flows with a contact interface in a cylinder",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one truncated solve and write the output set
    Solve {
        /// Path to the TOML run configuration
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config's output.dir)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print every diagnostics entry
        #[arg(short, long)]
        verbose: bool,
    },
    /// Validate a configuration and print the effective settings
    Check {
        #[arg(long)]
        config: PathBuf,
    },
    /// Solve on each configured truncation length and report the agreement
    /// of consecutive solutions on the shared window
    SweepLength {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve across the configured perturbation magnitudes and report the
    /// scaling of the estimate-ledger norms
    SweepSigma {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute diagnostics from a saved output directory and print them
    Residuals {
        #[arg(long)]
        config: PathBuf,
        /// Directory holding interface.txt and the field files
        #[arg(long)]
        dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn out_dir(config: &RunConfig, flag: &Option<PathBuf>) -> PathBuf {
    flag.clone()
        .unwrap_or_else(|| PathBuf::from(&config.output.dir))
}

fn echo_config(config: &RunConfig, dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    write_file_text(&dir.join("effective_config.toml"), &config.to_toml())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Check { config } => {
            let config = RunConfig::load(&config)?;
            let (consts, profiles, _) = config.build()?;
            println!("ok: configuration is valid");
            println!("sigma = {}", fmt17(profiles.sigma));
            println!(
                "mach0_plus = {}",
                fmt17(consts.mach0(cdeuler::eos::PhaseTag::Plus))
            );
            println!(
                "mach0_minus = {}",
                fmt17(consts.mach0(cdeuler::eos::PhaseTag::Minus))
            );
            print!("{}", config.to_toml());
            Ok(())
        }
        Command::Solve { config, out, verbose } => {
            let config = RunConfig::load(&config)?;
            let dir = out_dir(&config, &out);
            let (consts, profiles, solver) = config.build()?;
            echo_config(&config, &dir)?;
            let solution = solve_truncated(&consts, &profiles, &solver)?;
            let report = diagnostics(&solution, &profiles);
            write_solution(&solution, &report, &dir)?;
            println!(
                "converged: outer = {}, middle = {}, picard = {}",
                solution.history.outer_changes.len(),
                solution.history.total_middle_iterations,
                solution.history.total_picard_iterations
            );
            println!("max residual = {}", fmt17(report.max_residual()));
            if verbose {
                for (k, v) in &report.entries {
                    println!("{k} = {}", fmt17(*v));
                }
            }
            println!("outputs in {}", dir.display());
            Ok(())
        }
        Command::SweepLength { config, out } => {
            let config = RunConfig::load(&config)?;
            let dir = out_dir(&config, &out);
            let (consts, profiles, solver) = config.build()?;
            let lengths = config.solver.lengths.clone().ok_or_else(|| {
                Error::config("solver.lengths", "sweep-length needs a list of lengths")
            })?;
            echo_config(&config, &dir)?;
            let (solutions, agreements) =
                solve_length_sweep(&consts, &profiles, &solver, &lengths)?;
            for sol in &solutions {
                let sub = dir.join(format!("L_{}", sol.f.length));
                let report = diagnostics(sol, &profiles);
                write_solution(sol, &report, &sub)?;
            }
            let text = render_length_sweep(&agreements, config.solver.agreement_tol);
            write_file_text(&dir.join("length_sweep.txt"), &text)?;
            print!("{text}");
            let worst = agreements
                .iter()
                .flat_map(|a| a.discrepancies.values())
                .fold(0.0_f64, |m, v| m.max(*v));
            if worst > config.solver.agreement_tol {
                eprintln!(
                    "warning: window agreement {} exceeds tolerance {}",
                    fmt17(worst),
                    fmt17(config.solver.agreement_tol)
                );
            }
            Ok(())
        }
        Command::SweepSigma { config, out } => {
            let config = RunConfig::load(&config)?;
            let dir = out_dir(&config, &out);
            let (consts, profiles, solver) = config.build()?;
            let sigmas = config.solver.sigmas.clone().ok_or_else(|| {
                Error::config("solver.sigmas", "sweep-sigma needs a list of magnitudes")
            })?;
            echo_config(&config, &dir)?;
            let base = if profiles.sigma > 0.0 {
                profiles
            } else {
                cdeuler::profiles::EntranceProfiles::preset(&consts, config.entrance.epsilon, 1e-3)?
            };
            let rows = sigma_scaling_study(&consts, &base, &solver, &sigmas)?;
            let text = render_sigma_study(&rows);
            write_file_text(&dir.join("sigma_sweep.txt"), &text)?;
            print!("{text}");
            Ok(())
        }
        Command::Residuals { config, dir } => {
            let config = RunConfig::load(&config)?;
            let (consts, profiles, _) = config.build()?;
            let solution = read_solution(&consts, profiles.sigma, &dir)?;
            let report = diagnostics(&solution, &profiles);
            for (k, v) in &report.entries {
                println!("{k} = {}", fmt17(*v));
            }
            // Cross-check against the stored summary when present.
            let summary_path = dir.join("summary.txt");
            if summary_path.exists() {
                let stored = read_key_values(&summary_path)?;
                let mut worst = 0.0_f64;
                for (k, v) in &report.entries {
                    if let Some(sv) = stored.get(k) {
                        worst = worst.max((sv - v).abs() / v.abs().max(1.0));
                    }
                }
                eprintln!("max relative deviation from stored summary: {}", fmt17(worst));
            }
            Ok(())
        }
    }
}

fn render_length_sweep(agreements: &[PairAgreement], tol: f64) -> String {
    let mut out = String::new();
    out.push_str("# cdeuler length sweep agreement\n");
    out.push_str(&format!("# format_version = {}\n", cdeuler::config::FORMAT_VERSION));
    out.push_str(&format!("agreement_tol = {}\n", fmt17(tol)));
    for a in agreements {
        out.push_str(&format!(
            "# pair L = {} vs L = {} on window [0, {}]\n",
            a.length_a, a.length_b, a.window
        ));
        for (k, v) in &a.discrepancies {
            out.push_str(&format!(
                "discrepancy_{}_L{}_L{} = {}\n",
                k, a.length_a, a.length_b, fmt17(*v)
            ));
        }
    }
    out
}

fn render_sigma_study(rows: &[cdeuler::solver::SigmaStudyRow]) -> String {
    let mut out = String::new();
    out.push_str("# cdeuler perturbation scaling study\n");
    out.push_str(&format!("# format_version = {}\n", cdeuler::config::FORMAT_VERSION));
    for row in rows {
        out.push_str(&format!("# sigma = {}\n", fmt17(row.sigma)));
        for (k, v) in &row.ledger {
            out.push_str(&format!("ledger_{k}_sigma_{} = {}\n", row.sigma, fmt17(*v)));
        }
    }
    for (pair, ratios) in study_ratios(rows).iter().enumerate() {
        out.push_str(&format!("# ratio of rows {} -> {}\n", pair, pair + 1));
        for (k, v) in ratios {
            out.push_str(&format!("ratio_{k}_{pair} = {}\n", fmt17(*v)));
        }
    }
    out
}
