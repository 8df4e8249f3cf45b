//! Batch experiment runner: single trajectories, seeded ensembles, spectral
//! phase diagrams, phase-space snapshots, model comparisons and the built-in
//! reproduction presets (`fig1`..`fig4`).
//!
//! Exit codes: 0 success, 2 configuration error, 3 capacity error,
//! 4 partial ensemble.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use grover_core::harness::io;
use grover_core::harness::{
    compare_models, husimi_snapshots, run_ensemble, run_kick_ensemble, run_single,
    scan_phase_diagram, EnsembleResult, ExperimentConfig, HusimiSnapshot, TauSelection,
};
use grover_core::{
    build_grover_iteration, epsilon_critical, fit_kick_factor, sample_disorder, spectral_density,
    DisorderRealization, Error,
};

#[derive(Parser)]
#[command(
    name = "grover-sim",
    version,
    about = "Grover search under static inter-qubit imperfections"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct LatticeArgs {
    /// Lattice width (sites along x)
    #[arg(long, default_value_t = 3)]
    lx: usize,
    /// Lattice height (sites along y)
    #[arg(long, default_value_t = 4)]
    ly: usize,
}

#[derive(Args, Clone)]
struct CommonArgs {
    #[command(flatten)]
    lattice: LatticeArgs,
    /// Master seed for disorder sampling
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Searched index; "random" draws one per realization
    #[arg(long, default_value = "0")]
    tau: String,
    /// Horizon as a multiple of the oscillation period T_G
    #[arg(long, default_value_t = 5.0)]
    tf_mult: f64,
    /// Worker threads (GROVER_WORKERS overrides)
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// One gate-level run: time series of w_G, w_4 and fidelity
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Imperfection strength
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        /// Realization index (seed is master_seed XOR index)
        #[arg(long, default_value_t = 0)]
        realization: usize,
        /// Also emit the spectral density of the amplitude history
        #[arg(long)]
        spectrum: bool,
        /// Print the gate list of one iteration and exit
        #[arg(long)]
        dump_circuit: bool,
        /// Write the sampled disorder realization next to the outputs
        #[arg(long)]
        dump_realization: bool,
        /// Evolve a previously dumped realization instead of sampling
        #[arg(long)]
        realization_file: Option<PathBuf>,
    },
    /// Ensemble over an epsilon grid with per-epsilon statistics
    Ensemble {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated epsilon grid
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        /// Alternative grid as multiples of the critical strength
        #[arg(long, value_delimiter = ',')]
        eps_over_epsc: Vec<f64>,
        #[arg(long, default_value_t = 50)]
        realizations: usize,
        /// Evolve the single-kick model instead of the gate-level circuit
        #[arg(long)]
        kick: bool,
        /// Kick renormalization factor
        #[arg(long, default_value_t = grover_core::DEFAULT_KICK_FACTOR)]
        r_factor: f64,
        /// JSON experiment configuration; replaces the other flags
        #[arg(long, conflicts_with_all = ["eps", "eps_over_epsc", "realizations"])]
        config: Option<PathBuf>,
    },
    /// Spectral density rows over an epsilon grid, one disorder shape
    PhaseDiagram {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 0.0)]
        eps_min: f64,
        /// Upper grid edge; defaults to 4 eps_c of the lattice
        #[arg(long)]
        eps_max: Option<f64>,
        #[arg(long, default_value_t = 33)]
        eps_steps: usize,
        /// Render a PPM heatmap next to the CSV
        #[arg(long)]
        ppm: bool,
    },
    /// Phase-space snapshots at chosen iteration times
    Husimi {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        times: Vec<usize>,
        #[arg(long)]
        ppm: bool,
    },
    /// Full-simulation vs single-kick vs closed-form comparison table
    Compare {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.25, 0.5, 1.0, 2.0, 4.0])]
        eps_over_epsc: Vec<f64>,
        #[arg(long, default_value_t = 50)]
        realizations: usize,
        #[arg(long, default_value_t = grover_core::DEFAULT_KICK_FACTOR)]
        r_factor: f64,
    },
    /// Closed-form averaged w_G curve over an epsilon grid
    Theory {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.25, 0.5, 1.0, 2.0, 4.0])]
        eps_over_epsc: Vec<f64>,
        #[arg(long, default_value_t = grover_core::DEFAULT_KICK_FACTOR)]
        r_factor: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the kick factor to ensemble averages from an ensemble_stats.csv
    FitR {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// ensemble_stats.csv produced by the ensemble subcommand
        #[arg(long)]
        input: PathBuf,
    },
    /// Preset: w_G(t) and fidelity traces at eps = 0, 4e-4, 1e-3 (3x4 lattice)
    Fig1 {
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Preset: Husimi snapshots at t = 0, 17, 34 for eps = 0, 1e-3, 8e-3
    Fig2 {
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        ppm: bool,
    },
    /// Preset: spectral phase diagram on the 3x4 lattice
    Fig3 {
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        ppm: bool,
    },
    /// Preset: ensemble averages vs eps/eps_c with kick model and theory
    Fig4 {
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        realizations: usize,
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn parse_tau(text: &str) -> Result<TauSelection, Error> {
    if text.eq_ignore_ascii_case("random") {
        Ok(TauSelection::Random)
    } else {
        text.parse::<usize>()
            .map(TauSelection::Fixed)
            .map_err(|e| Error::Config(format!("bad tau {text:?}: {e}")))
    }
}

fn base_config(common: &CommonArgs) -> Result<ExperimentConfig, Error> {
    Ok(ExperimentConfig {
        l_x: common.lattice.lx,
        l_y: common.lattice.ly,
        tau: parse_tau(&common.tau)?,
        master_seed: common.seed,
        t_f_multiplier: common.tf_mult,
        workers: common.workers,
        output_dir: common.out.display().to_string(),
        ..ExperimentConfig::default()
    })
}

fn resolve_grid(
    eps: &[f64],
    eps_over_epsc: &[f64],
    l_x: usize,
    l_y: usize,
) -> Result<Vec<f64>, Error> {
    if !eps.is_empty() {
        return Ok(eps.to_vec());
    }
    let n_tot = l_x * l_y;
    if n_tot < 2 {
        return Err(Error::Config("lattice too small".into()));
    }
    let n_g = build_grover_iteration(n_tot - 1, 0)?.n_g();
    let eps_c = epsilon_critical(n_g, n_tot);
    Ok(eps_over_epsc.iter().map(|m| m * eps_c).collect())
}

fn write_ensemble(out: &Path, prefix: &str, result: &EnsembleResult) -> Result<(), Error> {
    io::write_text(
        &out.join(format!("{prefix}ensemble_stats.csv")),
        &io::ensemble_stats_csv(result),
    )?;
    io::write_text(
        &out.join(format!("{prefix}ensemble_realizations.csv")),
        &io::ensemble_realizations_csv(result),
    )?;
    Ok(())
}

fn write_husimi(out: &Path, snaps: &[HusimiSnapshot], ppm: bool) -> Result<(), Error> {
    for s in snaps {
        let stem = format!("husimi_eps{}_t{}", s.epsilon, s.t);
        io::write_text(&out.join(format!("{stem}.csv")), &io::husimi_csv(s))?;
        if ppm {
            let rows: Vec<Vec<f64>> = (0..s.grid.x_cells)
                .map(|x| (0..s.grid.p_cells).map(|p| s.grid.at(x, p)).collect())
                .collect();
            io::write_heatmap_ppm(&out.join(format!("{stem}.ppm")), &rows, true)?;
        }
    }
    Ok(())
}

fn run_command(command: Command) -> Result<(), Error> {
    match command {
        Command::Run {
            common,
            eps,
            realization,
            spectrum,
            dump_circuit,
            dump_realization,
            realization_file,
        } => {
            let config = base_config(&common)?;
            config.validate()?;
            let seed = config.realization_seed(realization);
            let tau = config.tau_for(seed);
            if dump_circuit {
                let circuit = build_grover_iteration(config.n_q(), tau)?;
                print!("{}", circuit.dump());
                return Ok(());
            }
            let out = &common.out;
            let series = if let Some(path) = realization_file {
                let text = std::fs::read_to_string(path)?;
                let loaded = DisorderRealization::load(&text)?;
                if loaded.n_tot() != config.n_tot() {
                    return Err(Error::Config("realization lattice does not match".into()));
                }
                let circuit = build_grover_iteration(config.n_q(), tau)?;
                grover_core::harness::run_gate_level(&circuit, &loaded, config.t_f(), spectrum)?
            } else {
                run_single(&config, eps, seed, spectrum)?
            };
            let stem = format!("timeseries_eps{eps}_r{realization}");
            io::write_text(
                &out.join(format!("{stem}.csv")),
                &io::timeseries_csv(&series),
            )?;
            io::Sidecar::new(
                vec![eps],
                config.master_seed,
                (config.l_x, config.l_y),
                series.t_f,
            )
            .write(&out.join(format!("{stem}.json")))?;
            if spectrum {
                let sd = spectral_density(series.history.as_ref().unwrap(), series.t_f, eps, seed)?;
                io::write_text(
                    &out.join(format!("spectrum_eps{eps}_r{realization}.csv")),
                    &io::spectrum_csv(&sd),
                )?;
            }
            if dump_realization {
                let lattice = config.lattice();
                let reali = sample_disorder(&lattice, eps, seed);
                io::write_text(
                    &out.join(format!("realization_eps{eps}_r{realization}.txt")),
                    &reali.dump(),
                )?;
            }
            let avg = series.time_average((1, series.t_f))?;
            println!(
                "run: n_tot={} eps={eps} tau={tau} t_f={} mean w_G={:.4} mean w_4={:.4}",
                config.n_tot(),
                series.t_f,
                avg.w_g,
                avg.w_4
            );
            Ok(())
        }
        Command::Ensemble {
            common,
            eps,
            eps_over_epsc,
            realizations,
            kick,
            r_factor,
            config: config_file,
        } => {
            let mut config = if let Some(path) = config_file {
                let text = std::fs::read_to_string(&path)?;
                serde_json::from_str::<ExperimentConfig>(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
            } else {
                let mut cfg = base_config(&common)?;
                cfg.epsilons =
                    resolve_grid(&eps, &eps_over_epsc, common.lattice.lx, common.lattice.ly)?;
                cfg.realizations = realizations;
                cfg
            };
            config.kick_r = r_factor;
            let out_dir = PathBuf::from(&config.output_dir);
            let result = if kick {
                run_kick_ensemble(&config)?
            } else {
                run_ensemble(&config)?
            };
            let prefix = if kick { "kick_" } else { "" };
            write_ensemble(&out_dir, prefix, &result)?;
            io::Sidecar::new(
                config.epsilons.clone(),
                config.master_seed,
                (config.l_x, config.l_y),
                result.t_f,
            )
            .write(&out_dir.join(format!("{prefix}ensemble.json")))?;
            for stats in &result.epsilons {
                println!(
                    "eps={:.6e} (eps/eps_c={:.3}): mean w_G={:.4} mean w_4={:.4}",
                    stats.epsilon, stats.eps_over_eps_c, stats.w_g.mean, stats.w_4.mean
                );
            }
            Ok(())
        }
        Command::PhaseDiagram {
            common,
            eps_min,
            eps_max,
            eps_steps,
            ppm,
        } => {
            let mut config = base_config(&common)?;
            let n_tot = config.n_tot();
            let n_g = build_grover_iteration(config.n_q(), 0)?.n_g();
            let hi = eps_max.unwrap_or(4.0 * epsilon_critical(n_g, n_tot));
            if eps_steps < 2 || hi <= eps_min {
                return Err(Error::Config(
                    "need eps_max > eps_min and >= 2 steps".into(),
                ));
            }
            config.epsilons = (0..eps_steps)
                .map(|i| eps_min + (hi - eps_min) * i as f64 / (eps_steps - 1) as f64)
                .collect();
            let pd = scan_phase_diagram(&config)?;
            io::write_text(
                &common.out.join("phase_diagram.csv"),
                &io::phase_diagram_csv(&pd),
            )?;
            io::Sidecar::new(
                pd.epsilons.clone(),
                config.master_seed,
                (config.l_x, config.l_y),
                pd.t_f,
            )
            .write(&common.out.join("phase_diagram.json"))?;
            if ppm {
                let rows: Vec<Vec<f64>> = pd.rows.iter().map(|r| r.s.clone()).collect();
                io::write_heatmap_ppm(&common.out.join("phase_diagram.ppm"), &rows, true)?;
            }
            println!(
                "phase diagram: {} epsilon rows, t_f={}",
                pd.rows.len(),
                pd.t_f
            );
            Ok(())
        }
        Command::Husimi {
            common,
            eps,
            times,
            ppm,
        } => {
            let mut config = base_config(&common)?;
            if eps.is_empty() || times.is_empty() {
                return Err(Error::Config(
                    "need at least one epsilon and one time".into(),
                ));
            }
            config.epsilons = eps;
            let snaps = husimi_snapshots(&config, &times)?;
            write_husimi(&common.out, &snaps, ppm)?;
            println!("husimi: wrote {} snapshots", snaps.len());
            Ok(())
        }
        Command::Compare {
            common,
            eps_over_epsc,
            realizations,
            r_factor,
        } => {
            let mut config = base_config(&common)?;
            config.epsilons =
                resolve_grid(&[], &eps_over_epsc, common.lattice.lx, common.lattice.ly)?;
            config.realizations = realizations;
            config.kick_r = r_factor;
            let full = run_ensemble(&config)?;
            let kick = run_kick_ensemble(&config)?;
            let rows = compare_models(&full, &kick, r_factor)?;
            io::write_text(&common.out.join("compare.csv"), &io::compare_csv(&rows))?;
            write_ensemble(&common.out, "", &full)?;
            write_ensemble(&common.out, "kick_", &kick)?;
            for r in &rows {
                println!(
                    "eps/eps_c={:.3}: full w_G={:.4} kick w_G={:.4} theory w_G={:.4} | full w_4={:.4} kick w_4={:.4}",
                    r.eps_over_eps_c, r.full_w_g, r.kick_w_g, r.theory_w_g, r.full_w_4, r.kick_w_4
                );
            }
            Ok(())
        }
        Command::Theory {
            lattice,
            eps,
            eps_over_epsc,
            r_factor,
            out,
        } => {
            let grid = resolve_grid(&eps, &eps_over_epsc, lattice.lx, lattice.ly)?;
            let n_tot = lattice.lx * lattice.ly;
            let n_g = build_grover_iteration(n_tot - 1, 0)?.n_g();
            let table = io::theory_csv(&grid, n_g, n_tot - 1, r_factor)?;
            print!("{table}");
            if let Some(dir) = out {
                io::write_text(&dir.join("theory.csv"), &table)?;
            }
            Ok(())
        }
        Command::FitR { lattice, input } => {
            let text = std::fs::read_to_string(&input)?;
            let mut points = Vec::new();
            for line in text.lines().skip(1) {
                let cols: Vec<&str> = line.split(',').collect();
                if cols.len() < 3 {
                    continue;
                }
                let eps: f64 = cols[0]
                    .parse()
                    .map_err(|e| Error::Config(format!("bad epsilon in {input:?}: {e}")))?;
                let w: f64 = cols[2]
                    .parse()
                    .map_err(|e| Error::Config(format!("bad w_g_mean in {input:?}: {e}")))?;
                points.push((eps, w));
            }
            let n_tot = lattice.lx * lattice.ly;
            let n_g = build_grover_iteration(n_tot - 1, 0)?.n_g();
            let fit = fit_kick_factor(&points, n_g, n_tot - 1)?;
            println!(
                "fitted kick factor: R = {:.4} (95% bootstrap [{:.4}, {:.4}], residual {:.3e})",
                fit.r_hat, fit.confidence.0, fit.confidence.1, fit.residual
            );
            Ok(())
        }
        Command::Fig1 { out, seed } => {
            let dir = out.join("fig1");
            let config = ExperimentConfig {
                master_seed: seed,
                ..ExperimentConfig::default()
            };
            for eps in [0.0, 4e-4, 1e-3] {
                let series = run_single(&config, eps, config.realization_seed(0), false)?;
                io::write_text(
                    &dir.join(format!("timeseries_eps{eps}.csv")),
                    &io::timeseries_csv(&series),
                )?;
            }
            io::Sidecar::new(vec![0.0, 4e-4, 1e-3], seed, (3, 4), config.t_f())
                .write(&dir.join("fig1.json"))?;
            println!("fig1: wrote 3 time series to {}", dir.display());
            Ok(())
        }
        Command::Fig2 { out, seed, ppm } => {
            let dir = out.join("fig2");
            let config = ExperimentConfig {
                master_seed: seed,
                epsilons: vec![0.0, 1e-3, 8e-3],
                ..ExperimentConfig::default()
            };
            // snapshot times: start, half period, full period
            let times = [0, 17, 34];
            let snaps = husimi_snapshots(&config, &times)?;
            write_husimi(&dir, &snaps, ppm)?;
            io::Sidecar::new(config.epsilons.clone(), seed, (3, 4), config.t_f())
                .write(&dir.join("fig2.json"))?;
            println!("fig2: wrote {} snapshots to {}", snaps.len(), dir.display());
            Ok(())
        }
        Command::Fig3 { out, seed, ppm } => {
            let dir = out.join("fig3");
            let mut config = ExperimentConfig {
                master_seed: seed,
                ..ExperimentConfig::default()
            };
            let n_g = build_grover_iteration(config.n_q(), 0)?.n_g();
            let eps_c = epsilon_critical(n_g, config.n_tot());
            config.epsilons = (0..33).map(|i| 4.0 * eps_c * i as f64 / 32.0).collect();
            let pd = scan_phase_diagram(&config)?;
            io::write_text(&dir.join("phase_diagram.csv"), &io::phase_diagram_csv(&pd))?;
            if ppm {
                let rows: Vec<Vec<f64>> = pd.rows.iter().map(|r| r.s.clone()).collect();
                io::write_heatmap_ppm(&dir.join("phase_diagram.ppm"), &rows, true)?;
            }
            io::Sidecar::new(pd.epsilons.clone(), seed, (3, 4), pd.t_f)
                .write(&dir.join("fig3.json"))?;
            println!("fig3: wrote {} rows to {}", pd.rows.len(), dir.display());
            Ok(())
        }
        Command::Fig4 {
            out,
            seed,
            realizations,
            workers,
        } => {
            let dir = out.join("fig4");
            for (l_x, l_y) in [(3usize, 3usize), (3, 4)] {
                let n_tot = l_x * l_y;
                let n_g = build_grover_iteration(n_tot - 1, 0)?.n_g();
                let eps_c = epsilon_critical(n_g, n_tot);
                let config = ExperimentConfig {
                    l_x,
                    l_y,
                    master_seed: seed,
                    epsilons: [0.25, 0.5, 1.0, 2.0, 4.0]
                        .iter()
                        .map(|m| m * eps_c)
                        .collect(),
                    realizations,
                    workers,
                    ..ExperimentConfig::default()
                };
                let full = run_ensemble(&config)?;
                let kick = run_kick_ensemble(&config)?;
                let rows = compare_models(&full, &kick, config.kick_r)?;
                let sub = dir.join(format!("ntot{n_tot}"));
                io::write_text(&sub.join("compare.csv"), &io::compare_csv(&rows))?;
                write_ensemble(&sub, "", &full)?;
                write_ensemble(&sub, "kick_", &kick)?;
                io::write_text(
                    &sub.join("theory.csv"),
                    &io::theory_csv(&config.epsilons, n_g, n_tot - 1, config.kick_r)?,
                )?;
                println!("fig4: n_tot={n_tot} done ({realizations} realizations)");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_command(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::Config(_) => 2,
                Error::Capacity(_) => 3,
                Error::Partial { .. } => 4,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}
