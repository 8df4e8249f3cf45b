//! Experiment front end: configuration, seeded single runs, parallel
//! ensembles over (imperfection strength, realization) grids, spectral
//! phase-diagram scans, phase-space snapshots and model-comparison tables.
//!
//! Reproducibility contract: realization `k` draws its disorder from
//! `master_seed ^ k`, cells are computed independently (in parallel or not)
//! and aggregated in a fixed order, so equal configurations produce
//! identical bytes regardless of worker count.

pub mod io;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{apply_ideal_grover, build_grover_iteration, grover_period};
use crate::disorder::{sample_disorder, DisorderRealization, NoisePropagator};
use crate::error::{Error, Result};
use crate::lattice::{build_lattice, QubitLattice};
use crate::observables::husimi::{husimi, HusimiGrid};
use crate::observables::spectral::{dominant_frequency, spectral_density, SpectralDensity};
use crate::observables::{fidelity, w_4, w_g, TimeSeries};
use crate::state::{GateOp, QuantumState};
use crate::theory::{epsilon_critical, mean_w_g_theory, sigma_width, single_kick_run};

/// Environment variable that overrides the configured worker count.
pub const WORKERS_ENV: &str = "GROVER_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "snake_case")]
pub enum TauSelection {
    /// One searched index for every run (the reproduction default is 0).
    Fixed(usize),
    /// Per-realization searched index derived from the realization seed.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmitFlags {
    pub timeseries: bool,
    pub spectra: bool,
    pub husimi: bool,
    pub heatmaps: bool,
}

impl Default for EmitFlags {
    fn default() -> Self {
        EmitFlags {
            timeseries: true,
            spectra: false,
            husimi: false,
            heatmaps: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub l_x: usize,
    pub l_y: usize,
    pub tau: TauSelection,
    pub epsilons: Vec<f64>,
    pub realizations: usize,
    pub master_seed: u64,
    /// Run horizon as a multiple of the oscillation period `T_G`.
    pub t_f_multiplier: f64,
    /// Renormalization factor of the single-kick model.
    pub kick_r: f64,
    pub output_dir: String,
    pub emit: EmitFlags,
    /// Worker threads; `None` defers to `GROVER_WORKERS` or the core count.
    pub workers: Option<usize>,
    pub memory_budget_bytes: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            l_x: 3,
            l_y: 4,
            tau: TauSelection::Fixed(0),
            epsilons: vec![1e-3],
            realizations: 1,
            master_seed: 1,
            t_f_multiplier: 5.0,
            kick_r: crate::theory::DEFAULT_KICK_FACTOR,
            output_dir: "out".into(),
            emit: EmitFlags::default(),
            workers: None,
            memory_budget_bytes: 6 << 30,
        }
    }
}

impl ExperimentConfig {
    pub fn n_tot(&self) -> usize {
        self.l_x * self.l_y
    }

    pub fn n_q(&self) -> usize {
        self.n_tot() - 1
    }

    /// Horizon in iterations: `round(multiplier * T_G)`.
    pub fn t_f(&self) -> usize {
        (self.t_f_multiplier * grover_period(self.n_q())).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_tot() < 2 {
            return Err(Error::Config(format!(
                "lattice {}x{} has fewer than 2 sites",
                self.l_x, self.l_y
            )));
        }
        if self.n_tot() > 24 {
            return Err(Error::Capacity(format!(
                "n_tot = {} exceeds the 24-qubit ceiling",
                self.n_tot()
            )));
        }
        if self.epsilons.is_empty() || self.epsilons.iter().any(|&e| !(e >= 0.0)) {
            return Err(Error::Config(
                "epsilon grid must be non-empty and >= 0".into(),
            ));
        }
        if self.realizations == 0 {
            return Err(Error::Config("need at least one realization".into()));
        }
        if !(self.kick_r >= 0.0 && self.kick_r <= 1.0) {
            return Err(Error::Config(format!(
                "kick factor {} outside [0, 1]",
                self.kick_r
            )));
        }
        if self.t_f_multiplier <= 0.0 {
            return Err(Error::Config("t_f multiplier must be positive".into()));
        }
        if let TauSelection::Fixed(tau) = self.tau {
            if tau >= (1usize << self.n_q()) {
                return Err(Error::Config(format!(
                    "fixed tau {tau} outside the register"
                )));
            }
        }
        self.check_memory(false)
    }

    /// Statevector memory estimate against the configured budget:
    /// 16 bytes per amplitude, a handful of working vectors per cell, and
    /// the full history when recording.
    pub fn check_memory(&self, history: bool) -> Result<()> {
        let amps = 1u64 << self.n_tot();
        let factor = if history { self.t_f() as u64 + 8 } else { 8 };
        let per_cell = 16 * amps * factor;
        let workers = self.resolve_workers().max(1) as u64;
        let needed = per_cell * workers.min(self.realizations.max(1) as u64);
        if needed > self.memory_budget_bytes {
            return Err(Error::Capacity(format!(
                "estimated {needed} bytes exceeds the {} byte budget",
                self.memory_budget_bytes
            )));
        }
        Ok(())
    }

    /// Worker threads: environment override, then the configured value,
    /// then one per core.
    pub fn resolve_workers(&self) -> usize {
        if let Ok(v) = std::env::var(WORKERS_ENV) {
            if let Ok(n) = v.parse::<usize>() {
                if n > 0 {
                    return n;
                }
            }
        }
        self.workers
            .unwrap_or_else(rayon::current_num_threads)
            .max(1)
    }

    pub fn lattice(&self) -> QubitLattice {
        build_lattice(self.l_x, self.l_y)
    }

    /// Searched index for a given realization seed.
    pub fn tau_for(&self, realization_seed: u64) -> usize {
        match self.tau {
            TauSelection::Fixed(tau) => tau,
            TauSelection::Random => {
                use rand::{RngExt, SeedableRng};
                let mut rng =
                    rand_chacha::ChaCha8Rng::seed_from_u64(realization_seed ^ 0x7a55_7a55);
                (rng.random::<u64>() % (1u64 << self.n_q())) as usize
            }
        }
    }

    /// Disorder seed of realization `k`.
    pub fn realization_seed(&self, k: usize) -> u64 {
        self.master_seed ^ k as u64
    }
}

/// Gate-level evolution for `T_f` iterations: each iteration applies the
/// oracle query and then every diffusion gate followed by one unit-duration
/// noise propagator (`n_g` noise slots per iteration). Records `w_G`, `w_4`
/// and fidelity at every step, plus the amplitude history on request.
pub fn run_single(
    config: &ExperimentConfig,
    epsilon: f64,
    realization_seed: u64,
    record_history: bool,
) -> Result<TimeSeries> {
    config.validate()?;
    config.check_memory(record_history)?;
    let n_q = config.n_q();
    let tau = config.tau_for(realization_seed);
    let circuit = build_grover_iteration(n_q, tau)?;
    let lattice = config.lattice();
    let realization = sample_disorder(&lattice, epsilon, realization_seed);
    let t_f = config.t_f();
    run_gate_level(&circuit, &realization, t_f, record_history)
}

/// Inner gate-level loop shared by the harness entry points.
///
/// The gate list realizes the iteration up to one global sign (its
/// reflection flips `|0...0>` rather than the rest); each iteration negates
/// the state once so the tracked phases follow the same convention as
/// [`apply_ideal_grover`] and spectra line up with the effective-model
/// quasi-energies. No observable depends on that sign.
pub fn run_gate_level(
    circuit: &crate::circuit::GroverCircuit,
    realization: &DisorderRealization,
    t_f: usize,
    record_history: bool,
) -> Result<TimeSeries> {
    if realization.n_tot() != circuit.n_tot() {
        return Err(Error::Size(format!(
            "realization covers {} sites, circuit needs {}",
            realization.n_tot(),
            circuit.n_tot()
        )));
    }
    let tau = circuit.tau();
    let epsilon = realization.epsilon();
    let noisy = epsilon > 0.0;
    let slot_noise = NoisePropagator::new(realization, 1.0);

    let mut perturbed = QuantumState::new_uniform(circuit.n_q())?;
    let mut ideal = perturbed.clone();
    let mut series = TimeSeries {
        t_f,
        tau,
        epsilon,
        seed: realization.seed(),
        w_g: Vec::with_capacity(t_f + 1),
        w_4: Vec::with_capacity(t_f + 1),
        fidelity: Vec::with_capacity(t_f + 1),
        history: if record_history {
            Some(Vec::with_capacity(t_f + 1))
        } else {
            None
        },
    };
    let record = |perturbed: &QuantumState, ideal: &QuantumState, series: &mut TimeSeries| {
        series.w_g.push(w_g(perturbed, tau).unwrap());
        series.w_4.push(w_4(perturbed, tau).unwrap());
        series.fidelity.push(fidelity(perturbed, ideal).unwrap());
        if let Some(h) = series.history.as_mut() {
            h.push(perturbed.amplitudes().to_vec());
        }
    };
    record(&perturbed, &ideal, &mut series);
    for _ in 1..=t_f {
        for gate in circuit.gates() {
            perturbed.apply_gate(gate)?;
            if noisy && !matches!(gate, GateOp::OraclePhase(_)) {
                slot_noise.apply(&mut perturbed)?;
            }
        }
        for a in perturbed.amplitudes_mut() {
            *a = -*a;
        }
        apply_ideal_grover(&mut ideal, tau)?;
        record(&perturbed, &ideal, &mut series);
    }
    Ok(series)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunKind {
    GateLevel,
    SingleKick,
}

/// Time-averaged observables of one ensemble cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RealizationSummary {
    pub realization: usize,
    pub seed: u64,
    pub tau: usize,
    pub w_g_mean: f64,
    pub w_4_mean: f64,
    /// Dominant oscillation frequency of the `w_G(t)` trace, rad/iteration.
    pub dominant_frequency: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatBlock {
    pub mean: f64,
    pub std_error: f64,
    pub min: f64,
    pub q05: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub q95: f64,
    pub max: f64,
}

impl StatBlock {
    pub fn from_samples(samples: &[f64]) -> StatBlock {
        let n = samples.len();
        let mut sorted = samples.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mean = sorted.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            sorted.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        let quantile = |p: f64| -> f64 {
            let pos = p * (n - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            if lo == hi {
                sorted[lo]
            } else {
                sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
            }
        };
        StatBlock {
            mean,
            std_error: (var / n as f64).sqrt(),
            min: sorted[0],
            q05: quantile(0.05),
            q25: quantile(0.25),
            median: quantile(0.5),
            q75: quantile(0.75),
            q95: quantile(0.95),
            max: sorted[n - 1],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpsilonStats {
    pub epsilon: f64,
    pub eps_over_eps_c: f64,
    pub per_realization: Vec<RealizationSummary>,
    pub w_g: StatBlock,
    pub w_4: StatBlock,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub kind: RunKind,
    pub n_tot: usize,
    pub n_g: usize,
    pub t_f: usize,
    pub master_seed: u64,
    pub code_version: String,
    pub epsilons: Vec<EpsilonStats>,
}

/// Run every (epsilon, realization) cell of the grid in parallel and
/// aggregate per-epsilon statistics of the time-averaged observables over
/// the window `[1, T_f]`.
pub fn run_ensemble(config: &ExperimentConfig) -> Result<EnsembleResult> {
    run_ensemble_inner(config, RunKind::GateLevel)
}

/// Same grid and seeds as [`run_ensemble`], evolved in the single-kick model.
pub fn run_kick_ensemble(config: &ExperimentConfig) -> Result<EnsembleResult> {
    run_ensemble_inner(config, RunKind::SingleKick)
}

fn run_ensemble_inner(config: &ExperimentConfig, kind: RunKind) -> Result<EnsembleResult> {
    config.validate()?;
    let n_q = config.n_q();
    let t_f = config.t_f();
    let n_g = build_grover_iteration(n_q, 0)?.n_g();
    let lattice = config.lattice();
    let workers = config.resolve_workers();

    let cells: Vec<(usize, usize)> = (0..config.epsilons.len())
        .flat_map(|e| (0..config.realizations).map(move |k| (e, k)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let outcomes: Vec<((usize, usize), Result<RealizationSummary>)> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(e_idx, k)| {
                let seed = config.realization_seed(k);
                let tau = config.tau_for(seed);
                let epsilon = config.epsilons[e_idx];
                let summary = (|| -> Result<RealizationSummary> {
                    let series = match kind {
                        RunKind::GateLevel => {
                            let circuit = build_grover_iteration(n_q, tau)?;
                            let realization = sample_disorder(&lattice, epsilon, seed);
                            run_gate_level(&circuit, &realization, t_f, false)?
                        }
                        RunKind::SingleKick => {
                            let realization = sample_disorder(&lattice, epsilon, seed);
                            single_kick_run(n_q, tau, &realization, config.kick_r, t_f, false)?
                        }
                    };
                    let avg = series.time_average((1, t_f))?;
                    Ok(RealizationSummary {
                        realization: k,
                        seed,
                        tau,
                        w_g_mean: avg.w_g,
                        w_4_mean: avg.w_4,
                        dominant_frequency: dominant_frequency(&series.w_g),
                    })
                })();
                ((e_idx, k), summary)
            })
            .collect()
    });

    // deterministic reassembly in cell order
    let mut table: Vec<Vec<Option<RealizationSummary>>> =
        vec![vec![None; config.realizations]; config.epsilons.len()];
    let mut completed = Vec::new();
    let mut first_error: Option<String> = None;
    for ((e_idx, k), outcome) in outcomes {
        match outcome {
            Ok(summary) => {
                table[e_idx][k] = Some(summary);
                completed.push((e_idx, k));
            }
            Err(err) => {
                if first_error.is_none() {
                    first_error = Some(err.to_string());
                }
            }
        }
    }
    if let Some(message) = first_error {
        completed.sort_unstable();
        return Err(Error::Partial { completed, message });
    }

    let epsilons = config
        .epsilons
        .iter()
        .enumerate()
        .map(|(e_idx, &epsilon)| {
            let per_realization: Vec<RealizationSummary> = table[e_idx]
                .iter()
                .map(|s| s.clone().expect("all cells completed"))
                .collect();
            let w_g_samples: Vec<f64> = per_realization.iter().map(|s| s.w_g_mean).collect();
            let w_4_samples: Vec<f64> = per_realization.iter().map(|s| s.w_4_mean).collect();
            EpsilonStats {
                epsilon,
                eps_over_eps_c: epsilon / epsilon_critical(n_g, config.n_tot()),
                w_g: StatBlock::from_samples(&w_g_samples),
                w_4: StatBlock::from_samples(&w_4_samples),
                per_realization,
            }
        })
        .collect();

    Ok(EnsembleResult {
        kind,
        n_tot: config.n_tot(),
        n_g,
        t_f,
        master_seed: config.master_seed,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        epsilons,
    })
}

/// Spectral phase diagram: one disorder shape (realization 0 of the master
/// seed) rescaled across the epsilon grid, one full run with history and one
/// spectral density per grid value.
#[derive(Debug, Clone)]
pub struct PhaseDiagram {
    pub epsilons: Vec<f64>,
    pub t_f: usize,
    pub rows: Vec<SpectralDensity>,
}

pub fn scan_phase_diagram(config: &ExperimentConfig) -> Result<PhaseDiagram> {
    config.validate()?;
    config.check_memory(true)?;
    let seed = config.realization_seed(0);
    let tau = config.tau_for(seed);
    let n_q = config.n_q();
    let t_f = config.t_f();
    let circuit = build_grover_iteration(n_q, tau)?;
    let lattice = config.lattice();
    let workers = config.resolve_workers();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let rows: Result<Vec<SpectralDensity>> = pool.install(|| {
        config
            .epsilons
            .par_iter()
            .map(|&epsilon| {
                let realization = sample_disorder(&lattice, epsilon, seed);
                let series = run_gate_level(&circuit, &realization, t_f, true)?;
                spectral_density(series.history.as_ref().unwrap(), t_f, epsilon, seed)
            })
            .collect()
    });
    Ok(PhaseDiagram {
        epsilons: config.epsilons.clone(),
        t_f,
        rows: rows?,
    })
}

#[derive(Debug, Clone)]
pub struct HusimiSnapshot {
    pub epsilon: f64,
    pub t: usize,
    pub grid: HusimiGrid,
}

/// Phase-space snapshots at the requested iteration times for every epsilon
/// in the grid, all sharing the master seed's disorder shape.
pub fn husimi_snapshots(config: &ExperimentConfig, times: &[usize]) -> Result<Vec<HusimiSnapshot>> {
    config.validate()?;
    config.check_memory(true)?;
    let t_f = config.t_f();
    if let Some(&bad) = times.iter().find(|&&t| t > t_f) {
        return Err(Error::Domain(format!(
            "snapshot time {bad} beyond t_f = {t_f}"
        )));
    }
    let seed = config.realization_seed(0);
    let tau = config.tau_for(seed);
    let circuit = build_grover_iteration(config.n_q(), tau)?;
    let lattice = config.lattice();
    let m = 1usize << config.n_tot();
    let cells = m.min(128);
    let mut out = Vec::new();
    for &epsilon in &config.epsilons {
        let realization = sample_disorder(&lattice, epsilon, seed);
        let series = run_gate_level(&circuit, &realization, t_f, true)?;
        let history = series.history.as_ref().unwrap();
        for &t in times {
            let state = QuantumState::from_amplitudes(history[t].clone())?;
            out.push(HusimiSnapshot {
                epsilon,
                t,
                grid: husimi(&state, (cells, cells))?,
            });
        }
    }
    Ok(out)
}

/// One row of the model-comparison table.
#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub eps_over_eps_c: f64,
    pub epsilon: f64,
    pub full_w_g: f64,
    pub full_w_g_min: f64,
    pub full_w_g_max: f64,
    pub kick_w_g: f64,
    pub theory_w_g: f64,
    pub full_w_4: f64,
    pub full_w_4_min: f64,
    pub full_w_4_max: f64,
    pub kick_w_4: f64,
}

/// Align full-simulation averages, single-kick averages and the closed-form
/// curve on a common epsilon grid.
pub fn compare_models(
    full: &EnsembleResult,
    kick: &EnsembleResult,
    r: f64,
) -> Result<Vec<CompareRow>> {
    if full.epsilons.len() != kick.epsilons.len() || full.n_tot != kick.n_tot {
        return Err(Error::Size("ensemble grids do not match".into()));
    }
    let n_q = full.n_tot - 1;
    let omega_g = crate::circuit::grover_frequency(n_q);
    full.epsilons
        .iter()
        .zip(kick.epsilons.iter())
        .map(|(f, k)| {
            if (f.epsilon - k.epsilon).abs() > 1e-15 {
                return Err(Error::Size("epsilon grids differ".into()));
            }
            Ok(CompareRow {
                eps_over_eps_c: f.eps_over_eps_c,
                epsilon: f.epsilon,
                full_w_g: f.w_g.mean,
                full_w_g_min: f.w_g.min,
                full_w_g_max: f.w_g.max,
                kick_w_g: k.w_g.mean,
                theory_w_g: mean_w_g_theory(sigma_width(f.epsilon, r, full.n_g, n_q), omega_g)?,
                full_w_4: f.w_4.mean,
                full_w_4_min: f.w_4.min,
                full_w_4_max: f.w_4.max,
                kick_w_4: k.w_4.mean,
            })
        })
        .collect()
}
