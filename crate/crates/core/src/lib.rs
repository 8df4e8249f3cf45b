//! Gate-level statevector simulation of Grover search subject to static
//! inter-qubit imperfections, with the observables, analytic effective
//! models, and the seeded experiment harness used to map out the regular
//! and chaotic regimes.

pub mod circuit;
pub mod disorder;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod linalg;
pub mod observables;
pub mod special;
pub mod state;
pub mod theory;

pub use circuit::{
    apply_ideal_grover, build_generalized_toffoli, build_grover_iteration, count_gate_slots,
    grover_frequency, grover_period, GroverCircuit,
};
pub use disorder::{
    apply_noise_propagator, dense_expm_oracle, dense_h_s, sample_disorder, DisorderRealization,
    NoisePropagator, SUBSTEP_ANGLE_BUDGET,
};
pub use error::{Error, Result};
pub use harness::{
    compare_models, husimi_snapshots, run_ensemble, run_kick_ensemble, run_single,
    scan_phase_diagram, CompareRow, EnsembleResult, ExperimentConfig, TauSelection,
};
pub use lattice::{build_lattice, QubitLattice};
pub use observables::{
    fidelity, four_state_overlaps, husimi, spectral_density, spectral_peaks, w_4, w_g, HusimiGrid,
    SpectralDensity, TimeSeries,
};
pub use state::{inner_product, GateOp, QuantumState};
pub use theory::{
    build_h_eff, epsilon_critical, fit_kick_factor, mean_w_g_theory, operations_budget,
    renormalized_frequency, sigma_width, single_kick_run, two_level_w_g, EffectiveHamiltonian4,
    DEFAULT_KICK_FACTOR,
};
