//! One Grover iteration as an elementary-gate sequence, plus the exact
//! operator reference used as ground truth.
//!
//! The iteration is `G = D O` with the oracle `O` flipping the sign of the
//! searched state on both ancilla branches, and the diffusion
//! `D = W R W` built from Hadamard walls around a phase flip of `|0...0>`.
//! `R` is realized as `X_all (H_nq  AND_gate  H_nq) X_all`, where the
//! multi-controlled NOT is decomposed into 3-qubit Toffolis with the ancilla
//! qubit (idle during `R`) as the one dirty auxiliary. For `n_tot >= 7` that
//! decomposition takes `8 (n_tot - 5)` Toffolis and the whole diffusion comes
//! to `12 n_tot - 42` elementary gates; the oracle is treated as a black-box
//! query and charged no gate slot, so the per-iteration slot count equals
//! `12 n_tot - 42` as well.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{GateOp, QuantumState};

/// Ideal rotation angle per iteration: `omega_G = 2 arcsin(sqrt(1/N))`.
pub fn grover_frequency(n_q: usize) -> f64 {
    let n = (1u64 << n_q) as f64;
    2.0 * (1.0 / n.sqrt()).asin()
}

/// Oscillation period `T_G = pi / (2 omega_G)`, in iterations (real-valued).
pub fn grover_period(n_q: usize) -> f64 {
    std::f64::consts::PI / (2.0 * grover_frequency(n_q))
}

/// Gate sequence of one Grover iteration for searched index `tau`.
#[derive(Debug, Clone)]
pub struct GroverCircuit {
    n_q: usize,
    tau: usize,
    gates: Vec<GateOp>,
    n_g: usize,
}

impl GroverCircuit {
    pub fn n_q(&self) -> usize {
        self.n_q
    }

    pub fn n_tot(&self) -> usize {
        self.n_q + 1
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    /// Imperfection slots carried by one iteration (see [`count_gate_slots`]).
    pub fn n_g(&self) -> usize {
        self.n_g
    }

    /// Apply the full gate sequence once, in place.
    pub fn apply(&self, state: &mut QuantumState) -> Result<()> {
        for g in &self.gates {
            state.apply_gate(g)?;
        }
        Ok(())
    }

    /// Plain-text listing, one gate per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            out.push_str(&g.dump_line());
            out.push('\n');
        }
        out
    }
}

/// Dirty-work ladder: flips `target` iff all `controls` are 1, using
/// `controls.len() - 2` work qubits in arbitrary states (restored exactly).
/// Emits `4 (k - 2)` Toffolis for `k = controls.len() >= 3`.
fn ladder(controls: &[usize], target: usize, works: &[usize]) -> Vec<GateOp> {
    let k = controls.len();
    assert!(k >= 3 && works.len() >= k - 2);
    let mut descent = Vec::with_capacity(k - 1);
    descent.push(GateOp::Toffoli(controls[k - 1], works[k - 3], target));
    for i in (2..k - 1).rev() {
        descent.push(GateOp::Toffoli(controls[i], works[i - 2], works[i - 1]));
    }
    descent.push(GateOp::Toffoli(controls[0], controls[1], works[0]));
    let ascent: Vec<GateOp> = descent[1..descent.len() - 1]
        .iter()
        .rev()
        .cloned()
        .collect();
    let mut bracket = descent;
    bracket.extend(ascent);
    let mut out = bracket.clone();
    out.extend(bracket);
    out
}

/// Multi-controlled NOT on `controls -> target` helped by one dirty
/// `auxiliary` qubit. Correct for arbitrary auxiliary input, which is
/// restored. For `k = controls.len() >= 5` (network size `>= 7`) this is the
/// two-ladder construction with exactly `8 (k - 3)` Toffolis; smaller cases
/// fall back to an elementary gate or a single multi-controlled permutation.
pub fn build_generalized_toffoli(
    controls: &[usize],
    target: usize,
    auxiliary: usize,
) -> Result<Vec<GateOp>> {
    let mut seen = std::collections::BTreeSet::new();
    for &q in controls.iter().chain([&target, &auxiliary]) {
        if q == 0 {
            return Err(Error::Index("qubit indices are 1-based".into()));
        }
        if !seen.insert(q) {
            return Err(Error::Index(format!("qubit {q} used twice")));
        }
    }
    let k = controls.len();
    Ok(match k {
        0 => vec![GateOp::PauliX(target)],
        1 => vec![GateOp::ControlledNot(controls[0], target)],
        2 => vec![GateOp::Toffoli(controls[0], controls[1], target)],
        3 | 4 => vec![GateOp::MultiControlledX {
            controls: controls.to_vec(),
            target,
        }],
        _ => {
            // Toggle scheme: A toggles AND(group1) into the auxiliary, B uses
            // it; A B A B flips the target iff all controls are 1 and leaves
            // the auxiliary untouched regardless of its input.
            let k1 = k.div_ceil(2);
            let (group1, group2) = controls.split_at(k1);
            let mut works_a = group2.to_vec();
            works_a.push(target);
            let a = ladder(group1, auxiliary, &works_a);
            let mut controls_b = group2.to_vec();
            controls_b.push(auxiliary);
            let b = ladder(&controls_b, target, group1);
            let mut out = Vec::with_capacity(2 * (a.len() + b.len()));
            out.extend(a.iter().cloned());
            out.extend(b.iter().cloned());
            out.extend(a);
            out.extend(b);
            out
        }
    })
}

/// Build the gate sequence of one Grover iteration: oracle, Hadamard wall,
/// reflection about `|0...0>`, Hadamard wall.
pub fn build_grover_iteration(n_q: usize, tau: usize) -> Result<GroverCircuit> {
    if n_q == 0 || n_q > 24 {
        return Err(Error::Size(format!("n_q = {n_q} outside [1, 24]")));
    }
    let n = 1usize << n_q;
    if tau >= n {
        return Err(Error::Domain(format!("tau = {tau} outside [0, {n})")));
    }
    let n_tot = n_q + 1;
    let mut gates = vec![GateOp::OraclePhase(tau)];
    let wall = |gates: &mut Vec<GateOp>| {
        for q in 1..=n_q {
            gates.push(GateOp::Hadamard(q));
        }
    };
    let x_layer = |gates: &mut Vec<GateOp>| {
        for q in 1..=n_q {
            gates.push(GateOp::PauliX(q));
        }
    };
    wall(&mut gates);
    x_layer(&mut gates);
    gates.push(GateOp::Hadamard(n_q));
    let controls: Vec<usize> = (1..n_q).collect();
    gates.extend(build_generalized_toffoli(&controls, n_q, n_tot)?);
    gates.push(GateOp::Hadamard(n_q));
    x_layer(&mut gates);
    wall(&mut gates);

    let mut circuit = GroverCircuit {
        n_q,
        tau,
        gates,
        n_g: 0,
    };
    circuit.n_g = count_gate_slots(&circuit);
    Ok(circuit)
}

/// Imperfection-slot count of one iteration: every physical gate in the list
/// is one slot; the oracle is a black-box query and carries none. With the
/// default construction this equals `12 n_tot - 42` for `n_tot >= 7`.
pub fn count_gate_slots(circuit: &GroverCircuit) -> usize {
    circuit
        .gates
        .iter()
        .filter(|g| !matches!(g, GateOp::OraclePhase(_)))
        .count()
}

/// Exact operator application of `G = D O` in `O(M)` arithmetic: negate the
/// searched amplitudes on both ancilla branches, then reflect each branch
/// about its own mean (`psi_x <- 2 mean - psi_x`, the `D_ii = -1 + 2/N`
/// convention). The gate-built circuit equals this up to a global sign.
pub fn apply_ideal_grover(state: &mut QuantumState, tau: usize) -> Result<()> {
    let m = state.dim();
    let n = m / 2;
    if tau >= n {
        return Err(Error::Domain(format!("tau = {tau} outside [0, {n})")));
    }
    let amps = state.amplitudes_mut();
    amps[tau] = -amps[tau];
    amps[tau + n] = -amps[tau + n];
    for block in 0..2 {
        let lo = block * n;
        let sum: Complex64 = amps[lo..lo + n].iter().sum();
        let twice_mean = sum * (2.0 / n as f64);
        for a in amps[lo..lo + n].iter_mut() {
            *a = twice_mean - *a;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::inner_product;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(n_tot: usize, seed: u64) -> QuantumState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = 1usize << n_tot;
        let mut amps: Vec<Complex64> = (0..m)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in amps.iter_mut() {
            *a /= norm;
        }
        QuantumState::from_amplitudes(amps).unwrap()
    }

    #[test]
    fn frequency_and_period_values() {
        assert!((grover_frequency(2) - std::f64::consts::FRAC_PI_3).abs() < 1e-15);
        assert!((grover_frequency(11) - 0.0441978).abs() < 1e-6);
        assert!((grover_period(2) - 1.5).abs() < 1e-14);
        assert!((grover_period(11) - 35.54).abs() < 0.01);
        // small-angle asymptote: omega_G sqrt(N) -> 2
        let w = grover_frequency(24);
        assert!((w * ((1u64 << 24) as f64).sqrt() - 2.0).abs() < 1e-6);
        // period snapshot consistency for n_tot = 12 trajectories
        let rounded = grover_period(11).round();
        assert!((34.0..=36.0).contains(&rounded));
    }

    #[test]
    fn generalized_toffoli_counts() {
        // n_tot = 12 network: 10 controls, one target, one auxiliary
        let controls: Vec<usize> = (1..=10).collect();
        let gates = build_generalized_toffoli(&controls, 11, 12).unwrap();
        assert_eq!(gates.len(), 56);
        assert!(gates.iter().all(|g| matches!(g, GateOp::Toffoli(..))));

        let controls: Vec<usize> = (1..=5).collect();
        let gates = build_generalized_toffoli(&controls, 6, 7).unwrap();
        assert_eq!(gates.len(), 16);

        assert!(build_generalized_toffoli(&[1, 2, 1], 4, 5).is_err());
        assert!(build_generalized_toffoli(&[1, 2], 3, 3).is_err());
    }

    #[test]
    fn generalized_toffoli_truth_table() {
        // all-ones controls flip the target for every (target, aux) input pair
        let controls: Vec<usize> = (1..=5).collect();
        let gates = build_generalized_toffoli(&controls, 6, 7).unwrap();
        let ones = 0b11111usize;
        for t_bit in [0usize, 1] {
            for a_bit in [0usize, 1] {
                let x = ones | (t_bit << 5) | (a_bit << 6);
                let mut s = QuantumState::basis(7, x).unwrap();
                for g in &gates {
                    s.apply_gate(g).unwrap();
                }
                let expect = x ^ (1 << 5);
                assert!((s.amplitudes()[expect].re - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn generalized_toffoli_equals_permutation_on_all_basis_states() {
        let controls: Vec<usize> = (1..=5).collect();
        let gates = build_generalized_toffoli(&controls, 6, 7).unwrap();
        let ones = 0b11111usize;
        for x in 0..(1usize << 7) {
            let mut s = QuantumState::basis(7, x).unwrap();
            for g in &gates {
                s.apply_gate(g).unwrap();
            }
            let expect = if x & ones == ones { x ^ (1 << 5) } else { x };
            assert!(
                (s.amplitudes()[expect].re - 1.0).abs() < 1e-12,
                "x = {x} mapped wrong"
            );
        }
    }

    #[test]
    fn slot_count_law() {
        for n_tot in 7..=17 {
            let c = build_grover_iteration(n_tot - 1, 0).unwrap();
            assert_eq!(count_gate_slots(&c), 12 * n_tot - 42, "n_tot = {n_tot}");
            assert_eq!(c.n_g(), 12 * n_tot - 42);
        }
        assert_eq!(build_grover_iteration(11, 0).unwrap().n_g(), 102);
        assert_eq!(build_grover_iteration(15, 0).unwrap().n_g(), 150);
        assert_eq!(build_grover_iteration(8, 0).unwrap().n_g(), 66);
        assert_eq!(build_grover_iteration(6, 0).unwrap().n_g(), 42);
    }

    #[test]
    fn rejects_bad_tau() {
        assert!(build_grover_iteration(3, 8).is_err());
        assert!(build_grover_iteration(3, 7).is_ok());
    }

    #[test]
    fn gate_circuit_matches_matrix_up_to_global_phase() {
        for n_q in [2usize, 4, 7] {
            let tau = (1usize << n_q) / 3;
            let circuit = build_grover_iteration(n_q, tau).unwrap();
            for seed in 0..(if n_q == 7 { 50 } else { 10 }) {
                let s0 = random_state(n_q + 1, seed);
                let mut gate_path = s0.clone();
                circuit.apply(&mut gate_path).unwrap();
                let mut matrix_path = s0;
                apply_ideal_grover(&mut matrix_path, tau).unwrap();
                let overlap = inner_product(&gate_path, &matrix_path).unwrap().norm();
                assert!(
                    (overlap - 1.0).abs() < 1e-10,
                    "n_q = {n_q}, seed = {seed}, overlap = {overlap}"
                );
            }
        }
    }

    #[test]
    fn repeated_iterations_track_matrix_reference() {
        let n_q = 7;
        let tau = 5;
        let circuit = build_grover_iteration(n_q, tau).unwrap();
        let mut gate_path = QuantumState::new_uniform(n_q).unwrap();
        let mut matrix_path = gate_path.clone();
        for t in 1..=20 {
            circuit.apply(&mut gate_path).unwrap();
            apply_ideal_grover(&mut matrix_path, tau).unwrap();
            let overlap = inner_product(&gate_path, &matrix_path).unwrap().norm();
            assert!((overlap - 1.0).abs() < 1e-10, "t = {t}");
            // ancilla restored: no probability above N
            let n = gate_path.dim() / 2;
            let upper: f64 = gate_path.amplitudes()[n..]
                .iter()
                .map(|a| a.norm_sqr())
                .sum();
            assert!(upper < 1e-12, "t = {t}, upper = {upper}");
        }
    }

    #[test]
    fn exact_amplitude_law() {
        let n_q = 6;
        let n = 1usize << n_q;
        let tau = 11;
        let theta = (1.0 / (n as f64).sqrt()).asin();
        let mut s = QuantumState::new_uniform(n_q).unwrap();
        for t in 1..=40 {
            apply_ideal_grover(&mut s, tau).unwrap();
            let expect = ((2 * t + 1) as f64 * theta).sin().abs();
            assert!(
                (s.amplitudes()[tau].norm() - expect).abs() < 1e-10,
                "t = {t}"
            );
        }
    }

    #[test]
    fn two_plane_invariant_and_n4_magic_case() {
        // n_q = 2, tau = 0: one iteration moves all probability onto tau
        let mut s = QuantumState::new_uniform(2).unwrap();
        apply_ideal_grover(&mut s, 0).unwrap();
        assert!((s.amplitudes()[0].norm_sqr() - 1.0).abs() < 1e-12);

        // trajectory stays in span{|tau>, |eta>}: non-tau amplitudes equal
        let n_q = 5;
        let tau = 3;
        let n = 1usize << n_q;
        let mut s = QuantumState::new_uniform(n_q).unwrap();
        for _ in 0..25 {
            apply_ideal_grover(&mut s, tau).unwrap();
            let reference = s.amplitudes()[if tau == 0 { 1 } else { 0 }];
            for x in 0..n {
                if x != tau {
                    assert!((s.amplitudes()[x] - reference).norm() < 1e-12);
                }
            }
            let upper: f64 = s.amplitudes()[n..].iter().map(|a| a.norm_sqr()).sum();
            assert!(upper < 1e-14);
        }
    }

    #[test]
    fn small_system_fallback_circuits_are_correct() {
        // n_tot = 5 and 6 use the single multi-controlled permutation
        for n_q in [4usize, 5] {
            let circuit = build_grover_iteration(n_q, 1).unwrap();
            assert!(circuit
                .gates()
                .iter()
                .any(|g| matches!(g, GateOp::MultiControlledX { .. })));
            let s0 = random_state(n_q + 1, 42);
            let mut gate_path = s0.clone();
            circuit.apply(&mut gate_path).unwrap();
            let mut matrix_path = s0;
            apply_ideal_grover(&mut matrix_path, 1).unwrap();
            let overlap = inner_product(&gate_path, &matrix_path).unwrap().norm();
            assert!((overlap - 1.0).abs() < 1e-10, "n_q = {n_q}");
        }
    }

    #[test]
    fn dump_lists_one_gate_per_line() {
        let c = build_grover_iteration(3, 2).unwrap();
        let dump = c.dump();
        assert_eq!(dump.lines().count(), c.gates().len());
        assert!(dump.starts_with("oracle 2\n"));
        assert!(dump.contains("toffoli 1 2 3"));
    }
}
