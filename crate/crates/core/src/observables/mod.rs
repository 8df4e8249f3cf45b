//! Measured quantities: searched-state probability `w_G`, four-state weight
//! `w_4`, fidelity against the ideal evolution, phase-space (Husimi)
//! distributions and the spectral density of the amplitude history.
//!
//! The four-state basis for searched index `tau` is `|tau>`, `|tau + N>`,
//! and the two uniform-over-the-rest states `|eta_0>`, `|eta_1>` on the two
//! ancilla branches.

pub mod husimi;
pub mod spectral;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::QuantumState;

pub use husimi::{husimi, HusimiGrid};
pub use spectral::{
    dominant_frequency, parseval_sum, spectral_density, spectral_peaks, Peak, SpectralDensity,
};

fn check_tau(state: &QuantumState, tau: usize) -> Result<usize> {
    let n = state.dim() / 2;
    if state.n_tot() < 2 || tau >= n {
        return Err(Error::Domain(format!(
            "tau = {tau} outside [0, {n}) for dimension {}",
            state.dim()
        )));
    }
    Ok(n)
}

/// Probability on the searched state and its ancilla-flipped partner:
/// `|psi_tau|^2 + |psi_{tau+N}|^2`.
pub fn w_g(state: &QuantumState, tau: usize) -> Result<f64> {
    let n = check_tau(state, tau)?;
    let amps = state.amplitudes();
    Ok(amps[tau].norm_sqr() + amps[tau + n].norm_sqr())
}

/// Overlaps of `state` with the four-state basis, in the order
/// `(tau_0, tau_1, eta_0, eta_1)`.
pub fn four_state_overlaps(state: &QuantumState, tau: usize) -> Result<[Complex64; 4]> {
    let n = check_tau(state, tau)?;
    let amps = state.amplitudes();
    let sqrt_rest = ((n - 1) as f64).sqrt();
    let lower: Complex64 = amps[..n].iter().sum();
    let upper: Complex64 = amps[n..].iter().sum();
    Ok([
        amps[tau],
        amps[tau + n],
        (lower - amps[tau]) / sqrt_rest,
        (upper - amps[tau + n]) / sqrt_rest,
    ])
}

/// Probability inside the four-state subspace. Computed as `w_G` plus the
/// two `eta` overlaps, so `w_4 >= w_G` holds exactly.
pub fn w_4(state: &QuantumState, tau: usize) -> Result<f64> {
    let n = check_tau(state, tau)?;
    if n < 2 {
        return Err(Error::Domain("four-state basis needs N >= 2".into()));
    }
    let ov = four_state_overlaps(state, tau)?;
    Ok(w_g(state, tau)? + ov[2].norm_sqr() + ov[3].norm_sqr())
}

/// Squared overlap of the perturbed and ideal wavefunctions at equal times.
pub fn fidelity(perturbed: &QuantumState, ideal: &QuantumState) -> Result<f64> {
    Ok(crate::state::inner_product(ideal, perturbed)?.norm_sqr())
}

/// Per-step record of one run; `t` runs over `0..=t_f`.
#[derive(Debug, Clone)]
pub struct TimeSeries {
    pub t_f: usize,
    pub tau: usize,
    pub epsilon: f64,
    pub seed: u64,
    pub w_g: Vec<f64>,
    pub w_4: Vec<f64>,
    pub fidelity: Vec<f64>,
    /// Full amplitude history (one vector per step), kept only when spectral
    /// or phase-space analysis was requested.
    pub history: Option<Vec<Vec<Complex64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Averages {
    pub w_g: f64,
    pub w_4: f64,
    pub fidelity: f64,
}

impl TimeSeries {
    /// Arithmetic means over the inclusive step window `[t1, t2]`.
    /// The conventional window is `[1, T_f]`.
    pub fn time_average(&self, window: (usize, usize)) -> Result<Averages> {
        let (t1, t2) = window;
        if t1 > t2 || t2 > self.t_f {
            return Err(Error::Domain(format!(
                "window [{t1}, {t2}] not inside [0, {}]",
                self.t_f
            )));
        }
        let len = (t2 - t1 + 1) as f64;
        let mean = |v: &[f64]| v[t1..=t2].iter().sum::<f64>() / len;
        Ok(Averages {
            w_g: mean(&self.w_g),
            w_4: mean(&self.w_4),
            fidelity: mean(&self.fidelity),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::apply_ideal_grover;
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
    fn w_g_examples() {
        let n_q = 4;
        let tau = 7;
        let s = QuantumState::basis(n_q + 1, tau).unwrap();
        assert!((w_g(&s, tau).unwrap() - 1.0).abs() < 1e-15);

        let s = QuantumState::new_uniform(n_q).unwrap();
        assert!((w_g(&s, tau).unwrap() - 1.0 / 16.0).abs() < 1e-15);

        // |eta> has no tau component
        let n = 1usize << n_q;
        let mut amps = vec![Complex64::new(1.0 / ((n - 1) as f64).sqrt(), 0.0); 2 * n];
        amps[tau] = Complex64::new(0.0, 0.0);
        for a in amps.iter_mut().skip(n) {
            *a = Complex64::new(0.0, 0.0);
        }
        let eta = QuantumState::from_amplitudes(amps).unwrap();
        assert!(w_g(&eta, tau).unwrap() < 1e-15);

        assert!(w_g(&s, 16).is_err());
    }

    #[test]
    fn w_4_examples() {
        // the uniform start state lies in span{tau_0, eta_0}
        let s = QuantumState::new_uniform(5).unwrap();
        assert!((w_4(&s, 3).unwrap() - 1.0).abs() < 1e-12);

        // ideal evolution never leaves the invariant plane
        let tau = 9;
        let mut s = QuantumState::new_uniform(5).unwrap();
        for _ in 0..40 {
            apply_ideal_grover(&mut s, tau).unwrap();
            assert!((w_4(&s, tau).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn w_g_never_exceeds_w_4() {
        for seed in 0..20 {
            let s = random_state(6, seed);
            let tau = (seed as usize * 7) % 32;
            assert!(w_g(&s, tau).unwrap() <= w_4(&s, tau).unwrap());
            assert!(w_4(&s, tau).unwrap() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn four_state_projector_is_idempotent() {
        let n_q = 5;
        let n = 1usize << n_q;
        let tau = 11;
        let s = random_state(n_q + 1, 3);
        let ov = four_state_overlaps(&s, tau).unwrap();
        // assemble the projected state
        let sqrt_rest = ((n - 1) as f64).sqrt();
        let mut proj = vec![Complex64::new(0.0, 0.0); 2 * n];
        for x in 0..n {
            if x != tau {
                proj[x] = ov[2] / sqrt_rest;
                proj[x + n] = ov[3] / sqrt_rest;
            }
        }
        proj[tau] = ov[0];
        proj[tau + n] = ov[1];
        let projected = QuantumState::from_amplitudes(proj).unwrap();
        let ov2 = four_state_overlaps(&projected, tau).unwrap();
        for (a, b) in ov.iter().zip(ov2.iter()) {
            assert!((a - b).norm() < 1e-13);
        }
        assert!((w_4(&projected, tau).unwrap() - w_4(&s, tau).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn fidelity_examples() {
        let a = random_state(4, 1);
        assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-13);
        let zero = QuantumState::basis(3, 0).unwrap();
        let one = QuantumState::basis(3, 5).unwrap();
        assert!(fidelity(&zero, &one).unwrap() < 1e-15);
        // symmetry
        let b = random_state(4, 2);
        assert_eq!(fidelity(&a, &b).unwrap(), fidelity(&b, &a).unwrap());
        // size mismatch
        assert!(fidelity(&a, &zero).is_err());
    }

    #[test]
    fn time_average_examples() {
        // n_q = 2: the ideal w_G sequence has exact period 3 and mean 1/2
        let mut s = QuantumState::new_uniform(2).unwrap();
        let mut w = vec![w_g(&s, 0).unwrap()];
        for _ in 1..=6 {
            apply_ideal_grover(&mut s, 0).unwrap();
            w.push(w_g(&s, 0).unwrap());
        }
        let series = TimeSeries {
            t_f: 6,
            tau: 0,
            epsilon: 0.0,
            seed: 0,
            w_g: w.clone(),
            w_4: vec![1.0; 7],
            fidelity: vec![1.0; 7],
            history: None,
        };
        let avg = series.time_average((1, 3)).unwrap();
        assert!((avg.w_g - 0.5).abs() < 1e-12);
        assert!((avg.w_4 - 1.0).abs() < 1e-15);

        // constant series averages to the constant
        let avg = series.time_average((2, 2)).unwrap();
        assert!((avg.w_g - w[2]).abs() < 1e-15);

        assert!(series.time_average((5, 4)).is_err());
        assert!(series.time_average((0, 7)).is_err());
    }
}
