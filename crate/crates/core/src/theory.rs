//! Analytic layer: the critical imperfection strength, the single-kick
//! model, the 4x4 effective Hamiltonian of the four-state subspace with its
//! 2x2 reduction, the Gaussian-averaged searched-state probability and the
//! operations-budget estimates.

use num_complex::Complex64;

use crate::circuit::{apply_ideal_grover, build_grover_iteration, grover_frequency};
use crate::disorder::{dense_h_s, DisorderRealization, NoisePropagator};
use crate::error::{Error, Result};
use crate::linalg::hermitian_eigen;
use crate::observables::{fidelity, w_4, w_g, TimeSeries};
use crate::special::erfcx;
use crate::state::{z_sign, QuantumState};

/// Fitted renormalization factor of the single-kick model, used wherever a
/// kick factor is needed unless overridden.
pub const DEFAULT_KICK_FACTOR: f64 = 0.56;

/// Critical imperfection strength `1.7 / (n_g sqrt(n_tot))` separating the
/// regular and chaotic regimes.
pub fn epsilon_critical(n_g: usize, n_tot: usize) -> f64 {
    1.7 / (n_g as f64 * (n_tot as f64).sqrt())
}

/// Width of the Gaussian distribution of the four-state detuning for
/// `alpha = beta = epsilon`: `sigma = epsilon R n_g sqrt(n_q)`.
pub fn sigma_width(epsilon: f64, r: f64, n_g: usize, n_q: usize) -> f64 {
    epsilon * r * n_g as f64 * (n_q as f64).sqrt()
}

/// General-interval form `R n_g sqrt(n_q / 3) sqrt(alpha^2 + 2 beta^2)`;
/// reduces to [`sigma_width`] when `alpha == beta`.
pub fn sigma_width_general(alpha: f64, beta: f64, r: f64, n_g: usize, n_q: usize) -> f64 {
    r * n_g as f64 * (n_q as f64 / 3.0).sqrt() * (alpha * alpha + 2.0 * beta * beta).sqrt()
}

/// Long-time averaged searched-state probability of the reduced two-level
/// system with detuning `tau_shift - eta_shift`:
/// `2 omega_G^2 / ((A - B)^2 + 4 omega_G^2)`.
pub fn two_level_w_g(tau_shift: f64, eta_shift: f64, omega_g: f64) -> f64 {
    let d = tau_shift - eta_shift;
    2.0 * omega_g * omega_g / (d * d + 4.0 * omega_g * omega_g)
}

/// Ensemble-averaged searched-state probability: the Gaussian convolution of
/// [`two_level_w_g`] in closed form,
/// `sqrt(pi/2) (omega_G / sigma) erfcx(sqrt(2) omega_G / sigma)`,
/// evaluated through the scaled complementary error function so small
/// `sigma` cannot overflow; the `sigma -> 0` limit is exactly 1/2.
pub fn mean_w_g_theory(sigma: f64, omega_g: f64) -> Result<f64> {
    if sigma < 0.0 || omega_g <= 0.0 {
        return Err(Error::Domain(format!(
            "need sigma >= 0 and omega_g > 0, got {sigma}, {omega_g}"
        )));
    }
    if sigma == 0.0 {
        return Ok(0.5);
    }
    let z = std::f64::consts::SQRT_2 * omega_g / sigma;
    Ok((std::f64::consts::PI / 2.0).sqrt() * (omega_g / sigma) * erfcx(z))
}

/// Quadrature route for the Gaussian average of [`two_level_w_g`], kept
/// independent of the closed form for cross-checks: adaptive Simpson over
/// the detuning distribution.
pub fn convolved_mean_w_g_oracle(sigma: f64, omega_g: f64) -> f64 {
    if sigma == 0.0 {
        return 0.5;
    }
    let gauss = |d: f64| {
        (-d * d / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
    };
    let f = |d: f64| gauss(d) * two_level_w_g(d, 0.0, omega_g);
    let upper = 12.0 * sigma.max(omega_g);
    2.0 * adaptive_simpson(&f, 0.0, upper, 1e-14, 64)
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
    fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, fa, m, fm, flm);
        let right = simpson(m, fm, b, fb, frm);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            recurse(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
                + recurse(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fb, fm) = (f(a), f(b), f(m));
    let whole = simpson(a, fa, b, fb, fm);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, depth)
}

/// The 4x4 effective Hamiltonian of the four-state subspace in the basis
/// `(tau_0, tau_1, eta_0, eta_1)`. Scalar ingredients use the crate's
/// sigma-z sign convention, under which the matrix coincides with the
/// projection of `R n_g H_S` onto that basis (plus the `omega_G` coupling
/// block); all observables are invariant under the opposite convention.
#[derive(Debug, Clone)]
pub struct EffectiveHamiltonian4 {
    /// On-site shift accumulated by the searched state (`A`).
    pub tau_shift: f64,
    /// Coupling sum over computational-qubit pairs minus the ancilla
    /// coupling (`B`).
    pub eta_shift: f64,
    /// Ancilla on-site shift splitting the two ancilla branches (`a`).
    pub ancilla_split: f64,
    /// Summed coupling of the ancilla site to its lattice neighbors (`b`).
    pub ancilla_coupling: f64,
    pub omega_g: f64,
    pub r: f64,
    pub n_g: usize,
}

impl EffectiveHamiltonian4 {
    /// Dense Hermitian matrix: diagonal `(A+a, A-a, B, B)`, couplings
    /// `-i omega_G` between same-ancilla tau/eta states and `b` inside the
    /// eta block.
    pub fn matrix(&self) -> [[Complex64; 4]; 4] {
        let z = Complex64::new(0.0, 0.0);
        let iw = Complex64::new(0.0, self.omega_g);
        let re = Complex64::new(self.tau_shift + self.ancilla_split, 0.0);
        let re2 = Complex64::new(self.tau_shift - self.ancilla_split, 0.0);
        let b_eta = Complex64::new(self.eta_shift, 0.0);
        let cb = Complex64::new(self.ancilla_coupling, 0.0);
        [
            [re, z, -iw, z],
            [z, re2, z, -iw],
            [iw, z, b_eta, cb],
            [z, iw, cb, b_eta],
        ]
    }

    /// Detuning `|A - B|` between the searched and residual manifolds.
    pub fn detuning(&self) -> f64 {
        (self.tau_shift - self.eta_shift).abs()
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        let m = self.matrix();
        let rows: Vec<Vec<Complex64>> = m.iter().map(|r| r.to_vec()).collect();
        let (w, _) = hermitian_eigen(&rows);
        [w[0], w[1], w[2], w[3]]
    }
}

/// Assemble the effective Hamiltonian ingredients from a disorder
/// realization: the searched-state shift from the computational-qubit
/// z-terms, the eta-manifold shift from the computational couplings, and
/// the ancilla split/coupling from the ancilla site and its lattice edges.
pub fn build_h_eff(
    realization: &DisorderRealization,
    tau: usize,
    r: f64,
    n_g: usize,
) -> Result<EffectiveHamiltonian4> {
    let n_tot = realization.n_tot();
    if n_tot < 2 {
        return Err(Error::Size("effective model needs n_tot >= 2".into()));
    }
    let n_q = n_tot - 1;
    let n = 1usize << n_q;
    if tau >= n {
        return Err(Error::Domain(format!("tau = {tau} outside [0, {n})")));
    }
    let scale = r * n_g as f64;
    let shifts = realization.shifts();
    let tau_shift = scale
        * (1..=n_q)
            .map(|i| shifts[i - 1] * z_sign(tau, i))
            .sum::<f64>();
    let ancilla_split = scale * shifts[n_tot - 1];
    let mut comp_sum = 0.0;
    let mut anc_sum = 0.0;
    for (e, &(i, j)) in realization.lattice().edges().iter().enumerate() {
        if j == n_tot || i == n_tot {
            anc_sum += realization.couplings()[e];
        } else {
            comp_sum += realization.couplings()[e];
        }
    }
    let ancilla_coupling = scale * anc_sum;
    let eta_shift = scale * comp_sum - ancilla_coupling;
    Ok(EffectiveHamiltonian4 {
        tau_shift,
        eta_shift,
        ancilla_split,
        ancilla_coupling,
        omega_g: grover_frequency(n_q),
        r,
        n_g,
    })
}

/// Projection of `R n_g H_S` onto the four-state basis, computed from the
/// dense Hamiltonian and explicit basis vectors (`n_tot <= 8`). Validation
/// oracle for [`build_h_eff`]'s index arithmetic.
pub fn project_h_s_four_basis(
    realization: &DisorderRealization,
    tau: usize,
    r: f64,
    n_g: usize,
) -> Result<[[f64; 4]; 4]> {
    let n_tot = realization.n_tot();
    if n_tot > 8 {
        return Err(Error::Capacity(
            "dense projection limited to n_tot <= 8".into(),
        ));
    }
    let n_q = n_tot - 1;
    let n = 1usize << n_q;
    if tau >= n {
        return Err(Error::Domain(format!("tau = {tau} outside [0, {n})")));
    }
    let m = 2 * n;
    let h = dense_h_s(realization);
    let mut basis = vec![vec![0.0f64; m]; 4];
    basis[0][tau] = 1.0;
    basis[1][tau + n] = 1.0;
    let amp = 1.0 / ((n - 1) as f64).sqrt();
    for x in 0..n {
        if x != tau {
            basis[2][x] = amp;
            basis[3][x + n] = amp;
        }
    }
    let mut out = [[0.0f64; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            let mut acc = 0.0;
            for x in 0..m {
                if basis[a][x] != 0.0 {
                    let mut row = 0.0;
                    for y in 0..m {
                        if basis[b][y] != 0.0 {
                            row += h.get(x, y) * basis[b][y];
                        }
                    }
                    acc += basis[a][x] * row;
                }
            }
            out[a][b] = r * n_g as f64 * acc;
        }
    }
    Ok(out)
}

/// Eigenstructure summary used to compare model frequencies with measured
/// spectra: the detuning `|A - B|` plus the exact eigenvalue gaps.
#[derive(Debug, Clone)]
pub struct FrequencyInfo {
    pub detuning: f64,
    pub eigenvalues: [f64; 4],
    /// All pairwise gaps, descending.
    pub gaps: Vec<f64>,
}

pub fn renormalized_frequency(h: &EffectiveHamiltonian4) -> FrequencyInfo {
    let ev = h.eigenvalues();
    let mut gaps = Vec::with_capacity(6);
    for i in 0..4 {
        for j in (i + 1)..4 {
            gaps.push((ev[i] - ev[j]).abs());
        }
    }
    gaps.sort_by(|a, b| b.partial_cmp(a).unwrap());
    FrequencyInfo {
        detuning: h.detuning(),
        eigenvalues: ev,
        gaps,
    }
}

/// Order-of-magnitude cost estimates with unit constants: measurements
/// `~ sigma^2 / omega_G^2`, total operations `~ sigma / omega_G^2`, and the
/// parametric gain `eps_c / eps` over classical search.
#[derive(Debug, Clone, Copy)]
pub struct OperationsBudget {
    pub measurements_estimate: f64,
    pub operations_estimate: f64,
    pub gain_estimate: f64,
}

pub fn operations_budget(sigma: f64, omega_g: f64, epsilon: f64, eps_c: f64) -> OperationsBudget {
    OperationsBudget {
        measurements_estimate: sigma * sigma / (omega_g * omega_g),
        operations_estimate: sigma / (omega_g * omega_g),
        gain_estimate: eps_c / epsilon,
    }
}

/// Single-kick model run: the exact Grover step followed by one noise
/// propagator of duration `n_g R` per iteration. Records the same
/// observables as the gate-level run; per-realization traces are not
/// expected to match the full simulation, ensemble averages are.
pub fn single_kick_run(
    n_q: usize,
    tau: usize,
    realization: &DisorderRealization,
    r: f64,
    t_f: usize,
    record_history: bool,
) -> Result<TimeSeries> {
    if realization.n_tot() != n_q + 1 {
        return Err(Error::Size(format!(
            "realization covers {} sites, run needs {}",
            realization.n_tot(),
            n_q + 1
        )));
    }
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Domain(format!("kick factor {r} outside [0, 1]")));
    }
    let n_g = build_grover_iteration(n_q, tau)?.n_g();
    let duration = n_g as f64 * r;
    let kick = NoisePropagator::new(realization, duration);

    let mut perturbed = QuantumState::new_uniform(n_q)?;
    let mut ideal = perturbed.clone();
    let mut series = TimeSeries {
        t_f,
        tau,
        epsilon: realization.epsilon(),
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
        apply_ideal_grover(&mut perturbed, tau)?;
        if duration > 0.0 {
            kick.apply(&mut perturbed)?;
        }
        apply_ideal_grover(&mut ideal, tau)?;
        record(&perturbed, &ideal, &mut series);
    }
    Ok(series)
}

/// Least-squares fit of the kick factor: minimizes the distance between
/// measured ensemble averages `(epsilon, mean w_G)` and the closed-form
/// curve with `sigma = epsilon R n_g sqrt(n_q)`.
#[derive(Debug, Clone)]
pub struct KickFit {
    pub r_hat: f64,
    /// 2.5% / 97.5% bootstrap percentiles over grid-point resamples.
    pub confidence: (f64, f64),
    pub residual: f64,
}

pub fn fit_kick_factor(points: &[(f64, f64)], n_g: usize, n_q: usize) -> Result<KickFit> {
    if points.len() < 4 {
        return Err(Error::Fit(format!(
            "need at least 4 grid points, got {}",
            points.len()
        )));
    }
    let omega_g = grover_frequency(n_q);
    let residual = |r: f64, pts: &[(f64, f64)]| -> f64 {
        pts.iter()
            .map(|&(eps, w)| {
                let model = mean_w_g_theory(sigma_width(eps, r, n_g, n_q), omega_g).unwrap();
                (w - model) * (w - model)
            })
            .sum()
    };
    let fit_once = |pts: &[(f64, f64)]| -> f64 {
        let mut best_r = 0.01;
        let mut best = f64::MAX;
        for i in 0..200 {
            let r = 0.01 + 0.99 * i as f64 / 199.0;
            let res = residual(r, pts);
            if res < best {
                best = res;
                best_r = r;
            }
        }
        // golden-section refinement around the best grid point
        let (mut lo, mut hi) = ((best_r - 0.01).max(1e-4), (best_r + 0.01).min(1.0));
        let phi = 0.618_033_988_749_895;
        for _ in 0..60 {
            let a = hi - phi * (hi - lo);
            let b = lo + phi * (hi - lo);
            if residual(a, pts) < residual(b, pts) {
                hi = b;
            } else {
                lo = a;
            }
        }
        0.5 * (lo + hi)
    };

    let r_hat = fit_once(points);
    // bootstrap over grid points
    use rand::{RngExt, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x0b007);
    let mut estimates: Vec<f64> = (0..200)
        .map(|_| {
            let resampled: Vec<(f64, f64)> = (0..points.len())
                .map(|_| {
                    points[(rng.random::<f64>() * points.len() as f64) as usize % points.len()]
                })
                .collect();
            fit_once(&resampled)
        })
        .collect();
    estimates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let confidence = (estimates[4], estimates[194]);
    Ok(KickFit {
        r_hat,
        confidence,
        residual: residual(r_hat, points),
    })
}
