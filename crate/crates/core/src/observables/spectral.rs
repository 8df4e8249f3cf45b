//! Spectral density of the amplitude history over a run of `T_f` iterations:
//! `S(omega) = sum_x |a_x(omega)|^2` with
//! `a_x(omega) = sum_t psi_x(t) exp(i omega t) / sqrt(T_f)`.
//!
//! The history is sampled inclusively at `t = 0..=T_f` (`T = T_f + 1`
//! points) and the transform runs over the orthogonal frequency set
//! `omega_k = 2 pi k / T`, so Parseval holds exactly:
//! `sum_k S(omega_k) = (T_f + 1)^2 / T_f` for unit-norm states (the
//! `1/sqrt(T_f)` prefactor is kept as is).

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SpectralDensity {
    /// `s[k]` is the density at `omega_k = 2 pi k / (t_f + 1)`.
    pub s: Vec<f64>,
    pub t_f: usize,
    pub epsilon: f64,
    pub seed: u64,
}

impl SpectralDensity {
    pub fn omega(&self, bin: usize) -> f64 {
        2.0 * std::f64::consts::PI * bin as f64 / (self.t_f + 1) as f64
    }

    pub fn total(&self) -> f64 {
        self.s.iter().sum()
    }

    pub fn non_dc_total(&self) -> f64 {
        self.s.iter().skip(1).sum()
    }
}

/// Exact Parseval constant for a unit-norm history: `(T_f + 1)^2 / T_f`.
pub fn parseval_sum(t_f: usize) -> f64 {
    let t = (t_f + 1) as f64;
    t * t / t_f as f64
}

/// Transform a complete amplitude history (`t_f + 1` equal-length vectors).
pub fn spectral_density(
    history: &[Vec<Complex64>],
    t_f: usize,
    epsilon: f64,
    seed: u64,
) -> Result<SpectralDensity> {
    if t_f < 2 {
        return Err(Error::Domain(format!("t_f = {t_f} < 2")));
    }
    let t = t_f + 1;
    if history.len() != t {
        return Err(Error::Size(format!(
            "history has {} records, expected {t}",
            history.len()
        )));
    }
    let m = history[0].len();
    if history.iter().any(|h| h.len() != m) {
        return Err(Error::Size("ragged history".into()));
    }

    let mut planner = FftPlanner::<f64>::new();
    // inverse direction realizes the exp(+i omega t) convention
    let fft = planner.plan_fft_inverse(t);
    let mut s = vec![0.0f64; t];
    let mut buf = vec![Complex64::new(0.0, 0.0); t];
    let scale = 1.0 / t_f as f64;
    for x in 0..m {
        for (ti, b) in buf.iter_mut().enumerate() {
            *b = history[ti][x];
        }
        fft.process(&mut buf);
        for (k, b) in buf.iter().enumerate() {
            s[k] += b.norm_sqr() * scale;
        }
    }
    Ok(SpectralDensity {
        s,
        t_f,
        epsilon,
        seed,
    })
}

/// One spectral line: local maximum with its integrated weight (summed over
/// the monotone flanks down to the neighboring valleys).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub bin: usize,
    pub omega: f64,
    pub height: f64,
    pub weight: f64,
}

/// Local maxima of the non-DC spectrum sorted by integrated weight,
/// strongest first, truncated to `max_peaks`. Every non-DC bin is assigned
/// to exactly one peak by steepest ascent, so the peak weights partition
/// the non-DC total. The stationary `omega = 0` bin is always excluded.
pub fn spectral_peaks(density: &SpectralDensity, max_peaks: usize) -> Vec<Peak> {
    let s = &density.s;
    let t = s.len();
    if t < 3 || max_peaks == 0 {
        return Vec::new();
    }
    let uphill = |start: usize| -> usize {
        let mut k = start;
        loop {
            let left = if k > 1 { s[k - 1] } else { f64::NEG_INFINITY };
            let right = if k + 1 < t {
                s[k + 1]
            } else {
                f64::NEG_INFINITY
            };
            if left > s[k] && left >= right {
                k -= 1;
            } else if right > s[k] {
                k += 1;
            } else {
                return k;
            }
        }
    };
    let mut weights: std::collections::BTreeMap<usize, f64> = std::collections::BTreeMap::new();
    for k in 1..t {
        *weights.entry(uphill(k)).or_insert(0.0) += s[k];
    }
    let mut peaks: Vec<Peak> = weights
        .into_iter()
        .map(|(bin, weight)| Peak {
            bin,
            omega: density.omega(bin),
            height: s[bin],
            weight,
        })
        .collect();
    peaks.sort_by(|a, b| b.weight.partial_cmp(&a.weight).unwrap());
    peaks.truncate(max_peaks);
    peaks
}

/// Dominant oscillation frequency of a real scalar series, in radians per
/// step, folded to `(0, pi]`. Returns 0 for a constant series.
pub fn dominant_frequency(samples: &[f64]) -> f64 {
    let t = samples.len();
    if t < 3 {
        return 0.0;
    }
    let mean = samples.iter().sum::<f64>() / t as f64;
    let var = samples
        .iter()
        .map(|&v| (v - mean) * (v - mean))
        .sum::<f64>()
        / t as f64;
    if var <= 1e-22 * (mean * mean + 1.0) {
        return 0.0;
    }
    let mut buf: Vec<Complex64> = samples
        .iter()
        .map(|&v| Complex64::new(v - mean, 0.0))
        .collect();
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(t).process(&mut buf);
    let mut best_k = 0;
    let mut best_p = 0.0;
    for (k, b) in buf.iter().enumerate().take(t / 2 + 1).skip(1) {
        let p = b.norm_sqr();
        if p > best_p {
            best_p = p;
            best_k = k;
        }
    }
    if best_p == 0.0 {
        return 0.0;
    }
    2.0 * std::f64::consts::PI * best_k as f64 / t as f64
}
