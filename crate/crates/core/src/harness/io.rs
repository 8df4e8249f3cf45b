//! Flat-file outputs: CSV tables with self-describing headers, a JSON
//! metadata sidecar per artifact, and an optional PPM heatmap renderer.
//! Numeric CSV fields use Rust's shortest round-trip float formatting, so
//! equal runs produce identical bytes; wall-clock metadata lives only in
//! the sidecar's dedicated field.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::harness::{CompareRow, EnsembleResult, HusimiSnapshot, PhaseDiagram};
use crate::observables::{SpectralDensity, TimeSeries};

#[derive(Debug, Clone, Serialize)]
pub struct Sidecar {
    pub epsilon: Vec<f64>,
    pub master_seed: u64,
    pub lattice: (usize, usize),
    pub t_f: usize,
    pub code_version: String,
    /// Seconds since the Unix epoch; excluded from determinism comparisons.
    pub generated_at: u64,
}

impl Sidecar {
    pub fn new(epsilon: Vec<f64>, master_seed: u64, lattice: (usize, usize), t_f: usize) -> Self {
        Sidecar {
            epsilon,
            master_seed,
            lattice,
            t_f,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            generated_at: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(
            path,
            serde_json::to_string_pretty(self).expect("sidecar json"),
        )?;
        Ok(())
    }
}

pub fn timeseries_csv(series: &TimeSeries) -> String {
    let mut out = String::from("t,w_g,w_4,fidelity\n");
    for t in 0..=series.t_f {
        out.push_str(&format!(
            "{t},{},{},{}\n",
            series.w_g[t], series.w_4[t], series.fidelity[t]
        ));
    }
    out
}

pub fn spectrum_csv(sd: &SpectralDensity) -> String {
    let mut out = String::from("omega,s\n");
    for (k, &v) in sd.s.iter().enumerate() {
        out.push_str(&format!("{},{v}\n", sd.omega(k)));
    }
    out
}

pub fn husimi_csv(snapshot: &HusimiSnapshot) -> String {
    let g = &snapshot.grid;
    let mut out = format!(
        "# husimi density, epsilon={}, t={}; rows: position cells x (top=0), \
         columns: momentum cells p from -N+1 to N; fine dimension M={}\n",
        snapshot.epsilon, snapshot.t, g.m
    );
    for x in 0..g.x_cells {
        let row: Vec<String> = (0..g.p_cells).map(|p| g.at(x, p).to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn ensemble_stats_csv(result: &EnsembleResult) -> String {
    let mut out = String::from(
        "epsilon,eps_over_eps_c,w_g_mean,w_g_se,w_g_min,w_g_q05,w_g_q25,w_g_median,\
         w_g_q75,w_g_q95,w_g_max,w_4_mean,w_4_se,w_4_min,w_4_q05,w_4_q25,w_4_median,\
         w_4_q75,w_4_q95,w_4_max\n",
    );
    for e in &result.epsilons {
        let g = &e.w_g;
        let f = &e.w_4;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            e.epsilon,
            e.eps_over_eps_c,
            g.mean,
            g.std_error,
            g.min,
            g.q05,
            g.q25,
            g.median,
            g.q75,
            g.q95,
            g.max,
            f.mean,
            f.std_error,
            f.min,
            f.q05,
            f.q25,
            f.median,
            f.q75,
            f.q95,
            f.max
        ));
    }
    out
}

pub fn ensemble_realizations_csv(result: &EnsembleResult) -> String {
    let mut out =
        String::from("epsilon,realization,seed,tau,w_g_mean,w_4_mean,dominant_frequency\n");
    for e in &result.epsilons {
        for s in &e.per_realization {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                e.epsilon,
                s.realization,
                s.seed,
                s.tau,
                s.w_g_mean,
                s.w_4_mean,
                s.dominant_frequency
            ));
        }
    }
    out
}

pub fn compare_csv(rows: &[CompareRow]) -> String {
    let mut out = String::from(
        "eps_over_eps_c,epsilon,full_w_g,full_w_g_min,full_w_g_max,kick_w_g,theory_w_g,\
         full_w_4,full_w_4_min,full_w_4_max,kick_w_4\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.eps_over_eps_c,
            r.epsilon,
            r.full_w_g,
            r.full_w_g_min,
            r.full_w_g_max,
            r.kick_w_g,
            r.theory_w_g,
            r.full_w_4,
            r.full_w_4_min,
            r.full_w_4_max,
            r.kick_w_4
        ));
    }
    out
}

/// Theory-curve table `(epsilon, sigma, mean w_G, epsilon/eps_c)`.
pub fn theory_csv(epsilons: &[f64], n_g: usize, n_q: usize, r: f64) -> Result<String> {
    let omega_g = crate::circuit::grover_frequency(n_q);
    let eps_c = crate::theory::epsilon_critical(n_g, n_q + 1);
    let mut out = String::from("epsilon,sigma,w_g_theory,eps_over_eps_c\n");
    for &eps in epsilons {
        let sigma = crate::theory::sigma_width(eps, r, n_g, n_q);
        let w = crate::theory::mean_w_g_theory(sigma, omega_g)?;
        out.push_str(&format!("{eps},{sigma},{w},{}\n", eps / eps_c));
    }
    Ok(out)
}

pub fn phase_diagram_csv(pd: &PhaseDiagram) -> String {
    let mut out = format!(
        "# spectral density rows, one per epsilon; columns: omega bins \
         2*pi*k/(t_f+1), k = 0..{}\n",
        pd.t_f
    );
    out.push_str("epsilon");
    for k in 0..=pd.t_f {
        out.push_str(&format!(",s{k}"));
    }
    out.push('\n');
    for (eps, row) in pd.epsilons.iter().zip(pd.rows.iter()) {
        out.push_str(&eps.to_string());
        for v in &row.s {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

pub fn write_text(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut file = fs::File::create(path)?;
    file.write_all(content.as_bytes())?;
    Ok(())
}

/// Minimal binary-PPM heatmap with a dark-to-bright palette; rows render top
/// to bottom. Optional output only, nothing downstream parses it.
pub fn write_heatmap_ppm(path: &Path, rows: &[Vec<f64>], log_scale: bool) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let height = rows.len();
    let width = rows.first().map_or(0, |r| r.len());
    let transform = |v: f64| {
        if log_scale {
            (1.0 + v.max(0.0)).ln()
        } else {
            v.max(0.0)
        }
    };
    let mut hi = f64::MIN;
    let mut lo = f64::MAX;
    for row in rows {
        for &v in row {
            let t = transform(v);
            hi = hi.max(t);
            lo = lo.min(t);
        }
    }
    let span = (hi - lo).max(1e-300);
    // dark blue -> cyan -> yellow -> red ramp
    let anchors: [(f64, [f64; 3]); 4] = [
        (0.0, [13.0, 8.0, 135.0]),
        (0.35, [70.0, 160.0, 180.0]),
        (0.7, [240.0, 220.0, 60.0]),
        (1.0, [220.0, 40.0, 30.0]),
    ];
    let color = |u: f64| -> [u8; 3] {
        let u = u.clamp(0.0, 1.0);
        let mut out = [0u8; 3];
        for w in anchors.windows(2) {
            let (u0, c0) = w[0];
            let (u1, c1) = w[1];
            if u >= u0 && u <= u1 {
                let f = (u - u0) / (u1 - u0);
                for (o, (a, b)) in out.iter_mut().zip(c0.iter().zip(c1.iter())) {
                    *o = (a + f * (b - a)).round() as u8;
                }
                return out;
            }
        }
        [220, 40, 30]
    };
    let mut bytes = format!("P6\n{width} {height}\n255\n").into_bytes();
    for row in rows {
        for &v in row {
            bytes.extend_from_slice(&color((transform(v) - lo) / span));
        }
    }
    fs::write(path, bytes)?;
    Ok(())
}
