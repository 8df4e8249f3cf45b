//! Dense statevector storage and the elementary unitary kernels every other
//! module applies.
//!
//! Conventions, fixed once for the whole crate:
//!
//! * Qubit `i` (1-based) corresponds to bit `i - 1` of the basis integer `x`.
//!   In the Grover setting the ancilla is qubit `n_tot = n_q + 1`, i.e. the
//!   bit that distinguishes `x < N` from `x >= N`.
//! * The sigma-z eigenvalue of qubit `i` in basis state `x` is `+1` when the
//!   bit is 0 and `-1` when the bit is 1.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex amplitude vector over the `2^n_tot` computational basis.
#[derive(Debug, Clone)]
pub struct QuantumState {
    amplitudes: Vec<Complex64>,
    n_tot: usize,
}

/// One elementary operation on a [`QuantumState`]. Qubit indices are 1-based.
///
/// `MultiControlledX` exists only as the small-system (`n_tot < 7`) stand-in
/// for the generalized Toffoli; at full scale the circuit builder decomposes
/// it into 3-qubit Toffolis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GateOp {
    Hadamard(usize),
    PauliX(usize),
    ControlledNot(usize, usize),
    Toffoli(usize, usize, usize),
    /// Negates the amplitudes of basis states `x` with `x mod N == tau`,
    /// i.e. both ancilla branches of the searched state.
    OraclePhase(usize),
    MultiControlledX {
        controls: Vec<usize>,
        target: usize,
    },
}

impl GateOp {
    /// Qubits touched by this gate; empty for the oracle (it is diagonal).
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            GateOp::Hadamard(q) | GateOp::PauliX(q) => vec![*q],
            GateOp::ControlledNot(c, t) => vec![*c, *t],
            GateOp::Toffoli(c1, c2, t) => vec![*c1, *c2, *t],
            GateOp::OraclePhase(_) => vec![],
            GateOp::MultiControlledX { controls, target } => {
                let mut v = controls.clone();
                v.push(*target);
                v
            }
        }
    }

    /// Plain-text form used by the circuit dump (one gate per line).
    pub fn dump_line(&self) -> String {
        match self {
            GateOp::Hadamard(q) => format!("h {q}"),
            GateOp::PauliX(q) => format!("x {q}"),
            GateOp::ControlledNot(c, t) => format!("cnot {c} {t}"),
            GateOp::Toffoli(c1, c2, t) => format!("toffoli {c1} {c2} {t}"),
            GateOp::OraclePhase(tau) => format!("oracle {tau}"),
            GateOp::MultiControlledX { controls, target } => {
                let list: Vec<String> = controls.iter().map(|c| c.to_string()).collect();
                format!("mcx {} {target}", list.join(" "))
            }
        }
    }
}

impl QuantumState {
    /// State `|0...0>` on `n_tot` qubits.
    pub fn zero(n_tot: usize) -> Result<Self> {
        if n_tot == 0 || n_tot > 25 {
            return Err(Error::Size(format!("n_tot = {n_tot} outside [1, 25]")));
        }
        let m = 1usize << n_tot;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); m];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(QuantumState { amplitudes, n_tot })
    }

    /// Basis state `|x>` on `n_tot` qubits.
    pub fn basis(n_tot: usize, x: usize) -> Result<Self> {
        let mut state = Self::zero(n_tot)?;
        if x >= state.dim() {
            return Err(Error::Index(format!("basis index {x} out of range")));
        }
        state.amplitudes[0] = Complex64::new(0.0, 0.0);
        state.amplitudes[x] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    /// Build from raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let m = amplitudes.len();
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::Size(format!(
                "amplitude vector length {m} is not a power of two >= 2"
            )));
        }
        let n_tot = m.trailing_zeros() as usize;
        Ok(QuantumState { amplitudes, n_tot })
    }

    /// Initial Grover state: uniform over the `N = 2^n_q` computational basis
    /// states, ancilla in its "up" (bit 0) branch. Dimension is `2N`.
    pub fn new_uniform(n_q: usize) -> Result<Self> {
        if n_q == 0 || n_q > 24 {
            return Err(Error::Size(format!("n_q = {n_q} outside [1, 24]")));
        }
        let n = 1usize << n_q;
        let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        let mut amplitudes = vec![amp; 2 * n];
        for a in amplitudes.iter_mut().skip(n) {
            *a = Complex64::new(0.0, 0.0);
        }
        Ok(QuantumState {
            amplitudes,
            n_tot: n_q + 1,
        })
    }

    pub fn n_tot(&self) -> usize {
        self.n_tot
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q == 0 || q > self.n_tot {
            return Err(Error::Index(format!(
                "qubit {q} outside [1, {}]",
                self.n_tot
            )));
        }
        Ok(())
    }

    /// Apply one elementary gate in place.
    pub fn apply_gate(&mut self, gate: &GateOp) -> Result<()> {
        match gate {
            GateOp::Hadamard(q) => {
                self.check_qubit(*q)?;
                self.hadamard(*q);
            }
            GateOp::PauliX(q) => {
                self.check_qubit(*q)?;
                self.pauli_x(*q);
            }
            GateOp::ControlledNot(c, t) => {
                self.check_qubit(*c)?;
                self.check_qubit(*t)?;
                if c == t {
                    return Err(Error::Index("control equals target".into()));
                }
                self.controlled_not(*c, *t);
            }
            GateOp::Toffoli(c1, c2, t) => {
                for q in [c1, c2, t] {
                    self.check_qubit(*q)?;
                }
                if c1 == c2 || c1 == t || c2 == t {
                    return Err(Error::Index("Toffoli qubits must be distinct".into()));
                }
                self.toffoli(*c1, *c2, *t);
            }
            GateOp::OraclePhase(tau) => {
                let n = self.dim() / 2;
                if self.n_tot < 2 {
                    return Err(Error::Index("oracle needs n_tot >= 2".into()));
                }
                if *tau >= n {
                    return Err(Error::Index(format!("tau = {tau} outside [0, {n})")));
                }
                self.oracle_phase(*tau);
            }
            GateOp::MultiControlledX { controls, target } => {
                self.check_qubit(*target)?;
                let mut mask = 0usize;
                for c in controls {
                    self.check_qubit(*c)?;
                    if c == target || mask & (1 << (c - 1)) != 0 {
                        return Err(Error::Index("clashing multi-control indices".into()));
                    }
                    mask |= 1 << (c - 1);
                }
                self.multi_controlled_x(mask, *target);
            }
        }
        Ok(())
    }

    fn hadamard(&mut self, q: usize) {
        let step = 1usize << (q - 1);
        let f = std::f64::consts::FRAC_1_SQRT_2;
        let amps = &mut self.amplitudes;
        let m = amps.len();
        let mut base = 0;
        while base < m {
            for off in 0..step {
                let lo = base + off;
                let hi = lo + step;
                let a = amps[lo];
                let b = amps[hi];
                amps[lo] = f * (a + b);
                amps[hi] = f * (a - b);
            }
            base += 2 * step;
        }
    }

    fn pauli_x(&mut self, q: usize) {
        let step = 1usize << (q - 1);
        let m = self.amplitudes.len();
        let mut base = 0;
        while base < m {
            for off in 0..step {
                self.amplitudes.swap(base + off, base + off + step);
            }
            base += 2 * step;
        }
    }

    fn controlled_not(&mut self, c: usize, t: usize) {
        let cm = 1usize << (c - 1);
        let tm = 1usize << (t - 1);
        for x in 0..self.amplitudes.len() {
            if x & cm != 0 && x & tm == 0 {
                self.amplitudes.swap(x, x | tm);
            }
        }
    }

    fn toffoli(&mut self, c1: usize, c2: usize, t: usize) {
        let cm = (1usize << (c1 - 1)) | (1usize << (c2 - 1));
        let tm = 1usize << (t - 1);
        for x in 0..self.amplitudes.len() {
            if x & cm == cm && x & tm == 0 {
                self.amplitudes.swap(x, x | tm);
            }
        }
    }

    fn multi_controlled_x(&mut self, control_mask: usize, t: usize) {
        let tm = 1usize << (t - 1);
        for x in 0..self.amplitudes.len() {
            if x & control_mask == control_mask && x & tm == 0 {
                self.amplitudes.swap(x, x | tm);
            }
        }
    }

    fn oracle_phase(&mut self, tau: usize) {
        let n = self.amplitudes.len() / 2;
        self.amplitudes[tau] = -self.amplitudes[tau];
        self.amplitudes[tau + n] = -self.amplitudes[tau + n];
    }

    /// Two-qubit rotation `exp(-i theta sigma^x_i sigma^x_j)`:
    /// `psi_x <- cos(theta) psi_x - i sin(theta) psi_{x ^ (bit_i | bit_j)}`.
    pub fn apply_xx_rotation(&mut self, i: usize, j: usize, theta: f64) -> Result<()> {
        self.check_qubit(i)?;
        self.check_qubit(j)?;
        if i == j {
            return Err(Error::Index("xx rotation needs two distinct qubits".into()));
        }
        let bi = 1usize << (i - 1);
        let mask = bi | (1usize << (j - 1));
        let c = theta.cos();
        let s = theta.sin();
        let amps = &mut self.amplitudes;
        for x in 0..amps.len() {
            // visit each {x, x ^ mask} pair once, keyed on bit i clear
            if x & bi == 0 {
                let y = x ^ mask;
                let a = amps[x];
                let b = amps[y];
                amps[x] = Complex64::new(c * a.re + s * b.im, c * a.im - s * b.re);
                amps[y] = Complex64::new(c * b.re + s * a.im, c * b.im - s * a.re);
            }
        }
        Ok(())
    }

    /// Diagonal rotation `exp(-i sum_i angles[i-1] sigma^z_i)`; `angles` has
    /// one entry per qubit.
    pub fn apply_z_phase(&mut self, angles: &[f64]) -> Result<()> {
        if angles.len() != self.n_tot {
            return Err(Error::Size(format!(
                "got {} angles for {} qubits",
                angles.len(),
                self.n_tot
            )));
        }
        for (x, a) in self.amplitudes.iter_mut().enumerate() {
            let mut phase = 0.0;
            for (i, angle) in angles.iter().enumerate() {
                if x & (1 << i) == 0 {
                    phase += angle;
                } else {
                    phase -= angle;
                }
            }
            *a *= Complex64::from_polar(1.0, -phase);
        }
        Ok(())
    }
}

/// `<psi|phi> = sum_x conj(psi_x) phi_x`.
pub fn inner_product(psi: &QuantumState, phi: &QuantumState) -> Result<Complex64> {
    if psi.dim() != phi.dim() {
        return Err(Error::Size(format!(
            "inner product of dimensions {} and {}",
            psi.dim(),
            phi.dim()
        )));
    }
    Ok(psi
        .amplitudes
        .iter()
        .zip(phi.amplitudes.iter())
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Sigma-z eigenvalue of qubit `i` (1-based) in basis state `x`.
pub fn z_sign(x: usize, i: usize) -> f64 {
    if x & (1 << (i - 1)) == 0 {
        1.0
    } else {
        -1.0
    }
}
