//! Minimal dense eigen machinery for the validation oracles: cyclic Jacobi
//! for real symmetric matrices (dimensions up to a few hundred) and complex
//! Hermitian eigendecomposition through the standard real embedding.

use num_complex::Complex64;

/// Row-major dense real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }
}

/// Cyclic Jacobi eigendecomposition of a real symmetric matrix.
/// Returns eigenvalues (ascending) and the orthogonal matrix whose columns
/// are the matching eigenvectors, so `A = V diag(w) V^T`.
pub fn jacobi_symmetric(a: &SymMatrix) -> (Vec<f64>, SymMatrix) {
    let n = a.n;
    let mut m = a.data.clone();
    let mut v = vec![0.0f64; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let idx = |i: usize, j: usize| i * n + j;

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[idx(p, q)] * m[idx(p, q)];
            }
        }
        if off.sqrt() < 1e-15 * (1.0 + frobenius(&m, n)) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[idx(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m[idx(p, p)];
                let aqq = m[idx(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // update matrix rows/columns p and q
                for k in 0..n {
                    let akp = m[idx(k, p)];
                    let akq = m[idx(k, q)];
                    m[idx(k, p)] = c * akp - s * akq;
                    m[idx(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[idx(p, k)];
                    let aqk = m[idx(q, k)];
                    m[idx(p, k)] = c * apk - s * aqk;
                    m[idx(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[idx(k, p)];
                    let vkq = v[idx(k, q)];
                    v[idx(k, p)] = c * vkp - s * vkq;
                    v[idx(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let evals: Vec<f64> = (0..n).map(|i| m[idx(i, i)]).collect();
    order.sort_by(|&i, &j| evals[i].partial_cmp(&evals[j]).unwrap());
    let sorted_vals: Vec<f64> = order.iter().map(|&i| evals[i]).collect();
    let mut sorted_vecs = SymMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            sorted_vecs.set(row, col, v[idx(row, src)]);
        }
    }
    (sorted_vals, sorted_vecs)
}

fn frobenius(m: &[f64], n: usize) -> f64 {
    m.iter().take(n * n).map(|x| x * x).sum::<f64>().sqrt()
}

/// `exp(-i A d)` for a real symmetric `A`, via eigendecomposition.
/// Returned row-major complex matrix is unitary to machine precision.
pub fn expm_minus_i_symmetric(a: &SymMatrix, duration: f64) -> Vec<Complex64> {
    let n = a.n;
    let (w, v) = jacobi_symmetric(a);
    let phases: Vec<Complex64> = w
        .iter()
        .map(|&lam| Complex64::from_polar(1.0, -lam * duration))
        .collect();
    // U = V diag(phase) V^T
    let mut u = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += phases[k] * (v.get(i, k) * v.get(j, k));
            }
            u[i * n + j] = acc;
        }
    }
    u
}

/// Dense complex matrix-vector product, row-major.
pub fn matvec(u: &[Complex64], x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let row = &u[i * n..(i + 1) * n];
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in row.iter().zip(x.iter()) {
            acc += a * b;
        }
        y[i] = acc;
    }
    y
}

/// Eigendecomposition of a complex Hermitian matrix `H = A + iB` via the
/// real embedding `[[A, -B], [B, A]]`, whose spectrum doubles that of `H`.
/// Returns eigenvalues (ascending) with orthonormal complex eigenvectors.
pub fn hermitian_eigen(h: &[Vec<Complex64>]) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let n = h.len();
    let mut e = SymMatrix::zeros(2 * n);
    for i in 0..n {
        for j in 0..n {
            e.set(i, j, h[i][j].re);
            e.set(i + n, j + n, h[i][j].re);
            e.set(i, j + n, -h[i][j].im);
            e.set(i + n, j, h[i][j].im);
        }
    }
    let (w, v) = jacobi_symmetric(&e);
    let scale = 1.0 + w.iter().fold(0.0f64, |m, x| m.max(x.abs()));

    let mut evals = Vec::with_capacity(n);
    let mut evecs: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut group: Vec<Vec<Complex64>> = Vec::new();
    let mut group_val = f64::NAN;

    let flush = |group: &mut Vec<Vec<Complex64>>,
                 val: f64,
                 evals: &mut Vec<f64>,
                 evecs: &mut Vec<Vec<Complex64>>| {
        // complex Gram-Schmidt keeps exactly half of the real multiplicity
        let mut kept: Vec<Vec<Complex64>> = Vec::new();
        for z in group.drain(..) {
            let mut z = z;
            for k in &kept {
                let proj: Complex64 = k.iter().zip(z.iter()).map(|(a, b)| a.conj() * b).sum();
                for (zi, ki) in z.iter_mut().zip(k.iter()) {
                    *zi -= proj * ki;
                }
            }
            let norm: f64 = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-6 {
                for zi in z.iter_mut() {
                    *zi /= norm;
                }
                kept.push(z);
            }
        }
        for k in kept {
            evals.push(val);
            evecs.push(k);
        }
    };

    for col in 0..2 * n {
        let z: Vec<Complex64> = (0..n)
            .map(|row| Complex64::new(v.get(row, col), v.get(row + n, col)))
            .collect();
        if group.is_empty() || (w[col] - group_val).abs() < 1e-10 * scale {
            if group.is_empty() {
                group_val = w[col];
            }
            group.push(z);
        } else {
            flush(&mut group, group_val, &mut evals, &mut evecs);
            group_val = w[col];
            group.push(z);
        }
    }
    flush(&mut group, group_val, &mut evals, &mut evecs);

    (evals, evecs)
}
