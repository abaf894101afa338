//! Singular value decomposition of small dense complex matrices by one-sided
//! (Hestenes) Jacobi rotations.
//!
//! Working on the columns of the matrix itself, rather than on `AᴴA`, keeps
//! relative accuracy on the smallest singular value, which is what the
//! singularity test needs.

use num_complex::Complex64;

pub type Matrix<const N: usize> = [[Complex64; N]; N];

/// Singular values in descending order with the matching right singular
/// vectors (`right[k]` pairs with `values[k]`).
#[derive(Clone, Debug)]
pub struct Svd<const N: usize> {
    pub values: [f64; N],
    pub right: [[Complex64; N]; N],
}

impl<const N: usize> Svd<N> {
    pub fn sigma_max(&self) -> f64 {
        self.values[0]
    }

    pub fn sigma_min(&self) -> f64 {
        self.values[N - 1]
    }

    /// σ_min / σ_max, or 0 for the zero matrix.
    pub fn ratio(&self) -> f64 {
        if self.values[0] == 0.0 {
            0.0
        } else {
            self.values[N - 1] / self.values[0]
        }
    }

    pub fn min_right_vector(&self) -> [Complex64; N] {
        self.right[N - 1]
    }
}

pub fn svd<const N: usize>(a: &Matrix<N>) -> Svd<N> {
    // cols[j][i] = A[i][j]
    let mut cols = [[Complex64::new(0.0, 0.0); N]; N];
    for (i, row) in a.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            cols[j][i] = x;
        }
    }
    let mut v = [[Complex64::new(0.0, 0.0); N]; N];
    for (j, col) in v.iter_mut().enumerate() {
        col[j] = Complex64::new(1.0, 0.0);
    }

    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..N {
            for q in (p + 1)..N {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = cols[p]
                    .iter()
                    .zip(&cols[q])
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Unit phase on column q makes the inner product real.
                let phase = gamma.conj() / g;
                for i in 0..N {
                    cols[q][i] *= phase;
                    v[q][i] *= phase;
                }
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..N {
                    let (xp, xq) = (cols[p][i], cols[q][i]);
                    cols[p][i] = xp * c - xq * s;
                    cols[q][i] = xp * s + xq * c;
                    let (vp, vq) = (v[p][i], v[q][i]);
                    v[p][i] = vp * c - vq * s;
                    v[q][i] = vp * s + vq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let mut values = [0.0; N];
    let mut right = [[Complex64::new(0.0, 0.0); N]; N];
    for (k, &j) in order.iter().enumerate() {
        values[k] = norms[j];
        right[k] = v[j];
    }
    Svd { values, right }
}

/// `A x`
pub fn mat_vec<const N: usize>(a: &Matrix<N>, x: &[Complex64; N]) -> [Complex64; N] {
    let mut out = [Complex64::new(0.0, 0.0); N];
    for (o, row) in out.iter_mut().zip(a) {
        *o = row.iter().zip(x).map(|(r, v)| r * v).sum();
    }
    out
}

pub fn vec_norm<const N: usize>(x: &[Complex64; N]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
