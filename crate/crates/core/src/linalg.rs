//! Small dense/banded kernels for the finite-difference eigenproblems.
//!
//! Nothing here is general purpose: the 1D operators are symmetric
//! tridiagonal (Sturm-sequence bisection), the 2D half-plane operator is a
//! banded SPD matrix (band Cholesky + shift-invert Lanczos).

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix stored as its diagonal and first off-diagonal.
#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Usage("empty tridiagonal matrix".into()));
        }
        if off.len() + 1 != diag.len() {
            return Err(Error::Usage(format!(
                "off-diagonal length {} does not match diagonal length {}",
                off.len(),
                diag.len()
            )));
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `x` (Sturm count via LDLᵀ pivots).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            let denom = if q == 0.0 { f64::EPSILON * (1.0 + x.abs()) } else { q };
            q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / denom;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based), by bisection to full precision.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.dim(), "eigenvalue index out of range");
        let (mut lo, mut hi) = self.gershgorin();
        let pad = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        lo -= pad;
        hi += pad;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// The `m` smallest eigenvalues in increasing order.
    pub fn smallest(&self, m: usize) -> Vec<f64> {
        (0..m.min(self.dim())).map(|k| self.eigenvalue(k)).collect()
    }

    pub fn largest(&self) -> f64 {
        self.eigenvalue(self.dim() - 1)
    }
}

/// Cholesky factor of a symmetric positive definite band matrix with
/// half-bandwidth `p`. Row `i` stores entries `L[i][i-p..=i]`.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    p: usize,
    l: Vec<f64>,
}

impl BandCholesky {
    /// Factor the matrix whose lower band is given by `entry(i, j)` for
    /// `i - p <= j <= i`.
    pub fn factor(n: usize, p: usize, entry: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let w = p + 1;
        let mut l = vec![0.0; n * w];
        for i in 0..n {
            let j0 = i.saturating_sub(p);
            for j in j0..=i {
                let k0 = j0.max(j.saturating_sub(p));
                let ri = i * w + p - i;
                let rj = j * w + p - j;
                let s = entry(i, j) - dot(&l[ri + k0..ri + j], &l[rj + k0..rj + j]);
                if i == j {
                    if s <= 0.0 || !s.is_finite() {
                        return Err(Error::Solver(format!(
                            "band matrix is not positive definite (pivot {s:e} at row {i})"
                        )));
                    }
                    l[ri + i] = s.sqrt();
                } else {
                    l[ri + j] = s / l[rj + j];
                }
            }
        }
        Ok(Self { n, p, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solve `A x = b` in place.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let (n, p, w) = (self.n, self.p, self.p + 1);
        for i in 0..n {
            let ri = i * w + p - i;
            let mut s = x[i];
            for k in i.saturating_sub(p)..i {
                s -= self.l[ri + k] * x[k];
            }
            x[i] = s / self.l[ri + i];
        }
        for i in (0..n).rev() {
            let ri = i * w + p - i;
            x[i] /= self.l[ri + i];
            let xi = x[i];
            for k in i.saturating_sub(p)..i {
                x[k] -= self.l[ri + k] * xi;
            }
        }
    }
}

/// Largest eigenvalue of a symmetric operator by Lanczos with full
/// reorthogonalization. Stops when the Ritz value moves less than `rtol`
/// (relative) between steps.
pub fn lanczos_largest(
    mut apply: impl FnMut(&[f64], &mut [f64]),
    start: &[f64],
    max_steps: usize,
    rtol: f64,
) -> Result<f64> {
    let n = start.len();
    let norm0 = dot(start, start).sqrt();
    if norm0 == 0.0 {
        return Err(Error::Usage("Lanczos start vector is zero".into()));
    }
    let mut basis: Vec<Vec<f64>> = vec![start.iter().map(|v| v / norm0).collect()];
    let mut alphas = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut previous = f64::NAN;
    for step in 0..max_steps.min(n) {
        apply(&basis[step], &mut w);
        let alpha = dot(&w, &basis[step]);
        alphas.push(alpha);
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                axpy(-c, q, &mut w);
            }
        }
        let beta = dot(&w, &w).sqrt();
        let t = SymTridiagonal::new(alphas.clone(), betas.clone())?;
        let ritz = t.largest();
        if (ritz - previous).abs() <= rtol * ritz.abs() || beta <= 1e-14 * ritz.abs() {
            return Ok(ritz);
        }
        previous = ritz;
        betas.push(beta);
        basis.push(w.iter().map(|v| v / beta).collect());
    }
    Err(Error::Solver(format!(
        "Lanczos did not converge in {max_steps} steps (last Ritz value {previous})"
    )))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four independent accumulators so the loop vectorizes
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Solve a small dense system by Gaussian elimination with partial pivoting.
pub fn solve_dense<const N: usize>(mut a: [[f64; N]; N], mut b: [f64; N]) -> Result<[f64; N]> {
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    for col in 0..N {
        let piv = (col..N)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        if a[piv][col].abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Domain("singular linear system".into()));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..N {
            let f = a[row][col] / a[col][col];
            for k in col..N {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; N];
    for row in (0..N).rev() {
        let s: f64 = (row + 1..N).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Ok(x)
}
