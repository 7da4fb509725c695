//! Symmetric tridiagonal eigenpairs by Sturm-sequence bisection and inverse
//! iteration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Symmetric tridiagonal matrix: `diag[i]` on the diagonal, `off[i]` at
/// `(i, i+1)` and `(i+1, i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1), "off-diagonal must be one shorter");
        Self { diag, off }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Max-row-sum norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim())
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.off[i - 1].abs();
                }
                if i < self.off.len() {
                    s += self.off[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    /// Gershgorin interval containing every eigenvalue.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.dim() {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i < self.off.len() {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (negative pivots of the
    /// `LDLᵀ` factorization of `T − xI`).
    pub fn sturm_count(&self, x: f64) -> usize {
        let pivmin = f64::MIN_POSITIVE * self.off.iter().map(|b| b * b).fold(1.0, f64::max);
        let mut count = 0;
        let mut q = 0.0;
        for i in 0..self.dim() {
            q = if i == 0 {
                self.diag[0] - x
            } else {
                self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / q
            };
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// `index`-th smallest eigenvalue (0-based) by bisection to full precision.
    pub fn bisect_eigenvalue(&self, index: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let pad = f64::EPSILON * (lo.abs().max(hi.abs())).max(1.0);
        lo -= pad;
        hi += pad;
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                return mid;
            }
            if self.sturm_count(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }

    /// Solves `(T − shift·I) x = rhs` in place by LU with partial pivoting.
    /// Exactly singular pivots are replaced by a tiny value, as inverse
    /// iteration expects.
    pub fn shifted_solve(&self, shift: f64, rhs: &mut [f64]) {
        let n = self.dim();
        if n == 1 {
            let d = self.diag[0] - shift;
            rhs[0] /= if d == 0.0 { f64::EPSILON } else { d };
            return;
        }
        let tiny = f64::EPSILON * self.norm_inf().max(f64::MIN_POSITIVE);
        let mut d: Vec<f64> = self.diag.iter().map(|v| v - shift).collect();
        let mut dl = self.off.clone();
        let mut du = self.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n - 1];

        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }

        for i in 0..n - 1 {
            if swapped[i] {
                let temp = rhs[i];
                rhs[i] = rhs[i + 1];
                rhs[i + 1] = temp - dl[i] * rhs[i];
            } else {
                rhs[i + 1] -= dl[i] * rhs[i];
            }
        }
        rhs[n - 1] /= d[n - 1];
        rhs[n - 2] = (rhs[n - 2] - du[n - 2] * rhs[n - 1]) / d[n - 2];
        for i in (0..n.saturating_sub(2)).rev() {
            rhs[i] = (rhs[i] - du[i] * rhs[i + 1] - du2[i] * rhs[i + 2]) / d[i];
        }
    }

    /// `|T x − λ x|` for a unit vector `x`.
    pub fn residual(&self, lambda: f64, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(tx, xi)| (tx - lambda * xi).powi(2)).sum::<f64>().sqrt()
    }
}

/// Unit eigenvector for `lambda`, orthogonalized against `previous`.
/// Returns the vector, its residual and the number of iterations, or `None`
/// if the residual stays above `tol` for `max_iter` iterations.
pub(crate) fn inverse_iteration(
    t: &SymTridiagonal,
    lambda: f64,
    previous: &[Vec<f64>],
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<(Vec<f64>, f64, usize), f64> {
    let n = t.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    normalize(&mut x);
    let mut residual = f64::INFINITY;
    for iter in 1..=max_iter {
        t.shifted_solve(lambda, &mut x);
        for p in previous {
            let dot: f64 = x.iter().zip(p).map(|(a, b)| a * b).sum();
            x.iter_mut().zip(p).for_each(|(a, b)| *a -= dot * b);
        }
        normalize(&mut x);
        residual = t.residual(lambda, &x);
        if iter >= 2 && residual <= tol {
            return Ok((x, residual, iter));
        }
    }
    Err(residual)
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}
