//! Symmetric tridiagonal matrices: the shape of every Hessian here, since each
//! potential term couples only neighbouring fronts.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn zeros(n: usize) -> Self {
        SymTridiagonal { diag: vec![0.0; n], off: vec![0.0; n.saturating_sub(1)] }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.abs_diff(j) {
            0 => self.diag[i],
            1 => self.off[i.min(j)],
            _ => 0.0,
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.off[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.off[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    /// Returns a copy with `shift` added to the diagonal.
    pub fn shifted(&self, shift: f64) -> Self {
        SymTridiagonal { diag: self.diag.iter().map(|d| d + shift).collect(), off: self.off.clone() }
    }

    /// Cholesky factorization `L Lᵀ`; `None` unless strictly positive definite.
    pub fn cholesky(&self) -> Option<TridiagCholesky> {
        let n = self.dim();
        let mut l_diag = vec![0.0; n];
        let mut l_sub = vec![0.0; n.saturating_sub(1)];
        for i in 0..n {
            let mut p = self.diag[i];
            if i > 0 {
                p -= l_sub[i - 1] * l_sub[i - 1];
            }
            if !(p > 0.0) || !p.is_finite() {
                return None;
            }
            l_diag[i] = p.sqrt();
            if i + 1 < n {
                l_sub[i] = self.off[i] / l_diag[i];
            }
        }
        Some(TridiagCholesky { l_diag, l_sub })
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0_f64;
        for i in 0..self.dim() {
            let b2 = if i > 0 { self.off[i - 1] * self.off[i - 1] } else { 0.0 };
            q = self.diag[i] - x - if i > 0 { b2 / q } else { 0.0 };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs() + 1e-300);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Smallest eigenvalue by bisection on the Sturm count inside the
    /// Gershgorin interval.
    pub fn min_eigenvalue(&self) -> f64 {
        let n = self.dim();
        if n == 0 {
            return f64::NAN;
        }
        let r = self.norm_inf();
        let (mut lo, mut hi) = (-r - 1e-300, r + 1e-300);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

#[derive(Debug, Clone)]
pub struct TridiagCholesky {
    l_diag: Vec<f64>,
    l_sub: Vec<f64>,
}

impl TridiagCholesky {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.l_diag.len();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = b[i];
            if i > 0 {
                s -= self.l_sub[i - 1] * y[i - 1];
            }
            y[i] = s / self.l_diag[i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            if i + 1 < n {
                s -= self.l_sub[i] * y[i + 1];
            }
            y[i] = s / self.l_diag[i];
        }
        y
    }
}
