//! Potential of the one-dimensional problem.
//!
//! For fronts `ξ_1 < … < ξ_m`,
//!
//! ```text
//! E(ξ) = -Σ_{i=0}^{m} k_i (u_{i+1} - u_i) ln(F(ξ_{i+1}/a_i) - F(ξ_i/a_i)) + Σ_{i=1}^{m} d_i ξ_i² / 4
//! ```
//!
//! with `ξ_0 = -∞`, `ξ_{m+1} = +∞`. Its gradient is the vector of Stefan
//! conditions and it is strictly convex, so the unique critical point is the
//! global minimum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::RiemannProblem1D;
use crate::special_fn::{eval_f_prime, f_diff, inv_f};
use crate::tridiag::SymTridiagonal;

/// Gaps `F(ξ_{i+1}/a_i) - F(ξ_i/a_i)` below this are reported as infeasible.
pub const MIN_GAP: f64 = 1e-300;

/// Fronts `ξ_1 < … < ξ_m` in similarity coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FrontVector1D {
    xi: Vec<f64>,
}

impl FrontVector1D {
    pub fn new(xi: Vec<f64>) -> Result<Self> {
        check_increasing(&xi)?;
        Ok(FrontVector1D { xi })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.xi
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.xi
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    /// `ξ_i`, 1-based as in the model.
    pub fn xi(&self, i: usize) -> f64 {
        self.xi[i - 1]
    }
}

pub(crate) fn check_increasing(xi: &[f64]) -> Result<()> {
    if xi.iter().any(|v| !v.is_finite()) {
        return Err(Error::Infeasible("front coordinates must be finite".into()));
    }
    if xi.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Infeasible("fronts must be strictly increasing".into()));
    }
    Ok(())
}

/// Per-phase data at a point: scaled endpoints and the `F`-gap.
struct Phase {
    /// `ξ_{i+1}/a_i` (`+∞` for the last phase).
    hi: f64,
    /// `ξ_i/a_i` (`-∞` for the first phase).
    lo: f64,
    gap: f64,
}

fn phases(p: &RiemannProblem1D, xi: &[f64]) -> Result<Vec<Phase>> {
    let m = p.m();
    if xi.len() != m {
        return Err(Error::Infeasible(format!("expected {m} fronts, got {}", xi.len())));
    }
    check_increasing(xi)?;
    (0..=m)
        .map(|i| {
            let a = p.config.a(i);
            let lo = if i == 0 { f64::NEG_INFINITY } else { xi[i - 1] / a };
            let hi = if i == m { f64::INFINITY } else { xi[i] / a };
            let gap = f_diff(hi, lo);
            if !(gap >= MIN_GAP) {
                return Err(Error::Infeasible(format!("phase {i} gap F(hi) - F(lo) = {gap:e} underflows")));
            }
            Ok(Phase { hi, lo, gap })
        })
        .collect()
}

pub(crate) fn energy_slice(p: &RiemannProblem1D, xi: &[f64]) -> Result<f64> {
    let ph = phases(p, xi)?;
    let logs: f64 = ph.iter().enumerate().map(|(i, phase)| -p.config.weight(i) * phase.gap.ln()).sum();
    let latent: f64 = (1..=p.m()).map(|i| 0.25 * p.config.d(i) * xi[i - 1] * xi[i - 1]).sum();
    Ok(logs + latent)
}

pub(crate) fn grad_slice(p: &RiemannProblem1D, xi: &[f64]) -> Result<Vec<f64>> {
    let ph = phases(p, xi)?;
    let m = p.m();
    let mut g: Vec<f64> = (1..=m).map(|j| 0.5 * p.config.d(j) * xi[j - 1]).collect();
    for (i, phase) in ph.iter().enumerate() {
        let scale = p.config.weight(i) / (p.config.a(i) * phase.gap);
        if i >= 1 {
            // ∂/∂ξ_i of -w ln(F(hi) - F(ξ_i/a_i))
            g[i - 1] += scale * eval_f_prime(phase.lo);
        }
        if i < m {
            g[i] -= scale * eval_f_prime(phase.hi);
        }
    }
    Ok(g)
}

pub(crate) fn hess_slice(p: &RiemannProblem1D, xi: &[f64]) -> Result<SymTridiagonal> {
    let ph = phases(p, xi)?;
    let m = p.m();
    let mut h = SymTridiagonal::zeros(m);
    for j in 1..=m {
        h.diag[j - 1] = 0.5 * p.config.d(j);
    }
    for (i, phase) in ph.iter().enumerate() {
        let a = p.config.a(i);
        let w = p.config.weight(i) / (a * a);
        // r = F'(·)/gap; F'' = -(z/2) F' gives the closed-form entries
        // P_xx = r_x² + (x/2) r_x, P_yy = r_y² - (y/2) r_y, P_xy = -r_x r_y.
        let r_hi = if i < m { eval_f_prime(phase.hi) / phase.gap } else { 0.0 };
        let r_lo = if i >= 1 { eval_f_prime(phase.lo) / phase.gap } else { 0.0 };
        if i < m {
            h.diag[i] += w * (r_hi * r_hi + 0.5 * phase.hi * r_hi);
        }
        if i >= 1 {
            h.diag[i - 1] += w * (r_lo * r_lo - 0.5 * phase.lo * r_lo);
        }
        if i >= 1 && i < m {
            h.off[i - 1] -= w * r_hi * r_lo;
        }
    }
    Ok(h)
}

/// `E(ξ)`; strictly positive at every feasible point.
pub fn energy_1d(p: &RiemannProblem1D, xi: &FrontVector1D) -> Result<f64> {
    energy_slice(p, xi.as_slice())
}

/// `∇E(ξ)`: component `i` is the left-hand side of the `i`-th Stefan condition.
pub fn grad_1d(p: &RiemannProblem1D, xi: &FrontVector1D) -> Result<Vec<f64>> {
    grad_slice(p, xi.as_slice())
}

/// Analytic Hessian of `E`; tridiagonal and positive definite.
pub fn hess_1d(p: &RiemannProblem1D, xi: &FrontVector1D) -> Result<SymTridiagonal> {
    hess_slice(p, xi.as_slice())
}

/// `Q = (F(x) - F(y))² D²P(x, y)` for `P(x, y) = -ln(F(x) - F(y))`, `x > y`.
pub fn pair_q_matrix(x: f64, y: f64) -> [[f64; 2]; 2] {
    let gap = f_diff(x, y);
    let fx = eval_f_prime(x);
    let fy = eval_f_prime(y);
    let q11 = fx * fx + 0.5 * x * fx * gap;
    let q22 = fy * fy - 0.5 * y * fy * gap;
    let q12 = -fx * fy;
    [[q11, q12], [q12, q22]]
}

/// `d²/dx² (-ln F(x)) = r² + (x/2) r` with `r = F'(x)/F(x)`.
pub fn neg_log_f_second(x: f64) -> f64 {
    let r = eval_f_prime(x) / f_diff(x, f64::NEG_INFINITY);
    r * r + 0.5 * x * r
}

/// Box containing the sub-level set `{E <= c}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoercivityBox1D {
    pub level: f64,
    /// Lower bound on `ξ_1`.
    pub r1: f64,
    /// Upper bound on `ξ_m`.
    pub r2: f64,
    /// Lower bound on every gap `ξ_{i+1} - ξ_i`; `+∞` when `m = 1`.
    pub delta1: f64,
}

impl CoercivityBox1D {
    pub fn contains(&self, xi: &[f64]) -> bool {
        let (Some(first), Some(last)) = (xi.first(), xi.last()) else {
            return false;
        };
        *first >= self.r1 && *last <= self.r2 && xi.windows(2).all(|w| w[1] - w[0] >= self.delta1)
    }
}

/// Bounds from the sub-level inequality `-k_i(u_{i+1}-u_i) ln(gap_i) <= c`:
/// `r1 = a_0 F⁻¹(e^{-c/w_0})`, `r2 = -a_m F⁻¹(e^{-c/w_m})`,
/// `delta1 = e^{-c/α} min a_i` with `α = min_{1<=i<m} w_i`.
pub fn coercivity_box_1d(p: &RiemannProblem1D, c: f64) -> Result<CoercivityBox1D> {
    if !(c > 0.0) {
        return Err(Error::Domain(format!("sub-level c must be positive, got {c}")));
    }
    let cfg = &p.config;
    let m = p.m();
    let r1 = cfg.a(0) * inv_f((-c / cfg.weight(0)).exp())?;
    let r2 = -cfg.a(m) * inv_f((-c / cfg.weight(m)).exp())?;
    let delta1 = if m >= 2 {
        let alpha = (1..m).map(|i| cfg.weight(i)).fold(f64::INFINITY, f64::min);
        let a_min = (1..m).map(|i| cfg.a(i)).fold(f64::INFINITY, f64::min);
        (-c / alpha).exp() * a_min
    } else {
        f64::INFINITY
    };
    Ok(CoercivityBox1D { level: c, r1, r2, delta1 })
}
