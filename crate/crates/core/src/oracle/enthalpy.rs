use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{build_enthalpy_pair, EnthalpyPair, RiemannProblem1D};

/// Fraction of the explicit stability limit `dx² / (2 max a_i²)` used by default.
pub const CFL_SAFETY: f64 = 0.9;
/// Number of front samples recorded over `[0, T]`.
const SAMPLES: usize = 4000;
/// Boundary cells must stay within this of `u_±`.
const BOUNDARY_TOL: f64 = 1e-12;

/// Uniform cell-centred grid on `[-L, L]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdGrid1D {
    pub half_width: f64,
    pub cells: usize,
    pub dt: f64,
    pub end_time: f64,
}

impl FdGrid1D {
    /// Grid with the largest time step at [`CFL_SAFETY`] of the stability
    /// limit that divides `end_time` evenly.
    pub fn new(half_width: f64, cells: usize, end_time: f64, max_ratio: f64) -> Result<Self> {
        if !(half_width > 0.0) || !(end_time > 0.0) || !(max_ratio > 0.0) {
            return Err(Error::Validation("grid needs positive width, end time and diffusivity".into()));
        }
        if cells < 4 || !cells.is_multiple_of(2) {
            return Err(Error::Validation(format!("cell count must be even and >= 4, got {cells}")));
        }
        let dx = 2.0 * half_width / cells as f64;
        let limit = CFL_SAFETY * dx * dx / (2.0 * max_ratio);
        let steps = (end_time / limit).ceil().max(1.0);
        Ok(FdGrid1D { half_width, cells, dt: end_time / steps, end_time })
    }

    /// Grid for `p` with half width `14 a_max √T`, wide enough that the
    /// boundary cells do not feel the fronts for `|ξ| <= 3 a_max`.
    pub fn for_problem(p: &RiemannProblem1D, cells: usize, end_time: f64) -> Result<Self> {
        let a = p.config.a_max();
        let ratio = build_enthalpy_pair(p).max_ratio_bound();
        Self::new(14.0 * a * end_time.max(0.0).sqrt(), cells, end_time, ratio)
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.cells as f64
    }

    pub fn steps(&self) -> usize {
        (self.end_time / self.dt).round() as usize
    }

    fn center(&self, j: usize) -> f64 {
        -self.half_width + (j as f64 + 0.5) * self.dx()
    }
}

/// Front positions extracted from an enthalpy simulation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontTrace {
    pub times: Vec<f64>,
    /// `positions[k][i]` is front `i + 1` at `times[k]`.
    pub positions: Vec<Vec<f64>>,
    /// Least-squares fit of `x_i(t) = ξ_i √t` over `t ∈ [T/4, T]`.
    pub xi_hat: Vec<f64>,
    /// `|Δ Σ w dx - boundary flux|` relative to the enthalpy scale.
    pub conservation_defect: f64,
    /// Largest `|u - u_±|` over the two boundary cells at the end.
    pub boundary_drift: f64,
    /// Fewest cells any front travelled.
    pub min_cells_crossed: f64,
}

/// Position where the monotone profile crosses `level`: linear interpolation
/// between neighbouring cells, or the midpoint of a plateau pinned at `level`.
fn crossing(grid: &FdGrid1D, u: &[f64], level: f64) -> Option<f64> {
    let j = u.iter().position(|&v| v >= level)?;
    if j == 0 {
        return None;
    }
    if u[j] == level {
        let last = j + u[j..].iter().take_while(|&&v| v == level).count() - 1;
        if last + 1 == u.len() {
            return None;
        }
        return Some(0.5 * (grid.center(j) + grid.center(last)));
    }
    let (x0, x1) = (grid.center(j - 1), grid.center(j));
    let s = (level - u[j - 1]) / (u[j] - u[j - 1]);
    Some(x0 + s * (x1 - x0))
}

fn fronts(grid: &FdGrid1D, u: &[f64], levels: &[f64], t: f64) -> Result<Vec<f64>> {
    levels
        .iter()
        .enumerate()
        .map(|(i, &level)| {
            crossing(grid, u, level)
                .ok_or_else(|| Error::FrontAtBoundary(format!("front {} left the grid by t = {t}", i + 1)))
        })
        .collect()
}

/// Explicit conservative scheme for `β(u)_t = α(u)_xx` from Riemann data,
/// with Dirichlet ghost cells holding `u_-` and `u_+`.
pub fn simulate_enthalpy_1d(p: &RiemannProblem1D, grid: &FdGrid1D) -> Result<FrontTrace> {
    let pair: EnthalpyPair = build_enthalpy_pair(p);
    let dx = grid.dx();
    let limit = dx * dx / (2.0 * pair.max_ratio_bound());
    if !(grid.dt > 0.0) || grid.dt > limit * (1.0 + 1e-12) {
        return Err(Error::Cfl(format!("dt = {:e} exceeds the stability limit {limit:e}", grid.dt)));
    }
    let n = grid.cells;
    let (u_minus, u_plus) = (p.u_minus(), p.u_plus());
    let levels: Vec<f64> = (1..=p.m()).map(|i| p.config.u(i)).collect();
    let (alpha_l, alpha_r) = (pair.alpha(u_minus), pair.alpha(u_plus));

    let mut u: Vec<f64> = (0..n).map(|j| if j < n / 2 { u_minus } else { u_plus }).collect();
    let mut w: Vec<f64> = u.iter().map(|&v| pair.beta(v)).collect();
    let mut alpha: Vec<f64> = u.iter().map(|&v| pair.alpha(v)).collect();

    let initial_mass: f64 = w.iter().sum::<f64>() * dx;
    let scale = w.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0) * 2.0 * grid.half_width;
    let mut inflow = 0.0;
    let lambda = grid.dt / (dx * dx);
    let steps = grid.steps();
    let stride = (steps / SAMPLES).max(1);

    let mut times = Vec::new();
    let mut positions = Vec::new();
    for step in 1..=steps {
        inflow += grid.dt / dx * ((alpha_l - alpha[0]) + (alpha_r - alpha[n - 1]));
        for j in 0..n {
            let left = if j == 0 { alpha_l } else { alpha[j - 1] };
            let right = if j + 1 == n { alpha_r } else { alpha[j + 1] };
            w[j] += lambda * (left - 2.0 * alpha[j] + right);
        }
        for j in 0..n {
            u[j] = pair.invert_beta(w[j])?;
            alpha[j] = pair.alpha(u[j]);
        }
        if step % stride == 0 || step == steps {
            let t = step as f64 * grid.dt;
            positions.push(fronts(grid, &u, &levels, t)?);
            times.push(t);
        }
    }

    let final_mass: f64 = w.iter().sum::<f64>() * dx;
    let conservation_defect = (final_mass - initial_mass - inflow).abs() / scale;
    let boundary_drift = (u[0] - u_minus).abs().max((u[n - 1] - u_plus).abs());
    if boundary_drift > BOUNDARY_TOL {
        return Err(Error::FrontAtBoundary(format!("boundary cells drifted by {boundary_drift:e}; widen the grid")));
    }

    let m = levels.len();
    let fit_from = 0.25 * grid.end_time;
    let mut xi_hat = vec![0.0; m];
    let mut denom = 0.0;
    for (t, x) in times.iter().zip(&positions) {
        if *t < fit_from {
            continue;
        }
        denom += t;
        for i in 0..m {
            xi_hat[i] += x[i] * t.sqrt();
        }
    }
    for v in &mut xi_hat {
        *v /= denom;
    }
    let min_cells_crossed =
        positions.last().map(|x| x.iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs() / dx))).unwrap_or(0.0);

    Ok(FrontTrace { times, positions, xi_hat, conservation_defect, boundary_drift, min_cells_crossed })
}
