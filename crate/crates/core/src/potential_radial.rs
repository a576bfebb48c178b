//! Potential of the radial problem with a point source.
//!
//! Fronts satisfy `0 < ξ_m < … < ξ_1 < ξ_0`, where `ξ_0 = +∞` unless the
//! extended-front variant is active. The potential is
//!
//! ```text
//! E(ξ) = -Σ_{i=0}^{m-1} k_i (u_{i+1} - u_i) ln(G(ξ_{i+1}/a_i) - G(ξ_i/a_i))
//!        + k_m A G(ξ_m/a_m) + Σ_{i=1}^{m} d_i ξ_i² / 4   [+ d_0 ξ_0² / 4]
//! ```
//!
//! It is bounded below and coercive but in general not convex.
//!
//! Storage order is ascending by value: slot 0 holds `ξ_m`, slot `m - 1`
//! holds `ξ_1` and slot `m` holds `ξ_0` when present. [`FrontVectorRadial::xi`]
//! takes the model's subscripts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::RadialProblem;
use crate::special_fn::{g_diff, g_prime_unchecked, g_second_unchecked, g_unchecked, inv_g};
use crate::tridiag::SymTridiagonal;

pub use crate::potential_1d::MIN_GAP;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontVectorRadial {
    ascending: Vec<f64>,
    extended: bool,
}

impl FrontVectorRadial {
    /// From `ξ_1 > … > ξ_m` and an optional outer front `ξ_0 > ξ_1`.
    pub fn from_model_order(xi: &[f64], xi0: Option<f64>) -> Result<Self> {
        let mut ascending: Vec<f64> = xi.iter().rev().cloned().collect();
        if let Some(x0) = xi0 {
            ascending.push(x0);
        }
        Self::from_ascending(ascending, xi0.is_some())
    }

    pub fn from_ascending(ascending: Vec<f64>, extended: bool) -> Result<Self> {
        check_cone(&ascending)?;
        if ascending.len() < 1 + extended as usize {
            return Err(Error::Infeasible("too few fronts".into()));
        }
        Ok(FrontVectorRadial { ascending, extended })
    }

    pub fn as_ascending(&self) -> &[f64] {
        &self.ascending
    }

    pub fn extended(&self) -> bool {
        self.extended
    }

    /// Number of inner fronts `m`.
    pub fn m(&self) -> usize {
        self.ascending.len() - self.extended as usize
    }

    /// `ξ_i` for `i = 0..=m`; `ξ_0 = +∞` without the extended front.
    pub fn xi(&self, i: usize) -> f64 {
        let m = self.m();
        if i == 0 {
            if self.extended {
                self.ascending[m]
            } else {
                f64::INFINITY
            }
        } else {
            self.ascending[m - i]
        }
    }

    /// `ξ_1, …, ξ_m` (decreasing).
    pub fn model_order(&self) -> Vec<f64> {
        (1..=self.m()).map(|i| self.xi(i)).collect()
    }
}

pub(crate) fn check_cone(y: &[f64]) -> Result<()> {
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Infeasible("front coordinates must be finite".into()));
    }
    if let Some(first) = y.first() {
        if !(*first > 0.0) {
            return Err(Error::Infeasible("radial fronts must be positive".into()));
        }
    }
    if y.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Infeasible("radial fronts must be strictly decreasing in model order".into()));
    }
    Ok(())
}

/// Evaluation context binding the storage layout to model subscripts.
struct Layout<'a> {
    p: &'a RadialProblem,
    y: &'a [f64],
    m: usize,
}

impl<'a> Layout<'a> {
    fn new(p: &'a RadialProblem, y: &'a [f64]) -> Result<Self> {
        let m = p.m();
        let expected = m + p.extended() as usize;
        if y.len() != expected {
            return Err(Error::Infeasible(format!("expected {expected} fronts, got {}", y.len())));
        }
        check_cone(y)?;
        Ok(Layout { p, y, m })
    }

    fn xi(&self, i: usize) -> f64 {
        if i == 0 {
            if self.p.extended() {
                self.y[self.m]
            } else {
                f64::INFINITY
            }
        } else {
            self.y[self.m - i]
        }
    }

    /// Storage slot of `ξ_i`.
    fn slot(&self, i: usize) -> usize {
        self.m - i
    }

    /// Scaled endpoints and gap `G(lo) - G(hi)` of phase `i < m`.
    fn phase(&self, i: usize) -> Result<(f64, f64, f64)> {
        let a = self.p.config.a(i);
        let lo = self.xi(i + 1) / a;
        let hi = self.xi(i) / a;
        let gap = g_diff(lo, hi, self.p.n);
        if !(gap >= MIN_GAP) {
            return Err(Error::Infeasible(format!("phase {i} gap G(lo) - G(hi) = {gap:e} underflows")));
        }
        Ok((lo, hi, gap))
    }
}

/// Contributions to `E` at a point, kept apart so the variants can be compared.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParts {
    /// `-Σ k_i (u_{i+1} - u_i) ln(gap_i)`.
    pub logs: f64,
    /// `k_m A G(ξ_m/a_m)`.
    pub source: f64,
    /// `Σ_{i>=1} d_i ξ_i² / 4`.
    pub latent: f64,
    /// `d_0 ξ_0² / 4` (zero without the extended front).
    pub outer_latent: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.logs + self.source + self.latent + self.outer_latent
    }
}

pub(crate) fn energy_parts_slice(p: &RadialProblem, y: &[f64]) -> Result<EnergyParts> {
    let l = Layout::new(p, y)?;
    let cfg = &p.config;
    let m = l.m;
    let mut logs = 0.0;
    for i in 0..m {
        let (_, _, gap) = l.phase(i)?;
        logs -= cfg.weight(i) * gap.ln();
    }
    let source = cfg.k(m) * p.amplitude * g_unchecked(l.xi(m) / cfg.a(m), p.n);
    let latent = (1..=m).map(|i| 0.25 * cfg.d(i) * l.xi(i) * l.xi(i)).sum();
    let outer_latent = if p.extended() { 0.25 * p.d0 * l.xi(0) * l.xi(0) } else { 0.0 };
    Ok(EnergyParts { logs, source, latent, outer_latent })
}

pub(crate) fn energy_slice(p: &RadialProblem, y: &[f64]) -> Result<f64> {
    Ok(energy_parts_slice(p, y)?.total())
}

pub(crate) fn grad_slice(p: &RadialProblem, y: &[f64]) -> Result<Vec<f64>> {
    let l = Layout::new(p, y)?;
    let cfg = &p.config;
    let n = p.n;
    let m = l.m;
    let mut g = vec![0.0; y.len()];
    for j in 1..=m {
        g[l.slot(j)] = 0.5 * cfg.d(j) * l.xi(j);
    }
    if p.extended() {
        g[l.slot(0)] = 0.5 * p.d0 * l.xi(0);
    }
    for i in 0..m {
        let (lo, hi, gap) = l.phase(i)?;
        let a = cfg.a(i);
        let w = cfg.weight(i) / (a * gap);
        // lo = ξ_{i+1}/a_i, hi = ξ_i/a_i
        g[l.slot(i + 1)] -= w * g_prime_unchecked(lo, n);
        if i > 0 || p.extended() {
            g[l.slot(i)] += w * g_prime_unchecked(hi, n);
        }
    }
    let am = cfg.a(m);
    g[l.slot(m)] += cfg.k(m) * p.amplitude / am * g_prime_unchecked(l.xi(m) / am, n);
    Ok(g)
}

pub(crate) fn hess_slice(p: &RadialProblem, y: &[f64]) -> Result<SymTridiagonal> {
    let l = Layout::new(p, y)?;
    let cfg = &p.config;
    let n = p.n;
    let m = l.m;
    let mut h = SymTridiagonal::zeros(y.len());
    for j in 1..=m {
        h.diag[l.slot(j)] = 0.5 * cfg.d(j);
    }
    if p.extended() {
        h.diag[l.slot(0)] = 0.5 * p.d0;
    }
    for i in 0..m {
        let (lo, hi, gap) = l.phase(i)?;
        let a = cfg.a(i);
        let w = cfg.weight(i) / (a * a);
        // P = -ln(G(lo) - G(hi)):
        // P_lo,lo = (G'(lo)/D)² - G''(lo)/D, P_hi,hi = (G'(hi)/D)² + G''(hi)/D,
        // P_lo,hi = -G'(lo) G'(hi) / D².
        let r_lo = g_prime_unchecked(lo, n) / gap;
        let s_lo = l.slot(i + 1);
        h.diag[s_lo] += w * (r_lo * r_lo - g_second_unchecked(lo, n) / gap);
        if i > 0 || p.extended() {
            let r_hi = g_prime_unchecked(hi, n) / gap;
            let s_hi = l.slot(i);
            h.diag[s_hi] += w * (r_hi * r_hi + g_second_unchecked(hi, n) / gap);
            // Slots of ξ_{i+1} and ξ_i are adjacent: s_hi = s_lo + 1.
            h.off[s_lo] -= w * r_lo * r_hi;
        }
    }
    let am = cfg.a(m);
    h.diag[l.slot(m)] += cfg.k(m) * p.amplitude / (am * am) * g_second_unchecked(l.xi(m) / am, n);
    Ok(h)
}

pub fn energy_radial(p: &RadialProblem, xi: &FrontVectorRadial) -> Result<f64> {
    energy_slice(p, xi.as_ascending())
}

/// Term-by-term breakdown of [`energy_radial`].
pub fn energy_radial_parts(p: &RadialProblem, xi: &FrontVectorRadial) -> Result<EnergyParts> {
    energy_parts_slice(p, xi.as_ascending())
}

/// `∇E` in storage order (slot 0 is `∂E/∂ξ_m`).
pub fn grad_radial(p: &RadialProblem, xi: &FrontVectorRadial) -> Result<Vec<f64>> {
    grad_slice(p, xi.as_ascending())
}

/// Analytic Hessian in storage order; not necessarily positive definite.
pub fn hess_radial(p: &RadialProblem, xi: &FrontVectorRadial) -> Result<SymTridiagonal> {
    hess_slice(p, xi.as_ascending())
}

/// `f(y) = -Σ_{i<m} k_i (u_{i+1} - u_i) ln G(y/a_i) + k_m A G(y/a_m)`, a lower
/// bound for `E` at every point whose innermost front is `ξ_m = y`.
pub fn lower_bound_f(p: &RadialProblem, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("lower bound needs y > 0, got {y}")));
    }
    Ok(lower_bound_unchecked(p, y))
}

fn lower_bound_unchecked(p: &RadialProblem, y: f64) -> f64 {
    let cfg = &p.config;
    let m = p.m();
    let logs: f64 = (0..m).map(|i| -cfg.weight(i) * g_unchecked(y / cfg.a(i), p.n).ln()).sum();
    logs + cfg.k(m) * p.amplitude * g_unchecked(y / cfg.a(m), p.n)
}

/// Global minimum `(y*, f(y*))` of [`lower_bound_f`]: a geometric grid scan
/// followed by golden-section refinement around the best grid point.
pub fn min_lower_bound(p: &RadialProblem) -> (f64, f64) {
    const PER_DECADE: usize = 64;
    let lo = (1e-8 * p.config.a_min()).log10();
    let hi = (1e3 * p.config.a_max()).log10();
    let count = ((hi - lo) * PER_DECADE as f64).ceil() as usize;
    let grid: Vec<f64> = (0..=count).map(|k| 10f64.powf(lo + (hi - lo) * k as f64 / count as f64)).collect();
    let values: Vec<f64> = grid.iter().map(|&y| lower_bound_unchecked(p, y)).collect();
    let best = values
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_nan())
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .unwrap_or(0);
    let mut a = grid[best.saturating_sub(1)].ln();
    let mut b = grid[(best + 1).min(count)].ln();
    let f = |s: f64| lower_bound_unchecked(p, s.exp());
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-14 * (1.0 + a.abs()) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    let (s, v) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    if v <= values[best] {
        (s.exp(), v)
    } else {
        (grid[best], values[best])
    }
}

/// Gap bound used when `m >= 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapBound {
    /// Lower bound on `G(ξ_{i+1}/a_i) - G(ξ_i/a_i)`, `1 <= i < m`.
    pub q: f64,
    /// Lipschitz constant of `G` on `[r1 / max a_i, ∞)`.
    pub lipschitz: f64,
}

/// Box containing the sub-level set `{E <= c}` of the radial potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoercivityBoxRadial {
    pub level: f64,
    /// Lower bound on `ξ_m`.
    pub r1: f64,
    /// Upper bound on `ξ_1`.
    pub r2: f64,
    /// Lower bound on the gaps `ξ_i - ξ_{i+1}`; `+∞` when `m = 1`.
    pub delta: f64,
    pub gap_bound: Option<GapBound>,
    /// `c1 = c + (m - 1) M`.
    pub c1: f64,
    /// Upper bound on the outer front `ξ_0` in the extended variant.
    pub r0: Option<f64>,
}

impl CoercivityBoxRadial {
    /// Membership test for a storage-order vector.
    pub fn contains(&self, ascending: &[f64], extended: bool) -> bool {
        let inner = &ascending[..ascending.len() - extended as usize];
        let (Some(first), Some(last)) = (inner.first(), inner.last()) else {
            return false;
        };
        let ok = *first >= self.r1 && *last <= self.r2 && inner.windows(2).all(|w| w[1] - w[0] >= self.delta);
        match (extended, self.r0) {
            (true, Some(r0)) => ok && ascending[ascending.len() - 1] <= r0,
            _ => ok,
        }
    }
}

/// Sub-level box at level `c`, or `None` when `c < min f` (empty set).
///
/// `r1` comes from a geometric scan of `f` (512 points per decade) refined by
/// bisection on `f(y) = c`, so that `f > c` on the scanned part of `(0, r1)`.
/// The remaining bounds follow `M = max_{i<m} w_i ln G(r1/a_i)`,
/// `c1 = c + (m - 1) M`, `r2 = a_0 G⁻¹(e^{-c1/w_0})`,
/// `q = min_{1<=i<m} e^{-c1/w_i}`, `L = α^{1-n}` with `α = r1 / max_{1<=i<m} a_i`
/// and `delta = (q/L) min_{1<=i<m} a_i`.
///
/// In the extended variant the box covers `ξ_1..ξ_m` (the outer term only
/// raises the log sum) and adds `ξ_0 <= r0 = 2 sqrt((c - min f)/d_0)`.
pub fn coercivity_box_radial(p: &RadialProblem, c: f64) -> Result<Option<CoercivityBoxRadial>> {
    const PER_DECADE: f64 = 512.0;
    if !c.is_finite() {
        return Err(Error::Domain(format!("sub-level c must be finite, got {c}")));
    }
    let cfg = &p.config;
    let m = p.m();
    let n = p.n;
    let f = |y: f64| lower_bound_unchecked(p, y);

    let lo_exp = (1e-8 * cfg.a_min()).log10();
    let hi_exp = (1e3 * cfg.a_max()).log10();
    let count = ((hi_exp - lo_exp) * PER_DECADE).ceil() as usize;
    let grid = |k: usize| 10f64.powf(lo_exp + (hi_exp - lo_exp) * k as f64 / count as f64);
    let Some(first_below) = (0..=count).find(|&k| f(grid(k)) <= c) else {
        return Ok(None);
    };
    let (mut above, mut below) = if first_below > 0 {
        (grid(first_below - 1), grid(first_below))
    } else {
        let mut y = grid(0);
        loop {
            let next = y * 0.1;
            if next < 1e-300 {
                return Err(Error::Domain("lower bound f stays below c near the origin".into()));
            }
            if f(next) > c {
                break (next, y);
            }
            y = next;
        }
    };
    for _ in 0..200 {
        let mid = (above * below).sqrt();
        if !(mid > above && mid < below) {
            break;
        }
        if f(mid) > c {
            above = mid;
        } else {
            below = mid;
        }
    }
    let r1 = above;

    let big_m = (0..m).map(|i| cfg.weight(i) * g_unchecked(r1 / cfg.a(i), n).ln()).fold(f64::NEG_INFINITY, f64::max);
    let c1 = c + (m as f64 - 1.0) * big_m;
    let r2 = cfg.a(0) * inv_g((-c1 / cfg.weight(0)).exp(), n)?;

    let (delta, gap_bound) = if m >= 2 {
        let q = (1..m).map(|i| (-c1 / cfg.weight(i)).exp()).fold(f64::INFINITY, f64::min);
        let a_max = (1..m).map(|i| cfg.a(i)).fold(0.0, f64::max);
        let a_min = (1..m).map(|i| cfg.a(i)).fold(f64::INFINITY, f64::min);
        let alpha = r1 / a_max;
        let lipschitz = alpha.powi(1 - n as i32);
        (q / lipschitz * a_min, Some(GapBound { q, lipschitz }))
    } else {
        (f64::INFINITY, None)
    };

    let r0 = if p.extended() {
        let (_, e0) = min_lower_bound(p);
        Some(2.0 * ((c - e0).max(0.0) / p.d0).sqrt())
    } else {
        None
    };

    Ok(Some(CoercivityBoxRadial { level: c, r1, r2, delta, gap_bound, c1, r0 }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PhaseConfig;

    fn one_phase(a_k1: f64) -> RadialProblem {
        let cfg = PhaseConfig {
            temperatures: vec![0.0, 1.0],
            diffusivities: vec![1.0, 1.0],
            conductivities: vec![1.0, a_k1],
            latent_heats: vec![1.0],
        };
        RadialProblem::new(cfg, 3, 1.0, 0.0).unwrap()
    }

    #[test]
    fn front_vector_layout() {
        let v = FrontVectorRadial::from_model_order(&[3.0, 2.0, 1.0], Some(4.0)).unwrap();
        assert_eq!(v.as_ascending(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(v.m(), 3);
        assert_eq!(v.xi(0), 4.0);
        assert_eq!(v.xi(1), 3.0);
        assert_eq!(v.xi(3), 1.0);
        assert_eq!(v.model_order(), vec![3.0, 2.0, 1.0]);
        assert!(FrontVectorRadial::from_model_order(&[1.0, 2.0], None).is_err());
        assert!(FrontVectorRadial::from_model_order(&[1.0, -1.0], None).is_err());
    }

    #[test]
    fn m1_term_by_term() {
        let p = one_phase(0.7);
        let xi = FrontVectorRadial::from_model_order(&[1.3], None).unwrap();
        let direct = -g_unchecked(1.3, 3).ln() + 0.7 * g_unchecked(1.3, 3) + 1.3 * 1.3 / 4.0;
        assert!((energy_radial(&p, &xi).unwrap() - direct).abs() < 1e-14);
    }

    #[test]
    fn lower_bound_limits() {
        let p = one_phase(1.0);
        assert!(lower_bound_f(&p, 1e-8).unwrap() > 1e6);
        assert!(lower_bound_f(&p, 200.0).unwrap() > 1e3);
        assert!(lower_bound_f(&p, 0.0).is_err());
        let (y, v) = min_lower_bound(&p);
        for k in 1..200 {
            let t = 0.02 * k as f64;
            assert!(lower_bound_f(&p, t).unwrap() >= v - 1e-12, "y* = {y}");
        }
    }

    #[test]
    fn empty_box_below_minimum() {
        let p = one_phase(1.0);
        let (_, e0) = min_lower_bound(&p);
        assert!(coercivity_box_radial(&p, e0 - 1.0).unwrap().is_none());
        let b = coercivity_box_radial(&p, e0 + 1.0).unwrap().unwrap();
        assert!(b.r1 > 0.0 && b.r2 >= b.r1);
        assert_eq!(b.delta, f64::INFINITY);
        assert!(b.gap_bound.is_none());
    }

    #[test]
    fn small_source_is_not_convex() {
        let p = one_phase(1e-3);
        let found = (1..400).any(|k| {
            let xi = FrontVectorRadial::from_model_order(&[0.005 * k as f64], None).unwrap();
            hess_radial(&p, &xi).unwrap().diag[0] < 0.0
        });
        assert!(found);
    }
}
