//! Temperature profiles `v(ξ)` rebuilt from the fronts, space-time evaluation
//! `u(t, x) = v(x/√t)`, and the Stefan jump residuals.
//!
//! On each phase the profile is `v = C₁ K(ξ/a_i) + C₂` with `K = F` on the
//! line and `K = G` in the radial case. Residuals are assembled from one-sided
//! derivatives of these pieces, independently of the potential gradients.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{RadialProblem, RiemannProblem1D};
use crate::potential_1d::{check_increasing, FrontVector1D};
use crate::potential_radial::FrontVectorRadial;
use crate::special_fn::{en_unchecked, eval_f_prime, f_diff, g_diff, g_prime_unchecked, g_unchecked};

/// One phase `lo < ξ < hi` on which `v = u_lo + slope · (K(ξ/a) - K(lo/a))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub a: f64,
    pub k: f64,
    /// Temperature at `lo` (radial: at `hi`, the outer end).
    pub u_ref: f64,
    /// `C₁`: temperature rise per unit of `K`.
    pub c1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile1D {
    pub fronts: Vec<f64>,
    pub temperatures: Vec<f64>,
    pub latent_heats: Vec<f64>,
    pub pieces: Vec<Piece>,
}

pub fn build_profile(p: &RiemannProblem1D, fronts: &FrontVector1D) -> Result<Profile1D> {
    let xi = fronts.as_slice();
    let m = p.m();
    if xi.len() != m {
        return Err(Error::Infeasible(format!("expected {m} fronts, got {}", xi.len())));
    }
    check_increasing(xi)?;
    let cfg = &p.config;
    let mut pieces = Vec::with_capacity(m + 1);
    for i in 0..=m {
        let lo = if i == 0 { f64::NEG_INFINITY } else { xi[i - 1] };
        let hi = if i == m { f64::INFINITY } else { xi[i] };
        let a = cfg.a(i);
        let gap = f_diff(hi / a, lo / a);
        if !(gap > 0.0) {
            return Err(Error::Infeasible(format!("phase {i} has a vanishing F-gap")));
        }
        pieces.push(Piece { lo, hi, a, k: cfg.k(i), u_ref: cfg.u(i), c1: (cfg.u(i + 1) - cfg.u(i)) / gap });
    }
    Ok(Profile1D {
        fronts: xi.to_vec(),
        temperatures: cfg.temperatures.clone(),
        latent_heats: cfg.latent_heats.clone(),
        pieces,
    })
}

impl Profile1D {
    fn piece_at(&self, xi: f64) -> &Piece {
        let i = self.fronts.partition_point(|&f| f <= xi);
        &self.pieces[i]
    }

    pub fn m(&self) -> usize {
        self.fronts.len()
    }

    pub fn v(&self, xi: f64) -> f64 {
        let pc = self.piece_at(xi);
        if xi == f64::INFINITY {
            return pc.u_ref + pc.c1 * f_diff(f64::INFINITY, pc.lo / pc.a);
        }
        pc.u_ref + pc.c1 * f_diff(xi / pc.a, pc.lo / pc.a)
    }

    /// `v'(ξ)`; at a front, the derivative of the phase to the right.
    pub fn v_prime(&self, xi: f64) -> f64 {
        let pc = self.piece_at(xi);
        pc.c1 * eval_f_prime(xi / pc.a) / pc.a
    }

    /// One-sided derivatives `(v'(ξ_i-), v'(ξ_i+))` at front `i` (1-based).
    pub fn one_sided_derivatives(&self, i: usize) -> (f64, f64) {
        let xi = self.fronts[i - 1];
        let left = &self.pieces[i - 1];
        let right = &self.pieces[i];
        (left.c1 * eval_f_prime(xi / left.a) / left.a, right.c1 * eval_f_prime(xi / right.a) / right.a)
    }

    /// `d_i ξ_i/2 + k_i v'(ξ_i+) - k_{i-1} v'(ξ_i-)` for `i = 1..m`.
    pub fn stefan_residual(&self) -> Vec<f64> {
        (1..=self.m())
            .map(|i| {
                let (left, right) = self.one_sided_derivatives(i);
                0.5 * self.latent_heats[i - 1] * self.fronts[i - 1] + self.pieces[i].k * right
                    - self.pieces[i - 1].k * left
            })
            .collect()
    }

    pub fn eval_u(&self, t: f64, x: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("time must be positive, got {t}")));
        }
        Ok(self.v(x / t.sqrt()))
    }
}

/// Radial profile. Pieces are stored from the outermost phase inwards:
/// `pieces[i]` is phase `i` on `(ξ_{i+1}, ξ_i)` with `u_ref = u_i`; the
/// innermost phase `m` on `(0, ξ_m)` follows `v = u_m + A (G(ξ/a_m) - G(ξ_m/a_m))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRadial {
    pub n: u32,
    pub amplitude: f64,
    /// `ξ_1, …, ξ_m` (decreasing).
    pub fronts: Vec<f64>,
    /// Outer front `ξ_0` of the extended variant; `None` means `+∞`.
    pub outer_front: Option<f64>,
    pub temperatures: Vec<f64>,
    pub latent_heats: Vec<f64>,
    pub d0: f64,
    pub pieces: Vec<Piece>,
    pub inner_a: f64,
    pub inner_k: f64,
    /// `G(ξ_m/a_m)`.
    inner_offset: f64,
}

/// Arguments below this multiple of `a_m` use the `E_n` asymptote.
const SMALL_ARGUMENT: f64 = 1e-12;

pub fn build_profile_radial(p: &RadialProblem, fronts: &FrontVectorRadial) -> Result<ProfileRadial> {
    let m = p.m();
    if fronts.m() != m || fronts.extended() != p.extended() {
        return Err(Error::Infeasible("front vector does not match the problem".into()));
    }
    let cfg = &p.config;
    let n = p.n;
    let mut pieces = Vec::with_capacity(m);
    for i in 0..m {
        let a = cfg.a(i);
        let lo = fronts.xi(i + 1);
        let hi = fronts.xi(i);
        let gap = g_diff(lo / a, hi / a, n);
        if !(gap > 0.0) {
            return Err(Error::Infeasible(format!("phase {i} has a vanishing G-gap")));
        }
        pieces.push(Piece { lo, hi, a, k: cfg.k(i), u_ref: cfg.u(i), c1: (cfg.u(i + 1) - cfg.u(i)) / gap });
    }
    let inner_a = cfg.a(m);
    Ok(ProfileRadial {
        n,
        amplitude: p.amplitude,
        fronts: fronts.model_order(),
        outer_front: p.extended().then(|| fronts.xi(0)),
        temperatures: cfg.temperatures[..=m].to_vec(),
        latent_heats: cfg.latent_heats.clone(),
        d0: p.d0,
        pieces,
        inner_a,
        inner_k: cfg.k(m),
        inner_offset: g_unchecked(fronts.xi(m) / inner_a, n),
    })
}

impl ProfileRadial {
    pub fn m(&self) -> usize {
        self.fronts.len()
    }

    /// `ξ_i` for `i = 0..=m`.
    pub fn xi(&self, i: usize) -> f64 {
        if i == 0 {
            self.outer_front.unwrap_or(f64::INFINITY)
        } else {
            self.fronts[i - 1]
        }
    }

    /// Phase index at `ξ`: `i` with `ξ_{i+1} < ξ <= ξ_i`, `m` innermost, and
    /// `None` beyond a finite outer front.
    fn phase_at(&self, xi: f64) -> Option<usize> {
        if xi > self.xi(0) {
            return None;
        }
        Some(self.fronts.partition_point(|&f| f >= xi))
    }

    fn kernel(&self, y: f64) -> f64 {
        let floor = SMALL_ARGUMENT;
        if y < floor {
            en_unchecked(y, self.n) + (g_unchecked(floor, self.n) - en_unchecked(floor, self.n))
        } else {
            g_unchecked(y, self.n)
        }
    }

    pub fn v(&self, xi: f64) -> f64 {
        let m = self.m();
        match self.phase_at(xi) {
            None => self.temperatures[0],
            Some(i) if i == m => {
                let y = xi / self.inner_a;
                self.temperatures[m] + self.amplitude * (self.kernel(y) - self.inner_offset)
            }
            Some(i) => {
                let pc = &self.pieces[i];
                // v = u_i + Δu (G(ξ/a) - G(ξ_i/a)) / gap
                pc.u_ref + pc.c1 * g_diff(xi / pc.a, pc.hi / pc.a, self.n)
            }
        }
    }

    fn piece_derivative(&self, i: usize, xi: f64) -> f64 {
        if i == self.m() {
            self.amplitude * g_prime_unchecked(xi / self.inner_a, self.n) / self.inner_a
        } else {
            let pc = &self.pieces[i];
            pc.c1 * g_prime_unchecked(xi / pc.a, self.n) / pc.a
        }
    }

    pub fn v_prime(&self, xi: f64) -> f64 {
        match self.phase_at(xi) {
            None => 0.0,
            Some(i) => self.piece_derivative(i, xi),
        }
    }

    /// `(v'(ξ_i - 0), v'(ξ_i + 0))` at front `i` (`0` only with an outer front).
    pub fn one_sided_derivatives(&self, i: usize) -> (f64, f64) {
        let xi = self.xi(i);
        let inside = self.piece_derivative(i, xi);
        let outside = if i == 0 { 0.0 } else { self.piece_derivative(i - 1, xi) };
        (inside, outside)
    }

    /// `d_i ξ_i/2 + k_i v'(ξ_i - 0) - k_{i-1} v'(ξ_i + 0)`, in storage order
    /// (innermost front first, outer front last when present).
    pub fn stefan_residual(&self) -> Vec<f64> {
        let m = self.m();
        let k = |i: usize| if i == m { self.inner_k } else { self.pieces[i].k };
        let mut out: Vec<f64> = (1..=m)
            .rev()
            .map(|i| {
                let (inside, outside) = self.one_sided_derivatives(i);
                0.5 * self.latent_heats[i - 1] * self.xi(i) + k(i) * inside - k(i - 1) * outside
            })
            .collect();
        if self.outer_front.is_some() {
            let (inside, _) = self.one_sided_derivatives(0);
            out.push(0.5 * self.d0 * self.xi(0) + k(0) * inside);
        }
        out
    }

    /// `u(t, x)` at distance `r = |x| > 0` from the source.
    pub fn eval_u(&self, t: f64, r: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("time must be positive, got {t}")));
        }
        if !(r.abs() > 0.0) {
            return Err(Error::Domain("the radial field is singular at the origin".into()));
        }
        Ok(self.v(r.abs() / t.sqrt()))
    }

    /// Heat flux into the sphere `|x| = δ`, `-∮ ∇u·ν dσ`, which equals
    /// `A ω_n (a_m √t)^{n-2} e^{-δ²/(4 a_m² t)}` inside the innermost phase.
    pub fn flux_at_origin(&self, t: f64, delta: f64) -> Result<f64> {
        if !(t > 0.0) || !(delta > 0.0) {
            return Err(Error::Domain("flux needs t > 0 and delta > 0".into()));
        }
        let sqrt_t = t.sqrt();
        let xi = delta / sqrt_t;
        if xi >= self.xi(self.m()) {
            return Err(Error::Domain(format!(
                "delta/sqrt(t) = {xi} is outside the innermost phase (xi_m = {})",
                self.xi(self.m())
            )));
        }
        let omega = crate::special_fn::unit_sphere_area(self.n);
        let du_dr = self.v_prime(xi) / sqrt_t;
        Ok(-omega * delta.powi(self.n as i32 - 1) * du_dr)
    }

    /// Point-source strength `A ω_n (a_m √t)^{n-2}`, the `δ → 0` limit of
    /// [`Self::flux_at_origin`].
    pub fn source_strength(&self, t: f64) -> f64 {
        let omega = crate::special_fn::unit_sphere_area(self.n);
        self.amplitude * omega * (self.inner_a * t.sqrt()).powi(self.n as i32 - 2)
    }
}

/// Profile of either kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SelfSimilarProfile {
    OneD(Profile1D),
    Radial(ProfileRadial),
}

impl SelfSimilarProfile {
    pub fn v(&self, xi: f64) -> f64 {
        match self {
            SelfSimilarProfile::OneD(p) => p.v(xi),
            SelfSimilarProfile::Radial(p) => p.v(xi),
        }
    }

    pub fn eval_u(&self, t: f64, x: f64) -> Result<f64> {
        match self {
            SelfSimilarProfile::OneD(p) => p.eval_u(t, x),
            SelfSimilarProfile::Radial(p) => p.eval_u(t, x),
        }
    }

    pub fn stefan_residual(&self) -> Vec<f64> {
        match self {
            SelfSimilarProfile::OneD(p) => p.stefan_residual(),
            SelfSimilarProfile::Radial(p) => p.stefan_residual(),
        }
    }
}
