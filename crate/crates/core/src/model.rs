//! Problem instances and the enthalpy pair `(α, β)`.
//!
//! Temperatures are stored as `u_0 < u_1 < … < u_{m+1}`. In the radial
//! problem `u_{m+1}` is the `+∞` sentinel: the innermost phase is driven by the
//! source amplitude instead of a temperature difference.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_fn::unit_sphere_area;

/// Material data of an `m`-transition instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseConfig {
    /// `u_0, …, u_{m+1}`; the last entry is `+∞` for radial problems.
    pub temperatures: Vec<f64>,
    /// `a_0, …, a_m`.
    pub diffusivities: Vec<f64>,
    /// `k_0, …, k_m`.
    pub conductivities: Vec<f64>,
    /// `d_1, …, d_m`.
    pub latent_heats: Vec<f64>,
}

impl PhaseConfig {
    pub fn new(
        temperatures: Vec<f64>,
        diffusivities: Vec<f64>,
        conductivities: Vec<f64>,
        latent_heats: Vec<f64>,
    ) -> Result<Self> {
        PhaseConfig { temperatures, diffusivities, conductivities, latent_heats }.validate()
    }

    /// Checks every model invariant and returns the instance unchanged.
    pub fn validate(self) -> Result<Self> {
        let m = self.latent_heats.len();
        if m == 0 {
            return Err(Error::Validation("at least one phase transition is required".into()));
        }
        if self.temperatures.len() != m + 2 {
            return Err(Error::Validation(format!(
                "expected {} temperatures for {m} transitions, got {}",
                m + 2,
                self.temperatures.len()
            )));
        }
        if self.diffusivities.len() != m + 1 || self.conductivities.len() != m + 1 {
            return Err(Error::Validation(format!(
                "expected {} diffusivities and conductivities, got {} and {}",
                m + 1,
                self.diffusivities.len(),
                self.conductivities.len()
            )));
        }
        let u = &self.temperatures;
        if u[..=m].iter().any(|v| !v.is_finite()) || u[m + 1].is_nan() {
            return Err(Error::Validation("temperatures must be finite".into()));
        }
        if u.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Validation("temperatures not strictly increasing".into()));
        }
        if self.diffusivities.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(Error::Validation("diffusivity must be positive".into()));
        }
        if self.conductivities.iter().any(|k| !(*k > 0.0 && k.is_finite())) {
            return Err(Error::Validation("conductivity must be positive".into()));
        }
        if self.latent_heats.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
            return Err(Error::Validation("latent heat negative".into()));
        }
        Ok(self)
    }

    /// Number of phase transitions.
    pub fn m(&self) -> usize {
        self.latent_heats.len()
    }

    pub fn u(&self, i: usize) -> f64 {
        self.temperatures[i]
    }

    pub fn a(&self, i: usize) -> f64 {
        self.diffusivities[i]
    }

    pub fn k(&self, i: usize) -> f64 {
        self.conductivities[i]
    }

    /// Latent heat `d_i` for `i = 1..=m`.
    pub fn d(&self, i: usize) -> f64 {
        self.latent_heats[i - 1]
    }

    /// `k_i (u_{i+1} - u_i)`.
    pub fn weight(&self, i: usize) -> f64 {
        self.k(i) * (self.u(i + 1) - self.u(i))
    }

    pub fn a_max(&self) -> f64 {
        self.diffusivities.iter().cloned().fold(0.0, f64::max)
    }

    pub fn a_min(&self) -> f64 {
        self.diffusivities.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Riemann problem on the line: `u = u_-` for `x < 0`, `u = u_+` for `x > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannProblem1D {
    pub config: PhaseConfig,
}

impl RiemannProblem1D {
    pub fn new(config: PhaseConfig) -> Result<Self> {
        let config = config.validate()?;
        if !config.temperatures[config.m() + 1].is_finite() {
            return Err(Error::Validation("u_plus must be finite on the line".into()));
        }
        Ok(RiemannProblem1D { config })
    }

    pub fn u_minus(&self) -> f64 {
        self.config.u(0)
    }

    pub fn u_plus(&self) -> f64 {
        self.config.u(self.config.m() + 1)
    }

    pub fn m(&self) -> usize {
        self.config.m()
    }
}

/// Radial problem in `R^n` with a point heat source of amplitude `A` at the
/// origin and constant initial temperature `u_0`.
///
/// A positive `d0` turns on the extended-front variant: `u_0` is itself a
/// transition temperature and an extra outer front `ξ_0` appears.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProblem {
    pub config: PhaseConfig,
    pub n: u32,
    pub amplitude: f64,
    pub d0: f64,
}

impl RadialProblem {
    /// `temperatures` in `config` may list either `u_0..=u_m` followed by
    /// `+∞`, or just `u_0..=u_m`; the sentinel is appended if missing.
    pub fn new(mut config: PhaseConfig, n: u32, amplitude: f64, d0: f64) -> Result<Self> {
        if config.temperatures.len() == config.latent_heats.len() + 1 {
            config.temperatures.push(f64::INFINITY);
        }
        let config = config.validate()?;
        if config.temperatures[config.m() + 1] != f64::INFINITY {
            return Err(Error::Validation("radial problems take u_{m+1} = +inf".into()));
        }
        if n < 2 {
            return Err(Error::Validation(format!("dimension must be at least 2, got {n}")));
        }
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(Error::Validation("source amplitude must be positive".into()));
        }
        if !(d0 >= 0.0 && d0.is_finite()) {
            return Err(Error::Validation("latent heat negative".into()));
        }
        Ok(RadialProblem { config, n, amplitude, d0 })
    }

    pub fn m(&self) -> usize {
        self.config.m()
    }

    pub fn extended(&self) -> bool {
        self.d0 > 0.0
    }

    /// Surface area of the unit sphere in `R^n`.
    pub fn omega_n(&self) -> f64 {
        unit_sphere_area(self.n)
    }
}

/// Piecewise-linear flux potential `α` and enthalpy `β` of the degenerate
/// diffusion form `β(u)_t = Δα(u)`.
///
/// Slopes are `α' = k_i`, `β' = k_i / a_i²` on `(u_i, u_{i+1})`; `α` is
/// continuous and `β` jumps by `d_i` at `u_i`. Both are anchored at
/// `α(u_0+) = β(u_0+) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnthalpyPair {
    breakpoints: Vec<f64>,
    alpha_slopes: Vec<f64>,
    beta_slopes: Vec<f64>,
    /// `α(u_i)`, `i = 0..=m`.
    alpha_at: Vec<f64>,
    /// `β(u_i-)` and `β(u_i+)`, `i = 0..=m`.
    beta_minus: Vec<f64>,
    beta_plus: Vec<f64>,
    below_floor: Floor,
}

/// What `invert_beta` does below `β(u_0+)`.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Floor {
    /// Continue the first linear piece (the line: `u_0` is not a transition).
    Extend,
    /// Range error (radial problem without extended front).
    Reject,
    /// `u_0` is a transition with latent heat `d_0`; `u_0` below the plateau
    /// is not part of the model.
    Plateau,
}

impl EnthalpyPair {
    fn from_parts(config: &PhaseConfig, d0: f64, below_floor: Floor) -> Self {
        let m = config.m();
        let breakpoints: Vec<f64> = config.temperatures[..=m].to_vec();
        let alpha_slopes = config.conductivities.clone();
        let beta_slopes: Vec<f64> = (0..=m).map(|i| config.k(i) / (config.a(i) * config.a(i))).collect();
        let mut alpha_at = vec![0.0; m + 1];
        let mut beta_minus = vec![0.0; m + 1];
        let mut beta_plus = vec![0.0; m + 1];
        beta_minus[0] = -d0;
        for i in 1..=m {
            let du = breakpoints[i] - breakpoints[i - 1];
            alpha_at[i] = alpha_at[i - 1] + alpha_slopes[i - 1] * du;
            beta_minus[i] = beta_plus[i - 1] + beta_slopes[i - 1] * du;
            beta_plus[i] = beta_minus[i] + config.d(i);
        }
        EnthalpyPair { breakpoints, alpha_slopes, beta_slopes, alpha_at, beta_minus, beta_plus, below_floor }
    }

    /// Temperature phase index: `i` with `u_i <= u < u_{i+1}`.
    fn phase_of(&self, u: f64) -> usize {
        self.breakpoints.iter().rposition(|&b| b <= u).unwrap_or(0)
    }

    pub fn alpha(&self, u: f64) -> f64 {
        let i = self.phase_of(u);
        self.alpha_at[i] + self.alpha_slopes[i] * (u - self.breakpoints[i])
    }

    /// `β(u)`; at a breakpoint this is the right limit `β(u_i+)`.
    pub fn beta(&self, u: f64) -> f64 {
        let i = self.phase_of(u);
        self.beta_plus[i] + self.beta_slopes[i] * (u - self.breakpoints[i])
    }

    /// `β(u_i-)` for `i = 0..=m` (`β(u_0-) = -d_0`).
    pub fn beta_left(&self, i: usize) -> f64 {
        self.beta_minus[i]
    }

    /// `β(u_i+)` for `i = 0..=m`.
    pub fn beta_right(&self, i: usize) -> f64 {
        self.beta_plus[i]
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn max_ratio_bound(&self) -> f64 {
        self.alpha_slopes.iter().zip(&self.beta_slopes).map(|(a, b)| a / b).fold(0.0, f64::max)
    }

    /// Temperature with enthalpy `w`. Inside a jump `[β(u_i-), β(u_i+)]` the
    /// temperature is pinned at `u_i`.
    pub fn invert_beta(&self, w: f64) -> Result<f64> {
        if w.is_nan() {
            return Err(Error::Domain("enthalpy is NaN".into()));
        }
        if w < self.beta_plus[0] {
            return match self.below_floor {
                Floor::Extend => Ok(self.breakpoints[0] + (w - self.beta_plus[0]) / self.beta_slopes[0]),
                Floor::Plateau if w >= self.beta_minus[0] => Ok(self.breakpoints[0]),
                _ => Err(Error::Domain(format!("enthalpy {w} below beta(u_0+) = {}", self.beta_plus[0]))),
            };
        }
        // Last i with β(u_i-) <= w.
        let i = self.beta_minus.iter().rposition(|&b| b <= w).unwrap_or(0);
        if i > 0 && w <= self.beta_plus[i] {
            return Ok(self.breakpoints[i]);
        }
        Ok(self.breakpoints[i] + (w - self.beta_plus[i]) / self.beta_slopes[i])
    }
}

/// Builds `(α, β)` for a one-dimensional instance.
pub fn build_enthalpy_pair(problem: &RiemannProblem1D) -> EnthalpyPair {
    EnthalpyPair::from_parts(&problem.config, 0.0, Floor::Extend)
}

/// Builds `(α, β)` for a radial instance; with a positive `d0` the pair gets
/// the extra plateau `β(u_0) = β(u_0+) - d_0`.
pub fn build_enthalpy_pair_radial(problem: &RadialProblem) -> EnthalpyPair {
    let floor = if problem.extended() { Floor::Plateau } else { Floor::Reject };
    EnthalpyPair::from_parts(&problem.config, problem.d0, floor)
}

/// Serialized problem instance, as read by the command-line tool.
///
/// Radial instances list `u_0..=u_m` (the `+∞` top temperature is implied).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub kind: ProblemKind,
    pub temperatures: Vec<f64>,
    pub diffusivities: Vec<f64>,
    pub conductivities: Vec<f64>,
    pub latent_heats: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d0: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProblemKind {
    #[serde(rename = "riemann1d")]
    Riemann1D,
    #[serde(rename = "radial")]
    Radial,
}

/// A validated instance of either kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    Riemann1D(RiemannProblem1D),
    Radial(RadialProblem),
}

impl ProblemFile {
    pub fn into_problem(self) -> Result<Problem> {
        let config = PhaseConfig {
            temperatures: self.temperatures,
            diffusivities: self.diffusivities,
            conductivities: self.conductivities,
            latent_heats: self.latent_heats,
        };
        match self.kind {
            ProblemKind::Riemann1D => {
                if self.dimension.is_some() || self.amplitude.is_some() || self.d0.is_some() {
                    return Err(Error::Validation("dimension, amplitude and d0 apply to radial problems only".into()));
                }
                Ok(Problem::Riemann1D(RiemannProblem1D::new(config)?))
            }
            ProblemKind::Radial => {
                let n = self.dimension.ok_or_else(|| Error::Validation("radial problem needs \"dimension\"".into()))?;
                let amplitude =
                    self.amplitude.ok_or_else(|| Error::Validation("radial problem needs \"amplitude\"".into()))?;
                if config.temperatures.len() != config.latent_heats.len() + 1 {
                    return Err(Error::Validation(format!(
                        "radial problem expects {} temperatures (u_0..u_m), got {}",
                        config.latent_heats.len() + 1,
                        config.temperatures.len()
                    )));
                }
                Ok(Problem::Radial(RadialProblem::new(config, n, amplitude, self.d0.unwrap_or(0.0))?))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simple() -> PhaseConfig {
        PhaseConfig::new(vec![-1.0, 0.0, 1.0], vec![1.0, 1.0], vec![1.0, 1.0], vec![0.0]).unwrap()
    }

    #[test]
    fn accepts_valid_and_is_idempotent() {
        let c = simple();
        assert_eq!(c.clone().validate().unwrap(), c);
    }

    #[test]
    fn rejects_bad_instances() {
        let e = PhaseConfig::new(vec![0.0, 0.0, 1.0], vec![1.0, 1.0], vec![1.0, 1.0], vec![0.0]).unwrap_err();
        assert!(e.to_string().contains("temperatures not strictly increasing"));
        let e = PhaseConfig::new(vec![-1.0, 0.0, 1.0], vec![1.0, 1.0], vec![1.0, 1.0], vec![-0.5]).unwrap_err();
        assert!(e.to_string().contains("latent heat negative"));
        let e = PhaseConfig::new(vec![-1.0, 0.0, 1.0], vec![0.0, 1.0], vec![1.0, 1.0], vec![0.0]).unwrap_err();
        assert!(e.to_string().contains("diffusivity"));
        let e = PhaseConfig::new(vec![-1.0, 0.0, 1.0], vec![1.0, 1.0], vec![1.0, -2.0], vec![0.0]).unwrap_err();
        assert!(e.to_string().contains("conductivity"));
        assert!(PhaseConfig::new(vec![-1.0, 1.0], vec![1.0], vec![1.0], vec![]).is_err());
    }

    #[test]
    fn radial_sentinel_and_sphere() {
        let c = PhaseConfig {
            temperatures: vec![0.0, 1.0],
            diffusivities: vec![1.0, 2.0],
            conductivities: vec![1.0, 1.0],
            latent_heats: vec![1.0],
        };
        let p = RadialProblem::new(c, 3, 1.0, 0.0).unwrap();
        assert_eq!(p.config.u(2), f64::INFINITY);
        assert!((p.omega_n() - 4.0 * std::f64::consts::PI).abs() < 1e-15);
        assert!(RadialProblem::new(p.config.clone(), 3, 0.0, 0.0).is_err());
        assert!(RadialProblem::new(p.config.clone(), 1, 1.0, 0.0).is_err());
        assert!(RiemannProblem1D::new(p.config.clone()).is_err());
    }

    #[test]
    fn enthalpy_single_piece_and_jump() {
        let p = RiemannProblem1D::new(
            PhaseConfig::new(vec![0.0, 1.0, 2.0], vec![1.0, 1.0], vec![1.0, 2.0], vec![3.0]).unwrap(),
        )
        .unwrap();
        let pair = build_enthalpy_pair(&p);
        assert_eq!(pair.alpha(0.5), 0.5);
        assert_eq!(pair.beta(0.5), 0.5);
        assert_eq!(pair.beta_right(1) - pair.beta_left(1), 3.0);
        let eps = 1e-12;
        assert!((pair.alpha(1.0 + eps) - pair.alpha(1.0 - eps)).abs() < 1e-11);
        // Plateau midpoint maps to the transition temperature.
        let w = pair.beta_left(1) + 1.5;
        assert_eq!(pair.invert_beta(w).unwrap(), 1.0);
        for &u in &[0.25, 0.75, 1.2, 1.9] {
            assert!((pair.invert_beta(pair.beta(u)).unwrap() - u).abs() < 1e-14);
        }
    }

    #[test]
    fn radial_floor_behaviour() {
        let c = PhaseConfig {
            temperatures: vec![0.0, 1.0],
            diffusivities: vec![1.0, 2.0],
            conductivities: vec![1.0, 1.0],
            latent_heats: vec![1.0],
        };
        let plain = RadialProblem::new(c.clone(), 2, 1.0, 0.0).unwrap();
        assert!(build_enthalpy_pair_radial(&plain).invert_beta(-0.1).is_err());
        let ext = RadialProblem::new(c, 2, 1.0, 1.0).unwrap();
        let pair = build_enthalpy_pair_radial(&ext);
        assert_eq!(pair.invert_beta(-0.5).unwrap(), 0.0);
        assert!(pair.invert_beta(-1.5).is_err());
    }

    #[test]
    fn problem_file_parses() {
        let text = r#"{"kind": "radial", "temperatures": [0, 1, 2], "diffusivities": [1, 1, 1],
            "conductivities": [1, 1, 1], "latent_heats": [1, 1], "dimension": 3, "amplitude": 2.0}"#;
        let file: ProblemFile = serde_json::from_str(text).unwrap();
        match file.into_problem().unwrap() {
            Problem::Radial(p) => {
                assert_eq!(p.m(), 2);
                assert_eq!(p.n, 3);
                assert!(!p.extended());
            }
            _ => panic!("wrong kind"),
        }
        let bad = r#"{"kind": "riemann1d", "temperatures": [0, 1, 2], "diffusivities": [1, 1],
            "conductivities": [1, 1], "latent_heats": [1], "amplitude": 2.0}"#;
        let file: ProblemFile = serde_json::from_str(bad).unwrap();
        assert!(file.into_problem().is_err());
    }
}
