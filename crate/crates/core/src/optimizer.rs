//! Minimization over the open ordered cone.
//!
//! Damped Newton with a Levenberg shift when the Hessian is not positive
//! definite, an Armijo backtracking line search, and a fraction-to-boundary
//! cap that keeps every ordering gap (and, in the radial case, the innermost
//! front) above a fixed fraction of its current value. A multi-start driver
//! runs the default start plus seeded random starts and reports how far the
//! converged points are from each other.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{RadialProblem, RiemannProblem1D};
use crate::potential_radial::{coercivity_box_radial, min_lower_bound};
use crate::tridiag::SymTridiagonal;
use crate::{potential_1d, potential_radial};

/// Iterates whose spread is within this bound count as one critical point.
pub const AGREEMENT_TOL: f64 = 1e-8;
/// Random starts come from the sub-level box this far above `E(default)`, so
/// that the box has interior even when the default start is already optimal.
pub const START_LEVEL_MARGIN: f64 = 1.0;
/// Largest relative energy increase tolerated for a full Newton step that
/// halves the gradient.
pub const NEWTON_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    /// Convergence threshold on `|∇E|_∞`.
    pub grad_tol: f64,
    /// Smallest accepted step `α |d|_∞`, relative to `|x|_∞`.
    pub step_tol: f64,
    pub max_iter: usize,
    /// Fraction of each slack that a step must leave untouched.
    pub tau: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    pub backtrack: f64,
    /// Number of starts, including the default one.
    pub starts: usize,
    pub seed: u64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            grad_tol: 1e-12,
            step_tol: 1e-14,
            max_iter: 200,
            tau: 0.01,
            armijo: 1e-4,
            backtrack: 0.5,
            starts: 16,
            seed: 0,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.grad_tol, self.step_tol, self.armijo];
        if positive.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Validation("solver tolerances must be positive".into()));
        }
        if !(self.tau > 0.0 && self.tau < 1.0) || !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::Validation("tau and the backtrack factor must lie in (0, 1)".into()));
        }
        if self.starts == 0 || self.max_iter == 0 {
            return Err(Error::Validation("starts and max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// A smooth potential on an open cone of strictly increasing vectors
/// (optionally with a positive first entry).
pub trait Objective {
    fn dim(&self) -> usize;
    /// Whether the first coordinate must stay positive.
    fn positive_floor(&self) -> bool;
    fn value(&self, x: &[f64]) -> Result<f64>;
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>>;
    fn hessian(&self, x: &[f64]) -> Result<SymTridiagonal>;
    fn default_guess(&self) -> Result<Vec<f64>>;
    /// `count` random starts at sub-level `level`; start `k` uses seed `seed + k`.
    fn random_guesses(&self, level: f64, seed: u64, count: usize) -> Result<Vec<Vec<f64>>>;
}

impl Objective for RiemannProblem1D {
    fn dim(&self) -> usize {
        self.m()
    }

    fn positive_floor(&self) -> bool {
        false
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        potential_1d::energy_slice(self, x)
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        potential_1d::grad_slice(self, x)
    }

    fn hessian(&self, x: &[f64]) -> Result<SymTridiagonal> {
        potential_1d::hess_slice(self, x)
    }

    /// `m` equispaced points on `[-a_max, a_max]` (the midpoint when `m = 1`).
    ///
    /// With strong diffusivity contrast the outer points can sit so deep in a
    /// tail of `F(ξ/a_i)` that a gap underflows; the interval is then halved
    /// until the energy is finite.
    fn default_guess(&self) -> Result<Vec<f64>> {
        let m = self.m();
        if m == 1 {
            return Ok(vec![0.0]);
        }
        let mut a = self.config.a_max();
        for _ in 0..200 {
            let x: Vec<f64> = (0..m).map(|i| -a + 2.0 * a * i as f64 / (m - 1) as f64).collect();
            if self.value(&x).is_ok() {
                return Ok(x);
            }
            a *= 0.5;
        }
        Err(Error::Infeasible("no feasible equispaced start".into()))
    }

    fn random_guesses(&self, level: f64, seed: u64, count: usize) -> Result<Vec<Vec<f64>>> {
        let bx = potential_1d::coercivity_box_1d(self, level)?;
        (0..count)
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
                sample_sorted(&mut rng, bx.r1, bx.r2, self.m(), |x| self.value(x).is_ok())
            })
            .collect()
    }
}

impl Objective for RadialProblem {
    fn dim(&self) -> usize {
        self.m() + self.extended() as usize
    }

    fn positive_floor(&self) -> bool {
        true
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        potential_radial::energy_slice(self, x)
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        potential_radial::grad_slice(self, x)
    }

    fn hessian(&self, x: &[f64]) -> Result<SymTridiagonal> {
        potential_radial::hess_slice(self, x)
    }

    /// `ξ_i = ρ 2^{m-i}` with `ρ` the minimizer of the lower bound `f`; in
    /// storage order `ρ, 2ρ, 4ρ, …`.
    fn default_guess(&self) -> Result<Vec<f64>> {
        let (rho, _) = min_lower_bound(self);
        Ok((0..self.dim()).map(|j| rho * 2f64.powi(j as i32)).collect())
    }

    fn random_guesses(&self, level: f64, seed: u64, count: usize) -> Result<Vec<Vec<f64>>> {
        let bx = coercivity_box_radial(self, level)?
            .ok_or_else(|| Error::Domain(format!("sub-level set at {level} is empty")))?;
        let m = self.m();
        (0..count)
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
                for _ in 0..1000 {
                    let mut x = sample_sorted(&mut rng, bx.r1, bx.r2, m, |_| true)?;
                    if let Some(r0) = bx.r0 {
                        let inner = x[m - 1];
                        let top = r0.max(1.5 * inner);
                        x.push(rng.gen_range(inner..top));
                    }
                    if potential_radial::check_cone(&x).is_ok() && self.value(&x).is_ok() {
                        return Ok(x);
                    }
                }
                Err(Error::Domain("could not draw a feasible radial start".into()))
            })
            .collect()
    }
}

fn sample_sorted(
    rng: &mut ChaCha8Rng,
    lo: f64,
    hi: f64,
    m: usize,
    accept: impl Fn(&[f64]) -> bool,
) -> Result<Vec<f64>> {
    if !(lo < hi) {
        return Err(Error::Domain(format!("empty sampling interval [{lo}, {hi}]")));
    }
    for _ in 0..1000 {
        let mut x: Vec<f64> = (0..m).map(|_| rng.gen_range(lo..hi)).collect();
        x.sort_by(f64::total_cmp);
        if x.windows(2).all(|w| w[0] < w[1]) && accept(&x) {
            return Ok(x);
        }
    }
    Err(Error::Domain("could not draw a feasible start".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuessStrategy {
    Default,
    /// Uniform in the coercivity box just above the level of the default guess.
    Random(u64),
}

/// Starting point for the solver; always strictly feasible.
pub fn initial_guess<O: Objective + ?Sized>(obj: &O, strategy: GuessStrategy) -> Result<Vec<f64>> {
    let x0 = obj.default_guess()?;
    match strategy {
        GuessStrategy::Default => Ok(x0),
        GuessStrategy::Random(seed) => {
            let level = obj.value(&x0)? + START_LEVEL_MARGIN;
            Ok(obj.random_guesses(level, seed, 1)?.remove(0))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// Gradient already below tolerance; no step taken.
    None,
    Newton,
    /// Newton on `H + λI`.
    Shifted,
    SteepestDescent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    pub direction: Direction,
    pub shift: f64,
    /// Accepted step length along the direction.
    pub alpha: f64,
    /// Largest step allowed by the fraction-to-boundary rule.
    pub alpha_max: f64,
    pub energy_before: f64,
    pub energy_after: f64,
    pub grad_norm_before: f64,
    pub grad_norm_after: f64,
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Largest `α <= 1` keeping every slack at least `tau` times its current value.
fn fraction_to_boundary(x: &[f64], d: &[f64], tau: f64, positive_floor: bool) -> f64 {
    let mut alpha: f64 = 1.0;
    let mut cap = |s: f64, ds: f64| {
        if ds < 0.0 {
            alpha = alpha.min((1.0 - tau) * s / -ds);
        }
    };
    if positive_floor {
        cap(x[0], d[0]);
    }
    for j in 0..x.len().saturating_sub(1) {
        cap(x[j + 1] - x[j], d[j + 1] - d[j]);
    }
    alpha
}

/// Search direction: Newton if the Hessian factors, else Newton on a shifted
/// Hessian (shift doubling from `1e-8 |H|` up to 40 times), else `-∇E`.
fn direction(h: &SymTridiagonal, g: &[f64]) -> (Vec<f64>, Direction, f64) {
    let neg: Vec<f64> = g.iter().map(|v| -v).collect();
    if let Some(ch) = h.cholesky() {
        return (ch.solve(&neg), Direction::Newton, 0.0);
    }
    let mut shift = 1e-8 * h.norm_inf().max(f64::MIN_POSITIVE);
    for _ in 0..40 {
        if let Some(ch) = h.shifted(shift).cholesky() {
            return (ch.solve(&neg), Direction::Shifted, shift);
        }
        shift *= 2.0;
    }
    (neg, Direction::SteepestDescent, 0.0)
}

/// One safeguarded step from a feasible point.
pub fn newton_step<O: Objective + ?Sized>(
    obj: &O,
    x: &[f64],
    settings: &SolverSettings,
) -> Result<(Vec<f64>, StepInfo)> {
    let e0 = obj.value(x)?;
    let g = obj.gradient(x)?;
    let gn = norm_inf(&g);
    let mut info = StepInfo {
        direction: Direction::None,
        shift: 0.0,
        alpha: 0.0,
        alpha_max: 0.0,
        energy_before: e0,
        energy_after: e0,
        grad_norm_before: gn,
        grad_norm_after: gn,
    };
    if gn <= settings.grad_tol {
        return Ok((x.to_vec(), info));
    }
    let h = obj.hessian(x)?;
    let (mut d, mut kind, shift) = direction(&h, &g);
    let mut slope = dot(&g, &d);
    if !(slope < 0.0) || d.iter().any(|v| !v.is_finite()) {
        d = g.iter().map(|v| -v).collect();
        kind = Direction::SteepestDescent;
        slope = -dot(&g, &g);
    }
    info.direction = kind;
    info.shift = shift;
    let alpha_max = fraction_to_boundary(x, &d, settings.tau, obj.positive_floor());
    info.alpha_max = alpha_max;
    let d_norm = norm_inf(&d);
    // Below this predicted decrease the energy difference is rounding noise.
    let noise = 8.0 * f64::EPSILON * e0.abs().max(1.0);
    // The logarithms of F and G carry rounding errors scaled by the phase
    // weights, which can exceed `noise` many times over. Near a minimizer a
    // full Newton step is then judged by the gradient, within this slack.
    let slack = NEWTON_SLACK * e0.abs().max(1.0);

    let min_step = settings.step_tol * norm_inf(x).max(f64::MIN_POSITIVE);
    // The first trial is always evaluated: a Newton step of a few ulps near
    // the solution is legitimate even when it is below the backtracking floor.
    let mut alpha = alpha_max;
    loop {
        let trial: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + alpha * di).collect();
        if let Ok(e1) = obj.value(&trial) {
            let predicted = settings.armijo * alpha * slope;
            let armijo_ok = e1 <= e0 + predicted && e1 < e0;
            let noise_ok = -predicted <= noise && e1 <= e0 + noise;
            let full_newton = kind == Direction::Newton && alpha == 1.0 && e1 <= e0 + slack;
            if armijo_ok || noise_ok || full_newton {
                let g1 = obj.gradient(&trial)?;
                let gn1 = norm_inf(&g1);
                if armijo_ok || (noise_ok && gn1 < gn) || (full_newton && gn1 <= 0.5 * gn) {
                    info.alpha = alpha;
                    info.energy_after = e1;
                    info.grad_norm_after = gn1;
                    return Ok((trial, info));
                }
            }
        }
        alpha *= settings.backtrack;
        if alpha * d_norm < min_step {
            break;
        }
    }
    Err(Error::LineSearch(format!(
        "no acceptable step along {kind:?} direction (|grad|_inf = {gn:e}, |d|_inf = {d_norm:e})"
    )))
}

/// Trace of a single-start solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub x: Vec<f64>,
    pub energy: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    /// Energy at every iterate, starting point included.
    pub energy_history: Vec<f64>,
    /// `|∇E|_∞` at every iterate, starting point included.
    pub grad_history: Vec<f64>,
    pub steps: Vec<StepInfo>,
}

/// Solves from one starting point.
pub fn minimize_from<O: Objective + ?Sized>(obj: &O, x0: &[f64], settings: &SolverSettings) -> Result<RunTrace> {
    settings.validate()?;
    if x0.len() != obj.dim() {
        return Err(Error::Infeasible(format!("start has {} entries, expected {}", x0.len(), obj.dim())));
    }
    let e0 = obj.value(x0)?;
    let g0 = norm_inf(&obj.gradient(x0)?);
    let mut trace = RunTrace {
        x: x0.to_vec(),
        energy: e0,
        grad_norm: g0,
        iterations: 0,
        energy_history: vec![e0],
        grad_history: vec![g0],
        steps: Vec::new(),
    };
    while trace.grad_norm > settings.grad_tol {
        if trace.iterations >= settings.max_iter {
            return Err(non_convergence(&trace));
        }
        let (next, info) = match newton_step(obj, &trace.x, settings) {
            Ok(step) => step,
            Err(Error::LineSearch(_)) => return Err(non_convergence(&trace)),
            Err(e) => return Err(e),
        };
        trace.iterations += 1;
        trace.x = next;
        trace.energy = info.energy_after;
        trace.grad_norm = info.grad_norm_after;
        trace.energy_history.push(info.energy_after);
        trace.grad_history.push(info.grad_norm_after);
        trace.steps.push(info);
    }
    Ok(trace)
}

fn non_convergence(trace: &RunTrace) -> Error {
    Error::NonConvergence {
        best: trace.x.clone(),
        energy: trace.energy,
        grad_norm: trace.grad_norm,
        iterations: trace.iterations,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    /// Best converged point, in the objective's storage order.
    pub minimizer: Vec<f64>,
    pub energy: f64,
    pub grad_norm: f64,
    /// Iterations of the run that produced `minimizer`.
    pub iterations: usize,
    pub hessian_psd_at_solution: bool,
    pub min_hessian_eigenvalue: f64,
    /// Every start converged and the spread is within [`AGREEMENT_TOL`].
    pub all_starts_agree: bool,
    /// Largest pairwise `∞`-distance among converged starts.
    pub spread: f64,
    pub starts: usize,
    pub failed_starts: usize,
    /// `|∇E|_∞` history of the run that produced `minimizer`.
    pub grad_history: Vec<f64>,
}

/// Multi-start minimization: the default start plus `starts - 1` random
/// starts in the coercivity box at level `E(default) + START_LEVEL_MARGIN`.
pub fn minimize<O: Objective + ?Sized>(obj: &O, settings: &SolverSettings) -> Result<SolveReport> {
    settings.validate()?;
    let x0 = obj.default_guess()?;
    let level = obj.value(&x0)? + START_LEVEL_MARGIN;
    let mut starts = vec![x0];
    if settings.starts > 1 {
        starts.extend(obj.random_guesses(level, settings.seed, settings.starts - 1)?);
    }
    let mut runs = Vec::with_capacity(starts.len());
    let mut failed = 0;
    let mut first_failure = None;
    for start in &starts {
        match minimize_from(obj, start, settings) {
            Ok(run) => runs.push(run),
            Err(e) => {
                failed += 1;
                first_failure.get_or_insert(e);
            }
        }
    }
    if runs.is_empty() {
        return Err(first_failure.expect("at least one start"));
    }
    let mut spread: f64 = 0.0;
    for (i, a) in runs.iter().enumerate() {
        for b in &runs[i + 1..] {
            let dist = a.x.iter().zip(&b.x).fold(0.0, |acc: f64, (p, q)| acc.max((p - q).abs()));
            spread = spread.max(dist);
        }
    }
    let best = runs.iter().min_by(|a, b| a.energy.total_cmp(&b.energy)).expect("non-empty runs");
    let h = obj.hessian(&best.x)?;
    let lambda_min = h.min_eigenvalue();
    let psd = lambda_min >= -1e-9 * h.norm_inf().max(1.0);
    Ok(SolveReport {
        minimizer: best.x.clone(),
        energy: best.energy,
        grad_norm: best.grad_norm,
        iterations: best.iterations,
        hessian_psd_at_solution: psd,
        min_hessian_eigenvalue: lambda_min,
        all_starts_agree: failed == 0 && spread <= AGREEMENT_TOL,
        spread,
        starts: starts.len(),
        failed_starts: failed,
        grad_history: best.grad_history.clone(),
    })
}
