use anyhow::anyhow;
use serde::Serialize;
use stefan_core::{
    build_profile, build_profile_radial, minimize, Error, FrontVector1D, FrontVectorRadial, Objective, Problem,
    SelfSimilarProfile, SolverSettings,
};

use crate::manifest::RunManifest;
use crate::{CommonArgs, Exit};

pub fn objective(p: &Problem) -> &dyn Objective {
    match p {
        Problem::Riemann1D(p) => p,
        Problem::Radial(p) => p,
    }
}

pub fn settings(args: &CommonArgs) -> anyhow::Result<SolverSettings> {
    let mut s = SolverSettings::default();
    if let Some(seed) = args.seed {
        s.seed = seed;
    }
    if let Some(starts) = args.starts {
        s.starts = starts;
    }
    if let Some(tol) = args.grad_tol {
        s.grad_tol = tol;
    }
    s.validate()?;
    Ok(s)
}

/// Fronts in storage order with how they were obtained.
pub struct Outcome {
    pub fronts: Vec<f64>,
    pub energy: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub spread: Option<f64>,
    /// Set when the solver stopped without converging; `fronts` is its best point.
    pub failure: Option<Error>,
}

/// Storage order from model order: radial fronts are given as
/// `[xi_0,] xi_1 > ... > xi_m` and stored ascending with `xi_0` last.
fn storage_from_model(p: &Problem, given: &[f64]) -> Vec<f64> {
    match p {
        Problem::Riemann1D(_) => given.to_vec(),
        Problem::Radial(r) => {
            let (outer, inner) = if r.extended() { given.split_at(1) } else { given.split_at(0) };
            inner.iter().rev().chain(outer).copied().collect()
        }
    }
}

pub fn model_order(p: &Problem, storage: &[f64]) -> (Vec<f64>, Option<f64>) {
    match p {
        Problem::Riemann1D(_) => (storage.to_vec(), None),
        Problem::Radial(r) => {
            let m = r.m();
            (storage[..m].iter().rev().copied().collect(), storage.get(m).copied())
        }
    }
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub fn fronts_or_solve(p: &Problem, args: &CommonArgs, settings: &SolverSettings) -> Result<Outcome, Exit> {
    let obj = objective(p);
    if let Some(given) = &args.fronts {
        if given.len() != obj.dim() {
            return Err(anyhow!("--fronts needs {} values, got {}", obj.dim(), given.len()).into());
        }
        let fronts = storage_from_model(p, given);
        let energy = obj.value(&fronts).map_err(|e| anyhow!("--fronts: {e}"))?;
        let grad_norm = norm_inf(&obj.gradient(&fronts).map_err(|e| anyhow!("--fronts: {e}"))?);
        return Ok(Outcome { fronts, energy, grad_norm, iterations: 0, spread: None, failure: None });
    }
    match minimize(obj, settings) {
        Ok(r) => Ok(Outcome {
            fronts: r.minimizer,
            energy: r.energy,
            grad_norm: r.grad_norm,
            iterations: r.iterations,
            spread: Some(r.spread),
            failure: None,
        }),
        Err(Error::NonConvergence { best, energy, grad_norm, iterations }) => {
            let failure = Error::NonConvergence { best: best.clone(), energy, grad_norm, iterations };
            Ok(Outcome { fronts: best, energy, grad_norm, iterations, spread: None, failure: Some(failure) })
        }
        Err(e @ Error::LineSearch(_)) => Err(Exit::Solver(e)),
        Err(e) => Err(anyhow::Error::from(e).into()),
    }
}

pub fn profile(p: &Problem, storage: &[f64]) -> stefan_core::Result<SelfSimilarProfile> {
    Ok(match p {
        Problem::Riemann1D(q) => SelfSimilarProfile::OneD(build_profile(q, &FrontVector1D::new(storage.to_vec())?)?),
        Problem::Radial(q) => SelfSimilarProfile::Radial(build_profile_radial(
            q,
            &FrontVectorRadial::from_ascending(storage.to_vec(), q.extended())?,
        )?),
    })
}

/// Stefan residuals in model order, and the outer-front residual if present.
pub fn residuals(p: &Problem, storage: &[f64]) -> stefan_core::Result<(Vec<f64>, Option<f64>)> {
    let r = profile(p, storage)?.stefan_residual();
    Ok(model_order(p, &r))
}

#[derive(Debug, Serialize)]
pub struct SolveOutput {
    pub manifest: RunManifest,
    pub converged: bool,
    pub fronts: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outer_front: Option<f64>,
    pub energy: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub residuals: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outer_residual: Option<f64>,
    pub multistart_spread: Option<f64>,
}

impl SolveOutput {
    pub fn new(manifest: RunManifest, p: &Problem, o: &Outcome) -> anyhow::Result<Self> {
        let (fronts, outer_front) = model_order(p, &o.fronts);
        let (residuals, outer_residual) = residuals(p, &o.fronts)?;
        Ok(SolveOutput {
            manifest,
            converged: o.failure.is_none(),
            fronts,
            outer_front,
            energy: o.energy,
            grad_norm: o.grad_norm,
            iterations: o.iterations,
            residuals,
            outer_residual,
            multistart_spread: o.spread,
        })
    }
}
