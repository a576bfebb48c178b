use std::collections::BTreeMap;

use anyhow::{bail, Result};
use serde::Serialize;
use stefan_core::oracle::{bisect_scalar, quad_f, quad_g, simulate_enthalpy_1d, FdGrid1D};
use stefan_core::special_fn::{eval_f, eval_g};
use stefan_core::{Problem, SelfSimilarProfile};

use crate::manifest::RunManifest;
use crate::solve::{model_order, objective, profile, residuals};

pub const RESIDUAL_TOL: f64 = 1e-10;
pub const GRADIENT_FD_TOL: f64 = 1e-7;
pub const BISECTION_TOL: f64 = 1e-10;
pub const F_QUADRATURE_TOL: f64 = 1e-13;
pub const G_QUADRATURE_TOL: f64 = 1e-12;
/// Relative front error of the enthalpy simulation, measured against
/// `max(|xi|, a_min)` so that a front at the origin is not held to zero.
pub const ENTHALPY_TOL: f64 = 0.02;
pub const ENTHALPY_CELLS: usize = 2000;
pub const FLUX_TOL: f64 = 1e-6;

pub struct Options {
    pub fd_check: bool,
    pub oracle: bool,
    pub flux: bool,
    pub time: f64,
    pub grad_tol: f64,
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub error: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<&'static str, f64>,
}

impl Check {
    fn new(name: &'static str, error: f64, tolerance: f64) -> Self {
        Check { name, passed: error <= tolerance, error, tolerance, values: BTreeMap::new() }
    }

    fn with(mut self, key: &'static str, value: f64) -> Self {
        self.values.insert(key, value);
        self
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub manifest: RunManifest,
    pub fronts: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outer_front: Option<f64>,
    pub checks: Vec<Check>,
    pub all_passed: bool,
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Central differences with steps well inside the feasible cone.
fn gradient_fd_error(p: &Problem, x: &[f64]) -> stefan_core::Result<f64> {
    let obj = objective(p);
    let g = obj.gradient(x)?;
    let mut fd = vec![0.0; x.len()];
    for i in 0..x.len() {
        let mut room = 1.0 + x[i].abs();
        if i > 0 {
            room = room.min(x[i] - x[i - 1]);
        } else if obj.positive_floor() {
            room = room.min(x[i]);
        }
        if i + 1 < x.len() {
            room = room.min(x[i + 1] - x[i]);
        }
        let h = 1e-5 * room;
        let mut y = x.to_vec();
        y[i] = x[i] + h;
        let up = obj.value(&y)?;
        y[i] = x[i] - h;
        let down = obj.value(&y)?;
        fd[i] = (up - down) / (2.0 * h);
    }
    let diff: Vec<f64> = g.iter().zip(&fd).map(|(a, b)| a - b).collect();
    Ok(norm_inf(&diff) / norm_inf(&g).max(1.0))
}

/// Largest disagreement of `F` and `G` with quadrature at the scaled fronts.
fn special_fn_checks(p: &Problem, storage: &[f64]) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    match p {
        Problem::Riemann1D(q) => {
            let mut worst: f64 = 0.0;
            for (i, xi) in storage.iter().enumerate() {
                for a in [q.config.a(i), q.config.a(i + 1)] {
                    worst = worst.max((eval_f(xi / a) - quad_f(xi / a)?).abs());
                }
            }
            checks.push(Check::new("f_quadrature", worst, F_QUADRATURE_TOL));
        }
        Problem::Radial(q) => {
            let (fronts, outer) = model_order(p, storage);
            let mut worst: f64 = 0.0;
            let all = outer.iter().map(|x0| (0, *x0)).chain(fronts.iter().enumerate().map(|(k, x)| (k + 1, *x)));
            for (i, xi) in all {
                let phases = if i == 0 { vec![0] } else { vec![i - 1, i] };
                for j in phases {
                    let y = xi / q.config.a(j);
                    let exact = quad_g(y, q.n)?;
                    worst = worst.max((eval_g(y, q.n)? / exact - 1.0).abs());
                }
            }
            checks.push(Check::new("g_quadrature", worst, G_QUADRATURE_TOL));
        }
    }
    Ok(checks)
}

pub fn verify(manifest: RunManifest, p: &Problem, storage: &[f64], opts: &Options) -> Result<Report> {
    if opts.fd_check && !matches!(p, Problem::Riemann1D(_)) {
        bail!("--fd-check applies to problems on the line only");
    }
    if opts.flux && !matches!(p, Problem::Radial(_)) {
        bail!("--flux applies to radial problems only");
    }
    if !(opts.time > 0.0 && opts.time.is_finite()) {
        bail!("--time must be positive, got {}", opts.time);
    }
    let obj = objective(p);
    let mut checks = Vec::new();

    let (res, outer_res) = residuals(p, storage)?;
    let worst = norm_inf(&res).max(outer_res.map_or(0.0, f64::abs));
    checks.push(Check::new("stefan_residual", worst, RESIDUAL_TOL));
    let grad = norm_inf(&obj.gradient(storage)?);
    checks.push(Check::new("stationarity", grad, opts.grad_tol));
    checks.push(Check::new("gradient_fd", gradient_fd_error(p, storage)?, GRADIENT_FD_TOL));

    if opts.oracle {
        let single = match p {
            Problem::Riemann1D(q) => q.m() == 1,
            Problem::Radial(q) => q.m() == 1 && !q.extended(),
        };
        if single {
            let root = bisect_scalar(p)?;
            checks.push(Check::new("bisection", (root - storage[0]).abs(), BISECTION_TOL).with("root", root));
        }
        checks.extend(special_fn_checks(p, storage)?);
    }

    if opts.fd_check {
        if let Problem::Riemann1D(q) = p {
            let grid = FdGrid1D::for_problem(q, ENTHALPY_CELLS, 1.0)?;
            let check = match simulate_enthalpy_1d(q, &grid) {
                Ok(trace) => {
                    let a_min = q.config.a_min();
                    let err = storage
                        .iter()
                        .zip(&trace.xi_hat)
                        .map(|(x, h)| (x - h).abs() / x.abs().max(a_min))
                        .fold(0.0, f64::max);
                    Check::new("enthalpy_fd", err, ENTHALPY_TOL)
                        .with("cells", ENTHALPY_CELLS as f64)
                        .with("conservation_defect", trace.conservation_defect)
                }
                Err(_) => Check::new("enthalpy_fd", f64::INFINITY, ENTHALPY_TOL),
            };
            checks.push(check);
        }
    }

    if opts.flux {
        if let SelfSimilarProfile::Radial(prof) = profile(p, storage)? {
            let t = opts.time;
            let a = prof.inner_a;
            let delta = prof.xi(prof.m()) * t.sqrt() / 10.0;
            let flux = prof.flux_at_origin(t, delta)?;
            let limit = prof.source_strength(t);
            let expected_ratio = (-delta * delta / (4.0 * a * a * t)).exp();
            let ratio = flux / limit;
            checks.push(
                Check::new("flux", (ratio / expected_ratio - 1.0).abs(), FLUX_TOL)
                    .with("time", t)
                    .with("delta", delta)
                    .with("flux", flux)
                    .with("source_strength", limit)
                    .with("ratio", ratio)
                    .with("expected_ratio", expected_ratio),
            );
        }
    }

    let (fronts, outer_front) = model_order(p, storage);
    let all_passed = checks.iter().all(|c| c.passed);
    Ok(Report { manifest, fronts, outer_front, checks, all_passed })
}
