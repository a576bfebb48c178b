use crate::error::{Error, Result};
use crate::model::{Problem, RadialProblem, RiemannProblem1D};
use crate::special_fn::{eval_f, eval_f_prime, eval_g, eval_g_prime};

const WIDTH: f64 = 1e-12;

/// `F'(x)/F(x)`, switching to the tail asymptote `-x/2 - 1/x` where both underflow.
fn mills_lower(x: f64) -> f64 {
    let fx = eval_f(x);
    if fx > 1e-250 {
        eval_f_prime(x) / fx
    } else {
        -0.5 * x - 1.0 / x
    }
}

/// `-G'(y)/G(y)`, switching to `y/2 + (n-1)/y` where `G` underflows.
fn kernel_ratio(y: f64, n: u32) -> Result<f64> {
    let g = eval_g(y, n)?;
    if g > 1e-250 {
        Ok(-eval_g_prime(y, n)? / g)
    } else {
        Ok(0.5 * y + (n as f64 - 1.0) / y)
    }
}

/// Stefan condition for a single front on the line:
/// `d ξ/2 + k_1 (u_2 - u_1) F'(ξ/a_1)/(a_1 (1 - F(ξ/a_1))) - k_0 (u_1 - u_0) F'(ξ/a_0)/(a_0 F(ξ/a_0))`.
pub fn scalar_residual_1d(p: &RiemannProblem1D, xi: f64) -> f64 {
    let c = &p.config;
    let (a0, a1) = (c.a(0), c.a(1));
    let right = c.k(1) * (c.u(2) - c.u(1)) / a1 * mills_lower(-xi / a1);
    let left = c.k(0) * (c.u(1) - c.u(0)) / a0 * mills_lower(xi / a0);
    0.5 * c.d(1) * xi + right - left
}

/// Stefan condition for a single radial front:
/// `d ξ/2 + k_1 (A/a_1) G'(ξ/a_1) - k_0 (u_1 - u_0) G'(ξ/a_0)/(a_0 G(ξ/a_0))`.
pub fn scalar_residual_radial(p: &RadialProblem, xi: f64) -> Result<f64> {
    let c = &p.config;
    let (a0, a1) = (c.a(0), c.a(1));
    let source = c.k(1) * p.amplitude / a1 * eval_g_prime(xi / a1, p.n)?;
    let outer = c.k(0) * (c.u(1) - c.u(0)) / a0 * kernel_ratio(xi / a0, p.n)?;
    Ok(0.5 * c.d(1) * xi + source + outer)
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoSignChange(format!("residual {flo:e} at {lo} and {fhi:e} at {hi}")));
    }
    let lo_negative = flo < 0.0;
    while hi - lo > WIDTH {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn require_single_front(m: usize) -> Result<()> {
    if m != 1 {
        return Err(Error::Validation(format!("scalar bisection needs m = 1, got m = {m}")));
    }
    Ok(())
}

/// Root of the single-front condition on `[-10 a_max, 10 a_max]`.
pub fn bisect_scalar_1d(p: &RiemannProblem1D) -> Result<f64> {
    require_single_front(p.m())?;
    let a = p.config.a_max();
    bisect(-10.0 * a, 10.0 * a, |x| Ok(scalar_residual_1d(p, x)))
}

/// Root of the single-front radial condition on `[1e-6 a_min, 50 a_max]`.
pub fn bisect_scalar_radial(p: &RadialProblem) -> Result<f64> {
    require_single_front(p.m())?;
    if p.extended() {
        return Err(Error::Validation("scalar bisection does not cover the extended front".into()));
    }
    bisect(1e-6 * p.config.a_min(), 50.0 * p.config.a_max(), |x| scalar_residual_radial(p, x))
}

pub fn bisect_scalar(p: &Problem) -> Result<f64> {
    match p {
        Problem::Riemann1D(p) => bisect_scalar_1d(p),
        Problem::Radial(p) => bisect_scalar_radial(p),
    }
}
