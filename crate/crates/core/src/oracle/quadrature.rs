use std::f64::consts::PI;

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 30;
/// Initial uniform panels before adaptive refinement starts.
const PANELS: usize = 64;

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    // Stop at the tolerance, or once the correction is rounding noise.
    let noise = 32.0 * f64::EPSILON * (left.abs() + right.abs());
    if depth >= MAX_DEPTH || delta.abs() <= (15.0 * tol).max(noise) {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)
}

/// Adaptive Simpson quadrature with Richardson correction, started from
/// uniform panels so that narrow features are not skipped.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let h = (b - a) / PANELS as f64;
    let panel_tol = tol / PANELS as f64;
    let mut total = 0.0;
    for k in 0..PANELS {
        let lo = a + h * k as f64;
        let hi = if k + 1 == PANELS { b } else { lo + h };
        let (flo, fmid, fhi) = (f(lo), f(0.5 * (lo + hi)), f(hi));
        let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        total += simpson_rec(&f, lo, hi, flo, fmid, fhi, whole, panel_tol, 0);
    }
    total
}

/// `F(x)` by direct quadrature of `e^{-s²/4} / (2√π)`.
///
/// For `x <= 0` the substitution `s = x - r` gives
/// `F(x) = e^{-x²/4}/(2√π) ∫_0^R e^{-r(r - 2x)/4} dr`, whose integrand is
/// evaluated without cancellation in the exponent; `R = 40` drops a tail below
/// `(2/40) e^{-400}` of the kernel scale. For `x > 0` the known half mass `1/2`
/// is added to the integral over `[0, x]`.
pub fn quad_f(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("quad_F needs a finite argument, got {x}")));
    }
    let c = 0.5 / PI.sqrt();
    if x <= 0.0 {
        const R: f64 = 40.0;
        let tail_bound = (2.0 / R) * (-0.25 * R * R).exp();
        let scaled = adaptive_simpson(|r: f64| (-0.25 * r * (r - 2.0 * x)).exp(), 0.0, R, 1e-17);
        if tail_bound > 1e-16 * scaled {
            return Err(Error::TailBound(format!("tail beyond r = {R} bounded by {tail_bound:e}")));
        }
        Ok(c * (-0.25 * x * x).exp() * scaled)
    } else {
        Ok(0.5 + c * adaptive_simpson(|s: f64| (-0.25 * s * s).exp(), 0.0, x, 1e-17))
    }
}

/// `G(y) / e^{-y²/4}` for `y >= 1` as `∫_0^R (y+r)^{1-n} e^{-r(2y+r)/4} dr`.
///
/// `R` grows until the tail bound `∫_R^∞ <= (2/R) e^{-R²/4} y^{1-n}` falls
/// below `1e-15` times the result.
fn scaled_upper(y: f64, n: u32) -> Result<f64> {
    let p = 1 - n as i32;
    let integrand = |r: f64| (y + r).powi(p) * (-0.25 * r * (2.0 * y + r)).exp();
    let mut upper = 20.0;
    for _ in 0..10 {
        let coarse = adaptive_simpson(integrand, 0.0, upper, 1e-6 * y.powi(p));
        let value = adaptive_simpson(integrand, 0.0, upper, 1e-16 * coarse);
        let tail = (2.0 / upper) * (-0.25 * upper * upper).exp() * y.powi(p);
        if tail <= 1e-15 * value {
            return Ok(value);
        }
        upper += 10.0;
    }
    Err(Error::TailBound(format!("could not bound the tail of G({y}) for n = {n}")))
}

/// `G(y) = ∫_y^∞ s^{1-n} e^{-s²/4} ds` by direct quadrature.
///
/// Above `y = 1` the integral is taken in `r = s - y` with the factor
/// `e^{-y²/4}` pulled out (see [`scaled_upper`]). Below `y = 1` the piece
/// over `[y, 1]` is integrated in `τ = ln s`, where `s^{2-n} e^{-s²/4}` is
/// smooth even for small `y`, and `G(1)` is added.
pub fn quad_g(y: f64, n: u32) -> Result<f64> {
    if !(y > 0.0) || !y.is_finite() || n < 2 {
        return Err(Error::Domain(format!("quad_G needs finite y > 0 and n >= 2, got y = {y}, n = {n}")));
    }
    if y >= 1.0 {
        return Ok((-0.25 * y * y).exp() * scaled_upper(y, n)?);
    }
    let expo = 2 - n as i32;
    let integrand = |tau: f64| {
        let s = tau.exp();
        s.powi(expo) * (-0.25 * s * s).exp()
    };
    let a = y.ln();
    let coarse = adaptive_simpson(integrand, a, 0.0, 1e-6 * integrand(a));
    let inner = adaptive_simpson(integrand, a, 0.0, 1e-16 * coarse);
    Ok(inner + (-0.25f64).exp() * scaled_upper(1.0, n)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_polynomial_exact() {
        let v = adaptive_simpson(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-14);
        assert!((v - 0.0).abs() < 1e-13);
    }

    #[test]
    fn quad_f_half() {
        assert!((quad_f(0.0).unwrap() - 0.5).abs() < 1e-14);
        assert!(quad_f(f64::NAN).is_err());
    }

    #[test]
    fn quad_g_n3_closed_form() {
        // G(y) = e^{-y²/4}/y - √π (1 - F(y)) with 1 - F(y) = erfc(y/2)/2.
        let y: f64 = 1.0;
        let closed = (-0.25_f64).exp() / y - PI.sqrt() * 0.5 * 0.479_500_122_186_953_5;
        let q = quad_g(y, 3).unwrap();
        assert!((q / closed - 1.0).abs() < 1e-12, "{q} vs {closed}");
    }
}
