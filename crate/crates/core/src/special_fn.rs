//! Special functions behind every self-similar profile.
//!
//! * `F(x) = 1/(2√π) ∫_{-∞}^x e^{-s²/4} ds`, the scaled Gaussian CDF used by the
//!   one-dimensional problem, with the conventions `F(-∞) = 0`, `F(+∞) = 1`.
//! * `G(y) = ∫_y^∞ s^{1-n} e^{-s²/4} ds`, the radial kernel in dimension `n ≥ 2`.
//! * `E_n(y)`, the small-`y` asymptote of `G` (the Laplace fundamental solution
//!   up to the factor `-1/ω_n`).
//!
//! `F` is evaluated through `erf`/`erfc` implemented here; `G` through the
//! upper incomplete gamma function `G(y) = 2^{1-n} Γ(1 - n/2, y²/4)`.
//! Differences `F(x) - F(y)` and `G(y₁) - G(y₂)` of close arguments are
//! available through [`f_diff`] and [`g_diff`], which integrate the derivative
//! directly instead of subtracting two nearly equal numbers.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const SQRT_PI: f64 = 1.772_453_850_905_516;
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const MAX_ITER: usize = 500;

// Ten-point Gauss-Legendre rule on [-1, 1] (positive half; symmetric).
const GL_NODES: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_3,
    0.219_086_362_515_982,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

fn gauss_legendre(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut acc = 0.0;
    for (t, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
        acc += w * (f(mid - half * t) + f(mid + half * t));
    }
    acc * half
}

/// `erf(z)` for `|z| <= 2` from the everywhere-positive series
/// `erf(z) = 2/√π e^{-z²} Σ 2^k z^{2k+1} / (1·3···(2k+1))`.
fn erf_series(z: f64) -> f64 {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    for k in 1..MAX_ITER {
        term *= 2.0 * z2 / (2 * k + 1) as f64;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    2.0 * FRAC_1_SQRT_PI * (-z2).exp() * sum
}

/// `erfc(z)` for `z > 2` from the Laplace continued fraction
/// `erfc(z) = e^{-z²}/√π · 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + …))))`,
/// evaluated with the modified Lentz algorithm.
fn erfc_cf(z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = z;
    let mut c = f;
    let mut d = 0.0;
    for j in 1..MAX_ITER {
        let a = 0.5 * j as f64;
        d = z + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = z + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-z * z).exp() * FRAC_1_SQRT_PI / f
}

/// Error function.
pub fn erf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    let a = z.abs();
    let v = if a <= 2.0 { erf_series(a) } else { 1.0 - erfc_cf(a) };
    v.copysign(z)
}

/// Complementary error function, accurate in relative terms for large `z`.
pub fn erfc(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z > 2.0 {
        erfc_cf(z)
    } else if z >= -2.0 {
        1.0 - erf(z)
    } else {
        2.0 - erfc_cf(-z)
    }
}

/// `F(x)`, with `F(±∞)` taking the limiting values 1 and 0.
pub fn eval_f(x: f64) -> f64 {
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    let z = 0.5 * x;
    if z >= 0.0 {
        1.0 - 0.5 * erfc(z)
    } else {
        0.5 * erfc(-z)
    }
}

/// `1 - F(x) = F(-x)`, without cancellation for large positive `x`.
pub fn eval_f_complement(x: f64) -> f64 {
    eval_f(-x)
}

/// `F'(x) = e^{-x²/4} / (2√π)`.
pub fn eval_f_prime(x: f64) -> f64 {
    0.5 * FRAC_1_SQRT_PI * (-0.25 * x * x).exp()
}

/// `F''(x) = -(x/2) F'(x)`.
pub fn eval_f_second(x: f64) -> f64 {
    -0.5 * x * eval_f_prime(x)
}

/// `F(hi) - F(lo)` for `lo < hi`, either of which may be infinite.
///
/// Short intervals are integrated directly with a Gauss-Legendre rule; long
/// ones subtract whichever pair of tails (`F` or `1 - F`) is small, so the
/// result keeps its relative accuracy deep in both tails.
pub fn f_diff(hi: f64, lo: f64) -> f64 {
    if hi == f64::INFINITY {
        return eval_f_complement(lo);
    }
    if lo == f64::NEG_INFINITY {
        return eval_f(hi);
    }
    let width = hi - lo;
    let rate = 0.5 * hi.abs().max(lo.abs());
    if width <= 2.0 && rate * width <= 4.0 {
        return gauss_legendre(lo, hi, eval_f_prime);
    }
    if lo >= 0.0 {
        eval_f_complement(lo) - eval_f_complement(hi)
    } else if hi <= 0.0 {
        eval_f(hi) - eval_f(lo)
    } else {
        (1.0 - eval_f(lo)) - eval_f_complement(hi)
    }
}

/// Inverse of `F` on `(0, 1)`.
///
/// Safeguarded Newton on `ln F(x) = ln p` inside a bisection bracket. For
/// `p > 1/2` the symmetric problem `F(-x) = 1 - p` is solved instead; `1 - p`
/// is exact there.
pub fn inv_f(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("inv_F needs p in (0, 1), got {p}")));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    if p > 0.5 {
        return Ok(-inv_f_lower(1.0 - p));
    }
    Ok(inv_f_lower(p))
}

// Solves F(x) = p for p < 1/2, so x < 0.
fn inv_f_lower(p: f64) -> f64 {
    let target = p.ln();
    // F(-80) underflows below the smallest positive double.
    let (mut lo, mut hi) = (-80.0_f64, 0.0_f64);
    // Tail asymptote F(x) ≈ F'(x)·2/|x| gives a good starting point.
    let mut x = if p < 0.1 {
        let l = -target;
        -2.0 * (l - 0.5 * (4.0 * PI * l).ln()).max(0.0).sqrt()
    } else {
        -0.5
    };
    x = x.clamp(lo, hi);
    for _ in 0..200 {
        let fx = eval_f(x);
        let g = if fx > 0.0 { fx.ln() - target } else { f64::NEG_INFINITY };
        if g == 0.0 {
            return x;
        }
        if g < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let slope = if fx > 0.0 { eval_f_prime(x) / fx } else { 0.0 };
        let mut next = if g.is_finite() && slope > 0.0 { x - g / slope } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-16 * (1.0 + x.abs()) || hi - lo <= 4.0 * f64::EPSILON * (1.0 + lo.abs()) {
            return next;
        }
        x = next;
    }
    x
}

fn check_kernel_args(y: f64, n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("dimension must be at least 2, got {n}")));
    }
    if !(y > 0.0) {
        return Err(Error::Domain(format!("radial kernel needs y > 0, got {y}")));
    }
    Ok(())
}

/// Exponential integral `E₁(x)` for `0 < x < 1` by its convergent series.
fn exp_int_e1_small(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..MAX_ITER {
        term *= -x / k as f64;
        let contrib = term / k as f64;
        sum += contrib;
        if contrib.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

/// `Γ(a, x)` for non-positive `a` by the continued fraction
/// `e^{-x} x^a / (x+1-a - 1(1-a)/(x+3-a - 2(2-a)/(x+5-a - …)))`.
fn upper_gamma_cf(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x + a * x.ln()).exp() * h
}

/// `Γ(1 - n/2, x)` for integer `n ≥ 2` and `x > 0`.
///
/// For `x < 1` the value is built by the recurrence
/// `Γ(s, x) = (x^s e^{-x} - Γ(s+1, x)) / (-s)` from `Γ(0, x) = E₁(x)`
/// (even `n`) or `Γ(1/2, x) = √π erfc(√x)` (odd `n`); otherwise the continued
/// fraction converges quickly.
fn upper_gamma_kernel(n: u32, x: f64) -> f64 {
    let a = 1.0 - 0.5 * n as f64;
    if x >= 1.0 {
        return upper_gamma_cf(a, x);
    }
    let (mut cur_a, mut value) =
        if n.is_multiple_of(2) { (0.0, exp_int_e1_small(x)) } else { (0.5, SQRT_PI * erfc(x.sqrt())) };
    let ex = (-x).exp();
    while cur_a > a {
        let next = cur_a - 1.0;
        value = (x.powf(next) * ex - value) / (-next);
        cur_a = next;
    }
    value
}

/// `G(y) = ∫_y^∞ s^{1-n} e^{-s²/4} ds` for `y > 0`, `n ≥ 2`.
pub fn eval_g(y: f64, n: u32) -> Result<f64> {
    check_kernel_args(y, n)?;
    Ok(g_unchecked(y, n))
}

pub(crate) fn g_unchecked(y: f64, n: u32) -> f64 {
    if y == f64::INFINITY {
        return 0.0;
    }
    let x = 0.25 * y * y;
    2f64.powi(1 - n as i32) * upper_gamma_kernel(n, x)
}

/// `G'(y) = -y^{1-n} e^{-y²/4}`.
pub fn eval_g_prime(y: f64, n: u32) -> Result<f64> {
    check_kernel_args(y, n)?;
    Ok(g_prime_unchecked(y, n))
}

pub(crate) fn g_prime_unchecked(y: f64, n: u32) -> f64 {
    if y == f64::INFINITY {
        return 0.0;
    }
    -(y.powi(1 - n as i32)) * (-0.25 * y * y).exp()
}

/// `G''(y) = -G'(y)·((n-1)/y + y/2)`, written so that the sign is explicit.
pub(crate) fn g_second_unchecked(y: f64, n: u32) -> f64 {
    if y == f64::INFINITY {
        return 0.0;
    }
    -g_prime_unchecked(y, n) * ((n as f64 - 1.0) / y + 0.5 * y)
}

/// `G(lo) - G(hi)` for `0 < lo < hi ≤ ∞`.
pub fn g_diff(lo: f64, hi: f64, n: u32) -> f64 {
    if hi == f64::INFINITY {
        return g_unchecked(lo, n);
    }
    // Geometric panels keep the pole at the origin far from each panel, and
    // unit widths resolve the Gaussian. Wider intervals lose little to
    // cancellation in the plain difference.
    let by_ratio = ((hi / lo).ln() / 1.5f64.ln()).ceil();
    let by_width = (hi - lo).ceil();
    let decay = 0.5 * lo * (hi - lo);
    if by_ratio <= 16.0 && by_width <= 16.0 && decay <= 4.0 {
        let integrand = |s: f64| s.powi(1 - n as i32) * (-0.25 * s * s).exp();
        let panels = by_ratio.max(by_width).max(1.0) as usize;
        let ratio = (hi / lo).powf(1.0 / panels as f64);
        let mut acc = 0.0;
        let mut a = lo;
        for k in 0..panels {
            let b = if k + 1 == panels { hi } else { a * ratio };
            acc += gauss_legendre(a, b, integrand);
            a = b;
        }
        return acc;
    }
    g_unchecked(lo, n) - g_unchecked(hi, n)
}

/// Inverse of `G` (decreasing) for `g > 0`.
///
/// Safeguarded Newton on `ln G(e^s) = ln g` in the logarithmic variable
/// `s = ln y`, inside a bracket grown geometrically from `y = 1`.
pub fn inv_g(g: f64, n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("dimension must be at least 2, got {n}")));
    }
    if !(g > 0.0) || !g.is_finite() {
        return Err(Error::Domain(format!("inv_G needs finite g > 0, got {g}")));
    }
    let target = g.ln();
    let resid = |s: f64| g_unchecked(s.exp(), n).ln() - target;
    // resid is decreasing in s.
    let (mut lo, mut hi) = (0.0_f64, 0.0_f64);
    while resid(lo) < 0.0 {
        lo -= 1.0;
        if lo < -700.0 {
            return Err(Error::Domain(format!("inv_G({g}) underflows the argument")));
        }
    }
    while resid(hi) > 0.0 {
        hi += 0.5;
        if hi > 7.0 {
            return Err(Error::Domain(format!("inv_G({g}) is below the representable range")));
        }
    }
    let mut s = 0.5 * (lo + hi);
    for _ in 0..300 {
        let y = s.exp();
        let gy = g_unchecked(y, n);
        let r = gy.ln() - target;
        if r == 0.0 {
            break;
        }
        if r > 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let slope = y * g_prime_unchecked(y, n) / gy;
        let mut next = s - r / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let done = (next - s).abs() <= 1e-15 * (1.0 + s.abs());
        s = next;
        if done || hi - lo <= 1e-15 * (1.0 + s.abs()) {
            break;
        }
    }
    Ok(s.exp())
}

/// Small-argument asymptote of `G`: `1/((n-2) y^{n-2})` for `n ≥ 3`, `-ln y` for `n = 2`.
pub fn eval_en(y: f64, n: u32) -> Result<f64> {
    check_kernel_args(y, n)?;
    Ok(en_unchecked(y, n))
}

pub(crate) fn en_unchecked(y: f64, n: u32) -> f64 {
    if n == 2 {
        -y.ln()
    } else {
        let p = n as i32 - 2;
        1.0 / (p as f64 * y.powi(p))
    }
}

/// Surface area of the unit sphere in `R^n`: `ω₂ = 2π`, `ω₃ = 4π`,
/// `ω_n = 2π ω_{n-2} / (n-2)`.
pub fn unit_sphere_area(n: u32) -> f64 {
    match n {
        0 => 2.0,
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => 2.0 * PI * unit_sphere_area(n - 2) / (n as f64 - 2.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_basic_values() {
        assert_eq!(eval_f(0.0), 0.5);
        assert!((eval_f(40.0) - 1.0).abs() <= 1e-15);
        assert!(eval_f(-40.0).abs() <= 1e-15);
        assert!(eval_f(-40.0) > 0.0);
        // 0.5 (1 + erf 1)
        assert!((eval_f(2.0) - 0.921_350_396_474_857_5).abs() < 1e-15);
    }

    #[test]
    fn erf_reference_values() {
        // Reference values, checked to a few ulp.
        assert!((erf(0.5) - 0.520_499_877_813_046_5).abs() < 3e-16);
        assert!((erf(1.0) - 0.842_700_792_949_714_9).abs() < 3e-16);
        assert!((erfc(3.0) - 2.209_049_699_858_544e-5).abs() < 1e-20);
        assert!((erfc(5.0) / 1.537_459_794_428_035e-12 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn f_prime_values() {
        let c = 1.0 / (2.0 * PI.sqrt());
        assert!((eval_f_prime(0.0) - c).abs() < 1e-16);
        assert_eq!(eval_f_prime(1.3), eval_f_prime(-1.3));
        assert!((eval_f_prime(2.0) - c * (-1.0_f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn inv_f_contract() {
        assert_eq!(inv_f(0.5).unwrap(), 0.0);
        for &p in &[1e-6, 0.25, 0.99, 1e-200, 0.5 + 1e-12] {
            let x = inv_f(p).unwrap();
            assert!((eval_f(x) - p).abs() <= 1e-13, "p = {p}");
        }
        assert!(inv_f(0.25).unwrap() < 0.0);
        assert!(inv_f(0.0).is_err());
        assert!(inv_f(1.0).is_err());
        assert!(inv_f(f64::NAN).is_err());
    }

    #[test]
    fn f_diff_matches_plain_difference_away_from_tails() {
        for &(hi, lo) in &[(1.0, -1.0), (0.3, 0.2999), (5.0, -0.1), (-1.0, -3.5)] {
            let d = f_diff(hi, lo);
            assert!((d - (eval_f(hi) - eval_f(lo))).abs() < 1e-15);
        }
        assert_eq!(f_diff(f64::INFINITY, f64::NEG_INFINITY), 1.0);
    }

    #[test]
    fn f_diff_keeps_relative_accuracy_in_tails() {
        // F(31) - F(30) = Fc(30) - Fc(31), both tails representable.
        let d = f_diff(31.0, 30.0);
        let reference = eval_f_complement(30.0) - eval_f_complement(31.0);
        assert!((d / reference - 1.0).abs() < 1e-13);
        let hi = 30.0 + 1e-9;
        let tiny = f_diff(hi, 30.0);
        let approx = eval_f_prime(0.5 * (hi + 30.0)) * (hi - 30.0);
        assert!((tiny / approx - 1.0).abs() < 1e-9);
    }

    #[test]
    fn g_closed_form_n3() {
        // G(y) = e^{-y²/4}/y - √π (1 - F(y)) for n = 3
        for &y in &[0.05f64, 0.5, 1.0, 2.0, 7.0] {
            let closed = (-0.25 * y * y).exp() / y - SQRT_PI * eval_f_complement(y);
            let g = eval_g(y, 3).unwrap();
            assert!((g / closed - 1.0).abs() < 1e-12, "y = {y}: {g} vs {closed}");
        }
    }

    #[test]
    fn g_n2_is_half_e1() {
        // G(y) = E₁(y²/4)/2 for n = 2; E₁(1) = 0.21938393439552026
        let g = eval_g(2.0, 2).unwrap();
        assert!((g - 0.5 * 0.219_383_934_395_520_26).abs() < 1e-15);
    }

    #[test]
    fn g_prime_and_bound() {
        let v = eval_g_prime(2.0, 2).unwrap();
        assert!((v + 0.5 * (-1.0_f64).exp()).abs() < 1e-16);
        for n in 2..6 {
            for k in 1..50 {
                let y = 0.1 * k as f64;
                assert!(eval_g_prime(y, n).unwrap().abs() <= y.powi(1 - n as i32));
            }
        }
        assert!(eval_g_prime(0.0, 2).is_err());
    }

    #[test]
    fn g_asymptotics() {
        for &n in &[2u32, 3, 4] {
            let y = 1e-6;
            let ratio = eval_g(y, n).unwrap() / eval_en(y, n).unwrap();
            assert!((ratio - 1.0).abs() < 0.1, "n = {n}: {ratio}");
        }
        // Leading term of the large-y expansion; the next one is -2n/y².
        let y = 40.0;
        let n = 2;
        let ratio = eval_g(y, n).unwrap() / (2.0 * y.powi(-(n as i32)) * (-0.25 * y * y).exp());
        assert!((ratio - 1.0).abs() < 1e-2);
    }

    #[test]
    fn g_domain_errors() {
        assert!(eval_g(0.0, 3).is_err());
        assert!(eval_g(-1.0, 3).is_err());
        assert!(eval_g(1.0, 1).is_err());
        assert!(inv_g(0.0, 3).is_err());
        assert!(eval_en(0.0, 3).is_err());
    }

    #[test]
    fn inv_g_round_trips() {
        for n in 2..6 {
            for &y0 in &[0.1, 1.0, 1.7, 5.0, 20.0] {
                let g = eval_g(y0, n).unwrap();
                let y = inv_g(g, n).unwrap();
                assert!((y - y0).abs() <= 1e-10 * y0, "n = {n}, y0 = {y0}, got {y}");
                assert!((eval_g(y, n).unwrap() - g).abs() <= 1e-11 * g);
            }
        }
        // Large g lands on the E_n asymptote.
        let y = inv_g(1e6, 3).unwrap();
        assert!((y * 1e6 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn g_diff_agrees_with_subtraction() {
        for n in 2..5 {
            for &(lo, hi) in &[(0.5, 0.50001), (1.0, 3.0), (0.01, 0.02), (4.0, f64::INFINITY)] {
                let d = g_diff(lo, hi, n);
                let plain = g_unchecked(lo, n) - g_unchecked(hi, n);
                assert!((d / plain - 1.0).abs() < 1e-9, "n = {n} ({lo}, {hi})");
            }
        }
    }

    #[test]
    fn g_diff_wide_ratio_near_pole() {
        // A single panel over a ratio of ~5 loses about eight digits for n = 2.
        for n in 2..5 {
            let (lo, hi) = (0.0417, 0.1977);
            let d = g_diff(lo, hi, n);
            let plain = g_unchecked(lo, n) - g_unchecked(hi, n);
            assert!((d / plain - 1.0).abs() < 1e-14, "n = {n}: {d} vs {plain}");
        }
    }

    #[test]
    fn en_values() {
        assert_eq!(eval_en(2.0, 3).unwrap(), 0.5);
        assert_eq!(eval_en(1.0, 2).unwrap(), 0.0);
    }

    #[test]
    fn sphere_areas() {
        assert!((unit_sphere_area(2) - 2.0 * PI).abs() < 1e-15);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-15);
        assert!((unit_sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((unit_sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }
}
