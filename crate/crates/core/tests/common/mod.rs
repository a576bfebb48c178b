#![allow(dead_code)]

use std::io::Write;

use stefan_core::{PhaseConfig, RadialProblem, RiemannProblem1D};

pub fn line(t: &[f64], a: &[f64], k: &[f64], d: &[f64]) -> RiemannProblem1D {
    RiemannProblem1D::new(PhaseConfig::new(t.to_vec(), a.to_vec(), k.to_vec(), d.to_vec()).unwrap()).unwrap()
}

pub fn radial(t: &[f64], a: &[f64], k: &[f64], d: &[f64], n: u32, amplitude: f64, d0: f64) -> RadialProblem {
    let cfg = PhaseConfig {
        temperatures: t.to_vec(),
        diffusivities: a.to_vec(),
        conductivities: k.to_vec(),
        latent_heats: d.to_vec(),
    };
    RadialProblem::new(cfg, n, amplitude, d0).unwrap()
}

pub fn symmetric() -> RiemannProblem1D {
    line(&[-1.0, 0.0, 1.0], &[1.0, 1.0], &[1.0, 1.0], &[0.0])
}

/// Single front with a large jump on the right: the front runs left over
/// many cells of an FD grid.
pub fn neumann() -> RiemannProblem1D {
    line(&[0.0, 0.5, 6.0], &[1.0, 1.0], &[1.0, 1.0], &[0.3])
}

pub fn contrast() -> RiemannProblem1D {
    line(&[-3.0, 0.0, 1.0], &[1.0, 0.7], &[1.0, 2.0], &[0.5])
}

pub fn two_front() -> RiemannProblem1D {
    line(&[0.0, 0.2, 0.4, 8.0], &[1.0, 0.8, 1.2], &[1.0, 1.5, 1.0], &[0.2, 0.3])
}

pub fn four_front() -> RiemannProblem1D {
    line(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0], &[1.0, 0.5, 2.0, 1.0, 0.7], &[1.0, 2.0, 1.0, 0.5, 1.0], &[0.1, 1.0, 0.2, 0.5])
}

pub fn stiff_three_front() -> RiemannProblem1D {
    line(&[0.0, 1.0, 2.0, 3.0, 4.0], &[0.3, 1.0, 3.0, 1.0], &[2.0, 1.0, 1.0, 0.5], &[5.0, 0.01, 2.0])
}

pub fn radial_one_n3() -> RadialProblem {
    radial(&[0.0, 1.0], &[1.0, 0.8], &[1.0, 2.0], &[0.5], 3, 1.5, 0.0)
}

pub fn radial_one_n2() -> RadialProblem {
    radial(&[0.0, 1.0], &[1.0, 1.0], &[1.0, 1.0], &[1.0], 2, 2.0, 0.0)
}

pub fn radial_two_n3() -> RadialProblem {
    radial(&[0.0, 1.0, 2.0], &[1.0, 0.7, 1.3], &[1.0, 1.0, 2.0], &[0.5, 0.3], 3, 3.0, 0.0)
}

pub fn radial_three_n2() -> RadialProblem {
    radial(&[0.0, 0.5, 1.0, 1.5], &[1.0, 0.6, 1.4, 1.0], &[1.0, 2.0, 1.0, 1.5], &[0.2, 0.4, 0.1], 2, 2.0, 0.0)
}

/// `A k_1 = 1e-3`: the radial potential is not convex.
pub fn weak_source() -> RadialProblem {
    radial(&[0.0, 1.0], &[1.0, 1.0], &[1.0, 1.0], &[1.0], 3, 1e-3, 0.0)
}

/// Outer boundary at a transition temperature with latent heat `d_0 = 1`.
pub fn extended() -> RadialProblem {
    radial(&[0.0, 1.0], &[1.0, 0.8], &[1.0, 2.0], &[0.5], 3, 1.5, 1.0)
}

pub fn line_suite() -> Vec<(&'static str, RiemannProblem1D)> {
    vec![
        ("symmetric", symmetric()),
        ("neumann", neumann()),
        ("contrast", contrast()),
        ("two_front", two_front()),
        ("four_front", four_front()),
        ("stiff_three_front", stiff_three_front()),
    ]
}

pub fn radial_suite() -> Vec<(&'static str, RadialProblem)> {
    vec![
        ("radial_one_n3", radial_one_n3()),
        ("radial_one_n2", radial_one_n2()),
        ("radial_two_n3", radial_two_n3()),
        ("radial_three_n2", radial_three_n2()),
        ("weak_source", weak_source()),
        ("extended", extended()),
    ]
}

/// Central difference gradient with per-coordinate steps.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], steps: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += steps[i];
            xm[i] -= steps[i];
            (f(&xp) - f(&xm)) / (2.0 * steps[i])
        })
        .collect()
}

/// Step `1e-5` times the distance to the nearest constraint (neighbour, or the
/// origin when `floor` is set), capped by the coordinate scale.
pub fn fd_steps(x: &[f64], floor: bool) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut room = f64::INFINITY;
            if i > 0 {
                room = room.min(x[i] - x[i - 1]);
            } else if floor {
                room = room.min(x[i]);
            }
            if i + 1 < x.len() {
                room = room.min(x[i + 1] - x[i]);
            }
            1e-5 * room.min(1.0 + x[i].abs())
        })
        .collect()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Writes through the stdout handle rather than `println!`, which the test
/// harness captures, so the verdicts appear in every test log.
pub fn report(id: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stdout().lock(), "criterion {id:>2} {name}: {verdict} ({detail})");
}
