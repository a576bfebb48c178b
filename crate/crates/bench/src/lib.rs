//! Fixed instances shared by the benchmarks.

use stefan_core::{PhaseConfig, RadialProblem, RiemannProblem1D};

fn config(t: &[f64], a: &[f64], k: &[f64], d: &[f64]) -> PhaseConfig {
    PhaseConfig::new(t.to_vec(), a.to_vec(), k.to_vec(), d.to_vec()).expect("valid fixture")
}

/// Line instance with `m` fronts and alternating coefficients.
pub fn line(m: usize) -> RiemannProblem1D {
    let t: Vec<f64> = (0..=m + 1).map(|i| i as f64).collect();
    let a: Vec<f64> = (0..=m).map(|i| if i % 2 == 0 { 1.0 } else { 0.6 }).collect();
    let k: Vec<f64> = (0..=m).map(|i| if i % 3 == 0 { 1.5 } else { 1.0 }).collect();
    let d: Vec<f64> = (0..m).map(|i| 0.2 + 0.1 * i as f64).collect();
    RiemannProblem1D::new(config(&t, &a, &k, &d)).expect("valid fixture")
}

/// Radial instance with `m` fronts in dimension `n`.
pub fn radial(m: usize, n: u32) -> RadialProblem {
    let t: Vec<f64> = (0..=m).map(|i| i as f64).collect();
    let a: Vec<f64> = (0..=m).map(|i| if i % 2 == 0 { 1.0 } else { 0.7 }).collect();
    let k: Vec<f64> = (0..=m).map(|i| 1.0 + 0.5 * (i % 2) as f64).collect();
    let d: Vec<f64> = (0..m).map(|i| 0.5 - 0.1 * i as f64).collect();
    // `u_0..=u_m`; the problem appends the unbounded top temperature.
    let cfg = PhaseConfig { temperatures: t, diffusivities: a, conductivities: k, latent_heats: d };
    RadialProblem::new(cfg, n, 3.0, 0.0).expect("valid fixture")
}
