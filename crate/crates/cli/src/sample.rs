use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use stefan_core::{Problem, SelfSimilarProfile};

use crate::solve::{model_order, profile};

/// Unbounded phases are sampled this many diffusion lengths past the last front.
const TAIL_LENGTHS: f64 = 8.0;
/// The radial innermost phase is sampled log-spaced down to this fraction of `xi_m`.
const INNER_DECADES: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub xi: f64,
    pub v: f64,
}

fn linspace_open(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    let h = (hi - lo) / (count + 1) as f64;
    (1..=count).map(move |j| lo + h * j as f64)
}

/// `count` samples strictly inside every phase plus one exact row per front,
/// sorted by `xi`.
pub fn sample(p: &Problem, storage: &[f64], count: usize) -> stefan_core::Result<Vec<Row>> {
    let prof = profile(p, storage)?;
    let (fronts, outer) = model_order(p, storage);
    let c = match p {
        Problem::Riemann1D(q) => &q.config,
        Problem::Radial(q) => &q.config,
    };
    let m = fronts.len();
    let mut xs = Vec::new();
    let mut rows: Vec<Row> = (1..=m).map(|i| Row { xi: fronts[i - 1], v: c.u(i) }).collect();
    match &prof {
        SelfSimilarProfile::OneD(_) => {
            let (first, last) = (fronts[0], fronts[m - 1]);
            let left = TAIL_LENGTHS * c.a(0);
            let right = TAIL_LENGTHS * c.a(m);
            xs.extend((0..count).map(|j| first - left + left * j as f64 / count as f64));
            for i in 1..m {
                xs.extend(linspace_open(fronts[i - 1], fronts[i], count));
            }
            xs.extend((1..=count).map(|j| last + right * j as f64 / count as f64));
        }
        SelfSimilarProfile::Radial(_) => {
            let inner = fronts[m - 1];
            xs.extend((0..count).map(|j| inner * 10f64.powf(-INNER_DECADES * (1.0 - j as f64 / count as f64))));
            for i in 1..m {
                xs.extend(linspace_open(fronts[i], fronts[i - 1], count));
            }
            match outer {
                Some(x0) => {
                    xs.extend(linspace_open(fronts[0], x0, count));
                    rows.push(Row { xi: x0, v: c.u(0) });
                }
                None => {
                    let span = TAIL_LENGTHS * c.a(0);
                    xs.extend((1..=count).map(|j| fronts[0] + span * j as f64 / count as f64));
                }
            }
        }
    }
    rows.extend(xs.into_iter().map(|xi| Row { xi, v: prof.v(xi) }));
    rows.sort_by(|a, b| a.xi.total_cmp(&b.xi));
    Ok(rows)
}

pub fn write_csv(path: &Path, rows: &[Row], time: Option<f64>) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    match time {
        None => {
            w.write_record(["xi", "v"])?;
            for r in rows {
                w.serialize((r.xi, r.v))?;
            }
        }
        Some(t) => {
            w.write_record(["xi", "v", "x", "u"])?;
            let s = t.sqrt();
            for r in rows {
                w.serialize((r.xi, r.v, r.xi * s, r.v))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
