use std::time::Instant;

use serde::Serialize;

use super::gap::{overapprox_gap, GapOptions, GapReport, OuterMethod};
use super::sampling::{random_unit, sample_rng};
use crate::boundary::{sample_sheet, Sheet};
use crate::error::Result;
use crate::implicit::{membership, MembershipOptions};
use crate::model::SystemSpec;
use crate::support::{support, supporting_point};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timing {
    pub name: String,
    pub count: usize,
    pub seconds: f64,
    pub ns_per_op: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub timings: Vec<Timing>,
    pub gaps: Vec<GapReport>,
}

fn time<F: FnMut() -> Result<usize>>(name: &str, mut f: F) -> Result<Timing> {
    let start = Instant::now();
    let count = f()?;
    let seconds = start.elapsed().as_secs_f64();
    Ok(Timing {
        name: name.to_string(),
        count,
        seconds,
        ns_per_op: if count > 0 {
            1e9 * seconds / count as f64
        } else {
            0.0
        },
    })
}

/// Times the core operations on `spec` and reports the gap of the box and of
/// support polytopes with `d + 1`, `4d` and `16d` directions.
pub fn run_bench(spec: &SystemSpec, n: usize, seed: u64) -> Result<BenchReport> {
    let d = spec.d();
    let mut rng = sample_rng(seed, 0);
    let dirs: Vec<Vec<f64>> = (0..n).map(|_| random_unit(d, &mut rng)).collect();
    let mut timings = vec![
        time("support", || {
            for y in &dirs {
                support(spec, y)?;
            }
            Ok(dirs.len())
        })?,
        time("supporting_point", || {
            for y in &dirs {
                supporting_point(spec, y)?;
            }
            Ok(dirs.len())
        })?,
    ];
    let points: Vec<Vec<f64>> = dirs
        .iter()
        .take(n.min(200))
        .map(|y| supporting_point(spec, y))
        .collect::<Result<_>>()?;
    timings.push(time("membership", || {
        for x in &points {
            membership(spec, x, &MembershipOptions::default())?;
        }
        Ok(points.len())
    })?);
    timings.push(time("boundary_sample_grid32", || {
        let mut count = 0;
        for b in &spec.blocks {
            for sheet in Sheet::BOTH {
                count += sample_sheet(b, sheet, 32, spec.t)?.len();
            }
        }
        Ok(count)
    })?);

    let opts = GapOptions {
        samples: n.max(1000),
        seed,
        ..GapOptions::default()
    };
    let mut gaps = vec![overapprox_gap(spec, &OuterMethod::BoundingBox, &opts)?];
    for k in [d + 1, 4 * d, 16 * d] {
        gaps.push(overapprox_gap(
            spec,
            &OuterMethod::SupportPolytope { directions: k },
            &opts,
        )?);
    }
    Ok(BenchReport { timings, gaps })
}
