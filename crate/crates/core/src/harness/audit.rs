use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::{random_unit, sample_rng};
use crate::error::Result;
use crate::implicit::{block_margin, MembershipOptions};
use crate::model::SystemSpec;
use crate::support::support_block;

/// How the duality margin of each point is computed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "plan", rename_all = "snake_case")]
pub enum DirectionPlan {
    /// Minimum of `h_j(y) - <y, x_j>` over `n` random unit directions per block
    /// plus the coordinate directions. An upper bound on the true margin.
    Sampled { n: usize, seed: u64 },
    /// The membership minimizer over the whole sphere.
    Optimized,
}

/// Support gap `h_j(y) - max_cloud <y, x_j>` for one direction of one block.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupportGap {
    pub block: usize,
    pub direction: Vec<f64>,
    pub support: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CloudReport {
    pub n_samples: usize,
    /// Points with margin above `tol`.
    pub n_inside: usize,
    /// Points with margin below `-tol`.
    pub n_violations: usize,
    /// Largest `-margin` over the cloud; `None` for an empty cloud.
    pub max_violation: Option<f64>,
    /// Index of the point attaining `max_violation`.
    pub worst_index: Option<usize>,
    pub tol: f64,
    /// Per-point margin: the smallest block margin.
    pub margins: Vec<f64>,
    pub support_gaps: Vec<SupportGap>,
}

fn coordinate_directions(r: usize) -> Vec<Vec<f64>> {
    (0..r)
        .flat_map(|i| {
            [1.0, -1.0].into_iter().map(move |s| {
                let mut e = vec![0.0; r];
                e[i] = s;
                e
            })
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

/// Checks every point of `cloud` against the exact support function.
pub fn containment_audit(
    cloud: &[Vec<f64>],
    spec: &SystemSpec,
    plan: &DirectionPlan,
    tol: f64,
) -> Result<CloudReport> {
    for x in cloud {
        spec.check_len(x)?;
    }
    // per block: directions and their support values
    let dirs: Vec<Vec<(Vec<f64>, f64)>> = spec
        .blocks
        .iter()
        .enumerate()
        .map(|(j, b)| {
            let mut ds = coordinate_directions(b.r);
            if let DirectionPlan::Sampled { n, seed } = plan {
                let mut rng = sample_rng(*seed, j as u64);
                ds.extend((0..*n).map(|_| random_unit(b.r, &mut rng)));
            }
            ds.into_iter()
                .map(|y| {
                    let h = support_block(b, &y, spec.t);
                    (y, h)
                })
                .collect()
        })
        .collect();

    let opts = MembershipOptions::with_tol(tol);
    let margins: Vec<f64> = cloud
        .par_iter()
        .map(|x| {
            spec.blocks
                .iter()
                .zip(spec.block_views(x))
                .enumerate()
                .map(|(j, (b, xj))| match plan {
                    DirectionPlan::Sampled { .. } => dirs[j]
                        .iter()
                        .map(|(y, h)| h - dot(y, xj))
                        .fold(f64::INFINITY, f64::min),
                    DirectionPlan::Optimized => block_margin(b, xj, spec.t, &opts).0,
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect();

    let mut worst: Option<(usize, f64)> = None;
    for (i, m) in margins.iter().enumerate() {
        if worst.is_none_or(|(_, w)| -m > w) {
            worst = Some((i, -m));
        }
    }
    let support_gaps = if cloud.is_empty() {
        Vec::new()
    } else {
        dirs.iter()
            .enumerate()
            .flat_map(|(j, ds)| {
                let off = spec.offset(j);
                ds.iter().map(move |(y, h)| {
                    let best = cloud
                        .iter()
                        .map(|x| dot(y, &x[off..off + y.len()]))
                        .fold(f64::NEG_INFINITY, f64::max);
                    SupportGap {
                        block: j,
                        direction: y.clone(),
                        support: *h,
                        gap: h - best,
                    }
                })
            })
            .collect()
    };
    Ok(CloudReport {
        n_samples: cloud.len(),
        n_inside: margins.iter().filter(|&&m| m > tol).count(),
        n_violations: margins.iter().filter(|&&m| m < -tol).count(),
        max_violation: worst.map(|w| w.1),
        worst_index: worst.map(|w| w.0),
        tol,
        margins,
        support_gaps,
    })
}
