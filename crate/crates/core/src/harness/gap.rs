use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::{random_unit, sample_rng};
use super::volume::bounding_box;
use crate::error::{ReachError, Result};
use crate::implicit::block_contains;
use crate::model::SystemSpec;
use crate::support::support;

/// Outer approximation built from exact support values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum OuterMethod {
    /// Axis-aligned box from the `+-e_i` support values.
    BoundingBox,
    /// Intersection of the supporting half-spaces of `directions` directions.
    SupportPolytope { directions: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapOptions {
    /// Uniform samples for the volume ratio.
    pub samples: usize,
    /// Random test directions for the support overshoot.
    pub test_directions: usize,
    pub seed: u64,
}

impl Default for GapOptions {
    fn default() -> Self {
        GapOptions {
            samples: 100_000,
            test_directions: 256,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub method: OuterMethod,
    pub outer_volume: f64,
    pub exact_volume: f64,
    /// `outer_volume / exact_volume`, from shared samples.
    pub volume_ratio: f64,
    pub ratio_std_error: f64,
    /// `max_y h_outer(y) - h(y)` over the test directions.
    pub max_overshoot: f64,
    pub mean_overshoot: f64,
    pub test_directions: usize,
    pub samples: usize,
}

/// A halfspace description `<a_i, x> <= b_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportPolytope {
    pub normals: Vec<Vec<f64>>,
    pub offsets: Vec<f64>,
}

/// Direction list whose prefixes of length `>= d + 1` all positively span
/// `R^d`: the coordinate vectors, then `-(1, ..., 1)/sqrt(d)`, then random unit
/// vectors.
pub fn polytope_directions(d: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut dirs: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            e
        })
        .collect();
    dirs.push(vec![-1.0 / (d as f64).sqrt(); d]);
    let mut rng = sample_rng(seed, 1 << 40);
    while dirs.len() < n {
        dirs.push(random_unit(d, &mut rng));
    }
    dirs.truncate(n.max(d + 1));
    dirs
}

impl SupportPolytope {
    pub fn from_directions(spec: &SystemSpec, dirs: Vec<Vec<f64>>) -> Result<Self> {
        let offsets = dirs
            .iter()
            .map(|y| support(spec, y))
            .collect::<Result<Vec<_>>>()?;
        Ok(SupportPolytope {
            normals: dirs,
            offsets,
        })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.normals
            .iter()
            .zip(&self.offsets)
            .all(|(a, b)| a.iter().zip(x).map(|(u, v)| u * v).sum::<f64>() <= *b)
    }

    /// Support function of the polytope, by linear programming.
    pub fn support(&self, y: &[f64]) -> Result<f64> {
        let mut lp = Problem::new(OptimizationDirection::Maximize);
        let vars: Vec<_> = y
            .iter()
            .map(|c| lp.add_var(*c, (f64::NEG_INFINITY, f64::INFINITY)))
            .collect();
        for (a, b) in self.normals.iter().zip(&self.offsets) {
            let expr: Vec<_> = vars.iter().copied().zip(a.iter().copied()).collect();
            lp.add_constraint(expr.as_slice(), ComparisonOp::Le, *b);
        }
        lp.solve()
            .map(|s| s.objective())
            .map_err(|e| ReachError::InvalidParams(format!("support polytope LP: {e}")))
    }
}

/// Compares an outer approximation with the exact reach set: volume ratio by
/// Monte Carlo on shared samples and support overshoot on random directions.
pub fn overapprox_gap(
    spec: &SystemSpec,
    method: &OuterMethod,
    opts: &GapOptions,
) -> Result<GapReport> {
    let d = spec.d();
    let mut exact_box = Vec::with_capacity(d);
    for b in &spec.blocks {
        exact_box.extend(bounding_box(b, spec.t));
    }
    let polytope = match method {
        OuterMethod::BoundingBox => None,
        OuterMethod::SupportPolytope { directions } => {
            if *directions < d + 1 {
                return Err(ReachError::InvalidParams(format!(
                    "a support polytope in R^{d} needs at least {} directions",
                    d + 1
                )));
            }
            Some(SupportPolytope::from_directions(
                spec,
                polytope_directions(d, *directions, opts.seed),
            )?)
        }
    };
    let outer_support = |y: &[f64]| -> Result<f64> {
        match &polytope {
            None => Ok(y
                .iter()
                .zip(&exact_box)
                .map(|(c, (lo, hi))| (c * lo).max(c * hi))
                .sum()),
            Some(p) => p.support(y),
        }
    };

    // sampling box of the outer set
    let sample_box: Vec<(f64, f64)> = match &polytope {
        None => exact_box.clone(),
        Some(_) => (0..d)
            .map(|i| {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                let hi = outer_support(&e)?;
                e[i] = -1.0;
                Ok((-outer_support(&e)?, hi))
            })
            .collect::<Result<_>>()?,
    };
    let box_volume: f64 = sample_box.iter().map(|(lo, hi)| hi - lo).product();
    let n = opts.samples;
    let (n_outer, n_exact) = (0..n.div_ceil(4096))
        .into_par_iter()
        .map(|c| {
            let mut rng = sample_rng(opts.seed, c as u64);
            let mut x = vec![0.0; d];
            let (mut outer, mut exact) = (0usize, 0usize);
            for _ in 0..4096.min(n - c * 4096) {
                for (xi, (lo, hi)) in x.iter_mut().zip(&sample_box) {
                    *xi = lo + (hi - lo) * rng.random::<f64>();
                }
                let in_outer = polytope.as_ref().is_none_or(|p| p.contains(&x));
                if in_outer {
                    outer += 1;
                    let in_exact = spec
                        .blocks
                        .iter()
                        .zip(spec.block_views(&x))
                        .all(|(b, xj)| block_contains(b, xj, spec.t, 0.0));
                    if in_exact {
                        exact += 1;
                    }
                }
            }
            (outer, exact)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let outer_volume = box_volume * n_outer as f64 / n.max(1) as f64;
    let exact_volume = box_volume * n_exact as f64 / n.max(1) as f64;
    let (volume_ratio, ratio_std_error) = if n_exact == 0 {
        (f64::INFINITY, f64::INFINITY)
    } else {
        // exact points are a binomial subsample of the outer points
        let q = n_exact as f64 / n_outer as f64;
        (1.0 / q, (q * (1.0 - q) / n_outer as f64).sqrt() / (q * q))
    };

    let mut rng = sample_rng(opts.seed, 1 << 41);
    let mut tests: Vec<Vec<f64>> = (0..d)
        .flat_map(|i| {
            [1.0, -1.0].into_iter().map(move |s| {
                let mut e = vec![0.0; d];
                e[i] = s;
                e
            })
        })
        .collect();
    tests.extend((0..opts.test_directions).map(|_| random_unit(d, &mut rng)));
    let overshoots = tests
        .iter()
        .map(|y| Ok(outer_support(y)? - support(spec, y)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(GapReport {
        method: method.clone(),
        outer_volume,
        exact_volume,
        volume_ratio,
        ratio_std_error,
        max_overshoot: overshoots.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean_overshoot: overshoots.iter().sum::<f64>() / overshoots.len() as f64,
        test_directions: tests.len(),
        samples: n,
    })
}
