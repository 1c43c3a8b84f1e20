use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;

use super::schedule::{endpoint_unchecked, InputSchedule};
use crate::error::{ReachError, Result};
use crate::model::{InputSet, LpNorm, SystemSpec};

/// Generator for sample `index` of a run seeded with `seed`. Each sample owns
/// a ChaCha stream, so results do not depend on thread scheduling.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A uniform random unit vector in `R^n`.
pub fn random_unit<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

/// A uniform sample from `u`. `lp` balls use exact samplers: coordinate-wise
/// for `inf`, a Gaussian direction with radius `U^{1/m}` for `2`, and signed
/// normalized exponentials for `1`.
pub fn sample_input<R: Rng>(u: &InputSet, rng: &mut R) -> Vec<f64> {
    match u {
        InputSet::Box { lower, upper } => lower
            .iter()
            .zip(upper)
            .map(|(l, h)| {
                if l == h {
                    *l
                } else {
                    rng.random_range(*l..=*h)
                }
            })
            .collect(),
        InputSet::Lp { p, radius, center } => {
            let m = center.len();
            let unit: Vec<f64> = match p {
                LpNorm::Inf => (0..m).map(|_| rng.random_range(-1.0..=1.0)).collect(),
                LpNorm::L2 => {
                    let dir = random_unit(m, rng);
                    let rad = rng.random::<f64>().powf(1.0 / m as f64);
                    dir.into_iter().map(|v| v * rad).collect()
                }
                LpNorm::L1 => {
                    // m + 1 exponentials normalized give a uniform point of the
                    // simplex with a slack coordinate
                    let e: Vec<f64> = (0..=m).map(|_| Exp1.sample(rng)).collect();
                    let total: f64 = e.iter().sum();
                    e[..m]
                        .iter()
                        .map(|v| {
                            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                            sign * v / total
                        })
                        .collect()
                }
            };
            unit.iter()
                .zip(center)
                .map(|(v, c)| c + radius * v)
                .collect()
        }
    }
}

/// Endpoints of `n` random piecewise-constant inputs with `k` equal segments
/// whose values are drawn uniformly from `u_set`.
pub fn random_cloud(
    spec: &SystemSpec,
    u_set: &InputSet,
    k: usize,
    n: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if k == 0 {
        return Err(ReachError::InvalidParams(
            "need at least one segment".into(),
        ));
    }
    let u_set = u_set.with_default_center(spec.m());
    u_set
        .validate()
        .map_err(|e| ReachError::UnsupportedInputSet(e.to_string()))?;
    if u_set.dim() != spec.m() {
        return Err(ReachError::UnsupportedInputSet(format!(
            "input set of dimension {} for {} inputs",
            u_set.dim(),
            spec.m()
        )));
    }
    Ok((0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let values = (0..k).map(|_| sample_input(&u_set, &mut rng)).collect();
            endpoint_unchecked(spec, &InputSchedule::uniform(values, spec.t))
        })
        .collect())
}
