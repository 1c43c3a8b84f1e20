use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::sampling::sample_rng;
use crate::boundary::{boundary_point, BoundaryParams, Sheet};
use crate::error::{ReachError, Result};
use crate::implicit::block_contains;
use crate::model::{BlockSpec, SystemSpec};
use crate::support::support_block;

const CHUNK: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockVolume {
    pub block: usize,
    pub volume: f64,
    pub std_error: f64,
    pub box_volume: f64,
    pub accepted: usize,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumeReport {
    pub blocks: Vec<BlockVolume>,
    /// Product of the block volumes.
    pub total: f64,
    /// First-order error of the product.
    pub total_std_error: f64,
}

/// `[lo, hi]` per coordinate from the support values in `-e_i` and `e_i`.
pub fn bounding_box(b: &BlockSpec, t: f64) -> Vec<(f64, f64)> {
    (0..b.r)
        .map(|i| {
            let mut e = vec![0.0; b.r];
            e[i] = 1.0;
            let hi = support_block(b, &e, t);
            e[i] = -1.0;
            let lo = -support_block(b, &e, t);
            (lo, hi)
        })
        .collect()
}

/// Counts hits of `inside` among `n` uniform samples of `bx`, with sample
/// chunks on independent streams `stream_base + chunk`.
fn count_hits<F>(bx: &[(f64, f64)], n: usize, seed: u64, stream_base: u64, inside: F) -> usize
where
    F: Fn(&[f64]) -> bool + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = sample_rng(seed, stream_base + c as u64);
            let len = CHUNK.min(n - c * CHUNK);
            let mut x = vec![0.0; bx.len()];
            let mut hits = 0;
            for _ in 0..len {
                for (xi, (lo, hi)) in x.iter_mut().zip(bx) {
                    *xi = lo + (hi - lo) * rng.random::<f64>();
                }
                if inside(&x) {
                    hits += 1;
                }
            }
            hits
        })
        .sum()
}

fn estimate(box_volume: f64, hits: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 0.0);
    }
    let p = hits as f64 / n as f64;
    (
        box_volume * p,
        box_volume * (p * (1.0 - p) / n as f64).sqrt(),
    )
}

/// Rejection-sampling volume of each block's reach set inside its bounding
/// box, `n` samples per block; the total is the product.
pub fn mc_volume(spec: &SystemSpec, n: usize, seed: u64) -> VolumeReport {
    let blocks: Vec<BlockVolume> = spec
        .blocks
        .iter()
        .enumerate()
        .map(|(j, b)| {
            if b.is_degenerate() {
                return BlockVolume {
                    block: j,
                    volume: 0.0,
                    std_error: 0.0,
                    box_volume: 0.0,
                    accepted: 0,
                    samples: n,
                };
            }
            let bx = bounding_box(b, spec.t);
            let box_volume: f64 = bx.iter().map(|(lo, hi)| hi - lo).product();
            let hits = count_hits(&bx, n, seed, (j as u64) << 32, |x| {
                block_contains(b, x, spec.t, 0.0)
            });
            let (volume, std_error) = estimate(box_volume, hits, n);
            BlockVolume {
                block: j,
                volume,
                std_error,
                box_volume,
                accepted: hits,
                samples: n,
            }
        })
        .collect();
    let total: f64 = blocks.iter().map(|b| b.volume).product();
    let rel2: f64 = blocks
        .iter()
        .map(|b| {
            if b.volume > 0.0 {
                (b.std_error / b.volume).powi(2)
            } else {
                0.0
            }
        })
        .sum();
    VolumeReport {
        total,
        total_std_error: total * rel2.sqrt(),
        blocks,
    }
}

/// Rejection sampling in the bounding box of the whole product set, testing
/// all blocks per sample. Serves as a check on the product rule.
pub fn mc_volume_joint(spec: &SystemSpec, n: usize, seed: u64) -> BlockVolume {
    let mut bx = Vec::new();
    for b in &spec.blocks {
        bx.extend(bounding_box(b, spec.t));
    }
    let box_volume: f64 = bx.iter().map(|(lo, hi)| hi - lo).product();
    let hits = if box_volume == 0.0 {
        0
    } else {
        count_hits(&bx, n, seed, u64::MAX >> 1, |x| {
            spec.blocks
                .iter()
                .zip(spec.block_views(x))
                .all(|(b, xj)| block_contains(b, xj, spec.t, 0.0))
        })
    };
    let (volume, std_error) = estimate(box_volume, hits, n);
    BlockVolume {
        block: usize::MAX,
        volume,
        std_error,
        box_volume,
        accepted: hits,
        samples: n,
    }
}

/// Closed boundary polygon of an order-2 block: the plus sheet followed by the
/// minus sheet, `n` points in total.
pub fn boundary_polygon(b: &BlockSpec, t: f64, n: usize) -> Result<Vec<[f64; 2]>> {
    if b.r != 2 {
        return Err(ReachError::UnsupportedOrder(b.r));
    }
    let per = (n / 2).max(2);
    let mut pts = Vec::with_capacity(2 * per);
    for sheet in Sheet::BOTH {
        for i in 0..per {
            let s = if i + 1 == per {
                t
            } else {
                t * i as f64 / (per - 1) as f64
            };
            let x = boundary_point(b, &BoundaryParams::new(sheet, vec![s]), t)?.x;
            pts.push([x[0], x[1]]);
        }
    }
    Ok(pts)
}

/// Area of a simple polygon by the shoelace formula.
pub fn shoelace_area(pts: &[[f64; 2]]) -> f64 {
    let n = pts.len();
    let twice: f64 = (0..n)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum();
    0.5 * twice.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shoelace_unit_square() {
        assert_eq!(
            shoelace_area(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]),
            1.0
        );
    }

    #[test]
    fn double_integrator_area() {
        // the two parabolic arcs enclose t^3 * 2/3 = 16/3 for t = 2
        let b = BlockSpec::new(2, vec![0.0, 0.0], -1.0, 1.0).unwrap();
        let a = shoelace_area(&boundary_polygon(&b, 2.0, 20_000).unwrap());
        assert!((a - 16.0 / 3.0).abs() < 1e-6, "{a}");
        let rep = mc_volume(&SystemSpec::from_blocks(vec![b], 2.0).unwrap(), 100_000, 7);
        let v = &rep.blocks[0];
        assert!((v.volume - 16.0 / 3.0).abs() < 4.0 * v.std_error);
        assert_eq!(v.box_volume, 16.0);
    }

    #[test]
    fn degenerate_block_has_no_volume() {
        let b1 = BlockSpec::new(1, vec![0.0], -1.0, 1.0).unwrap();
        let b2 = BlockSpec::new(2, vec![0.0, 0.0], 0.5, 0.5).unwrap();
        let rep = mc_volume(
            &SystemSpec::from_blocks(vec![b1, b2], 1.0).unwrap(),
            1000,
            1,
        );
        assert_eq!(rep.total, 0.0);
        assert_eq!(rep.blocks[0].volume, 2.0);
    }
}
