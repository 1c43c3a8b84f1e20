#![allow(dead_code)]

use std::io::Write;
use std::path::PathBuf;

use integrator_reach::{BlockSpec, SystemSpec};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn figure(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples/figures")
        .join(name)
}

pub fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

pub fn load_figure(name: &str) -> SystemSpec {
    SystemSpec::from_json(&std::fs::read_to_string(figure(name)).unwrap()).unwrap()
}

/// A block of order `r` with moderate data and a non-degenerate input range.
pub fn random_block<R: Rng>(rng: &mut R, r: usize) -> BlockSpec {
    let x0 = (0..r).map(|_| rng.random_range(-1.0..1.0)).collect();
    let alpha = rng.random_range(-2.0..0.5);
    let beta = alpha + rng.random_range(0.1..2.0);
    BlockSpec::new(r, x0, alpha, beta).unwrap()
}

/// One to three blocks of order at most `max_r` at a horizon in `[0.2, 3]`.
pub fn random_spec<R: Rng>(rng: &mut R, max_r: usize) -> SystemSpec {
    let m = rng.random_range(1..=3);
    let blocks = (0..m)
        .map(|_| {
            let r = rng.random_range(1..=max_r);
            random_block(rng, r)
        })
        .collect();
    SystemSpec::from_blocks(blocks, rng.random_range(0.2..3.0)).unwrap()
}

/// `k` sorted switching times in `[0, t]`.
pub fn random_switches<R: Rng>(rng: &mut R, k: usize, t: f64) -> Vec<f64> {
    let mut s: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..=t)).collect();
    s.sort_by(f64::total_cmp);
    s
}

/// Prints one verdict line for an acceptance criterion past the test harness
/// output capture.
pub fn report(id: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    writeln!(err, "ACCEPTANCE {id}: {verdict} ({detail})").unwrap();
}
