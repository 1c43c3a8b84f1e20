//! Acceptance criteria, one test each. Every test prints a PASS/FAIL line on
//! stderr before asserting.

mod common;

use std::collections::BTreeMap;
use std::time::Instant;

use common::{load_figure, random_block, random_spec, random_switches, report, rng};
use integrator_reach::boundary::{boundary_point, BoundaryParams, Sheet};
use integrator_reach::harness::{
    bang_bang_schedule, boundary_polygon, containment_audit, mc_volume, mc_volume_joint,
    random_cloud, random_unit, shoelace_area, simulate_endpoint, DirectionPlan, InputSchedule,
};
use integrator_reach::implicit::{hankel_residual, hankel_scale, implicit_poly, line_intersections};
use integrator_reach::support::{support, supporting_point};
use integrator_reach::{BlockSpec, ReachError, SystemSpec};
use rand::Rng;

#[test]
fn a1_golden_quartic() {
    let start = Instant::now();
    let s = implicit_poly(3).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let p = &s.poly;
    let coeff = |e: &[u32]| p.coeff(e).to_string();
    let terms_ok = p.len() == 3
        && coeff(&[0, 0, 4]) == "1"
        && coeff(&[1, 0, 1]) == "-4"
        && coeff(&[0, 2, 0]) == "3";
    let pass = terms_ok && elapsed < 1.0;
    report(
        "1 golden implicitization",
        pass,
        &format!("{p} in {elapsed:.3} s"),
    );
    assert!(pass);
}

#[test]
fn a2_degree_formula() {
    let start = Instant::now();
    let mut bad = Vec::new();
    for r in 1..=8usize {
        let f = (r - 1) / 2;
        let expected = (f + 1) * (r - f);
        let got = implicit_poly(r).unwrap().poly.degree().unwrap() as usize;
        if got != expected {
            bad.push(format!("r={r}: {got} != {expected}"));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = bad.is_empty() && elapsed < 30.0;
    report(
        "2 degree formula",
        pass,
        &format!("r=1..8 in {elapsed:.2} s; mismatches {bad:?}"),
    );
    assert!(pass);
}

#[test]
fn a3_hankel_vanishes_on_both_sheets() {
    let start = Instant::now();
    let mut g = rng(3);
    let mut worst = 0.0f64;
    for r in 2..=5 {
        for sheet in Sheet::BOTH {
            for _ in 0..1000 {
                let b = random_block(&mut g, r);
                let t = g.random_range(0.2..3.0);
                let s = random_switches(&mut g, r - 1, t);
                let x = boundary_point(&b, &BoundaryParams::new(sheet, s), t)
                    .unwrap()
                    .x;
                let res = hankel_residual(&b, &x, sheet, t).unwrap();
                let scale = hankel_scale(&b, &x, sheet, t).unwrap();
                worst = worst.max(res.abs() / scale);
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-8 && elapsed < 60.0;
    report(
        "3 Hankel vanishing",
        pass,
        &format!("max relative residual {worst:.3e} in {elapsed:.2} s"),
    );
    assert!(pass);
}

#[test]
fn a4_duality_identity() {
    let mut g = rng(4);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let spec = random_spec(&mut g, 5);
        let y: Vec<f64> = (0..spec.d()).map(|_| g.random_range(-2.0..2.0)).collect();
        let h = support(&spec, &y).unwrap();
        let x = supporting_point(&spec, &y).unwrap();
        let dot: f64 = y.iter().zip(&x).map(|(a, b)| a * b).sum();
        worst = worst.max((dot - h).abs() / (1.0 + h.abs()));
    }
    let pass = worst <= 1e-10;
    report(
        "4 duality identity",
        pass,
        &format!("max |<y,x*> - h| / (1 + |h|) = {worst:.3e}"),
    );
    assert!(pass);
}

#[test]
fn a5_parametric_matches_trajectory() {
    let mut g = rng(5);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let spec = random_spec(&mut g, 5);
        let params: Vec<BoundaryParams> = spec
            .blocks
            .iter()
            .map(|b| {
                let sheet = if g.random::<bool>() {
                    Sheet::Plus
                } else {
                    Sheet::Minus
                };
                BoundaryParams::new(sheet, random_switches(&mut g, b.r - 1, spec.t))
            })
            .collect();
        let mut x = Vec::new();
        for (b, p) in spec.blocks.iter().zip(&params) {
            x.extend(boundary_point(b, p, spec.t).unwrap().x);
        }
        let sched = bang_bang_schedule(&spec, &params).unwrap();
        let sim = simulate_endpoint(&spec, &sched).unwrap();
        for (a, b) in x.iter().zip(&sim) {
            worst = worst.max((a - b).abs());
        }
    }
    let pass = worst <= 1e-12;
    report(
        "5 parametric/oracle equivalence",
        pass,
        &format!("max abs difference {worst:.3e}"),
    );
    assert!(pass);
}

#[test]
fn a6_input_set_non_uniqueness() {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut pass = true;
    for side in ["left", "right"] {
        let l2 = load_figure(&format!("fig4_{side}_l2.json"));
        let linf = load_figure(&format!("fig4_{side}_linf.json"));
        let mut g = rng(6);
        let mut differ = 0;
        for _ in 0..10_000 {
            let y = random_unit(l2.d(), &mut g);
            let (a, b) = (support(&l2, &y).unwrap(), support(&linf, &y).unwrap());
            if a.to_bits() != b.to_bits() {
                differ += 1;
            }
        }
        let mut violations = Vec::new();
        for spec in [&l2, &linf] {
            let u = spec.input_set.clone().unwrap();
            let cloud = random_cloud(spec, &u, 4, 10_000, 64).unwrap();
            let rep = containment_audit(&cloud, spec, &DirectionPlan::Optimized, 1e-9).unwrap();
            violations.push(rep.n_violations);
        }
        pass &= differ == 0 && violations.iter().all(|v| *v == 0);
        lines.push(format!(
            "{side}: {differ} differing supports, violations l2/linf {violations:?}"
        ));
    }
    let elapsed = start.elapsed().as_secs_f64();
    pass &= elapsed < 60.0;
    report(
        "6 Fig. 4 non-uniqueness",
        pass,
        &format!("{}; {elapsed:.1} s", lines.join("; ")),
    );
    assert!(pass);
}

/// Endpoint of a four-segment input with values in the middle half of the
/// block's range, hence an interior point.
fn interior_point<R: Rng>(g: &mut R, spec: &SystemSpec) -> Vec<f64> {
    let b = &spec.blocks[0];
    let values = (0..4)
        .map(|_| vec![b.nu + b.mu * g.random_range(-0.5..0.5)])
        .collect();
    simulate_endpoint(spec, &InputSchedule::uniform(values, spec.t)).unwrap()
}

fn line_counts(spec: &SystemSpec, seed: u64) -> (BTreeMap<usize, usize>, usize) {
    let b: &BlockSpec = &spec.blocks[0];
    let mut g = rng(seed);
    let mut hist = BTreeMap::new();
    let mut redrawn = 0;
    let mut accepted = 0;
    while accepted < 100 {
        let p0 = interior_point(&mut g, spec);
        let v = random_unit(b.r, &mut g);
        match line_intersections(b, &p0, &v, spec.t) {
            Ok(li) if li.generic => {
                *hist.entry(li.total).or_insert(0) += 1;
                accepted += 1;
            }
            Ok(_) | Err(ReachError::NonGenericLine) => redrawn += 1,
            Err(e) => panic!("{e}"),
        }
    }
    (hist, redrawn)
}

#[test]
fn a7_rigid_convexity_counts() {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, expected) in [("fig6a.json", 4), ("fig6b.json", 6)] {
        let spec = load_figure(name);
        let (hist, redrawn) = line_counts(&spec, 7);
        let ok = hist.len() == 1 && hist.contains_key(&expected);
        pass &= ok;
        parts.push(format!(
            "r={}: totals {hist:?} (expected all {expected}), {redrawn} redrawn",
            spec.blocks[0].r
        ));
    }
    report("7 rigid-convexity counts", pass, &parts.join("; "));
    assert!(pass, "{}", parts.join("; "));
}

#[test]
fn a8_volume_cross_check() {
    let b = BlockSpec::new(2, vec![0.0, 0.0], -1.0, 1.0).unwrap();
    let spec = SystemSpec::from_blocks(vec![b.clone()], 2.0).unwrap();
    let mc = mc_volume(&spec, 1_000_000, 8);
    let v = &mc.blocks[0];
    let area = shoelace_area(&boundary_polygon(&b, 2.0, 10_000).unwrap());
    let z_area = (v.volume - area).abs() / v.std_error;

    let two = SystemSpec::from_blocks(
        vec![b, BlockSpec::new(2, vec![0.5, -0.5], -1.0, 2.0).unwrap()],
        1.5,
    )
    .unwrap();
    let product = mc_volume(&two, 1_000_000, 9);
    let joint = mc_volume_joint(&two, 1_000_000, 10);
    let combined = product.total_std_error.hypot(joint.std_error);
    let z_product = (product.total - joint.volume).abs() / combined;

    let pass = z_area <= 3.0 && z_product <= 3.0;
    report(
        "8 volume cross-check",
        pass,
        &format!(
            "MC {:.5} +- {:.5} vs shoelace {area:.5} ({z_area:.2} SE); product {:.5} vs joint {:.5} ({z_product:.2} SE)",
            v.volume, v.std_error, product.total, joint.volume
        ),
    );
    assert!(pass);
}

fn parse_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn a9_fig1_boundary_golden() {
    let spec = common::figure("fig1.json");
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = integrator_reach::cli::run_with(
        [
            "intreach",
            "boundary",
            "--spec",
            spec.to_str().unwrap(),
            "--grid",
            "101",
        ],
        &mut out,
        &mut err,
    );
    assert_eq!(code, 0, "{}", String::from_utf8_lossy(&err));
    let got = parse_rows(&String::from_utf8(out).unwrap());
    let want = parse_rows(&std::fs::read_to_string(common::golden("fig1_boundary.csv")).unwrap());
    let mut worst = 0.0f64;
    let mut shape_ok = got.len() == want.len();
    for (g, w) in got.iter().zip(&want) {
        shape_ok &= g.len() == w.len() && g[0] == w[0] && g[1] == w[1];
        for (a, b) in g[2..].iter().zip(&w[2..]) {
            let (a, b): (f64, f64) = (a.parse().unwrap(), b.parse().unwrap());
            worst = worst.max((a - b).abs());
        }
    }
    let pass = shape_ok && worst <= 1e-12;
    report(
        "9 Fig. 1 boundary golden",
        pass,
        &format!("{} rows, max abs difference {worst:.3e}", got.len()),
    );
    assert!(pass);
}
