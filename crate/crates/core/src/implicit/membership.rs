//! Point classification by support duality.
//!
//! `x_j` lies in block `j`'s reach set iff `g(y) = h_j(y) - <y, x_j>` is
//! non-negative for every unit `y`, and the minimum of `g` over the unit
//! sphere is the signed distance to the boundary (positive inside). The
//! minimum is located by a coarse sweep of the sphere followed by Riemannian
//! gradient descent, using `grad h_j(y) = supporting_point(y)`, and a Newton
//! polish with the Hessian of `h_j`. For order 3 and above, local minima over
//! a grid of switching times add seeds, and near-boundary results are refined
//! once more in switching-time coordinates.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::boundary::{
    boundary_point, direction_from_params, grid_node, ordered_tuples, BoundaryParams, Sheet,
};
use crate::error::Result;
use crate::model::{BlockSpec, SystemSpec};
use crate::poly::real_roots_in;
use crate::support::{
    center, direction_poly, support_block, supporting_point_block, xi,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Inside,
    Boundary,
    Outside,
}

impl Status {
    fn from_margin(margin: f64, tol: f64) -> Status {
        if margin > tol {
            Status::Inside
        } else if margin < -tol {
            Status::Outside
        } else {
            Status::Boundary
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MembershipOptions {
    /// Boundary band half-width; `None` selects `1e-7 (1 + |x|)`.
    pub tol: Option<f64>,
    /// Sweep directions for blocks of order >= 3; 0 selects `48 r`.
    pub sweep: usize,
    pub seed: u64,
}

impl Default for MembershipOptions {
    fn default() -> Self {
        MembershipOptions {
            tol: None,
            sweep: 0,
            seed: 0x5eed,
        }
    }
}

impl MembershipOptions {
    pub fn with_tol(tol: f64) -> Self {
        MembershipOptions {
            tol: Some(tol),
            ..Self::default()
        }
    }

    pub fn tol_for(&self, x: &[f64]) -> f64 {
        self.tol.unwrap_or_else(|| 1e-7 * (1.0 + norm(x)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockVerdict {
    pub status: Status,
    /// Smallest `g` found; the signed distance to the block boundary.
    pub margin: f64,
    /// Unit direction attaining `margin`.
    pub direction: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipReport {
    pub overall: Status,
    pub tol: f64,
    pub blocks: Vec<BlockVerdict>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let n = norm(&v);
    v.iter_mut().for_each(|a| *a /= n);
    v
}

/// Riemannian gradient descent on the unit sphere with Armijo backtracking.
/// `f` returns the value and the Euclidean gradient.
fn sphere_descent<F>(f: F, start: &[f64], iters: usize) -> (f64, Vec<f64>)
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let mut z = normalized(start.to_vec());
    let (mut fz, mut gz) = f(&z);
    let mut step = f64::NAN;
    for _ in 0..iters {
        let along = dot(&gz, &z);
        let gt: Vec<f64> = gz.iter().zip(&z).map(|(g, zi)| g - along * zi).collect();
        let gn2 = dot(&gt, &gt);
        if gn2 == 0.0 || !gn2.is_finite() {
            break;
        }
        if step.is_nan() {
            step = 0.25 / gn2.sqrt();
        }
        let mut accepted = false;
        for _ in 0..60 {
            let cand = normalized(z.iter().zip(&gt).map(|(zi, g)| zi - step * g).collect());
            let (fc, gc) = f(&cand);
            if fc <= fz - 1e-4 * step * gn2 {
                z = cand;
                fz = fc;
                gz = gc;
                step *= 2.0;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (fz, z)
}

/// Newton model Hessian of `h_j` at `y`: `2 mu sum_q xi(s_q) xi(s_q)^T /
/// |p'(s_q)|` over the sign changes `s_q` of `p(s) = <y, xi(s)>`. Roots up to
/// `t / 10` outside `[0, t]` are included too: the true Hessian jumps when a
/// root enters the interval, and a model that anticipates the jump stops
/// Newton from oscillating across it.
fn support_hessian(b: &BlockSpec, y: &[f64], t: f64) -> Vec<Vec<f64>> {
    let r = b.r;
    let p = direction_poly(y);
    let dp = p.derivative();
    let mut hess = vec![vec![0.0; r]; r];
    let pad = 0.1 * t;
    for s in real_roots_in(&p, -pad, t + pad, 0.0).sign_changes() {
        let slope = dp.eval(s).abs();
        if slope == 0.0 {
            continue;
        }
        let v = xi(r, s);
        let k = 2.0 * b.mu / slope;
        for i in 0..r {
            for j in 0..r {
                hess[i][j] += k * v[i] * v[j];
            }
        }
    }
    hess
}

/// Solves `a z = rhs` by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[piv][k] == 0.0 || !a[piv][k].is_finite() {
            return None;
        }
        a.swap(k, piv);
        rhs.swap(k, piv);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            rhs[i] -= f * rhs[k];
        }
    }
    let mut z = vec![0.0; n];
    for k in (0..n).rev() {
        let acc: f64 = (k + 1..n).map(|j| a[k][j] * z[j]).sum();
        z[k] = (rhs[k] - acc) / a[k][k];
    }
    Some(z)
}

/// Orthonormal basis of the tangent space of the unit sphere at `y`.
fn tangent_basis(y: &[f64]) -> Vec<Vec<f64>> {
    let r = y.len();
    let mut basis: Vec<Vec<f64>> = vec![y.to_vec()];
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&i, &j| y[i].abs().total_cmp(&y[j].abs()));
    for i in order {
        let mut e = vec![0.0; r];
        e[i] = 1.0;
        for q in &basis {
            let c = dot(&e, q);
            e.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
        }
        let n = norm(&e);
        if n > 1e-8 {
            basis.push(e.into_iter().map(|a| a / n).collect());
        }
        if basis.len() == r {
            break;
        }
    }
    basis.remove(0);
    basis
}

/// Riemannian Newton iterations on `g(y) = h_j(y) - <y, x>` over the sphere,
/// from a descent estimate, falling back to steepest descent where the
/// Newton step does not decrease `g`.
fn newton_polish(b: &BlockSpec, x: &[f64], t: f64, start: (f64, Vec<f64>)) -> (f64, Vec<f64>) {
    let g = |y: &[f64]| support_block(b, y, t) - dot(y, x);
    let (mut val, mut y) = start;
    for _ in 0..100 {
        let Ok(sp) = supporting_point_block(b, &y, t, 0) else {
            break;
        };
        let grad: Vec<f64> = sp.iter().zip(x).map(|(p, xi)| p - xi).collect();
        let along = dot(&grad, &y);
        let basis = tangent_basis(&y);
        let gt: Vec<f64> = basis.iter().map(|e| dot(e, &grad)).collect();
        if norm(&gt) <= 1e-15 * (1.0 + norm(&grad)) {
            break;
        }
        let hess = support_hessian(b, &y, t);
        let reduced: Vec<Vec<f64>> = basis
            .iter()
            .map(|ei| {
                let he: Vec<f64> = hess.iter().map(|row| dot(row, ei)).collect();
                basis
                    .iter()
                    .map(|ej| dot(&he, ej) - if std::ptr::eq(ei, ej) { along } else { 0.0 })
                    .collect()
            })
            .collect();
        let steepest: Vec<f64> = gt.iter().map(|v| -v).collect();
        let newton = solve(reduced, steepest.clone()).filter(|z| dot(z, &gt) < 0.0);
        // the Newton step first, then steepest descent; each capped at 0.5 rad
        let mut moved = false;
        for mut step in newton.into_iter().chain([steepest]) {
            let len = norm(&step);
            if len > 0.5 {
                step.iter_mut().for_each(|c| *c *= 0.5 / len);
            }
            let dir: Vec<f64> = (0..y.len())
                .map(|k| basis.iter().zip(&step).map(|(e, c)| c * e[k]).sum())
                .collect();
            let slope = dot(&step, &gt);
            let mut alpha = 1.0;
            for _ in 0..40 {
                let cand = normalized(y.iter().zip(&dir).map(|(a, d)| a + alpha * d).collect());
                let fc = g(&cand);
                if fc <= val + 1e-4 * alpha * slope && fc < val {
                    val = fc;
                    y = cand;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if moved {
                break;
            }
        }
        if !moved {
            break;
        }
    }
    (val, y)
}

fn sweep_directions(r: usize, opts: &MembershipOptions) -> Vec<Vec<f64>> {
    if r == 2 {
        return (0..64)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / 64.0;
                vec![a.cos(), a.sin()]
            })
            .collect();
    }
    let mut dirs = Vec::new();
    for i in 0..r {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; r];
            e[i] = s;
            dirs.push(e);
        }
    }
    let n = if opts.sweep == 0 { 48 * r } else { opts.sweep };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..n {
        let v: Vec<f64> = (0..r).map(|_| StandardNormal.sample(&mut rng)).collect();
        if norm(&v) > 0.0 {
            dirs.push(normalized(v));
        }
    }
    dirs
}

/// Largest grid size whose ordered `(r - 1)`-tuples number at most `cap`.
fn param_grid_size(r: usize, cap: usize) -> usize {
    let count = |n: usize| -> f64 {
        // C(n + r - 2, r - 1)
        (1..r).map(|i| (n + i - 1) as f64 / i as f64).product()
    };
    let mut n = 3;
    while count(n + 1) <= cap as f64 {
        n += 1;
    }
    n
}

/// Unit normals at the best `keep` local minima of `g` over a grid of
/// switching-time tuples on both sheets. At a boundary parameter the normal's
/// support value is `<normal, boundary point>`, so no support evaluation is
/// needed, and basins too narrow for a direction sweep stay resolved.
fn param_grid_seeds(b: &BlockSpec, x: &[f64], t: f64, keep: usize) -> Vec<GridSeed> {
    let n = param_grid_size(b.r, 400);
    let tuples = ordered_tuples(n, b.r - 1);
    let index: HashMap<&[usize], usize> = tuples
        .iter()
        .enumerate()
        .map(|(i, tup)| (tup.as_slice(), i))
        .collect();
    let mut found: Vec<GridSeed> = Vec::new();
    for sheet in Sheet::BOTH {
        let evals: Vec<Option<(f64, Vec<f64>, BoundaryParams)>> = tuples
            .iter()
            .map(|tup| {
                let s: Vec<f64> = tup.iter().map(|&i| grid_node(i, n, t)).collect();
                let params = BoundaryParams::new(sheet, s);
                let y = direction_from_params(&params);
                let ny = norm(&y);
                if ny == 0.0 || !ny.is_finite() {
                    return None;
                }
                let y: Vec<f64> = y.iter().map(|v| v / ny).collect();
                let bp = boundary_point(b, &params, t).ok()?.x;
                let gap: Vec<f64> = bp.iter().zip(x).map(|(p, xi)| p - xi).collect();
                Some((dot(&y, &gap), y, params))
            })
            .collect();
        for (i, tup) in tuples.iter().enumerate() {
            let Some((v, y, params)) = &evals[i] else {
                continue;
            };
            let mut is_min = true;
            'nb: for k in 0..tup.len() {
                for step in [-1i64, 1] {
                    let moved = tup[k] as i64 + step;
                    if moved < 0 || moved >= n as i64 {
                        continue;
                    }
                    let mut nb = tup.clone();
                    nb[k] = moved as usize;
                    if nb.windows(2).any(|w| w[0] > w[1]) {
                        continue;
                    }
                    if let Some(Some((nv, _, _))) = index.get(nb.as_slice()).map(|&j| &evals[j]) {
                        if nv < v {
                            is_min = false;
                            break 'nb;
                        }
                    }
                }
            }
            if is_min {
                found.push(GridSeed {
                    value: *v,
                    y: y.clone(),
                    params: params.clone(),
                });
            }
        }
    }
    found.sort_by(|a, b| a.value.total_cmp(&b.value));
    found.truncate(keep);
    found
}

struct GridSeed {
    value: f64,
    y: Vec<f64>,
    params: BoundaryParams,
}

/// `g` at the unit normal of the boundary point with switching times `s`,
/// or `None` where the normal vanishes.
fn normal_gap(b: &BlockSpec, x: &[f64], t: f64, sheet: Sheet, s: &[f64]) -> Option<(f64, Vec<f64>)> {
    let y = direction_from_params(&BoundaryParams::new(sheet, s.to_vec()));
    let ny = norm(&y);
    if ny == 0.0 || !ny.is_finite() {
        return None;
    }
    let y: Vec<f64> = y.iter().map(|v| v / ny).collect();
    Some((support_block(b, &y, t) - dot(&y, x), y))
}

/// Compass search over ordered switching times in `[0, t]`. Where switching
/// times nearly coincide the boundary has a ridge, the normal cone is wide and
/// the sphere minimizer converges slowly; in parameter space the same point
/// is an ordinary minimum of `g` along the normal.
fn param_polish(b: &BlockSpec, x: &[f64], t: f64, seed: &GridSeed) -> (f64, Vec<f64>) {
    let sheet = seed.params.sheet;
    let mut s = seed.params.s.clone();
    let Some(mut best) = normal_gap(b, x, t, sheet, &s) else {
        return (f64::INFINITY, Vec::new());
    };
    let mut step = t / param_grid_size(b.r, 400) as f64;
    while step > 1e-13 * t {
        let mut moved = false;
        for k in 0..s.len() {
            for dir in [-1.0, 1.0] {
                let mut c = s.clone();
                c[k] = (c[k] + dir * step).clamp(0.0, t);
                if c.windows(2).any(|w| w[0] > w[1]) {
                    continue;
                }
                if let Some(v) = normal_gap(b, x, t, sheet, &c) {
                    if v.0 < best.0 {
                        best = v;
                        s = c;
                        moved = true;
                    }
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    best
}

/// Signed distance of `x` to the boundary of block `b`'s reach set at time
/// `t`, and the unit direction realizing it.
pub fn block_margin(b: &BlockSpec, x: &[f64], t: f64, opts: &MembershipOptions) -> (f64, Vec<f64>) {
    let r = b.r;
    assert_eq!(x.len(), r, "state length");
    if b.is_degenerate() || t == 0.0 {
        let c = center(b, t);
        let diff: Vec<f64> = x.iter().zip(&c).map(|(a, cc)| a - cc).collect();
        let n = norm(&diff);
        if n == 0.0 {
            let mut e = vec![0.0; r];
            e[0] = 1.0;
            return (0.0, e);
        }
        return (-n, normalized(diff));
    }
    if r == 1 {
        let up = support_block(b, &[1.0], t) - x[0];
        let down = support_block(b, &[-1.0], t) + x[0];
        return if up <= down {
            (up, vec![1.0])
        } else {
            (down, vec![-1.0])
        };
    }

    let g = |y: &[f64]| -> (f64, Vec<f64>) {
        let val = support_block(b, y, t) - dot(y, x);
        let sp = supporting_point_block(b, y, t, 0).expect("unit direction");
        (val, sp.iter().zip(x).map(|(p, xi)| p - xi).collect())
    };
    // coordinates scaled by the typical extent t^n/n! of each component
    let w: Vec<f64> = (1..=r)
        .map(|k| {
            let n = (r - k + 1) as i32;
            t.powi(n) / crate::poly::factorial(n as usize)
        })
        .collect();
    let to_y = |z: &[f64]| -> Vec<f64> { z.iter().zip(&w).map(|(zi, wi)| zi / wi).collect() };
    let gz = |z: &[f64]| -> (f64, Vec<f64>) {
        let (val, grad) = g(&to_y(z));
        (val, grad.iter().zip(&w).map(|(gi, wi)| gi / wi).collect())
    };

    let dirs = sweep_directions(r, opts);
    let vals: Vec<f64> = dirs.iter().map(|z| gz(z).0).collect();
    let mut order: Vec<usize> = if r == 2 {
        let n = dirs.len();
        (0..n)
            .filter(|&i| vals[i] <= vals[(i + n - 1) % n] && vals[i] <= vals[(i + 1) % n])
            .collect()
    } else {
        (0..dirs.len()).collect()
    };
    order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    order.truncate(if r == 2 { 4 } else { 2 });
    let mut seeds: Vec<Vec<f64>> = order.iter().map(|&i| dirs[i].clone()).collect();
    let grid = if r >= 3 {
        param_grid_seeds(b, x, t, 6)
    } else {
        Vec::new()
    };
    for gs in &grid {
        seeds.push(gs.y.iter().zip(&w).map(|(yi, wi)| yi * wi).collect());
    }

    let mut best = (f64::INFINITY, Vec::new());
    for seed in &seeds {
        let (_, z) = sphere_descent(gz, seed, 200);
        let (val, y) = newton_polish(b, x, t, sphere_descent(g, &to_y(&z), 200));
        if val < best.0 {
            best = (val, y);
        }
    }
    // only a near-boundary verdict can change
    if best.0.abs() <= 1e-4 * (1.0 + norm(x)) {
        for gs in &grid {
            let cand = param_polish(b, x, t, gs);
            if cand.0 < best.0 {
                best = cand;
            }
        }
    }
    best
}

/// Classifies `x` against every block of `spec` at the spec's horizon.
pub fn membership(
    spec: &SystemSpec,
    x: &[f64],
    opts: &MembershipOptions,
) -> Result<MembershipReport> {
    spec.check_len(x)?;
    let tol = opts.tol_for(x);
    let blocks: Vec<BlockVerdict> = spec
        .blocks
        .iter()
        .zip(spec.block_views(x))
        .map(|(b, xj)| {
            let (margin, direction) = block_margin(b, xj, spec.t, opts);
            BlockVerdict {
                status: Status::from_margin(margin, tol),
                margin,
                direction,
            }
        })
        .collect();
    let overall = if blocks.iter().any(|v| v.status == Status::Outside) {
        Status::Outside
    } else if blocks.iter().any(|v| v.status == Status::Boundary) {
        Status::Boundary
    } else {
        Status::Inside
    };
    Ok(MembershipReport {
        overall,
        tol,
        blocks,
    })
}

/// Fast containment test with slack `tol`. Orders 1 and 2 use the explicit
/// description of the set; higher orders fall back to [`block_margin`].
pub fn block_contains(b: &BlockSpec, x: &[f64], t: f64, tol: f64) -> bool {
    if b.is_degenerate() || b.r > 2 {
        return block_margin(b, x, t, &MembershipOptions::default()).0 >= -tol;
    }
    let c = center(b, t);
    if b.r == 1 {
        return (x[0] - c[0]).abs() <= b.mu * t + tol;
    }
    // centred and scaled to mu = 1: velocity v = int u, position p = int s u
    let p = (x[0] - c[0]) / b.mu;
    let v = (x[1] - c[1]) / b.mu;
    let slack = tol / b.mu;
    if v.abs() > t + slack {
        return false;
    }
    // largest position for velocity v: u = -1 on [0, s1] to go, +1 after
    let p_max = |v: f64| {
        let s1 = (0.5 * (t - v)).clamp(0.0, t);
        0.5 * t * t - s1 * s1
    };
    p <= p_max(v) + slack && p >= -p_max(-v) - slack
}
