//! Closed-form support function of the reach set and its supporting points.
//!
//! For block `j` with time-to-go variable `s`, the input enters through
//! `xi(s) = (s^{r-1}/(r-1)!, ..., s, 1)` and
//!
//! ```text
//! h_j(y) = <y, e^{tA} x0 + nu zeta(0, t)> + mu * int_0^t |<y, xi(s)>| ds
//! ```
//!
//! The integrand is a polynomial of degree `r - 1` in `s`, so the integral is
//! evaluated exactly between its sign changes. The whole-system support
//! function is the sum over blocks.

use crate::error::{ReachError, Result};
use crate::model::{BlockSpec, SystemSpec};
use crate::poly::{factorial, integrate_abs, real_roots_in, UniPoly};

/// `xi(s)` for a chain of length `r`: entry `k` (1-based) is `s^{r-k}/(r-k)!`.
pub fn xi(r: usize, s: f64) -> Vec<f64> {
    (1..=r)
        .map(|k| s.powi((r - k) as i32) / factorial(r - k))
        .collect()
}

/// `int_{t1}^{t2} xi(s) ds`: entry `k` is `(t2^n - t1^n)/n!` with `n = r-k+1`.
pub fn zeta(r: usize, t1: f64, t2: f64) -> Vec<f64> {
    (1..=r)
        .map(|k| {
            let n = r - k + 1;
            (t2.powi(n as i32) - t1.powi(n as i32)) / factorial(n)
        })
        .collect()
}

/// `e^{tA_j} x0`, using the upper-triangular entries `t^{l-k}/(l-k)!`.
pub fn drift(b: &BlockSpec, t: f64) -> Vec<f64> {
    (0..b.r)
        .map(|k| {
            (k..b.r)
                .map(|l| t.powi((l - k) as i32) / factorial(l - k) * b.x0[l])
                .sum()
        })
        .collect()
}

/// Centre of symmetry of the block reach set: endpoint of `u = nu`.
pub fn center(b: &BlockSpec, t: f64) -> Vec<f64> {
    drift(b, t)
        .iter()
        .zip(zeta(b.r, 0.0, t))
        .map(|(d, z)| d + b.nu * z)
        .collect()
}

/// `<y, xi(s)>` as a polynomial in `s`.
pub fn direction_poly(y: &[f64]) -> UniPoly {
    let r = y.len();
    UniPoly::new((0..r).map(|i| y[r - 1 - i] / factorial(i)).collect())
}

/// Inverse of [`direction_poly`]: the direction whose polynomial is `p`.
pub fn direction_from_poly(p: &UniPoly, r: usize) -> Vec<f64> {
    let c = p.coeffs();
    (0..r)
        .map(|k| {
            let i = r - 1 - k;
            c.get(i).copied().unwrap_or(0.0) * factorial(i)
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Support function of one block's reach set.
pub fn support_block(b: &BlockSpec, y: &[f64], t: f64) -> f64 {
    assert_eq!(y.len(), b.r, "direction length");
    let offset = dot(y, &center(b, t));
    if b.mu == 0.0 {
        return offset;
    }
    offset + b.mu * integrate_abs(&direction_poly(y), 0.0, t)
}

/// Support function of the whole reach set, `sum_j h_j(y_j)`.
pub fn support(spec: &SystemSpec, y: &[f64]) -> Result<f64> {
    spec.check_len(y)?;
    Ok(spec
        .blocks
        .iter()
        .zip(spec.block_views(y))
        .map(|(b, yj)| support_block(b, yj, spec.t))
        .sum())
}

/// Time-to-go intervals on which `<y, xi(s)>` keeps a sign, with that sign
/// (`true` for `>= 0`).
pub fn sign_segments(p: &UniPoly, t: f64) -> Vec<(f64, f64, bool)> {
    let mut cuts: Vec<f64> = real_roots_in(p, 0.0, t, 0.0)
        .sign_changes()
        .filter(|&s| s > 0.0 && s < t)
        .collect();
    cuts.insert(0, 0.0);
    cuts.push(t);
    cuts.windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            // the sample of largest magnitude carries the sign; a single
            // midpoint can sit on a near-double root where p rounds to 0
            let v = [0.1, 0.3, 0.5, 0.7, 0.9]
                .map(|f| p.eval(w[0] + f * (w[1] - w[0])))
                .into_iter()
                .max_by(|a, b| a.abs().total_cmp(&b.abs()))
                .unwrap_or(0.0);
            (w[0], w[1], v >= 0.0)
        })
        .collect()
}

/// Maximizer of `<y, x>` over the block reach set: the endpoint of the
/// bang-bang input `u = beta` where `<y, xi(s)> >= 0`, `u = alpha` elsewhere.
///
/// `block` only labels the error when `y = 0`.
pub fn supporting_point_block(b: &BlockSpec, y: &[f64], t: f64, block: usize) -> Result<Vec<f64>> {
    assert_eq!(y.len(), b.r, "direction length");
    let p = direction_poly(y);
    if p.is_zero() {
        return Err(ReachError::FaceNotVertex(block));
    }
    let mut x = drift(b, t);
    for (s0, s1, positive) in sign_segments(&p, t) {
        let u = if positive { b.beta } else { b.alpha };
        for (xk, zk) in x.iter_mut().zip(zeta(b.r, s0, s1)) {
            *xk += u * zk;
        }
    }
    Ok(x)
}

/// Supporting point on the boundary of the whole reach set for direction `y`.
pub fn supporting_point(spec: &SystemSpec, y: &[f64]) -> Result<Vec<f64>> {
    spec.check_len(y)?;
    let mut out = Vec::with_capacity(spec.d());
    for (j, (b, yj)) in spec.blocks.iter().zip(spec.block_views(y)).enumerate() {
        out.extend(supporting_point_block(b, yj, spec.t, j)?);
    }
    Ok(out)
}
