//! Parametric boundary of a block's reach set.
//!
//! Each block's boundary is glued from two sheets. A point on a sheet is the
//! endpoint of a bang-bang input with at most `r - 1` switches. The switches
//! sit at the time-to-go values `0 <= s_1 <= ... <= s_{r-1} <= t`. On the
//! plus sheet the input is `beta` on the first time-to-go segment `[0, s_1]`,
//! i.e. over the final stretch of real time, and alternates from there. The
//! minus sheet starts with `alpha`.
//!
//! Component `k` (1-based, `n = r - k + 1`) of the point is
//!
//! ```text
//! drift_k + nu t^n/n! +- mu/n! * ((-1)^{r-1} t^n + 2 sum_q (-1)^{q+1} s_q^n)
//! ```
//!
//! Sampling is uniform in parameter space, not in arc length, so the surface
//! density of [`sample_sheet`] output varies across the sheet.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ReachError, Result};
use crate::model::{BlockSpec, SystemSpec};
use crate::poly::{factorial, UniPoly};
use crate::support::{direction_from_poly, drift, zeta};

/// Which of the two bounding sheets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sheet {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sheet {
    pub const BOTH: [Sheet; 2] = [Sheet::Plus, Sheet::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Sheet::Plus => 1.0,
            Sheet::Minus => -1.0,
        }
    }

    /// `+1` or `-1`.
    pub fn as_int(self) -> i32 {
        match self {
            Sheet::Plus => 1,
            Sheet::Minus => -1,
        }
    }

    pub fn from_int(v: i64) -> Result<Sheet> {
        match v {
            1 => Ok(Sheet::Plus),
            -1 => Ok(Sheet::Minus),
            _ => Err(ReachError::InvalidParams(format!(
                "sheet must be +1 or -1, got {v}"
            ))),
        }
    }

    pub fn flip(self) -> Sheet {
        match self {
            Sheet::Plus => Sheet::Minus,
            Sheet::Minus => Sheet::Plus,
        }
    }
}

/// Sheet choice plus the ordered switching times (time-to-go).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryParams {
    pub sheet: Sheet,
    pub s: Vec<f64>,
}

impl BoundaryParams {
    pub fn new(sheet: Sheet, s: Vec<f64>) -> Self {
        BoundaryParams { sheet, s }
    }

    /// Requires `r - 1` values with `0 <= s_1 <= ... <= s_{r-1} <= t`.
    pub fn validate(&self, r: usize, t: f64) -> Result<()> {
        if self.s.len() + 1 != r {
            return Err(ReachError::InvalidParams(format!(
                "expected {} switching times for r = {r}, got {}",
                r - 1,
                self.s.len()
            )));
        }
        let mut prev = 0.0;
        for (q, &sq) in self.s.iter().enumerate() {
            if !sq.is_finite() || sq < prev || sq > t {
                return Err(ReachError::InvalidParams(format!(
                    "s_{} = {sq} breaks 0 <= s_1 <= ... <= t = {t}",
                    q + 1
                )));
            }
            prev = sq;
        }
        Ok(())
    }

    /// Input value on time-to-go segment `q` (0-based, `[s_q, s_{q+1}]`).
    pub fn segment_input(&self, b: &BlockSpec, q: usize) -> f64 {
        let positive = (self.sheet == Sheet::Plus) == (q % 2 == 0);
        if positive {
            b.beta
        } else {
            b.alpha
        }
    }
}

/// A boundary point of block `block`, with the parameters that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub block: usize,
    pub x: Vec<f64>,
    pub params: BoundaryParams,
}

/// Evaluates the sheet parameterization for one block. The returned point is
/// labelled block 0; callers working on a system relabel it.
pub fn boundary_point(b: &BlockSpec, p: &BoundaryParams, t: f64) -> Result<BoundaryPoint> {
    p.validate(b.r, t)?;
    let r = b.r;
    let sigma = p.sheet.sign();
    let base = drift(b, t);
    let odd_r = if (r - 1) % 2 == 0 { 1.0 } else { -1.0 };
    let x = (1..=r)
        .map(|k| {
            let n = (r - k + 1) as i32;
            let tn = t.powi(n);
            let alt: f64 =
                p.s.iter()
                    .enumerate()
                    .map(|(q, sq)| if q % 2 == 0 { sq.powi(n) } else { -sq.powi(n) })
                    .sum();
            let nf = factorial(n as usize);
            base[k - 1] + b.nu * tn / nf + sigma * b.mu * (odd_r * tn + 2.0 * alt) / nf
        })
        .collect();
    Ok(BoundaryPoint {
        block: 0,
        x,
        params: p.clone(),
    })
}

/// All non-decreasing index tuples of length `len` over `0..n`.
pub(crate) fn ordered_tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; len];
    if len == 0 {
        return vec![cur];
    }
    loop {
        out.push(cur.clone());
        // rightmost position that can still grow
        let Some(i) = (0..len).rev().find(|&i| cur[i] + 1 < n) else {
            break;
        };
        let v = cur[i] + 1;
        for c in &mut cur[i..] {
            *c = v;
        }
    }
    out
}

/// Grid node `i` of an `n`-point uniform grid on `[0, t]`.
pub(crate) fn grid_node(i: usize, n: usize, t: f64) -> f64 {
    if n <= 1 {
        0.0
    } else if i + 1 == n {
        t
    } else {
        t * i as f64 / (n - 1) as f64
    }
}

/// Boundary points at every ordered tuple drawn from an `n`-point grid of
/// `[0, t]`: `C(n + r - 2, r - 1)` points.
pub fn sample_sheet(b: &BlockSpec, sheet: Sheet, n: usize, t: f64) -> Result<Vec<BoundaryPoint>> {
    if n == 0 {
        return Err(ReachError::InvalidParams(
            "grid resolution must be >= 1".into(),
        ));
    }
    ordered_tuples(n, b.r - 1)
        .into_par_iter()
        .map(|idx| {
            let s = idx.iter().map(|&i| grid_node(i, n, t)).collect();
            boundary_point(b, &BoundaryParams::new(sheet, s), t)
        })
        .collect()
}

/// Both sheets of every block, labelled with their block index.
pub fn sample_system(spec: &SystemSpec, n: usize) -> Result<Vec<BoundaryPoint>> {
    let mut out = Vec::new();
    for (j, b) in spec.blocks.iter().enumerate() {
        for sheet in Sheet::BOTH {
            let mut pts = sample_sheet(b, sheet, n, spec.t)?;
            for p in &mut pts {
                p.block = j;
            }
            out.extend(pts);
        }
    }
    Ok(out)
}

/// Endpoints of the constant inputs `u = alpha` and `u = beta`, where the two
/// sheets meet.
pub fn sheet_seam_points(b: &BlockSpec, t: f64) -> (Vec<f64>, Vec<f64>) {
    let d = drift(b, t);
    let z = zeta(b.r, 0.0, t);
    let endpoint = |u: f64| d.iter().zip(&z).map(|(a, c)| a + u * c).collect();
    (endpoint(b.alpha), endpoint(b.beta))
}

/// Direction whose supporting point is `boundary_point(p)`.
///
/// `<y, xi(s)>` is `c * prod_q (s - s_q)` with the sign of `c` chosen so the
/// first time-to-go segment is positive on the plus sheet and negative on the
/// minus sheet.
pub fn direction_from_params(p: &BoundaryParams) -> Vec<f64> {
    let r = p.s.len() + 1;
    let lead_sign = if p.s.len() % 2 == 0 { 1.0 } else { -1.0 };
    let poly = UniPoly::from_roots(&p.s, p.sheet.sign() * lead_sign);
    direction_from_poly(&poly, r)
}
