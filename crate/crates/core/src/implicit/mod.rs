//! Algebraic description of the bounding sheets.
//!
//! On the plus sheet the shifted, scaled coordinates
//!
//! ```text
//! rho_k = n!/(2 mu) (x_k - c_k) - (-1)^{r-1} t^n / 2,   n = r - k + 1
//! ```
//!
//! (`c` the centre of symmetry) equal the alternating power sums
//! `sum_q (-1)^{q+1} s_q^n` of the switching times. Feeding `lambda(k) =
//! rho_{r-k+1}` into `exp(-sum lambda(k)/k tau^k)` gives a series whose
//! coefficients are those of a rational function of low degree, so a Hankel
//! determinant of its coefficients vanishes. That determinant, as a polynomial
//! in `rho`, cuts out the sheet.
//!
//! The minus sheet is the reflection of the plus sheet through `c`, so its
//! coordinates are `rho^-(x) = rho^+(2c - x)`.

mod lines;
mod membership;

pub use lines::{line_intersections, LineIntersections};
pub use membership::{
    block_contains, block_margin, membership, BlockVerdict, MembershipOptions, MembershipReport,
    Status,
};

use std::sync::OnceLock;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::boundary::Sheet;
use crate::error::{ReachError, Result};
use crate::model::BlockSpec;
use crate::poly::{factorial, hankel_det, series_exp, MultiPoly};
use crate::support::center;

/// Largest block order with a symbolic surface.
pub const MAX_SYMBOLIC_ORDER: usize = 8;

/// `floor((r - 1) / 2)`.
pub fn delta(r: usize) -> usize {
    (r - 1) / 2
}

/// Degree of the bounding hypersurface, `(delta + 1)(r - delta)`.
pub fn expected_degree(r: usize) -> usize {
    let d = delta(r);
    (d + 1) * (r - d)
}

/// `(scale, offset)` with `rho_k = scale_k * x_k + offset_k` on `sheet`.
pub fn rho_affine(
    b: &BlockSpec,
    sheet: Sheet,
    t: f64,
    block: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if b.is_degenerate() {
        return Err(ReachError::DegenerateBlock(block));
    }
    let r = b.r;
    let c = center(b, t);
    let parity = if (r - 1) % 2 == 0 { 1.0 } else { -1.0 };
    let mut scale = Vec::with_capacity(r);
    let mut offset = Vec::with_capacity(r);
    for k in 1..=r {
        let n = r - k + 1;
        let sc = sheet.sign() * factorial(n) / (2.0 * b.mu);
        scale.push(sc);
        offset.push(-sc * c[k - 1] - 0.5 * parity * t.powi(n as i32));
    }
    Ok((scale, offset))
}

/// The rho coordinates of a block state on the given sheet.
pub fn rho_of_state(b: &BlockSpec, x: &[f64], sheet: Sheet, t: f64) -> Result<Vec<f64>> {
    assert_eq!(x.len(), b.r, "state length");
    let (scale, offset) = rho_affine(b, sheet, t, 0)?;
    Ok(x.iter()
        .zip(scale.iter().zip(&offset))
        .map(|(xk, (s, o))| s * xk + o)
        .collect())
}

/// `lambda(k) = rho_{r-k+1}` for `k = 1..=r`.
fn lambda_from_rho<T: Clone>(rho: &[T]) -> Vec<T> {
    rho.iter().rev().cloned().collect()
}

/// Hankel window start and size for order `r`.
fn window(r: usize) -> (usize, usize) {
    let d = delta(r);
    (r - 2 * d, d + 1)
}

/// The Hankel determinant as a function of rho, in any coefficient ring.
fn hankel_of_rho<T: crate::poly::Determinant>(rho: &[T]) -> Result<T> {
    let r = rho.len();
    let (start, size) = window(r);
    let series = series_exp(&lambda_from_rho(rho), r);
    hankel_det(&series, start, size)
}

/// Unnormalized Hankel determinant at `x` on `sheet`; zero on the sheet's
/// hypersurface.
pub fn hankel_residual(b: &BlockSpec, x: &[f64], sheet: Sheet, t: f64) -> Result<f64> {
    hankel_of_rho(&rho_of_state(b, x, sheet, t)?)
}

fn permanent(m: &[Vec<f64>]) -> f64 {
    fn rec(m: &[Vec<f64>], row: usize, used: &mut Vec<bool>) -> f64 {
        if row == m.len() {
            return 1.0;
        }
        let mut acc = 0.0;
        for j in 0..m.len() {
            if !used[j] {
                used[j] = true;
                acc += m[row][j] * rec(m, row + 1, used);
                used[j] = false;
            }
        }
        acc
    }
    rec(m, 0, &mut vec![false; m.len()])
}

/// Magnitude against which [`hankel_residual`] is judged: the determinant
/// expanded with every coefficient and every `rho` replaced by its absolute
/// value. Rounding error of the residual is a small multiple of machine
/// epsilon times this value.
pub fn hankel_scale(b: &BlockSpec, x: &[f64], sheet: Sheet, t: f64) -> Result<f64> {
    let rho = rho_of_state(b, x, sheet, t)?;
    let r = rho.len();
    let neg_abs: Vec<f64> = lambda_from_rho(&rho).iter().map(|v| -v.abs()).collect();
    let a = series_exp(&neg_abs, r).a;
    let (start, size) = window(r);
    let m: Vec<Vec<f64>> = (0..size)
        .map(|i| (0..size).map(|j| a[start + i + j]).collect())
        .collect();
    Ok(permanent(&m))
}

/// Normalized bounding hypersurface of an order-`r` block in rho space.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImplicitSurface {
    pub r: usize,
    pub delta: usize,
    #[serde(skip)]
    pub poly: MultiPoly,
    pub degree: usize,
    /// `k` with `poly = k * (Hankel determinant)`.
    #[serde(skip)]
    pub normalization: BigRational,
}

impl ImplicitSurface {
    /// Evaluates the normalized polynomial at numeric rho coordinates.
    pub fn eval(&self, rho: &[f64]) -> f64 {
        self.poly.eval_f64(rho)
    }

    pub fn normalization_f64(&self) -> f64 {
        crate::model::rational_to_f64(&self.normalization)
    }
}

fn build_surface(r: usize) -> Result<ImplicitSurface> {
    let vars = MultiPoly::numbered_vars("rho", r);
    let rho: Vec<MultiPoly> = (0..r).map(|i| MultiPoly::var(vars.clone(), i)).collect();
    let raw = hankel_of_rho(&rho)?;
    let (poly, normalization) = raw.normalize();
    let degree = poly.degree().unwrap_or(0) as usize;
    Ok(ImplicitSurface {
        r,
        delta: delta(r),
        poly,
        degree,
        normalization,
    })
}

/// Symbolic bounding hypersurface for `1 <= r <= 8`, in the variables
/// `rho1..rhor`. Results are cached per order.
pub fn implicit_poly(r: usize) -> Result<&'static ImplicitSurface> {
    static CACHE: [OnceLock<ImplicitSurface>; MAX_SYMBOLIC_ORDER] =
        [const { OnceLock::new() }; MAX_SYMBOLIC_ORDER];
    if r < 1 || r > MAX_SYMBOLIC_ORDER {
        return Err(ReachError::UnsupportedOrder(r));
    }
    let cell = &CACHE[r - 1];
    if let Some(s) = cell.get() {
        return Ok(s);
    }
    let s = build_surface(r)?;
    Ok(cell.get_or_init(|| s))
}

/// The sheet's hypersurface in the block's own state coordinates `x1..xr`,
/// with exact rational coefficients taken from the block's exact data and the
/// exact horizon. The result is normalized the same way as rho-space output.
pub fn state_space_poly(
    b: &BlockSpec,
    sheet: Sheet,
    t: &BigRational,
    block: usize,
) -> Result<MultiPoly> {
    let ex = &b.exact;
    let mu = ex.mu();
    if mu.is_zero() {
        return Err(ReachError::DegenerateBlock(block));
    }
    let nu = ex.nu();
    let r = b.r;
    let surface = implicit_poly(r)?;
    let vars = MultiPoly::numbered_vars("x", r);
    let fact = |n: usize| -> BigRational {
        BigRational::from_integer((1..=n as u64).product::<u64>().into())
    };
    let tpow = |n: usize| num_traits::pow(t.clone(), n);
    let two = BigRational::from_integer(2.into());
    let parity = if (r - 1) % 2 == 0 {
        BigRational::one()
    } else {
        -BigRational::one()
    };
    let sign = if sheet == Sheet::Plus {
        BigRational::one()
    } else {
        -BigRational::one()
    };
    let images: Vec<MultiPoly> = (1..=r)
        .map(|k| {
            let n = r - k + 1;
            let c_k = (k..=r).fold(BigRational::zero(), |acc, l| {
                acc + tpow(l - k) / fact(l - k) * &ex.x0[l - 1]
            }) + &nu * tpow(n) / fact(n);
            let sc = &sign * fact(n) / (&two * &mu);
            let off = -(&sc * &c_k) - &parity * tpow(n) / &two;
            &MultiPoly::var(vars.clone(), k - 1).scale(&sc)
                + &MultiPoly::constant(vars.clone(), off)
        })
        .collect();
    Ok(surface.poly.compose(&images).normalize().0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{boundary_point, BoundaryParams};

    fn block(r: usize) -> BlockSpec {
        BlockSpec::new(r, vec![0.0; r], -1.0, 1.0).unwrap()
    }

    #[test]
    fn rho_examples() {
        let b = block(2);
        let rho = rho_of_state(&b, &[-1.0, 0.0], Sheet::Plus, 2.0).unwrap();
        assert_eq!(rho, vec![1.0, 1.0]);
        let rho = rho_of_state(&b, &[2.0, 2.0], Sheet::Plus, 2.0).unwrap();
        assert_eq!(rho, vec![4.0, 2.0]);
        let flat = BlockSpec::new(2, vec![0.0; 2], 1.0, 1.0).unwrap();
        assert_eq!(
            rho_of_state(&flat, &[0.0, 0.0], Sheet::Plus, 1.0),
            Err(ReachError::DegenerateBlock(0))
        );
    }

    #[test]
    fn small_orders() {
        assert_eq!(implicit_poly(1).unwrap().poly.to_string(), "rho1");
        assert_eq!(implicit_poly(2).unwrap().poly.to_string(), "rho2^2 - rho1");
        let s3 = implicit_poly(3).unwrap();
        assert_eq!(s3.poly.to_string(), "rho3^4 - 4*rho1*rho3 + 3*rho2^2");
        assert_eq!(s3.degree, 4);
        assert_eq!(s3.delta, 1);
        assert!(implicit_poly(0).is_err());
        assert!(implicit_poly(9).is_err());
    }

    #[test]
    fn residual_vanishes_on_sheets() {
        for r in 1..=5 {
            let b = BlockSpec::new(r, (0..r).map(|i| 0.1 * i as f64).collect(), -0.5, 1.5).unwrap();
            let t = 1.7;
            let s: Vec<f64> = (1..r).map(|q| t * q as f64 / r as f64).collect();
            for sheet in Sheet::BOTH {
                let x = boundary_point(&b, &BoundaryParams::new(sheet, s.clone()), t)
                    .unwrap()
                    .x;
                let res = hankel_residual(&b, &x, sheet, t).unwrap();
                let scale = hankel_scale(&b, &x, sheet, t).unwrap();
                assert!(
                    res.abs() <= 1e-12 * scale,
                    "r={r} {sheet:?}: {res} vs {scale}"
                );
            }
        }
    }

    #[test]
    fn residual_off_sheet() {
        let b = block(2);
        let r = hankel_residual(&b, &[0.0, 0.5], Sheet::Plus, 2.0).unwrap();
        let rho = rho_of_state(&b, &[0.0, 0.5], Sheet::Plus, 2.0).unwrap();
        assert!((r - (rho[1] * rho[1] - rho[0]) / 2.0).abs() < 1e-15);
        assert!(r != 0.0);
    }

    #[test]
    fn symbolic_matches_numeric() {
        let b = BlockSpec::new(4, vec![0.3, -0.2, 0.1, 0.0], -2.0, 1.0).unwrap();
        let s = implicit_poly(4).unwrap();
        let x = [0.4, -0.7, 1.1, 0.2];
        for sheet in Sheet::BOTH {
            let rho = rho_of_state(&b, &x, sheet, 1.2).unwrap();
            let num = hankel_residual(&b, &x, sheet, 1.2).unwrap() * s.normalization_f64();
            let sym = s.eval(&rho);
            assert!(
                (num - sym).abs() <= 1e-10 * sym.abs().max(1e-300),
                "{num} {sym}"
            );
        }
    }

    #[test]
    fn state_space_double_integrator() {
        // plus sheet of x0 = 0, [-1, 1], t = 2: rho = (x1 + 2, x2/2 + 1)
        let b = block(2);
        let t = BigRational::from_integer(2.into());
        let p = state_space_poly(&b, Sheet::Plus, &t, 0).unwrap();
        assert_eq!(p.to_string(), "x2^2 - 4*x1 + 4*x2 - 4");
        assert_eq!(p.eval_f64(&[-1.0, 0.0]), 0.0);
    }
}
