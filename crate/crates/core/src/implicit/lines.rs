use serde::Serialize;

use super::{expected_degree, implicit_poly, rho_affine};
use crate::boundary::Sheet;
use crate::error::{ReachError, Result};
use crate::model::BlockSpec;
use crate::poly::{real_roots_all, MultiPoly, UniPoly};

/// Real intersections of a line with the two bounding hypersurfaces.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LineIntersections {
    /// Distinct real roots per sheet, plus sheet first.
    pub per_sheet: [usize; 2],
    pub total: usize,
    /// Line parameters `tau` of the intersections, per sheet.
    pub roots: [Vec<f64>; 2],
    /// Both restrictions keep full degree and have only well separated simple
    /// roots.
    pub generic: bool,
}

fn abs_coeffs(p: &MultiPoly) -> MultiPoly {
    let mut out = MultiPoly::zero(p.vars().to_vec());
    for (m, c) in p.terms() {
        out.add_term(m.clone(), num_traits::Signed::abs(c));
    }
    out
}

/// Restriction of the sheet's hypersurface to `tau -> p0 + tau v`, and the
/// same restriction with all signs dropped (a magnitude reference).
pub fn restrict_to_line(
    b: &BlockSpec,
    p0: &[f64],
    v: &[f64],
    sheet: Sheet,
    t: f64,
) -> Result<(UniPoly, UniPoly)> {
    let surface = implicit_poly(b.r)?;
    let (scale, offset) = rho_affine(b, sheet, t, 0)?;
    let images: Vec<UniPoly> = (0..b.r)
        .map(|k| UniPoly::linear(scale[k] * p0[k] + offset[k], scale[k] * v[k]))
        .collect();
    let abs_images: Vec<UniPoly> = images
        .iter()
        .map(|p| UniPoly::new(p.coeffs().iter().map(|c| c.abs()).collect()))
        .collect();
    Ok((
        surface.poly.compose_univariate(&images),
        abs_coeffs(&surface.poly).compose_univariate(&abs_images),
    ))
}

/// Counts distinct real intersections of the line `p0 + tau v` with each
/// sheet's hypersurface.
pub fn line_intersections(
    b: &BlockSpec,
    p0: &[f64],
    v: &[f64],
    t: f64,
) -> Result<LineIntersections> {
    assert_eq!(p0.len(), b.r, "point length");
    assert_eq!(v.len(), b.r, "direction length");
    if v.iter().all(|c| *c == 0.0) {
        return Err(ReachError::InvalidParams(
            "line direction must be nonzero".into(),
        ));
    }
    let degree = expected_degree(b.r);
    let mut per_sheet = [0; 2];
    let mut roots: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    let mut generic = true;
    for (i, sheet) in Sheet::BOTH.into_iter().enumerate() {
        let (p, magnitude) = restrict_to_line(b, p0, v, sheet, t)?;
        let size = magnitude.max_abs_coeff();
        if p.is_zero() || p.max_abs_coeff() <= 1e-13 * size {
            return Err(ReachError::NonGenericLine);
        }
        let lead = p.coeffs().get(degree).copied().unwrap_or(0.0);
        let lead_size = magnitude.coeffs().get(degree).copied().unwrap_or(0.0);
        if p.degree() != Some(degree) || lead.abs() <= 1e-10 * lead_size {
            generic = false;
        }
        let found = real_roots_all(&p);
        let rs = found.roots();
        if rs.iter().any(|r| r.multiplicity > 1) {
            generic = false;
        }
        for w in rs.windows(2) {
            if w[1].value - w[0].value <= 1e-7 * (1.0 + w[0].value.abs()) {
                generic = false;
            }
        }
        per_sheet[i] = rs.len();
        roots[i] = rs.iter().map(|r| r.value).collect();
    }
    Ok(LineIntersections {
        per_sheet,
        total: per_sheet[0] + per_sheet[1],
        roots,
        generic,
    })
}
