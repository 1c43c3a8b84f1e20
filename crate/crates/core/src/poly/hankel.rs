use num_rational::BigRational;

use super::{Coefficient, ExactRing, MultiPoly, SeriesCoeffs};
use crate::error::{ReachError, Result};

/// Scalars with a determinant routine.
pub trait Determinant: Coefficient {
    fn determinant(matrix: Vec<Vec<Self>>) -> Result<Self>;
}

impl Determinant for f64 {
    /// LU with partial pivoting.
    fn determinant(mut m: Vec<Vec<f64>>) -> Result<f64> {
        let n = m.len();
        let mut det = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))
                .unwrap();
            if m[p][k] == 0.0 {
                return Ok(0.0);
            }
            if p != k {
                m.swap(p, k);
                det = -det;
            }
            det *= m[k][k];
            for i in k + 1..n {
                let f = m[i][k] / m[k][k];
                for j in k + 1..n {
                    m[i][j] -= f * m[k][j];
                }
            }
        }
        Ok(det)
    }
}

impl Determinant for BigRational {
    fn determinant(matrix: Vec<Vec<Self>>) -> Result<Self> {
        bareiss(matrix)
    }
}

impl Determinant for MultiPoly {
    fn determinant(matrix: Vec<Vec<Self>>) -> Result<Self> {
        bareiss(matrix)
    }
}

/// Fraction-free Gaussian elimination; every division is exact.
fn bareiss<T: ExactRing>(mut m: Vec<Vec<T>>) -> Result<T> {
    let n = m.len();
    assert!(n > 0 && m.iter().all(|row| row.len() == n), "square matrix");
    let mut negate = false;
    let mut prev = m[0][0].one_like();
    for k in 0..n - 1 {
        if m[k][k].is_zero_value() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero_value()) {
                Some(i) => {
                    m.swap(i, k);
                    negate = !negate;
                }
                None => return Ok(m[0][0].zero_like()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[i][j]
                    .mul_ref(&m[k][k])
                    .sub_ref(&m[i][k].mul_ref(&m[k][j]));
                m[i][j] = num.exact_div(&prev)?;
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if negate { det.neg_ref() } else { det })
}

/// Determinant of the `size x size` Hankel matrix `H[i][j] = a[start + i + j]`.
pub fn hankel_det<T: Determinant>(
    series: &SeriesCoeffs<T>,
    start: usize,
    size: usize,
) -> Result<T> {
    assert!(size >= 1, "Hankel size must be positive");
    let needed = start + 2 * (size - 1);
    if needed >= series.a.len() {
        return Err(ReachError::SeriesTooShort {
            needed,
            available: series.order(),
        });
    }
    let matrix = (0..size)
        .map(|i| (0..size).map(|j| series.a[start + i + j].clone()).collect())
        .collect();
    T::determinant(matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::series_exp;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_windows() {
        let s = SeriesCoeffs { a: vec![1.0, 5.0] };
        assert_eq!(hankel_det(&s, 1, 1).unwrap(), 5.0);
        let g = SeriesCoeffs {
            a: vec![1.0, 2.0, 4.0, 8.0],
        };
        assert_eq!(hankel_det(&g, 1, 2).unwrap(), 0.0);
        assert!(matches!(
            hankel_det(&g, 1, 3),
            Err(ReachError::SeriesTooShort { .. })
        ));
    }

    #[test]
    fn bareiss_matches_pivoted_float() {
        let rows = [[2, 0, 1, 3], [0, 0, 5, 1], [4, 1, -2, 0], [1, 7, 0, 2]];
        let exact: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| q(v, 1)).collect())
            .collect();
        let float: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| v as f64).collect())
            .collect();
        let de = BigRational::determinant(exact).unwrap();
        let df = f64::determinant(float).unwrap();
        assert_eq!(de, q(df.round() as i64, 1));
        assert_eq!(de, q(-370, 1));
    }

    #[test]
    fn symbolic_two_by_two() {
        let vars = MultiPoly::numbered_vars("l", 3);
        let l: Vec<MultiPoly> = (0..3).map(|i| MultiPoly::var(vars.clone(), i)).collect();
        let s = series_exp(&l, 3);
        let det = hankel_det(&s, 1, 2).unwrap();
        let expected = &(&s.a[1] * &s.a[3]) - &(&s.a[2] * &s.a[2]);
        assert_eq!(det, expected);
        let (norm, _) = det.normalize();
        assert_eq!(norm.to_string(), "l1^4 - 4*l1*l3 + 3*l2^2");
    }
}
