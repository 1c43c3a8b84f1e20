use std::ops::{Add, Mul, Neg, Sub};

/// Dense real polynomial, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct UniPoly {
    coeffs: Vec<f64>,
}

/// A real root and its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub value: f64,
    pub multiplicity: usize,
}

impl Root {
    /// Odd multiplicity roots are the ones where the sign flips.
    pub fn changes_sign(&self) -> bool {
        self.multiplicity % 2 == 1
    }
}

/// Outcome of a root search.
#[derive(Clone, Debug, PartialEq)]
pub enum RootSet {
    Roots(Vec<Root>),
    /// The polynomial vanishes everywhere.
    IdenticallyZero,
}

impl RootSet {
    pub fn roots(&self) -> &[Root] {
        match self {
            RootSet::Roots(r) => r,
            RootSet::IdenticallyZero => &[],
        }
    }

    pub fn sign_changes(&self) -> impl Iterator<Item = f64> + '_ {
        self.roots()
            .iter()
            .filter(|r| r.changes_sign())
            .map(|r| r.value)
    }
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        UniPoly::new(vec![c])
    }

    /// `c0 + c1 x`.
    pub fn linear(c0: f64, c1: f64) -> Self {
        UniPoly::new(vec![c0, c1])
    }

    /// `lead * prod (x - r_i)`.
    pub fn from_roots(roots: &[f64], lead: f64) -> Self {
        roots.iter().fold(UniPoly::constant(lead), |acc, &r| {
            &acc * &UniPoly::linear(-r, 1.0)
        })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// `sum |c_i| |x|^i`, the natural scale for rounding error in `eval`.
    pub fn eval_abs(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * ax + c.abs())
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * i as f64)
                .collect(),
        )
    }

    /// Antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> UniPoly {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(0.0);
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c / (i + 1) as f64),
        );
        UniPoly::new(out)
    }

    pub fn scale(&self, k: f64) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn pow(&self, n: u32) -> UniPoly {
        (0..n).fold(UniPoly::constant(1.0), |acc, _| &acc * self)
    }

    /// Largest coefficient magnitude.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).copied().unwrap_or(0.0)
                        + rhs.coeffs.get(i).copied().unwrap_or(0.0)
                })
                .collect(),
        )
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        self + &(-rhs)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        self.scale(-1.0)
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }
}

fn default_tol(a: f64, b: f64) -> f64 {
    1e-12 * 1f64.max(a.abs()).max(b.abs())
}

fn near_zero(p: &UniPoly, x: f64) -> bool {
    let deg = p.degree().unwrap_or(0) as f64;
    p.eval(x).abs() <= 32.0 * (deg + 1.0) * f64::EPSILON * p.eval_abs(x)
}

/// All real roots of `p` in `[a, b]`, sorted, with multiplicities.
///
/// Roots are isolated recursively: the roots of `p'` split `[a, b]` into
/// monotone pieces, each holding at most one simple root, which is then found
/// by a safeguarded Newton iteration. A critical point where `p` vanishes is a
/// multiple root whose multiplicity is one more than its multiplicity in `p'`.
/// Roots within `tol` of an endpoint are snapped to it. `tol <= 0` selects
/// `1e-12 * max(1, |a|, |b|)`.
pub fn real_roots_in(p: &UniPoly, a: f64, b: f64, tol: f64) -> RootSet {
    if p.is_zero() {
        return RootSet::IdenticallyZero;
    }
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    let tol = if tol > 0.0 { tol } else { default_tol(a, b) };
    RootSet::Roots(isolate(p, a, b, tol))
}

/// All real roots of `p` on the whole line.
pub fn real_roots_all(p: &UniPoly) -> RootSet {
    let Some(n) = p.degree() else {
        return RootSet::IdenticallyZero;
    };
    if n == 0 {
        return RootSet::Roots(Vec::new());
    }
    let lead = p.leading();
    let bound = 1.0
        + p.coeffs[..n]
            .iter()
            .fold(0.0f64, |m, c| m.max((c / lead).abs()));
    real_roots_in(p, -bound, bound, 1e-12 * bound)
}

fn snap(x: f64, a: f64, b: f64, tol: f64) -> f64 {
    if (x - a).abs() <= tol {
        a
    } else if (x - b).abs() <= tol {
        b
    } else {
        x
    }
}

fn isolate(p: &UniPoly, a: f64, b: f64, tol: f64) -> Vec<Root> {
    match p.degree() {
        None | Some(0) => Vec::new(),
        Some(1) => {
            let x = snap(-p.coeffs[0] / p.coeffs[1], a, b, tol);
            if (a..=b).contains(&x) {
                vec![Root {
                    value: x,
                    multiplicity: 1,
                }]
            } else {
                Vec::new()
            }
        }
        Some(_) => {
            let crit = isolate(&p.derivative(), a, b, tol);
            // knots: (position, multiplicity as a root of p')
            let mut knots: Vec<(f64, usize)> = Vec::with_capacity(crit.len() + 2);
            knots.push((a, 0));
            for c in &crit {
                match knots.last_mut() {
                    Some(last) if last.0 == c.value => last.1 = c.multiplicity,
                    _ => knots.push((c.value, c.multiplicity)),
                }
            }
            match knots.last_mut() {
                Some(last) if last.0 == b => {}
                _ => knots.push((b, 0)),
            }

            let is_root: Vec<bool> = knots.iter().map(|&(x, _)| near_zero(p, x)).collect();
            let mut out: Vec<Root> = Vec::new();
            for (i, &(x, m)) in knots.iter().enumerate() {
                if is_root[i] {
                    out.push(Root {
                        value: x,
                        multiplicity: m + 1,
                    });
                }
                if let Some(&(x1, _)) = knots.get(i + 1) {
                    if is_root[i] || is_root[i + 1] {
                        continue;
                    }
                    let (f0, f1) = (p.eval(x), p.eval(x1));
                    if f0 * f1 < 0.0 {
                        let r = snap(bracketed_root(p, x, x1, f0, tol), a, b, tol);
                        out.push(Root {
                            value: r,
                            multiplicity: 1,
                        });
                    }
                }
            }
            out.sort_by(|u, v| u.value.total_cmp(&v.value));
            out
        }
    }
}

/// Newton iteration kept inside a sign-change bracket, bisecting when a step
/// leaves it.
fn bracketed_root(p: &UniPoly, lo: f64, hi: f64, flo: f64, tol: f64) -> f64 {
    let dp = p.derivative();
    let (mut lo, mut hi) = (lo, hi);
    let lo_negative = flo < 0.0;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = p.eval(x);
        if fx == 0.0 {
            return x;
        }
        if (fx < 0.0) == lo_negative {
            lo = x;
        } else {
            hi = x;
        }
        let dfx = dp.eval(x);
        let newton = if dfx != 0.0 { x - fx / dfx } else { f64::NAN };
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let converged = (next - x).abs() <= 0.25 * tol || hi - lo <= tol;
        x = next;
        if converged {
            break;
        }
    }
    x
}

/// `int_a^b |p(s)| ds`, exactly, by splitting at the sign changes of `p`.
pub fn integrate_abs(p: &UniPoly, a: f64, b: f64) -> f64 {
    if p.is_zero() || a == b {
        return 0.0;
    }
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let anti = p.antiderivative();
    let roots = real_roots_in(p, lo, hi, 0.0);
    let mut total = 0.0;
    let mut prev = lo;
    let mut prev_val = anti.eval(lo);
    for x in roots
        .sign_changes()
        .filter(|&x| x > lo && x < hi)
        .chain([hi])
    {
        let val = anti.eval(x);
        total += (val - prev_val).abs();
        prev = x;
        prev_val = val;
    }
    debug_assert_eq!(prev, hi);
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn roots_of(p: &UniPoly, a: f64, b: f64) -> Vec<(f64, usize)> {
        real_roots_in(p, a, b, 0.0)
            .roots()
            .iter()
            .map(|r| (r.value, r.multiplicity))
            .collect()
    }

    #[test]
    fn simple_roots() {
        assert_eq!(
            roots_of(&UniPoly::new(vec![0.0, 1.0]), 0.0, 2.0),
            vec![(0.0, 1)]
        );
        let r = roots_of(&UniPoly::new(vec![-1.0, 0.0, 1.0]), 0.0, 2.0);
        assert_eq!(r.len(), 1);
        assert_abs_diff_eq!(r[0].0, 1.0, epsilon = 1e-12);
        let p = UniPoly::from_roots(&[0.5, 1.5], 1.0);
        let r = roots_of(&p, 0.0, 2.0);
        assert_eq!(r.len(), 2);
        assert_abs_diff_eq!(r[0].0, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r[1].0, 1.5, epsilon = 1e-12);
        assert!(r.iter().all(|x| x.1 == 1));
    }

    #[test]
    fn zero_polynomial_is_flagged() {
        assert_eq!(
            real_roots_in(&UniPoly::zero(), 0.0, 1.0, 0.0),
            RootSet::IdenticallyZero
        );
        assert_eq!(
            real_roots_in(&UniPoly::constant(2.0), 0.0, 1.0, 0.0).roots(),
            &[]
        );
    }

    #[test]
    fn multiple_roots_report_multiplicity() {
        let p = UniPoly::from_roots(&[1.0, 1.0], 1.0);
        assert_eq!(roots_of(&p, 0.0, 2.0), vec![(1.0, 2)]);
        let p = UniPoly::from_roots(&[0.5, 0.5, 0.5, 1.75], -2.0);
        let r = roots_of(&p, 0.0, 2.0);
        assert_eq!(r.len(), 2);
        assert_abs_diff_eq!(r[0].0, 0.5, epsilon = 1e-6);
        assert_eq!(r[0].1, 3);
        assert_eq!(r[1].1, 1);
        assert_eq!(real_roots_in(&p, 0.0, 2.0, 0.0).sign_changes().count(), 2);
    }

    #[test]
    fn roots_near_endpoints_are_snapped() {
        let p = UniPoly::from_roots(&[2.0 + 1e-14], 1.0);
        assert_eq!(roots_of(&p, 0.0, 2.0), vec![(2.0, 1)]);
        let p = UniPoly::from_roots(&[0.0, 3.0], 1.0);
        assert_eq!(roots_of(&p, 0.0, 2.0), vec![(0.0, 1)]);
    }

    #[test]
    fn whole_line_roots() {
        let p = UniPoly::from_roots(&[-30.0, 0.25, 7.0], 0.5);
        let r: Vec<f64> = real_roots_all(&p).roots().iter().map(|r| r.value).collect();
        assert_eq!(r.len(), 3);
        assert_abs_diff_eq!(r[0], -30.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r[2], 7.0, epsilon = 1e-9);
        // x^2 + 1 has none
        assert!(real_roots_all(&UniPoly::new(vec![1.0, 0.0, 1.0]))
            .roots()
            .is_empty());
    }

    #[test]
    fn abs_integrals() {
        assert_abs_diff_eq!(integrate_abs(&UniPoly::constant(1.0), 0.0, 3.0), 3.0);
        assert_abs_diff_eq!(
            integrate_abs(&UniPoly::linear(-1.0, 1.0), 0.0, 2.0),
            1.0,
            epsilon = 1e-15
        );
        // 2/3 on [0,1] plus 4/3 on [1,2]
        assert_abs_diff_eq!(
            integrate_abs(&UniPoly::new(vec![-1.0, 0.0, 1.0]), 0.0, 2.0),
            2.0,
            epsilon = 1e-14
        );
        assert_eq!(integrate_abs(&UniPoly::zero(), 0.0, 5.0), 0.0);
    }

    #[test]
    fn calculus_maps() {
        let p = UniPoly::new(vec![1.0, 2.0, 3.0]);
        assert_eq!(p.eval(0.0), 1.0);
        assert_eq!(p.derivative(), UniPoly::new(vec![2.0, 6.0]));
        assert_eq!(p.antiderivative(), UniPoly::new(vec![0.0, 1.0, 1.0, 1.0]));
        assert_eq!(p.antiderivative().derivative(), p);
        assert_eq!(p.degree(), Some(2));
        assert_eq!(UniPoly::new(vec![1.0, 0.0, 0.0]).degree(), Some(0));
    }
}
