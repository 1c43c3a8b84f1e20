use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{Coefficient, ExactRing, UniPoly};
use crate::error::{ReachError, Result};
use crate::model::rational_to_f64;

/// Exponent vector, ordered graded-lexicographically: higher total degree is
/// greater, ties broken lexicographically with the first variable heaviest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial with exact rational coefficients over named variables.
///
/// Zero coefficients are never stored, so structural equality is polynomial
/// equality. Binary operations require both operands to share a variable list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Vec<String>,
    terms: BTreeMap<Monomial, BigRational>,
}

/// One serialized term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exponents: Vec<u32>,
    pub num: String,
    pub den: String,
}

impl MultiPoly {
    pub fn zero(vars: Vec<String>) -> Self {
        MultiPoly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: Vec<String>, c: BigRational) -> Self {
        let mut p = MultiPoly::zero(vars);
        let one = Monomial::one(p.vars.len());
        p.add_term(one, c);
        p
    }

    /// The `i`-th variable as a polynomial.
    pub fn var(vars: Vec<String>, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        let mut p = MultiPoly::zero(vars);
        p.add_term(Monomial(e), BigRational::one());
        p
    }

    /// Variables named `{prefix}1 .. {prefix}n`.
    pub fn numbered_vars(prefix: &str, n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("{prefix}{i}")).collect()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn add_term(&mut self, mono: Monomial, c: BigRational) {
        assert_eq!(mono.0.len(), self.vars.len(), "monomial arity");
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms from the leading one down.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, exps: &[u32]) -> BigRational {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.leading_term().map(|(m, _)| m.degree())
    }

    pub fn scale(&self, k: &BigRational) -> MultiPoly {
        if k.is_zero() {
            return MultiPoly::zero(self.vars.clone());
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> MultiPoly {
        let mut acc = MultiPoly::constant(self.vars.clone(), BigRational::one());
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.vars.len());
        self.terms()
            .map(|(m, c)| {
                m.0.iter()
                    .zip(point)
                    .fold(rational_to_f64(c), |acc, (e, x)| acc * x.powi(*e as i32))
            })
            .sum()
    }

    pub fn eval_exact(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.vars.len());
        self.terms()
            .map(|(m, c)| {
                m.0.iter().zip(point).fold(c.clone(), |acc, (e, x)| {
                    acc * num_traits::pow(x.clone(), *e as usize)
                })
            })
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// Substitutes polynomial `images[i]` (over a common new variable list) for
    /// variable `i`.
    pub fn compose(&self, images: &[MultiPoly]) -> MultiPoly {
        assert_eq!(images.len(), self.vars.len());
        let vars = images.first().map(|p| p.vars.clone()).unwrap_or_default();
        let mut powers: Vec<Vec<MultiPoly>> = images
            .iter()
            .map(|p| {
                vec![
                    MultiPoly::constant(vars.clone(), BigRational::one()),
                    p.clone(),
                ]
            })
            .collect();
        let mut out = MultiPoly::zero(vars.clone());
        for (m, c) in self.terms() {
            let mut term = MultiPoly::constant(vars.clone(), c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = &powers[i][powers[i].len() - 1] * &images[i];
                    powers[i].push(next);
                }
                term = &term * &powers[i][e as usize];
            }
            out = &out + &term;
        }
        out
    }

    /// Substitutes univariate real polynomials and returns the composite.
    pub fn compose_univariate(&self, images: &[UniPoly]) -> UniPoly {
        assert_eq!(images.len(), self.vars.len());
        let mut out = UniPoly::zero();
        for (m, c) in self.terms() {
            let mut term = UniPoly::constant(rational_to_f64(c));
            for (img, &e) in images.iter().zip(&m.0) {
                if e > 0 {
                    term = &term * &img.pow(e);
                }
            }
            out = &out + &term;
        }
        out
    }

    /// Moves old variable `i` to position `mapping[i]` in `new_vars`.
    pub fn permute_vars(&self, new_vars: Vec<String>, mapping: &[usize]) -> MultiPoly {
        assert_eq!(mapping.len(), self.vars.len());
        let mut out = MultiPoly::zero(new_vars);
        for (m, c) in self.terms() {
            let mut e = vec![0; out.vars.len()];
            for (i, &k) in m.0.iter().enumerate() {
                e[mapping[i]] += k;
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Clears denominators, removes the integer content and makes the leading
    /// coefficient positive. Returns the normalized polynomial and the factor
    /// `k` with `normalized = k * self`.
    pub fn normalize(&self) -> (MultiPoly, BigRational) {
        if self.is_zero() {
            return (self.clone(), BigRational::one());
        }
        let lcm = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let gcd = self.terms.values().fold(BigInt::zero(), |acc, c| {
            acc.gcd(&(c.numer() * (&lcm / c.denom())))
        });
        let mut k = BigRational::new(lcm, gcd);
        if self.leading_term().unwrap().1.is_negative() {
            k = -k;
        }
        (self.scale(&k), k)
    }

    pub fn to_term_list(&self) -> Vec<TermJson> {
        self.terms()
            .map(|(m, c)| TermJson {
                exponents: m.0.clone(),
                num: c.numer().to_string(),
                den: c.denom().to_string(),
            })
            .collect()
    }

    pub fn from_term_list(vars: Vec<String>, terms: &[TermJson]) -> Result<MultiPoly> {
        let mut p = MultiPoly::zero(vars);
        for t in terms {
            if t.exponents.len() != p.vars.len() {
                return Err(ReachError::DimensionMismatch {
                    expected: p.vars.len(),
                    got: t.exponents.len(),
                });
            }
            let num: BigInt = t
                .num
                .parse()
                .map_err(|_| ReachError::InvalidSpec(format!("bad numerator {:?}", t.num)))?;
            let den: BigInt = t
                .den
                .parse()
                .map_err(|_| ReachError::InvalidSpec(format!("bad denominator {:?}", t.den)))?;
            if den.is_zero() {
                return Err(ReachError::InvalidSpec("zero denominator".into()));
            }
            p.add_term(Monomial(t.exponents.clone()), BigRational::new(num, den));
        }
        Ok(p)
    }

    fn check_vars(&self, other: &MultiPoly) {
        assert_eq!(
            self.vars, other.vars,
            "polynomials over different variables"
        );
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_vars(rhs);
        let mut out = MultiPoly::zero(self.vars.clone());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Coefficient for MultiPoly {
    fn zero_like(&self) -> Self {
        MultiPoly::zero(self.vars.clone())
    }
    fn one_like(&self) -> Self {
        MultiPoly::constant(self.vars.clone(), BigRational::one())
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn div_int(&self, n: i64) -> Self {
        self.scale(&BigRational::new(1.into(), n.into()))
    }
    fn mul_int(&self, n: i64) -> Self {
        self.scale(&BigRational::from_integer(n.into()))
    }
}

impl ExactRing for MultiPoly {
    /// Exact quotient by repeated leading-term cancellation; fails if a
    /// remainder would be left.
    fn exact_div(&self, divisor: &Self) -> Result<Self> {
        self.check_vars(divisor);
        let (lm_d, lc_d) = divisor.leading_term().ok_or(ReachError::InexactDivision)?;
        let (lm_d, lc_d) = (lm_d.clone(), lc_d.clone());
        let mut quotient = MultiPoly::zero(self.vars.clone());
        let mut rem = self.clone();
        while let Some((lm_r, lc_r)) = rem.leading_term() {
            let mono = lm_r.div(&lm_d).ok_or(ReachError::InexactDivision)?;
            let c = lc_r / &lc_d;
            let mut t = MultiPoly::zero(self.vars.clone());
            t.add_term(mono, c);
            rem = &rem - &(&t * divisor);
            quotient = &quotient + &t;
        }
        Ok(quotient)
    }
}

impl fmt::Display for MultiPoly {
    /// `rho3^4 - 4*rho1*rho3 + 3*rho2^2` style, leading term first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let factors: Vec<String> =
                m.0.iter()
                    .enumerate()
                    .filter(|(_, e)| **e > 0)
                    .map(|(k, e)| {
                        if *e == 1 {
                            self.vars[k].clone()
                        } else {
                            format!("{}^{}", self.vars[k], e)
                        }
                    })
                    .collect();
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{abs}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}
