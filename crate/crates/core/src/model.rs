//! System description: integrator blocks, input sets and horizon.
//!
//! A spec is a list of single-input integrator chains of lengths `r_j`, each with
//! its own initial subvector and input interval `[alpha_j, beta_j]`. The reach set
//! only depends on the input set through these intervals, so any richer input set
//! is reduced to its coordinate projections on load and kept around only for
//! sampling.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{ReachError, Result};

/// A real number that remembers its exact rational value.
///
/// JSON numbers are taken at their exact binary value; strings such as `"1/3"`
/// or `"0.05"` are parsed as exact rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct Real {
    value: f64,
    exact: BigRational,
    text: Option<String>,
}

impl Real {
    pub fn from_f64(value: f64) -> Result<Self> {
        let exact = BigRational::from_float(value)
            .ok_or_else(|| ReachError::InvalidSpec(format!("non-finite number {value}")))?;
        Ok(Real {
            value,
            exact,
            text: None,
        })
    }

    pub fn from_rational(exact: BigRational) -> Self {
        let value = rational_to_f64(&exact);
        let text = Some(exact.to_string());
        Real { value, exact, text }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }
}

impl FromStr for Real {
    type Err = ReachError;

    fn from_str(s: &str) -> Result<Self> {
        let exact = parse_rational(s.trim())
            .ok_or_else(|| ReachError::InvalidSpec(format!("cannot parse number {s:?}")))?;
        Ok(Real {
            value: rational_to_f64(&exact),
            exact,
            text: Some(s.trim().to_string()),
        })
    }
}

impl From<f64> for Real {
    fn from(v: f64) -> Self {
        Real::from_f64(v).expect("finite number")
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match &self.text {
            Some(t) => serializer.serialize_str(t),
            None => serializer.serialize_f64(self.value),
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Num(v) => Real::from_f64(v).map_err(serde::de::Error::custom),
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Parses `"p/q"`, integers and plain decimals (`"-0.05"`, `"1e-3"`) exactly.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let all: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
    let all = all / BigInt::from(10);
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut q = if scale >= 0 {
        BigRational::from_integer(all * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(all, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        q = -q;
    }
    Some(q)
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(if q.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

/// Norm of an `lp` input ball.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpNorm {
    L1,
    L2,
    Inf,
}

impl Serialize for LpNorm {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LpNorm::L1 => serializer.serialize_u8(1),
            LpNorm::L2 => serializer.serialize_u8(2),
            LpNorm::Inf => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for LpNorm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(deserializer)?;
        match &v {
            serde_json::Value::Number(n) if n.as_f64() == Some(1.0) => Ok(LpNorm::L1),
            serde_json::Value::Number(n) if n.as_f64() == Some(2.0) => Ok(LpNorm::L2),
            serde_json::Value::String(s) if matches!(s.as_str(), "inf" | "infinity" | "Inf") => {
                Ok(LpNorm::Inf)
            }
            _ => Err(serde::de::Error::custom(format!(
                "unsupported p {v}, expected 1, 2 or \"inf\""
            ))),
        }
    }
}

/// Compact input set `U` in R^m.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InputSet {
    /// Axis-aligned box `[lower, upper]`.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// Ball `{u : ||u - center||_p <= radius}`.
    Lp {
        p: LpNorm,
        radius: f64,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        center: Vec<f64>,
    },
}

impl InputSet {
    pub fn unit_ball(p: LpNorm, m: usize) -> Self {
        InputSet::Lp {
            p,
            radius: 1.0,
            center: vec![0.0; m],
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            InputSet::Box { lower, .. } => lower.len(),
            InputSet::Lp { center, .. } => center.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            InputSet::Box { lower, upper } => {
                if lower.len() != upper.len() {
                    return Err(ReachError::InvalidSpec(
                        "input box bounds have different lengths".into(),
                    ));
                }
                if lower.iter().zip(upper).any(|(l, u)| !(l <= u)) {
                    return Err(ReachError::InvalidSpec(
                        "input box has lower > upper".into(),
                    ));
                }
            }
            InputSet::Lp { radius, center, .. } => {
                if !(*radius >= 0.0) || !radius.is_finite() {
                    return Err(ReachError::InvalidSpec(
                        "lp ball radius must be >= 0".into(),
                    ));
                }
                if center.iter().any(|c| !c.is_finite()) {
                    return Err(ReachError::InvalidSpec(
                        "lp ball center must be finite".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Fills an omitted `lp` centre with the origin of `R^m`.
    pub fn with_default_center(&self, m: usize) -> InputSet {
        match self {
            InputSet::Lp { p, radius, center } if center.is_empty() => InputSet::Lp {
                p: *p,
                radius: *radius,
                center: vec![0.0; m],
            },
            other => other.clone(),
        }
    }

    /// Whether `u` lies in the set (used by the schedule validator).
    pub fn contains(&self, u: &[f64], slack: f64) -> bool {
        match self {
            InputSet::Box { lower, upper } => u
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(v, (l, h))| *v >= l - slack && *v <= h + slack),
            InputSet::Lp { p, radius, center } => {
                let diffs = u.iter().zip(center).map(|(a, c)| (a - c).abs());
                let norm = match p {
                    LpNorm::L1 => diffs.sum::<f64>(),
                    LpNorm::L2 => diffs.map(|v| v * v).sum::<f64>().sqrt(),
                    LpNorm::Inf => diffs.fold(0.0, f64::max),
                };
                norm <= radius + slack
            }
        }
    }
}

/// Coordinate projection `[alpha_j, beta_j]` of the input set, `j` zero-based.
pub fn project_input_set(u: &InputSet, j: usize) -> Result<(f64, f64)> {
    if j >= u.dim() {
        return Err(ReachError::DimensionMismatch {
            expected: u.dim(),
            got: j + 1,
        });
    }
    Ok(match u {
        InputSet::Box { lower, upper } => (lower[j], upper[j]),
        InputSet::Lp { radius, center, .. } => (center[j] - radius, center[j] + radius),
    })
}

/// Exact counterpart of the numeric block data.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactBlock {
    pub x0: Vec<BigRational>,
    pub alpha: BigRational,
    pub beta: BigRational,
}

impl ExactBlock {
    pub fn mu(&self) -> BigRational {
        (&self.beta - &self.alpha) / BigRational::from_integer(2.into())
    }

    pub fn nu(&self) -> BigRational {
        (&self.beta + &self.alpha) / BigRational::from_integer(2.into())
    }
}

/// One single-input integrator chain of length `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSpec {
    pub r: usize,
    pub x0: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    /// Half-width `(beta - alpha) / 2`.
    pub mu: f64,
    /// Midpoint `(beta + alpha) / 2`.
    pub nu: f64,
    pub exact: ExactBlock,
}

impl BlockSpec {
    pub fn new(r: usize, x0: Vec<f64>, alpha: f64, beta: f64) -> Result<Self> {
        let x0r = x0
            .iter()
            .map(|v| Real::from_f64(*v))
            .collect::<Result<Vec<_>>>()?;
        Self::from_reals(r, &x0r, &Real::from_f64(alpha)?, &Real::from_f64(beta)?)
    }

    fn from_reals(r: usize, x0: &[Real], alpha: &Real, beta: &Real) -> Result<Self> {
        if r < 1 {
            return Err(ReachError::InvalidSpec("block order r must be >= 1".into()));
        }
        if x0.len() != r {
            return Err(ReachError::InvalidSpec(format!(
                "x0 has {} entries but r = {r}",
                x0.len()
            )));
        }
        if alpha.exact() > beta.exact() {
            return Err(ReachError::InvalidSpec(format!(
                "alpha {} > beta {}",
                alpha.value(),
                beta.value()
            )));
        }
        let (a, b) = (alpha.value(), beta.value());
        Ok(BlockSpec {
            r,
            x0: x0.iter().map(Real::value).collect(),
            alpha: a,
            beta: b,
            mu: (b - a) / 2.0,
            nu: (b + a) / 2.0,
            exact: ExactBlock {
                x0: x0.iter().map(|v| v.exact().clone()).collect(),
                alpha: alpha.exact().clone(),
                beta: beta.exact().clone(),
            },
        })
    }

    pub fn is_degenerate(&self) -> bool {
        self.mu == 0.0
    }
}

/// Serialized form of a block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBlock {
    pub r: i64,
    pub x0: Vec<Real>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Real>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Real>,
}

/// Serialized form of a whole spec document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSpec {
    pub blocks: Vec<RawBlock>,
    pub t: Real,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_set: Option<InputSet>,
}

impl RawSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| ReachError::InvalidSpec(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }
}

/// Validated system: blocks, horizon and derived offsets.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec {
    pub blocks: Vec<BlockSpec>,
    pub t: f64,
    pub t_exact: BigRational,
    pub input_set: Option<InputSet>,
    offsets: Vec<usize>,
    raw: RawSpec,
}

/// Validates a raw spec and fills in the derived quantities.
pub fn normalize_spec(raw: &RawSpec) -> Result<SystemSpec> {
    if raw.blocks.is_empty() {
        return Err(ReachError::InvalidSpec(
            "spec needs at least one block".into(),
        ));
    }
    let t = raw.t.value();
    if !(t > 0.0) || !t.is_finite() {
        return Err(ReachError::InvalidSpec(format!(
            "horizon t = {t} must be > 0"
        )));
    }
    let m = raw.blocks.len();
    let mut input_set = raw.input_set.clone();
    if let Some(u) = &mut input_set {
        u.validate()?;
        if let InputSet::Lp { center, .. } = u {
            if center.is_empty() {
                *center = vec![0.0; m];
            }
        }
        if u.dim() != m {
            return Err(ReachError::InvalidSpec(format!(
                "input set has dimension {} but there are {m} blocks",
                u.dim()
            )));
        }
    }

    let mut blocks = Vec::with_capacity(m);
    for (j, rb) in raw.blocks.iter().enumerate() {
        if rb.r < 1 {
            return Err(ReachError::InvalidSpec(format!(
                "block {j}: r must be >= 1"
            )));
        }
        let projected = match &input_set {
            Some(u) => Some(project_input_set(u, j)?),
            None => None,
        };
        let (alpha, beta) = match (&rb.alpha, &rb.beta, projected) {
            (Some(a), Some(b), None) => (a.clone(), b.clone()),
            (None, None, Some((a, b))) => (Real::from_f64(a)?, Real::from_f64(b)?),
            (Some(a), Some(b), Some((pa, pb))) => {
                if a.value() != pa || b.value() != pb {
                    return Err(ReachError::InvalidSpec(format!(
                        "block {j}: [alpha, beta] = [{}, {}] disagrees with the input set projection [{pa}, {pb}]",
                        a.value(),
                        b.value()
                    )));
                }
                (a.clone(), b.clone())
            }
            _ => {
                return Err(ReachError::InvalidSpec(format!(
                    "block {j}: give both alpha and beta, or an input_set"
                )))
            }
        };
        let block = BlockSpec::from_reals(rb.r as usize, &rb.x0, &alpha, &beta)
            .map_err(|e| ReachError::InvalidSpec(format!("block {j}: {e}")))?;
        blocks.push(block);
    }

    let mut offsets = Vec::with_capacity(m + 1);
    let mut acc = 0;
    offsets.push(0);
    for b in &blocks {
        acc += b.r;
        offsets.push(acc);
    }
    Ok(SystemSpec {
        blocks,
        t,
        t_exact: raw.t.exact().clone(),
        input_set,
        offsets,
        raw: raw.clone(),
    })
}

impl SystemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        normalize_spec(&RawSpec::from_json(text)?)
    }

    /// Builds a spec from already validated blocks.
    pub fn from_blocks(blocks: Vec<BlockSpec>, t: f64) -> Result<Self> {
        let raw = RawSpec {
            blocks: blocks
                .iter()
                .map(|b| RawBlock {
                    r: b.r as i64,
                    x0: b
                        .exact
                        .x0
                        .iter()
                        .cloned()
                        .map(real_from_exact_or_float)
                        .collect(),
                    alpha: Some(real_from_exact_or_float(b.exact.alpha.clone())),
                    beta: Some(real_from_exact_or_float(b.exact.beta.clone())),
                })
                .collect(),
            t: Real::from_f64(t)?,
            input_set: None,
        };
        normalize_spec(&raw)
    }

    pub fn raw(&self) -> &RawSpec {
        &self.raw
    }

    pub fn to_json(&self) -> String {
        self.raw.to_json()
    }

    /// State dimension `d = sum r_j`.
    pub fn d(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Number of inputs / blocks.
    pub fn m(&self) -> usize {
        self.blocks.len()
    }

    pub fn offset(&self, j: usize) -> usize {
        self.offsets[j]
    }

    /// Splits a length-`d` vector into its per-block subvectors.
    pub fn block_views<'a>(&'a self, v: &'a [f64]) -> impl Iterator<Item = &'a [f64]> + 'a {
        self.offsets.windows(2).map(move |w| &v[w[0]..w[1]])
    }

    pub fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.d() {
            return Err(ReachError::DimensionMismatch {
                expected: self.d(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Same system at another horizon.
    pub fn at_time(&self, t: f64) -> Result<Self> {
        let mut raw = self.raw.clone();
        raw.t = Real::from_f64(t)?;
        normalize_spec(&raw)
    }

    /// Same system with the input set replaced; intervals are re-projected.
    pub fn with_input_set(&self, u: InputSet) -> Result<Self> {
        let mut raw = self.raw.clone();
        for b in &mut raw.blocks {
            b.alpha = None;
            b.beta = None;
        }
        raw.input_set = Some(u);
        normalize_spec(&raw)
    }
}

fn real_from_exact_or_float(q: BigRational) -> Real {
    let v = rational_to_f64(&q);
    match BigRational::from_float(v) {
        Some(back) if back == q => Real::from_f64(v).expect("finite"),
        _ => Real::from_rational(q),
    }
}

impl fmt::Display for LpNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpNorm::L1 => write!(f, "1"),
            LpNorm::L2 => write!(f, "2"),
            LpNorm::Inf => write!(f, "inf"),
        }
    }
}
