use serde::{Deserialize, Serialize};

use crate::boundary::BoundaryParams;
use crate::error::{ReachError, Result};
use crate::model::SystemSpec;
use crate::support::{drift, zeta};

/// Piecewise-constant input: `values[k]` applies on real time
/// `[breakpoints[k], breakpoints[k + 1]]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSchedule {
    pub breakpoints: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl InputSchedule {
    /// One segment holding `u` on `[0, t]`.
    pub fn constant(u: Vec<f64>, t: f64) -> Self {
        InputSchedule {
            breakpoints: vec![0.0, t],
            values: vec![u],
        }
    }

    /// `values.len()` segments of equal length covering `[0, t]`.
    pub fn uniform(values: Vec<Vec<f64>>, t: f64) -> Self {
        let k = values.len();
        let breakpoints = (0..=k)
            .map(|i| if i == k { t } else { t * i as f64 / k as f64 })
            .collect();
        InputSchedule {
            breakpoints,
            values,
        }
    }

    /// Checks coverage of `[0, t]` and that every value is admissible: inside
    /// the spec's input set when it has one, else inside the block intervals.
    pub fn validate(&self, spec: &SystemSpec) -> Result<()> {
        let bad = |msg: String| Err(ReachError::InvalidSchedule(msg));
        let bp = &self.breakpoints;
        if self.values.is_empty() || bp.len() != self.values.len() + 1 {
            return bad(format!(
                "{} breakpoints for {} segments",
                bp.len(),
                self.values.len()
            ));
        }
        if bp[0] != 0.0 {
            return bad(format!("schedule starts at {} instead of 0", bp[0]));
        }
        if bp.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("breakpoints must be strictly increasing".into());
        }
        let t = spec.t;
        let end = *bp.last().unwrap();
        if (end - t).abs() > 1e-12 * t.max(1.0) {
            return bad(format!("schedule ends at {end} but the horizon is {t}"));
        }
        let slack = 1e-12;
        for (k, u) in self.values.iter().enumerate() {
            if u.len() != spec.m() {
                return bad(format!(
                    "segment {k} has {} inputs, expected {}",
                    u.len(),
                    spec.m()
                ));
            }
            let ok = match &spec.input_set {
                Some(set) => set.contains(u, slack),
                None => spec
                    .blocks
                    .iter()
                    .zip(u)
                    .all(|(b, v)| *v >= b.alpha - slack && *v <= b.beta + slack),
            };
            if !ok {
                return bad(format!("segment {k} input {u:?} is not admissible"));
            }
        }
        Ok(())
    }
}

/// Endpoint without validation; the last breakpoint is taken to be `spec.t`.
pub(crate) fn endpoint_unchecked(spec: &SystemSpec, sched: &InputSchedule) -> Vec<f64> {
    let t = spec.t;
    let bp = &sched.breakpoints;
    let k = sched.values.len();
    let mut x = Vec::with_capacity(spec.d());
    for (j, b) in spec.blocks.iter().enumerate() {
        let mut xj = drift(b, t);
        for (seg, u) in sched.values.iter().enumerate() {
            let uj = u[j];
            if uj == 0.0 {
                continue;
            }
            // real time [t_k, t_{k+1}] is time-to-go [t - t_{k+1}, t - t_k]
            let lo = if seg + 1 == k { 0.0 } else { t - bp[seg + 1] };
            let hi = t - bp[seg];
            for (xi, z) in xj.iter_mut().zip(zeta(b.r, lo, hi)) {
                *xi += uj * z;
            }
        }
        x.extend(xj);
    }
    x
}

/// State at the spec's horizon under a piecewise-constant input, summed
/// segment by segment in closed form.
pub fn simulate_endpoint(spec: &SystemSpec, sched: &InputSchedule) -> Result<Vec<f64>> {
    sched.validate(spec)?;
    Ok(endpoint_unchecked(spec, sched))
}

/// The bang-bang input whose endpoint is the boundary point with the given
/// per-block parameters.
pub fn bang_bang_schedule(spec: &SystemSpec, params: &[BoundaryParams]) -> Result<InputSchedule> {
    if params.len() != spec.m() {
        return Err(ReachError::DimensionMismatch {
            expected: spec.m(),
            got: params.len(),
        });
    }
    let t = spec.t;
    for (b, p) in spec.blocks.iter().zip(params) {
        p.validate(b.r, t)?;
    }
    let mut cuts: Vec<f64> = params
        .iter()
        .flat_map(|p| p.s.iter().map(move |s| t - s))
        .filter(|&c| c > 0.0 && c < t)
        .collect();
    cuts.push(0.0);
    cuts.push(t);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let values = cuts
        .windows(2)
        .map(|w| {
            let to_go = t - 0.5 * (w[0] + w[1]);
            spec.blocks
                .iter()
                .zip(params)
                .map(|(b, p)| {
                    let q = p.s.iter().filter(|&&s| s < to_go).count();
                    p.segment_input(b, q)
                })
                .collect()
        })
        .collect();
    Ok(InputSchedule {
        breakpoints: cuts,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{boundary_point, Sheet};
    use crate::model::BlockSpec;

    fn double() -> SystemSpec {
        SystemSpec::from_blocks(
            vec![BlockSpec::new(2, vec![0.0; 2], -1.0, 1.0).unwrap()],
            2.0,
        )
        .unwrap()
    }

    #[test]
    fn constant_inputs() {
        let s = double();
        assert_eq!(
            simulate_endpoint(&s, &InputSchedule::constant(vec![1.0], 2.0)).unwrap(),
            vec![2.0, 2.0]
        );
        assert_eq!(
            simulate_endpoint(&s, &InputSchedule::constant(vec![0.0], 2.0)).unwrap(),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn switch_matches_boundary_point() {
        let s = double();
        let sched = InputSchedule {
            breakpoints: vec![0.0, 1.0, 2.0],
            values: vec![vec![-1.0], vec![1.0]],
        };
        let x = simulate_endpoint(&s, &sched).unwrap();
        let p = BoundaryParams::new(Sheet::Plus, vec![1.0]);
        assert_eq!(x, boundary_point(&s.blocks[0], &p, 2.0).unwrap().x);
        assert_eq!(bang_bang_schedule(&s, &[p]).unwrap(), sched);
    }

    #[test]
    fn rejects_bad_schedules() {
        let s = double();
        let short = InputSchedule {
            breakpoints: vec![0.0, 1.5],
            values: vec![vec![1.0]],
        };
        let too_big = InputSchedule::constant(vec![1.5], 2.0);
        let unordered = InputSchedule {
            breakpoints: vec![0.0, 1.5, 1.0, 2.0],
            values: vec![vec![0.0]; 3],
        };
        for bad in [short, too_big, unordered] {
            assert!(matches!(
                simulate_endpoint(&s, &bad),
                Err(ReachError::InvalidSchedule(_))
            ));
        }
    }

    #[test]
    fn uniform_breakpoints_end_exactly() {
        let sch = InputSchedule::uniform(vec![vec![0.0]; 3], 0.7);
        assert_eq!(*sch.breakpoints.last().unwrap(), 0.7);
        assert_eq!(sch.breakpoints.len(), 4);
    }
}
