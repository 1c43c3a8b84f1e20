use integrator_reach::poly::{
    hankel_det, integrate_abs, real_roots_in, series_exp, series_log, MultiPoly, RootSet,
    SeriesCoeffs, UniPoly,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn poly_strategy() -> impl Strategy<Value = UniPoly> {
    prop::collection::vec(-5.0f64..5.0, 1..=7).prop_map(UniPoly::new)
}

fn interval() -> impl Strategy<Value = (f64, f64)> {
    (-3.0f64..3.0, 0.1f64..4.0).prop_map(|(a, w)| (a, a + w))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// Odd-multiplicity roots reported in each cell of a 10^4-point grid match
    /// the sign change of `p` across that cell, and every root is a near zero.
    #[test]
    fn roots_agree_with_sign_scan(p in poly_strategy(), (a, b) in interval()) {
        prop_assume!(!p.is_zero());
        let RootSet::Roots(roots) = real_roots_in(&p, a, b, 0.0) else {
            panic!("nonzero polynomial reported as identically zero");
        };
        for r in &roots {
            prop_assert!(r.value >= a && r.value <= b);
            prop_assert!(p.eval(r.value).abs() <= 1e-9 * p.eval_abs(r.value).max(1.0));
        }
        let n = 10_000;
        let grid: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
        let vals: Vec<f64> = grid.iter().map(|&x| p.eval(x)).collect();
        let odd: Vec<f64> = roots.iter().filter(|r| r.changes_sign()).map(|r| r.value).collect();
        for i in 0..n {
            let (lo, hi) = (grid[i], grid[i + 1]);
            // cells touching an exact zero of the scan are ambiguous
            if vals[i] == 0.0 || vals[i + 1] == 0.0 {
                continue;
            }
            let flips = (vals[i] > 0.0) != (vals[i + 1] > 0.0);
            let inside = odd.iter().filter(|&&x| x > lo && x <= hi).count();
            // a root snapped within tolerance of a cell edge may sit in the
            // neighbouring cell
            let near = odd.iter().filter(|&&x| (x - lo).abs() < 1e-9 || (x - hi).abs() < 1e-9).count();
            if near == 0 {
                prop_assert_eq!(flips, inside % 2 == 1, "cell [{}, {}]", lo, hi);
            }
        }
    }

    #[test]
    fn integrate_abs_dominates_signed_integral(p in poly_strategy(), (a, b) in interval()) {
        let anti = p.antiderivative();
        let signed = anti.eval(b) - anti.eval(a);
        let total = integrate_abs(&p, a, b);
        let scale = 1e-10 * (1.0 + p.max_abs_coeff() * (1.0 + a.abs().max(b.abs())).powi(7));
        prop_assert!(total >= signed.abs() - scale);
        let changes = real_roots_in(&p, a, b, 0.0)
            .sign_changes()
            .filter(|&x| x > a && x < b)
            .count();
        if changes == 0 {
            prop_assert!((total - signed.abs()).abs() <= scale);
        }
        // composite Simpson on |p| as an independent quadrature
        let n = 20_000;
        let h = (b - a) / n as f64;
        let mut simpson = p.eval(a).abs() + p.eval(b).abs();
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            simpson += w * p.eval(a + i as f64 * h).abs();
        }
        simpson *= h / 3.0;
        prop_assert!((total - simpson).abs() <= 1e-5 * (1.0 + total));
    }

    #[test]
    fn series_log_inverts_series_exp(lambda in prop::collection::vec(-2.0f64..2.0, 1..=10)) {
        let series = series_exp(&lambda, lambda.len());
        prop_assert_eq!(series.a[0], 1.0);
        let back = series_log(&series);
        for (x, y) in lambda.iter().zip(&back) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()), "{} vs {}", x, y);
        }
    }

    #[test]
    fn series_exp_matches_naive_exponential(lambda in prop::collection::vec(-2.0f64..2.0, 1..=6)) {
        // exp(g) = sum_j g^j / j! with g = -sum lambda(k)/k tau^k, truncated
        let n = lambda.len();
        let mut g = vec![0.0; n + 1];
        for (k, l) in lambda.iter().enumerate() {
            g[k + 1] = -l / (k + 1) as f64;
        }
        let mul = |a: &[f64], b: &[f64]| {
            let mut out = vec![0.0; n + 1];
            for i in 0..=n {
                for j in 0..=n - i {
                    out[i + j] += a[i] * b[j];
                }
            }
            out
        };
        let mut term = vec![0.0; n + 1];
        term[0] = 1.0;
        let mut naive = term.clone();
        for j in 1..=n {
            term = mul(&term, &g).iter().map(|c| c / j as f64).collect();
            for (s, t) in naive.iter_mut().zip(&term) {
                *s += t;
            }
        }
        let fast = series_exp(&lambda, n).a;
        for (x, y) in fast.iter().zip(&naive) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn exact_series_log_is_exact(nums in prop::collection::vec(-20i64..20, 1..=6), den in 1i64..7) {
        let lambda: Vec<BigRational> = nums
            .iter()
            .map(|n| BigRational::new(BigInt::from(*n), BigInt::from(den)))
            .collect();
        let series = series_exp(&lambda, lambda.len());
        prop_assert_eq!(series_log(&series), lambda);
    }

    /// Series of `P/Q` with `deg Q = delta` and `deg P < delta` have Hankel
    /// rank `delta`: every `(delta + 1)`-window determinant vanishes.
    #[test]
    fn kronecker_rank(
        q in prop::collection::vec(-1.0f64..1.0, 1..=3),
        p_seed in prop::collection::vec(-1.0f64..1.0, 3),
        start in 0usize..4,
    ) {
        let delta = q.len();
        let mut den = vec![1.0];
        den.extend(&q);
        let num = &p_seed[..delta];
        let n = start + 2 * delta + 1;
        let mut a = vec![0.0; n];
        for k in 0..n {
            let mut v = if k < delta { num[k] } else { 0.0 };
            for j in 1..=delta.min(k) {
                v -= den[j] * a[k - j];
            }
            a[k] = v;
        }
        let magnitude = a.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let d = hankel_det(&SeriesCoeffs { a }, start, delta + 1).unwrap();
        prop_assert!(d.abs() <= 1e-12 * magnitude.powi(delta as i32 + 1));
    }
}

#[test]
fn symbolic_series_matches_closed_form() {
    let vars = MultiPoly::numbered_vars("l", 3);
    let l: Vec<MultiPoly> = (0..3).map(|i| MultiPoly::var(vars.clone(), i)).collect();
    let a = series_exp(&l, 3).a;
    assert_eq!(a[1].to_string(), "-l1");
    assert_eq!(a[2].to_string(), "1/2*l1^2 - 1/2*l2");
    assert_eq!(a[3].to_string(), "-1/6*l1^3 + 1/2*l1*l2 - 1/3*l3");
    assert_eq!(series_log(&SeriesCoeffs { a }), l);
}
