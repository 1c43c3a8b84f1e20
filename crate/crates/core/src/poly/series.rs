use super::Coefficient;

/// Truncated power series `sum_{k=0}^{N} a[k] tau^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesCoeffs<T> {
    pub a: Vec<T>,
}

impl<T> SeriesCoeffs<T> {
    /// Highest stored power `N`.
    pub fn order(&self) -> usize {
        self.a.len().saturating_sub(1)
    }
}

/// Coefficients of `exp(-sum_{k>=1} lambda(k)/k tau^k)` up to `tau^order`.
///
/// `lambda[k-1]` holds `lambda(k)`; missing entries count as zero. Differentiating
/// `F = exp(g)` gives `F' = g' F`, so `n A(n) = -sum_{k=1}^{n} lambda(k) A(n-k)`
/// with `A(0) = 1`. `lambda` must be non-empty (its first entry provides the
/// ring context).
pub fn series_exp<T: Coefficient>(lambda: &[T], order: usize) -> SeriesCoeffs<T> {
    let proto = lambda
        .first()
        .expect("series_exp needs at least one coefficient");
    let mut a = Vec::with_capacity(order + 1);
    a.push(proto.one_like());
    for n in 1..=order {
        let mut acc = proto.zero_like();
        for k in 1..=n.min(lambda.len()) {
            if lambda[k - 1].is_zero_value() || a[n - k].is_zero_value() {
                continue;
            }
            acc = acc.add_ref(&lambda[k - 1].mul_ref(&a[n - k]));
        }
        a.push(acc.neg_ref().div_int(n as i64));
    }
    SeriesCoeffs { a }
}

/// Inverse of [`series_exp`]: recovers `lambda(1..=N)` from a series with
/// `a[0] = 1` via the logarithmic derivative.
pub fn series_log<T: Coefficient>(series: &SeriesCoeffs<T>) -> Vec<T> {
    let a = &series.a;
    let mut lambda: Vec<T> = Vec::with_capacity(a.len().saturating_sub(1));
    for n in 1..a.len() {
        // n A(n) + sum_{k=1}^{n-1} lambda(k) A(n-k) + lambda(n) = 0
        let mut acc = a[n].mul_int(n as i64);
        for k in 1..n {
            acc = acc.add_ref(&lambda[k - 1].mul_ref(&a[n - k]));
        }
        lambda.push(acc.neg_ref());
    }
    lambda
}
