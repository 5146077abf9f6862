//! Log-space accumulation helpers.

/// log(exp(a) + exp(b)), stable for widely separated inputs.
pub(crate) fn logsumexp2(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// log Σ exp(x_i); NEG_INFINITY for an empty iterator.
pub(crate) fn logsumexp(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::NEG_INFINITY, logsumexp2)
}

/// Relative closeness on log scores, used for max-probability ties.
pub(crate) fn log_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logsumexp_matches_direct_sum() {
        let xs = [0.3_f64, -1.2, 2.0, 0.0];
        let direct = xs.iter().map(|x| x.exp()).sum::<f64>().ln();
        assert!((logsumexp(xs) - direct).abs() < 1e-12);
    }

    #[test]
    fn logsumexp_handles_neg_infinity() {
        assert_eq!(logsumexp2(f64::NEG_INFINITY, 1.5), 1.5);
        assert_eq!(logsumexp([]), f64::NEG_INFINITY);
    }
}
