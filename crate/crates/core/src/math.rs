//! Log-domain helpers used by every probability computation in the crate.

use crate::error::Error;
use crate::real::Real;

/// `ln(e^a + e^b)` without overflow, tolerant of `-inf` inputs.
pub fn log_sum_exp_pair<T: Real>(a: T, b: T) -> T {
    if a == T::neg_infinity() {
        return b;
    }
    if b == T::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Σ e^{v_i}` over a slice, max-shifted for stability.
///
/// Returns `-inf` for an empty slice or when every entry is `-inf`.
pub fn log_sum_exp<T: Real>(v: &[T]) -> T {
    let mut m = T::neg_infinity();
    for &x in v {
        if x > m {
            m = x;
        }
    }
    if m == T::neg_infinity() {
        return m;
    }
    let mut s = T::zero();
    for &x in v {
        s += (x - m).exp();
    }
    m + s.ln()
}

/// Shifts log-values in place so the probabilities they encode sum to one.
///
/// Errors when the slice is empty or carries no mass at all (all `-inf`),
/// since no normalization exists then.
pub fn normalize_log<T: Real>(v: &mut [T]) -> Result<(), Error> {
    let z = log_sum_exp(v);
    if z == T::neg_infinity() {
        return Err(Error::AllNegInfinity);
    }
    for x in v.iter_mut() {
        *x -= z;
    }
    Ok(())
}

/// `ln(1 + e^x)` (softplus) without overflow for large |x|.
pub fn log1p_exp<T: Real>(x: T) -> T {
    if x > T::zero() {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_direct_sum() {
        let v = log_sum_exp_pair(0.2f64.ln(), 0.3f64.ln());
        assert!((v - 0.5f64.ln()).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn pairwise_handles_neg_infinity() {
        assert_eq!(log_sum_exp_pair(f64::NEG_INFINITY, -1.0), -1.0);
        assert_eq!(log_sum_exp_pair(-1.0, f64::NEG_INFINITY), -1.0);
        assert_eq!(
            log_sum_exp_pair(f64::NEG_INFINITY, f64::NEG_INFINITY),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn normalize_two_equal_masses() {
        let mut v = [0.2f64.ln(), 0.2f64.ln()];
        normalize_log(&mut v).unwrap();
        assert!((v[0] - 0.5f64.ln()).abs() < 1e-12);
        assert!((v[1] - 0.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn normalize_survives_large_offsets() {
        let mut v = [1000.0f64, 1001.0];
        normalize_log(&mut v).unwrap();
        // Sigmoid of -/+1 in log domain.
        let p0 = 1.0 / (1.0 + 1.0f64.exp());
        assert!((v[0].exp() - p0).abs() < 1e-12);
        assert!((v[1].exp() - (1.0 - p0)).abs() < 1e-12);
    }

    #[test]
    fn normalize_is_idempotent() {
        let mut v = [0.7f64.ln(), 0.3f64.ln()];
        normalize_log(&mut v).unwrap();
        let before = v;
        normalize_log(&mut v).unwrap();
        for (a, b) in v.iter().zip(before.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn normalize_rejects_empty_mass() {
        let mut v = [f64::NEG_INFINITY, f64::NEG_INFINITY];
        assert!(matches!(
            normalize_log(&mut v),
            Err(Error::AllNegInfinity)
        ));
        let mut empty: [f64; 0] = [];
        assert!(normalize_log(&mut empty).is_err());
    }

    #[test]
    fn normalized_probabilities_sum_to_one() {
        let mut v: Vec<f64> = (0..17).map(|i| -0.37 * i as f64).collect();
        normalize_log(&mut v).unwrap();
        let s: f64 = v.iter().map(|x| x.exp()).sum();
        assert!((s - 1.0).abs() < 1e-12, "sum {s}");
    }

    #[test]
    fn softplus_is_stable_at_extremes() {
        assert!((log1p_exp(0.0f64) - 2.0f64.ln()).abs() < 1e-15);
        assert!((log1p_exp(50.0f64) - 50.0).abs() < 1e-12);
        assert!(log1p_exp(-50.0f64) < 1e-20);
    }
}
