//! Kolmogorov-Smirnov distances.

use crate::error::{Error, Result};

pub const MIN_KS_SAMPLES: usize = 100;

/// 1% critical value of the one-sample statistic, 1.63/√n.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

fn sorted(samples: &[f64], what: &str) -> Result<Vec<f64>> {
    if samples.len() < MIN_KS_SAMPLES {
        return Err(Error::domain(format!(
            "{what} needs at least {MIN_KS_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::domain(format!("{what} received a NaN sample")));
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// sup |F_n(x) − cdf(x)|.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    let v = sorted(samples, "KS statistic")?;
    let n = v.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(d)
}

/// sup |F_n(x) − G_m(x)| between two empirical distributions.
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let a = sorted(xs, "two-sample KS")?;
    let b = sorted(ys, "two-sample KS")?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_samples_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let xs: Vec<f64> = (0..100_000).map(|_| rng.random::<f64>()).collect();
        let d = ks_statistic(&xs, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(d < ks_critical_1pct(xs.len()), "{d}");
    }

    #[test]
    fn constant_samples_fail() {
        let xs = vec![0.5; 200];
        assert!(ks_statistic(&xs, |x| x.clamp(0.0, 1.0)).unwrap() >= 0.5);
    }

    #[test]
    fn input_checks() {
        assert!(ks_statistic(&[], |x| x).is_err());
        assert!(ks_statistic(&[0.1; 99], |x| x).is_err());
        assert!(ks_two_sample(&[0.0; 100], &[0.0; 5]).is_err());
    }

    #[test]
    fn two_sample_extremes() {
        let a: Vec<f64> = (0..200).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..200).map(|i| 1000.0 + i as f64).collect();
        assert_eq!(ks_two_sample(&a, &b).unwrap(), 1.0);
        assert_eq!(ks_two_sample(&a, &a).unwrap(), 0.0);
    }

    proptest! {
        #[test]
        fn permutation_invariant(mut xs in prop::collection::vec(0.0f64..1.0, 100..300), seed in any::<u64>()) {
            let d0 = ks_statistic(&xs, |x| x).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in (1..xs.len()).rev() {
                let j = rng.random_range(0..=i);
                xs.swap(i, j);
            }
            prop_assert_eq!(d0, ks_statistic(&xs, |x| x).unwrap());
        }
    }
}
