//! Pearson correlation with a Student t significance test, and comparison
//! of correlations from independent groups via Fisher's r-to-z transform
//! and Zou's confidence interval for a difference of correlations.
//!
//! All p-values are two-sided.

pub mod special;

use serde::{Deserialize, Serialize};

pub use special::{normal_cdf, normal_quantile};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {min} samples, got {n}")]
    TooFewSamples { n: usize, min: usize },
    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),
    #[error("correlation {0} is degenerate (|r| must be < 1)")]
    DegenerateR(f64),
    #[error("confidence {0} is not in (0, 1)")]
    InvalidConfidence(f64),
    #[error("observed z must be nonzero")]
    ZeroZ,
    #[error("correlations are equal; group size is not identifiable")]
    EqualR,
    #[error("non-finite input")]
    NonFinite,
}

pub type StatsResult<T> = Result<T, StatsError>;

/// Within-group correlation of beta (x) against alpha (y).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub group: String,
    pub n: usize,
    pub r: f64,
    pub mean_x: f64,
    pub mean_y: f64,
    pub t_stat: f64,
    pub p_two_sided: f64,
}

/// One pairwise comparison of two groups' correlations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub group_a: String,
    pub group_b: String,
    pub z_score: f64,
    #[serde(rename = "p_value")]
    pub p_two_sided: f64,
    pub zou_low: f64,
    pub zou_high: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub confidence: Option<f64>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn check_r(r: f64) -> StatsResult<()> {
    if !r.is_finite() {
        Err(StatsError::NonFinite)
    } else if r.abs() >= 1.0 {
        Err(StatsError::DegenerateR(r))
    } else {
        Ok(())
    }
}

/// Pearson's r together with the sample means `(r, m_x, m_y)`.
pub fn pearson(xs: &[f64], ys: &[f64]) -> StatsResult<(f64, f64, f64)> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(StatsError::TooFewSamples { n: xs.len(), min: 2 });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    if xs.iter().all(|&v| v == xs[0]) {
        return Err(StatsError::ZeroVariance("x"));
    }
    if ys.iter().all(|&v| v == ys[0]) {
        return Err(StatsError::ZeroVariance("y"));
    }
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(StatsError::ZeroVariance("x"));
    }
    if syy == 0.0 {
        return Err(StatsError::ZeroVariance("y"));
    }
    let r = sxy / (sxx * syy).sqrt();
    // Rounding can push |r| a hair past 1.
    Ok((r.clamp(-1.0, 1.0), mx, my))
}

pub fn pearson_r(xs: &[f64], ys: &[f64]) -> StatsResult<f64> {
    pearson(xs, ys).map(|(r, _, _)| r)
}

/// `t = r sqrt((n-2) / (1-r^2))` and its two-sided p on `n - 2` degrees of
/// freedom.
pub fn correlation_significance(r: f64, n: usize) -> StatsResult<(f64, f64)> {
    if n < 3 {
        return Err(StatsError::TooFewSamples { n, min: 3 });
    }
    check_r(r)?;
    let df = (n - 2) as f64;
    let t = r * (df / (1.0 - r * r)).sqrt();
    Ok((t, special::t_two_sided(t, df)))
}

pub fn correlation_report(group: &str, xs: &[f64], ys: &[f64]) -> StatsResult<CorrelationReport> {
    let (r, mean_x, mean_y) = pearson(xs, ys)?;
    let (t_stat, p_two_sided) = correlation_significance(r, xs.len())?;
    Ok(CorrelationReport {
        group: group.to_string(),
        n: xs.len(),
        r,
        mean_x,
        mean_y,
        t_stat,
        p_two_sided,
    })
}

pub fn t_cdf(t: f64, df: u64) -> f64 {
    assert!(df >= 1, "degrees of freedom must be positive");
    special::t_cdf(t, df as f64)
}

/// `z = atanh(r) = ln((1+r)/(1-r)) / 2`.
pub fn fisher_z(r: f64) -> StatsResult<f64> {
    check_r(r)?;
    Ok(r.abs().atanh().copysign(r))
}

fn check_groups(r1: f64, n1: usize, r2: f64, n2: usize) -> StatsResult<()> {
    for n in [n1, n2] {
        if n <= 3 {
            return Err(StatsError::TooFewSamples { n, min: 4 });
        }
    }
    check_r(r1)?;
    check_r(r2)
}

/// Fisher z-test for two correlations from independent groups; returns
/// `(z, two-sided p)`.
pub fn indep_groups_z_test(r1: f64, n1: usize, r2: f64, n2: usize) -> StatsResult<(f64, f64)> {
    check_groups(r1, n1, r2, n2)?;
    let se = (1.0 / (n1 - 3) as f64 + 1.0 / (n2 - 3) as f64).sqrt();
    let z = (fisher_z(r1)? - fisher_z(r2)?) / se;
    Ok((z, special::normal_two_sided(z)))
}

/// Zou's interval for `r1 - r2`, built from each correlation's
/// back-transformed Fisher interval.
pub fn zou_interval(r1: f64, n1: usize, r2: f64, n2: usize, confidence: f64) -> StatsResult<(f64, f64)> {
    check_groups(r1, n1, r2, n2)?;
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(StatsError::InvalidConfidence(confidence));
    }
    let q = normal_quantile(1.0 - (1.0 - confidence) / 2.0);
    let bounds = |r: f64, n: usize| {
        let z = r.atanh();
        let half = q / ((n - 3) as f64).sqrt();
        ((z - half).tanh(), (z + half).tanh())
    };
    let (l1, u1) = bounds(r1, n1);
    let (l2, u2) = bounds(r2, n2);
    let diff = r1 - r2;
    let low = diff - ((r1 - l1).powi(2) + (u2 - r2).powi(2)).sqrt();
    let high = diff + ((u1 - r1).powi(2) + (r2 - l2).powi(2)).sqrt();
    Ok((low, high))
}

/// Common per-group size `n` that would make the Fisher z-test between `r1`
/// and `r2` produce `z_observed`: `n = 3 + 2 (z / (z1 - z2))^2`.
pub fn infer_group_n(z_observed: f64, r1: f64, r2: f64) -> StatsResult<f64> {
    if !z_observed.is_finite() {
        return Err(StatsError::NonFinite);
    }
    if z_observed == 0.0 {
        return Err(StatsError::ZeroZ);
    }
    let dz = fisher_z(r1)? - fisher_z(r2)?;
    if dz == 0.0 {
        return Err(StatsError::EqualR);
    }
    Ok(3.0 + 2.0 * (z_observed / dz).powi(2))
}

/// Full comparison row for two groups.
pub fn compare_correlations(
    a: (&str, f64, usize),
    b: (&str, f64, usize),
    confidence: f64,
) -> StatsResult<ComparisonReport> {
    let (z_score, p_two_sided) = indep_groups_z_test(a.1, a.2, b.1, b.2)?;
    let (zou_low, zou_high) = zou_interval(a.1, a.2, b.1, b.2, confidence)?;
    Ok(ComparisonReport {
        group_a: a.0.to_string(),
        group_b: b.0.to_string(),
        z_score,
        p_two_sided,
        zou_low,
        zou_high,
        confidence: Some(confidence),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TOPICAL: [(f64, f64); 6] = [
        (245.0 / 336.0, -0.0065),
        (118.0 / 507.0, 0.3025),
        (97.0 / 164.0, 0.0577),
        (156.0 / 603.0, 0.1306),
        (150.0 / 182.0, 0.0395),
        (142.0 / 516.0, 0.4704),
    ];

    fn split(rows: &[(f64, f64)]) -> (Vec<f64>, Vec<f64>) {
        rows.iter().copied().unzip()
    }

    #[test]
    fn topical_table_correlation() {
        let (x, y) = split(&TOPICAL);
        let r = pearson_r(&x, &y).unwrap();
        assert_eq!((r * 100.0).round() / 100.0, -0.77);
        let (t, p) = correlation_significance(r, 6).unwrap();
        assert!(t < 0.0);
        assert!((p - 0.072).abs() < 0.001, "{p}");
    }

    #[test]
    fn pearson_basics_and_errors() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        assert!((pearson_r(&xs, &xs).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(pearson_r(&xs, &[1.0]), Err(StatsError::LengthMismatch(4, 1)));
        assert_eq!(
            pearson_r(&[1.0], &[1.0]),
            Err(StatsError::TooFewSamples { n: 1, min: 2 })
        );
        assert_eq!(
            pearson_r(&[0.1; 3], &[1.0, 2.0, 3.0]),
            Err(StatsError::ZeroVariance("x"))
        );
        assert_eq!(
            pearson_r(&[1.0, 2.0, 3.0], &[0.7; 3]),
            Err(StatsError::ZeroVariance("y"))
        );
    }

    fn exact(v: f64) -> BigRational {
        BigRational::from_float(v).unwrap()
    }

    #[test]
    fn pearson_matches_rational_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let xs: Vec<f64> = (0..8).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let ys: Vec<f64> = (0..8).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let n = BigRational::from_integer(BigInt::from(8));
            let mx = xs.iter().map(|&v| exact(v)).sum::<BigRational>() / &n;
            let my = ys.iter().map(|&v| exact(v)).sum::<BigRational>() / &n;
            let (mut sxy, mut sxx, mut syy) = (BigRational::default(), BigRational::default(), BigRational::default());
            for (&x, &y) in xs.iter().zip(&ys) {
                let dx = exact(x) - &mx;
                let dy = exact(y) - &my;
                sxy += &dx * &dy;
                sxx += &dx * &dx;
                syy += &dy * &dy;
            }
            let r2 = (&sxy * &sxy) / (sxx * syy);
            let oracle = r2.to_f64().unwrap().sqrt().copysign(sxy.to_f64().unwrap());
            let r = pearson_r(&xs, &ys).unwrap();
            assert!((r - oracle).abs() < 1e-12, "{r} vs {oracle}");
        }
    }

    #[test]
    fn significance_edges() {
        assert_eq!(correlation_significance(0.0, 10).unwrap(), (0.0, 1.0));
        assert!(matches!(
            correlation_significance(0.5, 2),
            Err(StatsError::TooFewSamples { .. })
        ));
        assert!(matches!(
            correlation_significance(1.0, 6),
            Err(StatsError::DegenerateR(_))
        ));
        assert!(matches!(
            correlation_significance(-1.0, 6),
            Err(StatsError::DegenerateR(_))
        ));
        // -0.94 is the two-decimal rounding of -0.9426, whose p is 0.0048.
        let (_, p) = correlation_significance(-0.94, 6).unwrap();
        assert!((p - 0.0048).abs() < 0.001, "{p}");
        let (_, p) = correlation_significance(-0.9426, 6).unwrap();
        assert!((p - 0.0048).abs() < 0.0001, "{p}");
        let (_, p) = correlation_significance(-0.3348, 6).unwrap();
        assert!((p - 0.52).abs() < 0.005, "{p}");
    }

    #[test]
    fn fisher_values() {
        assert_eq!(fisher_z(0.0).unwrap(), 0.0);
        // (1/2) ln 3
        assert!((fisher_z(0.5).unwrap() - 0.549_306_144_334_054_8).abs() < 1e-15);
        assert!(fisher_z(1.0).is_err());
        assert!(fisher_z(-1.2).is_err());
    }

    #[test]
    fn z_test_examples() {
        assert_eq!(indep_groups_z_test(0.3, 20, 0.3, 50).unwrap(), (0.0, 1.0));
        let (z, _) = indep_groups_z_test(-0.77, 6, -0.34, 6).unwrap();
        assert!((z + 0.816).abs() < 0.001, "{z}");
        assert!(matches!(
            indep_groups_z_test(0.1, 3, 0.2, 10),
            Err(StatsError::TooFewSamples { .. })
        ));
        assert!(matches!(
            indep_groups_z_test(1.0, 10, 0.2, 10),
            Err(StatsError::DegenerateR(_))
        ));
    }

    /// Second implementation written straight from the published recipe,
    /// using the textbook atanh/tanh forms and a table quantile.
    fn zou_reference(r1: f64, n1: f64, r2: f64, n2: f64) -> (f64, f64) {
        let q = 1.959_963_984_540_054;
        let ci = |r: f64, n: f64| {
            let z = 0.5 * ((1.0 + r) / (1.0 - r)).ln();
            let se = 1.0 / (n - 3.0).sqrt();
            let back = |z: f64| ((2.0 * z).exp() - 1.0) / ((2.0 * z).exp() + 1.0);
            (back(z - q * se), back(z + q * se))
        };
        let (l1, u1) = ci(r1, n1);
        let (l2, u2) = ci(r2, n2);
        let d = r1 - r2;
        (
            d - ((r1 - l1).powi(2) + (u2 - r2).powi(2)).sqrt(),
            d + ((u1 - r1).powi(2) + (r2 - l2).powi(2)).sqrt(),
        )
    }

    #[test]
    fn zou_matches_reference() {
        let (lo, hi) = zou_interval(0.5, 50, 0.2, 60, 0.95).unwrap();
        let (rlo, rhi) = zou_reference(0.5, 50.0, 0.2, 60.0);
        assert!(
            (lo - rlo).abs() < 1e-10 && (hi - rhi).abs() < 1e-10,
            "{lo},{hi} vs {rlo},{rhi}"
        );
        assert!(lo < 0.3 && 0.3 < hi);
    }

    #[test]
    fn zou_symmetric_at_zero() {
        let (lo, hi) = zou_interval(0.0, 30, 0.0, 30, 0.95).unwrap();
        assert!((lo + hi).abs() < 1e-15);
        assert!(zou_interval(0.1, 30, 0.2, 30, 1.0).is_err());
        assert!(zou_interval(0.1, 30, 0.2, 30, 0.0).is_err());
    }

    #[test]
    fn infer_n_examples() {
        let n = infer_group_n(-12.6348, -0.77, -0.34).unwrap();
        assert!((n - 722.0).abs() < 2.0, "{n}");
        let n = infer_group_n(-0.82, -0.77, -0.34).unwrap();
        assert!((n - 6.0).abs() < 0.1, "{n}");
        assert_eq!(infer_group_n(0.0, -0.77, -0.34), Err(StatsError::ZeroZ));
        assert_eq!(infer_group_n(1.0, 0.2, 0.2), Err(StatsError::EqualR));
    }

    proptest! {
        #[test]
        fn pearson_affine_invariance(
            pts in proptest::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 3..20),
            a in 0.1f64..10.0, b in -50.0f64..50.0, c in 0.1f64..10.0, d in -50.0f64..50.0,
        ) {
            let (xs, ys) = split(&pts);
            prop_assume!(pearson_r(&xs, &ys).is_ok());
            let r = pearson_r(&xs, &ys).unwrap();
            let tx: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
            let ty: Vec<f64> = ys.iter().map(|y| c * y + d).collect();
            prop_assert!((pearson_r(&tx, &ty).unwrap() - r).abs() < 1e-9);
            let neg: Vec<f64> = ys.iter().map(|y| -y).collect();
            prop_assert!((pearson_r(&xs, &neg).unwrap() + r).abs() < 1e-12);
            prop_assert!(r.abs() <= 1.0);
        }

        #[test]
        fn fisher_odd_and_inverse(r in -0.999f64..0.999) {
            let z = fisher_z(r).unwrap();
            prop_assert_eq!(fisher_z(-r).unwrap(), -z);
            prop_assert!((z.tanh() - r).abs() < 1e-12);
        }

        #[test]
        fn z_test_antisymmetric(r1 in -0.99f64..0.99, r2 in -0.99f64..0.99, n1 in 4usize..500, n2 in 4usize..500) {
            let (z, p) = indep_groups_z_test(r1, n1, r2, n2).unwrap();
            let (zs, ps) = indep_groups_z_test(r2, n2, r1, n1).unwrap();
            prop_assert_eq!(z, -zs);
            prop_assert_eq!(p, ps);
            prop_assert!((0.0..=1.0).contains(&p));
        }

        #[test]
        fn zou_contains_difference_and_shrinks(r1 in -0.99f64..0.99, r2 in -0.99f64..0.99, n in 4usize..2000) {
            let (lo, hi) = zou_interval(r1, n, r2, n, 0.95).unwrap();
            prop_assert!(lo <= r1 - r2 && r1 - r2 <= hi);
            prop_assert!(lo < hi);
            let (lo2, hi2) = zou_interval(r1, n + 1, r2, n, 0.95).unwrap();
            prop_assert!(hi2 - lo2 < hi - lo);
            let (lo3, hi3) = zou_interval(r1, n, r2, n + 1, 0.95).unwrap();
            prop_assert!(hi3 - lo3 < hi - lo);
        }

        #[test]
        fn t_and_significance_share_sign(r in -0.99f64..0.99, n in 3usize..100) {
            let (t, p) = correlation_significance(r, n).unwrap();
            prop_assert!(t == 0.0 || t.signum() == r.signum());
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }
}
