use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::{Error, Result};

/// Printed with every t-test result.
pub const NORMALITY_CAVEAT: &str =
    "the pooled t-test assumes approximately normal per-seed values with equal variances";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub values: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single value.
    pub std: f64,
}

pub fn summarize(values: &[f64]) -> DistributionSummary {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    DistributionSummary { values: values.to_vec(), mean, std }
}

/// Pooled-variance two-sample comparison of per-seed results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedDistribution {
    pub a: DistributionSummary,
    pub b: DistributionSummary,
    /// Serialised as a string when infinite.
    #[serde(with = "extended_f64")]
    pub t: f64,
    pub df: usize,
    pub p_value: f64,
    /// Both samples have zero variance.
    pub degenerate: bool,
}

pub fn compare_distributions(a: &[f64], b: &[f64]) -> Result<SeedDistribution> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Config(format!(
            "t-test needs at least two values per group, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let sa = summarize(a);
    let sb = summarize(b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let df = a.len() + b.len() - 2;
    let pooled = ((na - 1.0) * sa.std.powi(2) + (nb - 1.0) * sb.std.powi(2)) / df as f64;
    let diff = sa.mean - sb.mean;
    if pooled == 0.0 {
        let (t, p) = if diff == 0.0 { (0.0, 1.0) } else { (diff.signum() * f64::INFINITY, 0.0) };
        return Ok(SeedDistribution { a: sa, b: sb, t, df, p_value: p, degenerate: true });
    }
    let t = diff / (pooled * (1.0 / na + 1.0 / nb)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df as f64).expect("positive df");
    let p = (2.0 * dist.cdf(-t.abs())).min(1.0);
    Ok(SeedDistribution { a: sa, b: sb, t, df, p_value: p, degenerate: false })
}

mod extended_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("bad float {other:?}"))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_small_groups() {
        // means 2 and 5, both variances 1: t = -3 / sqrt(2/3)
        let r = compare_distributions(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert_eq!(r.df, 4);
        assert!((r.t - (-3.0 / (2.0f64 / 3.0).sqrt())).abs() < 1e-12);
        assert!((r.t + 3.674).abs() < 1e-3);
        assert!(r.p_value > 0.0 && r.p_value < 0.05);
    }

    #[test]
    fn identical_groups() {
        let v = [3.0, 1.0, 4.0, 1.0, 5.0];
        let r = compare_distributions(&v, &v).unwrap();
        assert_eq!(r.t, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn thirty_one_each_gives_sixty_df() {
        let a: Vec<f64> = (0..31).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..31).map(|i| i as f64 * 1.5).collect();
        assert_eq!(compare_distributions(&a, &b).unwrap().df, 60);
    }

    #[test]
    fn degenerate_variance() {
        let r = compare_distributions(&[2.0, 2.0], &[3.0, 3.0]).unwrap();
        assert!(r.degenerate && r.t == f64::NEG_INFINITY && r.p_value == 0.0);
        let json = serde_json::to_string(&r).unwrap();
        let back: SeedDistribution = serde_json::from_str(&json).unwrap();
        assert_eq!(back.t, f64::NEG_INFINITY);
        assert!(compare_distributions(&[1.0], &[2.0, 3.0]).is_err());
    }

    #[test]
    fn single_value_summary() {
        assert_eq!(summarize(&[4.0]).std, 0.0);
    }
}
