use statrs::distribution::{ContinuousCDF, StudentsT};

use super::HarnessError;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample (n-1) standard deviation; zero for a single value.
pub fn sample_sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTest {
    pub t: f64,
    pub df: f64,
    /// Two-sided.
    pub p: f64,
}

fn finish(diff: f64, se: f64, df: f64) -> TTest {
    if se == 0.0 {
        return if diff == 0.0 {
            TTest { t: 0.0, df, p: 1.0 }
        } else {
            TTest {
                t: diff.signum() * f64::INFINITY,
                df,
                p: 0.0,
            }
        };
    }
    let t = diff / se;
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    let p = (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0);
    TTest { t, df, p }
}

fn check(a: &[f64], b: &[f64]) -> Result<(), HarnessError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(HarnessError::Config(
            "a t-test needs at least two samples per side".into(),
        ));
    }
    Ok(())
}

/// Unequal-variance t-test with Welch-Satterthwaite degrees of freedom.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<TTest, HarnessError> {
    check(a, b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (sample_sd(a).powi(2) / na, sample_sd(b).powi(2) / nb);
    let se = (va + vb).sqrt();
    let df = if va + vb == 0.0 {
        na + nb - 2.0
    } else {
        (va + vb).powi(2) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0))
    };
    Ok(finish(mean(a) - mean(b), se, df))
}

/// Equal-variance (pooled) Student t-test.
pub fn pooled_t_test(a: &[f64], b: &[f64]) -> Result<TTest, HarnessError> {
    check(a, b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let df = na + nb - 2.0;
    let sp2 = ((na - 1.0) * sample_sd(a).powi(2) + (nb - 1.0) * sample_sd(b).powi(2)) / df;
    let se = (sp2 * (1.0 / na + 1.0 / nb)).sqrt();
    Ok(finish(mean(a) - mean(b), se, df))
}
