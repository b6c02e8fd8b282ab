//! McNemar's test for paired classifiers and variance inflation factors.

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, DiscreteCDF};

use crate::error::{Error, Result};

/// Below this many discordant items the exact binomial test is used.
pub const EXACT_THRESHOLD: u64 = 25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McNemar {
    pub b: u64,
    pub c: u64,
    /// Continuity-corrected chi-square statistic; `None` for the exact test.
    pub statistic: Option<f64>,
    pub p_value: f64,
    pub exact: bool,
    /// No discordant items: the test is undefined and `p_value` is 1.
    pub undefined: bool,
}

/// Items only model A got right (`b`) and only model B got right (`c`).
pub fn discordant_counts(a_correct: &[bool], b_correct: &[bool]) -> Result<(u64, u64)> {
    if a_correct.len() != b_correct.len() {
        return Err(Error::domain("correctness vectors differ in length"));
    }
    Ok(a_correct
        .iter()
        .zip(b_correct)
        .fold((0, 0), |(b, c), (&x, &y)| match (x, y) {
            (true, false) => (b + 1, c),
            (false, true) => (b, c + 1),
            _ => (b, c),
        }))
}

/// Two-tailed exact binomial p-value at success probability one half.
pub fn mcnemar_exact(b: u64, c: u64) -> f64 {
    let n = b + c;
    let k = b.min(c);
    if n > 120 {
        let dist = Binomial::new(0.5, n).expect("valid binomial");
        return (2.0 * dist.cdf(k)).min(1.0);
    }
    // Exact integer binomial coefficients; C(120, 60) < 2^117.
    let mut coef: u128 = 1;
    let mut tail: u128 = 0;
    for i in 0..=k {
        if i > 0 {
            coef = coef * u128::from(n - i + 1) / u128::from(i);
        }
        tail += coef;
    }
    let p = 2.0 * tail as f64 / 2f64.powi(n as i32);
    p.min(1.0)
}

/// Continuity-corrected chi-square statistic and its df = 1 upper tail.
pub fn mcnemar_chi_square(b: u64, c: u64) -> (f64, f64) {
    let diff = (b as f64 - c as f64).abs() - 1.0;
    let stat = diff.max(0.0).powi(2) / (b + c) as f64;
    let dist = ChiSquared::new(1.0).expect("df = 1 is valid");
    (stat, dist.sf(stat))
}

pub fn mcnemar_test(b: u64, c: u64) -> McNemar {
    if b + c == 0 {
        return McNemar {
            b,
            c,
            statistic: None,
            p_value: 1.0,
            exact: true,
            undefined: true,
        };
    }
    if b + c < EXACT_THRESHOLD {
        McNemar {
            b,
            c,
            statistic: None,
            p_value: mcnemar_exact(b, c),
            exact: true,
            undefined: false,
        }
    } else {
        let (stat, p) = mcnemar_chi_square(b, c);
        McNemar {
            b,
            c,
            statistic: Some(stat),
            p_value: p,
            exact: false,
            undefined: false,
        }
    }
}

/// Reported in place of an infinite VIF.
pub const VIF_CAP: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vif {
    pub value: f64,
    /// The column is a perfect linear combination of the others.
    pub saturated: bool,
}

/// `1 / (1 - R^2)` for each column regressed (with intercept) on the rest.
pub fn vif(columns: &[&[f64]]) -> Result<Vec<Vif>> {
    let Some(first) = columns.first() else {
        return Ok(Vec::new());
    };
    let n = first.len();
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::domain("VIF columns differ in length"));
    }
    if n < 2 {
        return Err(Error::domain("VIF needs at least two rows"));
    }
    // Centering absorbs the intercept.
    let centered: Vec<Vec<f64>> = columns
        .iter()
        .map(|c| {
            let m = c.iter().sum::<f64>() / n as f64;
            c.iter().map(|x| x - m).collect()
        })
        .collect();
    if let Some(j) = centered.iter().position(|c| c.iter().all(|&x| x == 0.0)) {
        return Err(Error::Undefined(format!(
            "VIF undefined: column {j} is constant"
        )));
    }
    let k = columns.len();
    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        if k == 1 {
            out.push(Vif {
                value: 1.0,
                saturated: false,
            });
            continue;
        }
        let others: Vec<usize> = (0..k).filter(|&i| i != j).collect();
        let x = DMatrix::from_fn(n, others.len(), |r, c| centered[others[c]][r]);
        let y = DVector::from_column_slice(&centered[j]);
        let beta = x
            .clone()
            .svd(true, true)
            .solve(&y, 1e-12)
            .map_err(|e| Error::Undefined(format!("VIF regression failed: {e}")))?;
        let resid = &y - &x * beta;
        let sst = y.norm_squared();
        let r2 = 1.0 - resid.norm_squared() / sst;
        if r2 >= 1.0 - 1e-12 {
            out.push(Vif {
                value: VIF_CAP,
                saturated: true,
            });
        } else {
            out.push(Vif {
                value: 1.0 / (1.0 - r2),
                saturated: false,
            });
        }
    }
    Ok(out)
}
