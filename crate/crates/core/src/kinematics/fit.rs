use nalgebra::{DMatrix, DVector};

use super::KinematicsError;

pub const MAX_CONDITION: f64 = 1e12;

/// Evaluates `c[0] + c[1] x + ... + c[n] x^n`.
pub fn eval_polynomial(coefficients: &[f64], x: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Least-squares polynomial coefficients, lowest order first.
///
/// The abscissae are mapped onto `[-1, 1]` before solving; the condition
/// number check applies to that scaled design matrix.
pub fn fit_polynomial(samples: &[(f64, f64)], degree: usize) -> Result<Vec<f64>, KinematicsError> {
    if samples.len() <= degree {
        return Err(KinematicsError::TooFewSamples {
            needed: degree,
            got: samples.len(),
        });
    }
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(t, _)| {
            (lo.min(t), hi.max(t))
        });
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let scale = if half > 0.0 { half } else { 1.0 };

    let cols = degree + 1;
    let design = DMatrix::from_fn(samples.len(), cols, |i, k| {
        ((samples[i].0 - center) / scale).powi(k as i32)
    });
    let rhs = DVector::from_iterator(samples.len(), samples.iter().map(|&(_, v)| v));

    let svd = design.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let cond = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if !(cond <= MAX_CONDITION) {
        return Err(KinematicsError::RankDeficient(cond));
    }
    let scaled = svd
        .solve(&rhs, 0.0)
        .map_err(|_| KinematicsError::RankDeficient(cond))?;

    // expand sum b_k ((x - c)/s)^k into monomials of x
    let mut out = vec![0.0; cols];
    let mut binom = vec![1.0f64; cols];
    for k in 0..cols {
        if k > 0 {
            for j in (1..k).rev() {
                binom[j] += binom[j - 1];
            }
            binom[k] = 1.0;
        }
        let bk = scaled[k] / scale.powi(k as i32);
        for j in 0..=k {
            out[j] += bk * binom[j] * (-center).powi((k - j) as i32);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points_give_the_interpolating_line() {
        let c = fit_polynomial(&[(1.0, 3.0), (3.0, 7.0)], 1).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-12);
        assert!((c[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn repeated_abscissa_is_rank_deficient() {
        let s = [(2.0, 1.0), (2.0, 2.0), (2.0, 3.0)];
        assert!(matches!(
            fit_polynomial(&s, 1),
            Err(KinematicsError::RankDeficient(_))
        ));
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(
            fit_polynomial(&[(0.0, 0.0), (1.0, 1.0)], 2),
            Err(KinematicsError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn degree_zero_is_the_mean() {
        let c = fit_polynomial(&[(0.0, 1.0), (1.0, 2.0), (2.0, 6.0)], 0).unwrap();
        assert!((c[0] - 3.0).abs() < 1e-12);
    }
}
