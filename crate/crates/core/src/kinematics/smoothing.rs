use nalgebra::DMatrix;

use super::KinematicsError;

const SPACING_TOLERANCE: f64 = 1e-6;

/// Savitzky-Golay smoothing of uniformly spaced `(t, value)` samples.
///
/// Each interior output is the degree-`polyorder` least-squares fit over the
/// centred window, evaluated at the centre. The first and last `window / 2`
/// samples take the fit of the first or last full window evaluated at their
/// own offsets, so polynomials up to `polyorder` pass through unchanged.
pub fn savitzky_golay(
    samples: &[(f64, f64)],
    window: usize,
    polyorder: usize,
) -> Result<Vec<(f64, f64)>, KinematicsError> {
    if window.is_multiple_of(2) {
        return Err(KinematicsError::BadWindow(format!(
            "window {window} is even"
        )));
    }
    if window <= polyorder {
        return Err(KinematicsError::BadWindow(format!(
            "window {window} must exceed polyorder {polyorder}"
        )));
    }
    if window > samples.len() {
        return Err(KinematicsError::BadWindow(format!(
            "window {window} exceeds {} samples",
            samples.len()
        )));
    }
    check_uniform(samples)?;

    let half = window / 2;
    let weights = window_weights(window, polyorder);
    let apply = |start: usize, row: usize| -> f64 {
        (0..window)
            .map(|j| weights[(row, j)] * samples[start + j].1)
            .sum()
    };

    let n = samples.len();
    let out = (0..n)
        .map(|i| {
            let v = if i < half {
                apply(0, i)
            } else if i + half >= n {
                apply(n - window, i + window - n)
            } else {
                apply(i - half, half)
            };
            (samples[i].0, v)
        })
        .collect();
    Ok(out)
}

fn check_uniform(samples: &[(f64, f64)]) -> Result<(), KinematicsError> {
    if samples.len() < 2 {
        return Ok(());
    }
    let span = samples[samples.len() - 1].0 - samples[0].0;
    let mean = span / (samples.len() - 1) as f64;
    for (i, w) in samples.windows(2).enumerate() {
        let step = w[1].0 - w[0].0;
        if !((step - mean).abs() <= SPACING_TOLERANCE * mean.abs()) {
            return Err(KinematicsError::NonUniform { index: i });
        }
    }
    Ok(())
}

/// Row `r` holds the weights that evaluate the window's least-squares fit at
/// offset `r - half`.
fn window_weights(window: usize, polyorder: usize) -> DMatrix<f64> {
    let half = (window / 2) as f64;
    let scale = if half > 0.0 { half } else { 1.0 };
    let design = DMatrix::from_fn(window, polyorder + 1, |i, k| {
        ((i as f64 - half) / scale).powi(k as i32)
    });
    let pinv = design
        .clone()
        .pseudo_inverse(1e-14)
        .expect("Vandermonde on distinct nodes has full column rank");
    design * pinv
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(n: usize, f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        (0..n)
            .map(|i| {
                let t = -3.0 + 0.25 * i as f64;
                (t, f(t))
            })
            .collect()
    }

    #[test]
    fn reproduces_cubic() {
        let s = uniform(40, |x| x * x * x - 2.0 * x);
        let out = savitzky_golay(&s, 7, 3).unwrap();
        for (a, b) in s.iter().zip(&out) {
            assert_eq!(a.0, b.0);
            assert!((a.1 - b.1).abs() < 1e-9, "{a:?} {b:?}");
        }
    }

    #[test]
    fn constant_stays_constant() {
        let s = uniform(11, |_| 5.0);
        for (_, v) in savitzky_golay(&s, 5, 2).unwrap() {
            assert!((v - 5.0).abs() < 1e-12);
        }
    }

    #[test]
    fn window_errors() {
        let s = uniform(10, |x| x);
        assert!(matches!(
            savitzky_golay(&s, 4, 2),
            Err(KinematicsError::BadWindow(_))
        ));
        assert!(matches!(
            savitzky_golay(&s, 3, 3),
            Err(KinematicsError::BadWindow(_))
        ));
        assert!(matches!(
            savitzky_golay(&s, 11, 2),
            Err(KinematicsError::BadWindow(_))
        ));
    }

    #[test]
    fn non_uniform_is_rejected() {
        let mut s = uniform(10, |x| x);
        s[4].0 += 0.01;
        assert!(matches!(
            savitzky_golay(&s, 5, 2),
            Err(KinematicsError::NonUniform { .. })
        ));
    }

    #[test]
    fn window_equal_to_length_is_allowed() {
        let s = uniform(7, |x| x * x);
        let out = savitzky_golay(&s, 7, 2).unwrap();
        assert!((out[0].1 - s[0].1).abs() < 1e-9);
    }
}
