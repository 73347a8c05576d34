use std::sync::OnceLock;

use super::KinematicsError;

/// Quartic fit of foot height (mm) against motion-analysis time-units.
pub const DEFAULT_LIFT_COEFFICIENTS: [f64; 5] =
    [27.66182, -1.67994, -0.00283, 0.00147, -1.59275e-5];

pub const DEFAULT_CONTACT_THRESHOLD_MM: f64 = 3.0;

/// Recurrence band for the default profile. Other profiles scale it by
/// `|h(0)| / DEFAULT_LIFT_COEFFICIENTS[0]` so the derived period is invariant
/// under uniform scaling of the coefficients.
pub const RECURRENCE_TOLERANCE_MM: f64 = 0.5;

const PERIOD_SEARCH_LIMIT: f64 = 1000.0;
const PERIOD_SCAN_STEPS: usize = 1_000_000;
const EXTREMUM_SAMPLES: usize = 20_000;

fn horner(c: &[f64; 5], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

fn horner_slope(c: &[f64; 5], x: f64) -> f64 {
    ((4.0 * c[4] * x + 3.0 * c[3]) * x + 2.0 * c[2]) * x + c[1]
}

/// Smallest `T > 0` at which the quartic returns to its starting height while
/// rising, after first leaving the recurrence band around `h(0)`.
pub fn derive_period(coefficients: &[f64; 5]) -> Result<f64, KinematicsError> {
    if coefficients.iter().any(|c| !c.is_finite()) {
        return Err(KinematicsError::InvalidProfile(
            "non-finite coefficient".into(),
        ));
    }
    let h0 = coefficients[0];
    let tol = RECURRENCE_TOLERANCE_MM * h0.abs() / DEFAULT_LIFT_COEFFICIENTS[0];
    let recurs =
        |x: f64| (horner(coefficients, x) - h0).abs() <= tol && horner_slope(coefficients, x) > 0.0;
    let step = PERIOD_SEARCH_LIMIT / PERIOD_SCAN_STEPS as f64;
    let mut left_band = false;
    let mut prev = 0.0;
    for i in 1..=PERIOD_SCAN_STEPS {
        let x = i as f64 * step;
        if !left_band {
            if (horner(coefficients, x) - h0).abs() > tol {
                left_band = true;
            }
        } else if recurs(x) {
            // predicate flips between prev and x
            let (mut lo, mut hi) = (prev, x);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if recurs(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(hi);
        }
        prev = x;
    }
    Err(KinematicsError::NoPeriod)
}

/// Periodic foot-height function of gait time.
///
/// Heights are clamped at zero (the physical ground). The period is derived
/// from the coefficients at construction and never changes afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftProfile {
    coefficients: [f64; 5],
    period: f64,
    contact_threshold: f64,
    stance_center: f64,
    peak: f64,
    stance_window: (f64, f64),
}

impl Default for LiftProfile {
    fn default() -> Self {
        static DEFAULT: OnceLock<LiftProfile> = OnceLock::new();
        DEFAULT
            .get_or_init(|| {
                LiftProfile::new(DEFAULT_LIFT_COEFFICIENTS, DEFAULT_CONTACT_THRESHOLD_MM)
                    .expect("default lift profile is periodic")
            })
            .clone()
    }
}

impl LiftProfile {
    pub fn new(coefficients: [f64; 5], contact_threshold: f64) -> Result<Self, KinematicsError> {
        if !(contact_threshold.is_finite() && contact_threshold >= 0.0) {
            return Err(KinematicsError::InvalidProfile(format!(
                "contact threshold {contact_threshold} must be a nonnegative number"
            )));
        }
        let period = derive_period(&coefficients)?;
        let mut profile = Self {
            coefficients,
            period,
            contact_threshold,
            stance_center: 0.0,
            peak: 0.0,
            stance_window: (0.0, 0.0),
        };
        let (argmin, argmax) = profile.extrema();
        profile.stance_center = argmin;
        profile.peak = profile.height(argmax);
        profile.stance_window = profile.contact_window();
        Ok(profile)
    }

    pub fn coefficients(&self) -> &[f64; 5] {
        &self.coefficients
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn contact_threshold(&self) -> f64 {
        self.contact_threshold
    }

    /// Unclamped polynomial value at `x` (no wrapping).
    pub fn raw(&self, x: f64) -> f64 {
        horner(&self.coefficients, x)
    }

    pub fn wrap(&self, t: f64) -> f64 {
        let x = t.rem_euclid(self.period);
        // rem_euclid can round up to the modulus for tiny negative inputs
        if x >= self.period {
            0.0
        } else {
            x
        }
    }

    /// Foot height in mm at gait time `t`.
    pub fn height(&self, t: f64) -> f64 {
        self.raw(self.wrap(t)).max(0.0)
    }

    pub fn is_contact(&self, t: f64) -> bool {
        self.height(t) <= self.contact_threshold
    }

    /// Time of the lowest foot point within one period.
    pub fn stance_center(&self) -> f64 {
        self.stance_center
    }

    /// Maximum height over one period.
    pub fn peak(&self) -> f64 {
        self.peak
    }

    /// Entry and exit times of the contiguous contact window around the
    /// stance centre. Equal values mean the foot never touches down.
    pub fn stance_window(&self) -> (f64, f64) {
        self.stance_window
    }

    pub fn stance_fraction(&self) -> f64 {
        let (a, b) = self.stance_window;
        (b - a) / self.period
    }

    fn extrema(&self) -> (f64, f64) {
        let t = self.period;
        let mut argmin = 0.0;
        let mut argmax = 0.0;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..EXTREMUM_SAMPLES {
            let x = t * i as f64 / EXTREMUM_SAMPLES as f64;
            let y = self.raw(x);
            if y < lo {
                lo = y;
                argmin = x;
            }
            if y > hi {
                hi = y;
                argmax = x;
            }
        }
        let h = t / EXTREMUM_SAMPLES as f64;
        (
            self.refine(argmin, h, |y| y),
            self.refine(argmax, h, |y| -y),
        )
    }

    /// Golden-section refinement of a sampled minimum of `key(raw(x))`.
    fn refine(&self, x0: f64, h: f64, key: impl Fn(f64) -> f64) -> f64 {
        let lo_bound = 0.0;
        let hi_bound = self.period;
        let (mut a, mut b) = ((x0 - h).max(lo_bound), (x0 + h).min(hi_bound));
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..100 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if key(self.raw(c)) < key(self.raw(d)) {
                b = d;
            } else {
                a = c;
            }
        }
        let x = 0.5 * (a + b);
        // keep sampled endpoints when the extremum sits on the boundary
        if key(self.raw(x0)) < key(self.raw(x)) {
            x0
        } else {
            x
        }
    }

    fn contact_window(&self) -> (f64, f64) {
        let c = self.stance_center;
        if !self.is_contact(c) {
            return (c, c);
        }
        let edge = |dir: f64| {
            // march out of contact, then bisect the crossing
            let step = self.period / 4096.0;
            let mut inside = c;
            let mut k = 1;
            loop {
                let x = c + dir * step * k as f64;
                if (x - c).abs() >= self.period / 2.0 {
                    return c + dir * self.period / 2.0;
                }
                if !self.is_contact(x) {
                    let (mut a, mut b) = (inside, x);
                    for _ in 0..80 {
                        let m = 0.5 * (a + b);
                        if self.is_contact(m) {
                            a = m;
                        } else {
                            b = m;
                        }
                    }
                    return a;
                }
                inside = x;
                k += 1;
            }
        };
        (edge(-1.0), edge(1.0))
    }
}
