//! Brute-force photon-number-resolved model of the honest channel.
//!
//! Each photon of an `n`-photon pulse survives independently with
//! probability `eta`, and background counts are added on top:
//! `Y_n = Y0 + 1 - (1 - eta)^n` (capped at 1) and
//! `e_n Y_n = e0 Y0 + e_det (1 - (1 - eta)^n)`. Summing these against the
//! Poisson weights reproduces the closed-form gain and QBER, which makes the
//! per-`n` values a ground truth to test every decoy estimate against.
//!
//! Nothing in here calls the estimators or the closed-form channel model.

use crate::model::{poisson_weight, transmittance, ChannelParams, BACKGROUND_ERROR_RATE};
use crate::rates::{binary_entropy, SARG04_SIFTING};

/// Default Poisson truncation. For `mu <= 1` the tail beyond is below 1e-30.
pub const DEFAULT_N_MAX: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactPhotonStats {
    pub n: u32,
    pub photon_yield: f64,
    pub error_rate: f64,
}

impl ExactPhotonStats {
    /// `Q_n = Y_n P_n(mu)`.
    pub fn gain(&self, mu: f64) -> f64 {
        self.photon_yield * poisson_weight(mu, self.n).unwrap_or(0.0)
    }
}

/// Exact yield and error rate of an `n`-photon pulse.
pub fn exact_stats(n: u32, params: &ChannelParams) -> ExactPhotonStats {
    let eta = transmittance(params);
    let lost = (1.0 - eta).powi(n as i32);
    let detected = 1.0 - lost;
    let photon_yield = (params.y0 + detected).min(1.0);
    let error_rate = if n == 0 || photon_yield == 0.0 {
        BACKGROUND_ERROR_RATE
    } else {
        (BACKGROUND_ERROR_RATE * params.y0 + params.e_det * detected) / photon_yield
    };
    ExactPhotonStats {
        n,
        photon_yield,
        error_rate,
    }
}

/// Gain and QBER rebuilt from the photon-number decomposition, truncated at
/// `n_max` photons.
pub fn reconstruct_gain(mu: f64, params: &ChannelParams, n_max: u32) -> (f64, f64) {
    let (gain, errors) = (0..=n_max).fold((0.0, 0.0), |(q, qe), n| {
        let s = exact_stats(n, params);
        let g = s.gain(mu);
        (q + g, qe + g * s.error_rate)
    });
    let qber = if gain > 0.0 {
        errors / gain
    } else {
        BACKGROUND_ERROR_RATE
    };
    (gain, qber)
}

/// Nonorthogonal-encoding rate with the true vacuum, one- and two-photon
/// gains and error rates, and the signal observables from the series.
pub fn exact_nonorthogonal_rate(mu: f64, params: &ChannelParams) -> f64 {
    let (gain, qber) = reconstruct_gain(mu, params, DEFAULT_N_MAX);
    let term = |n: u32| {
        let s = exact_stats(n, params);
        s.gain(mu) * (1.0 - h2(s.error_rate.min(0.5)))
    };
    let q0 = exact_stats(0, params).gain(mu);
    SARG04_SIFTING * (-gain * params.f_ec * h2(qber.min(0.5)) + q0 + term(1) + term(2))
}

fn h2(x: f64) -> f64 {
    binary_entropy(x.clamp(0.0, 1.0)).unwrap_or(1.0)
}

/// Maximum of `a^i - b^i - (a^p - b^p)` over a grid, for one of the two tail
/// inequalities behind the decoy bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaCheck {
    /// Upper end of the `(0, limit]` domain.
    pub limit: f64,
    /// Exponent on the right-hand side.
    pub power: i32,
    pub max_violation: f64,
    pub points: usize,
}

impl LemmaCheck {
    pub fn holds(&self) -> bool {
        self.max_violation <= 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaReport {
    /// `a^i - b^i <= a^2 - b^2`, `0 < b < a <= 2/3`, `i in 2..=10`.
    pub lemma1: LemmaCheck,
    /// `a^i - b^i <= a^3 - b^3`, `0 < b < a <= 3/4`, `i in 3..=10`.
    pub lemma2: LemmaCheck,
    /// `(a^3 - b^3) - (a^2 - b^2)` at `a = 0.9`, `b = 0.89`, outside lemma 1's
    /// domain. Positive.
    pub counterexample_excess: f64,
}

const GRID: usize = 100;
const MAX_EXPONENT: i32 = 10;

fn check_lemma(limit: f64, power: i32) -> LemmaCheck {
    let mut max_violation = f64::NEG_INFINITY;
    let mut points = 0;
    for ka in 1..=GRID {
        let a = limit * ka as f64 / GRID as f64;
        for kb in 1..ka {
            let b = limit * kb as f64 / GRID as f64;
            let rhs = a.powi(power) - b.powi(power);
            for i in power..=MAX_EXPONENT {
                let v = a.powi(i) - b.powi(i) - rhs;
                max_violation = max_violation.max(v);
                points += 1;
            }
        }
    }
    LemmaCheck {
        limit,
        power,
        max_violation,
        points,
    }
}

/// Grid-checks both tail inequalities and evaluates the out-of-domain
/// counterexample.
pub fn verify_bound_inequalities() -> LemmaReport {
    let (a, b) = (0.9f64, 0.89f64);
    LemmaReport {
        lemma1: check_lemma(2.0 / 3.0, 2),
        lemma2: check_lemma(0.75, 3),
        counterexample_excess: (a.powi(3) - b.powi(3)) - (a * a - b * b),
    }
}
