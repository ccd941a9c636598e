//! Decoy-state estimates of the vacuum, single-photon and two-photon
//! contributions to the signal gain.
//!
//! With three weak decoys `nu1 > nu2 > nu3` plus vacuum, the observables
//! `Q_x e^x = sum_n Y_n x^n / n!` are linear in the unknown yields. Bounding
//! the tail `n >= 2` (resp. `n >= 3`) by the signal's own tail gives a lower
//! bound on `Y1` (resp. `Y2`); discarding every term but one in the `nu3`
//! error tally gives the matching error-rate upper bounds.
//!
//! The tail bounds rely on `a^i - b^i <= a^2 - b^2` for `0 < b < a <= 2/3`,
//! `i >= 2`, and `a^i - b^i <= a^3 - b^3` for `0 < b < a <= 3/4`, `i >= 3`,
//! applied to `a = nu/mu`. That is where the ordering constraints checked in
//! [`validate_intensities`] come from.

use crate::error::{BoundsError, IntensityViolation};
use crate::model::{IntensitySet, ObservedTally, TallySet, BACKGROUND_ERROR_RATE};

/// Allowed residual of `nu1 - nu2 - (nu1^3 - nu2^3) / mu^2`.
pub const CUBIC_TOLERANCE: f64 = 1e-9;

/// Relative slack on the non-strict upper limits `nu2 <= 2mu/3` and
/// `nu1 <= 3mu/4`, so that `nu1 = 0.225` passes for `mu = 0.3`.
const LIMIT_SLACK: f64 = 1e-12;

/// Checks every ordering constraint and the cubic `nu1/nu2` coupling,
/// reporting all violations at once.
pub fn validate_intensities(raw: &IntensitySet) -> Result<IntensitySet, BoundsError> {
    let IntensitySet { mu, nu1, nu2, nu3 } = *raw;
    if ![mu, nu1, nu2, nu3].iter().all(|v| v.is_finite()) {
        return Err(BoundsError::Intensities(vec![
            IntensityViolation::NonFinite,
        ]));
    }
    if !(mu > 0.0) {
        return Err(BoundsError::NonPositiveMu(mu));
    }

    let mut violations = Vec::new();
    let two_thirds = 2.0 * mu / 3.0;
    let three_quarters = 0.75 * mu;
    if !(nu3 > 0.0) {
        violations.push(IntensityViolation::Nu3NotPositive { nu3 });
    }
    if !(nu3 < nu2) {
        violations.push(IntensityViolation::Nu3NotBelowNu2 { nu3, nu2 });
    }
    if nu2 > two_thirds * (1.0 + LIMIT_SLACK) {
        violations.push(IntensityViolation::Nu2AboveTwoThirdsMu {
            nu2,
            limit: two_thirds,
        });
    }
    if !(nu1 > two_thirds) {
        violations.push(IntensityViolation::Nu1NotAboveTwoThirdsMu {
            nu1,
            limit: two_thirds,
        });
    }
    if nu1 > three_quarters * (1.0 + LIMIT_SLACK) {
        violations.push(IntensityViolation::Nu1AboveThreeQuartersMu {
            nu1,
            limit: three_quarters,
        });
    }
    if !(nu1 + nu2 > mu) {
        violations.push(IntensityViolation::Nu1PlusNu2NotAboveMu { sum: nu1 + nu2, mu });
    }
    if !(nu2 + nu3 < mu) {
        violations.push(IntensityViolation::Nu2PlusNu3NotBelowMu { sum: nu2 + nu3, mu });
    }
    let residual = cubic_residual(raw);
    if !(residual.abs() <= CUBIC_TOLERANCE) {
        violations.push(IntensityViolation::CubicResidual {
            residual,
            tolerance: CUBIC_TOLERANCE,
        });
    }

    if violations.is_empty() {
        Ok(*raw)
    } else {
        Err(BoundsError::Intensities(violations))
    }
}

/// `nu1 - nu2 - (nu1^3 - nu2^3) / mu^2`; zero makes the `Y1` term drop out of
/// the two-photon estimate.
pub fn cubic_residual(set: &IntensitySet) -> f64 {
    let IntensitySet { mu, nu1, nu2, .. } = *set;
    nu1 - nu2 - (nu1.powi(3) - nu2.powi(3)) / (mu * mu)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Background {
    pub y0: f64,
    pub e0: f64,
}

/// Background yield from the vacuum decoy. The error rate is always 1/2,
/// whatever the vacuum QBER reads.
pub fn estimate_background(vacuum: &ObservedTally) -> Result<Background, BoundsError> {
    if vacuum.intensity != 0.0 {
        return Err(BoundsError::NotVacuum(vacuum.intensity));
    }
    Ok(Background {
        y0: vacuum.gain,
        e0: BACKGROUND_ERROR_RATE,
    })
}

/// Outcome flags for a bound that had to be clamped.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BoundFlags {
    /// The yield formula came out non-positive; the contribution is zero.
    pub no_yield: bool,
    /// The error-rate bound left its allowed range and was clamped.
    pub error_clamped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinglePhotonBound {
    pub y1_lower: f64,
    pub e1_upper: f64,
    pub q1_lower: f64,
    pub flags: BoundFlags,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonBound {
    pub y2_lower: f64,
    pub q2_lower: f64,
    pub e2_upper: f64,
    pub flags: BoundFlags,
}

/// `Q_x e^x`, the Poisson-unweighted gain.
fn scaled_gain(t: &ObservedTally) -> f64 {
    t.gain * t.intensity.exp()
}

/// `E_x Q_x e^x`.
fn scaled_error(t: &ObservedTally) -> f64 {
    t.qber * t.gain * t.intensity.exp()
}

/// Lower bound on `Y1` from the `nu2`/`nu3` decoys, upper bound on `e1` from
/// the `nu3` error tally, and the matching `Q1` lower bound.
///
/// A non-positive `Y1` estimate is reported through `flags.no_yield` with the
/// whole single-photon contribution set to zero; `e1` above 1/2 is clamped.
pub fn bound_single_photon(
    tallies: &TallySet,
    intensities: &IntensitySet,
    background: Background,
) -> Result<SinglePhotonBound, BoundsError> {
    let IntensitySet { mu, nu2, nu3, .. } = *intensities;
    if !(mu > 0.0) {
        return Err(BoundsError::NonPositiveMu(mu));
    }
    if nu2 == nu3 {
        return Err(BoundsError::Degenerate("nu2 == nu3"));
    }
    if mu == nu2 + nu3 {
        return Err(BoundsError::Degenerate("nu2 + nu3 == mu"));
    }
    let Background { y0, e0 } = background;

    let numerator = mu * mu * (scaled_gain(&tallies.nu2) - scaled_gain(&tallies.nu3))
        - (nu2 * nu2 - nu3 * nu3) * (scaled_gain(&tallies.signal) - y0);
    let denominator = mu * (nu2 - nu3) * (mu - nu2 - nu3);
    let y1 = numerator / denominator;

    let mut flags = BoundFlags::default();
    if !(y1 > 0.0) {
        flags.no_yield = true;
        return Ok(SinglePhotonBound {
            y1_lower: 0.0,
            e1_upper: BACKGROUND_ERROR_RATE,
            q1_lower: 0.0,
            flags,
        });
    }
    let y1 = y1.min(1.0);

    let mut e1 = ((scaled_error(&tallies.nu3) - e0 * y0) / (y1 * nu3)).max(0.0);
    if e1 > BACKGROUND_ERROR_RATE {
        e1 = BACKGROUND_ERROR_RATE;
        flags.error_clamped = true;
    }

    Ok(SinglePhotonBound {
        y1_lower: y1,
        e1_upper: e1,
        q1_lower: y1 * mu * (-mu).exp(),
        flags,
    })
}

/// Lower bound on `Y2` (and `Q2`) from the `nu1`/`nu2` decoys, upper bound on
/// `e2` from the `nu3` error tally.
///
/// Assumes the cubic coupling between `nu1` and `nu2` holds; the `Y1` term is
/// then absent from the estimate. `e2` is clamped to `[0, 1]`.
pub fn bound_two_photon(
    tallies: &TallySet,
    intensities: &IntensitySet,
    background: Background,
) -> Result<TwoPhotonBound, BoundsError> {
    let IntensitySet { mu, nu1, nu2, nu3 } = *intensities;
    if !(mu > 0.0) {
        return Err(BoundsError::NonPositiveMu(mu));
    }
    if !(nu1 + nu2 > mu) {
        return Err(BoundsError::Intensities(vec![
            IntensityViolation::Nu1PlusNu2NotAboveMu { sum: nu1 + nu2, mu },
        ]));
    }
    if nu1 == nu2 {
        return Err(BoundsError::Degenerate("nu1 == nu2"));
    }
    if !(nu3 > 0.0) {
        return Err(BoundsError::Intensities(vec![
            IntensityViolation::Nu3NotPositive { nu3 },
        ]));
    }
    let Background { y0, e0 } = background;

    let numerator = 2.0 * mu * (scaled_gain(&tallies.nu1) - scaled_gain(&tallies.nu2))
        - 2.0 * (nu1 - nu2) * (scaled_gain(&tallies.signal) - y0);
    let denominator = mu * (nu1 - nu2) * (nu1 + nu2 - mu);
    let y2 = numerator / denominator;

    let mut flags = BoundFlags::default();
    if !(y2 > 0.0) {
        flags.no_yield = true;
        return Ok(TwoPhotonBound {
            y2_lower: 0.0,
            q2_lower: 0.0,
            e2_upper: BACKGROUND_ERROR_RATE,
            flags,
        });
    }
    let y2 = y2.min(1.0);

    let raw_e2 = (2.0 * scaled_error(&tallies.nu3) - 2.0 * e0 * y0) / (y2 * nu3 * nu3);
    let e2 = raw_e2.clamp(0.0, 1.0);
    flags.error_clamped = e2 != raw_e2;

    Ok(TwoPhotonBound {
        y2_lower: y2,
        q2_lower: y2 * mu * mu * (-mu).exp() / 2.0,
        e2_upper: e2,
        flags,
    })
}

/// Every photon-number estimate the key-rate formulas need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonBounds {
    pub y0: f64,
    pub e0: f64,
    pub y1_lower: f64,
    pub e1_upper: f64,
    pub q1_lower: f64,
    pub y2_lower: f64,
    pub q2_lower: f64,
    pub e2_upper: f64,
    /// Vacuum contribution to the signal gain, `Y0 e^-mu`.
    pub q0: f64,
    pub single_flags: BoundFlags,
    pub two_flags: BoundFlags,
}

/// Validates the intensities and runs the full estimation chain.
pub fn estimate_photon_bounds(
    tallies: &TallySet,
    intensities: &IntensitySet,
) -> Result<PhotonBounds, BoundsError> {
    let intensities = validate_intensities(intensities)?;
    let background = estimate_background(&tallies.vacuum)?;
    let single = bound_single_photon(tallies, &intensities, background)?;
    let two = bound_two_photon(tallies, &intensities, background)?;
    Ok(PhotonBounds {
        y0: background.y0,
        e0: background.e0,
        y1_lower: single.y1_lower,
        e1_upper: single.e1_upper,
        q1_lower: single.q1_lower,
        y2_lower: two.y2_lower,
        q2_lower: two.q2_lower,
        e2_upper: two.e2_upper,
        q0: background.y0 * (-intensities.mu).exp(),
        single_flags: single.flags,
        two_flags: two.flags,
    })
}
