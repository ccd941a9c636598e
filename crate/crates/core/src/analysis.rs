//! Rate-vs-distance sweeps, maximal secure distance, and the default decoy
//! intensity construction.

use rayon::prelude::*;

use crate::bounds::{estimate_photon_bounds, validate_intensities};
use crate::error::{AnalysisError, BoundsError, IntensityViolation};
use crate::model::{
    honest_gain, honest_qber, synthesize_tallies, transmittance, ChannelParams, IntensitySet,
    ObservedTally,
};
use crate::rates::{
    optimal_mu_sarg04, rate_bb84_decoy, rate_nonorthogonal_decoy, rate_sarg04_worst,
    untagged_fraction, KeyRatePoint, Protocol,
};

/// Weakest decoy when none is given.
pub const DEFAULT_NU3: f64 = 0.01;

/// Coarse scan step of the cutoff search, km.
const CUTOFF_SCAN_STEP_KM: f64 = 5.0;
/// Final resolution of the cutoff search, km.
const CUTOFF_RESOLUTION_KM: f64 = 0.1;
/// Give up looking for a cutoff beyond this distance.
const CUTOFF_SEARCH_LIMIT_KM: f64 = 2000.0;

/// Decoy set with `nu1 = 3mu/4` and `nu2` the positive root of
/// `nu2^2 + nu1 nu2 + nu1^2 - mu^2 = 0`, which is the cubic coupling
/// `nu1 - nu2 = (nu1^3 - nu2^3) / mu^2` with the `nu1 = nu2` factor removed.
pub fn construct_intensity_set(mu: f64, nu3: f64) -> Result<IntensitySet, BoundsError> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(BoundsError::NonPositiveMu(mu));
    }
    let nu1 = 0.75 * mu;
    // c = nu1^2 - mu^2 < 0, so the product form avoids cancellation
    let c = nu1 * nu1 - mu * mu;
    let disc = (nu1 * nu1 - 4.0 * c).sqrt();
    let nu2 = -2.0 * c / (nu1 + disc);
    validate_intensities(&IntensitySet { mu, nu1, nu2, nu3 })
}

/// How the signal intensity is chosen at each distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MuChoice {
    Fixed(f64),
    /// Re-solved per distance; no-decoy SARG04 only.
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntensityPolicy {
    Explicit(IntensitySet),
    /// Built by [`construct_intensity_set`] from the signal mu.
    Auto {
        nu3: f64,
    },
}

impl Default for IntensityPolicy {
    fn default() -> Self {
        IntensityPolicy::Auto { nu3: DEFAULT_NU3 }
    }
}

/// Everything needed to evaluate one protocol's rate at any distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateModel {
    pub protocol: Protocol,
    pub mu: MuChoice,
    /// `distance_km` is overwritten per evaluation.
    pub params: ChannelParams,
    pub intensities: IntensityPolicy,
}

impl RateModel {
    pub fn new(protocol: Protocol, mu: MuChoice, params: ChannelParams) -> Self {
        Self {
            protocol,
            mu,
            params,
            intensities: IntensityPolicy::default(),
        }
    }

    pub fn with_intensities(self, intensities: IntensityPolicy) -> Self {
        Self {
            intensities,
            ..self
        }
    }

    /// Checks the model once, so a sweep does not fail halfway through.
    pub fn validate(&self) -> Result<(), AnalysisError> {
        self.params.validate()?;
        match (self.protocol, self.mu) {
            (Protocol::Sarg04NoDecoy, _) => {}
            (_, MuChoice::Optimal) => return Err(AnalysisError::OptimalMuUnsupported),
            (_, MuChoice::Fixed(mu)) => {
                self.intensity_set(mu)?;
            }
        }
        if let MuChoice::Fixed(mu) = self.mu {
            if !(mu > 0.0) || !mu.is_finite() {
                return Err(BoundsError::NonPositiveMu(mu).into());
            }
        }
        Ok(())
    }

    fn intensity_set(&self, mu: f64) -> Result<IntensitySet, BoundsError> {
        match self.intensities {
            IntensityPolicy::Explicit(set) => {
                if set.mu != mu {
                    return Err(BoundsError::Degenerate(
                        "explicit intensity set disagrees with the signal mu",
                    ));
                }
                validate_intensities(&set)
            }
            IntensityPolicy::Auto { nu3 } => construct_intensity_set(mu, nu3),
        }
    }

    /// Signal mu and key rate at `distance_km`.
    pub fn evaluate(&self, distance_km: f64) -> Result<KeyRatePoint, AnalysisError> {
        let params = self.params.with_distance(distance_km);
        let (mu, rate) = match self.protocol {
            Protocol::Sarg04NoDecoy => {
                let mu = match self.mu {
                    MuChoice::Fixed(mu) => mu,
                    MuChoice::Optimal => optimal_mu_sarg04(transmittance(&params))?,
                };
                let signal = ObservedTally {
                    intensity: mu,
                    gain: honest_gain(mu, &params),
                    qber: honest_qber(mu, &params)?,
                };
                let omega = untagged_fraction(&signal, mu)?;
                let q0 = params.y0 * (-mu).exp();
                (mu, rate_sarg04_worst(&signal, q0, omega))
            }
            decoy => {
                let MuChoice::Fixed(mu) = self.mu else {
                    return Err(AnalysisError::OptimalMuUnsupported);
                };
                let set = self.intensity_set(mu)?;
                let tallies = synthesize_tallies(&set, &params)?;
                let bounds = estimate_photon_bounds(&tallies, &set)?;
                let rate = if decoy == Protocol::Bb84Decoy {
                    rate_bb84_decoy(&tallies.signal, &bounds, params.f_ec)
                } else {
                    rate_nonorthogonal_decoy(&tallies.signal, &bounds, params.f_ec)
                };
                (mu, rate)
            }
        };
        Ok(KeyRatePoint {
            protocol: self.protocol,
            distance_km,
            mu,
            rate,
        })
    }
}

/// Inclusive distance grid `start, start + step, ..., <= stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl DistanceRange {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self, AnalysisError> {
        let range = Self { start, stop, step };
        if !(step > 0.0) || !(start <= stop) || start < 0.0 || !stop.is_finite() {
            return Err(AnalysisError::InvalidRange { start, stop, step });
        }
        Ok(range)
    }

    /// Grid points, computed as `start + i * step` to avoid drift.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=count)
            .map(|i| self.start + i as f64 * self.step)
            .collect()
    }
}

impl Default for DistanceRange {
    fn default() -> Self {
        Self {
            start: 0.0,
            stop: 250.0,
            step: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub model: RateModel,
    pub range: DistanceRange,
}

/// One rate point per grid distance, in distance order. Points are evaluated
/// in parallel.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<KeyRatePoint>, AnalysisError> {
    spec.model.validate()?;
    let range = DistanceRange::new(spec.range.start, spec.range.stop, spec.range.step)?;
    range
        .points()
        .into_par_iter()
        .map(|d| spec.model.evaluate(d))
        .collect()
}

fn rate_at(model: &RateModel, distance_km: f64) -> Result<f64, AnalysisError> {
    Ok(model.evaluate(distance_km)?.rate)
}

/// Largest distance with a positive rate: 5 km scan for the first
/// non-positive point, then bisection to 0.1 km. Returns the secure end of
/// the final bracket.
pub fn max_secure_distance(model: &RateModel) -> Result<f64, AnalysisError> {
    model.validate()?;
    let at_zero = rate_at(model, 0.0)?;
    if !(at_zero > 0.0) {
        return Err(AnalysisError::NeverSecure {
            protocol: model.protocol.to_string(),
            rate: at_zero,
        });
    }

    let mut secure = 0.0;
    let insecure = loop {
        let next = secure + CUTOFF_SCAN_STEP_KM;
        if next > CUTOFF_SEARCH_LIMIT_KM {
            return Err(AnalysisError::NoCutoff {
                protocol: model.protocol.to_string(),
                distance_km: secure,
            });
        }
        if rate_at(model, next)? > 0.0 {
            secure = next;
        } else {
            break next;
        }
    };

    let (mut lo, mut hi) = (secure, insecure);
    while hi - lo > CUTOFF_RESOLUTION_KM {
        let mid = 0.5 * (lo + hi);
        if rate_at(model, mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Per-constraint helper for callers that want to report the first
/// violation only.
pub fn first_violation(err: &BoundsError) -> Option<&IntensityViolation> {
    match err {
        BoundsError::Intensities(v) => v.first(),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::cubic_residual;

    #[test]
    fn constructed_sets_satisfy_coupling() {
        for mu in [0.1, 0.3, 0.48, 0.6] {
            let s = construct_intensity_set(mu, DEFAULT_NU3).unwrap();
            assert_eq!(s.nu1, 0.75 * mu);
            assert!(
                cubic_residual(&s).abs() < 1e-12,
                "{mu}: {}",
                cubic_residual(&s)
            );
        }
        let s = construct_intensity_set(0.30, 0.05).unwrap();
        assert!((s.nu2 - 0.115_603_594_886_183_24).abs() < 1e-12);
        assert!(construct_intensity_set(0.48, 0.05).is_ok());
    }

    #[test]
    fn construct_rejects_large_nu3() {
        let err = construct_intensity_set(0.30, 0.2).unwrap_err();
        assert!(matches!(
            first_violation(&err),
            Some(IntensityViolation::Nu3NotBelowNu2 { .. })
        ));
        assert!(construct_intensity_set(0.0, 0.01).is_err());
        assert!(construct_intensity_set(0.3, 0.0).is_err());
    }

    #[test]
    fn distance_grid() {
        assert_eq!(
            DistanceRange::new(0.0, 0.0, 1.0).unwrap().points(),
            vec![0.0]
        );
        assert_eq!(DistanceRange::default().points().len(), 251);
        let p = DistanceRange::new(0.0, 1.0, 0.1).unwrap().points();
        assert_eq!(p.len(), 11);
        assert!(DistanceRange::new(5.0, 1.0, 1.0).is_err());
        assert!(DistanceRange::new(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn optimal_mu_only_for_sarg04() {
        let m = RateModel::new(
            Protocol::Bb84Decoy,
            MuChoice::Optimal,
            ChannelParams::gys(0.0),
        );
        assert_eq!(m.validate(), Err(AnalysisError::OptimalMuUnsupported));
    }

    #[test]
    fn single_point_sweep() {
        let spec = SweepSpec {
            model: RateModel::new(
                Protocol::Bb84Decoy,
                MuChoice::Fixed(0.48),
                ChannelParams::gys(0.0),
            ),
            range: DistanceRange::new(0.0, 0.0, 1.0).unwrap(),
        };
        let pts = sweep(&spec).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(pts[0].rate > 0.0);
    }

    #[test]
    fn never_secure_is_reported() {
        let noisy = ChannelParams {
            e_det: 0.3,
            ..ChannelParams::gys(0.0)
        };
        let m = RateModel::new(Protocol::Bb84Decoy, MuChoice::Fixed(0.48), noisy);
        assert!(matches!(
            max_secure_distance(&m),
            Err(AnalysisError::NeverSecure { .. })
        ));
    }
}
