//! Physical parameters and the honest (eavesdropper-free) channel model.
//!
//! A weak coherent source emits a phase-randomized coherent state, i.e. a
//! Poisson mixture of photon-number states. Every other module consumes the
//! per-intensity gains and error rates produced here.

use crate::error::ModelError;

/// Error rate of background (dark) counts. Dark counts are uniformly random.
pub const BACKGROUND_ERROR_RATE: f64 = 0.5;

/// Fiber link and detector parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// Fiber attenuation in dB/km.
    pub alpha_db_per_km: f64,
    /// Fiber length in km.
    pub distance_km: f64,
    /// Detection efficiency of the receiver, in (0, 1].
    pub eta_bob: f64,
    /// Background yield per pulse.
    pub y0: f64,
    /// Probability that a photon hits the wrong detector.
    pub e_det: f64,
    /// Error-correction inefficiency, `f(E) >= 1`.
    pub f_ec: f64,
}

impl ChannelParams {
    /// Builds a parameter set, rejecting values outside their physical range.
    pub fn new(
        alpha_db_per_km: f64,
        distance_km: f64,
        eta_bob: f64,
        y0: f64,
        e_det: f64,
        f_ec: f64,
    ) -> Result<Self, ModelError> {
        let params = Self {
            alpha_db_per_km,
            distance_km,
            eta_bob,
            y0,
            e_det,
            f_ec,
        };
        params.validate()?;
        Ok(params)
    }

    /// The GYS experiment: 0.21 dB/km, e_det = 3.3%, Y0 = 1.7e-6,
    /// eta_Bob = 0.045, f = 1.22.
    pub fn gys(distance_km: f64) -> Self {
        Self {
            alpha_db_per_km: 0.21,
            distance_km,
            eta_bob: 0.045,
            y0: 1.7e-6,
            e_det: 0.033,
            f_ec: 1.22,
        }
    }

    pub fn with_distance(self, distance_km: f64) -> Self {
        Self {
            distance_km,
            ..self
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let check = |ok: bool, field: &'static str, value: f64, range: &'static str| {
            if ok {
                Ok(())
            } else {
                Err(ModelError::InvalidParameter {
                    field,
                    value,
                    range,
                })
            }
        };
        check(
            self.alpha_db_per_km >= 0.0 && self.alpha_db_per_km.is_finite(),
            "alpha_db_per_km",
            self.alpha_db_per_km,
            ">= 0",
        )?;
        check(
            self.distance_km >= 0.0 && !self.distance_km.is_nan(),
            "distance_km",
            self.distance_km,
            ">= 0",
        )?;
        check(
            self.eta_bob > 0.0 && self.eta_bob <= 1.0,
            "eta_bob",
            self.eta_bob,
            "(0, 1]",
        )?;
        check(self.y0 >= 0.0 && self.y0 < 1.0, "y0", self.y0, "[0, 1)")?;
        check(
            (0.0..=0.5).contains(&self.e_det),
            "e_det",
            self.e_det,
            "[0, 0.5]",
        )?;
        check(
            self.f_ec >= 1.0 && self.f_ec.is_finite(),
            "f_ec",
            self.f_ec,
            ">= 1",
        )
    }
}

/// Signal and decoy mean photon numbers. The vacuum decoy is implicit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensitySet {
    pub mu: f64,
    pub nu1: f64,
    pub nu2: f64,
    pub nu3: f64,
}

/// Measured gain and QBER of one pulse class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservedTally {
    /// Mean photon number of the pulse class.
    pub intensity: f64,
    /// Detection probability per pulse sent.
    pub gain: f64,
    /// Error fraction among detections.
    pub qber: f64,
}

/// Tallies for the vacuum, the three decoys and the signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TallySet {
    pub vacuum: ObservedTally,
    pub nu3: ObservedTally,
    pub nu2: ObservedTally,
    pub nu1: ObservedTally,
    pub signal: ObservedTally,
}

impl TallySet {
    /// Tallies in increasing intensity order.
    pub fn to_vec(&self) -> Vec<ObservedTally> {
        vec![self.vacuum, self.nu3, self.nu2, self.nu1, self.signal]
    }
}

/// Poisson photon-number probability `P_n(mu) = mu^n e^-mu / n!`.
pub fn poisson_weight(mu: f64, n: u32) -> Result<f64, ModelError> {
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(ModelError::NegativeIntensity(mu));
    }
    if mu == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let ln_factorial: f64 = (2..=n).map(|k| f64::from(k).ln()).sum();
    Ok((f64::from(n) * mu.ln() - mu - ln_factorial).exp())
}

/// Overall single-photon transmission probability of fiber plus receiver.
pub fn transmittance(params: &ChannelParams) -> f64 {
    params.eta_bob * 10f64.powf(-params.alpha_db_per_km * params.distance_km / 10.0)
}

/// Gain of a pulse class with mean photon number `intensity`:
/// `Q = Y0 + 1 - exp(-eta * intensity)`.
pub fn honest_gain(intensity: f64, params: &ChannelParams) -> f64 {
    let eta = transmittance(params);
    params.y0 - (-eta * intensity).exp_m1()
}

/// QBER of a pulse class: `E Q = e0 Y0 + e_det (1 - exp(-eta * intensity))`.
pub fn honest_qber(intensity: f64, params: &ChannelParams) -> Result<f64, ModelError> {
    let gain = honest_gain(intensity, params);
    if !(gain > 0.0) {
        return Err(ModelError::ZeroGain { intensity });
    }
    let eta = transmittance(params);
    let detected = -(-eta * intensity).exp_m1();
    Ok((BACKGROUND_ERROR_RATE * params.y0 + params.e_det * detected) / gain)
}

fn honest_tally(intensity: f64, params: &ChannelParams) -> Result<ObservedTally, ModelError> {
    if !(intensity >= 0.0) {
        return Err(ModelError::NegativeIntensity(intensity));
    }
    Ok(ObservedTally {
        intensity,
        gain: honest_gain(intensity, params),
        qber: honest_qber(intensity, params)?,
    })
}

/// Observables the honest channel produces for the vacuum, the decoys and
/// the signal.
pub fn synthesize_tallies(
    intensities: &IntensitySet,
    params: &ChannelParams,
) -> Result<TallySet, ModelError> {
    params.validate()?;
    let vacuum = ObservedTally {
        intensity: 0.0,
        gain: params.y0,
        qber: BACKGROUND_ERROR_RATE,
    };
    Ok(TallySet {
        vacuum,
        nu3: honest_tally(intensities.nu3, params)?,
        nu2: honest_tally(intensities.nu2, params)?,
        nu1: honest_tally(intensities.nu1, params)?,
        signal: honest_tally(intensities.mu, params)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn poisson_vacuum_and_limits() {
        assert_relative_eq!(
            poisson_weight(0.5, 0).unwrap(),
            0.606_530_659_712_633_4,
            epsilon = 1e-15
        );
        assert_eq!(poisson_weight(0.0, 0).unwrap(), 1.0);
        assert_eq!(poisson_weight(0.0, 3).unwrap(), 0.0);
        assert!(matches!(
            poisson_weight(-0.1, 0),
            Err(ModelError::NegativeIntensity(_))
        ));
    }

    #[test]
    fn poisson_matches_factorial_recurrence() {
        for &mu in &[0.05f64, 0.48, 1.0, 3.0] {
            let mut p = (-mu).exp();
            for n in 0..40u32 {
                assert_relative_eq!(poisson_weight(mu, n).unwrap(), p, max_relative = 1e-12);
                p *= mu / f64::from(n + 1);
            }
        }
        assert_relative_eq!(
            poisson_weight(0.48, 1).unwrap(),
            0.48 * (-0.48f64).exp(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn transmittance_gys() {
        let p = ChannelParams::gys(0.0);
        assert_eq!(transmittance(&p), 0.045);
        assert_relative_eq!(
            transmittance(&p.with_distance(100.0)),
            0.045 * 10f64.powf(-2.1),
            max_relative = 1e-14
        );
        assert_eq!(transmittance(&p.with_distance(f64::INFINITY)), 0.0);
    }

    #[test]
    fn gain_at_vacuum_and_opaque_channel() {
        let p = ChannelParams::gys(0.0);
        assert_eq!(honest_gain(0.0, &p), 1.7e-6);
        assert_relative_eq!(
            honest_gain(0.48, &p),
            1.7e-6 + 1.0 - (-0.045f64 * 0.48).exp(),
            max_relative = 1e-13
        );
        let far = p.with_distance(1e5);
        assert_relative_eq!(honest_gain(0.48, &far), 1.7e-6, max_relative = 1e-12);
    }

    #[test]
    fn qber_limits() {
        let p = ChannelParams::gys(0.0);
        assert_eq!(honest_qber(0.0, &p).unwrap(), 0.5);
        // signal-dominated: Y0 negligible
        let clean = ChannelParams { y0: 0.0, ..p };
        assert_relative_eq!(
            honest_qber(0.48, &clean).unwrap(),
            0.033,
            max_relative = 1e-12
        );

        let d100 = p.with_distance(100.0);
        let eta = 0.045 * 10f64.powf(-2.1);
        let q = 1.7e-6 + 1.0 - (-eta * 0.48).exp();
        let e = (0.5 * 1.7e-6 + 0.033 * (1.0 - (-eta * 0.48).exp())) / q;
        assert_relative_eq!(honest_qber(0.48, &d100).unwrap(), e, max_relative = 1e-9);

        let dark_free = ChannelParams { y0: 0.0, ..p };
        assert!(matches!(
            honest_qber(0.0, &dark_free),
            Err(ModelError::ZeroGain { .. })
        ));
    }

    #[test]
    fn tallies_are_ordered() {
        let set = IntensitySet {
            mu: 0.48,
            nu1: 0.36,
            nu2: 0.18,
            nu3: 0.05,
        };
        let t = synthesize_tallies(&set, &ChannelParams::gys(50.0)).unwrap();
        assert_eq!(t.vacuum.gain, 1.7e-6);
        assert_eq!(t.vacuum.qber, 0.5);
        assert!(t.nu3.gain < t.nu2.gain && t.nu2.gain < t.nu1.gain && t.nu1.gain < t.signal.gain);
        assert_eq!(t.to_vec().len(), 5);
    }

    #[test]
    fn params_rejected_out_of_range() {
        assert!(ChannelParams::new(0.21, 10.0, 0.045, 1.7e-6, 0.033, 1.22).is_ok());
        assert!(ChannelParams::new(-1.0, 10.0, 0.045, 1.7e-6, 0.033, 1.22).is_err());
        assert!(ChannelParams::new(0.21, 10.0, 0.0, 1.7e-6, 0.033, 1.22).is_err());
        assert!(ChannelParams::new(0.21, 10.0, 0.045, 1.7e-6, 0.6, 1.22).is_err());
        assert!(ChannelParams::new(0.21, 10.0, 0.045, 1.7e-6, 0.033, 0.9).is_err());
    }
}
