//! Secure key rates per pulse for the three compared protocols.
//!
//! * `bb84-decoy`: `S = 1/2 {-Q f H2(E) + Q1 [1 - H2(e1)]}`.
//! * `sarg04-no-decoy`: worst case where every pulse with three or more
//!   photons is tagged, `S = 1/4 {-Q H2(E) + Q0 + Omega Q [1 - H2(E/Omega)]}`.
//! * `nonorthogonal-decoy`: SARG04 sifting with decoy estimates of the vacuum,
//!   single- and two-photon terms,
//!   `S = 1/4 {-Q f H2(E) + Q0 + Q1 [1 - H2(e1)] + Q2 [1 - H2(e2)]}`.
//!
//! The last one follows from `S >= I(A:B) - I(B:E)` with Eve holding full
//! information on every pulse of three or more photons and the
//! QBER-limited information on the one- and two-photon parts; vacuum pulses
//! carry no information to Eve.
//!
//! Entropy arguments inside the rate formulas are capped at 1/2: an error
//! bound above 1/2 means no secrecy can be claimed from that term.

use std::fmt;
use std::str::FromStr;

use crate::bounds::PhotonBounds;
use crate::error::RateError;
use crate::model::ObservedTally;
use crate::roots::bisect;

/// Sifting efficiency of BB84: half the bases match.
pub const BB84_SIFTING: f64 = 0.5;
/// Sifting efficiency of SARG04.
pub const SARG04_SIFTING: f64 = 0.25;

/// Bracket for the optimal-mu search.
const OPTIMAL_MU_BRACKET: (f64, f64) = (0.0, 2.0);
/// Resolution of the optimal-mu search.
pub const OPTIMAL_MU_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Protocol {
    Bb84Decoy,
    Sarg04NoDecoy,
    NonorthogonalDecoy,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [
        Protocol::Bb84Decoy,
        Protocol::Sarg04NoDecoy,
        Protocol::NonorthogonalDecoy,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Protocol::Bb84Decoy => "bb84-decoy",
            Protocol::Sarg04NoDecoy => "sarg04-no-decoy",
            Protocol::NonorthogonalDecoy => "nonorthogonal-decoy",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown protocol '{s}'"))
    }
}

/// One point of a rate-vs-distance curve. `rate` is not floored at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRatePoint {
    pub protocol: Protocol,
    pub distance_km: f64,
    pub mu: f64,
    pub rate: f64,
}

/// Binary Shannon entropy in bits, with `H2(0) = H2(1) = 0`.
pub fn binary_entropy(x: f64) -> Result<f64, RateError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(RateError::EntropyDomain(x));
    }
    Ok(entropy_unchecked(x))
}

fn entropy_unchecked(x: f64) -> f64 {
    if x == 0.0 || x == 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

fn capped_entropy(x: f64) -> f64 {
    entropy_unchecked(x.clamp(0.0, 0.5))
}

/// Secrecy left in a term with gain `gain` and error rate `error`.
fn private_part(gain: f64, error: f64) -> f64 {
    gain * (1.0 - capped_entropy(error))
}

/// Decoy-state BB84 rate using the single-photon bounds.
pub fn rate_bb84_decoy(signal: &ObservedTally, bounds: &PhotonBounds, f_ec: f64) -> f64 {
    BB84_SIFTING
        * (-signal.gain * f_ec * capped_entropy(signal.qber)
            + private_part(bounds.q1_lower, bounds.e1_upper))
}

/// Fraction of detections from pulses with at most two photons, assuming
/// every multiphoton (n >= 3) pulse is detected:
/// `Omega = 1 - [1 - (1 + mu + mu^2/2) e^-mu] / Q`.
pub fn untagged_fraction(signal: &ObservedTally, mu: f64) -> Result<f64, RateError> {
    if !(signal.gain > 0.0) {
        return Err(RateError::ZeroGain);
    }
    // 1 - (1 + mu + mu^2/2) e^-mu, computed without cancellation at small mu
    let at_most_two = (1.0 + mu + 0.5 * mu * mu) * (-mu).exp();
    let three_or_more = if mu < 0.1 {
        three_or_more_series(mu)
    } else {
        1.0 - at_most_two
    };
    Ok(1.0 - three_or_more / signal.gain)
}

/// `P(n >= 3)` summed directly; accurate where `1 - P(n <= 2)` cancels.
fn three_or_more_series(mu: f64) -> f64 {
    let mut term = mu * mu * mu / 6.0 * (-mu).exp();
    let mut sum = 0.0;
    let mut n = 3.0;
    while term > sum * 1e-18 {
        sum += term;
        n += 1.0;
        term *= mu / n;
    }
    sum
}

/// Worst-case SARG04 rate without decoys. Error correction is taken as
/// ideal (`f = 1`) here.
pub fn rate_sarg04_worst(signal: &ObservedTally, q0: f64, omega: f64) -> f64 {
    let untagged = if omega > 0.0 {
        private_part(omega * signal.gain, signal.qber / omega)
    } else {
        0.0
    };
    SARG04_SIFTING * (-signal.gain * capped_entropy(signal.qber) + q0 + untagged)
}

/// Signal intensity maximizing the no-decoy SARG04 rate: the root of
/// `eta e^(-eta mu) = mu^2 e^-mu / 2` on `(0, 2)`. Behaves like
/// `sqrt(2 eta)` for `eta << 1`.
pub fn optimal_mu_sarg04(eta: f64) -> Result<f64, RateError> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(RateError::InvalidTransmittance(eta));
    }
    let (lo, hi) = OPTIMAL_MU_BRACKET;
    Ok(bisect(
        |mu| optimal_mu_residual(eta, mu),
        lo,
        hi,
        OPTIMAL_MU_TOL,
    )?)
}

/// `eta e^(-eta mu) - mu^2 e^-mu / 2`.
pub fn optimal_mu_residual(eta: f64, mu: f64) -> f64 {
    eta * (-eta * mu).exp() - 0.5 * mu * mu * (-mu).exp()
}

/// Lower bound on the nonorthogonal-encoding decoy-state rate.
pub fn rate_nonorthogonal_decoy(signal: &ObservedTally, bounds: &PhotonBounds, f_ec: f64) -> f64 {
    SARG04_SIFTING
        * (-signal.gain * f_ec * capped_entropy(signal.qber)
            + bounds.q0
            + private_part(bounds.q1_lower, bounds.e1_upper)
            + private_part(bounds.q2_lower, bounds.e2_upper))
}
