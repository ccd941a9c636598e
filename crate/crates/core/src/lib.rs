//! Lower bounds on secure key rates for decoy-state quantum key distribution
//! with nonorthogonal (SARG04) encoding, compared against decoy-state BB84
//! and no-decoy SARG04 over a lossy fiber.
//!
//! The pipeline is: [`model`] synthesizes honest-channel gains and error
//! rates for the signal, three weak decoys and vacuum; [`bounds`] turns them
//! into vacuum, single- and two-photon estimates; [`rates`] evaluates the key
//! rate formulas; [`analysis`] sweeps distance and locates cutoffs.
//! [`oracle`] is a photon-number-resolved brute-force model used to check the
//! estimates.
//!
//! ```
//! use qkd_decoy::analysis::{max_secure_distance, MuChoice, RateModel};
//! use qkd_decoy::model::ChannelParams;
//! use qkd_decoy::rates::Protocol;
//!
//! let model = RateModel::new(
//!     Protocol::Sarg04NoDecoy,
//!     MuChoice::Optimal,
//!     ChannelParams::gys(0.0),
//! );
//! let d = max_secure_distance(&model).unwrap();
//! assert!((d - 97.0).abs() < 5.0);
//! ```

// Negated float comparisons below are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod bounds;
pub mod error;
pub mod model;
pub mod oracle;
pub mod rates;
pub mod roots;

pub use error::{AnalysisError, BoundsError, IntensityViolation, ModelError, RateError, RootError};
