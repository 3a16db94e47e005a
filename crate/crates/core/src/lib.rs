//! Noisy non-adaptive group testing.
//!
//! This crate holds everything that is pure computation: random pooling
//! designs, the measurement-noise channels, the combinatorial decoders
//! (coupon collector, column matching and its noisy variant), a dense
//! bounded-variable simplex engine together with the LP-relaxation decoders
//! built on it, and closed-form sample-complexity bounds. It is `no_std` and
//! only needs `alloc`; file formats, the Monte Carlo runner and the command
//! line live in the `gtkit` crate.
//!
//! The typical pipeline is
//!
//! ```
//! use gtkit_core::model::{gen_bernoulli_matrix, noiseless_outcomes, ProblemInstance};
//! use gtkit_core::noise::{apply_noise, NoiseModel};
//! use gtkit_core::decode::decode_coma;
//!
//! let inst = ProblemInstance::new(40, [3, 17]).unwrap();
//! let m = gen_bernoulli_matrix(120, 40, 0.5, 7).unwrap();
//! let y = noiseless_outcomes(&m, &inst).unwrap();
//! let (y_hat, _) = apply_noise(&y, &NoiseModel::Noiseless, 11).unwrap();
//! let out = decode_coma(&m, &y_hat).unwrap();
//! // column matching never misses a defective on noiseless data
//! assert!(out.estimate.get(3) && out.estimate.get(17));
//! ```
#![no_std]
#![warn(missing_debug_implementations, rust_2018_idioms)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bits;
pub mod bounds;
pub mod decode;
mod error;
pub mod lp;
pub mod model;
pub mod noise;
pub mod rng;
pub mod trial;

pub use error::{Error, Result};
