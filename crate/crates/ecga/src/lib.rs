//! Image-dependent pseudo-random number generation over elliptic curves.
//!
//! The pipeline has two stages. Stage one derives an initial byte sequence
//! from a grayscale image and a named elliptic curve: scalar multiples of the
//! base point are serialized bit by bit, interleaved with SHA-256 digests of
//! the image and the curve parameters, masked with a keyed bit stream, and
//! mapped to symbols through an affine recurrence. Stage two hill-climbs that
//! sequence with alphabet-injecting crossover and swap mutation until its
//! Shannon entropy and its period are both maximal.
//!
//! Modules mirror the stages: [`field_ec`] (prime-field curve arithmetic),
//! [`material`] (bit-level seed material), [`idprng`] (initial sequence),
//! [`moga`] (the optimizer), [`stats`] (entropy, period, Hurst exponent,
//! correlation, NBCR and an in-process NIST SP 800-22 subset), and [`cli`]
//! (file formats and the command implementations behind the `ecga` binary).

pub mod cli;
pub mod error;
pub mod field_ec;
pub mod idprng;
pub mod material;
pub mod moga;
pub mod stats;

pub use error::{Error, Result};
pub use idprng::{GenerationConfig, Sequence};
