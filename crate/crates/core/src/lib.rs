//! Key distribution over noisy wiretap channels with an active adversary.
//!
//! Two legal parties share correlated binary strings obtained from a common
//! random source through binary symmetric channels; an eavesdropper holds a
//! noisier copy. The crate covers the whole pipeline that turns such strings
//! into a shared secret key over a public, tamperable channel:
//!
//! - [`entropy`]: per-bit entropies and the secret-key capacity of the model.
//! - [`codes`]: the Gallager random-coding exponent, check-symbol budgets and
//!   small systematic linear codes for reconciliation.
//! - [`hashfam`]: universal hash families over binary fields.
//! - [`authcode`]: keyless authentication codes built on the shared strings.
//! - [`extractor`]: a Trevisan-style strong extractor with weak designs.
//! - [`leakage`]: privacy-amplification leakage bounds.
//! - [`planner`]: parameter solving and key-rate optimisation for twelve
//!   protocol variants.
//! - [`engine`]: executable Alice/Bob/Eve runs and Monte Carlo measurement.

pub mod authcode;
pub mod bits;
pub mod codes;
pub mod engine;
pub mod entropy;
pub mod error;
pub mod extractor;
pub mod field;
pub mod hashfam;
pub mod leakage;
pub mod planner;
pub(crate) mod tail;

pub use bits::BitString;
pub use entropy::ChannelParams;
pub use error::{Error, Result};
pub use planner::{ProtocolKind, ProtocolPlan, Requirements};
