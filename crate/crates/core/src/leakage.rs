//! Leakage bounds for privacy amplification.
//!
//! Hashing: with `t` bits of collision-entropy deficit, `r` published check
//! bits and safety margin `s`, the adversary's Shannon information about an
//! `ell`-bit hashed key is at most `2^{-(k - ell - t - r - s)} / ln 2`, except
//! with probability `2^{-s/2 - 1}`.
//!
//! Extraction: an extractor output at statistical distance `eps` from uniform
//! leaks at most `2 ell sqrt(eps)` bits.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mechanism {
    Hashing,
    Extraction,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeakageReport {
    /// Bound in bits, clamped to `[0, ell]`.
    pub shannon_bound: f64,
    /// `log2` of the unclamped bound; stays finite where the linear value underflows.
    pub log2_bound: f64,
    /// Probability that the bound fails.
    pub risk: f64,
    pub mechanism: Mechanism,
    /// The bound says nothing beyond the trivial `ell`.
    pub vacuous: bool,
}

impl LeakageReport {
    fn new(ell: u64, log2_bound: f64, risk: f64, mechanism: Mechanism) -> Self {
        let ell = ell as f64;
        let linear = 2f64.powf(log2_bound);
        LeakageReport {
            shannon_bound: linear.min(ell).max(0.0),
            log2_bound,
            risk: risk.clamp(0.0, 1.0),
            mechanism,
            vacuous: linear >= ell,
        }
    }
}

pub fn hashing_leakage(k: u64, ell: u64, t: f64, r: u64, s: f64) -> LeakageReport {
    let exponent = k as f64 - ell as f64 - t - r as f64 - s;
    let log2_bound = -exponent - std::f64::consts::LN_2.log2();
    LeakageReport::new(ell, log2_bound, 2f64.powf(-s / 2.0 - 1.0), Mechanism::Hashing)
}

/// Collision-entropy deficit after publishing `r` bits with margin `s`.
pub fn renyi_side_info(t_base: f64, r: u64, s: f64) -> f64 {
    t_base + r as f64 + s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinEntropyBound {
    /// Remaining min-entropy, clamped at 0.
    pub bound: f64,
    /// Probability that the bound fails, `2^-s`.
    pub risk: f64,
    /// Publishing `r` bits with margin `s` exhausts the min-entropy.
    pub exhausted: bool,
}

pub fn minentropy_side_info(h_base: f64, r: u64, s: f64) -> MinEntropyBound {
    let raw = h_base - r as f64 - s;
    MinEntropyBound {
        bound: raw.max(0.0),
        risk: 2f64.powf(-s).min(1.0),
        exhausted: raw < 0.0,
    }
}

/// `2 ell sqrt(eps)`.
pub fn extractor_leakage(ell: u64, eps: f64) -> f64 {
    2.0 * ell as f64 * eps.sqrt()
}

pub fn extractor_leakage_log2(ell: u64, log2_eps: f64) -> f64 {
    (2.0 * ell as f64).log2() + log2_eps / 2.0
}

/// Risk-free report for an extractor at `log2 eps`; the min-entropy risk is passed in.
pub fn extraction_report(ell: u64, log2_eps: f64, risk: f64) -> LeakageReport {
    LeakageReport::new(ell, extractor_leakage_log2(ell, log2_eps), risk, Mechanism::Extraction)
}

/// `(I_adm / (2 ell))^2`.
pub fn required_eps(i_adm: f64, ell: u64) -> f64 {
    (i_adm / (2.0 * ell as f64)).powi(2)
}

pub fn required_eps_log2(i_adm: f64, ell: u64) -> f64 {
    2.0 * (i_adm.log2() - (2.0 * ell as f64).log2())
}
