//! Universal hash families over GF(2^a).
//!
//! - [`u2_hash`]: `x -> low_b(x * s)`, universal (U2).
//! - [`su2_hash`]: `x -> s * x + t`, strongly universal (SU2).
//! - [`asu2_hash`]: an almost strongly universal family with message length
//!   `a = 2^i b`, key length `b (i + 2)` and substitution probability
//!   `(i + 1) / 2^b`. It is built as `i` levels of pairwise polynomial
//!   compression over GF(2^b), `(m0, m1) -> m0 + k m1` with one key element per
//!   level, followed by an affine map `y -> s y + t`.
//!
//! Pair bounds verified by the tests are the standard ones: an SU2 family
//! maps any two distinct inputs to any two outputs under exactly `|H| / |B|^2`
//! keys, and an epsilon-ASU2 family under at most `epsilon |H| / |B|` keys.

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{check_len, Error, Result};
pub use crate::field::FieldElement;

/// Low `b` bits of the field product `x * s`.
pub fn u2_hash(s: &FieldElement, x: &BitString, b: usize) -> Result<BitString> {
    let xe = FieldElement::from_bits(s.width(), x)?;
    if b > s.width() as usize {
        return Err(Error::LengthMismatch {
            expected: s.width() as usize,
            got: b,
        });
    }
    Ok(xe.mul(s).low_bits(b))
}

/// The affine map `x -> s x + t`.
pub fn su2_hash(s: &FieldElement, t: &FieldElement, x: &BitString) -> Result<BitString> {
    check_len(s.width() as usize, t.width() as usize)?;
    let xe = FieldElement::from_bits(s.width(), x)?;
    Ok(s.mul(&xe).add(t).to_bits())
}

/// Parameters of the almost strongly universal family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsuParams {
    /// Output (tag) length and field width.
    pub b: u32,
    /// Number of compression levels.
    pub i: u32,
}

impl AsuParams {
    pub fn new(b: u32, i: u32) -> Result<Self> {
        if i < 1 {
            return Err(Error::Parameter("ASU2 family needs i >= 1".into()));
        }
        if !(1..=crate::field::MAX_WIDTH).contains(&b) {
            return Err(Error::Parameter(format!("tag length {b} outside 1..=512")));
        }
        if i > 40 {
            return Err(Error::Parameter(format!("{i} compression levels is too many")));
        }
        let p = AsuParams { b, i };
        if p.epsilon() >= 1.0 {
            return Err(Error::Parameter(format!(
                "epsilon = {} is not below 1 for b = {b}, i = {i}",
                p.epsilon()
            )));
        }
        Ok(p)
    }

    /// Message length `2^i b`.
    pub fn input_bits(&self) -> u64 {
        (1u64 << self.i) * self.b as u64
    }

    /// Key length `b (i + 2)`.
    pub fn key_bits(&self) -> u64 {
        self.b as u64 * (self.i as u64 + 2)
    }

    /// Substitution probability `(i + 1) / 2^b`.
    pub fn epsilon(&self) -> f64 {
        (self.i as f64 + 1.0) * 2f64.powi(-(self.b as i32))
    }

    /// `log2` of [`AsuParams::epsilon`], finite for any width.
    pub fn log2_epsilon(&self) -> f64 {
        (self.i as f64 + 1.0).log2() - self.b as f64
    }
}

/// A parsed key, ready to hash many messages.
#[derive(Debug, Clone)]
pub struct AsuKey {
    params: AsuParams,
    levels: Vec<FieldElement>,
    s: FieldElement,
    t: FieldElement,
}

impl AsuKey {
    pub fn new(params: AsuParams, key: &BitString) -> Result<Self> {
        check_len(params.key_bits() as usize, key.len())?;
        let b = params.b as usize;
        let el = |j: usize| FieldElement::from_bits(params.b, &key.slice(j * b, b));
        let levels = (0..params.i as usize).map(el).collect::<Result<Vec<_>>>()?;
        Ok(AsuKey {
            params,
            levels,
            s: el(params.i as usize)?,
            t: el(params.i as usize + 1)?,
        })
    }

    /// Splits a message into `2^i` field elements.
    pub fn blocks(params: AsuParams, x: &BitString) -> Result<Vec<FieldElement>> {
        check_len(params.input_bits() as usize, x.len())?;
        let b = params.b as usize;
        (0..1usize << params.i)
            .map(|j| FieldElement::from_bits(params.b, &x.slice(j * b, b)))
            .collect()
    }

    /// Hashes a message already split by [`AsuKey::blocks`].
    pub fn hash_blocks(&self, blocks: &[FieldElement]) -> FieldElement {
        assert_eq!(blocks.len(), 1 << self.params.i);
        let mut cur: Vec<FieldElement> = blocks.to_vec();
        for k in &self.levels {
            cur = cur
                .chunks_exact(2)
                .map(|p| p[0].add(&k.mul(&p[1])))
                .collect();
        }
        self.s.mul(&cur[0]).add(&self.t)
    }

    pub fn hash(&self, x: &BitString) -> Result<BitString> {
        Ok(self.hash_blocks(&Self::blocks(self.params, x)?).to_bits())
    }
}

/// Tag of message `x` under `key`.
pub fn asu2_hash(params: AsuParams, key: &BitString, x: &BitString) -> Result<BitString> {
    AsuKey::new(params, key)?.hash(x)
}

/// Zero-pads a message of at most `a` bits to the family's input length.
pub fn pad_message(params: AsuParams, x: &BitString) -> Result<BitString> {
    let a = params.input_bits() as usize;
    if x.len() > a {
        return Err(Error::LengthMismatch {
            expected: a,
            got: x.len(),
        });
    }
    Ok(x.concat(&BitString::zeros(a - x.len())))
}

/// Impersonation and substitution success probabilities `(2^-b, epsilon)`.
pub fn deception_bounds(params: AsuParams) -> (f64, f64) {
    (2f64.powi(-(params.b as i32)), params.epsilon())
}

/// Deception bound for a `2^-b_tilde`-ASU2 family keyed with an `l0`-bit key
/// whose min-entropy is at least `t l0`: `2^{-((b_tilde - l0 (1 - t)) / 2 - 1)}`, at most 1.
pub fn partial_key_deception(l0: u64, b_tilde: u64, t: f64) -> f64 {
    let exponent = (b_tilde as f64 - l0 as f64 * (1.0 - t)) / 2.0 - 1.0;
    2f64.powf(-exponent).min(1.0)
}
