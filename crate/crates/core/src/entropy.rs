//! Scalar entropy functions of binary symmetric channels. All logarithms are base 2.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::Parameter(format!("probability {value} outside [0, 1]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Probability {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Probability::new(v)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

/// Crossover probabilities of the main (A to B) and wiretap (legal party to E) channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub p_m: f64,
    pub p_w: f64,
}

impl ChannelParams {
    pub fn new(p_m: f64, p_w: f64) -> Result<Self> {
        Probability::new(p_m)?;
        Probability::new(p_w)?;
        Ok(ChannelParams { p_m, p_w })
    }

    /// Fails unless the wiretap channel is strictly noisier than the main one.
    pub fn require_advantage(&self) -> Result<()> {
        if self.p_w > self.p_m {
            Ok(())
        } else {
            Err(Error::ZeroCapacity {
                p_m: self.p_m,
                p_w: self.p_w,
            })
        }
    }
}

/// Crossover probability of two binary symmetric channels in series.
pub fn bsc_cascade(a: f64, b: f64) -> f64 {
    a + b - 2.0 * a * b
}

/// Binary entropy `g(p) = -p log p - (1-p) log(1-p)` with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "binary_entropy: p = {p}");
    let term = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.log2() };
    term(p) + term(1.0 - p)
}

/// Reduces a common-source model (S seen by A, B, E through BSCs with
/// crossovers `pi_a`, `pi_b`, `pi_e`) to the main/wiretap pair, taking the
/// wiretap channel to the better-placed legal party.
pub fn reduce_source_model(pi_a: f64, pi_b: f64, pi_e: f64) -> Result<ChannelParams> {
    for p in [pi_a, pi_b, pi_e] {
        Probability::new(p)?;
    }
    let p_m = bsc_cascade(pi_a, pi_b);
    let p_w = bsc_cascade(pi_a, pi_e).min(bsc_cascade(pi_b, pi_e));
    ChannelParams::new(p_m, p_w)
}

fn interior(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("degenerate channel crossover {p}")))
    }
}

/// `-log max(p, 1-p)`: min-entropy per bit of a BSC output given its input.
pub fn min_entropy_per_bit(p_w: f64) -> Result<f64> {
    interior(p_w)?;
    Ok(-p_w.max(1.0 - p_w).log2())
}

/// `-log(p^2 + (1-p)^2)`: collision entropy per bit.
pub fn renyi_entropy_per_bit(p_w: f64) -> Result<f64> {
    interior(p_w)?;
    Ok(-(p_w * p_w + (1.0 - p_w) * (1.0 - p_w)).log2())
}

/// `g(p_w) - g(p_m)`: the largest achievable key rate.
pub fn secret_key_capacity(ch: ChannelParams) -> Result<f64> {
    ch.require_advantage()?;
    Ok(binary_entropy(ch.p_w) - binary_entropy(ch.p_m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn trivial_values() {
        assert_eq!(binary_entropy(0.5), 1.0);
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        assert_eq!(min_entropy_per_bit(0.5).unwrap(), 1.0);
        assert_eq!(renyi_entropy_per_bit(0.5).unwrap(), 1.0);
        assert_eq!(
            secret_key_capacity(ChannelParams::new(0.0, 0.5).unwrap()).unwrap(),
            1.0
        );
    }

    #[test]
    fn oracle_values() {
        // 50-digit evaluations of the closed forms
        assert!((binary_entropy(0.2) - 0.721_928_094_887_362_3).abs() < 1e-12);
        assert!((min_entropy_per_bit(0.2).unwrap() - 0.321_928_094_887_362_3).abs() < 1e-12);
        assert!((min_entropy_per_bit(0.8).unwrap() - 0.321_928_094_887_362_3).abs() < 1e-12);
        assert!((renyi_entropy_per_bit(0.2).unwrap() - 0.556_393_348_524_385_3).abs() < 1e-12);
        let ch = ChannelParams::new(0.01, 0.2).unwrap();
        assert!((secret_key_capacity(ch).unwrap() - 0.641_134_958_991_451_2).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(min_entropy_per_bit(0.0).is_err());
        assert!(renyi_entropy_per_bit(1.0).is_err());
        assert!(secret_key_capacity(ChannelParams::new(0.2, 0.2).unwrap()).is_err());
        assert!(ChannelParams::new(1.2, 0.2).is_err());
    }

    #[test]
    fn source_model_reduction() {
        let ch = reduce_source_model(0.0, 0.0, 0.3).unwrap();
        assert_eq!((ch.p_m, ch.p_w), (0.0, 0.3));
        let ch = reduce_source_model(0.5, 0.5, 0.123).unwrap();
        assert_eq!((ch.p_m, ch.p_w), (0.5, 0.5));
        let ch = reduce_source_model(0.01, 0.01, 0.25).unwrap();
        assert!((ch.p_m - 0.0198).abs() < 1e-15);
        assert!((ch.p_w - 0.255).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn entropy_symmetric(p in 0.0f64..=1.0) {
            prop_assert!((binary_entropy(p) - binary_entropy(1.0 - p)).abs() < 1e-12);
        }

        #[test]
        fn entropy_concave(a in 0.0f64..=1.0, b in 0.0f64..=1.0, t in 0.0f64..=1.0) {
            let mid = binary_entropy(t * a + (1.0 - t) * b);
            prop_assert!(mid + 1e-12 >= t * binary_entropy(a) + (1.0 - t) * binary_entropy(b));
        }

        #[test]
        fn renyi_between_min_entropy_bounds(p in 1e-9f64..(1.0 - 1e-9)) {
            let h2 = renyi_entropy_per_bit(p).unwrap();
            let hi = min_entropy_per_bit(p).unwrap();
            prop_assert!(h2 + 1e-12 >= hi);
            prop_assert!(h2 <= 2.0 * hi + 1e-12);
        }

        #[test]
        fn noisier_eavesdropper_gives_advantage(a in 0.0f64..0.5, b in 0.0f64..0.5, e in 0.0f64..0.5) {
            prop_assume!(e > a && e > b);
            let ch = reduce_source_model(a, b, e).unwrap();
            prop_assert!(ch.p_w > ch.p_m);
        }
    }
}
