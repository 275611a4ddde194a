//! Keyless authentication over the noisy shared strings.
//!
//! A base `(n0, k0)` linear code with minimum distance `d` is turned into a
//! constant-weight code of length `2 n0` by the substitution `1 -> 10`,
//! `0 -> 01`. Every codeword then has weight `tau = n0`, and two codewords
//! differ in at least `d` positions where one has a 1 and the other a 0.
//!
//! The sender attaches, for each 1-position of the message's codeword, the
//! bit of its own string `X2` at that position. The receiver reads the same
//! positions of `Y2` and accepts when at most `delta_w` of them disagree. A
//! forger who changes the message must guess at least `d` new positions from
//! the wiretapped string, which disagrees with `Y2` at rate `p_w`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::codes::LinearCode;
use crate::error::{check_len, Error, Result};
use crate::tail;

/// Largest base-code length the builder will try.
pub const N0_CAP: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcSpec {
    pub n0: u64,
    pub k0: u64,
    /// Minimum distance of the base code.
    pub d: u64,
    pub delta_w: u64,
}

impl AcSpec {
    pub fn new(n0: u64, k0: u64, d: u64, delta_w: u64) -> Result<Self> {
        if k0 == 0 || k0 > n0 || d > n0 || delta_w >= n0 {
            return Err(Error::Parameter(format!(
                "invalid AC parameters n0={n0} k0={k0} d={d} delta_w={delta_w}"
            )));
        }
        Ok(AcSpec { n0, k0, d, delta_w })
    }

    /// Length of the constant-weight code and of the authenticating string.
    pub fn n_a(&self) -> u64 {
        2 * self.n0
    }

    /// Weight of every codeword.
    pub fn tau(&self) -> u64 {
        self.n0
    }

    /// Asymmetric semidistance of the doubled code.
    pub fn d01(&self) -> u64 {
        self.d
    }

    /// Check symbols of the base code.
    pub fn r0(&self) -> u64 {
        self.n0 - self.k0
    }
}

/// Positions (0-based, ascending) and the sender's bits at those positions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Authenticator {
    pub positions: Vec<usize>,
    pub bits: BitString,
}

/// A concrete authentication code: parameters plus its base linear code.
#[derive(Debug, Clone)]
pub struct AuthCode {
    spec: AcSpec,
    code: LinearCode,
    /// Information word of a lightest nonzero base codeword.
    lightest: u128,
}

impl AuthCode {
    /// Wraps a base code, measuring its distance exhaustively.
    pub fn from_code(code: LinearCode, delta_w: u64) -> Result<Self> {
        let (d, lightest) = code.min_distance();
        let spec = AcSpec::new(code.n() as u64, code.k() as u64, d as u64, delta_w)?;
        Ok(AuthCode {
            spec,
            code,
            lightest,
        })
    }

    /// Wraps a base code whose distance `d` and a lightest nonzero
    /// information word were found by the caller.
    pub fn from_parts(code: LinearCode, d: u64, lightest: u128, delta_w: u64) -> Result<Self> {
        if lightest == 0 || (code.k() < 128 && lightest >> code.k() != 0) {
            return Err(Error::Parameter("lightest word must be a nonzero information word".into()));
        }
        let spec = AcSpec::new(code.n() as u64, code.k() as u64, d, delta_w)?;
        Ok(AuthCode {
            spec,
            code,
            lightest,
        })
    }

    pub fn spec(&self) -> AcSpec {
        self.spec
    }

    pub fn base_code(&self) -> &LinearCode {
        &self.code
    }

    pub fn with_threshold(mut self, delta_w: u64) -> Result<Self> {
        self.spec = AcSpec::new(self.spec.n0, self.spec.k0, self.spec.d, delta_w)?;
        Ok(self)
    }

    /// A message whose codeword is at distance exactly `d` from that of `m`.
    pub fn nearest_other_message(&self, m: &BitString) -> BitString {
        m.xor(&BitString::from_u128(self.lightest, self.code.k()))
    }

    /// 1-positions of the doubled codeword of `message`.
    pub fn positions(&self, message: &BitString) -> Result<Vec<usize>> {
        let cw = self.code.codeword(message)?;
        Ok((0..cw.len())
            .map(|j| if cw.get(j) { 2 * j } else { 2 * j + 1 })
            .collect())
    }
}

/// Samples random base codes, growing `n0` from `max(k0, d_target)`, until one
/// reaches minimum distance `d_target`. The threshold is set to 0; the
/// planner chooses it.
pub fn build_ac(k0: usize, d_target: usize, seed: u64) -> Result<AuthCode> {
    const ATTEMPTS: u64 = 48;
    if k0 == 0 || k0 > 24 {
        return Err(Error::Parameter(format!(
            "exhaustive distance search needs 1 <= k0 <= 24, got {k0}"
        )));
    }
    if d_target > N0_CAP {
        return Err(Error::Infeasible(format!(
            "distance {d_target} exceeds the base-length cap {N0_CAP}"
        )));
    }
    let start = k0.max(d_target).max(k0 + usize::from(d_target > 1));
    for n0 in start..=N0_CAP {
        for attempt in 0..ATTEMPTS {
            let mut rng = ChaCha8Rng::seed_from_u64(
                seed ^ ((n0 as u64) << 40) ^ (attempt << 20) ^ 0x5bd1_e995,
            );
            let code = LinearCode::random(k0, n0 - k0, &mut rng);
            let (d, _) = code.min_distance();
            if d >= d_target {
                return AuthCode::from_code(code, 0);
            }
        }
    }
    Err(Error::Infeasible(format!(
        "no base code with k0={k0}, d>={d_target} found up to n0={N0_CAP}"
    )))
}

pub fn make_authenticator(ac: &AuthCode, message: &BitString, x2: &BitString) -> Result<Authenticator> {
    check_len(ac.spec.n_a() as usize, x2.len())?;
    let positions = ac.positions(message)?;
    let bits = BitString::from_bits(&positions.iter().map(|&p| x2.get(p)).collect::<Vec<_>>());
    Ok(Authenticator { positions, bits })
}

/// Accepts iff the authenticator sits on the message's positions and at most
/// `delta_w` of its bits disagree with `y2`.
pub fn verify_authenticator(ac: &AuthCode, message: &BitString, auth: &Authenticator, y2: &BitString) -> Result<bool> {
    check_len(ac.spec.n_a() as usize, y2.len())?;
    let expected = ac.positions(message)?;
    if auth.positions.len() != ac.spec.tau() as usize
        || auth.bits.len() != auth.positions.len()
        || auth.positions.iter().any(|&p| p >= y2.len())
        || auth.positions != expected
    {
        return Ok(false);
    }
    let disagreements = auth
        .positions
        .iter()
        .enumerate()
        .filter(|(i, &p)| auth.bits.get(*i) != y2.get(p))
        .count();
    Ok(disagreements as u64 <= ac.spec.delta_w)
}

/// False rejection bound `sum_{i > delta_w} C(tau, i) p_m^i (1 - p_m)^{tau - i}`.
pub fn pf_bound(spec: &AcSpec, p_m: f64) -> f64 {
    tail::upper_tail(spec.tau(), p_m, spec.delta_w)
}

/// Deception bound: probability that `d` positions at crossover `p_w` and the
/// remaining `tau - d` at crossover `p_m` together disagree in at most
/// `delta_w` places.
pub fn pd_bound(spec: &AcSpec, p_m: f64, p_w: f64) -> f64 {
    tail::convolved_cdf(spec.d, p_w, spec.tau() - spec.d, p_m, spec.delta_w)
}

/// The alternative deception expression with `p_m` in both factors and the
/// inner sum capped at `delta_w - 1` independently of the outer index. Kept
/// for comparison only; it is not an upper bound on the forger's success.
pub fn pd_bound_compat(spec: &AcSpec, p_m: f64) -> f64 {
    if spec.delta_w == 0 {
        return 0.0;
    }
    tail::cdf(spec.d, p_m, spec.delta_w) * tail::cdf(spec.tau() - spec.d, p_m, spec.delta_w - 1)
}
