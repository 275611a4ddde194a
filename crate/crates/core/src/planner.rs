//! Parameter solving and key-rate optimisation for the twelve protocols.
//!
//! Every plan fixes the partition of the raw strings into parts `k1..k5`
//! and reports `key_rate = ell / total_k`. Lengths are rounded up.
//!
//! - Reconciliation: `r1` is the least check length whose random-coding
//!   bound meets `P_e` for a `k1`-bit block.
//! - Hashing: `k1 H2 >= ell + r1 - 2 log P_risk - log(I ln 2) - 2`.
//! - Extraction: `k1 H_inf >= ell c + r1 - log P_risk + u + 3 log(ell / eps) + 3`
//!   with `eps = (I / 2 ell)^2` and `u` the seed length of a weak `(nu, c)` design.
//! - Keyless authentication: an AC over `k2 = 2 n0` bits with
//!   `n0 (1 - g(d / n0)) >= k0` and tail bounds meeting `P_f`, `P_d`.
//! - Keyed authentication (primed protocols): an ASU2 tag whose key length
//!   `ell0 = b (i + 2)` is minimised subject to `(i + 1) / 2^b <= P_d`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::authcode::{pd_bound, pf_bound, AcSpec};
use crate::codes::{gallager_exponent, golden_max, min_check_symbols};
use crate::entropy::{binary_entropy, min_entropy_per_bit, renyi_entropy_per_bit, secret_key_capacity, ChannelParams};
use crate::error::{Error, Result};
use crate::extractor::{design_nu_log2, seed_length_for_nu};
use crate::leakage::{extraction_report, hashing_leakage, required_eps_log2, LeakageReport};
use crate::tail;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Requirements {
    pub ell_req: u64,
    pub i_adm: f64,
    pub p_e_adm: f64,
    pub p_f_adm: f64,
    pub p_d_adm: f64,
    pub p_risk_adm: f64,
}

impl Requirements {
    pub fn new(ell_req: u64, i_adm: f64, p_e_adm: f64, p_f_adm: f64, p_d_adm: f64, p_risk_adm: f64) -> Result<Self> {
        let r = Requirements {
            ell_req,
            i_adm,
            p_e_adm,
            p_f_adm,
            p_d_adm,
            p_risk_adm,
        };
        r.validate()?;
        Ok(r)
    }

    /// `I = 1e-30` and every probability `1e-5`.
    pub fn standard(ell_req: u64) -> Self {
        Requirements {
            ell_req,
            i_adm: 1e-30,
            p_e_adm: 1e-5,
            p_f_adm: 1e-5,
            p_d_adm: 1e-5,
            p_risk_adm: 1e-5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ell_req == 0 {
            return Err(Error::Parameter("key length must be at least 1".into()));
        }
        if !(self.i_adm > 0.0 && self.i_adm.is_finite()) {
            return Err(Error::Parameter(format!("I_adm = {} must be positive", self.i_adm)));
        }
        for (name, p) in [
            ("P_e", self.p_e_adm),
            ("P_f", self.p_f_adm),
            ("P_d", self.p_d_adm),
            ("P_risk", self.p_risk_adm),
        ] {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::Parameter(format!("{name} = {p} outside (0, 1)")));
            }
        }
        Ok(())
    }

    pub fn with_ell(self, ell_req: u64) -> Self {
        Requirements { ell_req, ..self }
    }

    /// Each hybrid stage gets half the leakage and half the risk budget.
    pub fn stage_share(self) -> Self {
        Requirements {
            i_adm: self.i_adm / 2.0,
            p_risk_adm: self.p_risk_adm / 2.0,
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProtocolKind {
    Alpha,
    Beta,
    AlphaExt,
    BetaExt,
    AlphaPrime,
    BetaPrime,
    AlphaPrimeExt,
    BetaPrimeExt,
    AlphaThenAlphaPrimeExt,
    BetaThenAlphaPrimeExt,
    AlphaThenBetaPrimeExt,
    BetaThenBetaPrimeExt,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 12] = [
        ProtocolKind::Alpha,
        ProtocolKind::Beta,
        ProtocolKind::AlphaExt,
        ProtocolKind::BetaExt,
        ProtocolKind::AlphaPrime,
        ProtocolKind::BetaPrime,
        ProtocolKind::AlphaPrimeExt,
        ProtocolKind::BetaPrimeExt,
        ProtocolKind::AlphaThenAlphaPrimeExt,
        ProtocolKind::BetaThenAlphaPrimeExt,
        ProtocolKind::AlphaThenBetaPrimeExt,
        ProtocolKind::BetaThenBetaPrimeExt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Alpha => "alpha",
            ProtocolKind::Beta => "beta",
            ProtocolKind::AlphaExt => "alpha_ext",
            ProtocolKind::BetaExt => "beta_ext",
            ProtocolKind::AlphaPrime => "alpha_prime",
            ProtocolKind::BetaPrime => "beta_prime",
            ProtocolKind::AlphaPrimeExt => "alpha_prime_ext",
            ProtocolKind::BetaPrimeExt => "beta_prime_ext",
            ProtocolKind::AlphaThenAlphaPrimeExt => "alpha+alpha_prime_ext",
            ProtocolKind::BetaThenAlphaPrimeExt => "beta+alpha_prime_ext",
            ProtocolKind::AlphaThenBetaPrimeExt => "alpha+beta_prime_ext",
            ProtocolKind::BetaThenBetaPrimeExt => "beta+beta_prime_ext",
        }
    }

    /// Privacy amplification by extraction (in the final stage).
    pub fn is_ext(self) -> bool {
        !matches!(
            self,
            ProtocolKind::Alpha | ProtocolKind::Beta | ProtocolKind::AlphaPrime | ProtocolKind::BetaPrime
        )
    }

    /// Authenticated with a pre-shared key rather than an AC.
    pub fn is_primed(self) -> bool {
        matches!(
            self,
            ProtocolKind::AlphaPrime | ProtocolKind::BetaPrime | ProtocolKind::AlphaPrimeExt | ProtocolKind::BetaPrimeExt
        )
    }

    pub fn is_hybrid(self) -> bool {
        self.stages().is_some()
    }

    /// The seed (or hash key) comes from the shared strings instead of being sent.
    pub fn is_beta_family(self) -> bool {
        matches!(
            self,
            ProtocolKind::Beta
                | ProtocolKind::BetaExt
                | ProtocolKind::BetaPrime
                | ProtocolKind::BetaPrimeExt
                | ProtocolKind::AlphaThenBetaPrimeExt
                | ProtocolKind::BetaThenBetaPrimeExt
        )
    }

    /// `(key-generation stage, final stage)` of a hybrid.
    pub fn stages(self) -> Option<(ProtocolKind, ProtocolKind)> {
        use ProtocolKind::*;
        match self {
            AlphaThenAlphaPrimeExt => Some((Alpha, AlphaPrimeExt)),
            BetaThenAlphaPrimeExt => Some((Beta, AlphaPrimeExt)),
            AlphaThenBetaPrimeExt => Some((Alpha, BetaPrimeExt)),
            BetaThenBetaPrimeExt => Some((Beta, BetaPrimeExt)),
            _ => None,
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['\'', '`'], "_prime").replace("__", "_");
        let key = key.replace("_prime_prime", "_prime");
        ProtocolKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == key || k.name().replace('+', ",") == key || k.name().replace('+', "/") == key)
            .ok_or_else(|| Error::Parameter(format!("unknown protocol {s:?}")))
    }
}

impl Serialize for ProtocolKind {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for ProtocolKind {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parameters of the keyed tag used by primed protocols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsuChoice {
    /// Message length to authenticate.
    pub a: u64,
    pub b: u64,
    pub i: u32,
    /// Key length `b (i + 2)`.
    pub ell0: u64,
}

impl AsuChoice {
    pub fn log2_epsilon(&self) -> f64 {
        (self.i as f64 + 1.0).log2() - self.b as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolPlan {
    pub protocol: ProtocolKind,
    pub ell: u64,
    /// `k1, k2, ...` in protocol order.
    pub k_parts: Vec<u64>,
    pub total_k: u64,
    pub r1: u64,
    pub r2: u64,
    pub r0: u64,
    pub u: u64,
    pub nu: u32,
    pub c: Option<f64>,
    pub ac: Option<AcSpec>,
    /// Length of the authenticated message.
    pub k0: u64,
    pub asu: Option<AsuChoice>,
    pub ell0: u64,
    pub key_rate: f64,
    /// Random-coding bound of the first reconciliation code.
    pub pe_bound: f64,
    /// Bound of the second code, 0 when there is none.
    pub pe2_bound: f64,
    pub pf_bound: f64,
    pub pd_bound: f64,
    pub leakage: LeakageReport,
    /// Hybrid stage plans, key-generation stage first.
    pub stages: Vec<ProtocolPlan>,
}

impl ProtocolPlan {
    pub fn k(&self, i: usize) -> u64 {
        self.k_parts.get(i - 1).copied().unwrap_or(0)
    }

    /// Re-derives the plan's constraints and reports the first that fails.
    pub fn verify(&self, ch: ChannelParams, req: &Requirements) -> Result<()> {
        let fail = |what: String| Err(Error::Infeasible(format!("{}: {what}", self.protocol)));
        if self.k_parts.iter().sum::<u64>() != self.total_k {
            return fail("parts do not sum to the total".into());
        }
        if (self.key_rate - self.ell as f64 / self.total_k as f64).abs() > 1e-12 * self.key_rate.max(1e-300) {
            return fail("key rate differs from ell / total".into());
        }
        if self.protocol.is_hybrid() {
            let share = req.stage_share();
            match self.stages.as_slice() {
                [s2] if s2.ell0 == 0 => s2.verify(ch, &share)?,
                [s1, s2] => {
                    s2.verify(ch, &share)?;
                    s1.verify(ch, &share.with_ell(s2.ell0))?;
                }
                _ => return fail("hybrid stages missing".into()),
            }
            if self.ell < req.ell_req {
                return fail("key shorter than required".into());
            }
            return Ok(());
        }
        let tol = 1e-9;
        if self.pe_bound > req.p_e_adm * (1.0 + tol) || self.pe2_bound > req.p_e_adm * (1.0 + tol) {
            return fail(format!("reconciliation bound {} above {}", self.pe_bound, req.p_e_adm));
        }
        if self.ell < req.ell_req {
            return fail("key shorter than required".into());
        }
        let k1 = self.k(1) as f64;
        if self.protocol.is_ext() {
            let h = min_entropy_per_bit(ch.p_w)?;
            let log2_eps = required_eps_log2(req.i_adm, self.ell);
            let c = self.c.unwrap_or(f64::NAN);
            if seed_length_for_nu(design_nu_log2(self.k(1), log2_eps), c)? != self.u {
                return fail("seed length inconsistent with k1 and c".into());
            }
            let rhs = ext_rhs(self.ell, c, self.r1, self.u, log2_eps, req.p_risk_adm);
            let slack = k1 * h - rhs;
            if !(slack >= -1e-6 && slack < h + 1.0) {
                return fail(format!("min-entropy balance off by {slack}"));
            }
            if self.leakage.log2_bound > req.i_adm.log2() + 1e-9 {
                return fail("extractor leakage above I_adm".into());
            }
        } else {
            let h2 = renyi_entropy_per_bit(ch.p_w)?;
            let slack = k1 * h2 - hash_rhs(self.ell, self.r1, req);
            if !(slack >= -1e-6 && slack < h2 + 1.0) {
                return fail(format!("collision-entropy balance off by {slack}"));
            }
            if self.leakage.log2_bound > req.i_adm.log2() + 1e-9 {
                return fail("hashing leakage above I_adm".into());
            }
        }
        if self.leakage.risk > req.p_risk_adm * (1.0 + tol) {
            return fail("risk above P_risk".into());
        }
        if let Some(ac) = self.ac {
            if (ac.n0 as f64) * (1.0 - binary_entropy(ac.d as f64 / ac.n0 as f64)) < ac.k0 as f64 - 1e-9 {
                return fail("AC distance beyond the Varshamov-Gilbert bound".into());
            }
            if pf_bound(&ac, ch.p_m) > req.p_f_adm * (1.0 + tol) || pd_bound(&ac, ch.p_m, ch.p_w) > req.p_d_adm * (1.0 + tol) {
                return fail("AC bounds above requirements".into());
            }
        }
        if let Some(asu) = self.asu {
            if asu.log2_epsilon() > req.p_d_adm.log2() + 1e-12 || asu.b << asu.i < asu.a {
                return fail("tag parameters do not cover the message".into());
            }
        }
        Ok(())
    }
}

/// Options that change how plans are built.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanOptions {
    /// In hybrids, size the final stage's tag for a partially leaked key:
    /// the tag must satisfy the partial-key deception bound with the
    /// stage-1 leakage counted as lost key entropy.
    pub partial_key_auth: bool,
}

fn hash_rhs(ell: u64, r1: u64, req: &Requirements) -> f64 {
    ell as f64 + r1 as f64 - 2.0 * req.p_risk_adm.log2() - (req.i_adm * std::f64::consts::LN_2).log2() - 2.0
}

fn ext_rhs(ell: u64, c: f64, r1: u64, u: u64, log2_eps: f64, p_risk: f64) -> f64 {
    let ell_f = ell as f64;
    ell_f * c + r1 as f64 - p_risk.log2() + u as f64 + 3.0 * (ell_f.log2() - log2_eps) + 3.0
}

/// Check length for `k` bits; `None` when no rate of at least 1/2 suffices.
fn checks_for(k: u64, ch: ChannelParams, p_e: f64) -> Option<u64> {
    if ch.p_m == 0.0 {
        return Some(0);
    }
    min_check_symbols(k, ch.p_m, p_e).ok()
}

/// Block error bound `2^{-k E(k / (k + r))}`.
fn pe_of(k: u64, r: u64, ch: ChannelParams) -> f64 {
    if ch.p_m == 0.0 || k == 0 {
        return 0.0;
    }
    let rc = k as f64 / (k + r) as f64;
    match gallager_exponent(rc, ch.p_m) {
        Ok(e) => 2f64.powf(-(k as f64) * e),
        Err(_) => 1.0,
    }
}

const K_CAP: u64 = 1 << 52;

/// Least `k` with `k h >= rhs(k, r(k))` reached by iterating upward from
/// `start`; `rhs(k)` is everything but the check length.
fn solve_k1<F: FnMut(u64) -> f64>(start: u64, h: f64, ch: ChannelParams, p_e: f64, mut rhs: F) -> Result<(u64, u64)> {
    let mut k = start.max(1);
    for _ in 0..400 {
        let Some(r) = checks_for(k, ch, p_e) else {
            k = k.saturating_mul(2);
            if k > K_CAP {
                break;
            }
            continue;
        };
        let need = (rhs(k) + r as f64) / h;
        let need = need.ceil().max(1.0);
        if need <= k as f64 {
            return Ok((k, r));
        }
        if need > K_CAP as f64 {
            break;
        }
        k = (need as u64).max(k + 1);
    }
    Err(Error::Infeasible(format!(
        "the entropy balance has no solution: check symbols grow as fast as the usable entropy (p_m = {}, p_w = {})",
        ch.p_m, ch.p_w
    )))
}

/// Largest `d <= n0 / 2` with `n0 (1 - g(d / n0)) >= k0`, if any `d >= 1`.
fn vg_distance(n0: u64, k0: u64) -> Option<u64> {
    let ok = |d: u64| (n0 as f64) * (1.0 - binary_entropy(d as f64 / n0 as f64)) >= k0 as f64;
    if n0 < 2 || !ok(1) {
        return None;
    }
    let (mut lo, mut hi) = (1u64, n0 / 2 + 1);
    // ok(lo), !ok(hi)
    if ok(n0 / 2) {
        return Some(n0 / 2);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

/// Solves the keyless AC design for a `k0`-bit message: smallest `n0` found by
/// bisection such that, with `delta_w` at the `P_f` quantile and `d` at the
/// Varshamov-Gilbert limit, the deception bound meets `P_d`.
pub fn solve_ac(k0: u64, ch: ChannelParams, p_f: f64, p_d: f64) -> Result<AcSpec> {
    AcSolver::new(ch, p_f, p_d).exact(k0)
}

struct AcSolver {
    ch: ChannelParams,
    p_f: f64,
    p_d: f64,
    exact: BTreeMap<u64, AcSpec>,
}

impl AcSolver {
    fn new(ch: ChannelParams, p_f: f64, p_d: f64) -> Self {
        AcSolver {
            ch,
            p_f,
            p_d,
            exact: BTreeMap::new(),
        }
    }

    fn delta_w(&self, n0: u64) -> u64 {
        if self.ch.p_m == 0.0 {
            0
        } else {
            tail::upper_quantile(n0, self.ch.p_m, self.p_f)
        }
    }

    fn try_n0(&self, n0: u64, k0: u64) -> Option<AcSpec> {
        let d = vg_distance(n0, k0)?;
        let dw = self.delta_w(n0);
        if dw >= n0 {
            return None;
        }
        let spec = AcSpec::new(n0, k0, d, dw).ok()?;
        (pd_bound(&spec, self.ch.p_m, self.ch.p_w) <= self.p_d).then_some(spec)
    }

    fn nearest_ratio(&self, k0: u64) -> Option<f64> {
        let below = self.exact.range(..=k0).next_back();
        let above = self.exact.range(k0..).next();
        let pick = match (below, above) {
            (Some(b), Some(a)) => {
                if k0 - b.0 <= a.0 - k0 {
                    b
                } else {
                    a
                }
            }
            (Some(b), None) => b,
            (None, Some(a)) => a,
            (None, None) => return None,
        };
        Some(pick.1.n0 as f64 / pick.1.k0 as f64)
    }

    fn exact(&mut self, k0: u64) -> Result<AcSpec> {
        if k0 == 0 {
            return Err(Error::Parameter("empty AC message".into()));
        }
        if let Some(s) = self.exact.get(&k0) {
            return Ok(*s);
        }
        if self.ch.p_w <= self.ch.p_m {
            return Err(Error::ZeroCapacity {
                p_m: self.ch.p_m,
                p_w: self.ch.p_w,
            });
        }
        // bracket: lo infeasible, hi feasible
        let guess = self.nearest_ratio(k0).map(|r| (r * k0 as f64).round() as u64);
        let (mut lo, mut hi) = match guess {
            Some(g) => {
                let width = (g / 200).max(4);
                (g.saturating_sub(width).max(k0), g + width)
            }
            None => (k0, 2 * k0 + 16),
        };
        if lo > k0 && self.try_n0(lo, k0).is_some() {
            let mut step = (hi - lo).max(4);
            loop {
                hi = lo;
                lo = lo.saturating_sub(step).max(k0);
                if lo == k0 || self.try_n0(lo, k0).is_none() {
                    break;
                }
                step *= 2;
            }
        }
        let mut best = self.try_n0(hi, k0);
        let mut step = (hi - lo).max(4);
        while best.is_none() {
            lo = hi;
            hi = hi.saturating_add(step);
            step = step.saturating_mul(2);
            if hi > 1024 * k0 + (1 << 20) {
                return Err(Error::Infeasible(format!(
                    "no authentication code for {k0}-bit messages meets P_f = {}, P_d = {}",
                    self.p_f, self.p_d
                )));
            }
            best = self.try_n0(hi, k0);
        }
        let mut best = best.expect("feasible bracket end");
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            match self.try_n0(mid, k0) {
                Some(s) => {
                    hi = mid;
                    best = s;
                }
                None => lo = mid,
            }
        }
        self.exact.insert(k0, best);
        Ok(best)
    }

    /// `k2 = 2 n0` from the nearest exact solution, scaled by `k0`; solves
    /// exactly when nothing close is cached.
    fn estimate_k2(&mut self, k0: u64) -> Result<u64> {
        if let Some(s) = self.exact.get(&k0) {
            return Ok(2 * s.n0);
        }
        let near = self
            .exact
            .iter()
            .map(|(&k, s)| ((k as f64 / k0 as f64).ln().abs(), *s))
            .min_by(|a, b| a.0.total_cmp(&b.0));
        match near {
            Some((dist, s)) if dist < 0.7 && k0 > 2000 => {
                Ok(2 * (s.n0 as f64 * k0 as f64 / s.k0 as f64).ceil() as u64)
            }
            _ => Ok(2 * self.exact(k0)?.n0),
        }
    }
}

/// The ASU2 tag with the shortest key for an `a`-bit message and
/// substitution probability at most `2^log2_eps_max`.
pub fn choose_asu(a: u64, log2_eps_max: f64) -> Result<AsuChoice> {
    if a == 0 {
        return Err(Error::Parameter("empty message".into()));
    }
    let mut best: Option<AsuChoice> = None;
    for i in 1..=40u32 {
        let by_len = a.div_ceil(1u64 << i);
        let by_eps = ((i as f64 + 1.0).log2() - log2_eps_max).ceil().max(1.0) as u64;
        let b = by_len.max(by_eps);
        let ell0 = b * (i as u64 + 2);
        if best.is_none_or(|x| ell0 < x.ell0) {
            best = Some(AsuChoice { a, b, i, ell0 });
        }
        if by_eps >= by_len {
            break;
        }
    }
    best.ok_or_else(|| Error::Infeasible("no tag parameters".into()))
}

/// Working state for one planning call: caches shared across the c search.
struct Planner {
    ch: ChannelParams,
    req: Requirements,
    opts: PlanOptions,
    ac: AcSolver,
    stage1: HashMap<(ProtocolKind, u64), Result<ProtocolPlan>>,
}

/// Everything a single-stage plan needs except the authentication length.
struct Core {
    k1: u64,
    r1: u64,
    u: u64,
    nu: u32,
    k3: u64,
    r2: u64,
    leakage: LeakageReport,
}

impl Planner {
    fn new(ch: ChannelParams, req: Requirements, opts: PlanOptions) -> Result<Self> {
        req.validate()?;
        ch.require_advantage()?;
        Ok(Planner {
            ch,
            req,
            opts,
            ac: AcSolver::new(ch, req.p_f_adm, req.p_d_adm),
            stage1: HashMap::new(),
        })
    }

    fn core(&self, kind: ProtocolKind, req: &Requirements, c: Option<f64>) -> Result<Core> {
        let ch = self.ch;
        let ell = req.ell_req;
        let (k1, r1, u, nu, leakage) = if kind.is_ext() {
            let c = c.ok_or_else(|| Error::Parameter("extraction needs a design parameter".into()))?;
            if !(c > 1.0) {
                return Err(Error::Parameter(format!("design parameter c = {c} must exceed 1")));
            }
            let h = min_entropy_per_bit(ch.p_w)?;
            let log2_eps = required_eps_log2(req.i_adm, ell);
            let base = ext_rhs(ell, c, 0, 0, log2_eps, req.p_risk_adm);
            let seed = |k: u64| seed_length_for_nu(design_nu_log2(k, log2_eps), c).unwrap_or(u64::MAX / 4);
            let start = (base / h).ceil() as u64;
            let (k1, r1) = solve_k1(start, h, ch, req.p_e_adm, |k| base + seed(k) as f64)?;
            let nu = design_nu_log2(k1, log2_eps);
            let u = seed_length_for_nu(nu, c)?;
            (k1, r1, u, nu, extraction_report(ell, log2_eps, req.p_risk_adm))
        } else {
            let h2 = renyi_entropy_per_bit(ch.p_w)?;
            let base = hash_rhs(ell, 0, req);
            let start = (base / h2).ceil() as u64;
            let (k1, r1) = solve_k1(start, h2, ch, req.p_e_adm, |_| base)?;
            let s = -2.0 * req.p_risk_adm.log2() - 2.0;
            let t = k1 as f64 * (1.0 - h2);
            (k1, r1, 0, 0, hashing_leakage(k1, ell, t, r1, s))
        };
        // second reconciled part: hash key or seed taken from the strings
        let k3 = if !kind.is_beta_family() {
            0
        } else if kind.is_ext() {
            u
        } else {
            k1
        };
        let r2 = if k3 > 0 {
            checks_for(k3, ch, req.p_e_adm).ok_or_else(|| {
                Error::Infeasible(format!("{k3}-bit seed block cannot be reconciled at P_e = {}", req.p_e_adm))
            })?
        } else {
            0
        };
        Ok(Core {
            k1,
            r1,
            u,
            nu,
            k3,
            r2,
            leakage,
        })
    }

    /// Authenticated message length of a single-stage protocol.
    fn message_len(kind: ProtocolKind, core: &Core) -> u64 {
        use ProtocolKind::*;
        match kind {
            Alpha | AlphaPrime => core.k1 + core.r1,
            AlphaExt | AlphaPrimeExt => core.u + core.r1,
            _ => core.r1 + core.r2,
        }
    }

    fn tag_target(&self, req: &Requirements, in_hybrid: bool) -> f64 {
        if in_hybrid && self.opts.partial_key_auth {
            // 2^{-((b - leaked) / 2 - 1)} <= P_d
            -(2.0 * (1.0 - req.p_d_adm.log2()) + req.i_adm)
        } else {
            req.p_d_adm.log2()
        }
    }

    /// Single-stage plan. `estimate` ranks c values with a scaled AC length.
    fn single(&mut self, kind: ProtocolKind, req: &Requirements, c: Option<f64>, estimate: bool, in_hybrid: bool) -> Result<ProtocolPlan> {
        let core = self.core(kind, req, c)?;
        let k0 = Self::message_len(kind, &core);
        let ell = req.ell_req;
        let (ac, asu, k2) = if k0 == 0 {
            // nothing is sent, so nothing is authenticated
            (None, None, 0)
        } else if kind.is_primed() {
            let asu = choose_asu(k0, self.tag_target(req, in_hybrid))?;
            (None, Some(asu), 0)
        } else if estimate {
            let k2 = self.ac.estimate_k2(k0)?;
            (None, None, k2)
        } else {
            let ac = self.ac.exact(k0)?;
            (Some(ac), None, 2 * ac.n0)
        };
        let k_parts = if kind.is_primed() {
            if core.k3 > 0 {
                vec![core.k1, core.k3]
            } else {
                vec![core.k1]
            }
        } else if core.k3 > 0 {
            vec![core.k1, k2, core.k3]
        } else {
            vec![core.k1, k2]
        };
        let total_k: u64 = k_parts.iter().sum();
        let (pf, pd) = match ac {
            Some(ac) => (pf_bound(&ac, self.ch.p_m), pd_bound(&ac, self.ch.p_m, self.ch.p_w)),
            None => (0.0, asu.map(|a| 2f64.powf(a.log2_epsilon())).unwrap_or(f64::NAN)),
        };
        Ok(ProtocolPlan {
            protocol: kind,
            ell,
            k_parts,
            total_k,
            r1: core.r1,
            r2: core.r2,
            r0: ac.map(|a| a.r0()).unwrap_or(0),
            u: core.u,
            nu: core.nu,
            c: if kind.is_ext() { c } else { None },
            ac,
            k0,
            asu,
            ell0: asu.map(|a| a.ell0).unwrap_or(0),
            key_rate: ell as f64 / total_k as f64,
            pe_bound: pe_of(core.k1, core.r1, self.ch),
            pe2_bound: pe_of(core.k3, core.r2, self.ch),
            pf_bound: pf,
            pd_bound: pd,
            leakage: core.leakage,
            stages: Vec::new(),
        })
    }

    fn stage1(&mut self, kind: ProtocolKind, ell0: u64) -> Result<ProtocolPlan> {
        if let Some(p) = self.stage1.get(&(kind, ell0)) {
            return p.clone();
        }
        let req = self.req.stage_share().with_ell(ell0);
        let p = self.single(kind, &req, None, false, false);
        self.stage1.insert((kind, ell0), p.clone());
        p
    }

    fn hybrid(&mut self, kind: ProtocolKind, c: f64) -> Result<ProtocolPlan> {
        let (first, second) = kind.stages().expect("hybrid");
        let share = self.req.stage_share();
        let s2 = self
            .single(second, &share, Some(c), false, true)
            .map_err(|e| stage_error("final", e))?;
        if s2.ell0 == 0 {
            let mut only = s2.clone();
            only.protocol = kind;
            only.stages = vec![s2];
            return Ok(only);
        }
        let s1 = self.stage1(first, s2.ell0).map_err(|e| stage_error("key-generation", e))?;
        let k_parts: Vec<u64> = s1.k_parts.iter().chain(&s2.k_parts).copied().collect();
        let total_k = k_parts.iter().sum();
        let leakage = LeakageReport {
            shannon_bound: s2.leakage.shannon_bound,
            log2_bound: s2.leakage.log2_bound,
            risk: (s1.leakage.risk + s2.leakage.risk).min(1.0),
            mechanism: s2.leakage.mechanism,
            vacuous: s2.leakage.vacuous,
        };
        Ok(ProtocolPlan {
            protocol: kind,
            ell: s2.ell,
            k_parts,
            total_k,
            r1: s2.r1,
            r2: s2.r2,
            r0: s1.r0,
            u: s2.u,
            nu: s2.nu,
            c: s2.c,
            ac: s1.ac,
            k0: s2.k0,
            asu: s2.asu,
            ell0: s2.ell0,
            key_rate: s2.ell as f64 / total_k as f64,
            pe_bound: s1.pe_bound.max(s2.pe_bound),
            pe2_bound: s1.pe2_bound.max(s2.pe2_bound),
            pf_bound: s1.pf_bound,
            pd_bound: s1.pd_bound,
            leakage,
            stages: vec![s1, s2],
        })
    }

    fn at_c(&mut self, kind: ProtocolKind, c: Option<f64>, estimate: bool) -> Result<ProtocolPlan> {
        if kind.is_hybrid() {
            self.hybrid(kind, c.unwrap_or(f64::NAN))
        } else {
            let req = self.req;
            self.single(kind, &req, c, estimate, false)
        }
    }

    fn optimise(&mut self, kind: ProtocolKind) -> Result<ProtocolPlan> {
        if !kind.is_ext() {
            return self.at_c(kind, None, false);
        }
        let grid = c_grid();
        let mut ranked: Vec<(f64, usize)> = Vec::with_capacity(grid.len());
        let mut first_err = None;
        for (idx, &c) in grid.iter().enumerate() {
            match self.at_c(kind, Some(c), true) {
                Ok(p) => ranked.push((p.key_rate, idx)),
                Err(e) => {
                    first_err.get_or_insert(e);
                }
            }
        }
        if ranked.is_empty() {
            return Err(first_err.unwrap_or_else(|| Error::Infeasible("empty c grid".into())));
        }
        ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let top = ranked[0].1;
        let lo = grid[top.saturating_sub(1)];
        let hi = grid[(top + 1).min(grid.len() - 1)];
        let (c_ref, _) = golden_max(
            |c| self.at_c(kind, Some(c), true).map(|p| p.key_rate).unwrap_or(0.0),
            lo,
            hi,
            1e-4 * lo,
        );
        let mut candidates: Vec<f64> = vec![c_ref];
        candidates.extend(ranked.iter().take(3).map(|&(_, i)| grid[i]));
        candidates.extend(REFERENCE_C);
        let mut best: Option<ProtocolPlan> = None;
        for c in candidates {
            if let Ok(p) = self.at_c(kind, Some(c), false) {
                if best.as_ref().is_none_or(|b| p.key_rate > b.key_rate) {
                    best = Some(p);
                }
            }
        }
        best.ok_or_else(|| first_err.unwrap_or_else(|| Error::Infeasible("no feasible design parameter".into())))
    }
}

fn stage_error(stage: &str, e: Error) -> Error {
    match e {
        Error::Infeasible(m) => Error::Infeasible(format!("{stage} stage: {m}")),
        other => other,
    }
}

/// c values every optimised plan must match or beat.
pub const REFERENCE_C: [f64; 4] = [1.5, 2.0, std::f64::consts::E, 4.0];

/// 200 log-spaced points on `[1.001, 64]`.
pub fn c_grid() -> Vec<f64> {
    let (a, b) = (1.001f64.ln(), 64f64.ln());
    (0..200).map(|i| (a + (b - a) * i as f64 / 199.0).exp()).collect()
}

/// Plan with the design parameter optimised for extraction protocols.
pub fn plan(kind: ProtocolKind, ch: ChannelParams, req: &Requirements) -> Result<ProtocolPlan> {
    plan_with(kind, ch, req, PlanOptions::default())
}

pub fn plan_with(kind: ProtocolKind, ch: ChannelParams, req: &Requirements, opts: PlanOptions) -> Result<ProtocolPlan> {
    Planner::new(ch, *req, opts)?.optimise(kind)
}

/// Plan at a fixed design parameter (ignored for hashing protocols).
pub fn plan_at_c(kind: ProtocolKind, ch: ChannelParams, req: &Requirements, c: f64) -> Result<ProtocolPlan> {
    let c = kind.is_ext().then_some(c);
    Planner::new(ch, *req, PlanOptions::default())?.at_c(kind, c, false)
}

pub fn plan_single_hash(kind: ProtocolKind, ch: ChannelParams, req: &Requirements) -> Result<ProtocolPlan> {
    expect_kind(kind, &[ProtocolKind::Alpha, ProtocolKind::Beta])?;
    plan(kind, ch, req)
}

pub fn plan_single_ext(kind: ProtocolKind, ch: ChannelParams, req: &Requirements) -> Result<ProtocolPlan> {
    expect_kind(kind, &[ProtocolKind::AlphaExt, ProtocolKind::BetaExt])?;
    plan(kind, ch, req)
}

pub fn plan_primed(kind: ProtocolKind, ch: ChannelParams, req: &Requirements) -> Result<ProtocolPlan> {
    expect_kind(
        kind,
        &[
            ProtocolKind::AlphaPrime,
            ProtocolKind::BetaPrime,
            ProtocolKind::AlphaPrimeExt,
            ProtocolKind::BetaPrimeExt,
        ],
    )?;
    plan(kind, ch, req)
}

pub fn plan_hybrid(kind: ProtocolKind, ch: ChannelParams, req: &Requirements) -> Result<ProtocolPlan> {
    if !kind.is_hybrid() {
        return Err(Error::Parameter(format!("{kind} is not a hybrid protocol")));
    }
    plan(kind, ch, req)
}

fn expect_kind(kind: ProtocolKind, allowed: &[ProtocolKind]) -> Result<()> {
    if allowed.contains(&kind) {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{kind} is not handled here")))
    }
}

/// Large-`ell` limit of the key rate.
pub fn asymptotic_rate(kind: ProtocolKind, ch: ChannelParams) -> Result<f64> {
    ch.require_advantage()?;
    let g = binary_entropy(ch.p_m);
    let h2 = renyi_entropy_per_bit(ch.p_w)?;
    let hinf = min_entropy_per_bit(ch.p_w)?;
    use ProtocolKind::*;
    Ok(match kind {
        Alpha => (h2 - g) / (3.0 + 2.0 * g),
        Beta => (h2 - g) / (2.0 + 4.0 * g),
        AlphaExt | BetaExt => (hinf - g) / (1.0 + 2.0 * g),
        AlphaPrime => h2 - g,
        BetaPrime => (h2 - g) / 2.0,
        AlphaPrimeExt | BetaPrimeExt => hinf - g,
        AlphaThenAlphaPrimeExt | BetaThenAlphaPrimeExt | AlphaThenBetaPrimeExt | BetaThenBetaPrimeExt => hinf - g,
    })
}

/// Limit of the hashing hybrid that sends its hash key under a stage-1 key.
pub fn hash_hybrid_asymptote(ch: ChannelParams) -> Result<f64> {
    asymptotic_rate(ProtocolKind::AlphaPrime, ch)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub protocol: ProtocolKind,
    pub ell: u64,
    pub c_opt: Option<f64>,
    pub key_rate: f64,
    pub asymptote: f64,
    pub plan: Option<ProtocolPlan>,
    pub infeasible: Option<String>,
}

/// One row per `(protocol, ell)`, protocols in the given order, then by `ell`.
pub fn sweep(kinds: &[ProtocolKind], ch: ChannelParams, req: &Requirements, ells: &[u64]) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &kind in kinds {
        let asymptote = asymptotic_rate(kind, ch)?;
        for &ell in ells {
            let r = req.with_ell(ell);
            rows.push(match plan(kind, ch, &r) {
                Ok(p) => SweepRow {
                    protocol: kind,
                    ell,
                    c_opt: p.c,
                    key_rate: p.key_rate,
                    asymptote,
                    plan: Some(p),
                    infeasible: None,
                },
                Err(Error::Infeasible(m)) => SweepRow {
                    protocol: kind,
                    ell,
                    c_opt: None,
                    key_rate: 0.0,
                    asymptote,
                    plan: None,
                    infeasible: Some(m),
                },
                Err(e) => return Err(e),
            });
        }
    }
    Ok(rows)
}

/// Ceiling every finite-length rate must stay under.
pub fn capacity_ceiling(ch: ChannelParams) -> Result<f64> {
    secret_key_capacity(ch)
}
