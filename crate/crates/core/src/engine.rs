//! Alice, Bob and Eve over simulated binary symmetric channels.
//!
//! A [`SimLayout`] turns a [`ProtocolPlan`] into runnable components:
//! reconciliation is split into blocks of at most 16 information bits
//! (block length at most 26) with the error budget shared between blocks, the
//! authenticated message is sized from those blocks, and the authentication
//! code or tag is chosen for that message. Everything is sampled from
//! seeded ChaCha streams, so a trial is a pure function of its seed.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::authcode::{make_authenticator, pd_bound, pf_bound, verify_authenticator, AcSpec, AuthCode, Authenticator};
use crate::bits::BitString;
use crate::codes::{decode_by_weight, gallager_exponent, min_check_symbols, LinearCode};
use crate::entropy::ChannelParams;
use crate::error::{check_len, Error, Result};
use crate::extractor::{extract, ExtractorSpec, WeakDesign};
use crate::field::MAX_WIDTH;
use crate::hashfam::{asu2_hash, pad_message, u2_hash, AsuParams, FieldElement};
use crate::leakage::required_eps_log2;
use crate::planner::{choose_asu, solve_ac, ProtocolKind, ProtocolPlan, Requirements};
use crate::tail;

/// Information bits per reconciliation block.
pub const MAX_BLOCK_K: usize = 16;
/// Block length `k + r`.
pub const MAX_BLOCK_N: usize = 26;
/// Largest message whose AC distance is checked exhaustively.
pub const EXACT_DISTANCE_K0: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    A,
    B,
    E,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::A => "A",
            Role::B => "B",
            Role::E => "E",
        })
    }
}

impl FromStr for Role {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" => Ok(Role::A),
            "B" => Ok(Role::B),
            "E" => Ok(Role::E),
            _ => Err(Error::Parameter(format!("unknown role {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawStrings {
    pub x: BitString,
    pub y: BitString,
    pub z: BitString,
}

fn bsc<R: Rng>(rng: &mut R, s: &BitString, p: f64) -> BitString {
    let mut out = s.clone();
    if p > 0.0 {
        for i in 0..s.len() {
            if rng.gen::<f64>() < p {
                out.flip(i);
            }
        }
    }
    out
}

fn check_prob(p: f64, name: &str) -> Result<()> {
    if (0.0..=0.5).contains(&p) {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} = {p} outside [0, 1/2]")))
    }
}

fn initialize<R: Rng>(rng: &mut R, pi_a: f64, pi_b: f64, pi_e: f64, k: usize) -> Result<RawStrings> {
    check_prob(pi_a, "pi_A")?;
    check_prob(pi_b, "pi_B")?;
    check_prob(pi_e, "pi_E")?;
    let s = BitString::random(rng, k);
    Ok(RawStrings {
        x: bsc(rng, &s, pi_a),
        y: bsc(rng, &s, pi_b),
        z: bsc(rng, &s, pi_e),
    })
}

/// A uniform string `S` of `k` bits received by A, B and E through
/// independent binary symmetric channels.
pub fn run_initialization(seed: u64, pi_a: f64, pi_b: f64, pi_e: f64, k: usize) -> Result<RawStrings> {
    initialize(&mut ChaCha8Rng::seed_from_u64(seed), pi_a, pi_b, pi_e, k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PayloadKind {
    /// Check symbols, plus the hash key or seed when it is sent openly.
    Message,
    Authenticator,
    Tag,
}

impl PayloadKind {
    fn code(self) -> &'static str {
        match self {
            PayloadKind::Message => "message",
            PayloadKind::Authenticator => "authenticator",
            PayloadKind::Tag => "tag",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PdcMessage {
    pub step: u32,
    pub origin: Role,
    pub kind: PayloadKind,
    pub bits: BitString,
    /// AC positions; empty otherwise.
    pub positions: Vec<u32>,
    /// Bookkeeping only; never read by the parties.
    pub tampered: bool,
}

impl PdcMessage {
    /// One tab-separated line: step, origin, kind, bits, positions, tampered.
    pub fn encode(&self) -> String {
        let bits = if self.bits.is_empty() { "-".to_string() } else { self.bits.to_string() };
        let pos = if self.positions.is_empty() {
            "-".to_string()
        } else {
            self.positions.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
        };
        format!("{}\t{}\t{}\t{}\t{}\t{}", self.step, self.origin, self.kind.code(), bits, pos, u8::from(self.tampered))
    }

    pub fn decode(line: &str) -> Result<Self> {
        let bad = || Error::Parameter(format!("malformed message line {line:?}"));
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 6 {
            return Err(bad());
        }
        let kind = match f[2] {
            "message" => PayloadKind::Message,
            "authenticator" => PayloadKind::Authenticator,
            "tag" => PayloadKind::Tag,
            _ => return Err(bad()),
        };
        let bits = if f[3] == "-" {
            BitString::zeros(0)
        } else if f[3].bytes().all(|b| b == b'0' || b == b'1') {
            BitString::from_binary_str(f[3])
        } else {
            return Err(bad());
        };
        let positions = if f[4] == "-" {
            Vec::new()
        } else {
            f[4].split(',').map(|p| p.parse().map_err(|_| bad())).collect::<Result<_>>()?
        };
        Ok(PdcMessage {
            step: f[0].parse().map_err(|_| bad())?,
            origin: f[1].parse()?,
            kind,
            bits,
            positions,
            tampered: match f[5] {
                "0" => false,
                "1" => true,
                _ => return Err(bad()),
            },
        })
    }

    /// Payload bytes as shown in transcripts.
    pub fn payload_hex(&self) -> String {
        let mut all = self.bits.clone();
        for &p in &self.positions {
            all.append(&BitString::from_u64(p as u64, 32));
        }
        if all.is_empty() {
            "-".into()
        } else {
            all.to_hex()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdversaryMode {
    Passive,
    /// Replace the whole exchange with one built from E's own string.
    Impersonate,
    /// Replace the message with a different random one of the same length.
    SubstituteRandom,
    /// Replace the message with the one whose AC codeword is closest
    /// (a one-bit change for keyed tags).
    SubstituteNearestCodeword,
    /// Drop everything.
    BreakOff,
}

impl AdversaryMode {
    pub const ALL: [AdversaryMode; 5] = [
        AdversaryMode::Passive,
        AdversaryMode::Impersonate,
        AdversaryMode::SubstituteRandom,
        AdversaryMode::SubstituteNearestCodeword,
        AdversaryMode::BreakOff,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AdversaryMode::Passive => "passive",
            AdversaryMode::Impersonate => "impersonate",
            AdversaryMode::SubstituteRandom => "substitute-random",
            AdversaryMode::SubstituteNearestCodeword => "substitute-nearest-codeword",
            AdversaryMode::BreakOff => "break-off",
        }
    }
}

impl FromStr for AdversaryMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        AdversaryMode::ALL
            .into_iter()
            .find(|m| m.name() == s.trim().replace('_', "-"))
            .ok_or_else(|| Error::Parameter(format!("unknown adversary policy {s:?}")))
    }
}

impl fmt::Display for AdversaryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversaryPolicy {
    pub mode: AdversaryMode,
}

impl AdversaryPolicy {
    pub fn new(mode: AdversaryMode) -> Self {
        AdversaryPolicy { mode }
    }

    pub fn passive() -> Self {
        AdversaryPolicy::new(AdversaryMode::Passive)
    }
}

/// Block partition of one reconciled part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reconciler {
    pub k: usize,
    /// `(k_b, r_b)` per block, in string order.
    pub blocks: Vec<(usize, usize)>,
    /// Sum of the blocks' random-coding bounds.
    pub pe_bound: f64,
}

impl Reconciler {
    pub fn new(k: usize, ch: ChannelParams, p_e: f64) -> Result<Self> {
        if k == 0 {
            return Ok(Reconciler {
                k,
                blocks: Vec::new(),
                pe_bound: 0.0,
            });
        }
        let mut nb = k.div_ceil(MAX_BLOCK_K);
        while nb <= k {
            if let Some(r) = Self::try_blocks(k, nb, ch, p_e) {
                return Ok(r);
            }
            nb += 1;
        }
        Err(Error::Infeasible(format!(
            "{k} bits cannot be reconciled in blocks of length {MAX_BLOCK_N} at P_e = {p_e}"
        )))
    }

    fn try_blocks(k: usize, nb: usize, ch: ChannelParams, p_e: f64) -> Option<Self> {
        let mut blocks = Vec::with_capacity(nb);
        let mut pe_bound = 0.0;
        for b in 0..nb {
            let kb = k / nb + usize::from(b < k % nb);
            let rb = if ch.p_m == 0.0 {
                0
            } else {
                min_check_symbols(kb as u64, ch.p_m, p_e / nb as f64).ok()? as usize
            };
            if kb + rb > MAX_BLOCK_N {
                return None;
            }
            if rb > 0 {
                let e = gallager_exponent(kb as f64 / (kb + rb) as f64, ch.p_m).ok()?;
                pe_bound += 2f64.powf(-(kb as f64) * e);
            }
            blocks.push((kb, rb));
        }
        Some(Reconciler { k, blocks, pe_bound })
    }

    pub fn check_len(&self) -> usize {
        self.blocks.iter().map(|b| b.1).sum()
    }

    fn sample_codes<R: Rng>(&self, rng: &mut R) -> Vec<LinearCode> {
        self.blocks.iter().map(|&(k, r)| LinearCode::random(k, r, rng)).collect()
    }

    fn checks(&self, codes: &[LinearCode], x: &BitString) -> Result<BitString> {
        let mut out = BitString::zeros(0);
        let mut off = 0;
        for (code, &(k, _)) in codes.iter().zip(&self.blocks) {
            out.append(&code.encode_checks(&x.slice(off, k))?);
            off += k;
        }
        Ok(out)
    }

    fn decode(&self, codes: &[LinearCode], y: &BitString, checks: &BitString) -> Result<BitString> {
        let mut out = BitString::zeros(0);
        let (mut off, mut coff) = (0, 0);
        for (code, &(k, r)) in codes.iter().zip(&self.blocks) {
            out.append(&decode_by_weight(code, &y.slice(off, k), &checks.slice(coff, r))?);
            off += k;
            coff += r;
        }
        Ok(out)
    }
}

/// How a stage's message is authenticated.
#[derive(Debug, Clone)]
pub enum AuthLayout {
    /// Nothing is sent, so nothing needs authenticating.
    None,
    Ac {
        code: AuthCode,
        /// The base code's distance was checked exhaustively; otherwise it is
        /// the lightest weight among low-weight messages.
        distance_verified: bool,
    },
    Asu(AsuParams),
}

#[derive(Debug, Clone)]
pub enum Amplifier {
    Hash,
    Extract { spec: ExtractorSpec, design: WeakDesign },
}

/// One single-stage protocol made concrete.
#[derive(Debug, Clone)]
pub struct StageLayout {
    pub protocol: ProtocolKind,
    pub ell: usize,
    pub k1: usize,
    pub rec1: Reconciler,
    /// The AC part of the strings; 0 for keyed stages.
    pub k2: usize,
    /// Second reconciled part (hash key or seed of beta-type stages).
    pub k3: usize,
    pub rec3: Reconciler,
    /// Hash key or seed sent in the clear (alpha-type stages).
    pub sent_material: usize,
    pub auth: AuthLayout,
    pub amplifier: Amplifier,
}

impl StageLayout {
    pub fn message_len(&self) -> usize {
        self.rec1.check_len() + self.sent_material + self.rec3.check_len()
    }

    /// Raw-string parts in protocol order.
    pub fn parts(&self) -> Vec<usize> {
        let mut p = vec![self.k1];
        if self.k2 > 0 {
            p.push(self.k2);
        }
        if self.k3 > 0 {
            p.push(self.k3);
        }
        p
    }

    /// Key length this stage needs beforehand.
    pub fn preshared_len(&self) -> usize {
        match self.auth {
            AuthLayout::Asu(p) => p.key_bits() as usize,
            _ => 0,
        }
    }

    fn bounds(&self, ch: ChannelParams) -> (f64, f64, f64) {
        let pe = self.rec1.pe_bound + self.rec3.pe_bound;
        match &self.auth {
            AuthLayout::None => (pe, 0.0, 0.0),
            AuthLayout::Ac { code, .. } => (pe, pf_bound(&code.spec(), ch.p_m), pd_bound(&code.spec(), ch.p_m, ch.p_w)),
            AuthLayout::Asu(p) => (pe, 0.0, p.epsilon()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimLayout {
    pub protocol: ProtocolKind,
    pub ch: ChannelParams,
    /// Key-generation stage first for hybrids.
    pub stages: Vec<StageLayout>,
    pub total_k: usize,
    /// Length of the key A and B must share beforehand (primed protocols).
    pub preshared: usize,
}

/// Analytic bounds of a layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayoutBounds {
    pub pe: f64,
    pub pf: f64,
    pub pd: f64,
}

impl SimLayout {
    /// Concrete components for `plan`. `seed` fixes the authentication code.
    pub fn from_plan(plan: &ProtocolPlan, ch: ChannelParams, req: &Requirements, seed: u64) -> Result<Self> {
        let stages = if let (Some((_, second)), [only]) = (plan.protocol.stages(), plan.stages.as_slice()) {
            vec![stage_layout(second, only, ch, &req.stage_share(), None, seed ^ 0x2)?]
        } else if let Some((first, second)) = plan.protocol.stages() {
            let share = req.stage_share();
            let s2 = stage_layout(second, &plan.stages[1], ch, &share, None, seed ^ 0x2)?;
            let key = s2.preshared_len();
            let s1 = stage_layout(first, &plan.stages[0], ch, &share.with_ell(key as u64), Some(key), seed ^ 0x1)?;
            vec![s1, s2]
        } else {
            vec![stage_layout(plan.protocol, plan, ch, req, None, seed)?]
        };
        let total_k = stages.iter().flat_map(|s| s.parts()).sum();
        let preshared = if plan.protocol.is_hybrid() { 0 } else { stages[0].preshared_len() };
        Ok(SimLayout {
            protocol: plan.protocol,
            ch,
            stages,
            total_k,
            preshared,
        })
    }

    /// Union of the stages' bounds.
    pub fn bounds(&self) -> LayoutBounds {
        let mut b = LayoutBounds {
            pe: 0.0,
            pf: 0.0,
            pd: 0.0,
        };
        for s in &self.stages {
            let (pe, pf, pd) = s.bounds(self.ch);
            b.pe += pe;
            b.pf += pf;
            b.pd += pd;
        }
        b
    }

    pub fn distance_verified(&self) -> bool {
        self.stages.iter().all(|s| !matches!(s.auth, AuthLayout::Ac { distance_verified: false, .. }))
    }

    pub fn key_len(&self) -> usize {
        self.stages.last().map(|s| s.ell).unwrap_or(0)
    }
}

fn stage_layout(
    kind: ProtocolKind,
    plan: &ProtocolPlan,
    ch: ChannelParams,
    req: &Requirements,
    ell_override: Option<usize>,
    seed: u64,
) -> Result<StageLayout> {
    if plan.protocol != kind {
        return Err(Error::Parameter(format!("plan is for {}, not {kind}", plan.protocol)));
    }
    let ell = ell_override.unwrap_or(plan.ell as usize);
    let k1 = plan.k(1) as usize;
    let rec1 = Reconciler::new(k1, ch, req.p_e_adm)?;
    let amplifier = if kind.is_ext() {
        let c = plan.c.ok_or_else(|| Error::Parameter("extraction plan without c".into()))?;
        let spec = ExtractorSpec::from_log2_eps(k1 as u64, ell as u64, required_eps_log2(req.i_adm, ell as u64), c)?;
        let design = spec.design()?;
        Amplifier::Extract { spec, design }
    } else {
        if k1 > MAX_WIDTH as usize || ell > k1 {
            return Err(Error::Parameter(format!("hash over GF(2^{k1}) to {ell} bits is not supported")));
        }
        Amplifier::Hash
    };
    let material = match &amplifier {
        Amplifier::Hash => k1,
        Amplifier::Extract { spec, .. } => spec.u as usize,
    };
    let (k3, sent_material) = if kind.is_beta_family() { (material, 0) } else { (0, material) };
    let rec3 = Reconciler::new(k3, ch, req.p_e_adm)?;
    let m = rec1.check_len() + sent_material + rec3.check_len();
    let auth = if m == 0 {
        AuthLayout::None
    } else if kind.is_primed() {
        let a = choose_asu(m as u64, req.p_d_adm.log2())?;
        AuthLayout::Asu(AsuParams::new(a.b as u32, a.i)?)
    } else {
        desk_ac(m, ch, req.p_f_adm, req.p_d_adm, seed)?
    };
    let k2 = match &auth {
        AuthLayout::Ac { code, .. } => code.spec().n_a() as usize,
        _ => 0,
    };
    Ok(StageLayout {
        protocol: kind,
        ell,
        k1,
        rec1,
        k2,
        k3,
        rec3,
        sent_material,
        auth,
        amplifier,
    })
}

/// Lightest codeword among information words of weight at most 2.
fn low_weight_distance(code: &LinearCode) -> (usize, u128) {
    let k = code.k();
    let mut best = (usize::MAX, 0u128);
    for i in 0..k {
        let e = 1u128 << i;
        let w = 1 + code.checks_of(e).count_ones() as usize;
        if w < best.0 {
            best = (w, e);
        }
        for j in i + 1..k {
            let e = e | 1 << j;
            let w = 2 + code.checks_of(e).count_ones() as usize;
            if w < best.0 {
                best = (w, e);
            }
        }
    }
    best
}

/// An AC for `m`-bit messages meeting the bounds with a sampled base code.
fn desk_ac(m: usize, ch: ChannelParams, p_f: f64, p_d: f64, seed: u64) -> Result<AuthLayout> {
    const ATTEMPTS: u64 = 24;
    let start = solve_ac(m as u64, ch, p_f, p_d)?.n0 as usize;
    let exact = m <= EXACT_DISTANCE_K0;
    for n0 in start..start + 96 {
        if n0 - m > 128 {
            break;
        }
        let dw = tail::upper_quantile(n0 as u64, ch.p_m, p_f);
        if dw >= n0 as u64 {
            continue;
        }
        let mut best: Option<(usize, u128, LinearCode)> = None;
        for attempt in 0..ATTEMPTS {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((n0 as u64) << 32) ^ attempt);
            let code = LinearCode::random(m, n0 - m, &mut rng);
            let (d, light) = if exact { code.min_distance() } else { low_weight_distance(&code) };
            if best.as_ref().is_none_or(|b| d > b.0) {
                best = Some((d, light, code));
            }
        }
        let (d, light, code) = best.expect("attempts");
        let spec = AcSpec::new(n0 as u64, m as u64, d as u64, dw)?;
        if pd_bound(&spec, ch.p_m, ch.p_w) <= p_d && pf_bound(&spec, ch.p_m) <= p_f {
            return Ok(AuthLayout::Ac {
                code: AuthCode::from_parts(code, d as u64, light, dw)?,
                distance_verified: exact,
            });
        }
    }
    Err(Error::Infeasible(format!(
        "no desk-scale authentication code for {m}-bit messages (check length at most 128)"
    )))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Keys { k_a: BitString, k_b: BitString },
    Rejected,
    /// B accepted a message E had changed.
    Deceived { k_a: BitString, k_b: BitString },
}

impl Outcome {
    pub fn accepted(&self) -> bool {
        !matches!(self, Outcome::Rejected)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub message: PdcMessage,
    /// B's verdict on the stage this message belongs to.
    pub accepted: bool,
    /// The message never arrived.
    pub dropped: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trial {
    pub outcome: Outcome,
    pub transcript: Vec<TranscriptRecord>,
    /// Seeds or hash keys the amplifiers consumed, per stage, on A's side.
    pub material_a: Vec<BitString>,
}

impl Trial {
    /// `step \t direction \t payload-hex \t tampered \t accepted` per record.
    pub fn transcript_text(&self) -> String {
        let mut s = String::new();
        for r in &self.transcript {
            let dir = if r.dropped { "A->E" } else { "A->B" };
            s.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                r.message.step,
                dir,
                r.message.payload_hex(),
                u8::from(r.message.tampered),
                u8::from(r.accepted)
            ));
        }
        s
    }
}

struct Parts {
    x: Vec<BitString>,
    y: Vec<BitString>,
    z: Vec<BitString>,
}

fn split(raw: &RawStrings, offset: usize, parts: &[usize]) -> Parts {
    let cut = |s: &BitString| {
        let mut off = offset;
        parts
            .iter()
            .map(|&len| {
                let p = s.slice(off, len);
                off += len;
                p
            })
            .collect::<Vec<_>>()
    };
    Parts {
        x: cut(&raw.x),
        y: cut(&raw.y),
        z: cut(&raw.z),
    }
}

struct StageResult {
    k_a: BitString,
    k_b: BitString,
    accepted: bool,
    tampered: bool,
    material_a: BitString,
}

fn amplify(stage: &StageLayout, x1: &BitString, material: &BitString) -> Result<BitString> {
    match &stage.amplifier {
        Amplifier::Hash => {
            let s = FieldElement::from_bits(stage.k1 as u32, material)?;
            u2_hash(&s, x1, stage.ell)
        }
        Amplifier::Extract { spec, design } => extract(spec, design, x1, material),
    }
}

/// Message layout: checks of part 1, sent material, checks of part 3.
fn compose(stage: &StageLayout, c1: &BitString, material: Option<&BitString>, c3: &BitString) -> BitString {
    let mut m = c1.clone();
    if stage.sent_material > 0 {
        m.append(material.expect("sent material"));
    }
    m.append(c3);
    m
}

fn parse(stage: &StageLayout, m: &BitString) -> (BitString, BitString, BitString) {
    let r1 = stage.rec1.check_len();
    let c1 = m.slice(0, r1);
    let mat = m.slice(r1, stage.sent_material);
    let c3 = m.slice(r1 + stage.sent_material, stage.rec3.check_len());
    (c1, mat, c3)
}

#[allow(clippy::too_many_arguments)]
fn run_stage<R: Rng>(
    stage: &StageLayout,
    p: &Parts,
    keys: Option<(&BitString, &BitString)>,
    policy: AdversaryPolicy,
    rng: &mut R,
    step0: u32,
    transcript: &mut Vec<TranscriptRecord>,
) -> Result<StageResult> {
    let (x1, y1, z1) = (&p.x[0], &p.y[0], &p.z[0]);
    let idx3 = if stage.k2 > 0 { 2 } else { 1 };
    let codes1 = stage.rec1.sample_codes(rng);
    let codes3 = stage.rec3.sample_codes(rng);

    // A
    let c1 = stage.rec1.checks(&codes1, x1)?;
    let (material_a, c3) = if stage.k3 > 0 {
        let x3 = &p.x[idx3];
        (x3.clone(), stage.rec3.checks(&codes3, x3)?)
    } else {
        (BitString::random(rng, stage.sent_material), BitString::zeros(0))
    };
    let message = compose(stage, &c1, Some(&material_a), &c3);
    let k_a = amplify(stage, x1, &material_a)?;

    let m = message.len();
    let mut auth_msg = match &stage.auth {
        AuthLayout::None => None,
        AuthLayout::Ac { code, .. } => {
            let a = make_authenticator(code, &message, &p.x[1])?;
            Some(PdcMessage {
                step: step0 + 2,
                origin: Role::A,
                kind: PayloadKind::Authenticator,
                bits: a.bits,
                positions: a.positions.iter().map(|&q| q as u32).collect(),
                tampered: false,
            })
        }
        AuthLayout::Asu(params) => {
            let key = keys.expect("pre-shared key").0;
            let tag = asu2_hash(*params, key, &pad_message(*params, &message)?)?;
            Some(PdcMessage {
                step: step0 + 2,
                origin: Role::A,
                kind: PayloadKind::Tag,
                bits: tag,
                positions: Vec::new(),
                tampered: false,
            })
        }
    };
    let mut msg = (m > 0).then(|| PdcMessage {
        step: step0 + 1,
        origin: Role::A,
        kind: PayloadKind::Message,
        bits: message.clone(),
        positions: Vec::new(),
        tampered: false,
    });

    // E
    let mut dropped = false;
    if m > 0 {
        match policy.mode {
            AdversaryMode::Passive => {}
            AdversaryMode::BreakOff => dropped = true,
            AdversaryMode::Impersonate => {
                let e1 = stage.rec1.checks(&codes1, z1)?;
                let (e_mat, e3) = if stage.k3 > 0 {
                    (p.z[idx3].clone(), stage.rec3.checks(&codes3, &p.z[idx3])?)
                } else {
                    (BitString::random(rng, stage.sent_material), BitString::zeros(0))
                };
                let forged = compose(stage, &e1, Some(&e_mat), &e3);
                let forged_auth = match &stage.auth {
                    AuthLayout::Ac { code, .. } => {
                        let a = make_authenticator(code, &forged, &p.z[1])?;
                        (a.bits, a.positions.iter().map(|&q| q as u32).collect())
                    }
                    AuthLayout::Asu(params) => (BitString::random(rng, params.b as usize), Vec::new()),
                    AuthLayout::None => unreachable!(),
                };
                replace(&mut msg, &mut auth_msg, forged, forged_auth);
            }
            AdversaryMode::SubstituteRandom | AdversaryMode::SubstituteNearestCodeword => {
                let forged = match (&stage.auth, policy.mode) {
                    (AuthLayout::Ac { code, .. }, AdversaryMode::SubstituteNearestCodeword) => code.nearest_other_message(&message),
                    (_, AdversaryMode::SubstituteNearestCodeword) => {
                        let mut f = message.clone();
                        f.flip(m - 1);
                        f
                    }
                    _ => loop {
                        let f = BitString::random(rng, m);
                        if f != message {
                            break f;
                        }
                    },
                };
                let forged_auth = match &stage.auth {
                    AuthLayout::Ac { code, .. } => {
                        let orig = auth_msg.as_ref().expect("authenticator");
                        let positions = code.positions(&forged)?;
                        let bits: Vec<bool> = positions
                            .iter()
                            .map(|&q| match orig.positions.iter().position(|&o| o as usize == q) {
                                Some(i) => orig.bits.get(i),
                                None => p.z[1].get(q),
                            })
                            .collect();
                        (BitString::from_bits(&bits), positions.iter().map(|&q| q as u32).collect())
                    }
                    AuthLayout::Asu(_) => (auth_msg.as_ref().expect("tag").bits.clone(), Vec::new()),
                    AuthLayout::None => unreachable!(),
                };
                replace(&mut msg, &mut auth_msg, forged, forged_auth);
            }
        }
    }

    // B
    let received = if dropped { None } else { msg.as_ref().map(|mm| mm.bits.clone()) };
    let tampered = received.as_ref().is_some_and(|r| *r != message);
    let verdict = match (&stage.auth, &received, &auth_msg) {
        (AuthLayout::None, _, _) => true,
        (_, None, _) | (_, _, None) => false,
        (AuthLayout::Ac { code, .. }, Some(r), Some(a)) => {
            let auth = Authenticator {
                positions: a.positions.iter().map(|&q| q as usize).collect(),
                bits: a.bits.clone(),
            };
            verify_authenticator(code, r, &auth, &p.y[1])?
        }
        (AuthLayout::Asu(params), Some(r), Some(a)) => {
            let key = keys.expect("pre-shared key").1;
            a.bits.len() == params.b as usize && asu2_hash(*params, key, &pad_message(*params, r)?)? == a.bits
        }
    };
    for pm in msg.iter().chain(auth_msg.iter()) {
        transcript.push(TranscriptRecord {
            message: pm.clone(),
            accepted: verdict,
            dropped,
        });
    }
    let k_b = if verdict {
        let r = received.unwrap_or_else(|| BitString::zeros(0));
        let (c1b, matb, c3b) = parse(stage, &r);
        let x1b = stage.rec1.decode(&codes1, y1, &c1b)?;
        let material_b = if stage.k3 > 0 { stage.rec3.decode(&codes3, &p.y[idx3], &c3b)? } else { matb };
        amplify(stage, &x1b, &material_b)?
    } else {
        BitString::zeros(0)
    };
    Ok(StageResult {
        k_a,
        k_b,
        accepted: verdict,
        tampered: verdict && tampered,
        material_a,
    })
}

fn replace(msg: &mut Option<PdcMessage>, auth: &mut Option<PdcMessage>, forged: BitString, forged_auth: (BitString, Vec<u32>)) {
    if let Some(mm) = msg.as_mut() {
        mm.tampered = mm.bits != forged;
        mm.origin = Role::E;
        mm.bits = forged;
    }
    if let Some(a) = auth.as_mut() {
        a.tampered = a.bits != forged_auth.0 || a.positions != forged_auth.1;
        a.origin = Role::E;
        a.bits = forged_auth.0;
        a.positions = forged_auth.1;
    }
}

/// Runs the layout's protocol on `raw`. `preshared` is the key of primed
/// protocols as held by A and B.
pub fn run_protocol<R: Rng>(
    layout: &SimLayout,
    raw: &RawStrings,
    preshared: Option<(&BitString, &BitString)>,
    policy: AdversaryPolicy,
    rng: &mut R,
) -> Result<Trial> {
    check_len(layout.total_k, raw.x.len())?;
    check_len(layout.total_k, raw.y.len())?;
    check_len(layout.total_k, raw.z.len())?;
    if layout.preshared > 0 {
        let (a, b) = preshared.ok_or_else(|| Error::Parameter(format!("{} needs a pre-shared key", layout.protocol)))?;
        check_len(layout.preshared, a.len())?;
        check_len(layout.preshared, b.len())?;
    }
    let mut transcript = Vec::new();
    let mut offset = 0;
    let mut keys: Option<(BitString, BitString)> = preshared.map(|(a, b)| (a.clone(), b.clone()));
    let mut tampered = false;
    let mut material_a = Vec::new();
    let mut last = None;
    for (si, stage) in layout.stages.iter().enumerate() {
        let parts = stage.parts();
        let p = split(raw, offset, &parts);
        offset += parts.iter().sum::<usize>();
        let kr = keys.as_ref().map(|(a, b)| (a, b));
        let res = run_stage(stage, &p, kr, policy, rng, 10 * si as u32, &mut transcript)?;
        material_a.push(res.material_a.clone());
        if !res.accepted {
            return Ok(Trial {
                outcome: Outcome::Rejected,
                transcript,
                material_a,
            });
        }
        tampered |= res.tampered;
        keys = Some((res.k_a.clone(), res.k_b.clone()));
        last = Some(res);
    }
    let res = last.expect("at least one stage");
    let outcome = if tampered {
        Outcome::Deceived {
            k_a: res.k_a,
            k_b: res.k_b,
        }
    } else {
        Outcome::Keys {
            k_a: res.k_a,
            k_b: res.k_b,
        }
    };
    Ok(Trial {
        outcome,
        transcript,
        material_a,
    })
}

/// Stream `trial + 1` of the master seed.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial + 1);
    rng
}

/// One trial: fresh strings, pre-shared key and codes from the trial stream.
pub fn run_trial(layout: &SimLayout, policy: AdversaryPolicy, seed: u64, trial: u64) -> Result<Trial> {
    let mut rng = trial_rng(seed, trial);
    let raw = initialize(&mut rng, 0.0, layout.ch.p_m, layout.ch.p_w, layout.total_k)?;
    let key = BitString::random(&mut rng, layout.preshared);
    let pre = (layout.preshared > 0).then_some((&key, &key));
    run_protocol(layout, &raw, pre, policy, &mut rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub count: u64,
    pub trials: u64,
    pub rate: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Estimate {
    pub fn half_width(&self) -> f64 {
        (self.hi - self.lo) / 2.0
    }

    /// `rate <= bound + 3 half-widths`; the upper end of the claim a test checks.
    pub fn within(&self, bound: f64) -> bool {
        self.rate <= bound + 3.0 * self.half_width()
    }
}

/// Wilson score interval at `z = 1.96`.
pub fn wilson(count: u64, trials: u64) -> Estimate {
    let z = 1.96f64;
    if trials == 0 {
        return Estimate {
            count,
            trials,
            rate: 0.0,
            lo: 0.0,
            hi: 1.0,
        };
    }
    let n = trials as f64;
    let p = count as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    Estimate {
        count,
        trials,
        rate: p,
        lo: (centre - half).max(0.0),
        hi: (centre + half).min(1.0),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub protocol: ProtocolKind,
    pub policy: AdversaryMode,
    pub trials: u64,
    /// Accepted with differing keys and no tampering.
    pub p_e: Estimate,
    /// Rejected.
    pub p_f: Estimate,
    /// Accepted after tampering.
    pub p_d: Estimate,
    pub acceptance: Estimate,
    pub bounds: LayoutBounds,
    pub distance_verified: bool,
}

pub fn measure(layout: &SimLayout, policy: AdversaryPolicy, trials: u64, seed: u64) -> Result<Measurement> {
    let (mut err, mut rej, mut dec, mut acc) = (0u64, 0u64, 0u64, 0u64);
    for t in 0..trials {
        match run_trial(layout, policy, seed, t)?.outcome {
            Outcome::Keys { k_a, k_b } => {
                acc += 1;
                err += u64::from(k_a != k_b);
            }
            Outcome::Deceived { .. } => {
                acc += 1;
                dec += 1;
            }
            Outcome::Rejected => rej += 1,
        }
    }
    Ok(Measurement {
        protocol: layout.protocol,
        policy: policy.mode,
        trials,
        p_e: wilson(err, trials),
        p_f: wilson(rej, trials),
        p_d: wilson(dec, trials),
        acceptance: wilson(acc, trials),
        bounds: layout.bounds(),
        distance_verified: layout.distance_verified(),
    })
}

/// Plan-level entry: builds the layout, then measures.
pub fn measure_plan(plan: &ProtocolPlan, ch: ChannelParams, req: &Requirements, policy: AdversaryPolicy, trials: u64, seed: u64) -> Result<Measurement> {
    let layout = SimLayout::from_plan(plan, ch, req, seed)?;
    measure(&layout, policy, trials, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcMeasurement {
    pub spec: AcSpec,
    pub p_f: Estimate,
    pub p_d: Estimate,
    pub pf_bound: f64,
    pub pd_bound: f64,
}

/// The AC alone: random messages and strings, honest runs for `P_f` and the
/// nearest-codeword substitution for `P_d`.
pub fn measure_ac(ac: &AuthCode, ch: ChannelParams, trials: u64, seed: u64) -> Result<AcMeasurement> {
    let spec = ac.spec();
    let n = spec.n_a() as usize;
    let (mut rej, mut dec) = (0u64, 0u64);
    for t in 0..trials {
        let mut rng = trial_rng(seed, t);
        let raw = initialize(&mut rng, 0.0, ch.p_m, ch.p_w, n)?;
        let m = BitString::random(&mut rng, spec.k0 as usize);
        let a = make_authenticator(ac, &m, &raw.x)?;
        if !verify_authenticator(ac, &m, &a, &raw.y)? {
            rej += 1;
        }
        let forged = ac.nearest_other_message(&m);
        let positions = ac.positions(&forged)?;
        let bits: Vec<bool> = positions
            .iter()
            .map(|&q| match a.positions.binary_search(&q) {
                Ok(i) => a.bits.get(i),
                Err(_) => raw.z.get(q),
            })
            .collect();
        let fa = Authenticator {
            positions,
            bits: BitString::from_bits(&bits),
        };
        if verify_authenticator(ac, &forged, &fa, &raw.y)? {
            dec += 1;
        }
    }
    Ok(AcMeasurement {
        spec,
        p_f: wilson(rej, trials),
        p_d: wilson(dec, trials),
        pf_bound: pf_bound(&spec, ch.p_m),
        pd_bound: pd_bound(&spec, ch.p_m, ch.p_w),
    })
}

/// Toy instance for exhaustive leakage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToyAudit {
    pub protocol: ProtocolKind,
    pub k: u64,
    pub ell: u64,
    /// Extractor design target.
    pub eps: f64,
    pub c: f64,
    pub p_w: f64,
    /// Public check symbols on `X1` (a fixed random code).
    pub checks: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub protocol: ProtocolKind,
    pub k: u64,
    pub ell: u64,
    pub u: u64,
    pub support_bits: usize,
    pub p_w: f64,
    pub checks: usize,
    /// `I(K; Eve's view)` in bits.
    pub leakage: f64,
    /// With the seed handed to Eve; equals `leakage` when it is public anyway.
    pub leakage_seed_known: f64,
    /// `sum_view P(view) dif(K | view)` with the view `(seed, Z1, checks)`.
    pub eps_measured: f64,
    pub bound: f64,
    pub within: bool,
    /// The bound is at least `ell`.
    pub vacuous: bool,
}

fn entropy(d: &[f64]) -> f64 {
    let total: f64 = d.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    d.iter().filter(|&&p| p > 0.0).map(|&p| -(p / total) * (p / total).log2()).sum()
}

fn dif(d: &[f64]) -> f64 {
    let total: f64 = d.iter().sum();
    let u = 1.0 / d.len() as f64;
    d.iter().map(|&p| (p / total - u).abs()).sum::<f64>() / 2.0
}

/// Exact Shannon leakage of a toy extraction protocol by enumerating the
/// joint distribution of `X1`, `Z1`, the seed support and the checks.
/// The alpha variant sends the seed; the beta variant takes it from `X3`,
/// shared without error, with Eve holding a `p_w`-noisy copy.
pub fn toy_leakage_audit(audit: &ToyAudit) -> Result<AuditReport> {
    if !matches!(audit.protocol, ProtocolKind::AlphaExt | ProtocolKind::BetaExt) {
        return Err(Error::Parameter("the audit covers alpha_ext and beta_ext".into()));
    }
    if audit.k == 0 || audit.k > 10 || audit.ell == 0 || audit.ell > 2 {
        return Err(Error::Parameter("toy audit needs k <= 10 and ell <= 2".into()));
    }
    check_prob(audit.p_w, "p_w")?;
    let spec = ExtractorSpec::new(audit.k, audit.ell, audit.eps, audit.c)?;
    let design = spec.design()?;
    let support = design.support();
    let s = support.len();
    let k = audit.k as usize;
    let beta = audit.protocol == ProtocolKind::BetaExt;
    let cost = (2 * k + s + if beta { s } else { 0 }) as u32;
    if cost > 34 {
        return Err(Error::Parameter(format!("toy audit too large (2^{cost} terms)")));
    }
    if audit.checks > k {
        return Err(Error::Parameter("more checks than bits".into()));
    }
    let code = LinearCode::random(k, audit.checks, &mut ChaCha8Rng::seed_from_u64(audit.seed));
    let nk = 1usize << audit.ell;
    let nx = 1usize << k;
    let nt = 1usize << audit.checks;
    let ng = 1usize << s;
    let syms: Vec<_> = (0..nx as u64)
        .map(|x| spec.code.message_symbols(&BitString::from_u64(x, k)))
        .collect::<Result<_>>()?;
    let t_of: Vec<usize> = (0..nx as u128).map(|x| code.checks_of(x) as usize).collect();
    // key_of[g][x]
    let mut gamma = BitString::zeros(spec.u as usize);
    let mut key_of = vec![vec![0usize; nx]; ng];
    for (g, row) in key_of.iter_mut().enumerate() {
        for (b, &pos) in support.iter().enumerate() {
            gamma.set(pos as usize - 1, (g >> b) & 1 == 1);
        }
        let idx: Vec<BitString> = design.sets.iter().map(|set| crate::extractor::restrict(&gamma, set)).collect();
        for (x, sy) in syms.iter().enumerate() {
            let mut v = 0;
            for (i, index) in idx.iter().enumerate() {
                if spec.code.bit_at(sy, index) {
                    v |= 1 << i;
                }
            }
            row[x] = v;
        }
    }
    let bsc_w = |a: usize, b: usize, n: usize| {
        let f = (a ^ b).count_ones() as i32;
        audit.p_w.powi(f) * (1.0 - audit.p_w).powi(n as i32 - f)
    };
    // joint[g][(z, t, key)] with seed known
    let mut per_seed: Vec<Vec<f64>> = vec![vec![0.0; nx * nt * nk]; ng];
    let pg = 1.0 / ng as f64;
    for (g, table) in per_seed.iter_mut().enumerate() {
        for z in 0..nx {
            for x in 0..nx {
                let p = pg * bsc_w(x, z, k) / nx as f64;
                table[(z * nt + t_of[x]) * nk + key_of[g][x]] += p;
            }
        }
    }
    let mut h_cond_seed = 0.0;
    let mut eps = 0.0;
    let mut marginal = vec![0.0; nk];
    for table in &per_seed {
        for view in table.chunks(nk) {
            let pv: f64 = view.iter().sum();
            if pv > 0.0 {
                h_cond_seed += pv * entropy(view);
                eps += pv * dif(view);
            }
            for (m, v) in marginal.iter_mut().zip(view) {
                *m += v;
            }
        }
    }
    let h_key = entropy(&marginal);
    let leak_seed = (h_key - h_cond_seed).max(0.0);
    let leakage = if beta {
        // Eve holds a noisy copy of the seed support instead of the seed
        let mut h = 0.0;
        let mut mix = vec![0.0; nx * nt * nk];
        for z3 in 0..ng {
            mix.iter_mut().for_each(|v| *v = 0.0);
            for (g, table) in per_seed.iter().enumerate() {
                let w = bsc_w(g, z3, s);
                for (m, v) in mix.iter_mut().zip(table) {
                    *m += w * v;
                }
            }
            for view in mix.chunks(nk) {
                let pv: f64 = view.iter().sum();
                if pv > 0.0 {
                    h += pv * entropy(view);
                }
            }
        }
        (h_key - h).max(0.0)
    } else {
        leak_seed
    };
    let bound = 2.0 * audit.ell as f64 * eps.sqrt();
    Ok(AuditReport {
        protocol: audit.protocol,
        k: audit.k,
        ell: audit.ell,
        u: spec.u,
        support_bits: s,
        p_w: audit.p_w,
        checks: audit.checks,
        leakage,
        leakage_seed_known: leak_seed,
        eps_measured: eps,
        bound,
        within: leakage <= bound + 1e-12 && leak_seed <= bound + 1e-12,
        vacuous: bound >= audit.ell as f64,
    })
}
