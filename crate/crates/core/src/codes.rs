//! Error-correction analytics for reconciliation over a BSC and small
//! systematic linear codes for simulation.
//!
//! The analytic side follows the random-coding (Gallager) bound: a code of
//! rate `rc` used over a BSC with crossover `p_m` has block error probability
//! at most `2^{-k E(rc)}`. Simulation codes are drawn uniformly from the
//! systematic ensemble and decoded exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::entropy::binary_entropy;
use crate::error::{check_len, Error, Result};

/// Information and check lengths of a block code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSpec {
    pub k: usize,
    pub r: usize,
}

impl CodeSpec {
    pub fn rate(&self) -> f64 {
        self.k as f64 / (self.k + self.r) as f64
    }
}

/// Gallager's function for a BSC:
/// `E0(rho) = rho - (1 + rho) log(p^{1/(1+rho)} + (1-p)^{1/(1+rho)})`.
pub fn gallager_e0(rho: f64, p_m: f64) -> f64 {
    let s = 1.0 / (1.0 + rho);
    rho - (1.0 + rho) * (p_m.powf(s) + (1.0 - p_m).powf(s)).log2()
}

/// Largest code rate the exponent is defined for: `1 / (1 + g(p_m))`.
pub fn max_code_rate(p_m: f64) -> f64 {
    1.0 / (1.0 + binary_entropy(p_m))
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Maximises a unimodal function on `[lo, hi]` by golden-section search.
pub(crate) fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut a = hi - GOLDEN * (hi - lo);
    let mut b = lo + GOLDEN * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + GOLDEN * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - GOLDEN * (hi - lo);
            fa = f(a);
        }
    }
    if fa > fb {
        (a, fa)
    } else {
        (b, fb)
    }
}

/// Random-coding exponent `max_rho [E0(rho) - rho (2 rc - 1) / rc]` for
/// `1/2 <= rc <= 1/(1 + g(p_m))`.
pub fn gallager_exponent(rc: f64, p_m: f64) -> Result<f64> {
    let upper = max_code_rate(p_m);
    if !(0.0..0.5).contains(&p_m) {
        return Err(Error::Parameter(format!("p_m = {p_m} outside [0, 1/2)")));
    }
    if rc < 0.5 - 1e-12 || rc > upper + 1e-12 {
        return Err(Error::Parameter(format!(
            "code rate {rc} outside [1/2, {upper}]"
        )));
    }
    let slope = (2.0 * rc - 1.0) / rc;
    if slope >= 1.0 - binary_entropy(p_m) - 1e-12 {
        return Ok(0.0);
    }
    let (_, best) = golden_max(|rho| gallager_e0(rho, p_m) - rho * slope, 0.0, 1.0, 1e-10);
    // both endpoints are candidates: the objective is concave and may peak at rho = 1
    let at_one = gallager_e0(1.0, p_m) - slope;
    Ok(best.max(at_one).max(0.0))
}

/// `ceil(-log P_e / E(rc))`: information length whose random-coding bound meets `p_e_adm`.
pub fn solve_k_for_error(p_e_adm: f64, rc: f64, p_m: f64) -> Result<u64> {
    if !(p_e_adm > 0.0 && p_e_adm < 1.0) {
        return Err(Error::Parameter(format!("P_e = {p_e_adm} outside (0, 1)")));
    }
    let e = gallager_exponent(rc, p_m)?;
    if e <= 0.0 {
        return Err(Error::Infeasible(format!(
            "error exponent vanishes at rate {rc}"
        )));
    }
    Ok(((-p_e_adm.log2()) / e).ceil().max(1.0) as u64)
}

/// `ceil(k g(p_m))`: the check budget of an asymptotically optimal code.
pub fn asymptotic_check_budget(k: u64, p_m: f64) -> u64 {
    (k as f64 * binary_entropy(p_m)).ceil() as u64
}

/// Smallest check length `r` such that `k` information bits at rate
/// `k / (k + r)` meet the block error target `p_e_adm` under the random-coding bound.
pub fn min_check_symbols(k: u64, p_m: f64, p_e_adm: f64) -> Result<u64> {
    if k == 0 {
        return Err(Error::Parameter("zero information length".into()));
    }
    let target = -p_e_adm.log2();
    let kf = k as f64;
    let meets = |r: u64| -> bool {
        let rc = kf / (kf + r as f64);
        gallager_exponent(rc, p_m)
            .map(|e| kf * e >= target)
            .unwrap_or(false)
    };
    let lo = asymptotic_check_budget(k, p_m).max(1);
    if lo > k || !meets(k) {
        return Err(Error::Infeasible(format!(
            "{k} information bits cannot reach P_e = {p_e_adm} at any rate >= 1/2"
        )));
    }
    let (mut lo, mut hi) = (lo, k);
    if meets(lo) {
        return Ok(lo);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if meets(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Solves `k2 (1 - g(2d / k2)) = 2 k0` for a fixed ratio `2d / k2`.
/// Returns `(k2, d)` with `d = floor(ratio * k2 / 2)`.
pub fn solve_varshamov_gilbert(k0: u64, ratio: f64) -> Result<(u64, u64)> {
    if k0 == 0 {
        return Err(Error::Parameter("k0 must be positive".into()));
    }
    if !(0.0..0.5).contains(&ratio) {
        return Err(Error::Infeasible(format!(
            "distance ratio {ratio} leaves no Varshamov-Gilbert capacity"
        )));
    }
    let k2 = (2.0 * k0 as f64 / (1.0 - binary_entropy(ratio))).ceil() as u64;
    let d = (ratio * k2 as f64 / 2.0).floor() as u64;
    Ok((k2, d))
}

/// Binary systematic code with generator `[I_k | P]`; row `i` of `P` is
/// stored as an `r`-bit integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCode {
    spec: CodeSpec,
    parity: Vec<u128>,
}

/// Uniformly random parity block, deterministic in `seed`.
pub fn make_random_systematic_code(k: usize, r: usize, seed: u64) -> LinearCode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    LinearCode::random(k, r, &mut rng)
}

impl LinearCode {
    pub fn from_parity_rows(k: usize, r: usize, parity: Vec<u128>) -> Result<Self> {
        if r > 128 {
            return Err(Error::Parameter(format!("check length {r} exceeds 128")));
        }
        check_len(k, parity.len())?;
        let mask = mask(r);
        if parity.iter().any(|&p| p & !mask != 0) {
            return Err(Error::Parameter("parity row wider than r".into()));
        }
        Ok(LinearCode {
            spec: CodeSpec { k, r },
            parity,
        })
    }

    pub fn random<R: Rng + ?Sized>(k: usize, r: usize, rng: &mut R) -> Self {
        assert!(r <= 128, "check length {r} exceeds 128");
        let mask = mask(r);
        let parity = (0..k).map(|_| rng.gen::<u128>() & mask).collect();
        LinearCode {
            spec: CodeSpec { k, r },
            parity,
        }
    }

    /// The repetition code: one information bit copied into `r` checks.
    pub fn repetition(n: usize) -> Self {
        assert!((1..=129).contains(&n));
        LinearCode {
            spec: CodeSpec { k: 1, r: n - 1 },
            parity: vec![mask(n - 1)],
        }
    }

    pub fn spec(&self) -> CodeSpec {
        self.spec
    }

    pub fn k(&self) -> usize {
        self.spec.k
    }

    pub fn r(&self) -> usize {
        self.spec.r
    }

    pub fn n(&self) -> usize {
        self.spec.k + self.spec.r
    }

    pub fn parity_rows(&self) -> &[u128] {
        &self.parity
    }

    /// Rows of the full `k x (k + r)` generator matrix.
    pub fn generator(&self) -> Vec<BitString> {
        (0..self.k())
            .map(|i| {
                let mut row = BitString::zeros(self.k());
                row.set(i, true);
                row.concat(&BitString::from_u128(self.parity[i], self.r()))
            })
            .collect()
    }

    /// Checks of an information word packed into an integer (bit `i` = position `i`).
    #[inline]
    pub fn checks_of(&self, info: u128) -> u128 {
        let mut acc = 0u128;
        let mut m = info;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            acc ^= self.parity[i];
            m &= m - 1;
        }
        acc
    }

    pub fn encode_checks(&self, x: &BitString) -> Result<BitString> {
        check_len(self.k(), x.len())?;
        let mut acc = 0u128;
        for i in x.ones_positions() {
            acc ^= self.parity[i];
        }
        Ok(BitString::from_u128(acc, self.r()))
    }

    /// `x || checks(x)`.
    pub fn codeword(&self, x: &BitString) -> Result<BitString> {
        Ok(x.concat(&self.encode_checks(x)?))
    }

    /// Minimum distance and the information word of one lightest nonzero
    /// codeword, by Gray-code enumeration of all `2^k` codewords.
    pub fn min_distance(&self) -> (usize, u128) {
        let k = self.k();
        assert!(k <= 30, "exhaustive distance needs k <= 30");
        let mut best = (usize::MAX, 0u128);
        let mut info = 0u128;
        let mut checks = 0u128;
        for step in 1u64..(1u64 << k) {
            let bit = step.trailing_zeros() as usize;
            info ^= 1 << bit;
            checks ^= self.parity[bit];
            let w = (info.count_ones() + checks.count_ones()) as usize;
            if w < best.0 || (w == best.0 && lex_less(info, checks, best.1, self.checks_of(best.1))) {
                best = (w, info);
            }
        }
        best
    }
}

fn mask(r: usize) -> u128 {
    if r >= 128 {
        u128::MAX
    } else {
        (1u128 << r) - 1
    }
}

/// Lexicographic order on error patterns `(info || checks)`, position 0 first.
fn lex_less(a_info: u128, a_chk: u128, b_info: u128, b_chk: u128) -> bool {
    let d = a_info ^ b_info;
    if d != 0 {
        return a_info >> d.trailing_zeros() & 1 == 0;
    }
    let d = a_chk ^ b_chk;
    d != 0 && a_chk >> d.trailing_zeros() & 1 == 0
}

/// Information word of the codeword nearest to `(y || checks)`, both parts
/// treated as noisy. Ties go to the lexicographically smallest error pattern.
/// Exhaustive over `2^k` error patterns on the information part.
pub fn decode_nearest(code: &LinearCode, y: &BitString, checks: &BitString) -> Result<BitString> {
    check_len(code.k(), y.len())?;
    check_len(code.r(), checks.len())?;
    let k = code.k();
    if k > 30 {
        return Err(Error::Parameter(format!("exhaustive decoding needs k <= 30, got {k}")));
    }
    let syndrome = code.checks_of(y.to_u128()) ^ checks.to_u128();
    // error e = (e_i || e_c) with e_c = syndrome ^ P e_i
    let mut best_info = 0u128;
    let mut best_chk = syndrome;
    let mut best_w = syndrome.count_ones();
    let mut ei = 0u128;
    let mut pe = 0u128;
    for step in 1u64..(1u64 << k) {
        let bit = step.trailing_zeros() as usize;
        ei ^= 1 << bit;
        pe ^= code.parity[bit];
        let ec = syndrome ^ pe;
        let w = ei.count_ones() + ec.count_ones();
        if w < best_w || (w == best_w && lex_less(ei, ec, best_info, best_chk)) {
            best_w = w;
            best_info = ei;
            best_chk = ec;
        }
    }
    Ok(BitString::from_u128(y.to_u128() ^ best_info, k))
}

/// Maximum-likelihood decoding when the checks arrived noiselessly: the
/// lightest information-part error consistent with the syndrome (ties to the
/// lexicographically smallest). Returns `y` unchanged if the syndrome is not
/// reachable.
pub fn decode_clean_checks(code: &LinearCode, y: &BitString, checks: &BitString) -> Result<BitString> {
    check_len(code.k(), y.len())?;
    check_len(code.r(), checks.len())?;
    let k = code.k();
    if k > 30 {
        return Err(Error::Parameter(format!("exhaustive decoding needs k <= 30, got {k}")));
    }
    let syndrome = code.checks_of(y.to_u128()) ^ checks.to_u128();
    if syndrome == 0 {
        return Ok(y.clone());
    }
    let mut best: Option<u128> = None;
    let mut ei = 0u128;
    let mut pe = 0u128;
    for step in 1u64..(1u64 << k) {
        let bit = step.trailing_zeros() as usize;
        ei ^= 1 << bit;
        pe ^= code.parity[bit];
        if pe == syndrome {
            best = Some(match best {
                Some(b) if b.count_ones() < ei.count_ones() => b,
                Some(b) if b.count_ones() == ei.count_ones() && lex_less(b, 0, ei, 0) => b,
                _ => ei,
            });
        }
    }
    Ok(match best {
        Some(e) => BitString::from_u128(y.to_u128() ^ e, k),
        None => y.clone(),
    })
}

/// Same decision as [`decode_clean_checks`], found by trying error patterns
/// in order of weight; cheap when the channel is quiet.
pub fn decode_by_weight(code: &LinearCode, y: &BitString, checks: &BitString) -> Result<BitString> {
    check_len(code.k(), y.len())?;
    check_len(code.r(), checks.len())?;
    let k = code.k();
    if k > 64 {
        return Err(Error::Parameter(format!("weight-ordered decoding needs k <= 64, got {k}")));
    }
    let syndrome = code.checks_of(y.to_u128()) ^ checks.to_u128();
    if syndrome == 0 {
        return Ok(y.clone());
    }
    for w in 1..=k {
        let mut best: Option<u128> = None;
        weight_patterns(code, k, w, 0, 0, 0, syndrome, &mut best);
        if let Some(e) = best {
            return Ok(BitString::from_u128(y.to_u128() ^ e, k));
        }
    }
    Ok(y.clone())
}

#[allow(clippy::too_many_arguments)]
fn weight_patterns(code: &LinearCode, k: usize, left: usize, from: usize, ei: u128, pe: u128, syndrome: u128, best: &mut Option<u128>) {
    if left == 0 {
        if pe == syndrome && best.is_none_or(|b| lex_less(ei, 0, b, 0)) {
            *best = Some(ei);
        }
        return;
    }
    for i in from..=k - left {
        weight_patterns(code, k, left - 1, i + 1, ei | 1 << i, pe ^ code.parity[i], syndrome, best);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn e0_values() {
        assert!(gallager_e0(1e-12, 0.01).abs() < 1e-10);
        assert!(gallager_e0(1e-12, 0.3).abs() < 1e-10);
        // 1 - 2 log2(0.1 + sqrt(0.99)), 50-digit evaluation
        assert!((gallager_e0(1.0, 0.01) - 0.738_171_364_507_741_5).abs() < 1e-12);
        let mut prev = gallager_e0(0.0, 0.05);
        for i in 1..=1000 {
            let cur = gallager_e0(i as f64 / 1000.0, 0.05);
            assert!(cur > prev);
            prev = cur;
        }
    }

    #[test]
    fn exponent_against_grid_search() {
        let e = gallager_exponent(0.5, 0.01).unwrap();
        let grid = (1..100_000)
            .map(|i| gallager_e0(i as f64 * 1e-5, 0.01))
            .fold(f64::MIN, f64::max)
            .max(gallager_e0(1.0, 0.01));
        assert!(e > 0.0);
        assert!((e - grid).abs() < 1e-8);
        let rc = 0.8;
        let slope = (2.0 * rc - 1.0) / rc;
        let grid = (1..100_000)
            .map(|i| {
                let rho = i as f64 * 1e-5;
                gallager_e0(rho, 0.01) - rho * slope
            })
            .fold(f64::MIN, f64::max);
        assert!((gallager_exponent(rc, 0.01).unwrap() - grid).abs() < 1e-8);
    }

    #[test]
    fn exponent_vanishes_at_capacity_and_decreases() {
        for p in [0.001, 0.01, 0.05, 0.11] {
            let top = max_code_rate(p);
            assert!(gallager_exponent(top, p).unwrap() < 1e-6);
            let mut prev = f64::INFINITY;
            for i in 0..=50 {
                let rc = 0.5 + (top - 0.5) * i as f64 / 50.0;
                let e = gallager_exponent(rc, p).unwrap();
                assert!(e <= prev + 1e-12);
                if i < 50 {
                    assert!(e > 0.0);
                }
                prev = e;
            }
        }
        assert!(gallager_exponent(0.4, 0.01).is_err());
        assert!(gallager_exponent(0.95, 0.01).is_err());
    }

    #[test]
    fn k_for_error_examples() {
        let e = gallager_exponent(0.75, 0.01).unwrap();
        let k = 40u64;
        let pe = 2f64.powf(-(k as f64) * e);
        assert_eq!(solve_k_for_error(pe * 1.000_000_1, 0.75, 0.01).unwrap(), k);
        let k = solve_k_for_error(1e-5, 0.9, 0.01).unwrap();
        let e = gallager_exponent(0.9, 0.01).unwrap();
        assert!(2f64.powf(-(k as f64) * e) <= 1e-5);
        assert_eq!(solve_k_for_error(0.5, 0.5, 0.0).unwrap(), 1);
        assert!(solve_k_for_error(1e-5, max_code_rate(0.01), 0.01).is_err());
    }

    #[test]
    fn check_budgets() {
        assert_eq!(asymptotic_check_budget(1000, 0.0), 0);
        assert_eq!(asymptotic_check_budget(1000, 0.01), 81);
        assert_eq!(asymptotic_check_budget(1000, 0.5), 1000);
    }

    #[test]
    fn min_check_symbols_is_tight() {
        for (k, p, pe) in [(1000u64, 0.01, 1e-5), (20_000, 0.05, 1e-9), (300, 0.001, 1e-3)] {
            let r = min_check_symbols(k, p, pe).unwrap();
            let ok = |r: u64| {
                let rc = k as f64 / (k + r) as f64;
                k as f64 * gallager_exponent(rc, p).unwrap() >= -pe.log2()
            };
            assert!(ok(r));
            assert!(r == asymptotic_check_budget(k, p).max(1) || !ok(r - 1));
        }
        assert!(min_check_symbols(5, 0.01, 1e-30).is_err());
    }

    #[test]
    fn varshamov_gilbert_examples() {
        assert_eq!(solve_varshamov_gilbert(100, 0.0).unwrap(), (200, 0));
        // 200 / (1 - g(0.1)) = 376.64...
        assert_eq!(solve_varshamov_gilbert(100, 0.1).unwrap().0, 377);
        assert!(solve_varshamov_gilbert(100, 0.5).is_err());
        assert!(solve_varshamov_gilbert(100, 0.7).is_err());
    }

    /// Matrix-vector product over GF(2) from the explicit generator.
    fn oracle_encode(code: &LinearCode, x: &BitString) -> BitString {
        let g = code.generator();
        let mut out = BitString::zeros(code.n());
        for (i, row) in g.iter().enumerate() {
            if x.get(i) {
                out.xor_assign(row);
            }
        }
        out
    }

    /// Nearest codeword by listing the whole codebook.
    fn oracle_nearest(code: &LinearCode, y: &BitString, checks: &BitString) -> BitString {
        let word = y.concat(checks);
        let mut best: Option<(usize, Vec<bool>, BitString)> = None;
        for v in 0..(1u64 << code.k()) {
            let x = BitString::from_u64(v, code.k());
            let e = oracle_encode(code, &x).xor(&word);
            let key = (e.weight(), e.iter().collect::<Vec<_>>());
            if best.as_ref().is_none_or(|b| (key.0, &key.1) < (b.0, &b.1)) {
                best = Some((key.0, key.1, x));
            }
        }
        best.unwrap().2
    }

    #[test]
    fn encoding_matches_matrix_product() {
        let code = make_random_systematic_code(12, 9, 7);
        assert_eq!(code.encode_checks(&BitString::zeros(12)).unwrap(), BitString::zeros(9));
        for i in 0..12 {
            let mut e = BitString::zeros(12);
            e.set(i, true);
            assert_eq!(
                code.encode_checks(&e).unwrap(),
                BitString::from_u128(code.parity_rows()[i], 9)
            );
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let x = BitString::random(&mut rng, 12);
            assert_eq!(code.codeword(&x).unwrap(), oracle_encode(&code, &x));
        }
        assert!(code.encode_checks(&BitString::zeros(11)).is_err());
    }

    #[test]
    fn nearest_decoding_matches_codebook_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for seed in 0..6 {
            let code = make_random_systematic_code(8, 7, seed);
            for _ in 0..150 {
                let y = BitString::random(&mut rng, 8);
                let c = BitString::random(&mut rng, 7);
                assert_eq!(decode_nearest(&code, &y, &c).unwrap(), oracle_nearest(&code, &y, &c));
            }
        }
    }

    #[test]
    fn round_trip_inside_unique_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut code = make_random_systematic_code(10, 12, 3);
        let mut seed = 3;
        while code.min_distance().0 < 5 {
            seed += 1;
            code = make_random_systematic_code(10, 12, seed);
        }
        let t = (code.min_distance().0 - 1) / 2;
        for _ in 0..1000 {
            let x = BitString::random(&mut rng, 10);
            let mut word = code.codeword(&x).unwrap();
            let w = rng.gen_range(0..=t);
            let mut flipped = std::collections::BTreeSet::new();
            while flipped.len() < w {
                flipped.insert(rng.gen_range(0..code.n()));
            }
            for &p in &flipped {
                word.flip(p);
            }
            let y = word.slice(0, 10);
            let c = word.slice(10, 12);
            assert_eq!(decode_nearest(&code, &y, &c).unwrap(), x);
        }
    }

    #[test]
    fn clean_check_decoder_is_coset_minimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let code = make_random_systematic_code(10, 8, 2);
        for _ in 0..200 {
            let x = BitString::random(&mut rng, 10);
            let c = code.encode_checks(&x).unwrap();
            let mut y = x.clone();
            y.flip(rng.gen_range(0..10));
            let out = decode_clean_checks(&code, &y, &c).unwrap();
            assert_eq!(code.encode_checks(&out).unwrap(), c);
            // no lighter consistent error exists
            let w = out.hamming(&y);
            for v in 0..(1u64 << 10) {
                let cand = BitString::from_u64(v, 10);
                if code.encode_checks(&cand).unwrap() == c {
                    assert!(cand.hamming(&y) >= w);
                }
            }
        }
    }

    #[test]
    fn weight_ordered_decoder_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for seed in 0..5 {
            let code = make_random_systematic_code(9, 6, seed);
            for _ in 0..200 {
                let y = BitString::random(&mut rng, 9);
                let c = BitString::random(&mut rng, 6);
                assert_eq!(decode_by_weight(&code, &y, &c).unwrap(), decode_clean_checks(&code, &y, &c).unwrap());
            }
        }
    }

    #[test]
    fn minimum_distance_of_repetition() {
        let code = LinearCode::repetition(9);
        assert_eq!(code.min_distance(), (9, 1));
    }

    proptest! {
        #[test]
        fn k_for_error_brackets_target(pe in 1e-12f64..0.4, frac in 0.0f64..0.999) {
            let p = 0.01;
            let rc = 0.5 + (max_code_rate(p) - 0.5) * frac;
            let k = solve_k_for_error(pe, rc, p).unwrap();
            let e = gallager_exponent(rc, p).unwrap();
            prop_assert!(2f64.powf(-(k as f64) * e) <= pe * (1.0 + 1e-9));
            if k > 1 {
                prop_assert!(pe < 2f64.powf(-((k - 1) as f64) * e));
            }
        }

        #[test]
        fn checks_are_linear(a in any::<u16>(), b in any::<u16>(), seed in any::<u64>()) {
            let code = make_random_systematic_code(16, 10, seed);
            let xa = BitString::from_u64(a as u64, 16);
            let xb = BitString::from_u64(b as u64, 16);
            let lhs = code.encode_checks(&xa.xor(&xb)).unwrap();
            let rhs = code.encode_checks(&xa).unwrap().xor(&code.encode_checks(&xb).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
