//! Trevisan-style strong extractor.
//!
//! The input `x` of `k` bits is encoded with a Reed-Solomon code over
//! GF(2^m) concatenated with the Hadamard code, giving a codeword of length
//! `2^nu`, read as the truth table of a Boolean function `f` on `nu` bits.
//! Output bit `i` is `f(gamma|S_i)`, the seed restricted to the `i`-th set of
//! a weak design.
//!
//! Parameters: `nu = ceil(log(k / eps))`, seed length
//! `u = ceil(nu / ln c) * nu`, and the extractor is strong for sources with
//! min-entropy at least `ell c + 3 log(ell / eps) + u + 3`.

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{check_len, Error, Result};
use crate::field::FieldElement;

/// `ceil(log2 k - log2 eps)`, with `eps` given by its base-2 logarithm.
pub fn design_nu_log2(k: u64, log2_eps: f64) -> u32 {
    ((k as f64).log2() - log2_eps - 1e-12).ceil().max(1.0) as u32
}

/// `ceil(log2(k / eps))`.
pub fn design_nu(k: u64, eps: f64) -> u32 {
    design_nu_log2(k, eps.log2())
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("eps = {eps} outside (0, 1)")))
    }
}

/// Seed length for a weak `(nu, c)` design: `ceil(nu / ln c) * nu`.
pub fn seed_length_for_nu(nu: u32, c: f64) -> Result<u64> {
    if !(c > 1.0) {
        return Err(Error::Parameter(format!("design parameter c = {c} must exceed 1")));
    }
    let nu_f = nu as f64;
    Ok((nu_f / c.ln()).ceil() as u64 * nu as u64)
}

/// `u = ceil(ceil(log(k / eps)) / ln c) * ceil(log(k / eps))`.
pub fn seed_length(k: u64, eps: f64, c: f64) -> Result<u64> {
    check_eps(eps)?;
    seed_length_for_nu(design_nu(k, eps), c)
}

/// Seed length of the full-extraction variant: `ceil(nu / ln 2) * nu * ceil(log(4 / mu))`.
pub fn seed_length_full_extraction(k: u64, eps: f64, mu: f64) -> Result<u64> {
    check_eps(eps)?;
    if !(mu > 0.0 && mu < 0.5) {
        return Err(Error::Parameter(format!("mu = {mu} outside (0, 1/2)")));
    }
    let nu = design_nu(k, eps) as f64;
    let factor = (4.0 / mu).log2().ceil();
    Ok(((nu / std::f64::consts::LN_2).ceil() * nu * factor) as u64)
}

/// Design parameter at which the extractor is strong for min-entropy
/// `h_budget`: `c = (h - 3 log(ell / eps) - u - 3) / ell`, with `eps` in log2 form.
pub fn strong_param_c_log2(h_budget: f64, ell: u64, log2_eps: f64, u: u64) -> Result<f64> {
    let ell_f = ell as f64;
    let c = (h_budget - 3.0 * (ell_f.log2() - log2_eps) - u as f64 - 3.0) / ell_f;
    if c > 1.0 {
        Ok(c)
    } else {
        Err(Error::Infeasible(format!(
            "min-entropy {h_budget} gives design parameter c = {c} <= 1"
        )))
    }
}

pub fn strong_param_c(h_budget: f64, ell: u64, eps: f64, u: u64) -> Result<f64> {
    check_eps(eps)?;
    strong_param_c_log2(h_budget, ell, eps.log2(), u)
}

/// Min-entropy the extractor needs: `ell c + 3 log(ell / eps) + u + 3`.
pub fn min_entropy_budget(ell: u64, log2_eps: f64, c: f64, u: u64) -> f64 {
    let ell_f = ell as f64;
    ell_f * c + 3.0 * (ell_f.log2() - log2_eps) + u as f64 + 3.0
}

/// Sets `S_1..S_ell` of size `nu` in `{1..u}` (1-based, ascending).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakDesign {
    pub nu: u32,
    pub c: f64,
    pub ell: u64,
    pub u: u64,
    pub sets: Vec<Vec<u64>>,
}

impl WeakDesign {
    /// `sum_{j < i} 2^{|S_j & S_i|}` for every `i`.
    pub fn overlap_sums(&self) -> Vec<u128> {
        (0..self.sets.len())
            .map(|i| {
                self.sets[..i]
                    .iter()
                    .map(|s| 1u128 << sorted_intersection(s, &self.sets[i]))
                    .sum()
            })
            .collect()
    }

    /// Distinct seed positions used by any set, ascending (1-based).
    pub fn support(&self) -> Vec<u64> {
        let mut all: Vec<u64> = self.sets.iter().flatten().copied().collect();
        all.sort_unstable();
        all.dedup();
        all
    }
}

fn sorted_intersection(a: &[u64], b: &[u64]) -> u32 {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Greedy weak design. The universe is cut into `nu` blocks of
/// `q = floor(u / nu)` consecutive elements and every set takes one element
/// per block, so two sets meet exactly in the blocks where their choices
/// agree. Each set is built block by block, choosing the element that
/// minimises the conditional expectation of its overlap sum when the
/// remaining blocks are filled uniformly; ties go to the smaller element.
pub fn greedy_weak_design(nu: u32, c: f64, ell: u64, u: u64) -> Result<WeakDesign> {
    if nu == 0 || nu > 100 {
        return Err(Error::Parameter(format!("nu = {nu} outside 1..=100")));
    }
    if u < nu as u64 {
        return Err(Error::Parameter(format!("seed length {u} below nu = {nu}")));
    }
    if ell == 0 {
        return Err(Error::Parameter("empty design".into()));
    }
    let q = u / nu as u64;
    let bound = c * (ell - 1) as f64;
    let mut choices: Vec<Vec<u64>> = Vec::with_capacity(ell as usize);
    let mut weight = vec![0u128; q as usize];
    for i in 0..ell as usize {
        let mut matches = vec![0u32; i];
        let mut mine = Vec::with_capacity(nu as usize);
        for t in 0..nu as usize {
            weight.iter_mut().for_each(|w| *w = 0);
            for (j, prev) in choices.iter().enumerate() {
                weight[prev[t] as usize] += 1u128 << matches[j];
            }
            let pick = (0..q as usize)
                .min_by_key(|&v| (weight[v], v))
                .expect("nonempty block") as u64;
            for (j, prev) in choices.iter().enumerate() {
                if prev[t] == pick {
                    matches[j] += 1;
                }
            }
            mine.push(pick);
        }
        let total: u128 = matches.iter().map(|&m| 1u128 << m).sum();
        if total as f64 > bound {
            return Err(Error::Infeasible(format!(
                "set {} has overlap sum {total} > c (ell - 1) = {bound}; seed length {u} is too small for c = {c}",
                i + 1
            )));
        }
        choices.push(mine);
    }
    let sets = choices
        .into_iter()
        .map(|ch| {
            ch.iter()
                .enumerate()
                .map(|(t, &v)| t as u64 * q + v + 1)
                .collect()
        })
        .collect();
    Ok(WeakDesign {
        nu,
        c,
        ell,
        u,
        sets,
    })
}

/// Reed-Solomon over GF(2^m) with `N = 2^(nu - m)` evaluation points,
/// concatenated with the Hadamard code on `m` bits; total length `2^nu`.
/// Codeword index `j` splits as `(j >> m, j & (2^m - 1))` = (point, Hadamard row).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InnerCode {
    pub k: u64,
    pub nu: u32,
    pub m: u32,
    /// Number of RS message symbols, `ceil(k / m)`.
    pub symbols: u64,
}

pub fn build_inner_code(nu: u32, k: u64) -> Result<InnerCode> {
    if nu == 0 || k == 0 {
        return Err(Error::Parameter("nu and k must be positive".into()));
    }
    let m = nu.div_ceil(2);
    if m > crate::field::MAX_WIDTH {
        return Err(Error::Parameter(format!("symbol width {m} too large")));
    }
    let symbols = k.div_ceil(m as u64);
    let log_points = nu - m;
    if log_points < 64 && symbols > (1u64 << log_points) {
        return Err(Error::Infeasible(format!(
            "{k} input bits need {symbols} RS symbols but only 2^{log_points} points exist"
        )));
    }
    Ok(InnerCode { k, nu, m, symbols })
}

impl InnerCode {
    pub fn length_log2(&self) -> u32 {
        self.nu
    }

    pub fn rs_points_log2(&self) -> u32 {
        self.nu - self.m
    }

    /// Input split into `m`-bit symbols, the last zero-padded.
    pub fn message_symbols(&self, x: &BitString) -> Result<Vec<FieldElement>> {
        check_len(self.k as usize, x.len())?;
        let m = self.m as usize;
        (0..self.symbols as usize)
            .map(|j| {
                let start = j * m;
                let len = m.min(x.len() - start);
                FieldElement::from_bits_padded(self.m, &x.slice(start, len))
            })
            .collect()
    }

    /// RS symbol at an evaluation point (Horner).
    pub fn evaluate(&self, symbols: &[FieldElement], point: &FieldElement) -> FieldElement {
        let mut acc = FieldElement::zero(self.m);
        for s in symbols.iter().rev() {
            acc = acc.mul(point).add(s);
        }
        acc
    }

    /// Codeword bit at the index whose binary expansion (most significant
    /// bit first) is `index`, a string of `nu` bits.
    pub fn bit_at(&self, symbols: &[FieldElement], index: &BitString) -> bool {
        assert_eq!(index.len(), self.nu as usize);
        let nu = self.nu as usize;
        let m = self.m as usize;
        let mut h = BitString::zeros(m);
        for s in 0..m {
            h.set(s, index.get(nu - 1 - s));
        }
        let lp = nu - m;
        let mut e = BitString::zeros(m);
        for s in 0..lp {
            e.set(s, index.get(nu - 1 - m - s));
        }
        let point = FieldElement::from_bits(self.m, &e).expect("width");
        let h = FieldElement::from_bits(self.m, &h).expect("width");
        self.evaluate(symbols, &point).dot(&h)
    }

    /// Whole codeword, for `nu <= 24`.
    pub fn codeword(&self, x: &BitString) -> Result<BitString> {
        if self.nu > 24 {
            return Err(Error::Parameter(format!(
                "codeword of length 2^{} is too long to materialise",
                self.nu
            )));
        }
        let syms = self.message_symbols(x)?;
        let m = self.m;
        let mut out = BitString::zeros(1usize << self.nu);
        for e in 0..(1u64 << (self.nu - m)) {
            let v = self.evaluate(&syms, &FieldElement::from_u64(m, e));
            for h in 0..(1u64 << m) {
                if v.dot(&FieldElement::from_u64(m, h)) {
                    out.set(((e << m) | h) as usize, true);
                }
            }
        }
        Ok(out)
    }
}

/// Lengths and parameters of one extractor instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtractorSpec {
    pub k: u64,
    pub ell: u64,
    pub log2_eps: f64,
    pub nu: u32,
    pub c: f64,
    pub u: u64,
    pub code: InnerCode,
}

impl ExtractorSpec {
    pub fn new(k: u64, ell: u64, eps: f64, c: f64) -> Result<Self> {
        check_eps(eps)?;
        Self::from_log2_eps(k, ell, eps.log2(), c)
    }

    pub fn from_log2_eps(k: u64, ell: u64, log2_eps: f64, c: f64) -> Result<Self> {
        if ell == 0 {
            return Err(Error::Parameter("zero output length".into()));
        }
        let nu = design_nu_log2(k, log2_eps);
        let u = seed_length_for_nu(nu, c)?;
        let code = build_inner_code(nu, k)?;
        Ok(ExtractorSpec {
            k,
            ell,
            log2_eps,
            nu,
            c,
            u,
            code,
        })
    }

    pub fn eps(&self) -> f64 {
        2f64.powf(self.log2_eps)
    }

    /// Min-entropy at which the parameters guarantee strong extraction.
    pub fn min_entropy_budget(&self) -> f64 {
        min_entropy_budget(self.ell, self.log2_eps, self.c, self.u)
    }

    pub fn design(&self) -> Result<WeakDesign> {
        greedy_weak_design(self.nu, self.c, self.ell, self.u)
    }
}

/// `gamma` restricted to a design set, in set order.
pub fn restrict(gamma: &BitString, set: &[u64]) -> BitString {
    BitString::from_bits(&set.iter().map(|&s| gamma.get(s as usize - 1)).collect::<Vec<_>>())
}

/// Output bit `i` is the codeword bit of `x` at index `gamma|S_i`.
pub fn extract(spec: &ExtractorSpec, design: &WeakDesign, x: &BitString, gamma: &BitString) -> Result<BitString> {
    check_len(spec.k as usize, x.len())?;
    check_len(spec.u as usize, gamma.len())?;
    check_len(spec.ell as usize, design.sets.len())?;
    let syms = spec.code.message_symbols(x)?;
    let bits: Vec<bool> = design
        .sets
        .iter()
        .map(|s| spec.code.bit_at(&syms, &restrict(gamma, s)))
        .collect();
    Ok(BitString::from_bits(&bits))
}

/// Output distribution for every assignment of the design's support, for a
/// source given as `(x, probability)` pairs. Entry `g` assigns support
/// position `j` (ascending) the bit `(g >> j) & 1`; output value `v` packs bit
/// `i` of the key as `(v >> i) & 1`. Seed positions outside the support do
/// not affect the output.
pub fn per_seed_distributions(
    spec: &ExtractorSpec,
    design: &WeakDesign,
    source: &[(BitString, f64)],
) -> Result<Vec<Vec<f64>>> {
    let support = design.support();
    if support.len() > 24 {
        return Err(Error::Parameter("seed support too large to enumerate".into()));
    }
    let ell = spec.ell as usize;
    if ell > 16 {
        return Err(Error::Parameter("output too long to enumerate".into()));
    }
    let syms: Vec<Vec<FieldElement>> = source
        .iter()
        .map(|(x, _)| spec.code.message_symbols(x))
        .collect::<Result<_>>()?;
    let mut gamma = BitString::zeros(spec.u as usize);
    let mut out = Vec::with_capacity(1 << support.len());
    for assign in 0..(1u64 << support.len()) {
        for (b, &pos) in support.iter().enumerate() {
            gamma.set(pos as usize - 1, (assign >> b) & 1 == 1);
        }
        let idx: Vec<BitString> = design.sets.iter().map(|s| restrict(&gamma, s)).collect();
        let mut dist = vec![0.0f64; 1 << ell];
        for ((_, p), sy) in source.iter().zip(&syms) {
            let mut v = 0usize;
            for (i, index) in idx.iter().enumerate() {
                if spec.code.bit_at(sy, index) {
                    v |= 1 << i;
                }
            }
            dist[v] += p;
        }
        out.push(dist);
    }
    Ok(out)
}

/// `(1/2) sum |P(v) - 2^-ell|`.
pub fn distance_from_uniform(dist: &[f64]) -> f64 {
    let uniform = 1.0 / dist.len() as f64;
    dist.iter().map(|d| (d - uniform).abs()).sum::<f64>() / 2.0
}

/// Statistical distance of `(seed, output)` from uniform: the seed-average of
/// the output's distance from uniform.
pub fn strong_distance(spec: &ExtractorSpec, design: &WeakDesign, source: &[(BitString, f64)]) -> Result<f64> {
    let per_seed = per_seed_distributions(spec, design, source)?;
    Ok(per_seed.iter().map(|d| distance_from_uniform(d)).sum::<f64>() / per_seed.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn seed_length_examples() {
        assert_eq!(design_nu(8, 0.25), 5);
        assert_eq!(seed_length(8, 0.25, std::f64::consts::E).unwrap(), 25);
        assert_eq!(seed_length(8, 0.25, 1e300).unwrap(), 5);
        assert!(seed_length(8, 0.25, 1.0).is_err());
        assert_eq!(seed_length_full_extraction(8, 0.25, 0.1).unwrap(), 240);
        assert_eq!(seed_length_full_extraction(8, 0.25, 0.25).unwrap(), 8 * 5 * 4);
        assert!(seed_length_full_extraction(8, 0.25, 0.5).is_err());
        let mut prev = u64::MAX;
        for i in 1..50 {
            let u = seed_length_full_extraction(1000, 1e-6, i as f64 / 100.0).unwrap();
            assert!(u <= prev);
            prev = u;
        }
    }

    #[test]
    fn seed_length_matches_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let k: u64 = rng.gen_range(1..1_000_000);
            let eps = 10f64.powf(-rng.gen_range(0.1..60.0));
            let c: f64 = rng.gen_range(1.01..50.0);
            let nu = ((k as f64) / eps).log2().ceil();
            let expected = (nu / c.ln()).ceil() * nu;
            assert_eq!(seed_length(k, eps, c).unwrap() as f64, expected);
        }
    }

    #[test]
    fn strong_param_examples() {
        let (ell, eps, u) = (4u64, 0.125, 30u64);
        let edge = ell as f64 + 3.0 * (ell as f64 / eps).log2() + u as f64 + 3.0;
        assert!(strong_param_c(edge, ell, eps, u).is_err());
        let c1 = strong_param_c(edge + 10.0, ell, eps, u).unwrap();
        let c2 = strong_param_c(edge + 30.0, ell, eps, u).unwrap();
        assert!((c2 - c1 - 20.0 / ell as f64).abs() < 1e-12);
        let c = 2.5;
        let h = min_entropy_budget(ell, eps.log2(), c, u);
        assert!((strong_param_c(h, ell, eps, u).unwrap() - c).abs() < 1e-12);
    }

    #[test]
    fn design_edge_cases() {
        let d = greedy_weak_design(5, 2.0, 1, 25).unwrap();
        assert_eq!(d.sets.len(), 1);
        assert_eq!(d.sets[0].len(), 5);
        // enough room for pairwise disjoint sets
        let d = greedy_weak_design(3, 1.0, 4, 12).unwrap();
        assert_eq!(d.overlap_sums(), vec![0, 1, 2, 3]);
        assert!(greedy_weak_design(4, 2.0, 3, 3).is_err());
    }

    #[test]
    fn designs_at_formula_seed_length_hold() {
        for &(nu, c, ell) in &[(4u32, 2.0, 6u64), (5, std::f64::consts::E, 8), (6, 1.5, 10), (8, 3.0, 20)] {
            let u = seed_length_for_nu(nu, c).unwrap();
            let d = greedy_weak_design(nu, c, ell, u).unwrap();
            for (i, s) in d.sets.iter().enumerate() {
                assert_eq!(s.len(), nu as usize);
                assert!(s.windows(2).all(|w| w[0] < w[1]));
                assert!(*s.last().unwrap() <= u);
                assert!(d.overlap_sums()[i] as f64 <= c * (ell - 1) as f64);
            }
        }
    }

    #[test]
    fn inner_code_degenerate_and_direct() {
        let code = build_inner_code(6, 1).unwrap();
        assert_eq!(code.codeword(&BitString::zeros(1)).unwrap(), BitString::zeros(64));
        // constant polynomial 1: bit (e, h) = h_0
        let w = code.codeword(&BitString::ones(1)).unwrap();
        for j in 0..64usize {
            assert_eq!(w.get(j), j & 1 == 1);
        }
        assert!(build_inner_code(4, 100).is_err());
    }

    /// Power-sum evaluation, independent of Horner's rule.
    fn naive_eval(code: &InnerCode, syms: &[FieldElement], point: &FieldElement) -> FieldElement {
        let mut acc = FieldElement::zero(code.m);
        for (j, s) in syms.iter().enumerate() {
            let mut pw = FieldElement::one(code.m);
            for _ in 0..j {
                pw = pw.mul(point);
            }
            acc = acc.add(&s.mul(&pw));
        }
        acc
    }

    #[test]
    fn codeword_blocks_match_naive_evaluation() {
        let code = build_inner_code(8, 12).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut inputs = vec![{
            let mut e = BitString::zeros(12);
            e.set(0, true);
            e
        }];
        inputs.extend((0..5).map(|_| BitString::random(&mut rng, 12)));
        for x in inputs {
            let w = code.codeword(&x).unwrap();
            let syms = code.message_symbols(&x).unwrap();
            for e in 0..(1u64 << (code.nu - code.m)) {
                let v = naive_eval(&code, &syms, &FieldElement::from_u64(code.m, e));
                for h in 0..(1u64 << code.m) {
                    let j = ((e << code.m) | h) as usize;
                    let bit = (v.to_u64() & h).count_ones() % 2 == 1;
                    assert_eq!(w.get(j), bit);
                    let mut index = BitString::zeros(code.nu as usize);
                    for t in 0..code.nu as usize {
                        index.set(t, (j >> (code.nu as usize - 1 - t)) & 1 == 1);
                    }
                    assert_eq!(code.bit_at(&syms, &index), bit);
                }
            }
        }
    }

    #[test]
    fn codeword_distance_meets_design() {
        let code = build_inner_code(10, 20).unwrap();
        let n_points = 1u64 << (code.nu - code.m);
        let designed = (n_points - code.symbols + 1) * (1u64 << (code.m - 1));
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let a = BitString::random(&mut rng, 20);
            let mut b = BitString::random(&mut rng, 20);
            if a == b {
                b.flip(0);
            }
            let d = code.codeword(&a).unwrap().hamming(&code.codeword(&b).unwrap());
            assert!(d as u64 >= designed);
        }
    }

    #[test]
    fn extraction_is_a_codeword_lookup() {
        let spec = ExtractorSpec::new(8, 2, 0.25, std::f64::consts::E).unwrap();
        let design = spec.design().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let x = BitString::random(&mut rng, 8);
            let g = BitString::random(&mut rng, spec.u as usize);
            let out = extract(&spec, &design, &x, &g).unwrap();
            assert_eq!(out, extract(&spec, &design, &x, &g).unwrap());
            let w = spec.code.codeword(&x).unwrap();
            for (i, s) in design.sets.iter().enumerate() {
                let idx = restrict(&g, s);
                let j = idx.iter().fold(0usize, |acc, b| (acc << 1) | b as usize);
                assert_eq!(out.get(i), w.get(j));
            }
        }
        assert!(extract(&spec, &design, &BitString::zeros(7), &BitString::zeros(spec.u as usize)).is_err());
    }

    #[test]
    fn strong_distance_matches_full_seed_enumeration() {
        let spec = ExtractorSpec::new(4, 2, 0.5, 8.0).unwrap();
        let design = spec.design().unwrap();
        let source: Vec<(BitString, f64)> = [1u64, 6, 11]
            .iter()
            .map(|&v| (BitString::from_u64(v, 4), 1.0 / 3.0))
            .collect();
        let fast = strong_distance(&spec, &design, &source).unwrap();
        let u = spec.u as usize;
        assert!(u <= 16);
        let mut total = 0.0;
        for g in 0..(1u64 << u) {
            let gamma = BitString::from_u64(g, u);
            let mut dist = [0.0f64; 4];
            for (x, p) in &source {
                dist[extract(&spec, &design, x, &gamma).unwrap().to_u64() as usize] += p;
            }
            total += dist.iter().map(|d| (d - 0.25).abs()).sum::<f64>() / 2.0;
        }
        assert!((fast - total / (1u64 << u) as f64).abs() < 1e-12);
    }

    #[test]
    fn short_seed_design_is_rejected() {
        // u = 8 gives two slots per block; any six 4-slot choices have some
        // set whose overlap sum exceeds c (ell - 1) = 10
        match greedy_weak_design(4, 2.0, 6, 8) {
            Err(Error::Infeasible(_)) => {}
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn k8_uniform_source_is_close_to_uniform() {
        let spec = ExtractorSpec::new(8, 2, 0.25, std::f64::consts::E).unwrap();
        let design = spec.design().unwrap();
        let source: Vec<(BitString, f64)> = (0..256u64).map(|v| (BitString::from_u64(v, 8), 1.0 / 256.0)).collect();
        let dif = strong_distance(&spec, &design, &source).unwrap();
        assert!(dif <= spec.eps(), "{dif}");
    }
}
