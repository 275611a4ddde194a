//! Binary extension fields GF(2^a) for widths 1 to 512.
//!
//! Every width uses one fixed irreducible polynomial, chosen by a published
//! rule so that results are reproducible bit for bit:
//!
//! - width 1: `x + 1`;
//! - otherwise the trinomial `x^a + x^k + 1` with the smallest `k`, if any is
//!   irreducible;
//! - otherwise the pentanomial `x^a + x^k3 + x^k2 + x^k1 + 1` with
//!   `a > k3 > k2 > k1 > 0` and `(k3, k2, k1)` lexicographically smallest.
//!
//! This yields, for example, `x^8 + x^4 + x^3 + x + 1`, `x^64 + x^4 + x^3 + x + 1`
//! and `x^128 + x^7 + x^2 + x + 1`. Bit `j` of an element is the coefficient
//! of `x^j`. Polynomials are found on first use with Ben-Or's irreducibility
//! test and cached for the life of the process.

use std::fmt;
use std::sync::OnceLock;

use crate::bits::BitString;
use crate::error::{Error, Result};

pub const MAX_WIDTH: u32 = 512;
const WORDS: usize = (MAX_WIDTH as usize) / 64;

/// The field GF(2^width) with its reduction polynomial.
#[derive(Debug, Clone)]
pub struct Field {
    width: u32,
    /// Exponents of the non-leading terms, descending; always ends in 0.
    taps: Vec<u32>,
}

static FIELDS: [OnceLock<Field>; MAX_WIDTH as usize + 1] =
    [const { OnceLock::new() }; MAX_WIDTH as usize + 1];

/// The cached field of the given width.
pub fn field(width: u32) -> &'static Field {
    assert!(
        (1..=MAX_WIDTH).contains(&width),
        "field width {width} outside 1..={MAX_WIDTH}"
    );
    FIELDS[width as usize].get_or_init(|| Field::search(width))
}

/// Non-leading exponents of the reduction polynomial for `width`.
pub fn irreducible_taps(width: u32) -> Vec<u32> {
    field(width).taps.clone()
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    width: u32,
    words: [u64; WORDS],
}

impl Field {
    fn search(width: u32) -> Field {
        if width == 1 {
            return Field { width, taps: vec![0] };
        }
        for k in 1..width {
            let f = Field {
                width,
                taps: vec![k, 0],
            };
            if f.is_irreducible() {
                return f;
            }
        }
        for k3 in 3..width {
            for k2 in 2..k3 {
                for k1 in 1..k2 {
                    let f = Field {
                        width,
                        taps: vec![k3, k2, k1, 0],
                    };
                    if f.is_irreducible() {
                        return f;
                    }
                }
            }
        }
        panic!("no trinomial or pentanomial of degree {width} is irreducible");
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn taps(&self) -> &[u32] {
        &self.taps
    }

    /// Ben-Or: f of degree n is irreducible iff gcd(x^(2^i) - x, f) = 1 for i <= n/2.
    fn is_irreducible(&self) -> bool {
        let n = self.width;
        let x = FieldElement::from_u64(n, 2);
        let mut f = vec![0u64; (n as usize) / 64 + 1];
        f[(n / 64) as usize] |= 1 << (n % 64);
        for &t in &self.taps {
            f[(t / 64) as usize] ^= 1 << (t % 64);
        }
        let mut cur = x;
        for _ in 1..=n / 2 {
            cur = self.mul(&cur, &cur);
            let diff = cur.add(&x);
            let mut d = vec![0u64; f.len()];
            let n_copy = d.len().min(WORDS);
            d[..n_copy].copy_from_slice(&diff.words[..n_copy]);
            let g = poly_gcd(d, f.clone());
            if poly_degree(&g) != Some(0) {
                return false;
            }
        }
        true
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        debug_assert_eq!(a.width, self.width);
        debug_assert_eq!(b.width, self.width);
        if self.width <= 64 {
            let p = clmul(a.words[0], b.words[0]);
            let prod = (p.0 as u128) | ((p.1 as u128) << 64);
            return FieldElement::from_u64(self.width, self.reduce_small(prod));
        }
        let nw = (self.width as usize).div_ceil(64);
        let mut p = [0u64; 2 * WORDS];
        for i in 0..nw {
            if a.words[i] == 0 {
                continue;
            }
            for j in 0..nw {
                let (lo, hi) = clmul(a.words[i], b.words[j]);
                p[i + j] ^= lo;
                p[i + j + 1] ^= hi;
            }
        }
        self.reduce_wide(&mut p);
        let mut words = [0u64; WORDS];
        words.copy_from_slice(&p[..WORDS]);
        FieldElement {
            width: self.width,
            words,
        }
    }

    fn reduce_small(&self, mut p: u128) -> u64 {
        let w = self.width;
        let mask = (1u128 << w) - 1;
        loop {
            let hi = p >> w;
            if hi == 0 {
                return p as u64;
            }
            p &= mask;
            for &t in &self.taps {
                p ^= hi << t;
            }
        }
    }

    fn reduce_wide(&self, p: &mut [u64; 2 * WORDS]) {
        let w = self.width as usize;
        loop {
            let hi = shr(p, w);
            if hi.iter().all(|&v| v == 0) {
                return;
            }
            for (i, v) in p.iter_mut().enumerate() {
                let lo = i * 64;
                if lo >= w {
                    *v = 0;
                } else if lo + 64 > w {
                    *v &= (1u64 << (w - lo)) - 1;
                }
            }
            for &t in &self.taps {
                xor_shl(p, &hi, t as usize);
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x^{}", self.width)?;
        for &t in &self.taps {
            match t {
                0 => write!(f, " + 1")?,
                1 => write!(f, " + x")?,
                _ => write!(f, " + x^{t}")?,
            }
        }
        Ok(())
    }
}

/// Carry-less 64x64 product as (low, high) words.
#[inline]
fn clmul(a: u64, mut b: u64) -> (u64, u64) {
    let (mut lo, mut hi) = (0u64, 0u64);
    while b != 0 {
        let t = b.trailing_zeros();
        lo ^= a << t;
        if t > 0 {
            hi ^= a >> (64 - t);
        }
        b &= b - 1;
    }
    (lo, hi)
}

fn shr(p: &[u64; 2 * WORDS], bits: usize) -> [u64; 2 * WORDS] {
    let mut out = [0u64; 2 * WORDS];
    let (ws, bs) = (bits / 64, bits % 64);
    for i in 0..2 * WORDS - ws {
        let mut v = p[i + ws] >> bs;
        if bs > 0 && i + ws + 1 < 2 * WORDS {
            v |= p[i + ws + 1] << (64 - bs);
        }
        out[i] = v;
    }
    out
}

fn xor_shl(p: &mut [u64; 2 * WORDS], v: &[u64; 2 * WORDS], bits: usize) {
    let (ws, bs) = (bits / 64, bits % 64);
    for i in (ws..2 * WORDS).rev() {
        let mut x = v[i - ws] << bs;
        if bs > 0 && i > ws {
            x |= v[i - ws - 1] >> (64 - bs);
        }
        p[i] ^= x;
    }
}

fn poly_degree(p: &[u64]) -> Option<usize> {
    p.iter()
        .enumerate()
        .rev()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
}

/// `a mod b` over GF(2)[x]; b must be nonzero.
fn poly_rem(mut a: Vec<u64>, b: &[u64]) -> Vec<u64> {
    let db = poly_degree(b).expect("division by zero polynomial");
    while let Some(da) = poly_degree(&a) {
        if da < db {
            break;
        }
        let shift = da - db;
        let (ws, bs) = (shift / 64, shift % 64);
        for (i, &w) in b.iter().enumerate() {
            if w == 0 {
                continue;
            }
            a[i + ws] ^= w << bs;
            if bs > 0 && i + ws + 1 < a.len() {
                a[i + ws + 1] ^= w >> (64 - bs);
            }
        }
    }
    a
}

fn poly_gcd(mut a: Vec<u64>, mut b: Vec<u64>) -> Vec<u64> {
    let n = a.len().max(b.len());
    a.resize(n, 0);
    b.resize(n, 0);
    while poly_degree(&b).is_some() {
        let r = poly_rem(a, &b);
        a = b;
        b = r;
    }
    a
}

impl FieldElement {
    pub fn zero(width: u32) -> Self {
        assert!((1..=MAX_WIDTH).contains(&width));
        FieldElement {
            width,
            words: [0; WORDS],
        }
    }

    pub fn one(width: u32) -> Self {
        Self::from_u64(width, 1)
    }

    /// The element whose low bits are `value`, truncated to the width.
    pub fn from_u64(width: u32, value: u64) -> Self {
        let mut e = Self::zero(width);
        e.words[0] = if width >= 64 {
            value
        } else {
            value & ((1u64 << width) - 1)
        };
        e
    }

    /// Interprets a bit string of length exactly `width`.
    pub fn from_bits(width: u32, bits: &BitString) -> Result<Self> {
        crate::error::check_len(width as usize, bits.len())?;
        let mut e = Self::zero(width);
        let n = bits.words().len();
        e.words[..n].copy_from_slice(bits.words());
        Ok(e)
    }

    /// Like [`FieldElement::from_bits`] but zero-pads strings shorter than the width.
    pub fn from_bits_padded(width: u32, bits: &BitString) -> Result<Self> {
        if bits.len() > width as usize {
            return Err(Error::LengthMismatch {
                expected: width as usize,
                got: bits.len(),
            });
        }
        let mut e = Self::zero(width);
        let n = bits.words().len();
        e.words[..n].copy_from_slice(bits.words());
        Ok(e)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn to_bits(&self) -> BitString {
        BitString::from_words(&self.words, self.width as usize)
    }

    pub fn to_u64(&self) -> u64 {
        assert!(self.width <= 64);
        self.words[0]
    }

    /// The `b` least significant bits.
    pub fn low_bits(&self, b: usize) -> BitString {
        assert!(b <= self.width as usize);
        BitString::from_words(&self.words, b)
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.width, other.width, "field width mismatch");
        let mut out = *self;
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.width, other.width, "field width mismatch");
        field(self.width).mul(self, other)
    }

    /// Parity of the bitwise AND: the GF(2) inner product of the coefficient vectors.
    pub fn dot(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{})[{}]", self.width, self.to_bits())
    }
}
