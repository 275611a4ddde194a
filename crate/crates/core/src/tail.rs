//! Binomial probabilities in log space, windowed around the bulk of the mass.

use statrs::function::gamma::ln_gamma;

/// Terms this far (in natural log) below the running maximum are dropped.
const CUTOFF: f64 = 745.0;

/// `ln C(n, i) + i ln p + (n - i) ln(1 - p)`.
pub fn ln_pmf(n: u64, i: u64, p: f64) -> f64 {
    if i > n {
        return f64::NEG_INFINITY;
    }
    if p <= 0.0 {
        return if i == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if p >= 1.0 {
        return if i == n { 0.0 } else { f64::NEG_INFINITY };
    }
    let (nf, kf) = (n as f64, i as f64);
    ln_gamma(nf + 1.0) - ln_gamma(kf + 1.0) - ln_gamma(nf - kf + 1.0)
        + kf * p.ln()
        + (nf - kf) * (1.0 - p).ln()
}

fn mode(n: u64, p: f64) -> u64 {
    (((n + 1) as f64 * p).floor() as u64).min(n)
}

/// Sums pmf(i) for i in `range` (inclusive), walking outward from the end
/// nearest the mode with the ratio recursion; returns ln of the sum.
fn ln_sum(n: u64, p: f64, lo: u64, hi: u64) -> f64 {
    if lo > hi || lo > n {
        return f64::NEG_INFINITY;
    }
    let hi = hi.min(n);
    if p <= 0.0 || p >= 1.0 {
        let at = if p <= 0.0 { 0 } else { n };
        return if (lo..=hi).contains(&at) { 0.0 } else { f64::NEG_INFINITY };
    }
    let m = mode(n, p).clamp(lo, hi);
    let lm = ln_pmf(n, m, p);
    let odds = p / (1.0 - p);
    let mut sum = 1.0f64;
    // upward
    let mut rel = 0.0f64;
    let mut i = m;
    while i < hi {
        rel += ((n - i) as f64 / (i + 1) as f64 * odds).ln();
        i += 1;
        if rel < -CUTOFF {
            break;
        }
        sum += rel.exp();
    }
    // downward
    let mut rel = 0.0f64;
    let mut i = m;
    while i > lo {
        rel += (i as f64 / (n - i + 1) as f64 / odds).ln();
        i -= 1;
        if rel < -CUTOFF {
            break;
        }
        sum += rel.exp();
    }
    lm + sum.ln()
}

/// `P[Bin(n, p) > t]`.
pub fn upper_tail(n: u64, p: f64, t: u64) -> f64 {
    if t >= n {
        return 0.0;
    }
    if (t as f64) < n as f64 * p {
        (1.0 - ln_sum(n, p, 0, t).exp()).max(0.0)
    } else {
        ln_sum(n, p, t + 1, n).exp()
    }
}

/// `P[Bin(n, p) <= t]`.
pub fn cdf(n: u64, p: f64, t: u64) -> f64 {
    if t >= n {
        return 1.0;
    }
    if (t as f64) < n as f64 * p {
        ln_sum(n, p, 0, t).exp()
    } else {
        (1.0 - ln_sum(n, p, t + 1, n).exp()).max(0.0)
    }
}

/// Smallest `t` with `P[Bin(n, p) > t] <= target`.
pub fn upper_quantile(n: u64, p: f64, target: f64) -> u64 {
    if target <= 0.0 {
        return n;
    }
    let (mut lo, mut hi) = (0u64, n);
    if upper_tail(n, p, 0) <= target {
        return 0;
    }
    // invariant: tail(lo) > target, tail(hi) <= target
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if upper_tail(n, p, mid) <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `P[A + B <= t]` for independent `A ~ Bin(na, pa)`, `B ~ Bin(nb, pb)`.
pub fn convolved_cdf(na: u64, pa: f64, nb: u64, pb: f64, t: u64) -> f64 {
    let top = na.min(t);
    let ma = mode(na, pa).min(top);
    let spread = (40.0 * (na as f64 * pa * (1.0 - pa)).sqrt()) as u64 + 10;
    let a_lo = ma.saturating_sub(spread);
    let a_hi = (ma + spread).min(top);
    let degenerate_b = pb <= 0.0 || pb >= 1.0;
    // B's CDF is carried upward as i descends, one pmf term per step
    let j0 = t - a_hi;
    let mut fb = cdf(nb, pb, j0);
    let mut lpb = ln_pmf(nb, j0, pb);
    let odds_b = pb / (1.0 - pb);
    let mut total = 0.0f64;
    for i in (a_lo..=a_hi).rev() {
        let j = t - i;
        if j > j0 {
            if degenerate_b || j > nb {
                fb = cdf(nb, pb, j);
            } else {
                lpb += ((nb - j + 1) as f64 / j as f64 * odds_b).ln();
                fb = (fb + lpb.exp()).min(1.0);
            }
        }
        let la = ln_pmf(na, i, pa);
        if la > -CUTOFF {
            total += la.exp() * fb;
        }
    }
    total.min(1.0)
}
