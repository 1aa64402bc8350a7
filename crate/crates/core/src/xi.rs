//! The angular-speed profile ξ and its exact partial sums.
//!
//! ξ is evaluated in the log-radius domain `s = ln r`. Inside the band
//! `[2k, 2k + 2)` it is a tent of height `2^-b` with
//! `b = ⌊log₂(⌊s/2⌋ + 1)⌋`: rising on even `⌊s⌋`, falling on odd `⌊s⌋`.
//! Because the plane map adds exactly 2 to `s`, the fractional part of `s`
//! and the parity of `⌊s⌋` never change along an orbit, and the accumulated
//! rotation collapses to `c(t) · Σ 2^-⌊log₂ m⌋` over a run of consecutive
//! `m`. That sum is evaluated block by block in exact dyadic arithmetic.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::Serialize;

use crate::coords::wrap_turns;
use crate::error::{Error, Result};

/// Largest upper index accepted by [`dyadic_block_sum`].
pub const MAX_BLOCK_INDEX: u64 = 1 << 62;

/// Exact value `numerator / 2^exponent`, kept with an odd numerator (or zero
/// over `2^0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DyadicRational {
    numerator: i128,
    exponent: u32,
}

impl DyadicRational {
    pub const ZERO: DyadicRational = DyadicRational {
        numerator: 0,
        exponent: 0,
    };

    pub fn new(numerator: i128, exponent: u32) -> Self {
        if numerator == 0 {
            return Self::ZERO;
        }
        let shift = numerator.trailing_zeros().min(exponent);
        DyadicRational {
            numerator: numerator >> shift,
            exponent: exponent - shift,
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::new(n as i128, 0)
    }

    pub fn numerator(&self) -> i128 {
        self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_integer(&self) -> bool {
        self.exponent == 0
    }

    /// Nearest binary64 value.
    pub fn to_f64(&self) -> f64 {
        scale_pow2(self.numerator as f64, self.exponent)
    }

    /// Splits into `hi + lo` where `hi` is the nearest binary64 value and `lo`
    /// the rounding residual, itself rounded.
    pub fn split(&self) -> (f64, f64) {
        let hi_num = self.numerator as f64;
        let rest = self.numerator - hi_num as i128;
        (
            scale_pow2(hi_num, self.exponent),
            scale_pow2(rest as f64, self.exponent),
        )
    }

    fn aligned(&self, other: &Self) -> Option<(i128, i128, u32)> {
        let e = self.exponent.max(other.exponent);
        let a = self
            .numerator
            .checked_mul(1i128.checked_shl(e - self.exponent)?)?;
        let b = other
            .numerator
            .checked_mul(1i128.checked_shl(e - other.exponent)?)?;
        Some((a, b, e))
    }

    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        let (a, b, e) = self.aligned(other)?;
        Some(Self::new(a.checked_add(b)?, e))
    }
}

fn scale_pow2(x: f64, exponent: u32) -> f64 {
    // two steps keep 2^-exponent representable for exponents past 1022
    let half = exponent / 2;
    x * 2f64.powi(-(half as i32)) * 2f64.powi(-((exponent - half) as i32))
}

impl Add for DyadicRational {
    type Output = DyadicRational;

    /// Panics if the aligned numerators overflow 127 bits.
    fn add(self, rhs: Self) -> Self {
        self.checked_add(&rhs).expect("dyadic rational overflow")
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.aligned(other) {
            Some((a, b, _)) => a.cmp(&b),
            // headroom exhausted: fall back to the sign and f64 magnitude
            None => self.to_f64().total_cmp(&other.to_f64()),
        }
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/2^{}", self.numerator, self.exponent)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Zero,
    Even,
    Odd,
}

/// Which piece of ξ applies at a given log-radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct XiBranch {
    pub parity: Parity,
    /// `⌊log₂(⌊s/2⌋ + 1)⌋`; zero on the `Zero` branch.
    pub block: u32,
}

/// `⌊log₂(⌊s/2⌋ + 1)⌋` for `s > 0`.
fn block_index(s: f64) -> u32 {
    let half = s / 2.0;
    if half < (1u64 << 62) as f64 {
        ((half.floor() as u64) + 1).ilog2()
    } else {
        // ⌊s/2⌋ + 1 rounds to ⌊s/2⌋ here, and ⌊s/2⌋ = s/2 is never 2^m - 1
        ((half.to_bits() >> 52) & 0x7ff) as u32 - 1023
    }
}

pub fn xi_branch(s: f64) -> XiBranch {
    if !(s > 0.0) {
        return XiBranch {
            parity: Parity::Zero,
            block: 0,
        };
    }
    let parity = if s.floor() % 2.0 == 0.0 {
        Parity::Even
    } else {
        Parity::Odd
    };
    XiBranch {
        parity,
        block: block_index(s),
    }
}

/// ξ as a function of `s = ln r`. Returns values in `[0, 1]`; the value 1
/// occurs only at `s = 1` and is the same phase as 0.
pub fn xi_of_s(s: f64) -> f64 {
    let branch = xi_branch(s);
    let t = s - s.floor();
    let c = match branch.parity {
        Parity::Zero => return 0.0,
        Parity::Even => t,
        Parity::Odd => 1.0 - t,
    };
    scale_pow2(c, branch.block)
}

/// ξ as a function of the plane modulus `r ≥ 0`, evaluated from `ln r`
/// with the integer-part expressions taken literally.
pub fn xi_of_r(r: f64) -> f64 {
    if !(r > 1.0) {
        return 0.0;
    }
    let ln_r = r.ln();
    let whole = ln_r.floor();
    let frac = ln_r - whole;
    let denom = ((ln_r / 2.0).floor() + 1.0).log2().floor();
    let numer = if whole % 2.0 == 0.0 { frac } else { 1.0 - frac };
    numer / 2f64.powf(denom)
}

/// Envelope `2^-b` of ξ; zero for `s ≤ 0`.
pub fn xi_bound(s: f64) -> f64 {
    if !(s > 0.0) {
        return 0.0;
    }
    scale_pow2(1.0, block_index(s))
}

/// `Σ_{m=A}^{B} 2^-⌊log₂ m⌋` for any `1 ≤ A ≤ B`, summing whole dyadic
/// blocks `[2^j, 2^{j+1} - 1]` and the partial end blocks.
fn block_sum(a: u64, b: u64) -> DyadicRational {
    debug_assert!(1 <= a && a <= b);
    let top = b.ilog2();
    let mut numerator: i128 = 0;
    for j in a.ilog2()..=top {
        let lo = a.max(1u64 << j);
        let hi = if j == 63 { b } else { b.min((1u64 << (j + 1)) - 1) };
        let count = (hi - lo + 1) as i128;
        numerator += count << (top - j);
    }
    DyadicRational::new(numerator, top)
}

/// Exact `D(A, B) = Σ_{m=A}^{B} 2^-⌊log₂ m⌋` in `O(log B)`.
pub fn dyadic_block_sum(a: u64, b: u64) -> Result<DyadicRational> {
    if a < 1 || a > b || b > MAX_BLOCK_INDEX {
        return Err(Error::Range(format!(
            "block sum needs 1 <= A <= B <= 2^62, got A={a}, B={b}"
        )));
    }
    Ok(block_sum(a, b))
}

/// Closed form of `Σ_k ξ(s0 + 2k)` over `k ∈ [start, start + count)` as
/// `c · D` with the tent slope factor `c`. `None` when every term vanishes.
fn phase_terms(s0: f64, start: i128, count: u64) -> Option<(f64, DyadicRational)> {
    if count == 0 || !s0.is_finite() {
        return None;
    }
    let whole = s0.floor();
    let t = s0 - whole;
    let c = if whole % 2.0 == 0.0 { t } else { 1.0 - t };
    if c == 0.0 {
        return None;
    }
    // s0 ≥ 2^53 has t = 0 and even parity, so c = 0 above; the integer
    // parts below therefore fit comfortably
    let neg_half = (-s0 / 2.0).floor();
    if neg_half >= 1e30 {
        return None;
    }
    // first step with s0 + 2k > 0
    let k_min = neg_half as i128 + 1;
    let last = start + count as i128 - 1;
    let first = start.max(k_min);
    if first > last {
        return None;
    }
    // ⌊(s0 + 2k)/2⌋ + 1 = ⌊s0/2⌋ + k + 1
    let half_floor = (s0 / 2.0).floor() as i128;
    let a = (half_floor + first + 1) as u64;
    let b = (half_floor + last + 1) as u64;
    Some((c, block_sum(a, b)))
}

/// `Σ_{k=0}^{N-1} ξ(s0 + 2k)` in turns, not reduced mod 1.
pub fn phase_sum(s0: f64, n: u64) -> f64 {
    match phase_terms(s0, 0, n) {
        Some((c, d)) => {
            let (hi, lo) = d.split();
            c.mul_add(hi, c * lo)
        }
        None => 0.0,
    }
}

/// `c · D mod 1`, with the product carried in two terms so the fractional
/// part keeps full precision even when `c · D` is large.
fn product_turns(c: f64, d: DyadicRational) -> f64 {
    let (hi, lo) = d.split();
    let p = c * hi;
    let err = c.mul_add(hi, -p);
    wrap_turns((p - p.floor()) + (err + c * lo))
}

/// [`phase_sum`] reduced mod 1 without losing the fractional digits.
pub fn phase_sum_turns(s0: f64, n: u64) -> f64 {
    match phase_terms(s0, 0, n) {
        Some((c, d)) => product_turns(c, d),
        None => 0.0,
    }
}

/// `Σ_{k=1}^{n} ξ(s0 - 2k) mod 1`, the rotation undone by `n` inverse steps.
pub fn rewind_phase_turns(s0: f64, n: u64) -> f64 {
    match phase_terms(s0, -(n as i128), n) {
        Some((c, d)) => product_turns(c, d),
        None => 0.0,
    }
}

/// `(k · x) mod 1` for an integer `k`, exact up to one rounding of the
/// compensated sum.
pub fn scaled_turns(k: u64, x: f64) -> f64 {
    product_turns(x, DyadicRational::new(k as i128, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_block_sum(a: u64, b: u64) -> f64 {
        (a..=b).map(|m| 1.0 / (1u64 << m.ilog2()) as f64).sum()
    }

    fn brute_phase(s0: f64, n: u64) -> f64 {
        // real-arithmetic orbit: s0 + 2k with integer k
        (0..n).map(|k| xi_of_s(s0 + 2.0 * k as f64)).sum()
    }

    #[test]
    fn xi_examples() {
        assert_eq!(xi_of_s(-1.0), 0.0);
        assert_eq!(xi_of_s(0.0), 0.0);
        assert_eq!(xi_of_s(2.5), 0.25);
        assert_eq!(xi_of_s(3.5), 0.25);
        assert_eq!(xi_of_s(1.0), 1.0);
        assert_eq!(xi_of_s(0.5), 0.5);
    }

    #[test]
    fn xi_of_r_examples() {
        assert_eq!(xi_of_r(1.0), 0.0);
        assert_eq!(xi_of_r(0.0), 0.0);
        assert_eq!(xi_of_r(0.5), 0.0);
        assert!((xi_of_r(2.5f64.exp()) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn xi_of_r_agrees_with_xi_of_s() {
        for i in 1..4000 {
            let s = i as f64 * 0.0173 + 0.001;
            let diff = (xi_of_r(s.exp()) - xi_of_s(s)).abs();
            assert!(diff < 1e-12, "s={s}: {diff}");
        }
    }

    #[test]
    fn bound_examples() {
        assert_eq!(xi_bound(0.5), 1.0);
        assert_eq!(xi_bound(2.5), 0.5);
        assert_eq!(xi_bound(1022.0), 1.0 / 512.0);
        assert_eq!(xi_bound(-3.0), 0.0);
        assert!(xi_bound(1e300) > 0.0);
    }

    #[test]
    fn branches() {
        assert_eq!(xi_branch(-0.5).parity, Parity::Zero);
        assert_eq!(
            xi_branch(2.5),
            XiBranch {
                parity: Parity::Even,
                block: 1
            }
        );
        assert_eq!(
            xi_branch(3.5),
            XiBranch {
                parity: Parity::Odd,
                block: 1
            }
        );
        // ⌊1e20/2⌋ + 1 ≈ 5e19, log₂ ≈ 65.4
        assert_eq!(xi_branch(1e20).block, 65);
        assert_eq!(xi_branch(2f64.powi(100)).block, 99);
    }

    #[test]
    fn seam_continuity() {
        let delta = 1e-9;
        for k in 1..=60 {
            let s = k as f64;
            for side in [s - delta, s + delta] {
                let jump = (xi_of_s(side) - xi_of_s(s)).abs();
                assert!(jump <= 2e-9 + 1e-15, "k={k}: {jump}");
            }
        }
    }

    #[test]
    fn block_sum_examples() {
        assert_eq!(dyadic_block_sum(1, 1).unwrap(), DyadicRational::from_integer(1));
        assert_eq!(dyadic_block_sum(1, 7).unwrap(), DyadicRational::from_integer(3));
        assert_eq!(dyadic_block_sum(2, 4).unwrap(), DyadicRational::new(5, 2));
        assert!(dyadic_block_sum(0, 3).is_err());
        assert!(dyadic_block_sum(5, 3).is_err());
        assert!(dyadic_block_sum(1, MAX_BLOCK_INDEX + 1).is_err());
    }

    #[test]
    fn block_sum_matches_brute_force() {
        for a in 1..70u64 {
            for b in a..140u64 {
                let exact = dyadic_block_sum(a, b).unwrap().to_f64();
                assert!((exact - brute_block_sum(a, b)).abs() < 1e-12, "{a}..{b}");
            }
        }
    }

    #[test]
    fn dyadic_telescoping_is_exact() {
        for n in 1..=60u32 {
            let d = dyadic_block_sum(1, (1u64 << n) - 1).unwrap();
            assert_eq!(d, DyadicRational::from_integer(n as i64));
        }
        // the full top block to 2^62 adds one extra 2^-62
        let top = dyadic_block_sum(1, MAX_BLOCK_INDEX).unwrap();
        assert_eq!(top, DyadicRational::new((62i128 << 62) + 1, 62));
    }

    #[test]
    fn dyadic_arithmetic() {
        let a = DyadicRational::new(6, 3);
        assert_eq!((a.numerator(), a.exponent()), (3, 2));
        assert_eq!(a + DyadicRational::new(1, 2), DyadicRational::from_integer(1));
        assert!(DyadicRational::new(1, 1) < DyadicRational::new(3, 2));
        assert_eq!(DyadicRational::new(0, 9), DyadicRational::ZERO);
        assert_eq!(format!("{}", DyadicRational::new(5, 2)), "5/2^2");
        let big = DyadicRational::new((1i128 << 100) + 1, 0);
        let (hi, lo) = big.split();
        assert_eq!(hi, 2f64.powi(100));
        assert_eq!(lo, 1.0);
    }

    #[test]
    fn phase_sum_examples() {
        assert_eq!(phase_sum(1.7, 0), 0.0);
        assert!((phase_sum(0.3, 7) - 0.9).abs() < 1e-15);
        assert!((phase_sum(-3.5, 4) - 0.75).abs() < 1e-15);
        assert_eq!(phase_sum(-10.0, 5), 0.0);
        assert_eq!(phase_sum(1e300, 1000), 0.0);
    }

    #[test]
    fn phase_sum_matches_brute_force_grid() {
        let starts = [-2.9, -2.0, -0.5, 0.0, 0.3, 1.0, 1.5, 2.0, 2.75, 4.999, 5.5];
        for &s0 in &starts {
            for n in (0..2000).chain([4095, 4096, 10_000, 100_000]) {
                let closed = phase_sum(s0, n);
                let brute = brute_phase(s0, n);
                assert!(
                    (closed - brute).abs() < 1e-9,
                    "s0={s0} n={n}: {closed} vs {brute}"
                );
            }
        }
    }

    #[test]
    fn phase_turns_matches_unreduced() {
        for n in [1u64, 7, 100, 12345, 1 << 40] {
            let a = wrap_turns(phase_sum(0.37, n));
            let b = phase_sum_turns(0.37, n);
            let gap = crate::coords::turn_difference(a, b).abs();
            assert!(gap < 1e-12, "n={n}: {gap}");
        }
    }

    #[test]
    fn rewind_phase_matches_brute_force() {
        for &s0 in &[-1.0, 0.4, 3.3, 9.9, 20.0] {
            for n in 0..40u64 {
                let brute: f64 = (1..=n).map(|k| xi_of_s(s0 - 2.0 * k as f64)).sum();
                let gap = crate::coords::turn_difference(wrap_turns(brute), rewind_phase_turns(s0, n));
                assert!(gap.abs() < 1e-12, "s0={s0} n={n}");
            }
        }
    }

    #[test]
    fn scaled_turns_is_compensated() {
        // 60 · fl(0.9) = 54 + 1.33e-15 exactly
        let t = scaled_turns(60, 0.9);
        assert!((t - 1.332_267_629_550_187_8e-15).abs() < 1e-28);
    }

    proptest! {
        #[test]
        fn envelope(s in -50.0f64..5000.0) {
            let x = xi_of_s(s);
            prop_assert!(0.0 <= x && x <= xi_bound(s) && xi_bound(s) <= 1.0);
        }

        #[test]
        fn oracle_equivalence(s0 in -3.0f64..6.0, n in 0u64..20_000) {
            prop_assert!((phase_sum(s0, n) - brute_phase(s0, n)).abs() < 1e-9);
        }

        #[test]
        fn shift_identity(s0 in -5.0f64..50.0, n in 1u64..1_000_000) {
            let lhs = phase_sum(s0, n);
            let rhs = xi_of_s(s0) + phase_sum(s0 + 2.0, n - 1);
            prop_assert!((lhs - rhs).abs() < 1e-9);
        }

        #[test]
        fn block_sum_splits(a in 1u64..1_000_000, len in 0u64..1_000_000, cut in 0u64..1_000_000) {
            let b = a + len;
            let m = a + cut % (len + 1);
            let whole = dyadic_block_sum(a, b).unwrap();
            let left = dyadic_block_sum(a, m).unwrap();
            let right = if m < b { dyadic_block_sum(m + 1, b).unwrap() } else { DyadicRational::ZERO };
            prop_assert_eq!(whole, left + right);
        }
    }
}
