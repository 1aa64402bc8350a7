//! Continued fractions and return times of the rotation by `α`.
//!
//! For a pair of points on the positive axis with log-radii `s_x, s_y` the
//! angle between their orbits at time `2ⁿ - 1` is `n·α mod 1` with
//! `α = s_x - s_y`. Proximal times are the `n` where `n·α` is close to an
//! integer (convergent denominators); distal times are where it is close to
//! a half-integer (found by a record scan).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::xi::scaled_turns;

pub const MAX_DEPTH: usize = 40;

/// Largest `n` a return-time scan will visit.
pub const SCAN_CAP: u64 = 10_000_000;

/// An expansion step that still has this much relative precision left but
/// cannot tell its remainder from zero is taken as a genuine rational end.
const HALF_MANTISSA: f64 = 1.0 / (1u64 << 26) as f64;

const SCAN_CHUNK: u64 = 1 << 16;

/// Why a continued-fraction expansion stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionEnd {
    /// The remainder vanished within the input uncertainty while plenty of
    /// precision remained: the value is rational as far as binary64 can tell.
    Rational,
    /// The error bound on the next complete quotient straddles an integer.
    PrecisionExhausted,
    DepthReached,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuedFraction {
    pub quotients: Vec<i64>,
    pub end: ExpansionEnd,
}

/// Expansion of `alpha` assuming it is only known to half an ulp.
pub fn continued_fraction(alpha: f64, depth: usize) -> Result<ContinuedFraction> {
    let ulp = f64::from_bits(alpha.abs().to_bits() + 1) - alpha.abs();
    continued_fraction_within(alpha, ulp / 2.0, depth)
}

/// Expansion of a value known only to `±uncertainty`.
///
/// Every emitted partial quotient is correct for all values in that
/// interval: the absolute error of each complete quotient is propagated
/// through `x ↦ 1/(x - ⌊x⌋)` and the expansion stops as soon as the floor
/// becomes ambiguous.
pub fn continued_fraction_within(alpha: f64, uncertainty: f64, depth: usize) -> Result<ContinuedFraction> {
    if !alpha.is_finite() {
        return Err(Error::Domain {
            what: "rotation number",
            value: alpha,
        });
    }
    if depth == 0 || depth > MAX_DEPTH {
        return Err(Error::Range(format!(
            "depth must be in 1..={MAX_DEPTH}, got {depth}"
        )));
    }
    let mut quotients = Vec::with_capacity(depth);
    let mut x = alpha;
    let mut err = uncertainty.max(f64::MIN_POSITIVE);
    let end = loop {
        if quotients.len() == depth {
            break ExpansionEnd::DepthReached;
        }
        let a = x.floor();
        let r = x - a;
        if r <= err || 1.0 - r <= err {
            if err <= HALF_MANTISSA * x.abs().max(1.0) {
                quotients.push(if r <= err { a } else { a + 1.0 } as i64);
                break ExpansionEnd::Rational;
            }
            break ExpansionEnd::PrecisionExhausted;
        }
        if a.abs() >= (1u64 << 53) as f64 {
            break ExpansionEnd::PrecisionExhausted;
        }
        quotients.push(a as i64);
        let next = 1.0 / r;
        err = err / (r * (r - err)) + next * f64::EPSILON;
        x = next;
    };
    Ok(ContinuedFraction { quotients, end })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Convergent {
    pub p: i64,
    pub q: i64,
}

impl Convergent {
    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

/// Convergents by the three-term recurrence. The flag is set when the
/// sequence was truncated because a numerator or denominator left `i64`.
pub fn convergents(quotients: &[i64]) -> Result<(Vec<Convergent>, bool)> {
    if quotients.is_empty() {
        return Err(Error::Range(
            "convergents need at least one partial quotient".into(),
        ));
    }
    let mut out = Vec::with_capacity(quotients.len());
    let (mut p_prev, mut p) = (0i64, 1i64);
    let (mut q_prev, mut q) = (1i64, 0i64);
    for &a in quotients {
        let next = a
            .checked_mul(p)
            .and_then(|x| x.checked_add(p_prev))
            .zip(a.checked_mul(q).and_then(|x| x.checked_add(q_prev)));
        let Some((p_next, q_next)) = next else {
            return Ok((out, true));
        };
        (p_prev, p) = (p, p_next);
        (q_prev, q) = (q, q_next);
        out.push(Convergent { p, q });
    }
    Ok((out, false))
}

/// An irrational rotation number together with its expansion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RotationNumber {
    pub alpha: f64,
    pub uncertainty: f64,
    pub partial_quotients: Vec<i64>,
    pub convergents: Vec<Convergent>,
    pub end: ExpansionEnd,
    pub overflowed: bool,
}

impl RotationNumber {
    pub fn new(alpha: f64) -> Result<Self> {
        let ulp = f64::from_bits(alpha.abs().to_bits() + 1) - alpha.abs();
        Self::within(alpha, ulp / 2.0)
    }

    /// Rotation number known to `±uncertainty`, expanded to [`MAX_DEPTH`].
    pub fn within(alpha: f64, uncertainty: f64) -> Result<Self> {
        let cf = continued_fraction_within(alpha, uncertainty, MAX_DEPTH)?;
        let (convergents, overflowed) = convergents(&cf.quotients)?;
        Ok(RotationNumber {
            alpha,
            uncertainty,
            partial_quotients: cf.quotients,
            convergents,
            end: cf.end,
            overflowed,
        })
    }

    /// Rational within the working precision.
    pub fn is_degenerate(&self) -> bool {
        self.end == ExpansionEnd::Rational
    }

    /// Convergent denominators with the repeated leading 1 removed.
    pub fn denominators(&self) -> Vec<u64> {
        let mut out: Vec<u64> = Vec::with_capacity(self.convergents.len());
        for c in &self.convergents {
            let q = c.q as u64;
            if out.last().is_none_or(|&last| q > last) {
                out.push(q);
            }
        }
        out
    }
}

/// Distance from `n·α` to the nearest integer.
pub fn residual_near_zero(alpha: f64, n: u64) -> f64 {
    let f = scaled_turns(n, alpha);
    f.min(1.0 - f)
}

/// Distance from `n·α` to the nearest half-integer.
pub fn residual_near_half(alpha: f64, n: u64) -> f64 {
    (scaled_turns(n, alpha) - 0.5).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReturnTime {
    pub n: u64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReturnTimes {
    /// 0 or 1/2.
    pub target: f64,
    pub entries: Vec<ReturnTime>,
    /// Fewer entries than requested.
    pub short: bool,
}

impl ReturnTimes {
    pub fn best(&self) -> Option<ReturnTime> {
        self.entries
            .iter()
            .copied()
            .min_by(|a, b| a.residual.total_cmp(&b.residual))
    }
}

/// Successive strict minima of `residual(n)` over `n ∈ [lo, hi]` that beat
/// `best`. Chunks are scanned independently and merged in order, so the
/// result does not depend on the execution mode.
fn record_scan<F>(mode: Execution, lo: u64, hi: u64, mut best: f64, residual: F) -> Vec<ReturnTime>
where
    F: Fn(u64) -> f64 + Sync + Send,
{
    if lo > hi {
        return Vec::new();
    }
    let local = exec::map_chunks(mode, hi - lo + 1, SCAN_CHUNK, |start, end| {
        let mut floor = f64::INFINITY;
        let mut found = Vec::new();
        for n in lo + start..lo + end {
            let r = residual(n);
            if r < floor {
                floor = r;
                found.push(ReturnTime { n, residual: r });
                if r == 0.0 {
                    break;
                }
            }
        }
        found
    });
    let mut out = Vec::new();
    for chunk in local {
        for rt in chunk {
            if rt.residual < best {
                best = rt.residual;
                out.push(rt);
            }
        }
        if best == 0.0 {
            break;
        }
    }
    out
}

fn keep_tail(mut entries: Vec<ReturnTime>, count: usize) -> Vec<ReturnTime> {
    if entries.len() > count {
        entries.drain(..entries.len() - count);
    }
    entries
}

/// Proximal return times `m_k`: the convergent denominators `q_k ≤ cap`,
/// whose residuals `‖q_k α‖` shrink below `1/q_{k+1}`.
///
/// When the expansion ran out of precision before reaching `cap`, the
/// remaining best approximations are found by a record scan up to `cap`.
/// The last `count` entries (the best ones) are returned.
pub fn return_times_near_zero(rn: &RotationNumber, count: usize, cap: u64) -> Result<ReturnTimes> {
    return_times_near_zero_with(Execution::default(), rn, count, cap)
}

pub fn return_times_near_zero_with(
    mode: Execution,
    rn: &RotationNumber,
    count: usize,
    cap: u64,
) -> Result<ReturnTimes> {
    let mut entries: Vec<ReturnTime> = rn
        .denominators()
        .into_iter()
        .filter(|&q| q >= 1 && q <= cap)
        .map(|q| ReturnTime {
            n: q,
            residual: residual_near_zero(rn.alpha, q),
        })
        .collect();
    let last = entries.last().map_or(0, |e| e.n);
    let exhausted = rn.end != ExpansionEnd::Rational || rn.overflowed;
    if exhausted && entries.len() < count && last < cap && rn.end != ExpansionEnd::DepthReached {
        if cap > SCAN_CAP {
            return Err(Error::Range(format!("scan cap {cap} exceeds {SCAN_CAP}")));
        }
        let best = entries.last().map_or(f64::INFINITY, |e| e.residual);
        entries.extend(record_scan(mode, last + 1, cap, best, |n| {
            residual_near_zero(rn.alpha, n)
        }));
    }
    let short = entries.len() < count;
    Ok(ReturnTimes {
        target: 0.0,
        entries: keep_tail(entries, count),
        short,
    })
}

/// Distal return times `n_k`: successive record-breakers of
/// `|frac(n·α) - 1/2|` over `1 ≤ n ≤ cap`, keeping the last `count`.
pub fn return_times_near_half(rn: &RotationNumber, count: usize, cap: u64) -> Result<ReturnTimes> {
    return_times_near_half_with(Execution::default(), rn, count, cap)
}

pub fn return_times_near_half_with(
    mode: Execution,
    rn: &RotationNumber,
    count: usize,
    cap: u64,
) -> Result<ReturnTimes> {
    if cap > SCAN_CAP {
        return Err(Error::Range(format!("scan cap {cap} exceeds {SCAN_CAP}")));
    }
    let entries = record_scan(mode, 1, cap, f64::INFINITY, |n| residual_near_half(rn.alpha, n));
    let short = entries.len() < 2;
    Ok(ReturnTimes {
        target: 0.5,
        entries: keep_tail(entries, count),
        short,
    })
}
