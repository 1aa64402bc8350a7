//! The plane map `g`, the disk map `f = h⁻¹ ∘ g ∘ h` and their inverses.
//!
//! Stepwise iteration is the reference path. [`fast_forward`] and
//! [`rewind`] jump `N` steps at once through the closed-form phase sums in
//! [`crate::xi`], and [`dyadic_fast_forward`] covers the times `2ⁿ - 1` from
//! a start with log-radius in `(0, 1)`, where the accumulated rotation is
//! exactly `n · s0` turns.

use serde::Serialize;

use crate::coords::{
    h, h_inv, logistic_radius, logit_radius, to_disk, to_logpolar, wrap_turns, DiskPoint, LogPolar,
    PlanePoint,
};
use crate::error::{Error, Result};
use crate::xi::{phase_sum_turns, rewind_phase_turns, scaled_turns, xi_of_r, xi_of_s};

/// Longest orbit [`iterate`] will walk step by step.
pub const ITERATION_CAP: u64 = 10_000_000;

/// Largest step count accepted by [`fast_forward`] and [`rewind`].
pub const FAST_FORWARD_CAP: u64 = 1 << 62;

/// Largest `n` for the dyadic time `2ⁿ - 1`; `s0 + 2(2ⁿ - 1)` must stay
/// finite in binary64.
pub const DYADIC_EXPONENT_CAP: u32 = 1000;

const E2: f64 = 7.389_056_098_930_65;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

/// One step of `g` (or `g⁻¹`) on the log-polar pair `(s, θ)`.
pub fn g_step(s: f64, theta: f64, dir: Direction) -> (f64, f64) {
    match dir {
        Direction::Forward => (s + 2.0, wrap_turns(theta + xi_of_s(s))),
        Direction::Backward => {
            let prev = s - 2.0;
            (prev, wrap_turns(theta - xi_of_s(prev)))
        }
    }
}

/// One step of `g` on plane coordinates, using the modulus directly.
pub fn g_plane(w: PlanePoint, dir: Direction) -> PlanePoint {
    if w.r() == 0.0 {
        return w;
    }
    let (r, theta) = match dir {
        Direction::Forward => (E2 * w.r(), w.theta() + xi_of_r(w.r())),
        Direction::Backward => {
            let r = w.r() / E2;
            (r, w.theta() - xi_of_r(r))
        }
    };
    PlanePoint::new(r, theta).expect("finite plane point")
}

/// One step of `f` (or `f⁻¹`) on a log-polar point. The origin and the
/// boundary circle are fixed pointwise.
pub fn step(p: LogPolar, dir: Direction) -> LogPolar {
    match p {
        LogPolar::Interior { s, theta } => {
            let (s, theta) = g_step(s, theta, dir);
            LogPolar::Interior { s, theta }
        }
        fixed => fixed,
    }
}

pub fn f_step(z: DiskPoint, dir: Direction) -> DiskPoint {
    if !z.is_interior() {
        return z;
    }
    to_disk(step(to_logpolar(z), dir))
}

/// `f` from its closed-form interior expression
/// `e² z / (e²|z| - |z| + 1) · e^{2πi ξ(|z| / (1 - |z|))}`, and the matching
/// expression for `f⁻¹`.
pub fn f_explicit(z: DiskPoint, dir: Direction) -> DiskPoint {
    if !z.is_interior() {
        return z;
    }
    let (rho, gap) = (z.rho(), z.complement());
    match dir {
        Direction::Forward => {
            let den = E2 * rho + gap;
            DiskPoint::from_radial(E2 * rho / den, gap / den, z.theta() + xi_of_r(rho / gap))
        }
        Direction::Backward => {
            let den = E2 * gap + rho;
            DiskPoint::from_radial(rho / den, E2 * gap / den, z.theta() - xi_of_r(rho / (E2 * gap)))
        }
    }
}

/// `f` as the literal composite `h⁻¹ ∘ g ∘ h`.
pub fn f_conjugate(z: DiskPoint, dir: Direction) -> DiskPoint {
    if !z.is_interior() {
        return z;
    }
    h_inv(g_plane(h(z).expect("interior point"), dir))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitSample {
    pub time: u64,
    pub point: LogPolar,
    pub disk_point: DiskPoint,
}

impl OrbitSample {
    fn new(time: u64, point: LogPolar) -> Self {
        OrbitSample {
            time,
            point,
            disk_point: to_disk(point),
        }
    }
}

/// Walks `n` steps and keeps every `stride`-th sample plus the endpoint.
pub fn iterate(p: LogPolar, n: u64, dir: Direction, stride: u64) -> Result<Vec<OrbitSample>> {
    if n > ITERATION_CAP {
        return Err(Error::IterationCap {
            requested: n,
            cap: ITERATION_CAP,
        });
    }
    let stride = stride.max(1);
    let mut out = Vec::with_capacity((n / stride + 2) as usize);
    out.push(OrbitSample::new(0, p));
    let mut cur = p;
    for t in 1..=n {
        cur = step(cur, dir);
        if t % stride == 0 || t == n {
            out.push(OrbitSample::new(t, cur));
        }
    }
    Ok(out)
}

/// Endpoint of [`iterate`] without collecting samples.
pub fn iterate_endpoint(p: LogPolar, n: u64, dir: Direction) -> Result<LogPolar> {
    if n > ITERATION_CAP {
        return Err(Error::IterationCap {
            requested: n,
            cap: ITERATION_CAP,
        });
    }
    Ok((0..n).fold(p, |cur, _| step(cur, dir)))
}

/// `fⁿ` in `O(log N)`: the log-radius advances by `2N` and the angle by the
/// closed-form sum of `ξ` along the orbit.
pub fn fast_forward(p: LogPolar, n: u64) -> Result<LogPolar> {
    if n > FAST_FORWARD_CAP {
        return Err(Error::Range(format!(
            "fast_forward supports at most 2^62 steps, got {n}"
        )));
    }
    match p {
        LogPolar::Interior { s, theta } => {
            let s_end = s + 2.0 * n as f64;
            if !s_end.is_finite() {
                return Err(Error::Overflow(format!("s0 = {s} + 2·{n} is not representable")));
            }
            Ok(LogPolar::Interior {
                s: s_end,
                theta: wrap_turns(theta + phase_sum_turns(s, n)),
            })
        }
        fixed => Ok(fixed),
    }
}

/// `f⁻ⁿ` in `O(log N)`.
pub fn rewind(p: LogPolar, n: u64) -> Result<LogPolar> {
    if n > FAST_FORWARD_CAP {
        return Err(Error::Range(format!(
            "rewind supports at most 2^62 steps, got {n}"
        )));
    }
    match p {
        LogPolar::Interior { s, theta } => {
            let s_end = s - 2.0 * n as f64;
            if !s_end.is_finite() {
                return Err(Error::Overflow(format!("s0 = {s} - 2·{n} is not representable")));
            }
            Ok(LogPolar::Interior {
                s: s_end,
                theta: wrap_turns(theta - rewind_phase_turns(s, n)),
            })
        }
        fixed => Ok(fixed),
    }
}

/// `f^{2ⁿ-1}` for a start with log-radius `s0 ∈ (0, 1)`.
///
/// Every block of times `[2^j, 2^{j+1})` contributes exactly `s0` turns, so
/// the rotation is `n · s0` with no block sums at all.
pub fn dyadic_fast_forward(s0: f64, theta0: f64, n: u32) -> Result<LogPolar> {
    if !(s0 > 0.0 && s0 < 1.0) {
        return Err(Error::Domain {
            what: "dyadic start log-radius",
            value: s0,
        });
    }
    if n > DYADIC_EXPONENT_CAP {
        return Err(Error::Overflow(format!(
            "exponent {n} exceeds {DYADIC_EXPONENT_CAP}; s0 + 2(2^n - 1) leaves binary64"
        )));
    }
    let span = 2f64.powi(n as i32 + 1) - 2.0;
    LogPolar::interior(s0 + span, theta0 + scaled_turns(n as u64, s0))
}

/// `|f⁻ⁿ(z)|`, which decreases strictly to 0 for interior `z`.
pub fn backward_orbit_modulus(z: DiskPoint, n: u64) -> Result<f64> {
    let s = logit_radius(z.rho())?;
    if n == 0 {
        return Ok(z.rho());
    }
    Ok(logistic_radius(s - 2.0 * n as f64))
}
