//! Point representations on the closed unit disk and on the plane.
//!
//! Angles are kept in turns (one turn is 2π radians) and reduced mod 1.
//! The conjugacy `h(z) = z / (1 - |z|)` only acts on the modulus, so in
//! log-polar form it is the logit `s = ln(ρ / (1 - ρ))` and its inverse is
//! the logistic function. Orbits live in [`LogPolar`] coordinates, where the
//! plane map multiplies the modulus by e² and therefore just adds 2 to `s`.

use std::cmp::Ordering;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Above this log-radius both points sit within e^-40 of the boundary and the
/// chord between them is computed from angles alone.
pub const ASYMPTOTIC_LOG_RADIUS: f64 = 40.0;

/// Reduces an angle in turns to `[0, 1)`.
pub fn wrap_turns(x: f64) -> f64 {
    let w = x.rem_euclid(1.0);
    // rem_euclid can round up to exactly 1 for tiny negative inputs
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

/// Signed difference `a - b` of two angles, folded into `[-1/2, 1/2]`.
pub fn turn_difference(a: f64, b: f64) -> f64 {
    let d = a - b;
    d - d.round()
}

/// Point of the closed unit disk, radius `rho` and angle in turns.
///
/// The complement `1 - rho` is stored alongside the radius so points close
/// to the boundary keep their full relative precision.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiskPoint {
    rho: f64,
    theta: f64,
    #[serde(skip)]
    gap: f64,
}

impl PartialEq for DiskPoint {
    fn eq(&self, other: &Self) -> bool {
        self.rho == other.rho && self.gap == other.gap && self.theta == other.theta
    }
}

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint {
        rho: 0.0,
        theta: 0.0,
        gap: 1.0,
    };

    pub fn new(rho: f64, theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::Domain {
                what: "disk radius",
                value: rho,
            });
        }
        if !theta.is_finite() {
            return Err(Error::Domain {
                what: "angle",
                value: theta,
            });
        }
        Ok(Self::from_parts(rho, theta))
    }

    /// Boundary point `e^{2πiθ}`.
    pub fn boundary(theta: f64) -> Self {
        Self::from_parts(1.0, theta)
    }

    fn from_parts(rho: f64, theta: f64) -> Self {
        Self::from_radial(rho, 1.0 - rho, theta)
    }

    /// Radius given together with its complement `1 - rho`.
    pub(crate) fn from_radial(rho: f64, gap: f64, theta: f64) -> Self {
        let theta = if rho == 0.0 { 0.0 } else { wrap_turns(theta) };
        DiskPoint { rho, theta, gap }
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `1 - rho`, accurate even when `rho` rounds to 1.
    pub fn complement(&self) -> f64 {
        self.gap
    }

    pub fn is_interior(&self) -> bool {
        self.rho > 0.0 && self.gap > 0.0
    }
}

/// Point of the complex plane in polar form, modulus `r` and angle in turns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanePoint {
    r: f64,
    theta: f64,
}

impl PlanePoint {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r >= 0.0) {
            return Err(Error::Domain {
                what: "plane modulus",
                value: r,
            });
        }
        if !theta.is_finite() {
            return Err(Error::Domain {
                what: "angle",
                value: theta,
            });
        }
        let theta = if r == 0.0 { 0.0 } else { wrap_turns(theta) };
        Ok(PlanePoint { r, theta })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Conjugated coordinates of a disk point.
///
/// `Interior` carries `s = ln|h(z)|`, which is unbounded in both directions;
/// the origin and the boundary circle are kept as tags rather than as
/// infinite values of `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LogPolar {
    Origin,
    Interior { s: f64, theta: f64 },
    Boundary { theta: f64 },
}

impl LogPolar {
    /// Interior point with the angle reduced mod 1.
    pub fn interior(s: f64, theta: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::Domain {
                what: "log-radius",
                value: s,
            });
        }
        if !theta.is_finite() {
            return Err(Error::Domain {
                what: "angle",
                value: theta,
            });
        }
        Ok(LogPolar::Interior {
            s,
            theta: wrap_turns(theta),
        })
    }

    pub fn theta(&self) -> f64 {
        match *self {
            LogPolar::Origin => 0.0,
            LogPolar::Interior { theta, .. } | LogPolar::Boundary { theta } => theta,
        }
    }

    /// Log-radius with the sentinels mapped to ∓∞.
    pub fn log_radius(&self) -> f64 {
        match *self {
            LogPolar::Origin => f64::NEG_INFINITY,
            LogPolar::Interior { s, .. } => s,
            LogPolar::Boundary { .. } => f64::INFINITY,
        }
    }

    /// Disk radius and its complement `1 - ρ`, each computed without
    /// cancellation.
    fn radial(&self) -> (f64, f64) {
        match *self {
            LogPolar::Origin => (0.0, 1.0),
            LogPolar::Interior { s, .. } => (logistic_radius(s), logistic_radius(-s)),
            LogPolar::Boundary { .. } => (1.0, 0.0),
        }
    }
}

/// `ln(ρ / (1 - ρ))`, the log-modulus of `h(z)` for `|z| = ρ`.
pub fn logit_radius(rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Domain {
            what: "interior radius",
            value: rho,
        });
    }
    Ok((rho / (1.0 - rho)).ln())
}

/// `e^s / (1 + e^s)`, branch-stable for large `|s|`.
pub fn logistic_radius(s: f64) -> f64 {
    if s > 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    }
}

pub fn to_logpolar(z: DiskPoint) -> LogPolar {
    if z.rho == 0.0 {
        LogPolar::Origin
    } else if z.gap == 0.0 {
        LogPolar::Boundary { theta: z.theta }
    } else {
        LogPolar::Interior {
            s: (z.rho / z.gap).ln(),
            theta: z.theta,
        }
    }
}

/// Inverse of [`to_logpolar`]. Interior points with `s` beyond about 37
/// round to `ρ = 1` in binary64; keep them in log-polar form for metric work.
pub fn to_disk(p: LogPolar) -> DiskPoint {
    match p {
        LogPolar::Origin => DiskPoint::ORIGIN,
        LogPolar::Boundary { theta } => DiskPoint::from_parts(1.0, theta),
        LogPolar::Interior { s, theta } => {
            DiskPoint::from_radial(logistic_radius(s), logistic_radius(-s), theta)
        }
    }
}

/// `h(z) = z / (1 - |z|)` on the open disk.
pub fn h(z: DiskPoint) -> Result<PlanePoint> {
    if z.gap <= 0.0 {
        return Err(Error::Domain {
            what: "open-disk radius",
            value: z.rho,
        });
    }
    PlanePoint::new(z.rho / z.gap, z.theta)
}

/// `h⁻¹(w) = w / (1 + |w|)`.
pub fn h_inv(w: PlanePoint) -> DiskPoint {
    DiskPoint::from_radial(w.r / (1.0 + w.r), 1.0 / (1.0 + w.r), w.theta)
}

/// `sqrt(dρ² + 4 ρa ρb sin²(πΔθ))`, the law-of-cosines chord without the
/// cancellation of the cosine form.
fn chord(rho_a: f64, rho_b: f64, d_rho: f64, d_theta: f64) -> f64 {
    let sin = (PI * d_theta).sin();
    (d_rho * d_rho + 4.0 * rho_a * rho_b * sin * sin)
        .sqrt()
        .clamp(0.0, 2.0)
}

/// Euclidean distance between two disk points.
pub fn disk_distance(a: DiskPoint, b: DiskPoint) -> f64 {
    // canonical argument order makes the result bitwise symmetric
    let (a, b) = match a.rho.total_cmp(&b.rho).then(a.theta.total_cmp(&b.theta)) {
        Ordering::Greater => (b, a),
        _ => (a, b),
    };
    let d_rho = if a.rho >= 0.5 && b.rho >= 0.5 {
        b.gap - a.gap
    } else {
        a.rho - b.rho
    };
    chord(a.rho, b.rho, d_rho, turn_difference(a.theta, b.theta))
}

/// Euclidean distance computed from log-polar coordinates.
///
/// Equal to `disk_distance(to_disk(a), to_disk(b))` up to rounding, but keeps
/// full relative precision in the radial difference near the boundary. When
/// both log-radii exceed [`ASYMPTOTIC_LOG_RADIUS`] the boundary chord
/// `2|sin(πΔθ)|` is used; its error is at most `(1 - ρa) + (1 - ρb)`.
pub fn logpolar_distance(a: LogPolar, b: LogPolar) -> f64 {
    let (a, b) = match a
        .log_radius()
        .total_cmp(&b.log_radius())
        .then(a.theta().total_cmp(&b.theta()))
    {
        Ordering::Greater => (b, a),
        _ => (a, b),
    };
    let d_theta = turn_difference(a.theta(), b.theta());
    if a.log_radius() > ASYMPTOTIC_LOG_RADIUS && b.log_radius() > ASYMPTOTIC_LOG_RADIUS {
        return (2.0 * (PI * d_theta).sin().abs()).min(2.0);
    }
    let (rho_a, comp_a) = a.radial();
    let (rho_b, comp_b) = b.radial();
    let d_rho = if rho_a >= 0.5 && rho_b >= 0.5 {
        comp_b - comp_a
    } else {
        rho_a - rho_b
    };
    chord(rho_a, rho_b, d_rho, d_theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const E: f64 = std::f64::consts::E;

    fn dp(rho: f64, theta: f64) -> DiskPoint {
        DiskPoint::new(rho, theta).unwrap()
    }

    #[test]
    fn logit_examples() {
        assert_eq!(logit_radius(0.5).unwrap(), 0.0);
        assert!((logit_radius(E / (1.0 + E)).unwrap() - 1.0).abs() < 1e-15);
        // ln 9
        assert!((logit_radius(0.9).unwrap() - 2.197_224_577_336_219_4).abs() < 1e-15);
    }

    #[test]
    fn logit_rejects_closed_endpoints() {
        for rho in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(logit_radius(rho).is_err(), "rho={rho}");
        }
    }

    #[test]
    fn logistic_examples() {
        assert_eq!(logistic_radius(0.0), 0.5);
        assert!((logistic_radius(1.0) - 0.731_058_578_630_004_9).abs() < 1e-16);
        let tiny = logistic_radius(-60.0);
        assert!((tiny - 8.756_510_762_696_52e-27).abs() < 1e-40);
        assert_eq!(logistic_radius(800.0), 1.0);
        assert!(logistic_radius(-700.0) > 0.0);
    }

    #[test]
    fn logpolar_conversion_examples() {
        assert_eq!(to_logpolar(DiskPoint::ORIGIN), LogPolar::Origin);
        assert_eq!(
            to_logpolar(dp(0.5, 0.25)),
            LogPolar::Interior { s: 0.0, theta: 0.25 }
        );
        match to_logpolar(dp(0.9, 0.0)) {
            LogPolar::Interior { s, theta } => {
                assert!((s - 2.197_224_577_336_219).abs() < 1e-14);
                assert_eq!(theta, 0.0);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(to_logpolar(dp(1.0, 0.3)), LogPolar::Boundary { theta: 0.3 });

        assert_eq!(to_disk(LogPolar::Origin), DiskPoint::ORIGIN);
        assert_eq!(to_disk(LogPolar::Interior { s: 0.0, theta: 0.25 }), dp(0.5, 0.25));
        let z = to_disk(LogPolar::Interior {
            s: 2.197225,
            theta: 0.0,
        });
        assert!((z.rho() - 0.9).abs() < 1e-7);
    }

    #[test]
    fn origin_is_canonical() {
        assert_eq!(dp(0.0, 0.7), DiskPoint::ORIGIN);
        assert_eq!(dp(0.5, 1.25).theta(), 0.25);
        assert_eq!(dp(0.5, -1e-18).theta(), 0.0);
        assert!(DiskPoint::new(1.01, 0.0).is_err());
    }

    #[test]
    fn distance_examples() {
        let a = dp(0.4, 0.1);
        assert_eq!(disk_distance(a, a), 0.0);
        assert!((disk_distance(dp(1.0, 0.0), dp(1.0, 0.5)) - 2.0).abs() < 1e-15);
        assert!((disk_distance(dp(1.0, 0.0), dp(1.0, 0.25)) - 2f64.sqrt()).abs() < 1e-15);
        // wrap-around: 0.99 and 0.01 are 0.02 turns apart
        let d = disk_distance(dp(1.0, 0.99), dp(1.0, 0.01));
        assert!((d - 2.0 * (PI * 0.02).sin()).abs() < 1e-14);
    }

    #[test]
    fn logpolar_distance_examples() {
        let p = LogPolar::Interior { s: 1.3, theta: 0.2 };
        assert_eq!(logpolar_distance(p, p), 0.0);
        let a = LogPolar::Interior { s: 100.0, theta: 0.0 };
        let b = LogPolar::Interior { s: 100.0, theta: 0.5 };
        assert!((logpolar_distance(a, b) - 2.0).abs() < 1e-15);
        assert_eq!(
            logpolar_distance(LogPolar::Origin, LogPolar::Boundary { theta: 0.3 }),
            1.0
        );
        assert_eq!(logpolar_distance(LogPolar::Origin, LogPolar::Origin), 0.0);
    }

    #[test]
    fn logpolar_distance_resolves_radial_gap_near_boundary() {
        // ρ differs from 1 by ~1e-13; the disk form loses most digits of the gap
        let a = LogPolar::Interior { s: 30.0, theta: 0.0 };
        let b = LogPolar::Interior { s: 31.0, theta: 0.0 };
        let exact = logistic_radius(-30.0) - logistic_radius(-31.0);
        let d = logpolar_distance(a, b);
        assert!(((d - exact) / exact).abs() < 1e-12);
    }

    #[test]
    fn plane_conjugacy_roundtrip() {
        let z = dp(0.75, 0.4);
        let w = h(z).unwrap();
        assert!((w.r() - 3.0).abs() < 1e-15);
        let back = h_inv(w);
        assert!(disk_distance(back, z) < 1e-15);
        assert!(h(dp(1.0, 0.0)).is_err());
    }

    proptest! {
        #[test]
        fn roundtrip_interior(rho in 1e-6f64..(1.0 - 1e-6), theta in 0.0f64..1.0) {
            let z = dp(rho, theta);
            let back = to_disk(to_logpolar(z));
            prop_assert!((back.rho() - z.rho()).abs() < 1e-12);
            prop_assert!(turn_difference(back.theta(), z.theta()).abs() < 1e-12);
        }

        #[test]
        fn logit_inverts_logistic(s in -30.0f64..13.0) {
            prop_assert!((logit_radius(logistic_radius(s)).unwrap() - s).abs() < 1e-10);
        }

        #[test]
        fn logit_inverts_logistic_up_to_radius_quantization(s in 13.0f64..30.0) {
            // ρ is stored to 2^-53 absolute, i.e. 2^-53 · e^s relative to 1 - ρ
            let bound = 2.0 * f64::EPSILON * (1.0 + s.exp());
            prop_assert!((logit_radius(logistic_radius(s)).unwrap() - s).abs() <= bound);
        }

        #[test]
        fn metric_axioms(
            r in proptest::array::uniform3(0.0f64..=1.0),
            t in proptest::array::uniform3(0.0f64..1.0),
        ) {
            let p: Vec<DiskPoint> = (0..3).map(|i| dp(r[i], t[i])).collect();
            let ab = disk_distance(p[0], p[1]);
            prop_assert_eq!(ab.to_bits(), disk_distance(p[1], p[0]).to_bits());
            prop_assert!((0.0..=2.0).contains(&ab));
            let bc = disk_distance(p[1], p[2]);
            let ac = disk_distance(p[0], p[2]);
            prop_assert!(ac <= ab + bc + 1e-12);
        }

        #[test]
        fn logpolar_distance_matches_disk(
            sa in -20.0f64..35.0, sb in -20.0f64..35.0,
            ta in 0.0f64..1.0, tb in 0.0f64..1.0,
        ) {
            let a = LogPolar::Interior { s: sa, theta: ta };
            let b = LogPolar::Interior { s: sb, theta: tb };
            let lp = logpolar_distance(a, b);
            let dd = disk_distance(to_disk(a), to_disk(b));
            prop_assert!((lp - dd).abs() < 1e-12, "{} vs {}", lp, dd);
            prop_assert_eq!(lp.to_bits(), logpolar_distance(b, a).to_bits());
        }
    }
}
