//! Li-Yorke pair diagnostics for `f` and the non-chaos check for `f⁻¹`.
//!
//! Two points on the positive axis with log-radii `s_x, s_y ∈ (0, 1)` sit,
//! at time `2ⁿ - 1`, at log-radii `s + 2(2ⁿ - 1)` (both essentially on the
//! boundary circle) with angles `n·s_x` and `n·s_y`. Their distance is
//! therefore governed by `n·α mod 1`, `α = s_x - s_y`: convergent
//! denominators of `α` drive it to 0, half-integer returns drive it to 2.
//!
//! The estimates are finite-time surrogates: `liminf_est` is the smallest
//! sampled distance (an upper bound on what was observed) and `limsup_est`
//! the largest.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coords::{logistic_radius, logit_radius, logpolar_distance, to_logpolar, DiskPoint, LogPolar};
use crate::diophantine::{
    return_times_near_half_with, return_times_near_zero_with, ReturnTimes, RotationNumber,
};
use crate::dynamics::{dyadic_fast_forward, rewind, step, Direction, DYADIC_EXPONENT_CAP};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};

pub const MAX_SCRAMBLED_POINTS: usize = 10_000;

/// Shortest backward tail window accepted by [`inverse_scan`].
pub const MIN_TAIL: u64 = 64;

/// Modulus below which a backward orbit counts as collapsed onto the origin.
pub const COLLAPSE_MODULUS: f64 = 1e-10;

/// Largest tail oscillation still read as a convergent distance sequence.
pub const MAX_TAIL_OSCILLATION: f64 = 1e-9;

/// Relative uncertainty attached to log-radii recovered from disk radii.
const LOGIT_UNCERTAINTY: f64 = 16.0 * f64::EPSILON;

/// How the pairwise gap of a scrambled set is known to be irrational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GapCertificate {
    /// `gap = √2 · numerator / denominator`.
    Sqrt2Multiple {
        numerator: u64,
        denominator: u64,
    },
    Unverified,
}

impl GapCertificate {
    pub fn describe(&self) -> String {
        match *self {
            GapCertificate::Sqrt2Multiple { numerator, denominator } => format!(
                "gap = ({numerator}/{denominator})·√2; pairwise differences are nonzero rational multiples of √2"
            ),
            GapCertificate::Unverified => "gap irrationality not certified".into(),
        }
    }
}

/// Finite set of points on the positive axis whose log-radii form an
/// arithmetic progression with an irrational step, so every pairwise
/// difference of log-radii is irrational.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScrambledSet {
    pub base: f64,
    pub gap: f64,
    pub logits: Vec<f64>,
    pub points: Vec<DiskPoint>,
    pub certificate: GapCertificate,
}

impl ScrambledSet {
    /// `k` points with log-radii `margin + i·√2/d`, where `d` is the least
    /// integer that keeps the last one below `1 - margin`.
    pub fn new(k: usize, margin: f64) -> Result<Self> {
        if !(margin > 0.0 && margin < 0.5) {
            return Err(Error::Domain {
                what: "scrambled-set margin",
                value: margin,
            });
        }
        check_count(k)?;
        let span = (k - 1) as f64 * std::f64::consts::SQRT_2 / (1.0 - 2.0 * margin);
        let denominator = span.floor() as u64 + 1;
        let gap = std::f64::consts::SQRT_2 / denominator as f64;
        let certificate = GapCertificate::Sqrt2Multiple {
            numerator: 1,
            denominator,
        };
        Self::build(k, margin, gap, certificate)
    }

    /// Arbitrary progression `base + i·gap`; its irrationality is not
    /// certified.
    pub fn with_gap(k: usize, base: f64, gap: f64) -> Result<Self> {
        check_count(k)?;
        Self::build(k, base, gap, GapCertificate::Unverified)
    }

    fn build(k: usize, base: f64, gap: f64, certificate: GapCertificate) -> Result<Self> {
        let logits: Vec<f64> = (0..k).map(|i| base + i as f64 * gap).collect();
        if let Some(&bad) = logits.iter().find(|&&s| !(s > 0.0 && s < 1.0)) {
            return Err(Error::Domain {
                what: "scrambled log-radius",
                value: bad,
            });
        }
        let points = logits
            .iter()
            .map(|&s| DiskPoint::new(logistic_radius(s), 0.0))
            .collect::<Result<_>>()?;
        Ok(ScrambledSet {
            base,
            gap,
            logits,
            points,
            certificate,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn check_count(k: usize) -> Result<()> {
    if !(2..=MAX_SCRAMBLED_POINTS).contains(&k) {
        return Err(Error::Range(format!(
            "scrambled set needs 2..={MAX_SCRAMBLED_POINTS} points, got {k}"
        )));
    }
    Ok(())
}

/// Builds the default scrambled set.
pub fn make_scrambled_set(k: usize, margin: f64) -> Result<ScrambledSet> {
    ScrambledSet::new(k, margin)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    NotCertified,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    /// Largest sampled distance still counted as proximal.
    pub eps_prox: f64,
    /// Allowed shortfall of the sampled maximum below the diameter 2.
    pub eps_dist: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            eps_prox: 0.01,
            eps_dist: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairConfig {
    pub max_exponent: u32,
    pub k_terms: usize,
    pub thresholds: Thresholds,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for PairConfig {
    fn default() -> Self {
        PairConfig {
            max_exponent: 900,
            k_terms: 16,
            thresholds: Thresholds::default(),
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleKind {
    Zero,
    Half,
}

/// Pair distance at the dyadic time `2^exponent - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairSample {
    pub kind: SampleKind,
    pub exponent: u32,
    /// `log₂(2^exponent - 1)`.
    pub time_log2: f64,
    pub residual: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDiagnostics {
    pub s_x: f64,
    pub s_y: f64,
    pub alpha: Option<RotationNumber>,
    pub near_zero: Option<ReturnTimes>,
    pub near_half: Option<ReturnTimes>,
    pub samples: Vec<PairSample>,
    pub liminf_est: f64,
    pub limsup_est: f64,
    pub verdict: Verdict,
    /// The requested exponent cap was lowered to the dyadic limit.
    pub truncated: bool,
    pub note: Option<String>,
}

impl PairDiagnostics {
    fn degenerate(s_x: f64, s_y: f64, note: String) -> Self {
        PairDiagnostics {
            s_x,
            s_y,
            alpha: None,
            near_zero: None,
            near_half: None,
            samples: Vec::new(),
            liminf_est: 0.0,
            limsup_est: 0.0,
            verdict: Verdict::Degenerate,
            truncated: false,
            note: Some(note),
        }
    }
}

fn time_log2(exponent: u32) -> f64 {
    exponent as f64 + (-(2f64.powi(-(exponent as i32)))).ln_1p() / std::f64::consts::LN_2
}

/// Diagnostics for a pair of disk points with the default configuration.
pub fn pair_diagnostics(x: DiskPoint, y: DiskPoint, max_exponent: u32, k_terms: usize) -> PairDiagnostics {
    let cfg = PairConfig {
        max_exponent,
        k_terms,
        ..PairConfig::default()
    };
    pair_diagnostics_with(x, y, &cfg)
}

pub fn pair_diagnostics_with(x: DiskPoint, y: DiskPoint, cfg: &PairConfig) -> PairDiagnostics {
    let on_axis = |z: DiskPoint| z.is_interior() && z.theta() == 0.0;
    if !on_axis(x) || !on_axis(y) {
        return PairDiagnostics::degenerate(
            f64::NAN,
            f64::NAN,
            "both points must be interior and on the positive real axis".into(),
        );
    }
    let s_x = logit_radius(x.rho()).expect("interior");
    let s_y = logit_radius(y.rho()).expect("interior");
    pair_diagnostics_logits(s_x, s_y, cfg)
}

/// Diagnostics for the pair with log-radii `s_x, s_y` on the positive axis.
pub fn pair_diagnostics_logits(s_x: f64, s_y: f64, cfg: &PairConfig) -> PairDiagnostics {
    let in_band = |s: f64| s > 0.0 && s < 1.0;
    if !in_band(s_x) || !in_band(s_y) {
        return PairDiagnostics::degenerate(s_x, s_y, "log-radii must lie in (0, 1)".into());
    }
    if cfg.max_exponent == 0 {
        return PairDiagnostics::degenerate(s_x, s_y, "max_exponent must be at least 1".into());
    }
    let truncated = cfg.max_exponent > DYADIC_EXPONENT_CAP;
    let cap = cfg.max_exponent.min(DYADIC_EXPONENT_CAP);

    // |α| keeps the result independent of argument order
    let alpha = (s_x - s_y).abs();
    let uncertainty = LOGIT_UNCERTAINTY * s_x.abs().max(s_y.abs()).max(1.0);
    let rn = match RotationNumber::within(alpha, uncertainty) {
        Ok(rn) => rn,
        Err(e) => return PairDiagnostics::degenerate(s_x, s_y, e.to_string()),
    };
    let times = return_times_near_zero_with(cfg.execution, &rn, cfg.k_terms, cap as u64).and_then(|z| {
        Ok((
            z,
            return_times_near_half_with(cfg.execution, &rn, cfg.k_terms, cap as u64)?,
        ))
    });
    let (near_zero, near_half) = match times {
        Ok(t) => t,
        Err(e) => return PairDiagnostics::degenerate(s_x, s_y, e.to_string()),
    };

    let sample = |kind: SampleKind, n: u64, residual: f64| {
        let exponent = n as u32;
        let px = dyadic_fast_forward(s_x, 0.0, exponent).expect("exponent within cap");
        let py = dyadic_fast_forward(s_y, 0.0, exponent).expect("exponent within cap");
        PairSample {
            kind,
            exponent,
            time_log2: time_log2(exponent),
            residual,
            distance: logpolar_distance(px, py),
        }
    };
    let samples: Vec<PairSample> = near_zero
        .entries
        .iter()
        .map(|e| sample(SampleKind::Zero, e.n, e.residual))
        .chain(
            near_half
                .entries
                .iter()
                .map(|e| sample(SampleKind::Half, e.n, e.residual)),
        )
        .collect();

    let liminf_est = samples.iter().map(|s| s.distance).fold(f64::INFINITY, f64::min);
    let limsup_est = samples
        .iter()
        .map(|s| s.distance)
        .fold(f64::NEG_INFINITY, f64::max);
    let degenerate = s_x != s_y && rn.is_degenerate();
    let mut diag = PairDiagnostics {
        s_x,
        s_y,
        alpha: Some(rn),
        near_zero: Some(near_zero),
        near_half: Some(near_half),
        samples,
        liminf_est,
        limsup_est,
        verdict: if degenerate {
            Verdict::Degenerate
        } else {
            Verdict::NotCertified
        },
        truncated,
        note: degenerate.then(|| "log-radius difference is rational within working precision".into()),
    };
    diag.verdict = certify_li_yorke(&diag, cfg.thresholds.eps_prox, cfg.thresholds.eps_dist);
    diag
}

/// Numerical Li-Yorke test: some sampled distance at most `eps_prox` and
/// some at least `2 - eps_dist`. Degenerate diagnostics stay degenerate.
pub fn certify_li_yorke(d: &PairDiagnostics, eps_prox: f64, eps_dist: f64) -> Verdict {
    if d.verdict == Verdict::Degenerate {
        return Verdict::Degenerate;
    }
    if d.liminf_est <= eps_prox && d.limsup_est >= 2.0 - eps_dist {
        Verdict::Certified
    } else {
        Verdict::NotCertified
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairVerdict {
    pub i: usize,
    pub j: usize,
    pub verdict: Verdict,
    pub liminf_est: f64,
    pub limsup_est: f64,
    pub best_zero_residual: f64,
    pub best_half_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScrambledReport {
    pub k: usize,
    pub certificate: String,
    pub logits: Vec<f64>,
    pub pairs: Vec<PairVerdict>,
    pub certified: usize,
    pub not_certified: usize,
    pub degenerate: usize,
    /// Largest liminf estimate over all pairs.
    pub worst_liminf: f64,
    /// Smallest limsup estimate over all pairs.
    pub worst_limsup: f64,
}

impl ScrambledReport {
    pub fn all_certified(&self) -> bool {
        self.certified == self.pairs.len()
    }
}

/// Runs [`pair_diagnostics_with`] on all `K(K-1)/2` pairs of the set.
pub fn scan_scrambled(set: &ScrambledSet, cfg: &PairConfig) -> ScrambledReport {
    let k = set.len();
    let index: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    // pairs run in parallel; each pair's own scans stay sequential
    let inner = PairConfig {
        execution: Execution::Sequential,
        ..*cfg
    };
    let pairs = exec::map(cfg.execution, &index, |&(i, j)| {
        let d = pair_diagnostics_with(set.points[i], set.points[j], &inner);
        let best =
            |t: &Option<ReturnTimes>| t.as_ref().and_then(|t| t.best()).map_or(f64::NAN, |b| b.residual);
        PairVerdict {
            i,
            j,
            verdict: d.verdict,
            liminf_est: d.liminf_est,
            limsup_est: d.limsup_est,
            best_zero_residual: best(&d.near_zero),
            best_half_residual: best(&d.near_half),
        }
    });
    let count = |v: Verdict| pairs.iter().filter(|p| p.verdict == v).count();
    ScrambledReport {
        k,
        certificate: set.certificate.describe(),
        logits: set.logits.clone(),
        certified: count(Verdict::Certified),
        not_certified: count(Verdict::NotCertified),
        degenerate: count(Verdict::Degenerate),
        worst_liminf: pairs
            .iter()
            .map(|p| p.liminf_est)
            .fold(f64::NEG_INFINITY, f64::max),
        worst_limsup: pairs.iter().map(|p| p.limsup_est).fold(f64::INFINITY, f64::min),
        pairs,
    }
}

/// Backward-orbit behaviour of one pair over the tail window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailReport {
    pub x: DiskPoint,
    pub y: DiskPoint,
    /// `max - min` of the distances over the window.
    pub osc: f64,
    /// Distance between the pointwise limits of the two backward orbits.
    pub limit_distance: f64,
    /// Largest `|d_n - limit_distance|` over the window.
    pub max_deviation: f64,
    /// Largest interior modulus at the start of the window (0 if none).
    pub start_modulus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InverseReport {
    pub n_tail: u64,
    pub pairs: Vec<TailReport>,
    pub max_osc: f64,
    pub max_deviation: f64,
    pub max_start_modulus: f64,
    /// The window starts late enough for every interior orbit to be below
    /// the collapse modulus.
    pub collapse_bound_applies: bool,
    pub collapsed: bool,
    /// No sampled pair shows Li-Yorke behaviour for the inverse map.
    pub non_chaotic: bool,
}

fn backward_limit(p: LogPolar) -> LogPolar {
    match p {
        LogPolar::Interior { .. } => LogPolar::Origin,
        fixed => fixed,
    }
}

fn tail_report(x: DiskPoint, y: DiskPoint, n_tail: u64) -> Result<TailReport> {
    let (px, py) = (to_logpolar(x), to_logpolar(y));
    let limit_distance = logpolar_distance(backward_limit(px), backward_limit(py));
    let mut a = rewind(px, n_tail)?;
    let mut b = rewind(py, n_tail)?;
    let modulus = |p: LogPolar| match p {
        LogPolar::Interior { s, .. } => logistic_radius(s),
        _ => 0.0,
    };
    let start_modulus = modulus(a).max(modulus(b));
    let (mut lo, mut hi, mut dev) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for n in n_tail..=2 * n_tail {
        if n > n_tail {
            a = step(a, Direction::Backward);
            b = step(b, Direction::Backward);
        }
        let d = logpolar_distance(a, b);
        lo = lo.min(d);
        hi = hi.max(d);
        dev = dev.max((d - limit_distance).abs());
    }
    Ok(TailReport {
        x,
        y,
        osc: hi - lo,
        limit_distance,
        max_deviation: dev,
        start_modulus,
    })
}

/// Distances along backward orbits over `n ∈ [n_tail, 2·n_tail]`.
///
/// Interior orbits of `f⁻¹` collapse onto the origin while the origin and
/// the boundary are fixed, so each distance sequence converges and no pair
/// can be Li-Yorke for the inverse.
pub fn inverse_scan(pairs: &[(DiskPoint, DiskPoint)], n_tail: u64) -> Result<InverseReport> {
    inverse_scan_with(Execution::default(), pairs, n_tail)
}

pub fn inverse_scan_with(
    mode: Execution,
    pairs: &[(DiskPoint, DiskPoint)],
    n_tail: u64,
) -> Result<InverseReport> {
    if n_tail < MIN_TAIL {
        return Err(Error::Range(format!(
            "tail window must start at n >= {MIN_TAIL}, got {n_tail}"
        )));
    }
    let reports = exec::map(mode, pairs, |&(x, y)| tail_report(x, y, n_tail))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let max_logit = pairs
        .iter()
        .flat_map(|&(x, y)| [x, y])
        .filter(|z| z.is_interior())
        .map(|z| logit_radius(z.rho()).expect("interior"))
        .fold(f64::NEG_INFINITY, f64::max);
    let max = |f: fn(&TailReport) -> f64| reports.iter().map(f).fold(0.0f64, f64::max);
    let max_osc = max(|r| r.osc);
    let max_start_modulus = max(|r| r.start_modulus);
    let collapsed = max_start_modulus < COLLAPSE_MODULUS;
    Ok(InverseReport {
        n_tail,
        max_osc,
        max_deviation: max(|r| r.max_deviation),
        max_start_modulus,
        collapse_bound_applies: n_tail as f64 >= (max_logit + 24.0) / 2.0,
        collapsed,
        non_chaotic: max_osc < MAX_TAIL_OSCILLATION && collapsed,
        pairs: reports,
    })
}

/// Seeded pairs mixing interior, boundary and origin points. Interior
/// log-radii are uniform on `[-20, 20]`.
pub fn sample_mixed_pairs(count: usize, seed: u64) -> Vec<(DiskPoint, DiskPoint)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point = |rng: &mut ChaCha8Rng| {
        let kind: f64 = rng.random();
        if kind < 0.6 {
            let s: f64 = rng.random_range(-20.0..20.0);
            DiskPoint::new(logistic_radius(s), rng.random()).expect("interior")
        } else if kind < 0.85 {
            DiskPoint::boundary(rng.random())
        } else {
            DiskPoint::ORIGIN
        }
    };
    (0..count).map(|_| (point(&mut rng), point(&mut rng))).collect()
}
