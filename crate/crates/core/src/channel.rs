//! Rayleigh-fading link model.
//!
//! With the SNR threshold normalized to one and mean SNR `(r/r0)^-eta`, a link
//! at distance `r` is on with probability `exp(-(r/r0)^eta)`. Its on/off state
//! follows a two-state Markov chain whose flip probabilities come from the
//! level crossing rate of the fading envelope divided by the symbol rate.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::quadrature::QuadratureSpec;

/// Upper clamp for transition probabilities is `1 - CLAMP_EPS`.
pub const CLAMP_EPS: f64 = 1e-12;

/// Threshold on per-step flip probabilities for the slow-fading regime.
pub const SLOW_FADING_THRESHOLD: f64 = 0.1;

/// Relative lower edge of admissibility scans, as a fraction of the diameter.
pub const R_MIN_FRACTION: f64 = 1e-6;

/// Symbol rate used in all experiments (12 MBd).
pub const DEFAULT_SYMBOL_RATE: f64 = 12e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// Typical connection range.
    pub r0: f64,
    /// Path loss exponent.
    pub eta: f64,
    /// Maximum Doppler frequency in Hz, shared by all links.
    pub nu: f64,
    /// Symbols per second.
    pub symbol_rate: f64,
}

impl ChannelParams {
    pub fn new(r0: f64, eta: f64, nu: f64, symbol_rate: f64) -> Result<Self> {
        let p = Self {
            r0,
            eta,
            nu,
            symbol_rate,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(Error::InvalidParameter(format!("{what} = {v}")));
        if !(self.r0 > 0.0 && self.r0.is_finite()) {
            return bad("r0 must be positive; r0", self.r0);
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return bad("eta must be positive; eta", self.eta);
        }
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return bad("nu must be non-negative; nu", self.nu);
        }
        if !(self.symbol_rate > 0.0 && self.symbol_rate.is_finite()) {
            return bad("symbol rate must be positive; B", self.symbol_rate);
        }
        Ok(())
    }

    pub fn with_r0(self, r0: f64) -> Self {
        Self { r0, ..self }
    }

    pub fn with_eta(self, eta: f64) -> Self {
        Self { eta, ..self }
    }

    pub fn with_nu(self, nu: f64) -> Self {
        Self { nu, ..self }
    }

    /// `(r/r0)^eta`, the ratio of SNR threshold to mean SNR.
    fn exponent(&self, r: f64) -> f64 {
        (r / self.r0).powf(self.eta)
    }

    /// `√(2π)·ν/B`, the common prefactor of both flip probabilities.
    fn flip_scale(&self) -> f64 {
        (2.0 * PI).sqrt() * self.nu / self.symbol_rate
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LinkState {
    Off = 0,
    On = 1,
}

impl LinkState {
    pub const BOTH: [LinkState; 2] = [LinkState::Off, LinkState::On];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_bool(on: bool) -> Self {
        if on {
            LinkState::On
        } else {
            LinkState::Off
        }
    }

    pub fn is_on(self) -> bool {
        self == LinkState::On
    }
}

/// One edge's on/off chain. `p01` is off→on, `p10` is on→off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionMatrix {
    pub p01: f64,
    pub p10: f64,
    /// Set when either entry was clamped into `[0, 1 - CLAMP_EPS]`.
    pub clamped: bool,
}

impl TransitionMatrix {
    pub fn new(p01: f64, p10: f64) -> Result<Self> {
        for p in [p01, p10] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidProbability(p));
            }
        }
        Ok(Self {
            p01,
            p10,
            clamped: false,
        })
    }

    pub fn identity() -> Self {
        Self {
            p01: 0.0,
            p10: 0.0,
            clamped: false,
        }
    }

    /// `P(next = b | current = a)`.
    pub fn prob(&self, a: LinkState, b: LinkState) -> f64 {
        match (a, b) {
            (LinkState::Off, LinkState::Off) => 1.0 - self.p01,
            (LinkState::Off, LinkState::On) => self.p01,
            (LinkState::On, LinkState::Off) => self.p10,
            (LinkState::On, LinkState::On) => 1.0 - self.p10,
        }
    }

    pub fn row(&self, a: LinkState) -> [f64; 2] {
        [self.prob(a, LinkState::Off), self.prob(a, LinkState::On)]
    }

    /// Flip probability out of state `a`.
    pub fn flip(&self, a: LinkState) -> f64 {
        match a {
            LinkState::Off => self.p01,
            LinkState::On => self.p10,
        }
    }

    pub fn is_frozen(&self) -> bool {
        self.p01 == 0.0 && self.p10 == 0.0
    }
}

fn check_distance(r: f64) -> Result<()> {
    if r < 0.0 || r.is_nan() {
        Err(Error::NegativeDistance(r))
    } else {
        Ok(())
    }
}

/// Pair connection function `exp(-(r/r0)^eta)`.
pub fn connection_probability(r: f64, params: &ChannelParams) -> Result<f64> {
    check_distance(r)?;
    Ok((-params.exponent(r)).exp())
}

/// Level crossing rate of the SNR at the threshold, in Hz.
pub fn level_crossing_rate(r: f64, params: &ChannelParams) -> Result<f64> {
    check_distance(r)?;
    let x = params.exponent(r);
    Ok((2.0 * PI).sqrt() * x.sqrt() * params.nu * (-x).exp())
}

/// Flip probabilities `(p01, p10)` before clamping.
///
/// `p10 = LCR/(p·B)` simplifies to `√(2π)·ν·x^½/B` and
/// `p01 = LCR/((1-p)·B)` to `√(2π)·ν·x^½/(B·(eˣ-1))` with `x = (r/r0)^η`;
/// both forms stay finite where `p` or `1-p` underflow. At `r = 0`, `p01` is
/// taken as 0 since the off state has probability zero there.
pub fn unclamped_flip_probabilities(r: f64, params: &ChannelParams) -> Result<(f64, f64)> {
    check_distance(r)?;
    let x = params.exponent(r);
    let c = params.flip_scale();
    if c == 0.0 {
        return Ok((0.0, 0.0));
    }
    let p10 = c * x.sqrt();
    let p01 = if x == 0.0 {
        0.0
    } else {
        c * x.sqrt() / x.exp_m1()
    };
    Ok((p01, p10))
}

fn clamp_probability(p: f64) -> (f64, bool) {
    let hi = 1.0 - CLAMP_EPS;
    if p > hi {
        (hi, true)
    } else {
        (p.max(0.0), false)
    }
}

/// Distance-conditioned transition matrix, entries clamped into `[0, 1 - 1e-12]`.
pub fn transition_matrix(r: f64, params: &ChannelParams) -> Result<TransitionMatrix> {
    let (p01, p10) = unclamped_flip_probabilities(r, params)?;
    let (p01, c01) = clamp_probability(p01);
    let (p10, c10) = clamp_probability(p10);
    Ok(TransitionMatrix {
        p01,
        p10,
        clamped: c01 || c10,
    })
}

/// Stationary distribution `(π_off, π_on)`.
///
/// A frozen chain (`p01 = p10 = 0`) leaves every distribution stationary; in
/// that case the caller's on-probability `fallback_on` is returned.
pub fn stationary_distribution(
    m: &TransitionMatrix,
    fallback_on: Option<f64>,
) -> Result<(f64, f64)> {
    let total = m.p01 + m.p10;
    if total == 0.0 {
        return match fallback_on {
            Some(p) if (0.0..=1.0).contains(&p) => Ok((1.0 - p, p)),
            Some(p) => Err(Error::InvalidProbability(p)),
            None => Err(Error::IndeterminateStationary),
        };
    }
    let on = m.p01 / total;
    Ok((m.p10 / total, on))
}

/// Distances at which the unclamped `p01` (decreasing in `r`) and `p10`
/// (increasing in `r`) cross the clamp level, when inside `(0, D)`.
pub fn clamp_radii(params: &ChannelParams, diameter: f64) -> Vec<f64> {
    let hi = 1.0 - CLAMP_EPS;
    let mut out = Vec::new();
    if params.flip_scale() == 0.0 {
        return out;
    }
    let p01 = |r: f64| {
        unclamped_flip_probabilities(r, params)
            .map(|v| v.0)
            .unwrap_or(0.0)
    };
    let p10 = |r: f64| {
        unclamped_flip_probabilities(r, params)
            .map(|v| v.1)
            .unwrap_or(0.0)
    };
    let tiny = diameter * 1e-15;
    if p01(tiny) > hi && p01(diameter) < hi {
        out.push(bisect(|r| p01(r) - hi, tiny, diameter));
    }
    if p10(tiny) < hi && p10(diameter) > hi {
        out.push(bisect(|r| p10(r) - hi, tiny, diameter));
    }
    out
}

// root of a monotone function on [lo, hi], bisecting in log space
fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let sign_lo = g(lo) > 0.0;
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if (g(mid) > 0.0) == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-15 {
            break;
        }
    }
    (lo * hi).sqrt()
}

/// Outcome of the slow-fading admissibility scan.
#[derive(Debug, Clone, PartialEq)]
pub struct SlowFadingReport {
    pub threshold: f64,
    /// Largest unclamped `p10` on `[r_min, D]` (attained at `D`).
    pub max_p10: f64,
    /// Largest unclamped `p01` on `[r_min, D]` (attained at `r_min`).
    pub max_p01: f64,
    /// Largest unclamped `p01` outside the short-range divergence region.
    pub max_p01_regular: f64,
    /// Largest expected number of threshold crossings per symbol, `LCR/B`.
    pub max_crossings_per_symbol: f64,
    /// Below this distance the unclamped `p01` exceeds the threshold.
    pub divergence_radius: f64,
    /// Probability that a pair distance falls in the divergence region.
    pub divergence_mass: f64,
    pub admissible: bool,
}

/// Scans `[r_min, D]` for the largest flip probabilities.
///
/// `p01 ~ (r/r0)^(-η/2)` diverges as `r → 0` for every `ν > 0`, so `p01` is
/// only checked outside the divergence radius; that region is reported
/// together with its probability mass instead.
pub fn slow_fading_report(params: &ChannelParams, domain: &Domain) -> Result<SlowFadingReport> {
    params.validate()?;
    let d = domain.diameter();
    let r_min = R_MIN_FRACTION * d;
    let theta = SLOW_FADING_THRESHOLD;

    let mut grid: Vec<f64> = (0..=2000)
        .map(|i| r_min * (d / r_min).powf(i as f64 / 2000.0))
        .collect();
    // interior maximum of the crossing rate
    let r_peak = params.r0 * 0.5f64.powf(1.0 / params.eta);
    if r_peak > r_min && r_peak < d {
        grid.push(r_peak);
    }

    let mut max_p01 = 0.0f64;
    let mut max_p10 = 0.0f64;
    let mut max_cross = 0.0f64;
    for &r in &grid {
        let (p01, p10) = unclamped_flip_probabilities(r, params)?;
        max_p01 = max_p01.max(p01);
        max_p10 = max_p10.max(p10);
        max_cross = max_cross.max(level_crossing_rate(r, params)? / params.symbol_rate);
    }

    let p01_at = |r: f64| {
        unclamped_flip_probabilities(r, params)
            .map(|v| v.0)
            .unwrap_or(0.0)
    };
    let divergence_radius = if p01_at(r_min) <= theta {
        0.0
    } else if p01_at(d) > theta {
        d
    } else {
        bisect(|r| p01_at(r) - theta, r_min, d)
    };
    let divergence_mass = domain
        .density()
        .cdf(divergence_radius, &QuadratureSpec::default())?;
    let max_p01_regular = grid
        .iter()
        .filter(|&&r| r >= divergence_radius)
        .map(|&r| p01_at(r))
        .fold(0.0, f64::max);

    let admissible = max_p10 <= theta && max_cross <= theta && max_p01_regular <= theta;
    Ok(SlowFadingReport {
        threshold: theta,
        max_p10,
        max_p01,
        max_p01_regular,
        max_crossings_per_symbol: max_cross,
        divergence_radius,
        divergence_mass,
        admissible,
    })
}

/// Draws the instantaneous SNR of a Rayleigh link at distance `r` and tests
/// it against the unit threshold.
pub fn snr_connection_indicator<R: Rng + ?Sized>(
    r: f64,
    params: &ChannelParams,
    rng: &mut R,
) -> Result<LinkState> {
    check_distance(r)?;
    let mean_snr = params.exponent(r).recip();
    // exponential SNR by inversion; 1 - u lies in (0, 1]
    let u: f64 = rng.random();
    let snr = -mean_snr * (1.0 - u).ln();
    Ok(LinkState::from_bool(snr >= 1.0))
}
