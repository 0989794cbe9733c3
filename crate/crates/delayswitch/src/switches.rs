//! Amplitude cubic, crossing frequencies, critical-delay series and the
//! stability-window schedule.
//!
//! Purely imaginary characteristic roots i*omega require
//! |P(i omega)|^2 = |Q(i omega)|^2, which in x = omega^2 is the cubic
//! F(x) = x^3 + c2 x^2 + c1 x + c0 handled here. Each positive root yields an
//! arithmetic series of critical delays tau_j0 + 2 pi n / omega_j, and the
//! sign of F' at the root tells in which direction the conjugate root pair
//! crosses the imaginary axis.

use std::f64::consts::TAU as TWO_PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::charpoly::{cubic_real_roots, QuasiPolynomial};
use crate::error::{Error, Result};
use crate::poly;

/// Default tolerance below which the cubic discriminant counts as degenerate.
pub const DISCRIMINANT_TOL: f64 = 1e-10;
/// Default tolerance below which two switch events count as coinciding.
pub const EVENT_TIE_TOL: f64 = 1e-9;

/// F(x) = x^3 + c2 x^2 + c1 x + c0 with x = omega^2.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AmplitudeCubic {
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
    pub discriminant: f64,
}

impl AmplitudeCubic {
    pub fn new(c2: f64, c1: f64, c0: f64) -> Self {
        Self {
            c2,
            c1,
            c0,
            discriminant: poly::monic_cubic_discriminant(c2, c1, c0),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        ((x + self.c2) * x + self.c1) * x + self.c0
    }

    pub fn deriv(&self, x: f64) -> f64 {
        (3.0 * x + 2.0 * self.c2) * x + self.c1
    }

    fn coeff_scale(&self) -> f64 {
        1.0f64
            .max(self.c2.abs())
            .max(self.c1.abs())
            .max(self.c0.abs())
    }
}

/// Which way a conjugate root pair moves across the imaginary axis as tau
/// increases through a critical delay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CrossingDirection {
    /// F'(x) < 0: the pair leaves the right half plane (count drops by 2).
    Stabilizing,
    /// F'(x) > 0: the pair enters the right half plane (count rises by 2).
    Destabilizing,
}

/// A positive root x of F with its frequency omega = sqrt(x).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CrossingFrequency {
    pub x: f64,
    pub omega: f64,
    pub direction: CrossingDirection,
    /// Phase alpha in [0, 2 pi) with omega tau_j0 = alpha; filled in by
    /// [`critical_delays`] (it needs the quasi-polynomial, not just F).
    pub alpha: Option<f64>,
}

/// One critical-delay event of the schedule.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SwitchEvent {
    pub tau: f64,
    /// -2 for stabilizing crossings, +2 for destabilizing ones.
    pub delta: i32,
    /// Index into the crossing-frequency list this event came from.
    pub source: usize,
    /// Position in the arithmetic series tau_j0 + 2 pi n / omega_j.
    pub n: usize,
}

/// Ordered critical delays with the running right-half-plane count and the
/// resulting stable windows.
#[derive(Debug, Clone, Serialize)]
pub struct SwitchSchedule {
    pub events: Vec<SwitchEvent>,
    pub n_at_zero: usize,
    /// Maximal open intervals of tau on which the running count is zero.
    pub windows: Vec<(f64, f64)>,
    pub tau_max: f64,
    pub crossings: Vec<CrossingFrequency>,
}

impl SwitchSchedule {
    /// Running right-half-plane count at the given delay (events at exactly
    /// `tau` are not counted; the count is right-continuous from the left).
    pub fn count_at(&self, tau: f64) -> usize {
        let mut n = self.n_at_zero as i64;
        for e in &self.events {
            if e.tau < tau {
                n += e.delta as i64;
            }
        }
        n.max(0) as usize
    }
}

/// Assemble F(x) from the quasi-polynomial:
/// c2 = a2^2 - 2 a1 - b2^2, c1 = a1^2 - 2 a0 a2 - b1^2 + 2 b0 b2,
/// c0 = a0^2 - b0^2.
pub fn amplitude_polynomial(qp: &QuasiPolynomial) -> AmplitudeCubic {
    let (a0, a1, a2) = (qp.a0(), qp.a1(), qp.a2());
    let (b0, b1, b2) = (qp.b0(), qp.b1(), qp.b2());
    AmplitudeCubic::new(
        a2 * a2 - 2.0 * a1 - b2 * b2,
        a1 * a1 - 2.0 * a0 * a2 - b1 * b1 + 2.0 * b0 * b2,
        a0 * a0 - b0 * b0,
    )
}

/// All strictly positive roots of F, sorted by omega ascending, each polished
/// by Newton iteration and classified by the sign of F'.
pub fn crossing_frequencies(f: &AmplitudeCubic) -> Result<Vec<CrossingFrequency>> {
    let scale = f.coeff_scale();
    if f.discriminant.abs() < DISCRIMINANT_TOL * scale.powi(4) {
        return Err(Error::DegenerateCubic(format!(
            "discriminant {:e} below tolerance: repeated root of F, crossing direction undefined",
            f.discriminant
        )));
    }
    let mut out = Vec::new();
    for mut x in cubic_real_roots(f.c2, f.c1, f.c0) {
        if x <= 0.0 {
            continue;
        }
        // Newton polish until |F(x)| < 1e-14 * scale (closed form plus two
        // polish steps normally lands well below this already).
        for _ in 0..20 {
            if f.eval(x).abs() < 1e-14 * scale {
                break;
            }
            let d = f.deriv(x);
            if d == 0.0 {
                break;
            }
            x -= f.eval(x) / d;
        }
        let slope = f.deriv(x);
        if slope.abs() < 1e-9 * scale {
            return Err(Error::DegenerateCubic(format!(
                "|F'({x})| = {:e} below tolerance at a positive root",
                slope.abs()
            )));
        }
        out.push(CrossingFrequency {
            x,
            omega: x.sqrt(),
            direction: if slope < 0.0 {
                CrossingDirection::Stabilizing
            } else {
                CrossingDirection::Destabilizing
            },
            alpha: None,
        });
    }
    out.sort_by(|a, b| a.omega.partial_cmp(&b.omega).unwrap());
    Ok(out)
}

/// Phase alpha in [0, 2 pi) with e^(-i omega tau) = cos(alpha) - i sin(alpha)
/// solved from e^(-i omega tau) = -P(i omega) / Q(i omega).
pub fn crossing_phase(qp: &QuasiPolynomial, cf: &CrossingFrequency) -> Result<f64> {
    let lambda = Complex64::new(0.0, cf.omega);
    let q = qp.eval_q(lambda);
    if q.norm() < 1e-12 {
        return Err(Error::QVanishes(q.norm()));
    }
    let z = -qp.eval_p(lambda) / q;
    // cos(alpha) = Re z, sin(alpha) = -Im z.
    Ok((-z.im).atan2(z.re).rem_euclid(TWO_PI))
}

/// The critical delays tau_j0 .. tau_j,n_max of one crossing frequency:
/// tau_jn = alpha / omega + 2 pi n / omega.
pub fn critical_delays(
    qp: &QuasiPolynomial,
    cf: &CrossingFrequency,
    n_max: usize,
) -> Result<Vec<f64>> {
    let alpha = crossing_phase(qp, cf)?;
    Ok((0..=n_max)
        .map(|n| (alpha + TWO_PI * n as f64) / cf.omega)
        .collect())
}

/// Merge every critical-delay series up to `tau_max` into an ordered event
/// list and derive the stable windows.
pub fn schedule(qp: &QuasiPolynomial, tau_max: f64) -> Result<SwitchSchedule> {
    if !tau_max.is_finite() || tau_max <= 0.0 {
        return Err(Error::NonFinite("tau_max"));
    }
    let n_at_zero = qp.rhp_count_zero_delay()?;
    let f = amplitude_polynomial(qp);
    if f.c0 <= 0.0 {
        return Err(Error::AmplitudeAtZero(f.c0));
    }
    let mut crossings = crossing_frequencies(&f)?;

    let mut events = Vec::new();
    for (j, cf) in crossings.iter_mut().enumerate() {
        let alpha = crossing_phase(qp, cf)?;
        cf.alpha = Some(alpha);
        let delta = match cf.direction {
            CrossingDirection::Stabilizing => -2,
            CrossingDirection::Destabilizing => 2,
        };
        let mut n = 0usize;
        loop {
            let tau = (alpha + TWO_PI * n as f64) / cf.omega;
            if tau > tau_max {
                break;
            }
            events.push(SwitchEvent {
                tau,
                delta,
                source: j,
                n,
            });
            n += 1;
        }
    }
    events.sort_by(|a, b| a.tau.partial_cmp(&b.tau).unwrap());
    for pair in events.windows(2) {
        if pair[1].tau - pair[0].tau < EVENT_TIE_TOL {
            return Err(Error::EventTie(pair[0].tau));
        }
    }

    let mut windows = Vec::new();
    let mut count = n_at_zero as i64;
    let mut open_since = if count == 0 { Some(0.0) } else { None };
    for e in &events {
        count += e.delta as i64;
        if count < 0 {
            return Err(Error::NegativeRootCount(e.tau));
        }
        match (count == 0, open_since) {
            (true, None) => open_since = Some(e.tau),
            (false, Some(lo)) => {
                windows.push((lo, e.tau));
                open_since = None;
            }
            _ => {}
        }
    }
    if let Some(lo) = open_since {
        windows.push((lo, tau_max));
    }

    Ok(SwitchSchedule {
        events,
        n_at_zero,
        windows,
        tau_max,
        crossings,
    })
}
