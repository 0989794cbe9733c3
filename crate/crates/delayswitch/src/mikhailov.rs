//! Mikhailov hodograph: trace W(i omega) for a fixed tau, unwrap its
//! argument over omega in [0, infinity) and decide stability.
//!
//! For a degree-3 quasi-polynomial with no roots on the imaginary axis the
//! total argument change is 3 pi / 2 + 2 l pi; the steady state is stable
//! exactly when l = 0, and each right-half-plane conjugate pair costs one
//! full turn (2 pi) against that limit.

use std::f64::consts::{FRAC_PI_2, PI, TAU as TWO_PI};

use serde::Serialize;

use crate::charpoly::QuasiPolynomial;
use crate::error::{Error, Result};

/// Relative |W| threshold below which tau counts as sitting on a switch.
pub const CRITICAL_W_TOL: f64 = 1e-8;
/// Target bound on the argument deviation left beyond the truncation point.
const TAIL_DELTA: f64 = 5e-4;
const MAX_REFINE_DEPTH: u32 = 40;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TraceSample {
    pub omega: f64,
    pub w_r: f64,
    pub w_i: f64,
    /// Continuously unwrapped argument of W(i omega), in radians.
    pub arg: f64,
}

/// Adaptively sampled hodograph with a certified truncation bound.
#[derive(Debug, Clone, Serialize)]
pub struct HodographTrace {
    pub samples: Vec<TraceSample>,
    pub omega_cut: f64,
    /// Bound on |arg W(i omega) - arg at omega_cut| for omega > omega_cut.
    pub tail_bound: f64,
    pub min_abs_w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quadrant {
    I,
    II,
    III,
    IV,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityVerdict {
    pub total_arg_change: f64,
    pub n_rhp: usize,
    pub stable: bool,
    pub quadrant_sequence: Vec<Quadrant>,
}

/// Sum of the non-leading term magnitudes of W(i omega).
fn lower_order_bound(qp: &QuasiPolynomial, omega: f64) -> f64 {
    (qp.a2().abs() + qp.b2().abs()) * omega * omega
        + (qp.a1().abs() + qp.b1().abs()) * omega
        + qp.a0().abs()
        + qp.b0().abs()
}

/// Truncation point: past it the -i omega^3 term dominates W so strongly
/// that the remaining argument variation is below arcsin(TAIL_DELTA).
fn default_omega_cut(qp: &QuasiPolynomial) -> f64 {
    let mut omega = 1.0;
    while lower_order_bound(qp, omega) >= TAIL_DELTA * omega.powi(3) {
        omega *= 2.0;
    }
    omega
}

/// Point past which omega^3 > 4 * (lower-order terms): the curve can no
/// longer loop around the origin, so step growth is safe.
fn dominance_cut(qp: &QuasiPolynomial) -> f64 {
    let mut omega = 1.0;
    while 4.0 * lower_order_bound(qp, omega) >= omega.powi(3) {
        omega *= 2.0;
    }
    omega
}

/// Trace the hodograph from omega = 0 to the truncation point with argument
/// step control: a sample is accepted only if the unwrapped argument moved
/// by less than pi/2, halving the step otherwise.
pub fn trace(qp: &QuasiPolynomial, tau: f64) -> Result<HodographTrace> {
    trace_with_cut(qp, tau, default_omega_cut(qp))
}

/// Same as [`trace`] with an explicit truncation point (used to check
/// truncation soundness; `omega_cut` below the default weakens the tail
/// bound and may make the verdict inconclusive).
pub fn trace_with_cut(qp: &QuasiPolynomial, tau: f64, omega_cut: f64) -> Result<HodographTrace> {
    if !tau.is_finite() || tau < 0.0 {
        return Err(Error::NonFinite("tau"));
    }
    if !omega_cut.is_finite() || omega_cut <= 0.0 {
        return Err(Error::NonFinite("omega_cut"));
    }
    let coeff_scale = 1.0f64
        .max(qp.a0().abs())
        .max(qp.a1().abs())
        .max(qp.a2().abs())
        .max(qp.b0().abs())
        .max(qp.b1().abs())
        .max(qp.b2().abs());
    let critical_tol = CRITICAL_W_TOL * coeff_scale;

    let dominance = dominance_cut(qp).min(omega_cut);
    // Below the dominance point the delay ripple cos/sin(omega tau) can wind
    // the curve; cap the step well under half its period so a full loop can
    // never hide inside one step.
    let ripple_cap = FRAC_PI_2 / (2.0 * (tau + 1.0));
    let h0 = 0.01f64.min(omega_cut / 1000.0);

    let (w_r0, w_i0) = qp.real_imag(0.0, tau)?;
    let mut samples = vec![TraceSample {
        omega: 0.0,
        w_r: w_r0,
        w_i: w_i0,
        arg: w_i0.atan2(w_r0),
    }];
    let mut min_abs_w = w_r0.hypot(w_i0);

    let mut omega = 0.0;
    let mut h = h0;
    while omega < omega_cut {
        let cap = if omega < dominance {
            ripple_cap
        } else {
            omega_cut / 64.0
        };
        h = h.min(cap);
        let mut depth = 0u32;
        loop {
            let next = (omega + h).min(omega_cut);
            if next <= omega {
                // Step underflow: the curve pins the sampler in place, which
                // only happens while squeezing past the origin.
                return Err(Error::CriticalDelay(min_abs_w));
            }
            let (w_r, w_i) = qp.real_imag(next, tau)?;
            let prev = samples.last().unwrap();
            let raw = w_i.atan2(w_r);
            let prev_raw = prev.w_i.atan2(prev.w_r);
            let mut delta = raw - prev_raw;
            if delta > PI {
                delta -= TWO_PI;
            } else if delta <= -PI {
                delta += TWO_PI;
            }
            if delta.abs() < FRAC_PI_2 {
                let arg = prev.arg + delta;
                samples.push(TraceSample {
                    omega: next,
                    w_r,
                    w_i,
                    arg,
                });
                min_abs_w = min_abs_w.min(w_r.hypot(w_i));
                if min_abs_w < critical_tol {
                    return Err(Error::CriticalDelay(min_abs_w));
                }
                omega = next;
                if delta.abs() < PI / 16.0 {
                    h *= 2.0;
                }
                break;
            }
            depth += 1;
            if depth > MAX_REFINE_DEPTH {
                return Err(Error::StepRefinement(omega));
            }
            h /= 2.0;
        }
    }

    let delta = lower_order_bound(qp, omega_cut) / omega_cut.powi(3);
    let tail_bound = if delta < 1.0 { delta.asin() } else { PI };
    Ok(HodographTrace {
        samples,
        omega_cut,
        tail_bound,
        min_abs_w,
    })
}

/// Classify a trace: the total argument change must be 3 pi / 2 modulo 2 pi,
/// and the (nonnegative) number of missing full turns gives the number of
/// right-half-plane conjugate pairs.
pub fn verdict(trace: &HodographTrace) -> Result<StabilityVerdict> {
    if trace.tail_bound >= PI / 4.0 {
        return Err(Error::Inconclusive(trace.tail_bound));
    }
    let first = trace.samples.first().expect("trace has samples");
    let last = trace.samples.last().expect("trace has samples");
    let total = last.arg - first.arg;

    let turns = ((1.5 * PI - total) / TWO_PI).round();
    let residual = (1.5 * PI - TWO_PI * turns - total).abs();
    if residual > trace.tail_bound.max(1e-3) * 10.0 || turns < 0.0 {
        return Err(Error::ArgumentConvention(total));
    }
    let n_rhp = 2 * turns as usize;

    let mut quadrants = Vec::new();
    for s in &trace.samples {
        if s.w_r == 0.0 || s.w_i == 0.0 {
            continue;
        }
        let q = match (s.w_r > 0.0, s.w_i > 0.0) {
            (true, true) => Quadrant::I,
            (false, true) => Quadrant::II,
            (false, false) => Quadrant::III,
            (true, false) => Quadrant::IV,
        };
        if quadrants.last() != Some(&q) {
            quadrants.push(q);
        }
    }

    Ok(StabilityVerdict {
        total_arg_change: total,
        n_rhp,
        stable: n_rhp == 0,
        quadrant_sequence: quadrants,
    })
}

/// Right-half-plane root count at the given delay (trace + verdict).
pub fn rhp_count(qp: &QuasiPolynomial, tau: f64) -> Result<usize> {
    Ok(verdict(&trace(qp, tau)?)?.n_rhp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::rpj;

    #[test]
    fn fixture_arg_change_at_zero_delay() {
        let t = trace(&rpj(), 0.0).unwrap();
        let total = t.samples.last().unwrap().arg - t.samples[0].arg;
        assert!((total + FRAC_PI_2).abs() < 1e-3, "total = {total}");
    }

    #[test]
    fn fixture_arg_change_inside_window() {
        let t = trace(&rpj(), 2.5).unwrap();
        let total = t.samples.last().unwrap().arg - t.samples[0].arg;
        assert!((total - 1.5 * PI).abs() < 1e-3, "total = {total}");
    }

    #[test]
    fn stable_plain_cubic_any_delay() {
        // (lambda + 1)^3, delay term absent.
        let qp = QuasiPolynomial::new(1.0, 3.0, 3.0, 0.0, 0.0, 0.0).unwrap();
        for tau in [0.0, 1.0, 5.0] {
            let v = verdict(&trace(&qp, tau).unwrap()).unwrap();
            assert!(v.stable);
            assert!((v.total_arg_change - 1.5 * PI).abs() < 1e-3);
        }
    }

    #[test]
    fn fixture_verdicts() {
        let qp = rpj();
        for (tau, n) in [(0.0, 2), (1.8, 2), (2.5, 0), (4.0, 2)] {
            let v = verdict(&trace(&qp, tau).unwrap()).unwrap();
            assert_eq!(v.n_rhp, n, "tau = {tau}");
            assert_eq!(v.stable, n == 0);
        }
    }

    #[test]
    fn quadrant_sequence_inside_window() {
        let v = verdict(&trace(&rpj(), 2.5).unwrap()).unwrap();
        assert!(
            v.quadrant_sequence.len() >= 3
                && v.quadrant_sequence[..3] == [Quadrant::I, Quadrant::II, Quadrant::III],
            "sequence = {:?}",
            v.quadrant_sequence
        );
    }

    #[test]
    fn critical_delay_is_rejected() {
        // Computed first critical delay of the fixture.
        let qp = rpj();
        let f = crate::switches::amplitude_polynomial(&qp);
        let cfs = crate::switches::crossing_frequencies(&f).unwrap();
        let tau = crate::switches::critical_delays(&qp, &cfs[0], 0).unwrap()[0];
        assert!(matches!(trace(&qp, tau), Err(Error::CriticalDelay(_))));
    }

    #[test]
    fn start_sample_is_exact() {
        let t = trace(&rpj(), 1.3).unwrap();
        assert_eq!(t.samples[0].w_r, 0.16 - 0.14);
        assert_eq!(t.samples[0].w_i, 0.0);
    }

    #[test]
    fn no_large_argument_jumps() {
        let t = trace(&rpj(), 4.0).unwrap();
        for pair in t.samples.windows(2) {
            assert!((pair[1].arg - pair[0].arg).abs() < FRAC_PI_2);
        }
    }

    #[test]
    fn truncation_soundness_fixture() {
        let qp = rpj();
        for tau in [0.0, 2.5, 4.0] {
            let base = trace(&qp, tau).unwrap();
            let wide = trace_with_cut(&qp, tau, 2.0 * base.omega_cut).unwrap();
            let total = |t: &HodographTrace| t.samples.last().unwrap().arg - t.samples[0].arg;
            assert!((total(&base) - total(&wide)).abs() < 1e-3);
        }
    }

    #[test]
    fn rhp_count_matches_zero_delay_table() {
        let qp = rpj();
        assert_eq!(
            rhp_count(&qp, 0.0).unwrap(),
            qp.rhp_count_zero_delay().unwrap()
        );
    }
}
