//! Shared helpers for the integration suites: seeded generators and
//! independent oracles (closed-form cubic roots, Newton root tracking).

#![allow(dead_code)]

use delayswitch::{ComplexValue, QuasiPolynomial};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Random quasi-polynomial with moderate coefficients (full Q allowed).
pub fn random_qp(rng: &mut StdRng) -> QuasiPolynomial {
    loop {
        let a0 = rng.gen_range(-1.5..1.5);
        let a1 = rng.gen_range(-1.5..1.5);
        let a2 = rng.gen_range(-1.5..1.5);
        let b0 = rng.gen_range(-1.0..1.0);
        let b1 = rng.gen_range(-1.0..1.0);
        let b2 = rng.gen_range(-1.0..1.0);
        if let Ok(qp) = QuasiPolynomial::new(a0, a1, a2, b0, b1, b2) {
            return qp;
        }
    }
}

/// Random system in the two-positive-root configuration: one stabilizing and
/// one destabilizing crossing frequency, constant delayed term.
pub fn random_switching_qp(rng: &mut StdRng) -> QuasiPolynomial {
    loop {
        let a0 = rng.gen_range(0.08..0.5);
        let a1 = rng.gen_range(-0.6..-0.05);
        let a2 = rng.gen_range(0.5..1.6);
        let b0 = -rng.gen_range(0.3..0.95) * a0;
        let Ok(qp) = QuasiPolynomial::new(a0, a1, a2, b0, 0.0, 0.0) else {
            continue;
        };
        let f = delayswitch::switches::amplitude_polynomial(&qp);
        let Ok(cfs) = delayswitch::switches::crossing_frequencies(&f) else {
            continue;
        };
        if cfs.len() != 2 || qp.rhp_count_zero_delay().is_err() {
            continue;
        }
        return qp;
    }
}

/// Closed-form roots of the monic cubic x^3 + c2 x^2 + c1 x + c0 as complex
/// numbers (independent of the crate's solver).
pub fn cubic_roots_closed_form(c2: f64, c1: f64, c0: f64) -> [ComplexValue; 3] {
    let p = c1 - c2 * c2 / 3.0;
    let q = 2.0 * c2.powi(3) / 27.0 - c2 * c1 / 3.0 + c0;
    let shift = c2 / 3.0;
    let disc = -4.0 * p.powi(3) - 27.0 * q * q;
    if disc > 0.0 {
        let m = 2.0 * (-p / 3.0).sqrt();
        let theta = (3.0 * q / (p * m)).clamp(-1.0, 1.0).acos() / 3.0;
        std::array::from_fn(|k| {
            let t = m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
            ComplexValue::new(t - shift, 0.0)
        })
    } else {
        let s = (q * q / 4.0 + p.powi(3) / 27.0).max(0.0).sqrt();
        let u = (-q / 2.0 + s).cbrt();
        let v = (-q / 2.0 - s).cbrt();
        let real = u + v - shift;
        // Deflate: x^2 + (c2 + r) x + (c1 + r (c2 + r)), roots by formula.
        let b = c2 + real;
        let c = c1 + real * b;
        let d = b * b - 4.0 * c;
        let re = -b / 2.0;
        let im = (-d).max(0.0).sqrt() / 2.0;
        [
            ComplexValue::new(real, 0.0),
            ComplexValue::new(re, im),
            ComplexValue::new(re, -im),
        ]
    }
}

/// Count roots with positive real part, refusing near-axis cases.
pub fn rhp_count_closed_form(c2: f64, c1: f64, c0: f64) -> Option<usize> {
    let roots = cubic_roots_closed_form(c2, c1, c0);
    if roots.iter().any(|r| r.re.abs() < 1e-6) {
        return None;
    }
    Some(roots.iter().filter(|r| r.re > 0.0).count())
}

/// Newton iteration on W(lambda; tau) from the given start.
pub fn newton_root(qp: &QuasiPolynomial, tau: f64, start: ComplexValue) -> Option<ComplexValue> {
    let mut lambda = start;
    for _ in 0..100 {
        let w = qp.eval(lambda, tau).ok()?;
        let e = (-lambda * tau).exp();
        // dW/dlambda = P' + (Q' - tau Q) e^(-lambda tau)
        let p_prime = (lambda * 3.0 + 2.0 * qp.a2()) * lambda + qp.a1();
        let q = qp.eval_q(lambda);
        let q_prime = lambda * 2.0 * qp.b2() + qp.b1();
        let dw = p_prime + (q_prime - q * tau) * e;
        if dw.norm() == 0.0 {
            return None;
        }
        let step = w / dw;
        lambda -= step;
        if step.norm() < 1e-13 * lambda.norm().max(1.0) {
            return Some(lambda);
        }
    }
    None
}
