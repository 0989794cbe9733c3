//! Sufficient stability conditions: the sign-condition theorem with its
//! witness frequency, the cubic criterion g(tau) with Sturm-chain root
//! counting, and the lower bound a1/b0 on admissible tau.

use serde::Serialize;

use crate::charpoly::QuasiPolynomial;
use crate::error::{Error, Result};
use crate::poly;

/// Result of the sufficient-condition check at a candidate delay.
#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    /// 0 > b0 > -a0.
    pub cond_b0: bool,
    /// a1 < 0.
    pub cond_a1: bool,
    /// a2 > a1^2 / (2 |b0|).
    pub cond_a2: bool,
    /// b1 = b2 = 0 (the delayed part must be the constant b0).
    pub b_small: bool,
    /// Witness frequency with W_r(omega_bar) < 0 and W_i > 0 on (0, omega_bar).
    pub omega_bar: Option<f64>,
    pub tau_bar: Option<f64>,
    /// sqrt(2 a2 / |b0|): candidate delays must stay strictly below it so
    /// that W_r is strictly decreasing.
    pub tau_upper: f64,
    pub passed: bool,
}

/// g(tau) = g3 tau^3 + g2 tau^2 + g1 tau + g0; g < 0 certifies a witness
/// frequency exists at that tau.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CorollaryCubic {
    pub g3: f64,
    pub g2: f64,
    pub g1: f64,
    pub g0: f64,
}

impl CorollaryCubic {
    pub fn eval(&self, tau: f64) -> f64 {
        ((self.g3 * tau + self.g2) * tau + self.g1) * tau + self.g0
    }

    /// Ascending coefficients for the Sturm chain.
    pub fn coefficients(&self) -> [f64; 4] {
        [self.g0, self.g1, self.g2, self.g3]
    }
}

fn sign_hypotheses(qp: &QuasiPolynomial) -> (bool, bool, bool) {
    let cond_b0 = 0.0 > qp.b0() && qp.b0() > -qp.a0();
    let cond_a1 = qp.a1() < 0.0;
    let cond_a2 = qp.b0() != 0.0 && qp.a2() > qp.a1() * qp.a1() / (2.0 * qp.b0().abs());
    (cond_b0, cond_a1, cond_a2)
}

fn require_constant_delay_part(qp: &QuasiPolynomial) -> Result<()> {
    if !qp.delay_part_is_constant() {
        return Err(Error::Unsupported(
            "b1 and b2 must be exactly zero: the sufficient conditions are only \
             proved for a constant delayed term"
                .into(),
        ));
    }
    Ok(())
}

/// Check the sufficient conditions at `tau_bar`: sign conditions on the
/// coefficients, tau_bar strictly below sqrt(2 a2 / |b0|) (so W_r decreases),
/// and a witness omega_bar with W_r(omega_bar) < 0 while W_i stays positive
/// on a 10^4-point grid over (0, omega_bar).
pub fn check_theorem(qp: &QuasiPolynomial, tau_bar: f64) -> Result<TheoremReport> {
    require_constant_delay_part(qp)?;
    if !tau_bar.is_finite() || tau_bar <= 0.0 {
        return Err(Error::NonFinite("tau_bar"));
    }
    let (cond_b0, cond_a1, cond_a2) = sign_hypotheses(qp);
    let tau_upper = if qp.b0() != 0.0 {
        (2.0 * qp.a2() / qp.b0().abs()).max(0.0).sqrt()
    } else {
        f64::NAN
    };

    let mut report = TheoremReport {
        cond_b0,
        cond_a1,
        cond_a2,
        b_small: true,
        omega_bar: None,
        tau_bar: None,
        tau_upper,
        passed: false,
    };
    if !(cond_b0 && cond_a1 && cond_a2 && tau_bar < tau_upper) {
        return Ok(report);
    }

    // W_r(0) = a0 + b0 > 0 under the sign conditions and W_r is strictly
    // decreasing for tau_bar < tau_upper, so the first sign change on a
    // geometric grid brackets its unique zero.
    let w_r = |omega: f64| -qp.a2() * omega * omega + qp.a0() + qp.b0() * (omega * tau_bar).cos();
    let w_i = |omega: f64| -omega.powi(3) + qp.a1() * omega - qp.b0() * (omega * tau_bar).sin();
    let omega_max = 10.0 + 10.0 * ((qp.a0() + qp.b0().abs()) / qp.a2()).max(0.0).sqrt();
    let mut omega = 1e-4;
    let mut omega_bar = None;
    while omega < omega_max {
        if w_r(omega) < 0.0 {
            omega_bar = Some(omega);
            break;
        }
        omega *= 1.02;
    }
    let Some(omega_bar) = omega_bar else {
        return Ok(report);
    };

    const GRID: usize = 10_000;
    let mut min_wi = f64::INFINITY;
    for k in 1..GRID {
        min_wi = min_wi.min(w_i(omega_bar * k as f64 / GRID as f64));
    }
    if min_wi > 1e-8 {
        report.omega_bar = Some(omega_bar);
        report.tau_bar = Some(tau_bar);
        report.passed = true;
    }
    Ok(report)
}

/// Assemble g(tau); errors if a sign hypothesis fails, naming it.
pub fn corollary_g(qp: &QuasiPolynomial) -> Result<CorollaryCubic> {
    require_constant_delay_part(qp)?;
    let (cond_b0, cond_a1, cond_a2) = sign_hypotheses(qp);
    if !cond_b0 {
        return Err(Error::Hypothesis(format!(
            "0 > b0 > -a0 fails (b0 = {}, a0 = {})",
            qp.b0(),
            qp.a0()
        )));
    }
    if !cond_a1 {
        return Err(Error::Hypothesis(format!(
            "a1 < 0 fails (a1 = {})",
            qp.a1()
        )));
    }
    if !cond_a2 {
        return Err(Error::Hypothesis(format!(
            "a2 > a1^2 / (2 |b0|) fails (a2 = {}, bound = {})",
            qp.a2(),
            qp.a1() * qp.a1() / (2.0 * qp.b0().abs())
        )));
    }
    let b0_abs = qp.b0().abs();
    Ok(CorollaryCubic {
        g3: (qp.a0() + 2.0 * b0_abs) / 6.0,
        g2: -qp.a1().abs() / 2.0,
        g1: -qp.a2(),
        g0: (qp.a1().abs() * qp.a2() + qp.a0() - b0_abs) / b0_abs,
    })
}

/// Number of distinct real roots of `coeffs` (ascending) in the open
/// interval (lo, hi), by sign variations of the Sturm chain.
///
/// For inputs with repeated roots the chain terminates at the gcd and
/// counts distinct roots. An endpoint landing exactly on a root is an
/// error; the caller perturbs.
pub fn sturm_count(coeffs: &[f64], lo: f64, hi: f64) -> Result<usize> {
    let p = poly::trim(coeffs, 0.0);
    if p.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::NonFinite("interval"));
    }
    if poly::eval(&p, lo) == 0.0 {
        return Err(Error::EndpointRoot(lo));
    }
    if poly::eval(&p, hi) == 0.0 {
        return Err(Error::EndpointRoot(hi));
    }
    if p.len() <= 1 {
        return Ok(0);
    }

    let chain = sturm_chain(&p);
    Ok(sign_variations(&chain, lo).saturating_sub(sign_variations(&chain, hi)))
}

fn sturm_chain(p: &[f64]) -> Vec<Vec<f64>> {
    let mut chain = vec![p.to_vec(), poly::derivative(p)];
    loop {
        let n = chain.len();
        let rem = neg_remainder(&chain[n - 2], &chain[n - 1]);
        if rem.is_empty() {
            break;
        }
        chain.push(rem);
    }
    chain
}

/// -(p mod d), normalized to unit max coefficient (positive scaling keeps
/// the sign sequence intact but stops coefficient blowup down the chain).
fn neg_remainder(p: &[f64], d: &[f64]) -> Vec<f64> {
    let mut r = p.to_vec();
    let dn = *d.last().expect("nonzero divisor");
    while r.len() >= d.len() {
        let k = r.len() - d.len();
        let factor = r.last().unwrap() / dn;
        for (i, &dc) in d.iter().enumerate() {
            r[k + i] -= factor * dc;
        }
        r.pop();
        // Strip cancellation noise so division terminates.
        while r
            .last()
            .is_some_and(|&c| c.abs() <= 1e-14 * factor.abs().max(1.0))
        {
            r.pop();
        }
    }
    let max = r.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if max == 0.0 {
        return Vec::new();
    }
    let trimmed = poly::trim(&r, 1e-12);
    trimmed.iter().map(|c| -c / max).collect()
}

fn sign_variations(chain: &[Vec<f64>], x: f64) -> usize {
    let mut count = 0;
    let mut prev = 0.0f64;
    for p in chain {
        let v = poly::eval(p, x);
        if v == 0.0 {
            continue;
        }
        if prev != 0.0 && (v > 0.0) != (prev > 0.0) {
            count += 1;
        }
        prev = v;
    }
    count
}

/// Corollary check: sign hypotheses plus at least one root of g in
/// (0, sqrt(2 a2 / |b0|)). Returns the certified interval of delays where
/// g < 0: between two roots when both lie inside, from the single root to
/// the threshold otherwise.
pub fn check_corollary(qp: &QuasiPolynomial) -> Result<(bool, Option<(f64, f64)>)> {
    require_constant_delay_part(qp)?;
    let (cond_b0, cond_a1, cond_a2) = sign_hypotheses(qp);
    if !(cond_b0 && cond_a1 && cond_a2) {
        return Ok((false, None));
    }
    let g = corollary_g(qp)?;
    let tau_upper = (2.0 * qp.a2() / qp.b0().abs()).sqrt();
    let coeffs = g.coefficients();

    let mut hi = tau_upper;
    let count = loop {
        match sturm_count(&coeffs, 1e-12, hi) {
            Ok(c) => break c,
            Err(Error::EndpointRoot(_)) => hi *= 1.0 - 1e-9,
            Err(e) => return Err(e),
        }
    };
    if count == 0 {
        return Ok((false, None));
    }

    let roots = roots_in_interval(&g, 1e-12, hi);
    let interval = match roots.len() {
        0 => None,
        1 => Some((roots[0], tau_upper)),
        _ => Some((roots[0], roots[1])),
    };
    Ok((true, interval))
}

/// Roots of g in (lo, hi) by dense sign scan, bisection and Newton polish.
fn roots_in_interval(g: &CorollaryCubic, lo: f64, hi: f64) -> Vec<f64> {
    const SCAN: usize = 4096;
    let mut roots = Vec::new();
    let mut prev_x = lo;
    let mut prev_v = g.eval(lo);
    for k in 1..=SCAN {
        let x = lo + (hi - lo) * k as f64 / SCAN as f64;
        let v = g.eval(x);
        if prev_v == 0.0 {
            roots.push(prev_x);
        } else if v != 0.0 && (v > 0.0) != (prev_v > 0.0) {
            let (mut a, mut b) = (prev_x, x);
            let mut fa = prev_v;
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let fm = g.eval(m);
                if fm == 0.0 || b - a < 1e-15 * hi.abs().max(1.0) {
                    a = m;
                    b = m;
                    break;
                }
                if (fm > 0.0) == (fa > 0.0) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            let mut r = 0.5 * (a + b);
            for _ in 0..2 {
                let d = (3.0 * g.g3 * r + 2.0 * g.g2) * r + g.g1;
                if d != 0.0 {
                    r -= g.eval(r) / d;
                }
            }
            roots.push(r);
        }
        prev_x = x;
        prev_v = v;
    }
    roots
}

/// The lower bound a1 / b0 below which no candidate delay can pass the
/// theorem check (W_i would start out negative near omega = 0).
pub fn remark_lower_bound(qp: &QuasiPolynomial) -> Result<f64> {
    if qp.b0() == 0.0 {
        return Err(Error::Hypothesis(
            "b0 = 0: lower bound a1/b0 undefined".into(),
        ));
    }
    Ok(qp.a1() / qp.b0())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::rpj;

    #[test]
    fn theorem_passes_inside_window() {
        let r = check_theorem(&rpj(), 2.5).unwrap();
        assert!(r.cond_b0 && r.cond_a1 && r.cond_a2 && r.b_small);
        assert!(r.passed, "{r:?}");
        assert!(r.omega_bar.is_some());
        assert!((r.tau_upper - 3.7225183487986806).abs() < 1e-12);
    }

    #[test]
    fn theorem_rejects_above_threshold() {
        let r = check_theorem(&rpj(), 5.0).unwrap();
        assert!(!r.passed);
        assert!(r.omega_bar.is_none());
    }

    #[test]
    fn theorem_rejects_small_tau() {
        // tau = 1.0 < a1/b0: no witness frequency exists.
        let r = check_theorem(&rpj(), 1.0).unwrap();
        assert!(!r.passed);
        assert!(r.omega_bar.is_none());
    }

    #[test]
    fn theorem_requires_constant_delay_part() {
        let qp = QuasiPolynomial::new(0.16, -0.23, 0.97, -0.14, 0.01, 0.0).unwrap();
        assert!(matches!(
            check_theorem(&qp, 2.5),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn corollary_cubic_fixture() {
        let g = corollary_g(&rpj()).unwrap();
        assert!((g.g3 - 11.0 / 150.0).abs() < 1e-12);
        assert!((g.g2 + 0.115).abs() < 1e-12);
        assert!((g.g1 + 0.97).abs() < 1e-12);
        assert!((g.g0 - 2431.0 / 1400.0).abs() < 1e-12);
    }

    #[test]
    fn corollary_cubic_names_failed_hypothesis() {
        // a1 > 0 violates the second hypothesis.
        let qp = QuasiPolynomial::new(0.16, 0.23, 0.97, -0.14, 0.0, 0.0).unwrap();
        match corollary_g(&qp) {
            Err(Error::Hypothesis(msg)) => assert!(msg.contains("a1"), "{msg}"),
            other => panic!("expected hypothesis error, got {other:?}"),
        }
    }

    #[test]
    fn sturm_fixture_g_has_two_roots() {
        let g = corollary_g(&rpj()).unwrap();
        assert_eq!(sturm_count(&g.coefficients(), 0.0, 3.7224).unwrap(), 2);
    }

    #[test]
    fn sturm_no_real_roots() {
        // x^2 + 1
        assert_eq!(sturm_count(&[1.0, 0.0, 1.0], -10.0, 10.0).unwrap(), 0);
    }

    #[test]
    fn sturm_counts_distinct_roots_of_square() {
        // (x - 1)^2 = x^2 - 2x + 1: one distinct root in (0, 2).
        assert_eq!(sturm_count(&[1.0, -2.0, 1.0], 0.0, 2.0).unwrap(), 1);
    }

    #[test]
    fn sturm_endpoint_and_zero_poly_errors() {
        assert!(matches!(
            sturm_count(&[0.0, 1.0], 0.0, 1.0),
            Err(Error::EndpointRoot(_))
        ));
        assert!(matches!(
            sturm_count(&[0.0, 0.0], 0.0, 1.0),
            Err(Error::ZeroPolynomial)
        ));
    }

    #[test]
    fn corollary_fixture_interval() {
        let (passed, interval) = check_corollary(&rpj()).unwrap();
        assert!(passed);
        let (lo, hi) = interval.unwrap();
        assert!((lo - 1.86988).abs() < 1e-3, "lo = {lo}");
        assert!((hi - 3.41087).abs() < 1e-3, "hi = {hi}");
    }

    #[test]
    fn corollary_rejects_failed_hypothesis() {
        // a2 too small: a2 <= a1^2 / (2 |b0|).
        let qp = QuasiPolynomial::new(0.16, -0.23, 0.1, -0.14, 0.0, 0.0).unwrap();
        let (passed, interval) = check_corollary(&qp).unwrap();
        assert!(!passed && interval.is_none());
    }

    #[test]
    fn remark_values() {
        assert!((remark_lower_bound(&rpj()).unwrap() - 1.6428571428571428).abs() < 1e-12);
        let qp = QuasiPolynomial::new(2.0, -1.0, 1.0, -1.0, 0.0, 0.0).unwrap();
        assert_eq!(remark_lower_bound(&qp).unwrap(), 1.0);
        let no_b0 = QuasiPolynomial::new(1.0, -1.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        assert!(remark_lower_bound(&no_b0).is_err());
    }
}
