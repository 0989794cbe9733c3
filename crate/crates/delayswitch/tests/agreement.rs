//! Cross-module agreement: the switch schedule, the hodograph root count,
//! the closed-form criteria and the time-domain simulation must all tell the
//! same story about the same system.

mod common;

use delayswitch::ddesim::{
    classify, integrate, steady_state, Classification, DelaySystem, HistoryFunction,
};
use delayswitch::fixtures::{rpj, rpj_appeal};
use delayswitch::{criteria, mikhailov, switches};
use rand::Rng;

/// Running count from the schedule vs the hodograph count, fixture system,
/// random delays over [0, 60].
#[test]
fn schedule_matches_hodograph_on_fixture() {
    let qp = rpj();
    let sched = switches::schedule(&qp, 60.0).unwrap();
    let mut rng = common::rng(101);
    let mut checked = 0;
    while checked < 200 {
        let tau = rng.gen_range(0.0..60.0);
        // Exactly on a switch both sides are ill-defined; stay clear.
        if sched.events.iter().any(|e| (e.tau - tau).abs() < 1e-3) {
            continue;
        }
        let n = match mikhailov::rhp_count(&qp, tau) {
            Ok(n) => n,
            Err(_) => continue,
        };
        assert_eq!(n, sched.count_at(tau), "tau = {tau}");
        checked += 1;
    }
}

/// Same agreement over random two-crossing systems.
#[test]
fn schedule_matches_hodograph_random_systems() {
    let mut rng = common::rng(103);
    let mut checked = 0;
    while checked < 50 {
        let qp = common::random_switching_qp(&mut rng);
        let tau_max = rng.gen_range(5.0..40.0);
        let Ok(sched) = switches::schedule(&qp, tau_max) else {
            continue;
        };
        let tau = rng.gen_range(0.0..tau_max);
        if sched.events.iter().any(|e| (e.tau - tau).abs() < 1e-2) {
            continue;
        }
        let n = match mikhailov::rhp_count(&qp, tau) {
            Ok(n) => n,
            Err(_) => continue,
        };
        assert_eq!(n, sched.count_at(tau), "tau = {tau}, qp = {:?}", qp);
        checked += 1;
    }
}

/// Frequency-domain verdict vs simulated envelope at the four fixture delays.
#[test]
fn analysis_agrees_with_simulation() {
    let qp = rpj();
    for tau in [1.8f64, 2.5, 4.0] {
        let n = mikhailov::rhp_count(&qp, tau).unwrap();
        let sys = DelaySystem::from_quasi_polynomial(&qp, rpj_appeal(), tau).unwrap();
        let v_star = steady_state(&sys).unwrap();
        // Perturb off the steady state so the envelope is nontrivial.
        let hist = HistoryFunction::Constant([v_star[0] + 1.0, v_star[1], v_star[2]]);
        let h = (tau / 40.0).min(0.02);
        let traj = integrate(&sys, &hist, 400.0, h).unwrap();
        let class = classify(&traj, &v_star).unwrap();
        if n == 0 {
            assert_eq!(class, Classification::Converging, "tau = {tau}");
        } else {
            assert_eq!(class, Classification::Diverging, "tau = {tau}");
        }
    }
}

/// A passed theorem certificate must imply a root-free right half plane at
/// the certified delay (the certificate is pointwise: these systems are
/// unstable without the delay).
#[test]
fn theorem_certificate_is_sound() {
    let mut rng = common::rng(107);
    let mut passed_any = false;
    for _ in 0..40 {
        let qp = common::random_switching_qp(&mut rng);
        let (ok, interval) = match criteria::check_corollary(&qp) {
            Ok(r) => r,
            Err(_) => continue,
        };
        let (Some((lo, hi)), true) = (interval, ok) else {
            continue;
        };
        for frac in [0.25, 0.5, 0.75] {
            let tau_bar = lo + (hi - lo) * frac;
            let report = criteria::check_theorem(&qp, tau_bar).unwrap();
            if !report.passed {
                continue;
            }
            passed_any = true;
            match mikhailov::rhp_count(&qp, tau_bar) {
                Ok(n) => assert_eq!(n, 0, "tau = {tau_bar}, qp = {:?}", qp),
                Err(_) => continue,
            }
        }
    }
    assert!(passed_any, "generator never produced a certifiable system");
}

/// The corollary interval (shrunk by a margin) must pass the theorem check
/// pointwise and correspond to a stable window.
#[test]
fn corollary_interval_is_inside_stable_window() {
    let qp = rpj();
    let (ok, interval) = criteria::check_corollary(&qp).unwrap();
    assert!(ok);
    let (lo, hi) = interval.unwrap();
    let sched = switches::schedule(&qp, 10.0).unwrap();
    // The grid witness is conservative very close to a switch; stay a little
    // inside the certified interval.
    let margin = 0.05 * (hi - lo);
    for k in 0..=10 {
        let tau = lo + margin + (hi - lo - 2.0 * margin) * k as f64 / 10.0;
        assert!(
            criteria::check_theorem(&qp, tau).unwrap().passed,
            "tau = {tau}"
        );
        assert_eq!(sched.count_at(tau), 0, "tau = {tau}");
    }
}

/// Below the first stabilizing switch the fixture keeps its zero-delay pair,
/// and the theorem check must refuse to certify such a delay.
#[test]
fn fixture_unstable_below_first_switch() {
    let qp = rpj();
    assert_eq!(mikhailov::rhp_count(&qp, 1.0).unwrap(), 2);
    let report = criteria::check_theorem(&qp, 1.0).unwrap();
    assert!(!report.passed);
}
