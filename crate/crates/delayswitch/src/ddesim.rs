//! Time-domain cross-validation: method-of-steps integration of
//! v'(t) = A v(t) + B v(t - tau) + appeal, steady-state computation and
//! empirical convergence classification.

use serde::Serialize;

use crate::charpoly::{companion_matrices, QuasiPolynomial};
use crate::error::{Error, Result};

/// State magnitude past which the trajectory is truncated and flagged.
const DIVERGENCE_LIMIT: f64 = 1e15;
/// Log-envelope slope threshold separating decay from growth.
const ENVELOPE_SLOPE_TOL: f64 = 1e-4;
/// Minimum number of local extrema of |v - v*| needed to classify.
const MIN_EXTREMA: usize = 20;

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

/// The three-agent delayed system v'(t) = A v(t) + B v(t - tau) + appeal.
#[derive(Debug, Clone, Serialize)]
pub struct DelaySystem {
    pub a: Mat3,
    pub b: Mat3,
    pub appeal: Vec3,
    pub tau: f64,
}

impl DelaySystem {
    pub fn new(a: Mat3, b: Mat3, appeal: Vec3, tau: f64) -> Result<Self> {
        for m in [&a, &b] {
            for row in m {
                for v in row {
                    if !v.is_finite() {
                        return Err(Error::NonFinite("system matrix entry"));
                    }
                }
            }
        }
        if appeal.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("appeal"));
        }
        if !tau.is_finite() || tau < 0.0 {
            return Err(Error::NonFinite("tau"));
        }
        Ok(Self { a, b, appeal, tau })
    }

    /// Companion-form system whose characteristic function is `qp`.
    pub fn from_quasi_polynomial(qp: &QuasiPolynomial, appeal: Vec3, tau: f64) -> Result<Self> {
        let (a, b) = companion_matrices(qp);
        Self::new(a, b, appeal, tau)
    }
}

/// Initial data on [t0 - tau, t0] (t0 = 0 in this crate's frame).
#[derive(Debug, Clone)]
pub enum HistoryFunction {
    Constant(Vec3),
    /// v(s) = s^2 componentwise with s measured from the start of the
    /// history interval, i.e. (t + tau)^2 on [-tau, 0].
    Quadratic,
    /// Sampled history; needs at least 4 points for cubic interpolation.
    Tabulated(Vec<(f64, Vec3)>),
}

impl HistoryFunction {
    pub fn validate(&self, tau: f64) -> Result<()> {
        if let HistoryFunction::Tabulated(samples) = self {
            if samples.len() < 4 {
                return Err(Error::Config(
                    "tabulated history needs at least 4 samples".into(),
                ));
            }
            if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
                return Err(Error::Config(
                    "tabulated history times must increase".into(),
                ));
            }
            let (first, last) = (samples[0].0, samples[samples.len() - 1].0);
            if first > -tau || last < 0.0 {
                return Err(Error::HistoryDomain(-tau));
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64, tau: f64) -> Vec3 {
        match self {
            HistoryFunction::Constant(v) => *v,
            HistoryFunction::Quadratic => {
                let s = t + tau;
                [s * s, s * s, s * s]
            }
            HistoryFunction::Tabulated(samples) => {
                let times: Vec<f64> = samples.iter().map(|s| s.0).collect();
                let idx = interpolation_window(&times, t);
                std::array::from_fn(|c| {
                    let ys: [f64; 4] = std::array::from_fn(|k| samples[idx + k].1[c]);
                    lagrange4(&times[idx..idx + 4], &ys, t)
                })
            }
        }
    }
}

/// Computed trajectory with dense evaluation through cubic interpolation.
#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec3>,
    pub diverged: bool,
}

impl Trajectory {
    /// Evaluate the interpolant; exact at the stored nodes.
    pub fn eval(&self, t: f64) -> Vec3 {
        interp_nodes(&self.times, &self.states, t)
    }
}

/// Piecewise-cubic evaluation over stored nodes; exact at the nodes, nearest
/// node when fewer than four are available.
fn interp_nodes(times: &[f64], states: &[Vec3], t: f64) -> Vec3 {
    match times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
        Ok(i) => states[i],
        Err(i) if times.len() < 4 => states[i.min(times.len() - 1)],
        Err(_) => {
            let idx = interpolation_window(times, t);
            let mut out = [0.0; 3];
            for c in 0..3 {
                let ys: [f64; 4] = std::array::from_fn(|k| states[idx + k][c]);
                out[c] = lagrange4(&times[idx..idx + 4], &ys, t);
            }
            out
        }
    }
}

/// Start of a 4-node window bracketing t (clamped at the ends).
fn interpolation_window(times: &[f64], t: f64) -> usize {
    let i = match times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
        Ok(i) | Err(i) => i,
    };
    i.saturating_sub(2).min(times.len().saturating_sub(4))
}

/// Cubic Lagrange interpolation through four nodes.
fn lagrange4(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        let mut term = ys[i];
        for j in 0..4 {
            if i != j {
                term *= (x - xs[j]) / (xs[i] - xs[j]);
            }
        }
        acc += term;
    }
    acc
}

fn mat_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

/// Steady state v* with (A + B) v* + appeal = 0; independent of tau and of
/// the history.
pub fn steady_state(sys: &DelaySystem) -> Result<Vec3> {
    let mut m: [[f64; 4]; 3] = std::array::from_fn(|r| {
        [
            sys.a[r][0] + sys.b[r][0],
            sys.a[r][1] + sys.b[r][1],
            sys.a[r][2] + sys.b[r][2],
            -sys.appeal[r],
        ]
    });
    let scale = m
        .iter()
        .flat_map(|row| row[..3].iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    // Gaussian elimination with partial pivoting.
    for col in 0..3 {
        let pivot_row = (col..3)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        if m[pivot_row][col].abs() < 1e-12 * scale.max(1.0) {
            return Err(Error::SingularSystem);
        }
        m.swap(col, pivot_row);
        let pivot = m[col];
        for (r, row) in m.iter_mut().enumerate() {
            if r != col {
                let f = row[col] / pivot[col];
                for (cell, &p) in row.iter_mut().zip(&pivot).skip(col) {
                    *cell -= f * p;
                }
            }
        }
    }
    Ok([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

/// Method-of-steps integration with the classic 4th-order one-step scheme.
/// The delayed term is read from the history for t - tau <= 0 and from
/// cubic interpolation of the already computed trajectory otherwise.
pub fn integrate(
    sys: &DelaySystem,
    hist: &HistoryFunction,
    t_end: f64,
    h: f64,
) -> Result<Trajectory> {
    if !t_end.is_finite() || t_end <= 0.0 {
        return Err(Error::NonFinite("t_end"));
    }
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::NonFinite("h"));
    }
    if sys.tau > 0.0 && h > sys.tau / 4.0 {
        return Err(Error::StepTooLarge { h, tau: sys.tau });
    }
    hist.validate(sys.tau)?;

    let steps = (t_end / h).ceil() as usize;
    let h = t_end / steps as f64;
    let tau = sys.tau;

    let mut times = Vec::with_capacity(steps + 1);
    let mut states: Vec<Vec3> = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(hist.eval(0.0, tau));
    let mut diverged = false;

    // A + B applied to the same state when tau = 0.
    let derivative = |t: f64, v: &Vec3, times: &[f64], states: &[Vec3]| -> Vec3 {
        let delayed = if tau == 0.0 {
            *v
        } else {
            let s = t - tau;
            if s <= 0.0 {
                hist.eval(s, tau)
            } else {
                interp_nodes(times, states, s)
            }
        };
        let av = mat_vec(&sys.a, v);
        let bv = mat_vec(&sys.b, &delayed);
        [
            av[0] + bv[0] + sys.appeal[0],
            av[1] + bv[1] + sys.appeal[1],
            av[2] + bv[2] + sys.appeal[2],
        ]
    };

    'outer: for k in 0..steps {
        let t = k as f64 * h;
        let v = states[k];
        let k1 = derivative(t, &v, &times, &states);
        let v2 = add_scaled(&v, &k1, h / 2.0);
        let k2 = derivative(t + h / 2.0, &v2, &times, &states);
        let v3 = add_scaled(&v, &k2, h / 2.0);
        let k3 = derivative(t + h / 2.0, &v3, &times, &states);
        let v4 = add_scaled(&v, &k3, h);
        let k4 = derivative(t + h, &v4, &times, &states);
        let mut next = v;
        for c in 0..3 {
            next[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        times.push((k + 1) as f64 * h);
        states.push(next);
        if next
            .iter()
            .any(|x| !x.is_finite() || x.abs() > DIVERGENCE_LIMIT)
        {
            diverged = true;
            break 'outer;
        }
    }

    Ok(Trajectory {
        times,
        states,
        diverged,
    })
}

fn add_scaled(v: &Vec3, d: &Vec3, f: f64) -> Vec3 {
    [v[0] + f * d[0], v[1] + f * d[1], v[2] + f * d[2]]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    Converging,
    Diverging,
    Inconclusive,
}

/// Fit the log envelope of |v(t) - v*| over its local maxima; a negative
/// slope beyond tolerance means convergence, positive means divergence.
pub fn classify(traj: &Trajectory, v_star: &Vec3) -> Result<Classification> {
    if traj.diverged {
        return Ok(Classification::Diverging);
    }
    let r: Vec<f64> = traj
        .states
        .iter()
        .map(|s| {
            let d = [s[0] - v_star[0], s[1] - v_star[1], s[2] - v_star[2]];
            (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
        })
        .collect();

    let mut extrema = 0usize;
    let mut maxima: Vec<(f64, f64)> = Vec::new();
    for i in 1..r.len().saturating_sub(1) {
        let is_max = r[i] > r[i - 1] && r[i] >= r[i + 1];
        let is_min = r[i] < r[i - 1] && r[i] <= r[i + 1];
        if is_max || is_min {
            extrema += 1;
        }
        if is_max && r[i] > 0.0 {
            maxima.push((traj.times[i], r[i].ln()));
        }
    }
    if extrema < MIN_EXTREMA {
        return Err(Error::TooShort {
            extrema,
            needed: MIN_EXTREMA,
        });
    }

    // Least-squares slope of ln r over the envelope maxima.
    let n = maxima.len() as f64;
    let mean_t = maxima.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = maxima.iter().map(|p| p.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (t, y) in &maxima {
        num += (t - mean_t) * (y - mean_y);
        den += (t - mean_t) * (t - mean_t);
    }
    if den == 0.0 {
        return Ok(Classification::Inconclusive);
    }
    let slope = num / den;
    Ok(if slope < -ENVELOPE_SLOPE_TOL {
        Classification::Converging
    } else if slope > ENVELOPE_SLOPE_TOL {
        Classification::Diverging
    } else {
        Classification::Inconclusive
    })
}

/// Default step for a given delay: min(tau / 20, 0.05), or 0.05 when tau = 0.
pub fn default_step(tau: f64) -> f64 {
    if tau > 0.0 {
        (tau / 20.0).min(0.05)
    } else {
        0.05
    }
}
