//! The characteristic quasi-polynomial W(lambda) = P(lambda) + Q(lambda) e^(-lambda tau)
//! with P monic cubic and Q quadratic.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly;

/// Complex evaluation result.
pub type ComplexValue = Complex64;

/// Coefficients of W(lambda) = lambda^3 + a2 lambda^2 + a1 lambda + a0
/// + (b2 lambda^2 + b1 lambda + b0) e^(-lambda tau).
///
/// Construction rejects coefficient sets with W(0) = a0 + b0 near zero,
/// since a root at the origin never leaves the imaginary axis and the
/// amplitude cubic degenerates there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiPolynomial {
    a0: f64,
    a1: f64,
    a2: f64,
    b0: f64,
    b1: f64,
    b2: f64,
}

/// Default relative tolerance for the W(0) != 0 guard.
pub const ORIGIN_GUARD_TOL: f64 = 1e-9;

impl QuasiPolynomial {
    pub fn new(a0: f64, a1: f64, a2: f64, b0: f64, b1: f64, b2: f64) -> Result<Self> {
        Self::with_tolerance(a0, a1, a2, b0, b1, b2, ORIGIN_GUARD_TOL)
    }

    pub fn with_tolerance(
        a0: f64,
        a1: f64,
        a2: f64,
        b0: f64,
        b1: f64,
        b2: f64,
        origin_tol: f64,
    ) -> Result<Self> {
        for v in [a0, a1, a2, b0, b1, b2] {
            if !v.is_finite() {
                return Err(Error::NonFinite("quasi-polynomial coefficient"));
            }
        }
        let scale = 1.0f64.max(a0.abs()).max(b0.abs());
        if (a0 + b0).abs() <= origin_tol * scale {
            return Err(Error::ZeroAtOrigin(a0 + b0));
        }
        Ok(Self {
            a0,
            a1,
            a2,
            b0,
            b1,
            b2,
        })
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }
    pub fn a1(&self) -> f64 {
        self.a1
    }
    pub fn a2(&self) -> f64 {
        self.a2
    }
    pub fn b0(&self) -> f64 {
        self.b0
    }
    pub fn b1(&self) -> f64 {
        self.b1
    }
    pub fn b2(&self) -> f64 {
        self.b2
    }

    /// True when the delayed part is the constant b0 alone.
    pub fn delay_part_is_constant(&self) -> bool {
        self.b1 == 0.0 && self.b2 == 0.0
    }

    /// P(lambda) = lambda^3 + a2 lambda^2 + a1 lambda + a0.
    pub fn eval_p(&self, lambda: ComplexValue) -> ComplexValue {
        ((lambda + self.a2) * lambda + self.a1) * lambda + self.a0
    }

    /// Q(lambda) = b2 lambda^2 + b1 lambda + b0.
    pub fn eval_q(&self, lambda: ComplexValue) -> ComplexValue {
        (lambda * self.b2 + self.b1) * lambda + self.b0
    }

    /// W(lambda) = P(lambda) + Q(lambda) e^(-lambda tau).
    ///
    /// The exponential is assembled as e^(-Re(lambda) tau) (cos, -sin)(Im(lambda) tau)
    /// so overflow control stays with the real scale factor.
    pub fn eval(&self, lambda: ComplexValue, tau: f64) -> Result<ComplexValue> {
        if !lambda.re.is_finite() || !lambda.im.is_finite() {
            return Err(Error::NonFinite("lambda"));
        }
        if !tau.is_finite() || tau < 0.0 {
            return Err(Error::NonFinite("tau"));
        }
        let scale = (-lambda.re * tau).exp();
        let phase = lambda.im * tau;
        let exp_factor = ComplexValue::new(scale * phase.cos(), -scale * phase.sin());
        Ok(self.eval_p(lambda) + self.eval_q(lambda) * exp_factor)
    }

    /// Real and imaginary parts of W(i omega) for real omega >= 0.
    ///
    /// With b1 = b2 = 0 this reduces to
    /// W_r = -a2 omega^2 + a0 + b0 cos(omega tau),
    /// W_i = -omega^3 + a1 omega - b0 sin(omega tau).
    pub fn real_imag(&self, omega: f64, tau: f64) -> Result<(f64, f64)> {
        if !omega.is_finite() || omega < 0.0 {
            return Err(Error::NonFinite("omega"));
        }
        if !tau.is_finite() || tau < 0.0 {
            return Err(Error::NonFinite("tau"));
        }
        let (s, c) = (omega * tau).sin_cos();
        let q_re = self.b0 - self.b2 * omega * omega;
        let q_im = self.b1 * omega;
        let p_re = self.a0 - self.a2 * omega * omega;
        let p_im = omega * (self.a1 - omega * omega);
        // (q_re + i q_im)(cos - i sin)
        let w_r = p_re + q_re * c + q_im * s;
        let w_i = p_im + q_im * c - q_re * s;
        Ok((w_r, w_i))
    }

    /// Coefficients of the tau = 0 cubic lambda^3 + (a2+b2) lambda^2 + (a1+b1) lambda + (a0+b0).
    pub fn zero_delay_cubic(&self) -> (f64, f64, f64) {
        (self.a2 + self.b2, self.a1 + self.b1, self.a0 + self.b0)
    }

    /// Number of roots with positive real part at tau = 0, by the
    /// Routh-Hurwitz table of the zero-delay cubic.
    ///
    /// A first-column entry within 1e-12 of zero (relative to its row scale)
    /// signals a root on or near the imaginary axis and is reported as a
    /// degeneracy rather than patched with the epsilon trick.
    pub fn rhp_count_zero_delay(&self) -> Result<usize> {
        let (c2, c1, c0) = self.zero_delay_cubic();
        // Rows of the first column together with the magnitude scale of the
        // products each entry was formed from.
        let r3 = if c2 != 0.0 {
            (c2 * c1 - c0) / c2
        } else {
            f64::NAN
        };
        let r3_scale = ((c2 * c1).abs() + c0.abs()) / c2.abs().max(1e-300);
        let column = [
            (1.0, 1.0),
            (c2, 1.0f64.max(c2.abs())),
            (r3, 1.0f64.max(r3_scale)),
            (c0, 1.0f64.max(c0.abs())),
        ];
        for (row, (entry, scale)) in column.iter().enumerate() {
            if !entry.is_finite() || entry.abs() < 1e-12 * scale {
                return Err(Error::RouthDegenerate { row, value: *entry });
            }
        }
        let changes = column
            .windows(2)
            .filter(|w| (w[0].0 > 0.0) != (w[1].0 > 0.0))
            .count();
        Ok(changes)
    }
}

/// Read a quasi-polynomial off companion-form system matrices, i.e. matrices
/// for which lambda I - A - B e^(-lambda tau) has the shape
///
/// ```text
/// | lambda   0        a0 + b0 e |
/// | 1        lambda  -a1 - b1 e |
/// | 0        1        lambda + a2 + b2 e |
/// ```
///
/// Only column 3 of A and B is free; every other entry is pinned. General
/// matrices would generate e^(-2 lambda tau) and e^(-3 lambda tau) terms,
/// which this representation cannot hold, so they are rejected.
pub fn from_companion(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> Result<QuasiPolynomial> {
    let fixed_a = [
        (0, 0, 0.0),
        (0, 1, 0.0),
        (1, 0, -1.0),
        (1, 1, 0.0),
        (2, 0, 0.0),
        (2, 1, -1.0),
    ];
    for (r, c, expected) in fixed_a {
        if a[r][c] != expected {
            return Err(Error::CompanionShape {
                name: "A",
                row: r,
                col: c,
                value: a[r][c],
                expected,
            });
        }
    }
    for (r, row) in b.iter().enumerate() {
        for (c, &value) in row[..2].iter().enumerate() {
            if value != 0.0 {
                return Err(Error::CompanionShape {
                    name: "B",
                    row: r,
                    col: c,
                    value,
                    expected: 0.0,
                });
            }
        }
    }
    QuasiPolynomial::new(-a[0][2], a[1][2], -a[2][2], -b[0][2], b[1][2], -b[2][2])
}

/// Companion-form matrices (A, B) whose characteristic function is `qp`;
/// the exact inverse of [`from_companion`].
pub fn companion_matrices(qp: &QuasiPolynomial) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
    let a = [
        [0.0, 0.0, -qp.a0()],
        [-1.0, 0.0, qp.a1()],
        [0.0, -1.0, -qp.a2()],
    ];
    let b = [
        [0.0, 0.0, -qp.b0()],
        [0.0, 0.0, qp.b1()],
        [0.0, 0.0, -qp.b2()],
    ];
    (a, b)
}

/// Real roots of the monic cubic x^3 + c2 x^2 + c1 x + c0 (exposed for the
/// analysis modules; not part of the quasi-polynomial surface).
pub(crate) fn cubic_real_roots(c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    poly::monic_cubic_roots(c2, c1, c0)
}
