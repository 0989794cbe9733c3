//! Reference coefficient sets used across the test suites.

use crate::charpoly::QuasiPolynomial;

/// The worked three-agent example: a0 = 0.16, a1 = -0.23, a2 = 0.97,
/// b0 = -0.14, b1 = b2 = 0. Unstable at tau = 0 with two right-half-plane
/// roots; gains stability on (1.86902, 3.7295).
pub fn rpj() -> QuasiPolynomial {
    QuasiPolynomial::new(0.16, -0.23, 0.97, -0.14, 0.0, 0.0).unwrap()
}

/// Appeal vector of the worked example: (1, 1, -2).
pub fn rpj_appeal() -> [f64; 3] {
    [1.0, 1.0, -2.0]
}
