//! Small real-polynomial helpers shared by the analysis modules.
//!
//! Coefficients are stored in ascending order: `coeffs[k]` multiplies `x^k`.

/// Horner evaluation.
pub(crate) fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Formal derivative.
pub(crate) fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

/// Drop leading coefficients that are negligible relative to the largest one.
pub(crate) fn trim(coeffs: &[f64], rel_tol: f64) -> Vec<f64> {
    let max = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if max == 0.0 {
        return Vec::new();
    }
    let mut end = coeffs.len();
    while end > 0 && coeffs[end - 1].abs() <= rel_tol * max {
        end -= 1;
    }
    coeffs[..end].to_vec()
}

/// All real roots of the monic cubic x^3 + c2 x^2 + c1 x + c0, ascending.
///
/// Closed form (trigonometric for three real roots, Cardano for one)
/// followed by two Newton polish steps per root.
pub(crate) fn monic_cubic_roots(c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    // Depressed form t^3 + p t + q with x = t - c2/3.
    let shift = c2 / 3.0;
    let p = c1 - c2 * c2 / 3.0;
    let q = 2.0 * c2.powi(3) / 27.0 - c2 * c1 / 3.0 + c0;

    let mut roots = Vec::with_capacity(3);
    let disc = -4.0 * p.powi(3) - 27.0 * q * q;
    if disc > 0.0 {
        // Three distinct real roots.
        let m = 2.0 * (-p / 3.0).sqrt();
        let theta = (3.0 * q / (p * m)).clamp(-1.0, 1.0).acos() / 3.0;
        for k in 0..3 {
            let t = m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
            roots.push(t - shift);
        }
    } else if p == 0.0 && q == 0.0 {
        roots.push(-shift);
    } else {
        // One real root (or a repeated pair at disc == 0; callers gate on the
        // discriminant before trusting multiplicity).
        let half_q = q / 2.0;
        let s = (half_q * half_q + p.powi(3) / 27.0).max(0.0).sqrt();
        let u = (-half_q + s).cbrt();
        let v = (-half_q - s).cbrt();
        roots.push(u + v - shift);
    }

    let coeffs = [c0, c1, c2, 1.0];
    let deriv = derivative(&coeffs);
    for r in roots.iter_mut() {
        for _ in 0..2 {
            let d = eval(&deriv, *r);
            if d != 0.0 {
                *r -= eval(&coeffs, *r) / d;
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots
}

/// Discriminant of the monic cubic x^3 + c2 x^2 + c1 x + c0.
pub(crate) fn monic_cubic_discriminant(c2: f64, c1: f64, c0: f64) -> f64 {
    18.0 * c2 * c1 * c0 - 4.0 * c2.powi(3) * c0 + c2 * c2 * c1 * c1
        - 4.0 * c1.powi(3)
        - 27.0 * c0 * c0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_three_real_roots() {
        // (x-1)(x-2)(x-3) = x^3 - 6x^2 + 11x - 6
        let r = monic_cubic_roots(-6.0, 11.0, -6.0);
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn cubic_one_real_root() {
        // x^3 + 1 has the single real root -1.
        let r = monic_cubic_roots(0.0, 0.0, 1.0);
        assert_eq!(r.len(), 1);
        assert!((r[0] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn discriminant_signs() {
        assert!(monic_cubic_discriminant(-6.0, 11.0, -6.0) > 0.0);
        assert!(monic_cubic_discriminant(0.0, 0.0, 1.0) < 0.0);
    }
}
