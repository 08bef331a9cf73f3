//! Asymptotic stability of the drift matrix.
//!
//! The verdict comes from the eigenvalues of A. A Routh-Hurwitz test on the
//! characteristic polynomial runs alongside it as an independent check.

use nalgebra::linalg::Schur;
use serde::Serialize;

use crate::dynamics::DriftMatrix;
use crate::error::{Error, Result};
use crate::Mat8;

pub use crate::sweep::{stability_map, MapPoint, StabilityMap};

/// Within this distance of the imaginary axis the two tests may disagree.
pub const BOUNDARY_BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityReport {
    pub stable: bool,
    /// Largest real part among the eigenvalues of A.
    pub margin: f64,
    pub routh_stable: bool,
    /// False only if the two tests disagree outside the boundary band.
    pub method_agreement: bool,
}

/// Largest real eigenvalue part of a general real matrix.
pub fn spectral_abscissa(a: &Mat8) -> Result<f64> {
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure(
            "drift matrix has non-finite entries".into(),
        ));
    }
    let schur = Schur::try_new(*a, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::NumericalFailure("Schur iteration did not converge".into()))?;
    Ok(schur
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Coefficients `[1, c1, …, c8]` of det(λI − A) by the Faddeev–LeVerrier recursion.
pub fn characteristic_polynomial(a: &Mat8) -> [f64; 9] {
    let mut coeffs = [0.0; 9];
    coeffs[0] = 1.0;
    let mut m = Mat8::zeros();
    for k in 1..=8 {
        m = a * m + Mat8::identity() * coeffs[k - 1];
        coeffs[k] = -(a * m).trace() / k as f64;
    }
    coeffs
}

/// Routh table test: true iff every root of the polynomial has negative real part.
///
/// A zero in the first column means roots on or right of the imaginary axis,
/// which counts as not stable.
pub fn routh_hurwitz(coeffs: &[f64]) -> bool {
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return true;
    }
    if coeffs[0] == 0.0 {
        return false;
    }
    let lead = coeffs[0];
    let p: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    let width = degree / 2 + 1;
    let mut prev: Vec<f64> = (0..width)
        .map(|j| p.get(2 * j).copied().unwrap_or(0.0))
        .collect();
    let mut cur: Vec<f64> = (0..width)
        .map(|j| p.get(2 * j + 1).copied().unwrap_or(0.0))
        .collect();
    let scale = p.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    for row in 1..=degree {
        let pivot = cur[0];
        if !(pivot.abs() > f64::EPSILON * scale * 1e-3) || pivot < 0.0 || !pivot.is_finite() {
            return false;
        }
        if row == degree {
            break;
        }
        let next: Vec<f64> = (0..width)
            .map(|j| {
                let a = prev.get(j + 1).copied().unwrap_or(0.0);
                let b = cur.get(j + 1).copied().unwrap_or(0.0);
                (pivot * a - prev[0] * b) / pivot
            })
            .collect();
        prev = cur;
        cur = next;
    }
    true
}

pub fn is_stable(a: &DriftMatrix) -> Result<StabilityReport> {
    report(a.matrix())
}

/// Stability report for an arbitrary real 8×8 matrix.
pub fn report(a: &Mat8) -> Result<StabilityReport> {
    let routh_stable = routh_hurwitz(&characteristic_polynomial(a));
    let margin = spectral_abscissa(a).map_err(|e| {
        Error::NumericalFailure(format!(
            "{e} (Routh-Hurwitz verdict: stable = {routh_stable})"
        ))
    })?;
    let stable = margin < 0.0;
    Ok(StabilityReport {
        stable,
        margin,
        routh_stable,
        method_agreement: stable == routh_stable || margin.abs() < BOUNDARY_BAND,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn negative_identity_is_stable() {
        let r = report(&(-Mat8::identity())).unwrap();
        assert!(r.stable && r.routh_stable && r.method_agreement);
        assert_relative_eq!(r.margin, -1.0, epsilon = 1e-14);
    }

    #[test]
    fn characteristic_polynomial_of_diagonal() {
        let d = Mat8::from_diagonal(&nalgebra::SVector::<f64, 8>::from_column_slice(&[
            -1.0, -2.0, -3.0, -4.0, -5.0, -6.0, -7.0, -8.0,
        ]));
        let c = characteristic_polynomial(&d);
        // (λ+1)(λ+2)…(λ+8): c1 = 36, c8 = 8!.
        assert_relative_eq!(c[1], 36.0, max_relative = 1e-14);
        assert_relative_eq!(c[8], 40320.0, max_relative = 1e-12);
        assert!(routh_hurwitz(&c));
    }

    #[test]
    fn routh_small_cases() {
        assert!(routh_hurwitz(&[1.0, 3.0, 2.0])); // (s+1)(s+2)
        assert!(!routh_hurwitz(&[1.0, -1.0, -2.0])); // (s-2)(s+1)
        assert!(!routh_hurwitz(&[1.0, 0.0, 1.0])); // s² + 1
        assert!(routh_hurwitz(&[1.0, 6.0, 11.0, 6.0])); // (s+1)(s+2)(s+3)
        assert!(!routh_hurwitz(&[1.0, 1.0, 1.0, 2.0])); // RHP pair
    }

    #[test]
    fn shifted_identity_is_unstable() {
        let r = report(&(Mat8::identity() * 0.5)).unwrap();
        assert!(!r.stable && !r.routh_stable && r.method_agreement);
    }

    #[test]
    fn non_finite_matrix_is_numerical_failure() {
        let mut a = -Mat8::identity();
        a[(2, 3)] = f64::NAN;
        assert!(matches!(report(&a), Err(Error::NumericalFailure(_))));
    }
}
