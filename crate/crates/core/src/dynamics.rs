//! Drift and diffusion matrices of the linearized fluctuations.
//!
//! Quadrature ordering is fixed for the whole crate:
//! `(δx1, δy1, δx2, δy2, δq1, δp1, δq2, δp2)` with δx = (δa + δa†)/√2, so the
//! vacuum variance is 1/2. See [`crate::entanglement::Mode`] for the index
//! blocks of each mode.

use serde::Serialize;

use crate::meanfield::SteadyState;
use crate::params::NormalizedParams;
use crate::Mat8;

pub const X1: usize = 0;
pub const Y1: usize = 1;
pub const X2: usize = 2;
pub const Y2: usize = 3;
pub const Q1: usize = 4;
pub const P1: usize = 5;
pub const Q2: usize = 6;
pub const P2: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftMatrix(pub Mat8);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiffusionMatrix(pub Mat8);

impl DriftMatrix {
    pub fn matrix(&self) -> &Mat8 {
        &self.0
    }
}

impl DiffusionMatrix {
    pub fn matrix(&self) -> &Mat8 {
        &self.0
    }
}

pub fn build_drift(np: &NormalizedParams, ss: &SteadyState) -> DriftMatrix {
    // ω_m = 1 in normalized units.
    const OMEGA_M: f64 = 1.0;
    let dp = ss.delta_prime;
    let [g1, g2] = ss.g_eff();
    let mut a = Mat8::zeros();

    a[(X1, X1)] = -np.kappa1;
    a[(X1, Y1)] = dp;
    a[(X1, Y2)] = np.j1;
    a[(X1, Q1)] = 2.0 * g1.im;
    a[(X1, Q2)] = 2.0 * g2.im;

    a[(Y1, X1)] = -dp;
    a[(Y1, Y1)] = -np.kappa1;
    a[(Y1, X2)] = -np.j1;
    a[(Y1, Q1)] = -2.0 * g1.re;
    a[(Y1, Q2)] = -2.0 * g2.re;

    a[(X2, Y1)] = np.j2;
    a[(X2, X2)] = -np.kappa2;
    a[(X2, Y2)] = np.delta_c2;

    a[(Y2, X1)] = -np.j2;
    a[(Y2, X2)] = -np.delta_c2;
    a[(Y2, Y2)] = -np.kappa2;

    a[(Q1, Q1)] = -np.gamma1;
    a[(Q1, P1)] = OMEGA_M;

    a[(P1, X1)] = -2.0 * g1.re;
    a[(P1, Y1)] = -2.0 * g1.im;
    a[(P1, Q1)] = -OMEGA_M;
    a[(P1, P1)] = -np.gamma1;

    a[(Q2, Q2)] = -np.gamma2;
    a[(Q2, P2)] = OMEGA_M;

    a[(P2, X1)] = -2.0 * g2.re;
    a[(P2, Y1)] = -2.0 * g2.im;
    a[(P2, Q2)] = -OMEGA_M;
    a[(P2, P2)] = -np.gamma2;

    DriftMatrix(a)
}

/// Vacuum noise on both cavities, thermal noise γ(2n̄+1) on the vibrations.
pub fn build_diffusion(np: &NormalizedParams) -> DiffusionMatrix {
    let diag = nalgebra::SVector::<f64, 8>::from_column_slice(&[
        np.kappa1,
        np.kappa1,
        np.kappa2,
        np.kappa2,
        np.gamma1 * (2.0 * np.nbar_b1 + 1.0),
        np.gamma1 * (2.0 * np.nbar_b1 + 1.0),
        np.gamma2 * (2.0 * np.nbar_b2 + 1.0),
        np.gamma2 * (2.0 * np.nbar_b2 + 1.0),
    ]);
    DiffusionMatrix(Mat8::from_diagonal(&diag))
}
