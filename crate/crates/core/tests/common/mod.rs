//! Independent reference implementations used only by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use molcav::meanfield::SteadyState;
use molcav::params::NormalizedParams;
use molcav::stability::spectral_abscissa;
use molcav::Mat8;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Solves A V + V Aᵀ = −D through the 64×64 system (I⊗A + A⊗I) vec V = −vec D.
pub fn kron_lyapunov(a: &Mat8, d: &Mat8) -> Mat8 {
    let n = 8;
    let mut big = DMatrix::<f64>::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                // Column-major vec: V[(r, c)] sits at c*n + r.
                big[(j * n + i, j * n + k)] += a[(i, k)];
                big[(j * n + i, k * n + i)] += a[(j, k)];
            }
        }
    }
    let rhs = DVector::from_iterator(n * n, d.iter().map(|v| -v));
    let sol = big.lu().solve(&rhs).expect("nonsingular Kronecker system");
    Mat8::from_column_slice(sol.as_slice())
}

/// Drift matrix expanded from the complex fluctuation equations
///
///   δȧ1 = −(κ1 + iΔ′)δa1 − iJ1 δa2 − i Σ G_k (δb_k + δb_k†)
///   δȧ2 = −(κ2 + iΔ2c)δa2 − iJ2 δa1
///   δḃ_k = −(γ_k + i)δb_k − i(G_k* δa1 + G_k δa1†)
///
/// by pushing every quadrature unit vector through them. Amplitudes are kept
/// as x + iy (no 1/√2), which the equations' linearity allows, so every
/// product is exact.
pub fn expanded_drift(np: &NormalizedParams, ss: &SteadyState) -> Mat8 {
    let g = ss.g_eff();
    let gamma = np.gammas();
    let mut out = Mat8::zeros();
    for col in 0..8 {
        let mut e = [0.0; 8];
        e[col] = 1.0;
        let c = |k: usize| Complex64::new(e[2 * k], e[2 * k + 1]);
        let (a1, a2, b) = (c(0), c(1), [c(2), c(3)]);

        let mut da1 = -Complex64::new(np.kappa1, ss.delta_prime) * a1 - I * np.j1 * a2;
        for k in 0..2 {
            da1 -= I * g[k] * (b[k] + b[k].conj());
        }
        let da2 = -Complex64::new(np.kappa2, np.delta_c2) * a2 - I * np.j2 * a1;
        let db: Vec<Complex64> = (0..2)
            .map(|k| {
                -Complex64::new(gamma[k], 1.0) * b[k] - I * (g[k].conj() * a1 + g[k] * a1.conj())
            })
            .collect();

        for (m, z) in [da1, da2, db[0], db[1]].into_iter().enumerate() {
            out[(2 * m, col)] = z.re;
            out[(2 * m + 1, col)] = z.im;
        }
    }
    out
}

/// Damped fixed-point iteration on the full steady-state equations, started
/// from the linear (uncoupled-vibration) solution.
pub fn fixed_point_alpha1(
    np: &NormalizedParams,
    damping: f64,
    max_iter: usize,
) -> Option<Complex64> {
    let [g1, g2] = np.couplings();
    let d2 = Complex64::new(np.kappa2, np.delta_c2);
    let step = |alpha1: Complex64, delta_prime: f64| {
        let alpha2 = (np.e2 - I * np.j2 * alpha1) / d2;
        (np.e1 - I * np.j1 * alpha2) / Complex64::new(np.kappa1, delta_prime)
    };
    let mut alpha1 = step(Complex64::new(0.0, 0.0), np.delta());
    alpha1 = step(alpha1, np.delta());
    for _ in 0..max_iter {
        let u = alpha1.norm_sqr();
        let beta1 = -I * g1 * u / Complex64::new(np.gamma1, 1.0);
        let beta2 = -I * g2 * u / Complex64::new(np.gamma2, 1.0);
        let delta_prime = np.delta() + 2.0 * (g1 * beta1).re + 2.0 * (g2 * beta2).re;
        let next = (1.0 - damping) * alpha1 + damping * step(alpha1, delta_prime);
        if (next - alpha1).norm() <= 1e-15 * next.norm().max(1e-300) {
            return Some(next);
        }
        alpha1 = next;
    }
    None
}

/// Random Hurwitz matrix: Gaussian entries, shifted so the spectral abscissa
/// is at most `max_margin`.
pub fn random_stable(rng: &mut ChaCha8Rng, max_margin: f64) -> Mat8 {
    let mut a = Mat8::from_fn(|_, _| gauss(rng) / 8f64.sqrt());
    let m = spectral_abscissa(&a).unwrap();
    let shift = (m - max_margin).max(0.0) + rng.random_range(0.0..0.5);
    for i in 0..8 {
        a[(i, i)] -= shift;
    }
    a
}

/// Random symmetric positive-definite diffusion matrix.
pub fn random_spd(rng: &mut ChaCha8Rng) -> Mat8 {
    let b = Mat8::from_fn(|_, _| gauss(rng));
    b * b.transpose() / 8.0 + Mat8::identity() * 0.1
}

pub fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    // Box–Muller.
    let u1: f64 = rng.random_range(f64::EPSILON..1.0);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}
