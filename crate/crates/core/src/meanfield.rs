//! Classical steady state of the driven system.
//!
//! Eliminating α2 from the steady-state equations leaves
//!
//! ```text
//! α1 · (A + i(B − w)) = S,    w = k |α1|²,
//! ```
//!
//! with `S = E1 − iJ1E2/(κ2 + iΔ_2c)`, `A + iB = κ1 + iΔ + J1J2/(κ2 + iΔ_2c)`
//! and `k = 2 Σ_k Re(g_k²)/(1 + γ_k²)`. Here `w` is the optomechanical shift of
//! the detuning, Δ′ = Δ − w. Taking the squared modulus gives the monic cubic
//!
//! ```text
//! w³ − 2B w² + (A² + B²) w − k|S|² = 0,
//! ```
//!
//! whose real roots with `w/k ≥ 0` are the admissible branches.

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::build_drift;
use crate::error::{Error, Result};
use crate::params::NormalizedParams;
use crate::stability::is_stable;

/// Every returned branch satisfies this bound on [`residual`].
pub const RESIDUAL_TOLERANCE: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteadyState {
    pub alpha1: Complex64,
    pub alpha2: Complex64,
    pub beta1: Complex64,
    pub beta2: Complex64,
    /// Effective detuning Δ′ of the spinning mode.
    pub delta_prime: f64,
    /// Effective optomechanical couplings G_k = g_k α1.
    pub g_eff1: Complex64,
    pub g_eff2: Complex64,
    /// Intracavity photon number |α1|².
    pub photon_number: f64,
    pub residual: f64,
}

impl SteadyState {
    pub fn g_eff(&self) -> [Complex64; 2] {
        [self.g_eff1, self.g_eff2]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanfieldSolution {
    /// Admissible branches by increasing photon number.
    pub branches: Vec<SteadyState>,
    /// Default branch: the lowest-photon-number branch with a stable drift
    /// matrix, or branch 0 when none is stable.
    pub selected: usize,
    /// More than one branch is dynamically stable.
    pub multistable: bool,
}

impl MeanfieldSolution {
    pub fn selected_state(&self) -> &SteadyState {
        &self.branches[self.selected]
    }

    /// Replaces the default selection with an explicit branch index.
    pub fn with_branch(mut self, index: usize) -> Result<Self> {
        if index >= self.branches.len() {
            return Err(Error::invalid(format!(
                "branch {index} requested but only {} branch(es) exist",
                self.branches.len()
            )));
        }
        self.selected = index;
        Ok(self)
    }
}

/// Coefficients of the reduced single-mode problem.
#[derive(Debug, Clone, Copy)]
struct Reduction {
    source: Complex64,
    a: f64,
    b: f64,
    k: f64,
}

impl Reduction {
    fn new(np: &NormalizedParams) -> Result<Self> {
        let d2 = Complex64::new(np.kappa2, np.delta_c2);
        if d2.norm() == 0.0 {
            return Err(Error::invalid("kappa2 and Delta_c2 both vanish"));
        }
        let hop = np.j1 * np.j2 / d2;
        let source = np.e1 - I * np.j1 * np.e2 / d2;
        let k = np
            .couplings()
            .iter()
            .zip(np.gammas())
            .map(|(g, gamma)| 2.0 * (g * g).re / (1.0 + gamma * gamma))
            .sum();
        Ok(Reduction {
            source,
            a: np.kappa1 + hop.re,
            b: np.delta() + hop.im,
            k,
        })
    }

    fn defect(&self, alpha: Complex64) -> Complex64 {
        let phi = self.b - self.k * alpha.norm_sqr();
        alpha * Complex64::new(self.a, phi) - self.source
    }

    /// Newton iterations on the real 2-vector (Re α1, Im α1).
    fn polish(&self, mut alpha: Complex64) -> Complex64 {
        for _ in 0..20 {
            let f = self.defect(alpha);
            let (x, y) = (alpha.re, alpha.im);
            let phi = self.b - self.k * (x * x + y * y);
            let k2 = 2.0 * self.k;
            let j11 = self.a + k2 * x * y;
            let j12 = -phi + k2 * y * y;
            let j21 = phi - k2 * x * x;
            let j22 = self.a - k2 * x * y;
            let det = j11 * j22 - j12 * j21;
            if det == 0.0 || !det.is_finite() {
                break;
            }
            let dx = (j22 * f.re - j12 * f.im) / det;
            let dy = (-j21 * f.re + j11 * f.im) / det;
            let next = Complex64::new(x - dx, y - dy);
            if self.defect(next).norm() >= f.norm() {
                break;
            }
            alpha = next;
            if dx.hypot(dy) <= 1e-16 * alpha.norm().max(1e-300) {
                break;
            }
        }
        alpha
    }
}

/// Real roots of the monic cubic `w³ + a w² + b w + c`, Newton-polished.
pub(crate) fn real_cubic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let eval = |w: f64| ((w + a) * w + b) * w + c;
    let slope = |w: f64| (3.0 * w + 2.0 * a) * w + b;

    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);

    let mut roots: Vec<f64> = if p == 0.0 && q == 0.0 {
        vec![0.0]
    } else if disc > 0.0 {
        let sq = disc.sqrt();
        let u = (-q / 2.0 - q.signum() * sq).cbrt();
        let t = if u == 0.0 { 0.0 } else { u - p / (3.0 * u) };
        vec![t]
    } else {
        let r = (-p / 3.0).sqrt();
        let cos_arg = ((3.0 * q) / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let phi = cos_arg.acos();
        (0..3)
            .map(|j| 2.0 * r * (phi / 3.0 - 2.0 * std::f64::consts::PI * j as f64 / 3.0).cos())
            .collect()
    };
    for w in roots.iter_mut() {
        *w -= shift;
        for _ in 0..8 {
            let d = slope(*w);
            if d == 0.0 {
                break;
            }
            let next = *w - eval(*w) / d;
            if !next.is_finite() || eval(next).abs() >= eval(*w).abs() {
                break;
            }
            *w = next;
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1e-300));
    roots
}

fn reconstruct(np: &NormalizedParams, alpha1: Complex64) -> SteadyState {
    let d2 = Complex64::new(np.kappa2, np.delta_c2);
    let alpha2 = (np.e2 - I * np.j2 * alpha1) / d2;
    let u = alpha1.norm_sqr();
    let [g1, g2] = np.couplings();
    let beta = |g: Complex64, gamma: f64| -I * g * u / Complex64::new(gamma, 1.0);
    let beta1 = beta(g1, np.gamma1);
    let beta2 = beta(g2, np.gamma2);
    let delta_prime = np.delta() + 2.0 * (g1 * beta1).re + 2.0 * (g2 * beta2).re;
    let mut ss = SteadyState {
        alpha1,
        alpha2,
        beta1,
        beta2,
        delta_prime,
        g_eff1: g1 * alpha1,
        g_eff2: g2 * alpha1,
        photon_number: u,
        residual: 0.0,
    };
    ss.residual = residual(np, &ss);
    ss
}

/// All admissible steady states, by increasing photon number.
pub fn steady_state_branches(np: &NormalizedParams) -> Result<Vec<SteadyState>> {
    let red = Reduction::new(np)?;
    let s2 = red.source.norm_sqr();

    let candidates: Vec<Complex64> = if red.k == 0.0 {
        let denom = Complex64::new(red.a, red.b);
        if denom.norm() == 0.0 {
            return Err(Error::NoSteadyState("singular linear response".into()));
        }
        vec![red.source / denom]
    } else {
        let roots = real_cubic_roots(-2.0 * red.b, red.a * red.a + red.b * red.b, -red.k * s2);
        roots
            .into_iter()
            .filter(|w| w / red.k >= -1e-12 * (1.0 + w.abs() / red.k.abs()))
            .filter_map(|w| {
                let denom = Complex64::new(red.a, red.b - w);
                (denom.norm() > 0.0).then(|| red.source / denom)
            })
            .collect()
    };

    let mut branches = Vec::with_capacity(candidates.len());
    for alpha in candidates {
        let ss = reconstruct(np, red.polish(alpha));
        if !(ss.residual < RESIDUAL_TOLERANCE) {
            return Err(Error::NumericalFailure(format!(
                "steady-state residual {:e} above tolerance at |alpha1|^2 = {:e}",
                ss.residual, ss.photon_number
            )));
        }
        branches.push(ss);
    }
    branches.sort_by(|x, y| x.photon_number.total_cmp(&y.photon_number));
    branches.dedup_by(|x, y| {
        (x.photon_number - y.photon_number).abs() <= 1e-10 * x.photon_number.max(y.photon_number)
    });
    if branches.is_empty() {
        return Err(Error::NoSteadyState(
            "cubic has no admissible real root".into(),
        ));
    }
    Ok(branches)
}

pub fn solve_meanfield(np: &NormalizedParams) -> Result<MeanfieldSolution> {
    let branches = steady_state_branches(np)?;
    let stable: Vec<bool> = branches
        .iter()
        .map(|ss| {
            is_stable(&build_drift(np, ss))
                .map(|r| r.stable)
                .unwrap_or(false)
        })
        .collect();
    let selected = stable.iter().position(|&s| s).unwrap_or(0);
    let multistable = stable.iter().filter(|&&s| s).count() > 1;
    Ok(MeanfieldSolution {
        branches,
        selected,
        multistable,
    })
}

/// Max-norm defect of the steady-state equations, with Δ′ rebuilt from β.
pub fn residual(np: &NormalizedParams, ss: &SteadyState) -> f64 {
    let u = ss.alpha1.norm_sqr();
    let [g1, g2] = np.couplings();
    let delta_prime = np.delta() + 2.0 * (g1 * ss.beta1).re + 2.0 * (g2 * ss.beta2).re;
    let d1 = ss.alpha1 * Complex64::new(np.kappa1, delta_prime) - (np.e1 - I * np.j1 * ss.alpha2);
    let d2 = ss.alpha2 * Complex64::new(np.kappa2, np.delta_c2) - (np.e2 - I * np.j2 * ss.alpha1);
    let d3 = ss.beta1 * Complex64::new(np.gamma1, 1.0) + I * g1 * u;
    let d4 = ss.beta2 * Complex64::new(np.gamma2, 1.0) + I * g2 * u;
    [d1, d2, d3, d4]
        .iter()
        .map(|d| d.norm())
        .fold(0.0, f64::max)
}
