//! Bipartite Gaussian entanglement and the bidirectional contrast ratio.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix4};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lyapunov::CovarianceMatrix;

/// Floating-point slack allowed on the discriminant and the inner root of ζ.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Mode {
    A1,
    A2,
    B1,
    B2,
}

impl Mode {
    /// First quadrature index of the mode's 2×2 block.
    pub fn offset(self) -> usize {
        match self {
            Mode::A1 => 0,
            Mode::A2 => 2,
            Mode::B1 => 4,
            Mode::B2 => 6,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Mode::A1 => "a1",
            Mode::A2 => "a2",
            Mode::B1 => "B1",
            Mode::B2 => "B2",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a1" => Ok(Mode::A1),
            "a2" => Ok(Mode::A2),
            "B1" => Ok(Mode::B1),
            "B2" => Ok(Mode::B2),
            other => Err(Error::invalid(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ModePair {
    first: Mode,
    second: Mode,
}

impl ModePair {
    pub const A2_B1: ModePair = ModePair {
        first: Mode::A2,
        second: Mode::B1,
    };
    pub const A2_B2: ModePair = ModePair {
        first: Mode::A2,
        second: Mode::B2,
    };
    pub const B1_B2: ModePair = ModePair {
        first: Mode::B1,
        second: Mode::B2,
    };
    pub const A1_B1: ModePair = ModePair {
        first: Mode::A1,
        second: Mode::B1,
    };
    pub const A1_A2: ModePair = ModePair {
        first: Mode::A1,
        second: Mode::A2,
    };

    /// Pairs reported by sweeps, in column order.
    pub const REPORTED: [ModePair; 5] = [
        Self::A2_B1,
        Self::A2_B2,
        Self::B1_B2,
        Self::A1_B1,
        Self::A1_A2,
    ];

    pub fn new(first: Mode, second: Mode) -> Result<Self> {
        if first == second {
            return Err(Error::invalid(format!(
                "mode pair repeats {}",
                first.label()
            )));
        }
        Ok(ModePair { first, second })
    }

    pub fn first(self) -> Mode {
        self.first
    }

    pub fn second(self) -> Mode {
        self.second
    }

    /// Column suffix, e.g. `a2B1`.
    pub fn label(self) -> String {
        format!("{}{}", self.first.label(), self.second.label())
    }
}

impl fmt::Display for ModePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl FromStr for ModePair {
    type Err = Error;

    /// Parses labels like `a2B1` or `a2,B1`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.replace(',', "");
        let split = s
            .char_indices()
            .skip(1)
            .find(|(_, c)| matches!(c, 'a' | 'B'))
            .map(|(i, _)| i)
            .ok_or_else(|| Error::invalid(format!("malformed mode pair `{s}`")))?;
        ModePair::new(s[..split].parse()?, s[split..].parse()?)
    }
}

/// 4×4 two-mode block `[[μ1, μ3], [μ3ᵀ, μ2]]` of a covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipartiteBlock {
    pub pair: ModePair,
    pub mu1: Matrix2<f64>,
    pub mu2: Matrix2<f64>,
    pub mu3: Matrix2<f64>,
}

impl BipartiteBlock {
    pub fn assembled(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&self.mu1);
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(&self.mu2);
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(&self.mu3);
        m.fixed_view_mut::<2, 2>(2, 0)
            .copy_from(&self.mu3.transpose());
        m
    }
}

pub fn extract_pair(v: &CovarianceMatrix, pair: ModePair) -> BipartiteBlock {
    let (i, j) = (pair.first.offset(), pair.second.offset());
    let m = v.matrix();
    BipartiteBlock {
        pair,
        mu1: m.fixed_view::<2, 2>(i, i).into_owned(),
        mu2: m.fixed_view::<2, 2>(j, j).into_owned(),
        mu3: m.fixed_view::<2, 2>(i, j).into_owned(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementReport {
    pub pair: ModePair,
    /// Smallest symplectic eigenvalue of the partially transposed block.
    pub zeta: f64,
    pub log_negativity: f64,
    /// det μ1 + det μ2 − 2 det μ3.
    pub sigma: f64,
    pub det_sub: f64,
}

/// Below this disc/Σ², ζ is recomputed from the singular values of
/// Ṽ^{1/2} Ω Ṽ^{1/2}.
const NEAR_DEGENERATE: f64 = 1e-6;

/// Smallest symplectic eigenvalue of the partial transpose Ṽ = P V P,
/// P = diag(1, 1, 1, −1). None unless Ṽ is positive definite.
fn pt_symplectic_min(block: &BipartiteBlock) -> Option<f64> {
    let mut vt = block.assembled();
    for k in 0..4 {
        vt[(3, k)] = -vt[(3, k)];
        vt[(k, 3)] = -vt[(k, 3)];
    }
    let eig = vt.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return None;
    }
    let root = eig.eigenvectors
        * Matrix4::from_diagonal(&eig.eigenvalues.map(f64::sqrt))
        * eig.eigenvectors.transpose();
    let omega = Matrix4::new(
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    );
    Some((root * omega * root).singular_values().min())
}

/// E_N = max(0, −ln 2ζ) with ζ = 2^{−1/2} {Σ − [Σ² − 4 det V_sub]^{1/2}}^{1/2}.
pub fn log_negativity(block: &BipartiteBlock) -> Result<EntanglementReport> {
    let sigma = block.mu1.determinant() + block.mu2.determinant() - 2.0 * block.mu3.determinant();
    let det_sub = block.assembled().determinant();
    let disc = sigma * sigma - 4.0 * det_sub;
    if !disc.is_finite() || disc < -CLAMP_TOLERANCE {
        return Err(Error::UnphysicalSubmatrix(format!(
            "{}: discriminant {disc:e} < 0",
            block.pair
        )));
    }
    let root = disc.max(0.0).sqrt();
    let direct = sigma - root;
    if direct < -CLAMP_TOLERANCE {
        return Err(Error::UnphysicalSubmatrix(format!(
            "{}: Σ − √disc = {direct:e} < 0",
            block.pair
        )));
    }
    // Σ − √(Σ² − 4det) = 4det / (Σ + √(Σ² − 4det)) avoids cancellation.
    let inner = if sigma > 0.0 && det_sub >= 0.0 {
        4.0 * det_sub / (sigma + root)
    } else {
        direct.max(0.0)
    };
    let mut zeta = (inner / 2.0).sqrt();
    if disc != 0.0 && disc.abs() < NEAR_DEGENERATE * sigma * sigma {
        // √disc carries round-off of order √ε·Σ here; the singular-value
        // route is accurate to ε. An exactly zero discriminant is exact.
        if let Some(z) = pt_symplectic_min(block) {
            zeta = z;
        }
    }
    if !(zeta > 0.0) {
        return Err(Error::UnphysicalSubmatrix(format!(
            "{}: vanishing symplectic eigenvalue",
            block.pair
        )));
    }
    Ok(EntanglementReport {
        pair: block.pair,
        zeta,
        log_negativity: (-(2.0 * zeta).ln()).max(0.0),
        sigma,
        det_sub,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContrastResult {
    pub pair: ModePair,
    pub e_plus: f64,
    pub e_minus: f64,
    /// |E₊ − E₋| / (E₊ + E₋); 0 when undefined.
    pub contrast: f64,
    /// Both entanglements vanish, so the ratio is 0/0.
    pub undefined: bool,
}

pub fn contrast_ratio(e_plus: f64, e_minus: f64, pair: ModePair) -> Result<ContrastResult> {
    if !(e_plus >= 0.0) || !(e_minus >= 0.0) {
        return Err(Error::invalid(format!(
            "contrast needs non-negative entanglement, got {e_plus}, {e_minus}"
        )));
    }
    let total = e_plus + e_minus;
    let undefined = total == 0.0;
    Ok(ContrastResult {
        pair,
        e_plus,
        e_minus,
        contrast: if undefined {
            0.0
        } else {
            (e_plus - e_minus).abs() / total
        },
        undefined,
    })
}
