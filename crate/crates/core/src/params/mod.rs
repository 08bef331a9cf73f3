//! Physical and normalized parameter models.
//!
//! All downstream computation runs in units where ħ = 1 and every rate,
//! detuning and drive amplitude is measured in units of the vibrational
//! frequency ω_m. [`normalize`] is the only place where SI quantities enter.

mod file;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use file::{parse_param_file, read_param_file, NormalizedOverrides, ParamPath, ParamSet};

/// Reduced Planck constant (J s), CODATA 2018.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (J/K), exact SI value.
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light in vacuum (m/s).
pub const C_LIGHT: f64 = 299_792_458.0;

/// Propagation direction of the pump relative to the resonator rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Clockwise: positive shift.
    Cw,
    /// Counter-clockwise: negative shift.
    Ccw,
    /// No rotation-induced shift.
    None,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Cw => 1.0,
            Direction::Ccw => -1.0,
            Direction::None => 0.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Direction::Cw => "cw",
            Direction::Ccw => "ccw",
            Direction::None => "none",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cw" => Ok(Direction::Cw),
            "ccw" => Ok(Direction::Ccw),
            "none" => Ok(Direction::None),
            other => Err(Error::invalid(format!("unknown direction `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SagnacMode {
    /// The shift magnitude is given directly in units of ω_m.
    Explicit,
    /// The shift is computed from the resonator geometry and rotation speed.
    Physical,
}

/// Inputs of the rotation-induced (Sagnac-Fizeau) resonance shift.
#[derive(Debug, Clone, PartialEq)]
pub struct SagnacInput {
    pub mode: SagnacMode,
    /// Shift in units of ω_m; its magnitude is used, the sign comes from `direction`.
    pub explicit_shift: Option<f64>,
    /// Refractive index.
    pub n: f64,
    /// Resonator radius (m).
    pub radius: f64,
    /// Angular rotation speed (rad/s).
    pub omega: f64,
    /// Vacuum wavelength (m).
    pub lambda: f64,
    /// Dispersion dn/dλ (1/m).
    pub dn_dlambda: f64,
    /// Cavity resonance (rad/s).
    pub omega_c1: f64,
    pub direction: Direction,
}

impl SagnacInput {
    pub fn explicit(magnitude: f64, direction: Direction) -> Self {
        SagnacInput {
            mode: SagnacMode::Explicit,
            explicit_shift: Some(magnitude),
            ..Self::default()
        }
        .with_direction(direction)
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }
}

impl Default for SagnacInput {
    /// Explicit |Δ_F| = 0.1 ω_m, clockwise. Geometry fields hold a silica
    /// microtoroid at telecom wavelength for physical mode.
    fn default() -> Self {
        SagnacInput {
            mode: SagnacMode::Explicit,
            explicit_shift: Some(0.1),
            n: 1.4,
            radius: 250e-6,
            omega: 0.0,
            lambda: 1550e-9,
            dn_dlambda: 0.0,
            omega_c1: 2.0 * PI * C_LIGHT / 1550e-9,
            direction: Direction::Cw,
        }
    }
}

/// Parameters in SI units (angular frequencies in rad/s).
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParams {
    pub omega_m: f64,
    pub g_m: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub delta_c1: f64,
    pub delta_c2: f64,
    pub e1: f64,
    pub e2: f64,
    pub j1: f64,
    pub j2: f64,
    /// Molecules in the first collective mode.
    pub m: f64,
    /// Total number of molecules.
    pub n: f64,
    /// Bath temperature (K).
    pub t: f64,
    pub sagnac: SagnacInput,
    /// Evaluate g2 = g_m √(N − M) as a principal complex square root, which
    /// admits N ≤ M (imaginary g2). Off by default, where M < N is enforced.
    pub coupling_continuation: bool,
}

impl PhysicalParams {
    /// The operating point used throughout the reference figures:
    /// ω_m/2π = 30 THz, g_m/2π = 30 GHz, κ = 0.3 ω_m, Δ_1c = Δ_2c = ω_m,
    /// γ = 1e-4 ω_m, E = 16 ω_m, J1 = 0.3 ω_m, J2 = ω_m, M = 50, N = 100,
    /// T = 312 K, |Δ_F| = 0.1 ω_m.
    pub fn reference() -> Self {
        let wm = 2.0 * PI * 30e12;
        PhysicalParams {
            omega_m: wm,
            g_m: 2.0 * PI * 30e9,
            kappa1: 0.3 * wm,
            kappa2: 0.3 * wm,
            gamma1: 1e-4 * wm,
            gamma2: 1e-4 * wm,
            delta_c1: wm,
            delta_c2: wm,
            e1: 16.0 * wm,
            e2: 16.0 * wm,
            j1: 0.3 * wm,
            j2: wm,
            m: 50.0,
            n: 100.0,
            t: 312.0,
            sagnac: SagnacInput::default(),
            coupling_continuation: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.omega_m > 0.0) || !self.omega_m.is_finite() {
            return Err(Error::invalid("omega_m must be positive and finite"));
        }
        let rates = [
            ("g_m", self.g_m),
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("J1", self.j1),
            ("J2", self.j2),
        ];
        for (name, v) in rates {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!(
                    "{name} must be a finite rate >= 0, got {v}"
                )));
            }
        }
        for (name, v) in [
            ("Delta_c1", self.delta_c1),
            ("Delta_c2", self.delta_c2),
            ("E1", self.e1),
            ("E2", self.e2),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be finite")));
            }
        }
        if !(self.t >= 0.0) || !self.t.is_finite() {
            return Err(Error::invalid(format!("T must be >= 0, got {}", self.t)));
        }
        if !(self.m > 0.0) || !self.m.is_finite() || !(self.n > 0.0) || !self.n.is_finite() {
            return Err(Error::invalid(format!(
                "molecule counts must be positive, got M = {}, N = {}",
                self.m, self.n
            )));
        }
        if !self.coupling_continuation && self.m >= self.n {
            return Err(Error::invalid(format!(
                "need M < N for a real collective coupling, got M = {}, N = {}",
                self.m, self.n
            )));
        }
        Ok(())
    }
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self::reference()
    }
}

/// Dimensionless parameters: every rate and detuning in units of ω_m.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedParams {
    pub kappa1: f64,
    pub kappa2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub delta_c1: f64,
    pub delta_c2: f64,
    pub e1: f64,
    pub e2: f64,
    pub j1: f64,
    pub j2: f64,
    /// Signed Sagnac-Fizeau shift.
    pub delta_f: f64,
    pub nbar_b1: f64,
    pub nbar_b2: f64,
    /// Collective couplings. Real unless coupling continuation admits N ≤ M.
    pub g1: Complex64,
    pub g2: Complex64,
}

impl NormalizedParams {
    /// Bare detuning of the spinning mode, Δ = Δ_c1 − Δ_F.
    pub fn delta(&self) -> f64 {
        self.delta_c1 - self.delta_f
    }

    pub fn couplings(&self) -> [Complex64; 2] {
        [self.g1, self.g2]
    }

    pub fn gammas(&self) -> [f64; 2] {
        [self.gamma1, self.gamma2]
    }

    /// Maps back to SI units with ω_m, N and M taken from `template`. The
    /// Sagnac input becomes an explicit shift carrying the signed Δ_F.
    pub fn denormalize(&self, template: &PhysicalParams) -> PhysicalParams {
        let wm = template.omega_m;
        let direction = if self.delta_f > 0.0 {
            Direction::Cw
        } else if self.delta_f < 0.0 {
            Direction::Ccw
        } else {
            Direction::None
        };
        PhysicalParams {
            omega_m: wm,
            g_m: template.g_m,
            kappa1: self.kappa1 * wm,
            kappa2: self.kappa2 * wm,
            gamma1: self.gamma1 * wm,
            gamma2: self.gamma2 * wm,
            delta_c1: self.delta_c1 * wm,
            delta_c2: self.delta_c2 * wm,
            e1: self.e1 * wm,
            e2: self.e2 * wm,
            j1: self.j1 * wm,
            j2: self.j2 * wm,
            m: template.m,
            n: template.n,
            t: template.t,
            sagnac: SagnacInput {
                mode: SagnacMode::Explicit,
                explicit_shift: Some(self.delta_f.abs()),
                ..template.sagnac.clone()
            }
            .with_direction(direction),
            coupling_continuation: template.coupling_continuation,
        }
    }
}

/// Rotation-induced resonance shift Δ_F in units of ω_m.
///
/// Physical mode evaluates ±(nΩRω_c1/c)(1 − 1/n² − (λ/n) dn/dλ) / ω_m.
pub fn sagnac_shift(s: &SagnacInput, omega_m: f64) -> Result<f64> {
    let sign = s.direction.sign();
    match s.mode {
        SagnacMode::Explicit => {
            let shift = s
                .explicit_shift
                .ok_or_else(|| Error::invalid("explicit Sagnac mode needs explicit_shift"))?;
            if !shift.is_finite() {
                return Err(Error::invalid("explicit_shift must be finite"));
            }
            Ok(sign * shift.abs())
        }
        SagnacMode::Physical => {
            if !(s.n > 0.0) {
                return Err(Error::invalid(format!(
                    "refractive index must be > 0, got {}",
                    s.n
                )));
            }
            if !(s.radius > 0.0) {
                return Err(Error::invalid(format!(
                    "radius must be > 0, got {}",
                    s.radius
                )));
            }
            if !(s.lambda > 0.0) {
                return Err(Error::invalid(format!(
                    "wavelength must be > 0, got {}",
                    s.lambda
                )));
            }
            if !(s.omega >= 0.0) {
                return Err(Error::invalid(format!(
                    "rotation speed must be >= 0, got {}",
                    s.omega
                )));
            }
            if !(omega_m > 0.0) {
                return Err(Error::invalid("omega_m must be > 0"));
            }
            let prefactor = s.n * s.omega * s.radius * s.omega_c1 / C_LIGHT;
            let dispersion = 1.0 - 1.0 / (s.n * s.n) - (s.lambda / s.n) * s.dn_dlambda;
            Ok(sign * prefactor * dispersion / omega_m)
        }
    }
}

/// Bose-Einstein occupancy 1/(exp(ħω/k_B T) − 1); exactly 0 at T = 0.
pub fn thermal_occupancy(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::invalid(format!(
            "frequency must be > 0, got {omega}"
        )));
    }
    if !(temperature >= 0.0) {
        return Err(Error::invalid(format!(
            "temperature must be >= 0, got {temperature}"
        )));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * omega / (K_B * temperature);
    Ok(1.0 / x.exp_m1())
}

pub fn normalize(p: &PhysicalParams) -> Result<NormalizedParams> {
    p.validate()?;
    let wm = p.omega_m;
    let gm = p.g_m / wm;
    let nbar = thermal_occupancy(wm, p.t)?;
    Ok(NormalizedParams {
        kappa1: p.kappa1 / wm,
        kappa2: p.kappa2 / wm,
        gamma1: p.gamma1 / wm,
        gamma2: p.gamma2 / wm,
        delta_c1: p.delta_c1 / wm,
        delta_c2: p.delta_c2 / wm,
        e1: p.e1 / wm,
        e2: p.e2 / wm,
        j1: p.j1 / wm,
        j2: p.j2 / wm,
        delta_f: sagnac_shift(&p.sagnac, wm)?,
        nbar_b1: nbar,
        nbar_b2: nbar,
        g1: Complex64::new(p.m, 0.0).sqrt() * gm,
        g2: Complex64::new(p.n - p.m, 0.0).sqrt() * gm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn no_rotation_no_shift() {
        let s = SagnacInput {
            mode: SagnacMode::Physical,
            omega: 0.0,
            ..SagnacInput::default()
        };
        assert_eq!(sagnac_shift(&s, 2.0 * PI * 30e12).unwrap(), 0.0);
    }

    #[test]
    fn explicit_shift_takes_direction_sign() {
        let wm = 2.0 * PI * 30e12;
        assert_eq!(
            sagnac_shift(&SagnacInput::explicit(0.1, Direction::Cw), wm).unwrap(),
            0.1
        );
        assert_eq!(
            sagnac_shift(&SagnacInput::explicit(0.1, Direction::Ccw), wm).unwrap(),
            -0.1
        );
        assert_eq!(
            sagnac_shift(&SagnacInput::explicit(-0.1, Direction::Cw), wm).unwrap(),
            0.1
        );
        assert_eq!(
            sagnac_shift(&SagnacInput::explicit(0.1, Direction::None), wm).unwrap(),
            0.0
        );
    }

    fn spinning_toroid(omega: f64) -> SagnacInput {
        SagnacInput {
            mode: SagnacMode::Physical,
            explicit_shift: None,
            n: 1.4,
            radius: 250e-6,
            omega,
            lambda: 1550e-9,
            dn_dlambda: 0.0,
            omega_c1: 2.0 * PI * 193.4e12,
            direction: Direction::Cw,
        }
    }

    #[test]
    fn physical_shift_matches_high_precision_evaluation() {
        // 40-digit evaluation of the closed form for Ω = 2π·30 kHz.
        let expected = 6.948_624_467_064_947e-7;
        let got = sagnac_shift(&spinning_toroid(2.0 * PI * 30e3), 2.0 * PI * 30e12).unwrap();
        assert_relative_eq!(got, expected, max_relative = 1e-14);
    }

    #[test]
    fn physical_shift_is_linear_in_rotation() {
        let wm = 2.0 * PI * 30e12;
        let base = sagnac_shift(&spinning_toroid(1e3), wm).unwrap();
        for k in [2.0, 5.0, 40.0] {
            let v = sagnac_shift(&spinning_toroid(k * 1e3), wm).unwrap();
            assert_relative_eq!(v, k * base, max_relative = 1e-14);
        }
    }

    #[test]
    fn physical_shift_rejects_bad_geometry() {
        let wm = 2.0 * PI * 30e12;
        for s in [
            SagnacInput {
                n: 0.0,
                ..spinning_toroid(1.0)
            },
            SagnacInput {
                n: -1.2,
                ..spinning_toroid(1.0)
            },
            SagnacInput {
                radius: 0.0,
                ..spinning_toroid(1.0)
            },
            SagnacInput {
                lambda: -1e-6,
                ..spinning_toroid(1.0)
            },
        ] {
            assert!(matches!(
                sagnac_shift(&s, wm),
                Err(Error::InvalidParameter(_))
            ));
        }
        let missing = SagnacInput {
            explicit_shift: None,
            ..SagnacInput::default()
        };
        assert!(sagnac_shift(&missing, wm).is_err());
    }

    #[test]
    fn occupancy_reference_values() {
        let w = 2.0 * PI * 30e12;
        assert_eq!(thermal_occupancy(w, 0.0).unwrap(), 0.0);
        assert_relative_eq!(
            thermal_occupancy(w, 312.0).unwrap(),
            1.000_468_466_320_81e-2,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            thermal_occupancy(w, 200.0).unwrap(),
            7.479_930_344_907_273e-4,
            max_relative = 1e-13
        );
        assert!(thermal_occupancy(0.0, 300.0).is_err());
        assert!(thermal_occupancy(-w, 300.0).is_err());
    }

    #[test]
    fn reference_couplings() {
        let np = normalize(&PhysicalParams::reference()).unwrap();
        assert_relative_eq!(np.g1.re, 1e-3 * 50f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(np.g2.re, np.g1.re, max_relative = 1e-15);
        assert_eq!(np.g1.im, 0.0);
        assert_relative_eq!(np.kappa1, 0.3, max_relative = 1e-15);
        assert_relative_eq!(np.delta_f, 0.1, max_relative = 1e-15);
        assert_eq!(np.nbar_b1, np.nbar_b2);
    }

    #[test]
    fn m_not_below_n_is_rejected_unless_continued() {
        let p = PhysicalParams {
            n: 40.0,
            ..PhysicalParams::reference()
        };
        assert!(matches!(normalize(&p), Err(Error::InvalidParameter(_))));
        let cont = PhysicalParams {
            coupling_continuation: true,
            ..p
        };
        let np = normalize(&cont).unwrap();
        assert_eq!(np.g2.re, 0.0);
        assert_relative_eq!(np.g2.im, 1e-3 * 10f64.sqrt(), max_relative = 1e-12);
        // g1² + g2² still equals g_m² N.
        let total = (np.g1 * np.g1 + np.g2 * np.g2).re;
        assert_relative_eq!(total, 1e-6 * 40.0, max_relative = 1e-12);
    }

    #[test]
    fn negative_rates_rejected() {
        for p in [
            PhysicalParams {
                kappa1: -1.0,
                ..PhysicalParams::reference()
            },
            PhysicalParams {
                gamma2: f64::NAN,
                ..PhysicalParams::reference()
            },
            PhysicalParams {
                t: -1.0,
                ..PhysicalParams::reference()
            },
            PhysicalParams {
                omega_m: 0.0,
                ..PhysicalParams::reference()
            },
        ] {
            assert!(normalize(&p).is_err());
        }
    }

    #[test]
    fn normalization_round_trip() {
        let p = PhysicalParams::reference();
        let np = normalize(&p).unwrap();
        let again = normalize(&np.denormalize(&p)).unwrap();
        for (a, b) in [
            (np.kappa1, again.kappa1),
            (np.gamma2, again.gamma2),
            (np.delta_c1, again.delta_c1),
            (np.e2, again.e2),
            (np.j1, again.j1),
            (np.delta_f, again.delta_f),
            (np.g1.re, again.g1.re),
            (np.nbar_b1, again.nbar_b1),
        ] {
            assert_relative_eq!(a, b, max_relative = 1e-15);
        }
    }

    proptest! {
        #[test]
        fn shift_is_odd_in_direction(mag in 0.0f64..2.0, omega in 0.0f64..1e6) {
            let wm = 2.0 * PI * 30e12;
            let cw = sagnac_shift(&SagnacInput::explicit(mag, Direction::Cw), wm).unwrap();
            let ccw = sagnac_shift(&SagnacInput::explicit(mag, Direction::Ccw), wm).unwrap();
            prop_assert_eq!(cw, -ccw);
            let pcw = sagnac_shift(&spinning_toroid(omega), wm).unwrap();
            let pccw = sagnac_shift(&spinning_toroid(omega).with_direction(Direction::Ccw), wm).unwrap();
            prop_assert_eq!(pcw, -pccw);
        }

        #[test]
        fn occupancy_monotone(t1 in 1.0f64..2000.0, dt in 0.1f64..100.0, w in 1e12f64..1e15) {
            let lo = thermal_occupancy(w, t1).unwrap();
            let hi = thermal_occupancy(w, t1 + dt).unwrap();
            prop_assert!(hi >= lo);
            let slower = thermal_occupancy(w * 0.9, t1).unwrap();
            prop_assert!(slower >= lo);
        }
    }
}
