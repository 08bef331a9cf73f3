//! Key-value parameter files.
//!
//! ```text
//! [physical]          # SI units, rad/s for angular frequencies
//! omega_m = 1.884955592153876e14
//! M = 50
//! N = 100
//!
//! [sagnac]
//! mode = "explicit"
//! explicit_shift = 0.1
//! direction = "ccw"
//!
//! [normalized-overrides]   # units of omega_m, applied after normalization
//! Delta_c2 = 0.68
//! ```
//!
//! Keys left out fall back to [`PhysicalParams::reference`]. Unknown keys or
//! sections are rejected.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Deserialize;

use super::{normalize, Direction, NormalizedParams, PhysicalParams, SagnacMode};
use crate::error::{Error, Result};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    #[serde(default)]
    physical: RawPhysical,
    #[serde(default)]
    sagnac: RawSagnac,
    #[serde(default, rename = "normalized-overrides")]
    overrides: NormalizedOverrides,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhysical {
    omega_m: Option<f64>,
    g_m: Option<f64>,
    kappa1: Option<f64>,
    kappa2: Option<f64>,
    gamma1: Option<f64>,
    gamma2: Option<f64>,
    #[serde(rename = "Delta_c1")]
    delta_c1: Option<f64>,
    #[serde(rename = "Delta_c2")]
    delta_c2: Option<f64>,
    #[serde(rename = "E1")]
    e1: Option<f64>,
    #[serde(rename = "E2")]
    e2: Option<f64>,
    #[serde(rename = "J1")]
    j1: Option<f64>,
    #[serde(rename = "J2")]
    j2: Option<f64>,
    #[serde(rename = "M")]
    m: Option<f64>,
    #[serde(rename = "N")]
    n: Option<f64>,
    #[serde(rename = "T")]
    t: Option<f64>,
    coupling_continuation: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSagnac {
    mode: Option<SagnacMode>,
    explicit_shift: Option<f64>,
    n: Option<f64>,
    #[serde(rename = "R")]
    radius: Option<f64>,
    #[serde(rename = "Omega")]
    omega: Option<f64>,
    lambda: Option<f64>,
    dn_dlambda: Option<f64>,
    omega_c1: Option<f64>,
    direction: Option<Direction>,
}

/// Values that replace normalized parameters after [`normalize`].
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalizedOverrides {
    pub kappa1: Option<f64>,
    pub kappa2: Option<f64>,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    #[serde(rename = "Delta_c1")]
    pub delta_c1: Option<f64>,
    #[serde(rename = "Delta_c2")]
    pub delta_c2: Option<f64>,
    #[serde(rename = "E1")]
    pub e1: Option<f64>,
    #[serde(rename = "E2")]
    pub e2: Option<f64>,
    #[serde(rename = "J1")]
    pub j1: Option<f64>,
    #[serde(rename = "J2")]
    pub j2: Option<f64>,
    #[serde(rename = "Delta_F")]
    pub delta_f: Option<f64>,
    #[serde(rename = "nbar_B1")]
    pub nbar_b1: Option<f64>,
    #[serde(rename = "nbar_B2")]
    pub nbar_b2: Option<f64>,
    pub g1: Option<f64>,
    pub g2: Option<f64>,
}

impl NormalizedOverrides {
    fn apply(&self, np: &mut NormalizedParams) {
        let slots: [(&Option<f64>, &mut f64); 13] = [
            (&self.kappa1, &mut np.kappa1),
            (&self.kappa2, &mut np.kappa2),
            (&self.gamma1, &mut np.gamma1),
            (&self.gamma2, &mut np.gamma2),
            (&self.delta_c1, &mut np.delta_c1),
            (&self.delta_c2, &mut np.delta_c2),
            (&self.e1, &mut np.e1),
            (&self.e2, &mut np.e2),
            (&self.j1, &mut np.j1),
            (&self.j2, &mut np.j2),
            (&self.delta_f, &mut np.delta_f),
            (&self.nbar_b1, &mut np.nbar_b1),
            (&self.nbar_b2, &mut np.nbar_b2),
        ];
        for (value, slot) in slots {
            if let Some(v) = value {
                *slot = *v;
            }
        }
        if let Some(g) = self.g1 {
            np.g1 = Complex64::new(g, 0.0);
        }
        if let Some(g) = self.g2 {
            np.g2 = Complex64::new(g, 0.0);
        }
    }

    fn entries(&self) -> Vec<(&'static str, f64)> {
        [
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("Delta_c1", self.delta_c1),
            ("Delta_c2", self.delta_c2),
            ("E1", self.e1),
            ("E2", self.e2),
            ("J1", self.j1),
            ("J2", self.j2),
            ("Delta_F", self.delta_f),
            ("nbar_B1", self.nbar_b1),
            ("nbar_B2", self.nbar_b2),
            ("g1", self.g1),
            ("g2", self.g2),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .collect()
    }

    fn validate(&self) -> Result<()> {
        for (k, v) in self.entries() {
            if !v.is_finite() {
                return Err(Error::Config(format!("override {k} must be finite")));
            }
        }
        Ok(())
    }
}

/// A full simulation point: SI parameters plus normalized overrides.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamSet {
    pub physical: PhysicalParams,
    pub overrides: NormalizedOverrides,
}

impl ParamSet {
    pub fn reference() -> Self {
        Self::default()
    }

    pub fn normalized(&self) -> Result<NormalizedParams> {
        let mut np = normalize(&self.physical)?;
        self.overrides.apply(&mut np);
        Ok(np)
    }

    /// Sets the parameter named by `path`. Rates, detunings and drives are
    /// given in units of ω_m; `M`, `N`, `T` in their physical units.
    /// Rate-like paths are written as overrides.
    pub fn set(&mut self, path: ParamPath, value: f64) {
        let o = &mut self.overrides;
        match path {
            ParamPath::E => {
                o.e1 = Some(value);
                o.e2 = Some(value);
            }
            ParamPath::E1 => o.e1 = Some(value),
            ParamPath::E2 => o.e2 = Some(value),
            ParamPath::Kappa => {
                o.kappa1 = Some(value);
                o.kappa2 = Some(value);
            }
            ParamPath::Kappa1 => o.kappa1 = Some(value),
            ParamPath::Kappa2 => o.kappa2 = Some(value),
            ParamPath::Gamma => {
                o.gamma1 = Some(value);
                o.gamma2 = Some(value);
            }
            ParamPath::Gamma1 => o.gamma1 = Some(value),
            ParamPath::Gamma2 => o.gamma2 = Some(value),
            ParamPath::DeltaC1 => o.delta_c1 = Some(value),
            ParamPath::DeltaC2 => o.delta_c2 = Some(value),
            ParamPath::J1 => o.j1 = Some(value),
            ParamPath::J2 => o.j2 = Some(value),
            ParamPath::GM => self.physical.g_m = value * self.physical.omega_m,
            ParamPath::M => self.physical.m = value,
            ParamPath::N => self.physical.n = value,
            ParamPath::T => self.physical.t = value,
            ParamPath::DeltaFMagnitude => {
                self.physical.sagnac.mode = SagnacMode::Explicit;
                self.physical.sagnac.explicit_shift = Some(value);
            }
        }
    }

    pub fn set_direction(&mut self, direction: Direction) {
        self.physical.sagnac.direction = direction;
        if let Some(v) = self.overrides.delta_f {
            self.overrides.delta_f = Some(direction.sign() * v.abs());
        }
    }

    /// `key = value` lines describing this set, in a fixed order.
    pub fn describe(&self) -> Vec<String> {
        let p = &self.physical;
        let s = &p.sagnac;
        let mut lines = vec![
            format!("physical.omega_m = {:e}", p.omega_m),
            format!("physical.g_m = {:e}", p.g_m),
            format!("physical.kappa1 = {:e}", p.kappa1),
            format!("physical.kappa2 = {:e}", p.kappa2),
            format!("physical.gamma1 = {:e}", p.gamma1),
            format!("physical.gamma2 = {:e}", p.gamma2),
            format!("physical.Delta_c1 = {:e}", p.delta_c1),
            format!("physical.Delta_c2 = {:e}", p.delta_c2),
            format!("physical.E1 = {:e}", p.e1),
            format!("physical.E2 = {:e}", p.e2),
            format!("physical.J1 = {:e}", p.j1),
            format!("physical.J2 = {:e}", p.j2),
            format!("physical.M = {}", p.m),
            format!("physical.N = {}", p.n),
            format!("physical.T = {}", p.t),
            format!(
                "physical.coupling_continuation = {}",
                p.coupling_continuation
            ),
            format!("sagnac.mode = {:?}", s.mode).to_lowercase(),
            format!(
                "sagnac.explicit_shift = {}",
                s.explicit_shift
                    .map_or_else(|| "none".to_string(), |v| format!("{v:e}"))
            ),
            format!("sagnac.n = {}", s.n),
            format!("sagnac.R = {:e}", s.radius),
            format!("sagnac.Omega = {:e}", s.omega),
            format!("sagnac.lambda = {:e}", s.lambda),
            format!("sagnac.dn_dlambda = {:e}", s.dn_dlambda),
            format!("sagnac.omega_c1 = {:e}", s.omega_c1),
            format!("sagnac.direction = {}", s.direction),
        ];
        for (k, v) in self.overrides.entries() {
            lines.push(format!("normalized-overrides.{k} = {v:e}"));
        }
        lines
    }
}

/// Parameters addressable by sweep axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamPath {
    /// Both drive amplitudes.
    E,
    E1,
    E2,
    /// Both cavity decay rates.
    Kappa,
    Kappa1,
    Kappa2,
    /// Both vibrational decay rates.
    Gamma,
    Gamma1,
    Gamma2,
    DeltaC1,
    DeltaC2,
    J1,
    J2,
    /// Single-molecule coupling g_m/ω_m.
    GM,
    M,
    N,
    T,
    /// |Δ_F| in units of ω_m (switches the Sagnac input to explicit mode).
    DeltaFMagnitude,
}

impl ParamPath {
    pub const ALL: [ParamPath; 18] = [
        ParamPath::E,
        ParamPath::E1,
        ParamPath::E2,
        ParamPath::Kappa,
        ParamPath::Kappa1,
        ParamPath::Kappa2,
        ParamPath::Gamma,
        ParamPath::Gamma1,
        ParamPath::Gamma2,
        ParamPath::DeltaC1,
        ParamPath::DeltaC2,
        ParamPath::J1,
        ParamPath::J2,
        ParamPath::GM,
        ParamPath::M,
        ParamPath::N,
        ParamPath::T,
        ParamPath::DeltaFMagnitude,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ParamPath::E => "E",
            ParamPath::E1 => "E1",
            ParamPath::E2 => "E2",
            ParamPath::Kappa => "kappa",
            ParamPath::Kappa1 => "kappa1",
            ParamPath::Kappa2 => "kappa2",
            ParamPath::Gamma => "gamma",
            ParamPath::Gamma1 => "gamma1",
            ParamPath::Gamma2 => "gamma2",
            ParamPath::DeltaC1 => "Delta_c1",
            ParamPath::DeltaC2 => "Delta_c2",
            ParamPath::J1 => "J1",
            ParamPath::J2 => "J2",
            ParamPath::GM => "g_m",
            ParamPath::M => "M",
            ParamPath::N => "N",
            ParamPath::T => "T",
            ParamPath::DeltaFMagnitude => "Delta_F",
        }
    }
}

impl fmt::Display for ParamPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ParamPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ParamPath::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let known: Vec<_> = ParamPath::ALL.iter().map(|p| p.name()).collect();
                Error::Config(format!(
                    "unknown parameter `{s}` (known: {})",
                    known.join(", ")
                ))
            })
    }
}

pub fn parse_param_file(text: &str) -> Result<ParamSet> {
    let raw: RawFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let mut p = PhysicalParams::reference();
    let rp = raw.physical;
    let fields: [(Option<f64>, &mut f64); 15] = [
        (rp.omega_m, &mut p.omega_m),
        (rp.g_m, &mut p.g_m),
        (rp.kappa1, &mut p.kappa1),
        (rp.kappa2, &mut p.kappa2),
        (rp.gamma1, &mut p.gamma1),
        (rp.gamma2, &mut p.gamma2),
        (rp.delta_c1, &mut p.delta_c1),
        (rp.delta_c2, &mut p.delta_c2),
        (rp.e1, &mut p.e1),
        (rp.e2, &mut p.e2),
        (rp.j1, &mut p.j1),
        (rp.j2, &mut p.j2),
        (rp.m, &mut p.m),
        (rp.n, &mut p.n),
        (rp.t, &mut p.t),
    ];
    for (value, slot) in fields {
        if let Some(v) = value {
            *slot = v;
        }
    }
    if let Some(c) = rp.coupling_continuation {
        p.coupling_continuation = c;
    }

    let rs = raw.sagnac;
    let s = &mut p.sagnac;
    if let Some(mode) = rs.mode {
        s.mode = mode;
    }
    if rs.explicit_shift.is_some() {
        s.explicit_shift = rs.explicit_shift;
    }
    let geometry: [(Option<f64>, &mut f64); 6] = [
        (rs.n, &mut s.n),
        (rs.radius, &mut s.radius),
        (rs.omega, &mut s.omega),
        (rs.lambda, &mut s.lambda),
        (rs.dn_dlambda, &mut s.dn_dlambda),
        (rs.omega_c1, &mut s.omega_c1),
    ];
    for (value, slot) in geometry {
        if let Some(v) = value {
            *slot = v;
        }
    }
    if let Some(d) = rs.direction {
        s.direction = d;
    }

    raw.overrides.validate()?;
    let set = ParamSet {
        physical: p,
        overrides: raw.overrides,
    };
    // Surface parameter errors at load time.
    set.normalized().map_err(|e| Error::Config(e.to_string()))?;
    Ok(set)
}

pub fn read_param_file(path: &Path) -> Result<ParamSet> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_param_file(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}
