//! Full evaluation of one parameter point:
//! normalize → mean field → A, D → stability → covariance → entanglement.

use std::fmt;

use serde::Serialize;

use crate::dynamics::{build_diffusion, build_drift, DiffusionMatrix, DriftMatrix};
use crate::entanglement::{extract_pair, log_negativity, EntanglementReport, ModePair};
use crate::error::Error;
use crate::lyapunov::{solve_lyapunov, CovarianceMatrix};
use crate::meanfield::{solve_meanfield, MeanfieldSolution};
use crate::params::{NormalizedParams, ParamSet};
use crate::stability::{is_stable, StabilityReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Unstable,
    NoSteadyState,
    NumericalFailure,
    CmUnphysical,
    InvalidParameter,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Unstable => "unstable",
            Status::NoSteadyState => "no-steady-state",
            Status::NumericalFailure => "numerical-failure",
            Status::CmUnphysical => "cm-unphysical",
            Status::InvalidParameter => "invalid-parameter",
        }
    }

    /// Anything other than a computed result or a legitimate instability.
    pub fn is_failure(self) -> bool {
        !matches!(self, Status::Ok | Status::Unstable)
    }

    fn from_error(e: &Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::Config(_) => Status::InvalidParameter,
            Error::NoSteadyState(_) => Status::NoSteadyState,
            Error::Unstable { .. } => Status::Unstable,
            Error::UnphysicalSubmatrix(_) => Status::CmUnphysical,
            _ => Status::NumericalFailure,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PointOptions {
    /// Overrides the default branch selection.
    pub branch: Option<usize>,
    /// Stop after the stability verdict.
    pub stability_only: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointResult {
    pub status: Status,
    pub message: Option<String>,
    pub normalized: Option<NormalizedParams>,
    pub meanfield: Option<MeanfieldSolution>,
    pub drift: Option<DriftMatrix>,
    pub diffusion: Option<DiffusionMatrix>,
    pub stability: Option<StabilityReport>,
    pub covariance: Option<CovarianceMatrix>,
    /// Smallest eigenvalue of V + (i/2)Ω; negative values flag a state that
    /// violates the uncertainty relation. Reported, never enforced.
    pub uncertainty_min_eig: Option<f64>,
    /// One entry per [`ModePair::REPORTED`] pair.
    pub entanglement: Vec<Option<EntanglementReport>>,
}

impl PointResult {
    fn failed(status: Status, message: String) -> Self {
        PointResult {
            status,
            message: Some(message),
            normalized: None,
            meanfield: None,
            drift: None,
            diffusion: None,
            stability: None,
            covariance: None,
            uncertainty_min_eig: None,
            entanglement: Vec::new(),
        }
    }

    pub fn log_negativity(&self, pair: ModePair) -> Option<f64> {
        let idx = ModePair::REPORTED.iter().position(|p| *p == pair)?;
        self.entanglement.get(idx)?.map(|r| r.log_negativity)
    }

    pub fn branch_count(&self) -> usize {
        self.meanfield.as_ref().map_or(0, |m| m.branches.len())
    }

    /// Everything computed for this point as pretty-printed JSON. Matrices
    /// are flattened column-major.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}

pub fn evaluate(set: &ParamSet, opts: PointOptions) -> PointResult {
    let np = match set.normalized() {
        Ok(np) => np,
        Err(e) => return PointResult::failed(Status::from_error(&e), e.to_string()),
    };
    let mut out = PointResult::failed(Status::Ok, String::new());
    out.message = None;

    let mf = match solve_meanfield(&np).and_then(|m| match opts.branch {
        Some(b) => m.with_branch(b),
        None => Ok(m),
    }) {
        Ok(m) => m,
        Err(e) => {
            out.status = Status::from_error(&e);
            out.message = Some(e.to_string());
            out.normalized = Some(np);
            return out;
        }
    };
    let ss = mf.selected_state();
    let drift = build_drift(&np, ss);
    let diffusion = build_diffusion(&np);
    out.drift = Some(drift);
    out.diffusion = Some(diffusion);
    out.meanfield = Some(mf);

    let report = match is_stable(&drift) {
        Ok(r) => r,
        Err(e) => {
            out.status = Status::from_error(&e);
            out.message = Some(e.to_string());
            out.normalized = Some(np);
            return out;
        }
    };
    out.stability = Some(report);
    out.normalized = Some(np);
    if !report.stable {
        out.status = Status::Unstable;
        return out;
    }
    if opts.stability_only {
        return out;
    }

    let v = match solve_lyapunov(drift.matrix(), diffusion.matrix()) {
        Ok(v) => v,
        Err(e) => {
            out.status = Status::from_error(&e);
            out.message = Some(e.to_string());
            return out;
        }
    };
    out.uncertainty_min_eig = Some(v.uncertainty_min_eigenvalue());
    out.covariance = Some(v);

    let mut problems = Vec::new();
    out.entanglement = ModePair::REPORTED
        .iter()
        .map(|&pair| match log_negativity(&extract_pair(&v, pair)) {
            Ok(r) => Some(r),
            Err(e) => {
                problems.push(e.to_string());
                None
            }
        })
        .collect();
    if !problems.is_empty() {
        out.status = Status::CmUnphysical;
        out.message = Some(problems.join("; "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::PhysicalParams;

    #[test]
    fn reference_point_is_entangled() {
        let r = evaluate(&ParamSet::reference(), PointOptions::default());
        assert_eq!(r.status, Status::Ok, "{:?}", r.message);
        assert!(r.log_negativity(ModePair::A2_B1).unwrap() > 0.0);
        assert!(r.log_negativity(ModePair::B1_B2).unwrap() > 0.0);
        let v = r.covariance.unwrap();
        assert!(v.min_eigenvalue() > 0.0);
        assert_eq!(v.0, v.0.transpose());
    }

    #[test]
    fn json_dump_has_every_stage() {
        let r = evaluate(&ParamSet::reference(), PointOptions::default());
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["status"], "ok");
        for key in [
            "normalized",
            "meanfield",
            "drift",
            "diffusion",
            "stability",
            "covariance",
        ] {
            assert!(!v[key].is_null(), "{key}");
        }
        assert_eq!(v["entanglement"].as_array().unwrap().len(), 5);
    }

    #[test]
    fn invalid_counts_become_status() {
        let set = ParamSet {
            physical: PhysicalParams {
                n: 10.0,
                ..PhysicalParams::reference()
            },
            ..ParamSet::reference()
        };
        let r = evaluate(&set, PointOptions::default());
        assert_eq!(r.status, Status::InvalidParameter);
        assert!(r.status.is_failure());
    }

    #[test]
    fn stability_only_skips_covariance() {
        let r = evaluate(
            &ParamSet::reference(),
            PointOptions {
                stability_only: true,
                ..PointOptions::default()
            },
        );
        assert_eq!(r.status, Status::Ok);
        assert!(r.covariance.is_none());
        assert!(r.stability.unwrap().stable);
    }
}
