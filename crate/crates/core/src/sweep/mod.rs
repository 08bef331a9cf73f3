//! Parameter-grid sweeps with deterministic output ordering.
//!
//! Grid points are independent tasks on a rayon pool; results are collected
//! in grid order (first axis outermost), so the emitted table does not depend
//! on the worker count.

mod map;
mod presets;
mod table;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::entanglement::{contrast_ratio, ModePair};
use crate::error::{Error, Result};
use crate::params::{Direction, ParamPath, ParamSet};
use crate::point::{evaluate, PointOptions, PointResult, Status};
use crate::Mat8;

pub use map::{stability_map, MapPoint, StabilityMap};
pub use presets::{preset, presets, Preset};
pub use table::{emit, format_float, Cell, Format, ResultTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub path: ParamPath,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub scale: Scale,
}

impl Axis {
    pub fn linear(path: ParamPath, start: f64, stop: f64, count: usize) -> Self {
        Axis {
            path,
            start,
            stop,
            count,
            scale: Scale::Linear,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::Config(format!(
                "axis {} needs count >= 2",
                self.path
            )));
        }
        if !self.start.is_finite() || !self.stop.is_finite() || self.start == self.stop {
            return Err(Error::Config(format!(
                "axis {} must span a finite, non-empty range",
                self.path
            )));
        }
        if self.scale == Scale::Log && !(self.start > 0.0 && self.stop > 0.0) {
            return Err(Error::Config(format!(
                "log axis {} needs positive bounds",
                self.path
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    return self.stop;
                }
                let t = i as f64 / last;
                match self.scale {
                    Scale::Linear => self.start + (self.stop - self.start) * t,
                    Scale::Log => (self.start.ln() + (self.stop.ln() - self.start.ln()) * t).exp(),
                }
            })
            .collect()
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}:{}",
            self.path, self.start, self.stop, self.count
        )?;
        if self.scale == Scale::Log {
            f.write_str(":log")?;
        }
        Ok(())
    }
}

impl FromStr for Axis {
    type Err = Error;

    /// `PATH:START:STOP:COUNT[:lin|:log]`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(Error::Config(format!(
                "axis `{s}` must look like PATH:START:STOP:COUNT[:log]"
            )));
        }
        let num = |x: &str| {
            x.parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number `{x}` in axis `{s}`")))
        };
        let scale = match parts.get(4) {
            None | Some(&"lin") | Some(&"linear") => Scale::Linear,
            Some(&"log") => Scale::Log,
            Some(other) => return Err(Error::Config(format!("unknown axis scale `{other}`"))),
        };
        let axis = Axis {
            path: parts[0].parse()?,
            start: num(parts[1])?,
            stop: num(parts[2])?,
            count: parts[3]
                .parse()
                .map_err(|_| Error::Config(format!("bad count in axis `{s}`")))?,
            scale,
        };
        axis.validate()?;
        Ok(axis)
    }
}

/// Spin directions evaluated at every grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinSelection {
    /// The base parameter set's own direction only.
    Base,
    /// CW and CCW at the base |Δ_F|.
    Paired,
    /// Δ_F = 0, then CW, then CCW.
    PairedWithReciprocal,
}

impl SpinSelection {
    fn directions(self, base: Direction) -> Vec<Direction> {
        match self {
            SpinSelection::Base => vec![base],
            SpinSelection::Paired => vec![Direction::Cw, Direction::Ccw],
            SpinSelection::PairedWithReciprocal => {
                vec![Direction::None, Direction::Cw, Direction::Ccw]
            }
        }
    }

    pub fn is_paired(self) -> bool {
        self != SpinSelection::Base
    }
}

impl fmt::Display for SpinSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpinSelection::Base => "base",
            SpinSelection::Paired => "paired",
            SpinSelection::PairedWithReciprocal => "all",
        })
    }
}

impl FromStr for SpinSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "base" => Ok(SpinSelection::Base),
            "paired" => Ok(SpinSelection::Paired),
            "all" | "paired-with-reciprocal" => Ok(SpinSelection::PairedWithReciprocal),
            other => Err(Error::Config(format!("unknown spin selection `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outputs {
    pub entanglement: bool,
    pub contrast: bool,
}

impl Outputs {
    pub const STABILITY: Outputs = Outputs {
        entanglement: false,
        contrast: false,
    };
    pub const ENTANGLEMENT: Outputs = Outputs {
        entanglement: true,
        contrast: false,
    };
    pub const CONTRAST: Outputs = Outputs {
        entanglement: true,
        contrast: true,
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: ParamSet,
    /// Where `base` was read from, for provenance only.
    pub base_source: Option<String>,
    pub axes: Vec<Axis>,
    pub spin: SpinSelection,
    pub outputs: Outputs,
    pub branch: Option<usize>,
}

impl SweepSpec {
    pub fn new(base: ParamSet, axes: Vec<Axis>) -> Self {
        SweepSpec {
            base,
            base_source: None,
            axes,
            spin: SpinSelection::Base,
            outputs: Outputs::ENTANGLEMENT,
            branch: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.len() > 2 {
            return Err(Error::Config("at most two sweep axes are supported".into()));
        }
        for a in &self.axes {
            a.validate()?;
        }
        if self.axes.len() == 2 && self.axes[0].path == self.axes[1].path {
            return Err(Error::Config(
                "sweep axes must name different parameters".into(),
            ));
        }
        if self.outputs.contrast && !self.spin.is_paired() {
            return Err(Error::Config(
                "contrast output needs paired spin directions".into(),
            ));
        }
        Ok(())
    }

    /// Grid points in row order, first axis outermost. No axes means no points.
    pub fn grid(&self) -> Vec<Vec<f64>> {
        let mut points: Vec<Vec<f64>> = if self.axes.is_empty() {
            Vec::new()
        } else {
            vec![Vec::new()]
        };
        for axis in &self.axes {
            let vals = axis.values();
            points = points
                .into_iter()
                .flat_map(|p| {
                    vals.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        points
    }

    fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = self
            .axes
            .iter()
            .map(|a| a.path.name().to_string())
            .collect();
        if self.spin.is_paired() {
            h.push("spin".into());
        }
        h.extend(
            [
                "Delta_F",
                "status",
                "stable",
                "margin",
                "method_agreement",
                "branch_count",
                "selected_u",
                "multistable",
            ]
            .map(String::from),
        );
        if self.outputs.entanglement {
            for p in ModePair::REPORTED {
                h.push(format!("E_{}", p.label()));
            }
            for p in ModePair::REPORTED {
                h.push(format!("zeta_{}", p.label()));
            }
            h.push("uncertainty_min_eig".into());
        }
        if self.outputs.contrast {
            for p in ModePair::REPORTED {
                h.push(format!("C_{}", p.label()));
                h.push(format!("C_{}_undefined", p.label()));
            }
        }
        h
    }

    fn provenance(&self) -> Vec<String> {
        let mut lines = vec![format!("molcav {}", env!("CARGO_PKG_VERSION"))];
        if let Some(src) = &self.base_source {
            lines.push(format!("base = {src}"));
        }
        for a in &self.axes {
            lines.push(format!("axis = {a}"));
        }
        lines.push(format!("spin = {}", self.spin));
        if let Some(b) = self.branch {
            lines.push(format!("branch = {b}"));
        }
        lines.extend(self.base.describe());
        lines
    }
}

/// A sweep table plus the covariance matrix of every row (None where not computed).
#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub table: ResultTable,
    pub covariances: Vec<Option<Mat8>>,
    pub failures: usize,
}

struct SpinResult {
    direction: Direction,
    result: PointResult,
}

fn evaluate_grid_point(spec: &SweepSpec, values: &[f64]) -> Vec<SpinResult> {
    let mut set = spec.base.clone();
    for (axis, &v) in spec.axes.iter().zip(values) {
        set.set(axis.path, v);
    }
    let opts = PointOptions {
        branch: spec.branch,
        stability_only: !spec.outputs.entanglement,
    };
    spec.spin
        .directions(set.physical.sagnac.direction)
        .into_iter()
        .map(|direction| {
            let mut s = set.clone();
            s.set_direction(direction);
            SpinResult {
                direction,
                result: evaluate(&s, opts),
            }
        })
        .collect()
}

fn nan_or(v: Option<f64>) -> Cell {
    Cell::Num(v.unwrap_or(f64::NAN))
}

fn rows_for_point(spec: &SweepSpec, values: &[f64], spins: &[SpinResult]) -> Vec<Vec<Cell>> {
    let contrast: Vec<(f64, bool)> = if spec.outputs.contrast {
        let find = |d: Direction| spins.iter().find(|s| s.direction == d);
        let (cw, ccw) = (find(Direction::Cw), find(Direction::Ccw));
        ModePair::REPORTED
            .iter()
            .map(|&pair| {
                let e = |s: Option<&SpinResult>| s.and_then(|s| s.result.log_negativity(pair));
                match (e(cw), e(ccw)) {
                    (Some(p), Some(m)) => contrast_ratio(p, m, pair)
                        .map(|c| (c.contrast, c.undefined))
                        .unwrap_or((f64::NAN, true)),
                    _ => (f64::NAN, true),
                }
            })
            .collect()
    } else {
        Vec::new()
    };

    spins
        .iter()
        .map(|s| {
            let r = &s.result;
            let mut row: Vec<Cell> = values.iter().map(|&v| Cell::Num(v)).collect();
            if spec.spin.is_paired() {
                row.push(s.direction.label().into());
            }
            row.push(nan_or(r.normalized.as_ref().map(|n| n.delta_f)));
            row.push(r.status.label().into());
            row.push(r.stability.is_some_and(|x| x.stable).into());
            row.push(nan_or(r.stability.map(|x| x.margin)));
            row.push(r.stability.is_some_and(|x| x.method_agreement).into());
            row.push(r.branch_count().into());
            row.push(nan_or(
                r.meanfield
                    .as_ref()
                    .map(|m| m.selected_state().photon_number),
            ));
            row.push(r.meanfield.as_ref().is_some_and(|m| m.multistable).into());
            if spec.outputs.entanglement {
                let reports = |f: fn(&crate::entanglement::EntanglementReport) -> f64| {
                    (0..ModePair::REPORTED.len())
                        .map(|i| nan_or(r.entanglement.get(i).copied().flatten().as_ref().map(f)))
                        .collect::<Vec<_>>()
                };
                row.extend(reports(|e| e.log_negativity));
                row.extend(reports(|e| e.zeta));
                row.push(nan_or(r.uncertainty_min_eig));
            }
            for &(c, undefined) in &contrast {
                row.push(Cell::Num(c));
                row.push(undefined.into());
            }
            row
        })
        .collect()
}

/// Runs the sweep on `jobs` worker threads (all cores when `None`).
pub fn run_sweep_detailed(spec: &SweepSpec, jobs: Option<usize>) -> Result<SweepOutput> {
    spec.validate()?;
    let grid = spec.grid();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let per_point: Vec<Vec<SpinResult>> = pool.install(|| {
        grid.par_iter()
            .map(|v| evaluate_grid_point(spec, v))
            .collect()
    });

    let mut table = ResultTable {
        header: spec.header(),
        rows: Vec::new(),
        provenance: spec.provenance(),
    };
    let mut covariances = Vec::new();
    let mut failures = 0;
    for (values, spins) in grid.iter().zip(&per_point) {
        table.rows.extend(rows_for_point(spec, values, spins));
        for s in spins {
            covariances.push(s.result.covariance.map(|c| c.0));
            if s.result.status.is_failure() {
                failures += 1;
            }
        }
    }
    Ok(SweepOutput {
        table,
        covariances,
        failures,
    })
}

/// Evaluates `spec.base` alone, ignoring the axes, with the sweep's spin and
/// output selection.
pub fn run_point(spec: &SweepSpec) -> Result<SweepOutput> {
    let spec = SweepSpec {
        axes: Vec::new(),
        ..spec.clone()
    };
    spec.validate()?;
    let spins = evaluate_grid_point(&spec, &[]);
    Ok(SweepOutput {
        table: ResultTable {
            header: spec.header(),
            rows: rows_for_point(&spec, &[], &spins),
            provenance: spec.provenance(),
        },
        covariances: spins
            .iter()
            .map(|s| s.result.covariance.map(|c| c.0))
            .collect(),
        failures: spins
            .iter()
            .filter(|s| s.result.status.is_failure())
            .count(),
    })
}

pub fn run_sweep(spec: &SweepSpec) -> Result<ResultTable> {
    run_sweep_detailed(spec, None).map(|o| o.table)
}

/// Rows of `table` whose status column equals `status`.
pub fn count_status(table: &ResultTable, status: Status) -> usize {
    table
        .texts("status")
        .map_or(0, |s| s.iter().filter(|&&x| x == status.label()).count())
}
