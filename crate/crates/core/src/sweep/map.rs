use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::ParamSet;
use crate::point::{evaluate, PointOptions, Status};
use crate::stability::StabilityReport;

use super::{Axis, Cell, ResultTable};

#[derive(Debug, Clone, PartialEq)]
pub struct MapPoint {
    pub param1: f64,
    pub param2: f64,
    pub status: Status,
    /// None when no steady state could be built; such points count as unstable.
    pub report: Option<StabilityReport>,
    pub branch_count: usize,
    pub multistable: bool,
}

impl MapPoint {
    pub fn stable(&self) -> bool {
        self.report.is_some_and(|r| r.stable)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityMap {
    pub axes: [Axis; 2],
    /// Row-major, first axis outermost.
    pub points: Vec<MapPoint>,
}

impl StabilityMap {
    pub fn at(&self, i: usize, j: usize) -> &MapPoint {
        &self.points[i * self.axes[1].count + j]
    }

    /// Columns `param1, param2, stable, margin, branch_count`, plus `status`
    /// and `multistable` flags.
    pub fn to_table(&self) -> ResultTable {
        let header = [
            "param1",
            "param2",
            "stable",
            "margin",
            "branch_count",
            "status",
            "multistable",
        ]
        .map(String::from)
        .to_vec();
        let rows = self
            .points
            .iter()
            .map(|p| {
                vec![
                    Cell::Num(p.param1),
                    Cell::Num(p.param2),
                    p.stable().into(),
                    Cell::Num(p.report.map_or(f64::NAN, |r| r.margin)),
                    p.branch_count.into(),
                    p.status.label().into(),
                    p.multistable.into(),
                ]
            })
            .collect();
        ResultTable {
            header,
            rows,
            provenance: vec![
                format!("molcav {}", env!("CARGO_PKG_VERSION")),
                format!("param1 = {}", self.axes[0]),
                format!("param2 = {}", self.axes[1]),
            ],
        }
    }
}

fn strictly_monotone(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0]) || v.windows(2).all(|w| w[1] < w[0])
}

/// Stability verdict of the selected branch at every point of a two-axis grid.
pub fn stability_map(
    base: &ParamSet,
    axes: [Axis; 2],
    branch: Option<usize>,
) -> Result<StabilityMap> {
    for a in &axes {
        a.validate()?;
    }
    if axes[0].path == axes[1].path {
        return Err(Error::Config(
            "map axes must name different parameters".into(),
        ));
    }
    let (v1, v2) = (axes[0].values(), axes[1].values());
    if !strictly_monotone(&v1) || !strictly_monotone(&v2) {
        return Err(Error::Config("map axes must be strictly monotone".into()));
    }
    let grid: Vec<(f64, f64)> = v1
        .iter()
        .flat_map(|&x| v2.iter().map(move |&y| (x, y)))
        .collect();
    let opts = PointOptions {
        branch,
        stability_only: true,
    };
    let points = grid
        .par_iter()
        .map(|&(x, y)| {
            let mut set = base.clone();
            set.set(axes[0].path, x);
            set.set(axes[1].path, y);
            let r = evaluate(&set, opts);
            MapPoint {
                param1: x,
                param2: y,
                status: r.status,
                report: r.stability,
                branch_count: r.branch_count(),
                multistable: r.meanfield.as_ref().is_some_and(|m| m.multistable),
            }
        })
        .collect();
    Ok(StabilityMap { axes, points })
}
