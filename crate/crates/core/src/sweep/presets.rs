//! Built-in sweeps that regenerate the published figure data.

use crate::params::{Direction, ParamPath, ParamSet};

use super::{Axis, Outputs, SpinSelection, SweepSpec};

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    /// Named sub-sweeps; each part is written to its own table.
    pub parts: Vec<(&'static str, SweepSpec)>,
}

/// Scans in N hold M = 50 fixed and let the second coupling continue past N < M.
fn fixed_distribution(mut base: ParamSet) -> ParamSet {
    base.physical.m = 50.0;
    base.physical.coupling_continuation = true;
    base
}

fn spec(base: ParamSet, axes: Vec<Axis>, spin: SpinSelection, outputs: Outputs) -> SweepSpec {
    SweepSpec {
        spin,
        outputs,
        ..SweepSpec::new(base, axes)
    }
}

fn with_direction(mut base: ParamSet, d: Direction) -> ParamSet {
    base.set_direction(d);
    base
}

pub fn presets(base: &ParamSet) -> Vec<Preset> {
    let e_n_axes = || {
        vec![
            Axis::linear(ParamPath::E, 0.0, 20.0, 201),
            Axis::linear(ParamPath::N, 1.0, 200.0, 200),
        ]
    };
    let fixed = fixed_distribution(base.clone());
    let n_minus_1 = base.physical.n - 1.0;
    let mut threshold_base = with_direction(fixed.clone(), Direction::None);
    threshold_base.set(ParamPath::T, 200.0);

    vec![
        Preset {
            name: "fig2-stability",
            description: "stability over drive amplitude and molecule number, CW and CCW",
            parts: [Direction::Cw, Direction::Ccw]
                .into_iter()
                .map(|d| {
                    let s = spec(
                        with_direction(fixed.clone(), d),
                        e_n_axes(),
                        SpinSelection::Base,
                        Outputs::STABILITY,
                    );
                    (d.label(), s)
                })
                .collect(),
        },
        Preset {
            name: "fig3-detuning",
            description: "entanglement versus each cavity detuning at all three Sagnac cases",
            parts: vec![
                (
                    "delta-c1",
                    spec(
                        base.clone(),
                        vec![Axis::linear(ParamPath::DeltaC1, 0.0, 3.0, 301)],
                        SpinSelection::PairedWithReciprocal,
                        Outputs::ENTANGLEMENT,
                    ),
                ),
                (
                    "delta-c2",
                    spec(
                        base.clone(),
                        vec![Axis::linear(ParamPath::DeltaC2, 0.0, 3.0, 301)],
                        SpinSelection::PairedWithReciprocal,
                        Outputs::ENTANGLEMENT,
                    ),
                ),
            ],
        },
        Preset {
            name: "fig4-distribution",
            description: "entanglement versus the distribution number M over [1, N-1]",
            parts: vec![(
                "m-scan",
                spec(
                    base.clone(),
                    vec![Axis::linear(
                        ParamPath::M,
                        1.0,
                        n_minus_1,
                        n_minus_1.max(2.0) as usize,
                    )],
                    SpinSelection::PairedWithReciprocal,
                    Outputs::ENTANGLEMENT,
                ),
            )],
        },
        Preset {
            name: "fig5-contours",
            description: "entanglement over molecule number and bath temperature",
            parts: vec![(
                "n-t",
                spec(
                    fixed.clone(),
                    vec![
                        Axis::linear(ParamPath::N, 1.0, 200.0, 200),
                        Axis::linear(ParamPath::T, 0.0, 600.0, 61),
                    ],
                    SpinSelection::PairedWithReciprocal,
                    Outputs::ENTANGLEMENT,
                ),
            )],
        },
        Preset {
            name: "fig6-contrast",
            description: "bidirectional contrast versus the auxiliary cavity detuning",
            parts: vec![(
                "delta-c2",
                spec(
                    base.clone(),
                    vec![Axis::linear(ParamPath::DeltaC2, 0.0, 2.5, 251)],
                    SpinSelection::Paired,
                    Outputs::CONTRAST,
                ),
            )],
        },
        Preset {
            name: "fig6-threshold",
            description: "entanglement versus molecule number at 200 K without rotation",
            parts: vec![(
                "n-scan",
                spec(
                    threshold_base,
                    vec![Axis::linear(ParamPath::N, 1.0, 200.0, 200)],
                    SpinSelection::Base,
                    Outputs::ENTANGLEMENT,
                ),
            )],
        },
    ]
}

pub fn preset(name: &str, base: &ParamSet) -> Option<Preset> {
    presets(base).into_iter().find(|p| p.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_validates() {
        let all = presets(&ParamSet::reference());
        assert_eq!(all.len(), 6);
        for p in &all {
            assert!(!p.parts.is_empty());
            for (label, s) in &p.parts {
                s.validate()
                    .unwrap_or_else(|e| panic!("{}/{label}: {e}", p.name));
            }
        }
    }

    #[test]
    fn distribution_scan_spans_open_interval() {
        let p = preset("fig4-distribution", &ParamSet::reference()).unwrap();
        let v = p.parts[0].1.axes[0].values();
        assert_eq!(v.first(), Some(&1.0));
        assert_eq!(v.last(), Some(&99.0));
        assert_eq!(v.len(), 99);
        assert!((v[48] - 49.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_preset_is_none() {
        assert!(preset("fig7", &ParamSet::reference()).is_none());
    }
}
