//! Experiment descriptions: the scenario data model, JSON parsing and
//! validation, and the built-in reproductions of the five reference
//! experiments.
//!
//! A scenario file is UTF-8 JSON with a fixed schema (unknown keys are
//! errors, not ignored). Top-level keys: `grid`, `material`,
//! `material_regions`, `initial`, `sources`, `boundary`, `flux_mode`,
//! `time`, `output`. All physical quantities are SI; temperatures are in
//! conditional degrees (an arbitrary linear scale).

use crate::lattice::{GridSpec, Material, Region};
use crate::physics::{stability_limit, BoundaryLaw, FluxMode, Schedule, SourceLaw};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One semantic problem in a scenario, with a path to the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// A non-fatal finding from [`validate`]; the scenario will still run.
#[derive(Debug, Clone, PartialEq)]
pub struct Warning {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    /// Malformed JSON or a schema mismatch (wrong type, unknown or missing
    /// field). The serde message carries the line and column.
    #[error("scenario syntax error: {0}")]
    Syntax(#[from] serde_json::Error),
    /// Structurally well-formed but semantically invalid; every violation is
    /// reported, not just the first.
    #[error("invalid scenario ({} problem{}):\n{}",
        .0.len(),
        if .0.len() == 1 { "" } else { "s" },
        .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Violation>),
    #[error("unknown builtin scenario {name:?}; valid names: {}", BUILTIN_NAMES.join(", "))]
    UnknownBuiltin { name: String },
}

/// A material patch applied over a region during setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialRegion {
    pub region: Region,
    pub material: Material,
}

/// Initial temperature: a uniform fill plus optional region overrides,
/// applied in declaration order (later regions win on overlap).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialField {
    #[serde(default)]
    pub uniform: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<InitialOverride>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialOverride {
    pub region: Region,
    pub temperature: f64,
}

/// A source law applied to every agent of a region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    pub region: Region,
    pub law: SourceLaw,
}

/// Discrete time grid: step length and step count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    /// Time step, seconds.
    pub dt: f64,
    /// Number of synchronous updates to run.
    pub steps: u64,
}

/// A named temperature probe at a single agent, sampled every step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Probe {
    pub name: String,
    pub i: usize,
    pub j: usize,
}

/// Temperature range mapped onto the 8-bit grayscale of PGM snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PgmRange {
    pub lo: f64,
    pub hi: f64,
}

/// What to write while running: snapshot cadence, probes, and formats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPlan {
    /// Emit a grid snapshot every this many steps; 0 disables periodic
    /// snapshots. The initial and final states are always emitted.
    #[serde(default)]
    pub snapshot_every: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub probes: Vec<Probe>,
    /// Write CSV snapshots and the probe series (default on).
    #[serde(default = "default_true")]
    pub csv: bool,
    /// Write grayscale PGM snapshots over this temperature range.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pgm: Option<PgmRange>,
}

fn default_true() -> bool {
    true
}

impl Default for OutputPlan {
    fn default() -> Self {
        Self {
            snapshot_every: 0,
            probes: Vec::new(),
            csv: true,
            pgm: None,
        }
    }
}

/// A full experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub grid: GridSpec,
    /// Material of every agent not covered by a region patch.
    pub material: Material,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub material_regions: Vec<MaterialRegion>,
    #[serde(default)]
    pub initial: InitialField,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sources: Vec<SourceSpec>,
    #[serde(default)]
    pub boundary: BoundaryLaw,
    #[serde(default)]
    pub flux_mode: FluxMode,
    pub time: TimeGrid,
    #[serde(default)]
    pub output: OutputPlan,
}

/// Parse a scenario file. Syntax and schema problems fail fast with a
/// position-annotated message; semantic problems are collected and reported
/// all at once.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let scenario: Scenario = serde_json::from_str(text)?;
    let violations = check(&scenario);
    if violations.is_empty() {
        Ok(scenario)
    } else {
        Err(ScenarioError::Invalid(violations))
    }
}

/// Serialize a scenario in the file schema.
pub fn to_json(scenario: &Scenario) -> String {
    serde_json::to_string_pretty(scenario).expect("scenario serialization is infallible")
}

/// Collect every semantic violation in a structurally well-formed scenario.
/// Empty means the scenario can be simulated.
pub fn check(scenario: &Scenario) -> Vec<Violation> {
    fn violation(path: impl Into<String>, message: impl Into<String>) -> Violation {
        Violation {
            path: path.into(),
            message: message.into(),
        }
    }

    let mut out = Vec::new();

    let grid_ok = match scenario.grid.check() {
        Ok(()) => true,
        Err(e) => {
            out.push(violation("grid", e.to_string()));
            false
        }
    };
    if let Err(e) = scenario.material.check() {
        out.push(violation("material", e.to_string()));
    }

    let check_region = |region: &Region, path: String, out: &mut Vec<Violation>| {
        if grid_ok {
            if let Err(e) = region.check(&scenario.grid) {
                out.push(Violation {
                    path,
                    message: e.to_string(),
                });
            }
        }
    };

    for (k, mr) in scenario.material_regions.iter().enumerate() {
        check_region(&mr.region, format!("material_regions[{k}].region"), &mut out);
        if let Err(e) = mr.material.check() {
            out.push(Violation {
                path: format!("material_regions[{k}].material"),
                message: e.to_string(),
            });
        }
    }

    if !scenario.initial.uniform.is_finite() {
        out.push(violation(
            "initial.uniform",
            format!("must be finite (got {})", scenario.initial.uniform),
        ));
    }
    for (k, ov) in scenario.initial.overrides.iter().enumerate() {
        check_region(&ov.region, format!("initial.overrides[{k}].region"), &mut out);
        if !ov.temperature.is_finite() {
            out.push(Violation {
                path: format!("initial.overrides[{k}].temperature"),
                message: format!("must be finite (got {})", ov.temperature),
            });
        }
    }

    for (k, src) in scenario.sources.iter().enumerate() {
        check_region(&src.region, format!("sources[{k}].region"), &mut out);
        match &src.law {
            SourceLaw::Dirichlet { schedule } | SourceLaw::Flux { schedule } => {
                if let Err(e) = schedule.check() {
                    out.push(Violation {
                        path: format!("sources[{k}].law.schedule"),
                        message: e.to_string(),
                    });
                }
            }
            SourceLaw::VolumetricConstant { gamma } => {
                if !gamma.is_finite() {
                    out.push(Violation {
                        path: format!("sources[{k}].law.gamma"),
                        message: format!("must be finite (got {gamma})"),
                    });
                }
            }
            SourceLaw::VolumetricLinear { k: coeff } => {
                if !coeff.is_finite() {
                    out.push(Violation {
                        path: format!("sources[{k}].law.k"),
                        message: format!("must be finite (got {coeff})"),
                    });
                }
            }
        }
    }

    // At most one imposed-temperature law per agent.
    if grid_ok {
        let mut claimed: Vec<Option<usize>> = vec![None; scenario.grid.agent_count()];
        for (k, src) in scenario.sources.iter().enumerate() {
            if !src.law.is_dirichlet() || src.region.check(&scenario.grid).is_err() {
                continue;
            }
            let mut clash: Option<usize> = None;
            for (i, j) in src.region.cells(&scenario.grid).expect("region checked") {
                let idx = scenario.grid.index(i, j);
                match claimed[idx] {
                    Some(prev) => clash = Some(prev),
                    None => claimed[idx] = Some(k),
                }
            }
            if let Some(prev) = clash {
                out.push(Violation {
                    path: format!("sources[{k}].region"),
                    message: format!(
                        "dirichlet region overlaps the dirichlet region of sources[{prev}]; \
                         at most one imposed temperature per agent"
                    ),
                });
            }
        }
    }

    if let BoundaryLaw::Convective { alpha, t_env } = scenario.boundary {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            out.push(violation(
                "boundary.alpha",
                format!("must be finite and non-negative (got {alpha})"),
            ));
        }
        if !t_env.is_finite() {
            out.push(violation(
                "boundary.t_env",
                format!("must be finite (got {t_env})"),
            ));
        }
    }

    if !(scenario.time.dt > 0.0) || !scenario.time.dt.is_finite() {
        out.push(violation(
            "time.dt",
            format!("must be finite and positive (got {})", scenario.time.dt),
        ));
    }

    for (k, probe) in scenario.output.probes.iter().enumerate() {
        if grid_ok && !scenario.grid.contains(probe.i, probe.j) {
            out.push(Violation {
                path: format!("output.probes[{k}]"),
                message: format!(
                    "probe {:?} at ({}, {}) is outside the {}x{} grid",
                    probe.name, probe.i, probe.j, scenario.grid.nx, scenario.grid.ny
                ),
            });
        }
        if scenario.output.probes[..k].iter().any(|p| p.name == probe.name) {
            out.push(Violation {
                path: format!("output.probes[{k}].name"),
                message: format!("duplicate probe name {:?}", probe.name),
            });
        }
        if probe.name.is_empty() || probe.name.contains([',', '\n', '\r']) {
            out.push(Violation {
                path: format!("output.probes[{k}].name"),
                message: format!(
                    "probe name {:?} must be non-empty and free of commas and line breaks \
                     (it becomes a CSV column header)",
                    probe.name
                ),
            });
        }
    }
    if let Some(range) = scenario.output.pgm {
        if !(range.lo < range.hi) || !range.lo.is_finite() || !range.hi.is_finite() {
            out.push(violation(
                "output.pgm",
                format!(
                    "range must satisfy lo < hi with finite bounds (got {}..{})",
                    range.lo, range.hi
                ),
            ));
        }
    }

    out
}

/// Non-fatal findings on a structurally valid scenario. Currently: a time
/// step above the explicit stability limit of the stiffest material, and
/// volumetric regions shadowed by an imposed-temperature region.
pub fn validate(scenario: &Scenario) -> Vec<Warning> {
    let mut out = Vec::new();

    let h = scenario.grid.h;
    let limit = std::iter::once(&scenario.material)
        .chain(scenario.material_regions.iter().map(|mr| &mr.material))
        .map(|m| stability_limit(*m, h))
        .fold(f64::INFINITY, f64::min);
    if scenario.time.dt > limit {
        out.push(Warning {
            path: "time.dt".into(),
            message: format!(
                "{} s exceeds the explicit-scheme stability limit {} s; \
                 grid-scale perturbations will be amplified instead of damped",
                scenario.time.dt, limit
            ),
        });
    }

    for (v, vol) in scenario.sources.iter().enumerate() {
        if !vol.law.is_volumetric() {
            continue;
        }
        for (d, dir) in scenario.sources.iter().enumerate() {
            if !dir.law.is_dirichlet() {
                continue;
            }
            let overlap = vol
                .region
                .cells(&scenario.grid)
                .ok()
                .map(|cells| cells.iter().any(|&(i, j)| dir.region.contains(i, j)))
                .unwrap_or(false);
            if overlap {
                out.push(Warning {
                    path: format!("sources[{v}].region"),
                    message: format!(
                        "volumetric region overlaps the dirichlet region of sources[{d}]; \
                         the imposed temperature wins on shared agents"
                    ),
                });
            }
        }
    }

    out
}

/// Built-in scenario names with one-line descriptions.
pub const BUILTINS: [(&str, &str); 5] = [
    (
        "fig2_linear_source",
        "plate heated by a 20-degree source row along one boundary (figure 2)",
    ),
    (
        "fig3_point_source",
        "plate heated by a 50-degree point source at the center (figure 3)",
    ),
    (
        "fig4_combustion",
        "quasilinear self-heating gamma(T) = k*T ignited by a center pulse (figure 4)",
    ),
    (
        "fig5_rect_anomaly",
        "boundary-row heating with a rectangular low-conductivity zone (figure 5)",
    ),
    (
        "fig6_insulating_strip",
        "boundary-column heating with a one-agent insulating strip dividing the plate (figure 6)",
    ),
];

/// The builtin names, in listing order.
pub const BUILTIN_NAMES: [&str; 5] = [
    "fig2_linear_source",
    "fig3_point_source",
    "fig4_combustion",
    "fig5_rect_anomaly",
    "fig6_insulating_strip",
];

/// Shared experimental setup: a 41x41 plate (1681 agents) with 1 mm spacing,
/// lambda = 1.5, C = 1000, rho = 1500, initial temperature 0, insulated
/// boundary, dt = 5 ms.
fn base_scenario(steps: u64, snapshot_every: u64) -> Scenario {
    Scenario {
        grid: GridSpec {
            nx: 41,
            ny: 41,
            h: 0.001,
        },
        material: Material {
            lambda: 1.5,
            c: 1000.0,
            rho: 1500.0,
        },
        material_regions: Vec::new(),
        initial: InitialField::default(),
        sources: Vec::new(),
        boundary: BoundaryLaw::Insulated,
        flux_mode: FluxMode::Harmonic,
        time: TimeGrid { dt: 0.005, steps },
        output: OutputPlan {
            snapshot_every,
            probes: Vec::new(),
            csv: true,
            pgm: None,
        },
    }
}

fn low_conductivity() -> Material {
    Material {
        lambda: 0.015,
        c: 1000.0,
        rho: 1500.0,
    }
}

fn probe(name: &str, i: usize, j: usize) -> Probe {
    Probe {
        name: name.to_string(),
        i,
        j,
    }
}

/// Fetch one of the five built-in experiment reproductions by name.
pub fn builtin(name: &str) -> Result<Scenario, ScenarioError> {
    let scenario = match name {
        "fig2_linear_source" => {
            let mut s = base_scenario(200_000, 20_000);
            s.sources.push(SourceSpec {
                region: Region::Row { j: 0 },
                law: SourceLaw::Dirichlet {
                    schedule: Schedule::constant(20.0),
                },
            });
            s.output.probes = vec![probe("mid", 20, 20), probe("far", 20, 40)];
            s.output.pgm = Some(PgmRange { lo: 0.0, hi: 20.0 });
            s
        }
        "fig3_point_source" => {
            let mut s = base_scenario(10_000, 1_000);
            s.sources.push(SourceSpec {
                region: Region::Point { i: 20, j: 20 },
                law: SourceLaw::Dirichlet {
                    schedule: Schedule::constant(50.0),
                },
            });
            s.output.probes = vec![probe("near_source", 21, 20), probe("edge", 40, 20)];
            s.output.pgm = Some(PgmRange { lo: 0.0, hi: 50.0 });
            s
        }
        "fig4_combustion" => {
            // Neither the self-heating coefficient nor the pulse magnitude is
            // a measured constant; k = 6e5 W/(m3*K) and a 50-degree pulse make
            // the slow-then-sharp rise clearly visible within 2000 steps.
            let mut s = base_scenario(2_000, 500);
            s.initial.overrides.push(InitialOverride {
                region: Region::Point { i: 20, j: 20 },
                temperature: 50.0,
            });
            s.sources.push(SourceSpec {
                region: Region::All,
                law: SourceLaw::VolumetricLinear { k: 6.0e5 },
            });
            s.output.probes = vec![probe("center", 20, 20), probe("corner", 0, 0)];
            s.output.pgm = Some(PgmRange { lo: 0.0, hi: 100.0 });
            s
        }
        "fig5_rect_anomaly" => {
            let mut s = base_scenario(40_000, 10_000);
            s.material_regions.push(MaterialRegion {
                region: Region::Rect {
                    i0: 12,
                    j0: 16,
                    i1: 32,
                    j1: 35,
                },
                material: low_conductivity(),
            });
            s.sources.push(SourceSpec {
                region: Region::Row { j: 0 },
                law: SourceLaw::Dirichlet {
                    schedule: Schedule::constant(20.0),
                },
            });
            s.output.probes = vec![probe("anomaly", 22, 25), probe("bulk", 5, 25)];
            s.output.pgm = Some(PgmRange { lo: 0.0, hi: 20.0 });
            s
        }
        "fig6_insulating_strip" => {
            // The strip is perpendicular to the heating front: source on the
            // left column, one-agent strip at the mid column, so the right
            // half only warms through the strip.
            let mut s = base_scenario(40_000, 10_000);
            s.material_regions.push(MaterialRegion {
                region: Region::Column { i: 20 },
                material: low_conductivity(),
            });
            s.sources.push(SourceSpec {
                region: Region::Column { i: 0 },
                law: SourceLaw::Dirichlet {
                    schedule: Schedule::constant(20.0),
                },
            });
            s.output.probes = vec![probe("near_half", 10, 20), probe("far_half", 30, 20)];
            s.output.pgm = Some(PgmRange { lo: 0.0, hi: 20.0 });
            s
        }
        _ => {
            return Err(ScenarioError::UnknownBuiltin {
                name: name.to_string(),
            })
        }
    };
    debug_assert!(check(&scenario).is_empty());
    Ok(scenario)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_gets_defaults() {
        let text = r#"{
            "grid": {"nx": 3, "ny": 3, "h": 0.001},
            "material": {"lambda": 1.5, "c": 1000.0, "rho": 1500.0},
            "time": {"dt": 0.005, "steps": 10}
        }"#;
        let s = parse_scenario(text).unwrap();
        assert_eq!(s.boundary, BoundaryLaw::Insulated);
        assert_eq!(s.flux_mode, FluxMode::Harmonic);
        assert_eq!(s.initial.uniform, 0.0);
        assert!(s.sources.is_empty());
        assert!(s.output.csv);
        assert_eq!(s.output.snapshot_every, 0);
    }

    #[test]
    fn unknown_keys_are_errors() {
        let text = r#"{
            "grid": {"nx": 3, "ny": 3, "h": 0.001},
            "material": {"lambda": 1.5, "c": 1000.0, "rho": 1500.0},
            "time": {"dt": 0.005, "steps": 10},
            "extra_knob": 1
        }"#;
        let err = parse_scenario(text).unwrap_err();
        assert!(err.to_string().contains("extra_knob"), "{err}");

        let nested = r#"{
            "grid": {"nx": 3, "ny": 3, "h": 0.001, "depth": 2},
            "material": {"lambda": 1.5, "c": 1000.0, "rho": 1500.0},
            "time": {"dt": 0.005, "steps": 10}
        }"#;
        let err = parse_scenario(nested).unwrap_err();
        assert!(err.to_string().contains("depth"), "{err}");
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = parse_scenario("{ \"grid\": ").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line"), "{msg}");
        assert!(msg.contains("column"), "{msg}");
    }

    #[test]
    fn out_of_bounds_region_is_a_single_named_violation() {
        let text = r#"{
            "grid": {"nx": 41, "ny": 41, "h": 0.001},
            "material": {"lambda": 1.5, "c": 1000.0, "rho": 1500.0},
            "material_regions": [
                {"region": {"rect": {"i0": 30, "j0": 30, "i1": 50, "j1": 45}},
                 "material": {"lambda": 0.015, "c": 1000.0, "rho": 1500.0}}
            ],
            "time": {"dt": 0.005, "steps": 10}
        }"#;
        match parse_scenario(text).unwrap_err() {
            ScenarioError::Invalid(violations) => {
                assert_eq!(violations.len(), 1);
                assert_eq!(violations[0].path, "material_regions[0].region");
                assert!(violations[0].message.contains("41x41"));
            }
            other => panic!("expected Invalid, got {other:?}"),
        }
    }

    #[test]
    fn all_violations_are_reported_not_just_the_first() {
        let text = r#"{
            "grid": {"nx": 5, "ny": 5, "h": 0.001},
            "material": {"lambda": -1.0, "c": 1000.0, "rho": 1500.0},
            "sources": [
                {"region": {"point": {"i": 9, "j": 0}},
                 "law": {"dirichlet": {"schedule": []}}}
            ],
            "time": {"dt": 0.0, "steps": 10}
        }"#;
        match parse_scenario(text).unwrap_err() {
            ScenarioError::Invalid(violations) => {
                let paths: Vec<_> = violations.iter().map(|v| v.path.as_str()).collect();
                assert!(paths.contains(&"material"), "{paths:?}");
                assert!(paths.contains(&"sources[0].region"), "{paths:?}");
                assert!(paths.contains(&"sources[0].law.schedule"), "{paths:?}");
                assert!(paths.contains(&"time.dt"), "{paths:?}");
            }
            other => panic!("expected Invalid, got {other:?}"),
        }
    }

    #[test]
    fn overlapping_dirichlet_regions_are_rejected() {
        let text = r#"{
            "grid": {"nx": 5, "ny": 5, "h": 0.001},
            "material": {"lambda": 1.5, "c": 1000.0, "rho": 1500.0},
            "sources": [
                {"region": {"row": {"j": 0}},
                 "law": {"dirichlet": {"schedule": [[0.0, 20.0]]}}},
                {"region": {"point": {"i": 2, "j": 0}},
                 "law": {"dirichlet": {"schedule": [[0.0, 50.0]]}}}
            ],
            "time": {"dt": 0.005, "steps": 10}
        }"#;
        match parse_scenario(text).unwrap_err() {
            ScenarioError::Invalid(violations) => {
                assert_eq!(violations.len(), 1);
                assert_eq!(violations[0].path, "sources[1].region");
                assert!(violations[0].message.contains("sources[0]"));
            }
            other => panic!("expected Invalid, got {other:?}"),
        }
    }

    #[test]
    fn every_builtin_round_trips_and_validates_clean() {
        for name in BUILTIN_NAMES {
            let s = builtin(name).unwrap();
            assert!(check(&s).is_empty(), "{name} should check clean");
            assert!(validate(&s).is_empty(), "{name} should validate clean");
            let text = to_json(&s);
            let back = parse_scenario(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(back, s, "{name} must round-trip field-for-field");
        }
    }

    #[test]
    fn builtin_fixtures_match_the_experiments() {
        let fig2 = builtin("fig2_linear_source").unwrap();
        assert_eq!(fig2.sources.len(), 1);
        assert_eq!(fig2.sources[0].region, Region::Row { j: 0 });
        match &fig2.sources[0].law {
            SourceLaw::Dirichlet { schedule } => assert_eq!(schedule.value_at(123.0), 20.0),
            other => panic!("fig2 law: {other:?}"),
        }

        let fig3 = builtin("fig3_point_source").unwrap();
        assert_eq!(fig3.sources[0].region, Region::Point { i: 20, j: 20 });
        match &fig3.sources[0].law {
            SourceLaw::Dirichlet { schedule } => assert_eq!(schedule.value_at(0.0), 50.0),
            other => panic!("fig3 law: {other:?}"),
        }

        let fig6 = builtin("fig6_insulating_strip").unwrap();
        assert_eq!(fig6.material_regions.len(), 1);
        assert_eq!(fig6.material_regions[0].region, Region::Column { i: 20 });
        assert_eq!(fig6.material_regions[0].material.lambda, 0.015);

        for name in BUILTIN_NAMES {
            let s = builtin(name).unwrap();
            assert_eq!((s.grid.nx, s.grid.ny, s.grid.h), (41, 41, 0.001));
            assert_eq!(s.time.dt, 0.005);
            assert_eq!(s.boundary, BoundaryLaw::Insulated);
        }
    }

    #[test]
    fn unknown_builtin_lists_valid_names() {
        let err = builtin("fig7_wormhole").unwrap_err();
        let msg = err.to_string();
        for name in BUILTIN_NAMES {
            assert!(msg.contains(name), "{msg}");
        }
    }

    #[test]
    fn stability_warning_cites_the_limit() {
        let mut s = builtin("fig2_linear_source").unwrap();
        assert!(validate(&s).is_empty());
        s.time.dt = 0.3;
        let warnings = validate(&s);
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].path, "time.dt");
        assert!(warnings[0].message.contains("0.25"), "{}", warnings[0]);
    }

    #[test]
    fn dirichlet_over_volumetric_is_a_warning_not_an_error() {
        let mut s = base_scenario(10, 0);
        s.sources.push(SourceSpec {
            region: Region::All,
            law: SourceLaw::VolumetricLinear { k: 1.0e5 },
        });
        s.sources.push(SourceSpec {
            region: Region::Row { j: 0 },
            law: SourceLaw::Dirichlet {
                schedule: Schedule::constant(20.0),
            },
        });
        assert!(check(&s).is_empty());
        let warnings = validate(&s);
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].message.contains("sources[1]"));
    }

    #[test]
    fn empty_source_list_validates_clean() {
        let s = base_scenario(100, 0);
        assert!(check(&s).is_empty());
        assert!(validate(&s).is_empty());
    }

    #[test]
    fn schema_uses_documented_key_names() {
        let text = to_json(&builtin("fig5_rect_anomaly").unwrap());
        for key in [
            "\"grid\"",
            "\"material\"",
            "\"material_regions\"",
            "\"initial\"",
            "\"sources\"",
            "\"boundary\"",
            "\"flux_mode\"",
            "\"time\"",
            "\"output\"",
            "\"rect\"",
            "\"dirichlet\"",
        ] {
            assert!(text.contains(key), "serialized scenario missing {key}:\n{text}");
        }
    }
}
