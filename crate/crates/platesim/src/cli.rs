//! Command-line frontend: run scenarios (file-based or built-in), validate
//! scenario files, and list the built-ins.
//!
//! Exit codes are a stable scripting contract: 0 success, 1 usage or
//! validation error, 2 run completed but the final field contains non-finite
//! values (numerical blow-up). The run summary is a single machine-parseable
//! line of `key=value` pairs.

use crate::engine::{EngineError, RunError, SimState};
use crate::output::{DirectorySink, OutputError};
use crate::scenario::{builtin, check, parse_scenario, validate, PgmRange, Scenario, ScenarioError, BUILTINS};
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Where the scenario comes from. Exactly one source per run.
#[derive(Debug, Clone)]
pub enum ScenarioSource {
    Builtin(String),
    File(PathBuf),
}

/// A resolved `run` invocation. `None` overrides keep the scenario-file
/// values; set values beat the file.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub source: ScenarioSource,
    pub out_dir: PathBuf,
    pub steps: Option<u64>,
    pub dt: Option<f64>,
    pub snapshot_every: Option<u64>,
    pub workers: usize,
    pub csv: Option<bool>,
    pub pgm: Option<(f64, f64)>,
}

impl RunConfig {
    pub fn new(source: ScenarioSource, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            source,
            out_dir: out_dir.into(),
            steps: None,
            dt: None,
            snapshot_every: None,
            workers: 1,
            csv: None,
            pgm: None,
        }
    }
}

fn load_scenario(source: &ScenarioSource) -> Result<(String, Scenario), CliError> {
    match source {
        ScenarioSource::Builtin(name) => Ok((name.clone(), builtin(name)?)),
        ScenarioSource::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Read {
                path: path.clone(),
                source: e,
            })?;
            let scenario = parse_scenario(&text)?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "scenario".to_string());
            Ok((name, scenario))
        }
    }
}

/// Execute a scenario: apply overrides, run, write output files, and print
/// warnings plus one summary line. Returns the process exit code.
pub fn cmd_run(config: &RunConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let (name, mut scenario) = load_scenario(&config.source)?;
    if let Some(steps) = config.steps {
        scenario.time.steps = steps;
    }
    if let Some(dt) = config.dt {
        scenario.time.dt = dt;
    }
    if let Some(every) = config.snapshot_every {
        scenario.output.snapshot_every = every;
    }
    if let Some(csv) = config.csv {
        scenario.output.csv = csv;
    }
    if let Some((lo, hi)) = config.pgm {
        scenario.output.pgm = Some(PgmRange { lo, hi });
    }

    // Overrides can invalidate an otherwise clean scenario.
    let violations = check(&scenario);
    if !violations.is_empty() {
        return Err(ScenarioError::Invalid(violations).into());
    }
    for warning in validate(&scenario) {
        writeln!(out, "warning: {warning}")?;
    }

    let mut state = SimState::with_workers(&scenario, config.workers)?;
    let probe_names: Vec<String> = scenario
        .output
        .probes
        .iter()
        .map(|p| p.name.clone())
        .collect();
    let mut sink = DirectorySink::create(
        &config.out_dir,
        &name,
        scenario.output.csv,
        scenario.output.pgm.map(|r| (r.lo, r.hi)),
        &probe_names,
    )?;
    state.run(scenario.time.steps, &mut sink)?;

    let d = state.diagnostics();
    let finite = state.field_is_finite();
    writeln!(
        out,
        "scenario={name} step={} t={} min={} max={} mean={} enthalpy={} finite={finite}",
        state.step_index(),
        d.t,
        d.t_min,
        d.t_max,
        d.t_mean,
        d.enthalpy,
    )?;
    Ok(if finite { 0 } else { 2 })
}

/// Parse and validate a scenario file, printing every error and warning.
/// Returns 0 iff there are no errors (warnings alone are fine).
pub fn cmd_validate(path: &Path, out: &mut dyn Write) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Read {
        path: path.to_path_buf(),
        source: e,
    })?;
    match parse_scenario(&text) {
        Ok(scenario) => {
            let warnings = validate(&scenario);
            for warning in &warnings {
                writeln!(out, "warning: {warning}")?;
            }
            writeln!(
                out,
                "ok: {} ({} warning{})",
                path.display(),
                warnings.len(),
                if warnings.len() == 1 { "" } else { "s" }
            )?;
            Ok(0)
        }
        Err(ScenarioError::Invalid(violations)) => {
            for violation in &violations {
                writeln!(out, "error: {violation}")?;
            }
            Ok(1)
        }
        Err(err) => {
            writeln!(out, "error: {err}")?;
            Ok(1)
        }
    }
}

/// List the built-in scenarios with what each one reproduces.
pub fn cmd_scenarios(out: &mut dyn Write) -> std::io::Result<()> {
    for (name, description) in BUILTINS {
        writeln!(out, "{name:<22} {description}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{to_json, BUILTIN_NAMES};

    fn run_to_string(config: &RunConfig) -> (i32, String) {
        let mut buf = Vec::new();
        let code = cmd_run(config, &mut buf).unwrap();
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn scenarios_listing_has_five_entries_naming_their_figures() {
        let mut buf = Vec::new();
        cmd_scenarios(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(text.contains("fig4_combustion"));
        for (line, name) in lines.iter().zip(BUILTIN_NAMES) {
            assert!(line.starts_with(name), "{line}");
            assert!(line.contains("figure"), "{line}");
        }
    }

    #[test]
    fn run_zero_steps_reports_the_source_maximum() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = RunConfig::new(
            ScenarioSource::Builtin("fig3_point_source".into()),
            dir.path().join("out"),
        );
        config.steps = Some(0);
        let (code, text) = run_to_string(&config);
        assert_eq!(code, 0);
        let summary = text.lines().last().unwrap();
        assert!(summary.contains("max=50"), "{summary}");
        assert!(summary.contains("finite=true"), "{summary}");
        // initial snapshot only
        let entries: Vec<_> = std::fs::read_dir(dir.path().join("out"))
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        assert!(entries.contains(&"fig3_point_source_step00000000.csv".to_string()));
        assert_eq!(
            entries
                .iter()
                .filter(|name| name.ends_with(".csv") && name.contains("_step"))
                .count(),
            1
        );
    }

    #[test]
    fn unknown_builtin_fails_with_the_valid_names() {
        let dir = tempfile::tempdir().unwrap();
        let config = RunConfig::new(
            ScenarioSource::Builtin("figx_nonsense".into()),
            dir.path().join("out"),
        );
        let err = cmd_run(&config, &mut Vec::new()).unwrap_err();
        assert!(err.to_string().contains("fig2_linear_source"), "{err}");
    }

    #[test]
    fn out_of_bounds_region_in_a_file_names_the_region() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(
            &path,
            r#"{
                "grid": {"nx": 41, "ny": 41, "h": 0.001},
                "material": {"lambda": 1.5, "c": 1000.0, "rho": 1500.0},
                "sources": [
                    {"region": {"rect": {"i0": 39, "j0": 0, "i1": 45, "j1": 2}},
                     "law": {"dirichlet": {"schedule": [[0.0, 20.0]]}}}
                ],
                "time": {"dt": 0.005, "steps": 1}
            }"#,
        )
        .unwrap();

        let config = RunConfig::new(ScenarioSource::File(path.clone()), dir.path().join("out"));
        let err = cmd_run(&config, &mut Vec::new()).unwrap_err();
        assert!(err.to_string().contains("sources[0].region"), "{err}");

        let mut buf = Vec::new();
        let code = cmd_validate(&path, &mut buf).unwrap();
        assert_eq!(code, 1);
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("sources[0].region"), "{text}");
    }

    #[test]
    fn validate_reports_warnings_but_exits_zero() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fig2.json");
        let mut scenario = builtin("fig2_linear_source").unwrap();
        std::fs::write(&path, to_json(&scenario)).unwrap();
        let mut buf = Vec::new();
        assert_eq!(cmd_validate(&path, &mut buf).unwrap(), 0);
        let text = String::from_utf8(buf).unwrap();
        assert!(!text.lines().any(|l| l.starts_with("warning:")), "{text}");

        scenario.time.dt = 0.3;
        std::fs::write(&path, to_json(&scenario)).unwrap();
        let mut buf = Vec::new();
        assert_eq!(cmd_validate(&path, &mut buf).unwrap(), 0);
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("warning"), "{text}");
        assert!(text.contains("0.25"), "{text}");
    }

    #[test]
    fn validate_reports_syntax_position() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("broken.json");
        std::fs::write(&path, "{ \"grid\": {").unwrap();
        let mut buf = Vec::new();
        assert_eq!(cmd_validate(&path, &mut buf).unwrap(), 1);
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("line"), "{text}");
    }

    #[test]
    fn missing_file_is_a_read_error() {
        let err = cmd_validate(Path::new("/nonexistent/nowhere.json"), &mut Vec::new());
        assert!(matches!(err, Err(CliError::Read { .. })));
    }

    #[test]
    fn cli_overrides_beat_scenario_values() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = RunConfig::new(
            ScenarioSource::Builtin("fig3_point_source".into()),
            dir.path().join("out"),
        );
        config.steps = Some(3);
        config.snapshot_every = Some(1);
        config.csv = Some(false);
        config.pgm = Some((0.0, 50.0));
        let (code, _) = run_to_string(&config);
        assert_eq!(code, 0);
        let entries: Vec<_> = std::fs::read_dir(dir.path().join("out"))
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        // CSV disabled: no .csv files at all, probes included.
        assert!(entries.iter().all(|name| !name.ends_with(".csv")), "{entries:?}");
        // Snapshots at steps 0..=3 as PGM.
        let mut pgms: Vec<_> = entries
            .iter()
            .filter(|name| name.ends_with(".pgm"))
            .collect();
        pgms.sort();
        assert_eq!(pgms.len(), 4, "{entries:?}");
    }
}
