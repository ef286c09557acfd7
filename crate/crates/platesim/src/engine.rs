//! The synchronous time loop: builds simulation state from a scenario,
//! advances it with double buffering, applies source clamps, collects
//! diagnostics, and emits output through sinks.
//!
//! Determinism contract: the temperature field after `n` steps is
//! bit-identical across runs and across any worker count. Three things
//! enforce it: every agent reads only the immutable step-`k` buffer, the
//! pairwise flux summation uses the fixed grouping
//! `(north + south) + (east + west)`, and the volumetric term is added to
//! the flux sum before scaling. Workers partition the next buffer into
//! whole rows and never read it, so scheduling order cannot change a single
//! bit of the result.

use crate::lattice::{Lattice, Material};
use crate::output::{Sink, SnapshotFrame};
use crate::physics::{
    apply_update, convective_flux, effective_lambda, pair_flux, BoundaryLaw, Schedule, SourceLaw,
};
use crate::scenario::{check, Scenario, Violation};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("scenario failed validation:\n{}",
        .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    InvalidScenario(Vec<Violation>),
    #[error("lattice is {got_nx}x{got_ny} but the scenario grid is {want_nx}x{want_ny}")]
    LatticeMismatch {
        got_nx: usize,
        got_ny: usize,
        want_nx: usize,
        want_ny: usize,
    },
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error("failed to build the worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("output sink failed at step {step} (files already written are partial): {source}")]
    Sink {
        step: u64,
        #[source]
        source: std::io::Error,
    },
}

/// Field statistics at one instant. Reductions run in row-major order so the
/// values are reproducible bit-for-bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    /// Simulated time, seconds.
    pub t: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub t_mean: f64,
    /// Total enthalpy per unit depth, J/m.
    pub enthalpy: f64,
}

/// An additive specific-power contribution attached to one agent.
#[derive(Debug, Clone, Copy)]
enum GammaTerm {
    /// Constant volumetric power, W/m³.
    Constant(f64),
    /// Temperature-proportional volumetric power `k * T`, W/m³.
    Linear(f64),
    /// Scheduled flux-source power; the index selects the schedule, which is
    /// evaluated once per step at the pre-step time.
    Flux(usize),
}

/// Per-agent source bindings, resolved once at init.
#[derive(Debug, Clone, Default)]
struct CellSources {
    /// Imposed-temperature schedule, if any. Overrides the computed update.
    dirichlet: Option<usize>,
    /// Additive power terms, in scenario declaration order.
    gamma: Vec<GammaTerm>,
}

/// Everything `step` needs besides the temperature buffers, resolved once.
/// Effective contact conductivities can be precomputed because materials are
/// immutable once the run starts.
struct StepPlan {
    nx: usize,
    ny: usize,
    h: f64,
    dt: f64,
    boundary: BoundaryLaw,
    snapshot_every: u64,
    lam_north: Vec<f64>,
    lam_south: Vec<f64>,
    lam_east: Vec<f64>,
    lam_west: Vec<f64>,
    cells: Vec<CellSources>,
    dirichlet_schedules: Vec<Schedule>,
    flux_schedules: Vec<Schedule>,
    /// Flat probe indices in declaration order.
    probes: Vec<usize>,
}

/// Simulation state: the current lattice, the next-step scratch buffer, and
/// the resolved step plan. Owned by one run at a time; the parallelism is
/// internal to [`SimState::step`].
pub struct SimState {
    lattice: Lattice,
    scratch: Vec<f64>,
    step_index: u64,
    plan: StepPlan,
    pool: Option<rayon::ThreadPool>,
    dirichlet_values: Vec<f64>,
    flux_values: Vec<f64>,
}

impl SimState {
    /// Build single-threaded simulation state from a scenario. Refuses to
    /// construct if the scenario has validation errors (warnings are fine).
    pub fn new(scenario: &Scenario) -> Result<Self, EngineError> {
        Self::with_workers(scenario, 1)
    }

    /// Like [`SimState::new`] with an explicit worker count. Results are
    /// bit-identical for every worker count.
    pub fn with_workers(scenario: &Scenario, workers: usize) -> Result<Self, EngineError> {
        let violations = check(scenario);
        if !violations.is_empty() {
            return Err(EngineError::InvalidScenario(violations));
        }
        let lattice = build_lattice(scenario);
        Self::from_lattice(scenario, lattice, workers)
    }

    /// Build state around a caller-supplied lattice (custom temperature or
    /// material fields) while taking sources, boundary, flux mode, and time
    /// grid from the scenario. The scenario's initial-field section is
    /// ignored; imposed-temperature agents are still clamped to their
    /// schedule at t = 0.
    pub fn from_lattice(
        scenario: &Scenario,
        mut lattice: Lattice,
        workers: usize,
    ) -> Result<Self, EngineError> {
        let violations = check(scenario);
        if !violations.is_empty() {
            return Err(EngineError::InvalidScenario(violations));
        }
        let spec = lattice.spec();
        if spec.nx != scenario.grid.nx || spec.ny != scenario.grid.ny {
            return Err(EngineError::LatticeMismatch {
                got_nx: spec.nx,
                got_ny: spec.ny,
                want_nx: scenario.grid.nx,
                want_ny: scenario.grid.ny,
            });
        }
        if workers == 0 {
            return Err(EngineError::NoWorkers);
        }

        let plan = build_plan(scenario, &lattice);

        // Imposed temperatures hold from the very first observation point.
        for idx in 0..plan.cells.len() {
            if let Some(s) = plan.cells[idx].dirichlet {
                let (i, j) = (idx % plan.nx, idx / plan.nx);
                lattice.set_temperature(i, j, plan.dirichlet_schedules[s].value_at(0.0));
            }
        }

        let pool = if workers == 1 {
            None
        } else {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build()
                    .map_err(|e| EngineError::Pool(e.to_string()))?,
            )
        };

        let scratch = vec![0.0; lattice.temperatures().len()];
        let dirichlet_values = vec![0.0; plan.dirichlet_schedules.len()];
        let flux_values = vec![0.0; plan.flux_schedules.len()];
        Ok(Self {
            lattice,
            scratch,
            step_index: 0,
            plan,
            pool,
            dirichlet_values,
            flux_values,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Setup-phase access to the grid. Mutating temperatures or materials
    /// after stepping has begun is outside the synchronous-update contract;
    /// material edits additionally require rebuilding the state because
    /// contact conductivities are resolved at init.
    pub fn lattice_mut(&mut self) -> &mut Lattice {
        &mut self.lattice
    }

    pub fn step_index(&self) -> u64 {
        self.step_index
    }

    /// Current simulated time `step_index * dt`, seconds.
    pub fn time(&self) -> f64 {
        self.step_index as f64 * self.plan.dt
    }

    /// Probe temperatures in scenario declaration order.
    pub fn probe_values(&self) -> Vec<f64> {
        let temps = self.lattice.temperatures();
        self.plan.probes.iter().map(|&idx| temps[idx]).collect()
    }

    /// Whether every agent temperature is a finite number. Instability above
    /// the stability limit eventually overflows; that is allowed and
    /// surfaced here rather than trapped mid-run.
    pub fn field_is_finite(&self) -> bool {
        self.lattice.temperatures().iter().all(|t| t.is_finite())
    }

    /// One synchronous update: every agent computes its next temperature
    /// from the current buffer, imposed-temperature agents are overwritten
    /// with their schedule value at the new time, then the buffers swap.
    pub fn step(&mut self) {
        let t_now = self.step_index as f64 * self.plan.dt;
        let t_next = (self.step_index + 1) as f64 * self.plan.dt;
        for (slot, sched) in self
            .flux_values
            .iter_mut()
            .zip(&self.plan.flux_schedules)
        {
            *slot = sched.value_at(t_now);
        }
        for (slot, sched) in self
            .dirichlet_values
            .iter_mut()
            .zip(&self.plan.dirichlet_schedules)
        {
            *slot = sched.value_at(t_next);
        }

        let plan = &self.plan;
        let temps = self.lattice.temperatures();
        let mats = self.lattice.materials();
        let dir_vals = &self.dirichlet_values;
        let flux_vals = &self.flux_values;
        let scratch = &mut self.scratch;

        match &self.pool {
            None => {
                for (j, row) in scratch.chunks_mut(plan.nx).enumerate() {
                    update_row(plan, temps, mats, dir_vals, flux_vals, j, row);
                }
            }
            Some(pool) => pool.install(|| {
                scratch
                    .par_chunks_mut(plan.nx)
                    .enumerate()
                    .for_each(|(j, row)| update_row(plan, temps, mats, dir_vals, flux_vals, j, row));
            }),
        }

        std::mem::swap(self.lattice.temperatures_vec_mut(), &mut self.scratch);
        self.step_index += 1;
    }

    /// Apply `n` steps, emitting through the sink: a snapshot of the entry
    /// state when starting from step 0, a snapshot at every multiple of the
    /// scenario's snapshot interval, a snapshot of the final state, and one
    /// probe row per step (plus the entry row).
    pub fn run(&mut self, n: u64, sink: &mut dyn Sink) -> Result<(), RunError> {
        let mut last_snapshot = None;
        if self.step_index == 0 {
            self.emit_probe_row(sink)?;
            self.emit_snapshot(sink)?;
            last_snapshot = Some(0);
        }
        for _ in 0..n {
            self.step();
            self.emit_probe_row(sink)?;
            let s = self.step_index;
            if self.plan.snapshot_every > 0 && s % self.plan.snapshot_every == 0 {
                self.emit_snapshot(sink)?;
                last_snapshot = Some(s);
            }
        }
        if last_snapshot != Some(self.step_index) {
            self.emit_snapshot(sink)?;
        }
        sink.finish().map_err(|e| RunError::Sink {
            step: self.step_index,
            source: e,
        })
    }

    /// Min, max, mean, and enthalpy of the current field, reduced in
    /// row-major order.
    pub fn diagnostics(&self) -> Diagnostics {
        let temps = self.lattice.temperatures();
        let mut t_min = f64::INFINITY;
        let mut t_max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for &t in temps {
            t_min = t_min.min(t);
            t_max = t_max.max(t);
            sum += t;
        }
        Diagnostics {
            t: self.time(),
            t_min,
            t_max,
            t_mean: sum / temps.len() as f64,
            enthalpy: self.lattice.total_enthalpy(),
        }
    }

    fn emit_snapshot(&self, sink: &mut dyn Sink) -> Result<(), RunError> {
        let frame = SnapshotFrame::from_lattice(self.time(), &self.lattice);
        sink.snapshot(self.step_index, &frame)
            .map_err(|e| RunError::Sink {
                step: self.step_index,
                source: e,
            })
    }

    fn emit_probe_row(&self, sink: &mut dyn Sink) -> Result<(), RunError> {
        sink.probe_row(self.time(), &self.probe_values())
            .map_err(|e| RunError::Sink {
                step: self.step_index,
                source: e,
            })
    }
}

/// Uniform fill, then material patches, then initial-temperature overrides,
/// each in declaration order (later entries win on overlap).
fn build_lattice(scenario: &Scenario) -> Lattice {
    let mut lattice = Lattice::new(
        scenario.grid,
        scenario.initial.uniform,
        scenario.material,
    )
    .expect("scenario checked");
    for mr in &scenario.material_regions {
        lattice
            .set_material_region(&mr.region, mr.material)
            .expect("scenario checked");
    }
    for ov in &scenario.initial.overrides {
        for (i, j) in ov.region.cells(&scenario.grid).expect("scenario checked") {
            lattice.set_temperature(i, j, ov.temperature);
        }
    }
    lattice
}

fn build_plan(scenario: &Scenario, lattice: &Lattice) -> StepPlan {
    let spec = *lattice.spec();
    let (nx, ny) = (spec.nx, spec.ny);
    let n = spec.agent_count();
    let mats = lattice.materials();
    let mode = scenario.flux_mode;

    let mut lam_north = vec![0.0; n];
    let mut lam_south = vec![0.0; n];
    let mut lam_east = vec![0.0; n];
    let mut lam_west = vec![0.0; n];
    for j in 0..ny {
        for i in 0..nx {
            let idx = j * nx + i;
            let lam = mats[idx].lambda;
            if j > 0 {
                lam_north[idx] = effective_lambda(lam, mats[idx - nx].lambda, mode);
            }
            if j + 1 < ny {
                lam_south[idx] = effective_lambda(lam, mats[idx + nx].lambda, mode);
            }
            if i + 1 < nx {
                lam_east[idx] = effective_lambda(lam, mats[idx + 1].lambda, mode);
            }
            if i > 0 {
                lam_west[idx] = effective_lambda(lam, mats[idx - 1].lambda, mode);
            }
        }
    }

    let mut cells = vec![CellSources::default(); n];
    let mut dirichlet_schedules = Vec::new();
    let mut flux_schedules = Vec::new();
    for src in &scenario.sources {
        let targets = src.region.cells(&spec).expect("scenario checked");
        match &src.law {
            SourceLaw::Dirichlet { schedule } => {
                let id = dirichlet_schedules.len();
                dirichlet_schedules.push(schedule.clone());
                for (i, j) in targets {
                    let slot = &mut cells[spec.index(i, j)].dirichlet;
                    debug_assert!(slot.is_none(), "overlap rejected by check()");
                    *slot = Some(id);
                }
            }
            SourceLaw::Flux { schedule } => {
                let id = flux_schedules.len();
                flux_schedules.push(schedule.clone());
                for (i, j) in targets {
                    cells[spec.index(i, j)].gamma.push(GammaTerm::Flux(id));
                }
            }
            SourceLaw::VolumetricConstant { gamma } => {
                for (i, j) in targets {
                    cells[spec.index(i, j)]
                        .gamma
                        .push(GammaTerm::Constant(*gamma));
                }
            }
            SourceLaw::VolumetricLinear { k } => {
                for (i, j) in targets {
                    cells[spec.index(i, j)].gamma.push(GammaTerm::Linear(*k));
                }
            }
        }
    }

    let probes = scenario
        .output
        .probes
        .iter()
        .map(|p| spec.index(p.i, p.j))
        .collect();

    StepPlan {
        nx,
        ny,
        h: spec.h,
        dt: scenario.time.dt,
        boundary: scenario.boundary,
        snapshot_every: scenario.output.snapshot_every,
        lam_north,
        lam_south,
        lam_east,
        lam_west,
        cells,
        dirichlet_schedules,
        flux_schedules,
        probes,
    }
}

/// Compute one row of the next buffer from the current one. This is the
/// whole per-step work of one worker band.
fn update_row(
    plan: &StepPlan,
    temps: &[f64],
    mats: &[Material],
    dir_vals: &[f64],
    flux_vals: &[f64],
    j: usize,
    out: &mut [f64],
) {
    let (nx, ny, h, dt) = (plan.nx, plan.ny, plan.h, plan.dt);
    let row0 = j * nx;
    for i in 0..nx {
        let idx = row0 + i;
        let cell = &plan.cells[idx];
        if let Some(s) = cell.dirichlet {
            out[i] = dir_vals[s];
            continue;
        }
        let t = temps[idx];
        let missing = || match plan.boundary {
            BoundaryLaw::Insulated => 0.0,
            BoundaryLaw::Convective { alpha, t_env } => convective_flux(alpha, t_env, t, h),
        };
        let q_north = if j > 0 {
            pair_flux(plan.lam_north[idx], t, temps[idx - nx], h)
        } else {
            missing()
        };
        let q_south = if j + 1 < ny {
            pair_flux(plan.lam_south[idx], t, temps[idx + nx], h)
        } else {
            missing()
        };
        let q_east = if i + 1 < nx {
            pair_flux(plan.lam_east[idx], t, temps[idx + 1], h)
        } else {
            missing()
        };
        let q_west = if i > 0 {
            pair_flux(plan.lam_west[idx], t, temps[idx - 1], h)
        } else {
            missing()
        };
        let q_sum = (q_north + q_south) + (q_east + q_west);

        let mut gamma = 0.0;
        for term in &cell.gamma {
            gamma += match *term {
                GammaTerm::Constant(g) => g,
                GammaTerm::Linear(k) => k * t,
                GammaTerm::Flux(s) => flux_vals[s],
            };
        }
        out[i] = apply_update(t, q_sum, gamma, dt, mats[idx]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{GridSpec, Region};
    use crate::output::MemorySink;
    use crate::physics::FluxMode;
    use crate::scenario::{builtin, InitialOverride, Scenario, SourceSpec, TimeGrid};

    fn bare_scenario(nx: usize, ny: usize, t0: f64) -> Scenario {
        Scenario {
            grid: GridSpec { nx, ny, h: 0.001 },
            material: Material {
                lambda: 1.5,
                c: 1000.0,
                rho: 1500.0,
            },
            material_regions: Vec::new(),
            initial: crate::scenario::InitialField {
                uniform: t0,
                overrides: Vec::new(),
            },
            sources: Vec::new(),
            boundary: BoundaryLaw::Insulated,
            flux_mode: FluxMode::Harmonic,
            time: TimeGrid {
                dt: 0.005,
                steps: 0,
            },
            output: Default::default(),
        }
    }

    #[test]
    fn fig2_initial_state_clamps_the_source_row() {
        let state = SimState::new(&builtin("fig2_linear_source").unwrap()).unwrap();
        for i in 0..41 {
            assert_eq!(state.lattice().temperature(i, 0), 20.0);
        }
        for j in 1..41 {
            for i in 0..41 {
                assert_eq!(state.lattice().temperature(i, j), 0.0);
            }
        }
    }

    #[test]
    fn sourceless_scenario_starts_uniform() {
        let state = SimState::new(&bare_scenario(6, 4, 3.25)).unwrap();
        assert!(state.lattice().temperatures().iter().all(|&t| t == 3.25));
    }

    #[test]
    fn fig4_initial_state_has_the_center_pulse() {
        let state = SimState::new(&builtin("fig4_combustion").unwrap()).unwrap();
        assert_eq!(state.lattice().temperature(20, 20), 50.0);
        assert_eq!(state.lattice().temperature(0, 0), 0.0);
        let d = state.diagnostics();
        assert_eq!(d.t_max, 50.0);
        assert_eq!(d.t_min, 0.0);
    }

    #[test]
    fn uniform_insulated_field_is_a_fixed_point() {
        let mut state = SimState::new(&bare_scenario(8, 8, 7.5)).unwrap();
        let h0 = state.diagnostics().enthalpy;
        for _ in 0..25 {
            state.step();
        }
        assert!(state.lattice().temperatures().iter().all(|&t| t == 7.5));
        assert_eq!(state.diagnostics().enthalpy, h0);
    }

    #[test]
    fn fig2_first_step_heats_the_adjacent_row_by_a_tenth() {
        let mut state = SimState::new(&builtin("fig2_linear_source").unwrap()).unwrap();
        state.step();
        // One pairwise term 1.5 * 20 / 1e-6 = 3e7; dT = 0.005 * 3e7 / 1.5e6.
        for i in 0..41 {
            let t = state.lattice().temperature(i, 1);
            assert!((t - 0.1).abs() < 1e-12, "T({i},1) = {t}");
            assert_eq!(state.lattice().temperature(i, 0), 20.0);
        }
        assert_eq!(state.lattice().temperature(20, 3), 0.0);
    }

    #[test]
    fn three_by_three_matches_two_hand_computed_steps() {
        let mut s = bare_scenario(3, 3, 0.0);
        s.initial.overrides.push(InitialOverride {
            region: Region::Point { i: 1, j: 1 },
            temperature: 9.0,
        });
        let mut state = SimState::new(&s).unwrap();
        state.step();
        state.step();
        // Hand-evaluated with the per-pair coefficient
        // c = lambda * dt / (C * rho * h^2) = 0.005.
        let expect = |i: usize, j: usize| match (i, j) {
            (1, 1) => 8.6445,
            (0, 0) | (2, 0) | (0, 2) | (2, 2) => 0.00045,
            _ => 0.088425,
        };
        for j in 0..3 {
            for i in 0..3 {
                let got = state.lattice().temperature(i, j);
                let want = expect(i, j);
                assert!(
                    (got - want).abs() <= 1e-13 * want.abs(),
                    "T({i},{j}) = {got}, want {want}"
                );
            }
        }
    }

    #[test]
    fn run_composition_is_field_identical() {
        let scenario = builtin("fig3_point_source").unwrap();
        let mut split = SimState::new(&scenario).unwrap();
        split.run(30, &mut crate::output::NullSink).unwrap();
        split.run(40, &mut crate::output::NullSink).unwrap();
        let mut whole = SimState::new(&scenario).unwrap();
        whole.run(70, &mut crate::output::NullSink).unwrap();
        assert_eq!(split.step_index(), whole.step_index());
        let a = split.lattice().temperatures();
        let b = whole.lattice().temperatures();
        for (x, y) in a.iter().zip(b) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn run_zero_steps_emits_one_initial_snapshot() {
        let mut state = SimState::new(&builtin("fig3_point_source").unwrap()).unwrap();
        let mut sink = MemorySink::default();
        state.run(0, &mut sink).unwrap();
        assert_eq!(sink.snapshots.len(), 1);
        assert_eq!(sink.snapshots[0].0, 0);
        assert_eq!(sink.snapshots[0].1.get(20, 20), 50.0);
        assert_eq!(sink.probe_rows.len(), 1);
    }

    #[test]
    fn snapshot_cadence_and_probe_rows() {
        let mut s = bare_scenario(4, 4, 1.0);
        s.output.snapshot_every = 2;
        let mut state = SimState::new(&s).unwrap();
        let mut sink = MemorySink::default();
        state.run(5, &mut sink).unwrap();
        let steps: Vec<u64> = sink.snapshots.iter().map(|(k, _)| *k).collect();
        assert_eq!(steps, vec![0, 2, 4, 5]); // entry, multiples, final
        assert_eq!(sink.probe_rows.len(), 6); // entry plus one per step
    }

    #[test]
    fn diagnostics_examples() {
        let state = SimState::new(&bare_scenario(5, 5, 0.0)).unwrap();
        let d = state.diagnostics();
        assert_eq!((d.t, d.t_min, d.t_max, d.t_mean, d.enthalpy), (0.0, 0.0, 0.0, 0.0, 0.0));

        let state = SimState::new(&builtin("fig3_point_source").unwrap()).unwrap();
        let d = state.diagnostics();
        assert_eq!(d.t_max, 50.0);
        assert_eq!(d.t_min, 0.0);
        let expected_mean = 50.0 / 1681.0;
        assert!((d.t_mean - expected_mean).abs() < 1e-15);
    }

    #[test]
    fn dirichlet_schedule_is_tracked_over_time() {
        let mut s = bare_scenario(3, 1, 0.0);
        s.sources.push(SourceSpec {
            region: Region::Point { i: 0, j: 0 },
            law: SourceLaw::Dirichlet {
                schedule: Schedule(vec![(0.0, 0.0), (1.0, 100.0)]),
            },
        });
        let mut state = SimState::new(&s).unwrap();
        assert_eq!(state.lattice().temperature(0, 0), 0.0);
        for _ in 0..100 {
            state.step();
        }
        // t = 0.5 on a 0..=1 ramp to 100
        assert!((state.lattice().temperature(0, 0) - 50.0).abs() < 1e-12);
    }

    #[test]
    fn flux_source_adds_scheduled_power() {
        let mut s = bare_scenario(1, 1, 0.0);
        s.sources.push(SourceSpec {
            region: Region::All,
            law: SourceLaw::Flux {
                schedule: Schedule::constant(3.0e6),
            },
        });
        let mut state = SimState::new(&s).unwrap();
        state.step();
        // dT = dt * F / (C * rho) = 0.005 * 3e6 / 1.5e6 = 0.01
        let t = state.lattice().temperature(0, 0);
        assert!((t - 0.01).abs() < 1e-15, "{t}");
    }

    #[test]
    fn convective_boundary_relaxes_toward_the_environment() {
        let mut s = bare_scenario(3, 3, 0.0);
        s.boundary = BoundaryLaw::Convective {
            alpha: 10.0,
            t_env: 20.0,
        };
        let mut state = SimState::new(&s).unwrap();
        // The 3x3 plate exchanges through 12 missing-neighbor contacts; its
        // relaxation time toward t_env is about 22_500 steps.
        for _ in 0..60_000 {
            state.step();
        }
        let d = state.diagnostics();
        assert!(d.t_min > 15.0, "field should approach t_env, got {d:?}");
        assert!(d.t_max <= 20.0 + 1e-9);

        // At t_env the environment exchange vanishes.
        let mut s = bare_scenario(3, 3, 20.0);
        s.boundary = BoundaryLaw::Convective {
            alpha: 10.0,
            t_env: 20.0,
        };
        let mut state = SimState::new(&s).unwrap();
        state.step();
        assert!(state.lattice().temperatures().iter().all(|&t| t == 20.0));
    }

    #[test]
    fn from_lattice_rejects_dimension_mismatch() {
        let scenario = bare_scenario(4, 4, 0.0);
        let lattice = Lattice::new(
            GridSpec {
                nx: 5,
                ny: 4,
                h: 0.001,
            },
            0.0,
            scenario.material,
        )
        .unwrap();
        assert!(matches!(
            SimState::from_lattice(&scenario, lattice, 1),
            Err(EngineError::LatticeMismatch { .. })
        ));
    }

    #[test]
    fn invalid_scenario_is_refused() {
        let mut s = bare_scenario(4, 4, 0.0);
        s.time.dt = 0.0;
        match SimState::new(&s) {
            Err(EngineError::InvalidScenario(v)) => {
                assert_eq!(v[0].path, "time.dt");
            }
            other => panic!("expected InvalidScenario, got {:?}", other.err()),
        }
    }

    #[test]
    fn worker_count_does_not_change_a_single_bit() {
        let mut s = bare_scenario(9, 7, 0.0);
        s.initial.overrides.push(InitialOverride {
            region: Region::Rect {
                i0: 2,
                j0: 1,
                i1: 4,
                j1: 5,
            },
            temperature: 35.0,
        });
        s.sources.push(SourceSpec {
            region: Region::Point { i: 8, j: 6 },
            law: SourceLaw::Dirichlet {
                schedule: Schedule::constant(-5.0),
            },
        });
        let mut reference = SimState::with_workers(&s, 1).unwrap();
        for _ in 0..200 {
            reference.step();
        }
        for workers in [2, 3, 8] {
            let mut state = SimState::with_workers(&s, workers).unwrap();
            for _ in 0..200 {
                state.step();
            }
            for (a, b) in state
                .lattice()
                .temperatures()
                .iter()
                .zip(reference.lattice().temperatures())
            {
                assert_eq!(a.to_bits(), b.to_bits(), "workers={workers}");
            }
        }
    }
}
