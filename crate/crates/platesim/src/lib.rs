//! Agent-based simulation of 2D heat conduction.
//!
//! A plate is discretized into a lattice of agents placed with a constant
//! step. Each agent holds its own temperature and material triple
//! (conductivity, specific heat, density) and updates synchronously: at every
//! discrete time it receives a pairwise flux from each of its four orthogonal
//! neighbors, adds any volumetric or scheduled source power, and integrates
//! explicitly. Per-agent materials make heterogeneous media a local property,
//! and source agents (imposed temperature, imposed flux, and
//! temperature-proportional self-heating) cover heating experiments from a
//! boundary row down to combustion-like quasilinear behavior.
//!
//! Modules:
//! - [`lattice`]: grid geometry, per-agent state, regions, classification.
//! - [`physics`]: the pure update kernels, source laws, boundary laws, and
//!   the explicit-scheme stability limit.
//! - [`scenario`]: the experiment description model, JSON parsing and
//!   validation, and built-in reference experiments.
//! - [`engine`]: the synchronous, deterministically data-parallel time loop.
//! - [`output`]: CSV and PGM serialization and output sinks.
//! - [`cli`]: the `platesim` command-line frontend.

pub mod cli;
pub mod engine;
pub mod lattice;
pub mod output;
pub mod physics;
pub mod scenario;

pub use engine::{Diagnostics, EngineError, RunError, SimState};
pub use lattice::{AgentKind, GridSpec, Lattice, LatticeError, Material, Region};
pub use output::{
    parse_snapshot_csv, pgm, snapshot_csv, DirectorySink, MemorySink, NullSink, OutputError, Sink,
    SnapshotFrame,
};
pub use physics::{
    apply_update, convective_flux, interface_conductivity, neighbor_flux_sum, pair_flux,
    stability_limit, volumetric_power, BoundaryLaw, FluxMode, PhysicsError, Schedule, SourceLaw,
};
pub use scenario::{
    builtin, check, parse_scenario, to_json, validate, InitialField, InitialOverride,
    MaterialRegion, OutputPlan, PgmRange, Probe, Scenario, ScenarioError, SourceSpec, TimeGrid,
    Violation, Warning, BUILTINS, BUILTIN_NAMES,
};
