//! Pure numerical kernels for the agent update rule.
//!
//! Everything here is a function of its arguments only, so all kernels are
//! safe to call from any number of workers concurrently.
//!
//! Sign convention: a pairwise flux is positive when it heats the receiving
//! agent, i.e. the numerator is `t_nbr - t_self`. With that choice the state
//! update is a plain sum of the four neighbor fluxes plus any volumetric
//! term, with no per-direction sign bookkeeping.
//!
//! Units: pairwise and volumetric terms are specific powers in W/m³
//! (conductivity times a temperature difference divided by `h²`), which keeps
//! the update `T += dt * q / (C * rho)` dimensionally consistent.

use crate::lattice::{Lattice, Material};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhysicsError {
    #[error("thermal conductivity must be non-negative (got {0})")]
    NegativeConductivity(f64),
    #[error("schedule table must be non-empty with strictly increasing times and finite values")]
    MalformedSchedule,
    #[error("{0:?} is not a volumetric source law")]
    NotVolumetric(SourceLaw),
}

/// How to pick the conductivity governing a contact between two agents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxMode {
    /// Use the receiving agent's own conductivity. This is the literal
    /// per-agent rule, but across a material interface the two directions of
    /// a contact see different conductivities, so flux is not antisymmetric
    /// and energy is created or destroyed at the interface.
    Receiver,
    /// Use the harmonic mean `2*a*b/(a+b)` of the two conductivities. The
    /// value is symmetric in its arguments, which restores antisymmetry and
    /// conservation in heterogeneous media; for equal materials it reduces
    /// to the plain conductivity.
    #[default]
    Harmonic,
}

/// Contact conductivity used by both directions of a pair, without input
/// validation. Equal arguments short-circuit so `harmonic(a, a) == a`
/// bit-exactly (this also covers the `a == b == 0` case).
#[inline]
pub(crate) fn effective_lambda(lambda_self: f64, lambda_nbr: f64, mode: FluxMode) -> f64 {
    match mode {
        FluxMode::Receiver => lambda_self,
        FluxMode::Harmonic => {
            if lambda_self == lambda_nbr {
                lambda_self
            } else {
                2.0 * lambda_self * lambda_nbr / (lambda_self + lambda_nbr)
            }
        }
    }
}

/// Conductivity governing the contact between an agent and one neighbor,
/// W/(m·K). Errors on negative input; both conductivities must be `>= 0`.
pub fn interface_conductivity(
    lambda_self: f64,
    lambda_nbr: f64,
    mode: FluxMode,
) -> Result<f64, PhysicsError> {
    for lam in [lambda_self, lambda_nbr] {
        if !(lam >= 0.0) {
            return Err(PhysicsError::NegativeConductivity(lam));
        }
    }
    Ok(effective_lambda(lambda_self, lambda_nbr, mode))
}

/// Specific power received by an agent from one neighbor, W/m³:
/// `lambda_eff * (t_nbr - t_self) / h²`. Positive heats the receiver.
#[inline]
pub fn pair_flux(lambda_eff: f64, t_self: f64, t_nbr: f64, h: f64) -> f64 {
    debug_assert!(h > 0.0);
    lambda_eff * (t_nbr - t_self) / (h * h)
}

/// Specific power received by a boundary agent from the environment, W/m³:
/// Newton cooling `alpha * (t_env - t_self)`, divided by `h` to convert the
/// areal flux to the volumetric units of the pairwise term.
#[inline]
pub fn convective_flux(alpha: f64, t_env: f64, t_self: f64, h: f64) -> f64 {
    debug_assert!(alpha >= 0.0 && h > 0.0);
    alpha * (t_env - t_self) / h
}

/// What happens on a grid side where a neighbor is missing.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryLaw {
    /// Missing neighbors contribute no flux; the sum simply has fewer terms.
    #[default]
    Insulated,
    /// Each missing neighbor contributes one convective exchange with the
    /// environment at `t_env`, with heat transfer coefficient `alpha`
    /// in W/(m²·K).
    Convective { alpha: f64, t_env: f64 },
}

/// Sum of the four neighbor fluxes for agent `(i, j)`, with missing
/// neighbors handled by `boundary`, W/m³.
///
/// The summation grouping is fixed as `(north + south) + (east + west)`:
/// reflections of the grid permute terms only inside a commutative pair, so
/// mirror-symmetric fields stay bit-exactly symmetric under stepping.
pub fn neighbor_flux_sum(
    lattice: &Lattice,
    i: usize,
    j: usize,
    mode: FluxMode,
    boundary: BoundaryLaw,
) -> f64 {
    let spec = lattice.spec();
    assert!(
        spec.contains(i, j),
        "agent index ({i}, {j}) outside {}x{} grid",
        spec.nx,
        spec.ny
    );
    let temps = lattice.temperatures();
    let mats = lattice.materials();
    let (nx, ny, h) = (spec.nx, spec.ny, spec.h);
    let idx = spec.index(i, j);
    let t = temps[idx];
    let lam = mats[idx].lambda;

    let missing = || match boundary {
        BoundaryLaw::Insulated => 0.0,
        BoundaryLaw::Convective { alpha, t_env } => convective_flux(alpha, t_env, t, h),
    };
    let exchange = |nbr: usize| {
        let lam_eff = effective_lambda(lam, mats[nbr].lambda, mode);
        pair_flux(lam_eff, t, temps[nbr], h)
    };

    let q_north = if j > 0 { exchange(idx - nx) } else { missing() };
    let q_south = if j + 1 < ny { exchange(idx + nx) } else { missing() };
    let q_east = if i + 1 < nx { exchange(idx + 1) } else { missing() };
    let q_west = if i > 0 { exchange(idx - 1) } else { missing() };
    (q_north + q_south) + (q_east + q_west)
}

/// A piecewise-linear table of `(time_seconds, value)` knots. Values are
/// clamped to the first knot before the table starts and to the last knot
/// after it ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Schedule(pub Vec<(f64, f64)>);

impl Schedule {
    /// A single-knot table: the same value at every time.
    pub fn constant(value: f64) -> Self {
        Self(vec![(0.0, value)])
    }

    /// Table invariants: non-empty, strictly increasing finite times,
    /// finite values.
    pub fn check(&self) -> Result<(), PhysicsError> {
        if self.0.is_empty() {
            return Err(PhysicsError::MalformedSchedule);
        }
        for (t, v) in &self.0 {
            if !t.is_finite() || !v.is_finite() {
                return Err(PhysicsError::MalformedSchedule);
            }
        }
        for w in self.0.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(PhysicsError::MalformedSchedule);
            }
        }
        Ok(())
    }

    /// Linear interpolation between the bracketing knots, clamped at both
    /// ends of the table.
    pub fn value_at(&self, t: f64) -> f64 {
        let knots = &self.0;
        debug_assert!(!knots.is_empty(), "schedule tables are validated non-empty");
        let (t_first, v_first) = knots[0];
        if t <= t_first {
            return v_first;
        }
        let (t_last, v_last) = knots[knots.len() - 1];
        if t >= t_last {
            return v_last;
        }
        // First knot strictly past t; the bracket is [hi - 1, hi].
        let hi = knots.partition_point(|&(kt, _)| kt <= t);
        let (t0, v0) = knots[hi - 1];
        let (t1, v1) = knots[hi];
        v0 + (v1 - v0) * ((t - t0) / (t1 - t0))
    }
}

/// The behavior law of a source agent or region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceLaw {
    /// The agent's temperature is imposed by a schedule; it still exchanges
    /// flux with its neighbors through the ordinary pairwise rule.
    Dirichlet { schedule: Schedule },
    /// The agent receives a scheduled specific power, W/m³, added in the same
    /// position as a volumetric term.
    Flux { schedule: Schedule },
    /// Distributed heat generation at a constant specific power, W/m³.
    VolumetricConstant { gamma: f64 },
    /// Distributed heat generation proportional to the agent's own current
    /// temperature, `gamma(T) = k * T`, with `k` in W/(m³·K). This is the
    /// quasilinear self-heating law that models combustion-like behavior.
    VolumetricLinear { k: f64 },
}

impl SourceLaw {
    pub fn is_dirichlet(&self) -> bool {
        matches!(self, SourceLaw::Dirichlet { .. })
    }

    pub fn is_volumetric(&self) -> bool {
        matches!(
            self,
            SourceLaw::VolumetricConstant { .. } | SourceLaw::VolumetricLinear { .. }
        )
    }
}

/// Specific power of a volumetric law at the given agent temperature and
/// time, W/m³. Errors when called with a non-volumetric law.
pub fn volumetric_power(law: &SourceLaw, t_current: f64, _t_k: f64) -> Result<f64, PhysicsError> {
    match law {
        SourceLaw::VolumetricConstant { gamma } => Ok(*gamma),
        SourceLaw::VolumetricLinear { k } => Ok(k * t_current),
        other => Err(PhysicsError::NotVolumetric(other.clone())),
    }
}

/// One explicit update of a single agent:
/// `t_old + dt * (q_sum + gamma) / (C * rho)`.
///
/// The volumetric term is added to the flux sum before scaling; the
/// evaluation order is fixed so results are reproducible bit-for-bit.
#[inline]
pub fn apply_update(t_old: f64, q_sum: f64, gamma: f64, dt: f64, mat: Material) -> f64 {
    debug_assert!(dt > 0.0);
    t_old + dt * (q_sum + gamma) / (mat.c * mat.rho)
}

/// Largest stable time step of the explicit scheme for one material,
/// `C * rho * h² / (4 * lambda)`, seconds. Above it a grid-scale
/// (checkerboard) perturbation is amplified each step. Unbounded when
/// `lambda == 0` (no conduction).
pub fn stability_limit(mat: Material, h: f64) -> f64 {
    debug_assert!(h > 0.0);
    if mat.lambda == 0.0 {
        f64::INFINITY
    } else {
        mat.c * mat.rho * h * h / (4.0 * mat.lambda)
    }
}
