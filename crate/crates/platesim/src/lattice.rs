//! The agent grid: geometry, per-agent temperature state, per-agent material
//! properties, neighbor topology, and agent classification.
//!
//! Agents sit on a regular 2D lattice with constant spacing `h`. Position
//! `(i, j)` is column `i` along x and row `j` along y, origin at a corner,
//! stored row-major (`index = j * nx + i`). Each agent carries its own
//! temperature and its own material triple, which is what makes heterogeneous
//! media a per-agent property rather than a global switch.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from grid construction, indexing, and region expansion.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("grid spec: {field} must be {expected} (got {got})")]
    BadGridSpec {
        field: &'static str,
        expected: &'static str,
        got: String,
    },
    #[error("material: {field} must be {expected} (got {got})")]
    BadMaterial {
        field: &'static str,
        expected: &'static str,
        got: String,
    },
    #[error("initial temperature must be finite (got {0})")]
    NonFiniteTemperature(f64),
    #[error("agent index ({i}, {j}) is outside the {nx}x{ny} grid")]
    IndexOutOfBounds {
        i: usize,
        j: usize,
        nx: usize,
        ny: usize,
    },
    #[error("region {region:?} extends outside the {nx}x{ny} grid")]
    RegionOutOfBounds {
        region: Region,
        nx: usize,
        ny: usize,
    },
    #[error("region {region:?} is malformed: {reason}")]
    InvalidRegion {
        region: Region,
        reason: &'static str,
    },
}

/// Grid geometry: agent counts along x and y plus the coordinate step in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Agent count along x (columns).
    pub nx: usize,
    /// Agent count along y (rows).
    pub ny: usize,
    /// Coordinate step between neighboring agents, meters.
    pub h: f64,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, h: f64) -> Result<Self, LatticeError> {
        let spec = Self { nx, ny, h };
        spec.check()?;
        Ok(spec)
    }

    /// Validate the grid invariants: `nx >= 1`, `ny >= 1`, `h > 0`.
    pub fn check(&self) -> Result<(), LatticeError> {
        if self.nx < 1 {
            return Err(LatticeError::BadGridSpec {
                field: "nx",
                expected: "at least 1",
                got: self.nx.to_string(),
            });
        }
        if self.ny < 1 {
            return Err(LatticeError::BadGridSpec {
                field: "ny",
                expected: "at least 1",
                got: self.ny.to_string(),
            });
        }
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(LatticeError::BadGridSpec {
                field: "h",
                expected: "finite and positive",
                got: self.h.to_string(),
            });
        }
        Ok(())
    }

    /// Total agent count `nx * ny`.
    pub fn agent_count(&self) -> usize {
        self.nx * self.ny
    }

    /// Flat row-major index of agent `(i, j)`.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(self.contains(i, j));
        j * self.nx + i
    }

    #[inline]
    pub fn contains(&self, i: usize, j: usize) -> bool {
        i < self.nx && j < self.ny
    }

    /// Classify an agent by how many neighbors it has: interior (4),
    /// edge (3), or corner (2). The kind is fully determined by the index
    /// and the grid dimensions.
    pub fn classify(&self, i: usize, j: usize) -> Result<AgentKind, LatticeError> {
        if !self.contains(i, j) {
            return Err(LatticeError::IndexOutOfBounds {
                i,
                j,
                nx: self.nx,
                ny: self.ny,
            });
        }
        let x_extreme = i == 0 || i == self.nx - 1;
        let y_extreme = j == 0 || j == self.ny - 1;
        Ok(match (x_extreme, y_extreme) {
            (true, true) => AgentKind::Corner,
            (false, false) => AgentKind::Interior,
            _ => AgentKind::Edge,
        })
    }
}

/// Agent position relative to the grid border.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgentKind {
    /// Four neighbors.
    Interior,
    /// Three neighbors.
    Edge,
    /// Two neighbors.
    Corner,
}

/// Physical properties of one agent's material.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    /// Thermal conductivity, W/(m·K).
    pub lambda: f64,
    /// Specific heat, J/(kg·K).
    pub c: f64,
    /// Density, kg/m³.
    pub rho: f64,
}

impl Material {
    pub fn new(lambda: f64, c: f64, rho: f64) -> Result<Self, LatticeError> {
        let mat = Self { lambda, c, rho };
        mat.check()?;
        Ok(mat)
    }

    /// Validate the material invariants: `lambda >= 0`, `c > 0`, `rho > 0`
    /// (heat capacity and density appear in a denominator of the update).
    pub fn check(&self) -> Result<(), LatticeError> {
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(LatticeError::BadMaterial {
                field: "lambda",
                expected: "finite and non-negative",
                got: self.lambda.to_string(),
            });
        }
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(LatticeError::BadMaterial {
                field: "c",
                expected: "finite and positive",
                got: self.c.to_string(),
            });
        }
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return Err(LatticeError::BadMaterial {
                field: "rho",
                expected: "finite and positive",
                got: self.rho.to_string(),
            });
        }
        Ok(())
    }
}

/// A set of agent positions, used for material patches, initial-temperature
/// overrides, source placement, and probes. `Rect` bounds are inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Point { i: usize, j: usize },
    Rect { i0: usize, j0: usize, i1: usize, j1: usize },
    Row { j: usize },
    Column { i: usize },
    All,
}

impl Region {
    /// Expand the region to the row-major ordered, duplicate-free list of
    /// agent indices it covers on the given grid.
    pub fn cells(&self, spec: &GridSpec) -> Result<Vec<(usize, usize)>, LatticeError> {
        self.check(spec)?;
        let (nx, ny) = (spec.nx, spec.ny);
        let cells = match *self {
            Region::Point { i, j } => vec![(i, j)],
            Region::Rect { i0, j0, i1, j1 } => {
                let mut out = Vec::with_capacity((i1 - i0 + 1) * (j1 - j0 + 1));
                for j in j0..=j1 {
                    for i in i0..=i1 {
                        out.push((i, j));
                    }
                }
                out
            }
            Region::Row { j } => (0..nx).map(|i| (i, j)).collect(),
            Region::Column { i } => (0..ny).map(|j| (i, j)).collect(),
            Region::All => {
                let mut out = Vec::with_capacity(nx * ny);
                for j in 0..ny {
                    for i in 0..nx {
                        out.push((i, j));
                    }
                }
                out
            }
        };
        Ok(cells)
    }

    /// Check that the region is well-formed and lies within the grid.
    pub fn check(&self, spec: &GridSpec) -> Result<(), LatticeError> {
        let oob = || LatticeError::RegionOutOfBounds {
            region: *self,
            nx: spec.nx,
            ny: spec.ny,
        };
        match *self {
            Region::Point { i, j } => {
                if !spec.contains(i, j) {
                    return Err(oob());
                }
            }
            Region::Rect { i0, j0, i1, j1 } => {
                if i0 > i1 || j0 > j1 {
                    return Err(LatticeError::InvalidRegion {
                        region: *self,
                        reason: "rect extents must satisfy i0 <= i1 and j0 <= j1",
                    });
                }
                if !spec.contains(i1, j1) {
                    return Err(oob());
                }
            }
            Region::Row { j } => {
                if j >= spec.ny {
                    return Err(oob());
                }
            }
            Region::Column { i } => {
                if i >= spec.nx {
                    return Err(oob());
                }
            }
            Region::All => {}
        }
        Ok(())
    }

    /// Whether the region covers position `(i, j)`. Purely geometric; does
    /// not consider grid bounds.
    pub fn contains(&self, i: usize, j: usize) -> bool {
        match *self {
            Region::Point { i: pi, j: pj } => i == pi && j == pj,
            Region::Rect { i0, j0, i1, j1 } => i >= i0 && i <= i1 && j >= j0 && j <= j1,
            Region::Row { j: rj } => j == rj,
            Region::Column { i: ci } => i == ci,
            Region::All => true,
        }
    }
}

/// The full agent grid: geometry plus per-agent temperature and material.
///
/// A `Lattice` is mutated only during scenario setup; inside a simulation
/// step it is read-only and safe to share across parallel workers.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    spec: GridSpec,
    temperature: Vec<f64>,
    material: Vec<Material>,
}

impl Lattice {
    /// Build a lattice with every agent at `initial_temperature` carrying
    /// `default_material`.
    pub fn new(
        spec: GridSpec,
        initial_temperature: f64,
        default_material: Material,
    ) -> Result<Self, LatticeError> {
        spec.check()?;
        default_material.check()?;
        if !initial_temperature.is_finite() {
            return Err(LatticeError::NonFiniteTemperature(initial_temperature));
        }
        let n = spec.agent_count();
        Ok(Self {
            spec,
            temperature: vec![initial_temperature; n],
            material: vec![default_material; n],
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    #[inline]
    pub fn temperature(&self, i: usize, j: usize) -> f64 {
        self.temperature[self.spec.index(i, j)]
    }

    pub fn set_temperature(&mut self, i: usize, j: usize, t: f64) {
        let idx = self.spec.index(i, j);
        self.temperature[idx] = t;
    }

    #[inline]
    pub fn material(&self, i: usize, j: usize) -> Material {
        self.material[self.spec.index(i, j)]
    }

    /// Row-major temperature field.
    pub fn temperatures(&self) -> &[f64] {
        &self.temperature
    }

    /// Row-major material field.
    pub fn materials(&self) -> &[Material] {
        &self.material
    }

    pub(crate) fn temperatures_vec_mut(&mut self) -> &mut Vec<f64> {
        &mut self.temperature
    }

    /// Assign `material` to every agent inside `region`; all other agents
    /// keep their previous material.
    pub fn set_material_region(
        &mut self,
        region: &Region,
        material: Material,
    ) -> Result<(), LatticeError> {
        material.check()?;
        for (i, j) in region.cells(&self.spec)? {
            let idx = self.spec.index(i, j);
            self.material[idx] = material;
        }
        Ok(())
    }

    /// Total enthalpy per unit depth, J/m: the row-major sum of
    /// `C * rho * T * h^2` over all agents. Flux antisymmetry makes this
    /// quantity conserved for insulated, sourceless runs, which is what the
    /// conservation tests check.
    pub fn total_enthalpy(&self) -> f64 {
        let h2 = self.spec.h * self.spec.h;
        let mut acc = 0.0;
        for (t, mat) in self.temperature.iter().zip(&self.material) {
            acc += mat.c * mat.rho * t * h2;
        }
        acc
    }
}
