//! Discrete Dirichlet minimisation of manifold-valued maps on punctured planar
//! domains, renormalised energies, stress-energy fluxes and synharmony.

mod domain;
mod energy;
mod field;
mod flux;
mod loops;
mod mesh;
mod relax;
mod synharmony;
mod target;

pub use domain::{auto_ring_points, Boundary, DomainSpec, Singularity};
pub use energy::{
    default_schedule, geometric_energy_at, renormalised_energy, topological_energy_at, EnergyReport,
    Mode, Problem, Solution,
};
pub use field::FieldState;
pub use flux::stress_flux;
pub use loops::Loop;
pub use mesh::{Mesh, NodeKind, Patch};
pub use relax::{relax, RelaxOutcome};
pub use synharmony::{synharmony_estimate, SynharmonyReport, DEFAULT_LENGTHS};
pub use target::{DeckGroup, TargetModel};

use crate::topology::TopologyError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("excised circles need at least 16 vertices, got {ring_points}")]
    ResolutionTooCoarse { ring_points: usize },
    #[error("excision radius {rho} is not below the admissible radius {rho_bar}")]
    RadiusTooLarge { rho: f64, rho_bar: f64 },
    #[error("singular charges are not a topological resolution of the boundary data: {0}")]
    IncompatibleTopology(String),
    #[error("relaxation did not converge after {sweeps} sweeps (relative decrease {decrease:e})")]
    NonConvergence { sweeps: usize, decrease: f64 },
    #[error("singularities must carry a nontrivial charge")]
    TrivialCharge,
    #[error("invalid charge: {0}")]
    InvalidCharge(String),
    #[error("{0}")]
    TargetMismatch(String),
    #[error("no numerical model for target `{0}`")]
    UnsupportedTarget(String),
    #[error("flux circle leaves the meshed region")]
    CircleOutOfDomain,
    #[error("loops are not homotopic")]
    NonHomotopicLoops,
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// Parameters of the relaxation.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub max_sweeps: usize,
    /// Stop once the relative energy decrease of a sweep falls below this value.
    pub tol: f64,
    /// Over-relaxation factor in `[1, 2)`.
    pub omega: f64,
    /// Number of initialisations tried; the first is deterministic, the others perturbed.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { max_sweeps: 20_000, tol: 1e-10, omega: 1.9, restarts: 3, seed: 0 }
    }
}
