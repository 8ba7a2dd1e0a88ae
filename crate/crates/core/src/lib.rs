pub mod algebra;
pub mod topology;
pub mod balls;
pub mod solver;

pub use algebra::{FiniteGroup, Quaternion};
pub use balls::{Ball, BallFamily, BallsError, GrowthTrace};
pub use solver::{DomainSpec, Loop, Mode, Problem, SolverConfig, SolverError, TargetModel};
pub use topology::{ClassId, ManifoldDescriptor, ManifoldKind, SingularEnergySolver, TopologyError};
