//! Free homotopy classes of closed curves in the supported target manifolds,
//! topological resolutions and singular energies.

mod catalog;
mod energy;
mod table;

pub use catalog::{ClassEntry, ClassId, ManifoldDescriptor, ManifoldKind};
pub use energy::{
    is_atomic, is_topological_resolution, singular_energy, singular_energy_of_boundary, SingularEnergy,
    SingularEnergySolver, ENERGY_TOL,
};
pub use table::{table_report, table_rows, TableFormat, TableRow, CSV_HEADER};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TopologyError {
    #[error("class {class} does not belong to {manifold}")]
    UnknownClass { manifold: String, class: String },
    #[error("norm bound {bound} is below twice the class norm {norm}")]
    NormBoundTooSmall { bound: f64, norm: f64 },
    #[error("no homotopy class is compatible with the boundary data")]
    Incompatible,
    #[error("unknown manifold `{0}`")]
    UnknownManifold(String),
    #[error("cannot parse class `{0}`")]
    ParseClass(String),
}
