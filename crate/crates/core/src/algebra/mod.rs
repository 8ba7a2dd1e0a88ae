//! Exact quaternion arithmetic, finite subgroups of the unit quaternions and
//! their conjugacy classes.

mod field;
mod group;
mod helium;
mod quaternion;

pub use field::{FieldScalar, Rational};
pub use group::{geodesic_length, rational_multiple, ConjugacyClass, FiniteGroup, DEFAULT_CAP};
pub use helium::component_distance_helium3;
pub use quaternion::{Quat, Quaternion};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("group closure exceeded {cap} elements")]
    ClosureExceedsCap { cap: usize },
    #[error("generator {index} is not a unit quaternion")]
    NotUnit { index: usize },
    #[error("at least one generator is required")]
    NoGenerators,
}
