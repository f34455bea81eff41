//! Labelled tensor-product spaces and the operators, subspaces and maps on
//! them.

mod map;
mod operator;
mod space;
mod subspace;

pub use map::{BlockMonomial, MapMatrix, SpaceMap};
pub use operator::{embed, partial_trace, LabeledOperator, OperatorDocument};
pub use space::{Factor, ProductSpace};
pub use subspace::{commutant, coordinates, subspace_equal, OperatorSubspace, SUBSPACE_TOL};
