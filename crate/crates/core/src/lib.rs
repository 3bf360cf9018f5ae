pub mod lattice;
pub mod polyhedral;
pub mod semigroup;
pub mod nash;
pub mod families;
pub mod iterate;

pub use lattice::{LatticeError, Scalar};
pub use semigroup::{isomorphic, AffineSemigroup, IsoCertificate, SemigroupError, UnitQuotient};

/// Working integer type: arbitrary precision throughout.
pub type Int = num_bigint::BigInt;
pub type Rational = num_rational::Ratio<Int>;
pub type LatticeVector = Vec<Int>;
pub type IntegerMatrix = lattice::Matrix<Int>;
