pub mod error;
pub mod geometry;
pub mod linalg;
pub mod lp;
pub mod mappings;
pub mod problems;
pub mod scalar;
pub mod stationarity;
pub mod system;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Rational = num::BigRational;
pub type Polyhedron = geometry::ConvexPolyhedron<Rational>;
pub type Union = geometry::PolyUnion<Rational>;
pub type Mapping = mappings::PolyMapping<Rational>;
pub type Program = stationarity::ImplicitProgram<Rational>;
