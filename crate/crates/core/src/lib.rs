//! Hyperbolicity geometry of finite digraphs viewed as semimetric spaces.
//!
//! Directed distances take values in `[0, ∞]` and are not symmetric, which
//! changes the whole machinery of coarse geometry: thin and slim geodesic
//! triangles, ball-boundedness profiles, divergence of geodesics, geodesic
//! stability, quasi-isometry checks, ray/anti-ray boundaries, ends via
//! disjoint paths, and a visual pseudo-semimetric on the space plus its
//! boundary. Everything here is exact: distances are extended naturals and
//! the boundary pseudo-semimetric runs over either `f64` or `BigRational`.
//!
//! Infinite objects enter through `families`: generators of growing finite
//! truncations with symbolically designated rays, so claims about them are
//! checked at explicit finite scales.

pub mod boundary;
pub mod corpus;
pub mod digraph;
pub mod divergence;
pub mod extnat;
pub mod families;
pub mod geodesic;
pub mod hyperbolicity;
pub mod rewrite;
pub mod rho;
pub mod scalar;
pub mod stability;
pub mod verification;
pub mod walk;

pub use digraph::{Digraph, Direction, DistanceMatrix, DistanceMode};
pub use extnat::{ExtNat, Fin, Inf};
pub use scalar::{Decay, Scalar};
pub use walk::DirectedWalk;

/// Exact rational used for quasi-geodesic parameters (γ, c) and tolerances.
pub type Rational = num_rational::Ratio<i64>;

/// Exact scalar for the ρ / chain-distance layer.
pub type Exact = num_rational::BigRational;

/// Concrete ρ-matrix instantiations.
pub type RhoMatrixExact = rho::RhoMatrix<Exact>;
pub type RhoMatrixF64 = rho::RhoMatrix<f64>;

/// Concrete constant tables.
pub type ConstantTableExact = hyperbolicity::ConstantTable<Exact>;
pub type ConstantTableF64 = hyperbolicity::ConstantTable<f64>;

pub(crate) fn serialize_biguint<S: serde::Serializer>(
    v: &num_bigint::BigUint,
    s: S,
) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}
