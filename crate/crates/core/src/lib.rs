//! Exact computations around stabilized symplectic 4-manifolds: cohomology
//! rings and their Künneth products, first Chern class obstructions,
//! Gromov-Witten invariants of spheres from the Kontsevich-Manin axioms,
//! unimodular lattice orbits, and faces of link-norm unit balls.
//!
//! The numeric core (Gromov-Witten values, lattice diagonalization, polytope
//! geometry) is generic over [`scalar::Field`]. The aliases below fix the
//! exact instantiation the rest of the crate and the CLI use.

pub mod chern;
pub mod equiv;
pub mod gw;
pub mod lattice;
pub mod linalg;
pub mod pipeline;
pub mod polytope;
pub mod ring;
pub mod scalar;

pub use num_rational::BigRational;

/// Exact rationals, the scalar every reported value is computed in.
pub type Rational = BigRational;
