//! Exact-arithmetic toolkit for nodal quartic surface sections of a smooth
//! quadric threefold Q in P^4 over a prime field: determinantal construction
//! of the six minimal even-node families, even-set/defect computation, and
//! certification of the Artin-Mumford obstruction to rationality.

pub mod barth;
pub mod certify;
pub mod cohomology;
pub mod gfp;
pub mod groebner;
pub mod nodal;
pub mod polyring;
pub mod quadric;
