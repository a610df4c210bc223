//! Random tetrahedra and triangles: geometric predicates, Monte Carlo
//! estimation, closed-form probabilities and density functions.

pub mod analytic;
pub mod densities;
pub mod events;
pub mod geometry;
pub mod quadrature;
pub mod report;
pub mod sampling;
pub mod special;
pub mod validation;
