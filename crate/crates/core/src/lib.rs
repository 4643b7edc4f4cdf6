//! Inscribed trefoil hexagons in analytic knots: concurrent-chord
//! configurations on S³, their signed count, and certification that a
//! nearby hexagon is a genuine trefoil.

pub mod curve;
pub mod gauss;
pub mod hexknot;
pub mod projgeom;
pub mod quasi;
pub mod series;
pub mod solve;
