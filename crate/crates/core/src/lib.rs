//! Moments of a free unitary Brownian motion compressed by a free
//! projection, computed by closed forms, ODE hierarchies, non-crossing
//! partition sums and random-matrix simulation.

pub mod mcsim;
pub mod moments;
pub mod noncrossing;
pub mod series;
pub mod specfun;
