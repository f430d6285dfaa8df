//! Quadrature substrate: Gauss–Legendre rules, spherical-cap product rules
//! rotated to arbitrary centers, and Bessel functions of integer and
//! half-integer order.

mod bessel;
mod cap;
mod gauss;

pub use bessel::{bessel_j, bessel_j_asymptotic, bessel_j_series, MAX_TWICE_ORDER, SERIES_SWITCH};
pub use cap::{cap_rule, cap_rule_with, rotation_to, QuadratureRule};
pub use gauss::{gauss_legendre, Rule1d};
