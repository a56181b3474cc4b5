//! Exact Picard-Fuchs equations, mirror maps and instanton numbers for the
//! one-parameter families `sum_j x_j^{d_j} - k psi prod_j x_j` in weighted
//! projective four-space.

pub mod error;
pub mod exact;
pub mod griffiths;
pub mod groebner;
pub mod mirror;
pub mod multipoly;
pub mod series;

pub use error::{Error, Result};
