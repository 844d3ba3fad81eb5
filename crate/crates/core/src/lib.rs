//! Numerical verification toolkit for conditional bounds on the Mertens
//! function: sieved arithmetic functions, zeta evaluation and zero tables,
//! Beurling–Selberg majorants, the Guinand–Weil explicit formula, the
//! V-typical ordinate classifier, lower bounds for log|ζ|, and Perron
//! integration along dyadic contours.

pub mod arith;
pub mod bounds;
pub mod contour;
pub mod error;
pub mod explicit;
pub mod quadrature;
pub mod selberg;
pub mod special;
pub mod typicality;
pub mod zeros;
pub mod zeta;

pub use error::{Error, Result};
