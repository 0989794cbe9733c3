//! Does introducing a delay stabilize a three-variable linear system?
//!
//! The pipeline: the characteristic quasi-polynomial W(lambda) = P(lambda) +
//! Q(lambda) e^(-lambda tau) ([`charpoly`]), the amplitude cubic F(x) whose
//! positive roots give the frequencies of purely imaginary characteristic
//! roots plus the critical-delay series and stability windows ([`switches`]),
//! Mikhailov-hodograph verification of the root count at any fixed delay
//! ([`mikhailov`]), sufficient-condition checks with Sturm-chain root
//! isolation ([`criteria`]) and direct method-of-steps simulation as a
//! time-domain cross-check ([`ddesim`]). The [`cli`] module ties it together
//! for scripting.

pub mod charpoly;
pub mod cli;
pub mod criteria;
pub mod ddesim;
pub mod error;
pub mod fixtures;
pub mod mikhailov;
pub mod switches;

mod poly;

pub use charpoly::{ComplexValue, QuasiPolynomial};
pub use error::{Error, Result};
