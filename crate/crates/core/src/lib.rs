//! Bernoulli convolutions `nu_t`, their two-dimensional density field, and
//! the symbolic machinery around them: binary itineraries and kneading
//! sequences, address curves, overlap horns, and the algebraic parameters
//! where those curves intersect.

pub mod algebraic;
pub mod cli;
pub mod curves;
pub mod error;
pub mod field;
pub mod measure;
pub mod polynomial;
pub mod rational;
pub mod render;
pub mod sequence;

pub use error::{Error, Result};
pub use polynomial::IntegerPolynomial;
pub use rational::Rational;
pub use sequence::BinarySequence;
