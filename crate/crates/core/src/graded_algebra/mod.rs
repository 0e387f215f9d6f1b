//! Supercommutative polynomials on graded charts.

mod chart;
mod morphism;
mod poly;

pub use chart::{Chart, ChartBuilder, GradedVariable, Parity, Role};
pub use morphism::Morphism;
pub use poly::{int, rat, Monomial, Poly, Rational};
