//! Theta functions with certified truncation, exact algebra in the
//! noncommutative torus, finite-dimensional representations, and the
//! Fourier-invariant projections built from them.

pub mod nctorus;
pub mod repmat;
pub mod projector;
pub mod theta;
