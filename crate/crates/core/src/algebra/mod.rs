//! Scalars, first-order jets, 4×4 complex matrices and differentiable
//! matrix-valued functions of momentum.

mod jet;
mod mat4;
mod matfn;
mod momentum;
mod scalar;

pub use jet::{Jet3, MatJet};
pub use mat4::Mat4;
pub use matfn::{commutator_fn, matfn_residual, matfn_residual_detail, Evaluator, MatFn};
pub use momentum::Momentum;
pub use scalar::ScalarFn;

pub use num_complex::Complex64;

/// The imaginary unit.
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Shorthand for a real complex number.
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}
