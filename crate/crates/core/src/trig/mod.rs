//! Band-limited trigonometric polynomials and the kernels built from them.
//!
//! A polynomial is stored by its complex Fourier coefficients on the
//! symmetric band |k| <= fc and evaluated as p(t) = sum_k c_k e^{-i 2 pi k t}.
//! Real-valuedness (c_{-k} = conj(c_k)) is enforced at construction.

mod kernels;
mod poly;

pub use kernels::{fejer4_kernel, fejer_kernel, Fejer4Kernel, FejerKernel, KernelSpec};
pub use poly::TrigPoly;

pub(crate) use kernels::sine_ratio_derivs;
