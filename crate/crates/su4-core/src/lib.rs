//! Two-qubit unitary synthesis for a {R, Rz, G} gate library, with a noisy
//! experiment simulator and state/process tomography.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod benchmark;
pub mod compiler;
pub mod gates;
pub mod haar;
pub mod linalg;
pub mod sim;
pub mod tolerance;
pub mod tomography;

pub use num_complex::Complex64 as C64;
