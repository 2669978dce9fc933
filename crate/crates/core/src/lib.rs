//! Simulation of a three-level (cascade) quantum battery through its whole
//! life cycle: self-discharge under a Lindblad master equation, work
//! extraction to the passive state, optional postselection on the ground
//! level, and recharging by counterdiabatic (shortcut-to-adiabaticity) or
//! plain STIRAP driving.

// `!(x > 0.0)` is how NaN gets rejected throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::assign_op_pattern)]

pub mod dynamics;
pub mod ergotropy;
pub mod error;
pub mod protocol;
pub mod pulses;
pub mod quadrature;
pub mod qutrit;
pub mod sweep;

#[cfg(test)]
mod testing;

pub use error::QbError;
pub use num_complex::Complex64 as C64;
