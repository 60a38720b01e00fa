//! Numerical verification of non-Noether symmetries of Hamiltonian systems.
//!
//! Given a Poisson bivector `W`, a Hamiltonian `h` and a candidate generator
//! `E`, the crate checks the Poisson and symmetry identities, builds the
//! deformed bivector `[E, W]`, extracts the roots of the secular equation
//! `(Ŵ - cW)^n = 0` together with the ratios `Ŵ^l ∧ W^(n-l) / W^n`, and audits
//! their conservation along the flow and their pairwise involution.
//!
//! The crate is `no_std` and needs only `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod expr;
pub mod scalar;
pub mod geometry;
pub mod spectral;
pub mod system;
pub mod verify;
pub mod pipeline;
