//! Core library: formal Laurent series, formal reproducing kernels,
//! Givone-Roesser unitary colligations, Agler decompositions, realization
//! solvers and lattice scattering simulation.

pub mod agler;
pub mod colligation;
pub mod error;
pub mod lattice;
pub mod kernels;
pub mod laurent;
pub mod realization;
pub mod matrix;
pub mod samples;
pub mod scattering;
