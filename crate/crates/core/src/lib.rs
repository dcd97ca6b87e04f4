//! Exact arithmetic on the Mukai lattice of an Enriques surface.

#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod enumerate;
pub mod exec;
pub mod lattice;
pub mod mukai;
pub mod reduction;
pub mod walls;
