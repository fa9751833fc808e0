#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cone;
pub mod error;
pub mod graph;
pub mod io;
pub mod maf;
pub mod network;
pub mod operators;
pub mod sampling;
pub mod scalar;
pub mod stability;
pub mod lyapunov;
pub mod path;
