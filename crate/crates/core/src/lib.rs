//! Exact class-group rank experiments on specializations of superelliptic
//! curves `y^m = f(x)`.

pub mod arith;
pub mod classgroup;
pub mod experiments;
pub mod harness;
pub mod heights;
pub mod lattice;
pub mod localcheck;
pub mod numberfield;
pub mod poly;
pub mod specialize;
mod serde_big;
