//! Exact and numerical verification tools for flows, p-resistance and
//! self-avoiding walks on bunkbed graphs `G x K2`.

pub mod closedform;
pub mod graph;
pub mod harness;
pub mod maxflow;
pub mod presistance;
pub mod saw;
