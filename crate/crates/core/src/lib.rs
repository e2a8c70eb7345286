//! Workbench for demand-oblivious, fixed demand-aware and self-adjusting
//! networks.
//!
//! * [`demand`]: traces, canonical workloads, generators, demand graphs.
//! * [`entropy`]: empirical and conditional entropies in bits.
//! * [`bst`]: BSTs as networks (balanced, optimal, weight-balanced, splay).
//! * [`topo`]: general topologies, routing, reconfiguration.
//! * [`costmodel`]: ledgers, algorithm classes, oracles, optimality ratios.
//! * [`io`]: text formats for traces, demand graphs and networks.

pub mod bst;
pub mod costmodel;
pub mod demand;
pub mod entropy;
mod error;
pub mod io;
pub mod topo;

pub use error::{Error, Result};
