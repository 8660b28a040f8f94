//! Clustered clique-coded associative memory.
//!
//! Messages of `k` bits are cut into `c` chunks; each chunk picks one fanal in
//! its cluster and the chosen fanals are wired into a clique. A partially
//! erased message is completed by iterated winner-take-all decoding. The
//! crate also carries the classical Hopfield baseline, the closed-form
//! performance model, and a seeded Monte Carlo harness.
//!
//! ```
//! use cliquenet::{CliqueNetwork, ClusterTopology, DecodeParams, FanalPattern};
//!
//! let topology = ClusterTopology::new(4, 16)?;
//! let mut net = CliqueNetwork::new(topology);
//! net.learn_pattern(&FanalPattern::full(&[0, 1, 15, 8]))?;
//!
//! let probe = FanalPattern::new(vec![Some(0), None, Some(15), Some(8)]);
//! let out = net.decode(&probe, &DecodeParams::retrieval(4))?;
//! assert_eq!(out.pattern(), FanalPattern::full(&[0, 1, 15, 8]));
//! # Ok::<(), cliquenet::Error>(())
//! ```

pub mod analysis;
pub mod cli;
pub mod clique;
mod error;
pub mod experiments;
pub mod formats;
pub mod hopfield;
pub mod snapshot;
pub mod wta;

pub use clique::{
    ActiveSet, CliqueNetwork, ClusterState, ClusterTopology, DecodeOutcome, DecodeParams,
    FanalPattern, Message,
};
pub use error::{Error, Result};
pub use hopfield::HopfieldNetwork;
pub use wta::{Codebook, SoftMLDecoder, SoftOutput, SoftSymbol};
