//! Asynchronous attractors of Boolean networks, computed module by module
//! over the strongly connected components of the interaction graph.

pub mod astg;
pub mod bench;
pub mod boolfunc;
pub mod decomposition;
pub mod engine;
pub mod error;
pub mod fixtures;
pub mod network;
pub mod oracle;

pub use error::{Error, Result};
