//! Streaming community detection and supergraph visualization for large
//! edge lists.
//!
//! The pipeline streams the edges once per round to assign communities,
//! sizes them with a count-min sketch, contracts them into a weighted
//! supergraph, lays that out with ForceAtlas2 and writes an SVG.

pub mod community;
pub mod error;
pub mod gen;
pub mod graph;
pub mod layout;
pub mod metrics;
pub mod pipeline;
pub mod render;
pub mod sketch;
pub mod supergraph;

pub use error::{Error, Result};
pub use graph::{Graph, NodeId};
