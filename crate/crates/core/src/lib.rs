//! Builds a dynamic knowledge graph from a video frame stream.
//!
//! Frames are cut into overlapping clips, each clip is captioned as a
//! *command language* (an alternating chain of ontology entities and
//! relations), and every command is grounded against a static OWL-style
//! ontology. The resulting graph grows monotonically and records the frame
//! intervals in which each edge was observed.
//!
//! ```
//! use streamkg::graph::TimeInterval;
//! use streamkg::ontology::{load_ontology, SAMPLE_ONTOLOGY};
//! use streamkg::command::parse_command_line;
//! use streamkg::graph::DynamicKnowledgeGraph;
//!
//! let onto = load_ontology(SAMPLE_ONTOLOGY).unwrap();
//! let cmd = parse_command_line("WAM pour GlassCup", &onto, TimeInterval::new(0, 29)).unwrap();
//! let mut kg = DynamicKnowledgeGraph::new();
//! kg.union_command(&cmd);
//! assert_eq!(kg.edge_count(), 1);
//! ```

pub mod command;
pub mod config;
pub mod demo;
mod dot;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod ontology;
pub mod pipeline;
pub mod sampler;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/ontology.md")]
    mod ontology {}
    #[doc = include_str!("../../../book/src/commands.md")]
    mod commands {}
    #[doc = include_str!("../../../book/src/dynamic-graph.md")]
    mod dynamic_graph {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
