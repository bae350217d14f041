#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod dsl;
pub mod fd;
pub mod frame;
pub mod geometry;
pub mod jet;

pub use dsl::{eval_ast, jet_eval, parse_embedding, EmbeddingMap, Signature};
pub use geometry::{analyze_point, AnalysisOptions, PointGeometry, ResidualSet};
pub use jet::Jet;
