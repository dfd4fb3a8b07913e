//! Deciding the type problem (parabolic or not) for bounded-geometry
//! surfaces through their dual pants/hexagon graphs: truncations of lazily
//! generated infinite graphs, discrete potential theory, random-walk
//! classifiers with three certificate styles, explicit flow constructions,
//! train-track ℓ² membership tests, and closed-form Dirichlet integrals for
//! foliation building blocks.

pub mod classify;
pub mod error;
pub mod flows;
pub mod foliation;
pub mod generators;
pub mod graph;
pub mod laminations;
pub mod potential;

pub use classify::{Evidence, Method, TypeVerdict, Verdict};
pub use error::{Error, Result};
pub use generators::{Attachment, FluteTreeSpec, GraphGenerator, VertexKey};
pub use graph::{
    build_truncation, build_truncation_with, EdgeId, GraphView, OrientedEdge, TruncationConfig,
    VertexId,
};
pub use laminations::{CurveFamily, Membership, TailedWeights, TrainTrack, WeightSystem};
pub use potential::{EdgeFunction, VertexFunction};
