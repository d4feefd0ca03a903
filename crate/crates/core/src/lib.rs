//! Evaluation toolkit for sentence representations.
//!
//! Three families of measurements live here:
//!
//! * cross-modal image retrieval through canonical correlation analysis
//!   ([`cca`], [`evalsuite::image_retrieval_eval`]),
//! * semantic textual similarity scored by the Spearman correlation of
//!   cosine distances with human judgements ([`evalsuite::sts_eval`]),
//! * distance correlation between representation spaces ([`dcorr`]).
//!
//! A small meta-analysis helper correlates task metrics across models, and
//! [`synth`] provides seeded generators with known ground truth used as test
//! oracles throughout.

mod error;
pub(crate) mod linalg;

pub mod cca;
pub mod corrstats;
pub mod dcorr;
pub mod evalsuite;
pub mod repstore;
pub mod synth;

pub use crate::cca::CcaModel;
pub use crate::dcorr::{DcorrMatrix, DcorrOptions, Estimator};
pub use crate::error::{Error, Result, Side};
pub use crate::evalsuite::{
    Direction, MetricsTable, RetrievalConfig, RetrievalReport, StsMode, StsReport, Weighting,
};
pub use crate::repstore::{
    IdMap, PairedDataset, RepFormat, RepresentationSet, StsGold, StsPair, TokenSequence,
};
pub use crate::synth::SynthSpec;

/// Crate version, embedded in every serialized report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
