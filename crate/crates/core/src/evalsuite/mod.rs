//! End-to-end evaluations: CCA image retrieval, STS scoring and the
//! correlation of task metrics across models.

mod metrics;
mod retrieval;
mod sts;

pub use self::metrics::{
    metric_correlation_report, pair_key, GroupCorrelation, MetricCorrelationReport, MetricsRow,
    MetricsTable, ScatterPoint, DEFAULT_METRIC_PAIRS,
};
pub use self::retrieval::{
    image_retrieval_eval, recall_at_k, Direction, RetrievalConfig, RetrievalReport, RetrievalRun,
    Weighting,
};
pub use self::sts::{sts_eval, StsMode, StsReport};
