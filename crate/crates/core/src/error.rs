use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("jet singularity: division by a jet with zero value")]
    JetSingularity,

    #[error("degenerate metric at the evaluation point")]
    DegenerateMetric,

    #[error("non-finite value while evaluating {0}")]
    NonFinite(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("degenerate pair: P and Q span less than a plane")]
    DegeneratePair,

    #[error("stabilizer constraint #{index} violated ({label}), residual {residual:.3e}")]
    Constraint {
        index: usize,
        label: &'static str,
        residual: f64,
    },

    #[error("chart escape: {0}")]
    ChartEscape(String),

    #[error("point lies on the singular locus of the chart")]
    SingularLocus,

    #[error("boundary point: r̂ = 0 is not a point of the bulk chart")]
    BoundaryPoint,

    #[error("sampler could not find an admissible point after {0} attempts")]
    SamplerExhausted(usize),
}
