use thiserror::Error;

/// Errors produced by the analysis pipeline.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("W(0) = a0 + b0 = {0:e} is too close to zero; the analysis excludes omega = 0 roots")]
    ZeroAtOrigin(f64),

    #[error("matrix entry {name}[{row}][{col}] = {value} violates the companion shape (expected {expected})")]
    CompanionShape {
        name: &'static str,
        row: usize,
        col: usize,
        value: f64,
        expected: f64,
    },

    #[error("Routh-Hurwitz table degenerate at row {row}: entry {value:e} below tolerance (root on or near the imaginary axis)")]
    RouthDegenerate { row: usize, value: f64 },

    #[error("degenerate amplitude cubic: {0}")]
    DegenerateCubic(String),

    #[error("|Q(i omega)| = {0:e} too small to solve for the crossing phase")]
    QVanishes(f64),

    #[error("two switch events coincide near tau = {0} (net crossing direction undefined)")]
    EventTie(f64),

    #[error("running right-half-plane count went negative at tau = {0} (internal inconsistency)")]
    NegativeRootCount(f64),

    #[error("F(0) = {0:e} <= 0: |a0| > |b0| is required for a switch schedule (omega = 0 boundary excluded)")]
    AmplitudeAtZero(f64),

    #[error(
        "min |W(i omega)| = {0:e} along the hodograph: tau sits on (or next to) a critical delay"
    )]
    CriticalDelay(f64),

    #[error("hodograph truncation tail bound {0:e} too large to certify the argument limit")]
    Inconclusive(f64),

    #[error("total argument change {0} is not 3*pi/2 modulo 2*pi (internal inconsistency)")]
    ArgumentConvention(f64),

    #[error("step refinement exceeded maximum depth near omega = {0}")]
    StepRefinement(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("polynomial vanishes at interval endpoint {0}")]
    EndpointRoot(f64),

    #[error("zero polynomial has no Sturm chain")]
    ZeroPolynomial,

    #[error("A + B is singular: no unique steady state")]
    SingularSystem,

    #[error("step h = {h} too large for delay tau = {tau} (need h <= tau/4)")]
    StepTooLarge { h: f64, tau: f64 },

    #[error(
        "trajectory too short to classify: {extrema} extrema observed, need at least {needed}"
    )]
    TooShort { extrema: usize, needed: usize },

    #[error("history function does not cover {0}")]
    HistoryDomain(f64),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
