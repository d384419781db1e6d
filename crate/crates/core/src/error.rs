//! Error type shared by all modules.

use std::fmt;

/// Errors reported by builders, solvers and studies.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A size parameter is below the smallest admissible value.
    InvalidSize {
        what: &'static str,
        min: usize,
        got: usize,
    },
    /// A real parameter lies outside its admissible interval.
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    /// The interaction radius rounds to zero neighbors.
    DegenerateRadius { n: usize, r: f64 },
    /// A control pattern actuates no agent.
    EmptyControl,
    /// A control shape applied to an incompatible network family.
    FamilyMismatch {
        expected: &'static str,
        got: &'static str,
    },
    /// An index outside `0..len`.
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },
    /// An iterative solver failed to converge; the payload reports a residual.
    NumericalFailure(String),
    /// A stable step size could not be reached under the shrink cap.
    StepSize { requested: f64, needed: f64 },
    /// A sampled control signal does not cover the integration horizon.
    SignalDomain { have: f64, need: f64 },
    /// Too few points for a fit or a study.
    InsufficientData(&'static str),
    /// Operation defined only for scalar opinions (d = 1).
    UnsupportedDimension { expected: usize, got: usize },
    /// A kernel was requested from a PDE-scaled model.
    ScalingMismatch,
    /// A kernel class the Nystrom solver cannot integrate.
    UnsupportedKernel(&'static str),
    /// A second-order diagnostic applied to a trajectory without velocities.
    MissingVelocities,
    /// Gramian refinement did not meet the tolerance under the step cap.
    QuadratureNonConvergence { achieved: f64, target: f64 },
    /// Steering defect outside the range of the Gramian.
    UnreachableTarget { defect_norm: f64 },
    /// A vacuous test function (constant) was supplied to a weak-form residual.
    DegenerateTest(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidSize { what, min, got } => {
                write!(f, "{what}: size {got} below minimum {min}")
            }
            Error::OutOfRange {
                what,
                value,
                lo,
                hi,
            } => write!(f, "{what}: {value} outside [{lo}, {hi}]"),
            Error::DegenerateRadius { n, r } => {
                write!(f, "radius r = {r} rounds to zero neighbors at N = {n}")
            }
            Error::EmptyControl => write!(f, "control pattern actuates no agent"),
            Error::FamilyMismatch { expected, got } => {
                write!(f, "control shape requires {expected} family, got {got}")
            }
            Error::IndexOutOfRange { what, index, len } => {
                write!(f, "{what}: index {index} out of range 0..{len}")
            }
            Error::NumericalFailure(msg) => write!(f, "numerical failure: {msg}"),
            Error::StepSize { requested, needed } => write!(
                f,
                "step size {requested} unstable and shrink cap reached (needed <= {needed})"
            ),
            Error::SignalDomain { have, need } => {
                write!(f, "control signal covers [0, {have}] but horizon is {need}")
            }
            Error::InsufficientData(what) => write!(f, "insufficient data for {what}"),
            Error::UnsupportedDimension { expected, got } => {
                write!(f, "operation requires opinion dimension {expected}, got {got}")
            }
            Error::ScalingMismatch => {
                write!(f, "kernel extraction requires the unscaled (consensus) model")
            }
            Error::UnsupportedKernel(k) => write!(f, "kernel {k} not integrable by this solver"),
            Error::MissingVelocities => write!(f, "trajectory carries no velocities"),
            Error::QuadratureNonConvergence { achieved, target } => write!(
                f,
                "quadrature refinement stalled at relative change {achieved} (target {target})"
            ),
            Error::UnreachableTarget { defect_norm } => write!(
                f,
                "steering defect lies outside the Gramian range (residual {defect_norm})"
            ),
            Error::DegenerateTest(what) => write!(f, "degenerate test function: {what}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
