use thiserror::Error;

use crate::group::GroupDescriptor;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("descriptor mismatch: {left} vs {right}")]
    DescriptorMismatch {
        left: GroupDescriptor,
        right: GroupDescriptor,
    },
    #[error("value does not belong to group {group}: {detail}")]
    ShapeMismatch { group: GroupDescriptor, detail: String },
    #[error("invalid group descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("natural valuation is undefined at zero")]
    ZeroArgument,
    #[error("{0} is outside the span of the functional's generators")]
    OutsideSpan(String),
    #[error("invalid functional: {0}")]
    InvalidFunctional(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("invalid character: {0}")]
    InvalidCharacter(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("series is zero")]
    ZeroSeries,
    #[error("derivation is not contracting: {0}")]
    NonContracting(String),
    #[error("expansion does not terminate: {0}")]
    NonTerminating(String),
    #[error("exponent {0} is not mapped by the derivation table")]
    UnmappedExponent(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("not infinitesimal: {0}")]
    NotInfinitesimal(String),
    #[error("not a 1-automorphism: {0}")]
    NotOneAut(String),
    #[error("not an internal group automorphism: {0}")]
    NotInternal(String),
    #[error("derivation failed the Leibniz check: {0}")]
    LeibnizFailure(String),
    #[error("samples insufficient: {0}")]
    SampleInsufficiency(String),
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("exponent parse error at offset {offset}: {message}")]
    ExponentParse { offset: usize, message: String },
    #[error("{source} (at {path})")]
    AtNode { path: String, source: Box<Error> },
}

impl Error {
    /// Stable category name, used in CLI reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DescriptorMismatch { .. } => "DescriptorMismatch",
            Error::ShapeMismatch { .. } => "ShapeMismatch",
            Error::InvalidDescriptor(_) => "InvalidDescriptor",
            Error::ZeroArgument => "ZeroArgument",
            Error::OutsideSpan(_) => "OutsideSpan",
            Error::InvalidFunctional(_) => "InvalidFunctional",
            Error::InvalidMap(_) => "InvalidMap",
            Error::InvalidCharacter(_) => "InvalidCharacter",
            Error::DivisionByZero => "DivisionByZero",
            Error::InsufficientPrecision(_) => "InsufficientPrecision",
            Error::ZeroSeries => "ZeroSeries",
            Error::NonContracting(_) => "NonContracting",
            Error::NonTerminating(_) => "NonTerminating",
            Error::UnmappedExponent(_) => "UnmappedExponent",
            Error::DomainError(_) => "DomainError",
            Error::NotInfinitesimal(_) => "NotInfinitesimal",
            Error::NotOneAut(_) => "NotOneAut",
            Error::NotInternal(_) => "NotInternal",
            Error::LeibnizFailure(_) => "LeibnizFailure",
            Error::SampleInsufficiency(_) => "SampleInsufficiency",
            Error::Parse { .. } => "ParseError",
            Error::ExponentParse { .. } => "ExponentParseError",
            Error::AtNode { source, .. } => source.kind(),
        }
    }

    /// The innermost error, with node paths stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtNode { source, .. } => source.root(),
            other => other,
        }
    }

    /// Node path of the failing automorphism node, if any.
    pub fn path(&self) -> Option<&str> {
        match self {
            Error::AtNode { path, .. } => Some(path),
            _ => None,
        }
    }

    pub(crate) fn at(self, segment: &str) -> Error {
        match self {
            Error::AtNode { path, source } => Error::AtNode {
                path: format!("{segment}.{path}"),
                source,
            },
            other => Error::AtNode {
                path: segment.to_string(),
                source: Box::new(other),
            },
        }
    }

    pub(crate) fn mismatch(left: GroupDescriptor, right: GroupDescriptor) -> Error {
        Error::DescriptorMismatch { left, right }
    }
}

/// Attaches a node-path segment to the error of a fallible computation.
pub(crate) trait AtNode<T> {
    fn at_node(self, segment: &str) -> Result<T>;
}

impl<T> AtNode<T> for Result<T> {
    fn at_node(self, segment: &str) -> Result<T> {
        self.map_err(|e| e.at(segment))
    }
}
