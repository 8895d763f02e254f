use alloc::string::String;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("{op}: dimension mismatch (expected {expected}, found {found})")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("hx has {hx_cols} columns but hz has {hz_cols}")]
    ColumnMismatch { hx_cols: usize, hz_cols: usize },

    #[error("hx row {row_x} and hz row {row_z} overlap on an odd number of bits")]
    NotCommuting { row_x: usize, row_z: usize },

    #[error("invalid code parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown built-in code '{0}'")]
    UnknownBuiltin(String),

    #[error("vertex {vertex} out of range ({limit} available)")]
    VertexOutOfRange { vertex: String, limit: usize },

    #[error("vertex {0} is not registered in the forest")]
    Unregistered(usize),

    #[error("{degree_kind} degree {degree} exceeds bound {bound}")]
    DegreeBound {
        degree_kind: &'static str,
        degree: usize,
        bound: usize,
    },

    #[error("cluster is not valid: its local system has no solution")]
    InvalidCluster,

    #[error("could not parse bit string: unexpected character {0:?}")]
    BadBit(char),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
