//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced by parsing, indexing, and the alignment kernels.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A byte that is neither an amino-acid letter nor `*`.
    #[error("invalid residue byte 0x{byte:02x} at position {position}{}", context_suffix(.record))]
    InvalidResidue {
        byte: u8,
        position: usize,
        record: Option<String>,
    },

    /// Input did not start with a `>` header line.
    #[error("malformed FASTA: expected '>' at start of input")]
    MalformedFasta,

    /// A FASTA record with a header but no residues.
    #[error("FASTA record '{0}' contains no residues")]
    EmptyRecord(String),

    /// Built-in matrix name not recognized.
    #[error("unknown scoring matrix '{0}'")]
    UnknownMatrix(String),

    /// Matrix text that is not a labeled square score table.
    #[error("malformed scoring matrix: {0}")]
    MalformedMatrix(String),

    /// A sequence profile was requested for zero sequences.
    #[error("cannot build a sequence profile from zero sequences")]
    EmptyProfile,

    /// Score-profile block lies outside the sequence profile.
    #[error("score profile block [{start}, {start}+{len}) exceeds profile length {padded_len}")]
    BlockOutOfRange {
        start: usize,
        len: usize,
        padded_len: usize,
    },

    /// Block size does not divide the profile length.
    #[error("block size {block} does not divide padded length {padded_len}")]
    BlockMismatch { block: usize, padded_len: usize },

    /// Query length times the largest score magnitude would overflow 32 bits.
    #[error("query of length {query_len} with max score magnitude {max_abs_score} risks 32-bit overflow")]
    OverflowRisk {
        query_len: usize,
        max_abs_score: i32,
    },

    /// Query exceeds the capacity the buffers were allocated for.
    #[error("query length {needed} exceeds buffer capacity {capacity}")]
    CapacityExceeded { needed: usize, capacity: usize },

    /// Buffer lane width differs from the profile lane width.
    #[error("buffer has {buffer} lanes but profile has {profile}")]
    LaneMismatch { buffer: usize, profile: usize },

    /// Lane width outside the supported set.
    #[error("unsupported lane width {0} (expected 4, 8, or 16)")]
    UnsupportedWidth(usize),

    /// Indexing requested for an empty database.
    #[error("database contains no sequences")]
    EmptyDatabase,

    /// Index file does not start with the expected magic bytes.
    #[error("bad magic in {0}: not an index file")]
    BadMagic(PathBuf),

    /// Index file has an unsupported format version.
    #[error("{path}: unsupported index version {found} (expected {expected})")]
    VersionMismatch {
        path: PathBuf,
        found: u32,
        expected: u32,
    },

    /// File is shorter than its own header or record table claims.
    #[error("truncated file {0}")]
    TruncatedFile(PathBuf),

    /// Record table entries are inconsistent with the file contents.
    #[error("corrupt record table in {path}: {detail}")]
    CorruptRecordTable { path: PathBuf, detail: String },

    /// An I/O failure, with the path it occurred on.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

fn context_suffix(record: &Option<String>) -> String {
    match record {
        Some(name) => format!(" in record '{name}'"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
