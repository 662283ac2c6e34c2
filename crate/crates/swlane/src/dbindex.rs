//! Database index construction, on-disk format, and work-item accounting.
//!
//! A database is indexed offline into two files so searches can start
//! without re-parsing FASTA:
//!
//! * `<prefix>.swidx` — header, record table, and name blob (little-endian):
//!   magic `SWLANE01`, u32 version, u32 reserved, u64 sequence count,
//!   u64 residue count, u32 max length, u32 name-blob size, then one
//!   `{ u64 payload offset, u32 length, u32 name offset }` entry per
//!   sequence, then NUL-terminated names.
//! * `<prefix>.swseq` — the residue codes of every record in sorted order,
//!   each record zero-padded to the next multiple of 8 bytes.
//!
//! Records are sorted ascending by length (ties keep input order) so that
//! consecutive records group into lane profiles with minimal padding. The
//! payload file is mapped into memory and sliced in place.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::seq::Sequence;

const MAGIC: &[u8; 8] = b"SWLANE01";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 40;
const RECORD_LEN: usize = 16;
const PAYLOAD_PAD: u64 = 8;

/// Granularity of one schedulable work item.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorkKind {
    /// A group of `lanes` consecutive sorted sequences, aligned together.
    ProfileGroup,
    /// One subject sequence.
    SingleSequence,
}

/// A contiguous run of work items handed to one worker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Chunk {
    pub kind: WorkKind,
    pub first_item: usize,
    pub item_count: usize,
}

/// Summary returned by [`build_index`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexStats {
    pub sequences: u64,
    pub residues: u64,
    pub max_len: u32,
}

fn swidx_path(prefix: &Path) -> PathBuf {
    let mut p = prefix.as_os_str().to_owned();
    p.push(".swidx");
    PathBuf::from(p)
}

fn swseq_path(prefix: &Path) -> PathBuf {
    let mut p = prefix.as_os_str().to_owned();
    p.push(".swseq");
    PathBuf::from(p)
}

/// Sort sequences ascending by length and write both index files.
pub fn build_index(sequences: &[Sequence], out_prefix: &Path) -> Result<IndexStats> {
    if sequences.is_empty() {
        return Err(Error::EmptyDatabase);
    }

    let mut order: Vec<usize> = (0..sequences.len()).collect();
    order.sort_by_key(|&i| sequences[i].len());

    let idx_path = swidx_path(out_prefix);
    let seq_path = swseq_path(out_prefix);

    let mut payload = BufWriter::new(
        File::create(&seq_path).map_err(|e| Error::io(&seq_path, e))?,
    );
    let seq_err = |e| Error::io(&seq_path, e);

    let mut records: Vec<(u64, u32, u32)> = Vec::with_capacity(sequences.len());
    let mut names: Vec<u8> = Vec::new();
    let mut payload_offset = 0u64;
    let mut total_residues = 0u64;
    let mut max_len = 0u32;
    let zeros = [0u8; PAYLOAD_PAD as usize];

    for &i in &order {
        let seq = &sequences[i];
        let len = u32::try_from(seq.len()).expect("sequence length exceeds format limit");
        let name_offset = u32::try_from(names.len()).expect("name blob exceeds format limit");
        // NUL terminates each name; embedded NULs would break the framing.
        names.extend(seq.name().bytes().map(|b| if b == 0 { b' ' } else { b }));
        names.push(0);

        payload.write_all(seq.codes()).map_err(seq_err)?;
        let padded = (u64::from(len)).div_ceil(PAYLOAD_PAD) * PAYLOAD_PAD;
        payload
            .write_all(&zeros[..(padded - u64::from(len)) as usize])
            .map_err(seq_err)?;

        records.push((payload_offset, len, name_offset));
        payload_offset += padded;
        total_residues += u64::from(len);
        max_len = max_len.max(len);
    }
    payload.flush().map_err(seq_err)?;

    let mut idx = BufWriter::new(
        File::create(&idx_path).map_err(|e| Error::io(&idx_path, e))?,
    );
    let idx_err = |e| Error::io(&idx_path, e);
    idx.write_all(MAGIC).map_err(idx_err)?;
    idx.write_all(&VERSION.to_le_bytes()).map_err(idx_err)?;
    idx.write_all(&0u32.to_le_bytes()).map_err(idx_err)?;
    idx.write_all(&(sequences.len() as u64).to_le_bytes())
        .map_err(idx_err)?;
    idx.write_all(&total_residues.to_le_bytes()).map_err(idx_err)?;
    idx.write_all(&max_len.to_le_bytes()).map_err(idx_err)?;
    idx.write_all(&(names.len() as u32).to_le_bytes())
        .map_err(idx_err)?;
    for &(offset, len, name_offset) in &records {
        idx.write_all(&offset.to_le_bytes()).map_err(idx_err)?;
        idx.write_all(&len.to_le_bytes()).map_err(idx_err)?;
        idx.write_all(&name_offset.to_le_bytes()).map_err(idx_err)?;
    }
    idx.write_all(&names).map_err(idx_err)?;
    idx.flush().map_err(idx_err)?;

    Ok(IndexStats {
        sequences: sequences.len() as u64,
        residues: total_residues,
        max_len,
    })
}

#[derive(Debug, Clone, Copy)]
struct Record {
    payload_offset: u64,
    length: u32,
    name_offset: u32,
}

enum Payload {
    Mapped(memmap2::Mmap),
    Owned(Vec<u8>),
}

impl Payload {
    fn as_slice(&self) -> &[u8] {
        match self {
            Payload::Mapped(m) => m,
            Payload::Owned(v) => v,
        }
    }
}

/// An opened, validated database index. Immutable and shareable across
/// worker threads; residue access slices the mapped payload in place.
pub struct DbIndex {
    records: Vec<Record>,
    names: Vec<u8>,
    payload: Payload,
    total_residues: u64,
    max_len: u32,
}

impl std::fmt::Debug for DbIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DbIndex")
            .field("sequences", &self.records.len())
            .field("total_residues", &self.total_residues)
            .field("max_len", &self.max_len)
            .finish_non_exhaustive()
    }
}


impl DbIndex {
    /// Open `<prefix>.swidx` / `<prefix>.swseq`, validating the header,
    /// record table bounds, and payload size before returning.
    pub fn open(prefix: &Path) -> Result<DbIndex> {
        let idx_path = swidx_path(prefix);
        let seq_path = swseq_path(prefix);

        let idx_bytes = std::fs::read(&idx_path).map_err(|e| Error::io(&idx_path, e))?;
        if idx_bytes.len() < HEADER_LEN {
            if idx_bytes.len() < MAGIC.len() || &idx_bytes[..MAGIC.len()] != MAGIC {
                return Err(Error::BadMagic(idx_path));
            }
            return Err(Error::TruncatedFile(idx_path));
        }
        if &idx_bytes[..8] != MAGIC {
            return Err(Error::BadMagic(idx_path));
        }
        let version = read_u32(&idx_bytes, 8);
        if version != VERSION {
            return Err(Error::VersionMismatch {
                path: idx_path,
                found: version,
                expected: VERSION,
            });
        }
        let num_sequences = read_u64(&idx_bytes, 16);
        let total_residues = read_u64(&idx_bytes, 24);
        let max_len = read_u32(&idx_bytes, 32);
        let name_blob_bytes = read_u32(&idx_bytes, 36) as usize;

        let n = usize::try_from(num_sequences)
            .map_err(|_| Error::TruncatedFile(idx_path.clone()))?;
        let table_bytes = n
            .checked_mul(RECORD_LEN)
            .ok_or_else(|| Error::TruncatedFile(idx_path.clone()))?;
        let needed = HEADER_LEN
            .checked_add(table_bytes)
            .and_then(|x| x.checked_add(name_blob_bytes))
            .ok_or_else(|| Error::TruncatedFile(idx_path.clone()))?;
        if idx_bytes.len() < needed {
            return Err(Error::TruncatedFile(idx_path));
        }
        if n == 0 {
            return Err(Error::EmptyDatabase);
        }

        let corrupt = |detail: &str| Error::CorruptRecordTable {
            path: idx_path.clone(),
            detail: detail.to_string(),
        };

        let mut records = Vec::with_capacity(n);
        for r in 0..n {
            let base = HEADER_LEN + r * RECORD_LEN;
            records.push(Record {
                payload_offset: read_u64(&idx_bytes, base),
                length: read_u32(&idx_bytes, base + 8),
                name_offset: read_u32(&idx_bytes, base + 12),
            });
        }
        let names = idx_bytes[HEADER_LEN + table_bytes..needed].to_vec();

        let mut sum = 0u64;
        let mut seen_max = 0u32;
        for (r, rec) in records.iter().enumerate() {
            if rec.length == 0 {
                return Err(corrupt(&format!("record {r} has zero length")));
            }
            if r > 0 && rec.length < records[r - 1].length {
                return Err(corrupt(&format!("record {r} breaks ascending length order")));
            }
            if rec.payload_offset % PAYLOAD_PAD != 0 {
                return Err(corrupt(&format!("record {r} payload offset not aligned")));
            }
            let name_start = rec.name_offset as usize;
            if name_start >= names.len() {
                return Err(corrupt(&format!("record {r} name offset out of range")));
            }
            let name_end = names[name_start..]
                .iter()
                .position(|&b| b == 0)
                .ok_or_else(|| corrupt(&format!("record {r} name not terminated")))?;
            if std::str::from_utf8(&names[name_start..name_start + name_end]).is_err() {
                return Err(corrupt(&format!("record {r} name is not UTF-8")));
            }
            sum += u64::from(rec.length);
            seen_max = seen_max.max(rec.length);
        }
        if sum != total_residues {
            return Err(corrupt("residue total does not match record lengths"));
        }
        if seen_max != max_len {
            return Err(corrupt("max length does not match record lengths"));
        }

        let seq_file = File::open(&seq_path).map_err(|e| Error::io(&seq_path, e))?;
        // SAFETY: the mapping is read-only and the index owns no other
        // handle to the file; truncation by another process while mapped is
        // outside this crate's contract.
        let payload = match unsafe { memmap2::Mmap::map(&seq_file) } {
            Ok(map) => Payload::Mapped(map),
            Err(_) => Payload::Owned(
                std::fs::read(&seq_path).map_err(|e| Error::io(&seq_path, e))?,
            ),
        };
        let payload_len = payload.as_slice().len() as u64;
        for (r, rec) in records.iter().enumerate() {
            let end = rec
                .payload_offset
                .checked_add(u64::from(rec.length))
                .ok_or_else(|| corrupt(&format!("record {r} payload range overflows")))?;
            if end > payload_len {
                return Err(Error::TruncatedFile(seq_path));
            }
        }

        Ok(DbIndex {
            records,
            names,
            payload,
            total_residues,
            max_len,
        })
    }

    /// Number of sequences, in ascending length order.
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Sum of real residue counts; padding bytes are not included.
    pub fn total_residues(&self) -> u64 {
        self.total_residues
    }

    pub fn max_len(&self) -> u32 {
        self.max_len
    }

    /// Residue codes of record `i`, sliced from the mapped payload.
    pub fn residues(&self, i: usize) -> &[u8] {
        let rec = &self.records[i];
        let start = rec.payload_offset as usize;
        &self.payload.as_slice()[start..start + rec.length as usize]
    }

    pub fn length(&self, i: usize) -> usize {
        self.records[i].length as usize
    }

    pub fn name(&self, i: usize) -> &str {
        let start = self.records[i].name_offset as usize;
        let end = self.names[start..]
            .iter()
            .position(|&b| b == 0)
            .expect("validated at open");
        std::str::from_utf8(&self.names[start..start + end]).expect("validated at open")
    }

    /// Number of schedulable items for the given work granularity.
    pub fn work_items(&self, kind: WorkKind, lanes: usize) -> usize {
        match kind {
            WorkKind::ProfileGroup => self.len().div_ceil(lanes),
            WorkKind::SingleSequence => self.len(),
        }
    }

    /// The record range covered by profile group `group`.
    pub fn group_range(&self, group: usize, lanes: usize) -> std::ops::Range<usize> {
        let start = group * lanes;
        start..((group + 1) * lanes).min(self.len())
    }
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
}

fn read_u64(bytes: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap())
}
