//! Residue alphabet, sequence encoding, and FASTA ingestion.
//!
//! Protein residues are encoded as small integers so substitution matrices
//! and profiles can be indexed directly. Codes 0..=23 cover the 24-letter
//! alphabet in the order substitution matrices are published in; code 24 is
//! a padding sentinel whose substitution score against everything is zero.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// The 24-letter protein alphabet in substitution-matrix publication order.
pub const ALPHABET: &[u8; 24] = b"ARNDCQEGHILKMFPSTWYVBZX*";

/// Number of real residue codes.
pub const ALPHABET_LEN: usize = 24;

/// Row/column count of padded substitution matrices. Residue codes stay
/// below this bound so profile rows can be loaded as fixed 32-slot blocks.
pub const MATRIX_DIM: usize = 32;

/// A residue code in `[0, 31]`.
///
/// Codes 0..=23 map one-to-one onto [`ALPHABET`]; [`Residue::DUMMY`] (24) is
/// the padding sentinel. Codes 25..=31 are reserved and never produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(transparent)]
pub struct Residue(u8);

impl Residue {
    /// Padding sentinel; scores zero against every residue.
    pub const DUMMY: Residue = Residue(ALPHABET_LEN as u8);

    /// Encode one letter. Unknown amino-acid letters (e.g. `J`, `O`, `U`)
    /// map to `X`; anything that is not a letter or `*` is `None`.
    pub fn from_letter(letter: u8) -> Option<Residue> {
        let upper = letter.to_ascii_uppercase();
        if upper == b'*' {
            return Some(Residue(23));
        }
        if !upper.is_ascii_uppercase() {
            return None;
        }
        match ALPHABET.iter().position(|&a| a == upper) {
            Some(code) => Some(Residue(code as u8)),
            None => Some(Residue(22)), // 'X'
        }
    }

    /// Construct from a raw code. Panics on codes ≥ 32 in debug builds.
    #[inline]
    pub fn from_code(code: u8) -> Residue {
        debug_assert!((code as usize) < MATRIX_DIM);
        Residue(code)
    }

    #[inline]
    pub fn code(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// The letter this code decodes to. Only valid for codes 0..=23.
    pub fn letter(self) -> u8 {
        ALPHABET[self.0 as usize]
    }

    #[inline]
    pub fn is_dummy(self) -> bool {
        self.0 == Self::DUMMY.0
    }
}

/// A named, encoded protein sequence. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    name: String,
    residues: Vec<Residue>,
}

impl Sequence {
    /// Build a sequence from raw text, encoding each byte.
    pub fn from_text(name: impl Into<String>, text: &[u8]) -> Result<Sequence> {
        let name = name.into();
        let mut residues = Vec::with_capacity(text.len());
        for (position, &byte) in text.iter().enumerate() {
            match Residue::from_letter(byte) {
                Some(residue) => residues.push(residue),
                None => {
                    return Err(Error::InvalidResidue {
                        byte,
                        position,
                        record: Some(name),
                    })
                }
            }
        }
        if residues.is_empty() {
            return Err(Error::EmptyRecord(name));
        }
        Ok(Sequence { name, residues })
    }

    /// Build a sequence from already-encoded residue codes.
    pub fn from_residues(name: impl Into<String>, residues: Vec<Residue>) -> Result<Sequence> {
        let name = name.into();
        if residues.is_empty() {
            return Err(Error::EmptyRecord(name));
        }
        debug_assert!(residues.iter().all(|r| !r.is_dummy()));
        Ok(Sequence { name, residues })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn residues(&self) -> &[Residue] {
        &self.residues
    }

    /// Residue codes as raw bytes.
    #[inline]
    pub fn codes(&self) -> &[u8] {
        // SAFETY: Residue is repr(transparent) over u8.
        unsafe { std::slice::from_raw_parts(self.residues.as_ptr().cast::<u8>(), self.residues.len()) }
    }

    /// Decode back to letters.
    pub fn to_letters(&self) -> Vec<u8> {
        self.residues.iter().map(|r| r.letter()).collect()
    }
}

/// Parse FASTA text into sequences, preserving record order.
///
/// Records start with `>` header lines; the name is the header text up to
/// the first newline. CR, LF, and whitespace inside sequence lines are
/// skipped. Empty records and undecodable bytes are errors.
pub fn parse_fasta(mut input: impl BufRead) -> Result<Vec<Sequence>> {
    let mut text = Vec::new();
    input
        .read_to_end(&mut text)
        .map_err(|e| Error::io("<fasta stream>", e))?;
    parse_fasta_bytes(&text)
}

/// Parse FASTA from an in-memory byte slice.
pub fn parse_fasta_bytes(text: &[u8]) -> Result<Vec<Sequence>> {
    let mut sequences = Vec::new();
    let mut lines = text.split(|&b| b == b'\n').peekable();

    // Skip leading blank lines, then require a header.
    while matches!(lines.peek(), Some(line) if trim_cr(line).is_empty()) {
        lines.next();
    }
    match lines.peek() {
        Some(line) if line.first() == Some(&b'>') => {}
        _ => return Err(Error::MalformedFasta),
    }

    let mut name: Option<String> = None;
    let mut residues: Vec<Residue> = Vec::new();
    let mut flush = |name: &mut Option<String>, residues: &mut Vec<Residue>| -> Result<()> {
        if let Some(name) = name.take() {
            if residues.is_empty() {
                return Err(Error::EmptyRecord(name));
            }
            sequences.push(Sequence {
                name,
                residues: std::mem::take(residues),
            });
        }
        Ok(())
    };

    for line in lines {
        let line = trim_cr(line);
        if let Some(header) = line.strip_prefix(b">") {
            flush(&mut name, &mut residues)?;
            name = Some(String::from_utf8_lossy(header).into_owned());
        } else {
            for &byte in line {
                if byte.is_ascii_whitespace() {
                    continue;
                }
                match Residue::from_letter(byte) {
                    Some(residue) => residues.push(residue),
                    None => {
                        return Err(Error::InvalidResidue {
                            byte,
                            position: residues.len(),
                            record: name.clone(),
                        })
                    }
                }
            }
        }
    }
    flush(&mut name, &mut residues)?;
    Ok(sequences)
}

/// Write sequences as FASTA, 60 letters per line.
pub fn write_fasta(mut out: impl Write, sequences: &[Sequence]) -> std::io::Result<()> {
    for seq in sequences {
        writeln!(out, ">{}", seq.name())?;
        for chunk in seq.to_letters().chunks(60) {
            out.write_all(chunk)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

fn trim_cr(line: &[u8]) -> &[u8] {
    match line.last() {
        Some(b'\r') => &line[..line.len() - 1],
        _ => line,
    }
}
