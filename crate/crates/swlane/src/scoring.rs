//! Scoring schemes and substitution-score layouts.
//!
//! A [`SubstitutionMatrix`] is stored padded to 32×32 so any residue code,
//! including the padding sentinel, indexes it directly. Three derived
//! layouts feed the alignment kernels:
//!
//! * [`QueryProfile`] — one 32-slot row of scores per query position,
//!   indexed by subject residue code.
//! * [`ScoreProfile`] — per-block table of scores between every residue
//!   code and a window of sequence-profile positions, rebuilt per block.
//! * [`StripedQueryProfile`] — per-residue tables over the query in the
//!   striped segment layout used by the intra-sequence kernel.
//!
//! [`SequenceProfile`] interleaves a group of subject sequences
//! position-major so one row holds the residues of all lanes.

use crate::error::{Error, Result};
use crate::seq::{Residue, Sequence, ALPHABET, ALPHABET_LEN, MATRIX_DIM};

/// Affine gap penalties as the recurrence consumes them.
///
/// A gap of length `k` costs `open + k·extend`, i.e. `open_extend` for its
/// first residue and `extend` for each further one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapPenalties {
    /// Cost of extending a gap by one residue (α).
    pub extend: i32,
    /// Cost of a gap's first residue, open plus extend (β).
    pub open_extend: i32,
}

impl GapPenalties {
    /// Build from the conventional (open, extend) pair.
    pub fn new(open: u32, extend: u32) -> GapPenalties {
        let open_extend = u64::from(open) + u64::from(extend);
        assert!(
            open_extend <= i32::MAX as u64,
            "gap penalties exceed 32-bit range"
        );
        GapPenalties {
            extend: extend as i32,
            open_extend: open_extend as i32,
        }
    }
}

/// A substitution matrix padded to 32×32.
///
/// Rows and columns 24..=31 (the padding sentinel and reserved codes) are
/// all zero, so profile padding never contributes to a score.
#[derive(Clone, PartialEq, Eq)]
pub struct SubstitutionMatrix {
    name: String,
    scores: [[i32; MATRIX_DIM]; MATRIX_DIM],
    max_abs: i32,
}

impl std::fmt::Debug for SubstitutionMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SubstitutionMatrix")
            .field("name", &self.name)
            .field("max_abs", &self.max_abs)
            .finish_non_exhaustive()
    }
}

const BLOSUM62_TEXT: &str = include_str!("matrices/blosum62.txt");
const BLOSUM50_TEXT: &str = include_str!("matrices/blosum50.txt");
const PAM250_TEXT: &str = include_str!("matrices/pam250.txt");

impl SubstitutionMatrix {
    /// Look up a built-in matrix by name (case-insensitive).
    pub fn builtin(name: &str) -> Result<SubstitutionMatrix> {
        let text = match name.to_ascii_lowercase().as_str() {
            "blosum62" => BLOSUM62_TEXT,
            "blosum50" => BLOSUM50_TEXT,
            "pam250" => PAM250_TEXT,
            _ => return Err(Error::UnknownMatrix(name.to_string())),
        };
        let mut matrix = SubstitutionMatrix::from_text(text)?;
        matrix.name = name.to_ascii_lowercase();
        Ok(matrix)
    }

    /// Names accepted by [`SubstitutionMatrix::builtin`].
    pub const BUILTIN_NAMES: [&'static str; 3] = ["blosum62", "blosum50", "pam250"];

    /// Parse matrix text: a header row of single-letter labels followed by
    /// one labeled score row per letter. `#` comments are ignored.
    pub fn from_text(text: &str) -> Result<SubstitutionMatrix> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));

        let header = lines.next().ok_or_else(|| malformed("empty input"))?;
        let columns: Vec<u8> = header
            .split_ascii_whitespace()
            .map(strict_label)
            .collect::<Result<_>>()?;
        if columns.is_empty() {
            return Err(malformed("header row has no labels"));
        }
        let mut seen_cols = [false; ALPHABET_LEN];
        for &c in &columns {
            if std::mem::replace(&mut seen_cols[c as usize], true) {
                return Err(malformed("duplicate column label"));
            }
        }

        let mut scores = [[0i32; MATRIX_DIM]; MATRIX_DIM];
        let mut seen_rows = [false; ALPHABET_LEN];
        let mut row_count = 0usize;
        for line in lines {
            let mut fields = line.split_ascii_whitespace();
            let label = strict_label(fields.next().ok_or_else(|| malformed("blank row"))?)?;
            if std::mem::replace(&mut seen_rows[label as usize], true) {
                return Err(malformed("duplicate row label"));
            }
            row_count += 1;
            let mut filled = 0usize;
            for (&col, field) in columns.iter().zip(&mut fields) {
                let value: i32 = field
                    .parse()
                    .map_err(|_| malformed(&format!("bad score value '{field}'")))?;
                scores[label as usize][col as usize] = value;
                filled += 1;
            }
            if filled != columns.len() || fields.next().is_some() {
                return Err(malformed(&format!(
                    "row '{}' does not have exactly {} scores",
                    ALPHABET[label as usize] as char,
                    columns.len()
                )));
            }
        }
        if row_count != columns.len() || seen_rows != seen_cols {
            return Err(malformed("row labels do not match column labels"));
        }

        let max_abs = scores
            .iter()
            .flatten()
            .map(|s| s.abs())
            .max()
            .unwrap_or(0);
        Ok(SubstitutionMatrix {
            name: "custom".to_string(),
            scores,
            max_abs,
        })
    }

    /// Render in the same labeled square text format `from_text` accepts.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("  ");
        for &letter in ALPHABET.iter() {
            out.push_str(&format!(" {:>3}", letter as char));
        }
        out.push('\n');
        for (row, &letter) in ALPHABET.iter().enumerate() {
            out.push_str(&format!("{:<2}", letter as char));
            for col in 0..ALPHABET_LEN {
                out.push_str(&format!(" {:>3}", self.scores[row][col]));
            }
            out.push('\n');
        }
        out
    }

    pub fn with_name(mut self, name: impl Into<String>) -> SubstitutionMatrix {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Largest absolute score in the matrix; used by the overflow guard.
    pub fn max_abs_score(&self) -> i32 {
        self.max_abs
    }

    #[inline]
    pub fn score(&self, a: Residue, b: Residue) -> i32 {
        self.scores[a.index()][b.index()]
    }

    #[inline]
    pub(crate) fn row(&self, code: u8) -> &[i32; MATRIX_DIM] {
        &self.scores[code as usize]
    }

    /// Symmetry over the real residue codes.
    pub fn is_symmetric(&self) -> bool {
        (0..ALPHABET_LEN).all(|a| (0..a).all(|b| self.scores[a][b] == self.scores[b][a]))
    }

    /// Build directly from a closure over real residue code pairs.
    /// Padding rows and columns stay zero.
    pub fn from_fn(name: impl Into<String>, f: impl Fn(usize, usize) -> i32) -> SubstitutionMatrix {
        let mut scores = [[0i32; MATRIX_DIM]; MATRIX_DIM];
        for (a, row) in scores.iter_mut().enumerate().take(ALPHABET_LEN) {
            for (b, slot) in row.iter_mut().enumerate().take(ALPHABET_LEN) {
                *slot = f(a, b);
            }
        }
        let max_abs = scores.iter().flatten().map(|s| s.abs()).max().unwrap_or(0);
        SubstitutionMatrix {
            name: name.into(),
            scores,
            max_abs,
        }
    }
}

fn strict_label(field: &str) -> Result<u8> {
    let bytes = field.as_bytes();
    if bytes.len() != 1 {
        return Err(malformed(&format!("label '{field}' is not a single letter")));
    }
    let upper = bytes[0].to_ascii_uppercase();
    match ALPHABET.iter().position(|&a| a == upper) {
        Some(code) => Ok(code as u8),
        None => Err(malformed(&format!(
            "label '{}' is not in the residue alphabet",
            bytes[0] as char
        ))),
    }
}

fn malformed(detail: &str) -> Error {
    Error::MalformedMatrix(detail.to_string())
}

/// A substitution matrix paired with gap penalties.
#[derive(Debug, Clone)]
pub struct ScoringScheme {
    pub matrix: SubstitutionMatrix,
    pub gaps: GapPenalties,
}

impl ScoringScheme {
    pub fn new(matrix: SubstitutionMatrix, gaps: GapPenalties) -> ScoringScheme {
        ScoringScheme { matrix, gaps }
    }

    /// The default evaluation scheme: BLOSUM62 with gap open 10, extend 2.
    pub fn blosum62_default() -> ScoringScheme {
        ScoringScheme {
            matrix: SubstitutionMatrix::builtin("blosum62").expect("embedded matrix"),
            gaps: GapPenalties::new(10, 2),
        }
    }

    #[inline]
    pub fn score(&self, a: Residue, b: Residue) -> i32 {
        self.matrix.score(a, b)
    }
}

/// Sequential-layout query profile: one 32-slot score row per query
/// position, indexed by subject residue code.
#[derive(Debug, Clone)]
pub struct QueryProfile {
    query_len: usize,
    rows: Vec<[i32; MATRIX_DIM]>,
}

impl QueryProfile {
    pub fn build(query: &Sequence, matrix: &SubstitutionMatrix) -> QueryProfile {
        let rows = query.residues().iter().map(|&r| *matrix.row(r.code())).collect();
        QueryProfile {
            query_len: query.len(),
            rows,
        }
    }

    pub fn query_len(&self) -> usize {
        self.query_len
    }

    #[inline]
    pub fn row(&self, position: usize) -> &[i32; MATRIX_DIM] {
        &self.rows[position]
    }
}

/// Round up to the next multiple of `to` (which must be non-zero).
pub(crate) fn round_up(len: usize, to: usize) -> usize {
    len.div_ceil(to) * to
}

/// Positions of a sequence profile are padded to a multiple of this.
pub const PROFILE_LEN_STEP: usize = 8;

/// A group of subject sequences interleaved position-major across lanes.
///
/// Row `p` holds the residue of every member at position `p`; entries past
/// a member's real length, and whole lanes past the member count, are the
/// padding sentinel.
#[derive(Debug, Clone)]
pub struct SequenceProfile {
    width: usize,
    padded_len: usize,
    lanes: Vec<Option<u32>>,
    lane_lengths: Vec<usize>,
    data: Vec<u8>,
}

impl SequenceProfile {
    /// Interleave `members` (already-encoded residue codes) over `width`
    /// lanes. Lane `k` is attributed to source index `base_index + k`.
    pub fn build(members: &[&[u8]], width: usize, base_index: u32) -> Result<SequenceProfile> {
        SequenceProfile::build_padded(members, width, base_index, 0)
    }

    /// As [`SequenceProfile::build`] but padded to at least `min_len`
    /// positions. Extra padding rows are all-sentinel and score zero.
    pub fn build_padded(
        members: &[&[u8]],
        width: usize,
        base_index: u32,
        min_len: usize,
    ) -> Result<SequenceProfile> {
        if members.is_empty() {
            return Err(Error::EmptyProfile);
        }
        assert!(
            members.len() <= width,
            "profile holds at most {width} members"
        );
        let max_len = members.iter().map(|m| m.len()).max().unwrap_or(0);
        let padded_len = round_up(max_len.max(min_len).max(1), PROFILE_LEN_STEP);

        let mut data = vec![Residue::DUMMY.code(); padded_len * width];
        for (lane, member) in members.iter().enumerate() {
            debug_assert!(member.iter().all(|&c| (c as usize) < ALPHABET_LEN));
            for (p, &code) in member.iter().enumerate() {
                data[p * width + lane] = code;
            }
        }
        let lanes = (0..width)
            .map(|k| (k < members.len()).then(|| base_index + k as u32))
            .collect();
        let lane_lengths = (0..width)
            .map(|k| members.get(k).map_or(0, |m| m.len()))
            .collect();
        Ok(SequenceProfile {
            width,
            padded_len,
            lanes,
            lane_lengths,
            data,
        })
    }

    pub fn from_sequences(
        members: &[&Sequence],
        width: usize,
        base_index: u32,
    ) -> Result<SequenceProfile> {
        let coded: Vec<&[u8]> = members.iter().map(|s| s.codes()).collect();
        SequenceProfile::build(&coded, width, base_index)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Padded position count; always a multiple of [`PROFILE_LEN_STEP`].
    pub fn padded_len(&self) -> usize {
        self.padded_len
    }

    pub fn member_count(&self) -> usize {
        self.lanes.iter().filter(|l| l.is_some()).count()
    }

    /// Source index of the sequence in lane `k`, if the lane is occupied.
    pub fn lane_source(&self, lane: usize) -> Option<u32> {
        self.lanes[lane]
    }

    /// Real (unpadded) length of the member in lane `k`; 0 if absent.
    pub fn lane_len(&self, lane: usize) -> usize {
        self.lane_lengths[lane]
    }

    /// The residue codes of all lanes at position `p`.
    #[inline]
    pub fn position_row(&self, p: usize) -> &[u8] {
        &self.data[p * self.width..(p + 1) * self.width]
    }

    #[inline]
    pub fn residue(&self, p: usize, lane: usize) -> Residue {
        Residue::from_code(self.data[p * self.width + lane])
    }
}

/// Per-block substitution scores between every residue code and a window
/// of sequence-profile positions.
///
/// Valid only for the block it was filled for; the inter-sequence kernel
/// refills it for every block of positions.
#[derive(Debug, Clone)]
pub struct ScoreProfile {
    width: usize,
    block_len: usize,
    start: usize,
    scores: Vec<i32>,
}

impl ScoreProfile {
    pub fn build(
        matrix: &SubstitutionMatrix,
        profile: &SequenceProfile,
        start: usize,
        block_len: usize,
    ) -> Result<ScoreProfile> {
        let mut sp = ScoreProfile {
            width: profile.width(),
            block_len,
            start: 0,
            scores: vec![0; ALPHABET_LEN * block_len * profile.width()],
        };
        sp.fill(matrix, profile, start)?;
        Ok(sp)
    }

    /// Refill for the block starting at `start` without reallocating.
    pub fn fill(
        &mut self,
        matrix: &SubstitutionMatrix,
        profile: &SequenceProfile,
        start: usize,
    ) -> Result<()> {
        let block = self.block_len;
        if !start.is_multiple_of(block) || start + block > profile.padded_len() {
            return Err(Error::BlockOutOfRange {
                start,
                len: block,
                padded_len: profile.padded_len(),
            });
        }
        debug_assert_eq!(self.width, profile.width());
        self.start = start;
        let width = self.width;
        for code in 0..ALPHABET_LEN as u8 {
            let row = matrix.row(code);
            let base = code as usize * block * width;
            for n in 0..block {
                let residues = profile.position_row(start + n);
                let out = &mut self.scores[base + n * width..base + (n + 1) * width];
                for (slot, &subject) in out.iter_mut().zip(residues) {
                    *slot = row[subject as usize];
                }
            }
        }
        Ok(())
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// Score of residue `code` against every lane at block offset `n`.
    #[inline]
    pub fn group(&self, code: u8, n: usize) -> &[i32] {
        debug_assert!(n < self.block_len);
        let base = code as usize * self.block_len * self.width + n * self.width;
        &self.scores[base..base + self.width]
    }

    #[inline]
    pub fn entry(&self, code: u8, n: usize, lane: usize) -> i32 {
        self.group(code, n)[lane]
    }
}

/// Striped-layout query profile for the intra-sequence kernel.
///
/// The query is padded to a multiple of the lane width and split into
/// `width` segments of length `segment_len`; group `i`, lane `k` covers
/// query position `k·segment_len + i`. One table per residue code holds
/// the substitution scores in that layout.
#[derive(Debug, Clone)]
pub struct StripedQueryProfile {
    width: usize,
    query_len: usize,
    padded_query_len: usize,
    segment_len: usize,
    tables: Vec<i32>,
}

impl StripedQueryProfile {
    pub fn build(query: &Sequence, matrix: &SubstitutionMatrix, width: usize) -> StripedQueryProfile {
        StripedQueryProfile::build_padded(query, matrix, width, 0)
    }

    /// As [`StripedQueryProfile::build`] but padded to at least
    /// `min_padded` query positions (rounded up to the lane width).
    pub fn build_padded(
        query: &Sequence,
        matrix: &SubstitutionMatrix,
        width: usize,
        min_padded: usize,
    ) -> StripedQueryProfile {
        let query_len = query.len();
        let padded = round_up(query_len.max(min_padded).max(1), width);
        let segment_len = padded / width;
        let codes = query.codes();

        let mut tables = vec![0i32; ALPHABET_LEN * segment_len * width];
        for code in 0..ALPHABET_LEN as u8 {
            let base = code as usize * segment_len * width;
            for group in 0..segment_len {
                let out = &mut tables[base + group * width..base + (group + 1) * width];
                for (lane, slot) in out.iter_mut().enumerate() {
                    let position = lane * segment_len + group;
                    // Padded positions keep the sentinel's all-zero scores.
                    *slot = match codes.get(position) {
                        Some(&q) => matrix.row(q)[code as usize],
                        None => 0,
                    };
                }
            }
        }
        StripedQueryProfile {
            width,
            query_len,
            padded_query_len: padded,
            segment_len,
            tables,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn query_len(&self) -> usize {
        self.query_len
    }

    /// Padded query length; a multiple of the lane width.
    pub fn padded_query_len(&self) -> usize {
        self.padded_query_len
    }

    pub fn segment_len(&self) -> usize {
        self.segment_len
    }

    /// Scores of subject residue `code` against stripe group `group`.
    #[inline]
    pub fn table_group(&self, code: u8, group: usize) -> &[i32] {
        let base = code as usize * self.segment_len * self.width + group * self.width;
        &self.tables[base..base + self.width]
    }

    /// Reassemble the sequential score row for one real query position.
    pub fn destripe_row(&self, position: usize) -> [i32; ALPHABET_LEN] {
        assert!(position < self.query_len);
        let lane = position / self.segment_len;
        let group = position % self.segment_len;
        let mut row = [0i32; ALPHABET_LEN];
        for (code, slot) in row.iter_mut().enumerate() {
            *slot = self.table_group(code as u8, group)[lane];
        }
        row
    }
}
