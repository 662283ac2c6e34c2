//! The four alignment kernels.
//!
//! All kernels compute optimal local alignment scores with affine gap
//! penalties in linear space and return exactly the same integers:
//!
//! * [`sw_scalar`] — plain two-row dynamic programming; the reference the
//!   lane-parallel kernels are tested against.
//! * [`sw_inter_qp`] — inter-sequence kernel: one subject per lane,
//!   substitution scores gathered from a [`QueryProfile`] row.
//! * [`sw_inter_sp`] — inter-sequence kernel with a [`ScoreProfile`]
//!   rebuilt per block of profile positions; differs from `sw_inter_qp`
//!   only in score delivery.
//! * [`sw_intra_striped`] — intra-sequence kernel over a single subject,
//!   query laid out in striped segments across lanes.
//!
//! The inter-sequence kernels walk subject positions in tiles of `tile`
//! columns, keeping the tile's running state in registers so the row
//! buffers are read and written once per tile instead of once per column.

use crate::error::{Error, Result};
use crate::lanes;
use crate::scoring::{
    GapPenalties, QueryProfile, ScoreProfile, ScoringScheme, SequenceProfile, StripedQueryProfile,
    SubstitutionMatrix,
};

/// Largest supported lane width.
pub const MAX_LANES: usize = 16;

/// Lane widths the dispatchers accept.
pub const SUPPORTED_WIDTHS: [usize; 3] = [4, 8, 16];

#[repr(C, align(64))]
#[derive(Clone, Copy)]
struct AlignedBlock([i32; 16]);

const I32_PER_BLOCK: usize = 16;

/// Reusable per-worker DP row storage.
///
/// Holds three rows of `(capacity + 1)` lane groups: the H row and the
/// outer-axis gap row used by every kernel, plus a second H row for the
/// striped kernel's previous-column state. Rows start 64-byte aligned.
/// A `DpBuffers` value must never be shared between concurrent calls.
pub struct DpBuffers {
    blocks: Vec<AlignedBlock>,
    capacity: usize,
    lanes: usize,
    region: usize,
}

impl DpBuffers {
    /// Allocate zeroed buffers for queries up to `capacity` positions
    /// over `lanes` lanes.
    pub fn new(capacity: usize, lanes: usize) -> DpBuffers {
        let row = (capacity + 1) * lanes;
        let region = row.div_ceil(I32_PER_BLOCK) * I32_PER_BLOCK;
        let blocks = vec![AlignedBlock([0; I32_PER_BLOCK]); region * 3 / I32_PER_BLOCK];
        DpBuffers {
            blocks,
            capacity,
            lanes,
            region,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn lanes(&self) -> usize {
        self.lanes
    }

    fn as_i32_mut(&mut self) -> &mut [i32] {
        let len = self.blocks.len() * I32_PER_BLOCK;
        // SAFETY: AlignedBlock is repr(C) over [i32; 16] with size 64 equal
        // to its stride, so the Vec's storage is a contiguous run of i32.
        unsafe { std::slice::from_raw_parts_mut(self.blocks.as_mut_ptr().cast::<i32>(), len) }
    }

    /// The three rows, each `(capacity + 1) * lanes` scores.
    pub(crate) fn rows(&mut self) -> (&mut [i32], &mut [i32], &mut [i32]) {
        let row = (self.capacity + 1) * self.lanes;
        let region = self.region;
        let all = self.as_i32_mut();
        let (a, rest) = all.split_at_mut(region);
        let (b, c) = rest.split_at_mut(region);
        (&mut a[..row], &mut b[..row], &mut c[..row])
    }

    /// The H row: one lane group per query position plus the boundary group.
    pub fn h_row(&mut self) -> &mut [i32] {
        self.rows().0
    }

    /// The outer-axis gap row, same shape as the H row.
    pub fn gap_row(&mut self) -> &mut [i32] {
        self.rows().1
    }
}

/// One optimal local score per lane of an inter-sequence run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LaneScores {
    scores: [i32; MAX_LANES],
    width: usize,
}

impl LaneScores {
    fn from_lanes<const W: usize>(v: [i32; W]) -> LaneScores {
        let mut scores = [0i32; MAX_LANES];
        scores[..W].copy_from_slice(&v);
        LaneScores { scores, width: W }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.scores[..self.width]
    }

    pub fn lane(&self, lane: usize) -> i32 {
        self.as_slice()[lane]
    }
}

/// Reject query/matrix combinations whose scores could leave 32 bits.
pub fn check_overflow(query_len: usize, matrix: &SubstitutionMatrix) -> Result<()> {
    let bound = (query_len as i64 + 1) * i64::from(matrix.max_abs_score());
    if bound >= i32::MAX as i64 {
        return Err(Error::OverflowRisk {
            query_len,
            max_abs_score: matrix.max_abs_score(),
        });
    }
    Ok(())
}

/// Number of outer-loop passes a tiled kernel makes over `padded_len`
/// columns with tile depth `tile` (clamped to the column count).
pub fn tile_passes(padded_len: usize, tile: usize) -> usize {
    if padded_len == 0 {
        return 0;
    }
    padded_len.div_ceil(tile.max(1).min(padded_len))
}

/// Optimal local alignment score by plain dynamic programming.
///
/// `query` and `subject` are residue codes. Two rows of state, indexed by
/// query position; the query-axis gap state is carried down each subject
/// column in registers.
pub fn sw_scalar(query: &[u8], subject: &[u8], scheme: &ScoringScheme) -> Result<i32> {
    check_overflow(query.len(), &scheme.matrix)?;
    let gap_extend = scheme.gaps.extend;
    let gap_first = scheme.gaps.open_extend;
    let n = query.len();

    let mut h_row = vec![0i32; n + 1];
    let mut f_row = vec![0i32; n + 1];
    let query_rows: Vec<&[i32; 32]> = query.iter().map(|&q| scheme.matrix.row(q)).collect();
    let mut best = 0i32;

    for &subject_code in subject {
        let mut e = 0i32;
        let mut h_up = 0i32;
        let mut h_diag = 0i32;
        for i in 1..=n {
            let old_h = h_row[i];
            // Saturation only matters when both penalties are near i32::MAX;
            // the losing branch saturates, the max is unaffected.
            let f = f_row[i].saturating_sub(gap_extend).max(old_h - gap_first);
            e = e.saturating_sub(gap_extend).max(h_up - gap_first);
            let sub = query_rows[i - 1][subject_code as usize];
            let h = (h_diag + sub).max(e).max(f).max(0);
            best = best.max(h);
            h_row[i] = h;
            f_row[i] = f;
            h_diag = old_h;
            h_up = h;
        }
    }
    Ok(best)
}

/// Substitution-score delivery for the inter-sequence inner loop.
trait SubScoreSource<const W: usize> {
    /// Scores of query position `i` (0-based) against profile column `col`.
    fn scores(&self, i: usize, col: usize) -> [i32; W];
}

struct QueryProfileSource<'a> {
    qp: &'a QueryProfile,
    sp: &'a SequenceProfile,
}

impl<const W: usize> SubScoreSource<W> for QueryProfileSource<'_> {
    #[inline(always)]
    fn scores(&self, i: usize, col: usize) -> [i32; W] {
        lanes::gather(self.qp.row(i), self.sp.position_row(col))
    }
}

struct ScoreProfileSource<'a> {
    query: &'a [u8],
    profile: &'a ScoreProfile,
}

impl<const W: usize> SubScoreSource<W> for ScoreProfileSource<'_> {
    #[inline(always)]
    fn scores(&self, i: usize, col: usize) -> [i32; W] {
        self.profile
            .group(self.query[i], col - self.profile.start())
            .try_into()
            .unwrap()
    }
}

/// One tile of `t` subject columns starting at `col0`, swept once over the
/// whole query. Row buffers hold the last processed column's H and
/// outer-axis gap state; the tile's interior state lives in `e_acc` /
/// `h_prev` registers, so buffers are touched once per row per tile.
#[allow(clippy::too_many_arguments)]
fn tile_pass<const W: usize, S: SubScoreSource<W>>(
    src: &S,
    query_len: usize,
    col0: usize,
    t: usize,
    gap_extend: i32,
    gap_first: i32,
    h_row: &mut [i32],
    f_row: &mut [i32],
    e_acc: &mut [[i32; W]],
    h_prev: &mut [[i32; W]],
    vmax: &mut [i32; W],
) {
    for tt in 0..t {
        e_acc[tt] = lanes::zero();
        h_prev[tt] = lanes::zero();
    }
    // H(i-1, col0-1) tracker; row 0 is the all-zero boundary.
    let mut prev_left: [i32; W] = lanes::zero();

    for i in 1..=query_len {
        let old_left = lanes::load::<W>(h_row, i);
        let mut f = lanes::load::<W>(f_row, i);
        let mut h_left = old_left;
        let mut diag = prev_left;
        for tt in 0..t {
            let sub = src.scores(i - 1, col0 + tt);
            let e = lanes::max(
                lanes::sub_clamp(e_acc[tt], gap_extend),
                lanes::sub_clamp(h_prev[tt], gap_first),
            );
            f = lanes::max(
                lanes::sub_clamp(f, gap_extend),
                lanes::sub_clamp(h_left, gap_first),
            );
            let mut h = lanes::add(diag, sub);
            h = lanes::max(h, e);
            h = lanes::max(h, f);
            h = lanes::max(h, lanes::zero());
            *vmax = lanes::max(*vmax, h);
            diag = h_prev[tt];
            h_prev[tt] = h;
            e_acc[tt] = e;
            h_left = h;
        }
        lanes::store(h_row, i, h_left);
        lanes::store(f_row, i, f);
        prev_left = old_left;
    }
}

fn inter_common_checks(
    query_len: usize,
    sp: &SequenceProfile,
    buf: &DpBuffers,
) -> Result<()> {
    if sp.width() != buf.lanes() {
        return Err(Error::LaneMismatch {
            buffer: buf.lanes(),
            profile: sp.width(),
        });
    }
    if query_len > buf.capacity() {
        return Err(Error::CapacityExceeded {
            needed: query_len,
            capacity: buf.capacity(),
        });
    }
    Ok(())
}

/// Inter-sequence kernel with query-profile score delivery: aligns the
/// query against every lane of `sp` simultaneously. Lanes holding only
/// padding score 0.
pub fn sw_inter_qp(
    qp: &QueryProfile,
    sp: &SequenceProfile,
    gaps: GapPenalties,
    buf: &mut DpBuffers,
    tile: usize,
) -> Result<LaneScores> {
    inter_common_checks(qp.query_len(), sp, buf)?;
    match sp.width() {
        4 => Ok(inter_qp_width::<4>(qp, sp, gaps, buf, tile)),
        8 => Ok(inter_qp_width::<8>(qp, sp, gaps, buf, tile)),
        16 => Ok(inter_qp_width::<16>(qp, sp, gaps, buf, tile)),
        w => Err(Error::UnsupportedWidth(w)),
    }
}

fn inter_qp_width<const W: usize>(
    qp: &QueryProfile,
    sp: &SequenceProfile,
    gaps: GapPenalties,
    buf: &mut DpBuffers,
    tile: usize,
) -> LaneScores {
    let n = qp.query_len();
    let l = sp.padded_len();
    let tile = tile.max(1).min(l);
    let (h_row, f_row, _) = buf.rows();
    h_row[..(n + 1) * W].fill(0);
    f_row[..(n + 1) * W].fill(0);

    let mut e_acc = vec![[0i32; W]; tile];
    let mut h_prev = vec![[0i32; W]; tile];
    let mut vmax = lanes::zero::<W>();
    let src = QueryProfileSource { qp, sp };

    let mut col = 0;
    while col < l {
        let t = tile.min(l - col);
        tile_pass(
            &src,
            n,
            col,
            t,
            gaps.extend,
            gaps.open_extend,
            h_row,
            f_row,
            &mut e_acc,
            &mut h_prev,
            &mut vmax,
        );
        col += t;
    }
    LaneScores::from_lanes(vmax)
}

/// Inter-sequence kernel with score-profile delivery. Scores equal
/// [`sw_inter_qp`] exactly; before each block of `block` profile positions
/// the substitution scores are materialized per residue code, and the
/// inner loop indexes them by the query residue.
pub fn sw_inter_sp(
    query: &[u8],
    scheme: &ScoringScheme,
    sp: &SequenceProfile,
    buf: &mut DpBuffers,
    block: usize,
    tile: usize,
) -> Result<LaneScores> {
    inter_common_checks(query.len(), sp, buf)?;
    if block == 0 || !sp.padded_len().is_multiple_of(block) {
        return Err(Error::BlockMismatch {
            block,
            padded_len: sp.padded_len(),
        });
    }
    match sp.width() {
        4 => inter_sp_width::<4>(query, scheme, sp, buf, block, tile),
        8 => inter_sp_width::<8>(query, scheme, sp, buf, block, tile),
        16 => inter_sp_width::<16>(query, scheme, sp, buf, block, tile),
        w => Err(Error::UnsupportedWidth(w)),
    }
}

fn inter_sp_width<const W: usize>(
    query: &[u8],
    scheme: &ScoringScheme,
    sp: &SequenceProfile,
    buf: &mut DpBuffers,
    block: usize,
    tile: usize,
) -> Result<LaneScores> {
    let n = query.len();
    let l = sp.padded_len();
    let tile = tile.max(1).min(block);
    let (h_row, f_row, _) = buf.rows();
    h_row[..(n + 1) * W].fill(0);
    f_row[..(n + 1) * W].fill(0);

    let mut e_acc = vec![[0i32; W]; tile];
    let mut h_prev = vec![[0i32; W]; tile];
    let mut vmax = lanes::zero::<W>();
    let mut profile = ScoreProfile::build(&scheme.matrix, sp, 0, block)?;

    let mut block_start = 0;
    while block_start < l {
        profile.fill(&scheme.matrix, sp, block_start)?;
        let src = ScoreProfileSource { query, profile: &profile };
        let mut col = block_start;
        while col < block_start + block {
            let t = tile.min(block_start + block - col);
            tile_pass(
                &src,
                n,
                col,
                t,
                scheme.gaps.extend,
                scheme.gaps.open_extend,
                h_row,
                f_row,
                &mut e_acc,
                &mut h_prev,
                &mut vmax,
            );
            col += t;
        }
        block_start += block;
    }
    Ok(LaneScores::from_lanes(vmax))
}

/// Intra-sequence kernel: one subject, query striped across lanes.
///
/// Per subject residue, one pass over the stripe groups updates H and the
/// subject-axis gap state; the query-axis gap carry propagates within
/// lanes and is corrected across segment boundaries afterwards.
pub fn sw_intra_striped(
    sqp: &StripedQueryProfile,
    subject: &[u8],
    gaps: GapPenalties,
    buf: &mut DpBuffers,
) -> Result<i32> {
    if sqp.width() != buf.lanes() {
        return Err(Error::LaneMismatch {
            buffer: buf.lanes(),
            profile: sqp.width(),
        });
    }
    if sqp.padded_query_len() > buf.capacity() {
        return Err(Error::CapacityExceeded {
            needed: sqp.padded_query_len(),
            capacity: buf.capacity(),
        });
    }
    match sqp.width() {
        4 => Ok(intra_width::<4>(sqp, subject, gaps, buf)),
        8 => Ok(intra_width::<8>(sqp, subject, gaps, buf)),
        16 => Ok(intra_width::<16>(sqp, subject, gaps, buf)),
        w => Err(Error::UnsupportedWidth(w)),
    }
}

fn intra_width<const W: usize>(
    sqp: &StripedQueryProfile,
    subject: &[u8],
    gaps: GapPenalties,
    buf: &mut DpBuffers,
) -> i32 {
    let s = sqp.segment_len();
    let used = s * W;
    let gap_extend = gaps.extend;
    let gap_first = gaps.open_extend;

    let (row_a, e_buf, row_b) = buf.rows();
    let mut h_store: &mut [i32] = &mut row_a[..used];
    let mut h_load: &mut [i32] = &mut row_b[..used];
    let e_buf: &mut [i32] = &mut e_buf[..used];
    h_store.fill(0);
    h_load.fill(0);
    e_buf.fill(0);

    let mut vmax = lanes::zero::<W>();

    for &subject_code in subject {
        std::mem::swap(&mut h_store, &mut h_load);
        // Diagonal input for group 0: the previous column's last group,
        // carried across the segment boundary by a one-lane shift.
        let mut h = lanes::shift_in_zero(lanes::load::<W>(h_load, s - 1));
        let mut f = lanes::zero::<W>();

        for i in 0..s {
            let sub: [i32; W] = sqp.table_group(subject_code, i).try_into().unwrap();
            h = lanes::add(h, sub);
            let e = lanes::load::<W>(e_buf, i);
            h = lanes::max(h, e);
            h = lanes::max(h, f);
            h = lanes::max(h, lanes::zero());
            vmax = lanes::max(vmax, h);
            lanes::store(h_store, i, h);

            let h_open = lanes::sub_clamp(h, gap_first);
            lanes::store(e_buf, i, lanes::max(lanes::sub_clamp(e, gap_extend), h_open));
            f = lanes::max(lanes::sub_clamp(f, gap_extend), h_open);
            h = lanes::load::<W>(h_load, i);
        }

        // Lazy correction: rotate the cross-segment carry one lane per pass
        // and re-sweep until no stored H can increase. The carry decays by
        // the extension penalty per group; contributions of cells this loop
        // raises are dominated by the decayed carry itself (first-gap cost
        // is at least the extension cost), and cells it does not raise had
        // their contribution propagated by the main pass. The exit below
        // therefore requires both: no lane raised, and the decayed carry at
        // or below every lane's H minus the first-gap cost. W rotations
        // bound the loop; the carry can cross at most W-1 boundaries.
        'lazy: for _ in 0..W {
            f = lanes::shift_in_zero(f);
            for i in 0..s {
                let h_old = lanes::load::<W>(h_store, i);
                let raised = lanes::any_gt(f, h_old);
                let h_new = lanes::max(h_old, f);
                if raised {
                    lanes::store(h_store, i, h_new);
                    vmax = lanes::max(vmax, h_new);
                    let h_open = lanes::sub_clamp(h_new, gap_first);
                    lanes::store(e_buf, i, lanes::max(lanes::load::<W>(e_buf, i), h_open));
                }
                f = lanes::sub_clamp(f, gap_extend);
                if !raised && !lanes::any_gt(f, lanes::sub_clamp(h_new, gap_first)) {
                    break 'lazy;
                }
            }
        }
    }
    lanes::horizontal_max(vmax)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::Sequence;
    use crate::scoring::SubstitutionMatrix;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn scheme(open: u32, extend: u32) -> ScoringScheme {
        ScoringScheme::new(
            SubstitutionMatrix::builtin("blosum62").unwrap(),
            GapPenalties::new(open, extend),
        )
    }

    fn seq(letters: &[u8]) -> Sequence {
        Sequence::from_text("t", letters).unwrap()
    }

    fn random_codes(rng: &mut impl Rng, max_len: usize) -> Vec<u8> {
        let len = rng.gen_range(1..=max_len);
        (0..len).map(|_| rng.gen_range(0..24u8)).collect()
    }

    #[test]
    fn scalar_pinned_values() {
        let s = scheme(10, 2);
        assert_eq!(sw_scalar(seq(b"A").codes(), seq(b"A").codes(), &s).unwrap(), 4);
        assert_eq!(sw_scalar(seq(b"A").codes(), seq(b"P").codes(), &s).unwrap(), 0);
        assert_eq!(
            sw_scalar(seq(b"AAAA").codes(), seq(b"AAAA").codes(), &s).unwrap(),
            16
        );
    }

    #[test]
    fn scalar_symmetry_on_symmetric_matrix() {
        let s = scheme(10, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = random_codes(&mut rng, 60);
            let b = random_codes(&mut rng, 60);
            assert_eq!(
                sw_scalar(&a, &b, &s).unwrap(),
                sw_scalar(&b, &a, &s).unwrap()
            );
        }
    }

    #[test]
    fn overflow_guard_triggers() {
        let huge = SubstitutionMatrix::from_fn("huge", |_, _| 1 << 30);
        let s = ScoringScheme::new(huge, GapPenalties::new(10, 2));
        assert!(matches!(
            sw_scalar(&[0, 0, 0, 0], &[0], &s),
            Err(Error::OverflowRisk { .. })
        ));
    }

    #[test]
    fn buffers_shape_and_alignment() {
        let mut buf = DpBuffers::new(100, 16);
        assert_eq!(buf.h_row().len(), 101 * 16);
        assert_eq!(buf.gap_row().len(), 101 * 16);
        let (a, b, c) = buf.rows();
        assert_eq!(a.as_ptr() as usize % 64, 0);
        assert_eq!(b.as_ptr() as usize % 64, 0);
        assert_eq!(c.as_ptr() as usize % 64, 0);
        assert!(a.iter().all(|&x| x == 0));
    }

    #[test]
    fn tile_pass_counts() {
        assert_eq!(tile_passes(8, 4), 2);
        assert_eq!(tile_passes(8, 16), 1); // clamped to the column count
        assert_eq!(tile_passes(10, 4), 3);
        assert_eq!(tile_passes(0, 4), 0);
    }

    #[test]
    fn inter_qp_identical_copies_match_scalar() {
        let s = scheme(10, 2);
        let query = seq(b"MKVLAT");
        let subject = seq(b"MKVANT");
        let expected = sw_scalar(query.codes(), subject.codes(), &s).unwrap();

        let members: Vec<&[u8]> = (0..16).map(|_| subject.codes()).collect();
        let sp = SequenceProfile::build(&members, 16, 0).unwrap();
        let qp = QueryProfile::build(&query, &s.matrix);
        let mut buf = DpBuffers::new(query.len(), 16);
        let scores = sw_inter_qp(&qp, &sp, s.gaps, &mut buf, 4).unwrap();
        assert!(scores.as_slice().iter().all(|&x| x == expected));
    }

    #[test]
    fn inter_qp_single_real_lane() {
        let s = scheme(10, 2);
        let query = seq(b"WYV");
        let subject = seq(b"WYV");
        let expected = sw_scalar(query.codes(), subject.codes(), &s).unwrap();

        let sp = SequenceProfile::build(&[subject.codes()], 16, 0).unwrap();
        let qp = QueryProfile::build(&query, &s.matrix);
        let mut buf = DpBuffers::new(query.len(), 16);
        let scores = sw_inter_qp(&qp, &sp, s.gaps, &mut buf, 4).unwrap();
        assert_eq!(scores.lane(0), expected);
        assert!(scores.as_slice()[1..].iter().all(|&x| x == 0));
    }

    #[test]
    fn inter_kernels_match_scalar_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for (open, extend) in [(10u32, 2u32), (11, 1), (0, 0)] {
            let s = scheme(open, extend);
            for _ in 0..20 {
                let query = random_codes(&mut rng, 50);
                let members: Vec<Vec<u8>> = (0..rng.gen_range(1..=16))
                    .map(|_| random_codes(&mut rng, 50))
                    .collect();
                let refs: Vec<&[u8]> = members.iter().map(|m| m.as_slice()).collect();
                let sp = SequenceProfile::build(&refs, 16, 0).unwrap();
                let q = Sequence::from_residues(
                    "q",
                    query.iter().map(|&c| crate::seq::Residue::from_code(c)).collect(),
                )
                .unwrap();
                let qp = QueryProfile::build(&q, &s.matrix);
                let mut buf = DpBuffers::new(query.len(), 16);

                let qp_scores = sw_inter_qp(&qp, &sp, s.gaps, &mut buf, 4).unwrap();
                let sp_scores = sw_inter_sp(&query, &s, &sp, &mut buf, 8, 4).unwrap();
                assert_eq!(qp_scores, sp_scores);
                for (k, member) in members.iter().enumerate() {
                    let expected = sw_scalar(&query, member, &s).unwrap();
                    assert_eq!(qp_scores.lane(k), expected, "lane {k}");
                }
                for k in members.len()..16 {
                    assert_eq!(qp_scores.lane(k), 0);
                }
            }
        }
    }

    #[test]
    fn inter_sp_block_and_tile_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = scheme(10, 2);
        for _ in 0..10 {
            let query = random_codes(&mut rng, 40);
            let members: Vec<Vec<u8>> = (0..8)
                .map(|_| random_codes(&mut rng, 40))
                .collect();
            let refs: Vec<&[u8]> = members.iter().map(|m| m.as_slice()).collect();
            let sp = SequenceProfile::build(&refs, 8, 0).unwrap();
            let mut buf = DpBuffers::new(query.len(), 8);

            let baseline = sw_inter_sp(&query, &s, &sp, &mut buf, 8, 1).unwrap();
            for block in [4usize, 8] {
                for tile in [1usize, 2, 4, 7] {
                    let got = sw_inter_sp(&query, &s, &sp, &mut buf, block, tile).unwrap();
                    assert_eq!(got, baseline, "block {block} tile {tile}");
                }
            }
            // Tile larger than the padded length clamps to a single pass.
            let got = sw_inter_sp(&query, &s, &sp, &mut buf, sp.padded_len(), 1000).unwrap();
            assert_eq!(got, baseline);
        }
    }

    #[test]
    fn inter_sp_rejects_non_dividing_block() {
        let s = scheme(10, 2);
        let member = vec![0u8; 10];
        let sp = SequenceProfile::build(&[&member], 4, 0).unwrap();
        let mut buf = DpBuffers::new(4, 4);
        assert!(matches!(
            sw_inter_sp(&[0, 1, 2, 3], &s, &sp, &mut buf, 7, 1),
            Err(Error::BlockMismatch { .. })
        ));
    }

    #[test]
    fn striped_matches_scalar_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for (open, extend) in [(10u32, 2u32), (11, 1), (0, 0), (0, 3)] {
            let s = scheme(open, extend);
            for _ in 0..30 {
                let query_codes = random_codes(&mut rng, 80);
                let subject = random_codes(&mut rng, 80);
                let q = Sequence::from_residues(
                    "q",
                    query_codes
                        .iter()
                        .map(|&c| crate::seq::Residue::from_code(c))
                        .collect(),
                )
                .unwrap();
                let expected = sw_scalar(&query_codes, &subject, &s).unwrap();
                for width in SUPPORTED_WIDTHS {
                    let sqp = StripedQueryProfile::build(&q, &s.matrix, width);
                    let mut buf = DpBuffers::new(sqp.padded_query_len(), width);
                    let got = sw_intra_striped(&sqp, &subject, s.gaps, &mut buf).unwrap();
                    assert_eq!(got, expected, "open {open} extend {extend} width {width}");
                }
            }
        }
    }

    #[test]
    fn striped_degenerate_single_group() {
        let s = scheme(10, 2);
        let q = seq(b"ARNDCQEGHILKMFPS");
        assert_eq!(q.len(), 16);
        let subject = seq(b"ARNDAAQEGHILKMFPS");
        let sqp = StripedQueryProfile::build(&q, &s.matrix, 16);
        assert_eq!(sqp.segment_len(), 1);
        let mut buf = DpBuffers::new(16, 16);
        let got = sw_intra_striped(&sqp, subject.codes(), s.gaps, &mut buf).unwrap();
        assert_eq!(got, sw_scalar(q.codes(), subject.codes(), &s).unwrap());
    }

    #[test]
    fn dummy_suffix_never_changes_scores() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = scheme(10, 2);
        for _ in 0..20 {
            let query_codes = random_codes(&mut rng, 40);
            let subject = random_codes(&mut rng, 40);
            let q = Sequence::from_residues(
                "q",
                query_codes
                    .iter()
                    .map(|&c| crate::seq::Residue::from_code(c))
                    .collect(),
            )
            .unwrap();

            // Striped path: extra query padding beyond the minimal roundup.
            let base = StripedQueryProfile::build(&q, &s.matrix, 8);
            let mut buf = DpBuffers::new(base.padded_query_len() + 32, 8);
            let expected = sw_intra_striped(&base, &subject, s.gaps, &mut buf).unwrap();
            let extra = rng.gen_range(1..=31);
            let padded =
                StripedQueryProfile::build_padded(&q, &s.matrix, 8, q.len() + extra);
            let got = sw_intra_striped(&padded, &subject, s.gaps, &mut buf).unwrap();
            assert_eq!(got, expected);

            // Inter path: subject profile padded past its minimal length.
            let sp = SequenceProfile::build(&[&subject], 4, 0).unwrap();
            let sp_padded =
                SequenceProfile::build_padded(&[&subject], 4, 0, subject.len() + extra).unwrap();
            assert!(sp_padded.padded_len() >= sp.padded_len());
            let qp = QueryProfile::build(&q, &s.matrix);
            let mut buf4 = DpBuffers::new(q.len(), 4);
            let a = sw_inter_qp(&qp, &sp, s.gaps, &mut buf4, 4).unwrap();
            let b = sw_inter_qp(&qp, &sp_padded, s.gaps, &mut buf4, 4).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn width_regrouping_is_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let s = scheme(10, 2);
        let query_codes = random_codes(&mut rng, 33);
        let q = Sequence::from_residues(
            "q",
            query_codes
                .iter()
                .map(|&c| crate::seq::Residue::from_code(c))
                .collect(),
        )
        .unwrap();
        let qp = QueryProfile::build(&q, &s.matrix);
        let subjects: Vec<Vec<u8>> = (0..16)
            .map(|_| random_codes(&mut rng, 50))
            .collect();

        let mut by_width: Vec<Vec<i32>> = Vec::new();
        for width in SUPPORTED_WIDTHS {
            let mut buf = DpBuffers::new(q.len(), width);
            let mut all = Vec::new();
            for group in subjects.chunks(width) {
                let refs: Vec<&[u8]> = group.iter().map(|m| m.as_slice()).collect();
                let sp = SequenceProfile::build(&refs, width, 0).unwrap();
                let scores = sw_inter_qp(&qp, &sp, s.gaps, &mut buf, 4).unwrap();
                all.extend_from_slice(&scores.as_slice()[..group.len()]);
            }
            by_width.push(all);
        }
        assert_eq!(by_width[0], by_width[1]);
        assert_eq!(by_width[0], by_width[2]);
    }

    #[test]
    fn all_nonpositive_matrix_scores_zero() {
        let matrix = SubstitutionMatrix::from_fn("neg", |a, b| -1 - ((a * 7 + b) % 5) as i32);
        let s = ScoringScheme::new(matrix, GapPenalties::new(3, 1));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let query_codes = random_codes(&mut rng, 30);
            let subject = random_codes(&mut rng, 30);
            let q = Sequence::from_residues(
                "q",
                query_codes
                    .iter()
                    .map(|&c| crate::seq::Residue::from_code(c))
                    .collect(),
            )
            .unwrap();
            assert_eq!(sw_scalar(&query_codes, &subject, &s).unwrap(), 0);
            let sp = SequenceProfile::build(&[&subject], 4, 0).unwrap();
            let qp = QueryProfile::build(&q, &s.matrix);
            let mut buf = DpBuffers::new(q.len(), 4);
            assert_eq!(
                sw_inter_qp(&qp, &sp, s.gaps, &mut buf, 4).unwrap().lane(0),
                0
            );
            let sqp = StripedQueryProfile::build(&q, &s.matrix, 4);
            let mut buf = DpBuffers::new(sqp.padded_query_len(), 4);
            assert_eq!(
                sw_intra_striped(&sqp, &subject, s.gaps, &mut buf).unwrap(),
                0
            );
        }
    }

    #[test]
    fn capacity_exceeded_reported() {
        let s = scheme(10, 2);
        let q = seq(b"ARNDCQEG");
        let qp = QueryProfile::build(&q, &s.matrix);
        let member = vec![0u8; 4];
        let sp = SequenceProfile::build(&[&member], 4, 0).unwrap();
        let mut buf = DpBuffers::new(4, 4);
        assert!(matches!(
            sw_inter_qp(&qp, &sp, s.gaps, &mut buf, 4),
            Err(Error::CapacityExceeded { .. })
        ));
    }
}
