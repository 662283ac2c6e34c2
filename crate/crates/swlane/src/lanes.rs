//! Width-generic integer lane operations.
//!
//! Lane groups are plain `[i32; W]` arrays; every helper is a fixed-width
//! loop the optimizer can vectorize. Widths are dispatched once at kernel
//! entry, so `W` is a compile-time constant inside the hot loops.

#[inline(always)]
pub(crate) fn zero<const W: usize>() -> [i32; W] {
    [0; W]
}

#[inline(always)]
pub(crate) fn load<const W: usize>(slice: &[i32], group: usize) -> [i32; W] {
    slice[group * W..(group + 1) * W].try_into().unwrap()
}

#[inline(always)]
pub(crate) fn store<const W: usize>(slice: &mut [i32], group: usize, v: [i32; W]) {
    slice[group * W..(group + 1) * W].copy_from_slice(&v);
}

#[inline(always)]
pub(crate) fn max<const W: usize>(a: [i32; W], b: [i32; W]) -> [i32; W] {
    let mut out = [0; W];
    for k in 0..W {
        out[k] = a[k].max(b[k]);
    }
    out
}

#[inline(always)]
pub(crate) fn add<const W: usize>(a: [i32; W], b: [i32; W]) -> [i32; W] {
    let mut out = [0; W];
    for k in 0..W {
        out[k] = a[k] + b[k];
    }
    out
}

/// `max(a - s, 0)` per lane; the clamp keeps all state non-negative.
#[inline(always)]
pub(crate) fn sub_clamp<const W: usize>(a: [i32; W], s: i32) -> [i32; W] {
    let mut out = [0; W];
    for k in 0..W {
        out[k] = (a[k] - s).max(0);
    }
    out
}

/// Substitution scores for one query position against a residue vector.
#[inline(always)]
pub(crate) fn gather<const W: usize>(row: &[i32; 32], residues: &[u8]) -> [i32; W] {
    let mut out = [0; W];
    for k in 0..W {
        out[k] = row[residues[k] as usize];
    }
    out
}

/// Move every value up one lane, inserting zero at lane 0. Carries the
/// cross-segment gap state of the striped layout from each segment's end
/// into the next segment's start.
#[inline(always)]
pub(crate) fn shift_in_zero<const W: usize>(a: [i32; W]) -> [i32; W] {
    let mut out = [0; W];
    out[1..W].copy_from_slice(&a[..W - 1]);
    out
}

#[inline(always)]
pub(crate) fn any_gt<const W: usize>(a: [i32; W], b: [i32; W]) -> bool {
    let mut any = false;
    for k in 0..W {
        any |= a[k] > b[k];
    }
    any
}

#[inline(always)]
pub(crate) fn horizontal_max<const W: usize>(a: [i32; W]) -> i32 {
    a.into_iter().fold(i32::MIN, i32::max)
}
