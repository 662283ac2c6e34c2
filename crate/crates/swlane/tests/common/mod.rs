//! Shared helpers for the integration suites: an independent full-matrix
//! reference scorer and synthetic-data generators.

#![allow(dead_code)]

use rand::prelude::*;
use swlane::scoring::{GapPenalties, ScoringScheme, SubstitutionMatrix};
use swlane::seq::{Residue, Sequence};

/// Full-matrix evaluation of the affine-gap local alignment recurrence,
/// with all three matrices materialized. Deliberately the most literal
/// possible implementation: it shares no code or loop structure with the
/// kernels it checks.
pub fn sw_brute_force(query: &[u8], subject: &[u8], scheme: &ScoringScheme) -> i32 {
    let n = query.len();
    let m = subject.len();
    let alpha = scheme.gaps.extend;
    let beta = scheme.gaps.open_extend;

    let mut h = vec![vec![0i32; m + 1]; n + 1];
    let mut e = vec![vec![0i32; m + 1]; n + 1];
    let mut f = vec![vec![0i32; m + 1]; n + 1];

    let mut best = 0;
    for i in 1..=n {
        for j in 1..=m {
            e[i][j] = (e[i - 1][j] - alpha).max(h[i - 1][j] - beta);
            f[i][j] = (f[i][j - 1] - alpha).max(h[i][j - 1] - beta);
            let sub = scheme.matrix.score(
                Residue::from_code(query[i - 1]),
                Residue::from_code(subject[j - 1]),
            );
            h[i][j] = 0
                .max(h[i - 1][j - 1] + sub)
                .max(e[i][j])
                .max(f[i][j]);
            best = best.max(h[i][j]);
        }
    }
    best
}

/// The evaluation schemes the acceptance criteria draw from.
pub fn acceptance_schemes() -> Vec<ScoringScheme> {
    let mut schemes = Vec::new();
    for matrix in ["blosum62", "blosum50"] {
        for (open, extend) in [(10u32, 2u32), (11, 1), (0, 0)] {
            schemes.push(ScoringScheme::new(
                SubstitutionMatrix::builtin(matrix).unwrap(),
                GapPenalties::new(open, extend),
            ));
        }
    }
    schemes
}

pub fn random_codes(rng: &mut impl Rng, min_len: usize, max_len: usize) -> Vec<u8> {
    let len = rng.gen_range(min_len..=max_len);
    (0..len).map(|_| rng.gen_range(0..24u8)).collect()
}

pub fn random_sequence(rng: &mut impl Rng, name: &str, min_len: usize, max_len: usize) -> Sequence {
    let residues = random_codes(rng, min_len, max_len)
        .into_iter()
        .map(Residue::from_code)
        .collect();
    Sequence::from_residues(name, residues).unwrap()
}

/// A synthetic database of `n` random sequences with the given length range.
pub fn random_database(rng: &mut impl Rng, n: usize, min_len: usize, max_len: usize) -> Vec<Sequence> {
    (0..n)
        .map(|i| random_sequence(rng, &format!("synthetic|{i}"), min_len, max_len))
        .collect()
}

pub fn write_fasta_file(path: &std::path::Path, sequences: &[Sequence]) {
    let mut out = Vec::new();
    swlane::seq::write_fasta(&mut out, sequences).unwrap();
    std::fs::write(path, out).unwrap();
}

pub fn seq_from_codes(name: &str, codes: &[u8]) -> Sequence {
    Sequence::from_residues(name, codes.iter().map(|&c| Residue::from_code(c)).collect()).unwrap()
}
