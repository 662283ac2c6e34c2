//! The search pipeline: profile construction, parallel alignment over a
//! worker pool, and ranked result emission.
//!
//! A search runs in four stages: (i) build whatever profile the kernel
//! mode needs, (ii) workers pull chunks of work items from a shared
//! scheduler and score them with their own reusable [`DpBuffers`],
//! (iii) all workers finish, (iv) every subject's score is merged, ranked
//! by score descending (ties by ascending subject index), and the top
//! results returned. Ranked output is a pure function of the inputs —
//! worker count, scheduling policy, chunk boundaries, lane width, block
//! size, and tile depth never change it.

use std::str::FromStr;
use std::sync::Mutex;
use std::time::Instant;

use crate::dbindex::{Chunk, DbIndex, WorkKind};
use crate::error::{Error, Result};
use crate::kernels::{
    self, check_overflow, DpBuffers, sw_inter_qp, sw_inter_sp, sw_intra_striped,
};
use crate::scoring::{
    round_up, QueryProfile, ScoringScheme, SequenceProfile, StripedQueryProfile,
};
use crate::seq::Sequence;

/// Which kernel carries out the alignments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Inter-sequence kernel, score-profile delivery.
    InterSp,
    /// Inter-sequence kernel, query-profile delivery.
    InterQp,
    /// Intra-sequence striped kernel.
    Intra,
}

impl SearchMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchMode::InterSp => "inter-sp",
            SearchMode::InterQp => "inter-qp",
            SearchMode::Intra => "intra",
        }
    }

    fn work_kind(self) -> WorkKind {
        match self {
            SearchMode::InterSp | SearchMode::InterQp => WorkKind::ProfileGroup,
            SearchMode::Intra => WorkKind::SingleSequence,
        }
    }
}

impl FromStr for SearchMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<SearchMode, String> {
        match s {
            "inter-sp" => Ok(SearchMode::InterSp),
            "inter-qp" => Ok(SearchMode::InterQp),
            "intra" => Ok(SearchMode::Intra),
            other => Err(format!(
                "unknown mode '{other}' (expected inter-sp, inter-qp, or intra)"
            )),
        }
    }
}

/// Loop scheduling policy for distributing work items over workers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchedulePolicy {
    /// Progressively smaller chunks: half the remaining work divided by
    /// the worker count, floored at the minimum chunk size.
    Guided,
    /// Fixed minimum-size chunks.
    Dynamic,
    /// The range pre-split into one contiguous span per worker.
    Static,
}

impl FromStr for SchedulePolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<SchedulePolicy, String> {
        match s {
            "guided" => Ok(SchedulePolicy::Guided),
            "dynamic" => Ok(SchedulePolicy::Dynamic),
            "static" => Ok(SchedulePolicy::Static),
            // The compiler-chosen policy maps to the default here.
            "auto" => Ok(SchedulePolicy::Guided),
            other => Err(format!(
                "unknown scheduler '{other}' (expected guided, dynamic, static, or auto)"
            )),
        }
    }
}

/// Everything a search needs besides the query and the index.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub mode: SearchMode,
    pub scheme: ScoringScheme,
    pub workers: usize,
    pub lanes: usize,
    pub score_block: usize,
    pub tile: usize,
    pub scheduler: SchedulePolicy,
    pub min_chunk: usize,
    pub top_k: usize,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig {
            mode: SearchMode::InterSp,
            scheme: ScoringScheme::blosum62_default(),
            workers: default_workers(),
            lanes: 16,
            score_block: 8,
            tile: 4,
            scheduler: SchedulePolicy::Guided,
            min_chunk: 16,
            top_k: 10,
        }
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// One ranked search result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hit {
    /// Position of the subject in the index's sorted order.
    pub subject_index: usize,
    pub subject_name: String,
    pub subject_length: usize,
    pub score: i32,
}

/// Cell-update accounting for one search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchMetrics {
    /// Query length times real database residues; padding is not counted.
    pub cells: u64,
    /// Wall time of the alignment stages.
    pub seconds: f64,
    /// Billions of cell updates per second.
    pub gcups: f64,
}

/// Issues chunks of work items to workers. The only shared mutable state
/// of a search; every call hands out a disjoint range, and the union of
/// all issued ranges is exactly `[0, total)`.
pub struct Scheduler {
    kind: WorkKind,
    policy: SchedulePolicy,
    total: usize,
    workers: usize,
    min_chunk: usize,
    state: Mutex<SchedulerState>,
}

struct SchedulerState {
    cursor: usize,
    next_span: usize,
    static_spans: Vec<(usize, usize)>,
}

impl Scheduler {
    pub fn new(
        kind: WorkKind,
        policy: SchedulePolicy,
        total: usize,
        workers: usize,
        min_chunk: usize,
    ) -> Scheduler {
        let workers = workers.max(1);
        let min_chunk = min_chunk.max(1);
        let static_spans = if policy == SchedulePolicy::Static {
            let base = total / workers;
            let extra = total % workers;
            let mut spans = Vec::with_capacity(workers);
            let mut start = 0;
            for w in 0..workers {
                let size = base + usize::from(w < extra);
                if size > 0 {
                    spans.push((start, size));
                }
                start += size;
            }
            spans
        } else {
            Vec::new()
        };
        Scheduler {
            kind,
            policy,
            total,
            workers,
            min_chunk,
            state: Mutex::new(SchedulerState {
                cursor: 0,
                next_span: 0,
                static_spans,
            }),
        }
    }

    /// The chunk size the guided policy hands out with `remaining` items
    /// left: `max(ceil(remaining / (2 · workers)), min_chunk)`, clamped to
    /// what remains.
    pub fn guided_chunk_size(remaining: usize, workers: usize, min_chunk: usize) -> usize {
        remaining
            .div_ceil(2 * workers.max(1))
            .max(min_chunk.max(1))
            .min(remaining)
    }

    /// Next chunk, or `None` once the range is exhausted.
    pub fn next_chunk(&self) -> Option<Chunk> {
        let mut state = self.state.lock().unwrap();
        match self.policy {
            SchedulePolicy::Static => {
                let &(start, size) = state.static_spans.get(state.next_span)?;
                state.next_span += 1;
                Some(Chunk {
                    kind: self.kind,
                    first_item: start,
                    item_count: size,
                })
            }
            SchedulePolicy::Guided | SchedulePolicy::Dynamic => {
                let remaining = self.total - state.cursor;
                if remaining == 0 {
                    return None;
                }
                let size = match self.policy {
                    SchedulePolicy::Guided => {
                        Scheduler::guided_chunk_size(remaining, self.workers, self.min_chunk)
                    }
                    _ => self.min_chunk.min(remaining),
                };
                let first = state.cursor;
                state.cursor += size;
                Some(Chunk {
                    kind: self.kind,
                    first_item: first,
                    item_count: size,
                })
            }
        }
    }
}

/// One pre-allocated [`DpBuffers`] per worker, created before the workers
/// start and reused for every alignment of the search.
pub struct BufferPool {
    buffers: Vec<DpBuffers>,
}

impl BufferPool {
    pub fn new(workers: usize, capacity: usize, lanes: usize) -> BufferPool {
        BufferPool {
            buffers: (0..workers.max(1))
                .map(|_| DpBuffers::new(capacity, lanes))
                .collect(),
        }
    }

    /// The buffers owned by `worker`; repeated calls return the same
    /// instance.
    pub fn acquire(&mut self, worker: usize) -> &mut DpBuffers {
        &mut self.buffers[worker]
    }

    pub fn workers(&self) -> usize {
        self.buffers.len()
    }

    fn iter_mut(&mut self) -> std::slice::IterMut<'_, DpBuffers> {
        self.buffers.iter_mut()
    }
}

enum QueryData {
    InterSp,
    InterQp(QueryProfile),
    Intra(StripedQueryProfile),
}

/// Search one query against the whole index and return the ranked hits
/// plus throughput metrics.
pub fn search(
    query: &Sequence,
    index: &DbIndex,
    config: &SearchConfig,
) -> Result<(Vec<Hit>, SearchMetrics)> {
    if index.is_empty() {
        return Err(Error::EmptyDatabase);
    }
    if !kernels::SUPPORTED_WIDTHS.contains(&config.lanes) {
        return Err(Error::UnsupportedWidth(config.lanes));
    }
    check_overflow(query.len(), &config.scheme.matrix)?;

    // Stage (i): the profile the chosen kernel consumes.
    let query_data = match config.mode {
        SearchMode::InterSp => QueryData::InterSp,
        SearchMode::InterQp => {
            QueryData::InterQp(QueryProfile::build(query, &config.scheme.matrix))
        }
        SearchMode::Intra => QueryData::Intra(StripedQueryProfile::build(
            query,
            &config.scheme.matrix,
            config.lanes,
        )),
    };

    let kind = config.mode.work_kind();
    let items = index.work_items(kind, config.lanes);
    let workers = config.workers.max(1);
    let scheduler = Scheduler::new(kind, config.scheduler, items, workers, config.min_chunk);
    let mut pool = BufferPool::new(workers, round_up(query.len(), config.lanes), config.lanes);

    // Stages (ii) and (iii): workers drain the scheduler, then the scope
    // barrier joins them.
    let started = Instant::now();
    let mut per_worker: Vec<Result<Vec<(u32, i32)>>> = Vec::with_capacity(workers);
    std::thread::scope(|scope| {
        let handles: Vec<_> = pool
            .iter_mut()
            .map(|buffers| {
                let scheduler = &scheduler;
                let query_data = &query_data;
                scope.spawn(move || worker_loop(query, index, config, query_data, scheduler, buffers))
            })
            .collect();
        for handle in handles {
            per_worker.push(handle.join().expect("worker panicked"));
        }
    });
    let seconds = started.elapsed().as_secs_f64();

    // Stage (iv): merge, rank, cut.
    let mut scores = vec![0i32; index.len()];
    let mut seen = vec![false; index.len()];
    for worker_scores in per_worker {
        for (subject, score) in worker_scores? {
            debug_assert!(!std::mem::replace(&mut seen[subject as usize], true));
            scores[subject as usize] = score;
        }
    }
    debug_assert!(seen.iter().all(|&s| s));

    let mut ranked: Vec<(i32, usize)> = scores
        .iter()
        .enumerate()
        .map(|(subject, &score)| (score, subject))
        .collect();
    ranked.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    ranked.truncate(config.top_k.max(1));

    let hits = ranked
        .into_iter()
        .map(|(score, subject_index)| Hit {
            subject_index,
            subject_name: index.name(subject_index).to_string(),
            subject_length: index.length(subject_index),
            score,
        })
        .collect();

    let cells = query.len() as u64 * index.total_residues();
    let gcups = cells as f64 / seconds / 1e9;
    Ok((
        hits,
        SearchMetrics {
            cells,
            seconds,
            gcups,
        },
    ))
}

fn worker_loop(
    query: &Sequence,
    index: &DbIndex,
    config: &SearchConfig,
    query_data: &QueryData,
    scheduler: &Scheduler,
    buffers: &mut DpBuffers,
) -> Result<Vec<(u32, i32)>> {
    let mut out = Vec::new();
    while let Some(chunk) = scheduler.next_chunk() {
        for item in chunk.first_item..chunk.first_item + chunk.item_count {
            match query_data {
                QueryData::Intra(sqp) => {
                    let score = sw_intra_striped(
                        sqp,
                        index.residues(item),
                        config.scheme.gaps,
                        buffers,
                    )?;
                    out.push((item as u32, score));
                }
                QueryData::InterQp(qp) => {
                    let (profile, range) = group_profile(index, config, item)?;
                    let scores = sw_inter_qp(qp, &profile, config.scheme.gaps, buffers, config.tile)?;
                    for (lane, subject) in range.enumerate() {
                        out.push((subject as u32, scores.lane(lane)));
                    }
                }
                QueryData::InterSp => {
                    let (profile, range) = group_profile(index, config, item)?;
                    let scores = sw_inter_sp(
                        query.codes(),
                        &config.scheme,
                        &profile,
                        buffers,
                        config.score_block,
                        config.tile,
                    )?;
                    for (lane, subject) in range.enumerate() {
                        out.push((subject as u32, scores.lane(lane)));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Materialize the lane profile for one profile-group work item. Profile
/// lengths are padded so the configured score block always divides them.
fn group_profile(
    index: &DbIndex,
    config: &SearchConfig,
    group: usize,
) -> Result<(SequenceProfile, std::ops::Range<usize>)> {
    let range = index.group_range(group, config.lanes);
    let members: Vec<&[u8]> = range.clone().map(|i| index.residues(i)).collect();
    let min_len = match config.mode {
        SearchMode::InterSp => {
            let max_len = range.clone().map(|i| index.length(i)).max().unwrap_or(1);
            round_up(max_len, lcm(8, config.score_block.max(1)))
        }
        _ => 0,
    };
    let profile = SequenceProfile::build_padded(&members, config.lanes, range.start as u32, min_len)?;
    Ok((profile, range))
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn gcd(a: usize, b: usize) -> usize {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
