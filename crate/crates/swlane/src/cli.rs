//! The `swlane` command line: `index` and `search` subcommands.
//!
//! Result rows go to standard output and are byte-deterministic for fixed
//! inputs and flags; the timing-dependent GCUPS line goes to standard
//! error. Exit codes: 0 success, 1 runtime error, 2 flag misuse.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::dbindex::{build_index, DbIndex};
use crate::engine::{self, SearchConfig, SearchMode, SchedulePolicy};
use crate::error::{Error, Result};
use crate::scoring::{GapPenalties, ScoringScheme, SubstitutionMatrix};
use crate::seq::parse_fasta_bytes;

#[derive(Parser)]
#[command(
    name = "swlane",
    version,
    about = "Lane-parallel Smith-Waterman protein database search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a length-sorted binary index from a FASTA database.
    Index(IndexArgs),
    /// Search FASTA queries against an indexed database.
    Search(SearchArgs),
}

#[derive(Args)]
struct IndexArgs {
    /// Input FASTA file.
    #[arg(long)]
    input: PathBuf,
    /// Output prefix; writes <prefix>.swidx and <prefix>.swseq.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct SearchArgs {
    /// Query FASTA file; each record is searched in turn.
    #[arg(long)]
    query: PathBuf,
    /// Database index prefix (as given to `index --output`).
    #[arg(long)]
    db: PathBuf,
    /// Built-in matrix name (blosum62, blosum50, pam250) or a matrix file.
    #[arg(long, default_value = "blosum62")]
    matrix: String,
    /// Gap open penalty.
    #[arg(long, default_value_t = 10)]
    gap_open: u32,
    /// Gap extension penalty.
    #[arg(long, default_value_t = 2)]
    gap_extend: u32,
    /// Alignment kernel: inter-sp, inter-qp, or intra.
    #[arg(long, default_value = "inter-sp", value_parser = parse_mode)]
    mode: SearchMode,
    /// Worker thread count [default: hardware parallelism].
    #[arg(long, value_parser = parse_positive)]
    workers: Option<usize>,
    /// Lane width: 4, 8, or 16.
    #[arg(long, default_value_t = 16, value_parser = parse_lanes)]
    lanes: usize,
    /// Positions per score-profile block (inter-sp mode).
    #[arg(long, default_value_t = 8, value_parser = parse_positive)]
    score_block: usize,
    /// Subject positions per tiled inner-loop pass.
    #[arg(long, default_value_t = 4, value_parser = parse_positive)]
    tile: usize,
    /// Chunk scheduling policy: guided, dynamic, static, or auto.
    #[arg(long, default_value = "guided", value_parser = parse_sched)]
    sched: SchedulePolicy,
    /// Number of hits reported per query.
    #[arg(long, default_value_t = 10, value_parser = parse_positive)]
    top: usize,
}

fn parse_mode(s: &str) -> std::result::Result<SearchMode, String> {
    s.parse()
}

fn parse_sched(s: &str) -> std::result::Result<SchedulePolicy, String> {
    s.parse()
}

fn parse_lanes(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(w) if matches!(w, 4 | 8 | 16) => Ok(w),
        _ => Err(format!("'{s}' is not a supported lane width (4, 8, or 16)")),
    }
}

fn parse_positive(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(format!("'{s}' is not a positive integer")),
    }
}

/// Parse arguments from the environment and run. Returns the exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Usage errors exit 2; --help/--version exit 0.
            let _ = err.print();
            return err.exit_code();
        }
    };
    let result = match cli.command {
        Command::Index(args) => cmd_index(&args),
        Command::Search(args) => cmd_search(&args),
    };
    match result {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            1
        }
    }
}

fn read_fasta_file(path: &Path) -> Result<Vec<crate::seq::Sequence>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_fasta_bytes(&bytes)
}

fn cmd_index(args: &IndexArgs) -> Result<()> {
    let sequences = read_fasta_file(&args.input)?;
    let stats = build_index(&sequences, &args.output)?;
    println!(
        "indexed {} sequences, {} residues, max length {}",
        stats.sequences, stats.residues, stats.max_len
    );
    Ok(())
}

fn resolve_matrix(spec: &str) -> Result<SubstitutionMatrix> {
    if SubstitutionMatrix::BUILTIN_NAMES
        .iter()
        .any(|n| n.eq_ignore_ascii_case(spec))
    {
        return SubstitutionMatrix::builtin(spec);
    }
    let path = Path::new(spec);
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_stem()
        .map_or_else(|| "custom".to_string(), |s| s.to_string_lossy().into_owned());
    Ok(SubstitutionMatrix::from_text(&text)?.with_name(name))
}

fn cmd_search(args: &SearchArgs) -> Result<()> {
    let matrix = resolve_matrix(&args.matrix)?;
    let config = SearchConfig {
        mode: args.mode,
        scheme: ScoringScheme::new(matrix, GapPenalties::new(args.gap_open, args.gap_extend)),
        workers: args.workers.unwrap_or_else(engine::default_workers),
        lanes: args.lanes,
        score_block: args.score_block,
        tile: args.tile,
        scheduler: args.sched,
        top_k: args.top,
        ..SearchConfig::default()
    };

    let index = DbIndex::open(&args.db)?;
    let queries = read_fasta_file(&args.query)?;
    for query in &queries {
        let (hits, metrics) = engine::search(query, &index, &config)?;
        println!("# query {} length {}", query.name(), query.len());
        for (rank, hit) in hits.iter().enumerate() {
            println!(
                "{}\t{}\t{}\t{}",
                rank + 1,
                hit.subject_name,
                hit.subject_length,
                hit.score
            );
        }
        eprintln!("GCUPS: {:.2}", metrics.gcups);
    }
    Ok(())
}
