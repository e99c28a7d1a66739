use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ssp_forge::corpus::FilterConfig;
use ssp_forge::sampler::Objective;
use ssp_forge::serializer::EncodeMode;

/// Build sentence-pair pre-training shards from raw text and score
/// answer-sentence-selection runs.
///
/// Log verbosity is read from SSP_FORGE_LOG (error, warn, info, debug, trace).
#[derive(Debug, Parser)]
#[command(name = "ssp-forge", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Segment, filter and sample a corpus into SSP shards plus stats.json.
    Build(BuildArgs),
    /// Re-check shards against the corpus they were built from.
    Validate(ValidateArgs),
    /// Count records per objective and label.
    Stats(StatsArgs),
    /// Compute P@1, MAP and MRR from a score file.
    Eval(EvalArgs),
    /// Turn reading-comprehension annotations into fine-tuning records.
    Convert(ConvertArgs),
    /// Write a deterministic synthetic corpus.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Sdc,
    Dpc,
    Dslc,
    All,
}

pub fn objectives(args: &[ObjectiveArg]) -> Vec<Objective> {
    let mut out = Vec::new();
    for a in args {
        match a {
            ObjectiveArg::Sdc => out.push(Objective::Sdc),
            ObjectiveArg::Dpc => out.push(Objective::Dpc),
            ObjectiveArg::Dslc => out.push(Objective::Dslc),
            ObjectiveArg::All => out.extend(Objective::ALL),
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Pairwise,
    Contextual,
}

impl From<ModeArg> for EncodeMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Pairwise => EncodeMode::Pairwise,
            ModeArg::Contextual => EncodeMode::Contextual,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FilterArgs {
    /// Drop sentences shorter than this many characters.
    #[arg(long, default_value_t = 20)]
    pub min_sentence_chars: usize,
    /// Drop paragraphs shorter than this many characters.
    #[arg(long, default_value_t = 60)]
    pub min_paragraph_chars: usize,
    /// Drop documents shorter than this many characters.
    #[arg(long, default_value_t = 200)]
    pub min_document_chars: usize,
}

impl From<&FilterArgs> for FilterConfig {
    fn from(f: &FilterArgs) -> Self {
        FilterConfig {
            min_sentence_chars: f.min_sentence_chars,
            min_paragraph_chars: f.min_paragraph_chars,
            min_document_chars: f.min_document_chars,
        }
    }
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Corpus file or directory (JSON lines, or plain text with one document per file). Repeatable.
    #[arg(long, required = true)]
    pub corpus: Vec<PathBuf>,
    /// Output directory for shards and stats.json.
    #[arg(long)]
    pub out: PathBuf,
    /// Objective to generate. Repeatable.
    #[arg(long, value_enum, default_value = "all")]
    pub objective: Vec<ObjectiveArg>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 uses every logical CPU.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[command(flatten)]
    pub filters: FilterArgs,
    /// Hard negatives per positive, at most.
    #[arg(long, default_value_t = 2)]
    pub hard_negatives: usize,
    /// Negatives per positive, hard plus easy.
    #[arg(long, default_value_t = 4)]
    pub negatives: usize,
    #[arg(long, default_value_t = 1)]
    pub positives_per_paragraph: usize,
    /// Records per shard file.
    #[arg(long, default_value_t = 100_000)]
    pub shard_size: usize,
    /// Shard file name prefix.
    #[arg(long, default_value = "ssp")]
    pub prefix: String,
    /// Validate the shards after writing them.
    #[arg(long)]
    pub validate: bool,
    /// Print run statistics as JSON instead of a summary.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Shard files or directories.
    #[arg(required = true)]
    pub shards: Vec<PathBuf>,
    /// Corpus the shards were built from. Repeatable.
    #[arg(long, required = true)]
    pub corpus: Vec<PathBuf>,
    /// Filter thresholds used by the build.
    #[command(flatten)]
    pub filters: FilterArgs,
    /// Violations to print before summarising.
    #[arg(long, default_value_t = 20)]
    pub show: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Shard files or directories.
    #[arg(required = true)]
    pub shards: Vec<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// JSON lines with question_id, candidate_index, score, label.
    pub scores: PathBuf,
    /// Keep questions whose candidates are all positive or all negative.
    #[arg(long)]
    pub no_clean: bool,
    /// Score file of a reference run over the same questions.
    #[arg(long)]
    pub baseline: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// Corpus holding the annotated documents. Repeatable.
    #[arg(long, required = true)]
    pub corpus: Vec<PathBuf>,
    /// JSON lines with question_id, question, doc_id, answers.
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long, value_enum, default_value = "contextual")]
    pub mode: ModeArg,
    /// Output shard file.
    #[arg(long)]
    pub out: PathBuf,
    /// Match answers ignoring case.
    #[arg(long)]
    pub case_insensitive: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Output JSON lines file.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 500)]
    pub documents: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Keep writing until this many megabytes, ignoring --documents.
    #[arg(long)]
    pub target_mb: Option<u64>,
}
