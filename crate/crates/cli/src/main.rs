mod args;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use serde_json::json;
use ssp_forge::corpus::{load_corpus, FilterConfig};
use ssp_forge::eval::{compare_to_baseline, evaluate, read_scores, EvalReport};
use ssp_forge::mr::{build_as2_from_mr, read_annotations, MatchOptions};
use ssp_forge::pipeline::{run_build, validate_shards, BuildOptions, RunStats, ValidationReport};
use ssp_forge::sampler::{BuildConfig, NegativeKind, Objective};
use ssp_forge::serializer::{encode_finetune, list_shards, read_shard, write_shard, EncodedRecord, ShardRecord};
use ssp_forge::synth::{write_synth_corpus, SynthConfig};

use args::{BuildArgs, Cli, Command, ConvertArgs, EvalArgs, StatsArgs, SynthArgs, ValidateArgs};

/// Bad arguments that clap cannot catch; exits with status 2.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let config = err.chain().any(|e| {
        e.is::<UsageError>() || matches!(e.downcast_ref::<ssp_forge::Error>(), Some(ssp_forge::Error::Config(_)))
    });
    if config {
        2
    } else {
        1
    }
}

fn require_inputs(paths: &[impl AsRef<Path>]) -> Result<()> {
    for p in paths {
        let p = p.as_ref();
        if !p.exists() {
            return Err(usage(format!("corpus path {} does not exist", p.display())));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SSP_FORGE_LOG", "warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Convert(a) => cmd_convert(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = exit_code(&e);
            if code == 2 {
                eprintln!("\nFor more information, try '--help'.");
            }
            ExitCode::from(code)
        }
    }
}

fn print_build_summary(stats: &RunStats) {
    println!(
        "documents: {} read, {} kept, {} skipped ({} empty, {} filtered, {} duplicate)",
        stats.documents_read,
        stats.documents_kept,
        stats.documents_skipped,
        stats.documents_empty,
        stats.documents_filtered,
        stats.documents_duplicate
    );
    if !stats.input_errors.is_empty() {
        println!("input errors: {}", stats.input_errors.len());
    }
    for (o, s) in &stats.objectives {
        println!(
            "{o}: {} positives, {} hard, {} easy negatives, {} hard shortfalls",
            s.positives, s.hard_negatives, s.easy_negatives, s.hard_negative_shortfalls
        );
    }
    println!(
        "records: {} in {} shard(s), {:.1}s, {:.2} MB/s",
        stats.records_written,
        stats.shard_count,
        stats.elapsed_seconds,
        stats.throughput_bytes_per_second / 1e6
    );
}

fn print_validation(report: &ValidationReport, show: usize, json: bool) -> Result<()> {
    if json {
        println!("{}", serde_json::to_string_pretty(report)?);
        return Ok(());
    }
    for v in report.violations.iter().take(show) {
        println!("{v}");
    }
    if report.violations.len() > show {
        println!("... {} more", report.violations.len() - show);
    }
    println!(
        "{} shard(s), {} records, {} violations",
        report.shards,
        report.records_checked,
        report.violations.len()
    );
    Ok(())
}

fn cmd_build(a: BuildArgs) -> Result<ExitCode> {
    require_inputs(&a.corpus)?;
    let cfg = BuildConfig {
        objectives: args::objectives(&a.objective),
        seed: a.seed,
        max_hard_negatives: a.hard_negatives,
        total_negatives: a.negatives,
        positives_per_paragraph: a.positives_per_paragraph,
        shard_size: a.shard_size,
        filters: FilterConfig::from(&a.filters),
    };
    let opts = BuildOptions {
        out_dir: a.out.clone(),
        prefix: a.prefix.clone(),
        workers: a.workers,
    };
    let out = run_build(&a.corpus, &cfg, &opts)?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&out.stats)?);
    } else {
        print_build_summary(&out.stats);
        println!("stats: {}", out.stats_path.display());
    }
    if a.validate {
        let report = validate_shards(&out.shards, &a.corpus, &cfg.filters)?;
        print_validation(&report, 20, false)?;
        if !report.is_clean() {
            return Ok(ExitCode::from(1));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(a: ValidateArgs) -> Result<ExitCode> {
    require_inputs(&a.corpus)?;
    let report = validate_shards(&a.shards, &a.corpus, &FilterConfig::from(&a.filters))?;
    print_validation(&report, a.show, a.json)?;
    Ok(if report.is_clean() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

#[derive(Debug, Default)]
struct Counts {
    positive: u64,
    hard_negative: u64,
    easy_negative: u64,
}

fn cmd_stats(a: StatsArgs) -> Result<ExitCode> {
    let mut by_objective: BTreeMap<Objective, Counts> = BTreeMap::new();
    let mut shards = 0;
    for root in &a.shards {
        for shard in list_shards(root)? {
            shards += 1;
            for r in read_shard::<ShardRecord>(&shard)? {
                let c = by_objective.entry(r.objective).or_default();
                match (r.label, r.negative_kind) {
                    (1, _) => c.positive += 1,
                    (_, Some(NegativeKind::Hard)) => c.hard_negative += 1,
                    _ => c.easy_negative += 1,
                }
            }
        }
    }
    if a.json {
        let objectives: serde_json::Map<String, serde_json::Value> = by_objective
            .iter()
            .map(|(o, c)| {
                let v = json!({ "positive": c.positive, "hard_negative": c.hard_negative, "easy_negative": c.easy_negative });
                (o.as_str().to_owned(), v)
            })
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({ "shards": shards, "objectives": objectives }))?
        );
        return Ok(ExitCode::SUCCESS);
    }
    println!(
        "{:<8}{:>12}{:>12}{:>12}{:>12}",
        "", "positive", "hard neg", "easy neg", "total"
    );
    let mut total = 0;
    for (o, c) in &by_objective {
        let sum = c.positive + c.hard_negative + c.easy_negative;
        total += sum;
        println!(
            "{:<8}{:>12}{:>12}{:>12}{:>12}",
            o.as_str(),
            c.positive,
            c.hard_negative,
            c.easy_negative,
            sum
        );
    }
    println!("{shards} shard(s), {total} records");
    Ok(ExitCode::SUCCESS)
}

fn print_delta(name: &str, d: &ssp_forge::eval::MetricDelta) {
    let rel = d
        .relative
        .map_or_else(|| "n/a".to_owned(), |r| format!("{:+.2}%", r * 100.0));
    println!(
        "{name:<5}{:>10.4}{:>10.4}{:>+10.4}{rel:>10}",
        d.value, d.baseline, d.absolute
    );
}

fn cmd_eval(a: EvalArgs) -> Result<ExitCode> {
    let clean = !a.no_clean;
    let current = read_scores(&a.scores)?;
    let Some(baseline) = &a.baseline else {
        let report: EvalReport = evaluate(current, clean)?;
        if a.json {
            println!("{}", serde_json::to_string_pretty(&report)?);
        } else {
            print!("{}", report.table());
        }
        return Ok(ExitCode::SUCCESS);
    };
    let base = read_scores(baseline)?;
    let (cur, base, delta) = compare_to_baseline(current, base, clean)?;
    if a.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({ "run": cur, "baseline": base, "delta": delta }))?
        );
        return Ok(ExitCode::SUCCESS);
    }
    print!("{}", cur.table());
    println!();
    println!(
        "{:<5}{:>10}{:>10}{:>10}{:>10}",
        "", "run", "baseline", "delta", "relative"
    );
    print_delta("P@1", &delta.p_at_1);
    print_delta("MAP", &delta.map);
    print_delta("MRR", &delta.mrr);
    Ok(ExitCode::SUCCESS)
}

fn cmd_convert(a: ConvertArgs) -> Result<ExitCode> {
    require_inputs(&a.corpus)?;
    let annotations = read_annotations(&a.annotations)?;
    // answers may sit in short sentences, so the corpus is read unfiltered
    let corpus = load_corpus(&a.corpus, &FilterConfig::disabled());
    for e in &corpus.errors {
        log::warn!("{e}");
    }
    let conv = build_as2_from_mr(
        &corpus.index,
        &annotations,
        MatchOptions {
            case_insensitive: a.case_insensitive,
        },
    );
    for e in &conv.errors {
        eprintln!("warning: {e}");
    }
    let encoded = conv
        .records
        .iter()
        .map(|r| encode_finetune(r, a.mode.into()))
        .collect::<ssp_forge::Result<Vec<EncodedRecord>>>()?;
    write_shard(&encoded, &a.out).with_context(|| format!("writing {}", a.out.display()))?;
    println!(
        "{} questions, {} records, {} positive ({:.2}%), {} unmatched, {} skipped",
        conv.questions,
        conv.records.len(),
        conv.positives,
        conv.positive_rate() * 100.0,
        conv.unmatched.len(),
        conv.errors.len()
    );
    Ok(if conv.questions == 0 && !annotations.is_empty() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_synth(a: SynthArgs) -> Result<ExitCode> {
    let cfg = SynthConfig {
        documents: a.documents,
        seed: a.seed,
        ..SynthConfig::default()
    };
    let (docs, bytes) = write_synth_corpus(&a.out, &cfg, a.target_mb.map(|mb| mb * 1_000_000))?;
    println!("{docs} documents, {bytes} bytes -> {}", a.out.display());
    Ok(ExitCode::SUCCESS)
}
