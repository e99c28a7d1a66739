//! Acceptance suite. Runs without the libtest harness so that every criterion
//! prints exactly one PASS/FAIL line; the process fails if any line is FAIL.
//!
//! Environment knobs:
//! - `SSP_FORGE_THROUGHPUT_MB`: size of the scaled throughput corpus (default 24).
//! - `SSP_FORGE_FULL_THROUGHPUT=1`: run the throughput check on a full 1 GB corpus.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use proptest::test_runner::{Config as PropConfig, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use common::{oracle_ap, oracle_ranked_labels, oracle_rr, random_set};
use ssp_forge::corpus::{load_corpus, CorpusIndex, FilterConfig, Paragraph};
use ssp_forge::eval::{clean_filter, mean_average_precision, mean_reciprocal_rank, precision_at_1, RankedCandidateSet};
use ssp_forge::mr::{build_as2_from_mr, MatchOptions, MrAnnotation};
use ssp_forge::pipeline::{run_build, validate_shards, BuildOptions, BuildOutput};
use ssp_forge::sampler::{BuildConfig, NegativeKind, Objective};
use ssp_forge::serializer::{encode_finetune, read_shard, EncodeMode, ShardRecord};
use ssp_forge::synth::{synth_document, write_synth_corpus, SynthConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn(&Fixture) -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($fmt)+));
        }
    };
}

const SYNTH_DOCS: usize = 600;

struct Fixture {
    _tmp: tempfile::TempDir,
    root: PathBuf,
    corpus: PathBuf,
    index: CorpusIndex,
}

impl Fixture {
    fn new() -> Self {
        let tmp = tempfile::tempdir().expect("tempdir");
        let root = tmp.path().to_path_buf();
        let corpus = root.join("synthetic.jsonl");
        let cfg = SynthConfig {
            documents: SYNTH_DOCS,
            seed: 42,
            ..SynthConfig::default()
        };
        write_synth_corpus(&corpus, &cfg, None).expect("write corpus");
        let index = load_corpus(std::slice::from_ref(&corpus), &FilterConfig::default()).index;
        Fixture {
            _tmp: tmp,
            root,
            corpus,
            index,
        }
    }

    fn build(&self, name: &str, seed: u64, workers: usize) -> Result<BuildOutput, String> {
        let cfg = BuildConfig {
            seed,
            ..BuildConfig::default()
        };
        let opts = BuildOptions::new(self.root.join(name)).workers(workers);
        run_build(std::slice::from_ref(&self.corpus), &cfg, &opts).map_err(|e| e.to_string())
    }

    fn records(&self, out: &BuildOutput) -> Result<Vec<ShardRecord>, String> {
        let mut all = Vec::new();
        for s in &out.shards {
            all.extend(read_shard::<ShardRecord>(s).map_err(|e| e.to_string())?);
        }
        Ok(all)
    }

    fn paragraph(&self, doc: &str, par: usize) -> Result<&Paragraph, String> {
        self.index
            .get(doc)
            .and_then(|d| d.paragraphs().get(par))
            .ok_or_else(|| format!("record names missing paragraph {doc}/{par}"))
    }
}

fn texts(p: &Paragraph, idx: impl IntoIterator<Item = usize>) -> String {
    idx.into_iter()
        .map(|i| p.sentences()[i].text())
        .collect::<Vec<_>>()
        .join(" ")
}

// 1. Zero validator violations over all objectives and 20 seeds.
fn sampler_oracle(fx: &Fixture) -> Outcome {
    let started = Instant::now();
    let raw_paragraphs: Vec<usize> = (0..SYNTH_DOCS)
        .map(|i| {
            synth_document(
                &SynthConfig {
                    seed: 42,
                    ..SynthConfig::default()
                },
                i,
            )
            .text
            .split("\n\n")
            .count()
        })
        .collect();
    ensure!(
        raw_paragraphs.contains(&1) && raw_paragraphs.contains(&10),
        "synthetic corpus does not span 1..10 paragraphs"
    );
    let mut records = 0;
    for seed in 0..20 {
        let out = fx.build("c1", seed, 0)?;
        ensure!(
            out.stats.objectives.len() == 3,
            "seed {seed}: objectives {:?}",
            out.stats.objectives.keys()
        );
        let report = validate_shards(&out.shards, std::slice::from_ref(&fx.corpus), &FilterConfig::default())
            .map_err(|e| e.to_string())?;
        ensure!(
            report.is_clean(),
            "seed {seed}: {} violations, first: {}",
            report.violations.len(),
            report.violations[0]
        );
        ensure!(
            report.records_checked == out.stats.records_written,
            "seed {seed}: record count mismatch"
        );
        records += report.records_checked;
    }
    let secs = started.elapsed().as_secs_f64();
    ensure!(secs < 60.0, "took {secs:.1}s");
    Ok(format!(
        "{} docs kept of {SYNTH_DOCS}, 20 seeds, {records} records, 0 violations, {secs:.1}s",
        fx.index.len()
    ))
}

fn qualifies_positive(o: Objective, i: usize, p: &Paragraph) -> bool {
    match o {
        Objective::Sdc => i > 0 && p.sentences().len() >= 2,
        Objective::Dpc | Objective::Dslc => p.sentences().len() >= 3,
    }
}

fn qualifies_hard_source(o: Objective, i: usize, j: usize, p: &Paragraph) -> bool {
    j != i
        && match o {
            Objective::Sdc => j > 0,
            Objective::Dpc | Objective::Dslc => p.sentences().len() >= 2,
        }
}

// 2. Exactly four negatives per positive, at most two hard, and shortfalls
// equal to a brute-force count over the corpus.
fn negative_quota(fx: &Fixture) -> Outcome {
    let out = fx.build("c2", 7, 0)?;
    let records = fx.records(&out)?;

    let mut brute: BTreeMap<Objective, u64> = BTreeMap::new();
    for o in Objective::ALL {
        let mut n = 0;
        for d in fx.index.documents() {
            let ps = d.paragraphs();
            for (i, p) in ps.iter().enumerate() {
                if qualifies_positive(o, i, p) && !ps.iter().enumerate().any(|(j, q)| qualifies_hard_source(o, i, j, q))
                {
                    n += 1;
                }
            }
        }
        brute.insert(o, n);
    }

    let mut zero_hard: BTreeMap<Objective, u64> = BTreeMap::new();
    let mut positives = 0;
    let mut i = 0;
    while i < records.len() {
        let pos = &records[i];
        ensure!(pos.label == 1, "line {}: group does not start with a positive", i + 2);
        let group = records[i + 1..].iter().take_while(|r| r.label == 0).collect::<Vec<_>>();
        let hard = group
            .iter()
            .filter(|r| r.negative_kind == Some(NegativeKind::Hard))
            .count();
        ensure!(
            group.len() == 4,
            "positive at line {} has {} negatives",
            i + 2,
            group.len()
        );
        ensure!(hard <= 2, "positive at line {} has {hard} hard negatives", i + 2);
        ensure!(
            group.iter().all(|r| r.a == pos.a && r.objective == pos.objective),
            "negatives of line {} do not share its anchor",
            i + 2
        );
        ensure!(
            hard == 0 || hard == 2,
            "positive at line {} has a partial hard quota",
            i + 2
        );
        if hard == 0 {
            *zero_hard.entry(pos.objective).or_default() += 1;
        }
        positives += 1;
        i += 1 + group.len();
    }

    for o in Objective::ALL {
        let stats = out.stats.objectives[&o];
        let b = brute[&o];
        let seen = zero_hard.get(&o).copied().unwrap_or(0);
        ensure!(
            stats.hard_negative_shortfalls == b && seen == b,
            "{o}: stats {} / shards {seen} / brute force {b}",
            stats.hard_negative_shortfalls
        );
        ensure!(stats.easy_negative_shortfalls == 0, "{o}: easy shortfalls");
    }
    let total: u64 = brute.values().sum();
    ensure!(out.stats.hard_negative_shortfalls == total, "run total shortfalls");
    Ok(format!("{positives} positives, shortfalls {brute:?} match brute force"))
}

// 3. No unit below its threshold survives filtering.
fn filter_conformance(fx: &Fixture) -> Outcome {
    let (mut s_short, mut p_short, mut d_short) = (0, 0, 0);
    let mut sentences = 0;
    for d in fx.index.documents() {
        let mut doc_chars = 0;
        for p in d.paragraphs() {
            let ptext = p.sentences().iter().map(|s| s.text()).collect::<Vec<_>>().join(" ");
            let pchars = ptext.chars().count();
            p_short += usize::from(pchars < 60);
            doc_chars += pchars;
            for s in p.sentences() {
                sentences += 1;
                s_short += usize::from(s.text().chars().count() < 20);
            }
        }
        d_short += usize::from(doc_chars < 200);
    }
    ensure!(
        s_short + p_short + d_short == 0,
        "short sentences {s_short}, paragraphs {p_short}, documents {d_short}"
    );

    // the unfiltered corpus must actually contain units that need removing
    let unfiltered = load_corpus(std::slice::from_ref(&fx.corpus), &FilterConfig::disabled()).index;
    let raw_short = unfiltered
        .documents()
        .iter()
        .flat_map(|d| d.sentences())
        .filter(|s| s.text().chars().count() < 20)
        .count();
    ensure!(raw_short > 0, "synthetic corpus has nothing to filter");
    ensure!(fx.index.len() < unfiltered.len(), "no document was filtered");
    Ok(format!(
        "{} docs, {sentences} sentences scanned, 0 below thresholds",
        fx.index.len()
    ))
}

fn shard_digest(out: &BuildOutput) -> Result<(Vec<String>, String), String> {
    let mut h = Sha256::new();
    let mut names = Vec::new();
    for s in &out.shards {
        names.push(s.file_name().unwrap().to_string_lossy().into_owned());
        h.update(fs::read(s).map_err(|e| e.to_string())?);
    }
    let hex = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
    Ok((names, hex))
}

// 4. Byte-identical shards for 1, 2 and 8 workers.
fn determinism(fx: &Fixture) -> Outcome {
    let mut digests = Vec::new();
    for w in [1, 2, 8] {
        let out = fx.build(&format!("c4-w{w}"), 1234, w)?;
        digests.push((w, shard_digest(&out)?));
    }
    let (_, first) = &digests[0];
    for (w, d) in &digests[1..] {
        ensure!(d == first, "workers {w} differ: {} vs {}", d.1, first.1);
    }
    Ok(format!("sha256 {} over {} shard(s)", &first.1[..16], first.0.len()))
}

// 5. Library metrics equal the naive oracle on 1000 random sets.
fn metric_oracle(_: &Fixture) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let raw: Vec<(Vec<f64>, Vec<u8>)> = (0..1000).map(|i| random_set(&mut rng, i)).collect();
    let sets: Vec<RankedCandidateSet> = raw
        .iter()
        .enumerate()
        .map(|(i, (s, l))| RankedCandidateSet::from_scores(format!("q{i}"), s, l).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let ranked: Vec<Vec<u8>> = raw.iter().map(|(s, l)| oracle_ranked_labels(s, l)).collect();
    let n = ranked.len() as f64;
    let want = [
        ranked.iter().map(|r| f64::from(r[0])).sum::<f64>() / n,
        ranked.iter().map(|r| oracle_ap(r)).sum::<f64>() / n,
        ranked.iter().map(|r| oracle_rr(r)).sum::<f64>() / n,
    ];
    let got = [
        precision_at_1(&sets).map_err(|e| e.to_string())?,
        mean_average_precision(&sets).map_err(|e| e.to_string())?,
        mean_reciprocal_rank(&sets).map_err(|e| e.to_string())?,
    ];
    for (name, (g, w)) in ["P@1", "MAP", "MRR"].iter().zip(got.iter().zip(want)) {
        ensure!((g - w).abs() < 1e-12, "{name}: {g} vs oracle {w}");
    }
    let fixed = RankedCandidateSet::from_scores("fixed", &[0.9, 0.5, 0.1], &[0, 1, 1]).map_err(|e| e.to_string())?;
    let ap = mean_average_precision(&[fixed]).map_err(|e| e.to_string())?;
    ensure!((ap - 7.0 / 12.0).abs() < 1e-12, "AP([0,1,1]) = {ap}");
    Ok(format!(
        "P@1 {:.4} MAP {:.4} MRR {:.4}, AP([0,1,1]) = 7/12",
        got[0], got[1], got[2]
    ))
}

// 6. The clean filter removes exactly the single-label sets.
fn clean_setting(_: &Fixture) -> Outcome {
    let strategy = proptest::collection::vec(proptest::collection::vec(0u8..=1, 1..12), 1..30);
    let mut runner = TestRunner::new(PropConfig {
        cases: 2000,
        failure_persistence: None,
        ..PropConfig::default()
    });
    runner
        .run(&strategy, |labels| {
            let sets: Vec<RankedCandidateSet> = labels
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    let scores: Vec<f64> = (0..l.len()).map(|j| (j * 7 % 5) as f64).collect();
                    RankedCandidateSet::from_scores(format!("q{i}"), &scores, l).unwrap()
                })
                .collect();
            let kept: Vec<String> = clean_filter(sets).iter().map(|s| s.question_id().to_owned()).collect();
            let expected: Vec<String> = labels
                .iter()
                .enumerate()
                .filter(|(_, l)| l.contains(&0) && l.contains(&1))
                .map(|(i, _)| format!("q{i}"))
                .collect();
            proptest::prop_assert_eq!(kept, expected);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("2000 random label matrices".into())
}

// 7. Segment layout of every pre-training and contextual fine-tuning record.
fn encoding_layout(fx: &Fixture) -> Outcome {
    let out = fx.build("c7", 3, 0)?;
    let records = fx.records(&out)?;
    for (i, r) in records.iter().enumerate() {
        let e = r.encode();
        let layout: Vec<(&str, u8)> = e.segments.iter().map(|s| (s.text.as_str(), s.segment_id)).collect();
        ensure!(
            layout == [(r.a.as_str(), 0), (r.b.as_str(), 1), (r.c.as_str(), 2)],
            "pretrain record {i}: {layout:?}"
        );
        e.check_layout().map_err(|m| format!("pretrain record {i}: {m}"))?;
    }

    // annotations pick a word from a random sentence of each document
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let annotations: Vec<MrAnnotation> = fx
        .index
        .documents()
        .iter()
        .take(200)
        .enumerate()
        .map(|(k, d)| {
            let sents: Vec<&str> = d.sentences().map(|s| s.text()).collect();
            let words: Vec<&str> = sents[rng.random_range(0..sents.len())].split_whitespace().collect();
            MrAnnotation {
                question_id: format!("mr{k}"),
                question: format!("Which passage mentions {}?", words[words.len() / 2]),
                doc_id: d.doc_id().to_owned(),
                answers: vec![words[words.len() / 2].to_owned()],
            }
        })
        .collect();
    let conv = build_as2_from_mr(&fx.index, &annotations, MatchOptions::default());
    ensure!(conv.errors.is_empty(), "conversion errors: {:?}", conv.errors);
    for (i, r) in conv.records.iter().enumerate() {
        let ctx = r
            .context
            .as_deref()
            .ok_or(format!("fine-tune record {i}: no context"))?;
        let e = encode_finetune(r, EncodeMode::Contextual).map_err(|e| e.to_string())?;
        let layout: Vec<(&str, u8)> = e.segments.iter().map(|s| (s.text.as_str(), s.segment_id)).collect();
        ensure!(
            layout == [(r.question.as_str(), 0), (r.candidate.as_str(), 1), (ctx, 2)],
            "fine-tune record {i}: {layout:?}"
        );
        let p = encode_finetune(r, EncodeMode::Pairwise).map_err(|e| e.to_string())?;
        ensure!(p.segments.len() == 2, "pairwise record {i}");
    }
    Ok(format!(
        "{} pretrain, {} contextual fine-tune records",
        records.len(),
        conv.records.len()
    ))
}

// 8. DPC positives partition their paragraph into a, b and c.
fn dpc_partition(fx: &Fixture) -> Outcome {
    let mut checked = 0;
    for seed in [0, 1, 2] {
        let out = fx.build("c8", seed, 0)?;
        for r in fx.records(&out)? {
            if r.objective != Objective::Dpc || r.label != 1 {
                continue;
            }
            let p = fx.paragraph(&r.doc_a, r.par_a)?;
            let n = p.sentences().len();
            let b: Vec<usize> = (r.sent_b_first..r.sent_b_first + r.sent_b_count).collect();
            ensure!(!b.contains(&r.sent_a), "a inside b: {r:?}");
            let rest: Vec<usize> = (0..n).filter(|i| *i != r.sent_a && !b.contains(i)).collect();
            ensure!(!rest.is_empty(), "empty c: {r:?}");
            ensure!(r.a == texts(p, [r.sent_a]), "a text: {r:?}");
            ensure!(r.b == texts(p, b.iter().copied()), "b text: {r:?}");
            ensure!(r.c == texts(p, rest.iter().copied()), "c is not the remainder: {r:?}");
            ensure!(1 + b.len() + rest.len() == n, "not a partition: {r:?}");
            checked += 1;
        }
    }
    ensure!(checked > 0, "no DPC positives");
    Ok(format!("{checked} DPC positives over 3 seeds"))
}

// 9. DSLC context is b's neighbours; positive a is not adjacent to b.
fn dslc_locality(fx: &Fixture) -> Outcome {
    let mut checked = 0;
    for seed in [0, 1, 2] {
        let out = fx.build("c9", seed, 0)?;
        for r in fx.records(&out)? {
            if r.objective != Objective::Dslc {
                continue;
            }
            let p = fx.paragraph(&r.doc_b, r.par_b)?;
            let lo = r.sent_b_first;
            let hi = lo + r.sent_b_count;
            let mut around = Vec::new();
            if lo > 0 {
                around.push(lo - 1);
            }
            if hi < p.sentences().len() {
                around.push(hi);
            }
            ensure!(r.c == texts(p, around), "c is not b's neighbours: {r:?}");
            if r.label == 1 {
                ensure!(r.sent_a + 1 < lo || r.sent_a > hi, "a adjacent to b: {r:?}");
            }
            checked += 1;
        }
    }
    ensure!(checked > 0, "no DSLC examples");
    Ok(format!("{checked} DSLC examples over 3 seeds"))
}

const GB: u64 = 1_000_000_000;
const TARGET_SECONDS: f64 = 600.0;
const TARGET_CORES: usize = 8;

// 10. Throughput. Measured on a scaled corpus and projected linearly in
// bytes and cores to 1 GB on 8 cores, unless a full run is requested.
fn throughput(fx: &Fixture) -> Outcome {
    let full = std::env::var("SSP_FORGE_FULL_THROUGHPUT").is_ok_and(|v| v == "1");
    let mb: u64 = std::env::var("SSP_FORGE_THROUGHPUT_MB")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(24);
    let target = if full { GB } else { mb * 1_000_000 };
    let corpus = fx.root.join("throughput.jsonl");
    let (_, bytes) = write_synth_corpus(
        &corpus,
        &SynthConfig {
            seed: 10,
            ..SynthConfig::default()
        },
        Some(target),
    )
    .map_err(|e| e.to_string())?;

    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let out_dir = fx.root.join("c10");
    let started = Instant::now();
    let out = run_build(
        std::slice::from_ref(&corpus),
        &BuildConfig::default(),
        &BuildOptions::new(&out_dir),
    )
    .map_err(|e| e.to_string())?;
    let secs = started.elapsed().as_secs_f64();
    let written: u64 = out.shards.iter().map(|s| fs::metadata(s).map_or(0, |m| m.len())).sum();
    let _ = fs::remove_dir_all(&out_dir);
    let _ = fs::remove_file(&corpus);

    let per_core = bytes as f64 / secs / cores as f64;
    let projected = if full && cores >= TARGET_CORES {
        secs
    } else {
        GB as f64 / (per_core * TARGET_CORES as f64)
    };
    let detail = format!(
        "{:.1} MB in {secs:.1}s on {cores} core(s), {:.1} MB written, {:.2} MB/s/core, projected 1 GB on {TARGET_CORES} cores: {:.0}s (on one core: {:.0}s; limit {TARGET_SECONDS:.0}s, soft x2)",
        bytes as f64 / 1e6,
        written as f64 / 1e6,
        per_core / 1e6,
        projected,
        GB as f64 / per_core
    );
    ensure!(projected < 2.0 * TARGET_SECONDS, "{detail}");
    Ok(detail)
}

fn main() {
    let fx = Fixture::new();
    let criteria: [Criterion; 10] = [
        ("sampler correctness oracle", sampler_oracle),
        ("negative quota", negative_quota),
        ("filter conformance", filter_conformance),
        ("determinism across workers", determinism),
        ("metric oracle equivalence", metric_oracle),
        ("clean-setting conformance", clean_setting),
        ("encoding layout", encoding_layout),
        ("DPC partition", dpc_partition),
        ("DSLC locality", dslc_locality),
        ("throughput floor", throughput),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = check(&fx);
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("acceptance {:>2} PASS {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("acceptance {:>2} FAIL {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
