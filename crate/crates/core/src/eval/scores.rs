//! Score files: one `{question_id, candidate_index, score, label}` object per
//! line, grouped into candidate sets by question id.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{evaluate, Candidate, EvalReport, RankedCandidateSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreLine {
    pub question_id: String,
    pub candidate_index: usize,
    pub score: f64,
    pub label: u8,
}

/// Groups score lines by question in first-appearance order; candidates are
/// ordered by `candidate_index`, which must be unique per question.
pub fn parse_scores(reader: impl BufRead, path: &Path) -> Result<Vec<RankedCandidateSet>> {
    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, Vec<(usize, usize, Candidate)>> = HashMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::malformed(path, line_no, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let s: ScoreLine = serde_json::from_str(&line).map_err(|e| Error::malformed(path, line_no, e))?;
        if !s.score.is_finite() || s.label > 1 {
            return Err(Error::malformed(path, line_no, "score must be finite and label 0 or 1"));
        }
        let group = groups.entry(s.question_id.clone()).or_insert_with(|| {
            order.push(s.question_id.clone());
            Vec::new()
        });
        group.push((
            s.candidate_index,
            line_no,
            Candidate {
                score: s.score,
                label: s.label,
            },
        ));
    }
    let mut sets = Vec::with_capacity(order.len());
    for qid in order {
        let mut group = groups.remove(&qid).expect("grouped above");
        group.sort_by_key(|(idx, line, _)| (*idx, *line));
        if let Some(w) = group.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::malformed(
                path,
                w[1].1,
                format!("duplicate candidate_index {} for question {qid}", w[1].0),
            ));
        }
        let candidates = group.into_iter().map(|(_, _, c)| c).collect();
        sets.push(RankedCandidateSet::new(qid, candidates)?);
    }
    Ok(sets)
}

pub fn read_scores(path: &Path) -> Result<Vec<RankedCandidateSet>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_scores(BufReader::new(file), path)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricDelta {
    pub value: f64,
    pub baseline: f64,
    pub absolute: f64,
    /// `absolute / baseline`; `None` when the baseline is 0.
    pub relative: Option<f64>,
}

impl MetricDelta {
    fn new(value: f64, baseline: f64) -> Self {
        let absolute = value - baseline;
        MetricDelta {
            value,
            baseline,
            absolute,
            relative: (baseline != 0.0).then(|| absolute / baseline),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineDelta {
    pub p_at_1: MetricDelta,
    pub map: MetricDelta,
    pub mrr: MetricDelta,
}

/// Evaluates both runs and reports per-metric deltas. Both runs must cover
/// exactly the same question ids.
pub fn compare_to_baseline(
    current: Vec<RankedCandidateSet>,
    baseline: Vec<RankedCandidateSet>,
    clean: bool,
) -> Result<(EvalReport, EvalReport, BaselineDelta)> {
    let ids = |sets: &[RankedCandidateSet]| {
        let mut v: Vec<String> = sets.iter().map(|s| s.question_id().to_owned()).collect();
        v.sort();
        v
    };
    let (a, b) = (ids(&current), ids(&baseline));
    if a != b {
        let missing = b.iter().filter(|q| a.binary_search(q).is_err()).count();
        let extra = a.iter().filter(|q| b.binary_search(q).is_err()).count();
        return Err(Error::BaselineMismatch(format!(
            "{extra} question(s) only in the run, {missing} only in the baseline"
        )));
    }
    let cur = evaluate(current, clean)?;
    let base = evaluate(baseline, clean)?;
    let delta = BaselineDelta {
        p_at_1: MetricDelta::new(cur.p_at_1, base.p_at_1),
        map: MetricDelta::new(cur.map, base.map),
        mrr: MetricDelta::new(cur.mrr, base.mrr),
    };
    Ok((cur, base, delta))
}
