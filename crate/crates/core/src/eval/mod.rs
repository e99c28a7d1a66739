//! Answer-sentence-selection evaluation: clean-setting filter, argmax answer
//! selection, P@1, MAP and MRR.
//!
//! Candidates are ranked by descending score; equal scores keep their
//! original order, so the lowest index wins a tie.

mod scores;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use scores::{compare_to_baseline, parse_scores, read_scores, BaselineDelta, MetricDelta, ScoreLine};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub score: f64,
    pub label: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCandidateSet {
    question_id: String,
    candidates: Vec<Candidate>,
}

impl RankedCandidateSet {
    pub fn new(question_id: impl Into<String>, candidates: Vec<Candidate>) -> Result<Self> {
        let question_id = question_id.into();
        if candidates.is_empty() {
            return Err(Error::InvalidRecord(format!(
                "question {question_id} has no candidates"
            )));
        }
        if let Some(c) = candidates.iter().find(|c| !c.score.is_finite() || c.label > 1) {
            return Err(Error::InvalidRecord(format!(
                "question {question_id}: candidate with score {} and label {}",
                c.score, c.label
            )));
        }
        Ok(RankedCandidateSet {
            question_id,
            candidates,
        })
    }

    /// Convenience constructor from parallel score and label slices.
    pub fn from_scores(question_id: impl Into<String>, scores: &[f64], labels: &[u8]) -> Result<Self> {
        assert_eq!(scores.len(), labels.len(), "scores and labels differ in length");
        let candidates = scores
            .iter()
            .zip(labels)
            .map(|(&score, &label)| Candidate { score, label })
            .collect();
        Self::new(question_id, candidates)
    }

    pub fn question_id(&self) -> &str {
        &self.question_id
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.candidates.iter().filter(|c| c.label == 1).count()
    }

    /// True when every label is 1 or every label is 0.
    pub fn is_single_label(&self) -> bool {
        let p = self.positives();
        p == 0 || p == self.candidates.len()
    }

    /// Candidate indices from best to worst.
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.candidates.len()).collect();
        // stable: equal scores keep ascending index order
        order.sort_by(|&i, &j| {
            self.candidates[j]
                .score
                .partial_cmp(&self.candidates[i].score)
                .expect("scores are finite")
        });
        order
    }
}

/// Drops questions whose candidates are all positive or all negative.
pub fn clean_filter(sets: Vec<RankedCandidateSet>) -> Vec<RankedCandidateSet> {
    sets.into_iter().filter(|s| !s.is_single_label()).collect()
}

/// Index of the highest-scoring candidate; the lowest index wins ties.
pub fn select_best_answer(set: &RankedCandidateSet) -> usize {
    let mut best = 0;
    for (i, c) in set.candidates.iter().enumerate().skip(1) {
        if c.score > set.candidates[best].score {
            best = i;
        }
    }
    best
}

fn mean(sets: &[RankedCandidateSet], per_set: impl Fn(&RankedCandidateSet) -> Result<f64>) -> Result<f64> {
    if sets.is_empty() {
        return Err(Error::NoQuestions);
    }
    let mut total = 0.0;
    for s in sets {
        total += per_set(s)?;
    }
    Ok(total / sets.len() as f64)
}

fn require_positive(set: &RankedCandidateSet) -> Result<()> {
    if set.positives() == 0 {
        return Err(Error::NoPositive {
            question_id: set.question_id.clone(),
        });
    }
    Ok(())
}

pub fn precision_at_1(sets: &[RankedCandidateSet]) -> Result<f64> {
    mean(sets, |s| Ok(f64::from(s.candidates[select_best_answer(s)].label)))
}

/// Average precision of one question, normalised by the positives present.
pub fn average_precision(set: &RankedCandidateSet) -> Result<f64> {
    require_positive(set)?;
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (rank, &i) in set.ranking().iter().enumerate() {
        if set.candidates[i].label == 1 {
            hits += 1;
            sum += hits as f64 / (rank + 1) as f64;
        }
    }
    Ok(sum / hits as f64)
}

pub fn reciprocal_rank(set: &RankedCandidateSet) -> Result<f64> {
    require_positive(set)?;
    let rank = set
        .ranking()
        .iter()
        .position(|&i| set.candidates[i].label == 1)
        .expect("a positive exists");
    Ok(1.0 / (rank + 1) as f64)
}

pub fn mean_average_precision(sets: &[RankedCandidateSet]) -> Result<f64> {
    mean(sets, average_precision)
}

pub fn mean_reciprocal_rank(sets: &[RankedCandidateSet]) -> Result<f64> {
    mean(sets, reciprocal_rank)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub p_at_1: f64,
    pub map: f64,
    pub mrr: f64,
    pub questions_evaluated: usize,
    pub questions_removed_by_clean: usize,
}

impl EvalReport {
    pub fn table(&self) -> String {
        format!(
            "questions evaluated  {}\nremoved (clean)      {}\nP@1                  {:.4}\nMAP                  {:.4}\nMRR                  {:.4}\n",
            self.questions_evaluated, self.questions_removed_by_clean, self.p_at_1, self.map, self.mrr
        )
    }
}

/// Applies the clean filter (unless `clean` is false) and computes all metrics.
pub fn evaluate(sets: Vec<RankedCandidateSet>, clean: bool) -> Result<EvalReport> {
    let input = sets.len();
    let kept = if clean { clean_filter(sets) } else { sets };
    Ok(EvalReport {
        p_at_1: precision_at_1(&kept)?,
        map: mean_average_precision(&kept)?,
        mrr: mean_reciprocal_rank(&kept)?,
        questions_evaluated: kept.len(),
        questions_removed_by_clean: input - kept.len(),
    })
}
