//! Per-question difficulty and attribute features, both computed from the
//! training split only.

use std::collections::HashMap;

use ndarray::{Array2, ArrayView1};

use crate::error::{PebgError, Result};

use super::InteractionDataset;

/// Per-question correct-answer ratio over the training split.
///
/// Questions never answered in training carry the sentinel 0.5 and
/// `observed = false`; they are excluded from the difficulty loss.
#[derive(Debug, Clone)]
pub struct DifficultyVector {
    pub values: Vec<f64>,
    pub observed: Vec<bool>,
}

impl DifficultyVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Indices of questions observed in training.
    pub fn observed_questions(&self) -> Vec<u32> {
        self.observed
            .iter()
            .enumerate()
            .filter(|(_, &o)| o)
            .map(|(i, _)| i as u32)
            .collect()
    }
}

/// Fraction of correct answers per question over `train`.
pub fn compute_difficulty(train: &InteractionDataset) -> Result<DifficultyVector> {
    if train.students.is_empty() {
        return Err(PebgError::EmptyDataset);
    }
    let nq = train.num_questions();
    let mut attempts = vec![0u64; nq];
    let mut correct = vec![0u64; nq];
    for rec in train.records() {
        attempts[rec.question as usize] += 1;
        if rec.correct {
            correct[rec.question as usize] += 1;
        }
    }
    let mut values = vec![0.5; nq];
    let mut observed = vec![false; nq];
    for q in 0..nq {
        if attempts[q] > 0 {
            values[q] = correct[q] as f64 / attempts[q] as f64;
            observed[q] = true;
        }
    }
    Ok(DifficultyVector { values, observed })
}

/// What a feature block holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    Numerical,
    Categorical,
}

/// One block of the attribute layout.
#[derive(Debug, Clone)]
pub struct FeatureBlock {
    pub name: String,
    pub kind: FeatureKind,
    pub offset: usize,
    pub width: usize,
}

/// Per-question raw attribute vectors with a shared layout.
///
/// Numerical features are z-scored over the training split; categorical
/// features are one-hot over the dataset's label vocabulary.
#[derive(Debug, Clone)]
pub struct AttributeFeatures {
    /// `num_questions x raw_dim`.
    pub matrix: Array2<f64>,
    pub layout: Vec<FeatureBlock>,
}

impl AttributeFeatures {
    pub fn raw_dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn row(&self, question: u32) -> ArrayView1<'_, f64> {
        self.matrix.row(question as usize)
    }
}

/// Build the attribute matrix for every question from training records.
///
/// Supported feature names: `response_time` (numerical, mean over the
/// question's timed training attempts) and `question_type` (categorical,
/// modal label). Questions without observations get the training mean
/// (zero after standardization) or an all-zero one-hot block.
pub fn compute_attributes(
    train: &InteractionDataset,
    feature_selection: &[String],
) -> Result<AttributeFeatures> {
    let nq = train.num_questions();
    let mut layout = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut offset = 0usize;

    for name in feature_selection {
        match name.as_str() {
            "response_time" => {
                let mut sums = vec![0.0f64; nq];
                let mut counts = vec![0u64; nq];
                for rec in train.records() {
                    if let Some(ms) = rec.response_time_ms {
                        sums[rec.question as usize] += ms;
                        counts[rec.question as usize] += 1;
                    }
                }
                let mut means = vec![f64::NAN; nq];
                let mut observed_means = Vec::new();
                for q in 0..nq {
                    if counts[q] > 0 {
                        means[q] = sums[q] / counts[q] as f64;
                        observed_means.push(means[q]);
                    }
                }
                // z-score with training statistics (population variance); a
                // constant column standardizes to zero.
                let (mean, std) = if observed_means.is_empty() {
                    (0.0, 0.0)
                } else {
                    let m =
                        observed_means.iter().sum::<f64>() / observed_means.len() as f64;
                    let var = observed_means
                        .iter()
                        .map(|x| (x - m) * (x - m))
                        .sum::<f64>()
                        / observed_means.len() as f64;
                    (m, var.sqrt())
                };
                let column = means
                    .iter()
                    .map(|&v| {
                        if v.is_nan() || std == 0.0 {
                            0.0
                        } else {
                            (v - mean) / std
                        }
                    })
                    .collect();
                columns.push(column);
                layout.push(FeatureBlock {
                    name: name.clone(),
                    kind: FeatureKind::Numerical,
                    offset,
                    width: 1,
                });
                offset += 1;
            }
            "question_type" => {
                let width = train.type_labels().len();
                // Modal label per question; ties broken by the label that
                // appears first in the question's record stream.
                let mut tallies: Vec<HashMap<u32, (usize, usize)>> = vec![HashMap::new(); nq];
                let mut seen = 0usize;
                for rec in train.records() {
                    if let Some(t) = rec.question_type {
                        let entry = tallies[rec.question as usize]
                            .entry(t)
                            .or_insert((0, seen));
                        entry.0 += 1;
                        seen += 1;
                    }
                }
                let mut block = vec![vec![0.0f64; nq]; width];
                for q in 0..nq {
                    let modal = tallies[q]
                        .iter()
                        .max_by(|a, b| {
                            a.1 .0
                                .cmp(&b.1 .0)
                                .then(b.1 .1.cmp(&a.1 .1))
                        })
                        .map(|(&label, _)| label);
                    if let Some(label) = modal {
                        block[label as usize][q] = 1.0;
                    }
                }
                for col in block {
                    columns.push(col);
                }
                layout.push(FeatureBlock {
                    name: name.clone(),
                    kind: FeatureKind::Categorical,
                    offset,
                    width,
                });
                offset += width;
            }
            other => {
                return Err(PebgError::Config(format!(
                    "unknown attribute feature '{other}' (supported: response_time, question_type)"
                )))
            }
        }
    }

    let raw_dim = offset;
    let mut matrix = Array2::<f64>::zeros((nq, raw_dim));
    for (c, col) in columns.iter().enumerate() {
        for q in 0..nq {
            matrix[[q, c]] = col[q];
        }
    }
    Ok(AttributeFeatures { matrix, layout })
}

#[cfg(test)]
mod tests {
    use super::super::testutil::toy_dataset;
    use super::*;

    #[test]
    fn difficulty_is_correct_ratio() {
        let ds = toy_dataset();
        let d = compute_difficulty(&ds).unwrap();
        // q0 answered twice, once correct; q1 twice, once correct; q2 twice, both correct.
        assert_eq!(d.values[0], 0.5);
        assert_eq!(d.values[1], 0.5);
        assert_eq!(d.values[2], 1.0);
        assert!(d.observed.iter().all(|&o| o));
    }

    #[test]
    fn unanswered_question_gets_sentinel() {
        let mut ds = toy_dataset();
        // Remove every record touching q2.
        for s in &mut ds.students {
            s.records.retain(|r| r.question != 2);
        }
        let d = compute_difficulty(&ds).unwrap();
        assert!(!d.observed[2]);
        assert_eq!(d.values[2], 0.5);
        assert_eq!(d.observed_questions(), vec![0, 1]);
    }

    #[test]
    fn single_incorrect_answer_gives_zero() {
        let mut ds = toy_dataset();
        ds.students.truncate(1);
        ds.students[0].records.truncate(3);
        ds.students[0].records[1].correct = false;
        let d = compute_difficulty(&ds).unwrap();
        assert_eq!(d.values[1], 0.0);
        assert!(d.observed[1]);
    }

    #[test]
    fn response_time_standardized() {
        let ds = toy_dataset();
        let attrs = compute_attributes(&ds, &["response_time".to_string()]).unwrap();
        assert_eq!(attrs.raw_dim(), 1);
        // Raw means: q0 -> 1000, q1 -> 2500, q2 -> 500. Standardized column
        // must have zero mean, unit variance (population) over observed rows.
        let col: Vec<f64> = (0..3).map(|q| attrs.matrix[[q, 0]]).collect();
        let mean = col.iter().sum::<f64>() / 3.0;
        let var = col.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / 3.0;
        assert!(mean.abs() < 1e-9, "mean {mean}");
        assert!((var - 1.0).abs() < 1e-9, "var {var}");
    }

    #[test]
    fn raw_mean_before_standardization() {
        // response times {1000, 3000} -> raw mean 2000.
        let mut ds = toy_dataset();
        ds.students[1].records[0].response_time_ms = Some(1000.0);
        // q1 now has times 3000 (u1) and 1000 (u2).
        let mut sums = 0.0;
        let mut count = 0;
        for rec in ds.records() {
            if rec.question == 1 {
                if let Some(ms) = rec.response_time_ms {
                    sums += ms;
                    count += 1;
                }
            }
        }
        assert_eq!(sums / count as f64, 2000.0);
    }

    #[test]
    fn question_type_one_hot_by_first_appearance() {
        let ds = toy_dataset();
        let attrs = compute_attributes(&ds, &["question_type".to_string()]).unwrap();
        assert_eq!(attrs.raw_dim(), 2);
        // q0's records are all "choice" (label 0) -> one-hot (1, 0).
        assert_eq!(attrs.matrix[[0, 0]], 1.0);
        assert_eq!(attrs.matrix[[0, 1]], 0.0);
        // q1 is "fillin" both times -> (0, 1).
        assert_eq!(attrs.matrix[[1, 0]], 0.0);
        assert_eq!(attrs.matrix[[1, 1]], 1.0);
    }

    #[test]
    fn modal_tie_broken_by_first_appearance() {
        let mut ds = toy_dataset();
        // q2 seen with type 0 (u1) and no type (u2): single vote for 0.
        // Give u2's q2 record type 1 so the question ties 1-1; u1's record
        // comes first in the stream, so label 0 wins.
        ds.students[1].records[2].question_type = Some(1);
        let attrs = compute_attributes(&ds, &["question_type".to_string()]).unwrap();
        assert_eq!(attrs.matrix[[2, 0]], 1.0);
        assert_eq!(attrs.matrix[[2, 1]], 0.0);
    }

    #[test]
    fn unknown_feature_rejected() {
        let ds = toy_dataset();
        let err = compute_attributes(&ds, &["grade_level".to_string()]).unwrap_err();
        assert!(matches!(err, PebgError::Config(_)));
    }

    #[test]
    fn layout_identical_width_for_all_questions() {
        let ds = toy_dataset();
        let attrs = compute_attributes(
            &ds,
            &["response_time".to_string(), "question_type".to_string()],
        )
        .unwrap();
        assert_eq!(attrs.matrix.nrows(), ds.num_questions());
        assert_eq!(attrs.raw_dim(), 3);
        assert_eq!(attrs.layout.len(), 2);
        assert_eq!(attrs.layout[1].offset, 1);
        assert_eq!(attrs.layout[1].width, 2);
    }
}
