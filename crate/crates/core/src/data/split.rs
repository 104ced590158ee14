//! Train/test partition by student.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{PebgError, Result};

use super::InteractionDataset;

/// Partition a dataset by student: a student's whole sequence lands on one
/// side. Both views share the original id maps, so question and skill
/// indices remain comparable. Deterministic given `seed`.
pub fn split(
    dataset: &InteractionDataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(InteractionDataset, InteractionDataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(PebgError::Split(format!(
            "train_fraction must be in (0, 1), got {train_fraction}"
        )));
    }
    let n = dataset.num_students();
    if n < 2 {
        return Err(PebgError::Split(format!(
            "need at least 2 students to split, got {n}"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let n_train = (train_fraction * n as f64).round() as usize;
    let n_train = n_train.clamp(1, n - 1);

    let mut train_mask = vec![false; n];
    for &idx in order.iter().take(n_train) {
        train_mask[idx] = true;
    }

    let pick = |keep: bool| {
        let students = dataset
            .students
            .iter()
            .enumerate()
            .filter(|(i, _)| train_mask[*i] == keep)
            .map(|(_, s)| s.clone())
            .collect();
        InteractionDataset::new(students, dataset.ids().clone())
    };
    Ok((pick(true), pick(false)))
}

#[cfg(test)]
mod tests {
    use super::super::testutil::toy_dataset;
    use super::super::{InteractionDataset, StudentSequence};
    use super::*;

    fn dataset_with_students(n: usize) -> InteractionDataset {
        let base = toy_dataset();
        let template = base.students[0].records.clone();
        let students = (0..n)
            .map(|i| StudentSequence {
                student_id: format!("u{i}"),
                records: template.clone(),
            })
            .collect();
        InteractionDataset::new(students, base.ids().clone())
    }

    #[test]
    fn fraction_rounds_to_student_count() {
        let ds = dataset_with_students(10);
        let (train, test) = split(&ds, 0.8, 7).unwrap();
        assert_eq!(train.num_students(), 8);
        assert_eq!(test.num_students(), 2);
    }

    #[test]
    fn same_seed_same_partition() {
        let ds = dataset_with_students(12);
        let (a_train, _) = split(&ds, 0.75, 99).unwrap();
        let (b_train, _) = split(&ds, 0.75, 99).unwrap();
        let ids = |d: &InteractionDataset| {
            d.students
                .iter()
                .map(|s| s.student_id.clone())
                .collect::<Vec<_>>()
        };
        assert_eq!(ids(&a_train), ids(&b_train));
    }

    #[test]
    fn bad_fraction_rejected() {
        let ds = dataset_with_students(4);
        assert!(split(&ds, 1.0, 0).is_err());
        assert!(split(&ds, 0.0, 0).is_err());
    }

    #[test]
    fn too_few_students_rejected() {
        let ds = dataset_with_students(1);
        assert!(matches!(split(&ds, 0.5, 0), Err(PebgError::Split(_))));
    }

    #[test]
    fn split_is_a_partition() {
        let ds = dataset_with_students(9);
        let (train, test) = split(&ds, 0.6, 3).unwrap();
        let mut all: Vec<String> = train
            .students
            .iter()
            .chain(test.students.iter())
            .map(|s| s.student_id.clone())
            .collect();
        all.sort();
        let mut expected: Vec<String> = ds.students.iter().map(|s| s.student_id.clone()).collect();
        expected.sort();
        assert_eq!(all, expected);
    }
}
