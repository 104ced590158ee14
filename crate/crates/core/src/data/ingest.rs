//! CSV ingestion: raw interaction logs to an indexed dataset.
//!
//! Expected layout (header required):
//! `student_id,question_id,skill_ids,correct,response_time_ms,question_type`
//! where `skill_ids` is a `;`-separated list, `correct` is `0` or `1`, and
//! the last two columns may be blank or absent. Extra columns are allowed
//! and usable as filter targets.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use crate::error::{PebgError, Result};

use super::{IdMaps, InteractionDataset, StudentSequence};

/// Knobs for [`ingest`].
#[derive(Debug, Clone)]
pub struct IngestOptions {
    /// Students with fewer surviving records than this are dropped.
    pub min_seq_len: usize,
    /// Rows where column `name` equals `value` are dropped
    /// (e.g. a scaffolding flag column).
    pub column_filters: Vec<(String, String)>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            min_seq_len: 3,
            column_filters: Vec::new(),
        }
    }
}

/// Row/record counters reported alongside the ingested dataset.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub rows_read: usize,
    pub rows_dropped_no_skill: usize,
    pub rows_dropped_by_filter: usize,
    pub students_dropped_short: usize,
    pub records_kept: usize,
}

struct RawRow {
    student: String,
    question: String,
    skills: Vec<String>,
    correct: bool,
    response_time_ms: Option<f64>,
    question_type: Option<String>,
}

fn parse_err(line: u64, msg: impl Into<String>) -> PebgError {
    PebgError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parse an interaction log into an indexed dataset.
///
/// Index maps are assigned in first-seen order over the records that
/// survive filtering, so the result is deterministic given input order.
pub fn ingest<R: Read>(reader: R, options: &IngestOptions) -> Result<(InteractionDataset, IngestStats)> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = csv_reader
        .headers()
        .map_err(|e| parse_err(1, format!("cannot read header: {e}")))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let required = |name: &str| {
        col(name).ok_or_else(|| parse_err(1, format!("missing required column '{name}'")))
    };
    let c_student = required("student_id")?;
    let c_question = required("question_id")?;
    let c_skills = required("skill_ids")?;
    let c_correct = required("correct")?;
    let c_rt = col("response_time_ms");
    let c_type = col("question_type");

    let mut filters = Vec::new();
    for (name, value) in &options.column_filters {
        let idx = col(name).ok_or_else(|| {
            PebgError::Config(format!("filter column '{name}' not present in header"))
        })?;
        filters.push((idx, value.clone()));
    }

    let mut stats = IngestStats::default();
    let mut rows: Vec<RawRow> = Vec::new();
    for record in csv_reader.records() {
        let record = record.map_err(|e| {
            let line = e
                .position()
                .map(|p| p.line())
                .unwrap_or(0);
            parse_err(line, format!("malformed row: {e}"))
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        stats.rows_read += 1;

        if filters
            .iter()
            .any(|(idx, value)| record.get(*idx).is_some_and(|v| v == value))
        {
            stats.rows_dropped_by_filter += 1;
            continue;
        }

        let field = |idx: usize| -> Result<&str> {
            record
                .get(idx)
                .ok_or_else(|| parse_err(line, format!("row has only {} columns", record.len())))
        };
        let skills: Vec<String> = field(c_skills)?
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        if skills.is_empty() {
            stats.rows_dropped_no_skill += 1;
            continue;
        }
        let correct = match field(c_correct)? {
            "0" => false,
            "1" => true,
            other => {
                return Err(parse_err(
                    line,
                    format!("correct flag must be 0 or 1, found '{other}'"),
                ))
            }
        };
        let response_time_ms = match c_rt.and_then(|i| record.get(i)) {
            None | Some("") => None,
            Some(raw) => {
                let ms: f64 = raw
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad response_time_ms '{raw}'")))?;
                if !ms.is_finite() || ms < 0.0 {
                    return Err(parse_err(
                        line,
                        format!("response_time_ms must be non-negative, found '{raw}'"),
                    ));
                }
                Some(ms)
            }
        };
        let question_type = match c_type.and_then(|i| record.get(i)) {
            None | Some("") => None,
            Some(raw) => Some(raw.to_string()),
        };

        rows.push(RawRow {
            student: field(c_student)?.to_string(),
            question: field(c_question)?.to_string(),
            skills,
            correct,
            response_time_ms,
            question_type,
        });
    }

    // Group rows by student, preserving both student first-seen order and
    // each student's row order.
    let mut student_order: Vec<String> = Vec::new();
    let mut by_student: HashMap<String, Vec<RawRow>> = HashMap::new();
    for row in rows {
        if !by_student.contains_key(&row.student) {
            student_order.push(row.student.clone());
        }
        by_student.entry(row.student.clone()).or_default().push(row);
    }

    // Indices are assigned over surviving records only, so every question
    // and skill in the dataset is backed by at least one record.
    let mut question_ids: Vec<String> = Vec::new();
    let mut question_lookup: HashMap<String, u32> = HashMap::new();
    let mut skill_ids: Vec<String> = Vec::new();
    let mut skill_lookup: HashMap<String, u32> = HashMap::new();
    let mut type_labels: Vec<String> = Vec::new();
    let mut type_lookup: HashMap<String, u32> = HashMap::new();

    let mut students = Vec::new();
    for student_id in student_order {
        let rows = by_student.remove(&student_id).unwrap();
        if rows.len() < options.min_seq_len {
            stats.students_dropped_short += 1;
            continue;
        }
        let mut records = Vec::with_capacity(rows.len());
        for row in rows {
            let question = *question_lookup.entry(row.question.clone()).or_insert_with(|| {
                question_ids.push(row.question.clone());
                (question_ids.len() - 1) as u32
            });
            let mut skills: Vec<u32> = row
                .skills
                .iter()
                .map(|raw| {
                    *skill_lookup.entry(raw.clone()).or_insert_with(|| {
                        skill_ids.push(raw.clone());
                        (skill_ids.len() - 1) as u32
                    })
                })
                .collect();
            skills.sort_unstable();
            skills.dedup();
            let question_type = row.question_type.as_ref().map(|label| {
                *type_lookup.entry(label.clone()).or_insert_with(|| {
                    type_labels.push(label.clone());
                    (type_labels.len() - 1) as u32
                })
            });
            records.push(super::InteractionRecord {
                question,
                skills,
                correct: row.correct,
                response_time_ms: row.response_time_ms,
                question_type,
            });
        }
        stats.records_kept += records.len();
        students.push(StudentSequence {
            student_id,
            records,
        });
    }

    if students.is_empty() {
        return Err(PebgError::EmptyDataset);
    }

    let ids = Arc::new(IdMaps::from_vectors(question_ids, skill_ids, type_labels));
    Ok((InteractionDataset::new(students, ids), stats))
}

/// [`ingest`] from a file path.
pub fn ingest_path(path: &Path, options: &IngestOptions) -> Result<(InteractionDataset, IngestStats)> {
    let file = std::fs::File::open(path)?;
    ingest(std::io::BufReader::new(file), options)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
student_id,question_id,skill_ids,correct,response_time_ms,question_type
u1,qa,s1,1,1000,choice
u1,qb,s1;s2,0,3000,fillin
u1,qc,s2,1,,choice
u2,qb,s1;s2,1,2000,fillin
u2,qa,s1,0,,
u2,qd,s2,1,500,choice
u3,qe,s1,1,100,choice
u3,qe,s1,0,200,choice
u3,qa,s1,1,300,choice
";

    #[test]
    fn counts_distinct_ids() {
        let (ds, stats) = ingest(SAMPLE.as_bytes(), &IngestOptions::default()).unwrap();
        assert_eq!(ds.num_students(), 3);
        assert_eq!(ds.num_questions(), 5);
        assert_eq!(ds.num_skills(), 2);
        assert_eq!(stats.records_kept, 9);
        assert_eq!(stats.rows_read, 9);
        // first-seen order
        assert_eq!(ds.question_id(0), "qa");
        assert_eq!(ds.skill_id(1), "s2");
    }

    #[test]
    fn short_student_removed() {
        let input = "\
student_id,question_id,skill_ids,correct
u1,qa,s1,1
u1,qb,s1,0
u1,qc,s1,1
u2,qa,s1,1
u2,qb,s1,0
";
        let (ds, stats) = ingest(input.as_bytes(), &IngestOptions::default()).unwrap();
        assert_eq!(ds.num_students(), 1);
        assert_eq!(stats.students_dropped_short, 1);
        assert!(ds.students.iter().all(|s| s.student_id != "u2"));
    }

    #[test]
    fn empty_skill_row_dropped() {
        let input = "\
student_id,question_id,skill_ids,correct
u1,qa,s1,1
u1,qb,,0
u1,qc,s1,1
u1,qd,s1,0
";
        let (ds, stats) = ingest(input.as_bytes(), &IngestOptions::default()).unwrap();
        assert_eq!(stats.rows_dropped_no_skill, 1);
        assert_eq!(ds.num_questions(), 3);
    }

    #[test]
    fn malformed_correct_flag_names_line() {
        let input = "\
student_id,question_id,skill_ids,correct
u1,qa,s1,1
u1,qb,s1,yes
";
        let err = ingest(input.as_bytes(), &IngestOptions::default()).unwrap_err();
        match err {
            PebgError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn wrong_column_count_is_parse_error() {
        let input = "\
student_id,question_id,skill_ids,correct
u1,qa,s1,1
u1,qb,s1
";
        let err = ingest(input.as_bytes(), &IngestOptions::default()).unwrap_err();
        assert!(matches!(err, PebgError::Parse { .. }));
    }

    #[test]
    fn column_filter_drops_rows() {
        let input = "\
student_id,question_id,skill_ids,correct,kind
u1,qa,s1,1,main
u1,qb,s1,0,scaffold
u1,qc,s1,1,main
u1,qd,s1,0,main
";
        let options = IngestOptions {
            column_filters: vec![("kind".into(), "scaffold".into())],
            ..IngestOptions::default()
        };
        let (ds, stats) = ingest(input.as_bytes(), &options).unwrap();
        assert_eq!(stats.rows_dropped_by_filter, 1);
        assert_eq!(ds.num_questions(), 3);
    }

    #[test]
    fn empty_after_filtering_errors() {
        let input = "\
student_id,question_id,skill_ids,correct
u1,qa,,1
u1,qb,,0
";
        let err = ingest(input.as_bytes(), &IngestOptions::default()).unwrap_err();
        assert!(matches!(err, PebgError::EmptyDataset));
    }

    #[test]
    fn duplicate_skills_in_row_deduplicated() {
        let input = "\
student_id,question_id,skill_ids,correct
u1,qa,s1;s1;s2,1
u1,qb,s1,0
u1,qc,s2,1
";
        let (ds, _) = ingest(input.as_bytes(), &IngestOptions::default()).unwrap();
        assert_eq!(ds.students[0].records[0].skills, vec![0, 1]);
    }
}
