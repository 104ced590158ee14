//! Interaction dataset: per-student response sequences over dense
//! question/skill indices, plus the id maps tying them back to raw logs.

mod features;
mod ingest;
mod split;

pub use features::{compute_attributes, compute_difficulty, AttributeFeatures, DifficultyVector, FeatureBlock, FeatureKind};
pub use ingest::{ingest, ingest_path, IngestOptions, IngestStats};
pub use split::split;

use std::collections::HashMap;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use crate::error::{PebgError, Result};
use crate::textio::{escape_field, TokenReader};

/// One response record. Position within the student's history is the
/// record's index in [`StudentSequence::records`].
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionRecord {
    pub question: u32,
    /// Sorted, deduplicated, non-empty.
    pub skills: Vec<u32>,
    pub correct: bool,
    pub response_time_ms: Option<f64>,
    /// Index into [`InteractionDataset::type_labels`].
    pub question_type: Option<u32>,
}

/// All records of one student, in response order.
#[derive(Debug, Clone, PartialEq)]
pub struct StudentSequence {
    pub student_id: String,
    pub records: Vec<InteractionRecord>,
}

/// Bijections between raw identifiers and dense indices, shared between a
/// dataset and any views split from it.
#[derive(Debug, PartialEq)]
pub struct IdMaps {
    pub question_ids: Vec<String>,
    pub skill_ids: Vec<String>,
    pub type_labels: Vec<String>,
    question_lookup: HashMap<String, u32>,
    skill_lookup: HashMap<String, u32>,
}

impl IdMaps {
    pub fn from_vectors(
        question_ids: Vec<String>,
        skill_ids: Vec<String>,
        type_labels: Vec<String>,
    ) -> Self {
        let question_lookup = question_ids
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect();
        let skill_lookup = skill_ids
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect();
        IdMaps {
            question_ids,
            skill_ids,
            type_labels,
            question_lookup,
            skill_lookup,
        }
    }

    pub fn question_index(&self, raw: &str) -> Option<u32> {
        self.question_lookup.get(raw).copied()
    }

    pub fn skill_index(&self, raw: &str) -> Option<u32> {
        self.skill_lookup.get(raw).copied()
    }
}

/// Ordered per-student response records with dense indices.
///
/// Immutable once built; views produced by [`split`] share the id maps so
/// indices stay comparable across splits.
#[derive(Debug, Clone)]
pub struct InteractionDataset {
    pub students: Vec<StudentSequence>,
    ids: Arc<IdMaps>,
}

impl InteractionDataset {
    pub fn new(students: Vec<StudentSequence>, ids: Arc<IdMaps>) -> Self {
        InteractionDataset { students, ids }
    }

    pub fn num_questions(&self) -> usize {
        self.ids.question_ids.len()
    }

    pub fn num_skills(&self) -> usize {
        self.ids.skill_ids.len()
    }

    pub fn num_students(&self) -> usize {
        self.students.len()
    }

    pub fn num_records(&self) -> usize {
        self.students.iter().map(|s| s.records.len()).sum()
    }

    pub fn ids(&self) -> &Arc<IdMaps> {
        &self.ids
    }

    pub fn question_id(&self, index: u32) -> &str {
        &self.ids.question_ids[index as usize]
    }

    pub fn skill_id(&self, index: u32) -> &str {
        &self.ids.skill_ids[index as usize]
    }

    pub fn type_labels(&self) -> &[String] {
        &self.ids.type_labels
    }

    /// Iterate over every record across all students.
    pub fn records(&self) -> impl Iterator<Item = &InteractionRecord> {
        self.students.iter().flat_map(|s| s.records.iter())
    }

    /// Verify index ranges and minimum sequence length.
    pub fn validate(&self, min_seq_len: usize) -> Result<()> {
        let nq = self.num_questions() as u32;
        let ns = self.num_skills() as u32;
        for student in &self.students {
            if student.records.len() < min_seq_len {
                return Err(PebgError::Structural(format!(
                    "student '{}' has {} records, below minimum {}",
                    student.student_id,
                    student.records.len(),
                    min_seq_len
                )));
            }
            for rec in &student.records {
                if rec.question >= nq {
                    return Err(PebgError::Structural(format!(
                        "question index {} out of range {nq}",
                        rec.question
                    )));
                }
                if rec.skills.is_empty() {
                    return Err(PebgError::Structural("record with no skills".into()));
                }
                if rec.skills.iter().any(|&s| s >= ns) {
                    return Err(PebgError::Structural("skill index out of range".into()));
                }
            }
        }
        Ok(())
    }

    /// Serialize to the versioned flat text format.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = BufWriter::new(file);
        writeln!(w, "pebg-dataset v1")?;
        writeln!(
            w,
            "counts {} {} {} {} {}",
            self.students.len(),
            self.num_questions(),
            self.num_skills(),
            self.ids.type_labels.len(),
            self.num_records()
        )?;
        for id in &self.ids.question_ids {
            writeln!(w, "question {}", escape_field(id))?;
        }
        for id in &self.ids.skill_ids {
            writeln!(w, "skill {}", escape_field(id))?;
        }
        for label in &self.ids.type_labels {
            writeln!(w, "type {}", escape_field(label))?;
        }
        for student in &self.students {
            writeln!(
                w,
                "student {} {}",
                escape_field(&student.student_id),
                student.records.len()
            )?;
            for rec in &student.records {
                let skills = rec
                    .skills
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join(";");
                let rt = match rec.response_time_ms {
                    Some(ms) => ms.to_string(),
                    None => "-".to_string(),
                };
                let ty = match rec.question_type {
                    Some(t) => t.to_string(),
                    None => "-".to_string(),
                };
                writeln!(
                    w,
                    "r {} {} {} {} {}",
                    rec.question,
                    skills,
                    if rec.correct { 1 } else { 0 },
                    rt,
                    ty
                )?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Load a dataset written by [`InteractionDataset::save`].
    pub fn load(path: &Path) -> Result<Self> {
        let content = std::fs::read_to_string(path)?;
        let path_str = path.display().to_string();
        let mut r = TokenReader::new(&content, &path_str);
        r.expect("pebg-dataset")?;
        r.expect("v1")?;
        r.expect("counts")?;
        let n_students = r.next_usize()?;
        let n_questions = r.next_usize()?;
        let n_skills = r.next_usize()?;
        let n_types = r.next_usize()?;
        let n_records = r.next_usize()?;

        let mut question_ids = Vec::with_capacity(n_questions);
        for _ in 0..n_questions {
            r.expect("question")?;
            question_ids.push(r.next_field()?);
        }
        let mut skill_ids = Vec::with_capacity(n_skills);
        for _ in 0..n_skills {
            r.expect("skill")?;
            skill_ids.push(r.next_field()?);
        }
        let mut type_labels = Vec::with_capacity(n_types);
        for _ in 0..n_types {
            r.expect("type")?;
            type_labels.push(r.next_field()?);
        }

        let mut students = Vec::with_capacity(n_students);
        let mut total_records = 0usize;
        for _ in 0..n_students {
            r.expect("student")?;
            let student_id = r.next_field()?;
            let k = r.next_usize()?;
            let mut records = Vec::with_capacity(k);
            for _ in 0..k {
                r.expect("r")?;
                let question = r.next_u32()?;
                let skill_tok = r.next_token()?.to_string();
                let mut skills = Vec::new();
                for part in skill_tok.split(';') {
                    let idx: u32 = part
                        .parse()
                        .map_err(|_| r.err(format!("bad skill list '{skill_tok}'")))?;
                    skills.push(idx);
                }
                let correct = match r.next_token()? {
                    "0" => false,
                    "1" => true,
                    other => return Err(r.err(format!("bad correct flag '{other}'"))),
                };
                let rt_tok = r.next_token()?;
                let response_time_ms = if rt_tok == "-" {
                    None
                } else {
                    Some(
                        rt_tok
                            .parse()
                            .map_err(|_| r.err(format!("bad response time '{rt_tok}'")))?,
                    )
                };
                let ty_tok = r.next_token()?;
                let question_type = if ty_tok == "-" {
                    None
                } else {
                    Some(
                        ty_tok
                            .parse()
                            .map_err(|_| r.err(format!("bad type index '{ty_tok}'")))?,
                    )
                };
                records.push(InteractionRecord {
                    question,
                    skills,
                    correct,
                    response_time_ms,
                    question_type,
                });
            }
            total_records += records.len();
            students.push(StudentSequence {
                student_id,
                records,
            });
        }
        if total_records != n_records {
            return Err(r.err(format!(
                "record count mismatch: header says {n_records}, found {total_records}"
            )));
        }
        let ids = Arc::new(IdMaps::from_vectors(question_ids, skill_ids, type_labels));
        let ds = InteractionDataset::new(students, ids);
        ds.validate(1)?;
        Ok(ds)
    }
}
