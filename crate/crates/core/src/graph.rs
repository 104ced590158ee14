//! Question-skill bipartite graph and the derived same-side similarity
//! relations.
//!
//! Similarity relations are stored sparse (positive pairs only); negatives
//! are implicit by absence. Two same-side vertices are similar exactly when
//! their neighbor sets intersect, which makes the relations symmetric and
//! reflexive on non-isolated vertices.

use std::collections::HashSet;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::data::InteractionDataset;
use crate::error::{PebgError, Result};
use crate::textio::TokenReader;

fn pack(i: u32, j: u32) -> u64 {
    ((i as u64) << 32) | j as u64
}

fn unpack(p: u64) -> (u32, u32) {
    ((p >> 32) as u32, p as u32)
}

/// Sparse binary relation between questions and skills.
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    num_questions: usize,
    num_skills: usize,
    /// Sorted packed `(question, skill)` pairs.
    edges: Vec<u64>,
    question_neighbors: Vec<Vec<u32>>,
    skill_neighbors: Vec<Vec<u32>>,
}

impl BipartiteGraph {
    /// Build the graph from every record of `dataset`; duplicate
    /// question-skill pairs collapse to one edge.
    pub fn build(dataset: &InteractionDataset) -> Self {
        let mut edge_set: HashSet<u64> = HashSet::new();
        for rec in dataset.records() {
            for &s in &rec.skills {
                edge_set.insert(pack(rec.question, s));
            }
        }
        Self::from_edge_set(dataset.num_questions(), dataset.num_skills(), edge_set)
    }

    /// Build from explicit edges (deduplicated internally).
    pub fn from_edges(
        num_questions: usize,
        num_skills: usize,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Self {
        let edge_set = edges.into_iter().map(|(q, s)| pack(q, s)).collect();
        Self::from_edge_set(num_questions, num_skills, edge_set)
    }

    fn from_edge_set(num_questions: usize, num_skills: usize, edge_set: HashSet<u64>) -> Self {
        let mut edges: Vec<u64> = edge_set.into_iter().collect();
        edges.sort_unstable();
        let mut question_neighbors = vec![Vec::new(); num_questions];
        let mut skill_neighbors = vec![Vec::new(); num_skills];
        for &e in &edges {
            let (q, s) = unpack(e);
            question_neighbors[q as usize].push(s);
            skill_neighbors[s as usize].push(q);
        }
        // edges are sorted by (q, s), so question neighbor lists are already
        // ascending; skill lists need their own sort.
        for list in &mut skill_neighbors {
            list.sort_unstable();
        }
        BipartiteGraph {
            num_questions,
            num_skills,
            edges,
            question_neighbors,
            skill_neighbors,
        }
    }

    pub fn num_questions(&self) -> usize {
        self.num_questions
    }

    pub fn num_skills(&self) -> usize {
        self.num_skills
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, question: u32, skill: u32) -> bool {
        self.edges.binary_search(&pack(question, skill)).is_ok()
    }

    /// Skills of `question`, ascending.
    pub fn question_neighbors(&self, question: u32) -> &[u32] {
        &self.question_neighbors[question as usize]
    }

    /// Questions of `skill`, ascending.
    pub fn skill_neighbors(&self, skill: u32) -> &[u32] {
        &self.skill_neighbors[skill as usize]
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.iter().map(|&e| unpack(e))
    }

    pub fn edge_at(&self, idx: usize) -> (u32, u32) {
        unpack(self.edges[idx])
    }

    /// Write the debug dump: one `q_index s_index` line per edge.
    pub fn dump(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        for (q, s) in self.edges() {
            writeln!(w, "{q} {s}")?;
        }
        w.flush()?;
        Ok(())
    }

    /// Read a dump produced by [`BipartiteGraph::dump`].
    pub fn load_dump(path: &Path, num_questions: usize, num_skills: usize) -> Result<Self> {
        let content = std::fs::read_to_string(path)?;
        let mut r = TokenReader::new(&content, &path.display().to_string());
        let mut edges = Vec::new();
        while !r.at_end() {
            let q = r.next_u32()?;
            let s = r.next_u32()?;
            if q as usize >= num_questions || s as usize >= num_skills {
                return Err(r.err(format!("edge ({q}, {s}) out of range")));
            }
            edges.push((q, s));
        }
        Ok(Self::from_edges(num_questions, num_skills, edges))
    }
}

/// Which side of the bipartite graph a similarity relation lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Question,
    Skill,
}

/// Sparse symmetric binary relation over same-side vertex pairs.
///
/// Pairs are stored normalized with `i <= j`; the diagonal is present for
/// every vertex with at least one neighbor.
#[derive(Debug, Clone)]
pub struct SimilarityRelation {
    pub side: Side,
    num_vertices: usize,
    /// Sorted packed pairs with `i <= j`.
    pairs: Vec<u64>,
}

impl SimilarityRelation {
    fn from_pair_set(side: Side, num_vertices: usize, set: HashSet<u64>) -> Self {
        let mut pairs: Vec<u64> = set.into_iter().collect();
        pairs.sort_unstable();
        SimilarityRelation {
            side,
            num_vertices,
            pairs,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// Number of stored (unordered) positive pairs, diagonal included.
    pub fn num_pairs(&self) -> usize {
        self.pairs.len()
    }

    pub fn contains(&self, i: u32, j: u32) -> bool {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.pairs.binary_search(&pack(a, b)).is_ok()
    }

    /// Iterate stored pairs `(i, j)` with `i <= j`.
    pub fn pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.pairs.iter().map(|&p| unpack(p))
    }

    pub fn pair_at(&self, idx: usize) -> (u32, u32) {
        unpack(self.pairs[idx])
    }
}

/// Question-question similarity: `(i, j)` is positive iff some skill links
/// to both. Built by unioning, per skill, all question pairs among its
/// neighbors — never by scanning all `|Q|^2` pairs.
pub fn question_similarity(graph: &BipartiteGraph) -> SimilarityRelation {
    similarity_from_groups(
        Side::Question,
        graph.num_questions(),
        (0..graph.num_skills() as u32).map(|s| graph.skill_neighbors(s)),
    )
}

/// Skill-skill similarity: mirror of [`question_similarity`].
pub fn skill_similarity(graph: &BipartiteGraph) -> SimilarityRelation {
    similarity_from_groups(
        Side::Skill,
        graph.num_skills(),
        (0..graph.num_questions() as u32).map(|q| graph.question_neighbors(q)),
    )
}

fn similarity_from_groups<'a>(
    side: Side,
    num_vertices: usize,
    groups: impl Iterator<Item = &'a [u32]>,
) -> SimilarityRelation {
    let mut set: HashSet<u64> = HashSet::new();
    for members in groups {
        for (a_pos, &a) in members.iter().enumerate() {
            // Diagonal: a vertex with any neighbor is similar to itself.
            set.insert(pack(a, a));
            for &b in &members[a_pos + 1..] {
                set.insert(pack(a, b));
            }
        }
    }
    SimilarityRelation::from_pair_set(side, num_vertices, set)
}
