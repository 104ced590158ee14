//! Positive/negative pair sampling for the graph losses.
//!
//! The losses are defined over all vertex pairs; training instead walks
//! every positive once per pass and draws `k` uniform negatives per
//! positive, rejecting pairs that are actually positive.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{PebgError, Result};
use crate::graph::{BipartiteGraph, SimilarityRelation};

/// Retries per negative before giving up on a (near-)dense relation.
const NEGATIVE_RETRIES: usize = 100;

/// A labeled pair batch. `i` indexes questions; `j` indexes skills for the
/// explicit relation and same-side vertices for similarity relations.
#[derive(Debug, Clone)]
pub struct PairBatch {
    pub pairs: Vec<(u32, u32, bool)>,
    /// True when some negative draw exhausted its retry budget.
    pub negatives_exhausted: bool,
}

/// A pair relation that can be sampled: dimensions of the pair space,
/// indexed positives, and membership.
pub trait PairSet {
    /// (rows, cols) of the pair index space.
    fn dims(&self) -> (u32, u32);
    fn num_positives(&self) -> usize;
    fn positive_at(&self, idx: usize) -> (u32, u32);
    fn contains_pair(&self, i: u32, j: u32) -> bool;
}

impl PairSet for BipartiteGraph {
    fn dims(&self) -> (u32, u32) {
        (self.num_questions() as u32, self.num_skills() as u32)
    }

    fn num_positives(&self) -> usize {
        self.edge_count()
    }

    fn positive_at(&self, idx: usize) -> (u32, u32) {
        self.edge_at(idx)
    }

    fn contains_pair(&self, i: u32, j: u32) -> bool {
        self.has_edge(i, j)
    }
}

impl PairSet for SimilarityRelation {
    fn dims(&self) -> (u32, u32) {
        (self.num_vertices() as u32, self.num_vertices() as u32)
    }

    fn num_positives(&self) -> usize {
        self.num_pairs()
    }

    fn positive_at(&self, idx: usize) -> (u32, u32) {
        self.pair_at(idx)
    }

    fn contains_pair(&self, i: u32, j: u32) -> bool {
        self.contains(i, j)
    }
}

/// Emit one full pass: every positive once (shuffled), each followed by
/// `num_negatives_per_positive` verified negatives.
pub fn sample_pairs<S: PairSet + ?Sized>(
    set: &S,
    num_negatives_per_positive: usize,
    rng: &mut ChaCha8Rng,
) -> Result<PairBatch> {
    let n = set.num_positives();
    if n == 0 {
        return Err(PebgError::EmptyRelation);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let mut pairs = Vec::with_capacity(n * (1 + num_negatives_per_positive));
    let mut negatives_exhausted = false;
    for idx in order {
        let (i, j) = set.positive_at(idx);
        pairs.push((i, j, true));
        for _ in 0..num_negatives_per_positive {
            match draw_negative(set, rng) {
                Some((ni, nj)) => pairs.push((ni, nj, false)),
                None => negatives_exhausted = true,
            }
        }
    }
    Ok(PairBatch {
        pairs,
        negatives_exhausted,
    })
}

fn draw_negative<S: PairSet + ?Sized>(set: &S, rng: &mut ChaCha8Rng) -> Option<(u32, u32)> {
    let (rows, cols) = set.dims();
    for _ in 0..NEGATIVE_RETRIES {
        let i = rng.gen_range(0..rows);
        let j = rng.gen_range(0..cols);
        if !set.contains_pair(i, j) {
            return Some((i, j));
        }
    }
    None
}

/// Cycling mini-batch source over a pair relation: concatenates full passes
/// from [`sample_pairs`], reshuffling at each pass boundary.
pub struct PairStream<'a> {
    set: &'a dyn PairSet,
    neg_ratio: usize,
    rng: ChaCha8Rng,
    current: Vec<(u32, u32, bool)>,
    cursor: usize,
}

impl<'a> PairStream<'a> {
    pub fn new(set: &'a dyn PairSet, neg_ratio: usize, rng: ChaCha8Rng) -> Result<Self> {
        let mut stream = PairStream {
            set,
            neg_ratio,
            rng,
            current: Vec::new(),
            cursor: 0,
        };
        stream.refill()?;
        Ok(stream)
    }

    fn refill(&mut self) -> Result<()> {
        let batch = sample_pairs(self.set, self.neg_ratio, &mut self.rng)?;
        self.current = batch.pairs;
        self.cursor = 0;
        Ok(())
    }

    /// Next `size` labeled pairs, crossing pass boundaries as needed.
    pub fn next_batch(&mut self, size: usize) -> Result<Vec<(u32, u32, bool)>> {
        let mut out = Vec::with_capacity(size);
        while out.len() < size {
            if self.cursor == self.current.len() {
                self.refill()?;
            }
            let take = (size - out.len()).min(self.current.len() - self.cursor);
            out.extend_from_slice(&self.current[self.cursor..self.cursor + take]);
            self.cursor += take;
        }
        Ok(out)
    }

    /// Pairs per full pass over the relation.
    pub fn pass_len(&self) -> usize {
        self.set.num_positives() * (1 + self.neg_ratio)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{question_similarity, BipartiteGraph};
    use rand::SeedableRng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn pass_contains_each_positive_once_plus_negatives() {
        let graph = BipartiteGraph::from_edges(4, 3, vec![(0, 0), (1, 0), (2, 1), (3, 2)]);
        let batch = sample_pairs(&graph, 1, &mut rng(1)).unwrap();
        assert_eq!(batch.pairs.len(), 8);
        let mut positives: Vec<(u32, u32)> = batch
            .pairs
            .iter()
            .filter(|(_, _, l)| *l)
            .map(|&(i, j, _)| (i, j))
            .collect();
        positives.sort_unstable();
        assert_eq!(positives, vec![(0, 0), (1, 0), (2, 1), (3, 2)]);
    }

    #[test]
    fn negatives_verified_against_relation() {
        let graph = BipartiteGraph::from_edges(5, 4, vec![(0, 0), (1, 1), (2, 2), (3, 3), (4, 0)]);
        let batch = sample_pairs(&graph, 3, &mut rng(2)).unwrap();
        for &(i, j, label) in &batch.pairs {
            if !label {
                assert!(!graph.has_edge(i, j));
            }
        }
        assert!(!batch.negatives_exhausted);
    }

    #[test]
    fn empty_relation_signals() {
        let graph = BipartiteGraph::from_edges(3, 3, Vec::<(u32, u32)>::new());
        assert!(matches!(
            sample_pairs(&graph, 1, &mut rng(3)),
            Err(PebgError::EmptyRelation)
        ));
    }

    #[test]
    fn dense_relation_exhausts_negatives() {
        // Star graph: every question similar to every other, no negatives exist.
        let edges: Vec<(u32, u32)> = (0..4).map(|q| (q, 0)).collect();
        let graph = BipartiteGraph::from_edges(4, 1, edges);
        let rel = question_similarity(&graph);
        let batch = sample_pairs(&rel, 1, &mut rng(4)).unwrap();
        assert!(batch.negatives_exhausted);
        assert!(batch.pairs.iter().all(|&(_, _, label)| label));
    }

    #[test]
    fn deterministic_given_rng_state() {
        let graph = BipartiteGraph::from_edges(6, 4, vec![(0, 0), (1, 1), (2, 2), (3, 3), (4, 1), (5, 2)]);
        let a = sample_pairs(&graph, 2, &mut rng(7)).unwrap();
        let b = sample_pairs(&graph, 2, &mut rng(7)).unwrap();
        assert_eq!(a.pairs, b.pairs);
    }

    #[test]
    fn stream_crosses_pass_boundaries() {
        let graph = BipartiteGraph::from_edges(3, 2, vec![(0, 0), (1, 1), (2, 0)]);
        let mut stream = PairStream::new(&graph, 1, rng(5)).unwrap();
        assert_eq!(stream.pass_len(), 6);
        let batch = stream.next_batch(10).unwrap();
        assert_eq!(batch.len(), 10);
        let positives = batch.iter().filter(|(_, _, l)| *l).count();
        // 10 pairs = one full pass (3 pos) + 4 from the next (2 pos).
        assert_eq!(positives, 5);
    }
}
