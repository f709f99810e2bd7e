//! Ordered-reliability noise-pattern generation.
//!
//! Positions are ranked by increasing `|L|`. A pattern's logistic weight is
//! the sum of the ranks of its flipped positions, and patterns are produced
//! in increasing `(logistic weight, flip count, ordinal ranks)` order.
//! Positions with exactly equal `|L|` share one rank value, so with uniform
//! reliabilities the order reduces to increasing flip count, i.e. exact
//! likelihood order.
//!
//! Generation is best-first over the subset tree whose successors are
//! "append the next ordinal" and "advance the last ordinal". Both successors
//! never decrease the ordering key, so a min-heap pops subsets in sorted
//! order and every subset is produced exactly once.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::channel::{clamp_llr, llr_to_prob};
use crate::gf2::BitVector;

/// Reliability ordering of a soft-input vector.
#[derive(Debug, Clone)]
pub struct RankedInput {
    // ordinal (0-based) -> original position
    perm: Vec<usize>,
    // rank value per ordinal, 1-based, shared by equal |L|
    rank_values: Vec<usize>,
    // |L| per ordinal, non-decreasing
    abs_llr: Vec<f64>,
}

impl RankedInput {
    pub fn new(llr: &[f64]) -> Self {
        let abs: Vec<f64> = llr.iter().map(|&l| clamp_llr(l).abs()).collect();
        let mut perm: Vec<usize> = (0..llr.len()).collect();
        perm.sort_by(|&a, &b| abs[a].total_cmp(&abs[b]).then(a.cmp(&b)));
        let abs_llr: Vec<f64> = perm.iter().map(|&i| abs[i]).collect();
        let mut rank_values = Vec::with_capacity(perm.len());
        for k in 0..perm.len() {
            let r = if k > 0 && abs_llr[k] == abs_llr[k - 1] { rank_values[k - 1] } else { k + 1 };
            rank_values.push(r);
        }
        Self { perm, rank_values, abs_llr }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// Original position of 1-based ordinal rank `r`.
    pub fn position(&self, r: usize) -> usize {
        self.perm[r - 1]
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn rank_values(&self) -> &[usize] {
        &self.rank_values
    }

    /// `|L|` in reliability order (non-decreasing).
    pub fn abs_llr(&self) -> &[f64] {
        &self.abs_llr
    }

    /// Flip probabilities `1 / (1 + e^{|L|})` in reliability order.
    pub fn flip_probs(&self) -> Vec<f64> {
        self.abs_llr.iter().map(|&a| llr_to_prob(a)).collect()
    }
}

/// One generated noise pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternQuery {
    /// Ordinal ranks (1-based, ascending) of the flipped positions.
    pub flipped_ranks: Vec<usize>,
    /// Sum of the rank values of the flipped positions.
    pub logistic_weight: usize,
    /// Flip pattern in original position order.
    pub pattern: BitVector,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Node {
    weight: usize,
    count: usize,
    // ordinals, 0-based ascending
    ordinals: Vec<usize>,
}

/// Streaming generator over all `2^n` flip patterns.
#[derive(Debug, Clone)]
pub struct PatternGenerator {
    ranked: RankedInput,
    heap: BinaryHeap<Reverse<Node>>,
    yielded: usize,
}

impl PatternGenerator {
    pub fn new(llr: &[f64]) -> Self {
        Self::from_ranked(RankedInput::new(llr))
    }

    pub fn from_ranked(ranked: RankedInput) -> Self {
        let mut heap = BinaryHeap::new();
        heap.push(Reverse(Node { weight: 0, count: 0, ordinals: Vec::new() }));
        Self { ranked, heap, yielded: 0 }
    }

    pub fn ranked(&self) -> &RankedInput {
        &self.ranked
    }

    /// Number of patterns produced so far.
    pub fn yielded(&self) -> usize {
        self.yielded
    }

    pub fn is_exhausted(&self) -> bool {
        self.heap.is_empty()
    }

    /// Advances to the next pattern and returns its 0-based ordinals and
    /// logistic weight without building a [`PatternQuery`].
    pub fn next_ordinals(&mut self) -> Option<(Vec<usize>, usize)> {
        let Reverse(node) = self.heap.pop()?;
        let n = self.ranked.len();
        let next = node.ordinals.last().map_or(0, |&l| l + 1);
        if next < n {
            let rv = &self.ranked.rank_values;
            let mut appended = node.ordinals.clone();
            appended.push(next);
            self.heap.push(Reverse(Node { weight: node.weight + rv[next], count: node.count + 1, ordinals: appended }));
            if let Some(&last) = node.ordinals.last() {
                let mut advanced = node.ordinals.clone();
                *advanced.last_mut().unwrap() = next;
                self.heap.push(Reverse(Node { weight: node.weight - rv[last] + rv[next], count: node.count, ordinals: advanced }));
            }
        }
        self.yielded += 1;
        Some((node.ordinals, node.weight))
    }

    /// Up to `batch` next patterns, in order.
    pub fn next_batch(&mut self, batch: usize) -> Vec<PatternQuery> {
        self.take(batch).collect()
    }
}

impl Iterator for PatternGenerator {
    type Item = PatternQuery;

    fn next(&mut self) -> Option<PatternQuery> {
        let (ordinals, logistic_weight) = self.next_ordinals()?;
        let pattern = BitVector::from_support(self.ranked.len(), ordinals.iter().map(|&o| self.ranked.perm[o]));
        Some(PatternQuery { flipped_ranks: ordinals.iter().map(|o| o + 1).collect(), logistic_weight, pattern })
    }
}

pub fn make_generator(llr: &[f64]) -> PatternGenerator {
    PatternGenerator::new(llr)
}

/// `None` once every pattern has been produced.
pub fn next_pattern(generator: &mut PatternGenerator) -> Option<PatternQuery> {
    generator.next()
}

/// `ln Π q_i^{w_i} (1 - q_i)^{1 - w_i}`.
pub fn log_pattern_probability(q: &[f64], w: &BitVector) -> f64 {
    assert_eq!(q.len(), w.len(), "probability and pattern lengths differ");
    q.iter().zip(w.iter()).map(|(&qi, wi)| if wi { qi.ln() } else { (-qi).ln_1p() }).sum()
}

/// Probability of pattern `w` when bit `i` is 1 independently with probability `q[i]`.
pub fn pattern_probability(q: &[f64], w: &BitVector) -> f64 {
    log_pattern_probability(q, w).exp()
}
