//! Ordered statistics post-processing for failed iterative decodes.
//!
//! Columns are eliminated in order of increasing soft value, so the pivot
//! set collects the bits most likely to be in error. The remaining bits
//! start at their hard decisions and low-weight flips of them are tried,
//! each time re-solving the pivots; the most likely candidate under the
//! channel prior wins.

use std::cmp::Ordering;

use thiserror::Error;

use crate::gf2::{BitMatrix, BitVector, Echelon, Gf2Error};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OsdStrategy {
    /// Every subset of the first `order` non-pivot bits.
    Exhaustive,
    /// No flip, every single flip, and every pair within the first `order`
    /// non-pivot bits.
    CombinationSweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OsdConfig {
    pub order: usize,
    pub strategy: OsdStrategy,
}

impl Default for OsdConfig {
    fn default() -> Self {
        Self { order: 9, strategy: OsdStrategy::CombinationSweep }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OsdError {
    #[error("syndrome is not in the column space of the check matrix")]
    Inconsistent,
    #[error("expected {expected} entries, got {found}")]
    Length { expected: usize, found: usize },
    #[error("exhaustive order {0} is too large")]
    OrderTooLarge(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OsdOutput {
    pub pattern: BitVector,
    pub candidates: usize,
    /// `sum of channel LLRs over the support`; lower is more likely.
    pub cost: f64,
    pub base_cost: f64,
}

/// `-log P(w) + const` under independent bits with channel LLRs `l`.
pub fn pattern_cost(l: &[f64], w: &BitVector) -> f64 {
    w.ones().map(|i| l[i]).sum()
}

fn better(cost: f64, w: &BitVector, best_cost: f64, best: &BitVector) -> bool {
    match cost.total_cmp(&best_cost) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => match w.weight().cmp(&best.weight()) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => w.lex_cmp(best) == Ordering::Less,
        },
    }
}

/// Solves `H e = s` by ordered statistics. `soft` ranks the bits (larger
/// means more likely error-free) and `channel_llr` scores the candidates.
pub fn osd_postprocess(h: &BitMatrix, s: &BitVector, soft: &[f64], channel_llr: &[f64], cfg: &OsdConfig) -> Result<OsdOutput, OsdError> {
    let n = h.cols();
    for len in [soft.len(), channel_llr.len()] {
        if len != n {
            return Err(OsdError::Length { expected: n, found: len });
        }
    }
    if s.len() != h.rows() {
        return Err(OsdError::Length { expected: h.rows(), found: s.len() });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| soft[a].total_cmp(&soft[b]).then(a.cmp(&b)));
    let ech = Echelon::with_order(h, &order).expect("sorted indices form a permutation");
    let free = ech.free_columns(&order);

    let fill: BitVector = soft.iter().map(|&l| l < 0.0).collect();
    let base = ech.solve_coset(s, Some(&fill)).map_err(|e| match e {
        Gf2Error::NoSolution => OsdError::Inconsistent,
        _ => unreachable!("dimensions were checked"),
    })?;
    // flipping free column c also flips the pivots whose rows touch c
    let deltas: Vec<BitVector> = free
        .iter()
        .map(|&c| {
            let mut d = BitVector::from_support(n, [c]);
            for (r, &p) in ech.pivots().iter().enumerate() {
                if ech.reduced().get(r, c) {
                    d.flip(p);
                }
            }
            d
        })
        .collect();

    let base_cost = pattern_cost(channel_llr, &base);
    let mut best = (base_cost, base.clone());
    let mut candidates = 1;
    let mut consider = |w: BitVector| {
        candidates += 1;
        let c = pattern_cost(channel_llr, &w);
        if better(c, &w, best.0, &best.1) {
            best = (c, w);
        }
    };

    match cfg.strategy {
        OsdStrategy::Exhaustive => {
            let w = cfg.order.min(free.len());
            if w >= usize::BITS as usize - 1 {
                return Err(OsdError::OrderTooLarge(cfg.order));
            }
            // Gray-code walk over all 2^w subsets
            let mut cur = base.clone();
            for k in 1usize..(1 << w) {
                cur.xor_assign(&deltas[k.trailing_zeros() as usize]);
                consider(cur.clone());
            }
        }
        OsdStrategy::CombinationSweep => {
            for d in &deltas {
                consider(&base ^ d);
            }
            let w = cfg.order.min(free.len());
            for a in 0..w {
                let first = &base ^ &deltas[a];
                for d in &deltas[a + 1..w] {
                    consider(&first ^ d);
                }
            }
        }
    }

    let (cost, pattern) = best;
    assert_eq!(&h.mat_vec_mul(&pattern).expect("length n"), s, "OSD output must satisfy the syndrome");
    assert!(cost <= base_cost, "OSD never returns a worse candidate than its base solution");
    Ok(OsdOutput { pattern, candidates, cost, base_cost })
}

/// Number of candidates a configuration evaluates with `free` non-pivot bits.
pub fn candidate_count(cfg: &OsdConfig, free: usize) -> usize {
    let w = cfg.order.min(free);
    match cfg.strategy {
        OsdStrategy::Exhaustive => 1 << w,
        OsdStrategy::CombinationSweep => 1 + free + w * w.saturating_sub(1) / 2,
    }
}
