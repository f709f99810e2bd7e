//! Brute-force oracles shared by the integration tests.

#![allow(dead_code)]

use qtanner::gf2::{mat_vec_mul, BitMatrix, BitVector};
use qtanner::osd::pattern_cost;
use rand::Rng;

pub fn hamming() -> BitMatrix {
    BitMatrix::from_dense(&[vec![1, 0, 1, 0, 1, 0, 1], vec![0, 1, 1, 0, 0, 1, 1], vec![0, 0, 0, 1, 1, 1, 1]], 7).unwrap()
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> BitMatrix {
    let dense: Vec<Vec<u8>> = (0..rows).map(|_| (0..cols).map(|_| rng.random_range(0..2u8)).collect()).collect();
    BitMatrix::from_dense(&dense, cols).unwrap()
}

pub fn random_bits(rng: &mut impl Rng, n: usize) -> BitVector {
    (0..n).map(|_| rng.random_bool(0.5)).collect()
}

pub fn all_patterns(n: usize) -> impl Iterator<Item = BitVector> {
    (0u64..1 << n).map(move |mask| BitVector::from_support(n, (0..n).filter(|i| mask >> i & 1 == 1)))
}

/// `P(e_i = 1 | H e = s)` under independent bits with LLRs `l`, and the
/// most probable consistent pattern.
pub fn syndrome_marginals(h: &BitMatrix, l: &[f64], s: &BitVector) -> (Vec<f64>, BitVector) {
    let n = h.cols();
    let lp = |w: &BitVector| -> f64 {
        (0..n)
            .map(|i| {
                // ln P(bit i = w_i) with P(1) = 1 / (1 + e^L)
                let x = if w.get(i) { l[i] } else { -l[i] };
                -(x.exp().ln_1p())
            })
            .sum()
    };
    let mut best = (f64::NEG_INFINITY, BitVector::zeros(n));
    let consistent: Vec<(f64, BitVector)> = all_patterns(n).filter(|w| &mat_vec_mul(h, w).unwrap() == s).map(|w| (lp(&w), w)).collect();
    let top = consistent.iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    let mut ones = vec![0.0; n];
    for (lw, w) in &consistent {
        let p = (lw - top).exp();
        total += p;
        for i in w.ones() {
            ones[i] += p;
        }
        if *lw > best.0 {
            best = (*lw, w.clone());
        }
    }
    (ones.iter().map(|o| o / total).collect(), best.1)
}

/// Most likely member of `{w : H w = s}` under channel LLRs `l`; ties go to
/// lower weight, then lexicographic order.
pub fn brute_ml(h: &BitMatrix, s: &BitVector, l: &[f64]) -> Option<BitVector> {
    let mut best: Option<(f64, BitVector)> = None;
    for w in all_patterns(h.cols()) {
        if &mat_vec_mul(h, &w).unwrap() != s {
            continue;
        }
        let c = pattern_cost(l, &w);
        let replace = match &best {
            None => true,
            Some((bc, bw)) => c.total_cmp(bc).then(w.weight().cmp(&bw.weight())).then(w.lex_cmp(bw)).is_lt(),
        };
        if replace {
            best = Some((c, w));
        }
    }
    best.map(|b| b.1)
}
