//! Scaled min-sum belief propagation on a flattened parity-check matrix.

use thiserror::Error;

use crate::channel::{clamp_llr, LLR_CLAMP};
use crate::gf2::{BitMatrix, BitVector};
use crate::gldpc::SideResult;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BpError {
    #[error("scaling factor must lie in (0, 1], got {0}")]
    Alpha(f64),
    #[error("expected {expected} entries, got {found}")]
    Length { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BpConfig {
    pub alpha: f64,
    pub n_iter: usize,
}

impl Default for BpConfig {
    fn default() -> Self {
        Self { alpha: 0.625, n_iter: 100 }
    }
}

/// Min-sum decoder with the Tanner graph of `H` laid out as edge lists.
#[derive(Debug, Clone)]
pub struct MinSumDecoder {
    h: BitMatrix,
    // edges of each check, as (start, end) into `edge_bit`
    check_ranges: Vec<(usize, usize)>,
    edge_bit: Vec<usize>,
    bit_edges: Vec<Vec<usize>>,
    config: BpConfig,
}

impl MinSumDecoder {
    pub fn new(h: &BitMatrix, config: BpConfig) -> Result<Self, BpError> {
        if !(config.alpha > 0.0 && config.alpha <= 1.0) {
            return Err(BpError::Alpha(config.alpha));
        }
        let mut check_ranges = Vec::with_capacity(h.rows());
        let mut edge_bit = Vec::new();
        let mut bit_edges = vec![Vec::new(); h.cols()];
        for row in h.row_iter() {
            let start = edge_bit.len();
            for i in row.ones() {
                bit_edges[i].push(edge_bit.len());
                edge_bit.push(i);
            }
            check_ranges.push((start, edge_bit.len()));
        }
        Ok(Self { h: h.clone(), check_ranges, edge_bit, bit_edges, config })
    }

    pub fn config(&self) -> &BpConfig {
        &self.config
    }

    pub fn decode(&self, l_ch: &[f64], s: &BitVector) -> Result<SideResult, BpError> {
        let order: Vec<usize> = (0..self.h.rows()).collect();
        self.decode_with_order(l_ch, s, &order)
    }

    fn decode_with_order(&self, l_ch: &[f64], s: &BitVector, order: &[usize]) -> Result<SideResult, BpError> {
        let (m, n) = (self.h.rows(), self.h.cols());
        if l_ch.len() != n {
            return Err(BpError::Length { expected: n, found: l_ch.len() });
        }
        if s.len() != m {
            return Err(BpError::Length { expected: m, found: s.len() });
        }
        let mut v2c: Vec<f64> = self.edge_bit.iter().map(|&i| clamp_llr(l_ch[i])).collect();
        let mut c2v = vec![0.0; v2c.len()];
        let mut app = l_ch.to_vec();
        let mut hard: BitVector = l_ch.iter().map(|&l| l < 0.0).collect();
        let mut trace = Vec::new();
        let mut converged = false;
        for _ in 0..self.config.n_iter {
            for &t in order {
                let (a, b) = self.check_ranges[t];
                check_update(&v2c[a..b], &mut c2v[a..b], s.get(t), self.config.alpha);
            }
            for i in 0..n {
                let total = l_ch[i] + self.bit_edges[i].iter().map(|&e| c2v[e]).sum::<f64>();
                app[i] = total;
                hard.set(i, total < 0.0);
                for &e in &self.bit_edges[i] {
                    v2c[e] = clamp_llr(total - c2v[e]);
                }
            }
            let mut r = self.h.mat_vec_mul(&hard).expect("length checked");
            r.xor_assign(s);
            trace.push(r.weight());
            if r.is_zero() {
                converged = true;
                break;
            }
        }
        Ok(SideResult { e_hat: hard, converged, iterations_used: trace.len(), trace, app })
    }
}

/// One check: `alpha (-1)^s prod sign * min |.|` over the other edges. A
/// lone edge receives the clamp magnitude.
fn check_update(incoming: &[f64], out: &mut [f64], syndrome: bool, alpha: f64) {
    let mut sign_neg = syndrome;
    let (mut min1, mut min2, mut arg) = (f64::INFINITY, f64::INFINITY, usize::MAX);
    for (k, &l) in incoming.iter().enumerate() {
        sign_neg ^= l < 0.0;
        let a = l.abs();
        if a < min1 {
            min2 = min1;
            min1 = a;
            arg = k;
        } else if a < min2 {
            min2 = a;
        }
    }
    for (k, (&l, o)) in incoming.iter().zip(out.iter_mut()).enumerate() {
        let neg = sign_neg ^ (l < 0.0);
        let mag = if k == arg { min2 } else { min1 }.min(LLR_CLAMP);
        *o = if neg { -alpha * mag } else { alpha * mag };
    }
}

/// Flooding min-sum decoding of `H e = s`.
pub fn minsum_decode(h: &BitMatrix, l_ch: &[f64], s: &BitVector, cfg: &BpConfig) -> Result<SideResult, BpError> {
    MinSumDecoder::new(h, *cfg)?.decode(l_ch, s)
}
