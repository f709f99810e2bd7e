//! Depolarizing noise, syndrome extraction and decoder priors.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::code::GldpcCode;
use crate::gf2::{mat_vec_mul, BitVector, PauliSymbol};

/// Every LLR handed between decoder stages is clamped to `[-LLR_CLAMP, LLR_CLAMP]`.
pub const LLR_CLAMP: f64 = 30.0;

#[inline]
pub fn clamp_llr(l: f64) -> f64 {
    l.clamp(-LLR_CLAMP, LLR_CLAMP)
}

/// Probability that the bit is 1 given its LLR, `1 / (1 + e^L)`.
#[inline]
pub fn llr_to_prob(l: f64) -> f64 {
    1.0 / (1.0 + l.exp())
}

#[inline]
pub fn prob_to_llr(p: f64) -> f64 {
    ((1.0 - p) / p).ln()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("physical error rate {0} outside [0, 1)")]
    InvalidRate(f64),
    #[error("physical error rate 0 gives infinite prior LLRs")]
    ZeroRate,
    #[error("error pattern of length {found} does not match n = {expected}")]
    LengthMismatch { expected: usize, found: usize },
}

/// Depolarizing channel: X, Y and Z each with probability `p/3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepolarizingParams {
    p: f64,
}

impl DepolarizingParams {
    pub fn new(p: f64) -> Result<Self, ChannelError> {
        if !(0.0..1.0).contains(&p) {
            return Err(ChannelError::InvalidRate(p));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Marginal flip rate of each binary side, `2p/3`.
    pub fn effective_flip(&self) -> f64 {
        2.0 * self.p / 3.0
    }
}

/// Binary symplectic form of an n-qubit Pauli error.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliErrorPattern {
    pub e_x: BitVector,
    pub e_z: BitVector,
}

impl PauliErrorPattern {
    pub fn identity(n: usize) -> Self {
        Self { e_x: BitVector::zeros(n), e_z: BitVector::zeros(n) }
    }

    pub fn from_symbols(symbols: &[PauliSymbol]) -> Self {
        Self { e_x: symbols.iter().map(|s| s.x_bit()).collect(), e_z: symbols.iter().map(|s| s.z_bit()).collect() }
    }

    pub fn len(&self) -> usize {
        self.e_x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e_x.is_empty()
    }

    pub fn symbol(&self, i: usize) -> PauliSymbol {
        PauliSymbol::from_bits(self.e_x.get(i), self.e_z.get(i))
    }

    /// Number of qubits with a non-identity Pauli.
    pub fn weight(&self) -> usize {
        (0..self.len()).filter(|&i| self.symbol(i) != PauliSymbol::I).count()
    }

    pub fn is_identity(&self) -> bool {
        self.e_x.is_zero() && self.e_z.is_zero()
    }
}

/// Identifies one trial's random stream: ChaCha8 keyed by the master seed,
/// stream number = trial index, one 64-bit word per qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrialSeed {
    pub master: u64,
    pub trial: u64,
}

impl TrialSeed {
    pub fn new(master: u64, trial: u64) -> Self {
        Self { master, trial }
    }

    fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.trial);
        rng
    }
}

fn unit_interval(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draws an i.i.d. depolarizing error on `n` qubits.
///
/// Qubit `i` consumes the `i`-th word of the trial's stream, so the pattern
/// depends only on `(master, trial, i)`.
pub fn sample_error(params: &DepolarizingParams, n: usize, seed: TrialSeed) -> PauliErrorPattern {
    let mut rng = seed.rng();
    let third = params.p / 3.0;
    let symbols: Vec<PauliSymbol> = (0..n)
        .map(|_| {
            let u = unit_interval(rng.next_u64());
            if u < third {
                PauliSymbol::X
            } else if u < 2.0 * third {
                PauliSymbol::Y
            } else if u < params.p {
                PauliSymbol::Z
            } else {
                PauliSymbol::I
            }
        })
        .collect();
    PauliErrorPattern::from_symbols(&symbols)
}

/// Four Pauli probabilities for one qubit, indexed by [`pauli_index`].
pub type PauliBelief = [f64; 4];

#[inline]
pub fn pauli_index(s: PauliSymbol) -> usize {
    match s {
        PauliSymbol::I => 0,
        PauliSymbol::X => 1,
        PauliSymbol::Y => 2,
        PauliSymbol::Z => 3,
    }
}

/// Decoder priors for both decoding variants.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelPrior {
    /// Prior LLRs on `e_x`, used by the Z-graph decoder.
    pub llr_x: Vec<f64>,
    /// Prior LLRs on `e_z`, used by the X-graph decoder.
    pub llr_z: Vec<f64>,
    pub pauli: Vec<PauliBelief>,
}

/// Independent sides get `log((1 - 2p/3) / (2p/3))`; the correlated variant
/// gets `(1 - p, p/3, p/3, p/3)` over `(I, X, Y, Z)`.
pub fn make_priors(params: &DepolarizingParams, n: usize) -> Result<ChannelPrior, ChannelError> {
    if params.p == 0.0 {
        return Err(ChannelError::ZeroRate);
    }
    let llr = clamp_llr(prob_to_llr(params.effective_flip()));
    let third = params.p / 3.0;
    Ok(ChannelPrior { llr_x: vec![llr; n], llr_z: vec![llr; n], pauli: vec![[1.0 - params.p, third, third, third]; n] })
}

/// `s_x = H_Z e_x` (seen by the Z graph) and `s_z = H_X e_z` (seen by the X graph).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Syndromes {
    pub s_x: BitVector,
    pub s_z: BitVector,
}

pub fn syndromes(code: &GldpcCode, e: &PauliErrorPattern) -> Result<Syndromes, ChannelError> {
    let wrap = |len: usize| ChannelError::LengthMismatch { expected: code.n(), found: len };
    Ok(Syndromes {
        s_x: mat_vec_mul(code.hz(), &e.e_x).map_err(|_| wrap(e.e_x.len()))?,
        s_z: mat_vec_mul(code.hx(), &e.e_z).map_err(|_| wrap(e.e_z.len()))?,
    })
}
