//! Soft-output guessing decoder for one component code under a local
//! syndrome constraint.
//!
//! Noise patterns are queried in ordered-reliability order relative to the
//! hard decision of the soft input. Every pattern whose syndrome matches the
//! local syndrome joins the candidate list. The decoder tracks the total
//! queried probability `P_g`; the mass of syndrome-consistent patterns that
//! were never queried is estimated as `(1 - P_g) 2^{-m_c}`. Bit marginals
//! come from the list plus that estimate, with the unexplored mass assigned
//! to each bit in proportion to its prior.

use thiserror::Error;

use crate::channel::{clamp_llr, llr_to_prob};
use crate::code::ComponentCode;
use crate::gf2::{mat_vec_mul, BitMatrix, BitVector};
use crate::numeric::{ln_flip_prob, ln_keep_prob, log_sum_exp, CompensatedSum};
use crate::orbgrand::PatternGenerator;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SograndError {
    #[error("soft input has length {found}, component length is {expected}")]
    InputLength { expected: usize, found: usize },
    #[error("local syndrome has length {found}, component has {expected} checks")]
    SyndromeLength { expected: usize, found: usize },
    #[error("invalid parameters: {0}")]
    Params(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SograndParams {
    /// Maximum list size.
    pub list_max: usize,
    /// Maximum number of queried patterns; `None` selects `2^{m_c + 4}`.
    pub query_budget: Option<usize>,
    /// Stop once the best candidate holds this fraction of `P_tot`.
    pub confidence_stop: Option<f64>,
}

impl Default for SograndParams {
    fn default() -> Self {
        Self { list_max: 4, query_budget: None, confidence_stop: None }
    }
}

impl SograndParams {
    pub fn validate(&self) -> Result<(), SograndError> {
        if self.list_max == 0 {
            return Err(SograndError::Params("list_max must be at least 1"));
        }
        if self.query_budget == Some(0) {
            return Err(SograndError::Params("query_budget must be at least 1"));
        }
        if let Some(c) = self.confidence_stop {
            if !(c > 0.0 && c <= 1.0) {
                return Err(SograndError::Params("confidence_stop must lie in (0, 1]"));
            }
        }
        Ok(())
    }

    pub fn budget_for(&self, m_c: usize) -> usize {
        self.query_budget.unwrap_or_else(|| 1usize.checked_shl(m_c as u32 + 4).unwrap_or(usize::MAX))
    }
}

/// `P_{L^c} = (1 - P_g) 2^{-m_c}`.
pub fn estimate_missing_mass(p_g: f64, m_c: usize) -> f64 {
    (1.0 - p_g) * (-(m_c as f64)).exp2()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub pattern: BitVector,
    pub log_mass: f64,
}

/// Syndrome-consistent patterns found so far, with the mass bookkeeping
/// needed for soft output.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateList {
    entries: Vec<Candidate>,
    queried: CompensatedSum,
    exhausted: bool,
    m_c: usize,
}

impl CandidateList {
    pub fn new(m_c: usize) -> Self {
        Self { entries: Vec::new(), queried: CompensatedSum::default(), exhausted: false, m_c }
    }

    /// Accounts for one queried pattern, consistent or not.
    pub fn record_query(&mut self, log_mass: f64) {
        self.queried.add(log_mass.exp());
    }

    /// Marks the search as exhaustive: either every pattern was queried or
    /// every syndrome-consistent one was listed. `P_g` then reads as 1.
    pub fn mark_exhausted(&mut self) {
        self.exhausted = true;
    }

    pub fn push(&mut self, pattern: BitVector, log_mass: f64) {
        self.entries.push(Candidate { pattern, log_mass });
    }

    pub fn entries(&self) -> &[Candidate] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn m_c(&self) -> usize {
        self.m_c
    }

    pub fn p_g(&self) -> f64 {
        if self.exhausted {
            1.0
        } else {
            self.queried.value().clamp(0.0, 1.0)
        }
    }

    pub fn log_p_l(&self) -> f64 {
        log_sum_exp(self.entries.iter().map(|c| c.log_mass))
    }

    pub fn p_l(&self) -> f64 {
        self.log_p_l().exp()
    }

    pub fn p_lc(&self) -> f64 {
        estimate_missing_mass(self.p_g(), self.m_c)
    }

    pub fn p_tot(&self) -> f64 {
        self.p_l() + self.p_lc()
    }

    /// Highest-mass entry; the earliest found wins ties.
    pub fn best(&self) -> Option<&Candidate> {
        self.entries.iter().reduce(|best, c| if c.log_mass > best.log_mass { c } else { best })
    }
}

/// Why the query loop stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    ListFull,
    BudgetExhausted,
    PatternsExhausted,
    /// The list holds the whole coset, so no consistent mass is missing.
    CosetComplete,
    Confident,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SoftOutput {
    pub l_app: Vec<f64>,
    /// `l_app - l_a`, elementwise.
    pub l_e: Vec<f64>,
    pub best_pattern: BitVector,
    pub found: bool,
    pub queries: usize,
    pub stop: StopReason,
    pub list: CandidateList,
}

/// Soft output from a finalized list. With an empty list (or no mass at
/// all) the prior passes through and the extrinsic output is zero.
pub fn extract_soft(list: &CandidateList, l_a: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let l_a: Vec<f64> = l_a.iter().map(|&l| clamp_llr(l)).collect();
    let log_p_lc = list.p_lc().ln();
    if list.is_empty() || (log_p_lc == f64::NEG_INFINITY && list.log_p_l() == f64::NEG_INFINITY) {
        return (l_a.clone(), vec![0.0; l_a.len()]);
    }
    let l_app: Vec<f64> = l_a
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            // prior probability that bit i is in error
            let (ln_q1, ln_q0) = if l >= 0.0 { (ln_flip_prob(l), ln_keep_prob(l)) } else { (ln_keep_prob(-l), ln_flip_prob(-l)) };
            let ones = list.entries.iter().filter(|c| c.pattern.get(i)).map(|c| c.log_mass);
            let zeros = list.entries.iter().filter(|c| !c.pattern.get(i)).map(|c| c.log_mass);
            let num1 = log_sum_exp(ones.chain([log_p_lc + ln_q1]));
            let num0 = log_sum_exp(zeros.chain([log_p_lc + ln_q0]));
            clamp_llr(num0 - num1)
        })
        .collect();
    let l_e = l_app.iter().zip(&l_a).map(|(app, a)| app - a).collect();
    (l_app, l_e)
}

/// Component decoder with the parity-check columns prepared once.
#[derive(Debug, Clone)]
pub struct SograndDecoder {
    h: BitMatrix,
    columns: Vec<BitVector>,
    params: SograndParams,
    // number of patterns in each coset of the component code, if it fits
    coset_size: Option<usize>,
}

impl SograndDecoder {
    pub fn new(component: &ComponentCode, params: SograndParams) -> Result<Self, SograndError> {
        params.validate()?;
        let h = component.h().clone();
        let columns = (0..h.cols()).map(|c| h.column(c)).collect();
        let dim = h.cols() - h.rank();
        let coset_size = 1usize.checked_shl(dim as u32);
        Ok(Self { h, columns, params, coset_size })
    }

    pub fn params(&self) -> &SograndParams {
        &self.params
    }

    pub fn decode(&self, l_a: &[f64], s_local: &BitVector) -> Result<SoftOutput, SograndError> {
        let (n, m) = (self.h.cols(), self.h.rows());
        if l_a.len() != n {
            return Err(SograndError::InputLength { expected: n, found: l_a.len() });
        }
        if s_local.len() != m {
            return Err(SograndError::SyndromeLength { expected: m, found: s_local.len() });
        }
        let l_a: Vec<f64> = l_a.iter().map(|&l| clamp_llr(l)).collect();
        let hard: BitVector = l_a.iter().map(|&l| l < 0.0).collect();
        // flips must reproduce s_local ⊕ H·hard
        let mut target = mat_vec_mul(&self.h, &hard).expect("hard decision has length n_c");
        target.xor_assign(s_local);

        let mut generator = PatternGenerator::new(&l_a);
        let abs_by_ordinal: Vec<f64> = generator.ranked().abs_llr().to_vec();
        let perm: Vec<usize> = generator.ranked().perm().to_vec();
        let base: f64 = abs_by_ordinal.iter().map(|&a| ln_keep_prob(a)).sum();

        let budget = self.params.budget_for(m);
        let mut list = CandidateList::new(m);
        let mut queries = 0;
        let stop = loop {
            if queries >= budget {
                break StopReason::BudgetExhausted;
            }
            let Some((ordinals, _)) = generator.next_ordinals() else {
                list.mark_exhausted();
                break StopReason::PatternsExhausted;
            };
            queries += 1;
            let log_mass = base + ordinals.iter().map(|&o| ln_flip_prob(abs_by_ordinal[o]) - ln_keep_prob(abs_by_ordinal[o])).sum::<f64>();
            list.record_query(log_mass);

            let mut acc = BitVector::zeros(m);
            for &o in &ordinals {
                acc.xor_assign(&self.columns[perm[o]]);
            }
            if acc == target {
                let mut w = hard.clone();
                for &o in &ordinals {
                    w.flip(perm[o]);
                }
                debug_assert_eq!(&mat_vec_mul(&self.h, &w).unwrap(), s_local);
                list.push(w, log_mass);
                if Some(list.len()) == self.coset_size {
                    // every consistent pattern is listed, nothing is missing
                    list.mark_exhausted();
                    break StopReason::CosetComplete;
                }
                if list.len() >= self.params.list_max {
                    break StopReason::ListFull;
                }
                if let Some(frac) = self.params.confidence_stop {
                    let best = list.best().expect("list is non-empty").log_mass.exp();
                    if best >= frac * list.p_tot() {
                        break StopReason::Confident;
                    }
                }
            }
            if generator.is_exhausted() {
                list.mark_exhausted();
                break StopReason::PatternsExhausted;
            }
        };
        debug_assert!((list.p_l() + list.p_lc() - list.p_tot()).abs() <= 1e-12 * list.p_tot().max(1e-300));
        let (l_app, l_e) = extract_soft(&list, &l_a);
        let (best_pattern, found) = match list.best() {
            Some(c) => (c.pattern.clone(), true),
            None => (hard, false),
        };
        Ok(SoftOutput { l_app, l_e, best_pattern, found, queries, stop, list })
    }
}

/// One-shot convenience wrapper around [`SograndDecoder`].
pub fn sogrand_decode(
    component: &ComponentCode,
    l_a: &[f64],
    s_local: &BitVector,
    params: &SograndParams,
) -> Result<SoftOutput, SograndError> {
    SograndDecoder::new(component, *params)?.decode(l_a, s_local)
}

/// Prior probability that each bit is in error, `1 / (1 + e^{L})`.
pub fn prior_error_probs(l_a: &[f64]) -> Vec<f64> {
    l_a.iter().map(|&l| llr_to_prob(clamp_llr(l))).collect()
}
