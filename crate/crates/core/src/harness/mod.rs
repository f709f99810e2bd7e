//! Monte Carlo experiments: sample, decode, judge up to stabilizers, and
//! aggregate into BLER curves.
//!
//! Every trial draws its error from the stream `(seed, trial_index)`, so
//! different decoders, iteration caps and error rates see common random
//! numbers, and results do not depend on how trials are spread over threads.

pub mod io;
pub mod stats;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bp::{BpConfig, BpError, MinSumDecoder};
use crate::channel::{make_priors, sample_error, syndromes, ChannelError, ChannelPrior, DepolarizingParams, PauliErrorPattern, TrialSeed};
use crate::code::{resolve_code, CodeError, GldpcCode};
use crate::gf2::{BitVector, Echelon};
use crate::gldpc::{DecodeResult, GldpcConfig, GldpcDecoder};
use crate::osd::{osd_postprocess, OsdConfig, OsdError, OsdStrategy};
use crate::sogrand::{SograndError, SograndParams};

pub use stats::{pseudothreshold, uncoded_bler, wilson_interval, PairedDifference, ThresholdError, Z95};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Sogrand(#[from] SograndError),
    #[error(transparent)]
    Bp(#[from] BpError),
    #[error("OSD failed on trial {trial}: {source}")]
    Osd { trial: u64, source: OsdError },
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Csv { path: String, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderKind {
    Bp,
    BpOsd,
    Sogrand,
    SograndOsd,
    SograndOsdCorr,
}

impl DecoderKind {
    pub const ALL: [DecoderKind; 5] =
        [DecoderKind::Bp, DecoderKind::BpOsd, DecoderKind::Sogrand, DecoderKind::SograndOsd, DecoderKind::SograndOsdCorr];

    pub fn name(self) -> &'static str {
        match self {
            DecoderKind::Bp => "bp",
            DecoderKind::BpOsd => "bp-osd",
            DecoderKind::Sogrand => "sogrand",
            DecoderKind::SograndOsd => "sogrand-osd",
            DecoderKind::SograndOsdCorr => "sogrand-osd-corr",
        }
    }

    pub fn uses_osd(self) -> bool {
        matches!(self, DecoderKind::BpOsd | DecoderKind::SograndOsd | DecoderKind::SograndOsdCorr)
    }

    pub fn uses_sogrand(self) -> bool {
        !matches!(self, DecoderKind::Bp | DecoderKind::BpOsd)
    }

    pub fn default_iters(self) -> usize {
        if self.uses_sogrand() {
            20
        } else {
            100
        }
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DecoderKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DecoderKind::ALL.into_iter().find(|d| d.name() == s).ok_or_else(|| HarnessError::Config(format!("unknown decoder `{s}`")))
    }
}

/// Everything that determines the output of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// A code file path or `builtin:NAME`.
    pub code: String,
    pub decoder: DecoderKind,
    pub p_grid: Vec<f64>,
    pub trials: usize,
    /// Iteration cap; `None` picks the decoder's default.
    pub iters: Option<usize>,
    pub list_size: usize,
    pub query_budget: Option<usize>,
    pub confidence_stop: Option<f64>,
    pub osd_order: usize,
    pub osd_exhaustive: bool,
    pub alpha: f64,
    pub seed: u64,
    /// Stop a point after this many failures.
    pub max_failures: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(code: impl Into<String>, decoder: DecoderKind) -> Self {
        let sog = SograndParams::default();
        let osd = OsdConfig::default();
        Self {
            code: code.into(),
            decoder,
            p_grid: vec![0.05],
            trials: 1000,
            iters: None,
            list_size: sog.list_max,
            query_budget: sog.query_budget,
            confidence_stop: sog.confidence_stop,
            osd_order: osd.order,
            osd_exhaustive: false,
            alpha: BpConfig::default().alpha,
            seed: 0,
            max_failures: None,
        }
    }

    pub fn iters(&self) -> usize {
        self.iters.unwrap_or_else(|| self.decoder.default_iters())
    }

    pub fn sogrand_params(&self) -> SograndParams {
        SograndParams { list_max: self.list_size, query_budget: self.query_budget, confidence_stop: self.confidence_stop }
    }

    pub fn osd_config(&self) -> OsdConfig {
        OsdConfig {
            order: self.osd_order,
            strategy: if self.osd_exhaustive { OsdStrategy::Exhaustive } else { OsdStrategy::CombinationSweep },
        }
    }

    pub fn bp_config(&self) -> BpConfig {
        BpConfig { alpha: self.alpha, n_iter: self.iters() }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        if self.iters() == 0 {
            return Err(HarnessError::Config("iterations must be at least 1".into()));
        }
        if self.p_grid.is_empty() {
            return Err(HarnessError::Config("the p grid is empty".into()));
        }
        if let Some(&p) = self.p_grid.iter().find(|&&p| !(p > 0.0 && p < 0.75)) {
            return Err(HarnessError::Config(format!("p = {p} is outside (0, 0.75)")));
        }
        self.sogrand_params().validate()?;
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(BpError::Alpha(self.alpha).into());
        }
        Ok(())
    }
}

/// Outcome of one Monte Carlo trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub seed: u64,
    pub converged: bool,
    pub osd_invoked: bool,
    pub iterations_used: usize,
    pub logical_failure: bool,
}

/// Aggregated statistics of one `(p, decoder)` point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub p: f64,
    pub decoder: String,
    pub trials: usize,
    pub failures: usize,
    pub bler: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_iters: f64,
    pub osd_rate: f64,
    pub seed: u64,
}

impl CurvePoint {
    pub fn from_records(p: f64, decoder: DecoderKind, seed: u64, records: &[TrialRecord]) -> Self {
        let trials = records.len();
        let failures = records.iter().filter(|r| r.logical_failure).count();
        let (ci_low, ci_high) = wilson_interval(failures, trials, Z95);
        let denom = trials.max(1) as f64;
        Self {
            p,
            decoder: decoder.name().to_string(),
            trials,
            failures,
            bler: failures as f64 / denom,
            ci_low,
            ci_high,
            mean_iters: records.iter().map(|r| r.iterations_used as f64).sum::<f64>() / denom,
            osd_rate: records.iter().filter(|r| r.osd_invoked).count() as f64 / denom,
            seed,
        }
    }
}

/// Whether `e ⊕ ê` acts trivially: each residual side has zero syndrome and
/// lies in the stabilizer row space (`r_z` in `H_Z`, `r_x` in `H_X`).
pub fn residual_is_stabilizer(
    code: &GldpcCode,
    stab_x: &Echelon,
    stab_z: &Echelon,
    e: &PauliErrorPattern,
    e_hat: &PauliErrorPattern,
) -> bool {
    let mut r_x = e.e_x.clone();
    r_x.xor_assign(&e_hat.e_x);
    let mut r_z = e.e_z.clone();
    r_z.xor_assign(&e_hat.e_z);
    let quiet = |h: &crate::gf2::BitMatrix, r: &BitVector| h.mat_vec_mul(r).expect("length n").is_zero();
    quiet(code.hz(), &r_x)
        && quiet(code.hx(), &r_z)
        && stab_x.contains_row(&r_x).expect("length n")
        && stab_z.contains_row(&r_z).expect("length n")
}

/// Decoders for one code and configuration, shared by all trials.
pub struct Simulator<'a> {
    code: &'a GldpcCode,
    decoder: DecoderKind,
    gldpc: GldpcDecoder<'a>,
    bp_x: MinSumDecoder,
    bp_z: MinSumDecoder,
    osd: OsdConfig,
    stab_x: Echelon,
    stab_z: Echelon,
    seed: u64,
}

/// Estimate of one decode, before judging.
struct Decoded {
    e_hat: PauliErrorPattern,
    converged: bool,
    osd_invoked: bool,
    iterations_used: usize,
}

impl<'a> Simulator<'a> {
    pub fn new(code: &'a GldpcCode, cfg: &ExperimentConfig) -> Result<Self, HarnessError> {
        cfg.validate()?;
        let gldpc = GldpcDecoder::new(code, GldpcConfig { n_iter: cfg.iters(), sogrand: cfg.sogrand_params() })?;
        Ok(Self {
            code,
            decoder: cfg.decoder,
            gldpc,
            bp_x: MinSumDecoder::new(code.hx(), cfg.bp_config())?,
            bp_z: MinSumDecoder::new(code.hz(), cfg.bp_config())?,
            osd: cfg.osd_config(),
            stab_x: Echelon::new(code.hx()),
            stab_z: Echelon::new(code.hz()),
            seed: cfg.seed,
        })
    }

    pub fn code(&self) -> &GldpcCode {
        self.code
    }

    pub fn decoder(&self) -> DecoderKind {
        self.decoder
    }

    fn decode(&self, priors: &ChannelPrior, s_x: &BitVector, s_z: &BitVector, trial: u64) -> Result<Decoded, HarnessError> {
        let res: DecodeResult = match self.decoder {
            DecoderKind::Bp | DecoderKind::BpOsd => {
                let z = self.bp_x.decode(&priors.llr_z, s_z)?;
                let x = self.bp_z.decode(&priors.llr_x, s_x)?;
                DecodeResult {
                    e_hat: PauliErrorPattern { e_x: x.e_hat, e_z: z.e_hat },
                    converged: x.converged && z.converged,
                    converged_x: x.converged,
                    converged_z: z.converged,
                    iterations_used: x.iterations_used.max(z.iterations_used),
                    trace: Vec::new(),
                    app_x: x.app,
                    app_z: z.app,
                }
            }
            DecoderKind::Sogrand | DecoderKind::SograndOsd => self.gldpc.decode_independent(priors, s_x, s_z)?,
            DecoderKind::SograndOsdCorr => self.gldpc.decode_correlated(priors, s_x, s_z)?,
        };
        let mut e_hat = res.e_hat;
        let mut osd_invoked = false;
        if self.decoder.uses_osd() {
            let osd_err = |source| HarnessError::Osd { trial, source };
            if !res.converged_x {
                e_hat.e_x = osd_postprocess(self.code.hz(), s_x, &res.app_x, &priors.llr_x, &self.osd).map_err(osd_err)?.pattern;
                osd_invoked = true;
            }
            if !res.converged_z {
                e_hat.e_z = osd_postprocess(self.code.hx(), s_z, &res.app_z, &priors.llr_z, &self.osd).map_err(osd_err)?.pattern;
                osd_invoked = true;
            }
        }
        Ok(Decoded { e_hat, converged: res.converged, osd_invoked, iterations_used: res.iterations_used })
    }

    /// Samples, decodes and judges trial `trial_index` at error rate `p`.
    pub fn run_trial(&self, params: &DepolarizingParams, priors: &ChannelPrior, trial_index: u64) -> Result<TrialRecord, HarnessError> {
        let e = sample_error(params, self.code.n(), TrialSeed::new(self.seed, trial_index));
        let s = syndromes(self.code, &e)?;
        let d = self.decode(priors, &s.s_x, &s.s_z, trial_index)?;
        if d.converged {
            let check = syndromes(self.code, &d.e_hat)?;
            assert!(check == s, "a converged decode must satisfy both syndromes");
        }
        let success = residual_is_stabilizer(self.code, &self.stab_x, &self.stab_z, &e, &d.e_hat);
        Ok(TrialRecord {
            trial_index,
            seed: self.seed,
            converged: d.converged,
            osd_invoked: d.osd_invoked,
            iterations_used: d.iterations_used,
            logical_failure: !success,
        })
    }

    /// Trials `0..trials` at error rate `p`, in index order. With
    /// `max_failures`, the sequence is cut right after the failure that
    /// reaches the cap; trials are run in fixed-size chunks so the cut does
    /// not depend on scheduling.
    pub fn run_point(&self, p: f64, trials: usize, max_failures: Option<usize>) -> Result<Vec<TrialRecord>, HarnessError> {
        let params = DepolarizingParams::new(p)?;
        let priors = make_priors(&params, self.code.n())?;
        const CHUNK: usize = 1024;
        let mut records = Vec::with_capacity(trials);
        let mut failures = 0;
        let mut start = 0;
        while start < trials {
            let end = match max_failures {
                Some(_) => (start + CHUNK).min(trials),
                None => trials,
            };
            let chunk: Vec<TrialRecord> =
                (start..end).into_par_iter().map(|t| self.run_trial(&params, &priors, t as u64)).collect::<Result<_, _>>()?;
            for rec in chunk {
                records.push(rec);
                failures += rec.logical_failure as usize;
                if max_failures.is_some_and(|cap| failures >= cap) {
                    return Ok(records);
                }
            }
            start = end;
        }
        Ok(records)
    }
}

/// Runs every point of the grid and aggregates it.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<CurvePoint>, HarnessError> {
    let code = resolve_code(&cfg.code)?;
    run_sweep_on(&code, cfg)
}

/// [`run_sweep`] on an already loaded code.
pub fn run_sweep_on(code: &GldpcCode, cfg: &ExperimentConfig) -> Result<Vec<CurvePoint>, HarnessError> {
    let sim = Simulator::new(code, cfg)?;
    cfg.p_grid
        .iter()
        .map(|&p| {
            let records = sim.run_point(p, cfg.trials, cfg.max_failures)?;
            Ok(CurvePoint::from_records(p, cfg.decoder, cfg.seed, &records))
        })
        .collect()
}

/// One row of an iteration-cap study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub p: f64,
    pub decoder: String,
    pub iters: usize,
    pub trials: usize,
    pub failures: usize,
    pub bler: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

impl ConvergenceRow {
    fn new(p: f64, cfg: &ExperimentConfig, iters: usize, trials: usize, failures: usize) -> Self {
        let (ci_low, ci_high) = wilson_interval(failures, trials, Z95);
        Self {
            p,
            decoder: cfg.decoder.name().to_string(),
            iters,
            trials,
            failures,
            bler: failures as f64 / trials as f64,
            ci_low,
            ci_high,
            seed: cfg.seed,
        }
    }
}

/// BLER against the iteration cap on common error samples.
///
/// Without OSD a run capped at `N` is the first `N` iterations of a longer
/// run, so one run at the largest cap is judged at every cap: a trial
/// succeeds at cap `N` iff it converged within `N` iterations to a
/// stabilizer-equivalent estimate. OSD variants are re-run per cap, since
/// the OSD input depends on where decoding stopped. `max_failures` is
/// ignored here.
pub fn convergence_study(code: &GldpcCode, cfg: &ExperimentConfig, iters_grid: &[usize]) -> Result<Vec<ConvergenceRow>, HarnessError> {
    if iters_grid.is_empty() || iters_grid.contains(&0) {
        return Err(HarnessError::Config("iteration grid must be non-empty and positive".into()));
    }
    let mut rows = Vec::new();
    for &p in &cfg.p_grid {
        if cfg.decoder.uses_osd() {
            for &n in iters_grid {
                let mut run = cfg.clone();
                run.iters = Some(n);
                let records = Simulator::new(code, &run)?.run_point(p, cfg.trials, None)?;
                let failures = records.iter().filter(|r| r.logical_failure).count();
                rows.push(ConvergenceRow::new(p, cfg, n, cfg.trials, failures));
            }
        } else {
            let mut run = cfg.clone();
            run.iters = iters_grid.iter().copied().max();
            let records = Simulator::new(code, &run)?.run_point(p, cfg.trials, None)?;
            for &n in iters_grid {
                let failures = records.iter().filter(|r| !(r.converged && r.iterations_used <= n && !r.logical_failure)).count();
                rows.push(ConvergenceRow::new(p, cfg, n, cfg.trials, failures));
            }
        }
    }
    Ok(rows)
}
