//! Iterative GLDPC decoding with SOGRAND check nodes.
//!
//! Both variants use a flooding schedule: every check node reads the
//! variable-to-check messages of the previous iteration, so the order in
//! which check nodes are visited never changes the result.

use crate::channel::{clamp_llr, llr_to_prob, ChannelPrior, PauliBelief, PauliErrorPattern};
use crate::code::{GldpcCode, TannerGraph};
use crate::gf2::{mat_vec_mul, BitVector};
use crate::sogrand::{SograndDecoder, SograndError, SograndParams};

/// Smallest Pauli belief allowed into a product.
pub const BELIEF_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GldpcConfig {
    pub n_iter: usize,
    pub sogrand: SograndParams,
}

impl Default for GldpcConfig {
    fn default() -> Self {
        Self { n_iter: 20, sogrand: SograndParams::default() }
    }
}

/// Per-edge and per-bit messages of one Tanner graph. Edge `e` is CN
/// `e / n_c` at local position `e % n_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageState {
    pub v2c: Vec<f64>,
    pub c2v: Vec<f64>,
    pub app: Vec<f64>,
    pub hard: BitVector,
}

impl MessageState {
    /// Both outgoing messages of VN `i` start at its channel LLR.
    pub fn init(graph: &TannerGraph, l_ch: &[f64]) -> Self {
        let mut v2c = vec![0.0; graph.num_edges()];
        for (i, &l) in l_ch.iter().enumerate() {
            for e in graph.vn_edges(i) {
                v2c[e] = clamp_llr(l);
            }
        }
        Self { v2c, c2v: vec![0.0; graph.num_edges()], app: l_ch.to_vec(), hard: l_ch.iter().map(|&l| l < 0.0).collect() }
    }
}

/// Outcome of decoding one classical side.
#[derive(Debug, Clone, PartialEq)]
pub struct SideResult {
    pub e_hat: BitVector,
    pub converged: bool,
    pub iterations_used: usize,
    /// Unsatisfied parity checks after each iteration.
    pub trace: Vec<usize>,
    /// APP LLRs of the last iteration.
    pub app: Vec<f64>,
}

/// Outcome of decoding both sides of a CSS code.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub e_hat: PauliErrorPattern,
    pub converged: bool,
    /// Whether `H_Z e_x = s_x` holds for the estimate.
    pub converged_x: bool,
    /// Whether `H_X e_z = s_z` holds for the estimate.
    pub converged_z: bool,
    pub iterations_used: usize,
    /// Unsatisfied checks of both graphs after each iteration.
    pub trace: Vec<usize>,
    /// Soft values on `e_x` from the last iteration.
    pub app_x: Vec<f64>,
    /// Soft values on `e_z` from the last iteration.
    pub app_z: Vec<f64>,
}

/// Check-node step of one graph: SOGRAND on every local view.
fn cn_update(
    graph: &TannerGraph,
    decoder: &SograndDecoder,
    s: &BitVector,
    v2c: &[f64],
    c2v: &mut [f64],
    order: &[usize],
) -> Result<(), SograndError> {
    let nc = graph.component().n();
    for &j in order {
        let edges = j * nc..(j + 1) * nc;
        let out = decoder.decode(&v2c[edges.clone()], &graph.local_syndrome(s, j))?;
        for (dst, l) in c2v[edges].iter_mut().zip(out.l_e) {
            *dst = clamp_llr(l);
        }
    }
    Ok(())
}

fn unsatisfied(graph_h: &crate::gf2::BitMatrix, hard: &BitVector, s: &BitVector) -> usize {
    let mut r = mat_vec_mul(graph_h, hard).expect("hard decision has length n");
    r.xor_assign(s);
    r.weight()
}

fn check_lengths(graph: &TannerGraph, l_ch: usize, s: usize) {
    assert_eq!(l_ch, graph.n(), "channel LLRs must cover every VN");
    assert_eq!(s, graph.m() * graph.component().m(), "syndrome length must match the flattened checks");
}

/// Side decoder with its component decoder and flattened checks prepared.
#[derive(Debug, Clone)]
pub struct SideDecoder<'a> {
    graph: &'a TannerGraph,
    h: crate::gf2::BitMatrix,
    sogrand: SograndDecoder,
}

impl<'a> SideDecoder<'a> {
    pub fn new(graph: &'a TannerGraph, params: SograndParams) -> Result<Self, SograndError> {
        Ok(Self { graph, h: graph.flatten(), sogrand: SograndDecoder::new(graph.component(), params)? })
    }

    pub fn decode(&self, l_ch: &[f64], s: &BitVector, n_iter: usize) -> Result<SideResult, SograndError> {
        let order: Vec<usize> = (0..self.graph.m()).collect();
        self.decode_with_order(l_ch, s, n_iter, &order)
    }

    fn decode_with_order(&self, l_ch: &[f64], s: &BitVector, n_iter: usize, order: &[usize]) -> Result<SideResult, SograndError> {
        let graph = self.graph;
        check_lengths(graph, l_ch.len(), s.len());
        let mut st = MessageState::init(graph, l_ch);
        let mut trace = Vec::with_capacity(n_iter);
        let mut converged = false;
        for _ in 0..n_iter {
            cn_update(graph, &self.sogrand, s, &st.v2c, &mut st.c2v, order)?;
            for i in 0..graph.n() {
                let [e1, e2] = graph.vn_edges(i);
                let app = l_ch[i] + st.c2v[e1] + st.c2v[e2];
                st.app[i] = app;
                st.hard.set(i, app < 0.0);
                for e in [e1, e2] {
                    let ext = app - st.c2v[e];
                    st.v2c[e] = clamp_llr(ext);
                    debug_assert!(
                        ext.abs() > crate::channel::LLR_CLAMP || (st.v2c[e] + st.c2v[e] - app).abs() <= 1e-12 * app.abs().max(1.0)
                    );
                }
            }
            let bad = unsatisfied(&self.h, &st.hard, s);
            trace.push(bad);
            if bad == 0 {
                converged = true;
                break;
            }
        }
        Ok(SideResult { e_hat: st.hard, converged, iterations_used: trace.len(), trace, app: st.app })
    }
}

/// Decodes one classical side: the X graph with `s_z` yields `e_z`, the Z
/// graph with `s_x` yields `e_x`.
pub fn decode_side(
    graph: &TannerGraph,
    l_ch: &[f64],
    s: &BitVector,
    n_iter: usize,
    params: &SograndParams,
) -> Result<SideResult, SograndError> {
    SideDecoder::new(graph, *params)?.decode(l_ch, s, n_iter)
}

fn merge_trace(a: &[usize], b: &[usize]) -> Vec<usize> {
    // a side that stopped early stays satisfied
    let len = a.len().max(b.len());
    (0..len).map(|t| a.get(t).or(a.last()).copied().unwrap_or(0) + b.get(t).or(b.last()).copied().unwrap_or(0)).collect()
}

/// Both-side decoder for a fixed code, reusable across trials.
#[derive(Debug, Clone)]
pub struct GldpcDecoder<'a> {
    code: &'a GldpcCode,
    x_side: SideDecoder<'a>,
    z_side: SideDecoder<'a>,
    config: GldpcConfig,
}

impl<'a> GldpcDecoder<'a> {
    pub fn new(code: &'a GldpcCode, config: GldpcConfig) -> Result<Self, SograndError> {
        Ok(Self {
            code,
            x_side: SideDecoder::new(code.x_graph(), config.sogrand)?,
            z_side: SideDecoder::new(code.z_graph(), config.sogrand)?,
            config,
        })
    }

    pub fn config(&self) -> &GldpcConfig {
        &self.config
    }

    pub fn code(&self) -> &GldpcCode {
        self.code
    }

    /// Runs the two classical sides separately.
    pub fn decode_independent(&self, priors: &ChannelPrior, s_x: &BitVector, s_z: &BitVector) -> Result<DecodeResult, SograndError> {
        let n_iter = self.config.n_iter;
        let z_res = self.x_side.decode(&priors.llr_z, s_z, n_iter)?;
        let x_res = self.z_side.decode(&priors.llr_x, s_x, n_iter)?;
        Ok(DecodeResult {
            e_hat: PauliErrorPattern { e_x: x_res.e_hat, e_z: z_res.e_hat },
            converged: x_res.converged && z_res.converged,
            converged_x: x_res.converged,
            converged_z: z_res.converged,
            iterations_used: x_res.iterations_used.max(z_res.iterations_used),
            trace: merge_trace(&x_res.trace, &z_res.trace),
            app_x: x_res.app,
            app_z: z_res.app,
        })
    }

    /// Runs both graphs jointly, fusing their messages at each qubit as
    /// beliefs over `{I, X, Y, Z}`.
    pub fn decode_correlated(&self, priors: &ChannelPrior, s_x: &BitVector, s_z: &BitVector) -> Result<DecodeResult, SograndError> {
        let order_x: Vec<usize> = (0..self.code.x_graph().m()).collect();
        let order_z: Vec<usize> = (0..self.code.z_graph().m()).collect();
        self.decode_correlated_with_order(priors, s_x, s_z, &order_x, &order_z)
    }

    fn decode_correlated_with_order(
        &self,
        priors: &ChannelPrior,
        s_x: &BitVector,
        s_z: &BitVector,
        order_x: &[usize],
        order_z: &[usize],
    ) -> Result<DecodeResult, SograndError> {
        let (gx, gz) = (self.code.x_graph(), self.code.z_graph());
        let n = self.code.n();
        assert_eq!(priors.pauli.len(), n, "Pauli prior must cover every qubit");
        check_lengths(gx, n, s_z.len());
        check_lengths(gz, n, s_x.len());

        // X-graph messages concern e_z, Z-graph messages concern e_x.
        let mut v2c_x = vec![0.0; gx.num_edges()];
        let mut v2c_z = vec![0.0; gz.num_edges()];
        for (i, p) in priors.pauli.iter().enumerate() {
            for e in gx.vn_edges(i) {
                v2c_x[e] = marginal_z(p);
            }
            for e in gz.vn_edges(i) {
                v2c_z[e] = marginal_x(p);
            }
        }
        let mut c2v_x = vec![0.0; gx.num_edges()];
        let mut c2v_z = vec![0.0; gz.num_edges()];
        let mut app = priors.pauli.clone();
        let mut e_hat = PauliErrorPattern::identity(n);
        let mut trace = Vec::with_capacity(self.config.n_iter);
        let (mut ok_x, mut ok_z) = (false, false);

        for _ in 0..self.config.n_iter {
            cn_update(gx, &self.x_side.sogrand, s_z, &v2c_x, &mut c2v_x, order_x)?;
            cn_update(gz, &self.z_side.sogrand, s_x, &v2c_z, &mut c2v_z, order_z)?;
            for i in 0..n {
                let [x1, x2] = gx.vn_edges(i);
                let [z1, z2] = gz.vn_edges(i);
                let incoming = [
                    belief_from_x_graph(c2v_x[x1]),
                    belief_from_x_graph(c2v_x[x2]),
                    belief_from_z_graph(c2v_z[z1]),
                    belief_from_z_graph(c2v_z[z2]),
                ];
                let fused = fuse(&priors.pauli[i], &incoming, None);
                app[i] = normalized(fused);
                let ext: Vec<PauliBelief> = (0..4).map(|k| fuse(&priors.pauli[i], &incoming, Some(k))).collect();
                debug_assert!((0..4).all(|k| (0..4).all(|mu| {
                    let lhs = ext[k][mu] * incoming[k][mu];
                    (lhs - fused[mu]).abs() <= 1e-9 * fused[mu]
                })));
                v2c_x[x1] = marginal_z(&ext[0]);
                v2c_x[x2] = marginal_z(&ext[1]);
                v2c_z[z1] = marginal_x(&ext[2]);
                v2c_z[z2] = marginal_x(&ext[3]);
                let sym = hard_symbol(&app[i]);
                e_hat.e_x.set(i, sym.x_bit());
                e_hat.e_z.set(i, sym.z_bit());
            }
            let bad_z = unsatisfied(&self.x_side.h, &e_hat.e_z, s_z);
            let bad_x = unsatisfied(&self.z_side.h, &e_hat.e_x, s_x);
            trace.push(bad_x + bad_z);
            ok_x = bad_x == 0;
            ok_z = bad_z == 0;
            if ok_x && ok_z {
                break;
            }
        }
        Ok(DecodeResult {
            e_hat,
            converged: ok_x && ok_z,
            converged_x: ok_x,
            converged_z: ok_z,
            iterations_used: trace.len(),
            trace,
            app_x: app.iter().map(marginal_x).collect(),
            app_z: app.iter().map(marginal_z).collect(),
        })
    }
}

/// Independent X/Z decoding; see [`GldpcDecoder::decode_independent`].
pub fn decode_independent(
    code: &GldpcCode,
    priors: &ChannelPrior,
    s_x: &BitVector,
    s_z: &BitVector,
    config: &GldpcConfig,
) -> Result<DecodeResult, SograndError> {
    GldpcDecoder::new(code, *config)?.decode_independent(priors, s_x, s_z)
}

/// Correlation-aware decoding; see [`GldpcDecoder::decode_correlated`].
pub fn decode_correlated(
    code: &GldpcCode,
    priors: &ChannelPrior,
    s_x: &BitVector,
    s_z: &BitVector,
    config: &GldpcConfig,
) -> Result<DecodeResult, SograndError> {
    GldpcDecoder::new(code, *config)?.decode_correlated(priors, s_x, s_z)
}

/// A message from an `H_X` check speaks about `e_z` only: with
/// `q = P(e_z = 1)`, Z and Y get `q/2` each and I and X get `(1 - q)/2`.
pub fn belief_from_x_graph(l: f64) -> PauliBelief {
    let q = llr_to_prob(clamp_llr(l));
    floored([(1.0 - q) / 2.0, (1.0 - q) / 2.0, q / 2.0, q / 2.0])
}

/// A message from an `H_Z` check speaks about `e_x` only: X and Y get
/// `q/2` each and I and Z get `(1 - q)/2`.
pub fn belief_from_z_graph(l: f64) -> PauliBelief {
    let q = llr_to_prob(clamp_llr(l));
    floored([(1.0 - q) / 2.0, q / 2.0, q / 2.0, (1.0 - q) / 2.0])
}

fn floored(b: PauliBelief) -> PauliBelief {
    b.map(|v| v.max(BELIEF_FLOOR))
}

fn normalized(b: PauliBelief) -> PauliBelief {
    let total: f64 = b.iter().sum();
    b.map(|v| v / total)
}

/// Channel prior times the incoming beliefs, leaving out `skip` if given.
fn fuse(prior: &PauliBelief, incoming: &[PauliBelief; 4], skip: Option<usize>) -> PauliBelief {
    let mut out = floored(*prior);
    for (k, b) in incoming.iter().enumerate() {
        if Some(k) != skip {
            for mu in 0..4 {
                out[mu] *= b[mu];
            }
        }
    }
    out
}

/// `log P(e_z = 0) / P(e_z = 1)` of a belief over `(I, X, Y, Z)`.
pub fn marginal_z(b: &PauliBelief) -> f64 {
    clamp_llr(((b[0] + b[1]) / (b[3] + b[2])).ln())
}

/// `log P(e_x = 0) / P(e_x = 1)` of a belief over `(I, X, Y, Z)`.
pub fn marginal_x(b: &PauliBelief) -> f64 {
    clamp_llr(((b[0] + b[3]) / (b[1] + b[2])).ln())
}

/// Most likely Pauli, ties resolved in the order I, X, Z, Y.
pub fn hard_symbol(b: &PauliBelief) -> crate::gf2::PauliSymbol {
    use crate::gf2::PauliSymbol;
    let mut best = PauliSymbol::I;
    for sym in [PauliSymbol::X, PauliSymbol::Z, PauliSymbol::Y] {
        if b[crate::channel::pauli_index(sym)] > b[crate::channel::pauli_index(best)] {
            best = sym;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{make_priors, syndromes, DepolarizingParams};
    use crate::code::builtin_code;
    use crate::gf2::{Echelon, PauliSymbol};
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    fn priors(code: &GldpcCode, p: f64) -> ChannelPrior {
        make_priors(&DepolarizingParams::new(p).unwrap(), code.n()).unwrap()
    }

    #[test]
    fn zero_syndrome_converges_at_once() {
        let code = builtin_code("toy-gldpc").unwrap();
        let pr = priors(&code, 0.01);
        let s = BitVector::zeros(code.hx().rows());
        let res = decode_side(code.x_graph(), &pr.llr_z, &s, 20, &SograndParams::default()).unwrap();
        assert!(res.converged);
        assert_eq!(res.iterations_used, 1);
        assert!(res.e_hat.is_zero());
    }

    #[test]
    fn zero_app_decodes_to_zero() {
        let mut st = MessageState::init(builtin_code("steane").unwrap().x_graph(), &[0.0; 7]);
        st.hard = st.app.iter().map(|&l| l < 0.0).collect();
        assert!(st.hard.is_zero());
    }

    #[test]
    fn weight_one_z_errors_are_corrected_up_to_stabilizers() {
        for name in ["steane", "toy-gldpc", "toric-3"] {
            let code = builtin_code(name).unwrap();
            let pr = priors(&code, 0.03);
            let dec = GldpcDecoder::new(&code, GldpcConfig::default()).unwrap();
            let stab = Echelon::new(code.hz());
            for q in 0..code.n() {
                let e_z = BitVector::from_support(code.n(), [q]);
                let s_z = mat_vec_mul(code.hx(), &e_z).unwrap();
                let s_x = BitVector::zeros(code.hz().rows());
                let res = dec.decode_independent(&pr, &s_x, &s_z).unwrap();
                assert!(res.converged, "{name} qubit {q}");
                assert!(res.e_hat.e_x.is_zero());
                let mut r = res.e_hat.e_z.clone();
                r.xor_assign(&e_z);
                assert!(stab.contains_row(&r).unwrap(), "{name} qubit {q}");
            }
        }
    }

    #[test]
    fn pure_z_error_leaves_x_side_idle() {
        let code = builtin_code("toy-gldpc").unwrap();
        let pr = priors(&code, 0.03);
        let s_z = mat_vec_mul(code.hx(), &BitVector::from_support(36, [5])).unwrap();
        let s_x = BitVector::zeros(code.hz().rows());
        let dec = GldpcDecoder::new(&code, GldpcConfig::default()).unwrap();
        let res = dec.decode_independent(&pr, &s_x, &s_z).unwrap();
        assert!(res.e_hat.e_x.is_zero());
        let x_only = dec.z_side.decode(&pr.llr_x, &s_x, 20).unwrap();
        assert_eq!(x_only.iterations_used, 1);
    }

    #[test]
    fn sides_mirror_under_swapped_roles() {
        // in the toy code the Z graph is the X graph under a qubit relabeling,
        // so compare the Steane code whose sides are literally identical
        let code = builtin_code("steane").unwrap();
        let pr = priors(&code, 0.05);
        let dec = GldpcDecoder::new(&code, GldpcConfig::default()).unwrap();
        for q in 0..7 {
            let e = BitVector::from_support(7, [q]);
            let s = mat_vec_mul(code.hx(), &e).unwrap();
            let zero = BitVector::zeros(s.len());
            let a = dec.decode_independent(&pr, &zero, &s).unwrap();
            let b = dec.decode_independent(&pr, &s, &zero).unwrap();
            assert_eq!(a.e_hat.e_z, b.e_hat.e_x);
            assert_eq!(a.e_hat.e_x, b.e_hat.e_z);
            assert_eq!(a.iterations_used, b.iterations_used);
        }
    }

    #[test]
    fn uniform_message_is_neutral() {
        let b = belief_from_z_graph(0.0);
        assert!(b.iter().all(|&v| (v - 0.25).abs() < 1e-15));
        let prior = [0.4, 0.35, 0.1, 0.15];
        let other = belief_from_x_graph(2.0);
        let with = normalized(fuse(&prior, &[other, b, b, b], None));
        let without = normalized(fuse(&prior, &[other, b, b, b], Some(1)));
        for mu in 0..4 {
            assert!((with[mu] - without[mu]).abs() < 1e-12);
        }
    }

    #[test]
    fn marginals_of_depolarizing_prior_match_independent_llr() {
        let p = 0.06f64;
        let b = [1.0 - p, p / 3.0, p / 3.0, p / 3.0];
        let expect = ((1.0 - 2.0 * p / 3.0) / (2.0 * p / 3.0)).ln();
        assert!((marginal_x(&b) - expect).abs() < 1e-12);
        assert!((marginal_z(&b) - expect).abs() < 1e-12);
    }

    #[test]
    fn hard_symbol_tie_order() {
        assert_eq!(hard_symbol(&[0.25; 4]), PauliSymbol::I);
        assert_eq!(hard_symbol(&[0.1, 0.3, 0.3, 0.3]), PauliSymbol::X);
        assert_eq!(hard_symbol(&[0.1, 0.2, 0.35, 0.35]), PauliSymbol::Z);
        assert_eq!(hard_symbol(&[0.1, 0.2, 0.4, 0.3]), PauliSymbol::Y);
    }

    #[test]
    fn correlated_decoder_corrects_single_paulis() {
        let code = builtin_code("toy-gldpc").unwrap();
        let pr = priors(&code, 0.03);
        let dec = GldpcDecoder::new(&code, GldpcConfig::default()).unwrap();
        let (sx, sz) = (Echelon::new(code.hx()), Echelon::new(code.hz()));
        for q in 0..code.n() {
            for sym in [PauliSymbol::X, PauliSymbol::Y, PauliSymbol::Z] {
                let mut symbols = vec![PauliSymbol::I; code.n()];
                symbols[q] = sym;
                let e = PauliErrorPattern::from_symbols(&symbols);
                let s = syndromes(&code, &e).unwrap();
                let res = dec.decode_correlated(&pr, &s.s_x, &s.s_z).unwrap();
                assert!(res.converged, "qubit {q} {sym:?}");
                let mut rx = res.e_hat.e_x.clone();
                rx.xor_assign(&e.e_x);
                let mut rz = res.e_hat.e_z.clone();
                rz.xor_assign(&e.e_z);
                assert!(sx.contains_row(&rx).unwrap() && sz.contains_row(&rz).unwrap());
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn flooding_ignores_check_order(seed in any::<u64>(), trial in 0u64..1000) {
            let code = builtin_code("toy-gldpc").unwrap();
            let params = DepolarizingParams::new(0.08).unwrap();
            let e = crate::channel::sample_error(&params, code.n(), crate::channel::TrialSeed::new(seed, trial));
            let s = syndromes(&code, &e).unwrap();
            let pr = make_priors(&params, code.n()).unwrap();
            let dec = GldpcDecoder::new(&code, GldpcConfig::default()).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut order: Vec<usize> = (0..code.x_graph().m()).collect();
            let canonical = dec.x_side.decode(&pr.llr_z, &s.s_z, 20).unwrap();
            order.shuffle(&mut rng);
            let shuffled = dec.x_side.decode_with_order(&pr.llr_z, &s.s_z, 20, &order).unwrap();
            prop_assert_eq!(&canonical, &shuffled);
            if canonical.converged {
                prop_assert_eq!(mat_vec_mul(code.hx(), &canonical.e_hat).unwrap(), s.s_z.clone());
            }
            let mut order_z: Vec<usize> = (0..code.z_graph().m()).collect();
            order_z.shuffle(&mut rng);
            let a = dec.decode_correlated(&pr, &s.s_x, &s.s_z).unwrap();
            let b = dec.decode_correlated_with_order(&pr, &s.s_x, &s.s_z, &order, &order_z).unwrap();
            prop_assert_eq!(&a, &b);
            if a.converged {
                prop_assert_eq!(mat_vec_mul(code.hz(), &a.e_hat.e_x).unwrap(), s.s_x);
            }
        }
    }
}
