//! Fuzz bodies, shared by the libFuzzer targets and the corpus replay test.
//! Each one checks the invariants that must survive arbitrary input.

use qtanner::bp::{minsum_decode as minsum, BpConfig};
use qtanner::channel::{make_priors, DepolarizingParams};
use qtanner::code::{builtin_code, ComponentCode, GldpcCode};
use qtanner::gf2::{mat_vec_mul, BitMatrix, BitVector, Echelon};
use qtanner::gldpc::{GldpcConfig, GldpcDecoder};
use qtanner::harness::io::{parse_convergence_csv, parse_curve_csv};
use qtanner::osd::{osd_postprocess as osd, OsdConfig, OsdStrategy};
use qtanner::sogrand::SograndParams;

/// Reads structured values off the front of the input, padding with zeros.
struct Bytes<'a>(&'a [u8]);

impl Bytes<'_> {
    fn byte(&mut self) -> u8 {
        match self.0.split_first() {
            Some((&b, rest)) => {
                self.0 = rest;
                b
            }
            None => 0,
        }
    }

    fn below(&mut self, bound: usize) -> usize {
        self.byte() as usize % bound
    }

    fn bits(&mut self, n: usize) -> BitVector {
        (0..n).map(|i| self.byte() >> (i % 8) & 1 == 1).collect()
    }

    fn matrix(&mut self, rows: usize, cols: usize) -> BitMatrix {
        let dense: Vec<Vec<u8>> = (0..rows).map(|_| self.bits(cols).to_u8s()).collect();
        BitMatrix::from_dense(&dense, cols).expect("rows have the declared width")
    }

    /// A finite LLR, or occasionally an extreme one.
    fn llr(&mut self) -> f64 {
        match self.byte() {
            255 => f64::MAX,
            254 => -f64::MAX,
            253 => 0.0,
            b => (b as i8) as f64 / 8.0,
        }
    }

    fn llrs(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.llr()).collect()
    }
}

pub fn code_file(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(code) = GldpcCode::from_json_str(text) {
        assert!(code.hx().mul_transpose(code.hz()).unwrap().to_dense().iter().flatten().all(|&b| b == 0));
        let again = GldpcCode::from_json_str(&code.to_json_string()).expect("serialized codes reload");
        assert_eq!(again.hx(), code.hx());
        assert_eq!(again.hz(), code.hz());
    }
}

pub fn curve_csv(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(points) = parse_curve_csv(text, "fuzz") {
        let again = parse_curve_csv(&qtanner::harness::io::curve_to_csv(&points), "fuzz").expect("written CSV reparses");
        assert_eq!(again.len(), points.len());
    }
    let _ = parse_convergence_csv(text, "fuzz");
}

pub fn gf2_solve(data: &[u8]) {
    let mut b = Bytes(data);
    let (m, n) = (b.below(12), 1 + b.below(40));
    let h = b.matrix(m, n);
    let s = b.bits(m);
    let ech = Echelon::new(&h);
    assert!(ech.rank() <= m.min(n));
    match ech.solve_coset(&s, Some(&b.bits(n))) {
        Ok(x) => assert_eq!(mat_vec_mul(&h, &x).unwrap(), s),
        // no solution only when s lies outside the column space
        Err(_) => {
            let ht = h.transpose();
            let rank = Echelon::new(&ht).rank();
            assert!(Echelon::new(&ht.with_row(&s).unwrap()).rank() > rank);
        }
    }
    for k in ech.kernel_basis() {
        assert!(mat_vec_mul(&h, &k).unwrap().is_zero());
    }
}

fn sogrand_input(data: &[u8]) -> Option<(ComponentCode, Vec<f64>, BitVector, SograndParams)> {
    let mut b = Bytes(data);
    let n = 1 + b.below(14);
    let m = b.below(n.min(6) + 1);
    let comp = ComponentCode::new(b.matrix(m, n)).ok()?;
    let s = b.bits(m);
    let l = b.llrs(n);
    let params = SograndParams { list_max: 1 + b.below(8), query_budget: Some(1 + b.below(1 << n.min(8))), confidence_stop: None };
    Some((comp, l, s, params))
}

pub fn sogrand_decode(data: &[u8]) {
    let Some((comp, l, s, params)) = sogrand_input(data) else { return };
    let Ok(out) = qtanner::sogrand::sogrand_decode(&comp, &l, &s, &params) else { return };
    let list = &out.list;
    assert!(list.p_l() >= 0.0 && list.p_lc() >= 0.0);
    assert_eq!(list.p_l() + list.p_lc(), list.p_tot());
    for c in list.entries() {
        assert_eq!(mat_vec_mul(comp.h(), &c.pattern).unwrap(), s);
    }
    assert!(out.l_app.iter().all(|x| !x.is_nan()));
    assert!(out.l_e.iter().all(|x| !x.is_nan()));
}

pub fn osd_postprocess(data: &[u8]) {
    let mut b = Bytes(data);
    let (m, n) = (1 + b.below(8), 1 + b.below(16));
    let h = b.matrix(m, n);
    let s = b.bits(m);
    let soft = b.llrs(n);
    let chan = b.llrs(n);
    let cfg = OsdConfig {
        order: b.below(n + 1),
        strategy: if b.byte() & 1 == 0 { OsdStrategy::Exhaustive } else { OsdStrategy::CombinationSweep },
    };
    if cfg.strategy == OsdStrategy::Exhaustive && cfg.order > 12 {
        return;
    }
    match osd(&h, &s, &soft, &chan, &cfg) {
        Ok(out) => assert_eq!(mat_vec_mul(&h, &out.pattern).unwrap(), s),
        Err(e) => {
            assert!(matches!(e, qtanner::osd::OsdError::Inconsistent), "{e}");
            assert!(Echelon::new(&h).solve_coset(&s, None).is_err());
        }
    }
}

pub fn minsum_decode(data: &[u8]) {
    let mut b = Bytes(data);
    let (m, n) = (1 + b.below(10), 1 + b.below(24));
    let h = b.matrix(m, n);
    let s = b.bits(m);
    let l = b.llrs(n);
    let cfg = BpConfig { alpha: 0.625, n_iter: 1 + b.below(30) };
    if let Ok(out) = minsum(&h, &l, &s, &cfg) {
        if out.converged {
            assert_eq!(mat_vec_mul(&h, &out.e_hat).unwrap(), s);
        }
    }
}

pub fn gldpc_decode(data: &[u8]) {
    let mut b = Bytes(data);
    let name = ["steane", "toric-3", "toy-gldpc"][b.below(3)];
    let code = builtin_code(name).expect("built-in code");
    let p = 0.001 + 0.7 * b.byte() as f64 / 256.0;
    let priors = make_priors(&DepolarizingParams::new(p).unwrap(), code.n()).unwrap();
    let s_x = b.bits(code.hz().rows());
    let s_z = b.bits(code.hx().rows());
    let cfg = GldpcConfig { n_iter: 1 + b.below(6), sogrand: SograndParams::default() };
    let dec = GldpcDecoder::new(&code, cfg).unwrap();
    let res = if b.byte() & 1 == 0 { dec.decode_independent(&priors, &s_x, &s_z) } else { dec.decode_correlated(&priors, &s_x, &s_z) }
        .expect("well-formed inputs decode");
    if res.converged {
        assert_eq!(mat_vec_mul(code.hz(), &res.e_hat.e_x).unwrap(), s_x);
        assert_eq!(mat_vec_mul(code.hx(), &res.e_hat.e_z).unwrap(), s_z);
    }
}
