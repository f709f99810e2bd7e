//! Public-API checks that cut across modules.

mod common;

use qtanner::channel::{make_priors, sample_error, syndromes, DepolarizingParams, TrialSeed};
use qtanner::code::{builtin_codes, compute_logicals, load_code, write_code, GldpcCode};
use qtanner::gf2::{in_row_space, mat_vec_mul, BitMatrix, BitVector, Echelon};
use qtanner::harness::{residual_is_stabilizer, run_sweep_on, DecoderKind, ExperimentConfig};
use qtanner::sogrand::{sogrand_decode, SograndParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn builtin_codes_survive_a_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for code in builtin_codes() {
        let path = dir.path().join(format!("{}.json", code.name()));
        write_code(&code, &path).unwrap();
        let back = load_code(&path).unwrap();
        assert_eq!(back.hx(), code.hx());
        assert_eq!(back.hz(), code.hz());
        assert_eq!((back.n(), back.k(), back.d()), (code.n(), code.k(), code.d()));
        assert_eq!(GldpcCode::from_json_str(&code.to_json_string()).unwrap().to_json_string(), code.to_json_string());
    }
}

#[test]
fn builtin_codes_are_valid_css_codes() {
    for code in builtin_codes() {
        assert!(code.hx().mul_transpose(code.hz()).unwrap().to_dense().iter().flatten().all(|&b| b == 0));
        let rank_x = Echelon::new(code.hx()).rank();
        let rank_z = Echelon::new(code.hz()).rank();
        assert_eq!(code.k(), code.n() - rank_x - rank_z, "{}", code.name());
        let logicals = compute_logicals(&code);
        assert_eq!(logicals.x_logicals.len(), code.k());
        assert_eq!(logicals.z_logicals.len(), code.k());
        for lx in &logicals.x_logicals {
            assert!(mat_vec_mul(code.hz(), lx).unwrap().is_zero());
            assert!(!in_row_space(code.hx(), lx).unwrap());
            // a nontrivial logical X anticommutes with some logical Z
            assert!(logicals.z_logicals.iter().any(|lz| lx.dot(lz)));
        }
        for lz in &logicals.z_logicals {
            assert!(mat_vec_mul(code.hx(), lz).unwrap().is_zero());
            assert!(!in_row_space(code.hz(), lz).unwrap());
        }
    }
}

#[test]
fn errors_with_zero_syndrome_are_stabilizers_or_logicals() {
    let code = qtanner::code::builtin_code("toric-3").unwrap();
    let stab_x = Echelon::new(code.hx());
    let stab_z = Echelon::new(code.hz());
    let params = DepolarizingParams::new(0.4).unwrap();
    for t in 0..500 {
        let e = sample_error(&params, code.n(), TrialSeed::new(3, t));
        let s = syndromes(&code, &e).unwrap();
        if s.s_x.is_zero() && s.s_z.is_zero() {
            let id = qtanner::channel::PauliErrorPattern::identity(code.n());
            let ok = residual_is_stabilizer(&code, &stab_x, &stab_z, &e, &id);
            let is_stab = stab_x.contains_row(&e.e_x).unwrap() && stab_z.contains_row(&e.e_z).unwrap();
            assert_eq!(ok, is_stab);
        }
    }
}

#[test]
fn channel_rates_match_the_depolarizing_model() {
    let n = 200;
    let trials = 2000u64;
    for p in [0.03, 0.3] {
        let params = DepolarizingParams::new(p).unwrap();
        let mut counts = [0u64; 4];
        for t in 0..trials {
            let e = sample_error(&params, n, TrialSeed::new(11, t));
            for i in 0..n {
                counts[e.e_x.get(i) as usize + 2 * e.e_z.get(i) as usize] += 1;
            }
        }
        let total = (trials * n as u64) as f64;
        let expect = [1.0 - p, p / 3.0, p / 3.0, p / 3.0];
        for (c, e) in counts.iter().zip(expect) {
            let sigma = (e * (1.0 - e) / total).sqrt();
            assert!((*c as f64 / total - e).abs() < 5.0 * sigma, "p={p}: {counts:?}");
        }
        let priors = make_priors(&params, n).unwrap();
        let expected_llr = ((1.0 - 2.0 * p / 3.0) / (2.0 * p / 3.0)).ln();
        assert!(priors.llr_x.iter().chain(&priors.llr_z).all(|l| (l - expected_llr).abs() < 1e-12));
    }
}

#[test]
fn sogrand_marginals_match_the_oracle_on_the_hamming_code() {
    let h = common::hamming();
    let comp = qtanner::code::ComponentCode::new(h.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let full = SograndParams { list_max: 128, query_budget: Some(128), confidence_stop: None };
    for _ in 0..200 {
        let l: Vec<f64> = (0..7).map(|_| rng.random_range(-3.0..6.0)).collect();
        let s = mat_vec_mul(&h, &common::random_bits(&mut rng, 7)).unwrap();
        let out = sogrand_decode(&comp, &l, &s, &full).unwrap();
        let (marg, map) = common::syndrome_marginals(&h, &l, &s);
        assert_eq!(out.best_pattern, map);
        for (app, p1) in out.l_app.iter().zip(marg) {
            assert!((1.0 / (1.0 + app.exp()) - p1).abs() < 1e-9);
        }
    }
}

#[test]
fn truncated_lists_stay_close_to_exact_marginals() {
    // with the default list size, the soft output should still track the
    // exact marginals in sign for confident inputs
    let h = common::hamming();
    let comp = qtanner::code::ComponentCode::new(h.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut agree = 0;
    let cases = 300;
    for _ in 0..cases {
        let e = BitVector::from_support(7, [rng.random_range(0..7)]);
        let s = mat_vec_mul(&h, &e).unwrap();
        let l: Vec<f64> = (0..7).map(|_| rng.random_range(2.0..5.0)).collect();
        let out = sogrand_decode(&comp, &l, &s, &SograndParams::default()).unwrap();
        let (marg, _) = common::syndrome_marginals(&h, &l, &s);
        if out.l_app.iter().zip(&marg).all(|(a, p)| (*a < 0.0) == (*p > 0.5)) {
            agree += 1;
        }
    }
    assert!(agree * 100 >= cases * 95, "{agree}/{cases}");
}

#[test]
fn sweeps_are_reproducible_and_seed_sensitive() {
    let code = qtanner::code::builtin_code("toy-gldpc").unwrap();
    let mut cfg = ExperimentConfig::new("builtin:toy-gldpc", DecoderKind::SograndOsd);
    cfg.p_grid = vec![0.06];
    cfg.trials = 400;
    cfg.seed = 1;
    let a = run_sweep_on(&code, &cfg).unwrap();
    assert_eq!(a, run_sweep_on(&code, &cfg).unwrap());
    cfg.seed = 2;
    assert_ne!(a, run_sweep_on(&code, &cfg).unwrap());
}

#[test]
fn max_failures_stops_early() {
    let code = qtanner::code::builtin_code("steane").unwrap();
    let mut cfg = ExperimentConfig::new("builtin:steane", DecoderKind::Bp);
    cfg.p_grid = vec![0.2];
    cfg.trials = 50_000;
    cfg.max_failures = Some(25);
    let pts = run_sweep_on(&code, &cfg).unwrap();
    assert_eq!(pts[0].failures, 25);
    assert!(pts[0].trials < 50_000);
}

#[test]
fn random_matrices_solve_consistently() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..200 {
        let (m, n) = (rng.random_range(1..8), rng.random_range(1..14));
        let h: BitMatrix = common::random_matrix(&mut rng, m, n);
        let e = common::random_bits(&mut rng, n);
        let s = mat_vec_mul(&h, &e).unwrap();
        let ech = Echelon::new(&h);
        let x = ech.solve_coset(&s, None).unwrap();
        assert_eq!(mat_vec_mul(&h, &x).unwrap(), s);
        for k in ech.kernel_basis() {
            assert!(mat_vec_mul(&h, &k).unwrap().is_zero());
        }
        assert_eq!(ech.kernel_basis().len(), n - ech.rank());
    }
}
