use edgates::closure::*;
use edgates::fock::HilbertLayout;

fn layout() -> HilbertLayout {
    HilbertLayout::uniform(2, DEFAULT_MODE_DIM).unwrap()
}

fn window() -> Window {
    Window::guard_band(&layout(), DEFAULT_GUARD).unwrap()
}

fn op(s: &str) -> edgates::fock::Operator {
    parse_operator(s, &layout()).unwrap()
}

#[test]
fn table_iv_verdicts() {
    let report = table_iv_report().unwrap();
    assert_eq!(report.rows.len(), 14);
    for row in &report.rows {
        assert!(row.matches(), "{row:?}");
    }
    let plain: Vec<_> = report.rows.iter().filter(|r| !r.sigma_z).map(|r| r.commutator_with_a.as_str()).collect();
    assert_eq!(plain, ["-a", "-1", "-b", "-b†", "-2a†", "-a b - a b†", "-b†b"]);
    let md = report.to_markdown();
    assert_eq!(md.lines().filter(|l| l.starts_with("| ")).count(), 15);
}

#[test]
fn squeezing_pair_witness_is_b_dagger() {
    let w = window();
    let hw = ErrorSet::from_exprs("hw", &HARDWARE, &w).unwrap();
    let corr = ErrorSet::from_exprs("corr", &CORRECTABLE, &w).unwrap();
    let v = check_closure(&op("a† b† + a b"), &hw, &corr, DEFAULT_MAX_DEPTH).unwrap();
    assert!(!v.closed);
    let witness = w.vectorize(&v.witness.unwrap()).unwrap();
    let bd = w.vectorize(&op("b†")).unwrap();
    let cos = witness.dotc(&bd).norm() / (witness.norm() * bd.norm());
    assert!((cos - 1.0).abs() < 1e-12, "{cos}");
}

#[test]
fn displacement_and_cross_kerr_rows() {
    let w = window();
    let hw = ErrorSet::from_exprs("hw", &HARDWARE, &w).unwrap();
    let corr = ErrorSet::from_exprs("corr", &CORRECTABLE, &w).unwrap();
    assert!(check_closure(&op("a + a†"), &hw, &corr, 6).unwrap().closed);
    assert!(!check_closure(&op("a†a (b + b†)"), &hw, &corr, 6).unwrap().closed);
}

#[test]
fn example_a_beamsplitter_extends_to_a_b() {
    let w = window();
    let hw = ErrorSet::from_exprs("hw", &HARDWARE, &w).unwrap();
    let ext = generate_extended_set(&op("0.5 (a† b + a b†)"), &hw, DEFAULT_MAX_DEPTH).unwrap();
    assert!(ext.converged);
    assert!(ext.set.same_span(&ErrorSet::from_exprs("ab", &["a", "b"], &w).unwrap()).unwrap());
    // ab alone is not carried along: its commutator leaves span{a, b, ab}.
    let with_ab = ErrorSet::from_exprs("hw", &["a", "b", "a b"], &w).unwrap();
    let corr = ErrorSet::from_exprs("corr", &["a", "b", "a b"], &w).unwrap();
    assert!(!check_closure(&op("a† b + a b†"), &with_ab, &corr, 6).unwrap().closed);
}

#[test]
fn example_b_chi_beamsplitter_extended_set() {
    let w = window();
    let hw = ErrorSet::from_exprs("hw", &HARDWARE_SZ, &w).unwrap();
    let h = op("0.5 (a† b + a b†) + 0.3 a†a + 0.35 sz a†a");
    let ext = generate_extended_set(&h, &hw, DEFAULT_MAX_DEPTH).unwrap();
    assert!(ext.converged);
    let target = ErrorSet::from_exprs("t", &["a", "b", "sz", "a sz", "b sz"], &w).unwrap();
    assert!(ext.set.same_span(&target).unwrap());
    assert!(ext.set.orthonormality_error() < 1e-10);
    let corr = ErrorSet::from_exprs("corr", &CORRECTABLE_SZ, &w).unwrap();
    assert!(check_closure(&h, &hw, &corr, 6).unwrap().closed);
}

// Windows where the truncated evolution is exact: number-conserving H on states
// with at most (d-1)/2 photons per mode, or a large truncation for displacements.
fn bch_case(h: &str, dims: Vec<usize>, cutoffs: &[usize], sz: bool) -> f64 {
    let l = HilbertLayout::new(dims).unwrap();
    let w = Window::photon_cutoff(&l, cutoffs).unwrap();
    let corr_list: &[&str] = if sz { &CORRECTABLE_SZ } else { &CORRECTABLE };
    let corr = ErrorSet::from_exprs("corr", corr_list, &w).unwrap();
    let mut h = parse_operator(h, &l).unwrap();
    if sz {
        h = h.compose(&parse_operator("sz", &l).unwrap()).unwrap();
    }
    let scale = spectral_norm(&h);
    let mut worst: f64 = 0.0;
    for eps in ["a", "b"] {
        let e = parse_operator(eps, &l).unwrap();
        for t in [0.1, 1.0, 10.0] {
            worst = worst.max(bch_residual(&h, &e, &corr, t / scale).unwrap());
        }
    }
    worst
}

#[test]
fn bch_series_stays_correctable_on_closed_rows() {
    for sz in [false, true] {
        assert!(bch_case("a†a", vec![8, 8], &[3, 3], sz) < 1e-7);
        assert!(bch_case("a b† + a† b", vec![8, 8], &[3, 3], sz) < 1e-7);
        assert!(bch_case("a + a†", vec![24, 2], &[3, 1], sz) < 1e-7);
    }
}

#[test]
fn bch_detects_open_row() {
    assert!(bch_case("a† b† + a b", vec![8, 8], &[3, 3], false) > 1e-3);
}

#[test]
fn sums_of_closed_rows_are_closed() {
    let w = window();
    let hw = ErrorSet::from_exprs("hw", &HARDWARE, &w).unwrap();
    let corr = ErrorSet::from_exprs("corr", &CORRECTABLE, &w).unwrap();
    let closed: Vec<_> = TABLE_IV.iter().filter(|r| r.1).map(|r| r.0).collect();
    for (i, h1) in closed.iter().enumerate() {
        for h2 in &closed[i + 1..] {
            let h = op(&format!("0.7 ({h1}) + 1.3 ({h2})"));
            assert!(check_closure(&h, &hw, &corr, 6).unwrap().closed, "{h1} + {h2}");
        }
    }
}
