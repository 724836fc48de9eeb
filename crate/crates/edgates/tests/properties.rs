use edgates::bloch::{branch_transform, mode_transform, Branch};
use edgates::circuits::{Schedule, Segment};
use edgates::dynamics::propagate_unitary;
use edgates::fock::{HilbertLayout, Level, PumpParams};
use edgates::units::mhz;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = PumpParams> {
    (0.0..3.0f64, -3.2..3.2f64, -2.0..2.0f64, -2.0..2.0f64)
        .prop_map(|(g, varphi, delta, chi)| PumpParams::new(mhz(g), varphi, mhz(delta), mhz(chi), mhz(chi) / 2.0).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transforms_compose(p in params(), t1 in 0.0..2e-6f64, t2 in 0.0..2e-6f64) {
        let joined = mode_transform(&p, t1 + t2).unwrap();
        let split = mode_transform(&p, t1).unwrap().then(&mode_transform(&p, t2).unwrap());
        prop_assert!((joined.matrix() - split.matrix()).norm() < 1e-10);
        prop_assert!(joined.unitarity_error() < 1e-10);
    }

    #[test]
    fn full_space_single_photon_block_matches_transform(p in params(), t in 1e-8..2e-6f64) {
        let layout = HilbertLayout::uniform(2, 3).unwrap();
        let s = Schedule { segments: vec![Segment::beamsplitter(p, t).unwrap()], ..Default::default() };
        let u = propagate_unitary(&s, &layout).unwrap();
        let m = u.matrix();
        for (level, branch) in [(Level::G, Branch::G), (Level::F, Branch::F)] {
            let idx = |n: [usize; 2]| layout.index(level, &n).unwrap();
            let vac = m[(idx([0, 0]), idx([0, 0]))];
            let expected = branch_transform(&p, branch, t).unwrap().matrix();
            for (r, nr) in [[1, 0], [0, 1]].into_iter().enumerate() {
                for (c, nc) in [[1, 0], [0, 1]].into_iter().enumerate() {
                    prop_assert!((m[(idx(nr), idx(nc))] / vac - expected[(r, c)]).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn beamsplitter_conserves_total_photons(p in params(), t in 1e-8..2e-6f64) {
        let layout = HilbertLayout::uniform(2, 3).unwrap();
        let s = Schedule { segments: vec![Segment::beamsplitter(p, t).unwrap()], ..Default::default() };
        let u = propagate_unitary(&s, &layout).unwrap();
        let out = u.apply(&layout.basis_ket(Level::G, &[1, 1]).unwrap());
        let kept: f64 = [[2, 0], [1, 1], [0, 2]].iter().map(|n| out[layout.index(Level::G, n).unwrap()].norm_sqr()).sum();
        prop_assert!((kept - 1.0).abs() < 1e-12);
    }
}
