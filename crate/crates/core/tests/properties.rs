use num::{Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use genbound::bounds::{all_bounds, default_sigma, dv_lemma_check, Analysis};
use genbound::cmi::build_cmi_joint;
use genbound::counterexample::{draw_hypothesis, loss_eval, parity, Partition};
use genbound::lemmacov::{brute_force_parity_dist, joint_parity_prob, marginal_parity_prob, ParityEnsemble};
use genbound::probcore::rational::rational_from_i64;
use genbound::probcore::{kl, Axis, FiniteDist, JointDist};
use genbound::setting::{random_setting, GapOptions, LearningSetting, SizeCaps};
use genbound::Limits;

fn joint3(sizes: [u32; 3], weights: &[u128]) -> JointDist {
    let axes = vec![Axis::new("A", sizes[0]), Axis::new("B", sizes[1]), Axis::new("C", sizes[2])];
    let mut cells = Vec::new();
    let mut it = weights.iter().cycle();
    for a in 0..sizes[0] {
        for b in 0..sizes[1] {
            for c in 0..sizes[2] {
                cells.push((vec![a, b, c], *it.next().unwrap()));
            }
        }
    }
    if cells.iter().all(|c| c.1 == 0) {
        cells[0].1 = 1;
    }
    JointDist::new(axes, cells).unwrap()
}

fn small_caps() -> SizeCaps {
    SizeCaps { max_data: 3, max_n: 2, max_hypotheses: 4 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mutual_information_basics(sizes in prop::array::uniform3(1u32..4), w in prop::collection::vec(0u128..5, 1..20)) {
        let j = joint3(sizes, &w);
        let ab = j.mutual_information(&["A"], &["B"]).unwrap().0;
        let ba = j.mutual_information(&["B"], &["A"]).unwrap().0;
        prop_assert!(ab >= 0.0);
        prop_assert!((ab - ba).abs() < 1e-12);
        // Chain rule: I(A; B, C) = I(A; B) + I(A; C | B).
        let abc = j.mutual_information(&["A"], &["B", "C"]).unwrap().0;
        let acb = j.conditional_mi(&["A"], &["C"], &["B"]).unwrap().0;
        prop_assert!((abc - ab - acb).abs() < 1e-9);
        // Conditional MI is the weighted mean of the disintegrated values.
        let t = j.total() as f64;
        let mean: f64 = j.disintegration(&["A"], &["C"], &["B"]).unwrap().iter().map(|s| s.weight as f64 / t * s.mi.0).sum();
        prop_assert!((mean - acb).abs() < 1e-9);
    }

    #[test]
    fn products_are_exactly_independent(x in prop::collection::vec(0u128..6, 1..5), y in prop::collection::vec(0u128..6, 1..5)) {
        prop_assume!(x.iter().any(|&v| v > 0) && y.iter().any(|&v| v > 0));
        let (px, py) = (FiniteDist::from_weights(x).unwrap(), FiniteDist::from_weights(y).unwrap());
        let j = JointDist::product("X", &px, "Y", &py).unwrap();
        prop_assert_eq!(j.mutual_information(&["X"], &["Y"]).unwrap().0, 0.0);
        prop_assert!(j.is_independent(&["X"], &["Y"]).unwrap());
        prop_assert_eq!(kl(&px, &px).unwrap().0, 0.0);
        let unif = FiniteDist::uniform(px.len());
        prop_assert!(kl(&px, &unif).unwrap().0 >= 0.0);
    }

    #[test]
    fn setting_invariants(seed in any::<u64>()) {
        let s = random_setting(seed, SizeCaps::default());
        prop_assert_eq!(&s, &random_setting(seed, SizeCaps::default()));
        prop_assert_eq!(&LearningSetting::from_json(&s.to_json()).unwrap(), &s);
        let st = s.gap_stats(&Limits::default(), &GapOptions::default()).unwrap();
        prop_assert_eq!(&st.expected_gap, &st.expected_gap_via_risks);
        let sq = &st.expected_gap * &st.expected_gap;
        prop_assert!(st.expected_squared_gap >= sq);
        prop_assert_eq!(st.expected_squared_gap == sq, st.gap_is_constant);
        for k in 2..=6 {
            prop_assert!(*st.moment(k).unwrap() <= st.expected_squared_gap);
        }
        for t in &st.tails {
            prop_assert!(t.one_sided.value() <= t.absolute.value());
        }
    }

    #[test]
    fn standard_bounds_hold(seed in any::<u64>()) {
        let s = random_setting(seed, small_caps());
        let a = Analysis::new(&s, &Limits::default()).unwrap();
        for b in all_bounds(&a, &default_sigma()).unwrap() {
            prop_assert!(b.holds, "{:?}", b);
        }
    }

    #[test]
    fn supersample_consistency(seed in any::<u64>()) {
        let s = random_setting(seed, small_caps());
        let sj = build_cmi_joint(&s, &Limits::default()).unwrap();
        prop_assert!(sj.sample_marginal_consistent().unwrap());
        let st = s.gap_stats(&Limits::default(), &GapOptions::default()).unwrap();
        prop_assert_eq!(sj.expected_squared_gap(), &st.expected_squared_gap);
        for i in 0..s.n() {
            prop_assert!(sj.cmi_i(i).unwrap() <= std::f64::consts::LN_2 + 1e-12);
        }
    }

    #[test]
    fn decoupling_holds(sizes in prop::array::uniform3(1u32..4), w in prop::collection::vec(0u128..5, 1..20), f in prop::collection::vec(0i64..=4, 9)) {
        let j = joint3(sizes, &w);
        let r = dv_lemma_check(&j, &["A"], &["B", "C"], |a, bc| rational_from_i64(f[((a[0] + bc[0] + bc[1]) % 9) as usize], 4), &default_sigma()).unwrap();
        prop_assert!(r.holds, "{:?}", r);
        let c = dv_lemma_check(&j, &["A"], &["B"], |_, _| rational_from_i64(1, 2), &default_sigma()).unwrap();
        prop_assert_eq!(c.lhs, 0.0);
    }

    #[test]
    fn drawn_partitions_are_canonical(d in 2u32..6, r in 0u32..2, seed in any::<u64>(), z in any::<u32>()) {
        let n = 1u32 << r;
        prop_assume!(n < 1 << d);
        let big_n = 1u32 << d;
        let s: Vec<u32> = (0..n).map(|i| (z.wrapping_add(i * 7)) % big_n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = draw_hypothesis(&mut rng, d, n, &s).unwrap();
        let mut sorted = s.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() == s.len() {
            prop_assert!(p.has_block(&s));
            prop_assert!(s.iter().all(|&x| loss_eval(&p, x).unwrap() == parity(&sorted)));
        }
        let mut shuffled: Vec<Vec<u32>> = p.blocks().iter().rev().map(|b| b.iter().rev().copied().collect()).collect();
        shuffled.rotate_left(1);
        prop_assert_eq!(&Partition::new(d, shuffled).unwrap(), &p);
        let risk = rational_from_i64(p.odd_blocks() as i64, p.blocks().len() as i64);
        prop_assert_eq!(p.risk(), risk);
    }

    #[test]
    fn parity_formulas_match_brute_force(n0 in 0u32..9, n1 in 0u32..9, n in 1u32..5) {
        prop_assume!((n0 + n1) % n == 0 && n0 + n1 >= 2 * n);
        let e = ParityEnsemble::new(n0, n1, n).unwrap();
        let bf = brute_force_parity_dist(&e).unwrap();
        prop_assert_eq!(bf.marginal(&["Y1", "Y2"]).unwrap().prob(&[1, 1]).unwrap(), joint_parity_prob(&e).unwrap());
        let pm = marginal_parity_prob(&e).unwrap();
        prop_assert_eq!(bf.marginal_dist("Y1").unwrap().mass(1), pm.clone());
        // Exchangeability: every group has the same marginal.
        let last = format!("Y{}", e.k());
        prop_assert_eq!(bf.marginal_dist(&last).unwrap().mass(1), pm.clone());
        let cov = joint_parity_prob(&e).unwrap().value() - pm.value() * pm.value();
        prop_assert!(cov.abs() <= rational_from_i64(1, 4) || cov.is_zero());
    }
}
