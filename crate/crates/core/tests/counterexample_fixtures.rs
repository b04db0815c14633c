use genbound::bounds::{all_bounds, default_sigma, g2_pairwise, xu_raginsky, Analysis};
use genbound::counterexample::{counterexample_setting, verify_properties, CEParams, Mode, PartitionSpace};
use genbound::probcore::rational::rational_from_i64;
use genbound::setting::LearningSetting;
use genbound::Limits;

fn setting(d: u32) -> LearningSetting {
    counterexample_setting(&PartitionSpace::new(d, 2, &Limits::default()).unwrap()).unwrap()
}

fn close(a: f64, b: f64) {
    assert!((a - b).abs() < 1e-12, "{a} vs {b}");
}

#[test]
fn d3_gap_law() {
    let s = setting(3);
    let a = Analysis::new(&s, &Limits::default()).unwrap();
    let st = &a.stats;
    let r = rational_from_i64;
    assert_eq!(st.expected_gap, r(0, 1));
    assert_eq!(st.expected_gap_via_risks, r(0, 1));
    assert_eq!(st.expected_squared_gap, r(6, 35));
    assert_eq!(st.moment(3), Some(&r(0, 1)));
    assert_eq!(st.moment(4), Some(&r(3, 70)));
    assert_eq!(st.moment(5), Some(&r(0, 1)));
    assert_eq!(st.moment(6), Some(&r(3, 280)));
    let quarter = st.tails.iter().find(|t| t.threshold == r(1, 4)).unwrap();
    assert_eq!(*quarter.one_sided.value(), r(12, 35));
    assert_eq!(*quarter.absolute.value(), r(24, 35));
    assert_eq!(st.per_sample_mi, vec![0.0, 0.0]);
    assert!(!st.gap_is_constant);
}

#[test]
fn d3_information() {
    let s = setting(3);
    let a = Analysis::new(&s, &Limits::default()).unwrap();
    close(a.subset_mi(&[0, 1]).unwrap(), 7.0 / 8.0 * 7f64.ln());
    let g2 = g2_pairwise(&a).unwrap();
    close(g2.rhs, 1.4226785411028664);
    close(g2.rhs, 0.5 + (2.0 * a.subset_mi(&[0, 1]).unwrap()).sqrt() / 2.0);
    assert!(g2.holds);
    assert!(all_bounds(&a, &default_sigma()).unwrap().iter().all(|b| b.holds));
}

#[test]
fn d2_information() {
    let s = setting(2);
    let a = Analysis::new(&s, &Limits::default()).unwrap();
    let i = a.subset_mi(&[0, 1]).unwrap();
    close(i, 0.75 * 3f64.ln());
    let xu = xu_raginsky(&a, &default_sigma()).unwrap();
    close(xu.rhs, (i / 4.0).sqrt());
    assert_eq!(xu.lhs, 0.0);
    assert_eq!(a.stats.expected_squared_gap, rational_from_i64(0, 1));
}

#[test]
fn exact_reports() {
    for d in [2, 3] {
        let r = verify_properties(&CEParams::new(1, d, Mode::Exact), &Limits::default()).unwrap();
        assert!(r.ok, "d = {d}");
        assert_eq!(r.asserted, vec!["a", "b", "c"]);
        assert!(r.prop_b.as_ref().unwrap().independent);
    }
}

#[test]
fn monte_carlo_report_d4() {
    let mut p = CEParams::new(1, 4, Mode::MonteCarlo);
    p.seed = 9;
    p.trials = 20_000;
    let r = verify_properties(&p, &Limits::default()).unwrap();
    assert!(r.ok);
    assert_eq!(r.prop_d.nonbinary_empirical, 0);
    // Exact values from a combinatorial count over matchings.
    let band = r.prop_d.risk_in_band;
    assert!((band.value - 6272.0 / 6435.0).abs() < 4.0 * band.stderr, "{band:?}");
    let one = r.prop_d.one_sided;
    assert!((one.value - 2968.0 / 6435.0).abs() < 4.0 * one.stderr, "{one:?}");
    assert!(!r.prop_d.one_sided_clears_half);
}
