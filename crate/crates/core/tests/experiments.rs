use tracelab::experiments::{self, build_trace, domain_field, parse_elems, Experiment, ExperimentConfig};
use tracelab::experiments::partial_interval_shift_counts;
use tracelab::ff::Elem;

fn run(exp: Experiment, cfg: &ExperimentConfig) -> experiments::Report {
    experiments::run(exp, cfg).unwrap()
}

#[test]
fn shift_subsets_of_one_point_match_equidistribution() {
    let cfg = ExperimentConfig { p: 1009, set: Some("0".into()), ..Default::default() };
    let a = run(Experiment::ShiftSubsets, &cfg);
    let b = run(Experiment::EquidistShift, &cfg);
    assert_eq!(a.table("density").unwrap().rows, b.table("density").unwrap().rows);
    assert_eq!(a.summary.max_deviation, b.summary.max_deviation);
}

#[test]
fn partial_interval_shifts_match_a_direct_loop() {
    let cfg = ExperimentConfig { p: 5, e: 2, kind: "kloosterman".into(), d: Some(20), ell: 3, ..Default::default() };
    let t = build_trace(&cfg).unwrap();
    let d = t.domain();
    let r = t.context().field();
    let counts = partial_interval_shift_counts(&t, &[vec![1]]).unwrap();

    let mut expect = vec![0u64; r.size()];
    for x2 in 0..5u64 {
        for k in 1..=5u64 {
            let mut s = Elem::ZERO;
            for j in 1..=k {
                let z = d.from_coeffs(&[j % 5, (1 + x2) % 5]).unwrap();
                s = r.add(s, t.value(z));
            }
            expect[s.index()] += 1;
        }
    }
    assert_eq!(counts, expect);
    assert_eq!(counts.iter().sum::<u64>(), 25);
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let base = ExperimentConfig {
        p: 13,
        e: 2,
        kind: "kloosterman".into(),
        d: Some(13),
        normalized: true,
        ..Default::default()
    };
    let one = run(Experiment::EquidistShift, &ExperimentConfig { workers: Some(1), ..base.clone() });
    let two = run(Experiment::EquidistShift, &ExperimentConfig { workers: Some(2), ..base });
    assert_eq!(one.to_json().unwrap(), two.to_json().unwrap());
}

#[test]
fn echo_round_trips() {
    let cfg = ExperimentConfig { p: 101, f: Some("-1;0;1".into()), sizes: Some("1;2".into()), ..Default::default() };
    let (exp, back) = ExperimentConfig::from_echo(&cfg.echo(Experiment::Variance)).unwrap();
    assert_eq!(exp, Experiment::Variance);
    assert_eq!(back, cfg);
}

#[test]
fn legendre_variance_is_of_order_one_over_set_size() {
    let cfg = ExperimentConfig { set: Some("0;1;2;3;4".into()), shifts: Some("0;1;2".into()), ..Default::default() };
    let report = run(Experiment::Variance, &cfg);
    assert!(report.exact_checks_pass());
    assert_eq!(report.value("variance_numerator").unwrap(), "82380");
    assert_eq!(report.value("variance_denominator").unwrap(), "270189");
    let scaled = report.value("normalized_variance").unwrap().as_f64().unwrap();
    assert!((0.5..=2.0).contains(&scaled), "V |I| = {scaled}");
}

#[test]
fn order_five_character_has_vanishing_full_sum() {
    let cfg = ExperimentConfig { p: 10061, order: 5, ell: 11, ..Default::default() };
    let report = run(Experiment::PartialIntervals, &cfg);
    assert_eq!(report.value("full_sum").unwrap(), "0");
    let bound = report.bound("partial_intervals").unwrap();
    assert_eq!(bound.terms.len(), 3);
    assert_eq!(bound.terms[2], 0.0);
}

#[test]
fn partial_intervals_reject_quadratic_numerators() {
    let cfg = ExperimentConfig { p: 1009, f: Some("-1;0;1".into()), ..Default::default() };
    let err = experiments::run(Experiment::PartialIntervals, &cfg).unwrap_err();
    assert!(err.to_string().contains("deg"), "{err}");
}

#[test]
fn invalid_families_are_rejected() {
    let bad = [
        ExperimentConfig { family: Some("spheres".into()), ..Default::default() },
        ExperimentConfig { family: Some("intervals".into()), sizes: Some("".into()), ..Default::default() },
        ExperimentConfig { family: Some("intervals".into()), sizes: Some("0".into()), ..Default::default() },
        ExperimentConfig { shifts: Some("".into()), ..Default::default() },
    ];
    for cfg in bad {
        assert!(experiments::run(Experiment::Variance, &cfg).is_err(), "{cfg:?}");
    }
}

#[test]
fn out_of_range_parameters_are_rejected() {
    for cfg in [
        ExperimentConfig { epsilon: 0.5, ..Default::default() },
        ExperimentConfig { delta: 0.0, ..Default::default() },
        ExperimentConfig { steps: 0, ..Default::default() },
        ExperimentConfig { workers: Some(0), ..Default::default() },
        ExperimentConfig { kind: "bessel".into(), ..Default::default() },
    ] {
        assert!(experiments::run(Experiment::EquidistShift, &cfg).is_err(), "{cfg:?}");
    }
}

#[test]
fn partial_intervals_need_a_prime_field() {
    let cfg = ExperimentConfig { p: 7, e: 2, ..Default::default() };
    assert!(experiments::run(Experiment::PartialIntervals, &cfg).is_err());
}

#[test]
fn elements_parse_in_coordinate_form() {
    let cfg = ExperimentConfig { p: 7, e: 2, ..Default::default() };
    let f = domain_field(&cfg).unwrap();
    let xs = parse_elems(&f, "1,0; 0,1;3").unwrap();
    assert_eq!(xs, vec![Elem(1), Elem(7), Elem(3)]);
    assert!(parse_elems(&f, ";").is_err());
}

#[test]
fn model_law_is_exact_for_sl2() {
    let cfg = ExperimentConfig { kind: "SL".into(), steps: 2, trials: Some(2000), ..Default::default() };
    let report = run(Experiment::Model, &cfg);
    assert!(report.exact_checks_pass());
    assert_eq!(report.value("max_diff_enumerated").unwrap().as_f64(), Some(0.0));
}

#[test]
fn gauss_sums_agree_for_small_groups() {
    for kind in ["GL", "SL", "Sp", "mu"] {
        let cfg = ExperimentConfig { kind: kind.into(), n: 2, ell: 5, ..Default::default() };
        let report = run(Experiment::GaussSum, &cfg);
        assert!(report.exact_checks_pass(), "{kind}");
    }
}
