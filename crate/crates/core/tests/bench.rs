use flowmc::bench::*;
use flowmc::mc::{check_flow_ltl, Engine, FlowVerdict};
use flowmc::net::{validate_safe, write_net};
use flowmc::transform::{audit, expected_sizes, transform_net};

fn size(inst: &BenchmarkInstance) -> (usize, usize) {
    (inst.net.places().len(), inst.net.transitions().len())
}

fn rp(n1: usize, n2: usize, v: &str) -> BenchmarkInstance {
    gen_rp(n1, n2, v.parse().unwrap()).unwrap()
}

#[test]
fn generator_sizes_match_the_published_counts() {
    assert_eq!(size(&gen_sf(3, 0).unwrap()), (4, 5));
    assert_eq!(size(&gen_sf(9, 0).unwrap()), (10, 11));
    assert_eq!(size(&rp(1, 1, "B")), (4, 5));
    assert_eq!(size(&rp(4, 4, "B")), (10, 11));
    assert_eq!(size(&rp(1, 1, "U")), (6, 9));
    assert_eq!(size(&rp(5, 4, "U")), (13, 16));
    assert_eq!(size(&rp(1, 1, "M")), (9, 11));
    assert_eq!(size(&rp(4, 3, "M")), (14, 16));
}

#[test]
fn generator_size_contracts_hold_over_ranges() {
    for n in 2..=10 {
        for seed in 0..3 {
            assert_eq!(size(&gen_sf(n, seed).unwrap()), (n + 1, n + 2));
        }
    }
    for n1 in 1..=4 {
        for n2 in 1..=4 {
            let base = (n1 + n2 + 2, n1 + n2 + 3);
            assert_eq!(size(&rp(n1, n2, "B")), base);
            assert_eq!(size(&rp(n1, n2, "U")), (base.0 + 2, base.1 + 4));
            assert_eq!(size(&rp(n1, n2, "M")), (base.0 + 5, base.1 + 6));
            assert_eq!(size(&rp(n1, n2, "C")), size(&rp(n1, n2, "M")));
        }
    }
}

#[test]
fn generated_instances_are_safe_and_transform_cleanly() {
    let mut all = Vec::new();
    for n in 2..=6 {
        all.push(gen_sf(n, n as u64).unwrap());
    }
    for v in ["B", "U", "M", "C"] {
        all.push(rp(2, 3, v));
    }
    for k in 3..=6 {
        for seed in 0..3 {
            all.push(gen_ru(k, seed, RuVariant::Egress).unwrap());
            all.push(gen_ru(k, seed, RuVariant::Other).unwrap());
        }
    }
    for inst in &all {
        validate_safe(&inst.net, 64).unwrap_or_else(|e| panic!("{}: {e}", inst.name));
        let n = inst.formula.flow_subformulas().len();
        let tnet = transform_net(&inst.net, n).unwrap();
        assert_eq!((tnet.place_count(), tnet.transition_count()), expected_sizes(&inst.net, n), "{}", inst.name);
        assert!(audit(&inst.net, &tnet).iter().all(|c| c.ok()), "{}", inst.name);
    }
}

#[test]
fn rejects_bad_parameters() {
    assert!(gen_sf(1, 0).is_err());
    assert!(gen_rp(0, 2, RpVersion::Base).is_err());
    assert!("X".parse::<RpVersion>().is_err());
    assert!(gen_ru(2, 0, RuVariant::Egress).is_err());
    assert!("Q".parse::<RuVariant>().is_err());
}

#[test]
fn same_seed_gives_identical_instances() {
    for seed in [0, 7, 42] {
        let a = write_instance(&gen_ru(6, seed, RuVariant::Other).unwrap());
        let b = write_instance(&gen_ru(6, seed, RuVariant::Other).unwrap());
        assert_eq!(a, b);
        assert_eq!(write_instance(&gen_sf(6, seed).unwrap()), write_instance(&gen_sf(6, seed).unwrap()));
    }
    let spread: std::collections::BTreeSet<String> =
        (0..8).map(|s| write_net(&gen_sf(6, s).unwrap().net)).collect();
    assert!(spread.len() > 1, "the failing switch never varies");
}

#[test]
fn instance_text_round_trips() {
    let inst = rp(1, 2, "C");
    let (net, phi, expected) = parse_instance(&write_instance(&inst)).unwrap();
    assert_eq!(write_net(&net), write_net(&inst.net));
    assert_eq!(phi.unwrap(), inst.formula);
    assert_eq!(expected, Some(true));
    let (_, phi, expected) = parse_instance(&write_net(&inst.net)).unwrap();
    assert!(phi.is_none() && expected.is_none());
    assert!(parse_instance(".place a\n.frobnicate\n").is_err());
}

fn verdict(inst: &BenchmarkInstance) -> FlowVerdict {
    check_flow_ltl(&inst.net, &inst.formula, Engine::default()).unwrap()
}

#[test]
fn fixture_verdicts_match_the_published_results() {
    for inst in [gen_sf(3, 1).unwrap(), gen_sf(4, 2).unwrap(), rp(1, 1, "B"), rp(1, 1, "U"), rp(1, 1, "M"), rp(1, 1, "C")] {
        let v = verdict(&inst);
        let want = inst.expected_verdict.unwrap();
        match v {
            FlowVerdict::Verified => assert!(want, "{} verified", inst.name),
            FlowVerdict::Counterexample(c) => {
                assert!(!want, "{} refuted:\n{c}", inst.name);
                assert!(c.oracle_confirmed, "{}", inst.name);
            }
            FlowVerdict::Inconclusive(why) => panic!("{}: {why}", inst.name),
        }
    }
}

#[test]
fn routing_update_verdicts() {
    for seed in 0..3 {
        let f = gen_ru(4, seed, RuVariant::Other).unwrap();
        assert!(matches!(verdict(&f), FlowVerdict::Counterexample(_)), "{}", f.name);
        let t = gen_ru(4, seed, RuVariant::Egress).unwrap();
        assert_eq!(verdict(&t), FlowVerdict::Verified, "{}", t.name);
    }
}

#[test]
fn bounded_engine_refutes_the_update_pipeline() {
    let v = check_flow_ltl(&rp(1, 1, "U").net, &rp(1, 1, "U").formula, Engine::Bmc { bound: 30 }).unwrap();
    assert!(matches!(v, FlowVerdict::Counterexample(_)), "{v:?}");
}

#[test]
fn report_rows_are_sorted_and_stable() {
    let insts = vec![rp(1, 1, "B"), gen_sf(3, 5).unwrap()];
    let a = run_report(&insts, Engine::default()).unwrap();
    let b = run_report(&insts, Engine::default()).unwrap();
    assert_eq!(a.iter().map(|r| r.benchmark.as_str()).collect::<Vec<_>>(), vec!["RP", "SF"]);
    assert_eq!(
        a.iter().map(ReportRow::stable_fields).collect::<Vec<_>>(),
        b.iter().map(ReportRow::stable_fields).collect::<Vec<_>>()
    );
    let row = &a[1];
    assert_eq!((row.places, row.transitions), (4, 5));
    assert_eq!(row.latches, row.transformed_places + 2);
    assert_eq!(row.verdict, "✓");
    assert_eq!(row.to_tsv().split('\t').count(), ReportRow::HEADER.len());
}
