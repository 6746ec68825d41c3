use std::collections::{BTreeSet, VecDeque};

use flowmc::ltl::{parse_flow_ltl, parse_ltl, FlowLtlFormula};
use flowmc::mc::{check_flow_ltl, Engine, FlowVerdict};
use flowmc::net::{successors, Marking, PetriNetWithTransits, Source};
use flowmc::sdn::*;

fn example() -> (Topology, Config) {
    (
        parse_topology(EXAMPLE_TOPOLOGY).unwrap(),
        parse_config(EXAMPLE_CONFIG).unwrap(),
    )
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn reachable(net: &PetriNetWithTransits) -> Vec<Marking> {
    let mut seen = BTreeSet::from([net.initial_marking()]);
    let mut queue = VecDeque::from([net.initial_marking()]);
    while let Some(m) = queue.pop_front() {
        for (_, next) in successors(net, &m).unwrap() {
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    seen.into_iter().collect()
}

#[test]
fn two_switch_data_plane_sizes() {
    let top = parse_topology("switches = {a, b}; connections = {a - b};").unwrap();
    let cfg = parse_config("ingress = {a}; a.fwd(b); egress = {b};").unwrap();
    let net = encode_data_plane(&top, &cfg).unwrap();
    assert_eq!(net.places().len(), 4);
    assert_eq!(net.transitions().len(), 3);
    let init = net.initial_marking();
    assert!(init.contains("sw_a") && init.contains("sw_b") && init.contains("a.fwd(b)"));
    assert!(!init.contains("b.fwd(a)"));
}

#[test]
fn motivating_example_sizes() {
    let (top, cfg) = example();
    let data = encode_data_plane(&top, &cfg).unwrap();
    assert_eq!((data.places().len(), data.transitions().len()), (17, 13));
    let upd = parse_update(EXAMPLE_UPDATE).unwrap();
    let full = encode_network(&top, &cfg, Some(&upd)).unwrap();
    assert_eq!((full.places().len(), full.transitions().len()), (27, 21));
    assert!(full.initial_marking().contains("update_start"));
}

#[test]
fn forwarding_transits_move_and_keep_flows() {
    let (top, cfg) = example();
    let net = encode_data_plane(&top, &cfg).unwrap();
    let mut got = net.transits("fwd(x,y)");
    got.sort();
    let mut want = vec![
        (Source::Place("sw_x".into()), "sw_y".into()),
        (Source::Place("sw_y".into()), "sw_y".into()),
    ];
    want.sort();
    assert_eq!(got, want);
    assert_eq!(net.preset("fwd(x,y)"), net.postset("fwd(x,y)"));
    let ingress = net.transits("ingress_v");
    assert!(ingress.contains(&(Source::Start, "sw_v".into())));
    assert!(ingress.contains(&(Source::Place("sw_v".into()), "sw_v".into())));
    assert_eq!(net.start_count(), 1);
    assert_eq!(net.weak_fair().len(), net.transitions().len());
}

#[test]
fn update_of_unconfigured_switch_only_adds_a_rule() {
    let (top, cfg) = example();
    let upd = parse_update("upd(d.fwd(y))").unwrap();
    let net = encode_network(&top, &cfg, Some(&upd)).unwrap();
    let t = "upd(d.fwd(y))";
    let pre: Vec<String> = net.preset(t).iter().map(|p| p.to_string()).collect();
    assert_eq!(pre, vec!["update_start".to_string()]);
    assert!(net.postset(t).contains("d.fwd(y)"));
    assert!(net.postset(t).contains("update_finish"));
}

#[test]
fn update_of_configured_switch_swaps_rules() {
    let (top, cfg) = example();
    let upd = parse_update("upd(x.fwd(y))").unwrap();
    let net = encode_network(&top, &cfg, Some(&upd)).unwrap();
    let t = "upd(x.fwd(y))";
    assert!(net.preset(t).contains("x.fwd(d)"));
    assert!(!net.postset(t).contains("x.fwd(d)"));
    assert!(net.postset(t).contains("x.fwd(y)"));
}

#[test]
fn parallel_update_has_at_most_two_control_tokens() {
    let (_, cfg) = example();
    let upd = parse_update("upd(v.fwd(x)) || upd(y.fwd(d))").unwrap();
    let ctl = encode_control_plane(&upd, &cfg).unwrap();
    let control = |p: &str| p.ends_with("_start") || p.ends_with("_finish");
    let peak = reachable(&ctl)
        .iter()
        .map(|m| m.iter().filter(|p| control(p.as_str())).count())
        .max()
        .unwrap();
    assert_eq!(peak, 2);
    let finals: Vec<Marking> = reachable(&ctl)
        .into_iter()
        .filter(|m| m.contains("update_finish"))
        .collect();
    assert_eq!(finals.len(), 1);
    assert!(finals[0].contains("v.fwd(x)") && finals[0].contains("y.fwd(d)"));
    assert!(!finals[0].contains("v.fwd(u)") && !finals[0].contains("y.fwd(x)"));
}

#[test]
fn sequential_update_orders_switch_updates() {
    let (_, cfg) = example();
    let upd = parse_update("upd(y.fwd(d)) >> upd(x.fwd(y))").unwrap();
    let ctl = encode_control_plane(&upd, &cfg).unwrap();
    for m in reachable(&ctl) {
        if m.contains("x.fwd(y)") {
            assert!(m.contains("y.fwd(d)"), "x rerouted before y in {m}");
        }
    }
}

#[test]
fn rejects_invalid_inputs() {
    assert!(parse_topology("switches = {a, b}; connections = {};").is_err());
    assert!(parse_topology("switches = {a, b, c}; connections = {a - b};").is_err());
    assert!(parse_topology("switches = {a}; connections = {a - z};").is_err());
    assert!(parse_config("ingress = {a}; a.fwd(b); a.fwd(c); egress = {b};").is_err());
    assert!(parse_config("ingress = {a}; egress = {a};").is_err());
    assert!(parse_update("upd(a.fwd(b)) >> upd(a.fwd(c))").is_err());
    assert!(parse_update("upd(a.fwd(b)) >> upd(c.fwd(d)) || upd(e.fwd(f))").is_err());
    let (top, cfg) = example();
    let far = parse_update("upd(v.fwd(d))").unwrap();
    assert!(encode_network(&top, &cfg, Some(&far)).is_err());
    let bad = parse_config("ingress = {v}; v.fwd(d); egress = {d};").unwrap();
    assert!(encode_data_plane(&top, &bad).is_err());
}

#[test]
fn syntax_errors_carry_positions() {
    let err = parse_topology("switches = {a, b};\nconnections = {a -- b};").unwrap_err();
    assert!(err.to_string().contains("2:"), "{err}");
}

#[test]
fn inputs_round_trip_through_display() {
    let (top, cfg) = example();
    assert_eq!(parse_topology(&top.to_string()).unwrap(), top);
    assert_eq!(parse_config(&cfg.to_string()).unwrap(), cfg);
    for text in [EXAMPLE_UPDATE, EXAMPLE_UPDATE_WRONG_ORDER, "upd(x.fwd(y))"] {
        let u = parse_update(text).unwrap();
        assert_eq!(parse_update(&u.to_string()).unwrap(), u);
    }
}

#[test]
fn requirement_formulas_round_trip() {
    let (top, cfg) = example();
    let fwd = forwarding_transitions(&top, &cfg);
    let specs = vec![
        spec_connectivity(&cfg.egress),
        spec_loop_freedom(&top.switches, &cfg.egress),
        spec_drop_freedom(&cfg.egress, &fwd).unwrap(),
        spec_packet_coherence(&set(&["v", "u", "x", "d"]), &set(&["v", "x", "y", "d"])),
    ];
    for phi in specs {
        assert_eq!(parse_flow_ltl(&phi.to_string()).unwrap(), phi);
    }
    assert_eq!(spec_connectivity(&cfg.egress), parse_flow_ltl("A F sw_d").unwrap());
    assert!(spec_drop_freedom(&cfg.egress, &BTreeSet::new()).is_err());
}

#[test]
fn fairness_assumption_of_a_single_transition() {
    let top = parse_topology("switches = {a, b}; connections = {a - b};").unwrap();
    let cfg = parse_config("ingress = {a}; a.fwd(b); egress = {b};").unwrap();
    let net = encode_data_plane(&top, &cfg).unwrap();
    let weak = run_assumptions(&net, Assumption::WeakFair);
    let want = parse_ltl(
        "(F G sw_a -> G F ingress_a) && (F G (sw_a && sw_b && \"a.fwd(b)\") -> G F \"fwd(a,b)\") \
         && (F G (sw_a && sw_b && \"b.fwd(a)\") -> G F \"fwd(b,a)\")",
    )
    .unwrap();
    assert_eq!(weak.atoms(), want.atoms());
    let strong = run_assumptions(&net, Assumption::StrongFair);
    assert_ne!(weak, strong);
    let inter = run_assumptions(&net, Assumption::InterleavingMax);
    assert!(inter.atoms().contains("fwd(b,a)"));
    let conc = run_assumptions(&net, Assumption::ConcurrencyMax);
    assert!(conc.atoms().contains("ingress_a"));
}

#[test]
fn two_switch_network_is_connected_under_fairness() {
    let top = parse_topology("switches = {a, b}; connections = {a - b};").unwrap();
    let cfg = parse_config("ingress = {a}; a.fwd(b); egress = {b};").unwrap();
    let net = encode_network(&top, &cfg, None).unwrap();
    let spec = spec_connectivity(&cfg.egress);
    let fair = verification_query(&net, Assumption::WeakFair, spec.clone());
    assert_eq!(check_flow_ltl(&net, &fair, Engine::default()).unwrap(), FlowVerdict::Verified);
    assert!(matches!(
        check_flow_ltl(&net, &spec, Engine::default()).unwrap(),
        FlowVerdict::Counterexample(_)
    ));
}

fn example_verdict(update: &str, spec: impl Fn(&Topology, &Config) -> FlowLtlFormula) -> FlowVerdict {
    let (top, cfg) = example();
    let upd = parse_update(update).unwrap();
    let net = encode_network(&top, &cfg, Some(&upd)).unwrap();
    let phi = verification_query(&net, Assumption::WeakFair, spec(&top, &cfg));
    check_flow_ltl(&net, &phi, Engine::default()).unwrap()
}

fn connectivity(_: &Topology, cfg: &Config) -> FlowLtlFormula {
    spec_connectivity(&cfg.egress)
}

fn loop_freedom(top: &Topology, cfg: &Config) -> FlowLtlFormula {
    spec_loop_freedom(&top.switches, &cfg.egress)
}

#[test]
fn motivating_example_correct_update_is_verified() {
    assert_eq!(example_verdict(EXAMPLE_UPDATE, connectivity), FlowVerdict::Verified);
    assert_eq!(example_verdict(EXAMPLE_UPDATE, loop_freedom), FlowVerdict::Verified);
}

#[test]
fn motivating_example_wrong_order_loops_between_x_and_y() {
    match example_verdict(EXAMPLE_UPDATE_WRONG_ORDER, loop_freedom) {
        FlowVerdict::Counterexample(c) => {
            assert!(c.oracle_confirmed, "{c}");
            let chain = c.chains[0].as_ref().expect("a chain was tracked");
            let elems = chain.elements();
            let pos = |s: &str| elems.iter().position(|e| e == s);
            let (x, y) = (pos("sw_x").expect("visits x"), pos("sw_y").expect("visits y"));
            assert!(
                elems[x.max(y)..].iter().any(|e| e == if x < y { "sw_x" } else { "sw_y" }),
                "no return between x and y\n{c}"
            );
        }
        v => panic!("expected a counterexample, got {v:?}"),
    }
}

#[test]
fn motivating_example_wrong_order_still_reaches_egress_under_fairness() {
    assert_eq!(example_verdict(EXAMPLE_UPDATE_WRONG_ORDER, connectivity), FlowVerdict::Verified);
}
