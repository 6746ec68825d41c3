use std::collections::BTreeSet;

use flowmc::net::*;
use flowmc::sdn::{encode_network, parse_config, parse_topology, parse_update, EXAMPLE_CONFIG, EXAMPLE_TOPOLOGY, EXAMPLE_UPDATE};
use flowmc::testgen::{random_pnwt, PnwtShape};
use flowmc::trace::Trace;
use flowmc::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn t(name: &str) -> TransitionId {
    TransitionId::new(name)
}

fn m(places: &[&str]) -> Marking {
    Marking::new(places.iter().copied())
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn net(text: &str) -> PetriNetWithTransits {
    parse_net(text).unwrap()
}

fn example() -> PetriNetWithTransits {
    let top = parse_topology(EXAMPLE_TOPOLOGY).unwrap();
    let cfg = parse_config(EXAMPLE_CONFIG).unwrap();
    let upd = parse_update(EXAMPLE_UPDATE).unwrap();
    encode_network(&top, &cfg, Some(&upd)).unwrap()
}

const MOVE: &str = ".place p init\n.place q\n.transition t\n.flow t : p -> q\n.transit t : p -> q\n";

#[test]
fn enabledness_with_and_without_inhibitors() {
    let n = net(MOVE);
    assert!(enabled(&n, &m(&["p"]), &t("t")).unwrap());
    assert!(!enabled(&n, &m(&[]), &t("t")).unwrap());
    assert!(enabled(&n, &m(&[]), &t("nope")).is_err());
    let (_, inhib) = parse_pt_net(".place p init\n.place q init\n.transition t\n.flow t : p -> p\n.inhibitor t : q\n").unwrap();
    assert!(!enabled(&inhib, &m(&["p", "q"]), &t("t")).unwrap());
    assert!(enabled(&inhib, &m(&["p"]), &t("t")).unwrap());
}

#[test]
fn firing_moves_keeps_and_rejects() {
    let n = net(MOVE);
    assert_eq!(fire(&n, &m(&["p"]), &t("t")).unwrap(), m(&["q"]));
    assert!(matches!(fire(&n, &m(&["q"]), &t("t")), Err(Error::Firing { .. })));
    let keep = net(".place p init\n.transition t\n.flow t : p -> p\n");
    assert_eq!(fire(&keep, &m(&["p"]), &t("t")).unwrap(), m(&["p"]));
    let unsafe_net = net(".place p init\n.place q init\n.transition t\n.flow t : p -> p q\n");
    assert!(matches!(fire(&unsafe_net, &m(&["p", "q"]), &t("t")), Err(Error::Safety { .. })));
}

#[test]
fn motivating_example_update_moves_one_rule_token() {
    let n = example();
    let m0 = n.initial_marking();
    let m1 = fire(&n, &m0, &t("update.open")).unwrap();
    let m2 = fire(&n, &m1, &t("upd(v.fwd(x))")).unwrap();
    assert!(m1.contains("v.fwd(u)") && !m2.contains("v.fwd(u)") && m2.contains("v.fwd(x)"));
    let switches = |mk: &Marking| mk.iter().filter(|p| p.as_str().starts_with("sw_")).cloned().collect::<Vec<_>>();
    assert_eq!(switches(&m0), switches(&m2));
    let fired: BTreeSet<String> = successors(&n, &m0).unwrap().into_iter().map(|(t, _)| t.to_string()).collect();
    assert!(fired.contains("ingress_v") && fired.contains("fwd(v,u)") && fired.contains("update.open"));
    assert!(validate_safe(&n, 64).is_ok());
}

#[test]
fn successors_of_dead_markings_are_empty() {
    let n = net(MOVE);
    assert!(successors(&n, &m(&[])).unwrap().is_empty());
    assert!(successors(&n, &m(&["q"])).unwrap().is_empty());
}

#[test]
fn safety_validation() {
    let bad = net(".place p init\n.place q init\n.transition t\n.flow t : p -> p q\n");
    match validate_safe(&bad, 10) {
        Err(Error::Safety { place, witness }) => {
            assert_eq!(place, "q");
            assert_eq!(witness, vec!["t".to_string()]);
        }
        other => panic!("{other:?}"),
    }
    assert!(validate_safe(&net(".place p init\n"), 10).is_ok());
}

#[test]
fn builder_rejects_ill_typed_transits_and_bad_names() {
    let mut b = NetBuilder::new("x");
    b.place("p", true).unwrap().place("q", false).unwrap().transition("t", false).unwrap();
    b.flow("t", &["p"], &["q"]).unwrap();
    assert!(b.build().is_ok());
    let mut wrong_source = b.clone();
    wrong_source.transit("t", Some("q"), "q").unwrap();
    assert!(wrong_source.build().is_err(), "source outside the preset");
    let mut wrong_target = b.clone();
    wrong_target.transit("t", Some("p"), "p").unwrap();
    assert!(wrong_target.build().is_err(), "target outside the postset");
    assert!(b.transit("t", Some("nowhere"), "q").is_err());
    assert!(b.place("p", false).is_err());
    assert!(check_name("a b").is_err() && check_name("a:b").is_err() && check_name("").is_err());
}

#[test]
fn net_format_rejects_malformed_input() {
    assert!(parse_net(".place p\n.place p\n").is_err());
    assert!(parse_net(".transition t\n.flow t : p -> \n").is_err());
    assert!(parse_net(".place p\n.transition t\n.inhibitor t : p\n").is_err());
    assert!(parse_net(".place p init extra\n").is_err());
    let err = parse_net("# comment\n.place p\n.wat\n").unwrap_err();
    assert!(err.to_string().contains("3:"), "{err}");
}

#[test]
fn net_format_round_trips() {
    let n = example();
    assert_eq!(write_net(&parse_net(&write_net(&n)).unwrap()), write_net(&n));
}

#[test]
fn single_start_gives_one_finite_chain() {
    let n = net(".place q\n.transition t\n.flow t : -> q\n.transit t : > -> q\n");
    let seq = FiringSequence::from_transitions(&n, &["t"], None).unwrap();
    let chains = track_chains(&n, &seq);
    assert_eq!(chains.len(), 1);
    assert_eq!(chains[0].elements(), vec!["q"]);
    assert!(chains[0].finite_end());
    assert_eq!(trace_of_chain(&chains[0]), Trace::from_atoms(&[], &[&["q"]]));
}

#[test]
fn motivating_example_chain_and_its_trace() {
    let n = example();
    let seq = FiringSequence::from_transitions(&n, &["ingress_v", "fwd(v,u)"], None).unwrap();
    let chains = track_chains(&n, &seq);
    assert_eq!(chains.len(), 1);
    assert_eq!(chains[0].elements(), vec!["sw_v", "fwd(v,u)", "sw_u"]);
    assert_eq!(
        trace_of_chain(&chains[0]),
        Trace::from_atoms(&[&["sw_v", "fwd(v,u)"]], &[&["sw_u"]])
    );
    let again = FiringSequence::from_transitions(&n, &["ingress_v", "fwd(v,u)", "ingress_v"], None).unwrap();
    assert_eq!(track_chains(&n, &again).len(), 2);
}

#[test]
fn branching_transits_split_chains() {
    let n = net(
        ".place p init\n.place q1\n.place q2\n.transition s\n.flow s : p -> p\n.transit s : > -> p\n\
         .transition t\n.flow t : p -> q1 q2\n.transit t : p -> q1\n.transit t : p -> q2\n",
    );
    let seq = FiringSequence::from_transitions(&n, &["s", "t"], None).unwrap();
    let chains: Vec<Vec<String>> = track_chains(&n, &seq).iter().map(|c| c.elements()).collect();
    assert_eq!(chains, vec![vec!["p", "t", "q1"], vec!["p", "t", "q2"]]);
}

#[test]
fn consuming_without_transit_terminates_a_chain() {
    let n = net(".place p init\n.transition s\n.flow s : p -> p\n.transit s : > -> p\n.transition k\n.flow k : p ->\n");
    let seq = FiringSequence::from_transitions(&n, &["s", "k"], None).unwrap();
    let chains = track_chains(&n, &seq);
    assert_eq!(chains.len(), 1);
    assert_eq!(chains[0].end, ChainEnd::Terminated { step: 1 });
    assert_eq!(trace_of_chain(&chains[0]), Trace::from_atoms(&[], &[&["p"]]));
}

#[test]
fn looping_chain_is_periodic() {
    let n = net(
        ".place x init\n.place y\n.transition in\n.flow in : x -> x\n.transit in : > -> x\n\
         .transition t\n.flow t : x -> y\n.transit t : x -> y\n.transition u\n.flow u : y -> x\n.transit u : y -> x\n",
    );
    let seq = FiringSequence::from_transitions(&n, &["in", "t", "u"], Some(1)).unwrap();
    let chains = track_chains(&n, &seq);
    assert_eq!(chains.len(), 1);
    assert!(!chains[0].finite_end());
    let tr = trace_of_chain(&chains[0]);
    assert_eq!(tr.period, vec![set(&["x", "t"]), set(&["y", "u"])]);
}

#[test]
fn sequence_traces_stutter_or_loop() {
    let n = net(MOVE);
    let seq = FiringSequence::from_transitions(&n, &["t"], None).unwrap();
    assert_eq!(trace_of_sequence(&seq), Trace::from_atoms(&[&["p", "t"]], &[&["q"]]));
    let empty = FiringSequence::empty(n.initial_marking());
    assert_eq!(trace_of_sequence(&empty), Trace::from_atoms(&[], &[&["p"]]));
    let keep = net(".place p init\n.transition t\n.flow t : p -> p\n");
    let lasso = FiringSequence::from_transitions(&keep, &["t"], Some(0)).unwrap();
    assert_eq!(trace_of_sequence(&lasso), Trace::from_atoms(&[], &[&["p", "t"]]));
    assert!(FiringSequence::from_transitions(&n, &["t"], Some(0)).is_err(), "lasso must close");
}

#[test]
fn induced_run_is_forward_deterministic() {
    let n = example();
    let seq = FiringSequence::from_transitions(&n, &["ingress_v", "fwd(v,u)", "update.open"], None).unwrap();
    let run = InducedRun::from_sequence(&n, &seq).unwrap();
    assert!(run.consumers().iter().all(|&c| c <= 1));
}

fn random_case(seed: u64) -> (PetriNetWithTransits, FiringSequence) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = random_pnwt(&mut rng, PnwtShape::default());
    let mut m0 = n.initial_marking();
    let mut names = Vec::new();
    for k in 0..6 {
        let succ = successors(&n, &m0).unwrap();
        if succ.is_empty() {
            break;
        }
        let (t, next) = succ[(seed as usize + k) % succ.len()].clone();
        names.push(t.to_string());
        m0 = next;
    }
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    (n.clone(), FiringSequence::from_transitions(&n, &refs, None).unwrap())
}

proptest! {
    #[test]
    fn chains_replay_against_their_sequence(seed in 0u64..500) {
        let (n, seq) = random_case(seed);
        for c in track_chains(&n, &seq) {
            let start = n.transits(seq.steps[c.start_step].1.as_str());
            prop_assert!(start.contains(&(Source::Start, c.places[0].clone())));
            for (k, (t, g)) in c.moves.iter().enumerate() {
                prop_assert_eq!(&seq.steps[*g].1, t);
                prop_assert!(n.transits(t.as_str()).contains(&(Source::Place(c.places[k].clone()), c.places[k + 1].clone())));
            }
            if let ChainEnd::Open = c.end {
                let last = c.places.last().unwrap();
                let after = c.moves.last().map_or(c.start_step + 1, |m| m.1 + 1);
                for (_, t) in &seq.steps[after..] {
                    prop_assert!(!n.preset(t.as_str()).contains(last));
                }
            }
        }
    }

    #[test]
    fn sequence_traces_carry_one_transition_per_step(seed in 0u64..500) {
        let (n, seq) = random_case(seed);
        let tr = trace_of_sequence(&seq);
        let transitions: BTreeSet<String> = n.transitions().iter().map(|t| t.to_string()).collect();
        for (i, pos) in tr.prefix.iter().enumerate() {
            prop_assert_eq!(pos.intersection(&transitions).count(), 1, "position {}", i);
        }
        prop_assert!(tr.period.iter().all(|p| p.is_disjoint(&transitions)));
        prop_assert_eq!(track_chains(&n, &seq), track_chains(&n, &seq));
    }
}
