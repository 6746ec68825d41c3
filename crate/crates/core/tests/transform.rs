use std::collections::{BTreeSet, VecDeque};

use flowmc::ltl::{parse_flow_ltl, parse_ltl, FlowLtlFormula, LtlFormula};
use flowmc::net::{
    parse_net, successors, track_chains, FiringSequence, Marking, NetStructure, PetriNetWithTransits, TransitionId,
};
use flowmc::testgen::{random_flow_ltl, random_ltl, random_pnwt, PnwtShape};
use flowmc::transform::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn names<I: IntoIterator<Item = S>, S: ToString>(items: I) -> BTreeSet<String> {
    items.into_iter().map(|s| s.to_string()).collect()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// One marked place p and a transition t with pre = post = {p}, transits (p, p) and (▷, p).
fn single() -> PetriNetWithTransits {
    parse_net(".place p init\n.transition t\n.flow t : p -> p\n.transit t : p -> p\n.transit t : > -> p\n").unwrap()
}

fn pipe() -> PetriNetWithTransits {
    parse_net(
        ".place a init\n.place b init\n.place d init\n\
         .transition in\n.flow in : a -> a\n.transit in : > -> a\n.transit in : a -> a\n\
         .transition ab\n.flow ab : a b -> a b\n.transit ab : a -> b\n.transit ab : b -> b\n\
         .transition bd\n.flow bd : b d -> b d\n.transit bd : b -> d\n.transit bd : d -> d\n",
    )
    .unwrap()
}

fn reachable(net: &InhibitorNet) -> Vec<Marking> {
    let m0 = net.pt().initial_marking();
    let mut seen = BTreeSet::from([m0.clone()]);
    let mut queue = VecDeque::from([m0]);
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
fn single_place_net_elements() {
    let tnet = transform_net(&single(), 1).unwrap();
    let pt = tnet.pt();
    assert_eq!(names(pt.places()), set(&["p", "act@o", "[p]#1", "init#1", "act@t#1"]));
    assert_eq!(names(pt.transitions()), set(&["t", "t@(>,p)#1", "t@(p,p)#1", "t@skip#1"]));
    assert_eq!(names(pt.initial_marking().iter()), set(&["p", "act@o", "init#1"]));
    let skip = pt.transition_index("t@skip#1").unwrap();
    assert_eq!(pt.inhibitors(skip).iter().map(|&p| pt.places()[p].to_string()).collect::<Vec<_>>(), vec!["[p]#1"]);
    assert_eq!(tnet.lambda("t@(p,p)#1"), Some("t"));
    assert_eq!(tnet.lambda("[p]#1"), Some("p"));
    assert_eq!(tnet.lambda("init#1"), None);
}

#[test]
fn closed_form_sizes() {
    let two = parse_net(".place p init\n.place q\n.transition t\n.flow t : p -> q\n.transit t : > -> q\n.transit t : p -> q\n").unwrap();
    assert_eq!(expected_sizes(&two, 1), (7, 4));
    assert_eq!(expected_sizes(&two, 0), (3, 1));
    for net in [single(), pipe(), two] {
        for n in 0..=3 {
            let tnet = transform_net(&net, n).unwrap();
            assert_eq!((tnet.place_count(), tnet.transition_count()), expected_sizes(&net, n), "n = {n}");
        }
    }
}

#[test]
fn zero_subnets_keep_the_activation_token_in_the_original_part() {
    let tnet = transform_net(&pipe(), 0).unwrap();
    let pt = tnet.pt();
    let act = pt.place_index("act@o").unwrap();
    for t in 0..pt.transitions().len() {
        assert!(pt.pre(t).contains(&act) && pt.post(t).contains(&act));
    }
    assert!(audit(&pipe(), &tnet).iter().all(|c| c.ok()));
}

#[test]
fn audit_passes_and_detects_tampering() {
    let net = pipe();
    let tnet = transform_net(&net, 2).unwrap();
    let checks = audit(&net, &tnet);
    assert!(checks.len() >= 11);
    assert!(checks.iter().all(|c| c.ok()), "{checks:?}");
    let other = transform_net(&single(), 2).unwrap();
    assert!(audit(&net, &other).iter().any(|c| !c.ok()));
}

#[test]
fn name_collisions_are_rejected() {
    let clash = parse_net(".place act@o init\n.transition t\n.flow t : act@o -> act@o\n").unwrap();
    assert!(transform_net(&clash, 1).is_err());
    let bad = parse_net(".place p init\n.place q init\n.transition t\n.flow t : p -> p q\n").unwrap();
    assert!(transform_net(&bad, 1).is_err(), "unsafe input");
}

#[test]
fn reachable_markings_keep_the_token_invariants() {
    let net = pipe();
    let tnet = transform_net(&net, 2).unwrap();
    let pt = tnet.pt();
    let activation: Vec<String> = pt
        .places()
        .iter()
        .map(|p| p.to_string())
        .filter(|p| p == "act@o" || p.starts_with("act@"))
        .collect();
    for m in reachable(&tnet) {
        assert_eq!(activation.iter().filter(|p| m.contains(p)).count(), 1, "{m}");
        for i in 1..=2 {
            let own = m
                .iter()
                .filter(|p| p.as_str() == format!("init#{i}") || (p.as_str().starts_with('[') && p.as_str().ends_with(&format!("#{i}"))))
                .count();
            assert_eq!(own, 1, "subnet {i} in {m}");
        }
    }
}

#[test]
fn lifting_examples() {
    let net = pipe();
    let tnet = transform_net(&net, 1).unwrap();
    let empty = FiringSequence::empty(net.initial_marking());
    assert!(lift_counterexample(&net, &tnet, &empty, &[None]).unwrap().is_empty());
    let one = FiringSequence::from_transitions(&net, &["ab"], None).unwrap();
    let lifted = lift_counterexample(&net, &tnet, &one, &[None]).unwrap();
    assert_eq!(lifted.transitions(), vec![TransitionId::new("ab"), TransitionId::new("ab@skip#1")]);
    let seq = FiringSequence::from_transitions(&net, &["in", "ab"], None).unwrap();
    let chain = track_chains(&net, &seq).into_iter().next().unwrap();
    let lifted = lift_counterexample(&net, &tnet, &seq, &[Some(chain.clone())]).unwrap();
    let names: Vec<String> = lifted.transitions().iter().map(|t| t.to_string()).collect();
    assert_eq!(names, vec!["in", "in@(>,a)#1", "ab", "ab@(a,b)#1"]);
    assert!(lift_counterexample(&net, &tnet, &seq, &[]).is_err());
}

#[test]
fn mapping_back_examples() {
    let net = pipe();
    let tnet = transform_net(&net, 1).unwrap();
    let skips = FiringSequence::from_transitions(&tnet, &["in", "in@skip#1", "ab", "ab@skip#1"], None).unwrap();
    let (orig, chains) = map_counterexample_back(&tnet, &skips).unwrap();
    assert_eq!(orig, FiringSequence::from_transitions(&net, &["in", "ab"], None).unwrap());
    assert_eq!(chains, vec![None]);
    let start = FiringSequence::from_transitions(&tnet, &["in", "in@(>,a)#1"], None).unwrap();
    let (_, chains) = map_counterexample_back(&tnet, &start).unwrap();
    assert_eq!(chains[0].as_ref().unwrap().elements(), vec!["a"]);
}

#[test]
fn run_atoms_skip_unrelated_steps() {
    let net = single();
    let tnet = transform_net(&net, 1).unwrap();
    let sets = TransitionSets::of(&tnet);
    assert_eq!(names(&sets.o), set(&["t@(>,p)#1", "t@(p,p)#1", "t@skip#1"]));
    let phi = transform_formula(&net, &parse_flow_ltl("F t && A G p").unwrap(), &tnet).unwrap();
    let part = parse_ltl("(\"t@(>,p)#1\" || \"t@(p,p)#1\" || \"t@skip#1\") U t").unwrap();
    assert!(phi.to_string().contains(&part.to_string()), "{phi}");
}

#[test]
fn flow_formula_with_one_subnet() {
    let net = pipe();
    let tnet = transform_net(&net, 1).unwrap();
    let phi = transform_formula(&net, &parse_flow_ltl("A F d").unwrap(), &tnet).unwrap();
    let want = parse_ltl("G F \"act@o\" -> (G \"init#1\" || (\"init#1\" U (!\"init#1\" && F \"[d]#1\")))").unwrap();
    assert_eq!(phi, want);
    let bare = transform_net(&net, 0).unwrap();
    let plain = transform_formula(&net, &parse_flow_ltl("G a").unwrap(), &bare).unwrap();
    assert_eq!(plain, parse_ltl("G F \"act@o\" -> G a").unwrap());
}

#[test]
fn mismatched_subnet_count_is_an_error() {
    let net = pipe();
    let tnet = transform_net(&net, 1).unwrap();
    assert!(transform_formula(&net, &parse_flow_ltl("A F d && A G a").unwrap(), &tnet).is_err());
    assert!(transform_formula(&net, &parse_flow_ltl("A F nowhere").unwrap(), &tnet).is_err());
}

#[test]
fn formula_size_bound_and_linear_growth() {
    let net = pipe();
    let check = formula_size_check(&net, &parse_flow_ltl("A F d").unwrap()).unwrap();
    assert!(check.holds, "{check:?}");
    let none = formula_size_check(&net, &parse_flow_ltl("G a").unwrap()).unwrap();
    assert_eq!(none.output, parse_ltl("G F \"act@o\" -> G a").unwrap().size());
}

fn contains_flow(phi: &LtlFormula, tnet: &InhibitorNet) -> bool {
    let pt = tnet.pt();
    phi.atoms().iter().all(|a| pt.place_index(a).is_some() || pt.transition_index(a).is_some())
}

fn random_instance(seed: u64) -> (PetriNetWithTransits, FlowLtlFormula) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let net = random_pnwt(&mut rng, PnwtShape::default());
    let phi = random_flow_ltl(&mut rng, &net, 3);
    (net, phi)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_nets_transform_to_audited_safe_nets(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_pnwt(&mut rng, PnwtShape::default());
        let n = rng.gen_range(0..=2);
        let tnet = transform_net(&net, n).unwrap();
        let extra_places = chain_end_pairs(&net).iter().map(|&(_, p)| p).collect::<BTreeSet<_>>().len() * n;
        let extra_transitions = chain_end_pairs(&net).len() * n;
        let (p, t) = expected_sizes(&net, n);
        prop_assert_eq!((tnet.place_count(), tnet.transition_count()), (p + extra_places, t + extra_transitions));
        for c in audit(&net, &tnet) {
            prop_assert!(c.ok(), "{:?}", c);
        }
        prop_assert!(flowmc::net::validate_safe(&tnet, 32).is_ok());
    }

    #[test]
    fn reduced_formulas_speak_about_the_reduced_net(seed in any::<u64>()) {
        let (net, phi) = random_instance(seed);
        let tnet = transform_net(&net, phi.flow_subformulas().len()).unwrap();
        let out = transform_formula(&net, &phi, &tnet).unwrap();
        prop_assert!(contains_flow(&out, &tnet));
        prop_assert!(formula_size_check(&net, &phi).unwrap().holds);
    }

    #[test]
    fn batched_next_rewriting_matches_innermost_first(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let atoms = vec!["a".to_string(), "b".to_string()];
        let f = random_ltl(&mut rng, &atoms, 4);
        let wrap = |g: LtlFormula| LtlFormula::or(LtlFormula::atom("o"), g);
        prop_assert_eq!(SubstitutionPlan::of(&f).apply(&f, &wrap), naive_next_rewrite(&f, &wrap));
    }

    #[test]
    fn lifting_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_pnwt(&mut rng, PnwtShape::default());
        let mut m = net.initial_marking();
        let mut fired = Vec::new();
        for _ in 0..rng.gen_range(0..6) {
            let succ = successors(&net, &m).unwrap();
            if succ.is_empty() {
                break;
            }
            let (t, next) = succ[rng.gen_range(0..succ.len())].clone();
            fired.push(t.to_string());
            m = next;
        }
        let refs: Vec<&str> = fired.iter().map(String::as_str).collect();
        let seq = FiringSequence::from_transitions(&net, &refs, None).unwrap();
        let chains = track_chains(&net, &seq);
        let pick = if chains.is_empty() { None } else { Some(chains[rng.gen_range(0..chains.len())].clone()) };
        let tnet = transform_net(&net, 1).unwrap();
        let lifted = lift_counterexample(&net, &tnet, &seq, std::slice::from_ref(&pick)).unwrap();
        let (back, got) = map_counterexample_back(&tnet, &lifted).unwrap();
        let horizon = 4 * (seq.len() + 2);
        prop_assert_eq!(back.canonical(), seq.canonical());
        prop_assert_eq!(got[0].as_ref().map(|c| c.behaviour(horizon)), pick.map(|c| c.behaviour(horizon)));
    }
}
