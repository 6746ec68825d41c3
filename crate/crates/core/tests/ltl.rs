use flowmc::ltl::*;
use flowmc::net::{parse_net, FiringSequence};
use flowmc::testgen::{naive_eval, random_ltl, random_trace};
use flowmc::trace::Trace;
use flowmc::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ltl(s: &str) -> LtlFormula {
    parse_ltl(s).unwrap()
}

fn atom(a: &str) -> LtlFormula {
    LtlFormula::atom(a)
}

#[test]
fn parses_flow_formulas() {
    assert_eq!(
        parse_flow_ltl("A F d").unwrap(),
        FlowLtlFormula::flow(LtlFormula::eventually(atom("d")))
    );
    assert_eq!(ltl("G (a -> X b)"), LtlFormula::always(LtlFormula::implies(atom("a"), LtlFormula::next(atom("b")))));
    let phi = parse_flow_ltl("G F t -> (A F p && A G q)").unwrap();
    assert_eq!(phi.flow_subformulas(), vec![&LtlFormula::eventually(atom("p")), &LtlFormula::always(atom("q"))]);
}

#[test]
fn flow_operators_outside_the_grammar_are_rejected() {
    assert!(parse_flow_ltl("(A G x) -> (A G y)").is_err());
    assert!(matches!(parse_flow_ltl("! A F a"), Err(Error::Grammar(_))));
    assert!(matches!(parse_flow_ltl("X A F a"), Err(Error::Grammar(_))));
    assert!(matches!(parse_ltl("A F a"), Err(Error::Grammar(_))));
    assert!(matches!(parse_ltl("F (a"), Err(Error::Syntax { .. })));
    match parse_ltl("a &&\n  && b") {
        Err(Error::Syntax { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
}

#[test]
fn precedence_and_associativity() {
    assert_eq!(ltl("a U b U c"), LtlFormula::until(atom("a"), LtlFormula::until(atom("b"), atom("c"))));
    assert_eq!(ltl("a -> b -> c"), LtlFormula::implies(atom("a"), LtlFormula::implies(atom("b"), atom("c"))));
    assert_eq!(ltl("a || b && c"), LtlFormula::or(atom("a"), LtlFormula::and(atom("b"), atom("c"))));
    assert_eq!(ltl("a && b U c"), LtlFormula::and(atom("a"), LtlFormula::until(atom("b"), atom("c"))));
    assert_eq!(ltl("!a U b"), LtlFormula::until(LtlFormula::not(atom("a")), atom("b")));
    assert_eq!(ltl("a W b"), LtlFormula::weak_until(atom("a"), atom("b")));
    assert_eq!(ltl("\"x.fwd(y)\" && fwd"), LtlFormula::and(atom("x.fwd(y)"), atom("fwd")));
}

#[test]
fn printing_round_trips() {
    for s in [
        "A G (x -> (x U G !x))",
        "G F a -> A (p W q)",
        "(A F a || A G b) && G (c -> X c)",
        "F G !\"fwd(a,b)\" -> A F \"sw_d\"",
        "true U false",
    ] {
        let phi = parse_flow_ltl(s).unwrap();
        assert_eq!(parse_flow_ltl(&phi.to_string()).unwrap(), phi, "{s}");
    }
}

#[test]
fn sizes_count_core_nodes() {
    assert_eq!(atom("a").size(), 1);
    assert_eq!(ltl("F a").size(), 3);
    assert_eq!(ltl("F a").size(), ltl("F a").expand().size());
    assert_eq!(ltl("a W b").size(), ltl("a W b").expand().size());
    assert_eq!(parse_flow_ltl("A F a").unwrap().size(), 4);
}

#[test]
fn lasso_semantics_examples() {
    assert!(eval_ltl_lasso(&ltl("G a"), &Trace::from_atoms(&[], &[&["a"]])));
    assert!(eval_ltl_lasso(&ltl("a U b"), &Trace::from_atoms(&[&["a"]], &[&["b"]])));
    assert!(eval_ltl_lasso(&ltl("X d"), &Trace::from_atoms(&[&["d", "t"]], &[&["d"]])));
    assert!(!eval_ltl_lasso(&ltl("G F b"), &Trace::from_atoms(&[&["b"]], &[&["a"]])));
    assert!(eval_ltl_lasso(&ltl("G F b"), &Trace::from_atoms(&[], &[&["a"], &["b"]])));
    assert!(eval_ltl_lasso(&ltl("a W b"), &Trace::from_atoms(&[], &[&["a"]])));
    assert!(!eval_ltl_lasso(&ltl("a U b"), &Trace::from_atoms(&[], &[&["a"]])));
}

fn motivating_pair() -> flowmc::net::PetriNetWithTransits {
    parse_net(
        ".place sw_v init\n.place sw_u init\n\
         .transition ingress_v\n.flow ingress_v : sw_v -> sw_v\n.transit ingress_v : > -> sw_v\n.transit ingress_v : sw_v -> sw_v\n\
         .transition fwd_vu\n.flow fwd_vu : sw_v sw_u -> sw_v sw_u\n.transit fwd_vu : sw_v -> sw_u\n.transit fwd_vu : sw_u -> sw_u\n",
    )
    .unwrap()
}

#[test]
fn oracle_examples() {
    let net = motivating_pair();
    let seq = FiringSequence::from_transitions(&net, &["ingress_v", "fwd_vu"], None).unwrap();
    assert!(eval_flow_ltl_oracle(&net, &seq, &parse_flow_ltl("A F sw_u").unwrap()).unwrap());
    assert!(!eval_flow_ltl_oracle(&net, &seq, &parse_flow_ltl("A G sw_v").unwrap()).unwrap());
    let quiet = FiringSequence::from_transitions(&net, &["fwd_vu"], None).unwrap();
    assert!(eval_flow_ltl_oracle(&net, &quiet, &parse_flow_ltl("A false").unwrap()).unwrap());
    let bad = FiringSequence::from_transitions(&net, &["fwd_vu"], Some(0)).unwrap();
    assert!(eval_flow_ltl_oracle(&net, &bad, &parse_flow_ltl("G fwd_vu").unwrap()).unwrap());
    assert!(check_atoms(&parse_flow_ltl("A F nowhere").unwrap(), &net).is_err());
}

#[test]
fn oracle_on_run_formulas_is_lasso_evaluation() {
    let net = motivating_pair();
    let seq = FiringSequence::from_transitions(&net, &["ingress_v", "fwd_vu", "fwd_vu"], Some(2)).unwrap();
    let tr = flowmc::net::trace_of_sequence(&seq);
    for s in ["G F fwd_vu", "F ingress_v", "X X G sw_u", "ingress_v U fwd_vu"] {
        let psi = ltl(s);
        assert_eq!(
            eval_flow_ltl_oracle(&net, &seq, &FlowLtlFormula::Run(psi.clone())).unwrap(),
            eval_ltl_lasso(&psi, &tr),
            "{s}"
        );
    }
}

#[test]
fn flow_connectives_follow_the_clauses() {
    let net = motivating_pair();
    let seq = FiringSequence::from_transitions(&net, &["ingress_v", "fwd_vu"], None).unwrap();
    let holds = |s: &str| eval_flow_ltl_oracle(&net, &seq, &parse_flow_ltl(s).unwrap()).unwrap();
    assert!(holds("A F sw_u || A G sw_v"));
    assert!(!holds("A F sw_u && A G sw_v"));
    assert!(holds("G F ingress_v -> A G sw_v"));
    assert!(!holds("F ingress_v -> A G sw_v"));
}

fn atoms() -> Vec<String> {
    ["a", "b", "c"].iter().map(|s| s.to_string()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn lasso_evaluation_matches_unrolling(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = random_ltl(&mut rng, &atoms(), 4);
        let tr = random_trace(&mut rng, &atoms(), 4);
        prop_assert_eq!(eval_ltl_lasso(&phi, &tr), naive_eval(&phi, &tr, 0), "{} on {}", phi, tr);
        prop_assert_eq!(eval_ltl_lasso(&phi, &tr), eval_ltl_lasso(&phi.expand(), &tr));
    }

    #[test]
    fn random_formulas_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = random_ltl(&mut rng, &atoms(), 4);
        prop_assert_eq!(parse_ltl(&phi.to_string()).unwrap(), phi);
    }
}
