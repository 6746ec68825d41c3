use std::collections::BTreeSet;

use flowmc::circuit::*;
use flowmc::ltl::parse_ltl;
use flowmc::net::{parse_net, parse_pt_net, successors, PtNet};
use flowmc::testgen::random_inhibitor_net;
use flowmc::transform::transform_net;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn header(c: &Circuit) -> Vec<usize> {
    let text = c.to_aiger();
    let first = text.lines().next().unwrap().to_string();
    let mut parts = first.split_whitespace();
    assert_eq!(parts.next(), Some("aag"));
    parts.map(|x| x.parse().unwrap()).collect()
}

fn pt_net(text: &str) -> PtNet {
    parse_pt_net(text).unwrap().1
}

fn handover() -> PtNet {
    pt_net(
        ".place a init\n.place b\n.place c\n\
         .transition ab\n.flow ab : a -> b\n\
         .transition bc\n.flow bc : b -> c\n\
         .transition back\n.flow back : c -> a\n.inhibitor back : b\n",
    )
}

#[test]
fn header_counts_follow_the_net() {
    let pt = handover();
    let c = encode_net(&pt, &[]).unwrap();
    let h = header(&c);
    let (i, l, o, a) = (h[1], h[2], h[3], h[4]);
    assert_eq!(i, 3);
    assert_eq!(l, 3 + 2);
    assert_eq!(o, 3 + 3 + 1);
    assert_eq!(h[0], i + l + a);
    assert_eq!(c.latch_count(), l);
    assert_eq!(c.gate_count(), a);
    assert_eq!(c.max_var(), h[0]);
    assert!(c.output_index(ERROR_OUTPUT).is_some());
    assert!(c.output_index(&output_name("back")).is_some());
}

#[test]
fn reduced_nets_have_one_latch_per_place_plus_two() {
    let net = parse_net(
        ".place a init\n.place b init\n.transition in\n.flow in : a -> a\n.transit in : > -> a\n\
         .transition ab\n.flow ab : a b -> a b\n.transit ab : a -> b\n.transit ab : b -> b\n",
    )
    .unwrap();
    for n in 0..=2 {
        let tnet = transform_net(&net, n).unwrap();
        let c = encode_net(&tnet, &[]).unwrap();
        assert_eq!(c.latch_count(), tnet.place_count() + 2);
        assert_eq!(c.inputs.len(), tnet.transition_count());
    }
}

#[test]
fn aiger_text_round_trips() {
    let c = encode_net(&handover(), &["ltl G a".to_string()]).unwrap();
    let text = c.to_aiger();
    let back = parse_aiger(&text).unwrap();
    assert_eq!(back, c);
    assert_eq!(back.to_aiger(), text);
    assert!(text.contains("\nc\nltl G a"));
    assert!(parse_aiger("aag 1 1 0 0 0\n").is_err());
    assert!(parse_aiger("aig 0 0 0 0 0\n").is_err());
}

#[test]
fn lone_marked_place_without_transitions() {
    let pt = pt_net(".place p init\n");
    let c = encode_net(&pt, &[]).unwrap();
    let out = simulate(&c, &[BTreeSet::new(), BTreeSet::new(), BTreeSet::new()]).unwrap();
    assert_eq!(out[0], set(&["p_o"]));
    assert_eq!(out[1], set(&["p_o"]));
    assert_eq!(out[2], set(&["p_o", "e_o"]));
}

#[test]
fn valid_replay_tracks_the_marking_and_never_errs() {
    let pt = handover();
    let c = encode_net(&pt, &[]).unwrap();
    let fired = ["ab", "bc", "back", "ab"];
    let mut inputs = vec![BTreeSet::new()];
    inputs.extend(fired.iter().map(|t| set(&[t])));
    let out = simulate(&c, &inputs).unwrap();
    assert_eq!(out[0], set(&["a_o"]));
    let mut m = pt.initial_marking();
    for (k, t) in fired.iter().enumerate() {
        let mut want: BTreeSet<String> = m.iter().map(|p| output_name(p.as_str())).collect();
        want.insert(output_name(t));
        assert_eq!(out[k + 1], want, "step {}", k + 1);
        m = successors(&pt, &m).unwrap().into_iter().find(|(u, _)| u.as_str() == *t).unwrap().1;
    }
}

#[test]
fn invalid_inputs_raise_the_error_output_for_good() {
    let pt = handover();
    let c = encode_net(&pt, &[]).unwrap();
    let inputs = [BTreeSet::new(), set(&["bc"]), set(&["ab"]), BTreeSet::new(), set(&["ab", "bc"])];
    let out = simulate(&c, &inputs).unwrap();
    assert!(!out[1].contains(ERROR_OUTPUT));
    assert!(!out[1].contains("bc_o"));
    assert!(out[2].contains(ERROR_OUTPUT));
    assert!(out[2].contains("a_o") && !out[2].contains("b_o"));
    assert!(simulate(&c, &[set(&["nope"])]).is_err());
}

#[test]
fn inhibitor_arcs_block_firing() {
    let pt = pt_net(".place a init\n.place b init\n.transition t\n.flow t : a -> a\n.inhibitor t : b\n");
    let c = encode_net(&pt, &[]).unwrap();
    let out = simulate(&c, &[BTreeSet::new(), set(&["t"]), BTreeSet::new()]).unwrap();
    assert!(!out[1].contains("t_o"));
    assert!(out[2].contains(ERROR_OUTPUT));
}

#[test]
fn formula_wrapping() {
    let phi = parse_ltl("F p && G !t").unwrap();
    let wrapped = wrap_formula_for_circuit(&phi);
    assert_eq!(wrapped, parse_ltl("X (G (e_o -> G e_o) -> (F p_o && G !t_o))").unwrap());
    let base = wrap_formula_for_circuit(&parse_ltl("q").unwrap()).size() - 1;
    assert_eq!(wrapped.size(), phi.size() + base);
}

fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> Vec<bool> {
    (0..n).map(|_| rng.gen_bool(0.5)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gates_agree_with_the_update_relation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pt = random_inhibitor_net(&mut rng, 5, 4);
        let c = encode_net(&pt, &[]).unwrap();
        prop_assert_eq!(c.latch_count(), pt.places().len() + 2);
        for _ in 0..16 {
            let latches = random_bits(&mut rng, c.latch_count());
            let inputs = if rng.gen_bool(0.5) {
                let mut one = vec![false; c.inputs.len()];
                if !one.is_empty() {
                    let k = rng.gen_range(0..one.len());
                    one[k] = true;
                }
                one
            } else {
                random_bits(&mut rng, c.inputs.len())
            };
            let (outs, next) = c.step(&latches, &inputs);
            prop_assert!(relation_holds(&pt, &inputs, &latches, &outs, &next));
            prop_assert_eq!(c.step(&latches, &inputs), (outs, next));
        }
        let text = c.to_aiger();
        prop_assert_eq!(parse_aiger(&text).unwrap().to_aiger(), text);
    }
}
