//! Python bindings: nets, instances and formulas travel as text in the formats of the
//! command line, verdicts come back as strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use flowmc::bench::{gen_rp, gen_ru, gen_sf, parse_instance, write_instance, RpVersion, RuVariant};
use flowmc::circuit::encode_net;
use flowmc::ltl::{parse_flow_ltl, FlowLtlFormula};
use flowmc::mc::{check_flow_ltl, Engine, FlowVerdict, DEFAULT_STATE_CAP};
use flowmc::net::{write_net, PetriNetWithTransits};
use flowmc::sdn::{
    encode_network, forwarding_transitions, parse_config, parse_topology, parse_update, spec_connectivity,
    spec_drop_freedom, spec_loop_freedom, verification_query, Assumption,
};
use flowmc::transform::{expected_sizes, transform_formula, transform_net};

fn err(e: flowmc::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn load(net: &str, formula: Option<&str>) -> PyResult<(PetriNetWithTransits, Option<FlowLtlFormula>)> {
    let (n, f, _) = parse_instance(net).map_err(err)?;
    let f = match formula {
        Some(text) => Some(parse_flow_ltl(text).map_err(err)?),
        None => f,
    };
    Ok((n, f))
}

/// Checks a Flow-LTL formula on a net or instance text.
///
/// Returns `(verdict, report)` with verdict `"verified"`, `"counterexample"` or
/// `"inconclusive"`; the report describes the counterexample or why no decision was made.
#[pyfunction]
#[pyo3(signature = (net, formula=None, engine="explicit", bound=30, state_cap=DEFAULT_STATE_CAP))]
fn check(net: &str, formula: Option<&str>, engine: &str, bound: usize, state_cap: usize) -> PyResult<(String, Option<String>)> {
    let (net, formula) = load(net, formula)?;
    let formula = formula.ok_or_else(|| PyValueError::new_err("no formula given"))?;
    let engine = match engine {
        "explicit" => Engine::Explicit { cap: state_cap },
        "bmc" => Engine::Bmc { bound },
        other => return Err(PyValueError::new_err(format!("unknown engine {other:?}"))),
    };
    let verdict = check_flow_ltl(&net, &formula, engine).map_err(err)?;
    let report = match &verdict {
        FlowVerdict::Verified => None,
        FlowVerdict::Counterexample(c) => Some(c.to_string()),
        FlowVerdict::Inconclusive(why) => Some(why.clone()),
    };
    Ok((verdict.label().to_string(), report))
}

/// Parses a Flow-LTL formula and prints it back in canonical form.
#[pyfunction]
fn normalize_formula(formula: &str) -> PyResult<String> {
    Ok(parse_flow_ltl(formula).map_err(err)?.to_string())
}

/// The reduced net (text) and, when a formula is known, the reduced LTL formula.
#[pyfunction]
#[pyo3(signature = (net, formula=None))]
fn transform(net: &str, formula: Option<&str>) -> PyResult<(String, Option<String>)> {
    let (net, formula) = load(net, formula)?;
    let n = formula.as_ref().map_or(0, |f| f.flow_subformulas().len());
    let tnet = transform_net(&net, n).map_err(err)?;
    let reduced = match formula {
        Some(f) => Some(transform_formula(&net, &f, &tnet).map_err(err)?.to_string()),
        None => None,
    };
    Ok((tnet.to_text(), reduced))
}

/// `(places, transitions)` of the reduced net for `n` flow subformulas, without building it.
#[pyfunction]
fn reduced_sizes(net: &str, n: usize) -> PyResult<(usize, usize)> {
    let (net, _) = load(net, None)?;
    Ok(expected_sizes(&net, n))
}

/// ASCII AIGER circuit of the reduced net.
#[pyfunction]
#[pyo3(signature = (net, formula=None))]
fn aiger(net: &str, formula: Option<&str>) -> PyResult<String> {
    let (net, formula) = load(net, formula)?;
    let n = formula.as_ref().map_or(0, |f| f.flow_subformulas().len());
    let tnet = transform_net(&net, n).map_err(err)?;
    Ok(encode_net(&tnet, &[]).map_err(err)?.to_aiger())
}

/// Instance text of the switch-failure benchmark.
#[pyfunction]
#[pyo3(signature = (n, seed=0))]
fn bench_sf(n: usize, seed: u64) -> PyResult<String> {
    Ok(write_instance(&gen_sf(n, seed).map_err(err)?))
}

/// Instance text of the redundant-pipeline benchmark, version `"B"`, `"U"`, `"M"` or `"C"`.
#[pyfunction]
#[pyo3(signature = (n1, n2, version="B"))]
fn bench_rp(n1: usize, n2: usize, version: &str) -> PyResult<String> {
    let v: RpVersion = version.parse().map_err(err)?;
    Ok(write_instance(&gen_rp(n1, n2, v).map_err(err)?))
}

/// Instance text of the routing-update benchmark, variant `"T"` or `"F"`.
#[pyfunction]
#[pyo3(signature = (switches, seed=0, variant="T"))]
fn bench_ru(switches: usize, seed: u64, variant: &str) -> PyResult<String> {
    let v: RuVariant = variant.parse().map_err(err)?;
    Ok(write_instance(&gen_ru(switches, seed, v).map_err(err)?))
}

/// Instance text for a network update under weak fairness. `requirement` is
/// `"connectivity"`, `"loop-freedom"` or `"drop-freedom"`.
#[pyfunction]
#[pyo3(signature = (topology, config, update=None, requirement="connectivity"))]
fn encode_sdn(topology: &str, config: &str, update: Option<&str>, requirement: &str) -> PyResult<String> {
    let top = parse_topology(topology).map_err(err)?;
    let cfg = parse_config(config).map_err(err)?;
    let upd = update.map(parse_update).transpose().map_err(err)?;
    let net = encode_network(&top, &cfg, upd.as_ref()).map_err(err)?;
    let spec = match requirement {
        "connectivity" => spec_connectivity(&cfg.egress),
        "loop-freedom" => spec_loop_freedom(&top.switches, &cfg.egress),
        "drop-freedom" => spec_drop_freedom(&cfg.egress, &forwarding_transitions(&top, &cfg)).map_err(err)?,
        other => return Err(PyValueError::new_err(format!("unknown requirement {other:?}"))),
    };
    let phi = verification_query(&net, Assumption::WeakFair, spec);
    Ok(format!("{}.formula {phi}\n", write_net(&net)))
}

#[pymodule]
#[pyo3(name = "flowmc")]
fn flowmc_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_formula, m)?)?;
    m.add_function(wrap_pyfunction!(transform, m)?)?;
    m.add_function(wrap_pyfunction!(reduced_sizes, m)?)?;
    m.add_function(wrap_pyfunction!(aiger, m)?)?;
    m.add_function(wrap_pyfunction!(bench_sf, m)?)?;
    m.add_function(wrap_pyfunction!(bench_rp, m)?)?;
    m.add_function(wrap_pyfunction!(bench_ru, m)?)?;
    m.add_function(wrap_pyfunction!(encode_sdn, m)?)?;
    Ok(())
}
