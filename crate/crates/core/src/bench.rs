//! Benchmark families (switch failure, redundant pipeline, routing update), the
//! instance file format shared with the command line, and report rows.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::encode_net;
use crate::error::{Error, Result};
use crate::ltl::{parse_flow_ltl, FlowLtlFormula, LtlFormula};
use crate::mc::{check_flow_ltl, Engine, FlowVerdict};
use crate::net::{parse_net, write_net, NetBuilder, PetriNetWithTransits};
use crate::sdn::{
    encode_network, run_assumptions, spec_connectivity, switch_place, verification_query, Assumption, Config,
    Topology, UpdateProgram,
};
use crate::transform::{transform_formula, transform_net};

/// A net, a formula and, where the family fixes it, the expected verdict.
#[derive(Debug, Clone)]
pub struct BenchmarkInstance {
    pub name: String,
    pub family: String,
    pub params: String,
    pub switches: usize,
    pub net: PetriNetWithTransits,
    pub formula: FlowLtlFormula,
    pub expected_verdict: Option<bool>,
}

fn instance(family: &str, params: String, switches: usize, net: PetriNetWithTransits, formula: FlowLtlFormula, expected: bool) -> BenchmarkInstance {
    BenchmarkInstance {
        name: format!("{family}/{params}"),
        family: family.into(),
        params,
        switches,
        net,
        formula,
        expected_verdict: Some(expected),
    }
}

fn forward(b: &mut NetBuilder, x: &str, y: &str) -> Result<()> {
    let t = format!("fwd({x},{y})");
    b.transition(&t, true)?;
    b.flow(&t, &[x, y], &[x, y])?;
    b.transit(&t, Some(x), y)?;
    b.transit(&t, Some(y), y)?;
    Ok(())
}

fn ingress(b: &mut NetBuilder, x: &str) -> Result<()> {
    b.transition("ingress", true)?;
    b.flow("ingress", &[x], &[x])?;
    b.transit("ingress", None, x)?;
    b.transit("ingress", Some(x), x)?;
    Ok(())
}

fn fair_implies(net: &PetriNetWithTransits, premise: Option<LtlFormula>, spec: FlowLtlFormula) -> FlowLtlFormula {
    let fair = run_assumptions(net, Assumption::WeakFair);
    let run = match premise {
        None => fair,
        Some(p) => LtlFormula::and(fair, p),
    };
    FlowLtlFormula::implies(run, spec)
}

/// Switch failure: a line of switches `p0 .. pn` fed at `p0`; the failing switch
/// `f`, drawn from `seed`, goes down after forwarding, and `bypass` forwards from
/// `p(f-1)` directly to `p(f+1)`. Every flow still reaches `pn`.
pub fn gen_sf(n: usize, seed: u64) -> Result<BenchmarkInstance> {
    if n < 2 {
        return Err(Error::Argument("switch failure needs n >= 2".into()));
    }
    let f = ChaCha8Rng::seed_from_u64(seed).gen_range(1..n);
    let p = |i: usize| format!("p{i}");
    let mut b = NetBuilder::new(format!("sf_{n}"));
    for i in 0..=n {
        b.place(&p(i), true)?;
    }
    ingress(&mut b, &p(0))?;
    for i in 1..=n {
        if i == f + 1 {
            // the failing switch forwards once more and loses its token
            let t = format!("fwd({},{})", p(f), p(i));
            b.transition(&t, true)?;
            b.flow(&t, &[&p(f), &p(i)], &[&p(i)])?;
            b.transit(&t, Some(&p(f)), &p(i))?;
            b.transit(&t, Some(&p(i)), &p(i))?;
        } else {
            forward(&mut b, &p(i - 1), &p(i))?;
        }
    }
    b.transition("bypass", true)?;
    let (before, after) = (p(f - 1), p(f + 1));
    b.flow("bypass", &[&before, &after], &[&before, &after])?;
    b.transit("bypass", Some(&before), &after)?;
    b.transit("bypass", Some(&after), &after)?;
    let net = b.build()?;
    let formula = fair_implies(&net, None, FlowLtlFormula::flow(LtlFormula::eventually(LtlFormula::atom(p(n)))));
    Ok(instance("SF", n.to_string(), n + 1, net, formula, true))
}

/// Versions of the redundant pipeline family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RpVersion {
    /// Two pipelines, no updates.
    Base,
    /// Updates may remove the first switch of either pipeline and return its flows to the ingress.
    Update,
    /// A mutex lets only one pipeline be broken at a time; broken pipelines are repaired.
    Mutex,
    /// The mutex net, with connectivity required only if updates stop eventually.
    Correct,
}

impl FromStr for RpVersion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "B" | "b" => Ok(RpVersion::Base),
            "U" | "u" => Ok(RpVersion::Update),
            "M" | "m" => Ok(RpVersion::Mutex),
            "C" | "c" => Ok(RpVersion::Correct),
            _ => Err(Error::Argument(format!("unknown pipeline version {s:?}, expected B, U, M or C"))),
        }
    }
}

impl fmt::Display for RpVersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RpVersion::Base => "B",
            RpVersion::Update => "U",
            RpVersion::Mutex => "M",
            RpVersion::Correct => "C",
        })
    }
}

/// Redundant pipeline: ingress `in`, pipelines `a1..` and `b1..`, egress `out`.
/// The requirement is connectivity together with staying on one pipeline.
pub fn gen_rp(n1: usize, n2: usize, version: RpVersion) -> Result<BenchmarkInstance> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::Argument("both pipelines need at least one switch".into()));
    }
    let pipes = [
        (1..=n1).map(|i| format!("a{i}")).collect::<Vec<_>>(),
        (1..=n2).map(|i| format!("b{i}")).collect::<Vec<_>>(),
    ];
    let mut b = NetBuilder::new(format!("rp_{n1}_{n2}_{version}"));
    b.place("in", true)?;
    for pipe in &pipes {
        for s in pipe {
            b.place(s, true)?;
        }
    }
    b.place("out", true)?;
    ingress(&mut b, "in")?;
    for pipe in &pipes {
        let hops: Vec<&str> = std::iter::once("in")
            .chain(pipe.iter().map(|s| s.as_str()))
            .chain(std::iter::once("out"))
            .collect();
        for w in hops.windows(2) {
            forward(&mut b, w[0], w[1])?;
        }
    }
    let mut removals = Vec::new();
    if version != RpVersion::Base {
        let mutex = version != RpVersion::Update;
        if mutex {
            b.place("m", true)?;
        }
        for (k, pipe) in pipes.iter().enumerate() {
            let (first, broken, owner) = (&pipe[0], format!("r{}", k + 1), format!("w{}", k + 1));
            let rm = format!("remove({first})");
            let ret = format!("return({broken})");
            b.place(&broken, false)?;
            // updates are not forced to happen
            b.transition(&rm, false)?;
            if mutex {
                b.place(&owner, false)?;
                b.flow(&rm, &[first, "m"], &[&broken, &owner])?;
            } else {
                b.flow(&rm, &[first], &[&broken])?;
            }
            b.transit(&rm, Some(first), &broken)?;
            b.transition(&ret, true)?;
            b.flow(&ret, &[&broken, "in"], &[&broken, "in"])?;
            b.transit(&ret, Some(&broken), "in")?;
            b.transit(&ret, Some("in"), "in")?;
            if mutex {
                let fix = format!("repair({first})");
                b.transition(&fix, true)?;
                b.flow(&fix, &[&broken, &owner], &[first, "m"])?;
                b.transit(&fix, Some(&broken), first)?;
            }
            removals.push(rm);
        }
    }
    let net = b.build()?;
    let atom = |s: &str| LtlFormula::atom(s);
    let connectivity = LtlFormula::eventually(atom("out"));
    let on_pipe = |pipe: &[String]| {
        LtlFormula::always(LtlFormula::disj(
            std::iter::once(atom("in"))
                .chain(pipe.iter().map(|s| atom(s)))
                .chain(std::iter::once(atom("out"))),
        ))
    };
    let coherence = LtlFormula::or(on_pipe(&pipes[0]), on_pipe(&pipes[1]));
    let (formula, expected) = match version {
        RpVersion::Correct => {
            let quiet = LtlFormula::eventually(LtlFormula::always(LtlFormula::conj(
                removals.iter().map(|r| LtlFormula::not(atom(r))),
            )));
            (fair_implies(&net, Some(quiet), FlowLtlFormula::flow(connectivity)), true)
        }
        v => (
            fair_implies(&net, None, FlowLtlFormula::flow(LtlFormula::and(connectivity, coherence))),
            v == RpVersion::Base,
        ),
    };
    Ok(instance("RP", format!("{n1}/{n2}/{version}"), n1 + n2 + 2, net, formula, expected))
}

/// Target of the routing-update requirement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuVariant {
    /// Flows reach the egress.
    Egress,
    /// Flows reach a switch off the final route, which fails.
    Other,
}

impl FromStr for RuVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T" | "t" => Ok(RuVariant::Egress),
            "F" | "f" => Ok(RuVariant::Other),
            _ => Err(Error::Argument(format!("unknown routing-update variant {s:?}, expected T or F"))),
        }
    }
}

impl fmt::Display for RuVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuVariant::Egress => "T",
            RuVariant::Other => "F",
        })
    }
}

fn random_path<R: Rng>(rng: &mut R, adj: &BTreeMap<String, Vec<String>>, from: &str, to: &str) -> Option<Vec<String>> {
    // randomized depth-first search for a simple path
    let mut path = vec![from.to_string()];
    let mut options: Vec<Vec<String>> = vec![{
        let mut v = adj[from].clone();
        v.shuffle(rng);
        v
    }];
    while let Some(opts) = options.last_mut() {
        let Some(next) = opts.pop() else {
            options.pop();
            path.pop();
            continue;
        };
        if path.contains(&next) {
            continue;
        }
        path.push(next.clone());
        if next == to {
            return Some(path);
        }
        let mut v = adj[&next].clone();
        v.shuffle(rng);
        options.push(v);
    }
    None
}

/// Routing update on a seeded random topology: a loop-free initial route from ingress
/// to egress is replaced by a different final route, updated switch by switch from
/// the egress backwards.
pub fn gen_ru(switch_count: usize, seed: u64, variant: RuVariant) -> Result<BenchmarkInstance> {
    if switch_count < 3 {
        return Err(Error::Argument("routing update needs at least 3 switches".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (0..switch_count).map(|i| format!("s{i}")).collect();
    loop {
        let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
        for i in 1..switch_count {
            edges.insert((rng.gen_range(0..i), i));
        }
        for _ in 0..switch_count / 2 + 1 {
            let (a, b) = (rng.gen_range(0..switch_count), rng.gen_range(0..switch_count));
            if a != b {
                edges.insert((a.min(b), a.max(b)));
            }
        }
        let mut adj: BTreeMap<String, Vec<String>> = names.iter().map(|n| (n.clone(), Vec::new())).collect();
        for &(a, b) in &edges {
            adj.get_mut(&names[a]).unwrap().push(names[b].clone());
            adj.get_mut(&names[b]).unwrap().push(names[a].clone());
        }
        let ing = rng.gen_range(0..switch_count);
        let egr = (ing + rng.gen_range(1..switch_count)) % switch_count;
        let (ing, egr) = (&names[ing], &names[egr]);
        let Some(initial) = random_path(&mut rng, &adj, ing, egr) else { continue };
        let mut chosen = None;
        for _ in 0..16 {
            let Some(fin) = random_path(&mut rng, &adj, ing, egr) else { break };
            if fin != initial && fin.len() < switch_count {
                chosen = Some(fin);
                break;
            }
        }
        let Some(fin) = chosen else { continue };
        let top = Topology::new(
            names.clone(),
            edges.iter().map(|&(a, b)| (names[a].clone(), names[b].clone())).collect(),
        )?;
        let forwarding: BTreeMap<String, String> = initial.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
        let cfg = Config::new(vec![ing.clone()], vec![egr.clone()], forwarding.clone())?;
        let steps: Vec<UpdateProgram> = fin
            .windows(2)
            .rev()
            .filter(|w| forwarding.get(&w[0]) != Some(&w[1]))
            .map(|w| UpdateProgram::Switch {
                switch: w[0].clone(),
                target: w[1].clone(),
            })
            .collect();
        let upd = match steps.len() {
            0 => continue,
            1 => steps.into_iter().next().unwrap(),
            _ => UpdateProgram::Sequential(steps),
        };
        let net = encode_network(&top, &cfg, Some(&upd))?;
        let off_route: Vec<&String> = names.iter().filter(|n| !fin.contains(n)).collect();
        let target = match variant {
            RuVariant::Egress => egr.clone(),
            RuVariant::Other => (*off_route.choose(&mut rng).expect("final route misses a switch")).clone(),
        };
        let spec = match variant {
            RuVariant::Egress => spec_connectivity(&cfg.egress),
            RuVariant::Other => FlowLtlFormula::flow(LtlFormula::eventually(LtlFormula::atom(switch_place(&target)))),
        };
        let formula = verification_query(&net, Assumption::WeakFair, spec);
        let params = format!("{switch_count}/{seed}/{variant}");
        return Ok(instance("RU", params, switch_count, net, formula, variant == RuVariant::Egress));
    }
}

/// Instance text: the net file followed by `.formula` and optional `.expect` lines.
pub fn write_instance(inst: &BenchmarkInstance) -> String {
    let mut out = format!("# benchmark {}\n", inst.name);
    out.push_str(&write_net(&inst.net));
    out.push_str(&format!(".formula {}\n", inst.formula));
    if let Some(e) = inst.expected_verdict {
        out.push_str(&format!(".expect {e}\n"));
    }
    out
}

/// Net, formula and expectation of an instance text. Plain net files are accepted too.
pub fn parse_instance(text: &str) -> Result<(PetriNetWithTransits, Option<FlowLtlFormula>, Option<bool>)> {
    let mut net_text = String::new();
    let mut formula = None;
    let mut expected = None;
    for line in text.lines() {
        let t = line.trim_start();
        if let Some(f) = t.strip_prefix(".formula") {
            formula = Some(parse_flow_ltl(f.trim())?);
            net_text.push('\n');
        } else if let Some(e) = t.strip_prefix(".expect") {
            expected = Some(match e.trim() {
                "true" => true,
                "false" => false,
                other => return Err(Error::Argument(format!("bad expectation {other:?}"))),
            });
            net_text.push('\n');
        } else {
            net_text.push_str(line);
            net_text.push('\n');
        }
    }
    Ok((parse_net(&net_text)?, formula, expected))
}

/// One line of the benchmark report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub benchmark: String,
    pub params: String,
    pub switches: usize,
    pub places: usize,
    pub transitions: usize,
    pub formula_size: usize,
    pub transformed_places: usize,
    pub transformed_transitions: usize,
    pub transformed_formula_size: usize,
    pub latches: usize,
    pub gates: usize,
    pub seconds: f64,
    pub engine: String,
    pub verdict: String,
}

impl ReportRow {
    pub const HEADER: [&'static str; 14] = [
        "benchmark", "params", "#S", "|P|", "|T|", "|phi|", "|P>|", "|T>|", "|phi'|", "latches", "gates", "seconds",
        "engine", "verdict",
    ];

    pub fn tsv_header() -> String {
        Self::HEADER.join("\t")
    }

    pub fn to_tsv(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.3}\t{}\t{}",
            self.benchmark,
            self.params,
            self.switches,
            self.places,
            self.transitions,
            self.formula_size,
            self.transformed_places,
            self.transformed_transitions,
            self.transformed_formula_size,
            self.latches,
            self.gates,
            self.seconds,
            self.engine,
            self.verdict
        )
    }

    /// The row without the timing column, for comparing runs.
    pub fn stable_fields(&self) -> String {
        let mut r = self.clone();
        r.seconds = 0.0;
        r.to_tsv()
    }
}

/// Short name of an engine for reports.
pub fn engine_name(engine: Engine) -> String {
    match engine {
        Engine::Explicit { .. } => "explicit".into(),
        Engine::Bmc { bound } => format!("bmc({bound})"),
    }
}

/// Verdict mark of a report row: ✓ holds, ✗ fails, ? undecided.
pub fn verdict_mark(v: &FlowVerdict) -> &'static str {
    match v {
        FlowVerdict::Verified => "✓",
        FlowVerdict::Counterexample(_) => "✗",
        FlowVerdict::Inconclusive(_) => "?",
    }
}

/// Transforms, encodes and checks `inst`, measuring the whole pipeline.
pub fn run_benchmark(inst: &BenchmarkInstance, engine: Engine) -> Result<(ReportRow, FlowVerdict)> {
    let start = Instant::now();
    let n = inst.formula.flow_subformulas().len();
    let tnet = transform_net(&inst.net, n)?;
    let tphi = transform_formula(&inst.net, &inst.formula, &tnet)?;
    let circuit = encode_net(&tnet, &[])?;
    let verdict = check_flow_ltl(&inst.net, &inst.formula, engine)?;
    let row = ReportRow {
        benchmark: inst.family.clone(),
        params: inst.params.clone(),
        switches: inst.switches,
        places: inst.net.places().len(),
        transitions: inst.net.transitions().len(),
        formula_size: inst.formula.size(),
        transformed_places: tnet.place_count(),
        transformed_transitions: tnet.transition_count(),
        transformed_formula_size: tphi.size(),
        latches: circuit.latch_count(),
        gates: circuit.gate_count(),
        seconds: start.elapsed().as_secs_f64(),
        engine: engine_name(engine),
        verdict: verdict_mark(&verdict).to_string(),
    };
    Ok((row, verdict))
}

/// Runs every instance and returns the rows sorted by benchmark name and parameters.
pub fn run_report(instances: &[BenchmarkInstance], engine: Engine) -> Result<Vec<ReportRow>> {
    let mut rows = instances
        .iter()
        .map(|i| run_benchmark(i, engine).map(|(r, _)| r))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| (&a.benchmark, &a.params).cmp(&(&b.benchmark, &b.params)));
    Ok(rows)
}
