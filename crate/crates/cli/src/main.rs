//! `flowmc`: check Flow-LTL properties of Petri nets with transits, export the reduced
//! net and its circuit, encode software-defined networks and run the benchmark families.
//!
//! Exit codes of `check`: 0 verified, 1 counterexample, 2 inconclusive, 3 for errors.

use std::fs;
use std::io::{self, IsTerminal, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use flowmc::bench::{
    gen_rp, gen_ru, gen_sf, parse_instance, run_benchmark, write_instance, BenchmarkInstance, ReportRow, RpVersion,
    RuVariant,
};
use flowmc::circuit::encode_net;
use flowmc::ltl::{parse_flow_ltl, FlowLtlFormula};
use flowmc::mc::{check_flow_ltl, Engine, FlowVerdict, DEFAULT_STATE_CAP};
use flowmc::net::{write_net, PetriNetWithTransits};
use flowmc::sdn::{
    encode_network, forwarding_transitions, parse_config, parse_topology, parse_update, spec_connectivity,
    spec_drop_freedom, spec_loop_freedom, verification_query, Assumption,
};
use flowmc::transform::{transform_formula, transform_net};

const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "flowmc", version, about = "Model checking of data flows in Petri nets with transits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a Flow-LTL formula on a net (exit 0 verified, 1 counterexample, 2 inconclusive).
    Check(CheckArgs),
    /// Write the reduced P/T net with inhibitor arcs and the reduced LTL formula.
    Transform(InputArgs),
    /// Write the circuit of the reduced net in ASCII AIGER.
    Aiger(InputArgs),
    /// Software-defined network front end.
    Sdn {
        #[command(subcommand)]
        command: SdnCommand,
    },
    /// Generate a benchmark instance (net, formula and expected verdict).
    Bench {
        #[command(subcommand)]
        family: Family,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Run a desk-scale benchmark campaign and write a TSV report.
    Report(ReportArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Net or instance file; standard input when omitted or `-`.
    #[arg(long)]
    net: Option<PathBuf>,
    /// Flow-LTL formula; overrides the `.formula` line of an instance file.
    #[arg(long)]
    formula: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineKind {
    Explicit,
    Bmc,
}

#[derive(Args)]
struct EngineArgs {
    #[arg(long, value_enum, default_value = "explicit")]
    engine: EngineKind,
    /// Lasso length bound of the bounded engine.
    #[arg(long, default_value_t = 30)]
    bound: usize,
    /// Product-state cap of the explicit engine.
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    state_cap: usize,
}

impl EngineArgs {
    fn engine(&self) -> Engine {
        match self.engine {
            EngineKind::Explicit => Engine::Explicit { cap: self.state_cap },
            EngineKind::Bmc => Engine::Bmc { bound: self.bound },
        }
    }
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Subcommand)]
enum SdnCommand {
    /// Encode topology, configuration and update as a net with a verification query.
    Encode(SdnArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Requirement {
    Connectivity,
    LoopFreedom,
    DropFreedom,
}

#[derive(Clone, Copy, ValueEnum)]
enum AssumptionKind {
    WeakFair,
    StrongFair,
    InterleavingMax,
    ConcurrencyMax,
}

#[derive(Args)]
struct SdnArgs {
    #[arg(long)]
    topology: PathBuf,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    update: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "connectivity")]
    requirement: Requirement,
    #[arg(long, value_enum, default_value = "weak-fair")]
    assumption: AssumptionKind,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Family {
    /// Switch failure with a bypass.
    Sf {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Redundant pipeline in version B, U, M or C.
    Rp {
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        #[arg(long, default_value = "B")]
        version: String,
    },
    /// Routing update on a seeded random topology, variant T or F.
    Ru {
        #[arg(long)]
        switches: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "T")]
        variant: String,
    },
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    engine: EngineArgs,
    /// Seed of the failing switch and of the routing-update topologies.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads, one instance per worker at a time.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_input(path: Option<&PathBuf>) -> anyhow::Result<String> {
    match path {
        Some(p) if p.as_os_str() != "-" => fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
        _ => {
            let stdin = io::stdin();
            if stdin.is_terminal() {
                bail!("no --net given and nothing piped on standard input");
            }
            let mut text = String::new();
            stdin.lock().read_to_string(&mut text).context("reading standard input")?;
            Ok(text)
        }
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => match io::stdout().lock().write_all(text.as_bytes()) {
            // A closed pipe (`flowmc check ... | head`) means the reader has seen enough.
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e).context("writing to stdout"),
            _ => Ok(()),
        },
    }
}

fn load(args: &InputArgs) -> anyhow::Result<(PetriNetWithTransits, Option<FlowLtlFormula>)> {
    let text = read_input(args.net.as_ref())?;
    let (net, formula, _) = parse_instance(&text)?;
    let formula = match &args.formula {
        Some(f) => Some(parse_flow_ltl(f)?),
        None => formula,
    };
    Ok((net, formula))
}

fn check(args: &CheckArgs) -> anyhow::Result<u8> {
    let (net, formula) = load(&args.input)?;
    let Some(formula) = formula else {
        bail!("no formula: pass --formula or give an instance with a `.formula` line");
    };
    let verdict = check_flow_ltl(&net, &formula, args.engine.engine())?;
    emit(None, &format!("verdict: {}\n", verdict.label()))?;
    Ok(match verdict {
        FlowVerdict::Verified => 0,
        FlowVerdict::Counterexample(c) => {
            emit(None, &format!("{c}\n"))?;
            1
        }
        FlowVerdict::Inconclusive(why) => {
            eprintln!("{why}");
            2
        }
    })
}

fn transform(args: &InputArgs, aiger: bool) -> anyhow::Result<()> {
    let (net, formula) = load(args)?;
    let n = formula.as_ref().map_or(0, |f| f.flow_subformulas().len());
    let tnet = transform_net(&net, n)?;
    let reduced = formula.map(|f| transform_formula(&net, &f, &tnet)).transpose()?;
    let text = if aiger {
        let comments: Vec<String> = reduced.iter().map(|f| format!("ltl {f}")).collect();
        encode_net(&tnet, &comments)?.to_aiger()
    } else {
        let mut text = tnet.to_text();
        if let Some(f) = reduced {
            text.push_str(&format!("# ltl {f}\n"));
        }
        text
    };
    emit(args.out.as_ref(), &text)
}

fn sdn_encode(args: &SdnArgs) -> anyhow::Result<()> {
    let top = parse_topology(&fs::read_to_string(&args.topology)?)?;
    let cfg = parse_config(&fs::read_to_string(&args.config)?)?;
    let upd = args.update.as_ref().map(fs::read_to_string).transpose()?;
    let upd = upd.map(|u| parse_update(&u)).transpose()?;
    let net = encode_network(&top, &cfg, upd.as_ref())?;
    let spec = match args.requirement {
        Requirement::Connectivity => spec_connectivity(&cfg.egress),
        Requirement::LoopFreedom => spec_loop_freedom(&top.switches, &cfg.egress),
        Requirement::DropFreedom => spec_drop_freedom(&cfg.egress, &forwarding_transitions(&top, &cfg))?,
    };
    let kind = match args.assumption {
        AssumptionKind::WeakFair => Assumption::WeakFair,
        AssumptionKind::StrongFair => Assumption::StrongFair,
        AssumptionKind::InterleavingMax => Assumption::InterleavingMax,
        AssumptionKind::ConcurrencyMax => Assumption::ConcurrencyMax,
    };
    let phi = verification_query(&net, kind, spec);
    emit(args.out.as_ref(), &format!("{}.formula {phi}\n", write_net(&net)))
}

fn generate(family: &Family) -> anyhow::Result<BenchmarkInstance> {
    Ok(match family {
        Family::Sf { n, seed } => gen_sf(*n, *seed)?,
        Family::Rp { n1, n2, version } => gen_rp(*n1, *n2, version.parse::<RpVersion>()?)?,
        Family::Ru { switches, seed, variant } => gen_ru(*switches, *seed, variant.parse::<RuVariant>()?)?,
    })
}

/// Instances of the default campaign: the small rows of every family.
fn campaign(seed: u64) -> anyhow::Result<Vec<BenchmarkInstance>> {
    let mut all = Vec::new();
    for n in 3..=6 {
        all.push(gen_sf(n, seed)?);
    }
    for (n1, n2) in [(1, 1), (2, 1), (2, 2)] {
        for v in [RpVersion::Base, RpVersion::Update, RpVersion::Mutex, RpVersion::Correct] {
            all.push(gen_rp(n1, n2, v)?);
        }
    }
    for s in 0..3 {
        for v in [RuVariant::Egress, RuVariant::Other] {
            all.push(gen_ru(4, seed + s, v)?);
        }
    }
    Ok(all)
}

fn report(args: &ReportArgs) -> anyhow::Result<()> {
    let instances = campaign(args.seed)?;
    let engine = args.engine.engine();
    let next = AtomicUsize::new(0);
    let rows = Mutex::new(Vec::new());
    std::thread::scope(|s| {
        for _ in 0..args.jobs.max(1) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(inst) = instances.get(i) else { break };
                let result = run_benchmark(inst, engine).map(|(row, _)| row);
                eprintln!("{}: {}", inst.name, result.as_ref().map_or("error", |r| r.verdict.as_str()));
                rows.lock().unwrap().push(result);
            });
        }
    });
    let mut rows = rows.into_inner().unwrap().into_iter().collect::<Result<Vec<_>, _>>()?;
    rows.sort_by(|a, b| (&a.benchmark, &a.params).cmp(&(&b.benchmark, &b.params)));
    let mut text = ReportRow::tsv_header() + "\n";
    for r in &rows {
        text.push_str(&r.to_tsv());
        text.push('\n');
    }
    emit(args.out.as_ref(), &text)
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Check(args) => return check(&args),
        Command::Transform(args) => transform(&args, false)?,
        Command::Aiger(args) => transform(&args, true)?,
        Command::Sdn {
            command: SdnCommand::Encode(args),
        } => sdn_encode(&args)?,
        Command::Bench { family, out } => emit(out.as_ref(), &write_instance(&generate(&family)?))?,
        Command::Report(args) => report(&args)?,
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
