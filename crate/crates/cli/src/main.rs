//! `dyncond`: run the inference engines from the command line.
//!
//! Exit codes: 0 success, 1 usage, 2 bad input, 3 structural mismatch
//! (e.g. the polytree engine on a loopy network), 4 inconsistent
//! ε-abstraction.

use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dyncond::bcond::{Method, SweepTable};
use dyncond::cutset::{cutset_conditioning_beliefs, ConditionedNetwork};
use dyncond::model::format::format_decimal;
use dyncond::netgen::{Family, GeneratorSpec};
use dyncond::{
    epsilon_sweep, find_loop_cutset, oracle_marginals, parse_network, serialize_network, CutsetAnalysis, DynamicEngine,
    Error, Findings, Instantiation, LoopCutset, Network, PolytreeState, SupportVector, VarId,
};

#[derive(Parser)]
#[command(
    name = "dyncond",
    version,
    about = "Exact and bounded inference on discrete Bayesian networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Beliefs Pr(x, e), posteriors and Pr(e).
    Query(QueryArgs),
    /// Lower and upper bounds from ε-abstraction.
    Bound(BoundArgs),
    /// Loop cutset, relevant and local cutsets per variable.
    Analyze(AnalyzeArgs),
    /// Write a generated network in .bnet form.
    Gen(GenArgs),
    /// Operation counts across network sizes.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Oracle,
    Polytree,
    Cutset,
    Dynamic,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    DiamondLadder,
    Adder,
    Random,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::DiamondLadder => Family::DiamondLadder,
            FamilyArg::Adder => Family::Adder,
            FamilyArg::Random => Family::Random,
        }
    }
}

#[derive(Args, Clone)]
struct GeneratorArgs {
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Rungs, adder bits or variable count.
    #[arg(long)]
    size: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.01)]
    noise: f64,
    #[arg(long, default_value_t = 3)]
    max_parents: usize,
    #[arg(long, default_value_t = 2)]
    extra_edges: usize,
    #[arg(long, default_value_t = 2)]
    min_card: usize,
    #[arg(long, default_value_t = 2)]
    max_card: usize,
    #[arg(long, default_value_t = 0.0)]
    zero_rate: f64,
}

impl GeneratorArgs {
    fn spec(&self, family: FamilyArg, size: usize) -> GeneratorSpec {
        GeneratorSpec {
            family: family.into(),
            size,
            seed: self.seed,
            noise: self.noise,
            max_parents: self.max_parents,
            extra_edges: self.extra_edges,
            cardinality: self.min_card..=self.max_card,
            zero_entry_rate: self.zero_rate,
        }
    }
}

#[derive(Args)]
struct NetArgs {
    /// Network file in .bnet format.
    #[arg(long)]
    net: Option<PathBuf>,
    #[command(flatten)]
    generator: GeneratorArgs,
}

#[derive(Args)]
struct QueryArgs {
    #[command(flatten)]
    source: NetArgs,
    #[arg(long, value_enum, default_value = "dynamic")]
    algo: Algo,
    /// Query variable; repeatable.
    #[arg(long = "target")]
    targets: Vec<String>,
    /// Query every variable.
    #[arg(long)]
    all: bool,
    /// Observation `name=value`; repeatable or comma separated.
    #[arg(long, value_delimiter = ',')]
    evidence: Vec<String>,
    /// Loop cutset override, comma separated.
    #[arg(long, value_delimiter = ',')]
    cutset: Vec<String>,
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    source: NetArgs,
    #[arg(long)]
    target: String,
    #[arg(long, value_delimiter = ',')]
    evidence: Vec<String>,
    #[arg(long, conflicts_with = "sweep", required_unless_present = "sweep")]
    epsilon: Option<f64>,
    /// Descending list of ε values.
    #[arg(long, value_delimiter = ',')]
    sweep: Vec<f64>,
    /// Compute the pruned sums by enumeration instead of dynamic conditioning.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    source: NetArgs,
    #[arg(long, value_delimiter = ',')]
    cutset: Vec<String>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    generator: GeneratorArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BenchAlgo {
    Cutset,
    Dynamic,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    generator: GeneratorArgs,
    /// Sizes as `lo..hi` (inclusive) or a comma list.
    #[arg(long, value_parser = parse_sizes)]
    sizes: Sizes,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "cutset,dynamic")]
    algos: Vec<BenchAlgo>,
}

#[derive(Clone, Debug)]
struct Sizes(Vec<usize>);

fn parse_sizes(s: &str) -> Result<Sizes, String> {
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|e| format!("{e}"))?;
        let hi: usize = hi.trim().trim_start_matches('=').parse().map_err(|e| format!("{e}"))?;
        if lo > hi {
            return Err(format!("empty range {s}"));
        }
        return Ok(Sizes(RangeInclusive::new(lo, hi).collect()));
    }
    s.split(',')
        .map(|t| t.trim().parse().map_err(|e| format!("`{t}`: {e}")))
        .collect::<Result<_, _>>()
        .map(Sizes)
}

/// Failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match &e {
            Error::AbstractionInconsistent(_) => 4,
            e if e.is_structural() => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn load(source: &NetArgs) -> CliResult<Network> {
    match (&source.net, source.generator.family) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure {
                code: 2,
                message: format!("{}: {e}", path.display()),
            })?;
            Ok(parse_network(&text)?)
        }
        (None, Some(family)) => {
            let size = source.generator.size.ok_or_else(|| usage("--family needs --size"))?;
            Ok(source.generator.spec(family, size).generate()?)
        }
        (Some(_), Some(_)) => Err(usage("give either --net or --family, not both")),
        (None, None) => Err(usage(
            "a network is required: --net <file> or --family <name> --size <n>",
        )),
    }
}

fn parse_evidence(net: &Network, items: &[String]) -> CliResult<Instantiation> {
    let mut pairs = Vec::new();
    for item in items.iter().filter(|s| !s.is_empty()) {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| usage(format!("evidence `{item}` is not name=value")))?;
        pairs.push((name.trim(), value.trim()));
    }
    Ok(net.instantiation(&pairs)?)
}

fn parse_cutset(net: &Network, names: &[String]) -> CliResult<Option<LoopCutset>> {
    if names.is_empty() {
        return Ok(None);
    }
    let vars = names
        .iter()
        .map(|n| net.var_id(n.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Some(LoopCutset::new(net, &vars)?))
}

fn var_list(net: &Network, vars: &[VarId]) -> String {
    let names: Vec<&str> = vars.iter().map(|&v| net.name(v)).collect();
    format!("{{{}}}", names.join(","))
}

fn support_line(out: &mut String, tag: &str, net: &Network, s: &SupportVector) {
    let var = net.variable(s.var);
    let _ = write!(out, "{tag} {}", var.name);
    for (name, p) in var.value_names.iter().zip(&s.values) {
        let _ = write!(out, " {name}={}", format_decimal(*p));
    }
    out.push('\n');
}

fn query(args: &QueryArgs) -> CliResult<String> {
    let net = load(&args.source)?;
    let evidence = parse_evidence(&net, &args.evidence)?;
    let cutset = parse_cutset(&net, &args.cutset)?;
    let targets: Vec<VarId> = if args.all {
        (0..net.len()).collect()
    } else if args.targets.is_empty() {
        return Err(usage("give --target <name> or --all"));
    } else {
        args.targets.iter().map(|t| net.var_id(t)).collect::<Result<_, _>>()?
    };
    let findings = Findings::from_evidence(&net, &evidence)?;
    let mut stats = Vec::new();
    let beliefs: Vec<SupportVector> = match args.algo {
        Algo::Oracle => {
            let all = oracle_marginals(&net, &findings)?;
            targets.iter().map(|&t| all[t].clone()).collect()
        }
        Algo::Polytree => {
            let cn = ConditionedNetwork::unconditioned(&net, &findings);
            let mut state = PolytreeState::new(&cn)?;
            targets.iter().map(|&t| state.belief(t)).collect::<Result<_, _>>()?
        }
        Algo::Cutset => {
            let cutset = cutset.unwrap_or_else(|| find_loop_cutset(&net));
            let only = (targets.len() == 1).then(|| targets[0]);
            let (all, cases) = cutset_conditioning_beliefs(&net, &findings, Some(&cutset), only)?;
            stats.push(("cutset".to_string(), var_list(&net, cutset.vars())));
            stats.push(("cases".to_string(), cases.to_string()));
            targets.iter().map(|&t| all[t].clone()).collect()
        }
        Algo::Dynamic => {
            let mut engine = match cutset {
                Some(c) => DynamicEngine::with_cutset(&net, findings, c),
                None => DynamicEngine::new(&net, findings),
            };
            let out = targets
                .iter()
                .map(|&t| engine.belief(t))
                .collect::<Result<Vec<_>, _>>()?;
            let s = engine.stats();
            stats.push(("cutset".to_string(), var_list(&net, engine.analysis().cutset.vars())));
            for (k, v) in [
                ("messages_computed", s.messages_computed),
                ("cache_hits", s.cache_hits),
                ("cache_misses", s.cache_misses),
                ("supports_computed", s.supports_computed),
                ("support_cache_hits", s.support_cache_hits),
                ("conditioning_cases_expanded", s.conditioning_cases_expanded),
                ("max_messages_per_arc", s.max_per_arc()),
            ] {
                stats.push((k.to_string(), v.to_string()));
            }
            out
        }
    };
    let mut out = String::new();
    let pr_e: f64 = beliefs[0].total();
    for b in &beliefs {
        support_line(&mut out, "BEL", &net, b);
        support_line(&mut out, "POST", &net, &b.normalized());
    }
    let _ = writeln!(out, "pr_e={}", format_decimal(pr_e));
    for (k, v) in stats {
        let _ = writeln!(out, "{k}={v}");
    }
    Ok(out)
}

fn bound(args: &BoundArgs) -> CliResult<String> {
    let net = load(&args.source)?;
    let evidence = parse_evidence(&net, &args.evidence)?;
    let target = net.var_id(&args.target)?;
    let epsilons = match args.epsilon {
        Some(e) => vec![e],
        None => args.sweep.clone(),
    };
    let method = if args.oracle { Method::Oracle } else { Method::Dynamic };
    for v in evidence.vars().filter(|&v| !net.parents(v).is_empty()) {
        eprintln!(
            "warning: evidence on non-root `{}` is ignored by the propagation; bounds may be loose",
            net.name(v)
        );
    }
    let rows = epsilon_sweep(&net, target, &evidence, &epsilons, method)?;
    Ok(SweepTable { net: &net, rows: &rows }.to_string())
}

fn analyze(args: &AnalyzeArgs) -> CliResult<String> {
    let net = load(&args.source)?;
    let cutset = parse_cutset(&net, &args.cutset)?.unwrap_or_else(|| find_loop_cutset(&net));
    let a = CutsetAnalysis::new(&net, cutset);
    let mut out = String::new();
    let _ = writeln!(out, "cutset={}", var_list(&net, a.cutset.vars()));
    let arcs: Vec<String> = a
        .structure
        .absorbed_arcs()
        .iter()
        .map(|&(p, c)| format!("{}->{}", net.name(p), net.name(c)))
        .collect();
    let _ = writeln!(out, "absorbed={{{}}}", arcs.join(","));
    for x in 0..net.len() {
        let ok = a.verify(&net, x).iter().all(|&b| b);
        let _ = writeln!(
            out,
            "{} R+={} R-={} C={} C+={} C-={} verified={}",
            net.name(x),
            var_list(&net, a.relevant.pi_support(x)),
            var_list(&net, a.relevant.lambda_support(x)),
            var_list(&net, a.local.belief(x)),
            var_list(&net, a.local.causal(x)),
            var_list(&net, a.local.diagnostic(x)),
            if ok { "yes" } else { "no" }
        );
    }
    Ok(out)
}

fn generate(args: &GenArgs) -> CliResult<String> {
    let family = args.generator.family.ok_or_else(|| usage("gen needs --family"))?;
    let size = args.generator.size.ok_or_else(|| usage("gen needs --size"))?;
    Ok(serialize_network(&args.generator.spec(family, size).generate()?))
}

fn bench(args: &BenchArgs) -> CliResult<String> {
    let family = args.generator.family.ok_or_else(|| usage("bench needs --family"))?;
    let mut out = String::from("algo\tsize\tmessages\tcases\twall_ms\n");
    for &size in &args.sizes.0 {
        let net = args.generator.spec(family, size).generate()?;
        let target = net.len() - 1;
        for &algo in &args.algos {
            let start = Instant::now();
            let (messages, cases) = match algo {
                BenchAlgo::Cutset => {
                    let (_, cases) = cutset_conditioning_beliefs(&net, &Findings::none(&net), None, Some(target))?;
                    ("-".to_string(), cases.to_string())
                }
                BenchAlgo::Dynamic => {
                    let mut engine = DynamicEngine::new(&net, Findings::none(&net));
                    engine.belief(target)?;
                    let s = engine.stats();
                    (
                        s.messages_computed.to_string(),
                        s.conditioning_cases_expanded.to_string(),
                    )
                }
            };
            let ms = start.elapsed().as_secs_f64() * 1e3;
            let name = if algo == BenchAlgo::Cutset { "cutset" } else { "dynamic" };
            let _ = writeln!(out, "{name}\t{size}\t{messages}\t{cases}\t{ms:.3}");
        }
    }
    Ok(out)
}

fn run(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::Query(a) => query(a),
        Command::Bound(a) => bound(a),
        Command::Analyze(a) => analyze(a),
        Command::Gen(a) => generate(a),
        Command::Bench(a) => bench(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
