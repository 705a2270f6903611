use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use injhom::catalog::{
    colour_label, enumerate_reflexive_tournaments, named_target_by_str, parse_colour, Target,
};
use injhom::digraph::{parse_document, parse_graph, serialize_graph, Direction, InjectivityMode};
use injhom::gadgets::{
    all_cases, check_cases, AssetStore, CheckCase, CHECKS, DEFAULT_VERIFY_BUDGET,
};
use injhom::poly::{decide_small_target, SmallTargetAnswer};
use injhom::reductions::{
    build_ios_collapse, build_ios_t4, build_ios_t5, build_iot_collapse, build_iot_t4, build_iot_t5,
    extract_edge_colouring, extract_inner_colouring, three_edge_colouring_oracle,
    ReductionInstance, ReductionKind, UndirectedGraph,
};
use injhom::selfcheck::{run_criterion, SelfcheckConfig, CRITERIA, DEFAULT_SEED};
use injhom::solver::{decide, enumerate, SolveOptions, SolveResult, SolveStatus};

// Like println!, but a closed pipe (`| head`) ends the process quietly
// instead of panicking.
macro_rules! out {
    ($($arg:tt)*) => {
        if writeln!(std::io::stdout(), $($arg)*).is_err() {
            std::process::exit(141);
        }
    };
}

#[derive(Parser)]
#[command(
    name = "injhom",
    version,
    about = "Locally-injective homomorphisms to reflexive tournaments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide or enumerate colourings of a graph into a target.
    Solve(SolveArgs),
    /// Build a reduction instance and its `.map` sidecar.
    Reduce(ReduceArgs),
    /// Check gadget assets against their contracts.
    VerifyGadget(VerifyArgs),
    /// List, show or inspect reflexive tournaments.
    Catalog(CatalogArgs),
    /// Decide 3-edge-colourability of a subcubic graph.
    Oracle(OracleArgs),
    /// Run the acceptance battery.
    Selfcheck(SelfcheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    In,
    Ios,
    Iot,
}

impl From<ModeArg> for InjectivityMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::In => InjectivityMode::InOnly,
            ModeArg::Ios => InjectivityMode::IosSeparate,
            ModeArg::Iot => InjectivityMode::IotTogether,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Out,
    In,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    /// Target name (C3, TT<n>, T4, T5, R<n>.<i>) or edge-list file.
    #[arg(long)]
    target: String,
    #[arg(long, value_enum, default_value = "ios")]
    mode: ModeArg,
    /// Number of witnesses to list, or `all`.
    #[arg(long)]
    enumerate: Option<String>,
    /// One witness per orbit of the target's automorphism group.
    #[arg(long)]
    mod_aut: bool,
    /// Pre-colour a vertex, as `v=c`.
    #[arg(long, value_name = "V=C")]
    fixed: Vec<String>,
    /// Use the two-colour decider; the target must have at most 2 vertices.
    #[arg(long)]
    fast_small: bool,
    /// Search node budget.
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long)]
    kind: String,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Tournament for collapse reductions (name or edge-list file).
    #[arg(long)]
    target: Option<String>,
    /// Pivot vertex for collapse reductions, as a letter or id.
    #[arg(long)]
    pivot: Option<String>,
    #[arg(long, value_enum, default_value = "out")]
    direction: DirectionArg,
    /// Also solve the instance and print the source solution read off it.
    #[arg(long)]
    solve: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Gadget whose sidecar contract to verify.
    #[arg(long)]
    gadget: Option<String>,
    /// Named check (see --list).
    #[arg(long, alias = "lemma")]
    check: Option<String>,
    /// Every named check and every sidecar contract.
    #[arg(long)]
    all: bool,
    /// List the named checks.
    #[arg(long)]
    list: bool,
    #[arg(long, default_value_t = DEFAULT_VERIFY_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct CatalogArgs {
    /// Vertex count, as `n=<k>` or `<k>`.
    #[arg(long)]
    list: Option<String>,
    /// Print a target's arcs and properties.
    #[arg(long)]
    show: Option<String>,
    /// Print a target's automorphisms.
    #[arg(long)]
    aut: Option<String>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct SelfcheckArgs {
    /// Smaller batteries; skips the Petersen-scale cases.
    #[arg(long)]
    quick: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

/// Exit statuses: 0 success, 1 a well-formed negative answer, 2 error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Yes,
    No,
}

type CmdResult = Result<Outcome, String>;

fn err(e: impl Display) -> String {
    e.to_string()
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_target(spec: &str) -> Result<Target, String> {
    let path = Path::new(spec);
    if path.is_file() {
        let doc = parse_document(&read(path)?).map_err(|e| format!("{spec}: {e}"))?;
        let name = doc
            .comments
            .iter()
            .find_map(|c| c.trim().strip_prefix("target ").map(str::to_string))
            .or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()))
            .unwrap_or_else(|| spec.to_string());
        return Ok(Target::new(name, doc.graph));
    }
    named_target_by_str(spec).map_err(err)
}

fn parse_vertex_colour(s: &str) -> Result<(usize, usize), String> {
    let bad = || format!("expected v=c, got `{s}`");
    let (v, c) = s.split_once('=').ok_or_else(bad)?;
    Ok((
        v.trim().parse().map_err(|_| bad())?,
        parse_colour(c.trim()).ok_or_else(bad)?,
    ))
}

fn print_result(r: &SolveResult) -> CmdResult {
    match r.status {
        SolveStatus::BudgetExhausted => {
            out!("BudgetExhausted after {} nodes", r.stats.nodes);
            Err("node budget exhausted before a decision".into())
        }
        SolveStatus::Unsat => {
            out!("Unsat");
            Ok(Outcome::No)
        }
        SolveStatus::Sat => {
            out!("Sat");
            for (i, w) in r.witnesses.iter().enumerate() {
                match r.orbit_sizes.get(i) {
                    Some(size) => out!("{}  # orbit {size}", w.witness_line()),
                    None => out!("{}", w.witness_line()),
                }
            }
            Ok(Outcome::Yes)
        }
    }
}

fn cmd_solve(a: SolveArgs) -> CmdResult {
    let g = parse_graph(&read(&a.input)?).map_err(|e| format!("{}: {e}", a.input.display()))?;
    let t = load_target(&a.target)?;
    let mode = InjectivityMode::from(a.mode);
    let fixed: BTreeMap<usize, usize> = a
        .fixed
        .iter()
        .map(|s| parse_vertex_colour(s))
        .collect::<Result<_, _>>()?;
    let plain = a.enumerate.is_none() && !a.mod_aut && fixed.is_empty();
    if a.fast_small && (t.vertex_count() > 2 || !plain) {
        return Err("--fast-small needs a target with at most 2 vertices and no --enumerate, --mod-aut or --fixed".into());
    }
    if plain && t.vertex_count() <= 2 {
        return match decide_small_target(&g, &t, mode).map_err(err)? {
            SmallTargetAnswer::Sat(f) => {
                out!("Sat");
                out!("{}", f.witness_line());
                Ok(Outcome::Yes)
            }
            SmallTargetAnswer::Unsat => {
                out!("Unsat");
                Ok(Outcome::No)
            }
        };
    }
    let mut options = SolveOptions::new(mode).with_fixed(fixed);
    options.node_budget = a.budget;
    options.modulo_automorphisms = a.mod_aut;
    let result = match a.enumerate.as_deref() {
        None if !a.mod_aut => decide(&g, &t, &options),
        limit => {
            if let Some(l) = limit.filter(|l| *l != "all") {
                options.limit =
                    Some(l.parse().map_err(|_| {
                        format!("--enumerate expects a number or `all`, got `{l}`")
                    })?);
            }
            enumerate(&g, &t, &options)
        }
    }
    .map_err(err)?;
    print_result(&result)
}

fn build_reduction(
    a: &ReduceArgs,
    kind: ReductionKind,
    store: &AssetStore,
) -> Result<ReductionInstance, String> {
    let text = read(&a.input)?;
    let located = |e: &dyn Display| format!("{}: {e}", a.input.display());
    if kind.is_edge_kind() {
        let g = UndirectedGraph::parse(&text).map_err(|e| located(&e))?;
        let build = if kind == ReductionKind::IosT4 {
            build_ios_t4
        } else {
            build_iot_t4
        };
        return build(&g, store).map_err(err);
    }
    let g = parse_graph(&text).map_err(|e| located(&e))?;
    match kind {
        ReductionKind::IosT5 => build_ios_t5(&g, store).map_err(err),
        ReductionKind::IotT5 => build_iot_t5(&g, store).map_err(err),
        _ => {
            let t = load_target(
                a.target
                    .as_deref()
                    .ok_or("collapse reductions need --target")?,
            )?;
            let pivot = a
                .pivot
                .as_deref()
                .ok_or("collapse reductions need --pivot")?;
            let v = parse_colour(pivot).ok_or_else(|| format!("bad pivot `{pivot}`"))?;
            let dir = match a.direction {
                DirectionArg::Out => Direction::Out,
                DirectionArg::In => Direction::In,
            };
            let build = if kind == ReductionKind::CollapseIos {
                build_ios_collapse
            } else {
                build_iot_collapse
            };
            build(&g, &t, v, dir).map_err(err)
        }
    }
}

fn cmd_reduce(a: ReduceArgs) -> CmdResult {
    let kind = ReductionKind::parse(&a.kind)
        .ok_or_else(|| format!("unknown reduction kind `{}`", a.kind))?;
    let store = AssetStore::from_env();
    let ri = build_reduction(&a, kind, &store)?;
    let header = format!(
        "# {} instance, target {}, mode {}\n",
        ri.kind,
        ri.target.name(),
        ri.mode.short_name()
    );
    fs::write(&a.output, header + &serialize_graph(&ri.graph) + "\n").map_err(err)?;
    let mut map_path = a.output.clone().into_os_string();
    map_path.push(".map");
    fs::write(&map_path, ri.map_text() + "\n").map_err(err)?;
    out!("{}", ri.summary());
    out!(
        "wrote {} and {}",
        a.output.display(),
        Path::new(&map_path).display()
    );
    if !a.solve {
        return Ok(Outcome::Yes);
    }
    let r = decide(&ri.graph, &ri.target, &SolveOptions::new(ri.mode)).map_err(err)?;
    if r.status != SolveStatus::Sat {
        return print_result(&r);
    }
    out!("Sat");
    let f = &r.witnesses[0];
    if kind.is_edge_kind() {
        let g = UndirectedGraph::new(ri.source_vertices, ri.source_edges.iter().copied())
            .map_err(err)?;
        let ec = extract_edge_colouring(&ri, f).map_err(err)?;
        out!("edge colouring: {}", ec.describe(&g));
    } else {
        let inner = extract_inner_colouring(&ri, f).map_err(err)?;
        let st = ri
            .source_target
            .as_ref()
            .expect("ring and collapse kinds have a source target");
        out!("{} colouring: {}", st.target.name(), inner.witness_line());
    }
    Ok(Outcome::Yes)
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    if a.list {
        for info in CHECKS {
            out!(
                "{:<10} [{}] {}",
                info.name,
                info.gadgets.join(", "),
                info.summary
            );
        }
        return Ok(Outcome::Yes);
    }
    let store = AssetStore::from_env();
    let cases: Vec<CheckCase> = match (&a.gadget, &a.check, a.all) {
        (_, _, true) => all_cases(&store).map_err(err)?,
        (gadget, Some(check), false) => {
            if let Some(g) = gadget {
                let info = CHECKS
                    .iter()
                    .find(|c| c.name == check)
                    .ok_or_else(|| format!("unknown check `{check}`"))?;
                if !info.gadgets.contains(&g.as_str()) {
                    return Err(format!("check `{check}` does not involve gadget `{g}`"));
                }
            }
            check_cases(&store, check).map_err(err)?
        }
        (Some(g), None, false) => {
            let spec = store.load_gadget(g).map_err(err)?;
            vec![CheckCase {
                id: spec.name.clone(),
                graph: spec.graph.clone(),
                scope: spec.scope(),
                contract: spec.contract.clone(),
            }]
        }
        (None, None, false) => return Err("give --gadget, --check, --all or --list".into()),
    };
    let (mut failed, mut inconclusive) = (Vec::new(), Vec::new());
    for case in &cases {
        let report = case.verify(Some(a.budget)).map_err(err)?;
        out!("{}", report.table());
        if report.inconclusive() {
            inconclusive.push(report.id.clone());
        } else if !report.passed() {
            failed.push(report.id.clone());
        }
    }
    if !inconclusive.is_empty() {
        return Err(format!("budget exhausted on: {}", inconclusive.join(", ")));
    }
    if failed.is_empty() {
        out!("all {} contracts pass", cases.len());
        Ok(Outcome::Yes)
    } else {
        out!("failed: {}", failed.join(", "));
        Ok(Outcome::No)
    }
}

fn cmd_catalog(a: CatalogArgs) -> CmdResult {
    if let Some(list) = a.list {
        let n: usize = list
            .trim_start_matches("n=")
            .parse()
            .map_err(|_| format!("--list expects n=<k>, got `{list}`"))?;
        let targets = enumerate_reflexive_tournaments(n).map_err(err)?;
        out!("{} tournaments on {n} vertices", targets.len());
        for t in &targets {
            let p = t.degree_profile();
            let outs: Vec<String> = p.degrees.iter().map(|d| d.1.to_string()).collect();
            out!(
                "{:<7} key={} out-degrees={} strong={} high-degree={}",
                t.name(),
                t.canonical_form().map_err(err)?.to_hex(),
                outs.join(","),
                t.graph().is_strongly_connected(),
                !p.high_degree.is_empty()
            );
        }
    } else if let Some(name) = a.show {
        let t = load_target(&name)?;
        out!("{}", t.to_document().trim_end_matches('\n'));
        out!();
        out!("reflexive tournament: {}", t.is_reflexive_tournament());
        out!("strongly connected: {}", t.graph().is_strongly_connected());
        out!(
            "vertex-transitive: {}",
            t.is_vertex_transitive().map_err(err)?
        );
        let p = t.degree_profile();
        let degrees: Vec<String> = p
            .degrees
            .iter()
            .enumerate()
            .map(|(v, (i, o))| format!("{}:{i}/{o}", colour_label(v)))
            .collect();
        out!("in/out degrees: {}", degrees.join(" "));
    } else if let Some(name) = a.aut {
        let t = load_target(&name)?;
        let auts = t.automorphisms().map_err(err)?;
        out!("{} automorphisms", auts.len());
        for p in auts {
            let pairs: Vec<String> = p
                .iter()
                .enumerate()
                .map(|(v, &w)| format!("{}->{}", colour_label(v), colour_label(w)))
                .collect();
            out!("{}", pairs.join(" "));
        }
    } else {
        return Err("give --list, --show or --aut".into());
    }
    Ok(Outcome::Yes)
}

fn cmd_oracle(a: OracleArgs) -> CmdResult {
    let g = UndirectedGraph::parse(&read(&a.input)?)
        .map_err(|e| format!("{}: {e}", a.input.display()))?;
    match three_edge_colouring_oracle(&g).map_err(err)? {
        Some(ec) => {
            out!("colourable");
            out!("{}", ec.describe(&g));
            Ok(Outcome::Yes)
        }
        None => {
            out!("not colourable");
            Ok(Outcome::No)
        }
    }
}

fn cmd_selfcheck(a: SelfcheckArgs) -> CmdResult {
    let mut config = SelfcheckConfig::new(AssetStore::from_env());
    config.quick = a.quick;
    config.seed = a.seed;
    let mut failed = Vec::new();
    for c in CRITERIA {
        let report = run_criterion(c, &config);
        out!("{}", report.line());
        if !report.passed {
            failed.push(format!("{} {}", report.id, report.name));
        }
    }
    if failed.is_empty() {
        out!("all {} criteria pass", CRITERIA.len());
        Ok(Outcome::Yes)
    } else {
        out!("failed: {}", failed.join(", "));
        Ok(Outcome::No)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Reduce(a) => cmd_reduce(a),
        Command::VerifyGadget(a) => cmd_verify(a),
        Command::Catalog(a) => cmd_catalog(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Selfcheck(a) => cmd_selfcheck(a),
    };
    match result {
        Ok(Outcome::Yes) => ExitCode::SUCCESS,
        Ok(Outcome::No) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
