use std::collections::HashMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use parlift::asym::{lift_to_fixpoint, solve_asymmetric, LiftPolicy, TargetRule, VertexSelection};
use parlift::generate::random_game;
use parlift::harness::{cross_check, CrossCheckOptions, CrossCheckReport, DEFAULT_ORACLE_CAP};
use parlift::pgsolver::{parse_pgsolver, serialize_pgsolver, NormalizationNote, PriorityMode};
use parlift::recursive::{solve_universal, zielonka};
use parlift::strategy::{verify_strategy_wins, StrategyVerdict};
use parlift::symmetric::{solve_symmetric, trace_to_svg, EngineOptions, Mode, PairLift, SpacePair};
use parlift::tree::{OrderedLevelledTree, TreeChoice, DEFAULT_TREE_CAP};
use parlift::{LazySpace, ParityGame, Player, PositionalStrategy, Vertex, VertexSet};
use serde::Deserialize;
use serde_json::{json, Value};

/// Parity game solvers built on lifting attractor decompositions.
#[derive(Parser)]
#[command(name = "parlift", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a PGSolver game and print both winning regions.
    Solve(SolveArgs),
    /// Write a random game in PGSolver format.
    Gen(GenArgs),
    /// Check that a strategy file wins from its claimed region.
    Verify(VerifyArgs),
    /// Run every solver and compare (exit 1 on any disagreement or broken bound).
    Crosscheck(CrossArgs),
    /// Solve with the symmetric engine and write its trace.
    Trace(TraceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    AsymEven,
    AsymOdd,
    Symmetric,
    Variant,
    Universal,
    Zielonka,
}

#[derive(Args, Clone)]
struct TreeArgs {
    /// Tree for both flavors: auto, complete[:B], succinct[:N]. A bare kind uses |G|.
    #[arg(long, default_value = "auto")]
    tree: String,
    /// Overrides --tree for the Even tree.
    #[arg(long)]
    even_tree: Option<String>,
    /// Overrides --tree for the Odd tree.
    #[arg(long)]
    odd_tree: Option<String>,
    /// Largest tree (in nodes) that will be built.
    #[arg(long, env = "PARLIFT_TREE_CAP", default_value_t = DEFAULT_TREE_CAP)]
    tree_cap: u128,
}

#[derive(Args)]
struct SolveArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value = "symmetric")]
    algorithm: Algorithm,
    #[command(flatten)]
    trees: TreeArgs,
    /// Lift target for the asymmetric solvers: max, min-step or short.
    #[arg(long, default_value = "max")]
    lift: TargetRule,
    /// Lift the largest invalid vertex first instead of the smallest.
    #[arg(long)]
    largest_first: bool,
    /// Pair lifts of the symmetric solver: short or max.
    #[arg(long, default_value = "short")]
    pair_lift: PairLift,
    /// Print one JSON object instead of the two region lines.
    #[arg(long)]
    json: bool,
    /// Append solver statistics.
    #[arg(long)]
    stats: bool,
    /// Write Even's winning strategy here.
    #[arg(long)]
    even_strategy: Option<PathBuf>,
    /// Write Odd's winning strategy here.
    #[arg(long)]
    odd_strategy: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, short = 'n', default_value_t = 10)]
    vertices: usize,
    #[arg(long, default_value_t = 3)]
    max_degree: usize,
    #[arg(long, default_value_t = 6)]
    max_priority: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout if absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    game: PathBuf,
    strategy: PathBuf,
}

#[derive(Args)]
struct CrossArgs {
    /// Game files. Without them, random games are generated from --seed.
    inputs: Vec<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    count: u64,
    #[arg(long, default_value_t = 8)]
    vertices: usize,
    #[arg(long, default_value_t = 3)]
    max_degree: usize,
    #[arg(long, default_value_t = 6)]
    max_priority: u32,
    #[command(flatten)]
    trees: TreeArgs,
    /// Largest number of strategies the brute-force oracle enumerates.
    #[arg(long, env = "PARLIFT_ORACLE_CAP", default_value_t = DEFAULT_ORACLE_CAP)]
    oracle_cap: u128,
    /// Include wall-clock times (reports are then no longer reproducible).
    #[arg(long)]
    timings: bool,
    /// Write the JSON-lines reports here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TraceMode {
    Symmetric,
    Variant,
}

#[derive(Args)]
struct TraceArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value = "symmetric")]
    mode: TraceMode,
    #[arg(long, default_value = "short")]
    pair_lift: PairLift,
    #[command(flatten)]
    trees: TreeArgs,
    /// JSON-lines trace output; stdout if absent.
    #[arg(long)]
    jsonl: Option<PathBuf>,
    /// SVG rendering of the trace.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Events per SVG panel.
    #[arg(long, default_value_t = 50)]
    window: usize,
}

/// Problems with the input; reported with exit status 2.
#[derive(Debug)]
struct InputError(anyhow::Error);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for InputError {}

fn input<T, E: Into<anyhow::Error>>(r: std::result::Result<T, E>) -> Result<T> {
    r.map_err(|e| InputError(e.into()).into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Gen(a) => generate(a),
        Command::Verify(a) => verify(a),
        Command::Crosscheck(a) => crosscheck(a),
        Command::Trace(a) => trace(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<InputError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn read_game(path: &Path) -> Result<ParityGame> {
    let text = input(fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display())))?;
    input(parse_pgsolver(&text).with_context(|| format!("{}", path.display())))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => io::stdout().write_all(text.as_bytes()).context("cannot write to stdout"),
    }
}

fn tree_choice(s: &str, n: usize) -> Result<TreeChoice> {
    match s {
        "complete" => Ok(TreeChoice::Complete(n.max(1))),
        "succinct" => Ok(TreeChoice::Succinct(n.max(1))),
        _ => input(s.parse::<TreeChoice>()),
    }
}

fn build_trees(game: &ParityGame, t: &TreeArgs) -> Result<(OrderedLevelledTree, OrderedLevelledTree)> {
    let n = game.len();
    let h = game.d() / 2;
    let even = tree_choice(t.even_tree.as_deref().unwrap_or(&t.tree), n)?;
    let odd = tree_choice(t.odd_tree.as_deref().unwrap_or(&t.tree), n)?;
    Ok((input(even.build(Player::Even, h, n, t.tree_cap))?, input(odd.build(Player::Odd, h, n, t.tree_cap))?))
}

fn ids(game: &ParityGame, set: &VertexSet) -> Vec<usize> {
    set.iter().map(|v| game.external_id(v)).collect()
}

fn braces(ids: &[usize]) -> String {
    let parts: Vec<String> = ids.iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

struct Solved {
    even: VertexSet,
    strategies: [Option<PositionalStrategy>; 2],
    stats: Value,
}

fn run_algorithm(game: &ParityGame, a: &SolveArgs) -> Result<Solved> {
    let policy = LiftPolicy {
        selection: if a.largest_first { VertexSelection::LargestId } else { VertexSelection::SmallestId },
        target: a.lift,
    };
    if a.algorithm == Algorithm::Zielonka {
        let w = zielonka(game);
        return Ok(Solved { even: w.even, strategies: [w.even_strategy, w.odd_strategy], stats: json!({}) });
    }
    let (te, to) = build_trees(game, &a.trees)?;
    let (se, so) = (LazySpace::new(&te), LazySpace::new(&to));
    Ok(match a.algorithm {
        Algorithm::AsymEven | Algorithm::AsymOdd => {
            let (space, player) =
                if a.algorithm == Algorithm::AsymEven { (&se, Player::Even) } else { (&so, Player::Odd) };
            let (mu, stats) = solve_asymmetric(game, space, policy)?;
            let mine = mu.below_top();
            let even = if player == Player::Even { mine } else { mine.complement() };
            let mut strategies = [None, None];
            strategies[player.index()] = Some(mu.extract_strategy()?);
            Solved { even, strategies, stats: serde_json::to_value(&stats)? }
        }
        Algorithm::Symmetric | Algorithm::Variant => {
            let mode = if a.algorithm == Algorithm::Variant { Mode::Variant } else { Mode::Symmetric(a.pair_lift) };
            let r = solve_symmetric(game, &se, &so, EngineOptions { mode, ..Default::default() })?;
            // the symmetric labellings need not be valid everywhere; lifting
            // them to their fixpoints is cheap and gives winning strategies
            let mut strategies = [None, None];
            for mut mu in [r.pair.even.clone(), r.pair.odd.clone()] {
                lift_to_fixpoint(&mut mu, LiftPolicy::MAX, &mut |_| {})?;
                strategies[mu.flavor().index()] = Some(mu.extract_strategy()?);
            }
            Solved { even: r.even_region(), strategies, stats: serde_json::to_value(&r.stats)? }
        }
        Algorithm::Universal => {
            let r = solve_universal(game, &te, &to, false)?;
            Solved { even: r.even_region, strategies: [None, None], stats: json!({ "calls": r.calls }) }
        }
        Algorithm::Zielonka => unreachable!(),
    })
}

fn strategy_json(game: &ParityGame, s: &PositionalStrategy, region: &VertexSet) -> Value {
    let choices: Vec<[usize; 2]> = game
        .vertices()
        .filter(|&v| game.owner(v) == s.player && region.contains(v))
        .map(|v| [game.external_id(v), game.external_id(s.edges[v][0])])
        .collect();
    json!({
        "player": s.player,
        "region": ids(game, region),
        "choices": choices,
    })
}

fn solve(a: SolveArgs) -> Result<ExitCode> {
    let game = read_game(&a.input)?;
    let solved = run_algorithm(&game, &a)?;
    let odd = solved.even.complement();
    let (even_ids, odd_ids) = (ids(&game, &solved.even), ids(&game, &odd));

    for (player, path, region) in [(Player::Even, &a.even_strategy, &solved.even), (Player::Odd, &a.odd_strategy, &odd)]
    {
        if let Some(path) = path {
            let s = solved.strategies[player.index()]
                .as_ref()
                .ok_or_else(|| InputError(anyhow!("{:?} does not produce strategies", a.algorithm)))?;
            let text = serde_json::to_string_pretty(&strategy_json(&game, s, region))? + "\n";
            write_out(Some(path), &text)?;
        }
    }

    let out = if a.json {
        let mut v = json!({ "even": even_ids, "odd": odd_ids });
        if a.stats {
            v["stats"] = solved.stats;
            v["normalization"] = serde_json::to_value(NormalizationNote::of(&game))?;
        }
        serde_json::to_string(&v)? + "\n"
    } else {
        let mut s = format!("Even-wins = {}\nOdd-wins = {}\n", braces(&even_ids), braces(&odd_ids));
        if a.stats {
            s.push_str(&format!("stats = {}\n", solved.stats));
        }
        s
    };
    write_out(None, &out)?;
    Ok(ExitCode::SUCCESS)
}

fn generate(a: GenArgs) -> Result<ExitCode> {
    if a.vertices == 0 || a.max_degree == 0 || a.max_priority == 0 {
        return Err(InputError(anyhow!("vertices, max degree and max priority must be positive")).into());
    }
    let g = random_game(a.vertices, a.max_degree, a.max_priority, a.seed);
    write_out(a.output.as_deref(), &serialize_pgsolver(&g, PriorityMode::Original))?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Deserialize)]
struct StrategyFile {
    player: Player,
    region: Vec<usize>,
    choices: Vec<[usize; 2]>,
}

fn verify(a: VerifyArgs) -> Result<ExitCode> {
    let game = read_game(&a.game)?;
    let text = input(fs::read_to_string(&a.strategy).with_context(|| format!("cannot read {}", a.strategy.display())))?;
    let file: StrategyFile = input(serde_json::from_str(&text).context("malformed strategy file"))?;
    let index: HashMap<usize, Vertex> = game.vertices().map(|v| (game.external_id(v), v)).collect();
    let lookup = |id: usize| index.get(&id).copied().ok_or_else(|| InputError(anyhow!("unknown vertex {id}")));
    let mut choice = vec![None; game.len()];
    for [v, w] in file.choices {
        choice[lookup(v)?] = Some(lookup(w)?);
    }
    let region =
        VertexSet::from_vertices(game.len(), file.region.iter().map(|&id| lookup(id)).collect::<Result<Vec<_>, _>>()?);
    let strategy = PositionalStrategy::from_choices(&game, file.player, &choice);
    match input(verify_strategy_wins(&game, &strategy, &region))? {
        StrategyVerdict::Pass => {
            println!("PASS");
            Ok(ExitCode::SUCCESS)
        }
        StrategyVerdict::Fail { priority, vertex } => {
            println!(
                "FAIL: a cycle with top priority {priority} through vertex {} is reachable",
                game.external_id(vertex)
            );
            Ok(ExitCode::FAILURE)
        }
    }
}

fn crosscheck(a: CrossArgs) -> Result<ExitCode> {
    let games: Vec<(String, ParityGame)> = if a.inputs.is_empty() {
        (a.seed..a.seed + a.count)
            .map(|s| {
                (format!("seed-{s}"), random_game(a.vertices.max(1), a.max_degree.max(1), a.max_priority.max(1), s))
            })
            .collect()
    } else {
        a.inputs.iter().map(|p| Ok((p.display().to_string(), read_game(p)?))).collect::<Result<_>>()?
    };
    let options = CrossCheckOptions { oracle_cap: a.oracle_cap, timings: a.timings, ..Default::default() };
    let mut out = String::new();
    let mut failed = 0;
    for (id, g) in &games {
        let (te, to) = build_trees(g, &a.trees)?;
        let report: CrossCheckReport = cross_check(id, g, &te, &to, options);
        if !report.ok() {
            failed += 1;
        }
        out.push_str(&serde_json::to_string(&report)?);
        out.push('\n');
    }
    write_out(a.output.as_deref(), &out)?;
    eprintln!("{} of {} games agree", games.len() - failed, games.len());
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn trace(a: TraceArgs) -> Result<ExitCode> {
    let game = read_game(&a.input)?;
    let (te, to) = build_trees(&game, &a.trees)?;
    let (se, so) = (LazySpace::new(&te), LazySpace::new(&to));
    let mode = match a.mode {
        TraceMode::Symmetric => Mode::Symmetric(a.pair_lift),
        TraceMode::Variant => Mode::Variant,
    };
    let r = solve_symmetric(&game, &se, &so, EngineOptions { mode, record_trace: true, ..Default::default() })?;
    write_out(a.jsonl.as_deref(), &r.trace.to_jsonl())?;
    if let Some(path) = &a.svg {
        if a.window == 0 {
            bail!(InputError(anyhow!("--window must be positive")));
        }
        write_out(Some(path), &trace_to_svg(&r.trace, &SpacePair { even: &se, odd: &so }, a.window))?;
    }
    Ok(ExitCode::SUCCESS)
}
