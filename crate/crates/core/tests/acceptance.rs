//! Acceptance run: one PASS/FAIL line per criterion.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use parlift::asym::{lift_to_fixpoint, solve_asymmetric, LiftPolicy, TargetRule, VertexSelection};
use parlift::attractor::attractor_through;
use parlift::game::{ParityGame, Player};
use parlift::generate::{enumerate_tiny_games, random_game, DEFAULT_ENUMERATION_CAP};
use parlift::harness::{cross_check, trees_for, CrossCheckOptions, CrossCheckReport};
use parlift::lazy::LazySpace;
use parlift::pgsolver::{parse_pgsolver, serialize_pgsolver, NormalizationNote, PriorityMode};
use parlift::recursive::check_frame_correspondence;
use parlift::tree::{random_shape, OrderedLevelledTree, Shape, TreeChoice, DEFAULT_TREE_CAP};
use parlift::universal_graph::{vertex_count, GraphVertex, LinearGraph, Slot};
use rand::Rng;
use rayon::prelude::*;

struct Line {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

/// Per-game facts gathered from one cross-check.
#[derive(Default)]
struct Facts {
    id: String,
    agreement: bool,
    oracle_used: bool,
    strategies_ok: bool,
    asym_lifts_ok: bool,
    complete: bool,
    below_fixpoints: bool,
    calls_ok: bool,
    equivalence_ok: bool,
    self_loops: bool,
    errors: Vec<String>,
}

impl Facts {
    fn of(g: &ParityGame, r: &CrossCheckReport) -> Self {
        let bound = |prefix: &str| r.bounds.iter().filter(|(k, _)| k.starts_with(prefix)).all(|(_, b)| b.ok);
        Facts {
            id: r.game_id.clone(),
            agreement: r.agreement,
            oracle_used: r.reference == "enumeration",
            strategies_ok: r.strategies.len() >= 2 && r.strategies.values().all(|v| v.passed()),
            asym_lifts_ok: bound("asym-")
                && r.bounds.contains_key("asym-even-lifts")
                && r.bounds.contains_key("asym-odd-lifts"),
            complete: r.symmetric_complete,
            below_fixpoints: r.symmetric_below_fixpoints,
            calls_ok: bound("symmetric-calls") && r.bounds.contains_key("symmetric-calls-by-size"),
            equivalence_ok: r.equivalence.passed(),
            self_loops: has_self_loop(g),
            errors: r.errors.clone(),
        }
    }
}

fn has_self_loop(g: &ParityGame) -> bool {
    g.vertices().any(|v| g.successors(v).contains(&v))
}

/// How many failing games have a self-loop.
fn loop_note(failing_with_loops: usize, failing: usize) -> String {
    if failing == 0 {
        String::new()
    } else {
        format!("; {failing_with_loops} of the {failing} failing games have a self-loop")
    }
}

fn succinct(g: &ParityGame) -> TreeChoice {
    TreeChoice::Succinct(g.len())
}

fn check_all(
    games: Vec<(String, ParityGame)>,
    choice: fn(&ParityGame) -> TreeChoice,
    options: CrossCheckOptions,
) -> Vec<Facts> {
    games
        .into_par_iter()
        .map(|(id, g)| match trees_for(&g, choice(&g), DEFAULT_TREE_CAP) {
            Ok((te, to)) => Facts::of(&g, &cross_check(&id, &g, &te, &to, options)),
            Err(e) => Facts { id, errors: vec![e.to_string()], ..Default::default() },
        })
        .collect()
}

fn failures(facts: &[Facts], ok: impl Fn(&Facts) -> bool) -> Vec<&str> {
    facts.iter().filter(|f| !ok(f)).map(|f| f.id.as_str()).collect()
}

fn summarize(count: usize, bad: &[&str]) -> String {
    if bad.is_empty() {
        format!("{count} runs")
    } else {
        let shown: Vec<&str> = bad.iter().take(5).copied().collect();
        format!("{} of {count} runs fail, e.g. {}", bad.len(), shown.join(", "))
    }
}

fn tiny_corpus() -> Vec<(String, ParityGame)> {
    enumerate_tiny_games(3, 2, 4, DEFAULT_ENUMERATION_CAP)
        .expect("the tiny corpus fits the cap")
        .enumerate()
        .map(|(i, g)| (format!("tiny-{i}"), g))
        .collect()
}

fn random_corpus() -> Vec<(String, ParityGame)> {
    (0..500u64).map(|s| (format!("random-{s}"), common::corpus_game(s))).collect()
}

fn main() -> ExitCode {
    let mut lines = Vec::new();
    let t0 = Instant::now();

    let tiny = tiny_corpus();
    let tiny_count = tiny.len();
    let tiny_facts = check_all(tiny, |_| TreeChoice::Complete(3), CrossCheckOptions::default());
    let random = random_corpus();
    let random_facts =
        check_all(random.clone(), succinct, CrossCheckOptions { oracle_cap: 1 << 12, ..Default::default() });
    eprintln!("corpora checked in {:.1?}", t0.elapsed());

    // 1
    let bad = failures(&tiny_facts, |f| f.agreement && f.oracle_used && f.errors.is_empty());
    lines.push(Line {
        id: 1,
        name: "exhaustive tiny-game agreement with the oracle",
        pass: tiny_count == 110_592 && bad.is_empty(),
        detail: summarize(tiny_count, &bad),
    });

    // 2
    let bad = failures(&random_facts, |f| f.agreement && f.strategies_ok && f.errors.is_empty());
    lines.push(Line {
        id: 2,
        name: "random agreement and winning strategies",
        pass: random_facts.len() == 500 && bad.is_empty(),
        detail: summarize(random_facts.len(), &bad),
    });

    // 3
    let both: Vec<&Facts> = tiny_facts.iter().chain(&random_facts).collect();
    let bad: Vec<&str> = both.iter().filter(|f| !f.asym_lifts_ok).map(|f| f.id.as_str()).collect();
    lines.push(Line {
        id: 3,
        name: "asymmetric lift bound",
        pass: bad.is_empty(),
        detail: summarize(both.len(), &bad),
    });

    // 4
    let bad: Vec<&str> = both.iter().filter(|f| !(f.complete && f.below_fixpoints)).map(|f| f.id.as_str()).collect();
    lines.push(Line {
        id: 4,
        name: "symmetric post-conditions",
        pass: bad.is_empty(),
        detail: summarize(both.len(), &bad),
    });

    // 5
    let bad: Vec<&str> = both.iter().filter(|f| !f.calls_ok).map(|f| f.id.as_str()).collect();
    lines.push(Line {
        id: 5,
        name: "symmetric call bounds",
        pass: bad.is_empty(),
        detail: summarize(both.len(), &bad),
    });

    // 6
    let extra: Vec<(String, ParityGame)> = (0..100u64)
        .map(|s| {
            let mut r = common::rng(1_000 + s);
            let n = r.gen_range(2..=10);
            (format!("equiv-{s}"), random_game(n, r.gen_range(1..=3), r.gen_range(1..=6), 1_000 + s))
        })
        .collect();
    let extra_facts =
        check_all(extra, |_| TreeChoice::Auto, CrossCheckOptions { oracle_cap: 1 << 12, ..Default::default() });
    let six: Vec<&Facts> = tiny_facts.iter().chain(&extra_facts).collect();
    let failing: Vec<&&Facts> = six.iter().filter(|f| !f.equivalence_ok).collect();
    let bad: Vec<&str> = failing.iter().map(|f| f.id.as_str()).collect();
    let note = loop_note(failing.iter().filter(|f| f.self_loops).count(), failing.len());
    lines.push(Line {
        id: 6,
        name: "variant and recursion equivalence",
        pass: bad.is_empty(),
        detail: summarize(six.len(), &bad) + &note,
    });

    lines.push(criterion_7());
    lines.push(criterion_8(&random));
    lines.push(criterion_9());
    lines.push(criterion_10());
    lines.push(criterion_11());

    for l in &lines {
        println!("{} criterion {:>2}: {} ({})", if l.pass { "PASS" } else { "FAIL" }, l.id, l.name, l.detail);
    }
    let failed = lines.iter().filter(|l| !l.pass).count();
    println!("{} of {} criteria pass", lines.len() - failed, lines.len());
    eprintln!("acceptance finished in {:.1?}", t0.elapsed());
    // The report is the product. Set PARLIFT_ACCEPTANCE_STRICT=1 to turn any
    // FAIL line into a failing exit status.
    let strict = std::env::var("PARLIFT_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

fn criterion_7() -> Line {
    let results: Vec<(String, bool, Result<bool, String>)> = (0..50u64)
        .into_par_iter()
        .map(|s| {
            let mut r = common::rng(2_000 + s);
            let n = r.gen_range(4..=12);
            let g = random_game(n, r.gen_range(1..=3), r.gen_range(2..=6), 2_000 + s);
            let id = format!("frames-{s}");
            let out =
                trees_for(&g, TreeChoice::Auto, DEFAULT_TREE_CAP).map_err(|e| e.to_string()).and_then(|(te, to)| {
                    let (se, so) = (LazySpace::new(&te), LazySpace::new(&to));
                    check_frame_correspondence(&g, &se, &so).map(|rep| rep.passed()).map_err(|e| e.to_string())
                });
            (id, has_self_loop(&g), out)
        })
        .collect();
    let failing: Vec<_> = results.iter().filter(|(_, _, r)| !matches!(r, Ok(true))).collect();
    let bad: Vec<&str> = failing.iter().map(|(id, _, _)| id.as_str()).collect();
    let note = loop_note(failing.iter().filter(|(_, l, _)| *l).count(), failing.len());
    Line { id: 7, name: "frame correspondence", pass: bad.is_empty(), detail: summarize(results.len(), &bad) + &note }
}

fn criterion_8(corpus: &[(String, ParityGame)]) -> Line {
    let policies = [
        LiftPolicy::MAX,
        LiftPolicy { selection: VertexSelection::LargestId, target: TargetRule::MinimalStep },
        LiftPolicy { selection: VertexSelection::SmallestId, target: TargetRule::ShortLift },
    ];
    let bad: Vec<&str> = corpus
        .par_iter()
        .filter(|(_, g)| {
            let Ok((te, to)) = trees_for(g, succinct(g), DEFAULT_TREE_CAP) else { return true };
            [te, to].iter().any(|t| {
                let space = LazySpace::new(t);
                let runs: Vec<Option<Vec<parlift::lazy::Pos>>> = policies
                    .iter()
                    .map(|&p| solve_asymmetric(g, &space, p).ok().map(|(mu, _)| mu.positions().to_vec()))
                    .collect();
                runs[0].is_none() || runs.iter().any(|r| r != &runs[0])
            })
        })
        .map(|(id, _)| id.as_str())
        .collect();
    Line { id: 8, name: "lift-order independence", pass: bad.is_empty(), detail: summarize(corpus.len(), &bad) }
}

const CASES: u64 = 1_200;

fn criterion_9() -> Line {
    let flavor = |s: u64| if s.is_multiple_of(2) { Player::Even } else { Player::Odd };
    let check = |offset: u64, case: &(dyn Fn(u64, Player) -> bool + Sync)| -> usize {
        (0..CASES).into_par_iter().filter(|&s| !case(offset + s, flavor(s))).count()
    };

    // destinations only grow when the labelling grows; the fast destination
    // agrees with a scan over all admissible positions
    let monotone = check(10_000, &|s, f| {
        let (g, t) = common::small_instance(s, f);
        let space = LazySpace::new(&t);
        let mut r = common::rng(s);
        let m1 = common::random_labelling(&g, &space, &mut r);
        let m2 = common::raise(&m1, &mut r);
        g.vertices().all(|v| {
            let (d1, d2) = (m1.destination(v), m2.destination(v));
            d1 <= d2 && d1 == m1.destination_bruteforce(v) && d2 == m2.destination_bruteforce(v)
        })
    });

    let min_closed = check(20_000, &|s, f| {
        let (g, t) = common::small_instance(s, f);
        let space = LazySpace::new(&t);
        let mut r = common::rng(s);
        let mut a = common::random_labelling(&g, &space, &mut r);
        let mut b = common::random_labelling(&g, &space, &mut r);
        lift_to_fixpoint(&mut a, LiftPolicy::MAX, &mut |_| {}).unwrap();
        lift_to_fixpoint(&mut b, LiftPolicy::MAX, &mut |_| {}).unwrap();
        a.is_attractor_decomposition()
            && b.is_attractor_decomposition()
            && a.pointwise_min(&b).unwrap().is_attractor_decomposition()
    });

    // u valid in μ and μ′ ≤ μ with μ′(u) = μ(u) ⟹ u valid in μ′
    let transfer = check(30_000, &|s, f| {
        let (g, t) = common::small_instance(s, f);
        let space = LazySpace::new(&t);
        let mut r = common::rng(s);
        let lower = common::random_labelling(&g, &space, &mut r);
        let upper = common::raise(&lower, &mut r);
        g.vertices()
            .filter(|&u| upper.position(u) == lower.position(u) && upper.is_vertex_valid(u))
            .all(|u| lower.is_vertex_valid(u))
    });

    // the least decomposition: each lazy bucket is exactly the attractor to
    // the lower buckets through the buckets up to it, and it lies below
    // every other decomposition
    let minimal = check(40_000, &|s, f| {
        let (g, t) = common::small_instance(s, f);
        let space = LazySpace::new(&t);
        let Ok((mu, _)) = solve_asymmetric(&g, &space, LiftPolicy::MAX) else { return false };
        let mut r = common::rng(s);
        let mut other = common::random_labelling(&g, &space, &mut r);
        lift_to_fixpoint(&mut other, LiftPolicy::MAX, &mut |_| {}).unwrap();
        let exact = (0..space.top()).filter(|&l| space.is_lazy(l)).all(|l| {
            let below = mu.preimage(|p| p < l);
            let through = mu.preimage(|p| p <= l);
            let bucket = mu.preimage(|p| p == l);
            match attractor_through(&g, f, &below, &through) {
                Some(a) => a.set.difference(&below) == bucket,
                None => false,
            }
        });
        exact && mu.lazy_attractor_mismatches().is_empty() && mu.le(&other)
    });

    let counts = [
        ("destination monotonicity", monotone),
        ("pointwise-min closure", min_closed),
        ("validity transfer", transfer),
        ("least decomposition buckets", minimal),
    ];
    let failed: Vec<String> = counts.iter().filter(|(_, c)| *c > 0).map(|(n, c)| format!("{n}: {c}")).collect();
    Line {
        id: 9,
        name: "labelling property suites",
        pass: failed.is_empty(),
        detail: if failed.is_empty() {
            format!("4 suites x {CASES} cases")
        } else {
            format!("failures: {}", failed.join(", "))
        },
    }
}

fn shape_count(s: &Shape, n: usize) -> u128 {
    if s.children.is_empty() {
        1
    } else {
        s.children.iter().map(|c| shape_count(c, n)).sum::<u128>() + (s.children.len() as u128 + 1) * n as u128
    }
}

/// Top-layer ranks in graph order, read off the layout: a gap of `N` fresh
/// vertices, then each copy in turn, each followed by its gap.
fn expected_ranks(s: &Shape, n: usize) -> Vec<u32> {
    if s.children.is_empty() {
        return vec![0];
    }
    let mut out = vec![1; n];
    for (i, c) in s.children.iter().enumerate() {
        let i = i as u32 + 1;
        out.extend(std::iter::repeat_n(2 * i, shape_count(c, n) as usize));
        out.extend(std::iter::repeat_n(2 * i + 1, n));
    }
    out
}

fn criterion_10() -> Line {
    let mut problems = Vec::new();
    let mut r = common::rng(77);
    for k in 0..20 {
        let h = r.gen_range(0..=3);
        let n = r.gen_range(1..=4);
        let shape = random_shape(h, 3, &mut r);
        let t = OrderedLevelledTree::from_shape(Player::Even, h, &shape).unwrap();
        let g = LinearGraph::build(&t, n, DEFAULT_TREE_CAP).unwrap();
        let expected = shape_count(&shape, n);
        if g.len() as u128 != expected || vertex_count(&t, n) != expected {
            problems.push(format!("tree {k}: {} vertices, recurrence gives {expected}", g.len()));
        }
        let ranks: Vec<u32> = (0..g.len()).map(|x| g.rank(x)).collect();
        if ranks != expected_ranks(&shape, n) {
            problems.push(format!("tree {k}: top-layer ranks"));
        }
        for i in 0..=shape.children.len() {
            for l in 0..n {
                if shape.children.is_empty() {
                    continue;
                }
                let x = g.index_of(&GraphVertex { copies: vec![], slot: Slot::Fresh { i, l } });
                if x.map(|x| g.rank(x)) != Some(2 * i as u32 + 1) {
                    problems.push(format!("tree {k}: rank of fresh ({i},{l})"));
                }
            }
        }
        let bound = 2 * n as u128 * t.len() as u128 + t.len() as u128;
        if g.len() as u128 > bound {
            problems.push(format!("tree {k}: {} vertices above {bound}", g.len()));
        }
    }
    let leaf = OrderedLevelledTree::from_shape(Player::Even, 0, &Shape::leaf()).unwrap();
    for n in 1..=4 {
        let g = LinearGraph::build(&leaf, n, DEFAULT_TREE_CAP).unwrap();
        if g.len() != 1 || !g.has_edge(0, 0, 0) || g.has_edge(0, 0, 1) {
            problems.push(format!("height 0 with N = {n}"));
        }
    }
    Line {
        id: 10,
        name: "linear graph counts, ranks and size bound",
        pass: problems.is_empty(),
        detail: if problems.is_empty() { "20 random trees and the height-0 case".into() } else { problems.join("; ") },
    }
}

fn criterion_11() -> Line {
    let mut problems = Vec::new();
    for k in 0..100u64 {
        let mut r = common::rng(5_000 + k);
        let n = r.gen_range(1..=25);
        let sparse = r.gen_bool(0.3);
        let ids: Vec<usize> = (0..n).map(|i| if sparse { 3 * i + 1 } else { i }).collect();
        let lowest = if r.gen_bool(0.5) { 0 } else { 1 };
        let mut text = format!("parity {};\n", ids[n - 1]);
        for i in 0..n {
            let prio = r.gen_range(lowest..=8);
            let owner = r.gen_range(0..=1);
            let deg = r.gen_range(1..=n.min(4));
            let mut succ = rand::seq::index::sample(&mut r, n, deg).into_vec();
            succ.sort_unstable();
            let succ: Vec<String> = succ.iter().map(|&j| ids[j].to_string()).collect();
            text.push_str(&format!("{} {prio} {owner} {}", ids[i], succ.join(",")));
            if r.gen_bool(0.3) {
                text.push_str(&format!(" \"v{i}\""));
            }
            text.push_str(";\n");
        }
        let game = match parse_pgsolver(&text) {
            Ok(g) => g,
            Err(e) => {
                problems.push(format!("file {k}: {e}"));
                continue;
            }
        };
        if serialize_pgsolver(&game, PriorityMode::Original) != text {
            problems.push(format!("file {k}: not reproduced"));
        }
        let note = NormalizationNote::of(&game);
        let has_zero = text.lines().skip(1).any(|l| l.split_whitespace().nth(1) == Some("0"));
        if note.priority_shift != if has_zero { 2 } else { 0 } {
            problems.push(format!("file {k}: shift {}", note.priority_shift));
        }
        let normalized = parse_pgsolver(&serialize_pgsolver(&game, PriorityMode::Normalized)).unwrap();
        let same = game.vertices().all(|v| {
            normalized.priority(v) == game.priority(v)
                && normalized.owner(v) == game.owner(v)
                && normalized.successors(v) == game.successors(v)
        });
        if !same || normalized.priority_shift() != 0 {
            problems.push(format!("file {k}: normalized form differs"));
        }
    }
    Line {
        id: 11,
        name: "PGSolver round trip",
        pass: problems.is_empty(),
        detail: if problems.is_empty() { "100 files".into() } else { problems.join("; ") },
    }
}
