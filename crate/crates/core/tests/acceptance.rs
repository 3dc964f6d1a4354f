//! Acceptance gate. Each test checks one criterion and writes a single
//! `criterion N ... PASS|FAIL` line to stderr, uncaptured, before asserting.
//! The tournament criteria take several minutes each.

use std::io::Write;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ubfm::eval::{generate_eval_sets, Evaluator};
use ubfm::game::{game_by_name, random_playout, Game, GameState, BREAKTHROUGH5, CONNECT5X4, HEX5, OTHELLO6, TICTACTOE};
use ubfm::harness::{
    bootstrap_ci, enumerate_matches, run_tournament, seeded_setup, stratified_mean, trace_backprop, EvalParams,
    TournamentConfig, TournamentReport, VariantSpec,
};
use ubfm::oracle::Oracle;
use ubfm::search::{Preset, SearchConfig, Searcher, TieBreak};

fn verdict(n: u32, name: &str, pass: bool, detail: &str) {
    let line = format!("criterion {n} [{name}]: {} ({detail})\n", if pass { "PASS" } else { "FAIL" });
    std::io::stderr().write_all(line.as_bytes()).unwrap();
    assert!(pass, "criterion {n} failed: {detail}");
}

/// Non-terminal positions reached by random play over a third to a half of
/// the board.
fn mid_game_positions(game: &'static dyn Game, count: usize, seed: u64) -> Vec<GameState> {
    let cells = game.descriptor().cells();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let plies = rng.gen_range(cells / 3..=cells / 2);
        let s = random_playout(game, plies, &mut rng);
        if !game.is_terminal(&s) {
            out.push(s);
        }
    }
    out
}

fn member_eval(game: &'static dyn Game, seed: u64) -> Evaluator {
    Evaluator::new(generate_eval_sets(game, 1, 2, seed).unwrap().remove(0).members.remove(0))
}

const SOUNDNESS_BUDGET: u64 = 1_000_000;
const POSITIONS: usize = 50;

#[test]
fn criterion_1_resolved_nodes_match_the_oracle() {
    let mut mismatches = 0;
    let mut checked = 0;
    let mut resolved_roots = 0;
    for game in [&TICTACTOE as &'static dyn Game, &HEX5, &CONNECT5X4] {
        let mut oracle = Oracle::new(game);
        for (i, state) in mid_game_positions(game, POSITIONS, 101).into_iter().enumerate() {
            let config = SearchConfig::preset(Preset::UbfmRef).with_iterations(SOUNDNESS_BUDGET);
            let mut s = Searcher::new(game, state, member_eval(game, i as u64), config).unwrap();
            resolved_roots += s.run().unwrap().root_resolved as u32;
            for node in s.graph().nodes() {
                if let Some(score) = node.cv.proved_score() {
                    checked += 1;
                    let truth = oracle.value(&node.state).unwrap();
                    if score != truth || node.cv.value != truth as f64 {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    verdict(
        1,
        "oracle soundness",
        mismatches == 0 && checked > 0,
        &format!(
            "{mismatches} mismatches over {checked} resolved nodes; {resolved_roots}/{} roots resolved",
            3 * POSITIONS
        ),
    );
}

#[test]
fn criterion_2_completion_resolves_where_plain_search_sticks() {
    let eval = member_eval(&TICTACTOE, 0);
    let config = SearchConfig::preset(Preset::UbfmRef).with_iterations(SOUNDNESS_BUDGET);
    let mut s = Searcher::new(&TICTACTOE, TICTACTOE.initial_state(), eval, config).unwrap();
    let stats = s.run().unwrap();
    let root_draw = stats.root_resolved && s.root_value().proved_score() == Some(0) && s.root_value().value == 0.0;
    let halted_early = stats.iterations < SOUNDNESS_BUDGET;

    let mut oracle = Oracle::new(&TICTACTOE);
    let mut disagreements = 0;
    for (i, state) in mid_game_positions(&TICTACTOE, POSITIONS, 101).into_iter().enumerate() {
        let config = SearchConfig::preset(Preset::NoCompletion).with_iterations(SOUNDNESS_BUDGET);
        let mut s = Searcher::new(&TICTACTOE, state, member_eval(&TICTACTOE, i as u64), config).unwrap();
        s.run().unwrap();
        let v = s.root_value().value;
        let truth = oracle.value(&state).unwrap() as f64;
        if v.signum() != truth.signum() || (v - truth).abs() > 1e-9 {
            disagreements += 1;
        }
    }
    verdict(
        2,
        "completeness",
        root_draw && halted_early,
        &format!(
            "completion on: root {} after {} iterations; completion off: {disagreements}/{POSITIONS} roots disagree with the oracle",
            s.root_value(),
            stats.iterations
        ),
    );
}

const TRACE_RUNS: u64 = 100;
const TRACE_BUDGET: u64 = 500;

/// Runs with at least one divergence, over `TRACE_RUNS` seeds per game.
fn divergent_runs(use_tt: bool, injective: bool, tie_break: fn(u64) -> TieBreak) -> (u32, u64) {
    let mut runs = 0;
    let mut lines = 0;
    for game in [&HEX5 as &'static dyn Game, &BREAKTHROUGH5] {
        for seed in 0..TRACE_RUNS {
            let (state, eval) = seeded_setup(game, seed, injective);
            let config = SearchConfig {
                use_tt,
                tie_break: tie_break(seed),
                rng_seed: seed,
                ..SearchConfig::default().with_iterations(TRACE_BUDGET)
            };
            let t = trace_backprop(game, state, &eval, config).unwrap();
            runs += !t.identical() as u32;
            lines += t.divergences.len() as u64;
        }
    }
    (runs, lines)
}

#[test]
fn criterion_3_backprop_rules_agree_only_without_ties_or_tt() {
    let (clean, clean_lines) = divergent_runs(false, true, |_| TieBreak::FirstChild);
    let (with_tt, _) = divergent_runs(true, true, |_| TieBreak::FirstChild);
    let (with_ties, _) = divergent_runs(false, false, TieBreak::SeededRandom);
    let total = 2 * TRACE_RUNS;
    verdict(
        3,
        "backprop equivalence",
        clean == 0 && (with_tt > 0 || with_ties > 0),
        &format!(
            "no tt, injective: {clean}/{total} runs diverge ({clean_lines} lines); \
             tt on: {with_tt}/{total}; ties with seeded random choice: {with_ties}/{total}"
        ),
    );
}

#[test]
fn criterion_4_transposition_table_shrinks_the_graph() {
    let runs = 50;
    let budget = 2000;
    let mut never_larger = true;
    let mut smaller = 0;
    let mut total = 0;
    let mut distinct_tt_le = 0;
    let mut redundant_off = 0;
    for game in [&OTHELLO6 as &'static dyn Game, &CONNECT5X4] {
        for seed in 0..runs {
            let (state, eval) = seeded_setup(game, seed, false);
            let stats = |preset| {
                let config = SearchConfig::preset(preset).with_iterations(budget);
                Searcher::new(game, state, eval.clone(), config).unwrap().run().unwrap()
            };
            let (on, off) = (stats(Preset::UbfmRef), stats(Preset::NoTt));
            never_larger &= on.nodes_created <= off.nodes_created;
            smaller += (on.nodes_created < off.nodes_created) as u32;
            distinct_tt_le += (on.distinct_states_expanded <= off.distinct_states_expanded) as u32;
            redundant_off += (off.nodes_expanded > off.distinct_states_expanded) as u32;
            total += 1;
        }
    }
    let share = smaller as f64 / total as f64;
    verdict(
        4,
        "tt effect",
        never_larger && share >= 0.8,
        &format!(
            "graph nodes with tt <= without on every run: {never_larger}; strictly fewer on {smaller}/{total} ({:.0}%); \
             distinct states expanded with tt <= without on {distinct_tt_le}/{total}; \
             runs where the tree search re-expanded a state: {redundant_off}/{total}",
            100.0 * share
        ),
    );
}

fn desk_report() -> &'static (TournamentReport, String) {
    static REPORT: OnceLock<(TournamentReport, String)> = OnceLock::new();
    REPORT.get_or_init(|| {
        let report = run_tournament(&TournamentConfig::default()).unwrap();
        let json = report.to_json();
        (report, json)
    })
}

#[test]
fn criterion_5_desk_tournament_ordering() {
    let (report, _) = desk_report();
    std::io::stderr().write_all(report.to_table().as_bytes()).unwrap();
    let reference = report.variant("ubfm_ref").unwrap();
    let ref_ci = reference.bootstrap_ci.unwrap();
    let others: Vec<_> = report.variants.iter().filter(|v| v.variant != "ubfm_ref").collect();
    let weakest = report.variant("no_completion_no_exact_terminal").unwrap();
    let lowest = others
        .iter()
        .all(|v| v.variant == weakest.variant || v.mean.unwrap() > weakest.mean.unwrap());
    let separated: Vec<_> = others
        .iter()
        .filter(|v| v.variant != weakest.variant)
        .map(|v| {
            let sep = v.bootstrap_ci.unwrap().low > weakest.bootstrap_ci.unwrap().high;
            format!("{} {}", v.variant, if sep { "separated" } else { "overlaps" })
        })
        .collect();
    let signs: Vec<_> = others
        .iter()
        .map(|v| format!("{} {:+.3}{}", v.variant, v.mean.unwrap(), if v.mean.unwrap() <= 0.0 { "" } else { " (>0)" }))
        .collect();
    verdict(
        5,
        "directional tournament",
        report.errors.is_empty() && ref_ci.contains(0.0) && lowest,
        &format!(
            "{} matches, {} errors; ubfm_ref self-play {:+.3} in [{:.3}, {:.3}]; means: {}; weakest vs others: {}",
            report.completed_matches,
            report.errors.len(),
            reference.mean.unwrap(),
            ref_ci.low,
            ref_ci.high,
            signs.join(", "),
            separated.join(", ")
        ),
    );
}

#[test]
fn criterion_6_reports_are_byte_identical() {
    let (_, first) = desk_report();
    let second = run_tournament(&TournamentConfig::default()).unwrap().to_json();
    verdict(
        6,
        "determinism",
        *first == second,
        &format!("{} and {} bytes", first.len(), second.len()),
    );
}

#[test]
fn criterion_7_match_count_identity() {
    let configs = [
        TournamentConfig {
            games: vec!["tictactoe".into()],
            variants: vec![VariantSpec::Preset(Preset::NoTt)],
            evals: EvalParams { sets: 1, members: 3, ..EvalParams::default() },
            budget: ubfm::search::Budget::Iterations(10),
            resamples: 100,
            ..TournamentConfig::default()
        },
        TournamentConfig::default(),
        TournamentConfig {
            games: vec!["hex5".into(), "othello6".into()],
            variants: vec![
                VariantSpec::Preset(Preset::KcBackprop),
                VariantSpec::Preset(Preset::NoCompletion),
                VariantSpec::Preset(Preset::NoExactTerminal),
            ],
            evals: EvalParams { sets: 2, members: 4, ..EvalParams::default() },
            ..TournamentConfig::default()
        },
    ];
    let mut lines = Vec::new();
    let mut pass = true;
    for c in &configs {
        let sets: Vec<_> = c
            .games
            .iter()
            .map(|g| {
                let game = game_by_name(g).unwrap();
                (game, c.eval_sets(game).unwrap())
            })
            .collect();
        let by_hand: usize = sets
            .iter()
            .map(|(_, s)| s.iter().map(|set| set.members.len() * (set.members.len() - 1)).sum::<usize>())
            .sum::<usize>()
            * 2
            * c.variants.len();
        let enumerated = enumerate_matches(c, &sets).len();
        pass &= by_hand == enumerated && enumerated == c.expected_match_count();
        lines.push(format!("{by_hand}/{enumerated}/{}", c.expected_match_count()));
    }
    let played = run_tournament(&configs[0]).unwrap();
    pass &= played.expected_matches == 12 && played.completed_matches + played.errors.len() == 12;
    verdict(
        7,
        "protocol arithmetic",
        pass,
        &format!(
            "formula/enumerated/computed: {}; tournament of 12 recorded {}",
            lines.join(", "),
            played.completed_matches + played.errors.len()
        ),
    );
}

/// Two strata of game scores with fixed win/draw/loss counts.
fn synthetic_strata() -> Vec<Vec<f64>> {
    let stratum = |wins, draws, losses| {
        let mut v = vec![1.0; wins];
        v.extend(vec![0.0; draws]);
        v.extend(vec![-1.0; losses]);
        v
    };
    vec![stratum(14, 10, 16), stratum(27, 21, 12)]
}

/// Interval computed once by `reference_bootstrap` at 10^6 resamples and
/// frozen.
const REFERENCE_CI: (f64, f64) = (-0.06666666666666665, 0.26666666666666666);

/// Independent stratified percentile bootstrap: xorshift draws, nearest-rank
/// percentiles.
fn reference_bootstrap(strata: &[Vec<f64>], resamples: usize) -> (f64, f64) {
    let mut x: u64 = 0x2545_f491_4f6c_dd1d;
    let mut next = |n: usize| {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        ((x as u128 * n as u128) >> 64) as usize
    };
    let mut stats = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let mut total = 0.0;
        for s in strata {
            let mut sum = 0.0;
            for _ in 0..s.len() {
                sum += s[next(s.len())];
            }
            total += sum / s.len() as f64;
        }
        stats.push(total / strata.len() as f64);
    }
    stats.sort_by(f64::total_cmp);
    let rank = |q: f64| stats[((q * resamples as f64).ceil() as usize).saturating_sub(1)];
    (rank(0.025), rank(0.975))
}

#[test]
fn reference_interval_is_reproducible() {
    let (low, high) = reference_bootstrap(&synthetic_strata(), 1_000_000);
    assert!((low - REFERENCE_CI.0).abs() < 1e-9 && (high - REFERENCE_CI.1).abs() < 1e-9, "{low} {high}");
}

#[test]
fn criterion_8_bootstrap_matches_the_reference() {
    let strata = synthetic_strata();
    let ci = bootstrap_ci(&strata, 0.05, 10_000, 2024).unwrap();
    let (dl, dh) = ((ci.low - REFERENCE_CI.0).abs(), (ci.high - REFERENCE_CI.1).abs());
    verdict(
        8,
        "statistical machinery",
        dl <= 0.01 && dh <= 0.01 && ci.contains(stratified_mean(&strata)),
        &format!(
            "[{:.4}, {:.4}] vs reference [{:.4}, {:.4}]",
            ci.low, ci.high, REFERENCE_CI.0, REFERENCE_CI.1
        ),
    );
}
