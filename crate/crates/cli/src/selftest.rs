use std::process::ExitCode;

use anyhow::{ensure, Result};

use ubfm::eval::{generate_eval_sets, Evaluator, HeuristicEval};
use ubfm::game::{all_games, Game, Player, HEX5, TICTACTOE};
use ubfm::harness::{bootstrap_ci, play_match, seeded_setup, stratified_mean, trace_backprop, MatchSpec};
use ubfm::oracle::Oracle;
use ubfm::search::{Preset, SearchConfig, Searcher};

type Check = fn() -> Result<()>;

const CHECKS: [(&str, Check); 5] = [
    ("tictactoe resolves to the oracle draw", tictactoe_resolves),
    ("kc and full agree without ties or tt", backprop_equivalence),
    ("graph keys match recomputed hashes", verified_keys),
    ("single-iteration matches finish", tiny_matches),
    ("bootstrap interval holds the estimate", bootstrap_sanity),
];

pub fn run() -> Result<ExitCode> {
    let mut failed = 0;
    for (name, check) in CHECKS {
        match check() {
            Ok(()) => println!("ok    {name}"),
            Err(e) => {
                failed += 1;
                println!("FAIL  {name}: {e:#}");
            }
        }
    }
    println!("{} passed, {failed} failed", CHECKS.len() - failed);
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn tictactoe_resolves() -> Result<()> {
    let eval = Evaluator::new(HeuristicEval::uniform(&TICTACTOE));
    let config = SearchConfig::preset(Preset::UbfmRef).with_iterations(1_000_000);
    let mut s = Searcher::new(&TICTACTOE, TICTACTOE.initial_state(), eval, config)?;
    let stats = s.run()?;
    ensure!(stats.root_resolved, "root unresolved after {} iterations", stats.iterations);
    ensure!(s.root_value().proved_score() == Some(0), "root is {}", s.root_value());
    let mut oracle = Oracle::new(&TICTACTOE);
    for node in s.graph().nodes() {
        if let Some(score) = node.cv.proved_score() {
            ensure!(score == oracle.value(&node.state)?, "node {:016x} is {}", node.key, node.cv);
        }
    }
    Ok(())
}

fn backprop_equivalence() -> Result<()> {
    let (state, eval) = seeded_setup(&HEX5, 3, true);
    let config = SearchConfig {
        use_tt: false,
        ..SearchConfig::default().with_iterations(500)
    };
    let t = trace_backprop(&HEX5, state, &eval, config)?;
    ensure!(t.identical(), "{} divergences", t.divergences.len());
    Ok(())
}

fn verified_keys() -> Result<()> {
    for game in all_games() {
        let eval = Evaluator::new(HeuristicEval::uniform(game));
        let config = SearchConfig {
            verify_keys: true,
            ..SearchConfig::default().with_iterations(300)
        };
        Searcher::new(game, game.initial_state(), eval, config)?.run()?;
    }
    Ok(())
}

fn tiny_matches() -> Result<()> {
    for game in all_games() {
        let sets = generate_eval_sets(game, 1, 2, 1)?;
        let spec = MatchSpec {
            game,
            config_a: SearchConfig::preset(Preset::NoCompletion).with_iterations(1),
            config_b: SearchConfig::preset(Preset::UbfmRef).with_iterations(1),
            eval_a: sets[0].members[0].clone(),
            eval_b: sets[0].members[1].clone(),
            seat_a: Player::Second,
            seed: 1,
        };
        let r = play_match(&spec)?;
        ensure!(!r.move_limit_exceeded, "{} hit the move limit", game.name());
    }
    Ok(())
}

fn bootstrap_sanity() -> Result<()> {
    let strata = vec![vec![1.0, -1.0, 0.0, 1.0, 1.0], vec![-1.0, 0.0, 0.0, 1.0]];
    let ci = bootstrap_ci(&strata, 0.05, 10_000, 7)?;
    ensure!(ci.contains(stratified_mean(&strata)), "{ci:?}");
    let flat = bootstrap_ci(&[vec![1.0; 6]], 0.05, 1000, 7)?;
    ensure!(flat.low == 1.0 && flat.high == 1.0, "{flat:?}");
    Ok(())
}
