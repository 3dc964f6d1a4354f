use serde::Serialize;

use crate::eval::{splitmix64, EvalId, Evaluator, HeuristicEval};
use crate::game::{Game, Move, Player};
use crate::search::{SearchConfig, SearchError, Searcher};
use crate::value::CompletedValue;

/// Which side of a match a result refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Winner {
    A,
    B,
    Draw,
}

#[derive(Clone, Debug)]
pub struct MatchSpec {
    pub game: &'static dyn Game,
    pub config_a: SearchConfig,
    pub config_b: SearchConfig,
    pub eval_a: HeuristicEval,
    pub eval_b: HeuristicEval,
    /// Seat taken by side A.
    pub seat_a: Player,
    pub seed: u64,
}

/// Totals over one side's searches in a match.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SideStats {
    pub moves: u64,
    pub iterations: u64,
    pub nodes_expanded: u64,
    pub resolved_roots: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchResult {
    pub game: &'static str,
    pub eval_a: EvalId,
    pub eval_b: EvalId,
    pub seat_a: Player,
    pub winner: Winner,
    /// +1 win, -1 loss, 0 draw for A.
    pub score_a: i8,
    pub move_count: u32,
    /// The safety cap on match length was hit; scored as a draw.
    pub move_limit_exceeded: bool,
    pub stats_a: SideStats,
    pub stats_b: SideStats,
}

/// One move of a match and the search behind it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MoveRecord {
    pub ply: u32,
    pub mover: Player,
    pub side: Winner,
    pub mv: Move,
    pub iterations: u64,
    pub nodes_expanded: u64,
    pub max_depth: u64,
    /// Root value after the search, for the mover.
    pub root_value: CompletedValue,
}

/// Per-move search seed, so seeded tie-breaking differs between moves but
/// stays reproducible.
fn move_seed(match_seed: u64, ply: u32) -> u64 {
    splitmix64(match_seed ^ splitmix64(ply as u64 + 0x51))
}

/// Plays one game from the initial position, each side running a fresh
/// search per move with its own configuration and evaluator.
pub fn play_match(spec: &MatchSpec) -> Result<MatchResult, SearchError> {
    play_match_logged(spec).map(|(result, _)| result)
}

/// As [`play_match`], also returning a record per move.
pub fn play_match_logged(spec: &MatchSpec) -> Result<(MatchResult, Vec<MoveRecord>), SearchError> {
    let game = spec.game;
    let limit = 10 * game.descriptor().cells() as u32;
    let mut state = game.initial_state();
    let mut stats = [SideStats::default(); 2];
    let mut plies = 0u32;
    let mut log = Vec::new();
    let eval_a = Evaluator::new(spec.eval_a.clone());
    let eval_b = Evaluator::new(spec.eval_b.clone());
    let outcome = loop {
        if let Some(outcome) = game.terminal_outcome(&state) {
            break Some(outcome);
        }
        if plies >= limit {
            break None;
        }
        let a_to_move = state.to_move() == spec.seat_a;
        let (config, eval, side) = if a_to_move {
            (spec.config_a, &eval_a, 0)
        } else {
            (spec.config_b, &eval_b, 1)
        };
        let config = SearchConfig {
            rng_seed: move_seed(spec.seed, plies),
            ..config
        };
        let mut searcher = Searcher::new(game, state, eval.clone(), config)?;
        let s = searcher.run()?;
        let mv: Move = searcher.decide()?;
        log.push(MoveRecord {
            ply: plies,
            mover: state.to_move(),
            side: if a_to_move { Winner::A } else { Winner::B },
            mv,
            iterations: s.iterations,
            nodes_expanded: s.nodes_expanded,
            max_depth: s.max_depth_reached,
            root_value: searcher.root_value(),
        });
        let side = &mut stats[side];
        side.moves += 1;
        side.iterations += s.iterations;
        side.nodes_expanded += s.nodes_expanded;
        side.resolved_roots += s.root_resolved as u64;
        state = game.apply(&state, mv)?;
        plies += 1;
    };
    let (winner, score_a) = match outcome.and_then(|o| o.winner()) {
        Some(p) if p == spec.seat_a => (Winner::A, 1),
        Some(_) => (Winner::B, -1),
        None => (Winner::Draw, 0),
    };
    let result = MatchResult {
        game: game.name(),
        eval_a: spec.eval_a.id,
        eval_b: spec.eval_b.id,
        seat_a: spec.seat_a,
        winner,
        score_a,
        move_count: plies,
        move_limit_exceeded: outcome.is_none(),
        stats_a: stats[0],
        stats_b: stats[1],
    };
    Ok((result, log))
}
