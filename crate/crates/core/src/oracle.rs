//! Brute-force exact solver: memoized negamax over the full game graph.
//! Independent of the search engine; used as ground truth.

use std::collections::HashMap;

use thiserror::Error;

use crate::game::{Game, GameState, Move, SolverHint};

pub const DEFAULT_NODE_LIMIT: u64 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("state space exceeds the node limit of {0} visits")]
    BudgetExceeded(u64),
    #[error("state is terminal")]
    TerminalState,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    /// Exact score for the player to move: -1, 0 or +1.
    pub value: i8,
    /// Moves whose successors achieve `value`; empty for terminal states.
    /// Complete unless the position is won (see [`Oracle::solve`]).
    pub optimal_moves: Vec<Move>,
    pub nodes_visited: u64,
}

/// Solver with a memo that persists across calls, so repeated queries on
/// states of one game share work.
pub struct Oracle {
    game: &'static dyn Game,
    memo: HashMap<u128, i8>,
    /// Cutoff counts per move, for ordering.
    history: Vec<u32>,
    node_limit: u64,
    visited: u64,
}

impl Oracle {
    pub fn new(game: &'static dyn Game) -> Oracle {
        Oracle {
            game,
            memo: HashMap::new(),
            history: vec![0; 1 << 16],
            node_limit: DEFAULT_NODE_LIMIT,
            visited: 0,
        }
    }

    pub fn with_node_limit(mut self, limit: u64) -> Oracle {
        self.node_limit = limit;
        self
    }

    pub fn game(&self) -> &'static dyn Game {
        self.game
    }

    /// Total node visits since construction.
    pub fn nodes_visited(&self) -> u64 {
        self.visited
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    /// Exact value of `state` for its mover.
    pub fn value(&mut self, state: &GameState) -> Result<i8, OracleError> {
        match self.game.solver_hint(state) {
            SolverHint::Decided(outcome) => Ok(outcome.score_for(state.to_move())),
            SolverHint::Score(_) => self.open_value(state),
        }
    }

    /// Children with their hints, the ones the opponent likes least first,
    /// then moves that cut off search elsewhere.
    fn ordered_children(&self, state: &GameState) -> Vec<(Move, GameState, SolverHint)> {
        let mut moves = Vec::new();
        self.game.generate_moves(state, &mut moves);
        order_moves(self.game, &mut moves);
        let mut children: Vec<_> = moves
            .into_iter()
            .map(|m| {
                let child = self.game.play(state, m);
                (m, child, self.game.solver_hint(&child))
            })
            .collect();
        let mover = state.to_move();
        children.sort_by_key(|(m, _, hint)| {
            let score = match hint {
                // An immediate win needs no further search.
                SolverHint::Decided(o) if o.winner() == Some(mover) => i32::MIN,
                SolverHint::Decided(_) => i32::MAX,
                SolverHint::Score(s) => *s,
            };
            (score, std::cmp::Reverse(self.history[m.0 as usize]))
        });
        children
    }

    fn child_value(&mut self, child: &GameState, hint: SolverHint) -> Result<i8, OracleError> {
        match hint {
            SolverHint::Decided(outcome) => Ok(outcome.score_for(child.to_move())),
            SolverHint::Score(_) => self.open_value(child),
        }
    }

    fn open_value(&mut self, state: &GameState) -> Result<i8, OracleError> {
        let key = state.packed();
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        self.visited += 1;
        if self.visited > self.node_limit {
            return Err(OracleError::BudgetExceeded(self.node_limit));
        }
        let children = self.ordered_children(state);
        let mut best = -1;
        for &(m, child, hint) in &children {
            best = best.max(-self.child_value(&child, hint)?);
            if best == 1 {
                let h = &mut self.history[m.0 as usize];
                *h = h.saturating_add((children.len() * children.len()) as u32);
                break;
            }
        }
        self.memo.insert(key, best);
        Ok(best)
    }

    /// Value plus the optimal moves met on the way. In a won position the
    /// scan stops at the first winning move found; use
    /// [`Oracle::optimal_move_set`] for all of them.
    pub fn solve(&mut self, state: &GameState) -> Result<SolveResult, OracleError> {
        let before = self.visited;
        if let Some(outcome) = self.game.terminal_outcome(state) {
            return Ok(SolveResult {
                value: outcome.score_for(state.to_move()),
                optimal_moves: Vec::new(),
                nodes_visited: 0,
            });
        }
        let value = self.value(state)?;
        let children = self.ordered_children(state);
        if value == 1 {
            // The proof just found left its winning child in the memo.
            let known = children.iter().find(|(_, child, hint)| match hint {
                SolverHint::Decided(o) => o.score_for(child.to_move()) == -1,
                SolverHint::Score(_) => self.memo.get(&child.packed()) == Some(&-1),
            });
            if let Some(&(m, _, _)) = known {
                return Ok(SolveResult {
                    value,
                    optimal_moves: vec![m],
                    nodes_visited: self.visited - before,
                });
            }
        }
        let mut optimal_moves = Vec::new();
        for (m, child, hint) in children {
            if -self.child_value(&child, hint)? == value {
                optimal_moves.push(m);
                if value == 1 {
                    break;
                }
            }
        }
        optimal_moves.sort();
        Ok(SolveResult {
            value,
            optimal_moves,
            nodes_visited: self.visited - before,
        })
    }

    /// Moves whose successor's negated value equals the state's value.
    pub fn optimal_move_set(&mut self, state: &GameState) -> Result<Vec<Move>, OracleError> {
        if self.game.is_terminal(state) {
            return Err(OracleError::TerminalState);
        }
        let value = self.value(state)?;
        self.optimal_moves_with_value(state, value)
    }

    fn optimal_moves_with_value(&mut self, state: &GameState, value: i8) -> Result<Vec<Move>, OracleError> {
        let mut moves = Vec::new();
        self.game.generate_moves(state, &mut moves);
        let mut out = Vec::new();
        for m in moves {
            if -self.value(&self.game.play(state, m))? == value {
                out.push(m);
            }
        }
        Ok(out)
    }
}

/// Placement moves (one per cell) nearest the board centre first; other
/// move encodings keep the game order.
fn order_moves(game: &dyn Game, moves: &mut [Move]) {
    let d = game.descriptor();
    if moves.iter().any(|m| m.0 as usize >= d.cells()) {
        return;
    }
    let (cr, cc) = ((d.rows - 1) as i32, (d.cols - 1) as i32);
    moves.sort_by_key(|m| {
        let (r, c) = ((m.0 as usize / d.cols) as i32, (m.0 as usize % d.cols) as i32);
        ((2 * r - cr).abs() + (2 * c - cc).abs(), m.0)
    });
}

/// One-shot solve with a fresh memo.
pub fn solve(game: &'static dyn Game, state: &GameState) -> Result<SolveResult, OracleError> {
    Oracle::new(game).solve(state)
}

pub fn optimal_move_set(game: &'static dyn Game, state: &GameState) -> Result<Vec<Move>, OracleError> {
    Oracle::new(game).optimal_move_set(state)
}

/// Plain depth-first negamax without memo or pruning, for cross-checking on
/// tiny games.
pub fn solve_plain(game: &dyn Game, state: &GameState) -> i8 {
    if let Some(outcome) = game.terminal_outcome(state) {
        return outcome.score_for(state.to_move());
    }
    let mut moves = Vec::new();
    game.generate_moves(state, &mut moves);
    moves
        .into_iter()
        .map(|m| -solve_plain(game, &game.play(state, m)))
        .max()
        .expect("non-terminal states have moves")
}
