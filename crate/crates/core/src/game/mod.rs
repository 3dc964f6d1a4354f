//! Abstract two-player game interface and the desk-scale game roster.
//!
//! Every game here is played on a small grid whose cells hold one of three
//! contents (empty, first player, second player), so a single compact
//! [`GameState`] serves all of them. Game rules live behind the [`Game`]
//! trait; instances are stateless and registered as statics.

mod breakthrough;
mod connect;
mod diagram;
mod hex;
mod othello;
mod tictactoe;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use breakthrough::Breakthrough;
pub use connect::Connect;
pub use diagram::{parse_diagram, print_diagram};
pub use hex::Hex;
pub use othello::Othello;
pub use tictactoe::TicTacToe;

/// Largest board supported (7×7 Hex).
pub const MAX_CELLS: usize = 49;

/// Number of heuristic features every game exposes.
pub const N_FEATURES: usize = 4;

pub const EMPTY: u8 = 0;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("unknown game `{0}`")]
    UnknownGame(String),
    #[error("state is terminal")]
    TerminalState,
    #[error("illegal move {0}")]
    IllegalMove(Move),
    #[error("bad diagram: {0}")]
    BadDiagram(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Player {
    First,
    Second,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::First => Player::Second,
            Player::Second => Player::First,
        }
    }

    /// Cell content used for this player's pieces.
    pub fn piece(self) -> u8 {
        match self {
            Player::First => 1,
            Player::Second => 2,
        }
    }
}

/// Compact action encoding. The numeric order is the stable move order used
/// for tie-breaking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Move(pub u16);

impl Move {
    pub const PASS: Move = Move(u16::MAX);

    pub fn is_pass(self) -> bool {
        self == Move::PASS
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_pass() {
            write!(f, "pass")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    FirstWins,
    SecondWins,
    Draw,
}

impl Outcome {
    /// Score from the first player's point of view.
    pub fn score(self) -> i8 {
        match self {
            Outcome::FirstWins => 1,
            Outcome::SecondWins => -1,
            Outcome::Draw => 0,
        }
    }

    pub fn score_for(self, player: Player) -> i8 {
        match player {
            Player::First => self.score(),
            Player::Second => -self.score(),
        }
    }

    pub fn winner(self) -> Option<Player> {
        match self {
            Outcome::FirstWins => Some(Player::First),
            Outcome::SecondWins => Some(Player::Second),
            Outcome::Draw => None,
        }
    }

    pub(crate) fn win_for(player: Player) -> Outcome {
        match player {
            Player::First => Outcome::FirstWins,
            Player::Second => Outcome::SecondWins,
        }
    }
}

/// Board contents plus side to move. Immutable once built; successors are
/// produced by [`Game::apply`].
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct GameState {
    pub(crate) cells: [u8; MAX_CELLS],
    pub(crate) to_move: Player,
    pub(crate) move_count: u16,
}

impl GameState {
    pub(crate) fn empty(to_move: Player) -> GameState {
        GameState {
            cells: [EMPTY; MAX_CELLS],
            to_move,
            move_count: 0,
        }
    }

    pub fn to_move(&self) -> Player {
        self.to_move
    }

    pub fn move_count(&self) -> u16 {
        self.move_count
    }

    pub fn cell(&self, index: usize) -> u8 {
        self.cells[index]
    }

    pub fn cells(&self) -> &[u8; MAX_CELLS] {
        &self.cells
    }

    /// Exact position encoding: two bits per cell plus the side to move.
    /// Two states share an encoding iff they have the same board and mover;
    /// the move counter is not part of the position.
    pub fn packed(&self) -> u128 {
        let mut out: u128 = 0;
        for (i, &c) in self.cells.iter().enumerate() {
            out |= (c as u128 & 0b11) << (2 * i);
        }
        if self.to_move == Player::Second {
            out |= 1u128 << (2 * MAX_CELLS);
        }
        out
    }

    pub(crate) fn after(&self, cells: [u8; MAX_CELLS]) -> GameState {
        GameState {
            cells,
            to_move: self.to_move.opponent(),
            move_count: self.move_count + 1,
        }
    }
}

impl fmt::Debug for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GameState")
            .field("cells", &&self.cells[..])
            .field("to_move", &self.to_move)
            .field("move_count", &self.move_count)
            .finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameDescriptor {
    pub name: &'static str,
    pub rows: usize,
    pub cols: usize,
    /// Distinct cell contents, including empty.
    pub alphabet: usize,
    /// Diagram characters for empty, first and second player.
    pub symbols: [char; 3],
    pub has_progress_measure: bool,
}

impl GameDescriptor {
    pub fn cells(&self) -> usize {
        self.rows * self.cols
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverHint {
    Decided(Outcome),
    Score(i32),
}

pub trait Game: Send + Sync + fmt::Debug {
    fn descriptor(&self) -> &GameDescriptor;

    fn initial_state(&self) -> GameState;

    /// Appends the moves available in a non-terminal state, in stable order.
    /// Behaviour on terminal states is unspecified; use [`Game::legal_moves`]
    /// for a checked version.
    fn generate_moves(&self, state: &GameState, out: &mut Vec<Move>);

    /// Successor state for a move known to be legal.
    fn play(&self, state: &GameState, mv: Move) -> GameState;

    fn terminal_outcome(&self, state: &GameState) -> Option<Outcome>;

    /// Quantity that never decreases along a game and strictly increases on
    /// every non-pass move. `None` for games that can repeat positions.
    fn progress_measure(&self, state: &GameState) -> Option<u32>;

    /// Heuristic features from the mover's point of view, each in `[-1, 1]`.
    /// Positive means good for the player to move.
    fn features(&self, state: &GameState) -> [f64; N_FEATURES];

    fn name(&self) -> &'static str {
        self.descriptor().name
    }

    fn legal_moves(&self, state: &GameState) -> Result<Vec<Move>, GameError> {
        if self.terminal_outcome(state).is_some() {
            return Err(GameError::TerminalState);
        }
        let mut moves = Vec::new();
        self.generate_moves(state, &mut moves);
        Ok(moves)
    }

    fn apply(&self, state: &GameState, mv: Move) -> Result<GameState, GameError> {
        let moves = self.legal_moves(state)?;
        if moves.binary_search(&mv).is_err() {
            return Err(GameError::IllegalMove(mv));
        }
        Ok(self.play(state, mv))
    }

    fn is_terminal(&self, state: &GameState) -> bool {
        self.terminal_outcome(state).is_some()
    }

    /// Cheap static assessment for exhaustive solvers: an outcome perfect
    /// play can no longer change (a Hex player with every path cut off has
    /// lost), or else an ordering score for the player to move, higher
    /// meaning better. Defaults to terminality and a flat score.
    fn solver_hint(&self, state: &GameState) -> SolverHint {
        match self.terminal_outcome(state) {
            Some(outcome) => SolverHint::Decided(outcome),
            None => SolverHint::Score(0),
        }
    }
}

pub static TICTACTOE: TicTacToe = TicTacToe::new();
pub static HEX5: Hex = Hex::new(5, "hex5");
pub static HEX7: Hex = Hex::new(7, "hex7");
pub static BREAKTHROUGH5: Breakthrough = Breakthrough::new();
pub static CONNECT5X4: Connect = Connect::new();
pub static OTHELLO6: Othello = Othello::new();

pub fn all_games() -> [&'static dyn Game; 6] {
    [&TICTACTOE, &HEX5, &HEX7, &BREAKTHROUGH5, &CONNECT5X4, &OTHELLO6]
}

pub fn game_by_name(name: &str) -> Result<&'static dyn Game, GameError> {
    all_games()
        .into_iter()
        .find(|g| g.name() == name)
        .ok_or_else(|| GameError::UnknownGame(name.to_string()))
}

/// Plays `plies` uniformly random moves from the initial position, stopping
/// early at terminal states.
pub fn random_playout<R: rand::Rng>(game: &dyn Game, plies: usize, rng: &mut R) -> GameState {
    let mut state = game.initial_state();
    let mut moves = Vec::new();
    for _ in 0..plies {
        if game.is_terminal(&state) {
            break;
        }
        moves.clear();
        game.generate_moves(&state, &mut moves);
        let mv = moves[rng.gen_range(0..moves.len())];
        state = game.play(&state, mv);
    }
    state
}
