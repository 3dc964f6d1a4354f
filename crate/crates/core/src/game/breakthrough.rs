//! Breakthrough on a 5×5 board with two pawn rows per side.
//!
//! The first player starts on rows 0-1 and moves towards row 4; the second
//! player starts on rows 3-4 and moves towards row 0. Pawns step straight
//! forward onto an empty square or diagonally forward onto an empty or enemy
//! square; only diagonal steps capture. Reaching the far row or eliminating
//! every enemy pawn wins, and a player left without moves loses.

use super::{Game, GameDescriptor, GameState, Move, Outcome, Player, EMPTY, N_FEATURES};

const N: usize = 5;
const PAWNS_PER_SIDE: u32 = 10;

#[derive(Debug)]
pub struct Breakthrough {
    desc: GameDescriptor,
}

impl Breakthrough {
    pub const fn new() -> Breakthrough {
        Breakthrough {
            desc: GameDescriptor {
                name: "breakthrough5",
                rows: N,
                cols: N,
                alphabet: 3,
                symbols: ['.', 'X', 'O'],
                has_progress_measure: true,
            },
        }
    }

    fn forward(player: Player) -> isize {
        match player {
            Player::First => 1,
            Player::Second => -1,
        }
    }

    /// Target square of a move encoded as `from * 3 + dir`, with `dir` in
    /// {0: diagonal towards lower column, 1: straight, 2: diagonal towards
    /// higher column}.
    fn target(player: Player, from: usize, dir: usize) -> Option<usize> {
        let r = (from / N) as isize + Self::forward(player);
        let c = (from % N) as isize + dir as isize - 1;
        if r < 0 || r >= N as isize || c < 0 || c >= N as isize {
            None
        } else {
            Some(r as usize * N + c as usize)
        }
    }

    fn moves_for(&self, state: &GameState, player: Player, out: &mut Vec<Move>) {
        let me = player.piece();
        for from in 0..N * N {
            if state.cells[from] != me {
                continue;
            }
            for dir in 0..3 {
                if let Some(to) = Self::target(player, from, dir) {
                    let dest = state.cells[to];
                    let ok = if dir == 1 { dest == EMPTY } else { dest != me };
                    if ok {
                        out.push(Move((from * 3 + dir) as u16));
                    }
                }
            }
        }
    }

    fn mobility(&self, state: &GameState, player: Player) -> usize {
        let me = player.piece();
        let mut count = 0;
        for from in 0..N * N {
            if state.cells[from] != me {
                continue;
            }
            for dir in 0..3 {
                if let Some(to) = Self::target(player, from, dir) {
                    let dest = state.cells[to];
                    if (dir == 1 && dest == EMPTY) || (dir != 1 && dest != me) {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    fn advancement(player: Player, cell: usize) -> u32 {
        let r = (cell / N) as u32;
        match player {
            Player::First => r,
            Player::Second => (N as u32 - 1) - r,
        }
    }
}

impl Default for Breakthrough {
    fn default() -> Self {
        Breakthrough::new()
    }
}

impl Game for Breakthrough {
    fn descriptor(&self) -> &GameDescriptor {
        &self.desc
    }

    fn initial_state(&self) -> GameState {
        let mut s = GameState::empty(Player::First);
        for i in 0..2 * N {
            s.cells[i] = Player::First.piece();
            s.cells[N * N - 1 - i] = Player::Second.piece();
        }
        s
    }

    fn generate_moves(&self, state: &GameState, out: &mut Vec<Move>) {
        self.moves_for(state, state.to_move, out);
    }

    fn play(&self, state: &GameState, mv: Move) -> GameState {
        let from = mv.0 as usize / 3;
        let dir = mv.0 as usize % 3;
        let to = Self::target(state.to_move, from, dir).expect("move leaves the board");
        let mut cells = state.cells;
        cells[to] = cells[from];
        cells[from] = EMPTY;
        state.after(cells)
    }

    fn terminal_outcome(&self, state: &GameState) -> Option<Outcome> {
        let (mut first, mut second) = (0, 0);
        for i in 0..N * N {
            match state.cells[i] {
                1 => {
                    first += 1;
                    if i / N == N - 1 {
                        return Some(Outcome::FirstWins);
                    }
                }
                2 => {
                    second += 1;
                    if i / N == 0 {
                        return Some(Outcome::SecondWins);
                    }
                }
                _ => {}
            }
        }
        if first == 0 {
            return Some(Outcome::SecondWins);
        }
        if second == 0 {
            return Some(Outcome::FirstWins);
        }
        if self.mobility(state, state.to_move) == 0 {
            return Some(Outcome::win_for(state.to_move.opponent()));
        }
        None
    }

    /// Total pawn advancement plus `N` per captured pawn. A plain step adds
    /// one; a capture adds one and removes at most `N - 1` advancement while
    /// adding `N`.
    fn progress_measure(&self, state: &GameState) -> Option<u32> {
        let mut total = 0;
        let mut pawns = 0;
        for i in 0..N * N {
            match state.cells[i] {
                1 => {
                    total += Self::advancement(Player::First, i);
                    pawns += 1;
                }
                2 => {
                    total += Self::advancement(Player::Second, i);
                    pawns += 1;
                }
                _ => {}
            }
        }
        Some(total + (2 * PAWNS_PER_SIDE).saturating_sub(pawns) * N as u32)
    }

    fn features(&self, state: &GameState) -> [f64; N_FEATURES] {
        let me = state.to_move;
        let them = me.opponent();
        let (mut material, mut advance) = (0i32, 0i32);
        let (mut best_me, mut best_them) = (0u32, 0u32);
        for i in 0..N * N {
            let c = state.cells[i];
            if c == me.piece() {
                material += 1;
                let a = Self::advancement(me, i);
                advance += a as i32;
                best_me = best_me.max(a);
            } else if c == them.piece() {
                material -= 1;
                let a = Self::advancement(them, i);
                advance -= a as i32;
                best_them = best_them.max(a);
            }
        }
        let mobility = self.mobility(state, me) as f64 - self.mobility(state, them) as f64;
        [
            material as f64 / PAWNS_PER_SIDE as f64,
            (advance as f64 / 20.0).clamp(-1.0, 1.0),
            (best_me as f64 - best_them as f64) / (N - 1) as f64,
            (mobility / 15.0).clamp(-1.0, 1.0),
        ]
    }
}
