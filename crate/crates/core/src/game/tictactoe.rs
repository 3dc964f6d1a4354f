use super::{Game, GameDescriptor, GameState, Move, Outcome, Player, EMPTY, N_FEATURES};

const LINES: [[usize; 3]; 8] = [
    [0, 1, 2],
    [3, 4, 5],
    [6, 7, 8],
    [0, 3, 6],
    [1, 4, 7],
    [2, 5, 8],
    [0, 4, 8],
    [2, 4, 6],
];

#[derive(Debug)]
pub struct TicTacToe {
    desc: GameDescriptor,
}

impl TicTacToe {
    pub const fn new() -> TicTacToe {
        TicTacToe {
            desc: GameDescriptor {
                name: "tictactoe",
                rows: 3,
                cols: 3,
                alphabet: 3,
                symbols: ['.', 'X', 'O'],
                has_progress_measure: true,
            },
        }
    }
}

impl Default for TicTacToe {
    fn default() -> Self {
        TicTacToe::new()
    }
}

impl Game for TicTacToe {
    fn descriptor(&self) -> &GameDescriptor {
        &self.desc
    }

    fn initial_state(&self) -> GameState {
        GameState::empty(Player::First)
    }

    fn generate_moves(&self, state: &GameState, out: &mut Vec<Move>) {
        out.extend((0..9).filter(|&i| state.cells[i] == EMPTY).map(|i| Move(i as u16)));
    }

    fn play(&self, state: &GameState, mv: Move) -> GameState {
        let mut cells = state.cells;
        cells[mv.0 as usize] = state.to_move.piece();
        state.after(cells)
    }

    fn terminal_outcome(&self, state: &GameState) -> Option<Outcome> {
        for line in LINES {
            let a = state.cells[line[0]];
            if a != EMPTY && a == state.cells[line[1]] && a == state.cells[line[2]] {
                return Some(if a == 1 { Outcome::FirstWins } else { Outcome::SecondWins });
            }
        }
        if state.cells[..9].iter().all(|&c| c != EMPTY) {
            return Some(Outcome::Draw);
        }
        None
    }

    fn progress_measure(&self, state: &GameState) -> Option<u32> {
        Some(state.cells[..9].iter().filter(|&&c| c != EMPTY).count() as u32)
    }

    fn features(&self, state: &GameState) -> [f64; N_FEATURES] {
        let me = state.to_move.piece();
        let them = state.to_move.opponent().piece();
        let mut material = 0i32;
        for &c in &state.cells[..9] {
            if c == me {
                material += 1;
            } else if c == them {
                material -= 1;
            }
        }
        let center = match state.cells[4] {
            c if c == me => 1.0,
            c if c == them => -1.0,
            _ => 0.0,
        };
        let (mut open, mut threats) = (0i32, 0i32);
        for line in LINES {
            let mine = line.iter().filter(|&&i| state.cells[i] == me).count();
            let theirs = line.iter().filter(|&&i| state.cells[i] == them).count();
            if theirs == 0 && mine > 0 {
                open += 1;
                if mine == 2 {
                    threats += 1;
                }
            } else if mine == 0 && theirs > 0 {
                open -= 1;
                if theirs == 2 {
                    threats -= 1;
                }
            }
        }
        [
            material as f64 / 3.0,
            center,
            open as f64 / 8.0,
            threats as f64 / 8.0,
        ]
    }
}
