//! Gravity four-in-a-row on a 5-column, 4-row board. Row 0 is the top row
//! of the diagram; stones drop to the lowest empty cell of a column.

use super::{Game, GameDescriptor, GameState, Move, Outcome, Player, EMPTY, N_FEATURES};

const COLS: usize = 5;
const ROWS: usize = 4;

const fn build_windows() -> [[usize; 4]; 17] {
    let mut out = [[0; 4]; 17];
    let mut k = 0;
    let mut r = 0;
    while r < ROWS {
        let mut c = 0;
        while c + 4 <= COLS {
            out[k] = [r * COLS + c, r * COLS + c + 1, r * COLS + c + 2, r * COLS + c + 3];
            k += 1;
            c += 1;
        }
        r += 1;
    }
    let mut c = 0;
    while c < COLS {
        out[k] = [c, COLS + c, 2 * COLS + c, 3 * COLS + c];
        k += 1;
        c += 1;
    }
    let mut c = 0;
    while c + 4 <= COLS {
        out[k] = [c, COLS + c + 1, 2 * COLS + c + 2, 3 * COLS + c + 3];
        k += 1;
        out[k] = [c + 3, COLS + c + 2, 2 * COLS + c + 1, 3 * COLS + c];
        k += 1;
        c += 1;
    }
    out
}

const WINDOWS: [[usize; 4]; 17] = build_windows();

#[derive(Debug)]
pub struct Connect {
    desc: GameDescriptor,
}

impl Connect {
    pub const fn new() -> Connect {
        Connect {
            desc: GameDescriptor {
                name: "connect5x4",
                rows: ROWS,
                cols: COLS,
                alphabet: 3,
                symbols: ['.', 'X', 'O'],
                has_progress_measure: true,
            },
        }
    }
}

impl Default for Connect {
    fn default() -> Self {
        Connect::new()
    }
}

impl Game for Connect {
    fn descriptor(&self) -> &GameDescriptor {
        &self.desc
    }

    fn initial_state(&self) -> GameState {
        GameState::empty(Player::First)
    }

    fn generate_moves(&self, state: &GameState, out: &mut Vec<Move>) {
        out.extend((0..COLS).filter(|&c| state.cells[c] == EMPTY).map(|c| Move(c as u16)));
    }

    fn play(&self, state: &GameState, mv: Move) -> GameState {
        let c = mv.0 as usize;
        let r = (0..ROWS)
            .rev()
            .find(|&r| state.cells[r * COLS + c] == EMPTY)
            .expect("column is full");
        let mut cells = state.cells;
        cells[r * COLS + c] = state.to_move.piece();
        state.after(cells)
    }

    fn terminal_outcome(&self, state: &GameState) -> Option<Outcome> {
        for w in WINDOWS {
            let a = state.cells[w[0]];
            if a != EMPTY && w[1..].iter().all(|&i| state.cells[i] == a) {
                return Some(if a == 1 { Outcome::FirstWins } else { Outcome::SecondWins });
            }
        }
        if state.cells[..COLS].iter().all(|&c| c != EMPTY) {
            return Some(Outcome::Draw);
        }
        None
    }

    fn progress_measure(&self, state: &GameState) -> Option<u32> {
        Some(state.cells[..ROWS * COLS].iter().filter(|&&c| c != EMPTY).count() as u32)
    }

    fn features(&self, state: &GameState) -> [f64; N_FEATURES] {
        let me = state.to_move.piece();
        let them = state.to_move.opponent().piece();
        let mut centre = 0i32;
        for r in 0..ROWS {
            let c = state.cells[r * COLS + COLS / 2];
            if c == me {
                centre += 1;
            } else if c == them {
                centre -= 1;
            }
        }
        let (mut open, mut threes, mut twos) = (0i32, 0i32, 0i32);
        for w in WINDOWS {
            let mine = w.iter().filter(|&&i| state.cells[i] == me).count();
            let theirs = w.iter().filter(|&&i| state.cells[i] == them).count();
            let sign = match (mine, theirs) {
                (m, 0) if m > 0 => 1,
                (0, t) if t > 0 => -1,
                _ => continue,
            };
            let count = mine.max(theirs);
            open += sign;
            if count == 3 {
                threes += sign;
            } else if count == 2 {
                twos += sign;
            }
        }
        [
            centre as f64 / ROWS as f64,
            open as f64 / WINDOWS.len() as f64,
            (threes as f64 / 4.0).clamp(-1.0, 1.0),
            (twos as f64 / 8.0).clamp(-1.0, 1.0),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{parse_diagram, CONNECT5X4};

    #[test]
    fn stones_fall_to_bottom() {
        let s = CONNECT5X4.initial_state();
        let s = CONNECT5X4.apply(&s, Move(2)).unwrap();
        let s = CONNECT5X4.apply(&s, Move(2)).unwrap();
        assert_eq!(s.cell(3 * COLS + 2), 1);
        assert_eq!(s.cell(2 * COLS + 2), 2);
    }

    #[test]
    fn full_column_is_not_playable() {
        let s = parse_diagram(&CONNECT5X4, "X....\nO....\nX....\nO....\nX\n").unwrap();
        assert_eq!(
            CONNECT5X4.legal_moves(&s).unwrap(),
            vec![Move(1), Move(2), Move(3), Move(4)]
        );
    }

    #[test]
    fn line_detection() {
        let horizontal = parse_diagram(&CONNECT5X4, ".....\n.....\nOOO..\n.XXXX\nO\n").unwrap();
        assert_eq!(CONNECT5X4.terminal_outcome(&horizontal), Some(Outcome::FirstWins));
        let diagonal = parse_diagram(&CONNECT5X4, "O....\nXO...\nXXO..\nXXXO.\nX\n").unwrap();
        assert_eq!(CONNECT5X4.terminal_outcome(&diagonal), Some(Outcome::SecondWins));
        let anti = parse_diagram(&CONNECT5X4, "....X\n...XO\n..XOO\n.XOOX\nO\n").unwrap();
        assert_eq!(CONNECT5X4.terminal_outcome(&anti), Some(Outcome::FirstWins));
    }

    #[test]
    fn window_count() {
        assert_eq!(WINDOWS.len(), 17);
        let mut seen = std::collections::HashSet::new();
        for w in WINDOWS {
            let mut w = w;
            w.sort();
            assert!(seen.insert(w));
        }
    }
}
