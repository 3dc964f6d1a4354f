//! Othello on a 6×6 board. When the mover has no flipping move but the
//! opponent does, the only legal move is an explicit pass.

use super::{Game, GameDescriptor, GameState, Move, Outcome, Player, EMPTY, N_FEATURES};

const N: usize = 6;
const FULL: u64 = (1 << (N * N)) - 1;
const NOT_COL0: u64 = FULL & !0x041041041; // clears column 0 in every row
const NOT_COL5: u64 = FULL & !(0x041041041 << 5);
const CORNERS: u64 = 1 | (1 << 5) | (1 << 30) | (1 << 35);
const EDGES: u64 = (0x3f | (0x3f << 30) | 0x041041041 | (0x041041041 << 5)) & !CORNERS;

#[derive(Clone, Copy)]
enum Dir {
    Left(u32, u64),
    Right(u32, u64),
}

const DIRS: [Dir; 8] = [
    Dir::Left(1, NOT_COL0),
    Dir::Right(1, NOT_COL5),
    Dir::Left(6, FULL),
    Dir::Right(6, FULL),
    Dir::Left(7, NOT_COL0),
    Dir::Left(5, NOT_COL5),
    Dir::Right(5, NOT_COL0),
    Dir::Right(7, NOT_COL5),
];

#[inline]
fn shift(bits: u64, d: Dir) -> u64 {
    match d {
        Dir::Left(s, m) => (bits << s) & m,
        Dir::Right(s, m) => (bits >> s) & m,
    }
}

fn moves_bits(own: u64, opp: u64) -> u64 {
    let empty = FULL & !(own | opp);
    let mut moves = 0;
    for d in DIRS {
        let mut x = shift(own, d) & opp;
        for _ in 0..N - 3 {
            x |= shift(x, d) & opp;
        }
        moves |= shift(x, d) & empty;
    }
    moves
}

fn flips(own: u64, opp: u64, square: usize) -> u64 {
    let mut all = 0;
    for d in DIRS {
        let mut line = 0;
        let mut x = shift(1 << square, d);
        while x & opp != 0 {
            line |= x;
            x = shift(x, d);
        }
        if x & own != 0 {
            all |= line;
        }
    }
    all
}

fn bitboards(state: &GameState) -> (u64, u64) {
    let me = state.to_move.piece();
    let (mut own, mut opp) = (0u64, 0u64);
    for i in 0..N * N {
        match state.cells[i] {
            EMPTY => {}
            c if c == me => own |= 1 << i,
            _ => opp |= 1 << i,
        }
    }
    (own, opp)
}

#[derive(Debug)]
pub struct Othello {
    desc: GameDescriptor,
}

impl Othello {
    pub const fn new() -> Othello {
        Othello {
            desc: GameDescriptor {
                name: "othello6",
                rows: N,
                cols: N,
                alphabet: 3,
                symbols: ['.', 'B', 'W'],
                has_progress_measure: true,
            },
        }
    }

    pub fn disc_counts(&self, state: &GameState) -> (u32, u32) {
        let first = state.cells[..N * N].iter().filter(|&&c| c == 1).count() as u32;
        let second = state.cells[..N * N].iter().filter(|&&c| c == 2).count() as u32;
        (first, second)
    }
}

impl Default for Othello {
    fn default() -> Self {
        Othello::new()
    }
}

impl Game for Othello {
    fn descriptor(&self) -> &GameDescriptor {
        &self.desc
    }

    fn initial_state(&self) -> GameState {
        let mut s = GameState::empty(Player::First);
        let w = Player::Second.piece();
        let b = Player::First.piece();
        s.cells[2 * N + 2] = w;
        s.cells[2 * N + 3] = b;
        s.cells[3 * N + 2] = b;
        s.cells[3 * N + 3] = w;
        s
    }

    fn generate_moves(&self, state: &GameState, out: &mut Vec<Move>) {
        let (own, opp) = bitboards(state);
        let mut m = moves_bits(own, opp);
        if m == 0 {
            out.push(Move::PASS);
            return;
        }
        while m != 0 {
            out.push(Move(m.trailing_zeros() as u16));
            m &= m - 1;
        }
    }

    fn play(&self, state: &GameState, mv: Move) -> GameState {
        if mv.is_pass() {
            return state.after(state.cells);
        }
        let (own, opp) = bitboards(state);
        let sq = mv.0 as usize;
        let mut f = flips(own, opp, sq) | (1 << sq);
        let mut cells = state.cells;
        let piece = state.to_move.piece();
        while f != 0 {
            cells[f.trailing_zeros() as usize] = piece;
            f &= f - 1;
        }
        state.after(cells)
    }

    fn terminal_outcome(&self, state: &GameState) -> Option<Outcome> {
        let (own, opp) = bitboards(state);
        if moves_bits(own, opp) != 0 || moves_bits(opp, own) != 0 {
            return None;
        }
        let (first, second) = self.disc_counts(state);
        Some(match first.cmp(&second) {
            std::cmp::Ordering::Greater => Outcome::FirstWins,
            std::cmp::Ordering::Less => Outcome::SecondWins,
            std::cmp::Ordering::Equal => Outcome::Draw,
        })
    }

    fn progress_measure(&self, state: &GameState) -> Option<u32> {
        let (own, opp) = bitboards(state);
        Some((own | opp).count_ones())
    }

    fn features(&self, state: &GameState) -> [f64; N_FEATURES] {
        let (own, opp) = bitboards(state);
        let discs = own.count_ones() as f64 - opp.count_ones() as f64;
        let (m_own, m_opp) = (
            moves_bits(own, opp).count_ones() as f64,
            moves_bits(opp, own).count_ones() as f64,
        );
        let corners = (own & CORNERS).count_ones() as f64 - (opp & CORNERS).count_ones() as f64;
        let edges = (own & EDGES).count_ones() as f64 - (opp & EDGES).count_ones() as f64;
        [
            discs / (N * N) as f64,
            (m_own - m_opp) / (m_own + m_opp + 1.0),
            corners / 4.0,
            edges / 16.0,
        ]
    }
}
