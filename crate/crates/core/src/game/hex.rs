//! Hex on an n×n rhombus. The first player connects the top and bottom
//! rows, the second player connects the left and right columns.

use super::{
    Game, GameDescriptor, GameState, Move, Outcome, Player, SolverHint, EMPTY, MAX_CELLS, N_FEATURES,
};

#[derive(Debug)]
pub struct Hex {
    n: usize,
    desc: GameDescriptor,
    board: u64,
    not_left: u64,
    not_right: u64,
}

impl Hex {
    pub const fn new(n: usize, name: &'static str) -> Hex {
        let board = (1u64 << (n * n)) - 1;
        let (mut left, mut right) = (0u64, 0u64);
        let mut r = 0;
        while r < n {
            left |= 1 << (r * n);
            right |= 1 << (r * n + n - 1);
            r += 1;
        }
        Hex {
            n,
            board,
            not_left: board & !left,
            not_right: board & !right,
            desc: GameDescriptor {
                name,
                rows: n,
                cols: n,
                alphabet: 3,
                symbols: ['.', 'X', 'O'],
                has_progress_measure: true,
            },
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    fn neighbours(&self, i: usize, out: &mut [usize; 6]) -> usize {
        let n = self.n as isize;
        let (r, c) = ((i / self.n) as isize, (i % self.n) as isize);
        let mut k = 0;
        for (dr, dc) in [(-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0)] {
            let (rr, cc) = (r + dr, c + dc);
            if rr >= 0 && rr < n && cc >= 0 && cc < n {
                out[k] = (rr * n + cc) as usize;
                k += 1;
            }
        }
        k
    }

    /// Labels each stone of `piece` with its group and returns, per group,
    /// the (min, max) extent along the player's connection axis.
    fn groups(&self, state: &GameState, piece: u8) -> Vec<(usize, usize)> {
        let n = self.n;
        let mut seen = [false; MAX_CELLS];
        let mut stack = Vec::with_capacity(n * n);
        let mut spans = Vec::new();
        let mut nb = [0usize; 6];
        for start in 0..n * n {
            if seen[start] || state.cells[start] != piece {
                continue;
            }
            seen[start] = true;
            stack.push(start);
            let (mut lo, mut hi) = (usize::MAX, 0);
            while let Some(i) = stack.pop() {
                let axis = if piece == 1 { i / n } else { i % n };
                lo = lo.min(axis);
                hi = hi.max(axis);
                let k = self.neighbours(i, &mut nb);
                for &j in &nb[..k] {
                    if !seen[j] && state.cells[j] == piece {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            spans.push((lo, hi));
        }
        spans
    }

    fn masks(&self, state: &GameState, piece: u8) -> (u64, u64) {
        let (mut own, mut empty) = (0u64, 0u64);
        for i in 0..self.n * self.n {
            match state.cells[i] {
                EMPTY => empty |= 1 << i,
                c if c == piece => own |= 1 << i,
                _ => {}
            }
        }
        (own, empty)
    }

    fn spread(&self, m: u64) -> u64 {
        let (n, not_left, not_right) = (self.n, self.not_left, self.not_right);
        (((m & not_right) << 1)
            | ((m & not_left) >> 1)
            | (m << n)
            | (m >> n)
            | ((m & not_right) >> (n - 1))
            | ((m & not_left) << (n - 1)))
            & self.board
    }

    /// Fewest empty cells `player` still needs to fill to connect its two
    /// sides; `None` when the opponent has cut every path.
    pub fn distance(&self, state: &GameState, player: Player) -> Option<u32> {
        let n = self.n;
        let (own, empty) = self.masks(state, player.piece());
        let line = |k: usize| -> u64 {
            (0..n).fold(0, |a, j| {
                a | 1 << if player == Player::First { k * n + j } else { j * n + k }
            })
        };
        let (start, goal) = (line(0), line(n - 1));
        let close = |mut x: u64| loop {
            let next = x | (self.spread(x) & own);
            if next == x {
                return x;
            }
            x = next;
        };
        let mut reached = close(start & own);
        for k in 0.. {
            if reached & goal != 0 {
                return Some(k);
            }
            let next = close(reached | ((self.spread(reached) | start) & empty));
            if next == reached {
                return None;
            }
            reached = next;
        }
        unreachable!()
    }

    /// Sum of the two-distances to both of `player`'s sides, minimised over
    /// empty cells. The two-distance of a cell is one more than the
    /// second-best neighbour's, since the opponent can block the best one;
    /// own stones are passed through freely.
    fn potential(&self, state: &GameState, player: Player) -> u32 {
        const INF: u32 = 1000;
        let n = self.n;
        let (own, empty) = self.masks(state, player.piece());
        let line = |k: usize| -> u64 {
            (0..n).fold(0, |a, j| {
                a | 1 << if player == Player::First { k * n + j } else { j * n + k }
            })
        };
        let (lo_line, hi_line) = (line(0), line(n - 1));

        // Own groups with the empty cells around them.
        let mut groups = [(0u64, 0u64); MAX_CELLS];
        let mut n_groups = 0;
        let mut left = own;
        while left != 0 {
            let mut g = 1u64 << left.trailing_zeros();
            loop {
                let next = g | (self.spread(g) & own);
                if next == g {
                    break;
                }
                g = next;
            }
            left &= !g;
            groups[n_groups] = (g, self.spread(g) & empty);
            n_groups += 1;
        }
        let groups = &groups[..n_groups];
        // One-step links between empty cells through own groups, and the
        // empty cells touching each side that way.
        let mut links = [0u64; MAX_CELLS];
        let (mut touch_lo, mut touch_hi) = (empty & lo_line, empty & hi_line);
        let mut m = empty;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            let around = self.spread(1 << i);
            let mut adj = around & empty;
            for &(g, g_adj) in groups {
                if around & g != 0 {
                    adj |= g_adj;
                    if g & lo_line != 0 {
                        touch_lo |= 1 << i;
                    }
                    if g & hi_line != 0 {
                        touch_hi |= 1 << i;
                    }
                }
            }
            links[i] = adj & !(1 << i);
        }

        let two_distance = |touching: u64| {
            let mut d = [INF; MAX_CELLS];
            let mut assigned = touching;
            let mut m = touching;
            while m != 0 {
                d[m.trailing_zeros() as usize] = 1;
                m &= m - 1;
            }
            for level in 2..INF {
                let mut fresh = 0u64;
                let mut m = empty & !assigned;
                while m != 0 {
                    let i = m.trailing_zeros() as usize;
                    m &= m - 1;
                    if (links[i] & assigned).count_ones() >= 2 {
                        fresh |= 1 << i;
                        d[i] = level;
                    }
                }
                if fresh == 0 {
                    break;
                }
                assigned |= fresh;
            }
            d
        };
        let (lo, hi) = (two_distance(touch_lo), two_distance(touch_hi));
        let mut best = INF;
        let mut m = empty;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            best = best.min(lo[i] + hi[i]);
        }
        best.min(INF)
    }

    fn connected(&self, state: &GameState, player: Player) -> bool {
        self.groups(state, player.piece())
            .iter()
            .any(|&(lo, hi)| lo == 0 && hi == self.n - 1)
    }
}

impl Game for Hex {
    fn descriptor(&self) -> &GameDescriptor {
        &self.desc
    }

    fn initial_state(&self) -> GameState {
        GameState::empty(Player::First)
    }

    fn generate_moves(&self, state: &GameState, out: &mut Vec<Move>) {
        let cells = self.n * self.n;
        out.extend((0..cells).filter(|&i| state.cells[i] == EMPTY).map(|i| Move(i as u16)));
    }

    fn play(&self, state: &GameState, mv: Move) -> GameState {
        let mut cells = state.cells;
        cells[mv.0 as usize] = state.to_move.piece();
        state.after(cells)
    }

    fn terminal_outcome(&self, state: &GameState) -> Option<Outcome> {
        // Only the player who just moved can have completed a chain.
        let last = state.to_move.opponent();
        if self.connected(state, last) {
            return Some(Outcome::win_for(last));
        }
        if self.connected(state, state.to_move) {
            return Some(Outcome::win_for(state.to_move));
        }
        None
    }

    // A player with no open path has lost: the blocking stones contain a
    // connecting chain.
    fn solver_hint(&self, state: &GameState) -> SolverHint {
        let me = state.to_move;
        match (self.distance(state, me), self.distance(state, me.opponent())) {
            (None, _) => SolverHint::Decided(Outcome::win_for(me.opponent())),
            (_, None) => SolverHint::Decided(Outcome::win_for(me)),
            _ => SolverHint::Score(
                self.potential(state, me.opponent()) as i32 - self.potential(state, me) as i32,
            ),
        }
    }

    fn progress_measure(&self, state: &GameState) -> Option<u32> {
        let cells = self.n * self.n;
        Some(state.cells[..cells].iter().filter(|&&c| c != EMPTY).count() as u32)
    }

    fn features(&self, state: &GameState) -> [f64; N_FEATURES] {
        let n = self.n;
        let me = state.to_move.piece();
        let them = state.to_move.opponent().piece();
        let centre = (n as f64 - 1.0) / 2.0;
        let mut central = 0.0;
        let mut material = 0i32;
        let mut mine_lines = [false; 7];
        let mut their_lines = [false; 7];
        for i in 0..n * n {
            let c = state.cells[i];
            if c == EMPTY {
                continue;
            }
            let (r, col) = ((i / n) as f64, (i % n) as f64);
            let w = 1.0 - ((r - centre).abs() + (col - centre).abs()) / (2.0 * centre);
            // Axis coverage: rows for the first player, columns for the second.
            let axis = |p: u8| if p == 1 { i / n } else { i % n };
            if c == me {
                central += w;
                material += 1;
                mine_lines[axis(c)] = true;
            } else if c == them {
                central -= w;
                material -= 1;
                their_lines[axis(c)] = true;
            }
        }
        let span = |piece: u8| {
            self.groups(state, piece)
                .iter()
                .map(|&(lo, hi)| hi + 1 - lo)
                .max()
                .unwrap_or(0) as f64
        };
        let coverage = mine_lines.iter().filter(|&&b| b).count() as f64
            - their_lines.iter().filter(|&&b| b).count() as f64;
        [
            (central / n as f64).clamp(-1.0, 1.0),
            (span(me) - span(them)) / n as f64,
            coverage / n as f64,
            (material as f64 / n as f64).clamp(-1.0, 1.0),
        ]
    }
}
