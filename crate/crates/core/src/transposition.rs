//! Zobrist state keys and the transposition table that shares node records
//! between move orders reaching the same position.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::game::{Game, GameDescriptor, GameState, Player, MAX_CELLS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableError {
    #[error("key {key:#018x} maps two distinct positions")]
    KeyCollision { key: u64 },
    #[error("game `{0}` has no progress measure; positions could repeat")]
    NoProgressMeasure(&'static str),
}

/// Default seed for key generation; mixed with the game name so each game
/// gets its own tables.
pub const DEFAULT_ZOBRIST_SEED: u64 = 0x5eed_cafe_f00d_0001;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZobristTables {
    cells: usize,
    alphabet: usize,
    keys: Vec<u64>,
    side: u64,
}

fn name_hash(name: &str) -> u64 {
    // FNV-1a
    name.bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

impl ZobristTables {
    pub fn new(desc: &GameDescriptor, seed: u64) -> ZobristTables {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ name_hash(desc.name));
        let cells = desc.cells();
        let keys = (0..cells * desc.alphabet).map(|_| rng.gen()).collect();
        ZobristTables {
            cells,
            alphabet: desc.alphabet,
            keys,
            side: rng.gen(),
        }
    }

    pub fn for_game(game: &dyn Game) -> ZobristTables {
        ZobristTables::new(game.descriptor(), DEFAULT_ZOBRIST_SEED)
    }

    #[inline]
    fn key_of(&self, cell: usize, content: u8) -> u64 {
        self.keys[cell * self.alphabet + content as usize]
    }

    /// Key computed from scratch: XOR over every cell's content key, plus
    /// the side key when the second player is to move.
    pub fn state_key(&self, state: &GameState) -> u64 {
        let mut k = 0;
        for (i, &c) in state.cells()[..self.cells].iter().enumerate() {
            k ^= self.key_of(i, c);
        }
        if state.to_move() == Player::Second {
            k ^= self.side;
        }
        k
    }

    /// Updates `key` of `from` to the key of `to` by touching only the cells
    /// that differ and the side to move.
    pub fn update(&self, key: u64, from: &GameState, to: &GameState) -> u64 {
        let mut k = key;
        let (a, b): (&[u8; MAX_CELLS], &[u8; MAX_CELLS]) = (from.cells(), to.cells());
        for i in 0..self.cells {
            if a[i] != b[i] {
                k ^= self.key_of(i, a[i]) ^ self.key_of(i, b[i]);
            }
        }
        if from.to_move() != to.to_move() {
            k ^= self.side;
        }
        k
    }
}

/// Map from state key to a node handle. At most one handle per key.
///
/// With key verification on, the exact position encoding of every entry is
/// kept and each probe is checked against it, so a 64-bit collision surfaces
/// as [`TableError::KeyCollision`] instead of silently merging two states.
#[derive(Debug)]
pub struct TranspositionTable<H> {
    entries: HashMap<u64, H>,
    canonical: Option<HashMap<u64, u128>>,
}

impl<H: Copy> TranspositionTable<H> {
    pub fn new(game: &dyn Game, verify_keys: bool) -> Result<Self, TableError> {
        if !game.descriptor().has_progress_measure {
            return Err(TableError::NoProgressMeasure(game.name()));
        }
        Ok(TranspositionTable {
            entries: HashMap::new(),
            canonical: verify_keys.then(HashMap::new),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: u64) -> Option<H> {
        self.entries.get(&key).copied()
    }

    /// Returns the handle stored under `key`, or inserts the one produced by
    /// `create`. The flag is true when a new entry was made.
    pub fn lookup_or_create(
        &mut self,
        key: u64,
        state: &GameState,
        create: impl FnOnce() -> H,
    ) -> Result<(H, bool), TableError> {
        if let Some(canonical) = &mut self.canonical {
            let packed = state.packed();
            match canonical.entry(key) {
                Entry::Occupied(e) if *e.get() != packed => {
                    eprintln!("transposition: key collision on {key:#018x}");
                    return Err(TableError::KeyCollision { key });
                }
                Entry::Occupied(_) => {}
                Entry::Vacant(e) => {
                    e.insert(packed);
                }
            }
        }
        match self.entries.entry(key) {
            Entry::Occupied(e) => Ok((*e.get(), false)),
            Entry::Vacant(e) => Ok((*e.insert(create()), true)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{all_games, Move, HEX5, OTHELLO6, TICTACTOE};
    use std::collections::HashSet;

    #[test]
    fn key_is_deterministic_and_regenerable() {
        let a = ZobristTables::for_game(&TICTACTOE);
        let b = ZobristTables::for_game(&TICTACTOE);
        assert_eq!(a, b);
        let s = TICTACTOE.initial_state();
        assert_eq!(a.state_key(&s), a.state_key(&s));
        assert_eq!(a.state_key(&s), b.state_key(&s));
        assert_ne!(ZobristTables::for_game(&HEX5).keys[..9], a.keys[..9]);
    }

    #[test]
    fn apply_then_undo_restores_key() {
        let z = ZobristTables::for_game(&TICTACTOE);
        let s = TICTACTOE.initial_state();
        let k0 = z.state_key(&s);
        let t = TICTACTOE.play(&s, Move(4));
        let k1 = z.update(k0, &s, &t);
        assert_ne!(k0, k1);
        assert_eq!(z.update(k1, &t, &s), k0);
    }

    #[test]
    fn incremental_matches_scratch_on_random_sequences() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut moves = Vec::new();
        for g in all_games() {
            let z = ZobristTables::for_game(g);
            for _ in 0..10_000 {
                let mut s = g.initial_state();
                let mut k = z.state_key(&s);
                while !g.is_terminal(&s) {
                    moves.clear();
                    g.generate_moves(&s, &mut moves);
                    let next = g.play(&s, moves[rng.gen_range(0..moves.len())]);
                    k = z.update(k, &s, &next);
                    assert_eq!(k, z.state_key(&next), "{}", g.name());
                    s = next;
                }
            }
        }
    }

    // Distinct move orders that reach the same 6×6 Othello position must
    // produce the same key.
    #[test]
    fn othello_transpositions_share_keys() {
        let z = ZobristTables::for_game(&OTHELLO6);
        let mut by_position: HashMap<u128, u64> = HashMap::new();
        let mut transpositions = 0;
        let mut frontier = vec![OTHELLO6.initial_state()];
        for _ in 0..5 {
            let mut next = Vec::new();
            for s in &frontier {
                for m in OTHELLO6.legal_moves(s).unwrap_or_default() {
                    let t = OTHELLO6.play(s, m);
                    let key = z.update(z.state_key(s), s, &t);
                    match by_position.get(&t.packed()) {
                        Some(&k) => {
                            assert_eq!(k, key);
                            transpositions += 1;
                        }
                        None => {
                            by_position.insert(t.packed(), key);
                            next.push(t);
                        }
                    }
                }
            }
            frontier = next;
        }
        assert!(transpositions > 0);
    }

    fn all_states(game: &dyn Game) -> Vec<GameState> {
        let mut seen = HashSet::new();
        let mut stack = vec![game.initial_state()];
        let mut out = Vec::new();
        while let Some(s) = stack.pop() {
            if !seen.insert(s.packed()) {
                continue;
            }
            out.push(s);
            if let Ok(moves) = game.legal_moves(&s) {
                stack.extend(moves.into_iter().map(|m| game.play(&s, m)));
            }
        }
        out
    }

    #[test]
    fn no_collisions_over_tictactoe_and_small_hex() {
        let ttt = all_states(&TICTACTOE);
        assert_eq!(ttt.len(), 5478);
        let hex3 = crate::game::Hex::new(3, "hex3");
        let hex = all_states(&hex3);
        for (g, states) in [(&TICTACTOE as &dyn Game, ttt), (&hex3 as &dyn Game, hex)] {
            let z = ZobristTables::for_game(g);
            let mut table = TranspositionTable::new(g, true).unwrap();
            for (i, s) in states.iter().enumerate() {
                let (h, created) = table.lookup_or_create(z.state_key(s), s, || i).unwrap();
                assert!(created);
                assert_eq!(h, i);
            }
            assert_eq!(table.len(), states.len());
        }
    }

    #[test]
    fn second_probe_returns_same_handle() {
        let mut table = TranspositionTable::new(&TICTACTOE, false).unwrap();
        let s = TICTACTOE.initial_state();
        assert_eq!(table.lookup_or_create(7, &s, || 1u32), Ok((1, true)));
        assert_eq!(table.lookup_or_create(7, &s, || 2u32), Ok((1, false)));
    }

    #[test]
    fn verification_flags_collisions() {
        let mut table = TranspositionTable::new(&TICTACTOE, true).unwrap();
        let s = TICTACTOE.initial_state();
        let t = TICTACTOE.play(&s, Move(0));
        table.lookup_or_create(42, &s, || 0u32).unwrap();
        assert_eq!(
            table.lookup_or_create(42, &t, || 1u32),
            Err(TableError::KeyCollision { key: 42 })
        );
    }

    #[test]
    fn refuses_games_without_progress_measure() {
        #[derive(Debug)]
        struct Loopy(GameDescriptor);
        impl Game for Loopy {
            fn descriptor(&self) -> &GameDescriptor {
                &self.0
            }
            fn initial_state(&self) -> GameState {
                TICTACTOE.initial_state()
            }
            fn generate_moves(&self, _: &GameState, out: &mut Vec<Move>) {
                out.push(Move::PASS);
            }
            fn play(&self, s: &GameState, _: Move) -> GameState {
                s.after(s.cells)
            }
            fn terminal_outcome(&self, _: &GameState) -> Option<crate::game::Outcome> {
                None
            }
            fn progress_measure(&self, _: &GameState) -> Option<u32> {
                None
            }
            fn features(&self, _: &GameState) -> [f64; crate::game::N_FEATURES] {
                [0.0; crate::game::N_FEATURES]
            }
        }
        let mut desc = TICTACTOE.descriptor().clone();
        desc.name = "loopy";
        desc.has_progress_measure = false;
        let loopy = Loopy(desc);
        assert_eq!(
            TranspositionTable::<u32>::new(&loopy, false).unwrap_err(),
            TableError::NoProgressMeasure("loopy")
        );
    }
}
