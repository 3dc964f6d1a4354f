use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eval::{generate_eval_sets, splitmix64, Evaluator};
use crate::game::{random_playout, Game, GameState};
use crate::search::{Backprop, ExpansionRecord, SearchConfig, SearchError, Searcher};

/// Most random opening plies before a traced search.
pub const MAX_OPENING_PLIES: usize = 4;

/// Start position and evaluator derived from a trace seed: a short random
/// opening and the first member of a seeded eval set, salted when
/// `injective`.
pub fn seeded_setup(game: &'static dyn Game, seed: u64, injective: bool) -> (GameState, Evaluator) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = game.initial_state();
    for _ in 0..8 {
        let plies = rng.gen_range(0..=MAX_OPENING_PLIES);
        state = random_playout(game, plies, &mut rng);
        if !game.is_terminal(&state) {
            break;
        }
    }
    if game.is_terminal(&state) {
        state = game.initial_state();
    }
    let mut h = generate_eval_sets(game, 1, 2, seed)
        .expect("shape is valid")
        .remove(0)
        .members
        .remove(0);
    if injective {
        h = h.injective(splitmix64(seed));
    }
    (state, Evaluator::new(h))
}

/// One iteration at which the two logs disagree; `None` means that run had
/// already stopped.
#[derive(Clone, Debug, PartialEq)]
pub struct Divergence {
    pub iteration: usize,
    pub full: Option<ExpansionRecord>,
    pub kc: Option<ExpansionRecord>,
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |r: &Option<ExpansionRecord>| r.map(|r| r.to_string()).unwrap_or_else(|| "-".into());
        write!(f, "{}\tfull: {}\tkc: {}", self.iteration, show(&self.full), show(&self.kc))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub full: Vec<ExpansionRecord>,
    pub kc: Vec<ExpansionRecord>,
    pub divergences: Vec<Divergence>,
}

impl Trace {
    pub fn identical(&self) -> bool {
        self.divergences.is_empty()
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.divergences {
            writeln!(f, "{d}")?;
        }
        writeln!(f, "{} divergences", self.divergences.len())
    }
}

/// Runs the same search twice, once per backpropagation rule, and compares
/// the expansion logs line by line. `config.backprop` is ignored.
pub fn trace_backprop(
    game: &'static dyn Game,
    state: GameState,
    eval: &Evaluator,
    config: SearchConfig,
) -> Result<Trace, SearchError> {
    let run = |backprop| -> Result<Vec<ExpansionRecord>, SearchError> {
        let config = SearchConfig { backprop, ..config };
        let mut s = Searcher::new(game, state, eval.clone(), config)?.with_log();
        s.run()?;
        Ok(s.log().to_vec())
    };
    let full = run(Backprop::Full)?;
    let kc = run(Backprop::KorfChickering)?;
    let divergences = (0..full.len().max(kc.len()))
        .filter_map(|i| {
            let (a, b) = (full.get(i).copied(), kc.get(i).copied());
            (a != b).then_some(Divergence {
                iteration: i,
                full: a,
                kc: b,
            })
        })
        .collect();
    Ok(Trace { full, kc, divergences })
}
