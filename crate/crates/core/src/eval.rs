//! Heuristic and terminal evaluation, and seeded families of heuristics.
//!
//! Heuristics are linear in the game's features and squashed with `tanh`, so
//! they always land strictly inside `(-1, 1)`; the closed endpoints are left
//! to exact terminal values.

use std::fmt;
use std::hint::black_box;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{game_by_name, Game, GameError, GameState, Outcome, Player, N_FEATURES};

/// Scale applied to the weighted feature sum before squashing.
pub const GAIN: f64 = 1.5;

/// Largest magnitude a heuristic value may take.
pub const HEURISTIC_BOUND: f64 = 1.0 - 1.0 / (1u64 << 20) as f64;

/// Full width of the injectivity perturbation; its magnitude stays below 2^-30.
const SALT_WIDTH: f64 = 0.999 / (1u64 << 29) as f64;

pub const DEFAULT_SETS: usize = 3;
pub const DEFAULT_MEMBERS: usize = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("heuristic evaluation of a terminal state")]
    TerminalState,
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("eval set file: {0}")]
    Format(String),
    #[error("need at least one set and two members, got {sets} x {members}")]
    BadShape { sets: usize, members: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EvalId {
    pub set: usize,
    pub member: usize,
}

impl fmt::Display for EvalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.set, self.member)
    }
}

/// SplitMix64 mixing step; derives independent seeds from related inputs.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// A heuristic evaluation function `f`: weighted features through `tanh`.
#[derive(Clone, Debug)]
pub struct HeuristicEval {
    game: &'static dyn Game,
    pub weights: [f64; N_FEATURES],
    pub id: EvalId,
    /// When set, a tiny state-keyed perturbation makes values injective.
    pub injectivity_salt: Option<u64>,
}

impl PartialEq for HeuristicEval {
    fn eq(&self, other: &Self) -> bool {
        self.game.name() == other.game.name()
            && self.weights == other.weights
            && self.id == other.id
            && self.injectivity_salt == other.injectivity_salt
    }
}

impl HeuristicEval {
    pub fn new(game: &'static dyn Game, weights: [f64; N_FEATURES], id: EvalId) -> HeuristicEval {
        HeuristicEval {
            game,
            weights,
            id,
            injectivity_salt: None,
        }
    }

    /// Equal weights on every feature.
    pub fn uniform(game: &'static dyn Game) -> HeuristicEval {
        HeuristicEval::new(game, [1.0 / N_FEATURES as f64; N_FEATURES], EvalId { set: 0, member: 0 })
    }

    pub fn injective(mut self, salt: u64) -> HeuristicEval {
        self.injectivity_salt = Some(salt);
        self
    }

    pub fn game(&self) -> &'static dyn Game {
        self.game
    }

    /// Value of a non-terminal state for the player to move.
    pub fn evaluate(&self, state: &GameState) -> Result<f64, EvalError> {
        if self.game.is_terminal(state) {
            return Err(EvalError::TerminalState);
        }
        Ok(self.evaluate_unchecked(state))
    }

    /// Same formula without the terminal check. Used when terminal states are
    /// deliberately scored by the heuristic.
    pub fn evaluate_unchecked(&self, state: &GameState) -> f64 {
        let features = self.game.features(state);
        let sum: f64 = features.iter().zip(&self.weights).map(|(f, w)| f * w).sum();
        let mut v = (GAIN * sum).tanh();
        if let Some(salt) = self.injectivity_salt {
            let packed = state.packed();
            let h = splitmix64(splitmix64(packed as u64 ^ salt) ^ (packed >> 64) as u64);
            let unit = (h >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            v += unit * SALT_WIDTH;
        }
        v.clamp(-HEURISTIC_BOUND, HEURISTIC_BOUND)
    }
}

/// Exact terminal evaluation `f_t`, optionally padded with busy-work to
/// emulate an expensive exact evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TerminalEval {
    pub cost_units: u64,
}

impl TerminalEval {
    pub fn exact() -> TerminalEval {
        TerminalEval { cost_units: 0 }
    }

    pub fn evaluate(&self, outcome: Outcome, perspective: Player) -> f64 {
        if self.cost_units > 0 {
            burn(self.cost_units);
        }
        evaluate_terminal(outcome, perspective)
    }
}

/// +1 win, -1 loss, 0 draw from `perspective`.
pub fn evaluate_terminal(outcome: Outcome, perspective: Player) -> f64 {
    outcome.score_for(perspective) as f64
}

/// Wraps a terminal evaluator so each call also burns `cost_units` steps of
/// deterministic busy-work. Values are unchanged.
pub fn costly_terminal_wrapper(base: TerminalEval, cost_units: u64) -> TerminalEval {
    TerminalEval {
        cost_units: base.cost_units + cost_units,
    }
}

/// xorshift rounds per cost unit; one unit is a few tens of nanoseconds.
const ROUNDS_PER_UNIT: u64 = 32;

fn burn(units: u64) {
    let mut x = black_box(0x2545_f491_4f6c_dd1du64);
    for _ in 0..units * ROUNDS_PER_UNIT {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        x = black_box(x);
    }
    black_box(x);
}

/// Heuristic plus terminal evaluator: everything a search needs to score
/// states.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluator {
    pub heuristic: HeuristicEval,
    pub terminal: TerminalEval,
}

impl Evaluator {
    pub fn new(heuristic: HeuristicEval) -> Evaluator {
        Evaluator {
            heuristic,
            terminal: TerminalEval::exact(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalSet {
    pub index: usize,
    pub seed: u64,
    pub members: Vec<HeuristicEval>,
}

fn set_seed(master_seed: u64, index: usize) -> u64 {
    splitmix64(master_seed ^ splitmix64(index as u64 + 1))
}

/// Draws `n_sets` families of `n_members` heuristics. Weights are uniform in
/// `[0.05, 1)` and normalised to unit L1 norm, so every member favours the
/// same features but with different emphasis.
pub fn generate_eval_sets(
    game: &'static dyn Game,
    n_sets: usize,
    n_members: usize,
    master_seed: u64,
) -> Result<Vec<EvalSet>, EvalError> {
    if n_sets == 0 || n_members < 2 {
        return Err(EvalError::BadShape {
            sets: n_sets,
            members: n_members,
        });
    }
    let sets = (0..n_sets)
        .map(|index| {
            let seed = set_seed(master_seed, index);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let members = (0..n_members)
                .map(|member| {
                    let mut w = [0.0; N_FEATURES];
                    for x in &mut w {
                        *x = rng.gen_range(0.05..1.0);
                    }
                    let norm: f64 = w.iter().sum();
                    for x in &mut w {
                        *x /= norm;
                    }
                    HeuristicEval::new(game, w, EvalId { set: index, member })
                })
                .collect();
            EvalSet {
                index,
                seed,
                members,
            }
        })
        .collect();
    Ok(sets)
}

/// On-disk form of a list of eval sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalSetsFile {
    pub game: String,
    pub master_seed: u64,
    pub sets: Vec<EvalSetRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalSetRecord {
    pub index: usize,
    pub seed: u64,
    pub members: Vec<MemberRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberRecord {
    pub member: usize,
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub injectivity_salt: Option<u64>,
}

impl EvalSetsFile {
    pub fn from_sets(game: &dyn Game, master_seed: u64, sets: &[EvalSet]) -> EvalSetsFile {
        EvalSetsFile {
            game: game.name().to_string(),
            master_seed,
            sets: sets
                .iter()
                .map(|s| EvalSetRecord {
                    index: s.index,
                    seed: s.seed,
                    members: s
                        .members
                        .iter()
                        .map(|m| MemberRecord {
                            member: m.id.member,
                            weights: m.weights.to_vec(),
                            injectivity_salt: m.injectivity_salt,
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_sets(&self) -> Result<Vec<EvalSet>, EvalError> {
        let game = game_by_name(&self.game)?;
        self.sets
            .iter()
            .map(|s| {
                let members = s
                    .members
                    .iter()
                    .map(|m| {
                        let weights: [f64; N_FEATURES] =
                            m.weights.as_slice().try_into().map_err(|_| {
                                EvalError::Format(format!(
                                    "member {} needs {N_FEATURES} weights",
                                    m.member
                                ))
                            })?;
                        Ok(HeuristicEval {
                            game,
                            weights,
                            id: EvalId {
                                set: s.index,
                                member: m.member,
                            },
                            injectivity_salt: m.injectivity_salt,
                        })
                    })
                    .collect::<Result<_, EvalError>>()?;
                Ok(EvalSet {
                    index: s.index,
                    seed: s.seed,
                    members,
                })
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("eval sets serialise")
    }

    pub fn from_json(text: &str) -> Result<EvalSetsFile, EvalError> {
        serde_json::from_str(text).map_err(|e| EvalError::Format(e.to_string()))
    }
}
