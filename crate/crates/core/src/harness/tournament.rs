use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::matches::{play_match, MatchResult, MatchSpec};
use super::report::{summarise, MatchErrorRecord, MatchRecord, TournamentReport};
use crate::eval::{generate_eval_sets, splitmix64, EvalError, EvalSet};
use crate::game::{game_by_name, Game, GameError, Player};
use crate::search::{
    Backprop, Budget, Preset, SearchConfig, TerminalEvalMode, TieBreak, DEFAULT_ITERATIONS,
};

#[derive(Debug, Error)]
pub enum TournamentError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("invalid tournament config: {0}")]
    Config(String),
}

/// A variant as written in a config file: a preset name or explicit axes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VariantSpec {
    Preset(Preset),
    Axes {
        name: String,
        use_tt: bool,
        backprop: Backprop,
        completion: bool,
        terminal_eval: TerminalEvalMode,
        #[serde(default = "first_child")]
        tie_break: TieBreak,
    },
}

fn first_child() -> TieBreak {
    TieBreak::FirstChild
}

impl VariantSpec {
    pub fn name(&self) -> String {
        match self {
            VariantSpec::Preset(p) => p.name().to_string(),
            VariantSpec::Axes { name, .. } => name.clone(),
        }
    }

    pub fn config(&self, budget: Budget) -> SearchConfig {
        match *self {
            VariantSpec::Preset(p) => SearchConfig::preset(p).with_budget(budget),
            VariantSpec::Axes {
                use_tt,
                backprop,
                completion,
                terminal_eval,
                tie_break,
                ..
            } => SearchConfig {
                use_tt,
                backprop,
                completion,
                terminal_eval,
                tie_break,
                ..SearchConfig::default().with_budget(budget)
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalParams {
    pub sets: usize,
    pub members: usize,
    pub seed: u64,
    /// Salt every member so that ties between distinct states vanish.
    #[serde(default)]
    pub injective: bool,
}

impl Default for EvalParams {
    fn default() -> Self {
        EvalParams {
            sets: 3,
            members: 5,
            seed: 0x00e7_a15e_75ee_d001,
            injective: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TournamentConfig {
    pub games: Vec<String>,
    /// Each variant plays the benchmark from both seats.
    pub variants: Vec<VariantSpec>,
    #[serde(default = "reference")]
    pub benchmark: VariantSpec,
    #[serde(default)]
    pub evals: EvalParams,
    pub budget: Budget,
    pub master_seed: u64,
    #[serde(default = "default_resamples")]
    pub resamples: usize,
}

fn reference() -> VariantSpec {
    VariantSpec::Preset(Preset::UbfmRef)
}

fn default_resamples() -> usize {
    10_000
}

pub const DESK_GAMES: [&str; 5] = ["tictactoe", "hex5", "breakthrough5", "othello6", "connect5x4"];

impl Default for TournamentConfig {
    /// The desk-scale lineup: five games, 3 × 5 heuristics, 2000 iterations
    /// per move, every preset against the reference.
    fn default() -> Self {
        TournamentConfig {
            games: DESK_GAMES.iter().map(|g| g.to_string()).collect(),
            variants: Preset::LINEUP.into_iter().map(VariantSpec::Preset).collect(),
            benchmark: reference(),
            evals: EvalParams::default(),
            budget: Budget::Iterations(DEFAULT_ITERATIONS),
            master_seed: 2024,
            resamples: default_resamples(),
        }
    }
}

impl TournamentConfig {
    pub fn from_toml(text: &str) -> Result<TournamentConfig, TournamentError> {
        let config: TournamentConfig =
            toml::from_str(text).map_err(|e| TournamentError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<(), TournamentError> {
        let bad = |m: &str| Err(TournamentError::Config(m.to_string()));
        if self.games.is_empty() {
            return bad("no games");
        }
        if self.variants.is_empty() {
            return bad("no variants");
        }
        if self.evals.sets == 0 || self.evals.members < 2 {
            return bad("need at least one eval set of two members");
        }
        if self.resamples == 0 {
            return bad("resamples must be positive");
        }
        if let Budget::Iterations(0) = self.budget {
            return bad("iteration budget must be at least 1");
        }
        for g in &self.games {
            game_by_name(g)?;
        }
        Ok(())
    }

    pub fn resolved_games(&self) -> Result<Vec<&'static dyn Game>, TournamentError> {
        Ok(self.games.iter().map(|g| game_by_name(g)).collect::<Result<_, _>>()?)
    }

    /// Matches the pairing rule produces: per game and eval set, every
    /// ordered pair of distinct members, both seats, every variant.
    pub fn expected_match_count(&self) -> usize {
        let m = self.evals.members;
        self.games.len() * self.evals.sets * m * (m - 1) * 2 * self.variants.len()
    }

    pub fn eval_sets(&self, game: &'static dyn Game) -> Result<Vec<EvalSet>, TournamentError> {
        let mut sets = generate_eval_sets(game, self.evals.sets, self.evals.members, self.evals.seed)?;
        if self.evals.injective {
            for set in &mut sets {
                for m in &mut set.members {
                    let salt = splitmix64(set.seed ^ m.id.member as u64);
                    *m = m.clone().injective(salt);
                }
            }
        }
        Ok(sets)
    }
}

/// Position of a match in the tournament; reports are ordered by it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct MatchKey {
    pub game: usize,
    pub set: usize,
    /// Member used by the variant.
    pub member_a: usize,
    /// Member used by the benchmark.
    pub member_b: usize,
    pub variant: usize,
    pub seat_a: Player,
}

impl MatchKey {
    pub fn seed(&self, master_seed: u64) -> u64 {
        [
            self.game as u64,
            self.set as u64,
            self.member_a as u64,
            self.member_b as u64,
            self.variant as u64,
            (self.seat_a == Player::Second) as u64,
        ]
        .iter()
        .fold(splitmix64(master_seed), |h, &x| splitmix64(h ^ x))
    }
}

/// Every match of the tournament, in key order.
pub fn enumerate_matches(
    config: &TournamentConfig,
    eval_sets: &[(&'static dyn Game, Vec<EvalSet>)],
) -> Vec<(MatchKey, MatchSpec)> {
    let benchmark = config.benchmark.config(config.budget);
    let mut out = Vec::with_capacity(config.expected_match_count());
    for (gi, (game, sets)) in eval_sets.iter().enumerate() {
        for set in sets {
            for (i, eval_a) in set.members.iter().enumerate() {
                for (j, eval_b) in set.members.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    for (vi, variant) in config.variants.iter().enumerate() {
                        for seat_a in [Player::First, Player::Second] {
                            let key = MatchKey {
                                game: gi,
                                set: set.index,
                                member_a: i,
                                member_b: j,
                                variant: vi,
                                seat_a,
                            };
                            out.push((
                                key,
                                MatchSpec {
                                    game: *game,
                                    config_a: variant.config(config.budget),
                                    config_b: benchmark,
                                    eval_a: eval_a.clone(),
                                    eval_b: eval_b.clone(),
                                    seat_a,
                                    seed: key.seed(config.master_seed),
                                },
                            ));
                        }
                    }
                }
            }
        }
    }
    out.sort_by_key(|(k, _)| *k);
    out
}

/// Runs every match (in parallel) and aggregates the report. Match errors
/// are collected, not fatal.
pub fn run_tournament(config: &TournamentConfig) -> Result<TournamentReport, TournamentError> {
    run_tournament_with(config, &BTreeMap::new())
}

/// As [`run_tournament`], with eval sets for some games supplied instead of
/// generated.
pub fn run_tournament_with(
    config: &TournamentConfig,
    eval_overrides: &BTreeMap<String, Vec<EvalSet>>,
) -> Result<TournamentReport, TournamentError> {
    config.validate()?;
    let mut eval_sets = Vec::new();
    for game in config.resolved_games()? {
        let sets = match eval_overrides.get(game.name()) {
            Some(sets) => sets.clone(),
            None => config.eval_sets(game)?,
        };
        eval_sets.push((game, sets));
    }
    let specs = enumerate_matches(config, &eval_sets);
    let results: Vec<(MatchKey, Result<MatchResult, String>)> = specs
        .par_iter()
        .map(|(key, spec)| (*key, play_match(spec).map_err(|e| e.to_string())))
        .collect();
    let mut matches = Vec::new();
    let mut errors = Vec::new();
    for (key, result) in results {
        match result {
            Ok(result) => matches.push(MatchRecord {
                variant: config.variants[key.variant].name(),
                key,
                result,
            }),
            Err(message) => errors.push(MatchErrorRecord { key, message }),
        }
    }
    Ok(summarise(config, matches, errors))
}
