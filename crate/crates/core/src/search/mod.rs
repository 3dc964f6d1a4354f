//! Unbounded best-first minimax.
//!
//! Each iteration descends from a start node along the best child (by
//! completed value, negamax convention) to an unexpanded node, expands it,
//! and backpropagates. [`SearchConfig`] toggles the four variant axes
//! independently; [`Preset`] names the standard combinations.

mod engine;
mod graph;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::GameError;
use crate::transposition::TableError;

pub use engine::{search, Cursor, ExpansionRecord, Searcher, StepKind};
pub use graph::{NodeId, NodeRecord, Path, SearchGraph, TieBreaker};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("every child of the node at the end of the path is resolved")]
    AllChildrenResolved { path: Path },
    #[error("descent started from a resolved node")]
    StartResolved,
    #[error("terminal node handed to expansion")]
    TerminalLeaf,
    #[error("node is already expanded")]
    AlreadyExpanded,
    #[error("non-terminal state without legal moves")]
    NoLegalMoves,
    #[error("node is not expanded")]
    NotExpanded,
    #[error("root is resolved; search is complete")]
    RootResolved,
    #[error("root has not been expanded")]
    RootNotExpanded,
    #[error("cannot search from a terminal state")]
    TerminalState,
    #[error("iteration budget must be at least 1")]
    InvalidBudget,
    #[error("progress measure did not increase along an edge")]
    ProgressViolation,
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backprop {
    /// Recompute every node up to the root and restart from the root.
    Full,
    /// Stop at the first unchanged node and restart from it.
    KorfChickering,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalEvalMode {
    Exact,
    Heuristic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    Iterations(u64),
    WallClockMillis(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Lowest index in the stable child order.
    FirstChild,
    /// Uniform among the tied children, from a seeded stream.
    SeededRandom(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SearchConfig {
    pub use_tt: bool,
    pub backprop: Backprop,
    pub completion: bool,
    pub terminal_eval: TerminalEvalMode,
    pub budget: Budget,
    pub tie_break: TieBreak,
    pub rng_seed: u64,
    /// Keep exact position encodings in the transposition table and check
    /// every probe and edge (collision and acyclicity checks).
    #[serde(default)]
    pub verify_keys: bool,
}

pub const DEFAULT_ITERATIONS: u64 = 2000;

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig::preset(Preset::UbfmRef)
    }
}

impl SearchConfig {
    pub fn preset(preset: Preset) -> SearchConfig {
        let reference = SearchConfig {
            use_tt: true,
            backprop: Backprop::Full,
            completion: true,
            terminal_eval: TerminalEvalMode::Exact,
            budget: Budget::Iterations(DEFAULT_ITERATIONS),
            tie_break: TieBreak::FirstChild,
            rng_seed: 0,
            verify_keys: false,
        };
        match preset {
            Preset::UbfmRef => reference,
            Preset::NoCompletion => SearchConfig {
                completion: false,
                ..reference
            },
            Preset::NoTt => SearchConfig {
                use_tt: false,
                ..reference
            },
            Preset::KcBackprop => SearchConfig {
                backprop: Backprop::KorfChickering,
                ..reference
            },
            Preset::NoCompletionNoExactTerminal => SearchConfig {
                completion: false,
                terminal_eval: TerminalEvalMode::Heuristic,
                ..reference
            },
            Preset::NoExactTerminal => SearchConfig {
                terminal_eval: TerminalEvalMode::Heuristic,
                ..reference
            },
        }
    }

    pub fn with_budget(mut self, budget: Budget) -> SearchConfig {
        self.budget = budget;
        self
    }

    pub fn with_iterations(self, n: u64) -> SearchConfig {
        self.with_budget(Budget::Iterations(n))
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        match self.budget {
            Budget::Iterations(0) => Err(SearchError::InvalidBudget),
            _ => Ok(()),
        }
    }
}

/// Named variant configurations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// Transposition table, full backpropagation, completion, exact terminals.
    UbfmRef,
    NoCompletion,
    NoTt,
    KcBackprop,
    NoCompletionNoExactTerminal,
    /// Exact terminal evaluation removed alone; not part of the standard
    /// lineup.
    NoExactTerminal,
}

impl Preset {
    /// The reference configuration and the four variants measured against it.
    pub const LINEUP: [Preset; 5] = [
        Preset::UbfmRef,
        Preset::NoCompletion,
        Preset::NoTt,
        Preset::KcBackprop,
        Preset::NoCompletionNoExactTerminal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::UbfmRef => "ubfm_ref",
            Preset::NoCompletion => "no_completion",
            Preset::NoTt => "no_tt",
            Preset::KcBackprop => "kc_backprop",
            Preset::NoCompletionNoExactTerminal => "no_completion_no_exact_terminal",
            Preset::NoExactTerminal => "no_exact_terminal",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::LINEUP
            .into_iter()
            .chain([Preset::NoExactTerminal])
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown variant `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub iterations: u64,
    pub nodes_expanded: u64,
    /// Distinct state keys among expanded nodes. Equals `nodes_expanded`
    /// when the transposition table is on.
    pub distinct_states_expanded: u64,
    /// Node records allocated in the search graph, i.e. states generated and
    /// evaluated.
    pub nodes_created: u64,
    pub max_depth_reached: u64,
    pub root_resolved: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_differ_in_named_axes_only() {
        let r = SearchConfig::preset(Preset::UbfmRef);
        assert!(r.use_tt && r.completion);
        assert_eq!(r.backprop, Backprop::Full);
        assert_eq!(r.terminal_eval, TerminalEvalMode::Exact);

        let axes = |c: &SearchConfig| {
            [
                c.use_tt != r.use_tt,
                c.backprop != r.backprop,
                c.completion != r.completion,
                c.terminal_eval != r.terminal_eval,
            ]
        };
        let cases = [
            (Preset::NoCompletion, [false, false, true, false]),
            (Preset::NoTt, [true, false, false, false]),
            (Preset::KcBackprop, [false, true, false, false]),
            (Preset::NoCompletionNoExactTerminal, [false, false, true, true]),
            (Preset::NoExactTerminal, [false, false, false, true]),
        ];
        for (p, expected) in cases {
            let c = SearchConfig::preset(p);
            assert_eq!(axes(&c), expected, "{p}");
            assert_eq!((c.budget, c.tie_break, c.rng_seed), (r.budget, r.tie_break, r.rng_seed));
        }
    }

    #[test]
    fn preset_names_round_trip() {
        for p in Preset::LINEUP.into_iter().chain([Preset::NoExactTerminal]) {
            assert_eq!(p.name().parse::<Preset>(), Ok(p));
        }
        assert!("ubfm".parse::<Preset>().is_err());
    }

    #[test]
    fn zero_iterations_rejected() {
        assert_eq!(
            SearchConfig::default().with_iterations(0).validate(),
            Err(SearchError::InvalidBudget)
        );
        assert!(SearchConfig::default().with_iterations(1).validate().is_ok());
    }
}
