//! Match play, tournaments, report aggregation and backpropagation traces.

pub mod matches;
pub mod report;
pub mod stats;
pub mod tournament;
pub mod trace;

pub use matches::{play_match, play_match_logged, MatchResult, MatchSpec, MoveRecord, SideStats, Winner};
pub use report::{GameSummary, MatchErrorRecord, MatchRecord, TournamentReport, VariantSummary};
pub use stats::{bootstrap_ci, normal_ci, stratified_mean, Interval, StatsError};
pub use tournament::{
    enumerate_matches, run_tournament, run_tournament_with, EvalParams, MatchKey, TournamentConfig,
    TournamentError, VariantSpec,
};
pub use trace::{seeded_setup, trace_backprop, Divergence, Trace};
