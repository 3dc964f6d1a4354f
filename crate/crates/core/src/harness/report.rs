use serde::Serialize;

use super::matches::MatchResult;
use super::stats::{bootstrap_ci, mean, normal_ci, stratified_mean, Interval, Z_95};
use super::tournament::{MatchKey, TournamentConfig};
use crate::eval::splitmix64;
use crate::search::SearchConfig;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchRecord {
    pub key: MatchKey,
    pub variant: String,
    pub result: MatchResult,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchErrorRecord {
    pub key: MatchKey,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GameSummary {
    pub game: String,
    pub matches: usize,
    /// Mean score of the variant; `None` when no match completed.
    pub mean: Option<f64>,
    /// Mean ± 1.96·SE.
    pub ci: Option<Interval>,
    /// `100 · mean` rounded, as displayed in tables.
    pub percent: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariantSummary {
    pub variant: String,
    pub config: SearchConfig,
    pub games: Vec<GameSummary>,
    pub matches: usize,
    pub move_limit_draws: usize,
    /// Mean of the per-game means.
    pub mean: Option<f64>,
    pub percent: Option<i64>,
    /// Stratified percentile bootstrap at the 5% level.
    pub bootstrap_ci: Option<Interval>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TournamentReport {
    pub config: TournamentConfig,
    pub expected_matches: usize,
    pub completed_matches: usize,
    pub variants: Vec<VariantSummary>,
    pub errors: Vec<MatchErrorRecord>,
    pub matches: Vec<MatchRecord>,
}

fn percent(x: f64) -> i64 {
    (100.0 * x).round() as i64
}

pub(crate) fn summarise(
    config: &TournamentConfig,
    matches: Vec<MatchRecord>,
    errors: Vec<MatchErrorRecord>,
) -> TournamentReport {
    let variants = config
        .variants
        .iter()
        .enumerate()
        .map(|(vi, spec)| {
            let mine: Vec<&MatchRecord> = matches.iter().filter(|m| m.key.variant == vi).collect();
            let strata: Vec<Vec<f64>> = (0..config.games.len())
                .map(|gi| {
                    mine.iter()
                        .filter(|m| m.key.game == gi)
                        .map(|m| m.result.score_a as f64)
                        .collect()
                })
                .collect();
            let games = config
                .games
                .iter()
                .zip(&strata)
                .map(|(game, xs)| {
                    let m = (!xs.is_empty()).then(|| mean(xs));
                    GameSummary {
                        game: game.clone(),
                        matches: xs.len(),
                        mean: m,
                        ci: m.map(|_| normal_ci(xs, Z_95)),
                        percent: m.map(percent),
                    }
                })
                .collect();
            let complete = strata.iter().all(|s| !s.is_empty());
            let overall = complete.then(|| stratified_mean(&strata));
            let seed = splitmix64(config.master_seed ^ splitmix64(0xb007 + vi as u64));
            let ci = bootstrap_ci(&strata, 0.05, config.resamples, seed).ok();
            if let (Some(m), Some(ci)) = (overall, ci) {
                debug_assert!(ci.low <= m + 1e-12 && m - 1e-12 <= ci.high, "{ci:?} misses {m}");
            }
            VariantSummary {
                variant: spec.name(),
                config: spec.config(config.budget),
                games,
                matches: mine.len(),
                move_limit_draws: mine.iter().filter(|m| m.result.move_limit_exceeded).count(),
                mean: overall,
                percent: overall.map(percent),
                bootstrap_ci: ci,
            }
        })
        .collect();
    TournamentReport {
        config: config.clone(),
        expected_matches: config.expected_match_count(),
        completed_matches: matches.len(),
        variants,
        errors,
        matches,
    }
}

impl TournamentReport {
    pub fn variant(&self, name: &str) -> Option<&VariantSummary> {
        self.variants.iter().find(|v| v.variant == name)
    }

    /// Canonical JSON: object keys sorted, matches ordered by key, no timings.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report serialises");
        let mut out = serde_json::to_string_pretty(&value).expect("report serialises");
        out.push('\n');
        out
    }

    /// One row per variant and game, plus an `overall` row per variant
    /// carrying the bootstrap interval.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["variant", "game", "n", "mean", "ci_low", "ci_high", "percent"])
            .expect("in-memory write");
        let fmt = |x: Option<f64>| x.map(|x| x.to_string()).unwrap_or_default();
        for v in &self.variants {
            for g in &v.games {
                w.write_record([
                    v.variant.clone(),
                    g.game.clone(),
                    g.matches.to_string(),
                    fmt(g.mean),
                    fmt(g.ci.map(|c| c.low)),
                    fmt(g.ci.map(|c| c.high)),
                    g.percent.map(|p| p.to_string()).unwrap_or_default(),
                ])
                .expect("in-memory write");
            }
            w.write_record([
                v.variant.clone(),
                "overall".to_string(),
                v.matches.to_string(),
                fmt(v.mean),
                fmt(v.bootstrap_ci.map(|c| c.low)),
                fmt(v.bootstrap_ci.map(|c| c.high)),
                v.percent.map(|p| p.to_string()).unwrap_or_default(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory write")).expect("csv is utf-8")
    }

    /// Fixed-width table of rounded percentages for terminal output.
    pub fn to_table(&self) -> String {
        let mut out = format!("{:<34}", "variant");
        for g in &self.config.games {
            out += &format!("{g:>14}");
        }
        out += &format!("{:>10}{:>18}\n", "mean", "95% bootstrap");
        let cell = |p: Option<i64>| p.map(|p| p.to_string()).unwrap_or_else(|| "-".into());
        for v in &self.variants {
            out += &format!("{:<34}", v.variant);
            for g in &v.games {
                out += &format!("{:>14}", cell(g.percent));
            }
            let ci = v
                .bootstrap_ci
                .map(|c| format!("[{}, {}]", percent(c.low), percent(c.high)))
                .unwrap_or_else(|| "-".into());
            out += &format!("{:>10}{:>18}\n", cell(v.percent), ci);
        }
        if !self.errors.is_empty() {
            out += &format!("{} matches failed\n", self.errors.len());
        }
        out
    }
}
