//! Completed values: a resolution class paired with a numeric value.
//!
//! Values are ordered lexicographically on `(resolution, value)`, so a proved
//! win outranks every unresolved value and a proved loss ranks below all of
//! them. The `resolved` flag is not part of the ordering; it only marks nodes
//! whose exact game-theoretic value is known.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Resolution class of a node, from the perspective of the player to move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Resolution {
    ProvedLoss = -1,
    Open = 0,
    ProvedWin = 1,
}

impl Resolution {
    pub fn negate(self) -> Resolution {
        match self {
            Resolution::ProvedLoss => Resolution::ProvedWin,
            Resolution::Open => Resolution::Open,
            Resolution::ProvedWin => Resolution::ProvedLoss,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompletedValue {
    pub resolution: Resolution,
    pub value: f64,
    pub resolved: bool,
}

impl CompletedValue {
    pub const PROVED_WIN: CompletedValue = CompletedValue {
        resolution: Resolution::ProvedWin,
        value: 1.0,
        resolved: true,
    };
    pub const PROVED_LOSS: CompletedValue = CompletedValue {
        resolution: Resolution::ProvedLoss,
        value: -1.0,
        resolved: true,
    };

    /// An unresolved heuristic value.
    pub fn open(value: f64) -> CompletedValue {
        CompletedValue {
            resolution: Resolution::Open,
            value,
            resolved: false,
        }
    }

    /// A resolved value with no winner, e.g. a proved draw.
    pub fn resolved_draw(value: f64) -> CompletedValue {
        CompletedValue {
            resolution: Resolution::Open,
            value,
            resolved: true,
        }
    }

    /// Resolved value built from a resolution class and an arbitrary numeric
    /// value. Used when terminal states are scored by the heuristic while
    /// their resolution still comes from the game rules.
    pub fn resolved_with(resolution: Resolution, value: f64) -> CompletedValue {
        CompletedValue {
            resolution,
            value,
            resolved: true,
        }
    }

    /// Exact value of a finished game from a player's point of view.
    pub fn exact(score: i8) -> CompletedValue {
        match score.signum() {
            1 => CompletedValue::PROVED_WIN,
            -1 => CompletedValue::PROVED_LOSS,
            _ => CompletedValue::resolved_draw(0.0),
        }
    }

    /// Flips the point of view: wins become losses and the value is negated.
    pub fn negate(self) -> CompletedValue {
        CompletedValue {
            resolution: self.resolution.negate(),
            value: -self.value,
            resolved: self.resolved,
        }
    }

    /// Checks the strict representation invariants.
    ///
    /// Resolved wins and losses sit on the closed endpoints and unresolved
    /// values must be `Open` and strictly inside `(-1, 1)`. Values produced
    /// with completion disabled, or with heuristic terminal scoring, are
    /// allowed to step outside this and are not expected to pass.
    pub fn is_canonical(&self) -> bool {
        if !self.value.is_finite() || self.value.abs() > 1.0 {
            return false;
        }
        match (self.resolution, self.resolved) {
            (Resolution::ProvedWin, true) => self.value == 1.0,
            (Resolution::ProvedLoss, true) => self.value == -1.0,
            (Resolution::Open, true) => self.value.abs() < 1.0,
            (Resolution::Open, false) => self.value.abs() < 1.0,
            (_, false) => false,
        }
    }

    /// Game-theoretic score of a resolved value: +1, -1, or 0 for a
    /// resolved `Open` node. `None` while unresolved.
    pub fn proved_score(&self) -> Option<i8> {
        self.resolved.then_some(self.resolution as i8)
    }

    /// Same `(resolution, value)` and the same `resolved` flag.
    pub fn same_as(&self, other: &CompletedValue) -> bool {
        self.resolution == other.resolution
            && self.value == other.value
            && self.resolved == other.resolved
    }
}

/// Lexicographic comparison on `(resolution, value)`.
pub fn completed_compare(a: &CompletedValue, b: &CompletedValue) -> Ordering {
    a.resolution
        .cmp(&b.resolution)
        .then_with(|| a.value.partial_cmp(&b.value).unwrap_or(Ordering::Equal))
}

impl fmt::Display for CompletedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.resolution {
            Resolution::ProvedWin => "win",
            Resolution::ProvedLoss => "loss",
            Resolution::Open => "open",
        };
        let flag = if self.resolved { "resolved" } else { "unresolved" };
        write!(f, "{tag}:{:.17e}:{flag}", self.value)
    }
}
