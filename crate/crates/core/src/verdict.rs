use serde::{Deserialize, Serialize};

/// A yes/no answer together with the signed slack of the tightest constraint.
///
/// Positive margins are strictly inside the region, negative ones outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    pub margin: f64,
}

impl Verdict {
    /// `holds` is decided as `margin >= -slack`.
    pub fn from_margin(margin: f64, slack: f64) -> Self {
        Self {
            holds: margin >= -slack,
            margin,
        }
    }

    /// Both verdicts must hold; the margin is the smaller one.
    pub fn and(self, other: Self) -> Self {
        Self {
            holds: self.holds && other.holds,
            margin: self.margin.min(other.margin),
        }
    }
}

/// Smallest of a list of slacks, or `+inf` for an empty list.
pub(crate) fn min_slack(slacks: &[f64]) -> f64 {
    slacks.iter().copied().fold(f64::INFINITY, f64::min)
}
