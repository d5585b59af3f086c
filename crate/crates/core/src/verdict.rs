//! Verdicts on whether minimal volume entropy vanishes, with their evidence.

use serde::{Deserialize, Serialize};

use crate::fbz::GluJson;
use crate::words::{GrowthProfile, Word};

/// Isoperimetric-type constant for 2-complexes.
pub const C2: f64 = 1.0e6;

/// Uniform growth lower bound for nonabelian subgroups of a RAAG.
pub fn raag_uniform_rate() -> f64 {
    3f64.ln()
}

/// Uniform growth lower bound for exponentially growing subgroups of a
/// free-by-cyclic group.
pub fn fbz_uniform_rate() -> f64 {
    3f64.ln() / 6.0
}

/// Lower bound on `ω` for a 2-dimensional group whose exponentially growing
/// subgroups all have uniform growth at least `uniform_rate`.
pub fn nonvanishing_bound(uniform_rate: f64) -> f64 {
    uniform_rate / (2.0 * C2)
}

/// `ω(F_n) = (3n − 3) log 2`.
pub fn free_group_omega(rank: usize) -> f64 {
    (3.0 * rank as f64 - 3.0) * 2f64.ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Vanishing,
    NonVanishing,
    NonVanishingHeuristic,
    Unknown,
    Unsupported,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// Edges of a spanning forest of the defining graph.
    SpanningForest(Vec<[String; 2]>),
    /// Vertices of an embedded cycle, in order.
    Cycle(Vec<String>),
    Triangle([String; 3]),
    FreeGroup {
        rank: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        free_group_omega: Option<f64>,
    },
    /// `ad_g ∘ Φ^k` is GLU with the given data.
    Glu {
        power: u32,
        conjugator: Word,
        data: GluJson,
    },
    Growth(GrowthProfile),
    Shape {
        vertex_kinds: Vec<String>,
        edge_kinds: Vec<String>,
    },
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub lower_bound: Option<f64>,
    pub certificate: Certificate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Verdict {
    pub fn vanishing(certificate: Certificate) -> Self {
        Verdict {
            status: Status::Vanishing,
            lower_bound: Some(0.0),
            certificate,
            note: None,
        }
    }

    pub fn nonvanishing(status: Status, bound: f64, certificate: Certificate) -> Self {
        debug_assert!(bound > 0.0);
        debug_assert!(matches!(
            status,
            Status::NonVanishing | Status::NonVanishingHeuristic
        ));
        Verdict {
            status,
            lower_bound: Some(bound),
            certificate,
            note: None,
        }
    }

    pub fn without_bound(status: Status, certificate: Certificate) -> Self {
        Verdict {
            status,
            lower_bound: None,
            certificate,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_constants() {
        let raag = nonvanishing_bound(raag_uniform_rate());
        let fbz = nonvanishing_bound(fbz_uniform_rate());
        assert!((raag - 5.493e-7).abs() < 5e-11);
        assert!((fbz - 9.155e-8).abs() < 5e-12);
        assert_eq!(raag, 3f64.ln() / 2.0e6);
        assert!((fbz - 3f64.ln() / 12.0e6).abs() < 1e-22);
    }

    #[test]
    fn free_omega() {
        assert!((free_group_omega(2) - 3.0 * 2f64.ln()).abs() < 1e-15);
        assert_eq!(free_group_omega(1), 0.0);
    }
}
