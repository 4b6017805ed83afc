//! Question formats, variant groups, answer normalization and score
//! aggregation for the twenty subtests.

pub mod aggregate;
pub mod format;
pub mod normalize;
pub mod simulate;
pub mod variants;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use aggregate::{aggregate, ScoreTable, ScoredGroup, SubtestScore};
pub use format::QuestionFormat;
pub use normalize::{is_correct, normalize_answer, Answer, AnswerKind, GroundTruth};
pub use simulate::{simulate_random, Simulation};
pub use variants::{
    decompose_mcq, group_credit, make_symmetry_variants, ss3_bidirectional, vz3_bundle, yes_no_parts, Direction,
    MemberSpec, Statement, Variant, VariantGroup,
};

/// Grouped guess rate of the externally sourced figure-classification items.
pub const I3_REPORTED_CHANCE: f64 = 0.0023;
/// Grouped guess rate of the externally sourced surface-development bundles.
pub const VZ3_REPORTED_CHANCE: f64 = 14.6 / 4.0 / 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Subtest {
    #[serde(rename = "CF1")]
    Cf1,
    #[serde(rename = "CF2")]
    Cf2,
    #[serde(rename = "CF3")]
    Cf3,
    #[serde(rename = "CS1")]
    Cs1,
    #[serde(rename = "CS2")]
    Cs2,
    #[serde(rename = "CS3")]
    Cs3,
    #[serde(rename = "P3")]
    P3,
    #[serde(rename = "I3")]
    I3,
    #[serde(rename = "RL2")]
    Rl2,
    #[serde(rename = "MA1")]
    Ma1,
    #[serde(rename = "MV1")]
    Mv1,
    #[serde(rename = "MV2")]
    Mv2,
    #[serde(rename = "MV3")]
    Mv3,
    #[serde(rename = "S1")]
    S1,
    #[serde(rename = "S2")]
    S2,
    #[serde(rename = "SS2")]
    Ss2,
    #[serde(rename = "SS3")]
    Ss3,
    #[serde(rename = "VZ1")]
    Vz1,
    #[serde(rename = "VZ2")]
    Vz2,
    #[serde(rename = "VZ3")]
    Vz3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Category {
    PerceptualClosure,
    Reasoning,
    Memory,
    Spatial,
}

impl Category {
    pub fn label(self) -> &'static str {
        match self {
            Category::PerceptualClosure => "Perceptual & Closure",
            Category::Reasoning => "Reasoning",
            Category::Memory => "Memory",
            Category::Spatial => "Visualization & Spatial Reasoning",
        }
    }
}

impl Subtest {
    pub const ALL: [Subtest; 20] = [
        Subtest::Cf1,
        Subtest::Cf2,
        Subtest::Cf3,
        Subtest::Cs1,
        Subtest::Cs2,
        Subtest::Cs3,
        Subtest::P3,
        Subtest::I3,
        Subtest::Rl2,
        Subtest::Ma1,
        Subtest::Mv1,
        Subtest::Mv2,
        Subtest::Mv3,
        Subtest::S1,
        Subtest::S2,
        Subtest::Ss2,
        Subtest::Ss3,
        Subtest::Vz1,
        Subtest::Vz2,
        Subtest::Vz3,
    ];

    /// Subtests whose items this crate generates and verifies.
    pub const GENERATED: [Subtest; 12] = [
        Subtest::Cf1,
        Subtest::Cf2,
        Subtest::Cf3,
        Subtest::Cs1,
        Subtest::Cs2,
        Subtest::Cs3,
        Subtest::Ma1,
        Subtest::S1,
        Subtest::S2,
        Subtest::Ss3,
        Subtest::Vz1,
        Subtest::Vz2,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Subtest::Cf1 => "CF1",
            Subtest::Cf2 => "CF2",
            Subtest::Cf3 => "CF3",
            Subtest::Cs1 => "CS1",
            Subtest::Cs2 => "CS2",
            Subtest::Cs3 => "CS3",
            Subtest::P3 => "P3",
            Subtest::I3 => "I3",
            Subtest::Rl2 => "RL2",
            Subtest::Ma1 => "MA1",
            Subtest::Mv1 => "MV1",
            Subtest::Mv2 => "MV2",
            Subtest::Mv3 => "MV3",
            Subtest::S1 => "S1",
            Subtest::S2 => "S2",
            Subtest::Ss2 => "SS2",
            Subtest::Ss3 => "SS3",
            Subtest::Vz1 => "VZ1",
            Subtest::Vz2 => "VZ2",
            Subtest::Vz3 => "VZ3",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Subtest::Cf1 => "Hidden Figures",
            Subtest::Cf2 => "Hidden Patterns",
            Subtest::Cf3 => "Copying",
            Subtest::Cs1 => "Gestalt Completion",
            Subtest::Cs2 => "Concealed Words",
            Subtest::Cs3 => "Snowy Pictures",
            Subtest::P3 => "Identical Pictures",
            Subtest::I3 => "Figure Classification",
            Subtest::Rl2 => "Diagramming Relationships",
            Subtest::Ma1 => "Picture-Number",
            Subtest::Mv1 => "Shape Memory",
            Subtest::Mv2 => "Building Memory",
            Subtest::Mv3 => "Map Memory",
            Subtest::S1 => "Card Rotations",
            Subtest::S2 => "Cube Comparisons",
            Subtest::Ss2 => "Choosing A Path",
            Subtest::Ss3 => "Map Planning",
            Subtest::Vz1 => "Form Board",
            Subtest::Vz2 => "Paper Folding",
            Subtest::Vz3 => "Surface Development",
        }
    }

    pub fn category(self) -> Category {
        use Subtest::*;
        match self {
            Cf1 | Cf2 | Cf3 | Cs1 | Cs2 | Cs3 | P3 => Category::PerceptualClosure,
            I3 | Rl2 => Category::Reasoning,
            Ma1 | Mv1 | Mv2 | Mv3 => Category::Memory,
            S1 | S2 | Ss2 | Ss3 | Vz1 | Vz2 | Vz3 => Category::Spatial,
        }
    }

    pub fn is_generated(self) -> bool {
        Subtest::GENERATED.contains(&self)
    }

    /// The credited unit of the subtest: one question with all its variants.
    pub fn group_format(self) -> QuestionFormat {
        use Subtest::*;
        let yn = |n| QuestionFormat::repeated(QuestionFormat::YesNo, n);
        match self {
            Cf1 | Cf2 | P3 | Rl2 | Mv2 | Ss2 | Vz1 | Vz2 => yn(5),
            Mv1 | Mv3 | S2 => yn(4),
            S1 => yn(8),
            Cf3 => QuestionFormat::FillBlank { answer_space: Some(25) },
            Ma1 => QuestionFormat::FillBlank { answer_space: Some(21) },
            Cs1 | Cs2 | Cs3 => QuestionFormat::FillBlank { answer_space: None },
            Ss3 => QuestionFormat::repeated(QuestionFormat::FillBlank { answer_space: Some(10) }, 2),
            I3 => QuestionFormat::Reported { chance: I3_REPORTED_CHANCE },
            Vz3 => QuestionFormat::Reported { chance: VZ3_REPORTED_CHANCE },
        }
    }

    /// Reference corpus size as (questions, queries).
    pub fn reference_counts(self) -> (usize, usize) {
        use Subtest::*;
        match self {
            Cf1 => (32, 160),
            Cf2 => (80, 400),
            Cf3 => (64, 64),
            Cs1 => (20, 20),
            Cs2 => (50, 50),
            Cs3 => (24, 24),
            P3 => (96, 480),
            I3 => (28, 224),
            Rl2 => (30, 150),
            Ma1 => (42, 42),
            Mv1 => (32, 128),
            Mv2 => (24, 120),
            Mv3 => (24, 96),
            S1 => (20, 160),
            S2 => (42, 168),
            Ss2 => (32, 160),
            Ss3 => (40, 80),
            Vz1 => (48, 240),
            Vz2 => (20, 100),
            Vz3 => (60, 180),
        }
    }

    pub fn chance(self) -> f64 {
        self.group_format().chance().expect("built-in formats are well formed")
    }
}

impl fmt::Display for Subtest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Subtest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        Subtest::ALL
            .into_iter()
            .find(|t| t.code() == up)
            .ok_or_else(|| Error::param(format!("unknown subtest `{s}`")))
    }
}

/// One row of the chance table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChanceRow {
    pub subtest: Subtest,
    pub format: String,
    /// Percent.
    pub chance: f64,
}

/// Per-subtest chance accuracy in percent, plus the unweighted mean.
pub fn chance_table() -> (Vec<ChanceRow>, f64) {
    let rows: Vec<ChanceRow> = Subtest::ALL
        .iter()
        .map(|&s| ChanceRow { subtest: s, format: s.group_format().to_string(), chance: 100.0 * s.chance() })
        .collect();
    let mean = rows.iter().map(|r| r.chance).sum::<f64>() / rows.len() as f64;
    (rows, mean)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chance_table_frozen() {
        let expected = [
            3.13, 3.13, 4.00, 0.0, 0.0, 0.0, 3.13, 0.23, 3.13, 4.76, 6.25, 3.13, 6.25, 0.39, 6.25, 3.13, 1.00, 3.13,
            3.13, 3.65,
        ];
        let (rows, mean) = chance_table();
        for (row, want) in rows.iter().zip(expected) {
            assert!((row.chance - want).abs() <= 0.005 + 1e-9, "{}: {} vs {want}", row.subtest, row.chance);
        }
        assert!((mean - 2.89).abs() <= 0.01, "{mean}");
        assert!((mean - 2.889125).abs() < 1e-3);
    }

    #[test]
    fn reference_totals() {
        let q: usize = Subtest::ALL.iter().map(|s| s.reference_counts().0).sum();
        let n: usize = Subtest::ALL.iter().map(|s| s.reference_counts().1).sum();
        assert_eq!((q, n), (808, 3046));
        for s in Subtest::ALL {
            assert_eq!(s.code().parse::<Subtest>().unwrap(), s);
            let (qs, qn) = s.reference_counts();
            if !matches!(s, Subtest::I3 | Subtest::Vz3) {
                assert_eq!(qs * s.group_format().query_count(), qn, "{s}");
            }
        }
    }
}
