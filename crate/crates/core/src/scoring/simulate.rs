use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rng::SeededRng;

use super::format::QuestionFormat;

/// Outcome of a Monte-Carlo random-responder run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Simulation {
    pub groups: usize,
    pub credited: usize,
    /// Closed-form chance the run is compared against.
    pub expected: f64,
}

impl Simulation {
    pub fn rate(&self) -> f64 {
        self.credited as f64 / self.groups as f64
    }

    /// Binomial standard error of the rate under the closed form.
    pub fn sigma(&self) -> f64 {
        (self.expected * (1.0 - self.expected) / self.groups as f64).sqrt()
    }

    pub fn within(&self, k_sigma: f64) -> bool {
        let s = self.sigma();
        if s == 0.0 {
            return self.rate() == self.expected;
        }
        (self.rate() - self.expected).abs() <= k_sigma * s
    }
}

/// One uniformly random guess per leaf against a uniformly drawn gold label.
fn guess_leaf(leaf: &QuestionFormat, rng: &mut SeededRng) -> bool {
    let space = match leaf {
        QuestionFormat::YesNo => 2,
        QuestionFormat::Mcq { options } => *options,
        QuestionFormat::FillBlank { answer_space: Some(n) } => *n,
        QuestionFormat::FillBlank { answer_space: None } => return false,
        QuestionFormat::Reported { chance } => return rng.random_bool(*chance),
        QuestionFormat::Composite { .. } => unreachable!("leaves are never composite"),
    };
    rng.random_range(0..space) == rng.random_range(0..space)
}

/// Simulates `groups` random responders answering a group of `format`.
pub fn simulate_random(format: &QuestionFormat, groups: usize, rng: &mut SeededRng) -> Result<Simulation> {
    let expected = format.chance()?;
    let leaves = format.leaves();
    let credited = (0..groups).filter(|_| leaves.iter().all(|l| guess_leaf(l, rng))).count();
    Ok(Simulation { groups, credited, expected })
}
