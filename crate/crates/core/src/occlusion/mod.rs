//! Closure-speed items: gestalt completion (CS1), concealed words (CS2)
//! and snowy pictures (CS3).

pub mod assets;
pub mod degrade;
pub mod words;

use rand::RngCore;
use serde::{Deserialize, Serialize};

pub use assets::{catalog, SilhouetteAsset};
pub use degrade::{conceal_word, occlude_silhouette, snowy_picture, OcclusionLaws, Severity};
pub use words::sample_word;

use crate::difficulty::Difficulty;
use crate::error::{Error, Result};
use crate::geometry::Image;
use crate::rng::SeededRng;

/// Raster size of silhouette stimuli.
pub const ASSET_PX: u32 = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CsKind {
    Cs1,
    Cs2,
    Cs3,
}

/// A degraded-stimulus item, replayable from its fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsItem {
    pub kind: CsKind,
    /// Silhouette label (CS1/CS3) or the word (CS2).
    pub label: String,
    /// Accepted answers; CS2 accepts only the word itself.
    pub accepted: Vec<String>,
    pub severity: f64,
    pub noise_seed: u64,
    pub laws: OcclusionLaws,
}

impl CsItem {
    pub fn image(&self) -> Result<Image> {
        let s = Severity::new(self.severity)?;
        let mut rng = SeededRng::new(self.noise_seed);
        match self.kind {
            CsKind::Cs2 => conceal_word(&self.label, s, &self.laws, &mut rng),
            CsKind::Cs1 | CsKind::Cs3 => {
                let asset = assets::find(&self.label)
                    .ok_or_else(|| Error::ItemDefinition(format!("unknown silhouette `{}`", self.label)))?;
                let clean = asset.image(ASSET_PX);
                Ok(match self.kind {
                    CsKind::Cs1 => occlude_silhouette(&clean, s, &self.laws, &mut rng),
                    _ => snowy_picture(&clean, s, &self.laws, &mut rng),
                })
            }
        }
    }

    /// Ground truth re-derived from the bundled corpus.
    pub fn verify(&self) -> bool {
        match self.kind {
            CsKind::Cs2 => self.accepted == [self.label.clone()] && self.label.chars().all(|c| c.is_ascii_lowercase()),
            _ => assets::find(&self.label).is_some_and(|a| a.aliases == self.accepted),
        }
    }
}

pub fn word_lengths(d: Difficulty) -> (usize, usize) {
    d.pick((4, 6), (4, 8), (6, 10))
}

/// Builds an item; `asset` selects a silhouette by catalog index (random when `None`).
pub fn make_cs_item(kind: CsKind, d: Difficulty, asset: Option<usize>, rng: &mut SeededRng) -> Result<CsItem> {
    let severity = Severity::preset(d).value();
    let laws = OcclusionLaws::default();
    let (label, accepted) = match kind {
        CsKind::Cs2 => {
            let (lo, hi) = word_lengths(d);
            let w = sample_word(lo, hi, rng)?;
            (w.clone(), vec![w])
        }
        _ => {
            let cat = catalog();
            let i = asset.unwrap_or_else(|| rng.index(cat.len()));
            let a = cat.get(i).ok_or_else(|| Error::param(format!("silhouette index {i} out of range")))?;
            (a.label.clone(), a.aliases.clone())
        }
    };
    Ok(CsItem { kind, label, accepted, severity, noise_seed: rng.next_u64(), laws })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_independent_of_noise() {
        for seed in 0..20 {
            let a = make_cs_item(CsKind::Cs1, Difficulty::Hard, Some(7), &mut SeededRng::new(seed)).unwrap();
            let b = make_cs_item(CsKind::Cs1, Difficulty::Easy, Some(7), &mut SeededRng::new(seed + 100)).unwrap();
            assert_eq!(a.label, b.label);
            assert_eq!(a.accepted, b.accepted);
            assert!(a.verify());
        }
    }

    #[test]
    fn items_replay_images() {
        for kind in [CsKind::Cs1, CsKind::Cs2, CsKind::Cs3] {
            let item = make_cs_item(kind, Difficulty::Normal, None, &mut SeededRng::new(3)).unwrap();
            assert_eq!(item.image().unwrap(), item.image().unwrap());
            assert!(item.verify());
        }
        let w = make_cs_item(CsKind::Cs2, Difficulty::Normal, None, &mut SeededRng::new(3)).unwrap();
        assert_eq!(w.accepted, vec![w.label.clone()]);
    }
}
