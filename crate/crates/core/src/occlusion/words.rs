//! Bundled frequency-ranked English word list.

use std::sync::OnceLock;

use rand::seq::IndexedRandom;

use crate::error::{Error, Result};
use crate::rng::SeededRng;

const SOURCE: &str = include_str!("../../assets/words.txt");

/// Words in descending frequency order.
pub fn word_list() -> &'static [&'static str] {
    static WORDS: OnceLock<Vec<&'static str>> = OnceLock::new();
    WORDS.get_or_init(|| SOURCE.lines().map(str::trim).filter(|w| !w.is_empty()).collect())
}

/// Uniform draw from the listed words whose length lies in `[len_min, len_max]`.
pub fn sample_word(len_min: usize, len_max: usize, rng: &mut SeededRng) -> Result<String> {
    if len_min < 4 || len_min > len_max {
        return Err(Error::param(format!("word length range [{len_min}, {len_max}] must satisfy 4 <= min <= max")));
    }
    let pool: Vec<&str> = word_list()
        .iter()
        .copied()
        .filter(|w| (len_min..=len_max).contains(&w.len()) && w.chars().all(|c| c.is_ascii_lowercase()))
        .collect();
    pool.choose(rng)
        .map(|w| w.to_string())
        .ok_or_else(|| Error::param(format!("no listed word has length in [{len_min}, {len_max}]")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_is_clean() {
        let words = word_list();
        assert!(words.len() > 1000);
        assert!(words.iter().all(|w| w.len() >= 4 && w.chars().all(|c| c.is_ascii_lowercase())));
    }

    #[test]
    fn length_filters() {
        let mut rng = SeededRng::new(4);
        assert_eq!(sample_word(4, 4, &mut rng).unwrap().len(), 4);
        for _ in 0..1000 {
            let w = sample_word(4, 9, &mut rng).unwrap();
            assert!((4..=9).contains(&w.len()));
            assert!(w.chars().all(|c| c.is_ascii_lowercase()));
        }
        assert!(sample_word(3, 5, &mut rng).is_err());
        assert!(sample_word(6, 5, &mut rng).is_err());
        assert!(sample_word(40, 50, &mut rng).is_err());
    }

    #[test]
    fn deterministic() {
        let a = sample_word(5, 8, &mut SeededRng::new(11)).unwrap();
        let b = sample_word(5, 8, &mut SeededRng::new(11)).unwrap();
        assert_eq!(a, b);
    }
}
