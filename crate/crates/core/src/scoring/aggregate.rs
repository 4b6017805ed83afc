use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::Subtest;

/// Credit earned by one variant group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoredGroup {
    pub subtest: Subtest,
    pub credit: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubtestScore {
    pub groups: usize,
    pub credited: usize,
    /// Percent of groups credited.
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreTable {
    pub subtests: BTreeMap<Subtest, SubtestScore>,
    /// Unweighted mean of the subtest accuracies, in percent.
    pub total: f64,
    /// Set when some subtests had no groups and were left out of the mean.
    pub partial: bool,
}

/// Per-subtest accuracy and the unweighted mean over subtests.
///
/// Every subtest must have at least one group unless `allow_partial` is set,
/// in which case empty subtests are excluded from the table and the mean.
pub fn aggregate(groups: &[ScoredGroup], allow_partial: bool) -> Result<ScoreTable> {
    let mut tally: BTreeMap<Subtest, (usize, usize)> = BTreeMap::new();
    for g in groups {
        let e = tally.entry(g.subtest).or_default();
        e.0 += 1;
        e.1 += usize::from(g.credit);
    }
    let missing: Vec<&str> = Subtest::ALL.iter().filter(|s| !tally.contains_key(s)).map(|s| s.code()).collect();
    if !missing.is_empty() && !allow_partial {
        return Err(Error::Aggregation(format!("no scored groups for {}", missing.join(", "))));
    }
    if tally.is_empty() {
        return Err(Error::Aggregation("no scored groups at all".into()));
    }
    let subtests: BTreeMap<Subtest, SubtestScore> = tally
        .into_iter()
        .map(|(s, (n, c))| (s, SubtestScore { groups: n, credited: c, accuracy: 100.0 * c as f64 / n as f64 }))
        .collect();
    let total = subtests.values().map(|s| s.accuracy).sum::<f64>() / subtests.len() as f64;
    Ok(ScoreTable { subtests, total, partial: !missing.is_empty() })
}

impl ScoreTable {
    /// Per-subtest maximum across tables; the total is recomputed from the maxima.
    pub fn best_of(tables: &[ScoreTable]) -> Option<ScoreTable> {
        let first = tables.first()?;
        let mut subtests = first.subtests.clone();
        for t in &tables[1..] {
            for (s, score) in &t.subtests {
                subtests
                    .entry(*s)
                    .and_modify(|cur| {
                        if score.accuracy > cur.accuracy {
                            *cur = *score;
                        }
                    })
                    .or_insert(*score);
            }
        }
        let total = subtests.values().map(|s| s.accuracy).sum::<f64>() / subtests.len() as f64;
        let partial = subtests.len() < Subtest::ALL.len();
        Some(ScoreTable { subtests, total, partial })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all(credit: bool) -> Vec<ScoredGroup> {
        Subtest::ALL.iter().map(|&subtest| ScoredGroup { subtest, credit }).collect()
    }

    #[test]
    fn perfect_is_hundred() {
        let t = aggregate(&all(true), false).unwrap();
        assert!(t.subtests.values().all(|s| s.accuracy == 100.0));
        assert_eq!(t.total, 100.0);
        assert!(!t.partial);
    }

    #[test]
    fn one_of_twenty() {
        let mut g = all(false);
        g[7].credit = true;
        assert_eq!(aggregate(&g, false).unwrap().total, 5.0);
    }

    #[test]
    fn missing_subtests_need_flag() {
        let g = vec![ScoredGroup { subtest: Subtest::S2, credit: true }, ScoredGroup { subtest: Subtest::S2, credit: false }];
        assert!(aggregate(&g, false).is_err());
        let t = aggregate(&g, true).unwrap();
        assert!(t.partial);
        assert_eq!(t.total, 50.0);
        assert!(aggregate(&[], true).is_err());
    }

    #[test]
    fn best_of_takes_maxima() {
        let mut a = all(false);
        a[0].credit = true;
        let mut b = all(false);
        b[1].credit = true;
        let ta = aggregate(&a, false).unwrap();
        let tb = aggregate(&b, false).unwrap();
        let best = ScoreTable::best_of(&[ta, tb]).unwrap();
        assert_eq!(best.subtests[&Subtest::Cf1].accuracy, 100.0);
        assert_eq!(best.subtests[&Subtest::Cf2].accuracy, 100.0);
        assert_eq!(best.total, 10.0);
    }
}
