use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::normalize::{is_correct, Answer, GroundTruth};

/// The four statements asked about a pairwise item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statement {
    AMatchesB,
    ADiffersB,
    BMatchesA,
    BDiffersA,
}

impl Statement {
    pub const ALL: [Statement; 4] = [Statement::AMatchesB, Statement::ADiffersB, Statement::BMatchesA, Statement::BDiffersA];

    pub fn negated(self) -> bool {
        matches!(self, Statement::ADiffersB | Statement::BDiffersA)
    }

    pub fn swapped(self) -> bool {
        matches!(self, Statement::BMatchesA | Statement::BDiffersA)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Reversed,
}

/// What distinguishes one member query from the others in its group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Variant {
    /// The only query of its group.
    Single,
    /// "Is option `index` correct?" for a decomposed multiple-choice item.
    Option { index: usize },
    /// One of several independent judgments about a shared stimulus.
    Part { index: usize },
    Statement { statement: Statement },
    Route { direction: Direction },
    /// Fill-in part of a surface-development bundle.
    EdgeLetter,
    /// Yes/no pairing of a flat-sheet edge number with a solid's edge letter.
    EdgePair { number: u32, letter: char },
}

/// A member query before it is assigned an id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberSpec {
    pub variant: Variant,
    pub gold: GroundTruth,
}

/// Queries credited jointly: the group scores 1 only when every member is correct.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantGroup {
    pub id: String,
    pub members: Vec<String>,
}

/// One yes/no query per option of a single-answer multiple-choice item.
pub fn decompose_mcq(correct: &[bool]) -> Result<Vec<MemberSpec>> {
    let hits = correct.iter().filter(|c| **c).count();
    if hits != 1 {
        return Err(Error::ItemDefinition(format!(
            "multiple-choice item needs exactly one correct option, found {hits} of {}",
            correct.len()
        )));
    }
    Ok(correct
        .iter()
        .enumerate()
        .map(|(index, &t)| MemberSpec { variant: Variant::Option { index }, gold: GroundTruth::Bool(t) })
        .collect())
}

/// Independent yes/no judgments credited jointly.
pub fn yes_no_parts(truths: &[bool]) -> Vec<MemberSpec> {
    truths
        .iter()
        .enumerate()
        .map(|(index, &t)| MemberSpec { variant: Variant::Part { index }, gold: GroundTruth::Bool(t) })
        .collect()
}

/// The four balanced statements about whether A and B match.
pub fn make_symmetry_variants(matches: bool) -> Vec<MemberSpec> {
    Statement::ALL
        .iter()
        .map(|&statement| MemberSpec {
            variant: Variant::Statement { statement },
            gold: GroundTruth::Bool(matches != statement.negated()),
        })
        .collect()
}

/// Forward and reversed-terminal route queries sharing one building number.
pub fn ss3_bidirectional(answer_building: u32) -> Vec<MemberSpec> {
    [Direction::Forward, Direction::Reversed]
        .into_iter()
        .map(|direction| MemberSpec {
            variant: Variant::Route { direction },
            gold: GroundTruth::Number(i64::from(answer_building)),
        })
        .collect()
}

/// A surface-development bundle: the edge letter plus one touching and one non-touching pair.
pub fn vz3_bundle(fill: Option<char>, pairs: &[(u32, char, bool)]) -> Result<Vec<MemberSpec>> {
    let fill = fill.ok_or_else(|| Error::ItemDefinition("surface-development bundle lacks its edge letter".into()))?;
    let touching = pairs.iter().filter(|p| p.2).count();
    if pairs.len() != 2 || touching != 1 {
        return Err(Error::ItemDefinition(format!(
            "surface-development bundle needs one touching and one non-touching pair, got {} pairs with {touching} touching",
            pairs.len()
        )));
    }
    let mut out = vec![MemberSpec { variant: Variant::EdgeLetter, gold: GroundTruth::Letter(fill) }];
    out.extend(pairs.iter().map(|&(number, letter, t)| MemberSpec {
        variant: Variant::EdgePair { number, letter },
        gold: GroundTruth::Bool(t),
    }));
    Ok(out)
}

/// All-correct credit over `(answer, gold)` pairs; an empty group earns nothing.
pub fn group_credit<'a>(members: impl IntoIterator<Item = (Option<&'a Answer>, &'a GroundTruth)>) -> bool {
    let mut any = false;
    for (a, g) in members {
        if !is_correct(a, g) {
            return false;
        }
        any = true;
    }
    any
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bools(specs: &[MemberSpec]) -> Vec<bool> {
        specs
            .iter()
            .map(|m| match m.gold {
                GroundTruth::Bool(b) => b,
                _ => panic!("expected yes/no gold"),
            })
            .collect()
    }

    fn credit(specs: &[MemberSpec], answers: &[Answer]) -> bool {
        group_credit(answers.iter().map(Some).zip(specs.iter().map(|m| &m.gold)))
    }

    #[test]
    fn mcq_truths() {
        let specs = decompose_mcq(&[false, false, true, false, false]).unwrap();
        assert_eq!(bools(&specs), [false, false, true, false, false]);
        assert!(decompose_mcq(&[false; 5]).is_err());
        assert!(decompose_mcq(&[true, true, false, false, false]).is_err());
        let right: Vec<Answer> = bools(&specs).into_iter().map(Answer::Bool).collect();
        assert!(credit(&specs, &right));
        let mut one_miss = right.clone();
        one_miss[4] = Answer::Bool(true);
        assert!(!credit(&specs, &one_miss));
    }

    #[test]
    fn symmetry_balance() {
        assert_eq!(bools(&make_symmetry_variants(true)), [true, false, true, false]);
        assert_eq!(bools(&make_symmetry_variants(false)), [false, true, false, true]);
        for t in [true, false] {
            let specs = make_symmetry_variants(t);
            let yes = vec![Answer::Bool(true); 4];
            let no = vec![Answer::Bool(false); 4];
            assert!(!credit(&specs, &yes));
            assert!(!credit(&specs, &no));
            let hits = specs.iter().filter(|m| is_correct(Some(&Answer::Bool(true)), &m.gold)).count();
            assert_eq!(hits, 2);
        }
    }

    #[test]
    fn bidirectional_shares_answer() {
        let specs = ss3_bidirectional(4);
        assert!(specs.iter().all(|m| m.gold == GroundTruth::Number(4)));
        assert!(credit(&specs, &[Answer::Number(4.0), Answer::Number(4.0)]));
        assert!(!credit(&specs, &[Answer::Number(4.0), Answer::Number(7.0)]));
    }

    #[test]
    fn vz3_bundle_rules() {
        let specs = vz3_bundle(Some('H'), &[(5, 'H', true), (5, 'I', false)]).unwrap();
        let all = [Answer::Letter('h'), Answer::Bool(true), Answer::Bool(false)];
        assert!(credit(&specs, &all));
        let miss = [Answer::Letter('h'), Answer::Bool(true), Answer::Bool(true)];
        assert!(!credit(&specs, &miss));
        assert!(vz3_bundle(None, &[(5, 'H', true), (5, 'I', false)]).is_err());
        assert!(vz3_bundle(Some('H'), &[(5, 'H', true)]).is_err());
        assert!(vz3_bundle(Some('H'), &[(5, 'H', true), (5, 'I', true)]).is_err());
    }

    #[test]
    fn empty_group_uncredited() {
        assert!(!group_credit(std::iter::empty()));
    }

    proptest! {
        #[test]
        fn credit_is_order_invariant(truths in proptest::collection::vec(any::<bool>(), 1..9),
                                     answers in proptest::collection::vec(any::<bool>(), 9),
                                     rot in 0usize..9) {
            let golds: Vec<GroundTruth> = truths.iter().map(|&t| GroundTruth::Bool(t)).collect();
            let ans: Vec<Answer> = answers[..golds.len()].iter().map(|&a| Answer::Bool(a)).collect();
            let forward = group_credit(ans.iter().map(Some).zip(golds.iter()));
            let k = rot % golds.len();
            let mut pairs: Vec<(Option<&Answer>, &GroundTruth)> = ans.iter().map(Some).zip(golds.iter()).collect();
            pairs.rotate_left(k);
            pairs.reverse();
            prop_assert_eq!(forward, group_credit(pairs));
        }
    }
}
