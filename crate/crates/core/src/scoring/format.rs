use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The answer format of one question, or of a whole variant group.
///
/// A composite is credited only when every part is answered correctly, so its
/// chance accuracy is the product of the parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuestionFormat {
    YesNo,
    Mcq { options: u32 },
    /// `answer_space: None` is an open vocabulary that cannot be guessed.
    FillBlank { answer_space: Option<u32> },
    Composite { parts: Vec<QuestionFormat> },
    /// Externally supplied items whose grouped guess rate is a given constant.
    Reported { chance: f64 },
}

impl QuestionFormat {
    /// `n` copies of `part` under all-correct credit.
    pub fn repeated(part: QuestionFormat, n: usize) -> Self {
        QuestionFormat::Composite { parts: vec![part; n] }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            QuestionFormat::YesNo => Ok(()),
            QuestionFormat::Mcq { options } if *options >= 2 => Ok(()),
            QuestionFormat::Mcq { options } => Err(Error::UnknownFormat(format!("mcq with {options} options"))),
            QuestionFormat::FillBlank { answer_space: Some(0) } => {
                Err(Error::UnknownFormat("fill-in with an empty answer space".into()))
            }
            QuestionFormat::FillBlank { .. } => Ok(()),
            QuestionFormat::Composite { parts } if parts.is_empty() => {
                Err(Error::UnknownFormat("composite with no parts".into()))
            }
            QuestionFormat::Composite { parts } => parts.iter().try_for_each(QuestionFormat::validate),
            QuestionFormat::Reported { chance } if (0.0..=1.0).contains(chance) => Ok(()),
            QuestionFormat::Reported { chance } => Err(Error::UnknownFormat(format!("reported chance {chance}"))),
        }
    }

    /// Probability that a uniformly random responder earns credit.
    pub fn chance(&self) -> Result<f64> {
        self.validate()?;
        Ok(self.chance_unchecked())
    }

    fn chance_unchecked(&self) -> f64 {
        match self {
            QuestionFormat::YesNo => 0.5,
            QuestionFormat::Mcq { options } => 1.0 / f64::from(*options),
            QuestionFormat::FillBlank { answer_space: Some(n) } => 1.0 / f64::from(*n),
            QuestionFormat::FillBlank { answer_space: None } => 0.0,
            QuestionFormat::Composite { parts } => parts.iter().map(QuestionFormat::chance_unchecked).product(),
            QuestionFormat::Reported { chance } => *chance,
        }
    }

    /// Number of queries a group of this format expands to.
    pub fn query_count(&self) -> usize {
        match self {
            QuestionFormat::Composite { parts } => parts.iter().map(QuestionFormat::query_count).sum(),
            _ => 1,
        }
    }

    /// The leaf formats in order.
    pub fn leaves(&self) -> Vec<&QuestionFormat> {
        match self {
            QuestionFormat::Composite { parts } => parts.iter().flat_map(QuestionFormat::leaves).collect(),
            leaf => vec![leaf],
        }
    }
}

impl fmt::Display for QuestionFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuestionFormat::YesNo => f.write_str("yesno"),
            QuestionFormat::Mcq { options } => write!(f, "mcq:{options}"),
            QuestionFormat::FillBlank { answer_space: Some(n) } => write!(f, "fill:{n}"),
            QuestionFormat::FillBlank { answer_space: None } => f.write_str("open"),
            QuestionFormat::Reported { chance } => write!(f, "reported:{chance}"),
            QuestionFormat::Composite { parts } => {
                // Runs of identical parts print as `part*k`.
                let mut first = true;
                let mut i = 0;
                while i < parts.len() {
                    let run = parts[i..].iter().take_while(|p| **p == parts[i]).count();
                    if !first {
                        f.write_str("+")?;
                    }
                    first = false;
                    let inner = parts[i].to_string();
                    let inner = if matches!(parts[i], QuestionFormat::Composite { .. }) {
                        format!("[{inner}]")
                    } else {
                        inner
                    };
                    if run > 1 {
                        write!(f, "{inner}*{run}")?;
                    } else {
                        f.write_str(&inner)?;
                    }
                    i += run;
                }
                Ok(())
            }
        }
    }
}

/// Parses the compact grammar used on the command line:
/// `yesno`, `mcq:5`, `fill:25`, `open`, `reported:0.0023`, with `part*k`
/// repetition and `+` joining parts of a composite.
impl FromStr for QuestionFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = Vec::new();
        for term in s.split('+') {
            let term = term.trim();
            let (body, count) = match term.rsplit_once('*') {
                Some((b, k)) => {
                    let k: usize = k.trim().parse().map_err(|_| Error::UnknownFormat(term.to_string()))?;
                    (b.trim(), k)
                }
                None => (term, 1),
            };
            let leaf = parse_leaf(body)?;
            parts.extend(std::iter::repeat_n(leaf, count));
        }
        let fmt = if parts.len() == 1 { parts.pop().expect("one part") } else { QuestionFormat::Composite { parts } };
        fmt.validate()?;
        Ok(fmt)
    }
}

fn parse_leaf(body: &str) -> Result<QuestionFormat> {
    let unknown = || Error::UnknownFormat(body.to_string());
    let (name, arg) = match body.split_once(':') {
        Some((n, a)) => (n.trim().to_ascii_lowercase(), Some(a.trim())),
        None => (body.trim().to_ascii_lowercase(), None),
    };
    match (name.as_str(), arg) {
        ("yesno", None) => Ok(QuestionFormat::YesNo),
        ("mcq", Some(a)) => Ok(QuestionFormat::Mcq { options: a.parse().map_err(|_| unknown())? }),
        ("fill", Some(a)) => Ok(QuestionFormat::FillBlank { answer_space: Some(a.parse().map_err(|_| unknown())?) }),
        ("open", None) => Ok(QuestionFormat::FillBlank { answer_space: None }),
        ("reported", Some(a)) => Ok(QuestionFormat::Reported { chance: a.parse().map_err(|_| unknown())? }),
        _ => Err(unknown()),
    }
}
