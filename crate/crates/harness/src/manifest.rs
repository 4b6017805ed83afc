//! The corpus manifest: every item, its queries, gold labels and the
//! generator output needed to re-verify them.

use std::collections::BTreeMap;
use std::path::Path;

use factorgen_core::closure::{Cf1Question, Cf2Question, Cf3Item};
use factorgen_core::folding::{Vz1Item, Vz2Item};
use factorgen_core::mapplan::MapInstance;
use factorgen_core::memory::Ma1Item;
use factorgen_core::occlusion::CsItem;
use factorgen_core::scoring::{AnswerKind, GroundTruth, QuestionFormat, Subtest, Variant, VariantGroup};
use factorgen_core::spatial::{CardItem, CubeItem};
use factorgen_core::Difficulty;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};

pub const MANIFEST_SCHEMA: &str = "factorgen.manifest";
pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

/// Per-subtest item counts at one difficulty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plan {
    pub difficulty: Difficulty,
    pub counts: BTreeMap<Subtest, usize>,
}

impl Plan {
    /// The reference question counts for every generated subtest.
    pub fn reference(difficulty: Difficulty) -> Self {
        let counts = Subtest::GENERATED.iter().map(|&s| (s, s.reference_counts().0)).collect();
        Plan { difficulty, counts }
    }

    pub fn empty(difficulty: Difficulty) -> Self {
        Plan { difficulty, counts: BTreeMap::new() }
    }

    /// Same subtests, each capped at `n` items.
    pub fn capped(mut self, n: usize) -> Self {
        for c in self.counts.values_mut() {
            *c = (*c).min(n);
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        for s in self.counts.keys() {
            if !s.is_generated() {
                return Err(HarnessError::Config(format!("{s} items are not generated by this tool")));
            }
        }
        Ok(())
    }
}

/// Generator output, kept whole so oracles can re-derive every gold label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "data", rename_all = "snake_case")]
pub enum Payload {
    HiddenFigures(Cf1Question),
    HiddenPatterns(Cf2Question),
    Copying(Cf3Item),
    Occlusion(CsItem),
    PictureNumber(Ma1Item),
    CardRotation(CardItem),
    CubePair(CubeItem),
    MapPlan(MapInstance),
    FormBoard(Vz1Item),
    PaperFold(Vz2Item),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageRef {
    pub role: String,
    /// Relative to the corpus directory.
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub query_id: String,
    pub template: String,
    pub slots: BTreeMap<String, String>,
    /// Image roles in prompt order.
    pub images: Vec<String>,
    #[serde(flatten)]
    pub variant: Variant,
    pub answer: AnswerKind,
    /// Admissible answers for closed formats; empty for open vocabularies.
    pub choices: Vec<String>,
    pub gold: GroundTruth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemRecord {
    pub subtest: Subtest,
    pub item_id: String,
    pub seed: u64,
    pub difficulty: Difficulty,
    pub format: QuestionFormat,
    pub group: VariantGroup,
    pub images: Vec<ImageRef>,
    pub queries: Vec<QueryRecord>,
    pub params: serde_json::Value,
    pub payload: Payload,
}

impl ItemRecord {
    pub fn image_path(&self, role: &str) -> Option<&str> {
        self.images.iter().find(|i| i.role == role).map(|i| i.path.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub version: u32,
    pub generator: String,
    pub rng: String,
    pub master_seed: u64,
    pub plan: Plan,
    pub items: Vec<ItemRecord>,
}

impl Manifest {
    pub fn new(master_seed: u64, plan: Plan, items: Vec<ItemRecord>) -> Self {
        Manifest {
            schema: MANIFEST_SCHEMA.to_string(),
            version: SCHEMA_VERSION,
            generator: format!("factorgen {}", env!("CARGO_PKG_VERSION")),
            rng: factorgen_core::rng::ALGORITHM.to_string(),
            master_seed,
            plan,
            items,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let m: Manifest = serde_json::from_str(text).map_err(HarnessError::parse("manifest"))?;
        if m.schema != MANIFEST_SCHEMA || m.version != SCHEMA_VERSION {
            return Err(HarnessError::Config(format!(
                "unsupported manifest schema {} v{} (expected {MANIFEST_SCHEMA} v{SCHEMA_VERSION})",
                m.schema, m.version
            )));
        }
        Ok(m)
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(HarnessError::io(&path))?;
        Self::from_text(&text)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST_FILE);
        std::fs::write(&path, self.to_text()).map_err(HarnessError::io(&path))
    }

    /// SHA-256 of the canonical text, used to tie transcripts to their corpus.
    pub fn digest(&self) -> String {
        format!("{:x}", Sha256::digest(self.to_text().as_bytes()))
    }

    pub fn queries(&self) -> impl Iterator<Item = (&ItemRecord, &QueryRecord)> {
        self.items.iter().flat_map(|i| i.queries.iter().map(move |q| (i, q)))
    }

    pub fn query(&self, id: &str) -> Option<(&ItemRecord, &QueryRecord)> {
        self.queries().find(|(_, q)| q.query_id == id)
    }

    /// (items, queries) per subtest.
    pub fn counts(&self) -> BTreeMap<Subtest, (usize, usize)> {
        let mut out: BTreeMap<Subtest, (usize, usize)> = BTreeMap::new();
        for item in &self.items {
            let e = out.entry(item.subtest).or_default();
            e.0 += 1;
            e.1 += item.queries.len();
        }
        out
    }
}
