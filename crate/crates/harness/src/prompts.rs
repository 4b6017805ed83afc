//! Prompt templates and message assembly.
//!
//! Templates are plain text with `{{slot}}` placeholders. The same text is
//! served to human participants, so both see identical instructions.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::manifest::{ItemRecord, QueryRecord};

const TEMPLATES: [(&str, &str); 12] = [
    ("cf1", include_str!("../templates/cf1.txt")),
    ("cf2", include_str!("../templates/cf2.txt")),
    ("cf3", include_str!("../templates/cf3.txt")),
    ("cs1", include_str!("../templates/cs1.txt")),
    ("cs2", include_str!("../templates/cs2.txt")),
    ("cs3", include_str!("../templates/cs3.txt")),
    ("ma1", include_str!("../templates/ma1.txt")),
    ("s1", include_str!("../templates/s1.txt")),
    ("s2", include_str!("../templates/s2.txt")),
    ("ss3", include_str!("../templates/ss3.txt")),
    ("vz1", include_str!("../templates/vz1.txt")),
    ("vz2", include_str!("../templates/vz2.txt")),
];

pub fn template(id: &str) -> Option<&'static str> {
    TEMPLATES.iter().find(|(k, _)| *k == id).map(|(_, t)| *t)
}

pub fn template_ids() -> impl Iterator<Item = &'static str> {
    TEMPLATES.iter().map(|(k, _)| *k)
}

/// Fills every `{{slot}}`; a placeholder without a value is an error.
pub fn fill(template_id: &str, slots: &BTreeMap<String, String>) -> Result<String> {
    let text = template(template_id).ok_or_else(|| HarnessError::Template {
        template: template_id.to_string(),
        message: "no such template".into(),
    })?;
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(open) = rest.find("{{") {
        out.push_str(&rest[..open]);
        let after = &rest[open + 2..];
        let close = after.find("}}").ok_or_else(|| HarnessError::Template {
            template: template_id.to_string(),
            message: "unterminated placeholder".into(),
        })?;
        let name = after[..close].trim();
        let value = slots.get(name).ok_or_else(|| HarnessError::Template {
            template: template_id.to_string(),
            message: format!("missing slot `{name}`"),
        })?;
        out.push_str(value);
        rest = &after[close + 2..];
    }
    out.push_str(rest);
    Ok(out)
}

/// A zero-shot message: instruction text plus images in prompt order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub text: String,
    pub images: Vec<PathBuf>,
}

pub fn assemble_prompt(item: &ItemRecord, query: &QueryRecord, corpus_dir: &Path) -> Result<Message> {
    let text = fill(&query.template, &query.slots)?;
    let images = query
        .images
        .iter()
        .map(|role| {
            item.image_path(role).map(|p| corpus_dir.join(p)).ok_or_else(|| HarnessError::Template {
                template: query.template.clone(),
                message: format!("item {} has no `{role}` image", item.item_id),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Message { text, images })
}
