//! Model-description files.
//!
//! A description starts with the header line `asm-version: 1`, followed by a
//! TOML document:
//!
//! ```text
//! asm-version: 1
//! start = "Message"
//!
//! [[element]]
//! name = "User"
//! kind = "composite"
//! idMembers = ["id"]
//!
//! [[element.members]]
//! name = "id"
//! elementType = "Number"
//! ```
//!
//! Field names mirror the in-memory types in camelCase. Defaults (no
//! delimiters, single mandatory members, default disambiguation) are omitted
//! when writing.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{
    build_model, DisambiguationSpec, ElementKind, ElementModel, Maximum, Member, ModelError,
    ModelSet, PatternSpec,
};

pub const ASM_VERSION: u32 = 1;
const HEADER_KEY: &str = "asm-version:";

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("missing `asm-version: {ASM_VERSION}` header line")]
    MissingHeader,
    #[error("unsupported model-description version `{0}`")]
    UnsupportedVersion(String),
    #[error("malformed model description: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("member {element}.{member}: invalid maximum `{value}`")]
    InvalidMaximum {
        element: String,
        member: String,
        value: String,
    },
    #[error("element `{element}`: {message}")]
    Shape { element: String, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Serialize, Deserialize)]
struct Document {
    start: String,
    #[serde(default, rename = "element")]
    elements: Vec<ElementDesc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct ElementDesc {
    name: String,
    kind: KindDesc,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    alternatives: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pattern: Option<PatternSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    prefixes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    suffixes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    id_members: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    custom_constraints: Vec<String>,
    #[serde(default, skip_serializing_if = "DisambiguationSpec::is_default")]
    disambiguation: DisambiguationSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    members: Vec<MemberDesc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum KindDesc {
    Composite,
    Selection,
    Basic,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct MemberDesc {
    name: String,
    element_type: String,
    #[serde(default, skip_serializing_if = "is_false")]
    optional: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    minimum: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    maximum: Option<MaximumDesc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    separators: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    prefixes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    suffixes: Vec<String>,
    #[serde(default, skip_serializing_if = "is_false")]
    is_reference: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    free_order_group: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum MaximumDesc {
    Count(u32),
    Word(String),
}

fn is_false(b: &bool) -> bool {
    !*b
}

fn default_minimum(optional: bool) -> u32 {
    if optional {
        0
    } else {
        1
    }
}

impl From<&Member> for MemberDesc {
    fn from(m: &Member) -> Self {
        MemberDesc {
            name: m.name.clone(),
            element_type: m.element_type.clone(),
            optional: m.optional,
            minimum: (m.minimum != default_minimum(m.optional)).then_some(m.minimum),
            maximum: match m.maximum {
                Maximum::Bounded(1) => None,
                Maximum::Bounded(n) => Some(MaximumDesc::Count(n)),
                Maximum::Unbounded => Some(MaximumDesc::Word("unbounded".into())),
            },
            separators: m.separators.clone(),
            prefixes: m.prefixes.clone(),
            suffixes: m.suffixes.clone(),
            is_reference: m.is_reference,
            free_order_group: m.free_order_group.clone(),
        }
    }
}

impl MemberDesc {
    fn into_member(self, element: &str) -> Result<Member, ModelFileError> {
        let maximum = match self.maximum {
            None => Maximum::Bounded(1),
            Some(MaximumDesc::Count(n)) => Maximum::Bounded(n),
            Some(MaximumDesc::Word(w)) if w == "unbounded" => Maximum::Unbounded,
            Some(MaximumDesc::Word(w)) => {
                return Err(ModelFileError::InvalidMaximum {
                    element: element.to_string(),
                    member: self.name,
                    value: w,
                })
            }
        };
        Ok(Member {
            minimum: self.minimum.unwrap_or(default_minimum(self.optional)),
            maximum,
            name: self.name,
            element_type: self.element_type,
            optional: self.optional,
            separators: self.separators,
            prefixes: self.prefixes,
            suffixes: self.suffixes,
            is_reference: self.is_reference,
            free_order_group: self.free_order_group,
        })
    }
}

impl From<&ElementModel> for ElementDesc {
    fn from(e: &ElementModel) -> Self {
        let (kind, members, alternatives, pattern) = match &e.kind {
            ElementKind::Composite { members } => (
                KindDesc::Composite,
                members.iter().map(MemberDesc::from).collect(),
                Vec::new(),
                None,
            ),
            ElementKind::Selection { alternatives } => {
                (KindDesc::Selection, Vec::new(), alternatives.clone(), None)
            }
            ElementKind::Basic { pattern } => {
                (KindDesc::Basic, Vec::new(), Vec::new(), Some(pattern.clone()))
            }
        };
        ElementDesc {
            name: e.name.clone(),
            kind,
            alternatives,
            pattern,
            prefixes: e.prefixes.clone(),
            suffixes: e.suffixes.clone(),
            id_members: e.id_members.clone(),
            custom_constraints: e.custom_constraints.clone(),
            disambiguation: e.disambiguation,
            members,
        }
    }
}

impl ElementDesc {
    fn into_element(self) -> Result<ElementModel, ModelFileError> {
        let shape = |message: &str| ModelFileError::Shape {
            element: self.name.clone(),
            message: message.to_string(),
        };
        let kind = match self.kind {
            KindDesc::Composite => {
                if !self.alternatives.is_empty() || self.pattern.is_some() {
                    return Err(shape("composite elements take only members"));
                }
                let members = self
                    .members
                    .into_iter()
                    .map(|m| m.into_member(&self.name))
                    .collect::<Result<_, _>>()?;
                ElementKind::Composite { members }
            }
            KindDesc::Selection => {
                if !self.members.is_empty() || self.pattern.is_some() {
                    return Err(shape("selection elements take only alternatives"));
                }
                ElementKind::Selection {
                    alternatives: self.alternatives,
                }
            }
            KindDesc::Basic => {
                if !self.members.is_empty() || !self.alternatives.is_empty() {
                    return Err(shape("basic elements take only a pattern"));
                }
                ElementKind::Basic {
                    pattern: self.pattern.ok_or_else(|| shape("basic element needs a pattern"))?,
                }
            }
        };
        Ok(ElementModel {
            name: self.name,
            kind,
            prefixes: self.prefixes,
            suffixes: self.suffixes,
            id_members: self.id_members,
            custom_constraints: self.custom_constraints,
            disambiguation: self.disambiguation,
        })
    }
}

/// Renders a model set as a model-description document.
pub fn to_string(model: &ModelSet) -> String {
    let doc = Document {
        start: model.start_element().name.clone(),
        elements: model.elements().iter().map(ElementDesc::from).collect(),
    };
    let body = toml::to_string(&doc).expect("model descriptions always serialize");
    format!("{HEADER_KEY} {ASM_VERSION}\n{body}")
}

/// Parses a model-description document and builds the model set.
pub fn from_str(text: &str) -> Result<ModelSet, ModelFileError> {
    let mut lines = text.splitn(2, '\n');
    let header = lines
        .by_ref()
        .next()
        .map(str::trim)
        .ok_or(ModelFileError::MissingHeader)?;
    let version = header
        .strip_prefix(HEADER_KEY)
        .ok_or(ModelFileError::MissingHeader)?
        .trim();
    if version != ASM_VERSION.to_string() {
        return Err(ModelFileError::UnsupportedVersion(version.to_string()));
    }
    let doc: Document = toml::from_str(lines.next().unwrap_or(""))?;
    let elements = doc
        .elements
        .into_iter()
        .map(ElementDesc::into_element)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(build_model(elements, &doc.start)?)
}

pub fn read(path: impl AsRef<std::path::Path>) -> Result<ModelSet, ModelFileError> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| ModelFileError::Shape {
        element: path.as_ref().display().to_string(),
        message: e.to_string(),
    })?;
    from_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Associativity, ModelBuilder};

    #[test]
    fn header_is_required() {
        assert!(matches!(
            from_str("start = \"A\"\n"),
            Err(ModelFileError::MissingHeader)
        ));
        assert!(matches!(
            from_str("asm-version: 2\nstart = \"A\"\n"),
            Err(ModelFileError::UnsupportedVersion(v)) if v == "2"
        ));
    }

    #[test]
    fn written_file_starts_with_header_and_reads_back() {
        let m = ModelBuilder::new()
            .start("Sum")
            .element(
                ElementModel::composite(
                    "Sum",
                    vec![Member::new("terms", "Number").min(1).unbounded().separator("+")],
                )
                .associativity(Associativity::Left)
                .priority(3),
            )
            .element(ElementModel::basic("Number", PatternSpec::new("[0-9]+", "value")))
            .build()
            .unwrap();
        let text = to_string(&m);
        assert!(text.starts_with("asm-version: 1\n"));
        assert!(text.contains("maximum = \"unbounded\""));
        assert_eq!(from_str(&text).unwrap(), m);
    }

    #[test]
    fn bad_maximum_word_is_rejected() {
        let text = r#"asm-version: 1
start = "A"
[[element]]
name = "A"
kind = "composite"
[[element.members]]
name = "x"
elementType = "B"
maximum = "lots"
[[element]]
name = "B"
kind = "basic"
pattern = { regex = "b", valueBinding = "v" }
"#;
        assert!(matches!(from_str(text), Err(ModelFileError::InvalidMaximum { .. })));
    }

    #[test]
    fn basic_without_pattern_is_rejected() {
        let text = "asm-version: 1\nstart = \"A\"\n[[element]]\nname = \"A\"\nkind = \"basic\"\n";
        assert!(matches!(from_str(text), Err(ModelFileError::Shape { .. })));
    }
}
