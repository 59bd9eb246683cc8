//! Abstract syntax models: annotated language elements and the immutable
//! [`ModelSet`] that grammar synthesis consumes.
//!
//! A model is a set of [`ElementModel`]s. Each element is one of
//!
//! * a *composite*, an ordered concatenation of [`Member`]s,
//! * a *selection*, a choice among other elements,
//! * a *basic* element, recognised directly by a [`PatternSpec`].
//!
//! Annotations (prefixes, suffixes, separators, cardinality, free order,
//! identifiers, references, constraints and disambiguation hints) are plain
//! fields on these types. Models are declared either through the builder
//! methods below or through the model-description file format in [`file`].

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod file;
mod validate;

pub use validate::{validate_model, Issue, IssueCode, Severity, ValidationReport};

/// Index of an element inside a [`ModelSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Associativity {
    Left,
    Right,
    #[default]
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Composition {
    #[default]
    Eager,
    Lazy,
}

/// `@Associativity`, `@Composition` and `@Priority`. Larger priorities bind
/// tighter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct DisambiguationSpec {
    pub associativity: Associativity,
    pub composition: Composition,
    pub priority: i32,
}

impl DisambiguationSpec {
    pub fn is_default(&self) -> bool {
        *self == DisambiguationSpec::default()
    }
}

/// `@Pattern` plus the `@Value` field that receives the matched lexeme.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PatternSpec {
    pub regex: String,
    pub value_binding: String,
}

impl PatternSpec {
    pub fn new(regex: impl Into<String>, value_binding: impl Into<String>) -> Self {
        PatternSpec {
            regex: regex.into(),
            value_binding: value_binding.into(),
        }
    }
}

/// Upper bound of a member's multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Maximum {
    Bounded(u32),
    Unbounded,
}

impl Maximum {
    pub fn admits(self, count: u32) -> bool {
        match self {
            Maximum::Bounded(max) => count <= max,
            Maximum::Unbounded => true,
        }
    }
}

impl fmt::Display for Maximum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Maximum::Bounded(n) => write!(f, "{n}"),
            Maximum::Unbounded => f.write_str("unbounded"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Member {
    pub name: String,
    pub element_type: String,
    pub optional: bool,
    pub minimum: u32,
    pub maximum: Maximum,
    pub separators: Vec<String>,
    pub prefixes: Vec<String>,
    pub suffixes: Vec<String>,
    pub is_reference: bool,
    pub free_order_group: Option<String>,
}

impl Member {
    /// A mandatory member holding exactly one `element_type`.
    pub fn new(name: impl Into<String>, element_type: impl Into<String>) -> Self {
        Member {
            name: name.into(),
            element_type: element_type.into(),
            optional: false,
            minimum: 1,
            maximum: Maximum::Bounded(1),
            separators: Vec::new(),
            prefixes: Vec::new(),
            suffixes: Vec::new(),
            is_reference: false,
            free_order_group: None,
        }
    }

    pub fn optional(mut self) -> Self {
        self.optional = true;
        self.minimum = 0;
        self
    }

    /// Zero or more repetitions.
    pub fn list(self) -> Self {
        self.min(0).unbounded()
    }

    pub fn min(mut self, minimum: u32) -> Self {
        self.minimum = minimum;
        self
    }

    pub fn max(mut self, maximum: u32) -> Self {
        self.maximum = Maximum::Bounded(maximum);
        self
    }

    pub fn unbounded(mut self) -> Self {
        self.maximum = Maximum::Unbounded;
        self
    }

    pub fn separator(mut self, token: impl Into<String>) -> Self {
        self.separators.push(token.into());
        self
    }

    pub fn prefix(mut self, token: impl Into<String>) -> Self {
        self.prefixes.push(token.into());
        self
    }

    pub fn suffix(mut self, token: impl Into<String>) -> Self {
        self.suffixes.push(token.into());
        self
    }

    pub fn reference(mut self) -> Self {
        self.is_reference = true;
        self
    }

    pub fn free_order(mut self, group: impl Into<String>) -> Self {
        self.free_order_group = Some(group.into());
        self
    }

    /// True for members that occur exactly once.
    pub fn is_single(&self) -> bool {
        !self.optional && self.minimum == 1 && self.maximum == Maximum::Bounded(1)
    }

    /// True for members that may repeat more than once.
    pub fn is_repeated(&self) -> bool {
        self.maximum != Maximum::Bounded(1) && self.maximum != Maximum::Bounded(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Composite { members: Vec<Member> },
    Selection { alternatives: Vec<String> },
    Basic { pattern: PatternSpec },
}

impl ElementKind {
    pub fn label(&self) -> &'static str {
        match self {
            ElementKind::Composite { .. } => "composite",
            ElementKind::Selection { .. } => "selection",
            ElementKind::Basic { .. } => "basic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ElementModel {
    pub name: String,
    pub kind: ElementKind,
    pub prefixes: Vec<String>,
    pub suffixes: Vec<String>,
    pub id_members: Vec<String>,
    pub custom_constraints: Vec<String>,
    pub disambiguation: DisambiguationSpec,
}

impl ElementModel {
    fn with_kind(name: impl Into<String>, kind: ElementKind) -> Self {
        ElementModel {
            name: name.into(),
            kind,
            prefixes: Vec::new(),
            suffixes: Vec::new(),
            id_members: Vec::new(),
            custom_constraints: Vec::new(),
            disambiguation: DisambiguationSpec::default(),
        }
    }

    pub fn composite(name: impl Into<String>, members: Vec<Member>) -> Self {
        Self::with_kind(name, ElementKind::Composite { members })
    }

    pub fn selection<S: Into<String>>(
        name: impl Into<String>,
        alternatives: impl IntoIterator<Item = S>,
    ) -> Self {
        let alternatives = alternatives.into_iter().map(Into::into).collect();
        Self::with_kind(name, ElementKind::Selection { alternatives })
    }

    pub fn basic(name: impl Into<String>, pattern: PatternSpec) -> Self {
        Self::with_kind(name, ElementKind::Basic { pattern })
    }

    pub fn prefix(mut self, token: impl Into<String>) -> Self {
        self.prefixes.push(token.into());
        self
    }

    pub fn suffix(mut self, token: impl Into<String>) -> Self {
        self.suffixes.push(token.into());
        self
    }

    /// Marks the named members as this element's identifier (`@ID`).
    pub fn id<S: Into<String>>(mut self, members: impl IntoIterator<Item = S>) -> Self {
        self.id_members = members.into_iter().map(Into::into).collect();
        self
    }

    /// Attaches a named `@Constraint` hook.
    pub fn constraint(mut self, name: impl Into<String>) -> Self {
        self.custom_constraints.push(name.into());
        self
    }

    pub fn priority(mut self, priority: i32) -> Self {
        self.disambiguation.priority = priority;
        self
    }

    pub fn associativity(mut self, associativity: Associativity) -> Self {
        self.disambiguation.associativity = associativity;
        self
    }

    pub fn composition(mut self, composition: Composition) -> Self {
        self.disambiguation.composition = composition;
        self
    }

    pub fn members(&self) -> &[Member] {
        match &self.kind {
            ElementKind::Composite { members } => members,
            _ => &[],
        }
    }

    pub fn alternatives(&self) -> &[String] {
        match &self.kind {
            ElementKind::Selection { alternatives } => alternatives,
            _ => &[],
        }
    }

    pub fn pattern(&self) -> Option<&PatternSpec> {
        match &self.kind {
            ElementKind::Basic { pattern } => Some(pattern),
            _ => None,
        }
    }

    pub fn member_index(&self, name: &str) -> Option<usize> {
        self.members().iter().position(|m| m.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("model has no elements")]
    Empty,
    #[error("duplicate element name `{0}`")]
    DuplicateElementName(String),
    #[error("unknown element type `{name}` referenced from `{from}`")]
    UnknownType { name: String, from: String },
    #[error("start element `{0}` is not defined")]
    UnknownStart(String),
}

/// A built, immutable model: element descriptions plus resolved handles.
#[derive(Debug, Clone)]
pub struct ModelSet {
    elements: Vec<ElementModel>,
    start: ElementId,
    by_name: HashMap<String, ElementId>,
    member_targets: Vec<Vec<ElementId>>,
    alternative_targets: Vec<Vec<ElementId>>,
}

impl PartialEq for ModelSet {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements && self.start == other.start
    }
}

impl Eq for ModelSet {}

/// Collects element descriptions and builds a [`ModelSet`].
#[derive(Debug, Clone, Default)]
pub struct ModelBuilder {
    elements: Vec<ElementModel>,
    start: Option<String>,
}

impl ModelBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn start(mut self, name: impl Into<String>) -> Self {
        self.start = Some(name.into());
        self
    }

    pub fn element(mut self, element: ElementModel) -> Self {
        self.elements.push(element);
        self
    }

    pub fn build(self) -> Result<ModelSet, ModelError> {
        let start = self
            .start
            .or_else(|| self.elements.first().map(|e| e.name.clone()))
            .ok_or(ModelError::Empty)?;
        build_model(self.elements, &start)
    }
}

/// Builds a model set from element descriptions, resolving every member and
/// alternative type name. Recursion among elements is allowed.
pub fn build_model(elements: Vec<ElementModel>, start: &str) -> Result<ModelSet, ModelError> {
    if elements.is_empty() {
        return Err(ModelError::Empty);
    }
    let mut by_name = HashMap::with_capacity(elements.len());
    for (i, e) in elements.iter().enumerate() {
        if by_name.insert(e.name.clone(), ElementId(i)).is_some() {
            return Err(ModelError::DuplicateElementName(e.name.clone()));
        }
    }
    let lookup = |name: &str, from: &str| {
        by_name
            .get(name)
            .copied()
            .ok_or_else(|| ModelError::UnknownType {
                name: name.to_string(),
                from: from.to_string(),
            })
    };
    let mut member_targets = Vec::with_capacity(elements.len());
    let mut alternative_targets = Vec::with_capacity(elements.len());
    for e in &elements {
        let members = e
            .members()
            .iter()
            .map(|m| lookup(&m.element_type, &format!("{}.{}", e.name, m.name)))
            .collect::<Result<Vec<_>, _>>()?;
        let alternatives = e
            .alternatives()
            .iter()
            .map(|a| lookup(a, &e.name))
            .collect::<Result<Vec<_>, _>>()?;
        member_targets.push(members);
        alternative_targets.push(alternatives);
    }
    let start = *by_name
        .get(start)
        .ok_or_else(|| ModelError::UnknownStart(start.to_string()))?;
    Ok(ModelSet {
        elements,
        start,
        by_name,
        member_targets,
        alternative_targets,
    })
}

impl ModelSet {
    pub fn builder() -> ModelBuilder {
        ModelBuilder::new()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn start(&self) -> ElementId {
        self.start
    }

    pub fn start_element(&self) -> &ElementModel {
        &self.elements[self.start.0]
    }

    pub fn elements(&self) -> &[ElementModel] {
        &self.elements
    }

    pub fn ids(&self) -> impl Iterator<Item = ElementId> {
        (0..self.elements.len()).map(ElementId)
    }

    pub fn element(&self, id: ElementId) -> &ElementModel {
        &self.elements[id.0]
    }

    pub fn id_of(&self, name: &str) -> Option<ElementId> {
        self.by_name.get(name).copied()
    }

    pub fn get(&self, name: &str) -> Option<&ElementModel> {
        self.id_of(name).map(|id| self.element(id))
    }

    /// Resolved element type of each member of `id`, in member order.
    pub fn member_targets(&self, id: ElementId) -> &[ElementId] {
        &self.member_targets[id.0]
    }

    pub fn alternative_targets(&self, id: ElementId) -> &[ElementId] {
        &self.alternative_targets[id.0]
    }

    /// Elements reachable from the start element through members (contained
    /// or referenced) and selection alternatives.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.elements.len()];
        let mut stack = vec![self.start];
        while let Some(id) = stack.pop() {
            if std::mem::replace(&mut seen[id.0], true) {
                continue;
            }
            stack.extend(self.member_targets(id).iter().copied());
            stack.extend(self.alternative_targets(id).iter().copied());
        }
        seen
    }
}
