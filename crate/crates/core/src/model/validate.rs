use std::fmt;

use super::{ElementId, ElementKind, Maximum, ModelSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IssueCode {
    /// An `@ID` member is optional or may occur zero times.
    IdOptionalConflict,
    /// An `@ID` member is itself a reference.
    IdMemberIsReference,
    /// An `@ID` entry names no member of the element.
    UnknownIdMember,
    /// `@Reference` to an element without `@ID` members.
    ReferenceWithoutId,
    InvalidCardinality,
    FreeOrderNotContiguous,
    InvalidPattern,
    EmptyLiteral,
    EmptySelection,
    EmptyComposite,
    /// Selections that can reach themselves through alternatives alone.
    SelectionCycle,
    UnreachableElement,
}

impl IssueCode {
    pub fn severity(self) -> Severity {
        match self {
            IssueCode::UnreachableElement => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub code: IssueCode,
    pub element: String,
    pub member: Option<String>,
    pub message: String,
}

impl Issue {
    pub fn severity(&self) -> Severity {
        self.code.severity()
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity() {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{level}[{:?}] {}", self.code, self.element)?;
        if let Some(m) = &self.member {
            write!(f, ".{m}")?;
        }
        write!(f, ": {}", self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity() == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Issue> {
        self.issues
            .iter()
            .filter(|i| i.severity() == Severity::Warning)
    }

    pub fn error_count(&self) -> usize {
        self.errors().count()
    }

    /// A model is usable for synthesis only when it has no errors.
    pub fn is_usable(&self) -> bool {
        self.error_count() == 0
    }

    pub fn has(&self, code: IssueCode) -> bool {
        self.issues.iter().any(|i| i.code == code)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for issue in &self.issues {
            writeln!(f, "{issue}")?;
        }
        Ok(())
    }
}

/// Checks the annotation invariants of every element. Pure: the same model
/// always yields the same report.
pub fn validate_model(m: &ModelSet) -> ValidationReport {
    let mut issues = Vec::new();
    let mut push = |code, element: &str, member: Option<&str>, message: String| {
        issues.push(Issue {
            code,
            element: element.to_string(),
            member: member.map(str::to_string),
            message,
        })
    };

    for id in m.ids() {
        let e = m.element(id);
        for lit in e.prefixes.iter().chain(&e.suffixes) {
            if lit.is_empty() {
                push(IssueCode::EmptyLiteral, &e.name, None, "empty prefix or suffix".into());
            }
        }
        match &e.kind {
            ElementKind::Basic { pattern } => {
                if pattern.regex.is_empty() {
                    push(IssueCode::InvalidPattern, &e.name, None, "pattern is empty".into());
                } else if let Err(err) = regex_automata::meta::Regex::new(&pattern.regex) {
                    push(
                        IssueCode::InvalidPattern,
                        &e.name,
                        None,
                        format!("pattern does not compile: {err}"),
                    );
                }
            }
            ElementKind::Selection { alternatives } => {
                if alternatives.is_empty() {
                    push(IssueCode::EmptySelection, &e.name, None, "selection has no alternatives".into());
                }
            }
            ElementKind::Composite { members } => {
                if members.is_empty() && e.prefixes.is_empty() && e.suffixes.is_empty() {
                    push(
                        IssueCode::EmptyComposite,
                        &e.name,
                        None,
                        "composite has neither members nor delimiters".into(),
                    );
                }
            }
        }

        let targets = m.member_targets(id);
        for (mi, member) in e.members().iter().enumerate() {
            let name = Some(member.name.as_str());
            if member.optional && member.minimum != 0 {
                push(
                    IssueCode::InvalidCardinality,
                    &e.name,
                    name,
                    format!("optional member has minimum {}", member.minimum),
                );
            }
            match member.maximum {
                Maximum::Bounded(0) => push(
                    IssueCode::InvalidCardinality,
                    &e.name,
                    name,
                    "maximum multiplicity is 0".into(),
                ),
                Maximum::Bounded(max) if member.minimum > max => push(
                    IssueCode::InvalidCardinality,
                    &e.name,
                    name,
                    format!("minimum {} exceeds maximum {max}", member.minimum),
                ),
                _ => {}
            }
            for lit in member.prefixes.iter().chain(&member.suffixes).chain(&member.separators) {
                if lit.is_empty() {
                    push(IssueCode::EmptyLiteral, &e.name, name, "empty delimiter".into());
                }
            }
            if member.is_reference && m.element(targets[mi]).id_members.is_empty() {
                push(
                    IssueCode::ReferenceWithoutId,
                    &e.name,
                    name,
                    format!("referenced element `{}` has no @ID members", member.element_type),
                );
            }
        }

        // Members of one free-order group must be adjacent.
        let members = e.members();
        for (i, member) in members.iter().enumerate() {
            let Some(group) = &member.free_order_group else { continue };
            let first = members
                .iter()
                .position(|m| m.free_order_group.as_ref() == Some(group))
                .unwrap_or(i);
            if members[first..i]
                .iter()
                .any(|m| m.free_order_group.as_ref() != Some(group))
            {
                push(
                    IssueCode::FreeOrderNotContiguous,
                    &e.name,
                    Some(&member.name),
                    format!("free-order group `{group}` is not contiguous"),
                );
            }
        }

        for id_name in &e.id_members {
            let Some(member) = e.members().iter().find(|m| &m.name == id_name) else {
                push(
                    IssueCode::UnknownIdMember,
                    &e.name,
                    Some(id_name),
                    "@ID names no member of this element".into(),
                );
                continue;
            };
            if member.optional || member.minimum == 0 {
                push(
                    IssueCode::IdOptionalConflict,
                    &e.name,
                    Some(id_name),
                    "@ID member cannot be optional".into(),
                );
            }
            if member.is_reference {
                push(
                    IssueCode::IdMemberIsReference,
                    &e.name,
                    Some(id_name),
                    "@ID member cannot be a reference".into(),
                );
            }
        }
    }

    for id in selection_cycles(m) {
        push(
            IssueCode::SelectionCycle,
            &m.element(id).name,
            None,
            "selection reaches itself through alternatives only".into(),
        );
    }

    for (i, reached) in m.reachable().into_iter().enumerate() {
        if !reached {
            push(
                IssueCode::UnreachableElement,
                &m.element(ElementId(i)).name,
                None,
                "element is not reachable from the start element".into(),
            );
        }
    }

    ValidationReport { issues }
}

fn selection_cycles(m: &ModelSet) -> Vec<ElementId> {
    let mut cyclic = Vec::new();
    for id in m.ids() {
        let mut seen = vec![false; m.len()];
        let mut stack: Vec<ElementId> = m.alternative_targets(id).to_vec();
        while let Some(next) = stack.pop() {
            if next == id {
                cyclic.push(id);
                break;
            }
            if std::mem::replace(&mut seen[next.0], true) {
                continue;
            }
            stack.extend(m.alternative_targets(next).iter().copied());
        }
    }
    cyclic
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ElementModel, Member, ModelBuilder, PatternSpec};

    fn users(user_id: Member, sender: Member) -> ModelSet {
        ModelBuilder::new()
            .start("Message")
            .element(ElementModel::composite(
                "Message",
                vec![sender, Member::new("receiver", "User").reference()],
            ))
            .element(
                ElementModel::composite("User", vec![user_id, Member::new("name", "Name")]).id(["id"]),
            )
            .element(ElementModel::basic("Number", PatternSpec::new("[0-9]+", "value")))
            .element(ElementModel::basic("Name", PatternSpec::new("[a-z]+", "value")))
            .build()
            .unwrap()
    }

    #[test]
    fn conforming_model_has_no_errors() {
        let m = users(Member::new("id", "Number"), Member::new("sender", "User").reference());
        let report = validate_model(&m);
        assert!(report.is_usable(), "{report}");
    }

    #[test]
    fn optional_id_member_conflicts() {
        let m = users(
            Member::new("id", "Number").optional(),
            Member::new("sender", "User").reference(),
        );
        let report = validate_model(&m);
        assert!(report.has(IssueCode::IdOptionalConflict));
        assert!(!report.is_usable());
    }

    #[test]
    fn minimum_zero_id_member_conflicts() {
        let m = users(
            Member::new("id", "Number").min(0),
            Member::new("sender", "User").reference(),
        );
        assert!(validate_model(&m).has(IssueCode::IdOptionalConflict));
    }

    #[test]
    fn reference_needs_id_on_target() {
        let m = ModelBuilder::new()
            .element(ElementModel::composite(
                "Message",
                vec![Member::new("sender", "User").reference()],
            ))
            .element(ElementModel::basic("User", PatternSpec::new("[0-9]+", "id")))
            .build()
            .unwrap();
        let report = validate_model(&m);
        assert!(report.has(IssueCode::ReferenceWithoutId));
    }

    #[test]
    fn unreachable_element_is_only_a_warning() {
        let m = ModelBuilder::new()
            .element(ElementModel::basic("A", PatternSpec::new("a", "v")))
            .element(ElementModel::basic("B", PatternSpec::new("b", "v")))
            .build()
            .unwrap();
        let report = validate_model(&m);
        assert!(report.has(IssueCode::UnreachableElement));
        assert!(report.is_usable());
        assert_eq!(report.warnings().count(), 1);
    }

    #[test]
    fn structural_errors_are_reported() {
        let m = ModelBuilder::new()
            .element(ElementModel::composite(
                "C",
                vec![
                    Member::new("a", "N").free_order("g").optional(),
                    Member::new("b", "N"),
                    Member::new("c", "N").free_order("g").optional(),
                    Member::new("d", "N").min(3).max(2),
                ],
            ))
            .element(ElementModel::basic("N", PatternSpec::new("(", "v")))
            .element(ElementModel::selection("S", ["T"]))
            .element(ElementModel::selection("T", ["S"]))
            .build()
            .unwrap();
        let report = validate_model(&m);
        for code in [
            IssueCode::FreeOrderNotContiguous,
            IssueCode::InvalidCardinality,
            IssueCode::InvalidPattern,
            IssueCode::SelectionCycle,
        ] {
            assert!(report.has(code), "missing {code:?} in\n{report}");
        }
    }

    #[test]
    fn validation_is_pure() {
        let m = users(
            Member::new("id", "Number").optional(),
            Member::new("sender", "User").reference(),
        );
        assert_eq!(validate_model(&m), validate_model(&m));
    }
}
