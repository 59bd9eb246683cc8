use std::collections::BTreeMap;
use std::sync::Arc;

use super::{AsgNode, InstanceGraph};
use crate::lex::line_col;
use crate::model::ModelSet;

/// A custom check run on every instance of the elements naming it.
/// Returns a message describing the violation.
pub type ConstraintHook = Arc<dyn Fn(&InstanceGraph, &AsgNode) -> Result<(), String> + Send + Sync>;

#[derive(Clone, Default)]
pub struct ConstraintRegistry {
    hooks: BTreeMap<String, ConstraintHook>,
}

impl std::fmt::Debug for ConstraintRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.hooks.keys()).finish()
    }
}

impl ConstraintRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register<F>(&mut self, name: impl Into<String>, hook: F) -> &mut Self
    where
        F: Fn(&InstanceGraph, &AsgNode) -> Result<(), String> + Send + Sync + 'static,
    {
        self.hooks.insert(name.into(), Arc::new(hook));
        self
    }

    pub fn with<F>(mut self, name: impl Into<String>, hook: F) -> Self
    where
        F: Fn(&InstanceGraph, &AsgNode) -> Result<(), String> + Send + Sync + 'static,
    {
        self.register(name, hook);
        self
    }

    pub fn get(&self, name: &str) -> Option<&ConstraintHook> {
        self.hooks.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.hooks.keys().map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintViolation {
    pub node: usize,
    pub element_type: String,
    pub constraint: String,
    pub message: String,
    pub span: (usize, usize),
    pub line: usize,
    pub column: usize,
}

impl std::fmt::Display for ConstraintViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}: constraint {} violated: {}", self.line, self.column, self.constraint, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstraintReport {
    pub violations: Vec<ConstraintViolation>,
    /// Number of hook invocations.
    pub checked: usize,
}

impl ConstraintReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Runs every element's hooks over its instances, depth-first from the root
/// through containment and reference edges, visiting each node once. A
/// constraint with no registered hook counts as violated.
pub fn check_constraints(graph: &InstanceGraph, model: &ModelSet, registry: &ConstraintRegistry) -> ConstraintReport {
    let mut report = ConstraintReport::default();
    let mut visited = vec![false; graph.nodes().len()];
    let mut stack = vec![graph.root()];
    while let Some(id) = stack.pop() {
        if std::mem::replace(&mut visited[id], true) {
            continue;
        }
        let node = graph.node(id);
        if let Some(element) = model.get(&node.element_type) {
            for name in &element.custom_constraints {
                let outcome = match registry.get(name) {
                    Some(hook) => {
                        report.checked += 1;
                        hook(graph, node)
                    }
                    None => Err("no hook is registered for this constraint".to_string()),
                };
                if let Err(message) = outcome {
                    let (line, column) = line_col(graph.input(), node.span.0);
                    report.violations.push(ConstraintViolation {
                        node: id,
                        element_type: node.element_type.clone(),
                        constraint: name.clone(),
                        message,
                        span: node.span,
                        line,
                        column,
                    });
                }
            }
        }
        let edges = node.edges();
        stack.extend(edges.iter().rev().map(|e| e.1).filter(|&t| !visited[t]));
    }
    report
}
