//! Abstract syntax graphs: model-object instances built from a parse tree,
//! with identifier references turned into edges.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::earley::{ParseTree, TreeKind};
use crate::grammar::{Grammar, NtKind, Origin, SymbolRole};
use crate::lex::line_col;
use crate::model::{ElementKind, ModelSet};

mod constraints;
mod export;

pub use constraints::{check_constraints, ConstraintHook, ConstraintRegistry, ConstraintReport, ConstraintViolation};

type Fields = Vec<(String, FieldValue)>;

/// Placeholder for an `@Reference` member, filled in by resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefSlot {
    pub target_type: String,
    /// One entry per identifier member of the target, in declaration order.
    pub key: Vec<String>,
    pub resolved_to: Option<usize>,
    pub span: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldValue {
    Scalar(String),
    Node(usize),
    Ref(RefSlot),
    List(Vec<FieldValue>),
    Absent,
}

impl FieldValue {
    pub fn as_scalar(&self) -> Option<&str> {
        match self {
            FieldValue::Scalar(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_node(&self) -> Option<usize> {
        match self {
            FieldValue::Node(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_ref_slot(&self) -> Option<&RefSlot> {
        match self {
            FieldValue::Ref(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[FieldValue]> {
        match self {
            FieldValue::List(l) => Some(l),
            _ => None,
        }
    }

    pub fn is_absent(&self) -> bool {
        matches!(self, FieldValue::Absent)
    }

    /// Node ids this value points at, containment and resolved references
    /// alike.
    fn targets(&self, out: &mut Vec<(usize, bool)>) {
        match self {
            FieldValue::Node(n) => out.push((*n, false)),
            FieldValue::Ref(RefSlot { resolved_to: Some(n), .. }) => out.push((*n, true)),
            FieldValue::List(items) => items.iter().for_each(|v| v.targets(out)),
            _ => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsgNode {
    pub id: usize,
    pub element_type: String,
    /// Member values in declaration order; basic elements carry one field
    /// named after their value binding.
    pub fields: Vec<(String, FieldValue)>,
    pub span: (usize, usize),
}

impl AsgNode {
    pub fn field(&self, name: &str) -> Option<&FieldValue> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    /// Scalar value of a basic element node.
    pub fn value(&self) -> Option<&str> {
        match self.fields.as_slice() {
            [(_, FieldValue::Scalar(s))] => Some(s),
            _ => None,
        }
    }

    /// `(field, target, is_reference)` for every outgoing edge.
    pub fn edges(&self) -> Vec<(&str, usize, bool)> {
        let mut out = Vec::new();
        for (name, value) in &self.fields {
            let mut targets = Vec::new();
            value.targets(&mut targets);
            out.extend(targets.into_iter().map(|(t, r)| (name.as_str(), t, r)));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub code: &'static str,
    pub message: String,
    pub span: (usize, usize),
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceGraph {
    nodes: Vec<AsgNode>,
    root: usize,
    input: String,
    pub warnings: Vec<Warning>,
}

impl InstanceGraph {
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn nodes(&self) -> &[AsgNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &AsgNode {
        &self.nodes[id]
    }

    pub fn input(&self) -> &str {
        &self.input
    }

    pub fn text(&self, id: usize) -> &str {
        let (s, e) = self.nodes[id].span;
        &self.input[s..e]
    }

    /// Node a field points at, following a resolved reference if needed.
    pub fn target(&self, value: &FieldValue) -> Option<usize> {
        match value {
            FieldValue::Node(n) => Some(*n),
            FieldValue::Ref(r) => r.resolved_to,
            _ => None,
        }
    }

    pub fn nodes_of_type<'a>(&'a self, element: &'a str) -> impl Iterator<Item = &'a AsgNode> + 'a {
        self.nodes.iter().filter(move |n| n.element_type == element)
    }

    pub fn ref_slots(&self) -> impl Iterator<Item = (usize, &RefSlot)> {
        fn walk<'a>(v: &'a FieldValue, out: &mut Vec<&'a RefSlot>) {
            match v {
                FieldValue::Ref(r) => out.push(r),
                FieldValue::List(items) => items.iter().for_each(|i| walk(i, out)),
                _ => {}
            }
        }
        self.nodes.iter().flat_map(|n| {
            let mut out = Vec::new();
            n.fields.iter().for_each(|(_, v)| walk(v, &mut out));
            out.into_iter().map(move |r| (n.id, r))
        })
    }

    /// Number of containment edges; a tree has one fewer than it has nodes.
    pub fn containment_edge_count(&self) -> usize {
        self.nodes.iter().map(|n| n.edges().iter().filter(|e| !e.2).count()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Duplicate {
    pub element_type: String,
    pub key: Vec<String>,
    /// First definition first.
    pub node_ids: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolTable {
    pub entries: BTreeMap<(String, Vec<String>), usize>,
    pub duplicates: Vec<Duplicate>,
}

impl SymbolTable {
    pub fn lookup(&self, element_type: &str, key: &[String]) -> Option<usize> {
        self.entries.get(&(element_type.to_string(), key.to_vec())).copied()
    }

    fn register(&mut self, element_type: &str, key: Vec<String>, node: usize) {
        let k = (element_type.to_string(), key);
        match self.entries.get(&k) {
            None => {
                self.entries.insert(k, node);
            }
            Some(&first) => match self
                .duplicates
                .iter_mut()
                .find(|d| d.element_type == k.0 && d.key == k.1)
            {
                Some(d) => d.node_ids.push(node),
                None => self.duplicates.push(Duplicate {
                    element_type: k.0,
                    key: k.1,
                    node_ids: vec![first, node],
                }),
            },
        }
    }
}

fn key_text(tree: &ParseTree, t: usize) -> String {
    tree.lexemes(t).join(" ")
}

struct Builder<'a> {
    tree: &'a ParseTree,
    grammar: &'a Grammar,
    model: &'a ModelSet,
}

impl Builder<'_> {
    fn production(&self, t: usize) -> Option<&crate::grammar::Production> {
        match self.tree.node(t).kind {
            TreeKind::Inner { production, .. } => Some(self.grammar.production(production)),
            TreeKind::Leaf { .. } => None,
        }
    }

    fn nt_kind(&self, t: usize) -> Option<NtKind> {
        match self.tree.node(t).kind {
            TreeKind::Inner { nt, .. } => Some(self.grammar.nonterminal(nt).kind),
            TreeKind::Leaf { .. } => None,
        }
    }

    fn children_with_role(&self, t: usize) -> Vec<(SymbolRole, usize)> {
        let p = self.production(t).expect("inner node");
        p.roles.iter().copied().zip(self.tree.node(t).children.iter().copied()).collect()
    }

    /// Follows selection alternatives down to the node that builds an object.
    fn instance_node(&self, mut t: usize) -> usize {
        while let Some(p) = self.production(t) {
            if p.origin != Origin::SelectionAlt {
                break;
            }
            t = self
                .children_with_role(t)
                .into_iter()
                .find(|(r, _)| *r == SymbolRole::Alternative)
                .map(|(_, c)| c)
                .expect("selection alternative");
        }
        t
    }

    fn ref_slot(&self, t: usize) -> RefSlot {
        let p = self.production(t).expect("reference node");
        let target = &self.grammar.owner(p.owner).name;
        let key = self
            .children_with_role(t)
            .into_iter()
            .filter(|(r, _)| matches!(r, SymbolRole::IdMember(_)))
            .map(|(_, c)| key_text(self.tree, c))
            .collect();
        RefSlot {
            target_type: target.clone(),
            key,
            resolved_to: None,
            span: self.tree.node(t).span,
        }
    }

    /// Value of one occurrence of a member: a pending child instance (by
    /// tree index) or a reference slot.
    fn item(&self, t: usize, pending: &mut Vec<usize>) -> FieldValue {
        match self.nt_kind(t) {
            Some(NtKind::Reference) => FieldValue::Ref(self.ref_slot(t)),
            _ => {
                let inst = self.instance_node(t);
                pending.push(inst);
                FieldValue::Node(inst)
            }
        }
    }

    /// Items under a repetition helper, in source order. Helpers are right
    /// recursive with at most one nested helper, placed after the items.
    fn items(&self, t: usize, pending: &mut Vec<usize>) -> Vec<FieldValue> {
        let mut out = Vec::new();
        let mut next = Some(t);
        while let Some(n) = next.take() {
            for (role, c) in self.children_with_role(n) {
                if role == SymbolRole::Item {
                    out.push(self.item(c, pending));
                } else if self.nt_kind(c) == Some(NtKind::Auxiliary) {
                    next = Some(c);
                }
            }
        }
        out
    }

    /// Fields of the object built at tree node `t`; child instances are
    /// appended to `pending` in member order.
    fn fields(&self, t: usize, pending: &mut Vec<usize>) -> (String, Fields, Vec<(String, String)>) {
        let p = self.production(t).expect("instance node");
        let element_name = self.grammar.owner(p.owner).name.clone();
        let element = self.model.get(&element_name).expect("owner is a model element");
        let children = self.children_with_role(t);
        match &element.kind {
            ElementKind::Basic { pattern } => {
                let lexeme = children
                    .iter()
                    .find(|(r, _)| *r == SymbolRole::Value)
                    .and_then(|&(_, c)| match &self.tree.node(c).kind {
                        TreeKind::Leaf { lexeme, .. } => Some(lexeme.clone()),
                        TreeKind::Inner { .. } => None,
                    })
                    .unwrap_or_default();
                (element_name, vec![(pattern.value_binding.clone(), FieldValue::Scalar(lexeme))], Vec::new())
            }
            ElementKind::Selection { .. } => unreachable!("selections are transparent"),
            ElementKind::Composite { members } => {
                let mut fields = Vec::with_capacity(members.len());
                let mut keys = Vec::new();
                for (mi, member) in members.iter().enumerate() {
                    let child = children.iter().find(|(r, _)| *r == SymbolRole::Member(mi)).map(|&(_, c)| c);
                    let items = match child {
                        None => Vec::new(),
                        Some(c) if self.nt_kind(c) == Some(NtKind::Auxiliary) => self.items(c, pending),
                        Some(c) => vec![self.item(c, pending)],
                    };
                    let value = if member.is_repeated() {
                        FieldValue::List(items)
                    } else {
                        items.into_iter().next().unwrap_or(FieldValue::Absent)
                    };
                    if element.id_members.contains(&member.name) {
                        keys.push((member.name.clone(), child.map(|c| key_text(self.tree, c)).unwrap_or_default()));
                    }
                    fields.push((member.name.clone(), value));
                }
                (element_name, fields, keys)
            }
        }
    }
}

fn remap(value: &mut FieldValue, ids: &BTreeMap<usize, usize>) {
    match value {
        FieldValue::Node(n) => *n = ids[n],
        FieldValue::List(items) => items.iter_mut().for_each(|v| remap(v, ids)),
        _ => {}
    }
}

/// Builds one node per object in the tree. Node ids follow a preorder walk
/// with children in member declaration order, so the source order of
/// free-order members does not affect numbering. Objects with identifier
/// members are entered in the symbol table; repeated keys are recorded as
/// duplicates.
pub fn build_instances(tree: &ParseTree, grammar: &Grammar, model: &ModelSet) -> (InstanceGraph, SymbolTable) {
    let b = Builder { tree, grammar, model };
    let mut nodes: Vec<AsgNode> = Vec::new();
    let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
    let mut table = SymbolTable::default();
    let mut stack = vec![b.instance_node(tree.root())];
    while let Some(t) = stack.pop() {
        let id = nodes.len();
        ids.insert(t, id);
        let mut pending = Vec::new();
        let (element_type, fields, keys) = b.fields(t, &mut pending);
        if !keys.is_empty() {
            let element = model.get(&element_type).expect("model element");
            let key = element
                .id_members
                .iter()
                .map(|m| keys.iter().find(|(n, _)| n == m).map(|(_, k)| k.clone()).unwrap_or_default())
                .collect();
            table.register(&element_type, key, id);
        }
        nodes.push(AsgNode {
            id,
            element_type,
            fields,
            span: tree.node(t).span,
        });
        stack.extend(pending.into_iter().rev());
    }
    for node in &mut nodes {
        for (_, value) in &mut node.fields {
            remap(value, &ids);
        }
    }
    let graph = InstanceGraph {
        nodes,
        root: 0,
        input: tree.input().to_string(),
        warnings: Vec::new(),
    };
    (graph, table)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: unresolved reference: no {target_type} with key {key:?}")]
pub struct UnresolvedReference {
    pub target_type: String,
    pub key: Vec<String>,
    pub span: (usize, usize),
    pub line: usize,
    pub column: usize,
}

/// Binds every reference slot to the symbol-table entry for its key. Runs
/// after the whole input has been instantiated, so references may precede
/// or sit inside their target. Each duplicate key produces one warning.
pub fn resolve_references(mut graph: InstanceGraph, table: &SymbolTable) -> Result<InstanceGraph, UnresolvedReference> {
    fn bind(value: &mut FieldValue, table: &SymbolTable, input: &str) -> Result<(), UnresolvedReference> {
        match value {
            FieldValue::Ref(slot) => match table.lookup(&slot.target_type, &slot.key) {
                Some(id) => {
                    slot.resolved_to = Some(id);
                    Ok(())
                }
                None => {
                    let (line, column) = line_col(input, slot.span.0);
                    Err(UnresolvedReference {
                        target_type: slot.target_type.clone(),
                        key: slot.key.clone(),
                        span: slot.span,
                        line,
                        column,
                    })
                }
            },
            FieldValue::List(items) => items.iter_mut().try_for_each(|v| bind(v, table, input)),
            _ => Ok(()),
        }
    }
    let input = std::mem::take(&mut graph.input);
    for node in &mut graph.nodes {
        for (_, value) in &mut node.fields {
            if let Err(e) = bind(value, table, &input) {
                graph.input = input;
                return Err(e);
            }
        }
    }
    for d in &table.duplicates {
        let later = graph.nodes[d.node_ids[1]].span;
        let first = graph.nodes[d.node_ids[0]].span;
        let (line, column) = line_col(&input, later.0);
        let (fl, fc) = line_col(&input, first.0);
        graph.warnings.push(Warning {
            code: "W-DUPLICATE-ID",
            message: format!(
                "duplicate {} {:?} ({} definitions); references bind to the first, at {fl}:{fc}",
                d.element_type,
                d.key.join(" "),
                d.node_ids.len()
            ),
            span: later,
            line,
            column,
        });
    }
    graph.input = input;
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::earley::{disambiguate, parse};
    use crate::grammar::synthesize;
    use crate::lex::Lexer;

    fn messages() -> ModelSet {
        crate::messages::model()
    }

    fn graph(m: &ModelSet, text: &str) -> (InstanceGraph, SymbolTable) {
        let g = synthesize(m).unwrap();
        let lattice = Lexer::new(&g).unwrap().scan(text).unwrap();
        let tree = disambiguate(&parse(&g, &lattice).unwrap(), &g).unwrap();
        build_instances(&tree, &g, m)
    }

    #[test]
    fn references_resolve_in_either_direction() {
        let m = messages();
        let text = r#"message from 1 to 2 "hi" user 1 ann user 2 bob message from 2 to 1 "yo""#;
        let (g, table) = graph(&m, text);
        assert_eq!(table.entries.len(), 2);
        let g = resolve_references(g, &table).unwrap();
        let users: Vec<usize> = g.nodes_of_type("User").map(|n| n.id).collect();
        let msgs: Vec<&AsgNode> = g.nodes_of_type("Message").collect();
        assert_eq!(g.target(msgs[0].field("sender").unwrap()), Some(users[0]));
        assert_eq!(g.target(msgs[0].field("receiver").unwrap()), Some(users[1]));
        assert_eq!(g.target(msgs[1].field("sender").unwrap()), Some(users[1]));
        assert!(g.warnings.is_empty());
    }

    #[test]
    fn unresolved_reference_names_key() {
        let m = messages();
        let (g, table) = graph(&m, "user 1 ann\nmessage from 1 to 7 \"x\"");
        let err = resolve_references(g, &table).unwrap_err();
        assert_eq!(err.key, ["7"]);
        assert_eq!((err.line, err.column), (2, 19));
    }

    #[test]
    fn duplicate_ids_warn_once_and_first_wins() {
        let m = messages();
        let (g, table) = graph(&m, "user 1 ann user 1 bob user 1 cy message from 1 to 1 \"x\"");
        assert_eq!(table.duplicates.len(), 1);
        assert_eq!(table.duplicates[0].node_ids.len(), 3);
        let g = resolve_references(g, &table).unwrap();
        assert_eq!(g.warnings.len(), 1);
        let first = g.nodes_of_type("User").next().unwrap().id;
        let msg = g.nodes_of_type("Message").next().unwrap();
        assert_eq!(g.target(msg.field("sender").unwrap()), Some(first));
    }

    #[test]
    fn basic_values_and_preorder_ids() {
        let m = messages();
        let (g, _) = graph(&m, "user 42 zed");
        let types: Vec<&str> = g.nodes().iter().map(|n| n.element_type.as_str()).collect();
        assert_eq!(types, ["Document", "User", "Number", "Name"]);
        assert_eq!(g.node(2).value(), Some("42"));
        assert_eq!(g.text(1), "user 42 zed");
        assert_eq!(g.containment_edge_count(), g.nodes().len() - 1);
    }
}
