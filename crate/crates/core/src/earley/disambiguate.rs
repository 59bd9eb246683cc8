//! Forest filtering by priority, associativity and composition, and
//! extraction of the single remaining tree.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use super::{ForestChild, ParseForest};
use crate::grammar::{Grammar, NtId, NtKind, Origin, OwnerId, ProdId, TokenId};
use crate::lex::{is_whitespace, line_col};
use crate::model::{Associativity, Composition};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmbiguousDerivation {
    pub owner: String,
    pub production: String,
    /// `Symbol[start..end)` per child, spans trimmed of whitespace.
    pub children: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: ambiguous `{symbol}` over {:?}: {} derivations remain after disambiguation", .text, .alternatives.len())]
pub struct AmbiguityError {
    pub symbol: String,
    pub span: (usize, usize),
    pub text: String,
    pub line: usize,
    pub column: usize,
    pub alternatives: Vec<AmbiguousDerivation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeKind {
    Inner { nt: NtId, production: ProdId },
    Leaf { token: TokenId, edge: usize, lexeme: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub kind: TreeKind,
    /// Byte span without surrounding whitespace. Empty derivations get an
    /// empty span at their start.
    pub span: (usize, usize),
    pub children: Vec<usize>,
    /// The packed node this came from; `None` for leaves.
    pub forest_node: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseTree {
    nodes: Vec<TreeNode>,
    input: String,
}

fn trimmed(input: &str, start: usize, end: usize) -> (usize, usize) {
    let text = input[start..end].trim_end_matches(is_whitespace);
    (start, start + text.len())
}

/// Per-node filter state.
struct Filter<'a> {
    grammar: &'a Grammar,
    forest: &'a ParseForest,
    alive: Vec<Vec<bool>>,
    priority: Vec<i32>,
    heads: Vec<BTreeSet<OwnerId>>,
}

impl<'a> Filter<'a> {
    fn element_children(&self, node: usize, d: usize) -> impl Iterator<Item = usize> + '_ {
        self.forest.node(node).derivations[d].children.iter().filter_map(|c| match c {
            ForestChild::Node(k) if self.grammar.nonterminal(self.forest.node(*k).nt).kind == NtKind::Element => Some(*k),
            _ => None,
        })
    }

    fn alternative_child(&self, node: usize, d: usize) -> Option<usize> {
        let derivation = &self.forest.node(node).derivations[d];
        if self.grammar.production(derivation.production).origin != Origin::SelectionAlt {
            return None;
        }
        self.element_children(node, d).next()
    }

    fn derivation_priority(&self, node: usize, d: usize) -> i32 {
        match self.alternative_child(node, d) {
            Some(child) => self.priority[child],
            None => {
                let p = self.grammar.production(self.forest.node(node).derivations[d].production);
                self.grammar.owner(p.owner).spec.priority
            }
        }
    }

    /// Whether `child` is rooted in the same operator as `owner`, or in one
    /// binding equally tight in the same direction.
    fn nested(&self, owner: OwnerId, child: usize) -> bool {
        let spec = self.grammar.owner(owner).spec;
        self.heads[child].iter().any(|&h| {
            if h == owner {
                return true;
            }
            let other = self.grammar.owner(h).spec;
            spec.associativity != Associativity::None
                && other.associativity == spec.associativity
                && other.priority == spec.priority
        })
    }

    fn owner_of(&self, node: usize, d: usize) -> OwnerId {
        self.grammar.production(self.forest.node(node).derivations[d].production).owner
    }

    fn live(&self, node: usize) -> Vec<usize> {
        (0..self.alive[node].len()).filter(|&d| self.alive[node][d]).collect()
    }

    /// Kills the given derivations unless that would leave none.
    fn kill(&mut self, node: usize, doomed: &[usize]) {
        if doomed.is_empty() || doomed.len() >= self.live(node).len() {
            return;
        }
        for &d in doomed {
            self.alive[node][d] = false;
        }
    }

    fn run(&mut self) {
        let order = self.forest.postorder().to_vec();
        for node in order {
            self.by_priority(node);
            self.by_associativity(node);
            self.by_composition(node);
            let live = self.live(node);
            self.priority[node] = live
                .iter()
                .map(|&d| self.derivation_priority(node, d))
                .min()
                .unwrap_or(0);
            if self.grammar.nonterminal(self.forest.node(node).nt).kind == NtKind::Element {
                let mut heads = BTreeSet::new();
                for &d in &live {
                    match self.alternative_child(node, d) {
                        Some(child) => heads.extend(self.heads[child].iter().copied()),
                        None => {
                            heads.insert(self.owner_of(node, d));
                        }
                    }
                }
                self.heads[node] = heads;
            }
        }
    }

    // The loosest-binding operator must be at the root of a span, so only
    // the derivations with the lowest priority value survive.
    fn by_priority(&mut self, node: usize) {
        let live = self.live(node);
        if live.len() < 2 {
            return;
        }
        let prios: Vec<i32> = live.iter().map(|&d| self.derivation_priority(node, d)).collect();
        let min = *prios.iter().min().unwrap();
        let doomed: Vec<usize> = live.iter().zip(&prios).filter(|(_, &p)| p > min).map(|(&d, _)| d).collect();
        self.kill(node, &doomed);
    }

    fn by_associativity(&mut self, node: usize) {
        let live = self.live(node);
        if live.len() < 2 {
            return;
        }
        let doomed: Vec<usize> = live
            .iter()
            .copied()
            .filter(|&d| {
                if self.alternative_child(node, d).is_some() {
                    return false;
                }
                let owner = self.owner_of(node, d);
                let operand = match self.grammar.owner(owner).spec.associativity {
                    Associativity::Left => self.element_children(node, d).last(),
                    Associativity::Right => self.element_children(node, d).next(),
                    Associativity::None => None,
                };
                operand.is_some_and(|c| self.nested(owner, c))
            })
            .collect();
        self.kill(node, &doomed);
    }

    fn by_composition(&mut self, node: usize) {
        let live = self.live(node);
        if live.len() < 2 || live.iter().any(|&d| self.alternative_child(node, d).is_some()) {
            return;
        }
        let owner = self.owner_of(node, live[0]);
        if live.iter().any(|&d| self.owner_of(node, d) != owner) {
            return;
        }
        let input = self.forest.lattice().input();
        let metric = |d: usize| -> usize {
            self.element_children(node, d)
                .filter(|&c| self.heads[c].contains(&owner))
                .map(|c| {
                    let n = self.forest.node(c);
                    let (s, e) = trimmed(input, n.start, n.end);
                    e - s
                })
                .sum()
        };
        let scores: Vec<usize> = live.iter().map(|&d| metric(d)).collect();
        let best = match self.grammar.owner(owner).spec.composition {
            Composition::Eager => *scores.iter().max().unwrap(),
            Composition::Lazy => *scores.iter().min().unwrap(),
        };
        let doomed: Vec<usize> = live.iter().zip(&scores).filter(|(_, &s)| s != best).map(|(&d, _)| d).collect();
        self.kill(node, &doomed);
    }

    fn ambiguity(&self, node: usize) -> AmbiguityError {
        let input = self.forest.lattice().input();
        let n = self.forest.node(node);
        let span = trimmed(input, n.start, n.end);
        let (line, column) = line_col(input, n.start);
        let alternatives = self
            .live(node)
            .into_iter()
            .map(|d| {
                let derivation = &n.derivations[d];
                let p = self.grammar.production(derivation.production);
                let children = derivation
                    .children
                    .iter()
                    .map(|c| match c {
                        ForestChild::Token(e) => {
                            let edge = self.forest.lattice().edge(*e);
                            format!("{}[{}..{})", self.grammar.token(edge.token).name, edge.start, edge.end)
                        }
                        ForestChild::Node(k) => {
                            let k = self.forest.node(*k);
                            let (s, e) = trimmed(input, k.start, k.end);
                            format!("{}[{s}..{e})", self.grammar.nonterminal(k.nt).name)
                        }
                    })
                    .collect();
                AmbiguousDerivation {
                    owner: self.grammar.owner(p.owner).name.clone(),
                    production: self.grammar.display_production(p),
                    children,
                }
            })
            .collect();
        AmbiguityError {
            symbol: self.grammar.nonterminal(n.nt).name.clone(),
            span,
            text: input[span.0..span.1].to_string(),
            line,
            column,
            alternatives,
        }
    }
}

/// Applies the disambiguation filters bottom-up and extracts the tree that
/// survives. Any packed node on that tree still holding several derivations
/// is reported, outermost first.
pub fn disambiguate(forest: &ParseForest, grammar: &Grammar) -> Result<ParseTree, AmbiguityError> {
    let n = forest.nodes().len();
    let mut filter = Filter {
        grammar,
        forest,
        alive: forest.nodes().iter().map(|node| vec![true; node.derivations.len()]).collect(),
        priority: vec![0; n],
        heads: vec![BTreeSet::new(); n],
    };
    filter.run();

    let input = forest.lattice().input();
    let mut tree = ParseTree {
        nodes: Vec::new(),
        input: input.to_string(),
    };
    let mut queue = VecDeque::new();
    tree.nodes.push(TreeNode {
        kind: TreeKind::Inner {
            nt: forest.root_node().nt,
            production: ProdId(0),
        },
        span: (0, 0),
        children: Vec::new(),
        forest_node: Some(forest.root()),
    });
    queue.push_back(0usize);
    while let Some(t) = queue.pop_front() {
        let f = tree.nodes[t].forest_node.expect("inner");
        let live = filter.live(f);
        if live.len() != 1 {
            return Err(filter.ambiguity(f));
        }
        let derivation = &forest.node(f).derivations[live[0]];
        let mut children = Vec::with_capacity(derivation.children.len());
        for c in &derivation.children {
            let node = match c {
                ForestChild::Token(e) => {
                    let edge = forest.lattice().edge(*e);
                    TreeNode {
                        kind: TreeKind::Leaf {
                            token: edge.token,
                            edge: *e,
                            lexeme: edge.lexeme.clone(),
                        },
                        span: (edge.start, edge.end),
                        children: Vec::new(),
                        forest_node: None,
                    }
                }
                ForestChild::Node(k) => {
                    let kn = forest.node(*k);
                    queue.push_back(tree.nodes.len());
                    TreeNode {
                        kind: TreeKind::Inner {
                            nt: kn.nt,
                            production: ProdId(0),
                        },
                        span: trimmed(input, kn.start, kn.end),
                        children: Vec::new(),
                        forest_node: Some(*k),
                    }
                }
            };
            children.push(tree.nodes.len());
            tree.nodes.push(node);
        }
        let fnode = forest.node(f);
        tree.nodes[t].kind = TreeKind::Inner {
            nt: fnode.nt,
            production: derivation.production,
        };
        tree.nodes[t].span = trimmed(input, fnode.start, fnode.end);
        tree.nodes[t].children = children;
    }
    Ok(tree)
}

impl ParseTree {
    pub fn root(&self) -> usize {
        0
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn input(&self) -> &str {
        &self.input
    }

    /// Source text of a node, without surrounding whitespace.
    pub fn text(&self, id: usize) -> &str {
        let (s, e) = self.nodes[id].span;
        &self.input[s..e]
    }

    /// Lexemes of the leaves under `id`, in order.
    pub fn lexemes(&self, id: usize) -> Vec<&str> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(n) = stack.pop() {
            match &self.nodes[n].kind {
                TreeKind::Leaf { lexeme, .. } => out.push(lexeme.as_str()),
                TreeKind::Inner { .. } => stack.extend(self.nodes[n].children.iter().rev()),
            }
        }
        out
    }

    /// Bracketed rendering: leaves print their lexeme, nodes with a single
    /// child collapse into it, others are parenthesised.
    pub fn sexpr(&self) -> String {
        enum Job {
            Node(usize),
            Text(&'static str),
        }
        let mut out = String::new();
        let mut stack = vec![Job::Node(0)];
        while let Some(job) = stack.pop() {
            match job {
                Job::Text(s) => out.push_str(s),
                Job::Node(n) => match &self.nodes[n].kind {
                    TreeKind::Leaf { lexeme, .. } => out.push_str(lexeme),
                    TreeKind::Inner { .. } => {
                        let children = &self.nodes[n].children;
                        if children.len() == 1 {
                            stack.push(Job::Node(children[0]));
                            continue;
                        }
                        stack.push(Job::Text(")"));
                        for (i, &c) in children.iter().enumerate().rev() {
                            stack.push(Job::Node(c));
                            if i > 0 {
                                stack.push(Job::Text(" "));
                            }
                        }
                        stack.push(Job::Text("("));
                    }
                },
            }
        }
        out
    }

    /// Indented listing, one node per line.
    pub fn dump(&self, grammar: &Grammar) -> String {
        let mut out = String::new();
        let mut stack = vec![(0usize, 0usize)];
        while let Some((n, depth)) = stack.pop() {
            let node = &self.nodes[n];
            let indent = "  ".repeat(depth);
            match &node.kind {
                TreeKind::Leaf { token, lexeme, .. } => {
                    let _ = writeln!(out, "{indent}{} {lexeme:?} [{}..{})", grammar.token(*token).name, node.span.0, node.span.1);
                }
                TreeKind::Inner { nt, production } => {
                    let origin = grammar.production(*production).origin.label();
                    let _ = writeln!(
                        out,
                        "{indent}{} [{}..{}) p{} {origin}",
                        grammar.nonterminal(*nt).name,
                        node.span.0,
                        node.span.1,
                        production.0
                    );
                }
            }
            for &c in node.children.iter().rev() {
                stack.push((c, depth + 1));
            }
        }
        out
    }
}
