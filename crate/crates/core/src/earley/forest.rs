use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use super::{Chart, ParseError};
use crate::grammar::{Grammar, NtId, ProdId, Symbol};
use crate::lex::{line_col, TokenLattice};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ForestChild {
    /// Index of a lattice edge.
    Token(usize),
    /// Index of a forest node.
    Node(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub production: ProdId,
    pub children: Vec<ForestChild>,
}

/// A packed node: one nonterminal over one span, with every way of deriving
/// it. Spans are parser positions, so they include trailing whitespace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForestNode {
    pub nt: NtId,
    pub start: usize,
    pub end: usize,
    pub derivations: Vec<Derivation>,
}

#[derive(Debug, Clone)]
pub struct ParseForest {
    nodes: Vec<ForestNode>,
    root: usize,
    /// Children-before-parents order of all nodes.
    postorder: Vec<usize>,
    lattice: TokenLattice,
}

impl ParseForest {
    pub(super) fn build(
        grammar: &Grammar,
        lattice: &TokenLattice,
        chart: &Chart,
        start: usize,
        end: usize,
    ) -> Result<Self, ParseError> {
        let mut nodes: Vec<ForestNode> = Vec::new();
        let mut index: HashMap<(NtId, usize, usize), usize> = HashMap::new();
        let mut intern = |nodes: &mut Vec<ForestNode>, nt: NtId, s: usize, e: usize| -> usize {
            *index.entry((nt, s, e)).or_insert_with(|| {
                nodes.push(ForestNode {
                    nt,
                    start: s,
                    end: e,
                    derivations: Vec::new(),
                });
                nodes.len() - 1
            })
        };
        let root = intern(&mut nodes, grammar.start(), start, end);
        let mut next = 0;
        while next < nodes.len() {
            let (nt, s, e) = (nodes[next].nt, nodes[next].start, nodes[next].end);
            let mut derivations = Vec::new();
            for &p in grammar.productions_for(nt) {
                if !chart.complete.contains(&(p, s, e)) {
                    continue;
                }
                for tiling in tilings(grammar, lattice, chart, p, s, e) {
                    let children = tiling
                        .into_iter()
                        .map(|step| match step {
                            Step::Token(edge) => ForestChild::Token(edge),
                            Step::Node(nt, a, b) => ForestChild::Node(intern(&mut nodes, nt, a, b)),
                        })
                        .collect();
                    derivations.push(Derivation { production: p, children });
                }
            }
            nodes[next].derivations = derivations;
            next += 1;
        }
        let postorder = match postorder(&nodes, root) {
            Ok(order) => order,
            Err(node) => {
                let n = &nodes[node];
                let (line, column) = line_col(lattice.input(), n.start);
                return Err(ParseError::Cyclic {
                    symbol: grammar.nonterminal(n.nt).name.clone(),
                    offset: n.start,
                    line,
                    column,
                });
            }
        };
        Ok(ParseForest {
            nodes,
            root,
            postorder,
            lattice: lattice.clone(),
        })
    }

    pub fn nodes(&self) -> &[ForestNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &ForestNode {
        &self.nodes[id]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn root_node(&self) -> &ForestNode {
        &self.nodes[self.root]
    }

    pub fn lattice(&self) -> &TokenLattice {
        &self.lattice
    }

    /// Nodes ordered so that every child precedes its parents.
    pub fn postorder(&self) -> &[usize] {
        &self.postorder
    }

    /// Number of distinct parse trees, saturating at `u128::MAX`.
    pub fn tree_count(&self) -> u128 {
        let mut counts = vec![0u128; self.nodes.len()];
        for &n in &self.postorder {
            counts[n] = self.nodes[n]
                .derivations
                .iter()
                .map(|d| {
                    d.children.iter().fold(1u128, |acc, c| match c {
                        ForestChild::Token(_) => acc,
                        ForestChild::Node(k) => acc.saturating_mul(counts[*k]),
                    })
                })
                .fold(0u128, u128::saturating_add);
        }
        counts[self.root]
    }

    /// Packed-node listing: one header line per node reachable from the root,
    /// then one line per derivation.
    pub fn dump(&self, grammar: &Grammar) -> String {
        let mut out = String::new();
        let mut order: Vec<usize> = self.postorder.clone();
        order.reverse();
        for n in order {
            let node = &self.nodes[n];
            let _ = writeln!(
                out,
                "#{n} {} [{}..{})",
                grammar.nonterminal(node.nt).name,
                node.start,
                node.end
            );
            for d in &node.derivations {
                let _ = write!(out, "  | p{}:", d.production.0);
                for c in &d.children {
                    match c {
                        ForestChild::Token(e) => {
                            let edge = self.lattice.edge(*e);
                            let _ = write!(out, " {:?}@{}", edge.lexeme, edge.start);
                        }
                        ForestChild::Node(k) => {
                            let _ = write!(out, " #{k}");
                        }
                    }
                }
                out.push('\n');
            }
        }
        out
    }
}

enum Step {
    Token(usize),
    Node(NtId, usize, usize),
}

/// Every way of laying the right-hand side of `p` over `[start, end)` using
/// lattice edges for tokens and completed spans for nonterminals.
fn tilings(
    grammar: &Grammar,
    lattice: &TokenLattice,
    chart: &Chart,
    p: ProdId,
    start: usize,
    end: usize,
) -> Vec<Vec<Step>> {
    let rhs = &grammar.production(p).rhs;
    let transitions = |t: usize, pos: usize| -> Vec<(Step, usize)> {
        match rhs[t] {
            Symbol::Token(token) => lattice
                .edges_from(pos)
                .filter(|&e| lattice.edge(e).token == token)
                .map(|e| (Step::Token(e), lattice.advance(lattice.edge(e).end)))
                .filter(|&(_, next)| next <= end)
                .collect(),
            Symbol::Nt(nt) => chart
                .ends
                .get(&(nt, pos))
                .into_iter()
                .flatten()
                .filter(|&&e| e <= end)
                .map(|&e| (Step::Node(nt, pos, e), e))
                .collect(),
        }
    };
    // reach[t]: positions after laying t symbols.
    let mut reach: Vec<BTreeSet<usize>> = vec![BTreeSet::from([start])];
    for t in 0..rhs.len() {
        let next = reach[t]
            .iter()
            .flat_map(|&pos| transitions(t, pos).into_iter().map(|(_, n)| n))
            .collect();
        reach.push(next);
    }
    // feasible[t]: positions at step t from which `end` is still reachable.
    let mut feasible = vec![BTreeSet::new(); rhs.len() + 1];
    if reach[rhs.len()].contains(&end) {
        feasible[rhs.len()].insert(end);
    }
    for t in (0..rhs.len()).rev() {
        feasible[t] = reach[t]
            .iter()
            .copied()
            .filter(|&pos| transitions(t, pos).iter().any(|(_, n)| feasible[t + 1].contains(n)))
            .collect();
    }
    let mut out = Vec::new();
    let mut path = Vec::new();
    walk(0, start, &transitions, &feasible, &mut path, &mut out);
    out.into_iter()
        .map(|steps: Vec<(bool, usize, usize, usize)>| {
            steps
                .into_iter()
                .map(|(is_token, a, b, c)| {
                    if is_token {
                        Step::Token(a)
                    } else {
                        Step::Node(NtId(a as u32), b, c)
                    }
                })
                .collect()
        })
        .collect()
}

type FlatStep = (bool, usize, usize, usize);

fn walk(
    t: usize,
    pos: usize,
    transitions: &dyn Fn(usize, usize) -> Vec<(Step, usize)>,
    feasible: &[BTreeSet<usize>],
    path: &mut Vec<FlatStep>,
    out: &mut Vec<Vec<FlatStep>>,
) {
    if t + 1 == feasible.len() {
        out.push(path.clone());
        return;
    }
    for (step, next) in transitions(t, pos) {
        if !feasible[t + 1].contains(&next) {
            continue;
        }
        path.push(match step {
            Step::Token(e) => (true, e, 0, 0),
            Step::Node(nt, a, b) => (false, nt.0 as usize, a, b),
        });
        walk(t + 1, next, transitions, feasible, path, out);
        path.pop();
    }
}

/// Iterative depth-first postorder; `Err(node)` names a node on a cycle.
fn postorder(nodes: &[ForestNode], root: usize) -> Result<Vec<usize>, usize> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    let mut mark = vec![Mark::New; nodes.len()];
    let mut order = Vec::with_capacity(nodes.len());
    let children = |n: usize| -> Vec<usize> {
        nodes[n]
            .derivations
            .iter()
            .flat_map(|d| d.children.iter())
            .filter_map(|c| match c {
                ForestChild::Node(k) => Some(*k),
                ForestChild::Token(_) => None,
            })
            .collect()
    };
    let mut stack: Vec<(usize, Vec<usize>)> = vec![(root, children(root))];
    mark[root] = Mark::Open;
    while let Some((node, pending)) = stack.last_mut() {
        if let Some(child) = pending.pop() {
            match mark[child] {
                Mark::Open => return Err(child),
                Mark::Done => {}
                Mark::New => {
                    mark[child] = Mark::Open;
                    let grand = children(child);
                    stack.push((child, grand));
                }
            }
        } else {
            let node = *node;
            mark[node] = Mark::Done;
            order.push(node);
            stack.pop();
        }
    }
    Ok(order)
}
