//! Earley recognition over a token lattice, producing a shared packed parse
//! forest with every derivation of the input.
//!
//! Epsilon productions are handled by advancing over nullable nonterminals
//! at prediction time, so completions from empty derivations are never
//! missed. The forest is built after recognition from the set of completed
//! `(production, start, end)` triples.

use std::collections::{BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::grammar::{Grammar, NtId, ProdId, Symbol};
use crate::lex::{line_col, TokenLattice};

mod disambiguate;
mod forest;

pub use disambiguate::{disambiguate, AmbiguityError, AmbiguousDerivation, ParseTree, TreeKind, TreeNode};
pub use forest::{Derivation, ForestChild, ForestNode, ParseForest};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: syntax error: unexpected {}, expected one of: {}", .found.as_deref().unwrap_or("end of input"), .expected.join(", "))]
pub struct SyntaxError {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    /// Text at the failure position, `None` at end of input.
    pub found: Option<String>,
    /// Token symbols some in-progress item could have consumed.
    pub expected: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("{line}:{column}: `{symbol}` derives itself over the same span; the input has infinitely many parses")]
    Cyclic {
        symbol: String,
        offset: usize,
        line: usize,
        column: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Item {
    prod: u32,
    dot: u32,
    origin: u32,
}

/// Recognition result: completed productions and nonterminal spans.
pub(crate) struct Chart {
    pub(crate) complete: HashSet<(ProdId, usize, usize)>,
    /// For each `(nonterminal, start)`, the sorted list of end positions.
    pub(crate) ends: HashMap<(NtId, usize), Vec<usize>>,
}

struct Recognizer<'a> {
    grammar: &'a Grammar,
    lattice: &'a TokenLattice,
    sets: Vec<Vec<Item>>,
    seen: HashSet<(usize, Item)>,
    waiting: HashMap<(usize, NtId), Vec<Item>>,
    predicted: HashSet<(usize, NtId)>,
    complete: HashSet<(ProdId, usize, usize)>,
    ends: HashMap<(NtId, usize), BTreeSet<usize>>,
}

impl<'a> Recognizer<'a> {
    fn new(grammar: &'a Grammar, lattice: &'a TokenLattice) -> Self {
        Recognizer {
            grammar,
            lattice,
            sets: vec![Vec::new(); lattice.len() + 1],
            seen: HashSet::new(),
            waiting: HashMap::new(),
            predicted: HashSet::new(),
            complete: HashSet::new(),
            ends: HashMap::new(),
        }
    }

    fn add(&mut self, pos: usize, item: Item) {
        if self.seen.insert((pos, item)) {
            self.sets[pos].push(item);
        }
    }

    fn predict(&mut self, pos: usize, nt: NtId) {
        if self.predicted.insert((pos, nt)) {
            for &p in self.grammar.productions_for(nt) {
                self.add(pos, Item { prod: p.0, dot: 0, origin: pos as u32 });
            }
        }
    }

    fn run(&mut self) {
        let start = self.lattice.advance(0);
        self.predict(start, self.grammar.start());
        for pos in start..=self.lattice.len() {
            let mut i = 0;
            while i < self.sets[pos].len() {
                let item = self.sets[pos][i];
                i += 1;
                let prod = self.grammar.production(ProdId(item.prod));
                let advanced = Item { dot: item.dot + 1, ..item };
                match prod.rhs.get(item.dot as usize) {
                    None => {
                        let origin = item.origin as usize;
                        self.complete.insert((ProdId(item.prod), origin, pos));
                        self.ends.entry((prod.lhs, origin)).or_default().insert(pos);
                        let parents = self.waiting.get(&(origin, prod.lhs)).cloned().unwrap_or_default();
                        for parent in parents {
                            self.add(pos, Item { dot: parent.dot + 1, ..parent });
                        }
                    }
                    Some(&Symbol::Nt(nt)) => {
                        self.waiting.entry((pos, nt)).or_default().push(item);
                        self.predict(pos, nt);
                        if self.grammar.is_nullable(nt) {
                            self.add(pos, advanced);
                        }
                    }
                    Some(&Symbol::Token(token)) => {
                        for e in self.lattice.edges_from(pos) {
                            let edge = self.lattice.edge(e);
                            if edge.token == token {
                                let next = self.lattice.advance(edge.end);
                                self.add(next, advanced);
                            }
                        }
                    }
                }
            }
        }
    }

    fn syntax_error(&self) -> SyntaxError {
        let input = self.lattice.input();
        let furthest = (0..self.sets.len())
            .rev()
            .find(|&p| !self.sets[p].is_empty())
            .unwrap_or(0);
        let mut expected: Vec<String> = self.sets[furthest]
            .iter()
            .filter_map(|item| match self.grammar.production(ProdId(item.prod)).rhs.get(item.dot as usize) {
                Some(&Symbol::Token(t)) => Some(self.grammar.token(t).name.clone()),
                _ => None,
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        expected.dedup();
        let found = (furthest < input.len()).then(|| {
            let rest = &input[furthest..];
            let end = rest
                .char_indices()
                .find(|&(_, c)| crate::lex::is_whitespace(c))
                .map_or(rest.len(), |(i, _)| i);
            rest[..end].to_string()
        });
        let (line, column) = line_col(input, furthest);
        SyntaxError {
            offset: furthest,
            line,
            column,
            found,
            expected,
        }
    }
}

/// Recognises the lattice with Earley's algorithm and returns the forest of
/// all derivations of the start symbol over the whole input.
pub fn parse(grammar: &Grammar, lattice: &TokenLattice) -> Result<ParseForest, ParseError> {
    let mut r = Recognizer::new(grammar, lattice);
    r.run();
    let start = lattice.advance(0);
    let end = lattice.len();
    let accepted = grammar
        .productions_for(grammar.start())
        .iter()
        .any(|&p| r.complete.contains(&(p, start, end)));
    if !accepted {
        return Err(r.syntax_error().into());
    }
    let chart = Chart {
        complete: r.complete,
        ends: r
            .ends
            .into_iter()
            .map(|(k, v)| (k, v.into_iter().collect()))
            .collect(),
    };
    ParseForest::build(grammar, lattice, &chart, start, end)
}

/// Recognition only.
pub fn recognizes(grammar: &Grammar, lattice: &TokenLattice) -> bool {
    match parse(grammar, lattice) {
        Ok(_) => true,
        Err(ParseError::Cyclic { .. }) => true,
        Err(ParseError::Syntax(_)) => false,
    }
}
