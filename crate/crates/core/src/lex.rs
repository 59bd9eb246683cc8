//! Scanning into a token lattice.
//!
//! The scanner does not commit to one tokenization. At every non-whitespace
//! position it records one edge per token symbol that matches there, using
//! the longest match for that symbol. A word like `next` therefore yields
//! both a keyword edge and an identifier edge, and the parser picks whichever
//! fits the surrounding syntax.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use regex_automata::{meta::Regex, Anchored, Input, MatchKind};
use thiserror::Error;

use crate::grammar::{Grammar, TokenId, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub start: usize,
    pub end: usize,
    pub token: TokenId,
    pub lexeme: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: no token matches {found:?}")]
pub struct LexError {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub found: char,
}

/// 1-based line and column (in characters) of a byte offset.
pub fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let line_start = before.rfind('\n').map_or(0, |i| i + 1);
    (line, before[line_start..].chars().count() + 1)
}

pub fn is_whitespace(c: char) -> bool {
    matches!(c, ' ' | '\t' | '\n' | '\r')
}

fn is_word(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenLattice {
    input: String,
    edges: Vec<Edge>,
    /// `first[p]..first[p + 1]` are the edges starting at byte `p`.
    first: Vec<usize>,
    /// Next non-whitespace byte at or after each position.
    next: Vec<usize>,
}

impl TokenLattice {
    fn new(input: &str, mut edges: Vec<Edge>) -> Self {
        edges.sort_by_key(|e| (e.start, e.token, e.end));
        let len = input.len();
        let mut first = vec![0; len + 2];
        for e in &edges {
            first[e.start + 1] += 1;
        }
        for p in 1..first.len() {
            first[p] += first[p - 1];
        }
        let mut next = vec![len; len + 1];
        for (p, c) in input.char_indices().rev() {
            next[p] = if is_whitespace(c) { next[p + c.len_utf8()] } else { p };
        }
        // Interior bytes of multi-byte characters are never node positions.
        for p in (0..len).rev() {
            if !input.is_char_boundary(p) {
                next[p] = next[p + 1];
            }
        }
        TokenLattice {
            input: input.to_string(),
            edges,
            first,
            next,
        }
    }

    pub fn input(&self) -> &str {
        &self.input
    }

    pub fn len(&self) -> usize {
        self.input.len()
    }

    pub fn is_empty(&self) -> bool {
        self.input.is_empty()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    /// Indices of the edges starting at byte `pos`.
    pub fn edges_from(&self, pos: usize) -> std::ops::Range<usize> {
        if pos >= self.input.len() {
            return 0..0;
        }
        self.first[pos]..self.first[pos + 1]
    }

    /// Parser position reached after consuming up to `pos`: whitespace is
    /// skipped.
    pub fn advance(&self, pos: usize) -> usize {
        self.next[pos.min(self.input.len())]
    }

    /// Positions where some token may start, plus the end of input.
    pub fn nodes(&self) -> Vec<usize> {
        let mut nodes: Vec<usize> = self
            .input
            .char_indices()
            .filter(|&(_, c)| !is_whitespace(c))
            .map(|(p, _)| p)
            .collect();
        nodes.push(self.input.len());
        nodes
    }

    /// `start..end SYMBOL "lexeme"`, one edge per line.
    pub fn dump(&self, grammar: &Grammar) -> String {
        let mut out = String::new();
        for e in &self.edges {
            let _ = writeln!(out, "{}..{} {} {:?}", e.start, e.end, grammar.token(e.token).name, e.lexeme);
        }
        out
    }
}

#[derive(Debug, Clone)]
enum Matcher {
    Literal(String),
    Pattern(Regex),
}

/// Compiled token matchers for one grammar.
#[derive(Debug, Clone)]
pub struct Lexer {
    matchers: Vec<(TokenId, Matcher)>,
}

#[derive(Debug, Error)]
#[error("token {name}: invalid pattern: {source}")]
pub struct PatternError {
    pub name: String,
    #[source]
    pub source: Box<regex_automata::meta::BuildError>,
}

impl Lexer {
    pub fn new(grammar: &Grammar) -> Result<Self, PatternError> {
        let matchers = grammar
            .tokens()
            .iter()
            .enumerate()
            .map(|(i, def)| {
                let matcher = match &def.kind {
                    TokenKind::Literal(text) => Matcher::Literal(text.clone()),
                    TokenKind::Pattern(spec) => {
                        let regex = Regex::builder()
                            .configure(Regex::config().match_kind(MatchKind::All))
                            .build(&spec.regex)
                            .map_err(|e| PatternError {
                                name: def.name.clone(),
                                source: Box::new(e),
                            })?;
                        Matcher::Pattern(regex)
                    }
                };
                Ok((TokenId(i as u32), matcher))
            })
            .collect::<Result<_, _>>()?;
        Ok(Lexer { matchers })
    }

    /// Longest match of one matcher at `pos`, if any. A match ending inside a
    /// word (a word character directly followed by another) does not count.
    fn match_at(matcher: &Matcher, input: &str, pos: usize) -> Option<usize> {
        let end = match matcher {
            Matcher::Literal(text) => input[pos..].starts_with(text.as_str()).then(|| pos + text.len())?,
            Matcher::Pattern(regex) => {
                let m = regex.search(&Input::new(input).range(pos..).anchored(Anchored::Yes))?;
                m.end()
            }
        };
        if end == pos {
            return None;
        }
        let last = input[..end].chars().next_back()?;
        let following = input[end..].chars().next();
        if is_word(last) && following.is_some_and(is_word) {
            return None;
        }
        Some(end)
    }

    /// Matches every token at every position reachable from the start:
    /// the start itself and the end of any earlier edge, past whitespace.
    pub fn scan(&self, input: &str) -> Result<TokenLattice, LexError> {
        let skip = |pos: usize| pos + input[pos..].len() - input[pos..].trim_start_matches(is_whitespace).len();
        let mut edges = Vec::new();
        let mut pending = BTreeSet::from([skip(0)]);
        let mut reached_end = false;
        let mut dead_end = None;
        while let Some(pos) = pending.pop_first() {
            if pos == input.len() {
                reached_end = true;
                continue;
            }
            let before = edges.len();
            for (token, matcher) in &self.matchers {
                if let Some(end) = Self::match_at(matcher, input, pos) {
                    pending.insert(skip(end));
                    edges.push(Edge {
                        start: pos,
                        end,
                        token: *token,
                        lexeme: input[pos..end].to_string(),
                    });
                }
            }
            if edges.len() == before {
                dead_end = Some(pos);
            }
        }
        if let (false, Some(pos)) = (reached_end, dead_end) {
            let (line, column) = line_col(input, pos);
            return Err(LexError {
                offset: pos,
                line,
                column,
                found: input[pos..].chars().next().unwrap_or_default(),
            });
        }
        Ok(TokenLattice::new(input, edges))
    }
}

/// Scans `input` with the token definitions of `grammar`.
pub fn scan(input: &str, grammar: &Grammar) -> Result<TokenLattice, crate::Error> {
    let lexer = Lexer::new(grammar)?;
    Ok(lexer.scan(input)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::GrammarBuilder;

    fn keywords() -> Grammar {
        GrammarBuilder::new("S")
            .pattern("Name", "[a-zA-Z_][a-zA-Z0-9_]*")
            .pattern("Int", "[+-]?[0-9]+")
            .rule("s", "S", &["'next'", "Name", "Int", "'+'"])
            .build()
            .unwrap()
    }

    fn symbols(g: &Grammar, l: &TokenLattice) -> Vec<(usize, usize, String)> {
        l.edges()
            .iter()
            .map(|e| (e.start, e.end, g.token(e.token).name.clone()))
            .collect()
    }

    #[test]
    fn empty_input_has_one_node_and_no_edges() {
        let g = keywords();
        let l = Lexer::new(&g).unwrap().scan("").unwrap();
        assert!(l.edges().is_empty());
        assert_eq!(l.nodes(), vec![0]);
    }

    #[test]
    fn keyword_and_name_overlap() {
        let g = keywords();
        let l = Lexer::new(&g).unwrap().scan("next").unwrap();
        assert_eq!(
            symbols(&g, &l),
            [(0, 4, "\"next\"".into()), (0, 4, "Name".into())]
        );
    }

    #[test]
    fn only_reachable_positions_are_scanned() {
        let g = keywords();
        let l = Lexer::new(&g).unwrap().scan("draw  nextx").unwrap();
        assert!(l.edges().iter().all(|e| e.start == 0 || e.start == 6), "{:?}", l.edges());
    }

    #[test]
    fn keyword_needs_word_boundary() {
        let g = keywords();
        let l = Lexer::new(&g).unwrap().scan("nextx").unwrap();
        assert!(l.edges().iter().all(|e| g.token(e.token).name == "Name"));
    }

    #[test]
    fn sign_is_part_of_number_but_plus_alone_is_a_literal() {
        let g = keywords();
        let l = Lexer::new(&g).unwrap().scan("+5 +").unwrap();
        let syms = symbols(&g, &l);
        assert!(syms.contains(&(0, 2, "Int".into())));
        assert!(syms.contains(&(0, 1, "\"+\"".into())));
        assert!(syms.contains(&(3, 4, "\"+\"".into())));
    }

    #[test]
    fn uncovered_character_is_reported_with_position() {
        let g = keywords();
        let err = Lexer::new(&g).unwrap().scan("next\n  ?").unwrap_err();
        assert_eq!((err.line, err.column, err.found), (2, 3, '?'));
        assert_eq!(err.offset, 7);
    }

    #[test]
    fn advance_skips_whitespace() {
        let g = keywords();
        let l = Lexer::new(&g).unwrap().scan("a  \n b").unwrap();
        assert_eq!(l.advance(1), 5);
        assert_eq!(l.advance(6), 6);
        assert_eq!(l.nodes(), vec![0, 5, 6]);
    }

    #[test]
    fn line_col_counts_from_one() {
        assert_eq!(line_col("ab\ncd", 0), (1, 1));
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
        assert_eq!(line_col("ab", 99), (1, 3));
    }
}
