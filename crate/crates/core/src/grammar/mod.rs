//! Context-free grammars, either synthesized from a [`ModelSet`] or written
//! directly with [`GrammarBuilder`].
//!
//! Every production remembers where it came from (its [`Origin`]), which
//! element owns it and, per right-hand-side position, what role the symbol
//! plays ([`SymbolRole`]). The instantiator relies on that bookkeeping to map
//! parse trees back onto model objects.
//!
//! [`ModelSet`]: crate::model::ModelSet

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::model::{Associativity, Composition, DisambiguationSpec, PatternSpec};

mod synth;

pub use synth::{synthesize, synthesize_with, SynthesisError, SynthesisOptions, DEFAULT_FREE_ORDER_BOUND};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NtId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TokenId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProdId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OwnerId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Token(TokenId),
    Nt(NtId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NtKind {
    /// The full syntax of a model element.
    Element,
    /// The identifier-only syntax standing in for a referenced element.
    Reference,
    /// Repetition and optionality helpers.
    Auxiliary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nonterminal {
    pub name: String,
    pub kind: NtKind,
    /// Owning element; for auxiliary symbols also the member they expand.
    pub element: Option<String>,
    pub member: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Literal(String),
    Pattern(PatternSpec),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenDef {
    pub name: String,
    pub kind: TokenKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Origin {
    Composite,
    SelectionAlt,
    Repetition,
    FreeOrderPerm,
    Reference,
    TokenWrap,
}

impl Origin {
    pub fn label(self) -> &'static str {
        match self {
            Origin::Composite => "composite",
            Origin::SelectionAlt => "selection-alt",
            Origin::Repetition => "repetition",
            Origin::FreeOrderPerm => "free-order-perm",
            Origin::Reference => "reference",
            Origin::TokenWrap => "token-wrap",
        }
    }
}

/// What a right-hand-side symbol contributes to the instantiated object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolRole {
    /// Delimiters: prefixes, suffixes and separators.
    Syntax,
    /// Value of the owner's member with this index.
    Member(usize),
    /// Identifier member with this index, inside a reference production.
    IdMember(usize),
    /// The token carrying a basic element's value.
    Value,
    /// The chosen alternative of a selection.
    Alternative,
    /// One occurrence of a repeated or optional member.
    Item,
    /// Remaining occurrences of a repetition.
    Rest,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Owner {
    pub name: String,
    pub spec: DisambiguationSpec,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Production {
    pub lhs: NtId,
    pub rhs: Vec<Symbol>,
    pub roles: Vec<SymbolRole>,
    pub origin: Origin,
    pub owner: OwnerId,
    pub disambiguation: DisambiguationSpec,
}

impl Production {
    pub fn is_epsilon(&self) -> bool {
        self.rhs.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    start: NtId,
    nonterminals: Vec<Nonterminal>,
    tokens: Vec<TokenDef>,
    productions: Vec<Production>,
    owners: Vec<Owner>,
    by_lhs: Vec<Vec<ProdId>>,
    nullable: Vec<bool>,
}

impl Grammar {
    pub fn start(&self) -> NtId {
        self.start
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn production(&self, id: ProdId) -> &Production {
        &self.productions[id.0 as usize]
    }

    pub fn production_ids(&self) -> impl Iterator<Item = ProdId> {
        (0..self.productions.len() as u32).map(ProdId)
    }

    pub fn productions_for(&self, nt: NtId) -> &[ProdId] {
        &self.by_lhs[nt.0 as usize]
    }

    pub fn nonterminals(&self) -> &[Nonterminal] {
        &self.nonterminals
    }

    pub fn nonterminal(&self, nt: NtId) -> &Nonterminal {
        &self.nonterminals[nt.0 as usize]
    }

    pub fn nonterminal_named(&self, name: &str) -> Option<NtId> {
        self.nonterminals
            .iter()
            .position(|n| n.name == name)
            .map(|i| NtId(i as u32))
    }

    pub fn tokens(&self) -> &[TokenDef] {
        &self.tokens
    }

    pub fn token(&self, id: TokenId) -> &TokenDef {
        &self.tokens[id.0 as usize]
    }

    pub fn token_named(&self, name: &str) -> Option<TokenId> {
        self.tokens
            .iter()
            .position(|t| t.name == name)
            .map(|i| TokenId(i as u32))
    }

    pub fn owner(&self, id: OwnerId) -> &Owner {
        &self.owners[id.0 as usize]
    }

    pub fn owner_named(&self, name: &str) -> Option<OwnerId> {
        self.owners
            .iter()
            .position(|o| o.name == name)
            .map(|i| OwnerId(i as u32))
    }

    pub fn is_nullable(&self, nt: NtId) -> bool {
        self.nullable[nt.0 as usize]
    }

    pub fn symbol_name(&self, sym: Symbol) -> &str {
        match sym {
            Symbol::Token(t) => &self.token(t).name,
            Symbol::Nt(n) => &self.nonterminal(n).name,
        }
    }

    /// Productions whose left-hand side expands `member` of `element`.
    pub fn member_productions(&self, element: &str, member: &str) -> Vec<&Production> {
        self.productions
            .iter()
            .filter(|p| {
                let nt = self.nonterminal(p.lhs);
                nt.kind == NtKind::Auxiliary
                    && nt.element.as_deref() == Some(element)
                    && nt.member.as_deref() == Some(member)
            })
            .collect()
    }

    /// Productions owned by `element` with the given origin.
    pub fn owned_productions(&self, element: &str, origin: Origin) -> Vec<&Production> {
        self.productions
            .iter()
            .filter(|p| p.origin == origin && self.owner(p.owner).name == element)
            .collect()
    }

    pub fn display_production(&self, p: &Production) -> String {
        let mut out = format!("{} ::=", self.nonterminal(p.lhs).name);
        if p.rhs.is_empty() {
            out.push_str(" ε");
        }
        for sym in &p.rhs {
            out.push(' ');
            out.push_str(self.symbol_name(*sym));
        }
        let _ = write!(out, " # origin={}, owner={}", p.origin.label(), self.owner(p.owner).name);
        let d = p.disambiguation;
        if d.priority != 0 {
            let _ = write!(out, ", priority={}", d.priority);
        }
        match d.associativity {
            Associativity::Left => out.push_str(", assoc=left"),
            Associativity::Right => out.push_str(", assoc=right"),
            Associativity::None => {}
        }
        if d.composition == Composition::Lazy {
            out.push_str(", composition=lazy");
        }
        out
    }

    /// One production per line followed by the token definitions. The
    /// output is a pure function of the grammar.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for p in &self.productions {
            out.push_str(&self.display_production(p));
            out.push('\n');
        }
        for t in &self.tokens {
            match &t.kind {
                TokenKind::Literal(_) => {
                    let _ = writeln!(out, "%token {}", t.name);
                }
                TokenKind::Pattern(p) => {
                    let _ = writeln!(out, "%token {} /{}/ value={}", t.name, p.regex, p.value_binding);
                }
            }
        }
        out
    }

    /// Structural invariants: every right-hand-side nonterminal has at least
    /// one production, and so does the start symbol.
    pub fn check_invariants(&self) -> Result<(), String> {
        if self.productions_for(self.start).is_empty() {
            return Err(format!("start symbol {} has no productions", self.nonterminal(self.start).name));
        }
        for p in &self.productions {
            if p.rhs.len() != p.roles.len() {
                return Err(format!("role arity mismatch in {}", self.display_production(p)));
            }
            for sym in &p.rhs {
                if let Symbol::Nt(nt) = sym {
                    if self.productions_for(*nt).is_empty() {
                        return Err(format!(
                            "{} appears in {} but has no productions",
                            self.nonterminal(*nt).name,
                            self.display_production(p)
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Nonterminals reachable from the start symbol.
    pub fn reachable_nonterminals(&self) -> Vec<bool> {
        let mut seen = vec![false; self.nonterminals.len()];
        let mut stack = vec![self.start];
        while let Some(nt) = stack.pop() {
            if std::mem::replace(&mut seen[nt.0 as usize], true) {
                continue;
            }
            for &p in self.productions_for(nt) {
                for sym in &self.production(p).rhs {
                    if let Symbol::Nt(n) = sym {
                        stack.push(*n);
                    }
                }
            }
        }
        seen
    }
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}

/// Shared interning state for grammar construction.
#[derive(Debug, Default)]
struct Parts {
    nonterminals: Vec<Nonterminal>,
    nt_index: HashMap<String, NtId>,
    tokens: Vec<TokenDef>,
    token_index: HashMap<String, TokenId>,
    owners: Vec<Owner>,
    owner_index: HashMap<String, OwnerId>,
    productions: Vec<Production>,
}

impl Parts {
    fn nonterminal(&mut self, name: &str, kind: NtKind, element: Option<&str>, member: Option<&str>) -> NtId {
        if let Some(&id) = self.nt_index.get(name) {
            return id;
        }
        let id = NtId(self.nonterminals.len() as u32);
        self.nonterminals.push(Nonterminal {
            name: name.to_string(),
            kind,
            element: element.map(str::to_string),
            member: member.map(str::to_string),
        });
        self.nt_index.insert(name.to_string(), id);
        id
    }

    fn literal(&mut self, text: &str) -> Symbol {
        let name = literal_name(text);
        self.token(name, TokenKind::Literal(text.to_string()))
    }

    fn pattern(&mut self, element: &str, spec: &PatternSpec) -> Symbol {
        self.token(format!("<{element}>"), TokenKind::Pattern(spec.clone()))
    }

    fn token(&mut self, name: String, kind: TokenKind) -> Symbol {
        if let Some(&id) = self.token_index.get(&name) {
            return Symbol::Token(id);
        }
        let id = TokenId(self.tokens.len() as u32);
        self.token_index.insert(name.clone(), id);
        self.tokens.push(TokenDef { name, kind });
        Symbol::Token(id)
    }

    fn owner(&mut self, name: &str, spec: DisambiguationSpec) -> OwnerId {
        if let Some(&id) = self.owner_index.get(name) {
            self.owners[id.0 as usize].spec = spec;
            return id;
        }
        let id = OwnerId(self.owners.len() as u32);
        self.owners.push(Owner {
            name: name.to_string(),
            spec,
        });
        self.owner_index.insert(name.to_string(), id);
        id
    }

    fn push(&mut self, lhs: NtId, rhs: Vec<(Symbol, SymbolRole)>, origin: Origin, owner: OwnerId) -> ProdId {
        let id = ProdId(self.productions.len() as u32);
        let (rhs, roles) = rhs.into_iter().unzip();
        let disambiguation = self.owners[owner.0 as usize].spec;
        self.productions.push(Production {
            lhs,
            rhs,
            roles,
            origin,
            owner,
            disambiguation,
        });
        id
    }

    fn finish(self, start: NtId) -> Grammar {
        let mut by_lhs = vec![Vec::new(); self.nonterminals.len()];
        for (i, p) in self.productions.iter().enumerate() {
            by_lhs[p.lhs.0 as usize].push(ProdId(i as u32));
        }
        let nullable = nullable_set(&self.productions, self.nonterminals.len());
        Grammar {
            start,
            nonterminals: self.nonterminals,
            tokens: self.tokens,
            productions: self.productions,
            owners: self.owners,
            by_lhs,
            nullable,
        }
    }
}

fn literal_name(text: &str) -> String {
    format!("{text:?}")
}

fn nullable_set(productions: &[Production], count: usize) -> Vec<bool> {
    let mut nullable = vec![false; count];
    loop {
        let mut changed = false;
        for p in productions {
            if nullable[p.lhs.0 as usize] {
                continue;
            }
            let all = p.rhs.iter().all(|s| match s {
                Symbol::Nt(n) => nullable[n.0 as usize],
                Symbol::Token(_) => false,
            });
            if all {
                nullable[p.lhs.0 as usize] = true;
                changed = true;
            }
        }
        if !changed {
            return nullable;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarBuildError {
    #[error("start symbol `{0}` has no rules")]
    NoStartRule(String),
    #[error("nonterminal `{0}` is used but has no rules")]
    Undefined(String),
}

/// Hand-written grammars, mostly for tests and experiments with the parser.
///
/// Right-hand-side entries written in single quotes (`'+'`) are literal
/// tokens, names declared with [`GrammarBuilder::pattern`] are pattern
/// tokens, and everything else is a nonterminal. Each rule names the owner
/// used by disambiguation.
#[derive(Debug, Default)]
pub struct GrammarBuilder {
    start: String,
    patterns: Vec<(String, String)>,
    rules: Vec<(String, String, Vec<String>)>,
    specs: HashMap<String, DisambiguationSpec>,
}

impl GrammarBuilder {
    pub fn new(start: impl Into<String>) -> Self {
        GrammarBuilder {
            start: start.into(),
            ..Default::default()
        }
    }

    pub fn pattern(mut self, name: impl Into<String>, regex: impl Into<String>) -> Self {
        self.patterns.push((name.into(), regex.into()));
        self
    }

    pub fn rule(mut self, owner: impl Into<String>, lhs: impl Into<String>, rhs: &[&str]) -> Self {
        self.rules.push((
            owner.into(),
            lhs.into(),
            rhs.iter().map(|s| s.to_string()).collect(),
        ));
        self
    }

    fn spec(&mut self, owner: &str) -> &mut DisambiguationSpec {
        self.specs.entry(owner.to_string()).or_default()
    }

    pub fn priority(mut self, owner: &str, priority: i32) -> Self {
        self.spec(owner).priority = priority;
        self
    }

    pub fn associativity(mut self, owner: &str, associativity: Associativity) -> Self {
        self.spec(owner).associativity = associativity;
        self
    }

    pub fn composition(mut self, owner: &str, composition: Composition) -> Self {
        self.spec(owner).composition = composition;
        self
    }

    pub fn build(self) -> Result<Grammar, GrammarBuildError> {
        let mut parts = Parts::default();
        let pattern_names: HashMap<&str, &str> =
            self.patterns.iter().map(|(n, r)| (n.as_str(), r.as_str())).collect();
        let start = parts.nonterminal(&self.start, NtKind::Element, Some(&self.start), None);
        for (owner, lhs, _) in &self.rules {
            parts.nonterminal(lhs, NtKind::Element, Some(lhs), None);
            let spec = self.specs.get(owner).copied().unwrap_or_default();
            parts.owner(owner, spec);
        }
        for (owner, lhs, rhs) in &self.rules {
            let lhs = parts.nonterminal(lhs, NtKind::Element, Some(lhs), None);
            let owner = parts.owner_index[owner.as_str()];
            let rhs = rhs
                .iter()
                .map(|s| {
                    let sym = if let Some(lit) = s.strip_prefix('\'').and_then(|s| s.strip_suffix('\'')) {
                        parts.literal(lit)
                    } else if let Some(regex) = pattern_names.get(s.as_str()) {
                        parts.token(s.clone(), TokenKind::Pattern(PatternSpec::new(*regex, "value")))
                    } else {
                        Symbol::Nt(parts.nonterminal(s, NtKind::Element, Some(s), None))
                    };
                    (sym, SymbolRole::Syntax)
                })
                .collect();
            parts.push(lhs, rhs, Origin::Composite, owner);
        }
        let grammar = parts.finish(start);
        if grammar.productions_for(start).is_empty() {
            return Err(GrammarBuildError::NoStartRule(self.start));
        }
        for (i, nt) in grammar.nonterminals.iter().enumerate() {
            if grammar.by_lhs[i].is_empty() {
                return Err(GrammarBuildError::Undefined(nt.name.clone()));
            }
        }
        Ok(grammar)
    }
}
