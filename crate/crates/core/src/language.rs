use crate::asg::{
    build_instances, check_constraints, resolve_references, ConstraintRegistry, ConstraintReport, InstanceGraph,
    SymbolTable,
};
use crate::earley::{disambiguate, parse, ParseForest, ParseTree};
use crate::grammar::{synthesize_with, Grammar, SynthesisOptions};
use crate::lex::{Lexer, TokenLattice};
use crate::model::{validate_model, ModelSet};
use crate::Error;

/// A model together with everything generated from it.
#[derive(Debug, Clone)]
pub struct Language {
    model: ModelSet,
    grammar: Grammar,
    lexer: Lexer,
    constraints: ConstraintRegistry,
}

/// Every intermediate product of one successful run.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub lattice: TokenLattice,
    pub forest: ParseForest,
    pub tree: ParseTree,
    pub table: SymbolTable,
    pub graph: InstanceGraph,
    pub constraints: ConstraintReport,
}

impl Language {
    pub fn new(model: ModelSet) -> Result<Self, Error> {
        Self::with_options(model, &SynthesisOptions::default())
    }

    pub fn with_options(model: ModelSet, options: &SynthesisOptions) -> Result<Self, Error> {
        let report = validate_model(&model);
        if !report.is_usable() {
            return Err(Error::Model(report));
        }
        let grammar = synthesize_with(&model, options)?;
        let lexer = Lexer::new(&grammar)?;
        Ok(Language {
            model,
            grammar,
            lexer,
            constraints: ConstraintRegistry::new(),
        })
    }

    pub fn with_constraints(mut self, constraints: ConstraintRegistry) -> Self {
        self.constraints = constraints;
        self
    }

    pub fn model(&self) -> &ModelSet {
        &self.model
    }

    pub fn grammar(&self) -> &Grammar {
        &self.grammar
    }

    pub fn lexer(&self) -> &Lexer {
        &self.lexer
    }

    pub fn constraints(&self) -> &ConstraintRegistry {
        &self.constraints
    }

    pub fn lex(&self, input: &str) -> Result<TokenLattice, Error> {
        Ok(self.lexer.scan(input)?)
    }

    pub fn forest(&self, input: &str) -> Result<ParseForest, Error> {
        let lattice = self.lex(input)?;
        Ok(parse(&self.grammar, &lattice)?)
    }

    pub fn tree(&self, input: &str) -> Result<ParseTree, Error> {
        let forest = self.forest(input)?;
        Ok(disambiguate(&forest, &self.grammar)?)
    }

    /// Full pipeline: scan, parse, disambiguate, instantiate, resolve and
    /// check constraints.
    pub fn analyze(&self, input: &str) -> Result<Analysis, Error> {
        let lattice = self.lex(input)?;
        let forest = parse(&self.grammar, &lattice)?;
        let tree = disambiguate(&forest, &self.grammar)?;
        let (graph, table) = build_instances(&tree, &self.grammar, &self.model);
        let graph = resolve_references(graph, &table)?;
        let constraints = check_constraints(&graph, &self.model, &self.constraints);
        if !constraints.is_ok() {
            return Err(Error::Constraints(constraints.violations));
        }
        Ok(Analysis {
            lattice,
            forest,
            tree,
            table,
            graph,
            constraints,
        })
    }

    /// The resolved, constraint-checked graph.
    pub fn graph(&self, input: &str) -> Result<InstanceGraph, Error> {
        Ok(self.analyze(input)?.graph)
    }
}
