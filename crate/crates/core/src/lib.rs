//! Parser generation from annotated abstract syntax models.
//!
//! A language is described as a set of model elements with notation
//! annotations. From that model the crate synthesizes a grammar, scans input
//! into a token lattice, parses it with an Earley parser into a packed
//! forest, filters the forest down to one tree using the model's
//! disambiguation annotations, and finally builds a graph of model objects
//! in which identifier references are edges.
//!
//! [`Language`] runs the whole pipeline; the modules expose each stage.

pub mod asg;
pub mod cli;
pub mod earley;
pub mod grammar;
mod language;
pub mod lex;
pub mod messages;
pub mod model;
pub mod scene3d;

pub use language::{Analysis, Language};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("model validation failed:\n{0}")]
    Model(model::ValidationReport),
    #[error(transparent)]
    Synthesis(#[from] grammar::SynthesisError),
    #[error(transparent)]
    Pattern(#[from] lex::PatternError),
    #[error(transparent)]
    Lex(#[from] lex::LexError),
    #[error(transparent)]
    Parse(#[from] earley::ParseError),
    #[error(transparent)]
    Ambiguity(#[from] earley::AmbiguityError),
    #[error(transparent)]
    Unresolved(#[from] asg::UnresolvedReference),
    #[error("{} constraint violation(s); first: {}", .0.len(), .0[0])]
    Constraints(Vec<asg::ConstraintViolation>),
}

impl Error {
    /// Stable diagnostic code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Model(_) | Error::Synthesis(_) | Error::Pattern(_) => "E-MODEL",
            Error::Lex(_) => "E-LEX",
            Error::Parse(earley::ParseError::Syntax(_)) => "E-SYNTAX",
            Error::Parse(earley::ParseError::Cyclic { .. }) => "E-CYCLIC",
            Error::Ambiguity(_) => "E-AMBIGUITY",
            Error::Unresolved(_) => "E-UNRESOLVED",
            Error::Constraints(_) => "E-CONSTRAINT",
        }
    }

    /// 1 for lexical and syntactic failures, 2 for semantic ones, 3 for a
    /// broken model.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Model(_) | Error::Synthesis(_) | Error::Pattern(_) => 3,
            Error::Lex(_) | Error::Parse(_) | Error::Ambiguity(_) => 1,
            Error::Unresolved(_) | Error::Constraints(_) => 2,
        }
    }

    /// Byte offset in the input the error points at, if any.
    pub fn offset(&self) -> Option<usize> {
        match self {
            Error::Lex(e) => Some(e.offset),
            Error::Parse(earley::ParseError::Syntax(e)) => Some(e.offset),
            Error::Parse(earley::ParseError::Cyclic { offset, .. }) => Some(*offset),
            Error::Ambiguity(e) => Some(e.span.0),
            Error::Unresolved(e) => Some(e.span.0),
            Error::Constraints(v) => v.first().map(|c| c.span.0),
            _ => None,
        }
    }
}
