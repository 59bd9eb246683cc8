//! Prints the grammar synthesized from the scene3d model: tokens first,
//! then productions grouped by nonterminal.
//!
//! cargo run --example grammar_dump | less

use asgen::scene3d;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let language = scene3d::language()?;
    let grammar = language.grammar();
    print!("{}", grammar.dump());
    eprintln!(
        "{} nonterminals, {} productions, {} tokens",
        grammar.nonterminals().len(),
        grammar.productions().len(),
        grammar.tokens().len()
    );
    Ok(())
}
