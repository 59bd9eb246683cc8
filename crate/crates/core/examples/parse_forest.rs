//! Parses with no disambiguation annotations and prints the packed forest,
//! then what happens when a single tree is requested.
//!
//! cargo run --example parse_forest -- "n + n + n"

use asgen::earley::{disambiguate, parse};
use asgen::grammar::GrammarBuilder;
use asgen::lex::Lexer;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = std::env::args().nth(1).unwrap_or_else(|| "n + n + n".into());
    let grammar = GrammarBuilder::new("E")
        .rule("sum", "E", &["E", "'+'", "E"])
        .rule("atom", "E", &["'n'"])
        .build()?;
    let lattice = Lexer::new(&grammar)?.scan(&text)?;
    let forest = parse(&grammar, &lattice)?;
    print!("{}", forest.dump(&grammar));
    println!("{} trees", forest.tree_count());
    match disambiguate(&forest, &grammar) {
        Ok(tree) => println!("one tree: {}", tree.sexpr()),
        Err(e) => {
            println!("{e}");
            for alt in &e.alternatives {
                println!("  {}: {}", alt.owner, alt.children.join(" "));
            }
        }
    }
    Ok(())
}
