//! Priority and associativity annotations pick one tree out of an
//! ambiguous expression grammar.
//!
//! cargo run --example expression_precedence -- "1 - 2 - 3 * 4 ^ 2 ^ 3"

use asgen::model::{Associativity, ElementModel, Member, ModelBuilder, PatternSpec};
use asgen::Language;

fn binary(name: &str, op: &str, priority: i32, assoc: Associativity) -> ElementModel {
    ElementModel::composite(
        name,
        vec![Member::new("left", "Expr"), Member::new("right", "Expr").prefix(op)],
    )
    .priority(priority)
    .associativity(assoc)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = std::env::args().nth(1).unwrap_or_else(|| "1 - 2 - 3 * 4 ^ 2 ^ 3".into());
    let model = ModelBuilder::new()
        .start("Expr")
        .element(ElementModel::selection("Expr", ["Sub", "Mul", "Pow", "Int"]))
        .element(binary("Sub", "-", 1, Associativity::Left))
        .element(binary("Mul", "*", 2, Associativity::Left))
        .element(binary("Pow", "^", 3, Associativity::Right))
        .element(ElementModel::basic("Int", PatternSpec::new("[0-9]+", "value")))
        .build()?;
    let language = Language::new(model)?;

    let forest = language.forest(&text)?;
    println!("{} parse trees before filtering", forest.tree_count());
    let tree = language.tree(&text)?;
    println!("{}", tree.sexpr());
    Ok(())
}
