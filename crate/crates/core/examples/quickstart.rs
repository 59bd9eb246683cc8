//! Define a tiny language as a model, then parse a sentence into a graph.
//!
//! cargo run --example quickstart

use asgen::model::{ElementModel, Member, ModelBuilder, PatternSpec};
use asgen::Language;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // greeting := "hello" Name ("," Name)* "!"
    let model = ModelBuilder::new()
        .start("Greeting")
        .element(
            ElementModel::composite("Greeting", vec![Member::new("names", "Name").list().separator(",")])
                .prefix("hello")
                .suffix("!"),
        )
        .element(ElementModel::basic("Name", PatternSpec::new("[A-Z][a-z]*", "text")))
        .build()?;

    let language = Language::new(model)?;
    let graph = language.graph("hello Ada, Grace, Edsger !")?;

    let root = graph.node(graph.root());
    for item in root.field("names").and_then(|f| f.as_list()).unwrap_or_default() {
        let name = graph.node(graph.target(item).unwrap());
        println!("{} at {:?}", name.value().unwrap_or("?"), name.span);
    }
    print!("{}", graph.to_json());
    Ok(())
}
