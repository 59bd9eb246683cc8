//! Identifier references become graph edges, resolved after the whole input
//! is read, so a message may name a user declared later.
//!
//! cargo run --example references

use asgen::messages;

const INPUT: &str = r#"
message from 1 to 2 "see you at noon"
user 1 ann
user 2 bob
message from 2 to 1 "ok"
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let graph = messages::language()?.graph(INPUT)?;
    for m in graph.nodes_of_type("Message") {
        let name = |field: &str| {
            let user = graph.target(m.field(field).unwrap()).unwrap();
            graph.text(graph.node(user).field("name").unwrap().as_node().unwrap()).to_string()
        };
        let content = graph.node(m.field("content").unwrap().as_node().unwrap()).value().unwrap();
        println!("{} -> {}: {content}", name("sender"), name("receiver"));
    }
    print!("{}", graph.to_dot());
    Ok(())
}
