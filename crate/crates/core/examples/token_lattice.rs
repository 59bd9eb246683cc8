//! Shows the token lattice for input where keywords overlap names: `next`
//! is both the keyword and a possible object name, and the parser decides.
//!
//! cargo run --example token_lattice -- "draw next next"

use asgen::scene3d;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = std::env::args().nth(1).unwrap_or_else(|| "scene [ draw next next color relative red -0.5 ]".into());
    let language = scene3d::language()?;
    let lattice = language.lex(&text)?;
    print!("{}", lattice.dump(language.grammar()));
    println!("{} edges over {} positions", lattice.edges().len(), lattice.nodes().len());
    Ok(())
}
