//! Custom constraints are named in the model and checked by hooks
//! registered with the language.
//!
//! cargo run --example constraints

use asgen::{scene3d, Error};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let language = scene3d::language()?;
    for text in [
        "scene [ repeat 3 times [ draw cube ] ]",
        "scene [ repeat 2.5 times [ draw cube ] ]",
        "scene [ draw cube 1.5 rotate angle 10 ]",
    ] {
        match language.analyze(text) {
            Ok(a) => println!("ok       {text}  ({} hook calls)", a.constraints.checked),
            Err(Error::Constraints(violations)) => {
                println!("rejected {text}");
                for v in violations {
                    println!("  {v}");
                }
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}
