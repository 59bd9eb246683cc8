//! Models are validated before a grammar is built. An optional identifier
//! is one of the rejected combinations.
//!
//! cargo run --example validation

use asgen::model::{validate_model, ElementModel, Member, ModelBuilder, PatternSpec};
use asgen::{Error, Language};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = ModelBuilder::new()
        .start("Doc")
        .element(ElementModel::composite("Doc", vec![Member::new("items", "Thing").list()]))
        .element(
            ElementModel::composite("Thing", vec![Member::new("id", "Num").optional(), Member::new("other", "Thing").reference()])
                .prefix("thing")
                .id(["id"]),
        )
        .element(ElementModel::basic("Num", PatternSpec::new("[0-9]+", "value")))
        .element(ElementModel::basic("Unused", PatternSpec::new("x", "value")))
        .build()?;

    let report = validate_model(&model);
    print!("{report}");
    println!("usable: {}", report.is_usable());
    match Language::new(model) {
        Err(Error::Model(_)) => println!("grammar synthesis refused"),
        Err(e) => return Err(e.into()),
        Ok(_) => unreachable!("an optional @ID must be rejected"),
    }
    Ok(())
}
