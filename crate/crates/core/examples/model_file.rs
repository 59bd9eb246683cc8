//! Prints a built-in model in the model-description file format, then reads
//! it back and checks nothing was lost.
//!
//! cargo run --example model_file -- messages > my.asm

use asgen::model::file;
use asgen::{messages, scene3d};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "scene3d".into());
    let model = match name.as_str() {
        "scene3d" => scene3d::model(),
        "messages" => messages::model(),
        other => return Err(format!("no built-in model named {other}").into()),
    };
    let text = file::to_string(&model);
    assert_eq!(file::from_str(&text)?, model);
    print!("{text}");
    Ok(())
}
