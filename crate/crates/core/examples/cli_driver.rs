//! Drives the command-line front end in-process, capturing its output and
//! exit code.
//!
//! cargo run --example cli_driver

use asgen::cli::{run, Command, RunConfig};

fn main() {
    let input = concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/helix.s3d");

    let check = RunConfig::new(Command::Check, "scene3d");
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(&check, &mut out, &mut err);
    print!("check -> {code}: {}", String::from_utf8_lossy(&out));

    let mut parse = RunConfig::new(Command::Parse, "scene3d").input(input);
    parse.dumps.asg_json = true;
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&parse, &mut out, &mut err);
    let json = String::from_utf8_lossy(&out);
    println!("parse -> {code}: {} ASG lines", json.lines().count());

    let broken = RunConfig::new(Command::Parse, "scene3d").input("/no/such/file.s3d");
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&broken, &mut out, &mut err);
    print!("missing input -> {code}: {}", String::from_utf8_lossy(&err));
}
