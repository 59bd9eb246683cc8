use std::path::PathBuf;
use std::process::ExitCode;

use asgen::cli::{self, Command, Dumps, ModelSource, RenderFormat, RunConfig};
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "asgen", about = "Parser generation from annotated abstract syntax models")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Validate a model and synthesize its grammar.
    Check(Common),
    /// Parse an input file into an abstract syntax graph.
    Parse(Common),
    /// Parse and evaluate a scene3d program, writing its geometry.
    Render(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Obj,
    Json,
}

#[derive(Args)]
struct Common {
    /// Built-in model name (scene3d, messages) or model file path.
    #[arg(long, short, default_value = "scene3d")]
    model: String,
    /// Input file, `-` for standard input.
    input: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    dump_tokens: bool,
    #[arg(long)]
    dump_grammar: bool,
    #[arg(long)]
    dump_forest: bool,
    #[arg(long)]
    dump_tree: bool,
    #[arg(long)]
    dump_asg_json: bool,
    #[arg(long)]
    dump_asg_dot: bool,
    /// Treat warnings as errors.
    #[arg(long)]
    strict: bool,
    #[arg(long, value_enum, default_value = "obj")]
    format: Format,
    /// Restore color as well as the transform at the end of `{ }` blocks.
    #[arg(long)]
    scoped_color: bool,
}

fn main() -> ExitCode {
    // Usage errors get their own code; 1 to 3 are taken by pipeline failures.
    let parsed = match Cli::command()
        .version(cli::version_string())
        .try_get_matches()
        .and_then(|m| Cli::from_arg_matches(&m))
    {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(cli::EXIT_USAGE as u8);
        }
        Err(e) => e.exit(),
    };
    let (command, c) = match parsed.command {
        Sub::Check(c) => (Command::Check, c),
        Sub::Parse(c) => (Command::Parse, c),
        Sub::Render(c) => (Command::Render, c),
    };
    let config = RunConfig {
        command,
        model: ModelSource::parse(&c.model),
        input: c.input,
        output: c.output,
        dumps: Dumps {
            tokens: c.dump_tokens,
            grammar: c.dump_grammar,
            forest: c.dump_forest,
            tree: c.dump_tree,
            asg_json: c.dump_asg_json,
            asg_dot: c.dump_asg_dot,
        },
        strict: c.strict,
        format: match c.format {
            Format::Obj => RenderFormat::Obj,
            Format::Json => RenderFormat::Json,
        },
        scoped_color: c.scoped_color,
    };
    let code = cli::run(&config, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    ExitCode::from(code as u8)
}
