//! Command-line driver. [`run`] does all the work so it can be tested
//! without spawning a process; the `asgen` binary only parses arguments.

use std::fmt::Display;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use crate::asg::{ConstraintRegistry, Warning};
use crate::lex::line_col;
use crate::model::file::{self as model_file, ASM_VERSION};
use crate::model::{validate_model, ModelSet};
use crate::scene3d::{self, EvalOptions};
use crate::{messages, Error, Language};

pub const BUILTIN_MODELS: [&str; 2] = ["scene3d", "messages"];

pub const EXIT_OK: i32 = 0;
pub const EXIT_SYNTAX: i32 = 1;
pub const EXIT_SEMANTIC: i32 = 2;
pub const EXIT_MODEL: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Check,
    Parse,
    Render,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelSource {
    Builtin(String),
    File(PathBuf),
}

impl ModelSource {
    /// Built-in names win over files of the same name.
    pub fn parse(s: &str) -> Self {
        if BUILTIN_MODELS.contains(&s) {
            ModelSource::Builtin(s.to_string())
        } else {
            ModelSource::File(PathBuf::from(s))
        }
    }

    fn label(&self) -> String {
        match self {
            ModelSource::Builtin(name) => format!("<{name}>"),
            ModelSource::File(path) => path.display().to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum RenderFormat {
    #[default]
    Obj,
    Json,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Dumps {
    pub tokens: bool,
    pub grammar: bool,
    pub forest: bool,
    pub tree: bool,
    pub asg_json: bool,
    pub asg_dot: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub model: ModelSource,
    /// Source file; `-` reads standard input.
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub dumps: Dumps,
    pub strict: bool,
    pub format: RenderFormat,
    pub scoped_color: bool,
}

impl RunConfig {
    pub fn new(command: Command, model: &str) -> Self {
        RunConfig {
            command,
            model: ModelSource::parse(model),
            input: None,
            output: None,
            dumps: Dumps::default(),
            strict: false,
            format: RenderFormat::Obj,
            scoped_color: false,
        }
    }

    pub fn input(mut self, path: impl Into<PathBuf>) -> Self {
        self.input = Some(path.into());
        self
    }

    pub fn output(mut self, path: impl Into<PathBuf>) -> Self {
        self.output = Some(path.into());
        self
    }
}

pub fn version_string() -> String {
    format!("{} (asm-version {ASM_VERSION})", env!("CARGO_PKG_VERSION"))
}

/// Hooks for every built-in constraint name, so a model file that reuses
/// them behaves like the built-in language.
pub fn builtin_constraints() -> ConstraintRegistry {
    scene3d::constraints()
}

struct Diagnostics<'a> {
    err: &'a mut dyn Write,
}

impl Diagnostics<'_> {
    fn error(&mut self, location: &str, code: &str, message: impl Display) {
        let _ = writeln!(self.err, "{location}: error[{code}]: {message}");
    }

    fn note(&mut self, message: impl Display) {
        let _ = writeln!(self.err, "  note: {message}");
    }

    fn warning(&mut self, location: &str, code: &str, message: impl Display) {
        let _ = writeln!(self.err, "{location}: warning[{code}]: {message}");
    }
}

/// Drops a leading `line:col: ` that error messages carry on their own.
fn strip_position(message: &str) -> &str {
    let mut parts = message.splitn(3, ':');
    match (parts.next(), parts.next(), parts.next()) {
        (Some(l), Some(c), Some(rest))
            if !l.is_empty() && !c.is_empty() && l.bytes().all(|b| b.is_ascii_digit()) && c.bytes().all(|b| b.is_ascii_digit()) =>
        {
            rest.trim_start()
        }
        _ => message,
    }
}

fn located(file: &str, source: &str, offset: Option<usize>) -> String {
    match offset {
        Some(o) => {
            let (line, col) = line_col(source, o);
            format!("{file}:{line}:{col}")
        }
        None => file.to_string(),
    }
}

enum Failure {
    Exit(i32),
}

type Step<T> = Result<T, Failure>;

struct Runner<'a> {
    config: &'a RunConfig,
    out: &'a mut dyn Write,
    diag: Diagnostics<'a>,
}

impl Runner<'_> {
    fn load_model(&mut self) -> Step<ModelSet> {
        match &self.config.model {
            ModelSource::Builtin(name) if name == "scene3d" => Ok(scene3d::model()),
            ModelSource::Builtin(name) if name == "messages" => Ok(messages::model()),
            ModelSource::Builtin(name) => {
                self.diag.error(&format!("<{name}>"), "E-MODEL", "unknown built-in model");
                Err(Failure::Exit(EXIT_MODEL))
            }
            ModelSource::File(path) => model_file::read(path).map_err(|e| {
                self.diag.error(&path.display().to_string(), "E-MODEL", e);
                Failure::Exit(EXIT_MODEL)
            }),
        }
    }

    fn language(&mut self, model: ModelSet) -> Step<Language> {
        let label = self.config.model.label();
        let report = validate_model(&model);
        for w in report.warnings() {
            self.diag.warning(&label, "W-MODEL", w);
        }
        if !report.is_usable() {
            let mut errors = report.errors();
            let first = errors.next().expect("unusable report has errors");
            self.diag.error(
                &label,
                "E-MODEL",
                format_args!("invalid model ({} error(s)): {first}", report.error_count()),
            );
            for e in errors {
                self.diag.note(e);
            }
            return Err(Failure::Exit(EXIT_MODEL));
        }
        match Language::new(model) {
            Ok(lang) => Ok(lang.with_constraints(builtin_constraints())),
            Err(e) => {
                self.diag.error(&label, e.code(), &e);
                Err(Failure::Exit(e.exit_code()))
            }
        }
    }

    fn read_input(&mut self) -> Step<(String, String)> {
        let Some(path) = &self.config.input else {
            self.diag.error("asgen", "E-USAGE", "an input file is required");
            return Err(Failure::Exit(EXIT_IO));
        };
        let name = path.display().to_string();
        let text = if path == Path::new("-") {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map(|_| s)
        } else {
            std::fs::read_to_string(path)
        };
        match text {
            Ok(t) => Ok((name, t)),
            Err(e) => {
                self.diag.error(&name, "E-IO", e);
                Err(Failure::Exit(EXIT_IO))
            }
        }
    }

    fn fail(&mut self, file: &str, source: &str, e: &Error) -> Failure {
        let at = located(file, source, e.offset());
        match e {
            Error::Constraints(violations) => {
                self.diag.error(
                    &at,
                    e.code(),
                    format_args!("{} constraint violation(s): {}", violations.len(), strip_position(&violations[0].to_string())),
                );
                for v in &violations[1..] {
                    self.diag.note(format_args!("{}:{}:{}: {}", file, v.line, v.column, strip_position(&v.to_string())));
                }
            }
            Error::Ambiguity(a) => {
                self.diag.error(&at, e.code(), strip_position(&e.to_string()));
                for alt in &a.alternatives {
                    self.diag.note(format_args!("{} [{}]", alt.production, alt.children.join(" ")));
                }
            }
            _ => self.diag.error(&at, e.code(), strip_position(&e.to_string())),
        }
        Failure::Exit(e.exit_code())
    }

    fn emit(&mut self, bytes: &[u8]) -> Step<()> {
        if let Err(e) = self.out.write_all(bytes) {
            self.diag.error("<stdout>", "E-IO", e);
            return Err(Failure::Exit(EXIT_IO));
        }
        Ok(())
    }

    fn write_output(&mut self, bytes: &[u8]) -> Step<()> {
        match &self.config.output {
            Some(path) => std::fs::write(path, bytes).map_err(|e| {
                self.diag.error(&path.display().to_string(), "E-IO", e);
                Failure::Exit(EXIT_IO)
            }),
            None => self.emit(bytes),
        }
    }

    fn warnings(&mut self, file: &str, warnings: &[Warning]) -> Step<()> {
        for w in warnings {
            self.diag.warning(&format!("{file}:{}:{}", w.line, w.column), w.code, &w.message);
        }
        if self.config.strict && !warnings.is_empty() {
            self.diag.error(file, "E-STRICT", format_args!("{} warning(s) treated as errors", warnings.len()));
            return Err(Failure::Exit(EXIT_SEMANTIC));
        }
        Ok(())
    }

    fn run(&mut self) -> Step<()> {
        let model = self.load_model()?;
        let lang = self.language(model)?;
        let dumps = self.config.dumps;
        if dumps.grammar {
            let text = lang.grammar().dump();
            self.emit(text.as_bytes())?;
        }
        if self.config.command == Command::Check {
            let g = lang.grammar();
            let summary = format!(
                "{}: ok, {} elements, {} productions, {} tokens\n",
                self.config.model.label(),
                lang.model().len(),
                g.productions().len(),
                g.tokens().len()
            );
            return self.emit(summary.as_bytes());
        }
        if self.config.command == Command::Render && self.config.model != ModelSource::Builtin("scene3d".into()) {
            let label = self.config.model.label();
            self.diag.error(&label, "E-MODEL", "render needs the built-in scene3d model (--model scene3d)");
            return Err(Failure::Exit(EXIT_MODEL));
        }
        let (file, source) = self.read_input()?;

        // Early stages run separately only to dump what they produced before
        // a later stage fails.
        if dumps.tokens || dumps.forest {
            let lattice = lang.lex(&source).map_err(|e| self.fail(&file, &source, &e))?;
            if dumps.tokens {
                let text = lattice.dump(lang.grammar());
                self.emit(text.as_bytes())?;
            }
            if dumps.forest {
                let forest =
                    crate::earley::parse(lang.grammar(), &lattice).map_err(|e| self.fail(&file, &source, &e.into()))?;
                let text = forest.dump(lang.grammar());
                self.emit(text.as_bytes())?;
            }
        }
        let analysis = lang.analyze(&source).map_err(|e| self.fail(&file, &source, &e))?;
        if dumps.tree {
            let text = analysis.tree.dump(lang.grammar());
            self.emit(text.as_bytes())?;
        }
        let graph = analysis.graph;
        self.warnings(&file, &graph.warnings)?;

        match self.config.command {
            Command::Parse => {
                let mut artifact = String::new();
                if dumps.asg_json {
                    artifact.push_str(&graph.to_json());
                }
                if dumps.asg_dot {
                    artifact.push_str(&graph.to_dot());
                }
                if self.config.output.is_some() || !artifact.is_empty() {
                    self.write_output(artifact.as_bytes())?;
                }
                Ok(())
            }
            Command::Render => {
                if dumps.asg_json {
                    self.emit(graph.to_json().as_bytes())?;
                }
                if dumps.asg_dot {
                    self.emit(graph.to_dot().as_bytes())?;
                }
                let options = EvalOptions {
                    scoped_color: self.config.scoped_color,
                    ..Default::default()
                };
                let cubes = match scene3d::evaluate_with(&graph, &options) {
                    Ok(c) => c,
                    Err(e) => {
                        self.diag.error(&located(&file, &source, e.offset()), "E-EVAL", strip_position(&e.to_string()));
                        return Err(Failure::Exit(EXIT_SEMANTIC));
                    }
                };
                let mut buf = Vec::new();
                let written = match self.config.format {
                    RenderFormat::Obj => scene3d::export_obj(&cubes, &mut buf),
                    RenderFormat::Json => scene3d::export_json(&cubes, &mut buf),
                };
                written.expect("writing to memory");
                self.write_output(&buf)
            }
            Command::Check => unreachable!(),
        }
    }
}

/// Runs one command. Artifacts and dumps go to `out` (or the output file),
/// diagnostics to `err`. Returns the process exit code.
pub fn run(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut runner = Runner {
        config,
        out,
        diag: Diagnostics { err },
    };
    match runner.run() {
        Ok(()) => EXIT_OK,
        Err(Failure::Exit(code)) => code,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn position_prefix_is_stripped() {
        assert_eq!(strip_position("3:14: syntax error"), "syntax error");
        assert_eq!(strip_position("model: bad"), "model: bad");
        assert_eq!(strip_position("no colon"), "no colon");
    }

    #[test]
    fn builtin_names() {
        assert_eq!(ModelSource::parse("scene3d"), ModelSource::Builtin("scene3d".into()));
        assert_eq!(ModelSource::parse("x.asm"), ModelSource::File("x.asm".into()));
    }
}
