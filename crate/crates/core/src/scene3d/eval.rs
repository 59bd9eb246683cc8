use nalgebra::{Matrix4, Rotation3, Unit, Vector3};
use thiserror::Error;

use super::number;
use crate::asg::{FieldValue, InstanceGraph};
use crate::lex::line_col;

pub type Rgba = [f64; 4];

#[derive(Debug, Clone, PartialEq)]
pub struct CubeInstance {
    /// Maps the unit cube centred at the origin to world space.
    pub transform: Matrix4<f64>,
    pub color: Rgba,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    /// Restore the color as well as the matrix when a `{ }` block ends.
    pub scoped_color: bool,
    /// Deepest chain of nested defined-object draws.
    pub max_depth: usize,
    pub max_cubes: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            scoped_color: false,
            max_depth: 100_000,
            max_cubes: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("{line}:{column}: `next` used outside a defined object")]
    NextOutsideInvocation { offset: usize, line: usize, column: usize },
    #[error("{line}:{column}: draw parameter {value} is negative")]
    NegativeParam { value: i64, offset: usize, line: usize, column: usize },
    #[error("{line}:{column}: defined objects nest deeper than {limit} levels")]
    DepthLimit { limit: usize, offset: usize, line: usize, column: usize },
    #[error("scene produces more than {0} cubes")]
    CubeLimit(usize),
    #[error("node #{node} ({element}) is not a valid scene statement")]
    Malformed { node: usize, element: String },
}

impl EvalError {
    pub fn offset(&self) -> Option<usize> {
        match self {
            EvalError::NextOutsideInvocation { offset, .. }
            | EvalError::NegativeParam { offset, .. }
            | EvalError::DepthLimit { offset, .. } => Some(*offset),
            _ => None,
        }
    }
}

enum Task {
    Exec { node: usize, param: Option<i64> },
    Repeat { node: usize, remaining: u64, param: Option<i64> },
    PopMatrix,
    RestoreColor(Rgba),
    Leave,
}

struct Machine<'a> {
    graph: &'a InstanceGraph,
    options: EvalOptions,
    matrices: Vec<Matrix4<f64>>,
    color: Rgba,
    depth: usize,
    tasks: Vec<Task>,
    cubes: Vec<CubeInstance>,
}

impl Machine<'_> {
    fn at(&self, node: usize) -> (usize, usize, usize) {
        let offset = self.graph.node(node).span.0;
        let (line, column) = line_col(self.graph.input(), offset);
        (offset, line, column)
    }

    fn malformed(&self, node: usize) -> EvalError {
        EvalError::Malformed {
            node,
            element: self.graph.node(node).element_type.clone(),
        }
    }

    fn child(&self, node: usize, field: &str) -> Result<usize, EvalError> {
        self.graph
            .node(node)
            .field(field)
            .and_then(|v| self.graph.target(v))
            .ok_or_else(|| self.malformed(node))
    }

    fn num(&self, node: usize, field: &str) -> Option<f64> {
        number(self.graph, self.graph.node(node), field)
    }

    fn top(&mut self) -> &mut Matrix4<f64> {
        self.matrices.last_mut().expect("matrix stack is never empty")
    }

    fn apply(&mut self, op: Matrix4<f64>) {
        let top = self.top();
        *top *= op;
    }

    fn push_children(&mut self, node: usize, param: Option<i64>) -> Result<(), EvalError> {
        let list = self
            .graph
            .node(node)
            .field("statements")
            .and_then(FieldValue::as_list)
            .ok_or_else(|| self.malformed(node))?;
        for item in list.iter().rev() {
            let child = self.graph.target(item).ok_or_else(|| self.malformed(node))?;
            self.tasks.push(Task::Exec { node: child, param });
        }
        Ok(())
    }

    fn draw(&mut self, node: usize, param: Option<i64>) -> Result<(), EvalError> {
        let p = match self.graph.node(node).field("parameter") {
            None | Some(FieldValue::Absent) => 1,
            Some(v) => {
                let arg = self.graph.target(v).ok_or_else(|| self.malformed(node))?;
                let arg_node = self.graph.node(arg);
                if arg_node.element_type == "NextParameter" {
                    let Some(current) = param else {
                        let (offset, line, column) = self.at(arg);
                        return Err(EvalError::NextOutsideInvocation { offset, line, column });
                    };
                    current - 1
                } else {
                    let text = arg_node.value().unwrap_or_default();
                    text.parse::<i64>().map_err(|_| self.malformed(node))?
                }
            }
        };
        if p < 0 {
            let (offset, line, column) = self.at(node);
            return Err(EvalError::NegativeParam { value: p, offset, line, column });
        }
        if p == 0 {
            return Ok(());
        }
        let object = self.child(node, "object")?;
        match self.graph.node(object).element_type.as_str() {
            "PrimitiveObject" => {
                if self.cubes.len() >= self.options.max_cubes {
                    return Err(EvalError::CubeLimit(self.options.max_cubes));
                }
                let transform = *self.top();
                self.cubes.push(CubeInstance { transform, color: self.color });
            }
            "DefinedObject" => {
                if self.depth >= self.options.max_depth {
                    let (offset, line, column) = self.at(node);
                    return Err(EvalError::DepthLimit {
                        limit: self.options.max_depth,
                        offset,
                        line,
                        column,
                    });
                }
                let definition = self.child(object, "definition")?;
                let body = self.child(definition, "body")?;
                self.depth += 1;
                self.tasks.push(Task::Leave);
                self.tasks.push(Task::Exec { node: body, param: Some(p) });
            }
            _ => return Err(self.malformed(object)),
        }
        Ok(())
    }

    fn exec(&mut self, node: usize, param: Option<i64>) -> Result<(), EvalError> {
        let kind = self.graph.node(node).element_type.as_str();
        match kind {
            "ScopedStatement" => {
                let copy = *self.top();
                self.matrices.push(copy);
                self.tasks.push(Task::PopMatrix);
                if self.options.scoped_color {
                    self.tasks.push(Task::RestoreColor(self.color));
                }
                self.push_children(node, param)?;
            }
            "CompositeStatement" => self.push_children(node, param)?,
            "RepeatStatement" => {
                let count = self.graph.node(self.child(node, "count")?).value().unwrap_or_default();
                let remaining = count.parse::<u64>().map_err(|_| self.malformed(node))?;
                self.tasks.push(Task::Repeat { node, remaining, param });
            }
            "DrawStatement" => self.draw(node, param)?,
            "ScaleStatement" => {
                let args = self.child(node, "arguments")?;
                let v = match self.graph.node(args).element_type.as_str() {
                    "UniformScale" => {
                        let f = self.num(args, "factor").ok_or_else(|| self.malformed(args))?;
                        Vector3::new(f, f, f)
                    }
                    _ => Vector3::new(
                        self.num(args, "x").unwrap_or(1.0),
                        self.num(args, "y").unwrap_or(1.0),
                        self.num(args, "z").unwrap_or(1.0),
                    ),
                };
                self.apply(Matrix4::new_nonuniform_scaling(&v));
            }
            "RotateStatement" => {
                let axis = Vector3::new(
                    self.num(node, "x").unwrap_or(0.0),
                    self.num(node, "y").unwrap_or(0.0),
                    self.num(node, "z").unwrap_or(0.0),
                );
                let angle = self.num(node, "angle").ok_or_else(|| self.malformed(node))?;
                if axis.norm() == 0.0 {
                    return Err(self.malformed(node));
                }
                let r = Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle.to_radians());
                self.apply(r.to_homogeneous());
            }
            "TranslateStatement" => {
                let v = Vector3::new(
                    self.num(node, "x").unwrap_or(0.0),
                    self.num(node, "y").unwrap_or(0.0),
                    self.num(node, "z").unwrap_or(0.0),
                );
                self.apply(Matrix4::new_translation(&v));
            }
            "ColorStatement" => {
                let relative = self.graph.node(node).field("relative").is_some_and(|v| !v.is_absent());
                for (i, channel) in ["red", "green", "blue", "alpha"].into_iter().enumerate() {
                    if let Some(v) = self.num(node, channel) {
                        self.color[i] = if relative { self.color[i] + v } else { v };
                    }
                }
                for c in &mut self.color {
                    *c = c.clamp(0.0, 1.0);
                }
            }
            _ => return Err(self.malformed(node)),
        }
        Ok(())
    }

    fn run(&mut self) -> Result<(), EvalError> {
        while let Some(task) = self.tasks.pop() {
            match task {
                Task::Exec { node, param } => self.exec(node, param)?,
                Task::Repeat { node, remaining, param } => {
                    if remaining > 0 {
                        let body = self.child(node, "body")?;
                        self.tasks.push(Task::Repeat { node, remaining: remaining - 1, param });
                        self.tasks.push(Task::Exec { node: body, param });
                    }
                }
                Task::PopMatrix => {
                    self.matrices.pop();
                }
                Task::RestoreColor(c) => self.color = c,
                Task::Leave => self.depth -= 1,
            }
        }
        Ok(())
    }
}

pub fn evaluate(graph: &InstanceGraph) -> Result<Vec<CubeInstance>, EvalError> {
    evaluate_with(graph, &EvalOptions::default())
}

/// Runs every scene in source order, each from a fresh state: identity
/// transform, opaque black, no current parameter.
pub fn evaluate_with(graph: &InstanceGraph, options: &EvalOptions) -> Result<Vec<CubeInstance>, EvalError> {
    let mut cubes = Vec::new();
    for scene in graph.nodes_of_type("Scene") {
        let mut m = Machine {
            graph,
            options: EvalOptions {
                max_cubes: options.max_cubes - cubes.len(),
                ..*options
            },
            matrices: vec![Matrix4::identity()],
            color: [0.0, 0.0, 0.0, 1.0],
            depth: 0,
            tasks: Vec::new(),
            cubes: Vec::new(),
        };
        let body = m.child(scene.id, "body")?;
        m.tasks.push(Task::Exec { node: body, param: None });
        m.run()?;
        cubes.extend(m.cubes);
    }
    Ok(cubes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene3d::language;

    fn run(text: &str) -> Result<Vec<CubeInstance>, EvalError> {
        evaluate(&language().unwrap().graph(text).unwrap())
    }

    #[test]
    fn default_cube() {
        let cubes = run("scene [ draw cube ]").unwrap();
        assert_eq!(cubes.len(), 1);
        assert_eq!(cubes[0].transform, Matrix4::identity());
        assert_eq!(cubes[0].color, [0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn translation_lands_in_last_column() {
        let cubes = run("scene [ translate x 2 draw cube ]").unwrap();
        assert_eq!(cubes[0].transform[(0, 3)], 2.0);
    }

    #[test]
    fn zero_parameter_draws_nothing() {
        assert!(run("scene [ draw cube 0 ]").unwrap().is_empty());
        assert_eq!(run("scene [ draw cube 3 ]").unwrap().len(), 1);
    }

    #[test]
    fn next_outside_definition() {
        let err = run("scene [\n  draw cube next ]").unwrap_err();
        assert!(matches!(err, EvalError::NextOutsideInvocation { line: 2, column: 13, .. }), "{err:?}");
    }

    #[test]
    fn unbounded_self_reference_hits_depth_limit() {
        let g = language().unwrap().graph("define a [ draw a ] scene [ draw a ]").unwrap();
        let opts = EvalOptions { max_depth: 50, ..Default::default() };
        assert!(matches!(evaluate_with(&g, &opts), Err(EvalError::DepthLimit { limit: 50, .. })));
    }

    #[test]
    fn scope_restores_matrix_but_not_color() {
        let text = "scene [ { translate x 1 color red 1 } draw cube ]";
        let cubes = run(text).unwrap();
        assert_eq!(cubes[0].transform, Matrix4::identity());
        assert_eq!(cubes[0].color, [1.0, 0.0, 0.0, 1.0]);
        let g = language().unwrap().graph(text).unwrap();
        let scoped = evaluate_with(&g, &EvalOptions { scoped_color: true, ..Default::default() }).unwrap();
        assert_eq!(scoped[0].color, [0.0, 0.0, 0.0, 1.0]);
    }
}
