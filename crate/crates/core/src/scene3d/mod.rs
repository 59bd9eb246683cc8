//! A language for describing 3D objects built from transformed cubes.
//!
//! Programs hold object definitions and scenes. Statements change an
//! OpenGL-like state (transform matrix, color) and draw cubes or defined
//! objects; defined objects may draw themselves with a decreasing parameter.
//!
//! ```text
//! define tower [ draw cube translate y 1 draw tower next ]
//! scene [ color green 1 draw tower 5 ]
//! ```

use crate::asg::{AsgNode, ConstraintRegistry, FieldValue, InstanceGraph};
use crate::model::{ElementModel, Member, ModelBuilder, ModelSet, PatternSpec};
use crate::{Error, Language};

mod eval;
mod export;

pub use eval::{evaluate, evaluate_with, CubeInstance, EvalError, EvalOptions, Rgba};
pub use export::{export_json, export_obj};

pub const NUMBER_PATTERN: &str = r"[+-]?[0-9]+(\.[0-9]+)?";
pub const NAME_PATTERN: &str = "[a-zA-Z_][a-zA-Z0-9_]*";

fn axis(name: &str, group: &str) -> Member {
    Member::new(name, "Number").optional().prefix(name).free_order(group)
}

fn statement_list(name: &str, open: &str, close: &str) -> ElementModel {
    ElementModel::composite(name, vec![Member::new("statements", "Statement").list()])
        .prefix(open)
        .suffix(close)
}

pub fn model() -> ModelSet {
    ModelBuilder::new()
        .start("Program")
        .element(ElementModel::composite("Program", vec![Member::new("sections", "Section").list()]))
        .element(ElementModel::selection("Section", ["Definition", "Scene"]))
        .element(
            ElementModel::composite(
                "Definition",
                vec![Member::new("name", "ObjectName"), Member::new("body", "CompositeStatement")],
            )
            .prefix("define")
            .id(["name"]),
        )
        .element(ElementModel::basic("ObjectName", PatternSpec::new(NAME_PATTERN, "name")))
        .element(ElementModel::composite("Scene", vec![Member::new("body", "CompositeStatement")]).prefix("scene"))
        .element(ElementModel::selection(
            "Statement",
            [
                "ScopedStatement",
                "CompositeStatement",
                "RepeatStatement",
                "DrawStatement",
                "ScaleStatement",
                "RotateStatement",
                "TranslateStatement",
                "ColorStatement",
            ],
        ))
        .element(statement_list("ScopedStatement", "{", "}"))
        .element(statement_list("CompositeStatement", "[", "]"))
        .element(
            ElementModel::composite(
                "RepeatStatement",
                vec![Member::new("count", "Number").suffix("times"), Member::new("body", "Statement")],
            )
            .prefix("repeat")
            .constraint("scene3d.repeat_count"),
        )
        .element(
            ElementModel::composite(
                "DrawStatement",
                vec![Member::new("object", "Object"), Member::new("parameter", "Parameter").optional()],
            )
            .prefix("draw")
            .constraint("scene3d.draw_param"),
        )
        .element(ElementModel::selection("Object", ["PrimitiveObject", "DefinedObject"]))
        .element(ElementModel::composite("PrimitiveObject", vec![]).prefix("cube"))
        .element(
            ElementModel::composite("DefinedObject", vec![Member::new("definition", "Definition").reference()])
                .priority(1),
        )
        .element(ElementModel::selection("Parameter", ["Number", "NextParameter"]))
        .element(ElementModel::composite("NextParameter", vec![]).prefix("next"))
        .element(ElementModel::basic("Number", PatternSpec::new(NUMBER_PATTERN, "value")))
        .element(ElementModel::composite("ScaleStatement", vec![Member::new("arguments", "ScaleArguments")]).prefix("scale"))
        .element(ElementModel::selection("ScaleArguments", ["UniformScale", "AxisScale"]))
        .element(ElementModel::composite("UniformScale", vec![Member::new("factor", "Number")]))
        .element(
            ElementModel::composite("AxisScale", vec![axis("x", "axes"), axis("y", "axes"), axis("z", "axes")])
                .constraint("scene3d.any_axis"),
        )
        .element(
            ElementModel::composite(
                "RotateStatement",
                vec![
                    axis("x", "rotation"),
                    axis("y", "rotation"),
                    axis("z", "rotation"),
                    Member::new("angle", "Number").prefix("angle").free_order("rotation"),
                ],
            )
            .prefix("rotate")
            .constraint("scene3d.rotation_axis"),
        )
        .element(
            ElementModel::composite(
                "TranslateStatement",
                vec![axis("x", "axes"), axis("y", "axes"), axis("z", "axes")],
            )
            .prefix("translate")
            .constraint("scene3d.any_axis"),
        )
        .element(
            ElementModel::composite(
                "ColorStatement",
                vec![
                    Member::new("relative", "RelativeMode").optional().free_order("channels"),
                    axis("red", "channels"),
                    axis("green", "channels"),
                    axis("blue", "channels"),
                    axis("alpha", "channels"),
                ],
            )
            .prefix("color")
            .constraint("scene3d.any_channel"),
        )
        .element(ElementModel::composite("RelativeMode", vec![]).prefix("relative"))
        .build()
        .expect("built-in model is well formed")
}

/// Value of a `Number` node held directly in `field`.
pub(crate) fn number(graph: &InstanceGraph, node: &AsgNode, field: &str) -> Option<f64> {
    let id = node.field(field)?.as_node()?;
    graph.node(id).value()?.parse().ok()
}

fn is_integer(text: &str) -> bool {
    let digits = text.strip_prefix(['+', '-']).unwrap_or(text);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

fn integer_field(graph: &InstanceGraph, node: &AsgNode, field: &str, what: &str) -> Result<(), String> {
    let Some(id) = node.field(field).and_then(FieldValue::as_node) else {
        return Ok(());
    };
    let n = graph.node(id);
    if n.element_type != "Number" {
        return Ok(());
    }
    let text = n.value().unwrap_or_default();
    if !is_integer(text) {
        return Err(format!("{what} must be an integer, found {text}"));
    }
    match text.parse::<i64>() {
        Ok(v) if v < 0 => Err(format!("{what} must not be negative, found {text}")),
        Ok(_) => Ok(()),
        Err(_) => Err(format!("{what} is out of range, found {text}")),
    }
}

fn any_present(node: &AsgNode, fields: &[&str], what: &str) -> Result<(), String> {
    if fields.iter().any(|f| node.field(f).is_some_and(|v| !v.is_absent())) {
        Ok(())
    } else {
        Err(format!("at least one {what} must be given"))
    }
}

pub fn constraints() -> ConstraintRegistry {
    ConstraintRegistry::new()
        .with("scene3d.repeat_count", |g, n| integer_field(g, n, "count", "repeat count"))
        .with("scene3d.draw_param", |g, n| integer_field(g, n, "parameter", "draw parameter"))
        .with("scene3d.any_axis", |_, n| any_present(n, &["x", "y", "z"], "of x, y, z"))
        .with("scene3d.any_channel", |_, n| {
            any_present(n, &["red", "green", "blue", "alpha"], "of red, green, blue, alpha")
        })
        .with("scene3d.rotation_axis", |g, n| {
            let axis = ["x", "y", "z"].map(|f| number(g, n, f).unwrap_or(0.0));
            if axis.iter().all(|&c| c == 0.0) {
                Err("rotation axis must not be zero".into())
            } else {
                Ok(())
            }
        })
}

pub fn language() -> Result<Language, Error> {
    Ok(Language::new(model())?.with_constraints(constraints()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_model;

    #[test]
    fn model_is_valid_with_no_warnings() {
        let report = validate_model(&model());
        assert_eq!(report.issues, []);
    }

    #[test]
    fn integers() {
        for ok in ["0", "400", "+3", "-0", "007"] {
            assert!(is_integer(ok), "{ok}");
        }
        for bad in ["2.5", "1.0", "+", ""] {
            assert!(!is_integer(bad), "{bad}");
        }
    }

    #[test]
    fn empty_scene_parses() {
        let lang = language().unwrap();
        let g = lang.graph("scene [ ]").unwrap();
        assert_eq!(g.nodes_of_type("Scene").count(), 1);
        assert_eq!(g.nodes_of_type("CompositeStatement").count(), 1);
    }

    #[test]
    fn cube_keyword_beats_defined_object() {
        let lang = language().unwrap();
        let g = lang.graph("scene [ draw cube ]").unwrap();
        assert_eq!(g.nodes_of_type("PrimitiveObject").count(), 1);
        assert_eq!(g.nodes_of_type("DefinedObject").count(), 0);
    }

    #[test]
    fn constraint_failures() {
        let lang = language().unwrap();
        for (text, constraint) in [
            ("scene [ repeat 2.5 times [ ] ]", "scene3d.repeat_count"),
            ("scene [ repeat -2 times [ ] ]", "scene3d.repeat_count"),
            ("scene [ draw cube 1.5 ]", "scene3d.draw_param"),
            ("scene [ translate ]", "scene3d.any_axis"),
            ("scene [ scale ]", "scene3d.any_axis"),
            ("scene [ rotate x 0 angle 5 ]", "scene3d.rotation_axis"),
            ("scene [ color relative ]", "scene3d.any_channel"),
        ] {
            match lang.analyze(text) {
                Err(Error::Constraints(v)) => assert_eq!(v[0].constraint, constraint, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        assert!(lang.analyze("scene [ repeat 3 times draw cube 2 ]").is_ok());
    }
}
