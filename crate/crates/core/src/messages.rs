//! A small built-in language of users and messages between them. Messages
//! name their sender and receiver by user number, before or after the user
//! is declared.
//!
//! ```text
//! user 1 ann
//! message from 1 to 2 "hello"
//! user 2 bob
//! ```

use crate::model::{ElementModel, Member, ModelBuilder, ModelSet, PatternSpec};
use crate::{Error, Language};

pub fn model() -> ModelSet {
    ModelBuilder::new()
        .start("Document")
        .element(ElementModel::composite("Document", vec![Member::new("items", "Item").list()]))
        .element(ElementModel::selection("Item", ["User", "Message"]))
        .element(
            ElementModel::composite("User", vec![Member::new("id", "Number"), Member::new("name", "Name")])
                .prefix("user")
                .id(["id"]),
        )
        .element(
            ElementModel::composite(
                "Message",
                vec![
                    Member::new("sender", "User").reference().prefix("from"),
                    Member::new("receiver", "User").reference().prefix("to"),
                    Member::new("content", "Text"),
                ],
            )
            .prefix("message"),
        )
        .element(ElementModel::basic("Number", PatternSpec::new("[0-9]+", "value")))
        .element(ElementModel::basic("Name", PatternSpec::new("[a-zA-Z_]+", "value")))
        .element(ElementModel::basic("Text", PatternSpec::new("\"[^\"]*\"", "value")))
        .build()
        .expect("built-in model is well formed")
}

pub fn language() -> Result<Language, Error> {
    Language::new(model())
}
