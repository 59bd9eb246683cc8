use asgen::model::{file, Associativity, Composition, ElementModel, Member, ModelBuilder, PatternSpec};
use asgen::{messages, scene3d};
use proptest::prelude::*;

fn shipped(name: &str) -> String {
    std::fs::read_to_string(format!("{}/models/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
fn shipped_files_match_builtins() {
    assert_eq!(shipped("scene3d.asm"), file::to_string(&scene3d::model()));
    assert_eq!(shipped("messages.asm"), file::to_string(&messages::model()));
}

#[test]
fn builtins_round_trip() {
    for model in [scene3d::model(), messages::model()] {
        let back = file::from_str(&file::to_string(&model)).unwrap();
        assert_eq!(back.elements(), model.elements());
        assert_eq!(back.start(), model.start());
    }
}

#[test]
fn header_is_required() {
    let text = file::to_string(&messages::model());
    let body = text.split_once('\n').unwrap().1;
    assert!(file::from_str(body).is_err());
    assert!(file::from_str(&format!("asm-version: 9\n{body}")).is_err());
}

prop_compose! {
    fn member()(name in "[a-z]{1,6}", optional in any::<bool>(), list in any::<bool>(), prefix in proptest::option::of("[a-z]{2,5}")) -> Member {
        let mut m = Member::new(name, "Word");
        if list { m = m.list() } else if optional { m = m.optional() }
        if let Some(p) = prefix { m = m.prefix(p) }
        m
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn generated_models_round_trip(
        members in proptest::collection::vec(member(), 1..4),
        priority in -3i32..4,
        left in any::<bool>(),
        lazy in any::<bool>(),
        keyword in "[a-z]{3,6}",
    ) {
        let mut names = std::collections::HashSet::new();
        let members: Vec<Member> = members.into_iter().filter(|m| names.insert(m.name.clone())).collect();
        let root = ElementModel::composite("Root", members)
            .prefix(keyword)
            .priority(priority)
            .associativity(if left { Associativity::Left } else { Associativity::Right })
            .composition(if lazy { Composition::Lazy } else { Composition::Eager });
        let model = ModelBuilder::new()
            .start("Root")
            .element(root)
            .element(ElementModel::basic("Word", PatternSpec::new("[A-Z]+", "value")))
            .build()
            .unwrap();
        let text = file::to_string(&model);
        let back = file::from_str(&text).unwrap();
        prop_assert_eq!(back.elements(), model.elements());
        prop_assert_eq!(file::to_string(&back), text);
    }
}
