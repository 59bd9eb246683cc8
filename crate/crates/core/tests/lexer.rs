use asgen::lex::{line_col, TokenLattice};
use asgen::scene3d;
use proptest::prelude::*;

fn scan(text: &str) -> TokenLattice {
    scene3d::language().unwrap().lex(text).unwrap()
}

fn word() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("draw".to_string()),
        Just("next".to_string()),
        Just("cube".to_string()),
        Just("[".to_string()),
        Just("}".to_string()),
        "[a-z][a-z0-9_]{0,6}",
        "[+-]?[0-9]{1,3}(\\.[0-9]{1,2})?",
    ]
}

fn gap() -> impl Strategy<Value = String> {
    "[ \t\r\n]{1,3}"
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Each written word shows up as an edge spanning exactly that word,
    /// and no edge spans part of a word.
    #[test]
    fn words_become_whole_edges(parts in proptest::collection::vec((word(), gap()), 1..8)) {
        let mut text = String::new();
        let mut spans = Vec::new();
        for (w, g) in &parts {
            spans.push((text.len(), text.len() + w.len()));
            text.push_str(w);
            text.push_str(g);
        }
        let lattice = scan(&text);
        for &(s, e) in &spans {
            prop_assert!(lattice.edges().iter().any(|edge| edge.start == s && edge.end == e), "{text:?} {s}..{e}");
        }
        for edge in lattice.edges() {
            prop_assert_eq!(&text[edge.start..edge.end], edge.lexeme.as_str());
            let inside = spans.iter().find(|&&(s, e)| s <= edge.start && edge.start < e).copied();
            let (s, e) = inside.unwrap();
            // Words mixing letters or digits are never split, punctuation
            // is its own word here.
            prop_assert!(edge.start == s && edge.end == e, "{text:?}: edge {:?} in word {s}..{e}", edge);
        }
    }

    #[test]
    fn leading_whitespace_shifts_offsets(parts in proptest::collection::vec((word(), gap()), 1..6), pad in gap()) {
        let text: String = parts.iter().map(|(w, g)| format!("{w}{g}")).collect();
        let a = scan(&text);
        let b = scan(&format!("{pad}{text}"));
        let shifted: Vec<_> = a.edges().iter().map(|e| (e.start + pad.len(), e.end + pad.len(), e.token)).collect();
        let got: Vec<_> = b.edges().iter().map(|e| (e.start, e.end, e.token)).collect();
        prop_assert_eq!(shifted, got);
    }
}

#[test]
fn keyword_also_scans_as_a_name() {
    let g = scene3d::language().unwrap();
    let lattice = scan("next");
    let names: Vec<&str> = lattice.edges().iter().map(|e| g.grammar().token(e.token).name.as_str()).collect();
    assert_eq!(names.len(), 2, "{names:?}");
}

#[test]
fn numbers_take_the_longest_match() {
    let lattice = scan("-0.008");
    assert_eq!(lattice.edges().len(), 1);
    assert_eq!(lattice.edges()[0].lexeme, "-0.008");
}

#[test]
fn lex_error_position() {
    let err = scene3d::language().unwrap().lex("scene [\n  draw ? ]").unwrap_err();
    assert_eq!(err.offset(), Some(15));
    assert_eq!(line_col("scene [\n  draw ? ]", 15), (2, 8));
    assert_eq!(err.code(), "E-LEX");
}
