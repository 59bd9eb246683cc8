mod common;

use asgen::earley::{disambiguate, parse, recognizes};
use asgen::grammar::Grammar;
use asgen::lex::Lexer;
use common::{spaced, toy_grammars, Toy};
use proptest::prelude::*;

fn forest_count(g: &Grammar, s: &str) -> u128 {
    let lattice = Lexer::new(g).unwrap().scan(&spaced(s)).unwrap();
    parse(g, &lattice).map(|f| f.tree_count()).unwrap_or(0)
}

#[test]
fn counts_match_enumeration_up_to_eight_tokens() {
    for toy in toy_grammars() {
        let g = toy.grammar();
        let mut accepted = 0;
        for s in toy.strings(8) {
            let expected = toy.count(&s);
            assert_eq!(forest_count(&g, &s), expected, "{} on {s:?}", toy.name);
            accepted += (expected > 0) as usize;
        }
        assert!(accepted > 1, "{} accepts almost nothing", toy.name);
    }
}

#[test]
fn catalan_numbers() {
    let toy = toy_grammars().into_iter().find(|t| t.name == "catalan").unwrap();
    let g = toy.grammar();
    let catalan = [1u128, 1, 2, 5, 14, 42, 132, 429, 1430, 4862];
    for (n, &c) in catalan.iter().enumerate() {
        assert_eq!(forest_count(&g, &"a".repeat(n + 1)), c);
    }
}

#[test]
fn recognizer_agrees_with_counts() {
    for toy in toy_grammars() {
        let g = toy.grammar();
        let lexer = Lexer::new(&g).unwrap();
        for s in toy.strings(6) {
            let lattice = lexer.scan(&spaced(&s)).unwrap();
            assert_eq!(recognizes(&g, &lattice), toy.count(&s) > 0, "{} on {s:?}", toy.name);
        }
    }
}

#[test]
fn extracted_trees_cover_the_input() {
    for toy in toy_grammars() {
        let g = toy.grammar();
        let lexer = Lexer::new(&g).unwrap();
        for s in toy.strings(6) {
            let lattice = lexer.scan(&spaced(&s)).unwrap();
            let Ok(forest) = parse(&g, &lattice) else { continue };
            match disambiguate(&forest, &g) {
                Ok(tree) => assert_eq!(tree.lexemes(tree.root()).concat(), s),
                Err(e) => assert!(forest.tree_count() > 1, "{} on {s:?}: {e}", toy.name),
            }
        }
    }
}

#[test]
fn plain_ambiguous_sum_is_reported() {
    let toy = &toy_grammars()[0];
    let g = toy.grammar();
    let lattice = Lexer::new(&g).unwrap().scan("n + n + n").unwrap();
    let err = disambiguate(&parse(&g, &lattice).unwrap(), &g).unwrap_err();
    assert_eq!(err.alternatives.len(), 2);
    assert_eq!(err.span, (0, 9));
}

/// Random sentence of the grammar by bounded expansion.
fn sentence(toy: &Toy, choices: &[u8], budget: usize) -> Option<String> {
    let mut form = vec![toy.start];
    let mut out = String::new();
    let mut steps = 0;
    while let Some(c) = form.first().copied() {
        form.remove(0);
        if !c.is_ascii_uppercase() {
            out.push(c);
            continue;
        }
        let rules: Vec<&str> = toy.rules.iter().filter(|r| r.0 == c).map(|r| r.1).collect();
        let pick = if steps < choices.len() && out.len() + form.len() < budget {
            choices[steps] as usize % rules.len()
        } else {
            // Out of budget: take the rule with fewest nonterminals.
            (0..rules.len()).min_by_key(|&i| rules[i].chars().filter(char::is_ascii_uppercase).count())?
        };
        steps += 1;
        if steps > 200 {
            return None;
        }
        form.splice(0..0, rules[pick].chars());
    }
    Some(out)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn longer_sentences_match(idx in 0usize..5, choices in proptest::collection::vec(any::<u8>(), 0..24)) {
        let toy = &toy_grammars()[idx];
        if let Some(s) = sentence(toy, &choices, 14) {
            prop_assume!(s.len() <= 14);
            let expected = toy.count(&s);
            prop_assert!(expected > 0);
            prop_assert_eq!(forest_count(&toy.grammar(), &s), expected);
        }
    }
}
