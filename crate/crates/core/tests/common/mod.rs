//! Reference implementations the library is checked against. Nothing here
//! calls into the parser or the evaluator.

#![allow(dead_code)]

use std::collections::HashMap;

use asgen::asg::{FieldValue, InstanceGraph};
use asgen::grammar::{Grammar, GrammarBuilder};

pub fn corpus(name: &str) -> String {
    let path = format!("{}/corpus/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn manifest_path(rel: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

/// A context-free grammar over single-character terminals. Uppercase
/// letters are nonterminals, everything else is a terminal.
#[derive(Clone, Debug)]
pub struct Toy {
    pub name: &'static str,
    pub start: char,
    pub rules: Vec<(char, &'static str)>,
    pub alphabet: &'static str,
}

fn is_nt(c: char) -> bool {
    c.is_ascii_uppercase()
}

impl Toy {
    /// The same grammar in the library's representation; terminals become
    /// literal tokens, one owner per rule.
    pub fn grammar(&self) -> Grammar {
        let mut b = GrammarBuilder::new(self.start.to_string());
        for (i, (lhs, rhs)) in self.rules.iter().enumerate() {
            let syms: Vec<String> = rhs
                .chars()
                .map(|c| if is_nt(c) { c.to_string() } else { format!("'{c}'") })
                .collect();
            let refs: Vec<&str> = syms.iter().map(String::as_str).collect();
            b = b.rule(format!("r{i}"), lhs.to_string(), &refs);
        }
        b.build().unwrap()
    }

    /// Shortest terminal yield of each nonterminal, by fixpoint.
    fn min_yield(&self) -> HashMap<char, usize> {
        let mut best: HashMap<char, usize> = HashMap::new();
        loop {
            let mut changed = false;
            for &(lhs, rhs) in &self.rules {
                let cost: Option<usize> = rhs
                    .chars()
                    .map(|c| if is_nt(c) { best.get(&c).copied() } else { Some(1) })
                    .sum();
                if let Some(cost) = cost {
                    if best.get(&lhs).is_none_or(|&b| cost < b) {
                        best.insert(lhs, cost);
                        changed = true;
                    }
                }
            }
            if !changed {
                return best;
            }
        }
    }

    /// Number of distinct leftmost derivations of `input`, by exhaustive
    /// enumeration of sentential forms. Forms that already need more
    /// terminals than the input has are pruned, so grammars must not have
    /// unit cycles or nonterminals that derive only themselves.
    pub fn count(&self, input: &str) -> u128 {
        let target: Vec<char> = input.chars().collect();
        let min = self.min_yield();
        let mut memo = HashMap::new();
        self.count_form(&[self.start], 0, &target, &min, &mut memo)
    }

    fn count_form(
        &self,
        form: &[char],
        done: usize,
        target: &[char],
        min: &HashMap<char, usize>,
        memo: &mut HashMap<(Vec<char>, usize), u128>,
    ) -> u128 {
        // Consume the leading terminals.
        let mut i = 0;
        let mut done = done;
        while i < form.len() && !is_nt(form[i]) {
            if target.get(done) != Some(&form[i]) {
                return 0;
            }
            done += 1;
            i += 1;
        }
        let form = &form[i..];
        if form.is_empty() {
            return (done == target.len()) as u128;
        }
        let needed: usize = form.iter().map(|c| if is_nt(*c) { min[c] } else { 1 }).sum();
        if done + needed > target.len() {
            return 0;
        }
        let key = (form.to_vec(), done);
        if let Some(&n) = memo.get(&key) {
            return n;
        }
        let mut total = 0u128;
        for &(lhs, rhs) in &self.rules {
            if lhs != form[0] {
                continue;
            }
            let mut next: Vec<char> = rhs.chars().collect();
            next.extend_from_slice(&form[1..]);
            total += self.count_form(&next, done, target, min, memo);
        }
        memo.insert(key, total);
        total
    }

    /// Every string over the alphabet of at most `max` symbols.
    pub fn strings(&self, max: usize) -> Vec<String> {
        let letters: Vec<char> = self.alphabet.chars().collect();
        let mut out = vec![String::new()];
        let mut layer = vec![String::new()];
        for _ in 0..max {
            layer = layer
                .iter()
                .flat_map(|s| letters.iter().map(move |c| format!("{s}{c}")))
                .collect();
            out.extend(layer.iter().cloned());
        }
        out
    }
}

/// Space-separated so every character scans as its own token.
pub fn spaced(s: &str) -> String {
    s.chars().map(String::from).collect::<Vec<_>>().join(" ")
}

pub fn toy_grammars() -> Vec<Toy> {
    vec![
        Toy {
            name: "ambiguous sum",
            start: 'E',
            rules: vec![('E', "E+E"), ('E', "n")],
            alphabet: "n+",
        },
        Toy {
            name: "balanced parentheses",
            start: 'S',
            rules: vec![('S', "(S)S"), ('S', "")],
            alphabet: "()",
        },
        Toy {
            name: "layered expressions",
            start: 'E',
            rules: vec![('E', "E+T"), ('E', "T"), ('T', "T*F"), ('T', "F"), ('F', "x")],
            alphabet: "x+*",
        },
        Toy {
            name: "nullable split",
            start: 'S',
            rules: vec![('S', "XY"), ('X', "aX"), ('X', ""), ('Y', "aY"), ('Y', "b"), ('Y', "")],
            alphabet: "ab",
        },
        Toy {
            name: "catalan",
            start: 'E',
            rules: vec![('E', "EE"), ('E', "a")],
            alphabet: "a",
        },
    ]
}

/// Cubes a scene3d program emits, counted by recursion over the program
/// structure alone: no matrices or colours. `per_def` memoises the count
/// of one invocation of a definition at parameter `p`.
pub fn cube_count(g: &InstanceGraph) -> u128 {
    fn list(g: &InstanceGraph, node: usize) -> Vec<usize> {
        g.node(node)
            .field("statements")
            .and_then(FieldValue::as_list)
            .unwrap()
            .iter()
            .map(|v| g.target(v).unwrap())
            .collect()
    }
    fn stmt(g: &InstanceGraph, node: usize, p: Option<u64>, memo: &mut HashMap<(usize, u64), u128>) -> u128 {
        let n = g.node(node);
        match n.element_type.as_str() {
            "ScopedStatement" | "CompositeStatement" => list(g, node).into_iter().map(|c| stmt(g, c, p, memo)).sum(),
            "RepeatStatement" => {
                let count: u128 = g.node(g.target(n.field("count").unwrap()).unwrap()).value().unwrap().parse().unwrap();
                count * stmt(g, g.target(n.field("body").unwrap()).unwrap(), p, memo)
            }
            "DrawStatement" => {
                let arg = match n.field("parameter").unwrap() {
                    FieldValue::Absent => 1,
                    v => {
                        let a = g.node(g.target(v).unwrap());
                        if a.element_type == "NextParameter" {
                            p.unwrap() - 1
                        } else {
                            a.value().unwrap().parse().unwrap()
                        }
                    }
                };
                if arg == 0 {
                    return 0;
                }
                let object = g.node(g.target(n.field("object").unwrap()).unwrap());
                if object.element_type == "PrimitiveObject" {
                    return 1;
                }
                let def = g.target(object.field("definition").unwrap()).unwrap();
                if let Some(&c) = memo.get(&(def, arg)) {
                    return c;
                }
                let body = g.target(g.node(def).field("body").unwrap()).unwrap();
                // Parameters only fall, so evaluate bottom-up to keep the
                // recursion shallow.
                for q in 1..arg {
                    if !memo.contains_key(&(def, q)) {
                        let c = stmt(g, body, Some(q), memo);
                        memo.insert((def, q), c);
                    }
                }
                let c = stmt(g, body, Some(arg), memo);
                memo.insert((def, arg), c);
                c
            }
            _ => 0,
        }
    }
    let mut memo = HashMap::new();
    g.nodes_of_type("Scene")
        .map(|s| stmt(g, g.target(s.field("body").unwrap()).unwrap(), None, &mut memo))
        .sum()
}

/// Structural rendering of a node without ids or spans, so nodes from
/// different sources can be compared.
pub fn shape(g: &InstanceGraph, node: usize) -> String {
    fn value(g: &InstanceGraph, v: &FieldValue) -> String {
        match v {
            FieldValue::Scalar(s) => format!("{s:?}"),
            FieldValue::Node(n) => shape(g, *n),
            FieldValue::Ref(r) => format!("&{}{:?}", r.target_type, r.key),
            FieldValue::List(items) => format!("[{}]", items.iter().map(|i| value(g, i)).collect::<Vec<_>>().join(", ")),
            FieldValue::Absent => "-".into(),
        }
    }
    let n = g.node(node);
    let fields: Vec<String> = n.fields.iter().map(|(k, v)| format!("{k}={}", value(g, v))).collect();
    format!("{}({})", n.element_type, fields.join(" "))
}
