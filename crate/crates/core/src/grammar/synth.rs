use std::collections::HashMap;

use thiserror::Error;

use super::{Grammar, NtId, NtKind, Origin, OwnerId, Parts, Symbol, SymbolRole};
use crate::model::{validate_model, ElementId, ElementKind, Maximum, Member, ModelSet};

pub const DEFAULT_FREE_ORDER_BOUND: usize = 5;

#[derive(Debug, Clone, Copy)]
pub struct SynthesisOptions {
    /// Largest free-order group that is expanded into permutations.
    pub free_order_bound: usize,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            free_order_bound: DEFAULT_FREE_ORDER_BOUND,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthesisError {
    #[error("model has {0} validation error(s)")]
    InvalidModel(usize),
    #[error("free-order group `{group}` of `{element}` has {size} members (bound is {bound})")]
    FreeOrderTooLarge {
        element: String,
        group: String,
        size: usize,
        bound: usize,
    },
}

type Fragment = Vec<(Symbol, SymbolRole)>;

pub fn synthesize(m: &ModelSet) -> Result<Grammar, SynthesisError> {
    synthesize_with(m, &SynthesisOptions::default())
}

/// Translates a validated model into a grammar.
///
/// Productions are emitted element by element in declaration order: the
/// element's own productions first, then its reference production, then the
/// auxiliary productions its members need.
pub fn synthesize_with(m: &ModelSet, options: &SynthesisOptions) -> Result<Grammar, SynthesisError> {
    let report = validate_model(m);
    if !report.is_usable() {
        return Err(SynthesisError::InvalidModel(report.error_count()));
    }
    let mut s = Synth {
        model: m,
        options,
        parts: Parts::default(),
        full: Vec::new(),
        refs: Vec::new(),
        owners: Vec::new(),
        aux: HashMap::new(),
    };
    for id in m.ids() {
        let e = m.element(id);
        s.full.push(s.parts.nonterminal(&e.name, NtKind::Element, Some(&e.name), None));
        s.owners.push(s.parts.owner(&e.name, e.disambiguation));
    }
    for id in m.ids() {
        let e = m.element(id);
        let r = (!e.id_members.is_empty())
            .then(|| s.parts.nonterminal(&format!("Ref({})", e.name), NtKind::Reference, Some(&e.name), None));
        s.refs.push(r);
    }
    for id in m.ids() {
        s.element(id)?;
    }
    let start = s.full[m.start().0];
    Ok(s.parts.finish(start))
}

struct Synth<'a> {
    model: &'a ModelSet,
    options: &'a SynthesisOptions,
    parts: Parts,
    full: Vec<NtId>,
    refs: Vec<Option<NtId>>,
    owners: Vec<OwnerId>,
    aux: HashMap<(usize, usize, u32), NtId>,
}

impl Synth<'_> {
    fn literals(&mut self, tokens: &[String]) -> Fragment {
        tokens
            .iter()
            .map(|t| (self.parts.literal(t), SymbolRole::Syntax))
            .collect()
    }

    fn element(&mut self, id: ElementId) -> Result<(), SynthesisError> {
        let e = self.model.element(id);
        let lhs = self.full[id.0];
        let owner = self.owners[id.0];
        let prefix = self.literals(&e.prefixes);
        let suffix = self.literals(&e.suffixes);
        let wrap = |body: Fragment| -> Fragment {
            prefix.iter().cloned().chain(body).chain(suffix.iter().cloned()).collect()
        };
        match &e.kind {
            ElementKind::Basic { pattern } => {
                let token = self.parts.pattern(&e.name, pattern);
                self.parts.push(lhs, wrap(vec![(token, SymbolRole::Value)]), Origin::TokenWrap, owner);
            }
            ElementKind::Selection { .. } => {
                for &alt in self.model.alternative_targets(id) {
                    let sym = Symbol::Nt(self.full[alt.0]);
                    self.parts
                        .push(lhs, wrap(vec![(sym, SymbolRole::Alternative)]), Origin::SelectionAlt, owner);
                }
            }
            ElementKind::Composite { members } => {
                let segments = self.segments(id, members)?;
                let free_order = segments.iter().any(|s| s.len() > 1)
                    || members.iter().any(|m| m.free_order_group.is_some());
                let origin = if free_order { Origin::FreeOrderPerm } else { Origin::Composite };
                for body in cross_product(&segments) {
                    self.parts.push(lhs, wrap(body), origin, owner);
                }
            }
        }
        if let Some(r) = self.refs[id.0] {
            let mut body = Fragment::new();
            for name in &e.id_members {
                let mi = e.member_index(name).expect("validated @ID member");
                let frag = self.member_fragment(id, mi, SymbolRole::IdMember(mi));
                body.extend(frag);
            }
            self.parts.push(r, body, Origin::Reference, owner);
        }
        Ok(())
    }

    /// Splits a composite's members into segments: a plain member is a
    /// segment with a single alternative, a free-order group is a segment
    /// with one alternative per permutation of its present members.
    fn segments(&mut self, id: ElementId, members: &[Member]) -> Result<Vec<Vec<Fragment>>, SynthesisError> {
        let mut segments = Vec::new();
        let mut i = 0;
        while i < members.len() {
            match &members[i].free_order_group {
                None => {
                    segments.push(vec![self.member_fragment(id, i, SymbolRole::Member(i))]);
                    i += 1;
                }
                Some(group) => {
                    let end = i + members[i..]
                        .iter()
                        .take_while(|m| m.free_order_group.as_ref() == Some(group))
                        .count();
                    segments.push(self.permute_free_order(id, i..end)?);
                    i = end;
                }
            }
        }
        Ok(segments)
    }

    /// One alternative per (subset of present optional members, ordering of
    /// the present members). Absent optionals contribute nothing, so no two
    /// alternatives derive the same token sequence through the same members.
    fn permute_free_order(
        &mut self,
        id: ElementId,
        range: std::ops::Range<usize>,
    ) -> Result<Vec<Fragment>, SynthesisError> {
        let e = self.model.element(id);
        let members = &e.members()[range.clone()];
        if members.len() > self.options.free_order_bound {
            return Err(SynthesisError::FreeOrderTooLarge {
                element: e.name.clone(),
                group: members[0].free_order_group.clone().unwrap_or_default(),
                size: members.len(),
                bound: self.options.free_order_bound,
            });
        }
        let present: Vec<Fragment> = range
            .clone()
            .map(|mi| self.present_fragment(id, mi))
            .collect();
        let optional: Vec<usize> = (0..members.len()).filter(|&k| members[k].minimum == 0).collect();
        let mut alternatives = Vec::new();
        for mask in 0u32..(1 << optional.len()) {
            let included: Vec<usize> = (0..members.len())
                .filter(|&k| match optional.iter().position(|&o| o == k) {
                    Some(bit) => mask & (1 << bit) != 0,
                    None => true,
                })
                .collect();
            for order in permutations(&included) {
                alternatives.push(order.iter().flat_map(|&k| present[k].iter().cloned()).collect());
            }
        }
        Ok(alternatives)
    }

    fn item_symbol(&self, id: ElementId, mi: usize) -> Symbol {
        let member = &self.model.element(id).members()[mi];
        let target = self.model.member_targets(id)[mi];
        if member.is_reference {
            Symbol::Nt(self.refs[target.0].expect("validated reference target"))
        } else {
            Symbol::Nt(self.full[target.0])
        }
    }

    fn member_fragment(&mut self, id: ElementId, mi: usize, role: SymbolRole) -> Fragment {
        let member = &self.model.element(id).members()[mi];
        if member.is_single() {
            let mut frag = self.literals(&member.prefixes);
            frag.push((self.item_symbol(id, mi), role));
            frag.extend(self.literals(&member.suffixes));
            frag
        } else {
            let min = member.minimum;
            vec![(Symbol::Nt(self.expand_multiplicity(id, mi, min)), role)]
        }
    }

    /// Syntax of a free-order member when it is present.
    fn present_fragment(&mut self, id: ElementId, mi: usize) -> Fragment {
        let member = &self.model.element(id).members()[mi];
        if member.is_repeated() {
            let min = member.minimum.max(1);
            vec![(Symbol::Nt(self.expand_multiplicity(id, mi, min)), SymbolRole::Member(mi))]
        } else {
            let mut frag = self.literals(&member.prefixes);
            frag.push((self.item_symbol(id, mi), SymbolRole::Member(mi)));
            frag.extend(self.literals(&member.suffixes));
            frag
        }
    }

    /// Auxiliary nonterminal accepting between `min` and the member's
    /// maximum items. Separators sit only between consecutive items; the
    /// member's prefixes and suffixes wrap the whole occurrence and vanish
    /// with it when zero items are present.
    fn expand_multiplicity(&mut self, id: ElementId, mi: usize, min: u32) -> NtId {
        if let Some(&nt) = self.aux.get(&(id.0, mi, min)) {
            return nt;
        }
        let e = self.model.element(id);
        let member = &e.members()[mi];
        let owner = self.owners[id.0];
        let base = format!("{}.{}", e.name, member.name);
        let item = (self.item_symbol(id, mi), SymbolRole::Item);
        let sep = self.literals(&member.separators);
        let prefix = self.literals(&member.prefixes);
        let suffix = self.literals(&member.suffixes);
        let (elem, mname) = (e.name.clone(), member.name.clone());
        let maximum = member.maximum;
        let nt = |parts: &mut Parts, name: &str| {
            parts.nonterminal(name, NtKind::Auxiliary, Some(&elem), Some(&mname))
        };

        let delimited = !prefix.is_empty() || !suffix.is_empty();
        if min == 0 && maximum == Maximum::Bounded(1) {
            let m = nt(&mut self.parts, &base);
            self.parts.push(m, Vec::new(), Origin::Repetition, owner);
            let body = prefix.iter().cloned().chain([item]).chain(suffix).collect();
            self.parts.push(m, body, Origin::Repetition, owner);
            self.aux.insert((id.0, mi, min), m);
            return m;
        }

        let top_is_member = min >= 1 && !delimited;
        let lo = min.max(1);
        let top_name = if top_is_member { base.clone() } else { format!("{base}:items") };
        let items_then_sep = |n: u32| -> Fragment {
            (0..n).flat_map(|_| std::iter::once(item).chain(sep.iter().cloned())).collect()
        };
        let list = match maximum {
            Maximum::Unbounded => {
                let tail_name = if lo == 1 { top_name.clone() } else { format!("{base}:list") };
                let tail = nt(&mut self.parts, &tail_name);
                self.parts.push(tail, vec![item], Origin::Repetition, owner);
                let rec = items_then_sep(1).into_iter().chain([(Symbol::Nt(tail), SymbolRole::Rest)]).collect();
                self.parts.push(tail, rec, Origin::Repetition, owner);
                if lo == 1 {
                    tail
                } else {
                    let top = nt(&mut self.parts, &top_name);
                    let body = items_then_sep(lo - 1)
                        .into_iter()
                        .chain([(Symbol::Nt(tail), SymbolRole::Rest)])
                        .collect();
                    self.parts.push(top, body, Origin::Repetition, owner);
                    top
                }
            }
            Maximum::Bounded(hi) => {
                // upto[k] accepts 1..=k items.
                let span = hi - lo + 1;
                let mut below: Option<NtId> = None;
                for k in 1..=span {
                    let name = if k == span && lo == 1 { top_name.clone() } else { format!("{base}:upto{k}") };
                    let upto = nt(&mut self.parts, &name);
                    self.parts.push(upto, vec![item], Origin::Repetition, owner);
                    if let Some(prev) = below {
                        let rec = items_then_sep(1).into_iter().chain([(Symbol::Nt(prev), SymbolRole::Rest)]).collect();
                        self.parts.push(upto, rec, Origin::Repetition, owner);
                    }
                    below = Some(upto);
                }
                let chain = below.expect("span is at least one");
                if lo == 1 {
                    chain
                } else {
                    let top = nt(&mut self.parts, &top_name);
                    let body = items_then_sep(lo - 1)
                        .into_iter()
                        .chain([(Symbol::Nt(chain), SymbolRole::Rest)])
                        .collect();
                    self.parts.push(top, body, Origin::Repetition, owner);
                    top
                }
            }
        };
        let member_nt = if top_is_member {
            list
        } else {
            let m = nt(&mut self.parts, &base);
            if min == 0 {
                self.parts.push(m, Vec::new(), Origin::Repetition, owner);
            }
            let body = prefix
                .into_iter()
                .chain([(Symbol::Nt(list), SymbolRole::Rest)])
                .chain(suffix)
                .collect();
            self.parts.push(m, body, Origin::Repetition, owner);
            m
        };
        self.aux.insert((id.0, mi, min), member_nt);
        member_nt
    }
}

fn cross_product(segments: &[Vec<Fragment>]) -> Vec<Fragment> {
    let mut acc: Vec<Fragment> = vec![Vec::new()];
    for seg in segments {
        acc = acc
            .iter()
            .flat_map(|prefix| {
                seg.iter().map(move |alt| prefix.iter().cloned().chain(alt.iter().cloned()).collect())
            })
            .collect();
    }
    acc
}

/// All orderings of `items`, in lexicographic order of positions.
fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        let rest: Vec<usize> = items.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
        for mut tail in permutations(&rest) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}
