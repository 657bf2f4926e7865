//! Words in a free product of finite vertex groups and free edge generators.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::groups::GroupRef;

/// Where a trivial letter lives.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Home {
    Vertex(String),
    Edge(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    /// An element (by index at the active level) of a vertex group.
    Vertex { group: String, elem: usize },
    /// `edge^exp`; `exp = ±1` is an edge letter, `0` is trivial.
    Edge { edge: String, exp: i64 },
    Trivial(Home),
}

impl Atom {
    pub fn vertex(group: &str, elem: usize) -> Self {
        Atom::Vertex { group: group.to_string(), elem }
    }

    pub fn edge(edge: &str, exp: i64) -> Self {
        Atom::Edge { edge: edge.to_string(), exp }
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, Atom::Trivial(_) | Atom::Edge { exp: 0, .. })
    }
}

/// Vertex groups at the active level, keyed by group id.
#[derive(Clone, Debug, Default)]
pub struct WordContext {
    pub groups: BTreeMap<String, GroupRef>,
}

impl WordContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, id: &str, g: GroupRef) -> Self {
        self.groups.insert(id.to_string(), g);
        self
    }

    pub fn group(&self, id: &str) -> Result<&GroupRef> {
        match self.groups.get(id) {
            Some(g) => Ok(g),
            None => input(format!("no multiplication oracle for vertex group {id}")),
        }
    }

    fn check(&self, a: &Atom) -> Result<()> {
        match a {
            Atom::Vertex { group, elem } => {
                let g = self.group(group)?;
                if *elem >= g.order() {
                    return input(format!("element {elem} does not resolve in {group}"));
                }
                Ok(())
            }
            Atom::Trivial(Home::Vertex(group)) => self.group(group).map(|_| ()),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word {
    pub letters: Vec<Atom>,
}

/// A word in free-product normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ReducedWord {
    pub letters: Vec<Atom>,
}

impl From<Vec<Atom>> for Word {
    fn from(letters: Vec<Atom>) -> Self {
        Word { letters }
    }
}

impl From<ReducedWord> for Word {
    fn from(r: ReducedWord) -> Self {
        Word { letters: r.letters }
    }
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

impl ReducedWord {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn to_word(&self) -> Word {
        Word { letters: self.letters.clone() }
    }
}

/// Expands edge powers into ±1 letters and drops trivial letters.
/// Vertex letters are kept even when they are the identity element.
pub fn plain_form(w: &Word, ctx: &WordContext) -> Result<Word> {
    let mut out = Vec::with_capacity(w.len());
    for a in &w.letters {
        ctx.check(a)?;
        match a {
            Atom::Trivial(_) => {}
            Atom::Edge { edge, exp } => {
                let s = exp.signum();
                for _ in 0..exp.unsigned_abs() {
                    out.push(Atom::Edge { edge: edge.clone(), exp: s });
                }
            }
            v => out.push(v.clone()),
        }
    }
    Ok(Word { letters: out })
}

pub fn plain_length(w: &Word, ctx: &WordContext) -> Result<usize> {
    for a in &w.letters {
        ctx.check(a)?;
    }
    Ok(w
        .letters
        .iter()
        .map(|a| match a {
            Atom::Trivial(_) => 0,
            Atom::Edge { exp, .. } => exp.unsigned_abs() as usize,
            Atom::Vertex { .. } => 1,
        })
        .sum())
}

/// Free-product normal form.
pub fn reduce(w: &Word, ctx: &WordContext) -> Result<ReducedWord> {
    let mut stack: Vec<Atom> = Vec::with_capacity(w.len());
    for a in &w.letters {
        ctx.check(a)?;
        match a {
            Atom::Trivial(_) => {}
            Atom::Edge { edge, exp } => {
                let s = exp.signum();
                for _ in 0..exp.unsigned_abs() {
                    push_edge(&mut stack, edge, s);
                }
            }
            Atom::Vertex { group, elem } => {
                let g = ctx.group(group)?;
                let merged = match stack.last() {
                    Some(Atom::Vertex { group: top, elem: x }) if top == group => {
                        let y = g.mul(*x, *elem);
                        stack.pop();
                        y
                    }
                    _ => *elem,
                };
                if merged != g.identity() {
                    stack.push(Atom::Vertex { group: group.clone(), elem: merged });
                }
            }
        }
    }
    Ok(ReducedWord { letters: stack })
}

fn push_edge(stack: &mut Vec<Atom>, edge: &str, s: i64) {
    if let Some(Atom::Edge { edge: top, exp }) = stack.last() {
        if top == edge && *exp == -s {
            stack.pop();
            return;
        }
    }
    stack.push(Atom::Edge { edge: edge.to_string(), exp: s });
}

pub fn concat(a: &Word, b: &Word) -> Word {
    let mut letters = a.letters.clone();
    letters.extend(b.letters.iter().cloned());
    Word { letters }
}

pub fn invert(a: &Word, ctx: &WordContext) -> Result<Word> {
    let mut letters = Vec::with_capacity(a.len());
    for l in a.letters.iter().rev() {
        letters.push(match l {
            Atom::Vertex { group, elem } => {
                ctx.check(l)?;
                Atom::Vertex { group: group.clone(), elem: ctx.group(group)?.inv(*elem) }
            }
            Atom::Edge { edge, exp } => Atom::Edge { edge: edge.clone(), exp: -exp },
            t => t.clone(),
        });
    }
    Ok(Word { letters })
}

/// Product of reduced words.
pub fn multiply(a: &ReducedWord, b: &ReducedWord, ctx: &WordContext) -> Result<ReducedWord> {
    reduce(&concat(&a.to_word(), &b.to_word()), ctx)
}

/// Cyclically reduces a reduced word: returns `(conjugator, core)` with `word = c · core · c⁻¹`.
pub fn cyclic_core(w: &ReducedWord, ctx: &WordContext) -> Result<(ReducedWord, ReducedWord)> {
    let mut core = w.letters.clone();
    let mut left: Vec<Atom> = Vec::new();
    loop {
        if core.len() < 2 {
            break;
        }
        let (first, last) = (&core[0], &core[core.len() - 1]);
        match (first, last) {
            (Atom::Edge { edge: e1, exp: x1 }, Atom::Edge { edge: e2, exp: x2 }) if e1 == e2 && x1 == &-x2 => {
                left.push(first.clone());
                core = core[1..core.len() - 1].to_vec();
            }
            (Atom::Vertex { group: g1, .. }, Atom::Vertex { group: g2, elem }) if g1 == g2 => {
                // A y = y⁻¹ (y A) y
                let inv = ctx.group(g2)?.inv(*elem);
                left.push(Atom::Vertex { group: g2.clone(), elem: inv });
                let mut rest = vec![Atom::Vertex { group: g2.clone(), elem: *elem }];
                rest.extend(core[..core.len() - 1].iter().cloned());
                core = reduce(&Word { letters: rest }, ctx)?.letters;
            }
            _ => break,
        }
    }
    let conj = reduce(&Word { letters: left }, ctx)?;
    Ok((conj, ReducedWord { letters: core }))
}

/// Decides conjugacy of two elements of the free product; returns `h` with `a = h b h⁻¹`.
pub fn conjugator(a: &ReducedWord, b: &ReducedWord, ctx: &WordContext) -> Result<Option<ReducedWord>> {
    let (ca, ka) = cyclic_core(a, ctx)?;
    let (cb, kb) = cyclic_core(b, ctx)?;
    if ka.len() != kb.len() {
        return Ok(None);
    }
    let n = ka.len();
    // k_a = r · k_b · r⁻¹ with r found below; then a = ca ka ca⁻¹ = (ca r cb⁻¹) b (..)⁻¹
    let mut r: Option<ReducedWord> = None;
    if n == 0 {
        r = Some(ReducedWord::default());
    } else if n == 1 {
        match (&ka.letters[0], &kb.letters[0]) {
            (Atom::Vertex { group: g1, elem: x }, Atom::Vertex { group: g2, elem: y }) if g1 == g2 => {
                let g = ctx.group(g1)?;
                if let Some(t) = (0..g.order()).find(|&t| g.conj(t, *y) == *x) {
                    r = reduce(&Word { letters: vec![Atom::vertex(g1, t)] }, ctx).ok();
                }
            }
            (x, y) if x == y => r = Some(ReducedWord::default()),
            _ => {}
        }
    } else {
        // cyclically reduced words of length >= 2 are conjugate iff cyclic rotations
        for shift in 0..n {
            let rotated: Vec<Atom> = kb.letters[shift..].iter().chain(&kb.letters[..shift]).cloned().collect();
            if rotated == ka.letters {
                // rotated = p⁻¹ kb p with p = kb[..shift]
                let p = Word { letters: kb.letters[..shift].to_vec() };
                r = Some(reduce(&invert(&p, ctx)?, ctx)?);
                break;
            }
        }
    }
    let Some(r) = r else { return Ok(None) };
    let h = reduce(
        &concat(&concat(&ca.to_word(), &r.to_word()), &invert(&cb.to_word(), ctx)?),
        ctx,
    )?;
    Ok(Some(h))
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Vertex { group, elem } => write!(f, "{group}[{elem}]"),
            Atom::Edge { edge, exp: 1 } => write!(f, "{edge}"),
            Atom::Edge { edge, exp } => write!(f, "{edge}^{exp}"),
            Atom::Trivial(Home::Vertex(g)) => write!(f, "1_{g}"),
            Atom::Trivial(Home::Edge(e)) => write!(f, "1_{e}"),
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_word().fmt(f)
    }
}

// ---- JSON letter records ----

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LetterRecord {
    Vertex { group: String, elem: String },
    Edge { edge: String, exp: i64 },
    Trivial {
        #[serde(skip_serializing_if = "Option::is_none", default)]
        group: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        edge: Option<String>,
    },
}

pub fn word_from_records(records: &[LetterRecord], ctx: &WordContext) -> Result<Word> {
    let mut letters = Vec::with_capacity(records.len());
    for r in records {
        letters.push(match r {
            LetterRecord::Vertex { group, elem } => {
                let g = ctx.group(group)?;
                match g.index_of(elem) {
                    Some(i) => Atom::vertex(group, i),
                    None => return input(format!("element {elem} not found in {group}")),
                }
            }
            LetterRecord::Edge { edge, exp } => Atom::edge(edge, *exp),
            LetterRecord::Trivial { group: Some(g), edge: None } => Atom::Trivial(Home::Vertex(g.clone())),
            LetterRecord::Trivial { group: None, edge: Some(e) } => Atom::Trivial(Home::Edge(e.clone())),
            LetterRecord::Trivial { .. } => return input("trivial letter needs exactly one of group/edge"),
        });
    }
    Ok(Word { letters })
}

pub fn word_to_records(w: &Word, ctx: &WordContext) -> Result<Vec<LetterRecord>> {
    w.letters
        .iter()
        .map(|a| {
            Ok(match a {
                Atom::Vertex { group, elem } => {
                    ctx.check(a)?;
                    LetterRecord::Vertex { group: group.clone(), elem: ctx.group(group)?.name(*elem).to_string() }
                }
                Atom::Edge { edge, exp } => LetterRecord::Edge { edge: edge.clone(), exp: *exp },
                Atom::Trivial(Home::Vertex(g)) => LetterRecord::Trivial { group: Some(g.clone()), edge: None },
                Atom::Trivial(Home::Edge(e)) => LetterRecord::Trivial { group: None, edge: Some(e.clone()) },
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{arc, FiniteGroup};

    fn ctx() -> WordContext {
        WordContext::new()
            .with("v", arc(FiniteGroup::cyclic(4)))
            .with("w", arc(FiniteGroup::symmetric(3)))
    }

    fn sample() -> Word {
        vec![
            Atom::vertex("v", 1),
            Atom::edge("e1", 2),
            Atom::edge("e2", -3),
            Atom::vertex("w", 1),
            Atom::Trivial(Home::Edge("e3".into())),
        ]
        .into()
    }

    #[test]
    fn plain_form_expands_powers() {
        let c = ctx();
        let p = plain_form(&sample(), &c).unwrap();
        assert_eq!(p.len(), 7);
        assert_eq!(plain_length(&sample(), &c).unwrap(), 7);
        assert_eq!(p.letters[1], Atom::edge("e1", 1));
        assert_eq!(p.letters[4], Atom::edge("e2", -1));
        let cube: Word = vec![Atom::edge("e", 3)].into();
        assert_eq!(plain_form(&cube, &c).unwrap().letters, vec![Atom::edge("e", 1); 3]);
        assert_eq!(plain_length(&Word::empty(), &c).unwrap(), 0);
    }

    #[test]
    fn reduce_examples() {
        let c = ctx();
        let w: Word = vec![Atom::vertex("v", 1), Atom::vertex("v", 2)].into();
        assert_eq!(reduce(&w, &c).unwrap().letters, vec![Atom::vertex("v", 3)]);
        let w: Word = vec![Atom::vertex("v", 1), Atom::vertex("v", 3)].into();
        assert!(reduce(&w, &c).unwrap().is_empty());
        let w: Word = vec![Atom::edge("e", 1), Atom::edge("e", -1)].into();
        assert!(reduce(&w, &c).unwrap().is_empty());
        let missing: Word = vec![Atom::vertex("u", 0)].into();
        assert!(reduce(&missing, &c).is_err());
    }

    #[test]
    fn invert_reverses() {
        let c = ctx();
        let w: Word = vec![Atom::vertex("v", 1), Atom::edge("e", 1)].into();
        let inv = invert(&w, &c).unwrap();
        assert_eq!(inv.letters, vec![Atom::edge("e", -1), Atom::vertex("v", 3)]);
        assert!(reduce(&concat(&w, &inv), &c).unwrap().is_empty());
        assert_eq!(concat(&w, &Word::empty()), w);
    }

    #[test]
    fn conjugacy_in_free_product() {
        let c = ctx();
        let a = reduce(&vec![Atom::edge("e", 1), Atom::vertex("v", 1)].into(), &c).unwrap();
        let h = reduce(&vec![Atom::vertex("w", 2), Atom::edge("f", 1)].into(), &c).unwrap();
        let conj = reduce(
            &concat(&concat(&h.to_word(), &a.to_word()), &invert(&h.to_word(), &c).unwrap()),
            &c,
        )
        .unwrap();
        let found = conjugator(&conj, &a, &c).unwrap().expect("conjugate");
        let check = reduce(
            &concat(&concat(&found.to_word(), &a.to_word()), &invert(&found.to_word(), &c).unwrap()),
            &c,
        )
        .unwrap();
        assert_eq!(check, conj);
        let other = reduce(&vec![Atom::edge("e", 1), Atom::vertex("v", 2)].into(), &c).unwrap();
        assert!(conjugator(&other, &a, &c).unwrap().is_none());
    }

    #[test]
    fn records_roundtrip() {
        let c = ctx();
        let json = r#"[{"kind":"vertex","group":"w","elem":"(1 2)"},{"kind":"edge","edge":"e2","exp":-3},{"kind":"trivial","edge":"e3"}]"#;
        let recs: Vec<LetterRecord> = serde_json::from_str(json).unwrap();
        let w = word_from_records(&recs, &c).unwrap();
        assert_eq!(plain_length(&w, &c).unwrap(), 4);
        assert_eq!(word_to_records(&w, &c).unwrap(), recs);
    }
}
