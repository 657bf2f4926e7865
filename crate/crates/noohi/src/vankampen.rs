//! Van Kampen presentations built from a 2-complex with group data, evaluated by counting
//! homomorphisms into finite groups.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexes::{spanning_tree, validate_group_data, GraphWithTree, GroupData, TwoComplex};
use crate::error::{input, Error, Result};
use crate::groups::{arc, homomorphisms, named, FiniteHom, GroupRef};
use crate::words::{
    cyclic_core, invert, reduce, word_from_records, word_to_records, Atom, Home, LetterRecord, ReducedWord, Word,
    WordContext,
};

pub const DEFAULT_BUDGET: u128 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RelationKind {
    /// Edge relation for `edge` and the edge-group element `generator`.
    R1 { edge: String, generator: usize },
    /// Face relation.
    R2 { face: String },
    Extra,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    pub kind: RelationKind,
    pub word: Word,
}

/// Generators: every vertex group (with its own relations) and the edges off the tree.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub vertex_groups: BTreeMap<String, GroupRef>,
    pub edge_generators: Vec<String>,
    pub relations: Vec<Relation>,
}

/// Which edge-group elements instantiate the edge relations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeRelations {
    Generators,
    AllElements,
}

impl Presentation {
    pub fn context(&self) -> WordContext {
        WordContext { groups: self.vertex_groups.clone() }
    }

    pub fn r1(&self) -> impl Iterator<Item = &Relation> {
        self.relations.iter().filter(|r| matches!(r.kind, RelationKind::R1 { .. }))
    }

    pub fn r2(&self) -> impl Iterator<Item = &Relation> {
        self.relations.iter().filter(|r| matches!(r.kind, RelationKind::R2 { .. }))
    }

    /// Free product of two presentations on disjoint generator names.
    pub fn free_product(&self, other: &Presentation) -> Result<Presentation> {
        let mut p = self.clone();
        for (v, g) in &other.vertex_groups {
            if p.vertex_groups.insert(v.clone(), g.clone()).is_some() {
                return input(format!("vertex {v} occurs in both factors"));
            }
        }
        for e in &other.edge_generators {
            if p.edge_generators.contains(e) {
                return input(format!("edge {e} occurs in both factors"));
            }
            p.edge_generators.push(e.clone());
        }
        p.relations.extend(other.relations.iter().cloned());
        Ok(p)
    }

    pub fn free(rank: usize) -> Presentation {
        Presentation {
            vertex_groups: BTreeMap::new(),
            edge_generators: (0..rank).map(|i| format!("x{i}")).collect(),
            relations: Vec::new(),
        }
    }

    pub fn to_record(&self) -> Result<PresentationRecord> {
        let ctx = self.context();
        Ok(PresentationRecord {
            vertex_groups: self.vertex_groups.iter().map(|(v, g)| (v.clone(), g.label().to_string())).collect(),
            edges: self.edge_generators.clone(),
            relations: self
                .relations
                .iter()
                .map(|r| Ok(RelationRecord { kind: r.kind.clone(), word: word_to_records(&r.word, &ctx)? }))
                .collect::<Result<_>>()?,
        })
    }

    pub fn from_record(rec: &PresentationRecord) -> Result<Presentation> {
        let mut vertex_groups = BTreeMap::new();
        for (v, name) in &rec.vertex_groups {
            let g = named(name).ok_or_else(|| Error::Input(format!("unknown group {name}")))?;
            vertex_groups.insert(v.clone(), arc(g));
        }
        let ctx = WordContext { groups: vertex_groups.clone() };
        let relations = rec
            .relations
            .iter()
            .map(|r| Ok(Relation { kind: r.kind.clone(), word: word_from_records(&r.word, &ctx)? }))
            .collect::<Result<Vec<_>>>()?;
        for r in &relations {
            for a in &r.word.letters {
                if let Atom::Edge { edge, .. } = a {
                    if !rec.edges.contains(edge) {
                        return input(format!("relation uses unknown edge generator {edge}"));
                    }
                }
            }
        }
        Ok(Presentation { vertex_groups, edge_generators: rec.edges.clone(), relations })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelationRecord {
    pub kind: RelationKind,
    pub word: Vec<LetterRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PresentationRecord {
    pub vertex_groups: BTreeMap<String, String>,
    pub edges: Vec<String>,
    #[serde(default)]
    pub relations: Vec<RelationRecord>,
}

fn edge_letter(tree: &GraphWithTree, e: &str, exp: i64) -> Atom {
    if tree.in_tree(e) {
        Atom::Trivial(Home::Edge(e.to_string()))
    } else {
        Atom::edge(e, exp)
    }
}

/// `R1(e, g) = 𝒢(∂₁)(g) · e · 𝒢(∂₀)(g)⁻¹ · e⁻¹`
pub fn edge_relation(c: &TwoComplex, d: &GroupData, tree: &GraphWithTree, e: &str, g: usize) -> Result<Word> {
    let rec = c.edge(e)?;
    let v0 = d.vertex_group(&rec.d0)?;
    Ok(Word {
        letters: vec![
            Atom::vertex(&rec.d1, d.edge_map(e, 1)?.apply(g)),
            edge_letter(tree, e, 1),
            Atom::vertex(&rec.d0, v0.inv(d.edge_map(e, 0)?.apply(g))),
            edge_letter(tree, e, -1),
        ],
    })
}

/// `R2(f) = e₂ α₁₀₂ α₁₂₀⁻¹ e₀ α₂₁₀ α₂₀₁⁻¹ e₁⁻¹ α₀₂₁ α₀₁₂⁻¹` with `e_k = ∂_k f`.
pub fn face_relation(c: &TwoComplex, d: &GroupData, tree: &GraphWithTree, f: &str) -> Result<Word> {
    let alpha = |k: u8, j: u8, inverse: bool| -> Result<Atom> {
        let v = c.edge_end(c.face_side(f, k)?, j)?;
        let g = d.vertex_group(v)?;
        let a = d.alpha(f, k, j)?;
        Ok(Atom::vertex(v, if inverse { g.inv(a) } else { a }))
    };
    Ok(Word {
        letters: vec![
            edge_letter(tree, c.face_side(f, 2)?, 1),
            alpha(2, 0, false)?,
            alpha(0, 1, true)?,
            edge_letter(tree, c.face_side(f, 0)?, 1),
            alpha(0, 0, false)?,
            alpha(1, 0, true)?,
            edge_letter(tree, c.face_side(f, 1)?, -1),
            alpha(1, 1, false)?,
            alpha(2, 1, true)?,
        ],
    })
}

pub fn build_presentation(
    c: &TwoComplex,
    d: &GroupData,
    tree: &GraphWithTree,
    mode: EdgeRelations,
) -> Result<Presentation> {
    c.validate()?;
    let fails = validate_group_data(c, d)?;
    if let Some(f) = fails.first() {
        return input(format!("group data square fails at ({}, {}, {})", f.face, f.side, f.end));
    }
    let mut relations = Vec::new();
    for e in &c.edges {
        let ge = d.edge_group(&e.id)?;
        let elems: Vec<usize> = match mode {
            EdgeRelations::Generators => ge.generators().to_vec(),
            EdgeRelations::AllElements => (0..ge.order()).collect(),
        };
        for g in elems {
            relations.push(Relation {
                kind: RelationKind::R1 { edge: e.id.clone(), generator: g },
                word: edge_relation(c, d, tree, &e.id, g)?,
            });
        }
    }
    for f in &c.faces {
        relations.push(Relation { kind: RelationKind::R2 { face: f.id.clone() }, word: face_relation(c, d, tree, &f.id)? });
    }
    Ok(Presentation {
        vertex_groups: d.vertex_groups.clone(),
        edge_generators: c.edges.iter().filter(|e| !tree.in_tree(&e.id)).map(|e| e.id.clone()).collect(),
        relations,
    })
}

/// Convenience: spanning tree by the deterministic rule, edge relations on generators.
pub fn present(c: &TwoComplex, d: &GroupData) -> Result<Presentation> {
    let t = spanning_tree(c)?;
    build_presentation(c, d, &t, EdgeRelations::Generators)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum HomCount {
    Exact { count: u64 },
    Inconclusive { space: u128 },
}

impl HomCount {
    pub fn exact(&self) -> Option<u64> {
        match self {
            HomCount::Exact { count } => Some(*count),
            _ => None,
        }
    }
}

#[derive(Clone, Copy)]
enum Letter {
    Vertex(usize, usize),
    Edge(usize, i64),
}

struct Search<'a> {
    target: &'a GroupRef,
    vertex_homs: Vec<Vec<FiniteHom>>,
    nv: usize,
    nvars: usize,
    /// relations grouped by the last variable they mention
    checks: Vec<Vec<Vec<Letter>>>,
}

impl Search<'_> {
    fn choices(&self, var: usize) -> usize {
        if var < self.nv {
            self.vertex_homs[var].len()
        } else {
            self.target.order()
        }
    }

    fn holds(&self, rel: &[Letter], assign: &[usize]) -> bool {
        let f = self.target;
        let mut acc = f.identity();
        for l in rel {
            let x = match *l {
                Letter::Vertex(v, g) => self.vertex_homs[v][assign[v]].apply(g),
                Letter::Edge(e, exp) => f.pow(assign[self.nv + e], exp),
            };
            acc = f.mul(acc, x);
        }
        acc == f.identity()
    }

    fn count_from(&self, var: usize, assign: &mut Vec<usize>) -> u64 {
        if var == self.nvars {
            return 1;
        }
        let mut total = 0;
        for c in 0..self.choices(var) {
            assign[var] = c;
            if self.checks[var].iter().all(|r| self.holds(r, assign)) {
                total += self.count_from(var + 1, assign);
            }
        }
        total
    }
}

/// Number of assignments of the generators into `target` satisfying every relation.
pub fn count_homs(p: &Presentation, target: &GroupRef, budget: u128) -> Result<HomCount> {
    let vids: Vec<&String> = p.vertex_groups.keys().collect();
    let vertex_homs: Vec<Vec<FiniteHom>> = p.vertex_groups.values().map(|g| homomorphisms(g, target)).collect();
    let nv = vids.len();
    let nvars = nv + p.edge_generators.len();
    let mut space: u128 = 1;
    for hs in &vertex_homs {
        space = space.saturating_mul(hs.len() as u128);
    }
    for _ in &p.edge_generators {
        space = space.saturating_mul(target.order() as u128);
    }
    if space > budget {
        return Ok(HomCount::Inconclusive { space });
    }
    let mut checks = vec![Vec::new(); nvars.max(1)];
    for r in &p.relations {
        let mut letters = Vec::new();
        let mut last = 0;
        for a in &r.word.letters {
            match a {
                Atom::Vertex { group, elem } => {
                    let v = vids
                        .iter()
                        .position(|x| *x == group)
                        .ok_or_else(|| Error::Input(format!("relation mentions unknown vertex {group}")))?;
                    if *elem >= p.vertex_groups[group].order() {
                        return input(format!("element {elem} out of range in {group}"));
                    }
                    last = last.max(v);
                    letters.push(Letter::Vertex(v, *elem));
                }
                Atom::Edge { edge, exp } => {
                    let e = p
                        .edge_generators
                        .iter()
                        .position(|x| x == edge)
                        .ok_or_else(|| Error::Input(format!("relation mentions unknown edge {edge}")))?;
                    last = last.max(nv + e);
                    letters.push(Letter::Edge(e, *exp));
                }
                Atom::Trivial(_) => {}
            }
        }
        if !letters.is_empty() {
            checks[last].push(letters);
        }
    }
    if nvars == 0 {
        let s = Search { target, vertex_homs, nv, nvars, checks };
        return Ok(HomCount::Exact { count: u64::from(s.checks[0].iter().all(|r| s.holds(r, &[]))) });
    }
    let s = Search { target, vertex_homs, nv, nvars, checks };
    let count = (0..s.choices(0))
        .into_par_iter()
        .map(|c| {
            let mut assign = vec![0; nvars];
            assign[0] = c;
            if s.checks[0].iter().all(|r| s.holds(r, &assign)) {
                s.count_from(1, &mut assign)
            } else {
                0
            }
        })
        .sum();
    Ok(HomCount::Exact { count })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivRow {
    pub group: String,
    pub left: HomCount,
    pub right: HomCount,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivReport {
    /// `Some(true)` when every count agrees, `Some(false)` on a disagreement, `None` if a budget ran out.
    pub consistent: Option<bool>,
    pub rows: Vec<EquivRow>,
}

/// Compares hom-counts over a list of test groups; agreement is evidence, not isomorphism.
pub fn presentation_equiv(p: &Presentation, q: &Presentation, tests: &[GroupRef], budget: u128) -> Result<EquivReport> {
    let mut rows = Vec::new();
    let mut consistent = Some(true);
    for t in tests {
        let (a, b) = (count_homs(p, t, budget)?, count_homs(q, t, budget)?);
        match (a.exact(), b.exact()) {
            (Some(x), Some(y)) if x != y => consistent = Some(false),
            (Some(_), Some(_)) => {}
            _ => {
                if consistent == Some(true) {
                    consistent = None;
                }
            }
        }
        rows.push(EquivRow { group: t.label().to_string(), left: a, right: b });
    }
    Ok(EquivReport { consistent, rows })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preservation {
    /// The image reduces to the empty word.
    Trivial,
    /// The image is a cyclic conjugate of a target relation or its inverse.
    Syntactic,
    /// The image was rewritten to the empty word with target relations.
    Rewritten,
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctorialReport {
    pub relations: Vec<(RelationKind, Preservation)>,
}

impl FunctorialReport {
    pub fn all_preserved(&self) -> bool {
        self.relations.iter().all(|(_, p)| *p != Preservation::Unresolved)
    }
}

/// Image of a word under vertex homomorphisms, edges mapped identically.
pub fn map_word(w: &Word, homs: &BTreeMap<String, FiniteHom>) -> Result<Word> {
    let letters = w
        .letters
        .iter()
        .map(|a| match a {
            Atom::Vertex { group, elem } => match homs.get(group) {
                Some(h) => Ok(Atom::vertex(group, h.apply(*elem))),
                None => input(format!("no homomorphism given for vertex {group}")),
            },
            other => Ok(other.clone()),
        })
        .collect::<Result<_>>()?;
    Ok(Word { letters })
}

fn rotations(core: &[Atom]) -> impl Iterator<Item = Vec<Atom>> + '_ {
    (0..core.len().max(1)).map(move |s| core[s.min(core.len())..].iter().chain(&core[..s.min(core.len())]).cloned().collect())
}

/// Cyclically reduced relators of `p` and their inverses.
fn relators(p: &Presentation) -> Result<Vec<Vec<Atom>>> {
    let ctx = p.context();
    let mut out = Vec::new();
    for r in &p.relations {
        let red = reduce(&r.word, &ctx)?;
        let (_, core) = cyclic_core(&red, &ctx)?;
        if core.is_empty() {
            continue;
        }
        let inv = reduce(&invert(&core.to_word(), &ctx)?, &ctx)?;
        out.push(core.letters);
        out.push(inv.letters);
    }
    Ok(out)
}

/// Bounded Dehn-style rewriting: replaces a long piece of a relator by the inverse of the rest.
pub fn rewrite_to_identity(w: &ReducedWord, p: &Presentation, budget: usize) -> Result<bool> {
    let ctx = p.context();
    let rels = relators(p)?;
    let mut cur = cyclic_core(w, &ctx)?.1;
    for _ in 0..budget {
        if cur.is_empty() {
            return Ok(true);
        }
        let mut progressed = false;
        'search: for r in &rels {
            let n = r.len();
            for rot in rotations(r) {
                for take in (n / 2 + 1..=n).rev() {
                    let (u, v) = rot.split_at(take);
                    if let Some(pos) = cur.letters.windows(take).position(|win| win == u) {
                        let replacement = invert(&Word { letters: v.to_vec() }, &ctx)?;
                        let mut letters = cur.letters[..pos].to_vec();
                        letters.extend(replacement.letters);
                        letters.extend_from_slice(&cur.letters[pos + take..]);
                        let next = reduce(&Word { letters }, &ctx)?;
                        cur = cyclic_core(&next, &ctx)?.1;
                        progressed = true;
                        break 'search;
                    }
                }
            }
        }
        if !progressed {
            return Ok(false);
        }
    }
    Ok(cur.is_empty())
}

/// Maps the relations of `sub` into `full` and checks each image lies in the normal closure.
pub fn functorial_map(
    sub: &Presentation,
    full: &Presentation,
    homs: &BTreeMap<String, FiniteHom>,
    budget: usize,
) -> Result<FunctorialReport> {
    let mut a = sub.edge_generators.clone();
    let mut b = full.edge_generators.clone();
    a.sort();
    b.sort();
    if a != b || sub.vertex_groups.keys().ne(full.vertex_groups.keys()) {
        return input("presentations do not share the graph and tree");
    }
    let ctx = full.context();
    let rels = relators(full)?;
    let mut out = Vec::new();
    for r in &sub.relations {
        let img = reduce(&map_word(&r.word, homs)?, &ctx)?;
        let status = if img.is_empty() {
            Preservation::Trivial
        } else {
            let core = cyclic_core(&img, &ctx)?.1.letters;
            if rels.iter().any(|rel| rel.len() == core.len() && rotations(rel).any(|x| x == core)) {
                Preservation::Syntactic
            } else if rewrite_to_identity(&img, full, budget)? {
                Preservation::Rewritten
            } else {
                Preservation::Unresolved
            }
        };
        out.push((r.kind.clone(), status));
    }
    Ok(FunctorialReport { relations: out })
}
