//! Distances on letters, looplike words against Galois test-set families, bounded membership
//! in the subgroup they generate, and the Galois word action built from δ/θ/η data.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::complexes::{GraphWithTree, GroupData, TwoComplex};
use crate::error::{input, Error, Result};
use crate::groups::{generated, GroupRef};
use crate::gsets::{coset_action, CosetAction, ProductAction};
use crate::vankampen::{edge_relation, face_relation, Presentation, RelationKind};
use crate::words::{conjugator, invert, reduce, Atom, Home, ReducedWord, Word, WordContext};

/// Tree and edge endpoints: `vert₋(e⃗) = ∂₁e`, `vert₊(e⃗) = ∂₀e`.
#[derive(Clone, Debug)]
pub struct DistContext {
    pub graph: GraphWithTree,
}

impl DistContext {
    pub fn new(graph: GraphWithTree) -> Self {
        DistContext { graph }
    }

    fn vert(&self, edge: &str, sign: i64) -> Result<&str> {
        let e = self
            .graph
            .edges
            .iter()
            .find(|x| x.id == edge)
            .ok_or_else(|| Error::Input(format!("unknown edge {edge}")))?;
        if self.graph.in_tree(edge) {
            return input(format!("edge {edge} lies in the tree"));
        }
        Ok(if sign > 0 { &e.d0 } else { &e.d1 })
    }

    fn tree(&self, v: &str, w: &str) -> Result<usize> {
        self.graph.tree_distance(v, w)
    }
}

fn plain_letter(a: &Atom) -> Result<()> {
    match a {
        Atom::Vertex { .. } | Atom::Edge { exp: 1 | -1, .. } => Ok(()),
        _ => input(format!("letter {a} is not plain")),
    }
}

/// The asymmetric distance between a letter and the letter written to its right.
pub fn dist(left: &Atom, right: &Atom, ctx: &DistContext) -> Result<usize> {
    plain_letter(left)?;
    plain_letter(right)?;
    Ok(match (left, right) {
        (Atom::Vertex { group: v, .. }, Atom::Vertex { group: w, .. }) => ctx.tree(v, w)?,
        (Atom::Vertex { group: v, .. }, Atom::Edge { edge, exp }) => ctx.tree(v, ctx.vert(edge, -exp)?)?,
        (Atom::Edge { edge, exp }, Atom::Vertex { group: v, .. }) => ctx.tree(ctx.vert(edge, *exp)?, v)? + 1,
        (Atom::Edge { edge: e1, exp: s1 }, Atom::Edge { edge: e2, exp: s2 }) => {
            ctx.tree(ctx.vert(e1, *s1)?, ctx.vert(e2, -s2)?)? + 1
        }
        _ => unreachable!(),
    })
}

/// `N(ω)`: the sum of distances over adjacent letters, plus one.
pub fn n_of_word(w: &Word, ctx: &DistContext) -> Result<usize> {
    for a in &w.letters {
        plain_letter(a)?;
    }
    if w.len().is_multiple_of(2) {
        return input(format!("word of even length {} cannot be looplike", w.len()));
    }
    let mut total = 1;
    for pair in w.letters.windows(2) {
        total += dist(&pair[0], &pair[1], ctx)?;
    }
    Ok(total)
}

pub fn lcm_up_to(n: usize) -> usize {
    (1..=n).fold(1, |acc, k| acc / crate::groups::gcd(acc, k) * k)
}

/// Galois test sets `c_v^N = G_v/U_N` for `N = 1..=depth`, and `c_e^N = ℤ/L_N` for edges with
/// `L_N = lcm(1..=max(N, 3))`.
#[derive(Clone, Debug)]
pub struct TestSetFamily {
    pub depth: usize,
    pub groups: BTreeMap<String, GroupRef>,
    /// `kernels[v][N-1] = U_N`
    pub kernels: BTreeMap<String, Vec<Vec<usize>>>,
    /// `(v, N) → ` whether some reachable orbit was not covered (never for vertex sets built here)
    pub uncovered: Vec<(String, usize)>,
}

impl TestSetFamily {
    /// Builds the family from an action of the free product and a base point: `U_N` is the
    /// intersection of the kernels on all orbits reachable within `N` plain letters,
    /// made stable under the optional Galois action on each vertex group.
    pub fn from_action(
        s: &ProductAction,
        base: usize,
        depth: usize,
        galois: Option<&BTreeMap<String, Vec<Vec<usize>>>>,
    ) -> Result<Self> {
        s.validate()?;
        if base >= s.points {
            return input("base point outside the set");
        }
        let mut dist = vec![usize::MAX; s.points];
        dist[base] = 0;
        let mut queue = VecDeque::from([base]);
        while let Some(x) = queue.pop_front() {
            let mut push = |y: usize| {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            };
            for (_, perms) in s.vertex.values() {
                for p in perms {
                    push(p[x]);
                }
            }
            for p in s.edges.values() {
                push(p[x]);
                push(crate::gsets::invert_perm(p)[x]);
            }
        }
        let mut kernels = BTreeMap::new();
        let mut groups = BTreeMap::new();
        for (v, (g, perms)) in &s.vertex {
            groups.insert(v.clone(), g.clone());
            let mut levels = Vec::with_capacity(depth);
            for n in 1..=depth {
                let reach: Vec<usize> = (0..s.points).filter(|&x| dist[x] <= n).collect();
                // the kernel on the union of the reachable orbits
                let mut u: Vec<usize> = (0..g.order())
                    .filter(|&h| {
                        reach.iter().all(|&x| {
                            let orbit: Vec<usize> = (0..g.order()).map(|k| perms[k][x]).collect();
                            orbit.iter().all(|&y| perms[h][y] == y)
                        })
                    })
                    .collect();
                if let Some(gal) = galois.and_then(|m| m.get(v)) {
                    u.retain(|&h| gal.iter().all(|auto| {
                        let inv = crate::gsets::invert_perm(auto);
                        let moved = inv[h];
                        reach.iter().all(|&x| {
                            (0..g.order()).map(|k| perms[k][x]).all(|y| perms[moved][y] == y)
                        })
                    }));
                    let closed = generated(g, &u);
                    u = closed;
                }
                levels.push(u);
            }
            kernels.insert(v.clone(), levels);
        }
        Ok(TestSetFamily { depth, groups, kernels, uncovered: Vec::new() })
    }

    pub fn edge_modulus(&self, n: usize) -> usize {
        lcm_up_to(n.max(3))
    }

    pub fn kernel(&self, v: &str, n: usize) -> Result<&[usize]> {
        if n == 0 || n > self.depth {
            return input(format!("level {n} outside family depth {}", self.depth));
        }
        self.kernels
            .get(v)
            .map(|ks| ks[n - 1].as_slice())
            .ok_or_else(|| Error::Input(format!("no test sets at vertex {v}")))
    }

    pub fn test_set(&self, v: &str, n: usize) -> Result<CosetAction> {
        Ok(coset_action(&self.groups[v], self.kernel(v, n)?))
    }

    pub fn acts_trivially(&self, v: &str, n: usize, g: usize) -> Result<bool> {
        Ok(self.kernel(v, n)?.binary_search(&g).is_ok())
    }

    /// The tower condition `c^{N+1} ↠ c^N`, i.e. `U_{N+1} ⊆ U_N`.
    pub fn is_tower(&self) -> bool {
        self.kernels.values().all(|ks| ks.windows(2).all(|w| w[1].iter().all(|x| w[0].binary_search(x).is_ok())))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LooplikeVerdict {
    /// `None` when the family is too shallow for `N(ω)`.
    pub looplike: Option<bool>,
    pub reason: String,
    pub n: usize,
}

fn verdict(looplike: Option<bool>, reason: &str, n: usize) -> LooplikeVerdict {
    LooplikeVerdict { looplike, reason: reason.to_string(), n }
}

/// The mirror word test against `c^{N(ω)}`.
pub fn is_looplike(w: &Word, family: &TestSetFamily, ctx: &DistContext, wctx: &WordContext) -> Result<LooplikeVerdict> {
    if w.letters.iter().any(|a| plain_letter(a).is_err()) {
        return Ok(verdict(Some(false), "not plain", 0));
    }
    if w.len().is_multiple_of(2) {
        return Ok(verdict(Some(false), "even length", 0));
    }
    let n = n_of_word(w, ctx)?;
    if n > family.depth {
        return Ok(verdict(None, "family too shallow", n));
    }
    let m = w.len() / 2;
    let home = |a: &Atom| match a {
        Atom::Vertex { group, .. } => Home::Vertex(group.clone()),
        Atom::Edge { edge, .. } => Home::Edge(edge.clone()),
        Atom::Trivial(h) => h.clone(),
    };
    for j in 1..=m {
        if home(&w.letters[m - j]) != home(&w.letters[m + j]) {
            return Ok(verdict(Some(false), "mirror", n));
        }
    }
    let trivial_on = |left: Option<&Atom>, right: &Atom| -> Result<bool> {
        match (left, right) {
            (None, Atom::Vertex { group, elem }) => family.acts_trivially(group, n, *elem),
            (Some(Atom::Vertex { elem: a, .. }), Atom::Vertex { group, elem: b }) => {
                let g = wctx.group(group)?;
                family.acts_trivially(group, n, g.mul(*a, *b))
            }
            (None, Atom::Edge { exp, .. }) => Ok(exp.rem_euclid(family.edge_modulus(n) as i64) == 0),
            (Some(Atom::Edge { exp: a, .. }), Atom::Edge { exp: b, .. }) => {
                Ok((a + b).rem_euclid(family.edge_modulus(n) as i64) == 0)
            }
            _ => Ok(false),
        }
    };
    if !trivial_on(None, &w.letters[m])? {
        return Ok(verdict(Some(false), "centre", n));
    }
    for j in 1..=m {
        if !trivial_on(Some(&w.letters[m - j]), &w.letters[m + j])? {
            return Ok(verdict(Some(false), "mirror product", n));
        }
    }
    Ok(verdict(Some(true), "looplike", n))
}

/// Splits the reduced word into at most `bound` contiguous looplike segments.
pub fn v_membership_bounded(
    g: &ReducedWord,
    family: &TestSetFamily,
    ctx: &DistContext,
    wctx: &WordContext,
    bound: usize,
) -> Result<Option<Vec<Word>>> {
    let plain = crate::words::plain_form(&g.to_word(), wctx)?;
    let n = plain.len();
    // best[i] = fewest segments covering the first i letters
    let mut best: Vec<Option<(usize, usize)>> = vec![None; n + 1];
    best[0] = Some((0, 0));
    for end in 1..=n {
        for start in 0..end {
            let Some((count, _)) = best[start] else { continue };
            if count + 1 > bound || best[end].is_some_and(|(c, _)| c <= count + 1) {
                continue;
            }
            let seg = Word { letters: plain.letters[start..end].to_vec() };
            if is_looplike(&seg, family, ctx, wctx)?.looplike == Some(true) {
                best[end] = Some((count + 1, start));
            }
        }
    }
    let Some(_) = best[n] else { return Ok(None) };
    let mut cuts = Vec::new();
    let mut end = n;
    while end > 0 {
        let (_, start) = best[end].unwrap();
        cuts.push(Word { letters: plain.letters[start..end].to_vec() });
        end = start;
    }
    cuts.reverse();
    Ok(Some(cuts))
}

/// Galois level, its action on each geometric vertex group, and per-edge δ/θ.
#[derive(Clone, Debug)]
pub struct EtaData {
    pub gal: GroupRef,
    pub graph: GraphWithTree,
    pub vertex_groups: BTreeMap<String, GroupRef>,
    /// `action[v][σ][g] = ᵗg`
    pub action: BTreeMap<String, Vec<Vec<usize>>>,
    /// `(edge, σ) → δ_{σ,E} ∈ G_{∂₁E}`
    pub delta: BTreeMap<(String, usize), usize>,
    /// `(edge, σ) → θ_{σ,E} ∈ G_{∂₀E}`
    pub theta: BTreeMap<(String, usize), usize>,
}

/// Semidirect vertex groups `G_v ⋊ Gal` as built by `FiniteGroup::semidirect`.
#[derive(Clone, Debug)]
pub struct SemidirectVertex {
    pub geometric: GroupRef,
    pub action: Vec<Vec<usize>>,
}

impl EtaData {
    /// Reads δ, θ off the arithmetic group data: `𝒢(∂₁)(s_E(σ)) = δ·σ`, `𝒢(∂₀)(s_E(σ)) = θ·σ`,
    /// where `s_E` is the given Galois section of each edge group.
    pub fn from_group_data(
        c: &TwoComplex,
        d: &GroupData,
        graph: &GraphWithTree,
        gal: &GroupRef,
        vertices: &BTreeMap<String, SemidirectVertex>,
        sections: &BTreeMap<String, Vec<usize>>,
    ) -> Result<Self> {
        let q = gal.order();
        let mut delta = BTreeMap::new();
        let mut theta = BTreeMap::new();
        for e in &c.edges {
            let sec = sections.get(&e.id).ok_or_else(|| Error::Input(format!("no Galois section on edge {}", e.id)))?;
            for sigma in 0..q {
                for (j, out) in [(1u8, &mut delta), (0u8, &mut theta)] {
                    let img = d.edge_map(&e.id, j)?.apply(sec[sigma]);
                    if img % q != sigma {
                        return input(format!("edge {} does not lift σ = {sigma} along end {j}", e.id));
                    }
                    out.insert((e.id.clone(), sigma), img / q);
                }
            }
        }
        let eta = EtaData {
            gal: gal.clone(),
            graph: graph.clone(),
            vertex_groups: vertices.iter().map(|(v, s)| (v.clone(), s.geometric.clone())).collect(),
            action: vertices.iter().map(|(v, s)| (v.clone(), s.action.clone())).collect(),
            delta,
            theta,
        };
        Ok(eta)
    }

    pub fn context(&self) -> WordContext {
        WordContext { groups: self.vertex_groups.clone() }
    }

    /// Edges where `δ_{τσ} ≠ δ_τ·ᵗδ_σ` or the same for θ.
    pub fn cocycle_failures(&self) -> Vec<(String, usize, usize)> {
        let mut out = Vec::new();
        for e in &self.graph.edges {
            for tau in 0..self.gal.order() {
                for sigma in 0..self.gal.order() {
                    let ts = self.gal.mul(tau, sigma);
                    let ok = [(&self.delta, &e.d1), (&self.theta, &e.d0)].iter().all(|(m, v)| {
                        let g = &self.vertex_groups[*v];
                        let act = &self.action[*v];
                        let (Some(&a), Some(&b), Some(&c)) =
                            (m.get(&(e.id.clone(), ts)), m.get(&(e.id.clone(), tau)), m.get(&(e.id.clone(), sigma)))
                        else {
                            return false;
                        };
                        a == g.mul(b, act[tau][c])
                    });
                    if !ok {
                        out.push((e.id.clone(), tau, sigma));
                    }
                }
            }
        }
        out
    }

    fn lookup(&self, m: &BTreeMap<(String, usize), usize>, e: &str, sigma: usize) -> Result<usize> {
        m.get(&(e.to_string(), sigma)).copied().ok_or_else(|| Error::Input(format!("missing δ/θ for ({e}, {sigma})")))
    }

    /// `η_{σ,v→w}` along the tree path.
    pub fn eta_path(&self, sigma: usize, v: &str, w: &str) -> Result<Word> {
        let mut letters = Vec::new();
        for (e, dir) in self.graph.tree_path(v, w)? {
            let rec = self.graph.edges.iter().find(|x| x.id == e).unwrap();
            let d = self.lookup(&self.delta, &e, sigma)?;
            let t = self.lookup(&self.theta, &e, sigma)?;
            let (ga, gb) = (&self.vertex_groups[&rec.d1], &self.vertex_groups[&rec.d0]);
            if dir > 0 {
                letters.push(Atom::vertex(&rec.d1, ga.inv(d)));
                letters.push(Atom::vertex(&rec.d0, t));
            } else {
                letters.push(Atom::vertex(&rec.d0, gb.inv(t)));
                letters.push(Atom::vertex(&rec.d1, d));
            }
        }
        Ok(Word { letters })
    }
}

/// `φ_{v₀}(σ)` applied letter by letter.
pub fn sigma_action(sigma: usize, v0: &str, w: &Word, eta: &EtaData) -> Result<Word> {
    let ctx = eta.context();
    let mut out = Vec::new();
    for a in &w.letters {
        match a {
            Atom::Vertex { group, elem } => {
                let act = eta.action.get(group).ok_or_else(|| Error::Input(format!("no Galois action at {group}")))?;
                out.extend(eta.eta_path(sigma, v0, group)?.letters);
                out.push(Atom::vertex(group, act[sigma][*elem]));
                out.extend(eta.eta_path(sigma, group, v0)?.letters);
            }
            Atom::Edge { edge, exp } => {
                let rec = eta
                    .graph
                    .edges
                    .iter()
                    .find(|x| x.id == *edge)
                    .ok_or_else(|| Error::Input(format!("unknown edge {edge}")))?;
                let d = eta.lookup(&eta.delta, edge, sigma)?;
                let t = eta.lookup(&eta.theta, edge, sigma)?;
                let mut unit = eta.eta_path(sigma, v0, &rec.d1)?.letters;
                unit.push(Atom::vertex(&rec.d1, eta.vertex_groups[&rec.d1].inv(d)));
                unit.push(Atom::edge(edge, 1));
                unit.push(Atom::vertex(&rec.d0, t));
                unit.extend(eta.eta_path(sigma, &rec.d0, v0)?.letters);
                let unit = Word { letters: unit };
                let piece = if *exp >= 0 { unit } else { invert(&unit, &ctx)? };
                for _ in 0..exp.unsigned_abs() {
                    out.extend(piece.letters.iter().cloned());
                }
            }
            Atom::Trivial(_) => {}
        }
    }
    Ok(Word { letters: out })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CheckReport {
    pub checked: usize,
    pub inconclusive: usize,
    pub failures: Vec<String>,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `φ(τ)∘φ(σ) = φ(τσ)` and the base change `φ_{v₁}(σ)(w) = η_{σ,v₁→v₀} φ_{v₀}(σ)(w) η_{σ,v₁→v₀}⁻¹`.
pub fn verify_phi_identities(eta: &EtaData, samples: &[Word]) -> Result<CheckReport> {
    let ctx = eta.context();
    let mut rep = CheckReport::default();
    let vs: Vec<String> = eta.graph.vertices.clone();
    for w in samples {
        for v0 in &vs {
            for sigma in 0..eta.gal.order() {
                let once = sigma_action(sigma, v0, w, eta)?;
                for tau in 0..eta.gal.order() {
                    rep.checked += 1;
                    let lhs = reduce(&sigma_action(tau, v0, &once, eta)?, &ctx)?;
                    let rhs = reduce(&sigma_action(eta.gal.mul(tau, sigma), v0, w, eta)?, &ctx)?;
                    if lhs != rhs {
                        rep.failures.push(format!("composition at {v0}, σ={sigma}, τ={tau}, w={w}"));
                    }
                }
                for v1 in &vs {
                    rep.checked += 1;
                    let h = eta.eta_path(sigma, v1, v0)?;
                    let moved = crate::words::concat(&crate::words::concat(&h, &once), &invert(&h, &ctx)?);
                    if reduce(&moved, &ctx)? != reduce(&sigma_action(sigma, v1, w, eta)?, &ctx)? {
                        rep.failures.push(format!("base change {v0}→{v1}, σ={sigma}, w={w}"));
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// Every `φ(σ)(r)` for a geometric relation `r` is conjugate to an edge relation, or (for face
/// relations) to a face relation after substituting `e ↦ 𝒢(∂₁)(γ)⁻¹ e 𝒢(∂₀)(γ)` on its edges.
pub fn verify_relation_stability(
    p: &Presentation,
    c: &TwoComplex,
    geometric: &GroupData,
    eta: &EtaData,
    substitution_budget: usize,
) -> Result<CheckReport> {
    let ctx = p.context();
    let tree = &eta.graph;
    let mut r1_all = Vec::new();
    for e in &c.edges {
        for g in 0..geometric.edge_group(&e.id)?.order() {
            r1_all.push(reduce(&edge_relation(c, geometric, tree, &e.id, g)?, &ctx)?);
        }
    }
    let mut rep = CheckReport::default();
    let v0 = tree.vertices.first().cloned().ok_or_else(|| Error::Input("empty graph".into()))?;
    for r in &p.relations {
        for sigma in 0..eta.gal.order() {
            rep.checked += 1;
            let img = reduce(&sigma_action(sigma, &v0, &r.word, eta)?, &ctx)?;
            let found = match &r.kind {
                RelationKind::R1 { .. } => {
                    let mut hit = img.is_empty();
                    for cand in &r1_all {
                        if hit {
                            break;
                        }
                        hit = conjugator(&img, cand, &ctx)?.is_some();
                    }
                    Some(hit)
                }
                RelationKind::R2 { face } => face_match(&img, face, c, geometric, eta, &ctx, substitution_budget)?,
                RelationKind::Extra => Some(true),
            };
            match found {
                Some(true) => {}
                Some(false) => rep.failures.push(format!("{:?} under σ={sigma}", r.kind)),
                None => rep.inconclusive += 1,
            }
        }
    }
    Ok(rep)
}

fn face_match(
    img: &ReducedWord,
    face: &str,
    c: &TwoComplex,
    geometric: &GroupData,
    eta: &EtaData,
    ctx: &WordContext,
    budget: usize,
) -> Result<Option<bool>> {
    let tree = &eta.graph;
    let base = face_relation(c, geometric, tree, face)?;
    let sides: Vec<String> = (0..3).map(|k| c.face_side(face, k).map(str::to_string)).collect::<Result<_>>()?;
    let sizes: Vec<usize> = sides.iter().map(|e| geometric.edge_group(e).map(|g| g.order())).collect::<Result<_>>()?;
    let total: usize = sizes.iter().product();
    if total > budget {
        return Ok(None);
    }
    // positions of the three edge letters in the face word: e₂ at 0, e₀ at 3, e₁⁻¹ at 6
    let slots = [(3usize, 0usize), (6, 1), (0, 2)];
    for combo in 0..total {
        let mut rest = combo;
        let mut gammas = [0usize; 3];
        for k in 0..3 {
            gammas[k] = rest % sizes[k];
            rest /= sizes[k];
        }
        let mut letters: Vec<Atom> = Vec::new();
        for (i, a) in base.letters.iter().enumerate() {
            match slots.iter().find(|(pos, _)| *pos == i) {
                Some(&(_, k)) => {
                    let e = &sides[k];
                    let rec = c.edge(e)?;
                    let g = gammas[k];
                    let pre = Atom::vertex(&rec.d1, geometric.vertex_group(&rec.d1)?.inv(geometric.edge_map(e, 1)?.apply(g)));
                    let post = Atom::vertex(&rec.d0, geometric.edge_map(e, 0)?.apply(g));
                    let unit = Word { letters: vec![pre, a_edge(tree, e), post] };
                    let piece = if k == 1 { invert(&unit, ctx)? } else { unit };
                    letters.extend(piece.letters);
                }
                None => letters.push(a.clone()),
            }
        }
        let cand = reduce(&Word { letters }, ctx)?;
        if (img.is_empty() && cand.is_empty()) || conjugator(img, &cand, ctx)?.is_some() {
            return Ok(Some(true));
        }
    }
    Ok(Some(false))
}

fn a_edge(tree: &GraphWithTree, e: &str) -> Atom {
    if tree.in_tree(e) {
        Atom::Trivial(Home::Edge(e.to_string()))
    } else {
        Atom::edge(e, 1)
    }
}
