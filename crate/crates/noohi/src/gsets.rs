//! Finite G-sets, windowed generator actions, and the finite-level dictionary between
//! properties of homomorphisms and properties of the induced pullback functors.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{input, Result};
use crate::groups::{
    contains, generated, has_dense_image, is_normal, left_cosets, normal_closure, subgroup_class_reps,
    FiniteHom, GroupRef, Homomorphism, LevelMap, QuotientTower,
};
use crate::words::{Atom, Word};

pub const DEFAULT_CATALOG_BOUND: usize = 64;

/// A finite set with an action of a finite group, given per element.
#[derive(Clone, Debug)]
pub struct GSet {
    pub group: GroupRef,
    pub labels: Vec<String>,
    /// `perms[g][x] = g·x`
    pub perms: Vec<Vec<usize>>,
    /// Tower context: the action is through level `.1` of the tower.
    pub tower: Option<(QuotientTower, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Orbit {
    pub points: Vec<usize>,
    pub truncated: bool,
}

impl GSet {
    pub fn new(group: GroupRef, labels: Vec<String>, perms: Vec<Vec<usize>>) -> Result<Self> {
        let n = labels.len();
        if perms.len() != group.order() || perms.iter().any(|p| p.len() != n || p.iter().any(|&y| y >= n)) {
            return input("action table has wrong shape");
        }
        let s = GSet { group, labels, perms, tower: None };
        s.check_laws()?;
        Ok(s)
    }

    pub fn over_tower(tower: QuotientTower, level: usize, labels: Vec<String>, perms: Vec<Vec<usize>>) -> Result<Self> {
        if level >= tower.depth() {
            return input("level beyond tower depth");
        }
        let mut s = GSet::new(tower.level(level).clone(), labels, perms)?;
        s.tower = Some((tower, level));
        Ok(s)
    }

    fn check_laws(&self) -> Result<()> {
        let g = &self.group;
        let e = g.identity();
        if (0..self.len()).any(|x| self.perms[e][x] != x) {
            return input("identity moves a point");
        }
        for &a in g.generators() {
            for b in 0..g.order() {
                let ab = g.mul(a, b);
                if (0..self.len()).any(|x| self.perms[ab][x] != self.perms[a][self.perms[b][x]]) {
                    return input("action is not compatible with multiplication");
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn act(&self, g: usize, x: usize) -> usize {
        self.perms[g][x]
    }

    pub fn stabilizer(&self, x: usize) -> Vec<usize> {
        (0..self.group.order()).filter(|&g| self.perms[g][x] == x).collect()
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| self.group.generators().iter().all(|&g| self.perms[g][x] == x))
            .collect()
    }

    /// Disjoint union.
    pub fn union(&self, other: &GSet) -> Result<GSet> {
        if !same_group(&self.group, &other.group) {
            return input("union of sets over different groups");
        }
        let n = self.len();
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        let perms = (0..self.group.order())
            .map(|g| {
                let mut p = self.perms[g].clone();
                p.extend(other.perms[g].iter().map(|&y| y + n));
                p
            })
            .collect();
        Ok(GSet { group: self.group.clone(), labels, perms, tower: self.tower.clone() })
    }

    /// Per point, the least level whose projection kernel acts trivially on the point's orbit.
    pub fn continuity_witnesses(&self) -> Vec<usize> {
        let Some((tower, level)) = &self.tower else {
            return vec![0; self.len()];
        };
        let orbs = orbits(self);
        let mut out = vec![*level; self.len()];
        for o in &orbs {
            let w = (0..=*level)
                .find(|&m| {
                    let ker: Vec<usize> = (0..tower.level(*level).order())
                        .filter(|&g| tower.project(*level, m, g) == tower.level(m).identity())
                        .collect();
                    ker.iter().all(|&g| o.points.iter().all(|&x| self.perms[g][x] == x))
                })
                .unwrap_or(*level);
            for &x in &o.points {
                out[x] = w;
            }
        }
        out
    }

    /// Every point's stabilizer contains the kernel of the projection to its witness level.
    pub fn continuity_audit(&self) -> bool {
        let Some((tower, level)) = &self.tower else { return true };
        let w = self.continuity_witnesses();
        (0..self.len()).all(|x| {
            let stab = self.stabilizer(x);
            (0..tower.level(*level).order())
                .filter(|&g| tower.project(*level, w[x], g) == tower.level(w[x]).identity())
                .all(|g| contains(&stab, g))
        })
    }
}

/// The transitive set `G/U` with base point the trivial coset.
#[derive(Clone, Debug)]
pub struct CosetAction {
    pub subgroup: Vec<usize>,
    pub gset: GSet,
    pub base: usize,
}

pub fn coset_action(group: &GroupRef, subgroup: &[usize]) -> CosetAction {
    let (which, reps) = left_cosets(group, subgroup);
    let labels = reps.iter().map(|&r| format!("{}U", group.name(r))).collect();
    let perms = (0..group.order())
        .map(|g| reps.iter().map(|&r| which[group.mul(g, r)]).collect())
        .collect();
    CosetAction {
        subgroup: subgroup.to_vec(),
        gset: GSet { group: group.clone(), labels, perms, tower: None },
        base: which[group.identity()],
    }
}

/// Identity of groups: shared handle, or same multiplication on the same element names.
pub fn same_group(a: &GroupRef, b: &GroupRef) -> bool {
    if Arc::ptr_eq(a, b) {
        return true;
    }
    a.order() == b.order()
        && a.names() == b.names()
        && a.generators().iter().all(|&g| (0..a.order()).all(|x| a.mul(g, x) == b.mul(g, x)))
}

/// Orbits of the generated action; a finite G-set never has truncated orbits.
pub fn orbits(s: &GSet) -> Vec<Orbit> {
    let gens: Vec<&Vec<usize>> = s.group.generators().iter().map(|&g| &s.perms[g]).collect();
    let maps: Vec<Vec<Option<usize>>> = gens.iter().map(|p| p.iter().map(|&y| Some(y)).collect()).collect();
    orbits_of_maps(s.len(), &maps)
}

fn orbits_of_maps(n: usize, maps: &[Vec<Option<usize>>]) -> Vec<Orbit> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut has_pre = vec![vec![false; n]; maps.len()];
    for (i, m) in maps.iter().enumerate() {
        for x in 0..n {
            if let Some(y) = m[x] {
                has_pre[i][y] = true;
                let (a, b) = (find(&mut parent, x), find(&mut parent, y));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut blocks: BTreeMap<usize, Orbit> = BTreeMap::new();
    for x in 0..n {
        let r = find(&mut parent, x);
        let open = maps.iter().enumerate().any(|(i, m)| m[x].is_none() || !has_pre[i][x]);
        let o = blocks.entry(r).or_insert(Orbit { points: Vec::new(), truncated: false });
        o.points.push(x);
        o.truncated |= open;
    }
    blocks.into_values().collect()
}

pub fn is_transitive(s: &GSet) -> bool {
    orbits(s).len() == 1
}

/// Precomposes the action with `h`.
pub fn pullback(h: &FiniteHom, s: &GSet) -> Result<GSet> {
    if !same_group(&h.target, &s.group) {
        return input("pullback along a homomorphism into a different group");
    }
    let perms = (0..h.source.order()).map(|g| s.perms[h.map[g]].clone()).collect();
    Ok(GSet { group: h.source.clone(), labels: s.labels.clone(), perms, tower: None })
}

pub fn is_completely_decomposed(s: &GSet) -> bool {
    s.fixed_points().len() == s.len()
}

// ---- windowed generator actions ----

#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub name: String,
    /// Generators with the same family belong to the same free factor.
    pub family: String,
    /// `map[x] = Some(g·x)`, or `None` when the image leaves the window.
    pub map: Vec<Option<usize>>,
}

/// An action of a free product through named generators on a (possibly truncated) window.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorAction {
    pub labels: Vec<String>,
    pub generators: Vec<Generator>,
    pub window: usize,
}

impl GeneratorAction {
    pub fn new(labels: Vec<String>, generators: Vec<Generator>) -> Result<Self> {
        let n = labels.len();
        for g in &generators {
            if g.map.len() != n {
                return input(format!("generator {} has wrong length", g.name));
            }
            let mut seen = vec![false; n];
            for y in g.map.iter().flatten() {
                if *y >= n || seen[*y] {
                    return input(format!("generator {} is not injective on the window", g.name));
                }
                seen[*y] = true;
            }
        }
        Ok(GeneratorAction { window: n, labels, generators })
    }

    pub fn generator(&self, name: &str) -> Option<&Generator> {
        self.generators.iter().find(|g| g.name == name)
    }
}

pub fn generator_orbits(s: &GeneratorAction) -> Vec<Orbit> {
    let maps: Vec<Vec<Option<usize>>> = s.generators.iter().map(|g| g.map.clone()).collect();
    orbits_of_maps(s.labels.len(), &maps)
}

/// Orbits under one family of generators only.
pub fn family_orbits(s: &GeneratorAction, family: &str) -> Vec<Orbit> {
    let maps: Vec<Vec<Option<usize>>> = s
        .generators
        .iter()
        .filter(|g| g.family == family)
        .map(|g| g.map.clone())
        .collect();
    orbits_of_maps(s.labels.len(), &maps)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommutationReport {
    pub commutes: bool,
    pub checked: usize,
    /// (generator of the first family, generator of the second, point)
    pub witness: Option<(String, String, usize)>,
}

/// Checks `g₁g₂·s = g₂g₁·s` for all generator pairs from the two families.
pub fn product_commutation(s: &GeneratorAction, first: &str, second: &str) -> CommutationReport {
    let mut checked = 0;
    for a in s.generators.iter().filter(|g| g.family == first) {
        for b in s.generators.iter().filter(|g| g.family == second) {
            for x in 0..s.labels.len() {
                let ab = b.map[x].and_then(|y| a.map[y]);
                let ba = a.map[x].and_then(|y| b.map[y]);
                if let (Some(p), Some(q)) = (ab, ba) {
                    checked += 1;
                    if p != q {
                        return CommutationReport {
                            commutes: false,
                            checked,
                            witness: Some((a.name.clone(), b.name.clone(), x)),
                        };
                    }
                }
            }
        }
    }
    CommutationReport { commutes: true, checked, witness: None }
}

/// Finite action of a free product of vertex groups and free edge generators.
#[derive(Clone, Debug)]
pub struct ProductAction {
    pub points: usize,
    pub vertex: BTreeMap<String, (GroupRef, Vec<Vec<usize>>)>,
    pub edges: BTreeMap<String, Vec<usize>>,
}

impl ProductAction {
    pub fn validate(&self) -> Result<()> {
        for (id, (g, perms)) in &self.vertex {
            let s = GSet::new(g.clone(), (0..self.points).map(|i| i.to_string()).collect(), perms.clone())
                .map_err(|e| crate::error::Error::Input(format!("vertex group {id}: {e}")))?;
            let _ = s;
        }
        for (e, p) in &self.edges {
            let mut seen = vec![false; self.points];
            if p.len() != self.points || p.iter().any(|&y| y >= self.points || std::mem::replace(&mut seen[y], true)) {
                return input(format!("edge {e} does not act by a permutation"));
            }
        }
        Ok(())
    }

    pub fn act_atom(&self, a: &Atom, x: usize) -> Result<usize> {
        match a {
            Atom::Vertex { group, elem } => match self.vertex.get(group) {
                Some((_, perms)) => Ok(perms[*elem][x]),
                None => input(format!("no action of vertex group {group}")),
            },
            Atom::Edge { edge, exp } => {
                let Some(p) = self.edges.get(edge) else {
                    return input(format!("no action of edge {edge}"));
                };
                let mut y = x;
                if *exp >= 0 {
                    for _ in 0..*exp {
                        y = p[y];
                    }
                } else {
                    let inv = invert_perm(p);
                    for _ in 0..exp.unsigned_abs() {
                        y = inv[y];
                    }
                }
                Ok(y)
            }
            Atom::Trivial(_) => Ok(x),
        }
    }

    /// Left action of a word: the rightmost letter acts first.
    pub fn act_word(&self, w: &Word, x: usize) -> Result<usize> {
        let mut y = x;
        for a in w.letters.iter().rev() {
            y = self.act_atom(a, y)?;
        }
        Ok(y)
    }

    pub fn to_generator_action(&self) -> GeneratorAction {
        let mut gens = Vec::new();
        for (id, (g, perms)) in &self.vertex {
            for &s in g.generators() {
                gens.push(Generator {
                    name: format!("{id}:{}", g.name(s)),
                    family: id.clone(),
                    map: perms[s].iter().map(|&y| Some(y)).collect(),
                });
            }
        }
        for (e, p) in &self.edges {
            gens.push(Generator { name: e.clone(), family: e.clone(), map: p.iter().map(|&y| Some(y)).collect() });
        }
        GeneratorAction { labels: (0..self.points).map(|i| i.to_string()).collect(), generators: gens, window: self.points }
    }

    pub fn orbits(&self) -> Vec<Orbit> {
        generator_orbits(&self.to_generator_action())
    }
}

pub fn invert_perm(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &y) in p.iter().enumerate() {
        inv[y] = i;
    }
    inv
}

// ---- the dictionary at finite level ----

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DictReport {
    pub item: u8,
    /// The group-theoretic side.
    pub left: bool,
    /// The G-set side; `None` when the catalog bound prevented a decision.
    pub right: Option<bool>,
    pub witness: Option<String>,
    pub catalog_bound: usize,
    pub objects_checked: usize,
}

impl DictReport {
    pub fn agrees(&self) -> Option<bool> {
        self.right.map(|r| r == self.left)
    }
}

/// Transitive G-sets up to isomorphism of index at most `bound`; flag is set when some were skipped.
pub fn catalog(group: &GroupRef, bound: usize) -> (Vec<CosetAction>, bool) {
    let mut skipped = false;
    let mut out = Vec::new();
    for u in subgroup_class_reps(group) {
        if group.order() / u.len() > bound {
            skipped = true;
            continue;
        }
        out.push(coset_action(group, &u));
    }
    (out, skipped)
}

fn orbit_of(s: &GSet, x: usize) -> Vec<usize> {
    let mut seen = vec![false; s.len()];
    seen[x] = true;
    let mut stack = vec![x];
    while let Some(y) = stack.pop() {
        for &g in s.group.generators() {
            let z = s.perms[g][y];
            if !seen[z] {
                seen[z] = true;
                stack.push(z);
            }
        }
    }
    (0..s.len()).filter(|&z| seen[z]).collect()
}

/// Item (1): `h'` is injective iff every transitive source set is a quotient of a
/// transitive subobject of the pullback of some transitive target set.
pub fn check_embedding(hp: &FiniteHom, bound: usize) -> DictReport {
    let left = hp.is_injective();
    let (xs, skip_x) = catalog(&hp.source, bound);
    let (ys, skip_y) = catalog(&hp.target, bound);
    let mut checked = 0;
    let pulled: Vec<GSet> = ys.iter().map(|y| pullback(hp, &y.gset).unwrap()).collect();
    for x in &xs {
        checked += 1;
        let stabs_x: Vec<Vec<usize>> = (0..x.gset.len()).map(|p| x.gset.stabilizer(p)).collect();
        let dominated = pulled.iter().any(|p| {
            let mut done = vec![false; p.len()];
            (0..p.len()).any(|y| {
                if done[y] {
                    return false;
                }
                for z in orbit_of(p, y) {
                    done[z] = true;
                }
                let st = p.stabilizer(y);
                stabs_x.iter().any(|sx| st.iter().all(|&g| contains(sx, g)))
            })
        });
        if !dominated {
            return DictReport {
                item: 1,
                left,
                right: Some(false),
                witness: Some(format!("{}/U with |U| = {}", hp.source.label(), x.subgroup.len())),
                catalog_bound: bound,
                objects_checked: checked,
            };
        }
    }
    DictReport {
        item: 1,
        left,
        right: if skip_x || skip_y { None } else { Some(true) },
        witness: None,
        catalog_bound: bound,
        objects_checked: checked,
    }
}

/// Item (2): dense image iff pullbacks of transitive sets stay transitive, level by level.
pub fn check_dense_iff_connected(h: &Homomorphism, bound: usize) -> Result<DictReport> {
    let left = has_dense_image(h)?;
    let tt = h.target.to_tower()?;
    let mut checked = 0;
    let mut skipped = false;
    for n in 0..tt.depth() {
        let (cat, skip) = catalog(tt.level(n), bound);
        skipped |= skip;
        for c in &cat {
            checked += 1;
            let connected = match (&h.source, &h.levels[n]) {
                (crate::groups::ApproxGroup::FreeDiscrete(_), LevelMap::Images(imgs)) => {
                    let gens = imgs
                        .iter()
                        .enumerate()
                        .map(|(i, &g)| Generator {
                            name: format!("x{i}"),
                            family: format!("x{i}"),
                            map: c.gset.perms[g].iter().map(|&y| Some(y)).collect(),
                        })
                        .collect();
                    let act = GeneratorAction::new(c.gset.labels.clone(), gens)?;
                    generator_orbits(&act).len() == 1
                }
                _ => is_transitive(&pullback(&h.level_hom(n)?, &c.gset)?),
            };
            if !connected {
                return Ok(DictReport {
                    item: 2,
                    left,
                    right: Some(false),
                    witness: Some(format!("level {n}: coset set of index {}", c.gset.len())),
                    catalog_bound: bound,
                    objects_checked: checked,
                });
            }
        }
    }
    Ok(DictReport {
        item: 2,
        left,
        right: if skipped { None } else { Some(true) },
        witness: None,
        catalog_bound: bound,
        objects_checked: checked,
    })
}

/// Item (3): normal image iff transitive sets whose pullback has a fixed point pull back completely decomposed.
pub fn check_normal_image(hp: &FiniteHom, bound: usize) -> DictReport {
    let left = is_normal(&hp.target, &hp.image());
    let (ys, skipped) = catalog(&hp.target, bound);
    let mut checked = 0;
    for y in &ys {
        checked += 1;
        let p = pullback(hp, &y.gset).unwrap();
        if !p.fixed_points().is_empty() && !is_completely_decomposed(&p) {
            return DictReport {
                item: 3,
                left,
                right: Some(false),
                witness: Some(format!("{}/V with |V| = {}", hp.target.label(), y.subgroup.len())),
                catalog_bound: bound,
                objects_checked: checked,
            };
        }
    }
    DictReport {
        item: 3,
        left,
        right: if skipped { None } else { Some(true) },
        witness: None,
        catalog_bound: bound,
        objects_checked: checked,
    }
}

/// Item (4): the composite is trivial iff composite pullbacks are completely decomposed.
pub fn check_composite_trivial(hp: &FiniteHom, h: &FiniteHom, bound: usize) -> Result<DictReport> {
    let left = h.compose(hp)?.is_trivial();
    let (zs, skipped) = catalog(&h.target, bound);
    let mut checked = 0;
    for z in &zs {
        checked += 1;
        let p = pullback(hp, &pullback(h, &z.gset)?)?;
        if !is_completely_decomposed(&p) {
            return Ok(DictReport {
                item: 4,
                left,
                right: Some(false),
                witness: Some(format!("{}/W with |W| = {}", h.target.label(), z.subgroup.len())),
                catalog_bound: bound,
                objects_checked: checked,
            });
        }
    }
    Ok(DictReport {
        item: 4,
        left,
        right: if skipped { None } else { Some(true) },
        witness: None,
        catalog_bound: bound,
        objects_checked: checked,
    })
}

/// Item (5): normal closure of the image equals the kernel iff every transitive middle set
/// with completely decomposed pullback is a pullback from the quotient.
/// Returns the item-(4) report instead when the composite is not trivial or `h` is not onto.
pub fn check_kernel_exactness(hp: &FiniteHom, h: &FiniteHom, bound: usize) -> Result<DictReport> {
    let four = check_composite_trivial(hp, h, bound)?;
    if !four.left || four.right != Some(true) {
        return Ok(four);
    }
    if !h.is_surjective() {
        return input("item (5) needs a dense (surjective) second map");
    }
    let left = normal_closure(&hp.target, &hp.image()) == h.kernel();
    let (ys, skip_y) = catalog(&hp.target, bound);
    let (zs, skip_z) = catalog(&h.target, bound);
    let pulled_z: Vec<GSet> = zs.iter().map(|z| pullback(h, &z.gset)).collect::<Result<_>>()?;
    let mut checked = 0;
    for y in &ys {
        checked += 1;
        if !is_completely_decomposed(&pullback(hp, &y.gset)?) {
            continue;
        }
        let st = y.gset.stabilizer(y.base);
        let found = pulled_z
            .iter()
            .any(|p| p.len() == y.gset.len() && (0..p.len()).any(|x| p.stabilizer(x) == st));
        if !found {
            return Ok(DictReport {
                item: 5,
                left,
                right: Some(false),
                witness: Some(format!("{}/V with |V| = {}", hp.target.label(), y.subgroup.len())),
                catalog_bound: bound,
                objects_checked: checked,
            });
        }
    }
    Ok(DictReport {
        item: 5,
        left,
        right: if skip_y || skip_z { None } else { Some(true) },
        witness: None,
        catalog_bound: bound,
        objects_checked: checked,
    })
}

/// Coset action of a subgroup generated by `gens` (convenience for tests and the CLI).
pub fn coset_action_of(group: &GroupRef, gens: &[usize]) -> CosetAction {
    coset_action(group, &generated(group, gens))
}
