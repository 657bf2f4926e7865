use std::collections::BTreeMap;

use super::{vertex_index, GraphWithTree, GroupData, TwoComplex};
use crate::error::{input, Error, Result};
use crate::gsets::{invert_perm, GSet, ProductAction};

/// A locally constant `(𝒢, α)`-system: a G-set per simplex and bijective equivariant boundary maps.
#[derive(Clone, Debug)]
pub struct LcsSystem {
    pub vertex_sets: BTreeMap<String, GSet>,
    pub edge_sets: BTreeMap<String, GSet>,
    pub face_sets: BTreeMap<String, GSet>,
    /// `(e, j)`: `M_e → M_{∂_j e}`
    pub edge_maps: BTreeMap<(String, u8), Vec<usize>>,
    /// `(f, k)`: `M_f → M_{∂_k f}`
    pub face_maps: BTreeMap<(String, u8), Vec<usize>>,
    /// `(f, i)`: `M_f → M_{v_i f}`
    pub face_vertex_maps: BTreeMap<(String, u8), Vec<usize>>,
}

fn get<'a, K: Ord + std::fmt::Debug, V>(m: &'a BTreeMap<K, V>, k: &K) -> Result<&'a V> {
    m.get(k).ok_or_else(|| Error::Input(format!("system is missing {k:?}")))
}

fn is_bijection(m: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    m.len() == n && m.iter().all(|&y| y < n && !std::mem::replace(&mut seen[y], true))
}

fn check_map(
    name: &str,
    src: &GSet,
    tgt: &GSet,
    hom: &crate::groups::FiniteHom,
    m: &[usize],
) -> Result<()> {
    if !is_bijection(m, tgt.len()) || src.len() != tgt.len() {
        return input(format!("map {name} is not bijective"));
    }
    for &g in src.group.generators() {
        let hg = hom.apply(g);
        if (0..src.len()).any(|x| m[src.act(g, x)] != tgt.act(hg, m[x])) {
            return input(format!("map {name} is not equivariant"));
        }
    }
    Ok(())
}

impl LcsSystem {
    pub fn validate(&self, c: &TwoComplex, d: &GroupData) -> Result<()> {
        for e in &c.edges {
            let me = get(&self.edge_sets, &e.id)?;
            for j in 0..2u8 {
                let mv = get(&self.vertex_sets, &c.edge_end(&e.id, j)?.to_string())?;
                let m = get(&self.edge_maps, &(e.id.clone(), j))?;
                check_map(&format!("({}, {j})", e.id), me, mv, d.edge_map(&e.id, j)?, m)?;
            }
        }
        for f in &c.faces {
            let mf = get(&self.face_sets, &f.id)?;
            for k in 0..3u8 {
                let e = c.face_side(&f.id, k)?;
                let me = get(&self.edge_sets, &e.to_string())?;
                check_map(&format!("({}, {k})", f.id), mf, me, d.face_map(&f.id, k)?, get(&self.face_maps, &(f.id.clone(), k))?)?;
                let mv = get(&self.vertex_sets, &c.face_vertex(&f.id, k)?.to_string())?;
                let fv = get(&self.face_vertex_maps, &(f.id.clone(), k))?;
                check_map(&format!("({}, v{k})", f.id), mf, mv, d.face_vertex_map(&f.id, k)?, fv)?;
            }
            for k in 0..3u8 {
                let e = c.face_side(&f.id, k)?.to_string();
                let fk = &self.face_maps[&(f.id.clone(), k)];
                for j in 0..2u8 {
                    let mv = &self.vertex_sets[c.edge_end(&e, j)?];
                    let ej = &self.edge_maps[&(e.clone(), j)];
                    let fv = &self.face_vertex_maps[&(f.id.clone(), vertex_index(k, j))];
                    let a = d.alpha(&f.id, k, j)?;
                    if (0..mf.len()).any(|x| ej[fk[x]] != mv.act(a, fv[x])) {
                        return input(format!("triangle law fails at ({}, {k}, {j})", f.id));
                    }
                }
            }
        }
        Ok(())
    }

    /// Total number of points over all simplices.
    pub fn size(&self) -> usize {
        self.vertex_sets.values().chain(self.edge_sets.values()).chain(self.face_sets.values()).map(GSet::len).sum()
    }
}

/// The system attached to an action of the presented group: `M_v = S`, `M_e` pulled back from
/// `M_{∂₁e}` with `m_{∂₁} = id` and `m_{∂₀} = ρ(e)⁻¹`; face maps follow from the triangle laws.
pub fn lcs_from_action(c: &TwoComplex, d: &GroupData, tree: &GraphWithTree, s: &ProductAction) -> Result<LcsSystem> {
    s.validate()?;
    let n = s.points;
    let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let vperm = |v: &str, g: usize| -> Result<&Vec<usize>> {
        Ok(&get(&s.vertex, &v.to_string())?.1[g])
    };
    let rho = |e: &str| -> Result<Vec<usize>> {
        if tree.in_tree(e) {
            Ok((0..n).collect())
        } else {
            get(&s.edges, &e.to_string()).cloned()
        }
    };
    let compose = |a: &[usize], b: &[usize]| -> Vec<usize> { b.iter().map(|&y| a[y]).collect() };
    let mut m = LcsSystem {
        vertex_sets: BTreeMap::new(),
        edge_sets: BTreeMap::new(),
        face_sets: BTreeMap::new(),
        edge_maps: BTreeMap::new(),
        face_maps: BTreeMap::new(),
        face_vertex_maps: BTreeMap::new(),
    };
    for v in &c.vertices {
        let g = d.vertex_group(v)?;
        let perms = get(&s.vertex, v)?.1.clone();
        m.vertex_sets.insert(v.clone(), GSet::new(g.clone(), labels.clone(), perms)?);
    }
    for e in &c.edges {
        let g = d.edge_group(&e.id)?;
        let h = d.edge_map(&e.id, 1)?;
        let perms = (0..g.order()).map(|x| vperm(&e.d1, h.apply(x)).cloned()).collect::<Result<_>>()?;
        m.edge_sets.insert(e.id.clone(), GSet::new(g.clone(), labels.clone(), perms)?);
        m.edge_maps.insert((e.id.clone(), 1), (0..n).collect());
        m.edge_maps.insert((e.id.clone(), 0), invert_perm(&rho(&e.id)?));
    }
    for f in &c.faces {
        let g = d.face_group(&f.id)?;
        let v0 = c.face_vertex(&f.id, 0)?;
        let h = d.face_vertex_map(&f.id, 0)?;
        let perms = (0..g.order()).map(|x| vperm(v0, h.apply(x)).cloned()).collect::<Result<_>>()?;
        m.face_sets.insert(f.id.clone(), GSet::new(g.clone(), labels.clone(), perms)?);
        let alpha = |k: u8, j: u8| -> Result<Vec<usize>> {
            let v = c.edge_end(c.face_side(&f.id, k)?, j)?;
            Ok(vperm(v, d.alpha(&f.id, k, j)?)?.clone())
        };
        let e1 = c.face_side(&f.id, 1)?;
        let e2 = c.face_side(&f.id, 2)?;
        let to_v1 = compose(&invert_perm(&alpha(2, 0)?), &compose(&invert_perm(&rho(e2)?), &alpha(2, 1)?));
        let to_v2 = compose(&invert_perm(&alpha(1, 0)?), &compose(&invert_perm(&rho(e1)?), &alpha(1, 1)?));
        m.face_vertex_maps.insert((f.id.clone(), 0), (0..n).collect());
        m.face_vertex_maps.insert((f.id.clone(), 1), to_v1.clone());
        m.face_vertex_maps.insert((f.id.clone(), 2), to_v2);
        m.face_maps.insert((f.id.clone(), 0), compose(&alpha(0, 1)?, &to_v1));
        m.face_maps.insert((f.id.clone(), 1), alpha(1, 1)?);
        m.face_maps.insert((f.id.clone(), 2), alpha(2, 1)?);
    }
    m.validate(c, d)?;
    Ok(m)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// The monodromy action on `π₀` of the tree-restricted system.
pub fn q_functor(m: &LcsSystem, c: &TwoComplex, d: &GroupData, tree: &GraphWithTree) -> Result<ProductAction> {
    m.validate(c, d)?;
    let mut offset = BTreeMap::new();
    let mut total = 0;
    for v in &c.vertices {
        offset.insert(v.clone(), total);
        total += m.vertex_sets[v].len();
    }
    let mut uf = UnionFind::new(total);
    for e in c.edges.iter().filter(|e| tree.in_tree(&e.id)) {
        let (m0, m1) = (&m.edge_maps[&(e.id.clone(), 0)], &m.edge_maps[&(e.id.clone(), 1)]);
        for y in 0..m0.len() {
            uf.union(offset[&e.d1] + m1[y], offset[&e.d0] + m0[y]);
        }
    }
    let mut comp_index = BTreeMap::new();
    for p in 0..total {
        let r = uf.find(p);
        let next = comp_index.len();
        comp_index.entry(r).or_insert(next);
    }
    let points = comp_index.len();
    let mut comp_of: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut rep_of: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for v in &c.vertices {
        let n = m.vertex_sets[v].len();
        let cs: Vec<usize> = (0..n).map(|x| comp_index[&uf.find(offset[v] + x)]).collect();
        if !is_bijection(&cs, points) {
            return input(format!("tree transport to vertex {v} is not bijective"));
        }
        rep_of.insert(v.clone(), invert_perm(&cs));
        comp_of.insert(v.clone(), cs);
    }
    let mut vertex = BTreeMap::new();
    for v in &c.vertices {
        let s = &m.vertex_sets[v];
        let perms = (0..s.group.order())
            .map(|g| (0..points).map(|cc| comp_of[v][s.act(g, rep_of[v][cc])]).collect())
            .collect();
        vertex.insert(v.clone(), (s.group.clone(), perms));
    }
    let mut edges = BTreeMap::new();
    for e in c.edges.iter().filter(|e| !tree.in_tree(&e.id)) {
        let inv0 = invert_perm(&m.edge_maps[&(e.id.clone(), 0)]);
        let m1 = &m.edge_maps[&(e.id.clone(), 1)];
        let perm = (0..points).map(|cc| comp_of[&e.d1][m1[inv0[rep_of[&e.d0][cc]]]]).collect();
        edges.insert(e.id.clone(), perm);
    }
    Ok(ProductAction { points, vertex, edges })
}

fn restrict(s: &GSet, keep: &[usize]) -> (GSet, Vec<usize>) {
    let mut index = vec![usize::MAX; s.len()];
    for (i, &x) in keep.iter().enumerate() {
        index[x] = i;
    }
    let perms = s.perms.iter().map(|p| keep.iter().map(|&x| index[p[x]]).collect()).collect();
    let labels = keep.iter().map(|&x| s.labels[x].clone()).collect();
    (GSet { group: s.group.clone(), labels, perms, tower: s.tower.clone() }, index)
}

/// Splits a system into its connected subsystems.
pub fn decompose_system(m: &LcsSystem, c: &TwoComplex, d: &GroupData) -> Result<Vec<LcsSystem>> {
    m.validate(c, d)?;
    let mut offset: BTreeMap<(u8, String), usize> = BTreeMap::new();
    let mut total = 0;
    for (dim, sets) in [(0u8, &m.vertex_sets), (1, &m.edge_sets), (2, &m.face_sets)] {
        for (id, s) in sets {
            offset.insert((dim, id.clone()), total);
            total += s.len();
        }
    }
    let mut uf = UnionFind::new(total);
    for (dim, sets) in [(0u8, &m.vertex_sets), (1, &m.edge_sets), (2, &m.face_sets)] {
        for (id, s) in sets {
            let o = offset[&(dim, id.clone())];
            for &g in s.group.generators() {
                for x in 0..s.len() {
                    uf.union(o + x, o + s.act(g, x));
                }
            }
        }
    }
    for ((e, j), map) in &m.edge_maps {
        let (o, t) = (offset[&(1, e.clone())], offset[&(0, c.edge_end(e, *j)?.to_string())]);
        for (y, &x) in map.iter().enumerate() {
            uf.union(o + y, t + x);
        }
    }
    for ((f, k), map) in &m.face_maps {
        let (o, t) = (offset[&(2, f.clone())], offset[&(1, c.face_side(f, *k)?.to_string())]);
        for (y, &x) in map.iter().enumerate() {
            uf.union(o + y, t + x);
        }
    }
    let mut roots: Vec<usize> = (0..total).map(|p| uf.find(p)).collect();
    let mut distinct = roots.clone();
    distinct.sort_unstable();
    distinct.dedup();
    for r in roots.iter_mut() {
        *r = distinct.binary_search(r).unwrap();
    }
    let mut out = Vec::new();
    for comp in 0..distinct.len() {
        let mut sub = LcsSystem {
            vertex_sets: BTreeMap::new(),
            edge_sets: BTreeMap::new(),
            face_sets: BTreeMap::new(),
            edge_maps: BTreeMap::new(),
            face_maps: BTreeMap::new(),
            face_vertex_maps: BTreeMap::new(),
        };
        let mut index: BTreeMap<(u8, String), Vec<usize>> = BTreeMap::new();
        for (dim, sets) in [(0u8, &m.vertex_sets), (1, &m.edge_sets), (2, &m.face_sets)] {
            for (id, s) in sets {
                let o = offset[&(dim, id.clone())];
                let keep: Vec<usize> = (0..s.len()).filter(|&x| roots[o + x] == comp).collect();
                let (r, idx) = restrict(s, &keep);
                index.insert((dim, id.clone()), idx);
                match dim {
                    0 => sub.vertex_sets.insert(id.clone(), r),
                    1 => sub.edge_sets.insert(id.clone(), r),
                    _ => sub.face_sets.insert(id.clone(), r),
                };
            }
        }
        let re = |map: &[usize], src: &[usize], tgt: &[usize]| -> Vec<usize> {
            let mut out = vec![0; src.iter().filter(|&&i| i != usize::MAX).count()];
            for (x, &i) in src.iter().enumerate() {
                if i != usize::MAX {
                    out[i] = tgt[map[x]];
                }
            }
            out
        };
        for ((e, j), map) in &m.edge_maps {
            let tgt = &index[&(0, c.edge_end(e, *j)?.to_string())];
            sub.edge_maps.insert((e.clone(), *j), re(map, &index[&(1, e.clone())], tgt));
        }
        for ((f, k), map) in &m.face_maps {
            let tgt = &index[&(1, c.face_side(f, *k)?.to_string())];
            sub.face_maps.insert((f.clone(), *k), re(map, &index[&(2, f.clone())], tgt));
        }
        for ((f, i), map) in &m.face_vertex_maps {
            let tgt = &index[&(0, c.face_vertex(f, *i)?.to_string())];
            sub.face_vertex_maps.insert((f.clone(), *i), re(map, &index[&(2, f.clone())], tgt));
        }
        out.push(sub);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::tests::nodal;
    use super::super::{spanning_tree, EdgeRecord};
    use super::*;
    use crate::groups::{arc, FiniteGroup};

    fn nodal_action(n: usize, shift: usize) -> (TwoComplex, GroupData, GraphWithTree, ProductAction) {
        let c = nodal();
        let one = arc(FiniteGroup::trivial());
        let d = GroupData::constant(&c, &one);
        let t = spanning_tree(&c).unwrap();
        let rot: Vec<usize> = (0..n).map(|x| (x + shift) % n).collect();
        let id: Vec<usize> = (0..n).collect();
        // the faces force d = 1 and p10 = p01⁻¹
        let s = ProductAction {
            points: n,
            vertex: BTreeMap::from([("C".to_string(), (one.clone(), vec![id.clone()]))]),
            edges: BTreeMap::from([("d".to_string(), id.clone()), ("p01".to_string(), rot.clone()), ("p10".to_string(), invert_perm(&rot))]),
        };
        (c, d, t, s)
    }

    #[test]
    fn q_of_lcs_from_action_is_the_action() {
        let (c, d, t, s) = nodal_action(5, 1);
        let m = lcs_from_action(&c, &d, &t, &s).unwrap();
        let q = q_functor(&m, &c, &d, &t).unwrap();
        assert_eq!(q.edges["p01"], vec![1, 2, 3, 4, 0]);
        assert_eq!(q.orbits().len(), 1);
        assert_eq!(decompose_system(&m, &c, &d).unwrap().len(), 1);
    }

    #[test]
    fn actions_violating_face_relations_are_rejected() {
        let (c, d, t, mut s) = nodal_action(4, 1);
        s.edges.insert("p10".to_string(), s.edges["p01"].clone());
        assert!(lcs_from_action(&c, &d, &t, &s).is_err());
    }

    #[test]
    fn components_match_orbits() {
        let (c, d, t, s) = nodal_action(6, 2);
        let m = lcs_from_action(&c, &d, &t, &s).unwrap();
        let q = q_functor(&m, &c, &d, &t).unwrap();
        let parts = decompose_system(&m, &c, &d).unwrap();
        assert_eq!(q.orbits().len(), 2);
        assert_eq!(parts.len(), 2);
        for p in &parts {
            p.validate(&c, &d).unwrap();
            assert_eq!(q_functor(p, &c, &d, &t).unwrap().orbits().len(), 1);
        }
    }

    #[test]
    fn tree_edges_act_trivially() {
        let c = TwoComplex {
            vertices: vec!["a".into(), "b".into()],
            edges: vec![
                EdgeRecord { id: "t".into(), d0: "b".into(), d1: "a".into() },
                EdgeRecord { id: "x".into(), d0: "b".into(), d1: "a".into() },
            ],
            faces: vec![],
        };
        let z2 = arc(FiniteGroup::cyclic(2));
        let d = GroupData::constant(&c, &z2);
        let t = spanning_tree(&c).unwrap();
        assert!(t.in_tree("t"));
        let swap = vec![1, 0, 3, 2];
        let s = ProductAction {
            points: 4,
            vertex: BTreeMap::from([
                ("a".to_string(), (z2.clone(), vec![vec![0, 1, 2, 3], swap.clone()])),
                ("b".to_string(), (z2.clone(), vec![vec![0, 1, 2, 3], swap.clone()])),
            ]),
            edges: BTreeMap::from([("x".to_string(), vec![2, 3, 0, 1])]),
        };
        let m = lcs_from_action(&c, &d, &t, &s).unwrap();
        let q = q_functor(&m, &c, &d, &t).unwrap();
        assert_eq!(q.edges["x"], vec![2, 3, 0, 1]);
        assert_eq!(q.vertex["a"].1, s.vertex["a"].1);
        assert_eq!(decompose_system(&m, &c, &d).unwrap().len(), 1);
    }
}
