use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{GroupData, LcsSystem, TwoComplex};
use crate::error::{input, Error, Result};
use crate::gsets::{invert_perm, GSet};

/// Set-valued descent datum over a 2-complex: a fiber per vertex and, per edge,
/// a bijection `φ_e: X_{∂₀e} → X_{∂₁e}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentDatum {
    pub fibers: BTreeMap<String, usize>,
    pub phi: BTreeMap<String, Vec<usize>>,
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&y| a[y]).collect()
}

fn is_bijection(m: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    m.len() == n && m.iter().all(|&y| y < n && !std::mem::replace(&mut seen[y], true))
}

impl DescentDatum {
    /// Shapes plus the cocycle `φ_{∂₂f} ∘ φ_{∂₀f} = φ_{∂₁f}` on every face.
    pub fn validate(&self, c: &TwoComplex) -> Result<()> {
        for e in &c.edges {
            let p = self.phi.get(&e.id).ok_or_else(|| Error::Input(format!("no gluing for edge {}", e.id)))?;
            let n0 = *self.fibers.get(&e.d0).ok_or_else(|| Error::Input(format!("no fiber at {}", e.d0)))?;
            let n1 = *self.fibers.get(&e.d1).ok_or_else(|| Error::Input(format!("no fiber at {}", e.d1)))?;
            if n0 != n1 || !is_bijection(p, n1) {
                return input(format!("gluing on edge {} is not a bijection", e.id));
            }
        }
        for f in &c.faces {
            let lhs = compose(&self.phi[&f.d2], &self.phi[&f.d0]);
            if lhs != self.phi[&f.d1] {
                return input(format!("cocycle condition fails on face {}", f.id));
            }
        }
        Ok(())
    }
}

fn require_trivial(d: &GroupData) -> Result<()> {
    let all = d.vertex_groups.values().chain(d.edge_groups.values()).chain(d.face_groups.values());
    if all.into_iter().any(|g| g.order() != 1) {
        return Err(Error::Unsupported("descent data are handled for trivial group data only".into()));
    }
    Ok(())
}

fn trivial_set(g: &crate::groups::GroupRef, n: usize) -> GSet {
    GSet {
        group: g.clone(),
        labels: (0..n).map(|i| i.to_string()).collect(),
        perms: vec![(0..n).collect()],
        tower: None,
    }
}

/// `M_v = X_v`, `M_e = X_{∂₀e}` with `m_{∂₀} = id`, `m_{∂₁} = φ_e`, `M_f = X_{v₂f}`.
pub fn discretize_descent(dd: &DescentDatum, c: &TwoComplex, d: &GroupData) -> Result<LcsSystem> {
    require_trivial(d)?;
    dd.validate(c)?;
    let mut m = LcsSystem {
        vertex_sets: BTreeMap::new(),
        edge_sets: BTreeMap::new(),
        face_sets: BTreeMap::new(),
        edge_maps: BTreeMap::new(),
        face_maps: BTreeMap::new(),
        face_vertex_maps: BTreeMap::new(),
    };
    for v in &c.vertices {
        m.vertex_sets.insert(v.clone(), trivial_set(d.vertex_group(v)?, dd.fibers[v]));
    }
    for e in &c.edges {
        let n = dd.fibers[&e.d0];
        m.edge_sets.insert(e.id.clone(), trivial_set(d.edge_group(&e.id)?, n));
        m.edge_maps.insert((e.id.clone(), 0), (0..n).collect());
        m.edge_maps.insert((e.id.clone(), 1), dd.phi[&e.id].clone());
    }
    for f in &c.faces {
        let n = dd.fibers[c.face_vertex(&f.id, 2)?];
        m.face_sets.insert(f.id.clone(), trivial_set(d.face_group(&f.id)?, n));
        let (phi0, phi1) = (&dd.phi[&f.d0], &dd.phi[&f.d1]);
        m.face_vertex_maps.insert((f.id.clone(), 2), (0..n).collect());
        m.face_vertex_maps.insert((f.id.clone(), 1), phi0.clone());
        m.face_vertex_maps.insert((f.id.clone(), 0), phi1.clone());
        m.face_maps.insert((f.id.clone(), 0), (0..n).collect());
        m.face_maps.insert((f.id.clone(), 1), (0..n).collect());
        m.face_maps.insert((f.id.clone(), 2), phi0.clone());
    }
    m.validate(c, d)?;
    Ok(m)
}

/// `X_v = M_v` and `φ_e = m_{∂₁} ∘ m_{∂₀}⁻¹`.
pub fn rebuild_descent(m: &LcsSystem, c: &TwoComplex, d: &GroupData) -> Result<DescentDatum> {
    require_trivial(d)?;
    m.validate(c, d)?;
    let fibers = m.vertex_sets.iter().map(|(v, s)| (v.clone(), s.len())).collect();
    let phi = c
        .edges
        .iter()
        .map(|e| {
            let m0 = &m.edge_maps[&(e.id.clone(), 0)];
            let m1 = &m.edge_maps[&(e.id.clone(), 1)];
            (e.id.clone(), compose(m1, &invert_perm(m0)))
        })
        .collect();
    let dd = DescentDatum { fibers, phi };
    dd.validate(c)?;
    Ok(dd)
}

/// Checks that `rebuild` followed by `discretize` returns a system isomorphic to `m`, using the
/// bijections `id` on vertices, `m_{∂₀}` on edges and `m_{v₂}` on faces.
pub fn lcs_isomorphic(m: &LcsSystem, c: &TwoComplex, d: &GroupData) -> Result<bool> {
    let back = discretize_descent(&rebuild_descent(m, c, d)?, c, d)?;
    let edge_iso = |e: &str| &m.edge_maps[&(e.to_string(), 0)];
    let face_iso = |f: &str| &m.face_vertex_maps[&(f.to_string(), 2)];
    for e in &c.edges {
        for j in 0..2 {
            let k = (e.id.clone(), j);
            if compose(&back.edge_maps[&k], edge_iso(&e.id)) != m.edge_maps[&k] {
                return Ok(false);
            }
        }
    }
    for f in &c.faces {
        for k in 0..3u8 {
            let key = (f.id.clone(), k);
            let e = c.face_side(&f.id, k)?;
            if compose(&back.face_maps[&key], face_iso(&f.id)) != compose(edge_iso(e), &m.face_maps[&key]) {
                return Ok(false);
            }
            if compose(&back.face_vertex_maps[&key], face_iso(&f.id)) != m.face_vertex_maps[&key] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Descent datum for a cover by an indexed disjoint union: `φ_{ij}: X_j → X_i` for all pairs,
/// with `φ_{ij} ∘ φ_{jk} = φ_{ik}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexedDatum {
    pub fibers: Vec<usize>,
    pub phi: BTreeMap<(usize, usize), Vec<usize>>,
}

/// The part of an [`IndexedDatum`] over ordered pairs `i < j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedDatum {
    pub fibers: Vec<usize>,
    pub phi: BTreeMap<(usize, usize), Vec<usize>>,
}

fn pair_map<'a>(
    phi: &'a BTreeMap<(usize, usize), Vec<usize>>,
    fibers: &[usize],
    i: usize,
    j: usize,
) -> Result<&'a Vec<usize>> {
    let p = phi.get(&(i, j)).ok_or_else(|| Error::Input(format!("no gluing for ({i}, {j})")))?;
    if fibers[i] != fibers[j] || !is_bijection(p, fibers[i]) {
        return input(format!("gluing ({i}, {j}) is not a bijection"));
    }
    Ok(p)
}

fn check_triples(phi: &BTreeMap<(usize, usize), Vec<usize>>, triples: impl Iterator<Item = (usize, usize, usize)>) -> Result<()> {
    for (i, j, k) in triples {
        if compose(&phi[&(i, j)], &phi[&(j, k)]) != phi[&(i, k)] {
            return input(format!("cocycle condition fails on ({i}, {j}, {k})"));
        }
    }
    Ok(())
}

/// Restricts to ordered pairs. Refuses when a diagonal map is not the identity.
pub fn ordered_reduction(full: &IndexedDatum) -> Result<OrderedDatum> {
    let n = full.fibers.len();
    for i in 0..n {
        for j in 0..n {
            pair_map(&full.phi, &full.fibers, i, j)?;
        }
        if let Some(x) = (0..full.fibers[i]).find(|&x| full.phi[&(i, i)][x] != x) {
            return input(format!("diagonal gluing ({i}, {i}) moves point {x}"));
        }
    }
    check_triples(&full.phi, (0..n).flat_map(|i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k)))))?;
    let phi = full.phi.iter().filter(|((i, j), _)| i < j).map(|(k, v)| (*k, v.clone())).collect();
    Ok(OrderedDatum { fibers: full.fibers.clone(), phi })
}

/// Fills in `φ_{ii} = id` and `φ_{ji} = φ_{ij}⁻¹`, then checks the full cocycle condition.
pub fn reconstruct_ordered(ord: &OrderedDatum) -> Result<IndexedDatum> {
    let n = ord.fibers.len();
    let mut phi = BTreeMap::new();
    for i in 0..n {
        phi.insert((i, i), (0..ord.fibers[i]).collect());
        for j in i + 1..n {
            let p = pair_map(&ord.phi, &ord.fibers, i, j)?;
            phi.insert((i, j), p.clone());
            phi.insert((j, i), invert_perm(p));
        }
    }
    check_triples(&phi, (0..n).flat_map(|i| (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| (i, j, k)))))?;
    check_triples(&phi, (0..n).flat_map(|i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k)))))?;
    Ok(IndexedDatum { fibers: ord.fibers.clone(), phi })
}
