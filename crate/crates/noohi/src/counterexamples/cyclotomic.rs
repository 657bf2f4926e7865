//! Vertex groups `ℤ/m ⋊ (ℤ/m)^×`, Galois-level edge and face groups, and conjugation by path
//! elements `γ ∈ ℤ/m`: the arithmetic data, its geometric part and the resulting δ/θ.

use std::collections::BTreeMap;

use crate::complexes::{spanning_tree, GraphWithTree, GroupData, PathData, TwoComplex};
use crate::error::Result;
use crate::groups::{arc, unit_action, FiniteGroup, FiniteHom, GroupRef};
use crate::looplike::{EtaData, SemidirectVertex};
use crate::vankampen::{build_presentation, EdgeRelations, Presentation};

#[derive(Clone, Debug)]
pub struct CyclotomicSetting {
    pub complex: TwoComplex,
    pub tree: GraphWithTree,
    pub gal: GroupRef,
    pub geometric_group: GroupRef,
    pub arithmetic: GroupData,
    pub geometric: GroupData,
    pub eta: EtaData,
    pub presentation: Presentation,
}

/// `edge_gamma(e, j)` and `face_gamma(f, i)` are the path elements in `ℤ/m` at the vertex
/// ends; face-to-edge paths are trivial.
pub fn cyclotomic_setting(
    c: &TwoComplex,
    modulus: usize,
    edge_gamma: impl Fn(&str, u8) -> usize,
    face_gamma: impl Fn(&str, u8) -> usize,
) -> Result<CyclotomicSetting> {
    c.validate()?;
    let (k, q, action) = unit_action(modulus);
    let (k, gal) = (arc(k), arc(q));
    let full = arc(FiniteGroup::semidirect(&k, &gal, &action)?);
    let nq = gal.order();
    let lift = |x: usize| k.identity() * nq + x;
    let embed = FiniteHom::new(gal.clone(), full.clone(), (0..nq).map(lift).collect())?;
    let geo = |x: usize| x * nq + gal.identity();

    let mut raw = GroupData::empty();
    for v in &c.vertices {
        raw.vertex_groups.insert(v.clone(), full.clone());
    }
    for e in &c.edges {
        raw.edge_groups.insert(e.id.clone(), gal.clone());
        for j in 0..2 {
            raw.edge_maps.insert((e.id.clone(), j), embed.clone());
        }
    }
    for f in &c.faces {
        raw.face_groups.insert(f.id.clone(), gal.clone());
        for i in 0..3 {
            raw.face_maps.insert((f.id.clone(), i), FiniteHom::identity(&gal));
            raw.face_vertex_maps.insert((f.id.clone(), i), embed.clone());
        }
    }
    let mut paths = PathData {
        raw,
        edge_paths: BTreeMap::new(),
        face_paths: BTreeMap::new(),
        face_vertex_paths: BTreeMap::new(),
    };
    for e in &c.edges {
        for j in 0..2 {
            paths.edge_paths.insert((e.id.clone(), j), geo(edge_gamma(&e.id, j) % modulus));
        }
    }
    for f in &c.faces {
        for i in 0..3 {
            paths.face_paths.insert((f.id.clone(), i), gal.identity());
            paths.face_vertex_paths.insert((f.id.clone(), i), geo(face_gamma(&f.id, i) % modulus));
        }
    }
    let arithmetic = paths.group_data(c)?;

    let trivial = arc(FiniteGroup::trivial());
    let mut geometric = GroupData::constant(c, &trivial);
    for v in &c.vertices {
        geometric.vertex_groups.insert(v.clone(), k.clone());
    }
    for e in &c.edges {
        for j in 0..2 {
            geometric.edge_maps.insert((e.id.clone(), j), FiniteHom::trivial(&trivial, &k));
        }
    }
    for f in &c.faces {
        for i in 0..3 {
            geometric.face_vertex_maps.insert((f.id.clone(), i), FiniteHom::trivial(&trivial, &k));
        }
    }
    for (key, &a) in &arithmetic.alpha {
        geometric.alpha.insert(key.clone(), a / nq);
    }

    let tree = spanning_tree(c)?;
    let vertices: BTreeMap<String, SemidirectVertex> = c
        .vertices
        .iter()
        .map(|v| (v.clone(), SemidirectVertex { geometric: k.clone(), action: action.clone() }))
        .collect();
    let sections: BTreeMap<String, Vec<usize>> = c.edges.iter().map(|e| (e.id.clone(), (0..nq).collect())).collect();
    let eta = EtaData::from_group_data(c, &arithmetic, &tree, &gal, &vertices, &sections)?;
    let presentation = build_presentation(c, &geometric, &tree, EdgeRelations::AllElements)?;
    Ok(CyclotomicSetting {
        complex: c.clone(),
        tree,
        gal,
        geometric_group: k,
        arithmetic,
        geometric,
        eta,
        presentation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexamples::nodal_complex;
    use crate::looplike::{verify_phi_identities, verify_relation_stability};
    use crate::words::{Atom, Word};

    #[test]
    fn minus_one_paths_give_sigma_minus_one() {
        let s = cyclotomic_setting(&nodal_complex(), 9, |_, _| 8, |_, _| 8).unwrap();
        assert!(s.eta.cocycle_failures().is_empty());
        for sigma in 0..s.gal.order() {
            let u: usize = s.gal.name(sigma).parse().unwrap();
            assert_eq!(s.eta.delta[&("d".to_string(), sigma)], (u + 8) % 9);
        }
    }

    #[test]
    fn stability_on_the_nodal_complex() {
        let s = cyclotomic_setting(&nodal_complex(), 9, |e, j| e.len() + j as usize, |f, i| f.len() * 2 + i as usize)
            .unwrap();
        assert!(crate::complexes::validate_group_data(&s.complex, &s.arithmetic).unwrap().is_empty());
        let rep = verify_relation_stability(&s.presentation, &s.complex, &s.geometric, &s.eta, 1000).unwrap();
        assert!(rep.ok(), "{:?}", rep.failures);
        let w: Word = vec![Atom::edge("p01", 1), Atom::vertex("C", 4), Atom::edge("d", -1)].into();
        assert!(verify_phi_identities(&s.eta, &[w]).unwrap().ok());
    }
}
