//! Presentations of the nodal curve and of wedges of curves glued at a rational point.

use std::collections::BTreeMap;

use crate::complexes::{EdgeRecord, FaceRecord, GroupData, TwoComplex};
use crate::error::{input, Result};
use crate::groups::{arc, FiniteGroup, GroupRef};
use crate::vankampen::{present, Presentation, Relation, RelationKind};
use crate::words::{Atom, Word};

/// One vertex `C̃`, the diagonal `d` and the two off-diagonal points `p01`, `p10`;
/// the face `p_abc` has sides `p_bc`, `p_ac`, `p_ab`, where `p_aa` is the diagonal.
pub fn nodal_complex() -> TwoComplex {
    let loop_at = |id: &str| EdgeRecord { id: id.into(), d0: "C".into(), d1: "C".into() };
    let side = |a: char, b: char| if a == b { "d".to_string() } else { format!("p{a}{b}") };
    let mut faces = vec![FaceRecord { id: "C".into(), d0: "d".into(), d1: "d".into(), d2: "d".into() }];
    for s in ["001", "010", "011", "100", "101", "110"] {
        let c: Vec<char> = s.chars().collect();
        faces.push(FaceRecord { id: format!("p{s}"), d0: side(c[1], c[2]), d1: side(c[0], c[2]), d2: side(c[0], c[1]) });
    }
    TwoComplex { vertices: vec!["C".into()], edges: vec![loop_at("d"), loop_at("p01"), loop_at("p10")], faces }
}

/// Every simplex carries the Galois level, all maps are identities, α is trivial.
pub fn nodal_presentation(gal: &GroupRef) -> Result<Presentation> {
    let c = nodal_complex();
    present(&c, &GroupData::constant(&c, gal))
}

/// A vertex group `G ⋊ Gal` given by its geometric part and the Galois action on it.
#[derive(Clone, Debug)]
pub struct WedgeVertex {
    pub geometric: GroupRef,
    /// `action[σ][g] = ᵗg`
    pub action: Vec<Vec<usize>>,
}

/// `(∗ᵢ (Gᵢ ⋊ Gal) ∗ (ℤ × Gal)^{∗loops}) / ⟨⟨ιᵢ(σ) = ι_{i′}(σ)⟩⟩`, written with one shared
/// Galois factor `gal`, vertex factors `v0, v1, …` and loop letters `y0, y1, …`.
pub fn wedge_presentation(vertices: &[WedgeVertex], loops: usize, gal: &GroupRef) -> Result<Presentation> {
    let mut vertex_groups = BTreeMap::from([("gal".to_string(), gal.clone())]);
    let mut relations = Vec::new();
    let q = gal.order();
    for (i, v) in vertices.iter().enumerate() {
        if v.action.len() != q {
            return input(format!("vertex {i}: action has {} rows for a Galois level of order {q}", v.action.len()));
        }
        let full = arc(FiniteGroup::semidirect(&v.geometric, gal, &v.action)?);
        let id = format!("v{i}");
        for &s in gal.generators() {
            // ι_i(σ) = (1, σ) sits at index σ
            let w: Word = vec![Atom::vertex(&id, s), Atom::vertex("gal", gal.inv(s))].into();
            relations.push(Relation { kind: RelationKind::Extra, word: w });
        }
        vertex_groups.insert(id, full);
    }
    let mut edge_generators = Vec::new();
    for j in 0..loops {
        let y = format!("y{j}");
        for &s in gal.generators() {
            let w: Word =
                vec![Atom::edge(&y, 1), Atom::vertex("gal", s), Atom::edge(&y, -1), Atom::vertex("gal", gal.inv(s))].into();
            relations.push(Relation { kind: RelationKind::Extra, word: w });
        }
        edge_generators.push(y);
    }
    Ok(Presentation { vertex_groups, edge_generators, relations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vankampen::count_homs;

    #[test]
    fn trivial_galois_nodal_behaves_as_integers() {
        let p = nodal_presentation(&arc(FiniteGroup::cyclic(1))).unwrap();
        for n in 1..=6 {
            let t = arc(FiniteGroup::cyclic(n));
            assert_eq!(count_homs(&p, &t, 1_000_000).unwrap().exact(), Some(n as u64));
        }
    }

    #[test]
    fn single_vertex_wedge_is_the_semidirect_level() {
        let (k, q, action) = crate::groups::unit_action(3);
        let (k, q) = (arc(k), arc(q));
        let p = wedge_presentation(&[WedgeVertex { geometric: k.clone(), action: action.clone() }], 0, &q).unwrap();
        let full = arc(FiniteGroup::semidirect(&k, &q, &action).unwrap());
        let s3 = arc(FiniteGroup::symmetric(3));
        let expected = crate::groups::count_homomorphisms(&full, &s3) as u64;
        assert_eq!(count_homs(&p, &s3, 1_000_000).unwrap().exact(), Some(expected));
    }

    #[test]
    fn bad_action_rejected() {
        let q = arc(FiniteGroup::cyclic(2));
        let k = arc(FiniteGroup::cyclic(3));
        assert!(wedge_presentation(&[WedgeVertex { geometric: k, action: vec![(0..3).collect()] }], 0, &q).is_err());
    }
}
