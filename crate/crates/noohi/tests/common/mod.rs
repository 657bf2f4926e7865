#![allow(dead_code)]

use std::collections::BTreeMap;

use noohi::complexes::{DescentDatum, EdgeRecord, FaceRecord, GroupData, IndexedDatum, TwoComplex};
use noohi::counterexamples::{nodal_complex, IntervalGSet, Side};
use noohi::groups::{arc, homomorphisms, named, FiniteGroup, FiniteHom, GroupRef};
use noohi::gsets::{catalog, ProductAction};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn g(name: &str) -> GroupRef {
    arc(named(name).unwrap_or_else(|| panic!("unknown group {name}")))
}

/// Every named group of order at most 24.
pub fn corpus() -> Vec<GroupRef> {
    let mut names: Vec<String> = (1..=24).map(|n| format!("Z/{n}")).collect();
    names.extend(["S3", "S4", "A4", "Q8"].map(String::from));
    names.extend((3..=12).map(|n| format!("D{n}")));
    names.extend([8, 9, 15, 16, 20, 21, 24].map(|n| format!("U{n}")));
    names.iter().map(|n| g(n)).collect()
}

/// `|Hom(Gal × ℤ, T)| = Σ_{φ: Gal → T} |C_T(im φ)|`
pub fn gal_times_z(gal: &GroupRef, t: &GroupRef) -> u64 {
    homomorphisms(gal, t)
        .iter()
        .map(|h| {
            let im = h.image();
            (0..t.order()).filter(|&x| im.iter().all(|&y| t.mul(x, y) == t.mul(y, x))).count() as u64
        })
        .sum()
}

pub fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

pub fn inverse(p: &[usize]) -> Vec<usize> {
    let mut q = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        q[x] = i;
    }
    q
}

/// A random `G`-set on exactly `n` points: random transitive pieces, padded with fixed points.
pub fn random_gset(rng: &mut ChaCha8Rng, grp: &GroupRef, n: usize) -> Vec<Vec<usize>> {
    let mut perms: Vec<Vec<usize>> = vec![Vec::with_capacity(n); grp.order()];
    let mut used = 0;
    while used < n {
        let (cat, _) = catalog(grp, n - used);
        let piece = &cat[rng.gen_range(0..cat.len())].gset;
        for (x, p) in perms.iter_mut().enumerate() {
            p.extend(piece.perms[x].iter().map(|y| y + used));
        }
        used += piece.len();
    }
    let relabel = random_perm(rng, n);
    let back = inverse(&relabel);
    perms.iter().map(|p| (0..n).map(|x| relabel[p[back[x]]]).collect()).collect()
}

fn edge(id: &str, d1: &str, d0: &str) -> EdgeRecord {
    EdgeRecord { id: id.into(), d0: d0.into(), d1: d1.into() }
}

fn face(id: &str, d0: &str, d1: &str, d2: &str) -> FaceRecord {
    FaceRecord { id: id.into(), d0: d0.into(), d1: d1.into(), d2: d2.into() }
}

/// Vertices `a, b`, tree edge `t: a → b`, loop `x` at `a`, edge `y: b → a`.
pub fn theta_graph() -> TwoComplex {
    TwoComplex {
        vertices: vec!["a".into(), "b".into()],
        edges: vec![edge("t", "a", "b"), edge("x", "a", "a"), edge("y", "b", "a")],
        faces: vec![],
    }
}

/// Two triangles glued along `12`.
pub fn two_triangles() -> TwoComplex {
    TwoComplex {
        vertices: ["0", "1", "2", "3"].map(String::from).to_vec(),
        edges: vec![edge("01", "0", "1"), edge("02", "0", "2"), edge("12", "1", "2"), edge("13", "1", "3"), edge("23", "2", "3")],
        faces: vec![face("012", "12", "02", "01"), face("123", "23", "13", "12")],
    }
}

fn trivial_edges(c: &TwoComplex, vertex: &BTreeMap<String, GroupRef>) -> GroupData {
    let one = arc(FiniteGroup::trivial());
    let mut d = GroupData::constant(c, &one);
    for (v, grp) in vertex {
        d.vertex_groups.insert(v.clone(), grp.clone());
    }
    for e in &c.edges {
        for j in 0..2 {
            let end = c.edge_end(&e.id, j).unwrap().to_string();
            d.edge_maps.insert((e.id.clone(), j), FiniteHom::trivial(&one, &d.vertex_groups[&end]));
        }
    }
    for f in &c.faces {
        for i in 0..3 {
            let v = c.face_vertex(&f.id, i).unwrap().to_string();
            d.face_vertex_maps.insert((f.id.clone(), i), FiniteHom::trivial(&one, &d.vertex_groups[&v]));
        }
    }
    d
}

pub struct LcsCase {
    pub complex: TwoComplex,
    pub data: GroupData,
    pub action: ProductAction,
}

/// A seeded action of the free product satisfying the edge and face relations, on at most 6 points.
pub fn random_lcs_case(rng: &mut ChaCha8Rng) -> LcsCase {
    let n = rng.gen_range(1..=6);
    match rng.gen_range(0..4) {
        0 => {
            let c = theta_graph();
            let pool = ["1", "Z/2", "Z/3", "S3"];
            let ga = g(pool[rng.gen_range(0..4)]);
            let gb = g(pool[rng.gen_range(0..4)]);
            let d = trivial_edges(&c, &BTreeMap::from([("a".to_string(), ga.clone()), ("b".to_string(), gb.clone())]));
            let vertex = BTreeMap::from([
                ("a".to_string(), (ga.clone(), random_gset(rng, &ga, n))),
                ("b".to_string(), (gb.clone(), random_gset(rng, &gb, n))),
            ]);
            let edges = BTreeMap::from([("x".to_string(), random_perm(rng, n)), ("y".to_string(), random_perm(rng, n))]);
            LcsCase { complex: c, data: d, action: ProductAction { points: n, vertex, edges } }
        }
        1 => {
            // the tree edge carries Z/2 into both vertex groups, so both act through the same involution
            let c = theta_graph();
            let z2 = g("Z/2");
            let mut d = trivial_edges(&c, &BTreeMap::from([("a".to_string(), z2.clone()), ("b".to_string(), z2.clone())]));
            d.edge_groups.insert("t".into(), z2.clone());
            for j in 0..2 {
                d.edge_maps.insert(("t".into(), j), FiniteHom::identity(&z2));
            }
            let tau = random_gset(rng, &z2, n);
            let vertex =
                BTreeMap::from([("a".to_string(), (z2.clone(), tau.clone())), ("b".to_string(), (z2.clone(), tau))]);
            let edges = BTreeMap::from([("x".to_string(), random_perm(rng, n)), ("y".to_string(), random_perm(rng, n))]);
            LcsCase { complex: c, data: d, action: ProductAction { points: n, vertex, edges } }
        }
        2 => {
            let c = nodal_complex();
            let one = arc(FiniteGroup::trivial());
            let d = GroupData::constant(&c, &one);
            let pi = random_perm(rng, n);
            let vertex = BTreeMap::from([("C".to_string(), (one, vec![(0..n).collect()]))]);
            let edges = BTreeMap::from([
                ("d".to_string(), (0..n).collect()),
                ("p10".to_string(), inverse(&pi)),
                ("p01".to_string(), pi),
            ]);
            LcsCase { complex: c, data: d, action: ProductAction { points: n, vertex, edges } }
        }
        _ => {
            let c = nodal_complex();
            let z2 = g("Z/2");
            let d = GroupData::constant(&c, &z2);
            let tau = random_gset(rng, &z2, n);
            let mut pi = tau[1].clone();
            for _ in 0..1000 {
                let cand = random_perm(rng, n);
                if (0..n).all(|x| cand[tau[1][x]] == tau[1][cand[x]]) {
                    pi = cand;
                    break;
                }
            }
            let vertex = BTreeMap::from([("C".to_string(), (z2, tau))]);
            let edges = BTreeMap::from([
                ("d".to_string(), (0..n).collect()),
                ("p10".to_string(), inverse(&pi)),
                ("p01".to_string(), pi),
            ]);
            LcsCase { complex: c, data: d, action: ProductAction { points: n, vertex, edges } }
        }
    }
}

/// A seeded descent datum: a coboundary on two triangles, or a loop monodromy on the nodal complex.
pub fn random_descent(rng: &mut ChaCha8Rng) -> (TwoComplex, DescentDatum) {
    let n = rng.gen_range(1..=5);
    if rng.gen_bool(0.5) {
        let c = two_triangles();
        let psi: BTreeMap<String, Vec<usize>> = c.vertices.iter().map(|v| (v.clone(), random_perm(rng, n))).collect();
        let phi = c
            .edges
            .iter()
            .map(|e| {
                let back = inverse(&psi[&e.d1]);
                (e.id.clone(), (0..n).map(|x| back[psi[&e.d0][x]]).collect())
            })
            .collect();
        let fibers = c.vertices.iter().map(|v| (v.clone(), n)).collect();
        (c, DescentDatum { fibers, phi })
    } else {
        let c = nodal_complex();
        let pi = random_perm(rng, n);
        let phi = BTreeMap::from([
            ("d".to_string(), (0..n).collect()),
            ("p10".to_string(), inverse(&pi)),
            ("p01".to_string(), pi),
        ]);
        (c, DescentDatum { fibers: BTreeMap::from([("C".to_string(), n)]), phi })
    }
}

/// `φ_{ij} = ψ_i⁻¹ ψ_j` for random bijections `ψ_i`.
pub fn random_indexed(rng: &mut ChaCha8Rng) -> IndexedDatum {
    let k = rng.gen_range(1..=4);
    let n = rng.gen_range(1..=5);
    let psi: Vec<Vec<usize>> = (0..k).map(|_| random_perm(rng, n)).collect();
    let mut phi = BTreeMap::new();
    for i in 0..k {
        let back = inverse(&psi[i]);
        for j in 0..k {
            phi.insert((i, j), (0..n).map(|x| back[psi[j][x]]).collect());
        }
    }
    IndexedDatum { fibers: vec![n; k], phi }
}

pub fn brute_force_semilinear(s: &IntervalGSet, q: u64) -> usize {
    semilinear_maps(s, q).len()
}

/// Every map `φ` on the window fixing the base point with `φ(k·x) = (qk)·φ(x)` for both actions,
/// wherever both sides are defined. Each `a`-orbit is determined by the image of its `0̄`.
pub fn semilinear_maps(s: &IntervalGSet, q: u64) -> Vec<Vec<Option<usize>>> {
    let orbits: Vec<_> = s.a.iter().filter(|iv| iv.complete).collect();
    let candidates: Vec<usize> = (1..=s.window).filter(|&p| s.interval_of(Side::A, p).is_some_and(|iv| iv.complete)).collect();
    let mut found = Vec::new();
    let mut choice = vec![0usize; orbits.len()];
    loop {
        let mut phi = vec![None; s.window + 1];
        let mut ok = true;
        for (o, iv) in orbits.iter().enumerate() {
            let y = candidates[choice[o]];
            let y_size = s.interval_of(Side::A, y).unwrap().size;
            if iv.size % y_size != 0 {
                ok = false;
                break;
            }
            for k in 0..iv.size {
                let x = iv.position_of(k).unwrap();
                let twisted = ((q as u128 * k as u128) % y_size as u128) as i128;
                phi[x] = s.act(Side::A, twisted, y);
            }
        }
        if ok && phi[s.base] == Some(s.base) {
            ok = (1..=s.window).all(|x| {
                let Some(fx) = phi[x] else { return true };
                let Some(iv) = s.interval_of(Side::B, x) else { return true };
                if !iv.complete {
                    return true;
                }
                (0..iv.size as i128).all(|k| {
                    let lhs = s.act(Side::B, k, x).and_then(|x2| phi[x2]);
                    let rhs = s.act(Side::B, (q as i128 * k) % iv.size as i128, fx);
                    match (lhs, rhs) {
                        (Some(l), Some(r)) => l == r,
                        _ => true,
                    }
                })
            });
            if ok {
                found.push(phi);
            }
        }
        let mut i = 0;
        loop {
            if i == choice.len() {
                return found;
            }
            choice[i] += 1;
            if choice[i] < candidates.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}
