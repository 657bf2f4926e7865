use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{vertex_index, TwoComplex};
use crate::error::{input, Error, Result};
use crate::groups::{arc, named, FiniteHom, GroupRef};
use crate::words::WordContext;

/// Group data `(𝒢, α)` on a 2-complex at one finite level.
#[derive(Clone, Debug)]
pub struct GroupData {
    pub vertex_groups: BTreeMap<String, GroupRef>,
    pub edge_groups: BTreeMap<String, GroupRef>,
    pub face_groups: BTreeMap<String, GroupRef>,
    /// `(e, j)`: `𝒢(e) → 𝒢(∂_j e)`
    pub edge_maps: BTreeMap<(String, u8), FiniteHom>,
    /// `(f, k)`: `𝒢(f) → 𝒢(∂_k f)`
    pub face_maps: BTreeMap<(String, u8), FiniteHom>,
    /// `(f, i)`: `𝒢(f) → 𝒢(v_i f)`
    pub face_vertex_maps: BTreeMap<(String, u8), FiniteHom>,
    /// `(f, k, j)`: element of `𝒢(∂_j ∂_k f)`
    pub alpha: BTreeMap<(String, u8, u8), usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SquareFailure {
    pub face: String,
    pub side: u8,
    pub end: u8,
    pub generator: usize,
}

fn lookup<'a, K: Ord + std::fmt::Debug, V>(m: &'a BTreeMap<K, V>, k: &K, what: &str) -> Result<&'a V> {
    m.get(k).ok_or_else(|| Error::Input(format!("missing {what} {k:?}")))
}

impl GroupData {
    pub fn vertex_group(&self, v: &str) -> Result<&GroupRef> {
        lookup(&self.vertex_groups, &v.to_string(), "vertex group")
    }

    pub fn edge_group(&self, e: &str) -> Result<&GroupRef> {
        lookup(&self.edge_groups, &e.to_string(), "edge group")
    }

    pub fn face_group(&self, f: &str) -> Result<&GroupRef> {
        lookup(&self.face_groups, &f.to_string(), "face group")
    }

    pub fn edge_map(&self, e: &str, j: u8) -> Result<&FiniteHom> {
        lookup(&self.edge_maps, &(e.to_string(), j), "edge boundary map")
    }

    pub fn face_map(&self, f: &str, k: u8) -> Result<&FiniteHom> {
        lookup(&self.face_maps, &(f.to_string(), k), "face boundary map")
    }

    pub fn face_vertex_map(&self, f: &str, i: u8) -> Result<&FiniteHom> {
        lookup(&self.face_vertex_maps, &(f.to_string(), i), "face-vertex map")
    }

    pub fn alpha(&self, f: &str, k: u8, j: u8) -> Result<usize> {
        lookup(&self.alpha, &(f.to_string(), k, j), "alpha entry").copied()
    }

    pub fn word_context(&self) -> WordContext {
        WordContext { groups: self.vertex_groups.clone() }
    }

    /// Every group is `g`, every map is the identity, every α is trivial.
    pub fn constant(c: &TwoComplex, g: &GroupRef) -> Self {
        let mut d = GroupData::empty();
        for v in &c.vertices {
            d.vertex_groups.insert(v.clone(), g.clone());
        }
        for e in &c.edges {
            d.edge_groups.insert(e.id.clone(), g.clone());
            for j in 0..2 {
                d.edge_maps.insert((e.id.clone(), j), FiniteHom::identity(g));
            }
        }
        for f in &c.faces {
            d.face_groups.insert(f.id.clone(), g.clone());
            for k in 0..3 {
                d.face_maps.insert((f.id.clone(), k), FiniteHom::identity(g));
                d.face_vertex_maps.insert((f.id.clone(), k), FiniteHom::identity(g));
                for j in 0..2 {
                    d.alpha.insert((f.id.clone(), k, j), g.identity());
                }
            }
        }
        d
    }

    pub fn empty() -> Self {
        GroupData {
            vertex_groups: BTreeMap::new(),
            edge_groups: BTreeMap::new(),
            face_groups: BTreeMap::new(),
            edge_maps: BTreeMap::new(),
            face_maps: BTreeMap::new(),
            face_vertex_maps: BTreeMap::new(),
            alpha: BTreeMap::new(),
        }
    }

    /// Checks that every map exists with the right source and target.
    pub fn check_shape(&self, c: &TwoComplex) -> Result<()> {
        let same = |a: &GroupRef, b: &GroupRef| crate::gsets::same_group(a, b);
        for e in &c.edges {
            let ge = self.edge_group(&e.id)?;
            for j in 0..2 {
                let h = self.edge_map(&e.id, j)?;
                if !same(&h.source, ge) || !same(&h.target, self.vertex_group(c.edge_end(&e.id, j)?)?) {
                    return input(format!("edge map ({}, {j}) has wrong endpoints", e.id));
                }
            }
        }
        for f in &c.faces {
            let gf = self.face_group(&f.id)?;
            for k in 0..3 {
                let h = self.face_map(&f.id, k)?;
                if !same(&h.source, gf) || !same(&h.target, self.edge_group(c.face_side(&f.id, k)?)?) {
                    return input(format!("face map ({}, {k}) has wrong endpoints", f.id));
                }
                let h = self.face_vertex_map(&f.id, k)?;
                if !same(&h.source, gf) || !same(&h.target, self.vertex_group(c.face_vertex(&f.id, k)?)?) {
                    return input(format!("face-vertex map ({}, {k}) has wrong endpoints", f.id));
                }
                for j in 0..2 {
                    let a = self.alpha(&f.id, k, j)?;
                    if a >= self.vertex_group(c.edge_end(c.face_side(&f.id, k)?, j)?)?.order() {
                        return input(format!("alpha ({}, {k}, {j}) out of range", f.id));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Lists every `(f, k, j)` where `𝒢(∂_j)∘𝒢(∂_k) ≠ conj(α)∘𝒢(v_i)` on a generator of `𝒢(f)`.
pub fn validate_group_data(c: &TwoComplex, d: &GroupData) -> Result<Vec<SquareFailure>> {
    d.check_shape(c)?;
    let mut out = Vec::new();
    for f in &c.faces {
        let gf = d.face_group(&f.id)?;
        for k in 0..3u8 {
            let e = c.face_side(&f.id, k)?;
            for j in 0..2u8 {
                let v = d.vertex_group(c.edge_end(e, j)?)?;
                let a = d.alpha(&f.id, k, j)?;
                let top = d.edge_map(e, j)?.compose(d.face_map(&f.id, k)?)?;
                let side = d.face_vertex_map(&f.id, vertex_index(k, j))?;
                for &g in gf.generators() {
                    if top.apply(g) != v.conj(a, side.apply(g)) {
                        out.push(SquareFailure { face: f.id.clone(), side: k, end: j, generator: g });
                        break;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Functorial "raw" maps plus path elements; the conjugated data is built by [`PathData::group_data`].
#[derive(Clone, Debug)]
pub struct PathData {
    pub raw: GroupData,
    /// `(e, j)`: element of `𝒢(∂_j e)`
    pub edge_paths: BTreeMap<(String, u8), usize>,
    /// `(f, k)`: element of `𝒢(∂_k f)`
    pub face_paths: BTreeMap<(String, u8), usize>,
    /// `(f, i)`: element of `𝒢(v_i f)`
    pub face_vertex_paths: BTreeMap<(String, u8), usize>,
}

impl PathData {
    /// `𝒢(∂) = c_γ ∘ raw` and `α_{vef} = γ_{ve} · raw(γ_{ef}) · γ_{vf}⁻¹`.
    pub fn group_data(&self, c: &TwoComplex) -> Result<GroupData> {
        let conj = |h: &FiniteHom, gamma: usize| FiniteHom {
            source: h.source.clone(),
            target: h.target.clone(),
            map: h.map.iter().map(|&y| h.target.conj(gamma, y)).collect(),
        };
        let raw = &self.raw;
        let mut d = raw.clone();
        for e in &c.edges {
            for j in 0..2 {
                let g = *lookup(&self.edge_paths, &(e.id.clone(), j), "edge path")?;
                d.edge_maps.insert((e.id.clone(), j), conj(raw.edge_map(&e.id, j)?, g));
            }
        }
        for f in &c.faces {
            for k in 0..3 {
                let g = *lookup(&self.face_paths, &(f.id.clone(), k), "face path")?;
                d.face_maps.insert((f.id.clone(), k), conj(raw.face_map(&f.id, k)?, g));
                let g = *lookup(&self.face_vertex_paths, &(f.id.clone(), k), "face-vertex path")?;
                d.face_vertex_maps.insert((f.id.clone(), k), conj(raw.face_vertex_map(&f.id, k)?, g));
            }
            for k in 0..3u8 {
                let e = c.face_side(&f.id, k)?;
                for j in 0..2u8 {
                    let v = raw.vertex_group(c.edge_end(e, j)?)?;
                    let g_ve = self.edge_paths[&(e.to_string(), j)];
                    let g_ef = self.face_paths[&(f.id.clone(), k)];
                    let g_vf = self.face_vertex_paths[&(f.id.clone(), vertex_index(k, j))];
                    let a = v.mul(v.mul(g_ve, raw.edge_map(e, j)?.apply(g_ef)), v.inv(g_vf));
                    d.alpha.insert((f.id.clone(), k, j), a);
                }
            }
        }
        Ok(d)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapRecord {
    pub simplex: String,
    pub index: u8,
    /// Images of the source group's generators, by element name.
    pub images: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlphaRecord {
    pub face: String,
    pub side: u8,
    pub end: u8,
    pub elem: String,
}

/// JSON form of group data. Groups are referenced by name (`Z/n`, `S3`, ...).
/// When `alpha` is absent all α are trivial; when a map is absent the source must be trivial.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupDataRecord {
    pub vertex: BTreeMap<String, String>,
    #[serde(default)]
    pub edge: BTreeMap<String, String>,
    #[serde(default)]
    pub face: BTreeMap<String, String>,
    #[serde(default)]
    pub edge_maps: Vec<MapRecord>,
    #[serde(default)]
    pub face_maps: Vec<MapRecord>,
    #[serde(default)]
    pub face_vertex_maps: Vec<MapRecord>,
    #[serde(default)]
    pub alpha: Option<Vec<AlphaRecord>>,
}

impl GroupDataRecord {
    pub fn resolve(&self, c: &TwoComplex) -> Result<GroupData> {
        let mut cache: BTreeMap<String, GroupRef> = BTreeMap::new();
        let mut group = |name: &str| -> Result<GroupRef> {
            if let Some(g) = cache.get(name) {
                return Ok(g.clone());
            }
            let g = arc(named(name).ok_or_else(|| Error::Input(format!("unknown group {name}")))?);
            cache.insert(name.to_string(), g.clone());
            Ok(g)
        };
        let mut d = GroupData::empty();
        let trivial = "1".to_string();
        for v in &c.vertices {
            d.vertex_groups.insert(v.clone(), group(self.vertex.get(v).unwrap_or(&trivial))?);
        }
        for e in &c.edges {
            d.edge_groups.insert(e.id.clone(), group(self.edge.get(&e.id).unwrap_or(&trivial))?);
        }
        for f in &c.faces {
            d.face_groups.insert(f.id.clone(), group(self.face.get(&f.id).unwrap_or(&trivial))?);
        }
        let build = |src: &GroupRef, tgt: &GroupRef, rec: Option<&MapRecord>| -> Result<FiniteHom> {
            match rec {
                None if src.order() == 1 => Ok(FiniteHom::trivial(src, tgt)),
                None => input("missing boundary map for a nontrivial group"),
                Some(r) => {
                    let imgs = r
                        .images
                        .iter()
                        .map(|n| tgt.index_of(n).ok_or_else(|| Error::Input(format!("unknown element {n}"))))
                        .collect::<Result<Vec<_>>>()?;
                    FiniteHom::from_generator_images(src, tgt, &imgs)
                        .ok_or_else(|| Error::Input(format!("images for ({}, {}) do not define a homomorphism", r.simplex, r.index)))
                }
            }
        };
        let find = |list: &[MapRecord], s: &str, i: u8| list.iter().find(|r| r.simplex == s && r.index == i).cloned();
        for e in &c.edges {
            for j in 0..2 {
                let tgt = d.vertex_groups[c.edge_end(&e.id, j)?].clone();
                let h = build(&d.edge_groups[&e.id], &tgt, find(&self.edge_maps, &e.id, j).as_ref())?;
                d.edge_maps.insert((e.id.clone(), j), h);
            }
        }
        for f in &c.faces {
            for k in 0..3 {
                let tgt = d.edge_groups[c.face_side(&f.id, k)?].clone();
                let h = build(&d.face_groups[&f.id], &tgt, find(&self.face_maps, &f.id, k).as_ref())?;
                d.face_maps.insert((f.id.clone(), k), h);
                let tgt = d.vertex_groups[c.face_vertex(&f.id, k)?].clone();
                let h = build(&d.face_groups[&f.id], &tgt, find(&self.face_vertex_maps, &f.id, k).as_ref())?;
                d.face_vertex_maps.insert((f.id.clone(), k), h);
                for j in 0..2 {
                    let v = &d.vertex_groups[c.edge_end(c.face_side(&f.id, k)?, j)?];
                    let a = match &self.alpha {
                        None => v.identity(),
                        Some(list) => {
                            let r = list
                                .iter()
                                .find(|r| r.face == f.id && r.side == k && r.end == j)
                                .ok_or_else(|| Error::Input(format!("missing alpha ({}, {k}, {j})", f.id)))?;
                            v.index_of(&r.elem).ok_or_else(|| Error::Input(format!("unknown element {}", r.elem)))?
                        }
                    };
                    d.alpha.insert((f.id.clone(), k, j), a);
                }
            }
        }
        Ok(d)
    }
}
