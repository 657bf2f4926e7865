//! JSON input records and their conversion into library values.

use std::collections::BTreeMap;
use std::path::Path;

use noohi::complexes::{DescentDatum, GroupData, GroupDataRecord, TwoComplex};
use noohi::groups::{arc, named, ApproxGroup, FiniteGroup, GroupRef, Homomorphism, LevelMap, QuotientTower};
use noohi::gsets::ProductAction;
use noohi::vankampen::{Presentation, PresentationRecord};
use noohi::words::LetterRecord;
use noohi::{Error, Result};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use sha2::{Digest, Sha256};

/// A loaded input file with its digest.
pub struct Loaded<T> {
    pub value: T,
    pub digest: String,
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<Loaded<T>> {
    let bytes = std::fs::read(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    let value = serde_json::from_slice(&bytes).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    let digest = hex::encode(Sha256::digest(&bytes));
    Ok(Loaded { value, digest })
}

pub fn group(name: &str) -> Result<GroupRef> {
    named(name).map(arc).ok_or_else(|| Error::Input(format!("unknown group {name}")))
}

pub fn complex(rec: TwoComplex) -> Result<TwoComplex> {
    rec.validate()?;
    Ok(rec)
}

pub fn group_data(c: &TwoComplex, rec: Option<GroupDataRecord>) -> Result<GroupData> {
    match rec {
        Some(r) => r.resolve(c),
        None => Ok(GroupData::constant(c, &arc(FiniteGroup::trivial()))),
    }
}

pub fn presentation(rec: &PresentationRecord) -> Result<Presentation> {
    Presentation::from_record(rec)
}

#[derive(Deserialize)]
pub struct TowerRecord {
    /// group names, coarsest level first
    pub levels: Vec<String>,
    /// `transitions[n]`: level `n+1` → level `n`
    #[serde(default)]
    pub transitions: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupSpec {
    Group(String),
    Tower(TowerRecord),
    Free(usize),
}

impl GroupSpec {
    pub fn resolve(&self) -> Result<ApproxGroup> {
        Ok(match self {
            GroupSpec::Group(n) => ApproxGroup::Finite(group(n)?),
            GroupSpec::Free(r) => ApproxGroup::FreeDiscrete(*r),
            GroupSpec::Tower(t) => {
                let levels = t.levels.iter().map(|n| group(n)).collect::<Result<Vec<_>>>()?;
                ApproxGroup::Tower(QuotientTower::new(levels, t.transitions.clone())?)
            }
        })
    }
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelMapRecord {
    Table(Vec<usize>),
    Images(Vec<usize>),
}

#[derive(Deserialize)]
pub struct HomRecord {
    pub source: GroupSpec,
    pub target: GroupSpec,
    pub levels: Vec<LevelMapRecord>,
}

impl HomRecord {
    pub fn resolve(&self) -> Result<Homomorphism> {
        let h = Homomorphism {
            source: self.source.resolve()?,
            target: self.target.resolve()?,
            levels: self
                .levels
                .iter()
                .map(|l| match l {
                    LevelMapRecord::Table(t) => LevelMap::Table(t.clone()),
                    LevelMapRecord::Images(v) => LevelMap::Images(v.clone()),
                })
                .collect(),
        };
        h.validate()?;
        Ok(h)
    }
}

#[derive(Deserialize)]
pub struct DictInput {
    pub map: HomRecord,
    /// a second map out of the first map's target, for the exactness items
    pub second: Option<HomRecord>,
}

#[derive(Deserialize)]
pub struct VertexActionRecord {
    pub group: String,
    /// one permutation of the points per group generator
    pub generators: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
pub struct ActionRecord {
    pub points: usize,
    #[serde(default)]
    pub vertex: BTreeMap<String, VertexActionRecord>,
    #[serde(default)]
    pub edges: BTreeMap<String, Vec<usize>>,
}

impl ActionRecord {
    pub fn resolve(&self) -> Result<ProductAction> {
        let mut vertex = BTreeMap::new();
        for (v, rec) in &self.vertex {
            let g = group(&rec.group)?;
            vertex.insert(v.clone(), (g.clone(), extend_generators(&g, &rec.generators, self.points)?));
        }
        let s = ProductAction { points: self.points, vertex, edges: self.edges.clone() };
        s.validate()?;
        Ok(s)
    }
}

/// Permutations for every element from those of the generators.
fn extend_generators(g: &GroupRef, gens: &[Vec<usize>], points: usize) -> Result<Vec<Vec<usize>>> {
    if gens.len() != g.generators().len() {
        return Err(Error::Input(format!("{} needs {} generator permutations", g.label(), g.generators().len())));
    }
    if gens.iter().any(|p| p.len() != points || p.iter().any(|&x| x >= points)) {
        return Err(Error::Input("generator permutation has the wrong size".into()));
    }
    let mut perms: Vec<Option<Vec<usize>>> = vec![None; g.order()];
    perms[g.identity()] = Some((0..points).collect());
    let mut frontier = vec![g.identity()];
    while let Some(x) = frontier.pop() {
        for (gen, p) in g.generators().iter().zip(gens) {
            let y = g.mul(*gen, x);
            let composed: Vec<usize> = {
                let px = perms[x].as_ref().unwrap();
                (0..points).map(|s| p[px[s]]).collect()
            };
            match &perms[y] {
                None => {
                    perms[y] = Some(composed);
                    frontier.push(y);
                }
                Some(old) if *old != composed => {
                    return Err(Error::Input(format!("generator permutations do not define an action of {}", g.label())))
                }
                Some(_) => {}
            }
        }
    }
    Ok(perms.into_iter().map(Option::unwrap).collect())
}

#[derive(Deserialize)]
pub struct LcsInput {
    pub complex: TwoComplex,
    pub data: Option<GroupDataRecord>,
    pub action: ActionRecord,
}

#[derive(Deserialize)]
pub struct DescentInput {
    pub complex: TwoComplex,
    pub datum: DescentDatum,
}

#[derive(Deserialize)]
pub struct PairMap {
    pub i: usize,
    pub j: usize,
    pub map: Vec<usize>,
}

#[derive(Deserialize)]
pub struct IndexedInput {
    pub fibers: Vec<usize>,
    pub phi: Vec<PairMap>,
}

#[derive(Deserialize)]
pub struct LooplikeInput {
    pub complex: TwoComplex,
    pub action: ActionRecord,
    #[serde(default)]
    pub base: usize,
    pub depth: usize,
    pub words: Vec<Vec<LetterRecord>>,
}
