//! 2-complexes, group data on them, locally constant systems and descent data,
//! all at a single finite level.

mod data;
mod descent;
mod lcs;

pub use data::{validate_group_data, GroupData, GroupDataRecord, PathData, SquareFailure};
pub use descent::{
    discretize_descent, lcs_isomorphic, ordered_reduction, rebuild_descent, reconstruct_ordered, DescentDatum,
    IndexedDatum, OrderedDatum,
};
pub use lcs::{decompose_system, lcs_from_action, q_functor, LcsSystem};

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub id: String,
    pub d0: String,
    pub d1: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceRecord {
    pub id: String,
    pub d0: String,
    pub d1: String,
    pub d2: String,
}

/// A 2-complex given by its simplices and boundary maps.
/// Edge `∂_k f` joins the two vertices of `f` other than `v_k`, with `∂₀` at the higher index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoComplex {
    #[serde(rename = "E0")]
    pub vertices: Vec<String>,
    #[serde(rename = "E1")]
    pub edges: Vec<EdgeRecord>,
    #[serde(rename = "E2", default)]
    pub faces: Vec<FaceRecord>,
}

/// Vertex index of `∂_j ∂_k f` inside `f`.
pub fn vertex_index(k: u8, j: u8) -> u8 {
    let others: Vec<u8> = (0..3).filter(|&i| i != k).collect();
    if j == 0 {
        others[1]
    } else {
        others[0]
    }
}

impl TwoComplex {
    pub fn from_json(s: &str) -> Result<Self> {
        let c: TwoComplex = serde_json::from_str(s)?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let vs: BTreeSet<&str> = self.vertices.iter().map(String::as_str).collect();
        if vs.len() != self.vertices.len() {
            return input("repeated vertex id");
        }
        let mut es = BTreeSet::new();
        for e in &self.edges {
            if !es.insert(e.id.as_str()) {
                return input(format!("repeated edge id {}", e.id));
            }
            for v in [&e.d0, &e.d1] {
                if !vs.contains(v.as_str()) {
                    return input(format!("edge {} has unknown endpoint {v}", e.id));
                }
            }
        }
        let mut fs = BTreeSet::new();
        for f in &self.faces {
            if !fs.insert(f.id.as_str()) {
                return input(format!("repeated face id {}", f.id));
            }
            for e in [&f.d0, &f.d1, &f.d2] {
                if !es.contains(e.as_str()) {
                    return input(format!("face {} has unknown edge {e}", f.id));
                }
            }
            for k in 0..3u8 {
                for j in 0..2u8 {
                    let i = vertex_index(k, j);
                    let via = self.edge_end(self.face_side(&f.id, k)?, j)?;
                    let other = self.face_vertex(&f.id, i)?;
                    if via != other {
                        return input(format!("simplicial identity fails at face {} (side {k}, end {j})", f.id));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn edge(&self, id: &str) -> Result<&EdgeRecord> {
        match self.edges.iter().find(|e| e.id == id) {
            Some(e) => Ok(e),
            None => input(format!("unknown edge {id}")),
        }
    }

    pub fn face(&self, id: &str) -> Result<&FaceRecord> {
        match self.faces.iter().find(|f| f.id == id) {
            Some(f) => Ok(f),
            None => input(format!("unknown face {id}")),
        }
    }

    /// `∂_j e`
    pub fn edge_end(&self, e: &str, j: u8) -> Result<&str> {
        let e = self.edge(e)?;
        Ok(if j == 0 { &e.d0 } else { &e.d1 })
    }

    /// `∂_k f`
    pub fn face_side(&self, f: &str, k: u8) -> Result<&str> {
        let f = self.face(f)?;
        Ok(match k {
            0 => &f.d0,
            1 => &f.d1,
            _ => &f.d2,
        })
    }

    /// `v_i f`, read off the boundary edges.
    pub fn face_vertex(&self, f: &str, i: u8) -> Result<&str> {
        let (k, j) = match i {
            0 => (2, 1),
            1 => (2, 0),
            _ => (1, 0),
        };
        self.edge_end(self.face_side(f, k)?, j)
    }
}

/// The graph of vertices and edges (origin `∂₁`, target `∂₀`) with a spanning tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphWithTree {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeRecord>,
    pub tree: BTreeSet<String>,
}

/// Breadth-first spanning tree from the least vertex, scanning edges in id order.
pub fn spanning_tree(c: &TwoComplex) -> Result<GraphWithTree> {
    let mut vertices = c.vertices.clone();
    vertices.sort();
    let mut edges = c.edges.clone();
    edges.sort_by(|a, b| a.id.cmp(&b.id));
    let mut tree = BTreeSet::new();
    let Some(root) = vertices.first() else {
        return Ok(GraphWithTree { vertices, edges, tree });
    };
    let mut seen: BTreeSet<String> = BTreeSet::from([root.clone()]);
    let mut queue = VecDeque::from([root.clone()]);
    while let Some(v) = queue.pop_front() {
        for e in &edges {
            let next = if e.d1 == v {
                &e.d0
            } else if e.d0 == v {
                &e.d1
            } else {
                continue;
            };
            if seen.insert(next.clone()) {
                tree.insert(e.id.clone());
                queue.push_back(next.clone());
            }
        }
    }
    if seen.len() != vertices.len() {
        return input("graph is disconnected; no single spanning tree");
    }
    Ok(GraphWithTree { vertices, edges, tree })
}

pub fn graph_pi1_rank(g: &GraphWithTree) -> usize {
    g.edges.len() - g.tree.len()
}

impl GraphWithTree {
    pub fn is_spanning_tree(&self) -> bool {
        if self.tree.len() + 1 != self.vertices.len() {
            return false;
        }
        let mut parent: BTreeMap<&str, &str> = self.vertices.iter().map(|v| (v.as_str(), v.as_str())).collect();
        fn find<'a>(p: &BTreeMap<&'a str, &'a str>, mut x: &'a str) -> &'a str {
            while p[x] != x {
                x = p[x];
            }
            x
        }
        for e in self.edges.iter().filter(|e| self.tree.contains(&e.id)) {
            let (a, b) = (find(&parent, &e.d0), find(&parent, &e.d1));
            if a == b {
                return false;
            }
            parent.insert(a, b);
        }
        true
    }

    pub fn in_tree(&self, e: &str) -> bool {
        self.tree.contains(e)
    }

    /// Tree path from `v` to `w` as `(edge, +1)` when traversed origin→target, else `(edge, -1)`.
    pub fn tree_path(&self, v: &str, w: &str) -> Result<Vec<(String, i64)>> {
        if !self.vertices.iter().any(|x| x == v) || !self.vertices.iter().any(|x| x == w) {
            return input(format!("unknown vertex in path {v} -> {w}"));
        }
        let mut prev: BTreeMap<String, (String, String, i64)> = BTreeMap::new();
        let mut queue = VecDeque::from([v.to_string()]);
        let mut seen = BTreeSet::from([v.to_string()]);
        while let Some(x) = queue.pop_front() {
            if x == w {
                break;
            }
            for e in self.edges.iter().filter(|e| self.tree.contains(&e.id)) {
                let (next, dir) = if e.d1 == x {
                    (&e.d0, 1)
                } else if e.d0 == x {
                    (&e.d1, -1)
                } else {
                    continue;
                };
                if seen.insert(next.clone()) {
                    prev.insert(next.clone(), (x.clone(), e.id.clone(), dir));
                    queue.push_back(next.clone());
                }
            }
        }
        let mut path = Vec::new();
        let mut cur = w.to_string();
        while cur != v {
            let Some((p, e, d)) = prev.get(&cur) else {
                return input(format!("no tree path {v} -> {w}"));
            };
            path.push((e.clone(), *d));
            cur = p.clone();
        }
        path.reverse();
        Ok(path)
    }

    pub fn tree_distance(&self, v: &str, w: &str) -> Result<usize> {
        Ok(self.tree_path(v, w)?.len())
    }
}
