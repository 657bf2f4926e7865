use std::sync::Arc;

use super::{generated, FiniteGroup, GroupRef};
use crate::error::{input, Result};

/// A homomorphism between finite groups stored as a full element map.
#[derive(Clone, Debug)]
pub struct FiniteHom {
    pub source: GroupRef,
    pub target: GroupRef,
    pub map: Vec<usize>,
}

impl FiniteHom {
    pub fn new(source: GroupRef, target: GroupRef, map: Vec<usize>) -> Result<Self> {
        if map.len() != source.order() || map.iter().any(|&y| y >= target.order()) {
            return input("element map has wrong shape");
        }
        let h = FiniteHom { source, target, map };
        let s = &h.source;
        for &a in s.generators() {
            for b in 0..s.order() {
                if h.map[s.mul(b, a)] != h.target.mul(h.map[b], h.map[a]) {
                    return input(format!(
                        "map {} -> {} is not a homomorphism",
                        h.source.label(),
                        h.target.label()
                    ));
                }
            }
        }
        if h.map[s.identity()] != h.target.identity() {
            return input("identity not preserved");
        }
        Ok(h)
    }

    /// Extends images of the source generators, or returns None if inconsistent.
    pub fn from_generator_images(source: &GroupRef, target: &GroupRef, images: &[usize]) -> Option<Self> {
        let gens = source.generators();
        if images.len() != gens.len() {
            return None;
        }
        let n = source.order();
        let mut map = vec![usize::MAX; n];
        map[source.identity()] = target.identity();
        let mut stack = vec![source.identity()];
        while let Some(x) = stack.pop() {
            for (i, &s) in gens.iter().enumerate() {
                let y = source.mul(x, s);
                let img = target.mul(map[x], images[i]);
                if map[y] == usize::MAX {
                    map[y] = img;
                    stack.push(y);
                } else if map[y] != img {
                    return None;
                }
            }
        }
        Some(FiniteHom { source: source.clone(), target: target.clone(), map })
    }

    pub fn identity(g: &GroupRef) -> Self {
        FiniteHom { source: g.clone(), target: g.clone(), map: (0..g.order()).collect() }
    }

    pub fn trivial(source: &GroupRef, target: &GroupRef) -> Self {
        FiniteHom {
            source: source.clone(),
            target: target.clone(),
            map: vec![target.identity(); source.order()],
        }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn compose(&self, first: &FiniteHom) -> Result<FiniteHom> {
        if first.target.order() != self.source.order() {
            return input("composition of mismatched homomorphisms");
        }
        Ok(FiniteHom {
            source: first.source.clone(),
            target: self.target.clone(),
            map: first.map.iter().map(|&y| self.map[y]).collect(),
        })
    }

    pub fn image(&self) -> Vec<usize> {
        let imgs: Vec<usize> = self.source.generators().iter().map(|&g| self.map[g]).collect();
        generated(&self.target, &imgs)
    }

    pub fn kernel(&self) -> Vec<usize> {
        (0..self.source.order())
            .filter(|&x| self.map[x] == self.target.identity())
            .collect()
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().len() == 1
    }

    pub fn is_surjective(&self) -> bool {
        self.image().len() == self.target.order()
    }

    pub fn is_trivial(&self) -> bool {
        self.map.iter().all(|&y| y == self.target.identity())
    }
}

/// All homomorphisms `source -> target`, by generator images.
pub fn homomorphisms(source: &GroupRef, target: &GroupRef) -> Vec<FiniteHom> {
    let gens = source.generators();
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&g| {
            let o = source.element_order(g);
            (0..target.order())
                .filter(|&y| o.is_multiple_of(target.element_order(y)))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    if candidates.iter().any(|c| c.is_empty()) {
        return out;
    }
    let mut idx = vec![0usize; gens.len()];
    loop {
        let images: Vec<usize> = idx.iter().enumerate().map(|(i, &j)| candidates[i][j]).collect();
        if let Some(h) = FiniteHom::from_generator_images(source, target, &images) {
            out.push(h);
        }
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return out;
            }
            idx[pos] += 1;
            if idx[pos] < candidates[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

pub fn count_homomorphisms(source: &GroupRef, target: &GroupRef) -> usize {
    homomorphisms(source, target).len()
}

pub fn arc(g: FiniteGroup) -> GroupRef {
    Arc::new(g)
}
