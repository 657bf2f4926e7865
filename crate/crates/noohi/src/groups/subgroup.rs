use std::collections::{BTreeSet, HashSet};

use super::FiniteGroup;

/// Sorted element indices of the subgroup generated by `gens`.
pub fn generated(g: &FiniteGroup, gens: &[usize]) -> Vec<usize> {
    let n = g.order();
    let mut inside = vec![false; n];
    inside[g.identity()] = true;
    let mut stack = vec![g.identity()];
    while let Some(x) = stack.pop() {
        for &s in gens {
            let y = g.mul(x, s);
            if !inside[y] {
                inside[y] = true;
                stack.push(y);
            }
        }
    }
    (0..n).filter(|&x| inside[x]).collect()
}

pub fn contains(h: &[usize], x: usize) -> bool {
    h.binary_search(&x).is_ok()
}

pub fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|&x| contains(b, x))
}

pub fn is_subgroup(g: &FiniteGroup, h: &[usize]) -> bool {
    !h.is_empty()
        && contains(h, g.identity())
        && h.iter().all(|&a| h.iter().all(|&b| contains(h, g.mul(a, g.inv(b)))))
}

pub fn is_normal(g: &FiniteGroup, h: &[usize]) -> bool {
    g.generators()
        .iter()
        .all(|&s| h.iter().all(|&x| contains(h, g.conj(s, x))))
}

pub fn normal_closure(g: &FiniteGroup, gens: &[usize]) -> Vec<usize> {
    let mut conjugates: Vec<usize> = Vec::new();
    let mut seen = vec![false; g.order()];
    for &x in gens {
        for a in 0..g.order() {
            let c = g.conj(a, x);
            if !seen[c] {
                seen[c] = true;
                conjugates.push(c);
            }
        }
    }
    generated(g, &conjugates)
}

pub fn conjugate_subgroup(g: &FiniteGroup, h: &[usize], a: usize) -> Vec<usize> {
    let mut out: Vec<usize> = h.iter().map(|&x| g.conj(a, x)).collect();
    out.sort_unstable();
    out
}

/// Every subgroup, sorted by order then lexicographically.
pub fn all_subgroups(g: &FiniteGroup) -> Vec<Vec<usize>> {
    let n = g.order();
    let mut cyclic: BTreeSet<Vec<usize>> = BTreeSet::new();
    for x in 0..n {
        cyclic.insert(generated(g, &[x]));
    }
    let cyclic: Vec<Vec<usize>> = cyclic.into_iter().collect();
    // one generator per cyclic subgroup suffices for joins
    let cyc_gens: Vec<usize> = cyclic
        .iter()
        .map(|c| *c.iter().find(|&&x| generated(g, &[x]).len() == c.len()).unwrap())
        .collect();
    let mut all: HashSet<Vec<usize>> = cyclic.iter().cloned().collect();
    let mut frontier: Vec<Vec<usize>> = cyclic.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for h in &frontier {
            for &cg in &cyc_gens {
                if contains(h, cg) || h.len() == n {
                    continue;
                }
                let mut gens: Vec<usize> = small_generating_set(g, h);
                gens.push(cg);
                let j = generated(g, &gens);
                if all.insert(j.clone()) {
                    next.push(j);
                }
            }
        }
        frontier = next;
    }
    let mut out: Vec<Vec<usize>> = all.into_iter().collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

/// A generating set of `h` built greedily.
pub fn small_generating_set(g: &FiniteGroup, h: &[usize]) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut span = vec![g.identity()];
    for &x in h {
        if !contains(&span, x) {
            gens.push(x);
            span = generated(g, &gens);
            if span.len() == h.len() {
                break;
            }
        }
    }
    gens
}

/// One representative per conjugacy class of subgroups.
pub fn subgroup_class_reps(g: &FiniteGroup) -> Vec<Vec<usize>> {
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut reps = Vec::new();
    for h in all_subgroups(g) {
        if seen.contains(&h) {
            continue;
        }
        for a in 0..g.order() {
            seen.insert(conjugate_subgroup(g, &h, a));
        }
        reps.push(h);
    }
    reps
}

/// Left cosets `xH`: returns the coset index of each element and one representative per coset.
pub fn left_cosets(g: &FiniteGroup, h: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let n = g.order();
    let mut which = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for x in 0..n {
        if which[x] != usize::MAX {
            continue;
        }
        for &y in h {
            which[g.mul(x, y)] = reps.len();
        }
        reps.push(x);
    }
    (which, reps)
}
