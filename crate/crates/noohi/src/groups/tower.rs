use super::hom::{arc, FiniteHom};
use super::subgroup::{contains, generated, is_normal, is_subgroup, left_cosets, normal_closure};
use super::{FiniteGroup, GroupRef};
use crate::error::{input, Result};

pub const DEFAULT_DEPTH: usize = 3;

/// Finite groups `G_1, ..., G_d` with surjections `G_{n+1} -> G_n`.
/// Levels are indexed from 0 here; `transitions[n]` maps level `n+1` onto level `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientTower {
    levels: Vec<GroupRef>,
    transitions: Vec<Vec<usize>>,
}

impl QuotientTower {
    pub fn new(levels: Vec<GroupRef>, transitions: Vec<Vec<usize>>) -> Result<Self> {
        if levels.is_empty() {
            return input("tower needs at least one level");
        }
        if transitions.len() + 1 != levels.len() {
            return input("tower needs one transition per consecutive pair of levels");
        }
        for (n, map) in transitions.iter().enumerate() {
            let h = FiniteHom::new(levels[n + 1].clone(), levels[n].clone(), map.clone()).map_err(|e| {
                crate::error::Error::Input(format!("transition {} -> {}: {e}", n + 1, n))
            })?;
            if !h.is_surjective() {
                return input(format!("transition {} -> {} is not surjective", n + 1, n));
            }
        }
        Ok(QuotientTower { levels, transitions })
    }

    pub fn constant(g: GroupRef, depth: usize) -> Self {
        let id: Vec<usize> = (0..g.order()).collect();
        QuotientTower {
            levels: vec![g; depth.max(1)],
            transitions: vec![id; depth.max(1) - 1],
        }
    }

    /// ℤ/m₁ ← ℤ/m₂ ← … by reduction; each modulus must divide the next.
    pub fn cyclic(moduli: &[usize]) -> Result<Self> {
        let levels: Vec<GroupRef> = moduli.iter().map(|&m| arc(FiniteGroup::cyclic(m))).collect();
        let mut transitions = Vec::new();
        for w in moduli.windows(2) {
            if w[1] % w[0] != 0 {
                return input(format!("{} does not divide {}", w[0], w[1]));
            }
            transitions.push((0..w[1]).map(|x| x % w[0]).collect());
        }
        Self::new(levels, transitions)
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, n: usize) -> &GroupRef {
        &self.levels[n]
    }

    pub fn levels(&self) -> &[GroupRef] {
        &self.levels
    }

    pub fn transition(&self, n: usize) -> &[usize] {
        &self.transitions[n]
    }

    /// Image of `x` at level `from` in level `to <= from`.
    pub fn project(&self, from: usize, to: usize, mut x: usize) -> usize {
        let mut n = from;
        while n > to {
            x = self.transitions[n - 1][x];
            n -= 1;
        }
        x
    }

    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }
}

/// Level-wise automorphism assignment: `levels[n][q][k] = ᵠk` at level `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelAction {
    pub levels: Vec<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ApproxGroup {
    Finite(GroupRef),
    FreeDiscrete(usize),
    Tower(QuotientTower),
    Product(Box<ApproxGroup>, Box<ApproxGroup>),
    Semidirect {
        k: Box<ApproxGroup>,
        q: Box<ApproxGroup>,
        action: LevelAction,
    },
}

impl ApproxGroup {
    pub fn finite(g: FiniteGroup) -> Self {
        ApproxGroup::Finite(arc(g))
    }

    /// Depth of the finite approximation; `None` for free discrete groups.
    pub fn natural_depth(&self) -> Option<usize> {
        match self {
            ApproxGroup::Finite(_) => Some(1),
            ApproxGroup::FreeDiscrete(_) => None,
            ApproxGroup::Tower(t) => Some(t.depth()),
            ApproxGroup::Product(a, b) => Some(a.natural_depth()?.max(b.natural_depth()?)),
            ApproxGroup::Semidirect { k, q, action } => Some(
                k.natural_depth()?
                    .max(q.natural_depth()?)
                    .max(action.levels.len()),
            ),
        }
    }

    /// Materializes the group as a tower of its natural depth; finite factors are broadcast.
    pub fn to_tower(&self) -> Result<QuotientTower> {
        match self.natural_depth() {
            Some(d) => self.tower_at_depth(d),
            None => input("a free discrete group has no finite-level tower"),
        }
    }

    fn tower_at_depth(&self, d: usize) -> Result<QuotientTower> {
        match self {
            ApproxGroup::Finite(g) => Ok(QuotientTower::constant(g.clone(), d)),
            ApproxGroup::FreeDiscrete(_) => input("a free discrete group has no finite-level tower"),
            ApproxGroup::Tower(t) => {
                if t.depth() == d {
                    Ok(t.clone())
                } else if t.depth() == 1 {
                    Ok(QuotientTower::constant(t.level(0).clone(), d))
                } else {
                    input(format!("tower of depth {} cannot be used at depth {d}", t.depth()))
                }
            }
            ApproxGroup::Product(a, b) => {
                let (ta, tb) = (a.tower_at_depth(d)?, b.tower_at_depth(d)?);
                let levels = (0..d)
                    .map(|n| FiniteGroup::direct_product(ta.level(n), tb.level(n)).map(arc))
                    .collect::<Result<Vec<_>>>()?;
                let transitions = (0..d - 1)
                    .map(|n| {
                        let nb_hi = tb.level(n + 1).order();
                        let nb_lo = tb.level(n).order();
                        (0..levels[n + 1].order())
                            .map(|x| ta.transition(n)[x / nb_hi] * nb_lo + tb.transition(n)[x % nb_hi])
                            .collect()
                    })
                    .collect();
                QuotientTower::new(levels, transitions)
            }
            ApproxGroup::Semidirect { k, q, action } => {
                let (tk, tq) = (k.tower_at_depth(d)?, q.tower_at_depth(d)?);
                if action.levels.is_empty() {
                    return input("semidirect product without action data");
                }
                let act = |n: usize| &action.levels[n.min(action.levels.len() - 1)];
                let levels = (0..d)
                    .map(|n| FiniteGroup::semidirect(tk.level(n), tq.level(n), act(n)).map(arc))
                    .collect::<Result<Vec<_>>>()?;
                let transitions = (0..d - 1)
                    .map(|n| {
                        let nq_hi = tq.level(n + 1).order();
                        let nq_lo = tq.level(n).order();
                        (0..levels[n + 1].order())
                            .map(|x| tk.transition(n)[x / nq_hi] * nq_lo + tq.transition(n)[x % nq_hi])
                            .collect()
                    })
                    .collect();
                QuotientTower::new(levels, transitions)
                    .map_err(|e| crate::error::Error::Input(format!("action incompatible with transitions: {e}")))
            }
        }
    }
}

/// A per-level subgroup family of a tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxSubgroup {
    pub levels: Vec<Vec<usize>>,
}

impl ApproxSubgroup {
    pub fn validate(&self, tower: &QuotientTower) -> Result<()> {
        if self.levels.len() != tower.depth() {
            return input("subgroup family depth differs from tower depth");
        }
        for (n, h) in self.levels.iter().enumerate() {
            if !is_subgroup(tower.level(n), h) {
                return input(format!("level {n} subset is not a subgroup"));
            }
        }
        for n in 0..tower.depth() - 1 {
            let mut img: Vec<usize> = self.levels[n + 1].iter().map(|&x| tower.transition(n)[x]).collect();
            img.sort_unstable();
            img.dedup();
            if img != self.levels[n] {
                return input(format!("transition {} -> {n} is not onto the lower subgroup", n + 1));
            }
        }
        Ok(())
    }

    pub fn trivial(tower: &QuotientTower) -> Self {
        ApproxSubgroup {
            levels: tower.levels().iter().map(|g| vec![g.identity()]).collect(),
        }
    }

    pub fn whole(tower: &QuotientTower) -> Self {
        ApproxSubgroup {
            levels: tower.levels().iter().map(|g| (0..g.order()).collect()).collect(),
        }
    }

    /// Level-wise subgroup generated by elements of the top level and their projections.
    pub fn generated_by(tower: &QuotientTower, gens: &[usize]) -> Result<Self> {
        let top = tower.top();
        if gens.iter().any(|&x| x >= tower.level(top).order()) {
            return input("generator does not resolve at the top level");
        }
        Ok(ApproxSubgroup {
            levels: (0..tower.depth())
                .map(|n| {
                    let g: Vec<usize> = gens.iter().map(|&x| tower.project(top, n, x)).collect();
                    generated(tower.level(n), &g)
                })
                .collect(),
        })
    }

    pub fn contains_family(&self, other: &ApproxSubgroup) -> bool {
        self.levels
            .iter()
            .zip(&other.levels)
            .all(|(a, b)| b.iter().all(|&x| contains(a, x)))
    }
}

/// Per-level data of a homomorphism.
#[derive(Clone, Debug, PartialEq)]
pub enum LevelMap {
    /// Image of every source element.
    Table(Vec<usize>),
    /// Images of the free generators.
    Images(Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct Homomorphism {
    pub source: ApproxGroup,
    pub target: ApproxGroup,
    pub levels: Vec<LevelMap>,
}

impl Homomorphism {
    pub fn validate(&self) -> Result<()> {
        let tt = self.target.to_tower()?;
        if self.levels.len() != tt.depth() {
            return input("homomorphism level count differs from target depth");
        }
        match &self.source {
            ApproxGroup::FreeDiscrete(rank) => {
                for (n, lm) in self.levels.iter().enumerate() {
                    match lm {
                        LevelMap::Images(v) if v.len() == *rank => {
                            if v.iter().any(|&y| y >= tt.level(n).order()) {
                                return input("generator image out of range");
                            }
                        }
                        _ => return input("free source needs one image per generator"),
                    }
                }
                for n in 0..tt.depth() - 1 {
                    let (LevelMap::Images(hi), LevelMap::Images(lo)) = (&self.levels[n + 1], &self.levels[n]) else {
                        unreachable!()
                    };
                    if hi.iter().zip(lo).any(|(&a, &b)| tt.transition(n)[a] != b) {
                        return input(format!("compatibility square at level {n} fails"));
                    }
                }
            }
            _ => {
                let st = self.source.to_tower()?;
                let st = if st.depth() == tt.depth() {
                    st
                } else {
                    self.source.tower_at_depth(tt.depth())?
                };
                for n in 0..tt.depth() {
                    self.level_hom_with(&st, &tt, n)?;
                }
                for n in 0..tt.depth() - 1 {
                    let hi = self.level_hom_with(&st, &tt, n + 1)?;
                    let lo = self.level_hom_with(&st, &tt, n)?;
                    for x in 0..st.level(n + 1).order() {
                        if tt.transition(n)[hi.map[x]] != lo.map[st.transition(n)[x]] {
                            return input(format!("compatibility square at level {n} fails"));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn level_hom_with(&self, st: &QuotientTower, tt: &QuotientTower, n: usize) -> Result<FiniteHom> {
        match &self.levels[n] {
            LevelMap::Table(m) => FiniteHom::new(st.level(n).clone(), tt.level(n).clone(), m.clone()),
            LevelMap::Images(v) => FiniteHom::from_generator_images(st.level(n), tt.level(n), v)
                .ok_or_else(|| crate::error::Error::Input(format!("generator images at level {n} do not extend"))),
        }
    }

    /// The homomorphism at level `n` (finite sources only).
    pub fn level_hom(&self, n: usize) -> Result<FiniteHom> {
        let tt = self.target.to_tower()?;
        let st = match self.source.natural_depth() {
            Some(_) => self.source.tower_at_depth(tt.depth())?,
            None => return input("free source has no finite level"),
        };
        self.level_hom_with(&st, &tt, n)
    }

    /// Image subgroup inside target level `n`.
    pub fn level_image(&self, n: usize) -> Result<Vec<usize>> {
        let tt = self.target.to_tower()?;
        match &self.levels[n] {
            LevelMap::Images(v) if matches!(self.source, ApproxGroup::FreeDiscrete(_)) => {
                Ok(generated(tt.level(n), v))
            }
            _ => Ok(self.level_hom(n)?.image()),
        }
    }

    pub fn from_finite(h: &FiniteHom) -> Self {
        Homomorphism {
            source: ApproxGroup::Finite(h.source.clone()),
            target: ApproxGroup::Finite(h.target.clone()),
            levels: vec![LevelMap::Table(h.map.clone())],
        }
    }
}

pub fn thick_closure(tower: &QuotientTower, h: &ApproxSubgroup) -> Result<ApproxSubgroup> {
    h.validate(tower)?;
    Ok(h.clone())
}

pub fn smallest_normal_thickly_closed(tower: &QuotientTower, gens: &[usize]) -> Result<ApproxSubgroup> {
    let top = tower.top();
    if gens.iter().any(|&x| x >= tower.level(top).order()) {
        return input("generator does not resolve at every level");
    }
    Ok(ApproxSubgroup {
        levels: (0..tower.depth())
            .map(|n| {
                let g: Vec<usize> = gens.iter().map(|&x| tower.project(top, n, x)).collect();
                normal_closure(tower.level(n), &g)
            })
            .collect(),
    })
}

pub fn has_dense_image(h: &Homomorphism) -> Result<bool> {
    let tt = h.target.to_tower()?;
    for n in 0..tt.depth() {
        if h.level_image(n)?.len() != tt.level(n).order() {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn noohi_quotient(tower: &QuotientTower, normal: &ApproxSubgroup) -> Result<QuotientTower> {
    normal.validate(tower)?;
    let mut levels = Vec::new();
    let mut projs = Vec::new();
    for n in 0..tower.depth() {
        if !is_normal(tower.level(n), &normal.levels[n]) {
            return input(format!("subgroup at level {n} is not normal"));
        }
        let (q, p) = tower.level(n).quotient(&normal.levels[n])?;
        levels.push(arc(q));
        projs.push(p);
    }
    let transitions = (0..tower.depth() - 1)
        .map(|n| {
            let mut t = vec![0; levels[n + 1].order()];
            for x in 0..tower.level(n + 1).order() {
                t[projs[n + 1][x]] = projs[n][tower.transition(n)[x]];
            }
            t
        })
        .collect();
    QuotientTower::new(levels, transitions)
}

#[derive(Clone, Debug)]
pub struct SemidirectReport {
    pub group: QuotientTower,
    pub k_embedding: Homomorphism,
    pub q_embedding: Homomorphism,
    pub checked_pairs: usize,
    /// (level, q, k) triples where `q k q⁻¹ ≠ ᵠk`.
    pub violations: Vec<(usize, usize, usize)>,
}

pub fn semidirect_check(k: &ApproxGroup, q: &ApproxGroup, action: &LevelAction) -> Result<SemidirectReport> {
    let whole = ApproxGroup::Semidirect {
        k: Box::new(k.clone()),
        q: Box::new(q.clone()),
        action: action.clone(),
    };
    let group = whole.to_tower()?;
    let d = group.depth();
    let tk = k.tower_at_depth(d)?;
    let tq = q.tower_at_depth(d)?;
    let mut violations = Vec::new();
    let mut checked = 0;
    let mut k_levels = Vec::new();
    let mut q_levels = Vec::new();
    for n in 0..d {
        let (gk, gq, g) = (tk.level(n), tq.level(n), group.level(n));
        let nq = gq.order();
        let act = &action.levels[n.min(action.levels.len() - 1)];
        let emb_k: Vec<usize> = (0..gk.order()).map(|x| x * nq + gq.identity()).collect();
        let emb_q: Vec<usize> = (0..nq).map(|y| gk.identity() * nq + y).collect();
        for y in 0..nq {
            for x in 0..gk.order() {
                checked += 1;
                if g.conj(emb_q[y], emb_k[x]) != emb_k[act[y][x]] {
                    violations.push((n, y, x));
                }
            }
        }
        k_levels.push(LevelMap::Table(emb_k));
        q_levels.push(LevelMap::Table(emb_q));
    }
    let target = ApproxGroup::Tower(group.clone());
    let k_embedding = Homomorphism { source: k.clone(), target: target.clone(), levels: k_levels };
    let q_embedding = Homomorphism { source: q.clone(), target, levels: q_levels };
    k_embedding.validate()?;
    q_embedding.validate()?;
    Ok(SemidirectReport { group, k_embedding, q_embedding, checked_pairs: checked, violations })
}

/// Compares `G/(N V)` computed directly with `(G/N)/image(V)` at every level.
pub fn quotient_by_closure_consistency(
    tower: &QuotientTower,
    normal: &ApproxSubgroup,
    open: &ApproxSubgroup,
) -> Result<bool> {
    let closed = thick_closure(tower, normal)?;
    for n in 0..tower.depth() {
        let g = tower.level(n);
        let mut nv_gens = closed.levels[n].clone();
        nv_gens.extend(open.levels[n].iter().copied());
        let nv = generated(g, &nv_gens);
        let (direct, direct_reps) = left_cosets(g, &nv);

        let (qg, proj) = g.quotient(&closed.levels[n])?;
        let v_img: Vec<usize> = open.levels[n].iter().map(|&x| proj[x]).collect();
        let v_img = generated(&qg, &v_img);
        let (via_q, via_reps) = left_cosets(&qg, &v_img);
        if direct_reps.len() != via_reps.len() {
            return Ok(false);
        }
        // both are transitive with base point the trivial coset; compare stabilizers
        let stab_direct: Vec<usize> = (0..g.order()).filter(|&x| direct[x] == direct[g.identity()]).collect();
        let stab_via: Vec<usize> = (0..g.order())
            .filter(|&x| via_q[proj[x]] == via_q[qg.identity()])
            .collect();
        if stab_direct != stab_via {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_tower_validates() {
        let t = QuotientTower::cyclic(&[2, 4, 8]).unwrap();
        assert_eq!(t.depth(), 3);
        assert_eq!(t.project(2, 0, 7), 1);
        assert!(QuotientTower::cyclic(&[3, 4]).is_err());
    }

    #[test]
    fn non_surjective_transition_rejected() {
        let a = arc(FiniteGroup::cyclic(2));
        let b = arc(FiniteGroup::cyclic(4));
        assert!(QuotientTower::new(vec![a, b], vec![vec![0, 0, 0, 0]]).is_err());
    }

    #[test]
    fn thick_closure_of_tower_family() {
        let t = QuotientTower::cyclic(&[4, 8]).unwrap();
        let h = ApproxSubgroup { levels: vec![vec![0, 2], vec![0, 2, 4, 6]] };
        assert_eq!(thick_closure(&t, &h).unwrap(), h);
        let bad = ApproxSubgroup { levels: vec![vec![0, 2], vec![0, 4]] };
        assert!(thick_closure(&t, &bad).is_err());
    }

    #[test]
    fn normal_closure_examples() {
        let s3 = QuotientTower::constant(arc(FiniteGroup::symmetric(3)), 1);
        let t = s3.level(0).index_of("(1 2)").unwrap();
        assert_eq!(smallest_normal_thickly_closed(&s3, &[t]).unwrap().levels[0].len(), 6);
        let c = QuotientTower::cyclic(&[4, 8]).unwrap();
        let r = smallest_normal_thickly_closed(&c, &[2]).unwrap();
        assert_eq!(r.levels, vec![vec![0, 2], vec![0, 2, 4, 6]]);
        let triv = smallest_normal_thickly_closed(&c, &[0]).unwrap();
        assert_eq!(triv, ApproxSubgroup::trivial(&c));
    }

    #[test]
    fn dense_image_of_integers() {
        let t = QuotientTower::cyclic(&[2, 4, 8]).unwrap();
        let h = Homomorphism {
            source: ApproxGroup::FreeDiscrete(1),
            target: ApproxGroup::Tower(t),
            levels: vec![LevelMap::Images(vec![1]); 3],
        };
        h.validate().unwrap();
        assert!(has_dense_image(&h).unwrap());
        let t4 = QuotientTower::cyclic(&[4]).unwrap();
        let h2 = Homomorphism {
            source: ApproxGroup::FreeDiscrete(1),
            target: ApproxGroup::Tower(t4),
            levels: vec![LevelMap::Images(vec![2])],
        };
        assert!(!has_dense_image(&h2).unwrap());
    }

    #[test]
    fn quotient_examples() {
        let t = QuotientTower::cyclic(&[4, 8]).unwrap();
        let n = ApproxSubgroup { levels: vec![vec![0, 2], vec![0, 2, 4, 6]] };
        let q = noohi_quotient(&t, &n).unwrap();
        assert_eq!(q.level(0).order(), 2);
        assert_eq!(q.level(1).order(), 2);
        // <4> in Z/8 projects to the trivial subgroup of Z/4, so this family is not compatible
        let skew = ApproxSubgroup { levels: vec![vec![0, 2], vec![0, 4]] };
        assert!(noohi_quotient(&t, &skew).is_err());
        let s3 = arc(FiniteGroup::symmetric(3));
        let t = QuotientTower::constant(s3.clone(), 1);
        let a3: Vec<usize> = (0..6).filter(|&x| s3.element_order(x) != 2).collect();
        let q = noohi_quotient(&t, &ApproxSubgroup { levels: vec![a3] }).unwrap();
        assert_eq!(q.level(0).order(), 2);
        let t2 = arc(FiniteGroup::symmetric(3));
        let two = t2.index_of("(1 2)").unwrap();
        let n2 = ApproxSubgroup { levels: vec![generated(&t2, &[two])] };
        assert!(noohi_quotient(&QuotientTower::constant(t2, 1), &n2).is_err());
    }

    #[test]
    fn semidirect_relation_on_units_mod_nine() {
        let (k, q, action) = super::super::finite::unit_action(9);
        let rep = semidirect_check(
            &ApproxGroup::finite(k),
            &ApproxGroup::finite(q),
            &LevelAction { levels: vec![action] },
        )
        .unwrap();
        assert_eq!(rep.checked_pairs, 54);
        assert!(rep.violations.is_empty());
        assert_eq!(rep.group.level(0).order(), 54);
    }

    #[test]
    fn closure_consistency_example() {
        let t = QuotientTower::cyclic(&[8]).unwrap();
        let n = ApproxSubgroup { levels: vec![vec![0, 4]] };
        let v = ApproxSubgroup { levels: vec![vec![0, 2, 4, 6]] };
        assert!(quotient_by_closure_consistency(&t, &n, &v).unwrap());
    }
}
