use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{input, Result};

/// Largest order for which a multiplication table is materialized.
pub const TABLE_CAP: usize = 5000;

#[derive(Clone, Debug)]
enum Repr {
    Table(Vec<u32>),
    Perms {
        perms: Vec<Vec<u32>>,
        index: HashMap<Vec<u32>, usize>,
    },
}

/// A finite group with elements indexed `0..order`.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    label: String,
    names: Vec<String>,
    lookup: HashMap<String, usize>,
    repr: Repr,
    identity: usize,
    inverses: Vec<usize>,
    gens: Vec<usize>,
}

pub type GroupRef = Arc<FiniteGroup>;

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        if self.order() != other.order() || self.names != other.names {
            return false;
        }
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.mul(a, b) == other.mul(a, b)))
    }
}

impl fmt::Display for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (order {})", self.label, self.order())
    }
}

fn compose(a: &[u32], b: &[u32]) -> Vec<u32> {
    // (a*b)(i) = a(b(i))
    b.iter().map(|&i| a[i as usize]).collect()
}

pub fn cycle_notation(p: &[u32]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] as usize == start {
            continue;
        }
        let mut cyc = vec![start + 1];
        seen[start] = true;
        let mut j = p[start] as usize;
        while j != start {
            seen[j] = true;
            cyc.push(j + 1);
            j = p[j] as usize;
        }
        let body: Vec<String> = cyc.iter().map(|x| x.to_string()).collect();
        out.push('(');
        out.push_str(&body.join(" "));
        out.push(')');
    }
    if out.is_empty() {
        "()".to_string()
    } else {
        out
    }
}

impl FiniteGroup {
    /// Builds a group from a multiplication table, checking the axioms.
    pub fn from_table(label: &str, names: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return input("empty group");
        }
        if n > TABLE_CAP {
            return input(format!("order {n} exceeds table cap {TABLE_CAP}; use permutation generators"));
        }
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return input("multiplication table has wrong shape");
        }
        let mut flat = Vec::with_capacity(n * n);
        for row in &table {
            for &x in row {
                if x >= n {
                    return input(format!("table entry {x} out of range"));
                }
                flat.push(x as u32);
            }
        }
        let at = |a: usize, b: usize| flat[a * n + b] as usize;
        let identity = match (0..n).find(|&e| (0..n).all(|x| at(e, x) == x && at(x, e) == x)) {
            Some(e) => e,
            None => return input("no identity element"),
        };
        let mut inverses = vec![usize::MAX; n];
        for a in 0..n {
            let mut seen = vec![false; n];
            for b in 0..n {
                let c = at(a, b);
                if seen[c] {
                    return input("table row is not a permutation");
                }
                seen[c] = true;
                if c == identity {
                    inverses[a] = b;
                }
            }
            if at(inverses[a], a) != identity {
                return input("left and right inverses differ");
            }
        }
        if n <= 48 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if at(at(a, b), c) != at(a, at(b, c)) {
                            return input(format!("associativity fails at ({a},{b},{c})"));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            for _ in 0..20_000 {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if at(at(a, b), c) != at(a, at(b, c)) {
                    return input(format!("associativity fails at ({a},{b},{c})"));
                }
            }
        }
        let mut g = FiniteGroup {
            label: label.to_string(),
            lookup: HashMap::new(),
            names,
            repr: Repr::Table(flat),
            identity,
            inverses,
            gens: Vec::new(),
        };
        g.rebuild_lookup()?;
        g.gens = g.find_generators();
        Ok(g)
    }

    /// Closure of permutation generators on `degree` points.
    pub fn from_perm_gens(label: &str, degree: usize, gens: &[Vec<u32>]) -> Result<Self> {
        for p in gens {
            if p.len() != degree {
                return input("permutation generator has wrong degree");
            }
            let mut seen = vec![false; degree];
            for &x in p {
                if x as usize >= degree || seen[x as usize] {
                    return input("generator is not a permutation");
                }
                seen[x as usize] = true;
            }
        }
        let id: Vec<u32> = (0..degree as u32).collect();
        let mut perms = vec![id.clone()];
        let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
        index.insert(id, 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let p = compose(&perms[i], g);
                if !index.contains_key(&p) {
                    index.insert(p.clone(), perms.len());
                    queue.push_back(perms.len());
                    perms.push(p);
                }
            }
        }
        let names: Vec<String> = perms.iter().map(|p| cycle_notation(p)).collect();
        let gen_idx: Vec<usize> = gens.iter().map(|g| index[g]).collect();
        let n = perms.len();
        if n <= TABLE_CAP {
            let table: Vec<Vec<usize>> = (0..n)
                .map(|a| (0..n).map(|b| index[&compose(&perms[a], &perms[b])]).collect())
                .collect();
            let mut g = Self::from_table(label, names, table)?;
            g.gens = gen_idx.into_iter().filter(|&x| x != g.identity).collect();
            return Ok(g);
        }
        let inverses = perms
            .iter()
            .map(|p| {
                let mut inv = vec![0u32; degree];
                for (i, &x) in p.iter().enumerate() {
                    inv[x as usize] = i as u32;
                }
                index[&inv]
            })
            .collect();
        let mut g = FiniteGroup {
            label: label.to_string(),
            lookup: HashMap::new(),
            names,
            repr: Repr::Perms { perms, index },
            identity: 0,
            inverses,
            gens: gen_idx,
        };
        g.rebuild_lookup()?;
        Ok(g)
    }

    fn rebuild_lookup(&mut self) -> Result<()> {
        self.lookup.clear();
        for (i, nm) in self.names.iter().enumerate() {
            if self.lookup.insert(nm.clone(), i).is_some() {
                return input(format!("duplicate element name {nm}"));
            }
        }
        Ok(())
    }

    fn find_generators(&self) -> Vec<usize> {
        let n = self.order();
        if n == 1 {
            return Vec::new();
        }
        if let Some(x) = (0..n).find(|&x| self.element_order(x) == n) {
            return vec![x];
        }
        if n <= 128 {
            for a in 0..n {
                for b in a + 1..n {
                    if super::generated(self, &[a, b]).len() == n {
                        return vec![a, b];
                    }
                }
            }
        }
        let mut gens = Vec::new();
        let mut span = vec![self.identity];
        for x in 0..n {
            if span.binary_search(&x).is_err() {
                gens.push(x);
                span = super::generated(self, &gens);
            }
        }
        gens
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    /// Replaces the distinguished generating set; it must generate.
    pub fn with_generators(mut self, gens: Vec<usize>) -> Result<Self> {
        if gens.iter().any(|&g| g >= self.order()) {
            return input("generator out of range");
        }
        if super::generated(&self, &gens).len() != self.order() {
            return input(format!("given elements do not generate {}", self.label));
        }
        self.gens = gens;
        Ok(self)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.order() {
            return input("wrong number of element names");
        }
        self.names = names;
        self.rebuild_lookup()?;
        Ok(self)
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn generators(&self) -> &[usize] {
        &self.gens
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.lookup.get(name).copied()
    }

    pub fn has_table(&self) -> bool {
        matches!(self.repr, Repr::Table(_))
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.repr {
            Repr::Table(t) => t[a * self.names.len() + b] as usize,
            Repr::Perms { perms, index } => index[&compose(&perms[a], &perms[b])],
        }
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn pow(&self, a: usize, k: i64) -> usize {
        let base = if k < 0 { self.inv(a) } else { a };
        let mut e = k.unsigned_abs();
        let mut acc = self.identity;
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, sq);
            }
            sq = self.mul(sq, sq);
            e >>= 1;
        }
        acc
    }

    /// `g x g⁻¹`
    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        self.gens
            .iter()
            .all(|&a| self.gens.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn product_of(&self, xs: &[usize]) -> usize {
        xs.iter().fold(self.identity, |acc, &x| self.mul(acc, x))
    }

    /// The table as nested rows (only for tabled groups, or small permutation groups).
    pub fn table(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        (0..n).map(|a| (0..n).map(|b| self.mul(a, b)).collect()).collect()
    }

    // ---- standard constructions ----

    pub fn trivial() -> Self {
        Self::from_table("1", vec!["e".into()], vec![vec![0]]).unwrap()
    }

    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let names = (0..n).map(|i| i.to_string()).collect();
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let g = Self::from_table(&format!("Z/{n}"), names, table).unwrap();
        if n > 1 {
            g.with_generators(vec![1]).unwrap()
        } else {
            g
        }
    }

    /// (ℤ/n)^× with elements named by residue.
    pub fn units_mod(n: usize) -> Self {
        assert!(n >= 2);
        let units: Vec<usize> = (1..n).filter(|&a| gcd(a, n) == 1).collect();
        let pos: HashMap<usize, usize> = units.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let names = units.iter().map(|u| u.to_string()).collect();
        let table = units
            .iter()
            .map(|&a| units.iter().map(|&b| pos[&(a * b % n)]).collect())
            .collect();
        Self::from_table(&format!("(Z/{n})^x"), names, table).unwrap()
    }

    pub fn symmetric(n: usize) -> Self {
        if n <= 1 {
            return Self::trivial().with_label("S1");
        }
        let mut gens = vec![];
        let mut t: Vec<u32> = (0..n as u32).collect();
        t.swap(0, 1);
        gens.push(t);
        if n > 2 {
            let c: Vec<u32> = (0..n as u32).map(|i| (i + 1) % n as u32).collect();
            gens.push(c);
        }
        Self::from_perm_gens(&format!("S{n}"), n, &gens).unwrap()
    }

    pub fn alternating(n: usize) -> Self {
        assert!(n >= 3);
        let gens: Vec<Vec<u32>> = (2..n)
            .map(|k| {
                let mut p: Vec<u32> = (0..n as u32).collect();
                p[0] = 1;
                p[1] = k as u32;
                p[k] = 0;
                p
            })
            .collect();
        Self::from_perm_gens(&format!("A{n}"), n, &gens).unwrap()
    }

    /// Dihedral group of order 2n acting on an n-gon.
    pub fn dihedral(n: usize) -> Self {
        assert!(n >= 3);
        let r: Vec<u32> = (0..n as u32).map(|i| (i + 1) % n as u32).collect();
        let s: Vec<u32> = (0..n as u32).map(|i| (n as u32 - i) % n as u32).collect();
        Self::from_perm_gens(&format!("D{n}"), n, &[r, s]).unwrap()
    }

    pub fn quaternion() -> Self {
        // elements ±1, ±i, ±j, ±k encoded as (sign, unit) with unit in {1,i,j,k}
        let names: Vec<String> = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        // unit products: (unit_a, unit_b) -> (sign, unit)
        let unit_mul = |a: usize, b: usize| -> (bool, usize) {
            match (a, b) {
                (0, x) | (x, 0) => (false, x),
                (x, y) if x == y => (true, 0),
                (1, 2) => (false, 3),
                (2, 3) => (false, 1),
                (3, 1) => (false, 2),
                (2, 1) => (true, 3),
                (3, 2) => (true, 1),
                (1, 3) => (true, 2),
                _ => unreachable!(),
            }
        };
        let table = (0..8)
            .map(|a| {
                (0..8)
                    .map(|b| {
                        let (neg, u) = unit_mul(a / 2, b / 2);
                        let sign = (a % 2) ^ (b % 2) ^ (neg as usize);
                        u * 2 + sign
                    })
                    .collect()
            })
            .collect();
        Self::from_table("Q8", names, table).unwrap()
    }

    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Result<Self> {
        let (na, nb) = (a.order(), b.order());
        let n = na * nb;
        if n > TABLE_CAP {
            return input("direct product exceeds table cap");
        }
        let names = (0..n)
            .map(|i| format!("({},{})", a.name(i / nb), b.name(i % nb)))
            .collect();
        let table = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb))
                    .collect()
            })
            .collect();
        let g = Self::from_table(&format!("{}x{}", a.label, b.label), names, table)?;
        let mut gens: Vec<usize> = a.gens.iter().map(|&x| x * nb + b.identity).collect();
        gens.extend(b.gens.iter().map(|&y| a.identity * nb + y));
        if gens.is_empty() {
            return Ok(g);
        }
        g.with_generators(gens)
    }

    /// K ⋊ Q with `action[q][k] = ᵠk`; element (k,q) has index `k*|Q| + q`.
    pub fn semidirect(k: &FiniteGroup, q: &FiniteGroup, action: &[Vec<usize>]) -> Result<Self> {
        check_action(k, q, action)?;
        let (nk, nq) = (k.order(), q.order());
        let n = nk * nq;
        if n > TABLE_CAP {
            return input("semidirect product exceeds table cap");
        }
        let names = (0..n)
            .map(|i| format!("({},{})", k.name(i / nq), q.name(i % nq)))
            .collect();
        let table = (0..n)
            .map(|x| {
                let (k1, q1) = (x / nq, x % nq);
                (0..n)
                    .map(|y| {
                        let (k2, q2) = (y / nq, y % nq);
                        k.mul(k1, action[q1][k2]) * nq + q.mul(q1, q2)
                    })
                    .collect()
            })
            .collect();
        let g = Self::from_table(&format!("{}:{}", k.label, q.label), names, table)?;
        let mut gens: Vec<usize> = k.gens.iter().map(|&x| x * nq + q.identity).collect();
        gens.extend(q.gens.iter().map(|&y| k.identity * nq + y));
        if gens.is_empty() {
            return Ok(g);
        }
        g.with_generators(gens)
    }

    /// G/N together with the projection.
    pub fn quotient(&self, normal: &[usize]) -> Result<(FiniteGroup, Vec<usize>)> {
        if !super::is_normal(self, normal) {
            return input("quotient by a non-normal subgroup");
        }
        let n = self.order();
        let mut proj = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for x in 0..n {
            if proj[x] != usize::MAX {
                continue;
            }
            let c = reps.len();
            reps.push(x);
            for &h in normal {
                proj[self.mul(x, h)] = c;
            }
        }
        let names = reps.iter().map(|&r| format!("[{}]", self.name(r))).collect();
        let table = reps
            .iter()
            .map(|&a| reps.iter().map(|&b| proj[self.mul(a, b)]).collect())
            .collect();
        let qg = Self::from_table(&format!("{}/N", self.label), names, table)?;
        let mut gens: Vec<usize> = self.gens.iter().map(|&g| proj[g]).collect();
        gens.retain(|&g| g != qg.identity);
        gens.dedup();
        let qg = if gens.is_empty() { qg } else { qg.with_generators(gens)? };
        Ok((qg, proj))
    }
}

pub fn check_action(k: &FiniteGroup, q: &FiniteGroup, action: &[Vec<usize>]) -> Result<()> {
    let (nk, nq) = (k.order(), q.order());
    if action.len() != nq || action.iter().any(|a| a.len() != nk) {
        return input("action has wrong shape");
    }
    for (qi, a) in action.iter().enumerate() {
        let mut seen = vec![false; nk];
        for &x in a {
            if x >= nk || seen[x] {
                return input(format!("action of {} is not a bijection", q.name(qi)));
            }
            seen[x] = true;
        }
        for x in 0..nk {
            for y in 0..nk {
                if a[k.mul(x, y)] != k.mul(a[x], a[y]) {
                    return input(format!("action of {} is not multiplicative", q.name(qi)));
                }
            }
        }
    }
    if (0..nk).any(|x| action[q.identity()][x] != x) {
        return input("identity acts nontrivially");
    }
    for a in 0..nq {
        for b in 0..nq {
            let ab = q.mul(a, b);
            if (0..nk).any(|x| action[ab][x] != action[a][action[b][x]]) {
                return input("action is not a homomorphism Q -> Aut(K)");
            }
        }
    }
    Ok(())
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Multiplication action of (ℤ/n)^× on ℤ/n, in the shape `semidirect` expects.
pub fn unit_action(n: usize) -> (FiniteGroup, FiniteGroup, Vec<Vec<usize>>) {
    let k = FiniteGroup::cyclic(n);
    let q = FiniteGroup::units_mod(n);
    let action = (0..q.order())
        .map(|i| {
            let u: usize = q.name(i).parse().unwrap();
            (0..n).map(|x| x * u % n).collect()
        })
        .collect();
    (k, q, action)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        assert_eq!(FiniteGroup::symmetric(3).order(), 6);
        assert_eq!(FiniteGroup::symmetric(4).order(), 24);
        assert_eq!(FiniteGroup::alternating(4).order(), 12);
        assert_eq!(FiniteGroup::dihedral(4).order(), 8);
        assert_eq!(FiniteGroup::quaternion().order(), 8);
        assert_eq!(FiniteGroup::units_mod(9).order(), 6);
    }

    #[test]
    fn quaternion_relations() {
        let q = FiniteGroup::quaternion();
        let (i, j, k) = (q.index_of("i").unwrap(), q.index_of("j").unwrap(), q.index_of("k").unwrap());
        let m1 = q.index_of("-1").unwrap();
        assert_eq!(q.mul(i, i), m1);
        assert_eq!(q.mul(q.mul(i, j), k), m1);
        assert!(!q.is_abelian());
    }

    #[test]
    fn s3_as_semidirect() {
        let k = FiniteGroup::cyclic(3);
        let q = FiniteGroup::cyclic(2);
        let action = vec![vec![0, 1, 2], vec![0, 2, 1]];
        let g = FiniteGroup::semidirect(&k, &q, &action).unwrap();
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
    }

    #[test]
    fn bad_table_rejected() {
        let names = vec!["a".to_string(), "b".to_string()];
        assert!(FiniteGroup::from_table("x", names, vec![vec![0, 1], vec![0, 1]]).is_err());
    }

    #[test]
    fn large_perm_group_keeps_generators() {
        let g = FiniteGroup::symmetric(7);
        assert_eq!(g.order(), 5040);
        assert!(!g.has_table());
        let a = g.generators()[0];
        assert_eq!(g.element_order(a), 2);
        assert_eq!(g.mul(a, g.inv(a)), g.identity());
    }

    #[test]
    fn quotient_of_s3_by_a3() {
        let s3 = FiniteGroup::symmetric(3);
        let a3: Vec<usize> = (0..6).filter(|&x| s3.element_order(x) != 2).collect();
        let (q, proj) = s3.quotient(&a3).unwrap();
        assert_eq!(q.order(), 2);
        assert_eq!(proj.len(), 6);
    }
}
