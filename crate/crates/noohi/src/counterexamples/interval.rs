//! Two `ℤ_ℓ`-actions on an initial window of `ℕ_{>0}` cut into consecutive intervals, and the
//! Frobenius-twist obstruction against the action being defined over a finite extension.

use serde::Serialize;

use crate::error::{input, Result};
use crate::padics::is_prime;

/// One orbit: positions `start..start+len` (1-based), labelled by `ℤ/ℓ^level`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub level: u32,
    pub start: usize,
    pub size: usize,
    /// `labels[i]` is the label of position `start + i`; only the part inside the window is kept
    pub labels: Vec<usize>,
    pub complete: bool,
}

impl Interval {
    pub fn contains(&self, pos: usize) -> bool {
        pos >= self.start && pos < self.start + self.labels.len()
    }

    pub fn position_of(&self, label: usize) -> Option<usize> {
        self.labels.iter().position(|&l| l == label).map(|i| self.start + i)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    /// odd-level intervals `a_1, a_3, …`
    A,
    /// even-level intervals `b_2, b_4, …`
    B,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntervalGSet {
    pub ell: u64,
    pub depth: u32,
    pub window: usize,
    pub a: Vec<Interval>,
    pub b: Vec<Interval>,
    pub base: usize,
}

fn cut(ell: u64, levels: impl Iterator<Item = u32>, window: usize) -> Vec<Interval> {
    let mut out = Vec::new();
    let mut start = 1;
    for level in levels {
        if start > window {
            break;
        }
        let size = (ell as usize).pow(level);
        let kept = size.min(window + 1 - start);
        out.push(Interval { level, start, size, labels: (0..kept).collect(), complete: kept == size });
        start += size;
    }
    out
}

pub fn build_interval_gset(ell: u64, depth: u32) -> Result<IntervalGSet> {
    if ell < 3 || !is_prime(ell) {
        return input(format!("ℓ = {ell} is not an odd prime"));
    }
    if depth < 3 {
        return input(format!("depth {depth} < 3"));
    }
    let pw = |k: u32| (ell as usize).pow(k);
    let a_total: usize = (1..=depth).filter(|k| k % 2 == 1).map(pw).sum();
    let b_total: usize = (1..=depth).filter(|k| k % 2 == 0).map(pw).sum();
    let window = a_total.max(b_total);
    let mut a = cut(ell, (1..).step_by(2), window);
    let b = cut(ell, (2..).step_by(2), window);
    // inside b_m ∩ a_{m+1}: first position ↦ 0̄, second ↦ 1̄, the rest of a_{m+1} in order
    for iv in a.iter_mut().filter(|iv| iv.level > 1) {
        let m = iv.level - 1;
        let Some(bm) = b.iter().find(|x| x.level == m) else { continue };
        let shared: Vec<usize> = (iv.start..iv.start + iv.labels.len()).filter(|&p| bm.contains(p)).collect();
        if shared.len() < 2 {
            return input(format!("b_{m} ∩ a_{} has fewer than two points in the window", m + 1));
        }
        let (first, second) = (shared[0], shared[1]);
        let mut order = vec![first, second];
        order.extend((iv.start..iv.start + iv.labels.len()).filter(|&p| p != first && p != second));
        let mut labels = vec![0; iv.labels.len()];
        for (label, pos) in order.into_iter().enumerate() {
            labels[pos - iv.start] = label;
        }
        iv.labels = labels;
    }
    Ok(IntervalGSet { ell, depth, window, a, b, base: 1 })
}

impl IntervalGSet {
    pub fn intervals(&self, side: Side) -> &[Interval] {
        match side {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }

    pub fn interval_of(&self, side: Side, pos: usize) -> Option<&Interval> {
        self.intervals(side).iter().find(|iv| iv.contains(pos))
    }

    /// `k · pos` for the chosen action; `None` outside complete orbits.
    pub fn act(&self, side: Side, k: i128, pos: usize) -> Option<usize> {
        let iv = self.interval_of(side, pos)?;
        if !iv.complete {
            return None;
        }
        let label = iv.labels[pos - iv.start] as i128;
        let target = (label + k).rem_euclid(iv.size as i128) as usize;
        iv.position_of(target)
    }

    pub fn label(&self, side: Side, pos: usize) -> Option<usize> {
        let iv = self.interval_of(side, pos)?;
        Some(iv.labels[pos - iv.start])
    }

    /// `|b_m ∩ a_{m+1}|` for every even `m` whose intersection lies in the window.
    pub fn overlaps(&self) -> Vec<(u32, usize)> {
        self.b
            .iter()
            .filter_map(|bm| {
                let am = self.a.iter().find(|a| a.level == bm.level + 1)?;
                let n = (bm.start..bm.start + bm.labels.len()).filter(|&p| am.contains(p)).count();
                Some((bm.level, n))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EvalPath {
    pub route: String,
    pub image: usize,
    /// label of the image in `a_{m+1}`
    pub label: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContradictionReport {
    pub requested_q: u64,
    pub q: u64,
    pub level: u32,
    pub point: usize,
    pub first: EvalPath,
    pub second: EvalPath,
    pub window: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum FrobeniusOutcome {
    Conflict(ContradictionReport),
    Consistent { window: usize, q: u64, level: u32 },
    Inconclusive { reason: String },
}

fn ell_valuation(mut x: u128, ell: u128) -> u32 {
    let mut v = 0;
    while x > 0 && x.is_multiple_of(ell) {
        x /= ell;
        v += 1;
    }
    v
}

fn pow_u128(b: u128, e: u64) -> Option<u128> {
    (0..e).try_fold(1u128, |acc, _| acc.checked_mul(b))
}

/// Values forced on a `q`-semilinear `φ` fixing the base point, propagated along complete
/// orbits of level `≤ max_level`. Returns the forced map, or the first clash.
pub fn propagate(s: &IntervalGSet, q: u128, max_level: u32) -> std::result::Result<Vec<Option<usize>>, (usize, usize, usize)> {
    let mut phi: Vec<Option<usize>> = vec![None; s.window + 1];
    phi[s.base] = Some(s.base);
    let mut stack = vec![s.base];
    while let Some(x) = stack.pop() {
        let y = phi[x].unwrap();
        for side in [Side::A, Side::B] {
            let (Some(ix), Some(iy)) = (s.interval_of(side, x), s.interval_of(side, y)) else { continue };
            if !ix.complete || !iy.complete || ix.level > max_level || iy.level > max_level {
                continue;
            }
            for k in 0..ix.size {
                let x2 = s.act(side, k as i128, x).unwrap();
                let k_twisted = ((q % iy.size as u128) * k as u128 % iy.size as u128) as i128;
                let y2 = s.act(side, k_twisted, y).unwrap();
                match phi[x2] {
                    None => {
                        phi[x2] = Some(y2);
                        stack.push(x2);
                    }
                    Some(old) if old != y2 => return Err((x2, old, y2)),
                    Some(_) => {}
                }
            }
        }
    }
    Ok(phi)
}

pub fn frobenius_obstruction(s: &IntervalGSet, q: u64) -> Result<FrobeniusOutcome> {
    let ell = s.ell as u128;
    if q == 0 || (q as u128).is_multiple_of(ell) {
        return input(format!("q = {q} is not prime to ℓ"));
    }
    if (q as u128) % ell != 1 {
        return input(format!("q = {q} is not 1 mod ℓ"));
    }
    let mut eff = q as u128;
    let mut m = ell_valuation(eff - 1, ell);
    if eff == 1 {
        return Ok(FrobeniusOutcome::Consistent { window: s.window, q, level: u32::MAX });
    }
    if m % 2 == 1 {
        eff = match pow_u128(eff, s.ell) {
            Some(x) => x,
            None => return Ok(FrobeniusOutcome::Inconclusive { reason: "q^ℓ overflows".into() }),
        };
        m = ell_valuation(eff - 1, ell);
    }
    let Some(am) = s.a.iter().find(|iv| iv.level == m + 1 && iv.complete) else {
        return Ok(if m + 1 > s.depth {
            FrobeniusOutcome::Consistent { window: s.window, q: eff as u64, level: m }
        } else {
            FrobeniusOutcome::Inconclusive { reason: format!("a_{} not complete in the window", m + 1) }
        });
    };
    let phi = match propagate(s, eff, m) {
        Ok(phi) => phi,
        Err((point, first, second)) => {
            let lab = |p: usize| s.label(Side::A, p).unwrap_or(0);
            return Ok(FrobeniusOutcome::Conflict(ContradictionReport {
                requested_q: q,
                q: eff as u64,
                level: m,
                point,
                first: EvalPath { route: "propagation".into(), image: first, label: lab(first) },
                second: EvalPath { route: "propagation".into(), image: second, label: lab(second) },
                window: s.window,
            }));
        }
    };
    let s1 = am.position_of(0).unwrap();
    let s2 = am.position_of(1).unwrap();
    let (Some(f1), Some(f2)) = (phi[s1], phi[s2]) else {
        return Ok(FrobeniusOutcome::Inconclusive { reason: "b_m ∩ a_{m+1} not reached".into() });
    };
    // s₂ = 1·s₁ in a_{m+1}, so φ(s₂) = q·φ(s₁)
    let twisted = s.act(Side::A, (eff % am.size as u128) as i128, f1);
    let Some(twisted) = twisted else {
        return Ok(FrobeniusOutcome::Inconclusive { reason: "φ(s₁) left a_{m+1}".into() });
    };
    if twisted == f2 {
        return Ok(FrobeniusOutcome::Consistent { window: s.window, q: eff as u64, level: m });
    }
    Ok(FrobeniusOutcome::Conflict(ContradictionReport {
        requested_q: q,
        q: eff as u64,
        level: m,
        point: s2,
        first: EvalPath { route: format!("fixed along b_{m}"), image: f2, label: s.label(Side::A, f2).unwrap() },
        second: EvalPath {
            route: format!("q-twist of the generator of a_{}", m + 1),
            image: twisted,
            label: s.label(Side::A, twisted).unwrap(),
        },
        window: s.window,
    }))
}
