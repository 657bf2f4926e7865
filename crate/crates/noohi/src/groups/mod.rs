//! Finite groups, quotient towers and the homomorphisms between them.

mod finite;
mod hom;
mod subgroup;
mod tower;

pub use finite::{check_action, cycle_notation, gcd, unit_action, FiniteGroup, GroupRef, TABLE_CAP};
pub use hom::{arc, count_homomorphisms, homomorphisms, FiniteHom};
pub use subgroup::{
    all_subgroups, conjugate_subgroup, contains, generated, is_normal, is_subgroup, is_subset, left_cosets,
    normal_closure, small_generating_set, subgroup_class_reps,
};
pub use tower::{
    has_dense_image, noohi_quotient, quotient_by_closure_consistency, semidirect_check,
    smallest_normal_thickly_closed, thick_closure, ApproxGroup, ApproxSubgroup, Homomorphism, LevelAction,
    LevelMap, QuotientTower, SemidirectReport, DEFAULT_DEPTH,
};

/// Looks up a small group by name: `Z/n`, `S3`, `S4`, `A4`, `D4`, `Q8`, `U9` (units mod 9), `1`.
pub fn named(name: &str) -> Option<FiniteGroup> {
    let name = name.trim();
    if name == "1" {
        return Some(FiniteGroup::trivial());
    }
    if let Some(n) = name.strip_prefix("Z/").and_then(|s| s.parse::<usize>().ok()) {
        return (n >= 1).then(|| FiniteGroup::cyclic(n));
    }
    let (head, tail) = name.split_at(1);
    let n: usize = tail.parse().ok()?;
    match head {
        "S" if (1..=7).contains(&n) => Some(FiniteGroup::symmetric(n)),
        "A" if (3..=7).contains(&n) => Some(FiniteGroup::alternating(n)),
        "D" if n >= 3 => Some(FiniteGroup::dihedral(n)),
        "Q" if n == 8 => Some(FiniteGroup::quaternion()),
        "U" if n >= 2 => Some(FiniteGroup::units_mod(n)),
        _ => None,
    }
}
