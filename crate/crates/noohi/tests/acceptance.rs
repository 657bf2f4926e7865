mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use noohi::complexes::{
    decompose_system, discretize_descent, graph_pi1_rank, lcs_from_action, lcs_isomorphic, ordered_reduction,
    q_functor, rebuild_descent, reconstruct_ordered, spanning_tree, GroupData,
};
use noohi::counterexamples::{
    borel_obstruction, build_interval_gset, cyclotomic_setting, frobenius_obstruction, nodal_complex,
    nodal_presentation, FrobeniusOutcome,
};
use noohi::groups::{
    all_subgroups, arc, homomorphisms, is_normal, is_subset, normal_closure, FiniteGroup, FiniteHom, Homomorphism,
};
use noohi::gsets::{
    check_dense_iff_connected, check_embedding, check_kernel_exactness, check_normal_image, ProductAction,
};
use noohi::looplike::{is_looplike, verify_phi_identities, verify_relation_stability, DistContext, TestSetFamily};
use noohi::padics::{psi_word, twisted_word, unit_generator, PadicScalar};
use noohi::vankampen::{count_homs, DEFAULT_BUDGET};
use noohi::words::{concat, invert, multiply, plain_length, reduce, Atom, Home, Word, WordContext};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn plain_length_example() -> Outcome {
    let ctx = WordContext::new().with("v", g("Z/4")).with("w", g("S3"));
    let w: Word = vec![
        Atom::vertex("v", 1),
        Atom::edge("e1", 2),
        Atom::edge("e2", -3),
        Atom::vertex("w", 1),
        Atom::Trivial(Home::Edge("e3".into())),
    ]
    .into();
    let n = plain_length(&w, &ctx).map_err(|e| e.to_string())?;
    ensure(n == 7, || format!("plain length {n}"))?;
    Ok(format!("l_pl = {n}"))
}

fn nodal_rank() -> Outcome {
    let tree = spanning_tree(&nodal_complex()).map_err(|e| e.to_string())?;
    let r = graph_pi1_rank(&tree);
    ensure(r == 3, || format!("rank {r}"))?;
    Ok(format!("rank {r}"))
}

fn nodal_counts() -> Outcome {
    let targets: Vec<_> =
        ["Z/2", "Z/3", "Z/4", "Z/5", "Z/6", "Z/7", "Z/8", "S3", "D4", "Q8", "A4"].iter().map(|n| g(n)).collect();
    let mut rows = 0;
    for gal in ["1", "Z/2", "S3"] {
        let gal = g(gal);
        let p = nodal_presentation(&gal).map_err(|e| e.to_string())?;
        for t in &targets {
            let got = count_homs(&p, t, DEFAULT_BUDGET).map_err(|e| e.to_string())?.exact();
            let want = gal_times_z(&gal, t);
            ensure(got == Some(want), || format!("Gal {} into {}: {got:?} vs {want}", gal.label(), t.label()))?;
            rows += 1;
        }
    }
    Ok(format!("{rows} counts match |Hom(Gal × ℤ, T)|"))
}

fn bigint_valuation(x: &BigInt, ell: u64) -> i64 {
    let l = BigInt::from(ell);
    let zero = BigInt::from(0);
    let mut x = x.clone();
    let mut v = 0;
    while &x % &l == zero {
        x /= &l;
        v += 1;
    }
    v
}

fn borel() -> Outcome {
    let prec = 12;
    let mut cases = 0;
    for ell in [3u64, 5, 7] {
        let u1 = unit_generator(ell, prec).map_err(|e| e.to_string())?;
        for n in 1..=6i64 {
            let untwisted = psi_word(&twisted_word(1, n, &u1), &u1, 1).map_err(|e| e.to_string())?;
            ensure(untwisted.is_identity(), || format!("ℓ={ell}, n={n}: untwisted word is not the identity"))?;
            for p in [2u64, 3, 5, 7, 11, 13].into_iter().filter(|&p| p != ell) {
                let rep = borel_obstruction(ell, p, n, prec).map_err(|e| e.to_string())?;
                ensure(rep.untwisted_in_integral, || format!("ℓ={ell}, n={n}: untwisted outside"))?;
                let u = BigInt::from(u1.residue);
                let diff = BigInt::from(p) * (u.pow(p as u32) - &u);
                let want = bigint_valuation(&diff, ell) - n;
                ensure(rep.twisted_valuation == Some(want), || {
                    format!("ℓ={ell}, p={p}, n={n}: valuation {:?} vs {want}", rep.twisted_valuation)
                })?;
                ensure(rep.obstruction == (want < 0), || format!("ℓ={ell}, p={p}, n={n}: obstruction flag"))?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} twisted valuations match, untwisted words trivial"))
}

fn interval() -> Outcome {
    let s = build_interval_gset(3, 3).map_err(|e| e.to_string())?;
    let FrobeniusOutcome::Conflict(r) = frobenius_obstruction(&s, 19).map_err(|e| e.to_string())? else {
        return Err("q = 19 gave no conflict".into());
    };
    ensure((r.first.label, r.second.label) == (1, 19), || format!("labels {} vs {}", r.first.label, r.second.label))?;
    let FrobeniusOutcome::Conflict(r4) = frobenius_obstruction(&s, 4).map_err(|e| e.to_string())? else {
        return Err("q = 4 gave no conflict".into());
    };
    ensure(r4.q == 64, || format!("q = 4 raised to {}", r4.q))?;
    let brute19 = brute_force_semilinear(&s, 19);
    let brute64 = brute_force_semilinear(&s, 64);
    let control = brute_force_semilinear(&s, 82);
    ensure(brute19 == 0 && brute64 == 0, || format!("brute force found {brute19} / {brute64} maps"))?;
    ensure(control > 0, || "control q = 82 has no semilinear map".into())?;
    Ok(format!("1̄ vs 19̄; q=4 → 64; brute force 0, 0 (control: {control})"))
}

fn dictionary() -> Outcome {
    let pool: Vec<_> = ["1", "Z/2", "Z/3", "Z/4", "Z/6", "S3", "D4", "Q8", "A4", "Z/8"].iter().map(|n| g(n)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let bound = 64;
    let mut homs: BTreeMap<(usize, usize), Vec<FiniteHom>> = BTreeMap::new();
    let (mut instances, mut mismatches, mut unknown) = (0, Vec::new(), 0);
    while instances < 200 {
        let (i, j) = (rng.gen_range(0..pool.len()), rng.gen_range(0..pool.len()));
        let list = homs.entry((i, j)).or_insert_with(|| homomorphisms(&pool[i], &pool[j]));
        let hp = list[rng.gen_range(0..list.len())].clone();
        let target = &pool[j];
        let closure = normal_closure(target, &hp.image());
        let normals: Vec<Vec<usize>> =
            all_subgroups(target).into_iter().filter(|n| is_normal(target, n) && is_subset(&closure, n)).collect();
        let normal = &normals[rng.gen_range(0..normals.len())];
        let (quotient, proj) = target.quotient(normal).map_err(|e| e.to_string())?;
        let h = FiniteHom::new(target.clone(), arc(quotient), proj).map_err(|e| e.to_string())?;

        let kernel_size = (0..hp.source.order()).filter(|&x| hp.apply(x) == hp.target.identity()).count();
        let image_normal = (0..target.order())
            .all(|t| hp.image().iter().all(|&y| hp.image().contains(&target.mul(target.mul(t, y), target.inv(t)))));
        let reports = [
            (check_embedding(&hp, bound), Some(kernel_size == 1)),
            (check_dense_iff_connected(&Homomorphism::from_finite(&hp), bound).map_err(|e| e.to_string())?, None),
            (check_normal_image(&hp, bound), Some(image_normal)),
            (check_kernel_exactness(&hp, &h, bound).map_err(|e| e.to_string())?, Some(closure == *normal)),
        ];
        for (rep, oracle) in reports {
            match rep.agrees() {
                Some(true) => {}
                Some(false) => mismatches.push(format!("item {} on {} → {}", rep.item, pool[i].label(), target.label())),
                None => unknown += 1,
            }
            if oracle.is_some_and(|o| o != rep.left) {
                mismatches.push(format!("item {} group side disagrees with the oracle", rep.item));
            }
        }
        instances += 1;
    }
    ensure(mismatches.is_empty(), || mismatches.join("; "))?;
    ensure(unknown == 0, || format!("{unknown} reports inconclusive"))?;
    Ok(format!("{instances} instances, 0 mismatches on items 1, 2, 3, 5"))
}

fn union_find_orbits(s: &ProductAction) -> usize {
    let mut parent: Vec<usize> = (0..s.points).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    let perms = s.vertex.values().flat_map(|(_, ps)| ps.iter()).chain(s.edges.values());
    for p in perms {
        for x in 0..s.points {
            let (a, b) = (find(&mut parent, x), find(&mut parent, p[x]));
            parent[a] = b;
        }
    }
    (0..s.points).filter(|&x| find(&mut parent, x) == x).count()
}

fn lcs_systems() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut total = 0;
    for _ in 0..120 {
        let case = random_lcs_case(&mut rng);
        let tree = spanning_tree(&case.complex).map_err(|e| e.to_string())?;
        let m = lcs_from_action(&case.complex, &case.data, &tree, &case.action).map_err(|e| e.to_string())?;
        m.validate(&case.complex, &case.data).map_err(|e| e.to_string())?;
        let back = q_functor(&m, &case.complex, &case.data, &tree).map_err(|e| e.to_string())?;
        let parts = decompose_system(&m, &case.complex, &case.data).map_err(|e| e.to_string())?;
        let expected = union_find_orbits(&case.action);
        ensure(back.orbits().len() == parts.len() && parts.len() == expected, || {
            format!("{} orbits, {} components, oracle {expected}", back.orbits().len(), parts.len())
        })?;
        for part in &parts {
            let q = q_functor(part, &case.complex, &case.data, &tree).map_err(|e| e.to_string())?;
            ensure(q.orbits().len() == 1, || "a component is not transitive".into())?;
        }
        total += 1;
    }
    Ok(format!("{total} systems: orbits = components, each component transitive"))
}

fn descent() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let one = arc(FiniteGroup::trivial());
    for _ in 0..120 {
        let (c, dd) = random_descent(&mut rng);
        let d = GroupData::constant(&c, &one);
        let m = discretize_descent(&dd, &c, &d).map_err(|e| e.to_string())?;
        let again = rebuild_descent(&m, &c, &d).map_err(|e| e.to_string())?;
        ensure(again == dd, || "descent round trip changed the datum".into())?;
        ensure(lcs_isomorphic(&m, &c, &d).map_err(|e| e.to_string())?, || "system round trip failed".into())?;
    }
    for _ in 0..120 {
        let full = random_indexed(&mut rng);
        let ord = ordered_reduction(&full).map_err(|e| e.to_string())?;
        let back = reconstruct_ordered(&ord).map_err(|e| e.to_string())?;
        ensure(back == full, || "ordered round trip changed the datum".into())?;
    }
    Ok("120 descent + 120 ordered round trips".into())
}

fn short_words(letters: &[Atom], generators: &[Atom]) -> Vec<Word> {
    let mut out: Vec<Word> = letters.iter().map(|a| vec![a.clone()].into()).collect();
    for a in generators {
        for b in generators {
            out.push(vec![a.clone(), b.clone()].into());
        }
    }
    out
}

fn letters_for(vertices: &[String], edges: &[String], order: usize) -> (Vec<Atom>, Vec<Atom>) {
    let mut all = Vec::new();
    let mut gens = Vec::new();
    for v in vertices {
        all.extend((1..order).map(|x| Atom::vertex(v, x)));
        gens.extend([Atom::vertex(v, 1), Atom::vertex(v, order - 1)]);
    }
    for e in edges {
        for s in [1, -1] {
            all.push(Atom::edge(e, s));
            gens.push(Atom::edge(e, s));
        }
    }
    (all, gens)
}

fn cyclotomic() -> Outcome {
    let modulus = 9;
    let mut checked = 0;
    for (name, c) in [("nodal", nodal_complex()), ("two-vertex", theta_graph())] {
        let s = cyclotomic_setting(&c, modulus, |e, j| (e.len() * 3 + j as usize + 8) % modulus, |f, i| {
            f.len() + 2 * i as usize
        })
        .map_err(|e| e.to_string())?;
        ensure(s.eta.cocycle_failures().is_empty(), || format!("{name}: δ is not a cocycle"))?;
        let edges: Vec<String> = c.edges.iter().map(|e| e.id.clone()).collect();
        let (all, gens) = letters_for(&c.vertices, &edges, modulus);
        let rep = verify_phi_identities(&s.eta, &short_words(&all, &gens)).map_err(|e| e.to_string())?;
        ensure(rep.ok(), || format!("{name}: {:?}", rep.failures.first()))?;
        let stab = verify_relation_stability(&s.presentation, &c, &s.geometric, &s.eta, 10_000)
            .map_err(|e| e.to_string())?;
        ensure(stab.ok() && stab.inconclusive == 0, || format!("{name}: stability {:?}", stab.failures.first()))?;
        checked += rep.checked + stab.checked;
    }

    // Z/9 acts on three points through reduction mod 3, so U_1 = {0, 3, 6}
    let s = cyclotomic_setting(&nodal_complex(), modulus, |_, _| modulus - 1, |_, _| modulus - 1)
        .map_err(|e| e.to_string())?;
    let z9 = s.geometric_group.clone();
    let shift: Vec<Vec<usize>> = (0..modulus).map(|k| (0..3).map(|x| (x + k) % 3).collect()).collect();
    let action = ProductAction {
        points: 3,
        vertex: BTreeMap::from([("C".to_string(), (z9.clone(), shift))]),
        edges: ["d", "p01", "p10"].iter().map(|e| (e.to_string(), (0..3).collect())).collect(),
    };
    let family = TestSetFamily::from_action(&action, 0, 3, None).map_err(|e| e.to_string())?;
    let u1 = family.kernel("C", 1).map_err(|e| e.to_string())?.to_vec();
    ensure(u1 == vec![0, 3, 6], || format!("U_1 = {u1:?}"))?;
    let dctx = DistContext::new(s.tree.clone());
    let wctx = s.presentation.context();
    let mut certified = 0;
    for sigma in 0..s.gal.order() {
        let unit: usize = s.gal.name(sigma).parse().map_err(|_| "unit name".to_string())?;
        let delta = s.eta.delta[&("d".to_string(), sigma)];
        let w: Word = vec![Atom::vertex("C", delta)].into();
        let verdict = is_looplike(&w, &family, &dctx, &wctx).map_err(|e| e.to_string())?;
        let arranged = unit % 3 == 1;
        ensure(verdict.looplike == Some(arranged), || format!("σ = {unit}: verdict {:?}", verdict.looplike))?;
        if arranged {
            let image = action.act_word(&w, 0).map_err(|e| e.to_string())?;
            ensure(image == 0, || format!("certified δ for σ = {unit} moves s0"))?;
            certified += 1;
        }
    }
    Ok(format!("{checked} φ/(♣) checks; {certified} arranged σ certified and fixing s0"))
}

fn random_word(rng: &mut ChaCha8Rng) -> Word {
    let len = rng.gen_range(0..8);
    (0..len)
        .map(|_| match rng.gen_range(0..4) {
            0 => Atom::vertex("v", rng.gen_range(0..4)),
            1 => Atom::vertex("w", rng.gen_range(0..6)),
            2 => Atom::edge("e1", rng.gen_range(-2..=2)),
            _ => Atom::edge("e2", rng.gen_range(-2..=2)),
        })
        .collect::<Vec<_>>()
        .into()
}

fn ell_valuation(mut x: i128, ell: i128) -> i64 {
    let mut v = 0;
    while x % ell == 0 {
        x /= ell;
        v += 1;
    }
    v
}

fn matches_integer(s: &PadicScalar, x: i128) -> bool {
    match *s {
        PadicScalar::Unit { l, val, unit, prec } => {
            let l = l as i128;
            x != 0 && ell_valuation(x, l) == val && (x / l.pow(val as u32)).rem_euclid(l.pow(prec)) == unit as i128
        }
        PadicScalar::Zero { l, known_to } => x == 0 || known_to.is_some_and(|k| x % (l as i128).pow(k as u32) == 0),
    }
}

fn laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let ctx = WordContext::new().with("v", g("Z/4")).with("w", g("S3"));
    let err = |e: noohi::Error| e.to_string();
    for i in 0..10_000 {
        let (a, b, c) = (random_word(&mut rng), random_word(&mut rng), random_word(&mut rng));
        let (ra, rb, rc) = (reduce(&a, &ctx).map_err(err)?, reduce(&b, &ctx).map_err(err)?, reduce(&c, &ctx).map_err(err)?);
        let left = multiply(&multiply(&ra, &rb, &ctx).map_err(err)?, &rc, &ctx).map_err(err)?;
        let right = multiply(&ra, &multiply(&rb, &rc, &ctx).map_err(err)?, &ctx).map_err(err)?;
        ensure(left == right, || format!("case {i}: associativity"))?;
        let cancel = reduce(&concat(&a, &invert(&a, &ctx).map_err(err)?), &ctx).map_err(err)?;
        ensure(cancel.is_empty(), || format!("case {i}: a·a⁻¹ ≠ 1"))?;
        ensure(reduce(&ra.to_word(), &ctx).map_err(err)? == ra, || format!("case {i}: reduce not idempotent"))?;
    }
    let prec = 8;
    for i in 0..10_000 {
        let ell = [3u64, 5, 7][rng.gen_range(0..3)];
        let x: i128 = rng.gen_range(-50_000..50_000);
        let y: i128 = rng.gen_range(-50_000..50_000);
        let (px, py) = (PadicScalar::from_int(ell, x, prec), PadicScalar::from_int(ell, y, prec));
        ensure(matches_integer(&px.mul(&py), x * y), || format!("case {i}: {x}·{y} mod {ell}"))?;
        ensure(matches_integer(&px.add(&py), x + y), || format!("case {i}: {x}+{y} mod {ell}"))?;
        ensure(matches_integer(&px.sub(&py), x - y), || format!("case {i}: {x}−{y} mod {ell}"))?;
        if x != 0 {
            let one = px.mul(&px.inv().map_err(err)?);
            ensure(matches_integer(&one, 1), || format!("case {i}: x·x⁻¹ ≠ 1"))?;
        }
    }
    Ok("10000 word-law and 10000 padic-law cases".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("plain length of the sample word", plain_length_example),
        ("nodal graph π₁ rank", nodal_rank),
        ("nodal presentation hom-counts", nodal_counts),
        ("Borel coset obstruction", borel),
        ("interval G-set Frobenius obstruction", interval),
        ("group/G-set dictionary", dictionary),
        ("locally constant systems and Q", lcs_systems),
        ("descent round trips", descent),
        ("cyclotomic Galois action", cyclotomic),
        ("word and ℓ-adic laws", laws),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({ms} ms)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({ms} ms)", i + 1);
            }
        }
    }
    println!("{} / {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
