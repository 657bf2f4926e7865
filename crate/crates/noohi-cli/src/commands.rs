use std::collections::BTreeMap;
use std::path::Path;

use noohi::complexes::{
    decompose_system, discretize_descent, lcs_from_action, lcs_isomorphic, ordered_reduction, q_functor,
    reconstruct_ordered, rebuild_descent, spanning_tree, validate_group_data, GroupDataRecord, IndexedDatum,
    TwoComplex,
};
use noohi::counterexamples::{
    borel_obstruction, build_interval_gset, cyclotomic_setting, frobenius_obstruction, nodal_complex,
    nodal_presentation, wedge_presentation, FrobeniusOutcome, WedgeVertex,
};
use noohi::groups::{arc, homomorphisms, unit_action, GroupRef};
use noohi::gsets::{
    check_composite_trivial, check_dense_iff_connected, check_embedding, check_kernel_exactness, check_normal_image,
    DictReport,
};
use noohi::looplike::{is_looplike, verify_phi_identities, verify_relation_stability, DistContext, TestSetFamily};
use noohi::vankampen::{
    build_presentation, count_homs, presentation_equiv, EdgeRelations, HomCount, Presentation, PresentationRecord,
};
use noohi::words::{word_from_records, Atom, Word};
use noohi::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::report::{InputDigest, Status};
use crate::schema::{self, load, DescentInput, DictInput, IndexedInput, LcsInput, LooplikeInput};

pub struct Outcome {
    pub status: Status,
    pub summary: String,
    pub details: Value,
    pub inputs: Vec<InputDigest>,
}

#[derive(Default)]
pub struct Inputs(pub Vec<InputDigest>);

impl Inputs {
    pub fn load<T: serde::de::DeserializeOwned>(&mut self, path: &Path) -> Result<T> {
        let l = load::<T>(path)?;
        self.0.push(InputDigest { path: path.display().to_string(), sha256: l.digest });
        Ok(l.value)
    }
}

fn outcome(status: Status, summary: impl Into<String>, details: Value, inputs: Inputs) -> Outcome {
    Outcome { status, summary: summary.into(), details, inputs: inputs.0 }
}

fn groups(names: &[String], default: &[&str]) -> Result<Vec<GroupRef>> {
    if names.is_empty() {
        default.iter().map(|n| schema::group(n)).collect()
    } else {
        names.iter().map(|n| schema::group(n)).collect()
    }
}

fn count_json(c: &HomCount) -> Value {
    serde_json::to_value(c).unwrap()
}

pub fn present(complex: &Path, data: Option<&Path>, all_elements: bool) -> Result<Outcome> {
    let mut inputs = Inputs::default();
    let c = schema::complex(inputs.load::<TwoComplex>(complex)?)?;
    let rec = data.map(|p| inputs.load::<GroupDataRecord>(p)).transpose()?;
    let d = schema::group_data(&c, rec)?;
    let tree = spanning_tree(&c)?;
    let mode = if all_elements { EdgeRelations::AllElements } else { EdgeRelations::Generators };
    let p = build_presentation(&c, &d, &tree, mode)?;
    let rec = p.to_record()?;
    let summary = format!(
        "{} vertex groups, {} edge generators, {} R1, {} R2",
        p.vertex_groups.len(),
        p.edge_generators.len(),
        p.r1().count(),
        p.r2().count()
    );
    Ok(outcome(Status::Ok, summary, serde_json::to_value(rec).map_err(Error::from)?, inputs))
}

fn load_presentation(inputs: &mut Inputs, path: &Path) -> Result<Presentation> {
    schema::presentation(&inputs.load::<PresentationRecord>(path)?)
}

pub fn homcount(
    presentation: Option<&Path>,
    complex: Option<&Path>,
    data: Option<&Path>,
    names: &[String],
    budget: u128,
) -> Result<Outcome> {
    let mut inputs = Inputs::default();
    let p = match (presentation, complex) {
        (Some(path), _) => load_presentation(&mut inputs, path)?,
        (None, Some(cp)) => {
            let c = schema::complex(inputs.load::<TwoComplex>(cp)?)?;
            let rec = data.map(|p| inputs.load::<GroupDataRecord>(p)).transpose()?;
            let d = schema::group_data(&c, rec)?;
            build_presentation(&c, &d, &spanning_tree(&c)?, EdgeRelations::Generators)?
        }
        (None, None) => return Err(Error::Input("homcount needs --presentation or --complex".into())),
    };
    let mut status = Status::Ok;
    let mut counts = serde_json::Map::new();
    let mut parts = Vec::new();
    for g in groups(names, &["Z/2", "Z/3", "S3"])? {
        let c = count_homs(&p, &g, budget)?;
        match c.exact() {
            Some(n) => parts.push(format!("{}: {n}", g.label())),
            None => {
                status = Status::Inconclusive;
                parts.push(format!("{}: inconclusive", g.label()));
            }
        }
        counts.insert(g.label().to_string(), count_json(&c));
    }
    Ok(outcome(status, parts.join(", "), json!({ "homcounts": counts }), inputs))
}

pub fn equiv(left: &Path, right: &Path, names: &[String], budget: u128) -> Result<Outcome> {
    let mut inputs = Inputs::default();
    let p = load_presentation(&mut inputs, left)?;
    let q = load_presentation(&mut inputs, right)?;
    let tests = groups(names, &["Z/2", "Z/3", "Z/4", "S3"])?;
    let rep = presentation_equiv(&p, &q, &tests, budget)?;
    let (status, summary) = match rep.consistent {
        Some(true) => (Status::Ok, "hom-counts agree on every test group".to_string()),
        Some(false) => {
            let bad = rep.rows.iter().find(|r| r.left != r.right).map(|r| r.group.clone()).unwrap_or_default();
            (Status::Violated, format!("hom-counts differ on {bad}"))
        }
        None => (Status::Inconclusive, "budget exhausted".to_string()),
    };
    Ok(outcome(status, summary, serde_json::to_value(&rep).map_err(Error::from)?, inputs))
}

fn dict_status(r: &DictReport) -> Status {
    match r.right {
        None => Status::Inconclusive,
        Some(right) if right == r.left => Status::Ok,
        Some(_) => Status::Violated,
    }
}

pub fn dict_check(path: &Path, bound: usize) -> Result<Outcome> {
    let mut inputs = Inputs::default();
    let input = inputs.load::<DictInput>(path)?;
    let h = input.map.resolve()?;
    let mut reports = vec![check_dense_iff_connected(&h, bound)?];
    let top = h.target.to_tower()?.depth() - 1;
    if let Ok(hp) = h.level_hom(top) {
        reports.insert(0, check_embedding(&hp, bound));
        reports.push(check_normal_image(&hp, bound));
        if let Some(second) = &input.second {
            let h2 = second.resolve()?.level_hom(top)?;
            reports.push(check_composite_trivial(&hp, &h2, bound)?);
            if h2.is_surjective() {
                reports.push(check_kernel_exactness(&hp, &h2, bound)?);
            }
        }
    }
    let status = reports.iter().map(dict_status).fold(Status::Ok, Status::and);
    let summary = reports
        .iter()
        .map(|r| format!("item {}: {:?}", r.item, dict_status(r)).to_lowercase())
        .collect::<Vec<_>>()
        .join(", ");
    Ok(outcome(status, summary, serde_json::to_value(&reports).map_err(Error::from)?, inputs))
}

pub fn lcs(path: &Path) -> Result<Outcome> {
    let mut inputs = Inputs::default();
    let input = inputs.load::<LcsInput>(path)?;
    let c = schema::complex(input.complex)?;
    let d = schema::group_data(&c, input.data)?;
    let failures = validate_group_data(&c, &d)?;
    if !failures.is_empty() {
        return Ok(outcome(
            Status::Violated,
            format!("group data fails {} squares", failures.len()),
            json!({ "square_failures": failures.len() }),
            inputs,
        ));
    }
    let s = input.action.resolve()?;
    let tree = spanning_tree(&c)?;
    let m = lcs_from_action(&c, &d, &tree, &s)?;
    m.validate(&c, &d)?;
    let parts = decompose_system(&m, &c, &d)?;
    let back = q_functor(&m, &c, &d, &tree)?;
    let orbit_count = back.orbits().len();
    let status = if orbit_count == parts.len() { Status::Ok } else { Status::Violated };
    let summary = format!("{} points, {} connected components, {} orbits after Q", s.points, parts.len(), orbit_count);
    let sizes: Vec<usize> = parts.iter().map(|p| p.size()).collect();
    Ok(outcome(status, summary, json!({ "components": sizes, "orbits": orbit_count }), inputs))
}

pub fn descent(datum: Option<&Path>, ordered: Option<&Path>) -> Result<Outcome> {
    let mut inputs = Inputs::default();
    if let Some(path) = datum {
        let input = inputs.load::<DescentInput>(path)?;
        let c = schema::complex(input.complex)?;
        input.datum.validate(&c)?;
        let d = schema::group_data(&c, None)?;
        let m = discretize_descent(&input.datum, &c, &d)?;
        m.validate(&c, &d)?;
        let back = rebuild_descent(&m, &c, &d)?;
        let iso = lcs_isomorphic(&m, &c, &d)?;
        let ok = back == input.datum && iso;
        let status = if ok { Status::Ok } else { Status::Violated };
        return Ok(outcome(
            status,
            format!("round trip {}", if ok { "exact" } else { "failed" }),
            json!({ "round_trip": back == input.datum, "isomorphic": iso }),
            inputs,
        ));
    }
    let Some(path) = ordered else {
        return Err(Error::Input("descent needs --datum or --ordered".into()));
    };
    let input = inputs.load::<IndexedInput>(path)?;
    let full = IndexedDatum {
        fibers: input.fibers,
        phi: input.phi.into_iter().map(|p| ((p.i, p.j), p.map)).collect::<BTreeMap<_, _>>(),
    };
    let ord = ordered_reduction(&full)?;
    let back = reconstruct_ordered(&ord)?;
    let ok = back == full;
    Ok(outcome(
        if ok { Status::Ok } else { Status::Violated },
        format!("ordered reduction keeps {} maps, reconstruction {}", ord.phi.len(), if ok { "exact" } else { "differs" }),
        json!({ "ordered_maps": ord.phi.len(), "reconstructed": ok }),
        inputs,
    ))
}

pub fn looplike_words(path: &Path) -> Result<Outcome> {
    let mut inputs = Inputs::default();
    let input = inputs.load::<LooplikeInput>(path)?;
    let c = schema::complex(input.complex)?;
    let s = input.action.resolve()?;
    let family = TestSetFamily::from_action(&s, input.base, input.depth, None)?;
    let dctx = DistContext::new(spanning_tree(&c)?);
    let wctx = noohi::words::WordContext { groups: s.vertex.iter().map(|(v, (g, _))| (v.clone(), g.clone())).collect() };
    let mut rows = Vec::new();
    let mut status = Status::Ok;
    for recs in &input.words {
        let w = word_from_records(recs, &wctx)?;
        let v = is_looplike(&w, &family, &dctx, &wctx)?;
        if v.looplike.is_none() {
            status = Status::Inconclusive;
        }
        rows.push(json!({ "word": w.to_string(), "verdict": v }));
    }
    let yes = rows.iter().filter(|r| r["verdict"]["looplike"] == json!(true)).count();
    Ok(outcome(status, format!("{yes} of {} words looplike", rows.len()), json!({ "words": rows }), inputs))
}

fn random_word(rng: &mut ChaCha8Rng, vertex: &str, order: usize, edges: &[String], len: usize) -> Word {
    let letters = (0..len)
        .map(|_| {
            if rng.gen_bool(0.5) {
                Atom::vertex(vertex, rng.gen_range(0..order))
            } else {
                Atom::edge(&edges[rng.gen_range(0..edges.len())], if rng.gen_bool(0.5) { 1 } else { -1 })
            }
        })
        .collect();
    Word { letters }
}

pub fn looplike_cyclotomic(modulus: usize, samples: usize, seed: u64) -> Result<Outcome> {
    if modulus < 3 {
        return Err(Error::Input("modulus must be at least 3".into()));
    }
    let c = nodal_complex();
    let s = cyclotomic_setting(&c, modulus, |_, _| modulus - 1, |_, _| modulus - 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<String> = c.edges.iter().map(|e| e.id.clone()).collect();
    let words: Vec<Word> = (0..samples).map(|_| random_word(&mut rng, "C", modulus, &edges, 4)).collect();
    let cocycle = s.eta.cocycle_failures();
    let phi = verify_phi_identities(&s.eta, &words)?;
    let stab = verify_relation_stability(&s.presentation, &c, &s.geometric, &s.eta, 100_000)?;
    let status = if !cocycle.is_empty() || !phi.ok() || !stab.ok() {
        Status::Violated
    } else if stab.inconclusive > 0 {
        Status::Inconclusive
    } else {
        Status::Ok
    };
    let summary = format!(
        "cocycle failures {}, φ identities {}/{}, relation stability {}/{}",
        cocycle.len(),
        phi.checked - phi.failures.len(),
        phi.checked,
        stab.checked - stab.failures.len() - stab.inconclusive,
        stab.checked
    );
    Ok(outcome(status, summary, json!({ "phi": phi, "stability": stab }), Inputs::default()))
}

pub fn picture(ell: u64, q: u64, depth: u32) -> Result<Outcome> {
    let s = build_interval_gset(ell, depth)?;
    let out = frobenius_obstruction(&s, q)?;
    let (status, summary) = match &out {
        FrobeniusOutcome::Conflict(r) => (
            Status::Ok,
            format!(
                "obstruction found at level {} with q = {}: label {} vs {} mod {}",
                r.level,
                r.q,
                r.first.label,
                r.second.label,
                (ell as usize).pow(r.level + 1)
            ),
        ),
        FrobeniusOutcome::Consistent { window, .. } => (Status::Ok, format!("consistent within a window of {window} points")),
        FrobeniusOutcome::Inconclusive { reason } => (Status::Inconclusive, reason.clone()),
    };
    let overlaps: Vec<Value> = s.overlaps().iter().map(|(m, n)| json!({ "m": m, "size": n, "at_least_two": *n >= 2 })).collect();
    Ok(outcome(status, summary, json!({ "outcome": out, "overlaps": overlaps, "window": s.window }), Inputs::default()))
}

pub fn matrices(ell: u64, p: u64, n: i64, prec: u32) -> Result<Outcome> {
    let r = borel_obstruction(ell, p, n, prec)?;
    let consistent = r.untwisted_in_integral
        && r.obstruction == (r.predicted_valuation < 0)
        && (!r.obstruction || r.twisted_valuation == Some(r.predicted_valuation));
    let v = r.twisted_valuation.map_or("∞".to_string(), |v| v.to_string());
    let summary = if r.obstruction {
        format!("obstruction found, v={v}")
    } else {
        format!("no obstruction, v={v}")
    };
    let status = if consistent { Status::Ok } else { Status::Violated };
    Ok(outcome(status, summary, serde_json::to_value(&r).map_err(Error::from)?, Inputs::default()))
}

/// `Σ_{φ: Gal → T} |C_T(im φ)|`, the number of maps out of `Gal × ℤ`.
fn product_with_integers(gal: &GroupRef, t: &GroupRef) -> u64 {
    homomorphisms(gal, t)
        .iter()
        .map(|h| {
            let im = h.image();
            (0..t.order()).filter(|&x| im.iter().all(|&y| t.mul(x, y) == t.mul(y, x))).count() as u64
        })
        .sum()
}

pub fn nodal(gal: &str, names: &[String], budget: u128) -> Result<Outcome> {
    let gal = schema::group(gal)?;
    let p = nodal_presentation(&gal)?;
    let mut status = Status::Ok;
    let mut rows = Vec::new();
    for t in groups(names, &["Z/2", "Z/3", "Z/4", "S3"])? {
        let c = count_homs(&p, &t, budget)?;
        let expected = product_with_integers(&gal, &t);
        match c.exact() {
            None => status = status.and(Status::Inconclusive),
            Some(n) if n != expected => status = Status::Violated,
            Some(_) => {}
        }
        rows.push(json!({ "group": t.label(), "count": count_json(&c), "expected": expected }));
    }
    let summary = format!("nodal presentation against Gal × ℤ over {} groups", rows.len());
    Ok(outcome(status, summary, json!({ "rows": rows }), Inputs::default()))
}

pub fn wedge(modulus: usize, vertices: usize, loops: usize, names: &[String], budget: u128) -> Result<Outcome> {
    let (k, q, action) = unit_action(modulus);
    let (k, gal) = (arc(k), arc(q));
    let vs = vec![WedgeVertex { geometric: k, action }; vertices];
    let p = wedge_presentation(&vs, loops, &gal)?;
    let mut status = Status::Ok;
    let mut rows = Vec::new();
    for t in groups(names, &["Z/2", "Z/3", "S3"])? {
        let c = count_homs(&p, &t, budget)?;
        if c.exact().is_none() {
            status = Status::Inconclusive;
        }
        rows.push(json!({ "group": t.label(), "count": count_json(&c) }));
    }
    let summary = format!("{vertices} vertices, {loops} loops over (Z/{modulus})^×");
    Ok(outcome(status, summary, json!({ "rows": rows }), Inputs::default()))
}
