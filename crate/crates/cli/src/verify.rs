//! The named checks behind `trop-aspt verify`.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use trop_aspt::cluster::{
    discover_relations, in_span, prevariety_check, sample_sign_patterns, signed_trop_subfan, signs_of,
    verify_relation, QuadraticRelation, SamplerConfig, SignCensus, SignPattern, Term,
};
use trop_aspt::fan::{build_fan, Fan, Weighting};
use trop_aspt::linalg::{self, format_q, q, Q};
use trop_aspt::polygon::{
    contract_to_small_polygon, dissections, enumerate_orderings, enumerate_subdivisions,
    DihedralOrdering, OrderingClass, SignedLabel, SymmetryClass,
};
use trop_aspt::poset::{associahedron_lattice, cyclohedron_lattice, Graph, Poset};
use trop_aspt::Result;

const SAMPLES: usize = 1000;
const PERTURBATIONS: usize = 10;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Value>,
}

fn check(name: &'static str, pass: bool, detail: String, certificate: impl FnOnce() -> Value) -> Check {
    Check {
        name,
        pass,
        detail,
        certificate: (!pass).then(certificate),
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub n: usize,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Shared state: the fan, its quadrics and the lattices the subfans are
/// compared against.
struct Context {
    fan: Fan,
    relations: Vec<QuadraticRelation>,
    associahedron: Poset,
    cyclohedron: Poset,
    rng: ChaCha8Rng,
}

impl Context {
    fn shape(&self, cones: &[usize]) -> &'static str {
        let p = self.fan.face_poset(cones);
        if p.is_isomorphic(&self.associahedron) {
            "associahedral"
        } else if p.is_isomorphic(&self.cyclohedron) {
            "cyclohedral"
        } else {
            "other"
        }
    }
}

fn random_q(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Q {
    q(rng.random_range(lo..=hi)) / q(rng.random_range(1..=97))
}

fn random_positive(rng: &mut ChaCha8Rng) -> Q {
    q(rng.random_range(1..=200)) / q(rng.random_range(1..=97))
}

fn texts(v: &[Q]) -> Vec<String> {
    v.iter().map(format_q).collect()
}

fn standard_ordering(n: usize) -> DihedralOrdering {
    let word = (1..=n).map(SignedLabel::plain).chain((1..=n).map(SignedLabel::bar_of)).collect();
    DihedralOrdering::from_word(word).expect("1..n followed by the bars is a dihedral ordering")
}

fn fan_census(cx: &Context) -> Check {
    let fan = &cx.fan;
    let n = fan.n();
    let counts: Vec<usize> = (n..2 * n).map(|k| fan.cones_of_dim(k).len()).collect();
    let g = fan.ray_graph(None);
    let graph = Graph::new(g.nodes.len(), &g.edge_list());
    let shape_ok = graph.vertex_count() == counts[1]
        && graph.edge_count() == counts[2]
        && graph.is_connected();
    let expected_ok = match n {
        3 => counts == [1, 13, 21],
        _ => counts.iter().all(|&c| c > 0),
    };
    check(
        "fan census",
        shape_ok && expected_ok,
        format!(
            "{} cones, by dimension {n}..{} {counts:?}; facet graph {} vertices, {} edges, connected={}",
            fan.cones().len(),
            2 * n - 1,
            graph.vertex_count(),
            graph.edge_count(),
            graph.is_connected()
        ),
        || json!({ "counts_by_dim": counts, "graph_edges": g.edge_list() }),
    )
}

fn shape_classes(cx: &Context) -> Check {
    let shapes = cx.fan.catalog().shape_classes();
    let pass = cx.fan.n() != 3 || shapes.len() == 7;
    check(
        "shape classes",
        pass,
        format!("{} unlabeled shapes", shapes.len()),
        || json!(shapes.keys().map(|c| c.to_hex()).collect::<Vec<_>>()),
    )
}

fn purity(cx: &Context) -> Check {
    let fan = &cx.fan;
    let top = 2 * fan.n() - 1;
    let mut reached: BTreeSet<usize> = fan.cones_of_dim(top).into_iter().collect();
    let mut frontier: Vec<usize> = reached.iter().copied().collect();
    while let Some(c) = frontier.pop() {
        for f in fan.facets().iter().filter(|f| f.cone == c) {
            if reached.insert(f.face) {
                frontier.push(f.face);
            }
        }
    }
    let stray: Vec<usize> = (0..fan.cones().len()).filter(|c| !reached.contains(c)).collect();
    check(
        "purity",
        stray.is_empty(),
        format!("every cone is a face of a cone of dimension {top}: {} exceptions", stray.len()),
        || json!({ "not_below_a_maximal_cone": stray }),
    )
}

fn dimension(cx: &Context) -> Check {
    let fan = &cx.fan;
    let bad: Vec<usize> = (0..fan.cones().len())
        .filter(|&i| {
            let c = fan.cone(i);
            let mut gens = fan.lineality().to_vec();
            gens.extend(c.rays.iter().cloned());
            let k = fan.catalog().get(i).k();
            linalg::rank(&gens) != k || c.dim != k
        })
        .collect();
    check(
        "dimension",
        bad.is_empty(),
        format!("exact rank equals the orbit count for {} of {} cones", fan.cones().len() - bad.len(), fan.cones().len()),
        || json!({ "cones": bad }),
    )
}

fn lineality(cx: &Context) -> Check {
    let fan = &cx.fan;
    let rank = linalg::rank(fan.lineality());
    let outside: Vec<usize> = (0..fan.cones().len())
        .filter(|&i| fan.lineality().iter().any(|l| fan.cone(i).coordinates(l).is_none()))
        .collect();
    check(
        "lineality",
        rank == fan.n() && outside.is_empty(),
        format!("L_1..L_{} have rank {rank} and lie in the span of {} cones", fan.n(), fan.cones().len() - outside.len()),
        || json!({ "rank": rank, "cones_missing_lineality": outside }),
    )
}

fn disjointness(cx: &Context) -> Result<Check> {
    let fan = &cx.fan;
    let mut bad = Vec::new();
    for (i, c) in fan.cones().iter().enumerate() {
        match fan.member_reconstruct(&c.interior)? {
            Some(r) if r.cone == i => {}
            other => bad.push(json!({ "cone": i, "found": other.map(|r| r.cone) })),
        }
    }
    Ok(check(
        "disjointness",
        bad.is_empty(),
        format!("interior points of {} cones each lie in exactly their own open cone", fan.cones().len() - bad.len()),
        || json!(bad),
    ))
}

fn random_weighting(cx: &mut Context) -> Result<(usize, Weighting)> {
    let cone = cx.rng.random_range(0..cx.fan.cones().len());
    let r = cx.fan.catalog().get(cone);
    let weights = (0..r.k())
        .map(|o| {
            if r.orbits.is_internal(o) {
                random_positive(&mut cx.rng)
            } else {
                random_q(&mut cx.rng, -300, 300)
            }
        })
        .collect();
    Ok((cone, Weighting::new(&r.orbits, weights)?))
}

fn injectivity(cx: &mut Context) -> Result<Check> {
    let mut seen: BTreeMap<Vec<Q>, (usize, Vec<Q>)> = BTreeMap::new();
    let mut failures = Vec::new();
    for _ in 0..SAMPLES {
        let (cone, l) = random_weighting(cx)?;
        let x = cx.fan.distance_vector(cone, &l);
        let back = cx.fan.member_reconstruct(&x)?;
        let roundtrip = matches!(&back, Some(r) if r.cone == cone && r.weighting == l);
        let key = (cone, l.weights().to_vec());
        let collision = seen.insert(x.clone(), key.clone()).is_some_and(|prev| prev != key);
        if !roundtrip || collision {
            failures.push(json!({
                "cone": cone,
                "weights": texts(l.weights()),
                "point": texts(&x),
                "reconstructed_cone": back.map(|r| r.cone),
            }));
        }
    }
    Ok(check(
        "injectivity",
        failures.is_empty(),
        format!("{SAMPLES} random weighted trees, {} failed to reconstruct uniquely", failures.len()),
        || json!(failures),
    ))
}

fn facets(cx: &Context) -> Check {
    let fan = &cx.fan;
    let n = fan.n();
    let bad: Vec<usize> = (0..fan.cones().len())
        .filter(|&i| {
            let faces: BTreeSet<usize> =
                fan.facets().iter().filter(|f| f.cone == i).map(|f| f.face).collect();
            let count = fan.facets().iter().filter(|f| f.cone == i).count();
            let dim = fan.cone(i).dim;
            count != dim - n || faces.len() != count || faces.iter().any(|&f| fan.cone(f).dim + 1 != dim)
        })
        .collect();
    check(
        "facets",
        bad.is_empty(),
        format!("{} facet relations; every cone of dimension k has k - {n} distinct facets", fan.facets().len()),
        || json!({ "cones": bad }),
    )
}

fn prevariety(cx: &mut Context) -> Check {
    let fan = &cx.fan;
    let n = fan.n();
    let len = fan.index_set().len();
    let mut failures = Vec::new();
    let mut checked = 0;
    for (i, c) in fan.cones().iter().enumerate() {
        let mut points = vec![c.interior.clone()];
        for _ in 0..PERTURBATIONS {
            let ray_w: Vec<Q> = c.rays.iter().map(|_| q(1) + random_positive(&mut cx.rng) / q(300)).collect();
            let lin_w: Vec<Q> = (0..n).map(|_| random_q(&mut cx.rng, -50, 50)).collect();
            let mut p = linalg::combine(&c.rays, &ray_w, len);
            for (x, y) in p.iter_mut().zip(linalg::combine(fan.lineality(), &lin_w, len)) {
                *x += y;
            }
            points.push(p);
        }
        for p in points {
            checked += 1;
            if !prevariety_check(&p, &cx.relations) {
                failures.push(json!({ "cone": i, "point": texts(&p) }));
            }
        }
    }
    check(
        "prevariety",
        failures.is_empty(),
        format!("{checked} interior and perturbed points, {} fail the quadric certificate", failures.len()),
        || json!(failures),
    )
}

fn brahmagupta(fan: &Fan) -> Option<QuadraticRelation> {
    let d = fan.index_set();
    let x = |a: &str, b: &str| d.index_of(a.parse().ok()?, b.parse().ok()?);
    let terms = vec![
        Term { c: q(1), mono: vec![x("1", "2")?, x("1", "2")?] },
        Term { c: q(1), mono: vec![x("1", "2~")?, x("1", "2~")?] },
        Term { c: q(-1), mono: vec![x("1", "1~")?, x("2", "2~")?] },
    ];
    QuadraticRelation::new(3, terms).ok()
}

fn relations(cx: &Context) -> Check {
    let bad: Vec<&QuadraticRelation> = cx.relations.iter().filter(|r| !verify_relation(r)).collect();
    let identity = (cx.fan.n() == 3).then(|| brahmagupta(&cx.fan).is_some_and(|b| in_span(&b, &cx.relations)));
    let mut detail = format!("{} quadrics, {} fail symbolic expansion", cx.relations.len(), bad.len());
    if let Some(found) = identity {
        detail.push_str(&format!("; x(1,2)^2 + x(1,2~)^2 - x(1,1~)x(2,2~) in span: {found}"));
    }
    check(
        "relations",
        bad.is_empty() && identity != Some(false),
        detail,
        || json!(bad.iter().map(|r| r.to_json()).collect::<Vec<_>>()),
    )
}

fn expected_patterns(n: u64) -> u64 {
    (1u64 << (2 * n - 2)) * (n + 1) * (1..n).product::<u64>()
}

fn sign_patterns(cx: &Context, census: &SignCensus) -> Check {
    let want = expected_patterns(cx.fan.n() as u64);
    let witnessed = census
        .patterns
        .iter()
        .all(|(p, w)| signs_of(&w.point()).as_ref() == Some(p));
    let got = census.patterns.len() as u64;
    check(
        "sign patterns",
        census.saturated && witnessed && got == want,
        format!(
            "sign patterns: {got} after {} trials (want {want}); saturated={}, witnesses valid={witnessed}",
            census.trials, census.saturated
        ),
        || {
            json!({
                "trials": census.trials,
                "saturated": census.saturated,
                "patterns": census.patterns.iter().map(|(p, w)| json!({
                    "pattern": p.to_string(),
                    "z": w.z.rows().iter().map(|r| texts(r)).collect::<Vec<_>>(),
                    "epsilon": w.epsilon,
                })).collect::<Vec<_>>(),
            })
        },
    )
}

/// Groups the occurring patterns by the subfan they cut out.
pub fn fibers(fan: &Fan, census: &SignCensus, relations: &[QuadraticRelation]) -> BTreeMap<Vec<usize>, Vec<SignPattern>> {
    let mut out: BTreeMap<Vec<usize>, Vec<SignPattern>> = BTreeMap::new();
    for p in census.patterns.keys() {
        out.entry(signed_trop_subfan(p, fan, relations)).or_default().push(p.clone());
    }
    out
}

/// The ASDO or CSDO whose subfan is `cones`, if there is one.
pub fn ordering_table(fan: &Fan) -> Result<BTreeMap<Vec<usize>, DihedralOrdering>> {
    let mut out = BTreeMap::new();
    for class in [OrderingClass::Asdo, OrderingClass::Csdo] {
        for l in enumerate_orderings(fan.n(), class)? {
            out.insert(fan.subfan_for_ordering(&l)?, l);
        }
    }
    Ok(out)
}

fn signed_tropicalizations(cx: &Context, census: &SignCensus) -> Result<Check> {
    let n = cx.fan.n();
    let fibers = fibers(&cx.fan, census, &cx.relations);
    let table = ordering_table(&cx.fan)?;
    let mut shapes: BTreeMap<&str, usize> = BTreeMap::new();
    let mut entries = Vec::new();
    let mut matched = 0;
    for (cones, patterns) in &fibers {
        let shape = cx.shape(cones);
        *shapes.entry(shape).or_default() += 1;
        let ordering = table.get(cones);
        matched += usize::from(ordering.is_some());
        entries.push(json!({
            "ordering": ordering.map(ToString::to_string),
            "shape": shape,
            "cones": cones,
            "fiber": patterns.len(),
            "patterns": patterns.iter().map(ToString::to_string).collect::<Vec<_>>(),
        }));
    }
    let assoc = shapes.get("associahedral").copied().unwrap_or(0);
    let cyclo = shapes.get("cyclohedral").copied().unwrap_or(0);
    let fiber_sizes: BTreeSet<usize> = fibers.values().map(Vec::len).collect();
    let pass = fibers.len() == 16
        && matched == 16
        && (assoc, cyclo) == (12, 4)
        && fiber_sizes == BTreeSet::from([1 << n]);
    Ok(check(
        "signed tropicalizations",
        pass,
        format!(
            "signed tropicalizations: {} ({assoc} associahedral, {cyclo} cyclohedral); {matched} equal a subfan of an ordering; fiber sizes {fiber_sizes:?} (want 16 (12 associahedral, 4 cyclohedral), fibers of {})",
            fibers.len(),
            1 << n
        ),
        || json!(entries),
    ))
}

fn positivity(cx: &Context) -> Result<Check> {
    let lambda = standard_ordering(cx.fan.n());
    let omega = cx.fan.subfan_for_ordering(&lambda)?;
    let positive = signed_trop_subfan(&SignPattern::all_positive(cx.fan.n()), &cx.fan, &cx.relations);
    Ok(check(
        "positivity",
        positive == omega,
        format!("all-positive subfan has {} cones, the subfan of {lambda} has {}", positive.len(), omega.len()),
        || json!({ "positive": positive, "ordering": omega }),
    ))
}

fn contraction(n: usize) -> Result<Check> {
    let sym = enumerate_subdivisions(n, SymmetryClass::Axial)?;
    let images = sym.iter().map(contract_to_small_polygon).collect::<Result<Vec<_>>>()?;
    let image_set: BTreeSet<_> = images.iter().cloned().collect();
    let target: BTreeSet<_> = dissections(n + 2).into_iter().collect();
    let bijective = image_set.len() == images.len() && image_set == target;
    let mut broken = Vec::new();
    for (i, (a, ia)) in sym.iter().zip(&images).enumerate() {
        for (j, (b, ib)) in sym.iter().zip(&images).enumerate() {
            if a.is_subset(b) != ia.is_subset(ib) {
                broken.push([i, j]);
            }
        }
    }
    Ok(check(
        "contraction",
        bijective && broken.is_empty(),
        format!(
            "{} axially symmetric subdivisions of the {}-gon onto {} of the {}-gon, bijective={bijective}, order-preserving={}",
            sym.len(),
            2 * n,
            target.len(),
            n + 2,
            broken.is_empty()
        ),
        || json!({ "order_violations": broken }),
    ))
}

fn orderings(n: usize) -> Result<Check> {
    let fact = |k: usize| (1..=k).product::<usize>();
    let count = |c| enumerate_orderings(n, c).map(|v| v.len());
    let got = (count(OrderingClass::Generic)?, count(OrderingClass::Asdo)?, count(OrderingClass::Csdo)?);
    let want = (fact(2 * n - 1) / 2, (1 << (n - 2)) * fact(n), (1 << (n - 2)) * fact(n - 1));
    Ok(check(
        "orderings",
        got == want,
        format!("all/ASDO/CSDO = {}/{}/{} (want {}/{}/{})", got.0, got.1, got.2, want.0, want.1, want.2),
        || json!({ "got": [got.0, got.1, got.2], "want": [want.0, want.1, want.2] }),
    ))
}

fn subfan_posets(cx: &Context) -> Result<Check> {
    let mut bad = Vec::new();
    let mut total = 0;
    for (class, want) in [(OrderingClass::Asdo, "associahedral"), (OrderingClass::Csdo, "cyclohedral")] {
        for l in enumerate_orderings(cx.fan.n(), class)? {
            total += 1;
            let cones = cx.fan.subfan_for_ordering(&l)?;
            let shape = cx.shape(&cones);
            if shape != want {
                bad.push(json!({ "ordering": l.to_string(), "shape": shape, "want": want }));
            }
        }
    }
    Ok(check(
        "subfan posets",
        bad.is_empty(),
        format!("{total} ordering subfans, {} with the wrong face poset", bad.len()),
        || json!(bad),
    ))
}

/// Runs every check for `n` in 3..=4. Sign-pattern sampling is part of the
/// suite only for `n = 3`. Per-check timings go to `timing`.
pub fn run(n: usize, seed: u64, mut timing: impl FnMut(&str, std::time::Duration)) -> Result<Report> {
    if !(3..=4).contains(&n) {
        return Err(trop_aspt::Error::Capacity(format!("verify supports n = 3, 4, got {n}")));
    }
    let t = Instant::now();
    let mut cx = Context {
        fan: build_fan(n)?,
        relations: discover_relations(n, seed)?,
        associahedron: associahedron_lattice(n),
        cyclohedron: cyclohedron_lattice(n)?,
        rng: ChaCha8Rng::seed_from_u64(seed),
    };
    timing("setup", t.elapsed());

    let mut checks = Vec::new();
    let mut record = |c: Result<Check>, t: Instant, timing: &mut dyn FnMut(&str, std::time::Duration)| -> Result<()> {
        let c = c?;
        timing(c.name, t.elapsed());
        checks.push(c);
        Ok(())
    };
    macro_rules! step {
        ($e:expr) => {{
            let t = Instant::now();
            let c = $e;
            record(c, t, &mut timing)?;
        }};
    }
    step!(Ok(fan_census(&cx)));
    step!(Ok(shape_classes(&cx)));
    step!(Ok(purity(&cx)));
    step!(Ok(dimension(&cx)));
    step!(Ok(lineality(&cx)));
    step!(disjointness(&cx));
    step!(injectivity(&mut cx));
    step!(Ok(facets(&cx)));
    step!(Ok(prevariety(&mut cx)));
    step!(Ok(relations(&cx)));
    if n == 3 {
        let census = sample_sign_patterns(n, seed, SamplerConfig::default());
        step!(Ok(sign_patterns(&cx, &census)));
        step!(signed_tropicalizations(&cx, &census));
    }
    step!(positivity(&cx));
    step!(contraction(n));
    step!(orderings(n));
    step!(subfan_posets(&cx));
    Ok(Report { n, seed, checks })
}
