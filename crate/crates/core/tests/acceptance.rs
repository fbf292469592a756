//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Every comparison is exact (rational or integer equality); there are no
//! floating-point tolerances anywhere in this file. Expected values are
//! either closed formulas evaluated here or computed by oracles written
//! independently of the library (path sums by breadth-first search,
//! hand-entered graphs).

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::process::ExitCode;
use std::time::Instant;

use num::{BigInt, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trop_aspt::cluster::{
    discover_relations, in_span, prevariety_check, sample_sign_patterns, signed_trop_subfan,
    verify_relation, QuadraticRelation, SamplerConfig, SignPattern, Term,
};
use trop_aspt::fan::{build_fan, Fan, IndexSetD, Weighting};
use trop_aspt::linalg::{self, q, Q};
use trop_aspt::polygon::{
    contract_to_small_polygon, dissections, enumerate_orderings, enumerate_subdivisions,
    DihedralOrdering, OrderingClass, SymmetryClass,
};
use trop_aspt::poset::{associahedron_lattice, cyclohedron_lattice, Graph};
use trop_aspt::trees::PhyloTree;

const SEED: u64 = 7;
const SAMPLES: usize = 1000;
const PERTURBATIONS: usize = 10;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// The graph drawn for n = 3: a hexagon `a0..a5`, a triangle `b1 b3 b5`,
/// connectors `c1 c3 c5` meeting at `α`, and spokes `a_i b_i`.
fn hand_drawn_graph() -> Graph {
    let names = [
        "a0", "a1", "a2", "a3", "a4", "a5", "b1", "b3", "b5", "c1", "c3", "c5", "alpha",
    ];
    let id = |s: &str| names.iter().position(|&x| x == s).unwrap();
    let edges = [
        ("a0", "a1"), ("a1", "a2"), ("a2", "a3"), ("a3", "a4"), ("a4", "a5"), ("a5", "a0"),
        ("b1", "b3"), ("b3", "b5"), ("b5", "b1"),
        ("a2", "c1"), ("c1", "b5"), ("a4", "c3"), ("c3", "b1"), ("a0", "c5"), ("c5", "b3"),
        ("c1", "alpha"), ("c3", "alpha"), ("c5", "alpha"),
        ("a1", "b1"), ("a3", "b3"), ("a5", "b5"),
    ];
    let e: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (id(a), id(b))).collect();
    Graph::new(names.len(), &e)
}

fn random_q(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Q {
    Q::new(BigInt::from(rng.random_range(lo..=hi)), BigInt::from(rng.random_range(1..=97i64)))
}

fn random_positive_odd(rng: &mut ChaCha8Rng) -> Q {
    let den = 2 * rng.random_range(0..50i64) + 1;
    Q::new(BigInt::from(rng.random_range(1..=200i64)), BigInt::from(den))
}

/// Independent distance oracle: weighted path length by BFS on the tree.
fn bfs_distances(t: &PhyloTree, edge_weight: &[Q], d: &IndexSetD) -> Vec<Q> {
    let n = t.n();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); t.vertex_count()];
    for (e, &(u, v)) in t.edges().iter().enumerate() {
        adj[u].push((v, e));
        adj[v].push((u, e));
    }
    let from = |src: usize| {
        let mut dist: Vec<Option<Q>> = vec![None; t.vertex_count()];
        dist[src] = Some(Q::zero());
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v].clone().unwrap();
            for &(u, e) in &adj[v] {
                if dist[u].is_none() {
                    dist[u] = Some(&dv + &edge_weight[e]);
                    queue.push_back(u);
                }
            }
        }
        dist
    };
    d.pairs()
        .iter()
        .map(|(a, b)| from(a.slot(n))[b.slot(n)].clone().unwrap())
        .collect()
}

fn random_aswpt(fan: &Fan, rng: &mut ChaCha8Rng) -> (usize, Vec<Q>) {
    let cone = rng.random_range(0..fan.cones().len());
    let r = fan.catalog().get(cone);
    let weights = (0..r.k())
        .map(|o| {
            if r.orbits.is_internal(o) {
                random_positive_odd(rng)
            } else {
                random_q(rng, -300, 300)
            }
        })
        .collect();
    (cone, weights)
}

fn edge_weights(fan: &Fan, cone: usize, orbit_weights: &[Q]) -> Vec<Q> {
    let r = fan.catalog().get(cone);
    (0..r.tree.edges().len())
        .map(|e| orbit_weights[r.orbits.orbit_of_edge(e)].clone())
        .collect()
}

fn c1_census(fan: &Fan) -> Outcome {
    let counts: Vec<usize> = (3..=5).map(|k| fan.cones_of_dim(k).len()).collect();
    let two_facets = fan
        .cones_of_dim(5)
        .iter()
        .all(|&c| fan.facets().iter().filter(|f| f.cone == c).count() == 2);
    let g = fan.ray_graph(None);
    let graph = Graph::new(g.nodes.len(), &g.edge_list());
    let iso = graph.is_isomorphic(&hand_drawn_graph());
    outcome(
        counts == [1, 13, 21] && two_facets && graph.is_connected() && iso,
        format!(
            "cones by dim 3/4/5 = {counts:?} (want [1, 13, 21]); graph {}v/{}e, connected={}, \
             isomorphic to drawn graph={iso}; every maximal cone has 2 facets={two_facets}",
            graph.vertex_count(),
            graph.edge_count(),
            graph.is_connected()
        ),
    )
}

fn c2_shapes(fan: &Fan) -> Outcome {
    let shapes = fan.catalog().shape_classes();
    let sizes: Vec<usize> = shapes.values().map(Vec::len).collect();
    outcome(
        shapes.len() == 7,
        format!("{} shape classes (want 7), class sizes {sizes:?}", shapes.len()),
    )
}

fn property_suite(fan: &Fan, rng: &mut ChaCha8Rng) -> (usize, String) {
    let n = fan.n();
    let mut violations = 0;
    // Dimension: rank of [lineality | rays] equals k.
    for (i, c) in fan.cones().iter().enumerate() {
        let mut gens = fan.lineality().to_vec();
        gens.extend(c.rays.iter().cloned());
        if linalg::rank(&gens) != fan.catalog().get(i).k() || c.dim != fan.catalog().get(i).k() {
            violations += 1;
        }
    }
    // Lineality: the L_i have rank n and lie in every cone's span.
    if linalg::rank(fan.lineality()) != n {
        violations += 1;
    }
    for c in fan.cones() {
        if fan.lineality().iter().any(|l| c.coordinates(l).is_none()) {
            violations += 1;
        }
    }
    // Purity: every cone is reached from a maximal one by contractions.
    let mut reached: BTreeSet<usize> = fan.cones_of_dim(2 * n - 1).into_iter().collect();
    let mut frontier: Vec<usize> = reached.iter().copied().collect();
    while let Some(c) = frontier.pop() {
        for f in fan.facets().iter().filter(|f| f.cone == c) {
            if reached.insert(f.face) {
                frontier.push(f.face);
            }
        }
    }
    violations += fan.cones().len() - reached.len();
    // Disjointness: each interior point lies in exactly its own open cone.
    for (i, c) in fan.cones().iter().enumerate() {
        match fan.member_reconstruct(&c.interior) {
            Ok(Some(r)) if r.cone == i => {}
            _ => violations += 1,
        }
    }
    // Injectivity: random ASWPTs have pairwise distinct distance vectors.
    let mut seen: BTreeMap<Vec<Q>, (usize, Vec<Q>)> = BTreeMap::new();
    for _ in 0..SAMPLES {
        let (cone, w) = random_aswpt(fan, rng);
        let x = bfs_distances(&fan.catalog().get(cone).tree, &edge_weights(fan, cone, &w), fan.index_set());
        if let Some(prev) = seen.insert(x, (cone, w.clone())) {
            if prev != (cone, w) {
                violations += 1;
            }
        }
    }
    let dims: Vec<usize> = (n..2 * n).map(|k| fan.cones_of_dim(k).len()).collect();
    (
        violations,
        format!("n={n}: {} cones, by dim {dims:?}", fan.cones().len()),
    )
}

fn c3_properties(f3: &Fan, f4: &Fan, rng: &mut ChaCha8Rng) -> Outcome {
    let (v3, d3) = property_suite(f3, rng);
    let (v4, d4) = property_suite(f4, rng);
    outcome(
        v3 + v4 == 0,
        format!("{d3}, {v3} violations; {d4}, {v4} violations; {SAMPLES} injectivity samples each"),
    )
}

fn c4_roundtrip(fans: &[&Fan], rng: &mut ChaCha8Rng) -> Outcome {
    let mut failures = 0;
    for fan in fans {
        for _ in 0..SAMPLES {
            let (cone, w) = random_aswpt(fan, rng);
            let r = fan.catalog().get(cone);
            let x = bfs_distances(&r.tree, &edge_weights(fan, cone, &w), fan.index_set());
            let lib = Weighting::new(&r.orbits, w.clone()).map(|l| fan.distance_vector(cone, &l));
            let ok = lib.as_ref() == Ok(&x)
                && matches!(
                    fan.member_reconstruct(&x),
                    Ok(Some(rec)) if fan.cone(rec.cone).code == r.code && rec.weighting.weights() == &w[..]
                );
            if !ok {
                failures += 1;
            }
        }
    }
    outcome(
        failures == 0,
        format!("{failures} failures over {} samples at n = 3, 4", SAMPLES * fans.len()),
    )
}

fn c5_prevariety(fans: &[&Fan], rels: &[Vec<QuadraticRelation>], rng: &mut ChaCha8Rng) -> Outcome {
    let mut failures = 0;
    let mut checked = 0;
    let mut report = Vec::new();
    for (fan, rels) in fans.iter().zip(rels) {
        let n = fan.n();
        for c in fan.cones() {
            let mut points = vec![c.interior.clone()];
            for _ in 0..PERTURBATIONS {
                let ray_w: Vec<Q> = c.rays.iter().map(|_| q(1) + random_positive_odd(rng) / q(300)).collect();
                let lin_w: Vec<Q> = (0..n).map(|_| random_q(rng, -50, 50)).collect();
                let mut p = linalg::combine(&c.rays, &ray_w, fan.index_set().len());
                for (x, y) in p.iter_mut().zip(linalg::combine(fan.lineality(), &lin_w, fan.index_set().len())) {
                    *x += y;
                }
                points.push(p);
            }
            for p in points {
                checked += 1;
                if !prevariety_check(&p, rels) {
                    failures += 1;
                }
            }
        }
        // Points outside the support: reported, not asserted.
        let (mut outside, mut rejected) = (0, 0);
        for _ in 0..SAMPLES {
            let p: Vec<Q> = (0..fan.index_set().len()).map(|_| q(rng.random_range(-5..=5))).collect();
            if matches!(fan.member_reconstruct(&p), Ok(None)) {
                outside += 1;
                if !prevariety_check(&p, rels) {
                    rejected += 1;
                }
            }
        }
        report.push(format!(
            "n={n}: {} quadrics, {rejected}/{outside} random points outside the fan fail the check",
            rels.len()
        ));
    }
    outcome(
        failures == 0,
        format!("{failures} failures over {checked} points; {}", report.join("; ")),
    )
}

fn brahmagupta() -> QuadraticRelation {
    let d = IndexSetD::new(3);
    let x = |a: &str, b: &str| d.index_of(a.parse().unwrap(), b.parse().unwrap()).unwrap();
    QuadraticRelation::new(
        3,
        vec![
            Term { c: q(1), mono: vec![x("1", "2"), x("1", "2")] },
            Term { c: q(1), mono: vec![x("1", "2~"), x("1", "2~")] },
            Term { c: q(-1), mono: vec![x("1", "1~"), x("2", "2~")] },
        ],
    )
    .unwrap()
}

fn c6_relations(rels: &[Vec<QuadraticRelation>]) -> Outcome {
    let bad: usize = rels.iter().flatten().filter(|r| !verify_relation(r)).count();
    let total: usize = rels.iter().map(Vec::len).sum();
    let spans = in_span(&brahmagupta(), &rels[0]);
    outcome(
        bad == 0 && spans,
        format!("{total} quadrics (n=3: {}, n=4: {}), {bad} fail expansion; identity in span: {spans}", rels[0].len(), rels[1].len()),
    )
}

fn c7_census(census: &trop_aspt::cluster::SignCensus) -> Outcome {
    let n = 3u64;
    let expected = (1u64 << (2 * n - 2)) * (n + 1) * (1..n).product::<u64>();
    let witnessed = census.patterns.iter().all(|(p, w)| {
        trop_aspt::cluster::signs_of(&w.point()).as_ref() == Some(p)
    });
    outcome(
        census.saturated && census.patterns.len() as u64 == expected && witnessed,
        format!(
            "{} patterns after {} trials (saturated={}, witnesses valid={witnessed}); want {expected}",
            census.patterns.len(),
            census.trials,
            census.saturated
        ),
    )
}

fn subfan_class(fan: &Fan, cones: &[usize]) -> &'static str {
    let p = fan.face_poset(cones);
    if p.is_isomorphic(&associahedron_lattice(fan.n())) {
        "pentagon"
    } else if cyclohedron_lattice(fan.n()).is_ok_and(|c| p.is_isomorphic(&c)) {
        "hexagon"
    } else {
        "other"
    }
}

fn c8_classification(
    fan: &Fan,
    census: &trop_aspt::cluster::SignCensus,
    rels: &[QuadraticRelation],
) -> Outcome {
    let mut fibers: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for p in census.patterns.keys() {
        *fibers.entry(signed_trop_subfan(p, fan, rels)).or_default() += 1;
    }
    let mut by_ordering: BTreeMap<Vec<usize>, DihedralOrdering> = BTreeMap::new();
    for class in [OrderingClass::Asdo, OrderingClass::Csdo] {
        for l in enumerate_orderings(3, class).unwrap() {
            by_ordering.insert(fan.subfan_for_ordering(&l).unwrap(), l);
        }
    }
    let mut shapes: BTreeMap<&str, usize> = BTreeMap::new();
    let mut matched = 0;
    for s in fibers.keys() {
        if by_ordering.contains_key(s) {
            matched += 1;
        }
        *shapes.entry(subfan_class(fan, s)).or_default() += 1;
    }
    let fiber_sizes: BTreeSet<usize> = fibers.values().copied().collect();
    let pass = fibers.len() == 16
        && matched == 16
        && shapes.get("pentagon") == Some(&12)
        && shapes.get("hexagon") == Some(&4)
        && fiber_sizes == BTreeSet::from([8]);
    outcome(
        pass,
        format!(
            "{} distinct subfans (want 16), {matched} equal some Omega_lambda, shapes {shapes:?} \
             (want 12 pentagon, 4 hexagon), fiber sizes {fiber_sizes:?} (want {{8}})",
            fibers.len()
        ),
    )
}

fn c9_positive(fan: &Fan, rels: &[QuadraticRelation]) -> Outcome {
    let lambda: DihedralOrdering = "1,2,3,1~,2~,3~".parse().unwrap();
    let omega = fan.subfan_for_ordering(&lambda).unwrap();
    let positive = signed_trop_subfan(&SignPattern::all_positive(3), fan, rels);
    outcome(
        positive == omega,
        format!(
            "all-positive subfan has {} cones, Omega_(1,2,3,1~,2~,3~) has {}; equal={}",
            positive.len(),
            omega.len(),
            positive == omega
        ),
    )
}

fn c10_contraction() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for n in [3, 4] {
        let sym = enumerate_subdivisions(n, SymmetryClass::Axial).unwrap();
        let images: Vec<_> = sym.iter().map(|s| contract_to_small_polygon(s).unwrap()).collect();
        let image_set: BTreeSet<_> = images.iter().cloned().collect();
        let target: BTreeSet<_> = dissections(n + 2).into_iter().collect();
        let bijective = image_set.len() == images.len() && image_set == target;
        let mut order_ok = true;
        for (a, ia) in sym.iter().zip(&images) {
            for (b, ib) in sym.iter().zip(&images) {
                if a.is_subset(b) != ia.is_subset(ib) {
                    order_ok = false;
                }
            }
        }
        pass &= bijective && order_ok;
        details.push(format!(
            "n={n}: {} -> {} subdivisions, bijective={bijective}, order both ways={order_ok}",
            sym.len(),
            target.len()
        ));
    }
    outcome(pass, details.join("; "))
}

fn c11_orderings() -> Outcome {
    let fact = |k: u64| (1..=k).product::<u64>();
    let mut pass = true;
    let mut details = Vec::new();
    for n in [3u64, 4] {
        let count = |c| enumerate_orderings(n as usize, c).unwrap().len() as u64;
        let (all, asdo, csdo) = (
            count(OrderingClass::Generic),
            count(OrderingClass::Asdo),
            count(OrderingClass::Csdo),
        );
        let want = (fact(2 * n - 1) / 2, (1 << (n - 2)) * fact(n), (1 << (n - 2)) * fact(n - 1));
        pass &= (all, asdo, csdo) == want;
        details.push(format!("n={n}: all/ASDO/CSDO = {all}/{asdo}/{csdo} (want {}/{}/{})", want.0, want.1, want.2));
    }
    outcome(pass, details.join("; "))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let f3 = build_fan(3).expect("fan for n = 3");
    let f4 = build_fan(4).expect("fan for n = 4");
    let rels = vec![
        discover_relations(3, SEED).expect("quadrics for n = 3"),
        discover_relations(4, SEED).expect("quadrics for n = 4"),
    ];
    let census = sample_sign_patterns(3, SEED, SamplerConfig::default());

    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut run = |name, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let mut o = f();
        o.detail.push_str(&format!(" [{:.2?}]", t.elapsed()));
        results.push((name, o));
    };
    run("C1 fan census n=3", &mut || c1_census(&f3));
    run("C2 ASPT shape classes n=3", &mut || c2_shapes(&f3));
    run("C3 Prop (a)-(c) properties", &mut || c3_properties(&f3, &f4, &mut rng));
    run("C4 ASWPT roundtrip", &mut || c4_roundtrip(&[&f3, &f4], &mut rng));
    run("C5 prevariety certificate on the fan", &mut || c5_prevariety(&[&f3, &f4], &rels, &mut rng));
    run("C6 relation integrity", &mut || c6_relations(&rels));
    run("C7 sign-pattern census n=3", &mut || c7_census(&census));
    run("C8 signed tropicalizations n=3", &mut || c8_classification(&f3, &census, &rels[0]));
    run("C9 positive tropicalization", &mut || c9_positive(&f3, &rels[0]));
    run("C10 contraction bijection", &mut c10_contraction);
    run("C11 ordering counts", &mut c11_orderings);

    let mut failed = 0;
    for (name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} {name}: {} (tolerance: exact)", o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed, total {:.2?}",
        results.len() - failed,
        start.elapsed()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
