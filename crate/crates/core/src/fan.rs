//! The space of ASPTs as a fan in `Q^D`: distance vectors, cones, facets,
//! membership queries and the subfans attached to dihedral orderings.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num::Signed;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, q, to_f64, ColumnSolver, Q};
use crate::polygon::{DihedralOrdering, OrderingClass, SignedLabel};
use crate::poset::Poset;
use crate::trees::{enumerate_aspts, AsptCatalog, LeafMask, OrbitDecomposition, PhyloTree, TreeCode};

/// The coordinate set `D`: one representative of every unordered pair
/// `{a, b}` up to `{a, b} ~ {ā, b̄}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSetD {
    n: usize,
    pairs: Vec<(SignedLabel, SignedLabel)>,
    table: Vec<Vec<Option<usize>>>,
}

impl IndexSetD {
    pub fn new(n: usize) -> Self {
        let mut pairs = Vec::with_capacity(n * n);
        for i in 1..=n {
            for j in i + 1..=n {
                pairs.push((SignedLabel::plain(i), SignedLabel::plain(j)));
            }
        }
        for i in 1..=n {
            for j in i..=n {
                pairs.push((SignedLabel::plain(i), SignedLabel::bar_of(j)));
            }
        }
        let mut table = vec![vec![None; 2 * n]; 2 * n];
        for (k, &(a, b)) in pairs.iter().enumerate() {
            for (x, y) in [(a, b), (b, a), (a.bar(), b.bar()), (b.bar(), a.bar())] {
                table[x.slot(n)][y.slot(n)] = Some(k);
            }
        }
        Self { n, pairs, table }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(SignedLabel, SignedLabel)] {
        &self.pairs
    }

    /// Coordinate of the class of `{a, b}`; `None` when `a == b`.
    pub fn index_of(&self, a: SignedLabel, b: SignedLabel) -> Option<usize> {
        self.index_of_slots(a.slot(self.n), b.slot(self.n))
    }

    pub fn index_of_slots(&self, a: usize, b: usize) -> Option<usize> {
        self.table[a][b]
    }

    /// `L_i`: the coordinate at `(a, b)` is `[|a| = i] + [|b| = i]`.
    pub fn lineality_vector(&self, i: usize) -> Vec<Q> {
        self.pairs
            .iter()
            .map(|(a, b)| q((a.index() == i) as i64 + (b.index() == i) as i64))
            .collect()
    }

    pub fn pair_names(&self) -> Vec<[String; 2]> {
        self.pairs
            .iter()
            .map(|(a, b)| [a.to_string(), b.to_string()])
            .collect()
    }
}

/// Edge weights of an ASPT, one per σ-orbit (orbit ids as in
/// [`OrbitDecomposition`]). Internal orbits carry positive weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weighting {
    weights: Vec<Q>,
}

impl Weighting {
    pub fn new(orbits: &OrbitDecomposition, weights: Vec<Q>) -> Result<Self> {
        if weights.len() != orbits.count() {
            return Err(Error::Input(format!(
                "{} weights for {} orbits",
                weights.len(),
                orbits.count()
            )));
        }
        if let Some(o) = orbits.internal_orbit_ids().find(|&o| !weights[o].is_positive()) {
            return Err(Error::Input(format!("internal orbit {o} has weight {}", weights[o])));
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[Q] {
        &self.weights
    }
}

/// Number of edges of each orbit on the path between every pair in `D`.
pub fn orbit_vectors(t: &PhyloTree, orbits: &OrbitDecomposition, d: &IndexSetD) -> Vec<Vec<Q>> {
    let splits: Vec<LeafMask> = t.edge_splits();
    let mut out = vec![vec![0i64; d.len()]; orbits.count()];
    for (k, (a, b)) in d.pairs().iter().enumerate() {
        let (sa, sb) = (a.slot(d.n()), b.slot(d.n()));
        for (e, &m) in splits.iter().enumerate() {
            if (m >> sa) & 1 != (m >> sb) & 1 {
                out[orbits.orbit_of_edge(e)][k] += 1;
            }
        }
    }
    out.into_iter()
        .map(|v| v.into_iter().map(q).collect())
        .collect()
}

/// `w(T, v, l)`: the path-length vector of a weighted ASPT.
pub fn distance_vector(
    t: &PhyloTree,
    orbits: &OrbitDecomposition,
    l: &Weighting,
    d: &IndexSetD,
) -> Vec<Q> {
    linalg::combine(&orbit_vectors(t, orbits, d), l.weights(), d.len())
}

/// The relatively open cone `C_{T,v}`.
#[derive(Clone, Debug)]
pub struct ConeRecord {
    pub aspt: usize,
    pub code: TreeCode,
    pub dim: usize,
    /// Images of unit weights on the internal orbits, in orbit order.
    pub rays: Vec<Vec<Q>>,
    /// Leaf weights 0, internal weights 1.
    pub interior: Vec<Q>,
    solver: ColumnSolver,
}

impl ConeRecord {
    /// Coefficients on `[L_1..L_n | rays]` when `w` lies in the linear span.
    pub fn coordinates(&self, w: &[Q]) -> Option<Vec<Q>> {
        self.solver.solve(w)
    }

    fn screen(&self, w: &[f64]) -> bool {
        let n = self.solver.dim() - self.rays.len();
        match self.solver.approx_solve(w, 1e-7) {
            Some(x) => x[n..].iter().all(|&c| c > -1e-7),
            None => false,
        }
    }

    /// Whether `w` lies in the closure of the cone.
    pub fn closure_contains(&self, w: &[Q]) -> bool {
        let n = self.solver.dim() - self.rays.len();
        self.coordinates(w)
            .is_some_and(|x| x[n..].iter().all(|c| !c.is_negative()))
    }
}

/// `(cone, face, orbit)`: contracting `orbit` of `cone`'s tree yields `face`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Facet {
    pub cone: usize,
    pub face: usize,
    pub orbit: usize,
}

/// Result of [`Fan::member_reconstruct`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reconstruction {
    pub cone: usize,
    pub weighting: Weighting,
    /// Cones whose closure, but not relative interior, contains the point.
    pub boundary_of: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Fan {
    n: usize,
    d: IndexSetD,
    catalog: AsptCatalog,
    lineality: Vec<Vec<Q>>,
    cones: Vec<ConeRecord>,
    facets: Vec<Facet>,
}

/// Builds every cone, checks its dimension by exact rank, and verifies each
/// facet by locating the face's generators in the closure of the cone.
pub fn build_fan(n: usize) -> Result<Fan> {
    let catalog = enumerate_aspts(n)?;
    let d = IndexSetD::new(n);
    let lineality: Vec<Vec<Q>> = (1..=n).map(|i| d.lineality_vector(i)).collect();
    let cones: Vec<ConeRecord> = catalog
        .records()
        .par_iter()
        .enumerate()
        .map(|(i, r)| {
            let mut vectors = orbit_vectors(&r.tree, &r.orbits, &d);
            if vectors[..n] != lineality[..] {
                return Err(Error::Integrity(format!(
                    "leaf orbits of {:?} do not give the L_i",
                    r.code
                )));
            }
            let rays = vectors.split_off(n);
            let mut columns = lineality.clone();
            columns.extend(rays.iter().cloned());
            let solver = ColumnSolver::new(columns).ok_or_else(|| {
                Error::Integrity(format!("generators of the cone of {:?} are dependent", r.code))
            })?;
            if solver.dim() != r.k() {
                return Err(Error::Integrity(format!("dimension mismatch for {:?}", r.code)));
            }
            let interior = linalg::combine(&rays, &vec![q(1); rays.len()], d.len());
            Ok(ConeRecord {
                aspt: i,
                code: r.code.clone(),
                dim: r.k(),
                rays,
                interior,
                solver,
            })
        })
        .collect::<Result<_>>()?;
    let facets: Vec<Vec<Facet>> = catalog
        .records()
        .par_iter()
        .enumerate()
        .map(|(i, r)| {
            r.orbits
                .internal_orbit_ids()
                .map(|o| {
                    let j = catalog.contract(i, o)?;
                    for ray in &cones[j].rays {
                        if !cones[i].closure_contains(ray) {
                            return Err(Error::Integrity(format!(
                                "face {j} is not in the closure of cone {i}"
                            )));
                        }
                    }
                    Ok(Facet {
                        cone: i,
                        face: j,
                        orbit: o,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(Fan {
        n,
        d,
        catalog,
        lineality,
        cones,
        facets: facets.into_iter().flatten().collect(),
    })
}

impl Fan {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn index_set(&self) -> &IndexSetD {
        &self.d
    }

    pub fn catalog(&self) -> &AsptCatalog {
        &self.catalog
    }

    /// The shared lineality basis `L_1, …, L_n`.
    pub fn lineality(&self) -> &[Vec<Q>] {
        &self.lineality
    }

    pub fn cones(&self) -> &[ConeRecord] {
        &self.cones
    }

    pub fn cone(&self, i: usize) -> &ConeRecord {
        &self.cones[i]
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn cones_of_dim(&self, dim: usize) -> Vec<usize> {
        (0..self.cones.len()).filter(|&i| self.cones[i].dim == dim).collect()
    }

    pub fn distance_vector(&self, cone: usize, l: &Weighting) -> Vec<Q> {
        let c = &self.cones[cone];
        let mut columns = self.lineality.clone();
        columns.extend(c.rays.iter().cloned());
        linalg::combine(&columns, l.weights(), self.d.len())
    }

    /// The unique ASWPT with distance vector `w`, if any.
    pub fn member_reconstruct(&self, w: &[Q]) -> Result<Option<Reconstruction>> {
        if w.len() != self.d.len() {
            return Err(Error::Input(format!(
                "vector of length {} for |D| = {}",
                w.len(),
                self.d.len()
            )));
        }
        let approx: Vec<f64> = w.iter().map(to_f64).collect();
        let n = self.n;
        let hits: Vec<(usize, Vec<Q>, bool)> = self
            .cones
            .par_iter()
            .enumerate()
            .filter(|(_, c)| c.screen(&approx))
            .filter_map(|(i, c)| {
                let x = c.coordinates(w)?;
                if x[n..].iter().any(|v| v.is_negative()) {
                    return None;
                }
                let open = x[n..].iter().all(|v| v.is_positive());
                Some((i, x, open))
            })
            .collect();
        let mut open = hits.iter().filter(|h| h.2);
        let Some((cone, x, _)) = open.next() else {
            return Ok(None);
        };
        if let Some((other, _, _)) = open.next() {
            return Err(Error::Integrity(format!(
                "point lies in the open cones {cone} and {other}"
            )));
        }
        let weighting = Weighting::new(&self.catalog.get(*cone).orbits, x.clone())?;
        Ok(Some(Reconstruction {
            cone: *cone,
            weighting,
            boundary_of: hits.iter().filter(|h| !h.2).map(|h| h.0).collect(),
        }))
    }

    /// Cones of `Ω_λ`, i.e. those whose trees are compatible with `λ`.
    pub fn subfan_for_ordering(&self, lambda: &DihedralOrdering) -> Result<Vec<usize>> {
        if lambda.n() != self.n {
            return Err(Error::Input(format!(
                "ordering for n = {} used with the fan for n = {}",
                lambda.n(),
                self.n
            )));
        }
        if lambda.classify() == OrderingClass::Generic {
            return Err(Error::UnsupportedClass(format!(
                "{lambda} is neither an ASDO nor a CSDO"
            )));
        }
        Ok((0..self.cones.len())
            .filter(|&i| self.catalog.get(i).tree.is_compatible_with(lambda))
            .collect())
    }

    /// Face poset of a set of cones (closed under faces), ranked modulo
    /// the lineality space.
    pub fn face_poset(&self, cones: &[usize]) -> Poset {
        let pos: std::collections::HashMap<usize, usize> =
            cones.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        let covers: Vec<(usize, usize)> = self
            .facets
            .iter()
            .filter_map(|f| Some((*pos.get(&f.face)?, *pos.get(&f.cone)?)))
            .collect();
        Poset::from_covers(cones.len(), &covers)
    }

    /// The graph with one node per cone of dimension `n + 1` and one edge
    /// per cone of dimension `n + 2`, optionally restricted to a subfan.
    pub fn ray_graph(&self, within: Option<&[usize]>) -> RayGraph {
        let keep: BTreeSet<usize> = match within {
            Some(c) => c.iter().copied().collect(),
            None => (0..self.cones.len()).collect(),
        };
        let nodes: Vec<usize> = self
            .cones_of_dim(self.n + 1)
            .into_iter()
            .filter(|c| keep.contains(c))
            .collect();
        let mut edges = Vec::new();
        for c in self.cones_of_dim(self.n + 2) {
            if !keep.contains(&c) {
                continue;
            }
            let ends: Vec<usize> = self
                .facets
                .iter()
                .filter(|f| f.cone == c)
                .map(|f| nodes.binary_search(&f.face).expect("facet of a kept cone is kept"))
                .collect();
            if let [a, b] = ends[..] {
                edges.push((a.min(b), a.max(b), c));
            }
        }
        edges.sort_unstable();
        RayGraph { nodes, edges }
    }

    /// Readable name of a ray: the leaves on the side of its split away
    /// from leaf 1.
    pub fn ray_label(&self, cone: usize) -> String {
        let r = self.catalog.get(cone);
        let Some(o) = r.orbits.internal_orbit_ids().next() else {
            return "*".into();
        };
        let splits = r.tree.edge_splits();
        r.orbits
            .orbit(o)
            .iter()
            .map(|&e| {
                let m = crate::trees::normalize_split(splits[e], self.n);
                let names: Vec<String> = (0..2 * self.n)
                    .filter(|s| m & (1 << s) != 0)
                    .map(|s| SignedLabel::from_slot(s, self.n).to_string())
                    .collect();
                names.join(" ")
            })
            .collect::<Vec<_>>()
            .join(" | ")
    }

    pub fn to_dot(&self, graph: &RayGraph) -> String {
        let mut out = String::from("graph omega {\n  node [shape=circle];\n");
        for &c in &graph.nodes {
            let _ = writeln!(out, "  c{c} [label=\"{}\"];", self.ray_label(c));
        }
        for &(a, b, c) in &graph.edges {
            let _ = writeln!(out, "  c{} -- c{} [cone={c}];", graph.nodes[a], graph.nodes[b]);
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self, within: Option<&[usize]>) -> FanJson {
        let keep: Vec<usize> = match within {
            Some(c) => c.to_vec(),
            None => (0..self.cones.len()).collect(),
        };
        let text = |v: &[Q]| v.iter().map(linalg::format_q).collect::<Vec<_>>();
        FanJson {
            n: self.n,
            d: self.d.pair_names(),
            cones: keep
                .iter()
                .map(|&i| {
                    let c = &self.cones[i];
                    ConeJson {
                        tree: c.code.to_hex(),
                        dim: c.dim,
                        rays: c.rays.iter().map(|r| text(r)).collect(),
                        interior: text(&c.interior),
                    }
                })
                .collect(),
            facets: self
                .facets
                .iter()
                .filter_map(|f| {
                    let cone = keep.iter().position(|&c| c == f.cone)?;
                    let face = keep.iter().position(|&c| c == f.face)?;
                    Some([cone, face, f.orbit])
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayGraph {
    /// Cone ids of the nodes, ascending.
    pub nodes: Vec<usize>,
    /// `(node index, node index, cone id)`.
    pub edges: Vec<(usize, usize, usize)>,
}

impl RayGraph {
    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|&(a, b, _)| (a, b)).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConeJson {
    pub tree: String,
    pub dim: usize,
    pub rays: Vec<Vec<String>>,
    pub interior: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FanJson {
    pub n: usize,
    #[serde(rename = "D")]
    pub d: Vec<[String; 2]>,
    pub cones: Vec<ConeJson>,
    /// `[cone, face, orbit]`, with cones given by their position in `cones`.
    pub facets: Vec<[usize; 3]>,
}
