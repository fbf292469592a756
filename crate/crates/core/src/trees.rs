//! Leaf-labeled trees with leaves `N`, the dual-tree construction, canonical
//! codes, the symmetry involution and the catalog of all ASPTs.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polygon::{
    self, enumerate_labelings, enumerate_orderings, enumerate_subdivisions, DihedralOrdering,
    Labeling, OrderingClass, SignedLabel, Subdivision, SymmetryClass,
};

/// Bitset over label slots (`1..n` are bits `0..n`, `1̄..n̄` are bits `n..2n`).
pub type LeafMask = u32;

pub fn bar_mask(mask: LeafMask, n: usize) -> LeafMask {
    let low = (1 << n) - 1;
    ((mask & low) << n) | (mask >> n)
}

fn full_mask(n: usize) -> LeafMask {
    (1 << (2 * n)) - 1
}

/// Picks the side of a bipartition that does not contain leaf slot 0.
pub fn normalize_split(mask: LeafMask, n: usize) -> LeafMask {
    if mask & 1 == 1 {
        full_mask(n) ^ mask
    } else {
        mask
    }
}

/// Canonical code of a labeled tree; equal codes mean label-preserving isomorphism.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeCode(Vec<u8>);

impl TreeCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        hex::decode(s)
            .map(TreeCode)
            .map_err(|e| Error::Input(format!("bad tree code {s:?}: {e}")))
    }
}

impl fmt::Debug for TreeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TreeCode({})", String::from_utf8_lossy(&self.0))
    }
}

impl fmt::Display for TreeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// A tree with `2n` leaves labeled by `N` and no vertex of degree 2.
///
/// Leaves are normalized to vertex ids `0..2n` in slot order; internal
/// vertices follow.
#[derive(Clone, Debug)]
pub struct PhyloTree {
    n: usize,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl PhyloTree {
    /// Builds and validates a tree. `leaf_of[slot]` is the vertex carrying
    /// label `SignedLabel::from_slot(slot, n)`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)], leaf_of: &[usize]) -> Result<Self> {
        if leaf_of.len() != 2 * n {
            return Err(Error::Input(format!("expected {} leaf labels", 2 * n)));
        }
        let mut ids: BTreeSet<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        ids.extend(leaf_of.iter().copied());
        let mut relabel: HashMap<usize, usize> = HashMap::new();
        for (slot, &v) in leaf_of.iter().enumerate() {
            if relabel.insert(v, slot).is_some() {
                return Err(Error::Input(format!("vertex {v} carries two labels")));
            }
        }
        let mut next = 2 * n;
        for v in ids {
            relabel.entry(v).or_insert_with(|| {
                next += 1;
                next - 1
            });
        }
        let count = next;
        let mut adj = vec![Vec::new(); count];
        let mut normalized = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            let (a, b) = (relabel[&u], relabel[&v]);
            if a == b {
                return Err(Error::Input(format!("loop at vertex {u}")));
            }
            adj[a].push(b);
            adj[b].push(a);
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        if normalized.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Input("repeated edge".into()));
        }
        if normalized.len() + 1 != count {
            return Err(Error::Input("edge count does not match a tree".into()));
        }
        let tree = Self {
            n,
            adj,
            edges: normalized,
        };
        tree.validate()?;
        Ok(tree)
    }

    fn validate(&self) -> Result<()> {
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &u in &self.adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Input("tree is not connected".into()));
        }
        for (v, nb) in self.adj.iter().enumerate() {
            let leaf = v < 2 * self.n;
            if leaf && nb.len() != 1 {
                return Err(Error::Input(format!("labeled vertex {v} is not a leaf")));
            }
            if !leaf && nb.len() < 3 {
                return Err(Error::Input(format!(
                    "internal vertex {v} has degree {}",
                    nb.len()
                )));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn leaf_vertex(&self, a: SignedLabel) -> usize {
        a.slot(self.n)
    }

    pub fn internal_vertices(&self) -> std::ops::Range<usize> {
        2 * self.n..self.adj.len()
    }

    /// The star tree: one internal vertex joined to every leaf.
    pub fn star(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (0..2 * n).map(|s| (s, 2 * n)).collect();
        let leaf_of: Vec<usize> = (0..2 * n).collect();
        Self::from_edges(n, &edges, &leaf_of).expect("star tree is valid")
    }

    /// Leaf masks of the components of `T − v`, one per neighbor of `v`.
    fn branch_masks(&self, sub: &[LeafMask], parent: &[usize], v: usize) -> Vec<LeafMask> {
        let full = full_mask(self.n);
        self.adj[v]
            .iter()
            .map(|&u| {
                if parent[u] == v {
                    sub[u]
                } else {
                    full ^ sub[v]
                }
            })
            .collect()
    }

    /// Subtree leaf masks and parents when rooted at vertex 0.
    fn rooted_masks(&self) -> (Vec<LeafMask>, Vec<usize>) {
        let count = self.adj.len();
        let mut parent = vec![usize::MAX; count];
        let mut order = Vec::with_capacity(count);
        let mut stack = vec![0];
        parent[0] = 0;
        while let Some(v) = stack.pop() {
            order.push(v);
            for &u in &self.adj[v] {
                if parent[u] == usize::MAX {
                    parent[u] = v;
                    stack.push(u);
                }
            }
        }
        let mut sub = vec![0 as LeafMask; count];
        for &v in order.iter().rev() {
            if v < 2 * self.n {
                sub[v] |= 1 << v;
            }
            if v != 0 {
                let p = parent[v];
                sub[p] |= sub[v];
            }
        }
        (sub, parent)
    }

    /// For every edge (in `edges()` order) the leaves on the side of its
    /// endpoint away from leaf 0.
    pub fn edge_splits(&self) -> Vec<LeafMask> {
        let (sub, parent) = self.rooted_masks();
        self.edges
            .iter()
            .map(|&(u, v)| if parent[v] == u { sub[v] } else { sub[u] })
            .collect()
    }

    /// Normalized splits of the internal edges, sorted.
    pub fn internal_splits(&self) -> Vec<LeafMask> {
        let n = self.n;
        let mut out: Vec<LeafMask> = self
            .edges
            .iter()
            .zip(self.edge_splits())
            .filter(|((u, v), _)| *u >= 2 * n && *v >= 2 * n)
            .map(|(_, m)| normalize_split(m, n))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn canonical_code(&self) -> TreeCode {
        let count = self.adj.len();
        let mut size = vec![1usize; count];
        let (_, parent) = self.rooted_masks();
        let mut order: Vec<usize> = Vec::with_capacity(count);
        let mut stack = vec![0];
        let mut seen = vec![false; count];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            order.push(v);
            for &u in &self.adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        for &v in order.iter().rev() {
            if v != 0 {
                size[parent[v]] += size[v];
            }
        }
        let heaviest = |v: usize| {
            self.adj[v]
                .iter()
                .map(|&u| if parent[u] == v && u != 0 { size[u] } else { count - size[v] })
                .max()
                .unwrap_or(0)
        };
        let best = (0..count).map(heaviest).min().unwrap_or(0);
        let centroids: Vec<usize> = (0..count).filter(|&v| heaviest(v) == best).collect();
        let code = centroids
            .iter()
            .map(|&c| self.rooted_code(c, usize::MAX))
            .min()
            .unwrap_or_default();
        TreeCode(code)
    }

    fn rooted_code(&self, v: usize, from: usize) -> Vec<u8> {
        if v < 2 * self.n
            && from != usize::MAX {
                return vec![b'a' + v as u8];
            }
        let mut children: Vec<Vec<u8>> = self.adj[v]
            .iter()
            .filter(|&&u| u != from)
            .map(|&u| self.rooted_code(u, v))
            .collect();
        children.sort();
        let mut out = Vec::new();
        if v < 2 * self.n {
            out.push(b'a' + v as u8);
        }
        out.push(b'(');
        for c in children {
            out.extend(c);
        }
        out.push(b')');
        out
    }

    /// The involution exchanging the leaves `a` and `ā`, if the tree has one.
    pub fn find_symmetry(&self) -> Option<Symmetry> {
        let n = self.n;
        let (sub, parent) = self.rooted_masks();
        let key = |v: usize| {
            let mut b = self.branch_masks(&sub, &parent, v);
            b.sort_unstable();
            b
        };
        let keys: Vec<Vec<LeafMask>> = (0..self.adj.len()).map(key).collect();
        let lookup: HashMap<&Vec<LeafMask>, usize> =
            keys.iter().enumerate().map(|(v, k)| (k, v)).collect();
        let mut map = Vec::with_capacity(self.adj.len());
        for k in &keys {
            let mut image: Vec<LeafMask> = k.iter().map(|&m| bar_mask(m, n)).collect();
            image.sort_unstable();
            map.push(*lookup.get(&image)?);
        }
        let sym = Symmetry { map };
        sym.is_automorphism_of(self).then_some(sym)
    }

    pub fn orbits(&self, sigma: &Symmetry) -> OrbitDecomposition {
        let n = self.n;
        let edge_index: HashMap<(usize, usize), usize> =
            self.edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let image = |(u, v): (usize, usize)| {
            let (a, b) = (sigma.map[u], sigma.map[v]);
            edge_index[&(a.min(b), a.max(b))]
        };
        let splits: Vec<LeafMask> = self
            .edge_splits()
            .into_iter()
            .map(|m| normalize_split(m, n))
            .collect();
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            let a = self.edges.iter().position(|&(u, _)| u == i).expect("leaf edge");
            let b = self
                .edges
                .iter()
                .position(|&(u, _)| u == n + i)
                .expect("leaf edge");
            orbits.push(vec![a, b]);
        }
        let mut internal: Vec<Vec<usize>> = Vec::new();
        let mut done = vec![false; self.edges.len()];
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            if u < 2 * n || done[i] {
                continue;
            }
            let j = image((u, v));
            done[i] = true;
            done[j] = true;
            let mut orbit = vec![i, j];
            orbit.sort_by_key(|&e| splits[e]);
            orbit.dedup();
            internal.push(orbit);
        }
        internal.sort_by_key(|o| splits[o[0]]);
        orbits.extend(internal);
        let mut edge_orbit = vec![0; self.edges.len()];
        for (k, o) in orbits.iter().enumerate() {
            for &e in o {
                edge_orbit[e] = k;
            }
        }
        OrbitDecomposition {
            n,
            orbits,
            edge_orbit,
        }
    }

    /// Contracts a set of internal edges (given by index into `edges()`).
    pub fn contract_edges(&self, which: &[usize]) -> Result<PhyloTree> {
        let n = self.n;
        let mut rep: Vec<usize> = (0..self.adj.len()).collect();
        fn find(rep: &mut [usize], v: usize) -> usize {
            let mut r = v;
            while rep[r] != r {
                r = rep[r];
            }
            rep[v] = r;
            r
        }
        for &e in which {
            let (u, v) = self.edges[e];
            if u < 2 * n || v < 2 * n {
                return Err(Error::Contract(format!("edge {e} is a leaf edge")));
            }
            let (a, b) = (find(&mut rep, u), find(&mut rep, v));
            rep[a.max(b)] = a.min(b);
        }
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !which.contains(i))
            .map(|(_, &(u, v))| (find(&mut rep, u), find(&mut rep, v)))
            .collect();
        let leaf_of: Vec<usize> = (0..2 * n).collect();
        PhyloTree::from_edges(n, &edges, &leaf_of)
    }

    /// Applies a permutation of label slots to the leaves.
    pub fn relabel_leaves(&self, slot_map: &[usize]) -> PhyloTree {
        let n = self.n;
        let vmap = |v: usize| if v < 2 * n { slot_map[v] } else { v };
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|&(u, v)| (vmap(u), vmap(v))).collect();
        let leaf_of: Vec<usize> = (0..2 * n).collect();
        PhyloTree::from_edges(n, &edges, &leaf_of).expect("relabeling preserves validity")
    }

    /// Whether every split of the tree is a cyclic interval of `lambda`,
    /// i.e. the tree can be drawn in a disc with leaves in that cyclic order.
    pub fn is_compatible_with(&self, lambda: &DihedralOrdering) -> bool {
        self.edge_splits().into_iter().all(|m| lambda.is_interval(m))
    }

    pub fn to_json(&self) -> TreeJson {
        let leaves = SignedLabel::all(self.n)
            .map(|a| (a.to_string(), a.slot(self.n)))
            .collect();
        TreeJson {
            n: self.n,
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
            leaves,
        }
    }

    pub fn from_json(j: &TreeJson) -> Result<Self> {
        let mut leaf_of = vec![usize::MAX; 2 * j.n];
        for (name, &v) in &j.leaves {
            let a: SignedLabel = name.parse()?;
            if a.index() > j.n {
                return Err(Error::Input(format!("label {name} out of range")));
            }
            leaf_of[a.slot(j.n)] = v;
        }
        if leaf_of.contains(&usize::MAX) {
            return Err(Error::Input("missing leaf labels".into()));
        }
        let edges: Vec<(usize, usize)> = j.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::from_edges(j.n, &edges, &leaf_of)
    }
}

impl PartialEq for PhyloTree {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.canonical_code() == other.canonical_code()
    }
}

impl Eq for PhyloTree {}

/// Wire format `{"n":3,"edges":[[0,1],…],"leaves":{"1":5,"1~":6,…}}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TreeJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    pub leaves: BTreeMap<String, usize>,
}

/// An involutive automorphism of a tree, as a vertex map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symmetry {
    map: Vec<usize>,
}

impl Symmetry {
    pub fn new(map: Vec<usize>) -> Self {
        Self { map }
    }

    pub fn image(&self, v: usize) -> usize {
        self.map[v]
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.map
    }

    /// Involution, graph automorphism, and `v(a) ↦ v(ā)` on leaves.
    pub fn is_automorphism_of(&self, t: &PhyloTree) -> bool {
        let n = t.n;
        if self.map.len() != t.vertex_count() {
            return false;
        }
        let involutive = (0..self.map.len()).all(|v| self.map[self.map[v]] == v);
        let swaps_leaves = (0..n).all(|i| self.map[i] == n + i);
        let edges: BTreeSet<(usize, usize)> = t.edges.iter().copied().collect();
        let preserves = t.edges.iter().all(|&(u, v)| {
            let (a, b) = (self.map[u], self.map[v]);
            edges.contains(&(a.min(b), a.max(b)))
        });
        involutive && swaps_leaves && preserves
    }
}

/// Partition of the edge set into σ-orbits.
///
/// Orbits `0..n` are the leaf orbits (orbit `i-1` holds the pendant edges of
/// `i` and `ī`); the internal orbits follow, sorted by their smallest split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitDecomposition {
    n: usize,
    orbits: Vec<Vec<usize>>,
    edge_orbit: Vec<usize>,
}

impl OrbitDecomposition {
    /// Number of orbits, `k(T, v)`.
    pub fn count(&self) -> usize {
        self.orbits.len()
    }

    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    pub fn orbit(&self, id: usize) -> &[usize] {
        &self.orbits[id]
    }

    pub fn orbit_of_edge(&self, e: usize) -> usize {
        self.edge_orbit[e]
    }

    pub fn leaf_orbit_ids(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    pub fn internal_orbit_ids(&self) -> std::ops::Range<usize> {
        self.n..self.orbits.len()
    }

    pub fn is_internal(&self, id: usize) -> bool {
        id >= self.n && id < self.orbits.len()
    }
}

/// Dual tree of a subdivision under a labeling: cells become internal
/// vertices, shared diagonals become edges, and leaf `a` hangs off the cell
/// containing side `φ(a)`.
pub fn dual_tree(theta: &Subdivision, phi: &Labeling) -> Result<PhyloTree> {
    let n = phi.n();
    if theta.vertex_count() != 2 * n {
        return Err(Error::Input(format!(
            "subdivision of a {}-gon used with a labeling of the {}-gon",
            theta.vertex_count(),
            2 * n
        )));
    }
    let m = 2 * n;
    let cells = theta.cells();
    let cell_with = |a: usize, b: usize| {
        cells
            .iter()
            .enumerate()
            .filter(move |(_, c)| c.contains(&a) && c.contains(&b))
            .map(|(i, _)| 2 * n + i)
    };
    let mut edges = Vec::with_capacity(m + theta.len());
    for slot in 0..m {
        let s = phi.sides()[slot];
        let cell = cell_with(s, (s + 1) % m).next().expect("every side lies in a cell");
        edges.push((slot, cell));
    }
    for d in theta.diagonals() {
        let (a, b) = d.endpoints();
        let pair: Vec<usize> = cell_with(a, b).collect();
        debug_assert_eq!(pair.len(), 2);
        edges.push((pair[0], pair[1]));
    }
    let leaf_of: Vec<usize> = (0..m).collect();
    PhyloTree::from_edges(n, &edges, &leaf_of)
}

/// One ASPT with its symmetry, orbits and a realizing pair `(Θ, φ)`.
#[derive(Clone, Debug)]
pub struct AsptRecord {
    pub tree: PhyloTree,
    pub code: TreeCode,
    pub symmetry: Symmetry,
    pub orbits: OrbitDecomposition,
    pub witness: (Subdivision, Labeling),
}

impl AsptRecord {
    /// `k(T, v)`, the number of σ-orbits of edges.
    pub fn k(&self) -> usize {
        self.orbits.count()
    }
}

/// Every ASPT for a fixed `n`, sorted by canonical code.
#[derive(Clone, Debug)]
pub struct AsptCatalog {
    n: usize,
    records: Vec<AsptRecord>,
    index: HashMap<TreeCode, usize>,
}

fn check_aspt_n(n: usize) -> Result<()> {
    if !(3..=polygon::MAX_N).contains(&n) {
        return Err(Error::Capacity(format!(
            "ASPT enumeration supports 3 <= n <= {}, got {n}",
            polygon::MAX_N
        )));
    }
    Ok(())
}

/// Canonical codes of all trees `T_{Θ,φ}` over the given pairs, keeping the
/// smallest realizing pair for each code.
fn realize_all(
    subdivisions: &[Subdivision],
    labelings: &[Labeling],
) -> BTreeMap<TreeCode, (PhyloTree, Subdivision, Labeling)> {
    let found: Vec<(TreeCode, PhyloTree, Subdivision, Labeling)> = subdivisions
        .par_iter()
        .flat_map_iter(|theta| {
            labelings.iter().map(move |phi| {
                let t = dual_tree(theta, phi).expect("matching polygon sizes");
                (t.canonical_code(), t, theta.clone(), phi.clone())
            })
        })
        .collect();
    let mut out: BTreeMap<TreeCode, (PhyloTree, Subdivision, Labeling)> = BTreeMap::new();
    for (code, t, theta, phi) in found {
        match out.get(&code) {
            Some((_, s, p)) if (s, p) <= (&theta, &phi) => {}
            _ => {
                out.insert(code, (t, theta, phi));
            }
        }
    }
    out
}

pub fn enumerate_aspts(n: usize) -> Result<AsptCatalog> {
    check_aspt_n(n)?;
    let subs = enumerate_subdivisions(n, SymmetryClass::Axial)?;
    let labs = enumerate_labelings(n, SymmetryClass::Axial)?;
    let mut records = Vec::new();
    for (code, (tree, theta, phi)) in realize_all(&subs, &labs) {
        let symmetry = tree.find_symmetry().ok_or_else(|| {
            Error::Integrity(format!("ASPT {code:?} has no symmetry involution"))
        })?;
        let orbits = tree.orbits(&symmetry);
        records.push(AsptRecord {
            tree,
            code,
            symmetry,
            orbits,
            witness: (theta, phi),
        });
    }
    let index = records
        .iter()
        .enumerate()
        .map(|(i, r)| (r.code.clone(), i))
        .collect();
    Ok(AsptCatalog { n, records, index })
}

/// Canonical codes of all CSPTs (dual trees of centrally symmetric pairs).
pub fn enumerate_cspts(n: usize) -> Result<BTreeSet<TreeCode>> {
    check_aspt_n(n)?;
    let subs = enumerate_subdivisions(n, SymmetryClass::Central)?;
    let labs = enumerate_labelings(n, SymmetryClass::Central)?;
    Ok(realize_all(&subs, &labs).into_keys().collect())
}

/// Brute-force search for a centrally symmetric realization of `t`.
pub fn is_cspt(t: &PhyloTree) -> Result<bool> {
    Ok(enumerate_cspts(t.n())?.contains(&t.canonical_code()))
}

/// Contracts every edge of an internal σ-orbit.
pub fn contract_orbit(t: &PhyloTree, orbits: &OrbitDecomposition, orbit: usize) -> Result<PhyloTree> {
    if !orbits.is_internal(orbit) {
        return Err(Error::Contract(format!(
            "orbit {orbit} is not an internal orbit"
        )));
    }
    t.contract_edges(orbits.orbit(orbit))
}

/// All dihedral orderings (optionally restricted to one class) the tree is
/// compatible with. Unrestricted search is limited to `n <= 4`.
pub fn compatible_orderings(t: &PhyloTree, class: Option<OrderingClass>) -> Result<Vec<DihedralOrdering>> {
    let candidates = match class {
        None => enumerate_orderings(t.n(), OrderingClass::Generic)?,
        Some(c) => enumerate_orderings(t.n(), c)?,
    };
    Ok(candidates
        .into_iter()
        .filter(|l| t.is_compatible_with(l))
        .collect())
}

/// Relabelings of leaves by the hyperoctahedral group (permute indices, flip bars).
pub fn signed_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for perm in (0..n).permutations(n) {
        for flips in 0..(1u32 << n) {
            let mut map = vec![0; 2 * n];
            for i in 0..n {
                let j = perm[i];
                let flip = flips & (1 << i) != 0;
                let (to_plain, to_bar) = if flip { (n + j, j) } else { (j, n + j) };
                map[i] = to_plain;
                map[n + i] = to_bar;
            }
            out.push(map);
        }
    }
    out
}

/// Code of the tree up to signed relabeling: the "form" of an ASPT.
pub fn shape_code(t: &PhyloTree) -> TreeCode {
    signed_permutations(t.n())
        .iter()
        .map(|m| t.relabel_leaves(m).canonical_code())
        .min()
        .expect("group is nonempty")
}

impl AsptCatalog {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[AsptRecord] {
        &self.records
    }

    pub fn get(&self, i: usize) -> &AsptRecord {
        &self.records[i]
    }

    pub fn find(&self, code: &TreeCode) -> Option<usize> {
        self.index.get(code).copied()
    }

    pub fn position_of(&self, t: &PhyloTree) -> Option<usize> {
        self.find(&t.canonical_code())
    }

    /// Contracts an internal orbit of record `i` and locates the result,
    /// which must again be an ASPT with one orbit fewer.
    pub fn contract(&self, i: usize, orbit: usize) -> Result<usize> {
        let r = &self.records[i];
        let t = contract_orbit(&r.tree, &r.orbits, orbit)?;
        let j = self.position_of(&t).ok_or_else(|| {
            Error::Integrity(format!(
                "contracting orbit {orbit} of {:?} leaves the set of ASPTs",
                r.code
            ))
        })?;
        if self.records[j].k() + 1 != r.k() {
            return Err(Error::Integrity(format!(
                "contracting orbit {orbit} of {:?} did not drop k by one",
                r.code
            )));
        }
        Ok(j)
    }

    /// Distinct forms of ASPTs up to signed relabeling.
    pub fn shape_classes(&self) -> BTreeMap<TreeCode, Vec<usize>> {
        let mut out: BTreeMap<TreeCode, Vec<usize>> = BTreeMap::new();
        for (i, r) in self.records.iter().enumerate() {
            out.entry(shape_code(&r.tree)).or_default().push(i);
        }
        out
    }
}
