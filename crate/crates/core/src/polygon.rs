//! Combinatorics of the regular 2n-gon.
//!
//! Vertices are numbered `0..2n` counterclockwise and side `s` joins vertices
//! `s` and `s + 1 (mod 2n)`. The symmetry axis is the long diagonal `{0, n}`:
//! the mirror sends vertex `v` to `-v` and side `s` to `2n - 1 - s`, the
//! central symmetry sends `v` to `v + n`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest `n` the exhaustive enumerations accept.
pub const MAX_N: usize = 5;

/// Element of `N = {1, …, n, 1̄, …, n̄}`.
///
/// The derived order is `1 < 1̄ < 2 < 2̄ < …`, which is the letter order used
/// for canonical dihedral words.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedLabel {
    index: usize,
    barred: bool,
}

impl SignedLabel {
    pub fn new(index: usize, barred: bool) -> Self {
        assert!(index >= 1, "labels are 1-based");
        Self { index, barred }
    }

    pub fn plain(index: usize) -> Self {
        Self::new(index, false)
    }

    pub fn bar_of(index: usize) -> Self {
        Self::new(index, true)
    }

    pub fn index(self) -> usize {
        self.index
    }

    pub fn is_barred(self) -> bool {
        self.barred
    }

    pub fn bar(self) -> Self {
        Self {
            index: self.index,
            barred: !self.barred,
        }
    }

    /// Position in the fixed listing `1, …, n, 1̄, …, n̄`.
    pub fn slot(self, n: usize) -> usize {
        if self.barred {
            n + self.index - 1
        } else {
            self.index - 1
        }
    }

    pub fn from_slot(slot: usize, n: usize) -> Self {
        if slot < n {
            Self::plain(slot + 1)
        } else {
            Self::bar_of(slot - n + 1)
        }
    }

    /// All of `N` in slot order.
    pub fn all(n: usize) -> impl Iterator<Item = SignedLabel> {
        (0..2 * n).map(move |s| Self::from_slot(s, n))
    }
}

impl fmt::Display for SignedLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.barred {
            write!(f, "{}~", self.index)
        } else {
            write!(f, "{}", self.index)
        }
    }
}

impl FromStr for SignedLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (digits, barred) = match s.strip_suffix('~') {
            Some(d) => (d, true),
            None => (s, false),
        };
        match digits.parse::<usize>() {
            Ok(i) if i >= 1 => Ok(Self::new(i, barred)),
            _ => Err(Error::Input(format!("bad label {s:?}"))),
        }
    }
}

impl Serialize for SignedLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SignedLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A diagonal `{a, b}` with `a < b`, stored without its polygon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "[usize; 2]", try_from = "[usize; 2]")]
pub struct Diagonal {
    a: usize,
    b: usize,
}

impl From<Diagonal> for [usize; 2] {
    fn from(d: Diagonal) -> Self {
        [d.a, d.b]
    }
}

impl TryFrom<[usize; 2]> for Diagonal {
    type Error = Error;

    fn try_from(v: [usize; 2]) -> Result<Self> {
        if v[0] == v[1] {
            return Err(Error::Input(format!("degenerate diagonal {v:?}")));
        }
        Ok(Self {
            a: v[0].min(v[1]),
            b: v[0].max(v[1]),
        })
    }
}

impl Diagonal {
    /// Validates the endpoints against an `m`-gon.
    pub fn in_polygon(v1: usize, v2: usize, m: usize) -> Result<Self> {
        let d = Self {
            a: v1.min(v2),
            b: v1.max(v2),
        };
        d.check(m)?;
        Ok(d)
    }

    pub fn endpoints(self) -> (usize, usize) {
        (self.a, self.b)
    }

    fn check(self, m: usize) -> Result<()> {
        if self.b >= m {
            return Err(Error::Input(format!(
                "vertex {} out of range for a {m}-gon",
                self.b
            )));
        }
        if self.b - self.a < 2 || (self.a == 0 && self.b == m - 1) {
            return Err(Error::Input(format!(
                "{{{}, {}}} is a side of the {m}-gon, not a diagonal",
                self.a, self.b
            )));
        }
        Ok(())
    }

    /// Strict interleaving of endpoints; a shared endpoint is not a crossing.
    pub fn crosses(self, other: Diagonal) -> bool {
        let inside = |v: usize| self.a < v && v < self.b;
        if [other.a, other.b].iter().any(|v| *v == self.a || *v == self.b) {
            return false;
        }
        inside(other.a) != inside(other.b)
    }

    /// Whether the side `s` (joining `s` and `s+1`) lies on the arc `a..b`.
    pub fn arc_contains_side(self, s: usize) -> bool {
        self.a <= s && s < self.b
    }

    fn map(self, m: usize, f: impl Fn(usize) -> usize) -> Self {
        let (x, y) = (f(self.a) % m, f(self.b) % m);
        Self {
            a: x.min(y),
            b: x.max(y),
        }
    }
}

/// Which subdivisions or labelings an enumeration should produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryClass {
    All,
    Axial,
    Central,
}

/// A set of pairwise noncrossing diagonals of a convex `m`-gon.
///
/// For the 2n-gon `m = 2n`; the contraction map also produces subdivisions
/// of the (n+2)-gon, which share this type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subdivision {
    vertices: usize,
    diagonals: Vec<Diagonal>,
}

impl Subdivision {
    pub fn empty(vertices: usize) -> Self {
        Self {
            vertices,
            diagonals: Vec::new(),
        }
    }

    pub fn new(vertices: usize, diagonals: impl IntoIterator<Item = Diagonal>) -> Result<Self> {
        let diagonals: Vec<Diagonal> = diagonals
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        for d in &diagonals {
            d.check(vertices)?;
        }
        if let Some((x, y)) = diagonals
            .iter()
            .tuple_combinations()
            .find(|(x, y)| x.crosses(**y))
        {
            return Err(Error::Input(format!("diagonals {x:?} and {y:?} cross")));
        }
        Ok(Self {
            vertices,
            diagonals,
        })
    }

    pub fn from_pairs(vertices: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let ds = pairs
            .iter()
            .map(|&(a, b)| Diagonal::in_polygon(a, b, vertices))
            .collect::<Result<Vec<_>>>()?;
        Self::new(vertices, ds)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn diagonals(&self) -> &[Diagonal] {
        &self.diagonals
    }

    pub fn len(&self) -> usize {
        self.diagonals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonals.is_empty()
    }

    pub fn contains(&self, d: Diagonal) -> bool {
        self.diagonals.binary_search(&d).is_ok()
    }

    pub fn is_subset(&self, other: &Subdivision) -> bool {
        self.diagonals.iter().all(|d| other.contains(*d))
    }

    fn closed_under(&self, f: impl Fn(Diagonal) -> Diagonal) -> bool {
        self.vertices.is_multiple_of(2) && self.diagonals.iter().all(|d| self.contains(f(*d)))
    }

    pub fn is_axially_symmetric(&self) -> bool {
        let m = self.vertices;
        self.closed_under(|d| mirror(d, m))
    }

    pub fn is_centrally_symmetric(&self) -> bool {
        let m = self.vertices;
        self.closed_under(|d| central(d, m))
    }

    /// Polygonal cells, each as its vertex cycle in increasing order.
    pub fn cells(&self) -> Vec<Vec<usize>> {
        let mut cells = vec![(0..self.vertices).collect::<Vec<_>>()];
        for d in &self.diagonals {
            let (a, b) = d.endpoints();
            let i = cells
                .iter()
                .position(|c| c.contains(&a) && c.contains(&b))
                .expect("noncrossing diagonals always lie in one cell");
            let cell = cells.swap_remove(i);
            let (inner, outer): (Vec<usize>, Vec<usize>) =
                cell.iter().partition(|&&v| a <= v && v <= b);
            let mut outer = outer;
            outer.extend([a, b]);
            outer.sort_unstable();
            cells.push(inner);
            cells.push(outer);
        }
        cells.sort();
        cells
    }
}

impl Serialize for Subdivision {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.diagonals.serialize(s)
    }
}

/// Checks both diagonals against the 2n-gon before testing for a crossing.
pub fn crosses(d1: Diagonal, d2: Diagonal, n: usize) -> Result<bool> {
    d1.check(2 * n)?;
    d2.check(2 * n)?;
    Ok(d1.crosses(d2))
}

pub fn mirror_vertex(v: usize, m: usize) -> usize {
    (m - v % m) % m
}

pub fn mirror(d: Diagonal, m: usize) -> Diagonal {
    d.map(m, |v| m - v)
}

pub fn central(d: Diagonal, m: usize) -> Diagonal {
    d.map(m, |v| v + m / 2)
}

/// A bijection from `N` to the sides of the 2n-gon, stored in slot order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Labeling {
    sides: Vec<usize>,
}

impl Labeling {
    pub fn new(sides: Vec<usize>) -> Result<Self> {
        let m = sides.len();
        if m < 6 || !m.is_multiple_of(2) {
            return Err(Error::Input(format!("labeling needs 2n >= 6 sides, got {m}")));
        }
        let distinct: BTreeSet<usize> = sides.iter().copied().collect();
        if distinct.len() != m || sides.iter().any(|&s| s >= m) {
            return Err(Error::Input(format!("{sides:?} is not a bijection onto the sides")));
        }
        Ok(Self { sides })
    }

    pub fn n(&self) -> usize {
        self.sides.len() / 2
    }

    pub fn side_of(&self, a: SignedLabel) -> usize {
        self.sides[a.slot(self.n())]
    }

    pub fn sides(&self) -> &[usize] {
        &self.sides
    }

    /// `label_at[s]` is the label written on side `s`.
    pub fn label_at(&self) -> Vec<SignedLabel> {
        let n = self.n();
        let mut out = vec![SignedLabel::plain(1); 2 * n];
        for (slot, &s) in self.sides.iter().enumerate() {
            out[s] = SignedLabel::from_slot(slot, n);
        }
        out
    }

    pub fn is_axially_symmetric(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| self.sides[n + i] == mirror_side(self.sides[i], n))
    }

    pub fn is_centrally_symmetric(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| self.sides[n + i] == (self.sides[i] + n) % (2 * n))
    }

    /// The labeling `i ↦ side i−1`, `ī ↦ side 2n−i`; axially symmetric for every n.
    pub fn standard_axial(n: usize) -> Self {
        let mut sides: Vec<usize> = (0..n).collect();
        sides.extend((1..=n).map(|i| 2 * n - i));
        Self { sides }
    }
}

pub fn mirror_side(s: usize, n: usize) -> usize {
    2 * n - 1 - s
}

fn check_n(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::Input(format!("n must be at least 3, got {n}")));
    }
    if n > MAX_N {
        return Err(Error::Capacity(format!(
            "n = {n} exceeds the configured limit of {MAX_N}"
        )));
    }
    Ok(())
}

/// All subdivisions (including the empty one) of a convex `m`-gon, sorted.
pub fn dissections(m: usize) -> Vec<Subdivision> {
    let diags: Vec<Diagonal> = (0..m)
        .flat_map(|a| (a + 2..m).map(move |b| (a, b)))
        .filter(|&(a, b)| !(a == 0 && b == m - 1))
        .map(|(a, b)| Diagonal { a, b })
        .collect();
    let mut out = Vec::new();
    let mut current = Vec::new();
    extend_dissections(&diags, 0, &mut current, &mut out, m);
    out.sort();
    out
}

fn extend_dissections(
    diags: &[Diagonal],
    from: usize,
    current: &mut Vec<Diagonal>,
    out: &mut Vec<Subdivision>,
    m: usize,
) {
    out.push(Subdivision {
        vertices: m,
        diagonals: current.clone(),
    });
    for i in from..diags.len() {
        let d = diags[i];
        if current.iter().all(|c| !c.crosses(d)) {
            current.push(d);
            extend_dissections(diags, i + 1, current, out, m);
            current.pop();
        }
    }
}

/// Subdivisions of the 2n-gon satisfying `mode`, sorted by diagonal list.
pub fn enumerate_subdivisions(n: usize, mode: SymmetryClass) -> Result<Vec<Subdivision>> {
    check_n(n)?;
    let all = dissections(2 * n);
    Ok(match mode {
        SymmetryClass::All => all,
        SymmetryClass::Axial => all.into_iter().filter(|s| s.is_axially_symmetric()).collect(),
        SymmetryClass::Central => all.into_iter().filter(|s| s.is_centrally_symmetric()).collect(),
    })
}

/// Symmetric labelings: pick the sides of `1..n`, the barred sides follow.
pub fn enumerate_labelings(n: usize, mode: SymmetryClass) -> Result<Vec<Labeling>> {
    check_n(n)?;
    let partner = |s: usize| match mode {
        SymmetryClass::Axial => mirror_side(s, n),
        SymmetryClass::Central => (s + n) % (2 * n),
        SymmetryClass::All => unreachable!(),
    };
    let mut out = Vec::new();
    match mode {
        SymmetryClass::All => {
            for p in (0..2 * n).permutations(2 * n) {
                out.push(Labeling { sides: p });
            }
        }
        _ => {
            for p in (0..2 * n).permutations(n) {
                let mut sides = p.clone();
                sides.extend(p.iter().map(|&s| partner(s)));
                let used: BTreeSet<usize> = sides.iter().copied().collect();
                if used.len() == 2 * n {
                    out.push(Labeling { sides });
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// A cyclic arrangement of `N` up to rotation and reversal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DihedralOrdering {
    word: Vec<SignedLabel>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum OrderingClass {
    #[serde(rename = "ASDO")]
    Asdo,
    #[serde(rename = "CSDO")]
    Csdo,
    #[serde(rename = "generic")]
    Generic,
}

impl DihedralOrdering {
    /// Canonicalizes `word`, which must list every element of `N` once.
    pub fn from_word(word: Vec<SignedLabel>) -> Result<Self> {
        let m = word.len();
        if m < 6 || !m.is_multiple_of(2) {
            return Err(Error::Input(format!("ordering of length {m} is not 2n >= 6")));
        }
        let n = m / 2;
        let seen: BTreeSet<SignedLabel> = word.iter().copied().collect();
        if seen.len() != m || word.iter().any(|l| l.index() > n) {
            return Err(Error::Input(format!(
                "ordering must contain each of 1..{n} and its bar exactly once"
            )));
        }
        Ok(Self {
            word: canonical_word(&word),
        })
    }

    pub fn word(&self) -> &[SignedLabel] {
        &self.word
    }

    pub fn n(&self) -> usize {
        self.word.len() / 2
    }

    /// Cyclic position of every label, indexed by slot.
    pub fn positions(&self) -> Vec<usize> {
        let n = self.n();
        let mut pos = vec![0; 2 * n];
        for (p, l) in self.word.iter().enumerate() {
            pos[l.slot(n)] = p;
        }
        pos
    }

    /// Decides the class by trying all 4n placements of the word on the sides.
    pub fn classify(&self) -> OrderingClass {
        let m = self.word.len();
        let n = m / 2;
        let placements = (0..m).flat_map(|r| {
            [true, false].into_iter().map(move |fwd| {
                move |k: usize| if fwd { (r + k) % m } else { (r + m - k) % m }
            })
        });
        let mut axial = false;
        let mut central = false;
        for place in placements {
            let mut sides = vec![0; m];
            for (k, l) in self.word.iter().enumerate() {
                sides[l.slot(n)] = place(k);
            }
            let phi = Labeling { sides };
            axial |= phi.is_axially_symmetric();
            central |= phi.is_centrally_symmetric();
        }
        match (axial, central) {
            (true, _) => OrderingClass::Asdo,
            (false, true) => OrderingClass::Csdo,
            _ => OrderingClass::Generic,
        }
    }

    /// Whether the leaves in `mask` (a bitset over slots) occupy a cyclic interval.
    pub fn is_interval(&self, mask: u32) -> bool {
        let n = self.n();
        let m = self.word.len();
        let inside: Vec<bool> = self
            .word
            .iter()
            .map(|l| mask & (1 << l.slot(n)) != 0)
            .collect();
        let changes = (0..m).filter(|&i| inside[i] != inside[(i + 1) % m]).count();
        changes <= 2
    }
}

fn canonical_word(word: &[SignedLabel]) -> Vec<SignedLabel> {
    let m = word.len();
    let mut best: Option<Vec<SignedLabel>> = None;
    for r in 0..m {
        let fwd: Vec<SignedLabel> = (0..m).map(|k| word[(r + k) % m]).collect();
        let bwd: Vec<SignedLabel> = (0..m).map(|k| word[(r + m - k) % m]).collect();
        for cand in [fwd, bwd] {
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    best.unwrap_or_default()
}

impl fmt::Display for DihedralOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.word.iter().join(","))
    }
}

impl FromStr for DihedralOrdering {
    type Err = Error;

    /// Parses comma-separated labels such as `1,2,3,1~,2~,3~`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let word = s
            .split(',')
            .map(str::parse)
            .collect::<Result<Vec<SignedLabel>>>()?;
        Self::from_word(word)
    }
}

impl Serialize for DihedralOrdering {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.word.serialize(s)
    }
}

/// The ordering read off a labeling, counterclockwise from side 0.
pub fn ordering_of(phi: &Labeling) -> DihedralOrdering {
    DihedralOrdering {
        word: canonical_word(&phi.label_at()),
    }
}

/// Orderings of the requested class, each once, in canonical-word order.
///
/// `class = Generic` means "all orderings" and is limited to `n <= 4`.
pub fn enumerate_orderings(n: usize, class: OrderingClass) -> Result<Vec<DihedralOrdering>> {
    check_n(n)?;
    let set: BTreeSet<DihedralOrdering> = match class {
        OrderingClass::Asdo => enumerate_labelings(n, SymmetryClass::Axial)?
            .iter()
            .map(ordering_of)
            .collect(),
        OrderingClass::Csdo => enumerate_labelings(n, SymmetryClass::Central)?
            .iter()
            .map(ordering_of)
            .collect(),
        OrderingClass::Generic => {
            if n > 4 {
                return Err(Error::Capacity(format!(
                    "enumerating all dihedral orderings is limited to n <= 4, got {n}"
                )));
            }
            let first = SignedLabel::plain(1);
            let rest: Vec<SignedLabel> = SignedLabel::all(n).skip(1).collect();
            rest.iter()
                .copied()
                .permutations(rest.len())
                .map(|p| {
                    let mut w = vec![first];
                    w.extend(p);
                    DihedralOrdering {
                        word: canonical_word(&w),
                    }
                })
                .collect()
        }
    };
    Ok(set.into_iter().collect())
}

/// Maps an axially symmetric subdivision of the 2n-gon to a subdivision of
/// the (n+2)-gon by collapsing the vertices `1..n-1` into one vertex.
///
/// Vertices `n, …, 2n-1, 0` become `0, …, n` and the collapsed vertex is `n+1`.
/// Diagonals on the collapsed side are dropped (their mirrors carry the same
/// information) and a diagonal perpendicular to the axis becomes a diagonal
/// from its surviving endpoint to the new vertex.
pub fn contract_to_small_polygon(theta: &Subdivision) -> Result<Subdivision> {
    let m = theta.vertex_count();
    if !m.is_multiple_of(2) || !theta.is_axially_symmetric() {
        return Err(Error::Contract(
            "only axially symmetric subdivisions of the 2n-gon can be contracted".into(),
        ));
    }
    let n = m / 2;
    let upper = |v: usize| v <= n;
    let lower = |v: usize| v == 0 || v >= n;
    let relabel = |v: usize| if v == 0 { n } else { v - n };
    let collapsed = n + 1;
    let mut out = Vec::new();
    for d in theta.diagonals() {
        let (a, b) = d.endpoints();
        if lower(a) && lower(b) {
            out.push(Diagonal::in_polygon(relabel(a), relabel(b), n + 2)?);
        } else if !(upper(a) && upper(b)) {
            // Perpendicular to the axis: keep its lower endpoint.
            out.push(Diagonal::in_polygon(relabel(b), collapsed, n + 2)?);
        }
    }
    Subdivision::new(n + 2, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(a: usize, b: usize) -> Diagonal {
        Diagonal::in_polygon(a, b, 8).unwrap()
    }

    #[test]
    fn crossing_examples() {
        assert!(d(1, 5).crosses(d(2, 6)));
        assert!(!d(1, 3).crosses(d(5, 7)));
        assert!(!d(1, 3).crosses(d(3, 5)));
    }

    #[test]
    fn invalid_diagonals_are_rejected() {
        assert!(matches!(Diagonal::in_polygon(1, 2, 8), Err(Error::Input(_))));
        assert!(matches!(Diagonal::in_polygon(0, 7, 8), Err(Error::Input(_))));
        assert!(matches!(Diagonal::in_polygon(1, 9, 8), Err(Error::Input(_))));
        assert!(Subdivision::from_pairs(8, &[(1, 5), (2, 6)]).is_err());
    }

    #[test]
    fn symmetry_images() {
        assert_eq!(mirror(d(1, 3), 8), d(5, 7));
        assert_eq!(mirror(d(2, 6), 8), d(2, 6));
        assert_eq!(central(d(1, 3), 8), d(5, 7));
        assert_eq!(central(d(0, 2), 8), d(4, 6));
    }

    #[test]
    fn crossing_is_symmetric_and_images_are_involutions() {
        for m in [6, 8] {
            let all = dissections(m);
            let diags: Vec<Diagonal> = all.iter().filter(|s| s.len() == 1).map(|s| s.diagonals()[0]).collect();
            for &x in &diags {
                assert_eq!(mirror(mirror(x, m), m), x);
                assert_eq!(central(central(x, m), m), x);
                for &y in &diags {
                    assert_eq!(x.crosses(y), y.crosses(x));
                }
            }
        }
    }

    #[test]
    fn triangulation_counts_hexagon() {
        let tri = |mode| {
            enumerate_subdivisions(3, mode)
                .unwrap()
                .into_iter()
                .filter(|s| s.len() == 3)
                .count()
        };
        assert_eq!(tri(SymmetryClass::All), 14);
        assert_eq!(tri(SymmetryClass::Central), 6);
        assert_eq!(tri(SymmetryClass::Axial), 4);
        assert_eq!(maximal_axial(3).len(), 5);
        assert_eq!(enumerate_subdivisions(3, SymmetryClass::Axial).unwrap().len(), 11);
        assert_eq!(enumerate_subdivisions(3, SymmetryClass::Central).unwrap().len(), 13);
    }

    fn maximal_axial(n: usize) -> Vec<Subdivision> {
        let all = enumerate_subdivisions(n, SymmetryClass::Axial).unwrap();
        all.iter()
            .filter(|s| !all.iter().any(|t| t.len() > s.len() && s.is_subset(t)))
            .cloned()
            .collect()
    }

    #[test]
    fn axial_subdivisions_avoid_crossing_the_axis() {
        for n in [3, 4] {
            let axis = Diagonal::in_polygon(0, n, 2 * n).unwrap();
            for s in enumerate_subdivisions(n, SymmetryClass::Axial).unwrap() {
                for &x in s.diagonals() {
                    let perpendicular = mirror(x, 2 * n) == x && x != axis;
                    assert!(!x.crosses(axis) || perpendicular, "{x:?} in {s:?}");
                }
            }
        }
    }

    #[test]
    fn labeling_counts() {
        assert_eq!(enumerate_labelings(3, SymmetryClass::Axial).unwrap().len(), 48);
        assert_eq!(enumerate_labelings(3, SymmetryClass::Central).unwrap().len(), 48);
        for n in 3..=5 {
            assert!(Labeling::standard_axial(n).is_axially_symmetric());
        }
    }

    #[test]
    fn labeling_validation() {
        assert!(Labeling::new(vec![0, 1, 2, 3, 4, 4]).is_err());
        assert!(Labeling::new(vec![0, 1, 2, 3]).is_err());
    }

    #[test]
    fn ordering_classification_examples() {
        let asdo: DihedralOrdering = "1,2,3,3~,2~,1~".parse().unwrap();
        let csdo: DihedralOrdering = "1,2,3,1~,2~,3~".parse().unwrap();
        let generic: DihedralOrdering = "1,1~,2,3,2~,3~".parse().unwrap();
        assert_eq!(asdo.classify(), OrderingClass::Asdo);
        assert_eq!(csdo.classify(), OrderingClass::Csdo);
        assert_eq!(generic.classify(), OrderingClass::Generic);
        assert_eq!(enumerate_orderings(3, OrderingClass::Generic).unwrap().len(), 60);
    }

    #[test]
    fn ordering_counts() {
        let count = |n, c| enumerate_orderings(n, c).unwrap().len();
        assert_eq!(count(3, OrderingClass::Asdo), 12);
        assert_eq!(count(3, OrderingClass::Csdo), 4);
        assert_eq!(count(4, OrderingClass::Asdo), 96);
        assert_eq!(count(4, OrderingClass::Csdo), 24);
        assert!(matches!(
            enumerate_orderings(5, OrderingClass::Generic),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn canonical_word_is_dihedral_invariant() {
        let a: DihedralOrdering = "2,3,1~,2~,3~,1".parse().unwrap();
        let b: DihedralOrdering = "3~,2~,1~,3,2,1".parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "(1,2,3,1~,2~,3~)");
    }

    #[test]
    fn bad_orderings() {
        assert!("1,2,3,1~,2~".parse::<DihedralOrdering>().is_err());
        assert!("1,2,3,1~,2~,2~".parse::<DihedralOrdering>().is_err());
        assert!("1,2,x,1~,2~,3~".parse::<DihedralOrdering>().is_err());
    }

    #[test]
    fn contraction_of_octagon_example() {
        // The octagon picture drawn with its axis through vertices 1 and 5,
        // rotated by one step so that the axis is {0, 4}.
        let theta = Subdivision::from_pairs(8, &[(3, 5), (0, 5), (0, 3), (1, 3), (5, 7)]).unwrap();
        assert!(theta.is_axially_symmetric());
        let small = contract_to_small_polygon(&theta).unwrap();
        let expected = Subdivision::from_pairs(6, &[(1, 3), (1, 4), (1, 5)]).unwrap();
        assert_eq!(small, expected);
    }

    #[test]
    fn contraction_of_empty_and_bad_inputs() {
        for n in 3..=5 {
            let out = contract_to_small_polygon(&Subdivision::empty(2 * n)).unwrap();
            assert_eq!(out, Subdivision::empty(n + 2));
        }
        let lopsided = Subdivision::from_pairs(8, &[(1, 3)]).unwrap();
        assert!(matches!(contract_to_small_polygon(&lopsided), Err(Error::Contract(_))));
    }

    #[test]
    fn contraction_hits_each_pentagon_triangulation_once() {
        let images: Vec<Subdivision> = maximal_axial(3)
            .iter()
            .map(|s| contract_to_small_polygon(s).unwrap())
            .collect();
        let unique: BTreeSet<_> = images.iter().cloned().collect();
        assert_eq!(images.len(), 5);
        assert_eq!(unique.len(), 5);
        let pentagon_tri: BTreeSet<_> = dissections(5).into_iter().filter(|s| s.len() == 2).collect();
        assert_eq!(unique, pentagon_tri);
    }

    #[test]
    fn cells_of_a_fan_triangulation() {
        let s = Subdivision::from_pairs(8, &[(0, 2), (0, 4), (0, 6)]).unwrap();
        assert_eq!(
            s.cells(),
            vec![vec![0, 1, 2], vec![0, 2, 3, 4], vec![0, 4, 5, 6], vec![0, 6, 7]]
        );
    }

    #[test]
    fn json_encodings() {
        let s = Subdivision::from_pairs(6, &[(3, 1), (0, 3)]).unwrap();
        assert_eq!(serde_json::to_string(&s).unwrap(), "[[0,3],[1,3]]");
        let o: DihedralOrdering = "3~,2~,1~,3,2,1".parse().unwrap();
        assert_eq!(
            serde_json::to_string(&o).unwrap(),
            r#"["1","2","3","1~","2~","3~"]"#
        );
        let phi = Labeling::standard_axial(3);
        assert_eq!(serde_json::to_string(&phi).unwrap(), "[0,1,2,5,4,3]");
    }
}
