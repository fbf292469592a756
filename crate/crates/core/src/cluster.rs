//! The type C cluster variety `X ⊂ C^D` through its explicit parametrization
//! by `2 × n` matrices: quadratic relations, initial forms, tropical
//! certificates and sign patterns.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num::{BigInt, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fan::{Fan, IndexSetD};
use crate::linalg::{self, format_q, parse_q, q, Q};
use crate::polygon::SignedLabel;

const ENTRY_BOUND: i64 = 10_000;

/// A point `z ∈ Q^{2×n}` of the ambient space of the parametrization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmbientPoint {
    rows: [Vec<Q>; 2],
}

impl AmbientPoint {
    pub fn new(row1: Vec<Q>, row2: Vec<Q>) -> Result<Self> {
        if row1.len() != row2.len() {
            return Err(Error::Input("rows of different lengths".into()));
        }
        Ok(Self { rows: [row1, row2] })
    }

    /// Entries with numerators in `[-10^4, 10^4]` and denominators in `[1, 10^4]`.
    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        let mut entry = || {
            Q::new(
                BigInt::from(rng.random_range(-ENTRY_BOUND..=ENTRY_BOUND)),
                BigInt::from(rng.random_range(1..=ENTRY_BOUND)),
            )
        };
        let row1 = (0..n).map(|_| entry()).collect();
        let row2 = (0..n).map(|_| entry()).collect();
        Self { rows: [row1, row2] }
    }

    pub fn n(&self) -> usize {
        self.rows[0].len()
    }

    /// `z_{t,i}` with `t ∈ {1, 2}` and `i ∈ [1, n]`.
    pub fn entry(&self, t: usize, i: usize) -> &Q {
        &self.rows[t - 1][i - 1]
    }

    pub fn rows(&self) -> &[Vec<Q>; 2] {
        &self.rows
    }

    /// Negates column `i` (1-based).
    pub fn negate_column(&self, i: usize) -> Self {
        let mut out = self.clone();
        for r in &mut out.rows {
            r[i - 1] = -r[i - 1].clone();
        }
        out
    }
}

/// `ι(Δ)`: `Δ_{i,j} = z_{1i} z_{2j} − z_{1j} z_{2i}` and
/// `Δ_{i,j̄} = z_{1i} z_{1j} + z_{2i} z_{2j}`, in `D` order.
pub fn delta_eval(z: &AmbientPoint) -> Vec<Q> {
    let d = IndexSetD::new(z.n());
    d.pairs()
        .iter()
        .map(|(a, b)| {
            let (i, j) = (a.index(), b.index());
            if b.is_barred() {
                z.entry(1, i) * z.entry(1, j) + z.entry(2, i) * z.entry(2, j)
            } else {
                z.entry(1, i) * z.entry(2, j) - z.entry(1, j) * z.entry(2, i)
            }
        })
        .collect()
}

/// Polynomial in `z_{1,1..n}, z_{2,1..n}` (variable `t·n + i − 1`), stored as
/// exponent vector ↦ coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly(BTreeMap<Vec<u8>, Q>);

impl Poly {
    pub fn one(vars: usize) -> Self {
        Self(BTreeMap::from([(vec![0; vars], Q::one())]))
    }

    fn add_term(&mut self, exp: Vec<u8>, c: Q) {
        let slot = self.0.entry(exp.clone()).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.0.remove(&exp);
        }
    }

    pub fn add(&mut self, other: &Poly, scale: &Q) {
        for (e, c) in &other.0 {
            self.add_term(e.clone(), c * scale);
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (e1, c1) in &self.0 {
            for (e2, c2) in &other.0 {
                let e: Vec<u8> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.0.len()
    }
}

/// `ι(Δ_d)` for every `d ∈ D` as polynomials in the `2n` entries of `z`.
pub fn delta_polys(n: usize) -> Vec<Poly> {
    let var = |t: usize, i: usize| (t - 1) * n + i - 1;
    let monomial = |x: usize, y: usize, c: i64| {
        let mut e = vec![0u8; 2 * n];
        e[x] += 1;
        e[y] += 1;
        (e, q(c))
    };
    IndexSetD::new(n)
        .pairs()
        .iter()
        .map(|(a, b)| {
            let (i, j) = (a.index(), b.index());
            let terms = if b.is_barred() {
                [monomial(var(1, i), var(1, j), 1), monomial(var(2, i), var(2, j), 1)]
            } else {
                [monomial(var(1, i), var(2, j), 1), monomial(var(1, j), var(2, i), -1)]
            };
            let mut p = Poly::default();
            for (e, c) in terms {
                p.add_term(e, c);
            }
            p
        })
        .collect()
}

/// One term `c · Π x_d` of a relation; `mono` holds at most two indices into
/// `D`, sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Term {
    pub c: Q,
    pub mono: Vec<usize>,
}

/// A polynomial of degree at most 2 in the coordinates `x_d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticRelation {
    n: usize,
    terms: Vec<Term>,
}

impl QuadraticRelation {
    /// Merges repeated monomials and drops zero coefficients.
    pub fn new(n: usize, terms: Vec<Term>) -> Result<Self> {
        let mut merged: BTreeMap<Vec<usize>, Q> = BTreeMap::new();
        for Term { c, mut mono } in terms {
            if mono.len() > 2 || mono.iter().any(|&d| d >= n * n) {
                return Err(Error::Input(format!("bad monomial {mono:?}")));
            }
            mono.sort_unstable();
            *merged.entry(mono).or_insert_with(Q::zero) += c;
        }
        Ok(Self {
            n,
            terms: merged
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(mono, c)| Term { c, mono })
                .collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate(&self, x: &[Q]) -> Q {
        self.terms
            .iter()
            .map(|t| t.mono.iter().fold(t.c.clone(), |acc, &d| acc * &x[d]))
            .sum()
    }

    /// Coefficient vector over a fixed monomial list.
    fn coefficients(&self, monomials: &[Vec<usize>]) -> Vec<Q> {
        monomials
            .iter()
            .map(|m| {
                self.terms
                    .iter()
                    .find(|t| &t.mono == m)
                    .map_or_else(Q::zero, |t| t.c.clone())
            })
            .collect()
    }

    /// `α_ν`: substitutes `x_d ↦ ν_d x_d`.
    pub fn twist(&self, nu: &SignPattern) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let flips = t.mono.iter().filter(|&&d| !nu.positive(d)).count();
                let c = if flips % 2 == 1 { -t.c.clone() } else { t.c.clone() };
                Term { c, mono: t.mono.clone() }
            })
            .collect();
        Self { n: self.n, terms }
    }

    pub fn to_json(&self) -> RelationJson {
        let d = IndexSetD::new(self.n);
        RelationJson {
            terms: self
                .terms
                .iter()
                .map(|t| TermJson {
                    c: format_q(&t.c),
                    mono: t
                        .mono
                        .iter()
                        .map(|&k| {
                            let (a, b) = d.pairs()[k];
                            [a.to_string(), b.to_string()]
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(n: usize, j: &RelationJson) -> Result<Self> {
        let d = IndexSetD::new(n);
        let terms = j
            .terms
            .iter()
            .map(|t| {
                let c = parse_q(&t.c).ok_or_else(|| Error::Input(format!("bad coefficient {:?}", t.c)))?;
                let mono = t
                    .mono
                    .iter()
                    .map(|[a, b]| {
                        let a: SignedLabel = a.parse()?;
                        let b: SignedLabel = b.parse()?;
                        if a.index() > n || b.index() > n {
                            return Err(Error::Input(format!("label out of range in ({a}, {b})")));
                        }
                        d.index_of(a, b)
                            .ok_or_else(|| Error::Input(format!("({a}, {b}) is not a coordinate")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Term { c, mono })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, terms)
    }
}

impl fmt::Display for QuadraticRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let d = IndexSetD::new(self.n);
        for (k, t) in self.terms.iter().enumerate() {
            match (k, t.c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = t.c.abs();
            let mut parts = Vec::new();
            if !abs.is_one() || t.mono.is_empty() {
                parts.push(format_q(&abs));
            }
            for &m in &t.mono {
                let (a, b) = d.pairs()[m];
                parts.push(format!("x({a},{b})"));
            }
            f.write_str(&parts.join("*"))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub c: String,
    pub mono: Vec<[String; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationJson {
    pub terms: Vec<TermJson>,
}

/// Substitutes `x_d ↦ ι(Δ_d)` and expands; true iff the result is zero.
pub fn verify_relation(r: &QuadraticRelation) -> bool {
    let n = r.n();
    let deltas = delta_polys(n);
    let mut total = Poly::default();
    for t in r.terms() {
        let p = t
            .mono
            .iter()
            .fold(Poly::one(2 * n), |acc, &d| acc.mul(&deltas[d]));
        total.add(&p, &t.c);
    }
    total.is_zero()
}

/// Monomials of degree at most 2 in the `x_d`, grouped by their weight under
/// the torus scaling column `i` of `z` (`x_{a,b}` has weight `e_|a| + e_|b|`).
fn graded_monomials(n: usize) -> BTreeMap<Vec<u8>, Vec<Vec<usize>>> {
    let d = IndexSetD::new(n);
    let weight = |mono: &[usize]| {
        let mut w = vec![0u8; n];
        for &k in mono {
            let (a, b) = d.pairs()[k];
            w[a.index() - 1] += 1;
            w[b.index() - 1] += 1;
        }
        w
    };
    let mut monos: Vec<Vec<usize>> = vec![vec![]];
    monos.extend((0..d.len()).map(|k| vec![k]));
    for i in 0..d.len() {
        for j in i..d.len() {
            monos.push(vec![i, j]);
        }
    }
    let mut out: BTreeMap<Vec<u8>, Vec<Vec<usize>>> = BTreeMap::new();
    for m in monos {
        out.entry(weight(&m)).or_default().push(m);
    }
    out
}

fn derived_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Kernel of the evaluation map on every grade, at the given sample points.
fn sampled_kernel(n: usize, points: &[Vec<Q>]) -> Vec<QuadraticRelation> {
    let mut out = Vec::new();
    for monos in graded_monomials(n).values() {
        let rows: Vec<Vec<Q>> = points
            .iter()
            .map(|x| {
                monos
                    .iter()
                    .map(|m| m.iter().fold(Q::one(), |acc, &k| acc * &x[k]))
                    .collect()
            })
            .collect();
        for v in linalg::nullspace(&rows, monos.len()) {
            let v = linalg::primitive(&v);
            let terms = monos
                .iter()
                .zip(v)
                .map(|(m, c)| Term { c, mono: m.clone() })
                .collect();
            out.push(QuadraticRelation::new(n, terms).expect("monomials are valid"));
        }
    }
    out
}

fn sample_points(n: usize, seed: u64, stream: u64, count: usize) -> Vec<Vec<Q>> {
    let mut rng = derived_rng(seed, stream);
    (0..count)
        .map(|_| delta_eval(&AmbientPoint::random(n, &mut rng)))
        .collect()
}

/// Basis of the degree-≤2 part of the ideal of `X`, found as the exact
/// kernel of the evaluation matrix at random points. A second independent
/// sample must give the same (reduced, hence canonical) basis, and every
/// basis element is verified by symbolic expansion.
pub fn discover_relations(n: usize, seed: u64) -> Result<Vec<QuadraticRelation>> {
    if !(3..=4).contains(&n) {
        return Err(Error::Capacity(format!("relation discovery supports n = 3, 4, got {n}")));
    }
    let total: usize = graded_monomials(n).values().map(Vec::len).sum();
    let count = total + 8;
    let first = sampled_kernel(n, &sample_points(n, seed, 0, count));
    let second = sampled_kernel(n, &sample_points(n, seed, 1, count));
    if first != second {
        return Err(Error::Sampling(format!(
            "kernel changed between samples ({} vs {} relations)",
            first.len(),
            second.len()
        )));
    }
    if let Some(bad) = first.iter().find(|r| !verify_relation(r)) {
        return Err(Error::Integrity(format!("sampled relation {bad} does not vanish")));
    }
    Ok(first)
}

/// Whether `r` is a linear combination of `basis`.
pub fn in_span(r: &QuadraticRelation, basis: &[QuadraticRelation]) -> bool {
    let mut monos: BTreeSet<Vec<usize>> = r.terms().iter().map(|t| t.mono.clone()).collect();
    for b in basis {
        monos.extend(b.terms().iter().map(|t| t.mono.clone()));
    }
    let monos: Vec<Vec<usize>> = monos.into_iter().collect();
    let mut rows: Vec<Vec<Q>> = basis.iter().map(|b| b.coefficients(&monos)).collect();
    let before = linalg::rank(&rows);
    rows.push(r.coefficients(&monos));
    linalg::rank(&rows) == before
}

/// `w`-degree of a monomial.
fn degree(mono: &[usize], w: &[Q]) -> Q {
    mono.iter().map(|&d| w[d].clone()).sum()
}

/// The terms of maximal `w`-degree.
pub fn init_form(r: &QuadraticRelation, w: &[Q]) -> QuadraticRelation {
    let Some(top) = r.terms().iter().map(|t| degree(&t.mono, w)).max() else {
        return r.clone();
    };
    QuadraticRelation {
        n: r.n(),
        terms: r
            .terms()
            .iter()
            .filter(|t| degree(&t.mono, w) == top)
            .cloned()
            .collect(),
    }
}

/// The maximum of the tropicalized relation at `w` is attained at least twice.
pub fn max_twice(r: &QuadraticRelation, w: &[Q]) -> bool {
    init_form(r, w).terms().len() >= 2
}

pub fn prevariety_check(w: &[Q], relations: &[QuadraticRelation]) -> bool {
    relations.iter().all(|r| max_twice(r, w))
}

/// A vector in `{+1, −1}^D`, written as a string over `+`/`-` in `D` order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignPattern(Vec<bool>);

impl SignPattern {
    pub fn all_positive(n: usize) -> Self {
        Self(vec![true; n * n])
    }

    pub fn positive(&self, d: usize) -> bool {
        self.0[d]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn negate(&self) -> Self {
        Self(self.0.iter().map(|b| !b).collect())
    }

    /// Effect of negating column `i` of `z`: flips the coordinates `(a, b)`
    /// with exactly one of `|a|, |b|` equal to `i`.
    pub fn flip_column(&self, n: usize, i: usize) -> Self {
        let d = IndexSetD::new(n);
        Self(
            self.0
                .iter()
                .zip(d.pairs())
                .map(|(&s, (a, b))| s ^ ((a.index() == i) != (b.index() == i)))
                .collect(),
        )
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl FromStr for SignPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '+' => Ok(true),
                '-' | '\u{2212}' => Ok(false),
                _ => Err(Error::Input(format!("bad sign {c:?} in pattern"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(SignPattern)
    }
}

/// Signs of a nonzero vector; `None` if some coordinate vanishes.
pub fn signs_of(x: &[Q]) -> Option<SignPattern> {
    x.iter()
        .map(|v| (!v.is_zero()).then(|| v.is_positive()))
        .collect::<Option<Vec<_>>>()
        .map(SignPattern)
}

pub fn sign_pattern_of(z: &AmbientPoint) -> Option<SignPattern> {
    signs_of(&delta_eval(z))
}

/// A real point of `X` realizing a pattern: `ε · ι(z)`.
///
/// `ε = −1` is the image of `√−1 · z`, which is real because `ι` is
/// homogeneous of degree 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub z: AmbientPoint,
    pub epsilon: i8,
}

impl Witness {
    pub fn point(&self) -> Vec<Q> {
        let x = delta_eval(&self.z);
        if self.epsilon < 0 {
            x.into_iter().map(|v| -v).collect()
        } else {
            x
        }
    }
}

#[derive(Clone, Debug)]
pub struct SignCensus {
    pub patterns: BTreeMap<SignPattern, Witness>,
    pub trials: u64,
    pub saturated: bool,
}

/// Parameters of [`sample_sign_patterns`].
#[derive(Clone, Copy, Debug)]
pub struct SamplerConfig {
    /// Stop once this many times the current pattern count of consecutive
    /// trials produced nothing new.
    pub patience_factor: u64,
    /// Lower bound on that window, so that early lucky runs do not stop.
    pub min_patience: u64,
    pub max_trials: u64,
    pub batch: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            patience_factor: 10,
            min_patience: 1000,
            max_trials: 1_000_000,
            batch: 1024,
        }
    }
}

/// Collects occurring sign patterns from random witnesses until saturation.
///
/// Trial `t` draws from its own ChaCha stream, and batches are merged in
/// trial order, so the result does not depend on the number of threads.
pub fn sample_sign_patterns(n: usize, seed: u64, config: SamplerConfig) -> SignCensus {
    let mut patterns: BTreeMap<SignPattern, Witness> = BTreeMap::new();
    let mut since_new = 0u64;
    let mut trials = 0u64;
    while trials < config.max_trials {
        let end = (trials + config.batch).min(config.max_trials);
        let batch: Vec<Option<(SignPattern, Witness)>> = (trials..end)
            .into_par_iter()
            .map(|t| {
                let mut rng = derived_rng(seed, t);
                let z = AmbientPoint::random(n, &mut rng);
                let epsilon = if rng.random_bool(0.5) { 1 } else { -1 };
                let w = Witness { z, epsilon };
                signs_of(&w.point()).map(|p| (p, w))
            })
            .collect();
        for found in batch {
            trials += 1;
            match found {
                Some((p, w)) if !patterns.contains_key(&p) => {
                    patterns.insert(p, w);
                    since_new = 0;
                }
                _ => since_new += 1,
            }
            let patience = (config.patience_factor * patterns.len() as u64).max(config.min_patience);
            if since_new >= patience {
                return SignCensus {
                    patterns,
                    trials,
                    saturated: true,
                };
            }
        }
    }
    SignCensus {
        patterns,
        trials,
        saturated: false,
    }
}

/// For every relation, `init_w α_ν(r)` has a positive and a negative
/// coefficient.
pub fn signed_compatible(nu: &SignPattern, w: &[Q], relations: &[QuadraticRelation]) -> bool {
    relations.iter().all(|r| {
        let init = init_form(&r.twist(nu), w);
        init.terms().iter().any(|t| t.c.is_positive()) && init.terms().iter().any(|t| t.c.is_negative())
    })
}

/// Cones of the fan whose interior point passes [`signed_compatible`].
pub fn signed_trop_subfan(nu: &SignPattern, fan: &Fan, relations: &[QuadraticRelation]) -> Vec<usize> {
    let twisted: Vec<QuadraticRelation> = relations.iter().map(|r| r.twist(nu)).collect();
    (0..fan.cones().len())
        .into_par_iter()
        .filter(|&i| {
            let w = &fan.cone(i).interior;
            twisted.iter().all(|r| {
                let init = init_form(r, w);
                init.terms().iter().any(|t| t.c.is_positive())
                    && init.terms().iter().any(|t| t.c.is_negative())
            })
        })
        .collect()
}
