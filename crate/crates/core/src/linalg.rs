//! Exact linear algebra over `BigRational`.
//!
//! Everything here is small (at most a few hundred columns), so dense
//! row-major `Vec<Vec<_>>` matrices are used throughout.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Rank by fraction-free (Bareiss) elimination on the integer-scaled rows.
pub fn rank(rows: &[Vec<Q>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| clear_denominators(r)).collect();
    if m.is_empty() {
        return 0;
    }
    let ncols = m[0].len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..m.len() {
            for j in c + 1..ncols {
                let v = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

fn clear_denominators(row: &[Q]) -> Vec<BigInt> {
    let l = row
        .iter()
        .fold(BigInt::one(), |acc, x| num::integer::lcm(acc, x.denom().clone()));
    row.iter()
        .map(|x| x.numer() * (&l / x.denom()))
        .collect()
}

/// Reduces `m` to reduced row echelon form in place and returns the pivot columns.
pub fn rref(m: &mut Vec<Vec<Q>>) -> Vec<usize> {
    let mut pivots = Vec::new();
    if m.is_empty() {
        return pivots;
    }
    let ncols = m[0].len();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    pivots
}

/// Basis of the right kernel `{x : M x = 0}`, one vector per free column.
///
/// The basis is read off the reduced row echelon form, so it depends only on
/// the row space of `m`, not on the particular rows supplied.
pub fn nullspace(rows: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); ncols];
            v[f] = Q::one();
            for (row, &p) in m.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Scales a nonzero rational vector to a primitive integer vector whose
/// first nonzero entry is positive.
pub fn primitive(v: &[Q]) -> Vec<Q> {
    let ints = clear_denominators(v);
    let g = ints
        .iter()
        .fold(BigInt::zero(), |acc, x| num::integer::gcd(acc, x.clone()));
    if g.is_zero() {
        return v.to_vec();
    }
    let sign = match ints.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => -BigInt::one(),
        _ => BigInt::one(),
    };
    ints.into_iter()
        .map(|x| Q::from_integer(x / &g * &sign))
        .collect()
}

/// Unique-solution solver for `G x = w` where `G` (given by its columns)
/// has full column rank.
#[derive(Debug, Clone)]
pub struct ColumnSolver {
    columns: Vec<Vec<Q>>,
    pivot_rows: Vec<usize>,
    inverse: Vec<Vec<Q>>,
    columns_f64: Vec<Vec<f64>>,
    inverse_f64: Vec<Vec<f64>>,
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

impl ColumnSolver {
    /// Returns `None` when the columns are linearly dependent.
    pub fn new(columns: Vec<Vec<Q>>) -> Option<Self> {
        let k = columns.len();
        if k == 0 {
            return Some(Self {
                columns,
                pivot_rows: Vec::new(),
                inverse: Vec::new(),
                columns_f64: Vec::new(),
                inverse_f64: Vec::new(),
            });
        }
        let m = columns[0].len();
        // Row space of G^T picks k independent coordinates.
        let mut gt: Vec<Vec<Q>> = columns.clone();
        let pivot_rows = rref(&mut gt);
        if pivot_rows.len() < k {
            return None;
        }
        debug_assert!(pivot_rows.iter().all(|&r| r < m));
        // Invert the k x k submatrix A[i][j] = columns[j][pivot_rows[i]].
        let mut aug: Vec<Vec<Q>> = (0..k)
            .map(|i| {
                let mut row: Vec<Q> = (0..k).map(|j| columns[j][pivot_rows[i]].clone()).collect();
                row.extend((0..k).map(|j| if i == j { Q::one() } else { Q::zero() }));
                row
            })
            .collect();
        rref(&mut aug);
        let inverse: Vec<Vec<Q>> = aug.into_iter().map(|row| row[k..].to_vec()).collect();
        let as_f64 = |m: &[Vec<Q>]| m.iter().map(|r| r.iter().map(to_f64).collect()).collect();
        Some(Self {
            columns_f64: as_f64(&columns),
            inverse_f64: as_f64(&inverse),
            columns,
            pivot_rows,
            inverse,
        })
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Vec<Q>] {
        &self.columns
    }

    /// Floating-point screen for [`ColumnSolver::solve`]: returns the
    /// approximate coefficients when `w` is within `tol` (relative) of the
    /// column span. Never used as a verdict on its own.
    pub fn approx_solve(&self, w: &[f64], tol: f64) -> Option<Vec<f64>> {
        let scale = w.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let x: Vec<f64> = self
            .inverse_f64
            .iter()
            .map(|row| row.iter().zip(&self.pivot_rows).map(|(a, &r)| a * w[r]).sum())
            .collect();
        for (row, wr) in w.iter().enumerate() {
            let acc: f64 = self.columns_f64.iter().zip(&x).map(|(c, xj)| c[row] * xj).sum();
            if (acc - wr).abs() > tol * scale {
                return None;
            }
        }
        Some(x)
    }

    /// The unique coefficients `x` with `Σ x_j · column_j = w`, if any.
    pub fn solve(&self, w: &[Q]) -> Option<Vec<Q>> {
        let k = self.columns.len();
        let x: Vec<Q> = (0..k)
            .map(|i| {
                self.inverse[i]
                    .iter()
                    .zip(&self.pivot_rows)
                    .filter(|(a, _)| !a.is_zero())
                    .map(|(a, &r)| a * &w[r])
                    .sum()
            })
            .collect();
        for (row, wr) in w.iter().enumerate() {
            let mut acc = Q::zero();
            for (col, xj) in self.columns.iter().zip(&x) {
                if !col[row].is_zero() && !xj.is_zero() {
                    acc += &col[row] * xj;
                }
            }
            if &acc != wr {
                return None;
            }
        }
        Some(x)
    }
}

pub fn combine(columns: &[Vec<Q>], coeffs: &[Q], len: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); len];
    for (col, c) in columns.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(col) {
            if !x.is_zero() {
                *o += x * c;
            }
        }
    }
    out
}

pub fn format_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim().replace('\u{2212}', "-");
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().ok()?;
            let b: BigInt = b.trim().parse().ok()?;
            if b.is_zero() {
                None
            } else {
                Some(Q::new(a, b))
            }
        }
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
    }
}


#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    fn rational() -> impl Strategy<Value = Q> {
        (-40i64..=40, 1i64..=12).prop_map(|(a, b)| q(a) / q(b))
    }

    fn matrix() -> impl Strategy<Value = Vec<Vec<Q>>> {
        (1usize..=5, 1usize..=6).prop_flat_map(|(r, c)| {
            prop::collection::vec(prop::collection::vec(prop_oneof![3 => Just(q(0)), 2 => rational()], c), r)
        })
    }

    proptest! {
        #[test]
        fn rank_agrees_with_rref(m in matrix()) {
            let mut r = m.clone();
            let pivots = rref(&mut r);
            prop_assert_eq!(rank(&m), pivots.len());
            let ncols = m[0].len();
            let kernel = nullspace(&m, ncols);
            prop_assert_eq!(kernel.len() + pivots.len(), ncols);
            for v in &kernel {
                for row in &m {
                    let dot: Q = row.iter().zip(v).map(|(a, b)| a * b).sum();
                    prop_assert_eq!(dot, q(0));
                }
            }
        }

        #[test]
        fn rationals_print_and_parse(x in rational()) {
            prop_assert_eq!(parse_q(&format_q(&x)), Some(x));
        }
    }
}
