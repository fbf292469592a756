//! Finite posets and graphs with brute-force isomorphism tests, plus the
//! subdivision lattices of associahedra and cyclohedra.

use crate::error::Result;
use crate::polygon::{dissections, enumerate_subdivisions, SymmetryClass};

/// A finite poset stored as its strict order relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    less: Vec<Vec<bool>>,
    rank: Vec<usize>,
}

impl Poset {
    /// Transitive closure of the given `(lower, upper)` pairs.
    pub fn from_covers(count: usize, covers: &[(usize, usize)]) -> Self {
        let mut less = vec![vec![false; count]; count];
        for &(a, b) in covers {
            less[a][b] = true;
        }
        for k in 0..count {
            let through = less[k].clone();
            for row in less.iter_mut().filter(|row| row[k]) {
                for (x, &y) in row.iter_mut().zip(&through) {
                    *x |= y;
                }
            }
        }
        Self::from_relation(less)
    }

    /// `le(a, b)` must be a partial order.
    pub fn from_order(count: usize, le: impl Fn(usize, usize) -> bool) -> Self {
        let less = (0..count)
            .map(|a| (0..count).map(|b| a != b && le(a, b)).collect())
            .collect();
        Self::from_relation(less)
    }

    fn from_relation(less: Vec<Vec<bool>>) -> Self {
        let count = less.len();
        // Height of each element: longest chain below it.
        let mut rank = vec![0; count];
        let mut order: Vec<usize> = (0..count).collect();
        order.sort_by_key(|&a| (0..count).filter(|&b| less[b][a]).count());
        for &a in &order {
            rank[a] = (0..count)
                .filter(|&b| less[b][a])
                .map(|b| rank[b] + 1)
                .max()
                .unwrap_or(0);
        }
        Self { less, rank }
    }

    pub fn len(&self) -> usize {
        self.less.len()
    }

    pub fn is_empty(&self) -> bool {
        self.less.is_empty()
    }

    pub fn less(&self, a: usize, b: usize) -> bool {
        self.less[a][b]
    }

    pub fn rank(&self, a: usize) -> usize {
        self.rank[a]
    }

    /// Number of elements of each rank.
    pub fn rank_profile(&self) -> Vec<usize> {
        let top = self.rank.iter().copied().max().map_or(0, |r| r + 1);
        let mut out = vec![0; top];
        for &r in &self.rank {
            out[r] += 1;
        }
        out
    }

    fn signature(&self, a: usize) -> (usize, usize, usize) {
        let below = (0..self.len()).filter(|&b| self.less[b][a]).count();
        let above = (0..self.len()).filter(|&b| self.less[a][b]).count();
        (self.rank[a], below, above)
    }

    pub fn is_isomorphic(&self, other: &Poset) -> bool {
        let n = self.len();
        if n != other.len() || self.rank_profile() != other.rank_profile() {
            return false;
        }
        let sa: Vec<_> = (0..n).map(|a| self.signature(a)).collect();
        let sb: Vec<_> = (0..n).map(|b| other.signature(b)).collect();
        let mut sorted_a = sa.clone();
        let mut sorted_b = sb.clone();
        sorted_a.sort_unstable();
        sorted_b.sort_unstable();
        if sorted_a != sorted_b {
            return false;
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&a| sa[a]);
        let compatible = |a: usize, b: usize, map: &[usize], placed: &[usize]| {
            sa[a] == sb[b]
                && placed.iter().all(|&x| {
                    let y = map[x];
                    self.less[x][a] == other.less[y][b] && self.less[a][x] == other.less[b][y]
                })
        };
        search(n, &order, &mut vec![usize::MAX; n], &mut vec![false; n], 0, &compatible)
    }
}

/// Extends a partial bijection along `order`; shared by the poset and graph
/// searches.
fn search(
    n: usize,
    order: &[usize],
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
    depth: usize,
    ok: &impl Fn(usize, usize, &[usize], &[usize]) -> bool,
) -> bool {
    if depth == n {
        return true;
    }
    let a = order[depth];
    for b in 0..n {
        if used[b] || !ok(a, b, map, &order[..depth]) {
            continue;
        }
        map[a] = b;
        used[b] = true;
        if search(n, order, map, used, depth + 1, ok) {
            return true;
        }
        used[b] = false;
        map[a] = usize::MAX;
    }
    false
}

/// A simple undirected graph given by vertex count and edge list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<bool>>,
}

impl Graph {
    pub fn new(count: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![vec![false; count]; count];
        for &(a, b) in edges {
            adj[a][b] = true;
            adj[b][a] = true;
        }
        Self { adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.iter().filter(|&&x| x).count()).sum::<usize>() / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|&&x| x).count()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.adj.len();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for (u, &edge) in self.adj[v].iter().enumerate() {
                if edge && !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_isomorphic(&self, other: &Graph) -> bool {
        let n = self.vertex_count();
        if n != other.vertex_count() || self.edge_count() != other.edge_count() {
            return false;
        }
        let mut da: Vec<usize> = (0..n).map(|v| self.degree(v)).collect();
        let mut db: Vec<usize> = (0..n).map(|v| other.degree(v)).collect();
        let deg_a = da.clone();
        let deg_b = db.clone();
        da.sort_unstable();
        db.sort_unstable();
        if da != db {
            return false;
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(deg_a[v]));
        let compatible = |a: usize, b: usize, map: &[usize], placed: &[usize]| {
            deg_a[a] == deg_b[b]
                && placed
                    .iter()
                    .all(|&x| self.adj[x][a] == other.adj[map[x]][b])
        };
        search(n, &order, &mut vec![usize::MAX; n], &mut vec![false; n], 0, &compatible)
    }
}

/// Face poset of the dual associahedron fan: subdivisions of the
/// `(n+2)`-gon ordered by inclusion.
pub fn associahedron_lattice(n: usize) -> Poset {
    let subs = dissections(n + 2);
    Poset::from_order(subs.len(), |a, b| subs[a].is_subset(&subs[b]))
}

/// Face poset of the dual cyclohedron fan: centrally symmetric subdivisions
/// of the `2n`-gon ordered by inclusion.
pub fn cyclohedron_lattice(n: usize) -> Result<Poset> {
    let subs = enumerate_subdivisions(n, SymmetryClass::Central)?;
    Ok(Poset::from_order(subs.len(), |a, b| subs[a].is_subset(&subs[b])))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pentagon_and_hexagon_lattices() {
        let a = associahedron_lattice(3);
        let c = cyclohedron_lattice(3).unwrap();
        assert_eq!(a.rank_profile(), vec![1, 5, 5]);
        assert_eq!(c.rank_profile(), vec![1, 6, 6]);
        assert!(!a.is_isomorphic(&c));
        assert!(a.is_isomorphic(&a.clone()));
    }

    #[test]
    fn cycle_graphs() {
        let cycle = |k: usize, shift: usize| {
            let edges: Vec<(usize, usize)> =
                (0..k).map(|i| ((i * shift) % k, ((i + 1) * shift) % k)).collect();
            Graph::new(k, &edges)
        };
        assert!(cycle(5, 1).is_isomorphic(&cycle(5, 2)));
        assert!(!cycle(6, 1).is_isomorphic(&Graph::new(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])));
        assert!(cycle(6, 1).is_connected());
    }

    #[test]
    fn chain_ranks() {
        let p = Poset::from_covers(3, &[(0, 1), (1, 2)]);
        assert!(p.less(0, 2));
        assert_eq!((p.rank(0), p.rank(2)), (0, 2));
    }
}
