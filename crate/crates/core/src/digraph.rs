//! Digraphs on `0..n`: exact distances, two-way distance partitions,
//! lexicographic products and quotient digraphs.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bits::BitMatrix;
use crate::scheme::Scheme;

/// Distance value for pairs with no connecting path.
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DigraphError {
    #[error("arc ({0}, {1}) is a loop or out of range")]
    InvalidArc(usize, usize),
    #[error("relation index {0} is not an arc relation (valid: 1..={1})")]
    IndexOutOfRange(usize, usize),
    #[error("empty relation set")]
    EmptyIndexSet,
    #[error("digraph is not strongly connected")]
    NotStronglyConnected,
    #[error("blocks do not partition the vertex set (vertex {0})")]
    NotAPartition(usize),
    #[error("blocks have unequal sizes")]
    UnequalBlockSizes,
}

/// A loopless digraph on `0..n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Digraph {
    arcs: BitMatrix,
}

impl Digraph {
    /// The digraph on `n` vertices with no arcs.
    pub fn empty(n: usize) -> Self {
        Self {
            arcs: BitMatrix::new(n),
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for x in 0..n {
            for y in 0..n {
                if x != y {
                    g.arcs.set(x, y);
                }
            }
        }
        g
    }

    pub fn from_arcs(
        n: usize,
        arcs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, DigraphError> {
        let mut g = Self::empty(n);
        for (x, y) in arcs {
            if x >= n || y >= n || x == y {
                return Err(DigraphError::InvalidArc(x, y));
            }
            g.arcs.set(x, y);
        }
        Ok(g)
    }

    pub(crate) fn from_matrix(arcs: BitMatrix) -> Self {
        debug_assert!((0..arcs.size()).all(|x| !arcs.get(x, x)));
        Self { arcs }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.arcs.size()
    }

    #[inline]
    pub fn has_arc(&self, x: usize, y: usize) -> bool {
        self.arcs.get(x, y)
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.count_ones()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.arcs.ones()
    }

    pub fn out_neighbors(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.arcs.row_ones(x)
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.arcs
    }

    /// True when the arc set is a symmetric relation.
    pub fn is_graph(&self) -> bool {
        self.arcs == self.arcs.transpose()
    }

    pub fn transpose(&self) -> Digraph {
        Digraph {
            arcs: self.arcs.transpose(),
        }
    }

    /// Induced subdigraph on `vertices`, renumbered in the listed order.
    pub fn induced(&self, vertices: &[usize]) -> Digraph {
        let mut g = Digraph::empty(vertices.len());
        for (a, &x) in vertices.iter().enumerate() {
            for (b, &y) in vertices.iter().enumerate() {
                if self.has_arc(x, y) {
                    g.arcs.set(a, b);
                }
            }
        }
        g
    }

    /// BFS distances from `source`.
    pub fn distances_from(&self, source: usize) -> Vec<u32> {
        let n = self.size();
        let mut dist = vec![UNREACHABLE; n];
        let words = self.arcs.words_per_row();
        let mut visited = vec![0u64; words];
        let mut frontier = vec![0u64; words];
        dist[source] = 0;
        visited[source / 64] |= 1 << (source % 64);
        frontier[source / 64] |= 1 << (source % 64);
        let mut level = 0;
        loop {
            let mut next = vec![0u64; words];
            for (w, &bits) in frontier.iter().enumerate() {
                let mut b = bits;
                while b != 0 {
                    let v = w * 64 + b.trailing_zeros() as usize;
                    b &= b - 1;
                    for (acc, r) in next.iter_mut().zip(self.arcs.row(v)) {
                        *acc |= r;
                    }
                }
            }
            for (acc, v) in next.iter_mut().zip(&visited) {
                *acc &= !v;
            }
            if next.iter().all(|&w| w == 0) {
                break;
            }
            level += 1;
            for (w, &bits) in next.iter().enumerate() {
                let mut b = bits;
                while b != 0 {
                    dist[w * 64 + b.trailing_zeros() as usize] = level;
                    b &= b - 1;
                }
                visited[w] |= bits;
            }
            frontier = next;
        }
        dist
    }
}

/// All-pairs distances and the derived global parameters of a digraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DigraphProfile {
    pub size: usize,
    /// Row-major `n × n` distances, [`UNREACHABLE`] for missing paths.
    #[serde(skip)]
    pub dist: Vec<u32>,
    pub strongly_connected: bool,
    /// Largest finite distance.
    pub diameter: u32,
    /// Length of a shortest circuit, if any.
    pub girth: Option<u32>,
}

impl DigraphProfile {
    #[inline]
    pub fn distance(&self, x: usize, y: usize) -> u32 {
        self.dist[x * self.size + y]
    }

    /// The two-way distance `(∂(x,y), ∂(y,x))`.
    #[inline]
    pub fn two_way(&self, x: usize, y: usize) -> (u32, u32) {
        (self.distance(x, y), self.distance(y, x))
    }
}

pub fn profile(g: &Digraph) -> DigraphProfile {
    let n = g.size();
    let rows: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|x| g.distances_from(x))
        .collect();
    let dist: Vec<u32> = rows.into_iter().flatten().collect();
    let strongly_connected = dist.iter().all(|&d| d != UNREACHABLE);
    let diameter = dist
        .iter()
        .copied()
        .filter(|&d| d != UNREACHABLE)
        .max()
        .unwrap_or(0);
    let girth = g
        .arcs()
        .filter_map(|(u, v)| {
            let back = dist[v * n + u];
            (back != UNREACHABLE).then(|| back + 1)
        })
        .min();
    DigraphProfile {
        size: n,
        dist,
        strongly_connected,
        diameter,
        girth,
    }
}

/// Cells `Γ_(a,b)` of the two-way distance partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoWayPartition {
    pub size: usize,
    pub cells: BTreeMap<(u32, u32), Vec<(usize, usize)>>,
}

impl TwoWayPartition {
    pub fn keys(&self) -> Vec<(u32, u32)> {
        self.cells.keys().copied().collect()
    }
}

pub fn two_way_partition(g: &Digraph) -> Result<TwoWayPartition, DigraphError> {
    let prof = profile(g);
    two_way_partition_from(&prof)
}

pub(crate) fn two_way_partition_from(
    prof: &DigraphProfile,
) -> Result<TwoWayPartition, DigraphError> {
    if !prof.strongly_connected {
        return Err(DigraphError::NotStronglyConnected);
    }
    let n = prof.size;
    let mut cells: BTreeMap<(u32, u32), Vec<(usize, usize)>> = BTreeMap::new();
    for x in 0..n {
        for y in 0..n {
            cells.entry(prof.two_way(x, y)).or_default().push((x, y));
        }
    }
    Ok(TwoWayPartition { size: n, cells })
}

/// The digraph whose arcs are the union of the given scheme relations.
pub fn arc_union(s: &Scheme, idxs: &[usize]) -> Result<Digraph, DigraphError> {
    if idxs.is_empty() {
        return Err(DigraphError::EmptyIndexSet);
    }
    let mut arcs = BitMatrix::new(s.size());
    for &i in idxs {
        if i == 0 || i > s.d() {
            return Err(DigraphError::IndexOutOfRange(i, s.d()));
        }
        arcs.union_with(s.relation(i));
    }
    Ok(Digraph::from_matrix(arcs))
}

/// Lexicographic product; vertex `(u, v)` is numbered `u * |inner| + v`.
pub fn lexicographic_product(outer: &Digraph, inner: &Digraph) -> Digraph {
    let m = inner.size();
    let n = outer.size() * m;
    let mut arcs = BitMatrix::new(n);
    for u1 in 0..outer.size() {
        for u2 in 0..m {
            let x = u1 * m + u2;
            for v1 in 0..outer.size() {
                for v2 in 0..m {
                    let arc = outer.has_arc(u1, v1) || (u1 == v1 && inner.has_arc(u2, v2));
                    if arc {
                        arcs.set(x, v1 * m + v2);
                    }
                }
            }
        }
    }
    Digraph::from_matrix(arcs)
}

fn block_index(n: usize, blocks: &[Vec<usize>]) -> Result<Vec<usize>, DigraphError> {
    let mut owner = vec![usize::MAX; n];
    for (b, block) in blocks.iter().enumerate() {
        for &v in block {
            if v >= n || owner[v] != usize::MAX {
                return Err(DigraphError::NotAPartition(v));
            }
            owner[v] = b;
        }
    }
    if let Some(v) = owner.iter().position(|&o| o == usize::MAX) {
        return Err(DigraphError::NotAPartition(v));
    }
    Ok(owner)
}

/// The block digraph: `(B, C)` is an arc for `B ≠ C` iff some arc of `g`
/// leads from `B` to `C`.
pub fn quotient_digraph(g: &Digraph, blocks: &[Vec<usize>]) -> Result<Digraph, DigraphError> {
    let owner = block_index(g.size(), blocks)?;
    let mut arcs = BitMatrix::new(blocks.len());
    for (x, y) in g.arcs() {
        let (b, c) = (owner[x], owner[y]);
        if b != c {
            arcs.set(b, c);
        }
    }
    Ok(Digraph::from_matrix(arcs))
}

/// Recognises `g` as `lexicographic_product(g / blocks, inner)` where the
/// `t`-th vertex of every block plays the role of inner vertex `t`.
pub fn lex_decompose(
    g: &Digraph,
    blocks: &[Vec<usize>],
) -> Result<Option<(Digraph, Digraph)>, DigraphError> {
    block_index(g.size(), blocks)?;
    let m = blocks.first().map_or(0, Vec::len);
    if blocks.iter().any(|b| b.len() != m) {
        return Err(DigraphError::UnequalBlockSizes);
    }
    let outer = quotient_digraph(g, blocks)?;
    let inner = g.induced(&blocks[0]);
    if blocks.iter().any(|b| g.induced(b) != inner) {
        return Ok(None);
    }
    for (bi, b) in blocks.iter().enumerate() {
        for (ci, c) in blocks.iter().enumerate() {
            if bi == ci {
                continue;
            }
            let want = outer.has_arc(bi, ci);
            if b.iter()
                .any(|&x| c.iter().any(|&y| g.has_arc(x, y) != want))
            {
                return Ok(None);
            }
        }
    }
    Ok(Some((outer, inner)))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn circulant(n: usize, gens: &[usize]) -> Digraph {
        Digraph::from_arcs(
            n,
            (0..n).flat_map(|x| gens.iter().map(move |&g| (x, (x + g) % n))),
        )
        .unwrap()
    }

    /// Reachability by repeated boolean matrix products; distance is the
    /// first power at which a pair becomes reachable.
    fn matrix_power_distances(g: &Digraph) -> Vec<u32> {
        let n = g.size();
        let mut dist = vec![UNREACHABLE; n * n];
        let mut reach = vec![false; n * n];
        for x in 0..n {
            reach[x * n + x] = true;
            dist[x * n + x] = 0;
        }
        for step in 1..=n as u32 {
            let mut next = reach.clone();
            for x in 0..n {
                for z in 0..n {
                    if reach[x * n + z] {
                        for y in 0..n {
                            if g.has_arc(z, y) {
                                next[x * n + y] = true;
                            }
                        }
                    }
                }
            }
            for i in 0..n * n {
                if next[i] && !reach[i] {
                    dist[i] = step;
                }
            }
            reach = next;
        }
        dist
    }

    #[test]
    fn directed_triangle_profile() {
        let c3 = circulant(3, &[1]);
        let p = profile(&c3);
        assert!(p.strongly_connected);
        assert_eq!(p.diameter, 2);
        assert_eq!(p.girth, Some(3));
        let part = two_way_partition(&c3).unwrap();
        assert_eq!(part.keys(), vec![(0, 0), (1, 2), (2, 1)]);
        assert_eq!(part.cells[&(1, 2)], vec![(0, 1), (1, 2), (2, 0)]);
    }

    #[test]
    fn z4_plus_one_plus_two() {
        let g = circulant(4, &[1, 2]);
        let p = profile(&g);
        assert_eq!(p.distance(0, 3), 2);
        assert_eq!(p.distance(3, 0), 1);
        // 0 -> 2 -> 0 is a digon
        assert_eq!((p.diameter, p.girth), (2, Some(2)));
        assert_eq!(p.dist, matrix_power_distances(&g));
        let part = two_way_partition(&g).unwrap();
        assert_eq!(part.keys(), vec![(0, 0), (1, 1), (1, 2), (2, 1)]);
        assert_eq!(part.cells[&(1, 2)], vec![(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(part.cells[&(2, 1)], vec![(0, 3), (1, 0), (2, 1), (3, 2)]);
        assert_eq!(part.cells[&(1, 1)], vec![(0, 2), (1, 3), (2, 0), (3, 1)]);

        let t = two_way_partition(&g.transpose()).unwrap();
        for (&(a, b), cell) in &part.cells {
            let mut swapped: Vec<_> = cell.clone();
            swapped.sort();
            assert_eq!(t.cells[&(b, a)], swapped);
        }
    }

    #[test]
    fn undirected_four_cycle() {
        let part = two_way_partition(&circulant(4, &[1, 3])).unwrap();
        assert_eq!(part.keys(), vec![(0, 0), (1, 1), (2, 2)]);
        assert_eq!(part.cells[&(2, 2)].len(), 4);
    }

    #[test]
    fn disconnected_union() {
        let g = Digraph::from_arcs(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        let p = profile(&g);
        assert!(!p.strongly_connected);
        assert_eq!(p.diameter, 2);
        assert_eq!(p.distance(0, 3), UNREACHABLE);
        assert_eq!(
            two_way_partition(&g).unwrap_err(),
            DigraphError::NotStronglyConnected
        );
    }

    #[test]
    fn acyclic_has_no_girth() {
        let g = Digraph::from_arcs(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(profile(&g).girth, None);
    }

    #[test]
    fn transpose_reverses() {
        let c3 = circulant(3, &[1]);
        assert_eq!(c3.transpose(), circulant(3, &[2]));
        assert_eq!(c3.transpose().transpose(), c3);
    }

    #[test]
    fn lexicographic_counts() {
        let c3 = circulant(3, &[1]);
        let blown = lexicographic_product(&c3, &Digraph::empty(2));
        assert_eq!((blown.size(), blown.arc_count()), (6, 12));
        assert_eq!(profile(&blown).diameter, 3);
        let with_k2 = lexicographic_product(&c3, &Digraph::complete(2));
        assert_eq!(with_k2.arc_count(), 18);
    }

    #[test]
    fn quotients() {
        let c3 = circulant(3, &[1]);
        let blown = lexicographic_product(&c3, &Digraph::empty(2));
        let fibers = vec![vec![0, 1], vec![2, 3], vec![4, 5]];
        assert_eq!(quotient_digraph(&blown, &fibers).unwrap(), c3);

        let singletons: Vec<Vec<usize>> = (0..6).map(|v| vec![v]).collect();
        assert_eq!(quotient_digraph(&blown, &singletons).unwrap(), blown);

        let antipodal = vec![vec![0, 3], vec![1, 4], vec![2, 5]];
        assert_eq!(
            quotient_digraph(&circulant(6, &[1]), &antipodal).unwrap(),
            c3
        );
        assert_eq!(
            quotient_digraph(&circulant(6, &[1, 5]), &antipodal).unwrap(),
            circulant(3, &[1, 2])
        );
        assert_eq!(
            quotient_digraph(&c3, &[vec![0, 1]]).unwrap_err(),
            DigraphError::NotAPartition(2)
        );
    }

    #[test]
    fn lex_decompose_round_trips() {
        let c3 = circulant(3, &[1]);
        let fibers = vec![vec![0, 1], vec![2, 3], vec![4, 5]];
        for inner in [Digraph::empty(2), Digraph::complete(2)] {
            let g = lexicographic_product(&c3, &inner);
            let (o, i) = lex_decompose(&g, &fibers).unwrap().unwrap();
            assert_eq!((o, i.clone()), (c3.clone(), inner));
        }
        let antipodal = vec![vec![0, 3], vec![1, 4], vec![2, 5]];
        assert_eq!(
            lex_decompose(&circulant(6, &[1]), &antipodal).unwrap(),
            None
        );
        assert_eq!(
            lex_decompose(&c3, &[vec![0, 1], vec![2]]).unwrap_err(),
            DigraphError::UnequalBlockSizes
        );
    }
}
