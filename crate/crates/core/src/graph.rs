//! Simple undirected graphs over dense vertex ids `0..n`.
//!
//! The same type serves as the network of friends of a game and as the
//! source graph of a Clique instance. Adjacency is kept as one bitset row per
//! vertex next to a sorted edge list, so both membership queries and
//! deterministic iteration are cheap.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// Largest graph `find_clique` is willing to search.
pub const FIND_CLIQUE_LIMIT: usize = 30;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FriendshipGraph {
    adj: Vec<FixedBitSet>,
    /// Sorted, each pair stored as `(small, large)`.
    edges: Vec<(usize, usize)>,
}

/// Relabelling produced by [`FriendshipGraph::induced_subgraph`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexMap {
    /// `to_old[new_id]` is the original id.
    pub to_old: Vec<usize>,
    /// `to_new[old_id]` is the new id, if the vertex was kept.
    pub to_new: Vec<Option<usize>>,
}

impl FriendshipGraph {
    /// Builds a graph, deduplicating and normalizing the edge list.
    pub fn new<I>(num_vertices: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![FixedBitSet::with_capacity(num_vertices); num_vertices];
        let mut list = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::Structural(format!(
                    "self-loop on vertex {a} in edge {{{a},{b}}}"
                )));
            }
            if a >= num_vertices || b >= num_vertices {
                return Err(Error::Structural(format!(
                    "edge {{{a},{b}}} has an endpoint outside 0..{num_vertices}"
                )));
            }
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            if !adj[lo].contains(hi) {
                adj[lo].insert(hi);
                adj[hi].insert(lo);
                list.push((lo, hi));
            }
        }
        list.sort_unstable();
        Ok(Self { adj, edges: list })
    }

    pub fn empty(num_vertices: usize) -> Self {
        Self::new(num_vertices, std::iter::empty()).expect("edgeless graph is valid")
    }

    pub fn complete(num_vertices: usize) -> Self {
        let edges = (0..num_vertices).flat_map(|i| (i + 1..num_vertices).map(move |j| (i, j)));
        Self::new(num_vertices, edges).expect("complete graph is valid")
    }

    pub fn cycle(num_vertices: usize) -> Result<Self> {
        if num_vertices < 3 {
            return Err(Error::Parameter(format!(
                "a cycle needs at least 3 vertices, got {num_vertices}"
            )));
        }
        Self::new(num_vertices, (0..num_vertices).map(|i| (i, (i + 1) % num_vertices)))
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Sorted edge list, each pair with the smaller id first.
    #[inline]
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Index of `{a,b}` in [`edges`](Self::edges), if present.
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.edges.binary_search(&key).ok()
    }

    #[inline]
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.num_vertices() && b < self.num_vertices() && self.adj[a].contains(b)
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.num_vertices() {
            return Err(Error::Structural(format!(
                "vertex {v} out of range 0..{}",
                self.num_vertices()
            )));
        }
        Ok(())
    }

    fn check_subset(&self, m: &[usize]) -> Result<()> {
        m.iter().try_for_each(|&v| self.check_vertex(v))
    }

    /// Neighbor set of `v` in ascending order.
    pub fn neighbors(&self, v: usize) -> Result<Vec<usize>> {
        self.check_vertex(v)?;
        Ok(self.adj[v].ones().collect())
    }

    /// Neighbor bitset of `v`. Panics when `v` is out of range.
    #[inline]
    pub fn neighbor_set(&self, v: usize) -> &FixedBitSet {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones(..)
    }

    pub fn min_degree(&self) -> Option<usize> {
        (0..self.num_vertices()).map(|v| self.degree(v)).min()
    }

    /// Subgraph induced by `m`, relabelled by ascending original id.
    pub fn induced_subgraph(&self, m: &[usize]) -> Result<(FriendshipGraph, VertexMap)> {
        self.check_subset(m)?;
        let mut to_old = m.to_vec();
        to_old.sort_unstable();
        to_old.dedup();
        let mut to_new = vec![None; self.num_vertices()];
        for (new, &old) in to_old.iter().enumerate() {
            to_new[old] = Some(new);
        }
        let edges = self.edges.iter().filter_map(|&(a, b)| Some((to_new[a]?, to_new[b]?)));
        let g = FriendshipGraph::new(to_old.len(), edges)?;
        Ok((g, VertexMap { to_old, to_new }))
    }

    /// True iff every pair of distinct vertices in `m` is adjacent.
    pub fn is_clique(&self, m: &[usize]) -> Result<bool> {
        self.check_subset(m)?;
        Ok(m.iter()
            .enumerate()
            .all(|(idx, &a)| m[idx + 1..].iter().all(|&b| a == b || self.adj[a].contains(b))))
    }

    /// Lexicographically smallest `k`-clique, by plain backtracking.
    pub fn find_clique(&self, k: usize) -> Result<Option<Vec<usize>>> {
        if self.num_vertices() > FIND_CLIQUE_LIMIT {
            return Err(Error::Capacity(format!(
                "find_clique is exhaustive and limited to {FIND_CLIQUE_LIMIT} vertices, graph has {}",
                self.num_vertices()
            )));
        }
        let mut chosen = Vec::with_capacity(k);
        Ok(self.extend_clique(&mut chosen, 0, k).then_some(chosen))
    }

    fn extend_clique(&self, chosen: &mut Vec<usize>, from: usize, k: usize) -> bool {
        if chosen.len() == k {
            return true;
        }
        let needed = k - chosen.len();
        for v in from..self.num_vertices() {
            if self.num_vertices() - v < needed {
                break;
            }
            if chosen.iter().all(|&u| self.adj[u].contains(v)) {
                chosen.push(v);
                if self.extend_clique(chosen, v + 1, k) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }

    /// Appends a vertex adjacent to every existing vertex.
    pub fn add_universal_vertex(&self) -> FriendshipGraph {
        let n = self.num_vertices();
        let edges = self.edges.iter().copied().chain((0..n).map(|v| (v, n)));
        FriendshipGraph::new(n + 1, edges).expect("universal vertex keeps the graph simple")
    }

    /// Appends `count` vertices with no edges.
    pub fn add_isolated_vertices(&self, count: usize) -> FriendshipGraph {
        FriendshipGraph::new(self.num_vertices() + count, self.edges.iter().copied())
            .expect("isolated vertices keep the graph simple")
    }

    pub fn component_count(&self) -> usize {
        let n = self.num_vertices();
        let mut seen = FixedBitSet::with_capacity(n);
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if seen.contains(start) {
                continue;
            }
            count += 1;
            seen.insert(start);
            stack.push(start);
            while let Some(v) = stack.pop() {
                for u in self.adj[v].ones() {
                    if !seen.contains(u) {
                        seen.insert(u);
                        stack.push(u);
                    }
                }
            }
        }
        count
    }
}

/// Places the graphs side by side; returns the id offset of each part.
pub fn disjoint_union(gs: &[FriendshipGraph]) -> (FriendshipGraph, Vec<usize>) {
    let mut offsets = Vec::with_capacity(gs.len());
    let mut total = 0;
    for g in gs {
        offsets.push(total);
        total += g.num_vertices();
    }
    let edges = gs
        .iter()
        .zip(&offsets)
        .flat_map(|(g, &off)| g.edges().iter().map(move |&(a, b)| (a + off, b + off)));
    let g = FriendshipGraph::new(total, edges).expect("offset edges stay in range");
    (g, offsets)
}
