//! The epipolar (viewing) graph and its combinatorial structure.
//!
//! Each undirected edge is stored once, in the orientation it was given at
//! construction time, together with the relative motion for that
//! orientation. Traversing an edge against its stored orientation uses the
//! inverted label, so all sign bookkeeping derives from a single place.

use crate::error::{Error, Result};
use crate::geometry::{RelativeMotion, Rotation, UnitVector3};
use crate::gf2::Gf2Vector;
use crate::scalar::Scalar;
use rand::seq::SliceRandom;
use rand::Rng;
use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use serde::{Deserialize, Serialize};

/// An undirected edge with the label of its stored orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge<T: Scalar> {
    pub source: usize,
    pub target: usize,
    pub motion: RelativeMotion<T>,
    /// Length used by weighted cycle bases. Defaults to 1.
    pub weight: T,
}

impl<T: Scalar> Edge<T> {
    #[inline]
    pub fn endpoints(&self) -> (usize, usize) {
        (self.source, self.target)
    }

    /// The endpoint that is not `v`.
    #[inline]
    pub fn other(&self, v: usize) -> usize {
        if self.source == v {
            self.target
        } else {
            self.source
        }
    }

    /// Label for traversal in the given direction.
    pub fn motion_along(&self, forward: bool) -> RelativeMotion<T> {
        if forward {
            self.motion
        } else {
            self.motion.inverse()
        }
    }
}

/// Undirected simple graph of cameras and pairwise motions.
#[derive(Debug, Clone)]
pub struct EpipolarGraph<T: Scalar> {
    n: usize,
    edges: Vec<Edge<T>>,
    /// Per vertex: `(neighbor, edge id)` sorted by neighbor.
    adjacency: Vec<Vec<(usize, usize)>>,
    index: HashMap<(usize, usize), usize>,
}

impl<T: Scalar> EpipolarGraph<T> {
    /// Builds a graph with unit weights; each edge is `(i, j, M_ij)`.
    pub fn new(n: usize, edges: Vec<(usize, usize, RelativeMotion<T>)>) -> Result<Self> {
        Self::with_weights(
            n,
            edges
                .into_iter()
                .map(|(i, j, motion)| (i, j, motion, T::one()))
                .collect(),
        )
    }

    pub fn with_weights(n: usize, edges: Vec<(usize, usize, RelativeMotion<T>, T)>) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        let mut index = HashMap::with_capacity(edges.len());
        let mut stored = Vec::with_capacity(edges.len());
        for (id, (i, j, motion, weight)) in edges.into_iter().enumerate() {
            for v in [i, j] {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            if !(weight > T::zero()) {
                return Err(Error::NonPositiveWeight);
            }
            if index.insert((i.min(j), i.max(j)), id).is_some() {
                return Err(Error::DuplicateEdge(i, j));
            }
            adjacency[i].push((j, id));
            adjacency[j].push((i, id));
            stored.push(Edge {
                source: i,
                target: j,
                motion,
                weight,
            });
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self {
            n,
            edges: stored,
            adjacency,
            index,
        })
    }

    /// Topology-only graph: every label is the identity rotation with an
    /// x-axis direction.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let label = RelativeMotion::new(Rotation::identity(), UnitVector3::x_axis());
        Self::new(n, pairs.iter().map(|&(i, j)| (i, j, label)).collect())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> Result<&Edge<T>> {
        self.edges.get(id).ok_or(Error::MissingEdge(id))
    }

    /// `(neighbor, edge id)` pairs, ascending by neighbor.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Edge id joining `a` and `b`, and whether `a → b` is its stored orientation.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<(usize, bool)> {
        self.index
            .get(&(a.min(b), a.max(b)))
            .map(|&id| (id, self.edges[id].source == a))
    }

    /// Replaces every edge label, keeping the topology and orientation.
    pub fn with_motions(&self, motions: Vec<RelativeMotion<T>>) -> Result<Self> {
        if motions.len() != self.m() {
            return Err(Error::DimensionMismatch {
                expected: self.m(),
                got: motions.len(),
            });
        }
        let mut g = self.clone();
        for (e, m) in g.edges.iter_mut().zip(motions) {
            e.motion = m;
        }
        Ok(g)
    }

    /// Component label per vertex and the component count.
    pub fn connected_components(&self) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for root in 0..self.n {
            if label[root] != usize::MAX {
                continue;
            }
            label[root] = count;
            queue.push_back(root);
            while let Some(v) = queue.pop_front() {
                for &(w, _) in &self.adjacency[v] {
                    if label[w] == usize::MAX {
                        label[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn component_count(&self) -> usize {
        self.connected_components().1
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.component_count() == 1
    }

    /// Dimension of the cycle space, `m − n + cc`.
    pub fn cycle_space_dimension(&self) -> usize {
        self.m() + self.component_count() - self.n
    }

    /// Necessary edge count for unique solvability, `m ≥ 3n/2 − 2`.
    pub fn satisfies_counting_condition(&self) -> bool {
        2 * self.m() + 4 >= 3 * self.n
    }

    /// Articulation points, bridges and biconnected components.
    pub fn biconnectivity(&self) -> BiconnectivityReport {
        biconnectivity(self)
    }

    /// Connected, at least three vertices, no articulation point.
    pub fn is_biconnected(&self) -> bool {
        self.n >= 3 && self.is_connected() && self.biconnectivity().articulation_points.is_empty()
    }

    /// Subgraph induced by an edge subset, with vertices renumbered in
    /// ascending order of their original ids.
    pub fn edge_subgraph(&self, edge_ids: &[usize]) -> Result<Subgraph<T>> {
        let mut ids = edge_ids.to_vec();
        ids.sort_unstable();
        ids.dedup();
        let mut vertex_map: Vec<usize> = Vec::new();
        for &e in &ids {
            let edge = self.edge(e)?;
            vertex_map.push(edge.source);
            vertex_map.push(edge.target);
        }
        vertex_map.sort_unstable();
        vertex_map.dedup();
        let mut local = vec![usize::MAX; self.n];
        for (new, &old) in vertex_map.iter().enumerate() {
            local[old] = new;
        }
        let edges = ids
            .iter()
            .map(|&e| {
                let edge = &self.edges[e];
                (local[edge.source], local[edge.target], edge.motion, edge.weight)
            })
            .collect();
        Ok(Subgraph {
            graph: EpipolarGraph::with_weights(vertex_map.len(), edges)?,
            vertex_map,
            edge_map: ids,
        })
    }

    /// BFS spanning tree from vertex 0 with neighbors in ascending id order.
    ///
    /// Edge ids are returned in discovery order.
    pub fn spanning_tree(&self) -> Result<Vec<usize>> {
        let order: Vec<Vec<(usize, usize)>> = self.adjacency.clone();
        self.bfs_tree(0, &order)
    }

    /// BFS spanning tree with a random root and shuffled neighbor lists.
    pub fn random_spanning_tree<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<usize>> {
        if self.n == 0 {
            return Err(Error::Disconnected(0));
        }
        self.random_spanning_tree_with(TreeSearch::Breadth, rng)
    }

    /// Random root and neighbor order, then the chosen traversal.
    pub fn random_spanning_tree_with<R: Rng + ?Sized>(&self, search: TreeSearch, rng: &mut R) -> Result<Vec<usize>> {
        if self.n == 0 {
            return Err(Error::Disconnected(0));
        }
        let root = rng.random_range(0..self.n);
        let mut order = self.adjacency.clone();
        for list in &mut order {
            list.shuffle(rng);
        }
        match search {
            TreeSearch::Breadth => self.bfs_tree(root, &order),
            TreeSearch::Depth => self.dfs_tree(root, &order),
            TreeSearch::Uniform => self.wilson_tree(root, rng),
        }
    }

    fn wilson_tree<R: Rng + ?Sized>(&self, root: usize, rng: &mut R) -> Result<Vec<usize>> {
        let cc = self.component_count();
        if cc != 1 {
            return Err(Error::Disconnected(cc));
        }
        let mut in_tree = vec![false; self.n];
        // Last exit taken from each vertex: (neighbor, edge id).
        let mut next: Vec<Option<(usize, usize)>> = vec![None; self.n];
        in_tree[root] = true;
        let mut tree = Vec::with_capacity(self.n - 1);
        for start in 0..self.n {
            let mut v = start;
            while !in_tree[v] {
                let adj = &self.adjacency[v];
                let step = adj[rng.random_range(0..adj.len())];
                next[v] = Some(step);
                v = step.0;
            }
            let mut v = start;
            while !in_tree[v] {
                in_tree[v] = true;
                let (w, e) = next[v].expect("walk left v");
                tree.push(e);
                v = w;
            }
        }
        Ok(tree)
    }

    fn dfs_tree(&self, root: usize, order: &[Vec<(usize, usize)>]) -> Result<Vec<usize>> {
        let cc = self.component_count();
        if cc != 1 {
            return Err(Error::Disconnected(cc));
        }
        let mut seen = vec![false; self.n];
        let mut tree = Vec::with_capacity(self.n - 1);
        let mut stack = vec![(root, 0usize)];
        seen[root] = true;
        while let Some((v, next)) = stack.last_mut() {
            let v = *v;
            match order[v].get(*next) {
                Some(&(w, e)) => {
                    *next += 1;
                    if !seen[w] {
                        seen[w] = true;
                        tree.push(e);
                        stack.push((w, 0));
                    }
                }
                None => {
                    stack.pop();
                }
            }
        }
        Ok(tree)
    }

    fn bfs_tree(&self, root: usize, order: &[Vec<(usize, usize)>]) -> Result<Vec<usize>> {
        let cc = self.component_count();
        if self.n == 0 || cc != 1 {
            return Err(Error::Disconnected(cc));
        }
        let mut seen = vec![false; self.n];
        let mut tree = Vec::with_capacity(self.n - 1);
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(v) = queue.pop_front() {
            for &(w, e) in &order[v] {
                if !seen[w] {
                    seen[w] = true;
                    tree.push(e);
                    queue.push_back(w);
                }
            }
        }
        Ok(tree)
    }

    /// Checks that `tree` is a spanning tree of this (connected) graph.
    pub fn validate_spanning_tree(&self, tree: &[usize]) -> Result<()> {
        if self.n == 0 || tree.len() + 1 != self.n {
            return Err(Error::NotSpanningTree(format!(
                "expected {} edges, got {}",
                self.n.saturating_sub(1),
                tree.len()
            )));
        }
        let mut dsu = DisjointSets::new(self.n);
        for &e in tree {
            let edge = self.edge(e)?;
            if !dsu.union(edge.source, edge.target) {
                return Err(Error::NotSpanningTree(format!("edge {e} closes a cycle")));
            }
        }
        Ok(())
    }

    /// Shortest-path tree from `source`.
    ///
    /// Unweighted trees come from BFS with ascending neighbor order, which
    /// yields the lexicographically smallest vertex sequence among the
    /// shortest paths. Weighted trees use Dijkstra with the same tie rule.
    pub fn shortest_path_tree(&self, source: usize, weighted: bool) -> Result<ShortestPathTree<T>> {
        if source >= self.n {
            return Err(Error::VertexOutOfRange {
                vertex: source,
                n: self.n,
            });
        }
        if weighted {
            Ok(self.dijkstra(source))
        } else {
            Ok(self.bfs_paths(source))
        }
    }

    fn bfs_paths(&self, source: usize) -> ShortestPathTree<T> {
        let mut tree = ShortestPathTree::empty(source, self.n);
        let mut queue = VecDeque::from([source]);
        tree.hops[source] = 0;
        tree.length[source] = T::zero();
        while let Some(v) = queue.pop_front() {
            for &(w, e) in &self.adjacency[v] {
                if tree.hops[w] == usize::MAX {
                    tree.hops[w] = tree.hops[v] + 1;
                    tree.length[w] = tree.length[v] + T::one();
                    tree.parent[w] = Some((v, e));
                    queue.push_back(w);
                }
            }
        }
        tree
    }

    fn dijkstra(&self, source: usize) -> ShortestPathTree<T> {
        #[derive(PartialEq)]
        struct Item<T>(T, usize);
        impl<T: PartialOrd> Eq for Item<T> {}
        impl<T: PartialOrd> PartialOrd for Item<T> {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }
        impl<T: PartialOrd> Ord for Item<T> {
            fn cmp(&self, other: &Self) -> Ordering {
                other
                    .0
                    .partial_cmp(&self.0)
                    .unwrap_or(Ordering::Equal)
                    .then_with(|| other.1.cmp(&self.1))
            }
        }

        let mut tree = ShortestPathTree::empty(source, self.n);
        let mut done = vec![false; self.n];
        let mut heap = BinaryHeap::new();
        tree.hops[source] = 0;
        tree.length[source] = T::zero();
        heap.push(Item(T::zero(), source));
        while let Some(Item(d, v)) = heap.pop() {
            if done[v] || d > tree.length[v] {
                continue;
            }
            done[v] = true;
            for &(w, e) in &self.adjacency[v] {
                if done[w] {
                    continue;
                }
                let nd = d + self.edges[e].weight;
                let better = tree.hops[w] == usize::MAX
                    || nd < tree.length[w]
                    || (nd == tree.length[w] && {
                        let mut cand = tree.path_to(v);
                        cand.push(w);
                        cand < tree.path_to(w)
                    });
                if better {
                    tree.length[w] = nd;
                    tree.hops[w] = tree.hops[v] + 1;
                    tree.parent[w] = Some((v, e));
                    heap.push(Item(nd, w));
                }
            }
        }
        tree
    }

    /// Shortest paths between every pair of vertices.
    pub fn all_pairs_shortest_paths(&self, weighted: bool) -> Result<PathTable<T>> {
        let cc = self.component_count();
        if cc != 1 {
            return Err(Error::Disconnected(cc));
        }
        let trees = (0..self.n)
            .map(|v| self.shortest_path_tree(v, weighted))
            .collect::<Result<Vec<_>>>()?;
        Ok(PathTable { trees })
    }
}

/// A subgraph plus the maps back to the parent graph's ids.
#[derive(Debug, Clone)]
pub struct Subgraph<T: Scalar> {
    pub graph: EpipolarGraph<T>,
    /// Local vertex id → parent vertex id.
    pub vertex_map: Vec<usize>,
    /// Local edge id → parent edge id.
    pub edge_map: Vec<usize>,
}

/// Traversal used to grow a spanning tree.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreeSearch {
    /// Shallow trees; fundamental circuits stay short.
    #[default]
    Breadth,
    /// Deep trees; fundamental circuits grow long.
    Depth,
    /// Uniformly distributed over all spanning trees (Wilson's
    /// loop-erased random walks). The root is irrelevant.
    Uniform,
}

/// Single-source shortest paths stored as parent pointers.
#[derive(Debug, Clone)]
pub struct ShortestPathTree<T: Scalar> {
    pub source: usize,
    /// `(parent vertex, edge id)`; `None` at the source and unreachable vertices.
    pub parent: Vec<Option<(usize, usize)>>,
    /// Edge count of the tree path, `usize::MAX` if unreachable.
    pub hops: Vec<usize>,
    /// Weighted length of the tree path.
    pub length: Vec<T>,
}

impl<T: Scalar> ShortestPathTree<T> {
    fn empty(source: usize, n: usize) -> Self {
        Self {
            source,
            parent: vec![None; n],
            hops: vec![usize::MAX; n],
            length: vec![T::zero(); n],
        }
    }

    pub fn reachable(&self, v: usize) -> bool {
        self.hops[v] != usize::MAX
    }

    /// Vertex sequence from the source to `v` (empty if unreachable).
    pub fn path_to(&self, v: usize) -> Vec<usize> {
        if !self.reachable(v) {
            return Vec::new();
        }
        let mut path = vec![v];
        let mut cur = v;
        while let Some((p, _)) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }
}

/// All-pairs shortest paths, one tree per source vertex.
#[derive(Debug, Clone)]
pub struct PathTable<T: Scalar> {
    pub trees: Vec<ShortestPathTree<T>>,
}

impl<T: Scalar> PathTable<T> {
    /// `P(x, y)` as a vertex sequence starting at `x`.
    pub fn path(&self, x: usize, y: usize) -> Vec<usize> {
        self.trees[x].path_to(y)
    }

    pub fn hops(&self, x: usize, y: usize) -> usize {
        self.trees[x].hops[y]
    }

    pub fn length(&self, x: usize, y: usize) -> T {
        self.trees[x].length[y]
    }
}

/// One step of a circuit: edge id and whether it is walked along its
/// stored orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Traversal {
    pub edge: usize,
    pub forward: bool,
}

impl Traversal {
    /// `+1` along the stored orientation, `−1` against it.
    #[inline]
    pub fn sign(&self) -> i8 {
        if self.forward {
            1
        } else {
            -1
        }
    }
}

/// A closed walk `(i₁, …, i_N)` in which every vertex has degree two.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circuit {
    vertices: Vec<usize>,
    steps: Vec<Traversal>,
}

impl Circuit {
    /// Validates the vertex sequence against `graph` and derives the signed
    /// edge traversals, including the closing edge `i_N → i₁`.
    pub fn new<T: Scalar>(graph: &EpipolarGraph<T>, vertices: Vec<usize>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidCircuit(format!("length {n} < 3")));
        }
        let mut seen = vec![false; graph.n()];
        for &v in &vertices {
            if v >= graph.n() {
                return Err(Error::VertexOutOfRange {
                    vertex: v,
                    n: graph.n(),
                });
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidCircuit(format!("vertex {v} repeated")));
            }
        }
        let steps = (0..n)
            .map(|k| {
                let (a, b) = (vertices[k], vertices[(k + 1) % n]);
                graph
                    .edge_between(a, b)
                    .map(|(edge, forward)| Traversal { edge, forward })
                    .ok_or(Error::NotAdjacent(a, b))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { vertices, steps })
    }

    /// Orders an edge set that forms a single circuit into a closed walk
    /// starting at its smallest vertex, heading to the smaller neighbor.
    pub fn from_edges<T: Scalar>(graph: &EpipolarGraph<T>, edge_ids: &[usize]) -> Result<Self> {
        if edge_ids.len() < 3 {
            return Err(Error::InvalidCircuit(format!(
                "{} edges cannot form a circuit",
                edge_ids.len()
            )));
        }
        let mut incident: HashMap<usize, Vec<usize>> = HashMap::new();
        for &e in edge_ids {
            let edge = graph.edge(e)?;
            incident.entry(edge.source).or_default().push(edge.target);
            incident.entry(edge.target).or_default().push(edge.source);
        }
        if incident.values().any(|nb| nb.len() != 2) || incident.len() != edge_ids.len() {
            return Err(Error::InvalidCircuit(
                "edge set is not a single circuit".into(),
            ));
        }
        let start = *incident.keys().min().expect("non-empty");
        let mut vertices = vec![start];
        let mut prev = start;
        let mut cur = *incident[&start].iter().min().expect("degree two");
        while cur != start {
            vertices.push(cur);
            let nb = &incident[&cur];
            let next = if nb[0] == prev { nb[1] } else { nb[0] };
            prev = cur;
            cur = next;
        }
        if vertices.len() != edge_ids.len() {
            return Err(Error::InvalidCircuit("edge set is disconnected".into()));
        }
        Self::new(graph, vertices)
    }

    #[inline]
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    #[inline]
    pub fn steps(&self) -> &[Traversal] {
        &self.steps
    }

    /// Number of edges `N`.
    #[inline]
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Sum of edge weights.
    pub fn weighted_length<T: Scalar>(&self, graph: &EpipolarGraph<T>) -> T {
        self.steps
            .iter()
            .fold(T::zero(), |acc, s| acc + graph.edges()[s.edge].weight)
    }

    /// Sorted edge ids.
    pub fn edge_set(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self.steps.iter().map(|s| s.edge).collect();
        ids.sort_unstable();
        ids
    }

    /// The same circuit walked in the opposite cyclic order.
    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices[1..].reverse();
        let n = self.steps.len();
        let steps = (0..n)
            .map(|k| {
                let s = self.steps[n - 1 - k];
                Traversal {
                    edge: s.edge,
                    forward: !s.forward,
                }
            })
            .collect();
        Self { vertices, steps }
    }

    /// Product of the traversed rotations, `R_{12} R_{23} ⋯ R_{N1}`.
    pub fn rotation_product<T: Scalar>(&self, graph: &EpipolarGraph<T>) -> Rotation<T> {
        self.steps.iter().fold(Rotation::identity(), |acc, s| {
            acc * graph.edges()[s.edge].motion_along(s.forward).rotation
        })
    }

    /// Signed incidence: `(edge id, ±1)` per traversed edge.
    pub fn signed_indicator(&self) -> Vec<(usize, i8)> {
        self.steps.iter().map(|s| (s.edge, s.sign())).collect()
    }

    pub fn to_gf2(&self, m: usize) -> Gf2Vector {
        circuit_to_gf2(self, m)
    }
}

/// Bit vector over the edge ids of `circuit`.
pub fn circuit_to_gf2(circuit: &Circuit, m: usize) -> Gf2Vector {
    let mut v = Gf2Vector::zeros(m);
    for s in circuit.steps() {
        v.set(s.edge, true);
    }
    v
}

/// GF(2) sum of cycles.
pub fn cycle_sum(a: &Gf2Vector, b: &Gf2Vector) -> Gf2Vector {
    a ^ b
}

/// Result of the articulation-point and bridge decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiconnectivityReport {
    /// Ascending vertex ids.
    pub articulation_points: Vec<usize>,
    /// Ascending edge ids.
    pub bridges: Vec<usize>,
    /// Edge ids of each biconnected component, each list ascending.
    /// Bridges form single-edge components.
    pub components: Vec<Vec<usize>>,
    /// Index into `components` of the component with the most edges; ties
    /// go to the one with the smallest vertex id.
    pub largest: Option<usize>,
}

impl BiconnectivityReport {
    pub fn largest_component(&self) -> Option<&[usize]> {
        self.largest.map(|i| self.components[i].as_slice())
    }

    /// The largest biconnected component as a standalone graph.
    pub fn largest_subgraph<T: Scalar>(&self, graph: &EpipolarGraph<T>) -> Option<Result<Subgraph<T>>> {
        self.largest_component().map(|ids| graph.edge_subgraph(ids))
    }
}

fn biconnectivity<T: Scalar>(g: &EpipolarGraph<T>) -> BiconnectivityReport {
    const NONE: usize = usize::MAX;
    struct Frame {
        v: usize,
        parent_edge: usize,
        next: usize,
    }

    let n = g.n();
    let mut disc = vec![NONE; n];
    let mut low = vec![0usize; n];
    let mut is_cut = vec![false; n];
    let mut bridges = Vec::new();
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut edge_stack: Vec<usize> = Vec::new();
    let mut timer = 0;

    for root in 0..n {
        if disc[root] != NONE {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        let mut root_children = 0;
        let mut stack = vec![Frame {
            v: root,
            parent_edge: NONE,
            next: 0,
        }];
        while let Some(frame) = stack.last_mut() {
            let v = frame.v;
            if let Some(&(w, e)) = g.neighbors(v).get(frame.next) {
                frame.next += 1;
                if e == frame.parent_edge {
                    continue;
                }
                if disc[w] == NONE {
                    edge_stack.push(e);
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push(Frame {
                        v: w,
                        parent_edge: e,
                        next: 0,
                    });
                } else if disc[w] < disc[v] {
                    edge_stack.push(e);
                    low[v] = low[v].min(disc[w]);
                }
                continue;
            }
            let (child, via) = (v, frame.parent_edge);
            stack.pop();
            let Some(parent) = stack.last() else { break };
            let u = parent.v;
            low[u] = low[u].min(low[child]);
            if low[child] >= disc[u] {
                if u == root {
                    root_children += 1;
                } else {
                    is_cut[u] = true;
                }
                let mut comp = Vec::new();
                while let Some(top) = edge_stack.pop() {
                    comp.push(top);
                    if top == via {
                        break;
                    }
                }
                comp.sort_unstable();
                components.push(comp);
            }
            if low[child] > disc[u] {
                bridges.push(via);
            }
        }
        if root_children > 1 {
            is_cut[root] = true;
        }
    }

    bridges.sort_unstable();
    let min_vertex = |comp: &Vec<usize>| {
        comp.iter()
            .map(|&e| g.edges()[e].source.min(g.edges()[e].target))
            .min()
            .unwrap_or(NONE)
    };
    let largest = components
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| {
            a.len()
                .cmp(&b.len())
                .then_with(|| min_vertex(b).cmp(&min_vertex(a)))
        })
        .map(|(i, _)| i);
    BiconnectivityReport {
        articulation_points: (0..n).filter(|&v| is_cut[v]).collect(),
        bridges,
        components,
        largest,
    }
}

pub(crate) struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn topo(n: usize, pairs: &[(usize, usize)]) -> EpipolarGraph<f64> {
        EpipolarGraph::from_pairs(n, pairs).unwrap()
    }

    pub(crate) fn triangle() -> EpipolarGraph<f64> {
        topo(3, &[(0, 1), (1, 2), (2, 0)])
    }

    /// Seven-vertex graph with labels 1..7 mapped to ids 0..6: the union of
    /// the circuits (1,6,2), (2,6,7), (2,7,3), (1,2,3,4,5).
    pub(crate) fn five_circuit_graph() -> EpipolarGraph<f64> {
        topo(
            7,
            &[
                (0, 5),
                (5, 1),
                (1, 0),
                (5, 6),
                (6, 1),
                (6, 2),
                (2, 1),
                (2, 3),
                (3, 4),
                (4, 0),
            ],
        )
    }

    /// Two triangles (1,2,3) and (2,4,5) sharing vertex 2, labels − 1.
    pub(crate) fn bowtie() -> EpipolarGraph<f64> {
        topo(5, &[(0, 1), (1, 2), (2, 0), (1, 3), (3, 4), (4, 1)])
    }

    pub(crate) fn random_connected(n: usize, p: f64, rng: &mut ChaCha8Rng) -> EpipolarGraph<f64> {
        loop {
            let mut pairs = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random::<f64>() < p {
                        pairs.push((i, j));
                    }
                }
            }
            let g = topo(n, &pairs);
            if g.is_connected() {
                return g;
            }
        }
    }

    #[test]
    fn build_errors() {
        let l = RelativeMotion::new(Rotation::<f64>::identity(), UnitVector3::x_axis());
        assert_eq!(
            EpipolarGraph::new(3, vec![(0, 1, l), (1, 0, l)]).unwrap_err(),
            Error::DuplicateEdge(1, 0)
        );
        assert_eq!(
            EpipolarGraph::new(3, vec![(1, 1, l)]).unwrap_err(),
            Error::SelfLoop(1)
        );
        assert_eq!(
            EpipolarGraph::new(3, vec![(0, 3, l)]).unwrap_err(),
            Error::VertexOutOfRange { vertex: 3, n: 3 }
        );
        assert_eq!(
            EpipolarGraph::with_weights(3, vec![(0, 1, l, 0.0)]).unwrap_err(),
            Error::NonPositiveWeight
        );
    }

    #[test]
    fn edge_lookup_reports_orientation() {
        let g = triangle();
        assert_eq!(g.m(), 3);
        assert_eq!(g.edge_between(0, 1), Some((0, true)));
        assert_eq!(g.edge_between(1, 0), Some((0, false)));
        assert_eq!(g.edge_between(0, 2), Some((2, false)));
        let g = five_circuit_graph();
        assert_eq!((g.n(), g.m()), (7, 10));
    }

    #[test]
    fn cycle_space_dimensions() {
        assert_eq!(triangle().cycle_space_dimension(), 1);
        assert_eq!(five_circuit_graph().cycle_space_dimension(), 4);
        let forest = topo(6, &[(0, 1), (1, 2), (3, 4)]);
        assert_eq!(forest.component_count(), 3);
        assert_eq!(forest.cycle_space_dimension(), 0);
        assert_eq!(bowtie().cycle_space_dimension(), 2);
    }

    #[test]
    fn counting_condition_arithmetic() {
        let k4 = topo(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert!(k4.satisfies_counting_condition());
        // n = 5 needs m ≥ 5.5, i.e. six edges.
        let c5 = topo(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert!(!c5.satisfies_counting_condition());
    }

    #[test]
    fn biconnectivity_of_named_graphs() {
        let r = bowtie().biconnectivity();
        assert_eq!(r.articulation_points, vec![1]);
        assert!(r.bridges.is_empty());
        assert_eq!(r.components.len(), 2);
        assert!(!bowtie().is_biconnected());

        let r = triangle().biconnectivity();
        assert!(r.articulation_points.is_empty() && r.bridges.is_empty());
        assert_eq!(r.components, vec![vec![0, 1, 2]]);
        assert!(triangle().is_biconnected());

        let path = topo(4, &[(0, 1), (1, 2), (2, 3)]);
        let r = path.biconnectivity();
        assert_eq!(r.articulation_points, vec![1, 2]);
        assert_eq!(r.bridges, vec![0, 1, 2]);
        assert_eq!(r.components.len(), 3);

        assert!(five_circuit_graph().is_biconnected());
    }

    #[test]
    fn largest_component_tie_breaks_on_smallest_vertex() {
        // Triangle {3,4,5} listed first, triangle {0,1,2} second, bridge 2–3.
        let g = topo(6, &[(3, 4), (4, 5), (5, 3), (0, 1), (1, 2), (2, 0), (2, 3)]);
        let r = g.biconnectivity();
        assert_eq!(r.articulation_points, vec![2, 3]);
        assert_eq!(r.bridges, vec![6]);
        assert_eq!(r.largest_component(), Some(&[3usize, 4, 5][..]));
        let sub = r.largest_subgraph(&g).unwrap().unwrap();
        assert_eq!(sub.vertex_map, vec![0, 1, 2]);
        assert!(sub.graph.is_biconnected());
    }

    fn brute_force_cut_vertices(g: &EpipolarGraph<f64>) -> Vec<usize> {
        let base = g.component_count();
        (0..g.n())
            .filter(|&v| {
                let pairs: Vec<_> = g
                    .edges()
                    .iter()
                    .filter(|e| e.source != v && e.target != v)
                    .map(|e| {
                        let f = |x: usize| if x > v { x - 1 } else { x };
                        (f(e.source), f(e.target))
                    })
                    .collect();
                topo(g.n() - 1, &pairs).component_count() > base
            })
            .collect()
    }

    fn brute_force_bridges(g: &EpipolarGraph<f64>) -> Vec<usize> {
        let base = g.component_count();
        (0..g.m())
            .filter(|&e| {
                let pairs: Vec<_> = g
                    .edges()
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != e)
                    .map(|(_, x)| (x.source, x.target))
                    .collect();
                topo(g.n(), &pairs).component_count() > base
            })
            .collect()
    }

    #[test]
    fn tarjan_matches_brute_force_removal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..60 {
            let n = 3 + trial % 9;
            let g = random_connected(n, 0.3, &mut rng);
            let r = g.biconnectivity();
            assert_eq!(r.articulation_points, brute_force_cut_vertices(&g));
            assert_eq!(r.bridges, brute_force_bridges(&g));
            let total: usize = r.components.iter().map(Vec::len).sum();
            assert_eq!(total, g.m());
            for comp in &r.components {
                if comp.len() >= 3 {
                    let sub = g.edge_subgraph(comp).unwrap();
                    assert!(sub.graph.is_biconnected());
                    assert!(sub.graph.biconnectivity().bridges.is_empty());
                }
            }
        }
    }

    #[test]
    fn spanning_trees() {
        assert_eq!(triangle().spanning_tree().unwrap(), vec![0, 2]);
        let path = topo(4, &[(0, 1), (1, 2), (2, 3)]);
        let mut t = path.spanning_tree().unwrap();
        t.sort_unstable();
        assert_eq!(t, vec![0, 1, 2]);
        let disconnected = topo(4, &[(0, 1), (2, 3)]);
        assert_eq!(disconnected.spanning_tree(), Err(Error::Disconnected(2)));

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let g = random_connected(9, 0.4, &mut rng);
            let t = g.spanning_tree().unwrap();
            g.validate_spanning_tree(&t).unwrap();
            for search in [TreeSearch::Breadth, TreeSearch::Depth, TreeSearch::Uniform] {
                let t = g.random_spanning_tree_with(search, &mut rng).unwrap();
                g.validate_spanning_tree(&t).unwrap();
            }
        }
    }

    #[test]
    fn depth_first_trees_on_complete_graphs_are_paths() {
        let pairs: Vec<_> = (0..6).flat_map(|i| (i + 1..6).map(move |j| (i, j))).collect();
        let g = topo(6, &pairs);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let t = g.random_spanning_tree_with(TreeSearch::Depth, &mut rng).unwrap();
            let mut deg = [0; 6];
            for &e in &t {
                let (a, b) = g.edge(e).unwrap().endpoints();
                deg[a] += 1;
                deg[b] += 1;
            }
            assert!(deg.iter().all(|&d| d <= 2));
        }
    }

    #[test]
    fn uniform_trees_hit_all_sixteen_trees_of_k4_evenly() {
        // Cayley: K4 has 4^2 = 16 spanning trees.
        let g = topo(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
        let draws = 16_000;
        for _ in 0..draws {
            let mut t = g.random_spanning_tree_with(TreeSearch::Uniform, &mut rng).unwrap();
            t.sort_unstable();
            *counts.entry(t).or_default() += 1;
        }
        assert_eq!(counts.len(), 16);
        for &c in counts.values() {
            assert!((800..1200).contains(&c), "{c}");
        }
    }

    #[test]
    fn rejects_non_spanning_trees() {
        let g = topo(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]);
        assert!(g.validate_spanning_tree(&[0, 1, 2]).is_err());
        assert!(g.validate_spanning_tree(&[0, 1]).is_err());
        assert!(g.validate_spanning_tree(&[0, 1, 3]).is_ok());
    }

    #[test]
    fn shortest_paths_small_cases() {
        let path = topo(4, &[(0, 1), (1, 2), (2, 3)]);
        let table = path.all_pairs_shortest_paths(false).unwrap();
        assert_eq!(table.path(0, 3), vec![0, 1, 2, 3]);
        assert_eq!(table.path(3, 0), vec![3, 2, 1, 0]);
        assert_eq!(table.path(1, 2), vec![1, 2]);
        // Square: two shortest paths 0-1-2 and 0-3-2; lexicographic picks 0-1-2.
        let square = topo(4, &[(0, 3), (3, 2), (2, 1), (1, 0)]);
        let t = square.all_pairs_shortest_paths(false).unwrap();
        assert_eq!(t.path(0, 2), vec![0, 1, 2]);
        let w = square.all_pairs_shortest_paths(true).unwrap();
        assert_eq!(w.path(0, 2), vec![0, 1, 2]);
        assert!(topo(3, &[(0, 1)]).all_pairs_shortest_paths(false).is_err());
    }

    fn brute_force_distances(g: &EpipolarGraph<f64>, s: usize) -> Vec<usize> {
        // Bellman-Ford style relaxation on hop counts.
        let mut d = vec![usize::MAX; g.n()];
        d[s] = 0;
        for _ in 0..g.n() {
            for e in g.edges() {
                let (a, b) = e.endpoints();
                if d[a] != usize::MAX {
                    d[b] = d[b].min(d[a] + 1);
                }
                if d[b] != usize::MAX {
                    d[a] = d[a].min(d[b] + 1);
                }
            }
        }
        d
    }

    #[test]
    fn shortest_paths_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let g = random_connected(10, 0.3, &mut rng);
            let table = g.all_pairs_shortest_paths(false).unwrap();
            let weighted = g.all_pairs_shortest_paths(true).unwrap();
            for s in 0..g.n() {
                let d = brute_force_distances(&g, s);
                for t in 0..g.n() {
                    let p = table.path(s, t);
                    assert_eq!(p.len() - 1, d[t]);
                    assert_eq!(weighted.path(s, t), p);
                    for w in p.windows(2) {
                        assert!(g.edge_between(w[0], w[1]).is_some());
                    }
                }
            }
        }
    }

    #[test]
    fn circuit_validation_and_signs() {
        let g = triangle();
        let c = Circuit::new(&g, vec![0, 1, 2]).unwrap();
        assert_eq!(c.signed_indicator(), vec![(0, 1), (1, 1), (2, 1)]);
        let r = c.reversed();
        assert_eq!(r.vertices(), &[0, 2, 1]);
        assert_eq!(r.signed_indicator(), vec![(2, -1), (1, -1), (0, -1)]);
        assert_eq!(Circuit::new(&g, vec![0, 2, 1]).unwrap(), r);
        assert!(Circuit::new(&g, vec![0, 1]).is_err());
        assert!(Circuit::new(&g, vec![0, 1, 0]).is_err());
        let path = topo(3, &[(0, 1), (1, 2)]);
        assert_eq!(
            Circuit::new(&path, vec![0, 1, 2]).unwrap_err(),
            Error::NotAdjacent(2, 0)
        );
        assert_eq!(Circuit::from_edges(&g, &[2, 0, 1]).unwrap(), c);
        let g = five_circuit_graph();
        assert!(Circuit::from_edges(&g, &[0, 1, 2, 3]).is_err());
    }

    #[test]
    fn gf2_cycle_sums() {
        let g = topo(4, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 0)]);
        let c1 = Circuit::new(&g, vec![0, 1, 2]).unwrap().to_gf2(g.m());
        let c2 = Circuit::new(&g, vec![0, 2, 3]).unwrap().to_gf2(g.m());
        let outer = Circuit::new(&g, vec![0, 1, 2, 3]).unwrap().to_gf2(g.m());
        assert!(cycle_sum(&c1, &c1).is_zero());
        assert_eq!(cycle_sum(&c1, &Gf2Vector::zeros(g.m())), c1);
        // The shared chord 0–2 vanishes.
        assert_eq!(cycle_sum(&c1, &c2), outer);
        assert_eq!(outer.count_ones(), 4);
    }
}
