//! Undirected simple graphs and the structural primitives the game needs:
//! connected components, cut-vertices, block-cut decompositions and
//! (component) centroids.
//!
//! Ties are always broken towards the lowest node id so that every result is
//! reproducible.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type NodeSet = BTreeSet<NodeId>;

const NONE: usize = usize::MAX;

/// Undirected graph on nodes `0..node_count` without self-loops or parallel
/// edges. Adjacency lists are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    adj: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl Graph {
    pub fn new(node_count: usize) -> Self {
        Self {
            adj: vec![Vec::new(); node_count],
            edge_count: 0,
        }
    }

    /// Builds a graph from an edge list. Repeated pairs collapse into one edge.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut g = Self::new(node_count);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Inserts `{u, v}`; returns `false` if the edge was already present.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<bool> {
        let node_count = self.node_count();
        for node in [u, v] {
            if node >= node_count {
                return Err(Error::NodeOutOfRange { node, node_count });
            }
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => Ok(false),
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                self.edge_count += 1;
                Ok(true)
            }
        }
    }

    /// Removes `{u, v}`; returns `false` if it was absent.
    pub fn remove_edge(&mut self, u: NodeId, v: NodeId) -> bool {
        if u >= self.node_count() || v >= self.node_count() {
            return false;
        }
        match self.adj[u].binary_search(&v) {
            Ok(pos) => {
                self.adj[u].remove(pos);
                let pos = self.adj[v].binary_search(&u).expect("symmetric adjacency");
                self.adj[v].remove(pos);
                self.edge_count -= 1;
                true
            }
            Err(_) => false,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u < self.node_count() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Number of edges with both endpoints in `nodes`.
    pub fn edges_within(&self, nodes: &NodeSet) -> usize {
        nodes
            .iter()
            .map(|&u| self.adj[u].iter().filter(|&&v| u < v && nodes.contains(&v)).count())
            .sum()
    }
}

/// Labelling of nodes by connected component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentPartition {
    /// Component id per node; ids are assigned in order of lowest member.
    pub component_of: Vec<usize>,
    pub sizes: Vec<usize>,
}

impl ComponentPartition {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn size_of(&self, v: NodeId) -> usize {
        self.sizes[self.component_of[v]]
    }

    pub fn members(&self) -> Vec<Vec<NodeId>> {
        let mut out = vec![Vec::new(); self.sizes.len()];
        for (v, &c) in self.component_of.iter().enumerate() {
            out[c].push(v);
        }
        out
    }
}

pub fn connected_components(g: &Graph) -> ComponentPartition {
    let labels = components_excluding(g, &vec![false; g.node_count()]);
    ComponentPartition {
        component_of: labels.component_of,
        sizes: labels.sizes,
    }
}

/// Components of `g` after deleting the nodes flagged in `removed`.
///
/// Removed nodes get the label [`Removed::LABEL`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Removed {
    pub component_of: Vec<usize>,
    pub sizes: Vec<usize>,
}

impl Removed {
    pub const LABEL: usize = NONE;

    /// Size of `v`'s component, 0 if `v` was removed.
    pub fn size_of(&self, v: NodeId) -> usize {
        match self.component_of[v] {
            NONE => 0,
            c => self.sizes[c],
        }
    }
}

pub fn components_excluding(g: &Graph, removed: &[bool]) -> Removed {
    let n = g.node_count();
    let mut component_of = vec![NONE; n];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if removed[start] || component_of[start] != NONE {
            continue;
        }
        let id = sizes.len();
        component_of[start] = id;
        queue.push_back(start);
        let mut size = 0;
        while let Some(v) = queue.pop_front() {
            size += 1;
            for &w in g.neighbors(v) {
                if !removed[w] && component_of[w] == NONE {
                    component_of[w] = id;
                    queue.push_back(w);
                }
            }
        }
        sizes.push(size);
    }
    Removed {
        component_of,
        sizes,
    }
}

/// Components of the subgraph induced by `keep`, each sorted, ordered by
/// lowest member.
pub fn induced_components(g: &Graph, keep: &[bool]) -> Vec<Vec<NodeId>> {
    let removed: Vec<bool> = keep.iter().map(|k| !k).collect();
    let labels = components_excluding(g, &removed);
    let mut out = vec![Vec::new(); labels.sizes.len()];
    for (v, &c) in labels.component_of.iter().enumerate() {
        if c != NONE {
            out[c].push(v);
        }
    }
    out
}

/// Block-cut decomposition of a graph.
///
/// Isolated nodes form singleton blocks so that every node belongs to some
/// block. `tree_edges` holds `(cut_vertex, block_index)` incidences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockCutTree {
    pub blocks: Vec<NodeSet>,
    pub cut_vertices: NodeSet,
    pub tree_edges: Vec<(NodeId, usize)>,
}

impl BlockCutTree {
    /// Indices of the blocks containing `v`.
    pub fn blocks_of(&self, v: NodeId) -> Vec<usize> {
        (0..self.blocks.len())
            .filter(|&b| self.blocks[b].contains(&v))
            .collect()
    }

    /// Cut-vertices on the tree path between two blocks, in path order, or
    /// `None` if the blocks lie in different trees of the forest.
    pub fn path_cut_vertices(&self, from: usize, to: usize) -> Option<Vec<NodeId>> {
        let cuts: Vec<NodeId> = self.cut_vertices.iter().copied().collect();
        let blocks = self.blocks.len();
        // forest nodes: blocks first, then cut-vertices by rank
        let total = blocks + cuts.len();
        let mut adj = vec![Vec::new(); total];
        for &(c, b) in &self.tree_edges {
            let ci = blocks + cuts.binary_search(&c).expect("cut vertex");
            adj[b].push(ci);
            adj[ci].push(b);
        }
        let mut parent = vec![NONE; total];
        let mut seen = vec![false; total];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(x) = queue.pop_front() {
            if x == to {
                break;
            }
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = x;
                    queue.push_back(y);
                }
            }
        }
        if !seen[to] {
            return None;
        }
        let mut path = Vec::new();
        let mut x = to;
        while x != from {
            if x >= blocks {
                path.push(cuts[x - blocks]);
            }
            x = parent[x];
        }
        path.reverse();
        Some(path)
    }
}

struct Frame {
    v: NodeId,
    parent: NodeId,
    next: usize,
}

/// Hopcroft–Tarjan over every connected component, iterative.
fn biconnected(g: &Graph) -> (Vec<NodeSet>, NodeSet) {
    let n = g.node_count();
    let mut disc = vec![NONE; n];
    let mut low = vec![0usize; n];
    let mut clock = 0;
    let mut blocks = Vec::new();
    let mut cuts = NodeSet::new();
    let mut edge_stack: Vec<(NodeId, NodeId)> = Vec::new();

    for root in 0..n {
        if disc[root] != NONE {
            continue;
        }
        disc[root] = clock;
        low[root] = clock;
        clock += 1;
        if g.degree(root) == 0 {
            blocks.push(NodeSet::from([root]));
            continue;
        }
        let mut root_children = 0;
        let mut stack = vec![Frame {
            v: root,
            parent: NONE,
            next: 0,
        }];
        while let Some(frame) = stack.last_mut() {
            let v = frame.v;
            if frame.next < g.degree(v) {
                let w = g.neighbors(v)[frame.next];
                frame.next += 1;
                if disc[w] == NONE {
                    edge_stack.push((v, w));
                    disc[w] = clock;
                    low[w] = clock;
                    clock += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push(Frame {
                        v: w,
                        parent: v,
                        next: 0,
                    });
                } else if w != frame.parent && disc[w] < disc[v] {
                    edge_stack.push((v, w));
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                let parent = frame.parent;
                stack.pop();
                if parent == NONE {
                    continue;
                }
                low[parent] = low[parent].min(low[v]);
                if low[v] >= disc[parent] {
                    if parent != root {
                        cuts.insert(parent);
                    }
                    let mut block = NodeSet::new();
                    while let Some((a, b)) = edge_stack.pop() {
                        block.insert(a);
                        block.insert(b);
                        if (a, b) == (parent, v) {
                            break;
                        }
                    }
                    blocks.push(block);
                }
            }
        }
        if root_children >= 2 {
            cuts.insert(root);
        }
    }
    blocks.sort_by_key(|b| b.iter().copied().collect::<Vec<_>>());
    (blocks, cuts)
}

/// Nodes whose removal strictly increases the number of components.
pub fn cut_vertices(g: &Graph) -> NodeSet {
    biconnected(g).1
}

pub fn block_cut_tree(g: &Graph) -> BlockCutTree {
    let (blocks, cut_vertices) = biconnected(g);
    let mut tree_edges = Vec::new();
    for (b, block) in blocks.iter().enumerate() {
        for &c in block.intersection(&cut_vertices) {
            tree_edges.push((c, b));
        }
    }
    tree_edges.sort_unstable();
    BlockCutTree {
        blocks,
        cut_vertices,
        tree_edges,
    }
}

/// Lowest-id centroid of a tree given by local adjacency lists.
fn centroid_of_tree(adj: &[Vec<usize>]) -> usize {
    let n = adj.len();
    let mut parent = vec![NONE; n];
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    let mut subtree = vec![1usize; n];
    let mut heaviest_child = vec![0usize; n];
    for &v in order.iter().rev() {
        let p = parent[v];
        if p != NONE {
            subtree[p] += subtree[v];
            heaviest_child[p] = heaviest_child[p].max(subtree[v]);
        }
    }
    (0..n)
        .find(|&v| 2 * heaviest_child[v].max(n - subtree[v]) <= n)
        .expect("every tree has a centroid")
}

/// Lowest-id node whose removal leaves only pieces of size at most `n/2`.
pub fn tree_centroid(g: &Graph) -> Result<NodeId> {
    let n = g.node_count();
    if n == 0 || g.edge_count() + 1 != n || connected_components(g).count() != 1 {
        return Err(Error::NotATree);
    }
    let adj: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v).to_vec()).collect();
    Ok(centroid_of_tree(&adj))
}

fn validate_component(g: &Graph, component: &NodeSet) -> Result<()> {
    let Some(&first) = component.iter().next() else {
        return Err(Error::EmptyComponent);
    };
    if let Some(&v) = component.iter().find(|&&v| v >= g.node_count()) {
        return Err(Error::NodeOutOfRange {
            node: v,
            node_count: g.node_count(),
        });
    }
    let labels = connected_components(g);
    let id = labels.component_of[first];
    if labels.sizes[id] != component.len() || component.iter().any(|&v| labels.component_of[v] != id) {
        return Err(Error::NotAComponent);
    }
    Ok(())
}

/// Checks the component-centroid property of `c`: with `c` immunized, every
/// vulnerable region of the component leaves `c` in a component holding at
/// least half of the component's nodes.
pub fn is_centroid(g: &Graph, immunized: &NodeSet, component: &NodeSet, c: NodeId) -> Result<bool> {
    if !component.contains(&c) {
        return Err(Error::OutsideComponent(c));
    }
    validate_component(g, component)?;
    Ok(centroid_holds(g, immunized, component, c))
}

fn centroid_holds(g: &Graph, immunized: &NodeSet, component: &NodeSet, c: NodeId) -> bool {
    let n = g.node_count();
    let mut vulnerable = vec![false; n];
    for &v in component {
        vulnerable[v] = v != c && !immunized.contains(&v);
    }
    let total = component.len();
    induced_components(g, &vulnerable).into_iter().all(|region| {
        let mut removed = vec![false; n];
        for &v in &region {
            removed[v] = true;
        }
        2 * components_excluding(g, &removed).size_of(c) >= total
    })
}

/// Centroid of a connected component, built from a spanning tree that
/// contains a spanning tree of every vulnerable region as a subtree.
///
/// The tree is grown by lowest-id BFS inside each vulnerable region, then
/// completed with the remaining edges in lexicographic order. When the tree
/// centroid fails [`is_centroid`] (possible only if some region is not an
/// induced tree) the lowest-id node passing the check is returned instead.
pub fn component_centroid(g: &Graph, immunized: &NodeSet, component: &NodeSet) -> Result<NodeId> {
    validate_component(g, component)?;
    let nodes: Vec<NodeId> = component.iter().copied().collect();
    let local = |v: NodeId| nodes.binary_search(&v).expect("member of component");
    let k = nodes.len();

    let mut uf = UnionFind::new(k);
    let mut tree = vec![Vec::new(); k];
    let link = |uf: &mut UnionFind, tree: &mut Vec<Vec<usize>>, a: usize, b: usize| {
        if uf.union(a, b) {
            tree[a].push(b);
            tree[b].push(a);
        }
    };

    let mut vulnerable = vec![false; g.node_count()];
    for &v in component {
        vulnerable[v] = !immunized.contains(&v);
    }
    for region in induced_components(g, &vulnerable) {
        let mut seen = NodeSet::from([region[0]]);
        let mut queue = VecDeque::from([region[0]]);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if vulnerable[w] && seen.insert(w) {
                    link(&mut uf, &mut tree, local(v), local(w));
                    queue.push_back(w);
                }
            }
        }
    }
    for &u in &nodes {
        for &v in g.neighbors(u) {
            if u < v {
                link(&mut uf, &mut tree, local(u), local(v));
            }
        }
    }

    let candidate = nodes[centroid_of_tree(&tree)];
    if centroid_holds(g, immunized, component, candidate) {
        return Ok(candidate);
    }
    nodes
        .iter()
        .copied()
        .find(|&c| centroid_holds(g, immunized, component, c))
        .ok_or(Error::NoCentroid)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}
