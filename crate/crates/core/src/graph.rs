//! Undirected simple graphs, Laplacians, and composite-graph assembly.
//!
//! Nodes are dense `0..node_count` indices. A composite graph is assembled by
//! concatenating its subgraphs in list order: local node `k` of subgraph `i`
//! becomes global node `offset(i) + k`, so the Laplacian of the union is
//! literally block diagonal plus the connecting-edge Laplacian.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("node {node} out of range for graph with {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },
    #[error("graph must have at least one node")]
    Empty,
    #[error("label count {labels} does not match node count {nodes}")]
    LabelCount { labels: usize, nodes: usize },
    #[error("subgraph {0} out of range")]
    SubgraphOutOfRange(usize),
    #[error("connecting edge {0} joins a subgraph to itself")]
    IntraSubgraphConnection(usize),
    #[error("connecting edge {edge} endpoint ({subgraph}, {node}) is not the bridge node of its subgraph")]
    NotABridge { edge: usize, subgraph: usize, node: usize },
    #[error("expected {expected} bridge nodes, got {got}")]
    BridgeCount { expected: usize, got: usize },
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("empty size range")]
    EmptyRange,
    #[error("no connected graph after {attempts} attempts (seed {seed})")]
    GenerationFailed { attempts: usize, seed: u64 },
    #[error("stubbornness value {value} at node {node} is negative or not finite")]
    InvalidStubbornness { node: usize, value: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// An undirected edge stored with `u < v`; ordering is lexicographic on
/// `(min endpoint, max endpoint)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    u: usize,
    v: usize,
}

impl Edge {
    pub fn new(a: usize, b: usize) -> Result<Self, GraphError> {
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        Ok(Edge { u: a.min(b), v: a.max(b) })
    }

    pub fn u(&self) -> usize {
        self.u
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn endpoints(&self) -> (usize, usize) {
        (self.u, self.v)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.u, self.v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    node_count: usize,
    edges: BTreeSet<Edge>,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Graph with `node_count` nodes and no edges.
    pub fn empty(node_count: usize) -> Result<Self, GraphError> {
        if node_count == 0 {
            return Err(GraphError::Empty);
        }
        Ok(Graph { node_count, edges: BTreeSet::new(), labels: None })
    }

    /// Builds a graph from endpoint pairs. Duplicate pairs (in either
    /// orientation) collapse to one edge.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::empty(node_count)?;
        for (a, b) in edges {
            let e = g.check_edge(a, b)?;
            g.edges.insert(e);
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Result<Self, GraphError> {
        Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    pub fn path(n: usize) -> Result<Self, GraphError> {
        Graph::from_edges(n, (1..n).map(|v| (v - 1, v)))
    }

    /// Cycle on `n >= 3` nodes; smaller `n` degrades to a path.
    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        if n >= 3 {
            edges.push((n - 1, 0));
        }
        Graph::from_edges(n, edges)
    }

    /// Star with hub 0 and `n - 1` leaves.
    pub fn star(n: usize) -> Result<Self, GraphError> {
        Graph::from_edges(n, (1..n).map(|v| (0, v)))
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, GraphError> {
        if labels.len() != self.node_count {
            return Err(GraphError::LabelCount { labels: labels.len(), nodes: self.node_count });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Returns a new graph with the given edges added.
    pub fn with_edges<I>(&self, edges: I) -> Result<Graph, GraphError>
    where
        I: IntoIterator<Item = Edge>,
    {
        let mut g = self.clone();
        for e in edges {
            g.check_edge(e.u, e.v)?;
            g.edges.insert(e);
        }
        Ok(g)
    }

    fn check_edge(&self, a: usize, b: usize) -> Result<Edge, GraphError> {
        for node in [a, b] {
            if node >= self.node_count {
                return Err(GraphError::NodeOutOfRange { node, node_count: self.node_count });
            }
        }
        Edge::new(a, b)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        Edge::new(a, b).map(|e| self.edges.contains(&e)).unwrap_or(false)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Display name of a node: its label if present, else its index.
    pub fn label(&self, node: usize) -> String {
        match &self.labels {
            Some(l) => l[node].clone(),
            None => node.to_string(),
        }
    }

    pub fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.node_count];
        for e in &self.edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg
    }

    /// Connected components as sorted node lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency_lists();
        let mut seen = vec![false; self.node_count];
        let mut out = Vec::new();
        for start in 0..self.node_count {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for &y in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                        queue.push_back(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Hop distances from `source`; `None` for unreachable nodes.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let adj = self.adjacency_lists();
        let mut dist = vec![None; self.node_count];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x].unwrap_or(0);
            for &y in &adj[x] {
                if dist[y].is_none() {
                    dist[y] = Some(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Connected and exactly `n - 1` edges.
    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.node_count && self.is_connected()
    }

    /// `L = D - A` with unit edge weights.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.node_count, self.node_count);
        for e in &self.edges {
            add_edge_laplacian(&mut l, *e, 1.0);
        }
        l
    }

    /// Serializes to the edge-list text format: a `nodes N` header followed
    /// by one `u v` line per edge, 0-based.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("nodes {}\n", self.node_count);
        for e in &self.edges {
            s.push_str(&format!("{} {}\n", e.u, e.v));
        }
        s
    }

    /// Parses the edge-list format. Blank lines and `#` comments are skipped.
    pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
        let mut graph: Option<Graph> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| GraphError::Parse { line: line_no, message };
            let mut fields = line.split_whitespace();
            match &mut graph {
                None => {
                    let (Some("nodes"), Some(count), None) = (fields.next(), fields.next(), fields.next())
                    else {
                        return Err(parse_err("expected header `nodes N`".into()));
                    };
                    let n = usize::from_str(count)
                        .map_err(|_| parse_err(format!("invalid node count `{count}`")))?;
                    graph = Some(Graph::empty(n).map_err(|e| parse_err(e.to_string()))?);
                }
                Some(g) => {
                    let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
                        return Err(parse_err(format!("expected `u v`, got `{line}`")));
                    };
                    let a = usize::from_str(a).map_err(|_| parse_err(format!("invalid node `{a}`")))?;
                    let b = usize::from_str(b).map_err(|_| parse_err(format!("invalid node `{b}`")))?;
                    let e = g.check_edge(a, b).map_err(|e| parse_err(e.to_string()))?;
                    g.edges.insert(e);
                }
            }
        }
        graph.ok_or(GraphError::Parse { line: 0, message: "missing `nodes N` header".into() })
    }
}

pub(crate) fn add_edge_laplacian(l: &mut DMatrix<f64>, e: Edge, weight: f64) {
    l[(e.u, e.u)] += weight;
    l[(e.v, e.v)] += weight;
    l[(e.u, e.v)] -= weight;
    l[(e.v, e.u)] -= weight;
}

/// Laplacian of the single edge `e` on `n` nodes: `b bᵀ` with
/// `b = 1_u - 1_v`.
pub fn edge_laplacian(n: usize, a: usize, b: usize) -> Result<DMatrix<f64>, GraphError> {
    let e = Edge::new(a, b)?;
    if e.v >= n {
        return Err(GraphError::NodeOutOfRange { node: e.v, node_count: n });
    }
    let mut l = DMatrix::zeros(n, n);
    add_edge_laplacian(&mut l, e, 1.0);
    Ok(l)
}

/// Maps global nodes to the subgraph they came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    offsets: Vec<usize>,
    membership: Vec<usize>,
}

impl Partition {
    pub fn from_sizes(sizes: &[usize]) -> Result<Self, GraphError> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(GraphError::Empty);
        }
        let mut offsets = Vec::with_capacity(sizes.len() + 1);
        let mut membership = Vec::new();
        offsets.push(0);
        for (i, &s) in sizes.iter().enumerate() {
            membership.extend(std::iter::repeat_n(i, s));
            offsets.push(offsets[i] + s);
        }
        Ok(Partition { offsets, membership })
    }

    /// Single block covering all `n` nodes.
    pub fn trivial(n: usize) -> Result<Self, GraphError> {
        Partition::from_sizes(&[n])
    }

    pub fn subgraph_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn node_count(&self) -> usize {
        self.membership.len()
    }

    pub fn size(&self, subgraph: usize) -> usize {
        self.offsets[subgraph + 1] - self.offsets[subgraph]
    }

    pub fn sizes(&self) -> Vec<usize> {
        (0..self.subgraph_count()).map(|i| self.size(i)).collect()
    }

    pub fn offset(&self, subgraph: usize) -> usize {
        self.offsets[subgraph]
    }

    pub fn subgraph_of(&self, node: usize) -> usize {
        self.membership[node]
    }

    pub fn nodes(&self, subgraph: usize) -> std::ops::Range<usize> {
        self.offsets[subgraph]..self.offsets[subgraph + 1]
    }

    pub fn global(&self, subgraph: usize, local: usize) -> Result<usize, GraphError> {
        if subgraph >= self.subgraph_count() {
            return Err(GraphError::SubgraphOutOfRange(subgraph));
        }
        if local >= self.size(subgraph) {
            return Err(GraphError::NodeOutOfRange { node: local, node_count: self.size(subgraph) });
        }
        Ok(self.offsets[subgraph] + local)
    }
}

/// A node addressed by `(subgraph, local index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeRef {
    pub subgraph: usize,
    pub node: usize,
}

impl NodeRef {
    pub fn new(subgraph: usize, node: usize) -> Self {
        NodeRef { subgraph, node }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompositeSpec {
    pub subgraphs: Vec<Graph>,
    /// One bridge node (local index) per subgraph. When set, every
    /// connecting edge must join bridge nodes.
    pub bridge_nodes: Option<Vec<usize>>,
    pub connecting_edges: Vec<(NodeRef, NodeRef)>,
}

/// Parses `i:u-j:v` (subgraph:node pairs).
fn parse_connection(token: &str) -> Option<(NodeRef, NodeRef)> {
    let (a, b) = token.split_once('-')?;
    let node = |s: &str| -> Option<NodeRef> {
        let (i, u) = s.split_once(':')?;
        Some(NodeRef::new(i.trim().parse().ok()?, u.trim().parse().ok()?))
    };
    Some((node(a)?, node(b)?))
}

fn parse_pair(token: &str) -> Option<(usize, usize)> {
    let (a, b) = token.split_once('-')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

impl CompositeSpec {
    /// Key-value text form:
    ///
    /// ```text
    /// subgraph.0.nodes = 3
    /// subgraph.0.edges = 0-1 1-2
    /// subgraph.1.nodes = 2
    /// subgraph.1.edges = 0-1
    /// bridges = 1 0        # optional
    /// connect = 0:1-1:0    # subgraph:node pairs
    /// ```
    pub fn to_config(&self) -> String {
        let mut s = String::new();
        for (i, g) in self.subgraphs.iter().enumerate() {
            let edges: Vec<String> = g.edges().map(|e| format!("{}-{}", e.u, e.v)).collect();
            s.push_str(&format!("subgraph.{i}.nodes = {}\n", g.node_count()));
            s.push_str(&format!("subgraph.{i}.edges = {}\n", edges.join(" ")));
        }
        if let Some(b) = &self.bridge_nodes {
            let b: Vec<String> = b.iter().map(usize::to_string).collect();
            s.push_str(&format!("bridges = {}\n", b.join(" ")));
        }
        let c: Vec<String> = self
            .connecting_edges
            .iter()
            .map(|(a, b)| format!("{}:{}-{}:{}", a.subgraph, a.node, b.subgraph, b.node))
            .collect();
        s.push_str(&format!("connect = {}\n", c.join(" ")));
        s
    }

    pub fn parse_config(text: &str) -> Result<Self, GraphError> {
        let mut nodes: Vec<Option<usize>> = Vec::new();
        let mut edges: Vec<Vec<(usize, usize)>> = Vec::new();
        let mut edge_lines: Vec<usize> = Vec::new();
        let mut bridges = None;
        let mut connecting = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| GraphError::Parse { line: line_no, message };
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            if let Some(rest) = key.strip_prefix("subgraph.") {
                let (i, field) = rest.split_once('.').ok_or_else(|| err(format!("bad key `{key}`")))?;
                let i: usize = i.parse().map_err(|_| err(format!("bad subgraph index in `{key}`")))?;
                if nodes.len() <= i {
                    nodes.resize(i + 1, None);
                    edges.resize(i + 1, Vec::new());
                    edge_lines.resize(i + 1, line_no);
                }
                match field {
                    "nodes" => nodes[i] = Some(value.parse().map_err(|_| err(format!("bad node count `{value}`")))?),
                    "edges" => {
                        edge_lines[i] = line_no;
                        for tok in value.split_whitespace() {
                            edges[i].push(parse_pair(tok).ok_or_else(|| err(format!("bad edge `{tok}`")))?);
                        }
                    }
                    other => return Err(err(format!("unknown field `{other}`"))),
                }
            } else if key == "bridges" {
                let b = value
                    .split_whitespace()
                    .map(|t| t.parse::<usize>().map_err(|_| err(format!("bad bridge `{t}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                bridges = Some(b);
            } else if key == "connect" {
                for tok in value.split_whitespace() {
                    connecting.push(parse_connection(tok).ok_or_else(|| err(format!("bad connection `{tok}`")))?);
                }
            } else {
                return Err(err(format!("unknown key `{key}`")));
            }
        }
        let mut subgraphs = Vec::with_capacity(nodes.len());
        for (i, n) in nodes.into_iter().enumerate() {
            let n = n.ok_or(GraphError::Parse { line: 0, message: format!("subgraph {i} has no `nodes`") })?;
            let g = Graph::from_edges(n, edges[i].iter().copied())
                .map_err(|e| GraphError::Parse { line: edge_lines[i], message: e.to_string() })?;
            subgraphs.push(g);
        }
        let spec = CompositeSpec { subgraphs, bridge_nodes: bridges, connecting_edges: connecting };
        spec.validate()?;
        Ok(spec)
    }
}

/// Output of [`assemble`]: the union graph plus its node partition.
#[derive(Debug, Clone, PartialEq)]
pub struct Composite {
    pub graph: Graph,
    pub partition: Partition,
}

impl CompositeSpec {
    pub fn new(subgraphs: Vec<Graph>) -> Self {
        CompositeSpec { subgraphs, bridge_nodes: None, connecting_edges: Vec::new() }
    }

    /// Bridge-node composite: `backbone` edges are pairs of subgraph indices,
    /// realized as edges between the respective bridge nodes.
    pub fn with_backbone(
        subgraphs: Vec<Graph>,
        bridge_nodes: Vec<usize>,
        backbone: &[(usize, usize)],
    ) -> Result<Self, GraphError> {
        let connecting_edges = backbone
            .iter()
            .map(|&(i, j)| {
                let bi = *bridge_nodes.get(i).ok_or(GraphError::SubgraphOutOfRange(i))?;
                let bj = *bridge_nodes.get(j).ok_or(GraphError::SubgraphOutOfRange(j))?;
                Ok((NodeRef::new(i, bi), NodeRef::new(j, bj)))
            })
            .collect::<Result<Vec<_>, GraphError>>()?;
        let spec = CompositeSpec { subgraphs, bridge_nodes: Some(bridge_nodes), connecting_edges };
        spec.validate()?;
        Ok(spec)
    }

    pub fn partition(&self) -> Result<Partition, GraphError> {
        let sizes: Vec<usize> = self.subgraphs.iter().map(Graph::node_count).collect();
        Partition::from_sizes(&sizes)
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        let partition = self.partition()?;
        if let Some(bridges) = &self.bridge_nodes {
            if bridges.len() != self.subgraphs.len() {
                return Err(GraphError::BridgeCount { expected: self.subgraphs.len(), got: bridges.len() });
            }
            for (i, &b) in bridges.iter().enumerate() {
                partition.global(i, b)?;
            }
        }
        for (idx, (a, b)) in self.connecting_edges.iter().enumerate() {
            partition.global(a.subgraph, a.node)?;
            partition.global(b.subgraph, b.node)?;
            if a.subgraph == b.subgraph {
                return Err(GraphError::IntraSubgraphConnection(idx));
            }
            if let Some(bridges) = &self.bridge_nodes {
                for end in [a, b] {
                    if bridges[end.subgraph] != end.node {
                        return Err(GraphError::NotABridge {
                            edge: idx,
                            subgraph: end.subgraph,
                            node: end.node,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Concatenates the subgraphs in list order and adds the connecting edges.
pub fn assemble(spec: &CompositeSpec) -> Result<Composite, GraphError> {
    spec.validate()?;
    let partition = spec.partition()?;
    let mut edges = Vec::new();
    for (i, g) in spec.subgraphs.iter().enumerate() {
        let off = partition.offset(i);
        edges.extend(g.edges().map(|e| (e.u + off, e.v + off)));
    }
    for (a, b) in &spec.connecting_edges {
        edges.push((partition.global(a.subgraph, a.node)?, partition.global(b.subgraph, b.node)?));
    }
    let mut graph = Graph::from_edges(partition.node_count(), edges)?;
    if spec.subgraphs.iter().all(|g| g.labels().is_some()) {
        let labels = spec.subgraphs.iter().flat_map(|g| g.labels().unwrap_or(&[]).iter().cloned()).collect();
        graph = graph.with_labels(labels)?;
    }
    Ok(Composite { graph, partition })
}

/// Per-node stubbornness `d_j >= 0`, the diagonal of `D` in `Q = L + D`.
#[derive(Debug, Clone, PartialEq)]
pub struct StubbornnessProfile {
    values: Vec<f64>,
}

impl StubbornnessProfile {
    pub fn new(values: Vec<f64>) -> Result<Self, GraphError> {
        if let Some((node, &value)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(GraphError::InvalidStubbornness { node, value });
        }
        Ok(StubbornnessProfile { values })
    }

    /// `D = I`.
    pub fn identity(n: usize) -> Self {
        StubbornnessProfile { values: vec![1.0; n] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// True when every subgraph of `partition` has a strictly positive entry.
    pub fn is_valid_for(&self, partition: &Partition) -> bool {
        self.values.len() == partition.node_count()
            && (0..partition.subgraph_count())
                .all(|i| partition.nodes(i).any(|j| self.values[j] > 0.0))
    }

    /// Key-value text: `nodes = N`, optional `default = x`, optional
    /// `values = v0 v1 ...`, and per-node overrides `d.<i> = x`.
    pub fn to_config(&self) -> String {
        let vals: Vec<String> = self.values.iter().map(|v| format!("{v}")).collect();
        format!("nodes = {}\nvalues = {}\n", self.values.len(), vals.join(" "))
    }

    pub fn parse_config(text: &str) -> Result<Self, GraphError> {
        let mut nodes: Option<usize> = None;
        let mut default = 0.0;
        let mut list: Option<(usize, Vec<f64>)> = None;
        let mut overrides = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| GraphError::Parse { line: line_no, message };
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let num = |s: &str| f64::from_str(s).map_err(|_| err(format!("invalid number `{s}`")));
            match key {
                "nodes" => {
                    nodes = Some(usize::from_str(value).map_err(|_| err(format!("invalid node count `{value}`")))?)
                }
                "default" => default = num(value)?,
                "values" => {
                    let parsed = value
                        .split(|c: char| c == ',' || c.is_whitespace())
                        .filter(|s| !s.is_empty())
                        .map(num)
                        .collect::<Result<Vec<_>, _>>()?;
                    list = Some((line_no, parsed));
                }
                k if k.starts_with("d.") => {
                    let node = usize::from_str(&k[2..]).map_err(|_| err(format!("invalid node key `{k}`")))?;
                    overrides.push((line_no, node, num(value)?));
                }
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        let n = match (nodes, &list) {
            (Some(n), _) => n,
            (None, Some((_, v))) => v.len(),
            (None, None) => return Err(GraphError::Parse { line: 0, message: "missing `nodes`".into() }),
        };
        let mut values = vec![default; n];
        if let Some((line, v)) = list {
            if v.len() != n {
                return Err(GraphError::Parse {
                    line,
                    message: format!("expected {n} values, got {}", v.len()),
                });
            }
            values = v;
        }
        for (line, node, value) in overrides {
            if node >= n {
                return Err(GraphError::Parse { line, message: format!("node {node} out of range") });
            }
            values[node] = value;
        }
        StubbornnessProfile::new(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_g1() -> Graph {
        Graph::path(3).unwrap()
    }

    fn example_g2() -> Graph {
        Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2)]).unwrap()
    }

    #[test]
    fn k2_laplacian() {
        let l = Graph::complete(2).unwrap().laplacian();
        assert_eq!(l, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn empty_graph_laplacian_is_zero() {
        assert_eq!(Graph::empty(3).unwrap().laplacian(), DMatrix::zeros(3, 3));
    }

    #[test]
    fn second_example_subgraph_laplacian() {
        let l = example_g2().laplacian();
        let diag: Vec<f64> = l.diagonal().iter().copied().collect();
        assert_eq!(diag, vec![3.0, 2.0, 2.0, 1.0]);
        for (a, b) in [(0, 1), (0, 2), (0, 3), (1, 2)] {
            assert_eq!(l[(a, b)], -1.0);
            assert_eq!(l[(b, a)], -1.0);
        }
        assert_eq!(l[(1, 3)], 0.0);
        assert_eq!(l[(2, 3)], 0.0);
    }

    #[test]
    fn edge_laplacian_entries() {
        let l = edge_laplacian(2, 0, 1).unwrap();
        assert_eq!(l, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
        let l = edge_laplacian(3, 2, 0).unwrap();
        let mut expected = DMatrix::zeros(3, 3);
        expected[(0, 0)] = 1.0;
        expected[(2, 2)] = 1.0;
        expected[(0, 2)] = -1.0;
        expected[(2, 0)] = -1.0;
        assert_eq!(l, expected);
    }

    #[test]
    fn edge_laplacian_spectrum() {
        let l = edge_laplacian(5, 1, 3).unwrap();
        let mut eig: Vec<f64> = l.symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        assert!((eig[4] - 2.0).abs() < 1e-12);
        assert!(eig[..4].iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn edge_laplacian_rejects_bad_edges() {
        assert_eq!(edge_laplacian(3, 1, 1), Err(GraphError::SelfLoop(1)));
        assert!(matches!(edge_laplacian(3, 0, 3), Err(GraphError::NodeOutOfRange { .. })));
    }

    #[test]
    fn edges_are_unordered() {
        let g = Graph::from_edges(3, [(0, 1), (1, 0), (2, 1)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert!(g.has_edge(1, 2) && g.has_edge(2, 1));
        assert_eq!(Graph::from_edges(2, [(0, 0)]), Err(GraphError::SelfLoop(0)));
        assert!(Graph::from_edges(2, [(0, 2)]).is_err());
    }

    #[test]
    fn assemble_worked_example() {
        // G1 = 1-2-3, G2 on {4..7}; bridge 2 -- 4.
        let spec = CompositeSpec::with_backbone(vec![example_g1(), example_g2()], vec![1, 0], &[(0, 1)]).unwrap();
        let c = assemble(&spec).unwrap();
        let expected =
            Graph::from_edges(7, [(0, 1), (1, 2), (3, 4), (3, 5), (3, 6), (4, 5), (1, 3)]).unwrap();
        assert_eq!(c.graph, expected);
        assert_eq!(c.partition.sizes(), vec![3, 4]);
        assert_eq!(c.partition.global(1, 2).unwrap(), 5);
        assert_eq!(c.partition.subgraph_of(3), 1);
    }

    #[test]
    fn assemble_trivial_cases() {
        let g = Graph::cycle(5).unwrap();
        let c = assemble(&CompositeSpec::new(vec![g.clone()])).unwrap();
        assert_eq!(c.graph, g);

        let k1 = Graph::empty(1).unwrap();
        let mut spec = CompositeSpec::new(vec![k1.clone(), k1]);
        spec.connecting_edges.push((NodeRef::new(0, 0), NodeRef::new(1, 0)));
        assert_eq!(assemble(&spec).unwrap().graph, Graph::complete(2).unwrap());
    }

    #[test]
    fn assemble_rejects_invalid_connections() {
        let mut spec = CompositeSpec::new(vec![example_g1(), example_g2()]);
        spec.connecting_edges.push((NodeRef::new(0, 0), NodeRef::new(1, 9)));
        assert!(matches!(assemble(&spec), Err(GraphError::NodeOutOfRange { .. })));

        spec.connecting_edges = vec![(NodeRef::new(0, 0), NodeRef::new(0, 2))];
        assert_eq!(assemble(&spec), Err(GraphError::IntraSubgraphConnection(0)));

        spec.connecting_edges = vec![(NodeRef::new(0, 0), NodeRef::new(1, 0))];
        spec.bridge_nodes = Some(vec![1, 0]);
        assert!(matches!(assemble(&spec), Err(GraphError::NotABridge { subgraph: 0, node: 0, .. })));
    }

    #[test]
    fn assembled_laplacian_decomposes() {
        let spec = CompositeSpec::with_backbone(vec![example_g1(), example_g2()], vec![1, 0], &[(0, 1)]).unwrap();
        let c = assemble(&spec).unwrap();
        let mut block = DMatrix::zeros(7, 7);
        block.view_mut((0, 0), (3, 3)).copy_from(&example_g1().laplacian());
        block.view_mut((3, 3), (4, 4)).copy_from(&example_g2().laplacian());
        assert_eq!(c.graph.laplacian(), block + edge_laplacian(7, 1, 3).unwrap());
    }

    #[test]
    fn components_and_distances() {
        let g = Graph::from_edges(5, [(0, 1), (3, 4)]).unwrap();
        assert_eq!(g.components(), vec![vec![0, 1], vec![2], vec![3, 4]]);
        assert!(!g.is_connected());
        let p = Graph::path(4).unwrap();
        assert_eq!(p.bfs_distances(0), vec![Some(0), Some(1), Some(2), Some(3)]);
        assert!(p.is_tree());
        assert!(!Graph::cycle(4).unwrap().is_tree());
    }

    #[test]
    fn edge_list_format() {
        let g = example_g2();
        let text = g.to_edge_list();
        assert!(text.starts_with("nodes 4\n0 1\n"));
        assert_eq!(Graph::parse_edge_list(&text).unwrap(), g);

        let parsed = Graph::parse_edge_list("# comment\nnodes 3\n\n0 1 # trailing\n2 1\n").unwrap();
        assert_eq!(parsed, Graph::path(3).unwrap());

        let err = Graph::parse_edge_list("nodes 3\n0 1\n1 1\n").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 3, .. }));
        assert!(matches!(Graph::parse_edge_list("0 1\n"), Err(GraphError::Parse { line: 1, .. })));
        assert!(matches!(Graph::parse_edge_list(""), Err(GraphError::Parse { line: 0, .. })));
    }

    #[test]
    fn composite_config_format() {
        let spec = CompositeSpec::with_backbone(vec![example_g1(), example_g2()], vec![1, 0], &[(0, 1)]).unwrap();
        let text = spec.to_config();
        assert!(text.contains("connect = 0:1-1:0"));
        assert_eq!(CompositeSpec::parse_config(&text).unwrap(), spec);
        let err = CompositeSpec::parse_config("subgraph.0.nodes = 2\nsubgraph.0.edges = 0-2\n").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 2, .. }));
        assert!(CompositeSpec::parse_config("subgraph.0.nodes = 2\nconnect = 0:0-0:1\n").is_err());
    }

    #[test]
    fn profile_config_format() {
        let p = StubbornnessProfile::parse_config("nodes = 4\ndefault = 1\nd.2 = 0\n").unwrap();
        assert_eq!(p.values(), &[1.0, 1.0, 0.0, 1.0]);
        let p = StubbornnessProfile::parse_config("values = 0.5, 0 2").unwrap();
        assert_eq!(p.values(), &[0.5, 0.0, 2.0]);
        assert_eq!(StubbornnessProfile::parse_config(&p.to_config()).unwrap(), p);
        assert!(matches!(
            StubbornnessProfile::parse_config("nodes = 2\nvalues = 1\n"),
            Err(GraphError::Parse { line: 2, .. })
        ));
        assert!(StubbornnessProfile::parse_config("values = -1").is_err());
    }

    #[test]
    fn profile_validity_per_subgraph() {
        let part = Partition::from_sizes(&[2, 2]).unwrap();
        assert!(StubbornnessProfile::new(vec![0.0, 1.0, 0.3, 0.0]).unwrap().is_valid_for(&part));
        assert!(!StubbornnessProfile::new(vec![0.0, 0.0, 0.3, 0.0]).unwrap().is_valid_for(&part));
        assert!(StubbornnessProfile::identity(4).is_valid_for(&part));
    }
}
