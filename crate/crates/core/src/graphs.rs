//! Graph carriers shared by every other module, plus the plain-text edge-list format.
//!
//! All vertex indices are 0-based and contiguous. Adjacency lists are kept sorted; with
//! `multi = true` parallel edges are stored by repetition.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range (bound {bound})")]
    VertexOutOfRange { vertex: usize, bound: usize },
    #[error("duplicate edge {{{u}, {v}}} in a simple graph")]
    DuplicateEdge { u: usize, v: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate vertex {0} in vertex set")]
    DuplicateVertex(usize),
    #[error("invalid tripartite base: {0}")]
    InvalidTripartite(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: malformed edge line")]
    MalformedEdge { line: usize },
    #[error("line {line}: vertex {vertex} out of range (bound {bound})")]
    VertexOutOfRange { line: usize, vertex: usize, bound: usize },
    #[error("line {line}: duplicate edge {{{u}, {v}}} in a simple graph")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("line {line}: self-loop at vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("{section}: header declares {expected} edges, found {found}")]
    EdgeCountMismatch { section: String, expected: usize, found: usize },
    #[error("line {line}: edge outside of a #E1/#E2 section")]
    MissingSection { line: usize },
    #[error("empty input")]
    Empty,
    #[error("invalid structure: {0}")]
    Structure(String),
    #[error("io error: {0}")]
    Io(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Whole,
}

/// Undirected graph with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    multi: bool,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self { adj: vec![Vec::new(); n], multi: false }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)], multi: bool) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, bound: n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
        }
        if !multi {
            for (u, list) in adj.iter().enumerate() {
                if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                    let (a, b) = if u < w[0] { (u, w[0]) } else { (w[0], u) };
                    return Err(GraphError::DuplicateEdge { u: a, v: b });
                }
            }
        }
        Ok(Self { adj, multi })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_multi(&self) -> bool {
        self.multi
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Number of parallel copies of `{u, v}`.
    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        let list = &self.adj[u];
        let lo = list.partition_point(|&w| w < v);
        let hi = list.partition_point(|&w| w <= v);
        hi - lo
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order, repeated per multiplicity.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m());
        for (u, list) in self.adj.iter().enumerate() {
            out.extend(list.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    /// Rank of edge `{u, v}` in the order of [`Graph::edges`]. Simple graphs only.
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        if !self.has_edge(a, b) {
            return None;
        }
        let before: usize = (0..a)
            .map(|w| self.adj[w].iter().filter(|&&x| x > w).count())
            .sum();
        let within = self.adj[a].iter().filter(|&&x| x > a && x < b).count();
        Some(before + within)
    }

    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first().map_or(0, Vec::len);
        self.adj.iter().all(|l| l.len() == d).then_some(d)
    }

    pub fn is_forest(&self) -> bool {
        let comps = self.components().len();
        self.m() + comps == self.n()
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut stack = vec![s];
            let mut comp = Vec::new();
            while let Some(u) = stack.pop() {
                comp.push(u);
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n() <= 1 || self.components().len() == 1
    }
}

/// Bipartite graph with left part `0..n_left` and right part `0..n_right`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    n_left: usize,
    n_right: usize,
    adj_left: Vec<Vec<usize>>,
    adj_right: Vec<Vec<usize>>,
    multi: bool,
}

impl BipartiteGraph {
    pub fn empty(n_left: usize, n_right: usize) -> Self {
        Self {
            n_left,
            n_right,
            adj_left: vec![Vec::new(); n_left],
            adj_right: vec![Vec::new(); n_right],
            multi: false,
        }
    }

    /// Builds from `(left, right)` pairs.
    pub fn from_edges(
        n_left: usize,
        n_right: usize,
        edges: &[(usize, usize)],
        multi: bool,
    ) -> Result<Self, GraphError> {
        let mut adj_left = vec![Vec::new(); n_left];
        let mut adj_right = vec![Vec::new(); n_right];
        for &(l, r) in edges {
            if l >= n_left {
                return Err(GraphError::VertexOutOfRange { vertex: l, bound: n_left });
            }
            if r >= n_right {
                return Err(GraphError::VertexOutOfRange { vertex: r, bound: n_right });
            }
            adj_left[l].push(r);
            adj_right[r].push(l);
        }
        adj_left.iter_mut().for_each(|l| l.sort_unstable());
        adj_right.iter_mut().for_each(|l| l.sort_unstable());
        if !multi {
            for (l, list) in adj_left.iter().enumerate() {
                if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                    return Err(GraphError::DuplicateEdge { u: l, v: w[0] });
                }
            }
        }
        Ok(Self { n_left, n_right, adj_left, adj_right, multi })
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    pub fn n(&self) -> usize {
        self.n_left + self.n_right
    }

    pub fn m(&self) -> usize {
        self.adj_left.iter().map(Vec::len).sum()
    }

    pub fn is_multi(&self) -> bool {
        self.multi
    }

    pub fn left_neighbors(&self, l: usize) -> &[usize] {
        &self.adj_left[l]
    }

    pub fn right_neighbors(&self, r: usize) -> &[usize] {
        &self.adj_right[r]
    }

    pub fn has_edge(&self, l: usize, r: usize) -> bool {
        l < self.n_left && self.adj_left[l].binary_search(&r).is_ok()
    }

    /// `(left, right)` pairs sorted lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adj_left
            .iter()
            .enumerate()
            .flat_map(|(l, list)| list.iter().map(move |&r| (l, r)))
            .collect()
    }

    /// True iff every left vertex has degree `d1` and every right vertex degree `d2`.
    pub fn validate_biregular(&self, d1: usize, d2: usize) -> bool {
        self.adj_left.iter().all(|l| l.len() == d1) && self.adj_right.iter().all(|r| r.len() == d2)
    }

    /// `(left degree, right degree)` when the graph is biregular.
    pub fn biregular_degrees(&self) -> Option<(usize, usize)> {
        let d1 = self.adj_left.first().map_or(0, Vec::len);
        let d2 = self.adj_right.first().map_or(0, Vec::len);
        self.validate_biregular(d1, d2).then_some((d1, d2))
    }

    /// Whole-graph view: left vertex `l` becomes `l`, right vertex `r` becomes `n_left + r`.
    pub fn to_graph(&self) -> Graph {
        let mut adj = Vec::with_capacity(self.n());
        for list in &self.adj_left {
            adj.push(list.iter().map(|&r| r + self.n_left).collect());
        }
        for list in &self.adj_right {
            adj.push(list.clone());
        }
        Graph { adj, multi: self.multi }
    }

    /// Converts a side-tagged set to whole-graph indices.
    pub fn whole_indices(&self, s: &VertexSet) -> Vec<usize> {
        match s.side {
            Side::Left | Side::Whole => s.members.clone(),
            Side::Right => s.members.iter().map(|&r| r + self.n_left).collect(),
        }
    }

    /// Bipartite subgraph induced by `left ∪ right`, with relabeling maps (new → old).
    pub fn induced(&self, left: &[usize], right: &[usize]) -> (BipartiteGraph, Vec<usize>, Vec<usize>) {
        let mut rmap = vec![usize::MAX; self.n_right];
        for (i, &r) in right.iter().enumerate() {
            rmap[r] = i;
        }
        let mut edges = Vec::new();
        for (i, &l) in left.iter().enumerate() {
            for &r in &self.adj_left[l] {
                if rmap[r] != usize::MAX {
                    edges.push((i, rmap[r]));
                }
            }
        }
        let sub = BipartiteGraph::from_edges(left.len(), right.len(), &edges, self.multi)
            .expect("induced subgraph of a valid graph");
        (sub, left.to_vec(), right.to_vec())
    }
}

/// A subset of one side of a bipartite graph, or of a whole graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSet {
    pub side: Side,
    pub members: Vec<usize>,
}

impl VertexSet {
    /// Sorts `members`; rejects duplicates and indices `>= bound`.
    pub fn new(side: Side, mut members: Vec<usize>, bound: usize) -> Result<Self, GraphError> {
        members.sort_unstable();
        if let Some(w) = members.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateVertex(w[0]));
        }
        if let Some(&v) = members.iter().find(|&&v| v >= bound) {
            return Err(GraphError::VertexOutOfRange { vertex: v, bound });
        }
        Ok(Self { side, members })
    }

    pub fn whole(members: Vec<usize>, bound: usize) -> Result<Self, GraphError> {
        Self::new(Side::Whole, members, bound)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Returns `G[S]` and the map from new labels to original vertices.
pub fn induced_subgraph(g: &Graph, s: &[usize]) -> Result<(Graph, Vec<usize>), GraphError> {
    let n = g.n();
    let mut map = vec![usize::MAX; n];
    for (i, &v) in s.iter().enumerate() {
        if v >= n {
            return Err(GraphError::VertexOutOfRange { vertex: v, bound: n });
        }
        if map[v] != usize::MAX {
            return Err(GraphError::DuplicateVertex(v));
        }
        map[v] = i;
    }
    let mut adj = vec![Vec::new(); s.len()];
    for (i, &v) in s.iter().enumerate() {
        adj[i] = g.adj[v].iter().filter(|&&w| map[w] != usize::MAX).map(|&w| map[w]).collect();
        adj[i].sort_unstable();
    }
    Ok((Graph { adj, multi: g.multi }, s.to_vec()))
}

/// Per-middle-vertex neighbor orderings of a tripartite base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MiddleOrder {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

/// Tripartite graph `L ∪ M ∪ R`: `g1` on `L × M` and `g2` on `M × R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripartiteBase {
    pub g1: BipartiteGraph,
    pub g2: BipartiteGraph,
    pub middle_order: Vec<MiddleOrder>,
}

impl TripartiteBase {
    /// Without explicit orders, each middle vertex lists its neighbors in ascending order.
    pub fn new(
        g1: BipartiteGraph,
        g2: BipartiteGraph,
        middle_order: Option<Vec<MiddleOrder>>,
    ) -> Result<Self, GraphError> {
        if g1.n_right() != g2.n_left() {
            return Err(GraphError::InvalidTripartite(format!(
                "middle sizes differ: {} vs {}",
                g1.n_right(),
                g2.n_left()
            )));
        }
        let nm = g1.n_right();
        let order = match middle_order {
            Some(o) => o,
            None => (0..nm)
                .map(|v| MiddleOrder {
                    left: g1.right_neighbors(v).to_vec(),
                    right: g2.left_neighbors(v).to_vec(),
                })
                .collect(),
        };
        if order.len() != nm {
            return Err(GraphError::InvalidTripartite("one ordering per middle vertex".into()));
        }
        for (v, o) in order.iter().enumerate() {
            let mut l = o.left.clone();
            l.sort_unstable();
            let mut r = o.right.clone();
            r.sort_unstable();
            if l != g1.right_neighbors(v) || r != g2.left_neighbors(v) {
                return Err(GraphError::InvalidTripartite(format!(
                    "ordering at middle vertex {v} is not a permutation of its neighbors"
                )));
            }
        }
        Ok(Self { g1, g2, middle_order: order })
    }

    pub fn n_left(&self) -> usize {
        self.g1.n_left()
    }

    pub fn n_middle(&self) -> usize {
        self.g1.n_right()
    }

    pub fn n_right(&self) -> usize {
        self.g2.n_right()
    }
}

/// Any of the three file kinds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphFile {
    Graph(Graph),
    Bipartite(BipartiteGraph),
    Tripartite(TripartiteBase),
}

impl GraphFile {
    pub fn kind(&self) -> &'static str {
        match self {
            GraphFile::Graph(_) => "graph",
            GraphFile::Bipartite(_) => "bipartite",
            GraphFile::Tripartite(_) => "tripartite",
        }
    }

    /// Whole-graph view (tripartite bases flatten to `L ∪ M ∪ R`).
    pub fn as_graph(&self) -> Graph {
        match self {
            GraphFile::Graph(g) => g.clone(),
            GraphFile::Bipartite(b) => b.to_graph(),
            GraphFile::Tripartite(t) => {
                let (nl, nm) = (t.n_left(), t.n_middle());
                let mut edges: Vec<(usize, usize)> =
                    t.g1.edges().into_iter().map(|(l, m)| (l, nl + m)).collect();
                edges.extend(t.g2.edges().into_iter().map(|(m, r)| (nl + m, nl + nm + r)));
                Graph::from_edges(nl + nm + t.n_right(), &edges, t.g1.is_multi() || t.g2.is_multi())
                    .expect("valid tripartite flattening")
            }
        }
    }
}

pub fn format_graph(g: &Graph) -> String {
    let mut s = format!("graph {} {}{}\n", g.n(), g.m(), if g.multi { " multi" } else { "" });
    for (u, v) in g.edges() {
        let _ = writeln!(s, "{u} {v}");
    }
    s
}

pub fn format_bipartite(b: &BipartiteGraph) -> String {
    let mut s = format!(
        "bipartite {} {} {}{}\n",
        b.n_left,
        b.n_right,
        b.m(),
        if b.multi { " multi" } else { "" }
    );
    for (l, r) in b.edges() {
        let _ = writeln!(s, "{l} {r}");
    }
    s
}

/// Edges are emitted grouped by middle vertex in `middle_order`, which is how the reader
/// recovers the orderings.
pub fn format_tripartite(t: &TripartiteBase) -> String {
    let multi = t.g1.is_multi() || t.g2.is_multi();
    let mut s = format!(
        "tripartite {} {} {} {} {}{}\n#E1\n",
        t.n_left(),
        t.n_middle(),
        t.n_right(),
        t.g1.m(),
        t.g2.m(),
        if multi { " multi" } else { "" }
    );
    for (m, o) in t.middle_order.iter().enumerate() {
        for &l in &o.left {
            let _ = writeln!(s, "{l} {m}");
        }
    }
    s.push_str("#E2\n");
    for (m, o) in t.middle_order.iter().enumerate() {
        for &r in &o.right {
            let _ = writeln!(s, "{m} {r}");
        }
    }
    s
}

pub fn format_graph_file(f: &GraphFile) -> String {
    match f {
        GraphFile::Graph(g) => format_graph(g),
        GraphFile::Bipartite(b) => format_bipartite(b),
        GraphFile::Tripartite(t) => format_tripartite(t),
    }
}

pub fn write_graph(f: &GraphFile, path: &Path) -> Result<(), ParseError> {
    std::fs::write(path, format_graph_file(f)).map_err(|e| ParseError::Io(e.to_string()))
}

pub fn read_graph(path: &Path) -> Result<GraphFile, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|e| ParseError::Io(e.to_string()))?;
    parse_graph(&text)
}

fn parse_counts(tokens: &[&str], line: usize, want: usize) -> Result<(Vec<usize>, bool), ParseError> {
    let bad = |reason: String| ParseError::MalformedHeader { line, reason };
    let (nums, rest) = tokens.split_at(tokens.len().min(want));
    if nums.len() != want {
        return Err(bad(format!("expected {want} counts")));
    }
    let multi = match rest {
        [] => false,
        ["multi"] => true,
        _ => return Err(bad("trailing tokens".into())),
    };
    let counts = nums
        .iter()
        .map(|t| t.parse::<usize>().map_err(|_| bad(format!("not a count: {t}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((counts, multi))
}

fn parse_edge(text: &str, line: usize, bound_u: usize, bound_v: usize) -> Result<(usize, usize), ParseError> {
    let mut it = text.split_whitespace();
    let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
        return Err(ParseError::MalformedEdge { line });
    };
    let u: usize = a.parse().map_err(|_| ParseError::MalformedEdge { line })?;
    let v: usize = b.parse().map_err(|_| ParseError::MalformedEdge { line })?;
    if u >= bound_u {
        return Err(ParseError::VertexOutOfRange { line, vertex: u, bound: bound_u });
    }
    if v >= bound_v {
        return Err(ParseError::VertexOutOfRange { line, vertex: v, bound: bound_v });
    }
    Ok((u, v))
}

/// Parses the text edge-list format.
pub fn parse_graph(text: &str) -> Result<GraphFile, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = loop {
        match lines.next() {
            None => return Err(ParseError::Empty),
            Some((_, l)) if l.starts_with('#') => continue,
            Some(h) => break h,
        }
    };
    let tokens: Vec<&str> = header.split_whitespace().collect();
    match tokens[0] {
        "graph" => {
            let (c, multi) = parse_counts(&tokens[1..], hline, 2)?;
            let (n, m) = (c[0], c[1]);
            let mut edges = Vec::with_capacity(m);
            let mut seen = std::collections::HashSet::new();
            for (line, l) in lines.filter(|(_, l)| !l.starts_with('#')) {
                let (u, v) = parse_edge(l, line, n, n)?;
                if u == v {
                    return Err(ParseError::SelfLoop { line, vertex: u });
                }
                let key = (u.min(v), u.max(v));
                if !multi && !seen.insert(key) {
                    return Err(ParseError::DuplicateEdge { line, u: key.0, v: key.1 });
                }
                edges.push((u, v));
            }
            if edges.len() != m {
                return Err(ParseError::EdgeCountMismatch {
                    section: "graph".into(),
                    expected: m,
                    found: edges.len(),
                });
            }
            Graph::from_edges(n, &edges, multi)
                .map(GraphFile::Graph)
                .map_err(|e| ParseError::Structure(e.to_string()))
        }
        "bipartite" => {
            let (c, multi) = parse_counts(&tokens[1..], hline, 3)?;
            let (nl, nr, m) = (c[0], c[1], c[2]);
            let edges = collect_bipartite(lines.filter(|(_, l)| !l.starts_with('#')), nl, nr, multi)?;
            if edges.len() != m {
                return Err(ParseError::EdgeCountMismatch {
                    section: "bipartite".into(),
                    expected: m,
                    found: edges.len(),
                });
            }
            BipartiteGraph::from_edges(nl, nr, &edges, multi)
                .map(GraphFile::Bipartite)
                .map_err(|e| ParseError::Structure(e.to_string()))
        }
        "tripartite" => {
            let (c, multi) = parse_counts(&tokens[1..], hline, 5)?;
            let (nl, nm, nr, m1, m2) = (c[0], c[1], c[2], c[3], c[4]);
            let mut section = 0u8;
            let (mut e1, mut e2) = (Vec::new(), Vec::new());
            let (mut s1, mut s2) = (Vec::new(), Vec::new());
            for (line, l) in lines {
                match l {
                    "#E1" => section = 1,
                    "#E2" => section = 2,
                    _ if l.starts_with('#') => {}
                    _ => match section {
                        1 => s1.push((line, l)),
                        2 => s2.push((line, l)),
                        _ => return Err(ParseError::MissingSection { line }),
                    },
                }
            }
            e1.extend(collect_bipartite(s1.into_iter(), nl, nm, multi)?);
            e2.extend(collect_bipartite(s2.into_iter(), nm, nr, multi)?);
            for (name, expected, found) in [("#E1", m1, e1.len()), ("#E2", m2, e2.len())] {
                if expected != found {
                    return Err(ParseError::EdgeCountMismatch { section: name.into(), expected, found });
                }
            }
            let mut order = vec![MiddleOrder { left: Vec::new(), right: Vec::new() }; nm];
            for &(l, m) in &e1 {
                order[m].left.push(l);
            }
            for &(m, r) in &e2 {
                order[m].right.push(r);
            }
            let st = |e: GraphError| ParseError::Structure(e.to_string());
            let g1 = BipartiteGraph::from_edges(nl, nm, &e1, multi).map_err(st)?;
            let g2 = BipartiteGraph::from_edges(nm, nr, &e2, multi).map_err(st)?;
            TripartiteBase::new(g1, g2, Some(order)).map(GraphFile::Tripartite).map_err(st)
        }
        other => Err(ParseError::MalformedHeader {
            line: hline,
            reason: format!("unknown graph kind `{other}`"),
        }),
    }
}

fn collect_bipartite<'a>(
    lines: impl Iterator<Item = (usize, &'a str)>,
    nl: usize,
    nr: usize,
    multi: bool,
) -> Result<Vec<(usize, usize)>, ParseError> {
    let mut seen = std::collections::HashSet::new();
    let mut edges = Vec::new();
    for (line, l) in lines {
        let (u, v) = parse_edge(l, line, nl, nr)?;
        if !multi && !seen.insert((u, v)) {
            return Err(ParseError::DuplicateEdge { line, u, v });
        }
        edges.push((u, v));
    }
    Ok(edges)
}

/// Common small graphs used throughout tests and examples.
pub mod named {
    use super::{BipartiteGraph, Graph};

    pub fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges, false).expect("cycle")
    }

    pub fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges, false).expect("path")
    }

    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, &edges, false).expect("complete")
    }

    pub fn complete_bipartite(a: usize, b: usize) -> BipartiteGraph {
        let edges: Vec<_> = (0..a).flat_map(|l| (0..b).map(move |r| (l, r))).collect();
        BipartiteGraph::from_edges(a, b, &edges, false).expect("complete bipartite")
    }

    pub fn petersen() -> Graph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::from_edges(10, &edges, false).expect("petersen")
    }

    /// Octagon plus its four long diagonals (3-regular on 8 vertices).
    pub fn octagon_with_diagonals() -> Graph {
        let mut edges: Vec<_> = (0..8).map(|i| (i, (i + 1) % 8)).collect();
        edges.extend((0..4).map(|i| (i, i + 4)));
        Graph::from_edges(8, &edges, false).expect("octagon")
    }

    /// Two vertices joined by three internally disjoint paths with the given edge lengths.
    pub fn theta(a: usize, b: usize, c: usize) -> Graph {
        let mut edges = Vec::new();
        let mut next = 2;
        for len in [a, b, c] {
            let mut prev = 0;
            for _ in 1..len {
                edges.push((prev, next));
                prev = next;
                next += 1;
            }
            edges.push((prev, 1));
        }
        Graph::from_edges(next, &edges, false).expect("theta")
    }
}
