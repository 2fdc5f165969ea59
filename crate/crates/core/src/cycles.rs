//! Girth, shortest cycles and bicycles, non-backtracking walk counts and the generalized Moore
//! bound.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expansion::{self, Objective};
use crate::graphs::{BipartiteGraph, Graph};
use crate::report::Status;
use crate::spectral::{self, SpectralError};

#[derive(Debug, Error, PartialEq)]
pub enum CyclesError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("no {which} within the bound {bound} although rho = {rho} > 1")]
    TheoremViolation { which: &'static str, bound: usize, rho: f64 },
    #[error("walk count overflow at length {0}")]
    Overflow(usize),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Expansion(#[from] expansion::ExpansionError),
}

/// `|E| - |V|`.
pub fn excess(g: &Graph) -> i64 {
    g.m() as i64 - g.n() as i64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleKind {
    Cycle,
    Bicycle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleWitness {
    pub kind: CycleKind,
    /// Cyclic order for a cycle; sorted for a bicycle.
    pub vertices: Vec<usize>,
    /// `(u, v)` with `u <= v`, sorted; parallel edges repeat.
    pub edges: Vec<(usize, usize)>,
    /// Edge count.
    pub length: usize,
}

impl CycleWitness {
    /// Edges exist in `g` with enough multiplicity, the subgraph is connected, and its excess
    /// is 0 with all degrees 2 (cycle) or at least 1 (bicycle).
    pub fn validate(&self, g: &Graph) -> bool {
        if self.length != self.edges.len() || self.edges.is_empty() {
            return false;
        }
        let mut edges = self.edges.clone();
        edges.sort_unstable();
        for run in edges.chunk_by(|a, b| a == b) {
            let (u, v) = run[0];
            if u >= g.n() || v >= g.n() || g.multiplicity(u, v) < run.len() {
                return false;
            }
        }
        let mut verts: Vec<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        verts.sort_unstable();
        verts.dedup();
        let mut sorted_given = self.vertices.clone();
        sorted_given.sort_unstable();
        if sorted_given != verts {
            return false;
        }
        let local = |v: usize| verts.binary_search(&v).unwrap();
        let local_edges: Vec<(usize, usize)> = edges.iter().map(|&(u, v)| (local(u), local(v))).collect();
        let h = match Graph::from_edges(verts.len(), &local_edges, true) {
            Ok(h) => h,
            Err(_) => return false,
        };
        if !h.is_connected() {
            return false;
        }
        match self.kind {
            CycleKind::Cycle => excess(&h) == 0 && (0..h.n()).all(|v| h.degree(v) == 2),
            CycleKind::Bicycle => excess(&h) >= 1,
        }
    }
}

fn sorted_edge(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

struct Bfs {
    dist: Vec<usize>,
    parent: Vec<usize>,
    order: Vec<usize>,
}

/// BFS tree from `root`; neighbors are scanned in adjacency order, so ties go to the smallest
/// index.
fn bfs_tree(g: &Graph, root: usize) -> Bfs {
    let n = g.n();
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut order = Vec::new();
    dist[root] = 0;
    let mut q = VecDeque::from([root]);
    while let Some(u) = q.pop_front() {
        order.push(u);
        for &w in g.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                parent[w] = u;
                q.push_back(w);
            }
        }
    }
    Bfs { dist, parent, order }
}

/// Non-tree edges (with multiplicity) inside the BFS component.
fn non_tree_edges(g: &Graph, t: &Bfs) -> Vec<(usize, usize)> {
    let mut used_tree = vec![false; g.n()];
    let mut out = Vec::new();
    for &u in &t.order {
        for &w in g.neighbors(u) {
            if w < u {
                continue;
            }
            if t.parent[w] == u && !used_tree[w] {
                used_tree[w] = true;
            } else if t.parent[u] == w && !used_tree[u] {
                used_tree[u] = true;
            } else {
                out.push((u, w));
            }
        }
    }
    out
}

fn root_path(t: &Bfs, mut v: usize) -> Vec<usize> {
    let mut p = vec![v];
    while t.dist[v] > 0 {
        v = t.parent[v];
        p.push(v);
    }
    p
}

fn lca(t: &Bfs, mut a: usize, mut b: usize) -> usize {
    while t.dist[a] > t.dist[b] {
        a = t.parent[a];
    }
    while t.dist[b] > t.dist[a] {
        b = t.parent[b];
    }
    while a != b {
        a = t.parent[a];
        b = t.parent[b];
    }
    a
}

/// Shortest closed non-backtracking cycle through the BFS tree of `root`: `(length, u, w)`.
fn shortest_from(g: &Graph, root: usize) -> Option<(usize, usize, usize)> {
    let t = bfs_tree(g, root);
    non_tree_edges(g, &t)
        .into_iter()
        .map(|(u, w)| (t.dist[u] + t.dist[w] + 1, u, w))
        .min()
}

/// Length of a shortest cycle (2 for parallel edges); `None` for forests.
pub fn girth(g: &Graph) -> Option<usize> {
    (0..g.n()).into_par_iter().filter_map(|r| shortest_from(g, r).map(|x| x.0)).min()
}

fn canonical_cycle(mut c: Vec<usize>) -> Vec<usize> {
    let k = c.len();
    let i = (0..k).min_by_key(|&i| c[i]).unwrap();
    c.rotate_left(i);
    if k > 2 && c[k - 1] < c[1] {
        c[1..].reverse();
    }
    c
}

/// A shortest cycle by truncated BFS from every vertex; the global minimum over roots closes
/// a simple cycle. Ties go to the smallest root.
pub fn shortest_cycle(g: &Graph) -> Option<CycleWitness> {
    let (len, root) = (0..g.n())
        .into_par_iter()
        .filter_map(|r| shortest_from(g, r).map(|x| (x.0, r)))
        .min()?;
    let t = bfs_tree(g, root);
    let (_, u, w) = shortest_from(g, root).unwrap();
    let mut cyc = root_path(&t, u);
    cyc.reverse();
    let mut back = root_path(&t, w);
    back.pop();
    cyc.extend(back);
    debug_assert_eq!(cyc.len(), len);
    let vertices = canonical_cycle(cyc);
    let mut edges: Vec<(usize, usize)> =
        (0..len).map(|i| sorted_edge(vertices[i], vertices[(i + 1) % len])).collect();
    edges.sort_unstable();
    Some(CycleWitness { kind: CycleKind::Cycle, vertices, edges, length: len })
}

struct Candidate {
    length: usize,
    vertices: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

/// Smallest bicycle within the BFS tree of `root`: for two non-tree edges, the union of their
/// tree paths and the two edges has excess 1; its 2-core drops the common stem above the
/// deepest common ancestor.
fn bicycle_from(g: &Graph, root: usize, cap: usize) -> Option<Candidate> {
    let t = bfs_tree(g, root);
    let nt = non_tree_edges(g, &t);
    if nt.len() < 2 {
        return None;
    }
    let words = g.n().div_ceil(64);
    struct Ear {
        edge: (usize, usize),
        bits: Vec<u64>,
        top: usize,
        cycle: usize,
    }
    let mut ears: Vec<Ear> = nt
        .iter()
        .map(|&(u, w)| {
            let mut bits = vec![0u64; words];
            for v in root_path(&t, u).into_iter().chain(root_path(&t, w)) {
                if v != root {
                    bits[v / 64] |= 1 << (v % 64);
                }
            }
            let top = lca(&t, u, w);
            Ear { edge: (u, w), bits, top, cycle: t.dist[u] + t.dist[w] + 1 - 2 * t.dist[top] }
        })
        .collect();
    ears.sort_by_key(|e| e.cycle);
    let mut best: Option<(usize, usize, usize)> = None;
    let mut best_len = cap;
    let mut best_vertices: Vec<usize> = Vec::new();
    for i in 0..ears.len() {
        if ears[i].cycle + 1 > best_len {
            break;
        }
        for j in i + 1..ears.len() {
            if ears[j].cycle + 1 > best_len {
                break;
            }
            let tree: usize =
                ears[i].bits.iter().zip(&ears[j].bits).map(|(a, b)| (a | b).count_ones() as usize).sum();
            let stem = lca(&t, ears[i].top, ears[j].top);
            let len = tree + 2 - t.dist[stem];
            if len > best_len {
                continue;
            }
            let verts = bicycle_vertices(&t, &ears[i].bits, &ears[j].bits, stem, g.n());
            if len < best_len || best.is_none() || verts < best_vertices {
                best_len = len;
                best = Some((i, j, stem));
                best_vertices = verts;
            }
        }
    }
    let (i, j, stem) = best?;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for v in &best_vertices {
        if *v != stem && tree_member(&ears[i].bits, &ears[j].bits, *v) {
            edges.push(sorted_edge(*v, t.parent[*v]));
        }
    }
    edges.push(sorted_edge(ears[i].edge.0, ears[i].edge.1));
    edges.push(sorted_edge(ears[j].edge.0, ears[j].edge.1));
    edges.sort_unstable();
    debug_assert_eq!(edges.len(), best_len);
    Some(Candidate { length: best_len, vertices: best_vertices, edges })
}

fn tree_member(a: &[u64], b: &[u64], v: usize) -> bool {
    (a[v / 64] | b[v / 64]) >> (v % 64) & 1 == 1
}

/// Vertices of the 2-core: union members strictly below the stem, plus the stem itself.
fn bicycle_vertices(t: &Bfs, a: &[u64], b: &[u64], stem: usize, n: usize) -> Vec<usize> {
    let mut out = vec![stem];
    for v in 0..n {
        if v != stem && tree_member(a, b, v) && t.dist[v] > t.dist[stem] {
            out.push(v);
        }
    }
    out.sort_unstable();
    out
}

/// Smallest connected subgraph with excess at least 1 and at most `length_cap` edges (edge
/// count), searched over BFS trees from every root. Ties go to the lexicographically smallest
/// sorted vertex list.
pub fn shortest_bicycle(g: &Graph, length_cap: Option<usize>) -> Option<CycleWitness> {
    let cap = length_cap.unwrap_or(usize::MAX);
    let best = (0..g.n())
        .into_par_iter()
        .filter_map(|r| bicycle_from(g, r, cap))
        .min_by(|a, b| (a.length, &a.vertices).cmp(&(b.length, &b.vertices)))?;
    Some(CycleWitness { kind: CycleKind::Bicycle, vertices: best.vertices, edges: best.edges, length: best.length })
}

/// Dense integer matrix in row-major order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub n: usize,
    pub data: Vec<i128>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        (0..n).for_each(|i| data[i * n + i] = 1);
        Self { n, data }
    }

    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.data[i * self.n + j]
    }

    pub fn trace(&self) -> i128 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }
}

pub const WALK_MAX_N: usize = 500;

/// `A^(0) = I`, `A^(1) = A`, `A^(2) = A^2 - D` and `A^(s) = A^(s-1) A - A^(s-2) (D - I)`:
/// entry `(u, v)` counts non-backtracking walks of length `s` from `u` to `v`.
pub fn nb_walk_matrices(g: &Graph, s_max: usize) -> Result<Vec<IntMatrix>, CyclesError> {
    let n = g.n();
    if n > WALK_MAX_N {
        return Err(CyclesError::Input(format!("walk counts are limited to n <= {WALK_MAX_N}")));
    }
    let times_a = |m: &IntMatrix, s: usize| -> Result<IntMatrix, CyclesError> {
        let mut out = vec![0i128; n * n];
        for i in 0..n {
            for k in 0..n {
                let x = m.data[i * n + k];
                if x == 0 {
                    continue;
                }
                for &j in g.neighbors(k) {
                    let cell = &mut out[i * n + j];
                    *cell = cell.checked_add(x).ok_or(CyclesError::Overflow(s))?;
                }
            }
        }
        Ok(IntMatrix { n, data: out })
    };
    let mut mats = vec![IntMatrix::identity(n)];
    for s in 1..=s_max {
        let mut next = times_a(&mats[s - 1], s)?;
        if s >= 2 {
            let prev = &mats[s - 2];
            for i in 0..n {
                for j in 0..n {
                    let sub = if s == 2 { g.degree(j) as i128 } else { g.degree(j) as i128 - 1 };
                    let term = prev.data[i * n + j].checked_mul(sub).ok_or(CyclesError::Overflow(s))?;
                    let cell = &mut next.data[i * n + j];
                    *cell = cell.checked_sub(term).ok_or(CyclesError::Overflow(s))?;
                }
            }
        }
        mats.push(next);
    }
    Ok(mats)
}

/// `tr A^(s)` for `s = 0..=s_max`.
pub fn nb_walk_traces(g: &Graph, s_max: usize) -> Result<Vec<i128>, CyclesError> {
    Ok(nb_walk_matrices(g, s_max)?.iter().map(IntMatrix::trace).collect())
}

/// Relative gap between `sum_{s <= s_max} tr(A^(s)) t^s` and `tr((1 - t^2) H(t)^-1)`.
pub fn walk_generating_function_residual(g: &Graph, t: f64, s_max: usize) -> Result<f64, CyclesError> {
    let traces = nb_walk_traces(g, s_max)?;
    let series: f64 = traces.iter().enumerate().map(|(s, &x)| x as f64 * t.powi(s as i32)).sum();
    let h = spectral::bethe_hessian(g, t);
    let inv = h.try_inverse().ok_or_else(|| CyclesError::Input("H(t) is singular".into()))?;
    let closed = (1.0 - t * t) * inv.trace();
    Ok((series - closed).abs() / closed.abs().max(1.0))
}

/// Largest `j` with `rho^j <= x` (by repeated multiplication, relative slack `1e-9` for the
/// numerical `rho`).
pub fn floor_log(rho: f64, x: f64) -> usize {
    assert!(rho > 1.0);
    let limit = x * (1.0 + 1e-9);
    let mut j = 0;
    let mut p = rho;
    while p <= limit {
        j += 1;
        p *= rho;
    }
    j
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MooreReport {
    pub rho: f64,
    pub n: usize,
    pub cycle_bound: Option<usize>,
    pub bicycle_bound: Option<usize>,
    pub cycle: Option<CycleWitness>,
    pub bicycle: Option<CycleWitness>,
    pub status: Status,
}

/// With `rho = rho(B_G) > 1`, finds a cycle within `2(floor(log_rho n) + 1)` and a bicycle
/// within `3(floor(log_rho 2n) + 1)`; reports not-applicable for `rho <= 1`.
pub fn verify_moore_bound(g: &Graph) -> Result<MooreReport, CyclesError> {
    let rho = spectral::nb_spectral_radius(g)?.rho;
    let n = g.n();
    if rho <= 1.0 + 1e-9 {
        return Ok(MooreReport {
            rho,
            n,
            cycle_bound: None,
            bicycle_bound: None,
            cycle: None,
            bicycle: None,
            status: Status::NotApplicable,
        });
    }
    let cycle_bound = 2 * (floor_log(rho, n as f64) + 1);
    let bicycle_bound = 3 * (floor_log(rho, 2.0 * n as f64) + 1);
    let cycle = shortest_cycle(g).filter(|c| c.length <= cycle_bound);
    if cycle.is_none() {
        return Err(CyclesError::TheoremViolation { which: "cycle", bound: cycle_bound, rho });
    }
    let bicycle = shortest_bicycle(g, Some(bicycle_bound));
    if bicycle.is_none() {
        return Err(CyclesError::TheoremViolation { which: "bicycle", bound: bicycle_bound, rho });
    }
    Ok(MooreReport {
        rho,
        n,
        cycle_bound: Some(cycle_bound),
        bicycle_bound: Some(bicycle_bound),
        cycle,
        bicycle,
        status: Status::Pass,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LosslessMode {
    Cycle,
    Bicycle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LosslessReport {
    pub mode: LosslessMode,
    /// Shortest cycle or bicycle length; `None` if there is none.
    pub measured: Option<usize>,
    /// Largest `g` with no cycle (bicycle) of length at most `g`.
    pub g: Option<usize>,
    pub threshold: f64,
    pub max_size: usize,
    pub vacuous: bool,
    /// Smallest `|N(S)|` for each size `1..=max_size` over distance-2 connected sets.
    pub min_neighborhood: Vec<usize>,
    pub required: Vec<f64>,
    pub violation: Option<Vec<usize>>,
    pub status: Status,
}

/// For a `d`-left-regular graph with no cycle (bicycle) of length at most `g`, every
/// `S ⊆ L` up to the size threshold has `|N(S)| >= (1 - eps) d |S|`. Measures `g`, computes
/// the threshold and verifies all such `S` exactly: the slack `|N(S)| - (1-eps) d |S|` adds
/// up over pieces more than distance 2 apart, so connected pieces suffice.
pub fn small_set_lossless_check(
    g: &BipartiteGraph,
    eps: f64,
    mode: LosslessMode,
    budget: u64,
) -> Result<LosslessReport, CyclesError> {
    let d = {
        let first = (g.n_left() > 0).then(|| g.left_neighbors(0).len());
        match first {
            Some(d) if (0..g.n_left()).all(|l| g.left_neighbors(l).len() == d) => d,
            _ => return Err(CyclesError::Input("graph is not left-regular".into())),
        }
    };
    let base = eps * (d as f64 - 1.0);
    if base <= 1.0 {
        return Err(CyclesError::Input(format!("eps(d-1) = {base} must exceed 1")));
    }
    let whole = g.to_graph();
    let measured = match mode {
        LosslessMode::Cycle => girth(&whole),
        LosslessMode::Bicycle => shortest_bicycle(&whole, None).map(|b| b.length),
    };
    let gl = measured.map(|m| m - 1);
    let threshold = match (mode, gl) {
        (_, None) => f64::INFINITY,
        (LosslessMode::Cycle, Some(x)) => base.powf(x as f64 / 4.0 - 0.5) / (d as f64 + 1.0),
        (LosslessMode::Bicycle, Some(x)) => base.powf(x as f64 / 6.0 - 0.5) / (2.0 * (d as f64 + 1.0)),
    };
    let max_size = if threshold.is_finite() { (threshold.floor() as usize).min(g.n_left()) } else { g.n_left() };
    let mut report = LosslessReport {
        mode,
        measured,
        g: gl,
        threshold,
        max_size,
        vacuous: max_size == 0,
        min_neighborhood: Vec::new(),
        required: Vec::new(),
        violation: None,
        status: Status::Pass,
    };
    if max_size == 0 {
        return Ok(report);
    }
    let cands: Vec<usize> = (0..g.n_left()).collect();
    let minima = if expansion::subset_count(cands.len(), max_size) <= budget {
        expansion::minima_lexicographic(&whole, &cands, max_size, budget, Objective::Neighborhood)?
    } else {
        expansion::minima_local(&whole, &cands, max_size, budget, Objective::Neighborhood)?
    };
    for (i, slot) in minima.into_iter().enumerate() {
        let k = i + 1;
        let need = (1.0 - eps) * (d * k) as f64;
        let Some((nb, set)) = slot else { break };
        report.min_neighborhood.push(nb);
        report.required.push(need);
        if (nb as f64) < need - 1e-9 && report.violation.is_none() {
            report.violation = Some(set);
            report.status = Status::Fail;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::named::*;
    use crate::sampling::{self, RngStream};
    use std::collections::HashSet;

    /// Exhaustive simple-cycle search: each cycle is rooted at its smallest vertex.
    fn girth_oracle(g: &Graph) -> Option<usize> {
        fn dfs(g: &Graph, start: usize, v: usize, depth: usize, on: &mut [bool], best: &mut usize) {
            for &w in g.neighbors(v) {
                if w == start && depth >= 3 {
                    *best = (*best).min(depth);
                } else if w > start && !on[w] && depth + 1 < *best {
                    on[w] = true;
                    dfs(g, start, w, depth + 1, on, best);
                    on[w] = false;
                }
            }
        }
        let mut best = usize::MAX;
        for s in 0..g.n() {
            let mut on = vec![false; g.n()];
            on[s] = true;
            dfs(g, s, s, 1, &mut on, &mut best);
        }
        (best != usize::MAX).then_some(best)
    }

    /// Smallest connected edge subset with `|E| > |V|`, grown level by level over edge masks.
    fn bicycle_oracle(g: &Graph) -> Option<usize> {
        let edges = g.edges();
        let m = edges.len();
        assert!(m <= 64);
        let touches = |mask: u64, e: usize| {
            let (a, b) = edges[e];
            (0..m).any(|f| mask >> f & 1 == 1 && {
                let (c, d) = edges[f];
                a == c || a == d || b == c || b == d
            })
        };
        let verts = |mask: u64| {
            let mut vs: Vec<usize> = (0..m).filter(|&f| mask >> f & 1 == 1).flat_map(|f| [edges[f].0, edges[f].1]).collect();
            vs.sort_unstable();
            vs.dedup();
            vs.len()
        };
        let mut level: HashSet<u64> = (0..m).map(|e| 1u64 << e).collect();
        for k in 1..=m {
            if level.iter().any(|&mask| k > verts(mask)) {
                return Some(k);
            }
            let mut next = HashSet::new();
            for &mask in &level {
                for e in 0..m {
                    if mask >> e & 1 == 0 && touches(mask, e) {
                        next.insert(mask | 1 << e);
                    }
                }
            }
            level = next;
        }
        None
    }

    #[test]
    fn excess_examples() {
        assert_eq!(excess(&path(5)), -1);
        assert_eq!(excess(&cycle(7)), 0);
        assert_eq!(excess(&theta(2, 3, 4)), 1);
    }

    #[test]
    fn girth_examples() {
        assert_eq!(girth(&complete_bipartite(3, 3).to_graph()), Some(4));
        assert_eq!(girth(&petersen()), Some(5));
        assert_eq!(girth(&path(6)), None);
        let multi = Graph::from_edges(3, &[(0, 1), (0, 1), (1, 2)], true).unwrap();
        assert_eq!(girth(&multi), Some(2));
        let w = shortest_cycle(&petersen()).unwrap();
        assert!(w.validate(&petersen()));
        assert_eq!(w.length, 5);
    }

    #[test]
    fn girth_matches_oracle() {
        let mut rng = RngStream::new(21, 0).rng();
        for i in 0..150 {
            let n = 6 + i % 20;
            let g = sampling::sample_gnp(n, 2.5 / n as f64, &mut rng).unwrap();
            assert_eq!(girth(&g), girth_oracle(&g));
            if let Some(w) = shortest_cycle(&g) {
                assert!(w.validate(&g));
                assert_eq!(Some(w.length), girth(&g));
            }
        }
    }

    #[test]
    fn bicycle_examples() {
        let th = theta(3, 3, 4);
        let b = shortest_bicycle(&th, None).unwrap();
        assert_eq!(b.length, th.m());
        assert!(b.validate(&th));
        let two = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)], false).unwrap();
        assert!(shortest_bicycle(&two, None).is_none());
        assert!(shortest_bicycle(&cycle(8), None).is_none());
        assert!(shortest_bicycle(&th, Some(th.m() - 1)).is_none());
        assert_eq!(shortest_bicycle(&complete(4), None).unwrap().length, 5);
    }

    #[test]
    fn bicycle_matches_exhaustive_oracle() {
        let mut rng = RngStream::new(22, 0).rng();
        let mut with_bicycle = 0;
        for i in 0..200 {
            let n = 6 + i % 13;
            let g = sampling::sample_gnp(n, 2.6 / n as f64, &mut rng).unwrap();
            if g.m() > 26 {
                continue;
            }
            let got = shortest_bicycle(&g, None);
            assert_eq!(got.as_ref().map(|b| b.length), bicycle_oracle(&g), "{:?}", g.edges());
            if let Some(b) = got {
                with_bicycle += 1;
                assert!(b.validate(&g));
            }
        }
        assert!(with_bicycle > 50);
    }

    #[test]
    fn walk_count_examples() {
        let n = 7;
        let tr = nb_walk_traces(&cycle(n), n + 1).unwrap();
        for (s, &x) in tr.iter().enumerate().skip(1) {
            assert_eq!(x, if s == n { 2 * n as i128 } else { 0 }, "s = {s}");
        }
        let tree = path(5);
        let mats = nb_walk_matrices(&tree, 6).unwrap();
        assert!(mats[5].data.iter().all(|&x| x == 0));
        assert!(mats[4].data.iter().any(|&x| x != 0));
        let pet = nb_walk_matrices(&petersen(), 8).unwrap();
        assert!(pet.iter().all(|m| m.data.iter().all(|&x| x >= 0)));
    }

    #[test]
    fn walk_counts_match_direct_enumeration() {
        // Count non-backtracking walks by extending directed edges.
        let g = petersen();
        let mats = nb_walk_matrices(&g, 5).unwrap();
        for u in 0..g.n() {
            let mut walks: Vec<(usize, usize)> = g.neighbors(u).iter().map(|&w| (u, w)).collect();
            for s in 1..=5 {
                for v in 0..g.n() {
                    let cnt = walks.iter().filter(|w| w.1 == v).count() as i128;
                    assert_eq!(mats[s].get(u, v), cnt);
                }
                walks = walks
                    .iter()
                    .flat_map(|&(prev, cur)| g.neighbors(cur).iter().filter(move |&&x| x != prev).map(move |&x| (cur, x)))
                    .collect();
            }
        }
    }

    #[test]
    fn generating_function_agrees() {
        let mut rng = RngStream::new(23, 0).rng();
        for _ in 0..10 {
            let g = sampling::sample_gnp(30, 0.12, &mut rng).unwrap();
            let rho = spectral::nb_spectral_radius(&g).unwrap().rho;
            let t = if rho > 0.0 { 0.5 / rho } else { 0.5 };
            assert!(walk_generating_function_residual(&g, t.min(0.5), 30).unwrap() < 1e-6);
        }
    }

    #[test]
    fn floor_log_boundaries() {
        assert_eq!(floor_log(2.0, 4.0), 2);
        assert_eq!(floor_log(2.0, 3.999), 1);
        assert_eq!(floor_log(3.0, 2.0), 0);
    }

    #[test]
    fn moore_examples() {
        let r = verify_moore_bound(&complete(4)).unwrap();
        assert_eq!(r.cycle_bound, Some(6));
        assert_eq!(r.cycle.unwrap().length, 3);
        assert_eq!(r.status, Status::Pass);
        assert_eq!(verify_moore_bound(&cycle(6)).unwrap().status, Status::NotApplicable);
        assert_eq!(verify_moore_bound(&path(6)).unwrap().status, Status::NotApplicable);
    }

    #[test]
    fn lossless_examples() {
        let k = complete_bipartite(3, 3);
        assert!(small_set_lossless_check(&k, 0.4, LosslessMode::Cycle, 1_000_000).is_err());
        let r = small_set_lossless_check(&k, 0.9, LosslessMode::Cycle, 1_000_000).unwrap();
        assert_eq!(r.measured, Some(4));
        assert!(r.vacuous);
        let m = BipartiteGraph::from_edges(4, 8, &[(0, 0), (0, 1), (0, 2), (1, 3), (1, 4), (1, 5), (2, 6), (2, 7), (2, 0), (3, 1), (3, 3), (3, 6)], false)
            .unwrap();
        let r = small_set_lossless_check(&m, 0.9, LosslessMode::Cycle, 1_000_000).unwrap();
        assert_eq!(r.status, Status::Pass);
    }

    #[test]
    fn lossless_forest_checks_everything() {
        let star = BipartiteGraph::from_edges(3, 7, &[(0, 0), (0, 1), (0, 2), (1, 2), (1, 3), (1, 4), (2, 4), (2, 5), (2, 6)], false).unwrap();
        let r = small_set_lossless_check(&star, 0.6, LosslessMode::Cycle, 1_000_000).unwrap();
        assert_eq!(r.max_size, 3);
        assert_eq!(r.min_neighborhood, vec![3, 5, 7]);
        assert_eq!(r.status, Status::Pass);
    }
}
