//! Unique-neighbor and vertex expansion: exact and sampled profiles, plus the edge-density
//! and subgraph-density checks built on them.

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::{BipartiteGraph, Graph, Side, VertexSet};
use crate::report::Status;

#[derive(Debug, Error, PartialEq)]
pub enum ExpansionError {
    #[error("enumeration needs {required} subset evaluations, budget is {budget}")]
    BudgetExceeded { required: u64, budget: u64 },
    #[error("invalid input: {0}")]
    Input(String),
}

pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Vertices outside `s` with exactly one edge into `s` (parallel edges count separately).
pub fn unique_neighbor_list(g: &Graph, s: &[usize]) -> Vec<usize> {
    let mut in_s = vec![false; g.n()];
    for &v in s {
        in_s[v] = true;
    }
    let mut cnt: std::collections::BTreeMap<usize, u32> = Default::default();
    for &v in s {
        for &w in g.neighbors(v) {
            *cnt.entry(w).or_default() += 1;
        }
    }
    cnt.into_iter().filter(|&(w, c)| c == 1 && !in_s[w]).map(|(w, _)| w).collect()
}

/// `UN(S)` in a whole graph (`s.side` must be `Whole`).
pub fn unique_neighbors(g: &Graph, s: &VertexSet) -> Vec<usize> {
    unique_neighbor_list(g, &s.members)
}

/// `UN(S)` for a one-sided set lands on the opposite side; a `Whole` set uses whole-graph
/// indices in both directions.
pub fn unique_neighbors_bipartite(b: &BipartiteGraph, s: &VertexSet) -> VertexSet {
    let g = b.to_graph();
    let un = unique_neighbor_list(&g, &b.whole_indices(s));
    match s.side {
        Side::Whole => VertexSet { side: Side::Whole, members: un },
        Side::Left => VertexSet { side: Side::Right, members: un.into_iter().map(|w| w - b.n_left()).collect() },
        Side::Right => VertexSet { side: Side::Left, members: un },
    }
}

/// `N(S)` (outside `S`, once per vertex).
pub fn neighborhood(g: &Graph, s: &[usize]) -> Vec<usize> {
    let mut in_s = vec![false; g.n()];
    for &v in s {
        in_s[v] = true;
    }
    let mut out: Vec<usize> = s.iter().flat_map(|&v| g.neighbors(v).iter().copied()).filter(|&w| !in_s[w]).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Edges with both endpoints in `s`.
pub fn edges_within(g: &Graph, s: &[usize]) -> usize {
    let mut in_s = vec![false; g.n()];
    for &v in s {
        in_s[v] = true;
    }
    s.iter().map(|&v| g.neighbors(v).iter().filter(|&&w| in_s[w]).count()).sum::<usize>() / 2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Exact,
    /// Minimum over sampled sets only: an upper bound on the true profile.
    WitnessUpperBound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub t: usize,
    pub unique: usize,
    pub size: usize,
    pub min_ratio: f64,
    pub argmin: Vec<usize>,
}

/// `t -> min_{1 <= |S| <= t} |UN(S)| / |S|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionProfile {
    pub side: Side,
    pub kind: ProfileKind,
    pub entries: Vec<ProfileEntry>,
}

impl ExpansionProfile {
    pub fn t_max(&self) -> usize {
        self.entries.len()
    }

    /// `P(t)`; `+inf` when no set of size at most `t` exists.
    pub fn ratio(&self, t: usize) -> f64 {
        self.entries[t - 1].min_ratio
    }

    pub fn entry(&self, t: usize) -> &ProfileEntry {
        &self.entries[t - 1]
    }
}

/// `sum_{k=1}^{t} C(n, k)`, saturating.
pub fn subset_count(n: usize, t: usize) -> u64 {
    let mut total: u64 = 0;
    let mut c: u128 = 1;
    for k in 1..=t.min(n) {
        c = c * (n - k + 1) as u128 / k as u128;
        total = total.saturating_add(c.min(u64::MAX as u128) as u64);
    }
    total
}

/// Quantity minimized per set size by the enumerators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    /// `|UN(S)|`
    Unique,
    /// `|N(S)|` (outside `S`)
    Neighborhood,
}

/// Incremental `|UN(S)|` and `|N(S)|` under single-vertex insertions and deletions.
struct UnCounter<'a> {
    g: &'a Graph,
    cnt: Vec<u32>,
    in_s: Vec<bool>,
    un: usize,
    nb: usize,
    obj: Objective,
}

impl<'a> UnCounter<'a> {
    fn new(g: &'a Graph, obj: Objective) -> Self {
        Self { g, cnt: vec![0; g.n()], in_s: vec![false; g.n()], un: 0, nb: 0, obj }
    }

    fn value(&self) -> usize {
        match self.obj {
            Objective::Unique => self.un,
            Objective::Neighborhood => self.nb,
        }
    }

    fn add(&mut self, v: usize) {
        if self.cnt[v] == 1 {
            self.un -= 1;
        }
        if self.cnt[v] >= 1 {
            self.nb -= 1;
        }
        self.in_s[v] = true;
        for &w in self.g.neighbors(v) {
            self.cnt[w] += 1;
            if !self.in_s[w] {
                match self.cnt[w] {
                    1 => {
                        self.un += 1;
                        self.nb += 1;
                    }
                    2 => self.un -= 1,
                    _ => {}
                }
            }
        }
    }

    fn remove(&mut self, v: usize) {
        for &w in self.g.neighbors(v) {
            if !self.in_s[w] {
                match self.cnt[w] {
                    1 => {
                        self.un -= 1;
                        self.nb -= 1;
                    }
                    2 => self.un += 1,
                    _ => {}
                }
            }
            self.cnt[w] -= 1;
        }
        self.in_s[v] = false;
        if self.cnt[v] == 1 {
            self.un += 1;
        }
        if self.cnt[v] >= 1 {
            self.nb += 1;
        }
    }
}

/// Per-size best: `(value, set)`.
pub type SizeBest = Vec<Option<(usize, Vec<usize>)>>;

fn better(candidate: (usize, &[usize]), current: &Option<(usize, Vec<usize>)>) -> bool {
    match current {
        None => true,
        Some((un, set)) => candidate.0 < *un || (candidate.0 == *un && candidate.1 < set.as_slice()),
    }
}

fn merge_best(into: &mut SizeBest, other: SizeBest) {
    for (slot, cand) in into.iter_mut().zip(other) {
        if let Some((un, set)) = cand {
            if better((un, &set), slot) {
                *slot = Some((un, set));
            }
        }
    }
}

/// Prefix-minimum ratio profile from per-size minima.
pub fn profile_from_minima(side: Side, best: SizeBest, kind: ProfileKind) -> ExpansionProfile {
    finish(side, best, kind)
}

fn finish(side: Side, best: SizeBest, kind: ProfileKind) -> ExpansionProfile {
    let mut entries = Vec::with_capacity(best.len());
    let mut run: Option<(usize, usize, Vec<usize>)> = None;
    for (i, b) in best.into_iter().enumerate() {
        if let Some((un, set)) = b {
            let k = i + 1;
            let improves = match &run {
                None => true,
                Some((u0, k0, _)) => un * k0 < u0 * k,
            };
            if improves {
                run = Some((un, k, set));
            }
        }
        let t = i + 1;
        entries.push(match &run {
            None => ProfileEntry { t, unique: 0, size: 0, min_ratio: f64::INFINITY, argmin: Vec::new() },
            Some((un, k, set)) => ProfileEntry {
                t,
                unique: *un,
                size: *k,
                min_ratio: *un as f64 / *k as f64,
                argmin: set.clone(),
            },
        });
    }
    ExpansionProfile { side, kind, entries }
}

fn dfs(
    state: &mut UnCounter,
    cands: &[usize],
    start: usize,
    t_max: usize,
    stack: &mut Vec<usize>,
    best: &mut SizeBest,
) {
    for i in start..cands.len() {
        let v = cands[i];
        state.add(v);
        stack.push(v);
        let k = stack.len();
        if best[k - 1].as_ref().is_none_or(|(un, _)| state.value() < *un) {
            best[k - 1] = Some((state.value(), stack.clone()));
        }
        if k < t_max {
            dfs(state, cands, i + 1, t_max, stack, best);
        }
        stack.pop();
        state.remove(v);
    }
}

fn profile_lexicographic(
    g: &Graph,
    cands: &[usize],
    side: Side,
    t_max: usize,
    budget: u64,
) -> Result<ExpansionProfile, ExpansionError> {
    Ok(finish(side, minima_lexicographic(g, cands, t_max, budget, Objective::Unique)?, ProfileKind::Exact))
}

/// Per-size minima of the objective over every subset of `cands` (whole-graph indices) by
/// lexicographic enumeration. Ties go to the lexicographically smallest set.
pub fn minima_lexicographic(
    g: &Graph,
    cands: &[usize],
    t_max: usize,
    budget: u64,
    obj: Objective,
) -> Result<SizeBest, ExpansionError> {
    let required = subset_count(cands.len(), t_max);
    if required > budget {
        return Err(ExpansionError::BudgetExceeded { required, budget });
    }
    let partial: Vec<SizeBest> = (0..cands.len())
        .into_par_iter()
        .map(|i| {
            let mut state = UnCounter::new(g, obj);
            let mut best: SizeBest = vec![None; t_max];
            let mut stack = vec![cands[i]];
            state.add(cands[i]);
            best[0] = Some((state.value(), stack.clone()));
            if t_max > 1 {
                dfs(&mut state, cands, i + 1, t_max, &mut stack, &mut best);
            }
            best
        })
        .collect();
    let mut best: SizeBest = vec![None; t_max];
    for p in partial {
        merge_best(&mut best, p);
    }
    Ok(best)
}

/// Exact profile by lexicographic enumeration of every subset of `side` with `|S| <= t_max`.
/// Ties are broken by the lexicographically first minimizer (smaller sizes first).
pub fn exact_profile(g: &Graph, side: Side, t_max: usize, budget: u64) -> Result<ExpansionProfile, ExpansionError> {
    if side != Side::Whole {
        return Err(ExpansionError::Input("one-sided profiles need a bipartite graph".into()));
    }
    let cands: Vec<usize> = (0..g.n()).collect();
    profile_lexicographic(g, &cands, side, t_max, budget)
}

/// One-sided or whole-graph exact profile of a bipartite graph; `argmin` is in side-local indices.
pub fn exact_profile_bipartite(
    b: &BipartiteGraph,
    side: Side,
    t_max: usize,
    budget: u64,
) -> Result<ExpansionProfile, ExpansionError> {
    let g = b.to_graph();
    let (cands, offset) = side_candidates(b, side);
    let mut p = profile_lexicographic(&g, &cands, side, t_max, budget)?;
    localize(&mut p, offset);
    Ok(p)
}

fn side_candidates(b: &BipartiteGraph, side: Side) -> (Vec<usize>, usize) {
    match side {
        Side::Left => ((0..b.n_left()).collect(), 0),
        Side::Right => ((b.n_left()..b.n()).collect(), b.n_left()),
        Side::Whole => ((0..b.n()).collect(), 0),
    }
}

fn localize(p: &mut ExpansionProfile, offset: usize) {
    if offset > 0 {
        for e in p.entries.iter_mut() {
            e.argmin.iter_mut().for_each(|v| *v -= offset);
        }
    }
}

/// Vertices at distance 1 or 2 from each candidate, restricted to candidates (candidate-local
/// indices).
fn interaction_lists(g: &Graph, cands: &[usize]) -> Vec<Vec<usize>> {
    let mut local = vec![usize::MAX; g.n()];
    for (i, &v) in cands.iter().enumerate() {
        local[v] = i;
    }
    cands
        .iter()
        .map(|&v| {
            let mut out: Vec<usize> = Vec::new();
            for &w in g.neighbors(v) {
                if local[w] != usize::MAX {
                    out.push(local[w]);
                }
                for &x in g.neighbors(w) {
                    if local[x] != usize::MAX {
                        out.push(local[x]);
                    }
                }
            }
            out.sort_unstable();
            out.dedup();
            out.retain(|&x| x != local[v]);
            out
        })
        .collect()
}

struct Esu<'a> {
    inter: &'a [Vec<usize>],
    cands: &'a [usize],
    t_max: usize,
    near: Vec<u32>,
    sub: Vec<usize>,
    state: UnCounter<'a>,
    best: SizeBest,
    visited: u64,
    budget: u64,
    /// Extensions must exceed the root index (plain ESU) or only avoid it (rooted mode).
    ordered: bool,
}

impl Esu<'_> {
    fn mark(&mut self, w: usize, delta: i32) {
        let apply = |c: &mut u32| *c = (*c as i32 + delta) as u32;
        apply(&mut self.near[w]);
        for &u in &self.inter[w] {
            apply(&mut self.near[u]);
        }
    }

    fn record(&mut self) -> Result<(), ExpansionError> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(ExpansionError::BudgetExceeded { required: self.visited, budget: self.budget });
        }
        let k = self.sub.len();
        let un = self.state.value();
        let slot = &self.best[k - 1];
        let wins = match slot {
            None => true,
            Some((b, _)) if un < *b => true,
            Some((b, _)) if un > *b => false,
            Some((_, set)) => {
                let mut s: Vec<usize> = self.sub.iter().map(|&i| self.cands[i]).collect();
                s.sort_unstable();
                s < *set
            }
        };
        if wins {
            let mut s: Vec<usize> = self.sub.iter().map(|&i| self.cands[i]).collect();
            s.sort_unstable();
            self.best[k - 1] = Some((un, s));
        }
        Ok(())
    }

    fn extend(&mut self, mut ext: Vec<usize>, root: usize) -> Result<(), ExpansionError> {
        self.record()?;
        if self.sub.len() == self.t_max {
            return Ok(());
        }
        while let Some(w) = ext.pop() {
            let mut next = ext.clone();
            for &u in &self.inter[w] {
                if (!self.ordered || u > root) && self.near[u] == 0 {
                    next.push(u);
                }
            }
            self.sub.push(w);
            self.mark(w, 1);
            self.state.add(self.cands[w]);
            self.extend(next, root)?;
            self.state.remove(self.cands[w]);
            self.mark(w, -1);
            self.sub.pop();
        }
        Ok(())
    }
}

/// Exact profile restricted to sets that are connected in the distance-2 graph. Any set splits
/// into such pieces with disjoint unique-neighbor sets, so the minimum ratio is the same as
/// over all sets. `budget` bounds the number of visited sets.
pub fn exact_profile_local(
    g: &Graph,
    cands: &[usize],
    side: Side,
    t_max: usize,
    budget: u64,
) -> Result<ExpansionProfile, ExpansionError> {
    Ok(finish(side, minima_local(g, cands, t_max, budget, Objective::Unique)?, ProfileKind::Exact))
}

/// Per-size minima of the objective over the subsets of `cands` that are connected in the
/// distance-2 graph. These are not the global per-size minima, but any linear condition
/// `value(S) >= c |S|` holds for all sets iff it holds for these, since both objectives add
/// up over pieces more than distance 2 apart.
pub fn minima_local(
    g: &Graph,
    cands: &[usize],
    t_max: usize,
    budget: u64,
    obj: Objective,
) -> Result<SizeBest, ExpansionError> {
    let roots: Vec<usize> = (0..cands.len()).collect();
    local_search(g, cands, &roots, true, t_max, budget, obj)
}

/// Like [`minima_local`] but only over sets containing one of `roots` (candidate-local
/// indices). Equivalent when every candidate is mapped onto a root by an automorphism that
/// preserves `cands`, e.g. one root per orbit of a group action.
pub fn minima_local_rooted(
    g: &Graph,
    cands: &[usize],
    roots: &[usize],
    t_max: usize,
    budget: u64,
    obj: Objective,
) -> Result<SizeBest, ExpansionError> {
    if roots.iter().any(|&r| r >= cands.len()) {
        return Err(ExpansionError::Input("root out of range".into()));
    }
    local_search(g, cands, roots, false, t_max, budget, obj)
}

fn local_search(
    g: &Graph,
    cands: &[usize],
    roots: &[usize],
    ordered: bool,
    t_max: usize,
    budget: u64,
    obj: Objective,
) -> Result<SizeBest, ExpansionError> {
    let inter = interaction_lists(g, cands);
    let partial: Vec<Result<(SizeBest, u64), ExpansionError>> = roots
        .par_iter()
        .map(|&root| {
            let mut esu = Esu {
                inter: &inter,
                cands,
                t_max,
                near: vec![0; cands.len()],
                sub: vec![root],
                state: UnCounter::new(g, obj),
                best: vec![None; t_max],
                visited: 0,
                budget,
                ordered,
            };
            esu.mark(root, 1);
            esu.state.add(cands[root]);
            let ext: Vec<usize> = inter[root].iter().copied().filter(|&u| !ordered || u > root).collect();
            esu.extend(ext, root)?;
            Ok((esu.best, esu.visited))
        })
        .collect();
    let mut best: SizeBest = vec![None; t_max];
    let mut visited = 0u64;
    for p in partial {
        let (b, v) = p?;
        visited += v;
        merge_best(&mut best, b);
    }
    if visited > budget {
        return Err(ExpansionError::BudgetExceeded { required: visited, budget });
    }
    Ok(best)
}

/// Exact profile by whichever exact method fits the budget: lexicographic enumeration first,
/// then the distance-2 connected enumeration.
pub fn exact_profile_auto(g: &Graph, cands: &[usize], side: Side, t_max: usize, budget: u64) -> Result<ExpansionProfile, ExpansionError> {
    if subset_count(cands.len(), t_max) <= budget {
        profile_lexicographic(g, cands, side, t_max, budget)
    } else {
        exact_profile_local(g, cands, side, t_max, budget)
    }
}

pub fn exact_profile_auto_bipartite(b: &BipartiteGraph, side: Side, t_max: usize, budget: u64) -> Result<ExpansionProfile, ExpansionError> {
    let (cands, offset) = side_candidates(b, side);
    let mut p = exact_profile_auto(&b.to_graph(), &cands, side, t_max, budget)?;
    localize(&mut p, offset);
    Ok(p)
}

/// Minimum ratio over `samples` uniform random sets of each size `1..=t_max`. Only an upper
/// bound on the true profile.
pub fn sampled_profile_lower_witness<R: Rng>(
    g: &Graph,
    cands: &[usize],
    side: Side,
    t_max: usize,
    samples: usize,
    rng: &mut R,
) -> ExpansionProfile {
    if samples == 0 {
        return ExpansionProfile { side, kind: ProfileKind::WitnessUpperBound, entries: Vec::new() };
    }
    let mut best: SizeBest = vec![None; t_max];
    for k in 1..=t_max.min(cands.len()) {
        for _ in 0..samples {
            let mut set: Vec<usize> = sample_indices(rng, cands.len(), k).into_iter().map(|i| cands[i]).collect();
            set.sort_unstable();
            let un = unique_neighbor_list(g, &set).len();
            if better((un, &set), &best[k - 1]) {
                best[k - 1] = Some((un, set));
            }
        }
    }
    finish(side, best, ProfileKind::WitnessUpperBound)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityViolation {
    pub set: Vec<usize>,
    pub edges: usize,
    pub bound: f64,
}

/// Random connected set of size `k` grown from a random vertex.
fn grow_connected<R: Rng>(g: &Graph, k: usize, rng: &mut R) -> Vec<usize> {
    let n = g.n();
    let mut in_s = vec![false; n];
    let start = rng.random_range(0..n);
    let mut set = vec![start];
    in_s[start] = true;
    let mut frontier: Vec<usize> = g.neighbors(start).to_vec();
    while set.len() < k {
        frontier.retain(|&w| !in_s[w]);
        let v = if frontier.is_empty() {
            let rest: Vec<usize> = (0..n).filter(|&v| !in_s[v]).collect();
            rest[rng.random_range(0..rest.len())]
        } else {
            frontier[rng.random_range(0..frontier.len())]
        };
        in_s[v] = true;
        set.push(v);
        frontier.extend_from_slice(g.neighbors(v));
    }
    set.sort_unstable();
    set
}

/// `e(S) <= D |S| (lambda + eps) / 2` with `eps = |S| / n`, over random (uniform and grown
/// connected) sets of every size up to `eps_frac * n`. `lambda` is the normalized second
/// eigenvalue; negative values are clamped to zero since the bound relies on `lambda >= 0`.
pub fn edge_density_check<R: Rng>(
    g: &Graph,
    lambda: f64,
    eps_frac: f64,
    samples: usize,
    rng: &mut R,
) -> Result<Vec<DensityViolation>, ExpansionError> {
    let d = g.regular_degree().ok_or_else(|| ExpansionError::Input("graph is not regular".into()))?;
    let n = g.n();
    let lam = lambda.max(0.0);
    let max_size = ((eps_frac * n as f64).floor() as usize).min(n);
    let mut out = Vec::new();
    for k in 1..=max_size {
        let bound = d as f64 * k as f64 * (lam + k as f64 / n as f64) / 2.0;
        for i in 0..samples {
            let set = if i % 2 == 0 {
                let mut s: Vec<usize> = sample_indices(rng, n, k).into_vec();
                s.sort_unstable();
                s
            } else {
                grow_connected(g, k, rng)
            };
            let e = edges_within(g, &set);
            if e as f64 > bound + 1e-9 {
                out.push(DensityViolation { set, edges: e, bound });
            }
        }
    }
    Ok(out)
}

/// Random `(S1, S2)` with `|S1| + |S2| = size`, grown as a connected set of the whole graph
/// and split by side; a side left empty receives a neighbor of the other. Indices are side-local.
pub fn random_local_pair<R: Rng>(b: &BipartiteGraph, size: usize, rng: &mut R) -> (Vec<usize>, Vec<usize>) {
    let g = b.to_graph();
    let nl = b.n_left();
    let set = grow_connected(&g, size.clamp(2, g.n()), rng);
    let mut s1: Vec<usize> = set.iter().filter(|&&v| v < nl).copied().collect();
    let mut s2: Vec<usize> = set.iter().filter(|&&v| v >= nl).map(|&v| v - nl).collect();
    if s2.is_empty() {
        let nb = b.left_neighbors(s1[0]);
        if !nb.is_empty() {
            s2.push(nb[rng.random_range(0..nb.len())]);
        }
    } else if s1.is_empty() {
        let nb = b.right_neighbors(s2[0]);
        if !nb.is_empty() {
            s1.push(nb[rng.random_range(0..nb.len())]);
        }
    }
    (s1, s2)
}

/// How the hereditary density hypothesis `2e(S) <= gamma |S|` was decided.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisMethod {
    Exhaustive,
    MaxClosure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowDegreeReport {
    pub gamma: f64,
    pub method: HypothesisMethod,
    /// A set with `2e(S) > gamma |S|`, if any.
    pub hypothesis_violation: Option<Vec<usize>>,
    pub two_e: usize,
    pub low_degree_mass: usize,
    pub low_vertices: Vec<usize>,
    /// `None` when the hypothesis fails.
    pub ok: Option<bool>,
}

/// Exhaustive search for a set with `2 e(S) > gamma |S|` (`n <= 24`).
pub fn density_violation_exhaustive(g: &Graph, gamma: f64) -> Option<Vec<usize>> {
    let n = g.n();
    assert!(n <= 24, "exhaustive density scan is limited to 24 vertices");
    let adj: Vec<u32> = (0..n).map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | 1 << w)).collect();
    // Multigraphs: count multiplicities explicitly.
    let multi = g.is_multi();
    for mask in 1u32..(1u32 << n) {
        let size = mask.count_ones() as f64;
        let two_e: u32 = if multi {
            (0..n)
                .filter(|&v| mask >> v & 1 == 1)
                .map(|v| g.neighbors(v).iter().filter(|&&w| mask >> w & 1 == 1).count() as u32)
                .sum()
        } else {
            (0..n).filter(|&v| mask >> v & 1 == 1).map(|v| (adj[v] & mask).count_ones()).sum()
        };
        if two_e as f64 > gamma * size + 1e-9 {
            return Some((0..n).filter(|&v| mask >> v & 1 == 1).collect());
        }
    }
    None
}

/// Max-closure (min-cut) search for a set with `2 e(S) > gamma |S|`; exact for any size.
pub fn density_violation_flow(g: &Graph, gamma: f64) -> Option<Vec<usize>> {
    let edges = g.edges();
    let (n, m) = (g.n(), edges.len());
    let source = 0;
    let sink = 1;
    let edge_node = |i: usize| 2 + i;
    let vertex_node = |v: usize| 2 + m + v;
    let mut net = flow::Network::new(2 + m + n);
    for (i, &(u, v)) in edges.iter().enumerate() {
        net.add(source, edge_node(i), 2.0);
        net.add(edge_node(i), vertex_node(u), f64::INFINITY);
        net.add(edge_node(i), vertex_node(v), f64::INFINITY);
    }
    for v in 0..n {
        net.add(vertex_node(v), sink, gamma);
    }
    let cut = net.max_flow(source, sink);
    let best = 2.0 * m as f64 - cut;
    if best <= 1e-7 {
        return None;
    }
    let reach = net.reachable(source);
    let set: Vec<usize> = (0..n).filter(|&v| reach[vertex_node(v)]).collect();
    (!set.is_empty()).then_some(set)
}

/// Checks `2e(F) <= 3 sum_{deg(v) <= 2 gamma} deg(v)` after deciding the hypothesis
/// `2e(S) <= gamma |S|` for all `S` (exhaustively up to 20 vertices, by min cut beyond).
pub fn low_degree_mass_check(f: &Graph, gamma: f64) -> LowDegreeReport {
    let (method, violation) = if f.n() <= 20 {
        (HypothesisMethod::Exhaustive, density_violation_exhaustive(f, gamma))
    } else {
        (HypothesisMethod::MaxClosure, density_violation_flow(f, gamma))
    };
    let low_vertices: Vec<usize> = (0..f.n()).filter(|&v| f.degree(v) as f64 <= 2.0 * gamma).collect();
    let low_degree_mass: usize = low_vertices.iter().map(|&v| f.degree(v)).sum();
    let two_e = 2 * f.m();
    let ok = violation.is_none().then_some(two_e <= 3 * low_degree_mass);
    LowDegreeReport { gamma, method, hypothesis_violation: violation, two_e, low_degree_mass, low_vertices, ok }
}

/// Hidden-constant choices for the subgraph density statements.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityConstants {
    pub c_eps: f64,
    pub c_gamma: f64,
}

impl Default for DensityConstants {
    fn default() -> Self {
        Self { c_eps: 5.0, c_gamma: 3.0 }
    }
}

/// `gamma` such that `lambda2 = (sqrt(c-1) + sqrt(d-1)) (1 + gamma / d)`, floored at zero,
/// with `d` the larger degree.
pub fn gamma_from_lambda2(c: usize, d: usize, lambda2: f64) -> f64 {
    let ram = ((c - 1) as f64).sqrt() + ((d - 1) as f64).sqrt();
    (c.max(d) as f64 * (lambda2 / ram - 1.0)).max(0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
    /// `|S1| + |S2| <= delta n` with the conservative `delta = d^(-d / eps^2)`.
    pub in_regime: bool,
}

impl DensityReport {
    pub fn status(&self) -> Status {
        match (self.ok, self.in_regime) {
            (true, _) => Status::Pass,
            (false, true) => Status::Fail,
            (false, false) => Status::Flagged,
        }
    }
}

fn regime_delta(d: usize, eps: f64) -> f64 {
    (-(d as f64) / (eps * eps) * (d as f64).ln()).exp()
}

/// `(d1 - 1)(d2 - 1) <= sqrt((c-1)(d-1)) (1 + c_eps eps + c_gamma sqrt(gamma))` for the
/// induced average degrees of `G[S1 ∪ S2]`.
pub fn subgraph_density_check(
    g: &BipartiteGraph,
    s1: &[usize],
    s2: &[usize],
    eps: f64,
    gamma: f64,
    k: DensityConstants,
) -> Result<DensityReport, ExpansionError> {
    if s1.is_empty() || s2.is_empty() {
        return Err(ExpansionError::Input("S1 and S2 must be nonempty".into()));
    }
    let (c, d) = g.biregular_degrees().ok_or_else(|| ExpansionError::Input("graph is not biregular".into()))?;
    let (sub, _, _) = g.induced(s1, s2);
    let e = sub.m() as f64;
    let d1 = e / s1.len() as f64;
    let d2 = e / s2.len() as f64;
    let lhs = (d1 - 1.0) * (d2 - 1.0);
    let rhs = (((c - 1) * (d - 1)) as f64).sqrt() * (1.0 + k.c_eps * eps + k.c_gamma * gamma.sqrt());
    let in_regime = ((s1.len() + s2.len()) as f64) <= regime_delta(c.max(d), eps) * g.n() as f64;
    Ok(DensityReport { lhs, rhs, ok: lhs <= rhs + 1e-12, in_regime })
}

/// `c |S| / |N(S)| <= 1 + (1 + c_eps eps + c_gamma sqrt(gamma)) sqrt((d-1)/(c-1))` for a
/// left set `S`.
pub fn vertex_expansion_corollary_check(
    g: &BipartiteGraph,
    s: &[usize],
    eps: f64,
    gamma: f64,
    k: DensityConstants,
) -> Result<DensityReport, ExpansionError> {
    if s.is_empty() {
        return Err(ExpansionError::Input("S must be nonempty".into()));
    }
    let (c, d) = g.biregular_degrees().ok_or_else(|| ExpansionError::Input("graph is not biregular".into()))?;
    let mut nb: Vec<usize> = s.iter().flat_map(|&l| g.left_neighbors(l).iter().copied()).collect();
    nb.sort_unstable();
    nb.dedup();
    let lhs = (c * s.len()) as f64 / nb.len() as f64;
    let rhs = 1.0 + (1.0 + k.c_eps * eps + k.c_gamma * gamma.sqrt()) * ((d - 1) as f64 / (c - 1) as f64).sqrt();
    let in_regime = s.len() as f64 <= regime_delta(c.max(d), eps) * g.n_left() as f64;
    Ok(DensityReport { lhs, rhs, ok: lhs <= rhs + 1e-12, in_regime })
}

mod flow {
    //! Dinic max flow on `f64` capacities.

    pub struct Network {
        head: Vec<Vec<usize>>,
        to: Vec<usize>,
        cap: Vec<f64>,
    }

    const EPS: f64 = 1e-12;

    impl Network {
        pub fn new(n: usize) -> Self {
            Self { head: vec![Vec::new(); n], to: Vec::new(), cap: Vec::new() }
        }

        pub fn add(&mut self, u: usize, v: usize, c: f64) {
            self.head[u].push(self.to.len());
            self.to.push(v);
            self.cap.push(c);
            self.head[v].push(self.to.len());
            self.to.push(u);
            self.cap.push(0.0);
        }

        fn levels(&self, s: usize) -> Vec<usize> {
            let mut level = vec![usize::MAX; self.head.len()];
            level[s] = 0;
            let mut q = std::collections::VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &e in &self.head[u] {
                    let v = self.to[e];
                    if self.cap[e] > EPS && level[v] == usize::MAX {
                        level[v] = level[u] + 1;
                        q.push_back(v);
                    }
                }
            }
            level
        }

        fn push(&mut self, u: usize, t: usize, f: f64, level: &[usize], it: &mut [usize]) -> f64 {
            if u == t {
                return f;
            }
            while it[u] < self.head[u].len() {
                let e = self.head[u][it[u]];
                let v = self.to[e];
                if self.cap[e] > EPS && level[v] == level[u] + 1 {
                    let got = self.push(v, t, f.min(self.cap[e]), level, it);
                    if got > EPS {
                        self.cap[e] -= got;
                        self.cap[e ^ 1] += got;
                        return got;
                    }
                }
                it[u] += 1;
            }
            0.0
        }

        pub fn max_flow(&mut self, s: usize, t: usize) -> f64 {
            let mut total = 0.0;
            loop {
                let level = self.levels(s);
                if level[t] == usize::MAX {
                    return total;
                }
                let mut it = vec![0; self.head.len()];
                loop {
                    let f = self.push(s, t, f64::INFINITY, &level, &mut it);
                    if f <= EPS {
                        break;
                    }
                    total += f;
                }
            }
        }

        pub fn reachable(&self, s: usize) -> Vec<bool> {
            self.levels(s).into_iter().map(|l| l != usize::MAX).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::named::*;
    use crate::sampling::{self, RngStream};

    fn whole(v: Vec<usize>, n: usize) -> VertexSet {
        VertexSet::whole(v, n).unwrap()
    }

    /// Independent oracle: per-vertex edge counts by scanning the edge list.
    fn un_oracle(g: &Graph, s: &[usize]) -> Vec<usize> {
        (0..g.n())
            .filter(|w| !s.contains(w))
            .filter(|&w| g.edges().iter().filter(|&&(a, b)| (a == w && s.contains(&b)) || (b == w && s.contains(&a))).count() == 1)
            .collect()
    }

    #[test]
    fn singleton_unique_neighbors_are_the_neighborhood() {
        let g = petersen();
        assert_eq!(unique_neighbors(&g, &whole(vec![0], 10)), g.neighbors(0).to_vec());
    }

    #[test]
    fn k22_left_pair_has_no_unique_neighbor() {
        let k = complete_bipartite(2, 2);
        let s = VertexSet::new(Side::Left, vec![0, 1], 2).unwrap();
        let un = unique_neighbors_bipartite(&k, &s);
        assert_eq!(un.side, Side::Right);
        assert!(un.members.is_empty());
    }

    #[test]
    fn unique_neighbors_match_oracle() {
        let mut rng = RngStream::new(7, 0).rng();
        for _ in 0..100 {
            let g = sampling::sample_gnp(14, 0.3, &mut rng).unwrap();
            let k = rng.random_range(1..6);
            let mut s: Vec<usize> = sample_indices(&mut rng, 14, k).into_vec();
            s.sort_unstable();
            assert_eq!(unique_neighbor_list(&g, &s), un_oracle(&g, &s));
        }
    }

    #[test]
    fn singleton_profile_is_min_degree() {
        let h = sampling::sample_biregular(6, 6, 3, 3, &mut RngStream::new(1, 0).rng(), None).unwrap();
        let p = exact_profile_bipartite(&h, Side::Whole, 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(p.ratio(1), 3.0);
    }

    #[test]
    fn matching_profile_is_one() {
        let m = BipartiteGraph::from_edges(4, 4, &[(0, 0), (1, 1), (2, 2), (3, 3)], false).unwrap();
        let p = exact_profile_bipartite(&m, Side::Left, 4, DEFAULT_BUDGET).unwrap();
        for t in 1..=4 {
            assert_eq!(p.ratio(t), 1.0);
        }
    }

    #[test]
    fn octagon_gadget_golden_profile() {
        // Exhaustive over all 2^8 subsets by bitmask, independent of the enumeration engine.
        let g = octagon_with_diagonals();
        let mut best = [f64::INFINITY; 8];
        for mask in 1u32..256 {
            let s: Vec<usize> = (0..8).filter(|&v| mask >> v & 1 == 1).collect();
            let r = un_oracle(&g, &s).len() as f64 / s.len() as f64;
            let k = s.len() - 1;
            best[k] = best[k].min(r);
        }
        let mut run = f64::INFINITY;
        let golden: Vec<f64> = best.iter().map(|&b| {
            run = run.min(b);
            run
        }).collect();
        let p = exact_profile(&g, Side::Whole, 8, DEFAULT_BUDGET).unwrap();
        let got: Vec<f64> = (1..=8).map(|t| p.ratio(t)).collect();
        assert_eq!(got, golden);
        // Frozen from the bitmask oracle above.
        assert_eq!(got, vec![3.0, 1.0, 1.0 / 3.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn budget_exceeded_reports_requirement() {
        let g = cycle(40);
        match exact_profile(&g, Side::Whole, 6, 1000) {
            Err(ExpansionError::BudgetExceeded { required, budget: 1000 }) => {
                assert_eq!(required, subset_count(40, 6));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn profile_is_monotone_and_argmin_reproduces() {
        let mut rng = RngStream::new(3, 0).rng();
        let g = sampling::sample_gnp(16, 0.25, &mut rng).unwrap();
        let p = exact_profile(&g, Side::Whole, 5, DEFAULT_BUDGET).unwrap();
        for w in p.entries.windows(2) {
            assert!(w[1].min_ratio <= w[0].min_ratio);
        }
        for e in &p.entries {
            let un = unique_neighbor_list(&g, &e.argmin).len();
            assert_eq!(un as f64 / e.argmin.len() as f64, e.min_ratio);
        }
    }

    #[test]
    fn local_enumeration_agrees_with_lexicographic() {
        let mut rng = RngStream::new(4, 0).rng();
        for _ in 0..20 {
            let g = sampling::sample_gnp(18, 0.15, &mut rng).unwrap();
            let cands: Vec<usize> = (0..18).collect();
            let a = exact_profile(&g, Side::Whole, 4, DEFAULT_BUDGET).unwrap();
            let b = exact_profile_local(&g, &cands, Side::Whole, 4, DEFAULT_BUDGET).unwrap();
            for t in 1..=4 {
                assert_eq!(a.ratio(t), b.ratio(t));
            }
        }
    }

    #[test]
    fn sampled_witness_bounds_exact_from_above() {
        let mut rng = RngStream::new(5, 0).rng();
        let g = sampling::sample_gnp(14, 0.3, &mut rng).unwrap();
        let cands: Vec<usize> = (0..14).collect();
        let exact = exact_profile(&g, Side::Whole, 4, DEFAULT_BUDGET).unwrap();
        let w = sampled_profile_lower_witness(&g, &cands, Side::Whole, 4, 50, &mut rng);
        assert_eq!(w.kind, ProfileKind::WitnessUpperBound);
        for t in 1..=4 {
            assert!(w.ratio(t) >= exact.ratio(t));
        }
        assert!(sampled_profile_lower_witness(&g, &cands, Side::Whole, 4, 0, &mut rng).entries.is_empty());
        let a = sampled_profile_lower_witness(&g, &cands, Side::Whole, 3, 10, &mut RngStream::new(1, 1).rng());
        let b = sampled_profile_lower_witness(&g, &cands, Side::Whole, 3, 10, &mut RngStream::new(1, 1).rng());
        assert_eq!(a, b);
    }

    #[test]
    fn edge_density_on_complete_graph() {
        // K_{D+1}: normalized eigenvalues are 1 and -1/D; the clamped bound holds exactly.
        let g = complete(6);
        let mut rng = RngStream::new(0, 0).rng();
        let v = edge_density_check(&g, -1.0 / 5.0, 1.0, 20, &mut rng).unwrap();
        assert!(v.is_empty(), "{v:?}");
    }

    #[test]
    fn low_degree_mass_examples() {
        let m = Graph::from_edges(6, &[(0, 1), (2, 3), (4, 5)], false).unwrap();
        let r = low_degree_mass_check(&m, 1.0);
        assert_eq!(r.ok, Some(true));
        assert_eq!(r.low_vertices.len(), 6);
        let star = Graph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)], false).unwrap();
        let r = low_degree_mass_check(&star, 2.0);
        assert_eq!(r.ok, Some(true));
        assert_eq!((r.two_e, r.low_degree_mass), (10, 5));
        let r = low_degree_mass_check(&complete(5), 1.0);
        assert!(r.hypothesis_violation.is_some());
        assert_eq!(r.ok, None);
    }

    #[test]
    fn flow_and_exhaustive_density_agree() {
        let mut rng = RngStream::new(6, 0).rng();
        for i in 0..60 {
            let g = sampling::sample_gnp(12, 0.35, &mut rng).unwrap();
            let gamma = 1.0 + (i % 5) as f64 * 0.5;
            let a = density_violation_exhaustive(&g, gamma);
            let b = density_violation_flow(&g, gamma);
            assert_eq!(a.is_some(), b.is_some(), "gamma {gamma}");
            if let Some(s) = b {
                assert!(2.0 * edges_within(&g, &s) as f64 > gamma * s.len() as f64);
            }
        }
    }

    #[test]
    fn density_check_examples() {
        let k34 = complete_bipartite(3, 4);
        let r = subgraph_density_check(&k34, &[0, 1, 2], &[0, 1, 2, 3], 0.05, 0.0, DensityConstants::default()).unwrap();
        assert_eq!(r.lhs, 6.0);
        assert!(!r.in_regime);
        assert_eq!(r.status(), Status::Flagged);
        assert!(subgraph_density_check(&k34, &[], &[0], 0.05, 0.0, DensityConstants::default()).is_err());
        // A path L0 - R0 - L1 induces a forest with d1 = 1.
        let r = subgraph_density_check(&k34, &[0, 1], &[0], 0.05, 0.0, DensityConstants::default()).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.ok);
    }

    #[test]
    fn vertex_expansion_examples() {
        let g = sampling::sample_biregular(40, 30, 3, 4, &mut RngStream::new(2, 0).rng(), None).unwrap();
        let r = vertex_expansion_corollary_check(&g, &[0], 0.05, 0.0, DensityConstants::default()).unwrap();
        assert_eq!(r.lhs, 1.0);
        assert!(r.ok);
        let disjoint = (1..40).find(|&l| g.left_neighbors(l).iter().all(|r| !g.left_neighbors(0).contains(r))).unwrap();
        let r = vertex_expansion_corollary_check(&g, &[0, disjoint], 0.05, 0.0, DensityConstants::default()).unwrap();
        assert_eq!(r.lhs, 1.0);
    }

    #[test]
    fn gamma_inverts_near_ramanujan_form() {
        let ram = 2f64.sqrt() + 3f64.sqrt();
        let g = gamma_from_lambda2(3, 4, ram * (1.0 + 0.5 / 4.0));
        assert!((g - 0.5).abs() < 1e-12);
        assert_eq!(gamma_from_lambda2(3, 4, ram * 0.9), 0.0);
    }
}
