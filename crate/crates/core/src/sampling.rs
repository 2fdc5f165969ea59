//! Seeded random graph models.
//!
//! Every stream is a ChaCha20 generator keyed by `(master_seed, stream_id)`: the master seed
//! goes through `seed_from_u64` and the stream id selects the ChaCha stream. Output is
//! identical across platforms for a fixed `rand`/`rand_chacha` version.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::cycles;
use crate::expansion::{self, ExpansionProfile};
use crate::graphs::{BipartiteGraph, Graph, Side};

#[derive(Debug, Error)]
pub enum SamplingError {
    #[error("invalid parameters: {0}")]
    Input(String),
    #[error("rejection sampling failed after {attempts} attempts")]
    Exhausted { attempts: usize },
    #[error("gadget search failed after {trials} trials")]
    SearchFailed { trials: usize, best: Box<Option<(BipartiteGraph, ExpansionProfile)>> },
    #[error(transparent)]
    Profile(#[from] expansion::ExpansionError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self { master_seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut r = ChaCha20Rng::seed_from_u64(self.master_seed);
        r.set_stream(self.stream_id);
        r
    }

    pub fn substream(&self, id: u64) -> Self {
        Self { master_seed: self.master_seed ^ self.stream_id.rotate_left(17), stream_id: id }
    }
}

/// `10 * exp(d1 * d2 / 2)`, capped at one million.
pub fn default_max_attempts(d1: usize, d2: usize) -> usize {
    let a = 10.0 * ((d1 * d2) as f64 / 2.0).exp();
    a.clamp(1.0, 1e6) as usize
}

fn check_biregular_params(n1: usize, n2: usize, d1: usize, d2: usize) -> Result<(), SamplingError> {
    if n1 * d1 != n2 * d2 {
        return Err(SamplingError::Input(format!(
            "degree equation violated: {n1}*{d1} != {n2}*{d2}"
        )));
    }
    if d1 > n2 || d2 > n1 {
        return Err(SamplingError::Input("degree exceeds opposite side size".into()));
    }
    Ok(())
}

/// Above this expected number of rejections the default sampler switches to the switch chain.
pub const REJECTION_LIMIT: f64 = 1e4;

/// Simple `(d1, d2)`-biregular graph. Configuration-model pairing rejected until simple
/// (uniform); with `max_attempts = None` and an expected rejection count
/// `exp((d1-1)(d2-1)/2)` above [`REJECTION_LIMIT`], a run of the switch chain instead
/// (uniform stationary law, approximately uniform after mixing).
pub fn sample_biregular<R: Rng>(
    n1: usize,
    n2: usize,
    d1: usize,
    d2: usize,
    rng: &mut R,
    max_attempts: Option<usize>,
) -> Result<BipartiteGraph, SamplingError> {
    check_biregular_params(n1, n2, d1, d2)?;
    if max_attempts.is_none() && (((d1.max(1) - 1) * (d2.max(1) - 1)) as f64 / 2.0).exp() > REJECTION_LIMIT {
        return Ok(switch_chain_biregular(n1, n2, d1, rng));
    }
    let attempts = max_attempts.unwrap_or_else(|| default_max_attempts(d1, d2));
    let mut stubs: Vec<usize> = (0..n2).flat_map(|r| std::iter::repeat_n(r, d2)).collect();
    let mut row = Vec::with_capacity(d1);
    'attempt: for _ in 0..attempts {
        stubs.shuffle(rng);
        for l in 0..n1 {
            row.clear();
            row.extend_from_slice(&stubs[l * d1..(l + 1) * d1]);
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                continue 'attempt;
            }
        }
        let edges: Vec<(usize, usize)> =
            (0..n1).flat_map(|l| stubs[l * d1..(l + 1) * d1].iter().map(move |&r| (l, r))).collect();
        return Ok(BipartiteGraph::from_edges(n1, n2, &edges, false).expect("simple by check"));
    }
    Err(SamplingError::Exhausted { attempts })
}

/// Circulant start `l ~ (l d1 + j) mod n2`, then `20 m ln m + 1000` proposed switches
/// `(l, r), (l', r') -> (l, r'), (l', r)`, each kept when the result stays simple.
fn switch_chain_biregular<R: Rng>(n1: usize, n2: usize, d1: usize, rng: &mut R) -> BipartiteGraph {
    let mut edges: Vec<(usize, usize)> = (0..n1).flat_map(|l| (0..d1).map(move |j| (l, (l * d1 + j) % n2))).collect();
    let m = edges.len();
    let mut has = std::collections::HashSet::with_capacity(2 * m);
    has.extend(edges.iter().copied());
    if m >= 2 {
        let steps = 20 * m * ((m as f64).ln().ceil() as usize) + 1000;
        for _ in 0..steps {
            let i = rng.random_range(0..m);
            let j = rng.random_range(0..m);
            let ((a, b), (c, d)) = (edges[i], edges[j]);
            if a == c || b == d || has.contains(&(a, d)) || has.contains(&(c, b)) {
                continue;
            }
            has.remove(&(a, b));
            has.remove(&(c, d));
            has.insert((a, d));
            has.insert((c, b));
            edges[i] = (a, d);
            edges[j] = (c, b);
        }
    }
    edges.sort_unstable();
    BipartiteGraph::from_edges(n1, n2, &edges, false).expect("simple by construction")
}

/// Configuration model on the raw pairing, keeping parallel edges.
pub fn sample_biregular_multigraph<R: Rng>(
    n1: usize,
    n2: usize,
    d1: usize,
    d2: usize,
    rng: &mut R,
) -> Result<BipartiteGraph, SamplingError> {
    if n1 * d1 != n2 * d2 {
        return Err(SamplingError::Input("degree equation violated".into()));
    }
    let mut stubs: Vec<usize> = (0..n2).flat_map(|r| std::iter::repeat_n(r, d2)).collect();
    stubs.shuffle(rng);
    let edges: Vec<(usize, usize)> =
        stubs.iter().enumerate().map(|(i, &r)| (i / d1.max(1), r)).collect();
    Ok(BipartiteGraph::from_edges(n1, n2, &edges, true).expect("in range"))
}

/// Uniform simple `d`-regular graph on `n` vertices (configuration model with rejection).
/// With `max_attempts = None` and `exp((d^2 - 1)/4)` above [`REJECTION_LIMIT`], a run of the
/// switch chain instead.
pub fn sample_regular<R: Rng>(
    n: usize,
    d: usize,
    rng: &mut R,
    max_attempts: Option<usize>,
) -> Result<Graph, SamplingError> {
    if !(n * d).is_multiple_of(2) || d >= n.max(1) {
        return Err(SamplingError::Input(format!("no simple {d}-regular graph on {n} vertices")));
    }
    if max_attempts.is_none() && ((d * d) as f64 / 4.0 - 0.25).exp() > REJECTION_LIMIT {
        return Ok(switch_chain_regular(n, d, rng));
    }
    let attempts = max_attempts.unwrap_or_else(|| default_max_attempts(d, d));
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    let mut seen = std::collections::HashSet::new();
    'attempt: for _ in 0..attempts {
        stubs.shuffle(rng);
        seen.clear();
        let mut edges = Vec::with_capacity(n * d / 2);
        for pair in stubs.chunks(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
            edges.push((u, v));
        }
        return Ok(Graph::from_edges(n, &edges, false).expect("simple by check"));
    }
    Err(SamplingError::Exhausted { attempts })
}

/// Circulant start (offsets `1..=d/2`, plus `n/2` for odd `d`), then `20 m ln m + 1000`
/// proposed switches `{a, b}, {c, e} -> {a, c}, {b, e}` (or `{a, e}, {b, c}`), each kept when
/// the result stays simple.
fn switch_chain_regular<R: Rng>(n: usize, d: usize, rng: &mut R) -> Graph {
    let key = |u: usize, v: usize| (u.min(v), u.max(v));
    let mut edges: Vec<(usize, usize)> = (0..n).flat_map(|v| (1..=d / 2).map(move |k| (v, (v + k) % n))).collect();
    if d % 2 == 1 {
        edges.extend((0..n / 2).map(|v| (v, v + n / 2)));
    }
    let mut edges: Vec<(usize, usize)> = edges.into_iter().map(|(u, v)| key(u, v)).collect();
    let m = edges.len();
    let mut has: std::collections::HashSet<(usize, usize)> = edges.iter().copied().collect();
    if m >= 2 {
        let steps = 20 * m * ((m as f64).ln().ceil() as usize) + 1000;
        for _ in 0..steps {
            let i = rng.random_range(0..m);
            let j = rng.random_range(0..m);
            let ((a, b), (mut c, mut e)) = (edges[i], edges[j]);
            if rng.random::<bool>() {
                std::mem::swap(&mut c, &mut e);
            }
            if a == c || a == e || b == c || b == e || has.contains(&key(a, c)) || has.contains(&key(b, e)) {
                continue;
            }
            has.remove(&edges[i]);
            has.remove(&edges[j]);
            edges[i] = key(a, c);
            edges[j] = key(b, e);
            has.insert(edges[i]);
            has.insert(edges[j]);
        }
    }
    edges.sort_unstable();
    Graph::from_edges(n, &edges, false).expect("simple by construction")
}

/// Uniform bipartite graph with exactly `m` distinct edges.
pub fn sample_er_m<R: Rng>(n1: usize, n2: usize, m: usize, rng: &mut R) -> Result<BipartiteGraph, SamplingError> {
    let total = n1 * n2;
    if m > total {
        return Err(SamplingError::Input(format!("m = {m} exceeds n1*n2 = {total}")));
    }
    let mut picks: Vec<usize> = rand::seq::index::sample(rng, total, m).into_vec();
    picks.sort_unstable();
    let edges: Vec<(usize, usize)> = picks.into_iter().map(|k| (k / n2, k % n2)).collect();
    Ok(BipartiteGraph::from_edges(n1, n2, &edges, false).expect("distinct"))
}

/// Each of the `n1 * n2` potential edges independently with probability `p`.
pub fn sample_er_p<R: Rng>(n1: usize, n2: usize, p: f64, rng: &mut R) -> Result<BipartiteGraph, SamplingError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(SamplingError::Input(format!("p = {p} outside [0, 1]")));
    }
    let mut edges = Vec::new();
    for l in 0..n1 {
        for r in 0..n2 {
            if rng.random_bool(p) {
                edges.push((l, r));
            }
        }
    }
    Ok(BipartiteGraph::from_edges(n1, n2, &edges, false).expect("distinct"))
}

/// `G(n, p)` on general graphs.
pub fn sample_gnp<R: Rng>(n: usize, p: f64, rng: &mut R) -> Result<Graph, SamplingError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(SamplingError::Input(format!("p = {p} outside [0, 1]")));
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::from_edges(n, &edges, false).expect("distinct"))
}

/// Biregular graph with girth at least `min_girth`, grown edge by edge: each new edge from a
/// left vertex goes to a right vertex with spare capacity that is farthest from it in the
/// current graph, then short cycles are removed by degree-preserving switches. Retries with fresh
/// randomness until the girth target is met.
pub fn sample_biregular_girth<R: Rng>(
    n1: usize,
    n2: usize,
    d1: usize,
    d2: usize,
    min_girth: usize,
    rng: &mut R,
    max_attempts: usize,
) -> Result<BipartiteGraph, SamplingError> {
    check_biregular_params(n1, n2, d1, d2)?;
    let n = n1 + n2;
    for _ in 0..max_attempts {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut order: Vec<usize> = (0..n1).collect();
        order.shuffle(rng);
        let mut stuck = false;
        'grow: for round in 0..d1 {
            for &l in &order {
                let _ = round;
                let dist = bfs_dist(&adj, l);
                let mut best: Vec<usize> = Vec::new();
                let mut best_key = (0usize, usize::MAX);
                for r in 0..n2 {
                    let w = n1 + r;
                    if adj[w].len() >= d2 || adj[l].contains(&w) {
                        continue;
                    }
                    let key = (dist[w], adj[w].len());
                    if key.0 > best_key.0 || (key.0 == best_key.0 && key.1 < best_key.1) {
                        best_key = key;
                        best.clear();
                    }
                    if key == best_key {
                        best.push(w);
                    }
                }
                if best.is_empty() {
                    stuck = true;
                    break 'grow;
                }
                let w = best[rng.random_range(0..best.len())];
                adj[l].push(w);
                adj[w].push(l);
            }
        }
        if stuck {
            continue;
        }
        let mut edges: Vec<(usize, usize)> =
            (0..n1).flat_map(|l| adj[l].iter().map(move |&w| (l, w)).collect::<Vec<_>>()).collect();
        let switches = 50 * edges.len();
        if repair_short_cycles(&mut adj, &mut edges, min_girth, switches, rng) {
            let edges: Vec<(usize, usize)> = edges.iter().map(|&(l, w)| (l, w - n1)).collect();
            let b = BipartiteGraph::from_edges(n1, n2, &edges, false).expect("simple by construction");
            debug_assert!(cycles::girth(&b.to_graph()).is_none_or(|g| g >= min_girth));
            return Ok(b);
        }
    }
    Err(SamplingError::Exhausted { attempts: max_attempts })
}

/// Edges lying on a cycle shorter than `min_girth`.
fn short_cycle_edges(adj: &[Vec<usize>], edges: &[(usize, usize)], min_girth: usize) -> Vec<usize> {
    let cap = min_girth.saturating_sub(2);
    let mut bad = Vec::new();
    let mut dist = vec![usize::MAX; adj.len()];
    let mut queue = std::collections::VecDeque::new();
    for (i, &(u, v)) in edges.iter().enumerate() {
        // Distance from u to v avoiding edge uv, truncated at `cap`.
        let mut seen = vec![u];
        dist[u] = 0;
        queue.clear();
        queue.push_back(u);
        let mut hit = false;
        while let Some(x) = queue.pop_front() {
            if dist[x] >= cap {
                continue;
            }
            for &y in &adj[x] {
                if (x == u && y == v) || dist[y] != usize::MAX {
                    continue;
                }
                if y == v {
                    hit = true;
                    break;
                }
                dist[y] = dist[x] + 1;
                seen.push(y);
                queue.push_back(y);
            }
            if hit {
                break;
            }
        }
        for x in seen {
            dist[x] = usize::MAX;
        }
        if hit {
            bad.push(i);
        }
    }
    bad
}

/// Degree-preserving switches `(l, w), (l', w') -> (l, w'), (l', w)` started from an edge on a
/// short cycle, kept when the number of such edges does not grow. True once none remain.
fn repair_short_cycles<R: Rng>(
    adj: &mut [Vec<usize>],
    edges: &mut [(usize, usize)],
    min_girth: usize,
    max_switches: usize,
    rng: &mut R,
) -> bool {
    let mut bad = short_cycle_edges(adj, edges, min_girth);
    for _ in 0..max_switches {
        if bad.is_empty() {
            return true;
        }
        let i = bad[rng.random_range(0..bad.len())];
        let j = rng.random_range(0..edges.len());
        let ((l, w), (l2, w2)) = (edges[i], edges[j]);
        if l == l2 || w == w2 || adj[l].contains(&w2) || adj[l2].contains(&w) {
            continue;
        }
        let relink = |adj: &mut [Vec<usize>], a: usize, from: usize, to: usize| {
            let k = adj[a].iter().position(|&x| x == from).expect("edge present");
            adj[a][k] = to;
        };
        relink(adj, l, w, w2);
        relink(adj, w, l, l2);
        relink(adj, l2, w2, w);
        relink(adj, w2, l2, l);
        edges[i] = (l, w2);
        edges[j] = (l2, w);
        let next = short_cycle_edges(adj, edges, min_girth);
        if next.len() <= bad.len() {
            bad = next;
        } else {
            relink(adj, l, w2, w);
            relink(adj, w, l2, l);
            relink(adj, l2, w, w2);
            relink(adj, w2, l, l2);
            edges[i] = (l, w);
            edges[j] = (l2, w2);
        }
    }
    bad.is_empty()
}

fn bfs_dist(adj: &[Vec<usize>], s: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[s] = 0;
    let mut queue = std::collections::VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// A gadget accepted by [`gadget_search`].
#[derive(Clone, Debug)]
pub struct Gadget {
    pub graph: BipartiteGraph,
    pub profile: ExpansionProfile,
    pub trial: usize,
}

/// Samples `(d1t, d2t)`-biregular graphs on `D1 + D2` vertices (trial `i` uses stream `i` of
/// `master_seed`) and returns the lowest-index one whose exact whole-graph profile satisfies
/// `P_H(t) >= floor(t)` for `1 <= t <= t_max`.
#[allow(clippy::too_many_arguments)]
pub fn gadget_search<F>(
    left: usize,
    right: usize,
    d1t: usize,
    d2t: usize,
    floor: F,
    t_max: usize,
    master_seed: u64,
    trials: usize,
    budget: u64,
) -> Result<Gadget, SamplingError>
where
    F: Fn(usize) -> f64 + Sync,
{
    check_biregular_params(left, right, d1t, d2t)?;
    let required = expansion::subset_count(left + right, t_max);
    if required > budget {
        return Err(expansion::ExpansionError::BudgetExceeded { required, budget }.into());
    }
    let evaluate = |trial: usize| -> Option<(BipartiteGraph, ExpansionProfile, f64)> {
        let mut rng = RngStream::new(master_seed, trial as u64).rng();
        let h = sample_biregular(left, right, d1t, d2t, &mut rng, None).ok()?;
        let prof = expansion::exact_profile(&h.to_graph(), Side::Whole, t_max, budget).ok()?;
        let slack = (1..=t_max)
            .map(|t| prof.ratio(t) - floor(t))
            .fold(f64::INFINITY, f64::min);
        Some((h, prof, slack))
    };
    let mut best: Option<(BipartiteGraph, ExpansionProfile, f64)> = None;
    const CHUNK: usize = 32;
    let mut start = 0;
    while start < trials {
        let end = (start + CHUNK).min(trials);
        let results: Vec<_> = (start..end).into_par_iter().map(evaluate).collect();
        for (offset, res) in results.into_iter().enumerate() {
            let Some((h, prof, slack)) = res else { continue };
            if slack >= 0.0 {
                return Ok(Gadget { graph: h, profile: prof, trial: start + offset });
            }
            if best.as_ref().is_none_or(|b| slack > b.2) {
                best = Some((h, prof, slack));
            }
        }
        start = end;
    }
    Err(SamplingError::SearchFailed {
        trials,
        best: Box::new(best.map(|(h, p, _)| (h, p))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn rng(seed: u64) -> ChaCha20Rng {
        RngStream::new(seed, 0).rng()
    }

    #[test]
    fn perfect_matching_forced() {
        let g = sample_biregular(4, 4, 1, 1, &mut rng(1), None).unwrap();
        assert!(g.validate_biregular(1, 1));
    }

    #[test]
    fn small_biregular_passes_degree_check() {
        let g = sample_biregular(3, 2, 2, 3, &mut rng(2), None).unwrap();
        assert!(g.validate_biregular(2, 3));
        let g = sample_biregular(8, 4, 2, 4, &mut rng(3), None).unwrap();
        assert!(g.validate_biregular(2, 4));
    }

    #[test]
    fn degree_sum_mismatch_rejected() {
        assert!(matches!(sample_biregular(2, 3, 2, 2, &mut rng(0), None), Err(SamplingError::Input(_))));
    }

    #[test]
    fn exhausted_reports_attempts() {
        // (2,2) on 2+2 forces K_{2,2}; the pairing is simple with probability 2/3 per draw, so
        // a zero-attempt budget must fail.
        match sample_biregular(2, 2, 2, 2, &mut rng(0), Some(0)) {
            Err(SamplingError::Exhausted { attempts: 0 }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let a = sample_biregular(30, 20, 4, 6, &mut RngStream::new(9, 1).rng(), None).unwrap();
        let b = sample_biregular(30, 20, 4, 6, &mut RngStream::new(9, 1).rng(), None).unwrap();
        let c = sample_biregular(30, 20, 4, 6, &mut RngStream::new(9, 2).rng(), None).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn er_forced_and_empty() {
        let g = sample_er_m(2, 2, 4, &mut rng(0)).unwrap();
        assert_eq!(g.m(), 4);
        assert!(sample_er_m(2, 2, 5, &mut rng(0)).is_err());
        assert_eq!(sample_er_p(7, 9, 0.0, &mut rng(0)).unwrap().m(), 0);
        assert!(sample_er_p(2, 2, 1.5, &mut rng(0)).is_err());
    }

    #[test]
    fn er_p_edge_count_moments() {
        let mut r = rng(11);
        let samples = 10_000;
        let total: usize = (0..samples).map(|_| sample_er_p(50, 50, 0.3, &mut r).unwrap().m()).sum();
        let mean = total as f64 / samples as f64;
        let sigma = (2500.0f64 * 0.3 * 0.7).sqrt();
        // 3 sigma for a single draw; the mean of 10^4 draws is far tighter than this.
        assert!((mean - 750.0).abs() <= 3.0 * sigma, "mean {mean}");
        assert!((mean - 750.0).abs() <= 3.0 * sigma / (samples as f64).sqrt() * 1.5, "mean {mean}");
    }

    #[test]
    fn biregular_uniform_on_tiny_space() {
        // The six labeled 2-regular simple bipartite graphs on 3 + 3 are K_{3,3} minus a
        // perfect matching.
        let mut r = rng(5);
        let draws = 50_000;
        let mut counts: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
        for _ in 0..draws {
            let g = sample_biregular(3, 3, 2, 2, &mut r, None).unwrap();
            *counts.entry(g.edges()).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        let expected = draws as f64 / 6.0;
        let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 5 degrees of freedom, 0.999 quantile is about 20.5.
        assert!(chi2 < 20.5, "chi2 {chi2}");
        let tv: f64 = counts.values().map(|&c| (c as f64 / draws as f64 - 1.0 / 6.0).abs()).sum::<f64>() / 2.0;
        assert!(tv < 0.05, "tv {tv}");
    }

    #[test]
    fn regular_sampler() {
        let g = sample_regular(20, 3, &mut rng(4), None).unwrap();
        assert_eq!(g.regular_degree(), Some(3));
        assert!(sample_regular(5, 3, &mut rng(4), None).is_err());
    }

    #[test]
    fn dense_regular_uses_switch_chain() {
        for (n, d) in [(64, 8), (21, 10), (30, 7)] {
            let g = sample_regular(n, d, &mut rng(3), None).unwrap();
            assert_eq!(g.regular_degree(), Some(d));
            assert!(!g.is_multi());
        }
        let a = sample_regular(64, 8, &mut rng(4), None).unwrap();
        let b = sample_regular(64, 8, &mut rng(5), None).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn dense_biregular_uses_switch_chain() {
        let g = sample_biregular(12, 12, 6, 6, &mut rng(5), None).unwrap();
        assert!(g.validate_biregular(6, 6));
        let h = sample_biregular(12, 12, 6, 6, &mut rng(6), None).unwrap();
        assert_ne!(g, h);
    }

    #[test]
    fn girth_sampler_meets_target() {
        let g = sample_biregular_girth(40, 20, 3, 6, 6, &mut rng(8), 50).unwrap();
        assert!(g.validate_biregular(3, 6));
        assert!(cycles::girth(&g.to_graph()).unwrap() >= 6);
    }

    #[test]
    fn gadget_vacuous_floor_returns_first_sample() {
        let g = gadget_search(6, 6, 2, 2, |_| 0.0, 2, 3, 10, 1_000_000).unwrap();
        assert_eq!(g.trial, 0);
        let first = sample_biregular(6, 6, 2, 2, &mut RngStream::new(3, 0).rng(), None).unwrap();
        assert_eq!(g.graph, first);
    }

    #[test]
    fn gadget_singletons_see_full_degree() {
        let g = gadget_search(8, 8, 3, 3, |t| if t == 1 { 3.0 } else { 0.0 }, 1, 1, 20, 1_000_000).unwrap();
        for v in 0..16 {
            let s = crate::graphs::VertexSet::whole(vec![v], 16).unwrap();
            assert_eq!(expansion::unique_neighbors(&g.graph.to_graph(), &s).len(), 3);
        }
    }

    #[test]
    fn gadget_failure_carries_best() {
        match gadget_search(4, 4, 2, 2, |_| 100.0, 2, 0, 5, 1_000_000) {
            Err(SamplingError::SearchFailed { trials: 5, best }) => assert!(best.is_some()),
            other => panic!("{other:?}"),
        }
    }
}
