//! Finite groups as multiplication tables, Cayley graphs, generator trimming and group-action
//! certificates.

use std::collections::HashMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::{BipartiteGraph, Graph};

#[derive(Debug, Error, PartialEq)]
pub enum CayleyError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("i/o error: {0}")]
    Io(String),
}

/// Largest group stored as an explicit table.
pub const MAX_TABLE_ORDER: usize = 5000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    id: usize,
}

impl FiniteGroup {
    /// Validates the table: closure, a two-sided identity, inverses, and associativity
    /// (exhaustive up to order 64, 20000 seeded random triples beyond).
    pub fn from_table(order: usize, mul: Vec<u32>) -> Result<Self, CayleyError> {
        if order == 0 || mul.len() != order * order {
            return Err(CayleyError::Input("table must be order x order".into()));
        }
        if order > MAX_TABLE_ORDER {
            return Err(CayleyError::Input(format!("order {order} exceeds {MAX_TABLE_ORDER}")));
        }
        if mul.iter().any(|&x| x as usize >= order) {
            return Err(CayleyError::Input("table entry out of range".into()));
        }
        let at = |a: usize, b: usize| mul[a * order + b] as usize;
        let id = (0..order)
            .find(|&e| (0..order).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or_else(|| CayleyError::Input("no identity element".into()))?;
        let mut inv = vec![0u32; order];
        for a in 0..order {
            let b = (0..order)
                .find(|&b| at(a, b) == id)
                .ok_or_else(|| CayleyError::Input(format!("element {a} has no inverse")))?;
            if at(b, a) != id {
                return Err(CayleyError::Input(format!("element {a} has no two-sided inverse")));
            }
            inv[a] = b as u32;
        }
        let assoc = |a: usize, b: usize, c: usize| at(at(a, b), c) == at(a, at(b, c));
        if order <= 64 {
            for a in 0..order {
                for b in 0..order {
                    for c in 0..order {
                        if !assoc(a, b, c) {
                            return Err(CayleyError::Input(format!("not associative at ({a}, {b}, {c})")));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha20Rng::seed_from_u64(order as u64);
            for _ in 0..20_000 {
                let (a, b, c) = (rng.random_range(0..order), rng.random_range(0..order), rng.random_range(0..order));
                if !assoc(a, b, c) {
                    return Err(CayleyError::Input(format!("not associative at ({a}, {b}, {c})")));
                }
            }
        }
        Ok(Self { order, mul, inv, id })
    }

    fn from_fn(order: usize, f: impl Fn(usize, usize) -> usize) -> Self {
        let mul: Vec<u32> = (0..order * order).map(|k| f(k / order, k % order) as u32).collect();
        Self::from_table(order, mul).expect("constructed group is valid")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.id
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn table(&self) -> &[u32] {
        &self.mul
    }

    /// `Z/n`.
    pub fn cyclic(n: usize) -> Self {
        Self::from_fn(n, |a, b| (a + b) % n)
    }

    /// Direct product; `(x, y)` is element `x * |h| + y`.
    pub fn product(g: &Self, h: &Self) -> Self {
        let m = h.order;
        Self::from_fn(g.order * m, |a, b| g.mul(a / m, b / m) * m + h.mul(a % m, b % m))
    }

    /// `S_k` with permutations in lexicographic order; `(a * b)(i) = a(b(i))`.
    pub fn symmetric(k: usize) -> Self {
        let perms = permutations(k);
        let index: HashMap<Vec<usize>, usize> = perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        Self::from_fn(perms.len(), |a, b| {
            let c: Vec<usize> = (0..k).map(|i| perms[a][perms[b][i]]).collect();
            index[&c]
        })
    }
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..k).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..k).rev().find(|&i| p[i - 1] < p[i]) else { break };
        let j = (i..k).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSet {
    /// Sorted element indices.
    pub members: Vec<usize>,
    pub closed_under_inverse: bool,
}

impl GeneratorSet {
    /// Sorts, rejects duplicates, out-of-range elements and the identity.
    pub fn new(g: &FiniteGroup, mut members: Vec<usize>) -> Result<Self, CayleyError> {
        members.sort_unstable();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(CayleyError::Input("duplicate generator".into()));
        }
        if members.iter().any(|&a| a >= g.order()) {
            return Err(CayleyError::Input("generator out of range".into()));
        }
        if members.contains(&g.identity()) {
            return Err(CayleyError::Input("identity among generators".into()));
        }
        let closed = members.iter().all(|&a| members.binary_search(&g.inv(a)).is_ok());
        Ok(Self { members, closed_under_inverse: closed })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn position(&self, a: usize) -> Option<usize> {
        self.members.binary_search(&a).ok()
    }
}

/// `Cay(G, A)`: edge `{x, x s}` for every `x` and `s ∈ A`.
pub fn cayley_graph(g: &FiniteGroup, a: &GeneratorSet) -> Result<Graph, CayleyError> {
    if !a.closed_under_inverse {
        return Err(CayleyError::Input("generators are not closed under inversion".into()));
    }
    if a.members.contains(&g.identity()) {
        return Err(CayleyError::Input("identity among generators".into()));
    }
    let edges: Vec<(usize, usize)> = (0..g.order())
        .flat_map(|x| a.members.iter().map(move |&s| (x, g.mul(x, s))))
        .filter(|&(x, y)| x < y)
        .collect();
    Graph::from_edges(g.order(), &edges, false).map_err(|e| CayleyError::Input(e.to_string()))
}

/// Removes `|A| - D` generators keeping inverse-closure: first whole pairs `{a, a^-1}` with
/// `a != a^-1`, then self-inverse elements. Candidates are ranked by ascending index and
/// removed from the top (pairs ranked by their smaller element).
pub fn trim_generators(g: &FiniteGroup, a: &GeneratorSet, target: usize) -> Result<GeneratorSet, CayleyError> {
    if !a.closed_under_inverse {
        return Err(CayleyError::Input("generators are not closed under inversion".into()));
    }
    if a.len() < target {
        return Err(CayleyError::Input(format!("cannot trim {} generators up to {target}", a.len())));
    }
    if !(a.len() - target).is_multiple_of(2) {
        return Err(CayleyError::Input(format!("parity mismatch: |A| = {} and D = {target}", a.len())));
    }
    let mut remove = a.len() - target;
    let mut pairs: Vec<usize> = a.members.iter().copied().filter(|&x| g.inv(x) != x && x < g.inv(x)).collect();
    let mut singles: Vec<usize> = a.members.iter().copied().filter(|&x| g.inv(x) == x).collect();
    let mut dropped = Vec::new();
    while remove >= 2 {
        let Some(x) = pairs.pop() else { break };
        dropped.extend([x, g.inv(x)]);
        remove -= 2;
    }
    while remove > 0 {
        let x = singles.pop().expect("enough self-inverse elements remain");
        dropped.push(x);
        remove -= 1;
    }
    let kept: Vec<usize> = a.members.iter().copied().filter(|x| !dropped.contains(x)).collect();
    GeneratorSet::new(g, kept)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionReport {
    pub homomorphism: bool,
    pub free: bool,
    pub preserves_edges: bool,
    pub ok: bool,
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&x| x < p.len() && !std::mem::replace(&mut seen[x], true))
}

/// Checks that `act_l[g]`, `act_r[g]` define a free action of `g` on `z` by automorphisms:
/// homomorphism on sampled pairs (all pairs up to order 64), only the identity fixes a vertex,
/// and each permutation in `generators` (all elements if `None`) maps edges to edges.
pub fn verify_group_action(
    z: &BipartiteGraph,
    g: &FiniteGroup,
    act_l: &[Vec<usize>],
    act_r: &[Vec<usize>],
    generators: Option<&[usize]>,
) -> Result<ActionReport, CayleyError> {
    let n = g.order();
    if act_l.len() != n || act_r.len() != n {
        return Err(CayleyError::Input("one permutation per group element is required".into()));
    }
    if act_l.iter().any(|p| p.len() != z.n_left()) || act_r.iter().any(|p| p.len() != z.n_right()) {
        return Err(CayleyError::Input("permutation sizes do not match the graph".into()));
    }
    if !act_l.iter().chain(act_r).all(|p| is_permutation(p)) {
        return Ok(ActionReport { homomorphism: false, free: false, preserves_edges: false, ok: false });
    }
    let pairs: Vec<(usize, usize)> = if n <= 64 {
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect()
    } else {
        let mut rng = ChaCha20Rng::seed_from_u64(0x9e37);
        (0..2000).map(|_| (rng.random_range(0..n), rng.random_range(0..n))).collect()
    };
    let composes = |act: &[Vec<usize>], a: usize, b: usize| {
        let ab = &act[g.mul(a, b)];
        (0..ab.len()).all(|v| ab[v] == act[a][act[b][v]])
    };
    let homomorphism = pairs.par_iter().all(|&(a, b)| composes(act_l, a, b) && composes(act_r, a, b));
    let id = g.identity();
    let free = (0..n).into_par_iter().all(|a| {
        let fixes = |p: &Vec<usize>| p.iter().enumerate().any(|(v, &w)| v == w);
        if a == id {
            act_l[a].iter().enumerate().all(|(v, &w)| v == w) && act_r[a].iter().enumerate().all(|(v, &w)| v == w)
        } else {
            !fixes(&act_l[a]) && !fixes(&act_r[a])
        }
    });
    let all: Vec<usize> = (0..n).collect();
    let gens = generators.unwrap_or(&all);
    let edges = z.edges();
    let preserves_edges = gens.par_iter().all(|&a| edges.iter().all(|&(l, r)| z.has_edge(act_l[a][l], act_r[a][r])));
    let ok = homomorphism && free && preserves_edges;
    Ok(ActionReport { homomorphism, free, preserves_edges, ok })
}

/// Left translation on the vertices of a Cayley graph: `act[h][x] = h x`.
pub fn left_translations(g: &FiniteGroup) -> Vec<Vec<usize>> {
    (0..g.order()).map(|h| (0..g.order()).map(|x| g.mul(h, x)).collect()).collect()
}

pub fn format_group(g: &FiniteGroup) -> String {
    let mut s = format!("group {}\n", g.order());
    for a in 0..g.order() {
        let row: Vec<String> = (0..g.order()).map(|b| g.mul(a, b).to_string()).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

/// Group table file: `group <order>` then `order` rows of `order` indices; `#` starts a comment.
pub fn parse_group(text: &str) -> Result<FiniteGroup, CayleyError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or(CayleyError::Parse { line: 0, reason: "empty file".into() })?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("group") {
        return Err(CayleyError::Parse { line: hl, reason: "expected `group <order>`".into() });
    }
    let order: usize = parts
        .next()
        .and_then(|x| x.parse().ok())
        .filter(|_| parts.next().is_none())
        .ok_or(CayleyError::Parse { line: hl, reason: "expected `group <order>`".into() })?;
    let mut mul = Vec::with_capacity(order * order);
    let mut rows = 0;
    for (ln, line) in lines {
        let row: Result<Vec<u32>, _> = line.split_whitespace().map(str::parse).collect();
        let row = row.map_err(|_| CayleyError::Parse { line: ln, reason: "non-numeric entry".into() })?;
        if row.len() != order {
            return Err(CayleyError::Parse { line: ln, reason: format!("expected {order} entries") });
        }
        mul.extend(row);
        rows += 1;
    }
    if rows != order {
        return Err(CayleyError::Parse { line: 0, reason: format!("expected {order} rows, found {rows}") });
    }
    FiniteGroup::from_table(order, mul)
}

pub fn read_group(path: &Path) -> Result<FiniteGroup, CayleyError> {
    let text = std::fs::read_to_string(path).map_err(|e| CayleyError::Io(e.to_string()))?;
    parse_group(&text)
}

pub fn write_group(g: &FiniteGroup, path: &Path) -> Result<(), CayleyError> {
    std::fs::write(path, format_group(g)).map_err(|e| CayleyError::Io(e.to_string()))
}

#[cfg(feature = "lps")]
pub mod lps {
    //! Lubotzky-Phillips-Sarnak generators in `PSL_2(q)` or `PGL_2(q)`.

    use super::*;

    fn is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
        let mut r = 1;
        b %= m;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % m;
            }
            b = b * b % m;
            e >>= 1;
        }
        r
    }

    /// Legendre symbol `(a / p)` as `1` or `-1` for `a` not divisible by `p`.
    pub fn legendre(a: u64, p: u64) -> i32 {
        if pow_mod(a, (p - 1) / 2, p) == 1 {
            1
        } else {
            -1
        }
    }

    type Mat = [u64; 4];

    /// Scale so the first nonzero entry is 1.
    fn normalize(m: Mat, q: u64) -> Mat {
        let lead = *m.iter().find(|&&x| x != 0).expect("nonzero matrix");
        let inv = pow_mod(lead, q - 2, q);
        m.map(|x| x * inv % q)
    }

    fn mat_mul(a: &Mat, b: &Mat, q: u64) -> Mat {
        [
            (a[0] * b[0] + a[1] * b[2]) % q,
            (a[0] * b[1] + a[1] * b[3]) % q,
            (a[2] * b[0] + a[3] * b[2]) % q,
            (a[2] * b[1] + a[3] * b[3]) % q,
        ]
    }

    fn det(m: &Mat, q: u64) -> u64 {
        (m[0] * m[3] % q + q * q - m[1] * m[2] % q) % q
    }

    /// Projective group on normalized matrices: all of `PGL_2(q)`, or the index-2 subgroup of
    /// classes with square determinant when `psl` is set.
    fn projective_group(q: u64, psl: bool) -> Result<(FiniteGroup, HashMap<Mat, usize>), CayleyError> {
        let mut elems: Vec<Mat> = Vec::new();
        for a in 0..q {
            for b in 0..q {
                for c in 0..q {
                    for d in 0..q {
                        let m = [a, b, c, d];
                        if m.iter().all(|&x| x == 0) || normalize(m, q) != m {
                            continue;
                        }
                        let dt = det(&m, q);
                        if dt == 0 || (psl && legendre(dt, q) != 1) {
                            continue;
                        }
                        elems.push(m);
                    }
                }
            }
        }
        let order = elems.len();
        if order > MAX_TABLE_ORDER {
            return Err(CayleyError::Input(format!("group order {order} exceeds {MAX_TABLE_ORDER}")));
        }
        let index: HashMap<Mat, usize> = elems.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let mul: Vec<u32> = (0..order * order)
            .into_par_iter()
            .map(|k| index[&normalize(mat_mul(&elems[k / order], &elems[k % order], q), q)] as u32)
            .collect();
        Ok((FiniteGroup::from_table(order, mul)?, index))
    }

    /// The `p + 1` solutions of `a^2 + b^2 + c^2 + d^2 = p` with `a > 0` odd and `b, c, d` even,
    /// mapped to `[[a + b i, c + d i], [-c + d i, a - b i]]` with `i^2 = -1 mod q`. The group is
    /// `PSL_2(q)` when `p` is a square mod `q` and `PGL_2(q)` otherwise (then the Cayley graph
    /// is bipartite).
    pub fn lps_generators(p: u64, q: u64) -> Result<(FiniteGroup, GeneratorSet), CayleyError> {
        if p == q || !is_prime(p) || !is_prime(q) || p % 4 != 1 || q % 4 != 1 {
            return Err(CayleyError::Input("need distinct primes p, q with p = q = 1 mod 4".into()));
        }
        if (q * q) as f64 <= 4.0 * p as f64 {
            return Err(CayleyError::Input("need q > 2 sqrt(p)".into()));
        }
        let i = (2..q).find(|&x| x * x % q == q - 1).expect("q = 1 mod 4 has a square root of -1");
        let r = (p as f64).sqrt() as i64 + 1;
        let mut sols = Vec::new();
        for a in (1..=r).step_by(2) {
            for b in (-r..=r).filter(|x| x % 2 == 0) {
                for c in (-r..=r).filter(|x| x % 2 == 0) {
                    for d in (-r..=r).filter(|x| x % 2 == 0) {
                        if a * a + b * b + c * c + d * d == p as i64 {
                            sols.push((a, b, c, d));
                        }
                    }
                }
            }
        }
        debug_assert_eq!(sols.len() as u64, p + 1);
        let psl = legendre(p, q) == 1;
        let (group, index) = projective_group(q, psl)?;
        let m = |x: i64| x.rem_euclid(q as i64) as u64;
        let members: Vec<usize> = sols
            .iter()
            .map(|&(a, b, c, d)| {
                let mat = [m(a + b * i as i64), m(c + d * i as i64), m(-c + d * i as i64), m(a - b * i as i64)];
                index[&normalize(mat, q)]
            })
            .collect();
        let gens = GeneratorSet::new(&group, members)?;
        Ok((group, gens))
    }
}
