//! Line product and tripartite line product, with the port bookkeeping that fixes which gadget
//! vertex each incident edge occupies.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cayley::{FiniteGroup, GeneratorSet};
use crate::graphs::{BipartiteGraph, Graph, MiddleOrder, Side, TripartiteBase};

#[derive(Debug, Error, PartialEq)]
pub enum ProductError {
    #[error("invalid input: {0}")]
    Input(String),
}

type Result<T> = std::result::Result<T, ProductError>;

fn input(msg: impl Into<String>) -> ProductError {
    ProductError::Input(msg.into())
}

/// Canonical edge list of a simple graph: `(u, v)` with `u < v`, lexicographic. Vertex `i` of
/// a line product is edge `i` of this list.
pub fn canonical_edges(g: &Graph) -> Vec<(usize, usize)> {
    g.edges()
}

/// `incident[v]` lists the edge ids at `v` by ascending neighbor index.
pub fn default_edge_order(g: &Graph) -> Vec<Vec<usize>> {
    let edges = canonical_edges(g);
    let mut incident = vec![Vec::new(); g.n()];
    for (i, &(u, v)) in edges.iter().enumerate() {
        incident[u].push((v, i));
        incident[v].push((u, i));
    }
    incident
        .into_iter()
        .map(|mut l| {
            l.sort_unstable();
            l.into_iter().map(|(_, i)| i).collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineProduct {
    pub graph: Graph,
    /// Adjacencies produced by both endpoint gadgets and merged into one edge.
    pub merges: usize,
}

fn dedup_count<T: Ord>(v: &mut Vec<T>) -> usize {
    v.sort_unstable();
    let before = v.len();
    v.dedup();
    before - v.len()
}

/// `G ⋄ H`: vertices are the edges of the `D`-regular `g`; for every vertex `v` and edge
/// `{i, j}` of `h` (on `D` vertices), join the `i`-th and `j`-th edges at `v`.
pub fn line_product(g: &Graph, h: &Graph, order: Option<&[Vec<usize>]>) -> Result<LineProduct> {
    if g.is_multi() {
        return Err(input("base graph must be simple"));
    }
    let d = g.regular_degree().ok_or_else(|| input("base graph is not regular"))?;
    if h.n() != d {
        return Err(input(format!("gadget has {} vertices, base degree is {d}", h.n())));
    }
    let default;
    let order = match order {
        Some(o) => o,
        None => {
            default = default_edge_order(g);
            &default
        }
    };
    let m = g.m();
    check_orders(g, order, m)?;
    let h_edges = h.edges();
    let mut edges: Vec<(usize, usize)> = (0..g.n())
        .into_par_iter()
        .flat_map_iter(|v| {
            let inc = &order[v];
            h_edges.iter().map(move |&(i, j)| {
                let (a, b) = (inc[i], inc[j]);
                (a.min(b), a.max(b))
            })
        })
        .collect();
    let merges = dedup_count(&mut edges);
    let graph = Graph::from_edges(m, &edges, false).expect("deduplicated edges");
    Ok(LineProduct { graph, merges })
}

fn check_orders(g: &Graph, order: &[Vec<usize>], m: usize) -> Result<()> {
    if order.len() != g.n() {
        return Err(input("one edge ordering per vertex is required"));
    }
    let default = default_edge_order(g);
    for (v, o) in order.iter().enumerate() {
        let mut sorted = o.clone();
        sorted.sort_unstable();
        let mut expect = default[v].clone();
        expect.sort_unstable();
        if sorted != expect || o.iter().any(|&e| e >= m) {
            return Err(input(format!("ordering at vertex {v} is not a permutation of its edges")));
        }
    }
    Ok(())
}

/// Gadget placement of one incident edge: side and index within that side of `H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Port {
    pub edge: usize,
    pub side: Side,
    pub slot: usize,
}

/// Generator position (in `GeneratorSet::members`) to gadget vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideAssignment {
    pub slots: Vec<(Side, usize)>,
}

impl SideAssignment {
    /// Checks the pairing constraint (`a` and `a^-1` on one side) and that the left and right
    /// slots are permutations of `0..d1` and `0..d2`.
    pub fn validate(&self, g: &FiniteGroup, gens: &GeneratorSet, d1: usize, d2: usize) -> Result<()> {
        if self.slots.len() != gens.len() {
            return Err(input("one slot per generator is required"));
        }
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (k, &(side, slot)) in self.slots.iter().enumerate() {
            let a = gens.members[k];
            let inv = gens.position(g.inv(a)).ok_or_else(|| input("generators are not closed under inversion"))?;
            if self.slots[inv].0 != side {
                return Err(input(format!("generator {a} and its inverse are assigned to different sides")));
            }
            match side {
                Side::Left => left.push(slot),
                Side::Right => right.push(slot),
                Side::Whole => return Err(input("slot side must be left or right")),
            }
        }
        left.sort_unstable();
        right.sort_unstable();
        if left != (0..d1).collect::<Vec<_>>() || right != (0..d2).collect::<Vec<_>>() {
            return Err(input(format!("slot counts must be {d1} left and {d2} right")));
        }
        Ok(())
    }

    /// Inverse pairs in ascending order of their smaller element go left while they fit, the
    /// rest go right; slots are filled in that order.
    pub fn greedy(g: &FiniteGroup, gens: &GeneratorSet, d1: usize) -> Result<Self> {
        let mut slots = vec![None; gens.len()];
        let (mut nl, mut nr) = (0, 0);
        for k in 0..gens.len() {
            if slots[k].is_some() {
                continue;
            }
            let a = gens.members[k];
            let inv = gens.position(g.inv(a)).ok_or_else(|| input("generators are not closed under inversion"))?;
            let group = if inv == k { vec![k] } else { vec![k, inv] };
            let side = if nl + group.len() <= d1 { Side::Left } else { Side::Right };
            for p in group {
                let counter = if side == Side::Left { &mut nl } else { &mut nr };
                slots[p] = Some((side, *counter));
                *counter += 1;
            }
        }
        if nl != d1 {
            return Err(input(format!("cannot place inverse pairs into exactly {d1} left slots")));
        }
        Ok(Self { slots: slots.into_iter().map(|s| s.expect("assigned")).collect() })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteProduct {
    pub graph: BipartiteGraph,
    /// Base edge id of each left vertex of the product.
    pub left_edges: Vec<usize>,
    /// Base edge id of each right vertex of the product.
    pub right_edges: Vec<usize>,
    pub merges: usize,
}

/// Bipartite line product from explicit ports: `ports[v]` covers every edge at `v`, and
/// every left slot of `h` and every right slot exactly once; each edge has the same side at
/// both endpoints. Product vertices on each side are ranked by base edge id.
pub fn line_product_ported(g: &Graph, h: &BipartiteGraph, ports: &[Vec<Port>]) -> Result<BipartiteProduct> {
    if g.is_multi() {
        return Err(input("base graph must be simple"));
    }
    let edges = canonical_edges(g);
    let m = edges.len();
    if ports.len() != g.n() {
        return Err(input("one port list per vertex is required"));
    }
    let mut side_of: Vec<Option<Side>> = vec![None; m];
    let order = default_edge_order(g);
    for (v, list) in ports.iter().enumerate() {
        let mut es: Vec<usize> = list.iter().map(|p| p.edge).collect();
        es.sort_unstable();
        let mut expect = order[v].clone();
        expect.sort_unstable();
        if es != expect {
            return Err(input(format!("ports at vertex {v} do not cover its edges")));
        }
        let mut ls: Vec<usize> = list.iter().filter(|p| p.side == Side::Left).map(|p| p.slot).collect();
        let mut rs: Vec<usize> = list.iter().filter(|p| p.side == Side::Right).map(|p| p.slot).collect();
        ls.sort_unstable();
        rs.sort_unstable();
        if ls != (0..h.n_left()).collect::<Vec<_>>() || rs != (0..h.n_right()).collect::<Vec<_>>() {
            return Err(input(format!("ports at vertex {v} do not fill the gadget slots")));
        }
        for p in list {
            match side_of[p.edge] {
                None => side_of[p.edge] = Some(p.side),
                Some(s) if s != p.side => {
                    return Err(input(format!("edge {:?} changes side between endpoints", edges[p.edge])));
                }
                _ => {}
            }
        }
    }
    let mut rank = vec![0usize; m];
    let (mut left_edges, mut right_edges) = (Vec::new(), Vec::new());
    for e in 0..m {
        let list = if side_of[e] == Some(Side::Left) { &mut left_edges } else { &mut right_edges };
        rank[e] = list.len();
        list.push(e);
    }
    let h_edges = h.edges();
    let mut out: Vec<(usize, usize)> = ports
        .par_iter()
        .flat_map_iter(|list| {
            let mut lslot = vec![0; h.n_left()];
            let mut rslot = vec![0; h.n_right()];
            for p in list {
                if p.side == Side::Left {
                    lslot[p.slot] = p.edge;
                } else {
                    rslot[p.slot] = p.edge;
                }
            }
            h_edges.iter().map(|&(i, j)| (rank[lslot[i]], rank[rslot[j]])).collect::<Vec<_>>()
        })
        .collect();
    let merges = dedup_count(&mut out);
    let graph = BipartiteGraph::from_edges(left_edges.len(), right_edges.len(), &out, false).expect("deduplicated");
    Ok(BipartiteProduct { graph, left_edges, right_edges, merges })
}

/// Ports of a 2-coloring of the edges: at each vertex the left edges take left slots and
/// the right edges right slots, both by ascending neighbor index.
pub fn split_ports(g: &Graph, split: &[Side]) -> Result<Vec<Vec<Port>>> {
    if split.len() != g.m() {
        return Err(input("one side per edge is required"));
    }
    if split.contains(&Side::Whole) {
        return Err(input("edge sides must be left or right"));
    }
    Ok(default_edge_order(g)
        .into_iter()
        .map(|inc| {
            let (mut nl, mut nr) = (0, 0);
            inc.into_iter()
                .map(|e| {
                    let side = split[e];
                    let counter = if side == Side::Left { &mut nl } else { &mut nr };
                    *counter += 1;
                    Port { edge: e, side, slot: *counter - 1 }
                })
                .collect()
        })
        .collect())
}

pub fn line_product_split(g: &Graph, split: &[Side], h: &BipartiteGraph) -> Result<BipartiteProduct> {
    line_product_ported(g, h, &split_ports(g, split)?)
}

/// Labels of the Cayley graph `g = Cay(G, A)`: edge id of `{x, x a}` for every `x` and generator
/// position.
fn cayley_edge_ids(g: &Graph, group: &FiniteGroup, gens: &GeneratorSet) -> Result<Vec<Vec<usize>>> {
    if g.n() != group.order() {
        return Err(input("base graph is not on the group elements"));
    }
    let edges = canonical_edges(g);
    let id = |u: usize, v: usize| edges.binary_search(&(u.min(v), u.max(v))).ok();
    (0..g.n())
        .map(|x| {
            gens.members
                .iter()
                .map(|&a| id(x, group.mul(x, a)).ok_or_else(|| input("base graph is not the Cayley graph of the generators")))
                .collect()
        })
        .collect()
}

/// Line product of a Cayley graph where generator `a` at `x` (edge `{x, x a}`) occupies gadget
/// vertex `phi(a)`.
pub fn line_product_bipartite(
    g: &Graph,
    group: &FiniteGroup,
    gens: &GeneratorSet,
    h: &BipartiteGraph,
    phi: &SideAssignment,
) -> Result<BipartiteProduct> {
    phi.validate(group, gens, h.n_left(), h.n_right())?;
    let ids = cayley_edge_ids(g, group, gens)?;
    let ports: Vec<Vec<Port>> = ids
        .iter()
        .map(|row| row.iter().zip(&phi.slots).map(|(&edge, &(side, slot))| Port { edge, side, slot }).collect())
        .collect();
    line_product_ported(g, h, &ports)
}

/// Left translations of the group acting on both sides of a Cayley line product.
pub fn inherited_action(g: &Graph, group: &FiniteGroup, p: &BipartiteProduct) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let edges = canonical_edges(g);
    let id = |u: usize, v: usize| edges.binary_search(&(u.min(v), u.max(v))).expect("translated edge exists");
    let mut rank = vec![0usize; edges.len()];
    for (i, &e) in p.left_edges.iter().enumerate() {
        rank[e] = i;
    }
    for (i, &e) in p.right_edges.iter().enumerate() {
        rank[e] = i;
    }
    let act = |list: &[usize], h: usize| -> Vec<usize> {
        list.iter()
            .map(|&e| {
                let (u, v) = edges[e];
                rank[id(group.mul(h, u), group.mul(h, v))]
            })
            .collect()
    };
    let n = group.order();
    let act_l = (0..n).into_par_iter().map(|h| act(&p.left_edges, h)).collect();
    let act_r = (0..n).into_par_iter().map(|h| act(&p.right_edges, h)).collect();
    (act_l, act_r)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripartiteProduct {
    pub graph: BipartiteGraph,
    pub merges: usize,
}

/// For every middle vertex `v` and edge `{i, j}` of `h`, joins the `i`-th left neighbor of `v`
/// to its `j`-th right neighbor.
pub fn tripartite_line_product(base: &TripartiteBase, h: &BipartiteGraph) -> Result<TripartiteProduct> {
    for (v, o) in base.middle_order.iter().enumerate() {
        if o.left.len() != h.n_left() || o.right.len() != h.n_right() {
            return Err(input(format!(
                "middle vertex {v} has {}+{} neighbors, gadget has {}+{} vertices",
                o.left.len(),
                o.right.len(),
                h.n_left(),
                h.n_right()
            )));
        }
    }
    let h_edges = h.edges();
    let mut edges: Vec<(usize, usize)> = base
        .middle_order
        .par_iter()
        .flat_map_iter(|o| h_edges.iter().map(move |&(i, j)| (o.left[i], o.right[j])))
        .collect();
    let merges = dedup_count(&mut edges);
    let graph = BipartiteGraph::from_edges(base.n_left(), base.n_right(), &edges, false).expect("deduplicated");
    Ok(TripartiteProduct { graph, merges })
}

/// Tripartite base of a split line product: `M = V(G)`, `L` and `R` the left and right edges
/// ranked by edge id, with each middle vertex ordering its neighbors as [`split_ports`] does.
pub fn reduce_line_to_tripartite(g: &Graph, split: &[Side]) -> Result<TripartiteBase> {
    let ports = split_ports(g, split)?;
    let d1 = ports.first().map_or(0, |p| p.iter().filter(|q| q.side == Side::Left).count());
    let d2 = ports.first().map_or(0, |p| p.len() - d1);
    if d1 == 0 || d2 == 0 {
        return Err(input("both sides of the split must be nonempty at every vertex"));
    }
    for (v, p) in ports.iter().enumerate() {
        let l = p.iter().filter(|q| q.side == Side::Left).count();
        if l != d1 || p.len() - l != d2 {
            return Err(input(format!("vertex {v} has {l}+{} edges, expected {d1}+{d2}", p.len() - l)));
        }
    }
    let m = g.m();
    let mut rank = vec![0usize; m];
    let (mut nl, mut nr) = (0, 0);
    for e in 0..m {
        let c = if split[e] == Side::Left { &mut nl } else { &mut nr };
        rank[e] = *c;
        *c += 1;
    }
    let mut e1 = Vec::new();
    let mut e2 = Vec::new();
    let mut order = Vec::with_capacity(g.n());
    for (v, p) in ports.iter().enumerate() {
        let mut o = MiddleOrder { left: vec![0; d1], right: vec![0; d2] };
        for q in p {
            if q.side == Side::Left {
                o.left[q.slot] = rank[q.edge];
                e1.push((rank[q.edge], v));
            } else {
                o.right[q.slot] = rank[q.edge];
                e2.push((v, rank[q.edge]));
            }
        }
        order.push(o);
    }
    let g1 = BipartiteGraph::from_edges(nl, g.n(), &e1, false).map_err(|e| input(e.to_string()))?;
    let g2 = BipartiteGraph::from_edges(g.n(), nr, &e2, false).map_err(|e| input(e.to_string()))?;
    TripartiteBase::new(g1, g2, Some(order)).map_err(|e| input(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::{cayley_graph, verify_group_action};
    use crate::graphs::named::*;
    use crate::sampling::{sample_biregular, sample_regular};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn line_graph(g: &Graph) -> Graph {
        let edges = canonical_edges(g);
        let mut out = Vec::new();
        for i in 0..edges.len() {
            for j in i + 1..edges.len() {
                let (a, b) = edges[i];
                let (c, d) = edges[j];
                if a == c || a == d || b == c || b == d {
                    out.push((i, j));
                }
            }
        }
        Graph::from_edges(edges.len(), &out, false).unwrap()
    }

    #[test]
    fn cycle_with_single_edge_is_a_cycle() {
        let g = cycle(9);
        let p = line_product(&g, &path(2), None).unwrap();
        assert_eq!(p.graph.n(), 9);
        assert_eq!(p.graph.regular_degree(), Some(2));
        assert!(p.graph.is_connected());
        assert_eq!(p.merges, 0);
    }

    #[test]
    fn clique_gadget_gives_line_graph() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let g = sample_regular(12, 4, &mut rng, None).unwrap();
        let p = line_product(&g, &complete(4), None).unwrap();
        assert_eq!(p.graph, line_graph(&g));
        assert_eq!(p.graph.regular_degree(), Some(6));
        assert_eq!(line_product(&petersen(), &complete(3), None).unwrap().graph, line_graph(&petersen()));
    }

    #[test]
    fn line_product_size_and_degree() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let g = sample_regular(20, 6, &mut rng, None).unwrap();
        let h = cycle(6);
        let p = line_product(&g, &h, None).unwrap();
        assert_eq!(p.graph.n(), 60);
        assert_eq!(p.graph.regular_degree(), Some(4));
        assert!(line_product(&g, &cycle(5), None).is_err());
    }

    fn z12() -> (FiniteGroup, GeneratorSet, Graph) {
        let z = FiniteGroup::cyclic(12);
        let a = GeneratorSet::new(&z, vec![1, 5, 7, 11]).unwrap();
        let g = cayley_graph(&z, &a).unwrap();
        (z, a, g)
    }

    #[test]
    fn cayley_line_product_is_biregular_and_bipartite() {
        let (z, a, g) = z12();
        let h = BipartiteGraph::from_edges(2, 2, &[(0, 0), (1, 1)], false).unwrap();
        let phi = SideAssignment::greedy(&z, &a, 2).unwrap();
        let p = line_product_bipartite(&g, &z, &a, &h, &phi).unwrap();
        assert_eq!(p.graph.biregular_degrees(), Some((2, 2)));
        assert_eq!(p.graph.n(), g.m());
        let edges = canonical_edges(&g);
        // Every product edge joins a left base edge to a right base edge sharing an endpoint.
        for (l, r) in p.graph.edges() {
            let (a1, b1) = edges[p.left_edges[l]];
            let (a2, b2) = edges[p.right_edges[r]];
            assert!(a1 == a2 || a1 == b2 || b1 == a2 || b1 == b2);
        }
        let (act_l, act_r) = inherited_action(&g, &z, &p);
        assert!(verify_group_action(&p.graph, &z, &act_l, &act_r, None).unwrap().ok);
    }

    #[test]
    fn phi_must_pair_inverses() {
        let z = FiniteGroup::cyclic(12);
        let a = GeneratorSet::new(&z, vec![1, 6, 11]).unwrap();
        let split = SideAssignment { slots: vec![(Side::Left, 0), (Side::Right, 0), (Side::Right, 1)] };
        assert!(split.validate(&z, &a, 1, 2).is_err());
        let across = SideAssignment { slots: vec![(Side::Left, 0), (Side::Left, 1), (Side::Right, 0)] };
        assert!(across.validate(&z, &a, 2, 1).is_err());
        let ok = SideAssignment { slots: vec![(Side::Left, 0), (Side::Right, 0), (Side::Left, 1)] };
        assert!(ok.validate(&z, &a, 2, 1).is_ok());
    }

    #[test]
    fn tripartite_empty_gadget() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let g1 = sample_biregular(6, 4, 2, 3, &mut rng, None).unwrap();
        let g2 = sample_biregular(4, 6, 3, 2, &mut rng, None).unwrap();
        let base = TripartiteBase::new(g1, g2, None).unwrap();
        let p = tripartite_line_product(&base, &BipartiteGraph::empty(3, 3)).unwrap();
        assert_eq!(p.graph.m(), 0);
        assert_eq!((p.graph.n_left(), p.graph.n_right()), (6, 6));
        assert!(tripartite_line_product(&base, &BipartiteGraph::empty(2, 3)).is_err());
    }

    #[test]
    fn tripartite_star_configuration() {
        // g2 made of disjoint stars: every right vertex sits in exactly one gadget copy.
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let (nm, k1, d1, d2) = (12, 3, 4, 3);
        let g1 = sample_biregular(nm * d1 / k1, nm, k1, d1, &mut rng, None).unwrap();
        let star: Vec<(usize, usize)> = (0..nm).flat_map(|v| (0..d2).map(move |j| (v, v * d2 + j))).collect();
        let g2 = BipartiteGraph::from_edges(nm, nm * d2, &star, false).unwrap();
        let base = TripartiteBase::new(g1, g2, None).unwrap();
        let h = sample_biregular(d1, d2, 3, 4, &mut rng, None).unwrap();
        let p = tripartite_line_product(&base, &h).unwrap();
        assert_eq!(p.merges, 0);
        assert_eq!(p.graph.biregular_degrees(), Some((k1 * 3, 4)));
        for r in 0..p.graph.n_right() {
            let gadget = r / d2;
            assert!(p.graph.right_neighbors(r).iter().all(|&l| base.g1.left_neighbors(l).contains(&gadget)));
        }
    }

    #[test]
    fn line_and_tripartite_routes_agree() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let g = sample_regular(20, 4, &mut rng, None).unwrap();
        // Generators +-1 on the left, +-3 on the right.
        let z = FiniteGroup::cyclic(20);
        let a = GeneratorSet::new(&z, vec![1, 3, 17, 19]).unwrap();
        let c = cayley_graph(&z, &a).unwrap();
        let split: Vec<Side> = canonical_edges(&c)
            .iter()
            .map(|&(u, v)| if (v - u) % 20 == 1 || (v - u) % 20 == 19 { Side::Left } else { Side::Right })
            .collect();
        let h = BipartiteGraph::from_edges(2, 2, &[(0, 0), (0, 1), (1, 1)], false).unwrap();
        let line = line_product_split(&c, &split, &h).unwrap();
        let base = reduce_line_to_tripartite(&c, &split).unwrap();
        assert!(base.g1.validate_biregular(2, 2) && base.g2.validate_biregular(2, 2));
        let tri = tripartite_line_product(&base, &h).unwrap();
        assert_eq!(line.graph, tri.graph);
        assert_eq!(line.merges, tri.merges);
        let all_left = vec![Side::Left; g.m()];
        assert!(reduce_line_to_tripartite(&g, &all_left).is_err());
    }
}
