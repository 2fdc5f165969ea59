//! End-to-end constructions: parameter derivation for the three product theorems and desk-scale
//! builds that assemble base, gadget and product and certify the result.
//!
//! Faithful mode only derives parameters (the graphs would be astronomically large). Desk mode
//! replaces `tau`, `theta` and `K` by small user values, builds everything and verifies the
//! claims exactly on sets up to `t_max`.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::cayley::{cayley_graph, verify_group_action, FiniteGroup, GeneratorSet};
use crate::cycles::{self, LosslessMode};
use crate::expansion::{self, Objective, ProfileKind, SizeBest};
use crate::graphs::{BipartiteGraph, Graph, Side, TripartiteBase};
use crate::products::{self, SideAssignment};
use crate::report::{CertificateReport, Check, Status};
use crate::sampling::{self, RngStream};
use crate::spectral;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("parameter constraints violated: {}", .0.join("; "))]
    Constraints(Vec<String>),
    #[error("gate `{gate}` failed")]
    Gate { gate: String, report: Box<CertificateReport> },
    #[error(transparent)]
    Core(#[from] crate::Error),
}

macro_rules! from_core {
    ($($t:ty),*) => {$(
        impl From<$t> for PipelineError {
            fn from(e: $t) -> Self {
                PipelineError::Core(e.into())
            }
        }
    )*};
}
from_core!(
    crate::graphs::GraphError,
    crate::sampling::SamplingError,
    crate::cayley::CayleyError,
    crate::spectral::SpectralError,
    crate::expansion::ExpansionError,
    crate::cycles::CyclesError,
    crate::products::ProductError
);

type Result<T> = std::result::Result<T, PipelineError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Main,
    Tripartite,
    Lossless,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Faithful,
    Desk,
}

/// User constants for desk mode (and the unspecified universal constant `C` of the
/// tripartite `theta`). `None` takes the default of the mode.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Overrides {
    pub tau: Option<f64>,
    pub theta: Option<f64>,
    pub k1: Option<usize>,
    pub k2: Option<usize>,
    pub c_theta: Option<f64>,
    pub delta: Option<f64>,
    /// Factor `c` of the gadget floor `c d1t exp(-theta t / sqrt(D))`.
    pub gadget_scale: Option<f64>,
}

/// Gadget floor factor standing in for `1 - o_D(1)` in faithful mode.
pub const FAITHFUL_GADGET_SCALE: f64 = 0.9;
/// Desk default; small gadgets contain 4-cycles, which cap `P_H(2)` well below `0.9 d1t`.
pub const DESK_GADGET_SCALE: f64 = 0.5;

/// Derived parameters. For `Main`, `d1`/`d2` are the gadget degrees and the product is
/// `(2 d1, 2 d2)`-biregular; otherwise they are the product degrees and `d1t = d1 / K1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub construction: Construction,
    pub mode: Mode,
    pub beta: f64,
    pub eps: Option<f64>,
    pub d1: usize,
    pub d2: usize,
    pub tau: f64,
    pub theta: f64,
    /// `1000 / eps^2` before rounding (tripartite).
    pub k_exact: Option<f64>,
    pub k1: usize,
    pub k2: usize,
    pub d1t: usize,
    pub d2t: usize,
    pub big_d1: usize,
    pub big_d2: usize,
    pub big_d: usize,
    /// UN floor constant; `None` where the construction leaves it implicit.
    pub delta: Option<f64>,
    pub ln_delta: Option<f64>,
    /// Density hypothesis constant `tau sqrt(D) / 2` (main).
    pub gamma: Option<f64>,
    /// `ln d0` for the degree threshold `d0 >= 8 e^{tau theta} / beta` (main); reported only.
    pub ln_d0: Option<f64>,
    pub meets_d0: Option<bool>,
    /// `theta sqrt(D) / 2 <= d1t + d2t <= theta sqrt(D)`.
    pub gadget_window: bool,
    /// Gadget profile is asserted for `t <= tau sqrt(D)`.
    pub gadget_t_max: usize,
    pub gadget_scale: f64,
}

impl ConstructionParams {
    /// Degrees of the product graph.
    pub fn product_degrees(&self) -> (usize, usize) {
        match self.construction {
            Construction::Main => (2 * self.d1, 2 * self.d2),
            _ => (self.k1 * self.d1t, self.k2 * self.d2t),
        }
    }

    /// `gadget_scale d1t exp(-theta t / sqrt(D))`.
    pub fn gadget_floor(&self, t: usize) -> f64 {
        self.gadget_scale * self.d1t as f64 * (-self.theta * t as f64 / (self.big_d as f64).sqrt()).exp()
    }
}

fn aspect_checks(beta: f64, d1: usize, d2: usize, errs: &mut Vec<String>) {
    if !(beta > 0.0 && beta <= 0.5) {
        errs.push(format!("beta = {beta} must lie in (0, 1/2]"));
    }
    if d1 == 0 || d2 == 0 {
        errs.push("d1 and d2 must be positive".into());
        return;
    }
    if d1 > d2 {
        errs.push(format!("aspect: d1/d2 = {d1}/{d2} exceeds 1"));
    }
    if (d1 as f64) / (d2 as f64) < beta / (1.0 - beta) - 1e-12 {
        errs.push(format!("aspect: d1/d2 = {d1}/{d2} is below beta/(1-beta) = {}", beta / (1.0 - beta)));
    }
}

fn eps_check(eps: f64, errs: &mut Vec<String>) {
    if !(eps > 0.0 && eps < 1.0) {
        errs.push(format!("eps = {eps} must lie in (0, 1)"));
    }
}

fn window(theta: f64, big_d: usize, d1t: usize, d2t: usize) -> bool {
    let s = theta * (big_d as f64).sqrt();
    let sum = (d1t + d2t) as f64;
    s / 2.0 <= sum + 1e-9 && sum <= s + 1e-9
}

fn ceil_div_theta2(x: usize, theta: f64) -> usize {
    ((x as f64) / (theta * theta)).ceil().max(1.0) as usize
}

fn derive(construction: Construction, mode: Mode, beta: f64, eps: Option<f64>, d1: usize, d2: usize, o: Overrides) -> Result<ConstructionParams> {
    let mut errs = Vec::new();
    aspect_checks(beta, d1, d2, &mut errs);
    let desk = mode == Mode::Desk;
    let pick = |v: Option<f64>, faithful: f64, default_desk: f64| if desk { v.unwrap_or(default_desk) } else { faithful };
    let gadget_scale = pick(o.gadget_scale, FAITHFUL_GADGET_SCALE, DESK_GADGET_SCALE);
    if gadget_scale.is_nan() || gadget_scale <= 0.0 {
        errs.push(format!("gadget scale {gadget_scale} must be positive"));
    }
    let p = match construction {
        Construction::Main => {
            if !d1.is_multiple_of(2) || !d2.is_multiple_of(2) {
                errs.push(format!("d1 = {d1} and d2 = {d2} must be even"));
            }
            let tau = pick(o.tau, 18.0, 0.75);
            let theta = pick(o.theta, 40.0 * tau / beta, 2.0);
            if !(tau > 0.0 && theta > 0.0) {
                errs.push("tau and theta must be positive".into());
            }
            if !errs.is_empty() {
                return Err(PipelineError::Constraints(errs));
            }
            let c = ceil_div_theta2(d1 + d2, theta);
            let (big_d1, big_d2) = (c * d2, c * d1);
            let big_d = big_d1 + big_d2;
            let ln_delta = 0.3f64.ln() - tau * theta;
            let delta = if desk { o.delta.unwrap_or(0.3 * (-tau * theta).exp()) } else { 0.3 * (-tau * theta).exp() };
            let ln_d0 = (8.0 / beta).ln() + tau * theta;
            ConstructionParams {
                construction,
                mode,
                beta,
                eps,
                d1,
                d2,
                tau,
                theta,
                k_exact: None,
                k1: 2,
                k2: 2,
                d1t: d1,
                d2t: d2,
                big_d1,
                big_d2,
                big_d,
                delta: Some(delta),
                ln_delta: Some(ln_delta),
                gamma: Some(tau / 2.0 * (big_d as f64).sqrt()),
                ln_d0: Some(ln_d0),
                meets_d0: Some((d1.min(d2) as f64).ln() >= ln_d0),
                gadget_window: window(theta, big_d, d1, d2),
                gadget_t_max: (tau * (big_d as f64).sqrt()).floor() as usize,
                gadget_scale,
            }
        }
        Construction::Tripartite => {
            let eps = eps.unwrap_or(f64::NAN);
            eps_check(eps, &mut errs);
            let k_exact = 1000.0 / (eps * eps);
            let k1 = if desk { o.k1.unwrap_or(3) } else { k_exact.ceil() as usize };
            let k2 = if desk { o.k2.unwrap_or(k1) } else { k1 };
            if !desk && k_exact.fract() != 0.0 {
                errs.push(format!("K = 1000/eps^2 = {k_exact} is not an integer"));
            }
            let tau = pick(o.tau, 1.0, 1.0);
            let beta_ok = beta > 0.0;
            let theta_faithful = o.c_theta.unwrap_or(1.0) / eps * (k1 as f64 / beta).sqrt();
            let theta = pick(o.theta, if beta_ok { theta_faithful } else { f64::NAN }, 2.0);
            multiples(d1, d2, k1, k2, &mut errs);
            if !errs.is_empty() {
                return Err(PipelineError::Constraints(errs));
            }
            let (d1t, d2t) = (d1 / k1, d2 / k2);
            let c = ceil_div_theta2(d1t + d2t, theta);
            let (big_d1, big_d2) = (c * d2t, c * d1t);
            let big_d = big_d1 + big_d2;
            let delta = desk.then(|| o.delta.unwrap_or(0.3 * (-tau * theta).exp()));
            ConstructionParams {
                construction,
                mode,
                beta,
                eps: Some(eps),
                d1,
                d2,
                tau,
                theta,
                k_exact: Some(k_exact),
                k1,
                k2,
                d1t,
                d2t,
                big_d1,
                big_d2,
                big_d,
                delta,
                ln_delta: delta.map(f64::ln),
                gamma: None,
                ln_d0: None,
                meets_d0: None,
                gadget_window: window(theta, big_d, d1t, d2t),
                gadget_t_max: (tau * (big_d as f64).sqrt()).floor() as usize,
                gadget_scale,
            }
        }
        Construction::Lossless => {
            let eps = eps.unwrap_or(f64::NAN);
            eps_check(eps, &mut errs);
            let k1 = if desk { o.k1.unwrap_or(4) } else { (1024.0 / eps.powi(4)).ceil() as usize };
            let k2 = 1;
            let tau = pick(o.tau, 1.0, 1.0);
            let theta = pick(o.theta, 1.0, 1.0);
            multiples(d1, d2, k1, k2, &mut errs);
            if !errs.is_empty() {
                return Err(PipelineError::Constraints(errs));
            }
            let (d1t, d2t) = (d1 / k1, d2);
            let c = ceil_div_theta2(d1t + d2t, theta);
            let (big_d1, big_d2) = (c * d2t, c * d1t);
            let big_d = big_d1 + big_d2;
            ConstructionParams {
                construction,
                mode,
                beta,
                eps: Some(eps),
                d1,
                d2,
                tau,
                theta,
                k_exact: None,
                k1,
                k2,
                d1t,
                d2t,
                big_d1,
                big_d2,
                big_d,
                delta: None,
                ln_delta: None,
                gamma: None,
                ln_d0: None,
                meets_d0: None,
                gadget_window: window(theta, big_d, d1t, d2t),
                gadget_t_max: (tau * (big_d as f64).sqrt()).floor() as usize,
                gadget_scale,
            }
        }
    };
    Ok(p)
}

fn multiples(d1: usize, d2: usize, k1: usize, k2: usize, errs: &mut Vec<String>) {
    if k1 == 0 || k2 == 0 {
        errs.push("K1 and K2 must be positive".into());
        return;
    }
    if !d1.is_multiple_of(k1) {
        errs.push(format!("d1 = {d1} is not a multiple of K1 = {k1}"));
    }
    if !d2.is_multiple_of(k2) {
        errs.push(format!("d2 = {d2} is not a multiple of K2 = {k2}"));
    }
}

/// `tau = 18`, `theta = 40 tau / beta`, `D1 = ceil((d1+d2)/theta^2) d2`,
/// `D2 = ceil((d1+d2)/theta^2) d1`, `delta = 0.3 e^{-tau theta}`.
pub fn params_thm_main(beta: f64, d1: usize, d2: usize) -> Result<ConstructionParams> {
    derive(Construction::Main, Mode::Faithful, beta, None, d1, d2, Overrides::default())
}

/// `K = K1 = K2 = 1000 / eps^2`, `tau = 1`, `theta = (C / eps) sqrt(K / beta)` with `C`
/// taken from `c_theta` (default 1).
pub fn params_thm_tripartite(beta: f64, eps: f64, d1: usize, d2: usize, c_theta: Option<f64>) -> Result<ConstructionParams> {
    let o = Overrides { c_theta, ..Overrides::default() };
    derive(Construction::Tripartite, Mode::Faithful, beta, Some(eps), d1, d2, o)
}

/// `K1 = ceil(2^10 / eps^4)`, `K2 = 1`, `theta = tau = 1`, `D1 = (d1t + d2t) d2t`,
/// `D2 = (d1t + d2t) d1t`.
pub fn params_lossless(beta: f64, eps: f64, d1: usize, d2: usize) -> Result<ConstructionParams> {
    derive(Construction::Lossless, Mode::Faithful, beta, Some(eps), d1, d2, Overrides::default())
}

/// Same formulas with user constants and no `d0` requirement.
pub fn params_desk(construction: Construction, beta: f64, eps: Option<f64>, d1: usize, d2: usize, o: Overrides) -> Result<ConstructionParams> {
    derive(construction, Mode::Desk, beta, eps, d1, d2, o)
}

/// Sizes and budgets of a desk build.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeskOptions {
    pub seed: u64,
    /// Group order (main) or number of middle vertices (tripartite, lossless).
    pub base_size: usize,
    /// Product sets are verified for every size up to this.
    pub t_max: usize,
    /// Cap on the gadget profile size.
    pub gadget_t_cap: usize,
    pub budget: u64,
    pub gadget_trials: usize,
    pub base_attempts: usize,
    pub density_samples: usize,
}

impl DeskOptions {
    pub fn defaults(construction: Construction, seed: u64) -> Self {
        let base_size = match construction {
            Construction::Main => 200,
            Construction::Tripartite => 20,
            Construction::Lossless => 10,
        };
        Self {
            seed,
            base_size,
            t_max: 4,
            gadget_t_cap: 6,
            budget: expansion::DEFAULT_BUDGET,
            gadget_trials: 2000,
            base_attempts: 200,
            density_samples: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineOutput {
    pub params: ConstructionParams,
    pub graph: BipartiteGraph,
    pub report: CertificateReport,
}

fn sub_seed(seed: u64, stream: u64) -> u64 {
    RngStream::new(seed, stream).rng().next_u64()
}

fn gate(report: &mut CertificateReport, name: &str, ok: bool, payload: serde_json::Value) -> Result<()> {
    report.push(Check::new(name, Status::from_bool(ok), payload));
    if ok {
        Ok(())
    } else {
        Err(PipelineError::Gate { gate: name.into(), report: Box::new(report.clone()) })
    }
}

/// Per-size minima over subsets of `cands`: lexicographic when affordable, else the
/// distance-2 connected enumeration (rooted at `roots` if given).
fn minima(g: &Graph, cands: &[usize], roots: Option<&[usize]>, t_max: usize, budget: u64, obj: Objective) -> Result<(SizeBest, &'static str)> {
    if expansion::subset_count(cands.len(), t_max) <= budget {
        return Ok((expansion::minima_lexicographic(g, cands, t_max, budget, obj)?, "lexicographic"));
    }
    match roots {
        Some(r) => Ok((expansion::minima_local_rooted(g, cands, r, t_max, budget, obj)?, "local_orbit_roots")),
        None => Ok((expansion::minima_local(g, cands, t_max, budget, obj)?, "local")),
    }
}

/// `|UN(S)| >= delta d1 |S|` for all `S ⊆ V(Z)` with `|S| <= t_max`.
fn un_floor_check(z: &BipartiteGraph, roots: Option<&[usize]>, floor: f64, t_max: usize, budget: u64) -> Result<Check> {
    let g = z.to_graph();
    let cands: Vec<usize> = (0..g.n()).collect();
    let (best, method) = minima(&g, &cands, roots, t_max, budget, Objective::Unique)?;
    let profile = expansion::profile_from_minima(Side::Whole, best, ProfileKind::Exact);
    let ratios: Vec<f64> = profile.entries.iter().map(|e| e.min_ratio).collect();
    let worst = profile.entries.last().map(|e| e.min_ratio).unwrap_or(f64::INFINITY);
    let witness = profile.entries.last().map(|e| e.argmin.clone()).unwrap_or_default();
    Ok(Check::new(
        "un_floor",
        Status::from_bool(worst >= floor - 1e-12),
        json!({ "floor": floor, "t_max": t_max, "min_ratio": ratios, "witness": witness, "method": method }),
    ))
}

fn biregular_check(z: &BipartiteGraph, d: (usize, usize)) -> Check {
    Check::new(
        "biregular",
        Status::from_bool(z.validate_biregular(d.0, d.1)),
        json!({ "expected": [d.0, d.1], "measured": z.biregular_degrees(), "n_left": z.n_left(), "n_right": z.n_right() }),
    )
}

fn merge_check(merges: usize) -> Check {
    Check::new("zero_merges", Status::from_bool(merges == 0), json!({ "merges": merges }))
}

/// Smallest element of each orbit; the sets containing one of them cover every set up to
/// translation.
fn orbit_roots(act_l: &[Vec<usize>], act_r: &[Vec<usize>], n_left: usize) -> Vec<usize> {
    let n = n_left + act_r.first().map_or(0, Vec::len);
    let mut seen = vec![false; n];
    let mut roots = Vec::new();
    for v in 0..n {
        if seen[v] {
            continue;
        }
        roots.push(v);
        for h in 0..act_l.len() {
            let w = if v < n_left { act_l[h][v] } else { n_left + act_r[h][v - n_left] };
            seen[w] = true;
        }
    }
    roots
}

/// Cayley base `Cay(G, A)` with its group data.
#[derive(Clone, Debug)]
pub struct CayleyBase {
    pub group: FiniteGroup,
    pub gens: GeneratorSet,
    pub graph: Graph,
}

/// `Z/n` with `D/2` random inverse pairs `{a, -a}`, `a != n/2`.
pub fn random_cyclic_base<R: Rng>(n: usize, d: usize, rng: &mut R) -> Result<CayleyBase> {
    if !d.is_multiple_of(2) || d / 2 > (n - 1) / 2 {
        return Err(PipelineError::Constraints(vec![format!("no {d} inverse-paired generators in Z/{n}")]));
    }
    let group = FiniteGroup::cyclic(n);
    let mut members: Vec<usize> = Vec::new();
    while members.len() < d {
        let a = rng.random_range(1..n);
        if 2 * a != n && !members.contains(&a) {
            members.extend([a, n - a]);
        }
    }
    let gens = GeneratorSet::new(&group, members)?;
    let graph = cayley_graph(&group, &gens)?;
    Ok(CayleyBase { group, gens, graph })
}

/// Builds `Z = G ⋄ H` from a Cayley base and certifies it. Gates (abort on failure): base is
/// `D`-regular, sampled edge density `e(S) <= D |S| (lambda + |S|/n) / 2` for
/// `|S| <= n / sqrt(D)`, gadget profile floor. Checks: biregularity, zero merges, group
/// action, UN floor `delta d1` for `|S| <= t_max`.
pub fn build_thm_main(
    params: &ConstructionParams,
    base: &CayleyBase,
    gadget: &BipartiteGraph,
    phi: &SideAssignment,
    opts: &DeskOptions,
) -> Result<(BipartiteGraph, CertificateReport)> {
    let mut report = CertificateReport::default();
    let g = &base.graph;
    let d = params.big_d;
    gate(&mut report, "base_regular", g.regular_degree() == Some(d), json!({ "expected": d, "n": g.n() }))?;
    let lambda2 = spectral::lambda2(g)?;
    let mut rng = RngStream::new(opts.seed, 10).rng();
    let eps_frac = 1.0 / (d as f64).sqrt();
    let violations = expansion::edge_density_check(g, lambda2 / d as f64, eps_frac, opts.density_samples, &mut rng)?;
    gate(
        &mut report,
        "base_edge_density",
        violations.is_empty(),
        json!({ "lambda2": lambda2, "eps": eps_frac, "samples_per_size": opts.density_samples, "violation": violations.first() }),
    )?;
    let ratios = gadget_gate(&mut report, params, gadget, opts, Objective::Unique)?;
    let prod = products::line_product_bipartite(g, &base.group, &base.gens, gadget, phi)?;
    let z = prod.graph.clone();
    report.push(biregular_check(&z, params.product_degrees()));
    report.push(merge_check(prod.merges));
    let (act_l, act_r) = products::inherited_action(g, &base.group, &prod);
    let gens = base.gens.members.clone();
    let action = verify_group_action(&z, &base.group, &act_l, &act_r, Some(&gens))?;
    report.push(Check::new("group_action", Status::from_bool(action.ok), serde_json::to_value(&action).expect("serializable")));
    let roots = action.ok.then(|| orbit_roots(&act_l, &act_r, z.n_left()));
    let floor = params.delta.unwrap_or(0.0) * params.d1 as f64;
    report.push(un_floor_check(&z, roots.as_deref(), floor, opts.t_max, opts.budget)?);
    // Lemma floor P_H(2 gamma) / 3; only reported since the density hypothesis is sampled.
    let two_gamma = (2.0 * params.gamma.unwrap_or(0.0)).floor() as usize;
    if (1..=ratios.len()).contains(&two_gamma) {
        let target = ratios[two_gamma - 1] / 3.0;
        let measured = report.get("un_floor").and_then(|c| c.payload["min_ratio"].as_array()?.last()?.as_f64());
        let ok = measured.is_some_and(|m| m >= target - 1e-12);
        report.push(Check::new(
            "line_analysis_floor",
            if ok { Status::Pass } else { Status::Flagged },
            json!({ "target": target, "two_gamma": two_gamma, "measured": measured }),
        ));
    }
    Ok((z, report))
}

pub fn run_desk_main(params: &ConstructionParams, opts: &DeskOptions) -> Result<PipelineOutput> {
    let mut rng = RngStream::new(opts.seed, 0).rng();
    let base = random_cyclic_base(opts.base_size, params.big_d, &mut rng)?;
    let phi = SideAssignment::greedy(&base.group, &base.gens, params.big_d1)?;
    let t_g = params.gadget_t_max.min(opts.gadget_t_cap).max(1);
    let gadget = sampling::gadget_search(
        params.big_d1,
        params.big_d2,
        params.d1t,
        params.d2t,
        |t| params.gadget_floor(t),
        t_g,
        sub_seed(opts.seed, 1),
        opts.gadget_trials,
        opts.budget,
    )?;
    let (graph, mut report) = build_thm_main(params, &base, &gadget.graph, &phi, opts)?;
    report.push(Check::new("gadget_trial", Status::NotApplicable, json!({ "trial": gadget.trial })));
    Ok(PipelineOutput { params: params.clone(), graph, report })
}

/// `lambda2 <= (sqrt(K - 1) + sqrt(D - 1)) (1 + 0.01 / D)` where `D` is the larger degree.
pub fn near_ramanujan_gate(b: &BipartiteGraph) -> Result<(bool, f64, f64)> {
    let (c, d) = b.biregular_degrees().ok_or_else(|| crate::spectral::SpectralError::Input("not biregular".into()))?;
    let big = c.max(d);
    let bound = spectral::ramanujan_value(c, d) * (1.0 + 0.01 / big as f64);
    let small = b.n_left().min(b.n_right());
    let l2 = if small < 2 { 0.0 } else { spectral::biregular_lambda2(b)? };
    Ok((l2 <= bound, l2, bound))
}

/// Disjoint `(D2, 1)` stars: middle `v` owns right vertices `v D2 .. (v + 1) D2`.
pub fn star_graph(n_middle: usize, d2: usize) -> BipartiteGraph {
    let edges: Vec<(usize, usize)> = (0..n_middle).flat_map(|v| (0..d2).map(move |j| (v, v * d2 + j))).collect();
    BipartiteGraph::from_edges(n_middle, n_middle * d2, &edges, false).expect("stars are simple")
}

/// Low/high split of `U = N(S) ⊆ M` at `cut`: fraction of the `K1 |S|` edges from `S` that go
/// to `U_low`, minimized over random left sets of each size up to `t_max`.
fn split_diagnostic(base: &TripartiteBase, cut: f64, params: &ConstructionParams, opts: &DeskOptions) -> Check {
    let mut rng = RngStream::new(opts.seed, 20).rng();
    let nl = base.n_left();
    let mut worst = 1.0f64;
    let mut cnt = vec![0usize; base.n_middle()];
    for k in 1..=opts.t_max.min(nl) {
        for _ in 0..50 {
            let s = rand::seq::index::sample(&mut rng, nl, k).into_vec();
            cnt.iter_mut().for_each(|c| *c = 0);
            for &l in &s {
                for &v in base.g1.left_neighbors(l) {
                    cnt[v] += 1;
                }
            }
            let low: usize = cnt.iter().filter(|&&c| c > 0 && c as f64 <= cut).sum();
            worst = worst.min(low as f64 / (params.k1 * k) as f64);
        }
    }
    Check::new(
        "low_degree_split",
        if worst >= 0.8 { Status::Pass } else { Status::Flagged },
        json!({ "cut": cut, "min_fraction": worst, "required": 0.8, "samples_per_size": 50 }),
    )
}

/// Merged product edges and the middle vertices involved, with neighbors listed in
/// ascending order at every middle vertex.
fn merges_of(g1: &BipartiteGraph, mid_right: &[Vec<usize>], h_edges: &[(usize, usize)]) -> (usize, Vec<usize>) {
    let mut first = std::collections::HashMap::with_capacity(mid_right.len() * h_edges.len());
    let mut merges = 0;
    let mut bad = Vec::new();
    for (v, right) in mid_right.iter().enumerate() {
        let left = g1.right_neighbors(v);
        for &(i, j) in h_edges {
            if let Some(&w) = first.get(&(left[i], right[j])) {
                merges += 1;
                bad.extend([v, w]);
            } else {
                first.insert((left[i], right[j]), v);
            }
        }
    }
    bad.sort_unstable();
    bad.dedup();
    (merges, bad)
}

/// Degree-preserving switches `(v, r), (w, r') -> (v, r'), (w, r)` on `g2`, started at a
/// middle vertex involved in a merge and kept when the merge count does not grow.
fn repair_merges<R: Rng>(g1: &BipartiteGraph, g2: &BipartiteGraph, h: &BipartiteGraph, max_switches: usize, rng: &mut R) -> BipartiteGraph {
    let h_edges = h.edges();
    let mut mid: Vec<Vec<usize>> = (0..g2.n_left()).map(|v| g2.left_neighbors(v).to_vec()).collect();
    let (mut merges, mut bad) = merges_of(g1, &mid, &h_edges);
    let nm = mid.len();
    for _ in 0..max_switches {
        if merges == 0 || nm < 2 {
            break;
        }
        let v = bad[rng.random_range(0..bad.len())];
        let w = rng.random_range(0..nm);
        if v == w || mid[v].is_empty() || mid[w].is_empty() {
            continue;
        }
        let r = mid[v][rng.random_range(0..mid[v].len())];
        let r2 = mid[w][rng.random_range(0..mid[w].len())];
        if mid[v].contains(&r2) || mid[w].contains(&r) {
            continue;
        }
        let (old_v, old_w) = (mid[v].clone(), mid[w].clone());
        let swap = |list: &mut Vec<usize>, from: usize, to: usize| {
            let k = list.iter().position(|&x| x == from).expect("present");
            list[k] = to;
            list.sort_unstable();
        };
        swap(&mut mid[v], r, r2);
        swap(&mut mid[w], r2, r);
        let (m2, b2) = merges_of(g1, &mid, &h_edges);
        if m2 <= merges {
            merges = m2;
            bad = b2;
        } else {
            mid[v] = old_v;
            mid[w] = old_w;
        }
    }
    let edges: Vec<(usize, usize)> = mid.iter().enumerate().flat_map(|(v, rs)| rs.iter().map(move |&r| (v, r))).collect();
    BipartiteGraph::from_edges(g2.n_left(), g2.n_right(), &edges, false).expect("simple by construction")
}

/// Samples tripartite bases (stream `100 + attempt`) until both spectral gates pass and the
/// product built by `build` has no merged edges, which the degree claims need.
fn build_on_sampled_base<F>(
    params: &ConstructionParams,
    opts: &DeskOptions,
    stars: bool,
    gadget: &BipartiteGraph,
    build: F,
) -> Result<(PipelineOutput, usize)>
where
    F: Fn(&TripartiteBase) -> Result<(BipartiteGraph, CertificateReport)>,
{
    let nm = opts.base_size;
    let (k1, k2, big_d1, big_d2) = (params.k1, params.k2, params.big_d1, params.big_d2);
    if !(nm * big_d1).is_multiple_of(k1) || !(nm * big_d2).is_multiple_of(k2) {
        return Err(PipelineError::Constraints(vec![format!("middle size {nm} incompatible with K1 = {k1}, K2 = {k2}")]));
    }
    let (nl, nr) = (nm * big_d1 / k1, nm * big_d2 / k2);
    let mut last_gate = json!(null);
    let mut merged = None;
    for attempt in 0..opts.base_attempts {
        let mut rng = RngStream::new(opts.seed, 100 + attempt as u64).rng();
        let Ok(g1) = sampling::sample_biregular(nl, nm, k1, big_d1, &mut rng, None) else { continue };
        let g2 = if stars {
            star_graph(nm, big_d2)
        } else {
            match sampling::sample_biregular(nm, nr, big_d2, k2, &mut rng, None) {
                Ok(g) => g,
                Err(_) => continue,
            }
        };
        let g2 = if stars { g2 } else { repair_merges(&g1, &g2, gadget, 50 * g2.m(), &mut rng) };
        let (ok1, l1, b1) = near_ramanujan_gate(&g1)?;
        let (ok2, l2, b2) = if stars { (true, 0.0, 0.0) } else { near_ramanujan_gate(&g2)? };
        last_gate = json!({ "attempt": attempt, "lambda2_g1": l1, "bound_g1": b1, "lambda2_g2": l2, "bound_g2": b2 });
        if !(ok1 && ok2) {
            continue;
        }
        let base = TripartiteBase::new(g1, g2, None)?;
        let (graph, report) = build(&base)?;
        let out = PipelineOutput { params: params.clone(), graph, report };
        if out.report.get("zero_merges").is_some_and(|c| c.status == Status::Pass) {
            return Ok((out, attempt));
        }
        merged.get_or_insert((out, attempt));
    }
    if let Some(m) = merged {
        return Ok(m);
    }
    Err(PipelineError::Gate {
        gate: "base_near_ramanujan".into(),
        report: Box::new(CertificateReport { checks: vec![Check::new("base_near_ramanujan", Status::Fail, last_gate)] }),
    })
}

/// Tripartite product with gates on base spectra and gadget profile; checks biregularity,
/// zero merges, UN floor, small-set lossless expansion and the low-degree split.
pub fn build_thm_tripartite(
    params: &ConstructionParams,
    base: &TripartiteBase,
    gadget: &BipartiteGraph,
    opts: &DeskOptions,
) -> Result<(BipartiteGraph, CertificateReport)> {
    let mut report = CertificateReport::default();
    let (ok1, l1, b1) = near_ramanujan_gate(&base.g1)?;
    let (ok2, l2, b2) = near_ramanujan_gate(&base.g2)?;
    gate(&mut report, "base_near_ramanujan", ok1 && ok2, json!({ "lambda2_g1": l1, "bound_g1": b1, "lambda2_g2": l2, "bound_g2": b2 }))?;
    gadget_gate(&mut report, params, gadget, opts, Objective::Unique)?;
    let prod = products::tripartite_line_product(base, gadget)?;
    let z = prod.graph;
    report.push(biregular_check(&z, params.product_degrees()));
    report.push(merge_check(prod.merges));
    let floor = params.delta.unwrap_or(0.0) * params.d1 as f64;
    report.push(un_floor_check(&z, None, floor, opts.t_max, opts.budget)?);
    report.push(lossless_small_set(&z, params.eps.unwrap_or(0.5), opts.budget)?);
    report.push(split_diagnostic(base, (params.big_d as f64).sqrt(), params, opts));
    Ok((z, report))
}

fn lossless_small_set(z: &BipartiteGraph, eps: f64, budget: u64) -> Result<Check> {
    Ok(match cycles::small_set_lossless_check(z, eps, LosslessMode::Cycle, budget) {
        Ok(r) => {
            let status = if r.vacuous { Status::NotApplicable } else { r.status };
            Check::new("small_set_lossless", status, serde_json::to_value(&r).expect("serializable"))
        }
        Err(cycles::CyclesError::Input(reason)) => Check::new("small_set_lossless", Status::NotApplicable, json!({ "reason": reason })),
        Err(e) => return Err(e.into()),
    })
}

fn gadget_gate(
    report: &mut CertificateReport,
    params: &ConstructionParams,
    gadget: &BipartiteGraph,
    opts: &DeskOptions,
    obj: Objective,
) -> Result<Vec<f64>> {
    let t_g = params.gadget_t_max.min(opts.gadget_t_cap).max(1);
    let ok_deg = gadget.validate_biregular(params.d1t, params.d2t)
        && gadget.n_left() == params.big_d1
        && gadget.n_right() == params.big_d2;
    let ratios = gadget_ratios(gadget, t_g, opts.budget, obj)?;
    let floors: Vec<f64> = (1..=t_g).map(|t| params.gadget_floor(t)).collect();
    let ok = ok_deg && ratios.len() == floors.len() && ratios.iter().zip(&floors).all(|(r, f)| *r >= f - 1e-12);
    let payload = json!({ "objective": format!("{obj:?}").to_lowercase(), "t_max": t_g, "floor": floors, "min_ratio": ratios });
    gate(report, "gadget_profile", ok, payload)?;
    Ok(ratios)
}

/// Prefix-minimum ratios: UN over all of `V(H)`, or `|N(S)|` over left sets.
fn gadget_ratios(h: &BipartiteGraph, t: usize, budget: u64, obj: Objective) -> Result<Vec<f64>> {
    Ok(match obj {
        Objective::Unique => expansion::exact_profile_bipartite(h, Side::Whole, t, budget)?.entries.iter().map(|e| e.min_ratio).collect(),
        Objective::Neighborhood => {
            let g = h.to_graph();
            let cands: Vec<usize> = (0..h.n_left()).collect();
            let best = expansion::minima_lexicographic(&g, &cands, t, budget, obj)?;
            let mut run = f64::INFINITY;
            best.iter()
                .enumerate()
                .map(|(i, b)| {
                    if let Some((v, _)) = b {
                        run = run.min(*v as f64 / (i + 1) as f64);
                    }
                    run
                })
                .collect()
        }
    })
}

/// First trial (stream `i` of `seed`) whose profile meets the gadget floor.
fn search_gadget(params: &ConstructionParams, opts: &DeskOptions, obj: Objective) -> Result<(BipartiteGraph, usize)> {
    let t_g = params.gadget_t_max.min(opts.gadget_t_cap).max(1);
    let master = sub_seed(opts.seed, 1);
    if obj == Objective::Unique {
        let g = sampling::gadget_search(
            params.big_d1,
            params.big_d2,
            params.d1t,
            params.d2t,
            |t| params.gadget_floor(t),
            t_g,
            master,
            opts.gadget_trials,
            opts.budget,
        )?;
        return Ok((g.graph, g.trial));
    }
    for trial in 0..opts.gadget_trials {
        let mut rng = RngStream::new(master, trial as u64).rng();
        let Ok(h) = sampling::sample_biregular(params.big_d1, params.big_d2, params.d1t, params.d2t, &mut rng, None) else { continue };
        let ratios = gadget_ratios(&h, t_g, opts.budget, obj)?;
        if ratios.iter().enumerate().all(|(i, r)| *r >= params.gadget_floor(i + 1) - 1e-12) {
            return Ok((h, trial));
        }
    }
    Err(sampling::SamplingError::SearchFailed { trials: opts.gadget_trials, best: Box::new(None) }.into())
}

pub fn run_desk_tripartite(params: &ConstructionParams, opts: &DeskOptions) -> Result<PipelineOutput> {
    let (gadget, trial) = search_gadget(params, opts, Objective::Unique)?;
    let (mut out, attempt) = build_on_sampled_base(params, opts, false, &gadget, |base| build_thm_tripartite(params, base, &gadget, opts))?;
    out.report.push(Check::new("search", Status::NotApplicable, json!({ "gadget_trial": trial, "base_attempt": attempt })));
    Ok(out)
}

/// One-sided lossless product: `g2` is a union of stars, gadget checked on `|N(S)|` over
/// left sets, product verified `|N(S)| >= (1 - eps) d1 |S|` for `S ⊆ L(Z)`, `|S| <= t_max`.
pub fn build_lossless(
    params: &ConstructionParams,
    base: &TripartiteBase,
    gadget: &BipartiteGraph,
    opts: &DeskOptions,
) -> Result<(BipartiteGraph, CertificateReport)> {
    let mut report = CertificateReport::default();
    let stars = (0..base.n_right()).all(|r| base.g2.right_neighbors(r).len() == 1);
    gate(&mut report, "right_in_one_gadget", stars, json!({ "k2": params.k2 }))?;
    let (ok1, l1, b1) = near_ramanujan_gate(&base.g1)?;
    gate(&mut report, "base_near_ramanujan", ok1, json!({ "lambda2_g1": l1, "bound_g1": b1 }))?;
    gadget_gate(&mut report, params, gadget, opts, Objective::Neighborhood)?;
    let prod = products::tripartite_line_product(base, gadget)?;
    let z = prod.graph;
    report.push(biregular_check(&z, params.product_degrees()));
    report.push(merge_check(prod.merges));
    let eps = params.eps.unwrap_or(0.5);
    let g = z.to_graph();
    let cands: Vec<usize> = (0..z.n_left()).collect();
    let (best, method) = minima(&g, &cands, None, opts.t_max, opts.budget, Objective::Neighborhood)?;
    let mut ok = true;
    let mut mins = Vec::new();
    let mut witness = None;
    for (i, slot) in best.iter().enumerate() {
        if let Some((nb, set)) = slot {
            mins.push(*nb);
            if (*nb as f64) < (1.0 - eps) * (params.d1 * (i + 1)) as f64 - 1e-9 && ok {
                ok = false;
                witness = Some(set.clone());
            }
        }
    }
    report.push(Check::new(
        "lossless",
        Status::from_bool(ok),
        json!({ "eps": eps, "d1": params.d1, "t_max": opts.t_max, "min_neighborhood": mins, "violation": witness, "method": method }),
    ));
    report.push(lossless_small_set(&z, eps, opts.budget)?);
    report.push(split_diagnostic(base, eps / 4.0 * (params.big_d as f64).sqrt(), params, opts));
    Ok((z, report))
}

pub fn run_desk_lossless(params: &ConstructionParams, opts: &DeskOptions) -> Result<PipelineOutput> {
    let (gadget, trial) = search_gadget(params, opts, Objective::Neighborhood)?;
    let (mut out, attempt) = build_on_sampled_base(params, opts, true, &gadget, |base| build_lossless(params, base, &gadget, opts))?;
    out.report.push(Check::new("search", Status::NotApplicable, json!({ "gadget_trial": trial, "base_attempt": attempt })));
    Ok(out)
}

pub fn run_desk(params: &ConstructionParams, opts: &DeskOptions) -> Result<PipelineOutput> {
    match params.construction {
        Construction::Main => run_desk_main(params, opts),
        Construction::Tripartite => run_desk_tripartite(params, opts),
        Construction::Lossless => run_desk_lossless(params, opts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn main_faithful_formulas() {
        let p = params_thm_main(0.5, 4, 4).unwrap();
        assert_eq!(p.tau, 18.0);
        assert_eq!(p.theta, 40.0 * 18.0 / 0.5);
        assert_eq!(p.theta, 1440.0);
        let c = ((8.0f64) / (1440.0 * 1440.0)).ceil() as usize;
        assert_eq!((p.big_d1, p.big_d2), (c * 4, c * 4));
        assert_eq!(p.delta, Some(0.3 * (-18.0f64 * 1440.0).exp()));
        assert_eq!(p.ln_delta, Some(0.3f64.ln() - 25920.0));
        assert_eq!(p.gamma, Some(9.0 * (p.big_d as f64).sqrt()));
        assert_eq!(p.meets_d0, Some(false));
        let q = params_thm_main(0.25, 1_000_000, 2_000_000).unwrap();
        assert_eq!(q.theta, 2880.0);
        let c = (3_000_000.0f64 / (2880.0 * 2880.0)).ceil() as usize;
        assert_eq!((q.big_d1, q.big_d2), (c * 2_000_000, c * 1_000_000));
    }

    #[test]
    fn main_constraints_are_listed() {
        let Err(PipelineError::Constraints(errs)) = params_thm_main(0.5, 2, 6) else { panic!("expected errors") };
        assert!(errs.iter().any(|e| e.contains("aspect")));
        let Err(PipelineError::Constraints(errs)) = params_thm_main(0.7, 3, 5) else { panic!("expected errors") };
        assert!(errs.iter().any(|e| e.contains("beta")));
        assert!(errs.iter().any(|e| e.contains("even")));
        assert!(errs.iter().any(|e| e.contains("aspect")));
    }

    #[test]
    fn tripartite_faithful_formulas() {
        let p = params_thm_tripartite(0.5, 0.5, 8000, 8000, None).unwrap();
        assert_eq!(p.k_exact, Some(1000.0 / 0.25));
        assert_eq!((p.k1, p.k2), (4000, 4000));
        assert_eq!((p.d1t, p.d2t), (2, 2));
        assert_eq!(p.theta, 1.0 / 0.5 * (4000.0f64 / 0.5).sqrt());
        assert_eq!(p.tau, 1.0);
        assert!(params_thm_tripartite(0.5, 0.5, 6000, 8000, None).is_err());
        assert!(params_thm_tripartite(0.5, 0.3, 8000, 8000, None).is_err());
    }

    #[test]
    fn lossless_faithful_formulas() {
        let eps = 0.5;
        let k1 = (1024.0f64 / 0.0625).ceil() as usize;
        assert_eq!(k1, 16384);
        let p = params_lossless(0.5, eps, 2 * k1, 3).unwrap_err();
        assert!(matches!(p, PipelineError::Constraints(_)));
        let p = params_lossless(0.5, eps, 2 * k1, 2 * k1).unwrap();
        assert_eq!((p.k1, p.k2), (k1, 1));
        assert_eq!((p.theta, p.tau), (1.0, 1.0));
        assert_eq!((p.d1t, p.d2t), (2, 2 * k1));
        assert_eq!(p.big_d1, (2 + 2 * k1) * 2 * k1);
        assert_eq!(p.big_d2, (2 + 2 * k1) * 2);
        let k = (1024.0f64 / 0.9f64.powi(4)).ceil() as usize;
        let q = params_lossless(0.5, 0.9, k, k).unwrap();
        assert_eq!(q.k1, k);
        assert!(params_lossless(0.5, 0.9, 2, 2).is_err());
    }

    #[test]
    fn desk_overrides() {
        let p = params_desk(Construction::Main, 0.5, None, 4, 4, Overrides::default()).unwrap();
        assert_eq!((p.tau, p.theta, p.gadget_scale), (0.75, 2.0, DESK_GADGET_SCALE));
        assert_eq!((p.big_d1, p.big_d2, p.big_d), (8, 8, 16));
        assert_eq!(p.gadget_t_max, 3);
        assert_eq!(p.product_degrees(), (8, 8));
        let t = params_desk(Construction::Tripartite, 0.5, Some(0.5), 9, 9, Overrides::default()).unwrap();
        assert_eq!((t.k1, t.d1t, t.big_d1, t.big_d2), (3, 3, 6, 6));
        assert_eq!(t.product_degrees(), (9, 9));
    }

    #[test]
    fn orbit_roots_of_translations() {
        let act: Vec<Vec<usize>> = (0..6).map(|h| (0..6).map(|x| (x + h) % 6).collect()).collect();
        assert_eq!(orbit_roots(&act, &act, 6), vec![0, 6]);
    }

    #[test]
    fn star_graph_shape() {
        let s = star_graph(3, 4);
        assert_eq!((s.n_left(), s.n_right()), (3, 12));
        assert!(s.validate_biregular(4, 1));
    }
}
