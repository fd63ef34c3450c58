//! Bounded enumeration of the grafting complex.
//!
//! Vertices are structures with the configuration's holonomy, identified by
//! canonical key. Edges are grafts along admissible curves and elementary
//! moves (meridian twists of real curves meeting the meridian twice).

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use log::{debug, info};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::surface::{
    elementary_move, graft_along, is_admissible, CheckedConfiguration, Curve, MeridianTwist, Structure, SurfaceError,
};

#[derive(Debug, Error)]
pub enum ComplexError {
    #[error("bad configuration: {0}")]
    BadConfiguration(#[from] SurfaceError),
    #[error("no grafting curve crosses chart {0:?}")]
    NoBaseCurve(String),
    #[error("could not start worker pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Graft,
    Elementary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: usize,
    pub key: String,
    pub depth: usize,
    pub structure: Structure,
}

/// A graft edge runs from a structure to its graft along `label`; an
/// elementary edge runs from a structure to its +1 meridian twist in chart
/// `label`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub kind: EdgeKind,
    pub label: String,
}

impl Edge {
    pub fn describe(&self) -> String {
        match self.kind {
            EdgeKind::Graft => format!("graft {}", self.label),
            EdgeKind::Elementary => format!("twist {} +1", self.label),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildParams {
    pub twist_bound: u32,
    pub depth: usize,
    /// Worker threads for frontier expansion; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl BuildParams {
    pub fn new(twist_bound: u32, depth: usize) -> Self {
        BuildParams {
            twist_bound,
            depth,
            threads: None,
        }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    pub graft: u64,
    pub elementary: u64,
    pub combined: u64,
}

#[derive(Debug, Clone)]
pub struct ComplexGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub twist_bound: u32,
    pub depth: usize,
    pub generators: Vec<String>,
    index: HashMap<String, usize>,
}

impl ComplexGraph {
    pub fn vertex(&self, key: &str) -> Option<&Vertex> {
        self.index.get(key).map(|&i| &self.vertices[i])
    }

    pub fn edges_of(&self, kind: EdgeKind) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.kind == kind)
    }

    pub fn components(&self, kinds: &[EdgeKind]) -> usize {
        let mut uf = UnionFind::new(self.vertices.len());
        for e in self.edges.iter().filter(|e| kinds.contains(&e.kind)) {
            uf.union(e.source, e.target);
        }
        uf.count()
    }

    fn rank_with(&self, kinds: &[EdgeKind]) -> u64 {
        let e = self.edges.iter().filter(|e| kinds.contains(&e.kind)).count();
        (e + self.components(kinds) - self.vertices.len()) as u64
    }

    pub fn ranks(&self) -> RankReport {
        RankReport {
            graft: self.rank_with(&[EdgeKind::Graft]),
            elementary: self.rank_with(&[EdgeKind::Elementary]),
            combined: cycle_rank(self),
        }
    }

    /// Ids of vertices reachable from the seed along edges of any kind,
    /// ignoring direction.
    pub fn reachable_from_seed(&self) -> usize {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.source].push(e.target);
            adj[e.target].push(e.source);
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0];
        let mut count = 0;
        while let Some(v) = stack.pop() {
            if std::mem::replace(&mut seen[v], true) {
                continue;
            }
            count += 1;
            stack.extend(adj[v].iter().copied().filter(|&w| !seen[w]));
        }
        count
    }

    pub fn to_json(&self) -> String {
        let export = GraphExport {
            twist_bound: self.twist_bound,
            depth: self.depth,
            generators: &self.generators,
            ranks: self.ranks(),
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexExport {
                    id: v.id,
                    depth: v.depth,
                    key: &v.key,
                    digest: digest(&v.key),
                })
                .collect(),
            edges: &self.edges,
        };
        serde_json::to_string_pretty(&export).expect("graph export serializes")
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph complex {\n");
        for v in &self.vertices {
            let _ = writeln!(out, "  v{} [label=\"{}\"];", v.id, digest(&v.key));
        }
        for e in &self.edges {
            let label = e.describe().replace('"', "\\\"");
            match e.kind {
                EdgeKind::Graft => {
                    let _ = writeln!(out, "  v{} -> v{} [label=\"{label}\"];", e.source, e.target);
                }
                EdgeKind::Elementary => {
                    let _ = writeln!(out, "  v{} -> v{} [label=\"{label}\", dir=none];", e.source, e.target);
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Serialize)]
struct GraphExport<'a> {
    twist_bound: u32,
    depth: usize,
    generators: &'a [String],
    ranks: RankReport,
    vertices: Vec<VertexExport<'a>>,
    edges: &'a [Edge],
}

#[derive(Serialize)]
struct VertexExport<'a> {
    id: usize,
    depth: usize,
    key: &'a str,
    digest: String,
}

/// Short hex digest of a canonical key.
pub fn digest(key: &str) -> String {
    let hash = Sha256::digest(key.as_bytes());
    hex::encode(&hash[..6])
}

/// First Betti number `|E| − |V| + #components`, parallel edges counted.
pub fn cycle_rank(graph: &ComplexGraph) -> u64 {
    graph.rank_with(&[EdgeKind::Graft, EdgeKind::Elementary])
}

struct UnionFind {
    parent: Vec<usize>,
    sets: usize,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            sets: n,
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
            self.sets -= 1;
        }
    }

    fn count(&self) -> usize {
        self.sets
    }
}

/// Every grafting curve of the configuration together with its meridian
/// twists `T^n` for `1 ≤ |n| ≤ bound` in each chart it crosses.
pub fn graft_candidates(config: &CheckedConfiguration, bound: u32) -> Result<Vec<Curve>, SurfaceError> {
    let mut out: Vec<Curve> = Vec::new();
    let mut push = |c: Curve| {
        if !out.contains(&c) {
            out.push(c);
        }
    };
    for g in config.graft_curves() {
        push(g.clone());
        for chart in g.charts.keys() {
            for n in 1..=i64::from(bound) {
                push(g.twist_about_meridian(config.model(), chart, n)?);
                push(g.twist_about_meridian(config.model(), chart, -n)?);
            }
        }
    }
    Ok(out)
}

struct Move {
    source: Structure,
    target: Structure,
    kind: EdgeKind,
    label: String,
}

fn expand(config: &CheckedConfiguration, candidates: &[Curve], s: &Structure) -> Vec<Move> {
    let model = config.model();
    let mut moves = Vec::new();
    for chart in model.chart_names() {
        if let Ok(up) = elementary_move(model, s, chart, 1) {
            moves.push(Move {
                source: s.clone(),
                target: up,
                kind: EdgeKind::Elementary,
                label: chart.to_string(),
            });
        }
        if let Ok(down) = elementary_move(model, s, chart, -1) {
            moves.push(Move {
                source: down,
                target: s.clone(),
                kind: EdgeKind::Elementary,
                label: chart.to_string(),
            });
        }
    }
    for g in candidates {
        if !is_admissible(model, g, s).is_admissible() {
            debug!("skipping {g} at {}: not admissible", s.key());
            continue;
        }
        match graft_along(model, s, g) {
            Ok(target) => moves.push(Move {
                source: s.clone(),
                target,
                kind: EdgeKind::Graft,
                label: g.to_string(),
            }),
            Err(e) => debug!("skipping {g} at {}: {e}", s.key()),
        }
    }
    moves
}

/// Breadth-first enumeration of the ball of radius `depth` around `seed`,
/// with every edge between enumerated vertices.
pub fn build_complex(
    config: &CheckedConfiguration,
    seed: &Structure,
    params: &BuildParams,
) -> Result<ComplexGraph, ComplexError> {
    let candidates = graft_candidates(config, params.twist_bound)?;
    let pool = match params.threads {
        Some(n) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| ComplexError::ThreadPool(e.to_string()))?,
        ),
        None => None,
    };

    let mut graph = ComplexGraph {
        vertices: Vec::new(),
        edges: Vec::new(),
        twist_bound: params.twist_bound,
        depth: params.depth,
        generators: candidates.iter().map(Curve::to_string).collect(),
        index: HashMap::new(),
    };
    graph
        .generators
        .extend(config.model().chart_names().map(|c| format!("twist {c}")));
    let seed_key = seed.key();
    graph.index.insert(seed_key.clone(), 0);
    graph.vertices.push(Vertex {
        id: 0,
        key: seed_key,
        depth: 0,
        structure: seed.clone(),
    });

    let mut seen_edges: HashSet<(usize, EdgeKind, String)> = HashSet::new();
    let mut frontier = vec![0usize];
    for level in 0..=params.depth {
        let structures: Vec<&Structure> = frontier.iter().map(|&i| &graph.vertices[i].structure).collect();
        let run = || {
            structures
                .par_iter()
                .map(|s| expand(config, &candidates, s))
                .collect::<Vec<_>>()
        };
        let expanded = match &pool {
            Some(p) => p.install(run),
            None => run(),
        };

        let mut next = Vec::new();
        for mv in expanded.into_iter().flatten() {
            let mut ends = [0usize; 2];
            let mut known = true;
            for (slot, s) in [&mv.source, &mv.target].into_iter().enumerate() {
                let key = s.key();
                ends[slot] = match graph.index.get(&key) {
                    Some(&i) => i,
                    None if level < params.depth => {
                        let id = graph.vertices.len();
                        graph.index.insert(key.clone(), id);
                        graph.vertices.push(Vertex {
                            id,
                            key,
                            depth: level + 1,
                            structure: s.clone(),
                        });
                        next.push(id);
                        id
                    }
                    None => {
                        known = false;
                        break;
                    }
                };
            }
            if known && seen_edges.insert((ends[0], mv.kind, mv.label.clone())) {
                graph.edges.push(Edge {
                    source: ends[0],
                    target: ends[1],
                    kind: mv.kind,
                    label: mv.label,
                });
            }
        }
        info!(
            "level {level}: {} vertices, {} edges",
            graph.vertices.len(),
            graph.edges.len()
        );
        frontier = next;
    }
    Ok(graph)
}

/// A pair `(k, l)` with `k + l = m` for which
/// `Gr_{T^m(γ)}(Σ(λ)) = Gr_{T^k(γ)}(Σ(T^l(λ)))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub m: i64,
    pub k: i64,
    pub l: i64,
    pub key: String,
}

fn base_curve<'a>(config: &'a CheckedConfiguration, chart: &str) -> Result<&'a Curve, ComplexError> {
    config
        .base_curve(chart)
        .ok_or_else(|| ComplexError::NoBaseCurve(chart.to_string()))
}

/// Both sides of the iterated connectivity identity for `m = k + l`:
/// `Gr_{T^m(γ)}(Σ(λ))` and `Gr_{T^k(γ)}(Σ(T^l(λ)))`.
pub fn iterated_sides(
    config: &CheckedConfiguration,
    chart: &str,
    k: i64,
    l: i64,
) -> Result<(Structure, Structure), ComplexError> {
    let model = config.model();
    let gamma = base_curve(config, chart)?;
    let lhs = graft_along(model, &config.seed(), &gamma.twist_about_meridian(model, chart, k + l)?)?;
    let rhs = graft_along(
        model,
        &config.twisted_seed(chart, l)?,
        &gamma.twist_about_meridian(model, chart, k)?,
    )?;
    Ok((lhs, rhs))
}

/// Common grafts of `Σ(λ)` and `Σ(T^{l0}(λ))` for every `|m| ≤ bound`.
pub fn common_grafts(
    config: &CheckedConfiguration,
    chart: &str,
    l0: i64,
    bound: u32,
) -> Result<Vec<Witness>, ComplexError> {
    let mut out = Vec::new();
    let bound = i64::from(bound);
    for m in -bound..=bound {
        let k = m - l0;
        match iterated_sides(config, chart, k, l0) {
            Ok((lhs, rhs)) if lhs.key() == rhs.key() => out.push(Witness {
                m,
                k,
                l: l0,
                key: lhs.key(),
            }),
            Ok(_) => debug!("m={m}, k={k}, l={l0}: grafts differ"),
            Err(ComplexError::BadConfiguration(e)) => debug!("m={m}, k={k}, l={l0}: {e}"),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanEntry {
    pub l: i64,
    pub k: i64,
    pub key: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanReport {
    pub m: i64,
    pub entries: Vec<FanEntry>,
    pub common_key: Option<String>,
}

impl FanReport {
    pub fn is_common(&self) -> bool {
        self.common_key.is_some()
    }
}

/// Graft each standard structure `Σ(T^l(λ))`, `0 ≤ l ≤ max_l`, along
/// `T^{m−l}(γ)` and report whether all results coincide.
pub fn standard_fan(config: &CheckedConfiguration, chart: &str, max_l: u32, m: i64) -> Result<FanReport, ComplexError> {
    let model = config.model();
    let gamma = base_curve(config, chart)?;
    let mut entries = Vec::new();
    for l in 0..=i64::from(max_l) {
        let k = m - l;
        let seed = config.twisted_seed(chart, l)?;
        let key = gamma
            .twist_about_meridian(model, chart, k)
            .and_then(|g| graft_along(model, &seed, &g))
            .map(|s| s.key())
            .ok();
        entries.push(FanEntry { l, k, key });
    }
    let first = entries[0].key.clone();
    let common_key = first.filter(|f| entries.iter().all(|e| e.key.as_deref() == Some(f)));
    Ok(FanReport { m, entries, common_key })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{validate_configuration, Configuration};

    fn standard() -> CheckedConfiguration {
        validate_configuration(&Configuration::standard(&["beta"])).unwrap()
    }

    #[test]
    fn depth_zero_is_a_point() {
        let cfg = standard();
        let g = build_complex(&cfg, &cfg.seed(), &BuildParams::new(3, 0)).unwrap();
        assert_eq!(g.vertices.len(), 1);
        assert!(g.edges.is_empty());
        assert_eq!(cycle_rank(&g), 0);
    }

    #[test]
    fn depth_one_without_twists() {
        let cfg = standard();
        let g = build_complex(&cfg, &cfg.seed(), &BuildParams::new(0, 1)).unwrap();
        assert_eq!(g.vertices.len(), 4);
        assert_eq!(g.edges_of(EdgeKind::Graft).count(), 1);
        assert_eq!(g.edges_of(EdgeKind::Elementary).count(), 2);
        assert_eq!(g.reachable_from_seed(), 4);
    }

    #[test]
    fn dot_export_shape() {
        let cfg = standard();
        let g = build_complex(&cfg, &cfg.seed(), &BuildParams::new(1, 1)).unwrap();
        let dot = g.to_dot();
        assert!(dot.starts_with("digraph complex {\n"));
        assert!(dot.ends_with("}\n"));
        assert!(dot.contains("dir=none"));
    }

    #[test]
    fn fixed_witness_instance() {
        let cfg = standard();
        let (lhs, rhs) = iterated_sides(&cfg, "beta", 1, 1).unwrap();
        assert_eq!(lhs.key(), rhs.key());
        let w = common_grafts(&cfg, "beta", 0, 0).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].key, "1*(gamma^2,lambda)[beta:4,0]");
    }

    #[test]
    fn fan_degenerate_cases() {
        let cfg = standard();
        let fan = standard_fan(&cfg, "beta", 0, 0).unwrap();
        assert_eq!(fan.common_key.as_deref(), Some("1*(gamma^2,lambda)[beta:4,0]"));
        assert!(standard_fan(&cfg, "beta", 3, 3).unwrap().is_common());
    }

    #[test]
    fn triangle_rank() {
        let mut g = ComplexGraph {
            vertices: Vec::new(),
            edges: Vec::new(),
            twist_bound: 0,
            depth: 0,
            generators: Vec::new(),
            index: HashMap::new(),
        };
        let s = standard().seed();
        for id in 0..3 {
            g.vertices.push(Vertex {
                id,
                key: id.to_string(),
                depth: 0,
                structure: s.clone(),
            });
        }
        for (a, b) in [(0, 1), (1, 2), (2, 0)] {
            g.edges.push(Edge {
                source: a,
                target: b,
                kind: EdgeKind::Graft,
                label: String::new(),
            });
        }
        assert_eq!(cycle_rank(&g), 1);
        assert_eq!(g.ranks().elementary, 0);
    }
}
