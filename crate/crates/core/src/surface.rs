//! Surfaces with meridian annulus charts, multicurves on them, and the
//! structure-level operations (twists, grafting, Goldman decomposition).
//!
//! A curve is recorded by an opaque exterior label (its homotopy class rel
//! the chart boundaries, outside every annulus) together with its torus class
//! in each chart it crosses. Two multicurves with the same exterior data and
//! the same chart classes are homotopic, so every computation here reduces to
//! [`crate::torus`] arithmetic inside the charts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::torus::{self, Mode, TorusClass, TorusError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("genus must be at least 2, got {0}")]
    InvalidGenus(u32),
    #[error("chart {0:?} is declared twice")]
    DuplicateChart(String),
    #[error("unknown chart {0:?}")]
    UnknownChart(String),
    #[error("meridian of chart {0:?} must have trivial holonomy")]
    NontrivialMeridian(String),
    #[error("chart {chart:?}: expected {constraint}, found {found}")]
    BadIntersectionPattern {
        chart: String,
        constraint: String,
        found: u128,
    },
    #[error("curve is not admissible: {0}")]
    NotAdmissible(String),
    #[error("curve {0:?} is not spiraling in any chart")]
    NonSpiralingCurve(String),
    #[error("component {0:?} has odd multiplicity")]
    OddMultiplicity(String),
    #[error("components meeting chart {0:?} intersect")]
    IntersectingComponents(String),
    #[error("chart {chart:?} meets the real curves {found} times, an elementary move needs 2")]
    NotElementary { chart: String, found: u128 },
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error(transparent)]
    Torus(#[from] TorusError),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HolonomyTag(pub String);

impl HolonomyTag {
    pub fn new(tag: impl Into<String>) -> Self {
        HolonomyTag(tag.into())
    }
}

impl fmt::Display for HolonomyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chart {
    pub name: String,
    pub meridian_trivial_holonomy: bool,
}

/// Closed surface of genus `genus` with pairwise disjoint meridian annuli.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceModel {
    genus: u32,
    holonomy: HolonomyTag,
    charts: Vec<Chart>,
    exterior_crossings: BTreeSet<(String, String)>,
}

impl SurfaceModel {
    pub fn new<I, S>(genus: u32, holonomy: HolonomyTag, charts: I) -> Result<Self, SurfaceError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        if genus < 2 {
            return Err(SurfaceError::InvalidGenus(genus));
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for name in charts {
            let name = name.into();
            if !seen.insert(name.clone()) {
                return Err(SurfaceError::DuplicateChart(name));
            }
            out.push(Chart {
                name,
                meridian_trivial_holonomy: true,
            });
        }
        Ok(SurfaceModel {
            genus,
            holonomy,
            charts: out,
            exterior_crossings: BTreeSet::new(),
        })
    }

    /// Declare that curves with these exterior labels cross outside the charts.
    pub fn with_exterior_crossing(mut self, a: &str, b: &str) -> Self {
        self.exterior_crossings.insert(ordered(a, b));
        self
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn holonomy(&self) -> &HolonomyTag {
        &self.holonomy
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn chart_names(&self) -> impl Iterator<Item = &str> {
        self.charts.iter().map(|c| c.name.as_str())
    }

    pub fn exterior_crossings(&self) -> &BTreeSet<(String, String)> {
        &self.exterior_crossings
    }

    pub fn has_chart(&self, name: &str) -> bool {
        self.charts.iter().any(|c| c.name == name)
    }

    fn require_chart(&self, name: &str) -> Result<(), SurfaceError> {
        if self.has_chart(name) {
            Ok(())
        } else {
            Err(SurfaceError::UnknownChart(name.to_string()))
        }
    }

    pub fn crosses_exterior(&self, a: &str, b: &str) -> bool {
        self.exterior_crossings.contains(&ordered(a, b))
    }

    fn check(&self) -> Result<(), SurfaceError> {
        if self.genus < 2 {
            return Err(SurfaceError::InvalidGenus(self.genus));
        }
        for c in &self.charts {
            if !c.meridian_trivial_holonomy {
                return Err(SurfaceError::NontrivialMeridian(c.name.clone()));
            }
        }
        Ok(())
    }
}

fn ordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// One component of a multicurve: `multiplicity` parallel copies of a curve.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Curve {
    pub label: String,
    pub charts: BTreeMap<String, TorusClass>,
    pub multiplicity: u64,
}

impl Curve {
    pub fn new(label: impl Into<String>) -> Self {
        Curve {
            label: label.into(),
            charts: BTreeMap::new(),
            multiplicity: 1,
        }
    }

    pub fn in_chart(mut self, chart: impl Into<String>, class: impl Into<TorusClass>) -> Self {
        let class = class.into();
        let chart = chart.into();
        if class.is_empty() {
            self.charts.remove(&chart);
        } else {
            self.charts.insert(chart, class);
        }
        self
    }

    pub fn times(mut self, multiplicity: u64) -> Self {
        self.multiplicity = multiplicity;
        self
    }

    pub fn chart(&self, name: &str) -> TorusClass {
        self.charts.get(name).copied().unwrap_or(TorusClass::EMPTY)
    }

    fn to_block(&self) -> Result<Block, SurfaceError> {
        let m = i64::try_from(self.multiplicity)
            .map_err(|_| SurfaceError::InvalidCurve("multiplicity too large".into()))?;
        let mut charts = BTreeMap::new();
        for (name, class) in &self.charts {
            charts.insert(name.clone(), class.checked_scale(m)?);
        }
        Ok(Block {
            labels: BTreeMap::from([(self.label.clone(), self.multiplicity)]),
            charts,
        })
    }
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)?;
        for (name, class) in &self.charts {
            write!(f, "@{name}={class}")?;
        }
        if self.multiplicity != 1 {
            write!(f, ":{}", self.multiplicity)?;
        }
        Ok(())
    }
}

/// A multicurve as a list of components, before canonicalization.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Multicurve {
    pub components: Vec<Curve>,
}

impl Multicurve {
    pub fn new(components: Vec<Curve>) -> Self {
        Multicurve { components }
    }

    pub fn canonical(&self) -> Result<CanonicalMulticurve, SurfaceError> {
        let blocks = self
            .components
            .iter()
            .filter(|c| c.multiplicity > 0)
            .map(Curve::to_block)
            .collect::<Result<Vec<_>, _>>()?;
        CanonicalMulticurve::from_blocks(blocks)
    }
}

impl FromIterator<Curve> for Multicurve {
    fn from_iter<T: IntoIterator<Item = Curve>>(iter: T) -> Self {
        Multicurve::new(iter.into_iter().collect())
    }
}

/// The curves of a multicurve that pass through a common chart, merged.
///
/// Inside a chart the pieces are disjoint, hence parallel, so their union is
/// recorded by one unoriented torus class; outside, by the multiset of
/// exterior labels. `labels` and `charts` hold totals, not per-copy values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Block {
    pub labels: BTreeMap<String, u64>,
    pub charts: BTreeMap<String, TorusClass>,
}

impl Block {
    /// Number of identical parallel copies the block splits into.
    pub fn multiplicity(&self) -> u64 {
        let mut g = 0u64;
        for &n in self.labels.values() {
            g = g.gcd(&n);
        }
        for c in self.charts.values() {
            g = g.gcd(&c.p.unsigned_abs()).gcd(&c.q.unsigned_abs());
        }
        g
    }

    pub fn chart(&self, name: &str) -> TorusClass {
        self.charts.get(name).copied().unwrap_or(TorusClass::EMPTY)
    }

    fn is_chart_free(&self) -> bool {
        self.charts.is_empty()
    }

    fn tidy(&mut self) {
        self.labels.retain(|_, n| *n > 0);
        self.charts.retain(|_, c| !c.is_empty());
        for c in self.charts.values_mut() {
            *c = c.sign_normalized();
        }
    }

    fn absorb(&mut self, other: Block) -> Result<(), SurfaceError> {
        for (label, n) in other.labels {
            *self.labels.entry(label).or_insert(0) += n;
        }
        for (name, class) in other.charts {
            let here = self.chart(&name);
            if torus::geometric_intersection(here, class) != 0 {
                return Err(SurfaceError::IntersectingComponents(name));
            }
            let merged = here.sign_normalized().checked_add(class.sign_normalized())?;
            self.charts.insert(name, merged);
        }
        Ok(())
    }

    fn key(&self) -> String {
        let m = self.multiplicity().max(1);
        let labels: Vec<String> = self
            .labels
            .iter()
            .map(|(l, n)| match n / m {
                1 => l.clone(),
                k => format!("{l}^{k}"),
            })
            .collect();
        let mut out = format!("{m}*({})", labels.join(","));
        if !self.charts.is_empty() {
            let charts: Vec<String> = self
                .charts
                .iter()
                .map(|(name, c)| format!("{name}:{},{}", c.p / m as i64, c.q / m as i64))
                .collect();
            out.push_str(&format!("[{}]", charts.join(";")));
        }
        out
    }
}

/// Deterministic normal form of a multicurve.
///
/// Blocks sharing a chart are fused, chart-free components with the same
/// label are merged, chart classes are sign-normalized, and blocks are
/// sorted. Two multicurves are homotopic exactly when their normal forms
/// are equal.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalMulticurve {
    blocks: Vec<Block>,
}

impl CanonicalMulticurve {
    pub fn empty() -> Self {
        CanonicalMulticurve { blocks: Vec::new() }
    }

    pub fn from_blocks(blocks: Vec<Block>) -> Result<Self, SurfaceError> {
        let mut pending: Vec<Block> = blocks
            .into_iter()
            .map(|mut b| {
                b.tidy();
                b
            })
            .filter(|b| !b.labels.is_empty() || !b.charts.is_empty())
            .collect();
        let mut done: Vec<Block> = Vec::new();
        while let Some(mut current) = pending.pop() {
            loop {
                let joins = |b: &Block| {
                    if current.is_chart_free() && b.is_chart_free() {
                        current.labels.keys().eq(b.labels.keys())
                    } else {
                        b.charts.keys().any(|k| current.charts.contains_key(k))
                    }
                };
                let Some(pos) = pending
                    .iter()
                    .position(joins)
                    .or_else(|| done.iter().position(joins).map(|i| i + pending.len()))
                else {
                    break;
                };
                let other = if pos < pending.len() {
                    pending.swap_remove(pos)
                } else {
                    done.swap_remove(pos - pending.len())
                };
                current.absorb(other)?;
            }
            done.push(current);
        }
        done.sort();
        Ok(CanonicalMulticurve { blocks: done })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Total unoriented class of the multicurve in a chart.
    pub fn chart(&self, name: &str) -> TorusClass {
        self.blocks
            .iter()
            .map(|b| b.chart(name))
            .find(|c| !c.is_empty())
            .unwrap_or(TorusClass::EMPTY)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.blocks.iter().flat_map(|b| b.labels.keys().map(String::as_str))
    }

    pub fn component_count(&self) -> u64 {
        self.blocks.iter().map(|b| b.labels.values().sum::<u64>()).sum()
    }

    pub fn key(&self) -> String {
        if self.blocks.is_empty() {
            return "empty".to_string();
        }
        self.blocks.iter().map(Block::key).collect::<Vec<_>>().join(" + ")
    }

    fn with_block(&self, block: Block) -> Result<Self, SurfaceError> {
        let mut blocks = self.blocks.clone();
        blocks.push(block);
        CanonicalMulticurve::from_blocks(blocks)
    }
}

impl fmt::Display for CanonicalMulticurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// Canonical key of a multicurve: equal keys ⇔ homotopic multicurves.
pub fn canonical_key(multicurve: &Multicurve) -> Result<String, SurfaceError> {
    Ok(multicurve.canonical()?.key())
}

/// A projective structure with fixed holonomy, identified by its real curves.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Structure {
    pub holonomy: HolonomyTag,
    pub real_curves: CanonicalMulticurve,
}

impl Structure {
    pub fn new(holonomy: HolonomyTag, real_curves: CanonicalMulticurve) -> Self {
        Structure { holonomy, real_curves }
    }

    /// The standard structure, whose real curves are empty.
    pub fn standard(holonomy: HolonomyTag) -> Self {
        Structure::new(holonomy, CanonicalMulticurve::empty())
    }

    pub fn key(&self) -> String {
        self.real_curves.key()
    }

    fn with_real_curves(&self, real_curves: CanonicalMulticurve) -> Self {
        Structure {
            holonomy: self.holonomy.clone(),
            real_curves,
        }
    }
}

/// Surface, base real multicurve and candidate grafting curves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub model: SurfaceModel,
    pub real_curves: Multicurve,
    pub graft_curves: Vec<Curve>,
}

/// A configuration that passed [`validate_configuration`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckedConfiguration {
    model: SurfaceModel,
    lambda: CanonicalMulticurve,
    graft_curves: Vec<Curve>,
}

impl CheckedConfiguration {
    pub fn model(&self) -> &SurfaceModel {
        &self.model
    }

    pub fn lambda(&self) -> &CanonicalMulticurve {
        &self.lambda
    }

    pub fn graft_curves(&self) -> &[Curve] {
        &self.graft_curves
    }

    /// The first grafting curve that crosses `chart`.
    pub fn base_curve(&self, chart: &str) -> Option<&Curve> {
        self.graft_curves.iter().find(|c| c.charts.contains_key(chart))
    }

    pub fn seed(&self) -> Structure {
        Structure::new(self.model.holonomy.clone(), self.lambda.clone())
    }

    /// Seed structure with the real curves twisted `n` times about `chart`.
    pub fn twisted_seed(&self, chart: &str, n: i64) -> Result<Structure, SurfaceError> {
        self.seed().twist_about_meridian(&self.model, chart, n)
    }
}

impl Configuration {
    /// Genus 2 with the given meridian charts, `lambda` crossing each chart
    /// in `(2,0)` and `gamma` crossing each in `(1,0)`.
    pub fn standard(charts: &[&str]) -> Configuration {
        let model =
            SurfaceModel::new(2, HolonomyTag::new("schottky"), charts.iter().copied()).expect("valid standard model");
        let mut lambda = Curve::new("lambda");
        let mut gamma = Curve::new("gamma");
        for c in charts {
            lambda = lambda.in_chart(*c, (2, 0));
            gamma = gamma.in_chart(*c, (1, 0));
        }
        Configuration {
            model,
            real_curves: Multicurve::new(vec![lambda]),
            graft_curves: vec![gamma],
        }
    }
}

/// Check the standing intersection pattern in every chart: the real curves
/// cross the meridian twice, each grafting curve crosses it once and misses
/// the real curves.
pub fn validate_configuration(config: &Configuration) -> Result<CheckedConfiguration, SurfaceError> {
    let model = &config.model;
    model.check()?;
    for curve in config.real_curves.components.iter().chain(&config.graft_curves) {
        for chart in curve.charts.keys() {
            model.require_chart(chart)?;
        }
    }
    let lambda = config.real_curves.canonical()?;
    for chart in model.chart_names() {
        let lc = lambda.chart(chart);
        let found = torus::geometric_intersection(TorusClass::MERIDIAN, lc);
        if found != 2 {
            return Err(SurfaceError::BadIntersectionPattern {
                chart: chart.to_string(),
                constraint: "|meridian ∩ lambda| = 2".into(),
                found,
            });
        }
        for gamma in config.graft_curves.iter().filter(|g| g.charts.contains_key(chart)) {
            let gc = gamma.chart(chart);
            let found = torus::geometric_intersection(TorusClass::MERIDIAN, gc);
            if found != 1 {
                return Err(SurfaceError::BadIntersectionPattern {
                    chart: chart.to_string(),
                    constraint: format!("|meridian ∩ {}| = 1", gamma.label),
                    found,
                });
            }
            let found = torus::geometric_intersection(lc, gc);
            if found != 0 {
                return Err(SurfaceError::BadIntersectionPattern {
                    chart: chart.to_string(),
                    constraint: format!("|lambda ∩ {}| = 0", gamma.label),
                    found,
                });
            }
        }
    }
    for gamma in &config.graft_curves {
        if gamma.multiplicity != 1 {
            return Err(SurfaceError::InvalidCurve(format!(
                "grafting curve {} must have multiplicity 1",
                gamma.label
            )));
        }
    }
    Ok(CheckedConfiguration {
        model: model.clone(),
        lambda,
        graft_curves: config.graft_curves.clone(),
    })
}

/// Spiraling type of a single strand `(1, k)` through a chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SpiralClass {
    Left(u64),
    Right(u64),
    NonSpiraling,
}

impl SpiralClass {
    /// Resolution realizing a graft along a curve of this type.
    pub fn graft_mode(self) -> Option<Mode> {
        match self {
            SpiralClass::Left(_) => Some(Mode::Sharp),
            SpiralClass::Right(_) => Some(Mode::Flat),
            SpiralClass::NonSpiraling => None,
        }
    }
}

impl fmt::Display for SpiralClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpiralClass::Left(k) => write!(f, "left({k})"),
            SpiralClass::Right(k) => write!(f, "right({k})"),
            SpiralClass::NonSpiraling => f.write_str("non-spiraling"),
        }
    }
}

pub fn spiraling_class(chart_class: TorusClass) -> SpiralClass {
    let c = chart_class.sign_normalized();
    match (c.p, c.q.signum()) {
        (1, 1) => SpiralClass::Left(c.q.unsigned_abs()),
        (1, -1) => SpiralClass::Right(c.q.unsigned_abs()),
        _ => SpiralClass::NonSpiraling,
    }
}

/// Chart-level effect of grafting: `[λ, 2γ]` resolved in the mode the
/// spiraling direction selects.
pub fn spiral_resolve(
    lambda: TorusClass,
    gamma: TorusClass,
    direction: SpiralClass,
) -> Result<TorusClass, SurfaceError> {
    let mode = direction
        .graft_mode()
        .ok_or_else(|| SurfaceError::NonSpiralingCurve(gamma.to_string()))?;
    Ok(torus::resolve(lambda, gamma.checked_scale(2)?, mode)?)
}

/// Outcome of [`check_spiraling_hypotheses`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpiralCheck {
    pub holds: bool,
    /// Direction in each chart, relative to the real curves there.
    pub directions: BTreeMap<String, SpiralClass>,
    pub diagnostic: String,
}

impl SpiralCheck {
    fn fail(diagnostic: impl Into<String>) -> Self {
        SpiralCheck {
            holds: false,
            directions: BTreeMap::new(),
            diagnostic: diagnostic.into(),
        }
    }

    pub fn is_spiraling(&self) -> bool {
        self.holds && self.directions.values().any(|d| *d != SpiralClass::NonSpiraling)
    }
}

fn disjoint_from(model: &SurfaceModel, curve: &Curve, lambda: &CanonicalMulticurve) -> Result<(), String> {
    for (chart, class) in &curve.charts {
        let i = torus::geometric_intersection(*class, lambda.chart(chart));
        if i != 0 {
            return Err(format!("meets the real curves {i} times in chart {chart}"));
        }
    }
    if let Some(l) = lambda.labels().find(|l| model.crosses_exterior(&curve.label, l)) {
        return Err(format!("crosses real curve {l} outside the charts"));
    }
    Ok(())
}

/// Test whether `gamma_prime` is a spiraling twist of `gamma`, a curve
/// disjoint from the real curves `lambda`.
///
/// Each chart is checked on its own: `γ′` must be a twist of `γ` about the
/// chart meridian (which pairs every arc of `γ′ − γ` with an arc of `γ − γ′`
/// along a meridian of trivial holonomy), and
/// `|î(γ,γ′)| = i(γ,γ′) = ½·i(γ′,λ)` must hold there.
pub fn check_spiraling_hypotheses(
    model: &SurfaceModel,
    gamma_prime: &Curve,
    gamma: &Curve,
    lambda: &CanonicalMulticurve,
) -> SpiralCheck {
    if gamma_prime.label != gamma.label {
        return SpiralCheck::fail(format!(
            "{} and {} have different exterior classes",
            gamma_prime.label, gamma.label
        ));
    }
    if let Err(why) = disjoint_from(model, gamma, lambda) {
        return SpiralCheck::fail(format!("base curve {why}"));
    }
    if !gamma_prime.charts.keys().eq(gamma.charts.keys()) {
        return SpiralCheck::fail("curves cross different charts");
    }
    let mut directions = BTreeMap::new();
    for (chart, &g) in &gamma.charts {
        let gp = gamma_prime.chart(chart);
        if g.p.abs() != 1 || gp.p != g.p {
            return SpiralCheck::fail(format!("chart {chart}: {gp} is not a single strand twisted from {g}"));
        }
        let n = (gp.q - g.q) * g.p;
        match torus::dehn_twist(g, TorusClass::MERIDIAN, n) {
            Ok(t) if t == gp => {}
            _ => {
                return SpiralCheck::fail(format!("chart {chart}: {gp} is not a meridian twist of {g}"));
            }
        }
        let alg = torus::algebraic_intersection(g, gp).unsigned_abs();
        let geo = torus::geometric_intersection(g, gp);
        let with_lambda = torus::geometric_intersection(gp, lambda.chart(chart));
        if alg != geo || 2 * geo != with_lambda {
            return SpiralCheck::fail(format!(
                "chart {chart}: |î(γ,γ′)| = {alg}, i(γ,γ′) = {geo}, i(γ′,λ) = {with_lambda}"
            ));
        }
        // relative to λ the strand reads (1, n)
        directions.insert(chart.clone(), spiraling_class(TorusClass::new(1, n)));
    }
    let spiral = directions.values().any(|d| *d != SpiralClass::NonSpiraling);
    SpiralCheck {
        holds: true,
        diagnostic: if spiral {
            "spiraling".into()
        } else {
            "identical to the base curve; non-spiraling".into()
        },
        directions,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Admissibility {
    /// Disjoint from the real curves.
    Disjoint,
    /// A spiraling twist of a disjoint curve; direction per chart.
    Spiraling(BTreeMap<String, SpiralClass>),
    Rejected(String),
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        !matches!(self, Admissibility::Rejected(_))
    }
}

/// Decide whether `gamma` can be grafted along in `structure`.
pub fn is_admissible(model: &SurfaceModel, gamma: &Curve, structure: &Structure) -> Admissibility {
    if gamma.multiplicity != 1 {
        return Admissibility::Rejected("grafting curve must be a single curve".into());
    }
    if let Some(chart) = gamma.charts.keys().find(|c| !model.has_chart(c)) {
        return Admissibility::Rejected(format!("unknown chart {chart}"));
    }
    let lambda = &structure.real_curves;
    let why = match disjoint_from(model, gamma, lambda) {
        Ok(()) => return Admissibility::Disjoint,
        Err(why) => why,
    };
    if lambda.labels().any(|l| model.crosses_exterior(&gamma.label, l)) {
        return Admissibility::Rejected(why);
    }
    // the strand in each chart that misses λ, oriented like γ
    let mut base = Curve::new(gamma.label.clone());
    for (chart, &g) in &gamma.charts {
        let lc = lambda.chart(chart);
        let b = if lc.is_empty() {
            g
        } else if lc.p == 2 && lc.q % 2 == 0 && g.p.abs() == 1 {
            TorusClass::new(g.p, g.p * (lc.q / 2))
        } else {
            return Admissibility::Rejected(format!(
                "{why}; chart {chart} does not carry a spiraling strand ({g} against {lc})"
            ));
        };
        base = base.in_chart(chart.clone(), b);
    }
    let check = check_spiraling_hypotheses(model, gamma, &base, lambda);
    if check.is_spiraling() {
        Admissibility::Spiraling(check.directions)
    } else {
        Admissibility::Rejected(format!("{why}; {}", check.diagnostic))
    }
}

/// Graft along a curve disjoint from the real curves: `λ ↦ λ ∪ 2γ`.
pub fn graft_disjoint(model: &SurfaceModel, structure: &Structure, gamma: &Curve) -> Result<Structure, SurfaceError> {
    match is_admissible(model, gamma, structure) {
        Admissibility::Disjoint => {}
        Admissibility::Spiraling(_) => {
            return Err(SurfaceError::NotAdmissible(format!("{gamma} meets the real curves")))
        }
        Admissibility::Rejected(why) => return Err(SurfaceError::NotAdmissible(why)),
    }
    let doubled = gamma.clone().times(2).to_block()?;
    Ok(structure.with_real_curves(structure.real_curves.with_block(doubled)?))
}

fn graft_disjoint_block(model: &SurfaceModel, structure: &Structure, block: &Block) -> Result<Structure, SurfaceError> {
    let lambda = &structure.real_curves;
    for (chart, class) in &block.charts {
        model.require_chart(chart)?;
        if torus::geometric_intersection(*class, lambda.chart(chart)) != 0 {
            return Err(SurfaceError::NotAdmissible(format!(
                "block meets the real curves in {chart}"
            )));
        }
    }
    for label in block.labels.keys() {
        if let Some(l) = lambda.labels().find(|l| model.crosses_exterior(label, l)) {
            return Err(SurfaceError::NotAdmissible(format!("{label} crosses {l}")));
        }
    }
    let mut doubled = block.clone();
    doubled.labels.values_mut().for_each(|n| *n *= 2);
    for c in doubled.charts.values_mut() {
        *c = c.checked_scale(2)?;
    }
    Ok(structure.with_real_curves(lambda.with_block(doubled)?))
}

/// Graft along a spiraling curve: in every chart it crosses, the real curves
/// become `[λ, 2γ]` resolved flat (right-spiraling) or sharp
/// (left-spiraling); outside the charts they become `λ ∪ 2γ`.
pub fn graft_spiraling(model: &SurfaceModel, structure: &Structure, gamma: &Curve) -> Result<Structure, SurfaceError> {
    let directions = match is_admissible(model, gamma, structure) {
        Admissibility::Spiraling(d) => d,
        Admissibility::Disjoint => return Err(SurfaceError::NonSpiralingCurve(gamma.to_string())),
        Admissibility::Rejected(why) => return Err(SurfaceError::NotAdmissible(why)),
    };
    let lambda = &structure.real_curves;
    let (touched, mut kept): (Vec<Block>, Vec<Block>) = lambda
        .blocks()
        .iter()
        .cloned()
        .partition(|b| b.charts.keys().any(|c| gamma.charts.contains_key(c)));

    let mut fused = Block {
        labels: BTreeMap::from([(gamma.label.clone(), 2)]),
        charts: BTreeMap::new(),
    };
    for b in &touched {
        for (l, n) in &b.labels {
            *fused.labels.entry(l.clone()).or_insert(0) += n;
        }
        for (c, class) in &b.charts {
            if !gamma.charts.contains_key(c) {
                fused.charts.insert(c.clone(), *class);
            }
        }
    }
    for (chart, g) in &gamma.charts {
        let lc = lambda.chart(chart);
        let g = g.sign_normalized();
        let resolved = match directions.get(chart).and_then(|d| d.graft_mode()) {
            Some(mode) => torus::resolve(lc, g.checked_scale(2)?, mode)?,
            // no crossings in this chart: the union
            None => torus::resolve(lc, g.checked_scale(2)?, Mode::Sharp)?,
        };
        fused.charts.insert(chart.clone(), resolved);
    }
    kept.push(fused);
    Ok(structure.with_real_curves(CanonicalMulticurve::from_blocks(kept)?))
}

/// Graft along `gamma`, choosing the disjoint or spiraling rule.
pub fn graft_along(model: &SurfaceModel, structure: &Structure, gamma: &Curve) -> Result<Structure, SurfaceError> {
    match is_admissible(model, gamma, structure) {
        Admissibility::Disjoint => graft_disjoint(model, structure, gamma),
        Admissibility::Spiraling(_) => graft_spiraling(model, structure, gamma),
        Admissibility::Rejected(why) => Err(SurfaceError::NotAdmissible(why)),
    }
}

/// Graft successively along every block of `sigma`, all disjoint from the
/// current real curves.
pub fn graft_multicurve(
    model: &SurfaceModel,
    structure: &Structure,
    sigma: impl IntoIterator<Item = Block>,
) -> Result<Structure, SurfaceError> {
    sigma
        .into_iter()
        .try_fold(structure.clone(), |s, b| graft_disjoint_block(model, &s, &b))
}

/// Halve every multiplicity of `lambda`; grafting the standard structure
/// along the result reproduces `lambda`.
pub fn goldman_decompose(lambda: &CanonicalMulticurve) -> Result<CanonicalMulticurve, SurfaceError> {
    let mut out = Vec::with_capacity(lambda.blocks().len());
    for b in lambda.blocks() {
        if let Some((label, _)) = b.labels.iter().find(|(_, n)| *n % 2 == 1) {
            return Err(SurfaceError::OddMultiplicity(label.clone()));
        }
        let mut half = b.clone();
        half.labels.values_mut().for_each(|n| *n /= 2);
        for (chart, c) in half.charts.iter_mut() {
            if c.p % 2 != 0 || c.q % 2 != 0 {
                let label = b.labels.keys().next().cloned().unwrap_or_else(|| chart.clone());
                return Err(SurfaceError::OddMultiplicity(label));
            }
            *c = TorusClass::new(c.p / 2, c.q / 2);
        }
        out.push(half);
    }
    CanonicalMulticurve::from_blocks(out)
}

/// Dehn twist about the meridian of a chart.
pub trait MeridianTwist: Sized {
    fn twist_about_meridian(&self, model: &SurfaceModel, chart: &str, n: i64) -> Result<Self, SurfaceError>;
}

impl MeridianTwist for Curve {
    fn twist_about_meridian(&self, model: &SurfaceModel, chart: &str, n: i64) -> Result<Self, SurfaceError> {
        model.require_chart(chart)?;
        let mut out = self.clone();
        if let Some(c) = out.charts.get_mut(chart) {
            *c = torus::dehn_twist(*c, TorusClass::MERIDIAN, n)?;
        }
        Ok(out)
    }
}

impl MeridianTwist for CanonicalMulticurve {
    fn twist_about_meridian(&self, model: &SurfaceModel, chart: &str, n: i64) -> Result<Self, SurfaceError> {
        model.require_chart(chart)?;
        let mut blocks = self.blocks.clone();
        for b in &mut blocks {
            if let Some(c) = b.charts.get_mut(chart) {
                *c = torus::dehn_twist(*c, TorusClass::MERIDIAN, n)?;
            }
        }
        CanonicalMulticurve::from_blocks(blocks)
    }
}

impl MeridianTwist for Structure {
    fn twist_about_meridian(&self, model: &SurfaceModel, chart: &str, n: i64) -> Result<Self, SurfaceError> {
        Ok(self.with_real_curves(self.real_curves.twist_about_meridian(model, chart, n)?))
    }
}

/// Twist the real curves about a meridian that meets them exactly twice.
pub fn elementary_move(
    model: &SurfaceModel,
    structure: &Structure,
    chart: &str,
    k: i64,
) -> Result<Structure, SurfaceError> {
    model.require_chart(chart)?;
    let found = torus::geometric_intersection(TorusClass::MERIDIAN, structure.real_curves.chart(chart));
    if found != 2 {
        return Err(SurfaceError::NotElementary {
            chart: chart.to_string(),
            found,
        });
    }
    structure.twist_about_meridian(model, chart, k)
}

/// `k`-fold Dehn twist of a multicurve about a curve `gamma`, computed in
/// the charts: each block crossing `gamma` gains `k·î(block, γ)` copies of
/// `γ`'s chart classes and `|k|·i(block, γ)` copies of its exterior label.
pub fn twist_about_curve(
    lambda: &CanonicalMulticurve,
    gamma: &Curve,
    k: i64,
) -> Result<CanonicalMulticurve, SurfaceError> {
    let mut blocks = Vec::with_capacity(lambda.blocks().len());
    for b in lambda.blocks() {
        let mut alg: i128 = 0;
        let mut geo: u128 = 0;
        for (chart, g) in &gamma.charts {
            alg += torus::algebraic_intersection(b.chart(chart), *g);
            geo += torus::geometric_intersection(b.chart(chart), *g);
        }
        if geo == 0 {
            blocks.push(b.clone());
            continue;
        }
        if alg.unsigned_abs() != geo {
            return Err(SurfaceError::InvalidCurve(format!(
                "{gamma} crosses the real curves with mixed signs"
            )));
        }
        let coeff = i64::try_from(alg)
            .ok()
            .and_then(|a| a.checked_mul(k))
            .ok_or(TorusError::Overflow("twist"))?;
        let mut twisted = b.clone();
        for (chart, g) in &gamma.charts {
            let moved = b.chart(chart).checked_add(g.checked_scale(coeff)?)?;
            twisted.charts.insert(chart.clone(), moved);
        }
        let extra = (k.unsigned_abs() as u128 * geo) as u64;
        *twisted.labels.entry(gamma.label.clone()).or_insert(0) += extra;
        blocks.push(twisted);
    }
    CanonicalMulticurve::from_blocks(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn standard() -> CheckedConfiguration {
        validate_configuration(&Configuration::standard(&["beta"])).unwrap()
    }

    fn gamma(q: i64) -> Curve {
        Curve::new("gamma").in_chart("beta", (1, q))
    }

    fn with_lambda(chart_class: (i64, i64)) -> Structure {
        let lambda = Multicurve::new(vec![Curve::new("lambda").in_chart("beta", chart_class)]);
        Structure::new(HolonomyTag::new("schottky"), lambda.canonical().unwrap())
    }

    #[test]
    fn model_rejects_low_genus_and_duplicates() {
        assert_eq!(
            SurfaceModel::new(1, HolonomyTag::new("r"), ["b"]),
            Err(SurfaceError::InvalidGenus(1))
        );
        assert_eq!(
            SurfaceModel::new(2, HolonomyTag::new("r"), ["b", "b"]),
            Err(SurfaceError::DuplicateChart("b".into()))
        );
    }

    #[test]
    fn validate_standard_basis() {
        let cfg = standard();
        assert_eq!(cfg.lambda().chart("beta"), TorusClass::new(2, 0));
        assert_eq!(cfg.base_curve("beta").unwrap().label, "gamma");
    }

    #[test]
    fn validate_rejects_crossing_gamma() {
        let mut cfg = Configuration::standard(&["beta"]);
        cfg.graft_curves = vec![gamma(1)];
        let err = validate_configuration(&cfg).unwrap_err();
        assert!(matches!(
            err,
            SurfaceError::BadIntersectionPattern { found: 2, ref constraint, .. } if constraint.contains("lambda ∩ gamma")
        ));
    }

    #[test]
    fn validate_rejects_three_strands() {
        let mut cfg = Configuration::standard(&["beta"]);
        cfg.real_curves = Multicurve::new(vec![Curve::new("lambda").in_chart("beta", (3, 0))]);
        let err = validate_configuration(&cfg).unwrap_err();
        assert!(matches!(err, SurfaceError::BadIntersectionPattern { found: 3, .. }));
    }

    #[test]
    fn validate_rejects_unknown_chart() {
        let mut cfg = Configuration::standard(&["beta"]);
        cfg.graft_curves.push(Curve::new("delta").in_chart("nope", (1, 0)));
        assert_eq!(
            validate_configuration(&cfg).unwrap_err(),
            SurfaceError::UnknownChart("nope".into())
        );
    }

    #[test]
    fn admissibility_examples() {
        let cfg = standard();
        let m = cfg.model();
        // crosses (0,2) twice and has no spiraling strand there
        assert!(matches!(
            is_admissible(m, &gamma(0), &with_lambda((0, 2))),
            Admissibility::Rejected(_)
        ));
        assert_eq!(is_admissible(m, &gamma(0), &cfg.seed()), Admissibility::Disjoint);
        assert_eq!(
            is_admissible(m, &gamma(2), &cfg.seed()),
            Admissibility::Spiraling(BTreeMap::from([("beta".into(), SpiralClass::Left(2))]))
        );
    }

    #[test]
    fn exterior_crossings_block_disjoint_route() {
        let model = standard().model().clone().with_exterior_crossing("lambda", "delta");
        let delta = Curve::new("delta");
        let seed = standard().seed();
        assert!(matches!(
            is_admissible(&model, &delta, &seed),
            Admissibility::Rejected(_)
        ));
        assert_eq!(
            is_admissible(standard().model(), &delta, &seed),
            Admissibility::Disjoint
        );
    }

    #[test]
    fn spiral_class_examples() {
        assert_eq!(spiraling_class(TorusClass::new(1, 2)), SpiralClass::Left(2));
        assert_eq!(spiraling_class(TorusClass::new(1, -3)), SpiralClass::Right(3));
        assert_eq!(spiraling_class(TorusClass::new(1, 0)), SpiralClass::NonSpiraling);
        assert_eq!(spiraling_class(TorusClass::new(2, 1)), SpiralClass::NonSpiraling);
        assert_eq!(spiraling_class(TorusClass::new(-1, -4)), SpiralClass::Left(4));
    }

    #[test]
    fn spiraling_hypotheses_examples() {
        let cfg = standard();
        let m = cfg.model();
        let lambda = cfg.lambda();
        let check = check_spiraling_hypotheses(m, &gamma(3), &gamma(0), lambda);
        assert!(check.holds && check.is_spiraling(), "{}", check.diagnostic);
        assert_eq!(check.directions["beta"], SpiralClass::Left(3));

        let same = check_spiraling_hypotheses(m, &gamma(0), &gamma(0), lambda);
        assert!(same.holds);
        assert!(!same.is_spiraling());
        assert_eq!(same.directions["beta"], SpiralClass::NonSpiraling);

        let doubled = Curve::new("gamma").in_chart("beta", (2, 1));
        assert!(!check_spiraling_hypotheses(m, &doubled, &gamma(0), lambda).holds);
    }

    #[test]
    fn meridian_twist_examples() {
        let cfg = standard();
        let m = cfg.model();
        assert_eq!(gamma(0).twist_about_meridian(m, "beta", 2).unwrap(), gamma(2));
        let twisted = cfg.seed().twist_about_meridian(m, "beta", 1).unwrap();
        assert_eq!(twisted.real_curves.chart("beta"), TorusClass::new(2, 2));
        assert_eq!(cfg.seed().twist_about_meridian(m, "beta", 0).unwrap(), cfg.seed());
        assert_eq!(
            gamma(0).twist_about_meridian(m, "other", 1),
            Err(SurfaceError::UnknownChart("other".into()))
        );
    }

    #[test]
    fn disjoint_graft_examples() {
        let model = SurfaceModel::new(2, HolonomyTag::new("fuchsian"), Vec::<String>::new()).unwrap();
        let alpha = Curve::new("alpha");
        let delta = Curve::new("delta");
        let base = Structure::new(
            HolonomyTag::new("fuchsian"),
            Multicurve::new(vec![alpha.clone().times(2)]).canonical().unwrap(),
        );
        let g = graft_disjoint(&model, &base, &delta).unwrap();
        assert_eq!(g.key(), "2*(alpha) + 2*(delta)");

        let empty = Structure::standard(HolonomyTag::new("fuchsian"));
        assert_eq!(graft_disjoint(&model, &empty, &delta).unwrap().key(), "2*(delta)");

        let ab = graft_disjoint(&model, &graft_disjoint(&model, &empty, &alpha).unwrap(), &delta).unwrap();
        let ba = graft_disjoint(&model, &graft_disjoint(&model, &empty, &delta).unwrap(), &alpha).unwrap();
        assert_eq!(ab.key(), ba.key());
    }

    #[test]
    fn disjoint_graft_through_chart_fuses_with_lambda() {
        let cfg = standard();
        let g = graft_disjoint(cfg.model(), &cfg.seed(), &gamma(0)).unwrap();
        assert_eq!(g.key(), "1*(gamma^2,lambda)[beta:4,0]");
    }

    #[test]
    fn spiral_resolve_in_hopf_frame() {
        let lam = TorusClass::new(0, 2);
        let g = TorusClass::new(1, -1);
        assert_eq!(
            spiral_resolve(lam, g, spiraling_class(g)).unwrap(),
            TorusClass::new(2, 0)
        );
        let g = TorusClass::new(1, -2);
        assert_eq!(
            spiral_resolve(lam, g, spiraling_class(g)).unwrap(),
            TorusClass::new(2, -2)
        );
        assert!(spiral_resolve(lam, TorusClass::new(1, 0), SpiralClass::NonSpiraling).is_err());
    }

    #[test]
    fn spiral_graft_matches_twist_about_gamma() {
        let cfg = standard();
        let m = cfg.model();
        let seed = cfg.seed();
        let left = gamma(1);
        let grafted = graft_spiraling(m, &seed, &left).unwrap();
        let twisted = twist_about_curve(&seed.real_curves, &left, 1).unwrap();
        assert_eq!(grafted.real_curves, twisted);
        assert_eq!(grafted.real_curves.chart("beta"), TorusClass::new(4, 2));
    }

    #[test]
    fn graft_along_dispatch() {
        let cfg = standard();
        let m = cfg.model();
        let seed = cfg.seed();
        assert_eq!(
            graft_along(m, &seed, &gamma(0)).unwrap(),
            graft_disjoint(m, &seed, &gamma(0)).unwrap()
        );
        assert_eq!(
            graft_along(m, &seed, &gamma(-2)).unwrap(),
            graft_spiraling(m, &seed, &gamma(-2)).unwrap()
        );
        let bad = Curve::new("gamma").in_chart("beta", (2, 1));
        assert!(matches!(
            graft_along(m, &seed, &bad),
            Err(SurfaceError::NotAdmissible(_))
        ));
        assert!(matches!(
            graft_spiraling(m, &seed, &gamma(0)),
            Err(SurfaceError::NonSpiralingCurve(_))
        ));
        assert!(matches!(
            graft_disjoint(m, &seed, &gamma(1)),
            Err(SurfaceError::NotAdmissible(_))
        ));
    }

    #[test]
    fn canonical_key_examples() {
        let a = Curve::new("alpha").times(2);
        let d = Curve::new("delta").times(2);
        assert_eq!(
            canonical_key(&Multicurve::new(vec![a.clone(), d.clone()])).unwrap(),
            canonical_key(&Multicurve::new(vec![d, a])).unwrap()
        );
        let pos = Multicurve::new(vec![Curve::new("x").in_chart("beta", (2, 0))]);
        let neg = Multicurve::new(vec![Curve::new("x").in_chart("beta", (-2, 0))]);
        assert_eq!(canonical_key(&pos).unwrap(), canonical_key(&neg).unwrap());
        let split = Multicurve::new(vec![Curve::new("alpha"), Curve::new("alpha")]);
        assert_eq!(canonical_key(&split).unwrap(), "2*(alpha)");
    }

    #[test]
    fn intersecting_components_are_rejected() {
        let bad = Multicurve::new(vec![
            Curve::new("a").in_chart("beta", (1, 0)),
            Curve::new("b").in_chart("beta", (0, 1)),
        ]);
        assert_eq!(
            bad.canonical().unwrap_err(),
            SurfaceError::IntersectingComponents("beta".into())
        );
    }

    #[test]
    fn goldman_examples() {
        let lam = Multicurve::new(vec![Curve::new("alpha").times(2), Curve::new("delta").times(4)])
            .canonical()
            .unwrap();
        let sigma = goldman_decompose(&lam).unwrap();
        assert_eq!(sigma.key(), "1*(alpha) + 2*(delta)");
        assert!(goldman_decompose(&CanonicalMulticurve::empty()).unwrap().is_empty());
        let odd = Multicurve::new(vec![Curve::new("alpha").times(3)]).canonical().unwrap();
        assert_eq!(
            goldman_decompose(&odd),
            Err(SurfaceError::OddMultiplicity("alpha".into()))
        );
    }

    #[test]
    fn elementary_move_needs_two_crossings() {
        let cfg = standard();
        let m = cfg.model();
        let grafted = graft_disjoint(m, &cfg.seed(), &gamma(0)).unwrap();
        assert!(matches!(
            elementary_move(m, &grafted, "beta", 1),
            Err(SurfaceError::NotElementary { found: 4, .. })
        ));
        assert!(elementary_move(m, &cfg.seed(), "beta", -1).is_ok());
    }
}
