//! Exhaustive identity sweeps with line-oriented and JSON reports.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::complex::{common_grafts, iterated_sides, ComplexError};
use crate::oracle::{draw_pair, oracle_intersection, oracle_resolve, primitive_classes, total_class};
use crate::surface::{
    goldman_decompose, graft_along, graft_multicurve, is_admissible, twist_about_curve, validate_configuration,
    Admissibility, CheckedConfiguration, Configuration, Curve, HolonomyTag, MeridianTwist, Multicurve, SpiralClass,
    Structure, SurfaceError, SurfaceModel,
};
use crate::torus::{self, Mode, TorusClass};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Flatsharp,
    SharpFlat,
    DehnTwist,
    Goldman,
    Iterated,
    TwoMeridian,
    Oracle,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Flatsharp,
        Suite::SharpFlat,
        Suite::DehnTwist,
        Suite::Goldman,
        Suite::Iterated,
        Suite::TwoMeridian,
        Suite::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Flatsharp => "flatsharp",
            Suite::SharpFlat => "sharp_flat",
            Suite::DehnTwist => "dehn_twist",
            Suite::Goldman => "goldman",
            Suite::Iterated => "iterated",
            Suite::TwoMeridian => "two_meridian",
            Suite::Oracle => "oracle",
        }
    }

    fn default_k_max(self) -> i64 {
        match self {
            Suite::Flatsharp => 10,
            Suite::SharpFlat | Suite::Iterated => 8,
            Suite::DehnTwist => 6,
            Suite::TwoMeridian | Suite::Oracle => 5,
            Suite::Goldman => 0,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| VerifyError::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteParams {
    /// Twist range; each suite has its own default.
    pub k_max: Option<i64>,
    /// Entry bound for the oracle sweep.
    pub range: i64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            k_max: None,
            range: 5,
            trials: 100,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Instance {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub instances: Vec<Instance>,
}

impl Report {
    fn new(suite: Suite) -> Self {
        Report {
            suite,
            instances: Vec::new(),
        }
    }

    fn check(&mut self, label: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.instances.push(Instance {
            label: label.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.instances.iter().all(|i| i.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Instance> {
        self.instances.iter().filter(|i| !i.passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in &self.instances {
            let status = if i.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status} {} {}: {}\n", self.suite, i.label, i.detail));
        }
        let ok = self.instances.iter().filter(|i| i.passed).count();
        out.push_str(&format!("{}: {ok}/{} passed\n", self.suite, self.instances.len()));
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Summary<'a> {
            suite: Suite,
            passed: bool,
            total: usize,
            failed: usize,
            instances: &'a [Instance],
        }
        serde_json::to_string_pretty(&Summary {
            suite: self.suite,
            passed: self.passed(),
            total: self.instances.len(),
            failed: self.failures().count(),
            instances: &self.instances,
        })
        .expect("report serializes")
    }
}

pub fn run_suite(suite: Suite, params: &SuiteParams) -> Result<Report, VerifyError> {
    let k_max = params.k_max.unwrap_or_else(|| suite.default_k_max());
    match suite {
        Suite::Flatsharp => Ok(flatsharp(k_max)),
        Suite::SharpFlat => Ok(sharp_flat(k_max)),
        Suite::DehnTwist => dehn_twist(k_max),
        Suite::Goldman => goldman(params.trials, params.seed),
        Suite::Iterated => iterated(k_max),
        Suite::TwoMeridian => two_meridian(k_max),
        Suite::Oracle => Ok(oracle(params.range, k_max)),
    }
}

fn c(p: i64, q: i64) -> TorusClass {
    TorusClass::new(p, q)
}

fn meridian_twist(class: TorusClass, k: i64) -> TorusClass {
    torus::dehn_twist(class, TorusClass::MERIDIAN, k).expect("small twist")
}

fn res(a: TorusClass, b: TorusClass, mode: Mode) -> TorusClass {
    torus::resolve(a, b, mode).expect("small resolve")
}

fn flatsharp(k_max: i64) -> Report {
    let mut r = Report::new(Suite::Flatsharp);
    for k in 1..=k_max {
        let got = res(c(0, 2 * k), c(2, -2 * k), Mode::Flat);
        r.check(
            format!("k={k}"),
            got == c(2, 0),
            format!("[(0,{}),(2,{})]_flat = {got}", 2 * k, -2 * k),
        );
    }
    r
}

/// The four expressions of the twist/resolve identity for `λ = (2,0)`,
/// `γ = (1,0)`. For negative `k` the resolution modes are mirrored.
pub fn four_way(k: i64) -> [TorusClass; 4] {
    let (sharp, flat) = if k >= 0 {
        (Mode::Sharp, Mode::Flat)
    } else {
        (Mode::Flat, Mode::Sharp)
    };
    let lambda = c(2, 0);
    let two_gamma = c(2, 0);
    [
        meridian_twist(res(lambda, two_gamma, sharp), k),
        res(lambda, meridian_twist(two_gamma, 2 * k), sharp),
        res(meridian_twist(lambda, 2 * k), two_gamma, flat),
        res(meridian_twist(lambda, k), meridian_twist(two_gamma, k), sharp),
    ]
}

fn sharp_flat(k_max: i64) -> Report {
    let mut r = Report::new(Suite::SharpFlat);
    let lambda = c(2, 0);
    let two_gamma = c(2, 0);
    for k in -k_max..=k_max {
        let values = four_way(k);
        let want = c(4, 4 * k);
        r.check(
            format!("k={k} four-way"),
            values.iter().all(|v| *v == want),
            format!("{} {} {} {} vs {want}", values[0], values[1], values[2], values[3]),
        );

        let left = res(lambda, meridian_twist(two_gamma, k), Mode::Sharp);
        let right = res(meridian_twist(lambda, k), two_gamma, Mode::Flat);
        r.check(
            format!("k={k} commutation"),
            torus::same_unoriented(left, right),
            format!("[λ,T^k(2γ)]_sharp = {left}, [T^k(λ),2γ]_flat = {right}"),
        );

        for (a, b) in [
            (lambda, meridian_twist(two_gamma, 2 * k)),
            (meridian_twist(lambda, 2 * k), two_gamma),
            (meridian_twist(lambda, k), meridian_twist(two_gamma, k)),
        ] {
            let s = res(a, b, Mode::Sharp);
            let f = res(b, a, Mode::Flat);
            r.check(
                format!("k={k} switch [{a}],[{b}]"),
                torus::same_unoriented(s, f),
                format!("sharp = {s}, swapped flat = {f}"),
            );
        }
    }
    r
}

fn standard_config(charts: &[&str]) -> CheckedConfiguration {
    validate_configuration(&Configuration::standard(charts)).expect("standard configuration is valid")
}

/// Right-spiraling grafts agree with the flat-handed twist about the curve
/// (chart formula `λ − î(λ,γ)·γ`), left-spiraling with the sharp-handed one.
fn dehn_twist(k_max: i64) -> Result<Report, VerifyError> {
    let mut r = Report::new(Suite::DehnTwist);
    let cfg = standard_config(&["beta"]);
    let model = cfg.model();
    let gamma = cfg.base_curve("beta").expect("standard gamma");
    for k in 1..=k_max {
        let seed = cfg.twisted_seed("beta", k)?;
        for (name, n, sign, want) in [
            ("right", k - 1, -1, SpiralClass::Right(1)),
            ("left", k + 1, 1, SpiralClass::Left(1)),
        ] {
            let g = gamma.twist_about_meridian(model, "beta", n)?;
            let label = format!("k={k} {name}");
            let crossings = torus::geometric_intersection(g.chart("beta"), seed.real_curves.chart("beta"));
            let dir = match is_admissible(model, &g, &seed) {
                Admissibility::Spiraling(d) => d.get("beta").copied(),
                _ => None,
            };
            if dir != Some(want) || crossings != 2 {
                r.check(label, false, format!("{g}: direction {dir:?}, {crossings} crossings"));
                continue;
            }
            let grafted = graft_along(model, &seed, &g)?;
            let twisted = twist_about_curve(&seed.real_curves, &g, sign)?;
            r.check(
                label,
                grafted.real_curves == twisted,
                format!("graft {} vs twist {}", grafted.key(), twisted.key()),
            );
        }
    }
    Ok(r)
}

const LABELS: [&str; 6] = ["alpha", "delta", "eta", "mu", "nu", "xi"];
const CHARTS: [&str; 3] = ["b1", "b2", "b3"];
const DIRECTIONS: [(i64, i64); 6] = [(1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 3)];

/// A random multicurve with every multiplicity in `{2,4,6,8}`; with `odd`,
/// the first component gets an odd multiplicity instead.
pub fn random_even_multicurve(rng: &mut impl Rng, odd: bool) -> Multicurve {
    let dirs: Vec<TorusClass> = CHARTS
        .iter()
        .map(|_| DIRECTIONS[rng.random_range(0..DIRECTIONS.len())].into())
        .collect();
    let n = rng.random_range(1..=6);
    (0..n)
        .map(|i| {
            let mut curve = Curve::new(LABELS[rng.random_range(0..LABELS.len())]);
            if rng.random_bool(0.6) {
                let ci = rng.random_range(0..CHARTS.len());
                let scale = rng.random_range(1..=2);
                curve = curve.in_chart(CHARTS[ci], dirs[ci].checked_scale(scale).expect("small"));
            }
            let m = if odd && i == 0 {
                2 * rng.random_range(0..4) + 1
            } else {
                2 * rng.random_range(1..=4)
            };
            curve.times(m)
        })
        .collect()
}

fn goldman(trials: usize, seed: u64) -> Result<Report, VerifyError> {
    let mut r = Report::new(Suite::Goldman);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = SurfaceModel::new(3, HolonomyTag::new("fuchsian"), CHARTS)?;
    let standard = Structure::standard(HolonomyTag::new("fuchsian"));
    for t in 0..trials {
        let lambda = random_even_multicurve(&mut rng, false).canonical()?;
        let sigma = goldman_decompose(&lambda)?;
        let mut blocks = sigma.blocks().to_vec();
        blocks.shuffle(&mut rng);
        let regrafted = graft_multicurve(&model, &standard, blocks)?;
        r.check(
            format!("trial={t} round-trip"),
            regrafted.real_curves.key() == lambda.key(),
            format!("{} -> {} -> {}", lambda.key(), sigma.key(), regrafted.key()),
        );

        let odd = random_even_multicurve(&mut rng, true);
        let odd_label = odd.components[0].label.clone();
        let outcome = goldman_decompose(&odd.canonical()?);
        r.check(
            format!("trial={t} odd"),
            outcome == Err(SurfaceError::OddMultiplicity(odd_label.clone())),
            format!("{odd_label}: {outcome:?}"),
        );
    }
    Ok(r)
}

fn iterated(k_max: i64) -> Result<Report, VerifyError> {
    let mut r = Report::new(Suite::Iterated);
    let cfg = standard_config(&["beta"]);
    for m in -k_max..=k_max {
        for l in -k_max..=k_max {
            let k = m - l;
            let (lhs, rhs) = iterated_sides(&cfg, "beta", k, l)?;
            r.check(
                format!("m={m} k={k} l={l}"),
                lhs.key() == rhs.key(),
                format!("{} vs {}", lhs.key(), rhs.key()),
            );
        }
    }
    let bound = k_max.unsigned_abs() as u32;
    for l0 in [0, 1] {
        let witnesses = common_grafts(&cfg, "beta", l0, bound)?;
        let want = 2 * bound as usize + 1;
        r.check(
            format!("witnesses l0={l0}"),
            witnesses.len() == want,
            format!("{} of {want}", witnesses.len()),
        );
    }
    Ok(r)
}

fn two_meridian(k_max: i64) -> Result<Report, VerifyError> {
    let mut r = Report::new(Suite::TwoMeridian);
    let cfg = standard_config(&["beta1", "beta2"]);
    let model = cfg.model();
    let gamma = cfg.graft_curves()[0].clone();
    for k in 0..=k_max {
        for l in 0..k {
            let label = format!("k={k} l={l}");
            let lhs_curve = gamma
                .twist_about_meridian(model, "beta2", l)?
                .twist_about_meridian(model, "beta1", k)?;
            let lhs = graft_along(model, &cfg.seed(), &lhs_curve);
            let rhs = graft_along(
                model,
                &cfg.twisted_seed("beta1", k)?,
                &gamma.twist_about_meridian(model, "beta2", l)?,
            );
            match (lhs, rhs) {
                (Ok(a), Ok(b)) => r.check(label, a.key() == b.key(), format!("{} vs {}", a.key(), b.key())),
                (a, b) => r.check(
                    label,
                    false,
                    format!("{:?} vs {:?}", a.map(|s| s.key()), b.map(|s| s.key())),
                ),
            }
        }
    }
    Ok(r)
}

/// Compare the closed formulas with the grid oracle over every primitive
/// pair with entries in `[-range, range]`, and the twist intersection
/// formula for `|k| ≤ k_max`.
fn oracle(range: i64, k_max: i64) -> Report {
    let mut r = Report::new(Suite::Oracle);
    let classes = primitive_classes(range);
    for &a in &classes {
        for &b in &classes {
            let label = format!("a={a} b={b}");
            let formula_geo = torus::geometric_intersection(a, b);
            let formula_alg = torus::algebraic_intersection(a, b);
            let (ga, gb) = match draw_pair(a, 1, b, 1) {
                Ok(pair) => pair,
                Err(e) => {
                    r.check(label, false, format!("oracle could not draw: {e}"));
                    continue;
                }
            };
            let count = match oracle_intersection(&ga, &gb) {
                Ok(count) => count,
                Err(e) => {
                    r.check(label, false, format!("oracle failed: {e}"));
                    continue;
                }
            };
            let mut ok = count.geometric as u128 == formula_geo && i128::from(count.algebraic) == formula_alg;
            let mut detail = format!(
                "i={}/{} î={}/{}",
                count.geometric, formula_geo, count.algebraic, formula_alg
            );
            for mode in [Mode::Sharp, Mode::Flat] {
                let want = res(a, b, mode);
                match oracle_resolve(&ga, &gb, mode) {
                    Ok(parts) => {
                        let got = total_class(&parts);
                        ok &= got == want;
                        detail.push_str(&format!(" {mode}={got}/{want}"));
                    }
                    Err(e) => {
                        ok = false;
                        detail.push_str(&format!(" {mode}: {e}"));
                    }
                }
            }
            for k in -k_max..=k_max {
                let twisted = torus::dehn_twist(b, a, k).expect("small twist");
                let got = torus::geometric_intersection(twisted, b);
                let want = k.unsigned_abs() as u128 * formula_geo * formula_geo;
                if got != want {
                    ok = false;
                    detail.push_str(&format!(" twist k={k}: {got} != {want}"));
                }
            }
            r.check(label, ok, detail);
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!(matches!("nope".parse::<Suite>(), Err(VerifyError::UnknownSuite(_))));
    }

    #[test]
    fn four_way_small() {
        assert_eq!(four_way(1), [c(4, 4); 4]);
        assert_eq!(four_way(-2), [c(4, -8); 4]);
    }

    #[test]
    fn flatsharp_report_text() {
        let r = run_suite(
            Suite::Flatsharp,
            &SuiteParams {
                k_max: Some(2),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(r.passed());
        assert!(r.to_text().starts_with("PASS flatsharp k=1"));
    }
}
