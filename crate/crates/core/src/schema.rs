//! Versioned JSON format for configurations and structures, and the
//! command-line curve syntax `label@chart=p,q[@chart=p,q][:mult]`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::surface::{Configuration, Curve, HolonomyTag, Multicurve, Structure, SurfaceError, SurfaceModel};
use crate::torus::TorusClass;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema version {0}, expected {SCHEMA_VERSION}")]
    Version(u32),
    #[error("bad curve spec {spec:?}: {reason}")]
    CurveSpec { spec: String, reason: String },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Real,
    Graft,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveRecord {
    pub label: String,
    pub role: Role,
    #[serde(default)]
    pub charts: BTreeMap<String, TorusClass>,
    #[serde(default = "one")]
    pub multiplicity: u64,
}

fn one() -> u64 {
    1
}

fn default_holonomy() -> HolonomyTag {
    HolonomyTag::new("rho")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema: u32,
    pub genus: u32,
    #[serde(default = "default_holonomy")]
    pub holonomy: HolonomyTag,
    pub charts: Vec<String>,
    pub curves: Vec<CurveRecord>,
    #[serde(default)]
    pub exterior_crossings: Vec<(String, String)>,
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self, SchemaError> {
        let file: ConfigFile = serde_json::from_str(text)?;
        if file.schema != SCHEMA_VERSION {
            return Err(SchemaError::Version(file.schema));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn into_configuration(self) -> Result<Configuration, SchemaError> {
        let mut model = SurfaceModel::new(self.genus, self.holonomy, self.charts)?;
        for (a, b) in &self.exterior_crossings {
            model = model.with_exterior_crossing(a, b);
        }
        let mut real = Vec::new();
        let mut graft = Vec::new();
        for rec in self.curves {
            let curve = rec
                .charts
                .into_iter()
                .fold(Curve::new(rec.label), |c, (name, class)| c.in_chart(name, class))
                .times(rec.multiplicity);
            match rec.role {
                Role::Real => real.push(curve),
                Role::Graft => graft.push(curve),
            }
        }
        Ok(Configuration {
            model,
            real_curves: Multicurve::new(real),
            graft_curves: graft,
        })
    }

    pub fn from_configuration(config: &Configuration) -> Self {
        let record = |c: &Curve, role| CurveRecord {
            label: c.label.clone(),
            role,
            charts: c.charts.clone(),
            multiplicity: c.multiplicity,
        };
        ConfigFile {
            schema: SCHEMA_VERSION,
            genus: config.model.genus(),
            holonomy: config.model.holonomy().clone(),
            charts: config.model.chart_names().map(str::to_string).collect(),
            curves: config
                .real_curves
                .components
                .iter()
                .map(|c| record(c, Role::Real))
                .chain(config.graft_curves.iter().map(|c| record(c, Role::Graft)))
                .collect(),
            exterior_crossings: config.model.exterior_crossings().iter().cloned().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockRecord {
    pub multiplicity: u64,
    pub labels: BTreeMap<String, u64>,
    pub charts: BTreeMap<String, TorusClass>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureRecord {
    pub schema: u32,
    pub holonomy: HolonomyTag,
    pub key: String,
    pub real_curves: Vec<BlockRecord>,
}

impl StructureRecord {
    pub fn new(structure: &Structure) -> Self {
        StructureRecord {
            schema: SCHEMA_VERSION,
            holonomy: structure.holonomy.clone(),
            key: structure.key(),
            real_curves: structure
                .real_curves
                .blocks()
                .iter()
                .map(|b| BlockRecord {
                    multiplicity: b.multiplicity(),
                    labels: b.labels.clone(),
                    charts: b.charts.clone(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("structure serializes")
    }
}

/// Parse `label@chart=p,q[@chart=p,q][:mult]`.
pub fn parse_curve_spec(spec: &str) -> Result<Curve, SchemaError> {
    let bad = |reason: &str| SchemaError::CurveSpec {
        spec: spec.to_string(),
        reason: reason.to_string(),
    };
    let (body, mult) = match spec.rsplit_once(':') {
        Some((body, m)) => (body, m.parse::<u64>().map_err(|_| bad("multiplicity is not a number"))?),
        None => (spec, 1),
    };
    let mut parts = body.split('@');
    let label = parts
        .next()
        .filter(|l| !l.is_empty())
        .ok_or_else(|| bad("missing label"))?;
    let mut curve = Curve::new(label);
    for part in parts {
        let (chart, class) = part.split_once('=').ok_or_else(|| bad("expected chart=p,q"))?;
        if chart.is_empty() {
            return Err(bad("empty chart name"));
        }
        if curve.charts.contains_key(chart) {
            return Err(bad("chart given twice"));
        }
        let class: TorusClass = class.parse().map_err(|_| bad("chart class must be p,q"))?;
        curve = curve.in_chart(chart, class);
    }
    Ok(curve.times(mult))
}
