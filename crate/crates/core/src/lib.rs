//! Exact computations for grafting real Schottky projective structures:
//! torus homology arithmetic, a brute-force grid oracle, surface models with
//! meridian charts, and bounded enumeration of the grafting complex.

pub mod complex;
pub mod oracle;
pub mod schema;
pub mod surface;
pub mod torus;
pub mod verify;

pub use complex::{
    build_complex, common_grafts, cycle_rank, standard_fan, BuildParams, ComplexError, ComplexGraph, Edge, EdgeKind,
    FanReport, RankReport, Vertex, Witness,
};
pub use schema::{parse_curve_spec, ConfigFile, SchemaError, StructureRecord};
pub use surface::{
    canonical_key, check_spiraling_hypotheses, goldman_decompose, graft_along, graft_disjoint, graft_spiraling,
    is_admissible, spiraling_class, twist_about_curve, validate_configuration, Admissibility, CanonicalMulticurve,
    CheckedConfiguration, Configuration, Curve, HolonomyTag, MeridianTwist, Multicurve, SpiralClass, Structure,
    SurfaceError, SurfaceModel,
};
pub use torus::{algebraic_intersection, dehn_twist, geometric_intersection, resolve, Mode, TorusClass, TorusError};
pub use verify::{run_suite, Report, Suite, SuiteParams, VerifyError};
