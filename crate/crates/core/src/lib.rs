//! Minimal graphs over the unit disk built from Enneper-Weierstrass data,
//! with curvature analysis at zero-curvature centres.

pub mod analytic;
pub mod bounds;
pub mod error;
pub mod extrapolate;
pub mod hexagon;
pub mod jets;
pub mod rkc;
pub mod special;
pub mod taylor;
pub mod verify;
pub mod weierstrass;

pub use analytic::{integrate_radial, sqrt_branch, AnalyticFunction, RadialPath};
pub use bounds::{
    bound_margins, hall_bound_check, intermediate_bound, kpp_closed_form, kpp_numeric,
    schwarz_bound_check, BoundCheck, CurvatureReport, ReportOptions, FLAT_BOUND, GENERAL_BOUND,
    HALL_CONSTANT,
};
pub use error::{Error, ErrorKind, Result};
pub use hexagon::{build_hexagon, BoundaryGeometry, HexagonModel, MeshArtifact, MeshFormat};
pub use jets::{
    close_third_jet, direction_profile, flat_point_jet, hessian_of_k, kpp_general, numeric_jet,
    DirectionProfile, HessianK, NumericJet, SurfaceJet,
};
pub use rkc::{
    analytic_parts, family_report, seeded_batch, validate_diffeo, weierstrass_from_parts,
    BoundaryCorrespondence, CorrespondenceSpec, Target,
};
pub use special::{hyp2f1, PowerSeries};
pub use verify::{run_verify, Check, VerifyConfig, VerifySummary};
pub use weierstrass::{SurfacePoint, WeierstrassData};
