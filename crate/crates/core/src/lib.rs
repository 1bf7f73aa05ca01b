//! Optimal transport with distance cost on discrete measures, transport-ray
//! decomposition, monotone gluing into a transport map, and Gaussian
//! displacement-interpolation mass estimates, instantiated on classical
//! Wiener space through Karhunen–Loève coefficients.

pub mod evolution;
pub mod glue;
pub mod measures;
pub mod num;
pub mod ot;
pub mod rays;
pub mod wiener;

pub use evolution::{
    evolution_mass_1d, evolution_mass_mc, gaussian_pushforward_density, interpolate,
    jacobian_interp_bound, random_intervals, reverse_evolution_mass_1d, step3_chain, Density1d,
    DensityPair, EvolutionError, EvolutionReport, McEvolutionReport, MonotoneMap1d,
};
pub use glue::{
    build_monge_map, glue, monotone_coupling_1d, verify_map, Coupling1d, GlueError, GluedMap,
    MongeResult, VerifyReport,
};
pub use measures::{
    cm_distance, common_mass_split, quantile_function, DiscreteMeasure, MeasureError,
    OneDimMeasure,
};
pub use num::Real;
pub use ot::{
    check_cyclical_monotonicity, check_cyclical_monotonicity_exhaustive, duality_gap,
    solve_kantorovich, CostKind, DualPotentials, GapReport, MonotonicityReport, OtError,
    TransportPlan,
};
pub use wiener::{
    dimension_ladder, load_ensemble, project_measure, reweight, sample_paths, save_ensemble,
    systematic_resample, CameronMartinBasis, DensitySpec, LadderReport, PathEnsemble, WienerError,
};
