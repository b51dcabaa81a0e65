//! Numerical checks of the dispersive, Strichartz, heat-kernel and functional inequalities.

mod admissible;
mod besov;
mod decay;
mod functional;
mod heat;
mod norms;
mod report;
mod spacetime;
mod strichartz;

pub use admissible::{admissible, AdmissiblePair};
pub use besov::{besov_norm, besov_pieces, BesovPiece};
pub use decay::{
    decay_sweep, localized_decay_sweep, localized_maxima, localized_times, low_decay_sweep, BASE_PAIRS, DRIFT_LIMIT,
    UNIFORMITY_LIMIT,
};
pub use heat::{
    check_heat_hypothesis, heat_bound_fit, is_symmetric_potential, GAUSSIAN_EXPONENTS, HEAT_VARIATION_LIMIT,
};
pub use norms::{lp_norms, sup_norm, SupValue};
pub use report::{decade_drift, Criterion, EstimateReport};
pub use spacetime::SpaceTimeWindow;
pub use strichartz::{check_strichartz_range, spacetime_norms, strichartz_sweep, DataFamily, FAMILY_SPREAD_LIMIT};
pub use functional::{
    hardy_check, hardy_terms, local_smoothing_check, local_smoothing_norms, lowest_angular_frequency, sobolev_ratio,
    sobolev_ratio_check, SmoothingBranch,
};
