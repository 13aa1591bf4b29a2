//! Nested-array beam pattern: direct and decomposed evaluation plus the
//! main-lobe width, peak-to-local-minimum ratio and side-lobe height metrics.

pub mod metrics;
pub mod pattern;
pub mod thresholds;

pub use metrics::{
    flmp_bounds, flmp_numeric, grating_lobes, metrics, p_terms, plmr, BeamPatternMetrics,
    GratingLobe, PTerms, Plmr, Regime,
};
pub use pattern::{gain_decomposed, gain_direct, PatternDecomposition};
pub use thresholds::{delta_int, delta_int_root, n_ap, n_th, null_points, NullPoints};
