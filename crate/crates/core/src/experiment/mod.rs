//! Virtual versions of the laboratory measurements: state sizes through the
//! gate, gain sweeps, heralding-efficiency saturation, fringe visibility and
//! Poisson counting.

mod counting;
mod fit;
mod measure;
mod sweep;
mod visibility;

pub use counting::{
    count_ratio, gain_from_counts, sample_count, simulate_counts, Count, CountingModel,
    MAX_EXPECTED_COUNT,
};
pub use fit::{fit_fringe, linear_fit, FringeFit, LinearFit};
pub use measure::{apply_herald_model, measure_input_size, HeraldingModel, MeasurementConvention};
pub use sweep::{
    gain_sweep, gain_vs_phi, GainSweep, GainSweepRow, GainVsPhi, GainVsPhiRow, SampledPoint,
    SweepOptions,
};
pub use visibility::{
    bias_hwp_angle, classical_visibility_bound, phase_grid, visibility_experiment,
    visibility_sweep, BiasCalibration, FringeScan, VisibilityOptions,
};
