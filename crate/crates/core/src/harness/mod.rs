//! Sweeps, decay fits, plots and the verification suites.

mod checks;
mod fit;
mod plot;
mod stats;
mod sweep;

pub use checks::{
    equivalence_instance, fact_instance, run_check, CaseResult, FactFamily, Suite, SuiteReport, ADJOINT_TOL,
    IDLE_EQUALITY_TOL, MIXTURE_TOL,
};
pub use fit::{estimate_dstar_scaling, fit_decay, DecayFit, FitOptions, RatioCheck, ScalingReport, Verdict};
pub use plot::{emit_plot, render_plot, PlotKind};
pub use stats::{normal_quantile, wilson_interval, wilson_upper};
pub use sweep::{
    read_csv, run_sweep, series, sort_rows, write_csv, Family, ResetState, SweepConfig, SweepRow, CSV_HEADER,
};
