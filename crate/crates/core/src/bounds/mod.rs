//! Evaluators for the eigenfunction inequalities, with explicit verdicts or ratio profiles.

mod checks;
mod report;

pub use checks::{
    check_e4, check_e4_count, check_remark213, check_thm212, cor26_rhs, discretization_slack, prop22_floor,
    prop22_n_choices, prop22_rhs, ratio_cor26, ratio_prop22, ratio_thm01, thm01_rhs, REMARK213_SAMPLES,
    REMARK213_SEED,
};
pub use report::{BoundReport, ConstantMode, Verdict};
