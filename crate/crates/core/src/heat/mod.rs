//! Heat trace and heat content from spectral data, a time-stepping oracle for the
//! content, kernel values, and the trace/content inequalities.

mod checks;
mod series;
mod spectral;
mod timestep;

pub use checks::{check_e510_ratio, check_e59, check_lemma52, e510_factor};
pub use series::{check_time_grid, heat_series, HeatSeries};
pub use spectral::{
    heat_content_spectral, heat_kernel_value, heat_kernel_value_1d, heat_trace, polynomial_exponential_bound,
    trace_tail, Truncated, TRUNCATION_WARNING,
};
pub use timestep::{default_steps, heat_content_timestep, MAX_DT};
