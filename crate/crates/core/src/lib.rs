//! Frequency-content parameters of strong ground-motion records.
//!
//! Nine period-type estimators and two bandwidth indices are computed per
//! record component:
//!
//! | name      | source                                              |
//! |-----------|-----------------------------------------------------|
//! | `t_ms`    | Fourier-amplitude-weighted mean period, 0.25–20 Hz |
//! | `t1_dsp`  | strongest peak of the smoothed PSD                  |
//! | `t_mean`  | `2π·λ0/λ1`                                          |
//! | `t_cen`   | `2π·sqrt(λ0/λ2)`                                    |
//! | `t_gsa`   | peak of the 5 % damped acceleration spectrum        |
//! | `t_gsv`   | peak of the relative velocity spectrum              |
//! | `t_gei`   | peak of the input energy spectrum                   |
//! | `t_c`     | `2π·EPV/EPA` from 0.4 s smoothed SV and SA          |
//! | `t_43`    | `4.3·PGV/PGA`                                       |
//! | `q`       | `sqrt(1 − λ1²/(λ0·λ2))`                             |
//! | `epsilon` | `sqrt(1 − λ2²/(λ0·λ4))`                             |
//!
//! On top of that the crate offers catalog ingestion, correlation matrices
//! with good/moderate/weak classification, GeoJSON station maps and seeded
//! synthetic records.

// `!(x > 0.0)` guards double as NaN rejection.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod catalog;
pub mod error;
pub mod response;
pub mod signal;
pub mod spectral;
pub mod stats;
pub mod synth;

pub use analysis::{analyze_record, RecordAnalysis, RunConfig};
pub use catalog::{Catalog, Component};
pub use error::{Error, Result};
pub use signal::Accelerogram;
pub use stats::{Param, ParameterSet};
