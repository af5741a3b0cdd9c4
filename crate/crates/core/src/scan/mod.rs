//! Dimension and exponent sweeps producing norm-ratio tables.

mod config;
mod families;
mod report;
mod run;

pub use config::{default_grid, parse_dims, parse_exponents, parse_grid, Family, Operator, ScanConfig};
pub use families::{build_family, build_grushin_family, family_member, remark_bump};
pub use report::{emit_csv, emit_plotdata, read_csv, write_csv, write_plotdata, ScanReport, ScanRow, CSV_HEADER};
pub use run::{decay_slope, run_scan};
