//! Experiment harness: density sweeps at the optimal `(h, l)` coupling,
//! trend fits, bound/error ratios, and CSV/SVG output.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use zermelo_core::Result;

pub mod config;
pub mod fit;
pub mod report;
pub mod sweep;

pub use config::{Coupling, ExperimentConfig, LSweep, SeedPolicy};
pub use fit::{fit_trend, ratio_summary, FitError, RatioSummary, Series};
pub use sweep::{run_instance, Pilot, RowTiming, SweepRow, SweepTable};

pub const SWEEP_CSV: &str = "sweep.csv";
pub const TIMINGS_CSV: &str = "timings.csv";
pub const SUMMARY_JSON: &str = "summary.json";
pub const ERROR_SVG: &str = "errors.svg";
pub const SHARES_SVG: &str = "shares.svg";

/// Writes the table, its plots and the timing sidecar into `dir`.
pub fn write_outputs(table: &SweepTable, timings: &[RowTiming], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    report::write_csv(&table.rows, BufWriter::new(File::create(dir.join(SWEEP_CSV))?))?;
    report::write_timings_csv(timings, BufWriter::new(File::create(dir.join(TIMINGS_CSV))?))?;
    let summary = serde_json::json!({
        "instance": table.instance,
        "pilot": table.pilot,
        "lMax": table.l_max,
    });
    fs::write(dir.join(SUMMARY_JSON), serde_json::to_string_pretty(&summary)? + "\n")?;
    write_plots(&table.rows, &table.instance, dir)
}

pub fn write_plots(rows: &[SweepRow], title: &str, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(ERROR_SVG), report::error_plot_svg(rows, title)?)?;
    fs::write(dir.join(SHARES_SVG), report::share_plot_svg(rows, title)?)?;
    Ok(())
}
