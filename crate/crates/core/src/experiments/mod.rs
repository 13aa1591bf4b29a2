//! Configuration-driven Monte Carlo sweeps with CSV and SVG output.

pub mod config;
pub mod plot;
pub mod runs;
pub mod seeds;
pub mod stats;
pub mod table;
pub mod trial;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

pub use config::{ChannelMode, ExperimentConfig, ExperimentKind};
pub use runs::{
    first_crossing, grating_entry_m, run, run_custom, run_fig3, run_fig4, run_fig5, ArmSummary, Crossing,
    CustomRow, ExperimentResult, Fig3Row, Fig4Row, Fig5Row,
};
pub use stats::PairedDiff;
pub use table::ResultTable;

use crate::error::Result;

/// Writes the CSV for `result` to `out` (stdout when `None`).
pub fn write_csv(cfg: &ExperimentConfig, result: &ExperimentResult, out: Option<&Path>) -> Result<()> {
    let table = result.to_table(cfg);
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write_csv(&mut w, &cfg.hash())?;
            w.flush()?;
        }
        None => table.write_csv(std::io::stdout().lock(), &cfg.hash())?,
    }
    Ok(())
}

pub fn write_plot(result: &ExperimentResult, path: &Path) -> Result<()> {
    std::fs::write(path, plot::render_svg(&result.panels()))?;
    Ok(())
}
