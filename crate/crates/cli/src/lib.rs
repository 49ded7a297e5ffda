//! Command-line front end: configuration, dispatch and CSV/JSON reporting.

pub mod args;
pub mod config;
pub mod error;
pub mod output;
pub mod plan;
pub mod run;
pub mod summary;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::{CommandKind, ExperimentConfig, OUT_DIR_ENV};
pub use error::{CliError, ErrorRecord};
pub use output::{emit_plot_data, PlotSeries};
pub use summary::Summary;

/// Paths of everything a successful run wrote.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub summary: Summary,
    pub summary_path: PathBuf,
    pub tables: Vec<PathBuf>,
    pub plots: Vec<PathBuf>,
}

/// Validates the configuration, runs the command and writes the JSON
/// summary, CSV tables and plot series into the output directory. Nothing is
/// written unless the command succeeds.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome, CliError> {
    let plan = plan::Plan::from_config(config)?;
    let out = config.out_dir()?;
    let art = run::execute(&plan)?;

    let mut params = config.params.clone();
    params.remove("out");
    let summary = Summary::new(params, art.outcome);
    let json = summary.to_json()?;
    Summary::from_json(&json)?;

    fs::create_dir_all(&out)?;
    let summary_path = out.join(format!("{}.json", config.command));
    fs::write(&summary_path, json + "\n")?;
    let tables = art
        .tables
        .iter()
        .map(|(name, text)| {
            let p = out.join(name);
            fs::write(&p, text)?;
            Ok(p)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let plots = emit_plot_data(&art.plots, &out)?;
    Ok(RunOutcome {
        summary,
        summary_path,
        tables,
        plots,
    })
}

/// Writes the error record for a failed run to `<out>/error.json` when the
/// directory is usable and returns the record.
pub fn report_error(err: &CliError, command: Option<CommandKind>, out: Option<&Path>) -> ErrorRecord {
    let record = err.record(command.map(CommandKind::name));
    if let Some(dir) = out {
        if let Ok(json) = serde_json::to_string_pretty(&record) {
            let _ = fs::create_dir_all(dir).and_then(|_| fs::write(dir.join("error.json"), json + "\n"));
        }
    }
    record
}
