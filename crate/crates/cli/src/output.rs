//! CSV tables and plot series.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// A two-column series for plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    /// File stem; the series is written to `<name>.csv`.
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
}

impl PlotSeries {
    pub fn new(name: &str, x_label: &str, y_label: &str, points: Vec<(f64, f64)>) -> Self {
        Self {
            name: name.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            points,
        }
    }
}

/// Renders `rows` as CSV with a header row derived from the field names.
pub fn render_csv<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

/// Writes each series as a two-column CSV in `dir` and returns the paths.
pub fn emit_plot_data(series: &[PlotSeries], dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir)?;
    series
        .iter()
        .map(|s| {
            if let Some(&(x, y)) = s.points.iter().find(|(x, y)| !x.is_finite() || !y.is_finite()) {
                return Err(CliError::Io(format!(
                    "series {} has a non-finite point ({x}, {y})",
                    s.name
                )));
            }
            let path = dir.join(format!("{}.csv", s.name));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record([&s.x_label, &s.y_label])?;
            for &(x, y) in &s.points {
                w.write_record([format!("{x:?}"), format!("{y:?}")])?;
            }
            w.flush()?;
            Ok(path)
        })
        .collect()
}
