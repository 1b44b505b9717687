//! Plot-ready CSV derived from a finished run.

use std::path::Path;

use crate::persist::{num, read_manifest};
use crate::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    RVsParam,
    SnapshotHeatline,
    FluxVsTime,
}

impl PlotKind {
    pub fn name(self) -> &'static str {
        match self {
            PlotKind::RVsParam => "R_vs_param",
            PlotKind::SnapshotHeatline => "snapshot_heatline",
            PlotKind::FluxVsTime => "flux_vs_time",
        }
    }

    fn source(self) -> &'static str {
        match self {
            PlotKind::RVsParam => "sweep.csv",
            PlotKind::SnapshotHeatline => "snapshots.csv",
            PlotKind::FluxVsTime => "flux.csv",
        }
    }
}

impl std::str::FromStr for PlotKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "R_vs_param" => Ok(PlotKind::RVsParam),
            "snapshot_heatline" => Ok(PlotKind::SnapshotHeatline),
            "flux_vs_time" => Ok(PlotKind::FluxVsTime),
            other => Err(format!(
                "unknown plot kind '{other}' (expected R_vs_param, snapshot_heatline or flux_vs_time)"
            )),
        }
    }
}

fn column(headers: &csv::StringRecord, name: &str, file: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::Data(format!("{file} has no '{name}' column")))
}

fn parse(field: &str, file: &str) -> Result<f64> {
    field
        .parse()
        .map_err(|_| CliError::Data(format!("{file}: '{field}' is not a number")))
}

/// Reads the run's source file and returns the plot CSV bytes.
///
/// `t` picks the snapshot nearest that time; without it the last one is used.
pub fn emit_plot_data(run: &Path, kind: PlotKind, t: Option<f64>) -> Result<Vec<u8>> {
    let manifest = read_manifest(run)?;
    let file = kind.source();
    if !manifest.outputs.iter().any(|o| o.path == file) {
        return Err(CliError::MissingOutput(format!(
            "{} lists no {file} ({} runs do not produce {} data)",
            run.display(),
            manifest.command,
            kind.name()
        )));
    }
    let path = run.join(file);
    let mut rdr = csv::Reader::from_path(&path)
        .map_err(|_| CliError::MissingOutput(path.display().to_string()))?;
    let headers = rdr.headers()?.clone();
    let mut w = csv::Writer::from_writer(Vec::new());
    match kind {
        PlotKind::RVsParam => {
            let name = manifest
                .config_echo
                .get("param")
                .cloned()
                .unwrap_or_else(|| "param".into());
            let (ip, ir) = (
                column(&headers, "param", file)?,
                column(&headers, "R", file)?,
            );
            w.write_record([name.as_str(), "R"])?;
            for rec in rdr.records() {
                let rec = rec?;
                if rec[ir].is_empty() {
                    continue;
                }
                w.write_record([&rec[ip], &rec[ir]])?;
            }
        }
        PlotKind::SnapshotHeatline => {
            let (it, ix, is) = (
                column(&headers, "t", file)?,
                column(&headers, "x", file)?,
                column(&headers, "S0", file)?,
            );
            let rows: Vec<csv::StringRecord> =
                rdr.records().collect::<std::result::Result<_, _>>()?;
            let times: Vec<f64> = rows
                .iter()
                .map(|r| parse(&r[it], file))
                .collect::<Result<_>>()?;
            let chosen = match t {
                None => *times
                    .last()
                    .ok_or_else(|| CliError::Data(format!("{file} is empty")))?,
                Some(t) => *times
                    .iter()
                    .min_by(|a, b| (*a - t).abs().total_cmp(&(*b - t).abs()))
                    .ok_or_else(|| CliError::Data(format!("{file} is empty")))?,
            };
            w.write_record(["x", "S0"])?;
            for (r, &tr) in rows.iter().zip(&times) {
                if tr == chosen {
                    w.write_record([&r[ix], &r[is]])?;
                }
            }
            eprintln!("snapshot at t = {}", num(chosen));
        }
        PlotKind::FluxVsTime => {
            let cols = [
                column(&headers, "t", file)?,
                column(&headers, "S0_left", file)?,
                column(&headers, "S0_right", file)?,
            ];
            w.write_record(["t", "S0_left", "S0_right"])?;
            for rec in rdr.records() {
                let rec = rec?;
                w.write_record(cols.map(|c| &rec[c]))?;
            }
        }
    }
    w.into_inner().map_err(|e| CliError::Data(e.to_string()))
}
