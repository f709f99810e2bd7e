//! CSV results and the JSON metadata sidecar.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::{ConvergenceRow, CurvePoint, ExperimentConfig, HarnessError};

pub const CURVE_HEADER: &str = "p,decoder,trials,failures,bler,ci_low,ci_high,mean_iters,osd_rate,seed";
pub const CONVERGENCE_HEADER: &str = "p,decoder,iters,trials,failures,bler,ci_low,ci_high,seed";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.display().to_string(), source }
}

fn to_csv<T: Serialize>(rows: &[T], header: &str) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("plain records always serialize");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory writer")).expect("CSV output is UTF-8");
    format!("{header}\n{body}")
}

fn from_csv<T: DeserializeOwned>(text: &str, header: &str, origin: &str) -> Result<Vec<T>, HarnessError> {
    let err = |message: String| HarnessError::Csv { path: origin.to_string(), message };
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let found = rdr.headers().map_err(|e| err(e.to_string()))?.iter().collect::<Vec<_>>().join(",");
    if found != header {
        return Err(err(format!("expected header `{header}`, found `{found}`")));
    }
    rdr.deserialize().enumerate().map(|(i, row)| row.map_err(|e| err(format!("row {}: {e}", i + 1)))).collect()
}

/// The curve CSV with its exact header.
pub fn curve_to_csv(points: &[CurvePoint]) -> String {
    to_csv(points, CURVE_HEADER)
}

/// Parses a curve CSV, rejecting any other header and inconsistent rows.
pub fn parse_curve_csv(text: &str, origin: &str) -> Result<Vec<CurvePoint>, HarnessError> {
    let points: Vec<CurvePoint> = from_csv(text, CURVE_HEADER, origin)?;
    for (i, pt) in points.iter().enumerate() {
        let ok = pt.trials > 0
            && pt.failures <= pt.trials
            && pt.p.is_finite()
            && (0.0..=1.0).contains(&pt.bler)
            && (0.0..=1.0).contains(&pt.ci_low)
            && (0.0..=1.0).contains(&pt.ci_high);
        if !ok {
            return Err(HarnessError::Csv { path: origin.to_string(), message: format!("row {}: inconsistent values", i + 1) });
        }
    }
    Ok(points)
}

pub fn write_curve_csv(path: &Path, points: &[CurvePoint]) -> Result<(), HarnessError> {
    fs::write(path, curve_to_csv(points)).map_err(io_err(path))
}

pub fn read_curve_csv(path: &Path) -> Result<Vec<CurvePoint>, HarnessError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_curve_csv(&text, &path.display().to_string())
}

pub fn convergence_to_csv(rows: &[ConvergenceRow]) -> String {
    to_csv(rows, CONVERGENCE_HEADER)
}

pub fn parse_convergence_csv(text: &str, origin: &str) -> Result<Vec<ConvergenceRow>, HarnessError> {
    from_csv(text, CONVERGENCE_HEADER, origin)
}

pub fn write_convergence_csv(path: &Path, rows: &[ConvergenceRow]) -> Result<(), HarnessError> {
    fs::write(path, convergence_to_csv(rows)).map_err(io_err(path))
}

/// `<out>.meta.json` next to `<out>`.
pub fn meta_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

#[derive(Debug, Serialize)]
struct Meta<'a> {
    tool: &'static str,
    version: &'static str,
    kind: &'a str,
    resolved_iters: usize,
    config: &'a ExperimentConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    iters_grid: Option<&'a [usize]>,
}

/// Writes the resolved configuration next to `out`. Contains nothing that
/// varies between identical runs.
pub fn write_meta(out: &Path, kind: &str, cfg: &ExperimentConfig, iters_grid: Option<&[usize]>) -> Result<PathBuf, HarnessError> {
    let meta = Meta { tool: "qtanner", version: env!("CARGO_PKG_VERSION"), kind, resolved_iters: cfg.iters(), config: cfg, iters_grid };
    let path = meta_path(out);
    let text = serde_json::to_string_pretty(&meta).expect("config serializes") + "\n";
    fs::write(&path, text).map_err(io_err(&path))?;
    Ok(path)
}
