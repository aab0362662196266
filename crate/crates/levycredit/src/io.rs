//! Data ingestion, issuer configuration and report serialization.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::calibration::EquitySeries;
use crate::error::{Error, Result};
use crate::metrics::Measure;
use crate::models::ModelKind;
use crate::pricing::DebtSpec;

/// Environment variable naming the default directory for data files; a
/// relative CSV path that does not resolve locally is retried against it.
pub const DATA_DIR_ENV: &str = "LEVYCREDIT_DATA_DIR";

/// Observation window selecting the tail (or a date range) of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Window {
    /// Latest 252 observations.
    OneYear,
    /// Latest 504 observations.
    TwoYears,
    /// Inclusive date range.
    Range { from: NaiveDate, to: NaiveDate },
    All,
}

impl std::str::FromStr for Window {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1y" => Ok(Window::OneYear),
            "2y" => Ok(Window::TwoYears),
            "all" => Ok(Window::All),
            other => {
                let (from, to) = other
                    .split_once(':')
                    .ok_or_else(|| Error::domain(format!("bad window '{other}': use 1y, 2y, all or FROM:TO")))?;
                let parse = |d: &str| {
                    d.parse::<NaiveDate>()
                        .map_err(|e| Error::domain(format!("bad date '{d}' in window: {e}")))
                };
                Ok(Window::Range { from: parse(from)?, to: parse(to)? })
            }
        }
    }
}

/// Resolve a data path, falling back to the directory named by
/// `LEVYCREDIT_DATA_DIR` for relative paths that do not exist locally.
pub fn resolve_data_path(path: &Path) -> PathBuf {
    if path.is_relative() && !path.exists() {
        if let Ok(dir) = std::env::var(DATA_DIR_ENV) {
            let candidate = Path::new(&dir).join(path);
            if candidate.exists() {
                return candidate;
            }
        }
    }
    path.to_path_buf()
}

/// Load a `date,value` CSV (header required, ISO-8601 dates) into an equity
/// series, window-filtered and validated.
pub fn load_equity_series(path: &Path, window: Window, debt: DebtSpec) -> Result<EquitySeries> {
    let path = resolve_data_path(path);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(&path)
        .map_err(|e| Error::Parse { line: 0, message: format!("{}: {e}", path.display()) })?;
    {
        let headers = reader.headers().map_err(|e| Error::Parse {
            line: 1,
            message: format!("cannot read header: {e}"),
        })?;
        if headers.len() < 2 {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected 'date,value' header, got {headers:?}"),
            });
        }
    }
    let mut observations: Vec<(NaiveDate, f64)> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 2; // header occupies line 1
        let record = record.map_err(|e| Error::Parse { line, message: e.to_string() })?;
        if record.len() < 2 {
            return Err(Error::Parse { line, message: "expected two columns".into() });
        }
        let date: NaiveDate = record[0]
            .parse()
            .map_err(|e| Error::Parse { line, message: format!("bad date '{}': {e}", &record[0]) })?;
        let value: f64 = record[1]
            .parse()
            .map_err(|e| Error::Parse { line, message: format!("bad value '{}': {e}", &record[1]) })?;
        if !(value > 0.0) {
            return Err(Error::NonPositivePrice { line });
        }
        if let Some((prev, _)) = observations.last() {
            if date <= *prev {
                return Err(Error::NonMonotoneDates(format!(
                    "{prev} then {date} at line {line}"
                )));
            }
        }
        observations.push((date, value));
    }
    let filtered: Vec<(NaiveDate, f64)> = match window {
        Window::All => observations,
        Window::OneYear => tail(observations, 252),
        Window::TwoYears => tail(observations, 504),
        Window::Range { from, to } => observations
            .into_iter()
            .filter(|(d, _)| *d >= from && *d <= to)
            .collect(),
    };
    EquitySeries::new(filtered, 1.0, debt)
}

fn tail(mut obs: Vec<(NaiveDate, f64)>, n: usize) -> Vec<(NaiveDate, f64)> {
    if obs.len() > n {
        obs.drain(..obs.len() - n);
    }
    obs
}

/// Which measures a report covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureChoice {
    RiskNeutral,
    Actual,
    Both,
}

impl MeasureChoice {
    pub fn wants(&self, measure: Measure) -> bool {
        matches!(
            (self, measure),
            (MeasureChoice::Both, _)
                | (MeasureChoice::RiskNeutral, Measure::RiskNeutral)
                | (MeasureChoice::Actual, Measure::Actual)
        )
    }
}

impl std::str::FromStr for MeasureChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "risk-neutral" | "rn" => Ok(MeasureChoice::RiskNeutral),
            "actual" => Ok(MeasureChoice::Actual),
            "both" => Ok(MeasureChoice::Both),
            other => Err(Error::domain(format!("bad measure '{other}'"))),
        }
    }
}

/// One issuer's inputs: debt, horizons, models and the equity file, as read
/// from a TOML config.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IssuerConfig {
    pub ticker: String,
    /// Debt face value K, same unit as the equity series.
    pub debt_face_value: f64,
    /// Strictly increasing debt maturities in years.
    pub maturities: Vec<f64>,
    pub risk_free_rate: f64,
    pub models: Vec<ModelKind>,
    pub equity_csv: PathBuf,
    pub measure: MeasureChoice,
    #[serde(with = "window_string")]
    pub window: Window,
}

mod window_string {
    use super::Window;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(w: &Window, s: S) -> std::result::Result<S::Ok, S::Error> {
        match w {
            Window::OneYear => "1y".serialize(s),
            Window::TwoYears => "2y".serialize(s),
            Window::All => "all".serialize(s),
            Window::Range { from, to } => format!("{from}:{to}").serialize(s),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Window, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

impl IssuerConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path)?;
        let mut cfg: IssuerConfig = toml::from_str(&raw)
            .map_err(|e| Error::Parse { line: 0, message: format!("{}: {e}", path.display()) })?;
        // a relative series path resolves against the config's directory
        if cfg.equity_csv.is_relative() && !cfg.equity_csv.exists() {
            if let Some(dir) = path.parent() {
                let candidate = dir.join(&cfg.equity_csv);
                if candidate.exists() {
                    cfg.equity_csv = candidate;
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.debt_face_value > 0.0) {
            return Err(Error::domain("config: debt_face_value must be > 0"));
        }
        if self.maturities.is_empty()
            || self.maturities[0] <= 0.0
            || self.maturities.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::domain("config: maturities must be positive and strictly increasing"));
        }
        if self.models.is_empty() {
            return Err(Error::domain("config: at least one model required"));
        }
        Ok(())
    }
}

/// One row of a report: issuer × model × horizon × measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub ticker: String,
    pub model: ModelKind,
    pub horizon: f64,
    pub measure: Measure,
    pub rate: f64,
    /// Calibrated parameters in the model's documented order, `;`-joined.
    pub params: String,
    pub implied_asset: f64,
    pub distance: f64,
    pub probability: f64,
    /// Percentage rounded to 2 decimals, table-style.
    pub probability_pct: String,
    pub iterations: u64,
    pub converged: bool,
    pub warnings: String,
}

/// Report table with CSV (de)serialization.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReportDocument {
    pub rows: Vec<ReportRow>,
}

/// 12-significant-digit formatting used across emitted tables.
pub fn fmt_g12(x: f64) -> String {
    format!("{x:.12e}")
}

pub fn join_params(values: &[f64]) -> String {
    values.iter().map(|v| fmt_g12(*v)).collect::<Vec<_>>().join(";")
}

pub fn percent_2dp(p: f64) -> String {
    format!("{:.2}%", 100.0 * p)
}

impl ReportDocument {
    pub fn to_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row).map_err(|e| Error::Parse { line: 0, message: e.to_string() })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn from_csv<R: std::io::Read>(input: R) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(input);
        let rows = reader
            .deserialize()
            .collect::<std::result::Result<Vec<ReportRow>, _>>()
            .map_err(|e| Error::Parse { line: 0, message: e.to_string() })?;
        Ok(ReportDocument { rows })
    }
}
