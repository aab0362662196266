//! Moment-matching calibration: iterate (invert equity → implied asset
//! series → log-return moments → moment-matched parameters) to a fixed
//! point, with the sample-moment estimators it rests on.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics;
use crate::models::{ModelKind, ModelParams};
use crate::pricing::{DebtSpec, PreparedPricer, SeriesControl};

/// Minimum number of observations a series must carry.
pub const MIN_OBSERVATIONS: usize = 30;

/// Dated sequence of observed equity values for one issuer, with the debt
/// it is priced against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquitySeries {
    observations: Vec<(NaiveDate, f64)>,
    /// Spacing between consecutive observations, in the same time unit as
    /// the debt maturity (1 trading day under the daily-data convention).
    pub dt: f64,
    pub debt: DebtSpec,
}

impl EquitySeries {
    pub fn new(observations: Vec<(NaiveDate, f64)>, dt: f64, debt: DebtSpec) -> Result<Self> {
        if observations.len() < MIN_OBSERVATIONS {
            return Err(Error::TooShort { got: observations.len(), need: MIN_OBSERVATIONS });
        }
        if !(dt > 0.0) {
            return Err(Error::domain(format!("observation spacing must be > 0, got {dt}")));
        }
        for w in observations.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::NonMonotoneDates(format!("{} then {}", w[0].0, w[1].0)));
            }
        }
        if let Some((date, v)) = observations.iter().find(|(_, v)| !(*v > 0.0)) {
            return Err(Error::domain(format!("nonpositive equity value {v} on {date}")));
        }
        Ok(EquitySeries { observations, dt, debt })
    }

    pub fn observations(&self) -> &[(NaiveDate, f64)] {
        &self.observations
    }

    pub fn values(&self) -> Vec<f64> {
        self.observations.iter().map(|(_, v)| *v).collect()
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }
}

/// Mean, variance and standardized central moments of a return sample
/// (population denominators).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

/// Log returns ln(v_{n+1}/v_n) of a positive series.
pub fn log_returns(values: &[f64]) -> Result<Vec<f64>> {
    if values.len() < 2 {
        return Err(Error::TooShort { got: values.len(), need: 2 });
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::domain(format!("log returns need positive values, got {v}")));
    }
    Ok(values.windows(2).map(|w| (w[1] / w[0]).ln()).collect())
}

/// Sample moments with 1/n denominators; skewness and excess kurtosis are
/// the standardized third and fourth central moments.
pub fn sample_moments(returns: &[f64]) -> Result<MomentSummary> {
    if returns.len() < 4 {
        return Err(Error::TooShort { got: returns.len(), need: 4 });
    }
    let n = returns.len() as f64;
    let mean = returns.iter().sum::<f64>() / n;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for &r in returns {
        let d = r - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if m2 == 0.0 {
        return Err(Error::DegenerateSeries);
    }
    Ok(MomentSummary {
        mean,
        variance: m2,
        skewness: m3 / m2.powf(1.5),
        excess_kurtosis: m4 / (m2 * m2) - 3.0,
    })
}

/// Fixed-point iteration controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSettings {
    /// Sup-norm threshold on the parameter step.
    pub tolerance: f64,
    pub max_iter: usize,
    /// Replace a nonpositive sample excess kurtosis by a small positive
    /// value instead of aborting.
    pub clamp_kurtosis: bool,
}

impl Default for CalibrationSettings {
    fn default() -> Self {
        CalibrationSettings { tolerance: 1e-3, max_iter: 100, clamp_kurtosis: true }
    }
}

/// Converged parameters with the implied asset series and iteration trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub params: ModelParams,
    pub implied_assets: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Physical drift estimated from the mean implied-asset log return.
    pub actual_drift: Option<f64>,
    /// Parameter vector per iteration, seed first.
    pub trace: Vec<Vec<f64>>,
    /// Clamping and projection events met along the way.
    pub warnings: Vec<String>,
}

/// Moment-matched parameters with the clamping and projection policies of
/// the iteration applied.
fn fit_params(
    kind: ModelKind,
    moments: &MomentSummary,
    settings: &CalibrationSettings,
    warnings: &mut Vec<String>,
) -> Result<ModelParams> {
    let mut kurt = moments.excess_kurtosis;
    if kind != ModelKind::Merton && kurt <= 0.0 {
        if !settings.clamp_kurtosis {
            return Err(Error::NonPositiveKurtosis(kurt));
        }
        warnings.push(format!("excess kurtosis {kurt:.6} clamped to 1e-4"));
        kurt = 1e-4;
    }
    if kind == ModelKind::SymVg {
        // keep sigma^2 nu / 2 < 1 so the adjustment stays finite
        let sigma2 = moments.variance;
        let nu = kurt / 3.0;
        if sigma2 * nu / 2.0 >= 1.0 {
            let projected = 0.99 * 2.0 / sigma2;
            warnings.push(format!("symvg nu projected from {nu:.6} to {projected:.6}"));
            return ModelParams::sym_vg(sigma2.sqrt(), projected);
        }
    }
    ModelParams::from_moments(kind, moments.variance, kurt)
}

/// Fixed point a ← M⁻¹(moments(log-returns(P⁻¹(equity)))) from observed
/// equity prices. Seeded through the inverse moment map of the observed
/// equity log returns; stops when the sup-norm parameter step drops under
/// the tolerance.
///
/// Non-convergence after `max_iter` returns the partial result inside the
/// error so the trace stays available.
pub fn calibrate(
    kind: ModelKind,
    series: &EquitySeries,
    settings: &CalibrationSettings,
    ctrl: &SeriesControl,
) -> Result<CalibrationResult> {
    let equity = series.values();
    let mut warnings = Vec::new();

    let seed_moments = sample_moments(&log_returns(&equity)?)?;
    let mut params = fit_params(kind, &seed_moments, settings, &mut warnings)?;
    let mut trace = vec![params.as_vec()];

    // per-date inversions are warm-started from the previous iterate's
    // implied assets; the prepared pricer amortizes the series tables
    let mut assets: Vec<f64> = Vec::new();
    let invert_all = |p: &ModelParams, warm: &mut Vec<f64>| -> Result<()> {
        let pricer = PreparedPricer::new(p, &series.debt, ctrl)?;
        if warm.is_empty() {
            *warm = equity.iter().map(|&ve| pricer.invert(ve, None)).collect::<Result<_>>()?;
        } else {
            for (slot, &ve) in warm.iter_mut().zip(&equity) {
                *slot = pricer.invert(ve, Some(*slot))?;
            }
        }
        Ok(())
    };

    let mut converged = false;
    let mut iterations = 0;
    for iter in 1..=settings.max_iter {
        iterations = iter;
        invert_all(&params, &mut assets)?;
        let moments = sample_moments(&log_returns(&assets)?)?;
        let next = fit_params(kind, &moments, settings, &mut warnings)?;
        let step = params
            .as_vec()
            .iter()
            .zip(next.as_vec())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        trace.push(next.as_vec());
        params = next;
        if step < settings.tolerance {
            converged = true;
            break;
        }
    }

    // re-imply with the final parameters so the returned series prices back
    // to the observations
    invert_all(&params, &mut assets)?;
    let final_moments = sample_moments(&log_returns(&assets)?)?;
    let drift = metrics::actual_drift(&params, final_moments.mean, series.dt);
    let result = CalibrationResult {
        params,
        implied_assets: assets,
        iterations,
        converged,
        actual_drift: Some(drift),
        trace,
        warnings,
    };
    if converged {
        Ok(result)
    } else {
        Err(Error::NotConverged(Box::new(result)))
    }
}
