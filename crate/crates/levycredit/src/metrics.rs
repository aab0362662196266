//! Default metrics on top of the models: distance to default, default
//! probability, actual drift, and term-structure generation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{ModelKind, ModelParams};
use crate::pricing::{distance_input, DebtSpec};

/// Probability measure the metrics are computed under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    RiskNeutral,
    Actual,
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Measure::RiskNeutral => f.write_str("risk-neutral"),
            Measure::Actual => f.write_str("actual"),
        }
    }
}

/// Measure plus the drift it carries: the risk-free rate r under the pricing
/// measure, the estimated drift r̄ under the physical one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureTag {
    pub measure: Measure,
    pub rate: f64,
}

impl MeasureTag {
    pub fn risk_neutral(rate: f64) -> Self {
        MeasureTag { measure: Measure::RiskNeutral, rate }
    }
    pub fn actual(rate: f64) -> Self {
        MeasureTag { measure: Measure::Actual, rate }
    }
}

/// Distance to default and default probability at one horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefaultReport {
    pub distance: f64,
    pub probability: f64,
    pub measure: MeasureTag,
    pub horizon: f64,
    pub model: ModelKind,
}

/// Default probability F_X(−k) at horizon `t` for a given distance to
/// default. One-sided models return exactly 1 for a nonpositive distance.
pub fn default_probability(params: &ModelParams, distance: f64, t: f64) -> f64 {
    assert!(t > 0.0, "default probability needs t > 0");
    params.cdf(-distance, t)
}

/// Actual drift r̄ = (mean log return − E[X_Δ]) / Δ − ω.
pub fn actual_drift(params: &ModelParams, mean_log_return: f64, dt: f64) -> f64 {
    assert!(dt > 0.0, "actual drift needs dt > 0");
    (mean_log_return - params.expected_increment(dt)) / dt - params.martingale_adjustment()
}

/// Default reports across horizons with parameters held fixed; the distance
/// uses the measure's rate at each horizon.
pub fn term_structure(
    params: &ModelParams,
    v_a: f64,
    face_value: f64,
    measure: MeasureTag,
    horizons: &[f64],
) -> Result<Vec<DefaultReport>> {
    if horizons.is_empty() {
        return Err(Error::domain("term structure needs at least one horizon"));
    }
    if horizons.windows(2).any(|w| w[1] <= w[0]) || horizons[0] <= 0.0 {
        return Err(Error::domain("horizons must be positive and strictly increasing"));
    }
    horizons
        .iter()
        .map(|&t| {
            let debt = DebtSpec::new(face_value, t, measure.rate)?;
            let distance = distance_input(params, v_a, &debt, measure.rate);
            Ok(DefaultReport {
                distance,
                probability: default_probability(params, distance, t),
                measure,
                horizon: t,
                model: params.kind(),
            })
        })
        .collect()
}

/// Dense default grid for figure-style term structures: `points` horizons
/// equally spaced on (0, max_horizon].
pub fn dense_horizons(max_horizon: f64, points: usize) -> Vec<f64> {
    let n = points.max(1);
    (1..=n).map(|i| max_horizon * i as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special;

    fn assert_pp(got: f64, want_pct: f64, tol_pp: f64) {
        let got_pct = got * 100.0;
        assert!(
            (got_pct - want_pct).abs() <= tol_pp,
            "got {got_pct:.4}%, want {want_pct}% (± {tol_pp} pp)"
        );
    }

    #[test]
    fn one_sided_certain_default_at_nonpositive_distance() {
        let g = ModelParams::neg_gamma(3.280, 0.888).unwrap();
        assert_eq!(default_probability(&g, -0.1, 1.0), 1.0);
        assert_eq!(default_probability(&g, 0.0, 1.0), 1.0);
        let i = ModelParams::neg_ig(2.0, 0.5).unwrap();
        assert_eq!(default_probability(&i, -1e-12, 5.0), 1.0);
    }

    #[test]
    fn table_issuer_probabilities() {
        let sap = ModelParams::neg_gamma(3.280, 0.888).unwrap();
        let k_sap = distance_input(&sap, 180913.0, &DebtSpec::new(16196.0, 1.0, 0.0).unwrap(), 0.0);
        assert_pp(default_probability(&sap, k_sap, 1.0), 0.01, 0.005);

        let lha = ModelParams::neg_gamma(4.074, 0.784).unwrap();
        let k_lha = distance_input(&lha, 14635.0, &DebtSpec::new(10106.0, 1.0, 0.0).unwrap(), 0.0);
        assert_pp(default_probability(&lha, k_lha, 1.0), 7.29, 0.02);
    }

    #[test]
    fn neg_ig_probability_is_phi_complement() {
        let i = ModelParams::neg_ig(1.8, 0.45).unwrap();
        for k in [0.3, 1.0, 2.5] {
            let p = default_probability(&i, k, 1.0);
            let phi = special::shuster_phi(k, 1.0, 1.8, 0.45).unwrap();
            assert!((p - (1.0 - phi)).abs() <= 1e-14);
        }
    }

    #[test]
    fn actual_drift_merton_remark() {
        // with Δ = 1 the Merton drift is the mean return plus σ²/2
        let m = ModelParams::merton(0.2873).unwrap();
        let mean = -0.012;
        let r = actual_drift(&m, mean, 1.0);
        assert!((r - (mean + 0.5 * 0.2873 * 0.2873)).abs() < 1e-15);
    }

    #[test]
    fn actual_drift_constructed_zero() {
        // the mean that forces r̄ = 0 is E[X_1] + ω
        let g = ModelParams::neg_gamma(3.280, 0.888).unwrap();
        let mean = g.expected_increment(1.0) + g.martingale_adjustment();
        assert!(actual_drift(&g, mean, 1.0).abs() < 1e-15);
        // degenerate diffusion with zero mean
        let m = ModelParams::merton(1e-9).unwrap();
        assert!(actual_drift(&m, 0.0, 1.0).abs() < 1e-17);
    }

    #[test]
    fn term_structure_sap_row() {
        let sap = ModelParams::neg_gamma(3.280, 0.888).unwrap();
        let reports =
            term_structure(&sap, 180913.0, 16196.0, MeasureTag::risk_neutral(0.0), &[1.0, 5.0])
                .unwrap();
        assert_pp(reports[0].probability, 0.01, 0.005);
        assert_pp(reports[1].probability, 0.47, 0.02);
        assert!(reports[0].distance < reports[1].distance);
    }

    #[test]
    fn term_structure_certain_default_below_boundary() {
        let g = ModelParams::neg_gamma(3.0, 0.8).unwrap();
        // the boundary K e^{-(r+ω)T} shrinks with T; stay under the T = 5 one
        let face = 100.0;
        let floor = face * (-(0.0 + g.martingale_adjustment()) * 5.0).exp();
        assert!(25.0 < floor);
        let reports = term_structure(&g, 25.0, face, MeasureTag::risk_neutral(0.0), &[1.0, 2.0, 5.0])
            .unwrap();
        for r in reports {
            assert!(r.distance <= 0.0);
            assert_eq!(r.probability, 1.0);
        }
    }

    #[test]
    fn measures_coincide_when_rates_match() {
        let v = ModelParams::sym_vg(0.2402, 3.2453).unwrap();
        let rn = term_structure(&v, 11666.7, 4998.0, MeasureTag::risk_neutral(0.01), &[1.0, 3.0])
            .unwrap();
        let act = term_structure(&v, 11666.7, 4998.0, MeasureTag::actual(0.01), &[1.0, 3.0])
            .unwrap();
        for (a, b) in rn.iter().zip(&act) {
            assert_eq!(a.distance, b.distance);
            assert_eq!(a.probability, b.probability);
        }
    }

    #[test]
    fn probability_matches_density_quadrature() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        // Simpson oracle over the left tail, independent of the CDF path
        let tail_mass = |params: &ModelParams, x0: f64, t: f64| {
            let n = 20_000;
            let lo = x0 - 40.0 * (t.sqrt().max(1.0));
            let h = (x0 - lo) / n as f64;
            let mut sum = params.density(lo, t) + params.density(x0, t);
            for i in 1..n {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                sum += w * params.density(lo + i as f64 * h, t);
            }
            sum * h / 3.0
        };
        let mut checked = 0;
        while checked < 200 {
            let params = match checked % 4 {
                0 => ModelParams::merton(rng.gen_range(0.1..0.5)).unwrap(),
                1 => ModelParams::neg_gamma(rng.gen_range(1.5..6.0), rng.gen_range(0.3..1.2))
                    .unwrap(),
                2 => ModelParams::neg_ig(rng.gen_range(0.5..4.0), rng.gen_range(0.15..0.6))
                    .unwrap(),
                _ => ModelParams::sym_vg(rng.gen_range(0.1..0.4), rng.gen_range(0.8..4.0))
                    .unwrap(),
            };
            let t = rng.gen_range(0.3..3.0);
            let distance = rng.gen_range(0.1..2.0);
            let p = default_probability(&params, distance, t);
            let oracle = tail_mass(&params, -distance, t);
            assert!(
                (p - oracle).abs() < 1e-7,
                "{params:?} d={distance} t={t}: {p} vs {oracle}"
            );
            checked += 1;
        }
    }

    #[test]
    fn dense_grid_shape() {
        let g = dense_horizons(10.0, 40);
        assert_eq!(g.len(), 40);
        assert!((g[39] - 10.0).abs() < 1e-15);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert!(g[0] > 0.0);
    }

    #[test]
    fn horizons_must_increase() {
        let g = ModelParams::neg_gamma(3.0, 0.8).unwrap();
        assert!(term_structure(&g, 100.0, 50.0, MeasureTag::risk_neutral(0.0), &[]).is_err());
        assert!(
            term_structure(&g, 100.0, 50.0, MeasureTag::risk_neutral(0.0), &[2.0, 1.0]).is_err()
        );
    }
}
