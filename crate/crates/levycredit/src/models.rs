//! The four asset dynamics and their model-level functions: cumulant
//! generating function, martingale adjustment, expected increment, density,
//! CDF, and the moment maps used by calibration.
//!
//! Parameters are validated at construction; every method below may assume
//! the invariants hold.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;
use crate::special;

/// Model selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Merton,
    NegGamma,
    NegIg,
    SymVg,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ModelKind::Merton => "merton",
            ModelKind::NegGamma => "neggamma",
            ModelKind::NegIg => "negig",
            ModelKind::SymVg => "symvg",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "merton" => Ok(ModelKind::Merton),
            "neggamma" | "neg-gamma" => Ok(ModelKind::NegGamma),
            "negig" | "neg-ig" => Ok(ModelKind::NegIg),
            "symvg" | "sym-vg" => Ok(ModelKind::SymVg),
            other => Err(Error::domain(format!("unknown model '{other}'"))),
        }
    }
}

/// Diffusion scale of the Merton (Black–Scholes) baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MertonParams {
    pub sigma: f64,
}

/// Rate λ and shape ρ of the negated Gamma process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegGammaParams {
    pub lambda: f64,
    pub rho: f64,
}

/// Shape λ and mean μ of the negated inverse-Gaussian process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegIgParams {
    pub lambda: f64,
    pub mu: f64,
}

/// Scale σ and Gamma-clock variance ν of the symmetric Variance Gamma
/// process (asymmetry fixed at zero).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymVgParams {
    pub sigma: f64,
    pub nu: f64,
}

/// Validated parameters of one of the four models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ModelParams {
    Merton(MertonParams),
    NegGamma(NegGammaParams),
    NegIg(NegIgParams),
    SymVg(SymVgParams),
}

/// Variance, skewness and excess kurtosis of the unit-time increment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelMoments {
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

impl ModelParams {
    pub fn merton(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::domain(format!("merton needs sigma > 0, got {sigma}")));
        }
        Ok(ModelParams::Merton(MertonParams { sigma }))
    }

    pub fn neg_gamma(lambda: f64, rho: f64) -> Result<Self> {
        if !(lambda > 0.0 && rho > 0.0 && lambda.is_finite() && rho.is_finite()) {
            return Err(Error::domain(format!(
                "neggamma needs lambda > 0 and rho > 0, got ({lambda}, {rho})"
            )));
        }
        Ok(ModelParams::NegGamma(NegGammaParams { lambda, rho }))
    }

    pub fn neg_ig(lambda: f64, mu: f64) -> Result<Self> {
        if !(lambda > 0.0 && mu > 0.0 && lambda.is_finite() && mu.is_finite()) {
            return Err(Error::domain(format!(
                "negig needs lambda > 0 and mu > 0, got ({lambda}, {mu})"
            )));
        }
        Ok(ModelParams::NegIg(NegIgParams { lambda, mu }))
    }

    pub fn sym_vg(sigma: f64, nu: f64) -> Result<Self> {
        if !(sigma > 0.0 && nu > 0.0 && sigma.is_finite() && nu.is_finite()) {
            return Err(Error::domain(format!(
                "symvg needs sigma > 0 and nu > 0, got ({sigma}, {nu})"
            )));
        }
        if sigma * sigma * nu / 2.0 >= 1.0 {
            return Err(Error::domain(format!(
                "symvg needs sigma^2 nu / 2 < 1 for a finite adjustment, got {}",
                sigma * sigma * nu / 2.0
            )));
        }
        Ok(ModelParams::SymVg(SymVgParams { sigma, nu }))
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParams::Merton(_) => ModelKind::Merton,
            ModelParams::NegGamma(_) => ModelKind::NegGamma,
            ModelParams::NegIg(_) => ModelKind::NegIg,
            ModelParams::SymVg(_) => ModelKind::SymVg,
        }
    }

    /// Parameters as a flat vector, in the documented order per model
    /// (σ | λ,ρ | λ,μ | σ,ν). Used by the calibration trace.
    pub fn as_vec(&self) -> Vec<f64> {
        match self {
            ModelParams::Merton(p) => vec![p.sigma],
            ModelParams::NegGamma(p) => vec![p.lambda, p.rho],
            ModelParams::NegIg(p) => vec![p.lambda, p.mu],
            ModelParams::SymVg(p) => vec![p.sigma, p.nu],
        }
    }

    /// Cumulant generating function κ(p) of the unit-time increment.
    ///
    /// Errors when p leaves the model's convergence strip.
    pub fn cumulant_gen(&self, p: f64) -> Result<f64> {
        match self {
            ModelParams::Merton(m) => Ok(0.5 * m.sigma * m.sigma * p * p),
            ModelParams::NegGamma(g) => {
                if p <= -g.lambda {
                    return Err(Error::domain(format!(
                        "neggamma cumulant needs p > -lambda = {}, got {p}",
                        -g.lambda
                    )));
                }
                Ok(-g.rho * (1.0 + p / g.lambda).ln())
            }
            ModelParams::NegIg(i) => {
                let arg = 1.0 + 2.0 * p * i.mu * i.mu / i.lambda;
                if arg < 0.0 {
                    return Err(Error::domain(format!(
                        "negig cumulant needs p > -lambda/(2 mu^2) = {}, got {p}",
                        -i.lambda / (2.0 * i.mu * i.mu)
                    )));
                }
                Ok(i.lambda / i.mu * (1.0 - arg.sqrt()))
            }
            ModelParams::SymVg(v) => {
                let arg = 1.0 - 0.5 * v.sigma * v.sigma * v.nu * p * p;
                if arg <= 0.0 {
                    return Err(Error::domain(format!(
                        "symvg cumulant needs sigma^2 nu p^2 / 2 < 1, got p = {p}"
                    )));
                }
                Ok(-arg.ln() / v.nu)
            }
        }
    }

    /// Martingale (convexity) adjustment ω = −κ(1).
    pub fn martingale_adjustment(&self) -> f64 {
        match self {
            ModelParams::Merton(m) => -0.5 * m.sigma * m.sigma,
            ModelParams::NegGamma(g) => g.rho * (1.0 + 1.0 / g.lambda).ln(),
            ModelParams::NegIg(i) => {
                i.lambda / i.mu * ((1.0 + 2.0 * i.mu * i.mu / i.lambda).sqrt() - 1.0)
            }
            // the admissibility invariant keeps the log argument positive
            ModelParams::SymVg(v) => (1.0 - 0.5 * v.sigma * v.sigma * v.nu).ln() / v.nu,
        }
    }

    /// E[X_dt] = κ'(0) dt.
    pub fn expected_increment(&self, dt: f64) -> f64 {
        debug_assert!(dt > 0.0);
        match self {
            ModelParams::Merton(_) | ModelParams::SymVg(_) => 0.0,
            ModelParams::NegGamma(g) => -g.rho / g.lambda * dt,
            ModelParams::NegIg(i) => -i.mu * dt,
        }
    }

    /// Density of X_t at x.
    ///
    /// One-sided models are supported on the negative axis and return 0 for
    /// x ≥ 0. The symVG density at x = 0 diverges (integrably) when
    /// t/ν ≤ 1/2; positive infinity is returned there.
    pub fn density(&self, x: f64, t: f64) -> f64 {
        assert!(t > 0.0, "density needs t > 0");
        match self {
            ModelParams::Merton(m) => {
                let s = m.sigma * t.sqrt();
                special::std_normal_pdf(x / s) / s
            }
            ModelParams::NegGamma(g) => {
                if x >= 0.0 {
                    return 0.0;
                }
                let a = g.rho * t;
                let ln = a * g.lambda.ln() + (a - 1.0) * (-x).ln() + g.lambda * x
                    - special::ln_gamma(a);
                ln.exp()
            }
            ModelParams::NegIg(i) => {
                if x >= 0.0 {
                    return 0.0;
                }
                let y = -x;
                let ln = 0.5 * (i.lambda * t * t / (2.0 * std::f64::consts::PI)).ln()
                    - i.lambda * (y - i.mu * t).powi(2) / (2.0 * i.mu * i.mu * y)
                    - 1.5 * y.ln();
                ln.exp()
            }
            ModelParams::SymVg(v) => sym_vg_density(v, x, t),
        }
    }

    /// Cumulative distribution function of X_t at x.
    ///
    /// Closed forms for Merton, NegGamma (regularized upper gamma) and NegIG
    /// (Shuster tail); adaptive quadrature of the density for symVG with the
    /// symmetry point F(0) = 1/2 enforced analytically.
    pub fn cdf(&self, x: f64, t: f64) -> f64 {
        assert!(t > 0.0, "cdf needs t > 0");
        match self {
            ModelParams::Merton(m) => special::std_normal_cdf(x / (m.sigma * t.sqrt())),
            ModelParams::NegGamma(g) => {
                if x >= 0.0 {
                    1.0
                } else {
                    special::reg_upper_gamma(g.rho * t, -g.lambda * x)
                        .expect("validated arguments")
                }
            }
            ModelParams::NegIg(i) => {
                if x >= 0.0 {
                    1.0
                } else {
                    special::shuster_phi_complement(-x, t, i.lambda, i.mu)
                        .expect("validated arguments")
                }
            }
            ModelParams::SymVg(v) => sym_vg_cdf(v, x, t),
        }
    }

    /// Variance, skewness and excess kurtosis of the unit-time increment.
    pub fn model_moments(&self) -> ModelMoments {
        match self {
            ModelParams::Merton(m) => ModelMoments {
                variance: m.sigma * m.sigma,
                skewness: 0.0,
                excess_kurtosis: 0.0,
            },
            ModelParams::NegGamma(g) => ModelMoments {
                variance: g.rho / (g.lambda * g.lambda),
                skewness: -2.0 / g.rho.sqrt(),
                excess_kurtosis: 6.0 / g.rho,
            },
            ModelParams::NegIg(i) => ModelMoments {
                variance: i.mu.powi(3) / i.lambda,
                skewness: -3.0 * (i.mu / i.lambda).sqrt(),
                excess_kurtosis: 15.0 * i.mu / i.lambda,
            },
            ModelParams::SymVg(v) => ModelMoments {
                variance: v.sigma * v.sigma,
                skewness: 0.0,
                excess_kurtosis: 3.0 * v.nu,
            },
        }
    }

    /// Inverse moment map: parameters matching the given variance and excess
    /// kurtosis (variance only for Merton).
    pub fn from_moments(kind: ModelKind, variance: f64, excess_kurtosis: f64) -> Result<Self> {
        if !(variance > 0.0) {
            return Err(Error::domain(format!("moment map needs variance > 0, got {variance}")));
        }
        if kind != ModelKind::Merton && excess_kurtosis <= 0.0 {
            return Err(Error::NonPositiveKurtosis(excess_kurtosis));
        }
        match kind {
            ModelKind::Merton => ModelParams::merton(variance.sqrt()),
            ModelKind::NegGamma => {
                let rho = 6.0 / excess_kurtosis;
                let lambda = (rho / variance).sqrt();
                ModelParams::neg_gamma(lambda, rho)
            }
            ModelKind::NegIg => {
                // unique positive root of { mu^3/lambda = v, 15 mu/lambda = k }
                let mu = (15.0 * variance / excess_kurtosis).sqrt();
                let lambda = 15.0 * mu / excess_kurtosis;
                ModelParams::neg_ig(lambda, mu)
            }
            ModelKind::SymVg => ModelParams::sym_vg(variance.sqrt(), excess_kurtosis / 3.0),
        }
    }
}

/// symVG density: Bessel-K form evaluated in log space so intermediate
/// overflow near the origin cannot occur.
fn sym_vg_density(v: &SymVgParams, x: f64, t: f64) -> f64 {
    let shape = t / v.nu;
    let q = shape - 0.5;
    let s2n = v.sigma * v.sigma * v.nu;
    if x == 0.0 {
        if q <= 0.0 {
            return f64::INFINITY;
        }
        // finite limit at the origin for t/nu > 1/2
        return (special::ln_gamma(q) - special::ln_gamma(shape)
            - (2.0 * std::f64::consts::PI * v.nu).sqrt().ln()
            - v.sigma.ln())
        .exp();
    }
    let b = (2.0 / v.nu).sqrt() / v.sigma;
    let z = b * x.abs();
    let ln_c = std::f64::consts::LN_2
        - 0.5 * (2.0 * std::f64::consts::PI).ln()
        - special::ln_gamma(shape)
        - shape * s2n.ln();
    let ln_k = special::ln_bessel_k(q, z).expect("z > 0");
    (ln_c + q * (x.abs() / b).ln() + ln_k).exp()
}

/// Interval mass ∫_lo^hi f_V(u) du on the positive half-axis, with the
/// origin singularity flattened by the substitution u = s^m.
fn sym_vg_mass(v: &SymVgParams, lo: f64, hi: f64, t: f64, tol: f64) -> crate::error::Result<f64> {
    debug_assert!(lo >= 0.0 && hi > lo);
    if lo == 0.0 {
        let two_q = 2.0 * t / v.nu - 1.0; // f ~ u^{two_q} near 0
        let m = if two_q >= 2.0 {
            1.0
        } else {
            (4.0 / (two_q + 1.0)).ceil().clamp(2.0, 64.0)
        };
        let s_hi = hi.powf(1.0 / m);
        quad::integrate(
            |s| {
                if s <= 0.0 {
                    return 0.0;
                }
                let u = s.powf(m);
                sym_vg_density(v, u, t) * m * s.powf(m - 1.0)
            },
            0.0,
            s_hi,
            tol,
        )
    } else {
        quad::integrate(|u| sym_vg_density(v, u, t), lo, hi, tol)
    }
}

fn sym_vg_cdf(v: &SymVgParams, x: f64, t: f64) -> f64 {
    const TOL: f64 = 5e-10;
    if x == 0.0 {
        return 0.5;
    }
    if x > 0.0 {
        return 1.0 - sym_vg_cdf(v, -x, t);
    }
    let a = -x;
    let b = (2.0 / v.nu).sqrt() / v.sigma;
    if b * a >= 1.0 {
        // tail-first integration keeps small probabilities accurate
        quad::integrate_to_inf(|u| sym_vg_density(v, u, t), a, TOL)
            .expect("symvg tail quadrature")
            .min(0.5)
    } else {
        (0.5 - sym_vg_mass(v, 0.0, a, t, TOL).expect("symvg near-origin quadrature")).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_rel(got: f64, want: f64, tol: f64) {
        let rel = if want == 0.0 { got.abs() } else { ((got - want) / want).abs() };
        assert!(rel <= tol, "got {got:e}, want {want:e}, rel err {rel:e}");
    }

    fn random_params(kind: ModelKind, rng: &mut impl Rng) -> ModelParams {
        match kind {
            ModelKind::Merton => ModelParams::merton(rng.gen_range(0.05..0.6)).unwrap(),
            ModelKind::NegGamma => {
                ModelParams::neg_gamma(rng.gen_range(1.0..8.0), rng.gen_range(0.2..1.5)).unwrap()
            }
            ModelKind::NegIg => {
                ModelParams::neg_ig(rng.gen_range(0.5..5.0), rng.gen_range(0.1..0.8)).unwrap()
            }
            ModelKind::SymVg => {
                let sigma = rng.gen_range(0.08..0.5);
                let nu = rng.gen_range(0.5..5.0);
                ModelParams::sym_vg(sigma, nu).unwrap()
            }
        }
    }

    const KINDS: [ModelKind; 4] = [
        ModelKind::Merton,
        ModelKind::NegGamma,
        ModelKind::NegIg,
        ModelKind::SymVg,
    ];

    #[test]
    fn construction_validates() {
        assert!(ModelParams::merton(0.0).is_err());
        assert!(ModelParams::neg_gamma(-1.0, 0.5).is_err());
        assert!(ModelParams::neg_ig(1.0, 0.0).is_err());
        assert!(ModelParams::sym_vg(2.0, 1.0).is_err()); // sigma^2 nu / 2 = 2
        assert!(ModelParams::sym_vg(0.2402, 3.2453).is_ok());
    }

    #[test]
    fn cumulant_at_zero_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for kind in KINDS {
            let p = random_params(kind, &mut rng);
            assert_eq!(p.cumulant_gen(0.0).unwrap(), 0.0, "{kind}");
        }
    }

    #[test]
    fn cumulant_reference_values() {
        let g = ModelParams::neg_gamma(3.280, 0.888).unwrap();
        assert_rel(g.cumulant_gen(1.0).unwrap(), -0.23630531343151592, 1e-14);
        let v = ModelParams::sym_vg(0.2402, 3.2453).unwrap();
        assert_rel(v.cumulant_gen(1.0).unwrap(), 0.030289083794648351, 1e-14);
    }

    #[test]
    fn cumulant_domain_errors() {
        let g = ModelParams::neg_gamma(3.0, 0.8).unwrap();
        assert!(g.cumulant_gen(-3.0).is_err());
        let i = ModelParams::neg_ig(2.0, 0.5).unwrap();
        assert!(i.cumulant_gen(-5.0).is_err());
        let v = ModelParams::sym_vg(0.3, 2.0).unwrap();
        assert!(v.cumulant_gen(4.0).is_err());
    }

    #[test]
    fn martingale_adjustment_matches_negative_cumulant() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for kind in KINDS {
            for _ in 0..250 {
                let p = random_params(kind, &mut rng);
                let om = p.martingale_adjustment();
                let k1 = p.cumulant_gen(1.0).unwrap();
                assert!((om + k1).abs() <= 1e-12 * om.abs().max(1.0), "{kind}: {om} vs {k1}");
            }
        }
    }

    #[test]
    fn martingale_adjustment_reference_values() {
        assert_rel(
            ModelParams::neg_gamma(3.280, 0.888).unwrap().martingale_adjustment(),
            0.23630531343151592,
            1e-14,
        );
        assert_rel(
            ModelParams::sym_vg(0.2402, 3.2453).unwrap().martingale_adjustment(),
            -0.030289083794648351,
            1e-14,
        );
        assert_rel(
            ModelParams::neg_ig(2.5, 0.45).unwrap().martingale_adjustment(),
            0.4331168792052736,
            1e-14,
        );
        // degenerate diffusion
        assert!(ModelParams::merton(1e-9).unwrap().martingale_adjustment().abs() < 1e-17);
    }

    #[test]
    fn symvg_low_kurtosis_adjustment_limit() {
        let sigma = 0.2873;
        let v = ModelParams::sym_vg(sigma, 1e-6).unwrap();
        assert!((v.martingale_adjustment() + 0.5 * sigma * sigma).abs() < 1e-6);
    }

    #[test]
    fn expected_increment_values() {
        let g = ModelParams::neg_gamma(3.280, 0.888).unwrap();
        assert_rel(g.expected_increment(1.0), -0.888 / 3.280, 1e-15);
        let i = ModelParams::neg_ig(2.0, 0.5).unwrap();
        assert_eq!(i.expected_increment(2.0), -1.0);
        assert_eq!(ModelParams::sym_vg(0.3, 1.0).unwrap().expected_increment(0.7), 0.0);
        assert_eq!(ModelParams::merton(0.3).unwrap().expected_increment(0.7), 0.0);
    }

    #[test]
    fn expected_increment_is_cumulant_slope() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = 1e-6;
        for kind in KINDS {
            for _ in 0..100 {
                let p = random_params(kind, &mut rng);
                let slope =
                    (p.cumulant_gen(h).unwrap() - p.cumulant_gen(-h).unwrap()) / (2.0 * h);
                assert!(
                    (slope - p.expected_increment(1.0)).abs() <= 1e-5,
                    "{kind}: {slope} vs {}",
                    p.expected_increment(1.0)
                );
            }
        }
    }

    #[test]
    fn one_sided_support() {
        let g = ModelParams::neg_gamma(3.0, 0.8).unwrap();
        assert_eq!(g.density(0.3, 1.0), 0.0);
        assert_eq!(g.density(0.0, 1.0), 0.0);
        assert_eq!(g.cdf(0.0, 1.0), 1.0);
        assert_eq!(g.cdf(0.5, 1.0), 1.0);
        let i = ModelParams::neg_ig(2.0, 0.5).unwrap();
        assert_eq!(i.density(1e-9, 1.0), 0.0);
        assert_eq!(i.cdf(0.0, 2.0), 1.0);
    }

    #[test]
    fn neg_gamma_density_exponential_case() {
        // rho t = 1 reduces to a negated exponential density
        let g = ModelParams::neg_gamma(2.5, 0.5).unwrap();
        let t = 2.0;
        for x in [-0.1, -0.7, -3.0] {
            assert_rel(g.density(x, t), 2.5 * (2.5 * x).exp(), 1e-13);
        }
    }

    #[test]
    fn symvg_density_shape() {
        let v = ModelParams::sym_vg(0.2402, 3.2453).unwrap();
        // even in x
        assert_eq!(v.density(0.4, 1.0), v.density(-0.4, 1.0));
        // t/nu < 1/2: integrable divergence at 0
        assert_eq!(v.density(0.0, 1.0), f64::INFINITY);
        // t/nu > 1/2: finite closed-form limit at 0
        assert_rel(v.density(0.0, 2.0), 5.1568008904785002, 1e-12);
    }

    /// Mass of the density over its support, flattening any power-law
    /// singularity at the origin by the u = s^m substitution.
    fn density_mass(p: &ModelParams, t: f64) -> f64 {
        // left-tail exponent of the density at the origin
        let origin_pow = match p {
            ModelParams::Merton(_) => 0.0,
            ModelParams::NegGamma(g) => g.rho * t - 1.0,
            ModelParams::NegIg(_) => 0.0,
            ModelParams::SymVg(v) => 2.0 * t / v.nu - 1.0,
        };
        let m = if origin_pow >= 1.0 { 1.0 } else { (4.0 / (origin_pow + 1.0)).ceil().min(64.0) };
        let one_sided = matches!(p, ModelParams::NegGamma(_) | ModelParams::NegIg(_));
        let dir = if one_sided { -1.0 } else { 1.0 };
        let near = quad::integrate(
            |s: f64| {
                if s <= 0.0 {
                    return 0.0;
                }
                let u = s.powf(m);
                p.density(dir * u, t) * m * s.powf(m - 1.0)
            },
            0.0,
            1.0,
            1e-10,
        )
        .unwrap();
        let far = quad::integrate_to_inf(|u| p.density(dir * u, t), 1.0, 1e-10).unwrap();
        if one_sided {
            near + far
        } else {
            2.0 * (near + far)
        }
    }

    #[test]
    fn densities_integrate_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for kind in KINDS {
            for &t in &[0.1, 1.0, 5.0] {
                for _ in 0..5 {
                    let p = random_params(kind, &mut rng);
                    let mass = density_mass(&p, t);
                    assert!((mass - 1.0).abs() < 1e-7, "{kind} t={t}: mass {mass}");
                }
            }
        }
    }

    #[test]
    fn cdf_matches_density_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for kind in KINDS {
            for _ in 0..8 {
                let p = random_params(kind, &mut rng);
                let t = *[0.5, 1.0, 3.0].get(rng.gen_range(0..3)).unwrap();
                let x = rng.gen_range(-2.0..-0.01);
                let direct = p.cdf(x, t);
                let quadv = quad::integrate_to_inf(|u| p.density(x - u, t), 0.0, 1e-9).unwrap();
                assert!(
                    (direct - quadv).abs() < 1e-7,
                    "{kind} t={t} x={x}: cdf {direct} vs quad {quadv}"
                );
            }
        }
    }

    #[test]
    fn cdf_is_nondecreasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for kind in KINDS {
            let p = random_params(kind, &mut rng);
            let mut prev = 0.0;
            for i in -40..=40 {
                let x = i as f64 * 0.1;
                let c = p.cdf(x, 1.0);
                assert!((0.0..=1.0).contains(&c));
                assert!(c >= prev - 1e-12, "{kind} at {x}");
                prev = c;
            }
        }
    }

    #[test]
    fn symvg_cdf_symmetry() {
        let v = ModelParams::sym_vg(0.2402, 3.2453).unwrap();
        assert_eq!(v.cdf(0.0, 1.0), 0.5);
        for x in [0.2, 0.8, 2.5] {
            let lo = v.cdf(-x, 1.0);
            let hi = v.cdf(x, 1.0);
            assert!((lo + hi - 1.0).abs() < 2e-9, "x={x}: {lo} + {hi}");
        }
    }

    #[test]
    fn model_moments_reference_values() {
        let g = ModelParams::neg_gamma(3.280, 0.888).unwrap();
        let m = g.model_moments();
        assert_rel(m.variance, 0.082540154669839381, 1e-14);
        assert_rel(m.skewness, -2.1223817998900444, 1e-14);
        assert_rel(m.excess_kurtosis, 6.7567567567567568, 1e-14);
        // symmetric process has zero skewness
        assert_eq!(ModelParams::sym_vg(0.3, 2.0).unwrap().model_moments().skewness, 0.0);
        // lambda = 15 mu gives unit excess kurtosis
        let i = ModelParams::neg_ig(15.0 * 0.4, 0.4).unwrap();
        assert_rel(i.model_moments().excess_kurtosis, 1.0, 1e-15);
    }

    #[test]
    fn moment_map_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for kind in KINDS {
            for _ in 0..200 {
                let p = random_params(kind, &mut rng);
                let m = p.model_moments();
                let q = ModelParams::from_moments(kind, m.variance, m.excess_kurtosis).unwrap();
                for (a, b) in p.as_vec().iter().zip(q.as_vec()) {
                    assert!(((a - b) / a).abs() <= 1e-10, "{kind}: {a} vs {b}");
                }
                let m2 = q.model_moments();
                assert!(((m2.variance - m.variance) / m.variance).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn moment_map_inverse_matches_table_parameters() {
        let p = ModelParams::from_moments(ModelKind::NegGamma, 0.082540154669839381, 6.7567567567567568)
            .unwrap();
        let v = p.as_vec();
        assert_rel(v[0], 3.280, 1e-16);
        assert_rel(v[1], 0.888, 1e-16);
    }

    #[test]
    fn moment_map_rejects_nonpositive_kurtosis() {
        assert!(matches!(
            ModelParams::from_moments(ModelKind::NegIg, 0.001, -0.2),
            Err(Error::NonPositiveKurtosis(_))
        ));
        assert!(matches!(
            ModelParams::from_moments(ModelKind::SymVg, 0.01, 0.0),
            Err(Error::NonPositiveKurtosis(_))
        ));
        // Merton ignores kurtosis
        assert!(ModelParams::from_moments(ModelKind::Merton, 0.01, -1.0).is_ok());
    }

    #[test]
    fn model_kind_round_trips_strings() {
        for kind in KINDS {
            let s = kind.to_string();
            let back: ModelKind = s.parse().unwrap();
            assert_eq!(kind, back);
        }
        assert!("garch".parse::<ModelKind>().is_err());
    }
}
