//! Equity value of the firm as a European call on its assets: closed forms
//! per model, a general quadrature pricer used as internal oracle, and the
//! inverse map from observed equity to implied asset value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{ModelParams, NegGammaParams, NegIgParams, SymVgParams};
use crate::quad;
use crate::special;

/// Zero-coupon debt: face value, maturity in years, continuously compounded
/// risk-free rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DebtSpec {
    pub face_value: f64,
    pub maturity: f64,
    pub risk_free_rate: f64,
}

impl DebtSpec {
    pub fn new(face_value: f64, maturity: f64, risk_free_rate: f64) -> Result<Self> {
        if !(face_value > 0.0 && face_value.is_finite()) {
            return Err(Error::domain(format!("debt face value must be > 0, got {face_value}")));
        }
        if !(maturity > 0.0 && maturity.is_finite()) {
            return Err(Error::domain(format!("debt maturity must be > 0, got {maturity}")));
        }
        if !risk_free_rate.is_finite() {
            return Err(Error::domain("risk-free rate must be finite"));
        }
        Ok(DebtSpec { face_value, maturity, risk_free_rate })
    }

    /// Discounted face value K e^{-rT}.
    pub fn discounted_face(&self) -> f64 {
        self.face_value * (-self.risk_free_rate * self.maturity).exp()
    }
}

/// Truncation control for the series pricer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    /// Both summation indices run up to this bound (inclusive).
    pub n_max: u32,
    /// Pole-proximity guard on gamma arguments.
    pub pole_epsilon: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl { n_max: 15, pole_epsilon: 1e-9 }
    }
}

/// Price together with any maturity perturbation applied to step off a
/// gamma pole of the series expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceDetail {
    pub value: f64,
    /// Total shift added to the maturity, when a pole was met.
    pub maturity_shift: Option<f64>,
}

/// Distance to default k = ln(V_A/K) + (rate + ω) T.
///
/// With `rate` equal to the risk-free rate this is the risk-neutral distance;
/// with the actual drift it is the real-world one.
pub fn distance_input(params: &ModelParams, v_a: f64, debt: &DebtSpec, rate: f64) -> f64 {
    assert!(v_a > 0.0, "asset value must be positive");
    (v_a / debt.face_value).ln() + (rate + params.martingale_adjustment()) * debt.maturity
}

/// Black–Scholes call with the debt as strike.
fn merton_price(sigma: f64, v_a: f64, debt: &DebtSpec) -> f64 {
    let st = sigma * debt.maturity.sqrt();
    let d1 = ((v_a / debt.face_value).ln()
        + (debt.risk_free_rate + 0.5 * sigma * sigma) * debt.maturity)
        / st;
    let d2 = d1 - st;
    v_a * special::std_normal_cdf(d1) - debt.discounted_face() * special::std_normal_cdf(d2)
}

fn neg_gamma_price(g: &NegGammaParams, v_a: f64, debt: &DebtSpec, k: f64) -> Result<f64> {
    if k <= 0.0 {
        return Ok(0.0);
    }
    let a = g.rho * debt.maturity;
    let head = v_a * special::reg_lower_gamma(a, (g.lambda + 1.0) * k)?;
    let tail = debt.discounted_face() * special::reg_lower_gamma(a, g.lambda * k)?;
    Ok((head - tail).max(0.0))
}

fn neg_ig_price(i: &NegIgParams, v_a: f64, debt: &DebtSpec, k: f64) -> Result<f64> {
    if k <= 0.0 {
        return Ok(0.0);
    }
    let s = (1.0 + 2.0 * i.mu * i.mu / i.lambda).sqrt();
    let t = debt.maturity;
    let head = v_a * special::shuster_phi(k * s, t, i.lambda * s, i.mu)?;
    let tail = debt.discounted_face() * special::shuster_phi(k, t, i.lambda, i.mu)?;
    Ok((head - tail).max(0.0))
}

/// (ln |Γ(x)|, sign) for a series numerator; pole proximity is an error.
fn ln_gamma_checked(x: f64, pole_epsilon: f64) -> Result<(f64, f64)> {
    special::ln_gamma_sign(x, pole_epsilon)
}

/// Reciprocal gamma 1/Γ(x) as (ln |1/Γ|, sign); `None` at an exact
/// nonpositive-integer pole where the reciprocal vanishes.
fn recip_gamma(x: f64) -> Option<(f64, f64)> {
    if x <= 0.0 && x == x.round() {
        return None;
    }
    // callers guard the near-pole band beforehand
    let (ln, sign) = special::ln_gamma_sign(x, 0.0).expect("not an exact pole");
    Some((-ln, sign))
}

/// Whole series term (−1)^{n1}/n1! · a-bracket, as (ln |term|, sign); a
/// zero term reports sign 0. Keeping the logarithm lets the caller cancel
/// it against ln Γ(T/ν), which alone overflows for small ν.
fn symvg_term_ln(
    n1: u32,
    n2: u32,
    x: f64,
    y: f64,
    t_nu: f64,
    pole_epsilon: f64,
) -> Result<(f64, f64)> {
    if y == 0.0 {
        return Err(Error::domain("symvg coefficient needs Y != 0"));
    }
    if n2 == 0 {
        return Err(Error::domain("symvg coefficient needs n2 >= 1"));
    }
    let r = -x / y;
    if r < 0.0 {
        return Err(Error::domain("symvg coefficient needs X/Y <= 0 for a real fractional power"));
    }
    let n1f = n1 as f64;
    let n2f = n2 as f64;

    // first term: Γ((n2-n1+1)/2 + T_ν) / Γ((n2-n1)/2 + 1) (−X/Y)^{n1} Y^{n2}
    let g1 = 0.5 * (n2f - n1f + 1.0) + t_nu;
    let g2 = 0.5 * (n2f - n1f) + 1.0;
    let first = match recip_gamma(g2) {
        None => None,
        Some((ln_rg2, s_rg2)) => {
            if r == 0.0 && n1 > 0 {
                None
            } else {
                let (ln_g1, s_g1) = ln_gamma_checked(g1, pole_epsilon)?;
                let pow_r = if n1 == 0 { 0.0 } else { n1f * r.ln() };
                let ln = ln_g1 + ln_rg2 + pow_r + n2f * y.abs().ln();
                let sign_y = if y < 0.0 && n2 % 2 == 1 { -1.0 } else { 1.0 };
                Some((ln, s_g1 * s_rg2 * sign_y))
            }
        }
    };

    // second term: 2 Γ(−2n1−n2−1−2T_ν) / Γ(−n1+1/2−T_ν) (−X/Y)^{2n1+1+2T_ν} (−X)^{n2}
    let g3 = -2.0 * n1f - n2f - 1.0 - 2.0 * t_nu;
    let g4 = -n1f + 0.5 - t_nu;
    let second = if r == 0.0 {
        None
    } else {
        match recip_gamma(g4) {
            None => {
                // an exact reciprocal zero forces the numerator onto a pole;
                // report proximity so the caller can perturb the maturity
                return Err(Error::PoleProximity { argument: g3, epsilon: pole_epsilon });
            }
            Some((ln_rg4, s_rg4)) => {
                let (ln_g3, s_g3) = ln_gamma_checked(g3, pole_epsilon)?;
                let ln = std::f64::consts::LN_2
                    + ln_g3
                    + ln_rg4
                    + (2.0 * n1f + 1.0 + 2.0 * t_nu) * r.ln()
                    + n2f * x.abs().ln();
                let sign_mx = if -x < 0.0 && n2 % 2 == 1 { -1.0 } else { 1.0 };
                Some((ln, s_g3 * s_rg4 * sign_mx))
            }
        }
    };

    // combine the two pieces around the larger magnitude
    let ln_fact_n1 = special::ln_gamma(n1f + 1.0);
    let sign_n1 = if n1 % 2 == 0 { 1.0 } else { -1.0 };
    let (ln_sum, sign_sum) = match (first, second) {
        (None, None) => return Ok((f64::NEG_INFINITY, 0.0)),
        (Some((ln, s)), None) | (None, Some((ln, s))) => (ln, s),
        (Some((ln_a, s_a)), Some((ln_b, s_b))) => {
            let m = ln_a.max(ln_b);
            let sum = s_a * (ln_a - m).exp() + s_b * (ln_b - m).exp();
            if sum == 0.0 {
                return Ok((f64::NEG_INFINITY, 0.0));
            }
            (m + sum.abs().ln(), sum.signum())
        }
    };
    Ok((ln_sum - ln_fact_n1, sign_n1 * sign_sum))
}

/// One coefficient a_{n1,n2}(X, Y) of the series expansion, with gamma
/// ratios evaluated in log space under explicit sign tracking.
///
/// Requires X/Y ≤ 0 so the fractional power of −X/Y stays real (both pricing
/// branches satisfy this).
pub fn symvg_coefficient(
    n1: u32,
    n2: u32,
    x: f64,
    y: f64,
    t_nu: f64,
    pole_epsilon: f64,
) -> Result<f64> {
    let (ln, sign) = symvg_term_ln(n1, n2, x, y, t_nu, pole_epsilon)?;
    Ok(sign * ln.exp())
}

/// Neumaier compensated accumulator.
#[derive(Default)]
struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }
    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// One prepared series term: log-magnitudes and signs of both bracket
/// pieces with everything independent of the asset value folded in, so an
/// evaluation at k costs two exp calls. `r` denotes |k|/σ_ν.
struct TableTerm {
    /// t1 = s1 · exp(c1 + n1 · ln r), sign 0 when the reciprocal gamma kills it
    c1: f64,
    s1: f64,
    e1: f64,
    /// t2 = s2 · exp(c2 + (2 n1 + 1 + 2 T_ν + n2) · ln r)
    c2: f64,
    s2: f64,
    e2: f64,
    n2_odd: bool,
}

/// Precomputed series expansion for one (parameters, maturity) pair. The
/// gamma lattice does not depend on the asset value, so repeated pricing
/// (inversion, calibration sweeps) reuses it.
pub(crate) struct SymVgTable {
    terms: Vec<TableTerm>,
    t_nu: f64,
    sigma_nu: f64,
    omega: f64,
    t: f64,
    rate: f64,
    face: f64,
    disc: f64,
    ln_pref: f64,
    n_max: u32,
}

impl SymVgTable {
    pub(crate) fn new(v: &SymVgParams, debt: &DebtSpec, t: f64, ctrl: &SeriesControl) -> Result<Self> {
        // Every gamma argument of the expansion sits on the lattice ℤ/2 − T/ν,
        // so proximity of T/ν to a half-integer fills the sum with near-pole
        // 1/ε pairs whose cancellation burns the working digits. Refuse to
        // evaluate there; the caller steps the maturity off the lattice.
        let u = t / v.nu;
        let lattice_dist = (2.0 * u - (2.0 * u).round()).abs() / 2.0;
        if lattice_dist < ctrl.pole_epsilon.max(1e-6) {
            return Err(Error::PoleProximity {
                argument: u,
                epsilon: ctrl.pole_epsilon.max(1e-6),
            });
        }
        let t_nu = u - 0.5;
        let sigma_nu = v.sigma * (0.5 * v.nu).sqrt();
        let omega = (1.0 - 0.5 * v.sigma * v.sigma * v.nu).ln() / v.nu;
        let disc = debt.face_value * (-debt.risk_free_rate * t).exp();
        // prefactor folded into each term: Γ(t/ν) overflows on its own
        let ln_pref = disc.ln() - std::f64::consts::LN_2 - special::ln_gamma(u);
        let ln_sn = sigma_nu.ln();

        let mut terms = Vec::with_capacity((ctrl.n_max as usize + 1) * ctrl.n_max as usize);
        for n1 in 0..=ctrl.n_max {
            let n1f = n1 as f64;
            let ln_fact = special::ln_gamma(n1f + 1.0);
            let sign_n1 = if n1 % 2 == 0 { 1.0 } else { -1.0 };
            for n2 in 1..=ctrl.n_max {
                let n2f = n2 as f64;
                let g1 = 0.5 * (n2f - n1f + 1.0) + t_nu;
                let g2 = 0.5 * (n2f - n1f) + 1.0;
                let (c1, s1) = match recip_gamma(g2) {
                    None => (f64::NEG_INFINITY, 0.0),
                    Some((ln_rg2, s_rg2)) => {
                        let (ln_g1, s_g1) = special::ln_gamma_sign(g1, ctrl.pole_epsilon)?;
                        (
                            ln_g1 + ln_rg2 + n2f * ln_sn - ln_fact + ln_pref,
                            sign_n1 * s_g1 * s_rg2,
                        )
                    }
                };
                let g3 = -2.0 * n1f - n2f - 1.0 - 2.0 * t_nu;
                let g4 = -n1f + 0.5 - t_nu;
                let (c2, s2) = match recip_gamma(g4) {
                    None => {
                        return Err(Error::PoleProximity {
                            argument: g3,
                            epsilon: ctrl.pole_epsilon,
                        })
                    }
                    Some((ln_rg4, s_rg4)) => {
                        let (ln_g3, s_g3) = special::ln_gamma_sign(g3, ctrl.pole_epsilon)?;
                        (
                            std::f64::consts::LN_2 + ln_g3 + ln_rg4 + n2f * ln_sn - ln_fact
                                + ln_pref,
                            sign_n1 * s_g3 * s_rg4,
                        )
                    }
                };
                terms.push(TableTerm {
                    c1,
                    s1,
                    e1: n1f,
                    c2,
                    s2,
                    e2: 2.0 * n1f + 1.0 + 2.0 * t_nu + n2f,
                    n2_odd: n2 % 2 == 1,
                });
            }
        }
        Ok(SymVgTable {
            terms,
            t_nu,
            sigma_nu,
            omega,
            t,
            rate: debt.risk_free_rate,
            face: debt.face_value,
            disc,
            ln_pref,
            n_max: ctrl.n_max,
        })
    }

    fn distance(&self, v_a: f64) -> f64 {
        (v_a / self.face).ln() + (self.rate + self.omega) * self.t
    }

    pub(crate) fn price(&self, v_a: f64) -> f64 {
        let k = self.distance(v_a);
        if k == 0.0 {
            // single series of the exact at-the-boundary branch
            let mut acc = Kahan::default();
            for n in 1..=(2 * self.n_max) {
                let nf = n as f64;
                let ln = special::ln_gamma(0.5 * (nf + 1.0) + self.t_nu)
                    - special::ln_gamma(0.5 * nf + 1.0)
                    + nf * self.sigma_nu.ln()
                    + self.ln_pref;
                acc.add(ln.exp());
            }
            return acc.total().max(0.0);
        }
        let ln_r = (k.abs() / self.sigma_nu).ln();
        // k > 0 flips the signs of Y^{n2} and (−X)^{n2} for odd n2
        let flip = k > 0.0;
        let mut acc = Kahan::default();
        for term in &self.terms {
            let tw = if flip && term.n2_odd { -1.0 } else { 1.0 };
            let mut val = 0.0;
            if term.s1 != 0.0 {
                val += term.s1 * tw * (term.c1 + term.e1 * ln_r).exp();
            }
            val += term.s2 * tw * (term.c2 + term.e2 * ln_r).exp();
            acc.add(val);
        }
        let series = acc.total();
        let price = if k < 0.0 { series } else { v_a - self.disc - series };
        price.max(0.0)
    }
}

/// Equity value with pole-perturbation metadata for the symVG series.
pub fn equity_value_detailed(
    params: &ModelParams,
    v_a: f64,
    debt: &DebtSpec,
    ctrl: &SeriesControl,
) -> Result<PriceDetail> {
    if !(v_a > 0.0 && v_a.is_finite()) {
        return Err(Error::domain(format!("asset value must be > 0, got {v_a}")));
    }
    let pricer = PreparedPricer::new(params, debt, ctrl)?;
    Ok(PriceDetail { value: pricer.price(v_a)?, maturity_shift: pricer.maturity_shift })
}

/// Pricer with the asset-independent work done once, for repeated pricing
/// and inversion against the same parameters and debt.
pub(crate) struct PreparedPricer<'a> {
    params: &'a ModelParams,
    debt: &'a DebtSpec,
    /// Series tables, each with its weight: one entry normally, a
    /// symmetrically shifted pair when the maturity sat on the pole lattice.
    tables: Vec<(SymVgTable, f64)>,
    pub(crate) maturity_shift: Option<f64>,
}

impl<'a> PreparedPricer<'a> {
    pub(crate) fn new(
        params: &'a ModelParams,
        debt: &'a DebtSpec,
        ctrl: &'a SeriesControl,
    ) -> Result<Self> {
        let mut tables = Vec::new();
        let mut maturity_shift = None;
        if let ModelParams::SymVg(v) = params {
            match SymVgTable::new(v, debt, debt.maturity, ctrl) {
                Ok(t) => tables.push((t, 1.0)),
                Err(Error::PoleProximity { .. }) => {
                    // The price is continuous in T and the pole set has
                    // measure zero: average two evaluations shifted
                    // symmetrically off the lattice. The shift is large
                    // enough to keep the near-pole cancellation benign and
                    // the averaging removes its first-order bias.
                    let mut shift = (6e-5 * v.nu).min(debt.maturity / 4.0);
                    let mut done = false;
                    for _ in 0..8 {
                        let lo = SymVgTable::new(v, debt, debt.maturity - shift, ctrl);
                        let hi = SymVgTable::new(v, debt, debt.maturity + shift, ctrl);
                        match (lo, hi) {
                            (Ok(a), Ok(b)) => {
                                tables.push((a, 0.5));
                                tables.push((b, 0.5));
                                maturity_shift = Some(shift);
                                done = true;
                                break;
                            }
                            (Err(Error::PoleProximity { .. }), _)
                            | (_, Err(Error::PoleProximity { .. })) => shift *= 4.0,
                            (Err(e), _) | (_, Err(e)) => return Err(e),
                        }
                    }
                    if !done {
                        return Err(Error::PoleProximity {
                            argument: debt.maturity / v.nu,
                            epsilon: ctrl.pole_epsilon,
                        });
                    }
                }
                Err(e) => return Err(e),
            }
        }
        Ok(PreparedPricer { params, debt, tables, maturity_shift })
    }

    pub(crate) fn price(&self, v_a: f64) -> Result<f64> {
        if !(v_a > 0.0 && v_a.is_finite()) {
            return Err(Error::domain(format!("asset value must be > 0, got {v_a}")));
        }
        match self.params {
            ModelParams::Merton(m) => Ok(merton_price(m.sigma, v_a, self.debt)),
            ModelParams::NegGamma(g) => {
                let k = distance_input(self.params, v_a, self.debt, self.debt.risk_free_rate);
                neg_gamma_price(g, v_a, self.debt, k)
            }
            ModelParams::NegIg(i) => {
                let k = distance_input(self.params, v_a, self.debt, self.debt.risk_free_rate);
                neg_ig_price(i, v_a, self.debt, k)
            }
            ModelParams::SymVg(v) => {
                // Far from the money the series terms grow to ~e^{(k/σ_ν)²/4}
                // before their superfactorial decay, and the cancellation
                // leaves no usable digits in f64 at any truncation. Those
                // scenarios go to the quadrature pricer — unless the tail
                // mass beyond the strike is already below double noise, in
                // which case the discounted forward intrinsic is exact.
                let sigma_nu = v.sigma * (0.5 * v.nu).sqrt();
                let k = distance_input(self.params, v_a, self.debt, self.debt.risk_free_rate);
                if (k / sigma_nu).abs() > 8.0 {
                    if k > 0.0 {
                        // price = V_A - disc + disc * corr, 0 <= corr <= F(-k)
                        // and F(-k) <= 2 f(-k) / b for b k >> shape
                        let b = (2.0 / v.nu).sqrt() / v.sigma;
                        let intrinsic = v_a - self.debt.discounted_face();
                        if b * k > 4.0 * self.debt.maturity / v.nu {
                            let tail = 2.0 * self.params.density(-k, self.debt.maturity) / b;
                            if self.debt.discounted_face() * tail < 1e-14 * intrinsic {
                                return Ok(intrinsic);
                            }
                        }
                    }
                    return equity_value_quadrature(self.params, v_a, self.debt);
                }
                Ok(self.tables.iter().map(|(t, w)| w * t.price(v_a)).sum())
            }
        }
    }

    /// Analytic price sensitivity to the asset value where a closed form
    /// exists; the series pricer differentiates by central difference.
    fn delta(&self, v_a: f64) -> Result<f64> {
        match self.params {
            ModelParams::Merton(m) => {
                let st = m.sigma * self.debt.maturity.sqrt();
                let d1 = ((v_a / self.debt.face_value).ln()
                    + (self.debt.risk_free_rate + 0.5 * m.sigma * m.sigma) * self.debt.maturity)
                    / st;
                Ok(special::std_normal_cdf(d1))
            }
            ModelParams::NegGamma(g) => {
                let k = distance_input(self.params, v_a, self.debt, self.debt.risk_free_rate);
                if k <= 0.0 {
                    return Ok(0.0);
                }
                special::reg_lower_gamma(g.rho * self.debt.maturity, (g.lambda + 1.0) * k)
            }
            ModelParams::NegIg(i) => {
                let k = distance_input(self.params, v_a, self.debt, self.debt.risk_free_rate);
                if k <= 0.0 {
                    return Ok(0.0);
                }
                let s = (1.0 + 2.0 * i.mu * i.mu / i.lambda).sqrt();
                special::shuster_phi(k * s, self.debt.maturity, i.lambda * s, i.mu)
            }
            ModelParams::SymVg(_) => {
                let h = 1e-6 * v_a;
                Ok((self.price(v_a + h)? - self.price(v_a - h)?) / (2.0 * h))
            }
        }
    }

    /// Implied asset value solving price(V_A) = v_e_obs to 1e-9 relative,
    /// optionally warm-started.
    pub(crate) fn invert(&self, v_e_obs: f64, guess: Option<f64>) -> Result<f64> {
        if !(v_e_obs >= 0.0 && v_e_obs.is_finite()) {
            return Err(Error::domain(format!("observed equity must be >= 0, got {v_e_obs}")));
        }
        if v_e_obs == 0.0 {
            return match self.params {
                // one-sided models price to zero exactly at the k = 0 boundary
                ModelParams::NegGamma(_) | ModelParams::NegIg(_) => {
                    let omega = self.params.martingale_adjustment();
                    Ok(self.debt.face_value
                        * (-(self.debt.risk_free_rate + omega) * self.debt.maturity).exp())
                }
                _ => Err(Error::domain("zero equity does not identify an asset value here")),
            };
        }
        let tol = 1e-9 * v_e_obs;
        // price(V) <= V makes v_e_obs a lower bracket; expand the upper end
        let mut lo = v_e_obs;
        let mut hi = v_e_obs + 10.0 * self.debt.discounted_face();
        let mut f_hi = self.price(hi)?;
        let mut expansions = 0;
        while f_hi < v_e_obs {
            hi *= 2.0;
            f_hi = self.price(hi)?;
            expansions += 1;
            if expansions > 200 {
                return Err(Error::NoSolution(v_e_obs));
            }
        }

        let mut v = guess
            .filter(|g| *g > lo && *g < hi)
            .unwrap_or(v_e_obs + self.debt.discounted_face());
        if v >= hi || v <= lo {
            v = 0.5 * (lo + hi);
        }
        for iter in 0..200 {
            let f = self.price(v)?;
            if (f - v_e_obs).abs() <= tol {
                return Ok(v);
            }
            if f > v_e_obs {
                hi = v.min(hi);
            } else {
                lo = v.max(lo);
            }
            // a periodic bisection step keeps the bracket collapsing even
            // when truncation-level wiggles throw the Newton updates around
            let d = if iter % 3 == 2 { 0.0 } else { self.delta(v)? };
            let newton = if d > 0.0 { v - (f - v_e_obs) / d } else { f64::NAN };
            v = if newton.is_finite() && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (hi - lo) <= 1e-14 * hi {
                return Ok(v);
            }
        }
        Err(Error::NoSolution(v_e_obs))
    }
}

/// Equity value of the firm under the given dynamics (Black–Scholes for
/// Merton, incomplete-gamma and inverse-Gaussian closed forms for the
/// one-sided models, truncated series for symVG).
pub fn equity_value(
    params: &ModelParams,
    v_a: f64,
    debt: &DebtSpec,
    ctrl: &SeriesControl,
) -> Result<f64> {
    equity_value_detailed(params, v_a, debt, ctrl).map(|d| d.value)
}

/// Equity value by adaptive quadrature of the payoff against the density:
/// K e^{-rT} ∫_{-k}^∞ (e^{k+x} − 1) f_X(x,T) dx. Internal oracle for every
/// closed form.
pub fn equity_value_quadrature(params: &ModelParams, v_a: f64, debt: &DebtSpec) -> Result<f64> {
    if !(v_a > 0.0 && v_a.is_finite()) {
        return Err(Error::domain(format!("asset value must be > 0, got {v_a}")));
    }
    let t = debt.maturity;
    let k = distance_input(params, v_a, debt, debt.risk_free_rate);
    let disc = debt.discounted_face();
    // tolerance on the price is 1e-10 K, floored in the K -> 0 regime where
    // that would demand sub-ulp accuracy relative to the price scale
    let tol = (1e-10 * debt.face_value).max(1e-12 * v_a) / disc;

    let integral = match params {
        ModelParams::Merton(_) => {
            let f = |x: f64| ((k + x).exp() - 1.0) * params.density(x, t);
            quad::integrate(f, -k, -k + 1.0, tol / 2.0)?
                + quad::integrate_to_inf(f, -k + 1.0, tol / 2.0)?
        }
        ModelParams::NegGamma(g) => {
            if k <= 0.0 {
                return Ok(0.0);
            }
            // x -> -y puts the integral on (0, k) against the gamma density;
            // the y^{ρT-1} endpoint is flattened by y = s^m
            let a = g.rho * t;
            let m = if a >= 2.0 { 1.0 } else { (4.0 / a).ceil().clamp(2.0, 64.0) };
            let s_hi = k.powf(1.0 / m);
            quad::integrate(
                |s| {
                    if s <= 0.0 {
                        return 0.0;
                    }
                    let y = s.powf(m);
                    ((k - y).exp() - 1.0) * params.density(-y, t) * m * s.powf(m - 1.0)
                },
                0.0,
                s_hi,
                tol,
            )?
        }
        ModelParams::NegIg(_) => {
            if k <= 0.0 {
                return Ok(0.0);
            }
            quad::integrate(|y| ((k - y).exp() - 1.0) * params.density(-y, t), 0.0, k, tol)?
        }
        ModelParams::SymVg(v) => {
            let two_q = 2.0 * t / v.nu - 1.0;
            let m = if two_q >= 2.0 { 1.0 } else { (4.0 / (two_q + 1.0)).ceil().clamp(2.0, 64.0) };
            let weighted_origin = |hi: f64, w: &dyn Fn(f64) -> f64| -> Result<f64> {
                let s_hi = hi.powf(1.0 / m);
                quad::integrate(
                    |s| {
                        if s <= 0.0 {
                            return 0.0;
                        }
                        let u = s.powf(m);
                        w(u) * params.density(u, t) * m * s.powf(m - 1.0)
                    },
                    0.0,
                    s_hi,
                    tol / 2.0,
                )
            };
            if k > 0.0 {
                // (-k, 0]: payoff weight e^{k-u} - 1 with u = -x
                let left = weighted_origin(k, &|u| (k - u).exp() - 1.0)?;
                // [0, 1]: singular origin again, then the smooth tail
                let right = weighted_origin(1.0, &|u| (k + u).exp() - 1.0)?;
                let tail = quad::integrate_to_inf(
                    |x| ((k + x).exp() - 1.0) * params.density(x, t),
                    1.0,
                    tol / 2.0,
                )?;
                left + right + tail
            } else {
                quad::integrate_to_inf(
                    |x| ((k + x).exp() - 1.0) * params.density(x, t),
                    -k,
                    tol,
                )?
            }
        }
    };
    Ok((disc * integral).max(0.0))
}

/// Implied asset value: the V_A with `equity_value(params, V_A, debt) =
/// v_e_obs`, to 1e-9 relative. Newton iteration with a guarded bisection
/// bracket; uniqueness follows from strict monotonicity of the price.
pub fn invert_equity(
    params: &ModelParams,
    v_e_obs: f64,
    debt: &DebtSpec,
    ctrl: &SeriesControl,
) -> Result<f64> {
    PreparedPricer::new(params, debt, ctrl)?.invert(v_e_obs, None)
}
