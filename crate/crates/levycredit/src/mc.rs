//! Seeded Monte Carlo simulation of model increments and terminal asset
//! values; the sampling-based oracle for densities, prices and default
//! probabilities.
//!
//! Every draw runs on its own counter-indexed substream of a ChaCha
//! generator, so results are bit-reproducible for a given (seed, index)
//! regardless of how the work is scheduled; means are reduced by pairwise
//! summation.

use rand::distributions::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Gamma, InverseGaussian, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::models::ModelParams;
use crate::pricing::DebtSpec;

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n_paths: u64,
    pub seed: u64,
}

fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Per-model increment sampler over dt, shared across paths.
enum Sampler {
    Merton { scale: f64 },
    NegGamma(Gamma<f64>),
    NegIg(InverseGaussian<f64>),
    SymVg { clock: Gamma<f64>, sigma: f64 },
}

impl Sampler {
    fn new(params: &ModelParams, dt: f64) -> Self {
        match params {
            ModelParams::Merton(m) => Sampler::Merton { scale: m.sigma * dt.sqrt() },
            ModelParams::NegGamma(g) => {
                Sampler::NegGamma(Gamma::new(g.rho * dt, 1.0 / g.lambda).expect("valid params"))
            }
            ModelParams::NegIg(i) => Sampler::NegIg(
                InverseGaussian::new(i.mu * dt, i.lambda * dt * dt).expect("valid params"),
            ),
            ModelParams::SymVg(v) => Sampler::SymVg {
                clock: Gamma::new(dt / v.nu, v.nu).expect("valid params"),
                sigma: v.sigma,
            },
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Sampler::Merton { scale } => {
                let z: f64 = StandardNormal.sample(rng);
                scale * z
            }
            Sampler::NegGamma(g) => -g.sample(rng),
            Sampler::NegIg(ig) => -ig.sample(rng),
            Sampler::SymVg { clock, sigma } => {
                let g = clock.sample(rng);
                let z: f64 = StandardNormal.sample(rng);
                sigma * g.sqrt() * z
            }
        }
    }
}

/// Pairwise (cascade) summation: deterministic and O(log n) error growth.
fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 128 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = pairwise_sum(values) / n;
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / n;
    (mean, (var / n).sqrt())
}

/// n independent draws of the increment X_dt.
pub fn simulate_increments(params: &ModelParams, dt: f64, n: usize, seed: u64) -> Vec<f64> {
    assert!(dt > 0.0 && n >= 1);
    let sampler = Sampler::new(params, dt);
    (0..n as u64).map(|i| sampler.draw(&mut substream(seed, i))).collect()
}

/// Discounted expected call payoff e^{-rT} E[(V_A e^{(r+ω)T + X_T} − K)^+]
/// by simulation of the terminal increment; antithetic normal pairs for the
/// symmetric models.
pub fn mc_equity_value(
    params: &ModelParams,
    v_a: f64,
    debt: &DebtSpec,
    n_paths: usize,
    seed: u64,
) -> McEstimate {
    assert!(n_paths >= 100);
    let t = debt.maturity;
    let omega = params.martingale_adjustment();
    let growth = (debt.risk_free_rate + omega) * t;
    let disc = (-debt.risk_free_rate * t).exp();
    let payoff = |x: f64| disc * (v_a * (growth + x).exp() - debt.face_value).max(0.0);

    let per_path: Vec<f64> = match params {
        ModelParams::Merton(m) => {
            let scale = m.sigma * t.sqrt();
            (0..n_paths as u64)
                .map(|i| {
                    let z: f64 = StandardNormal.sample(&mut substream(seed, i));
                    0.5 * (payoff(scale * z) + payoff(-scale * z))
                })
                .collect()
        }
        ModelParams::SymVg(v) => {
            let clock = Gamma::new(t / v.nu, v.nu).expect("valid params");
            (0..n_paths as u64)
                .map(|i| {
                    let mut rng = substream(seed, i);
                    let g = clock.sample(&mut rng);
                    let z: f64 = StandardNormal.sample(&mut rng);
                    let x = v.sigma * g.sqrt() * z;
                    0.5 * (payoff(x) + payoff(-x))
                })
                .collect()
        }
        _ => {
            let sampler = Sampler::new(params, t);
            (0..n_paths as u64)
                .map(|i| payoff(sampler.draw(&mut substream(seed, i))))
                .collect()
        }
    };
    let (estimate, std_error) = mean_and_se(&per_path);
    McEstimate { estimate, std_error, n_paths: n_paths as u64, seed }
}

/// Fraction of paths ending below the default point, Q[X_T < −k], with the
/// binomial standard error.
pub fn mc_default_probability(
    params: &ModelParams,
    v_a: f64,
    debt: &DebtSpec,
    rate: f64,
    n_paths: usize,
    seed: u64,
) -> McEstimate {
    assert!(n_paths >= 100);
    let k = crate::pricing::distance_input(params, v_a, debt, rate);
    let sampler = Sampler::new(params, debt.maturity);
    let mut hits = 0u64;
    for i in 0..n_paths as u64 {
        if sampler.draw(&mut substream(seed, i)) < -k {
            hits += 1;
        }
    }
    let n = n_paths as f64;
    let p = hits as f64 / n;
    McEstimate {
        estimate: p,
        std_error: (p * (1.0 - p) / n).sqrt(),
        n_paths: n_paths as u64,
        seed,
    }
}
