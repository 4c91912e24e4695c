//! Semi-analytic expected tranche loss.
//!
//! The tranche payoff is a call spread on the portfolio loss,
//! `Tl(x) = (max(x - a, 0) - max(x - b, 0)) / (b - a)`, so the inner integral
//! over the conditional loss only needs the expected call payoff under the
//! conditional density. Under a normal density that is the usual
//! `(μ - h) Φ(d) + σ ϕ(d)`; under the order-N Gram-Charlier density each
//! Hermite term integrates in closed form through
//! `∫_z^∞ He_j ϕ = He_{j-1}(z) ϕ(z)` and `u He_j = He_{j+1} + j He_{j-1}`,
//! which collapses to
//!
//! ```text
//! E[(L - h)+] = σ [ c₀ (ϕ(z) - z Φ(-z)) + c₁ Φ(-z) + ϕ(z) Σ_{n>=2} c_n He_{n-2}(z) ],
//! z = (h - μ) / σ.
//! ```
//!
//! The outer integral over the systematic factors uses a tensor Gauss-Hermite
//! grid. Per-point work runs in parallel; the weighted sum is always reduced
//! serially in grid order, so results are bitwise reproducible.

use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::conditional::{
    self, ConditionalLossStats, HARD_MAX_EXPANSION_ORDER, MAX_EXPANSION_ORDER,
};
use crate::error::{Error, Result};
use crate::gauss::{self, norm_cdf, norm_pdf, FactorGrid, QuadratureRule};
use crate::model::{Portfolio, Tranche};

/// Conditional standard deviation below which the loss is treated as a point
/// mass at its mean.
pub const DEFAULT_SIGMA_FLOOR: f64 = 1e-12;

pub const DEFAULT_NODES_PER_FACTOR: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PricerConfig {
    /// Expansion order N; 1 is the plain normal approximation.
    pub order: usize,
    /// Gauss-Hermite nodes per systematic factor.
    pub nodes_per_factor: usize,
    /// Absolute floor on the conditional standard deviation.
    pub sigma_floor: f64,
    /// Lift the order cap from 10 to 20. Logs a warning when used.
    pub allow_high_order: bool,
}

impl Default for PricerConfig {
    fn default() -> Self {
        Self {
            order: 1,
            nodes_per_factor: DEFAULT_NODES_PER_FACTOR,
            sigma_floor: DEFAULT_SIGMA_FLOOR,
            allow_high_order: false,
        }
    }
}

impl PricerConfig {
    pub fn gaussian() -> Self {
        Self::default()
    }

    pub fn hermite(order: usize) -> Self {
        Self {
            order,
            ..Self::default()
        }
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes_per_factor = nodes;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let max = if self.allow_high_order {
            HARD_MAX_EXPANSION_ORDER
        } else {
            MAX_EXPANSION_ORDER
        };
        if self.order == 0 {
            return Err(Error::InvalidConfig("expansion order must be at least 1".into()));
        }
        if self.order > max {
            return Err(Error::OrderTooLarge {
                order: self.order,
                max,
            });
        }
        if self.nodes_per_factor == 0 || self.nodes_per_factor > gauss::MAX_RULE_ORDER {
            return Err(Error::OrderOutOfRange(self.nodes_per_factor));
        }
        if !(self.sigma_floor > 0.0 && self.sigma_floor <= 1e-6) {
            return Err(Error::InvalidConfig(format!(
                "sigma floor {} outside (0, 1e-6]",
                self.sigma_floor
            )));
        }
        Ok(())
    }

    pub fn method(&self) -> Method {
        if self.order == 1 {
            Method::Gaussian
        } else {
            Method::Hermite(self.order)
        }
    }
}

/// Which engine produced a price.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Gaussian,
    Hermite(usize),
    MonteCarlo,
    Exact,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Gaussian => f.write_str("gaussian"),
            Method::Hermite(n) => write!(f, "hermite-{n}"),
            Method::MonteCarlo => f.write_str("mc"),
            Method::Exact => f.write_str("exact"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    /// Number of factor points in the outer quadrature (or MC paths).
    pub grid_points: usize,
    /// Factor points whose conditional sd fell to the floor.
    pub floored_points: usize,
    /// Aggregated value before clamping to [0, 1].
    pub raw_value: f64,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceResult {
    pub tranche: Tranche,
    /// Expected tranche loss as a fraction of the tranche notional.
    pub value: f64,
    pub method: Method,
    /// Standard error, Monte Carlo only.
    pub std_error: Option<f64>,
    pub diagnostics: Diagnostics,
}

/// Tranche loss profile: fraction of the tranche wiped out by portfolio loss `x`.
pub fn tranche_profile(t: &Tranche, x: f64) -> f64 {
    ((x - t.attach()).max(0.0)).min(t.width()) / t.width()
}

/// `E[max(X - h, 0)]` for `X ~ N(mean, sd²)`, `sd > 0`.
fn normal_call(mean: f64, sd: f64, strike: f64) -> f64 {
    let z = (strike - mean) / sd;
    sd * (norm_pdf(z) - z * norm_cdf(-z))
}

/// `E[max(X - h, 0)]` under the Gram-Charlier density with coefficients `c`.
fn hermite_call(mean: f64, sd: f64, strike: f64, c: &[f64], he: &mut [f64]) -> f64 {
    let z = (strike - mean) / sd;
    let pdf = norm_pdf(z);
    let upper = norm_cdf(-z);
    let mut acc = c[0] * (pdf - z * upper);
    if c.len() > 1 {
        acc += c[1] * upper;
    }
    if c.len() > 2 {
        let he = &mut he[..c.len() - 2];
        gauss::hermite_he_all(z, he);
        let series: f64 = c[2..].iter().zip(he.iter()).map(|(ci, h)| ci * h).sum();
        acc += pdf * series;
    }
    sd * acc
}

/// Expected tranche profile when the loss is `N(mean, sd²)`.
///
/// Falls back to the profile at the mean when `sd <= DEFAULT_SIGMA_FLOOR`.
pub fn inner_gaussian(t: &Tranche, mean: f64, sd: f64) -> f64 {
    inner_gaussian_floored(t, mean, sd, DEFAULT_SIGMA_FLOOR)
}

fn inner_gaussian_floored(t: &Tranche, mean: f64, sd: f64, floor: f64) -> f64 {
    if sd <= floor {
        return tranche_profile(t, mean);
    }
    (normal_call(mean, sd, t.attach()) - normal_call(mean, sd, t.detach())) / t.width()
}

/// Expected tranche profile under the truncated Gram-Charlier density of the
/// loss with mean `mean`, standard deviation `sd` and coefficients `c_0..c_N`.
///
/// The density may be negative in places, so the result is not clamped.
pub fn inner_hermite(t: &Tranche, mean: f64, sd: f64, charlier: &[f64]) -> Result<f64> {
    inner_hermite_floored(t, mean, sd, charlier, DEFAULT_SIGMA_FLOOR)
}

fn inner_hermite_floored(t: &Tranche, mean: f64, sd: f64, c: &[f64], floor: f64) -> Result<f64> {
    if !(sd > floor) {
        return Err(Error::DegenerateVariance(sd * sd));
    }
    if c.is_empty() {
        return Err(Error::InvalidConfig("empty coefficient list".into()));
    }
    let mut he = vec![0.0; c.len()];
    Ok(inner_hermite_raw(t, mean, sd, c, &mut he))
}

fn inner_hermite_raw(t: &Tranche, mean: f64, sd: f64, c: &[f64], he: &mut [f64]) -> f64 {
    (hermite_call(mean, sd, t.attach(), c, he) - hermite_call(mean, sd, t.detach(), c, he))
        / t.width()
}

/// Expected loss of one tranche.
pub fn price_tranche(portfolio: &Portfolio, t: Tranche, cfg: &PricerConfig) -> Result<PriceResult> {
    let mut out = price_tranches(portfolio, &[t], cfg)?;
    Ok(out.pop().expect("one tranche in, one result out"))
}

/// Expected losses of the base tranches `[0, d]` for increasing detachments.
pub fn price_base_curve(
    portfolio: &Portfolio,
    detachments: &[f64],
    cfg: &PricerConfig,
) -> Result<Vec<PriceResult>> {
    if detachments.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::NonMonotoneDetachments);
    }
    let tranches = detachments
        .iter()
        .map(|&d| Tranche::base(d))
        .collect::<Result<Vec<_>>>()?;
    price_tranches(portfolio, &tranches, cfg)
}

/// Prices several tranches, computing the conditional statistics at each
/// factor point once and reusing them for every tranche.
pub fn price_tranches(
    portfolio: &Portfolio,
    tranches: &[Tranche],
    cfg: &PricerConfig,
) -> Result<Vec<PriceResult>> {
    cfg.validate()?;
    if cfg.order > MAX_EXPANSION_ORDER {
        log::warn!(
            "expansion order {} exceeds the usual cap of {}; Gram-Charlier series are asymptotic and may degrade",
            cfg.order,
            MAX_EXPANSION_ORDER
        );
    }
    let started = Instant::now();
    let rule = QuadratureRule::gauss_hermite(cfg.nodes_per_factor)?;
    let grid = FactorGrid::tensor(&rule, portfolio.factors())?;

    let per_point: Vec<(Vec<f64>, bool)> = (0..grid.len())
        .into_par_iter()
        .map(|j| point_values(portfolio, tranches, cfg, grid.point(j)))
        .collect();

    let floored = per_point.iter().filter(|(_, f)| *f).count();
    let method = cfg.method();
    let elapsed = started.elapsed();
    let results = tranches
        .iter()
        .enumerate()
        .map(|(ti, &tranche)| {
            let raw: f64 = per_point
                .iter()
                .zip(grid.weights())
                .map(|((vals, _), w)| w * vals[ti])
                .sum();
            PriceResult {
                tranche,
                value: raw.clamp(0.0, 1.0),
                method,
                std_error: None,
                diagnostics: Diagnostics {
                    grid_points: grid.len(),
                    floored_points: floored,
                    raw_value: raw,
                    wall_time: elapsed,
                },
            }
        })
        .collect();
    Ok(results)
}

fn point_values(
    portfolio: &Portfolio,
    tranches: &[Tranche],
    cfg: &PricerConfig,
    factors: &[f64],
) -> (Vec<f64>, bool) {
    if cfg.order == 1 {
        let (mean, var) = conditional::conditional_mean_variance(portfolio, factors)
            .expect("grid dimension matches portfolio");
        let sd = var.sqrt();
        let floored = sd <= cfg.sigma_floor;
        let vals = tranches
            .iter()
            .map(|t| inner_gaussian_floored(t, mean, sd, cfg.sigma_floor))
            .collect();
        return (vals, floored);
    }

    let stats = ConditionalLossStats::compute_unchecked(portfolio, factors, cfg.order);
    let sd = stats.sd();
    match &stats.charlier {
        Some(c) if sd > cfg.sigma_floor => {
            let mut he = vec![0.0; c.len()];
            let vals = tranches
                .iter()
                .map(|t| inner_hermite_raw(t, stats.mean, sd, c, &mut he))
                .collect();
            (vals, false)
        }
        _ => {
            let vals = tranches.iter().map(|t| tranche_profile(t, stats.mean)).collect();
            (vals, true)
        }
    }
}
