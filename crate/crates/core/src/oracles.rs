//! Reference engines used to check the semi-analytic pricer.
//!
//! * [`mc_price`] simulates the full default model path by path.
//! * [`exact_price`] integrates the factors with the same Gauss-Hermite grid as
//!   the pricer but replaces the approximate conditional density with the exact
//!   conditional loss distribution, enumerated over all default subsets.
//!
//! # Random number streams
//!
//! Monte Carlo paths are generated in batches of [`MC_BATCH`] paths. Batch `b`
//! draws from `ChaCha8Rng::seed_from_u64(seed)` switched to stream `b`, taking
//! `m` factor uniforms followed by `n` idiosyncratic uniforms per path, each
//! built from the top 53 bits of one `u64` as `(k + 0.5) / 2^53`. Normals are
//! obtained by inverting the normal distribution function. Batch statistics are
//! merged in batch order, so an estimate depends only on the seed and the path
//! count, never on the number of worker threads.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

use crate::conditional::{check_dim, default_and_survival};
use crate::error::{Error, Result};
use crate::gauss::{inv_cdf_interior, FactorGrid, QuadratureRule};
use crate::model::{Portfolio, Tranche};
use crate::pricer::tranche_profile;

/// Paths per random-number substream.
pub const MC_BATCH: usize = 1 << 14;

/// Largest portfolio the enumeration engines accept.
pub const MAX_ENUMERATION_LOANS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
    /// Pair every path with its mirror image (all normals negated).
    pub antithetic: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            seed: 1,
            antithetic: false,
        }
    }
}

impl McConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            antithetic: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McResult {
    pub estimate: f64,
    pub std_error: f64,
    /// Paths actually simulated.
    pub samples: usize,
}

/// Running mean / M2 accumulator, merged with Chan's pairwise update.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, other: &Moments) {
        if other.n == 0.0 {
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n / n;
        self.m2 += other.m2 + d * d * self.n * other.n / n;
        self.n = n;
    }

    fn std_error(&self) -> f64 {
        if self.n < 2.0 {
            0.0
        } else {
            (self.m2 / (self.n - 1.0) / self.n).sqrt()
        }
    }
}

#[inline]
fn open_uniform(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Monte Carlo estimate of the expected loss of `t`.
pub fn mc_price(portfolio: &Portfolio, t: Tranche, cfg: &McConfig) -> Result<McResult> {
    Ok(mc_price_tranches(portfolio, &[t], cfg)?[0])
}

/// Monte Carlo estimates for several tranches from one set of paths.
pub fn mc_price_tranches(
    portfolio: &Portfolio,
    tranches: &[Tranche],
    cfg: &McConfig,
) -> Result<Vec<McResult>> {
    if cfg.samples == 0 {
        return Err(Error::InvalidConfig("Monte Carlo needs at least one sample".into()));
    }
    // In antithetic mode each statistical sample is the average over a pair.
    let units = if cfg.antithetic {
        cfg.samples.div_ceil(2)
    } else {
        cfg.samples
    };
    let batches = units.div_ceil(MC_BATCH);

    let per_batch: Vec<Vec<Moments>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let len = MC_BATCH.min(units - b * MC_BATCH);
            simulate_batch(portfolio, tranches, cfg, b as u64, len)
        })
        .collect();

    let mut total = vec![Moments::default(); tranches.len()];
    for batch in &per_batch {
        for (acc, m) in total.iter_mut().zip(batch) {
            acc.merge(m);
        }
    }
    let paths = if cfg.antithetic { 2 * units } else { units };
    Ok(total
        .iter()
        .map(|m| McResult {
            estimate: m.mean.clamp(0.0, 1.0),
            std_error: m.std_error(),
            samples: paths,
        })
        .collect())
}

fn simulate_batch(
    portfolio: &Portfolio,
    tranches: &[Tranche],
    cfg: &McConfig,
    stream: u64,
    len: usize,
) -> Vec<Moments> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);

    let loans = portfolio.loans();
    let mut factors = vec![0.0; portfolio.factors()];
    let mut idio = vec![0.0; loans.len()];
    let mut stats = vec![Moments::default(); tranches.len()];

    let path_loss = |sign: f64, factors: &[f64], idio: &[f64]| -> f64 {
        loans
            .iter()
            .zip(idio)
            .filter(|(loan, &eps)| {
                let latent = sign * (loan.systematic(factors) + loan.idiosyncratic_scale() * eps);
                latent < loan.threshold()
            })
            .map(|(loan, _)| loan.effective_exposure())
            .sum()
    };

    for _ in 0..len {
        for x in factors.iter_mut() {
            *x = inv_cdf_interior(open_uniform(&mut rng));
        }
        for x in idio.iter_mut() {
            *x = inv_cdf_interior(open_uniform(&mut rng));
        }
        let loss = path_loss(1.0, &factors, &idio);
        let mirror = if cfg.antithetic {
            Some(path_loss(-1.0, &factors, &idio))
        } else {
            None
        };
        for (acc, t) in stats.iter_mut().zip(tranches) {
            let v = match mirror {
                Some(l2) => 0.5 * (tranche_profile(t, loss) + tranche_profile(t, l2)),
                None => tranche_profile(t, loss),
            };
            acc.push(v);
        }
    }
    stats
}

fn check_enumerable(portfolio: &Portfolio) -> Result<()> {
    if portfolio.len() > MAX_ENUMERATION_LOANS {
        return Err(Error::PortfolioTooLarge {
            n: portfolio.len(),
            max: MAX_ENUMERATION_LOANS,
        });
    }
    Ok(())
}

/// Depth-first walk over default subsets; `visit(loss, prob)` is called for
/// every subset of positive probability.
fn enumerate_losses(exposures: &[f64], probs: &[(f64, f64)], visit: &mut impl FnMut(f64, f64)) {
    fn walk(
        i: usize,
        loss: f64,
        prob: f64,
        exposures: &[f64],
        probs: &[(f64, f64)],
        visit: &mut impl FnMut(f64, f64),
    ) {
        if prob == 0.0 {
            return;
        }
        if i == exposures.len() {
            visit(loss, prob);
            return;
        }
        let (p, q) = probs[i];
        walk(i + 1, loss, prob * q, exposures, probs, visit);
        walk(i + 1, loss + exposures[i], prob * p, exposures, probs, visit);
    }
    walk(0, 0.0, 1.0, exposures, probs, visit);
}

fn conditional_inputs(portfolio: &Portfolio, factors: &[f64]) -> (Vec<f64>, Vec<(f64, f64)>) {
    portfolio
        .loans()
        .iter()
        .map(|l| (l.effective_exposure(), default_and_survival(l, factors)))
        .unzip()
}

/// Exact distribution of the loss given the factors, as `(loss, probability)`
/// atoms sorted by loss. Subsets with identical loss are merged.
pub fn conditional_loss_pmf(portfolio: &Portfolio, factors: &[f64]) -> Result<Vec<(f64, f64)>> {
    check_enumerable(portfolio)?;
    check_dim(portfolio, factors)?;
    let (exposures, probs) = conditional_inputs(portfolio, factors);
    let mut atoms = Vec::with_capacity(1 << portfolio.len());
    enumerate_losses(&exposures, &probs, &mut |l, p| atoms.push((l, p)));
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
    for (l, p) in atoms {
        match merged.last_mut() {
            Some(last) if last.0 == l => last.1 += p,
            _ => merged.push((l, p)),
        }
    }
    Ok(merged)
}

/// Expected tranche loss with the exact conditional loss distribution and a
/// `nodes`-point Gauss-Hermite rule per factor.
pub fn exact_price(portfolio: &Portfolio, t: Tranche, nodes: usize) -> Result<f64> {
    Ok(exact_price_tranches(portfolio, &[t], nodes)?[0])
}

pub fn exact_price_tranches(portfolio: &Portfolio, tranches: &[Tranche], nodes: usize) -> Result<Vec<f64>> {
    check_enumerable(portfolio)?;
    let rule = QuadratureRule::gauss_hermite(nodes)?;
    let grid = FactorGrid::tensor(&rule, portfolio.factors())?;

    let per_point: Vec<Vec<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|j| {
            let (exposures, probs) = conditional_inputs(portfolio, grid.point(j));
            let mut acc = vec![0.0; tranches.len()];
            enumerate_losses(&exposures, &probs, &mut |l, p| {
                for (a, t) in acc.iter_mut().zip(tranches) {
                    *a += p * tranche_profile(t, l);
                }
            });
            acc
        })
        .collect();

    Ok((0..tranches.len())
        .map(|ti| {
            per_point
                .iter()
                .zip(grid.weights())
                .map(|(v, w)| w * v[ti])
                .sum::<f64>()
                .clamp(0.0, 1.0)
        })
        .collect())
}
