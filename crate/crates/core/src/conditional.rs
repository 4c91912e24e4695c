//! The portfolio loss conditional on the systematic factors.
//!
//! Given a factor point `φ`, defaults are independent Bernoulli events with
//! probabilities `p_i(φ)`, so the conditional loss `L = Σ e_i I_i` has
//! cumulants that are plain sums of scaled Bernoulli cumulants. The
//! normalised loss `(L - κ₁)/√κ₂` is then described by its Charlier
//! coefficients `c_n = E[He_n(L̃)] / n!`, which define the truncated
//! Gram-Charlier density `Σ c_n He_n(x) ϕ(x)`.

use crate::error::{Error, Result};
use crate::gauss::{self, norm_cdf, norm_pdf};
use crate::model::{Loan, Portfolio};

/// Default cap on the expansion order.
pub const MAX_EXPANSION_ORDER: usize = 10;

/// Absolute ceiling when the cap is explicitly overridden.
pub const HARD_MAX_EXPANSION_ORDER: usize = 20;

/// Default probability of `loan` given the factor values.
pub fn conditional_default_prob(loan: &Loan, factors: &[f64]) -> f64 {
    norm_cdf(conditional_z(loan, factors))
}

#[inline]
fn conditional_z(loan: &Loan, factors: &[f64]) -> f64 {
    (loan.threshold() - loan.systematic(factors)) / loan.idiosyncratic_scale()
}

/// `(p, 1 - p)` with the survival probability taken from the other tail, so
/// neither side loses precision when `p` is close to 0 or 1.
#[inline]
pub(crate) fn default_and_survival(loan: &Loan, factors: &[f64]) -> (f64, f64) {
    let z = conditional_z(loan, factors);
    (norm_cdf(z), norm_cdf(-z))
}

pub(crate) fn check_dim(portfolio: &Portfolio, factors: &[f64]) -> Result<()> {
    if factors.len() != portfolio.factors() {
        return Err(Error::FactorDimension {
            expected: portfolio.factors(),
            found: factors.len(),
        });
    }
    if let Some(&x) = factors.iter().find(|x| !x.is_finite()) {
        return Err(Error::DomainError {
            function: "factor point",
            value: x,
        });
    }
    Ok(())
}

/// Conditional mean and variance of the portfolio loss.
pub fn conditional_mean_variance(portfolio: &Portfolio, factors: &[f64]) -> Result<(f64, f64)> {
    check_dim(portfolio, factors)?;
    let mut mean = 0.0;
    let mut var = 0.0;
    for loan in portfolio.loans() {
        let e = loan.effective_exposure();
        let (p, q) = default_and_survival(loan, factors);
        mean += e * p;
        var += e * e * p * q;
    }
    Ok((mean, var))
}

/// Cumulants κ₁..κ_order of a Bernoulli variable, written into `out`.
///
/// Uses the moment recursion on whichever of `p`, `1 - p` is smaller and the
/// reflection `κ_j(p) = (-1)^j κ_j(1 - p)` for `j >= 2`.
pub(crate) fn bernoulli_cumulants(p: f64, q: f64, out: &mut [f64]) {
    let order = out.len();
    if order == 0 {
        return;
    }
    let (s, flip) = if p <= q { (p, false) } else { (q, true) };
    // raw moments of Bernoulli(s) are all equal to s
    for n in 1..=order {
        let mut k_n = s;
        let mut binom = 1.0; // C(n-1, k-1)
        for k in 1..n {
            k_n -= binom * out[k - 1] * s;
            binom = binom * (n - k) as f64 / k as f64;
        }
        out[n - 1] = k_n;
    }
    if flip {
        for (j, k) in out.iter_mut().enumerate() {
            if (j + 1) % 2 == 1 {
                *k = -*k;
            }
        }
    }
    out[0] = p;
    if order >= 2 {
        out[1] = p * q;
    }
}

fn check_order(order: usize, max: usize) -> Result<()> {
    if order == 0 {
        return Err(Error::InvalidConfig("expansion order must be at least 1".into()));
    }
    if order > max {
        return Err(Error::OrderTooLarge { order, max });
    }
    Ok(())
}

/// Conditional cumulants κ₁..κ_order of the portfolio loss (`order <= 10`).
pub fn conditional_cumulants(portfolio: &Portfolio, factors: &[f64], order: usize) -> Result<Vec<f64>> {
    check_order(order, MAX_EXPANSION_ORDER)?;
    check_dim(portfolio, factors)?;
    Ok(cumulants_unchecked(portfolio, factors, order))
}

pub(crate) fn cumulants_unchecked(portfolio: &Portfolio, factors: &[f64], order: usize) -> Vec<f64> {
    let mut total = vec![0.0; order];
    let mut single = vec![0.0; order];
    for loan in portfolio.loans() {
        let e = loan.effective_exposure();
        let (p, q) = default_and_survival(loan, factors);
        bernoulli_cumulants(p, q, &mut single);
        let mut scale = e;
        for (t, k) in total.iter_mut().zip(&single) {
            *t += scale * k;
            scale *= e;
        }
    }
    total
}

/// Charlier coefficients `c_0..c_N` of the normalised variable whose
/// cumulants are `κ₁..κ_N` (`N = cumulants.len() >= 2`).
///
/// `E[He_n(X)]` is the complete Bell polynomial in the cumulants of `X` with
/// `κ₂` reduced by one; after normalisation the first two arguments vanish,
/// so `c_1 = c_2 = 0` exactly.
pub fn charlier_coefficients(cumulants: &[f64]) -> Result<Vec<f64>> {
    if cumulants.len() < 2 {
        return Err(Error::InvalidConfig(
            "at least two cumulants are needed to normalise".into(),
        ));
    }
    let var = cumulants[1];
    if !(var > 0.0) || !var.is_finite() {
        return Err(Error::DegenerateVariance(var));
    }
    let sd = var.sqrt();
    let order = cumulants.len();
    let mut reduced = vec![0.0; order + 1];
    let mut scale = sd * sd;
    for j in 3..=order {
        scale *= sd;
        reduced[j] = cumulants[j - 1] / scale;
    }

    let mut bell = vec![0.0; order + 1];
    bell[0] = 1.0;
    for n in 1..=order {
        let mut acc = 0.0;
        let mut binom = 1.0;
        for k in 1..=n {
            acc += binom * reduced[k] * bell[n - k];
            binom = binom * (n - k) as f64 / k as f64;
        }
        bell[n] = acc;
    }
    let mut factorial = 1.0;
    for (n, b) in bell.iter_mut().enumerate().skip(1) {
        factorial *= n as f64;
        *b /= factorial;
    }
    Ok(bell)
}

/// Everything the pricer needs at one factor point.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalLossStats {
    pub mean: f64,
    pub variance: f64,
    /// κ₁..κ_N.
    pub cumulants: Vec<f64>,
    /// `c_0..c_N`, absent when the variance is zero.
    pub charlier: Option<Vec<f64>>,
}

impl ConditionalLossStats {
    /// Conditional statistics up to expansion order `order` (`1..=10`).
    pub fn compute(portfolio: &Portfolio, factors: &[f64], order: usize) -> Result<Self> {
        check_order(order, MAX_EXPANSION_ORDER)?;
        check_dim(portfolio, factors)?;
        Ok(Self::compute_unchecked(portfolio, factors, order))
    }

    pub(crate) fn compute_unchecked(portfolio: &Portfolio, factors: &[f64], order: usize) -> Self {
        let mut cumulants = cumulants_unchecked(portfolio, factors, order.max(2));
        let (mean, variance) = (cumulants[0], cumulants[1]);
        let charlier = charlier_coefficients(&cumulants).ok().map(|mut c| {
            c.truncate(order + 1);
            c
        });
        cumulants.truncate(order);
        Self {
            mean,
            variance,
            cumulants,
            charlier,
        }
    }

    pub fn sd(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// Truncated Gram-Charlier density of the normalised loss at `x`.
pub fn truncated_density(x: f64, charlier: &[f64]) -> f64 {
    let mut he = vec![0.0; charlier.len()];
    gauss::hermite_he_all(x, &mut he);
    norm_pdf(x) * charlier.iter().zip(&he).map(|(c, h)| c * h).sum::<f64>()
}

/// Distribution function of the truncated density,
/// `Φ(x) - ϕ(x) Σ_{n>=1} c_n He_{n-1}(x)`.
pub fn truncated_cdf(x: f64, charlier: &[f64]) -> f64 {
    let c0 = charlier.first().copied().unwrap_or(0.0);
    if charlier.len() <= 1 {
        return c0 * norm_cdf(x);
    }
    let mut he = vec![0.0; charlier.len() - 1];
    gauss::hermite_he_all(x, &mut he);
    let tail: f64 = charlier[1..].iter().zip(&he).map(|(c, h)| c * h).sum();
    c0 * norm_cdf(x) - norm_pdf(x) * tail
}
