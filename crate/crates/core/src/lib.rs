//! Expected tranche loss of a loan portfolio under the Gaussian multi-factor
//! default model.
//!
//! Conditional on the systematic factors, defaults are independent, so the
//! portfolio loss is approximated by a normal density or, more accurately, by
//! a Gram-Charlier (Hermite) series built from its exact cumulants. Against
//! either density the tranche payoff integrates in closed form, leaving only
//! a smooth Gaussian integral over the factors, done by Gauss-Hermite
//! quadrature. Monte Carlo and exact-enumeration engines are included as
//! independent references.
//!
//! ```
//! use gauss_tranche::{price_base_curve, PricerConfig, Preset};
//!
//! let portfolio = Preset::Paper125.portfolio();
//! let curve = price_base_curve(&portfolio, &[0.03, 0.07, 0.10, 0.15], &PricerConfig::gaussian())?;
//! assert!(curve.windows(2).all(|w| w[1].value <= w[0].value));
//! # Ok::<(), gauss_tranche::Error>(())
//! ```

pub mod cli;
pub mod conditional;
pub mod error;
pub mod gauss;
pub mod io;
pub mod model;
pub mod oracles;
pub mod pricer;

pub use conditional::{
    charlier_coefficients, conditional_cumulants, conditional_default_prob,
    conditional_mean_variance, ConditionalLossStats,
};
pub use error::{Error, Result};
pub use gauss::{hermite_he, norm_cdf, norm_inv_cdf, norm_pdf, FactorGrid, QuadratureRule};
pub use model::{effective_exposure, preset_portfolio, Loan, LoanRecord, Portfolio, Preset, Tranche, ValidationOptions};
pub use oracles::{conditional_loss_pmf, exact_price, mc_price, McConfig, McResult};
pub use pricer::{
    inner_gaussian, inner_hermite, price_base_curve, price_tranche, price_tranches,
    tranche_profile, Method, PriceResult, PricerConfig,
};
