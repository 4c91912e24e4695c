//! Loans, portfolios and tranches of the Gaussian multi-factor default model.
//!
//! Loan `i` defaults when `Σ_k w_ik φ_k + sqrt(1 - Σ_k w_ik²) ε_i < Φ⁻¹(p_i)`
//! with independent standard normal systematic factors `φ_k` and idiosyncratic
//! shocks `ε_i`; on default the portfolio loses `f_i (1 - r_i)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gauss;

/// Tolerance on `|Σ f_i - 1|` when the notional fractions must sum to one.
pub const NOTIONAL_SUM_TOLERANCE: f64 = 1e-9;

/// Unvalidated loan parameters, as read from a file or built by hand.
#[derive(Debug, Clone, PartialEq)]
pub struct LoanRecord {
    pub id: String,
    /// Fraction of the portfolio notional.
    pub notional: f64,
    /// Unconditional default probability.
    pub default_prob: f64,
    pub recovery: f64,
    /// Factor loadings, one per systematic factor.
    pub loadings: Vec<f64>,
}

impl LoanRecord {
    pub fn new(
        id: impl Into<String>,
        notional: f64,
        default_prob: f64,
        recovery: f64,
        loadings: Vec<f64>,
    ) -> Self {
        Self {
            id: id.into(),
            notional,
            default_prob,
            recovery,
            loadings,
        }
    }
}

/// A validated loan. Immutable; carries the derived default threshold and
/// idiosyncratic scale so the pricers never recompute them.
#[derive(Debug, Clone, PartialEq)]
pub struct Loan {
    record: LoanRecord,
    threshold: f64,
    idio_scale: f64,
}

impl Loan {
    /// Validates a single loan record (without a dimension check).
    pub fn new(record: LoanRecord) -> Result<Self> {
        let LoanRecord {
            id,
            notional,
            default_prob,
            recovery,
            loadings,
        } = &record;
        let out_of_range = |field, value, expected| Error::FieldOutOfRange {
            id: id.clone(),
            field,
            value,
            expected,
        };
        if !(*notional > 0.0 && *notional <= 1.0) {
            return Err(out_of_range("f", *notional, "0 < f <= 1"));
        }
        if !(*default_prob > 0.0 && *default_prob < 1.0) {
            return Err(out_of_range("p", *default_prob, "0 < p < 1"));
        }
        if !(*recovery >= 0.0 && *recovery < 1.0) {
            return Err(out_of_range("r", *recovery, "0 <= r < 1"));
        }
        if let Some(&w) = loadings.iter().find(|w| !(w.abs() < 1.0)) {
            return Err(out_of_range("w", w, "-1 < w < 1"));
        }
        let norm_sq: f64 = loadings.iter().map(|w| w * w).sum();
        if norm_sq >= 1.0 {
            return Err(Error::LoadingNormTooLarge {
                id: id.clone(),
                norm_sq,
            });
        }
        let threshold = gauss::inv_cdf_interior(*default_prob);
        Ok(Self {
            threshold,
            idio_scale: (1.0 - norm_sq).sqrt(),
            record,
        })
    }

    pub fn id(&self) -> &str {
        &self.record.id
    }

    pub fn notional(&self) -> f64 {
        self.record.notional
    }

    pub fn default_prob(&self) -> f64 {
        self.record.default_prob
    }

    pub fn recovery(&self) -> f64 {
        self.record.recovery
    }

    pub fn loadings(&self) -> &[f64] {
        &self.record.loadings
    }

    pub fn record(&self) -> &LoanRecord {
        &self.record
    }

    /// Loss given default as a fraction of the portfolio, `f (1 - r)`.
    pub fn effective_exposure(&self) -> f64 {
        self.record.notional * (1.0 - self.record.recovery)
    }

    /// Default threshold Φ⁻¹(p).
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Coefficient of the idiosyncratic shock, `sqrt(1 - Σ w²)`.
    pub fn idiosyncratic_scale(&self) -> f64 {
        self.idio_scale
    }

    /// `Σ_k w_k φ_k`.
    pub fn systematic(&self, factors: &[f64]) -> f64 {
        self.record
            .loadings
            .iter()
            .zip(factors)
            .map(|(w, x)| w * x)
            .sum()
    }
}

/// Free-function form of [`Loan::effective_exposure`].
pub fn effective_exposure(loan: &Loan) -> f64 {
    loan.effective_exposure()
}

/// Switches for [`Portfolio::validate`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidationOptions {
    /// Accept `Σ f <= 1` instead of requiring `Σ f = 1`.
    pub allow_partial_notional: bool,
}

/// A validated, immutable collection of loans sharing `m` systematic factors.
#[derive(Debug, Clone, PartialEq)]
pub struct Portfolio {
    loans: Vec<Loan>,
    factors: usize,
}

impl Portfolio {
    /// Validates with the default options (fractions must sum to one).
    pub fn new(records: Vec<LoanRecord>, factors: usize) -> Result<Self> {
        Self::validate(records, factors, ValidationOptions::default())
    }

    pub fn validate(
        records: Vec<LoanRecord>,
        factors: usize,
        opts: ValidationOptions,
    ) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyPortfolio);
        }
        if factors == 0 {
            return Err(Error::InvalidConfig("factor dimension must be positive".into()));
        }
        let mut loans = Vec::with_capacity(records.len());
        for rec in records {
            if rec.loadings.len() != factors {
                return Err(Error::DimensionMismatch {
                    id: rec.id,
                    expected: factors,
                    found: rec.loadings.len(),
                });
            }
            loans.push(Loan::new(rec)?);
        }
        let sum: f64 = loans.iter().map(Loan::notional).sum();
        let ok = if opts.allow_partial_notional {
            sum <= 1.0 + NOTIONAL_SUM_TOLERANCE
        } else {
            (sum - 1.0).abs() <= NOTIONAL_SUM_TOLERANCE
        };
        if !ok {
            return Err(Error::FractionSumMismatch {
                sum,
                tolerance: NOTIONAL_SUM_TOLERANCE,
            });
        }
        Ok(Self { loans, factors })
    }

    pub fn loans(&self) -> &[Loan] {
        &self.loans
    }

    pub fn len(&self) -> usize {
        self.loans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loans.is_empty()
    }

    /// Number of systematic factors `m`.
    pub fn factors(&self) -> usize {
        self.factors
    }

    /// `Σ_i f_i (1 - r_i)`, the largest attainable loss.
    pub fn max_loss(&self) -> f64 {
        self.loans.iter().map(Loan::effective_exposure).sum()
    }

    /// Unconditional expected loss `Σ_i f_i (1 - r_i) p_i`.
    pub fn expected_loss(&self) -> f64 {
        self.loans
            .iter()
            .map(|l| l.effective_exposure() * l.default_prob())
            .sum()
    }

    /// The first `n` loans with notionals rescaled to sum to one.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyPortfolio);
        }
        let head = &self.loans[..n.min(self.loans.len())];
        let total: f64 = head.iter().map(Loan::notional).sum();
        let records = head
            .iter()
            .map(|l| LoanRecord {
                notional: l.notional() / total,
                ..l.record().clone()
            })
            .collect();
        Self::new(records, self.factors)
    }
}

/// A loss slice `[attach, detach]` of the portfolio notional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tranche {
    attach: f64,
    detach: f64,
}

impl Tranche {
    pub fn new(attach: f64, detach: f64) -> Result<Self> {
        if attach >= 0.0 && attach < detach && detach <= 1.0 {
            Ok(Self { attach, detach })
        } else {
            Err(Error::InvalidTranche { attach, detach })
        }
    }

    /// Base tranche `[0, detach]`.
    pub fn base(detach: f64) -> Result<Self> {
        Self::new(0.0, detach)
    }

    pub fn attach(&self) -> f64 {
        self.attach
    }

    pub fn detach(&self) -> f64 {
        self.detach
    }

    pub fn width(&self) -> f64 {
        self.detach - self.attach
    }
}

/// Built-in single-factor test portfolios: `n` equally weighted names with
/// default probabilities rising linearly from 1.5% to 6.5% while recovery and
/// loading fall linearly from 0.5 to 0.4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Paper125,
    Paper25,
    Paper30,
    Paper50,
    Paper100,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Paper125,
        Preset::Paper25,
        Preset::Paper30,
        Preset::Paper50,
        Preset::Paper100,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Paper125 => "paper125",
            Preset::Paper25 => "paper25",
            Preset::Paper30 => "paper30",
            Preset::Paper50 => "paper50",
            Preset::Paper100 => "paper100",
        }
    }

    /// Number of names.
    pub fn size(self) -> usize {
        match self {
            Preset::Paper125 => 125,
            Preset::Paper25 => 25,
            Preset::Paper30 => 30,
            Preset::Paper50 => 50,
            Preset::Paper100 => 100,
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Preset::Paper125 => "125 names, investment-grade index size, base tranches 3/7/10/15%",
            Preset::Paper25 => "25 names, small index, equity tranche 0-3%",
            Preset::Paper30 => "30 names, small index, equity tranche 0-3%",
            Preset::Paper50 => "50 names, mid-size index, equity tranche 0-3%",
            Preset::Paper100 => "100 names, high-yield index size, equity tranche 0-3%",
        }
    }

    pub fn records(self) -> Vec<LoanRecord> {
        let n = self.size();
        let span = (n - 1) as f64;
        (1..=n)
            .map(|i| {
                let s = (i - 1) as f64 / span;
                LoanRecord::new(
                    format!("loan_{i}"),
                    1.0 / n as f64,
                    0.015 + 0.05 * s,
                    0.5 - 0.1 * s,
                    vec![0.5 - 0.1 * s],
                )
            })
            .collect()
    }

    pub fn portfolio(self) -> Portfolio {
        Portfolio::new(self.records(), 1).expect("preset parameters are valid")
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Looks up a preset by name and builds its portfolio.
pub fn preset_portfolio(name: &str) -> Result<Portfolio> {
    Ok(name.parse::<Preset>()?.portfolio())
}
