//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use gauss_tranche::{LoanRecord, Portfolio, Tranche};

/// splitmix64, enough to generate reproducible test portfolios.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }
}

/// Random single-factor portfolio with `n` loans and notionals summing to one.
pub fn random_portfolio(rng: &mut Rng, n: usize) -> Portfolio {
    random_portfolio_pd(rng, n, 0.02, 0.6)
}

/// As [`random_portfolio`], with default probabilities drawn from `[lo, hi)`.
pub fn random_portfolio_pd(rng: &mut Rng, n: usize, lo: f64, hi: f64) -> Portfolio {
    let raw: Vec<f64> = (0..n).map(|_| rng.uniform(0.5, 1.5)).collect();
    let total: f64 = raw.iter().sum();
    let recs = raw
        .iter()
        .enumerate()
        .map(|(i, f)| {
            LoanRecord::new(
                format!("r{i}"),
                f / total,
                rng.uniform(lo, hi),
                rng.uniform(0.0, 0.7),
                vec![rng.uniform(-0.6, 0.8)],
            )
        })
        .collect();
    Portfolio::new(recs, 1).unwrap()
}

/// He_n from the explicit sum, independent of the three-term recurrence.
pub fn hermite_explicit(n: usize, x: f64) -> f64 {
    let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
    (0..=n / 2)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * fact(n) / (fact(k) * fact(n - 2 * k) * 2f64.powi(k as i32)) * x.powi((n - 2 * k) as i32)
        })
        .sum()
}

/// `E[He_n(L̃)] / n!` for n = 0..=order, straight from a pmf.
pub fn charlier_from_pmf(pmf: &[(f64, f64)], order: usize) -> Vec<f64> {
    let mean: f64 = pmf.iter().map(|(l, p)| l * p).sum();
    let var: f64 = pmf.iter().map(|(l, p)| p * (l - mean).powi(2)).sum();
    let sd = var.sqrt();
    (0..=order)
        .map(|n| {
            let fact: f64 = (1..=n).map(|i| i as f64).product();
            pmf.iter()
                .map(|(l, p)| p * hermite_explicit(n, (l - mean) / sd))
                .sum::<f64>()
                / fact
        })
        .collect()
}

/// Raw moments `E[L̃^j]`, j = 0..=order, of the normalised pmf.
pub fn normalized_moments(pmf: &[(f64, f64)], order: usize) -> Vec<f64> {
    let mean: f64 = pmf.iter().map(|(l, p)| l * p).sum();
    let var: f64 = pmf.iter().map(|(l, p)| p * (l - mean).powi(2)).sum();
    let sd = var.sqrt();
    (0..=order)
        .map(|j| pmf.iter().map(|(l, p)| p * ((l - mean) / sd).powi(j as i32)).sum())
        .collect()
}

const GL5_X: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL5_W: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

fn gl5(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    GL5_X.iter().zip(GL5_W).map(|(x, w)| w * f(c + h * x)).sum::<f64>() * h
}

fn adapt(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (l, r) = (gl5(f, a, m), gl5(f, m, b));
    let err = (l + r - whole).abs();
    if depth == 0 || err <= tol || err <= 1e-15 * (l + r).abs() {
        return l + r;
    }
    adapt(f, a, m, l, tol, depth - 1) + adapt(f, m, b, r, tol, depth - 1)
}

/// Adaptive 5-point Gauss-Legendre on `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    adapt(f, a, b, gl5(f, a, b), tol, 30)
}

fn std_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `∫ Tl(μ + σu) Σ c_n He_n(u) ϕ(u) du` by adaptive quadrature, split at the
/// kinks of the payoff.
pub fn tranche_against_density(t: &Tranche, mean: f64, sd: f64, c: &[f64]) -> f64 {
    let density = |u: f64| std_pdf(u) * c.iter().enumerate().map(|(n, cn)| cn * hermite_explicit(n, u)).sum::<f64>();
    let payoff = |x: f64| ((x - t.attach()).max(0.0)).min(t.width()) / t.width();
    let f = |u: f64| payoff(mean + sd * u) * density(u);
    let lim = 16.0;
    let za = ((t.attach() - mean) / sd).clamp(-lim, lim);
    let zb = ((t.detach() - mean) / sd).clamp(-lim, lim);
    integrate(&f, -lim, za, 1e-15) + integrate(&f, za, zb, 1e-15) + integrate(&f, zb, lim, 1e-15)
}
