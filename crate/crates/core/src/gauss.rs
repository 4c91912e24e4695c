//! Standard normal special functions, probabilists' Hermite polynomials and
//! Gauss-Hermite quadrature against the standard normal density.
//!
//! Everything here is a pure function of its arguments. [`QuadratureRule`] and
//! [`FactorGrid`] are immutable once built and may be shared freely between
//! threads.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// 1/sqrt(2*pi).
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Highest Hermite degree accepted by [`hermite_he`].
pub const MAX_HERMITE_DEGREE: usize = 50;

/// Highest node count accepted by [`QuadratureRule::gauss_hermite`].
pub const MAX_RULE_ORDER: usize = 256;

/// Largest tensor grid [`FactorGrid::tensor`] will build.
pub const MAX_GRID_POINTS: usize = 10_000_000;

/// Standard normal density.
#[inline]
pub fn norm_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal distribution function Φ(x).
///
/// Evaluated as `erfc(-x/√2)/2`, so the lower tail keeps full relative
/// accuracy down to the subnormal range and saturates to 0 or 1 beyond it.
#[inline]
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail 1 - Φ(x), without cancellation for large `x`.
#[inline]
pub fn norm_sf(x: f64) -> f64 {
    norm_cdf(-x)
}

/// Inverse of the standard normal distribution function.
///
/// Fails with [`Error::DomainError`] unless `0 < u < 1`.
pub fn norm_inv_cdf(u: f64) -> Result<f64> {
    if u > 0.0 && u < 1.0 {
        Ok(inv_cdf_interior(u))
    } else {
        Err(Error::DomainError {
            function: "norm_inv_cdf",
            value: u,
        })
    }
}

/// Φ⁻¹ for `u` already known to lie in (0, 1).
pub(crate) fn inv_cdf_interior(u: f64) -> f64 {
    debug_assert!(u > 0.0 && u < 1.0);
    // Work in the lower half so the refinement targets a tail probability that
    // is represented exactly; 1 - u is exact for u >= 0.5.
    if u > 0.5 {
        return -lower_half_inv(1.0 - u);
    }
    lower_half_inv(u)
}

fn lower_half_inv(p: f64) -> f64 {
    let mut x = acklam(p);
    if x == 0.0 {
        return x;
    }
    // One Halley step: the rational seed is good to ~1e-9 relative and the
    // step is cubically convergent.
    let err = norm_cdf(x) - p;
    let t = err * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    x -= t / (1.0 + 0.5 * x * t);
    x
}

// Acklam's rational approximation; relative error below 1.2e-9.
fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Probabilists' Hermite polynomial He_n(x).
pub fn hermite_he(n: usize, x: f64) -> Result<f64> {
    if n > MAX_HERMITE_DEGREE {
        return Err(Error::OrderTooLarge {
            order: n,
            max: MAX_HERMITE_DEGREE,
        });
    }
    let (mut prev, mut cur) = (1.0, x);
    if n == 0 {
        return Ok(prev);
    }
    for k in 1..n {
        let next = x * cur - k as f64 * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Fills `out[k] = He_k(x)` for every `k < out.len()`.
pub fn hermite_he_all(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = x;
    }
    for k in 2..out.len() {
        out[k] = x * out[k - 1] - (k - 1) as f64 * out[k - 2];
    }
}

/// Gauss-Hermite rule whose weights integrate against the standard normal
/// density: `Σ w_j f(x_j) ≈ E[f(Z)]`, exact for polynomials of degree < 2K.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Builds the `k`-node rule, `1 <= k <= 256`.
    ///
    /// Nodes start as eigenvalues of the Jacobi matrix of the He recurrence and
    /// are then polished by Newton steps on the orthonormal recurrence; weights
    /// come from the Christoffel function. The result is symmetrised and
    /// renormalised so that it is exactly symmetric and sums to one.
    pub fn gauss_hermite(k: usize) -> Result<Self> {
        if k == 0 || k > MAX_RULE_ORDER {
            return Err(Error::OrderOutOfRange(k));
        }
        if k == 1 {
            return Ok(Self {
                nodes: vec![0.0],
                weights: vec![1.0],
            });
        }

        let mut jacobi = DMatrix::<f64>::zeros(k, k);
        for j in 1..k {
            let off = (j as f64).sqrt();
            jacobi[(j - 1, j)] = off;
            jacobi[(j, j - 1)] = off;
        }
        let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
        nodes.sort_by(f64::total_cmp);

        let mut weights = Vec::with_capacity(k);
        for x in nodes.iter_mut() {
            for _ in 0..3 {
                let (psi_k, psi_km1, _) = orthonormal_at(k, *x);
                let step = psi_k / ((k as f64).sqrt() * psi_km1);
                *x -= step;
                if step.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, _, sum_sq) = orthonormal_at(k, *x);
            weights.push(1.0 / sum_sq);
        }

        for j in 0..k / 2 {
            let hi = k - 1 - j;
            let x = 0.5 * (nodes[hi] - nodes[j]);
            let w = 0.5 * (weights[hi] + weights[j]);
            nodes[j] = -x;
            nodes[hi] = x;
            weights[j] = w;
            weights[hi] = w;
        }
        if k % 2 == 1 {
            nodes[k / 2] = 0.0;
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);

        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of nodes K.
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// `Σ w_j f(x_j)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

// Returns (ψ_k(x), ψ_{k-1}(x), Σ_{j<k} ψ_j(x)²) for the orthonormal
// polynomials ψ_j = He_j / sqrt(j!).
fn orthonormal_at(k: usize, x: f64) -> (f64, f64, f64) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut sum_sq = 0.0;
    for j in 0..k {
        sum_sq += cur * cur;
        let next = (x * cur - (j as f64).sqrt() * prev) / ((j + 1) as f64).sqrt();
        prev = cur;
        cur = next;
    }
    (cur, prev, sum_sq)
}

/// Tensor-product quadrature over `m` independent standard normal factors.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorGrid {
    dim: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
}

impl FactorGrid {
    /// Cartesian product of `rule` with itself `m` times.
    pub fn tensor(rule: &QuadratureRule, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidConfig("factor dimension must be positive".into()));
        }
        let k = rule.order();
        let too_large = || Error::GridTooLarge {
            nodes: k,
            dim: m as u32,
            limit: MAX_GRID_POINTS,
        };
        let exp = u32::try_from(m).map_err(|_| too_large())?;
        let size = k
            .checked_pow(exp)
            .filter(|&s| s <= MAX_GRID_POINTS)
            .ok_or_else(too_large)?;

        let mut coords = Vec::with_capacity(size * m);
        let mut weights = Vec::with_capacity(size);
        let mut idx = vec![0usize; m];
        for _ in 0..size {
            let mut w = 1.0;
            for &i in &idx {
                coords.push(rule.nodes[i]);
                w *= rule.weights[i];
            }
            weights.push(w);
            // odometer, last factor fastest
            for slot in idx.iter_mut().rev() {
                *slot += 1;
                if *slot < k {
                    break;
                }
                *slot = 0;
            }
        }
        Ok(Self {
            dim: m,
            coords,
            weights,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, j: usize) -> &[f64] {
        &self.coords[j * self.dim..(j + 1) * self.dim]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Iterates `(point, weight)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.coords
            .chunks_exact(self.dim)
            .zip(self.weights.iter().copied())
    }
}
