//! Closed-form tradeoff bounds. These are independent of the simulation
//! modules and serve as oracles against them.

use nalgebra::DMatrix;

use crate::attack::{ab_coefficients, TradeoffPoint};
use crate::{Error, Result};

fn check_unit(name: &'static str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::out_of_range(name, x, 0.0, 1.0));
    }
    Ok(())
}

/// `f(x) = √(νx + (1-ν)/N) - √((1-ν)/N) - (√(ν + (1-ν)/N) - √((1-ν)/N)) x`.
///
/// Nonnegative on `[0, 1]`, vanishing only at the endpoints when `ν > 0`. It is
/// the gap between the attack Kraus eigenvalue `√((1-ν)/N + νμ)` and its
/// chord `a + bμ`.
pub fn lemma_f(x: f64, nu: f64, n: usize) -> Result<f64> {
    check_unit("x", x)?;
    let (a, b) = ab_coefficients(nu, n)?;
    let floor = (1.0 - nu) / n as f64;
    Ok((nu * x + floor).sqrt() - a - b * x)
}

/// `1 - F̄` weight for the canonical scheme: `1 - p_max² - (1-p_max)²/(N-1)`.
fn spread(p_max: f64, n: usize) -> f64 {
    1.0 - p_max * p_max - (1.0 - p_max).powi(2) / (n as f64 - 1.0)
}

/// Min-max average fidelity at success probability `p`:
/// `1 - b(ν, N)² [1 - p_max² - (1-p_max)²/(N-1)]`.
pub fn minmax_avg_fidelity(p: f64, p_max: f64, n: usize) -> Result<f64> {
    let t = TradeoffPoint::new(p, p_max, n)?;
    Ok(1.0 - t.b * t.b * spread(p_max, n))
}

/// Lower bound on the min-max conditional fidelity, `(a + b p_max)² / p`.
pub fn minmax_cond_fidelity_bound(p: f64, p_max: f64, n: usize) -> Result<f64> {
    let t = TradeoffPoint::new(p, p_max, n)?;
    if p <= 0.0 {
        return Err(Error::out_of_range("p", p, 0.0, p_max));
    }
    Ok((t.a + t.b * p_max).powi(2) / p)
}

/// `h(x) = [a(ν(x)) + b(ν(x)) p_max]² / x` on `[1/N, p_max]`.
///
/// Coincides with the conditional-fidelity bound as a function of `p`; its
/// concavity for `N ≤ 5` is what makes the bound tight there.
pub fn h_function(x: f64, p_max: f64, n: usize) -> Result<f64> {
    minmax_cond_fidelity_bound(x, p_max, n)
}

/// Both bounds at one point of the tradeoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSet {
    pub minmax_avg_fidelity: f64,
    pub minmax_cond_fidelity_bound: f64,
    /// The conditional bound is attained (equality) at `p = 1/N`,
    /// `p = p_max`, or whenever `N ≤ 5`.
    pub is_cond_bound_tight: bool,
}

impl BoundSet {
    pub fn exceeds_half(&self) -> bool {
        self.minmax_avg_fidelity > 0.5 && self.minmax_cond_fidelity_bound > 0.5
    }
}

pub fn bounds(p: f64, p_max: f64, n: usize) -> Result<BoundSet> {
    let lo = 1.0 / n as f64;
    Ok(BoundSet {
        minmax_avg_fidelity: minmax_avg_fidelity(p, p_max, n)?,
        minmax_cond_fidelity_bound: minmax_cond_fidelity_bound(p, p_max, n)?,
        is_cond_bound_tight: n <= 5 || (p - lo).abs() <= 1e-12 || (p - p_max).abs() <= 1e-12,
    })
}

/// The success probability with `ν = ½`, `p = (p_max N + 1)/(2N)`, and the
/// bounds there.
pub fn insecurity_point(p_max: f64, n: usize) -> Result<(f64, BoundSet)> {
    let nf = n as f64;
    let p = (p_max * nf + 1.0) / (2.0 * nf);
    Ok((p, bounds(p, p_max, n)?))
}

/// Large-`N` limit of [`minmax_avg_fidelity`]: `1 - p(1 - p_max²)/p_max`.
pub fn asymptotic_fidelity(p: f64, p_max: f64) -> Result<f64> {
    check_unit("p_max", p_max)?;
    if !(p > 0.0 && p <= p_max + 1e-12) {
        return Err(Error::out_of_range("p", p, 0.0, p_max));
    }
    Ok(1.0 - p * (1.0 - p_max * p_max) / p_max)
}

/// `p_max² + (1-p_max)²/(N-1)`: the average fidelity at full strength
/// (`p = p_max`).
pub fn full_strength_avg_fidelity(p_max: f64, n: usize) -> f64 {
    p_max * p_max + (1.0 - p_max).powi(2) / (n as f64 - 1.0)
}

/// Joint distribution of the interpolating attack on the canonical scheme:
/// `Pr_ij = [(1-ν)/N + ν tr(Π_j ρ_i)] / N` with `tr(Π_j ρ_i)` equal to
/// `p_max` on the diagonal and `(1-p_max)/(N-1)` off it.
pub fn canonical_joint_distribution(p: f64, p_max: f64, n: usize) -> Result<DMatrix<f64>> {
    let t = TradeoffPoint::new(p, p_max, n)?;
    let nf = n as f64;
    let off = (1.0 - p_max) / (nf - 1.0);
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let hit = if i == j { p_max } else { off };
        ((1.0 - t.nu) / nf + t.nu * hit) / nf
    }))
}

/// Success probability, average fidelity and conditional fidelity of the
/// half-measure/half-guess attack on the canonical scheme.
pub fn mixed_attack_closed_form(p_max: f64, n: usize) -> (f64, f64, f64) {
    let inv = 1.0 / n as f64;
    (
        0.5 * p_max + 0.5 * inv,
        0.5 + 0.5 * full_strength_avg_fidelity(p_max, n),
        (p_max * p_max + inv) / (p_max + inv),
    )
}
