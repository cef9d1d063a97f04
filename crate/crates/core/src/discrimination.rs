//! Minimum-error discrimination of the public reduced states.
//!
//! A POVM `{Π_i}` is optimal for the weighted states `{η_i ρ_i}` iff
//!
//! - `Π_k (η_k ρ_k - η_j ρ_j) Π_j = 0` for all `j, k`, and
//! - `Λ - η_j ρ_j ≥ 0` for all `j`, where `Λ = Σ_i η_i ρ_i Π_i`.
//!
//! [`check_optimality`] reports the residuals of both conditions.
//! [`solve_discrimination`] finds an optimal POVM numerically: it seeds with
//! the square-root measurement and iterates the fixed-point map
//! `Π_j ← G⁻¹ (η_j ρ_j Π_j η_j ρ_j) G⁻¹`, `G = (Σ_j η_j ρ_j Π_j η_j ρ_j)^{1/2}`,
//! whose fixed points satisfy `η_j ρ_j Π_j = Λ Π_j`. Convergence is certified
//! by the dual bound `p_max ≤ tr Λ + d · max_j λ_max(η_j ρ_j - Λ)`.

use crate::qcore::{
    c, eigh, hermitize, identity, max_abs, pinv_sqrt, trace_product, CMatrix, DensityMatrix,
    HermitianOp, TOL,
};
use crate::seal::{reduced_states, SealScheme};
use crate::{Error, Result};

/// Positive operators summing to the identity, one per outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<HermitianOp>,
}

impl Povm {
    pub fn new(elements: Vec<HermitianOp>) -> Result<Self> {
        let Some(first) = elements.first() else {
            return Err(Error::Incomplete(f64::INFINITY));
        };
        let d = first.dim();
        let mut sum = -identity(d);
        for e in &elements {
            if e.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: e.dim(),
                });
            }
            let min = e.min_eigenvalue();
            if min < -TOL.psd_clamp {
                return Err(Error::NotPsd(min));
            }
            sum += e.matrix();
        }
        let residual = max_abs(&sum);
        if residual > TOL.completeness {
            return Err(Error::Incomplete(residual));
        }
        Ok(Povm { elements })
    }

    pub fn from_matrices(elements: Vec<CMatrix>) -> Result<Self> {
        Self::new(
            elements
                .into_iter()
                .map(HermitianOp::new)
                .collect::<Result<Vec<_>>>()?,
        )
    }

    /// `{|i><i|}` on a `dim`-dimensional space.
    pub fn computational_basis(dim: usize) -> Self {
        let elements = (0..dim)
            .map(|i| {
                let mut diag = vec![0.0; dim];
                diag[i] = 1.0;
                HermitianOp::from_diagonal(&diag)
            })
            .collect();
        Povm { elements }
    }

    /// `n` copies of `I / n`.
    pub fn uniform(n: usize, dim: usize) -> Self {
        let e = HermitianOp::from_diagonal(&vec![1.0 / n as f64; dim]);
        Povm {
            elements: vec![e; n],
        }
    }

    pub fn elements(&self) -> &[HermitianOp] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    /// Same elements in a different outcome order: outcome `i` of the result
    /// is outcome `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Povm {
            elements: order.iter().map(|&k| self.elements[k].clone()).collect(),
        }
    }
}

/// Weighted public states `η_i ρ_i`.
#[derive(Debug, Clone)]
pub struct Ensemble {
    priors: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl Ensemble {
    pub fn new(priors: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        if priors.len() != states.len() || states.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: priors.len(),
                actual: states.len(),
            });
        }
        let d = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: bad.dim(),
            });
        }
        Ok(Ensemble { priors, states })
    }

    pub fn from_scheme(scheme: &SealScheme) -> Self {
        Ensemble {
            priors: scheme.priors().to_vec(),
            states: reduced_states(scheme),
        }
    }

    pub fn len(&self) -> usize {
        self.priors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.priors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    fn weighted(&self) -> Vec<CMatrix> {
        self.priors
            .iter()
            .zip(&self.states)
            .map(|(&eta, rho)| rho.matrix() * c(eta))
            .collect()
    }

    fn check_povm(&self, povm: &Povm) -> Result<()> {
        if povm.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: povm.dim(),
            });
        }
        if povm.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: povm.len(),
            });
        }
        Ok(())
    }

    /// `Σ_i η_i tr(Π_i ρ_i)`.
    pub fn success_probability(&self, povm: &Povm) -> Result<f64> {
        self.check_povm(povm)?;
        Ok(success_of(&self.weighted(), povm.elements().iter().map(HermitianOp::matrix)))
    }

    pub fn check_optimality(&self, povm: &Povm, tol: f64) -> Result<OptimalityReport> {
        self.check_povm(povm)?;
        let mats: Vec<CMatrix> = povm.elements().iter().map(|e| e.matrix().clone()).collect();
        Ok(optimality_report(&self.weighted(), &mats, tol))
    }
}

fn success_of<'a>(weighted: &[CMatrix], povm: impl Iterator<Item = &'a CMatrix>) -> f64 {
    weighted
        .iter()
        .zip(povm)
        .map(|(w, e)| trace_product(w, e).re)
        .sum()
}

pub fn success_probability(scheme: &SealScheme, povm: &Povm) -> Result<f64> {
    Ensemble::from_scheme(scheme).success_probability(povm)
}

/// Residuals of the two optimality conditions for a candidate POVM.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalityReport {
    /// `[k][j]`: largest entry magnitude of `Π_k (η_k ρ_k - η_j ρ_j) Π_j`.
    pub pairwise_residuals: Vec<Vec<f64>>,
    /// `[j]`: smallest eigenvalue of the Hermitian part of `Λ - η_j ρ_j`.
    pub operator_min_eigs: Vec<f64>,
    pub passed: bool,
    pub tolerance: f64,
}

impl OptimalityReport {
    pub fn max_pairwise_residual(&self) -> f64 {
        self.pairwise_residuals
            .iter()
            .flatten()
            .copied()
            .fold(0.0, f64::max)
    }

    pub fn min_operator_eigenvalue(&self) -> f64 {
        self.operator_min_eigs
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

fn lagrange_operator(weighted: &[CMatrix], povm: &[CMatrix]) -> CMatrix {
    let d = weighted[0].nrows();
    let mut lambda = CMatrix::zeros(d, d);
    for (w, e) in weighted.iter().zip(povm) {
        lambda += w * e;
    }
    lambda
}

fn optimality_report(weighted: &[CMatrix], povm: &[CMatrix], tol: f64) -> OptimalityReport {
    let n = weighted.len();
    let mut pairwise = vec![vec![0.0; n]; n];
    for k in 0..n {
        for j in 0..n {
            if j == k {
                continue;
            }
            let diff = &weighted[k] - &weighted[j];
            pairwise[k][j] = max_abs(&(&povm[k] * diff * &povm[j]));
        }
    }
    let lambda = hermitize(&lagrange_operator(weighted, povm));
    let mins: Vec<f64> = weighted
        .iter()
        .map(|w| eigh(&(&lambda - w)).min())
        .collect();
    let passed = pairwise.iter().flatten().all(|&r| r <= tol) && mins.iter().all(|&m| m >= -tol);
    OptimalityReport {
        pairwise_residuals: pairwise,
        operator_min_eigs: mins,
        passed,
        tolerance: tol,
    }
}

pub fn check_optimality(scheme: &SealScheme, povm: &Povm, tol: f64) -> Result<OptimalityReport> {
    Ensemble::from_scheme(scheme).check_optimality(povm, tol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Largest public dimension accepted.
    pub max_dim: usize,
    pub max_iterations: usize,
    /// Stop once successive success probabilities differ by less than this
    /// and the optimality check passes.
    pub p_tolerance: f64,
    /// Stop once the certified gap `p_max_upper - p` is below this.
    pub gap_tolerance: f64,
    /// Tolerance handed to the optimality checker on the returned POVM.
    pub optimality_tolerance: f64,
    /// Eigenvalue cutoff for pseudo-inverses.
    pub pinv_cutoff: f64,
    /// Evaluate the dual certificate every this many iterations.
    pub check_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_dim: 64,
            max_iterations: 20_000,
            p_tolerance: 1e-12,
            gap_tolerance: 1e-11,
            optimality_tolerance: 1e-6,
            pinv_cutoff: TOL.pinv_cutoff,
            check_every: 10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub povm: Povm,
    pub p_max: f64,
    /// Certified upper bound on the optimum.
    pub p_upper: f64,
    pub iterations: usize,
    pub report: OptimalityReport,
}

/// Square-root measurement `ρ̄^{-1/2} η_i ρ_i ρ̄^{-1/2}` with the kernel of
/// `ρ̄ = Σ η_i ρ_i` shared equally among the outcomes.
pub fn pretty_good_measurement(ensemble: &Ensemble, cutoff: f64) -> Result<Povm> {
    let weighted = ensemble.weighted();
    let mats = sandwich_normalize(&weighted, cutoff)?;
    Povm::from_matrices(mats.into_iter().map(|m| hermitize(&m)).collect())
}

/// `S^{-1/2} X_j S^{-1/2} + P_ker / n` with `S = Σ_j X_j`.
fn sandwich_normalize(terms: &[CMatrix], cutoff: f64) -> Result<Vec<CMatrix>> {
    let d = terms[0].nrows();
    let n = terms.len();
    let mut sum = CMatrix::zeros(d, d);
    for t in terms {
        sum += t;
    }
    let (inv, kernel) = pinv_sqrt(&HermitianOp::from_hermitized(&sum), cutoff)?;
    let share = kernel.matrix() * c(1.0 / n as f64);
    Ok(terms
        .iter()
        .map(|t| hermitize(&(inv.matrix() * t * inv.matrix() + &share)))
        .collect())
}

/// Upper bound on `p_max` from the dual point `Λ + ε I`.
fn dual_upper_bound(weighted: &[CMatrix], povm: &[CMatrix]) -> f64 {
    let lambda = hermitize(&lagrange_operator(weighted, povm));
    let eps = weighted
        .iter()
        .map(|w| eigh(&(w - &lambda)).max())
        .fold(0.0, f64::max);
    lambda.trace().re + lambda.nrows() as f64 * eps
}

/// Orthonormal basis (columns) of the numerical support of `Σ_j terms_j`.
fn support_basis(terms: &[CMatrix], cutoff: f64) -> CMatrix {
    let d = terms[0].nrows();
    let mut sum = CMatrix::zeros(d, d);
    for t in terms {
        sum += t;
    }
    let eig = eigh(&sum);
    let keep: Vec<usize> = (0..d).filter(|&k| eig.values[k] > cutoff).collect();
    CMatrix::from_fn(d, keep.len(), |r, k| eig.vectors[(r, keep[k])])
}

pub fn solve_ensemble(ensemble: &Ensemble, config: &SolverConfig) -> Result<Solution> {
    let d = ensemble.dim();
    let n = ensemble.len();
    if d > config.max_dim {
        return Err(Error::out_of_range(
            "public dimension",
            d as f64,
            1.0,
            config.max_dim as f64,
        ));
    }
    let full = ensemble.weighted();
    // Iterate on the support of the average state; the kernel does not
    // affect the success probability and is shared equally at the end.
    let basis = support_basis(&full, config.pinv_cutoff);
    let rank = basis.ncols();
    let lift = |reduced: &[CMatrix]| -> Vec<CMatrix> {
        let kernel = (identity(d) - &basis * basis.adjoint()) * c(1.0 / n as f64);
        reduced
            .iter()
            .map(|e| hermitize(&(&basis * e * basis.adjoint() + &kernel)))
            .collect()
    };
    if rank == 0 {
        return Err(Error::out_of_range("rank of average state", 0.0, 1.0, d as f64));
    }
    let weighted: Vec<CMatrix> = full
        .iter()
        .map(|w| hermitize(&(basis.adjoint() * w * &basis)))
        .collect();

    let mut povm = sandwich_normalize(&weighted, config.pinv_cutoff)?;
    let mut p = success_of(&weighted, povm.iter());
    let mut upper = dual_upper_bound(&weighted, &povm);
    let mut iterations = 0;

    while upper - p > config.gap_tolerance && iterations < config.max_iterations {
        let terms: Vec<CMatrix> = weighted
            .iter()
            .zip(&povm)
            .map(|(w, e)| hermitize(&(w * e * w)))
            .collect();
        povm = sandwich_normalize(&terms, config.pinv_cutoff * config.pinv_cutoff)?;
        iterations += 1;
        let next = success_of(&weighted, povm.iter());
        let delta = (next - p).abs();
        p = next;
        if iterations % config.check_every == 0 || delta < config.p_tolerance {
            upper = dual_upper_bound(&weighted, &povm);
            if delta < config.p_tolerance
                && optimality_report(&weighted, &povm, config.optimality_tolerance).passed
            {
                break;
            }
        }
    }

    let lifted = lift(&povm);
    let report = optimality_report(&full, &lifted, config.optimality_tolerance);
    if !report.passed {
        return Err(Error::NotConverged {
            iterations,
            best_p: p,
            report: Box::new(report),
        });
    }
    let p = success_of(&full, lifted.iter());
    let povm = Povm::from_matrices(lifted)?;
    Ok(Solution {
        p_max: p,
        p_upper: upper.max(p),
        povm,
        iterations,
        report,
    })
}

/// Optimal discrimination POVM for the scheme's public reduced states.
pub fn solve_discrimination(scheme: &SealScheme, config: &SolverConfig) -> Result<Solution> {
    solve_ensemble(&Ensemble::from_scheme(scheme), config)
}
