//! `counterexample`, `attack` and `scheme-gen`.

use std::path::Path;

use serde::Serialize;

use qseal::attack::{
    asymmetric_counterexample, build_attack, channel_success_probability, conditional_fidelity,
    evaluate, nu,
};
use qseal::discrimination::{solve_discrimination, Povm, SolverConfig};
use qseal::seal::{canonical_scheme, load_scheme_file, save_scheme_file, SealScheme};
use qseal::theory::{bounds, BoundSet};

use crate::CliResult;

pub const PUBLISHED_SYMMETRIC_COND_FIDELITY: f64 = 0.980204;
pub const PUBLISHED_ASYMMETRIC_COND_FIDELITY: f64 = 0.981247;

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub n: usize,
    pub p_max: f64,
    pub p: f64,
    pub symmetric_cond_fidelity: f64,
    pub published_symmetric_cond_fidelity: f64,
    pub asymmetric_cond_fidelity: f64,
    pub published_asymmetric_cond_fidelity: f64,
    pub asymmetric_completeness_residual: f64,
    pub asymmetric_success_probability: f64,
    pub asymmetric_success_residual: f64,
    /// Computed asymmetric value differs from the published one by more
    /// than `1e-4`.
    pub asymmetric_discrepancy: bool,
    /// The asymmetric channel beats the symmetric one, as claimed.
    pub asymmetric_exceeds_symmetric: bool,
}

/// Both channels at `N = 8`, `p_max = 0.9`, `p = 0.3`.
pub fn counterexample() -> CliResult<CounterexampleReport> {
    let (n, p_max, p) = (8, 0.9, 0.3);
    let scheme = canonical_scheme(n, p_max)?;
    let symmetric = build_attack(&Povm::computational_basis(n), nu(p, p_max, n)?)?;
    let sym = conditional_fidelity(&scheme, &symmetric)?;
    let (scheme_a, asym) = asymmetric_counterexample();
    let asym_cond = conditional_fidelity(&scheme_a, &asym)?;
    let asym_p = channel_success_probability(&scheme_a, &asym)?;
    Ok(CounterexampleReport {
        n,
        p_max,
        p,
        symmetric_cond_fidelity: sym,
        published_symmetric_cond_fidelity: PUBLISHED_SYMMETRIC_COND_FIDELITY,
        asymmetric_cond_fidelity: asym_cond,
        published_asymmetric_cond_fidelity: PUBLISHED_ASYMMETRIC_COND_FIDELITY,
        asymmetric_completeness_residual: asym.completeness_residual(),
        asymmetric_success_probability: asym_p,
        asymmetric_success_residual: (asym_p - p).abs(),
        asymmetric_discrepancy: (asym_cond - PUBLISHED_ASYMMETRIC_COND_FIDELITY).abs() > 1e-4,
        asymmetric_exceeds_symmetric: asym_cond > sym,
    })
}

impl CounterexampleReport {
    pub fn render(&self) -> String {
        let mut s = format!(
            "N = {}, p_max = {}, p = {}\n\
             symmetric channel   F_cond = {:.6}  (published {:.6})\n\
             asymmetric channel  F_cond = {:.6}  (published {:.6})\n\
             asymmetric completeness residual = {:.3e}\n\
             asymmetric success probability   = {:.12} (residual {:.3e})\n",
            self.n,
            self.p_max,
            self.p,
            self.symmetric_cond_fidelity,
            self.published_symmetric_cond_fidelity,
            self.asymmetric_cond_fidelity,
            self.published_asymmetric_cond_fidelity,
            self.asymmetric_completeness_residual,
            self.asymmetric_success_probability,
            self.asymmetric_success_residual,
        );
        if self.asymmetric_discrepancy {
            s.push_str(&format!(
                "note: computed asymmetric F_cond differs from the published value by {:.6}; \
                 the asymmetric channel {} the symmetric one\n",
                (self.asymmetric_cond_fidelity - self.published_asymmetric_cond_fidelity).abs(),
                if self.asymmetric_exceeds_symmetric { "beats" } else { "does not beat" },
            ));
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsJson {
    pub minmax_avg_fidelity: f64,
    pub minmax_cond_fidelity_bound: f64,
    pub is_cond_bound_tight: bool,
}

impl From<BoundSet> for BoundsJson {
    fn from(b: BoundSet) -> Self {
        BoundsJson {
            minmax_avg_fidelity: b.minmax_avg_fidelity,
            minmax_cond_fidelity_bound: b.minmax_cond_fidelity_bound,
            is_cond_bound_tight: b.is_cond_bound_tight,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AttackOutput {
    pub n: usize,
    pub p_requested: f64,
    pub p_max: f64,
    pub p_max_upper_bound: f64,
    pub solver_iterations: usize,
    pub max_pairwise_residual: f64,
    pub min_operator_eigenvalue: f64,
    pub nu: f64,
    pub p: f64,
    pub avg_fidelity: f64,
    pub cond_fidelity: f64,
    pub mutual_information_bits: f64,
    pub joint: Vec<Vec<f64>>,
    pub bounds: BoundsJson,
}

/// Load, solve for the optimal measurement, build the attack at `p`, and
/// score it.
pub fn attack(scheme: &SealScheme, p: f64, config: &SolverConfig) -> CliResult<AttackOutput> {
    let n = scheme.n_messages();
    let lo = 1.0 / n as f64;
    if p.is_nan() || p < lo - 1e-9 {
        return Err(qseal::Error::OutOfRange {
            name: "p",
            value: p,
            lo,
            hi: 1.0,
        }
        .into());
    }
    let sol = solve_discrimination(scheme, config)?;
    if p > sol.p_max + 1e-9 {
        return Err(qseal::Error::Unattainable { p, p_max: sol.p_max }.into());
    }
    let p_max = sol.p_max;
    let nu_ = nu(p.min(p_max), p_max, n)?;
    let channel = build_attack(&sol.povm, nu_)?;
    let report = evaluate(scheme, &channel)?;
    let bound_p = p.clamp(lo, p_max);
    Ok(AttackOutput {
        n,
        p_requested: p,
        p_max,
        p_max_upper_bound: sol.p_upper,
        solver_iterations: sol.iterations,
        max_pairwise_residual: sol.report.max_pairwise_residual(),
        min_operator_eigenvalue: sol.report.min_operator_eigenvalue(),
        nu: nu_,
        p: report.p,
        avg_fidelity: report.avg_fidelity,
        cond_fidelity: report.cond_fidelity,
        mutual_information_bits: report.mutual_information_bits,
        joint: report
            .joint
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect(),
        bounds: bounds(bound_p, p_max, n)?.into(),
    })
}

pub fn attack_file(path: &Path, p: f64) -> CliResult<AttackOutput> {
    let scheme = load_scheme_file(path)?;
    attack(&scheme, p, &SolverConfig::default())
}

pub fn scheme_gen(n: usize, p_max: f64, out: &Path) -> CliResult<()> {
    save_scheme_file(&canonical_scheme(n, p_max)?, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counterexample_values() {
        let r = counterexample().unwrap();
        assert!((r.symmetric_cond_fidelity - 0.980_204).abs() < 1e-4);
        assert!(r.asymmetric_completeness_residual <= 1e-12);
        assert!(r.asymmetric_success_residual <= 1e-9);
        assert!(r.render().contains("published 0.981247"));
    }

    #[test]
    fn canonical_attack_pipeline() {
        let s = canonical_scheme(2, 0.9).unwrap();
        let out = attack(&s, 0.7, &SolverConfig::default()).unwrap();
        assert!((out.p - 0.7).abs() < 1e-9);
        assert!((out.avg_fidelity - 0.975_885).abs() < 1e-6);
        assert!((out.mutual_information_bits - 0.118_709).abs() < 1e-6);
        assert!((out.bounds.minmax_avg_fidelity - out.avg_fidelity).abs() < 1e-8);
    }

    #[test]
    fn blind_guess_leaves_state_alone() {
        let s = canonical_scheme(3, 0.8).unwrap();
        let out = attack(&s, 1.0 / 3.0, &SolverConfig::default()).unwrap();
        assert!((out.avg_fidelity - 1.0).abs() < 1e-9);
        assert!((out.cond_fidelity - 1.0).abs() < 1e-9);
        assert!(out.mutual_information_bits.abs() < 1e-9);
    }

    #[test]
    fn unattainable_and_degenerate() {
        let s = canonical_scheme(2, 0.9).unwrap();
        let err = attack(&s, 0.95, &SolverConfig::default()).unwrap_err();
        assert!(err.to_string().contains("requested success probability unattainable"));
        let flat = canonical_scheme(2, 0.5).unwrap();
        assert!(matches!(
            attack(&flat, 0.5, &SolverConfig::default()),
            Err(crate::CliError::Model(qseal::Error::DegenerateScheme))
        ));
    }
}
