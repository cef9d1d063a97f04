//! Reading attacks and the metrics that score them.
//!
//! Every metric is evaluated on the purified sealed states: a Kraus operator
//! `K` acting on the public register is applied as `K ⊗ I` to the full
//! `B ⊗ A` vector, never to the reduced state alone.

use nalgebra::DMatrix;

use crate::discrimination::Povm;
use crate::qcore::{c, completeness_residual, identity, operator_sqrt, CMatrix, HermitianOp, TOL};
use crate::seal::{canonical_scheme, SealScheme};
use crate::{Error, Result};

/// Kraus operators grouped by classical outcome: branch `j` maps
/// `ρ ↦ Σ_k Q_jk ρ Q_jk^dag`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementChannel {
    outcome_kraus: Vec<Vec<CMatrix>>,
}

impl MeasurementChannel {
    pub fn new(outcome_kraus: Vec<Vec<CMatrix>>) -> Result<Self> {
        let all: Vec<CMatrix> = outcome_kraus.iter().flatten().cloned().collect();
        let Some(first) = all.first() else {
            return Err(Error::Incomplete(f64::INFINITY));
        };
        let d = first.nrows();
        if let Some(bad) = all.iter().find(|k| k.nrows() != d || k.ncols() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: bad.nrows().max(bad.ncols()),
            });
        }
        let residual = completeness_residual(&all);
        if residual > TOL.completeness {
            return Err(Error::Incomplete(residual));
        }
        Ok(MeasurementChannel { outcome_kraus })
    }

    /// One Kraus operator per outcome.
    pub fn from_single_kraus(kraus: Vec<CMatrix>) -> Result<Self> {
        Self::new(kraus.into_iter().map(|k| vec![k]).collect())
    }

    pub fn outcome_kraus(&self) -> &[Vec<CMatrix>] {
        &self.outcome_kraus
    }

    pub fn n_outcomes(&self) -> usize {
        self.outcome_kraus.len()
    }

    pub fn dim(&self) -> usize {
        self.outcome_kraus
            .iter()
            .flatten()
            .next()
            .map(|k| k.nrows())
            .unwrap_or(0)
    }

    pub fn completeness_residual(&self) -> f64 {
        let all: Vec<CMatrix> = self.outcome_kraus.iter().flatten().cloned().collect();
        completeness_residual(&all)
    }

    /// The POVM elements `Σ_k Q_jk^dag Q_jk`.
    pub fn effects(&self) -> Vec<CMatrix> {
        let d = self.dim();
        self.outcome_kraus
            .iter()
            .map(|branch| {
                branch
                    .iter()
                    .fold(CMatrix::zeros(d, d), |acc, k| acc + k.adjoint() * k)
            })
            .collect()
    }
}

/// Attack strength `ν = (pN - 1)/(p_max N - 1)`.
///
/// `ν = 0` is a blind guess, `ν = 1` is full optimal discrimination.
pub fn nu(p: f64, p_max: f64, n: usize) -> Result<f64> {
    let nf = n as f64;
    let lo = 1.0 / nf;
    if !(p_max.is_finite() && p_max <= 1.0 && p_max >= lo - 1e-12) {
        return Err(Error::out_of_range("p_max", p_max, lo, 1.0));
    }
    if p_max * nf - 1.0 <= 1e-12 {
        return Err(Error::DegenerateScheme);
    }
    if !(p.is_finite() && p >= lo - 1e-12 && p <= p_max + 1e-12) {
        return Err(Error::out_of_range("p", p, lo, p_max));
    }
    Ok(((p * nf - 1.0) / (p_max * nf - 1.0)).clamp(0.0, 1.0))
}

fn check_nu(nu: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&nu) {
        return Err(Error::out_of_range("nu", nu, 0.0, 1.0));
    }
    Ok(())
}

/// `a = √((1-ν)/N)` and `b = √(ν + (1-ν)/N) - a`.
pub fn ab_coefficients(nu: f64, n: usize) -> Result<(f64, f64)> {
    check_nu(nu)?;
    if n < 2 {
        return Err(Error::out_of_range("N", n as f64, 2.0, f64::INFINITY));
    }
    let floor = (1.0 - nu) / n as f64;
    let a = floor.sqrt();
    Ok((a, (nu + floor).sqrt() - a))
}

/// Parameters of one point on the tradeoff curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffPoint {
    pub n: usize,
    pub p_max: f64,
    pub p: f64,
    pub nu: f64,
    pub a: f64,
    pub b: f64,
}

impl TradeoffPoint {
    pub fn new(p: f64, p_max: f64, n: usize) -> Result<Self> {
        let nu = nu(p, p_max, n)?;
        let (a, b) = ab_coefficients(nu, n)?;
        Ok(TradeoffPoint {
            n,
            p_max,
            p,
            nu,
            a,
            b,
        })
    }
}

/// `M_i = √((1-ν)/N · I + ν Π_i)` with `N` the number of POVM outcomes.
pub fn build_attack(povm: &Povm, nu: f64) -> Result<MeasurementChannel> {
    check_nu(nu)?;
    let n = povm.len() as f64;
    let d = povm.dim();
    let kraus = povm
        .elements()
        .iter()
        .map(|pi| {
            let arg = identity(d) * c((1.0 - nu) / n) + pi.matrix() * c(nu);
            operator_sqrt(&HermitianOp::new(arg)?).map(HermitianOp::into_matrix)
        })
        .collect::<Result<Vec<_>>>()?;
    MeasurementChannel::from_single_kraus(kraus)
}

/// Measure with `Π` half the time, otherwise leave the state alone and
/// announce a uniformly random outcome.
///
/// Branch `j` has Kraus operators `√½ · √Π_j` and `√(1/(2N)) · I`.
pub fn he_mixed_attack(povm: &Povm) -> Result<MeasurementChannel> {
    let n = povm.len() as f64;
    let d = povm.dim();
    let guess = identity(d) * c((0.5 / n).sqrt());
    let branches = povm
        .elements()
        .iter()
        .map(|pi| {
            let root = operator_sqrt(pi)?.into_matrix() * c(0.5f64.sqrt());
            Ok(vec![root, guess.clone()])
        })
        .collect::<Result<Vec<_>>>()?;
    MeasurementChannel::new(branches)
}

/// An asymmetric diagonal channel on `canonical(8, 0.9)` with success
/// probability `0.3`: outcomes `0..=5` use
/// `3(2√47|i><i| + √13 Σ_{j≠i}|j><j|)/(15√31)`, outcomes `6, 7` use
/// `(2√109|i><i| + 3√29 Σ_{j≠i}|j><j|)/(5√31)`.
pub fn asymmetric_counterexample() -> (SealScheme, MeasurementChannel) {
    let scheme = canonical_scheme(8, 0.9).expect("valid canonical parameters");
    let s31 = 31f64.sqrt();
    let light = (6.0 * 47f64.sqrt() / (15.0 * s31), 3.0 * 13f64.sqrt() / (15.0 * s31));
    let heavy = (2.0 * 109f64.sqrt() / (5.0 * s31), 3.0 * 29f64.sqrt() / (5.0 * s31));
    let kraus = (0..8)
        .map(|i| {
            let (on, off) = if i < 6 { light } else { heavy };
            let diag: Vec<f64> = (0..8).map(|j| if j == i { on } else { off }).collect();
            HermitianOp::from_diagonal(&diag).into_matrix()
        })
        .collect();
    let channel =
        MeasurementChannel::from_single_kraus(kraus).expect("counterexample channel is complete");
    (scheme, channel)
}

/// Per `(message i, outcome j)`: `tr L_j(|ψ_i><ψ_i|)` and
/// `<ψ_i| L_j(|ψ_i><ψ_i|) |ψ_i>`, both unweighted by priors.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BranchStat {
    pub probability: f64,
    pub fidelity: f64,
}

fn check_compatible(scheme: &SealScheme, channel: &MeasurementChannel) -> Result<()> {
    if channel.dim() != scheme.dim_public() {
        return Err(Error::DimensionMismatch {
            expected: scheme.dim_public(),
            actual: channel.dim(),
        });
    }
    Ok(())
}

/// Applies every branch to every sealed state on `B ⊗ A`.
pub fn branch_statistics(
    scheme: &SealScheme,
    channel: &MeasurementChannel,
) -> Result<Vec<Vec<BranchStat>>> {
    check_compatible(scheme, channel)?;
    Ok((0..scheme.n_messages())
        .map(|i| {
            let psi = scheme.amplitude_matrix(i);
            channel
                .outcome_kraus()
                .iter()
                .map(|branch| {
                    branch.iter().fold(BranchStat::default(), |acc, k| {
                        // (K ⊗ I)|ψ> reshaped
                        let out = k * &psi;
                        BranchStat {
                            probability: acc.probability + out.norm_squared(),
                            fidelity: acc.fidelity + psi.dotc(&out).norm_sqr(),
                        }
                    })
                })
                .collect()
        })
        .collect())
}

fn check_outcomes_match(scheme: &SealScheme, channel: &MeasurementChannel) -> Result<()> {
    if channel.n_outcomes() != scheme.n_messages() {
        return Err(Error::DimensionMismatch {
            expected: scheme.n_messages(),
            actual: channel.n_outcomes(),
        });
    }
    Ok(())
}

/// `Pr_ij = η_i tr[(L_j ⊗ I)(|ψ_i><ψ_i|)]`.
pub fn outcome_probabilities(
    scheme: &SealScheme,
    channel: &MeasurementChannel,
) -> Result<DMatrix<f64>> {
    let stats = branch_statistics(scheme, channel)?;
    Ok(joint_from_stats(scheme.priors(), &stats))
}

fn joint_from_stats(priors: &[f64], stats: &[Vec<BranchStat>]) -> DMatrix<f64> {
    let cols = stats.first().map(Vec::len).unwrap_or(0);
    DMatrix::from_fn(priors.len(), cols, |i, j| priors[i] * stats[i][j].probability)
}

/// Mutual information in bits between message and outcome.
///
/// `joint` must be nonnegative with total 1 and row sums equal to `priors`
/// (within 1e-9). `0 log 0` terms are 0.
pub fn mutual_information(joint: &DMatrix<f64>, priors: &[f64]) -> Result<f64> {
    if joint.nrows() != priors.len() {
        return Err(Error::DimensionMismatch {
            expected: priors.len(),
            actual: joint.nrows(),
        });
    }
    if let Some(&bad) = joint.iter().find(|&&x| x.is_nan() || x < -1e-15) {
        return Err(Error::out_of_range("joint probability", bad, 0.0, 1.0));
    }
    let total: f64 = joint.iter().sum();
    if (total - 1.0).abs() > TOL.norm {
        return Err(Error::PriorsNotNormalized(total));
    }
    for (i, &eta) in priors.iter().enumerate() {
        let row: f64 = joint.row(i).iter().sum();
        if (row - eta).abs() > TOL.norm {
            return Err(Error::PriorsNotNormalized(row));
        }
    }
    let xlogx = |x: f64| if x > 0.0 { x * x.log2() } else { 0.0 };
    let h_rows: f64 = -priors.iter().map(|&x| xlogx(x)).sum::<f64>();
    let h_cols: f64 = -joint
        .column_iter()
        .map(|col| xlogx(col.iter().sum()))
        .sum::<f64>();
    let h_joint: f64 = -joint.iter().map(|&x| xlogx(x)).sum::<f64>();
    Ok((h_rows + h_cols - h_joint).max(0.0))
}

fn avg_fidelity_from_stats(priors: &[f64], stats: &[Vec<BranchStat>]) -> f64 {
    priors
        .iter()
        .zip(stats)
        .map(|(&eta, row)| eta * row.iter().map(|s| s.fidelity).sum::<f64>())
        .sum()
}

fn cond_fidelity_from_stats(priors: &[f64], stats: &[Vec<BranchStat>]) -> f64 {
    priors
        .iter()
        .enumerate()
        .map(|(i, &eta)| {
            let s = stats[i][i];
            if s.probability <= TOL.zero_probability {
                0.0
            } else {
                eta * s.fidelity / s.probability
            }
        })
        .sum()
}

/// `F̄ = Σ_i η_i <ψ_i| (E ⊗ I)(|ψ_i><ψ_i|) |ψ_i>`.
pub fn average_fidelity(scheme: &SealScheme, channel: &MeasurementChannel) -> Result<f64> {
    let stats = branch_statistics(scheme, channel)?;
    Ok(avg_fidelity_from_stats(scheme.priors(), &stats))
}

/// Fidelity conditioned on a correct guess:
/// `Σ_i η_i <ψ_i|L_i(ψ_i)|ψ_i> / tr L_i(ψ_i)`, with zero-probability terms
/// counted as 0.
pub fn conditional_fidelity(scheme: &SealScheme, channel: &MeasurementChannel) -> Result<f64> {
    check_outcomes_match(scheme, channel)?;
    let stats = branch_statistics(scheme, channel)?;
    Ok(cond_fidelity_from_stats(scheme.priors(), &stats))
}

/// Every metric of one attack on one scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackReport {
    pub joint: DMatrix<f64>,
    /// Probability of guessing the message correctly, `Σ_i Pr_ii`.
    pub p: f64,
    pub mutual_information_bits: f64,
    pub avg_fidelity: f64,
    pub cond_fidelity: f64,
}

pub fn evaluate(scheme: &SealScheme, channel: &MeasurementChannel) -> Result<AttackReport> {
    check_outcomes_match(scheme, channel)?;
    let stats = branch_statistics(scheme, channel)?;
    let priors = scheme.priors();
    let joint = joint_from_stats(priors, &stats);
    Ok(AttackReport {
        p: joint.diagonal().sum(),
        mutual_information_bits: mutual_information(&joint, priors)?,
        avg_fidelity: avg_fidelity_from_stats(priors, &stats),
        cond_fidelity: cond_fidelity_from_stats(priors, &stats),
        joint,
    })
}

/// Success probability of an arbitrary channel, `Σ_i Pr_ii`.
pub fn channel_success_probability(
    scheme: &SealScheme,
    channel: &MeasurementChannel,
) -> Result<f64> {
    check_outcomes_match(scheme, channel)?;
    Ok(outcome_probabilities(scheme, channel)?.diagonal().sum())
}
