//! Randomized search for channels that beat the interpolating attack on a
//! canonical scheme.
//!
//! Uniformly random channels sit near `p = 1/N` with low fidelity, so most
//! samples are drawn close to the optimal family instead: mixtures with the
//! optimal attack, attacks built on a random POVM, and small Kraus
//! perturbations of the optimal attack.

use serde::Serialize;

use qseal::attack::{average_fidelity, build_attack, channel_success_probability, MeasurementChannel};
use qseal::discrimination::Povm;
use qseal::qcore::{c, CMatrix};
use qseal::sampling::{
    gaussian_matrix, mix_channels, normalize_channel, random_channel, random_povm,
    random_projective_povm, seeded_rng, uniform01, SeededRng,
};
use qseal::seal::{canonical_scheme, SealScheme};
use qseal::theory::minmax_avg_fidelity;

use crate::CliResult;

#[derive(Debug, Clone, Serialize)]
pub struct Bin {
    pub p_lo: f64,
    pub p_hi: f64,
    pub samples: usize,
    /// Largest `F̄ - bound(p)` in the bin; `-inf` when empty.
    pub max_excess: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeResult {
    pub n: usize,
    pub p_max: f64,
    pub samples: usize,
    pub max_excess: f64,
    pub bins: Vec<Bin>,
}

/// Closed-form min-max average fidelity, extended by 1 below `p = 1/N`.
fn bound(p: f64, p_max: f64, n: usize) -> f64 {
    let lo = 1.0 / n as f64;
    if p <= lo {
        1.0
    } else {
        minmax_avg_fidelity(p.min(p_max), p_max, n).unwrap_or(1.0)
    }
}

fn draw(rng: &mut SeededRng, n: usize, optimal: &Povm) -> CliResult<MeasurementChannel> {
    let dim = n;
    let family = (uniform01(rng) * 4.0) as usize;
    let ch = match family {
        0 => {
            let kraus = 1 + (uniform01(rng) * 2.0) as usize;
            random_channel(rng, n, kraus, dim)
        }
        1 => {
            let opt = build_attack(optimal, uniform01(rng))?;
            let other = random_channel(rng, n, 1, dim);
            mix_channels(&opt, &other, 1.0 - 0.2 * uniform01(rng))?
        }
        2 => {
            let povm = if uniform01(rng) < 0.5 {
                random_projective_povm(rng, n, dim)
            } else {
                let rank = 1 + (uniform01(rng) * dim as f64) as usize;
                random_povm(rng, n, dim, rank)
            };
            build_attack(&povm, uniform01(rng))?
        }
        _ => {
            let opt = build_attack(optimal, uniform01(rng))?;
            let eps = 0.1 * uniform01(rng);
            let raw: Vec<Vec<CMatrix>> = opt
                .outcome_kraus()
                .iter()
                .map(|branch| {
                    branch
                        .iter()
                        .map(|k| k + gaussian_matrix(rng, dim, dim) * c(eps))
                        .collect()
                })
                .collect();
            normalize_channel(raw)?
        }
    };
    Ok(ch)
}

fn score(scheme: &SealScheme, ch: &MeasurementChannel, p_max: f64, n: usize) -> CliResult<(f64, f64)> {
    let p = channel_success_probability(scheme, ch)?;
    let f = average_fidelity(scheme, ch)?;
    Ok((p, f - bound(p, p_max, n)))
}

pub fn probe_optimality(
    n: usize,
    p_max: f64,
    samples: usize,
    n_bins: usize,
    seed: u64,
) -> CliResult<ProbeResult> {
    let scheme = canonical_scheme(n, p_max)?;
    let optimal = Povm::computational_basis(n);
    let mut rng = seeded_rng(seed);
    let lo = 1.0 / n as f64;
    let width = (p_max - lo) / n_bins as f64;
    let mut bins: Vec<Bin> = (0..n_bins)
        .map(|k| Bin {
            p_lo: lo + width * k as f64,
            p_hi: lo + width * (k + 1) as f64,
            samples: 0,
            max_excess: f64::NEG_INFINITY,
        })
        .collect();
    let mut max_excess = f64::NEG_INFINITY;
    for _ in 0..samples {
        let ch = draw(&mut rng, n, &optimal)?;
        let (p, excess) = score(&scheme, &ch, p_max, n)?;
        max_excess = max_excess.max(excess);
        let k = (((p - lo) / width).floor().max(0.0) as usize).min(n_bins - 1);
        bins[k].samples += 1;
        bins[k].max_excess = bins[k].max_excess.max(excess);
    }
    Ok(ProbeResult { n, p_max, samples, max_excess, bins })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_probe_respects_bound() {
        let r = probe_optimality(3, 0.8, 200, 5, 1).unwrap();
        assert_eq!(r.bins.iter().map(|b| b.samples).sum::<usize>(), 200);
        assert!(r.max_excess <= 1e-6, "{}", r.max_excess);
    }

    #[test]
    fn optimal_attack_scores_zero() {
        let s = canonical_scheme(4, 0.8).unwrap();
        let ch = build_attack(&Povm::computational_basis(4), 0.4).unwrap();
        let (_, e) = score(&s, &ch, 0.8, 4).unwrap();
        assert!(e.abs() <= 1e-12);
    }
}
