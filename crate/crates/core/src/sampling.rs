//! Seeded random states, POVMs and measurement channels.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::attack::MeasurementChannel;
use crate::discrimination::Povm;
use crate::qcore::{c, pinv_sqrt, CMatrix, CVector, Cplx, DensityMatrix, HermitianOp, Ket};
use crate::Result;

pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on `[0, 1)`.
pub fn uniform01(rng: &mut impl Rng) -> f64 {
    rng.random()
}

fn gaussian(rng: &mut impl Rng) -> Cplx {
    Cplx::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Entries i.i.d. complex standard normal.
pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random pure state.
pub fn random_ket(rng: &mut impl Rng, dim: usize) -> Ket {
    let v = CVector::from_fn(dim, |_, _| gaussian(rng));
    Ket::normalized(v).expect("gaussian vector is nonzero")
}

/// Random PSD operator `G G^dag` with `G` of shape `dim x rank`.
pub fn random_psd(rng: &mut impl Rng, dim: usize, rank: usize) -> HermitianOp {
    let g = gaussian_matrix(rng, dim, rank);
    HermitianOp::new(crate::qcore::hermitize(&(&g * g.adjoint()))).expect("G G^dag is Hermitian")
}

/// Random Hermitian matrix with entries of order 1.
pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> HermitianOp {
    let g = gaussian_matrix(rng, dim, dim);
    HermitianOp::new(crate::qcore::hermitize(&g)).expect("hermitized")
}

/// Random density matrix of the given rank.
pub fn random_density_matrix(rng: &mut impl Rng, dim: usize, rank: usize) -> DensityMatrix {
    let m = random_psd(rng, dim, rank).into_matrix();
    let tr = m.trace().re;
    DensityMatrix::new(m / c(tr)).expect("normalized PSD matrix")
}

/// Haar-random unitary (QR of a Gaussian matrix with phase correction).
pub fn random_unitary(rng: &mut impl Rng, dim: usize) -> CMatrix {
    let qr = gaussian_matrix(rng, dim, dim).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0) };
        for row in 0..dim {
            q[(row, k)] *= phase;
        }
    }
    q
}

/// Random POVM `S^{-1/2} A_j S^{-1/2}` with `A_j` random PSD of the given rank.
/// Any kernel of `S` is shared equally among the outcomes.
pub fn random_povm(rng: &mut impl Rng, n_outcomes: usize, dim: usize, rank: usize) -> Povm {
    let parts: Vec<CMatrix> = (0..n_outcomes)
        .map(|_| random_psd(rng, dim, rank).into_matrix())
        .collect();
    let total = parts.iter().fold(CMatrix::zeros(dim, dim), |acc, a| acc + a);
    let (inv, kernel) =
        pinv_sqrt(&HermitianOp::new(crate::qcore::hermitize(&total)).unwrap(), 1e-9)
            .expect("sum of PSD is PSD");
    let share = kernel.matrix() / c(n_outcomes as f64);
    let elements = parts
        .iter()
        .map(|a| crate::qcore::hermitize(&(inv.matrix() * a * inv.matrix() + &share)))
        .collect();
    Povm::from_matrices(elements).expect("normalized random POVM")
}

/// Random projective measurement: the columns of a Haar unitary dealt out
/// round-robin to the outcomes. Outcomes beyond `dim` get the zero operator.
pub fn random_projective_povm(rng: &mut impl Rng, n_outcomes: usize, dim: usize) -> Povm {
    let u = random_unitary(rng, dim);
    let mut elements = vec![CMatrix::zeros(dim, dim); n_outcomes];
    for k in 0..dim {
        let col = u.column(k);
        elements[k % n_outcomes] += col * col.adjoint();
    }
    Povm::from_matrices(elements.iter().map(crate::qcore::hermitize).collect())
        .expect("projectors from a unitary")
}

/// Random complete channel with `kraus_per_outcome` operators per outcome:
/// `Q_jk = G_jk S^{-1/2}` with `S = Σ G^dag G`.
pub fn random_channel(
    rng: &mut impl Rng,
    n_outcomes: usize,
    kraus_per_outcome: usize,
    dim: usize,
) -> MeasurementChannel {
    let raw: Vec<Vec<CMatrix>> = (0..n_outcomes)
        .map(|_| {
            (0..kraus_per_outcome)
                .map(|_| gaussian_matrix(rng, dim, dim))
                .collect()
        })
        .collect();
    normalize_channel(raw).expect("random Kraus set has full-rank S")
}

/// Rescales arbitrary Kraus operators so that they form a complete channel.
pub fn normalize_channel(raw: Vec<Vec<CMatrix>>) -> Result<MeasurementChannel> {
    let dim = raw
        .iter()
        .flatten()
        .next()
        .map(|k| k.nrows())
        .unwrap_or(0);
    let s = raw
        .iter()
        .flatten()
        .fold(CMatrix::zeros(dim, dim), |acc, g| acc + g.adjoint() * g);
    let (inv, _) = pinv_sqrt(&HermitianOp::new(crate::qcore::hermitize(&s))?, 1e-12)?;
    MeasurementChannel::new(
        raw.into_iter()
            .map(|branch| branch.into_iter().map(|g| g * inv.matrix()).collect())
            .collect(),
    )
}

/// Convex mixture of two channels with the same outcome set: Kraus
/// operators `√t K` and `√(1-t) L` side by side.
pub fn mix_channels(
    first: &MeasurementChannel,
    second: &MeasurementChannel,
    t: f64,
) -> Result<MeasurementChannel> {
    let (wa, wb) = (c(t.sqrt()), c((1.0 - t).sqrt()));
    MeasurementChannel::new(
        first
            .outcome_kraus()
            .iter()
            .zip(second.outcome_kraus())
            .map(|(a, b)| {
                a.iter()
                    .map(|k| k * wa)
                    .chain(b.iter().map(|k| k * wb))
                    .collect()
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{identity, max_abs};

    #[test]
    fn generators_are_valid() {
        let mut rng = seeded_rng(7);
        for d in 1..6 {
            let u = random_unitary(&mut rng, d);
            assert!(max_abs(&(u.adjoint() * &u - identity(d))) < 1e-12);
            let _ = random_povm(&mut rng, 3, d, 1);
            let _ = random_projective_povm(&mut rng, 3, d);
            let ch = random_channel(&mut rng, 3, 2, d);
            assert!(ch.completeness_residual() < 1e-12);
            let rho = random_density_matrix(&mut rng, d, d);
            assert!((rho.as_hermitian().trace() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn same_seed_same_draws() {
        let a = random_ket(&mut seeded_rng(3), 4);
        let b = random_ket(&mut seeded_rng(3), 4);
        assert_eq!(a, b);
    }
}
