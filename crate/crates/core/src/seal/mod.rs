//! Sealing schemes: prior probabilities plus one pure sealed state per message
//! over a public register `B` and a private register `A`.
//!
//! The conventional labeling puts messages in non-increasing prior order. That
//! ordering is not enforced here; every quantity computed by this crate is
//! covariant under relabeling.

mod document;

pub use document::{load_scheme, load_scheme_file, save_scheme, save_scheme_file, SchemeDocument};

use crate::qcore::{c, CMatrix, CVector, Cplx, DensityMatrix, HermitianOp, Ket, TOL};
use crate::{Error, Result};

/// Priors and pure sealed states over `B ⊗ A` (basis index `b * dim_private + a`).
#[derive(Debug, Clone, PartialEq)]
pub struct SealScheme {
    priors: Vec<f64>,
    dim_public: usize,
    dim_private: usize,
    states: Vec<Ket>,
}

impl SealScheme {
    pub fn new(
        priors: Vec<f64>,
        dim_public: usize,
        dim_private: usize,
        states: Vec<Ket>,
    ) -> Result<Self> {
        let n = priors.len();
        if n < 2 {
            return Err(Error::InvalidScheme(format!(
                "need at least two messages, got {n}"
            )));
        }
        if states.len() != n {
            return Err(Error::InvalidScheme(format!(
                "{} priors but {} sealed states",
                n,
                states.len()
            )));
        }
        if dim_public == 0 || dim_private == 0 {
            return Err(Error::InvalidScheme("register dimensions must be positive".into()));
        }
        for (index, &value) in priors.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::NonPositivePrior { index, value });
            }
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > TOL.norm {
            return Err(Error::PriorsNotNormalized(total));
        }
        let dim = dim_public * dim_private;
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: bad.dim(),
            });
        }
        Ok(SealScheme {
            priors,
            dim_public,
            dim_private,
            states,
        })
    }

    pub fn n_messages(&self) -> usize {
        self.priors.len()
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn dim_public(&self) -> usize {
        self.dim_public
    }

    pub fn dim_private(&self) -> usize {
        self.dim_private
    }

    pub fn states(&self) -> &[Ket] {
        &self.states
    }

    /// Sealed state `i` reshaped to a `dim_public x dim_private` matrix `Ψ`, so
    /// that `(K ⊗ I)|ψ>` is `K Ψ` and the public reduced state is `Ψ Ψ^dag`.
    pub fn amplitude_matrix(&self, i: usize) -> CMatrix {
        let amp = self.states[i].amplitudes();
        let dp = self.dim_private;
        CMatrix::from_fn(self.dim_public, dp, |b, a| amp[b * dp + a])
    }

    /// `<ψ_i|ψ_j>`.
    pub fn gram_matrix(&self) -> CMatrix {
        let n = self.n_messages();
        CMatrix::from_fn(n, n, |i, j| self.states[i].inner(&self.states[j]))
    }
}

/// Coefficients of the canonical reduced states `ρ_i = c|i><i| + d I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalConstants {
    pub c: f64,
    pub d: f64,
}

fn check_p_max(p_max: f64, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidScheme(format!(
            "need at least two messages, got {n}"
        )));
    }
    let lo = 1.0 / n as f64;
    if !(p_max.is_finite() && p_max >= lo - 1e-12 && p_max <= 1.0) {
        return Err(Error::out_of_range("p_max", p_max, lo, 1.0));
    }
    Ok(())
}

pub fn canonical_constants(p_max: f64, n: usize) -> Result<CanonicalConstants> {
    check_p_max(p_max, n)?;
    let nf = n as f64;
    Ok(CanonicalConstants {
        c: (p_max * nf - 1.0) / (nf - 1.0),
        d: (1.0 - p_max) / (nf - 1.0),
    })
}

/// The most stringent scheme for a given `p_max`: uniform priors and
///
/// `|ψ_i> = √p_max |i>|i>|i> + √((1-p_max)/(N-1)) Σ_{j≠i} |j>|j>|i>`
///
/// with registers ordered `B, A1, A2`, each of dimension `N`.
pub fn canonical_scheme(n: usize, p_max: f64) -> Result<SealScheme> {
    check_p_max(p_max, n)?;
    let p_max = p_max.max(1.0 / n as f64);
    let diag = p_max.sqrt();
    let off = ((1.0 - p_max) / (n as f64 - 1.0)).max(0.0).sqrt();
    let dim_private = n * n;
    let states = (0..n)
        .map(|i| {
            let mut v = CVector::zeros(n * dim_private);
            for j in 0..n {
                let amp = if j == i { diag } else { off };
                v[j * dim_private + j * n + i] = c(amp);
            }
            Ket::from_vector(v)
        })
        .collect::<Result<Vec<_>>>()?;
    SealScheme::new(vec![1.0 / n as f64; n], n, dim_private, states)
}

/// Public reduced states `ρ_i = Tr_A |ψ_i><ψ_i|`.
pub fn reduced_states(scheme: &SealScheme) -> Vec<DensityMatrix> {
    (0..scheme.n_messages())
        .map(|i| {
            let psi = scheme.amplitude_matrix(i);
            let rho = &psi * psi.adjoint();
            DensityMatrix::new(rho).expect("reduced state of a unit ket is a density matrix")
        })
        .collect()
}

/// Closed form of the canonical reduced state for message `i`.
pub fn canonical_reduced_state(n: usize, p_max: f64, i: usize) -> Result<HermitianOp> {
    let k = canonical_constants(p_max, n)?;
    let diag: Vec<f64> = (0..n).map(|j| if j == i { k.c + k.d } else { k.d }).collect();
    Ok(HermitianOp::from_diagonal(&diag))
}

impl SealScheme {
    /// Scheme whose sealed states are the given public pure states, with a
    /// trivial one-dimensional private register.
    pub fn from_public_states(priors: Vec<f64>, states: Vec<Vec<Cplx>>) -> Result<Self> {
        let dim = states.first().map(Vec::len).unwrap_or(0);
        let kets = states.into_iter().map(Ket::new).collect::<Result<Vec<_>>>()?;
        SealScheme::new(priors, dim, 1, kets)
    }
}
