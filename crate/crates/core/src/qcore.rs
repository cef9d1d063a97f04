//! Dense complex Hermitian linear algebra and the quantum primitives shared by
//! the rest of the crate.
//!
//! Matrices are stored dense (`nalgebra::DMatrix<Complex64>`). Every object of
//! interest here is `N`- or `N²`-dimensional with `N` at most a few dozen, so
//! no structure is exploited.
//!
//! Validated wrappers:
//!
//! - [`Ket`]: unit vector.
//! - [`HermitianOp`]: Hermitian matrix (elementwise asymmetry within tolerance).
//! - [`DensityMatrix`]: Hermitian, PSD, unit trace.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
pub use num_complex::Complex64 as Cplx;

use crate::{Error, Result};

pub type CMatrix = DMatrix<Cplx>;
pub type CVector = DVector<Cplx>;

/// Numerical tolerances used by validation throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Elementwise `|m[j][k] - conj(m[k][j])|`.
    pub hermitian: f64,
    /// Eigenvalues in `[-psd_clamp, 0)` are clamped to zero; below is an error.
    pub psd_clamp: f64,
    /// `|tr(rho) - 1|` for density matrices.
    pub trace: f64,
    /// `|<psi|psi> - 1|` for kets, and for prior sums.
    pub norm: f64,
    /// Max entry of `sum K^dag K - I` for complete channels and POVMs.
    pub completeness: f64,
    /// Eigenvalues below this are treated as zero when pseudo-inverting.
    pub pinv_cutoff: f64,
    /// Branch probabilities at or below this count as zero.
    pub zero_probability: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermitian: 1e-9,
        psd_clamp: 1e-10,
        trace: 1e-9,
        norm: 1e-9,
        completeness: 1e-9,
        pinv_cutoff: 1e-12,
        zero_probability: 1e-12,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

pub(crate) const TOL: Tolerances = Tolerances::DEFAULT;

#[inline]
pub fn c(re: f64) -> Cplx {
    Cplx::new(re, 0.0)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest elementwise `|m[j][k] - conj(m[k][j])|`.
pub fn hermitian_asymmetry(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for k in j..n {
            worst = worst.max((m[(j, k)] - m[(k, j)].conj()).norm());
        }
    }
    worst
}

/// `(m + m^dag) / 2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5)
}

/// `tr(a b)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Cplx {
    let mut acc = Cplx::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

fn check_finite(m: &CMatrix, what: &'static str) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Columns are the orthonormal eigenvectors matching `values`.
    pub vectors: CMatrix,
}

impl Eigh {
    /// `V diag(f(lambda)) V^dag`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            for r in 0..n {
                scaled[(r, k)] *= w;
            }
        }
        hermitize(&(scaled * self.vectors.adjoint()))
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// Eigendecomposition of the Hermitian part of `m`.
///
/// The caller is responsible for `m` being (numerically) Hermitian; the
/// anti-Hermitian part is discarded.
pub fn eigh(m: &CMatrix) -> Eigh {
    let n = m.nrows();
    let se = SymmetricEigen::new(hermitize(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }
    Eigh { values, vectors }
}

/// A unit vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket(CVector);

impl Ket {
    pub fn new(amplitudes: Vec<Cplx>) -> Result<Self> {
        Self::from_vector(CVector::from_vec(amplitudes))
    }

    pub fn from_vector(v: CVector) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                actual: 0,
            });
        }
        if !v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("ket"));
        }
        let norm2 = v.norm_squared();
        if (norm2 - 1.0).abs() > TOL.norm {
            return Err(Error::StateNotNormalized(norm2));
        }
        Ok(Ket(v))
    }

    /// Rescales a nonzero finite vector to unit norm.
    pub fn normalized(v: CVector) -> Result<Self> {
        let norm = v.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::StateNotNormalized(norm * norm));
        }
        Self::from_vector(v.unscale(norm))
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[index] = c(1.0);
        Ket(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.0
    }

    /// `|psi><psi|`.
    pub fn outer(&self) -> CMatrix {
        &self.0 * self.0.adjoint()
    }

    pub fn inner(&self, other: &Ket) -> Cplx {
        self.0.dotc(&other.0)
    }
}

/// A Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOp(CMatrix);

impl HermitianOp {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square(&m)?;
        check_finite(&m, "operator")?;
        let asym = hermitian_asymmetry(&m);
        if asym > TOL.hermitian {
            return Err(Error::NotHermitian(asym));
        }
        Ok(HermitianOp(m))
    }

    /// Wraps the Hermitian part of `m` without checking it.
    pub(crate) fn from_hermitized(m: &CMatrix) -> Self {
        HermitianOp(hermitize(m))
    }

    pub fn identity(dim: usize) -> Self {
        HermitianOp(identity(dim))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let v = DVector::from_iterator(diag.len(), diag.iter().map(|&x| c(x)));
        HermitianOp(CMatrix::from_diagonal(&v))
    }

    pub fn projector(ket: &Ket) -> Self {
        HermitianOp(ket.outer())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn eigh(&self) -> Eigh {
        eigh(&self.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigh().min()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }
}

/// A Hermitian, positive-semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(HermitianOp);

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        let op = HermitianOp::new(m)?;
        let tr = op.trace();
        if (tr - 1.0).abs() > TOL.trace {
            return Err(Error::TraceNotOne(tr));
        }
        let min = op.min_eigenvalue();
        if min < -TOL.psd_clamp {
            return Err(Error::NotPsd(min));
        }
        Ok(DensityMatrix(op))
    }

    pub fn from_ket(ket: &Ket) -> Self {
        DensityMatrix(HermitianOp::from_hermitized(&ket.outer()))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix(HermitianOp(identity(dim) / c(dim as f64)))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.0.matrix()
    }

    pub fn as_hermitian(&self) -> &HermitianOp {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0.into_matrix()
    }
}

fn clamp_psd(eig: &Eigh) -> Result<()> {
    let min = eig.min();
    if min < -TOL.psd_clamp {
        return Err(Error::NotPsd(min));
    }
    Ok(())
}

/// Principal square root of a PSD operator.
///
/// Computed as a spectral function, so the result does not depend on the
/// eigenbasis chosen inside degenerate eigenspaces. Eigenvalues in
/// `[-1e-10, 0)` are clamped to zero.
pub fn operator_sqrt(m: &HermitianOp) -> Result<HermitianOp> {
    let eig = m.eigh();
    clamp_psd(&eig)?;
    Ok(HermitianOp(eig.map(|x| x.max(0.0).sqrt())))
}

/// Moore-Penrose inverse square root of a PSD operator, together with the
/// projector onto its numerical kernel. Eigenvalues below `cutoff` are zero.
pub fn pinv_sqrt(m: &HermitianOp, cutoff: f64) -> Result<(HermitianOp, HermitianOp)> {
    let eig = m.eigh();
    clamp_psd(&eig)?;
    let inv = eig.map(|x| if x > cutoff { 1.0 / x.sqrt() } else { 0.0 });
    let kernel = eig.map(|x| if x > cutoff { 0.0 } else { 1.0 });
    Ok((HermitianOp(inv), HermitianOp(kernel)))
}

/// Partial trace over the second factor of a `dim_b * dim_a` operator.
///
/// Basis ordering is `|b>|a>` with index `b * dim_a + a`.
pub fn partial_trace(m: &CMatrix, dim_b: usize, dim_a: usize) -> Result<CMatrix> {
    let n = check_square(m)?;
    if n != dim_b * dim_a {
        return Err(Error::DimensionMismatch {
            expected: dim_b * dim_a,
            actual: n,
        });
    }
    Ok(CMatrix::from_fn(dim_b, dim_b, |b, bp| {
        (0..dim_a).map(|a| m[(b * dim_a + a, bp * dim_a + a)]).sum()
    }))
}

/// Reduced state on the public register `B` of a state over `B ⊗ A`.
pub fn partial_trace_private(
    state: &DensityMatrix,
    dim_b: usize,
    dim_a: usize,
) -> Result<DensityMatrix> {
    let reduced = partial_trace(state.matrix(), dim_b, dim_a)?;
    Ok(DensityMatrix(HermitianOp::from_hermitized(&reduced)))
}

/// Max entry of `sum_k K_k^dag K_k - I`.
pub fn completeness_residual(kraus: &[CMatrix]) -> f64 {
    let Some(first) = kraus.first() else {
        return f64::INFINITY;
    };
    let d = first.ncols();
    let mut acc = -identity(d);
    for k in kraus {
        if k.ncols() != d {
            return f64::INFINITY;
        }
        acc += k.adjoint() * k;
    }
    max_abs(&acc)
}

/// Output of applying a (possibly incomplete) set of Kraus operators.
#[derive(Debug, Clone)]
pub struct BranchOutput {
    pub state: CMatrix,
    pub trace: f64,
}

/// `sum_k (K_k ⊗ I) rho (K_k^dag ⊗ I)` for an arbitrary Kraus subset.
///
/// With `extend_identity_on_private`, the Kraus operators act on the leading
/// factor of `rho` and the identity on the remaining factor, whose dimension
/// is inferred. The result is positive but not normalized.
pub fn apply_branch(
    kraus: &[CMatrix],
    rho: &CMatrix,
    extend_identity_on_private: bool,
) -> Result<BranchOutput> {
    let n = check_square(rho)?;
    let Some(first) = kraus.first() else {
        return Ok(BranchOutput {
            state: CMatrix::zeros(n, n),
            trace: 0.0,
        });
    };
    let d = check_square(first)?;
    let dim_a = if extend_identity_on_private {
        if n % d != 0 {
            return Err(Error::DimensionMismatch {
                expected: d * (n / d).max(1),
                actual: n,
            });
        }
        n / d
    } else {
        if n != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: n,
            });
        }
        1
    };

    let mut out = CMatrix::zeros(n, n);
    for k in kraus {
        if k.nrows() != d || k.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: k.nrows(),
            });
        }
        // left = (K ⊗ I) rho
        let mut left = CMatrix::zeros(n, n);
        for col in 0..n {
            for b in 0..d {
                for a in 0..dim_a {
                    let mut acc = Cplx::new(0.0, 0.0);
                    for cc in 0..d {
                        acc += k[(b, cc)] * rho[(cc * dim_a + a, col)];
                    }
                    left[(b * dim_a + a, col)] = acc;
                }
            }
        }
        // out += left (K^dag ⊗ I)
        for row in 0..n {
            for bp in 0..d {
                for a in 0..dim_a {
                    let mut acc = Cplx::new(0.0, 0.0);
                    for cc in 0..d {
                        acc += left[(row, cc * dim_a + a)] * k[(bp, cc)].conj();
                    }
                    out[(row, bp * dim_a + a)] += acc;
                }
            }
        }
    }
    let trace = out.trace().re;
    Ok(BranchOutput { state: out, trace })
}

/// Applies a complete channel, `sum_k K_k^dag K_k = I`, and returns the
/// resulting density matrix.
pub fn apply_channel(
    kraus: &[CMatrix],
    rho: &DensityMatrix,
    extend_identity_on_private: bool,
) -> Result<DensityMatrix> {
    let residual = completeness_residual(kraus);
    if residual > TOL.completeness {
        return Err(Error::Incomplete(residual));
    }
    let out = apply_branch(kraus, rho.matrix(), extend_identity_on_private)?;
    Ok(DensityMatrix(HermitianOp::from_hermitized(&out.state)))
}
