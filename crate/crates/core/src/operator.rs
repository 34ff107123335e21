//! Dense multi-qudit operators.
//!
//! Basis states are ordered row-major: `|i_0 i_1 ... i_{n-1}>` has flat index
//! `((i_0 * d_1 + i_1) * d_2 + ...)`, so the last subsystem varies fastest.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Absolute tolerance on `max |M - M^dag|` for an operator to count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// An ordered tensor product of finite-dimensional subsystems.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuditSpace {
    dims: Vec<usize>,
}

impl QuditSpace {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidDims("at least one subsystem required".into()));
        }
        if let Some(&bad) = dims.iter().find(|&&k| k < 2) {
            return Err(Error::InvalidDims(format!(
                "every subsystem needs dimension >= 2, got {bad}"
            )));
        }
        Ok(Self { dims })
    }

    /// `n` copies of a `d`-dimensional system.
    pub fn homogeneous(d: usize, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDims("at least one subsystem required".into()));
        }
        Self::new(vec![d; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// The common local dimension, if all subsystems share one.
    pub fn local_dim(&self) -> Option<usize> {
        let d = self.dims[0];
        self.dims.iter().all(|&k| k == d).then_some(d)
    }

    /// Multi-index of a flat basis index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &k) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % k;
            index /= k;
        }
        out
    }

    /// Flat basis index of a multi-index.
    pub fn flat_index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&i, &k)| acc * k + i)
    }

    fn check_subsystems(&self, subsystems: &[usize]) -> Result<()> {
        let count = self.dims.len();
        match subsystems.iter().find(|&&s| s >= count) {
            Some(&index) => Err(Error::SubsystemOutOfRange { index, count }),
            None => Ok(()),
        }
    }
}

/// A square complex matrix acting on a [`QuditSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    space: QuditSpace,
    matrix: CMatrix,
}

impl DenseOperator {
    pub fn new(space: QuditSpace, matrix: CMatrix) -> Result<Self> {
        let n = space.total_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: format!("{n}x{n}"),
                found: format!("{}x{}", matrix.nrows(), matrix.ncols()),
            });
        }
        Ok(Self { space, matrix })
    }

    /// Like [`DenseOperator::new`] but additionally validates Hermiticity.
    pub fn new_hermitian(space: QuditSpace, matrix: CMatrix) -> Result<Self> {
        let op = Self::new(space, matrix)?;
        op.require_hermitian()?;
        Ok(op)
    }

    pub fn from_fn(space: QuditSpace, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let n = space.total_dim();
        let matrix = CMatrix::from_fn(n, n, f);
        Self { space, matrix }
    }

    pub fn identity(space: QuditSpace) -> Self {
        let n = space.total_dim();
        Self {
            space,
            matrix: CMatrix::identity(n, n),
        }
    }

    pub fn zeros(space: QuditSpace) -> Self {
        let n = space.total_dim();
        Self {
            space,
            matrix: CMatrix::zeros(n, n),
        }
    }

    /// Real diagonal operator on a single subsystem of dimension `diag.len()`.
    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let space = QuditSpace::new(vec![diag.len()])?;
        Ok(Self::from_fn(space, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    /// `|v><v|` on the given space.
    pub fn projector(space: QuditSpace, v: &CVector) -> Result<Self> {
        let m = v * v.adjoint();
        Self::new(space, m)
    }

    pub fn space(&self) -> &QuditSpace {
        &self.space
    }

    pub fn dims(&self) -> &[usize] {
        self.space.dims()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.transpose(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            space: self.space.clone(),
            matrix: &self.matrix * Complex64::new(s, 0.0),
        }
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self {
            space: self.space.clone(),
            matrix: &self.matrix * s,
        }
    }

    /// Matrix product `self * other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// `u * self * u^dag` for a unitary (or any) matrix `u` of matching size.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: format!("{0}x{0}", self.dim()),
                found: format!("{}x{}", u.nrows(), u.ncols()),
            });
        }
        Ok(Self {
            space: self.space.clone(),
            matrix: u * &self.matrix * u.adjoint(),
        })
    }

    /// Hilbert-Schmidt inner product `tr[self^dag other]`.
    pub fn hs_inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same_space(other)?;
        Ok(self.matrix.dotc(&other.matrix))
    }

    /// `tr[self * other]`.
    pub fn trace_product(&self, other: &Self) -> Result<Complex64> {
        self.check_same_space(other)?;
        Ok(self
            .matrix
            .transpose()
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| a * b)
            .sum())
    }

    /// `<v|self|v>`.
    pub fn expectation(&self, v: &CVector) -> Result<Complex64> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim().to_string(),
                found: v.len().to_string(),
            });
        }
        Ok(v.dotc(&(&self.matrix * v)))
    }

    /// Largest entrywise deviation `max |M_ij - conj(M_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= HERMITIAN_TOL
    }

    pub fn require_hermitian(&self) -> Result<()> {
        let defect = self.hermiticity_defect();
        if defect <= HERMITIAN_TOL {
            Ok(())
        } else {
            Err(Error::HermitianRequired { defect })
        }
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Entrywise closeness with matching subsystem layout.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.space == other.space && self.max_abs_diff(other) <= tol
    }

    /// Same matrix, different subsystem split of the same total dimension.
    pub fn reshaped(&self, space: QuditSpace) -> Result<Self> {
        Self::new(space, self.matrix.clone())
    }

    fn check_same_space(&self, other: &Self) -> Result<()> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: format!("{:?}", self.space.dims()),
                found: format!("{:?}", other.space.dims()),
            })
        }
    }
}

// Arithmetic between operators panics on mismatched spaces, like indexing.
fn assert_same(a: &DenseOperator, b: &DenseOperator) {
    assert!(
        a.space == b.space,
        "operator arithmetic on mismatched spaces {:?} and {:?}",
        a.space.dims(),
        b.space.dims()
    );
}

impl Add for &DenseOperator {
    type Output = DenseOperator;
    fn add(self, rhs: &DenseOperator) -> DenseOperator {
        assert_same(self, rhs);
        DenseOperator {
            space: self.space.clone(),
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Add for DenseOperator {
    type Output = DenseOperator;
    fn add(self, rhs: DenseOperator) -> DenseOperator {
        &self + &rhs
    }
}

impl Sub for &DenseOperator {
    type Output = DenseOperator;
    fn sub(self, rhs: &DenseOperator) -> DenseOperator {
        assert_same(self, rhs);
        DenseOperator {
            space: self.space.clone(),
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Sub for DenseOperator {
    type Output = DenseOperator;
    fn sub(self, rhs: DenseOperator) -> DenseOperator {
        &self - &rhs
    }
}

impl Mul<f64> for &DenseOperator {
    type Output = DenseOperator;
    fn mul(self, s: f64) -> DenseOperator {
        self.scale(s)
    }
}

impl Mul<f64> for DenseOperator {
    type Output = DenseOperator;
    fn mul(self, s: f64) -> DenseOperator {
        self.scale(s)
    }
}

impl Neg for &DenseOperator {
    type Output = DenseOperator;
    fn neg(self) -> DenseOperator {
        self.scale(-1.0)
    }
}

/// Kronecker product; the result lives on the concatenated space.
pub fn kron(a: &DenseOperator, b: &DenseOperator) -> DenseOperator {
    let mut dims = a.dims().to_vec();
    dims.extend_from_slice(b.dims());
    DenseOperator {
        space: QuditSpace { dims },
        matrix: a.matrix.kronecker(&b.matrix),
    }
}

/// Kronecker product of a list of operators, left to right.
pub fn kron_all(ops: &[DenseOperator]) -> Option<DenseOperator> {
    let (first, rest) = ops.split_first()?;
    Some(rest.iter().fold(first.clone(), |acc, op| kron(&acc, op)))
}

/// Traces out every subsystem not listed in `keep`.
///
/// The kept subsystems appear in their original order regardless of the
/// order given in `keep`.
pub fn partial_trace(m: &DenseOperator, keep: &[usize]) -> Result<DenseOperator> {
    let space = m.space();
    space.check_subsystems(keep)?;
    if keep.is_empty() {
        return Err(Error::InvalidDims("keep must name at least one subsystem".into()));
    }
    let n = space.num_subsystems();
    let mut kept = vec![false; n];
    for &k in keep {
        kept[k] = true;
    }
    let kept_dims: Vec<usize> = (0..n).filter(|&k| kept[k]).map(|k| space.dims()[k]).collect();
    let traced_dims: Vec<usize> = (0..n).filter(|&k| !kept[k]).map(|k| space.dims()[k]).collect();
    let kept_total: usize = kept_dims.iter().product();
    let traced_total: usize = traced_dims.iter().product();

    // groups[t][a] = flat index whose traced digits encode t and kept digits encode a
    let mut groups = vec![vec![0usize; kept_total]; traced_total];
    for full in 0..space.total_dim() {
        let digits = space.digits(full);
        let (mut a, mut t) = (0, 0);
        for k in 0..n {
            if kept[k] {
                a = a * space.dims()[k] + digits[k];
            } else {
                t = t * space.dims()[k] + digits[k];
            }
        }
        groups[t][a] = full;
    }

    let src = m.matrix();
    let mut out = CMatrix::zeros(kept_total, kept_total);
    for g in &groups {
        for (a, &ia) in g.iter().enumerate() {
            for (b, &ib) in g.iter().enumerate() {
                out[(a, b)] += src[(ia, ib)];
            }
        }
    }
    DenseOperator::new(QuditSpace::new(kept_dims)?, out)
}

/// Transposes the listed subsystems in the computational basis.
pub fn partial_transpose(m: &DenseOperator, subsystems: &[usize]) -> Result<DenseOperator> {
    let space = m.space();
    space.check_subsystems(subsystems)?;
    let n = space.num_subsystems();
    let total = space.total_dim();
    let mut flip = vec![false; n];
    for &s in subsystems {
        flip[s] = true;
    }
    let digits: Vec<Vec<usize>> = (0..total).map(|i| space.digits(i)).collect();
    let src = m.matrix();
    let mut out = CMatrix::zeros(total, total);
    let mut di = vec![0; n];
    let mut dj = vec![0; n];
    for i in 0..total {
        for j in 0..total {
            for k in 0..n {
                if flip[k] {
                    di[k] = digits[j][k];
                    dj[k] = digits[i][k];
                } else {
                    di[k] = digits[i][k];
                    dj[k] = digits[j][k];
                }
            }
            out[(space.flat_index(&di), space.flat_index(&dj))] = src[(i, j)];
        }
    }
    DenseOperator::new(space.clone(), out)
}

fn validate_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidPermutation(format!(
            "expected {n} entries, got {}",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidPermutation(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// The unitary `V_pi` sending the content of subsystem `k` to subsystem `perm[k]`:
/// `V_pi |i_0 ... i_{n-1}> = |j>` with `j_{perm[k]} = i_k`.
///
/// With this convention `V_pi V_sigma = V_{pi o sigma}`.
pub fn permutation_operator(space: &QuditSpace, perm: &[usize]) -> Result<DenseOperator> {
    if space.local_dim().is_none() {
        return Err(Error::NonHomogeneousSpace);
    }
    let n = space.num_subsystems();
    validate_permutation(perm, n)?;
    let total = space.total_dim();
    let mut out = CMatrix::zeros(total, total);
    let mut target = vec![0; n];
    for col in 0..total {
        let digits = space.digits(col);
        for k in 0..n {
            target[perm[k]] = digits[k];
        }
        out[(space.flat_index(&target), col)] = Complex64::new(1.0, 0.0);
    }
    DenseOperator::new(space.clone(), out)
}

/// Ascending eigenvalues of a Hermitian operator.
pub fn hermitian_eigenvalues(m: &DenseOperator) -> Result<Vec<f64>> {
    m.require_hermitian()?;
    Ok(sorted_eigenvalues(m.matrix()))
}

/// Ascending eigenvalues with the matching orthonormal eigenvectors as columns.
pub fn hermitian_eigen(m: &DenseOperator) -> Result<(Vec<f64>, CMatrix)> {
    m.require_hermitian()?;
    Ok(sorted_eigen(m.matrix()))
}

/// Smallest eigenvalue of a Hermitian operator.
pub fn min_eigenvalue(m: &DenseOperator) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?[0])
}

/// Ascending eigenvalues of the Hermitian part of a raw matrix, unchecked.
pub(crate) fn sorted_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = hermitian_part(m);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub(crate) fn sorted_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub(crate) fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Smallest eigenvalue and a matching unit eigenvector of the Hermitian part of `m`.
pub(crate) fn ground_state(m: &CMatrix) -> (f64, CVector) {
    let (values, vectors) = sorted_eigen(m);
    (values[0], vectors.column(0).into_owned())
}

/// `|Phi+> = (1/sqrt d) sum_i |ii>`.
pub fn max_entangled_vector(d: usize) -> CVector {
    let s = 1.0 / (d as f64).sqrt();
    CVector::from_fn(d * d, |k, _| {
        if k / d == k % d {
            Complex64::new(s, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// The two-party swap `V = sum_ij |ij><ji|` on `d x d`.
pub fn swap_operator(d: usize) -> Result<DenseOperator> {
    permutation_operator(&QuditSpace::homogeneous(d, 2)?, &[1, 0])
}

/// Identity on `n` copies of a `d`-dimensional system.
pub fn identity(d: usize, n: usize) -> Result<DenseOperator> {
    Ok(DenseOperator::identity(QuditSpace::homogeneous(d, n)?))
}
