//! Superoperators and their two bipartite dual pictures.
//!
//! A [`LinearMapRep`] stores the action tensor `T[k,l,i,j]` with
//! `M(|i><j|) = sum_kl T[k,l,i,j] |k><l|`. The homocorrelation operator
//! `(1/d_A) sum_ij |i><j| (x) M(|j><i|)` reproduces the input/output correlations
//! of the map, while the Choi operator `(1/d_A) sum_ij |i><j| (x) M(|i><j|)` is
//! its partial transpose and carries the complete-positivity test.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{
    hermitian_eigenvalues, kron, partial_trace, CMatrix, DenseOperator, QuditSpace,
};

/// Minimum eigenvalue accepted as positive semidefinite.
pub const PSD_TOL: f64 = -1e-10;
/// Entrywise tolerance of the Hermiticity- and trace-preservation flags.
pub const MAP_FLAG_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A linear map from `d_in x d_in` to `d_out x d_out` matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMapRep {
    dim_in: usize,
    dim_out: usize,
    action: Vec<Complex64>,
}

impl LinearMapRep {
    /// Wraps a flat action tensor laid out as `T[k,l,i,j]`, last index fastest.
    pub fn new(dim_in: usize, dim_out: usize, action: Vec<Complex64>) -> Result<Self> {
        if dim_in < 2 || dim_out < 2 {
            return Err(Error::InvalidDims(format!(
                "map dimensions must be >= 2, got {dim_in} -> {dim_out}"
            )));
        }
        let expected = dim_out * dim_out * dim_in * dim_in;
        if action.len() != expected {
            return Err(Error::DimensionMismatch {
                expected: expected.to_string(),
                found: action.len().to_string(),
            });
        }
        Ok(Self {
            dim_in,
            dim_out,
            action,
        })
    }

    /// Builds the tensor entry by entry from `f(k, l, i, j)`.
    pub fn from_fn(
        dim_in: usize,
        dim_out: usize,
        mut f: impl FnMut(usize, usize, usize, usize) -> Complex64,
    ) -> Result<Self> {
        let mut action = Vec::with_capacity(dim_out * dim_out * dim_in * dim_in);
        for k in 0..dim_out {
            for l in 0..dim_out {
                for i in 0..dim_in {
                    for j in 0..dim_in {
                        action.push(f(k, l, i, j));
                    }
                }
            }
        }
        Self::new(dim_in, dim_out, action)
    }

    /// The identity channel on `d x d` matrices.
    pub fn identity(d: usize) -> Result<Self> {
        Self::from_fn(d, d, |k, l, i, j| if k == i && l == j { ONE } else { ZERO })
    }

    /// The transpose map `X -> X^T`.
    pub fn transpose(d: usize) -> Result<Self> {
        Self::from_fn(d, d, |k, l, i, j| if k == j && l == i { ONE } else { ZERO })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn action(&self) -> &[Complex64] {
        &self.action
    }

    #[inline]
    fn offset(&self, k: usize, l: usize, i: usize, j: usize) -> usize {
        ((k * self.dim_out + l) * self.dim_in + i) * self.dim_in + j
    }

    /// `T[k,l,i,j]`.
    pub fn entry(&self, k: usize, l: usize, i: usize, j: usize) -> Complex64 {
        self.action[self.offset(k, l, i, j)]
    }

    /// Applies the map to a `d_in x d_in` matrix.
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.nrows() != self.dim_in || x.ncols() != self.dim_in {
            return Err(Error::DimensionMismatch {
                expected: format!("{0}x{0}", self.dim_in),
                found: format!("{}x{}", x.nrows(), x.ncols()),
            });
        }
        Ok(CMatrix::from_fn(self.dim_out, self.dim_out, |k, l| {
            let mut acc = ZERO;
            for i in 0..self.dim_in {
                for j in 0..self.dim_in {
                    acc += self.entry(k, l, i, j) * x[(i, j)];
                }
            }
            acc
        }))
    }

    /// Applies the map to a single-party operator.
    pub fn apply_operator(&self, x: &DenseOperator) -> Result<DenseOperator> {
        let y = self.apply(x.matrix())?;
        DenseOperator::new(QuditSpace::new(vec![self.dim_out])?, y)
    }

    /// `max |T[k,l,i,j] - conj(T[l,k,j,i])|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..self.dim_out {
            for l in 0..self.dim_out {
                for i in 0..self.dim_in {
                    for j in 0..self.dim_in {
                        let d = self.entry(k, l, i, j) - self.entry(l, k, j, i).conj();
                        worst = worst.max(d.norm());
                    }
                }
            }
        }
        worst
    }

    /// `max |sum_k T[k,k,i,j] - delta_ij|`.
    pub fn trace_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim_in {
            for j in 0..self.dim_in {
                let s: Complex64 = (0..self.dim_out).map(|k| self.entry(k, k, i, j)).sum();
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }

    pub fn is_hermiticity_preserving(&self) -> bool {
        self.hermiticity_defect() <= MAP_FLAG_TOL
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_defect() <= MAP_FLAG_TOL
    }

    /// Largest entrywise difference of the action tensors.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim_in != other.dim_in || self.dim_out != other.dim_out {
            return f64::INFINITY;
        }
        self.action
            .iter()
            .zip(&other.action)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.dim_in != other.dim_in || self.dim_out != other.dim_out {
            return Err(Error::DimensionMismatch {
                expected: format!("{} -> {}", self.dim_in, self.dim_out),
                found: format!("{} -> {}", other.dim_in, other.dim_out),
            });
        }
        let action = self
            .action
            .iter()
            .zip(&other.action)
            .map(|(x, y)| x * a + y * b)
            .collect();
        Self::new(self.dim_in, self.dim_out, action)
    }
}

/// `D_eta(X) = (1 - eta) tr(X) I/d + eta X`.
pub fn depolarizing(d: usize, eta: f64) -> Result<LinearMapRep> {
    let df = d as f64;
    LinearMapRep::from_fn(d, d, |k, l, i, j| {
        let mut v = 0.0;
        if i == j && k == l {
            v += (1.0 - eta) / df;
        }
        if k == i && l == j {
            v += eta;
        }
        Complex64::new(v, 0.0)
    })
}

fn bipartite_space(map: &LinearMapRep) -> Result<QuditSpace> {
    QuditSpace::new(vec![map.dim_in, map.dim_out])
}

/// `(1/d_A) sum_ij |i><j| (x) M(|j><i|)`.
pub fn homocorrelation(map: &LinearMapRep) -> Result<DenseOperator> {
    let (da, db) = (map.dim_in, map.dim_out);
    let s = 1.0 / da as f64;
    Ok(DenseOperator::from_fn(bipartite_space(map)?, |r, c| {
        let (i, k) = (r / db, r % db);
        let (j, l) = (c / db, c % db);
        map.entry(k, l, j, i) * s
    }))
}

/// `(1/d_A) sum_ij |i><j| (x) M(|i><j|)`.
pub fn choi(map: &LinearMapRep) -> Result<DenseOperator> {
    let (da, db) = (map.dim_in, map.dim_out);
    let s = 1.0 / da as f64;
    Ok(DenseOperator::from_fn(bipartite_space(map)?, |r, c| {
        let (i, k) = (r / db, r % db);
        let (j, l) = (c / db, c % db);
        map.entry(k, l, i, j) * s
    }))
}

fn bipartite_split(m: &DenseOperator) -> Result<(usize, usize)> {
    match m.dims() {
        &[da, db] => Ok((da, db)),
        other => Err(Error::DimensionMismatch {
            expected: "a bipartite operator".into(),
            found: format!("{} subsystems", other.len()),
        }),
    }
}

/// The map whose homocorrelation operator is `m`.
pub fn inverse_homocorrelation(m: &DenseOperator) -> Result<LinearMapRep> {
    let (da, db) = bipartite_split(m)?;
    let s = da as f64;
    let mat = m.matrix();
    LinearMapRep::from_fn(da, db, |k, l, i, j| mat[(j * db + k, i * db + l)] * s)
}

/// The map whose Choi operator is `m`.
pub fn inverse_choi(m: &DenseOperator) -> Result<LinearMapRep> {
    let (da, db) = bipartite_split(m)?;
    let s = da as f64;
    let mat = m.matrix();
    LinearMapRep::from_fn(da, db, |k, l, i, j| mat[(i * db + k, j * db + l)] * s)
}

/// `tr[m (a (x) b)]`.
pub fn correlation_expectation(
    m: &DenseOperator,
    a: &DenseOperator,
    b: &DenseOperator,
) -> Result<f64> {
    let (da, db) = bipartite_split(m)?;
    if a.dim() != da || b.dim() != db {
        return Err(Error::DimensionMismatch {
            expected: format!("local operators of size {da} and {db}"),
            found: format!("{} and {}", a.dim(), b.dim()),
        });
    }
    let ab = kron(a, b).reshaped(m.space().clone())?;
    Ok(m.trace_product(&ab)?.re)
}

/// `(1/d_A) tr[M(a) b]`, the correlation a map assigns to observables `a` and `b`.
pub fn map_correlation(map: &LinearMapRep, a: &DenseOperator, b: &DenseOperator) -> Result<f64> {
    if b.dim() != map.dim_out {
        return Err(Error::DimensionMismatch {
            expected: map.dim_out.to_string(),
            found: b.dim().to_string(),
        });
    }
    let out = map.apply(a.matrix())?;
    let tr: Complex64 = (&out * b.matrix()).trace();
    Ok(tr.re / map.dim_in as f64)
}

/// `true` when the smallest eigenvalue of a Hermitian operator is at least [`PSD_TOL`].
pub fn is_psd(m: &DenseOperator) -> Result<bool> {
    Ok(hermitian_eigenvalues(m)?[0] >= PSD_TOL)
}

/// Smallest eigenvalue of the Choi operator.
pub fn choi_min_eigenvalue(map: &LinearMapRep) -> Result<f64> {
    Ok(hermitian_eigenvalues(&choi(map)?)?[0])
}

/// Complete positivity alone: the Choi operator is PSD.
pub fn is_cp(map: &LinearMapRep) -> bool {
    choi_min_eigenvalue(map).is_ok_and(|ev| ev >= PSD_TOL)
}

/// Complete positivity and trace preservation.
pub fn is_cptp(map: &LinearMapRep) -> bool {
    map.is_trace_preserving() && is_cp(map)
}

/// The positive-partial-transpose test on the first factor.
pub fn is_ppt(m: &DenseOperator) -> Result<bool> {
    let pt = crate::operator::partial_transpose(m, &[0])?;
    is_psd(&pt)
}

/// Marginal on the first factor of a bipartite operator.
pub fn first_marginal(m: &DenseOperator) -> Result<DenseOperator> {
    bipartite_split(m)?;
    partial_trace(m, &[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{
        identity, max_entangled_vector, partial_transpose, swap_operator, CMatrix,
    };

    fn werner_like(d: usize, eta: f64) -> DenseOperator {
        let df = d as f64;
        &identity(d, 2).unwrap().scale((1.0 - eta) / (df * df))
            + &swap_operator(d).unwrap().scale(eta / df)
    }

    fn pauli_z() -> DenseOperator {
        DenseOperator::diagonal(&[1.0, -1.0]).unwrap()
    }

    #[test]
    fn homocorrelation_of_depolarizing_is_werner() {
        for d in 2..=4 {
            for &eta in &[-0.4, 0.0, 0.3, 1.0] {
                let h = homocorrelation(&depolarizing(d, eta).unwrap()).unwrap();
                assert!(h.approx_eq(&werner_like(d, eta), 1e-14), "d={d} eta={eta}");
            }
        }
    }

    #[test]
    fn homocorrelation_special_cases() {
        let h = homocorrelation(&LinearMapRep::identity(2).unwrap()).unwrap();
        assert!(h.approx_eq(&swap_operator(2).unwrap().scale(0.5), 1e-15));
        let h = homocorrelation(&depolarizing(3, 0.0).unwrap()).unwrap();
        assert!(h.approx_eq(&identity(3, 2).unwrap().scale(1.0 / 9.0), 1e-15));
    }

    #[test]
    fn choi_of_depolarizing_is_isotropic() {
        let space = QuditSpace::homogeneous(3, 2).unwrap();
        let phi = DenseOperator::projector(space, &max_entangled_vector(3)).unwrap();
        let eta = 0.37;
        let want = &identity(3, 2).unwrap().scale((1.0 - eta) / 9.0) + &phi.scale(eta);
        let got = choi(&depolarizing(3, eta).unwrap()).unwrap();
        assert!(got.approx_eq(&want, 1e-15));
        let id = choi(&LinearMapRep::identity(2).unwrap()).unwrap();
        let space = QuditSpace::homogeneous(2, 2).unwrap();
        let bell = DenseOperator::projector(space, &max_entangled_vector(2)).unwrap();
        assert!(id.approx_eq(&bell, 1e-15));
    }

    #[test]
    fn choi_is_partial_transpose_of_homocorrelation() {
        let map = depolarizing(3, -0.2).unwrap();
        let lhs = choi(&map).unwrap();
        let rhs = partial_transpose(&homocorrelation(&map).unwrap(), &[0]).unwrap();
        assert!(lhs.approx_eq(&rhs, 1e-15));
    }

    #[test]
    fn inverse_homocorrelation_special_cases() {
        let id = inverse_homocorrelation(&swap_operator(3).unwrap().scale(1.0 / 3.0)).unwrap();
        assert!(id.max_abs_diff(&LinearMapRep::identity(3).unwrap()) <= 1e-15);
        let dep = inverse_homocorrelation(&identity(2, 2).unwrap().scale(0.25)).unwrap();
        assert!(dep.max_abs_diff(&depolarizing(2, 0.0).unwrap()) <= 1e-15);
    }

    #[test]
    fn inverse_choi_roundtrip() {
        let map = depolarizing(2, 0.6).unwrap();
        let back = inverse_choi(&choi(&map).unwrap()).unwrap();
        assert!(back.max_abs_diff(&map) <= 1e-15);
    }

    #[test]
    fn depolarizing_flags_and_endpoints() {
        let m = depolarizing(3, 0.4).unwrap();
        assert!(m.is_trace_preserving());
        assert!(m.is_hermiticity_preserving());
        assert!(depolarizing(2, 1.0)
            .unwrap()
            .max_abs_diff(&LinearMapRep::identity(2).unwrap())
            <= 0.0);
        let x = CMatrix::from_fn(2, 2, |i, j| Complex64::new((i + 2 * j) as f64, i as f64 - j as f64));
        let y = depolarizing(2, 0.0).unwrap().apply(&x).unwrap();
        let tr = x.trace();
        assert!((y - CMatrix::identity(2, 2) * (tr * 0.5)).norm() < 1e-15);
    }

    #[test]
    fn depolarizing_cptp_boundary() {
        let ev = choi_min_eigenvalue(&depolarizing(3, -1.0 / 8.0).unwrap()).unwrap();
        assert!(ev.abs() < 1e-15);
        assert!(is_cptp(&depolarizing(2, 0.5).unwrap()));
        assert!(!is_cptp(&depolarizing(2, -0.5).unwrap()));
    }

    #[test]
    fn transpose_map_is_not_cp() {
        let t = LinearMapRep::transpose(2).unwrap();
        assert!(t.is_trace_preserving());
        assert!((choi_min_eigenvalue(&t).unwrap() + 0.5).abs() < 1e-15);
        assert!(!is_cptp(&t));
    }

    #[test]
    fn correlation_examples() {
        let z = pauli_z();
        let m = swap_operator(2).unwrap().scale(0.5);
        assert!((correlation_expectation(&m, &z, &z).unwrap() - 1.0).abs() < 1e-15);
        let mixed = identity(2, 2).unwrap().scale(0.25);
        assert!(correlation_expectation(&mixed, &z, &z).unwrap().abs() < 1e-15);
        let three = identity(3, 1).unwrap();
        assert!(correlation_expectation(&m, &z, &three).is_err());
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(LinearMapRep::new(2, 2, vec![ZERO; 15]).is_err());
        assert!(LinearMapRep::new(1, 2, vec![ZERO; 4]).is_err());
        assert!(inverse_homocorrelation(&identity(2, 3).unwrap()).is_err());
    }
}
