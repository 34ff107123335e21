//! Seeded random states, unitaries and channels.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::maps::{inverse_choi, LinearMapRep};
use crate::operator::{kron, partial_trace, sorted_eigen, CMatrix, CVector, DenseOperator, QuditSpace};

/// The generator used by every sampler.
pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes grid coordinates into a per-point seed, independent of evaluation order.
pub fn derive_seed(seed: u64, coords: &[u64]) -> u64 {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for &c in coords {
        h ^= c.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(h << 6).wrapping_add(h >> 2);
        h = h.wrapping_mul(0xbf58_476d_1ce4_e5b9);
        h ^= h >> 31;
    }
    h
}

fn complex_normal(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// An `rows x cols` matrix of independent standard complex Gaussians.
pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// A Gaussian unit vector of length `n`.
pub fn random_unit_vector(n: usize, rng: &mut impl Rng) -> CVector {
    let v = DVector::from_fn(n, |_, _| complex_normal(rng));
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

/// A Haar-distributed `d x d` unitary (QR of a Ginibre matrix with phase fix).
pub fn haar_unitary(d: usize, rng: &mut impl Rng) -> CMatrix {
    let qr = ginibre(d, d, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for k in 0..d {
        let rk = r[(k, k)];
        let phase = if rk.norm() > 0.0 { rk / rk.norm() } else { Complex64::new(1.0, 0.0) };
        for row in 0..d {
            u[(row, k)] *= phase;
        }
    }
    u
}

/// `u (x) u (x) ... (x) u` with `n` factors.
pub fn tensor_power(u: &CMatrix, n: usize) -> CMatrix {
    let mut out = u.clone();
    for _ in 1..n {
        out = out.kronecker(u);
    }
    out
}

/// A Hermitian matrix with Gaussian entries.
pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> CMatrix {
    let g = ginibre(n, n, rng);
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

/// A full-rank density operator on `space` drawn from the Hilbert-Schmidt measure.
pub fn random_density_on(space: QuditSpace, rng: &mut impl Rng) -> DenseOperator {
    let n = space.total_dim();
    let g = ginibre(n, n, rng);
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    DenseOperator::new(space, rho / tr).expect("square by construction")
}

/// A random density operator on two `d`-level systems, deterministic per seed.
pub fn random_density(d: usize, seed: u64) -> Result<DenseOperator> {
    let space = QuditSpace::homogeneous(d, 2)?;
    Ok(random_density_on(space, &mut seeded_rng(seed)))
}

/// A Haar-random pure state on `space`.
pub fn random_pure_state(space: QuditSpace, rng: &mut impl Rng) -> DenseOperator {
    let v = random_unit_vector(space.total_dim(), rng);
    DenseOperator::projector(space, &v).expect("length matches")
}

fn inverse_sqrt(m: &CMatrix) -> CMatrix {
    let (values, vectors) = sorted_eigen(m);
    let diag = CMatrix::from_fn(values.len(), values.len(), |i, j| {
        if i == j {
            Complex64::new(values[i].max(f64::MIN_POSITIVE).powf(-0.5), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    &vectors * diag * vectors.adjoint()
}

/// Applies the local filter `(s^{-1/2} (x) I)` with `s = d_A tr_B m`, so that the
/// result has first marginal `I/d_A`. The filter is invertible and local, so it
/// preserves positivity and positivity of the partial transpose.
pub fn whiten_first_marginal(m: &DenseOperator) -> Result<DenseOperator> {
    let da = m.dims()[0];
    let db = m.dim() / da;
    let marginal = partial_trace(m, &[0])?;
    let filter = inverse_sqrt(&(marginal.matrix() * Complex64::new(da as f64, 0.0)));
    let a = DenseOperator::new(QuditSpace::new(vec![da])?, filter)?;
    let id = DenseOperator::identity(QuditSpace::new(vec![db])?);
    let full = kron(&a, &id).into_matrix();
    let out = &full * m.matrix() * full.adjoint();
    let sym = (&out + out.adjoint()) * Complex64::new(0.5, 0.0);
    DenseOperator::new(m.space().clone(), sym)
}

/// A random channel on `d`-level systems: Ginibre Choi operator, whitened so the
/// map is trace preserving.
pub fn random_cptp_with(d: usize, rng: &mut impl Rng) -> Result<LinearMapRep> {
    let space = QuditSpace::homogeneous(d, 2)?;
    let choi = whiten_first_marginal(&random_density_on(space, rng))?;
    inverse_choi(&choi)
}

/// A random channel, deterministic per seed.
pub fn random_cptp(d: usize, seed: u64) -> Result<LinearMapRep> {
    random_cptp_with(d, &mut seeded_rng(seed))
}
