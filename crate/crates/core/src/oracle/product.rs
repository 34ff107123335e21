//! Minimisation over product vectors.

use num_complex::Complex64;
use crate::error::{Error, Result};
use crate::joinability::EtaTriple;
use crate::operator::{ground_state, CMatrix, CVector, DenseOperator};

use super::sampling::{random_unit_vector, seeded_rng};

const GRID: usize = 360;
const NEWTON_STARTS: usize = 5;
const NEWTON_STEPS: usize = 30;

/// Expectation of the `f = 0` qubit joining operator on a product of three
/// real-plane qubit states, reduced to the two relative angles:
/// `F = (1/2)(1/4 + b cos th + c cos om + d cos(th + om))` with `(b, c, d) = eta / 4`.
pub fn local_objective(t: EtaTriple, theta: f64, omega: f64) -> f64 {
    let (b, c, d) = (t.ab / 4.0, t.ac / 4.0, t.bc / 4.0);
    0.5 * (0.25 + b * theta.cos() + c * omega.cos() + d * (theta + omega).cos())
}

fn gradient_hessian(t: EtaTriple, th: f64, om: f64) -> ([f64; 2], [[f64; 2]; 2]) {
    let (b, c, d) = (t.ab / 4.0, t.ac / 4.0, t.bc / 4.0);
    let (s1, c1) = th.sin_cos();
    let (s2, c2) = om.sin_cos();
    let (s3, c3) = (th + om).sin_cos();
    let g = [0.5 * (-b * s1 - d * s3), 0.5 * (-c * s2 - d * s3)];
    let h = [
        [0.5 * (-b * c1 - d * c3), -0.5 * d * c3],
        [-0.5 * d * c3, 0.5 * (-c * c2 - d * c3)],
    ];
    (g, h)
}

/// Damped Newton descent on `F` from `x`, falling back to gradient steps where the
/// Hessian is not positive definite.
fn newton_refine(t: EtaTriple, mut x: [f64; 2]) -> ([f64; 2], f64) {
    let mut fx = local_objective(t, x[0], x[1]);
    for _ in 0..NEWTON_STEPS {
        let (g, h) = gradient_hessian(t, x[0], x[1]);
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let step = if h[0][0] > 0.0 && det > 0.0 {
            [
                -(h[1][1] * g[0] - h[0][1] * g[1]) / det,
                -(h[0][0] * g[1] - h[1][0] * g[0]) / det,
            ]
        } else {
            [-4.0 * g[0], -4.0 * g[1]]
        };
        let mut scale = 1.0;
        let mut accepted = false;
        while scale > 1e-10 {
            let y = [x[0] + scale * step[0], x[1] + scale * step[1]];
            let fy = local_objective(t, y[0], y[1]);
            if fy <= fx {
                accepted = fy < fx;
                x = y;
                fx = fy;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (x, fx)
}

/// Minimum of [`local_objective`] over the torus: a 360 x 360 grid followed by
/// Newton refinement from the five best grid cells.
pub fn local_objective_minimum(t: EtaTriple) -> (f64, [f64; 2], usize) {
    let step = 2.0 * std::f64::consts::PI / GRID as f64;
    let cos: Vec<f64> = (0..2 * GRID).map(|k| (k as f64 * step).cos()).collect();
    let (b, c, d) = (t.ab / 4.0, t.ac / 4.0, t.bc / 4.0);

    // best cell per theta row
    let mut rows: Vec<(f64, usize, usize)> = Vec::with_capacity(GRID);
    for i in 0..GRID {
        let shifted = &cos[i..i + GRID];
        let mut best = (f64::INFINITY, 0);
        for (j, (&cj, &cij)) in cos[..GRID].iter().zip(shifted).enumerate() {
            let v = c * cj + d * cij;
            if v < best.0 {
                best = (v, j);
            }
        }
        rows.push((0.5 * (0.25 + b * cos[i] + best.0), i, best.1));
    }
    rows.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut best = (rows[0].0, [rows[0].1 as f64 * step, rows[0].2 as f64 * step]);
    for &(_, i, j) in rows.iter().take(NEWTON_STARTS) {
        let (x, fx) = newton_refine(t, [i as f64 * step, j as f64 * step]);
        if fx < best.0 {
            best = (fx, x);
        }
    }
    let wrap = |a: f64| a.rem_euclid(2.0 * std::f64::consts::PI);
    (best.0, [wrap(best.1[0]), wrap(best.1[1])], GRID * GRID + NEWTON_STARTS * NEWTON_STEPS)
}

/// Result of an alternating product-vector minimisation.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductMinimum {
    pub value: f64,
    pub psi: CVector,
    pub phi: CVector,
    pub sweeps: usize,
}

const STARTS: usize = 32;
const MAX_SWEEPS: usize = 200;
const STALL: f64 = 1e-12;

fn contract_first(m: &CMatrix, psi: &CVector, da: usize, db: usize) -> CMatrix {
    CMatrix::from_fn(db, db, |k, l| {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..da {
            for j in 0..da {
                acc += psi[i].conj() * psi[j] * m[(i * db + k, j * db + l)];
            }
        }
        acc
    })
}

fn contract_second(m: &CMatrix, phi: &CVector, da: usize, db: usize) -> CMatrix {
    CMatrix::from_fn(da, da, |i, j| {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..db {
            for l in 0..db {
                acc += phi[k].conj() * phi[l] * m[(i * db + k, j * db + l)];
            }
        }
        acc
    })
}

/// Smallest `<psi (x) phi| m |psi (x) phi>` found by alternating ground-state
/// updates from 32 seeded random starts. This is a heuristic upper bound on the
/// true minimum; it is not a certificate of block positivity.
pub fn block_positive_minimum(m: &DenseOperator, da: usize, db: usize, seed: u64) -> Result<ProductMinimum> {
    if da < 2 || db < 2 || da * db != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}-dimensional operator", da * db),
            found: format!("{} with split {da} x {db}", m.dim()),
        });
    }
    m.require_hermitian()?;
    let mat = m.matrix();
    let mut rng = seeded_rng(seed);
    let mut best: Option<ProductMinimum> = None;
    for _ in 0..STARTS {
        let mut psi = random_unit_vector(da, &mut rng);
        let mut phi = random_unit_vector(db, &mut rng);
        let mut value = f64::INFINITY;
        let mut sweeps = 0;
        for _ in 0..MAX_SWEEPS {
            sweeps += 1;
            let (_, p) = ground_state(&contract_first(mat, &psi, da, db));
            phi = p;
            let (v, q) = ground_state(&contract_second(mat, &phi, da, db));
            psi = q;
            let stalled = value - v < STALL;
            value = value.min(v);
            if stalled {
                break;
            }
        }
        if best.as_ref().is_none_or(|b| value < b.value) {
            best = Some(ProductMinimum {
                value,
                psi,
                phi,
                sweeps,
            });
        }
    }
    Ok(best.expect("at least one start"))
}
