//! Werner and Brauer operator families and the tripartite invariant joining family.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::joinability::EtaTriple;
use crate::operator::{
    partial_transpose, permutation_operator, swap_operator, DenseOperator, QuditSpace,
};
use crate::verdict::{min_slack, Verdict};

/// Slack granted to the closed-form cone predicates.
pub const CONE_SLACK: f64 = 1e-12;

/// `(1 - eta) I/d^2 + eta V/d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WernerParams {
    d: usize,
    eta: f64,
}

impl WernerParams {
    pub fn new(d: usize, eta: f64) -> Result<Self> {
        check_d(d)?;
        Ok(Self { d, eta })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn to_brauer(self) -> BrauerParams {
        BrauerParams {
            d: self.d,
            eta: self.eta,
            beta: 0.0,
        }
    }
}

/// `(1 - eta - beta) I/d^2 + eta V/d + beta V^{T_A}/d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrauerParams {
    d: usize,
    eta: f64,
    beta: f64,
}

impl BrauerParams {
    pub fn new(d: usize, eta: f64, beta: f64) -> Result<Self> {
        check_d(d)?;
        Ok(Self { d, eta, beta })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The same family with `eta` and `beta` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            d: self.d,
            eta: self.beta,
            beta: self.eta,
        }
    }
}

impl From<WernerParams> for BrauerParams {
    fn from(w: WernerParams) -> Self {
        w.to_brauer()
    }
}

/// Three-qubit invariant operator
/// `I/8 + sum_l (eta_l/4)(V_l - I/2) + i f (V_ABC - V_CBA)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripartiteWernerParams {
    pub eta_ab: f64,
    pub eta_ac: f64,
    pub eta_bc: f64,
    pub f: f64,
}

impl TripartiteWernerParams {
    pub fn new(eta_ab: f64, eta_ac: f64, eta_bc: f64, f: f64) -> Self {
        Self {
            eta_ab,
            eta_ac,
            eta_bc,
            f,
        }
    }

    pub fn etas(&self) -> EtaTriple {
        EtaTriple::new(self.eta_ab, self.eta_ac, self.eta_bc)
    }
}

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::InvalidDims(format!("local dimension must be >= 2, got {d}")))
    } else {
        Ok(())
    }
}

pub fn werner_operator(p: WernerParams) -> Result<DenseOperator> {
    brauer_operator(p.to_brauer())
}

pub fn brauer_operator(p: BrauerParams) -> Result<DenseOperator> {
    let d = p.d as f64;
    let v = swap_operator(p.d)?;
    let vt = partial_transpose(&v, &[0])?;
    let id = DenseOperator::identity(QuditSpace::homogeneous(p.d, 2)?);
    Ok(&(&id.scale((1.0 - p.eta - p.beta) / (d * d)) + &v.scale(p.eta / d)) + &vt.scale(p.beta / d))
}

/// Invariant subspaces of a Brauer operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BrauerSubspace {
    /// The antisymmetric subspace.
    Antisymmetric,
    /// The span of the maximally entangled vector.
    MaxEntangled,
    /// The symmetric vectors orthogonal to the maximally entangled one.
    SymmetricTraceless,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub subspace: BrauerSubspace,
    pub eigenvalue: f64,
    pub multiplicity: usize,
}

/// Closed-form spectrum of a Brauer operator.
pub fn brauer_spectrum(p: BrauerParams) -> [SpectrumEntry; 3] {
    let d = p.d as f64;
    let base = (1.0 - p.eta - p.beta) / (d * d);
    [
        SpectrumEntry {
            subspace: BrauerSubspace::Antisymmetric,
            eigenvalue: base - p.eta / d,
            multiplicity: p.d * (p.d - 1) / 2,
        },
        SpectrumEntry {
            subspace: BrauerSubspace::MaxEntangled,
            eigenvalue: base + p.eta / d + p.beta,
            multiplicity: 1,
        },
        SpectrumEntry {
            subspace: BrauerSubspace::SymmetricTraceless,
            eigenvalue: base + p.eta / d,
            multiplicity: p.d * (p.d + 1) / 2 - 1,
        },
    ]
}

/// Spectrum expanded into a sorted list of `d^2` eigenvalues.
pub fn brauer_eigenvalues(p: BrauerParams) -> Vec<f64> {
    let mut out: Vec<f64> = brauer_spectrum(p)
        .iter()
        .flat_map(|e| std::iter::repeat_n(e.eigenvalue, e.multiplicity))
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

fn state_slacks(d: f64, eta: f64, beta: f64) -> [f64; 3] {
    [
        1.0 - (d + 1.0) * eta - beta,
        1.0 + (d - 1.0) * eta + (d * d - 1.0) * beta,
        1.0 + (d - 1.0) * eta - beta,
    ]
}

/// The operator is positive semidefinite.
pub fn is_state_positive(p: BrauerParams) -> Verdict {
    let margin = min_slack(&state_slacks(p.d as f64, p.eta, p.beta));
    Verdict::from_margin(margin, CONE_SLACK)
}

/// The partial transpose is positive semidefinite.
pub fn is_channel_positive(p: BrauerParams) -> Verdict {
    is_state_positive(p.swapped())
}

/// Non-negative on every product vector.
pub fn is_local_positive(p: BrauerParams) -> Verdict {
    let d = p.d as f64;
    let slacks = [
        1.0 + (d - 1.0) * (p.eta + p.beta),
        1.0 - p.eta - p.beta,
        1.0 + (d - 1.0) * p.eta - p.beta,
        1.0 - p.eta + (d - 1.0) * p.beta,
    ];
    Verdict::from_margin(min_slack(&slacks), CONE_SLACK)
}

/// Both positive and with positive partial transpose.
pub fn is_ppt_state(p: BrauerParams) -> Verdict {
    is_state_positive(p).and(is_channel_positive(p))
}

/// Half-planes `a eta + b beta <= 1` bounding each cone in the `(eta, beta)` plane.
pub fn cone_half_planes(d: usize, cone: Cone) -> Vec<[f64; 2]> {
    let d = d as f64;
    let state = vec![
        [d + 1.0, 1.0],
        [-(d - 1.0), -(d * d - 1.0)],
        [-(d - 1.0), 1.0],
    ];
    match cone {
        Cone::State => state,
        Cone::Channel => state.into_iter().map(|[a, b]| [b, a]).collect(),
        Cone::Local => vec![
            [-(d - 1.0), -(d - 1.0)],
            [1.0, 1.0],
            [-(d - 1.0), 1.0],
            [1.0, -(d - 1.0)],
        ],
    }
}

/// The three positivity cones of bipartite operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cone {
    State,
    Channel,
    Local,
}

/// Vertices of the polygon cut out by [`cone_half_planes`].
pub fn cone_vertices(d: usize, cone: Cone) -> Vec<[f64; 2]> {
    let planes = cone_half_planes(d, cone);
    let mut out: Vec<[f64; 2]> = Vec::new();
    for (i, p) in planes.iter().enumerate() {
        for q in &planes[i + 1..] {
            let det = p[0] * q[1] - p[1] * q[0];
            if det.abs() < 1e-14 {
                continue;
            }
            let x = (q[1] - p[1]) / det;
            let y = (p[0] - q[0]) / det;
            let inside = planes.iter().all(|h| h[0] * x + h[1] * y <= 1.0 + 1e-12);
            let fresh = out
                .iter()
                .all(|v| (v[0] - x).abs() > 1e-12 || (v[1] - y).abs() > 1e-12);
            if inside && fresh {
                out.push([x, y]);
            }
        }
    }
    out
}

/// `(1 + (d - 1) eta)/d`, the agreement probability of a Werner operator.
pub fn alpha_of_eta(d: usize, eta: f64) -> f64 {
    let d = d as f64;
    (1.0 + (d - 1.0) * eta) / d
}

pub fn eta_of_alpha(d: usize, alpha: f64) -> f64 {
    let d = d as f64;
    (d * alpha - 1.0) / (d - 1.0)
}

/// Subsystem permutations of a tripartite space in the order
/// `I, V_AB, V_AC, V_BC, V_ABC, V_CBA`.
pub const TRIPARTITE_PERMUTATIONS: [[usize; 3]; 6] =
    [[0, 1, 2], [1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0], [2, 0, 1]];

/// The six permutation operators on three `d`-level systems.
pub fn tripartite_permutation_basis(d: usize) -> Result<Vec<DenseOperator>> {
    let space = QuditSpace::homogeneous(d, 3)?;
    TRIPARTITE_PERMUTATIONS
        .iter()
        .map(|p| permutation_operator(&space, p))
        .collect()
}

/// Coefficients of `I, V_AB, V_AC, V_BC, V_ABC, V_CBA` in the joining family
/// whose two-party marginals are the Werner operators of `t`.
///
/// `e` weighs `(V_ABC + V_CBA)/2` with compensating corrections that leave every
/// marginal unchanged, and `f` weighs `i (V_ABC - V_CBA)/2`. For qubits the
/// `e` direction vanishes identically.
pub fn tripartite_coefficients(d: usize, t: EtaTriple, e: f64, f: f64) -> [Complex64; 6] {
    let df = d as f64;
    let s = t.sum();
    let re = |x: f64| Complex64::new(x, 0.0);
    [
        re((1.0 - s) / (df * df * df) + 2.0 * e / (df * df)),
        re(t.ab / (df * df) - e / df),
        re(t.ac / (df * df) - e / df),
        re(t.bc / (df * df) - e / df),
        Complex64::new(e / 2.0, f / 2.0),
        Complex64::new(e / 2.0, -f / 2.0),
    ]
}

/// The tripartite invariant joining operator for local dimension `d`.
pub fn tripartite_invariant_operator(d: usize, t: EtaTriple, e: f64, f: f64) -> Result<DenseOperator> {
    check_d(d)?;
    let basis = tripartite_permutation_basis(d)?;
    let coeffs = tripartite_coefficients(d, t, e, f);
    let mut acc = DenseOperator::zeros(QuditSpace::homogeneous(d, 3)?);
    for (op, c) in basis.iter().zip(coeffs) {
        acc = &acc + &op.scale_complex(c);
    }
    Ok(acc)
}

/// Three-qubit joining operator.
pub fn tripartite_werner_operator(t: TripartiteWernerParams) -> DenseOperator {
    tripartite_invariant_operator(2, t.etas(), 0.0, t.f).expect("qubit family is well defined")
}
