//! Agreement measurements and the bounds they obey on states and channels.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::joinability::classical_rows;
use crate::operator::{permutation_operator, DenseOperator, QuditSpace};

/// Largest total dimension `d^n` accepted by [`agreement_povm`].
pub const MAX_POVM_DIM: usize = 4096;

/// Two-outcome agreement measurement on `n` parties.
#[derive(Debug, Clone, PartialEq)]
pub struct AgreementPovm {
    pub d: usize,
    pub n_parties: usize,
    pub e_agree: DenseOperator,
    pub e_disagree: DenseOperator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AgreementCone {
    State,
    Channel,
}

impl FromStr for AgreementCone {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "state" => Ok(Self::State),
            "channel" => Ok(Self::Channel),
            other => Err(Error::OutOfRange(format!("unknown cone '{other}'"))),
        }
    }
}

impl fmt::Display for AgreementCone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::State => "state",
            Self::Channel => "channel",
        })
    }
}

/// `n choose k` as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for slot in 0..n {
            let mut q = p.clone();
            q.insert(slot, n - 1);
            out.push(q);
        }
    }
    out
}

fn check_size(d: usize, n: usize) -> Result<QuditSpace> {
    if d < 2 || n < 2 {
        return Err(Error::InvalidDims(format!("need d >= 2 and n >= 2, got d = {d}, n = {n}")));
    }
    let total = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(d).filter(|&t| t <= MAX_POVM_DIM));
    if total.is_none() {
        return Err(Error::DimensionCap {
            d,
            n,
            cap: MAX_POVM_DIM,
        });
    }
    QuditSpace::homogeneous(d, n)
}

/// Projector onto the symmetric subspace, `(1/n!) sum_pi V_pi`.
pub fn symmetric_projector(d: usize, n: usize) -> Result<DenseOperator> {
    let space = check_size(d, n)?;
    let perms = permutations(n);
    let mut acc = DenseOperator::zeros(space.clone());
    for p in &perms {
        acc = &acc + &permutation_operator(&space, p)?;
    }
    Ok(acc.scale(1.0 / perms.len() as f64))
}

/// `E_agree = (d / binom(d + n - 1, n)) P_sym` and its complement.
pub fn agreement_povm(d: usize, n: usize) -> Result<AgreementPovm> {
    let sym = symmetric_projector(d, n)?;
    let e_agree = sym.scale(d as f64 / binomial(d + n - 1, n));
    let e_disagree = &DenseOperator::identity(sym.space().clone()) - &e_agree;
    Ok(AgreementPovm {
        d,
        n_parties: n,
        e_agree,
        e_disagree,
    })
}

/// `tr(w E_agree)` for a unit-trace Hermitian `w` on the measurement's space.
pub fn agreement_probability(w: &DenseOperator, povm: &AgreementPovm) -> Result<f64> {
    if w.space() != povm.e_agree.space() {
        return Err(Error::DimensionMismatch {
            expected: format!("{:?}", povm.e_agree.dims()),
            found: format!("{:?}", w.dims()),
        });
    }
    w.require_hermitian()?;
    let tr = w.trace();
    if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
        return Err(Error::OutOfRange(format!("operator trace {tr} is not 1")));
    }
    Ok(w.trace_product(&povm.e_agree)?.re)
}

/// Closed-form range of the agreement probability over a cone.
pub fn agreement_bounds(d: usize, n: usize, cone: AgreementCone) -> Result<(f64, f64)> {
    if d < 2 || n < 2 {
        return Err(Error::InvalidDims(format!("need d >= 2 and n >= 2, got d = {d}, n = {n}")));
    }
    match cone {
        AgreementCone::State => Ok((0.0, d as f64 / binomial(d + n - 1, n))),
        AgreementCone::Channel if n == 2 => Ok((1.0 / (d as f64 + 1.0), 1.0)),
        AgreementCone::Channel => Err(Error::BipartiteOnly(n)),
    }
}

/// Limits on symmetric agreement that follow from the classical inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedTaskBounds {
    /// Largest agreement of each clone with the input in symmetric 1 -> 2 cloning.
    pub cloning_alpha_max: f64,
    /// Smallest agreement of each party with A for a qubit Werner state shareable with two parties.
    pub sharability_alpha_min_qubit: Option<f64>,
}

/// Range of a common value `alpha = alpha_AB = alpha_AC` allowed by the
/// classical inequalities when `alpha_BC` may be anything in `bc_range`.
///
/// Each inequality `c . alpha <= rhs` bounds `alpha` from one side by an affine
/// function of `alpha_BC`; the returned interval is the union over `alpha_BC` of
/// the feasible intervals, located by checking the breakpoints of those bounds.
pub fn symmetric_alpha_range(d: usize, bc_range: (f64, f64)) -> (f64, f64) {
    let rows = classical_rows(d);
    let mut xs = vec![bc_range.0, bc_range.1];
    let line = |c: &[f64; 3], rhs: f64| (rhs / (c[0] + c[1]), -c[2] / (c[0] + c[1]));
    for (i, (c1, r1)) in rows.iter().enumerate() {
        for (c2, r2) in &rows[i + 1..] {
            if c1[0] + c1[1] == 0.0 || c2[0] + c2[1] == 0.0 {
                continue;
            }
            let (a1, b1) = line(c1, *r1);
            let (a2, b2) = line(c2, *r2);
            if b1 != b2 {
                let x = (a2 - a1) / (b1 - b2);
                if x > bc_range.0 && x < bc_range.1 {
                    xs.push(x);
                }
            }
        }
    }
    let interval_at = |x: f64| {
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        for (c, rhs) in &rows {
            let w = c[0] + c[1];
            let bound = (rhs - c[2] * x) / w;
            if w > 0.0 {
                hi = hi.min(bound);
            } else if w < 0.0 {
                lo = lo.max(bound);
            }
        }
        (lo, hi)
    };
    xs.iter()
        .map(|&x| interval_at(x))
        .filter(|(lo, hi)| lo <= hi)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |acc, (lo, hi)| (acc.0.min(lo), acc.1.max(hi)))
}

/// Cloning and sharability limits obtained by feeding the state bound on the
/// pair `BC` into the classical inequalities.
pub fn derived_task_bounds(d: usize) -> Result<DerivedTaskBounds> {
    let (_, state_hi) = agreement_bounds(d, 2, AgreementCone::State)?;
    let (_, cloning) = symmetric_alpha_range(d, (0.0, state_hi));
    let sharability = (d == 2).then(|| symmetric_alpha_range(2, (0.0, state_hi)).0);
    Ok(DerivedTaskBounds {
        cloning_alpha_max: cloning,
        sharability_alpha_min_qubit: sharability,
    })
}
