//! Brute-force certifiers for the closed-form predicates.
//!
//! The joinability oracles maximise the minimum eigenvalue of the invariant
//! joining family (or its partial transpose on a pivot) over the free
//! parameters. That objective is concave, so nested golden-section search
//! finds the optimum. For qubits the commutant of `U (x) U (x) U` is
//! five-dimensional and a single free parameter `f` remains once the marginals
//! are fixed; for `d >= 3` it is six-dimensional and two remain.

mod family;
mod product;
mod sampling;
mod search;

use serde::{Deserialize, Serialize};

pub use product::{block_positive_minimum, local_objective, local_objective_minimum, ProductMinimum};
pub use sampling::{
    derive_seed, ginibre, haar_unitary, random_cptp, random_cptp_with, random_density,
    random_density_on, random_hermitian, random_pure_state, random_unit_vector, seeded_rng,
    tensor_power, whiten_first_marginal, SeededRng,
};
pub use search::{golden_section_max, LineMax};

use crate::agreement::{agreement_povm, agreement_probability, AgreementCone};
use crate::error::{Error, Result};
use crate::joinability::{EtaTriple, Pivot};
use crate::maps::{homocorrelation, inverse_choi};
use crate::operator::{partial_transpose, DenseOperator, QuditSpace};
use family::JoiningFamily;

/// Default feasibility tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// How a [`FeasibilityResult`] was decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certificate {
    /// A parameter point with objective at least `-tol` was found.
    Witness,
    /// The full search ended below `-tol`.
    SearchExhausted,
    /// A fixed two-party marginal has a negative eigenvalue `lam`, which caps the
    /// objective at `lam / d` for every choice of free parameters.
    MarginalObstruction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityResult {
    pub feasible: bool,
    pub best_free_params: Vec<f64>,
    /// Best objective found, or the marginal cap for [`Certificate::MarginalObstruction`].
    pub best_min_eigenvalue: f64,
    pub evaluations: usize,
    pub tol: f64,
    pub certificate: Certificate,
}

impl FeasibilityResult {
    fn new(best_free_params: Vec<f64>, value: f64, evaluations: usize, tol: f64, certificate: Certificate) -> Self {
        Self {
            feasible: value >= -tol,
            best_free_params,
            best_min_eigenvalue: value,
            evaluations,
            tol,
            certificate,
        }
    }
}

/// Search settings of the eigenvalue oracles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub tol: f64,
    /// Golden-section reductions per free parameter.
    pub iterations: usize,
    /// Half-width of the search box for every free parameter.
    pub radius: f64,
    /// Return as soon as a feasible point is found instead of locating the optimum.
    pub stop_when_feasible: bool,
    /// Reject triples with a non-PSD marginal before searching.
    pub marginal_prescreen: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            iterations: 60,
            radius: 4.0,
            stop_when_feasible: false,
            marginal_prescreen: true,
        }
    }
}

impl OracleConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    /// Settings for bulk feasibility scans: stop at the first feasible point and
    /// use 48 reductions per parameter (box width below `1e-9`).
    pub fn screening() -> Self {
        Self {
            iterations: 48,
            stop_when_feasible: true,
            ..Self::default()
        }
    }
}

fn check_oracle_d(d: usize) -> Result<()> {
    if d == 2 || d == 3 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension {
            d,
            context: "eigenvalue oracles support d in {2, 3}",
        })
    }
}

fn joining_search(d: usize, t: EtaTriple, pivot: Option<Pivot>, cfg: &OracleConfig) -> Result<FeasibilityResult> {
    check_oracle_d(d)?;
    let inst = JoiningFamily::get(d, pivot)?.instance(t);
    let free = if d == 2 { 1 } else { 2 };
    if cfg.marginal_prescreen {
        let cap = inst.marginal_bound();
        if cap < -cfg.tol {
            return Ok(FeasibilityResult::new(
                vec![0.0; free],
                cap,
                0,
                cfg.tol,
                Certificate::MarginalObstruction,
            ));
        }
    }
    let target = cfg.stop_when_feasible.then_some(-cfg.tol);
    let r = cfg.radius;
    let (params, value, evaluations, hit) = if d == 2 {
        let line = golden_section_max(|f| inst.min_eigenvalue(0.0, f), -r, r, cfg.iterations, target);
        (vec![line.argmax], line.value, line.evaluations, line.reached_target)
    } else {
        let mut inner_evals = 0;
        let mut best_f = 0.0;
        let mut best_value = f64::NEG_INFINITY;
        let outer = golden_section_max(
            |e| {
                let line = golden_section_max(|f| inst.min_eigenvalue(e, f), -r, r, cfg.iterations, target);
                inner_evals += line.evaluations;
                if line.value > best_value {
                    best_value = line.value;
                    best_f = line.argmax;
                }
                line.value
            },
            -r,
            r,
            cfg.iterations,
            target,
        );
        (vec![outer.argmax, best_f], outer.value, inner_evals, outer.reached_target)
    };
    let certificate = if value >= -cfg.tol || hit {
        Certificate::Witness
    } else {
        Certificate::SearchExhausted
    };
    Ok(FeasibilityResult::new(params, value, evaluations, cfg.tol, certificate))
}

/// Searches for a joining state of the Werner triple `t` (`d` in {2, 3}).
///
/// Free parameters: `f` weighing `i (V_ABC - V_CBA)/2`, and for `d = 3` also `e`
/// weighing `(V_ABC + V_CBA)/2` with the two-cycle and identity corrections that
/// keep the marginals fixed. `best_free_params` is `[f]` or `[e, f]`.
pub fn oracle_state_joinable(d: usize, t: EtaTriple, tol: f64) -> Result<FeasibilityResult> {
    joining_search(d, t, None, &OracleConfig::with_tol(tol))
}

pub fn oracle_state_joinable_with(d: usize, t: EtaTriple, cfg: &OracleConfig) -> Result<FeasibilityResult> {
    joining_search(d, t, None, cfg)
}

/// Searches for a joining operator whose partial transpose on `pivot` is PSD.
pub fn oracle_channel_joinable(d: usize, t: EtaTriple, pivot: Pivot, tol: f64) -> Result<FeasibilityResult> {
    joining_search(d, t, Some(pivot), &OracleConfig::with_tol(tol))
}

pub fn oracle_channel_joinable_with(
    d: usize,
    t: EtaTriple,
    pivot: Pivot,
    cfg: &OracleConfig,
) -> Result<FeasibilityResult> {
    joining_search(d, t, Some(pivot), cfg)
}

/// Minimum eigenvalue of the joining family at explicit free parameters.
pub fn joining_min_eigenvalue(d: usize, t: EtaTriple, pivot: Option<Pivot>, e: f64, f: f64) -> Result<f64> {
    Ok(JoiningFamily::get(d, pivot)?.instance(t).min_eigenvalue(e, f))
}

/// Sizes of the invariant blocks of the joining family (partially transposed on `pivot`).
pub fn joining_block_sizes(d: usize, pivot: Option<Pivot>) -> Result<Vec<usize>> {
    Ok(JoiningFamily::get(d, pivot)?.block_sizes())
}

/// Qubit local-positive joinability: minimises the product-state objective
/// [`local_objective`] of the `f = 0` joining operator. `best_free_params`
/// holds the minimising angles and `best_min_eigenvalue` the minimum value.
pub fn oracle_local_positive_joinable(t: EtaTriple, tol: f64) -> FeasibilityResult {
    let (value, angles, evaluations) = local_objective_minimum(t);
    let certificate = if value >= -tol {
        Certificate::SearchExhausted
    } else {
        Certificate::Witness
    };
    FeasibilityResult::new(angles.to_vec(), value, evaluations, tol, certificate)
}

/// Multistart search for a product vector with negative expectation.
pub fn oracle_block_positive(m: &DenseOperator, da: usize, db: usize, tol: f64, seed: u64) -> Result<bool> {
    Ok(block_positive_minimum(m, da, db, seed)?.value >= -tol)
}

/// Observed extremes of the agreement probability over random cone elements
/// together with the analytic extremisers.
pub fn oracle_agreement_extrema(
    d: usize,
    n: usize,
    cone: AgreementCone,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let povm = agreement_povm(d, n)?;
    let mut rng = seeded_rng(seed);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut record = |w: &DenseOperator| -> Result<()> {
        let a = agreement_probability(w, &povm)?;
        lo = lo.min(a);
        hi = hi.max(a);
        Ok(())
    };
    match cone {
        AgreementCone::State => {
            let space = QuditSpace::homogeneous(d, n)?;
            for _ in 0..samples {
                record(&random_density_on(space.clone(), &mut rng))?;
            }
            let sym = crate::agreement::symmetric_projector(d, n)?;
            let top = sym.scale(1.0 / sym.trace().re);
            record(&top)?;
            let rest = &DenseOperator::identity(space) - &sym;
            record(&rest.scale(1.0 / rest.trace().re))?;
        }
        AgreementCone::Channel => {
            if n != 2 {
                return Err(Error::BipartiteOnly(n));
            }
            for _ in 0..samples {
                record(&homocorrelation(&random_cptp_with(d, &mut rng)?)?)?;
            }
            for w in channel_agreement_extremisers(d)? {
                record(&w)?;
            }
        }
    }
    Ok((lo, hi))
}

/// Homocorrelation operators of the identity channel and of the channel whose
/// Choi operator is proportional to `I - V^{T_A}/d`, the projector orthogonal
/// to the maximally entangled vector.
pub fn channel_agreement_extremisers(d: usize) -> Result<[DenseOperator; 2]> {
    let space = QuditSpace::homogeneous(d, 2)?;
    let v = crate::operator::swap_operator(d)?;
    let df = d as f64;
    let identity_channel = v.scale(1.0 / df);
    let vt = partial_transpose(&v, &[0])?;
    let choi = (&DenseOperator::identity(space) - &vt.scale(1.0 / df)).scale(1.0 / (df * df - 1.0));
    let worst = homocorrelation(&inverse_choi(&choi)?)?;
    Ok([identity_channel, worst])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_is_state_joinable_with_zero_cycle() {
        let r = oracle_state_joinable(2, EtaTriple::symmetric(0.0), DEFAULT_TOL).unwrap();
        assert!(r.feasible);
        assert!(r.best_free_params[0].abs() < 1e-9);
        assert!((r.best_min_eigenvalue - 0.125).abs() < 1e-12);
    }

    #[test]
    fn two_singlets_cannot_share_a_party() {
        let r = oracle_state_joinable(2, EtaTriple::new(-1.0, -1.0, 0.0), DEFAULT_TOL).unwrap();
        assert!(!r.feasible);
    }

    #[test]
    fn unsupported_dimension() {
        assert!(oracle_state_joinable(4, EtaTriple::symmetric(0.0), DEFAULT_TOL).is_err());
    }

    #[test]
    fn prescreen_and_full_search_agree() {
        let full = OracleConfig {
            marginal_prescreen: false,
            ..OracleConfig::default()
        };
        for &t in &[EtaTriple::new(0.5, 0.0, 0.0), EtaTriple::new(-0.9, 0.6, 0.2)] {
            let a = oracle_state_joinable(2, t, DEFAULT_TOL).unwrap();
            let b = oracle_state_joinable_with(2, t, &full).unwrap();
            assert_eq!(a.feasible, b.feasible);
            assert!(b.best_min_eigenvalue <= a.best_min_eigenvalue + 1e-12);
        }
    }

    #[test]
    fn channel_extremisers_are_channels_at_the_bounds() {
        for d in 2..=3 {
            let povm = agreement_povm(d, 2).unwrap();
            let [top, bottom] = channel_agreement_extremisers(d).unwrap();
            for (w, want) in [(&top, 1.0), (&bottom, 1.0 / (d as f64 + 1.0))] {
                assert!(crate::maps::is_cptp(&crate::maps::inverse_homocorrelation(w).unwrap()));
                assert!((agreement_probability(w, &povm).unwrap() - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn channel_origin_feasible_and_cloning_infeasible() {
        assert!(oracle_channel_joinable(2, EtaTriple::symmetric(0.0), Pivot::A, DEFAULT_TOL).unwrap().feasible);
        assert!(!oracle_channel_joinable(2, EtaTriple::new(1.0, 1.0, 0.0), Pivot::A, DEFAULT_TOL).unwrap().feasible);
    }

    #[test]
    fn local_oracle_examples() {
        let r = oracle_local_positive_joinable(EtaTriple::symmetric(0.0), DEFAULT_TOL);
        assert!(r.feasible && (r.best_min_eigenvalue - 0.125).abs() < 1e-15);
        assert!(!oracle_local_positive_joinable(EtaTriple::symmetric(1.0), DEFAULT_TOL).feasible);
    }
}
