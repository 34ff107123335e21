//! Seeded property suites covering every module.
//!
//! Each suite is a list of named checks. A check either passes or fails with a
//! short human-readable detail; errors raised while running a check count as
//! failures. Runs are deterministic for a given seed and sample count.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::agreement::{
    agreement_bounds, agreement_povm, agreement_probability, binomial, derived_task_bounds,
    AgreementCone,
};
use crate::brauer::{
    alpha_of_eta, brauer_eigenvalues, brauer_operator, cone_half_planes, cone_vertices,
    eta_of_alpha, is_channel_positive, is_local_positive, is_state_positive,
    tripartite_invariant_operator, werner_operator, BrauerParams,
    Cone, WernerParams, TRIPARTITE_PERMUTATIONS,
};
use crate::error::{Error, Result};
use crate::joinability::{
    bisect_boundary, calibrate_channel_form, channel_margin, classical_region, evaluate_region,
    local_positive_joinable, region_sweep, separable_region, state_margin, CalibrationSample,
    EtaTriple, GridAxis, Pivot, Scenario, SweepGrid, BOUNDARY_TOL, CALIBRATED_QUBIT_OFFSETS,
};
use crate::maps::{
    choi, correlation_expectation, depolarizing, homocorrelation, inverse_choi,
    inverse_homocorrelation, is_cp, is_cptp, is_ppt, map_correlation,
};
use crate::operator::{
    hermitian_eigen, hermitian_eigenvalues, min_eigenvalue, partial_transpose,
    permutation_operator, CMatrix, DenseOperator, QuditSpace,
};
use crate::oracle::{
    block_positive_minimum, haar_unitary, joining_min_eigenvalue, oracle_agreement_extrema,
    oracle_channel_joinable_with, oracle_local_positive_joinable, oracle_state_joinable_with,
    random_cptp_with, random_density_on, random_hermitian, seeded_rng, tensor_power,
    whiten_first_marginal, OracleConfig, SeededRng, DEFAULT_TOL,
};

/// Analytic and oracle verdicts closer than this to a boundary are not compared.
pub const MARGIN_BAND: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Suite {
    Maps,
    Positivity,
    Joinability,
    Agreement,
    All,
}

impl Suite {
    pub const INDIVIDUAL: [Suite; 4] = [Suite::Maps, Suite::Positivity, Suite::Joinability, Suite::Agreement];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Maps => "maps",
            Suite::Positivity => "positivity",
            Suite::Joinability => "joinability",
            Suite::Agreement => "agreement",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [Suite::Maps, Suite::Positivity, Suite::Joinability, Suite::Agreement, Suite::All]
            .into_iter()
            .find(|x| x.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::OutOfRange(format!("unknown suite '{}'", s.trim())))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `samples` sizes the random checks; zero keeps the suites analytic where a
/// check has an analytic-only form and skips oracle cross-checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { seed: 0, samples: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            writeln!(f, "{mark} {}/{}: {}", c.suite, c.name, c.detail)?;
        }
        let failed = self.failures().count();
        write!(
            f,
            "{} checks, {} failed (seed {}, samples {})",
            self.checks.len(),
            failed,
            self.config.seed,
            self.config.samples
        )
    }
}

type CheckFn = fn(&VerifyConfig) -> Result<(bool, String)>;

/// Runs a suite (or all of them) and collects every outcome.
pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> VerifyReport {
    let suites: Vec<Suite> = match suite {
        Suite::All => Suite::INDIVIDUAL.to_vec(),
        s => vec![s],
    };
    let mut checks = Vec::new();
    for s in suites {
        for (name, check) in checks_of(s) {
            let (passed, detail) = match check(cfg) {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            checks.push(CheckOutcome {
                suite: s,
                name: name.to_string(),
                passed,
                detail,
            });
        }
    }
    VerifyReport { config: *cfg, checks }
}

fn checks_of(suite: Suite) -> Vec<(&'static str, CheckFn)> {
    match suite {
        Suite::Maps => vec![
            ("ppt_iff_cptp", ppt_iff_cptp as CheckFn),
            ("ppt_iff_cp_unfiltered", ppt_iff_cp_unfiltered),
            ("choi_is_partial_transpose", choi_is_partial_transpose),
            ("round_trips", round_trips),
            ("correlation_duality", correlation_duality),
            ("linearity", linearity),
            ("depolarizing_covariance", depolarizing_covariance),
            ("npt_states_are_entangled", npt_states_are_entangled),
        ],
        Suite::Positivity => vec![
            ("werner_ranges", werner_ranges as CheckFn),
            ("brauer_spectrum", brauer_spectrum_matches_dense),
            ("state_channel_grid", state_channel_grid),
            ("local_grid_vs_product_search", local_grid_vs_product_search),
            ("qubit_decomposability", qubit_decomposability),
            ("partial_transpose_swaps_parameters", partial_transpose_swaps_parameters),
            ("cone_angle", cone_angle),
            ("party_permutations", party_permutations),
            ("twirl_invariance", twirl_invariance),
        ],
        Suite::Joinability => vec![
            ("containment_chain", containment_chain as CheckFn),
            ("permutation_covariance", permutation_covariance),
            ("tetrahedral_symmetry", tetrahedral_symmetry),
            ("symmetric_thresholds", symmetric_thresholds),
            ("cloning_line", cloning_line),
            ("oracle_agreement", oracle_agreement),
            ("objective_concavity", objective_concavity),
            ("channel_calibration", channel_calibration),
        ],
        Suite::Agreement => vec![
            ("povm_invariants", povm_invariants as CheckFn),
            ("werner_agreement", werner_agreement),
            ("state_bounds", state_bounds),
            ("channel_bounds", channel_bounds),
            ("multiparty_bound", multiparty_bound),
            ("derived_bounds", derived_bounds),
        ],
        Suite::All => Suite::INDIVIDUAL.into_iter().flat_map(checks_of).collect(),
    }
}

fn rng_for(cfg: &VerifyConfig, salt: u64) -> SeededRng {
    seeded_rng(cfg.seed.wrapping_mul(0x2545_f491_4f6c_dd1d) ^ salt)
}

fn uniform(rng: &mut SeededRng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

fn random_triple(rng: &mut SeededRng) -> EtaTriple {
    EtaTriple::new(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0))
}

fn random_orthogonal(d: usize, rng: &mut SeededRng) -> CMatrix {
    let g = DMatrix::<f64>::from_fn(d, d, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    CMatrix::from_fn(d, d, |i, j| Complex64::new(q[(i, j)] * r[(j, j)].signum(), 0.0))
}

fn verdict(mismatches: usize, total: usize, what: &str) -> (bool, String) {
    (mismatches == 0, format!("{mismatches} mismatches in {total} {what}"))
}

// ---- maps ----

fn ppt_iff_cptp(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut rng = rng_for(cfg, 1);
    let mut bad = 0;
    let mut total = 0;
    for k in 0..cfg.samples.max(20) {
        let d = 2 + k % 2;
        let rho = whiten_first_marginal(&random_density_on(QuditSpace::homogeneous(d, 2)?, &mut rng))?;
        if is_ppt(&rho)? != is_cptp(&inverse_homocorrelation(&rho)?) {
            bad += 1;
        }
        total += 1;
    }
    for _ in 0..cfg.samples.max(20) {
        let d = rng.random_range(2..=4);
        let p = BrauerParams::new(d, uniform(&mut rng, -1.0, 1.0), uniform(&mut rng, -1.0, 1.0))?;
        let w = brauer_operator(p)?;
        if hermitian_eigenvalues(&w)?[0] < 0.0 {
            continue;
        }
        if is_ppt(&w)? != is_cptp(&inverse_homocorrelation(&w)?) {
            bad += 1;
        }
        total += 1;
    }
    Ok(verdict(bad, total, "filtered random states and Brauer states"))
}

fn ppt_iff_cp_unfiltered(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut rng = rng_for(cfg, 2);
    let mut bad = 0;
    let n = cfg.samples.max(20);
    for k in 0..n {
        let d = 2 + k % 2;
        let rho = random_density_on(QuditSpace::homogeneous(d, 2)?, &mut rng);
        if is_ppt(&rho)? != is_cp(&inverse_homocorrelation(&rho)?) {
            bad += 1;
        }
    }
    Ok(verdict(bad, n, "random states"))
}

fn choi_is_partial_transpose(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut rng = rng_for(cfg, 3);
    let mut worst = 0.0f64;
    for k in 0..cfg.samples.clamp(10, 50) {
        let map = random_cptp_with(2 + k % 2, &mut rng)?;
        let pt = partial_transpose(&homocorrelation(&map)?, &[0])?;
        worst = worst.max(choi(&map)?.max_abs_diff(&pt));
    }
    Ok((worst < 1e-13, format!("largest entry difference {worst:.2e}")))
}

fn round_trips(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut rng = rng_for(cfg, 4);
    let mut worst = 0.0f64;
    for k in 0..cfg.samples.clamp(10, 50) {
        let map = random_cptp_with(2 + k % 3, &mut rng)?;
        worst = worst.max(inverse_homocorrelation(&homocorrelation(&map)?)?.max_abs_diff(&map));
        worst = worst.max(inverse_choi(&choi(&map)?)?.max_abs_diff(&map));
    }
    Ok((worst < 1e-13, format!("largest round-trip error {worst:.2e}")))
}

fn hermitian_on(d: usize, rng: &mut SeededRng) -> Result<DenseOperator> {
    DenseOperator::new(QuditSpace::new(vec![d])?, random_hermitian(d, rng))
}

fn correlation_duality(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut rng = rng_for(cfg, 5);
    let mut worst = 0.0f64;
    for k in 0..cfg.samples.clamp(10, 50) {
        let d = 2 + k % 2;
        let map = random_cptp_with(d, &mut rng)?;
        let (a, b) = (hermitian_on(d, &mut rng)?, hermitian_on(d, &mut rng)?);
        let via_operator = correlation_expectation(&homocorrelation(&map)?, &a, &b)?;
        worst = worst.max((via_operator - map_correlation(&map, &a, &b)?).abs());
    }
    Ok((worst < 1e-12, format!("largest difference {worst:.2e}")))
}

fn linearity(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut rng = rng_for(cfg, 6);
    let mut worst = 0.0f64;
    for _ in 0..cfg.samples.clamp(10, 50) {
        let (m1, m2) = (random_cptp_with(3, &mut rng)?, random_cptp_with(3, &mut rng)?);
        let (a, b) = (uniform(&mut rng, -2.0, 2.0), uniform(&mut rng, -2.0, 2.0));
        let lhs = homocorrelation(&m1.combine(a, &m2, b)?)?;
        let rhs = &homocorrelation(&m1)?.scale(a) + &homocorrelation(&m2)?.scale(b);
        worst = worst.max(lhs.max_abs_diff(&rhs));
    }
    Ok((worst < 1e-13, format!("largest difference {worst:.2e}")))
}

fn depolarizing_covariance(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut rng = rng_for(cfg, 7);
    let mut worst = 0.0f64;
    for d in 2..=4 {
        for _ in 0..5 {
            let eta = uniform(&mut rng, -1.0, 1.0);
            let h = homocorrelation(&depolarizing(d, eta)?)?;
            worst = worst.max(h.max_abs_diff(&werner_operator(WernerParams::new(d, eta)?)?));
            let u = haar_unitary(d, &mut rng);
            worst = worst.max(h.conjugate_by(&u.kronecker(&u))?.max_abs_diff(&h));
        }
    }
    Ok((worst < 1e-13, format!("largest deviation {worst:.2e}")))
}

fn npt_states_are_entangled(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut rng = rng_for(cfg, 8);
    let (mut npt, mut bad) = (0, 0);
    for k in 0..cfg.samples.clamp(10, 40) {
        let d = 2 + k % 2;
        let rho = random_density_on(QuditSpace::homogeneous(d, 2)?, &mut rng);
        let pt = partial_transpose(&rho, &[0])?;
        let (values, vectors) = hermitian_eigen(&pt)?;
        if values[0] >= -1e-10 {
            continue;
        }
        npt += 1;
        let v = vectors.column(0).into_owned();
        let witness = partial_transpose(&DenseOperator::projector(rho.space().clone(), &v)?, &[0])?;
        let product_min = block_positive_minimum(&witness, d, d, k as u64)?.value;
        let value = witness.trace_product(&rho)?.re;
        if product_min < -1e-10 || value >= 0.0 {
            bad += 1;
        }
    }
    Ok((
        bad == 0,
        format!("{npt} NPT states, {bad} without a product-positive witness"),
    ))
}

// ---- positivity ----

fn werner_ranges(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut bad = Vec::new();
    let mut compared = 0;
    for d in 2..=5usize {
        let df = d as f64;
        let edges = [
            ("state", -1.0 / (df - 1.0), 1.0 / (df + 1.0)),
            ("channel", -1.0 / (df * df - 1.0), 1.0),
            ("local", -1.0 / (df - 1.0), 1.0),
        ];
        for (cone, lo, hi) in edges {
            let test = |eta: f64| -> Result<bool> {
                let p = WernerParams::new(d, eta)?.to_brauer();
                Ok(match cone {
                    "state" => is_state_positive(p).holds,
                    "channel" => is_channel_positive(p).holds,
                    _ => is_local_positive(p).holds,
                })
            };
            let ok = test(lo)? && test(hi)? && !test(lo - 1e-9)? && !test(hi + 1e-9)?;
            if !ok {
                bad.push(format!("{cone} d={d}"));
            }
        }
        let seed = cfg.seed ^ d as u64;
        for k in 0..=40 {
            let eta = -1.5 + 3.0 * k as f64 / 40.0;
            let p = WernerParams::new(d, eta)?.to_brauer();
            let w = brauer_operator(p)?;
            let dense_state = min_eigenvalue(&w)?;
            let dense_channel = min_eigenvalue(&partial_transpose(&w, &[0])?)?;
            let product = block_positive_minimum(&w, d, d, seed)?.value;
            for (v, dense) in [
                (is_state_positive(p), dense_state),
                (is_channel_positive(p), dense_channel),
                (is_local_positive(p), product),
            ] {
                if v.margin.abs() <= MARGIN_BAND {
                    continue;
                }
                compared += 1;
                if v.holds != (dense >= -DEFAULT_TOL) {
                    bad.push(format!("dense d={d} eta={eta}"));
                }
            }
        }
    }
    Ok((
        bad.is_empty(),
        if bad.is_empty() {
            format!("all flips exact for d = 2..5, {compared} dense comparisons agree")
        } else {
            format!("failures: {}", bad.join(", "))
        },
    ))
}

fn brauer_spectrum_matches_dense(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut rng = rng_for(cfg, 11);
    let mut worst = 0.0f64;
    for k in 0..cfg.samples.clamp(9, 30) {
        let d = 2 + k % 3;
        let p = BrauerParams::new(d, uniform(&mut rng, -1.5, 1.5), uniform(&mut rng, -1.5, 1.5))?;
        let dense = hermitian_eigenvalues(&brauer_operator(p)?)?;
        for (a, b) in dense.iter().zip(brauer_eigenvalues(p)) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok((worst < 1e-12, format!("largest eigenvalue error {worst:.2e}")))
}

fn state_channel_grid(_: &VerifyConfig) -> Result<(bool, String)> {
    let (mut bad, mut compared) = (0, 0);
    for d in 2..=3 {
        for i in 0..41 {
            for j in 0..41 {
                let eta = -1.5 + 3.0 * i as f64 / 40.0;
                let beta = -1.5 + 3.0 * j as f64 / 40.0;
                let p = BrauerParams::new(d, eta, beta)?;
                let w = brauer_operator(p)?;
                let s = is_state_positive(p);
                let c = is_channel_positive(p);
                let dense_s = min_eigenvalue(&w)?;
                let dense_c = min_eigenvalue(&partial_transpose(&w, &[0])?)?;
                for (v, dense) in [(s, dense_s), (c, dense_c)] {
                    if v.margin.abs() > MARGIN_BAND {
                        compared += 1;
                        bad += usize::from(v.holds != (dense >= -DEFAULT_TOL));
                    }
                }
            }
        }
    }
    Ok(verdict(bad, compared, "grid comparisons"))
}

fn local_grid_vs_product_search(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let (mut bad, mut compared) = (0, 0);
    for d in 2..=3 {
        for i in 0..11 {
            for j in 0..11 {
                let eta = -1.5 + 3.0 * i as f64 / 10.0;
                let beta = -1.5 + 3.0 * j as f64 / 10.0;
                let p = BrauerParams::new(d, eta, beta)?;
                let v = is_local_positive(p);
                if v.margin.abs() <= MARGIN_BAND {
                    continue;
                }
                let found = block_positive_minimum(&brauer_operator(p)?, d, d, cfg.seed)?.value;
                compared += 1;
                bad += usize::from(v.holds != (found >= -DEFAULT_TOL));
            }
        }
    }
    Ok(verdict(bad, compared, "grid comparisons"))
}

fn convex_hull(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<[f64; 2]> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 1e-14 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn qubit_decomposability(_: &VerifyConfig) -> Result<(bool, String)> {
    let mut union = cone_vertices(2, Cone::State);
    union.extend(cone_vertices(2, Cone::Channel));
    let hull = convex_hull(union);
    let local = cone_vertices(2, Cone::Local);
    let inside = |p: [f64; 2], planes: &[[f64; 2]]| planes.iter().all(|h| h[0] * p[0] + h[1] * p[1] <= 1.0 + 1e-12);
    let hull_in_local = hull.iter().all(|&p| inside(p, &cone_half_planes(2, Cone::Local)));
    let same = hull.len() == local.len()
        && local
            .iter()
            .all(|v| hull.iter().any(|h| (h[0] - v[0]).abs() < 1e-12 && (h[1] - v[1]).abs() < 1e-12));
    Ok((
        hull_in_local && same,
        format!(
            "hull of state and channel polygons has {} vertices, local polygon {}",
            hull.len(),
            local.len()
        ),
    ))
}

fn partial_transpose_swaps_parameters(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut rng = rng_for(cfg, 12);
    let mut worst = 0.0f64;
    let mut swapped_planes = true;
    for d in 2..=4 {
        let state = cone_half_planes(d, Cone::State);
        let channel = cone_half_planes(d, Cone::Channel);
        swapped_planes &= state.iter().zip(&channel).all(|(s, c)| s[0] == c[1] && s[1] == c[0]);
        for _ in 0..5 {
            let p = BrauerParams::new(d, uniform(&mut rng, -1.0, 1.0), uniform(&mut rng, -1.0, 1.0))?;
            let pt = partial_transpose(&brauer_operator(p)?, &[0])?;
            worst = worst.max(pt.max_abs_diff(&brauer_operator(p.swapped())?));
        }
    }
    Ok((
        swapped_planes && worst < 1e-15,
        format!("largest deviation {worst:.2e}, channel cone is the mirrored state cone: {swapped_planes}"),
    ))
}

fn cone_angle(_: &VerifyConfig) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for d in 2..=6 {
        let v = crate::operator::swap_operator(d)?;
        let iv = &DenseOperator::identity(v.space().clone()) + &v;
        let cos = v.hs_inner(&iv)?.re / (v.hs_inner(&v)?.re * iv.hs_inner(&iv)?.re).sqrt();
        let df = d as f64;
        worst = worst.max((cos - ((df + 1.0) / (2.0 * df)).sqrt()).abs());
    }
    Ok((worst < 1e-14, format!("largest cosine error {worst:.2e} for d = 2..6")))
}

fn party_permutations(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut rng = rng_for(cfg, 13);
    let mut worst = 0.0f64;
    for d in 2..=3 {
        let space = QuditSpace::homogeneous(d, 3)?;
        for _ in 0..4 {
            let t = random_triple(&mut rng);
            let e = if d == 2 { 0.0 } else { uniform(&mut rng, -0.3, 0.3) };
            let f = uniform(&mut rng, -0.3, 0.3);
            let w = tripartite_invariant_operator(d, t, e, f)?;
            for perm in TRIPARTITE_PERMUTATIONS {
                let p = permutation_operator(&space, &perm)?;
                let moved = w.conjugate_by(p.matrix())?;
                let odd = perm.iter().enumerate().filter(|&(k, &v)| k != v).count() == 2;
                let image = tripartite_invariant_operator(d, t.relabel(perm), e, if odd { -f } else { f })?;
                worst = worst.max(moved.max_abs_diff(&image));
            }
        }
    }
    Ok((worst < 1e-14, format!("largest deviation {worst:.2e}")))
}

fn twirl_invariance(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut rng = rng_for(cfg, 14);
    let mut worst = 0.0f64;
    for d in 2..=3 {
        let t = random_triple(&mut rng);
        let w = tripartite_invariant_operator(d, t, 0.1, -0.2)?;
        let u = haar_unitary(d, &mut rng);
        worst = worst.max(w.conjugate_by(&tensor_power(&u, 3))?.max_abs_diff(&w));
        let p = BrauerParams::new(d, uniform(&mut rng, -1.0, 1.0), uniform(&mut rng, -1.0, 1.0))?;
        let b = brauer_operator(p)?;
        let o = random_orthogonal(d, &mut rng);
        worst = worst.max(b.conjugate_by(&o.kronecker(&o))?.max_abs_diff(&b));
        let wer = werner_operator(WernerParams::new(d, p.eta())?)?;
        worst = worst.max(wer.conjugate_by(&u.kronecker(&u))?.max_abs_diff(&wer));
    }
    Ok((worst < 1e-13, format!("largest deviation {worst:.2e}")))
}

// ---- joinability ----

fn default_grid() -> Result<SweepGrid> {
    Ok(SweepGrid::cube(GridAxis::new(-1.0, 1.0, 21)?))
}

fn containment_chain(_: &VerifyConfig) -> Result<(bool, String)> {
    let grid = default_grid()?;
    let mut bad = 0;
    for d in [2, 3] {
        let rows = region_sweep(&grid, d, &Scenario::ALL)?;
        for r in &rows {
            let holds = |s: Scenario| r.get(s).map(|v| v.holds);
            let imp = |a: Option<bool>, b: Option<bool>| !(a == Some(true) && b == Some(false));
            let ok = imp(holds(Scenario::Separable), holds(Scenario::StateJoin))
                && imp(holds(Scenario::StateJoin), holds(Scenario::LocalPositiveJoin))
                && imp(holds(Scenario::LocalPositiveJoin), holds(Scenario::Classical))
                && [Scenario::ChannelJoinA, Scenario::ChannelJoinB, Scenario::ChannelJoinC]
                    .into_iter()
                    .all(|c| imp(holds(c), holds(Scenario::LocalPositiveJoin)));
            bad += usize::from(!ok);
        }
    }
    Ok(verdict(bad, 2 * grid.len(), "grid points (d = 2, 3)"))
}

fn permutation_covariance(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut rng = rng_for(cfg, 21);
    let mut worst = 0.0f64;
    for _ in 0..cfg.samples.clamp(20, 200) {
        let t = random_triple(&mut rng);
        for d in [2, 3] {
            for perm in TRIPARTITE_PERMUTATIONS {
                let u = t.relabel(perm);
                worst = worst.max((state_margin(d, t) - state_margin(d, u)).abs());
                if d == 2 {
                    worst = worst.max((local_positive_joinable(t).margin - local_positive_joinable(u).margin).abs());
                }
                for pivot in Pivot::ALL {
                    let moved = channel_margin(d, u, pivot.relabel(perm));
                    worst = worst.max((channel_margin(d, t, pivot) - moved).abs());
                }
            }
        }
    }
    Ok((worst < 1e-12, format!("largest margin change {worst:.2e}")))
}

fn union_margin(t: EtaTriple) -> f64 {
    Pivot::ALL
        .iter()
        .map(|&p| channel_margin(2, t, p))
        .fold(state_margin(2, t), f64::max)
}

fn tetrahedral_symmetry(_: &VerifyConfig) -> Result<(bool, String)> {
    let grid = default_grid()?;
    let mut bad = 0;
    for t in grid.triples() {
        let m = union_margin(t);
        for flip in [[-1.0, -1.0, 1.0], [-1.0, 1.0, -1.0], [1.0, -1.0, -1.0]] {
            let u = EtaTriple::new(flip[0] * t.ab, flip[1] * t.ac, flip[2] * t.bc);
            let n = union_margin(u);
            if m.abs() > BOUNDARY_TOL && n.abs() > BOUNDARY_TOL && (m >= 0.0) != (n >= 0.0) {
                bad += 1;
            }
        }
    }
    Ok(verdict(bad, 3 * grid.len(), "sign-flip pairs"))
}

fn symmetric_thresholds(_: &VerifyConfig) -> Result<(bool, String)> {
    let sym = EtaTriple::symmetric;
    let cases: [(&str, f64, f64, Box<dyn Fn(f64) -> f64>); 8] = [
        ("state", -0.5, 0.0, Box::new(|x| state_margin(2, sym(x)))),
        ("state", 0.0, 0.5, Box::new(|x| state_margin(2, sym(x)))),
        ("channel", -0.3, 0.0, Box::new(|x| channel_margin(2, sym(x), Pivot::A))),
        ("channel", 0.0, 0.5, Box::new(|x| channel_margin(2, sym(x), Pivot::A))),
        ("local", -0.5, 0.0, Box::new(|x| local_positive_joinable(sym(x)).margin)),
        ("local", 0.5, 0.9, Box::new(|x| local_positive_joinable(sym(x)).margin)),
        ("separable", -0.3, 0.0, Box::new(|x| separable_region(sym(x)).margin)),
        ("separable", 0.0, 0.5, Box::new(|x| separable_region(sym(x)).margin)),
    ];
    let expected = [-1.0 / 3.0, 1.0 / 3.0, -0.2, 1.0 / 3.0, -1.0 / 3.0, 2.0 / 3.0, -1.0 / 6.0, 1.0 / 3.0];
    let mut found = Vec::new();
    let mut ok = true;
    for ((name, lo, hi, f), want) in cases.iter().zip(expected) {
        let x = bisect_boundary(*lo, *hi, f, 60);
        ok &= (x - want).abs() < 1e-6 && (f(*lo) >= 0.0) != (f(*hi) >= 0.0);
        found.push(format!("{name} {x:.6}"));
    }
    Ok((ok, found.join(", ")))
}

fn cloning_line(_: &VerifyConfig) -> Result<(bool, String)> {
    let line = |x: f64| channel_margin(2, EtaTriple::new(x, x, x / 2.0), Pivot::A);
    let x = bisect_boundary(0.5, 0.9, line, 60);
    let alpha = alpha_of_eta(2, x);
    let bound = 5.0 / 6.0;
    Ok((
        (x - 2.0 / 3.0).abs() < 1e-6 && (alpha - bound).abs() < 1e-6 && line(0.5) > 0.0 && line(0.9) < 0.0,
        format!("flip at eta = {x:.9}, agreement {alpha:.9}"),
    ))
}

fn oracle_agreement(cfg: &VerifyConfig) -> Result<(bool, String)> {
    if cfg.samples == 0 {
        return Ok((true, "skipped (no samples)".into()));
    }
    let mut rng = rng_for(cfg, 22);
    let screening = OracleConfig::screening();
    let (mut bad, mut compared) = (0, 0);
    let mut note = Vec::new();
    let mut compare = |analytic: f64, feasible: bool, what: &str, t: EtaTriple| {
        if analytic.abs() > MARGIN_BAND {
            compared += 1;
            if (analytic >= -BOUNDARY_TOL) != feasible {
                bad += 1;
                if note.len() < 3 {
                    note.push(format!("{what} at ({:.4}, {:.4}, {:.4})", t.ab, t.ac, t.bc));
                }
            }
        }
    };
    for k in 0..cfg.samples {
        let t = random_triple(&mut rng);
        for d in [2, 3] {
            let r = oracle_state_joinable_with(d, t, &screening)?;
            compare(state_margin(d, t), r.feasible, "state", t);
        }
        let pivot = Pivot::ALL[k % 3];
        for d in [2, 3] {
            let r = oracle_channel_joinable_with(d, t, pivot, &screening)?;
            compare(channel_margin(d, t, pivot), r.feasible, "channel", t);
        }
        let r = oracle_local_positive_joinable(t, DEFAULT_TOL);
        compare(local_positive_joinable(t).margin, r.feasible, "local", t);
    }
    let mut detail = format!("{bad} mismatches in {compared} oracle comparisons");
    if !note.is_empty() {
        detail.push_str(&format!(" ({})", note.join("; ")));
    }
    Ok((bad == 0, detail))
}

fn objective_concavity(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut rng = rng_for(cfg, 23);
    let mut worst = 0.0f64;
    for _ in 0..cfg.samples.clamp(10, 50) {
        let t = random_triple(&mut rng);
        let pivot = [None, Some(Pivot::A), Some(Pivot::B)][rng.random_range(0..3)];
        let x = [uniform(&mut rng, -0.5, 0.5), uniform(&mut rng, -0.5, 0.5)];
        let y = [uniform(&mut rng, -0.5, 0.5), uniform(&mut rng, -0.5, 0.5)];
        let g = |p: [f64; 2]| joining_min_eigenvalue(3, t, pivot, p[0], p[1]);
        let mid = g([(x[0] + y[0]) / 2.0, (x[1] + y[1]) / 2.0])?;
        worst = worst.max((g(x)? + g(y)?) / 2.0 - mid);
    }
    Ok((worst <= 1e-12, format!("largest midpoint excess {worst:.2e}")))
}

fn channel_calibration(cfg: &VerifyConfig) -> Result<(bool, String)> {
    if cfg.samples == 0 {
        return Ok((true, "skipped (no samples)".into()));
    }
    let grid = SweepGrid::cube(GridAxis::new(-1.0, 1.0, 11)?);
    let samples = grid
        .triples()
        .into_iter()
        .map(|t| {
            let r = oracle_channel_joinable_with(2, t, Pivot::A, &OracleConfig::default())?;
            Ok(CalibrationSample {
                oriented: t,
                oracle_value: r.best_min_eigenvalue,
                feasible: r.feasible,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = calibrate_channel_form(2, &samples, MARGIN_BAND);
    Ok((
        fit.offsets == CALIBRATED_QUBIT_OFFSETS && fit.disagreements == 0,
        format!(
            "fit lhs {} inner {} cap {} with {} disagreements over {} points",
            fit.offsets.lhs, fit.offsets.inner, fit.offsets.cap, fit.disagreements, fit.scored
        ),
    ))
}

// ---- agreement ----

fn povm_invariants(_: &VerifyConfig) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for (d, n) in [(2, 2), (3, 2), (2, 3), (3, 3), (2, 4)] {
        let p = agreement_povm(d, n)?;
        let id = DenseOperator::identity(p.e_agree.space().clone());
        worst = worst.max((&p.e_agree + &p.e_disagree).max_abs_diff(&id));
        worst = worst.max(-hermitian_eigenvalues(&p.e_agree)?[0]);
        worst = worst.max(-hermitian_eigenvalues(&p.e_disagree)?[0]);
        worst = worst.max((p.e_agree.trace().re - d as f64).abs());
        let space = p.e_agree.space().clone();
        let swap: Vec<usize> = (0..n).map(|k| if k < 2 { 1 - k } else { k }).collect();
        let v = permutation_operator(&space, &swap)?;
        worst = worst.max(p.e_agree.conjugate_by(v.matrix())?.max_abs_diff(&p.e_agree));
    }
    Ok((worst < 1e-12, format!("largest defect {worst:.2e}")))
}

fn werner_agreement(_: &VerifyConfig) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for d in 2..=4 {
        let p = agreement_povm(d, 2)?;
        for k in 0..=10 {
            let eta = -1.0 + 0.2 * k as f64;
            let w = werner_operator(WernerParams::new(d, eta)?)?;
            worst = worst.max((agreement_probability(&w, &p)? - alpha_of_eta(d, eta)).abs());
            worst = worst.max((eta_of_alpha(d, alpha_of_eta(d, eta)) - eta).abs());
        }
    }
    Ok((worst < 1e-13, format!("largest deviation {worst:.2e}")))
}

fn sampled_bounds(cfg: &VerifyConfig, cone: AgreementCone, salt: u64) -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for d in [2, 3] {
        let (lo, hi) = agreement_bounds(d, 2, cone)?;
        let (seen_lo, seen_hi) = oracle_agreement_extrema(d, 2, cone, cfg.samples, cfg.seed ^ salt)?;
        ok &= (seen_lo - lo).abs() < 1e-12 && (seen_hi - hi).abs() < 1e-12;
        parts.push(format!("d={d}: [{seen_lo:.12}, {seen_hi:.12}] vs [{lo:.12}, {hi:.12}]"));
    }
    Ok((ok, parts.join("; ")))
}

fn state_bounds(cfg: &VerifyConfig) -> Result<(bool, String)> {
    sampled_bounds(cfg, AgreementCone::State, 31)
}

fn channel_bounds(cfg: &VerifyConfig) -> Result<(bool, String)> {
    sampled_bounds(cfg, AgreementCone::Channel, 32)
}

fn multiparty_bound(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let (lo, hi) = agreement_bounds(2, 3, AgreementCone::State)?;
    let (seen_lo, seen_hi) = oracle_agreement_extrema(2, 3, AgreementCone::State, cfg.samples.min(100), cfg.seed)?;
    let closed = 2.0 / binomial(4, 3);
    Ok((
        (hi - closed).abs() < 1e-15 && (seen_hi - hi).abs() < 1e-12 && (seen_lo - lo).abs() < 1e-12,
        format!("observed [{seen_lo:.12}, {seen_hi:.12}], bound {hi}"),
    ))
}

fn derived_bounds(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut ok = true;
    for d in 2..=6 {
        let b = derived_task_bounds(d)?;
        let df = d as f64;
        ok &= (b.cloning_alpha_max - (df + 3.0) / (2.0 * (df + 1.0))).abs() < 1e-15;
        ok &= b.sharability_alpha_min_qubit.is_some() == (d == 2);
    }
    let sharability = derived_task_bounds(2)?.sharability_alpha_min_qubit.unwrap_or(f64::NAN);
    ok &= (sharability - 1.0 / 6.0).abs() < 1e-15;
    let eta = eta_of_alpha(2, sharability);
    let edge = EtaTriple::new(eta, eta, eta_of_alpha(2, 2.0 / 3.0));
    let beyond = EtaTriple::new(eta - 1e-3, eta - 1e-3, edge.bc);
    if cfg.samples > 0 {
        let cfg_oracle = OracleConfig::default();
        ok &= oracle_state_joinable_with(2, edge, &cfg_oracle)?.feasible;
        ok &= !oracle_state_joinable_with(2, beyond, &cfg_oracle)?.feasible;
    }
    ok &= classical_region(2, edge).holds && !classical_region(2, beyond).holds;
    Ok((
        ok,
        format!(
            "cloning (d+3)/(2(d+1)) for d = 2..6, qubit sharability {sharability:.12} at eta = ({:.6}, {:.6}, {:.6})",
            edge.ab, edge.ac, edge.bc
        ),
    ))
}

/// Counts analytic-oracle disagreements outside the margin band for one scenario
/// on a list of triples. Used by the acceptance suite and the CLI.
pub fn count_disagreements(
    d: usize,
    scenario: Scenario,
    triples: &[EtaTriple],
    cfg: &OracleConfig,
) -> Result<(usize, usize)> {
    use rayon::prelude::*;
    let results: Vec<Option<bool>> = triples
        .par_iter()
        .map(|&t| -> Result<Option<bool>> {
            let row = evaluate_region(d, t, &[scenario])?;
            let Some(v) = row.get(scenario) else {
                return Ok(None);
            };
            if v.margin.abs() <= MARGIN_BAND {
                return Ok(None);
            }
            let feasible = oracle_verdict(d, scenario, t, cfg)?;
            Ok(feasible.map(|f| f != v.holds))
        })
        .collect::<Result<_>>()?;
    let compared = results.iter().filter(|r| r.is_some()).count();
    let bad = results.iter().filter(|r| **r == Some(true)).count();
    Ok((bad, compared))
}

/// Oracle verdict for one scenario, or `None` where no oracle exists.
pub fn oracle_verdict(d: usize, scenario: Scenario, t: EtaTriple, cfg: &OracleConfig) -> Result<Option<bool>> {
    Ok(match scenario {
        Scenario::StateJoin => Some(oracle_state_joinable_with(d, t, cfg)?.feasible),
        Scenario::ChannelJoinA | Scenario::ChannelJoinB | Scenario::ChannelJoinC => {
            let pivot = scenario.pivot().expect("channel scenario has a pivot");
            Some(oracle_channel_joinable_with(d, t, pivot, cfg)?.feasible)
        }
        Scenario::LocalPositiveJoin if d == 2 => Some(oracle_local_positive_joinable(t, cfg.tol).feasible),
        _ => None,
    })
}
