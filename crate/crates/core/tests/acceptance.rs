//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Runs without the libtest harness so the report is always printed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use joinlab_core::agreement::{agreement_bounds, binomial, derived_task_bounds, AgreementCone};
use joinlab_core::brauer::{
    alpha_of_eta, brauer_operator, eta_of_alpha, is_channel_positive, is_local_positive,
    is_state_positive, BrauerParams, WernerParams,
};
use joinlab_core::joinability::{
    bisect_boundary, calibrate_channel_form, cayley_expression, channel_margin,
    local_positive_cubic, separable_region, state_joinable, state_margin, CalibrationSample,
    EtaTriple, GridAxis, Pivot, Scenario, SweepGrid, CALIBRATED_QUBIT_OFFSETS,
};
use joinlab_core::maps::{inverse_homocorrelation, is_cptp, is_ppt};
use joinlab_core::operator::{min_eigenvalue, partial_transpose, QuditSpace};
use joinlab_core::oracle::{
    block_positive_minimum, local_objective, oracle_agreement_extrema, oracle_channel_joinable,
    oracle_channel_joinable_with, oracle_local_positive_joinable, oracle_state_joinable,
    random_density_on, seeded_rng, whiten_first_marginal, OracleConfig, DEFAULT_TOL,
};
use joinlab_core::verify::{count_disagreements, run_suite, Suite, VerifyConfig, MARGIN_BAND};
use joinlab_core::Result;
use rand::Rng;
use rayon::prelude::*;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn grid(count: usize) -> SweepGrid {
    SweepGrid::cube(GridAxis::new(-1.0, 1.0, count).expect("valid axis"))
}

fn werner_ranges() -> Result<Outcome> {
    let mut flips_ok = true;
    let (mut compared, mut bad) = (0, 0);
    for d in 2..=5usize {
        let df = d as f64;
        let cones: [(fn(BrauerParams) -> joinlab_core::Verdict, f64, f64); 3] = [
            (is_state_positive, -1.0 / (df - 1.0), 1.0 / (df + 1.0)),
            (is_channel_positive, -1.0 / (df * df - 1.0), 1.0),
            (is_local_positive, -1.0 / (df - 1.0), 1.0),
        ];
        for (pred, lo, hi) in cones {
            let at = |eta: f64| pred(WernerParams::new(d, eta).unwrap().to_brauer());
            flips_ok &= at(lo).holds && at(hi).holds && !at(lo - 1e-9).holds && !at(hi + 1e-9).holds;
            flips_ok &= at(lo).margin.abs() < 1e-12 && at(hi).margin.abs() < 1e-12;
        }
        for k in 0..=300 {
            let eta = -1.5 + 3.0 * k as f64 / 300.0;
            let p = WernerParams::new(d, eta)?.to_brauer();
            let w = brauer_operator(p)?;
            let dense = [
                min_eigenvalue(&w)?,
                min_eigenvalue(&partial_transpose(&w, &[0])?)?,
                block_positive_minimum(&w, d, d, k as u64)?.value,
            ];
            let analytic = [is_state_positive(p), is_channel_positive(p), is_local_positive(p)];
            for (v, x) in analytic.iter().zip(dense) {
                if v.margin.abs() > 1e-6 {
                    compared += 1;
                    bad += usize::from(v.holds != (x >= -DEFAULT_TOL));
                }
            }
        }
    }
    outcome(
        flips_ok && bad == 0,
        format!("flips exact for d = 2..5: {flips_ok}; {bad} of {compared} dense/oracle comparisons disagree"),
    )
}

fn ppt_iff_cptp() -> Result<Outcome> {
    let mut rng = seeded_rng(2024);
    let mut exceptions = 0;
    let mut counts = [0usize; 3];
    for d in [2, 3] {
        for _ in 0..500 {
            let rho = whiten_first_marginal(&random_density_on(QuditSpace::homogeneous(d, 2)?, &mut rng))?;
            exceptions += usize::from(is_ppt(&rho)? != is_cptp(&inverse_homocorrelation(&rho)?));
            counts[d - 2] += 1;
        }
    }
    while counts[2] < 200 {
        let d = rng.random_range(2..=4);
        let p = BrauerParams::new(d, rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))?;
        if !is_state_positive(p).holds {
            continue;
        }
        let w = brauer_operator(p)?;
        exceptions += usize::from(is_ppt(&w)? != is_cptp(&inverse_homocorrelation(&w)?));
        counts[2] += 1;
    }
    outcome(
        exceptions == 0,
        format!(
            "{exceptions} exceptions over {} qubit, {} qutrit and {} Brauer states",
            counts[0], counts[1], counts[2]
        ),
    )
}

fn state_region() -> Result<Outcome> {
    let triples = grid(41).triples();
    let cfg = OracleConfig::screening();
    let mut ok = true;
    let mut parts = Vec::new();
    for d in [2, 3] {
        let (bad, compared) = count_disagreements(d, Scenario::StateJoin, &triples, &cfg)?;
        let agreement = 1.0 - bad as f64 / triples.len() as f64;
        ok &= bad == 0 && agreement >= 0.999;
        parts.push(format!(
            "d={d}: {:.4}% agreement, {bad} disagreements outside the band ({compared} compared)",
            100.0 * agreement
        ));
    }
    let oracle_sign = |x: f64| {
        let r = oracle_state_joinable(2, EtaTriple::symmetric(x), DEFAULT_TOL).unwrap();
        if r.feasible { 1.0 } else { -1.0 }
    };
    let analytic = |x: f64| state_margin(2, EtaTriple::symmetric(x));
    let flips = [
        (bisect_boundary(-0.5, 0.0, analytic, 60), bisect_boundary(-0.5, 0.0, oracle_sign, 40), -1.0 / 3.0),
        (bisect_boundary(0.0, 0.5, analytic, 60), bisect_boundary(0.0, 0.5, oracle_sign, 40), 1.0 / 3.0),
    ];
    for (a, o, want) in flips {
        ok &= (a - want).abs() < 1e-6 && (o - want).abs() < 1e-6;
        parts.push(format!("flip {want:.6}: analytic {a:.9}, oracle {o:.9}"));
    }
    outcome(ok, parts.join("; "))
}

fn channel_region() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    let origin = oracle_channel_joinable(2, EtaTriple::symmetric(0.0), Pivot::A, DEFAULT_TOL)?;
    let clones = [-1.0, 0.0, 0.5, 1.0]
        .iter()
        .map(|&bc| oracle_channel_joinable(2, EtaTriple::new(1.0, 1.0, bc), Pivot::A, DEFAULT_TOL))
        .collect::<Result<Vec<_>>>()?;
    let no_clone = clones.iter().all(|r| !r.feasible);
    ok &= origin.feasible && no_clone;
    parts.push(format!("origin feasible {}, (1,1,.) infeasible {no_clone}", origin.feasible));

    let oracle_line = |x: f64| {
        let r = oracle_channel_joinable(2, EtaTriple::new(x, x, x / 2.0), Pivot::A, DEFAULT_TOL).unwrap();
        if r.feasible { 1.0 } else { -1.0 }
    };
    let flip = bisect_boundary(0.5, 0.9, oracle_line, 40);
    let cloning_alpha = 5.0 / 6.0;
    let bound = derived_task_bounds(2)?.cloning_alpha_max;
    ok &= (flip - 2.0 / 3.0).abs() < 1e-6 && (alpha_of_eta(2, flip) - cloning_alpha).abs() < 1e-6;
    ok &= (bound - cloning_alpha).abs() < 1e-15;
    parts.push(format!("cloning flip at {flip:.9}, agreement {:.9}", alpha_of_eta(2, flip)));

    let triples = grid(21).triples();
    let full = OracleConfig::default();
    let samples = triples
        .par_iter()
        .map(|&t| {
            let r = oracle_channel_joinable_with(2, t, Pivot::A, &full)?;
            Ok(CalibrationSample {
                oriented: t,
                oracle_value: r.best_min_eigenvalue,
                feasible: r.feasible,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = calibrate_channel_form(2, &samples, MARGIN_BAND);
    ok &= fit.offsets == CALIBRATED_QUBIT_OFFSETS && fit.disagreements == 0;
    parts.push(format!(
        "fit lhs {} inner {} cap {} ({} candidates, {} errors)",
        fit.offsets.lhs, fit.offsets.inner, fit.offsets.cap, fit.candidates, fit.disagreements
    ));

    let screening = OracleConfig::screening();
    let mut total_bad = 0;
    for s in [Scenario::ChannelJoinA, Scenario::ChannelJoinB, Scenario::ChannelJoinC] {
        let (bad, _) = count_disagreements(2, s, &triples, &screening)?;
        total_bad += bad;
    }
    let (bad3, _) = count_disagreements(3, Scenario::ChannelJoinA, &triples, &screening)?;
    ok &= total_bad == 0 && bad3 == 0;
    parts.push(format!("21^3 disagreements: d=2 {total_bad} (three pivots), d=3 {bad3}"));
    outcome(ok, parts.join("; "))
}

fn local_region() -> Result<Outcome> {
    let triples = grid(41).triples();
    let (bad, compared) = count_disagreements(2, Scenario::LocalPositiveJoin, &triples, &OracleConfig::default())?;
    let edge = local_positive_cubic(EtaTriple::symmetric(2.0 / 3.0));
    let ones = EtaTriple::symmetric(1.0);
    let min_f = oracle_local_positive_joinable(ones, DEFAULT_TOL).best_min_eigenvalue;
    let tau = 2.0 * std::f64::consts::PI / 3.0;
    let bracket = 2.0 * local_objective(ones, tau, tau);
    let ok = bad == 0 && edge.abs() < 1e-15 && (bracket + 0.125).abs() < 1e-12 && (min_f + 1.0 / 16.0).abs() < 1e-12;
    outcome(
        ok,
        format!(
            "{bad} of {compared} disagree; cubic at 2/3 = {edge:.1e}; at (1,1,1) bracket {bracket:.12}, F {min_f:.12}"
        ),
    )
}

fn separability_surface() -> Result<Outcome> {
    let sixth = cayley_expression(EtaTriple::symmetric(-1.0 / 6.0));
    let fifth = EtaTriple::symmetric(-0.2);
    let margins = [
        state_margin(2, fifth),
        channel_margin(2, fifth, Pivot::A),
        channel_margin(2, fifth, Pivot::B),
        channel_margin(2, fifth, Pivot::C),
    ];
    let lowest = margins.iter().copied().fold(f64::INFINITY, f64::min);
    let in_intersection = state_joinable(2, fifth)?.holds && margins[1..].iter().all(|m| *m >= -1e-9);
    let oracle = oracle_channel_joinable(2, fifth, Pivot::A, DEFAULT_TOL)?;
    let ok = sixth.abs() < 1e-12
        && lowest.abs() < 1e-9
        && in_intersection
        && !separable_region(fifth).holds
        && oracle.feasible
        && oracle.best_min_eigenvalue.abs() < 1e-9;
    outcome(
        ok,
        format!(
            "Cayley at -1/6 = {sixth:.1e}; at -1/5 min cone margin {lowest:.1e}, oracle optimum {:.1e}, separable {}",
            oracle.best_min_eigenvalue,
            separable_region(fifth).holds
        ),
    )
}

fn agreement_bounds_check() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for d in [2, 3] {
        for (cone, want) in [
            (AgreementCone::State, (0.0, 2.0 / (d as f64 + 1.0))),
            (AgreementCone::Channel, (1.0 / (d as f64 + 1.0), 1.0)),
        ] {
            let bounds = agreement_bounds(d, 2, cone)?;
            let seen = oracle_agreement_extrema(d, 2, cone, 2000, 11 + d as u64)?;
            ok &= (bounds.0 - want.0).abs() < 1e-15 && (bounds.1 - want.1).abs() < 1e-15;
            ok &= (seen.0 - want.0).abs() < 1e-12 && (seen.1 - want.1).abs() < 1e-12;
            parts.push(format!("d={d} {cone} [{:.12}, {:.12}]", seen.0, seen.1));
        }
    }
    let multi = oracle_agreement_extrema(2, 3, AgreementCone::State, 500, 5)?;
    let closed = 2.0 / binomial(4, 3);
    ok &= (closed - 0.5).abs() < 1e-15 && (multi.1 - closed).abs() < 1e-12;
    let share = derived_task_bounds(2)?.sharability_alpha_min_qubit.unwrap_or(f64::NAN);
    ok &= (share - 1.0 / 6.0).abs() < 1e-15;
    let eta = eta_of_alpha(2, share);
    let edge = oracle_state_joinable(2, EtaTriple::new(eta, eta, eta_of_alpha(2, 2.0 / 3.0)), DEFAULT_TOL)?;
    ok &= edge.feasible && edge.best_min_eigenvalue.abs() < 1e-9;
    parts.push(format!("d=2 n=3 max {:.12}; sharability {share:.12}", multi.1));
    outcome(ok, parts.join("; "))
}

fn property_suites() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for seed in [1u64, 2, 3] {
        let cfg = VerifyConfig { seed, samples: 200 };
        let first = run_suite(Suite::All, &cfg);
        let again = run_suite(Suite::All, &cfg);
        let failed: Vec<String> = first.failures().map(|c| format!("{}/{}", c.suite, c.name)).collect();
        ok &= first.passed() && first == again;
        parts.push(format!(
            "seed {seed}: {} checks, failed [{}], deterministic {}",
            first.checks.len(),
            failed.join(", "),
            first == again
        ));
    }
    outcome(ok, parts.join("; "))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Result<Outcome>, Duration);
    let criteria: [Criterion; 8] = [
        ("werner positivity ranges", werner_ranges, Duration::from_secs(5)),
        ("PPT iff CPTP", ppt_iff_cptp, Duration::from_secs(30)),
        ("state joinability region", state_region, Duration::from_secs(300)),
        ("channel joinability", channel_region, Duration::from_secs(600)),
        ("local-positive joinability", local_region, Duration::from_secs(120)),
        ("separability surface", separability_surface, Duration::from_secs(60)),
        ("agreement bounds", agreement_bounds_check, Duration::from_secs(60)),
        ("property suites", property_suites, Duration::from_secs(600)),
    ];
    let mut all = true;
    for (k, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (passed, detail) = match result {
            Ok(o) => (o.passed && elapsed <= *limit, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        all &= passed;
        println!(
            "[{}] {} {name}: {detail} ({:.2}s, limit {}s)",
            if passed { "PASS" } else { "FAIL" },
            k + 1,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
