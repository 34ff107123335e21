//! Closed-form three-party joinability regions for Werner triples.
//!
//! A triple `(eta_AB, eta_AC, eta_BC)` is joinable in a scenario when a
//! tripartite operator of the corresponding cone has the three Werner operators
//! as its two-party marginals. All predicates return a [`Verdict`] whose margin
//! is the raw slack of the tightest inequality.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::brauer::alpha_of_eta;
use crate::error::{Error, Result};
use crate::verdict::{min_slack, Verdict};

/// Slack used by every region predicate.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Werner parameters of the three two-party marginals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaTriple {
    pub ab: f64,
    pub ac: f64,
    pub bc: f64,
}

impl EtaTriple {
    pub const fn new(ab: f64, ac: f64, bc: f64) -> Self {
        Self { ab, ac, bc }
    }

    /// `(eta, eta, eta)`.
    pub const fn symmetric(eta: f64) -> Self {
        Self::new(eta, eta, eta)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.ab, self.ac, self.bc]
    }

    pub fn sum(&self) -> f64 {
        self.ab + self.ac + self.bc
    }

    pub fn product(&self) -> f64 {
        self.ab * self.ac * self.bc
    }

    /// `eta_AB eta_AC + eta_AB eta_BC + eta_AC eta_BC`.
    pub fn pair_products(&self) -> f64 {
        self.ab * self.ac + self.ab * self.bc + self.ac * self.bc
    }

    /// `|eta_AB + w eta_AC + w^2 eta_BC|` with `w = exp(2 pi i / 3)`.
    pub fn omega_modulus(&self) -> f64 {
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        (self.ab + w * self.ac + w * w * self.bc).norm()
    }

    /// Parameter of the pair `{x, y}` of parties (0 = A, 1 = B, 2 = C).
    pub fn pair(&self, x: usize, y: usize) -> f64 {
        match (x.min(y), x.max(y)) {
            (0, 1) => self.ab,
            (0, 2) => self.ac,
            (1, 2) => self.bc,
            _ => panic!("invalid party pair ({x}, {y})"),
        }
    }

    /// The triple seen after moving party `k` to position `perm[k]`.
    pub fn relabel(&self, perm: [usize; 3]) -> Self {
        let mut out = [0.0; 3];
        for (x, y, v) in [(0, 1, self.ab), (0, 2, self.ac), (1, 2, self.bc)] {
            let (p, q) = (perm[x].min(perm[y]), perm[x].max(perm[y]));
            out[p + q - 1] = v;
        }
        Self::new(out[0], out[1], out[2])
    }

    /// Rewrites the triple so that `pivot` plays the role of party A: the two
    /// pairs containing the pivot come first, the remaining pair last.
    pub fn oriented(&self, pivot: Pivot) -> Self {
        match pivot {
            Pivot::A => *self,
            Pivot::B => Self::new(self.ab, self.bc, self.ac),
            Pivot::C => Self::new(self.ac, self.bc, self.ab),
        }
    }
}

impl From<[f64; 3]> for EtaTriple {
    fn from(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

/// The party whose partial transpose defines a channel scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pivot {
    A,
    B,
    C,
}

impl Pivot {
    pub const ALL: [Pivot; 3] = [Pivot::A, Pivot::B, Pivot::C];

    pub fn index(self) -> usize {
        match self {
            Pivot::A => 0,
            Pivot::B => 1,
            Pivot::C => 2,
        }
    }

    pub fn from_index(k: usize) -> Option<Self> {
        Self::ALL.get(k).copied()
    }

    /// Where this pivot lands under the party permutation `perm`.
    pub fn relabel(self, perm: [usize; 3]) -> Self {
        Self::ALL[perm[self.index()]]
    }
}

impl FromStr for Pivot {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Pivot::A),
            "B" | "b" => Ok(Pivot::B),
            "C" | "c" => Ok(Pivot::C),
            other => Err(Error::OutOfRange(format!("unknown pivot '{other}'"))),
        }
    }
}

impl fmt::Display for Pivot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["A", "B", "C"][self.index()])
    }
}

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::InvalidDims(format!("local dimension must be >= 2, got {d}")))
    } else {
        Ok(())
    }
}

/// Margin of state joinability.
pub fn state_margin(d: usize, t: EtaTriple) -> f64 {
    let s = t.sum();
    let omega = t.omega_modulus();
    if d == 2 {
        (0.5 * (1.0 - s) - omega).min(s + 1.0)
    } else {
        let df = d as f64;
        let lower = (3.0 + (df - 1.0) * s) / (2.0 * (df - 1.0)) - omega;
        let upper = (3.0 - (df + 1.0) * s) / (2.0 * (df + 1.0)) - omega;
        lower.min(upper)
    }
}

/// Joinability by a tripartite state.
pub fn state_joinable(d: usize, t: EtaTriple) -> Result<Verdict> {
    check_d(d)?;
    Ok(Verdict::from_margin(state_margin(d, t), BOUNDARY_TOL))
}

/// Constant offsets of the modulus form of channel joinability:
/// `lhs + eta_AB + eta_AC - eta_BC >= |inner + d eta_BC + sqrt(2d/(d-1)) (e^{i th} eta_AB + e^{-i th} eta_AC)|`,
/// optionally intersected with the cap `1 - eta_AB - eta_AC + d eta_BC / 2 >= 0`
/// (which reads `1 - eta_AB - eta_AC + eta_BC >= 0` for qubits).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelFormOffsets {
    pub lhs: f64,
    pub inner: f64,
    pub cap: bool,
}

impl ChannelFormOffsets {
    /// The offsets `1/(d-1)` and `2/(d-1)` without a cap.
    pub fn uncalibrated(d: usize) -> Self {
        let k = 1.0 / (d as f64 - 1.0);
        Self {
            lhs: k,
            inner: 2.0 * k,
            cap: false,
        }
    }

    /// Human-readable form, used in sweep metadata.
    pub fn describe(&self, d: usize) -> String {
        let mut s = format!(
            "{} + eta_ab + eta_ac - eta_bc >= |{} + {} eta_bc + sqrt(2d/(d-1)) (e^(i th) eta_ab + e^(-i th) eta_ac)|, e^(i th) = sqrt((d-1)/2d) +- i sqrt((d+1)/2d), d = {}",
            fmt_g(self.lhs),
            fmt_g(self.inner),
            d,
            d
        );
        if self.cap {
            s.push_str("; cap 1 - eta_ab - eta_ac + (d/2) eta_bc >= 0");
        }
        s
    }
}

fn fmt_g(x: f64) -> String {
    let r = format!("{x:.6}");
    r.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Offsets reproducing the qubit channel-joinability oracle.
pub const CALIBRATED_QUBIT_OFFSETS: ChannelFormOffsets = ChannelFormOffsets {
    lhs: 1.0,
    inner: 0.0,
    cap: true,
};

/// Margin of the modulus form for a triple already oriented to pivot A.
pub fn channel_form_margin(d: usize, x: EtaTriple, offsets: ChannelFormOffsets) -> f64 {
    let df = d as f64;
    let lhs = offsets.lhs + x.ab + x.ac - x.bc;
    let re = ((df - 1.0) / (2.0 * df)).sqrt();
    let im = ((df + 1.0) / (2.0 * df)).sqrt();
    let scale = (2.0 * df / (df - 1.0)).sqrt();
    let rhs = [1.0, -1.0]
        .iter()
        .map(|&sign| {
            let th = Complex64::new(re, sign * im);
            (offsets.inner + df * x.bc + scale * (th * x.ab + th.conj() * x.ac)).norm()
        })
        .fold(0.0, f64::max);
    let mut margin = lhs - rhs;
    if offsets.cap {
        margin = margin.min(1.0 - x.ab - x.ac + 0.5 * df * x.bc);
    }
    margin
}

/// Exact channel-joinability margin for a triple oriented to pivot A.
///
/// The partial transpose of the joining family splits into two scalar blocks
/// linear in the free cyclic coefficient `g` and a 2x2 block whose determinant
/// is quadratic in `g`; the margin is the best determinant over the interval
/// where the scalar blocks and the block trace stay non-negative.
pub fn channel_exact_margin(d: usize, x: EtaTriple) -> f64 {
    let df = d as f64;
    let d2 = df * df;
    let d3 = d2 * df;
    let base = (1.0 - x.sum()) / d3;
    let a0 = base + x.bc / d2;
    let b0 = base - x.bc / d2;
    let p0 = base + x.ab / df;
    let q0 = base + x.ac / df;
    let r0 = (x.ab + x.bc) / d2;
    let s0 = (x.ac + x.bc) / d2;

    let (lo, hi) = if d == 2 {
        if a0 < 0.0 {
            return a0;
        }
        (0.0, 0.0)
    } else {
        (-b0 * (df - 2.0) / 2.0, a0 * (df + 2.0) / 2.0)
    };
    let hi = hi.min((p0 + q0) / 2.0);
    let c0 = p0 * q0 - r0 * s0;
    let c1 = -(p0 + q0) - df * (r0 + s0);
    let c2 = 1.0 - d2;
    let det = |g: f64| c0 + c1 * g + c2 * g * g;
    if lo > hi {
        return (hi - lo).min(det(0.5 * (lo + hi)));
    }
    det((-c1 / (2.0 * c2)).clamp(lo, hi))
}

/// Margin of channel joinability with respect to `pivot`.
pub fn channel_margin(d: usize, t: EtaTriple, pivot: Pivot) -> f64 {
    let x = t.oriented(pivot);
    if d == 2 {
        channel_form_margin(2, x, CALIBRATED_QUBIT_OFFSETS)
    } else {
        channel_exact_margin(d, x)
    }
}

/// Joinability by an operator whose partial transpose on `pivot` is PSD.
pub fn channel_joinable(d: usize, t: EtaTriple, pivot: Pivot) -> Result<Verdict> {
    check_d(d)?;
    Ok(Verdict::from_margin(channel_margin(d, t, pivot), BOUNDARY_TOL))
}

/// One labelled point for fitting channel-form offsets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSample {
    /// Triple oriented to pivot A.
    pub oriented: EtaTriple,
    /// Oracle optimum of the minimum eigenvalue.
    pub oracle_value: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationFit {
    pub offsets: ChannelFormOffsets,
    /// Disagreements outside the oracle band.
    pub disagreements: usize,
    /// Samples whose oracle value lies outside the band.
    pub scored: usize,
    pub candidates: usize,
}

/// Fits the offsets of the modulus form to oracle labels.
///
/// Candidates are quarter-integer offsets in `[0, 2] x [-2, 2]` with and
/// without the cap; samples whose oracle value is within `band` of zero are
/// not scored. Ties go to the candidate closest to the uncalibrated offsets.
pub fn calibrate_channel_form(d: usize, samples: &[CalibrationSample], band: f64) -> CalibrationFit {
    let reference = ChannelFormOffsets::uncalibrated(d);
    let scored: Vec<&CalibrationSample> = samples
        .iter()
        .filter(|s| s.oracle_value.abs() > band)
        .collect();
    let mut candidates = Vec::new();
    for cap in [false, true] {
        for i in 0..=8 {
            for j in -8..=8 {
                candidates.push(ChannelFormOffsets {
                    lhs: i as f64 / 4.0,
                    inner: j as f64 / 4.0,
                    cap,
                });
            }
        }
    }
    let distance = |o: &ChannelFormOffsets| {
        (o.lhs - reference.lhs).abs() + (o.inner - reference.inner).abs() + if o.cap { 0.5 } else { 0.0 }
    };
    let (best, errors) = candidates
        .par_iter()
        .map(|o| {
            let errors = scored
                .iter()
                .filter(|s| (channel_form_margin(d, s.oriented, *o) >= -BOUNDARY_TOL) != s.feasible)
                .count();
            (*o, errors)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .min_by(|a, b| a.1.cmp(&b.1).then(distance(&a.0).total_cmp(&distance(&b.0))))
        .expect("candidate list is non-empty");
    CalibrationFit {
        offsets: best,
        disagreements: errors,
        scored: scored.len(),
        candidates: candidates.len(),
    }
}

fn local_positive_margin(t: EtaTriple) -> f64 {
    let (a, b, c) = (t.ab, t.ac, t.bc);
    let linear = min_slack(&[
        1.0 + a + b + c,
        1.0 + a - b - c,
        1.0 - a + b - c,
        1.0 - a - b + c,
    ]);
    let p = t.product();
    let (p1, p2, p3) = ((b * c).abs(), (a * c).abs(), (a * b).abs());
    let frustrated = p > 0.0 && p1 <= p2 + p3 && p2 <= p1 + p3 && p3 <= p1 + p2;
    if frustrated {
        let cubic = 2.0 * p - (a * a * b * b + a * a * c * c + b * b * c * c);
        linear.min(cubic)
    } else {
        linear
    }
}

/// Qubit joinability by a tripartite operator that is positive on product vectors.
///
/// Four linear bounds always apply. The cubic bound applies where the product
/// vector minimising the objective is non-collinear, which happens exactly when
/// the triple product is positive and the pairwise products
/// `|eta_AC eta_BC|, |eta_AB eta_BC|, |eta_AB eta_AC|` obey the triangle inequality.
pub fn local_positive_joinable(t: EtaTriple) -> Verdict {
    Verdict::from_margin(local_positive_margin(t), BOUNDARY_TOL)
}

/// The cubic `2 P - sum of squared pairwise products` on its own.
pub fn local_positive_cubic(t: EtaTriple) -> f64 {
    let (a, b, c) = (t.ab, t.ac, t.bc);
    2.0 * t.product() - (a * a * b * b + a * a * c * c + b * b * c * c)
}

/// `1 + 54 P - 9 S^2 + 18 Q` with `P` the triple product, `S` the sum and `Q` the pairwise products.
pub fn cayley_expression(t: EtaTriple) -> f64 {
    let s = t.sum();
    1.0 + 54.0 * t.product() - 9.0 * s * s + 18.0 * t.pair_products()
}

/// Qubit triples joinable by a separable state.
pub fn separable_region(t: EtaTriple) -> Verdict {
    let cayley = Verdict::from_margin(cayley_expression(t), BOUNDARY_TOL);
    cayley.and(Verdict::from_margin(state_margin(2, t), BOUNDARY_TOL))
}

/// Agreement probabilities `(alpha_AB, alpha_AC, alpha_BC)` realisable by classical variables.
pub fn classical_joinable(d: usize, alphas: [f64; 3]) -> Result<Verdict> {
    check_d(d)?;
    if let Some(a) = alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::OutOfRange(format!(
            "agreement probability {a} outside [0, 1]"
        )));
    }
    Ok(Verdict::from_margin(classical_margin(d, alphas), BOUNDARY_TOL))
}

/// The classical inequalities as rows `(c, rhs)` meaning `c . (alpha_AB, alpha_AC, alpha_BC) <= rhs`.
pub fn classical_rows(d: usize) -> Vec<([f64; 3], f64)> {
    let mut rows = vec![
        ([-1.0, 1.0, 1.0], 1.0),
        ([1.0, -1.0, 1.0], 1.0),
        ([1.0, 1.0, -1.0], 1.0),
    ];
    if d == 2 {
        rows.push(([-1.0, -1.0, -1.0], -1.0));
    }
    rows
}

fn classical_margin(d: usize, alphas: [f64; 3]) -> f64 {
    classical_rows(d)
        .iter()
        .map(|(c, rhs)| rhs - (c[0] * alphas[0] + c[1] * alphas[1] + c[2] * alphas[2]))
        .fold(f64::INFINITY, f64::min)
}

/// Classical verdict for a Werner triple; triples whose agreement probabilities
/// leave `[0, 1]` are rejected with the excursion as margin.
pub fn classical_region(d: usize, t: EtaTriple) -> Verdict {
    let alphas = t.as_array().map(|eta| alpha_of_eta(d, eta));
    let range = alphas
        .iter()
        .map(|&a| a.min(1.0 - a))
        .fold(f64::INFINITY, f64::min);
    if range < -BOUNDARY_TOL {
        return Verdict::from_margin(range, BOUNDARY_TOL);
    }
    let margin = classical_margin(d, alphas.map(|a| a.clamp(0.0, 1.0)));
    Verdict::from_margin(if range < 0.0 { margin.min(range) } else { margin }, BOUNDARY_TOL)
}

/// The regions reported by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scenario {
    StateJoin,
    ChannelJoinA,
    ChannelJoinB,
    ChannelJoinC,
    LocalPositiveJoin,
    Separable,
    Classical,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::StateJoin,
        Scenario::ChannelJoinA,
        Scenario::ChannelJoinB,
        Scenario::ChannelJoinC,
        Scenario::LocalPositiveJoin,
        Scenario::Separable,
        Scenario::Classical,
    ];

    /// Column stem used in sweep output.
    pub fn name(self) -> &'static str {
        match self {
            Scenario::StateJoin => "state_join",
            Scenario::ChannelJoinA => "channel_join_A",
            Scenario::ChannelJoinB => "channel_join_B",
            Scenario::ChannelJoinC => "channel_join_C",
            Scenario::LocalPositiveJoin => "local_positive_join",
            Scenario::Separable => "separable",
            Scenario::Classical => "classical",
        }
    }

    pub fn pivot(self) -> Option<Pivot> {
        match self {
            Scenario::ChannelJoinA => Some(Pivot::A),
            Scenario::ChannelJoinB => Some(Pivot::B),
            Scenario::ChannelJoinC => Some(Pivot::C),
            _ => None,
        }
    }

    /// Whether a closed form exists at local dimension `d`.
    pub fn supported(self, d: usize) -> bool {
        match self {
            Scenario::LocalPositiveJoin | Scenario::Separable => d == 2,
            _ => d >= 2,
        }
    }
}

impl FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim();
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name().eq_ignore_ascii_case(key))
            .or(match key {
                "state" => Some(Scenario::StateJoin),
                "channel" | "channel_A" => Some(Scenario::ChannelJoinA),
                "channel_B" => Some(Scenario::ChannelJoinB),
                "channel_C" => Some(Scenario::ChannelJoinC),
                "local" | "local_positive" => Some(Scenario::LocalPositiveJoin),
                _ => None,
            })
            .ok_or_else(|| Error::OutOfRange(format!("unknown scenario '{key}'")))
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-scenario verdicts at one triple; `None` marks scenarios not evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionVerdict {
    pub eta: EtaTriple,
    pub state_join: Option<Verdict>,
    pub channel_join_a: Option<Verdict>,
    pub channel_join_b: Option<Verdict>,
    pub channel_join_c: Option<Verdict>,
    pub local_positive_join: Option<Verdict>,
    pub separable: Option<Verdict>,
    pub classical: Option<Verdict>,
}

impl RegionVerdict {
    fn empty(eta: EtaTriple) -> Self {
        Self {
            eta,
            state_join: None,
            channel_join_a: None,
            channel_join_b: None,
            channel_join_c: None,
            local_positive_join: None,
            separable: None,
            classical: None,
        }
    }

    pub fn get(&self, s: Scenario) -> Option<Verdict> {
        match s {
            Scenario::StateJoin => self.state_join,
            Scenario::ChannelJoinA => self.channel_join_a,
            Scenario::ChannelJoinB => self.channel_join_b,
            Scenario::ChannelJoinC => self.channel_join_c,
            Scenario::LocalPositiveJoin => self.local_positive_join,
            Scenario::Separable => self.separable,
            Scenario::Classical => self.classical,
        }
    }

    fn slot(&mut self, s: Scenario) -> &mut Option<Verdict> {
        match s {
            Scenario::StateJoin => &mut self.state_join,
            Scenario::ChannelJoinA => &mut self.channel_join_a,
            Scenario::ChannelJoinB => &mut self.channel_join_b,
            Scenario::ChannelJoinC => &mut self.channel_join_c,
            Scenario::LocalPositiveJoin => &mut self.local_positive_join,
            Scenario::Separable => &mut self.separable,
            Scenario::Classical => &mut self.classical,
        }
    }

    /// Checks that the state and channel regions sit inside the local-positive one.
    pub fn check_monotonic(&self) -> Result<()> {
        let Some(local) = self.local_positive_join else {
            return Ok(());
        };
        let rules = [
            (self.state_join, "state_join => local_positive_join"),
            (self.channel_join_a, "channel_join_A => local_positive_join"),
            (self.channel_join_b, "channel_join_B => local_positive_join"),
            (self.channel_join_c, "channel_join_C => local_positive_join"),
        ];
        for (v, rule) in rules {
            if v.is_some_and(|v| v.holds) && !local.holds {
                return Err(Error::Monotonicity {
                    ab: self.eta.ab,
                    ac: self.eta.ac,
                    bc: self.eta.bc,
                    rule,
                });
            }
        }
        Ok(())
    }
}

/// Evaluates the requested scenarios at one triple, skipping those without a
/// closed form at this `d`, and checks monotonicity before returning.
pub fn evaluate_region(d: usize, t: EtaTriple, scenarios: &[Scenario]) -> Result<RegionVerdict> {
    check_d(d)?;
    let mut row = RegionVerdict::empty(t);
    for &s in scenarios {
        if !s.supported(d) {
            continue;
        }
        let v = match s {
            Scenario::StateJoin => state_joinable(d, t)?,
            Scenario::ChannelJoinA | Scenario::ChannelJoinB | Scenario::ChannelJoinC => {
                channel_joinable(d, t, s.pivot().expect("channel scenario has a pivot"))?
            }
            Scenario::LocalPositiveJoin => local_positive_joinable(t),
            Scenario::Separable => separable_region(t),
            Scenario::Classical => classical_region(d, t),
        };
        *row.slot(s) = Some(v);
    }
    row.check_monotonic()?;
    Ok(row)
}

/// Evenly spaced samples of `[lo, hi]`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points per axis, got {count}")));
        }
        if !(lo < hi) {
            return Err(Error::InvalidGrid(format!("need lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi, count })
    }

    pub fn point(&self, k: usize) -> f64 {
        if k + 1 == self.count {
            return self.hi;
        }
        self.lo + (self.hi - self.lo) * k as f64 / (self.count - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.point(k)).collect()
    }
}

/// A product grid over `(eta_AB, eta_AC, eta_BC)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub axes: [GridAxis; 3],
}

impl SweepGrid {
    pub fn cube(axis: GridAxis) -> Self {
        Self { axes: [axis; 3] }
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Triple number `index` in lexicographic order (`eta_BC` fastest).
    pub fn triple(&self, index: usize) -> EtaTriple {
        let [a, b, c] = &self.axes;
        let k = index % c.count;
        let j = (index / c.count) % b.count;
        let i = index / (c.count * b.count);
        EtaTriple::new(a.point(i), b.point(j), c.point(k))
    }

    pub fn triples(&self) -> Vec<EtaTriple> {
        (0..self.len()).map(|i| self.triple(i)).collect()
    }
}

/// Verdicts on every grid point, in lexicographic order.
pub fn region_sweep(grid: &SweepGrid, d: usize, scenarios: &[Scenario]) -> Result<Vec<RegionVerdict>> {
    check_d(d)?;
    (0..grid.len())
        .into_par_iter()
        .map(|i| evaluate_region(d, grid.triple(i), scenarios))
        .collect()
}

/// Verdicts along the symmetric line `(eta, eta, eta)`.
pub fn diagonal_sweep(axis: &GridAxis, d: usize, scenarios: &[Scenario]) -> Result<Vec<RegionVerdict>> {
    check_d(d)?;
    axis.points()
        .into_par_iter()
        .map(|eta| evaluate_region(d, EtaTriple::symmetric(eta), scenarios))
        .collect()
}

/// Locations where a sampled margin changes sign, linearly interpolated.
///
/// A sample with margin exactly zero counts as a crossing only when its
/// neighbours lie on opposite sides.
pub fn margin_sign_changes(samples: &[(f64, f64)]) -> Vec<f64> {
    let mut out = Vec::new();
    let signed: Vec<(f64, f64)> = samples.iter().copied().filter(|s| s.1 != 0.0).collect();
    for w in signed.windows(2) {
        let ((x0, m0), (x1, m1)) = (w[0], w[1]);
        if (m0 < 0.0) != (m1 < 0.0) {
            out.push(x0 + (x1 - x0) * m0 / (m0 - m1));
        }
    }
    out
}

/// Bisects a margin function for its sign change inside `[lo, hi]`.
pub fn bisect_boundary(mut lo: f64, mut hi: f64, margin: impl Fn(f64) -> f64, iterations: usize) -> f64 {
    let lo_sign = margin(lo) >= 0.0;
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        if (margin(mid) >= 0.0) == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    const THIRD: f64 = 1.0 / 3.0;

    #[test]
    fn state_examples() {
        let v = state_joinable(2, EtaTriple::symmetric(0.0)).unwrap();
        assert!(v.holds && (v.margin - 0.5).abs() < 1e-15);
        for &(eta, want) in &[(THIRD, true), (-THIRD, true), (0.34, false), (-0.34, false), (0.1, true)] {
            assert_eq!(state_joinable(2, EtaTriple::symmetric(eta)).unwrap().holds, want, "eta={eta}");
        }
        let v = state_joinable(2, EtaTriple::new(-1.0, 0.0, 0.0)).unwrap();
        assert!(v.holds && v.margin.abs() < 1e-15);
        assert!(state_joinable(1, EtaTriple::symmetric(0.0)).is_err());
    }

    #[test]
    fn qudit_state_admits_product_joins() {
        let v = state_joinable(3, EtaTriple::new(0.25, 0.0, 0.0)).unwrap();
        assert!(v.holds);
    }

    #[test]
    fn channel_examples() {
        assert!(channel_joinable(2, EtaTriple::symmetric(0.0), Pivot::A).unwrap().holds);
        assert!(!channel_joinable(2, EtaTriple::new(1.0, 1.0, 0.0), Pivot::A).unwrap().holds);
        let uncal = channel_form_margin(2, EtaTriple::symmetric(0.0), ChannelFormOffsets::uncalibrated(2));
        assert!(uncal < 0.0);
    }

    #[test]
    fn calibrated_form_matches_exact_elimination_for_qubits() {
        let g: Vec<f64> = (0..=12).map(|k| -1.0 + k as f64 / 6.0).collect();
        for &a in &g {
            for &b in &g {
                for &c in &g {
                    let x = EtaTriple::new(a, b, c);
                    let m1 = channel_form_margin(2, x, CALIBRATED_QUBIT_OFFSETS);
                    let m2 = channel_exact_margin(2, x);
                    if m1.abs() > 1e-9 && m2.abs() > 1e-12 {
                        assert_eq!(m1 > 0.0, m2 > 0.0, "{x:?}: {m1} vs {m2}");
                    }
                }
            }
        }
    }

    #[test]
    fn local_positive_examples() {
        let v = local_positive_joinable(EtaTriple::symmetric(2.0 / 3.0));
        assert!(v.holds && v.margin.abs() < 1e-15);
        assert_eq!(local_positive_cubic(EtaTriple::symmetric(2.0 / 3.0)), 0.0);
        let v = local_positive_joinable(EtaTriple::symmetric(1.0));
        assert!(!v.holds && (v.margin + 1.0).abs() < 1e-15);
        assert!(local_positive_joinable(EtaTriple::symmetric(0.0)).holds);
        assert!(local_positive_joinable(EtaTriple::symmetric(-0.1)).holds);
    }

    #[test]
    fn separable_examples() {
        let x = EtaTriple::symmetric(-1.0 / 6.0);
        assert!(cayley_expression(x).abs() < 1e-12);
        assert!(separable_region(EtaTriple::symmetric(0.0)).holds);
        let fifth = EtaTriple::symmetric(-0.2);
        assert!(!separable_region(fifth).holds);
        assert!(state_joinable(2, fifth).unwrap().holds);
        assert!(channel_margin(2, fifth, Pivot::A).abs() < 1e-12);
    }

    #[test]
    fn classical_examples() {
        assert!(classical_joinable(2, [1.0, 1.0, 1.0]).unwrap().holds);
        assert!(!classical_joinable(2, [0.0, 0.0, 0.0]).unwrap().holds);
        assert!(classical_joinable(3, [0.0, 0.0, 0.0]).unwrap().holds);
        assert!(classical_joinable(2, [1.2, 0.0, 0.0]).is_err());
    }

    #[test]
    fn relabel_and_orientation() {
        let t = EtaTriple::new(0.1, 0.2, 0.3);
        assert_eq!(t.relabel([1, 0, 2]), EtaTriple::new(0.1, 0.3, 0.2));
        assert_eq!(t.relabel([0, 1, 2]), t);
        assert_eq!(t.oriented(Pivot::B), EtaTriple::new(0.1, 0.3, 0.2));
        assert_eq!(t.oriented(Pivot::C), EtaTriple::new(0.2, 0.3, 0.1));
        assert_eq!(Pivot::A.relabel([2, 0, 1]), Pivot::C);
    }

    #[test]
    fn sweep_row_count_and_order() {
        let grid = SweepGrid::cube(GridAxis::new(-1.0, 1.0, 3).unwrap());
        let rows = region_sweep(&grid, 2, &Scenario::ALL).unwrap();
        assert_eq!(rows.len(), 27);
        assert_eq!(rows[0].eta, EtaTriple::symmetric(-1.0));
        assert_eq!(rows[1].eta, EtaTriple::new(-1.0, -1.0, 0.0));
        assert_eq!(rows[26].eta, EtaTriple::symmetric(1.0));
        assert!(GridAxis::new(0.0, 1.0, 1).is_err());
        assert!(GridAxis::new(1.0, 0.0, 4).is_err());
    }

    #[test]
    fn scenario_names_roundtrip() {
        for s in Scenario::ALL {
            assert_eq!(s.name().parse::<Scenario>().unwrap(), s);
        }
        assert!("bogus".parse::<Scenario>().is_err());
    }

    #[test]
    fn sign_change_interpolation() {
        let xs = [(0.0, 1.0), (1.0, -1.0), (2.0, 0.0), (3.0, 2.0)];
        assert_eq!(margin_sign_changes(&xs), vec![0.5, 1.0 + 2.0 / 3.0]);
    }
}
