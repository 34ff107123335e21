//! Positivity reports for Werner, Brauer and user-supplied bipartite operators.

use std::path::Path;

use joinlab_core::brauer::brauer_operator;
use joinlab_core::classify::homocorrelation_is_channel;
use joinlab_core::{classify_brauer, classify_operator, BipartiteVerdict, BrauerParams, DenseOperator, QuditSpace};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Largest local dimension for which closed-form verdicts are cross-checked
/// against a dense eigensolve.
pub const DENSE_CROSS_CHECK_MAX_D: usize = 6;

/// The operator family being checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Werner,
    Brauer,
    DenseFile,
}

/// Contents of a `--kind dense-file` input: row-major real and optional
/// imaginary parts of a `prod(dims)`-square matrix.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DenseFile {
    pub dims: Vec<usize>,
    pub real: Vec<Vec<f64>>,
    #[serde(default)]
    pub imag: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DenseCrossCheck {
    pub state_positive: bool,
    pub channel_positive: bool,
    pub local_positive: bool,
    pub agrees: bool,
}

/// Everything `joinlab check` prints.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(flatten)]
    pub verdict: BipartiteVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub homocorrelation_is_channel: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dense: Option<DenseCrossCheck>,
}

/// Closed-form report for the Brauer family, with a dense cross-check at small `d`.
pub fn check_family(kind: Kind, p: BrauerParams, seed: u64) -> Result<CheckReport, CliError> {
    let verdict = classify_brauer(p);
    let dense = if p.d() <= DENSE_CROSS_CHECK_MAX_D {
        let m = brauer_operator(p)?;
        let v = classify_operator(&m, seed)?;
        Some(DenseCrossCheck {
            state_positive: v.state_positive,
            channel_positive: v.channel_positive,
            local_positive: v.local_positive,
            agrees: agrees(&verdict, &v),
        })
    } else {
        None
    };
    Ok(CheckReport {
        kind: if kind == Kind::Werner { "werner" } else { "brauer" },
        d: Some(p.d()),
        dims: None,
        eta: Some(p.eta()),
        beta: (kind == Kind::Brauer).then_some(p.beta()),
        verdict,
        homocorrelation_is_channel: None,
        dense,
    })
}

/// Verdicts agree unless a closed-form margin is decisively away from zero
/// and the dense answer differs.
fn agrees(exact: &BipartiteVerdict, dense: &BipartiteVerdict) -> bool {
    const BAND: f64 = 1e-6;
    let m = exact.margins;
    [
        (exact.state_positive, dense.state_positive, m.state),
        (exact.channel_positive, dense.channel_positive, m.channel),
        (exact.local_positive, dense.local_positive, m.local),
    ]
    .iter()
    .all(|&(a, b, margin)| a == b || margin.abs() <= BAND)
}

/// Reads and validates a dense operator file.
pub fn load_dense(path: &Path) -> Result<DenseOperator, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let file: DenseFile =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    dense_operator(&file)
}

pub fn dense_operator(file: &DenseFile) -> Result<DenseOperator, CliError> {
    let space = QuditSpace::new(file.dims.clone())?;
    let n = space.total_dim();
    let square = |rows: &[Vec<f64>], part: &str| -> Result<(), CliError> {
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(CliError::Usage(format!("{part} part must be {n} x {n} for dims {:?}", file.dims)));
        }
        Ok(())
    };
    square(&file.real, "real")?;
    if let Some(im) = &file.imag {
        square(im, "imaginary")?;
    }
    let imag = |i: usize, j: usize| file.imag.as_ref().map_or(0.0, |im| im[i][j]);
    Ok(DenseOperator::from_fn(space, |i, j| Complex64::new(file.real[i][j], imag(i, j))))
}

/// Numerical report for a bipartite operator read from disk.
pub fn check_dense(m: &DenseOperator, seed: u64) -> Result<CheckReport, CliError> {
    let verdict = classify_operator(m, seed)?;
    let dims = m.dims().to_vec();
    let channel = if dims[0] == dims[1] {
        Some(homocorrelation_is_channel(m)?)
    } else {
        None
    };
    Ok(CheckReport {
        kind: "dense-file",
        d: None,
        dims: Some(dims),
        eta: None,
        beta: None,
        verdict,
        homocorrelation_is_channel: channel,
        dense: None,
    })
}
