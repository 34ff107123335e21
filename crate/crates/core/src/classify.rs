//! One-shot positivity classification of bipartite operators.

use serde::{Deserialize, Serialize};

use crate::brauer::{is_channel_positive, is_local_positive, is_state_positive, BrauerParams};
use crate::error::{Error, Result};
use crate::maps::{inverse_homocorrelation, is_cptp, PSD_TOL};
use crate::operator::{min_eigenvalue, partial_transpose, DenseOperator};
use crate::oracle::block_positive_minimum;

/// Signed slack of each cone test; negative means outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeMargins {
    pub state: f64,
    pub channel: f64,
    pub local: f64,
}

/// Membership of a bipartite operator in the state, channel and local cones.
///
/// `ppt` is state and channel positivity together. `npt_entangled` is set for
/// states whose partial transpose has a negative eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BipartiteVerdict {
    pub state_positive: bool,
    pub channel_positive: bool,
    pub local_positive: bool,
    pub ppt: bool,
    pub npt_entangled: bool,
    pub margins: ConeMargins,
}

impl BipartiteVerdict {
    fn from_parts(state: (bool, f64), channel: (bool, f64), local: (bool, f64)) -> Self {
        Self {
            state_positive: state.0,
            channel_positive: channel.0,
            local_positive: local.0,
            ppt: state.0 && channel.0,
            npt_entangled: state.0 && !channel.0,
            margins: ConeMargins {
                state: state.1,
                channel: channel.1,
                local: local.1,
            },
        }
    }
}

/// Closed-form classification of a Brauer operator.
pub fn classify_brauer(p: BrauerParams) -> BipartiteVerdict {
    let s = is_state_positive(p);
    let c = is_channel_positive(p);
    let l = is_local_positive(p);
    BipartiteVerdict::from_parts((s.holds, s.margin), (c.holds, c.margin), (l.holds, l.margin))
}

/// Numerical classification of an arbitrary Hermitian bipartite operator.
///
/// Margins are minimum eigenvalues of the operator and of its partial
/// transpose, and the smallest product-vector expectation found by
/// [`block_positive_minimum`] from `seed`. The local verdict is therefore only
/// as strong as that search.
pub fn classify_operator(m: &DenseOperator, seed: u64) -> Result<BipartiteVerdict> {
    let &[da, db] = m.dims() else {
        return Err(Error::DimensionMismatch {
            expected: "a bipartite operator".into(),
            found: format!("{} subsystems", m.dims().len()),
        });
    };
    m.require_hermitian()?;
    let state = min_eigenvalue(m)?;
    let channel = min_eigenvalue(&partial_transpose(m, &[0])?)?;
    let local = if state >= PSD_TOL {
        state
    } else {
        block_positive_minimum(m, da, db, seed)?.value
    };
    Ok(BipartiteVerdict::from_parts(
        (state >= PSD_TOL, state),
        (channel >= PSD_TOL, channel),
        (local >= PSD_TOL, local),
    ))
}

/// Whether the map with homocorrelation operator `m` is a channel.
pub fn homocorrelation_is_channel(m: &DenseOperator) -> Result<bool> {
    Ok(is_cptp(&inverse_homocorrelation(m)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brauer::brauer_operator;

    #[test]
    fn bell_state_is_npt() {
        let p = BrauerParams::new(2, 0.0, 1.0).unwrap();
        let v = classify_brauer(p);
        assert!(v.state_positive && !v.ppt && v.npt_entangled);
        let dense = classify_operator(&brauer_operator(p).unwrap(), 0).unwrap();
        assert_eq!(
            (dense.state_positive, dense.channel_positive, dense.ppt),
            (true, false, false)
        );
        assert!((dense.margins.channel + 0.5).abs() < 1e-12);
        assert!(!homocorrelation_is_channel(&brauer_operator(p).unwrap()).unwrap());
    }

    #[test]
    fn werner_examples() {
        let v = classify_brauer(BrauerParams::new(3, 0.3, 0.0).unwrap());
        assert!(!v.state_positive && v.channel_positive && v.local_positive);
        let v = classify_brauer(BrauerParams::new(2, 0.0, 0.0).unwrap());
        assert!(v.state_positive && v.channel_positive && v.local_positive && v.ppt);
    }

    #[test]
    fn dense_local_margin_uses_product_search() {
        let p = BrauerParams::new(2, 1.0, 0.0).unwrap();
        let v = classify_operator(&brauer_operator(p).unwrap(), 1).unwrap();
        assert!(!v.state_positive && v.channel_positive && v.local_positive);
        assert!(v.margins.local.abs() < 1e-9);
    }
}
