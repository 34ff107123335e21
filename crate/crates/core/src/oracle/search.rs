//! Derivative-free maximisation of concave functions on an interval.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Outcome of a golden-section search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineMax {
    pub argmax: f64,
    pub value: f64,
    pub evaluations: usize,
    /// The search stopped because a value reached the target.
    pub reached_target: bool,
}

/// Maximises a unimodal `f` on `[lo, hi]` with `iterations` interval reductions.
///
/// When `target` is given the search returns as soon as some evaluation reaches it.
/// The returned point is the best one evaluated, so `value` is always attained.
pub fn golden_section_max(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    iterations: usize,
    target: Option<f64>,
) -> LineMax {
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut evaluations = 2;
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    let reached = |v: f64| target.is_some_and(|t| v >= t);
    if reached(best.1) {
        return LineMax {
            argmax: best.0,
            value: best.1,
            evaluations,
            reached_target: true,
        };
    }
    for _ in 0..iterations {
        let x;
        let fx;
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
            (x, fx) = (x1, f1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
            (x, fx) = (x2, f2);
        }
        evaluations += 1;
        if fx > best.1 {
            best = (x, fx);
        }
        if reached(best.1) {
            return LineMax {
                argmax: best.0,
                value: best.1,
                evaluations,
                reached_target: true,
            };
        }
    }
    LineMax {
        argmax: best.0,
        value: best.1,
        evaluations,
        reached_target: false,
    }
}
