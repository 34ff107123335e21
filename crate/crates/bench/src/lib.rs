//! Shared fixtures for the criterion benches.

use joinlab_core::EtaTriple;

/// Deterministic triples spread over `[-1, 1]^3`, `n` per axis.
pub fn cube_triples(n: usize) -> Vec<EtaTriple> {
    let axis: Vec<f64> = (0..n).map(|k| -1.0 + 2.0 * k as f64 / (n - 1) as f64).collect();
    let mut out = Vec::with_capacity(n * n * n);
    for &a in &axis {
        for &b in &axis {
            for &c in &axis {
                out.push(EtaTriple::new(a, b, c));
            }
        }
    }
    out
}
