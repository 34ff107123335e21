//! The invariant joining family, split into exact diagonal blocks.
//!
//! Every member is a combination of the six permutation operators (or of their
//! partial transposes on a pivot). Their combined sparsity pattern decomposes
//! the space into connected components, each of which is an invariant block for
//! every member, so the minimum eigenvalue is the minimum over small blocks.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;

use crate::brauer::{tripartite_coefficients, tripartite_permutation_basis};
use crate::error::{Error, Result};
use crate::joinability::{EtaTriple, Pivot};
use crate::operator::{partial_trace, partial_transpose, sorted_eigenvalues, CMatrix};

const PAIRS: [[usize; 2]; 3] = [[0, 1], [0, 2], [1, 2]];

pub(crate) struct JoiningFamily {
    d: usize,
    /// Per block: the six basis operators restricted to it.
    blocks: Vec<[CMatrix; 6]>,
    /// Per pair `(AB, AC, BC)`: the two-party marginals of the six basis operators.
    marginals: [[CMatrix; 6]; 3],
}

type CacheKey = (usize, Option<Pivot>);

fn cache() -> &'static Mutex<HashMap<CacheKey, &'static JoiningFamily>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, &'static JoiningFamily>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl JoiningFamily {
    /// Shared family for local dimension `d`, partially transposed on `pivot` if given.
    pub(crate) fn get(d: usize, pivot: Option<Pivot>) -> Result<&'static Self> {
        if !(2..=4).contains(&d) {
            return Err(Error::UnsupportedDimension {
                d,
                context: "joining family is built for d <= 4",
            });
        }
        let mut map = cache().lock().expect("family cache poisoned");
        if let Some(f) = map.get(&(d, pivot)) {
            return Ok(f);
        }
        let fam: &'static Self = Box::leak(Box::new(Self::build(d, pivot)?));
        map.insert((d, pivot), fam);
        Ok(fam)
    }

    fn build(d: usize, pivot: Option<Pivot>) -> Result<Self> {
        let mut basis = tripartite_permutation_basis(d)?;
        if let Some(p) = pivot {
            for op in &mut basis {
                *op = partial_transpose(op, &[p.index()])?;
            }
        }
        let n = basis[0].dim();

        let mut parent: Vec<usize> = (0..n).collect();
        fn root(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for op in &basis {
            for i in 0..n {
                for j in 0..n {
                    if op.matrix()[(i, j)].norm() > 0.0 {
                        let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                        if a != b {
                            parent[a.max(b)] = a.min(b);
                        }
                    }
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot: HashMap<usize, usize> = HashMap::new();
        for i in 0..n {
            let r = root(&mut parent, i);
            let k = *slot.entry(r).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[k].push(i);
        }

        let blocks = groups
            .iter()
            .map(|idx| {
                std::array::from_fn(|k| {
                    let m = basis[k].matrix();
                    CMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])])
                })
            })
            .collect();

        let mut marginals: Vec<[CMatrix; 6]> = Vec::with_capacity(3);
        for pair in PAIRS {
            let mut per = Vec::with_capacity(6);
            for op in &basis {
                per.push(partial_trace(op, &pair)?.into_matrix());
            }
            marginals.push(per.try_into().expect("six basis operators"));
        }

        Ok(Self {
            d,
            blocks,
            marginals: marginals.try_into().ok().expect("three pairs"),
        })
    }

    /// Sizes of the invariant blocks.
    pub(crate) fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b[0].nrows()).collect()
    }

    /// The member family for a given triple, affine in the free parameters.
    pub(crate) fn instance(&self, t: EtaTriple) -> FamilyInstance {
        let c0 = tripartite_coefficients(self.d, t, 0.0, 0.0);
        let ce = tripartite_coefficients(self.d, t, 1.0, 0.0);
        let cf = tripartite_coefficients(self.d, t, 0.0, 1.0);
        let de: [Complex64; 6] = std::array::from_fn(|k| ce[k] - c0[k]);
        let df: [Complex64; 6] = std::array::from_fn(|k| cf[k] - c0[k]);
        let combine = |ops: &[CMatrix; 6], c: &[Complex64; 6]| {
            let mut acc = CMatrix::zeros(ops[0].nrows(), ops[0].ncols());
            for (op, &ck) in ops.iter().zip(c) {
                if ck != Complex64::new(0.0, 0.0) {
                    acc += op * ck;
                }
            }
            acc
        };
        let blocks = self
            .blocks
            .iter()
            .map(|ops| Block {
                base: combine(ops, &c0),
                de: combine(ops, &de),
                df: combine(ops, &df),
            })
            .collect();
        let marginal_floor = self
            .marginals
            .iter()
            .map(|ops| sorted_eigenvalues(&combine(ops, &c0))[0])
            .fold(f64::INFINITY, f64::min);
        FamilyInstance {
            d: self.d,
            blocks,
            marginal_floor,
        }
    }
}

struct Block {
    base: CMatrix,
    de: CMatrix,
    df: CMatrix,
}

pub(crate) struct FamilyInstance {
    d: usize,
    blocks: Vec<Block>,
    /// Smallest eigenvalue over the three two-party marginals, which do not
    /// depend on the free parameters.
    marginal_floor: f64,
}

impl FamilyInstance {
    /// Minimum eigenvalue of the member with free parameters `(e, f)`.
    pub(crate) fn min_eigenvalue(&self, e: f64, f: f64) -> f64 {
        let (ce, cf) = (Complex64::new(e, 0.0), Complex64::new(f, 0.0));
        let mut best = f64::INFINITY;
        for b in &self.blocks {
            let n = b.base.nrows();
            let v = match n {
                1 => (b.base[(0, 0)] + ce * b.de[(0, 0)] + cf * b.df[(0, 0)]).re,
                2 => {
                    let at = |i, j| b.base[(i, j)] + ce * b.de[(i, j)] + cf * b.df[(i, j)];
                    let (p, q, r) = (at(0, 0).re, at(1, 1).re, at(0, 1));
                    0.5 * (p + q) - (0.25 * (p - q) * (p - q) + r.norm_sqr()).sqrt()
                }
                _ => {
                    let m = &b.base + &b.de * ce + &b.df * cf;
                    sorted_eigenvalues(&m)[0]
                }
            };
            best = best.min(v);
        }
        best
    }

    /// Upper bound on the best achievable minimum eigenvalue implied by the marginals.
    ///
    /// If `v` is an eigenvector of a two-party marginal with eigenvalue `lam`, the
    /// vectors `v (x) |k>` average to `lam / d`, so some vector reaches it.
    pub(crate) fn marginal_bound(&self) -> f64 {
        self.marginal_floor / self.d as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brauer::tripartite_invariant_operator;
    use crate::operator::hermitian_eigenvalues;

    #[test]
    fn blocks_cover_the_space() {
        for d in 2..=3 {
            for pivot in [None, Some(Pivot::A), Some(Pivot::B), Some(Pivot::C)] {
                let fam = JoiningFamily::get(d, pivot).unwrap();
                assert_eq!(fam.block_sizes().iter().sum::<usize>(), d * d * d);
            }
        }
    }

    #[test]
    fn block_spectrum_matches_dense() {
        let t = EtaTriple::new(0.21, -0.35, 0.4);
        for d in 2..=3 {
            for pivot in [None, Some(Pivot::A), Some(Pivot::C)] {
                let inst = JoiningFamily::get(d, pivot).unwrap().instance(t);
                for &(e, f) in &[(0.0, 0.0), (0.1, -0.05), (-0.2, 0.3)] {
                    let e = if d == 2 { 0.0 } else { e };
                    let mut w = tripartite_invariant_operator(d, t, e, f).unwrap();
                    if let Some(p) = pivot {
                        w = partial_transpose(&w, &[p.index()]).unwrap();
                    }
                    let dense = hermitian_eigenvalues(&w).unwrap()[0];
                    assert!((dense - inst.min_eigenvalue(e, f)).abs() < 1e-13);
                    assert!(inst.marginal_bound() >= dense - 1e-13);
                }
            }
        }
    }
}
