//! Complexes over a finite product of prime fields `F_{p_1} × … × F_{p_r}`.
//!
//! Such a ring is von Neumann regular: a module is a tuple of vector spaces
//! and every module is projective. A complex is then quasi-isomorphic to
//! its homology with zero differential, which is a bounded projective
//! complex, so `pd M = hsup M` and `qpd M = 0` for `M ≄ 0`.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QpdError, Result};
use crate::linalg::{EchelonBasis, Matrix, PrimeField};
use crate::resolution::Bound;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductRing {
    factors: Vec<PrimeField>,
}

impl ProductRing {
    pub fn new(primes: &[u32]) -> Result<Self> {
        if primes.is_empty() {
            return Err(QpdError::arg("a product ring needs at least one factor"));
        }
        Ok(ProductRing {
            factors: primes.iter().map(|&p| PrimeField::new(p)).collect::<Result<_>>()?,
        })
    }

    pub fn factors(&self) -> &[PrimeField] {
        &self.factors
    }
}

/// `terms[k][f]` is the dimension of term `min_index + k` over factor `f`;
/// `diffs[k][f]` maps term `k + 1` to term `k` over factor `f`.
#[derive(Clone, Debug)]
pub struct ProductComplex {
    ring: ProductRing,
    min_index: i64,
    terms: Vec<Vec<usize>>,
    diffs: Vec<Vec<Matrix>>,
}

impl ProductComplex {
    pub fn new(ring: ProductRing, min_index: i64, terms: Vec<Vec<usize>>, diffs: Vec<Vec<Matrix>>) -> Result<Self> {
        let r = ring.factors.len();
        if !terms.is_empty() && diffs.len() + 1 != terms.len() {
            return Err(QpdError::arg("need one differential between consecutive terms"));
        }
        if terms.iter().any(|t| t.len() != r) || diffs.iter().any(|d| d.len() != r) {
            return Err(QpdError::arg("every term and map needs one component per factor"));
        }
        for (k, d) in diffs.iter().enumerate() {
            for f in 0..r {
                if d[f].rows() != terms[k][f] || d[f].cols() != terms[k + 1][f] {
                    return Err(QpdError::arg(format!(
                        "differential out of index {} has the wrong shape",
                        min_index + k as i64 + 1
                    )));
                }
                if d[f].field() != ring.factors[f] {
                    return Err(QpdError::arg("matrix over the wrong field"));
                }
            }
        }
        for k in 1..diffs.len() {
            for f in 0..r {
                if !diffs[k - 1][f].mul(&diffs[k][f]).is_zero() {
                    return Err(QpdError::NotComplex {
                        index: min_index + k as i64 + 1,
                    });
                }
            }
        }
        Ok(ProductComplex {
            ring,
            min_index,
            terms,
            diffs,
        })
    }

    /// A random complex with `len` terms of dimension at most `max_dim`
    /// per factor.
    pub fn random(ring: &ProductRing, len: usize, max_dim: usize, rng: &mut ChaCha8Rng) -> Result<Self> {
        let r = ring.factors.len();
        let terms: Vec<Vec<usize>> = (0..len)
            .map(|_| (0..r).map(|_| rng.random_range(0..=max_dim)).collect())
            .collect();
        let mut diffs: Vec<Vec<Matrix>> = Vec::new();
        for k in 0..len.saturating_sub(1) {
            let mut comp = Vec::with_capacity(r);
            for (f, &field) in ring.factors.iter().enumerate() {
                let (rows, cols) = (terms[k][f], terms[k + 1][f]);
                // land in the kernel of the previous map
                let ker = if k == 0 {
                    Matrix::identity(field, rows)
                } else {
                    diffs[k - 1][f].kernel_basis()
                };
                let inner = ker.cols();
                let data: Vec<u32> = (0..inner * cols).map(|_| rng.random_range(0..field.p())).collect();
                let b = Matrix::from_vec(field, inner, cols, data);
                comp.push(if inner == 0 {
                    Matrix::zeros(field, rows, cols)
                } else {
                    ker.mul(&b)
                });
            }
            diffs.push(comp);
        }
        ProductComplex::new(ring.clone(), 0, terms, diffs)
    }

    pub fn ring(&self) -> &ProductRing {
        &self.ring
    }

    fn diff(&self, n: i64, f: usize) -> Option<&Matrix> {
        let k = n - 1 - self.min_index;
        (k >= 0 && (k as usize) < self.diffs.len()).then(|| &self.diffs[k as usize][f])
    }

    fn dim(&self, n: i64, f: usize) -> usize {
        let k = n - self.min_index;
        if k < 0 || k as usize >= self.terms.len() {
            return 0;
        }
        self.terms[k as usize][f]
    }

    fn indices(&self) -> std::ops::Range<i64> {
        self.min_index..self.min_index + self.terms.len() as i64
    }

    /// Cycles and boundaries at index `n` over factor `f`.
    fn cycles_boundaries(&self, n: i64, f: usize) -> (Matrix, EchelonBasis) {
        let field = self.ring.factors[f];
        let dn = self.dim(n, f);
        let z = match self.diff(n, f) {
            Some(d) => d.kernel_basis(),
            None => Matrix::identity(field, dn),
        };
        let b = match self.diff(n + 1, f) {
            Some(d) => EchelonBasis::column_span(d),
            None => EchelonBasis::empty(field, dn),
        };
        (z, b)
    }

    /// `dim H_n` per factor.
    pub fn homology_dims(&self) -> Vec<(i64, Vec<usize>)> {
        self.indices()
            .map(|n| {
                let dims = (0..self.ring.factors.len())
                    .map(|f| {
                        let (z, b) = self.cycles_boundaries(n, f);
                        z.cols() - b.dim()
                    })
                    .collect();
                (n, dims)
            })
            .collect()
    }

    pub fn hsup(&self) -> Option<i64> {
        self.homology_dims()
            .into_iter()
            .filter(|(_, d)| d.iter().any(|&x| x > 0))
            .map(|(n, _)| n)
            .max()
    }

    /// The chain map `H(M) → M` picking cycle representatives, checked to
    /// land in cycles and to induce an isomorphism on homology.
    pub fn homology_section(&self) -> Result<Vec<(i64, Vec<Matrix>)>> {
        let mut out = Vec::new();
        for n in self.indices() {
            let mut comps = Vec::new();
            for f in 0..self.ring.factors.len() {
                let (z, b) = self.cycles_boundaries(n, f);
                let mut span = b.clone();
                let mut reps = Vec::new();
                for c in z.columns() {
                    if span.insert(c.clone()) {
                        reps.push(c);
                    }
                }
                let field = self.ring.factors[f];
                let s = Matrix::from_columns(field, self.dim(n, f), &reps);
                if let Some(d) = self.diff(n, f) {
                    if !d.mul(&s).is_zero() {
                        return Err(QpdError::Inconsistent("section does not land in cycles".into()));
                    }
                }
                // injective modulo boundaries: reps ∪ boundaries independent
                let mut check = b.clone();
                if !reps.iter().all(|r| check.insert(r.clone())) {
                    return Err(QpdError::Inconsistent("section is not injective on homology".into()));
                }
                if b.dim() + reps.len() != z.cols() {
                    return Err(QpdError::Inconsistent("section is not onto homology".into()));
                }
                comps.push(s);
            }
            out.push((n, comps));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VnrReport {
    pub pd: Bound,
    /// `None` for the zero complex (`qpd = -inf`).
    pub qpd: Option<i64>,
    pub hsup: Option<i64>,
    pub quasi_isomorphic_to_homology: bool,
    pub homology_dims: Vec<(i64, Vec<usize>)>,
}

/// `pd` and `qpd` through the quasi-isomorphism `H(M) ≃ M`.
pub fn evaluate(c: &ProductComplex) -> Result<VnrReport> {
    let section = c.homology_section()?;
    let dims = c.homology_dims();
    let ok = section
        .iter()
        .zip(&dims)
        .all(|((_, s), (_, d))| s.iter().zip(d).all(|(m, &x)| m.cols() == x));
    let hsup = c.hsup();
    let (pd, qpd) = match hsup {
        Some(h) => (Bound::Finite(h), Some(0)),
        None => (Bound::MinusInfinity, None),
    };
    Ok(VnrReport {
        pd,
        qpd,
        hsup,
        quasi_isomorphic_to_homology: ok,
        homology_dims: dims,
    })
}

pub fn random_complexes(ring: &ProductRing, count: usize, seed: u64) -> Result<Vec<ProductComplex>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.random_range(1..=4);
            ProductComplex::random(ring, len, 3, &mut rng)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_complexes_are_formal() {
        let r = ProductRing::new(&[5, 5]).unwrap();
        for c in random_complexes(&r, 20, 3).unwrap() {
            let rep = evaluate(&c).unwrap();
            assert!(rep.quasi_isomorphic_to_homology);
            match rep.hsup {
                Some(h) => assert_eq!((rep.pd, rep.qpd), (Bound::Finite(h), Some(0))),
                None => assert_eq!(rep.pd, Bound::MinusInfinity),
            }
        }
    }

    #[test]
    fn bad_shapes_are_rejected() {
        let r = ProductRing::new(&[5, 5]).unwrap();
        let f = r.factors()[0];
        let d = vec![Matrix::identity(f, 1), Matrix::identity(f, 1)];
        let one = vec![1, 1];
        assert!(ProductComplex::new(r.clone(), 0, vec![one.clone(), one.clone(), one], vec![d.clone(), d]).is_err());
    }
}
