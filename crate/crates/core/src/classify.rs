//! Local-ring invariants of `R = Q/I`: embedding dimension, minimal number
//! of generators of `I`, the Burch property, complete intersections and the
//! conormal module `I/I²`.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{QpdError, Result};
use crate::gmod::{GradedModule, Window};
use crate::linalg::{EchelonBasis, Matrix};
use crate::poly::{Monomial, Polynomial};
use crate::ring::QuotientRing;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TriState {
    Yes,
    No,
    Unknown,
}

impl TriState {
    pub fn from_bool(b: bool) -> Self {
        if b {
            TriState::Yes
        } else {
            TriState::No
        }
    }

    pub fn is_yes(self) -> bool {
        self == TriState::Yes
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingClassification {
    pub edim: usize,
    pub mu: usize,
    pub krull_dim: usize,
    pub is_artinian: bool,
    pub is_burch: TriState,
    pub is_complete_intersection: bool,
    pub is_hypersurface: bool,
    pub conormal_free: TriState,
}

/// Coordinates in the monomial basis of `Q_d`.
struct QDegree {
    index: HashMap<Monomial, usize>,
    len: usize,
}

impl QDegree {
    fn new(r: &QuotientRing, d: i64) -> Self {
        let monos = if d < 0 {
            Vec::new()
        } else {
            r.poly_ring().monomials_of_degree(d as u32)
        };
        let len = monos.len();
        QDegree {
            index: monos.into_iter().enumerate().map(|(i, m)| (m, i)).collect(),
            len,
        }
    }

    fn vector(&self, f: &Polynomial) -> Vec<u32> {
        let mut v = vec![0; self.len];
        for (m, c) in f.terms() {
            v[self.index[m]] = *c;
        }
        v
    }
}

fn gen_degrees(r: &QuotientRing) -> Vec<(i64, &Polynomial)> {
    r.generators()
        .iter()
        .map(|g| (r.degree_of(g).expect("homogeneous"), g))
        .collect()
}

/// Span in `Q_d` of `m · g` over generators `g` and monomials `m` of degree
/// at least `min_mult`.
fn ideal_span(r: &QuotientRing, gens: &[(i64, &Polynomial)], d: i64, min_mult: i64) -> EchelonBasis {
    let q = r.poly_ring();
    let qd = QDegree::new(r, d);
    let mut span = EchelonBasis::empty(r.field(), qd.len);
    for &(gd, g) in gens {
        let md = d - gd;
        if md < min_mult || md < 0 {
            continue;
        }
        for m in q.monomials_of_degree(md as u32) {
            span.insert(qd.vector(&q.mul_term(g, &m, 1)));
        }
    }
    span
}

/// `(mu, edim)`: minimal generators of `I` and of the maximal ideal of `R`.
pub fn mu_and_edim(r: &QuotientRing) -> (usize, usize) {
    let gens = gen_degrees(r);
    let mut degs: Vec<i64> = gens.iter().map(|g| g.0).collect();
    degs.sort_unstable();
    degs.dedup();
    let mut mu = 0;
    for &d in &degs {
        mu += ideal_span(r, &gens, d, 0).dim() - ideal_span(r, &gens, d, 1).dim();
    }
    let n = r.nvars();
    let rows: Vec<Vec<i64>> = r
        .generators()
        .iter()
        .map(|g| {
            (0..n)
                .map(|v| g.coefficient(&Monomial::var(n, v)) as i64)
                .collect()
        })
        .collect();
    let linear_rank = if rows.is_empty() {
        0
    } else {
        Matrix::from_rows(r.field(), &rows).rank()
    };
    (mu, n - linear_rank)
}

/// `I_d` as the kernel of `Q_d → R_d`.
fn ideal_in_degree(r: &QuotientRing, d: i64) -> Vec<Vec<u32>> {
    let q = r.poly_ring();
    if d < 0 {
        return Vec::new();
    }
    let monos = q.monomials_of_degree(d as u32);
    let dd = r.degree_data(d);
    let cols: Vec<Vec<u32>> = monos.iter().map(|m| dd.monomial_coords(m).to_vec()).collect();
    Matrix::from_columns(r.field(), dd.dim(), &cols)
        .kernel_basis()
        .columns()
}

/// `(I :_Q n)_d`: elements of `Q_d` sent into `I` by every variable.
fn colon_in_degree(r: &QuotientRing, d: i64) -> Vec<Vec<u32>> {
    let q = r.poly_ring();
    if d < 0 {
        return Vec::new();
    }
    let monos = q.monomials_of_degree(d as u32);
    let mut blocks: Vec<Vec<u32>> = vec![Vec::new(); monos.len()];
    for v in 0..r.nvars() {
        let e = r.var_degree(v);
        let dd = r.degree_data(d + e);
        let xv = Monomial::var(r.nvars(), v);
        for (j, m) in monos.iter().enumerate() {
            blocks[j].extend_from_slice(dd.monomial_coords(&m.mul(&xv)));
        }
    }
    let rows = blocks.first().map_or(0, |b| b.len());
    Matrix::from_columns(r.field(), rows, &blocks)
        .kernel_basis()
        .columns()
}

/// Span in `Q_d` of `x_v · S_{d - deg v}` where `S` is given degreewise in
/// monomial coordinates.
fn times_maximal(r: &QuotientRing, d: i64, lower: &dyn Fn(i64) -> Vec<Vec<u32>>) -> EchelonBasis {
    let q = r.poly_ring();
    let qd = QDegree::new(r, d);
    let mut span = EchelonBasis::empty(r.field(), qd.len);
    for v in 0..r.nvars() {
        let s = d - r.var_degree(v);
        if s < 0 {
            continue;
        }
        let monos = q.monomials_of_degree(s as u32);
        let xv = Monomial::var(r.nvars(), v);
        for vecs in lower(s) {
            let mut out = vec![0; qd.len];
            for (i, &c) in vecs.iter().enumerate() {
                if c != 0 {
                    out[qd.index[&monos[i].mul(&xv)]] = c;
                }
            }
            span.insert(out);
        }
    }
    span
}

/// Degree bound up to which `n·I` and `n·(I : n)` are compared.
pub fn burch_degree_bound(r: &QuotientRing) -> i64 {
    let maxgen = gen_degrees(r).iter().map(|g| g.0).max().unwrap_or(0);
    let base = maxgen + 2;
    match r.top_degree() {
        Some(t) => base.max(t + r.max_var_degree() + 1),
        None => base,
    }
}

/// Whether `n·I ≠ n·(I :_Q n)`. Differences found are conclusive; equality
/// up to the bound is conclusive only for artinian quotients.
pub fn is_burch(r: &QuotientRing) -> Result<TriState> {
    if r.generators().is_empty() {
        return Err(QpdError::arg("the Burch property needs a nonzero ideal"));
    }
    let bound = burch_degree_bound(r);
    for d in 1..=bound {
        let ni = times_maximal(r, d, &|s| ideal_in_degree(r, s));
        let nc = times_maximal(r, d, &|s| colon_in_degree(r, s));
        if ni.dim() != nc.dim() {
            return Ok(TriState::Yes);
        }
    }
    Ok(if r.is_artinian() {
        TriState::No
    } else {
        TriState::Unknown
    })
}

pub fn classify(r: &Arc<QuotientRing>) -> Result<RingClassification> {
    let (mu, edim) = mu_and_edim(r);
    let n = r.nvars();
    let krull = r.krull_dim();
    let ci = mu == n - krull;
    // generators with a linear part only eliminate variables
    let essential = mu - (n - edim);
    let hypersurface = ci && essential <= 1;
    let burch = if r.generators().is_empty() {
        TriState::No
    } else {
        is_burch(r)?
    };
    let conormal_free = if r.generators().is_empty() {
        TriState::Yes
    } else {
        conormal_module(r)?.1
    };
    Ok(RingClassification {
        edim,
        mu,
        krull_dim: krull,
        is_artinian: r.is_artinian(),
        is_burch: burch,
        is_complete_intersection: ci,
        is_hypersurface: hypersurface,
        conormal_free,
    })
}

/// `I/I²` as a graded `R`-module, with a freeness verdict from comparing its
/// Hilbert function with that of the free module on its minimal generators.
pub fn conormal_module(r: &Arc<QuotientRing>) -> Result<(GradedModule, TriState)> {
    let gens = gen_degrees(r);
    if gens.is_empty() {
        return Err(QpdError::arg("conormal module of the zero ideal"));
    }
    let q = Arc::new(r.ambient());
    let rr = r.clone();
    let lo = gens.iter().map(|g| g.0).min().unwrap();
    let maxgen = gens.iter().map(|g| g.0).max().unwrap();
    let (hi, complete) = match r.top_degree() {
        Some(t) => (maxgen + t + 1, true),
        None => (maxgen + r.truncation() as i64, false),
    };
    let free = GradedModule::free(q.clone(), &[0], lo, hi);
    let elem = |f: &Polynomial, d: i64| free.free_element(&[0], std::slice::from_ref(f), d);
    let ideal_gens: Vec<(i64, Vec<u32>)> = gens
        .iter()
        .map(|&(d, g)| Ok((d, elem(g, d)?)))
        .collect::<Result<_>>()?;
    let mut square_gens = Vec::new();
    for (i, &(di, gi)) in gens.iter().enumerate() {
        for &(dj, gj) in &gens[i..] {
            let d = di + dj;
            if d <= hi {
                square_gens.push((d, elem(&q.poly_ring().mul(gi, gj), d)?));
            }
        }
    }
    let upper = free.generate(&ideal_gens);
    let lower = free.generate(&square_gens);
    let upper_vecs: Vec<Vec<Vec<u32>>> = upper.iter().map(|e| e.basis().to_vec()).collect();
    let (over_q, _) = free.subquotient_by(Some(&upper_vecs), &lower);
    let mut module = over_q.with_ring(rr.clone())?;
    if complete {
        module = module.assume_complete();
    }
    let w: Window = module.window();
    let profile = module.generator_profile();
    let mut free_ok = true;
    for d in w.degrees() {
        let expect: usize = w
            .degrees()
            .zip(&profile)
            .map(|(g, &c)| c * rr.dim(d - g))
            .sum();
        if expect != module.dim(d) {
            free_ok = false;
        }
    }
    let verdict = match (free_ok, complete) {
        (false, _) => TriState::No,
        (true, true) => TriState::Yes,
        (true, false) => TriState::Unknown,
    };
    Ok((module, verdict))
}

/// Whether multiplication by `f` is injective on `m`. Only degrees whose
/// image is inside the known window are checked; `Unknown` if none is.
pub fn is_regular_element(f: &Polynomial, m: &GradedModule) -> Result<TriState> {
    let r = m.ring();
    let fd = r.degree_of(f)?;
    if fd <= 0 {
        return Err(QpdError::arg("regular element must have positive degree"));
    }
    let w = m.window();
    let mut checked = 0;
    for d in w.degrees() {
        if m.dim(d) == 0 {
            continue;
        }
        let Some(a) = m.poly_action(f, fd, d) else {
            continue;
        };
        checked += 1;
        if a.rank() < a.cols() {
            return Ok(TriState::No);
        }
    }
    if checked == 0 && !m.is_zero() {
        return Ok(TriState::Unknown);
    }
    Ok(TriState::Yes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmod::Presentation;

    fn ring(vars: &[&str], gens: &[&str]) -> Arc<QuotientRing> {
        QuotientRing::standard(101, vars, gens, 6).unwrap()
    }

    #[test]
    fn mu_edim_examples() {
        assert_eq!(mu_and_edim(&ring(&["x", "y"], &["x^2", "x*y", "y^2"])), (3, 2));
        assert_eq!(mu_and_edim(&ring(&["x", "y"], &["x^2", "y^2"])), (2, 2));
        assert_eq!(mu_and_edim(&ring(&["x"], &[])), (0, 1));
        // redundant generator does not change mu
        assert_eq!(
            mu_and_edim(&ring(&["x", "y"], &["x^2", "y^2", "x^2 + y^2", "x^3"])),
            (2, 2)
        );
        assert_eq!(mu_and_edim(&ring(&["x", "y"], &["x", "y^2"])), (2, 1));
    }

    #[test]
    fn burch_examples() {
        assert_eq!(is_burch(&ring(&["x", "y"], &["x^2", "x*y", "y^2"])).unwrap(), TriState::Yes);
        assert_eq!(is_burch(&ring(&["x", "y"], &["x^2", "y^2"])).unwrap(), TriState::No);
        assert_eq!(is_burch(&ring(&["x"], &["x"])).unwrap(), TriState::Yes);
    }

    #[test]
    fn classify_examples() {
        let c = classify(&ring(&["x", "y"], &["x^2", "y^2"])).unwrap();
        assert!(c.is_complete_intersection && !c.is_hypersurface);
        assert_eq!(c.conormal_free, TriState::Yes);
        let c = classify(&ring(&["x", "y"], &["x^2", "x*y", "y^2"])).unwrap();
        assert!(!c.is_complete_intersection);
        assert_eq!((c.edim, c.mu), (2, 3));
        assert_eq!(c.conormal_free, TriState::No);
        let c = classify(&ring(&["x"], &["x^2"])).unwrap();
        assert!(c.is_complete_intersection && c.is_hypersurface);
        assert_eq!(c.conormal_free, TriState::Yes);
        let c = classify(&ring(&["x", "y"], &["x", "y^3"])).unwrap();
        assert!(c.is_hypersurface);
    }

    #[test]
    fn regular_element_examples() {
        let r = ring(&["x", "y"], &[]);
        let free = |r: &Arc<QuotientRing>| {
            GradedModule::expand(
                r.clone(),
                &Presentation {
                    shifts: vec![0],
                    relations: vec![],
                },
                None,
            )
            .unwrap()
        };
        let x = r.parse("x").unwrap();
        assert_eq!(is_regular_element(&x, &free(&r)).unwrap(), TriState::Yes);
        let r2 = ring(&["x", "y"], &["x*y"]);
        assert_eq!(is_regular_element(&x, &free(&r2)).unwrap(), TriState::No);
        let r3 = ring(&["x"], &[]);
        let x2 = r3.parse("x^2").unwrap();
        assert_eq!(is_regular_element(&x2, &free(&r3)).unwrap(), TriState::Yes);
    }
}
