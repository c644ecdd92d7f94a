//! Bounded chain complexes: complexes of graded-free modules given by
//! polynomial matrices, and expanded complexes of arbitrary graded modules.
//!
//! Indices are homological (differentials lower the index by one). In both
//! representations `diffs[k]` maps term `k + 1` to term `k`, counted from
//! `min_index`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{QpdError, Result};
use crate::gmod::{GradedModule, ModuleMap, Presentation, Window};
use crate::linalg::{EchelonBasis, Matrix, Subquotient};
use crate::poly::Polynomial;
use crate::ring::{transport, QuotientRing};

/// Integers extended by `±∞`, used for invariants of zero complexes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtInt {
    NegInf,
    Fin(i64),
    PosInf,
}

impl ExtInt {
    pub fn finite(self) -> Option<i64> {
        match self {
            ExtInt::Fin(v) => Some(v),
            _ => None,
        }
    }

    pub fn unwrap(self) -> i64 {
        self.finite().expect("finite value")
    }
}

impl fmt::Display for ExtInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtInt::NegInf => write!(f, "-inf"),
            ExtInt::PosInf => write!(f, "inf"),
            ExtInt::Fin(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for ExtInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtInt::Fin(v) => s.serialize_i64(*v),
            ExtInt::NegInf => s.serialize_str("-inf"),
            ExtInt::PosInf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(ExtInt::Fin)
                .ok_or_else(|| serde::de::Error::custom("integer expected")),
            serde_json::Value::String(s) if s == "-inf" => Ok(ExtInt::NegInf),
            serde_json::Value::String(s) if s == "inf" => Ok(ExtInt::PosInf),
            _ => Err(serde::de::Error::custom("integer, \"inf\" or \"-inf\" expected")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Invariants {
    pub sup: ExtInt,
    pub inf: ExtInt,
    pub hsup: ExtInt,
    pub hinf: ExtInt,
    pub amp: ExtInt,
    pub is_perfect: bool,
}

fn sup_inf(nonzero: impl Iterator<Item = (i64, bool)>) -> (ExtInt, ExtInt) {
    let idx: Vec<i64> = nonzero.filter(|x| x.1).map(|x| x.0).collect();
    match (idx.iter().max(), idx.iter().min()) {
        (Some(&a), Some(&b)) => (ExtInt::Fin(a), ExtInt::Fin(b)),
        _ => (ExtInt::NegInf, ExtInt::PosInf),
    }
}

fn amplitude(hsup: ExtInt, hinf: ExtInt) -> ExtInt {
    match (hsup, hinf) {
        (ExtInt::Fin(a), ExtInt::Fin(b)) => ExtInt::Fin(a - b),
        _ => ExtInt::NegInf,
    }
}

/// Matrix of homogeneous polynomials, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Polynomial>,
}

impl PolyMatrix {
    pub fn zeros(ring: &QuotientRing, rows: usize, cols: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            entries: vec![ring.poly_ring().zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Polynomial>>, cols: usize) -> Result<Self> {
        let r = rows.len();
        let mut entries = Vec::with_capacity(r * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(QpdError::arg(format!(
                    "matrix row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            entries.extend(row);
        }
        Ok(PolyMatrix {
            rows: r,
            cols,
            entries,
        })
    }

    pub fn parse(ring: &QuotientRing, rows: &[Vec<&str>], cols: usize) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| ring.parse(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(parsed, cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, f: Polynomial) {
        self.entries[i * self.cols + j] = f;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn map(&self, f: impl Fn(&Polynomial) -> Polynomial) -> PolyMatrix {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn mul(&self, ring: &QuotientRing, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, other.rows);
        let q = ring.poly_ring();
        let mut out = PolyMatrix::zeros(ring, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = q.zero();
                for k in 0..self.cols {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = q.add(&acc, &q.mul(a, b));
                    }
                }
                out.set(i, j, ring.normal_form(&acc));
            }
        }
        out
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> PolyMatrix {
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                entries.push(self.get(i, j).clone());
            }
        }
        PolyMatrix {
            rows: rows.len(),
            cols: cols.len(),
            entries,
        }
    }

    /// Block matrix `[[a, b], [c, d]]`; shapes must agree.
    pub fn blocks(a: &PolyMatrix, b: &PolyMatrix, c: &PolyMatrix, d: &PolyMatrix) -> PolyMatrix {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        let rows = a.rows + c.rows;
        let cols = a.cols + b.cols;
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..a.rows {
            entries.extend((0..a.cols).map(|j| a.get(i, j).clone()));
            entries.extend((0..b.cols).map(|j| b.get(i, j).clone()));
        }
        for i in 0..c.rows {
            entries.extend((0..c.cols).map(|j| c.get(i, j).clone()));
            entries.extend((0..d.cols).map(|j| d.get(i, j).clone()));
        }
        PolyMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn to_strings(&self, ring: &QuotientRing) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| ring.format(self.get(i, j))).collect())
            .collect()
    }
}

/// Bounded complex of graded-free modules `⊕ R(-g)`.
#[derive(Clone, Debug)]
pub struct FreeComplex {
    ring: Arc<QuotientRing>,
    min_index: i64,
    terms: Vec<Vec<i64>>,
    diffs: Vec<PolyMatrix>,
}

impl PartialEq for FreeComplex {
    fn eq(&self, other: &Self) -> bool {
        *self.ring == *other.ring
            && self.min_index == other.min_index
            && self.terms == other.terms
            && self.diffs == other.diffs
    }
}

impl FreeComplex {
    /// Validates shapes, homogeneity, degree compatibility and `d∘d = 0`.
    /// Entries are stored in normal form.
    pub fn new(
        ring: Arc<QuotientRing>,
        min_index: i64,
        terms: Vec<Vec<i64>>,
        diffs: Vec<PolyMatrix>,
    ) -> Result<Self> {
        if terms.is_empty() {
            if !diffs.is_empty() {
                return Err(QpdError::arg("differentials given for an empty complex"));
            }
        } else if diffs.len() != terms.len() - 1 {
            return Err(QpdError::arg(format!(
                "{} terms need {} differentials, got {}",
                terms.len(),
                terms.len() - 1,
                diffs.len()
            )));
        }
        let mut nd = Vec::with_capacity(diffs.len());
        for (k, d) in diffs.into_iter().enumerate() {
            let (tgt, src) = (&terms[k], &terms[k + 1]);
            if d.rows != tgt.len() || d.cols != src.len() {
                return Err(QpdError::arg(format!(
                    "differential from index {} is {}x{}, expected {}x{}",
                    min_index + k as i64 + 1,
                    d.rows,
                    d.cols,
                    tgt.len(),
                    src.len()
                )));
            }
            let d = d.map(|f| ring.normal_form(f));
            for i in 0..d.rows {
                for j in 0..d.cols {
                    let f = d.get(i, j);
                    if f.is_zero() {
                        continue;
                    }
                    let want = src[j] - tgt[i];
                    let got = ring.degree_of(f).map_err(|e| {
                        QpdError::arg(format!(
                            "differential from index {}, entry ({i},{j}): {e}",
                            min_index + k as i64 + 1
                        ))
                    })?;
                    if got != want {
                        return Err(QpdError::arg(format!(
                            "differential from index {}, entry ({i},{j}) = {} has degree {got}, expected {want}",
                            min_index + k as i64 + 1,
                            ring.format(f)
                        )));
                    }
                }
            }
            nd.push(d);
        }
        for k in 0..nd.len().saturating_sub(1) {
            if !nd[k].mul(&ring, &nd[k + 1]).is_zero() {
                return Err(QpdError::NotComplex {
                    index: min_index + k as i64 + 2,
                });
            }
        }
        Ok(FreeComplex {
            ring,
            min_index,
            terms,
            diffs: nd,
        })
    }

    pub fn zero(ring: Arc<QuotientRing>) -> Self {
        FreeComplex {
            ring,
            min_index: 0,
            terms: Vec::new(),
            diffs: Vec::new(),
        }
    }

    /// The free module `⊕ R(-g)` placed in homological degree `index`.
    pub fn free_module(ring: Arc<QuotientRing>, shifts: Vec<i64>, index: i64) -> Self {
        FreeComplex {
            ring,
            min_index: index,
            terms: vec![shifts],
            diffs: Vec::new(),
        }
    }

    pub fn ring(&self) -> &Arc<QuotientRing> {
        &self.ring
    }
    pub fn min_index(&self) -> i64 {
        self.min_index
    }
    pub fn max_index(&self) -> i64 {
        self.min_index + self.terms.len() as i64 - 1
    }
    pub fn terms(&self) -> &[Vec<i64>] {
        &self.terms
    }
    pub fn diffs(&self) -> &[PolyMatrix] {
        &self.diffs
    }

    /// Shifts of the term at homological index `n`.
    pub fn term(&self, n: i64) -> &[i64] {
        let k = n - self.min_index;
        if k < 0 || k >= self.terms.len() as i64 {
            &[]
        } else {
            &self.terms[k as usize]
        }
    }

    /// Differential out of index `n` (to `n - 1`), if both terms exist.
    pub fn diff(&self, n: i64) -> Option<&PolyMatrix> {
        let k = n - 1 - self.min_index;
        if k < 0 || k >= self.diffs.len() as i64 {
            None
        } else {
            Some(&self.diffs[k as usize])
        }
    }

    pub fn ranks(&self) -> Vec<(i64, usize)> {
        self.terms
            .iter()
            .enumerate()
            .map(|(k, t)| (self.min_index + k as i64, t.len()))
            .collect()
    }

    pub fn total_rank(&self) -> usize {
        self.terms.iter().map(|t| t.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.is_empty())
    }

    pub fn sup(&self) -> ExtInt {
        sup_inf(self.ranks().into_iter().map(|(n, r)| (n, r > 0))).0
    }

    pub fn inf(&self) -> ExtInt {
        sup_inf(self.ranks().into_iter().map(|(n, r)| (n, r > 0))).1
    }

    pub fn min_shift(&self) -> Option<i64> {
        self.terms.iter().flatten().copied().min()
    }

    pub fn max_shift(&self) -> Option<i64> {
        self.terms.iter().flatten().copied().max()
    }

    /// Largest degree of a differential entry.
    pub fn max_entry_degree(&self) -> i64 {
        let mut best = 0;
        for (k, d) in self.diffs.iter().enumerate() {
            for i in 0..d.rows {
                for j in 0..d.cols {
                    if !d.get(i, j).is_zero() {
                        best = best.max(self.terms[k + 1][j] - self.terms[k][i]);
                    }
                }
            }
        }
        best
    }

    /// Window on which every term and its homology is fully visible over an
    /// artinian ring, or a truncation-sized window otherwise.
    pub fn natural_window(&self) -> (i64, i64) {
        let lo = self.min_shift().unwrap_or(0);
        let hi = self.max_shift().unwrap_or(0);
        match self.ring.top_degree() {
            Some(t) => (lo, hi + t),
            None => (lo, hi + self.ring.truncation() as i64),
        }
    }

    /// Entries that are nonzero constants, i.e. units of the local ring.
    pub fn first_unit_entry(&self) -> Option<(usize, usize, usize)> {
        for (k, d) in self.diffs.iter().enumerate() {
            for j in 0..d.cols {
                for i in 0..d.rows {
                    let f = d.get(i, j);
                    if !f.is_zero() && self.terms[k + 1][j] == self.terms[k][i] {
                        return Some((k, i, j));
                    }
                }
            }
        }
        None
    }

    pub fn is_minimal(&self) -> bool {
        self.first_unit_entry().is_none()
    }

    /// `Σ^s`: indices move up by `s`, differentials pick up `(-1)^s`.
    pub fn shift(&self, s: i64) -> FreeComplex {
        let q = self.ring.poly_ring();
        let diffs = if s.rem_euclid(2) == 1 {
            self.diffs.iter().map(|d| d.map(|f| q.neg(f))).collect()
        } else {
            self.diffs.clone()
        };
        FreeComplex {
            ring: self.ring.clone(),
            min_index: self.min_index + s,
            terms: self.terms.clone(),
            diffs,
        }
    }

    /// Internal twist: every generator moves up by `t` degrees.
    pub fn twist(&self, t: i64) -> FreeComplex {
        FreeComplex {
            ring: self.ring.clone(),
            min_index: self.min_index,
            terms: self
                .terms
                .iter()
                .map(|ts| ts.iter().map(|g| g + t).collect())
                .collect(),
            diffs: self.diffs.clone(),
        }
    }

    /// Re-indexes onto `[lo, hi]` (padding with zero terms).
    pub fn padded(&self, lo: i64, hi: i64) -> FreeComplex {
        if self.terms.is_empty() {
            let n = (hi - lo + 1).max(0) as usize;
            let diffs = (0..n.saturating_sub(1))
                .map(|_| PolyMatrix::zeros(&self.ring, 0, 0))
                .collect();
            return FreeComplex {
                ring: self.ring.clone(),
                min_index: lo,
                terms: vec![Vec::new(); n],
                diffs,
            };
        }
        assert!(lo <= self.min_index && hi >= self.max_index());
        let mut terms = Vec::new();
        let mut diffs = Vec::new();
        for n in lo..=hi {
            terms.push(self.term(n).to_vec());
            if n > lo {
                let d = self.diff(n).cloned().unwrap_or_else(|| {
                    PolyMatrix::zeros(&self.ring, self.term(n - 1).len(), self.term(n).len())
                });
                diffs.push(d);
            }
        }
        FreeComplex {
            ring: self.ring.clone(),
            min_index: lo,
            terms,
            diffs,
        }
    }

    /// Removes zero terms at both ends.
    pub fn trimmed(&self) -> FreeComplex {
        let first = self.terms.iter().position(|t| !t.is_empty());
        let last = self.terms.iter().rposition(|t| !t.is_empty());
        match (first, last) {
            (Some(a), Some(b)) => FreeComplex {
                ring: self.ring.clone(),
                min_index: self.min_index + a as i64,
                terms: self.terms[a..=b].to_vec(),
                diffs: self.diffs[a..b].to_vec(),
            },
            _ => FreeComplex::zero(self.ring.clone()),
        }
    }

    pub fn direct_sum(parts: &[&FreeComplex]) -> Result<FreeComplex> {
        let nonzero: Vec<&&FreeComplex> = parts.iter().filter(|p| !p.terms.is_empty()).collect();
        let Some(first) = parts.first() else {
            return Err(QpdError::arg("direct sum of no complexes"));
        };
        let ring = first.ring.clone();
        if nonzero.is_empty() {
            return Ok(FreeComplex::zero(ring));
        }
        let lo = nonzero.iter().map(|p| p.min_index).min().unwrap();
        let hi = nonzero.iter().map(|p| p.max_index()).max().unwrap();
        let padded: Vec<FreeComplex> = nonzero.iter().map(|p| p.padded(lo, hi)).collect();
        let mut terms = Vec::new();
        let mut diffs = Vec::new();
        for n in lo..=hi {
            terms.push(padded.iter().flat_map(|p| p.term(n).to_vec()).collect::<Vec<_>>());
            if n > lo {
                let rows: usize = padded.iter().map(|p| p.term(n - 1).len()).sum();
                let cols: usize = padded.iter().map(|p| p.term(n).len()).sum();
                let mut m = PolyMatrix::zeros(&ring, rows, cols);
                let (mut r0, mut c0) = (0, 0);
                for p in &padded {
                    let d = p.diff(n).unwrap();
                    for i in 0..d.rows {
                        for j in 0..d.cols {
                            m.set(r0 + i, c0 + j, d.get(i, j).clone());
                        }
                    }
                    r0 += d.rows;
                    c0 += d.cols;
                }
                diffs.push(m);
            }
        }
        Ok(FreeComplex {
            ring,
            min_index: lo,
            terms,
            diffs,
        })
    }

    /// Cone of a chain map `f: M → N` between free complexes, with
    /// `cn_n = N_n ⊕ M_{n-1}` and `d(y, x) = (d y + f x, -d x)`.
    pub fn cone(f: &FreeChainMap) -> Result<FreeComplex> {
        f.verify()?;
        let (m, n) = (&f.source, &f.target);
        let ring = n.ring.clone();
        let q = ring.poly_ring();
        let lo = [m.min_index + 1, n.min_index]
            .into_iter()
            .min()
            .unwrap_or(0);
        let hi = [m.max_index() + 1, n.max_index()]
            .into_iter()
            .max()
            .unwrap_or(0);
        let mut terms = Vec::new();
        let mut diffs = Vec::new();
        for k in lo..=hi {
            let mut t = n.term(k).to_vec();
            t.extend_from_slice(m.term(k - 1));
            terms.push(t);
            if k > lo {
                let zero = |r: usize, c: usize| PolyMatrix::zeros(&ring, r, c);
                let dn = n
                    .diff(k)
                    .cloned()
                    .unwrap_or_else(|| zero(n.term(k - 1).len(), n.term(k).len()));
                let fk = f.component(k - 1);
                let dm = m
                    .diff(k - 1)
                    .map(|d| d.map(|e| q.neg(e)))
                    .unwrap_or_else(|| zero(m.term(k - 2).len(), m.term(k - 1).len()));
                let c = zero(m.term(k - 2).len(), n.term(k).len());
                diffs.push(PolyMatrix::blocks(&dn, &fk, &c, &dm));
            }
        }
        Ok(FreeComplex::new(ring, lo, terms, diffs)?.trimmed())
    }

    /// `K(x; P) = cone(x: P(-deg x) → P)`, iterated over the sequence.
    pub fn koszul(&self, xs: &[Polynomial]) -> Result<FreeComplex> {
        let mut cur = self.clone();
        for x in xs {
            let e = self.ring.degree_of(x)?;
            if e <= 0 {
                return Err(QpdError::arg("Koszul elements must have positive degree"));
            }
            let src = cur.twist(e);
            let f = FreeChainMap::scalar(&src, &cur, x)?;
            cur = FreeComplex::cone(&f)?;
        }
        Ok(cur)
    }

    /// The same shifts and entries over another ring with the same
    /// variables (entries reduced there).
    pub fn change_ring(&self, ring: Arc<QuotientRing>) -> Result<FreeComplex> {
        let (from, to) = (self.ring.poly_ring(), ring.poly_ring());
        if from.names() != to.names() || from.degrees() != to.degrees() {
            return Err(QpdError::arg("base change between rings with different variables"));
        }
        let same_field = from.field() == to.field();
        let diffs = self
            .diffs
            .iter()
            .map(|d| {
                d.map(|f| {
                    if same_field {
                        f.clone()
                    } else {
                        transport(from, to, f)
                    }
                })
            })
            .collect();
        FreeComplex::new(ring, self.min_index, self.terms.clone(), diffs)
    }

    /// Greedy cancellation of unit entries. The result is homotopy
    /// equivalent to the input, minimal, and trimmed.
    pub fn minimalize(&self) -> FreeComplex {
        let mut c = self.clone();
        let q = c.ring.poly_ring().clone();
        let fld = q.field();
        while let Some((k, i, j)) = c.first_unit_entry() {
            // d_k: term k+1 → term k, unit u at (i, j)
            let d = &c.diffs[k];
            let u = d.get(i, j).constant_term();
            let uinv = fld.inv(u);
            let rows_keep: Vec<usize> = (0..d.rows).filter(|&r| r != i).collect();
            let cols_keep: Vec<usize> = (0..d.cols).filter(|&s| s != j).collect();
            let mut nd = PolyMatrix::zeros(&c.ring, rows_keep.len(), cols_keep.len());
            for (a, &r) in rows_keep.iter().enumerate() {
                let phi = d.get(r, j);
                for (b, &s) in cols_keep.iter().enumerate() {
                    let gamma = d.get(i, s);
                    let eps = d.get(r, s);
                    let val = if phi.is_zero() || gamma.is_zero() {
                        eps.clone()
                    } else {
                        let prod = q.scale(&q.mul(phi, gamma), uinv);
                        c.ring.normal_form(&q.sub(eps, &prod))
                    };
                    nd.set(a, b, val);
                }
            }
            c.diffs[k] = nd;
            if k + 1 < c.diffs.len() {
                let above = &c.diffs[k + 1];
                let all_cols: Vec<usize> = (0..above.cols).collect();
                c.diffs[k + 1] = above.select(&cols_keep, &all_cols);
            }
            if k > 0 {
                let below = &c.diffs[k - 1];
                let all_rows: Vec<usize> = (0..below.rows).collect();
                c.diffs[k - 1] = below.select(&all_rows, &rows_keep);
            }
            c.terms[k + 1].remove(j);
            c.terms[k].remove(i);
        }
        c.trimmed()
    }

    /// Expansion to modules on the window `[lo, hi]`.
    pub fn expand(&self, lo: i64, hi: i64) -> Result<ChainComplex> {
        let ring = self.ring.clone();
        let terms: Vec<Arc<GradedModule>> = self
            .terms
            .iter()
            .map(|s| Arc::new(GradedModule::free(ring.clone(), s, lo, hi)))
            .collect();
        let w = Window::join(terms.iter().map(|t| t.window()));
        let terms: Vec<Arc<GradedModule>> = terms
            .into_iter()
            .map(|t| t.reframe(w.lo, w.hi).map(Arc::new))
            .collect::<Result<_>>()?;
        let mut diffs = Vec::with_capacity(self.diffs.len());
        for (k, d) in self.diffs.iter().enumerate() {
            let blocks = w
                .degrees()
                .map(|deg| free_block(&ring, &self.terms[k + 1], &self.terms[k], d, deg))
                .collect();
            diffs.push(ModuleMap::new_unchecked(
                terms[k + 1].clone(),
                terms[k].clone(),
                blocks,
            )?);
        }
        ChainComplex::new(ring, self.min_index, terms, diffs)
    }

    pub fn expand_natural(&self) -> Result<ChainComplex> {
        let (lo, hi) = self.natural_window();
        self.expand(lo, hi)
    }
}

/// Matrix in degree `deg` of the map between free modules given by `d`.
pub fn free_block(
    ring: &QuotientRing,
    src: &[i64],
    tgt: &[i64],
    d: &PolyMatrix,
    deg: i64,
) -> Matrix {
    let f = ring.field();
    let rows: usize = tgt.iter().map(|&g| ring.dim(deg - g)).sum();
    let cols: usize = src.iter().map(|&g| ring.dim(deg - g)).sum();
    let mut m = Matrix::zeros(f, rows, cols);
    let mut c0 = 0;
    for (j, &sj) in src.iter().enumerate() {
        let basis = ring.degree_data(deg - sj);
        let n = if deg - sj < 0 { 0 } else { ring.dim(deg - sj) };
        let mut r0 = 0;
        for (i, &ti) in tgt.iter().enumerate() {
            let rdim = ring.dim(deg - ti);
            let e = d.get(i, j);
            if !e.is_zero() && rdim > 0 {
                for (b, u) in basis.basis.iter().take(n).enumerate() {
                    let col = ring.mul_monomial_coords(u, e, sj - ti);
                    for (a, &x) in col.iter().enumerate().take(rdim) {
                        if x != 0 {
                            m.set(r0 + a, c0 + b, x);
                        }
                    }
                }
            }
            r0 += rdim;
        }
        c0 += n;
    }
    m
}

/// Degree-preserving chain map between free complexes, one polynomial
/// matrix per index (missing indices are zero).
#[derive(Clone, Debug)]
pub struct FreeChainMap {
    pub source: FreeComplex,
    pub target: FreeComplex,
    pub min_index: i64,
    pub maps: Vec<PolyMatrix>,
}

impl FreeChainMap {
    pub fn component(&self, n: i64) -> PolyMatrix {
        let k = n - self.min_index;
        if k >= 0 && (k as usize) < self.maps.len() {
            self.maps[k as usize].clone()
        } else {
            PolyMatrix::zeros(
                &self.target.ring,
                self.target.term(n).len(),
                self.source.term(n).len(),
            )
        }
    }

    /// Multiplication by `x` on every term, from `src` (a twist of `tgt`)
    /// to `tgt`.
    pub fn scalar(src: &FreeComplex, tgt: &FreeComplex, x: &Polynomial) -> Result<Self> {
        let ring = &tgt.ring;
        let q = ring.poly_ring();
        let mut maps = Vec::new();
        for n in tgt.min_index..=tgt.max_index() {
            let r = tgt.term(n).len();
            let c = src.term(n).len();
            if r != c {
                return Err(QpdError::arg("scalar map between terms of different ranks"));
            }
            let mut m = PolyMatrix::zeros(ring, r, c);
            for i in 0..r {
                m.set(i, i, ring.normal_form(&q.mul(x, &q.constant(1))));
            }
            maps.push(m);
        }
        Ok(FreeChainMap {
            source: src.clone(),
            target: tgt.clone(),
            min_index: tgt.min_index,
            maps,
        })
    }

    /// Checks shapes, degrees and `d f = f d`.
    pub fn verify(&self) -> Result<()> {
        let ring = &self.target.ring;
        let lo = self.source.min_index.min(self.target.min_index);
        let hi = self.source.max_index().max(self.target.max_index());
        for n in lo..=hi {
            let f = self.component(n);
            if f.rows != self.target.term(n).len() || f.cols != self.source.term(n).len() {
                return Err(QpdError::arg(format!("chain map component {n} has wrong shape")));
            }
            for i in 0..f.rows {
                for j in 0..f.cols {
                    let e = f.get(i, j);
                    if !ring.is_zero_element(e) {
                        let want = self.source.term(n)[j] - self.target.term(n)[i];
                        if ring.degree_of(e)? != want {
                            return Err(QpdError::arg(format!(
                                "chain map component {n} entry ({i},{j}) has the wrong degree"
                            )));
                        }
                    }
                }
            }
            if n > lo {
                let dn = self.target.diff(n).cloned().unwrap_or_else(|| {
                    PolyMatrix::zeros(ring, self.target.term(n - 1).len(), self.target.term(n).len())
                });
                let dm = self.source.diff(n).cloned().unwrap_or_else(|| {
                    PolyMatrix::zeros(ring, self.source.term(n - 1).len(), self.source.term(n).len())
                });
                let lhs = dn.mul(ring, &f);
                let rhs = self.component(n - 1).mul(ring, &dm);
                if lhs != rhs {
                    return Err(QpdError::NotChainMap {
                        index: n,
                        degree: 0,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Bounded complex of graded modules on a common degree window.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    ring: Arc<QuotientRing>,
    min_index: i64,
    terms: Vec<Arc<GradedModule>>,
    diffs: Vec<ModuleMap>,
}

/// `H_n = Z_n / B_n` for every index, with the quotient data.
#[derive(Clone, Debug)]
pub struct HomologyFamily {
    pub min_index: i64,
    pub modules: Vec<GradedModule>,
    pub quotients: Vec<Vec<Subquotient>>,
}

impl HomologyFamily {
    pub fn get(&self, n: i64) -> Option<&GradedModule> {
        let k = n - self.min_index;
        if k < 0 {
            return None;
        }
        self.modules.get(k as usize)
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.modules.len()).map(move |k| self.min_index + k as i64)
    }

    pub fn hsup(&self) -> ExtInt {
        sup_inf(self.indices().map(|n| (n, !self.get(n).unwrap().is_zero()))).0
    }

    pub fn hinf(&self) -> ExtInt {
        sup_inf(self.indices().map(|n| (n, !self.get(n).unwrap().is_zero()))).1
    }

    pub fn amp(&self) -> ExtInt {
        amplitude(self.hsup(), self.hinf())
    }

    /// Indices with nonzero homology.
    pub fn support(&self) -> Vec<i64> {
        self.indices()
            .filter(|&n| !self.get(n).unwrap().is_zero())
            .collect()
    }
}

impl ChainComplex {
    pub fn new(
        ring: Arc<QuotientRing>,
        min_index: i64,
        terms: Vec<Arc<GradedModule>>,
        diffs: Vec<ModuleMap>,
    ) -> Result<Self> {
        if !terms.is_empty() && diffs.len() != terms.len() - 1 {
            return Err(QpdError::arg("wrong number of differentials"));
        }
        if let Some(t0) = terms.first() {
            let w = t0.window();
            for t in &terms {
                if t.lo() != w.lo || t.hi() != w.hi {
                    return Err(QpdError::arg("terms live on different windows"));
                }
            }
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.source().dims() != terms[k + 1].dims() || d.target().dims() != terms[k].dims() {
                return Err(QpdError::arg(format!(
                    "differential from index {} does not match its terms",
                    min_index + k as i64 + 1
                )));
            }
        }
        let c = ChainComplex {
            ring,
            min_index,
            terms,
            diffs,
        };
        c.check_square_zero()?;
        Ok(c)
    }

    fn check_square_zero(&self) -> Result<()> {
        for k in 1..self.diffs.len() {
            for (a, b) in self.diffs[k - 1].blocks().iter().zip(self.diffs[k].blocks()) {
                if !a.mul(b).is_zero() {
                    return Err(QpdError::NotComplex {
                        index: self.min_index + k as i64 + 1,
                    });
                }
            }
        }
        Ok(())
    }

    /// A single module in homological degree `index`.
    pub fn module(m: GradedModule, index: i64) -> Self {
        ChainComplex {
            ring: m.ring().clone(),
            min_index: index,
            terms: vec![Arc::new(m)],
            diffs: Vec::new(),
        }
    }

    pub fn ring(&self) -> &Arc<QuotientRing> {
        &self.ring
    }
    pub fn min_index(&self) -> i64 {
        self.min_index
    }
    pub fn max_index(&self) -> i64 {
        self.min_index + self.terms.len() as i64 - 1
    }
    pub fn terms(&self) -> &[Arc<GradedModule>] {
        &self.terms
    }
    pub fn diffs(&self) -> &[ModuleMap] {
        &self.diffs
    }

    pub fn window(&self) -> Window {
        self.terms
            .first()
            .map_or(Window::new(0, -1, true), |t| Window {
                complete: self.terms.iter().all(|t| t.is_complete()),
                ..t.window()
            })
    }

    pub fn term(&self, n: i64) -> Option<&Arc<GradedModule>> {
        let k = n - self.min_index;
        if k < 0 {
            return None;
        }
        self.terms.get(k as usize)
    }

    /// Differential out of index `n`.
    pub fn diff(&self, n: i64) -> Option<&ModuleMap> {
        let k = n - 1 - self.min_index;
        if k < 0 {
            return None;
        }
        self.diffs.get(k as usize)
    }

    pub fn term_dim(&self, n: i64, d: i64) -> usize {
        self.term(n).map_or(0, |t| t.dim(d))
    }

    /// Block of the differential out of index `n` in degree `d` (zero
    /// matrix of the right shape when absent).
    pub fn diff_block(&self, n: i64, d: i64) -> Matrix {
        match self.diff(n) {
            Some(m) => m.block(d),
            None => Matrix::zeros(self.ring.field(), self.term_dim(n - 1, d), self.term_dim(n, d)),
        }
    }

    pub fn sup(&self) -> ExtInt {
        sup_inf(
            self.terms
                .iter()
                .enumerate()
                .map(|(k, t)| (self.min_index + k as i64, !t.is_zero())),
        )
        .0
    }

    pub fn inf(&self) -> ExtInt {
        sup_inf(
            self.terms
                .iter()
                .enumerate()
                .map(|(k, t)| (self.min_index + k as i64, !t.is_zero())),
        )
        .1
    }

    pub fn homology(&self) -> HomologyFamily {
        let f = self.ring.field();
        let mut modules = Vec::with_capacity(self.terms.len());
        let mut quotients = Vec::with_capacity(self.terms.len());
        for (k, t) in self.terms.iter().enumerate() {
            let n = self.min_index + k as i64;
            let w = t.window();
            let mut upper = Vec::with_capacity(w.len());
            let mut lower = Vec::with_capacity(w.len());
            for d in w.degrees() {
                let z = self.diff_block(n, d).kernel_basis().columns();
                let b = EchelonBasis::column_span(&self.diff_block(n + 1, d));
                let b = if b.ambient_dim() == t.dim(d) {
                    b
                } else {
                    EchelonBasis::empty(f, t.dim(d))
                };
                upper.push(z);
                lower.push(b);
            }
            let (h, sq) = t.subquotient_by(Some(&upper), &lower);
            modules.push(if t.is_complete() { h.assume_complete() } else { h });
            quotients.push(sq);
        }
        HomologyFamily {
            min_index: self.min_index,
            modules,
            quotients,
        }
    }

    pub fn is_perfect(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.is_zero() || t.origin().is_some_and(|p| p.relations.is_empty()))
    }

    pub fn invariants(&self) -> Invariants {
        let h = self.homology();
        invariants_from(self.sup(), self.inf(), &h, self.is_perfect())
    }

    /// Common window after reframing every term.
    pub fn reframe(&self, lo: i64, hi: i64) -> Result<ChainComplex> {
        let terms: Vec<Arc<GradedModule>> = self
            .terms
            .iter()
            .map(|t| t.reframe(lo, hi).map(Arc::new))
            .collect::<Result<_>>()?;
        let mut diffs = Vec::new();
        for (k, d) in self.diffs.iter().enumerate() {
            let w = terms[0].window();
            let blocks = w.degrees().map(|deg| d.block(deg)).collect();
            diffs.push(ModuleMap::new_unchecked(
                terms[k + 1].clone(),
                terms[k].clone(),
                blocks,
            )?);
        }
        Ok(ChainComplex {
            ring: self.ring.clone(),
            min_index: self.min_index,
            terms,
            diffs,
        })
    }

    pub fn shift(&self, s: i64) -> ChainComplex {
        let p = self.ring.field().p();
        let diffs = if s.rem_euclid(2) == 1 {
            self.diffs.iter().map(|d| d.scale(p - 1)).collect()
        } else {
            self.diffs.clone()
        };
        ChainComplex {
            ring: self.ring.clone(),
            min_index: self.min_index + s,
            terms: self.terms.clone(),
            diffs,
        }
    }

    /// Internal twist: every graded piece moves up by `t`.
    pub fn raise(&self, t: i64) -> ChainComplex {
        let terms: Vec<Arc<GradedModule>> =
            self.terms.iter().map(|m| Arc::new(m.raise(t))).collect();
        let diffs = self
            .diffs
            .iter()
            .enumerate()
            .map(|(k, d)| {
                ModuleMap::new_unchecked(terms[k + 1].clone(), terms[k].clone(), d.blocks().to_vec())
                    .expect("same shapes")
            })
            .collect();
        ChainComplex {
            ring: self.ring.clone(),
            min_index: self.min_index,
            terms,
            diffs,
        }
    }

    /// Re-indexes onto `[lo, hi]` with zero terms.
    pub fn padded(&self, lo: i64, hi: i64) -> Result<ChainComplex> {
        let w = self.window();
        let ring = self.ring.clone();
        let zero = || Arc::new(GradedModule::zero(ring.clone(), w));
        let mut terms = Vec::new();
        for n in lo..=hi {
            terms.push(self.term(n).cloned().unwrap_or_else(zero));
        }
        let mut diffs = Vec::new();
        for n in (lo + 1)..=hi {
            let k = (n - lo) as usize;
            let blocks = w.degrees().map(|d| self.diff_block(n, d)).collect();
            diffs.push(ModuleMap::new_unchecked(
                terms[k].clone(),
                terms[k - 1].clone(),
                blocks,
            )?);
        }
        Ok(ChainComplex {
            ring: self.ring.clone(),
            min_index: lo,
            terms,
            diffs,
        })
    }

    pub fn direct_sum(parts: &[&ChainComplex]) -> Result<ChainComplex> {
        let Some(first) = parts.first() else {
            return Err(QpdError::arg("direct sum of no complexes"));
        };
        let ring = first.ring.clone();
        let w = Window::join(parts.iter().map(|p| p.window_for_join()));
        let lo = parts.iter().map(|p| p.min_index).min().unwrap();
        let hi = parts.iter().map(|p| p.max_index()).max().unwrap();
        let framed: Vec<ChainComplex> = parts
            .iter()
            .map(|p| p.reframe(w.lo, w.hi).and_then(|c| c.padded(lo, hi)))
            .collect::<Result<_>>()?;
        let mut terms = Vec::new();
        for n in lo..=hi {
            let mods: Vec<&GradedModule> = framed.iter().map(|c| c.term(n).unwrap().as_ref()).collect();
            terms.push(Arc::new(GradedModule::direct_sum(&mods)?));
        }
        let mut diffs = Vec::new();
        for n in (lo + 1)..=hi {
            let k = (n - lo) as usize;
            let blocks = terms[0]
                .window()
                .degrees()
                .map(|d| {
                    let bs: Vec<Matrix> = framed.iter().map(|c| c.diff_block(n, d)).collect();
                    block_diag(ring.field(), &bs)
                })
                .collect();
            diffs.push(ModuleMap::new_unchecked(
                terms[k].clone(),
                terms[k - 1].clone(),
                blocks,
            )?);
        }
        ChainComplex::new(ring, lo, terms, diffs)
    }

    fn window_for_join(&self) -> Window {
        let w = self.window();
        Window {
            complete: self.terms.iter().all(|t| t.is_complete()),
            ..w
        }
    }

    /// Cone of a chain map given by one module map per index (`f[k]` at
    /// index `f_min + k`; missing components are zero). The map is checked
    /// square by square.
    pub fn cone(
        source: &ChainComplex,
        target: &ChainComplex,
        f_min: i64,
        f: &[ModuleMap],
    ) -> Result<ChainComplex> {
        let ring = target.ring.clone();
        let fld = ring.field();
        let w = Window::join([source.window_for_join(), target.window_for_join()]);
        let m = source.reframe(w.lo, w.hi)?;
        let n = target.reframe(w.lo, w.hi)?;
        let comp = |k: i64, d: i64| -> Matrix {
            let idx = k - f_min;
            if idx >= 0 && (idx as usize) < f.len() {
                f[idx as usize].block(d)
            } else {
                Matrix::zeros(fld, n.term_dim(k, d), m.term_dim(k, d))
            }
        };
        let lo_i = (m.min_index + 1).min(n.min_index) - 1;
        let hi_i = (m.max_index() + 1).max(n.max_index()) + 1;
        for k in lo_i..=hi_i {
            for d in w.degrees() {
                let lhs = n.diff_block(k, d).mul(&comp(k, d));
                let rhs = comp(k - 1, d).mul(&m.diff_block(k, d));
                if lhs != rhs {
                    return Err(QpdError::NotChainMap { index: k, degree: d });
                }
            }
        }
        let lo = (m.min_index + 1).min(n.min_index);
        let hi = (m.max_index() + 1).max(n.max_index());
        let mut terms = Vec::new();
        for k in lo..=hi {
            let zero = GradedModule::zero(ring.clone(), w);
            let a = n.term(k).map_or(zero.clone(), |t| (**t).clone());
            let b = m.term(k - 1).map_or(zero, |t| (**t).clone());
            terms.push(Arc::new(GradedModule::direct_sum(&[&a, &b])?));
        }
        let mut diffs = Vec::new();
        for k in (lo + 1)..=hi {
            let idx = (k - lo) as usize;
            let blocks = w
                .degrees()
                .map(|d| {
                    let dn = n.diff_block(k, d);
                    let fk = comp(k - 1, d);
                    let dm = m.diff_block(k - 1, d).neg();
                    let (r1, r2) = (n.term_dim(k - 1, d), m.term_dim(k - 2, d));
                    let (c1, c2) = (n.term_dim(k, d), m.term_dim(k - 1, d));
                    Matrix::from_blocks(fld, &[r1, r2], &[c1, c2], |i, j| match (i, j) {
                        (0, 0) => Some(dn.clone()),
                        (0, 1) => Some(fk.clone()),
                        (1, 1) => Some(dm.clone()),
                        _ => None,
                    })
                })
                .collect();
            diffs.push(ModuleMap::new_unchecked(
                terms[idx].clone(),
                terms[idx - 1].clone(),
                blocks,
            )?);
        }
        ChainComplex::new(ring, lo, terms, diffs)
    }

    /// `K(x; M) = cone(x: M(-deg x) → M)`, iterated over the sequence.
    pub fn koszul(&self, xs: &[Polynomial]) -> Result<ChainComplex> {
        let mut cur = self.clone();
        for x in xs {
            let e = self.ring.degree_of(x)?;
            if e <= 0 {
                return Err(QpdError::arg("Koszul elements must have positive degree"));
            }
            let src = cur.raise(e);
            let w = Window::join([src.window_for_join(), cur.window_for_join()]);
            let src = src.reframe(w.lo, w.hi)?;
            let tgt = cur.reframe(w.lo, w.hi)?;
            let maps: Vec<ModuleMap> = (tgt.min_index..=tgt.max_index())
                .map(|n| {
                    let t = tgt.term(n).unwrap();
                    let s = src.term(n).unwrap();
                    let blocks = w
                        .degrees()
                        .map(|d| {
                            t.poly_action(x, e, d - e)
                                .filter(|a| a.rows() == t.dim(d) && a.cols() == s.dim(d))
                                .unwrap_or_else(|| Matrix::zeros(self.ring.field(), t.dim(d), s.dim(d)))
                        })
                        .collect();
                    ModuleMap::new_unchecked(s.clone(), t.clone(), blocks)
                })
                .collect::<Result<_>>()?;
            cur = ChainComplex::cone(&src, &tgt, tgt.min_index, &maps)?;
        }
        Ok(cur)
    }

    /// Dimension vectors of every term, for comparisons.
    pub fn term_dims(&self) -> Vec<(i64, Vec<usize>)> {
        self.terms
            .iter()
            .enumerate()
            .map(|(k, t)| (self.min_index + k as i64, t.dims().to_vec()))
            .collect()
    }
}

pub fn invariants_from(sup: ExtInt, inf: ExtInt, h: &HomologyFamily, perfect: bool) -> Invariants {
    let (hsup, hinf) = (h.hsup(), h.hinf());
    Invariants {
        sup,
        inf,
        hsup,
        hinf,
        amp: amplitude(hsup, hinf),
        is_perfect: perfect,
    }
}

fn block_diag(f: crate::linalg::PrimeField, blocks: &[Matrix]) -> Matrix {
    let heights: Vec<usize> = blocks.iter().map(|b| b.rows()).collect();
    let widths: Vec<usize> = blocks.iter().map(|b| b.cols()).collect();
    Matrix::from_blocks(f, &heights, &widths, |i, j| (i == j).then(|| blocks[i].clone()))
}

/// Graded dimension vectors of the homology of a complex, by index.
pub fn homology_dims(h: &HomologyFamily) -> Vec<(i64, Vec<usize>)> {
    h.indices()
        .map(|n| (n, h.get(n).unwrap().dims().to_vec()))
        .collect()
}

/// Bounded complex of finitely presented modules. Differentials are
/// polynomial matrices on the generators (rows index target generators) and
/// must send relations into relations.
#[derive(Clone, Debug)]
pub struct PresentedComplex {
    ring: Arc<QuotientRing>,
    min_index: i64,
    terms: Vec<Presentation>,
    diffs: Vec<PolyMatrix>,
}

impl PresentedComplex {
    /// Checks shapes and entry degrees; well-definedness and `d∘d = 0` are
    /// checked degreewise on expansion.
    pub fn new(
        ring: Arc<QuotientRing>,
        min_index: i64,
        terms: Vec<Presentation>,
        diffs: Vec<PolyMatrix>,
    ) -> Result<Self> {
        let shifts: Vec<Vec<i64>> = terms.iter().map(|t| t.shifts.clone()).collect();
        // reuse the free-complex checks, except d∘d = 0 which only has to
        // hold modulo relations
        if !terms.is_empty() && diffs.len() != terms.len() - 1 {
            return Err(QpdError::arg(format!(
                "{} terms need {} differentials, got {}",
                terms.len(),
                terms.len() - 1,
                diffs.len()
            )));
        }
        let mut nd = Vec::with_capacity(diffs.len());
        for (k, d) in diffs.into_iter().enumerate() {
            let probe = FreeComplex::new(
                ring.clone(),
                min_index + k as i64,
                vec![shifts[k].clone(), shifts[k + 1].clone()],
                vec![d],
            )?;
            nd.push(probe.diffs[0].clone());
        }
        for (k, t) in terms.iter().enumerate() {
            for (j, col) in t.relations.iter().enumerate() {
                if col.len() != t.shifts.len() {
                    return Err(QpdError::arg(format!(
                        "term {}: relation {j} has {} entries for {} generators",
                        min_index + k as i64,
                        col.len(),
                        t.shifts.len()
                    )));
                }
                crate::gmod::relation_degree(&ring, &t.shifts, col)?;
            }
        }
        Ok(PresentedComplex {
            ring,
            min_index,
            terms,
            diffs: nd,
        })
    }

    pub fn from_free(c: &FreeComplex) -> Self {
        PresentedComplex {
            ring: c.ring.clone(),
            min_index: c.min_index,
            terms: c
                .terms
                .iter()
                .map(|s| Presentation {
                    shifts: s.clone(),
                    relations: Vec::new(),
                })
                .collect(),
            diffs: c.diffs.clone(),
        }
    }

    /// A module placed in homological degree `index`.
    pub fn module(ring: Arc<QuotientRing>, pres: Presentation, index: i64) -> Result<Self> {
        Self::new(ring, index, vec![pres], Vec::new())
    }

    /// The same generators, relations and differentials over another ring
    /// with the same variables.
    pub fn change_ring(&self, ring: Arc<QuotientRing>) -> Result<PresentedComplex> {
        let (from, to) = (self.ring.poly_ring().clone(), ring.poly_ring().clone());
        if from.names() != to.names() || from.degrees() != to.degrees() {
            return Err(QpdError::arg("base change between rings with different variables"));
        }
        let mv = |f: &Polynomial| ring.normal_form(&transport(&from, &to, f));
        let terms = self
            .terms
            .iter()
            .map(|t| Presentation {
                shifts: t.shifts.clone(),
                relations: t
                    .relations
                    .iter()
                    .map(|c| c.iter().map(mv).collect())
                    .collect(),
            })
            .collect();
        let diffs = self.diffs.iter().map(|d| d.map(mv)).collect();
        PresentedComplex::new(ring.clone(), self.min_index, terms, diffs)
    }

    /// The complex regarded over the ambient polynomial ring: every term
    /// gets the relations `f·e_j` for the defining generators `f`.
    pub fn over_ambient(&self) -> Result<PresentedComplex> {
        let q = Arc::new(self.ring.ambient());
        let qr = q.poly_ring().clone();
        let mut c = self.change_ring(q.clone())?;
        for t in &mut c.terms {
            let n = t.shifts.len();
            for f in self.ring.generators() {
                for j in 0..n {
                    let mut col = vec![qr.zero(); n];
                    col[j] = f.clone();
                    t.relations.push(col);
                }
            }
        }
        Ok(c)
    }

    pub fn ring(&self) -> &Arc<QuotientRing> {
        &self.ring
    }
    pub fn min_index(&self) -> i64 {
        self.min_index
    }
    pub fn max_index(&self) -> i64 {
        self.min_index + self.terms.len() as i64 - 1
    }
    pub fn terms(&self) -> &[Presentation] {
        &self.terms
    }
    pub fn diffs(&self) -> &[PolyMatrix] {
        &self.diffs
    }

    pub fn is_free(&self) -> bool {
        self.terms.iter().all(|t| {
            t.relations
                .iter()
                .all(|c| c.iter().all(|f| self.ring.is_zero_element(f)))
        })
    }

    pub fn to_free(&self) -> Option<FreeComplex> {
        self.is_free().then(|| {
            FreeComplex::new(
                self.ring.clone(),
                self.min_index,
                self.terms.iter().map(|t| t.shifts.clone()).collect(),
                self.diffs.clone(),
            )
        })?
        .ok()
    }

    pub fn min_shift(&self) -> Option<i64> {
        self.terms.iter().flat_map(|t| t.shifts.iter().copied()).min()
    }

    pub fn max_shift(&self) -> Option<i64> {
        self.terms.iter().flat_map(|t| t.shifts.iter().copied()).max()
    }

    pub fn natural_window(&self) -> (i64, i64) {
        let lo = self.min_shift().unwrap_or(0);
        let hi = self.max_shift().unwrap_or(0);
        match self.ring.top_degree() {
            Some(t) => (lo, hi + t),
            None => (lo, hi + self.ring.truncation() as i64),
        }
    }

    /// `Σ^s`, with the usual sign on the differentials.
    pub fn shift(&self, s: i64) -> PresentedComplex {
        let q = self.ring.poly_ring();
        PresentedComplex {
            ring: self.ring.clone(),
            min_index: self.min_index + s,
            terms: self.terms.clone(),
            diffs: if s.rem_euclid(2) == 1 {
                self.diffs.iter().map(|d| d.map(|f| q.neg(f))).collect()
            } else {
                self.diffs.clone()
            },
        }
    }

    /// Termwise direct sum.
    pub fn direct_sum(parts: &[&PresentedComplex]) -> Result<PresentedComplex> {
        let Some(first) = parts.first() else {
            return Err(QpdError::arg("direct sum of no complexes"));
        };
        let ring = first.ring.clone();
        let live: Vec<&&PresentedComplex> = parts.iter().filter(|p| !p.terms.is_empty()).collect();
        if live.is_empty() {
            return PresentedComplex::new(ring, 0, Vec::new(), Vec::new());
        }
        let lo = live.iter().map(|p| p.min_index).min().unwrap();
        let hi = live.iter().map(|p| p.max_index()).max().unwrap();
        let term = |p: &PresentedComplex, n: i64| -> Presentation {
            let k = n - p.min_index;
            if k >= 0 && (k as usize) < p.terms.len() {
                p.terms[k as usize].clone()
            } else {
                Presentation {
                    shifts: Vec::new(),
                    relations: Vec::new(),
                }
            }
        };
        let mut terms = Vec::new();
        for n in lo..=hi {
            let pieces: Vec<Presentation> = live.iter().map(|p| term(p, n)).collect();
            let total: usize = pieces.iter().map(|t| t.shifts.len()).sum();
            let mut shifts = Vec::new();
            let mut relations = Vec::new();
            let mut off = 0;
            for t in &pieces {
                shifts.extend_from_slice(&t.shifts);
                for col in &t.relations {
                    let mut c = vec![ring.poly_ring().zero(); total];
                    c[off..off + col.len()].clone_from_slice(col);
                    relations.push(c);
                }
                off += t.shifts.len();
            }
            terms.push(Presentation { shifts, relations });
        }
        let mut diffs = Vec::new();
        for n in (lo + 1)..=hi {
            let rows: usize = live.iter().map(|p| term(p, n - 1).shifts.len()).sum();
            let cols: usize = live.iter().map(|p| term(p, n).shifts.len()).sum();
            let mut m = PolyMatrix::zeros(&ring, rows, cols);
            let (mut r0, mut c0) = (0, 0);
            for p in &live {
                let (r, c) = (term(p, n - 1).shifts.len(), term(p, n).shifts.len());
                let k = n - 1 - p.min_index;
                if k >= 0 && (k as usize) < p.diffs.len() {
                    let d = &p.diffs[k as usize];
                    for i in 0..r {
                        for j in 0..c {
                            m.set(r0 + i, c0 + j, d.get(i, j).clone());
                        }
                    }
                }
                r0 += r;
                c0 += c;
            }
            diffs.push(m);
        }
        PresentedComplex::new(ring, lo, terms, diffs)
    }

    /// Expansion on `[lo, hi]`; fails if a differential does not respect the
    /// relations or `d∘d ≠ 0` on the window.
    pub fn expand(&self, lo: i64, hi: i64) -> Result<ChainComplex> {
        let ring = self.ring.clone();
        let mut mods = Vec::new();
        let mut sqs = Vec::new();
        for t in &self.terms {
            let (m, sq) = GradedModule::expand_with_quotients(ring.clone(), t, Some((lo, hi)))?;
            mods.push(m);
            sqs.push(sq);
        }
        let w = Window::join(mods.iter().map(|m| m.window()));
        let terms: Vec<Arc<GradedModule>> = mods
            .iter()
            .map(|m| m.reframe(w.lo, w.hi).map(Arc::new))
            .collect::<Result<_>>()?;
        let mut diffs = Vec::new();
        for (k, d) in self.diffs.iter().enumerate() {
            let (src, tgt) = (&self.terms[k + 1].shifts, &self.terms[k].shifts);
            let mut blocks = Vec::with_capacity(w.len());
            for deg in w.degrees() {
                let fb = free_block(&ring, src, tgt, d, deg);
                let idx = (deg - lo) as usize;
                let (ss, ts) = (&sqs[k + 1][idx], &sqs[k][idx]);
                for rel in ss.lower().basis() {
                    if !ts.lower().contains(&fb.mul_vec(rel)) {
                        return Err(QpdError::arg(format!(
                            "differential from index {} does not preserve relations in degree {deg}",
                            self.min_index + k as i64 + 1
                        )));
                    }
                }
                let cols: Vec<Vec<u32>> = ss.lifts().iter().map(|l| ts.coords(&fb.mul_vec(l))).collect();
                blocks.push(Matrix::from_columns(ring.field(), ts.dim(), &cols));
            }
            diffs.push(ModuleMap::new_unchecked(
                terms[k + 1].clone(),
                terms[k].clone(),
                blocks,
            )?);
        }
        ChainComplex::new(ring, self.min_index, terms, diffs)
    }

    pub fn expand_natural(&self) -> Result<ChainComplex> {
        let (lo, hi) = self.natural_window();
        self.expand(lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kxy() -> Arc<QuotientRing> {
        QuotientRing::standard(101, &["x", "y"], &[], 6).unwrap()
    }

    fn art() -> Arc<QuotientRing> {
        QuotientRing::standard(101, &["x", "y"], &["x^2", "y^2"], 6).unwrap()
    }

    fn pm(r: &QuotientRing, rows: &[Vec<&str>], cols: usize) -> PolyMatrix {
        PolyMatrix::parse(r, rows, cols).unwrap()
    }

    fn contractible(r: &Arc<QuotientRing>, g: i64, idx: i64) -> FreeComplex {
        FreeComplex::new(r.clone(), idx, vec![vec![g], vec![g]], vec![pm(r, &[vec!["1"]], 1)])
            .unwrap()
    }

    fn hdims(c: &ChainComplex) -> Vec<(i64, Vec<usize>)> {
        homology_dims(&c.homology())
    }

    /// Homology dims with trailing zero indices dropped, for comparisons
    /// between complexes of different lengths.
    fn hdims_sparse(c: &ChainComplex) -> Vec<(i64, Vec<usize>)> {
        hdims(c).into_iter().filter(|(_, v)| v.iter().any(|&x| x > 0)).collect()
    }

    #[test]
    fn remark_complex_invariants() {
        let r = kxy();
        let c = FreeComplex::new(r.clone(), 0, vec![vec![0], vec![1, 1]], vec![pm(&r, &[vec!["x", "y"]], 2)])
            .unwrap();
        let e = c.expand(0, 7).unwrap();
        let inv = e.invariants();
        assert_eq!(inv.sup, ExtInt::Fin(1));
        assert_eq!(inv.inf, ExtInt::Fin(0));
        assert_eq!(inv.hsup, ExtInt::Fin(1));
        assert_eq!(inv.hinf, ExtInt::Fin(0));
        assert_eq!(inv.amp, ExtInt::Fin(1));
        assert!(inv.is_perfect);
        let h = e.homology();
        assert_eq!(h.get(0).unwrap().dims(), &[1, 0, 0, 0, 0, 0, 0, 0]);
        // kernel of (x y) is R(-2), generated by (y, -x)
        let free2 = GradedModule::free(r.clone(), &[2], 0, 7);
        assert_eq!(h.get(1).unwrap().dims(), free2.dims());
        // the syzygy is a free module: compare action ranks too
        assert!(is_isomorphic(h.get(1).unwrap(), &free2, 8, 1).is_iso());
    }

    use crate::gmod::is_isomorphic;

    #[test]
    fn cone_of_identity_is_exact() {
        let r = art();
        let k = FreeComplex::free_module(r.clone(), vec![0], 0)
            .koszul(&[r.parse("x").unwrap(), r.parse("y").unwrap()])
            .unwrap();
        let id = FreeChainMap {
            source: k.clone(),
            target: k.clone(),
            min_index: k.min_index(),
            maps: k
                .terms()
                .iter()
                .map(|t| {
                    let mut m = PolyMatrix::zeros(&r, t.len(), t.len());
                    for i in 0..t.len() {
                        m.set(i, i, r.poly_ring().constant(1));
                    }
                    m
                })
                .collect(),
        };
        let c = FreeComplex::cone(&id).unwrap();
        let e = c.expand_natural().unwrap();
        assert_eq!(e.invariants().hsup, ExtInt::NegInf);
        assert!(c.minimalize().is_zero());

        // the same with expanded complexes
        let ke = k.expand(0, 6).unwrap();
        let maps: Vec<ModuleMap> = ke.terms().iter().map(|t| ModuleMap::identity(t.clone())).collect();
        let ce = ChainComplex::cone(&ke, &ke, ke.min_index(), &maps).unwrap();
        assert_eq!(ce.homology().hsup(), ExtInt::NegInf);
    }

    #[test]
    fn koszul_on_dual_numbers() {
        let r = QuotientRing::standard(101, &["x"], &["x^2"], 6).unwrap();
        let m = GradedModule::free(r.clone(), &[0], 0, 1);
        let k = ChainComplex::module(m, 0).koszul(&[r.parse("x").unwrap()]).unwrap();
        let h = k.homology();
        assert_eq!(h.get(0).unwrap().dims(), &[1, 0, 0]);
        assert_eq!(h.get(1).unwrap().dims(), &[0, 0, 1]);
        assert_eq!(k.sup(), ExtInt::Fin(1));
    }

    #[test]
    fn koszul_over_polynomial_ring() {
        let r = kxy();
        let x = r.parse("x").unwrap();
        let y = r.parse("y").unwrap();
        let k1 = FreeComplex::free_module(r.clone(), vec![0], 0).koszul(&[x.clone()]).unwrap();
        assert_eq!(k1.ranks(), vec![(0, 1), (1, 1)]);
        let h = k1.expand(0, 6).unwrap().homology();
        assert_eq!(h.get(0).unwrap().dims(), &[1; 7]);
        assert!(h.get(1).unwrap().is_zero());

        let k2 = FreeComplex::free_module(r.clone(), vec![0], 0).koszul(&[x, y]).unwrap();
        assert_eq!(k2.ranks(), vec![(0, 1), (1, 2), (2, 1)]);
        assert!(k2.is_minimal());
        let h = k2.expand(0, 6).unwrap().homology();
        assert_eq!(h.support(), vec![0]);
        assert_eq!(h.get(0).unwrap().dims(), &[1, 0, 0, 0, 0, 0, 0]);
        let m = k2.minimalize();
        assert_eq!(m.ranks(), k2.ranks());
    }

    #[test]
    fn koszul_on_annihilated_module_splits() {
        let r = art();
        let k = GradedModule::expand(
            r.clone(),
            &crate::gmod::Presentation {
                shifts: vec![0],
                relations: vec![vec![r.parse("x").unwrap()], vec![r.parse("y").unwrap()]],
            },
            Some((0, 4)),
        )
        .unwrap();
        let c = ChainComplex::module(k.clone(), 0);
        let kx = c.koszul(&[r.parse("x").unwrap()]).unwrap();
        let h = kx.homology();
        // H(M) ⊕ H(ΣM(-1))
        assert_eq!(h.get(0).unwrap().dims(), &[1, 0, 0, 0, 0, 0]);
        assert_eq!(h.get(1).unwrap().dims(), &[0, 1, 0, 0, 0, 0]);
    }

    #[test]
    fn shift_and_zero_cone() {
        let r = art();
        let m = GradedModule::free(r.clone(), &[0], 0, 2);
        let c = ChainComplex::module(m.clone(), 0);
        let s = c.shift(1);
        assert_eq!(s.invariants().sup, ExtInt::Fin(1));
        assert_eq!(s.homology().get(1).unwrap().dims(), m.dims());
        let z = ChainComplex::module(GradedModule::zero(r.clone(), m.window()), 0);
        let cn = ChainComplex::cone(&z, &c, 0, &[]).unwrap();
        assert_eq!(hdims_sparse(&cn), hdims_sparse(&c));
    }

    #[test]
    fn zero_complex_sentinels() {
        let r = art();
        let z = FreeComplex::zero(r.clone());
        assert_eq!(z.sup(), ExtInt::NegInf);
        assert_eq!(z.inf(), ExtInt::PosInf);
        let c = contractible(&r, 0, 0);
        let inv = c.expand_natural().unwrap().invariants();
        assert_eq!(inv.sup, ExtInt::Fin(1));
        assert_eq!(inv.hsup, ExtInt::NegInf);
        assert_eq!(inv.hinf, ExtInt::PosInf);
        assert_eq!(serde_json::to_string(&inv.hsup).unwrap(), "\"-inf\"");
    }

    #[test]
    fn minimalize_drops_contractible_summand() {
        let r = art();
        let k = FreeComplex::free_module(r.clone(), vec![0], 0)
            .koszul(&[r.parse("x").unwrap(), r.parse("y").unwrap()])
            .unwrap();
        let sum = FreeComplex::direct_sum(&[&k, &contractible(&r, 1, 1)]).unwrap();
        assert!(!sum.is_minimal());
        let m = sum.minimalize();
        assert!(m.is_minimal());
        assert_eq!(m.ranks(), k.ranks());
        assert_eq!(
            hdims(&m.expand(0, 6).unwrap()),
            hdims(&sum.expand(0, 6).unwrap())
        );
    }

    #[test]
    fn construction_errors() {
        let r = kxy();
        let bad = FreeComplex::new(
            r.clone(),
            0,
            vec![vec![0], vec![1], vec![2]],
            vec![pm(&r, &[vec!["x"]], 1), pm(&r, &[vec!["y"]], 1)],
        );
        assert!(matches!(bad, Err(QpdError::NotComplex { index: 2 })));
        let deg = FreeComplex::new(r.clone(), 0, vec![vec![0], vec![2]], vec![pm(&r, &[vec!["x"]], 1)]);
        assert!(matches!(deg, Err(QpdError::Argument(_))));

        let a = FreeComplex::free_module(r.clone(), vec![1], 0).koszul(&[r.parse("x").unwrap()]).unwrap();
        let ae = a.expand(0, 5).unwrap();
        let t0 = ae.term(0).unwrap().clone();
        let two = ModuleMap::identity(t0).scale(2);
        let res = ChainComplex::cone(&ae, &ae, 0, &[two]);
        assert!(matches!(res, Err(QpdError::NotChainMap { index: 1, .. })));
    }

    fn linear_form(r: &QuotientRing, a: u32, b: u32) -> Polynomial {
        let q = r.poly_ring();
        q.add(&q.scale(&q.var(0), a), &q.scale(&q.var(1), b))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn minimalize_preserves_homology(a in 0u32..5, b in 0u32..5, c in 0u32..5, d in 0u32..5,
                                         g in 0i64..3, idx in -1i64..3) {
            let r = art();
            let l1 = linear_form(&r, a, b);
            let l2 = linear_form(&r, c, d);
            let xs: Vec<Polynomial> = [l1, l2].into_iter().filter(|f| !f.is_zero()).collect();
            let k = FreeComplex::free_module(r.clone(), vec![0], 0).koszul(&xs).unwrap();
            let sum = FreeComplex::direct_sum(&[&k, &contractible(&r, g, idx)]).unwrap();
            let m = sum.minimalize();
            prop_assert!(m.is_minimal());
            prop_assert!(m.sup() <= sum.sup());
            prop_assert_eq!(hdims_sparse(&m.expand(-1, 8).unwrap()), hdims_sparse(&sum.expand(-1, 8).unwrap()));
        }

        #[test]
        fn koszul_long_exact_sequence(a in 0u32..5, b in 0u32..5, c in 1u32..5, d in 0u32..5) {
            // M = R/(l) over k[x,y]/(x^2,y^2), x = random linear form
            let r = art();
            let l = linear_form(&r, c, d);
            let x = linear_form(&r, a, b);
            prop_assume!(!x.is_zero());
            let m = GradedModule::expand(
                r.clone(),
                &crate::gmod::Presentation { shifts: vec![0], relations: vec![vec![l]] },
                Some((0, 4)),
            ).unwrap();
            let cm = ChainComplex::module(m.clone(), 0);
            let kx = cm.koszul(&[x.clone()]).unwrap();
            let h = kx.homology();
            let hm = cm.homology();
            // dim H_j(K)_t = dim coker(x: H_j(M)_{t-1} → H_j(M)_t) + dim ker(x: H_{j-1}(M)_{t-1} → H_{j-1}(M)_t)
            for j in 0..=1i64 {
                for t in 0..=4i64 {
                    let hk = h.get(j).map_or(0, |g| g.dim(t));
                    let coker = hm.get(j).map_or(0, |g| {
                        let rk = if t >= 1 { g.poly_action(&x, 1, t - 1).map_or(0, |a| a.rank()) } else { 0 };
                        g.dim(t) - rk
                    });
                    let ker = hm.get(j - 1).map_or(0, |g| {
                        if t >= 1 {
                            let a = g.poly_action(&x, 1, t - 1).unwrap();
                            g.dim(t - 1) - a.rank()
                        } else { 0 }
                    });
                    prop_assert_eq!(hk, coker + ker, "j={} t={}", j, t);
                }
            }
        }

        #[test]
        fn shift_moves_homology(s in -3i64..4) {
            let r = art();
            let k = FreeComplex::free_module(r.clone(), vec![0], 0)
                .koszul(&[r.parse("x").unwrap()]).unwrap();
            let e = k.expand(0, 4).unwrap();
            let h = e.homology();
            let hs = e.shift(s).homology();
            for n in h.indices() {
                prop_assert_eq!(h.get(n).unwrap().dims(), hs.get(n + s).unwrap().dims());
            }
            let fs = k.shift(s).expand(0, 4).unwrap().homology();
            prop_assert_eq!(homology_dims(&fs), homology_dims(&hs));
        }
    }
}
