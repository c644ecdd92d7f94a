//! Graded quotient algebras `R = Q/I` with homogeneous `I`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::{QpdError, Result};
use crate::gb::{self, GroebnerBasis};
use crate::linalg::{Matrix, PrimeField};
use crate::poly::{Monomial, PolyRing, Polynomial};

/// Standard monomials of one degree together with the normal-form
/// coordinates of every monomial of that degree.
#[derive(Debug)]
pub struct DegreeData {
    pub degree: i64,
    pub basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    nf: HashMap<Monomial, Vec<u32>>,
}

impl DegreeData {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Normal-form coordinates of a monomial of this degree.
    pub fn monomial_coords(&self, m: &Monomial) -> &[u32] {
        &self.nf[m]
    }
}

pub struct QuotientRing {
    q: PolyRing,
    gb: GroebnerBasis,
    generators: Vec<Polynomial>,
    truncation: u32,
    krull_dim: usize,
    top_degree: Option<i64>,
    degrees: RwLock<BTreeMap<i64, Arc<DegreeData>>>,
    actions: RwLock<HashMap<(usize, i64), Arc<Matrix>>>,
}

impl fmt::Debug for QuotientRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators.iter().map(|g| self.q.format(g)).collect();
        write!(
            f,
            "F_{}[{}]/({})",
            self.q.field().p(),
            self.q.names().join(","),
            gens.join(", ")
        )
    }
}

impl PartialEq for QuotientRing {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.gb == other.gb
    }
}
impl Eq for QuotientRing {}

impl QuotientRing {
    /// Builds `Q / (gens)`. Generators must be homogeneous; zero generators
    /// are dropped; a unit in the ideal is rejected.
    pub fn new(q: PolyRing, gens: Vec<Polynomial>, truncation: u32) -> Result<Self> {
        let mut kept = Vec::new();
        for (i, g) in gens.into_iter().enumerate() {
            if g.nvars() != q.nvars() {
                return Err(QpdError::arg(format!("generator {i} has wrong variable count")));
            }
            if g.is_zero() {
                continue;
            }
            if !g.is_homogeneous(q.degrees()) {
                return Err(QpdError::arg(format!(
                    "generator {i} ({}) is not homogeneous",
                    q.format(&g)
                )));
            }
            if g.homogeneous_degree(q.degrees()) == Some(0) {
                return Err(QpdError::ZeroRing);
            }
            kept.push(g);
        }
        let gb = gb::buchberger(&q, &kept)?;
        if gb.is_unit_ideal() {
            return Err(QpdError::ZeroRing);
        }
        let krull_dim = gb::monomial_dim(&gb);
        let mut ring = QuotientRing {
            q,
            gb,
            generators: kept,
            truncation,
            krull_dim,
            top_degree: None,
            degrees: RwLock::new(BTreeMap::new()),
            actions: RwLock::new(HashMap::new()),
        };
        if krull_dim == 0 {
            ring.top_degree = Some(ring.find_top_degree());
        }
        let upto = ring.truncation as i64;
        let upto = upto.max(ring.top_degree.unwrap_or(0));
        for d in 0..=upto {
            ring.degree_data(d);
        }
        Ok(ring)
    }

    /// Parses generator strings against `q`.
    pub fn from_strings(q: PolyRing, gens: &[&str], truncation: u32) -> Result<Self> {
        let parsed = gens
            .iter()
            .map(|s| q.parse(s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(q, parsed, truncation)
    }

    /// `F_p[vars]/(gens)` with standard grading and degrevlex order.
    pub fn standard(p: u32, vars: &[&str], gens: &[&str], truncation: u32) -> Result<Arc<Self>> {
        let q = PolyRing::standard(PrimeField::new(p)?, vars)?;
        Ok(Arc::new(Self::from_strings(q, gens, truncation)?))
    }

    fn find_top_degree(&self) -> i64 {
        // an artinian quotient has a pure power of each variable among the
        // leading monomials, which bounds the top degree
        let lms = self.gb.leading_monomials();
        let mut bound = 0i64;
        for v in 0..self.nvars() {
            let k = lms
                .iter()
                .filter(|m| m.support().all(|u| u == v))
                .map(|m| m.0[v])
                .min()
                .expect("artinian quotient has a pure power of every variable");
            bound += (k as i64 - 1) * self.q.degrees()[v] as i64;
        }
        (0..=bound)
            .rev()
            .find(|&d| self.dim(d) > 0)
            .unwrap_or(0)
    }

    pub fn poly_ring(&self) -> &PolyRing {
        &self.q
    }
    pub fn field(&self) -> PrimeField {
        self.q.field()
    }
    pub fn nvars(&self) -> usize {
        self.q.nvars()
    }
    pub fn var_degree(&self, v: usize) -> i64 {
        self.q.degrees()[v] as i64
    }
    pub fn max_var_degree(&self) -> i64 {
        self.q.degrees().iter().copied().max().unwrap_or(1) as i64
    }
    pub fn groebner_basis(&self) -> &GroebnerBasis {
        &self.gb
    }
    /// Ideal generators as given (zero ones dropped).
    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }
    pub fn truncation(&self) -> u32 {
        self.truncation
    }
    pub fn krull_dim(&self) -> usize {
        self.krull_dim
    }
    pub fn is_artinian(&self) -> bool {
        self.krull_dim == 0
    }
    /// Largest degree with `R_d != 0`, for artinian rings.
    pub fn top_degree(&self) -> Option<i64> {
        self.top_degree
    }

    pub fn total_dim(&self) -> Option<usize> {
        self.top_degree
            .map(|t| (0..=t).map(|d| self.dim(d)).sum())
    }

    /// How far above a generator degree syzygies are looked for. Exact for
    /// artinian rings (nothing lives above the top degree); a heuristic
    /// otherwise.
    pub fn syzygy_margin(&self, entry_degree: i64) -> i64 {
        match self.top_degree {
            Some(t) => t.max(1),
            None => {
                let gen_deg = self
                    .generators
                    .iter()
                    .filter_map(|g| g.homogeneous_degree(self.q.degrees()))
                    .max()
                    .unwrap_or(0) as i64;
                self.nvars() as i64 * self.max_var_degree().max(entry_degree).max(gen_deg) + 2
            }
        }
    }

    pub fn degree_data(&self, d: i64) -> Arc<DegreeData> {
        if let Some(dd) = self.degrees.read().unwrap().get(&d) {
            return dd.clone();
        }
        let dd = Arc::new(self.compute_degree(d));
        self.degrees.write().unwrap().insert(d, dd.clone());
        dd
    }

    fn compute_degree(&self, d: i64) -> DegreeData {
        let monos = if d < 0 {
            Vec::new()
        } else {
            self.q.monomials_of_degree(d as u32)
        };
        let basis: Vec<Monomial> = monos
            .iter()
            .filter(|m| self.gb.is_standard(m))
            .cloned()
            .collect();
        let index: HashMap<Monomial, usize> = basis
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let mut nf = HashMap::with_capacity(monos.len());
        for m in monos {
            let mut v = vec![0u32; basis.len()];
            if let Some(&i) = index.get(&m) {
                v[i] = 1;
            } else {
                let f = self.q.monomial(m.clone(), 1);
                let r = gb::normal_form(&self.q, &f, &self.gb).expect("same ring");
                for (t, c) in r.terms() {
                    v[index[t]] = *c;
                }
            }
            nf.insert(m, v);
        }
        DegreeData {
            degree: d,
            basis,
            index,
            nf,
        }
    }

    pub fn dim(&self, d: i64) -> usize {
        if d < 0 {
            return 0;
        }
        if let Some(t) = self.top_degree {
            if d > t {
                return 0;
            }
        }
        self.degree_data(d).dim()
    }

    /// Degree of a nonzero homogeneous polynomial.
    pub fn degree_of(&self, f: &Polynomial) -> Result<i64> {
        if f.is_zero() {
            return Err(QpdError::arg("zero polynomial has no degree"));
        }
        f.homogeneous_degree(self.q.degrees())
            .map(|d| d as i64)
            .ok_or_else(|| QpdError::arg(format!("{} is not homogeneous", self.q.format(f))))
    }

    pub fn normal_form(&self, f: &Polynomial) -> Polynomial {
        gb::normal_form(&self.q, f, &self.gb).expect("polynomial over this ring")
    }

    pub fn is_zero_element(&self, f: &Polynomial) -> bool {
        self.normal_form(f).is_zero()
    }

    /// Coordinates of a homogeneous polynomial of degree `d` in the standard
    /// monomial basis of `R_d`.
    pub fn coords(&self, f: &Polynomial, d: i64) -> Result<Vec<u32>> {
        let dd = self.degree_data(d);
        let mut v = vec![0u32; dd.dim()];
        let fld = self.field();
        for (m, c) in f.terms() {
            if self.q.degree(m) as i64 != d {
                return Err(QpdError::arg(format!(
                    "term of degree {} in a polynomial expected of degree {d}",
                    self.q.degree(m)
                )));
            }
            for (x, &y) in v.iter_mut().zip(dd.monomial_coords(m)) {
                if y != 0 {
                    *x = fld.add(*x, fld.mul(y, *c));
                }
            }
        }
        Ok(v)
    }

    pub fn poly_from_coords(&self, d: i64, coords: &[u32]) -> Polynomial {
        let dd = self.degree_data(d);
        self.q.from_terms(
            dd.basis
                .iter()
                .zip(coords)
                .filter(|(_, &c)| c != 0)
                .map(|(m, &c)| (m.clone(), c)),
        )
    }

    /// Coordinates of `u * f` for a standard monomial `u`.
    pub fn mul_monomial_coords(&self, u: &Monomial, f: &Polynomial, f_deg: i64) -> Vec<u32> {
        let d = self.q.degree(u) as i64 + f_deg;
        let dd = self.degree_data(d);
        let fld = self.field();
        let mut v = vec![0u32; dd.dim()];
        for (t, c) in f.terms() {
            let m = t.mul(u);
            for (x, &y) in v.iter_mut().zip(dd.monomial_coords(&m)) {
                if y != 0 {
                    *x = fld.add(*x, fld.mul(y, *c));
                }
            }
        }
        v
    }

    /// Matrix of multiplication by `f` from `R_d` to `R_{d+deg f}`.
    pub fn mul_matrix(&self, f: &Polynomial, f_deg: i64, d: i64) -> Matrix {
        let src = self.degree_data(d);
        let tgt_dim = self.dim(d + f_deg);
        let mut m = Matrix::zeros(self.field(), tgt_dim, src.dim());
        if tgt_dim == 0 || f.is_zero() {
            return m;
        }
        for (j, u) in src.basis.iter().enumerate() {
            let col = self.mul_monomial_coords(u, f, f_deg);
            for (i, &c) in col.iter().enumerate() {
                m.set(i, j, c);
            }
        }
        m
    }

    /// Multiplication by the variable `v` from degree `d`.
    pub fn var_action(&self, v: usize, d: i64) -> Arc<Matrix> {
        if let Some(m) = self.actions.read().unwrap().get(&(v, d)) {
            return m.clone();
        }
        let x = self.q.var(v);
        let m = Arc::new(self.mul_matrix(&x, self.var_degree(v), d));
        self.actions.write().unwrap().insert((v, d), m.clone());
        m
    }

    pub fn parse(&self, s: &str) -> Result<Polynomial> {
        self.q.parse(s)
    }

    pub fn format(&self, f: &Polynomial) -> String {
        self.q.format(f)
    }

    /// `R / (extra)`, built on the same ambient ring.
    pub fn quotient_by(&self, extra: &[Polynomial]) -> Result<QuotientRing> {
        let mut gens = self.generators.clone();
        gens.extend(extra.iter().cloned());
        QuotientRing::new(self.q.clone(), gens, self.truncation)
    }

    /// The ambient polynomial ring `Q`, viewed as a quotient by zero.
    pub fn ambient(&self) -> QuotientRing {
        QuotientRing::new(self.q.clone(), Vec::new(), self.truncation).expect("zero ideal")
    }

    /// The same presentation over another prime field, transporting
    /// coefficients through symmetric representatives.
    pub fn with_field(&self, field: PrimeField) -> Result<QuotientRing> {
        let q = self.q.with_field(field);
        let gens = self
            .generators
            .iter()
            .map(|g| transport(&self.q, &q, g))
            .collect();
        QuotientRing::new(q, gens, self.truncation)
    }
}

/// Moves a polynomial between rings with the same variables, through the
/// symmetric representative of each coefficient.
pub fn transport(from: &PolyRing, to: &PolyRing, f: &Polynomial) -> Polynomial {
    let src = from.field();
    let dst = to.field();
    to.from_terms(
        f.terms()
            .iter()
            .map(|(m, c)| (m.clone(), dst.from_i64(src.centered(*c)))),
    )
}

impl std::hash::Hash for QuotientRing {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.q.hash(state);
        self.gb.hash(state);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_ring_examples() {
        let r = QuotientRing::standard(101, &["x", "y"], &["x^2", "y^2"], 2).unwrap();
        assert!(r.is_artinian());
        let dims: Vec<usize> = (0..=3).map(|d| r.dim(d)).collect();
        assert_eq!(dims, vec![1, 2, 1, 0]);
        assert_eq!(r.top_degree(), Some(2));
        let b1: Vec<String> = r
            .degree_data(1)
            .basis
            .iter()
            .map(|m| r.format(&r.poly_ring().monomial(m.clone(), 1)))
            .collect();
        assert_eq!(b1, vec!["x", "y"]);

        let r = QuotientRing::standard(101, &["x"], &[], 3).unwrap();
        assert!(!r.is_artinian());
        assert_eq!(r.krull_dim(), 1);
        assert_eq!((0..=3).map(|d| r.dim(d)).collect::<Vec<_>>(), vec![1, 1, 1, 1]);

        assert_eq!(
            QuotientRing::standard(101, &["x"], &["1"], 3).unwrap_err(),
            QpdError::ZeroRing
        );
        assert_eq!(
            QuotientRing::standard(101, &["x", "y"], &["x^2 - 1 + y^2"], 3).unwrap_err(),
            QpdError::Argument("generator 0 (x^2 + y^2 - 1) is not homogeneous".into())
        );
    }

    #[test]
    fn multiplication_matrices() {
        let r = QuotientRing::standard(101, &["x", "y"], &["x^2", "y^2"], 2).unwrap();
        let x = r.parse("x").unwrap();
        let m = r.mul_matrix(&x, 1, 1);
        // x*x = 0, x*y = xy
        assert_eq!(m.rows(), 1);
        assert_eq!(m.column(0), vec![0]);
        assert_eq!(m.column(1), vec![1]);
    }

    #[test]
    fn field_transport() {
        let r = QuotientRing::standard(101, &["x", "y"], &["x^2 - y^2", "x*y"], 4).unwrap();
        let r2 = r.with_field(PrimeField::new(2).unwrap()).unwrap();
        assert_eq!(r2.total_dim(), r.total_dim());
    }
}
