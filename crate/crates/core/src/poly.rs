//! Multivariate polynomials over `F_p` with weighted monomial orders, plus the
//! polynomial string grammar shared by all input documents.

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{QpdError, Result};
use crate::linalg::PrimeField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MonomialOrder {
    /// Graded (by weighted degree) reverse lexicographic order.
    #[default]
    Degrevlex,
    /// Pure lexicographic order.
    Lex,
}

/// Exponent vector, one entry per ring variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, v: usize) -> Self {
        let mut e = vec![0; nvars];
        e[v] = 1;
        Monomial(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Weighted degree.
    pub fn degree(&self, weights: &[u32]) -> u32 {
        self.0
            .iter()
            .zip(weights)
            .map(|(&e, &w)| e as u32 * w)
            .sum()
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other`; caller guarantees divisibility.
    pub fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Variables occurring with positive exponent.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, _)| i)
    }
}

/// A polynomial with terms sorted strictly decreasing in the ring's order.
/// Coefficients are nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: Vec<(Monomial, u32)>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(Monomial, u32)] {
        &self.terms
    }

    pub fn leading(&self) -> Option<&(Monomial, u32)> {
        self.terms.first()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.0)
    }

    /// `Some(d)` if every term has weighted degree `d`; `None` for
    /// inhomogeneous input. The zero polynomial is homogeneous of every
    /// degree and reports `None` as well; check `is_zero` first.
    pub fn homogeneous_degree(&self, weights: &[u32]) -> Option<u32> {
        let d = self.terms.first()?.0.degree(weights);
        self.terms
            .iter()
            .all(|(m, _)| m.degree(weights) == d)
            .then_some(d)
    }

    pub fn is_homogeneous(&self, weights: &[u32]) -> bool {
        self.is_zero() || self.homogeneous_degree(weights).is_some()
    }

    pub fn coefficient(&self, m: &Monomial) -> u32 {
        self.terms
            .iter()
            .find(|(t, _)| t == m)
            .map_or(0, |(_, c)| *c)
    }

    pub fn constant_term(&self) -> u32 {
        self.coefficient(&Monomial::one(self.nvars))
    }
}

/// The ambient polynomial ring `Q = F_p[x_1..x_n]` with variable names,
/// positive integer degrees and a monomial order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyRing {
    field: PrimeField,
    names: Vec<String>,
    degrees: Vec<u32>,
    order: MonomialOrder,
}

impl PolyRing {
    pub fn new(
        field: PrimeField,
        names: Vec<String>,
        degrees: Vec<u32>,
        order: MonomialOrder,
    ) -> Result<Self> {
        if names.len() != degrees.len() {
            return Err(QpdError::arg(format!(
                "{} variable names but {} degrees",
                names.len(),
                degrees.len()
            )));
        }
        if degrees.iter().any(|&d| d == 0) {
            return Err(QpdError::arg("variable degrees must be positive"));
        }
        for (i, n) in names.iter().enumerate() {
            let ok = n
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok {
                return Err(QpdError::arg(format!("invalid variable name {n:?}")));
            }
            if names[..i].contains(n) {
                return Err(QpdError::arg(format!("duplicate variable name {n:?}")));
            }
        }
        Ok(PolyRing {
            field,
            names,
            degrees,
            order,
        })
    }

    /// Standard-degree ring with the default order.
    pub fn standard(field: PrimeField, names: &[&str]) -> Result<Self> {
        Self::new(
            field,
            names.iter().map(|s| s.to_string()).collect(),
            vec![1; names.len()],
            MonomialOrder::Degrevlex,
        )
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }
    pub fn nvars(&self) -> usize {
        self.names.len()
    }
    pub fn names(&self) -> &[String] {
        &self.names
    }
    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }
    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    /// Same variables and order over another field.
    pub fn with_field(&self, field: PrimeField) -> PolyRing {
        PolyRing {
            field,
            ..self.clone()
        }
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self.order {
            MonomialOrder::Lex => a.0.cmp(&b.0),
            MonomialOrder::Degrevlex => {
                let da = a.degree(&self.degrees);
                let db = b.degree(&self.degrees);
                da.cmp(&db).then_with(|| {
                    for i in (0..a.0.len()).rev() {
                        if a.0[i] != b.0[i] {
                            return b.0[i].cmp(&a.0[i]);
                        }
                    }
                    Ordering::Equal
                })
            }
        }
    }

    pub fn degree(&self, m: &Monomial) -> u32 {
        m.degree(&self.degrees)
    }

    /// Builds a polynomial from arbitrary (possibly repeated, possibly zero)
    /// terms.
    pub fn from_terms(&self, terms: impl IntoIterator<Item = (Monomial, u32)>) -> Polynomial {
        let mut t: Vec<(Monomial, u32)> = terms
            .into_iter()
            .map(|(m, c)| {
                assert_eq!(m.nvars(), self.nvars(), "monomial has wrong variable count");
                (m, c % self.field.p())
            })
            .filter(|(_, c)| *c != 0)
            .collect();
        t.sort_by(|a, b| self.cmp(&b.0, &a.0));
        let mut out: Vec<(Monomial, u32)> = Vec::with_capacity(t.len());
        for (m, c) in t {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc = self.field.add(*lc, c),
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| *c != 0);
        Polynomial {
            nvars: self.nvars(),
            terms: out,
        }
    }

    pub fn zero(&self) -> Polynomial {
        Polynomial::zero(self.nvars())
    }

    pub fn constant(&self, c: i64) -> Polynomial {
        self.from_terms([(Monomial::one(self.nvars()), self.field.from_i64(c))])
    }

    pub fn monomial(&self, m: Monomial, c: u32) -> Polynomial {
        self.from_terms([(m, c)])
    }

    pub fn var(&self, v: usize) -> Polynomial {
        self.monomial(Monomial::var(self.nvars(), v), 1)
    }

    /// `a*f + b*g`, merging sorted term lists.
    pub fn lin_comb(&self, a: u32, f: &Polynomial, b: u32, g: &Polynomial) -> Polynomial {
        let fld = self.field;
        let mut out = Vec::with_capacity(f.terms.len() + g.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < f.terms.len() || j < g.terms.len() {
            let ord = if i == f.terms.len() {
                Ordering::Less
            } else if j == g.terms.len() {
                Ordering::Greater
            } else {
                self.cmp(&f.terms[i].0, &g.terms[j].0)
            };
            match ord {
                Ordering::Greater => {
                    let c = fld.mul(a, f.terms[i].1);
                    if c != 0 {
                        out.push((f.terms[i].0.clone(), c));
                    }
                    i += 1;
                }
                Ordering::Less => {
                    let c = fld.mul(b, g.terms[j].1);
                    if c != 0 {
                        out.push((g.terms[j].0.clone(), c));
                    }
                    j += 1;
                }
                Ordering::Equal => {
                    let c = fld.add(fld.mul(a, f.terms[i].1), fld.mul(b, g.terms[j].1));
                    if c != 0 {
                        out.push((f.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Polynomial {
            nvars: self.nvars(),
            terms: out,
        }
    }

    pub fn add(&self, f: &Polynomial, g: &Polynomial) -> Polynomial {
        self.lin_comb(1, f, 1, g)
    }

    pub fn sub(&self, f: &Polynomial, g: &Polynomial) -> Polynomial {
        self.lin_comb(1, f, self.field.p() - 1, g)
    }

    pub fn scale(&self, f: &Polynomial, c: u32) -> Polynomial {
        let c = c % self.field.p();
        if c == 0 {
            return self.zero();
        }
        Polynomial {
            nvars: f.nvars,
            terms: f
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), self.field.mul(*a, c)))
                .collect(),
        }
    }

    pub fn neg(&self, f: &Polynomial) -> Polynomial {
        self.scale(f, self.field.p() - 1)
    }

    /// `c * m * f`; multiplication by a monomial preserves the order.
    pub fn mul_term(&self, f: &Polynomial, m: &Monomial, c: u32) -> Polynomial {
        let c = c % self.field.p();
        if c == 0 {
            return self.zero();
        }
        Polynomial {
            nvars: f.nvars,
            terms: f
                .terms
                .iter()
                .map(|(t, a)| (t.mul(m), self.field.mul(*a, c)))
                .collect(),
        }
    }

    pub fn mul(&self, f: &Polynomial, g: &Polynomial) -> Polynomial {
        let mut acc = self.zero();
        for (m, c) in &g.terms {
            acc = self.add(&acc, &self.mul_term(f, m, *c));
        }
        acc
    }

    pub fn pow(&self, f: &Polynomial, n: u32) -> Polynomial {
        let mut acc = self.constant(1);
        for _ in 0..n {
            acc = self.mul(&acc, f);
        }
        acc
    }

    pub fn monic(&self, f: &Polynomial) -> Polynomial {
        match f.leading() {
            None => f.clone(),
            Some((_, c)) => self.scale(f, self.field.inv(*c)),
        }
    }

    /// All monomials of weighted degree exactly `d`, in decreasing order.
    pub fn monomials_of_degree(&self, d: u32) -> Vec<Monomial> {
        let n = self.nvars();
        let mut out = Vec::new();
        let mut cur = vec![0u16; n];
        fn rec(
            v: usize,
            rem: u32,
            degs: &[u32],
            cur: &mut Vec<u16>,
            out: &mut Vec<Monomial>,
        ) {
            if v == degs.len() {
                if rem == 0 {
                    out.push(Monomial(cur.clone()));
                }
                return;
            }
            let w = degs[v];
            let mut e = 0u32;
            while e * w <= rem {
                cur[v] = e as u16;
                rec(v + 1, rem - e * w, degs, cur, out);
                e += 1;
            }
            cur[v] = 0;
        }
        rec(0, d, &self.degrees, &mut cur, &mut out);
        out.sort_by(|a, b| self.cmp(b, a));
        out
    }

    pub fn format(&self, f: &Polynomial) -> String {
        if f.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, (m, c)) in f.terms.iter().enumerate() {
            let signed = self.field.centered(*c);
            let (neg, mag) = if signed < 0 {
                (true, (-signed) as u64)
            } else {
                (false, signed as u64)
            };
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let body: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| {
                    if e == 1 {
                        self.names[v].clone()
                    } else {
                        format!("{}^{}", self.names[v], e)
                    }
                })
                .collect();
            if body.is_empty() {
                let _ = write!(s, "{mag}");
            } else {
                if mag != 1 {
                    let _ = write!(s, "{mag}*");
                }
                s.push_str(&body.join("*"));
            }
        }
        s
    }

    pub fn parse(&self, src: &str) -> Result<Polynomial> {
        Parser {
            ring: self,
            src: src.as_bytes(),
            pos: 0,
        }
        .poly()
    }
}

struct Parser<'a> {
    ring: &'a PolyRing,
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(QpdError::parse(start, "expected a number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse::<u64>()
            .map_err(|_| QpdError::parse(start, "number too large"))
    }

    fn ident(&mut self) -> (usize, String) {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        (
            start,
            String::from_utf8_lossy(&self.src[start..self.pos]).into_owned(),
        )
    }

    /// Splits an identifier into declared variable names, preferring the
    /// longest match, so `xy` reads as `x*y` when only `x` and `y` exist.
    fn split_ident(&self, start: usize, word: &str) -> Result<Vec<usize>> {
        if let Some(v) = self.ring.names.iter().position(|n| n == word) {
            return Ok(vec![v]);
        }
        let mut out = Vec::new();
        let mut rest = word;
        let mut off = 0;
        while !rest.is_empty() {
            let best = self
                .ring
                .names
                .iter()
                .enumerate()
                .filter(|(_, n)| rest.starts_with(n.as_str()))
                .max_by_key(|(_, n)| n.len());
            match best {
                Some((v, n)) => {
                    out.push(v);
                    rest = &rest[n.len()..];
                    off += n.len();
                }
                None => {
                    return Err(QpdError::parse(
                        start + off,
                        format!("unknown variable in {word:?}"),
                    ))
                }
            }
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<(Monomial, u64)> {
        let n = self.ring.nvars();
        let mut exps = vec![0u32; n];
        let mut coeff = 1u64;
        let mut seen_any = false;
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            coeff = self.number()?;
            seen_any = true;
        }
        loop {
            let save = self.pos;
            let had_star = if self.peek() == Some(b'*') {
                self.pos += 1;
                true
            } else {
                false
            };
            match self.peek() {
                Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                    let (start, word) = self.ident();
                    let vars = self.split_ident(start, &word)?;
                    let mut e = 1u64;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        e = self.number()?;
                    }
                    let last = *vars.last().unwrap();
                    for &v in &vars[..vars.len() - 1] {
                        exps[v] += 1;
                    }
                    exps[last] = exps[last]
                        .checked_add(u32::try_from(e).unwrap_or(u32::MAX))
                        .filter(|&x| x <= u16::MAX as u32)
                        .ok_or_else(|| QpdError::parse(start, "exponent too large"))?;
                    seen_any = true;
                }
                Some(c) if had_star && c.is_ascii_digit() => {
                    let k = self.number()?;
                    coeff = ((coeff as u128 * k as u128) % self.ring.field.p() as u128) as u64;
                    seen_any = true;
                }
                _ => {
                    if had_star {
                        return Err(QpdError::parse(self.pos, "expected a variable after '*'"));
                    }
                    self.pos = save;
                    break;
                }
            }
        }
        if !seen_any {
            return Err(QpdError::parse(self.pos, "expected a term"));
        }
        for &e in &exps {
            if e > u16::MAX as u32 {
                return Err(QpdError::parse(self.pos, "exponent too large"));
            }
        }
        Ok((Monomial(exps.into_iter().map(|e| e as u16).collect()), coeff))
    }

    fn poly(mut self) -> Result<Polynomial> {
        let p = self.ring.field.p() as u64;
        let mut terms = Vec::new();
        let mut sign_neg = false;
        match self.peek() {
            Some(b'-') => {
                sign_neg = true;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            None => return Err(QpdError::parse(self.pos, "empty polynomial")),
            _ => {}
        }
        loop {
            let (m, c) = self.term()?;
            let c = (c % p) as u32;
            terms.push((m, if sign_neg { self.ring.field.neg(c) } else { c }));
            match self.peek() {
                None => break,
                Some(b'+') => {
                    sign_neg = false;
                    self.pos += 1;
                }
                Some(b'-') => {
                    sign_neg = true;
                    self.pos += 1;
                }
                Some(c) => {
                    return Err(QpdError::parse(
                        self.pos,
                        format!("unexpected character {:?}", c as char),
                    ))
                }
            }
        }
        Ok(self.ring.from_terms(terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> PolyRing {
        PolyRing::standard(PrimeField::new(101).unwrap(), &["x", "y", "z"]).unwrap()
    }

    #[test]
    fn parses_grammar_examples() {
        let r = ring();
        for s in ["x^2", "3*x*y - 2", "x^2*y+y", "-x + 100", "2 x y", "xy^2 - 3"] {
            let f = r.parse(s).unwrap();
            let back = r.parse(&r.format(&f)).unwrap();
            assert_eq!(f, back, "{s}");
        }
        assert_eq!(r.parse("xy").unwrap(), r.parse("x*y").unwrap());
        assert_eq!(r.parse("x - x").unwrap(), r.zero());
        assert_eq!(r.format(&r.parse("3*x*y - 2").unwrap()), "3*x*y - 2");
    }

    #[test]
    fn parse_errors_carry_positions() {
        let r = ring();
        match r.parse("x + w") {
            Err(QpdError::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        match r.parse("x + ") {
            Err(QpdError::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        assert!(r.parse("x ) y").is_err());
        assert!(r.parse("").is_err());
        assert!(r.parse("x*").is_err());
    }

    #[test]
    fn degrevlex_order() {
        let r = ring();
        let m = |s: &str| r.parse(s).unwrap().leading_monomial().unwrap().clone();
        // x > y > z; xz > y^2 fails in degrevlex: y^2 > xz
        assert_eq!(r.cmp(&m("x"), &m("y")), Ordering::Greater);
        assert_eq!(r.cmp(&m("y^2"), &m("x*z")), Ordering::Greater);
        assert_eq!(r.cmp(&m("x^2"), &m("x*y")), Ordering::Greater);
        assert_eq!(r.cmp(&m("z^2"), &m("x")), Ordering::Greater);
    }

    #[test]
    fn weighted_monomials() {
        let f = PrimeField::new(7).unwrap();
        let r = PolyRing::new(
            f,
            vec!["a".into(), "b".into()],
            vec![1, 2],
            MonomialOrder::Degrevlex,
        )
        .unwrap();
        let ms = r.monomials_of_degree(4);
        assert_eq!(ms.len(), 3); // a^4, a^2 b, b^2
        assert!(r.parse("a^2 + b").unwrap().is_homogeneous(r.degrees()));
        assert!(!r.parse("a + b").unwrap().is_homogeneous(r.degrees()));
    }
}
