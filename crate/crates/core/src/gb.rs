//! Normal forms, Buchberger's algorithm and dimension of monomial ideals.

use std::collections::VecDeque;

use crate::error::{QpdError, Result};
use crate::poly::{Monomial, MonomialOrder, PolyRing, Polynomial};

/// Default cap on S-polynomial reductions in [`buchberger`].
pub const DEFAULT_BUDGET: usize = 100_000;

/// A reduced, monic Gröbner basis, sorted by increasing leading monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroebnerBasis {
    nvars: usize,
    order: MonomialOrder,
    generators: Vec<Polynomial>,
}

impl GroebnerBasis {
    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.generators
            .iter()
            .map(|g| g.leading_monomial().unwrap().clone())
            .collect()
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.generators
            .iter()
            .any(|g| g.leading_monomial().unwrap().is_one())
    }

    /// True when `m` is divisible by no leading monomial.
    pub fn is_standard(&self, m: &Monomial) -> bool {
        self.generators
            .iter()
            .all(|g| !g.leading_monomial().unwrap().divides(m))
    }

    fn check(&self, ring: &PolyRing, f: &Polynomial) -> Result<()> {
        if f.nvars() != self.nvars || ring.nvars() != self.nvars {
            return Err(QpdError::arg(format!(
                "variable-count mismatch: polynomial has {}, basis has {}",
                f.nvars(),
                self.nvars
            )));
        }
        if ring.order() != self.order {
            return Err(QpdError::arg("monomial order mismatch"));
        }
        Ok(())
    }
}

/// Fully reduced remainder of `f` modulo the basis.
pub fn normal_form(ring: &PolyRing, f: &Polynomial, g: &GroebnerBasis) -> Result<Polynomial> {
    g.check(ring, f)?;
    Ok(reduce_by(ring, f, &g.generators))
}

fn reduce_by(ring: &PolyRing, f: &Polynomial, divisors: &[Polynomial]) -> Polynomial {
    let fld = ring.field();
    let mut p = f.clone();
    let mut rem: Vec<(Monomial, u32)> = Vec::new();
    while let Some((lm, lc)) = p.leading().cloned() {
        let div = divisors
            .iter()
            .find(|g| g.leading_monomial().is_some_and(|m| m.divides(&lm)));
        match div {
            Some(g) => {
                let (gm, gc) = g.leading().unwrap();
                let q = lm.div(gm);
                let c = fld.mul(lc, fld.inv(*gc));
                p = ring.sub(&p, &ring.mul_term(g, &q, c));
            }
            None => {
                rem.push((lm, lc));
                p = ring.from_terms(p.terms()[1..].iter().cloned());
            }
        }
    }
    ring.from_terms(rem)
}

fn s_polynomial(ring: &PolyRing, f: &Polynomial, g: &Polynomial) -> Polynomial {
    let fld = ring.field();
    let (fm, fc) = f.leading().unwrap();
    let (gm, gc) = g.leading().unwrap();
    let l = fm.lcm(gm);
    let a = ring.mul_term(f, &l.div(fm), fld.inv(*fc));
    let b = ring.mul_term(g, &l.div(gm), fld.inv(*gc));
    ring.sub(&a, &b)
}

pub fn buchberger(ring: &PolyRing, gens: &[Polynomial]) -> Result<GroebnerBasis> {
    buchberger_with_budget(ring, gens, DEFAULT_BUDGET)
}

/// Buchberger's algorithm with the coprime-leading-term criterion. Aborts
/// with `ResourceExceeded` after `budget` S-polynomial reductions.
pub fn buchberger_with_budget(
    ring: &PolyRing,
    gens: &[Polynomial],
    budget: usize,
) -> Result<GroebnerBasis> {
    for g in gens {
        if g.nvars() != ring.nvars() {
            return Err(QpdError::arg("generator has wrong variable count"));
        }
    }
    let mut basis: Vec<Polynomial> = gens
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| ring.monic(g))
        .collect();
    let mut pairs: VecDeque<(usize, usize)> = VecDeque::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push_back((i, j));
        }
    }
    let mut steps = 0usize;
    while let Some((i, j)) = pairs.pop_front() {
        let (mi, mj) = (
            basis[i].leading_monomial().unwrap(),
            basis[j].leading_monomial().unwrap(),
        );
        if mi.coprime(mj) {
            continue;
        }
        steps += 1;
        if steps > budget {
            return Err(QpdError::budget("Buchberger S-polynomial reductions", steps));
        }
        let s = s_polynomial(ring, &basis[i], &basis[j]);
        let r = reduce_by(ring, &s, &basis);
        if !r.is_zero() {
            let k = basis.len();
            basis.push(ring.monic(&r));
            for i in 0..k {
                pairs.push_back((i, k));
            }
        }
    }
    Ok(GroebnerBasis {
        nvars: ring.nvars(),
        order: ring.order(),
        generators: interreduce(ring, basis),
    })
}

fn interreduce(ring: &PolyRing, mut basis: Vec<Polynomial>) -> Vec<Polynomial> {
    basis.sort_by(|a, b| ring.cmp(a.leading_monomial().unwrap(), b.leading_monomial().unwrap()));
    let mut minimal: Vec<Polynomial> = Vec::new();
    for g in basis {
        let lm = g.leading_monomial().unwrap();
        if !minimal
            .iter()
            .any(|h| h.leading_monomial().unwrap().divides(lm))
        {
            minimal.push(g);
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let others: Vec<Polynomial> = minimal
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, g)| g.clone())
            .collect();
        let g = &minimal[k];
        let head = ring.from_terms([g.leading().unwrap().clone()]);
        let tail = ring.sub(g, &head);
        let red = reduce_by(ring, &tail, &others);
        out.push(ring.monic(&ring.add(&head, &red)));
    }
    out
}

/// Krull dimension of `Q / ideal(g)`: the largest set of variables such that
/// no leading monomial is supported inside it.
pub fn monomial_dim(g: &GroebnerBasis) -> usize {
    let lms = g.leading_monomials();
    let n = g.nvars();
    let supports: Vec<u64> = lms
        .iter()
        .map(|m| m.support().fold(0u64, |acc, v| acc | (1 << v)))
        .collect();
    if supports.contains(&0) {
        // unit ideal; callers reject it earlier, report 0 for safety
        return 0;
    }
    let mut best = 0;
    // search subsets from largest down; stop at the first independent one
    for size in (0..=n).rev() {
        if size <= best {
            break;
        }
        if subsets_of_size(n, size).any(|s| supports.iter().all(|&m| m & !s != 0)) {
            best = size;
            break;
        }
    }
    best
}

fn subsets_of_size(n: usize, k: usize) -> impl Iterator<Item = u64> {
    (0u64..(1u64 << n)).filter(move |s| s.count_ones() as usize == k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::PrimeField;
    use proptest::prelude::*;

    fn r2() -> PolyRing {
        PolyRing::standard(PrimeField::new(101).unwrap(), &["x", "y"]).unwrap()
    }

    fn gb(r: &PolyRing, gens: &[&str]) -> GroebnerBasis {
        let g: Vec<Polynomial> = gens.iter().map(|s| r.parse(s).unwrap()).collect();
        buchberger(r, &g).unwrap()
    }

    #[test]
    fn normal_form_examples() {
        let r = r2();
        let g = gb(&r, &["x^2", "x*y", "y^2"]);
        assert!(normal_form(&r, &r.parse("x^2").unwrap(), &g).unwrap().is_zero());
        let g = gb(&r, &["x^2", "y^2"]);
        let f = r.parse("x*y + y").unwrap();
        assert_eq!(normal_form(&r, &f, &g).unwrap(), f);
        let f = r.parse("x^2*y + y").unwrap();
        assert_eq!(normal_form(&r, &f, &g).unwrap(), r.parse("y").unwrap());

        let r3 = PolyRing::standard(PrimeField::new(101).unwrap(), &["x", "y", "z"]).unwrap();
        assert!(normal_form(&r3, &r3.parse("x").unwrap(), &g).is_err());
    }

    #[test]
    fn buchberger_examples() {
        let r = r2();
        let g = gb(&r, &["x^2", "y^2"]);
        let want: Vec<Polynomial> = vec![r.parse("y^2").unwrap(), r.parse("x^2").unwrap()];
        assert_eq!(g.generators(), &want[..]);
        assert_eq!(gb(&r, &["x"]).generators(), &[r.parse("x").unwrap()]);
        let g = gb(&r, &["x+y", "y"]);
        assert_eq!(g.generators(), &[r.parse("y").unwrap(), r.parse("x").unwrap()]);
    }

    #[test]
    fn buchberger_budget_is_reported() {
        let r = r2();
        let g: Vec<Polynomial> = ["x^2 - y", "x*y - 1", "y^3 + x"]
            .iter()
            .map(|s| r.parse(s).unwrap())
            .collect();
        match buchberger_with_budget(&r, &g, 1) {
            Err(QpdError::ResourceExceeded { step, .. }) => assert_eq!(step, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn monomial_dim_examples() {
        let r = r2();
        assert_eq!(monomial_dim(&gb(&r, &["x^2", "y^2"])), 0);
        assert_eq!(monomial_dim(&gb(&r, &["x*y"])), 1);
        assert_eq!(monomial_dim(&gb(&r, &[])), 2);
    }

    fn rand_poly(r: &PolyRing, terms: &[(u16, u16, u32)]) -> Polynomial {
        r.from_terms(terms.iter().map(|&(a, b, c)| (Monomial(vec![a, b]), c)))
    }

    fn brute_force_dim(lms: &[Monomial], n: usize) -> usize {
        let mut best = 0;
        for s in 0u64..(1 << n) {
            let indep = lms
                .iter()
                .all(|m| m.support().any(|v| s & (1 << v) == 0));
            if indep {
                best = best.max(s.count_ones() as usize);
            }
        }
        best
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn nf_depends_only_on_coset(
            gens in proptest::collection::vec(proptest::collection::vec((0u16..3, 0u16..3, 1u32..101), 1..3), 1..3),
            f in proptest::collection::vec((0u16..4, 0u16..4, 0u32..101), 0..5),
            h in proptest::collection::vec((0u16..2, 0u16..2, 0u32..101), 0..3),
        ) {
            let r = r2();
            let gs: Vec<Polynomial> = gens.iter().map(|t| rand_poly(&r, t)).collect();
            let g = buchberger(&r, &gs).unwrap();
            let f = rand_poly(&r, &f);
            let h = rand_poly(&r, &h);
            let f2 = r.add(&f, &r.mul(&gs[0], &h));
            let a = normal_form(&r, &f, &g).unwrap();
            let b = normal_form(&r, &f2, &g).unwrap();
            prop_assert_eq!(&a, &b);
            for (m, _) in a.terms() {
                prop_assert!(g.is_standard(m));
            }
            for gi in &gs {
                prop_assert!(normal_form(&r, gi, &g).unwrap().is_zero());
            }
        }

        #[test]
        fn buchberger_is_canonical(
            gens in proptest::collection::vec(proptest::collection::vec((0u16..3, 0u16..3, 1u32..101), 1..3), 1..3),
            extra in proptest::collection::vec((0u16..2, 0u16..2, 1u32..101), 1..3),
        ) {
            let r = r2();
            let gs: Vec<Polynomial> = gens.iter().map(|t| rand_poly(&r, t)).collect();
            let g1 = buchberger(&r, &gs).unwrap();
            let mut gs2 = gs.clone();
            gs2.push(r.mul(&gs[0], &rand_poly(&r, &extra)));
            gs2.reverse();
            let g2 = buchberger(&r, &gs2).unwrap();
            prop_assert_eq!(g1, g2);
        }

        #[test]
        fn monomial_dim_matches_brute_force(
            mons in proptest::collection::vec(proptest::collection::vec(0u16..3, 4), 0..5)
        ) {
            let r = PolyRing::standard(PrimeField::new(2).unwrap(), &["a", "b", "c", "d"]).unwrap();
            let gens: Vec<Polynomial> = mons.iter()
                .filter(|e| e.iter().any(|&x| x > 0))
                .map(|e| r.monomial(Monomial(e.clone()), 1))
                .collect();
            let g = buchberger(&r, &gens).unwrap();
            let lms: Vec<Monomial> = gens.iter().map(|p| p.leading_monomial().unwrap().clone()).collect();
            prop_assert_eq!(monomial_dim(&g), brute_force_dim(&lms, 4));
        }
    }
}
