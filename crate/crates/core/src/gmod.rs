//! Finitely generated graded modules in expanded form: one vector space per
//! internal degree on a window `[lo, hi]`, with the action of every variable.
//!
//! A module is always zero below `lo`. When `complete` is set it is also zero
//! above `hi`; otherwise degrees above `hi` are unknown and every derived
//! quantity is only valid on the window.

use std::sync::Arc;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{QpdError, Result};
use crate::linalg::{EchelonBasis, Matrix, PrimeField, Subquotient};
use crate::poly::{Monomial, Polynomial};
use crate::ring::QuotientRing;

/// A presentation `⊕ R(-shift_i) / (relations)`. Each relation is a column
/// with one entry per generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub shifts: Vec<i64>,
    pub relations: Vec<Vec<Polynomial>>,
}

/// A degree window together with the completeness flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
    pub complete: bool,
}

impl Window {
    pub fn new(lo: i64, hi: i64, complete: bool) -> Self {
        Window { lo, hi, complete }
    }

    /// Common window of several modules: the union where every input is
    /// complete, otherwise capped by the lowest incomplete top.
    pub fn join(ws: impl IntoIterator<Item = Window>) -> Window {
        let mut lo = i64::MAX;
        let mut hi_complete = i64::MIN;
        let mut hi_incomplete: Option<i64> = None;
        let mut any = false;
        for w in ws {
            any = true;
            lo = lo.min(w.lo);
            if w.complete {
                hi_complete = hi_complete.max(w.hi);
            } else {
                hi_incomplete = Some(hi_incomplete.map_or(w.hi, |h: i64| h.min(w.hi)));
            }
        }
        if !any {
            return Window::new(0, -1, true);
        }
        match hi_incomplete {
            Some(h) => Window::new(lo, h.max(lo - 1), false),
            None => Window::new(lo, hi_complete.max(lo - 1), true),
        }
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1).max(0) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi
    }

    pub fn contains(&self, d: i64) -> bool {
        d >= self.lo && d <= self.hi
    }

    /// Whether data in degree `d` is known (inside, below, or above a
    /// complete window).
    pub fn knows(&self, d: i64) -> bool {
        d <= self.hi || self.complete
    }

    pub fn shifted(&self, t: i64) -> Window {
        Window::new(self.lo + t, self.hi + t, self.complete)
    }
}

#[derive(Clone, Debug)]
pub struct GradedModule {
    ring: Arc<QuotientRing>,
    window: Window,
    dims: Vec<usize>,
    /// `actions[v][d - lo]`: multiplication by variable `v` from degree `d`
    /// to `d + deg v`; zero rows when the target lies above the window.
    actions: Vec<Vec<Matrix>>,
    origin: Option<Presentation>,
}

impl PartialEq for GradedModule {
    fn eq(&self, other: &Self) -> bool {
        *self.ring == *other.ring
            && self.window == other.window
            && self.dims == other.dims
            && self.actions == other.actions
    }
}

impl GradedModule {
    /// Assembles a module from raw data and checks the module axioms.
    pub fn from_parts(
        ring: Arc<QuotientRing>,
        window: Window,
        dims: Vec<usize>,
        actions: Vec<Vec<Matrix>>,
    ) -> Result<Self> {
        let m = Self::from_parts_unchecked(ring, window, dims, actions);
        m.validate()?;
        Ok(m)
    }

    fn from_parts_unchecked(
        ring: Arc<QuotientRing>,
        window: Window,
        dims: Vec<usize>,
        actions: Vec<Vec<Matrix>>,
    ) -> Self {
        debug_assert_eq!(dims.len(), window.len());
        GradedModule {
            ring,
            window,
            dims,
            actions,
            origin: None,
        }
    }

    pub fn zero(ring: Arc<QuotientRing>, window: Window) -> Self {
        let n = ring.nvars();
        let len = window.len();
        let f = ring.field();
        GradedModule {
            ring,
            window: Window { complete: true, ..window },
            dims: vec![0; len],
            actions: vec![vec![Matrix::zeros(f, 0, 0); len]; n],
            origin: None,
        }
    }

    /// Free module `⊕ R(-g)` on the window. Over an artinian ring the module
    /// is complete as soon as the window reaches `max g + top degree`.
    pub fn free(ring: Arc<QuotientRing>, shifts: &[i64], lo: i64, hi: i64) -> Self {
        let f = ring.field();
        let nv = ring.nvars();
        let window = Window::new(lo, hi.max(lo - 1), false);
        let mut dims = Vec::with_capacity(window.len());
        for d in window.degrees() {
            dims.push(shifts.iter().map(|&g| ring.dim(d - g)).sum());
        }
        let mut actions = vec![Vec::with_capacity(window.len()); nv];
        for (v, act) in actions.iter_mut().enumerate() {
            let e = ring.var_degree(v);
            for (k, d) in window.degrees().enumerate() {
                let rows = if d + e <= hi { dims[(k as i64 + e) as usize] } else { 0 };
                let mut m = Matrix::zeros(f, rows, dims[k]);
                if rows > 0 {
                    let (mut r0, mut c0) = (0, 0);
                    for &g in shifts {
                        let a = ring.var_action(v, d - g);
                        for i in 0..a.rows() {
                            for j in 0..a.cols() {
                                m.set(r0 + i, c0 + j, a.get(i, j));
                            }
                        }
                        r0 += ring.dim(d + e - g);
                        c0 += ring.dim(d - g);
                    }
                }
                act.push(m);
            }
        }
        let complete = match ring.top_degree() {
            Some(t) => shifts.iter().all(|&g| g + t <= hi),
            None => shifts.is_empty(),
        };
        let mut m = GradedModule {
            ring,
            window: Window { complete, ..window },
            dims,
            actions,
            origin: Some(Presentation {
                shifts: shifts.to_vec(),
                relations: Vec::new(),
            }),
        };
        m.detect_completeness(shifts.iter().copied().max());
        m
    }

    /// Natural top of the window for a module generated in degrees up to
    /// `max_gen`: exact for artinian rings, `max_gen + truncation` otherwise.
    pub fn natural_hi(ring: &QuotientRing, min_gen: i64, max_gen: i64) -> i64 {
        match ring.top_degree() {
            Some(t) => max_gen + t,
            None => (min_gen + ring.truncation() as i64).max(max_gen),
        }
    }

    /// Cokernel of a presentation, materialized on `[lo, hi]` (defaults to
    /// the natural window).
    pub fn expand(
        ring: Arc<QuotientRing>,
        pres: &Presentation,
        window: Option<(i64, i64)>,
    ) -> Result<Self> {
        Ok(Self::expand_with_quotients(ring, pres, window)?.0)
    }

    /// As [`GradedModule::expand`], also returning the quotient data of each
    /// degree relative to the free module on the generators.
    pub fn expand_with_quotients(
        ring: Arc<QuotientRing>,
        pres: &Presentation,
        window: Option<(i64, i64)>,
    ) -> Result<(Self, Vec<Subquotient>)> {
        let (lo, hi) = match window {
            Some(w) => w,
            None => {
                let min_g = pres.shifts.iter().copied().min().unwrap_or(0);
                let max_g = pres.shifts.iter().copied().max().unwrap_or(0);
                (min_g, Self::natural_hi(&ring, min_g, max_g))
            }
        };
        if let Some(&g) = pres.shifts.iter().min() {
            if g < lo {
                return Err(QpdError::arg(format!(
                    "generator in degree {g} lies below the window start {lo}"
                )));
            }
        }
        let free = Self::free(ring.clone(), &pres.shifts, lo, hi);
        let mut gens = Vec::new();
        for (j, col) in pres.relations.iter().enumerate() {
            if col.len() != pres.shifts.len() {
                return Err(QpdError::arg(format!(
                    "relation {j} has {} entries for {} generators",
                    col.len(),
                    pres.shifts.len()
                )));
            }
            let Some(deg) = relation_degree(&ring, &pres.shifts, col)
                .map_err(|e| QpdError::arg(format!("relation {j}: {e}")))?
            else {
                continue;
            };
            if deg > hi {
                continue;
            }
            gens.push((deg, free.free_element(&pres.shifts, col, deg)?));
        }
        let rel = free.generate(&gens);
        let (mut m, sq) = free.subquotient_by(None, &rel);
        m.validate()?;
        m.origin = Some(pres.clone());
        let max_g = pres.shifts.iter().copied().max();
        m.detect_completeness(max_g);
        Ok((m, sq))
    }

    /// Coordinates of a vector of polynomials in degree `deg` of this free
    /// module with the given shifts.
    pub fn free_element(&self, shifts: &[i64], col: &[Polynomial], deg: i64) -> Result<Vec<u32>> {
        let mut v = Vec::with_capacity(self.dim(deg));
        for (g, f) in shifts.iter().zip(col) {
            let nf = self.ring.normal_form(f);
            if nf.is_zero() {
                v.extend(std::iter::repeat_n(0, self.ring.dim(deg - g)));
            } else {
                v.extend(self.ring.coords(&nf, deg - g)?);
            }
        }
        Ok(v)
    }

    /// If the module is zero on a stretch of `max var degree` consecutive
    /// degrees above every generator, it is zero from there on.
    fn detect_completeness(&mut self, max_gen: Option<i64>) {
        if self.window.complete {
            return;
        }
        let e = self.ring.max_var_degree();
        let start = max_gen.map_or(self.window.lo, |g| g + 1).max(self.window.lo);
        let mut run = 0;
        for d in start..=self.window.hi {
            if self.dim(d) == 0 {
                run += 1;
                if run >= e {
                    self.window.complete = true;
                    return;
                }
            } else {
                run = 0;
            }
        }
    }

    pub fn ring(&self) -> &Arc<QuotientRing> {
        &self.ring
    }
    pub fn field(&self) -> PrimeField {
        self.ring.field()
    }
    pub fn window(&self) -> Window {
        self.window
    }
    pub fn lo(&self) -> i64 {
        self.window.lo
    }
    pub fn hi(&self) -> i64 {
        self.window.hi
    }
    pub fn is_complete(&self) -> bool {
        self.window.complete
    }
    pub fn origin(&self) -> Option<&Presentation> {
        self.origin.as_ref()
    }
    pub fn set_origin(&mut self, p: Option<Presentation>) {
        self.origin = p;
    }

    /// Dimension in degree `d`; zero outside a complete window. Panics on
    /// unknown degrees above an incomplete window.
    pub fn dim(&self, d: i64) -> usize {
        if d < self.window.lo {
            return 0;
        }
        if d > self.window.hi {
            assert!(
                self.window.complete,
                "degree {d} above incomplete window [{}, {}]",
                self.window.lo, self.window.hi
            );
            return 0;
        }
        self.dims[(d - self.window.lo) as usize]
    }

    pub fn dim_checked(&self, d: i64) -> Option<usize> {
        self.window.knows(d).then(|| self.dim(d))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Zero on the window (and hence everywhere when complete).
    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    /// Lowest degree with a nonzero component.
    pub fn initial_degree(&self) -> Option<i64> {
        self.window.degrees().find(|&d| self.dim(d) > 0)
    }

    pub fn top_nonzero_degree(&self) -> Option<i64> {
        self.window.degrees().rev().find(|&d| self.dim(d) > 0)
    }

    /// Matrix of `x_v` from degree `d`; `None` when the target degree is
    /// unknown.
    pub fn action(&self, v: usize, d: i64) -> Option<Matrix> {
        let e = self.ring.var_degree(v);
        if !self.window.knows(d + e) {
            return None;
        }
        if d < self.window.lo || d > self.window.hi {
            return Some(Matrix::zeros(self.field(), self.dim(d + e), self.dim(d)));
        }
        Some(self.actions[v][(d - self.window.lo) as usize].clone())
    }

    fn action_ref(&self, v: usize, d: i64) -> Option<&Matrix> {
        if d < self.window.lo || d > self.window.hi {
            return None;
        }
        Some(&self.actions[v][(d - self.window.lo) as usize])
    }

    pub fn act_var(&self, v: usize, d: i64, x: &[u32]) -> Option<Vec<u32>> {
        let e = self.ring.var_degree(v);
        if !self.window.knows(d + e) {
            return None;
        }
        match self.action_ref(v, d) {
            Some(a) => Some(a.mul_vec(x)),
            None => Some(vec![0; self.dim(d + e)]),
        }
    }

    pub fn act_monomial(&self, m: &Monomial, d: i64, x: &[u32]) -> Option<Vec<u32>> {
        let mut cur = x.to_vec();
        let mut deg = d;
        for (v, &e) in m.0.iter().enumerate() {
            for _ in 0..e {
                cur = self.act_var(v, deg, &cur)?;
                deg += self.ring.var_degree(v);
                if cur.iter().all(|&c| c == 0) {
                    let td = d + self.ring.poly_ring().degree(m) as i64;
                    if self.window.knows(td) {
                        return Some(vec![0; self.dim(td)]);
                    }
                }
            }
        }
        Some(cur)
    }

    /// `f · x` for `x` in degree `d`, with `f` homogeneous of degree `f_deg`.
    pub fn act_poly(&self, f: &Polynomial, f_deg: i64, d: i64, x: &[u32]) -> Option<Vec<u32>> {
        let td = d + f_deg;
        if !self.window.knows(td) {
            return None;
        }
        let fld = self.field();
        let mut out = vec![0u32; self.dim(td)];
        for (m, c) in f.terms() {
            let y = self.act_monomial(m, d, x)?;
            for (o, &yy) in out.iter_mut().zip(&y) {
                if yy != 0 {
                    *o = fld.add(*o, fld.mul(yy, *c));
                }
            }
        }
        Some(out)
    }

    /// Matrix of multiplication by `f` from degree `d`.
    pub fn poly_action(&self, f: &Polynomial, f_deg: i64, d: i64) -> Option<Matrix> {
        let td = d + f_deg;
        if !self.window.knows(td) {
            return None;
        }
        let n = self.dim(d);
        let cols: Vec<Vec<u32>> = (0..n)
            .map(|j| {
                let mut e = vec![0; n];
                e[j] = 1;
                self.act_poly(f, f_deg, d, &e)
            })
            .collect::<Option<_>>()?;
        Some(Matrix::from_columns(self.field(), self.dim(td), &cols))
    }

    /// Checks commuting actions and annihilation by the ideal on the window.
    pub fn validate(&self) -> Result<()> {
        let nv = self.ring.nvars();
        for d in self.window.degrees() {
            for v in 0..nv {
                let a = &self.actions[v][(d - self.window.lo) as usize];
                let e = self.ring.var_degree(v);
                let rows = if self.window.knows(d + e) { self.dim(d + e) } else { 0 };
                if a.cols() != self.dim(d) || a.rows() != rows {
                    return Err(QpdError::Inconsistent(format!(
                        "action of variable {v} at degree {d} has shape {}x{}, expected {rows}x{}",
                        a.rows(),
                        a.cols(),
                        self.dim(d)
                    )));
                }
            }
            for v in 0..nv {
                for w in (v + 1)..nv {
                    let (ev, ew) = (self.ring.var_degree(v), self.ring.var_degree(w));
                    if !self.window.knows(d + ev + ew) || self.dim(d) == 0 {
                        continue;
                    }
                    let vw = self.action(w, d + ev).unwrap().mul(&self.action(v, d).unwrap());
                    let wv = self.action(v, d + ew).unwrap().mul(&self.action(w, d).unwrap());
                    if vw != wv {
                        return Err(QpdError::Inconsistent(format!(
                            "actions of variables {v} and {w} do not commute at degree {d}"
                        )));
                    }
                }
            }
        }
        for g in self.ring.generators() {
            let gd = self.ring.degree_of(g)?;
            for d in self.window.degrees() {
                if self.dim(d) == 0 || !self.window.knows(d + gd) {
                    continue;
                }
                if !self.poly_action(g, gd, d).unwrap().is_zero() {
                    return Err(QpdError::Inconsistent(format!(
                        "ideal generator {} acts nonzero at degree {d}",
                        self.ring.format(g)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Same module on another window. The new window may extend below `lo`
    /// (zeros) and above `hi` only if the module is complete.
    pub fn reframe(&self, w_lo: i64, w_hi: i64) -> Result<GradedModule> {
        for d in self.window.degrees() {
            if d < w_lo && self.dim(d) > 0 {
                return Err(QpdError::arg(format!(
                    "reframe would drop nonzero degree {d}"
                )));
            }
        }
        if w_hi > self.window.hi && !self.window.complete {
            return Err(QpdError::arg(format!(
                "cannot extend incomplete window past {}",
                self.window.hi
            )));
        }
        let w_hi = w_hi.max(w_lo - 1);
        let complete = self.window.complete
            && ((w_hi + 1)..=self.window.hi).all(|d| self.dim(d) == 0);
        let new = Window::new(w_lo, w_hi, complete);
        let f = self.field();
        let nv = self.ring.nvars();
        let dims: Vec<usize> = new.degrees().map(|d| self.dim_or_zero(d)).collect();
        let mut actions = vec![Vec::with_capacity(new.len()); nv];
        for (v, act) in actions.iter_mut().enumerate() {
            let e = self.ring.var_degree(v);
            for d in new.degrees() {
                let rows = if new.knows(d + e) { self.dim_or_zero(d + e) } else { 0 };
                let m = match self.action_ref(v, d) {
                    Some(a) if rows > 0 => a.clone(),
                    _ => Matrix::zeros(f, rows, self.dim_or_zero(d)),
                };
                let m = if m.rows() != rows {
                    Matrix::zeros(f, rows, m.cols())
                } else {
                    m
                };
                act.push(m);
            }
        }
        Ok(GradedModule {
            ring: self.ring.clone(),
            window: new,
            dims,
            actions,
            origin: self.origin.clone(),
        })
    }

    fn dim_or_zero(&self, d: i64) -> usize {
        if self.window.contains(d) {
            self.dims[(d - self.window.lo) as usize]
        } else {
            0
        }
    }

    /// Moves every element up by `t` degrees: the result is `M(-t)`.
    pub fn raise(&self, t: i64) -> GradedModule {
        GradedModule {
            ring: self.ring.clone(),
            window: self.window.shifted(t),
            dims: self.dims.clone(),
            actions: self.actions.clone(),
            origin: self.origin.as_ref().map(|p| Presentation {
                shifts: p.shifts.iter().map(|g| g + t).collect(),
                relations: p.relations.clone(),
            }),
        }
    }

    pub fn direct_sum(mods: &[&GradedModule]) -> Result<GradedModule> {
        let Some(first) = mods.first() else {
            return Err(QpdError::arg("direct sum of no modules"));
        };
        let ring = first.ring.clone();
        let w = Window::join(mods.iter().map(|m| m.window));
        let framed: Vec<GradedModule> = mods
            .iter()
            .map(|m| m.reframe(w.lo, w.hi))
            .collect::<Result<_>>()?;
        let f = ring.field();
        let nv = ring.nvars();
        let dims: Vec<usize> = (0..w.len())
            .map(|k| framed.iter().map(|m| m.dims[k]).sum())
            .collect();
        let mut actions = vec![Vec::with_capacity(w.len()); nv];
        for (v, act) in actions.iter_mut().enumerate() {
            for k in 0..w.len() {
                let blocks: Vec<&Matrix> = framed.iter().map(|m| &m.actions[v][k]).collect();
                act.push(block_diag(f, &blocks));
            }
        }
        let origin = if framed.iter().all(|m| m.origin.is_some()) {
            let mut shifts = Vec::new();
            let mut relations = Vec::new();
            let total: usize = framed
                .iter()
                .map(|m| m.origin.as_ref().unwrap().shifts.len())
                .sum();
            let mut off = 0;
            for m in &framed {
                let p = m.origin.as_ref().unwrap();
                shifts.extend(&p.shifts);
                for col in &p.relations {
                    let mut c = vec![ring.poly_ring().zero(); total];
                    for (i, e) in col.iter().enumerate() {
                        c[off + i] = e.clone();
                    }
                    relations.push(c);
                }
                off += p.shifts.len();
            }
            Some(Presentation { shifts, relations })
        } else {
            None
        };
        Ok(GradedModule {
            ring,
            window: Window { complete: framed.iter().all(|m| m.window.complete), ..w },
            dims,
            actions,
            origin,
        })
    }

    /// Graded submodule generated by homogeneous elements `(degree, vector)`,
    /// as one echelon basis per window degree.
    pub fn generate(&self, gens: &[(i64, Vec<u32>)]) -> Vec<EchelonBasis> {
        let f = self.field();
        let mut spaces: Vec<EchelonBasis> = self
            .window
            .degrees()
            .map(|d| EchelonBasis::empty(f, self.dim(d)))
            .collect();
        for (k, d) in self.window.degrees().enumerate() {
            for v in 0..self.ring.nvars() {
                let e = self.ring.var_degree(v);
                if d - e < self.window.lo {
                    continue;
                }
                let src = (d - e - self.window.lo) as usize;
                let a = &self.actions[v][src];
                let imgs: Vec<Vec<u32>> = spaces[src]
                    .basis()
                    .iter()
                    .map(|b| a.mul_vec(b))
                    .collect();
                for img in imgs {
                    spaces[k].insert(img);
                }
            }
            for (gd, g) in gens {
                if *gd == d {
                    spaces[k].insert(g.clone());
                }
            }
        }
        spaces
    }

    /// `upper / lower` degreewise, where `upper` defaults to everything.
    /// Both must be closed under the action on the window. Returns the
    /// module and the per-degree quotient data.
    pub fn subquotient_by(
        &self,
        upper: Option<&[Vec<Vec<u32>>]>,
        lower: &[EchelonBasis],
    ) -> (GradedModule, Vec<Subquotient>) {
        let f = self.field();
        let nv = self.ring.nvars();
        let mut sqs = Vec::with_capacity(self.window.len());
        for (k, d) in self.window.degrees().enumerate() {
            let n = self.dim(d);
            let up: Vec<Vec<u32>> = match upper {
                Some(u) => u[k].clone(),
                None => (0..n)
                    .map(|i| {
                        let mut e = vec![0; n];
                        e[i] = 1;
                        e
                    })
                    .collect(),
            };
            sqs.push(Subquotient::new(&up, lower[k].clone()));
        }
        let dims: Vec<usize> = sqs.iter().map(|s| s.dim()).collect();
        let mut actions = vec![Vec::with_capacity(self.window.len()); nv];
        for (v, act) in actions.iter_mut().enumerate() {
            let e = self.ring.var_degree(v);
            for (k, d) in self.window.degrees().enumerate() {
                let known = d + e <= self.window.hi;
                let rows = if known { dims[k + e as usize] } else { 0 };
                let mut m = Matrix::zeros(f, rows, dims[k]);
                if known && rows > 0 {
                    let a = &self.actions[v][k];
                    for (j, l) in sqs[k].lifts().iter().enumerate() {
                        let img = a.mul_vec(l);
                        let c = sqs[k + e as usize].coords(&img);
                        for (i, &x) in c.iter().enumerate() {
                            m.set(i, j, x);
                        }
                    }
                }
                act.push(m);
            }
        }
        let module = GradedModule {
            ring: self.ring.clone(),
            window: self.window,
            dims,
            actions,
            origin: None,
        };
        (module, sqs)
    }

    /// The submodule with the given degreewise spaces, in its own basis.
    pub fn submodule(&self, spaces: &[EchelonBasis]) -> (GradedModule, Vec<Subquotient>) {
        let upper: Vec<Vec<Vec<u32>>> = spaces.iter().map(|s| s.basis().to_vec()).collect();
        let lower: Vec<EchelonBasis> = self
            .window
            .degrees()
            .map(|d| EchelonBasis::empty(self.field(), self.dim(d)))
            .collect();
        self.subquotient_by(Some(&upper), &lower)
    }

    /// Space spanned by `x_v · M_{d - deg v}` over all variables.
    pub fn maximal_ideal_image(&self, d: i64) -> EchelonBasis {
        let f = self.field();
        let mut e = EchelonBasis::empty(f, self.dim_checked(d).unwrap_or(0));
        for v in 0..self.ring.nvars() {
            let s = d - self.ring.var_degree(v);
            if let Some(a) = self.action_ref(v, s) {
                if a.rows() == e.ambient_dim() {
                    for c in a.columns() {
                        e.insert(c);
                    }
                }
            }
        }
        e
    }

    /// Number of minimal generators in each window degree.
    pub fn generator_profile(&self) -> Vec<usize> {
        self.window
            .degrees()
            .map(|d| self.dim(d) - self.maximal_ideal_image(d).dim())
            .collect()
    }

    /// Degrees of a minimal generating set, with representatives.
    pub fn minimal_generators(&self) -> Vec<(i64, Vec<u32>)> {
        let mut out = Vec::new();
        for d in self.window.degrees() {
            let mut img = self.maximal_ideal_image(d);
            for i in 0..self.dim(d) {
                let mut e = vec![0; self.dim(d)];
                e[i] = 1;
                if img.insert(e.clone()) {
                    out.push((d, e));
                }
            }
        }
        out
    }

    /// Ranks of each variable action per degree (only where the target is
    /// known).
    pub fn action_rank_profile(&self) -> Vec<Vec<Option<usize>>> {
        (0..self.ring.nvars())
            .map(|v| {
                let e = self.ring.var_degree(v);
                self.window
                    .degrees()
                    .map(|d| {
                        (d + e <= self.window.hi || self.window.complete)
                            .then(|| self.actions[v][(d - self.window.lo) as usize].rank())
                    })
                    .collect()
            })
            .collect()
    }

    /// Total rank of each variable action summed over the window; invariant
    /// under internal twists for complete modules.
    pub fn total_action_ranks(&self) -> Vec<usize> {
        (0..self.ring.nvars())
            .map(|v| {
                self.window
                    .degrees()
                    .map(|d| self.actions[v][(d - self.window.lo) as usize].rank())
                    .sum()
            })
            .collect()
    }

    /// The same vector spaces and actions regarded over another ring with the
    /// same variables (restriction or extension of scalars along `Q → R`).
    /// Fails if the new ring's ideal does not act by zero.
    pub fn with_ring(&self, ring: Arc<QuotientRing>) -> Result<GradedModule> {
        if ring.poly_ring().names() != self.ring.poly_ring().names()
            || ring.poly_ring().degrees() != self.ring.poly_ring().degrees()
            || ring.field() != self.field()
        {
            return Err(QpdError::arg("rings have different variables or fields"));
        }
        let m = GradedModule {
            ring,
            window: self.window,
            dims: self.dims.clone(),
            actions: self.actions.clone(),
            origin: self.origin.clone(),
        };
        m.validate()?;
        Ok(m)
    }

    /// Marks the module as zero above its window. Callers must know this
    /// from the construction.
    pub fn assume_complete(mut self) -> GradedModule {
        self.window.complete = true;
        self
    }

    /// Cyclic ideal modules and similar: the submodule of `self` generated by
    /// the given homogeneous elements.
    pub fn generated_submodule(&self, gens: &[(i64, Vec<u32>)]) -> GradedModule {
        let spaces = self.generate(gens);
        let (mut m, _) = self.submodule(&spaces);
        let max_g = gens.iter().map(|g| g.0).max();
        m.detect_completeness(max_g);
        m
    }
}

fn block_diag(f: PrimeField, blocks: &[&Matrix]) -> Matrix {
    let rows: usize = blocks.iter().map(|b| b.rows()).sum();
    let cols: usize = blocks.iter().map(|b| b.cols()).sum();
    let mut m = Matrix::zeros(f, rows, cols);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                let x = b.get(i, j);
                if x != 0 {
                    m.set(r0 + i, c0 + j, x);
                }
            }
        }
        r0 += b.rows();
        c0 += b.cols();
    }
    m
}

/// Degree of a relation column, checking degree compatibility with the
/// generator shifts. `None` for a column that vanishes in `R`.
pub fn relation_degree(
    ring: &QuotientRing,
    shifts: &[i64],
    col: &[Polynomial],
) -> Result<Option<i64>> {
    let mut deg = None;
    for (i, f) in col.iter().enumerate() {
        let nf = ring.normal_form(f);
        if nf.is_zero() {
            continue;
        }
        let d = ring.degree_of(f)? + shifts[i];
        match deg {
            None => deg = Some(d),
            Some(d0) if d0 != d => {
                return Err(QpdError::arg(format!(
                    "entry {i} has total degree {d}, expected {d0}"
                )))
            }
            _ => {}
        }
    }
    Ok(deg)
}

/// Degree-preserving homomorphism between modules on the same window.
#[derive(Clone, Debug)]
pub struct ModuleMap {
    source: Arc<GradedModule>,
    target: Arc<GradedModule>,
    blocks: Vec<Matrix>,
}

impl ModuleMap {
    pub fn new(
        source: Arc<GradedModule>,
        target: Arc<GradedModule>,
        blocks: Vec<Matrix>,
    ) -> Result<Self> {
        let m = Self::new_unchecked(source, target, blocks)?;
        if let Some(d) = m.first_noncommuting_degree() {
            return Err(QpdError::arg(format!(
                "map does not commute with the action at degree {d}"
            )));
        }
        Ok(m)
    }

    pub fn new_unchecked(
        source: Arc<GradedModule>,
        target: Arc<GradedModule>,
        blocks: Vec<Matrix>,
    ) -> Result<Self> {
        if source.window.lo != target.window.lo || source.window.hi != target.window.hi {
            return Err(QpdError::arg("module map between different windows"));
        }
        if blocks.len() != source.window.len() {
            return Err(QpdError::arg("wrong number of blocks"));
        }
        for (k, d) in source.window.degrees().enumerate() {
            if blocks[k].rows() != target.dim(d) || blocks[k].cols() != source.dim(d) {
                return Err(QpdError::arg(format!("block at degree {d} has wrong shape")));
            }
        }
        Ok(ModuleMap {
            source,
            target,
            blocks,
        })
    }

    pub fn zero(source: Arc<GradedModule>, target: Arc<GradedModule>) -> Result<Self> {
        let f = source.field();
        let blocks = source
            .window
            .degrees()
            .map(|d| Matrix::zeros(f, target.dim_or_zero(d), source.dim(d)))
            .collect();
        Self::new_unchecked(source, target, blocks)
    }

    pub fn identity(m: Arc<GradedModule>) -> Self {
        let f = m.field();
        let blocks = m
            .window
            .degrees()
            .map(|d| Matrix::identity(f, m.dim(d)))
            .collect();
        ModuleMap {
            source: m.clone(),
            target: m,
            blocks,
        }
    }

    /// Multiplication by a homogeneous ring element `f` as a map
    /// `M(-deg f) → M`.
    pub fn multiplication(m: &Arc<GradedModule>, f: &Polynomial) -> Result<Self> {
        let fd = m.ring.degree_of(f)?;
        let src = Arc::new(m.raise(fd));
        let w = Window::join([src.window, m.window]);
        let src = Arc::new(src.reframe(w.lo, w.hi)?);
        let tgt = Arc::new(m.reframe(w.lo, w.hi)?);
        let blocks = w
            .degrees()
            .map(|d| {
                m.poly_action(f, fd, d - fd)
                    .filter(|a| a.rows() == tgt.dim(d))
                    .unwrap_or_else(|| Matrix::zeros(m.field(), tgt.dim(d), src.dim(d)))
            })
            .collect();
        Self::new(src, tgt, blocks)
    }

    pub fn source(&self) -> &Arc<GradedModule> {
        &self.source
    }
    pub fn target(&self) -> &Arc<GradedModule> {
        &self.target
    }
    pub fn blocks(&self) -> &[Matrix] {
        &self.blocks
    }
    pub fn window(&self) -> Window {
        self.source.window
    }

    pub fn block(&self, d: i64) -> Matrix {
        if self.source.window.contains(d) {
            self.blocks[(d - self.source.window.lo) as usize].clone()
        } else {
            Matrix::zeros(self.source.field(), self.target.dim_or_zero(d), self.source.dim_or_zero(d))
        }
    }

    pub fn first_noncommuting_degree(&self) -> Option<i64> {
        let ring = &self.source.ring;
        for d in self.source.window.degrees() {
            for v in 0..ring.nvars() {
                let e = ring.var_degree(v);
                if d + e > self.source.window.hi {
                    continue;
                }
                let lhs = self.block(d + e).mul(&self.source.action(v, d).unwrap());
                let rhs = self.target.action(v, d).unwrap().mul(&self.block(d));
                if lhs != rhs {
                    return Some(d);
                }
            }
        }
        None
    }

    pub fn compose(&self, first: &ModuleMap) -> Result<ModuleMap> {
        // self ∘ first
        if first.target.dims != self.source.dims || first.window() != self.window() {
            return Err(QpdError::arg("composition of incompatible maps"));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&first.blocks)
            .map(|(a, b)| a.mul(b))
            .collect();
        Self::new_unchecked(first.source.clone(), self.target.clone(), blocks)
    }

    pub fn add(&self, other: &ModuleMap) -> ModuleMap {
        ModuleMap {
            source: self.source.clone(),
            target: self.target.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn scale(&self, c: u32) -> ModuleMap {
        ModuleMap {
            source: self.source.clone(),
            target: self.target.clone(),
            blocks: self.blocks.iter().map(|a| a.scale(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.is_zero())
    }

    pub fn is_degreewise_invertible(&self) -> bool {
        self.blocks.iter().all(|b| b.is_invertible())
    }

    pub fn inverse(&self) -> Option<ModuleMap> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.inverse())
            .collect::<Option<Vec<_>>>()?;
        Some(ModuleMap {
            source: self.target.clone(),
            target: self.source.clone(),
            blocks,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.blocks
            .iter()
            .all(|b| *b == Matrix::identity(b.field(), b.rows()) && b.rows() == b.cols())
    }

    /// Kernel and image dimensions per degree.
    pub fn kernel_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.cols() - b.rank()).collect()
    }
}

/// The space of degree-0 homomorphisms `source → target` on a common window,
/// parametrized linearly: `f_d = reshape(coeffs[d] · c)`.
#[derive(Clone, Debug)]
pub struct HomSpace {
    source: Arc<GradedModule>,
    target: Arc<GradedModule>,
    params: usize,
    coeffs: Vec<Matrix>,
}

impl HomSpace {
    pub fn dim(&self) -> usize {
        self.params
    }

    pub fn source(&self) -> &Arc<GradedModule> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GradedModule> {
        &self.target
    }

    pub fn element(&self, c: &[u32]) -> ModuleMap {
        let f = self.source.field();
        let blocks = self
            .source
            .window
            .degrees()
            .enumerate()
            .map(|(k, d)| {
                let (r, s) = (self.target.dim(d), self.source.dim(d));
                let flat = self.coeffs[k].mul_vec(c);
                Matrix::from_vec(f, r, s, flat)
            })
            .collect();
        ModuleMap {
            source: self.source.clone(),
            target: self.target.clone(),
            blocks,
        }
    }

    pub fn basis(&self) -> Vec<ModuleMap> {
        (0..self.params)
            .map(|i| {
                let mut c = vec![0; self.params];
                c[i] = 1;
                self.element(&c)
            })
            .collect()
    }

    pub fn random(&self, rng: &mut ChaCha8Rng) -> ModuleMap {
        let p = self.source.field().p();
        let c: Vec<u32> = (0..self.params).map(|_| rng.random_range(0..p)).collect();
        self.element(&c)
    }
}

/// Degree-`t` homomorphisms `a → b`, i.e. degree-0 maps `a → b(t)`, on the
/// common window.
pub fn hom_space(a: &GradedModule, b: &GradedModule, t: i64) -> Result<HomSpace> {
    if *a.ring != *b.ring {
        return Err(QpdError::arg("hom between modules over different rings"));
    }
    let bt = b.raise(-t);
    let w = Window::join([a.window, bt.window]);
    let src = Arc::new(a.reframe(w.lo, w.hi)?);
    let tgt = Arc::new(bt.reframe(w.lo, w.hi)?);
    Ok(hom_space_framed(src, tgt))
}

/// Degree-0 Hom between modules already on the same window.
pub fn hom_space_framed(src: Arc<GradedModule>, tgt: Arc<GradedModule>) -> HomSpace {
    let f = src.field();
    let ring = src.ring.clone();
    let w = src.window;
    let mut params = 0usize;
    let mut coeffs: Vec<Matrix> = Vec::with_capacity(w.len());
    for (k, d) in w.degrees().enumerate() {
        let (bd, ad) = (tgt.dim(d), src.dim(d));
        let u = bd * ad;
        let new_params = params + u;
        for c in coeffs.iter_mut() {
            *c = c.hstack(&Matrix::zeros(f, c.rows(), u));
        }
        let mut cur = Matrix::zeros(f, u, new_params);
        for i in 0..u {
            cur.set(i, params + i, 1);
        }
        coeffs.push(cur);
        params = new_params;
        // constraints f_d A_v(d-e) = B_v(d-e) f_{d-e}
        let mut eqs: Vec<Vec<u32>> = Vec::new();
        for v in 0..ring.nvars() {
            let e = ring.var_degree(v);
            let s = d - e;
            if s < w.lo {
                continue;
            }
            let ks = (s - w.lo) as usize;
            let a_s = src.dim(s);
            let b_s = tgt.dim(s);
            if bd == 0 || a_s == 0 {
                continue;
            }
            let av = &src.actions[v][ks]; // ad x a_s
            let bv = &tgt.actions[v][ks]; // bd x b_s
            for i in 0..bd {
                for j in 0..a_s {
                    let mut row = vec![0u32; params];
                    for kk in 0..ad {
                        let c = av.get(kk, j);
                        if c != 0 {
                            let r = coeffs[k].row(i * ad + kk);
                            for (x, &y) in row.iter_mut().zip(r) {
                                if y != 0 {
                                    *x = f.add(*x, f.mul(c, y));
                                }
                            }
                        }
                    }
                    for kk in 0..b_s {
                        let c = bv.get(i, kk);
                        if c != 0 {
                            let r = coeffs[ks].row(kk * a_s + j);
                            for (x, &y) in row.iter_mut().zip(r) {
                                if y != 0 {
                                    *x = f.sub(*x, f.mul(c, y));
                                }
                            }
                        }
                    }
                    if row.iter().any(|&x| x != 0) {
                        eqs.push(row);
                    }
                }
            }
        }
        if !eqs.is_empty() {
            let mut data = Vec::with_capacity(eqs.len() * params);
            for r in &eqs {
                data.extend_from_slice(r);
            }
            let e = Matrix::from_vec(f, eqs.len(), params, data);
            let n = e.kernel_basis();
            for c in coeffs.iter_mut() {
                *c = c.mul(&n);
            }
            params = n.cols();
        }
    }
    HomSpace {
        source: src,
        target: tgt,
        params,
        coeffs,
    }
}

#[derive(Clone, Debug)]
pub enum IsoVerdict {
    ProvenIsomorphic(ModuleMap),
    ProvenNot(String),
    NotFoundWithinTrials { trials: usize, seed: u64 },
}

impl IsoVerdict {
    pub fn is_iso(&self) -> bool {
        matches!(self, IsoVerdict::ProvenIsomorphic(_))
    }
}

/// Cheap necessary conditions for `a ≅ b` on the common window.
pub fn iso_obstruction(a: &GradedModule, b: &GradedModule) -> Option<String> {
    let w = Window::join([a.window, b.window]);
    let (Ok(a), Ok(b)) = (a.reframe(w.lo, w.hi), b.reframe(w.lo, w.hi)) else {
        return Some("windows cannot be aligned".into());
    };
    if a.dims != b.dims {
        let d = w
            .degrees()
            .find(|&d| a.dim(d) != b.dim(d))
            .unwrap_or(w.lo);
        return Some(format!(
            "graded dimensions differ at degree {d} ({} vs {})",
            a.dim(d),
            b.dim(d)
        ));
    }
    let (ra, rb) = (a.action_rank_profile(), b.action_rank_profile());
    if ra != rb {
        for (v, (x, y)) in ra.iter().zip(&rb).enumerate() {
            // degrees whose action is unknown on one side are not compared
            let differs = x
                .iter()
                .zip(y)
                .any(|(p, q)| matches!((p, q), (Some(p), Some(q)) if p != q));
            if differs {
                return Some(format!(
                    "action-rank mismatch for variable {}",
                    a.ring.poly_ring().names()[v]
                ));
            }
        }
    }
    if a.generator_profile() != b.generator_profile() {
        return Some("minimal generator degrees differ".into());
    }
    None
}

/// Monte Carlo isomorphism test: obstructions first, then random degree-0
/// homomorphisms.
pub fn is_isomorphic(a: &GradedModule, b: &GradedModule, trials: usize, seed: u64) -> IsoVerdict {
    if *a.ring != *b.ring {
        return IsoVerdict::ProvenNot("different rings".into());
    }
    if let Some(reason) = iso_obstruction(a, b) {
        return IsoVerdict::ProvenNot(reason);
    }
    let hs = match hom_space(a, b, 0) {
        Ok(h) => h,
        Err(e) => return IsoVerdict::ProvenNot(e.to_string()),
    };
    if hs.source.is_zero() {
        let z = ModuleMap::zero(hs.source.clone(), hs.target.clone()).expect("aligned");
        return IsoVerdict::ProvenIsomorphic(z);
    }
    if hs.dim() == 0 {
        return IsoVerdict::ProvenNot("no nonzero degree-0 homomorphisms".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let f = hs.random(&mut rng);
        if f.is_degreewise_invertible() {
            return IsoVerdict::ProvenIsomorphic(f);
        }
    }
    IsoVerdict::NotFoundWithinTrials { trials, seed }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r_xy_sq() -> Arc<QuotientRing> {
        QuotientRing::standard(101, &["x", "y"], &["x^2", "y^2"], 4).unwrap()
    }

    fn cyclic(r: &Arc<QuotientRing>, rels: &[&str], shift: i64) -> GradedModule {
        let pres = Presentation {
            shifts: vec![shift],
            relations: rels.iter().map(|s| vec![r.parse(s).unwrap()]).collect(),
        };
        GradedModule::expand(r.clone(), &pres, None).unwrap()
    }

    #[test]
    fn expand_examples() {
        let q = QuotientRing::standard(101, &["x", "y"], &[], 4).unwrap();
        let k = cyclic(&q, &["x", "y"], 0);
        assert_eq!(k.dim(0), 1);
        assert!((1..=4).all(|d| k.dim(d) == 0));
        assert!(k.is_complete());

        let free = cyclic(&q, &[], 0);
        assert_eq!(free.dims(), &[1, 2, 3, 4, 5]);
        assert!(!free.is_complete());

        let r = r_xy_sq();
        let m = cyclic(&r, &["x"], 0);
        assert_eq!(m.dims(), &[1, 1, 0]);
        assert!(m.is_complete());
    }

    #[test]
    fn expand_rejects_incompatible_degrees() {
        let r = r_xy_sq();
        let pres = Presentation {
            shifts: vec![0, 0],
            relations: vec![vec![r.parse("x").unwrap(), r.parse("x*y").unwrap()]],
        };
        assert!(matches!(
            GradedModule::expand(r, &pres, None),
            Err(QpdError::Argument(_))
        ));
    }

    #[test]
    fn hom_space_examples() {
        let r = r_xy_sq();
        let m = cyclic(&r, &["x"], 0);
        let free = cyclic(&r, &[], 0);
        assert_eq!(hom_space(&free, &m, 0).unwrap().dim(), m.dim(0));

        let rx = QuotientRing::standard(101, &["x"], &["x^2"], 3).unwrap();
        let k = cyclic(&rx, &["x"], 0);
        assert_eq!(hom_space(&k, &k, 0).unwrap().dim(), 1);

        let h = hom_space(&m, &free, 1).unwrap();
        assert_eq!(h.dim(), 1);
    }

    #[test]
    fn iso_examples() {
        let r = r_xy_sq();
        let free = Arc::new(cyclic(&r, &[], 0));
        // ideal (x) as a submodule of R
        let x = r.parse("x").unwrap();
        let gen = free.free_element(&[0], &[x], 1).unwrap();
        let ideal = free.generated_submodule(&[(1, gen)]);
        let rx1 = cyclic(&r, &["x"], 1);
        assert!(is_isomorphic(&ideal, &rx1, 64, 0).is_iso());

        let k = cyclic(&r, &["x", "y"], 0);
        let kk = GradedModule::direct_sum(&[&k, &k.raise(1)]).unwrap();
        let rx = cyclic(&r, &["x"], 0);
        match is_isomorphic(&kk, &rx, 64, 0) {
            IsoVerdict::ProvenNot(reason) => assert!(reason.contains("action-rank"), "{reason}"),
            other => panic!("{other:?}"),
        }
        match is_isomorphic(&rx, &rx, 64, 3) {
            IsoVerdict::ProvenIsomorphic(f) => {
                let inv = f.inverse().unwrap();
                assert!(inv.compose(&f).unwrap().is_identity());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hom_composition_is_bilinear() {
        let r = r_xy_sq();
        let a = cyclic(&r, &["x"], 0);
        let b = cyclic(&r, &[], 0).raise(-1).reframe(-1, 2).unwrap();
        let c = cyclic(&r, &["y"], -1).reframe(-1, 2).unwrap();
        let a = a.reframe(-1, 2).unwrap();
        let hab = hom_space(&a, &b, 0).unwrap();
        let hbc = hom_space(&b, &c, 0).unwrap();
        for f in hab.basis() {
            for g in hbc.basis() {
                let gf = g.compose(&f).unwrap();
                assert!(gf.first_noncommuting_degree().is_none());
            }
        }
    }

    #[test]
    fn window_join() {
        let a = Window::new(0, 4, true);
        let b = Window::new(-1, 6, false);
        assert_eq!(Window::join([a, b]), Window::new(-1, 6, false));
        assert_eq!(Window::join([a, Window::new(2, 8, true)]), Window::new(0, 8, true));
        assert_eq!(
            Window::join([Window::new(0, 3, false), Window::new(0, 5, false)]),
            Window::new(0, 3, false)
        );
    }
}
