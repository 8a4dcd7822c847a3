//! Sparse commutative polynomials over a [`Ring`] in an ordered variable set.
//!
//! Used for Fock vectors (creation operators commute), for polynomial vector
//! fields on the big cell and for functions on Miura opers.

use std::collections::BTreeMap;
use std::fmt::Debug;

use crate::ring::Ring;
use crate::scalar::Q;

/// A monomial: variables in increasing order with positive exponents.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Mono<V>(Vec<(V, u32)>);

impl<V> Default for Mono<V> {
    fn default() -> Self {
        Mono(Vec::new())
    }
}

impl<V: Ord + Clone> Mono<V> {
    pub fn one() -> Self {
        Mono(Vec::new())
    }

    pub fn var(v: V) -> Self {
        Mono(vec![(v, 1)])
    }

    pub fn from_factors<I: IntoIterator<Item = V>>(it: I) -> Self {
        let mut m = Mono::one();
        for v in it {
            m = m.mul_var(&v, 1);
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(V, u32)] {
        &self.0
    }

    /// Each variable repeated according to its exponent.
    pub fn expanded(&self) -> Vec<V> {
        let mut out = Vec::new();
        for (v, e) in &self.0 {
            for _ in 0..*e {
                out.push(v.clone());
            }
        }
        out
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, v: &V) -> u32 {
        match self.0.binary_search_by(|(w, _)| w.cmp(v)) {
            Ok(i) => self.0[i].1,
            Err(_) => 0,
        }
    }

    pub fn mul_var(&self, v: &V, e: u32) -> Self {
        if e == 0 {
            return self.clone();
        }
        let mut f = self.0.clone();
        match f.binary_search_by(|(w, _)| w.cmp(v)) {
            Ok(i) => f[i].1 += e,
            Err(i) => f.insert(i, (v.clone(), e)),
        }
        Mono(f)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Vec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < o.0.len() {
            match self.0[i].0.cmp(&o.0[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(o.0[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + o.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&o.0[j..]);
        Mono(out)
    }

    /// Lower the exponent of `v` by one, returning the old exponent.
    pub fn without_one(&self, v: &V) -> Option<(u32, Self)> {
        let i = self.0.binary_search_by(|(w, _)| w.cmp(v)).ok()?;
        let e = self.0[i].1;
        let mut f = self.0.clone();
        if e == 1 {
            f.remove(i);
        } else {
            f[i].1 -= 1;
        }
        Some((e, Mono(f)))
    }

    pub fn map_vars<W: Ord + Clone>(&self, f: impl Fn(&V) -> W) -> Mono<W> {
        let mut m = Mono::one();
        for (v, e) in &self.0 {
            m = m.mul_var(&f(v), *e);
        }
        m
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MPoly<V: Ord, C> {
    terms: BTreeMap<Mono<V>, C>,
}

impl<V: Ord, C> Default for MPoly<V, C> {
    fn default() -> Self {
        MPoly { terms: BTreeMap::new() }
    }
}

impl<V: Ord + Clone + Debug + Send + Sync + 'static, C: Ring> MPoly<V, C> {
    pub fn zero() -> Self {
        MPoly { terms: BTreeMap::new() }
    }

    pub fn constant(c: C) -> Self {
        MPoly::term(Mono::one(), c)
    }

    pub fn var(v: V) -> Self {
        MPoly::term(Mono::var(v), C::one())
    }

    pub fn term(m: Mono<V>, c: C) -> Self {
        let mut p = MPoly::zero();
        p.add_term(m, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Mono<V>, C)>>(it: I) -> Self {
        let mut p = MPoly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mono<V>, &C)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Mono<V>, C> {
        self.terms
    }

    pub fn coeff(&self, m: &Mono<V>) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&Mono::one())
    }

    pub fn add_term(&mut self, m: Mono<V>, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().plus(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add_scaled(&mut self, o: &Self, c: &C) {
        if c.is_zero() {
            return;
        }
        for (m, d) in &o.terms {
            self.add_term(m.clone(), d.times(c));
        }
    }

    pub fn add_assign(&mut self, o: &Self) {
        for (m, d) in &o.terms {
            self.add_term(m.clone(), d.clone());
        }
    }

    pub fn plus(&self, o: &Self) -> Self {
        let mut r = self.clone();
        r.add_assign(o);
        r
    }

    pub fn minus(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, d) in &o.terms {
            r.add_term(m.clone(), d.negated());
        }
        r
    }

    pub fn negated(&self) -> Self {
        MPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.negated())).collect() }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly { terms: self.terms.iter().map(|(m, d)| (m.clone(), d.times(c))).collect() }
    }

    pub fn map_coeffs<D: Ring>(&self, f: impl Fn(&C) -> D) -> MPoly<V, D> {
        MPoly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    pub fn mul_mono(&self, m: &Mono<V>, c: &C) -> Self {
        MPoly::from_terms(self.terms.iter().map(|(n, d)| (n.mul(m), d.times(c))))
    }

    pub fn times(&self, o: &Self) -> Self {
        let mut r = MPoly::zero();
        for (m, c) in &self.terms {
            for (n, d) in &o.terms {
                r.add_term(m.mul(n), c.times(d));
            }
        }
        r
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = MPoly::constant(C::one());
        for _ in 0..e {
            acc = acc.times(self);
        }
        acc
    }

    pub fn derivative(&self, v: &V) -> Self {
        let mut r = MPoly::zero();
        for (m, c) in &self.terms {
            if let Some((e, rest)) = m.without_one(v) {
                r.add_term(rest, c.scaled(&crate::scalar::q(e as i64)));
            }
        }
        r
    }

    /// Substitute polynomials for (some of) the variables.
    pub fn substitute(&self, f: impl Fn(&V) -> Option<MPoly<V, C>>) -> Self {
        let mut r = MPoly::zero();
        for (m, c) in &self.terms {
            let mut acc = MPoly::constant(c.clone());
            for (v, e) in m.factors() {
                let base = f(v).unwrap_or_else(|| MPoly::var(v.clone()));
                acc = acc.times(&base.pow(*e));
            }
            r.add_assign(&acc);
        }
        r
    }

    pub fn map_vars<W: Ord + Clone + Debug + Send + Sync + 'static>(
        &self,
        f: impl Fn(&V) -> W,
    ) -> MPoly<W, C> {
        MPoly::from_terms(self.terms.iter().map(|(m, c)| (m.map_vars(&f), c.clone())))
    }
}

impl<V: Ord + Clone + Debug + Send + Sync + 'static, C: Ring> Ring for MPoly<V, C> {
    fn zero() -> Self {
        MPoly::zero()
    }
    fn one() -> Self {
        MPoly::constant(C::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn plus(&self, o: &Self) -> Self {
        MPoly::plus(self, o)
    }
    fn minus(&self, o: &Self) -> Self {
        MPoly::minus(self, o)
    }
    fn times(&self, o: &Self) -> Self {
        MPoly::times(self, o)
    }
    fn negated(&self) -> Self {
        MPoly::negated(self)
    }
    fn from_q(c: &Q) -> Self {
        MPoly::constant(C::from_q(c))
    }
    fn scaled(&self, c: &Q) -> Self {
        MPoly::from_terms(self.terms.iter().map(|(m, d)| (m.clone(), d.scaled(c))))
    }
}

impl<V: Ord + Clone + Debug + Send + Sync + 'static, C: crate::ring::Field> crate::ring::Field
    for MPoly<V, C>
{
    /// Only constants are invertible.
    fn inverse(&self) -> Option<Self> {
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.is_one() {
                return c.inverse().map(MPoly::constant);
            }
        }
        None
    }
}
