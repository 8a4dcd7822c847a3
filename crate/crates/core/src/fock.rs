//! The Weyl algebra generated by `a_{α,n}, a*_{α,n}`, the Heisenberg algebra
//! generated by `b_{i,n}`, and their Fock modules.
//!
//! Creation operators commute with each other, so a Fock vector is stored as
//! a commutative polynomial in creation operators applied to the highest
//! vector. Annihilation operators act by derivations (plus the zero-mode
//! eigenvalues of the `b_{i,0}`).

use std::cmp::{Ordering, Reverse};
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::LieAlgebraData;
use crate::poly::{MPoly, Mono};
use crate::scalar::{q, Scalar};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "a_star")]
    AStar,
    #[serde(rename = "b")]
    B,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::A => "a",
            Family::AStar => "a_star",
            Family::B => "b",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "a" => Some(Family::A),
            "a_star" | "a*" => Some(Family::AStar),
            "b" => Some(Family::B),
            _ => None,
        }
    }
}

/// `a_{α,n}`, `a*_{α,n}` (index = position of α in Δ₊) or `b_{i,n}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Gen {
    pub family: Family,
    pub index: u16,
    pub mode: i32,
}

impl Ord for Gen {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.family, self.index, Reverse(self.mode)).cmp(&(o.family, o.index, Reverse(o.mode)))
    }
}

impl PartialOrd for Gen {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Gen {
    pub fn a(index: usize, mode: i32) -> Self {
        Gen { family: Family::A, index: index as u16, mode }
    }

    pub fn astar(index: usize, mode: i32) -> Self {
        Gen { family: Family::AStar, index: index as u16, mode }
    }

    pub fn b(index: usize, mode: i32) -> Self {
        Gen { family: Family::B, index: index as u16, mode }
    }

    pub fn idx(&self) -> usize {
        self.index as usize
    }

    pub fn is_creation(&self) -> bool {
        match self.family {
            Family::A | Family::B => self.mode < 0,
            Family::AStar => self.mode <= 0,
        }
    }

    pub fn degree(&self) -> i64 {
        -(self.mode as i64)
    }

    /// Weight in the simple-root basis.
    pub fn weight(&self, alg: &LieAlgebraData) -> Vec<i64> {
        match self.family {
            Family::A => alg.positive_roots[self.idx()].clone(),
            Family::AStar => alg.positive_roots[self.idx()].iter().map(|x| -x).collect(),
            Family::B => vec![0; alg.rank],
        }
    }

    pub fn with_mode(&self, mode: i32) -> Self {
        Gen { mode, ..*self }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.family {
            Family::A => "a",
            Family::AStar => "a*",
            Family::B => "b",
        };
        write!(f, "{name}{}({})", self.index + 1, self.mode)
    }
}

/// How the Heisenberg generators act on a module.
#[derive(Clone, Debug, PartialEq)]
pub enum Heisenberg {
    /// No `b` generators at all (the module `M_g` alone).
    Absent,
    /// Fock module with `[b_{i,n}, b_{j,m}] = n·form_ij·δ_{n,-m}`.
    Fock { form: Vec<Vec<Scalar>> },
    /// Every `b_{i,n}` acts by the scalar `χ_{i,n}` (zero when absent).
    Character { chi: BTreeMap<(usize, i32), Scalar> },
}

/// The ambient space `M_g ⊗ π`: how many roots carry `a, a*` and how the
/// `b`'s act. Fock vectors of one space differ only in their `b_{i,0}`
/// eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct FockSpace {
    pub n_roots: usize,
    pub rank: usize,
    pub heis: Heisenberg,
}

impl FockSpace {
    /// `M_g ⊗ π` with the given pairing of the `b`'s.
    pub fn wakimoto(alg: &LieAlgebraData, form: Vec<Vec<Scalar>>) -> Self {
        FockSpace { n_roots: alg.n_pos(), rank: alg.rank, heis: Heisenberg::Fock { form } }
    }

    /// `M_g` alone.
    pub fn weyl(alg: &LieAlgebraData) -> Self {
        FockSpace { n_roots: alg.n_pos(), rank: alg.rank, heis: Heisenberg::Absent }
    }

    /// The Heisenberg Fock module alone.
    pub fn heisenberg(rank: usize, form: Vec<Vec<Scalar>>) -> Self {
        FockSpace { n_roots: 0, rank, heis: Heisenberg::Fock { form } }
    }

    /// `M_g` with the `b`'s acting through a character (critical level).
    pub fn with_character(alg: &LieAlgebraData, chi: BTreeMap<(usize, i32), Scalar>) -> Self {
        FockSpace { n_roots: alg.n_pos(), rank: alg.rank, heis: Heisenberg::Character { chi } }
    }

    pub fn has_b_variables(&self) -> bool {
        matches!(self.heis, Heisenberg::Fock { .. })
    }

    /// Scalar commutator `[x, y]`.
    pub fn commutator(&self, x: &Gen, y: &Gen) -> Scalar {
        match (x.family, y.family) {
            (Family::A, Family::AStar) if x.index == y.index && x.mode + y.mode == 0 => {
                Scalar::one()
            }
            (Family::AStar, Family::A) if x.index == y.index && x.mode + y.mode == 0 => {
                Scalar::int(-1)
            }
            (Family::B, Family::B) if x.mode + y.mode == 0 && x.mode != 0 => match &self.heis {
                Heisenberg::Fock { form } => form[x.idx()][y.idx()].mul_q(&q(x.mode as i64)),
                _ => Scalar::zero(),
            },
            _ => Scalar::zero(),
        }
    }

    /// Whether the generator acts as a variable (creation) in this space.
    pub fn is_creation(&self, g: &Gen) -> bool {
        match (g.family, &self.heis) {
            (Family::B, Heisenberg::Fock { .. }) => g.is_creation(),
            (Family::B, _) => false,
            _ => g.is_creation(),
        }
    }

    fn check_gen(&self, g: &Gen) -> Result<()> {
        let ok = match g.family {
            Family::A | Family::AStar => g.idx() < self.n_roots,
            Family::B => g.idx() < self.rank && !matches!(self.heis, Heisenberg::Absent),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::ModuleMismatch(format!("generator {g} does not act on this module")))
        }
    }

    pub fn check_vector(&self, v: &FockVector) -> Result<()> {
        if v.lambda.len() != self.rank {
            return Err(Error::ModuleMismatch("zero-mode data has the wrong rank".into()));
        }
        for (m, _) in v.poly.iter() {
            for (g, _) in m.factors() {
                self.check_gen(g)?;
                if !self.is_creation(g) {
                    return Err(Error::ModuleMismatch(format!("{g} is not a creation operator")));
                }
            }
        }
        Ok(())
    }

    /// Like [`check_vector`](Self::check_vector), for states standing for
    /// fields. With a character, `b` factors are allowed and act as the
    /// series `χ_i(z)`.
    pub fn check_state(&self, v: &FockVector) -> Result<()> {
        for (m, _) in v.poly.iter() {
            for (g, _) in m.factors() {
                let central = g.family == Family::B && matches!(self.heis, Heisenberg::Character { .. });
                if !(central && g.idx() < self.rank) {
                    self.check_gen(g)?;
                }
                if !g.is_creation() {
                    return Err(Error::ModuleMismatch(format!("{g} is not a creation operator")));
                }
            }
        }
        Ok(())
    }

    /// Action of one annihilation operator (or central `b` in character mode)
    /// on a polynomial, for a vector whose `b_{i,0}` eigenvalues are `lambda`.
    pub fn annihilate(&self, g: &Gen, p: &FockPoly, lambda: &[Scalar]) -> FockPoly {
        match g.family {
            Family::A => p.derivative(&Gen::astar(g.idx(), -g.mode)),
            Family::AStar => p.derivative(&Gen::a(g.idx(), -g.mode)).negated(),
            Family::B => match &self.heis {
                Heisenberg::Absent => FockPoly::zero(),
                Heisenberg::Character { chi } => match chi.get(&(g.idx(), g.mode)) {
                    Some(c) => p.scale(c),
                    None => FockPoly::zero(),
                },
                Heisenberg::Fock { form } => {
                    if g.mode == 0 {
                        return p.scale(&lambda[g.idx()]);
                    }
                    let mut out = FockPoly::zero();
                    for (j, fij) in form[g.idx()].iter().enumerate() {
                        if fij.is_zero() {
                            continue;
                        }
                        let d = p.derivative(&Gen::b(j, -g.mode));
                        out.add_scaled(&d, &fij.mul_q(&q(g.mode as i64)));
                    }
                    out
                }
            },
        }
    }

    /// Apply a creation operator (multiplication, or a scalar for central `b`).
    pub fn create(&self, g: &Gen, p: &FockPoly) -> FockPoly {
        if self.is_creation(g) {
            p.mul_mono(&Mono::var(*g), &Scalar::one())
        } else {
            self.annihilate(g, p, &[])
        }
    }
}

pub type FockPoly = MPoly<Gen, Scalar>;

/// A vector of `M_g ⊗ π_λ`: polynomial in creation operators applied to the
/// highest vector `|λ⟩`, where `lambda[i]` is the `b_{i,0}` eigenvalue.
#[derive(Clone, PartialEq, Debug)]
pub struct FockVector {
    pub lambda: Vec<Scalar>,
    pub poly: FockPoly,
}

impl FockVector {
    pub fn zero(rank: usize) -> Self {
        FockVector { lambda: vec![Scalar::zero(); rank], poly: FockPoly::zero() }
    }

    /// The vacuum `|0⟩`.
    pub fn vacuum(rank: usize) -> Self {
        FockVector::highest(vec![Scalar::zero(); rank])
    }

    /// The highest vector `|λ⟩`.
    pub fn highest(lambda: Vec<Scalar>) -> Self {
        FockVector { lambda, poly: FockPoly::constant(Scalar::one()) }
    }

    /// `c · g_1 ⋯ g_r |0⟩` for creation generators.
    pub fn monomial(rank: usize, gens: &[Gen], c: Scalar) -> Self {
        FockVector {
            lambda: vec![Scalar::zero(); rank],
            poly: FockPoly::term(Mono::from_factors(gens.iter().copied()), c),
        }
    }

    pub fn with_poly(&self, poly: FockPoly) -> Self {
        FockVector { lambda: self.lambda.clone(), poly }
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    fn same_sector(&self, o: &Self) -> Result<()> {
        if self.lambda != o.lambda && !self.is_zero() && !o.is_zero() {
            return Err(Error::ModuleMismatch("vectors live in different Fock modules".into()));
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.same_sector(o)?;
        let lambda = if self.is_zero() { o.lambda.clone() } else { self.lambda.clone() };
        Ok(FockVector { lambda, poly: self.poly.plus(&o.poly) })
    }

    /// Sum of two vectors of the same module; panics on a mismatch.
    pub fn plus(&self, o: &Self) -> Self {
        self.try_add(o).expect("adding vectors of different Fock modules")
    }

    pub fn minus(&self, o: &Self) -> Self {
        self.plus(&o.scale(&Scalar::int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        self.with_poly(self.poly.scale(c))
    }

    pub fn map_scalars(&self, f: impl Fn(&Scalar) -> Scalar) -> Self {
        FockVector { lambda: self.lambda.iter().map(&f).collect(), poly: self.poly.map_coeffs(f) }
    }

    pub fn coeff(&self, gens: &[Gen]) -> Scalar {
        self.poly.coeff(&Mono::from_factors(gens.iter().copied()))
    }

    /// `(min, max)` degree of the monomials, `None` for the zero vector.
    pub fn degree_range(&self) -> Option<(i64, i64)> {
        let mut r: Option<(i64, i64)> = None;
        for (m, _) in self.poly.iter() {
            let d = mono_degree(m);
            r = Some(match r {
                None => (d, d),
                Some((a, b)) => (a.min(d), b.max(d)),
            });
        }
        r
    }

    pub fn max_degree(&self) -> i64 {
        self.degree_range().map_or(0, |r| r.1)
    }

    /// Weights of the monomials (simple-root coordinates, relative to λ).
    pub fn weights(&self, alg: &LieAlgebraData) -> Vec<Vec<i64>> {
        let mut out: Vec<Vec<i64>> = self.poly.iter().map(|(m, _)| mono_weight(m, alg)).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .poly
            .iter()
            .map(|(m, c)| {
                let mono: Vec<serde_json::Value> = m
                    .expanded()
                    .iter()
                    .map(|g| serde_json::json!([g.family.name(), g.index + 1, g.mode]))
                    .collect();
                serde_json::json!({ "monomial": mono, "coeff": c.to_string() })
            })
            .collect();
        serde_json::Value::Array(terms)
    }

    pub fn from_json(v: &serde_json::Value, lambda: Vec<Scalar>) -> Result<Self> {
        let bad = |m: &str| Error::InvalidInput(format!("Fock vector JSON: {m}"));
        let mut poly = FockPoly::zero();
        for t in v.as_array().ok_or_else(|| bad("expected a list"))? {
            let coeff: Scalar = t["coeff"]
                .as_str()
                .ok_or_else(|| bad("missing coeff"))?
                .parse()?;
            let mut mono = Mono::one();
            for g in t["monomial"].as_array().ok_or_else(|| bad("missing monomial"))? {
                let fam = g[0].as_str().and_then(Family::parse).ok_or_else(|| bad("family"))?;
                let idx = g[1].as_u64().filter(|&i| i >= 1).ok_or_else(|| bad("index"))?;
                let mode = g[2].as_i64().ok_or_else(|| bad("mode"))?;
                mono = mono.mul_var(
                    &Gen { family: fam, index: (idx - 1) as u16, mode: mode as i32 },
                    1,
                );
            }
            poly.add_term(mono, coeff);
        }
        Ok(FockVector { lambda, poly })
    }
}

impl fmt::Display for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.poly.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for g in m.expanded() {
                write!(f, "·{g}")?;
            }
        }
        write!(f, "|λ⟩")
    }
}

pub fn mono_degree(m: &Mono<Gen>) -> i64 {
    m.factors().iter().map(|(g, e)| g.degree() * *e as i64).sum()
}

pub fn mono_weight(m: &Mono<Gen>, alg: &LieAlgebraData) -> Vec<i64> {
    let mut w = vec![0; alg.rank];
    for (g, e) in m.factors() {
        for (x, y) in w.iter_mut().zip(g.weight(alg)) {
            *x += y * *e as i64;
        }
    }
    w
}

/// Finite linear combination of words in the generators.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct WeylElement {
    pub terms: BTreeMap<Vec<Gen>, Scalar>,
}

impl WeylElement {
    pub fn zero() -> Self {
        WeylElement::default()
    }

    pub fn word(gens: &[Gen], c: Scalar) -> Self {
        let mut w = WeylElement::zero();
        w.add_word(gens.to_vec(), c);
        w
    }

    pub fn add_word(&mut self, word: Vec<Gen>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(word).or_insert_with(Scalar::zero);
        *e = e.add(&c);
        if e.is_zero() {
            let key: Vec<Vec<Gen>> =
                self.terms.iter().filter(|(_, v)| v.is_zero()).map(|(k, _)| k.clone()).collect();
            for k in key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn plus(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (w, c) in &o.terms {
            r.add_word(w.clone(), c.clone());
        }
        r
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut r = WeylElement::zero();
        for (w, d) in &self.terms {
            r.add_word(w.clone(), d.mul(c));
        }
        r
    }

    /// Product in the algebra (concatenation of words).
    pub fn times(&self, o: &Self) -> Self {
        let mut r = WeylElement::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &o.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                r.add_word(w, c1.mul(c2));
            }
        }
        r
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Sort key of the normal order: creators first, then annihilators, each
/// block in the canonical generator order.
fn no_key(space: &FockSpace, g: &Gen) -> (bool, Gen) {
    (!space.is_creation(g), *g)
}

fn is_normal(space: &FockSpace, w: &[Gen]) -> bool {
    w.windows(2).all(|p| no_key(space, &p[0]) <= no_key(space, &p[1]))
}

/// Normal form: every word with creators left of annihilators, each block
/// sorted. Equal to the input in the algebra.
pub fn normal_form(space: &FockSpace, w: &WeylElement) -> WeylElement {
    let mut out = WeylElement::zero();
    for (word, c) in &w.terms {
        // (creators, annihilators) -> coefficient
        let mut cur: BTreeMap<(Vec<Gen>, Vec<Gen>), Scalar> = BTreeMap::new();
        cur.insert((Vec::new(), Vec::new()), c.clone());
        for g in word.iter().rev() {
            let mut next: BTreeMap<(Vec<Gen>, Vec<Gen>), Scalar> = BTreeMap::new();
            let mut push = |k: (Vec<Gen>, Vec<Gen>), v: Scalar| {
                let e = next.entry(k).or_insert_with(Scalar::zero);
                *e = e.add(&v);
            };
            for ((cr, an), coef) in cur {
                if space.is_creation(g) {
                    let mut cr2 = cr.clone();
                    let pos = cr2.partition_point(|x| x <= g);
                    cr2.insert(pos, *g);
                    push((cr2, an), coef);
                } else {
                    for (i, x) in cr.iter().enumerate() {
                        let s = space.commutator(g, x);
                        if !s.is_zero() {
                            let mut cr2 = cr.clone();
                            cr2.remove(i);
                            push((cr2, an.clone()), coef.mul(&s));
                        }
                    }
                    let mut an2 = an.clone();
                    let pos = an2.partition_point(|x| x <= g);
                    an2.insert(pos, *g);
                    push((cr, an2), coef);
                }
            }
            cur = next.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        }
        for ((mut cr, an), coef) in cur {
            cr.extend(an);
            out.add_word(cr, coef);
        }
    }
    out
}

/// Reference normal ordering by repeated adjacent transpositions.
pub fn normal_form_by_transpositions(space: &FockSpace, w: &WeylElement) -> WeylElement {
    let mut todo: Vec<(Vec<Gen>, Scalar)> = w.terms.iter().map(|(a, b)| (a.clone(), b.clone())).collect();
    let mut out = WeylElement::zero();
    while let Some((word, c)) = todo.pop() {
        if is_normal(space, &word) {
            out.add_word(word, c);
            continue;
        }
        let i = (0..word.len() - 1)
            .find(|&i| no_key(space, &word[i]) > no_key(space, &word[i + 1]))
            .unwrap();
        let mut swapped = word.clone();
        swapped.swap(i, i + 1);
        todo.push((swapped, c.clone()));
        let s = space.commutator(&word[i], &word[i + 1]);
        if !s.is_zero() {
            let mut shorter = word.clone();
            shorter.drain(i..i + 2);
            todo.push((shorter, c.mul(&s)));
        }
    }
    out
}

/// Act with a Weyl/Heisenberg element on a Fock vector.
pub fn apply(space: &FockSpace, w: &WeylElement, v: &FockVector) -> Result<FockVector> {
    space.check_vector(v)?;
    for word in w.terms.keys() {
        for g in word {
            space.check_gen(g)?;
        }
    }
    let nf = normal_form(space, w);
    let mut out = FockPoly::zero();
    for (word, c) in &nf.terms {
        let split = word.iter().position(|g| !space.is_creation(g)).unwrap_or(word.len());
        let mut p = v.poly.clone();
        for g in word[split..].iter().rev() {
            p = space.annihilate(g, &p, &v.lambda);
            if p.is_zero() {
                break;
            }
        }
        if p.is_zero() {
            continue;
        }
        let mono = Mono::from_factors(word[..split].iter().copied());
        out.add_assign(&p.mul_mono(&mono, c));
    }
    Ok(v.with_poly(out))
}

/// Which module's character is being counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModuleLabel {
    /// `W_{λ,κ} = M_g ⊗ π_λ`.
    Wakimoto,
    /// `M_g` alone (also the Wakimoto module `W_{χ(t)}` at the critical level).
    Weyl,
    /// `M'_g`, vacuum killed by `a_{α,n}, n>0` and `a*_{α,n}, n≥0`.
    WeylPrimed,
    /// The Heisenberg Fock module π.
    Heisenberg,
}

/// Creation generators of a module up to the given degree.
pub fn creation_generators(
    alg: &LieAlgebraData,
    label: ModuleLabel,
    max_degree: i64,
) -> Vec<Gen> {
    let mut out = Vec::new();
    let d = max_degree as i32;
    let weyl = matches!(label, ModuleLabel::Wakimoto | ModuleLabel::Weyl | ModuleLabel::WeylPrimed);
    let heis = matches!(label, ModuleLabel::Wakimoto | ModuleLabel::Heisenberg);
    if weyl {
        let primed = label == ModuleLabel::WeylPrimed;
        for r in 0..alg.n_pos() {
            let a_lo = if primed { 0 } else { 1 };
            let s_lo = if primed { 1 } else { 0 };
            for n in a_lo..=d {
                out.push(Gen::a(r, -n));
            }
            for n in s_lo..=d {
                out.push(Gen::astar(r, -n));
            }
        }
    }
    if heis {
        for i in 0..alg.rank {
            for n in 1..=d {
                out.push(Gen::b(i, -n));
            }
        }
    }
    out
}

/// Number of PBW monomials of each `(degree, weight)` with degree at most
/// `max_degree` and weight depth `-ht(weight)` at most `max_depth`, found by
/// explicit enumeration of the monomials.
pub fn character(
    alg: &LieAlgebraData,
    label: ModuleLabel,
    max_degree: i64,
    max_depth: i64,
) -> BTreeMap<(i64, Vec<i64>), u64> {
    let gens = creation_generators(alg, label, max_degree);
    let theta_ht = alg.positive_roots.iter().map(|r| r.iter().sum::<i64>()).max().unwrap_or(0);
    // Height moves by at most this much once the degree budget is spent.
    let spread = max_degree * theta_ht;
    let slack = spread + max_depth;
    let reach = slack;
    let mut table = BTreeMap::new();
    let mut stack: Vec<Gen> = Vec::new();
    fn rec(
        alg: &LieAlgebraData,
        gens: &[Gen],
        start: usize,
        deg: i64,
        wt: &mut Vec<i64>,
        stack: &mut Vec<Gen>,
        lim: (i64, i64, i64, i64),
        table: &mut BTreeMap<(i64, Vec<i64>), u64>,
    ) {
        let (max_degree, max_depth, slack, reach) = lim;
        let ht: i64 = wt.iter().sum();
        if -ht <= max_depth && ht <= reach {
            *table.entry((deg, wt.clone())).or_insert(0) += 1;
        }
        for (i, g) in gens.iter().enumerate().skip(start) {
            let nd = deg + g.degree();
            if nd > max_degree {
                continue;
            }
            let gw = g.weight(alg);
            let nh = ht + gw.iter().sum::<i64>();
            if -nh > slack || nh > 2 * slack - max_depth {
                continue;
            }
            for (x, y) in wt.iter_mut().zip(&gw) {
                *x += y;
            }
            stack.push(*g);
            rec(alg, gens, i, nd, wt, stack, lim, table);
            stack.pop();
            for (x, y) in wt.iter_mut().zip(&gw) {
                *x -= y;
            }
        }
    }
    let mut wt = vec![0; alg.rank];
    rec(alg, &gens, 0, 0, &mut wt, &mut stack, (max_degree, max_depth, slack, reach), &mut table);
    table
}

/// Graded dimension of one bigraded component.
pub fn graded_dimension(alg: &LieAlgebraData, label: ModuleLabel, degree: i64, weight: &[i64]) -> u64 {
    let depth = (-weight.iter().sum::<i64>()).max(0);
    character(alg, label, degree, depth)
        .get(&(degree, weight.to_vec()))
        .copied()
        .unwrap_or(0)
}

/// Expand `∏ (1 - x^{g})^{-1}` over factors given by `(degree, weight)` into
/// the same truncated table. Used as the product-formula side of character
/// identities.
pub fn product_formula(
    rank: usize,
    factors: &[(i64, Vec<i64>)],
    max_degree: i64,
    max_depth: i64,
    slack: i64,
) -> BTreeMap<(i64, Vec<i64>), u64> {
    let mut table: BTreeMap<(i64, Vec<i64>), u64> = BTreeMap::new();
    table.insert((0, vec![0; rank]), 1);
    for (d, w) in factors {
        let wh: i64 = w.iter().sum();
        let mut next = table.clone();
        // Multiply by 1/(1-x): next[s] = table[s] + next[s - x], processed in
        // increasing order along the factor's direction.
        let mut frontier: Vec<((i64, Vec<i64>), u64)> = table.iter().map(|(k, v)| (k.clone(), *v)).collect();
        loop {
            let mut new_frontier = Vec::new();
            for ((deg, wt), cnt) in &frontier {
                let nd = deg + d;
                let nw: Vec<i64> = wt.iter().zip(w).map(|(a, b)| a + b).collect();
                let nh: i64 = nw.iter().sum();
                if nd > max_degree || -nh > slack || nh > 2 * slack - max_depth || (*d == 0 && wh == 0) {
                    continue;
                }
                *next.entry((nd, nw.clone())).or_insert(0) += cnt;
                new_frontier.push(((nd, nw), *cnt));
            }
            if new_frontier.is_empty() {
                break;
            }
            frontier = new_frontier;
        }
        table = next;
    }
    table
        .into_iter()
        .filter(|((_, w), _)| {
            let ht = w.iter().sum::<i64>();
            -ht <= max_depth && ht <= slack
        })
        .collect()
}

/// Lowering directions `(degree, weight)` of the positive real affine roots:
/// `-α` at every degree `n ≥ 0` and `+α` at every `n ≥ 1`, for `α > 0`.
pub fn real_root_factors(alg: &LieAlgebraData, max_degree: i64) -> Vec<(i64, Vec<i64>)> {
    let mut out = Vec::new();
    for n in 0..=max_degree {
        for r in &alg.positive_roots {
            out.push((n, r.iter().map(|x| -x).collect()));
            if n > 0 {
                out.push((n, r.clone()));
            }
        }
    }
    out
}

/// Lowering directions of `U(n̂₋)`, read off the Chevalley basis: every basis
/// element at degree `n ≥ 1` and the `f_α` at degree 0. Imaginary roots appear
/// with multiplicity equal to the rank.
pub fn verma_factors(alg: &LieAlgebraData, max_degree: i64) -> Vec<(i64, Vec<i64>)> {
    let mut out = Vec::new();
    for a in 0..alg.dim() {
        let w = alg.weight(a);
        let lo = if w.iter().sum::<i64>() < 0 { 0 } else { 1 };
        for n in lo..=max_degree {
            out.push((n, w.clone()));
        }
    }
    out
}

/// The enumeration window used by [`character`], so product expansions can be
/// compared with it entry by entry.
pub fn character_window(alg: &LieAlgebraData, max_degree: i64, max_depth: i64) -> i64 {
    let theta_ht = alg.positive_roots.iter().map(|r| r.iter().sum::<i64>()).max().unwrap_or(0);
    max_degree * theta_ht + max_depth
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{algebra, AlgebraType};

    #[test]
    fn canonical_order_puts_higher_modes_first() {
        let mut v = vec![Gen::a(0, -3), Gen::a(0, -1), Gen::astar(0, 0)];
        v.sort();
        assert_eq!(v, vec![Gen::a(0, -1), Gen::a(0, -3), Gen::astar(0, 0)]);
    }

    #[test]
    fn single_commutator() {
        let alg = algebra(AlgebraType::A1);
        let sp = FockSpace::weyl(&alg);
        let w = WeylElement::word(&[Gen::a(0, 0), Gen::astar(0, 0)], Scalar::one());
        let nf = normal_form(&sp, &w);
        let mut want = WeylElement::word(&[Gen::astar(0, 0), Gen::a(0, 0)], Scalar::one());
        want.add_word(vec![], Scalar::one());
        assert_eq!(nf, want);
    }
}
