//! State-field correspondence for `M_g ⊗ π`: n-th products, mode
//! commutators, the translation operator and lattice vertex operators.
//!
//! A state `g¹_{s₁} ⋯ g^r_{s_r}|0⟩` stands for the field
//! `:∂^{(·)}g¹(z) ⋯ ∂^{(·)}g^r(z):` with `a(z) = Σ a_n z^{-n-1}`,
//! `a*(z) = Σ a*_n z^{-n}` and `b(z) = Σ b_n z^{-n-1}`. Its `m`-th mode
//! `A_(m)` is the coefficient of `z^{-m-1}`.
//!
//! Two independent routes compute `A_(m) v`:
//! [`field_mode`] expands the normally ordered product into modes and acts on
//! `v` directly, while [`wick_product`] sums over Wick pairings of the two
//! states. The second one also isolates the double-contraction part used by
//! [`two_cocycle`].

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fock::{Family, FockPoly, FockSpace, FockVector, Gen, Heisenberg};
use crate::linalg::solve;
use crate::poly::Mono;
use crate::scalar::{Scalar, Q};

/// `binom(x, j)` for any integer `x` and `j ≥ 0`.
pub fn binom(x: i64, j: i64) -> Q {
    if j < 0 {
        return Q::zero();
    }
    let mut acc = Q::one();
    for i in 0..j {
        acc *= Q::ratio(x - i, i + 1);
    }
    acc
}

/// Coefficient of `g_n` in the field of the state `g_s|0⟩`.
fn mode_coeff(g: &Gen, n: i32) -> Q {
    match g.family {
        Family::AStar => binom(-(n as i64), -(g.mode as i64)),
        Family::A | Family::B => binom(-(n as i64) - 1, -(g.mode as i64) - 1),
    }
}

/// Largest creation mode of a family.
fn max_creation(f: Family) -> i32 {
    match f {
        Family::AStar => 0,
        Family::A | Family::B => -1,
    }
}

/// Annihilation modes of factor `g` that can act nontrivially on `u`.
fn annihilation_candidates(space: &FockSpace, g: &Gen, u: &Mono<Gen>, lambda: &[Scalar]) -> Vec<i32> {
    let mut out = Vec::new();
    match g.family {
        Family::A => {
            for (v, _) in u.factors() {
                if v.family == Family::AStar && v.index == g.index {
                    out.push(-v.mode);
                }
            }
        }
        Family::AStar => {
            for (v, _) in u.factors() {
                if v.family == Family::A && v.index == g.index {
                    out.push(-v.mode);
                }
            }
        }
        Family::B => match &space.heis {
            Heisenberg::Fock { form } => {
                if !lambda[g.idx()].is_zero() {
                    out.push(0);
                }
                for (v, _) in u.factors() {
                    if v.family == Family::B && !form[g.idx()][v.idx()].is_zero() {
                        out.push(-v.mode);
                    }
                }
            }
            Heisenberg::Character { chi } => {
                for ((i, n), c) in chi {
                    if *i == g.idx() && !c.is_zero() {
                        out.push(*n);
                    }
                }
            }
            Heisenberg::Absent => {}
        },
    }
    out.sort();
    out.dedup();
    out
}

/// Enumerate tuples of creation modes `n_i ≤ max_i` summing to `total`.
fn creation_tuples(maxes: &[i32], total: i32, f: &mut dyn FnMut(&[i32])) {
    fn rec(maxes: &[i32], total: i32, acc: &mut Vec<i32>, f: &mut dyn FnMut(&[i32])) {
        if maxes.is_empty() {
            if total == 0 {
                f(acc);
            }
            return;
        }
        if maxes.len() == 1 {
            if total <= maxes[0] {
                acc.push(total);
                f(acc);
                acc.pop();
            }
            return;
        }
        let rest: i32 = maxes[1..].iter().sum();
        // n_0 ≤ max_0 and total - n_0 ≤ rest.
        let lo = total - rest;
        let mut n = maxes[0];
        while n >= lo {
            acc.push(n);
            rec(&maxes[1..], total - n, acc, f);
            acc.pop();
            n -= 1;
        }
    }
    let mut acc = Vec::new();
    rec(maxes, total, &mut acc, f);
}

/// `A_(m) v`: the `m`-th mode of the field of the state `a` applied to `v`.
pub fn field_mode(space: &FockSpace, a: &FockVector, m: i32, v: &FockVector) -> Result<FockVector> {
    space.check_state(a)?;
    space.check_vector(v)?;
    let mut out = FockPoly::zero();
    if v.is_zero() {
        return Ok(v.with_poly(out));
    }
    for (amono, acoef) in a.poly.iter() {
        let factors = amono.expanded();
        let s_sum: i32 = factors.iter().map(|g| g.mode).sum();
        let total = m + 1 + s_sum;
        let cands: Vec<Vec<i32>> = factors
            .iter()
            .map(|g| {
                let mut c: Vec<i32> = v
                    .poly
                    .iter()
                    .flat_map(|(u, _)| annihilation_candidates(space, g, u, &v.lambda))
                    .collect();
                c.sort();
                c.dedup();
                c
            })
            .collect();
        let central: Vec<bool> =
            factors.iter().map(|g| g.family == Family::B && !space.has_b_variables()).collect();
        let mut choice: Vec<Option<i32>> = vec![None; factors.len()];
        enumerate_choices(0, &cands, &central, &mut choice, &mut |ch| {
            let mut ann_sum = 0;
            let mut coef = Q::one();
            let mut p = v.poly.clone();
            for (g, n) in factors.iter().zip(ch) {
                if let Some(n) = n {
                    let c = mode_coeff(g, *n);
                    if c.is_zero() {
                        return;
                    }
                    coef *= c;
                    ann_sum += n;
                    p = space.annihilate(&g.with_mode(*n), &p, &v.lambda);
                    if p.is_zero() {
                        return;
                    }
                }
            }
            let cre: Vec<Gen> = factors.iter().zip(ch).filter(|(_, n)| n.is_none()).map(|(g, _)| *g).collect();
            let cpoly = creation_part(cre, total - ann_sum);
            if cpoly.is_zero() {
                return;
            }
            let scaled = p.scale(&acoef.mul_q(&coef));
            out.add_assign(&scaled.times(&cpoly));
        });
    }
    Ok(v.with_poly(out))
}

thread_local! {
    static CREATION_PARTS: RefCell<HashMap<(Vec<Gen>, i32), Rc<FockPoly>>> = RefCell::new(HashMap::new());
}

/// The part of `:g¹(z) ⋯ g^r(z):` built from creation modes only, at total mode `total`.
fn creation_part(factors: Vec<Gen>, total: i32) -> Rc<FockPoly> {
    let key = (factors, total);
    if let Some(p) = CREATION_PARTS.with(|c| c.borrow().get(&key).cloned()) {
        return p;
    }
    let factors = &key.0;
    let maxes: Vec<i32> = factors.iter().map(|g| max_creation(g.family)).collect();
    let mut poly = FockPoly::zero();
    creation_tuples(&maxes, total, &mut |modes: &[i32]| {
        let mut c = Q::one();
        let mut mono = Mono::one();
        for (g, &n) in factors.iter().zip(modes) {
            let bc = mode_coeff(g, n);
            if bc.is_zero() {
                return;
            }
            c *= bc;
            mono = mono.mul_var(&g.with_mode(n), 1);
        }
        poly.add_term(mono, Scalar::from_q(c));
    });
    let poly = Rc::new(poly);
    CREATION_PARTS.with(|c| {
        let mut c = c.borrow_mut();
        if c.len() > 1 << 16 {
            c.clear();
        }
        c.insert(key, poly.clone());
    });
    poly
}

/// Each factor either creates (`None`) or annihilates with one of its
/// candidate modes; central factors always act through their candidates.
fn enumerate_choices(
    i: usize,
    cands: &[Vec<i32>],
    central: &[bool],
    choice: &mut Vec<Option<i32>>,
    f: &mut dyn FnMut(&[Option<i32>]),
) {
    if i == cands.len() {
        f(choice);
        return;
    }
    if !central[i] {
        choice[i] = None;
        enumerate_choices(i + 1, cands, central, choice, f);
    }
    for &n in &cands[i] {
        choice[i] = Some(n);
        enumerate_choices(i + 1, cands, central, choice, f);
    }
    choice[i] = None;
}

/// `A_(n) B` for two states of the vacuum module.
pub fn nth_product(space: &FockSpace, a: &FockVector, n: i32, b: &FockVector) -> Result<FockVector> {
    field_mode(space, a, n, b)
}

fn translate_gen(g: &Gen) -> (Q, Gen) {
    let c = match g.family {
        Family::A | Family::B => -(g.mode as i64),
        Family::AStar => -(g.mode as i64 - 1),
    };
    (Q::from_integer(c.into()), g.with_mode(g.mode - 1))
}

/// The translation operator `T`, a derivation with `T|0⟩ = 0`,
/// `[T, a_n] = -n a_{n-1}`, `[T, a*_n] = -(n-1) a*_{n-1}`, `[T, b_n] = -n b_{n-1}`.
pub fn translate(a: &FockVector) -> FockVector {
    let mut out = FockPoly::zero();
    for (m, c) in a.poly.iter() {
        for (g, _) in m.factors() {
            let (tc, tg) = translate_gen(g);
            if tc.is_zero() {
                continue;
            }
            let (e, rest) = m.without_one(g).unwrap();
            let coef = c.mul_q(&(tc * Q::from_integer((e as i64).into())));
            out.add_term(rest.mul_var(&tg, 1), coef);
        }
    }
    a.with_poly(out)
}

/// `T^{(j)} = T^j / j!`.
pub fn divided_translate(a: &FockVector, j: u32) -> FockVector {
    let mut r = a.clone();
    for i in 1..=j {
        r = translate(&r).scale(&Scalar::frac(1, i as i64));
    }
    r
}

/// Contraction `⟨∂^{(·)}x(z) ∂^{(·)}y(w)⟩|_{w=0} = c · z^{-e}` for the
/// factors `x` (of the field) and `y` (of the state).
fn contraction(space: &FockSpace, x: &Gen, y: &Gen) -> Option<(Scalar, i32)> {
    let p = |g: &Gen| -> i64 {
        match g.family {
            Family::AStar => -(g.mode as i64),
            _ => -(g.mode as i64) - 1,
        }
    };
    let (px, qy) = (p(x), p(y));
    match (x.family, y.family) {
        (Family::A, Family::AStar) | (Family::AStar, Family::A) if x.index == y.index => {
            let sign = if x.family == Family::A { 1 } else { -1 };
            let c = binom(-1 - qy, px) * Q::from_integer(sign.into());
            Some((Scalar::from_q(c), (1 + qy + px) as i32))
        }
        (Family::B, Family::B) => match &space.heis {
            Heisenberg::Fock { form } => {
                let f = &form[x.idx()][y.idx()];
                if f.is_zero() {
                    return None;
                }
                let c = binom(-2 - qy, px) * Q::from_integer((qy + 1).into());
                Some((f.mul_q(&c), (2 + qy + px) as i32))
            }
            _ => None,
        },
        _ => None,
    }
}

/// `A_(n) B` by Wick's theorem, keeping only pairings of the given sizes
/// (`None` keeps every pairing).
pub fn wick_product(
    space: &FockSpace,
    a: &FockVector,
    n: i32,
    b: &FockVector,
    sizes: Option<&[usize]>,
) -> Result<FockVector> {
    if matches!(space.heis, Heisenberg::Character { .. }) {
        return Err(Error::ModuleMismatch("Wick pairings need free-field b's".into()));
    }
    space.check_vector(a)?;
    space.check_vector(b)?;
    let mut out = FockVector::zero(b.lambda.len());
    out.lambda = b.lambda.clone();
    for (am, ac) in a.poly.iter() {
        let af = am.expanded();
        for (bm, bc) in b.poly.iter() {
            let bf = bm.expanded();
            let mut used_b = vec![false; bf.len()];
            let mut pairs: Vec<(usize, usize)> = Vec::new();
            fn rec(
                i: usize,
                af: &[Gen],
                bf: &[Gen],
                used_b: &mut Vec<bool>,
                pairs: &mut Vec<(usize, usize)>,
                f: &mut dyn FnMut(&[(usize, usize)]),
            ) {
                if i == af.len() {
                    f(pairs);
                    return;
                }
                rec(i + 1, af, bf, used_b, pairs, f);
                for j in 0..bf.len() {
                    if !used_b[j] {
                        used_b[j] = true;
                        pairs.push((i, j));
                        rec(i + 1, af, bf, used_b, pairs, f);
                        pairs.pop();
                        used_b[j] = false;
                    }
                }
            }
            let mut err = None;
            let mut visit = |ps: &[(usize, usize)]| {
                if let Some(s) = sizes {
                    if !s.contains(&ps.len()) {
                        return;
                    }
                }
                let mut coef = ac.mul(bc);
                let mut pole = 0;
                for (i, j) in ps {
                    match contraction(space, &af[*i], &bf[*j]) {
                        Some((c, e)) => {
                            coef = coef.mul(&c);
                            pole += e;
                        }
                        None => return,
                    }
                }
                if coef.is_zero() {
                    return;
                }
                // z^{-pole} · e^{zT}A' : coefficient of z^{-n-1} needs j = pole - n - 1.
                let j = pole - n - 1;
                if j < 0 {
                    return;
                }
                let rest_a: Vec<Gen> = (0..af.len())
                    .filter(|i| !ps.iter().any(|(x, _)| x == i))
                    .map(|i| af[i])
                    .collect();
                let rest_b: Vec<Gen> = (0..bf.len())
                    .filter(|j| !ps.iter().any(|(_, y)| y == j))
                    .map(|j| bf[j])
                    .collect();
                let ap = FockVector::monomial(b.lambda.len(), &rest_a, coef);
                let tj = divided_translate(&ap, j as u32);
                let bmono = Mono::from_factors(rest_b.iter().copied());
                let term = tj.poly.mul_mono(&bmono, &Scalar::one());
                match out.try_add(&FockVector { lambda: b.lambda.clone(), poly: term }) {
                    Ok(s) => out = s,
                    Err(e) => err = Some(e),
                }
            };
            rec(0, &af, &bf, &mut used_b, &mut pairs, &mut visit);
            if let Some(e) = err {
                return Err(e);
            }
        }
    }
    Ok(out)
}

/// `[A_(m), B_(k)] = Σ_{n≥0} binom(m,n) (A_(n)B)_(m+k-n)` as an operator.
#[derive(Clone, Debug)]
pub struct ModeCommutator {
    pub terms: Vec<(FockVector, i32)>,
    pub a: FockVector,
    pub m: i32,
    pub b: FockVector,
    pub k: i32,
}

pub fn mode_commutator(
    space: &FockSpace,
    a: &FockVector,
    m: i32,
    b: &FockVector,
    k: i32,
) -> Result<ModeCommutator> {
    let bound = a.max_degree() + b.max_degree();
    let mut terms = Vec::new();
    for n in 0..=bound.max(0) as i32 {
        let c = binom(m as i64, n as i64);
        if c.is_zero() {
            continue;
        }
        let p = nth_product(space, a, n, b)?;
        if !p.is_zero() {
            terms.push((p.scale(&Scalar::from_q(c)), m + k - n));
        }
    }
    Ok(ModeCommutator { terms, a: a.clone(), m, b: b.clone(), k })
}

impl ModeCommutator {
    /// Apply via the commutator formula.
    pub fn apply(&self, space: &FockSpace, v: &FockVector) -> Result<FockVector> {
        let mut out = v.with_poly(FockPoly::zero());
        for (s, j) in &self.terms {
            out = out.plus(&field_mode(space, s, *j, v)?);
        }
        Ok(out)
    }

    /// Apply by composing the two modes in both orders.
    pub fn apply_direct(&self, space: &FockSpace, v: &FockVector) -> Result<FockVector> {
        let x = field_mode(space, &self.a, self.m, &field_mode(space, &self.b, self.k, v)?)?;
        let y = field_mode(space, &self.b, self.k, &field_mode(space, &self.a, self.m, v)?)?;
        Ok(x.minus(&y))
    }

    /// `Some(c)` when the commutator is `c · Id`.
    pub fn as_scalar(&self) -> Option<Scalar> {
        scalar_of_terms(&self.terms)
    }
}

fn scalar_of_terms(terms: &[(FockVector, i32)]) -> Option<Scalar> {
    let mut c = Scalar::zero();
    for (s, j) in terms {
        if s.is_zero() {
            continue;
        }
        // The vacuum field is the identity: only its mode -1 survives.
        if s.poly.len() != 1 {
            return None;
        }
        let (mono, coef) = s.poly.iter().next().unwrap();
        if !mono.is_one() {
            return None;
        }
        if *j == -1 {
            c = c.add(coef);
        }
    }
    Some(c)
}

/// The double-contraction part of `[A_(m), B_(k)]` for states of the form
/// "polynomial in a* times one a", as a list of (state, mode) pairs.
#[derive(Clone, Debug)]
pub struct CocycleValue {
    pub terms: Vec<(FockVector, i32)>,
}

impl CocycleValue {
    pub fn as_scalar(&self) -> Option<Scalar> {
        scalar_of_terms(&self.terms)
    }
}

fn linear_in_a(v: &FockVector) -> bool {
    v.poly.iter().all(|(m, _)| {
        let a_count: u32 =
            m.factors().iter().filter(|(g, _)| g.family == Family::A).map(|(_, e)| e).sum();
        let b_count = m.factors().iter().filter(|(g, _)| g.family == Family::B).count();
        a_count == 1 && b_count == 0
    })
}

pub fn two_cocycle(
    space: &FockSpace,
    p: &FockVector,
    m: i32,
    q: &FockVector,
    k: i32,
) -> Result<CocycleValue> {
    if !linear_in_a(p) || !linear_in_a(q) {
        return Err(Error::InvalidInput(
            "cocycle arguments must be polynomials in a* times a single a".into(),
        ));
    }
    let bound = p.max_degree() + q.max_degree() + 2;
    let mut terms = Vec::new();
    for n in 0..=bound as i32 {
        let c = binom(m as i64, n as i64);
        if c.is_zero() {
            continue;
        }
        let d = wick_product(space, p, n, q, Some(&[2]))?;
        if !d.is_zero() {
            terms.push((d.scale(&Scalar::from_q(c)), m + k - n));
        }
    }
    Ok(CocycleValue { terms })
}

/// Scalar value of the cocycle; errors when the double contraction is not a
/// multiple of the identity.
pub fn two_cocycle_scalar(space: &FockSpace, p: &FockVector, m: i32, q: &FockVector, k: i32) -> Result<Scalar> {
    two_cocycle(space, p, m, q, k)?
        .as_scalar()
        .ok_or_else(|| Error::InvalidInput("double contraction is not a scalar".into()))
}

/// `V_χ(z) = T_χ exp(-Σ_{n<0} χ_n/n z^{-n}) exp(-Σ_{n>0} χ_n/n z^{-n})` on a
/// Heisenberg Fock module with pairing `form`, where `χ_n = Σ_j c_j b_{j,n}`
/// and `c` solves `form · c = (χ(h_i))_i`.
#[derive(Clone, Debug)]
pub struct LatticeVertexOp {
    /// `χ(h_i)`.
    pub chi: Vec<Scalar>,
    /// Coordinates of χ in the `b`-basis.
    pub coeffs: Vec<Scalar>,
}

impl LatticeVertexOp {
    pub fn new(space: &FockSpace, chi: Vec<Scalar>) -> Result<Self> {
        let Heisenberg::Fock { form } = &space.heis else {
            return Err(Error::ModuleMismatch("lattice operators need a Heisenberg Fock module".into()));
        };
        let coeffs = solve(form, &chi, chi.len())
            .ok_or_else(|| Error::Level("χ is not in the image of the pairing on h".into()))?;
        Ok(LatticeVertexOp { chi, coeffs })
    }

    /// Target highest weight `λ + χ`.
    pub fn target(&self, lambda: &[Scalar]) -> Vec<Scalar> {
        lambda.iter().zip(&self.chi).map(|(a, b)| a.add(b)).collect()
    }

    fn chi_mode(&self, space: &FockSpace, n: i32, p: &FockPoly, lambda: &[Scalar]) -> FockPoly {
        let mut out = FockPoly::zero();
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let g = Gen::b(j, n);
            let t = if n < 0 { space.create(&g, p) } else { space.annihilate(&g, p, lambda) };
            out.add_scaled(&t, c);
        }
        out
    }
}

/// `V[m] v`, mapping degree `d` of `π_λ` to degree `d - m` of `π_{λ+χ}`.
pub fn lattice_mode(space: &FockSpace, op: &LatticeVertexOp, m: i32, v: &FockVector) -> Result<FockVector> {
    space.check_vector(v)?;
    let top = v.max_degree() as i32;
    // A_q v for q = 0..=top, with q A_q = -Σ_{n=1}^{q} χ_n A_{q-n}.
    let mut ann: Vec<FockPoly> = vec![v.poly.clone()];
    for qd in 1..=top {
        let mut acc = FockPoly::zero();
        for n in 1..=qd {
            let t = op.chi_mode(space, n, &ann[(qd - n) as usize], &v.lambda);
            acc.add_assign(&t);
        }
        ann.push(acc.scale(&Scalar::frac(-1, qd as i64)));
    }
    // V[m] = Σ_{p ≥ 0, q = p + m ≥ 0} C_p A_q, with p C_p = Σ_{r=1}^{p} χ_{-r} C_{p-r}.
    let p_lo = (-m).max(0);
    let p_hi = top - m;
    let mut out = FockPoly::zero();
    if p_hi >= p_lo {
        let mut creators: Vec<FockPoly> = vec![FockPoly::constant(Scalar::one())];
        for p in 1..=p_hi {
            let mut acc = FockPoly::zero();
            for r in 1..=p {
                acc.add_assign(&op.chi_mode(space, -r, &creators[(p - r) as usize], &[]));
            }
            creators.push(acc.scale(&Scalar::frac(1, p as i64)));
        }
        for p in p_lo..=p_hi {
            let qd = p + m;
            let a = &ann[qd as usize];
            if a.is_zero() {
                continue;
            }
            out.add_assign(&a.times(&creators[p as usize]));
        }
    }
    Ok(FockVector { lambda: op.target(&v.lambda), poly: out })
}

/// Coefficients `V̄[-p]`, `p ≥ 0`, of `exp(Σ_{m>0} x_{-m}/m z^m)` where the
/// `x_{-m}` are given polynomials: `p V̄[-p] = Σ_{r=1}^{p} x_{-r} V̄[-(p-r)]`.
pub fn exp_series_coeffs<V, C>(xs: &[crate::poly::MPoly<V, C>], upto: usize) -> Vec<crate::poly::MPoly<V, C>>
where
    V: Ord + Clone + std::fmt::Debug + Send + Sync + 'static,
    C: crate::ring::Ring,
{
    use crate::ring::Ring;
    let mut out = vec![crate::poly::MPoly::constant(C::one())];
    for p in 1..=upto {
        let mut acc = crate::poly::MPoly::zero();
        for r in 1..=p {
            if r - 1 < xs.len() {
                acc.add_assign(&xs[r - 1].times(&out[p - r]));
            }
        }
        out.push(acc.scaled(&crate::scalar::qf(1, p as i64)));
    }
    out
}

/// All `(n, A_(n)B)` with nonzero result, for OPE tables.
pub fn ope_table(space: &FockSpace, a: &FockVector, b: &FockVector) -> Result<BTreeMap<i32, FockVector>> {
    let mut t = BTreeMap::new();
    let bound = (a.max_degree() + b.max_degree()) as i32;
    for n in 0..=bound {
        let p = nth_product(space, a, n, b)?;
        if !p.is_zero() {
            t.insert(n, p);
        }
    }
    Ok(t)
}
