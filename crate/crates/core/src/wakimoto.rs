//! The free-field realization `w_κ : V_κ(g) → M_g ⊗ π₀^{κ-κ_c}`.
//!
//! The construction starts from the action of `g` on functions on the big
//! cell `N₊ ⊂ G/B₋` by first-order differential operators. Loopifying those
//! vector fields (`y_α ↦ a*_α(z)`, `∂/∂y_α ↦ a_α(z)`) gives the images of
//! `e_α` exactly and those of `h_i`, `f_i` up to corrections, which are fixed
//! by adding the Heisenberg fields `b_i(z)` and solving for one constant per
//! simple root.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{mono_degree, FockPoly, FockSpace, FockVector, Gen};
use crate::lie::{FormLabel, LieAlgebraData};
use crate::linalg::{invert, rank, Mat};
use crate::ope::{field_mode, mode_commutator, nth_product, translate};
use crate::poly::{MPoly, Mono};
use crate::ring::Ring;
use crate::scalar::{q, Scalar, Q};

/// Polynomials in the big-cell coordinates `y_β` (indexed by positive root).
pub type YPoly = MPoly<usize, Q>;

/// `Σ_β comps[β] · ∂/∂y_β`.
#[derive(Clone, PartialEq, Debug)]
pub struct PolyVectorField {
    pub comps: Vec<YPoly>,
}

impl PolyVectorField {
    pub fn zero(n: usize) -> Self {
        PolyVectorField { comps: vec![YPoly::zero(); n] }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    pub fn plus(&self, o: &Self) -> Self {
        PolyVectorField { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.plus(b)).collect() }
    }

    pub fn scale(&self, c: &Q) -> Self {
        PolyVectorField { comps: self.comps.iter().map(|a| a.scale(c)).collect() }
    }

    /// Apply to a function on the big cell.
    pub fn apply(&self, f: &YPoly) -> YPoly {
        let mut out = YPoly::zero();
        for (b, c) in self.comps.iter().enumerate() {
            if !c.is_zero() {
                out.add_assign(&c.times(&f.derivative(&b)));
            }
        }
        out
    }

    /// Commutator of vector fields.
    pub fn bracket(&self, o: &Self) -> Self {
        PolyVectorField {
            comps: self.comps.iter().zip(&o.comps).map(|(x, y)| self.apply(y).minus(&o.apply(x))).collect(),
        }
    }

    /// Weight `wt(f_β) - β` of each nonzero component, in simple-root
    /// coordinates, with `wt y_α = -α`.
    pub fn component_weights(&self, alg: &LieAlgebraData) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        for (b, c) in self.comps.iter().enumerate() {
            for (m, _) in c.iter() {
                let mut w: Vec<i64> = alg.positive_roots[b].clone();
                for (y, e) in m.factors() {
                    for (wi, ri) in w.iter_mut().zip(&alg.positive_roots[*y]) {
                        *wi -= ri * *e as i64;
                    }
                }
                out.push(w);
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// The chart `x = Π_{β} exp(-y_β e_β)` (product in the convex order) in the
/// faithful representation, together with the Maurer–Cartan matrix
/// `M_{βγ}` = coefficient of `e_γ` in `x⁻¹ ∂x/∂y_β`.
pub struct BigCell<'a> {
    alg: &'a LieAlgebraData,
    x: Mat<YPoly>,
    xinv: Mat<YPoly>,
    mc: Vec<Vec<YPoly>>,
}

impl<'a> BigCell<'a> {
    pub fn new(alg: &'a LieAlgebraData) -> Result<Self> {
        let d = alg.rep_dim();
        let mut x = Mat::<YPoly>::identity(d);
        let mut xinv = Mat::<YPoly>::identity(d);
        for &b in &alg.convex_order {
            let gen = alg.matrix(alg.e(b)).map(|c| YPoly::constant(c.clone()));
            let y = YPoly::var(b);
            let fwd = gen.scale(&y.negated()).exp_nilpotent();
            let back = gen.scale(&y).exp_nilpotent();
            x = x.times(&fwd);
            xinv = back.times(&xinv);
        }
        let n = alg.n_pos();
        let mut mc = Vec::with_capacity(n);
        for b in 0..n {
            let dx = x.map(|p| p.derivative(&b));
            let coords = alg.from_matrix(&xinv.times(&dx))?;
            mc.push((0..n).map(|g| coords[alg.e(g)].clone()).collect::<Vec<_>>());
        }
        for (b, row) in mc.iter().enumerate() {
            if row[b] != YPoly::constant(q(-1)) {
                return Err(Error::Internal("Maurer–Cartan matrix is not unitriangular".into()));
            }
        }
        Ok(BigCell { alg, x, xinv, mc })
    }

    /// Solve `Σ_β v_β M_{βγ} = rhs_γ` (triangular in height).
    fn solve(&self, rhs: &[YPoly]) -> PolyVectorField {
        let n = self.alg.n_pos();
        let mut v = vec![YPoly::zero(); n];
        for g in 0..n {
            let mut acc = rhs[g].negated();
            for b in 0..g {
                if !v[b].is_zero() && !self.mc[b][g].is_zero() {
                    acc.add_assign(&v[b].times(&self.mc[b][g]));
                }
            }
            v[g] = acc;
        }
        PolyVectorField { comps: v }
    }

    /// Vector field of the left action of `a` (dense Chevalley coordinates).
    pub fn left(&self, a: &[Q]) -> Result<PolyVectorField> {
        let am = self.alg.to_matrix(&a.iter().map(|c| YPoly::constant(c.clone())).collect::<Vec<_>>());
        let conj = self.xinv.times(&am).times(&self.x);
        let coords = self.alg.from_matrix(&conj)?;
        let rhs: Vec<YPoly> = (0..self.alg.n_pos()).map(|g| coords[self.alg.e(g)].negated()).collect();
        Ok(self.solve(&rhs))
    }

    /// Vector field of the right action of `a ∈ n₊`.
    pub fn right(&self, a: &[Q]) -> Result<PolyVectorField> {
        let n = self.alg.n_pos();
        if a.iter().enumerate().any(|(i, c)| i >= n && !c.is_zero()) {
            return Err(Error::InvalidInput("right action is defined for n₊ only".into()));
        }
        let rhs: Vec<YPoly> = (0..n).map(|g| YPoly::constant(-a[g].clone())).collect();
        Ok(self.solve(&rhs))
    }
}

/// `ξ_a` for a dense Lie algebra element.
pub fn big_cell_action(alg: &LieAlgebraData, a: &[Q]) -> Result<PolyVectorField> {
    BigCell::new(alg)?.left(a)
}

/// Right-translation field of `a ∈ n₊`.
pub fn right_action(alg: &LieAlgebraData, a: &[Q]) -> Result<PolyVectorField> {
    BigCell::new(alg)?.right(a)
}

/// `Σ_β P_β(y) ∂/∂y_β ↦ Σ_β P_β(a*_{·,0}) a_{β,-1}|0⟩`.
pub fn loopify(rank: usize, v: &PolyVectorField) -> FockVector {
    let mut poly = FockPoly::zero();
    for (b, c) in v.comps.iter().enumerate() {
        for (m, coef) in c.iter() {
            let mono = m.map_vars(|y| Gen::astar(*y, 0)).mul_var(&Gen::a(b, -1), 1);
            poly.add_term(mono, Scalar::from_q(coef.clone()));
        }
    }
    FockVector { lambda: vec![Scalar::zero(); rank], poly }
}

/// Images of the whole Chevalley basis under `w_κ`, for `κ = level · κ₀`.
#[derive(Clone, Debug)]
pub struct WakimotoRealization {
    pub alg: LieAlgebraData,
    pub level: Scalar,
    /// `M_g ⊗ π` with `b`-pairing `(κ - κ_c)` on `h`.
    pub space: FockSpace,
    /// `w_κ(J^a)` for each basis index `a`.
    pub images: Vec<FockVector>,
    /// The correction constants `c_i`.
    pub constants: Vec<Scalar>,
    /// Loopified right-action fields `w^R(e_i)`.
    pub right: Vec<FockVector>,
}

fn level_of(alg: &LieAlgebraData, form: &FormLabel) -> Scalar {
    alg.form_scale(form)
}

/// Build `w_κ`. The `κ` argument is any multiple of `κ₀`.
pub fn realize(alg: &LieAlgebraData, form: &FormLabel) -> Result<WakimotoRealization> {
    let level = level_of(alg, form);
    let shifted = level.add(&Scalar::int(alg.dual_coxeter));
    let kp = alg.inner_product(FormLabel::Generic(shifted.clone()));
    let kappa = alg.inner_product(FormLabel::Generic(level.clone()));
    let space = FockSpace::wakimoto(alg, kp.gram_on_h.clone());
    let rank = alg.rank;
    let n = alg.n_pos();
    let cell = BigCell::new(alg)?;
    let field = |a: usize| -> Result<FockVector> { Ok(loopify(rank, &cell.left(&alg.basis_vec::<Q>(a))?)) };

    let mut images = vec![FockVector::zero(rank); alg.dim()];
    for r in 0..n {
        images[alg.e(r)] = field(alg.e(r))?;
    }
    for i in 0..rank {
        let b = FockVector::monomial(rank, &[Gen::b(i, -1)], Scalar::one());
        images[alg.h(i)] = field(alg.h(i))?.plus(&b);
    }

    // f_i = loop(ξ_{f_i}) + (c_i + κ'(e_i,f_i)) a*_{α_i,-1} + b_{i,-1} a*_{α_i,0}
    let mut constants = Vec::with_capacity(rank);
    for i in 0..rank {
        let base = field(alg.f(i))?
            .plus(&FockVector::monomial(rank, &[Gen::astar(i, -1)], kp.ef_pairing[i].clone()))
            .plus(&FockVector::monomial(rank, &[Gen::b(i, -1), Gen::astar(i, 0)], Scalar::one()));
        let dir = FockVector::monomial(rank, &[Gen::astar(i, -1)], Scalar::one());
        let c = solve_constant(&space, &images, alg, &kappa.full, i, &base, &dir)?;
        images[alg.f(i)] = base.plus(&dir.scale(&c));
        constants.push(c);
    }

    // Remaining f_β by brackets [f_i, f_γ] = s f_{γ+α_i}.
    for r in rank..n {
        let root = &alg.positive_roots[r];
        let (i, g) = (0..rank)
            .find_map(|i| {
                let mut c = root.clone();
                c[i] -= 1;
                alg.root_of(&c).map(|g| (i, g))
            })
            .ok_or_else(|| Error::Internal("root without a simple predecessor".into()))?;
        let s = alg
            .bracket_basis(alg.f(i), alg.f(g))
            .iter()
            .find(|(c, _)| *c == alg.f(r))
            .map(|(_, s)| s.clone())
            .ok_or_else(|| Error::Internal("missing structure constant".into()))?;
        let prod = nth_product(&space, &images[alg.f(i)], 0, &images[alg.f(g)])?;
        images[alg.f(r)] = prod.scale(&Scalar::from_q(Q::from_integer(1.into()) / s));
    }

    let right = (0..rank)
        .map(|i| Ok(loopify(rank, &cell.right(&alg.basis_vec::<Q>(alg.e(i)))?)))
        .collect::<Result<Vec<_>>>()?;

    Ok(WakimotoRealization { alg: alg.clone(), level, space, images, constants, right })
}

/// Find `c` with `w(e_j)_(1) (base + c·dir) = κ(e_j, f_i)|0⟩` for all `j`.
fn solve_constant(
    space: &FockSpace,
    images: &[FockVector],
    alg: &LieAlgebraData,
    kappa: &[Vec<Scalar>],
    i: usize,
    base: &FockVector,
    dir: &FockVector,
) -> Result<Scalar> {
    let rank = alg.rank;
    let mut eqs: Vec<(Scalar, Scalar)> = Vec::new();
    for j in 0..rank {
        let e = &images[alg.e(j)];
        let target = FockVector::vacuum(rank).scale(&kappa[alg.e(j)][alg.f(i)]);
        let r0 = nth_product(space, e, 1, base)?.minus(&target);
        let r1 = nth_product(space, e, 1, dir)?;
        let mut monos: Vec<Mono<Gen>> = r0.poly.iter().map(|(m, _)| m.clone()).collect();
        monos.extend(r1.poly.iter().map(|(m, _)| m.clone()));
        for m in monos {
            eqs.push((r0.poly.coeff(&m), r1.poly.coeff(&m)));
        }
    }
    let (a0, a1) = eqs
        .iter()
        .find(|(_, s)| !s.is_zero())
        .ok_or_else(|| Error::Internal("correction constant does not enter the relations".into()))?;
    let c = a0.neg().div(a1)?;
    for (r0, r1) in &eqs {
        if !r0.add(&r1.mul(&c)).is_zero() {
            return Err(Error::Internal("inconsistent system for the correction constant".into()));
        }
    }
    Ok(c)
}

/// A failed relation `[J^a_n, J^b_m]` on a test vector.
type ActionKey = (usize, i32, Mono<Gen>);

/// Images of single monomials under current modes, for one highest weight.
struct ActionCache {
    lambda: Vec<Scalar>,
    map: Mutex<(HashMap<ActionKey, Arc<FockPoly>>, usize)>,
}

impl ActionCache {
    /// Stored terms beyond which the cache starts over.
    const CAPACITY: usize = 1 << 21;
}

#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub a: usize,
    pub b: usize,
    pub n: i32,
    pub m: i32,
    pub vector: usize,
}

#[derive(Clone, Debug, Default)]
pub struct RelationReport {
    pub checked: usize,
    pub failures: Vec<Residual>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl WakimotoRealization {
    pub fn rank(&self) -> usize {
        self.alg.rank
    }

    /// `κ = level · κ₀` on the full basis.
    pub fn kappa(&self) -> Vec<Vec<Scalar>> {
        self.alg.inner_product(FormLabel::Generic(self.level.clone())).full
    }

    /// Image of a dense Lie algebra element.
    pub fn image(&self, x: &[Scalar]) -> FockVector {
        let mut out = FockVector::zero(self.rank());
        for (a, c) in x.iter().enumerate() {
            if !c.is_zero() {
                out = out.plus(&self.images[a].scale(c));
            }
        }
        out
    }

    fn bracket_image(&self, a: usize, b: usize) -> FockVector {
        let mut out = FockVector::zero(self.rank());
        for (c, s) in self.alg.bracket_basis(a, b) {
            out = out.plus(&self.images[*c].scale(&Scalar::from_q(s.clone())));
        }
        out
    }

    /// OPE form of the affine relations: `J^a_(0)J^b = w([a,b])`,
    /// `J^a_(1)J^b = κ(a,b)|0⟩` and `J^a_(n)J^b = 0` for `n ≥ 2`.
    pub fn verify_ope(&self) -> Result<Vec<(usize, usize, i32)>> {
        let kappa = self.kappa();
        let dim = self.alg.dim();
        let pairs: Vec<(usize, usize)> = (0..dim).flat_map(|a| (0..dim).map(move |b| (a, b))).collect();
        let bad: Vec<Vec<(usize, usize, i32)>> = pairs
            .par_iter()
            .map(|&(a, b)| -> Result<Vec<(usize, usize, i32)>> {
                let mut bad = Vec::new();
                let x = &self.images[a];
                let y = &self.images[b];
                let bound = (x.max_degree() + y.max_degree()) as i32;
                for n in 0..=bound {
                    let got = nth_product(&self.space, x, n, y)?;
                    let want = match n {
                        0 => self.bracket_image(a, b),
                        1 => FockVector::vacuum(self.rank()).scale(&kappa[a][b]),
                        _ => FockVector::zero(self.rank()),
                    };
                    if got.poly != want.poly {
                        bad.push((a, b, n));
                    }
                }
                Ok(bad)
            })
            .collect::<Result<_>>()?;
        Ok(bad.into_iter().flatten().collect())
    }

    /// Mode form of the affine relations
    /// `[J^a_n, J^b_m] = [a,b]_{n+m} + n δ_{n,-m} κ(a,b)` on the given vectors.
    pub fn verify_modes(&self, cutoff: i32, vectors: &[FockVector]) -> Result<RelationReport> {
        let kappa = self.kappa();
        let dim = self.alg.dim();
        let modes: Vec<i32> = (-cutoff..=cutoff).collect();
        let nm = modes.len();
        let cache = ActionCache {
            lambda: vectors.first().map(|v| v.lambda.clone()).unwrap_or_default(),
            map: Mutex::default(),
        };
        let per_vector: Vec<RelationReport> = vectors
            .par_iter()
            .enumerate()
            .map(|(vi, v)| -> Result<RelationReport> {
                let mut rep = RelationReport::default();
                let act = |a: usize, n: i32, u: &FockVector| self.act_cached(&cache, a, n, u);
                // first[a][n] = J^a_n v for |n| ≤ 2·cutoff, second[a][n][b][m] = J^a_n J^b_m v.
                let wide: Vec<i32> = (-2 * cutoff..=2 * cutoff).collect();
                let mut first = vec![Vec::with_capacity(wide.len()); dim];
                for a in 0..dim {
                    for &n in &wide {
                        first[a].push(act(a, n, v)?);
                    }
                }
                let at = |n: i32| (n + 2 * cutoff) as usize;
                let mut second = vec![vec![vec![vec![FockVector::zero(0); nm]; dim]; nm]; dim];
                for a in 0..dim {
                    for (ni, &n) in modes.iter().enumerate() {
                        for b in 0..dim {
                            for (mi, &m) in modes.iter().enumerate() {
                                second[a][ni][b][mi] = act(a, n, &first[b][at(m)])?;
                            }
                        }
                    }
                }
                for a in 0..dim {
                    for b in 0..dim {
                        for (ni, &n) in modes.iter().enumerate() {
                            for (mi, &m) in modes.iter().enumerate() {
                                let lhs = second[a][ni][b][mi].poly.minus(&second[b][mi][a][ni].poly);
                                let mut rhs = FockPoly::zero();
                                for (c, s) in self.alg.bracket_basis(a, b) {
                                    rhs.add_scaled(&first[*c][at(n + m)].poly, &Scalar::from_q(s.clone()));
                                }
                                if n + m == 0 && n != 0 {
                                    rhs.add_scaled(&v.poly, &kappa[a][b].mul(&Scalar::int(n as i64)));
                                }
                                rep.checked += 1;
                                if lhs != rhs {
                                    rep.failures.push(Residual { a, b, n, m, vector: vi });
                                }
                            }
                        }
                    }
                }
                Ok(rep)
            })
            .collect::<Result<_>>()?;
        let mut total = RelationReport::default();
        for r in per_vector {
            total.checked += r.checked;
            total.failures.extend(r.failures);
        }
        Ok(total)
    }

    /// `J^a_n u` assembled from memoized images of single monomials.
    fn act_cached(&self, cache: &ActionCache, a: usize, n: i32, u: &FockVector) -> Result<FockVector> {
        if u.lambda != cache.lambda {
            return self.act(a, n, u);
        }
        let mut out = FockPoly::zero();
        for (mono, c) in u.poly.iter() {
            let key = (a, n, mono.clone());
            let hit = cache.map.lock().unwrap().0.get(&key).cloned();
            let image = match hit {
                Some(p) => p,
                None => {
                    let single = u.with_poly(FockPoly::term(mono.clone(), Scalar::one()));
                    let p = Arc::new(self.act(a, n, &single)?.poly);
                    let mut guard = cache.map.lock().unwrap();
                    let (map, size) = &mut *guard;
                    if *size + p.len() > ActionCache::CAPACITY {
                        map.clear();
                        *size = 0;
                    }
                    *size += p.len() + 1;
                    map.insert(key, p.clone());
                    p
                }
            };
            out.add_scaled(&image, c);
        }
        Ok(u.with_poly(out))
    }

    /// Action of `J^a_n` on a vector of a Wakimoto module.
    pub fn act(&self, a: usize, n: i32, v: &FockVector) -> Result<FockVector> {
        field_mode(&self.space, &self.images[a], n, v)
    }

    /// `(J^{a_1}_{n_1} ⋯ J^{a_r}_{n_r})|0⟩` pushed through `w_κ`.
    pub fn image_of_word(&self, word: &[(usize, i32)]) -> Result<FockVector> {
        let mut v = FockVector::vacuum(self.rank());
        for &(a, n) in word.iter().rev() {
            v = self.act(a, n, &v)?;
        }
        Ok(v)
    }

    /// The Segal–Sugawara vector `½ Σ J^a_{-1} J_{a,-1}|0⟩` (dual basis for
    /// `κ - κ_c`) pushed through `w_κ`. Requires `κ ≠ κ_c`.
    pub fn segal_sugawara(&self) -> Result<FockVector> {
        let shifted = self.level.add(&Scalar::int(self.alg.dual_coxeter));
        if shifted.is_zero() {
            return Err(Error::Level("the Segal–Sugawara vector needs κ ≠ κ_c".into()));
        }
        let kp = self.alg.inner_product(FormLabel::Generic(shifted)).full;
        let inv = invert(&kp).ok_or_else(|| Error::Internal("degenerate invariant form".into()))?;
        let dim = self.alg.dim();
        let mut out = FockVector::zero(self.rank());
        for a in 0..dim {
            for b in 0..dim {
                if inv[a][b].is_zero() {
                    continue;
                }
                let p = nth_product(&self.space, &self.images[a], -1, &self.images[b])?;
                out = out.plus(&p.scale(&inv[a][b].mul(&Scalar::frac(1, 2))));
            }
        }
        Ok(out)
    }

    /// Closed form `Σ a_{-1}a*_{-1} + ½ Σ (κ'⁻¹)_{ij} b_{i,-1}b_{j,-1} - Σ (κ'⁻¹ρ)_j b_{j,-2}`.
    pub fn segal_sugawara_closed_form(&self) -> Result<FockVector> {
        let rank = self.rank();
        let Some(gram) = self.space_gram() else {
            return Err(Error::Level("no Heisenberg pairing".into()));
        };
        let inv = invert(&gram).ok_or_else(|| Error::Level("the Segal–Sugawara vector needs κ ≠ κ_c".into()))?;
        let mut out = FockVector::zero(rank);
        for r in 0..self.alg.n_pos() {
            out = out.plus(&FockVector::monomial(rank, &[Gen::a(r, -1), Gen::astar(r, -1)], Scalar::one()));
        }
        for i in 0..rank {
            for j in 0..rank {
                let c = inv[i][j].mul(&Scalar::frac(1, 2));
                out = out.plus(&FockVector::monomial(rank, &[Gen::b(i, -1), Gen::b(j, -1)], c));
            }
            // ρ(h_i) = 1 for every i.
            let mut rho_j = Scalar::zero();
            for k in 0..rank {
                rho_j = rho_j.add(&inv[i][k]);
            }
            out = out.plus(&FockVector::monomial(rank, &[Gen::b(i, -2)], rho_j.neg()));
        }
        Ok(out)
    }

    fn space_gram(&self) -> Option<Vec<Vec<Scalar>>> {
        match &self.space.heis {
            crate::fock::Heisenberg::Fock { form } => Some(form.clone()),
            _ => None,
        }
    }

    /// Quasi-conformal compatibility at the critical level:
    /// `L_n w(J) = 0` (n ≥ 1), `= w(J)` (n = 0), `= T w(J)` (n = -1),
    /// with `L_n` acting on `M_g ⊗ π₀` as `(ω_M)_(n+1)` plus the derivation
    /// of `π₀` below.
    pub fn verify_quasi_conformal(&self, max_n: i32) -> Result<Vec<(usize, i32)>> {
        if !self.level.add(&Scalar::int(self.alg.dual_coxeter)).is_zero() {
            return Err(Error::Level("quasi-conformal check runs at the critical level".into()));
        }
        let rank = self.rank();
        let mut omega = FockVector::zero(rank);
        for r in 0..self.alg.n_pos() {
            omega = omega.plus(&FockVector::monomial(rank, &[Gen::a(r, -1), Gen::astar(r, -1)], Scalar::one()));
        }
        let mut bad = Vec::new();
        for (a, img) in self.images.iter().enumerate() {
            for n in -1..=max_n {
                let got = field_mode(&self.space, &omega, n + 1, img)?.plus(&img.with_poly(pi0_ln(n, &img.poly)));
                let want = match n {
                    -1 => translate(img),
                    0 => img.clone(),
                    _ => FockVector::zero(rank),
                };
                if got.poly != want.poly {
                    bad.push((a, n));
                }
            }
        }
        Ok(bad)
    }

    /// Check that `[w(e_α)_n, w^R(e_i)_m] = 0`: every OPE coefficient vanishes,
    /// and the commutators vanish on the given vectors.
    pub fn verify_left_right(&self, cutoff: i32, vectors: &[FockVector]) -> Result<bool> {
        let n = self.alg.n_pos();
        for a in 0..n {
            for r in &self.right {
                let x = &self.images[self.alg.e(a)];
                for j in 0..=(x.max_degree() + r.max_degree()) as i32 {
                    if !nth_product(&self.space, x, j, r)?.is_zero() {
                        return Ok(false);
                    }
                }
                for nn in -cutoff..=cutoff {
                    for mm in -cutoff..=cutoff {
                        let c = mode_commutator(&self.space, x, nn, r, mm)?;
                        for v in vectors {
                            if !c.apply_direct(&self.space, v)?.is_zero() {
                                return Ok(false);
                            }
                        }
                    }
                }
            }
        }
        Ok(true)
    }

    /// Ranks of `w_κ` on the PBW monomials of `V_κ(g)` of each degree up to
    /// `max_degree`, compared with the number of monomials.
    pub fn injectivity_ranks(&self, max_degree: i32) -> Result<Vec<(usize, usize)>> {
        let dim = self.alg.dim();
        let mut out = Vec::new();
        for d in 1..=max_degree {
            let words = pbw_words(dim, d);
            let images: Vec<FockVector> = words.iter().map(|w| self.image_of_word(w)).collect::<Result<_>>()?;
            let mut monos: Vec<Mono<Gen>> = images.iter().flat_map(|v| v.poly.iter().map(|(m, _)| m.clone())).collect();
            monos.sort();
            monos.dedup();
            let rows: Vec<Vec<Scalar>> =
                images.iter().map(|v| monos.iter().map(|m| v.poly.coeff(m)).collect()).collect();
            out.push((words.len(), rank(&rows, monos.len())));
        }
        Ok(out)
    }
}

/// PBW words `J^{a_1}_{n_1} ⋯ J^{a_r}_{n_r}` with `n_i < 0`, `Σ -n_i = d`,
/// in non-decreasing `(n, a)` order.
pub fn pbw_words(dim: usize, d: i32) -> Vec<Vec<(usize, i32)>> {
    let mut out = Vec::new();
    let mut cur: Vec<(usize, i32)> = Vec::new();
    fn rec(dim: usize, left: i32, min: (i32, usize), cur: &mut Vec<(usize, i32)>, out: &mut Vec<Vec<(usize, i32)>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for n in min.0..=left {
            let a0 = if n == min.0 { min.1 } else { 0 };
            for a in a0..dim {
                cur.push((a, -n));
                rec(dim, left - n, (n, a), cur, out);
                cur.pop();
            }
        }
    }
    rec(dim, d, (1, 0), &mut cur, &mut out);
    out
}

/// The derivation `L_n` of `π₀ = C[b_{i,m}]`:
/// `L_n b_{i,m} = -m b_{i,n+m}` for `n + m < 0`,
/// `L_n b_{i,-n} = n(n+1)` for `n > 0`, and zero otherwise.
pub fn pi0_ln(n: i32, p: &FockPoly) -> FockPoly {
    let mut out = FockPoly::zero();
    for (m, c) in p.iter() {
        for (g, _) in m.factors() {
            if g.family != crate::fock::Family::B {
                continue;
            }
            let (e, rest) = m.without_one(g).unwrap();
            let c = c.mul_q(&q(e as i64));
            let t = g.mode + n;
            if t < 0 {
                out.add_term(rest.mul_var(&g.with_mode(t), 1), c.mul_q(&q(-(g.mode as i64))));
            } else if t == 0 && n > 0 {
                out.add_term(rest, c.mul_q(&q((n as i64) * (n as i64 + 1))));
            }
        }
    }
    out
}

/// PBW monomials of `M_g ⊗ π` of degree at most `max_degree` that contain at
/// most `max_zero_modes` factors `a*_{α,0}`, on the highest vector `lambda`.
pub fn basis_vectors(
    alg: &LieAlgebraData,
    with_b: bool,
    max_degree: i64,
    max_zero_modes: u32,
    lambda: Vec<Scalar>,
) -> Vec<FockVector> {
    let label = if with_b { crate::fock::ModuleLabel::Wakimoto } else { crate::fock::ModuleLabel::Weyl };
    let gens = crate::fock::creation_generators(alg, label, max_degree);
    let mut out = Vec::new();
    let mut cur: Vec<Gen> = Vec::new();
    fn rec(
        gens: &[Gen],
        start: usize,
        deg: i64,
        zeros: u32,
        lim: (i64, u32),
        cur: &mut Vec<Gen>,
        out: &mut Vec<Vec<Gen>>,
    ) {
        out.push(cur.clone());
        for (i, g) in gens.iter().enumerate().skip(start) {
            let nd = deg + g.degree();
            let nz = zeros + u32::from(g.degree() == 0);
            if nd > lim.0 || nz > lim.1 {
                continue;
            }
            cur.push(*g);
            rec(gens, i, nd, nz, lim, cur, out);
            cur.pop();
        }
    }
    let mut words = Vec::new();
    rec(&gens, 0, 0, 0, (max_degree, max_zero_modes), &mut cur, &mut words);
    for w in words {
        let m = Mono::from_factors(w);
        debug_assert!(mono_degree(&m) <= max_degree);
        out.push(FockVector { lambda: lambda.clone(), poly: FockPoly::term(m, Scalar::one()) });
    }
    out
}

/// Level-`k` parameter of a form label.
pub fn level(alg: &LieAlgebraData, form: &FormLabel) -> Scalar {
    level_of(alg, form)
}

/// Wakimoto module `W_{χ(t)}` at the critical level: `b_{i,n}` acts by the
/// scalar `χ_{i,n}`, with `χ_i(t) = Σ χ_{i,n} t^{-n-1}`.
pub fn critical_module_space(alg: &LieAlgebraData, chi: &[Vec<(i32, Scalar)>]) -> FockSpace {
    let mut map = std::collections::BTreeMap::new();
    for (i, terms) in chi.iter().enumerate() {
        for (n, c) in terms {
            if !c.is_zero() {
                map.insert((i, *n), c.clone());
            }
        }
    }
    FockSpace::with_character(alg, map)
}

/// The `π₀`-component of the Segal–Sugawara vector at the critical level:
/// the `b`-part of `w_κ(s_κ)` rescaled by `k + h∨` and evaluated at `k = -h∨`.
pub fn segal_sugawara_pi0(alg: &LieAlgebraData) -> Result<FockPoly> {
    let w = realize(alg, &FormLabel::Generic(Scalar::k()))?;
    let s = w.segal_sugawara()?;
    let shifted = Scalar::k().add(&Scalar::int(alg.dual_coxeter));
    let critical = Q::from_i64(-alg.dual_coxeter);
    let mut out = FockPoly::zero();
    for (m, c) in s.poly.iter() {
        if m.factors().iter().all(|(g, _)| g.family == crate::fock::Family::B) {
            let value = c.mul(&shifted).specialize(&critical)?;
            out.add_term(m.clone(), Scalar::from_q(value));
        }
    }
    Ok(out)
}
