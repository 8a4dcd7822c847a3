//! Screening operators.
//!
//! * First-kind screenings `S_i = ∮ w^R(e_i)(z) V_{-α_i}(z) dz : W_{0,κ} → W_{-α_i,κ}`
//!   commute with the affine action away from the critical level.
//! * At the critical level their limits restrict to `π₀` as
//!   `V̄_i[1] = -Σ_{m≤0} V̄_i[m] D_{b_{i,m-1}}`, where
//!   `Σ_{n≤0} V̄_i[n] z^{-n} = exp(Σ_{m>0} b_{i,-m} z^m / m)` and
//!   `D_{b_{i,m}} b_{j,n} = a_{ji} δ_{n,m}`. The joint kernel is the center.
//! * The classical W-algebra screenings on the commutative algebra in the
//!   `b′_{i,n}` are `V_i[1] = Σ_{m≤0} V_i[m] D_{b′_{i,m-1}}` with
//!   `exp(-Σ_{m>0} b′_{i,-m} z^m / m)` and `D_{b′_{i,m}} b′_{j,n} = a_{ij} δ_{n,m}`.
//!
//! The commutative algebras `π₀` and `π_{0,ν₀}` are both stored as
//! polynomials in `Gen::b(i, n)`, `n < 0`.

use crate::error::{Error, Result};
use crate::fock::{mono_degree, FockPoly, FockVector, Gen};
use crate::lie::LieAlgebraData;
use crate::linalg::nullspace;
use crate::ope::{exp_series_coeffs, field_mode, lattice_mode, LatticeVertexOp};
use crate::poly::Mono;
use crate::scalar::Scalar;
use crate::wakimoto::WakimotoRealization;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScreeningOp {
    /// `S_{i,κ}` between Wakimoto modules.
    FirstKind(usize),
    /// `V̄_i[1]` on `π₀` at the critical level.
    CriticalPi0(usize),
    /// `V_i[1]` on the classical Heisenberg algebra; `dual` uses the
    /// transposed Cartan matrix, i.e. the operator attached to `ᴸg`.
    ClassicalW { i: usize, dual: bool },
}

impl ScreeningOp {
    pub fn index(&self) -> usize {
        match *self {
            ScreeningOp::FirstKind(i) | ScreeningOp::CriticalPi0(i) => i,
            ScreeningOp::ClassicalW { i, .. } => i,
        }
    }

    /// Apply an operator that acts on a commutative Heisenberg algebra.
    pub fn apply_commutative(&self, alg: &LieAlgebraData, v: &FockPoly) -> Result<FockPoly> {
        match *self {
            ScreeningOp::FirstKind(_) => {
                Err(Error::ModuleMismatch("first-kind screenings act between Wakimoto modules".into()))
            }
            ScreeningOp::CriticalPi0(i) => Ok(critical_screening_apply(alg, i, v)),
            ScreeningOp::ClassicalW { i, dual } => Ok(classical_w_screening_apply(alg, i, v, dual)),
        }
    }
}

/// `Σ_{m≤0} V[m] D_{m-1}` with `V` generated by `exp(sign · Σ b_{i,-m} z^m / m)`
/// and `D_{m} b_{j,n} = weights[j] δ_{n,m}`.
fn exp_derivation_sum(i: usize, v: &FockPoly, sign: i64, weights: &[i64]) -> FockPoly {
    let top = v.iter().map(|(m, _)| mono_degree(m)).max().unwrap_or(0) as usize;
    if top == 0 {
        return FockPoly::zero();
    }
    let xs: Vec<FockPoly> =
        (1..=top).map(|r| FockPoly::var(Gen::b(i, -(r as i32))).scale(&Scalar::int(sign))).collect();
    let series = exp_series_coeffs(&xs, top);
    let mut out = FockPoly::zero();
    for p in 0..top {
        // m = -p, derivative in the variables of mode m - 1 = -p - 1.
        let mode = -(p as i32) - 1;
        let mut dv = FockPoly::zero();
        for (j, w) in weights.iter().enumerate() {
            if *w != 0 {
                dv.add_scaled(&v.derivative(&Gen::b(j, mode)), &Scalar::int(*w));
            }
        }
        if !dv.is_zero() {
            out.add_assign(&series[p].times(&dv));
        }
    }
    out
}

/// `V̄_i[1]` on `π₀`.
pub fn critical_screening_apply(alg: &LieAlgebraData, i: usize, v: &FockPoly) -> FockPoly {
    let weights: Vec<i64> = (0..alg.rank).map(|j| alg.cartan_matrix[j][i]).collect();
    exp_derivation_sum(i, v, 1, &weights).negated()
}

/// `V_i[1]` on the classical Heisenberg algebra in the `b′_{i,n}`.
pub fn classical_w_screening_apply(alg: &LieAlgebraData, i: usize, v: &FockPoly, dual: bool) -> FockPoly {
    let weights: Vec<i64> =
        (0..alg.rank).map(|j| if dual { alg.cartan_matrix[j][i] } else { alg.cartan_matrix[i][j] }).collect();
    exp_derivation_sum(i, v, -1, &weights)
}

/// The substitution `b_{i,n} ↦ -b′_{i,n}` (an involution on coefficients).
pub fn flip_sign(v: &FockPoly) -> FockPoly {
    FockPoly::from_terms(v.iter().map(|(m, c)| {
        let c = if m.total_degree() % 2 == 1 { c.neg() } else { c.clone() };
        (m.clone(), c)
    }))
}

/// Monomials of degree `d` in the `b_{i,n}`, `n < 0`.
pub fn pi0_monomials(rank: usize, d: i64) -> Vec<Mono<Gen>> {
    let gens: Vec<Gen> = (1..=d as i32).flat_map(|n| (0..rank).map(move |i| Gen::b(i, -n))).collect();
    let mut out = Vec::new();
    fn rec(gens: &[Gen], start: usize, left: i64, cur: &mut Vec<Gen>, out: &mut Vec<Mono<Gen>>) {
        if left == 0 {
            out.push(Mono::from_factors(cur.iter().copied()));
            return;
        }
        for (k, g) in gens.iter().enumerate().skip(start) {
            if g.degree() <= left {
                cur.push(*g);
                rec(gens, k, left - g.degree(), cur, out);
                cur.pop();
            }
        }
    }
    rec(&gens, 0, d, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Basis of the joint kernel of `ops` on the degree-`d` part of the
/// commutative Heisenberg algebra.
pub fn kernel_basis(alg: &LieAlgebraData, ops: &[ScreeningOp], d: i64) -> Result<Vec<FockPoly>> {
    let source = pi0_monomials(alg.rank, d);
    let images: Vec<Vec<FockPoly>> = source
        .iter()
        .map(|m| {
            let v = FockPoly::term(m.clone(), Scalar::one());
            ops.iter().map(|op| op.apply_commutative(alg, &v)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    // One row per (operator, target monomial), one column per source monomial.
    let mut rows = Vec::new();
    for k in 0..ops.len() {
        let mut targets: Vec<Mono<Gen>> =
            images.iter().flat_map(|im| im[k].iter().map(|(m, _)| m.clone())).collect();
        targets.sort();
        targets.dedup();
        for t in &targets {
            rows.push(images.iter().map(|im| im[k].coeff(t)).collect::<Vec<Scalar>>());
        }
    }
    let null = nullspace(&rows, source.len());
    Ok(null
        .into_iter()
        .map(|c| FockPoly::from_terms(source.iter().cloned().zip(c)))
        .collect())
}

/// Kernel dimensions for degrees `0..=max_degree`.
pub fn kernel_dims(alg: &LieAlgebraData, ops: &[ScreeningOp], max_degree: i64) -> Result<Vec<usize>> {
    (0..=max_degree).map(|d| kernel_basis(alg, ops, d).map(|b| b.len())).collect()
}

/// All `V̄_i[1]`.
pub fn critical_ops(alg: &LieAlgebraData) -> Vec<ScreeningOp> {
    (0..alg.rank).map(ScreeningOp::CriticalPi0).collect()
}

/// All `V_i[1]`.
pub fn classical_ops(alg: &LieAlgebraData, dual: bool) -> Vec<ScreeningOp> {
    (0..alg.rank).map(|i| ScreeningOp::ClassicalW { i, dual }).collect()
}

/// Coefficients of `∏_i ∏_{n ≥ d_i + 1} (1 - q^n)^{-1}` up to `q^max_degree`.
pub fn center_character(alg: &LieAlgebraData, max_degree: usize) -> Vec<u64> {
    let mut c = vec![0u64; max_degree + 1];
    c[0] = 1;
    for &d in &alg.exponents {
        for n in (d + 1)..=max_degree {
            for s in n..=max_degree {
                c[s] += c[s - n];
            }
        }
    }
    c
}

/// `ad_{V_i}^{1 - a_{ij}}(V_j)` applied to `v`, for the classical screenings.
pub fn serre_element_apply(alg: &LieAlgebraData, i: usize, j: usize, v: &FockPoly, dual: bool) -> FockPoly {
    let vi = |p: &FockPoly| classical_w_screening_apply(alg, i, p, dual);
    let vj = |p: &FockPoly| classical_w_screening_apply(alg, j, p, dual);
    let a = if dual { alg.cartan_matrix[j][i] } else { alg.cartan_matrix[i][j] };
    let n = (1 - a) as usize;
    // ad_X^n(Y) = Σ_k (-1)^k C(n,k) X^{n-k} Y X^k.
    let mut out = FockPoly::zero();
    let mut binom = 1i64;
    for k in 0..=n {
        let mut w = v.clone();
        for _ in 0..k {
            w = vi(&w);
        }
        w = vj(&w);
        for _ in 0..(n - k) {
            w = vi(&w);
        }
        let sign = if k % 2 == 0 { 1 } else { -1 };
        out.add_scaled(&w, &Scalar::int(sign * binom));
        binom = binom * (n - k) as i64 / (k + 1) as i64;
    }
    out
}

/// `S_i v` for `v ∈ W_{0,κ}`; the result lies in `W_{-α_i,κ}`.
pub fn first_kind_apply(w: &WakimotoRealization, i: usize, v: &FockVector) -> Result<FockVector> {
    if w.level.add(&Scalar::int(w.alg.dual_coxeter)).is_zero() {
        return Err(Error::Level("first-kind screenings need κ ≠ κ_c".into()));
    }
    if v.lambda.iter().any(|l| !l.is_zero()) {
        return Err(Error::ModuleMismatch("first-kind screenings act on W_{0,κ}".into()));
    }
    let op = screening_vertex_op(w, i)?;
    let d = v.max_degree() as i32;
    let target = op.target(&v.lambda);
    let mut out = FockVector { lambda: target, poly: FockPoly::zero() };
    // Weight-one field times V(z): the residue pairs E_(n) with V[-n], and
    // both factors vanish outside |n| ≤ deg v.
    for n in -d..=d {
        let shifted = lattice_mode(&w.space, &op, -n, v)?;
        if shifted.is_zero() {
            continue;
        }
        let t = field_mode(&w.space, &w.right[i], n, &shifted)?;
        out = out.plus(&t);
    }
    Ok(out)
}

/// `V_{-α_i}` on the Heisenberg part of the realization's Fock space.
pub fn screening_vertex_op(w: &WakimotoRealization, i: usize) -> Result<LatticeVertexOp> {
    let alpha: Vec<i64> = (0..w.alg.rank).map(|j| i64::from(j == i)).collect();
    let chi: Vec<Scalar> = (0..w.alg.rank)
        .map(|j| {
            let h: Vec<Scalar> = (0..w.alg.rank).map(|l| if l == j { Scalar::one() } else { Scalar::zero() }).collect();
            w.alg.root_on_h(&alpha, &h).neg()
        })
        .collect();
    LatticeVertexOp::new(&w.space, chi)
}

/// `[S_i, w_κ(J^a)_n] v` for every basis index `a`, `|n| ≤ cutoff`.
/// Returns the `(a, n)` with a nonzero commutator.
pub fn verify_intertwining(
    w: &WakimotoRealization,
    i: usize,
    cutoff: i32,
    vectors: &[FockVector],
) -> Result<Vec<(usize, i32, usize)>> {
    let mut bad = Vec::new();
    for (vi, v) in vectors.iter().enumerate() {
        let sv = first_kind_apply(w, i, v)?;
        for a in 0..w.alg.dim() {
            for n in -cutoff..=cutoff {
                let lhs = first_kind_apply(w, i, &w.act(a, n, v)?)?;
                let rhs = w.act(a, n, &sv)?;
                if lhs.poly != rhs.poly {
                    bad.push((a, n, vi));
                }
            }
        }
    }
    Ok(bad)
}
