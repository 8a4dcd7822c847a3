//! Root data and Chevalley structure constants for A1, A2, B2 and G2.
//!
//! The algebra is built from explicit matrices of a small faithful
//! representation. Root vectors for non-simple roots are produced by the rule
//! `e_β = [e_i, e_{β-α_i}] / (p+1)` with `i` the smallest index for which
//! `β-α_i` is a root and `p` the largest integer with `β-α_i-pα_i` a root.
//! `f_β` is then rescaled so that `[e_β, f_β]` is the coroot `h_β`. These
//! choices fix every sign downstream, in particular the polynomials of the
//! big-cell vector fields.
//!
//! Conventions: `a_ij = α_j(h_i)`, so `[h_i, e_j] = a_ij e_j`. The basis is
//! ordered `e_α` (α in [`LieAlgebraData::positive_roots`] order), then `h_i`,
//! then `f_α`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;


use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{invert, rref, Mat};
use crate::ring::Ring;
use crate::scalar::{q, Scalar, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AlgebraType {
    A1,
    A2,
    B2,
    G2,
}

impl FromStr for AlgebraType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A1" => Ok(AlgebraType::A1),
            "A2" => Ok(AlgebraType::A2),
            "B2" | "C2" => Ok(AlgebraType::B2),
            "G2" => Ok(AlgebraType::G2),
            _ => Err(Error::UnsupportedAlgebra(s.to_string())),
        }
    }
}

impl fmt::Display for AlgebraType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AlgebraType::A1 => "A1",
            AlgebraType::A2 => "A2",
            AlgebraType::B2 => "B2",
            AlgebraType::G2 => "G2",
        };
        f.write_str(s)
    }
}

/// Which invariant form is meant.
#[derive(Clone, Debug, PartialEq)]
pub enum FormLabel {
    /// Normalized so that long roots have squared length 2.
    Kappa0,
    /// The Killing form.
    KappaK,
    /// The critical form `-½ κ_K`.
    KappaC,
    /// `level · κ₀`; the level may be the formal parameter `k`.
    Generic(Scalar),
}

#[derive(Clone, Debug, PartialEq)]
pub struct InnerProduct {
    pub label: FormLabel,
    pub gram_on_h: Vec<Vec<Scalar>>,
    pub ef_pairing: Vec<Scalar>,
    /// Gram matrix on the whole Chevalley basis.
    pub full: Vec<Vec<Scalar>>,
}

/// Express matrices of the faithful representation in the Chevalley basis.
#[derive(Clone, Debug)]
struct Decomposer {
    entries: Vec<usize>,
    weights: Vec<Vec<Q>>,
}

#[derive(Clone, Debug)]
pub struct LieAlgebraData {
    pub kind: AlgebraType,
    pub rank: usize,
    pub cartan_matrix: Vec<Vec<i64>>,
    /// Δ₊ in the simple-root basis, sorted by height.
    pub positive_roots: Vec<Vec<i64>>,
    /// Indices into `positive_roots` in a convex (normal) order.
    pub convex_order: Vec<usize>,
    pub exponents: Vec<usize>,
    pub dual_coxeter: i64,
    /// ρ in the fundamental-weight basis.
    pub rho_weight: Vec<i64>,
    /// ρ∨ in the basis `h_i`.
    pub rho_covector: Vec<Q>,
    rep: Vec<Mat<Q>>,
    decomposer: Decomposer,
    structure: Vec<Vec<Vec<(usize, Q)>>>,
    killing: Vec<Vec<Q>>,
    root_index: HashMap<Vec<i64>, usize>,
}

fn unit(n: usize, i: usize, j: usize, c: i64) -> Mat<Q> {
    let mut m = Mat::zero(n);
    m.set(i, j, q(c));
    m
}

fn sum(ms: &[Mat<Q>]) -> Mat<Q> {
    ms.iter().skip(1).fold(ms[0].clone(), |a, b| a.plus(b))
}

fn diag(d: &[i64]) -> Mat<Q> {
    Mat::from_fn(d.len(), |i, j| if i == j { q(d[i]) } else { Q::zero() })
}

type SimpleGens = (Vec<Mat<Q>>, Vec<Mat<Q>>, Vec<Mat<Q>>);

/// Simple generators `(e_i, f_i, h_i)` of the chosen faithful representation.
fn simple_generators(kind: AlgebraType) -> SimpleGens {
    match kind {
        AlgebraType::A1 => (
            vec![unit(2, 0, 1, 1)],
            vec![unit(2, 1, 0, 1)],
            vec![diag(&[1, -1])],
        ),
        AlgebraType::A2 => (
            vec![unit(3, 0, 1, 1), unit(3, 1, 2, 1)],
            vec![unit(3, 1, 0, 1), unit(3, 2, 1, 1)],
            vec![diag(&[1, -1, 0]), diag(&[0, 1, -1])],
        ),
        // sp(4) on weights ε1, ε2, -ε2, -ε1; α1 = 2ε2 long, α2 = ε1-ε2 short.
        AlgebraType::B2 => (
            vec![unit(4, 1, 2, 1), sum(&[unit(4, 0, 1, 1), unit(4, 2, 3, -1)])],
            vec![unit(4, 2, 1, 1), sum(&[unit(4, 1, 0, 1), unit(4, 3, 2, -1)])],
            vec![diag(&[0, 1, -1, 0]), diag(&[1, -1, 1, -1])],
        ),
        // 7-dimensional representation, weights 2α1+α2, α1+α2, α1, 0, -α1,
        // -α1-α2, -2α1-α2; α1 short.
        AlgebraType::G2 => (
            vec![
                sum(&[unit(7, 0, 1, 1), unit(7, 2, 3, 1), unit(7, 3, 4, 1), unit(7, 5, 6, 1)]),
                sum(&[unit(7, 1, 2, 1), unit(7, 4, 5, 1)]),
            ],
            vec![
                sum(&[unit(7, 1, 0, 1), unit(7, 3, 2, 2), unit(7, 4, 3, 2), unit(7, 6, 5, 1)]),
                sum(&[unit(7, 2, 1, 1), unit(7, 5, 4, 1)]),
            ],
            vec![diag(&[1, -1, 2, 0, -2, 1, -1]), diag(&[0, 1, -1, 0, 1, -1, 0])],
        ),
    }
}

struct Tabulated {
    cartan: Vec<Vec<i64>>,
    roots: Vec<Vec<i64>>,
    convex: Vec<Vec<i64>>,
    exponents: Vec<usize>,
    dual_coxeter: i64,
}

fn tabulated(kind: AlgebraType) -> Tabulated {
    match kind {
        AlgebraType::A1 => Tabulated {
            cartan: vec![vec![2]],
            roots: vec![vec![1]],
            convex: vec![vec![1]],
            exponents: vec![1],
            dual_coxeter: 2,
        },
        AlgebraType::A2 => Tabulated {
            cartan: vec![vec![2, -1], vec![-1, 2]],
            roots: vec![vec![1, 0], vec![0, 1], vec![1, 1]],
            convex: vec![vec![1, 0], vec![1, 1], vec![0, 1]],
            exponents: vec![1, 2],
            dual_coxeter: 3,
        },
        AlgebraType::B2 => Tabulated {
            cartan: vec![vec![2, -1], vec![-2, 2]],
            roots: vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![1, 2]],
            convex: vec![vec![1, 0], vec![1, 1], vec![1, 2], vec![0, 1]],
            exponents: vec![1, 3],
            dual_coxeter: 3,
        },
        AlgebraType::G2 => Tabulated {
            cartan: vec![vec![2, -3], vec![-1, 2]],
            roots: vec![
                vec![1, 0],
                vec![0, 1],
                vec![1, 1],
                vec![2, 1],
                vec![3, 1],
                vec![3, 2],
            ],
            convex: vec![
                vec![1, 0],
                vec![3, 1],
                vec![2, 1],
                vec![3, 2],
                vec![1, 1],
                vec![0, 1],
            ],
            exponents: vec![1, 5],
            dual_coxeter: 4,
        },
    }
}

pub fn build_algebra(kind: AlgebraType) -> Result<LieAlgebraData> {
    let tab = tabulated(kind);
    let rank = tab.cartan.len();
    let nroots = tab.roots.len();
    let root_index: HashMap<Vec<i64>, usize> =
        tab.roots.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
    let convex_order = tab.convex.iter().map(|r| root_index[r]).collect();
    let (es, fs, hs) = simple_generators(kind);
    let n = es[0].dim();

    let mut e: Vec<Option<Mat<Q>>> = vec![None; nroots];
    let mut f: Vec<Option<Mat<Q>>> = vec![None; nroots];
    for i in 0..rank {
        e[i] = Some(es[i].clone());
        f[i] = Some(fs[i].clone());
    }
    let cartan = tab.cartan.clone();
    let beta_of = |beta: &[i64], h: &[Q]| -> Q {
        // β(Σ x_i h_i) = Σ_i x_i Σ_j β_j a_ij
        let mut s = Q::zero();
        for i in 0..rank {
            let mut v = 0;
            for j in 0..rank {
                v += beta[j] * cartan[i][j];
            }
            s += &h[i] * q(v);
        }
        s
    };
    for b in rank..nroots {
        let beta = &tab.roots[b];
        let (i, gamma) = (0..rank)
            .find_map(|i| {
                let mut g = beta.clone();
                g[i] -= 1;
                root_index.get(&g).map(|&gi| (i, gi))
            })
            .ok_or_else(|| Error::Internal(format!("root {beta:?} not reachable")))?;
        let mut p = 0;
        loop {
            let mut g = tab.roots[gamma].clone();
            g[i] -= p + 1;
            if root_index.contains_key(&g) {
                p += 1;
            } else {
                break;
            }
        }
        let c = q(1) / q(p + 1);
        let eb = es[i].bracket(e[gamma].as_ref().unwrap()).scale(&c);
        let fb = fs[i].bracket(f[gamma].as_ref().unwrap()).scale(&c);
        // [e_β, f_β] is a multiple of h_β; read off the multiple from β(·) = 2.
        let hb = eb.bracket(&fb);
        let coords = diag_in_h(&hb, &hs)?;
        let scale = beta_of(beta, &coords) / q(2);
        if scale.is_zero() {
            return Err(Error::Internal("degenerate root vector".into()));
        }
        e[b] = Some(eb);
        f[b] = Some(fb.scale(&scale.recip()));
    }

    let mut rep = Vec::with_capacity(2 * nroots + rank);
    rep.extend(e.into_iter().map(Option::unwrap));
    rep.extend(hs.iter().cloned());
    rep.extend(f.into_iter().map(Option::unwrap));
    let dim = rep.len();

    let decomposer = Decomposer::new(&rep, n)?;
    let mut structure = vec![vec![Vec::new(); dim]; dim];
    for a in 0..dim {
        for b in 0..dim {
            let m = rep[a].bracket(&rep[b]);
            let c = decomposer.decompose_checked(&m, &rep)?;
            structure[a][b] = c
                .into_iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .collect();
        }
    }

    let rho_covector = {
        // α_j(ρ∨) = Σ_i x_i a_ij = 1 for all j.
        let at: Vec<Vec<Q>> =
            (0..rank).map(|j| (0..rank).map(|i| q(tab.cartan[i][j])).collect()).collect();
        let inv = invert(&at).ok_or_else(|| Error::Internal("singular Cartan matrix".into()))?;
        (0..rank).map(|i| inv[i].iter().sum()).collect()
    };

    let mut alg = LieAlgebraData {
        kind,
        rank,
        cartan_matrix: tab.cartan,
        positive_roots: tab.roots,
        convex_order,
        exponents: tab.exponents,
        dual_coxeter: tab.dual_coxeter,
        rho_weight: vec![1; rank],
        rho_covector,
        rep,
        decomposer,
        structure,
        killing: Vec::new(),
        root_index,
    };
    alg.killing = alg.compute_killing();
    alg.verify()?;
    Ok(alg)
}

fn diag_in_h(m: &Mat<Q>, hs: &[Mat<Q>]) -> Result<Vec<Q>> {
    let n = m.dim();
    let rows: Vec<Vec<Q>> = (0..n)
        .map(|r| {
            let mut row: Vec<Q> = hs.iter().map(|h| h.get(r, r).clone()).collect();
            row.push(m.get(r, r).clone());
            row
        })
        .collect();
    crate::linalg::solve(
        &rows.iter().map(|r| r[..hs.len()].to_vec()).collect::<Vec<_>>(),
        &rows.iter().map(|r| r[hs.len()].clone()).collect::<Vec<_>>(),
        hs.len(),
    )
    .ok_or_else(|| Error::Internal("bracket of root vectors is not in the Cartan".into()))
}

impl Decomposer {
    fn new(basis: &[Mat<Q>], n: usize) -> Result<Self> {
        let dim = basis.len();
        // Columns = matrix entries, rows = basis elements; find independent entries.
        let cols: Vec<Vec<Q>> =
            (0..n * n).map(|c| basis.iter().map(|b| b.entries()[c].clone()).collect()).collect();
        // Pick entries greedily whose restriction to the basis is independent.
        let mut chosen: Vec<usize> = Vec::new();
        let mut acc: Vec<Vec<Q>> = Vec::new();
        for (c, col) in cols.iter().enumerate() {
            let mut trial = acc.clone();
            trial.push(col.clone());
            let mut t = trial.clone();
            if rref(&mut t, dim).len() == trial.len() {
                acc = trial;
                chosen.push(c);
                if chosen.len() == dim {
                    break;
                }
            }
        }
        if chosen.len() != dim {
            return Err(Error::Internal("representation is not faithful on the basis".into()));
        }
        // acc[r][a] = entry chosen[r] of basis a; weights = acc^{-1} so x = weights · entries.
        let weights =
            invert(&acc).ok_or_else(|| Error::Internal("singular entry selection".into()))?;
        Ok(Decomposer { entries: chosen, weights })
    }

    fn decompose<R: Ring>(&self, m: &Mat<R>) -> Vec<R> {
        let vals: Vec<&R> = self.entries.iter().map(|&c| &m.entries()[c]).collect();
        self.weights
            .iter()
            .map(|row| {
                let mut s = R::zero();
                for (w, v) in row.iter().zip(&vals) {
                    if !w.is_zero() && !v.is_zero() {
                        s.add_to(&v.scaled(w));
                    }
                }
                s
            })
            .collect()
    }

    fn decompose_checked<R: Ring>(&self, m: &Mat<R>, basis: &[Mat<Q>]) -> Result<Vec<R>> {
        let x = self.decompose(m);
        let mut back = Mat::<R>::zero(m.dim());
        for (b, c) in basis.iter().zip(&x) {
            if c.is_zero() {
                continue;
            }
            back = back.plus(&b.map(|v| c.scaled(v)));
        }
        if &back != m {
            return Err(Error::Internal("matrix is not in the image of the Lie algebra".into()));
        }
        Ok(x)
    }
}

impl LieAlgebraData {
    pub fn dim(&self) -> usize {
        self.rep.len()
    }

    pub fn n_pos(&self) -> usize {
        self.positive_roots.len()
    }

    pub fn rep_dim(&self) -> usize {
        self.rep[0].dim()
    }

    pub fn e(&self, root: usize) -> usize {
        root
    }

    pub fn h(&self, i: usize) -> usize {
        self.n_pos() + i
    }

    pub fn f(&self, root: usize) -> usize {
        self.n_pos() + self.rank + root
    }

    pub fn root_of(&self, coords: &[i64]) -> Option<usize> {
        self.root_index.get(coords).copied()
    }

    pub fn height(&self, root: usize) -> i64 {
        self.positive_roots[root].iter().sum()
    }

    /// Weight of a basis element in the simple-root basis.
    pub fn weight(&self, a: usize) -> Vec<i64> {
        let n = self.n_pos();
        if a < n {
            self.positive_roots[a].clone()
        } else if a < n + self.rank {
            vec![0; self.rank]
        } else {
            self.positive_roots[a - n - self.rank].iter().map(|x| -x).collect()
        }
    }

    /// Principal degree (height of the weight) of a basis element.
    pub fn principal_degree(&self, a: usize) -> i64 {
        self.weight(a).iter().sum()
    }

    pub fn label(&self, a: usize) -> String {
        let n = self.n_pos();
        let coords = |r: &[i64]| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        if a < n {
            format!("e({})", coords(&self.positive_roots[a]))
        } else if a < n + self.rank {
            format!("h{}", a - n + 1)
        } else {
            format!("f({})", coords(&self.positive_roots[a - n - self.rank]))
        }
    }

    pub fn index_of_label(&self, label: &str) -> Option<usize> {
        (0..self.dim()).find(|&a| self.label(a) == label)
    }

    /// β(h) for a root given in simple-root coordinates and h in the `h_i` basis.
    pub fn root_on_h<R: Ring>(&self, beta: &[i64], h: &[R]) -> R {
        let mut s = R::zero();
        for i in 0..self.rank {
            let v: i64 = (0..self.rank).map(|j| beta[j] * self.cartan_matrix[i][j]).sum();
            if v != 0 {
                s.add_to(&h[i].times(&R::from_i64(v)));
            }
        }
        s
    }

    pub fn bracket_basis(&self, a: usize, b: usize) -> &[(usize, Q)] {
        &self.structure[a][b]
    }

    /// Lie bracket of dense coordinate vectors over any ring containing Q.
    pub fn bracket<R: Ring>(&self, x: &[R], y: &[R]) -> Vec<R> {
        let mut out = vec![R::zero(); self.dim()];
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if yb.is_zero() {
                    continue;
                }
                let p = xa.times(yb);
                for (c, s) in &self.structure[a][b] {
                    out[*c].add_to(&p.scaled(s));
                }
            }
        }
        out
    }

    pub fn basis_vec<R: Ring>(&self, a: usize) -> Vec<R> {
        let mut v = vec![R::zero(); self.dim()];
        v[a] = R::one();
        v
    }

    pub fn matrix(&self, a: usize) -> &Mat<Q> {
        &self.rep[a]
    }

    pub fn to_matrix<R: Ring>(&self, x: &[R]) -> Mat<R> {
        let mut m = Mat::<R>::zero(self.rep_dim());
        for (c, b) in x.iter().zip(&self.rep) {
            if c.is_zero() {
                continue;
            }
            m = m.plus(&b.map(|v| c.scaled(v)));
        }
        m
    }

    /// Chevalley coordinates of a representation matrix; fails on non-Lie residue.
    pub fn from_matrix<R: Ring>(&self, m: &Mat<R>) -> Result<Vec<R>> {
        self.decomposer.decompose_checked(m, &self.rep)
    }

    /// Chevalley coordinates read off from a fixed set of matrix entries,
    /// without checking that the matrix lies in the image.
    pub fn from_matrix_unchecked<R: Ring>(&self, m: &Mat<R>) -> Vec<R> {
        self.decomposer.decompose(m)
    }

    fn compute_killing(&self) -> Vec<Vec<Q>> {
        let dim = self.dim();
        let ad: Vec<Vec<Vec<Q>>> = (0..dim)
            .map(|a| {
                let mut m = vec![vec![Q::zero(); dim]; dim];
                for b in 0..dim {
                    for (c, s) in &self.structure[a][b] {
                        m[*c][b] = s.clone();
                    }
                }
                m
            })
            .collect();
        let mut k = vec![vec![Q::zero(); dim]; dim];
        for a in 0..dim {
            for b in 0..dim {
                let mut t = Q::zero();
                for i in 0..dim {
                    for j in 0..dim {
                        if !ad[a][i][j].is_zero() && !ad[b][j][i].is_zero() {
                            t += &ad[a][i][j] * &ad[b][j][i];
                        }
                    }
                }
                k[a][b] = t;
            }
        }
        k
    }

    pub fn killing(&self, a: usize, b: usize) -> Q {
        self.killing[a][b].clone()
    }

    pub fn kappa0(&self, a: usize, b: usize) -> Q {
        &self.killing[a][b] / q(2 * self.dual_coxeter)
    }

    /// κ₀ on dense vectors.
    pub fn kappa0_vec<R: Ring>(&self, x: &[R], y: &[R]) -> R {
        let mut s = R::zero();
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                let k = self.kappa0(a, b);
                if !k.is_zero() && !yb.is_zero() {
                    s.add_to(&xa.times(yb).scaled(&k));
                }
            }
        }
        s
    }

    /// Factor `c` with `form = c · κ₀`.
    pub fn form_scale(&self, label: &FormLabel) -> Scalar {
        match label {
            FormLabel::Kappa0 => Scalar::one(),
            FormLabel::KappaK => Scalar::int(2 * self.dual_coxeter),
            FormLabel::KappaC => Scalar::int(-self.dual_coxeter),
            FormLabel::Generic(k) => k.clone(),
        }
    }

    pub fn inner_product(&self, label: FormLabel) -> InnerProduct {
        let s = self.form_scale(&label);
        let dim = self.dim();
        let full: Vec<Vec<Scalar>> = (0..dim)
            .map(|a| (0..dim).map(|b| s.mul_q(&self.kappa0(a, b))).collect())
            .collect();
        let gram_on_h = (0..self.rank)
            .map(|i| (0..self.rank).map(|j| full[self.h(i)][self.h(j)].clone()).collect())
            .collect();
        let ef_pairing = (0..self.rank).map(|i| full[self.e(i)][self.f(i)].clone()).collect();
        InnerProduct { label, gram_on_h, ef_pairing, full }
    }

    /// `-Σ_{α∈Δ₊} α(h_i) α(h_j)`, an independent expression for κ_c on h.
    pub fn critical_form_from_roots(&self) -> Vec<Vec<Q>> {
        let r = self.rank;
        let mut g = vec![vec![Q::zero(); r]; r];
        for beta in &self.positive_roots {
            let vals: Vec<Q> = (0..r)
                .map(|i| q((0..r).map(|j| beta[j] * self.cartan_matrix[i][j]).sum()))
                .collect();
            for i in 0..r {
                for j in 0..r {
                    g[i][j] -= &vals[i] * &vals[j];
                }
            }
        }
        g
    }

    /// `p_{-1} = Σ f_i` as a dense vector.
    pub fn p_minus1<R: Ring>(&self) -> Vec<R> {
        let mut v = vec![R::zero(); self.dim()];
        for i in 0..self.rank {
            v[self.f(i)] = R::one();
        }
        v
    }

    /// `p_1` completing `{p_{-1}, 2ρ∨, p_1}` to an sl2-triple.
    pub fn p_1<R: Ring>(&self) -> Vec<R> {
        let mut v = vec![R::zero(); self.dim()];
        for i in 0..self.rank {
            v[self.e(i)] = R::from_q(&(&self.rho_covector[i] * q(2)));
        }
        v
    }

    pub fn rho_vec<R: Ring>(&self) -> Vec<R> {
        let mut v = vec![R::zero(); self.dim()];
        for i in 0..self.rank {
            v[self.h(i)] = R::from_q(&self.rho_covector[i]);
        }
        v
    }

    /// Check every invariant promised by the type.
    pub fn verify(&self) -> Result<()> {
        let dim = self.dim();
        let expected_roots = match self.kind {
            AlgebraType::A1 => 1,
            AlgebraType::A2 => 3,
            AlgebraType::B2 => 4,
            AlgebraType::G2 => 6,
        };
        if self.n_pos() != expected_roots || dim != 2 * expected_roots + self.rank {
            return Err(Error::Internal("wrong number of roots".into()));
        }
        let fail = |m: &str| Err(Error::Internal(format!("{}: {m}", self.kind)));
        for a in 0..dim {
            for b in 0..dim {
                let x = self.bracket(&self.basis_vec::<Q>(a), &self.basis_vec(b));
                let y = self.bracket(&self.basis_vec::<Q>(b), &self.basis_vec(a));
                if x.iter().zip(&y).any(|(u, v)| u + v != Q::zero()) {
                    return fail("antisymmetry");
                }
            }
        }
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    let ea = self.basis_vec::<Q>(a);
                    let eb = self.basis_vec::<Q>(b);
                    let ec = self.basis_vec::<Q>(c);
                    let t1 = self.bracket(&ea, &self.bracket(&eb, &ec));
                    let t2 = self.bracket(&eb, &self.bracket(&ec, &ea));
                    let t3 = self.bracket(&ec, &self.bracket(&ea, &eb));
                    if (0..dim).any(|i| !(&t1[i] + &t2[i] + &t3[i]).is_zero()) {
                        return fail("Jacobi identity");
                    }
                }
            }
        }
        for i in 0..self.rank {
            for j in 0..self.rank {
                let x = self.bracket(&self.basis_vec::<Q>(self.h(i)), &self.basis_vec(self.e(j)));
                let mut want = vec![Q::zero(); dim];
                want[self.e(j)] = q(self.cartan_matrix[i][j]);
                if x != want {
                    return fail("Cartan matrix");
                }
            }
            if self.root_on_h(&self.positive_roots[i], &self.rho_covector) != Q::one() {
                return fail("α_i(ρ∨) ≠ 1");
            }
        }
        for r in 0..self.n_pos() {
            let x = self.bracket(&self.basis_vec::<Q>(self.e(r)), &self.basis_vec(self.f(r)));
            let h: Vec<Q> = (0..self.rank).map(|i| x[self.h(i)].clone()).collect();
            if self.root_on_h(&self.positive_roots[r], &h) != q(2) {
                return fail("[e_β, f_β] is not the coroot");
            }
        }
        // κ_K(h,h') = 2 Σ α(h) α(h')
        let crit = self.critical_form_from_roots();
        for i in 0..self.rank {
            for j in 0..self.rank {
                if self.killing(self.h(i), self.h(j)) != -&crit[i][j] * q(2) {
                    return fail("Killing form on h");
                }
            }
        }
        // κ₀ normalization: the highest (long) root θ has κ₀(h_θ, h_θ) = 2.
        let theta = self.n_pos() - 1;
        let x = self.bracket(&self.basis_vec::<Q>(self.e(theta)), &self.basis_vec(self.f(theta)));
        if self.kappa0_vec(&x, &x) != q(2) {
            return fail("κ₀ normalization (dual Coxeter number)");
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut constants = Vec::new();
        for a in 0..self.dim() {
            for b in (a + 1)..self.dim() {
                let s = &self.structure[a][b];
                if s.is_empty() {
                    continue;
                }
                let result: serde_json::Map<String, serde_json::Value> = s
                    .iter()
                    .map(|(c, v)| (self.label(*c), serde_json::Value::String(v.to_string())))
                    .collect();
                constants.push(serde_json::json!({
                    "x": self.label(a),
                    "y": self.label(b),
                    "bracket": result,
                }));
            }
        }
        serde_json::json!({
            "type": self.kind.to_string(),
            "rank": self.rank,
            "cartan_matrix": self.cartan_matrix,
            "positive_roots": self.positive_roots,
            "convex_order": self.convex_order,
            "exponents": self.exponents,
            "dual_coxeter": self.dual_coxeter,
            "rho_weight": self.rho_weight,
            "rho_covector": self.rho_covector.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "basis": (0..self.dim()).map(|a| self.label(a)).collect::<Vec<_>>(),
            "structure_constants": constants,
        })
    }
}

/// Shorthand used all over the test-suite.
pub fn algebra(kind: AlgebraType) -> LieAlgebraData {
    build_algebra(kind).expect("tabulated algebra data is consistent")
}
