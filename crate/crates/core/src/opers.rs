//! Opers and Miura opers on the formal disc.
//!
//! A connection `∂_t + A(t)` is described by the Chevalley coordinates of
//! `A`, one truncated series per basis element of g. Oper payloads omit the
//! fixed `p₋₁` part: the connection is `∂_t + p₋₁ + v(t)`.
//!
//! Truncation orders are tracked per coordinate. A gauge step that
//! differentiates a coefficient loses one order, so canonical coordinates of
//! higher principal degree come out known to a lower order than the input.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::lie::{AlgebraType, LieAlgebraData};
use crate::linalg::{invert, nullspace, Mat};
use crate::ring::Ring;
use crate::scalar::{q, qf, Scalar, Q};
use crate::series::{schwarzian, TruncatedSeries, EXACT};

pub type Series<R = Q> = TruncatedSeries<R>;

/// A g-valued series in Chevalley coordinates.
pub type LieSeries<R = Q> = Vec<Series<R>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperForm {
    /// `v(t) ∈ b((t))`.
    Raw,
    /// `v(t)` valued in the transversal `V_can = ker ad p₁`.
    Canonical,
    /// `u(t) ∈ h((t))`.
    Miura,
}

impl OperForm {
    pub fn name(self) -> &'static str {
        match self {
            OperForm::Raw => "raw",
            OperForm::Canonical => "canonical",
            OperForm::Miura => "miura",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(OperForm::Raw),
            "canonical" => Ok(OperForm::Canonical),
            "miura" => Ok(OperForm::Miura),
            _ => Err(Error::InvalidInput(format!("unknown oper form `{s}`"))),
        }
    }
}

/// `∂_t + p₋₁ + payload(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperConnection<R = Q> {
    pub kind: AlgebraType,
    pub form: OperForm,
    pub payload: LieSeries<R>,
}

/// `exp(U(t))` with `U(t) ∈ n((t))`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeElement<R = Q> {
    pub u: LieSeries<R>,
}

/// Where the derivative term of a gauge transformation is placed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GaugeConvention {
    /// `gAg⁻¹ − (∂_t g)g⁻¹`, the conjugation `g ∘ (∂_t + A) ∘ g⁻¹`.
    #[default]
    Conjugation,
    /// `gAg⁻¹ − g⁻¹∂_t g`.
    LeftDerivative,
}

fn zeros<R: Ring>(n: usize) -> LieSeries<R> {
    vec![Series::zero(EXACT); n]
}

fn constant_vec<R: Ring>(x: &[Q]) -> LieSeries<R> {
    x.iter().map(|c| Series::constant(R::from_q(c), EXACT)).collect()
}

fn vadd<R: Ring>(a: &[Series<R>], b: &[Series<R>]) -> LieSeries<R> {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

fn vsub<R: Ring>(a: &[Series<R>], b: &[Series<R>]) -> LieSeries<R> {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

fn vscale<R: Ring>(a: &[Series<R>], c: &Q) -> LieSeries<R> {
    a.iter().map(|x| Ring::scaled(x, c)).collect()
}

fn exactly_zero<R: Ring>(a: &[Series<R>]) -> bool {
    a.iter().all(Ring::is_zero)
}

/// No coefficient inside the known window is nonzero.
fn vanishes<R: Ring>(a: &[Series<R>]) -> bool {
    a.iter().all(|x| x.is_zero())
}

/// Equality of the coefficients both sides know.
pub fn agree<R: Ring>(a: &[Series<R>], b: &[Series<R>]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| series_agree(x, y))
}

pub fn series_agree<R: Ring>(x: &Series<R>, y: &Series<R>) -> bool {
    let t = x.truncation().min(y.truncation());
    x.truncate(t) == y.truncate(t)
}

/// Smallest truncation order among the coordinates.
pub fn min_truncation<R: Ring>(a: &[Series<R>]) -> i32 {
    a.iter().map(|s| s.truncation()).min().unwrap_or(EXACT)
}

fn coxeter_number(alg: &LieAlgebraData) -> usize {
    alg.positive_roots.iter().map(|r| r.iter().sum::<i64>()).max().unwrap_or(0) as usize + 1
}

/// Basis elements of principal degree `d` (the Cartan for `d = 0`).
fn degree_indices(alg: &LieAlgebraData, d: i64) -> Vec<usize> {
    (0..alg.dim()).filter(|&a| alg.principal_degree(a) == d).collect()
}

fn in_borel<R: Ring>(alg: &LieAlgebraData, v: &[Series<R>]) -> bool {
    (0..alg.n_pos()).all(|r| Ring::is_zero(&v[alg.f(r)]))
}

fn in_cartan<R: Ring>(alg: &LieAlgebraData, v: &[Series<R>]) -> bool {
    (0..alg.dim()).filter(|&a| alg.principal_degree(a) != 0).all(|a| Ring::is_zero(&v[a]))
}

/// Replace the components outside `keep` by exact zeros, provided none of
/// them has a known nonzero coefficient.
fn restrict<R: Ring>(
    alg: &LieAlgebraData,
    mut v: LieSeries<R>,
    keep: impl Fn(i64) -> bool,
    what: &str,
) -> Result<LieSeries<R>> {
    for (a, s) in v.iter_mut().enumerate() {
        if keep(alg.principal_degree(a)) {
            continue;
        }
        if !s.is_zero() {
            return Err(Error::InvalidInput(format!("payload component {} must vanish in {what}", alg.label(a))));
        }
        *s = Series::zero(EXACT);
    }
    Ok(v)
}

fn check_len<R>(alg: &LieAlgebraData, v: &[Series<R>]) -> Result<()> {
    if v.len() != alg.dim() {
        return Err(Error::InvalidInput(format!("expected {} coordinates, got {}", alg.dim(), v.len())));
    }
    Ok(())
}

/// The decomposition `b_i = [p₋₁, n_{i+1}] ⊕ V_can,i` for every principal degree.
pub struct Transversal {
    levels: Vec<Level>,
    /// `(degree, position in that level)` of the generator `p_j` for each exponent.
    slots: Vec<(usize, usize)>,
    dim: usize,
}

struct Level {
    rows: Vec<usize>,
    lift: Vec<usize>,
    vcan: Vec<Vec<Q>>,
    inv: Vec<Vec<Q>>,
}

impl Transversal {
    pub fn new(alg: &LieAlgebraData) -> Result<Self> {
        let dim = alg.dim();
        let h = coxeter_number(alg);
        let pm1: Vec<Q> = alg.p_minus1();
        let p1: Vec<Q> = alg.p_1();
        let mut levels = Vec::with_capacity(h);
        for i in 0..h {
            let rows = degree_indices(alg, i as i64);
            let lift = degree_indices(alg, i as i64 + 1);
            let vcan = if i == 0 {
                Vec::new()
            } else if i == 1 {
                vec![p1.clone()]
            } else {
                let eqs: Vec<Vec<Q>> = (0..dim)
                    .map(|c| rows.iter().map(|&a| alg.bracket(&p1, &alg.basis_vec::<Q>(a))[c].clone()).collect())
                    .collect();
                nullspace(&eqs, rows.len())
                    .into_iter()
                    .map(|k| {
                        let lead = k.iter().find(|x| !Ring::is_zero(*x)).cloned().unwrap_or_else(|| q(1));
                        let mut full = vec![q(0); dim];
                        for (&a, x) in rows.iter().zip(&k) {
                            full[a] = x / &lead;
                        }
                        full
                    })
                    .collect()
            };
            let mut cols: Vec<Vec<Q>> = lift.iter().map(|&b| alg.bracket(&pm1, &alg.basis_vec::<Q>(b))).collect();
            cols.extend(vcan.iter().cloned());
            if cols.len() != rows.len() {
                return Err(Error::Internal(format!("degree {i}: transversal has the wrong dimension")));
            }
            let m: Vec<Vec<Q>> = rows.iter().map(|&r| cols.iter().map(|c| c[r].clone()).collect()).collect();
            let inv = if m.is_empty() {
                Vec::new()
            } else {
                invert(&m).ok_or_else(|| Error::Internal(format!("degree {i}: ad p₋₁ is not injective")))?
            };
            levels.push(Level { rows, lift, vcan, inv });
        }
        let mut next = vec![0usize; h];
        let mut slots = Vec::new();
        for &d in &alg.exponents {
            slots.push((d, next[d]));
            next[d] += 1;
        }
        for (d, lvl) in levels.iter().enumerate() {
            if lvl.vcan.len() != next[d] {
                return Err(Error::Internal(format!("degree {d}: ker ad p₁ does not match the exponents")));
            }
        }
        Ok(Transversal { levels, slots, dim })
    }

    pub fn degrees(&self) -> usize {
        self.levels.len()
    }

    /// Generator `p_j` of `V_can` for the `j`-th exponent.
    pub fn generator(&self, j: usize) -> &[Q] {
        let (d, k) = self.slots[j];
        &self.levels[d].vcan[k]
    }

    /// Split the degree-`i` part of `a` as `[p₋₁, X] + Σ c_k p_k`; returns `(X, c)`.
    fn split<R: Ring>(&self, i: usize, a: &[Series<R>]) -> (LieSeries<R>, Vec<Series<R>>) {
        let lvl = &self.levels[i];
        let comb = |row: &[Q]| {
            let mut s = Series::zero(EXACT);
            for (w, &r) in row.iter().zip(&lvl.rows) {
                if !Ring::is_zero(w) && !Ring::is_zero(&a[r]) {
                    s = s.add(&Ring::scaled(&a[r], w));
                }
            }
            s
        };
        let sol: Vec<Series<R>> = lvl.inv.iter().map(|row| comb(row)).collect();
        let mut x = zeros(self.dim);
        for (&b, s) in lvl.lift.iter().zip(&sol) {
            x[b] = s.clone();
        }
        (x, sol[lvl.lift.len()..].to_vec())
    }

    /// Canonical coordinates `v_j` of a `V_can`-valued payload.
    pub fn coordinates<R: Ring>(&self, a: &[Series<R>]) -> Result<Vec<Series<R>>> {
        let mut per_level = Vec::with_capacity(self.levels.len());
        for i in 0..self.levels.len() {
            let (x, c) = self.split(i, a);
            if !vanishes(&x) {
                return Err(Error::InvalidInput(format!("payload has a non-canonical component in degree {i}")));
            }
            per_level.push(c);
        }
        Ok(self.slots.iter().map(|&(d, k)| per_level[d][k].clone()).collect())
    }

    /// `Σ_j v_j p_j`.
    pub fn payload<R: Ring>(&self, coords: &[Series<R>]) -> LieSeries<R> {
        let mut out = zeros(self.dim);
        for (j, c) in coords.iter().enumerate() {
            for (a, w) in self.generator(j).iter().enumerate() {
                if !Ring::is_zero(w) {
                    out[a] = out[a].add(&Ring::scaled(c, w));
                }
            }
        }
        out
    }
}

fn cartan_inverse(alg: &LieAlgebraData) -> Vec<Vec<Q>> {
    let rows: Vec<Vec<Q>> = alg.cartan_matrix.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
    invert(&rows).expect("Cartan matrices are invertible")
}

impl<R: Ring> OperConnection<R> {
    /// `∂_t + p₋₁ + v(t)` with `v` valued in `b`.
    pub fn raw(alg: &LieAlgebraData, v: LieSeries<R>) -> Result<Self> {
        check_len(alg, &v)?;
        let v = restrict(alg, v, |d| d >= 0, "a raw oper")?;
        Ok(OperConnection { kind: alg.kind, form: OperForm::Raw, payload: v })
    }

    /// Canonical oper `∂_t + p₋₁ + Σ_j v_j(t) p_j`.
    pub fn canonical(alg: &LieAlgebraData, coords: Vec<Series<R>>) -> Result<Self> {
        if coords.len() != alg.rank {
            return Err(Error::InvalidInput(format!("expected {} canonical coordinates", alg.rank)));
        }
        let tv = Transversal::new(alg)?;
        Ok(OperConnection { kind: alg.kind, form: OperForm::Canonical, payload: tv.payload(&coords) })
    }

    /// Miura oper `∂_t + p₋₁ + u(t)` from the coordinates `u_i = α_i(u)`.
    pub fn miura(alg: &LieAlgebraData, u: Vec<Series<R>>) -> Result<Self> {
        if u.len() != alg.rank {
            return Err(Error::InvalidInput(format!("expected {} Miura coordinates", alg.rank)));
        }
        // u_k = Σ_i a_ik x_i for u = Σ_i x_i h_i.
        let inv = cartan_inverse(alg);
        let mut payload = zeros(alg.dim());
        for i in 0..alg.rank {
            let mut x = Series::zero(EXACT);
            for (k, uk) in u.iter().enumerate() {
                let w = &inv[k][i];
                if !Ring::is_zero(w) {
                    x = x.add(&Ring::scaled(uk, w));
                }
            }
            payload[alg.h(i)] = x;
        }
        Ok(OperConnection { kind: alg.kind, form: OperForm::Miura, payload })
    }

    /// `u_i = α_i(u)` of a Miura oper.
    pub fn miura_coords(&self, alg: &LieAlgebraData) -> Result<Vec<Series<R>>> {
        if self.form != OperForm::Miura {
            return Err(Error::InvalidInput("not a Miura oper".into()));
        }
        Ok((0..alg.rank)
            .map(|k| {
                let mut s = Series::zero(EXACT);
                for i in 0..alg.rank {
                    let a = alg.cartan_matrix[i][k];
                    if a != 0 {
                        s = s.add(&Ring::scaled(&self.payload[alg.h(i)], &q(a)));
                    }
                }
                s
            })
            .collect())
    }

    /// Coordinates `v_j` along the generators `p_j` of `V_can`.
    pub fn canonical_coords(&self, alg: &LieAlgebraData) -> Result<Vec<Series<R>>> {
        if self.form != OperForm::Canonical {
            return Err(Error::InvalidInput("not a canonical oper".into()));
        }
        Transversal::new(alg)?.coordinates(&self.payload)
    }

    /// The full connection matrix `p₋₁ + payload`.
    pub fn connection(&self, alg: &LieAlgebraData) -> LieSeries<R> {
        vadd(&constant_vec(&alg.p_minus1::<Q>()), &self.payload)
    }

    pub fn truncation(&self) -> i32 {
        min_truncation(&self.payload)
    }
}

impl<R: Ring> GaugeElement<R> {
    pub fn identity(alg: &LieAlgebraData) -> Self {
        GaugeElement { u: zeros(alg.dim()) }
    }

    pub fn from_log(alg: &LieAlgebraData, u: LieSeries<R>) -> Result<Self> {
        check_len(alg, &u)?;
        if (alg.n_pos()..alg.dim()).any(|a| !Ring::is_zero(&u[a])) {
            return Err(Error::InvalidInput("gauge logarithm must lie in n".into()));
        }
        Ok(GaugeElement { u })
    }

    /// `exp(U)` in the faithful representation.
    pub fn matrix(&self, alg: &LieAlgebraData) -> Mat<Series<R>> {
        alg.to_matrix(&self.u).exp_nilpotent()
    }

    pub fn inverse(&self) -> Self {
        GaugeElement { u: self.u.iter().map(|s| s.neg()).collect() }
    }

    /// The product `self · other`.
    pub fn compose(&self, alg: &LieAlgebraData, other: &Self) -> Result<Self> {
        let m = self.matrix(alg).times(&other.matrix(alg));
        Ok(GaugeElement { u: project(alg, &m.log_unipotent())? })
    }

    /// Identity up to the known truncation.
    pub fn is_identity(&self) -> bool {
        vanishes(&self.u)
    }
}

/// Chevalley coordinates of a matrix-valued series, failing if the matrix
/// has a known coefficient outside the image of g.
fn project<R: Ring>(alg: &LieAlgebraData, m: &Mat<Series<R>>) -> Result<LieSeries<R>> {
    let x = alg.from_matrix_unchecked(m);
    let back = alg.to_matrix(&x);
    if !back.minus(m).entries().iter().all(|e| e.is_zero()) {
        return Err(Error::Internal("gauge result is not in the image of the Lie algebra".into()));
    }
    Ok(x)
}

fn derivative_matrix<R: Ring>(m: &Mat<Series<R>>) -> Mat<Series<R>> {
    m.map(|e| e.derivative())
}

/// `g · (∂_t + A)` for a full connection `A`, computed in the representation.
pub fn gauge_connection<R: Ring>(
    alg: &LieAlgebraData,
    g: &GaugeElement<R>,
    a: &[Series<R>],
    convention: GaugeConvention,
) -> Result<LieSeries<R>> {
    check_len(alg, a)?;
    let gm = g.matrix(alg);
    let ginv = g.inverse().matrix(alg);
    let dg = derivative_matrix(&gm);
    let conj = gm.times(&alg.to_matrix(a)).times(&ginv);
    let drift = match convention {
        GaugeConvention::Conjugation => dg.times(&ginv),
        GaugeConvention::LeftDerivative => ginv.times(&dg),
    };
    project(alg, &conj.minus(&drift))
}

/// `g · (∂_t + p₋₁ + v)` as a raw oper.
pub fn gauge_transform<R: Ring>(
    alg: &LieAlgebraData,
    g: &GaugeElement<R>,
    oper: &OperConnection<R>,
) -> Result<OperConnection<R>> {
    gauge_transform_with(alg, g, oper, GaugeConvention::Conjugation)
}

pub fn gauge_transform_with<R: Ring>(
    alg: &LieAlgebraData,
    g: &GaugeElement<R>,
    oper: &OperConnection<R>,
    convention: GaugeConvention,
) -> Result<OperConnection<R>> {
    let out = gauge_connection(alg, g, &oper.connection(alg), convention)?;
    let v = vsub(&out, &constant_vec(&alg.p_minus1::<Q>()));
    let v = restrict(alg, v, |d| d >= 0, "a gauge transform by N")
        .map_err(|e| Error::Internal(e.to_string()))?;
    OperConnection::raw(alg, v)
}

/// `exp(ad Y)A − Σ_k (ad Y)^k(∂_t Y)/(k+1)!`, the conjugation action of `exp(Y)`.
fn ad_gauge<R: Ring>(alg: &LieAlgebraData, y: &[Series<R>], a: &[Series<R>]) -> LieSeries<R> {
    let mut out = a.to_vec();
    let mut term = a.to_vec();
    for k in 1.. {
        term = vscale(&alg.bracket(y, &term), &qf(1, k));
        if exactly_zero(&term) {
            break;
        }
        out = vadd(&out, &term);
    }
    let mut term: LieSeries<R> = y.iter().map(|s| s.derivative()).collect();
    for k in 1.. {
        if exactly_zero(&term) {
            break;
        }
        out = vsub(&out, &term);
        term = vscale(&alg.bracket(y, &term), &qf(1, k + 1));
    }
    out
}

/// Reduce a raw oper to canonical form: returns the canonical oper and the
/// gauge element `g` with `g · ∇ = ∇_can`.
pub fn canonical_form<R: Ring>(
    alg: &LieAlgebraData,
    oper: &OperConnection<R>,
) -> Result<(OperConnection<R>, GaugeElement<R>)> {
    check_len(alg, &oper.payload)?;
    if !in_borel(alg, &oper.payload) {
        return Err(Error::InvalidInput("oper payload must lie in b".into()));
    }
    let tv = Transversal::new(alg)?;
    if oper.form == OperForm::Canonical {
        tv.coordinates(&oper.payload)?;
        return Ok((oper.clone(), GaugeElement::identity(alg)));
    }
    let pm1 = constant_vec::<R>(&alg.p_minus1::<Q>());
    let mut a = vadd(&pm1, &oper.payload);
    let mut steps = Vec::new();
    // Degree i is fixed by a step in degree i+1 and untouched afterwards.
    for i in 0..tv.degrees() {
        let (x, _) = tv.split(i, &a);
        if exactly_zero(&x) {
            continue;
        }
        a = ad_gauge(alg, &x, &a);
        steps.push(x);
    }
    let payload = vsub(&a, &pm1);
    let coords = tv.coordinates(&payload).map_err(|e| Error::Internal(format!("canonical reduction: {e}")))?;
    let mut gm = Mat::<Series<R>>::identity(alg.rep_dim());
    for y in &steps {
        gm = alg.to_matrix(y).exp_nilpotent().times(&gm);
    }
    let g = GaugeElement { u: project(alg, &gm.log_unipotent())? };
    let canon = OperConnection { kind: alg.kind, form: OperForm::Canonical, payload: tv.payload(&coords) };
    Ok((canon, g))
}

/// The Miura transformation: canonical form of a Miura oper.
pub fn miura_map<R: Ring>(alg: &LieAlgebraData, oper: &OperConnection<R>) -> Result<OperConnection<R>> {
    if oper.form != OperForm::Miura || !in_cartan(alg, &oper.payload) {
        return Err(Error::InvalidInput("miura_map needs an h-valued Miura oper".into()));
    }
    Ok(canonical_form(alg, oper)?.0)
}

/// Transport `∂_t + p₋₁ + v(t)` to the coordinate `s` with `t = φ(s)`,
/// followed by the gauge `ρ∨(φ′(s))` that restores the `p₋₁` term:
/// the degree-`d` part becomes `φ′^{d+1} v_d(φ)` and `−ρ∨ φ″/φ′` is added.
pub fn transport_payload(alg: &LieAlgebraData, v: &[Series], phi: &Series) -> Result<LieSeries> {
    check_len(alg, v)?;
    if phi.valuation() != 1 {
        let msg = if phi.valuation() > 1 { "φ′(0) = 0" } else { "φ(0) must vanish" };
        return Err(Error::InvalidInput(format!("coordinate change: {msg}")));
    }
    let d1 = phi.derivative();
    let mut out = zeros(alg.dim());
    for (a, va) in v.iter().enumerate() {
        if Ring::is_zero(va) {
            continue;
        }
        let d = alg.principal_degree(a);
        if d < 0 {
            return Err(Error::InvalidInput("payload must lie in b".into()));
        }
        out[a] = va.compose(phi)?.mul(&d1.pow(d as u32 + 1));
    }
    let log_d = d1.derivative().div(&d1)?;
    let rho: Vec<Q> = alg.rho_vec();
    for i in 0..alg.rank {
        let a = alg.h(i);
        out[a] = out[a].sub(&log_d.scale(&rho[a]));
    }
    Ok(out)
}

/// Change of coordinate `t = φ(s)` for canonical, Miura or raw opers.
pub fn change_coordinates(alg: &LieAlgebraData, oper: &OperConnection, phi: &Series) -> Result<OperConnection> {
    let payload = transport_payload(alg, &oper.payload, phi)?;
    match oper.form {
        OperForm::Miura => {
            let payload = restrict(alg, payload, |d| d == 0, "a Miura oper")?;
            Ok(OperConnection { kind: alg.kind, form: OperForm::Miura, payload })
        }
        OperForm::Raw => OperConnection::raw(alg, payload),
        OperForm::Canonical => Ok(canonical_form(alg, &OperConnection::raw(alg, payload)?)?.0),
    }
}

/// Closed-form transport of canonical coordinates:
/// `v̄₁ = v₁(φ)φ′² − ½{φ,s}` and `v̄_j = v_j(φ)φ′^{d_j+1}`.
pub fn transport_canonical_coords(alg: &LieAlgebraData, coords: &[Series], phi: &Series) -> Result<Vec<Series>> {
    let d1 = phi.derivative();
    let mut out = Vec::with_capacity(coords.len());
    for (j, v) in coords.iter().enumerate() {
        let d = alg.exponents[j] as u32;
        let mut w = v.compose(phi)?.mul(&d1.pow(d + 1));
        if j == 0 {
            w = w.sub(&schwarzian(phi)?.scale(&qf(1, 2)));
        }
        out.push(w);
    }
    Ok(out)
}

/// Result of the screening derivation `δu = [x_i(t)e_i, ∂_t + p₋₁ + u(t)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScreeningVariation<R = Q> {
    /// `x_i(t) = exp(−Σ_{m>0} u_{i,−m} t^m/m)`, the solution of `∂_t x = −u_i x` with `x(0) = 1`.
    pub x: Series<R>,
    /// `δu_j = a_{ij} x_i`.
    pub delta_u: Vec<Series<R>>,
}

pub fn screening_derivation<R: Ring>(
    alg: &LieAlgebraData,
    i: usize,
    oper: &OperConnection<R>,
    cutoff: i32,
) -> Result<ScreeningVariation<R>> {
    if i >= alg.rank {
        return Err(Error::InvalidInput(format!("no simple root with index {i}")));
    }
    let u = oper.miura_coords(alg)?;
    let ui = &u[i];
    if ui.valuation() < 0 {
        return Err(Error::InvalidInput("screening derivation needs a regular Miura oper".into()));
    }
    // −∫u_i: the coefficient u_{i,−m} of t^{m−1} moves to t^m with weight −1/m.
    let top = ui.truncation().min(cutoff.saturating_sub(1));
    let integral: Vec<R> = (0..top.max(0))
        .map(|p| ui.coeff(p).map(|c| c.scaled(&qf(-1, p as i64 + 1))))
        .collect::<Result<_>>()?;
    let x = Series::new(1, integral, top.max(0) + 1).exp()?;
    let delta_u = (0..alg.rank).map(|j| Ring::scaled(&x, &q(alg.cartan_matrix[i][j]))).collect();
    Ok(ScreeningVariation { x, delta_u })
}

/// First-order change of the canonical coordinates `v_j(μ(u))` under
/// `u ↦ u + ε δu` for the `i`-th screening derivation.
pub fn screening_variation_of_canonical(
    alg: &LieAlgebraData,
    i: usize,
    oper: &OperConnection,
    cutoff: i32,
) -> Result<Vec<Series>> {
    let var = screening_derivation(alg, i, oper, cutoff)?;
    let u = oper.miura_coords(alg)?;
    let lifted: Vec<Series<Scalar>> = u
        .iter()
        .zip(&var.delta_u)
        .map(|(a, d)| a.map(|c| Scalar::from_q(c.clone())).add(&d.map(|c| Scalar::from_q(c.clone()).mul(&Scalar::k()))))
        .collect();
    let image = miura_map(alg, &OperConnection::miura(alg, lifted)?)?;
    let coords = image.canonical_coords(alg)?;
    coords
        .iter()
        .map(|s| {
            let vals = s
                .dense(s.valuation().min(0))
                .iter()
                .map(|c| {
                    let den = c.denom();
                    if !den.is_constant() {
                        return Err(Error::Internal("Miura map produced a denominator in ε".into()));
                    }
                    Ok(c.numer().coeffs().get(1).cloned().unwrap_or_else(|| q(0)) / den.constant_term())
                })
                .collect::<Result<Vec<Q>>>()?;
            Ok(Series::new(s.valuation().min(0), vals, s.truncation()))
        })
        .collect()
}

/// Gauge by `ρ∨(t)`: the degree-`d` part gets a factor `t^d` and `−ρ∨/t` is added.
pub fn rho_gauge<R: Ring>(alg: &LieAlgebraData, a: &[Series<R>]) -> LieSeries<R> {
    let rho: Vec<Q> = alg.rho_vec();
    let mut out: LieSeries<R> =
        a.iter().enumerate().map(|(b, s)| s.shift(alg.principal_degree(b) as i32)).collect();
    for i in 0..alg.rank {
        let h = alg.h(i);
        out[h] = out[h].sub(&Series::monomial(R::from_q(&rho[h]), -1, EXACT));
    }
    out
}

/// Residues of an oper and a Miura oper with regular singularity.
#[derive(Clone, Debug, PartialEq)]
pub struct Residues {
    /// Canonical coordinates of the class of `p₋₁ + v(0)`.
    pub oper: Vec<Q>,
    /// `α_i(u(0))` for `∂_t + p₋₁ + u(t)/t`.
    pub miura: Vec<Q>,
}

/// Canonical coordinates of the constant element `p₋₁ + x`, `x ∈ b`.
pub fn canonical_constant(alg: &LieAlgebraData, x: &[Q]) -> Result<Vec<Q>> {
    let raw = OperConnection::raw(alg, constant_vec::<Q>(x))?;
    let (canon, _) = canonical_form(alg, &raw)?;
    canon.canonical_coords(alg)?.iter().map(|s| s.coeff(0)).collect()
}

/// Residue of `∂_t + A(t)` with `A = (1/t)(p₋₁ + v(t))`, `v ∈ b[[t]]`.
pub fn singular_residue(alg: &LieAlgebraData, a: &[Series]) -> Result<Vec<Q>> {
    check_len(alg, a)?;
    let ta: LieSeries = a.iter().map(|s| s.shift(1)).collect();
    let v = vsub(&ta, &constant_vec::<Q>(&alg.p_minus1::<Q>()));
    let v = restrict(alg, v, |d| d >= 0, "a regular singularity")?;
    if v.iter().any(|s| s.valuation() < 0) {
        return Err(Error::InvalidInput("connection is not of the form ∂_t + (p₋₁ + v(t))/t with v ∈ b[[t]]".into()));
    }
    let v0 = v.iter().map(|s| s.coeff(0)).collect::<Result<Vec<Q>>>()?;
    canonical_constant(alg, &v0)
}

/// Oper residue of `∂_t + p₋₁ + v(t)` with regular singularity, after the
/// gauge by `ρ∨(t)`.
pub fn oper_residue(alg: &LieAlgebraData, oper: &OperConnection) -> Result<Vec<Q>> {
    singular_residue(alg, &rho_gauge(alg, &oper.connection(alg)))
}

/// Residue maps for `∂_t + p₋₁ + u(t)/t`.
pub fn residue_maps(alg: &LieAlgebraData, oper: &OperConnection) -> Result<Residues> {
    let u = oper.miura_coords(alg)?;
    if u.iter().any(|s| s.valuation() < -1) {
        return Err(Error::InvalidInput("Miura oper must have at most a simple pole".into()));
    }
    let miura = u.iter().map(|s| s.coeff(-1)).collect::<Result<Vec<Q>>>()?;
    Ok(Residues { oper: oper_residue(alg, oper)?, miura })
}

fn component_labels(alg: &LieAlgebraData, form: OperForm) -> Vec<String> {
    match form {
        OperForm::Raw => (0..alg.dim()).map(|a| alg.label(a)).collect(),
        OperForm::Canonical => (1..=alg.rank).map(|j| format!("v{j}")).collect(),
        OperForm::Miura => (1..=alg.rank).map(|j| format!("u{j}")).collect(),
    }
}

fn series_block(list: &[Series]) -> (i32, i32) {
    let val = list.iter().filter(|s| !s.is_zero()).map(|s| s.valuation()).min().unwrap_or(0);
    let mut trunc = min_truncation(list);
    if trunc == EXACT {
        trunc = list.iter().flat_map(|s| s.terms().map(|(p, _)| p + 1)).max().unwrap_or(val).max(val);
    }
    (val.min(trunc), trunc)
}

impl OperConnection {
    fn components(&self, alg: &LieAlgebraData) -> Result<Vec<Series>> {
        match self.form {
            OperForm::Raw => Ok(self.payload.clone()),
            OperForm::Canonical => self.canonical_coords(alg),
            OperForm::Miura => self.miura_coords(alg),
        }
    }

    /// `{algebra, form, valuation, truncation, coefficients}` with one list
    /// of scalar literals per component, from `valuation` to `truncation − 1`.
    pub fn to_json(&self, alg: &LieAlgebraData) -> Result<Value> {
        let comps = self.components(alg)?;
        let (val, trunc) = series_block(&comps);
        let mut coeffs = Map::new();
        for (label, s) in component_labels(alg, self.form).into_iter().zip(&comps) {
            let list: Vec<String> = (val..trunc).map(|p| s.coeff(p).map(|c| c.to_string())).collect::<Result<_>>()?;
            coeffs.insert(label, Value::from(list));
        }
        Ok(json!({
            "algebra": self.kind.to_string(),
            "form": self.form.name(),
            "valuation": val,
            "truncation": trunc,
            "coefficients": coeffs,
        }))
    }

    pub fn from_json(v: &Value) -> Result<(LieAlgebraData, Self)> {
        let field = |k: &str| v.get(k).ok_or_else(|| Error::InvalidInput(format!("oper file: missing `{k}`")));
        let text = |k: &str| -> Result<String> {
            field(k)?.as_str().map(str::to_string).ok_or_else(|| Error::InvalidInput(format!("oper file: `{k}` must be a string")))
        };
        let int = |k: &str| -> Result<i32> {
            field(k)?
                .as_i64()
                .and_then(|x| i32::try_from(x).ok())
                .ok_or_else(|| Error::InvalidInput(format!("oper file: `{k}` must be an integer")))
        };
        let alg = crate::lie::build_algebra(text("algebra")?.parse()?)?;
        let form = OperForm::parse(&text("form")?)?;
        let val = int("valuation")?;
        let trunc = int("truncation")?;
        if trunc < val {
            return Err(Error::InvalidInput("oper file: truncation below valuation".into()));
        }
        let coeffs = field("coefficients")?
            .as_object()
            .ok_or_else(|| Error::InvalidInput("oper file: `coefficients` must be an object".into()))?;
        let labels = component_labels(&alg, form);
        for key in coeffs.keys() {
            if !labels.contains(key) {
                return Err(Error::InvalidInput(format!("oper file: unknown component `{key}` for {} form", form.name())));
            }
        }
        let mut comps = Vec::with_capacity(labels.len());
        for label in &labels {
            let list = match coeffs.get(label) {
                None => Vec::new(),
                Some(x) => x
                    .as_array()
                    .ok_or_else(|| Error::InvalidInput(format!("oper file: `{label}` must be a list")))?
                    .iter()
                    .enumerate()
                    .map(|(n, c)| {
                        let lit = c.as_str().map(str::to_string).or_else(|| c.as_i64().map(|i| i.to_string()));
                        lit.ok_or_else(|| Error::InvalidInput(format!("oper file: `{label}`[{n}] is not a scalar")))?
                            .parse::<Q>()
                            .map_err(|_| Error::InvalidInput(format!("oper file: `{label}`[{n}] is not a rational")))
                    })
                    .collect::<Result<Vec<Q>>>()?,
            };
            if list.len() > (trunc - val) as usize {
                return Err(Error::InvalidInput(format!("oper file: `{label}` runs past the truncation")));
            }
            comps.push(Series::new(val, list, trunc));
        }
        let oper = match form {
            OperForm::Raw => OperConnection::raw(&alg, comps)?,
            OperForm::Canonical => OperConnection::canonical(&alg, comps)?,
            OperForm::Miura => OperConnection::miura(&alg, comps)?,
        };
        Ok((alg, oper))
    }
}

impl GaugeElement {
    pub fn to_json(&self, alg: &LieAlgebraData) -> Value {
        let (val, trunc) = series_block(&self.u);
        let mut coeffs = Map::new();
        for r in 0..alg.n_pos() {
            let s = &self.u[alg.e(r)];
            let list: Vec<String> = (val..trunc).map(|p| s.coeff(p).map(|c| c.to_string()).unwrap_or_default()).collect();
            coeffs.insert(alg.label(alg.e(r)), Value::from(list));
        }
        json!({ "algebra": alg.kind.to_string(), "valuation": val, "truncation": trunc, "log": coeffs })
    }
}
