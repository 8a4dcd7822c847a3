//! Truncated Laurent series `Σ_{p=val}^{trunc-1} c_p t^p + O(t^trunc)`.
//!
//! Every operation tracks the order up to which its result is known, and
//! reading a coefficient at or beyond that order is an error.

use std::fmt;

use crate::error::{Error, Result};
use crate::ring::{Field, Ring};
use crate::scalar::qf;

/// Truncation order standing for "known exactly": such a series is a finite
/// Laurent polynomial.
pub const EXACT: i32 = i32::MAX / 4;

fn clamp(trunc: i32) -> i32 {
    if trunc >= EXACT / 2 {
        EXACT
    } else {
        trunc
    }
}

/// Shift a truncation order, leaving exact orders exact.
fn moved(trunc: i32, k: i32) -> i32 {
    if trunc == EXACT {
        EXACT
    } else {
        clamp(trunc + k)
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct TruncatedSeries<R> {
    val: i32,
    coeffs: Vec<R>,
    trunc: i32,
}

impl<R: Ring> TruncatedSeries<R> {
    /// Series with coefficients `coeffs[i]` at `t^{val+i}`, known below `trunc`.
    pub fn new(val: i32, coeffs: Vec<R>, trunc: i32) -> Self {
        let mut s = TruncatedSeries { val, coeffs, trunc };
        s.normalize();
        s
    }

    pub fn zero(trunc: i32) -> Self {
        TruncatedSeries { val: trunc, coeffs: Vec::new(), trunc }
    }

    pub fn constant(c: R, trunc: i32) -> Self {
        TruncatedSeries::monomial(c, 0, trunc)
    }

    /// `c t^p`.
    pub fn monomial(c: R, p: i32, trunc: i32) -> Self {
        TruncatedSeries::new(p, vec![c], trunc)
    }

    /// The coordinate `t` itself.
    pub fn t(trunc: i32) -> Self {
        TruncatedSeries::monomial(R::one(), 1, trunc)
    }

    /// A finite Laurent polynomial with no truncation.
    pub fn exact(val: i32, coeffs: Vec<R>) -> Self {
        TruncatedSeries::new(val, coeffs, EXACT)
    }

    pub fn is_exact(&self) -> bool {
        self.trunc == EXACT
    }

    fn normalize(&mut self) {
        self.trunc = clamp(self.trunc);
        let keep = (self.trunc - self.val).max(0) as usize;
        if self.coeffs.len() > keep {
            self.coeffs.truncate(keep);
        }
        while self.coeffs.first().is_some_and(|c| c.is_zero()) {
            self.coeffs.remove(0);
            self.val += 1;
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.val = self.trunc;
        }
    }

    /// Lowest power with a nonzero coefficient (equals `trunc` for `O(t^trunc)`).
    pub fn valuation(&self) -> i32 {
        self.val
    }

    pub fn truncation(&self) -> i32 {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `t^p`.
    pub fn coeff(&self, p: i32) -> Result<R> {
        if p >= self.trunc {
            return Err(Error::Truncation(format!(
                "coefficient of t^{p} requested from a series known below t^{}",
                self.trunc
            )));
        }
        Ok(self.coeff_unchecked(p))
    }

    /// One past the last stored coefficient.
    fn known_end(&self) -> i32 {
        if self.coeffs.is_empty() {
            i32::MIN
        } else {
            self.val + self.coeffs.len() as i32
        }
    }

    fn coeff_unchecked(&self, p: i32) -> R {
        if p < self.val {
            return R::zero();
        }
        self.coeffs.get((p - self.val) as usize).cloned().unwrap_or_else(R::zero)
    }

    /// `(power, coefficient)` pairs of the nonzero terms.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &R)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(i, c)| (self.val + i as i32, c))
    }

    /// Dense coefficient list from `from` up to the truncation.
    pub fn dense(&self, from: i32) -> Vec<R> {
        let end = if self.is_exact() { self.val + self.coeffs.len() as i32 } else { self.trunc };
        (from..end).map(|p| self.coeff_unchecked(p)).collect()
    }

    /// Forget everything from `t^trunc` on.
    pub fn truncate(&self, trunc: i32) -> Self {
        TruncatedSeries::new(self.val, self.coeffs.clone(), trunc.min(self.trunc))
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> TruncatedSeries<S> {
        TruncatedSeries::new(self.val, self.coeffs.iter().map(f).collect(), self.trunc)
    }

    pub fn add(&self, o: &Self) -> Self {
        let trunc = self.trunc.min(o.trunc);
        let val = self.val.min(o.val).min(trunc);
        let end = trunc.min(self.known_end().max(o.known_end()));
        let coeffs = (val..end).map(|p| self.coeff_unchecked(p).plus(&o.coeff_unchecked(p))).collect();
        TruncatedSeries::new(val, coeffs, trunc)
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.negated())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &R) -> Self {
        self.map(|x| x.times(c))
    }

    /// Multiply by `t^k`.
    pub fn shift(&self, k: i32) -> Self {
        if self.is_zero() {
            return TruncatedSeries::zero(moved(self.trunc, k));
        }
        TruncatedSeries { val: self.val + k, coeffs: self.coeffs.clone(), trunc: moved(self.trunc, k) }
    }

    pub fn mul(&self, o: &Self) -> Self {
        // Each factor is known to relative order trunc - val (for a zero
        // series the valuation is only bounded below by its truncation).
        let trunc = clamp((self.val + o.trunc).min(o.val + self.trunc));
        let val = self.val + o.val;
        let len = (self.coeffs.len() + o.coeffs.len()).saturating_sub(1) as i64;
        let mut coeffs = vec![R::zero(); (trunc as i64 - val as i64).clamp(0, len) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                let k = i + j;
                if k >= coeffs.len() {
                    break;
                }
                if !b.is_zero() {
                    coeffs[k].add_to(&a.times(b));
                }
            }
        }
        TruncatedSeries::new(val, coeffs, trunc)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = TruncatedSeries::constant(R::one(), i32::MAX / 4);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `d/dt`.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.scaled(&crate::scalar::q((self.val + i as i32) as i64)))
            .collect();
        TruncatedSeries::new(self.val - 1, coeffs, moved(self.trunc, -1))
    }

    /// `exp(f)` for `f` with positive valuation.
    pub fn exp(&self) -> Result<Self> {
        if self.val < 1 && !self.is_zero() {
            return Err(Error::InvalidInput("exp needs a series without constant term".into()));
        }
        if self.is_exact() && !self.is_zero() {
            return Err(Error::Truncation("exp of an untruncated series needs a truncation order".into()));
        }
        let mut acc = TruncatedSeries::constant(R::one(), self.trunc);
        let mut term = acc.clone();
        let steps = self.trunc.max(0);
        for n in 1..=steps {
            term = term.mul(self).scale(&R::from_q(&qf(1, n as i64)));
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }
}

impl<R: Field> TruncatedSeries<R> {
    /// `1/f`; the leading coefficient must be invertible.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let v = self.val;
        let lead_inv = self.coeffs[0].inverse().ok_or(Error::DivisionByZero)?;
        if self.is_exact() {
            if self.coeffs.len() == 1 {
                return Ok(TruncatedSeries::exact(-v, vec![lead_inv]));
            }
            return Err(Error::Truncation("inverse of an untruncated series needs a truncation order".into()));
        }
        let rel = self.trunc - v;
        // f = c t^v (1 + g), 1/f = c^{-1} t^{-v} Σ (-g)^n.
        let g = self.shift(-v).scale(&lead_inv).sub(&TruncatedSeries::constant(R::one(), rel));
        let mut acc = TruncatedSeries::constant(R::one(), rel);
        let mut term = acc.clone();
        for _ in 0..rel {
            term = term.mul(&g).neg();
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        Ok(acc.scale(&lead_inv).shift(-v))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inverse()?))
    }

    /// `f(φ(s))` for `φ = a₁s + O(s²)` with `a₁` invertible.
    pub fn compose(&self, phi: &Self) -> Result<Self> {
        if phi.val != 1 {
            return Err(Error::InvalidInput("substitution must have the form a₁s + O(s²), a₁ ≠ 0".into()));
        }
        let trunc = if self.is_zero() {
            self.trunc
        } else {
            clamp(self.trunc.min(self.val + moved(phi.trunc, -1)))
        };
        let mut acc = TruncatedSeries::zero(trunc);
        let phi_inv = if self.val < 0 { Some(phi.inverse()?) } else { None };
        for (p, c) in self.terms() {
            let power = if p >= 0 {
                phi.pow(p as u32)
            } else {
                phi_inv.as_ref().unwrap().pow((-p) as u32)
            };
            acc = acc.add(&power.scale(c).truncate(trunc));
        }
        Ok(acc.truncate(trunc))
    }

    /// Compositional inverse of `φ = a₁s + O(s²)`.
    pub fn reversion(&self) -> Result<Self> {
        if self.val != 1 {
            return Err(Error::InvalidInput("reversion needs a₁s + O(s²), a₁ ≠ 0".into()));
        }
        let a1_inv = self.coeffs[0].inverse().ok_or(Error::DivisionByZero)?;
        if self.is_exact() {
            if self.coeffs.len() == 1 {
                return Ok(TruncatedSeries::exact(1, vec![a1_inv]));
            }
            return Err(Error::Truncation("reversion of an untruncated series needs a truncation order".into()));
        }
        let trunc = self.trunc;
        // Fixed point ψ ← ψ - (φ(ψ) - s)/a₁ gains one order per step.
        let s = TruncatedSeries::t(trunc);
        let mut psi = s.scale(&a1_inv);
        for _ in 0..trunc {
            let err = self.compose(&psi)?.sub(&s);
            if err.is_zero() {
                break;
            }
            psi = psi.sub(&err.scale(&a1_inv));
        }
        Ok(psi)
    }
}

/// Schwarzian derivative `φ‴/φ′ − (3/2)(φ″/φ′)²`.
pub fn schwarzian<R: Field>(phi: &TruncatedSeries<R>) -> Result<TruncatedSeries<R>> {
    let d1 = phi.derivative();
    let d2 = d1.derivative();
    let d3 = d2.derivative();
    let r = d2.div(&d1)?;
    let three_halves = R::from_q(&qf(3, 2));
    Ok(d3.div(&d1)?.sub(&r.mul(&r).scale(&three_halves)))
}

impl<R: Ring + fmt::Display> fmt::Display for TruncatedSeries<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, c) in self.terms() {
            write!(f, "({c})t^{p} + ")?;
        }
        if self.is_exact() {
            write!(f, "0")
        } else {
            write!(f, "O(t^{})", self.trunc)
        }
    }
}

/// Exact constants act as the unit and zero, so matrices and Lie algebra
/// vectors with series entries reuse the generic linear algebra.
impl<R: Ring> Ring for TruncatedSeries<R> {
    fn zero() -> Self {
        TruncatedSeries::zero(EXACT)
    }
    fn one() -> Self {
        TruncatedSeries::constant(R::one(), EXACT)
    }
    /// Only an exactly vanishing series counts as zero here; `O(t^n)` does not.
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.is_exact()
    }
    fn plus(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn minus(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn times(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn negated(&self) -> Self {
        self.neg()
    }
    fn from_q(c: &crate::scalar::Q) -> Self {
        TruncatedSeries::constant(R::from_q(c), EXACT)
    }
    fn scaled(&self, c: &crate::scalar::Q) -> Self {
        self.map(|x| x.scaled(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Q};

    fn s(val: i32, c: &[i64], trunc: i32) -> TruncatedSeries<Q> {
        TruncatedSeries::new(val, c.iter().map(|&x| q(x)).collect(), trunc)
    }

    #[test]
    fn product_truncation() {
        let a = s(0, &[1, 1], 5);
        let b = s(1, &[1], 3);
        let p = a.mul(&b);
        assert_eq!(p.truncation(), 3);
        assert_eq!(p.coeff(2).unwrap(), q(1));
        assert!(p.coeff(3).is_err());
    }

    #[test]
    fn exact_series_stay_exact() {
        let a = TruncatedSeries::exact(0, vec![q(1), q(2)]);
        let b = a.mul(&a).derivative().shift(-3);
        assert!(b.is_exact());
        assert_eq!(b.dense(-3), vec![q(4), q(8)]);
        let t = s(0, &[1, 1], 4);
        assert_eq!(a.mul(&t).truncation(), 4);
        assert!(a.inverse().is_err());
        assert_eq!(a.compose(&TruncatedSeries::exact(1, vec![q(1)])).unwrap(), a);
    }

    #[test]
    fn inverse_of_one_plus_t() {
        let a = s(0, &[1, 1], 6);
        let inv = a.inverse().unwrap();
        assert_eq!(inv.dense(0), vec![q(1), q(-1), q(1), q(-1), q(1), q(-1)]);
    }
}
