//! Exact scalars: rational functions in a single formal parameter `k` over Q.
//!
//! Everything downstream is linear algebra over this field. The level of an
//! affine algebra enters as `k`, so symbolic-level checks come for free and
//! numeric checks are obtained by [`Scalar::specialize`].

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use smallvec::{smallvec, SmallVec};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ring;

pub type Q = crate::rational::Rat;

pub fn q(n: i64) -> Q {
    Q::from_i64(n)
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::ratio(n, d)
}

/// Dense univariate polynomial over Q, coefficients stored low degree first
/// with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct UPoly(SmallVec<[Q; 2]>);

impl UPoly {
    pub fn zero() -> Self {
        UPoly(SmallVec::new())
    }

    pub fn constant(c: Q) -> Self {
        let mut p = UPoly(smallvec![c]);
        p.trim();
        p
    }

    pub fn x() -> Self {
        UPoly(smallvec![Q::zero(), Q::one()])
    }

    pub fn from_coeffs(c: Vec<Q>) -> Self {
        let mut p = UPoly(SmallVec::from_vec(c));
        p.trim();
        p
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.0
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.0.len() <= 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Q {
        self.0.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.0.first().cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let mut c: SmallVec<[Q; 2]> = SmallVec::with_capacity(n);
        for i in 0..n {
            c.push(match (self.0.get(i), o.0.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        let mut p = UPoly(c);
        p.trim();
        p
    }

    pub fn neg(&self) -> Self {
        UPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &Q) -> Self {
        if s.is_zero() {
            return UPoly::zero();
        }
        UPoly(self.0.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        if self.0.len() == 1 && o.0.len() == 1 {
            return UPoly(smallvec![&self.0[0] * &o.0[0]]);
        }
        let mut c: SmallVec<[Q; 2]> = smallvec![Q::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        let mut p = UPoly(c);
        p.trim();
        p
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead_inv = d.lead().recip();
        let mut r = self.0.to_vec();
        if r.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let mut quot = vec![Q::zero(); r.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &r[i + dd] * &lead_inv;
            if !c.is_zero() {
                for (j, dc) in d.0.iter().enumerate() {
                    r[i + j] -= &c * dc;
                }
            }
            quot[i] = c;
        }
        r.truncate(dd);
        (UPoly::from_coeffs(quot), UPoly::from_coeffs(r))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().recip())
    }

    pub fn gcd(a: &Self, b: &Self) -> Self {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    fn fmt_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push(if neg { '-' } else { '+' });
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            if mono.is_empty() {
                s.push_str(&a.to_string());
            } else if a.is_one() {
                s.push_str(&mono);
            } else {
                s.push_str(&format!("{a}*{mono}"));
            }
        }
        s
    }
}

/// Element of Q(k), kept in lowest terms with a monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    num: UPoly,
    den: UPoly,
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { num: UPoly::zero(), den: UPoly::constant(Q::one()) }
    }

    pub fn one() -> Self {
        Scalar::from_q(Q::one())
    }

    pub fn from_q(c: Q) -> Self {
        Scalar { num: UPoly::constant(c), den: UPoly::constant(Q::one()) }
    }

    pub fn int(n: i64) -> Self {
        Scalar::from_q(q(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Scalar::from_q(qf(n, d))
    }

    /// The formal level parameter.
    pub fn k() -> Self {
        Scalar { num: UPoly::x(), den: UPoly::constant(Q::one()) }
    }

    pub fn from_polys(num: UPoly, den: UPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut s = Scalar { num, den };
        s.reduce();
        s
    }

    pub fn numer(&self) -> &UPoly {
        &self.num
    }

    pub fn denom(&self) -> &UPoly {
        &self.den
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = UPoly::constant(Q::one());
            return;
        }
        if !self.den.is_constant() {
            let g = UPoly::gcd(&self.num, &self.den);
            if !g.is_one() {
                self.num = self.num.div_rem(&g).0;
                self.den = self.den.div_rem(&g).0;
            }
        }
        let l = self.den.lead();
        if !l.is_one() {
            let li = l.recip();
            self.num = self.num.scale(&li);
            self.den = self.den.scale(&li);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// `Some(c)` when the value does not depend on `k`.
    pub fn as_q(&self) -> Option<Q> {
        if self.num.is_constant() && self.den.is_constant() {
            Some(self.num.constant_term() / self.den.constant_term())
        } else {
            None
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        self.as_q().filter(|c| c.is_integer()).and_then(|c| c.to_integer().to_i64())
    }

    pub fn is_constant(&self) -> bool {
        self.as_q().is_some()
    }

    /// Substitute a rational value for `k`.
    pub fn specialize(&self, at: &Q) -> Result<Q> {
        let d = self.den.eval(at);
        if d.is_zero() {
            return Err(Error::Pole(format!("{self} at k = {at}")));
        }
        Ok(self.num.eval(at) / d)
    }

    pub fn add(&self, o: &Self) -> Self {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        if self.den == o.den {
            let num = self.num.add(&o.num);
            if self.den.is_one() {
                return Scalar { num, den: self.den.clone() };
            }
            return Scalar::from_polys(num, self.den.clone());
        }
        Scalar::from_polys(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn neg(&self) -> Self {
        Scalar { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Scalar::zero();
        }
        if o.is_one() {
            return self.clone();
        }
        if self.is_one() {
            return o.clone();
        }
        if self.den.is_one() && o.den.is_one() {
            return Scalar { num: self.num.mul(&o.num), den: self.den.clone() };
        }
        Scalar::from_polys(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn mul_q(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Scalar::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        Scalar { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(Scalar::from_polys(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        let i = o.inv().ok_or(Error::DivisionByZero)?;
        Ok(self.mul(&i))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num.fmt_in("k"));
        }
        let n = self.num.fmt_in("k");
        let bare = self.num.is_constant() && self.num.constant_term().is_integer();
        let n = if bare { n } else { format!("({n})") };
        write!(f, "{n}/({})", self.den.fmt_in("k"))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<Q> for Scalar {
    fn from(c: Q) -> Self {
        Scalar::from_q(c)
    }
}

impl ring::Ring for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
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
    fn from_q(c: &Q) -> Self {
        Scalar::from_q(c.clone())
    }
    fn scaled(&self, c: &Q) -> Self {
        self.mul_q(c)
    }
}

impl ring::Field for Scalar {
    fn inverse(&self) -> Option<Self> {
        self.inv()
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Parses literals such as `-3/2`, `k+2`, `(k^2-1)/(2*k+4)`.
    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s.as_bytes(), pos: 0 };
        let v = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing input"));
        }
        Ok(v)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> Error {
        Error::Parse { pos: self.pos, msg: what.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Scalar> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                b'-' => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Scalar> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                b'/' => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.unary()?;
                    acc = acc
                        .div(&d)
                        .map_err(|_| Error::Parse { pos: at, msg: "division by zero".into() })?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Scalar> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => {
                let base = self.atom()?;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.skip_ws();
                    let e = self.integer()?;
                    let e = e.to_u32().ok_or_else(|| self.err("bad exponent"))?;
                    Ok(base.pow(e))
                } else {
                    Ok(base)
                }
            }
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn atom(&mut self) -> Result<Scalar> {
        match self.peek() {
            Some(b'k') => {
                self.pos += 1;
                Ok(Scalar::k())
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => Ok(Scalar::from_q(Q::from_integer(self.integer()?))),
            _ => Err(self.err("expected number, k or '('")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_common_factors() {
        let k = Scalar::k();
        let two = Scalar::int(2);
        let a = k.mul(&k).sub(&Scalar::int(4)); // k^2 - 4
        let b = k.add(&two);
        let r = a.div(&b).unwrap();
        assert_eq!(r, k.sub(&two));
        assert!(r.denom().is_one());
    }

    #[test]
    fn literal_round_trip() {
        for s in ["0", "-3/2", "k", "k^2+3/2*k-1", "(k+1)/(k+2)", "1/(k^2+4*k+4)"] {
            let v: Scalar = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
    }

    #[test]
    fn specialization_detects_poles() {
        let v: Scalar = "1/(k+2)".parse().unwrap();
        assert_eq!(v.specialize(&q(0)).unwrap(), qf(1, 2));
        assert!(v.specialize(&q(-2)).is_err());
    }

    #[test]
    fn parse_errors_carry_positions() {
        match "k+*2".parse::<Scalar>() {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn display_round_trips() {
        for text in ["1/(k+2)", "(1/2)/(k+2)", "(k+1/3)/(k^2+1)", "-3/4", "k", "(-1/2)/(k)"] {
            let v: Scalar = text.parse().unwrap();
            assert_eq!(v.to_string().parse::<Scalar>().unwrap(), v, "{text} -> {v}");
        }
        let half: Scalar = "(1/2)/(k+2)".parse().unwrap();
        assert_eq!(half.to_string(), "(1/2)/(k+2)");
    }
}
