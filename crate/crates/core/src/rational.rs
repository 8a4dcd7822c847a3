//! Exact rationals that stay on machine integers while the numbers are small.
//!
//! Almost every coefficient met in practice fits comfortably in an `i64`, so
//! the common case avoids heap allocation entirely. Results that overflow
//! move to `BigRational` and come back once they fit again.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A rational number in lowest terms with positive denominator.
#[derive(Clone)]
pub enum Rat {
    Small(i64, i64),
    Big(Box<BigRational>),
}

fn gcd128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rat {
    pub fn new(n: BigInt, d: BigInt) -> Self {
        Rat::from_big(BigRational::new(n, d))
    }

    pub fn from_integer(n: BigInt) -> Self {
        match n.to_i64() {
            Some(v) => Rat::Small(v, 1),
            None => Rat::Big(Box::new(BigRational::from_integer(n))),
        }
    }

    pub fn from_i64(n: i64) -> Self {
        Rat::Small(n, 1)
    }

    /// `n/d` for machine integers, reduced.
    pub fn ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Rat::from_i128(n as i128, d as i128)
    }

    fn from_i128(n: i128, d: i128) -> Self {
        let g = gcd128(n, d);
        let (mut n, mut d) = if g > 1 { (n / g, d / g) } else { (n, d) };
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rat::Small(n, d),
            _ => Rat::Big(Box::new(BigRational::new_raw(BigInt::from(n), BigInt::from(d)))),
        }
    }

    fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Rat::Small(n, d),
            _ => Rat::Big(Box::new(r)),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rat::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rat::Big(r) => (**r).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Rat::Small(n, _) => BigInt::from(*n),
            Rat::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Rat::Small(_, d) => BigInt::from(*d),
            Rat::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rat::Small(_, d) => *d == 1,
            Rat::Big(r) => r.is_integer(),
        }
    }

    /// Integer part rounded toward zero.
    pub fn to_integer(&self) -> BigInt {
        match self {
            Rat::Small(n, d) => BigInt::from(n / d),
            Rat::Big(r) => r.to_integer(),
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Rat::Small(n, 1) => Some(*n),
            Rat::Small(..) => None,
            Rat::Big(r) if r.is_integer() => r.numer().to_i64(),
            Rat::Big(_) => None,
        }
    }

    pub fn recip(&self) -> Self {
        match self {
            Rat::Small(n, d) => {
                assert!(*n != 0, "reciprocal of zero");
                Rat::from_i128(*d as i128, *n as i128)
            }
            Rat::Big(r) => Rat::from_big(r.recip()),
        }
    }

    pub fn abs(&self) -> Self {
        match self {
            Rat::Small(n, d) => Rat::from_i128((*n as i128).abs(), *d as i128),
            Rat::Big(r) => Rat::from_big(r.abs()),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Rat::Small(n, _) => *n < 0,
            Rat::Big(r) => r.is_negative(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Rat::Small(n, _) => *n > 0,
            Rat::Big(r) => r.is_positive(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Rat::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    fn add_ref(&self, o: &Rat) -> Rat {
        match (self, o) {
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                if b == d {
                    return Rat::from_i128(*a as i128 + *c as i128, *b as i128);
                }
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                match a.checked_mul(d).zip(c.checked_mul(b)).and_then(|(x, y)| x.checked_add(y)) {
                    Some(n) => Rat::from_i128(n, b * d),
                    None => Rat::from_big(self.to_big() + o.to_big()),
                }
            }
            _ => Rat::from_big(self.to_big() + o.to_big()),
        }
    }

    fn mul_ref(&self, o: &Rat) -> Rat {
        match (self, o) {
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                Rat::from_i128(a * c, b * d)
            }
            _ => Rat::from_big(self.to_big() * o.to_big()),
        }
    }

    fn div_ref(&self, o: &Rat) -> Rat {
        assert!(!o.is_zero(), "division by zero");
        self.mul_ref(&o.recip())
    }

    fn neg_ref(&self) -> Rat {
        match self {
            Rat::Small(n, d) => match n.checked_neg() {
                Some(m) => Rat::Small(m, *d),
                None => Rat::from_big(-self.to_big()),
            },
            Rat::Big(r) => Rat::from_big(-(**r).clone()),
        }
    }
}

impl Zero for Rat {
    fn zero() -> Self {
        Rat::Small(0, 1)
    }

    fn is_zero(&self) -> bool {
        matches!(self, Rat::Small(0, _))
    }
}

impl One for Rat {
    fn one() -> Self {
        Rat::Small(1, 1)
    }

    fn is_one(&self) -> bool {
        matches!(self, Rat::Small(1, 1))
    }
}

impl Default for Rat {
    fn default() -> Self {
        Rat::zero()
    }
}

// Values are normalized, so a number has exactly one representation.
impl PartialEq for Rat {
    fn eq(&self, o: &Self) -> bool {
        match (self, o) {
            (Rat::Small(a, b), Rat::Small(c, d)) => a == c && b == d,
            (Rat::Big(x), Rat::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rat {}

impl Hash for Rat {
    fn hash<H: Hasher>(&self, h: &mut H) {
        match self {
            Rat::Small(n, d) => {
                n.hash(h);
                d.hash(h);
            }
            Rat::Big(r) => r.hash(h),
        }
    }
}

impl Ord for Rat {
    fn cmp(&self, o: &Self) -> Ordering {
        match (self, o) {
            (Rat::Small(a, b), Rat::Small(c, d)) => (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128)),
            _ => self.to_big().cmp(&o.to_big()),
        }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rat::Small(n, 1) => write!(f, "{n}"),
            Rat::Small(n, d) => write!(f, "{n}/{d}"),
            Rat::Big(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = num_rational::ParseRatioError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(Rat::from_big(s.parse::<BigRational>()?))
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::Small(n, 1)
    }
}

impl From<BigInt> for Rat {
    fn from(n: BigInt) -> Self {
        Rat::from_integer(n)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        self.neg_ref()
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        self.neg_ref()
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident, $f:ident) => {
        impl $tr<&Rat> for &Rat {
            type Output = Rat;
            fn $m(self, o: &Rat) -> Rat {
                self.$f(o)
            }
        }
        impl $tr<Rat> for &Rat {
            type Output = Rat;
            fn $m(self, o: Rat) -> Rat {
                self.$f(&o)
            }
        }
        impl $tr<&Rat> for Rat {
            type Output = Rat;
            fn $m(self, o: &Rat) -> Rat {
                self.$f(o)
            }
        }
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $m(self, o: Rat) -> Rat {
                self.$f(&o)
            }
        }
        impl $atr<&Rat> for Rat {
            fn $am(&mut self, o: &Rat) {
                *self = self.$f(o);
            }
        }
        impl $atr<Rat> for Rat {
            fn $am(&mut self, o: Rat) {
                *self = self.$f(&o);
            }
        }
    };
}

impl Rat {
    fn sub_ref(&self, o: &Rat) -> Rat {
        self.add_ref(&o.neg_ref())
    }
}

binop!(Add, add, AddAssign, add_assign, add_ref);
binop!(Sub, sub, SubAssign, sub_assign, sub_ref);
binop!(Mul, mul, MulAssign, mul_assign, mul_ref);
binop!(Div, div, DivAssign, div_assign, div_ref);

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(it: I) -> Rat {
        it.fold(Rat::zero(), |a, b| a + b)
    }
}

impl<'a> Sum<&'a Rat> for Rat {
    fn sum<I: Iterator<Item = &'a Rat>>(it: I) -> Rat {
        it.fold(Rat::zero(), |a, b| a + b)
    }
}

impl Product for Rat {
    fn product<I: Iterator<Item = Rat>>(it: I) -> Rat {
        it.fold(Rat::one(), |a, b| a * b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    proptest! {
        #[test]
        fn agrees_with_bigrational(a in any::<i64>(), b in 1i64..=i64::MAX, c in any::<i64>(), d in 1i64..=i64::MAX) {
            let (x, y) = (Rat::ratio(a, b), Rat::ratio(c, d));
            let (bx, by) = (big(a, b), big(c, d));
            prop_assert_eq!((&x + &y).to_big(), &bx + &by);
            prop_assert_eq!((&x - &y).to_big(), &bx - &by);
            prop_assert_eq!((&x * &y).to_big(), &bx * &by);
            if c != 0 {
                prop_assert_eq!((&x / &y).to_big(), &bx / &by);
            }
            prop_assert_eq!(x.cmp(&y), bx.cmp(&by));
        }
    }

    #[test]
    fn overflow_round_trip() {
        let m = Rat::from_i64(i64::MAX);
        let s = &m * &m;
        assert!(matches!(s, Rat::Big(_)));
        let back = &s / &m;
        assert!(matches!(back, Rat::Small(..)));
        assert_eq!(back, m);
        assert_eq!(-Rat::from_i64(i64::MIN), Rat::from_big(-big(i64::MIN, 1)));
    }
}
