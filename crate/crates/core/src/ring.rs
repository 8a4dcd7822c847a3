//! Minimal algebraic traits shared by scalars, polynomials and series.

use std::fmt::Debug;

use num_traits::{One, Zero};

use crate::scalar::Q;

/// A commutative ring with a unit that contains Q.
pub trait Ring: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
    fn from_q(c: &Q) -> Self;

    fn scaled(&self, c: &Q) -> Self {
        self.times(&Self::from_q(c))
    }

    fn from_i64(n: i64) -> Self {
        Self::from_q(&crate::scalar::q(n))
    }

    fn add_to(&mut self, o: &Self) {
        *self = self.plus(o);
    }

    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.times(self);
        }
        acc
    }
}

/// Rings in which nonzero elements (or at least units) can be inverted.
pub trait Field: Ring {
    fn inverse(&self) -> Option<Self>;
}

impl Ring for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn from_q(c: &Q) -> Self {
        c.clone()
    }
    fn scaled(&self, c: &Q) -> Self {
        self * c
    }
}

impl Field for Q {
    fn inverse(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}
