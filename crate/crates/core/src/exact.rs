//! Exact arithmetic in the field ℚ(√2).
//!
//! At the measurement angle π/4 every coefficient of the synthesis problem is
//! of the form `p/q + (r/s)·√2`, so the linear program can be pivoted without
//! rounding and its optimum reported in closed form.

use alloc::format;
use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `rat + rad2·√2` with arbitrary-precision rational parts.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Rad2 {
    pub rat: BigRational,
    pub rad2: BigRational,
}

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

impl Rad2 {
    pub fn new(rat: BigRational, rad2: BigRational) -> Self {
        Self { rat, rad2 }
    }

    /// `p/q + (r/s)·√2`.
    pub fn from_parts(p: i64, q: i64, r: i64, s: i64) -> Self {
        Self { rat: ratio(p, q), rad2: ratio(r, s) }
    }

    pub fn int(v: i64) -> Self {
        Self::from_parts(v, 1, 0, 1)
    }

    pub fn sqrt2() -> Self {
        Self::from_parts(0, 1, 1, 1)
    }

    pub fn zero() -> Self {
        Self { rat: BigRational::zero(), rad2: BigRational::zero() }
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.rad2.is_zero()
    }

    /// Conjugate `a - b√2`.
    pub fn conjugate(&self) -> Self {
        Self { rat: self.rat.clone(), rad2: -self.rad2.clone() }
    }

    /// Field norm `a² - 2b²`, zero only for zero.
    pub fn norm(&self) -> BigRational {
        &self.rat * &self.rat - BigRational::from_integer(BigInt::from(2)) * &self.rad2 * &self.rad2
    }

    pub fn signum(&self) -> Ordering {
        let a = self.rat.cmp(&BigRational::zero());
        let b = self.rad2.cmp(&BigRational::zero());
        match (a, b) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (x, y) if x == y => x,
            // Opposite signs: the larger of a² and 2b² wins.
            (sa, _) => {
                let a2 = &self.rat * &self.rat;
                let b2 = BigRational::from_integer(BigInt::from(2)) * &self.rad2 * &self.rad2;
                match a2.cmp(&b2) {
                    Ordering::Greater => sa,
                    Ordering::Less => sa.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.rat.to_f64().unwrap_or(f64::NAN);
        let b = self.rad2.to_f64().unwrap_or(f64::NAN);
        a + b * core::f64::consts::SQRT_2
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "division by zero in Q(sqrt2)");
        let n = self.norm();
        Self { rat: &self.rat / &n, rad2: -(&self.rad2 / &n) }
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// `(p, q, r, s)` with `p/q + (r/s)√2`, when every part fits in `i64`.
    pub fn to_i64_parts(&self) -> Option<(i64, i64, i64, i64)> {
        Some((
            self.rat.numer().to_i64()?,
            self.rat.denom().to_i64()?,
            self.rad2.numer().to_i64()?,
            self.rad2.denom().to_i64()?,
        ))
    }

    /// Decimal-string parts, for values that overflow `i64`.
    pub fn to_string_parts(&self) -> [String; 4] {
        [
            format!("{}", self.rat.numer()),
            format!("{}", self.rat.denom()),
            format!("{}", self.rad2.numer()),
            format!("{}", self.rad2.denom()),
        ]
    }
}

impl Default for Rad2 {
    fn default() -> Self {
        Self::zero()
    }
}

impl PartialOrd for Rad2 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rad2 {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl fmt::Display for Rad2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rat.is_zero(), self.rad2.is_zero()) {
            (_, true) => write!(f, "{}", self.rat),
            (true, false) => write!(f, "{}√2", self.rad2),
            (false, false) => {
                if self.rad2.is_negative() {
                    write!(f, "{} - {}√2", self.rat, -self.rad2.clone())
                } else {
                    write!(f, "{} + {}√2", self.rat, self.rad2)
                }
            }
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<'a> $tr<&'a Rad2> for &'a Rad2 {
            type Output = Rad2;
            fn $method(self, rhs: &'a Rad2) -> Rad2 {
                let f: fn(&Rad2, &Rad2) -> Rad2 = $body;
                f(self, rhs)
            }
        }
        impl $tr<Rad2> for Rad2 {
            type Output = Rad2;
            fn $method(self, rhs: Rad2) -> Rad2 {
                $tr::$method(&self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| Rad2 { rat: &a.rat + &b.rat, rad2: &a.rad2 + &b.rad2 });
forward_binop!(Sub, sub, |a, b| Rad2 { rat: &a.rat - &b.rat, rad2: &a.rad2 - &b.rad2 });
forward_binop!(Mul, mul, |a, b| {
    let two = BigRational::from_integer(BigInt::from(2));
    Rad2 {
        rat: &a.rat * &b.rat + two * &a.rad2 * &b.rad2,
        rad2: &a.rat * &b.rad2 + &a.rad2 * &b.rat,
    }
});
forward_binop!(Div, div, |a, b| a * &b.recip());

impl Neg for Rad2 {
    type Output = Rad2;
    fn neg(self) -> Rad2 {
        Rad2 { rat: -self.rat, rad2: -self.rad2 }
    }
}

impl One for Rad2 {
    fn one() -> Self {
        Rad2::one()
    }
}

impl Zero for Rad2 {
    fn zero() -> Self {
        Rad2::zero()
    }
    fn is_zero(&self) -> bool {
        Rad2::is_zero(self)
    }
}
