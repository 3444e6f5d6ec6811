//! Exact rational scalar used by all combinatorial geometry.
//!
//! Hull construction, face membership and the regularity LP must be exact:
//! a decomposition is accepted or rejected on sign tests, and certificates
//! are replayed by substitution. `Rat` keeps values as `i128` ratios while
//! they fit (the common case: inputs are small integers) and promotes to
//! arbitrary precision when a checked operation overflows, so exactness
//! never depends on input size while the fast path stays allocation-free.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::{BigRational, Ratio};
use num::traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, ToPrimitive, Zero};

type Small = Ratio<i128>;

#[derive(Clone, Debug)]
enum Repr {
    Small(Small),
    Big(BigRational),
}

/// Exact rational number.
#[derive(Clone, Debug)]
pub struct Rat(Repr);

impl Rat {
    pub fn zero() -> Self {
        Rat::int(0)
    }

    pub fn one() -> Self {
        Rat::int(1)
    }

    pub fn int(n: i64) -> Self {
        Rat(Repr::Small(Ratio::from_integer(n as i128)))
    }

    /// `num/den`. Panics when `den == 0`.
    pub fn frac(num: i64, den: i64) -> Self {
        assert!(den != 0, "rational with zero denominator");
        Rat(Repr::Small(Ratio::new(num as i128, den as i128)))
    }

    fn from_big(b: BigRational) -> Self {
        // Results of big arithmetic are already reduced with positive
        // denominator, so the raw constructor is safe here.
        if let (Some(n), Some(d)) = (b.numer().to_i128(), b.denom().to_i128()) {
            Rat(Repr::Small(Ratio::new_raw(n, d)))
        } else {
            Rat(Repr::Big(b))
        }
    }

    fn big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(r) => {
                BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
            }
            Repr::Big(b) => b.clone(),
        }
    }

    /// Exact conversion; `None` for NaN or infinities.
    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Rat::from_big)
    }

    /// Numerator and denominator in lowest terms, when both fit in `i128`.
    pub fn to_fraction(&self) -> Option<(i128, i128)> {
        match &self.0 {
            Repr::Small(r) => Some((*r.numer(), *r.denom())),
            Repr::Big(b) => Some((b.numer().to_i128()?, b.denom().to_i128()?)),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(r) => r.to_f64().unwrap_or(f64::NAN),
            Repr::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => r.is_zero(),
            Repr::Big(b) => b.is_zero(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => r.is_positive(),
            Repr::Big(b) => b.is_positive(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => r.is_negative(),
            Repr::Big(b) => b.is_negative(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        &Rat::one() / self
    }

    /// Integer power with the usual `x^0 = 1` convention.
    pub fn pow(&self, exp: i64) -> Self {
        if exp == 0 {
            return Rat::one();
        }
        if exp < 0 {
            return self.recip().pow(-exp);
        }
        let mut acc = Rat::one();
        let mut base = self.clone();
        let mut e = exp as u64;
        loop {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e == 0 {
                return acc;
            }
            base = &base * &base;
        }
    }

    /// True when the value is an integer that fits in `i64`.
    fn as_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(r) => {
                if *r.denom() == 1 {
                    i64::try_from(*r.numer()).ok()
                } else {
                    None
                }
            }
            Repr::Big(_) => None,
        }
    }
}

fn binop(
    a: &Rat,
    b: &Rat,
    small: impl Fn(&Small, &Small) -> Option<Small>,
    big: impl Fn(&BigRational, &BigRational) -> BigRational,
) -> Rat {
    if let (Repr::Small(x), Repr::Small(y)) = (&a.0, &b.0) {
        if let Some(r) = small(x, y) {
            return Rat(Repr::Small(r));
        }
    }
    Rat::from_big(big(&a.big(), &b.big()))
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                binop(self, rhs, |x, y| x.$checked(y), |x, y| x.$method(y))
            }
        }
        impl std::ops::$trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                (&self).$method(&rhs)
            }
        }
        impl std::ops::$trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                (&self).$method(rhs)
            }
        }
    };
}

impl_binop!(Add, add, checked_add);
impl_binop!(Sub, sub, checked_sub);
impl_binop!(Mul, mul, checked_mul);

impl std::ops::Div for &Rat {
    type Output = Rat;
    fn div(self, rhs: &Rat) -> Rat {
        assert!(!rhs.is_zero(), "division by zero");
        binop(self, rhs, |x, y| x.checked_div(y), |x, y| x / y)
    }
}
impl std::ops::Div for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        &self / &rhs
    }
}
impl std::ops::Div<&Rat> for Rat {
    type Output = Rat;
    fn div(self, rhs: &Rat) -> Rat {
        &self / rhs
    }
}

impl std::ops::Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match &self.0 {
            // i128::MIN never appears: small values originate from i64 or
            // from normalized checked results, whose negation is checked here.
            Repr::Small(r) => match r.numer().checked_neg() {
                Some(n) => Rat(Repr::Small(Ratio::new_raw(n, *r.denom()))),
                None => Rat::from_big(-self.big()),
            },
            Repr::Big(b) => Rat::from_big(-b),
        }
    }
}
impl std::ops::Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        -&self
    }
}

impl std::ops::AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        *self = &*self + rhs;
    }
}
impl std::ops::SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        *self = &*self - rhs;
    }
}
impl std::ops::MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, rhs: &Rat) {
        *self = &*self * rhs;
    }
}

impl PartialEq for Rat {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Rat {}

impl Ord for Rat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            // Ratio's Ord avoids overflow internally.
            (Repr::Small(x), Repr::Small(y)) => x.cmp(y),
            _ => self.big().cmp(&other.big()),
        }
    }
}
impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(r) => {
                if *r.denom() == 1 {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Repr::Big(b) => {
                if b.denom() == &BigInt::from(1) {
                    write!(f, "{}", b.numer())
                } else {
                    write!(f, "{}/{}", b.numer(), b.denom())
                }
            }
        }
    }
}

impl FromStr for Rat {
    type Err = String;

    /// Accepts `"p"` and `"p/q"` with arbitrarily large integers.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let bad = || format!("malformed rational `{s}`");
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num = BigInt::from_str(num).map_err(|_| bad())?;
        let den = BigInt::from_str(den).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(format!("malformed rational `{s}`: zero denominator"));
        }
        Ok(Rat::from_big(BigRational::new(num, den)))
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::int(n)
    }
}

impl serde::Serialize for Rat {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self.as_i64() {
            Some(n) => ser.serialize_i64(n),
            None => ser.serialize_str(&self.to_string()),
        }
    }
}

impl<'de> serde::Deserialize<'de> for Rat {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = Rat;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "an integer, a finite float, or a `p/q` string")
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> std::result::Result<Rat, E> {
                Ok(Rat::int(v))
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<Rat, E> {
                i64::try_from(v)
                    .map(Rat::int)
                    .map_err(|_| E::custom(format!("integer {v} out of range")))
            }
            fn visit_f64<E: serde::de::Error>(self, v: f64) -> std::result::Result<Rat, E> {
                Rat::from_f64(v).ok_or_else(|| E::custom(format!("malformed rational `{v}`")))
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<Rat, E> {
                v.parse().map_err(E::custom)
            }
        }
        de.deserialize_any(V)
    }
}

/// Sum of a slice, exactly.
pub fn rat_sum<'a, I: IntoIterator<Item = &'a Rat>>(items: I) -> Rat {
    let mut acc = Rat::zero();
    for x in items {
        acc += x;
    }
    acc
}

/// Dot product of equal-length slices.
pub fn rat_dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        acc += &(x * y);
    }
    acc
}
