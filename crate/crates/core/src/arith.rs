//! Exact rational scalars and the number-theoretic helpers built on them.
//!
//! [`Rat`] is a thin wrapper around [`BigRational`] that is always kept in
//! lowest terms with a positive denominator, and that prints in the exact
//! `p/q` (or `p`) form used by every textual output of the crate.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number in lowest terms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        Rat(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Rat(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NonUnit("division by zero".into()));
        }
        Ok(Rat(self.0.recip()))
    }

    pub fn pow(&self, exp: i32) -> Self {
        Rat(num_traits::Pow::pow(&self.0, exp))
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.to_integer())
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_int(n)
    }
}

impl From<i32> for Rat {
    fn from(n: i32) -> Self {
        Rat::from_int(n)
    }
}

impl From<u32> for Rat {
    fn from(n: u32) -> Self {
        Rat::from_int(n)
    }
}

impl From<usize> for Rat {
    fn from(n: usize) -> Self {
        Rat::from_int(BigInt::from(n))
    }
}

impl From<BigInt> for Rat {
    fn from(n: BigInt) -> Self {
        Rat::from_int(n)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            line: 1,
            column: 1,
            message: format!("invalid rational {s:?}"),
        };
        let s = s.trim();
        match s.split_once('/') {
            None => Ok(Rat::from_int(s.parse::<BigInt>().map_err(|_| bad())?)),
            Some((p, q)) => {
                let p: BigInt = p.parse().map_err(|_| bad())?;
                let q: BigInt = q.parse().map_err(|_| bad())?;
                if q.is_zero() {
                    return Err(bad());
                }
                Ok(Rat::new(p, q))
            }
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $trait<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat($trait::$method(self.0, rhs.0))
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat($trait::$method(self.0, &rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, rhs: &Rat) {
        self.0 *= &rhs.0;
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl Product for Rat {
    fn product<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::one(), |acc, x| acc * x)
    }
}

/// Binomial coefficient `C(n, k)`, zero outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> Result<BigInt> {
    if n < 0 {
        return Err(Error::InvalidArgument(format!(
            "binomial: n must be nonnegative, got {n}"
        )));
    }
    if k < 0 || k > n {
        return Ok(BigInt::zero());
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Ok(acc)
}

/// `C(n, k)` as a rational, for call sites that already validated `n >= 0`.
pub(crate) fn binomial_rat(n: i64, k: i64) -> Rat {
    Rat::from_int(binomial(n, k).expect("nonnegative n"))
}

/// `sigma_k(n) = sum of m^k over the positive divisors m of n`.
pub fn divisor_power_sum(k: u32, n: i64) -> Result<BigInt> {
    if n <= 0 {
        return Err(Error::InvalidArgument(format!(
            "divisor_power_sum: n must be positive, got {n}"
        )));
    }
    let mut total = BigInt::zero();
    let mut m = 1i64;
    while m * m <= n {
        if n % m == 0 {
            total += num_traits::pow(BigInt::from(m), k as usize);
            let other = n / m;
            if other != m {
                total += num_traits::pow(BigInt::from(other), k as usize);
            }
        }
        m += 1;
    }
    Ok(total)
}

/// Bernoulli numbers `B_0, B_1, ...` with `B_1 = -1/2`, filled lazily.
fn bernoulli_table() -> &'static Mutex<Vec<Rat>> {
    static TABLE: OnceLock<Mutex<Vec<Rat>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(vec![Rat::one()]))
}

/// Bernoulli number `B_k` for even `k >= 2`, normalised so that
/// `B_2 = 1/6`, `B_4 = -1/30` (the constant term of `G_{2k}` is `-B_{2k}/4k`).
pub fn bernoulli(k: u32) -> Result<Rat> {
    if k < 2 || k % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "bernoulli: index must be even and at least 2, got {k}"
        )));
    }
    let mut table = bernoulli_table().lock().expect("bernoulli cache poisoned");
    while table.len() <= k as usize {
        // sum_{j=0}^{n} C(n+1, j) B_j = 0, solved for B_n
        let n = table.len() as i64;
        let partial: Rat = table
            .iter()
            .enumerate()
            .map(|(j, b)| binomial_rat(n + 1, j as i64) * b)
            .sum();
        table.push(-partial / Rat::from(n + 1));
    }
    Ok(table[k as usize].clone())
}

/// Factorial as a rational, used for Taylor coefficients.
pub(crate) fn factorial(n: u32) -> Rat {
    Rat::from_int((1..=n as u64).fold(BigInt::one(), |acc, i| acc * i))
}


#[cfg(test)]
mod tests {
    use super::*;

    fn pascal(n: usize) -> Vec<Vec<i64>> {
        let mut rows = vec![vec![1i64]];
        for i in 1..=n {
            let prev = &rows[i - 1];
            let mut row = vec![1i64; i + 1];
            for j in 1..i {
                row[j] = prev[j - 1] + prev[j];
            }
            rows.push(row);
        }
        rows
    }

    #[test]
    fn binomial_matches_pascal_triangle() {
        let rows = pascal(20);
        for (n, row) in rows.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                assert_eq!(binomial(n as i64, k as i64).unwrap(), BigInt::from(*v));
            }
        }
        assert_eq!(binomial(5, 2).unwrap(), BigInt::from(10));
        assert_eq!(binomial(3, 5).unwrap(), BigInt::zero());
        assert_eq!(binomial(7, 0).unwrap(), BigInt::one());
        assert_eq!(binomial(4, -1).unwrap(), BigInt::zero());
        assert!(matches!(binomial(-1, 0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn divisor_sums() {
        assert_eq!(divisor_power_sum(3, 4).unwrap(), BigInt::from(73));
        assert_eq!(divisor_power_sum(1, 6).unwrap(), BigInt::from(12));
        for k in 0..6 {
            assert_eq!(divisor_power_sum(k, 1).unwrap(), BigInt::one());
        }
        assert!(divisor_power_sum(1, 0).is_err());
        assert!(divisor_power_sum(1, -3).is_err());
    }

    #[test]
    fn divisor_sum_is_multiplicative() {
        for k in 0..5u32 {
            for m in 1..30i64 {
                for n in 1..30i64 {
                    if num_integer::gcd(m, n) == 1 {
                        assert_eq!(
                            divisor_power_sum(k, m * n).unwrap(),
                            divisor_power_sum(k, m).unwrap() * divisor_power_sum(k, n).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(2).unwrap(), Rat::new(1, 6));
        assert_eq!(bernoulli(4).unwrap(), Rat::new(-1, 30));
        assert_eq!(bernoulli(6).unwrap(), Rat::new(1, 42));
        assert_eq!(bernoulli(12).unwrap(), Rat::new(-691, 2730));
        assert_eq!(-bernoulli(4).unwrap() / Rat::from(8), Rat::new(1, 240));
        assert!(bernoulli(3).is_err());
        assert!(bernoulli(0).is_err());
    }

    #[test]
    fn bernoulli_recurrence_up_to_30() {
        bernoulli(30).unwrap();
        let table = bernoulli_table().lock().unwrap().clone();
        for n in 1..=30i64 {
            let s: Rat = (0..=n as usize)
                .map(|j| binomial_rat(n + 1, j as i64) * &table[j])
                .sum();
            assert!(s.is_zero(), "recurrence fails at n={n}");
        }
    }

    #[test]
    fn display_and_parse() {
        assert_eq!(Rat::new(2, 4).to_string(), "1/2");
        assert_eq!(Rat::new(6, -3).to_string(), "-2");
        assert_eq!(Rat::zero().to_string(), "0");
        assert_eq!("-7/21".parse::<Rat>().unwrap(), Rat::new(-1, 3));
        assert!("1/0".parse::<Rat>().is_err());
        assert!("x".parse::<Rat>().is_err());
    }

    proptest::proptest! {
        #[test]
        fn addition_is_exact(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000) {
            let sum = Rat::new(a, b) + Rat::new(c, d);
            let scaled = sum * Rat::from(b * d);
            proptest::prop_assert_eq!(scaled, Rat::from(a * d + c * b));
        }

        #[test]
        fn display_round_trips(a in -100000i64..100000, b in 1i64..100000) {
            let r = Rat::new(a, b);
            proptest::prop_assert_eq!(r.to_string().parse::<Rat>().unwrap(), r);
        }
    }
}
