//! Truncated Laurent–Puiseux series in `q` and `y`, power series in a single
//! root variable, and series in `u = 2πi·z`.
//!
//! Exponents live on fixed lattices: `q` in steps of `1/8` and `y` in steps of
//! `1/2`, stored as scaled integers (`q8 = 8·exp_q`, `y2 = 2·exp_y`). A
//! [`QYSeries`] is exact for every `q`-exponent strictly below its cap.

use std::collections::BTreeMap;
use std::fmt;

use crate::arith::{factorial, Rat};
use crate::error::{Error, Result};
use crate::poly::{write_terms, Algebra, Module, Poly};

/// Scaled cap standing in for "exact" (no truncation).
pub const INF: i64 = i64::MAX / 4;

/// Denominator of the `q`-exponent lattice.
pub const Q_DEN: i64 = 8;
/// Denominator of the `y`-exponent lattice.
pub const Y_DEN: i64 = 2;

/// Rings whose units can be inverted exactly.
pub trait Invertible: Algebra {
    fn try_inverse(&self) -> Result<Self>;
}

impl Invertible for Rat {
    fn try_inverse(&self) -> Result<Self> {
        self.recip()
    }
}

impl Invertible for Poly<Rat> {
    fn try_inverse(&self) -> Result<Self> {
        if self.len() == 1 {
            if let Some(c) = self.terms().find(|(m, _)| m.is_one()).map(|(_, c)| c) {
                return Ok(Poly::constant(c.recip()?));
            }
        }
        Err(Error::NonUnit(format!("polynomial {self} is not a unit")))
    }
}

#[derive(Clone)]
pub struct QYSeries<C: Module> {
    terms: BTreeMap<(i64, i64), C>,
    cap: i64,
}

/// Converts a rational exponent onto a lattice with denominator `den`.
fn to_lattice(e: &Rat, den: i64) -> Result<i64> {
    let scaled = e * &Rat::from(den);
    scaled
        .to_integer()
        .and_then(|n| i64::try_from(n).ok())
        .ok_or_else(|| Error::InvalidArgument(format!("exponent {e} is not a multiple of 1/{den}")))
}

impl<C: Module> QYSeries<C> {
    /// Empty series, exact below `q^(cap8/8)`.
    pub fn new(cap8: i64) -> Self {
        QYSeries {
            terms: BTreeMap::new(),
            cap: cap8,
        }
    }

    /// Zero series known exactly below `q^n`.
    pub fn zero_to(n: i64) -> Self {
        Self::new(n * Q_DEN)
    }

    pub fn term(q8: i64, y2: i64, c: C, cap8: i64) -> Self {
        let mut s = Self::new(cap8);
        s.add_term(q8, y2, c);
        s
    }

    /// Term with exponents given as exact rationals.
    pub fn term_at(q: &Rat, y: &Rat, c: C, cap8: i64) -> Result<Self> {
        Ok(Self::term(to_lattice(q, Q_DEN)?, to_lattice(y, Y_DEN)?, c, cap8))
    }

    pub fn add_term(&mut self, q8: i64, y2: i64, c: C) {
        if c.is_zero() || q8 >= self.cap {
            return;
        }
        match self.terms.entry((q8, y2)) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign_ref(&c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn cap8(&self) -> i64 {
        self.cap
    }

    /// The truncation cap as an exact `q`-exponent (`None` when exact).
    pub fn cap(&self) -> Option<Rat> {
        (self.cap < INF).then(|| Rat::new(self.cap, Q_DEN))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, q8: i64, y2: i64) -> C {
        self.terms.get(&(q8, y2)).cloned().unwrap_or_else(C::zero)
    }

    /// Coefficient at integer `q`-power `n` and `y`-power 0.
    pub fn coeff_q(&self, n: i64) -> C {
        self.coeff(n * Q_DEN, 0)
    }

    /// Lowest `q`-exponent that may carry a nonzero coefficient.
    pub fn valuation(&self) -> i64 {
        self.terms
            .keys()
            .next()
            .map_or(self.cap, |(q, _)| (*q).min(self.cap))
    }

    pub fn min_y2(&self) -> Option<i64> {
        self.terms.keys().map(|(_, y)| *y).min()
    }

    pub fn max_y2(&self) -> Option<i64> {
        self.terms.keys().map(|(_, y)| *y).max()
    }

    /// Drops all terms at `q`-exponents `>= cap8`.
    pub fn truncate(&self, cap8: i64) -> Self {
        let cap = cap8.min(self.cap);
        QYSeries {
            terms: self
                .terms
                .iter()
                .filter(|((q, _), _)| *q < cap)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
            cap,
        }
    }

    pub fn map_coeffs<D: Module>(&self, f: impl Fn(&C) -> D) -> QYSeries<D> {
        let mut out = QYSeries::new(self.cap);
        for ((q, y), c) in &self.terms {
            out.add_term(*q, *y, f(c));
        }
        out
    }

    /// Generic truncated product driven by a coefficient pairing.
    pub fn mul_with<D: Module, E: Module>(
        &self,
        other: &QYSeries<D>,
        pair: impl Fn(&C, &D) -> E,
    ) -> QYSeries<E> {
        let cap = (self.cap.saturating_add(other.valuation()))
            .min(other.cap.saturating_add(self.valuation()))
            .min(INF);
        let mut out = QYSeries::new(cap);
        for ((qa, ya), ca) in &self.terms {
            for ((qb, yb), cb) in &other.terms {
                let q = qa + qb;
                if q >= cap {
                    // other.terms is sorted by q, nothing further fits
                    break;
                }
                out.add_term(q, ya + yb, pair(ca, cb));
            }
        }
        out
    }

    /// Action of a scalar series.
    pub fn mul_scalar_series(&self, s: &QYSeries<Rat>) -> Self {
        s.mul_with(self, |r, c| c.scale(r))
    }

    /// Multiplies by `q^(q8/8) y^(y2/2)`.
    pub fn shift(&self, q8: i64, y2: i64) -> Self {
        QYSeries {
            terms: self
                .terms
                .iter()
                .map(|((q, y), c)| ((q + q8, y + y2), c.clone()))
                .collect(),
            cap: if self.cap >= INF { INF } else { self.cap + q8 },
        }
    }

    /// Realises `z -> z + τ`, i.e. `y -> q·y`: each `q^a y^b` becomes
    /// `q^(a+b) y^b`.
    ///
    /// The result keeps the input's cap; terms landing at or above it are
    /// dropped and reported through the returned flag. Note that the output
    /// is exact at `q^c y^b` only when `c - b` is below the input cap.
    pub fn shift_y_by_q(&self) -> (Self, bool) {
        let mut out = QYSeries::new(self.cap);
        let mut dropped = false;
        for ((q, y), c) in &self.terms {
            // y2 half-units of y are y2*4 eighths of q
            let nq = q + y * (Q_DEN / Y_DEN);
            if nq >= self.cap {
                dropped = true;
                continue;
            }
            out.add_term(nq, *y, c.clone());
        }
        (out, dropped)
    }

    /// Substitutes `y^k -> exp(k·u)` and collects `u`-powers below `u_cap`.
    pub fn y_to_z(&self, u_cap: u32) -> ZSeries<C> {
        let mut coeffs: Vec<QYSeries<C>> = (0..u_cap).map(|_| QYSeries::new(self.cap)).collect();
        let inv_fact: Vec<Rat> = (0..u_cap).map(|m| factorial(m).recip().unwrap()).collect();
        for ((q, y), c) in &self.terms {
            let k = Rat::new(*y, Y_DEN);
            let mut kp = Rat::one();
            for (m, slot) in coeffs.iter_mut().enumerate() {
                let w = &kp * &inv_fact[m];
                slot.add_term(*q, 0, c.scale(&w));
                kp = &kp * &k;
            }
        }
        ZSeries { coeffs }
    }

    /// Coefficients of `q^(q8/8)` as (y2, coefficient) pairs.
    pub fn q_slice(&self, q8: i64) -> Vec<(i64, C)> {
        self.terms
            .range((q8, i64::MIN)..=(q8, i64::MAX))
            .map(|((_, y), c)| (*y, c.clone()))
            .collect()
    }

    /// Distinct `q`-exponents carrying terms.
    pub fn q_exponents(&self) -> Vec<i64> {
        let mut v: Vec<i64> = self.terms.keys().map(|(q, _)| *q).collect();
        v.dedup();
        v
    }

    /// Term-wise equality, ignoring the caps.
    pub fn same_terms(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl<C: Module> PartialEq for QYSeries<C> {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && self.cap == other.cap
    }
}

impl<C: Module> Module for QYSeries<C> {
    fn zero() -> Self {
        Self::new(INF)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        if other.cap < self.cap {
            self.cap = other.cap;
            self.terms.retain(|(q, _), _| *q < other.cap);
        }
        for ((q, y), c) in &other.terms {
            self.add_term(*q, *y, c.clone());
        }
    }
    fn scale(&self, r: &Rat) -> Self {
        if r.is_zero() {
            return Self::new(self.cap);
        }
        self.map_coeffs(|c| c.scale(r))
    }
}

impl<C: Algebra> QYSeries<C> {
    pub fn one_to(n: i64) -> Self {
        Self::term(0, 0, C::one(), n * Q_DEN)
    }
}

impl<C: Algebra> Algebra for QYSeries<C> {
    fn one() -> Self {
        Self::term(0, 0, C::one(), INF)
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.mul_with(other, |a, b| a.mul_ref(b))
    }
}

impl QYSeries<Rat> {
    /// Geometric-style inverse. The lowest-`q` slice must be a single
    /// monomial with a nonzero coefficient.
    pub fn invert(&self) -> Result<Self> {
        if self.cap >= INF && self.terms.len() > 1 {
            return Err(Error::InvalidArgument(
                "cannot invert an untruncated series with more than one term".into(),
            ));
        }
        let v = self.valuation();
        let slice = self.q_slice(v);
        if slice.len() != 1 || v >= self.cap {
            return Err(Error::NonUnit(format!(
                "leading q-slice of {self} is not a single monomial"
            )));
        }
        let (lead_y, lead_c) = slice.into_iter().next().unwrap();
        let lead_inv = lead_c.recip()?;
        if self.terms.len() == 1 {
            return Ok(QYSeries::term(-v, -lead_y, lead_inv, INF));
        }
        // s = lead·q^v y^b · (1 + t), t of positive q-valuation
        let normalised = self.shift(-v, -lead_y).scale(&lead_inv);
        let mut t = normalised.clone();
        t.add_term(0, 0, -Rat::one());
        let cap = normalised.cap;
        let mut inv = QYSeries::term(0, 0, Rat::one(), cap);
        let mut power = QYSeries::term(0, 0, Rat::one(), cap);
        let tv = t.valuation();
        if tv <= 0 {
            return Err(Error::NonUnit(format!("{self} has no unit leading term")));
        }
        let mut sign = Rat::one();
        loop {
            power = power.mul_ref(&t).truncate(cap);
            if power.is_empty() {
                break;
            }
            sign = -sign;
            inv.add_assign_ref(&power.scale(&sign));
        }
        Ok(inv.shift(-v, -lead_y).scale(&lead_inv))
    }

    /// `exp(s)` for a series with strictly positive `q`-valuation.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeff(0, 0).is_zero() {
            return Err(Error::InvalidArgument("series_exp: nonzero constant term".into()));
        }
        if self.valuation() <= 0 && !self.is_empty() {
            return Err(Error::InvalidArgument(
                "series_exp: terms at q^0 or below do not converge".into(),
            ));
        }
        if self.cap >= INF && !self.is_empty() {
            return Err(Error::InvalidArgument(
                "series_exp: argument must be truncated".into(),
            ));
        }
        let cap = self.cap;
        let mut out = QYSeries::term(0, 0, Rat::one(), cap);
        let mut power = QYSeries::term(0, 0, Rat::one(), cap);
        let mut k = 0u32;
        loop {
            k += 1;
            power = power.mul_ref(self).truncate(cap);
            if power.is_empty() {
                break;
            }
            out.add_assign_ref(&power.scale(&factorial(k).recip()?));
        }
        Ok(out)
    }

    /// Integer powers, negative ones through [`QYSeries::invert`].
    pub fn powi(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.invert()? } else { self.clone() };
        let mut acc = QYSeries::term(0, 0, Rat::one(), INF);
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul_ref(&base);
        }
        Ok(acc)
    }
}

impl Invertible for QYSeries<Rat> {
    fn try_inverse(&self) -> Result<Self> {
        self.invert()
    }
}

fn exponent_str(n: i64, den: i64) -> String {
    let r = Rat::new(n, den);
    if r.is_integer() && !r.is_negative() {
        r.to_string()
    } else {
        format!("({r})")
    }
}

impl<C: Module + fmt::Display> fmt::Display for QYSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items = self.terms.iter().map(|((q, y), c)| {
            let mut parts = Vec::new();
            match *q {
                0 => {}
                8 => parts.push("q".to_string()),
                _ => parts.push(format!("q^{}", exponent_str(*q, Q_DEN))),
            }
            match *y {
                0 => {}
                2 => parts.push("y".to_string()),
                _ => parts.push(format!("y^{}", exponent_str(*y, Y_DEN))),
            }
            let m = if parts.is_empty() { "1".to_string() } else { parts.join("*") };
            (m, c)
        });
        write_terms(f, items, "*")?;
        if self.cap < INF {
            write!(f, " + O(q^{})", exponent_str(self.cap, Q_DEN))?;
        }
        Ok(())
    }
}

impl<C: Module + fmt::Display> fmt::Debug for QYSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Power series `Σ f_k·v^k` in one root variable, exact through `v^degree`.
#[derive(Clone, PartialEq, Debug)]
pub struct RootSeries<R> {
    coeffs: Vec<R>,
}

impl<R: Algebra> RootSeries<R> {
    /// Builds from coefficients `f_0..f_degree`.
    pub fn new(mut coeffs: Vec<R>, degree: u32) -> Self {
        coeffs.resize(degree as usize + 1, R::zero());
        RootSeries { coeffs }
    }

    pub fn from_fn(degree: u32, f: impl Fn(u32) -> R) -> Self {
        RootSeries {
            coeffs: (0..=degree).map(f).collect(),
        }
    }

    pub fn one(degree: u32) -> Self {
        Self::from_fn(degree, |k| if k == 0 { R::one() } else { R::zero() })
    }

    /// `exp(a·v)` with rational `a`, scaled by `scalar`.
    pub fn exp_linear(a: &Rat, scalar: &R, degree: u32) -> Self {
        Self::from_fn(degree, |k| scalar.scale(&(a.pow(k as i32) * factorial(k).recip().unwrap())))
    }

    pub fn degree(&self) -> u32 {
        self.coeffs.len() as u32 - 1
    }

    pub fn coeff(&self, k: u32) -> &R {
        &self.coeffs[k as usize]
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.degree().min(other.degree());
        Self::from_fn(n, |k| self.coeff(k).add_ref(other.coeff(k)))
    }

    pub fn scale(&self, r: &Rat) -> Self {
        Self::from_fn(self.degree(), |k| self.coeff(k).scale(r))
    }

    pub fn mul_coeff(&self, c: &R) -> Self {
        Self::from_fn(self.degree(), |k| self.coeff(k).mul_ref(c))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.degree().min(other.degree());
        Self::from_fn(n, |k| {
            let mut acc = R::zero();
            for i in 0..=k {
                let (a, b) = (self.coeff(i), other.coeff(k - i));
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                acc.add_assign_ref(&a.mul_ref(b));
            }
            acc
        })
    }

    /// Divides by `v`, losing one degree; the constant term must vanish.
    pub fn div_by_var(&self) -> Result<Self> {
        if !self.coeff(0).is_zero() {
            return Err(Error::InvalidArgument("series not divisible by its variable".into()));
        }
        if self.degree() == 0 {
            return Err(Error::InsufficientTruncation("no coefficients left after division".into()));
        }
        Ok(RootSeries {
            coeffs: self.coeffs[1..].to_vec(),
        })
    }

    /// Multiplies by `v`, gaining one degree of validity.
    pub fn mul_by_var(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(R::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        RootSeries { coeffs }
    }

    pub fn truncate(&self, degree: u32) -> Self {
        Self::from_fn(degree.min(self.degree()), |k| self.coeff(k).clone())
    }

    /// `exp` of a series with zero constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeff(0).is_zero() {
            return Err(Error::InvalidArgument("series_exp: nonzero constant term".into()));
        }
        let n = self.degree();
        let mut out = Self::one(n);
        let mut power = Self::one(n);
        for k in 1..=n {
            power = power.mul(self);
            out = out.add(&power.scale(&factorial(k).recip()?));
        }
        Ok(out)
    }
}

impl<R: Invertible> RootSeries<R> {
    pub fn invert(&self) -> Result<Self> {
        let inv0 = self.coeff(0).try_inverse()?;
        let n = self.degree();
        let mut out: Vec<R> = vec![inv0.clone()];
        for k in 1..=n {
            let mut acc = R::zero();
            for i in 1..=k {
                let a = self.coeff(i);
                if a.is_zero() {
                    continue;
                }
                acc.add_assign_ref(&a.mul_ref(&out[(k - i) as usize]));
            }
            out.push(acc.mul_ref(&inv0).neg_ref());
        }
        Ok(RootSeries { coeffs: out })
    }
}

/// Series in `u = 2πi·z` whose coefficients are `q`-series without `y`.
#[derive(Clone, PartialEq, Debug)]
pub struct ZSeries<C: Module> {
    coeffs: Vec<QYSeries<C>>,
}

impl<C: Module> ZSeries<C> {
    pub fn new(coeffs: Vec<QYSeries<C>>) -> Self {
        ZSeries { coeffs }
    }

    pub fn u_cap(&self) -> u32 {
        self.coeffs.len() as u32
    }

    pub fn coeff(&self, n: u32) -> &QYSeries<C> {
        &self.coeffs[n as usize]
    }

    pub fn coeffs(&self) -> &[QYSeries<C>] {
        &self.coeffs
    }

    /// Product with a scalar `u`-series, truncated to the shorter `u`-range.
    pub fn mul_scalar(&self, other: &ZSeries<Rat>) -> Self {
        let n = self.u_cap().min(other.u_cap());
        let coeffs = (0..n)
            .map(|k| {
                let mut acc: Option<QYSeries<C>> = None;
                for i in 0..=k {
                    let term = self.coeff(i).mul_scalar_series(other.coeff(k - i));
                    match acc.as_mut() {
                        None => acc = Some(term),
                        Some(a) => a.add_assign_ref(&term),
                    }
                }
                acc.unwrap()
            })
            .collect();
        ZSeries { coeffs }
    }
}

impl<C: Algebra> ZSeries<C> {
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.u_cap().min(other.u_cap());
        let coeffs = (0..n)
            .map(|k| {
                let mut acc = QYSeries::<C>::zero();
                for i in 0..=k {
                    acc.add_assign_ref(&self.coeff(i).mul_ref(other.coeff(k - i)));
                }
                acc
            })
            .collect();
        ZSeries { coeffs }
    }
}

impl ZSeries<Rat> {
    /// `exp` of a `u`-series with vanishing `u^0` coefficient.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs.is_empty() && !self.coeff(0).is_empty() {
            return Err(Error::InvalidArgument("series_exp: nonzero constant term".into()));
        }
        let n = self.u_cap();
        let cap = self.coeffs.iter().map(|c| c.cap8()).min().unwrap_or(INF);
        let unit = |k: u32| {
            if k == 0 {
                QYSeries::term(0, 0, Rat::one(), cap)
            } else {
                QYSeries::new(cap)
            }
        };
        let mut out = ZSeries::new((0..n).map(unit).collect());
        let mut power = out.clone();
        for k in 1..n {
            power = power.mul(self);
            let scaled = ZSeries::new(
                power
                    .coeffs
                    .iter()
                    .map(|c| c.scale(&factorial(k).recip().unwrap()))
                    .collect(),
            );
            out = ZSeries::new(
                out.coeffs
                    .iter()
                    .zip(&scaled.coeffs)
                    .map(|(a, b)| a.add_ref(b))
                    .collect(),
            );
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, c: i64, cap: i64) -> QYSeries<Rat> {
        QYSeries::term(n * Q_DEN, 0, Rat::from(c), cap * Q_DEN)
    }

    fn y_half(k: i64, c: i64) -> QYSeries<Rat> {
        QYSeries::term(0, k, Rat::from(c), INF)
    }

    #[test]
    fn geometric_inverse() {
        let s = q(0, 1, 6).sub_ref(&q(1, 1, 6));
        let inv = s.invert().unwrap();
        for n in 0..6 {
            assert_eq!(inv.coeff_q(n), Rat::one());
        }
        assert_eq!(inv.cap8(), 48);
        let back = s.mul_ref(&inv);
        assert_eq!(back, QYSeries::one_to(6));
    }

    #[test]
    fn invert_rejects_non_unit_leading_slice() {
        let s = y_half(1, 1).sub_ref(&y_half(-1, 1)).truncate(40);
        assert!(matches!(s.invert(), Err(Error::NonUnit(_))));
        let z = QYSeries::<Rat>::zero_to(3);
        assert!(z.invert().is_err());
    }

    #[test]
    fn invert_shifted_leading_term() {
        // q^(1/8) (1 - 3q) inverted has leading q^(-1/8)
        let s = QYSeries::term(1, 0, Rat::one(), 41).add_ref(&QYSeries::term(9, 0, Rat::from(-3), 41));
        let inv = s.invert().unwrap();
        assert_eq!(inv.coeff(-1, 0), Rat::one());
        assert_eq!(inv.coeff(7, 0), Rat::from(3));
        assert_eq!(inv.cap8(), 39);
    }

    #[test]
    fn exp_of_zero_and_group_law() {
        let zero = QYSeries::<Rat>::zero_to(5);
        assert_eq!(zero.exp().unwrap(), QYSeries::one_to(5));
        let a = q(1, 1, 5).add_ref(&QYSeries::term(16, 2, Rat::new(1, 3), 40));
        let prod = a.exp().unwrap().mul_ref(&a.neg_ref().exp().unwrap());
        assert_eq!(prod, QYSeries::one_to(5));
        assert!(q(0, 1, 5).exp().is_err());
    }

    #[test]
    fn shift_y_by_q_terms() {
        let (s, dropped) = QYSeries::term(0, 2, Rat::one(), 32).shift_y_by_q();
        assert_eq!(s.coeff(8, 2), Rat::one());
        assert!(!dropped);
        let (s, _) = QYSeries::term(0, -1, Rat::one(), 32).shift_y_by_q();
        assert_eq!(s.coeff(-4, -1), Rat::one());
        let (_, dropped) = QYSeries::term(24, 4, Rat::one(), 32).shift_y_by_q();
        assert!(dropped);
    }

    #[test]
    fn y_to_z_of_sinh() {
        // y^(1/2) - y^(-1/2) = 2 sinh(u/2) = u + u^3/24 + u^5/1920
        let s = y_half(1, 1).sub_ref(&y_half(-1, 1));
        let z = s.y_to_z(6);
        let expect = [
            Rat::zero(),
            Rat::one(),
            Rat::zero(),
            Rat::new(1, 24),
            Rat::zero(),
            Rat::new(1, 1920),
        ];
        for (n, e) in expect.iter().enumerate() {
            assert_eq!(z.coeff(n as u32).coeff(0, 0), *e, "u^{n}");
        }
        let one = QYSeries::<Rat>::one().y_to_z(3);
        assert_eq!(one.coeff(0).coeff(0, 0), Rat::one());
        assert!(one.coeff(1).is_empty());
    }

    #[test]
    fn exp_of_g2_like_u_series() {
        // l·G2·u^2 with G2 = -1/24 + q + ..., l = 3, truncated at u^3
        let l = Rat::from(3);
        let g2 = QYSeries::term(0, 0, Rat::new(-1, 24), 16).add_ref(&q(1, 1, 2));
        let zero = QYSeries::<Rat>::new(16);
        let arg = ZSeries::new(vec![zero.clone(), zero, g2.scale(&l)]);
        let e = arg.exp().unwrap();
        assert_eq!(e.coeff(0).coeff_q(0), Rat::one());
        assert_eq!(e.coeff(2).coeff_q(0), Rat::new(-3, 24));
        assert_eq!(e.coeff(2).coeff_q(1), Rat::from(3));
    }

    #[test]
    fn root_series_inverse_and_exp() {
        let e = RootSeries::exp_linear(&Rat::one(), &Rat::one(), 6);
        let inv = e.invert().unwrap();
        assert_eq!(inv, RootSeries::exp_linear(&-Rat::one(), &Rat::one(), 6));
        let lin = RootSeries::new(vec![Rat::zero(), Rat::one()], 6);
        assert_eq!(lin.exp().unwrap(), e);
    }

    #[test]
    fn display_is_canonical() {
        let s = QYSeries::term(1, 1, Rat::one(), 16)
            .add_ref(&QYSeries::term(1, -1, Rat::from(-1), 16))
            .add_ref(&QYSeries::term(0, 0, Rat::new(1, 240), 16));
        assert_eq!(s.to_string(), "1/240 - q^(1/8)*y^(-1/2) + q^(1/8)*y^(1/2) + O(q^2)");
        let s = QYSeries::term(8, 0, Rat::one(), INF);
        assert_eq!(s.to_string(), "q");
    }

    fn small_series() -> impl Strategy<Value = QYSeries<Rat>> {
        proptest::collection::vec((0i64..24, -4i64..4, -5i64..5), 0..6).prop_map(|ts| {
            let mut s = QYSeries::new(32);
            for (qe, ye, c) in ts {
                s.add_term(qe, ye, Rat::from(c));
            }
            s
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in small_series(), b in small_series(), c in small_series()) {
            prop_assert_eq!(a.mul_ref(&b).mul_ref(&c), a.mul_ref(&b.mul_ref(&c)));
            prop_assert_eq!(a.mul_ref(&b.add_ref(&c)), a.mul_ref(&b).add_ref(&a.mul_ref(&c)));
            prop_assert_eq!(a.mul_ref(&b), b.mul_ref(&a));
        }

        #[test]
        fn y_to_z_is_multiplicative(a in small_series(), b in small_series()) {
            let lhs = a.mul_ref(&b).y_to_z(5);
            let rhs = a.y_to_z(5).mul(&b.y_to_z(5));
            for n in 0..5 {
                prop_assert!(lhs.coeff(n).same_terms(&rhs.coeff(n).truncate(lhs.coeff(n).cap8())));
            }
        }

        #[test]
        fn exp_is_additive(a in small_series(), b in small_series()) {
            // keep only positive q-exponents so the exponentials converge
            let pos = |s: &QYSeries<Rat>| {
                let mut out = QYSeries::new(32);
                for ((qe, ye), c) in s.terms() {
                    if *qe > 0 { out.add_term(*qe, *ye, c.clone()); }
                }
                out
            };
            let (a, b) = (pos(&a), pos(&b));
            let lhs = a.add_ref(&b).exp().unwrap();
            let rhs = a.exp().unwrap().mul_ref(&b.exp().unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
