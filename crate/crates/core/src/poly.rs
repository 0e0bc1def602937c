//! Sparse multivariate polynomials over an arbitrary coefficient module.
//!
//! The same [`Poly`] type carries Chern-class polynomials (variables `c_i`,
//! `w_j` and formal roots), the `y_1..y_g` polynomials of the pluri-genera,
//! and, through [`Form`], the linear combinations of Chern-number symbols that
//! integration over a symbolic manifold produces.

use std::collections::BTreeMap;
use std::fmt;

use crate::arith::Rat;

/// A Q-vector space: the minimum needed to serve as a coefficient.
pub trait Module: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign_ref(&mut self, other: &Self);
    fn scale(&self, r: &Rat) -> Self;

    fn neg_ref(&self) -> Self {
        self.scale(&-Rat::one())
    }

    fn sub_ref(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_ref(&other.neg_ref());
        out
    }

    fn add_ref(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_ref(other);
        out
    }
}

/// A commutative Q-algebra.
pub trait Algebra: Module {
    fn one() -> Self;
    fn mul_ref(&self, other: &Self) -> Self;

    fn from_rat(r: &Rat) -> Self {
        Self::one().scale(r)
    }

    fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul_ref(self);
        }
        acc
    }
}

impl Module for Rat {
    fn zero() -> Self {
        Rat::zero()
    }
    fn is_zero(&self) -> bool {
        Rat::is_zero(self)
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn scale(&self, r: &Rat) -> Self {
        self * r
    }
}

impl Algebra for Rat {
    fn one() -> Self {
        Rat::one()
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
}

/// Polynomial variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// Chern class `c_k` of the tangent bundle, weight `k`.
    C(u8),
    /// Chern class `w_k` of the twisting bundle, weight `k`.
    W(u8),
    /// Normalised Chern root `v_i` of the tangent bundle, weight 1.
    RootM(u8),
    /// Normalised Chern root of the twisting bundle, weight 1.
    RootW(u8),
    /// Generating-function variable `y_j` (or its shift `t_j = 1 + y_j`), weight 0.
    Y(u8),
}

impl Var {
    pub fn weight(self) -> u32 {
        match self {
            Var::C(k) | Var::W(k) => k as u32,
            Var::RootM(_) | Var::RootW(_) => 1,
            Var::Y(_) => 0,
        }
    }

    pub fn is_root(self) -> bool {
        matches!(self, Var::RootM(_) | Var::RootW(_))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::C(k) => write!(f, "c{k}"),
            Var::W(k) => write!(f, "w{k}"),
            Var::RootM(i) => write!(f, "v{i}"),
            Var::RootW(i) => write!(f, "vw{i}"),
            Var::Y(j) => write!(f, "y{j}"),
        }
    }
}

/// Monomial: variables with positive exponents, sorted by variable.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono(Vec<(Var, u32)>);

impl Mono {
    pub fn one() -> Self {
        Mono(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Mono(vec![(v, 1)])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut m = Mono::one();
        for (v, e) in pairs {
            m = m.mul(&Mono(if e == 0 { vec![] } else { vec![(v, e)] }));
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0
            .iter()
            .find(|(w, _)| *w == v)
            .map_or(0, |(_, e)| *e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(v, e)| v.weight() * e).sum()
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i], other.0[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Mono(out)
    }

    /// Splits into (part satisfying `pred`, rest).
    pub fn split(&self, pred: impl Fn(Var) -> bool) -> (Mono, Mono) {
        let (a, b): (Vec<_>, Vec<_>) = self.0.iter().partition(|(v, _)| pred(*v));
        (Mono(a), Mono(b))
    }

    pub fn without(&self, v: Var) -> Mono {
        Mono(self.0.iter().copied().filter(|(w, _)| *w != v).collect())
    }

    pub fn contains(&self, pred: impl Fn(Var) -> bool) -> bool {
        self.0.iter().any(|(v, _)| pred(*v))
    }

    /// Applies a variable renaming; the result is re-sorted.
    pub fn rename(&self, f: impl Fn(Var) -> Var) -> Mono {
        Mono::from_pairs(self.0.iter().map(|(v, e)| (f(*v), *e)))
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (v, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse polynomial with coefficients in `C`; zero coefficients are never stored.
#[derive(Clone, PartialEq)]
pub struct Poly<C> {
    terms: BTreeMap<Mono, C>,
}

impl<C: Module> Poly<C> {
    pub fn new() -> Self {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(Mono::one(), c)
    }

    pub fn monomial(m: Mono, c: C) -> Self {
        let mut p = Self::new();
        p.add_term(m, c);
        p
    }

    pub fn add_term(&mut self, m: Mono, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
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

    pub fn add_term_ref(&mut self, m: &Mono, c: &C) {
        if c.is_zero() {
            return;
        }
        if let Some(existing) = self.terms.get_mut(m) {
            existing.add_assign_ref(c);
            if existing.is_zero() {
                self.terms.remove(m);
            }
        } else {
            self.terms.insert(m.clone(), c.clone());
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &C)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Mono, C)> {
        self.terms.into_iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Mono) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(Mono::degree).max().unwrap_or(0)
    }

    pub fn map_coeffs<D: Module>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        let mut out = Poly::new();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn filter(&self, keep: impl Fn(&Mono) -> bool) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn rename(&self, f: impl Fn(Var) -> Var + Copy) -> Self {
        let mut out = Poly::new();
        for (m, c) in &self.terms {
            out.add_term(m.rename(f), c.clone());
        }
        out
    }

    /// Multiplies every term by a monomial.
    pub fn shift(&self, m: &Mono) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.mul(m), c.clone()))
                .collect(),
        }
    }

    pub fn contains_var(&self, pred: impl Fn(Var) -> bool + Copy) -> bool {
        self.terms.keys().any(|m| m.contains(pred))
    }
}

impl<C: Module> Default for Poly<C> {
    fn default() -> Self {
        Self::new()
    }
}

impl<C: Module> Module for Poly<C> {
    fn zero() -> Self {
        Self::new()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term_ref(m, c);
        }
    }
    fn scale(&self, r: &Rat) -> Self {
        if r.is_zero() {
            return Self::new();
        }
        self.map_coeffs(|c| c.scale(r))
    }
}

impl<C: Algebra> Poly<C> {
    pub fn var(v: Var) -> Self {
        Self::monomial(Mono::var(v), C::one())
    }

    pub fn from_rat(r: Rat) -> Self {
        Self::constant(C::from_rat(&r))
    }

    /// Product keeping only monomials of weighted degree `<= cap`.
    pub fn mul_truncated(&self, other: &Self, cap: u32) -> Self {
        let mut out = Poly::new();
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            if da > cap {
                continue;
            }
            for (mb, cb) in &other.terms {
                if da + mb.degree() > cap {
                    continue;
                }
                out.add_term(ma.mul(mb), ca.mul_ref(cb));
            }
        }
        out
    }

    /// Replaces `v` by `value`, truncating at weighted degree `cap`.
    pub fn substitute(&self, v: Var, value: &Poly<C>, cap: u32) -> Self {
        let mut powers: Vec<Poly<C>> = vec![Poly::constant(C::one())];
        let mut out = Poly::new();
        for (m, c) in &self.terms {
            let e = m.exponent(v) as usize;
            if e == 0 {
                out.add_term_ref(m, c);
                continue;
            }
            while powers.len() <= e {
                let next = powers.last().unwrap().mul_truncated(value, cap);
                powers.push(next);
            }
            let rest = Poly::monomial(m.without(v), c.clone());
            out.add_assign_ref(&rest.mul_truncated(&powers[e], cap));
        }
        out
    }
}

impl<C: Algebra> Algebra for Poly<C> {
    fn one() -> Self {
        Self::constant(C::one())
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.mul_truncated(other, u32::MAX)
    }
}

impl<C: Module + fmt::Display> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms.iter().map(|(m, c)| (m.to_string(), c)), "*")
    }
}

impl<C: Module + fmt::Display> fmt::Debug for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Writes `c1*m1 + c2*m2 - ...`, dropping unit coefficients and `*1` factors.
pub(crate) fn write_terms<'a, C: fmt::Display + 'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (String, &'a C)>,
    sep: &str,
) -> fmt::Result {
    let mut first = true;
    for (m, c) in terms {
        let mut cs = c.to_string();
        let compound = cs.contains(" + ") || cs.contains(" - ");
        let negative = !compound && cs.starts_with('-');
        if negative {
            cs.remove(0);
        }
        if first {
            if negative {
                write!(f, "-")?;
            }
        } else if negative {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        first = false;
        let cs = if compound { format!("({cs})") } else { cs };
        if m == "1" {
            write!(f, "{cs}")?;
        } else if cs == "1" {
            write!(f, "{m}")?;
        } else {
            write!(f, "{cs}{sep}{m}")?;
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

/// Linear combination of Chern-number symbols `[m]` plus a constant.
///
/// Integration over a concrete manifold yields constants only; over a
/// symbolic manifold each degree-`d` monomial integrates to its own symbol.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Form(BTreeMap<Mono, Rat>);

impl Form {
    pub fn constant(r: Rat) -> Self {
        let mut f = Form::default();
        f.add(Mono::one(), r);
        f
    }

    pub fn symbol(m: Mono) -> Self {
        assert!(!m.is_one(), "the empty monomial is reserved for constants");
        let mut f = Form::default();
        f.add(m, Rat::one());
        f
    }

    fn add(&mut self, m: Mono, r: Rat) {
        if r.is_zero() {
            return;
        }
        match self.0.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(r);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &r;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// The value when no symbols occur.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.0.len() {
            0 => Some(Rat::zero()),
            1 => self.0.get(&Mono::one()).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Rat)> {
        self.0.iter()
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Mono> {
        self.0.keys().filter(|m| !m.is_one())
    }
}

impl Module for Form {
    fn zero() -> Self {
        Form::default()
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        for (m, r) in &other.0 {
            self.add(m.clone(), r.clone());
        }
    }
    fn scale(&self, r: &Rat) -> Self {
        if r.is_zero() {
            return Form::default();
        }
        Form(self.0.iter().map(|(m, c)| (m.clone(), c * r)).collect())
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // constant last, symbols in key order
        let mut items: Vec<(String, &Rat)> = self
            .0
            .iter()
            .filter(|(m, _)| !m.is_one())
            .map(|(m, c)| (format!("[{m}]"), c))
            .collect();
        if let Some(c) = self.0.get(&Mono::one()) {
            items.push(("1".to_string(), c));
        }
        write_terms(f, items.into_iter(), "*")
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<Rat> for Form {
    fn from(r: Rat) -> Self {
        Form::constant(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(k: u8) -> Poly<Rat> {
        Poly::var(Var::C(k))
    }

    #[test]
    fn monomial_product_merges_exponents() {
        let a = Mono::from_pairs([(Var::C(1), 2), (Var::W(2), 1)]);
        let b = Mono::from_pairs([(Var::C(1), 1), (Var::C(3), 1)]);
        let p = a.mul(&b);
        assert_eq!(p.exponent(Var::C(1)), 3);
        assert_eq!(p.degree(), 3 + 3 + 2);
        assert_eq!(p.to_string(), "c1^3 c3 w2");
    }

    #[test]
    fn truncated_product_drops_high_degree() {
        let x = Poly::<Rat>::one().add_ref(&c(1));
        let sq = x.mul_truncated(&x, 1);
        assert_eq!(sq, Poly::one().add_ref(&c(1).scale(&Rat::from(2))));
    }

    #[test]
    fn substitution() {
        // c1^2 c2 with c2 := c1^2 / 2
        let p = c(1).mul_ref(&c(1)).mul_ref(&c(2));
        let val = c(1).mul_ref(&c(1)).scale(&Rat::new(1, 2));
        let out = p.substitute(Var::C(2), &val, 10);
        assert_eq!(out, c(1).pow(4).scale(&Rat::new(1, 2)));
    }

    #[test]
    fn form_display() {
        let f = Form::symbol(Mono::from_pairs([(Var::C(1), 2)]))
            .scale(&Rat::new(-1, 12))
            .add_ref(&Form::constant(Rat::from(3)));
        assert_eq!(f.to_string(), "-1/12*[c1^2] + 3");
        assert_eq!(Form::zero().to_string(), "0");
        assert_eq!(Form::constant(Rat::from(24)).as_constant(), Some(Rat::from(24)));
    }

    #[test]
    fn poly_display() {
        let y = Poly::<Rat>::var(Var::Y(1));
        let p = Poly::from_rat(Rat::from(2))
            .sub_ref(&y.scale(&Rat::from(20)))
            .add_ref(&y.mul_ref(&y).scale(&Rat::from(2)));
        assert_eq!(p.to_string(), "2 - 20*y1 + 2*y1^2");
    }
}
