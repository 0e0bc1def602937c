//! Graded polynomial ring in Chern generators, truncated above the manifold
//! dimension, together with the passage from formal Chern roots to
//! elementary symmetric polynomials.
//!
//! Roots are weight-1 variables (`v_i` for the tangent bundle, `vw_j` for the
//! twisting bundle). They are normalised: `v_i` stands for `2πi·x_i`, so all
//! series coefficients stay rational.
//!
//! Symmetric reduction goes through the monomial symmetric basis: a symmetric
//! polynomial is read off as `Σ a_λ m_λ`, and each `m_λ` is rewritten in the
//! elementary basis by an exact linear solve against the matrix of
//! 0-1 matrix counts `⟨e_μ, m_λ⟩`. Products `Π_i F(v_i)` of one-variable
//! series feed the same table without ever expanding the roots.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use crate::arith::Rat;
use crate::error::{Error, Result};
use crate::manifolds::ManifoldData;
use crate::poly::{Algebra, Form, Module, Mono, Poly, Var};
use crate::series::{QYSeries, RootSeries};

/// Which set of formal roots an operation acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RootSet {
    /// Roots of the tangent bundle; elementary polynomials are the `c_k`.
    Tangent,
    /// Roots of the twisting bundle; elementary polynomials are the `w_k`.
    Twist,
}

impl RootSet {
    pub fn root(self, i: u32) -> Var {
        match self {
            RootSet::Tangent => Var::RootM(i as u8),
            RootSet::Twist => Var::RootW(i as u8),
        }
    }

    pub fn generator(self, k: u32) -> Var {
        match self {
            RootSet::Tangent => Var::C(k as u8),
            RootSet::Twist => Var::W(k as u8),
        }
    }

    fn owns(self, v: Var) -> bool {
        matches!(
            (self, v),
            (RootSet::Tangent, Var::RootM(_)) | (RootSet::Twist, Var::RootW(_))
        )
    }

    fn name(self) -> &'static str {
        match self {
            RootSet::Tangent => "tangent",
            RootSet::Twist => "twist",
        }
    }
}

/// Cohomology class: polynomial in generators and roots, truncated above
/// weighted degree `cap`.
#[derive(Clone, PartialEq, Debug)]
pub struct CohClass<C: Module> {
    poly: Poly<C>,
    cap: u32,
}

impl<C: Module> CohClass<C> {
    pub fn zero(cap: u32) -> Self {
        CohClass {
            poly: Poly::new(),
            cap,
        }
    }

    pub fn from_poly(poly: Poly<C>, cap: u32) -> Self {
        CohClass {
            poly: poly.filter(|m| m.degree() <= cap),
            cap,
        }
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn poly(&self) -> &Poly<C> {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_empty()
    }

    pub fn coeff(&self, m: &Mono) -> C {
        self.poly.coeff(m)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut poly = self.poly.clone();
        poly.add_assign_ref(&other.poly);
        CohClass::from_poly(poly, self.cap.min(other.cap))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, r: &Rat) -> Self {
        CohClass {
            poly: self.poly.scale(r),
            cap: self.cap,
        }
    }

    /// Homogeneous component of weighted degree `k`.
    pub fn degree_part(&self, k: u32) -> Self {
        CohClass {
            poly: self.poly.filter(|m| m.degree() == k),
            cap: self.cap,
        }
    }

    pub fn map_coeffs<D: Module>(&self, f: impl Fn(&C) -> D) -> CohClass<D> {
        CohClass {
            poly: self.poly.map_coeffs(f),
            cap: self.cap,
        }
    }

    pub fn has_roots(&self) -> bool {
        self.poly.contains_var(Var::is_root)
    }

    pub fn rename(&self, f: impl Fn(Var) -> Var + Copy) -> Self {
        CohClass::from_poly(self.poly.rename(f), self.cap)
    }
}

impl<C: Algebra> CohClass<C> {
    pub fn one(cap: u32) -> Self {
        CohClass {
            poly: Poly::one(),
            cap,
        }
    }

    pub fn constant(c: C, cap: u32) -> Self {
        CohClass {
            poly: Poly::constant(c),
            cap,
        }
    }

    pub fn var(v: Var, cap: u32) -> Self {
        CohClass::from_poly(Poly::var(v), cap)
    }

    pub fn monomial(m: Mono, c: C, cap: u32) -> Self {
        CohClass::from_poly(Poly::monomial(m, c), cap)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let cap = self.cap.min(other.cap);
        CohClass {
            poly: self.poly.mul_truncated(&other.poly, cap),
            cap,
        }
    }

    /// Multiplies every coefficient by a ring element.
    pub fn mul_coeff(&self, c: &C) -> Self {
        self.map_coeffs(|x| x.mul_ref(c))
    }

    pub fn substitute(&self, v: Var, value: &CohClass<C>) -> Self {
        let cap = self.cap.min(value.cap);
        CohClass {
            poly: self.poly.substitute(v, &value.poly, cap),
            cap,
        }
    }

    /// `exp(x)` for a class without degree-0 part (nilpotent by truncation).
    pub fn exp(&self) -> Result<Self> {
        if self.poly.terms().any(|(m, _)| m.degree() == 0) {
            return Err(Error::InvalidArgument(
                "series_exp: class has a nonzero degree-0 part".into(),
            ));
        }
        let mut out = CohClass::one(self.cap);
        let mut power = CohClass::one(self.cap);
        for k in 1..=self.cap {
            power = power.mul(self).scale(&Rat::new(1, k as i64));
            if power.is_zero() {
                break;
            }
            out = out.add(&power);
        }
        Ok(out)
    }
}

/// Dimension data and the relation switches for twisted genera.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BundleContext {
    /// Complex dimension of `M`.
    pub d: u32,
    /// Rank of the twisting bundle `W`.
    pub l: u32,
    /// Impose `c_1(W) = 0` and `p_1(W) = p_1(M)`.
    pub relations: bool,
    /// Impose `c_1(M) = 0`.
    pub calabi_yau: bool,
}

impl BundleContext {
    pub fn new(d: u32, l: u32) -> Result<Self> {
        if d < 1 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        Ok(BundleContext {
            d,
            l,
            relations: false,
            calabi_yau: false,
        })
    }

    /// Context with every relation needed for the modularity statements.
    pub fn with_relations(d: u32, l: u32) -> Result<Self> {
        Ok(BundleContext {
            relations: true,
            calabi_yau: true,
            ..Self::new(d, l)?
        })
    }
}

/// Substitutes the canonical solution of the relation ideal.
///
/// * `calabi_yau`: `c_1 := 0`.
/// * `relations`: `w_1 := 0`, and `w_2 := (2c_2 - c_1^2)/2` so that
///   `p_1(W) = w_1^2 - 2w_2` equals `p_1(M) = c_1^2 - 2c_2`. A bundle of rank
///   below 2 has `p_1(W) = 0`, so the relation is solved on `M` instead:
///   `c_2 := c_1^2/2`.
///
/// Generators `w_j` with `j > l` vanish for a rank-`l` bundle and are dropped.
pub fn apply_relations<C: Algebra>(x: &CohClass<C>, ctx: &BundleContext) -> Result<CohClass<C>> {
    if x.has_roots() {
        return Err(Error::InvalidArgument(
            "apply_relations expects a class free of root variables".into(),
        ));
    }
    let cap = x.cap;
    let zero = CohClass::zero(cap);
    let mut out = x.clone();
    for j in (ctx.l + 1)..=cap {
        if ctx.relations && ctx.l < 2 && j == 2 && x.poly.contains_var(|v| v == Var::W(2)) {
            return Err(Error::UnsatisfiableRelation(format!(
                "p_1(W) = p_1(M) needs w2, which a rank-{} bundle does not have",
                ctx.l
            )));
        }
        out = out.substitute(Var::W(j as u8), &zero);
    }
    if ctx.calabi_yau {
        out = out.substitute(Var::C(1), &zero);
    }
    if ctx.relations {
        out = out.substitute(Var::W(1), &zero);
        let c1 = CohClass::<C>::var(Var::C(1), cap);
        let c1_sq_half = c1.mul(&c1).scale(&Rat::new(1, 2));
        if ctx.l >= 2 {
            let c2 = CohClass::<C>::var(Var::C(2), cap);
            out = out.substitute(Var::W(2), &c2.sub(&c1_sq_half));
        } else {
            out = out.substitute(Var::C(2), &c1_sq_half);
        }
        if ctx.calabi_yau {
            out = out.substitute(Var::C(1), &zero);
        }
    }
    Ok(out)
}

/// Partitions of `k` into at most `max_parts` parts, each at most `max_part`,
/// in decreasing lexicographic order with parts listed largest first.
pub fn partitions(k: u32, max_parts: u32, max_part: u32) -> Vec<Vec<u32>> {
    fn rec(k: u32, max_parts: u32, max_part: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == 0 {
            out.push(prefix.clone());
            return;
        }
        if max_parts == 0 {
            return;
        }
        for p in (1..=max_part.min(k)).rev() {
            prefix.push(p);
            rec(k - p, max_parts - 1, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, max_parts, max_part, &mut Vec::new(), &mut out);
    out
}

/// Number of 0-1 matrices with row sums `rows` and column sums `cols`,
/// i.e. the coefficient of `x^cols` in `Π_j e_{rows_j}`.
fn zero_one_count(rows: &[u32], cols: &[u32], memo: &mut HashMap<(Vec<u32>, Vec<u32>), u64>) -> u64 {
    if rows.is_empty() {
        return u64::from(cols.iter().all(|&c| c == 0));
    }
    let mut key_cols = cols.to_vec();
    key_cols.sort_unstable();
    let key = (rows.to_vec(), key_cols);
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let open: Vec<usize> = (0..cols.len()).filter(|&i| cols[i] > 0).collect();
    let need = rows[0] as usize;
    let mut total = 0u64;
    if need <= open.len() {
        // enumerate subsets of the open columns of size `need`
        let m = open.len();
        for mask in 0u32..(1 << m) {
            if mask.count_ones() as usize != need {
                continue;
            }
            let mut next = cols.to_vec();
            for (bit, &col) in open.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    next[col] -= 1;
                }
            }
            total += zero_one_count(&rows[1..], &next, memo);
        }
    }
    memo.insert(key, total);
    total
}

/// `m_λ = Σ_μ coeff·e_μ`, keyed by `λ`.
type MonomialToElementary = BTreeMap<Vec<u32>, Vec<(Vec<u32>, Rat)>>;

/// Exact change of basis from monomial to elementary symmetric polynomials
/// in `n` variables, degree `k`. Cached.
pub fn monomial_to_elementary(n: u32, k: u32) -> Arc<MonomialToElementary> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Arc<MonomialToElementary>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().expect("table cache poisoned").get(&(n, k)) {
        return t.clone();
    }
    let table = Arc::new(build_table(n, k));
    cache
        .lock()
        .expect("table cache poisoned")
        .insert((n, k), table.clone());
    table
}

fn build_table(n: u32, k: u32) -> MonomialToElementary {
    let lambdas = partitions(k, n, k);
    let mus = partitions(k, k, n);
    debug_assert_eq!(lambdas.len(), mus.len());
    let size = lambdas.len();
    let mut memo = HashMap::new();
    // a[μ][λ] = <e_μ, m_λ>; augmented with the identity to invert
    let mut a: Vec<Vec<Rat>> = mus
        .iter()
        .map(|mu| {
            let mut row: Vec<Rat> = lambdas
                .iter()
                .map(|lam| Rat::from(zero_one_count(mu, lam, &mut memo) as i64))
                .collect();
            row.resize(2 * size, Rat::zero());
            row
        })
        .collect();
    for (i, row) in a.iter_mut().enumerate() {
        row[size + i] = Rat::one();
    }
    // Gauss-Jordan on columns λ; pivots are guaranteed by conjugate unitriangularity
    for col in 0..size {
        let pivot = (col..size)
            .find(|&r| !a[r][col].is_zero())
            .expect("elementary/monomial matrix is invertible");
        a.swap(col, pivot);
        let inv = a[col][col].recip().unwrap();
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..size {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(&pivot_row) {
                    *x = &*x - &(&f * p);
                }
            }
        }
    }
    // row λ of the inverse: m_λ = Σ_μ inv[λ][μ] e_μ
    let mut out = BTreeMap::new();
    for (li, lam) in lambdas.iter().enumerate() {
        let entries = mus
            .iter()
            .enumerate()
            .filter(|(mi, _)| !a[li][size + mi].is_zero())
            .map(|(mi, mu)| (mu.clone(), a[li][size + mi].clone()))
            .collect();
        out.insert(lam.clone(), entries);
    }
    out
}

fn elementary_monomial(mu: &[u32], set: RootSet) -> Mono {
    Mono::from_pairs(mu.iter().map(|&p| (set.generator(p), 1)))
}

/// `Π_{i=1..n} F(root_i)`, expanded to weighted degree `cap` and written in the
/// elementary generators of `set`. No condition on `F(0)`.
pub fn symmetric_product<R: Algebra>(
    factor: &RootSeries<R>,
    n: u32,
    cap: u32,
    set: RootSet,
) -> Result<CohClass<R>> {
    if factor.degree() < cap.min(if n == 0 { 0 } else { cap }) {
        return Err(Error::InsufficientTruncation(format!(
            "root series known to degree {}, need {cap}",
            factor.degree()
        )));
    }
    let f0_powers: Vec<R> = {
        let mut v = vec![R::one()];
        for _ in 0..n {
            let next = v.last().unwrap().mul_ref(factor.coeff(0));
            v.push(next);
        }
        v
    };
    let mut poly = Poly::<R>::new();
    for k in 0..=cap {
        let table = monomial_to_elementary(n, k);
        for (lam, expansion) in table.iter() {
            let mut coef = f0_powers[(n as usize) - lam.len()].clone();
            for &part in lam {
                if coef.is_zero() {
                    break;
                }
                coef = coef.mul_ref(factor.coeff(part));
            }
            if coef.is_zero() {
                continue;
            }
            for (mu, t) in expansion {
                poly.add_term(elementary_monomial(mu, set), coef.scale(t));
            }
        }
    }
    Ok(CohClass::from_poly(poly, cap))
}

/// Multiplicative characteristic class `Π_i Q(root_i)` with `Q(0)` nonzero.
pub fn multiplicative_class<R: Algebra>(
    q: &RootSeries<R>,
    root_count: u32,
    cap: u32,
    set: RootSet,
) -> Result<CohClass<R>> {
    if q.coeff(0).is_zero() {
        return Err(Error::NonUnit(
            "characteristic series must have a nonzero constant term".into(),
        ));
    }
    symmetric_product(q, root_count, cap, set)
}

/// Rewrites a class that is symmetric in the `n` roots of `set` as a
/// polynomial in the corresponding elementary generators.
pub fn roots_to_elementary<C: Algebra>(
    s: &CohClass<C>,
    set: RootSet,
    n: u32,
) -> Result<CohClass<C>> {
    if s
        .poly
        .contains_var(|v| set.owns(v) && !(1..=n).any(|i| set.root(i) == v))
    {
        return Err(Error::InvalidArgument(format!(
            "class uses {} roots beyond index {n}",
            set.name()
        )));
    }
    for i in 1..n {
        let (a, b) = (set.root(i), set.root(i + 1));
        let swapped = s.poly.rename(|v| {
            if v == a {
                b
            } else if v == b {
                a
            } else {
                v
            }
        });
        if swapped != s.poly {
            return Err(Error::SymmetryViolation(set.name().into()));
        }
    }
    // m_λ coefficients sit on the monomials with non-increasing exponents
    let mut by_rest: BTreeMap<Mono, Vec<(Vec<u32>, C)>> = BTreeMap::new();
    for (m, c) in s.poly.terms() {
        let (roots, rest) = m.split(|v| set.owns(v));
        let exps: Vec<u32> = (1..=n).map(|i| roots.exponent(set.root(i))).collect();
        if exps.windows(2).all(|w| w[0] >= w[1]) {
            let lam: Vec<u32> = exps.into_iter().filter(|&e| e > 0).collect();
            by_rest.entry(rest).or_default().push((lam, c.clone()));
        }
    }
    let mut poly = Poly::<C>::new();
    for (rest, items) in by_rest {
        for (lam, c) in items {
            let k: u32 = lam.iter().sum();
            let table = monomial_to_elementary(n, k);
            for (mu, t) in &table[&lam] {
                poly.add_term(elementary_monomial(mu, set).mul(&rest), c.scale(t));
            }
        }
    }
    Ok(CohClass::from_poly(poly, s.cap))
}

/// `e_k(root_1, ..., root_n)` written out in the roots.
pub fn elementary_in_roots(k: u32, n: u32, set: RootSet, cap: u32) -> CohClass<Rat> {
    let mut poly = Poly::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() == k {
            let m = Mono::from_pairs((0..n).filter(|b| mask & (1 << b) != 0).map(|b| (set.root(b + 1), 1)));
            poly.add_term(m, Rat::one());
        }
    }
    CohClass::from_poly(poly, cap)
}

/// Replaces the elementary generators of `set` by their root expressions.
pub fn expand_to_roots(x: &CohClass<Rat>, set: RootSet, n: u32) -> CohClass<Rat> {
    let mut out = x.clone();
    for k in 1..=x.cap {
        let value = if k <= n {
            elementary_in_roots(k, n, set, x.cap)
        } else {
            CohClass::zero(x.cap)
        };
        out = out.substitute(set.generator(k), &value);
    }
    out
}

/// Pontrjagin classes `p_1, ..., p_⌊d/2⌋` in terms of Chern classes:
/// `p_k = (-1)^k · [c(M)·c(M̄)]_{2k}`, with `c(M̄) = Σ (-1)^i c_i`.
pub fn pontryagin_from_chern(d: u32) -> Vec<CohClass<Rat>> {
    let mut total = CohClass::one(d);
    let mut conj = CohClass::one(d);
    for i in 1..=d {
        let ci = CohClass::var(Var::C(i as u8), d);
        total = total.add(&ci);
        conj = conj.add(&ci.scale(&Rat::from(if i % 2 == 0 { 1 } else { -1 })));
    }
    let product = total.mul(&conj);
    (1..=d / 2)
        .map(|k| {
            product
                .degree_part(2 * k)
                .scale(&Rat::from(if k % 2 == 0 { 1 } else { -1 }))
        })
        .collect()
}

/// Power sums `p_0 = n, p_1, ..., p_cap` of the `n` roots of `set`, by the
/// Newton identities `p_k = Σ_{i<k} (-1)^{i-1} e_i p_{k-i} + (-1)^{k-1} k e_k`.
pub fn power_sums(set: RootSet, n: u32, cap: u32) -> Vec<CohClass<Rat>> {
    let e = |k: u32| {
        if k <= n {
            CohClass::var(set.generator(k), cap)
        } else {
            CohClass::zero(cap)
        }
    };
    let mut p: Vec<CohClass<Rat>> = vec![CohClass::constant(Rat::from(n), cap)];
    for k in 1..=cap {
        let mut acc = e(k).scale(&Rat::from(if k % 2 == 1 { k as i64 } else { -(k as i64) }));
        for i in 1..k {
            let term = e(i).mul(&p[(k - i) as usize]);
            acc = if i % 2 == 1 { acc.add(&term) } else { acc.sub(&term) };
        }
        p.push(acc);
    }
    p
}

/// `ch = Σ_i e^{sign·root_i}` of the bundle with roots in `set`.
pub fn chern_character(set: RootSet, n: u32, cap: u32, sign: i64) -> CohClass<Rat> {
    let mut out = CohClass::zero(cap);
    for (k, pk) in power_sums(set, n, cap).into_iter().enumerate() {
        let w = Rat::from(sign).pow(k as i32) * crate::arith::factorial(k as u32).recip().unwrap();
        out = out.add(&pk.scale(&w));
    }
    out
}

/// Coefficient rings that can be paired with Chern-number forms.
pub trait Integrand: Algebra {
    type Value: Module;
    fn pair(&self, form: &Form) -> Self::Value;
}

impl Integrand for Rat {
    type Value = Form;
    fn pair(&self, form: &Form) -> Form {
        form.scale(self)
    }
}

impl Integrand for Poly<Rat> {
    type Value = Poly<Form>;
    fn pair(&self, form: &Form) -> Poly<Form> {
        self.map_coeffs(|c| form.scale(c))
    }
}

impl Integrand for QYSeries<Rat> {
    type Value = QYSeries<Form>;
    fn pair(&self, form: &Form) -> QYSeries<Form> {
        self.map_coeffs(|c| form.scale(c))
    }
}

/// `∫_M x`: pairs the degree-`d` component with the Chern-number functional.
pub fn integrate<R: Integrand>(x: &CohClass<R>, m: &ManifoldData) -> Result<R::Value> {
    if x.has_roots() {
        return Err(Error::InvalidArgument(
            "integrate expects a class free of root variables".into(),
        ));
    }
    if x.cap < m.dim() {
        return Err(Error::InsufficientTruncation(format!(
            "class truncated at degree {} but manifold has dimension {}",
            x.cap,
            m.dim()
        )));
    }
    let mut out = R::Value::zero();
    for (mono, c) in x.poly.terms() {
        if mono.degree() != m.dim() {
            continue;
        }
        let number = m.chern_number(mono)?;
        out.add_assign_ref(&c.pair(&number));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifolds::{projective_space, symbolic_manifold, k3};

    fn root(i: u8) -> CohClass<Rat> {
        CohClass::var(Var::RootM(i), 6)
    }

    fn c(k: u8, cap: u32) -> CohClass<Rat> {
        CohClass::var(Var::C(k), cap)
    }

    #[test]
    fn partition_counts() {
        assert_eq!(partitions(4, 4, 4).len(), 5);
        assert_eq!(partitions(6, 2, 6), vec![vec![6], vec![5, 1], vec![4, 2], vec![3, 3]]);
        assert_eq!(partitions(0, 3, 3), vec![Vec::<u32>::new()]);
        assert_eq!(partitions(10, 10, 10).len(), 42);
    }

    #[test]
    fn elementary_of_roots() {
        let s = root(1).mul(&root(2)).add(&root(1).mul(&root(3))).add(&root(2).mul(&root(3)));
        let e = roots_to_elementary(&s, RootSet::Tangent, 3).unwrap();
        assert_eq!(e, c(2, 6));
    }

    #[test]
    fn newton_power_sum() {
        let s = root(1).mul(&root(1)).add(&root(2).mul(&root(2)));
        let e = roots_to_elementary(&s, RootSet::Tangent, 2).unwrap();
        assert_eq!(e, c(1, 6).mul(&c(1, 6)).sub(&c(2, 6).scale(&Rat::from(2))));
    }

    #[test]
    fn truncated_exponential_product() {
        // Π_{i=1,2} (1 + v_i + v_i^2/2) at degree 2
        let f = |i| CohClass::one(2).add(&root(i)).add(&root(i).mul(&root(i)).scale(&Rat::new(1, 2)));
        let s = f(1).mul(&f(2));
        let e = roots_to_elementary(&CohClass::from_poly(s.poly().clone(), 2), RootSet::Tangent, 2).unwrap();
        // Π exp(v_i) = exp(c_1)
        let expect = c(1, 2).exp().unwrap();
        assert_eq!(e, expect);
    }

    #[test]
    fn non_symmetric_input_rejected() {
        let s = root(1).mul(&root(1)).add(&root(2));
        assert!(matches!(
            roots_to_elementary(&s, RootSet::Tangent, 2),
            Err(Error::SymmetryViolation(_))
        ));
    }

    #[test]
    fn round_trip_through_roots() {
        for d in 1..=6u32 {
            for k in 1..=d {
                let ck = c(k as u8, d);
                let expanded = expand_to_roots(&ck, RootSet::Tangent, d);
                assert!(!expanded.poly().contains_var(|v| matches!(v, Var::C(_))));
                let back = roots_to_elementary(&expanded, RootSet::Tangent, d).unwrap();
                assert_eq!(back, ck, "c{k} in dimension {d}");
            }
        }
    }

    #[test]
    fn table_matches_explicit_expansion() {
        // independent check: expand each e_μ in roots, read off m-coefficients,
        // then apply the table and recover e_μ
        let n = 4;
        for k in 1..=5 {
            for mu in partitions(k, k, n) {
                let mut prod = CohClass::one(k);
                for &p in &mu {
                    prod = prod.mul(&elementary_in_roots(p, n, RootSet::Tangent, k));
                }
                let back = roots_to_elementary(&prod, RootSet::Tangent, n).unwrap();
                assert_eq!(back, CohClass::monomial(elementary_monomial(&mu, RootSet::Tangent), Rat::one(), k));
            }
        }
    }

    fn todd_series(degree: u32) -> RootSeries<Rat> {
        // (1 - e^{-v})/v = Σ (-1)^k v^k/(k+1)!
        let denom = RootSeries::from_fn(degree, |k| {
            let s = if k % 2 == 0 { Rat::one() } else { -Rat::one() };
            s * crate::arith::factorial(k + 1).recip().unwrap()
        });
        denom.invert().unwrap()
    }

    #[test]
    fn todd_classes() {
        let one = RootSeries::<Rat>::one(3);
        assert_eq!(multiplicative_class(&one, 3, 3, RootSet::Tangent).unwrap(), CohClass::one(3));
        let td1 = multiplicative_class(&todd_series(1), 1, 1, RootSet::Tangent).unwrap();
        assert_eq!(td1, CohClass::one(1).add(&c(1, 1).scale(&Rat::new(1, 2))));
        let td2 = multiplicative_class(&todd_series(2), 2, 2, RootSet::Tangent).unwrap();
        let expect = CohClass::one(2)
            .add(&c(1, 2).scale(&Rat::new(1, 2)))
            .add(&c(1, 2).mul(&c(1, 2)).add(&c(2, 2)).scale(&Rat::new(1, 12)));
        assert_eq!(td2, expect);
        assert_eq!(integrate(&td2, &k3()).unwrap(), Form::constant(Rat::from(2)));
        let zero_const = RootSeries::new(vec![Rat::zero(), Rat::one()], 2);
        assert!(matches!(
            multiplicative_class(&zero_const, 2, 2, RootSet::Tangent),
            Err(Error::NonUnit(_))
        ));
    }

    #[test]
    fn multiplicativity_of_classes() {
        // class(Q, 2+1 roots) = class(Q, 2)·class(Q, 1) after identifying
        // c(M) = c(A)c(B) through roots
        let q = todd_series(3);
        let whole = expand_to_roots(&multiplicative_class(&q, 3, 3, RootSet::Tangent).unwrap(), RootSet::Tangent, 3);
        let a = expand_to_roots(&multiplicative_class(&q, 2, 3, RootSet::Tangent).unwrap(), RootSet::Tangent, 2);
        let b = expand_to_roots(&multiplicative_class(&q, 1, 3, RootSet::Tangent).unwrap(), RootSet::Tangent, 1)
            .rename(|v| if v == Var::RootM(1) { Var::RootM(3) } else { v });
        assert_eq!(whole, a.mul(&b));
    }

    #[test]
    fn relations_substitution() {
        let ctx = BundleContext {
            relations: true,
            ..BundleContext::new(3, 2).unwrap()
        };
        let w = |k| CohClass::<Rat>::var(Var::W(k), 3);
        assert!(apply_relations(&w(1), &ctx).unwrap().is_zero());
        let p1w = w(1).mul(&w(1)).sub(&w(2).scale(&Rat::from(2)));
        let p1m = c(1, 3).mul(&c(1, 3)).sub(&c(2, 3).scale(&Rat::from(2)));
        assert_eq!(apply_relations(&p1w, &ctx).unwrap(), p1m);
        let x = w(2).mul(&c(1, 3));
        let expect = c(2, 3).scale(&Rat::from(2)).sub(&c(1, 3).mul(&c(1, 3))).mul(&c(1, 3)).scale(&Rat::new(1, 2));
        assert_eq!(apply_relations(&x, &ctx).unwrap(), expect);
        // idempotent
        let once = apply_relations(&x.add(&p1w), &ctx).unwrap();
        assert_eq!(apply_relations(&once, &ctx).unwrap(), once);
        // rank one: w2 does not exist
        let ctx1 = BundleContext {
            relations: true,
            ..BundleContext::new(3, 1).unwrap()
        };
        assert!(matches!(apply_relations(&w(2), &ctx1), Err(Error::UnsatisfiableRelation(_))));
        // rank one: p1(M) = 0 is imposed on M
        assert!(apply_relations(&p1m, &ctx1).unwrap().is_zero());
    }

    #[test]
    fn calabi_yau_relation() {
        let ctx = BundleContext::with_relations(4, 2).unwrap();
        let x = c(1, 4).mul(&c(3, 4)).add(&CohClass::var(Var::W(2), 4).mul(&c(2, 4)));
        assert_eq!(apply_relations(&x, &ctx).unwrap(), c(2, 4).mul(&c(2, 4)));
    }

    #[test]
    fn newton_power_sums_against_roots() {
        // oracle: expand Σ v_i^k directly in roots, then reduce
        let n = 3;
        let cap = 5;
        let p = power_sums(RootSet::Tangent, n, cap);
        for k in 1..=cap {
            let mut direct = CohClass::zero(cap);
            for i in 1..=n as u8 {
                let mut t = CohClass::one(cap);
                for _ in 0..k {
                    t = t.mul(&CohClass::var(Var::RootM(i), cap));
                }
                direct = direct.add(&t);
            }
            let reduced = roots_to_elementary(&direct, RootSet::Tangent, n).unwrap();
            assert_eq!(p[k as usize], reduced, "p_{k}");
        }
        let ch = chern_character(RootSet::Twist, 2, 2, -1);
        let w = |k| CohClass::<Rat>::var(Var::W(k), 2);
        let want = CohClass::constant(Rat::from(2), 2)
            .sub(&w(1))
            .add(&w(1).mul(&w(1)).sub(&w(2).scale(&Rat::from(2))).scale(&Rat::new(1, 2)));
        assert_eq!(ch, want);
    }

    #[test]
    fn pontryagin_classes() {
        let p = pontryagin_from_chern(2);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0], c(1, 2).mul(&c(1, 2)).sub(&c(2, 2).scale(&Rat::from(2))));
        assert_eq!(integrate(&p[0], &projective_space(2).unwrap()).unwrap(), Form::constant(Rat::from(3)));
        // odd degrees of c(M)c(M̄) vanish
        let mut total = CohClass::one(5);
        let mut conj = CohClass::one(5);
        for i in 1..=5u8 {
            total = total.add(&c(i, 5));
            conj = conj.add(&c(i, 5).scale(&Rat::from(if i % 2 == 0 { 1 } else { -1 })));
        }
        let prod = total.mul(&conj);
        assert!(prod.degree_part(1).is_zero());
        assert!(prod.degree_part(3).is_zero());
        assert!(prod.degree_part(5).is_zero());
    }

    #[test]
    fn integration() {
        assert_eq!(integrate(&c(2, 2), &k3()).unwrap(), Form::constant(Rat::from(24)));
        assert!(integrate(&CohClass::<Rat>::one(2), &k3()).unwrap().is_zero());
        let cp2 = projective_space(2).unwrap();
        assert_eq!(integrate(&c(1, 2).mul(&c(1, 2)), &cp2).unwrap(), Form::constant(Rat::from(9)));
        let w = CohClass::<Rat>::var(Var::W(2), 2);
        assert!(matches!(integrate(&w, &cp2), Err(Error::MissingChernNumber { .. })));
        let sym = symbolic_manifold(2).unwrap();
        let v = integrate(&c(2, 2).scale(&Rat::from(3)), &sym).unwrap();
        assert_eq!(v.to_string(), "3*[c2]");
        assert!(integrate(&root(1), &cp2).is_err());
    }

    proptest::proptest! {
        #[test]
        fn integration_is_linear(a in -20i64..20, b in -20i64..20, x in 0usize..2, y in 0usize..2) {
            let basis = [c(1, 2).mul(&c(1, 2)), c(2, 2)];
            let sym = symbolic_manifold(2).unwrap();
            let lhs = integrate(&basis[x].scale(&Rat::from(a)).add(&basis[y].scale(&Rat::from(b))), &sym).unwrap();
            let rhs = integrate(&basis[x], &sym).unwrap().scale(&Rat::from(a))
                .add_ref(&integrate(&basis[y], &sym).unwrap().scale(&Rat::from(b)));
            proptest::prop_assert_eq!(lhs, rhs);
        }
    }
}
