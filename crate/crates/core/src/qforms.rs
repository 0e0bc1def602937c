//! Eisenstein series, the Jacobi theta function, powers of eta, and a
//! membership test for the ring `Q[G_4, G_6]` of modular forms.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use crate::arith::{bernoulli, divisor_power_sum, factorial, Rat};
use crate::error::{Error, Result};
use crate::poly::{Algebra, Module};
use crate::series::{QYSeries, RootSeries, Q_DEN};

fn check_order(n: i64) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidArgument("q-order must be at least 1".into()));
    }
    Ok(())
}

/// `G_{2k} = -B_{2k}/(4k) + Σ_{m≥1} σ_{2k-1}(m) q^m`, exponents below `n`.
pub fn eisenstein(weight: u32, n: i64) -> Result<QYSeries<Rat>> {
    if weight < 2 || weight % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "Eisenstein series need even weight >= 2, got {weight}"
        )));
    }
    check_order(n)?;
    let cap = n * Q_DEN;
    let constant = -bernoulli(weight)? / Rat::from(2 * weight as i64);
    let mut s = QYSeries::term(0, 0, constant, cap);
    for m in 1..n {
        s.add_term(m * Q_DEN, 0, Rat::from(divisor_power_sum(weight - 1, m)?));
    }
    Ok(s)
}

/// `θ(τ,z) = Σ_n (-1)^n q^{(n+1/2)^2/2} y^{n+1/2}`, exponents below `n`.
pub fn theta(n: i64) -> Result<QYSeries<Rat>> {
    check_order(n)?;
    let cap = n * Q_DEN;
    let mut s = QYSeries::new(cap);
    // q8 = (2k+1)^2 for k and -1-k
    let mut k = 0i64;
    while (2 * k + 1).pow(2) < cap {
        let odd = 2 * k + 1;
        let sign = if k % 2 == 0 { 1 } else { -1 };
        s.add_term(odd * odd, odd, Rat::from(sign));
        s.add_term(odd * odd, -odd, Rat::from(-sign));
        k += 1;
    }
    Ok(s)
}

/// `Π_{m≥1} (1 - q^m)`, exponents below `n`.
pub fn euler_product(n: i64) -> Result<QYSeries<Rat>> {
    check_order(n)?;
    let cap = n * Q_DEN;
    let mut out = QYSeries::term(0, 0, Rat::one(), cap);
    for m in 1..n {
        let factor = QYSeries::term(0, 0, Rat::one(), cap).add_ref(&QYSeries::term(m * Q_DEN, 0, -Rat::one(), cap));
        out = out.mul_ref(&factor);
    }
    Ok(out)
}

/// Triple-product form `q^{1/8}(y^{1/2} - y^{-1/2}) Π (1-q^m)(1-q^m y)(1-q^m y^{-1})`.
pub fn theta_product(n: i64) -> Result<QYSeries<Rat>> {
    check_order(n)?;
    let cap = n * Q_DEN;
    let one = QYSeries::term(0, 0, Rat::one(), cap);
    let mut out = QYSeries::term(1, 1, Rat::one(), cap).add_ref(&QYSeries::term(1, -1, -Rat::one(), cap));
    for m in 1..n {
        for y2 in [0, 2, -2] {
            let factor = one.add_ref(&QYSeries::term(m * Q_DEN, y2, -Rat::one(), cap));
            out = out.mul_ref(&factor);
        }
    }
    Ok(out)
}

/// `(q^{1/8} Π(1-q^i)^3)^m = η^{3m}`.
pub fn eta_cubed_power(m: i64, n: i64) -> Result<QYSeries<Rat>> {
    let c = euler_product(n)?;
    let c3 = c.mul_ref(&c).mul_ref(&c).shift(1, 0);
    c3.powi(m)
}

/// Argument `r·v + s·u` of a theta factor, `v` a root and `u = 2πi z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThetaArg {
    pub root: i64,
    pub u: i64,
}

/// `Θ̂(q, a) = Σ_n (-1)^n q^{n(n+1)/2} e^{(n+1/2)a}`, so that
/// `θ(τ, a) = q^{1/8} Θ̂(q, a)`. Expanded in the root to `degree`, with
/// `e^{s u}` realised as `y^s`.
pub fn theta_at_root(arg: ThetaArg, n: i64, degree: u32) -> Result<RootSeries<QYSeries<Rat>>> {
    check_order(n)?;
    if !(-1..=1).contains(&arg.root) || !(-1..=1).contains(&arg.u) {
        return Err(Error::InvalidArgument(format!(
            "theta argument must be ±root ± u, got {}·v + {}·u",
            arg.root, arg.u
        )));
    }
    let cap = n * Q_DEN;
    let mut coeffs: Vec<QYSeries<Rat>> = (0..=degree).map(|_| QYSeries::new(cap)).collect();
    let mut k = 0i64;
    while k * (k + 1) / 2 < n {
        for m in [k, -1 - k] {
            let sign = if m.rem_euclid(2) == 0 { Rat::one() } else { -Rat::one() };
            let half = Rat::new(2 * m + 1, 2);
            let rate = &half * &Rat::from(arg.root);
            for (j, c) in coeffs.iter_mut().enumerate() {
                let coef = &sign * &(rate.pow(j as i32) * factorial(j as u32).recip()?);
                if !coef.is_zero() {
                    c.add_term(4 * k * (k + 1), arg.u * (2 * m + 1), coef);
                }
            }
        }
        k += 1;
    }
    Ok(RootSeries::new(coeffs, degree))
}

/// `Θ̂(q, v)/v`, a unit whose constant term is `Π(1-q^i)^3`.
pub fn theta_hat_over_root(n: i64, degree: u32) -> Result<RootSeries<QYSeries<Rat>>> {
    theta_at_root(ThetaArg { root: 1, u: 0 }, n, degree + 1)?.div_by_var()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Member,
    Zero,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Member => "member",
            Verdict::Zero => "zero",
            Verdict::Fail => "fail",
        })
    }
}

/// Outcome of a membership test: `s = Σ x_{a,b} G_4^a G_6^b` checked through
/// `q^{verified_order - 1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModularCertificate<C: Module> {
    pub weight: i64,
    pub coefficients: BTreeMap<(u32, u32), C>,
    pub verified_order: i64,
    pub verdict: Verdict,
    /// First order at which the check failed, if any.
    pub failure: Option<i64>,
}

impl<C: Module> ModularCertificate<C> {
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    /// Coefficient of `G_4^a G_6^b`, zero if absent.
    pub fn coefficient(&self, a: u32, b: u32) -> C {
        self.coefficients.get(&(a, b)).cloned().unwrap_or_else(C::zero)
    }
}

impl<C: Module> fmt::Display for ModularCertificate<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        writeln!(out, "weight = {}", self.weight)?;
        writeln!(out, "verdict = {}", self.verdict)?;
        writeln!(out, "verified-order = {}", self.verified_order)?;
        if let Some(k) = self.failure {
            writeln!(out, "first-failure = q^{k}")?;
        }
        for ((a, b), c) in &self.coefficients {
            writeln!(out, "G4^{a} G6^{b} = {c}")?;
        }
        f.write_str(&out)
    }
}

/// Exponent pairs `(a, b)` with `4a + 6b = weight`.
pub fn basis_exponents(weight: i64) -> Vec<(u32, u32)> {
    if weight < 0 || weight % 2 == 1 {
        return Vec::new();
    }
    (0..=weight / 4)
        .filter_map(|a| {
            let rest = weight - 4 * a;
            (rest % 6 == 0).then_some((a as u32, (rest / 6) as u32))
        })
        .collect()
}

/// `G_4^a G_6^b`, exponents below `n`.
pub fn basis_element(a: u32, b: u32, n: i64) -> Result<QYSeries<Rat>> {
    let g4 = eisenstein(4, n)?;
    let g6 = eisenstein(6, n)?;
    Ok(g4.pow(a).mul_ref(&g6.pow(b)).truncate(n * Q_DEN))
}

/// Decides whether `s` lies in the weight-`weight` space, by solving on the
/// first coefficients and checking every order below `n`.
pub fn modular_membership<C: Module>(s: &QYSeries<C>, weight: i64, n: i64) -> Result<ModularCertificate<C>> {
    check_order(n)?;
    if s.cap8() < n * Q_DEN {
        return Err(Error::InsufficientTruncation(format!(
            "series known below q^{} but verification to q^{n} requested",
            Rat::new(s.cap8(), Q_DEN)
        )));
    }
    let mut coeff_at = Vec::with_capacity(n as usize);
    for ((q8, y2), _) in s.terms() {
        if *y2 != 0 {
            return Err(Error::InvalidArgument("membership test needs a series without y".into()));
        }
        if *q8 < 0 {
            return Err(Error::InvalidArgument("membership test needs no negative q-powers".into()));
        }
    }
    let fractional = s.terms().any(|((q8, _), c)| q8 % Q_DEN != 0 && *q8 < n * Q_DEN && !c.is_zero());
    for k in 0..n {
        coeff_at.push(s.coeff(k * Q_DEN, 0));
    }
    let basis = basis_exponents(weight);
    let cert = |coefficients, verdict, failure| ModularCertificate {
        weight,
        coefficients,
        verified_order: n,
        verdict,
        failure,
    };
    if basis.is_empty() {
        let failure = if fractional {
            Some(0)
        } else {
            coeff_at.iter().position(|c| !c.is_zero()).map(|k| k as i64)
        };
        let verdict = if failure.is_some() { Verdict::Fail } else { Verdict::Zero };
        return Ok(cert(BTreeMap::new(), verdict, failure));
    }
    let dim = basis.len();
    if (n as usize) < dim {
        return Err(Error::InsufficientTruncation(format!(
            "weight {weight} needs {dim} coefficients, only {n} requested"
        )));
    }
    let elements: Vec<QYSeries<Rat>> = basis
        .iter()
        .map(|&(a, b)| basis_element(a, b, n))
        .collect::<Result<_>>()?;
    // solve Σ_j x_j e_j[i] = s[i] for i < dim
    let mut mat: Vec<Vec<Rat>> = (0..dim)
        .map(|i| elements.iter().map(|e| e.coeff(i as i64 * Q_DEN, 0)).collect())
        .collect();
    let mut rhs: Vec<C> = coeff_at[..dim].to_vec();
    for col in 0..dim {
        let pivot = (col..dim).find(|&r| !mat[r][col].is_zero()).ok_or_else(|| {
            Error::InsufficientTruncation(format!("leading coefficients do not determine weight {weight}"))
        })?;
        mat.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = mat[col][col].recip()?;
        for x in mat[col].iter_mut() {
            *x = &*x * &inv;
        }
        rhs[col] = rhs[col].scale(&inv);
        for r in 0..dim {
            if r != col && !mat[r][col].is_zero() {
                let f = mat[r][col].clone();
                let prow = mat[col].clone();
                for (x, p) in mat[r].iter_mut().zip(&prow) {
                    *x = &*x - &(&f * p);
                }
                let sub = rhs[col].scale(&f);
                rhs[r] = rhs[r].sub_ref(&sub);
            }
        }
    }
    let mut failure = if fractional { Some(0) } else { None };
    for k in 0..n {
        if failure.is_some() {
            break;
        }
        let mut predicted = C::zero();
        for (x, e) in rhs.iter().zip(&elements) {
            let ek = e.coeff(k * Q_DEN, 0);
            if !ek.is_zero() {
                predicted.add_assign_ref(&x.scale(&ek));
            }
        }
        if predicted != coeff_at[k as usize] {
            failure = Some(k);
        }
    }
    let coefficients = basis
        .into_iter()
        .zip(rhs)
        .filter(|(_, c)| !c.is_zero())
        .collect();
    let verdict = if failure.is_some() { Verdict::Fail } else { Verdict::Member };
    Ok(cert(coefficients, verdict, failure))
}
