//! χ_y genus, its expansion at `y = -1`, the pluri-genera of the Todd and
//! signature operators, and index formulas for characteristic numbers.
//!
//! Everything is computed from the Riemann-Roch integrand with normalised
//! roots: `td(v) = v/(1 - e^{-v})` and `ch(Λ_y T*) = Π(1 + y e^{-v_i})`.
//! Coefficients of `Π(1+y_j)^{k_j}` are read off after the substitution
//! `y_j = t_j - 1` inside the integrand, which avoids re-expanding the
//! integrated polynomial.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::arith::{binomial, factorial, Rat};
use crate::cohomology::{integrate, pontryagin_from_chern, symmetric_product, CohClass, RootSet};
use crate::error::{Error, Result};
use crate::manifolds::ManifoldData;
use crate::poly::{Algebra, Form, Module, Mono, Poly, Var};
use crate::series::RootSeries;

/// `v/(1 - e^{-v})` through `v^degree`.
pub fn todd_series(degree: u32) -> RootSeries<Rat> {
    let denom = RootSeries::from_fn(degree, |k| {
        let sign = if k % 2 == 0 { Rat::one() } else { -Rat::one() };
        sign * factorial(k + 1).recip().unwrap()
    });
    denom.invert().expect("constant term is 1")
}

fn lift(s: &RootSeries<Rat>) -> RootSeries<Poly<Rat>> {
    RootSeries::from_fn(s.degree(), |k| Poly::constant(s.coeff(k).clone()))
}

fn exp_series(a: i64, degree: u32) -> RootSeries<Poly<Rat>> {
    RootSeries::exp_linear(&Rat::from(a), &Poly::one(), degree)
}

fn y(j: u32) -> Poly<Rat> {
    Poly::var(Var::Y(j as u8))
}

/// `1 + y·e^{sign·v}`.
fn lambda_factor(j: u32, sign: i64, degree: u32) -> RootSeries<Poly<Rat>> {
    exp_series(sign, degree).mul_coeff(&y(j)).add(&RootSeries::one(degree))
}

/// `(1 - e^{sign·v}) + t·e^{sign·v}`: the same factor after `y = t - 1`.
fn shifted_lambda_factor(j: u32, sign: i64, degree: u32) -> RootSeries<Poly<Rat>> {
    let e = exp_series(sign, degree);
    RootSeries::one(degree)
        .add(&e.scale(&-Rat::one()))
        .add(&e.mul_coeff(&y(j)))
}

fn integrate_factor(m: &ManifoldData, factor: &RootSeries<Poly<Rat>>) -> Result<Poly<Form>> {
    let d = m.dim();
    let class = symmetric_product(factor, d, d, RootSet::Tangent)?;
    integrate(&class, m)
}

fn require_positive_dim(m: &ManifoldData) -> Result<u32> {
    if m.dim() == 0 {
        return Err(Error::InvalidArgument("manifold of dimension 0".into()));
    }
    Ok(m.dim())
}

/// `χ_y(M) = Σ_p χ(M, Λ^p T*) y^p`, as a polynomial in `y_1`.
pub fn chi_y(m: &ManifoldData) -> Result<Poly<Form>> {
    pluri_chi(m, 1)
}

/// Coefficients `a_0..a_d` of `χ_y(M) = Σ a_i (y+1)^i`.
pub fn chi_y_taylor_minus1(m: &ManifoldData) -> Result<Vec<Form>> {
    let d = require_positive_dim(m)?;
    let p = chi_y(m)?;
    let b: Vec<Form> = (0..=d).map(|k| p.coeff(&y_mono(&[k]))).collect();
    // y^k = Σ_i C(k,i)(-1)^{k-i}(y+1)^i
    (0..=d)
        .map(|i| {
            let mut acc = Form::zero();
            for k in i..=d {
                let w = Rat::from(binomial(k as i64, i as i64)?) * sign((k - i) as i64);
                acc.add_assign_ref(&b[k as usize].scale(&w));
            }
            Ok(acc)
        })
        .collect()
}

fn sign(k: i64) -> Rat {
    if k.rem_euclid(2) == 0 {
        Rat::one()
    } else {
        -Rat::one()
    }
}

fn c_class(k: u32, d: u32) -> CohClass<Rat> {
    if k == 0 {
        CohClass::one(d)
    } else {
        CohClass::var(Var::C(k as u8), d)
    }
}

/// Closed expressions for `a_0..a_3` in terms of `c_d` and `c_1 c_{d-1}`.
pub fn closed_form_a(i: u32, d: u32) -> Result<CohClass<Rat>> {
    if d < 1 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let di = d as i64;
    let cd = c_class(d, d);
    let c1cd1 = c_class(1, d).mul(&c_class(d - 1, d));
    Ok(match i {
        0 => cd,
        1 => cd.scale(&Rat::new(-di, 2)),
        2 => cd
            .scale(&Rat::new(di * (3 * di - 5), 2))
            .add(&c1cd1)
            .scale(&Rat::new(1, 12)),
        3 => cd
            .scale(&Rat::new(di * (di - 2) * (di - 3), 2))
            .add(&c1cd1.scale(&Rat::from(di - 2)))
            .scale(&Rat::new(-1, 24)),
        _ => {
            return Err(Error::Unsupported(format!(
                "closed form known only for a_0..a_3, asked for a_{i}"
            )))
        }
    })
}

/// `Π y_j^{e_j}` for `j = 1..`.
pub fn y_mono(exps: &[u32]) -> Mono {
    Mono::from_pairs(
        exps.iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(j, &e)| (Var::Y(j as u8 + 1), e)),
    )
}

/// Pluri χ_y genus in `y_1..y_g`.
pub fn pluri_chi(m: &ManifoldData, g: u32) -> Result<Poly<Form>> {
    let d = require_positive_dim(m)?;
    if g < 1 {
        return Err(Error::InvalidArgument("g must be at least 1".into()));
    }
    let mut factor = lift(&todd_series(d));
    for j in 1..=g {
        factor = factor.mul(&lambda_factor(j, -1, d));
    }
    integrate_factor(m, &factor)
}

fn check_tuple(q: &[u32], bound: u32) -> Result<()> {
    if q.is_empty() {
        return Err(Error::InvalidArgument("empty index tuple".into()));
    }
    if let Some(bad) = q.iter().find(|&&x| x > bound) {
        return Err(Error::InvalidArgument(format!("entry {bad} exceeds {bound}")));
    }
    Ok(())
}

/// The pluri χ_y genus rewritten in `t_j = 1 + y_j`: the coefficient of
/// `Π t_j^{k_j}` is the coefficient of `Π (1+y_j)^{k_j}`.
pub fn pluri_shifted(m: &ManifoldData, g: u32) -> Result<Poly<Form>> {
    let n = require_positive_dim(m)?;
    let mut factor = lift(&todd_series(n));
    for j in 1..=g {
        factor = factor.mul(&shifted_lambda_factor(j, -1, n));
    }
    integrate_factor(m, &factor)
}

/// Coefficient of `Π_i (1+y_i)^{n-q_i}` in the pluri χ_y genus.
pub fn pluri_coefficient(m: &ManifoldData, q: &[u32]) -> Result<Form> {
    let n = require_positive_dim(m)?;
    check_tuple(q, n)?;
    let p = pluri_shifted(m, q.len() as u32)?;
    let exps: Vec<u32> = q.iter().map(|&qi| n - qi).collect();
    Ok(p.coeff(&y_mono(&exps)))
}

/// `∫_M Π c_{q_i}` with `c_0 = 1`.
pub fn chern_number_of(m: &ManifoldData, q: &[u32]) -> Result<Form> {
    let d = m.dim();
    let mut x = CohClass::one(d);
    for &qi in q {
        x = x.mul(&c_class(qi, d));
    }
    integrate(&x, m)
}

/// What the coefficient theorem predicts, when it predicts a value.
pub fn pluri_contract(m: &ManifoldData, q: &[u32]) -> Result<Option<Form>> {
    let n = m.dim();
    let s: u32 = q.iter().sum();
    if s > n {
        Ok(Some(Form::zero()))
    } else if s == n {
        chern_number_of(m, q).map(Some)
    } else {
        Ok(None)
    }
}

/// `v/tanh(v/2) = td(v)(1 + e^{-v})`.
fn signature_base(n: u32) -> RootSeries<Poly<Rat>> {
    lift(&todd_series(n)).mul(&exp_series(-1, n).add(&RootSeries::one(n)))
}

/// Pluri-genus of the signature operator: `Σ_p Ind(D ⊗ Λ^{p_1}..Λ^{p_g}) Π y_j^{p_j}`,
/// with the tangent roots doubled to `±v_i`.
pub fn signature_pluri(m: &ManifoldData, g: u32) -> Result<Poly<Form>> {
    let n = require_positive_dim(m)?;
    let mut factor = signature_base(n);
    for j in 1..=g {
        factor = factor
            .mul(&lambda_factor(j, -1, n))
            .mul(&lambda_factor(j, 1, n));
    }
    integrate_factor(m, &factor)
}

/// The signature pluri-genus rewritten in `t_j = 1 + y_j`.
pub fn signature_pluri_shifted(m: &ManifoldData, g: u32) -> Result<Poly<Form>> {
    let n = require_positive_dim(m)?;
    let mut factor = signature_base(n);
    for j in 1..=g {
        factor = factor
            .mul(&shifted_lambda_factor(j, -1, n))
            .mul(&shifted_lambda_factor(j, 1, n));
    }
    integrate_factor(m, &factor)
}

/// Coefficient of `Π_i (1+y_i)^{2(n-q_i)}` in the signature pluri-genus.
pub fn signature_pluri_coefficient(m: &ManifoldData, q: &[u32]) -> Result<Form> {
    let n = require_positive_dim(m)?;
    check_tuple(q, n)?;
    let p = signature_pluri_shifted(m, q.len() as u32)?;
    let exps: Vec<u32> = q.iter().map(|&qi| 2 * (n - qi)).collect();
    Ok(p.coeff(&y_mono(&exps)))
}

/// `∫ Π p_{q_i}` with `p_0 = 1`, Pontrjagin classes taken from the Chern classes.
pub fn pontryagin_number_of(m: &ManifoldData, q: &[u32]) -> Result<Form> {
    let d = m.dim();
    let p = pontryagin_from_chern(d);
    let mut x = CohClass::one(d);
    for &qi in q {
        if qi == 0 {
            continue;
        }
        match p.get(qi as usize - 1) {
            Some(pk) => x = x.mul(pk),
            None => return Ok(Form::zero()),
        }
    }
    integrate(&x, m)
}

/// Prediction of the signature coefficient theorem; only for even `n`.
pub fn signature_contract(m: &ManifoldData, q: &[u32]) -> Result<Option<Form>> {
    let n = m.dim();
    if n % 2 == 1 {
        return Err(Error::ContractNotApplicable(format!(
            "the signature coefficient statement needs even n, got n = {n}"
        )));
    }
    let s: u32 = q.iter().sum();
    if 2 * s > n {
        Ok(Some(Form::zero()))
    } else if 2 * s == n {
        let factor = sign((n / 2) as i64) * Rat::from(num_bigint::BigInt::from(2).pow(n));
        Ok(Some(pontryagin_number_of(m, q)?.scale(&factor)))
    } else {
        Ok(None)
    }
}

/// Indices `χ(M, Λ^{p_1}T* ⊗ ... ⊗ Λ^{p_g}T*)` (or signature-operator
/// indices) over the full tuple lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexVector {
    pub n: u32,
    pub g: u32,
    pub entries: BTreeMap<Vec<u32>, Form>,
}

/// All `g`-tuples with entries in `0..=max`, lexicographically.
pub fn tuples(g: u32, max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..g {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..=max).map(move |p| {
                    let mut t = t.clone();
                    t.push(p);
                    t
                })
            })
            .collect();
    }
    out
}

impl IndexVector {
    fn from_poly(p: &Poly<Form>, n: u32, g: u32, max: u32) -> Self {
        let entries = tuples(g, max)
            .into_iter()
            .map(|t| {
                let v = p.coeff(&y_mono(&t));
                (t, v)
            })
            .collect();
        IndexVector { n, g, entries }
    }

    /// Twisted Todd-operator indices, `0 ≤ p_i ≤ n`.
    pub fn todd(m: &ManifoldData, g: u32) -> Result<Self> {
        let p = pluri_chi(m, g)?;
        Ok(Self::from_poly(&p, m.dim(), g, m.dim()))
    }

    /// Twisted signature-operator indices, `0 ≤ p_i ≤ 2n`.
    pub fn signature(m: &ManifoldData, g: u32) -> Result<Self> {
        let p = signature_pluri(m, g)?;
        Ok(Self::from_poly(&p, m.dim(), g, 2 * m.dim()))
    }
}

/// One term `λ_p·Ind_p` of an index formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexWeight {
    pub p: Vec<u32>,
    pub weight: Rat,
}

/// Weights with `∫ Π c_{q_i} = Σ_p λ_p χ(M, ⊗ Λ^{p_i} T*)`.
pub fn chern_number_index_formula(n: u32, q: &[u32]) -> Result<Vec<IndexWeight>> {
    check_tuple(q, n)?;
    if q.iter().sum::<u32>() != n {
        return Err(Error::InvalidArgument(format!(
            "entries of q must sum to n = {n}"
        )));
    }
    let k: Vec<u32> = q.iter().map(|&qi| n - qi).collect();
    inversion_weights(&k, n, &Rat::one())
}

/// Weights with `∫ Π p_{q_i} = Σ_p λ_p Ind(D ⊗ Λ^{p_1} ... Λ^{p_g})`, `n` even.
pub fn pontryagin_number_index_formula(n: u32, q: &[u32]) -> Result<Vec<IndexWeight>> {
    if n % 2 == 1 {
        return Err(Error::ContractNotApplicable(format!(
            "Pontrjagin index formula needs even n, got n = {n}"
        )));
    }
    check_tuple(q, n)?;
    if 2 * q.iter().sum::<u32>() != n {
        return Err(Error::InvalidArgument(format!(
            "entries of q must sum to n/2 = {}",
            n / 2
        )));
    }
    let k: Vec<u32> = q.iter().map(|&qi| 2 * (n - qi)).collect();
    let norm = sign((n / 2) as i64) * Rat::from(num_bigint::BigInt::from(2).pow(n));
    inversion_weights(&k, 2 * n, &norm.recip()?)
}

/// Coefficient of `Π (1+y_i)^{k_i}` as a combination of `y`-coefficients:
/// `λ_p = scale · Π_i (-1)^{p_i - k_i} C(p_i, k_i)`.
fn inversion_weights(k: &[u32], max: u32, scale: &Rat) -> Result<Vec<IndexWeight>> {
    let mut out = Vec::new();
    for p in tuples(k.len() as u32, max) {
        if p.iter().zip(k).any(|(pi, ki)| pi < ki) {
            continue;
        }
        let mut w = scale.clone();
        for (&pi, &ki) in p.iter().zip(k) {
            w = w * Rat::from(binomial(pi as i64, ki as i64)?) * sign(pi as i64 - ki as i64);
        }
        if !w.is_zero() {
            out.push(IndexWeight { p, weight: w });
        }
    }
    Ok(out)
}

/// `Σ λ_p · Ind_p`.
pub fn reconstruct(weights: &[IndexWeight], iv: &IndexVector) -> Result<Form> {
    let mut acc = Form::zero();
    for w in weights {
        let v = iv.entries.get(&w.p).ok_or_else(|| {
            Error::InvalidArgument(format!("index vector has no entry for p = {:?}", w.p))
        })?;
        acc.add_assign_ref(&v.scale(&w.weight));
    }
    Ok(acc)
}

fn tuple_str(p: &[u32]) -> String {
    p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// One `p=(..) weight=λ` line per tuple, then a machine block with the same
/// content.
pub fn format_index_formula(n: u32, q: &[u32], weights: &[IndexWeight]) -> String {
    let mut out = String::new();
    for w in weights {
        writeln!(out, "p=({}) weight={}", tuple_str(&w.p), w.weight).unwrap();
    }
    writeln!(out, "begin index-formula n={n} q={}", tuple_str(q)).unwrap();
    for w in weights {
        writeln!(out, "{} {}", tuple_str(&w.p), w.weight).unwrap();
    }
    writeln!(out, "end index-formula").unwrap();
    out
}

/// Reads the machine block back.
pub fn parse_index_formula(text: &str) -> Result<Vec<IndexWeight>> {
    let mut inside = false;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let err = |col: usize, msg: &str| Error::Parse {
            line: idx + 1,
            column: col,
            message: msg.into(),
        };
        if line.starts_with("begin index-formula") {
            inside = true;
            continue;
        }
        if line == "end index-formula" {
            return Ok(out);
        }
        if !inside {
            continue;
        }
        let (p, w) = line.split_once(' ').ok_or_else(|| err(1, "expected '<tuple> <weight>'"))?;
        let p = p
            .split(',')
            .map(|x| x.parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| err(1, "bad tuple"))?;
        let weight: Rat = w.parse().map_err(|_| err(p.len() + 2, "bad weight"))?;
        out.push(IndexWeight { p, weight });
    }
    Err(Error::Parse {
        line: text.lines().count().max(1),
        column: 1,
        message: "missing 'end index-formula'".into(),
    })
}

/// `2 - 20y + 2y^2`-style rendering of a polynomial in one `y` variable.
pub fn format_y_poly(p: &Poly<Form>, var: Var, name: &str) -> String {
    let mut terms: Vec<(u32, &Form)> = p.terms().map(|(m, c)| (m.exponent(var), c)).collect();
    terms.sort_by_key(|(e, _)| *e);
    let mut out = String::new();
    for (e, c) in terms {
        let power = match e {
            0 => String::new(),
            1 => name.to_string(),
            _ => format!("{name}^{e}"),
        };
        let (negative, body) = match c.as_constant() {
            Some(r) => {
                let a = r.abs();
                let body = if a.is_one() && e > 0 { power } else { format!("{a}{power}") };
                (r.is_negative(), body)
            }
            None => (false, format!("({c}){power}")),
        };
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
