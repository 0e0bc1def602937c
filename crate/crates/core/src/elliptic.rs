//! Twisted elliptic genus `Ell(M, W, τ, z)` by two independent routes, with
//! checks of its transformation laws and of the modular coefficients `a_n`.
//!
//! Bundle route: `∫ td(M)·ch(E(W,q,y))`, with the symmetric and exterior
//! powers expanded root by root.
//!
//! Theta route: `∫ exp((c_1(M)-c_1(W))/2)·η^{3(d-l)}·Π v_i/θ(τ,v_i)·Π θ(τ,ŵ_j - z)`.
//!
//! Both produce a `q`-series with integral `q`-exponents and half-integral
//! `y`-exponents. Inputs are truncated one order above the requested cap
//! because the negative `η` powers in the theta route eat into it.

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;

use crate::arith::{factorial, Rat};
use crate::cohomology::{
    apply_relations, chern_character, integrate, symmetric_product, BundleContext, CohClass, RootSet,
};
use crate::error::{Error, Result};
use crate::genus::todd_series;
use crate::manifolds::ManifoldData;
use crate::poly::{Algebra, Form, Module, Poly, Var};
use crate::qforms::{eisenstein, euler_product, modular_membership, theta_at_root, theta_hat_over_root, ModularCertificate, ThetaArg, Verdict};
use crate::series::{QYSeries, RootSeries, ZSeries, Q_DEN};

/// The twisting bundle `W`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BundleSpec {
    /// `W = TM`, rank `d`.
    Tangent,
    /// A bundle of the given rank with free Chern classes `w_j`.
    Generic { rank: u32 },
}

impl BundleSpec {
    pub fn rank(&self, d: u32) -> u32 {
        match self {
            BundleSpec::Tangent => d,
            BundleSpec::Generic { rank } => *rank,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Bundle,
    Theta,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Bundle => "bundle",
            Route::Theta => "theta",
        })
    }
}

/// `Ell(M, W)` truncated below `q^order`.
#[derive(Clone, Debug, PartialEq)]
pub struct EllSeries {
    pub series: QYSeries<Form>,
    pub ctx: BundleContext,
    pub bundle: BundleSpec,
    pub route: Route,
    pub order: i64,
}

impl fmt::Display for EllSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.series)
    }
}

fn check_inputs(m: &ManifoldData, bundle: BundleSpec, ctx: &BundleContext, order: i64) -> Result<()> {
    if order < 1 {
        return Err(Error::InvalidArgument("q-order must be at least 1".into()));
    }
    if ctx.d != m.dim() {
        return Err(Error::InvalidArgument(format!(
            "context dimension {} differs from manifold dimension {}",
            ctx.d,
            m.dim()
        )));
    }
    if bundle.rank(ctx.d) != ctx.l {
        return Err(Error::InvalidArgument(format!(
            "bundle rank {} differs from context rank {}",
            bundle.rank(ctx.d),
            ctx.l
        )));
    }
    Ok(())
}

/// Context actually used for substitution. With `W = T`, `c_1(W) = 0`
/// is `c_1(M) = 0` and `p_1(W) = p_1(M)` holds trivially.
fn effective_context(bundle: BundleSpec, ctx: &BundleContext) -> BundleContext {
    match bundle {
        BundleSpec::Tangent => BundleContext {
            calabi_yau: ctx.calabi_yau || ctx.relations,
            relations: false,
            ..*ctx
        },
        BundleSpec::Generic { .. } => *ctx,
    }
}

/// Applies the relations and integrates.
fn finish<R: crate::cohomology::Integrand>(
    x: &CohClass<R>,
    m: &ManifoldData,
    bundle: BundleSpec,
    ctx: &BundleContext,
) -> Result<R::Value> {
    let eff = effective_context(bundle, ctx);
    if !m.is_symbolic() && (eff.relations || eff.calabi_yau) {
        m.check_relations(&eff)?;
    }
    integrate(&apply_relations(x, &eff)?, m)
}

fn scalar(q8: i64, y2: i64, c: Rat, cap: i64) -> QYSeries<Rat> {
    QYSeries::term(q8, y2, c, cap)
}

/// `c·q^{q8/8} y^{y2/2} e^{a·v}` as a root series.
fn exp_term(a: i64, q8: i64, y2: i64, c: &Rat, degree: u32, cap: i64) -> RootSeries<QYSeries<Rat>> {
    RootSeries::from_fn(degree, |j| {
        let w = c * &(Rat::from(a).pow(j as i32) * factorial(j).recip().unwrap());
        scalar(q8, y2, w, cap)
    })
}

fn one_series(degree: u32, cap: i64) -> RootSeries<QYSeries<Rat>> {
    exp_term(0, 0, 0, &Rat::one(), degree, cap)
}

/// `td(v)·Π_{n≥1} 1/((1 - q^n e^{-v})(1 - q^n e^{v}))`.
fn bundle_tangent_factor(degree: u32, order: i64) -> RootSeries<QYSeries<Rat>> {
    let cap = order * Q_DEN;
    let td = todd_series(degree);
    let mut f = RootSeries::from_fn(degree, |j| scalar(0, 0, td.coeff(j).clone(), cap));
    for n in 1..order {
        for sign in [-1, 1] {
            let mut geo = one_series(degree, cap);
            let mut k = 1;
            while n * k < order {
                geo = geo.add(&exp_term(sign * k, n * k * Q_DEN, 0, &Rat::one(), degree, cap));
                k += 1;
            }
            f = f.mul(&geo);
        }
    }
    f
}

/// `(1 - y e^{-ŵ})·Π_{n≥1} (1 - y q^n e^{-ŵ})(1 - y^{-1} q^n e^{ŵ})`.
fn bundle_twist_factor(degree: u32, order: i64) -> RootSeries<QYSeries<Rat>> {
    let cap = order * Q_DEN;
    let one = one_series(degree, cap);
    let minus = -Rat::one();
    let mut f = one.add(&exp_term(-1, 0, 2, &minus, degree, cap));
    for n in 1..order {
        f = f.mul(&one.add(&exp_term(-1, n * Q_DEN, 2, &minus, degree, cap)));
        f = f.mul(&one.add(&exp_term(1, n * Q_DEN, -2, &minus, degree, cap)));
    }
    f
}

/// Product over the roots of `M` of `fm`, and over the roots of `W` of `fw`.
fn root_products(
    fm: &RootSeries<QYSeries<Rat>>,
    fw: &RootSeries<QYSeries<Rat>>,
    d: u32,
    bundle: BundleSpec,
) -> Result<CohClass<QYSeries<Rat>>> {
    match bundle {
        BundleSpec::Tangent => symmetric_product(&fm.mul(fw), d, d, RootSet::Tangent),
        BundleSpec::Generic { rank } => {
            let a = symmetric_product(fm, d, d, RootSet::Tangent)?;
            if rank == 0 {
                return Ok(a);
            }
            let b = symmetric_product(fw, rank, d, RootSet::Twist)?;
            Ok(a.mul(&b))
        }
    }
}

fn truncate_checked(s: QYSeries<Form>, order: i64) -> Result<QYSeries<Form>> {
    let cap = order * Q_DEN;
    if s.cap8() < cap {
        return Err(Error::InsufficientTruncation(format!(
            "series exact only below q^{}, q^{order} requested",
            Rat::new(s.cap8(), Q_DEN)
        )));
    }
    Ok(s.truncate(cap))
}

/// `Ell(M, W)` from the bundle `E(W, q, y)`.
pub fn ell_bundle(m: &ManifoldData, bundle: BundleSpec, ctx: &BundleContext, order: i64) -> Result<EllSeries> {
    check_inputs(m, bundle, ctx, order)?;
    let (d, l) = (ctx.d, ctx.l);
    let work = order + 1;
    let fm = bundle_tangent_factor(d, work);
    let fw = bundle_twist_factor(d, work);
    let roots = root_products(&fm, &fw, d, bundle)?;
    // c^{2(d-l)} y^{-l/2}
    let c = euler_product(work)?;
    let pre = c.powi(2 * (d as i64 - l as i64))?.shift(0, -(l as i64));
    let x = roots.mul_coeff(&pre);
    let series = finish(&x, m, bundle, ctx)?;
    Ok(EllSeries {
        series: truncate_checked(series, order)?,
        ctx: *ctx,
        bundle,
        route: Route::Bundle,
        order,
    })
}

/// `Ell(M, W)` from the theta-function integrand.
pub fn ell_theta(m: &ManifoldData, bundle: BundleSpec, ctx: &BundleContext, order: i64) -> Result<EllSeries> {
    check_inputs(m, bundle, ctx, order)?;
    let (d, l) = (ctx.d, ctx.l);
    let work = order + 1;
    // v/Θ̂(q, v) and Θ̂(q, ŵ - u)
    let fm = theta_hat_over_root(work, d)?.invert()?;
    let fw = theta_at_root(ThetaArg { root: 1, u: -1 }, work, d)?;
    let mut x = root_products(&fm, &fw, d, bundle)?;
    if let BundleSpec::Generic { rank } = bundle {
        let mut half = CohClass::<Rat>::var(Var::C(1), d);
        if rank >= 1 {
            half = half.sub(&CohClass::var(Var::W(1), d));
        }
        let e = half.scale(&Rat::new(1, 2)).exp()?;
        x = x.mul(&e.map_coeffs(|r| QYSeries::<Rat>::one().scale(r)));
    }
    // η^{3(d-l)} without its q^{(d-l)/8}, which cancels against the thetas
    let eta = euler_product(work)?.powi(3 * (d as i64 - l as i64))?;
    let x = x.mul_coeff(&eta);
    let series = finish(&x, m, bundle, ctx)?;
    Ok(EllSeries {
        series: truncate_checked(series, order)?,
        ctx: *ctx,
        bundle,
        route: Route::Theta,
        order,
    })
}

/// Outcome of one identity check.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub context: String,
    pub identity: String,
    pub verified_order: i64,
    pub passed: bool,
    pub details: Vec<String>,
}

impl Report {
    fn new(ctx: &BundleContext, identity: &str, order: i64) -> Self {
        Report {
            context: format!("d={} l={}", ctx.d, ctx.l),
            identity: identity.into(),
            verified_order: order,
            passed: true,
            details: Vec::new(),
        }
    }

    fn fail(&mut self, detail: String) {
        self.passed = false;
        self.details.push(detail);
    }

    fn note(&mut self, detail: String) {
        self.details.push(detail);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "context=({}) identity={} order={} verdict={}",
            self.context,
            self.identity,
            self.verified_order,
            if self.passed { "pass" } else { "FAIL" }
        )?;
        for d in &self.details {
            write!(f, "\n  {d}")?;
        }
        Ok(())
    }
}

fn exponent(q8: i64, y2: i64) -> String {
    format!("q^{} y^{}", Rat::new(q8, Q_DEN), Rat::new(y2, 2))
}

/// Compares two series on the exponents where `known` holds, listing the
/// offending coefficients.
fn compare_series(
    report: &mut Report,
    lhs: &QYSeries<Form>,
    rhs: &QYSeries<Form>,
    known: impl Fn(i64, i64) -> bool,
) -> usize {
    let keys: BTreeSet<(i64, i64)> = lhs.terms().chain(rhs.terms()).map(|(k, _)| *k).collect();
    let mut compared = 0;
    for (q8, y2) in keys {
        if !known(q8, y2) {
            continue;
        }
        compared += 1;
        let (a, b) = (lhs.coeff(q8, y2), rhs.coeff(q8, y2));
        if a != b {
            report.fail(format!("{}: {a} vs {b}", exponent(q8, y2)));
        }
    }
    compared
}

/// Checks that the two routes agree term by term.
pub fn route_agreement(a: &EllSeries, b: &EllSeries) -> Report {
    let order = a.order.min(b.order);
    let mut r = Report::new(&a.ctx, "route-agreement", order);
    let cap = order * Q_DEN;
    compare_series(&mut r, &a.series, &b.series, |q8, _| q8 < cap);
    r
}

/// Checks the `z -> z+1`, `z -> z+τ` and `τ -> τ+1` laws on the formal series.
pub fn quasi_periodicity_check(e: &EllSeries) -> Vec<Report> {
    let l = e.ctx.l as i64;
    let cap = e.series.cap8();
    let mut out = Vec::new();

    let mut r1 = Report::new(&e.ctx, "tau-shift", e.order);
    for ((q8, y2), c) in e.series.terms() {
        if q8 % Q_DEN != 0 {
            r1.fail(format!("{}: {c} (non-integral q-power)", exponent(*q8, *y2)));
        }
    }
    if r1.passed {
        r1.note("structurally satisfied: all q-exponents integral".into());
    }
    out.push(r1);

    let mut r2 = Report::new(&e.ctx, "z-shift-by-1", e.order);
    for ((q8, y2), c) in e.series.terms() {
        if (y2 - l).rem_euclid(2) != 0 {
            r2.fail(format!("{}: {c} (y-exponent not congruent to l/2)", exponent(*q8, *y2)));
        }
    }
    out.push(r2);

    let mut r3 = Report::new(&e.ctx, "z-shift-by-tau", e.order);
    let (shifted, dropped) = e.series.shift_y_by_q();
    let sign = if l % 2 == 0 { Rat::one() } else { -Rat::one() };
    let rhs = e.series.shift(-4 * l, -2 * l).scale(&sign);
    // left exact where the preimage q^{c-b} is known, right where q^{c+l/2} is
    let compared = compare_series(&mut r3, &shifted, &rhs, |q8, y2| q8 - 4 * y2 < cap && q8 + 4 * l < cap);
    r3.note(format!("compared {compared} coefficients{}", if dropped { ", some shifted terms beyond the cap" } else { "" }));
    if e.series.is_empty() {
        r3.note("series vanishes identically, identity holds trivially".into());
    } else if compared == 0 {
        r3.fail("no coefficient lies in the common window".into());
    }
    out.push(r3);
    out
}

/// Evaluates a series with rational coefficients at complex `τ`, `z`.
pub fn evaluate(s: &QYSeries<Form>, tau: Complex64, z: Complex64) -> Result<Complex64> {
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let mut acc = Complex64::new(0.0, 0.0);
    for ((q8, y2), c) in s.terms() {
        let c = c.as_constant().ok_or_else(|| {
            Error::Unsupported("numeric evaluation needs numeric Chern numbers".into())
        })?;
        let phase = two_pi_i * (tau * (*q8 as f64 / Q_DEN as f64) + z * (*y2 as f64 / 2.0));
        acc += phase.exp() * c.to_f64();
    }
    Ok(acc)
}

/// Numeric check of `Ell(-1/τ, z/τ) = τ^{d-l} exp(πi l z²/τ) Ell(τ, z)`.
/// Returns the relative error.
pub fn s_transform_numeric_check(e: &EllSeries, tau: Complex64, z: Complex64) -> Result<f64> {
    let l = e.ctx.l as f64;
    let lhs = evaluate(&e.series, -tau.inv(), z / tau)?;
    let factor = tau.powi(e.ctx.d as i32 - e.ctx.l as i32)
        * (Complex64::new(0.0, std::f64::consts::PI) * l * z * z / tau).exp();
    let rhs = factor * evaluate(&e.series, tau, z)?;
    Ok((lhs - rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE))
}

/// `a_0, ..., a_{u_cap-1}` with `exp(l G_2 u^2)·Ell = Σ a_n u^n`.
pub fn modular_coefficients(e: &EllSeries, u_cap: u32) -> Result<Vec<QYSeries<Form>>> {
    let order = e.order;
    let z = e.series.y_to_z(u_cap);
    let g2 = eisenstein(2, order)?.scale(&Rat::from(e.ctx.l));
    let arg: Vec<QYSeries<Rat>> = (0..u_cap)
        .map(|n| if n == 2 { g2.clone() } else { QYSeries::zero_to(order) })
        .collect();
    let factor = ZSeries::new(arg).exp()?;
    let prod = z.mul_scalar(&factor);
    Ok(prod.coeffs().iter().map(|s| s.truncate(order * Q_DEN)).collect())
}

/// Membership certificates for each `a_n` at weight `d - l + n`.
pub fn certify_coefficients(e: &EllSeries, a: &[QYSeries<Form>]) -> Result<Vec<ModularCertificate<Form>>> {
    let k = e.ctx.d as i64 - e.ctx.l as i64;
    a.iter()
        .enumerate()
        .map(|(n, s)| modular_membership(s, k + n as i64, e.order))
        .collect()
}

/// `Σ_p χ(M, Λ^p W*) y^p` after relations, computed straight from
/// `td(M)·Π_j (1 + y e^{-ŵ_j})`.
pub fn lambda_twist_indices(m: &ManifoldData, bundle: BundleSpec, ctx: &BundleContext) -> Result<Vec<Form>> {
    check_inputs(m, bundle, ctx, 1)?;
    let d = ctx.d;
    let lift = |s: &RootSeries<Rat>| RootSeries::from_fn(s.degree(), |k| Poly::constant(s.coeff(k).clone()));
    let td = lift(&todd_series(d));
    let y = Poly::<Rat>::var(Var::Y(1));
    let lam = RootSeries::from_fn(d, |j| {
        let c = Rat::from(if j % 2 == 0 { 1 } else { -1 }) * factorial(j).recip().unwrap();
        y.scale(&c)
    })
    .add(&RootSeries::one(d));
    let x = match bundle {
        BundleSpec::Tangent => symmetric_product(&td.mul(&lam), d, d, RootSet::Tangent)?,
        BundleSpec::Generic { rank } => {
            let a = symmetric_product(&td, d, d, RootSet::Tangent)?;
            if rank == 0 {
                a
            } else {
                a.mul(&symmetric_product(&lam, rank, d, RootSet::Twist)?)
            }
        }
    };
    let p = finish(&x, m, bundle, ctx)?;
    let l = ctx.l;
    Ok((0..=l)
        .map(|k| {
            let mono = if k == 0 {
                crate::poly::Mono::one()
            } else {
                crate::poly::Mono::from_pairs([(Var::Y(1), k)])
            };
            p.coeff(&mono)
        })
        .collect())
}

/// `Σ_p (-1)^p (p - l/2)^k χ(M, Λ^p W*)`.
fn lambda_moment(chi: &[Form], l: u32, k: i32) -> Form {
    let mut acc = Form::zero();
    for (p, c) in chi.iter().enumerate() {
        let s = Rat::from(if p % 2 == 0 { 1 } else { -1 });
        let w = s * (Rat::from(p as i64) - Rat::new(l as i64, 2)).pow(k);
        acc.add_assign_ref(&c.scale(&w));
    }
    acc
}

/// `χ(M, Λ_{-1}W* ⊗ (-2(d-l) - W - W* + T + T*))` through Chern characters.
pub fn a0_first_order_index(m: &ManifoldData, bundle: BundleSpec, ctx: &BundleContext) -> Result<Form> {
    check_inputs(m, bundle, ctx, 1)?;
    let (d, l) = (ctx.d, ctx.l);
    let td = symmetric_product(&todd_series(d), d, d, RootSet::Tangent)?;
    let (set, n) = match bundle {
        BundleSpec::Tangent => (RootSet::Tangent, d),
        BundleSpec::Generic { rank } => (RootSet::Twist, rank),
    };
    // Λ_{-1} W* = Π (1 - e^{-ŵ})
    let one_minus = RootSeries::from_fn(d, |j| {
        if j == 0 {
            Rat::zero()
        } else {
            Rat::from(if j % 2 == 1 { 1 } else { -1 }) * factorial(j).recip().unwrap()
        }
    });
    let lam = symmetric_product(&one_minus, n, d, set)?;
    let w_part = chern_character(set, n, d, 1).add(&chern_character(set, n, d, -1));
    let t_part = chern_character(RootSet::Tangent, d, d, 1).add(&chern_character(RootSet::Tangent, d, d, -1));
    let virt = t_part
        .sub(&w_part)
        .add(&CohClass::constant(Rat::from(-2 * (d as i64 - l as i64)), d));
    let x = td.mul(&lam).mul(&virt);
    finish(&x, m, bundle, ctx)
}

fn q0_coeff(s: &QYSeries<Form>) -> Form {
    s.coeff(0, 0)
}

fn q1_coeff(s: &QYSeries<Form>) -> Form {
    s.coeff(Q_DEN, 0)
}

/// Checks the `q^0` (and for `a_0` the `q^1`) terms of `a_0, a_1, a_2`
/// against the twisted indices.
pub fn verify_coefficient_heads(m: &ManifoldData, bundle: BundleSpec, ctx: &BundleContext, a: &[QYSeries<Form>]) -> Result<Report> {
    let order = a.first().map(|s| s.cap8() / Q_DEN).unwrap_or(0);
    let mut r = Report::new(ctx, "coefficient-heads", order);
    let chi = lambda_twist_indices(m, bundle, ctx)?;
    let l = ctx.l;
    let euler = lambda_moment(&chi, l, 0);
    let mut check = |name: &str, got: Form, want: Form| {
        if got != want {
            r.fail(format!("{name}: series gives {got}, index formula gives {want}"));
        }
    };
    check("a0 q^0", q0_coeff(&a[0]), euler.clone());
    if a.len() > 1 {
        check("a1 q^0", q0_coeff(&a[1]), lambda_moment(&chi, l, 1));
    }
    if a.len() > 2 {
        let want = euler
            .scale(&Rat::new(-(l as i64), 24))
            .add_ref(&lambda_moment(&chi, l, 2).scale(&Rat::new(1, 2)));
        check("a2 q^0", q0_coeff(&a[2]), want);
    }
    if order >= 2 {
        check("a0 q^1", q1_coeff(&a[0]), a0_first_order_index(m, bundle, ctx)?);
    }
    Ok(r)
}

/// Whether the `a_2` identity applies: `d - l` odd, or `d <= l` with `d - l != -2`.
pub fn a2_hypothesis(d: u32, l: u32) -> bool {
    let k = d as i64 - l as i64;
    k.rem_euclid(2) == 1 || (k <= 0 && k != -2)
}

/// `Σ(-1)^p (p - l/2)^2 χ(M, Λ^p W*) = (l/12) χ(M, Λ_{-1} W*)`.
pub fn verify_a2_identity(m: &ManifoldData, bundle: BundleSpec, ctx: &BundleContext) -> Result<Report> {
    if !a2_hypothesis(ctx.d, ctx.l) {
        return Err(Error::ContractNotApplicable(format!(
            "the a_2 identity needs d - l odd, or d <= l with d - l != -2 (d = {}, l = {})",
            ctx.d, ctx.l
        )));
    }
    let chi = lambda_twist_indices(m, bundle, ctx)?;
    let lhs = lambda_moment(&chi, ctx.l, 2);
    let rhs = lambda_moment(&chi, ctx.l, 0).scale(&Rat::new(ctx.l as i64, 12));
    let mut r = Report::new(ctx, "a2-identity", 1);
    if lhs != rhs {
        let diff = lhs.sub_ref(&rhs);
        r.fail(format!("left - right = {diff}"));
    }
    Ok(r)
}

/// `W = T`, `c_1 = 0`: the left side of the `a_2` identity equals
/// `2a_2 - (1-d)a_1 + (d^2/4)a_0` of the χ_y expansion, and all three equal
/// `(d/12)∫c_d`.
pub fn verify_a2_tangent_chain(m: &ManifoldData) -> Result<Report> {
    let d = m.dim();
    let ctx = BundleContext::with_relations(d, d)?;
    let mut r = Report::new(&ctx, "a2-tangent-chain", 1);
    let cy = BundleContext {
        relations: false,
        calabi_yau: true,
        ..ctx
    };
    let a = |i: u32| -> Result<Form> {
        integrate(&apply_relations(&crate::genus::closed_form_a(i, d)?, &cy)?, m)
    };
    let chain = a(2)?
        .scale(&Rat::from(2))
        .sub_ref(&a(1)?.scale(&Rat::from(1 - d as i64)))
        .add_ref(&a(0)?.scale(&Rat::new((d * d) as i64, 4)));
    let cd = integrate(&CohClass::<Rat>::var(Var::C(d as u8), d), m)?;
    let target = cd.scale(&Rat::new(d as i64, 12));
    if chain != target {
        r.fail(format!("closed-form chain gives {chain}, expected {target}"));
    }
    let chi = lambda_twist_indices(m, BundleSpec::Tangent, &ctx)?;
    let lhs = lambda_moment(&chi, d, 2);
    if lhs != target {
        r.fail(format!("Σ(-1)^p (p - d/2)^2 χ^p = {lhs}, expected {target}"));
    }
    let rhs = lambda_moment(&chi, d, 0).scale(&Rat::new(d as i64, 12));
    if rhs != target {
        r.fail(format!("(d/12)χ(M, Λ_-1 T*) = {rhs}, expected {target}"));
    }
    Ok(r)
}

/// Relation between the `q^1` and `q^0` terms of `a_0` forced by its weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum A0Relation {
    /// Both terms vanish.
    Vanishing,
    /// `q^1 = ratio · q^0`.
    Ratio(i64),
}

pub fn a0_relation(d: u32, l: u32) -> Option<A0Relation> {
    let k = d as i64 - l as i64;
    match k {
        _ if k.rem_euclid(2) == 1 || (k <= 2 && k != 0) => Some(A0Relation::Vanishing),
        4 => Some(A0Relation::Ratio(240)),
        6 => Some(A0Relation::Ratio(-504)),
        8 => Some(A0Relation::Ratio(480)),
        _ => None,
    }
}

/// Checks the relation for `a_0`, both on the series and on the explicit
/// index `χ(M, Λ_{-1}W* ⊗ (...))`.
pub fn verify_a0_relations(m: &ManifoldData, bundle: BundleSpec, e: &EllSeries, a: &[QYSeries<Form>]) -> Result<Report> {
    let ctx = e.ctx;
    let rel = a0_relation(ctx.d, ctx.l).ok_or_else(|| {
        Error::ContractNotApplicable(format!("no a_0 relation for d - l = {}", ctx.d as i64 - ctx.l as i64))
    })?;
    if e.order < 2 {
        return Err(Error::InsufficientTruncation("the a_0 relations need the q^1 term".into()));
    }
    let name = match rel {
        A0Relation::Vanishing => "a0-vanishing".to_string(),
        A0Relation::Ratio(k) => format!("a0-ratio-{k}"),
    };
    let mut r = Report::new(&ctx, &name, e.order);
    let q0 = q0_coeff(&a[0]);
    let q1 = q1_coeff(&a[0]);
    let index = a0_first_order_index(m, bundle, &ctx)?;
    if index != q1 {
        r.fail(format!("q^1 term {q1} differs from the index {index}"));
    }
    match rel {
        A0Relation::Vanishing => {
            if !q0.is_zero() || !q1.is_zero() {
                r.fail(format!("expected both zero, got q^0: {q0}, q^1: {q1}"));
            }
        }
        A0Relation::Ratio(k) => {
            let want = q0.scale(&Rat::from(k));
            if q1 != want {
                r.fail(format!("q^1 term {q1} differs from {k}·({q0})"));
            }
            if q0.is_zero() {
                r.note("both sides vanish identically in this context".into());
            }
        }
    }
    let cert = modular_membership(&a[0], ctx.d as i64 - ctx.l as i64, e.order)?;
    if cert.verdict == Verdict::Fail {
        r.fail(format!("a_0 is not modular of weight {}: {cert}", cert.weight));
    }
    Ok(r)
}

/// `a_1 ≡ 0` when `d - l` is even, or `d - l <= 1` with `d - l != -1`.
pub fn verify_a1_vanishing(e: &EllSeries, a: &[QYSeries<Form>]) -> Result<Report> {
    let k = e.ctx.d as i64 - e.ctx.l as i64;
    if !(k.rem_euclid(2) == 0 || (k <= 1 && k != -1)) {
        return Err(Error::ContractNotApplicable(format!("a_1 need not vanish for d - l = {k}")));
    }
    let mut r = Report::new(&e.ctx, "a1-vanishing", e.order);
    if a.len() < 2 {
        return Err(Error::InsufficientTruncation("u-cap below 2".into()));
    }
    for ((q8, y2), c) in a[1].terms() {
        r.fail(format!("{}: {c}", exponent(*q8, *y2)));
    }
    Ok(r)
}

/// Every `a_n` whose weight forces it to vanish does vanish.
pub fn verify_forced_vanishing(e: &EllSeries, a: &[QYSeries<Form>]) -> Report {
    let k = e.ctx.d as i64 - e.ctx.l as i64;
    let mut r = Report::new(&e.ctx, "forced-vanishing", e.order);
    for (n, s) in a.iter().enumerate() {
        let w = k + n as i64;
        if w < 0 || w % 2 != 0 || w == 2 {
            for ((q8, y2), c) in s.terms() {
                r.fail(format!("a{n} (weight {w}) {}: {c}", exponent(*q8, *y2)));
            }
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genus::chi_y;
    use crate::manifolds::{k3, symbolic_manifold};

    fn k3_ctx() -> BundleContext {
        BundleContext::with_relations(2, 2).unwrap()
    }

    #[test]
    fn k3_leading_terms() {
        let e = ell_bundle(&k3(), BundleSpec::Tangent, &k3_ctx(), 2).unwrap();
        let c = |y2| e.series.coeff(0, y2).as_constant().unwrap();
        assert_eq!((c(-2), c(0), c(2)), (Rat::from(2), Rat::from(20), Rat::from(2)));
        assert_eq!(e.series.q_slice(0).len(), 3);
    }

    #[test]
    fn q0_slice_is_chi_minus_y() {
        // y^{-d/2} χ_{-y}(M), on a symbolic manifold without relations
        for d in 1..=3u32 {
            let m = symbolic_manifold(d).unwrap();
            let ctx = BundleContext::new(d, d).unwrap();
            let e = ell_bundle(&m, BundleSpec::Tangent, &ctx, 1).unwrap();
            let chi = chi_y(&m).unwrap();
            for p in 0..=d {
                let mono = if p == 0 { crate::poly::Mono::one() } else { crate::poly::Mono::from_pairs([(Var::Y(1), p)]) };
                let want = chi.coeff(&mono).scale(&Rat::from(if p % 2 == 0 { 1 } else { -1 }));
                assert_eq!(e.series.coeff(0, 2 * p as i64 - d as i64), want);
            }
        }
    }

    #[test]
    fn routes_agree_small() {
        let e1 = ell_bundle(&k3(), BundleSpec::Tangent, &k3_ctx(), 3).unwrap();
        let e2 = ell_theta(&k3(), BundleSpec::Tangent, &k3_ctx(), 3).unwrap();
        assert_eq!(e1.series, e2.series);
        let ctx = BundleContext::with_relations(3, 1).unwrap();
        let m = symbolic_manifold(3).unwrap();
        let b = ell_bundle(&m, BundleSpec::Generic { rank: 1 }, &ctx, 2).unwrap();
        let t = ell_theta(&m, BundleSpec::Generic { rank: 1 }, &ctx, 2).unwrap();
        assert!(route_agreement(&b, &t).passed);
        // and without any relation at all
        let ctx = BundleContext::new(2, 1).unwrap();
        let m = symbolic_manifold(2).unwrap();
        let b = ell_bundle(&m, BundleSpec::Generic { rank: 1 }, &ctx, 2).unwrap();
        let t = ell_theta(&m, BundleSpec::Generic { rank: 1 }, &ctx, 2).unwrap();
        assert_eq!(b.series, t.series);
    }

    #[test]
    fn k3_quasi_periodicity() {
        let e = ell_bundle(&k3(), BundleSpec::Tangent, &k3_ctx(), 4).unwrap();
        for r in quasi_periodicity_check(&e) {
            assert!(r.passed, "{r}");
        }
    }

    #[test]
    fn k3_s_transform() {
        let e = ell_bundle(&k3(), BundleSpec::Tangent, &k3_ctx(), 8).unwrap();
        let err = s_transform_numeric_check(&e, Complex64::new(0.0, 1.0), Complex64::new(0.1, 0.0)).unwrap();
        assert!(err < 1e-8, "relative error {err}");
    }

    #[test]
    fn k3_modular_coefficients() {
        let e = ell_bundle(&k3(), BundleSpec::Tangent, &k3_ctx(), 3).unwrap();
        let a = modular_coefficients(&e, 4).unwrap();
        // weight 0: a_0 is the constant 24
        assert_eq!(a[0].coeff(0, 0), Form::constant(Rat::from(24)));
        assert_eq!(a[0].len(), 1);
        let certs = certify_coefficients(&e, &a).unwrap();
        assert!(certs.iter().all(|c| c.passed()), "{certs:?}");
        assert!(verify_coefficient_heads(&k3(), BundleSpec::Tangent, &k3_ctx(), &a).unwrap().passed);
    }

    #[test]
    fn a2_gate() {
        let ctx = BundleContext::with_relations(2, 4).unwrap();
        let m = symbolic_manifold(2).unwrap();
        assert!(matches!(
            verify_a2_identity(&m, BundleSpec::Generic { rank: 4 }, &ctx),
            Err(Error::ContractNotApplicable(_))
        ));
        assert!(a2_hypothesis(3, 2));
        assert!(a2_hypothesis(2, 3));
        assert!(!a2_hypothesis(2, 4));
        assert!(a2_hypothesis(2, 2));
    }

    #[test]
    fn tangent_chain_symbolic() {
        for d in 2..=5 {
            let r = verify_a2_tangent_chain(&symbolic_manifold(d).unwrap()).unwrap();
            assert!(r.passed, "{r}");
        }
    }

    #[test]
    fn relation_table() {
        assert_eq!(a0_relation(5, 1), Some(A0Relation::Ratio(240)));
        assert_eq!(a0_relation(7, 1), Some(A0Relation::Ratio(-504)));
        assert_eq!(a0_relation(10, 2), Some(A0Relation::Ratio(480)));
        assert_eq!(a0_relation(3, 2), Some(A0Relation::Vanishing));
        assert_eq!(a0_relation(2, 2), None);
    }

    #[test]
    fn unsatisfied_relations_rejected() {
        let cp2 = crate::manifolds::projective_space(2).unwrap();
        assert!(matches!(
            ell_bundle(&cp2, BundleSpec::Tangent, &k3_ctx(), 2),
            Err(Error::UnsatisfiableRelation(_))
        ));
        let ctx = BundleContext::new(2, 2).unwrap();
        assert!(ell_bundle(&cp2, BundleSpec::Tangent, &ctx, 2).is_ok());
        assert!(ell_bundle(&cp2, BundleSpec::Tangent, &BundleContext::new(2, 1).unwrap(), 2).is_err());
    }
}
