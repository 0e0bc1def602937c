use genus_forge::cohomology::{chern_character, integrate, symmetric_product, BundleContext, CohClass, RootSet};
use genus_forge::elliptic::{
    ell_bundle, ell_theta, modular_coefficients, quasi_periodicity_check, route_agreement,
    verify_forced_vanishing, BundleSpec,
};
use genus_forge::genus::{chi_y, todd_series};
use genus_forge::manifolds::{k3, symbolic_manifold};
use genus_forge::poly::{Algebra, Form, Module, Mono, Poly, Var};
use genus_forge::series::RootSeries;
use genus_forge::Rat;
use proptest::prelude::*;

fn inv_fact(j: u32) -> Rat {
    let f: i64 = (1..=j as i64).product();
    Rat::new(1, f)
}

fn y_pow(k: u32) -> Mono {
    if k == 0 {
        Mono::one()
    } else {
        Mono::from_pairs([(Var::Y(1), k)])
    }
}

/// `χ_{-y}(M, (y - y^2)T* + (y - 1)T)` assembled by hand from td, Λ_{-y}T* and ch.
fn q1_oracle(d: u32) -> Poly<Form> {
    let m = symbolic_manifold(d).unwrap();
    let y = Poly::<Rat>::var(Var::Y(1));
    let lam = RootSeries::from_fn(d, |j| {
        let e = if j % 2 == 0 { inv_fact(j) } else { -inv_fact(j) };
        let mut t = y.scale(&-e);
        if j == 0 {
            t.add_assign_ref(&Poly::one());
        }
        t
    });
    let lift = |c: &CohClass<Rat>| c.map_coeffs(|r| Poly::constant(r.clone()));
    let td = lift(&symmetric_product(&todd_series(d), d, d, RootSet::Tangent).unwrap());
    let lam = symmetric_product(&lam, d, d, RootSet::Tangent).unwrap();
    let dual = lift(&chern_character(RootSet::Tangent, d, d, -1));
    let tangent = lift(&chern_character(RootSet::Tangent, d, d, 1));
    let a = y.sub_ref(&y.mul_ref(&y));
    let b = y.sub_ref(&Poly::one());
    let v = dual.mul_coeff(&a).add(&tangent.mul_coeff(&b));
    integrate(&td.mul(&lam).mul(&v), &m).unwrap()
}

#[test]
fn tangent_q1_slice_matches_twisted_index() {
    for d in 1..=4u32 {
        let m = symbolic_manifold(d).unwrap();
        let ctx = BundleContext::new(d, d).unwrap();
        let e = ell_bundle(&m, BundleSpec::Tangent, &ctx, 2).unwrap();
        let p = q1_oracle(d);
        for k in 0..=d + 2 {
            let y2 = 2 * k as i64 - 2 - d as i64;
            assert_eq!(e.series.coeff(8, y2), p.coeff(&y_pow(k)), "d={d} y-power {k}");
        }
    }
}

#[test]
fn k3_matches_twice_the_weak_jacobi_form_of_weight_zero() {
    // φ_{0,1} = (y + 10 + 1/y) + q(10y^{±2} - 64y^{±1} + 108) + q^2(y^{±3} + 108y^{±2} - 513y^{±1} + 808)
    let phi: [&[i64]; 3] = [&[0, 0, 1, 10], &[0, 10, -64, 108], &[1, 108, -513, 808]];
    let ctx = BundleContext::with_relations(2, 2).unwrap();
    let e = ell_theta(&k3(), BundleSpec::Tangent, &ctx, 3).unwrap();
    for (n, row) in phi.iter().enumerate() {
        for (i, &c) in row.iter().enumerate() {
            let k = 3 - i as i64;
            for y2 in [2 * k, -2 * k] {
                assert_eq!(
                    e.series.coeff(8 * n as i64, y2),
                    Form::constant(Rat::from(2 * c)),
                    "q^{n} y^{}",
                    y2 / 2
                );
            }
        }
    }
}

#[test]
fn untwisted_modular_coefficients_need_no_correction() {
    // l = 0: exp(0·G_2 u^2) = 1, so a_n is the u^n coefficient of Ell itself
    let m = symbolic_manifold(4).unwrap();
    let ctx = BundleContext::new(4, 0).unwrap();
    let e = ell_bundle(&m, BundleSpec::Generic { rank: 0 }, &ctx, 3).unwrap();
    let a = modular_coefficients(&e, 3).unwrap();
    let z = e.series.y_to_z(3);
    for n in 0..3 {
        assert_eq!(&a[n], z.coeff(n as u32));
    }
    assert!(a[1].is_empty() && a[2].is_empty());
}

#[test]
fn q0_slice_is_chi_minus_y_for_concrete_manifolds() {
    for name in ["cp1", "cp2", "cp3", "quintic"] {
        let m = genus_forge::manifolds::catalog(name).unwrap();
        let d = m.dim();
        let ctx = BundleContext::new(d, d).unwrap();
        let e = ell_bundle(&m, BundleSpec::Tangent, &ctx, 1).unwrap();
        let chi = chi_y(&m).unwrap();
        for p in 0..=d {
            let want = chi.coeff(&y_pow(p)).scale(&Rat::from(if p % 2 == 0 { 1 } else { -1 }));
            assert_eq!(e.series.coeff(0, 2 * p as i64 - d as i64), want, "{name} p={p}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn routes_agree_and_support_is_correct(d in 1u32..=4, l in 0u32..=5, relations in any::<bool>(), order in 1i64..=3) {
        let m = symbolic_manifold(d).unwrap();
        let ctx = if relations {
            BundleContext::with_relations(d, l).unwrap()
        } else {
            BundleContext::new(d, l).unwrap()
        };
        let b = BundleSpec::Generic { rank: l };
        let e1 = ell_bundle(&m, b, &ctx, order).unwrap();
        let e2 = ell_theta(&m, b, &ctx, order).unwrap();
        let r = route_agreement(&e1, &e2);
        prop_assert!(r.passed, "{}", r);
        for ((q8, y2), _) in e1.series.terms() {
            prop_assert!(*q8 >= 0 && q8 % 8 == 0);
            prop_assert_eq!((y2 - l as i64).rem_euclid(2), 0);
        }
        if relations {
            for r in quasi_periodicity_check(&e1) {
                prop_assert!(r.passed, "{}", r);
            }
            let a = modular_coefficients(&e1, 4).unwrap();
            let r = verify_forced_vanishing(&e1, &a);
            prop_assert!(r.passed, "{}", r);
        }
    }
}
