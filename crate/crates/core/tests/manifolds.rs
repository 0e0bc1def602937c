use genus_forge::genus::{chi_y, chi_y_taylor_minus1};
use genus_forge::manifolds::{catalog, hypersurface, k3, product, projective_space, quintic, ManifoldData, CATALOG_NAMES};
use genus_forge::poly::{Form, Mono, Var};
use genus_forge::Rat;
use num_bigint::BigInt;
use proptest::prelude::*;

fn euler(m: &ManifoldData) -> Form {
    let d = m.dim();
    m.chern_number(&Mono::var(Var::C(d as u8))).unwrap()
}

/// Top Chern number of a degree-`a` hypersurface in `CP^n`:
/// `a·[h^{n-1}] (1+h)^{n+1}/(1+ah)`.
fn hypersurface_euler(n: u32, a: i64) -> i64 {
    let mut total = 0i64;
    for k in 0..n {
        let binom: i64 = (0..k as i64).fold(1, |acc, i| acc * (n as i64 + 1 - i) / (i + 1));
        total += binom * (-a).pow(n - 1 - k);
    }
    a * total
}

fn check_euler(m: &ManifoldData) {
    let a = chi_y_taylor_minus1(m).unwrap();
    assert_eq!(a[0], euler(m), "{}", m.name());
}

#[test]
fn catalog_euler_numbers() {
    for name in CATALOG_NAMES {
        check_euler(&catalog(name).unwrap());
    }
    assert_eq!(euler(&quintic()), Form::constant(Rat::from(-200)));
}

#[test]
fn calabi_yau_hypersurfaces() {
    for n in 2..=5u32 {
        let m = hypersurface(n, n as i64 + 1).unwrap();
        for (mono, v) in match m.numbers() {
            genus_forge::manifolds::ChernNumbers::Concrete(t) => t.clone(),
            _ => unreachable!(),
        } {
            if mono.exponent(Var::C(1)) > 0 {
                assert_eq!(v, BigInt::from(0), "{mono} on degree {} hypersurface", n + 1);
            }
        }
    }
}

#[test]
fn k3_chi_y() {
    let p = chi_y(&k3()).unwrap();
    let y = |k| if k == 0 { Mono::one() } else { Mono::from_pairs([(Var::Y(1), k)]) };
    let vals: Vec<Form> = (0..=2).map(|k| p.coeff(&y(k))).collect();
    assert_eq!(vals, [2, -20, 2].map(|v| Form::constant(Rat::from(v))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hypersurface_euler_consistency(n in 2u32..=5, a in 1i64..=6) {
        let m = hypersurface(n, a).unwrap();
        prop_assert_eq!(euler(&m), Form::constant(Rat::from(hypersurface_euler(n, a))));
        check_euler(&m);
    }

    #[test]
    fn product_euler_consistency(n1 in 1u32..=2, n2 in 2u32..=3, a in 1i64..=4) {
        let x = projective_space(n1).unwrap();
        let y = hypersurface(n2, a).unwrap();
        let m = product(&x, &y).unwrap();
        let want = Rat::from(n1 as i64 + 1) * Rat::from(hypersurface_euler(n2, a));
        prop_assert_eq!(euler(&m), Form::constant(want));
        check_euler(&m);
    }
}
