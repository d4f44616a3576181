use num_bigint::BigUint;
use proptest::prelude::*;
use qrlab::field::{FieldElement, FieldSpec};
use qrlab::numeric::ratio;
use qrlab::poly::{
    census_constant, derivative, enumerate_polys, evaluate, hyperelliptic_census, is_squarefree, poly_gcd, rem,
    CensusMode, Polynomial,
};

fn mul(spec: &FieldSpec, a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() || b.is_zero() {
        return Polynomial::zero();
    }
    let mut out = vec![FieldElement::ZERO; a.coeffs().len() + b.coeffs().len() - 1];
    for (i, &x) in a.coeffs().iter().enumerate() {
        for (j, &y) in b.coeffs().iter().enumerate() {
            out[i + j] = spec.add(out[i + j], spec.mul(x, y));
        }
    }
    Polynomial::new(out)
}

fn divides(spec: &FieldSpec, d: &Polynomial, f: &Polynomial) -> bool {
    rem(spec, f, d).unwrap().is_zero()
}

fn monic_of_degree(spec: &FieldSpec, deg: usize) -> Vec<Polynomial> {
    enumerate_polys(spec, deg, false)
        .unwrap()
        .filter(|f| f.degree() == Some(deg) && f.leading() == FieldElement::ONE)
        .collect()
}

/// Squarefree by definition: no `g^2` with `deg g >= 1` divides `f`.
fn squarefree_oracle(spec: &FieldSpec, f: &Polynomial) -> bool {
    let d = f.degree().expect("nonzero");
    (1..=d / 2).all(|e| {
        monic_of_degree(spec, e)
            .iter()
            .all(|g| !divides(spec, &mul(spec, g, g), f))
    })
}

#[test]
fn gcd_contract_exhaustive_q3() {
    let spec = FieldSpec::with_order(3).unwrap();
    let polys: Vec<Polynomial> = enumerate_polys(&spec, 4, false).unwrap().collect();
    let monic: Vec<&Polynomial> = polys
        .iter()
        .filter(|f| !f.is_zero() && f.leading() == FieldElement::ONE)
        .collect();
    for a in &polys {
        for b in &polys {
            let g = poly_gcd(&spec, a, b);
            if a.is_zero() && b.is_zero() {
                assert!(g.is_zero());
                continue;
            }
            assert_eq!(g.leading(), FieldElement::ONE, "gcd not monic");
            assert!(divides(&spec, &g, a) && divides(&spec, &g, b));
            for d in &monic {
                if divides(&spec, d, a) && divides(&spec, d, b) {
                    assert!(divides(&spec, d, &g));
                }
            }
        }
    }
}

#[test]
fn squarefree_matches_definition() {
    for q in [3u64, 5, 9] {
        let spec = FieldSpec::with_order(q).unwrap();
        let max_deg = if q == 3 { 6 } else { 4 };
        for f in enumerate_polys(&spec, max_deg, false).unwrap() {
            match f.degree() {
                None => assert!(is_squarefree(&spec, &f).is_err()),
                Some(0) => assert!(is_squarefree(&spec, &f).unwrap()),
                Some(_) => assert_eq!(
                    is_squarefree(&spec, &f).unwrap(),
                    squarefree_oracle(&spec, &f),
                    "q={q} f={:?}",
                    f.coeffs()
                ),
            }
        }
    }
}

#[test]
fn inseparable_polynomials_are_not_squarefree() {
    let spec = FieldSpec::with_order(3).unwrap();
    // x^3 + 1 = (x + 1)^3 has zero derivative.
    let f = Polynomial::from_ints(&spec, &[1, 0, 0, 1]);
    assert!(derivative(&spec, &f).is_zero());
    assert!(!is_squarefree(&spec, &f).unwrap());
}

#[test]
fn census_enumeration_matches_closed_form() {
    for (q, k, failing) in [(3u64, 1u32, ratio(5, 9)), (5, 1, ratio(9, 25))] {
        let spec = FieldSpec::with_order(q).unwrap();
        let e = hyperelliptic_census(&spec, k, CensusMode::Enumerate).unwrap();
        let c = hyperelliptic_census(&spec, k, CensusMode::ClosedForm).unwrap();
        assert_eq!(e, c);
        assert_eq!(e.failing_fraction, failing);
        assert_eq!(e.c_qk, census_constant(q));
    }
}

#[test]
fn census_constant_independent_of_k() {
    let spec = FieldSpec::with_order(3).unwrap();
    let k1 = hyperelliptic_census(&spec, 1, CensusMode::Enumerate).unwrap();
    let k2 = hyperelliptic_census(&spec, 2, CensusMode::ClosedForm).unwrap();
    assert_eq!(k1.c_qk, k2.c_qk);
    let k2e = hyperelliptic_census(&spec, 2, CensusMode::Enumerate).unwrap();
    assert_eq!(k2e, k2);
    // Degree validity alone: leading coefficient nonzero.
    let degree_valid = enumerate_polys(&spec, 7, false)
        .unwrap()
        .filter(|f| f.degree() == Some(7))
        .count();
    assert_eq!(BigUint::from(degree_valid), BigUint::from(2u32 * 3u32.pow(7)));
    assert!(k2.valid_count <= BigUint::from(degree_valid));
}

#[test]
fn census_extension_field() {
    let spec = FieldSpec::with_order(9).unwrap();
    let e = hyperelliptic_census(&spec, 1, CensusMode::Enumerate).unwrap();
    assert_eq!(e.c_qk, ratio(17, 9));
}

#[test]
fn census_budget() {
    let spec = FieldSpec::with_order(5).unwrap();
    assert!(matches!(
        hyperelliptic_census(&spec, 3, CensusMode::Enumerate),
        Err(qrlab::Error::Budget { .. })
    ));
    assert!(hyperelliptic_census(&spec, 3, CensusMode::ClosedForm).is_ok());
}

#[test]
fn enumeration_order_is_lexicographic() {
    let spec = FieldSpec::with_order(3).unwrap();
    let v: Vec<Vec<u64>> = enumerate_polys(&spec, 1, false)
        .unwrap()
        .map(|f| (0..2).map(|j| f.coeff(j).index()).collect())
        .collect();
    // (a_0, a_1) with a_0 most significant.
    assert_eq!(v[1], vec![0, 1]);
    assert_eq!(v[3], vec![1, 0]);
    assert_eq!(v.len(), 9);
}

proptest! {
    #[test]
    fn gcd_divides_and_is_symmetric(a in prop::collection::vec(-6i64..7, 1..8), b in prop::collection::vec(-6i64..7, 1..8)) {
        let spec = FieldSpec::with_order(13).unwrap();
        let (fa, fb) = (Polynomial::from_ints(&spec, &a), Polynomial::from_ints(&spec, &b));
        let g = poly_gcd(&spec, &fa, &fb);
        prop_assert_eq!(&g, &poly_gcd(&spec, &fb, &fa));
        if !g.is_zero() {
            prop_assert!(divides(&spec, &g, &fa) && divides(&spec, &g, &fb));
        }
    }

    #[test]
    fn evaluation_is_a_ring_map(a in prop::collection::vec(0u64..25, 1..6), b in prop::collection::vec(0u64..25, 1..6), x in 0u64..25) {
        let spec = FieldSpec::with_order(25).unwrap();
        let lift = |v: &[u64]| Polynomial::new(v.iter().map(|&i| spec.element(i).unwrap()).collect());
        let (fa, fb) = (lift(&a), lift(&b));
        let x = spec.element(x).unwrap();
        let prod = mul(&spec, &fa, &fb);
        prop_assert_eq!(evaluate(&spec, &prod, x), spec.mul(evaluate(&spec, &fa, x), evaluate(&spec, &fb, x)));
    }

    #[test]
    fn product_with_square_is_not_squarefree(a in prop::collection::vec(-3i64..4, 2..4), b in prop::collection::vec(-3i64..4, 1..4)) {
        let spec = FieldSpec::with_order(7).unwrap();
        let g = Polynomial::from_ints(&spec, &a);
        let h = Polynomial::from_ints(&spec, &b);
        prop_assume!(g.degree().unwrap_or(0) >= 1 && !h.is_zero());
        let f = mul(&spec, &mul(&spec, &g, &g), &h);
        prop_assert!(!is_squarefree(&spec, &f).unwrap());
    }
}
