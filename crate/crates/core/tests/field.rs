use std::collections::HashSet;

use proptest::prelude::*;
use qrlab::field::{is_prime, prime_power_decomposition, FieldElement, FieldSpec};

fn odd_prime_powers(limit: u64) -> Vec<u64> {
    (3..=limit)
        .filter(|&q| q % 2 == 1 && prime_power_decomposition(q).is_some())
        .collect()
}

/// Squares computed by multiplication alone, independent of any character code.
fn squares(spec: &FieldSpec) -> HashSet<u64> {
    spec.elements()
        .filter(|x| !x.is_zero())
        .map(|x| spec.mul(x, x).index())
        .collect()
}

#[test]
fn multiplicativity_up_to_1000() {
    for q in odd_prime_powers(1000) {
        let spec = FieldSpec::with_order(q).unwrap();
        let chi = spec.character_table();
        for a in 1..q {
            for b in a..q {
                let ab = spec.mul(spec.element(a).unwrap(), spec.element(b).unwrap());
                assert_eq!(
                    chi[ab.index() as usize],
                    chi[a as usize] * chi[b as usize],
                    "q={q} a={a} b={b}"
                );
            }
        }
    }
}

#[test]
fn balance_and_residue_count() {
    for q in odd_prime_powers(2000) {
        let spec = FieldSpec::with_order(q).unwrap();
        let chi = spec.character_table();
        assert_eq!(chi.iter().map(|&c| i64::from(c)).sum::<i64>(), 0, "q={q}");
        let residues = chi.iter().filter(|&&c| c == 1).count() as u64;
        assert_eq!(residues, (q - 1) / 2, "q={q}");
        assert_eq!(chi[0], 0);
    }
}

#[test]
fn character_matches_squares_and_euler_up_to_10000() {
    for q in odd_prime_powers(10_000) {
        let spec = FieldSpec::with_order(q).unwrap();
        let sq = squares(&spec);
        for a in spec.elements() {
            let fast = spec.character(a).value();
            let euler = spec.character_euler(a).value();
            assert_eq!(fast, euler, "q={q} a={}", a.index());
            let expect = if a.is_zero() {
                0
            } else if sq.contains(&a.index()) {
                1
            } else {
                -1
            };
            assert_eq!(fast, expect, "q={q} a={}", a.index());
        }
    }
}

#[test]
fn field_axioms_up_to_81() {
    for q in [3u64, 5, 7, 9, 11, 13, 25, 27, 49, 81] {
        let spec = FieldSpec::with_order(q).unwrap();
        let all: Vec<FieldElement> = spec.elements().collect();
        let zero = spec.element(0).unwrap();
        let one = spec.element(1).unwrap();
        for &a in &all {
            assert_eq!(spec.add(a, zero), a);
            assert_eq!(spec.mul(a, one), a);
            assert_eq!(spec.add(a, spec.neg(a)), zero);
            assert_eq!(spec.sub(a, a), zero);
            if !a.is_zero() {
                assert_eq!(spec.mul(a, spec.inv(a).unwrap()), one, "q={q}");
            }
            for &b in &all {
                assert_eq!(spec.add(a, b), spec.add(b, a));
                assert_eq!(spec.mul(a, b), spec.mul(b, a));
                assert_eq!(spec.add(spec.sub(a, b), b), a);
                for &c in &all {
                    assert_eq!(spec.add(spec.add(a, b), c), spec.add(a, spec.add(b, c)));
                    assert_eq!(spec.mul(spec.mul(a, b), c), spec.mul(a, spec.mul(b, c)));
                    assert_eq!(
                        spec.mul(a, spec.add(b, c)),
                        spec.add(spec.mul(a, b), spec.mul(a, c)),
                        "q={q}"
                    );
                }
            }
        }
        assert!(spec.inv(zero).is_err());
    }
}

#[test]
fn multiplicative_group_is_cyclic_with_fixed_generator() {
    for q in [9u64, 25, 27, 49, 81, 121, 125, 243, 343, 729] {
        let spec = FieldSpec::with_order(q).unwrap();
        let g = spec.element(spec.generator_index().unwrap()).unwrap();
        let mut seen = HashSet::new();
        let mut x = spec.element(1).unwrap();
        for _ in 0..q - 1 {
            assert!(seen.insert(x.index()));
            x = spec.mul(x, g);
        }
        assert_eq!(seen.len() as u64, q - 1);
    }
}

#[test]
fn nine_element_field() {
    let spec = FieldSpec::with_order(9).unwrap();
    assert_eq!(spec.characteristic(), 3);
    assert_eq!(spec.degree(), 2);
    assert_eq!(spec.modulus().unwrap(), &[2, 1, 1]);
    // x * x = x^2 = -x - 2 = 2x + 1, index 1 + 2*3 = 7.
    let x = spec.element(3).unwrap();
    assert_eq!(spec.mul(x, x).index(), 7);
}

#[test]
fn rejects_invalid_orders() {
    for q in [0u64, 1, 2, 4, 6, 8, 12, 15, 1024] {
        assert!(FieldSpec::with_order(q).is_err(), "q={q}");
    }
    assert!(FieldSpec::new(9, 1).is_err());
    assert!(FieldSpec::new(3, 0).is_err());
    assert!(is_prime(2_147_483_647));
}

#[test]
fn large_prime_uses_euler() {
    let spec = FieldSpec::with_order(2_147_483_647).unwrap();
    // 2 is a residue mod p when p = 7 mod 8.
    assert_eq!(spec.character(spec.from_int(2)).value(), 1);
    assert_eq!(spec.character(spec.from_int(-1)).value(), -1);
}

proptest! {
    #[test]
    fn prime_field_character_is_multiplicative(p in prop::sample::select(vec![10_007u64, 65_537, 999_983, 1_000_003, 2_147_483_647]), a in 1u64.., b in 1u64..) {
        let spec = FieldSpec::with_order(p).unwrap();
        let (a, b) = (spec.from_int((a % (p - 1) + 1) as i64), spec.from_int((b % (p - 1) + 1) as i64));
        let lhs = spec.character(spec.mul(a, b)).value();
        prop_assert_eq!(lhs, spec.character(a).value() * spec.character(b).value());
        prop_assert_eq!(spec.character(a), spec.character_euler(a));
    }

    #[test]
    fn pow_matches_repeated_multiplication(idx in 0u64..729, e in 0u64..50) {
        let spec = FieldSpec::with_order(729).unwrap();
        let a = spec.element(idx).unwrap();
        let mut acc = spec.element(1).unwrap();
        for _ in 0..e {
            acc = spec.mul(acc, a);
        }
        prop_assert_eq!(spec.pow(a, e), acc);
    }
}
