//! Algebraic invariants on seeded random inputs.

use proptest::prelude::*;
use rand::Rng;

use qsphere_core::calculus::{differential, form_dagger, form_right_mul};
use qsphere_core::derivations::{check_twisted_leibniz, Index};
use qsphere_core::json::{element_from_json, element_to_json, scalar_from_json, scalar_to_json, uq_from_json, uq_to_json};
use qsphere_core::uq::{act, antipode, antipode_inv, counit_uq, dagger, pairing};
use qsphere_core::{sample, Element, Scalar, Side, UqElement, UqGen};

/// A nonzero rational function `(x + y)/(z + w)`.
fn ratfunc(seed: u64) -> Scalar {
    let mut rng = sample::rng(seed);
    loop {
        let num = &sample::scalar(&mut rng) + &sample::scalar(&mut rng).mul_s_pow(2);
        let den = &sample::scalar(&mut rng) + &sample::scalar(&mut rng).mul_s_pow(4);
        if let (false, Ok(x)) = (num.is_zero(), num.checked_div(&den)) {
            return x;
        }
    }
}

fn element(seed: u64, max_len: u32) -> Element {
    sample::element(&mut sample::rng(seed), max_len, 3)
}

fn uq_element(seed: u64) -> UqElement {
    let mut rng = sample::rng(seed);
    let gens = [UqGen::K, UqGen::KInv, UqGen::E, UqGen::F];
    let mut out = UqElement::zero();
    for _ in 0..rng.gen_range(1..=2) {
        let word: Vec<UqGen> = (0..rng.gen_range(0..=2)).map(|_| gens[rng.gen_range(0..4)]).collect();
        out = &out + &UqElement::word(&word).scale(&sample::scalar(&mut rng));
    }
    out
}

fn side() -> impl Strategy<Value = Side> {
    prop_oneof![Just(Side::Left), Just(Side::Right)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scalars_form_a_field(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (x, y, z) = (ratfunc(a), ratfunc(b), ratfunc(c));
        prop_assert_eq!(&(&x + &y) * &z, &(&x * &z) + &(&y * &z));
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x - &x, Scalar::zero());
        prop_assert!(x.checked_div(&x).unwrap().is_one());
        prop_assert_eq!(&x.checked_div(&y).unwrap() * &y, x.clone());
        prop_assert_eq!(x.conjugate().conjugate(), x.clone());
        prop_assert_eq!((&x * &y).conjugate(), &x.conjugate() * &y.conjugate());
    }

    #[test]
    fn product_is_associative(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (x, y, z) = (element(a, 3), element(b, 3), element(c, 3));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&(&x + &y) * &z, &(&x * &z) + &(&y * &z));
    }

    #[test]
    fn star_is_an_antilinear_antimultiplicative_involution(a in any::<u64>(), b in any::<u64>()) {
        let (x, y) = (element(a, 3), element(b, 3));
        prop_assert_eq!(x.star().star(), x.clone());
        prop_assert_eq!((&x * &y).star(), &y.star() * &x.star());
        let i = Scalar::imaginary_unit().unwrap();
        prop_assert_eq!(x.scale(&i).star(), x.star().scale(&-i));
    }

    #[test]
    fn counit_is_a_character(a in any::<u64>(), b in any::<u64>()) {
        let (x, y) = (element(a, 3), element(b, 3));
        prop_assert_eq!((&x * &y).counit(), &x.counit() * &y.counit());
        prop_assert_eq!(x.star().counit(), x.counit().conjugate());
    }

    #[test]
    fn twisted_leibniz_holds(a in any::<u64>(), b in any::<u64>(), side in side()) {
        let (f, g) = (element(a, 2), element(b, 2));
        for idx in Index::ALL {
            let r = check_twisted_leibniz(idx, &f, &g, side);
            prop_assert!(r.passed(), "{:?}", r.failures);
        }
    }

    #[test]
    fn actions_are_module_structures(a in any::<u64>(), b in any::<u64>(), c in any::<u64>(), side in side()) {
        let (h, g, f) = (uq_element(a), uq_element(b), element(c, 2));
        let composed = match side {
            Side::Left => act(&h, &act(&g, &f, side), side),
            Side::Right => act(&g, &act(&h, &f, side), side),
        };
        prop_assert_eq!(act(&(&h * &g), &f, side), composed);
        prop_assert_eq!(act(&UqElement::one(), &f, side), f);
    }

    #[test]
    fn left_and_right_actions_commute(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (h, g, f) = (uq_element(a), uq_element(b), element(c, 2));
        let lr = act(&h, &act(&g, &f, Side::Right), Side::Left);
        let rl = act(&g, &act(&h, &f, Side::Left), Side::Right);
        prop_assert_eq!(lr, rl);
    }

    #[test]
    fn pairing_is_the_counit_of_either_action(a in any::<u64>(), b in any::<u64>()) {
        let (h, f) = (uq_element(a), element(b, 2));
        let p = pairing(&h, &f);
        prop_assert_eq!(act(&h, &f, Side::Left).counit(), p.clone());
        prop_assert_eq!(act(&h, &f, Side::Right).counit(), p);
    }

    #[test]
    fn hopf_structure_is_consistent(a in any::<u64>(), b in any::<u64>()) {
        let (h, g) = (uq_element(a), uq_element(b));
        prop_assert_eq!(antipode_inv(&antipode(&h)), h.clone());
        prop_assert_eq!(antipode(&(&h * &g)), &antipode(&g) * &antipode(&h));
        prop_assert_eq!(counit_uq(&(&h * &g)), &counit_uq(&h) * &counit_uq(&g));
        prop_assert_eq!(dagger(&dagger(&h)), h);
    }

    #[test]
    fn differential_is_a_derivation(a in any::<u64>(), b in any::<u64>()) {
        let (f, g) = (element(a, 2), element(b, 2));
        let lhs = differential(&(&f * &g));
        let rhs = &form_right_mul(&differential(&f), &g) + &differential(&g).left_mul(&f);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn dagger_is_an_involution_commuting_with_d(a in any::<u64>()) {
        let f = element(a, 3);
        let w = differential(&f);
        prop_assert_eq!(form_dagger(&form_dagger(&w)), w.clone());
        prop_assert_eq!(form_dagger(&w), differential(&f.star()));
    }

    #[test]
    fn json_round_trips(a in any::<u64>(), b in any::<u64>()) {
        let (f, x, h) = (element(a, 4), ratfunc(b), uq_element(a ^ b));
        prop_assert_eq!(element_from_json(&element_to_json(&f), "$").unwrap(), f);
        prop_assert_eq!(scalar_from_json(&scalar_to_json(&x), "$").unwrap(), x);
        prop_assert_eq!(uq_from_json(&uq_to_json(&h)).unwrap(), h);
    }
}
