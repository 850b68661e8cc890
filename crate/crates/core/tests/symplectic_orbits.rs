use mumhodge::rational::{int, rat};
use mumhodge::symplectic::{
    act_weight_stabilizer, invariants, is_integral, is_symplectic, normal_form, pairing, NormalForm, WeightStabilizerElement,
};
use mumhodge::{Mat4, Rational, RationalMatrix, Vec4};
use proptest::prelude::*;

/// Symplectic transvection `x ↦ x + k⟨v, x⟩ v`.
fn transvection(v: [i64; 4], k: i64) -> RationalMatrix {
    let v: Vec4<Rational> = v.map(int);
    let cols: [Vec4<Rational>; 4] = std::array::from_fn(|j| {
        let e: Vec4<Rational> = std::array::from_fn(|i| if i == j { int(1) } else { int(0) });
        let c = pairing(&v, &e) * int(k);
        std::array::from_fn(|i| &e[i] + &c * &v[i])
    });
    Mat4::from_columns(cols)
}

fn random_sp4z() -> impl Strategy<Value = RationalMatrix> {
    prop::collection::vec((prop::array::uniform4(-2i64..=2), prop_oneof![Just(-1i64), Just(1i64)]), 1..6).prop_map(|ts| {
        ts.into_iter()
            .fold(Mat4::identity(&int(0)), |acc, (v, k)| &acc * &transvection(v, k))
    })
}

fn quintic() -> NormalForm {
    NormalForm::from_ints(1, 5, (-1, 2), (-25, 6))
}

fn integral_normal_forms() -> impl Strategy<Value = NormalForm> {
    // a, b, then e = e0 + ab/2, f = f0 + a²b/6 with e0, f0 integers.
    (prop_oneof![1i64..=4, -4i64..=-1], 1i64..=12, -6i64..=6, -6i64..=6).prop_map(|(a, b, e0, f0)| {
        NormalForm::new(int(a), int(b), int(e0) + rat(a * b, 2), int(f0) + rat(a * a * b, 6))
    })
}

#[test]
fn transvections_are_symplectic() {
    let t = transvection([1, -2, 0, 1], 1);
    assert!(is_symplectic(&t) && is_integral(&t));
}

#[test]
fn conjugated_quintic_recovers_invariants() {
    let g = &transvection([1, 1, 0, 0], 1) * &transvection([0, 1, -1, 2], -1);
    let t = &(&g * &quintic().monodromy()) * &g.inverse().unwrap();
    let (nf, a) = normal_form(&t).unwrap();
    assert!(is_symplectic(&a) && is_integral(&a));
    assert_eq!(invariants(&nf).unwrap(), invariants(&quintic()).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_form_is_conjugation_invariant(nf in integral_normal_forms(), g in random_sp4z()) {
        let t = &(&g * &nf.monodromy()) * &g.inverse().unwrap();
        let (found, a) = normal_form(&t).unwrap();
        prop_assert!(is_symplectic(&a) && is_integral(&a));
        let n = mumhodge::symplectic::log_unipotent(&t).unwrap();
        prop_assert_eq!(&(&a.inverse().unwrap() * &n) * &a, found.nilpotent());
        prop_assert_eq!(invariants(&found).unwrap(), invariants(&nf).unwrap());
    }

    #[test]
    fn integral_stabilizer_preserves_invariants(
        nf in integral_normal_forms(),
        p in -3i64..=3, q in -3i64..=3, r0 in -3i64..=3, s0 in -3i64..=3,
    ) {
        let g = WeightStabilizerElement::new(int(p), int(q), int(r0) + rat(p * q, 2), int(s0) + rat(p * p * q, 6));
        prop_assert!(g.is_integral());
        let moved = act_weight_stabilizer(&g, &nf);
        prop_assert_eq!(invariants(&moved).unwrap(), invariants(&nf).unwrap());
        // the action is conjugation
        let conj = &(&g.matrix() * &nf.nilpotent()) * &g.matrix().inverse().unwrap();
        prop_assert_eq!(conj, moved.nilpotent());
    }

    #[test]
    fn stabilizer_composition_is_a_group_action(
        nf in integral_normal_forms(),
        p1 in -2i64..=2, q1 in -2i64..=2, p2 in -2i64..=2, q2 in -2i64..=2,
    ) {
        let g1 = WeightStabilizerElement::new(int(p1), int(q1), rat(p1 * q1, 2), rat(p1 * p1 * q1, 6));
        let g2 = WeightStabilizerElement::new(int(p2), int(q2), int(1) + rat(p2 * q2, 2), rat(p2 * p2 * q2, 6));
        let lhs = act_weight_stabilizer(&g2.compose(&g1), &nf);
        let rhs = act_weight_stabilizer(&g2, &act_weight_stabilizer(&g1, &nf));
        prop_assert_eq!(lhs, rhs);
    }
}
