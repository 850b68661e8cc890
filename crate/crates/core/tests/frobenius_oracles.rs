use mumhodge::examples::{quintic, theta4, two_mum};
use mumhodge::picard_fuchs::{apply_log_graded, frobenius_basis, mirror_map, PFOperator};
use mumhodge::rational::{int, rat};
use mumhodge::{Rational, RationalSeries};
use proptest::prelude::*;

fn binomial(n: i64, k: i64) -> Rational {
    (0..k).fold(int(1), |acc, i| acc * int(n - i) / int(i + 1))
}

/// `Θ⁴ ∘ (1 − cz)ᵏ`, whose solutions are the pure-log solutions of `Θ⁴`
/// divided by `(1 − cz)ᵏ`.
fn conjugated_theta4(c: &Rational, k: i64) -> PFOperator {
    let rows = (0..=k)
        .map(|j| {
            let scale = binomial(k, j) * num_traits::pow(-c.clone(), j as usize);
            // z^j (Θ + j)⁴
            std::array::from_fn(|i| &scale * binomial(4, i as i64) * num_traits::pow(int(j), 4 - i))
        })
        .collect();
    PFOperator::new(rows).unwrap()
}

fn harmonic(n: i64) -> Rational {
    (1..=n).fold(int(0), |acc, k| acc + rat(1, k))
}

fn quintic_coefficient(n: i64) -> Rational {
    let fact = |m: i64| (1..=m).fold(int(1), |acc, k| acc * int(k));
    fact(5 * n) / num_traits::pow(fact(n), 5)
}

#[test]
fn quintic_matches_hypergeometric_closed_form() {
    let fb = frobenius_basis(&quintic(), 8, &int(0)).unwrap();
    for n in 0..=8 {
        let a = quintic_coefficient(n);
        assert_eq!(fb.psi3().coeff(n as usize), &a);
        // ∂_ε of the deformed coefficient a(n + ε)/a(ε)
        assert_eq!(fb.psi2().coeff(n as usize), &(&a * int(5) * (harmonic(5 * n) - harmonic(n))));
    }
    assert_eq!(fb.psi2().coeff(1), &int(770));
}

#[test]
fn theta4_mirror_map_is_identity() {
    let fb = frobenius_basis(&theta4(), 10, &int(0)).unwrap();
    let mm = mirror_map(&fb, &int(1)).unwrap();
    assert_eq!(mm.q_of_z, RationalSeries::variable(&int(0), 10));
}

#[test]
fn two_mum_mirror_map_doubles_consistently() {
    let low = mirror_map(&frobenius_basis(&two_mum(), 5, &int(0)).unwrap(), &int(1)).unwrap();
    let high = mirror_map(&frobenius_basis(&two_mum(), 10, &int(0)).unwrap(), &int(1)).unwrap();
    assert_eq!(high.q_of_z.truncate(5), low.q_of_z);
    assert_eq!(low.q_of_z.coeff(0), &int(0));
    assert_eq!(low.q_of_z.coeff(1), &int(1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5))]

    #[test]
    fn conjugated_theta4_residuals_vanish(p in -5i64..=5, q in 1i64..=4, k in 1i64..=3) {
        prop_assume!(p != 0);
        let c = rat(p, q);
        let op = conjugated_theta4(&c, k);
        let order = 12;
        let fb = frobenius_basis(&op, order, &int(0)).unwrap();
        for idx in 0..4 {
            let res = apply_log_graded(&op, &fb.log_graded(idx));
            prop_assert!(res.iter().all(RationalSeries::is_exact_zero));
        }
        let factor = RationalSeries::new(vec![int(1), -c.clone()]).extend_exact(order).pow(k as u32);
        prop_assert_eq!(fb.psi3().clone(), factor.inverse().unwrap());
        for j in 1..4 {
            prop_assert!(fb.psi_all()[j].is_exact_zero());
        }
    }

    #[test]
    fn higher_order_extends_basis(p in -5i64..=5, q in 1i64..=4, k in 1i64..=3) {
        let op = conjugated_theta4(&rat(p, q), k);
        let low = frobenius_basis(&op, 6, &int(0)).unwrap();
        let high = frobenius_basis(&op, 12, &int(0)).unwrap();
        for j in 0..4 {
            prop_assert_eq!(high.psi_all()[j].truncate(6), low.psi_all()[j].clone());
        }
    }
}
