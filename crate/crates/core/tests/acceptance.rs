//! One test per acceptance criterion; each prints a single pass/fail line.

use std::time::{Duration, Instant};

use mumhodge::continuation::{cross_mum_invariants, global_monodromy, CrossMumOptions};
use mumhodge::examples::{quintic_invariants, two_mum};
use mumhodge::lmhs::{hodge_to_mirror, mirror_to_hodge, torelli_distinguish, MirrorInvariants, TorelliBranch, TorelliVerdict};
use mumhodge::picard_fuchs::{
    frobenius_basis, indicial_polynomial, local_monodromy_mum, mirror_map, singular_points, IndicialPolynomial, SingularLocation,
};
use mumhodge::rational::{int, rat};
use mumhodge::symplectic::{
    act_weight_stabilizer, check_integrality_polarization, invariants, is_integral, is_symplectic, normal_form, pairing,
    NormalForm, WeightStabilizerElement,
};
use mumhodge::{BigComplex, Mat4, Rational, RationalMatrix, RationalSeries, Vec4};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::float::Constant;
use rug::Float;

fn report(n: u32, name: &str, budget: Duration, run: impl FnOnce() -> Result<String, String>) {
    let start = Instant::now();
    let outcome = run();
    let elapsed = start.elapsed();
    let outcome = match outcome {
        Ok(detail) if elapsed > budget => Err(format!("{detail}; took {elapsed:.1?}, budget {budget:?}")),
        other => other,
    };
    match &outcome {
        Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail} ({elapsed:.2?})"),
        Err(why) => println!("criterion {n:>2} FAIL  {name}: {why} ({elapsed:.2?})"),
    }
    if let Err(why) = outcome {
        panic!("criterion {n} failed: {why}");
    }
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn bound() -> BigInt {
    BigInt::from(1_000_000)
}

#[test]
fn criterion_01_quintic_dictionary() {
    report(1, "quintic dictionary", Duration::from_secs(1), || {
        let point = mirror_to_hodge(&quintic_invariants(), 128);
        ensure(point.normal_form == NormalForm::from_ints(1, 5, (-1, 2), (-25, 6)), "normal form")?;
        // −200 ζ(3)/(2πi)³ = −(25 ζ(3)/π³) i
        let zeta3 = Float::with_val(256, 3).zeta();
        let pi3 = Float::with_val(256, Constant::Pi).square() * Float::with_val(256, Constant::Pi);
        let expected_im = -(Float::with_val(256, &zeta3 * 25) / pi3);
        let err_im = (Float::with_val(256, point.pi.im()) - &expected_im).abs().to_f64();
        let err_re = point.pi.re().clone().abs().to_f64();
        ensure(err_im < 1e-30 && err_re < 1e-30, format!("pi off by {err_im:e}"))?;
        let back = hodge_to_mirror(&point, &bound()).map_err(|e| e.to_string())?;
        ensure(back == quintic_invariants(), format!("inverse gave {back}"))?;
        Ok(format!("pi = {}, |error| = {err_im:.1e}", point.pi.to_string_digits(20)))
    });
}

#[test]
fn criterion_02_quintic_normalization() {
    report(2, "quintic normalization", Duration::from_secs(1), || {
        let start = NormalForm::new(int(-1), int(5), rat(11, 2), rat(-25, 6));
        let g = WeightStabilizerElement::new(int(0), int(5), int(0), int(0));
        let nf = act_weight_stabilizer(&g, &start.sign_flipped());
        ensure(nf == NormalForm::from_ints(1, 5, (-1, 2), (-25, 6)), format!("got {nf:?}"))?;
        let check = check_integrality_polarization(&nf);
        ensure(check.passes(), format!("integrality/polarization: {:?}", check.failures()))?;
        let inv = invariants(&nf).map_err(|e| e.to_string())?;
        ensure(inv.b == 5.into() && inv.abs_a == 1.into(), "b, |a|")?;
        ensure(inv.e_class.doubled && inv.e_class.value == 1.into() && inv.e_class.modulus == 2.into(), "e class")?;
        ensure(invariants(&start).map_err(|e| e.to_string())? == inv, "start presentation invariants")?;
        Ok(format!("{inv}"))
    });
}

fn transvection(v: [i64; 4], k: i64) -> RationalMatrix {
    let v: Vec4<Rational> = v.map(int);
    let cols: [Vec4<Rational>; 4] = std::array::from_fn(|j| {
        let e: Vec4<Rational> = std::array::from_fn(|i| if i == j { int(1) } else { int(0) });
        let c = pairing(&v, &e) * int(k);
        std::array::from_fn(|i| &e[i] + &c * &v[i])
    });
    Mat4::from_columns(cols)
}

fn random_normal_form(rng: &mut ChaCha8Rng) -> NormalForm {
    let a = if rng.gen() { rng.gen_range(1..=4) } else { -rng.gen_range(1..=4) };
    let b: i64 = rng.gen_range(1..=12);
    let (e0, f0): (i64, i64) = (rng.gen_range(-6..=6), rng.gen_range(-6..=6));
    NormalForm::new(int(a), int(b), int(e0) + rat(a * b, 2), int(f0) + rat(a * a * b, 6))
}

#[test]
fn criterion_03_invariance_suite() {
    report(3, "invariance suite", Duration::from_secs(30), || {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 0..500 {
            let nf = random_normal_form(&mut rng);
            let (p, q, r0, s0): (i64, i64, i64, i64) =
                (rng.gen_range(-4..=4), rng.gen_range(-4..=4), rng.gen_range(-4..=4), rng.gen_range(-4..=4));
            let g = WeightStabilizerElement::new(int(p), int(q), int(r0) + rat(p * q, 2), int(s0) + rat(p * p * q, 6));
            ensure(g.is_integral(), format!("stabilizer sample {i} not integral"))?;
            let moved = act_weight_stabilizer(&g, &nf);
            ensure(invariants(&moved).ok() == invariants(&nf).ok(), format!("stabilizer sample {i}"))?;
        }
        for i in 0..50 {
            let nf = random_normal_form(&mut rng);
            let g = (0..rng.gen_range(1..6)).fold(Mat4::identity(&int(0)), |acc, _| {
                let v = [(); 4].map(|_| rng.gen_range(-2..=2));
                &acc * &transvection(v, if rng.gen() { 1 } else { -1 })
            });
            let t = &(&g * &nf.monodromy()) * &g.inverse().expect("unimodular");
            let (found, a) = normal_form(&t).map_err(|e| format!("conjugation {i}: {e}"))?;
            ensure(is_integral(&a) && is_symplectic(&a), format!("conjugation {i}: basis change"))?;
            ensure(invariants(&found).ok() == invariants(&nf).ok(), format!("conjugation {i}"))?;
        }
        Ok("500 stabilizer actions, 50 Sp(4, Z) conjugations".into())
    });
}

#[test]
fn criterion_04_frobenius_two_mum() {
    report(4, "Frobenius basis of the two-MUM operator", Duration::from_secs(5), || {
        let op = two_mum();
        let data = indicial_polynomial(&op, &SingularLocation::zero()).map_err(|e| e.to_string())?;
        let rho4 = mumhodge::picard_fuchs::Poly::new(vec![int(0), int(0), int(0), int(0), int(1)]);
        ensure(matches!(&data.polynomial, IndicialPolynomial::Exact(p) if p.monic() == rho4), format!("Q0 = {}", data.polynomial))?;
        ensure(data.is_mum, "not MUM")?;
        let fb = frobenius_basis(&op, 50, &int(0)).map_err(|e| e.to_string())?;
        ensure(fb.psi3().coeff(0) == &int(1) && fb.psi3().coeff(1) == &int(9), "psi3 = 1 + 9z")?;
        Ok("indicial rho^4, psi3 = 1 + 9z + O(z^2) at order 50".into())
    });
    report(4, "Frobenius order stability 50 -> 100", Duration::from_secs(60), || {
        let op = two_mum();
        let low = frobenius_basis(&op, 50, &int(0)).map_err(|e| e.to_string())?;
        let high = frobenius_basis(&op, 100, &int(0)).map_err(|e| e.to_string())?;
        for j in 0..4 {
            ensure(high.psi_all()[j].truncate(50) == low.psi_all()[j], format!("psi index {j} changed"))?;
        }
        Ok("all coefficients through order 50 unchanged".into())
    });
}

#[test]
fn criterion_05_local_monodromy_oracle() {
    report(5, "loop at 0 equals the Pascal matrix", Duration::from_secs(120), || {
        let prec = 200;
        let g = global_monodromy(&two_mum(), None, prec).map_err(|e| e.to_string())?;
        let at_zero = g.loops.iter().find(|l| l.location == SingularLocation::zero()).ok_or("no loop at 0")?;
        let pascal = local_monodromy_mum().map(|q| BigComplex::from_rational(prec, q));
        let err = (&at_zero.matrix.matrix - &pascal).max_abs();
        ensure(err < 1e-25, format!("max entry error {err:e}"))?;
        Ok(format!("max entry error {err:.1e} at {prec} bits"))
    });
}

#[test]
fn criterion_06_global_relation() {
    report(6, "global monodromy relation", Duration::from_secs(600), || {
        let g = global_monodromy(&two_mum(), None, 200).map_err(|e| e.to_string())?;
        let residual = g.log2_residual.exp2();
        ensure(residual < 1e-20, format!("residual {residual:e}"))?;
        Ok(format!("{} loops, |product - I| = 2^{:.1}", g.loops.len(), g.log2_residual))
    });
}

#[test]
fn criterion_07_two_mum_consistency() {
    report(7, "two-MUM consistency", Duration::from_secs(1800), || {
        let op = two_mum();
        let mums: Vec<SingularLocation> = singular_points(&op, 160)
            .into_iter()
            .filter(|p| indicial_polynomial(&op, &p.location).is_ok_and(|d| d.is_mum))
            .map(|p| p.location)
            .collect();
        ensure(mums == vec![SingularLocation::zero(), SingularLocation::Infinity], format!("MUM points {mums:?}"))?;
        let r = cross_mum_invariants(&op, &mums[0], &mums[1], &CrossMumOptions::default()).map_err(|e| e.to_string())?;
        let [p1, p2] = r.points();
        ensure(p1.invariants == p2.invariants, format!("invariants {} vs {}", p1.invariants, p2.invariants))?;
        ensure(r.torelli.verdict == TorelliVerdict::Inconclusive, format!("torelli {}", r.torelli.summary))?;
        Ok(format!("{} at both points; torelli {} ({})", p1.invariants, r.torelli.verdict, r.torelli.summary))
    });
}

#[test]
fn criterion_08_torelli_branches() {
    report(8, "Torelli branches", Duration::from_secs(1), || {
        let p42 = mirror_to_hodge(&MirrorInvariants::new(42, 84, -98), 128);
        let p14 = mirror_to_hodge(&MirrorInvariants::new(14, 56, -84), 128);
        let v = torelli_distinguish(&p42, &p14, &bound(), 128);
        ensure(v.verdict == TorelliVerdict::Distinguishable && v.is_exact(), "b = 42 vs 14")?;
        let same = torelli_distinguish(&p42, &p42, &bound(), 128);
        ensure(same.verdict == TorelliVerdict::Inconclusive, "identical records")?;
        let mut shifted = p42.clone();
        shifted.pi = &shifted.pi + &BigComplex::from_rational(128, &rat(1, 2));
        let half = torelli_distinguish(&shifted, &p42, &bound(), 128);
        ensure(half.verdict == TorelliVerdict::Inconclusive, "pi difference 1/2 verdict")?;
        ensure(matches!(half.branch, TorelliBranch::PiDifferenceRational { ref value, .. } if *value == rat(1, 2)), "recognized 1/2")?;
        Ok("42 vs 14 distinguishable; identical and 1/2-shifted inconclusive".into())
    });
}

#[test]
fn criterion_09_mirror_map() {
    report(9, "mirror-map properties", Duration::from_secs(5), || {
        let fb = frobenius_basis(&two_mum(), 50, &int(0)).map_err(|e| e.to_string())?;
        let mm = mirror_map(&fb, &int(1)).map_err(|e| e.to_string())?;
        ensure(mm.q_of_z.coeff(0) == &int(0) && mm.q_of_z.coeff(1) == &int(1), "q(0) = 0, q'(0) = 1")?;
        let id = RationalSeries::variable(&int(0), 50);
        ensure(mm.q_of_z.compose(&mm.z_of_q).map_err(|e| e.to_string())? == id, "q(z(q)) = q")?;
        ensure(mm.z_of_q.compose(&mm.q_of_z).map_err(|e| e.to_string())? == id, "z(q(z)) = z")?;
        let trivial = frobenius_basis(&mumhodge::examples::theta4(), 50, &int(0)).map_err(|e| e.to_string())?;
        ensure(mirror_map(&trivial, &int(1)).map_err(|e| e.to_string())?.q_of_z == id, "psi2 = 0 gives q = z")?;
        Ok(format!("q = z + {} z^2 + ...", mm.q_of_z.coeff(2)))
    });
}

#[test]
fn criterion_10_calibration() {
    report(10, "precision calibration 128 -> 256", Duration::from_secs(300), || {
        let low = global_monodromy(&two_mum(), None, 128).map_err(|e| e.to_string())?;
        let high = global_monodromy(&two_mum(), None, 256).map_err(|e| e.to_string())?;
        ensure(low.system.base == high.system.base.with_prec(low.system.base.prec()), "paths differ")?;
        let gain = low.log2_residual - high.log2_residual;
        ensure(gain >= 64.0, format!("residual 2^{:.1} -> 2^{:.1}", low.log2_residual, high.log2_residual))?;
        Ok(format!("residual 2^{:.1} -> 2^{:.1}, gain 2^{gain:.1}", low.log2_residual, high.log2_residual))
    });
}
