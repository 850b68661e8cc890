use mumhodge::continuation::{
    integral_frame, monodromy_representation, transport, verify_unipotent_log, CrossMumOptions, FrameSource, LocalFrame, LoopSpec,
    PathSpec,
};
use mumhodge::examples::{quintic, quintic_invariants, two_mum};
use mumhodge::picard_fuchs::SingularLocation;
use mumhodge::BigComplex;

const PREC: u32 = 128;

fn point(x: f64, y: f64) -> BigComplex {
    BigComplex::from_f64(PREC, x, y)
}

fn conifold() -> f64 {
    (123.0 - (123.0f64 * 123.0 - 4.0).sqrt()) / 2.0
}

fn max_difference(a: &mumhodge::ComplexMatrix, b: &mumhodge::ComplexMatrix) -> f64 {
    (a - b).max_abs()
}

#[test]
fn transports_compose() {
    let op = two_mum();
    let (a, b, c) = (point(0.02, 0.01), point(0.3, 0.4), point(-0.5, 0.2));
    let std = LocalFrame::Standard;
    let t1 = transport(&op, &PathSpec::open(a.clone(), vec![b.clone()]).with_clearance(0.005), &std, &std, PREC).unwrap();
    let t2 = transport(&op, &PathSpec::open(b.clone(), vec![c.clone()]).with_clearance(0.005), &std, &std, PREC).unwrap();
    let t = transport(&op, &PathSpec::open(a, vec![b, c]).with_clearance(0.005), &std, &std, PREC).unwrap();
    let composed = t1.compose(&t2);
    let tol = composed.log2_error.max(t.log2_error).exp2() * 4.0;
    assert!(max_difference(&composed.matrix, &t.matrix) < tol);
}

#[test]
fn reversed_path_inverts_transport() {
    let op = two_mum();
    let path = PathSpec::open(point(0.02, 0.01), vec![point(0.0, 0.5), point(-0.4, 0.1)]).with_clearance(0.005);
    let std = LocalFrame::Standard;
    let forward = transport(&op, &path, &std, &std, PREC).unwrap();
    let back = transport(&op, &path.reversed(), &std, &std, PREC).unwrap();
    assert!(forward.compose(&back).distance_to_identity() < 1e-30);
}

#[test]
fn homotopic_loops_agree() {
    let op = two_mum();
    let base = point(0.0, 0.006);
    let c = conifold();
    let coarse = PathSpec::spoke_loop(&base, (c, 0.0), 0.003, 12, true).with_clearance(0.001);
    let fine = PathSpec::spoke_loop(&base, (c, 0.0), 0.0025, 20, true).with_clearance(0.001);
    let frame = LocalFrame::mum_zero(&op, &base, 1.0, PREC + 32).unwrap();
    let loops: Vec<LoopSpec> = [coarse, fine]
        .into_iter()
        .map(|path| LoopSpec { location: SingularLocation::zero(), path })
        .collect();
    let m = monodromy_representation(&op, &base, &loops, &frame, PREC).unwrap();
    let tol = m[0].matrix.log2_error.max(m[1].matrix.log2_error).exp2() * 4.0;
    assert!(max_difference(&m[0].matrix.matrix, &m[1].matrix.matrix) < tol);
    // a conifold loop is a transvection
    let report = verify_unipotent_log(&m[0].matrix, 2);
    assert!(report.passes);
    assert!(!verify_unipotent_log(&m[0].matrix, 1).passes);
}

#[test]
fn quintic_frame_recognizes_euler_characteristic() {
    let report = integral_frame(&quintic(), &CrossMumOptions::default()).unwrap();
    assert_eq!(report.mirror_invariants, quintic_invariants());
    assert!(matches!(report.frame_source, FrameSource::Recognized { conjectural: true, .. }));
    assert_eq!(report.mum.normal_form, quintic_invariants().normal_form());
    // conifold monodromy is the transvection along the first basis vector
    let conifold = report.loops.iter().find(|l| l.location != "0" && l.location != "infinity").unwrap();
    let expected = [["1", "0", "0", "1"], ["0", "1", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]];
    assert_eq!(conifold.matrix, expected.map(|r| r.map(String::from)));
    assert!(report.log2_global_residual < -100.0);
}

#[test]
fn quintic_supplied_invariants_with_wrong_sign_are_rejected() {
    let mut options = CrossMumOptions::default();
    options.mirror_invariants = Some(mumhodge::lmhs::MirrorInvariants::new(5, 50, 200));
    options.max_precision = 256;
    let err = integral_frame(&quintic(), &options).unwrap_err();
    assert!(err.to_string().starts_with("integral frame hypothesis violated"));
}
