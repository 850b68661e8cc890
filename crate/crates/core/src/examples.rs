//! Operators used throughout the tests and bundled with the command line
//! tool.

use crate::lmhs::MirrorInvariants;
use crate::picard_fuchs::PFOperator;
use crate::rational::int;

fn from_rows(rows: &[[i64; 5]]) -> PFOperator {
    PFOperator::new(rows.iter().map(|r| r.map(int)).collect()).expect("nonzero Θ⁴ coefficient")
}

/// `Θ⁴`: MUM at `0` and `∞`, no other singular points.
pub fn theta4() -> PFOperator {
    from_rows(&[[0, 0, 0, 0, 1]])
}

/// Quintic family `Θ⁴ − 5⁵ z (Θ + 1/5)(Θ + 2/5)(Θ + 3/5)(Θ + 4/5)`.
pub fn quintic() -> PFOperator {
    from_rows(&[[0, 0, 0, 0, 1], [-120, -1250, -4375, -6250, -3125]])
}

/// `(deg, c₂·H, χ)` of the quintic threefold.
pub fn quintic_invariants() -> MirrorInvariants {
    MirrorInvariants::new(5, 50, -200)
}

/// Degree-5 operator with MUM points at `0` and `∞` and conifold points at
/// the roots of `z² − 123z + 1`; `z = ±1` are further singular points.
pub fn two_mum() -> PFOperator {
    from_rows(&[
        [0, 0, 0, 0, 1],
        [-9, -66, -187, -242, -124],
        [-124, -554, -787, -246, 123],
        [12, 210, 689, 738, 123],
        [-12, -78, -205, -254, -124],
        [1, 4, 6, 4, 1],
    ])
}
