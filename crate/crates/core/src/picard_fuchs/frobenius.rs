//! Frobenius solutions at a MUM point via the deformed exponent.
//!
//! With `y(z, ε) = z^ε Σₙ aₙ(ε) zⁿ`, `a₀ = 1` and
//! `Q₀(n+ε) aₙ = −Σ_{j≥1} Qⱼ(n−j+ε) aₙ₋ⱼ` in `T[ε]/ε⁴`, one has
//! `L y = Q₀(ε) z^ε`, which vanishes modulo `ε⁴` at a MUM point. Writing
//! `Σₙ aₙ(ε) zⁿ = A₀ + A₁ε + A₂ε² + A₃ε³` gives
//! `ψ₃ = A₀, ψ₂ = A₁, ψ₁ = 2A₂, ψ₀ = 6A₃` and
//!
//! ```text
//! ω₃ = ψ₃
//! (2πi)  ω₂ = ψ₃ L + ψ₂
//! (2πi)² ω₁ = ψ₃ L² + 2ψ₂ L + ψ₁
//! (2πi)³ ω₀ = ψ₃ L³ + 3ψ₂ L² + 3ψ₁ L + ψ₀          (L = log z)
//! ```

use crate::matrix::Mat4;
use crate::rational::{int, Rational};
use crate::scalar::{ComplexField, Field, Scalar};
use crate::series::TruncatedSeries;

use super::{indicial_polynomial, PFOperator, PfError, SingularLocation};

type Eps<T> = [T; 4];

fn eps_mul<T: Scalar>(a: &Eps<T>, b: &Eps<T>) -> Eps<T> {
    std::array::from_fn(|k| {
        let mut acc = a[0].clone() * b[k].clone();
        for i in 1..=k {
            acc = acc + a[i].clone() * b[k - i].clone();
        }
        acc
    })
}

fn eps_div<T: Field>(a: &Eps<T>, b: &Eps<T>) -> Eps<T> {
    let inv0 = b[0].recip();
    let mut out: Eps<T> = std::array::from_fn(|_| a[0].zero_like());
    for k in 0..4 {
        let mut acc = a[k].clone();
        for i in 1..=k {
            acc = acc - b[i].clone() * out[k - i].clone();
        }
        out[k] = acc * inv0.clone();
    }
    out
}

/// `p(x + ε)` modulo `ε⁴`.
fn eval_shifted<T: Scalar>(coeffs: &[T], x: &T) -> Eps<T> {
    let zero = x.zero_like();
    let arg: Eps<T> = [x.clone(), x.one_like(), zero.clone(), zero.clone()];
    let mut acc: Eps<T> = std::array::from_fn(|_| zero.clone());
    for c in coeffs.iter().rev() {
        acc = eps_mul(&acc, &arg);
        acc[0] = acc[0].clone() + c.clone();
    }
    acc
}

/// The four normalized series `ψ₃, ψ₂, ψ₁, ψ₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrobeniusBasis<T> {
    psi: [TruncatedSeries<T>; 4],
}

impl<T: Field> FrobeniusBasis<T> {
    /// `ψ_{3−k}` for `k = 0..4`, i.e. index 0 is `ψ₃`.
    pub fn psi_all(&self) -> &[TruncatedSeries<T>; 4] {
        &self.psi
    }

    pub fn psi3(&self) -> &TruncatedSeries<T> {
        &self.psi[0]
    }

    pub fn psi2(&self) -> &TruncatedSeries<T> {
        &self.psi[1]
    }

    pub fn psi1(&self) -> &TruncatedSeries<T> {
        &self.psi[2]
    }

    pub fn psi0(&self) -> &TruncatedSeries<T> {
        &self.psi[3]
    }

    pub fn order(&self) -> usize {
        self.psi[0].order()
    }

    /// `yₖ = (2πi)^{3−k} ωₖ` graded by powers of `log z`; index `k` runs
    /// over `3, 2, 1, 0` as `0..4`.
    pub fn log_graded(&self, idx: usize) -> Vec<TruncatedSeries<T>> {
        let [p3, p2, p1, p0] = &self.psi;
        let c = |s: &TruncatedSeries<T>, n: i64| s.scale(&s.coeff(0).from_i64_like(n));
        match idx {
            0 => vec![p3.clone()],
            1 => vec![p2.clone(), p3.clone()],
            2 => vec![p1.clone(), c(p2, 2), p3.clone()],
            3 => vec![p0.clone(), c(p1, 3), c(p2, 3), p3.clone()],
            _ => panic!("Frobenius index {idx} out of range"),
        }
    }

    /// Taylor jets of `ω₃, ω₂, ω₁, ω₀` at `z₀ ≠ 0` to order `jet_order`
    /// in `t = z − z₀`, with `log z₀` given to select the branch.
    pub fn omega_jets(&self, z0: &T, log_z0: &T, jet_order: usize) -> [TruncatedSeries<T>; 4]
    where
        T: ComplexField,
    {
        let t = TruncatedSeries::variable(z0, jet_order);
        let z = &TruncatedSeries::constant(z0.clone(), jet_order) + &t;
        let eval = |s: &TruncatedSeries<T>| {
            let mut acc = TruncatedSeries::zero(z0, jet_order);
            for c in s.coeffs().iter().rev() {
                acc = &acc * &z;
                let c0 = acc.coeff(0).clone() + c.clone();
                acc.set_coeff(0, c0);
            }
            acc
        };
        let psi: Vec<TruncatedSeries<T>> = self.psi.iter().map(eval).collect();
        let ratio = &TruncatedSeries::constant(z0.one_like(), jet_order) + &t.scale(&z0.recip());
        let mut log = ratio.log().expect("unit constant term");
        log.set_coeff(0, log.coeff(0).clone() + log_z0.clone());
        let l2 = &log * &log;
        let l3 = &l2 * &log;
        let n = |k: i64| z0.from_i64_like(k);
        let tpi = z0.two_pi_i_like();
        let inv1 = tpi.recip();
        let inv2 = inv1.clone() * inv1.clone();
        let inv3 = inv2.clone() * inv1.clone();
        let (p3, p2, p1, p0) = (&psi[0], &psi[1], &psi[2], &psi[3]);
        let w3 = p3.clone();
        let w2 = (&(p3 * &log) + p2).scale(&inv1);
        let w1 = (&(&(p3 * &l2) + &(p2 * &log).scale(&n(2))) + p1).scale(&inv2);
        let w0 = (&(&(&(p3 * &l3) + &(p2 * &l2).scale(&n(3))) + &(p1 * &log).scale(&n(3))) + p0).scale(&inv3);
        [w3, w2, w1, w0]
    }
}

/// Normalized Frobenius basis at `z = 0` to truncation order `order`,
/// with scalars built from `template`.
pub fn frobenius_basis<T: Field>(op: &PFOperator, order: usize, template: &T) -> Result<FrobeniusBasis<T>, PfError> {
    let data = indicial_polynomial(op, &SingularLocation::zero())?;
    if data.mum_exponent != Some(int(0)) {
        return Err(PfError::NotMum(format!("indicial polynomial at 0 is {}", data.polynomial)));
    }
    let q: Vec<Vec<T>> = (0..=op.z_degree())
        .map(|j| op.q(j).coeffs().iter().map(|c| template.from_rational_like(c)).collect())
        .collect();
    let zero = template.zero_like();
    let one = template.one_like();
    let mut a: Vec<Eps<T>> = Vec::with_capacity(order + 1);
    a.push([one, zero.clone(), zero.clone(), zero.clone()]);
    for n in 1..=order {
        let mut rhs: Eps<T> = std::array::from_fn(|_| zero.clone());
        for j in 1..=op.z_degree().min(n) {
            if q[j].is_empty() {
                continue;
            }
            let x = template.from_i64_like((n - j) as i64);
            let term = eps_mul(&eval_shifted(&q[j], &x), &a[n - j]);
            rhs = std::array::from_fn(|k| rhs[k].clone() + term[k].clone());
        }
        let lead = eval_shifted(&q[0], &template.from_i64_like(n as i64));
        let neg: Eps<T> = std::array::from_fn(|k| -rhs[k].clone());
        a.push(eps_div(&neg, &lead));
    }
    let factors = [1, 1, 2, 6];
    let psi = std::array::from_fn(|k| {
        let f = template.from_i64_like(factors[k]);
        TruncatedSeries::new(a.iter().map(|e| e[k].clone() * f.clone()).collect())
    });
    Ok(FrobeniusBasis { psi })
}

/// Applies `op` to `Σ_l (log z)^l f_l`, returning the graded parts of the
/// result. Valid through the common truncation order.
pub fn apply_log_graded<T: Field>(op: &PFOperator, parts: &[TruncatedSeries<T>]) -> Vec<TruncatedSeries<T>> {
    let theta = |fs: &[TruncatedSeries<T>]| -> Vec<TruncatedSeries<T>> {
        (0..fs.len())
            .map(|l| {
                let f = &fs[l];
                let mut d = TruncatedSeries::new(
                    f.coeffs().iter().enumerate().map(|(n, c)| c.clone() * c.from_i64_like(n as i64)).collect(),
                );
                if l + 1 < fs.len() {
                    d = &d + &fs[l + 1].scale(&f.coeff(0).from_i64_like((l + 1) as i64));
                }
                d
            })
            .collect()
    };
    let template = parts[0].coeff(0);
    let order = parts.iter().map(TruncatedSeries::order).min().unwrap_or(0);
    let mut powers = vec![parts.to_vec()];
    for _ in 0..4 {
        let next = theta(powers.last().expect("nonempty"));
        powers.push(next);
    }
    let mut out = vec![TruncatedSeries::zero(template, order); parts.len()];
    for (j, t) in op.terms().iter().enumerate() {
        for (i, c) in t.iter().enumerate() {
            if num_traits::Zero::is_zero(c) {
                continue;
            }
            let c = template.from_rational_like(c);
            for l in 0..parts.len() {
                out[l] = &out[l] + &powers[i][l].scale(&c).shift_up(j);
            }
        }
    }
    out
}

/// `z ↦ e^{2πi} z` on `(ω₃, ω₂, ω₁, ω₀)`: the lower Pascal matrix.
pub fn local_monodromy_mum() -> Mat4<Rational> {
    Mat4::from_fn(|i, j| if j <= i { int(binomial(i, j)) } else { int(0) })
}

/// `log` of [`local_monodromy_mum`]: subdiagonal `(1, 2, 3)`.
pub fn local_monodromy_mum_log() -> Mat4<Rational> {
    Mat4::from_fn(|i, j| if i == j + 1 { int(i as i64) } else { int(0) })
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// Canonical coordinate and its inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct MirrorMap<T> {
    pub q_of_z: TruncatedSeries<T>,
    pub z_of_q: TruncatedSeries<T>,
}

/// `q = z · exp(ψ₂ / (a ψ₃))` and its reversion `z(q)`.
pub fn mirror_map<T: Field>(fb: &FrobeniusBasis<T>, a: &Rational) -> Result<MirrorMap<T>, PfError> {
    let template = fb.psi3().coeff(0);
    let ratio = fb.psi2().div(fb.psi3())?.scale(&template.from_rational_like(&a.recip()));
    let q_of_z = ratio.exp()?.shift_up(1);
    let z_of_q = q_of_z.reversion()?;
    Ok(MirrorMap { q_of_z, z_of_q })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pf_53() -> PFOperator {
        let rows: [[i64; 5]; 6] = [
            [0, 0, 0, 0, 1],
            [-9, -66, -187, -242, -124],
            [-124, -554, -787, -246, 123],
            [12, 210, 689, 738, 123],
            [-12, -78, -205, -254, -124],
            [1, 4, 6, 4, 1],
        ];
        PFOperator::new(rows.iter().map(|r| r.map(int)).collect()).unwrap()
    }

    #[test]
    fn first_coefficient_is_nine() {
        let fb = frobenius_basis(&pf_53(), 6, &int(0)).unwrap();
        assert_eq!(fb.psi3().coeff(0), &int(1));
        assert_eq!(fb.psi3().coeff(1), &int(9));
        for k in 1..4 {
            assert_eq!(fb.psi_all()[k].coeff(0), &int(0));
        }
    }

    #[test]
    fn residuals_vanish() {
        let op = pf_53();
        let fb = frobenius_basis(&op, 12, &int(0)).unwrap();
        for idx in 0..4 {
            let res = apply_log_graded(&op, &fb.log_graded(idx));
            assert!(res.iter().all(TruncatedSeries::is_exact_zero), "solution {idx}");
        }
    }

    #[test]
    fn theta4_has_pure_log_solutions() {
        let op = PFOperator::new(vec![[int(0), int(0), int(0), int(0), int(1)]]).unwrap();
        let fb = frobenius_basis(&op, 5, &int(0)).unwrap();
        assert_eq!(fb.psi3(), &TruncatedSeries::constant(int(1), 5));
        for k in 1..4 {
            assert!(fb.psi_all()[k].is_exact_zero());
        }
    }

    #[test]
    fn pascal_matrix() {
        let t = local_monodromy_mum();
        assert_eq!(t.row(3), [int(1), int(3), int(3), int(1)]);
        assert_eq!(t.log_unipotent(), local_monodromy_mum_log());
    }

    #[test]
    fn eps_division_inverts_multiplication() {
        let a = [int(2), int(3), int(-1), int(5)];
        let b = [int(7), int(1), int(2), int(-4)];
        assert_eq!(eps_div(&eps_mul(&a, &b), &b), a);
    }
}
