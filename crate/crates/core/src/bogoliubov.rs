//! Bogoliubov (Hopfield) diagonalization of the quadratic circuit models.
//!
//! A polariton is `p = w a + x b + y a^dag + z b^dag` with
//! `[p, H] = omega p`. Writing `v = (a, b, a^dag, b^dag)` and
//! `[v_i, H] = sum_j M_ij v_j`, the coefficient vector solves
//! `M^T c = omega c`.

use ndarray::{Array1, Array2};
use ndarray_linalg::Eig;
use serde::Serialize;

use crate::error::{Error, Result, Warning};
use crate::fock::C64;
use crate::models::{ModelParams, Variant};

/// Gap below which the two branches are reported as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Polariton {
    pub omega: f64,
    pub w: C64,
    pub x: C64,
    pub y: C64,
    pub z: C64,
}

impl Polariton {
    fn coeffs(&self) -> [C64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    fn from_coeffs(omega: f64, c: [C64; 4]) -> Self {
        Polariton { omega, w: c[0], x: c[1], y: c[2], z: c[3] }
    }

    /// `|w|^2 + |x|^2 - |y|^2 - |z|^2`
    pub fn symplectic_norm(&self) -> f64 {
        self.w.norm_sqr() + self.x.norm_sqr() - self.y.norm_sqr() - self.z.norm_sqr()
    }
}

/// `w_1 w_2^* + x_1 x_2^* - y_1 y_2^* - z_1 z_2^*`
pub fn symplectic_overlap(p1: &Polariton, p2: &Polariton) -> C64 {
    p1.w * p2.w.conj() + p1.x * p2.x.conj() - p1.y * p2.y.conj() - p1.z * p2.z.conj()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BogoliubovModes {
    pub params: ModelParams,
    pub lower: Polariton,
    pub upper: Polariton,
    /// Branch gap below `DEGENERACY_GAP`.
    pub near_degenerate: bool,
}

impl BogoliubovModes {
    pub fn modes(&self) -> [&Polariton; 2] {
        [&self.lower, &self.upper]
    }

    pub fn frequencies(&self) -> [f64; 2] {
        [self.lower.omega, self.upper.omega]
    }

    pub fn variant(&self) -> Variant {
        self.params.variant
    }
}

/// Linear form over `(a, b, a^dag, b^dag)`.
type Linear = [C64; 4];

const A: usize = 0;
const B: usize = 1;
const AD: usize = 2;
const BD: usize = 3;

fn lin(terms: &[(usize, f64)]) -> Linear {
    let mut l = [C64::new(0.0, 0.0); 4];
    for &(i, c) in terms {
        l[i] += c;
    }
    l
}

/// `[v_k, v_i]`: only `[a, a^dag] = 1` and `[b, b^dag] = 1` survive.
fn ccr(k: usize, i: usize) -> f64 {
    match (k, i) {
        (A, AD) | (B, BD) => 1.0,
        (AD, A) | (BD, B) => -1.0,
        _ => 0.0,
    }
}

/// Quadratic Hamiltonian as a sum of `coef * L1 * L2`.
struct Quadratic(Vec<(f64, Linear, Linear)>);

impl Quadratic {
    /// `M` with `[v_k, H] = sum_j M_kj v_j`, using
    /// `[v, o_i o_j] = [v, o_i] o_j + o_i [v, o_j]`.
    fn dynamical_matrix(&self) -> Array2<C64> {
        let mut m = Array2::zeros((4, 4));
        for (coef, l1, l2) in &self.0 {
            for i in 0..4 {
                for j in 0..4 {
                    let h = l1[i] * l2[j] * *coef;
                    if h == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for k in 0..4 {
                        m[[k, j]] += h * ccr(k, i);
                        m[[k, i]] += h * ccr(k, j);
                    }
                }
            }
        }
        m
    }
}

fn quadratic_form(p: &ModelParams) -> Result<Quadratic> {
    let (wz, wx) = (p.omega_z, p.omega_x);
    let n_a = (wz, lin(&[(AD, 1.0)]), lin(&[(A, 1.0)]));
    let n_b = (wx, lin(&[(BD, 1.0)]), lin(&[(B, 1.0)]));
    let xa = lin(&[(A, 1.0), (AD, 1.0)]);
    let xb = lin(&[(B, 1.0), (BD, 1.0)]);
    let pa = lin(&[(A, 1.0), (AD, -1.0)]);
    let pb = lin(&[(B, 1.0), (BD, -1.0)]);
    Ok(Quadratic(match p.variant {
        Variant::CircuitA => {
            let big = p.omega_a();
            vec![n_a, n_b, (big, xa, xb), (big * big / wz, xb, xb)]
        }
        Variant::CircuitB => {
            let big = p.omega_b();
            // [i(a - a^dag)]^2 = -(a - a^dag)^2
            vec![n_a, n_b, (-big, pa, pb), (-big * big / wx, pa, pa)]
        }
        // bosonic matter without a diamagnetic term; unstable once 4 Omega^2 > omega_z omega_x
        Variant::GenericRabi => vec![n_a, n_b, (p.g * wz, xa, xb)],
    }))
}

/// Positive-frequency, positive-norm polaritons of a quadratic model,
/// symplectically normalized with `w` real and non-negative.
///
/// `GenericRabi` parameters are read as bosonic matter coupled through
/// `g omega_z (a+a^dag)(b+b^dag)` with no diamagnetic term.
pub fn hopfield_diagonalize(p: &ModelParams) -> Result<BogoliubovModes> {
    let m = quadratic_form(p)?.dynamical_matrix();
    let (vals, vecs) = m.t().to_owned().eig()?;
    let scale = vals.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let mut branches: Vec<(f64, [C64; 4])> = Vec::new();
    for (k, ev) in vals.iter().enumerate() {
        if ev.im.abs() > 1e-9 * scale || !ev.re.is_finite() {
            return Err(Error::Unstable { re: ev.re, im: ev.im });
        }
        if ev.re <= 0.0 {
            continue;
        }
        let c = [vecs[[0, k]], vecs[[1, k]], vecs[[2, k]], vecs[[3, k]]];
        let size: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        let norm = Polariton::from_coeffs(ev.re, c).symplectic_norm();
        if norm <= 1e-12 * size {
            return Err(Error::NegativeNorm(norm / size));
        }
        let s = norm.sqrt();
        branches.push((ev.re, c.map(|z| z / s)));
    }
    if branches.len() != 2 {
        return Err(Error::Unstable { re: 0.0, im: 0.0 });
    }
    branches.sort_by(|a, b| a.0.total_cmp(&b.0));
    let lower = gauge(Polariton::from_coeffs(branches[0].0, branches[0].1));
    let mut upper = Polariton::from_coeffs(branches[1].0, branches[1].1);

    // symplectic Gram-Schmidt, only significant inside a degenerate pair
    let ov = symplectic_overlap(&upper, &lower);
    let c = upper.coeffs();
    let l = lower.coeffs();
    let mut cu = [C64::new(0.0, 0.0); 4];
    for i in 0..4 {
        cu[i] = c[i] - ov * l[i];
    }
    upper = Polariton::from_coeffs(upper.omega, cu);
    let n = upper.symplectic_norm();
    if n <= 0.0 {
        return Err(Error::NegativeNorm(n));
    }
    upper = gauge(Polariton::from_coeffs(upper.omega, cu.map(|z| z / n.sqrt())));

    let near_degenerate = upper.omega - lower.omega < DEGENERACY_GAP;
    if near_degenerate {
        Warning::NearDegenerate { gap: upper.omega - lower.omega }.emit();
    }
    Ok(BogoliubovModes { params: *p, lower, upper, near_degenerate })
}

fn gauge(p: Polariton) -> Polariton {
    let c = p.coeffs();
    let pivot = if c[0].norm() > 1e-12 {
        0
    } else {
        let max = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
        c.iter().position(|z| z.norm() >= max * (1.0 - 1e-10)).unwrap_or(0)
    };
    let phase = c[pivot].conj() / c[pivot].norm();
    let mut out = c.map(|z| z * phase);
    out[pivot] = C64::new(out[pivot].re.max(0.0), 0.0);
    Polariton::from_coeffs(p.omega, out)
}

/// Quadrature recombinations of one polariton.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quadratures {
    pub w_plus_y: C64,
    pub w_minus_y: C64,
    pub x_plus_z: C64,
    pub x_minus_z: C64,
}

/// `(w+y, w-y, x+z, x-z)` for the lower and upper polariton.
///
/// In terms of these, `<G|a+a^dag|j> = (w_j - y_j)^*` and
/// `<G|i(a-a^dag)|j> = i (w_j + y_j)^*`.
pub fn quadrature_weights(m: &BogoliubovModes) -> [Quadratures; 2] {
    m.modes().map(|p| Quadratures {
        w_plus_y: p.w + p.y,
        w_minus_y: p.w - p.y,
        x_plus_z: p.x + p.z,
        x_minus_z: p.x - p.z,
    })
}

/// The dynamical matrix `M` of `[v_i, H] = sum_j M_ij v_j`.
pub fn dynamical_matrix(p: &ModelParams) -> Result<Array2<C64>> {
    Ok(quadratic_form(p)?.dynamical_matrix())
}

/// `(w, x, y, z)` of a polariton as an array.
pub fn coefficients(p: &Polariton) -> Array1<C64> {
    Array1::from(p.coeffs().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Positive roots of `w^4 - (wz^2 + wx^2 + 4 g^2 wz wx) w^2 + wz^2 wx^2 = 0`.
    fn quartic(wz: f64, wx: f64, g: f64) -> (f64, f64) {
        let s = wz * wz + wx * wx + 4.0 * g * g * wz * wx;
        let d = (s * s - 4.0 * wz * wz * wx * wx).sqrt();
        (((s - d) / 2.0).sqrt(), ((s + d) / 2.0).sqrt())
    }

    #[test]
    fn matrix_matches_hand_derivation() {
        let (wz, wx, g) = (0.8, 1.0, 0.2);
        let (o, d) = (g * wz, g * g * wz);
        let expect =
            [[wz, o, 0.0, o], [o, wx + 2.0 * d, o, 2.0 * d], [0.0, -o, -wz, -o], [-o, -2.0 * d, -o, -wx - 2.0 * d]];
        let m = dynamical_matrix(&ModelParams::new(Variant::CircuitA, wz, g)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_abs_diff_eq!(m[[i, j]].re, expect[i][j], epsilon = 1e-15);
            }
        }
        let (o, d) = (g * wx, g * g * wx);
        let expect =
            [[wz + 2.0 * d, o, -2.0 * d, -o], [o, wx, -o, 0.0], [2.0 * d, o, -wz - 2.0 * d, -o], [o, 0.0, -o, -wx]];
        let m = dynamical_matrix(&ModelParams::new(Variant::CircuitB, wz, g)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_abs_diff_eq!(m[[i, j]].re, expect[i][j], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn decoupled_photon_branch() {
        let m = hopfield_diagonalize(&ModelParams::new(Variant::CircuitA, 0.7, 0.0)).unwrap();
        assert_abs_diff_eq!(m.lower.omega, 0.7, epsilon = 1e-14);
        assert_abs_diff_eq!(m.lower.w.re, 1.0, epsilon = 1e-14);
        for c in [m.lower.x, m.lower.y, m.lower.z] {
            assert!(c.norm() < 1e-14);
        }
        let q = quadrature_weights(&m);
        assert_abs_diff_eq!(q[0].w_plus_y.re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(q[0].w_minus_y.re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn quartic_dispersion() {
        for v in [Variant::CircuitA, Variant::CircuitB] {
            for &(wz, g) in &[(1.0, 0.01), (1.0, 0.1), (0.6, 0.3), (2.5, 0.2)] {
                let m = hopfield_diagonalize(&ModelParams::new(v, wz, g)).unwrap();
                let (lo, hi) = quartic(wz, 1.0, g);
                assert_abs_diff_eq!(m.lower.omega, lo, epsilon = 1e-12);
                assert_abs_diff_eq!(m.upper.omega, hi, epsilon = 1e-12);
            }
        }
        let m = hopfield_diagonalize(&ModelParams::new(Variant::CircuitA, 1.0, 0.01)).unwrap();
        assert!((m.lower.omega - 0.99).abs() < 1e-4 && (m.upper.omega - 1.01).abs() < 1e-4);
    }

    #[test]
    fn degenerate_point_is_flagged() {
        let m = hopfield_diagonalize(&ModelParams::new(Variant::CircuitA, 1.0, 0.0)).unwrap();
        assert!(m.near_degenerate);
        assert_abs_diff_eq!(symplectic_overlap(&m.lower, &m.upper).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.upper.symplectic_norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn hopfield_instability() {
        let stable = hopfield_diagonalize(&ModelParams::new(Variant::GenericRabi, 1.0, 0.4)).unwrap();
        assert!(stable.lower.omega > 0.0);
        let p = ModelParams::new(Variant::GenericRabi, 1.0, 0.6);
        assert!(matches!(hopfield_diagonalize(&p), Err(Error::Unstable { .. })));
    }
}
