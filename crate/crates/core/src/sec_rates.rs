//! System-environment coupling flavors and transition-resolved loss rates.
//!
//! A flavor pairs a system-side coupling operator `X` with a bare rate
//! profile `kappa_bar(omega)`. The loss rate of the downward transition
//! `nu -> mu` is `kappa_bar(omega_nu - omega_mu) |<mu|X|nu>|^2`. Quadratic
//! circuit models also get closed forms in terms of Bogoliubov
//! coefficients.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::bogoliubov::BogoliubovModes;
use crate::error::{Error, Result, Warning};
use crate::fock::{self, tensor, EigenSystem, FockOperator, C64};
use crate::models::{ModelParams, Variant};

/// Two transitions closer than this many linewidths trip the
/// independent-transition guard.
pub const INDEPENDENCE_FACTOR: f64 = 5.0;

/// Diagonal elements of `X` in the eigenbasis above this are reported.
pub const DEPHASING_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SecKind {
    /// `a + a^dag` with an arbitrary profile.
    Xplus,
    /// `i(a - a^dag)` with an arbitrary profile.
    Xminus,
    /// `a + a^dag` with the cubic law of the general recipe.
    GeneralFlux,
    CircuitAStraightforward,
    CircuitBStraightforward,
    FabryPerot,
    Tlr,
}

/// `X = cx_a (a+a^dag) + cp_a i(a-a^dag) + cx_b (b+b^dag) + cp_b i(b-b^dag)`
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LadderCombination {
    pub photon_x: f64,
    pub photon_p: f64,
    pub matter_x: f64,
    pub matter_p: f64,
}

impl LadderCombination {
    pub fn xplus() -> Self {
        LadderCombination { photon_x: 1.0, ..Default::default() }
    }

    pub fn xminus() -> Self {
        LadderCombination { photon_p: 1.0, ..Default::default() }
    }

    /// The operator on a one- or two-mode space with the photon first.
    pub fn operator(&self, dims: &[usize]) -> Result<FockOperator> {
        let quad = |dim: usize, cx: f64, cp: f64| -> Result<FockOperator> {
            let a = fock::destroy(dim)?;
            let x = a.add(&a.dagger())?.scale_real(cx);
            let p = a.sub(&a.dagger())?.scale(C64::new(0.0, cp));
            x.add(&p)
        };
        match dims {
            [na] => {
                if self.matter_x != 0.0 || self.matter_p != 0.0 {
                    return Err(Error::Shape("matter quadrature requested on a single-mode space".into()));
                }
                quad(*na, self.photon_x, self.photon_p)
            }
            [na, nb] => {
                let photon = tensor(&quad(*na, self.photon_x, self.photon_p)?, &FockOperator::identity(&[*nb]));
                let matter = tensor(&FockOperator::identity(&[*na]), &quad(*nb, self.matter_x, self.matter_p)?);
                photon.add(&matter)
            }
            _ => Err(Error::Shape(format!("coupling operators need one or two modes, got {dims:?}"))),
        }
    }
}

/// `kappa_bar(omega) = kappa_ref (omega/omega_ref)^exponent / (1 + (zeta_slope omega)^2)`
///
/// `zeta_slope omega` is the impedance parameter `zeta(omega)`; it is zero
/// in the good-cavity limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BareRate {
    pub kappa_ref: f64,
    pub omega_ref: f64,
    pub exponent: i32,
    pub zeta_slope: f64,
}

impl BareRate {
    pub fn flat(kappa: f64) -> Self {
        BareRate { kappa_ref: kappa, omega_ref: 1.0, exponent: 0, zeta_slope: 0.0 }
    }

    pub fn power_law(kappa_ref: f64, omega_ref: f64, exponent: i32) -> Self {
        BareRate { kappa_ref, omega_ref, exponent, zeta_slope: 0.0 }
    }

    pub fn at(&self, omega: f64) -> Result<f64> {
        if omega.is_nan() || omega <= 0.0 {
            return Err(Error::Domain(format!("bare rate needs a positive frequency, got {omega}")));
        }
        let zeta = self.zeta_slope * omega;
        Ok(self.kappa_ref * (omega / self.omega_ref).powi(self.exponent) / (1.0 + zeta * zeta))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecFlavor {
    pub kind: SecKind,
    pub coupling: LadderCombination,
    pub bare: BareRate,
}

impl SecFlavor {
    pub fn xplus(bare: BareRate) -> Self {
        SecFlavor { kind: SecKind::Xplus, coupling: LadderCombination::xplus(), bare }
    }

    pub fn xminus(bare: BareRate) -> Self {
        SecFlavor { kind: SecKind::Xminus, coupling: LadderCombination::xminus(), bare }
    }

    /// `kappa0 (omega/omega_z)^3 |<mu|a+a^dag|nu>|^2`
    pub fn general_flux(kappa0: f64, omega_z: f64) -> Self {
        SecFlavor {
            kind: SecKind::GeneralFlux,
            coupling: LadderCombination::xplus(),
            bare: BareRate::power_law(kappa0, omega_z, 3),
        }
    }

    /// Charge coupling of circuit A: `kappa' (omega/omega_z) / |1 - i zeta|^2`
    /// times `|<mu|i(a-a^dag)|nu>|^2`.
    pub fn circuit_a(kappa0: f64, omega_z: f64, zeta_slope: f64) -> Self {
        SecFlavor {
            kind: SecKind::CircuitAStraightforward,
            coupling: LadderCombination::xminus(),
            bare: BareRate { kappa_ref: kappa0, omega_ref: omega_z, exponent: 1, zeta_slope },
        }
    }

    /// Charge coupling of circuit B, where the line also sees the CPB charge:
    /// `X = i[(1 + 4 g^2 omega_x/omega_z)(a-a^dag) + 2 g (omega_x/omega_z)(b-b^dag)]`.
    pub fn circuit_b(p: &ModelParams, kappa0: f64, zeta_slope: f64) -> Self {
        let r = p.omega_x / p.omega_z;
        SecFlavor {
            kind: SecKind::CircuitBStraightforward,
            coupling: LadderCombination {
                photon_p: 1.0 + 4.0 * p.g * p.g * r,
                matter_p: 2.0 * p.g * r,
                ..Default::default()
            },
            bare: BareRate { kappa_ref: kappa0, omega_ref: p.omega_z, exponent: 1, zeta_slope },
        }
    }

    /// The straightforward flavor of a circuit variant with a good-cavity profile.
    pub fn straightforward(p: &ModelParams, kappa0: f64) -> Result<Self> {
        match p.variant {
            Variant::CircuitA => Ok(Self::circuit_a(kappa0, p.omega_z, 0.0)),
            Variant::CircuitB => Ok(Self::circuit_b(p, kappa0, 0.0)),
            Variant::GenericRabi => Err(Error::Variant("no straightforward flavor for the generic model".into())),
        }
    }

    /// Fabry-Perot mode `m`. `kappa_fp0` is the bare rate at `omega_m`;
    /// the profile falls as `omega^-2`. The flux form is
    /// `kappa_FP0(omega)(omega_m/omega)|<a+a^dag>|^2`, the charge form
    /// `kappa_FP0(omega)(omega_m/omega)^3|<a-a^dag>|^2`.
    pub fn fabry_perot(kappa_fp0: f64, omega_m: f64, charge_form: bool) -> Self {
        let (coupling, exponent) =
            if charge_form { (LadderCombination::xminus(), -5) } else { (LadderCombination::xplus(), -3) };
        SecFlavor { kind: SecKind::FabryPerot, coupling, bare: BareRate::power_law(kappa_fp0, omega_m, exponent) }
    }

    /// Transmission-line resonator mode: `kappa_m (omega/omega_m)^3 |<a+a^dag>|^2`.
    pub fn tlr(kappa_m: f64, omega_m: f64) -> Self {
        SecFlavor {
            kind: SecKind::Tlr,
            coupling: LadderCombination::xplus(),
            bare: BareRate::power_law(kappa_m, omega_m, 3),
        }
    }

    /// Frequency power of the bare profile.
    pub fn exponent(&self) -> i32 {
        self.bare.exponent
    }
}

/// `kappa_bar(omega)` of a flavor.
pub fn bare_rate_profile(f: &SecFlavor, omega: f64) -> Result<f64> {
    f.bare.at(omega)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Transition {
    pub lower: usize,
    pub upper: usize,
    pub omega: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionRates {
    /// Level energies indexed like `lower`/`upper`.
    pub levels: Vec<f64>,
    pub transitions: Vec<Transition>,
}

impl TransitionRates {
    pub fn get(&self, lower: usize, upper: usize) -> Option<&Transition> {
        self.transitions.iter().find(|t| t.lower == lower && t.upper == upper)
    }

    pub fn kappa(&self, lower: usize, upper: usize) -> Option<f64> {
        self.get(lower, upper).map(|t| t.kappa)
    }

    pub fn max_rate(&self) -> f64 {
        self.transitions.iter().map(|t| t.kappa).fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for t in &mut out.transitions {
            t.kappa *= factor;
        }
        out
    }

    /// Warnings for pairs of radiating transitions closer than
    /// `INDEPENDENCE_FACTOR` times the larger of their rates.
    pub fn check_independent(&self) -> Vec<Warning> {
        let floor = 1e-12 * self.max_rate();
        let live: Vec<&Transition> = self.transitions.iter().filter(|t| t.kappa > floor).collect();
        let mut out = Vec::new();
        for (i, t1) in live.iter().enumerate() {
            for t2 in &live[i + 1..] {
                let rate = t1.kappa.max(t2.kappa);
                let gap = (t1.omega - t2.omega).abs();
                if gap < INDEPENDENCE_FACTOR * rate {
                    out.push(
                        Warning::OverlappingTransitions {
                            first: (t1.lower, t1.upper),
                            second: (t2.lower, t2.upper),
                            gap,
                            rate,
                        }
                        .emit(),
                    );
                }
            }
        }
        out
    }
}

/// Lowering part of a quadrature in the eigenbasis of `es`.
#[derive(Debug, Clone)]
pub struct Lowering {
    /// `sum_{nu > mu} |mu><mu|X|nu><nu|` in the Fock basis.
    pub op: FockOperator,
    /// The same operator in the eigenbasis (nonzero only above the diagonal).
    pub eigenbasis: Array2<C64>,
    pub warning: Option<Warning>,
}

/// `x = sum_{mu < nu} |mu><mu|X|nu><nu|`. Diagonal elements of `X` are
/// dropped, with a warning when they exceed `DEPHASING_TOL`. Exactly
/// degenerate pairs count as diagonal.
pub fn lowering_part(x: &FockOperator, es: &EigenSystem) -> Result<Lowering> {
    let full = es.to_eigenbasis(x)?;
    let n = es.len();
    let scale = es.frequencies.iter().map(|w| w.abs()).fold(0.0, f64::max);
    let degenerate = |mu: usize, nu: usize| es.gap(mu, nu).abs() < 1e-10 * scale.max(f64::MIN_POSITIVE);
    let mut max_diag = 0.0f64;
    let mut low = Array2::zeros((n, n));
    for mu in 0..n {
        for nu in mu..n {
            if nu == mu || degenerate(mu, nu) {
                max_diag = max_diag.max(full[[mu, nu]].norm());
            } else {
                low[[mu, nu]] = full[[mu, nu]];
            }
        }
    }
    let warning = (max_diag > DEPHASING_TOL).then(|| Warning::Dephasing { max_diagonal: max_diag }.emit());
    Ok(Lowering { op: es.from_eigenbasis(&low)?, eigenbasis: low, warning })
}

/// `kappa_bar(omega_nu - omega_mu) |<mu|X|nu>|^2` for `nu > mu`.
pub fn transition_rate(f: &SecFlavor, es: &EigenSystem, mu: usize, nu: usize) -> Result<f64> {
    if nu <= mu {
        return Err(Error::Ordering { lower: mu, upper: nu });
    }
    let x = f.coupling.operator(&es.dims)?;
    rate_with(f, es, &x, mu, nu)
}

fn rate_with(f: &SecFlavor, es: &EigenSystem, x: &FockOperator, mu: usize, nu: usize) -> Result<f64> {
    let elem = es.element(mu, x, nu)?;
    Ok(f.bare.at(es.gap(mu, nu))? * elem.norm_sqr())
}

/// Rates of every downward transition among the lowest `levels` states.
/// Pairs without a positive gap are skipped.
pub fn transition_table(f: &SecFlavor, es: &EigenSystem, levels: usize) -> Result<TransitionRates> {
    let levels = levels.min(es.len());
    let x = f.coupling.operator(&es.dims)?;
    let scale = es.frequencies.iter().map(|w| w.abs()).fold(0.0, f64::max);
    let mut transitions = Vec::new();
    for nu in 1..levels {
        let xnu = x.apply(es.state(nu))?;
        for mu in 0..nu {
            let omega = es.gap(mu, nu);
            if omega <= 1e-10 * scale {
                continue;
            }
            let elem: C64 = es.state(mu).iter().zip(xnu.iter()).map(|(b, k)| b.conj() * k).sum();
            transitions.push(Transition { lower: mu, upper: nu, omega, kappa: f.bare.at(omega)? * elem.norm_sqr() });
        }
    }
    Ok(TransitionRates { levels: es.frequencies[..levels].to_vec(), transitions })
}

/// Number-conserving baseline: `kappa_bar(omega) |<mu|a|nu>|^2`.
pub fn standard_sec_rate(es: &EigenSystem, mu: usize, nu: usize, kappa_bare: &BareRate) -> Result<f64> {
    if nu <= mu {
        return Err(Error::Ordering { lower: mu, upper: nu });
    }
    let a = photon_destroy(&es.dims)?;
    Ok(kappa_bare.at(es.gap(mu, nu))? * es.element(mu, &a, nu)?.norm_sqr())
}

/// Photon annihilation operator on a one- or two-mode space.
pub fn photon_destroy(dims: &[usize]) -> Result<FockOperator> {
    match dims {
        [na] => fock::destroy(*na),
        [na, nb] => Ok(tensor(&fock::destroy(*na)?, &FockOperator::identity(&[*nb]))),
        _ => Err(Error::Shape(format!("expected one or two modes, got {dims:?}"))),
    }
}

fn polariton_table(m: &BogoliubovModes, kappas: [f64; 2]) -> TransitionRates {
    let [wl, wu] = m.frequencies();
    TransitionRates {
        levels: vec![0.0, wl, wu],
        transitions: vec![
            Transition { lower: 0, upper: 1, omega: wl, kappa: kappas[0] },
            Transition { lower: 0, upper: 2, omega: wu, kappa: kappas[1] },
        ],
    }
}

fn require(m: &BogoliubovModes, v: Variant) -> Result<()> {
    if m.variant() != v {
        return Err(Error::Variant(format!("formula needs {v:?} coefficients, got {:?}", m.variant())));
    }
    Ok(())
}

/// Circuit A: `kappa0 (omega_j/omega_z) |w_j + y_j|^2`.
pub fn rates_circuit_a(m: &BogoliubovModes, kappa0: f64) -> Result<TransitionRates> {
    require(m, Variant::CircuitA)?;
    let wz = m.params.omega_z;
    Ok(polariton_table(m, m.modes().map(|p| kappa0 * (p.omega / wz) * (p.w + p.y).norm_sqr())))
}

/// Circuit B from circuit-B coefficients,
/// `kappa0 (omega/omega_z) |(1 + 4 g^2 omega_x/omega_z)(w+y) + 2 g (omega_x/omega_z)(x+z)|^2`,
/// or, with `use_transformed`, from circuit-A coefficients,
/// `kappa0 (omega/omega_z) |(w+y) + 2 g (omega_x/omega_z)(x+z)|^2`.
pub fn rates_circuit_b(m: &BogoliubovModes, kappa0: f64, use_transformed: bool) -> Result<TransitionRates> {
    let p = &m.params;
    let r = p.omega_x / p.omega_z;
    let k = if use_transformed {
        require(m, Variant::CircuitA)?;
        m.modes().map(|q| kappa0 * (q.omega / p.omega_z) * ((q.w + q.y) + (q.x + q.z) * (2.0 * p.g * r)).norm_sqr())
    } else {
        require(m, Variant::CircuitB)?;
        let c = 1.0 + 4.0 * p.g * p.g * r;
        m.modes().map(|q| kappa0 * (q.omega / p.omega_z) * ((q.w + q.y) * c + (q.x + q.z) * (2.0 * p.g * r)).norm_sqr())
    };
    Ok(polariton_table(m, k))
}

/// General recipe `kappa0 (omega/omega_z)^3 |w - y|^2` for the circuit
/// named by `variant`. Circuit B from circuit-A coefficients uses
/// `|(w - y) + 2 g (x - z)|^2`.
pub fn rates_general(m: &BogoliubovModes, kappa0: f64, variant: Variant) -> Result<TransitionRates> {
    let p = &m.params;
    let cube = |w: f64| kappa0 * (w / p.omega_z).powi(3);
    let k = match (m.variant(), variant) {
        (a, b) if a == b => m.modes().map(|q| cube(q.omega) * (q.w - q.y).norm_sqr()),
        (Variant::CircuitA, Variant::CircuitB) => {
            m.modes().map(|q| cube(q.omega) * ((q.w - q.y) + (q.x - q.z) * (2.0 * p.g)).norm_sqr())
        }
        (have, want) => {
            return Err(Error::Variant(format!("cannot express circuit {want:?} rates with {have:?} coefficients")))
        }
    };
    Ok(polariton_table(m, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bogoliubov::hopfield_diagonalize;
    use crate::fock::eig_hermitian;
    use crate::models::{build, build_circuit_a};
    use approx::assert_relative_eq;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn bare_oscillator_lowering_is_a() {
        let es = eig_hermitian(&fock::number(6).unwrap()).unwrap();
        let x = LadderCombination::xplus().operator(&[6]).unwrap();
        let low = lowering_part(&x, &es).unwrap();
        assert!(low.op.sub(&fock::destroy(6).unwrap()).unwrap().norm() < 1e-12);
        assert!(low.warning.is_none());
    }

    #[test]
    fn lowering_differs_from_a_at_strong_coupling() {
        let p = ModelParams::new(Variant::CircuitA, 1.0, 0.1);
        let dims = [10, 10];
        let es = eig_hermitian(&build_circuit_a(&p, dims).unwrap()).unwrap();
        let x = LadderCombination::xplus().operator(&dims).unwrap();
        let low = lowering_part(&x, &es).unwrap();
        assert!(low.op.sub(&photon_destroy(&dims).unwrap()).unwrap().norm() > 1e-2);
        let back = low.op.add(&low.op.dagger()).unwrap();
        assert!(back.sub(&x).unwrap().norm() < 1e-10);
    }

    #[test]
    fn dephasing_warning() {
        let es = eig_hermitian(&fock::number(4).unwrap()).unwrap();
        let n = fock::number(4).unwrap();
        let low = lowering_part(&n, &es).unwrap();
        assert!(matches!(low.warning, Some(Warning::Dephasing { .. })));
    }

    #[test]
    fn bare_cavity_rates() {
        let es = eig_hermitian(&fock::number(5).unwrap().scale_real(0.8)).unwrap();
        for f in [
            SecFlavor::general_flux(0.01, 0.8),
            SecFlavor::circuit_a(0.01, 0.8, 0.0),
            SecFlavor::xplus(BareRate::flat(0.01)),
        ] {
            assert_relative_eq!(transition_rate(&f, &es, 0, 1).unwrap(), 0.01, max_relative = 1e-12);
        }
        assert_relative_eq!(standard_sec_rate(&es, 0, 1, &BareRate::flat(0.01)).unwrap(), 0.01, max_relative = 1e-12);
        let f = SecFlavor::general_flux(0.01, 0.8);
        assert!(matches!(transition_rate(&f, &es, 1, 1), Err(Error::Ordering { .. })));
    }

    #[test]
    fn profile_shape() {
        let b = BareRate { kappa_ref: 2.0, omega_ref: 1.0, exponent: 1, zeta_slope: 0.0 };
        assert_relative_eq!(b.at(1.0).unwrap(), 2.0);
        let z = BareRate { zeta_slope: 1.0, ..b };
        assert_relative_eq!(z.at(1.0).unwrap(), 1.0);
        assert!(matches!(b.at(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn closed_forms_agree() {
        for &(wz, g) in &[(1.0, 0.01), (1.0, 0.1), (0.7, 0.2), (1.3, 0.05)] {
            let ma = hopfield_diagonalize(&ModelParams::new(Variant::CircuitA, wz, g)).unwrap();
            let mb = hopfield_diagonalize(&ModelParams::new(Variant::CircuitB, wz, g)).unwrap();
            let a56 = rates_circuit_a(&ma, 1.0).unwrap();
            let ga = rates_general(&ma, 1.0, Variant::CircuitA).unwrap();
            let b58 = rates_circuit_b(&mb, 1.0, false).unwrap();
            let b61 = rates_circuit_b(&ma, 1.0, true).unwrap();
            let gb = rates_general(&mb, 1.0, Variant::CircuitB).unwrap();
            let gbt = rates_general(&ma, 1.0, Variant::CircuitB).unwrap();
            for j in 0..2 {
                let (a, b) = (a56.transitions[j].kappa, b58.transitions[j].kappa);
                assert!(close(ga.transitions[j].kappa, a, 1e-8));
                for other in [&b61, &gb, &gbt] {
                    assert!(close(other.transitions[j].kappa, b, 1e-8));
                }
            }
        }
    }

    #[test]
    fn variant_mismatch() {
        let mb = hopfield_diagonalize(&ModelParams::new(Variant::CircuitB, 1.0, 0.1)).unwrap();
        assert!(matches!(rates_circuit_a(&mb, 1.0), Err(Error::Variant(_))));
        assert!(matches!(rates_circuit_b(&mb, 1.0, true), Err(Error::Variant(_))));
        assert!(matches!(rates_general(&mb, 1.0, Variant::CircuitA), Err(Error::Variant(_))));
    }

    #[test]
    fn fock_path_matches_closed_form() {
        let dims = [16, 16];
        for v in [Variant::CircuitA, Variant::CircuitB] {
            let p = ModelParams::new(v, 1.0, 0.1);
            let es = eig_hermitian(&build(&p, dims).unwrap()).unwrap();
            let m = hopfield_diagonalize(&p).unwrap();
            let closed = match v {
                Variant::CircuitA => rates_circuit_a(&m, 1.0).unwrap(),
                _ => rates_circuit_b(&m, 1.0, false).unwrap(),
            };
            let sf = SecFlavor::straightforward(&p, 1.0).unwrap();
            let gen = SecFlavor::general_flux(1.0, 1.0);
            for (j, level) in [1usize, 2].iter().enumerate() {
                let k = closed.transitions[j].kappa;
                assert!(close(transition_rate(&sf, &es, 0, *level).unwrap(), k, 1e-6));
                assert!(close(transition_rate(&gen, &es, 0, *level).unwrap(), k, 1e-6));
            }
        }
    }

    #[test]
    fn parity_forbidden_and_guard() {
        let p = ModelParams::new(Variant::CircuitA, 1.0, 0.1);
        let es = eig_hermitian(&build(&p, [10, 10]).unwrap()).unwrap();
        let table = transition_table(&SecFlavor::general_flux(1e-3, 1.0), &es, 6).unwrap();
        // ground (even) to the even two-polariton states
        for nu in 3..6 {
            assert!(table.kappa(0, nu).unwrap() < 1e-12);
        }
        assert!(table.transitions.iter().all(|t| t.kappa >= 0.0 && t.upper > t.lower));
        let wide = table.scaled(1e3);
        assert!(!wide.check_independent().is_empty());
    }
}
