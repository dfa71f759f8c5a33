//! Master equations in the eigenbasis of the cavity system.
//!
//! Density matrices here live on the lowest `n` eigenstates of a
//! Hamiltonian, so the coherent part is diagonal. Temperatures are in
//! units of the reference frequency (`k_B T / hbar omega_x`).

use std::io::Write;

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, Solve, SVD, UPLO};

use crate::error::{Error, Result};
use crate::fock::{self, EigenSystem, FockOperator, C64};
use crate::sec_rates::{BareRate, TransitionRates};

/// Largest Hilbert dimension accepted by `steady_state`.
pub const STEADY_STATE_CAP: usize = 30;

/// `dt * max_rate` must stay below this.
pub const RATE_GATE: f64 = 0.1;

/// `dt * (omega_max - omega_min)` must stay below this.
pub const PHASE_GATE: f64 = 1.0;

/// Trace drift tolerated over an evolution.
pub const TRACE_DRIFT_TOL: f64 = 1e-8;

/// Bose occupation `1/(exp(omega/T) - 1)`, zero at `T <= 0`.
pub fn occupation(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        0.0
    } else {
        1.0 / (omega / temperature).exp_m1()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    data: Array2<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-12), unit trace (1e-10) and positivity (-1e-10).
    pub fn new(data: Array2<C64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::Shape(format!("density matrix is {}x{}", data.nrows(), data.ncols())));
        }
        let n = data.nrows();
        let herm = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (data[[i, j]] - data[[j, i]].conj()).norm())
            .fold(0.0, f64::max);
        if herm > 1e-12 {
            return Err(Error::InvalidParameter(format!("density matrix is not Hermitian ({herm:.3e})")));
        }
        let tr = data.diag().sum();
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::InvalidParameter(format!("density matrix trace is {tr}")));
        }
        let rho = DensityMatrix { data };
        let min = rho.min_eigenvalue()?;
        if min < -1e-10 {
            return Err(Error::InvalidParameter(format!("density matrix has eigenvalue {min:.3e}")));
        }
        Ok(rho)
    }

    /// `|k><k|` on `n` levels.
    pub fn basis_state(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::Shape(format!("level {k} outside {n} levels")));
        }
        let mut data = Array2::zeros((n, n));
        data[[k, k]] = C64::new(1.0, 0.0);
        Ok(DensityMatrix { data })
    }

    /// `|psi><psi|` for a normalized vector.
    pub fn pure(psi: &Array1<C64>) -> Result<Self> {
        let data = Array2::from_shape_fn((psi.len(), psi.len()), |(i, j)| psi[i] * psi[j].conj());
        Self::new(data)
    }

    /// Gibbs state over the given level energies.
    pub fn thermal(frequencies: &[f64], temperature: f64) -> Result<Self> {
        let n = frequencies.len();
        let e0 = frequencies.iter().copied().fold(f64::INFINITY, f64::min);
        let weights: Vec<f64> = frequencies
            .iter()
            .map(|&e| {
                if temperature > 0.0 {
                    (-(e - e0) / temperature).exp()
                } else if e == e0 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let z: f64 = weights.iter().sum();
        let mut data = Array2::zeros((n, n));
        for (k, w) in weights.iter().enumerate() {
            data[[k, k]] = C64::new(w / z, 0.0);
        }
        Ok(DensityMatrix { data })
    }

    pub fn data(&self) -> &Array2<C64> {
        &self.data
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.data.diag().sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.data.diag().iter().map(|z| z.re).collect()
    }

    /// `tr(rho O)` for an operator in the same basis.
    pub fn expectation(&self, op: &Array2<C64>) -> C64 {
        let n = self.dim();
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| self.data[[i, j]] * op[[j, i]]).sum()
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let herm = (&self.data + &self.data.t().mapv(|z| z.conj())).mapv(|z| z * 0.5);
        let vals = herm.eigh(UPLO::Lower)?.0;
        Ok(vals.iter().copied().fold(f64::INFINITY, f64::min))
    }

    /// `(1/2) sum |eig(rho - sigma)|`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        let d = &self.data - &other.data;
        let herm = (&d + &d.t().mapv(|z| z.conj())).mapv(|z| z * 0.5);
        Ok(0.5 * herm.eigh(UPLO::Lower)?.0.iter().map(|x| x.abs()).sum::<f64>())
    }
}

/// A Markovian generator acting on eigenbasis density matrices.
pub trait Generator: Sync {
    fn dim(&self) -> usize;

    /// `d rho / dt`.
    fn apply(&self, rho: &Array2<C64>) -> Array2<C64>;

    /// Largest total rate, used for the step-size gate.
    fn max_rate(&self) -> f64;

    /// Level energies in the eigenbasis.
    fn frequencies(&self) -> &[f64];

    /// Matrix of the generator on row-major vectorized density matrices.
    fn superoperator(&self) -> Array2<C64> {
        let n = self.dim();
        let mut s = Array2::zeros((n * n, n * n));
        let mut e = Array2::zeros((n, n));
        for l in 0..n * n {
            e[[l / n, l % n]] = C64::new(1.0, 0.0);
            let out = self.apply(&e);
            for (k, v) in out.iter().enumerate() {
                s[[k, l]] = *v;
            }
            e[[l / n, l % n]] = C64::new(0.0, 0.0);
        }
        s
    }
}

fn coherent(freqs: &[f64], rho: &Array2<C64>) -> Array2<C64> {
    // -i[H, rho] with H diagonal
    Array2::from_shape_fn(rho.dim(), |(i, j)| C64::new(0.0, -(freqs[i] - freqs[j])) * rho[[i, j]])
}

/// Secular channel `|lower><upper|` with downward and upward rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    pub lower: usize,
    pub upper: usize,
    pub omega: f64,
    /// `kappa (n + 1)`
    pub down: f64,
    /// `kappa n`
    pub up: f64,
}

/// Post-trace (fully secular) generator:
/// `-i[H, rho] + sum down D[sigma] rho + up D[sigma^dag] rho`,
/// `D[L] rho = L rho L^dag - {L^dag L, rho}/2`, `sigma = |mu><nu|`.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladGenerator {
    pub frequencies: Vec<f64>,
    pub channels: Vec<Channel>,
    pub temperature: f64,
}

impl Generator for LindbladGenerator {
    fn dim(&self) -> usize {
        self.frequencies.len()
    }

    fn apply(&self, rho: &Array2<C64>) -> Array2<C64> {
        let n = self.dim();
        let mut out = coherent(&self.frequencies, rho);
        let mut dissipate = |from: usize, to: usize, rate: f64| {
            if rate == 0.0 {
                return;
            }
            // D[|to><from|]: population transfer plus decay of coherences with `from`
            out[[to, to]] += rho[[from, from]] * rate;
            for k in 0..n {
                out[[from, k]] -= rho[[from, k]] * (0.5 * rate);
                out[[k, from]] -= rho[[k, from]] * (0.5 * rate);
            }
        };
        for c in &self.channels {
            dissipate(c.upper, c.lower, c.down);
            dissipate(c.lower, c.upper, c.up);
        }
        out
    }

    fn max_rate(&self) -> f64 {
        let mut out = vec![0.0; self.dim()];
        for c in &self.channels {
            out[c.upper] += c.down;
            out[c.lower] += c.up;
        }
        out.into_iter().fold(0.0, f64::max)
    }

    fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }
}

impl LindbladGenerator {
    pub fn has_upward_channels(&self) -> bool {
        self.channels.iter().any(|c| c.up > 0.0)
    }
}

/// Secular generator on the levels of `rates`, which must come from `es`.
pub fn build_generator(es: &EigenSystem, rates: &TransitionRates, temperature: f64) -> Result<LindbladGenerator> {
    let n = rates.levels.len();
    if n > es.len() {
        return Err(Error::Shape(format!("{n} levels requested from an eigensystem of {}", es.len())));
    }
    let frequencies = es.frequencies[..n].to_vec();
    let mut channels = Vec::with_capacity(rates.transitions.len());
    for t in &rates.transitions {
        if !(t.kappa >= 0.0 && t.kappa.is_finite()) {
            return Err(Error::InvalidRate { lower: t.lower, upper: t.upper, rate: t.kappa });
        }
        if t.upper >= n || t.lower >= t.upper {
            return Err(Error::Ordering { lower: t.lower, upper: t.upper });
        }
        let gap = frequencies[t.upper] - frequencies[t.lower];
        if (gap - t.omega).abs() > 1e-9 * gap.abs().max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "transition {}->{} has frequency {} but the eigensystem gap is {gap}",
                t.upper, t.lower, t.omega
            )));
        }
        let nth = occupation(t.omega, temperature);
        channels.push(Channel {
            lower: t.lower,
            upper: t.upper,
            omega: t.omega,
            down: t.kappa * (nth + 1.0),
            up: t.kappa * nth,
        });
    }
    Ok(LindbladGenerator { frequencies, channels, temperature })
}

/// Pre-trace generator keeping the cross terms between transitions.
///
/// With `x` the lowering part of `X` and `A_n = sum kappa_bar n/2 x^{mu,nu}`,
/// `A_d = sum kappa_bar (n+1)/2 x^{mu,nu}`, the dissipator is
/// `x^dag rho A_n + A_n^dag rho x - x A_n^dag rho - rho A_n x^dag`
/// `+ x rho A_d^dag + A_d rho x^dag - x^dag A_d rho - rho A_d^dag x`.
#[derive(Debug, Clone, PartialEq)]
pub struct PretraceGenerator {
    pub frequencies: Vec<f64>,
    pub lowering: Array2<C64>,
    weighted_up: Array2<C64>,
    weighted_down: Array2<C64>,
    max_rate: f64,
}

impl Generator for PretraceGenerator {
    fn dim(&self) -> usize {
        self.frequencies.len()
    }

    fn apply(&self, rho: &Array2<C64>) -> Array2<C64> {
        let x = &self.lowering;
        let xd = dagger(x);
        let (an, ad) = (&self.weighted_up, &self.weighted_down);
        let (and, add) = (dagger(an), dagger(ad));
        let mut out = coherent(&self.frequencies, rho);
        out = out + xd.dot(rho).dot(an) + and.dot(rho).dot(x) - x.dot(&and).dot(rho) - rho.dot(an).dot(&xd);
        out = out + x.dot(rho).dot(&add) + ad.dot(rho).dot(&xd) - xd.dot(ad).dot(rho) - rho.dot(&add).dot(x);
        out
    }

    fn max_rate(&self) -> f64 {
        self.max_rate
    }

    fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }
}

fn dagger(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

/// `V^dag X V` restricted to the lowest `levels` eigenstates.
pub fn project(es: &EigenSystem, x: &FockOperator, levels: usize) -> Result<Array2<C64>> {
    if levels > es.len() {
        return Err(Error::Shape(format!("{levels} levels requested from an eigensystem of {}", es.len())));
    }
    let v = es.states.slice(ndarray::s![.., ..levels]).to_owned();
    let xv = fock::matmul(x.data(), &v);
    Ok(fock::matmul(&dagger(&v), &xv))
}

/// Pre-trace generator for coupling operator `x` with bare profile `bare`
/// on the lowest `levels` eigenstates.
pub fn build_generator_pretrace(
    es: &EigenSystem,
    x: &FockOperator,
    bare: &BareRate,
    temperature: f64,
    levels: usize,
) -> Result<PretraceGenerator> {
    let full = project(es, x, levels)?;
    let frequencies = es.frequencies[..levels].to_vec();
    let scale = frequencies.iter().map(|w| w.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut lowering = Array2::zeros((levels, levels));
    let mut up = Array2::zeros((levels, levels));
    let mut down = Array2::zeros((levels, levels));
    let mut per_level = vec![0.0; levels];
    for mu in 0..levels {
        for nu in (mu + 1)..levels {
            let omega = frequencies[nu] - frequencies[mu];
            if omega <= 1e-10 * scale {
                continue;
            }
            let elem = full[[mu, nu]];
            let k = bare.at(omega)?;
            if !(k >= 0.0 && k.is_finite()) {
                return Err(Error::InvalidRate { lower: mu, upper: nu, rate: k });
            }
            let nth = occupation(omega, temperature);
            lowering[[mu, nu]] = elem;
            up[[mu, nu]] = elem * (0.5 * k * nth);
            down[[mu, nu]] = elem * (0.5 * k * (nth + 1.0));
            let kappa = k * elem.norm_sqr();
            per_level[nu] += kappa * (nth + 1.0);
            per_level[mu] += kappa * nth;
        }
    }
    let max_rate = per_level.into_iter().fold(0.0, f64::max);
    Ok(PretraceGenerator { frequencies, lowering, weighted_up: up, weighted_down: down, max_rate })
}

/// Generator with fixed jump operators, `-i[H, rho] + sum_k D[L_k] rho`
/// with the rates folded into the `L_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpGenerator {
    pub frequencies: Vec<f64>,
    pub jumps: Vec<Array2<C64>>,
}

impl Generator for JumpGenerator {
    fn dim(&self) -> usize {
        self.frequencies.len()
    }

    fn apply(&self, rho: &Array2<C64>) -> Array2<C64> {
        let mut out = coherent(&self.frequencies, rho);
        for l in &self.jumps {
            let ld = dagger(l);
            let ldl = ld.dot(l);
            out = out + l.dot(rho).dot(&ld) - (ldl.dot(rho) + rho.dot(&ldl)).mapv(|z| z * 0.5);
        }
        out
    }

    fn max_rate(&self) -> f64 {
        self.jumps.iter().map(|l| dagger(l).dot(l).diag().iter().map(|z| z.re).fold(0.0, f64::max)).sum()
    }

    fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }
}

/// Number-conserving baseline: `kappa (n+1) D[a] + kappa n D[a^dag]` with
/// `a` projected onto the lowest `levels` eigenstates and `n` taken at
/// `omega_c`. Unlike the generators above it pumps the interacting ground
/// state even at zero temperature.
pub fn build_generator_standard(
    es: &EigenSystem,
    kappa: f64,
    omega_c: f64,
    temperature: f64,
    levels: usize,
) -> Result<JumpGenerator> {
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidRate { lower: 0, upper: 0, rate: kappa });
    }
    let a = project(es, &crate::sec_rates::photon_destroy(&es.dims)?, levels)?;
    let nth = occupation(omega_c, temperature);
    let mut jumps = vec![a.mapv(|z| z * (kappa * (nth + 1.0)).sqrt())];
    if nth > 0.0 {
        jumps.push(dagger(&a).mapv(|z| z * (kappa * nth).sqrt()));
    }
    Ok(JumpGenerator { frequencies: es.frequencies[..levels].to_vec(), jumps })
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Array2<C64>>,
}

impl Trajectory {
    pub fn last(&self) -> Option<&Array2<C64>> {
        self.states.last()
    }

    /// CSV with `t`, the populations `p0..`, then `<name>` for each observable.
    pub fn write_csv<W: Write>(&self, mut out: W, observables: &[(String, Array2<C64>)]) -> Result<()> {
        let n = self.states.first().map(|s| s.nrows()).unwrap_or(0);
        let mut header = vec!["t".to_string()];
        header.extend((0..n).map(|k| format!("p{k}")));
        header.extend(observables.iter().map(|(name, _)| name.clone()));
        writeln!(out, "{}", header.join(","))?;
        for (t, rho) in self.times.iter().zip(self.states.iter()) {
            let mut row = vec![fmt_num(*t)];
            row.extend(rho.diag().iter().map(|z| fmt_num(z.re)));
            for (_, op) in observables {
                let v: C64 =
                    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| rho[[i, j]] * op[[j, i]]).sum();
                row.push(fmt_num(v.re));
            }
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Twelve significant digits in scientific notation.
pub fn fmt_num(x: f64) -> String {
    let s = format!("{x:.11e}");
    if s == "-0.00000000000e0" {
        "0.00000000000e0".to_string()
    } else {
        s
    }
}

/// Fixed-step RK4 from `rho0` to `t_final`. The step is `dt` rounded so an
/// integer number of steps lands on `t_final`; every `stride`-th state is
/// kept along with the first and last.
pub fn evolve<G: Generator + ?Sized>(
    gen: &G,
    rho0: &DensityMatrix,
    t_final: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory> {
    if rho0.dim() != gen.dim() {
        return Err(Error::Shape(format!("state has {} levels, generator {}", rho0.dim(), gen.dim())));
    }
    if !(dt > 0.0 && t_final >= 0.0) {
        return Err(Error::InvalidParameter(format!("need dt > 0 and t_final >= 0, got {dt}, {t_final}")));
    }
    let steps = ((t_final / dt).round() as usize).max(1);
    let h = t_final / steps as f64;
    let span = gen.frequencies().iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
        - gen.frequencies().iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if h * gen.max_rate() >= RATE_GATE {
        return Err(Error::InvalidParameter(format!(
            "dt * max_rate = {:.3e} must stay below {RATE_GATE}",
            h * gen.max_rate()
        )));
    }
    if h * span >= PHASE_GATE {
        return Err(Error::InvalidParameter(format!(
            "dt * frequency span = {:.3e} must stay below {PHASE_GATE}",
            h * span
        )));
    }
    let stride = stride.max(1);
    let mut rho = rho0.data().clone();
    let mut traj = Trajectory { times: vec![0.0], states: vec![rho.clone()] };
    for step in 1..=steps {
        let k1 = gen.apply(&rho);
        let k2 = gen.apply(&(&rho + &k1.mapv(|z| z * (0.5 * h))));
        let k3 = gen.apply(&(&rho + &k2.mapv(|z| z * (0.5 * h))));
        let k4 = gen.apply(&(&rho + &k3.mapv(|z| z * h)));
        rho = &rho + &((k1 + k2.mapv(|z| z * 2.0) + k3.mapv(|z| z * 2.0) + k4).mapv(|z| z * (h / 6.0)));
        let drift = (rho.diag().sum() - C64::new(1.0, 0.0)).norm();
        if drift > TRACE_DRIFT_TOL || !drift.is_finite() {
            return Err(Error::Integration(format!("trace drifted by {drift:.3e} at t = {}", step as f64 * h)));
        }
        if step % stride == 0 || step == steps {
            traj.times.push(step as f64 * h);
            traj.states.push(rho.clone());
        }
    }
    Ok(traj)
}

/// Unique stationary state of `gen`, from the null space of its
/// superoperator with one row replaced by the trace condition.
pub fn steady_state<G: Generator + ?Sized>(gen: &G) -> Result<DensityMatrix> {
    steady_state_capped(gen, STEADY_STATE_CAP)
}

pub fn steady_state_capped<G: Generator + ?Sized>(gen: &G, cap: usize) -> Result<DensityMatrix> {
    let n = gen.dim();
    if n > cap {
        return Err(Error::InvalidParameter(format!("steady state limited to {cap} levels, got {n}")));
    }
    let s = gen.superoperator();
    let (_, sv, vt) = s.svd(false, true)?;
    let vt = vt.ok_or_else(|| Error::NoConvergence("SVD returned no right vectors".into()))?;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let null: Vec<usize> = (0..sv.len()).filter(|&k| sv[k] <= 1e-10 * smax.max(f64::MIN_POSITIVE)).collect();
    if null.len() > 1 {
        let basis = null.iter().map(|&k| Array2::from_shape_fn((n, n), |(i, j)| vt[[k, i * n + j]].conj())).collect();
        return Err(Error::NonUniqueSteadyState { basis });
    }
    let mut a = s;
    let mut rhs = Array1::zeros(n * n);
    for l in 0..n * n {
        a[[0, l]] = C64::new(0.0, 0.0);
    }
    for k in 0..n {
        a[[0, k * n + k]] = C64::new(1.0, 0.0);
    }
    rhs[0] = C64::new(1.0, 0.0);
    let v = a.solve_into(rhs)?;
    let rho = Array2::from_shape_fn((n, n), |(i, j)| v[i * n + j]);
    let herm = (&rho + &dagger(&rho)).mapv(|z| z * 0.5);
    let tr = herm.diag().sum();
    DensityMatrix::new(herm.mapv(|z| z / tr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::eig_hermitian;
    use crate::models::build_generic_rabi;
    use crate::sec_rates::{transition_table, LadderCombination, SecFlavor, Transition};
    use approx::assert_abs_diff_eq;

    fn bare_cavity(levels: usize, kappa: f64, temperature: f64) -> LindbladGenerator {
        let es = eig_hermitian(&fock::number(levels).unwrap()).unwrap();
        let rates = transition_table(&SecFlavor::xplus(BareRate::flat(kappa)), &es, levels).unwrap();
        build_generator(&es, &rates, temperature).unwrap()
    }

    #[test]
    fn standard_generator_excites_ground_state() {
        let p = crate::models::ModelParams::new(crate::models::Variant::CircuitA, 1.0, 0.3);
        let es = eig_hermitian(&crate::models::build(&p, [10, 10]).unwrap()).unwrap();
        let gen = build_generator_standard(&es, 0.01, 1.0, 0.0, 6).unwrap();
        let ss = steady_state(&gen).unwrap();
        assert!(ss.populations()[0] < 1.0 - 1e-4);
        let bare =
            build_generator_standard(&eig_hermitian(&fock::number(6).unwrap()).unwrap(), 0.01, 1.0, 0.0, 6).unwrap();
        assert_abs_diff_eq!(steady_state(&bare).unwrap().populations()[0], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn occupation_limits() {
        assert_eq!(occupation(1.0, 0.0), 0.0);
        let n = occupation(1.0, 0.5);
        assert_abs_diff_eq!(n / (n + 1.0), (-2.0f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn detailed_balance_ratio() {
        let g = bare_cavity(4, 0.01, 0.7);
        for c in g.channels.iter().filter(|c| c.down > 0.0) {
            assert_abs_diff_eq!(c.up / c.down, (-c.omega / 0.7).exp(), epsilon = 1e-14);
        }
        assert!(!bare_cavity(4, 0.01, 0.0).has_upward_channels());
    }

    #[test]
    fn negative_rate_rejected() {
        let es = eig_hermitian(&fock::number(3).unwrap()).unwrap();
        let rates = TransitionRates {
            levels: vec![0.0, 1.0],
            transitions: vec![Transition { lower: 0, upper: 1, omega: 1.0, kappa: -1.0 }],
        };
        assert!(matches!(build_generator(&es, &rates, 0.0), Err(Error::InvalidRate { .. })));
    }

    #[test]
    fn fock_decay_is_exponential() {
        let kappa = 0.02;
        let g = bare_cavity(3, kappa, 0.0);
        let rho0 = DensityMatrix::basis_state(3, 1).unwrap();
        let traj = evolve(&g, &rho0, 50.0, 0.01, 500).unwrap();
        let n_op = Array2::from_diag(&Array1::from(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(2.0, 0.0)]));
        for (t, rho) in traj.times.iter().zip(traj.states.iter()) {
            let n: C64 = (0..3).map(|k| rho[[k, k]] * n_op[[k, k]]).sum();
            assert_abs_diff_eq!(n.re, (-kappa * t).exp(), epsilon = 1e-9);
        }
    }

    #[test]
    fn step_gate() {
        let g = bare_cavity(3, 0.5, 0.0);
        let rho0 = DensityMatrix::basis_state(3, 1).unwrap();
        assert!(evolve(&g, &rho0, 1.0, 0.5, 1).is_err());
    }

    #[test]
    fn thermal_fixed_point() {
        let g = bare_cavity(12, 0.01, 0.3);
        let ss = steady_state(&g).unwrap();
        let expect = DensityMatrix::thermal(&g.frequencies, 0.3).unwrap();
        assert!(ss.trace_distance(&expect).unwrap() < 1e-10);
    }

    #[test]
    fn pretrace_equals_secular_for_single_transition() {
        let es = eig_hermitian(&fock::number(2).unwrap()).unwrap();
        let x = LadderCombination::xplus().operator(&[2]).unwrap();
        let bare = BareRate::flat(0.05);
        let pre = build_generator_pretrace(&es, &x, &bare, 0.4, 2).unwrap();
        let rates = transition_table(&SecFlavor::xplus(bare), &es, 2).unwrap();
        let post = build_generator(&es, &rates, 0.4).unwrap();
        let d = pre.superoperator() - post.superoperator();
        assert!(d.iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn pretrace_ground_state_at_zero_temperature() {
        let h = build_generic_rabi(1.0, 1.2, 0.15, 2, 8).unwrap();
        let es = eig_hermitian(&h).unwrap();
        let x = LadderCombination::xplus().operator(es.dims.as_slice()).unwrap();
        let pre = build_generator_pretrace(&es, &x, &BareRate::flat(1e-3), 0.0, 6).unwrap();
        let ss = steady_state(&pre).unwrap();
        assert!(ss.populations()[0] > 1.0 - 1e-9);
    }

    #[test]
    fn superoperator_preserves_trace() {
        let g = bare_cavity(4, 0.03, 0.2);
        let s = g.superoperator();
        let n = 4;
        for l in 0..n * n {
            let tr: C64 = (0..n).map(|k| s[[k * n + k, l]]).sum();
            assert!(tr.norm() < 1e-15);
        }
    }
}
