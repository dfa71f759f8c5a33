//! Reflection of a probe field off the cavity system.
//!
//! Each radiating transition contributes an all-pass factor
//! `r = (delta - i kappa/2) / (delta + i kappa/2)`, `delta = omega - omega_t`,
//! with `kappa` evaluated on resonance. A spectrum is the product of the
//! factors of the transitions inside the probe window, which is only
//! meaningful when the transitions are well separated.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result, Warning};
use crate::fock::C64;
use crate::lindblad::fmt_num;
use crate::sec_rates::{Transition, TransitionRates};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumPoint {
    pub omega: f64,
    pub amplitude: C64,
    /// Unwrapped `arg r` along the grid.
    pub phase: f64,
    /// `d phase / d omega`.
    pub group_delay: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub points: Vec<SpectrumPoint>,
    /// Transitions that contributed a factor.
    pub transitions: Vec<Transition>,
    /// Set when two contributing transitions overlap.
    pub overlapping: bool,
    #[serde(skip)]
    pub warnings: Vec<Warning>,
}

pub fn reflection_amplitude(omega: f64, omega_t: f64, kappa: f64) -> C64 {
    let delta = omega - omega_t;
    C64::new(delta, -0.5 * kappa) / C64::new(delta, 0.5 * kappa)
}

/// Phase of a single factor, `-2 atan2(kappa/2, delta)`, in `(-2 pi, 0]`.
pub fn reflection_phase(omega: f64, omega_t: f64, kappa: f64) -> f64 {
    -2.0 * (0.5 * kappa).atan2(omega - omega_t)
}

/// `kappa / (delta^2 + kappa^2/4)`.
pub fn reflection_group_delay(omega: f64, omega_t: f64, kappa: f64) -> f64 {
    let delta = omega - omega_t;
    kappa / (delta * delta + 0.25 * kappa * kappa)
}

/// Removes `2 pi` jumps between neighbours.
pub fn unwrap_phase(phases: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(phases.len());
    let mut offset = 0.0_f64;
    for (k, &p) in phases.iter().enumerate() {
        if k > 0 {
            let d = p + offset - out[k - 1];
            if d > PI {
                offset -= 2.0 * PI * ((d + PI) / (2.0 * PI)).floor();
            } else if d < -PI {
                offset += 2.0 * PI * ((-d + PI) / (2.0 * PI)).floor();
            }
        }
        out.push(p + offset);
    }
    out
}

/// Reflection spectrum on `omega_grid` from the transitions of `rates`
/// whose frequency lies within the grid span.
pub fn spectrum(rates: &TransitionRates, omega_grid: &[f64]) -> Result<Spectrum> {
    if omega_grid.is_empty() {
        return Err(Error::InvalidParameter("empty probe grid".into()));
    }
    let lo = omega_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = omega_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let active: Vec<Transition> =
        rates.transitions.iter().filter(|t| t.omega >= lo && t.omega <= hi && t.kappa > 0.0).copied().collect();
    if let Some(t) = rates.transitions.iter().find(|t| !(t.kappa >= 0.0 && t.kappa.is_finite())) {
        return Err(Error::InvalidRate { lower: t.lower, upper: t.upper, rate: t.kappa });
    }
    let window = TransitionRates { levels: rates.levels.clone(), transitions: active.clone() };
    let warnings = window.check_independent();

    let raw: Vec<(C64, f64, f64)> = omega_grid
        .par_iter()
        .map(|&w| {
            active.iter().fold((C64::new(1.0, 0.0), 0.0, 0.0), |(r, ph, gd), t| {
                (
                    r * reflection_amplitude(w, t.omega, t.kappa),
                    ph + reflection_phase(w, t.omega, t.kappa),
                    gd + reflection_group_delay(w, t.omega, t.kappa),
                )
            })
        })
        .collect();
    let phases = unwrap_phase(&raw.iter().map(|p| p.1).collect::<Vec<_>>());
    let points = omega_grid
        .iter()
        .zip(raw.iter())
        .zip(phases)
        .map(|((&omega, &(amplitude, _, group_delay)), phase)| SpectrumPoint { omega, amplitude, phase, group_delay })
        .collect();
    Ok(Spectrum { points, transitions: active, overlapping: !warnings.is_empty(), warnings })
}

impl Spectrum {
    /// CSV with columns `omega, re_r, im_r, phase, group_delay`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "omega [omega_x],re_r,im_r,phase [rad],group_delay [1/omega_x]")?;
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt_num(p.omega),
                fmt_num(p.amplitude.re),
                fmt_num(p.amplitude.im),
                fmt_num(p.phase),
                fmt_num(p.group_delay)
            )?;
        }
        Ok(())
    }
}

/// Evenly spaced grid including both ends.
pub fn linspace(start: f64, end: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..points).map(|k| start + (end - start) * k as f64 / (points - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn resonance_and_far_field() {
        assert_abs_diff_eq!((reflection_amplitude(1.0, 1.0, 0.1) + 1.0).norm(), 0.0, epsilon = 1e-15);
        assert!((reflection_amplitude(50.0, 1.0, 0.01) - 1.0).norm() < 1e-3);
    }

    #[test]
    fn reciprocity_and_modulus() {
        for &d in &[0.001, 0.02, 0.3] {
            let a = reflection_amplitude(1.0 + d, 1.0, 0.05);
            let b = reflection_amplitude(1.0 - d, 1.0, 0.05);
            assert_abs_diff_eq!((a - b.conj()).norm(), 0.0, epsilon = 1e-13);
            assert_abs_diff_eq!(a.norm(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn phase_matches_arg() {
        for &w in &[0.9, 0.99, 1.0, 1.01, 1.2] {
            let r = reflection_amplitude(w, 1.0, 0.05);
            let ph = reflection_phase(w, 1.0, 0.05);
            assert_abs_diff_eq!((C64::from_polar(1.0, ph) - r).norm(), 0.0, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(reflection_phase(1.025, 1.0, 0.05), -PI / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn empty_window_is_flat() {
        let rates = TransitionRates {
            levels: vec![0.0, 3.0],
            transitions: vec![Transition { lower: 0, upper: 1, omega: 3.0, kappa: 0.1 }],
        };
        let s = spectrum(&rates, &linspace(0.5, 1.5, 11)).unwrap();
        assert!(s.points.iter().all(|p| p.amplitude == C64::new(1.0, 0.0)));
        assert!(s.transitions.is_empty());
    }

    #[test]
    fn unwrap_removes_jumps() {
        let u = unwrap_phase(&[-3.0, 3.0, 2.9]);
        assert_abs_diff_eq!(u[1], 3.0 - 2.0 * PI, epsilon = 1e-15);
        assert_abs_diff_eq!(u[2], 2.9 - 2.0 * PI, epsilon = 1e-15);
    }
}
