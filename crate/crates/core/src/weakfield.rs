//! Weak-coupling (perturbative) potentials.
//!
//! With one excitation shared resonantly between two identical atoms, the
//! second-order energy shift is a contraction of `Re G` at the transition
//! frequency. In the narrow-mode limit `Re G` follows from the Lorentzian
//! `Im G` by the principal-value transform, and the shift reduces to
//! `∓ħγ_νπN/(4Δ)`, the large-detuning limit of the dressed potentials.

use serde::Serialize;
use std::f64::consts::PI;

use crate::constants::{EPSILON_0, HBAR, MU_0};
use crate::error::{Error, Result};
use crate::greens::{GreenProvider, Vec3};
use crate::modecoupling::AtomPair;

/// The three terms of the resonant potential. Single-atom terms are `None`
/// when the provider has no finite real part at coincident points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonantPotentialBreakdown {
    pub single_a: Option<f64>,
    pub single_b: Option<f64>,
    pub interaction: f64,
}

impl ResonantPotentialBreakdown {
    /// Sum of all three terms, if the single-atom terms are available.
    pub fn total(&self) -> Option<f64> {
        Some(self.single_a? + self.single_b? + self.interaction)
    }
}

/// `−½μ₀ω²d_A·Re G(r_A, r_A)·d_A − ½μ₀ω²d_B·Re G(r_B, r_B)·d_B
///  − μ₀ω²d_A·Re G(r_A, r_B)·d_B` at `ω = ω₁₀`.
pub fn resonant_potential(pair: &AtomPair, green: &dyn GreenProvider) -> Result<ResonantPotentialBreakdown> {
    const OP: &str = "resonant_potential";
    let w = pair.omega_10();
    let pref = MU_0 * w * w;
    let (a, b) = (&pair.a, &pair.b);
    let single = |atom: &crate::modecoupling::AtomSpec| -> Result<Option<f64>> {
        let g = green.green(&atom.position(), &atom.position(), w)?;
        Ok(g.contract_re(&atom.dipole(), &atom.dipole()).map(|v| -0.5 * pref * v))
    };
    let single_a = single(a)?;
    let single_b = single(b)?;
    let g = green.green(&a.position(), &b.position(), w)?;
    let cross = g
        .contract_re(&a.dipole(), &b.dipole())
        .ok_or_else(|| Error::domain(OP, "provider has no finite real part between the atoms"))?;
    Ok(ResonantPotentialBreakdown {
        single_a,
        single_b,
        interaction: -pref * cross,
    })
}

/// Closed-form free-space interaction term (SI):
/// `−(1/4πε₀)·d_Aα d_Bβ [(δ_αβ − e_αe_β) k² cos(kr)/r
///  − (δ_αβ − 3e_αe_β)(k sin(kr)/r² + cos(kr)/r³)]`.
pub fn free_space_resonant_potential(d_a: &Vec3, d_b: &Vec3, k: f64, r: &Vec3) -> Result<f64> {
    const OP: &str = "free_space_resonant_potential";
    let dist = r.norm();
    if !(dist > 0.0) {
        return Err(Error::domain(OP, "atoms must be separated"));
    }
    if !(k > 0.0) {
        return Err(Error::domain(OP, "wavenumber must be positive"));
    }
    let e = r / dist;
    let dd = d_a.dot(d_b);
    let (ea, eb) = (d_a.dot(&e), d_b.dot(&e));
    let transverse = dd - ea * eb;
    let static_like = dd - 3.0 * ea * eb;
    let (s, c) = (k * dist).sin_cos();
    let bracket = transverse * k * k * c / dist - static_like * (k * s / (dist * dist) + c / dist.powi(3));
    Ok(-bracket / (4.0 * PI * EPSILON_0))
}

fn nonzero_detuning(op: &'static str, delta: f64) -> Result<()> {
    if delta == 0.0 || !delta.is_finite() {
        Err(Error::domain(
            op,
            "the weak-coupling limit is undefined at zero detuning",
        ))
    } else {
        Ok(())
    }
}

/// `(U₊, U₋) = (+ħγ_νπN/(4Δ), −ħγ_νπN/(4Δ))`
pub fn weak_limit_potentials(gamma_nu: f64, n: f64, delta: f64) -> Result<(f64, f64)> {
    nonzero_detuning("weak_limit_potentials", delta)?;
    let u = HBAR * gamma_nu * PI * n / (4.0 * delta);
    Ok((u, -u))
}

/// `−(ħ/4Δ)·cos 2θ·Ω_R²`
pub fn weak_theta_potential(theta: f64, omega_r: f64, delta: f64) -> Result<f64> {
    nonzero_detuning("weak_theta_potential", delta)?;
    Ok(-HBAR / (4.0 * delta) * (2.0 * theta).cos() * omega_r * omega_r)
}

/// `(ħ/2Δ)·cos 2θ·Ω_R·∇Ω_R`
pub fn weak_theta_force(theta: f64, omega_r: f64, grad_omega_r: &Vec3, delta: f64) -> Result<Vec3> {
    nonzero_detuning("weak_theta_force", delta)?;
    Ok(grad_omega_r * (HBAR / (2.0 * delta) * (2.0 * theta).cos() * omega_r))
}

/// Smallest `|ω − ω_ν|/γ_ν` at which the narrow-mode form is accepted.
pub const NARROW_MODE_MIN_RATIO: f64 = 1e2;

/// `γ_ν·g²_peak/(2(ω_ν − ω))`: the real-part partner of a Lorentzian
/// squared coupling far from its centre. It equals `1/π` times the
/// principal-value integral of the Lorentzian over `ω' − ω`.
pub fn narrow_mode_real_contraction(g2_peak: f64, gamma_nu: f64, omega_nu: f64, omega: f64) -> Result<f64> {
    let det = omega_nu - omega;
    if !(det.abs() >= NARROW_MODE_MIN_RATIO * gamma_nu) {
        return Err(Error::domain(
            "narrow_mode_real_contraction",
            format!(
                "|ω − ω_ν| = {:.3e}·γ_ν, need at least {NARROW_MODE_MIN_RATIO}",
                det.abs() / gamma_nu
            ),
        ));
    }
    Ok(gamma_nu * g2_peak / (2.0 * det))
}

/// Position-dependent part of the dressed potentials, `U±(r) − U±(r_ref)`,
/// from the vacuum Rabi frequencies at `r` and at a reference
/// configuration. Evaluated as `±(ħ/2)(Ω_R² − Ω_R,ref²)/(Ω + Ω_ref)` so the
/// large-`Δ` limit does not cancel.
pub fn eigenstate_shift(omega_r: f64, omega_r_ref: f64, delta: f64) -> (f64, f64) {
    let omega = omega_r.hypot(delta);
    let omega_ref = omega_r_ref.hypot(delta);
    let num = (omega_r - omega_r_ref) * (omega_r + omega_r_ref);
    let den = omega + omega_ref;
    let d = if den > 0.0 { 0.5 * HBAR * num / den } else { 0.0 };
    (d, -d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::C;
    use crate::greens::FreeSpace;
    use crate::modecoupling::AtomSpec;

    #[test]
    fn free_space_static_limit() {
        let d = Vec3::new(0.0, 1e-29, 0.0);
        let r = Vec3::new(1e-9, 0.0, 0.0);
        let k = 1e-3;
        let u = free_space_resonant_potential(&d, &d, k, &r).unwrap();
        let stat = 1e-58 / (4.0 * PI * EPSILON_0 * 1e-27);
        assert!((u / stat - 1.0).abs() < 1e-10);
    }

    #[test]
    fn longitudinal_geometry_has_no_transverse_term() {
        let d = Vec3::new(1e-29, 0.0, 0.0);
        let r = Vec3::new(2e-7, 0.0, 0.0);
        let k = 1e7;
        let u = free_space_resonant_potential(&d, &d, k, &r).unwrap();
        let dist = 2e-7;
        let (s, c) = (k * dist).sin_cos();
        let expected = -(2.0 * 1e-58) * (k * s / (dist * dist) + c / dist.powi(3)) / (4.0 * PI * EPSILON_0);
        assert!((u / expected - 1.0).abs() < 1e-13);
        assert!(free_space_resonant_potential(&d, &d, k, &Vec3::zeros()).is_err());
    }

    #[test]
    fn free_space_breakdown_flags_singles() {
        let w = 2e15;
        let a = AtomSpec::new(Vec3::zeros(), w, Vec3::new(1e-29, 0.0, 0.0)).unwrap();
        let b = a.at(Vec3::new(0.0, 3e-7, 1e-7));
        let pair = AtomPair::new(a, b).unwrap();
        let bd = resonant_potential(&pair, &FreeSpace).unwrap();
        assert!(bd.single_a.is_none() && bd.single_b.is_none() && bd.total().is_none());
        let closed =
            free_space_resonant_potential(&a.dipole(), &b.dipole(), w / C, &(b.position() - a.position())).unwrap();
        assert!((bd.interaction / closed - 1.0).abs() < 1e-12);
        let swapped = resonant_potential(&AtomPair::new(b, a).unwrap(), &FreeSpace).unwrap();
        assert!((swapped.interaction / bd.interaction - 1.0).abs() < 1e-14);
    }

    #[test]
    fn weak_examples() {
        assert_eq!(weak_limit_potentials(1.0, 0.0, 3.0).unwrap(), (0.0, -0.0));
        let (p, m) = weak_limit_potentials(1.0, 16.0 / PI, 1000.0).unwrap();
        assert!((m / HBAR + 0.004).abs() < 1e-15);
        assert_eq!(p, -m);
        assert!(weak_limit_potentials(1.0, 1.0, 0.0).is_err());
        let t0 = weak_theta_potential(0.0, 4.0, 1000.0).unwrap();
        assert!((t0 - m).abs() < 1e-15 * HBAR);
        assert!(weak_theta_potential(PI / 4.0, 4.0, 1000.0).unwrap().abs() < 1e-18 * HBAR);
        assert!((weak_theta_potential(PI / 2.0, 4.0, 1000.0).unwrap() - p).abs() < 1e-15 * HBAR);
    }

    #[test]
    fn weak_force_examples() {
        let g = Vec3::new(0.0, 0.0, 2.0);
        let f0 = weak_theta_force(0.0, 3.0, &g, 10.0).unwrap();
        let f2 = weak_theta_force(PI / 2.0, 3.0, &g, 10.0).unwrap();
        assert!((f0 + f2).norm() < 1e-15 * f0.norm());
        assert!((f0.z - HBAR / 20.0 * 6.0).abs() < 1e-15 * f0.z);
        assert!(weak_theta_force(PI / 4.0, 3.0, &g, 10.0).unwrap().norm() < 1e-16 * f0.norm());
    }

    #[test]
    fn narrow_mode_examples() {
        let v = narrow_mode_real_contraction(2.0, 1.0, 0.0, -500.0).unwrap();
        assert_eq!(v, 2.0 / 1000.0);
        let w = narrow_mode_real_contraction(2.0, 1.0, 0.0, 500.0).unwrap();
        assert_eq!(v, -w);
        assert_eq!(narrow_mode_real_contraction(0.0, 1.0, 0.0, 500.0).unwrap(), 0.0);
        assert!(narrow_mode_real_contraction(1.0, 1.0, 0.0, 50.0).is_err());
    }

    #[test]
    fn shift_matches_naive_difference() {
        let (omega_r, r0, delta): (f64, f64, f64) = (3.0, 1.0, 2.0);
        let naive = -0.5 * HBAR * (omega_r.hypot(delta) - r0.hypot(delta));
        let (_, m) = eigenstate_shift(omega_r, r0, delta);
        assert!((m - naive).abs() < 1e-15 * HBAR);
    }
}
