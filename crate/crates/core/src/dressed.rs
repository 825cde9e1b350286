//! The dressed two-state system.
//!
//! In the basis `|u₁⟩` (one shared atomic excitation, no photon) and `|u₂⟩`
//! (both atoms in the ground state, one photon in the mode) the coupled
//! Hamiltonian is `ħ·[[0, Ω_R/2], [Ω_R/2, Δ]]` with `Δ = ω_ν − ω₁₀` and the
//! vacuum Rabi frequency `Ω_R = √(γ_ν π N)`. Its eigenstates `|±⟩` are the
//! dressed states and `θ_c` is the rotation angle between the two bases.
//!
//! Forces need `∇Ω_R`, which comes from a [`RabiLandscape`] by central
//! differences.

use nalgebra::{Matrix2, Vector3};
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::constants::HBAR;
use crate::error::{Error, Result};
use crate::greens::Vec3;
use crate::numdiff::central_richardson;
use crate::Variant;

/// `Ω_R = √(γ_ν π N)`
pub fn rabi_frequency(n: f64, gamma_nu: f64) -> Result<f64> {
    const OP: &str = "rabi_frequency";
    if !(n >= 0.0) {
        return Err(Error::domain(OP, format!("mode norm must be ≥ 0, got {n:e}")));
    }
    if !(gamma_nu > 0.0) {
        return Err(Error::domain(OP, "mode width must be positive"));
    }
    Ok((gamma_nu * PI * n).sqrt())
}

/// `(Δ + Ω)` and `(Ω − Δ)` without cancellation.
fn split(omega_r: f64, delta: f64, omega: f64) -> (f64, f64) {
    if delta >= 0.0 {
        let sum = delta + omega;
        (sum, if sum > 0.0 { omega_r * omega_r / sum } else { 0.0 })
    } else {
        let diff = omega - delta;
        (omega_r * omega_r / diff, diff)
    }
}

/// `(E₊, E₋) = ħΔ/2 ± ħΩ/2` in joules.
pub fn eigenenergies(omega_r: f64, delta: f64) -> Result<(f64, f64)> {
    if !(omega_r >= 0.0) || !delta.is_finite() {
        return Err(Error::domain("eigenenergies", "need Ω_R ≥ 0 and finite Δ"));
    }
    let omega = omega_r.hypot(delta);
    let (plus, minus) = split(omega_r, delta, omega);
    Ok((0.5 * HBAR * plus, -0.5 * HBAR * minus))
}

/// `θ_c = atan2(Δ + Ω, Ω_R)`, so `sin 2θ_c = Ω_R/Ω` and `cos 2θ_c = −Δ/Ω`.
pub fn coupling_angle(omega_r: f64, delta: f64) -> Result<f64> {
    const OP: &str = "coupling_angle";
    if !(omega_r >= 0.0) || !delta.is_finite() {
        return Err(Error::domain(OP, "need Ω_R ≥ 0 and finite Δ"));
    }
    if omega_r == 0.0 && delta == 0.0 {
        return Err(Error::domain(
            OP,
            "Ω_R = Δ = 0 is degenerate; the coupling angle is undefined",
        ));
    }
    let omega = omega_r.hypot(delta);
    let (sum, _) = split(omega_r, delta, omega);
    Ok(sum.atan2(omega_r))
}

/// Rows are the `|+⟩` and `|−⟩` coefficients in the `(|u₁⟩, |u₂⟩)` basis.
pub fn dressed_coefficients(theta_c: f64) -> [[f64; 2]; 2] {
    let (s, c) = theta_c.sin_cos();
    [[c, s], [-s, c]]
}

/// `(U₊, U₋) = (+ħΩ/2, −ħΩ/2)`
pub fn potential_pm(omega: f64) -> Result<(f64, f64)> {
    if !(omega >= 0.0) {
        return Err(Error::domain("potential_pm", "generalized Rabi frequency must be ≥ 0"));
    }
    Ok((0.5 * HBAR * omega, -0.5 * HBAR * omega))
}

/// The dressed system at one pair of atom positions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DressedSystem {
    omega_r: f64,
    delta: f64,
    omega: f64,
    theta_c: f64,
}

impl DressedSystem {
    pub fn new(omega_r: f64, delta: f64) -> Result<Self> {
        let theta_c = coupling_angle(omega_r, delta)?;
        Ok(Self {
            omega_r,
            delta,
            omega: omega_r.hypot(delta),
            theta_c,
        })
    }

    pub fn rabi(&self) -> f64 {
        self.omega_r
    }

    pub fn detuning(&self) -> f64 {
        self.delta
    }

    /// `Ω = √(Ω_R² + Δ²)`
    pub fn generalized_rabi(&self) -> f64 {
        self.omega
    }

    pub fn coupling_angle(&self) -> f64 {
        self.theta_c
    }

    pub fn sin_2theta_c(&self) -> f64 {
        self.omega_r / self.omega
    }

    pub fn cos_2theta_c(&self) -> f64 {
        -self.delta / self.omega
    }

    pub fn eigenenergies(&self) -> (f64, f64) {
        let (plus, minus) = split(self.omega_r, self.delta, self.omega);
        (0.5 * HBAR * plus, -0.5 * HBAR * minus)
    }

    pub fn potentials(&self) -> (f64, f64) {
        (0.5 * HBAR * self.omega, -0.5 * HBAR * self.omega)
    }
}

/// `[[0, Ω_R/2], [Ω_R/2, Δ]]` in rad/s.
pub fn hamiltonian_matrix(sys: &DressedSystem) -> Matrix2<f64> {
    let off = 0.5 * sys.omega_r;
    Matrix2::new(0.0, off, off, sys.delta)
}

/// Mixing angle of the prescribed superposition `cos θ|u₁⟩ + sin θ|u₂⟩`,
/// reduced to `[0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct SuperpositionAngle(f64);

impl SuperpositionAngle {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::domain("SuperpositionAngle::new", "angle must be finite"));
        }
        let r = theta.rem_euclid(PI);
        Ok(Self(if r >= PI { 0.0 } else { r }))
    }

    pub const BARE_ATOMIC: SuperpositionAngle = SuperpositionAngle(0.0);
    pub const BARE_PHOTONIC: SuperpositionAngle = SuperpositionAngle(FRAC_PI_2);

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `U_θ = (ħΩ/2)·cos 2(θ − θ_c)`
pub fn potential_theta(theta: SuperpositionAngle, sys: &DressedSystem) -> f64 {
    0.5 * HBAR * sys.omega * (2.0 * (theta.0 - sys.theta_c)).cos()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Atom {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// A geometry in which the vacuum Rabi frequency is known as a function of
/// both atom positions, at fixed detuning.
pub trait RabiLandscape: Sync {
    fn positions(&self) -> (Vec3, Vec3);

    fn rabi_at(&self, r_a: &Vec3, r_b: &Vec3) -> Result<f64>;

    fn detuning(&self) -> f64;

    /// Characteristic length of the geometry, used to floor the
    /// finite-difference step.
    fn length_scale(&self) -> f64;

    /// Coordinates along which `Ω_R` may vary. Others get a zero gradient.
    fn active_axes(&self) -> [bool; 3] {
        [true; 3]
    }

    fn dressed_system(&self) -> Result<DressedSystem> {
        let (a, b) = self.positions();
        DressedSystem::new(self.rabi_at(&a, &b)?, self.detuning())
    }
}

/// Step and acceptance rule for `∇Ω_R`. The step is
/// `max(rel_step·|x|, floor_step·L)`; the result is rejected when the
/// Richardson error estimate exceeds `rel_tol·max(|∇Ω_R|, Ω_R/L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct GradientControl {
    pub rel_step: f64,
    pub floor_step: f64,
    pub rel_tol: f64,
}

impl Default for GradientControl {
    fn default() -> Self {
        Self {
            rel_step: 1e-6,
            floor_step: 1e-9,
            rel_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gradient {
    pub value: Vec3,
    pub error: Vec3,
}

/// `∇Ω_R` with respect to the position of `atom`.
pub fn grad_rabi(land: &dyn RabiLandscape, atom: Atom, ctl: &GradientControl) -> Result<Gradient> {
    const OP: &str = "grad_rabi";
    let (ra, rb) = land.positions();
    let len = land.length_scale();
    let centre = land.rabi_at(&ra, &rb)?;
    let mut value = Vector3::zeros();
    let mut error = Vector3::zeros();
    let mut failure: Option<Error> = None;
    for (axis, active) in land.active_axes().into_iter().enumerate() {
        if !active {
            continue;
        }
        let x0 = match atom {
            Atom::A => ra[axis],
            Atom::B => rb[axis],
        };
        let h = (ctl.rel_step * x0.abs()).max(ctl.floor_step * len);
        let d = central_richardson(
            |x| {
                let (mut a, mut b) = (ra, rb);
                match atom {
                    Atom::A => a[axis] = x,
                    Atom::B => b[axis] = x,
                }
                match land.rabi_at(&a, &b) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::NAN
                    }
                }
            },
            x0,
            h,
        );
        if let Some(e) = failure.take() {
            return Err(e);
        }
        value[axis] = d.value;
        error[axis] = d.error;
    }
    let scale = value.norm().max(centre / len);
    let worst = error.amax();
    if !(worst <= ctl.rel_tol * scale) {
        return Err(Error::Gradient {
            op: OP,
            estimate: worst,
            tolerance: ctl.rel_tol * scale,
        });
    }
    Ok(Gradient { value, error })
}

/// `F_± = −∇U_± = ∓(ħ/2)·sin 2θ_c·∇Ω_R`
pub fn force_eigenstate(land: &dyn RabiLandscape, branch: Branch, atom: Atom, ctl: &GradientControl) -> Result<Vec3> {
    let sys = land.dressed_system()?;
    let grad = grad_rabi(land, atom, ctl)?;
    Ok(grad.value * (-branch.sign() * 0.5 * HBAR * sys.sin_2theta_c()))
}

/// Force on `atom` in the frozen superposition `θ`.
///
/// [`Variant::Corrected`] is `−(ħ/2)·sin 2θ·∇Ω_R`, which is `−∇U_θ`.
/// [`Variant::AsPrinted`] divides that by `sin 2θ_c` and so needs `Ω_R > 0`.
pub fn force_theta(
    land: &dyn RabiLandscape,
    theta: SuperpositionAngle,
    atom: Atom,
    variant: Variant,
    ctl: &GradientControl,
) -> Result<Vec3> {
    let sys = land.dressed_system()?;
    let factor = match variant {
        Variant::Corrected => 1.0,
        Variant::AsPrinted => {
            if sys.omega_r == 0.0 {
                return Err(Error::domain(
                    "force_theta",
                    "the as-printed form divides by sin 2θ_c, which vanishes at Ω_R = 0",
                ));
            }
            1.0 / sys.sin_2theta_c()
        }
    };
    let grad = grad_rabi(land, atom, ctl)?;
    Ok(grad.value * (-0.5 * HBAR * (2.0 * theta.0).sin() * factor))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Linear {
        ra: Vec3,
        rb: Vec3,
        slope: f64,
        curv: f64,
        delta: f64,
    }

    impl RabiLandscape for Linear {
        fn positions(&self) -> (Vec3, Vec3) {
            (self.ra, self.rb)
        }
        fn rabi_at(&self, a: &Vec3, b: &Vec3) -> Result<f64> {
            Ok(1e6 + self.slope * a.z + self.curv * a.z * a.z + 0.5 * self.slope * b.x)
        }
        fn detuning(&self) -> f64 {
            self.delta
        }
        fn length_scale(&self) -> f64 {
            1e-6
        }
    }

    fn lin(slope: f64, curv: f64, delta: f64) -> Linear {
        Linear {
            ra: Vec3::new(0.0, 0.0, 3e-7),
            rb: Vec3::new(2e-7, 0.0, 6e-7),
            slope,
            curv,
            delta,
        }
    }

    #[test]
    fn rabi_examples() {
        assert_eq!(rabi_frequency(0.0, 1.0).unwrap(), 0.0);
        assert!((rabi_frequency(4.0, 1.0 / PI).unwrap() - 2.0).abs() < 1e-15);
        assert!(rabi_frequency(-1.0, 1.0).is_err());
    }

    #[test]
    fn energies_examples() {
        let (p, m) = eigenenergies(1.0, 0.0).unwrap();
        assert!((p - 0.5 * HBAR).abs() < 1e-15 * HBAR && (m + 0.5 * HBAR).abs() < 1e-15 * HBAR);
        let (p, m) = eigenenergies(4.0, 3.0).unwrap();
        assert!((p / HBAR - 4.0).abs() < 1e-15 && (m / HBAR + 1.0).abs() < 1e-15);
        let (p, m) = eigenenergies(0.0, 4.0).unwrap();
        assert_eq!((p / HBAR, m), (4.0, 0.0));
    }

    #[test]
    fn angle_examples() {
        assert!((coupling_angle(2.0, 0.0).unwrap() - PI / 4.0).abs() < 1e-15);
        let t = coupling_angle(4.0, 3.0).unwrap();
        assert!((t - 2f64.atan()).abs() < 1e-15);
        assert!(((2.0 * t).tan() + 4.0 / 3.0).abs() < 1e-12);
        assert!((coupling_angle(1.0, 1e9).unwrap() - FRAC_PI_2).abs() < 1e-8);
        assert!(coupling_angle(1.0, -1e9).unwrap().abs() < 1e-8);
        assert!(coupling_angle(0.0, 0.0).is_err());
    }

    #[test]
    fn angle_is_continuous_through_resonance() {
        let a = coupling_angle(1.0, -1e-9).unwrap();
        let b = coupling_angle(1.0, 1e-9).unwrap();
        assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn coefficients() {
        assert_eq!(dressed_coefficients(0.0), [[1.0, 0.0], [-0.0, 1.0]]);
        let r = dressed_coefficients(PI / 4.0);
        for row in r {
            for x in row {
                assert!((x.abs() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn hamiltonian_examples() {
        let s = DressedSystem::new(0.0, 2.0).unwrap();
        let h = hamiltonian_matrix(&s);
        assert_eq!(h[(0, 1)], 0.0);
        let s = DressedSystem::new(4.0, 3.0).unwrap();
        assert_eq!(hamiltonian_matrix(&s).trace(), 3.0);
    }

    #[test]
    fn potential_examples() {
        let (p, m) = potential_pm(5.0).unwrap();
        assert!((p / HBAR - 2.5).abs() < 1e-15 && (m / HBAR + 2.5).abs() < 1e-15);
        assert_eq!(potential_pm(0.0).unwrap(), (0.0, -0.0));
        let s = DressedSystem::new(4.0, 3.0).unwrap();
        let tc = s.coupling_angle();
        let (up, um) = s.potentials();
        let at = |t: f64| potential_theta(SuperpositionAngle::new(t).unwrap(), &s);
        assert!((at(tc) - up).abs() < 1e-15 * up);
        assert!((at(tc + FRAC_PI_2) - um).abs() < 1e-15 * up);
        assert!(at(tc + PI / 4.0).abs() < 1e-15 * up);
        // bare atomic state sits at −ħΔ/2
        assert!((at(0.0) + 0.5 * HBAR * 3.0).abs() < 1e-15 * up);
    }

    #[test]
    fn superposition_angle_reduced() {
        assert!((SuperpositionAngle::new(PI + 0.25).unwrap().value() - 0.25).abs() < 1e-15);
        assert!((SuperpositionAngle::new(-0.25).unwrap().value() - (PI - 0.25)).abs() < 1e-15);
    }

    #[test]
    fn gradient_exact_for_linear_and_quadratic() {
        let ctl = GradientControl::default();
        let g = grad_rabi(&lin(1e12, 0.0, 1.0), Atom::A, &ctl).unwrap();
        assert!((g.value.z / 1e12 - 1.0).abs() < 1e-9);
        assert_eq!(g.value.x, 0.0);
        let g = grad_rabi(&lin(1e12, 1e18, 1.0), Atom::A, &ctl).unwrap();
        let exact = 1e12 + 2.0 * 1e18 * 3e-7;
        assert!((g.value.z / exact - 1.0).abs() < 1e-8);
        let g = grad_rabi(&lin(1e12, 0.0, 1.0), Atom::B, &ctl).unwrap();
        assert!((g.value.x / 5e11 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn forces_vanish_for_constant_rabi_and_bare_states() {
        let ctl = GradientControl::default();
        let flat = lin(0.0, 0.0, 1e5);
        let f = force_eigenstate(&flat, Branch::Plus, Atom::A, &ctl).unwrap();
        assert_eq!(f.norm(), 0.0);
        let land = lin(1e12, 0.0, 1e5);
        for v in [Variant::Corrected, Variant::AsPrinted] {
            for t in [SuperpositionAngle::BARE_ATOMIC, SuperpositionAngle::BARE_PHOTONIC] {
                let f = force_theta(&land, t, Atom::A, v, &ctl).unwrap();
                assert!(f.norm() < 1e-16 * HBAR * 1e12);
            }
        }
    }

    #[test]
    fn resonant_variants_coincide() {
        let ctl = GradientControl::default();
        let land = lin(1e12, 0.0, 0.0);
        let t = SuperpositionAngle::new(0.3).unwrap();
        let a = force_theta(&land, t, Atom::A, Variant::Corrected, &ctl).unwrap();
        let b = force_theta(&land, t, Atom::A, Variant::AsPrinted, &ctl).unwrap();
        assert!((a - b).norm() <= 1e-15 * a.norm());
        let e = force_eigenstate(&land, Branch::Plus, Atom::A, &ctl).unwrap();
        let g = grad_rabi(&land, Atom::A, &ctl).unwrap().value;
        assert!((e + g * (0.5 * HBAR)).norm() <= 1e-15 * e.norm());
    }
}
