//! Squared atom-field couplings and the Lorentzian single-mode model.
//!
//! `g²(r₁, r₂, ω) = (μ₀/ħπ)·ω²·d₁·Im G(r₁, r₂, ω)·d₂` is the primitive
//! quantity. The cross term may be negative, so `g` itself is never formed
//! except as `√g²` of a diagonal term.

mod fit;

pub use fit::{fit_lorentzian, LorentzianFit};

use serde::Serialize;
use std::f64::consts::PI;

use crate::constants::{HBAR, MU_0};
use crate::error::{Error, Result};
use crate::greens::{GreenProvider, Vec3};

/// One two-level atom: position (m), transition frequency (rad/s) and real
/// transition dipole (C·m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomSpec {
    position: Vec3,
    omega_10: f64,
    dipole: Vec3,
}

impl AtomSpec {
    pub fn new(position: Vec3, omega_10: f64, dipole: Vec3) -> Result<Self> {
        const OP: &str = "AtomSpec::new";
        if !(omega_10 > 0.0) || !omega_10.is_finite() {
            return Err(Error::domain(
                OP,
                format!("transition frequency must be positive, got {omega_10}"),
            ));
        }
        if !(dipole.norm() > 0.0) || !dipole.iter().all(|x| x.is_finite()) {
            return Err(Error::domain(OP, "dipole must be finite with non-zero norm"));
        }
        if !position.iter().all(|x| x.is_finite()) {
            return Err(Error::domain(OP, "position must be finite"));
        }
        Ok(Self {
            position,
            omega_10,
            dipole,
        })
    }

    pub fn position(&self) -> Vec3 {
        self.position
    }

    pub fn omega_10(&self) -> f64 {
        self.omega_10
    }

    pub fn dipole(&self) -> Vec3 {
        self.dipole
    }

    pub fn dipole_norm(&self) -> f64 {
        self.dipole.norm()
    }

    pub fn at(&self, position: Vec3) -> Self {
        Self { position, ..*self }
    }
}

/// Two atoms with a common transition frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomPair {
    pub a: AtomSpec,
    pub b: AtomSpec,
}

impl AtomPair {
    pub fn new(a: AtomSpec, b: AtomSpec) -> Result<Self> {
        let (wa, wb) = (a.omega_10, b.omega_10);
        if (wa - wb).abs() > 1e-12 * wa.max(wb) {
            return Err(Error::domain(
                "AtomPair::new",
                format!("atoms must be identical, got ω₁₀ = {wa:e} and {wb:e}"),
            ));
        }
        Ok(Self { a, b })
    }

    pub fn omega_10(&self) -> f64 {
        self.a.omega_10
    }
}

/// `(μ₀/ħπ)·ω²·d₁·Im G(r₁, r₂, ω)·d₂`, in rad/s.
pub fn coupling_strength_sq(a1: &AtomSpec, a2: &AtomSpec, omega: f64, green: &dyn GreenProvider) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::domain("coupling_strength_sq", "frequency must be positive"));
    }
    let g = green.green(&a1.position, &a2.position, omega)?;
    Ok(MU_0 / (HBAR * PI) * omega * omega * g.contract_im(&a1.dipole, &a2.dipole))
}

/// `peak·(γ²/4)/((ω − ω_ν)² + γ²/4)`
pub fn lorentzian_profile(peak: f64, omega_nu: f64, gamma_nu: f64, omega: f64) -> f64 {
    let u = (omega - omega_nu) / (0.5 * gamma_nu);
    peak / (1.0 + u * u)
}

/// The single narrow mode: centre and width plus the three squared
/// couplings at the centre, all in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeModel {
    omega_nu: f64,
    gamma_nu: f64,
    g2_aa: f64,
    g2_bb: f64,
    g2_ab: f64,
}

/// Largest `γ_ν/ω_ν` accepted as a narrow mode.
pub const MAX_RELATIVE_WIDTH: f64 = 1e-2;

impl ModeModel {
    pub fn new(omega_nu: f64, gamma_nu: f64, g2_aa: f64, g2_bb: f64, g2_ab: f64) -> Result<Self> {
        const OP: &str = "ModeModel::new";
        if !(omega_nu > 0.0) || !(gamma_nu > 0.0) {
            return Err(Error::domain(OP, "mode frequency and width must be positive"));
        }
        if !(gamma_nu / omega_nu < MAX_RELATIVE_WIDTH) {
            return Err(Error::domain(
                OP,
                format!(
                    "mode is not narrow: γ/ω = {:e} ≥ {MAX_RELATIVE_WIDTH}",
                    gamma_nu / omega_nu
                ),
            ));
        }
        if !(g2_aa >= 0.0 && g2_bb >= 0.0) {
            return Err(Error::domain(
                OP,
                format!("diagonal couplings must be ≥ 0, got {g2_aa:e}, {g2_bb:e}"),
            ));
        }
        if !g2_ab.is_finite() {
            return Err(Error::domain(OP, "cross coupling must be finite"));
        }
        let bound = g2_aa * g2_bb;
        if g2_ab * g2_ab > bound * (1.0 + 1e-9) + f64::MIN_POSITIVE {
            return Err(Error::domain(
                OP,
                format!("cross coupling {g2_ab:e} violates (g²_AB)² ≤ g²_AA·g²_BB"),
            ));
        }
        Ok(Self {
            omega_nu,
            gamma_nu,
            g2_aa,
            g2_bb,
            g2_ab,
        })
    }

    /// Evaluate the three squared couplings at `ω_ν` through `green`.
    pub fn from_provider(pair: &AtomPair, green: &dyn GreenProvider, omega_nu: f64, gamma_nu: f64) -> Result<Self> {
        let g2_aa = coupling_strength_sq(&pair.a, &pair.a, omega_nu, green)?;
        let g2_bb = coupling_strength_sq(&pair.b, &pair.b, omega_nu, green)?;
        let g2_ab = coupling_strength_sq(&pair.a, &pair.b, omega_nu, green)?;
        // Rounding can leave exact zeros slightly negative.
        Self::new(omega_nu, gamma_nu, g2_aa.max(0.0), g2_bb.max(0.0), g2_ab)
    }

    pub fn omega_nu(&self) -> f64 {
        self.omega_nu
    }

    pub fn gamma_nu(&self) -> f64 {
        self.gamma_nu
    }

    pub fn g2_aa(&self) -> f64 {
        self.g2_aa
    }

    pub fn g2_bb(&self) -> f64 {
        self.g2_bb
    }

    pub fn g2_ab(&self) -> f64 {
        self.g2_ab
    }
}

/// `N = g²_AA + g²_BB + 2g²_AB`, clamped at zero against rounding.
pub fn mode_norm(m: &ModeModel) -> f64 {
    (m.g2_aa + m.g2_bb + 2.0 * m.g2_ab).max(0.0)
}

/// `g²_AB/√(g²_AA·g²_BB)`, clamped to `[−1, 1]` against rounding.
pub fn mode_overlap(m: &ModeModel) -> Result<f64> {
    if m.g2_aa == 0.0 || m.g2_bb == 0.0 {
        return Err(Error::domain(
            "mode_overlap",
            "an atom with zero coupling (at a node) has no normalizable overlap",
        ));
    }
    Ok((m.g2_ab / (m.g2_aa * m.g2_bb).sqrt()).clamp(-1.0, 1.0))
}
