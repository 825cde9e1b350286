//! Two atoms on the axis of a symmetric planar cavity, dipoles along `x`.
//!
//! At resonance the single-mode reduction gives
//! `Ω²_AB = (3cΓ₀/d)·s_A·s_B` and `Ω²_A = (3cΓ₀/2d)·s_A²` with
//! `s = sin(νπz/d)`, so `Ω_R² = (3cΓ₀/2d)·(s_A + s_B)²`.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::constants::{C, EPSILON_0, HBAR};
use crate::dressed::RabiLandscape;
use crate::error::{Error, Result};
use crate::greens::{PlanarCavity, ResonantPlanarGreen, SingleModeWindow, Vec3};
use crate::modecoupling::{coupling_strength_sq, mode_norm, AtomPair, AtomSpec, ModeModel};
use crate::Variant;

/// Fraction of `d` kept clear of each plate.
pub const PLATE_MARGIN: f64 = 1e-6;

/// `Γ₀ = ω₁₀³|d₁₀|²/(3πε₀ħc³)`
pub fn free_decay_rate(omega_10: f64, dipole_norm: f64) -> Result<f64> {
    if !(omega_10 > 0.0 && dipole_norm > 0.0) {
        return Err(Error::domain(
            "free_decay_rate",
            "frequency and dipole norm must be positive",
        ));
    }
    Ok(omega_10.powi(3) * dipole_norm * dipole_norm / (3.0 * PI * EPSILON_0 * HBAR * C.powi(3)))
}

pub fn cavity_mode_width(cav: &PlanarCavity) -> f64 {
    cav.mode_width()
}

pub fn resonance_frequency(cav: &PlanarCavity) -> f64 {
    cav.resonance_frequency()
}

fn interior(cav: &PlanarCavity, z: f64) -> Result<f64> {
    let d = cav.d();
    if !(z >= 0.0 && z <= d) {
        return Err(Error::domain(
            "PlanarScenario",
            format!("position z = {z:e} outside [0, {d:e}]"),
        ));
    }
    let (lo, hi) = (PLATE_MARGIN * d, (1.0 - PLATE_MARGIN) * d);
    let clamped = z.clamp(lo, hi);
    if clamped != z {
        log::warn!("atom at z = {z:e} moved to {clamped:e}, {PLATE_MARGIN:e}·d from the plate");
    }
    Ok(clamped)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanarScenario {
    cavity: PlanarCavity,
    z_a: f64,
    z_b: f64,
    omega_10: f64,
    dipole_norm: f64,
}

impl PlanarScenario {
    /// Atoms tuned to the mode, `ω₁₀ = ω_ν`.
    pub fn resonant(cavity: PlanarCavity, z_a: f64, z_b: f64, dipole_norm: f64) -> Result<Self> {
        Self::detuned(cavity, z_a, z_b, dipole_norm, 0.0)
    }

    /// Atoms with `ω₁₀ = ω_ν − Δ`.
    pub fn detuned(cavity: PlanarCavity, z_a: f64, z_b: f64, dipole_norm: f64, delta: f64) -> Result<Self> {
        let omega_10 = cavity.resonance_frequency() - delta;
        if !(omega_10 > 0.0) {
            return Err(Error::domain(
                "PlanarScenario",
                "detuning leaves a non-positive transition frequency",
            ));
        }
        if !(dipole_norm > 0.0) || !dipole_norm.is_finite() {
            return Err(Error::domain("PlanarScenario", "dipole norm must be positive"));
        }
        Ok(Self {
            cavity,
            z_a: interior(&cavity, z_a)?,
            z_b: interior(&cavity, z_b)?,
            omega_10,
            dipole_norm,
        })
    }

    pub fn with_positions(&self, z_a: f64, z_b: f64) -> Result<Self> {
        Ok(Self {
            z_a: interior(&self.cavity, z_a)?,
            z_b: interior(&self.cavity, z_b)?,
            ..*self
        })
    }

    pub fn cavity(&self) -> &PlanarCavity {
        &self.cavity
    }

    pub fn z_a(&self) -> f64 {
        self.z_a
    }

    pub fn z_b(&self) -> f64 {
        self.z_b
    }

    pub fn omega_10(&self) -> f64 {
        self.omega_10
    }

    pub fn dipole_norm(&self) -> f64 {
        self.dipole_norm
    }

    /// `Δ = ω_ν − ω₁₀`
    pub fn delta(&self) -> f64 {
        self.cavity.resonance_frequency() - self.omega_10
    }

    pub fn is_resonant(&self) -> bool {
        self.delta().abs() <= 1e-12 * self.omega_10
    }

    pub fn atoms(&self) -> AtomPair {
        let dip = Vec3::new(self.dipole_norm, 0.0, 0.0);
        let a = AtomSpec::new(Vec3::new(0.0, 0.0, self.z_a), self.omega_10, dip).expect("validated");
        let b = AtomSpec::new(Vec3::new(0.0, 0.0, self.z_b), self.omega_10, dip).expect("validated");
        AtomPair { a, b }
    }

    /// `Γ₀` at the mode frequency, where the couplings are evaluated.
    pub fn decay_rate(&self) -> f64 {
        free_decay_rate(self.cavity.resonance_frequency(), self.dipole_norm).expect("validated")
    }

    /// `cΓ₀/d`, the unit of the dimensionless columns.
    pub fn rabi_unit(&self) -> f64 {
        C * self.decay_rate() / self.cavity.d()
    }

    fn closed_form_rabi(&self, z_a: f64, z_b: f64) -> f64 {
        let amp = (1.5 * self.rabi_unit()).sqrt();
        amp * (self.cavity.mode_function(z_a) + self.cavity.mode_function(z_b)).abs()
    }

    /// `Ω_R` with both atoms on nodes, the zero of the position-dependent
    /// potentials.
    pub fn reference_rabi(&self) -> f64 {
        self.closed_form_rabi(0.0, 0.0)
    }
}

impl RabiLandscape for PlanarScenario {
    fn positions(&self) -> (Vec3, Vec3) {
        (Vec3::new(0.0, 0.0, self.z_a), Vec3::new(0.0, 0.0, self.z_b))
    }

    fn rabi_at(&self, r_a: &Vec3, r_b: &Vec3) -> Result<f64> {
        Ok(self.closed_form_rabi(r_a.z, r_b.z))
    }

    fn detuning(&self) -> f64 {
        self.delta()
    }

    fn length_scale(&self) -> f64 {
        self.cavity.d()
    }

    fn active_axes(&self) -> [bool; 3] {
        [false, false, true]
    }
}

/// Squared Rabi frequency contributions, (rad/s)².
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RabiBreakdown {
    pub omega2_a: f64,
    pub omega2_b: f64,
    pub omega2_ab: f64,
    pub omega2_total: f64,
}

impl RabiBreakdown {
    pub fn scaled(&self, unit: f64) -> RabiBreakdown {
        RabiBreakdown {
            omega2_a: self.omega2_a / unit,
            omega2_b: self.omega2_b / unit,
            omega2_ab: self.omega2_ab / unit,
            omega2_total: self.omega2_total / unit,
        }
    }
}

/// Resonant Rabi contributions in closed form.
pub fn rabi_contributions(scn: &PlanarScenario, variant: Variant) -> Result<RabiBreakdown> {
    if !scn.is_resonant() {
        return Err(Error::domain(
            "rabi_contributions",
            format!(
                "scenario is detuned by Δ = {:e} rad/s; use the dressed system with Δ ≠ 0",
                scn.delta()
            ),
        ));
    }
    let u = scn.rabi_unit();
    let cav = &scn.cavity;
    Ok(match variant {
        Variant::Corrected => {
            let (sa, sb) = (cav.mode_function(scn.z_a), cav.mode_function(scn.z_b));
            RabiBreakdown {
                omega2_a: 1.5 * u * sa * sa,
                omega2_b: 1.5 * u * sb * sb,
                omega2_ab: 3.0 * u * sa * sb,
                omega2_total: 1.5 * u * (sa + sb) * (sa + sb),
            }
        }
        Variant::AsPrinted => {
            let ab = printed_ab(scn, scn.z_a, scn.z_b);
            let a = 0.5 * printed_ab(scn, scn.z_a, scn.z_a);
            let b = 0.5 * printed_ab(scn, scn.z_b, scn.z_b);
            RabiBreakdown {
                omega2_a: a,
                omega2_b: b,
                omega2_ab: ab,
                omega2_total: a + b + ab,
            }
        }
    })
}

fn printed_ab(scn: &PlanarScenario, z_a: f64, z_b: f64) -> f64 {
    let cav = &scn.cavity;
    let peak = crate::greens::planar::resonant_peak(cav, z_a, z_b, Variant::AsPrinted);
    // γ_ν·π·2g²_AB with g² = (μ₀|d|²/ħπ)·peak and μ₀|d|²ω_ν³/(ħπ) = 3cΓ₀
    let w3 = cav.resonance_frequency().powi(3);
    cav.mode_width() * PI * 2.0 * 3.0 * C * scn.decay_rate() / w3 * peak
}

/// The same contributions assembled from squared couplings through the
/// resonant Green's tensor: `Ω²_X = γ_νπ·g²_X` with the cross term doubled,
/// and `Ω²_total = γ_νπ·N`.
pub fn rabi_contributions_from_couplings(scn: &PlanarScenario, variant: Variant) -> Result<RabiBreakdown> {
    let cav = scn.cavity;
    let green = ResonantPlanarGreen {
        cavity: cav,
        window: SingleModeWindow::default(),
        variant,
    };
    let pair = scn.atoms();
    let w = cav.resonance_frequency();
    let gamma = cav.mode_width();
    let g2_aa = coupling_strength_sq(&pair.a, &pair.a, w, &green)?;
    let g2_bb = coupling_strength_sq(&pair.b, &pair.b, w, &green)?;
    let g2_ab = coupling_strength_sq(&pair.a, &pair.b, w, &green)?;
    let total_norm = match variant {
        Variant::Corrected => mode_norm(&ModeModel::from_provider(&pair, &green, w, gamma)?),
        // The printed form breaks Cauchy-Schwarz, so no ModeModel.
        Variant::AsPrinted => g2_aa + g2_bb + 2.0 * g2_ab,
    };
    let f = gamma * PI;
    Ok(RabiBreakdown {
        omega2_a: f * g2_aa,
        omega2_b: f * g2_bb,
        omega2_ab: 2.0 * f * g2_ab,
        omega2_total: f * total_norm,
    })
}

/// Which coordinates a scan moves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Sweep {
    /// `z_A = z_B = z`
    Joint,
    /// Atom B moves, atom A held at `z_a`.
    AtomB { z_a: f64 },
    /// Atom A moves, atom B held at `z_b`.
    AtomA { z_b: f64 },
}

/// `z_i = (i + ½)·d/n`
pub fn uniform_grid(d: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| (i as f64 + 0.5) * d / n as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RabiRow {
    pub z_a: f64,
    pub z_b: f64,
    pub si: RabiBreakdown,
    pub dimensionless: RabiBreakdown,
}

/// One row per grid point, in grid order.
pub fn scan_rabi(template: &PlanarScenario, sweep: Sweep, grid: &[f64], variant: Variant) -> Result<Vec<RabiRow>> {
    const OP: &str = "scan_rabi";
    if grid.is_empty() {
        return Err(Error::domain(OP, "empty grid"));
    }
    let d = template.cavity.d();
    if let Some(z) = grid.iter().find(|&&z| !(z > 0.0 && z < d)) {
        return Err(Error::domain(OP, format!("grid point {z:e} outside (0, {d:e})")));
    }
    let unit = template.rabi_unit();
    grid.par_iter()
        .map(|&z| {
            let (za, zb) = match sweep {
                Sweep::Joint => (z, z),
                Sweep::AtomB { z_a } => (z_a, z),
                Sweep::AtomA { z_b } => (z, z_b),
            };
            let scn = template.with_positions(za, zb)?;
            let si = rabi_contributions(&scn, variant)?;
            Ok(RabiRow {
                z_a: scn.z_a,
                z_b: scn.z_b,
                si,
                dimensionless: si.scaled(unit),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dressed::{grad_rabi, Atom, GradientControl};

    const DIP: f64 = 1e-29;

    fn cav(nu: u32) -> PlanarCavity {
        PlanarCavity::new(1e-6, 1e-3, nu).unwrap()
    }

    #[test]
    fn decay_rate_scaling() {
        let g = free_decay_rate(1e15, DIP).unwrap();
        assert!((free_decay_rate(1e15, 2.0 * DIP).unwrap() / g - 4.0).abs() < 1e-14);
        assert!((free_decay_rate(2e15, DIP).unwrap() / g - 8.0).abs() < 1e-14);
        let w: f64 = 1.3e15;
        let lhs = crate::constants::MU_0 * DIP * DIP / (HBAR * PI) * w.powi(3);
        assert!((lhs / (3.0 * C * free_decay_rate(w, DIP).unwrap()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn derived_cavity_numbers() {
        assert!((cavity_mode_width(&cav(1)) / 5.9958e11 - 1.0).abs() < 1e-4);
        assert!((resonance_frequency(&cav(1)) / 9.4175e14 - 1.0).abs() < 1e-4);
        assert_eq!(resonance_frequency(&cav(2)), 2.0 * resonance_frequency(&cav(1)));
    }

    #[test]
    fn antinode_pair() {
        let s = PlanarScenario::resonant(cav(1), 0.5e-6, 0.5e-6, DIP).unwrap();
        let r = rabi_contributions(&s, Variant::Corrected).unwrap();
        let u = s.rabi_unit();
        assert_eq!(r.omega2_a, 1.5 * u);
        assert_eq!(r.omega2_ab, 3.0 * u);
        assert_eq!(r.omega2_total / r.omega2_a, 4.0);
    }

    #[test]
    fn node_atom_is_invisible() {
        let c = cav(2);
        for zb in [0.1e-6, 0.3e-6, 0.77e-6] {
            let s = PlanarScenario::resonant(c, 0.5e-6, zb, DIP).unwrap();
            let r = rabi_contributions(&s, Variant::Corrected).unwrap();
            assert_eq!(r.omega2_ab, 0.0);
            assert_eq!(r.omega2_total, r.omega2_b);
        }
    }

    #[test]
    fn coincident_atoms_double_cross_term() {
        let s = PlanarScenario::resonant(cav(3), 0.23e-6, 0.23e-6, DIP).unwrap();
        let r = rabi_contributions(&s, Variant::Corrected).unwrap();
        assert!((r.omega2_ab - 2.0 * r.omega2_a).abs() <= 1e-15 * r.omega2_ab);
        let p = rabi_contributions(&s, Variant::AsPrinted).unwrap();
        assert!((p.omega2_ab - 2.0 * p.omega2_a).abs() <= 1e-12 * p.omega2_ab.abs());
    }

    #[test]
    fn detuned_scenario_rejected() {
        let s = PlanarScenario::detuned(cav(1), 0.3e-6, 0.5e-6, DIP, 1e10).unwrap();
        assert!(rabi_contributions(&s, Variant::Corrected).is_err());
        assert!(s.delta() > 0.0);
    }

    #[test]
    fn positions_clamped_and_validated() {
        let s = PlanarScenario::resonant(cav(1), 0.0, 1e-6, DIP).unwrap();
        assert_eq!(s.z_a(), PLATE_MARGIN * 1e-6);
        assert_eq!(s.z_b(), (1.0 - PLATE_MARGIN) * 1e-6);
        assert!(PlanarScenario::resonant(cav(1), -1e-9, 0.5e-6, DIP).is_err());
    }

    #[test]
    fn pipeline_agrees_with_closed_form() {
        for &(nu, za, zb) in &[(1, 0.5e-6, 0.5e-6), (2, 0.2e-6, 0.9e-6), (3, 0.41e-6, 0.13e-6)] {
            let s = PlanarScenario::resonant(cav(nu), za, zb, DIP).unwrap();
            let a = rabi_contributions(&s, Variant::Corrected).unwrap();
            let b = rabi_contributions_from_couplings(&s, Variant::Corrected).unwrap();
            let scale = a.omega2_a.abs() + a.omega2_b.abs();
            assert!((a.omega2_total - b.omega2_total).abs() <= 1e-10 * scale);
            assert!((a.omega2_ab - b.omega2_ab).abs() <= 1e-10 * scale);
            let p = rabi_contributions(&s, Variant::AsPrinted).unwrap();
            let q = rabi_contributions_from_couplings(&s, Variant::AsPrinted).unwrap();
            assert!((p.omega2_ab - q.omega2_ab).abs() <= 1e-10 * p.omega2_ab.abs().max(scale));
        }
    }

    #[test]
    fn scan_rows_in_order() {
        let s = PlanarScenario::resonant(cav(1), 0.5e-6, 0.5e-6, DIP).unwrap();
        let grid = uniform_grid(1e-6, 200);
        let rows = scan_rabi(&s, Sweep::Joint, &grid, Variant::Corrected).unwrap();
        assert_eq!(rows.len(), 200);
        let u = s.rabi_unit();
        for (row, &z) in rows.iter().zip(&grid) {
            assert_eq!(row.z_a, z);
            let sz = (PI * z / 1e-6).sin();
            let expected = 1.5 * u * (2.0 * sz).powi(2);
            assert!((row.si.omega2_total - expected).abs() <= 1e-12 * 6.0 * u);
        }
        assert!(scan_rabi(&s, Sweep::Joint, &[], Variant::Corrected).is_err());
    }

    #[test]
    fn gradient_matches_analytic() {
        let s = PlanarScenario::detuned(cav(2), 0.13e-6, 0.37e-6, DIP, 1e11).unwrap();
        let g = grad_rabi(&s, Atom::A, &GradientControl::default()).unwrap();
        let c = s.cavity();
        let k = 2.0 * PI / c.d();
        let sum = c.mode_function(s.z_a()) + c.mode_function(s.z_b());
        let exact = (1.5 * s.rabi_unit()).sqrt() * sum.signum() * k * (k * s.z_a()).cos();
        assert!((g.value.z / exact - 1.0).abs() < 1e-6);
        assert_eq!(g.value.x, 0.0);
    }
}
