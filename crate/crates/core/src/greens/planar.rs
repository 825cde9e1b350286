//! Green's tensor of a symmetric planar cavity.
//!
//! Two identical plates at `z = 0` and `z = d` with reflection coefficients
//! `r_p = −r_s = 1 − δ`. For source and observation points on a common
//! normal (`x = x'`, `y = y'`) the angular part of the `k∥` integral is
//! done analytically, which leaves the tensor diagonal (`xx = yy`, `zz`)
//! and reduces it to one radial integral. With `k⊥ = √(k² − k∥²)`:
//!
//! ```text
//! G_xx = (i/8π) ∫ k∥ dk∥ / k⊥ · F_xx(k⊥)
//! F_xx = s-part + (k⊥²/k²)·p-part
//! σ-part = r²e^{2ik⊥d}/D · 2cos(k⊥(z−z')) ± r_σ/D · (e^{ik⊥(z+z')} + e^{ik⊥(2d−z−z')})
//! D = 1 − r² e^{2ik⊥d}
//! ```
//!
//! The propagating sector is integrated in `k⊥ ∈ [0, k]` (`k∥dk∥/k⊥ = −dk⊥`),
//! the evanescent one in `κ = −ik⊥ ∈ [0, ∞)` (`k∥dk∥/k⊥ = −i dκ`), which
//! removes the inverse-square-root endpoint singularity at `k∥ = k`.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use super::{free_space_green, free_space_im_green_coincident, ComplexDyad, GreenProvider, RealPart, Vec3};
use crate::constants::C;
use crate::error::{Error, Result};
use crate::modecoupling::lorentzian_profile;
use crate::quad::{integrate, integrate_to_infinity, QuadControl};
use crate::Variant;

/// Largest reflectivity deviation for which the plates count as almost
/// perfectly reflecting.
pub const MAX_DELTA: f64 = 0.1;

/// `sin(πx)` with exact zeros at integer `x`.
pub(crate) fn sin_pi(x: f64) -> f64 {
    // Reduce to [-1, 1]; sin(π r) has period 2.
    let r = x - 2.0 * (x / 2.0).round();
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    let folded = if r > 0.5 {
        1.0 - r
    } else if r < -0.5 {
        -1.0 - r
    } else {
        r
    };
    (PI * folded).sin()
}

/// A symmetric planar cavity: plate separation, reflectivity deviation and
/// the index of the mode of interest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanarCavity {
    d: f64,
    delta: f64,
    nu: u32,
}

impl PlanarCavity {
    pub fn new(d: f64, delta: f64, nu: u32) -> Result<Self> {
        const OP: &str = "PlanarCavity::new";
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::domain(OP, format!("plate separation must be positive, got {d}")));
        }
        if !(delta > 0.0 && delta < MAX_DELTA) {
            return Err(Error::domain(
                OP,
                format!("reflectivity deviation must lie in (0, {MAX_DELTA}), got {delta}"),
            ));
        }
        if nu == 0 {
            return Err(Error::domain(OP, "mode index must be at least 1"));
        }
        Ok(Self { d, delta, nu })
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    pub fn reflectivity_p(&self) -> f64 {
        1.0 - self.delta
    }

    pub fn reflectivity_s(&self) -> f64 {
        -(1.0 - self.delta)
    }

    /// `ω_ν = νπc/d`
    pub fn resonance_frequency(&self) -> f64 {
        self.nu as f64 * PI * C / self.d
    }

    /// `γ_ν = 2cδ/d`
    pub fn mode_width(&self) -> f64 {
        2.0 * C * self.delta / self.d
    }

    /// `sin(νπz/d)`, exactly zero at the nodes and on the plates.
    pub fn mode_function(&self, z: f64) -> f64 {
        sin_pi(self.nu as f64 * z / self.d)
    }

    /// Positions of the interior nodes `m·d/ν`, `0 < m < ν`.
    pub fn interior_nodes(&self) -> Vec<f64> {
        (1..self.nu).map(|m| m as f64 * self.d / self.nu as f64).collect()
    }

    fn check_inside(&self, op: &'static str, z: f64) -> Result<()> {
        if z > 0.0 && z < self.d {
            Ok(())
        } else {
            Err(Error::domain(
                op,
                format!("position z = {z} outside the open gap (0, {})", self.d),
            ))
        }
    }
}

/// Two plates with `r_p = −r_s = r`. Unlike [`PlanarCavity`] any `|r| < 1`
/// is accepted, including `r = 0` (no plates).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirrorPair {
    pub d: f64,
    pub r_p: f64,
}

impl MirrorPair {
    pub fn new(d: f64, r_p: f64) -> Result<Self> {
        if !(d > 0.0) || !(r_p.abs() < 1.0) {
            return Err(Error::domain(
                "MirrorPair::new",
                format!("need d > 0 and |r| < 1, got d = {d}, r = {r_p}"),
            ));
        }
        Ok(Self { d, r_p })
    }

    /// Half-width in `k⊥` of the Fabry-Perot resonances of `1/D`.
    fn resonance_half_width(&self) -> Option<f64> {
        let rho2 = self.r_p * self.r_p;
        (rho2 > 0.0).then(|| (1.0 - rho2) / (2.0 * rho2 * self.d))
    }

    /// The round-trip term `r²e^{2ik⊥d}·2cos(k⊥(z−z'))/D` and the
    /// single-bounce sum `(e^{ik⊥(z+z')} + e^{ik⊥(2d−z−z')})/D`, written with
    /// exponents that all decay for imaginary `k⊥`.
    fn braces(&self, k_perp: Complex64, z: f64, zp: f64) -> (Complex64, Complex64) {
        let i = Complex64::i();
        let r2 = self.r_p * self.r_p;
        let d = self.d;
        let dz = (z - zp).abs();
        let denom = 1.0 - r2 * (2.0 * i * k_perp * d).exp();
        let direct = r2 * ((i * k_perp * (2.0 * d + dz)).exp() + (i * k_perp * (2.0 * d - dz)).exp()) / denom;
        let bounced = ((i * k_perp * (z + zp)).exp() + (i * k_perp * (2.0 * d - z - zp)).exp()) / denom;
        (direct, bounced)
    }

    /// Integrand brace for the `xx` component at complex `k⊥`.
    pub fn integrand_xx(&self, k: f64, k_perp: Complex64, z: f64, zp: f64) -> Complex64 {
        let r = self.r_p;
        let r_s = -r;
        let (direct, bounced) = self.braces(k_perp, z, zp);
        let s_part = direct + r_s * bounced;
        let p_part = direct - r * bounced;
        s_part + k_perp * k_perp / (k * k) * p_part
    }

    /// Integrand brace for the `zz` component (p waves only), without the
    /// `k∥²/k²` weight.
    fn integrand_zz(&self, k_perp: Complex64, z: f64, zp: f64) -> Complex64 {
        let (direct, bounced) = self.braces(k_perp, z, zp);
        direct + self.r_p * bounced
    }

    fn propagating_breakpoints(&self, k: f64) -> Vec<f64> {
        let mut pts = vec![0.0, k];
        if let Some(w) = self.resonance_half_width() {
            let step = PI / self.d;
            let mut n = 0u32;
            loop {
                let centre = n as f64 * step;
                if centre > k + 100.0 * w {
                    break;
                }
                pts.push(centre);
                for m in [1.0, 10.0, 100.0] {
                    pts.push(centre - m * w);
                    pts.push(centre + m * w);
                }
                n += 1;
            }
            // k∥ → 0 end of the propagating sector.
            for m in [1.0, 10.0, 100.0] {
                pts.push(k - m * w);
            }
        }
        pts.retain(|&x| x >= 0.0 && x <= k);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Shortest decay length of the evanescent integrand.
    fn evanescent_length(&self, z: f64, zp: f64) -> f64 {
        (z + zp).min(2.0 * self.d - z - zp).min(2.0 * self.d - (z - zp).abs())
    }

    fn evanescent_head(&self, z: f64, zp: f64) -> (f64, f64, Vec<f64>) {
        let decay = 1.0 / self.evanescent_length(z, zp);
        let head = 4.0 * decay;
        let mut pts = vec![0.0, head];
        if let Some(w) = self.resonance_half_width() {
            for m in [1.0, 10.0, 100.0] {
                if m * w < head {
                    pts.push(m * w);
                }
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        (head, decay, pts)
    }

    /// Scattering part of the on-axis tensor.
    pub fn scattering_green(&self, z: f64, zp: f64, omega: f64, quad: &QuadControl) -> Result<ComplexDyad> {
        const OP: &str = "planar_cavity_green";
        if !(omega > 0.0) {
            return Err(Error::domain(OP, "frequency must be positive"));
        }
        let k = omega / C;
        let i = Complex64::i();
        let prop_pts = self.propagating_breakpoints(k);
        let (head, decay, ev_pts) = self.evanescent_head(z, zp);
        // Past this κ every term is below the smallest double.
        let cutoff = 800.0 * decay;

        let xx_prop = integrate(|q| self.integrand_xx(k, Complex64::new(q, 0.0), z, zp), &prop_pts, quad)
            .map_err(|e| e.tagged(OP))?;
        let ev_xx = |kap: f64| {
            if kap > cutoff {
                Complex64::new(0.0, 0.0)
            } else {
                self.integrand_xx(k, Complex64::new(0.0, kap), z, zp)
            }
        };
        let xx_ev_head = integrate(ev_xx, &ev_pts, quad).map_err(|e| e.tagged(OP))?;
        let xx_ev_tail = integrate_to_infinity(ev_xx, head, decay, quad).map_err(|e| e.tagged(OP))?;
        let xx = i / (8.0 * PI) * (xx_prop.value - i * (xx_ev_head.value + xx_ev_tail.value));

        let kk = k * k;
        let zz_prop = integrate(
            |q| (1.0 - q * q / kk) * self.integrand_zz(Complex64::new(q, 0.0), z, zp),
            &prop_pts,
            quad,
        )
        .map_err(|e| e.tagged(OP))?;
        let ev = |kap: f64| {
            if kap > cutoff {
                Complex64::new(0.0, 0.0)
            } else {
                (1.0 + kap * kap / kk) * self.integrand_zz(Complex64::new(0.0, kap), z, zp)
            }
        };
        let zz_ev_head = integrate(ev, &ev_pts, quad).map_err(|e| e.tagged(OP))?;
        let zz_ev_tail = integrate_to_infinity(ev, head, decay, quad).map_err(|e| e.tagged(OP))?;
        let zz = i / (4.0 * PI) * (zz_prop.value - i * (zz_ev_head.value + zz_ev_tail.value));

        Ok(ComplexDyad::diagonal(xx, xx, zz, RealPart::Finite))
    }

    /// Bulk plus scattering part. At coincident points the divergent bulk
    /// real part is excluded and only the scattering real part is kept.
    pub fn green(&self, z: f64, zp: f64, omega: f64, quad: &QuadControl) -> Result<ComplexDyad> {
        let k = omega / C;
        let scattering = self.scattering_green(z, zp, omega, quad)?;
        if z == zp {
            let bulk = free_space_im_green_coincident(k);
            Ok(bulk.plus(&scattering).with_real_part(RealPart::ScatteringOnly))
        } else {
            let bulk = free_space_green(k, &Vec3::new(0.0, 0.0, zp - z))?;
            Ok(bulk.plus(&scattering))
        }
    }
}

impl From<&PlanarCavity> for MirrorPair {
    fn from(cav: &PlanarCavity) -> Self {
        MirrorPair {
            d: cav.d,
            r_p: cav.reflectivity_p(),
        }
    }
}

/// Full on-axis planar-cavity Green's tensor by `k∥` quadrature.
pub fn planar_cavity_green(cav: &PlanarCavity, z: f64, zp: f64, omega: f64, quad: &QuadControl) -> Result<ComplexDyad> {
    const OP: &str = "planar_cavity_green";
    cav.check_inside(OP, z)?;
    cav.check_inside(OP, zp)?;
    MirrorPair::from(cav).green(z, zp, omega, quad)
}

/// Frequency window, in linewidths around `ω_ν`, in which the single-mode
/// Lorentzian reduction is trusted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct SingleModeWindow {
    pub linewidths: f64,
}

impl Default for SingleModeWindow {
    fn default() -> Self {
        Self { linewidths: 1e3 }
    }
}

impl SingleModeWindow {
    fn check(&self, op: &'static str, cav: &PlanarCavity, omega: f64) -> Result<()> {
        let off = (omega - cav.resonance_frequency()).abs();
        if off <= self.linewidths * cav.mode_width() {
            Ok(())
        } else {
            Err(Error::domain(
                op,
                format!(
                    "frequency {omega:e} is {:.3e} linewidths from the mode, outside the single-mode window of {}",
                    off / cav.mode_width(),
                    self.linewidths
                ),
            ))
        }
    }
}

/// Four-cosine bracket exactly as printed in the source derivation, which
/// at `z_A = z_B` collapses to the constant −2.
fn printed_bracket(cav: &PlanarCavity, z_a: f64, z_b: f64) -> f64 {
    let k = cav.resonance_frequency() / C;
    let d = cav.d;
    (k * (2.0 * d - z_a - z_b)).cos()
        - (k * (2.0 * d + z_a - z_b)).cos()
        - (k * (2.0 * d - z_a + z_b)).cos()
        - (k * (z_a + z_b)).cos()
}

/// Peak value at `ω_ν` of `ω_ν²·Im G_xx(z_A, z_B)`, (rad/s)²/m.
pub(crate) fn resonant_peak(cav: &PlanarCavity, z_a: f64, z_b: f64, variant: Variant) -> f64 {
    let w = cav.resonance_frequency();
    match variant {
        Variant::Corrected => w.powi(3) / (4.0 * PI * C * cav.delta) * cav.mode_function(z_a) * cav.mode_function(z_b),
        Variant::AsPrinted => -w.powi(3) / (16.0 * PI * C * cav.delta) * printed_bracket(cav, z_a, z_b),
    }
}

/// Resonant closed form of `ω²·Im G_xx(z_A, z_B, ω)` in the single-mode
/// reduction: the mode-product peak `ω_ν³/(4πcδ)·sin(νπz_A/d)·sin(νπz_B/d)`
/// times the Lorentzian of width `2cδ/d`.
pub fn planar_resonant_im_gxx(
    cav: &PlanarCavity,
    z_a: f64,
    z_b: f64,
    omega: f64,
    window: &SingleModeWindow,
    variant: Variant,
) -> Result<f64> {
    const OP: &str = "planar_resonant_im_gxx";
    for z in [z_a, z_b] {
        if !(z >= 0.0 && z <= cav.d) {
            return Err(Error::domain(OP, format!("position z = {z} outside [0, {}]", cav.d)));
        }
    }
    window.check(OP, cav, omega)?;
    let peak = resonant_peak(cav, z_a, z_b, variant);
    Ok(lorentzian_profile(
        peak,
        cav.resonance_frequency(),
        cav.mode_width(),
        omega,
    ))
}

fn on_axis(op: &'static str, r1: &Vec3, r2: &Vec3) -> Result<()> {
    if r1.x == r2.x && r1.y == r2.y {
        Ok(())
    } else {
        Err(Error::domain(op, "points must share a cavity normal (equal x and y)"))
    }
}

/// [`GreenProvider`] backed by the full quadrature.
#[derive(Debug, Clone, Copy)]
pub struct PlanarGreen {
    pub cavity: PlanarCavity,
    pub quad: QuadControl,
}

impl GreenProvider for PlanarGreen {
    fn green(&self, r1: &Vec3, r2: &Vec3, omega: f64) -> Result<ComplexDyad> {
        on_axis("planar_cavity_green", r1, r2)?;
        planar_cavity_green(&self.cavity, r1.z, r2.z, omega, &self.quad)
    }
}

/// [`GreenProvider`] for the single resonant mode. `Im G_xx = Im G_yy`
/// follow [`planar_resonant_im_gxx`]; the `zz` component of the normal
/// incidence mode vanishes. The real part is the principal-value image of
/// the Lorentzian, `peak·(γ/2)(ω_ν − ω)/((ω − ω_ν)² + γ²/4)`, which tends
/// to `peak·γ/(2(ω_ν − ω))` away from resonance.
#[derive(Debug, Clone, Copy)]
pub struct ResonantPlanarGreen {
    pub cavity: PlanarCavity,
    pub window: SingleModeWindow,
    pub variant: Variant,
}

impl ResonantPlanarGreen {
    pub fn new(cavity: PlanarCavity) -> Self {
        Self {
            cavity,
            window: SingleModeWindow::default(),
            variant: Variant::Corrected,
        }
    }
}

impl GreenProvider for ResonantPlanarGreen {
    fn green(&self, r1: &Vec3, r2: &Vec3, omega: f64) -> Result<ComplexDyad> {
        const OP: &str = "planar_resonant_im_gxx";
        on_axis(OP, r1, r2)?;
        let cav = &self.cavity;
        let im_w2 = planar_resonant_im_gxx(cav, r1.z, r2.z, omega, &self.window, self.variant)?;
        let peak = resonant_peak(cav, r1.z, r2.z, self.variant);
        let half = 0.5 * cav.mode_width();
        let det = cav.resonance_frequency() - omega;
        let re_w2 = peak * half * det / (det * det + half * half);
        let w2 = omega * omega;
        let xx = Complex64::new(re_w2 / w2, im_w2 / w2);
        Ok(ComplexDyad::diagonal(
            xx,
            xx,
            Complex64::new(0.0, 0.0),
            RealPart::Finite,
        ))
    }
}
