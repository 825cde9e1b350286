//! Dyadic Green's tensors.
//!
//! Free space is evaluated in closed form. The planar cavity is evaluated
//! either by radial `k∥` quadrature ([`planar`]) or through its resonant
//! single-mode closed form. [`kk`] holds the principal-value transform that
//! links the real and imaginary parts.
//!
//! All tensors are in the normalization where
//! `∇×∇×G − k²G = δ(r − r')`, so entries carry units of 1/m.

pub mod kk;
pub mod planar;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::constants::C;
use crate::error::{Error, Result};

pub use kk::{kk_real_from_imag, SpectralFunction};
pub use planar::{
    planar_cavity_green, planar_resonant_im_gxx, MirrorPair, PlanarCavity, PlanarGreen, ResonantPlanarGreen,
    SingleModeWindow,
};

pub type Vec3 = Vector3<f64>;

/// What the real part of a [`ComplexDyad`] contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RealPart {
    /// The full real part.
    Finite,
    /// Coincident points in a body-assisted geometry: only the finite
    /// scattering part; the divergent bulk self-term is excluded.
    ScatteringOnly,
    /// Divergent and excluded; stored as zero.
    Excluded,
}

/// A 3×3 complex tensor with metadata on the validity of its real part.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexDyad {
    entries: Matrix3<Complex64>,
    real_part: RealPart,
}

impl ComplexDyad {
    pub fn new(entries: Matrix3<Complex64>, real_part: RealPart) -> Self {
        Self { entries, real_part }
    }

    pub fn zeros() -> Self {
        Self::new(Matrix3::zeros(), RealPart::Finite)
    }

    pub fn diagonal(xx: Complex64, yy: Complex64, zz: Complex64, real_part: RealPart) -> Self {
        let mut m = Matrix3::zeros();
        m[(0, 0)] = xx;
        m[(1, 1)] = yy;
        m[(2, 2)] = zz;
        Self::new(m, real_part)
    }

    pub fn entry(&self, alpha: usize, beta: usize) -> Complex64 {
        self.entries[(alpha, beta)]
    }

    pub fn entries(&self) -> &Matrix3<Complex64> {
        &self.entries
    }

    pub fn real_part(&self) -> RealPart {
        self.real_part
    }

    pub fn re(&self) -> Matrix3<f64> {
        self.entries.map(|z| z.re)
    }

    pub fn im(&self) -> Matrix3<f64> {
        self.entries.map(|z| z.im)
    }

    /// `d1 · Im G · d2`
    pub fn contract_im(&self, d1: &Vec3, d2: &Vec3) -> f64 {
        d1.dot(&(self.im() * d2))
    }

    /// `d1 · Re G · d2`; `None` when the real part was excluded as divergent.
    pub fn contract_re(&self, d1: &Vec3, d2: &Vec3) -> Option<f64> {
        match self.real_part {
            RealPart::Excluded => None,
            _ => Some(d1.dot(&(self.re() * d2))),
        }
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..3 {
            for b in 0..3 {
                worst = worst.max((self.entries[(a, b)] - self.entries[(b, a)]).norm());
            }
        }
        worst
    }

    /// Sum of two tensors; the result keeps the weaker real-part status.
    pub fn plus(&self, other: &ComplexDyad) -> ComplexDyad {
        let real_part = match (self.real_part, other.real_part) {
            (RealPart::Excluded, _) | (_, RealPart::Excluded) => RealPart::Excluded,
            (RealPart::ScatteringOnly, _) | (_, RealPart::ScatteringOnly) => RealPart::ScatteringOnly,
            _ => RealPart::Finite,
        };
        ComplexDyad::new(self.entries + other.entries, real_part)
    }

    pub(crate) fn with_real_part(mut self, real_part: RealPart) -> Self {
        self.real_part = real_part;
        self
    }
}

/// Anything that can evaluate `G(r1, r2, ω)`.
pub trait GreenProvider: Sync {
    fn green(&self, r1: &Vec3, r2: &Vec3, omega: f64) -> Result<ComplexDyad>;
}

/// Free-space Green's tensor for wavenumber `k` and displacement `r = r2 − r1`.
pub fn free_space_green(k: f64, r: &Vec3) -> Result<ComplexDyad> {
    const OP: &str = "free_space_green";
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::domain(OP, format!("wavenumber must be positive, got {k}")));
    }
    let dist = r.norm();
    if !(dist > 0.0) || !dist.is_finite() {
        return Err(Error::domain(
            OP,
            "zero displacement; use free_space_im_green_coincident for r -> 0",
        ));
    }
    let e = r / dist;
    let kr = k * dist;
    let ikr = Complex64::new(0.0, kr);
    let kr2 = kr * kr;
    let pref = ikr.exp() / (4.0 * PI * dist);
    let a = Complex64::new(1.0, 0.0) + (ikr - 1.0) / kr2;
    let b = Complex64::new(-1.0, 0.0) + (3.0 - 3.0 * ikr) / kr2;

    let mut m = Matrix3::zeros();
    for alpha in 0..3 {
        for beta in 0..3 {
            let delta = if alpha == beta { 1.0 } else { 0.0 };
            m[(alpha, beta)] = pref * (a * delta + b * (e[alpha] * e[beta]));
        }
    }
    Ok(ComplexDyad::new(m, RealPart::Finite))
}

/// The `r → 0` limit of free-space `Im G`, which is `(k/6π)·I`.
/// The real part diverges and is returned as zero, flagged
/// [`RealPart::Excluded`].
pub fn free_space_im_green_coincident(k: f64) -> ComplexDyad {
    let v = Complex64::new(0.0, k / (6.0 * PI));
    ComplexDyad::diagonal(v, v, v, RealPart::Excluded)
}

/// Homogeneous vacuum.
#[derive(Debug, Clone, Copy, Default)]
pub struct FreeSpace;

impl GreenProvider for FreeSpace {
    fn green(&self, r1: &Vec3, r2: &Vec3, omega: f64) -> Result<ComplexDyad> {
        let k = omega / C;
        let r = r2 - r1;
        if r.norm() == 0.0 {
            if !(k > 0.0) {
                return Err(Error::domain("free_space_green", "frequency must be positive"));
            }
            return Ok(free_space_im_green_coincident(k));
        }
        free_space_green(k, &r)
    }
}
