//! Principal-value transform `P ∫ f(ω')/(ω' − ω) dω'`.
//!
//! The pole is removed by folding the line about `ω`:
//!
//! ```text
//! P ∫ f(ω')/(ω' − ω) dω' = ∫₀^∞ [f(ω + s) − f(ω − s)] / s ds
//! ```
//!
//! which is the same as subtracting `f(ω)/(ω' − ω)` over every symmetric
//! window `[ω − s, ω + s]`. The folded integrand is finite at `s = 0` for
//! differentiable `f`, so no grid symmetry is needed.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_to_infinity, QuadControl};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real function of angular frequency with the metadata the transform
/// needs: the window holding its mass, how fast it decays outside, where its
/// sharp features sit, and any poles the evaluation point must avoid.
#[derive(Clone)]
pub struct SpectralFunction {
    f: RealFn,
    support: (f64, f64),
    decay_power: f64,
    features: Vec<f64>,
    poles: Vec<f64>,
    exclusion_radius: f64,
}

impl std::fmt::Debug for SpectralFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralFunction")
            .field("support", &self.support)
            .field("decay_power", &self.decay_power)
            .field("features", &self.features)
            .field("poles", &self.poles)
            .field("exclusion_radius", &self.exclusion_radius)
            .finish_non_exhaustive()
    }
}

impl SpectralFunction {
    /// `f` must decay at least as `|ω|^{-1}` outside `[lo, hi]`.
    pub fn new<F>(f: F, lo: f64, hi: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::domain(
                "SpectralFunction::new",
                format!("bad support [{lo}, {hi}]"),
            ));
        }
        Ok(Self {
            f: Arc::new(f),
            support: (lo, hi),
            decay_power: 1.0,
            features: Vec::new(),
            poles: Vec::new(),
            exclusion_radius: 0.0,
        })
    }

    /// Unit-peak Lorentzian `(γ²/4)/((ω − ω_ν)² + γ²/4)`.
    pub fn lorentzian(omega_nu: f64, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::domain("SpectralFunction::lorentzian", "width must be positive"));
        }
        let h2 = 0.25 * gamma * gamma;
        let mut sf = Self::new(
            move |w| h2 / ((w - omega_nu) * (w - omega_nu) + h2),
            omega_nu - 1e4 * gamma,
            omega_nu + 1e4 * gamma,
        )?
        .with_decay_power(2.0)?;
        sf.features.push(omega_nu);
        for m in [0.5, 5.0, 50.0, 500.0] {
            sf.features.push(omega_nu - m * gamma);
            sf.features.push(omega_nu + m * gamma);
        }
        Ok(sf)
    }

    pub fn with_decay_power(mut self, p: f64) -> Result<Self> {
        if !(p > 0.0) {
            return Err(Error::domain("SpectralFunction", "decay power must be positive"));
        }
        self.decay_power = p;
        Ok(self)
    }

    /// Frequencies where `f` varies sharply; used as quadrature breakpoints.
    pub fn with_features(mut self, features: impl IntoIterator<Item = f64>) -> Self {
        self.features.extend(features);
        self
    }

    pub fn with_poles(mut self, poles: impl IntoIterator<Item = f64>, exclusion_radius: f64) -> Self {
        self.poles.extend(poles);
        self.exclusion_radius = exclusion_radius.max(0.0);
        self
    }

    pub fn eval(&self, omega: f64) -> f64 {
        (self.f)(omega)
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn decay_power(&self) -> f64 {
        self.decay_power
    }

    /// `a·f + b·g` with merged support, features and poles.
    pub fn combine(a: f64, f: &Self, b: f64, g: &Self) -> Self {
        let (ff, gf) = (f.f.clone(), g.f.clone());
        let mut features = f.features.clone();
        features.extend(&g.features);
        let mut poles = f.poles.clone();
        poles.extend(&g.poles);
        Self {
            f: Arc::new(move |w| a * ff(w) + b * gf(w)),
            support: (f.support.0.min(g.support.0), f.support.1.max(g.support.1)),
            decay_power: f.decay_power.min(g.decay_power),
            features,
            poles,
            exclusion_radius: f.exclusion_radius.max(g.exclusion_radius),
        }
    }
}

/// `P ∫ f(ω')/(ω' − ω) dω'` over the whole real line. Note there is no
/// `1/π` prefactor.
pub fn kk_real_from_imag(f: &SpectralFunction, omega: f64, quad: &QuadControl) -> Result<f64> {
    const OP: &str = "kk_real_from_imag";
    if !omega.is_finite() {
        return Err(Error::domain(OP, "evaluation frequency must be finite"));
    }
    if let Some(p) = f.poles.iter().find(|&&p| (omega - p).abs() < f.exclusion_radius) {
        return Err(Error::domain(
            OP,
            format!(
                "frequency {omega:e} lies within {:e} of the pole at {p:e}",
                f.exclusion_radius
            ),
        ));
    }
    let (lo, hi) = f.support;
    let window = (omega - lo).abs().max((hi - omega).abs());

    let mut pts = vec![0.0, window];
    pts.extend(
        f.features
            .iter()
            .map(|&x| (x - omega).abs())
            .filter(|&s| s > 0.0 && s < window),
    );
    pts.sort_by(f64::total_cmp);
    pts.dedup();

    // The transform vanishes where f is locally even about ω, so the
    // relative target needs an absolute floor on the scale of f.
    let scale = pts
        .iter()
        .flat_map(|&s| [f.eval(omega + s), f.eval(omega - s)])
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let quad = quad.with_abs_tol(quad.abs_tol.max(quad.rel_tol * scale));
    let quad = &quad;

    let folded = |s: f64| (f.eval(omega + s) - f.eval(omega - s)) / s;
    let inner = integrate(folded, &pts, quad).map_err(|e| e.tagged(OP))?;
    let tail = integrate_to_infinity(folded, window, window, quad).map_err(|e| e.tagged(OP))?;
    Ok(inner.value + tail.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn lorentzian_far_detuned() {
        let (w0, g) = (1.0e3, 1.0e-2);
        let lor = SpectralFunction::lorentzian(w0, g).unwrap();
        let q = QuadControl::default();
        for sign in [-1.0, 1.0] {
            let w = w0 + sign * 1e3 * g;
            let v = kk_real_from_imag(&lor, w, &q).unwrap();
            // exact image: π(γ/2)(ω_ν − ω)/((ω − ω_ν)² + γ²/4)
            let det = w0 - w;
            let exact = PI * 0.5 * g * det / (det * det + 0.25 * g * g);
            assert!((v / exact - 1.0).abs() < 1e-7, "{v} vs {exact}");
            let asymptote = PI * g / (2.0 * det);
            assert!((v / asymptote - 1.0).abs() < 1e-2);
        }
    }

    #[test]
    fn lorentzian_near_and_at_centre() {
        let (w0, g) = (5.0, 0.1);
        let lor = SpectralFunction::lorentzian(w0, g).unwrap();
        let q = QuadControl::default().with_rel_tol(1e-10);
        let v = kk_real_from_imag(&lor, w0, &q).unwrap();
        assert!(v.abs() < 1e-10);
        let w = w0 + 0.3 * g;
        let det = w0 - w;
        let exact = PI * 0.5 * g * det / (det * det + 0.25 * g * g);
        let v = kk_real_from_imag(&lor, w, &q).unwrap();
        assert!((v / exact - 1.0).abs() < 1e-8);
    }

    #[test]
    fn zero_function() {
        let z = SpectralFunction::new(|_| 0.0, -1.0, 1.0).unwrap();
        assert_eq!(kk_real_from_imag(&z, 0.3, &QuadControl::default()).unwrap(), 0.0);
    }

    #[test]
    fn exclusion_radius() {
        let f = SpectralFunction::new(|w| 1.0 / (1.0 + w * w), -10.0, 10.0)
            .unwrap()
            .with_poles([2.0], 0.1);
        assert!(kk_real_from_imag(&f, 2.05, &QuadControl::default()).is_err());
        assert!(kk_real_from_imag(&f, 2.5, &QuadControl::default()).is_ok());
    }

    #[test]
    fn rational_oracle() {
        // f = 1/(1+x²) has Hilbert image P∫ f/(x'−x) = −πx/(1+x²).
        let f = SpectralFunction::new(|w| 1.0 / (1.0 + w * w), -5.0, 5.0)
            .unwrap()
            .with_decay_power(2.0)
            .unwrap();
        for &x in &[-3.0, -0.4, 0.0, 0.7, 12.0] {
            let v = kk_real_from_imag(&f, x, &QuadControl::default().with_rel_tol(1e-11)).unwrap();
            let exact = -PI * x / (1.0 + x * x);
            assert!((v - exact).abs() < 1e-9, "x = {x}: {v} vs {exact}");
        }
    }
}
