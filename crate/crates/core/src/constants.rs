//! Physical constants (SI, CODATA 2018).
//!
//! The vacuum permittivity is derived from the permeability and the speed of
//! light so that `EPSILON_0 * MU_0 * C * C == 1` up to rounding. Several
//! closed forms (decay rate vs. coupling strength) rely on that identity.

/// Speed of light in vacuum, m/s (exact).
pub const C: f64 = 299_792_458.0;

/// Reduced Planck constant, J·s (exact).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Vacuum magnetic permeability, N/A².
pub const MU_0: f64 = 1.256_637_062_12e-6;

/// Vacuum electric permittivity, F/m.
pub const EPSILON_0: f64 = 1.0 / (MU_0 * C * C);

/// Name/value pairs, in a fixed order, for run manifests.
pub fn table() -> [(&'static str, f64); 4] {
    [("c", C), ("hbar", HBAR), ("epsilon_0", EPSILON_0), ("mu_0", MU_0)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permittivity_matches_codata() {
        assert!((EPSILON_0 / 8.854_187_812_8e-12 - 1.0).abs() < 1e-10);
        assert!((EPSILON_0 * MU_0 * C * C - 1.0).abs() < 1e-15);
    }
}
