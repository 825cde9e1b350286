//! Seeded cross-validation suite. Each check compares a library result with
//! an independent route to the same quantity and reports the largest error
//! over its samples.

use std::f64::consts::PI;

use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::RunConfig;
use super::run::weak_partner_shift;
use super::run::{gradient_control, quad_control};
use super::table::Table;
use crate::constants::{EPSILON_0, HBAR};
use crate::dressed::{
    eigenenergies, force_theta, grad_rabi, hamiltonian_matrix, potential_theta, Atom, DressedSystem, RabiLandscape,
    SuperpositionAngle,
};
use crate::error::Result;
use crate::greens::{kk_real_from_imag, FreeSpace, PlanarCavity, SpectralFunction, Vec3};
use crate::modecoupling::{AtomPair, AtomSpec};
use crate::numdiff::central_richardson;
use crate::planarcavity::{rabi_contributions, rabi_contributions_from_couplings, PlanarScenario};
use crate::weakfield::{
    free_space_resonant_potential, narrow_mode_real_contraction, resonant_potential, weak_theta_force,
    weak_theta_potential,
};
use crate::Variant;

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub check: &'static str,
    pub samples: usize,
    pub max_error: f64,
    pub tolerance: f64,
}

impl CheckRow {
    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

struct Acc {
    check: &'static str,
    samples: usize,
    max_error: f64,
    tolerance: f64,
}

impl Acc {
    fn new(check: &'static str, tolerance: f64) -> Self {
        Self {
            check,
            samples: 0,
            max_error: 0.0,
            tolerance,
        }
    }

    fn add(&mut self, err: f64) {
        self.samples += 1;
        // NaN must register as a failure
        if !(err <= self.max_error) {
            self.max_error = if err.is_nan() { f64::INFINITY } else { err };
        }
    }

    fn finish(self) -> CheckRow {
        CheckRow {
            check: self.check,
            samples: self.samples,
            max_error: self.max_error,
            tolerance: self.tolerance,
        }
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn unit_vector(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

/// A random planar scenario away from the plates, with the Rabi frequency
/// not close to a zero of `s_A + s_B`.
fn random_scenario(rng: &mut ChaCha8Rng, detuned: bool) -> Result<PlanarScenario> {
    loop {
        let cav = PlanarCavity::new(
            log_uniform(rng, 5e-7, 5e-6),
            log_uniform(rng, 1e-4, 1e-2),
            rng.gen_range(1..=3),
        )?;
        let d = cav.d();
        let (za, zb) = (rng.gen_range(0.02 * d..0.98 * d), rng.gen_range(0.02 * d..0.98 * d));
        let sum = cav.mode_function(za) + cav.mode_function(zb);
        if sum.abs() < 1e-2 {
            continue;
        }
        let dip = log_uniform(rng, 3e-30, 3e-29);
        let scn = PlanarScenario::resonant(cav, za, zb, dip)?;
        if !detuned {
            return Ok(scn);
        }
        let f = scn.rabi_unit().sqrt();
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let delta = sign * log_uniform(rng, 0.1, 10.0) * f;
        return PlanarScenario::detuned(cav, za, zb, dip, delta);
    }
}

/// `∂f/∂z` of the moving atom by Richardson-extrapolated central differences.
fn fd_z(scn: &PlanarScenario, atom: Atom, f: impl Fn(&PlanarScenario) -> Result<f64>) -> Result<f64> {
    let h = 1e-3 * scn.cavity().d() / scn.cavity().nu() as f64;
    let z0 = match atom {
        Atom::A => scn.z_a(),
        Atom::B => scn.z_b(),
    };
    let mut failure = None;
    let d = central_richardson(
        |z| {
            let moved = match atom {
                Atom::A => scn.with_positions(z, scn.z_b()),
                Atom::B => scn.with_positions(scn.z_a(), z),
            };
            match moved.and_then(|s| f(&s)) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        z0,
        h,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(d.value),
    }
}

fn rabi(scn: &PlanarScenario) -> Result<f64> {
    let (a, b) = scn.positions();
    scn.rabi_at(&a, &b)
}

fn check_free_space(rng: &mut ChaCha8Rng, n: usize) -> Result<CheckRow> {
    let mut acc = Acc::new("free_space_equivalence", 1e-12);
    for _ in 0..n {
        let k = log_uniform(rng, 1e5, 1e8);
        let r = unit_vector(rng) * (log_uniform(rng, 0.05, 20.0) / k);
        let da = unit_vector(rng) * log_uniform(rng, 1e-30, 1e-28);
        let db = da * rng.gen_range(0.5..2.0);
        let w = k * crate::constants::C;
        let a = AtomSpec::new(Vec3::zeros(), w, da)?;
        let b = AtomSpec::new(r, w, db)?;
        let pipeline = resonant_potential(&AtomPair::new(a, b)?, &FreeSpace)?.interaction;
        let closed = free_space_resonant_potential(&da, &db, k, &r)?;
        // relative to the size of the largest term, since the sum can cancel
        let dist = r.norm();
        let scale =
            da.norm() * db.norm() * (k * k / dist + k / (dist * dist) + 1.0 / dist.powi(3)) / (4.0 * PI * EPSILON_0);
        acc.add((pipeline - closed).abs() / scale);
    }
    Ok(acc.finish())
}

fn check_forces(rng: &mut ChaCha8Rng, n: usize, cfg: &RunConfig) -> Result<[CheckRow; 2]> {
    let ctl = gradient_control(cfg);
    let mut grad = Acc::new("force_theta_vs_gradient", cfg.tolerances.gradient_rel);
    let mut printed = Acc::new("force_theta_as_printed_factor", 1e-12);
    for _ in 0..n {
        let scn = random_scenario(rng, true)?;
        let theta = SuperpositionAngle::new(rng.gen_range(0.0..PI))?;
        let atom = if rng.gen_bool(0.5) { Atom::A } else { Atom::B };
        let f = force_theta(&scn, theta, atom, Variant::Corrected, &ctl)?.z;
        let du = fd_z(&scn, atom, |s| Ok(potential_theta(theta, &s.dressed_system()?)))?;
        let omega_r = rabi(&scn)?;
        let scale = (0.5 * HBAR * omega_r / scn.cavity().d()).max(du.abs());
        grad.add((f + du).abs() / scale);

        let fp = force_theta(&scn, theta, atom, Variant::AsPrinted, &ctl)?.z;
        let s2c = scn.dressed_system()?.sin_2theta_c();
        if f != 0.0 {
            printed.add((fp * s2c / f - 1.0).abs());
        }
    }
    Ok([grad.finish(), printed.finish()])
}

fn check_strong_weak(rng: &mut ChaCha8Rng, n: usize) -> Result<CheckRow> {
    let mut acc = Acc::new("strong_to_weak_limit", 1e-5);
    for _ in 0..n {
        let scn = random_scenario(rng, false)?;
        let omega_r = rabi(&scn)?;
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let delta = sign * 1e3 * omega_r;
        let dressed = weak_partner_shift(omega_r, scn.reference_rabi(), delta);
        let weak = -HBAR * omega_r * omega_r / (4.0 * delta);
        acc.add(((dressed - weak) / weak).abs());
    }
    Ok(acc.finish())
}

fn check_kk(rng: &mut ChaCha8Rng, n: usize, cfg: &RunConfig) -> Result<[CheckRow; 2]> {
    let quad = quad_control(cfg);
    let mut narrow = Acc::new("kk_narrow_mode", 1e-2);
    let mut exact = Acc::new("kk_exact_image", 1e-6);
    // the transform costs a few thousand evaluations, keep the count modest
    for _ in 0..n.min(50) {
        let w0 = log_uniform(rng, 1e13, 1e16);
        let gamma = w0 * log_uniform(rng, 1e-7, 1e-3);
        let off = if rng.gen_bool(0.5) { 1e3 } else { -1e3 };
        let w = w0 + off * gamma;
        let lor = SpectralFunction::lorentzian(w0, gamma)?;
        let pv = kk_real_from_imag(&lor, w, &quad)? / PI;
        let nm = narrow_mode_real_contraction(1.0, gamma, w0, w)?;
        narrow.add(((pv - nm) / nm).abs());
        let det = w0 - w;
        let ex = 0.5 * gamma * det / (det * det + 0.25 * gamma * gamma);
        exact.add(((pv - ex) / ex).abs());
    }
    Ok([narrow.finish(), exact.finish()])
}

fn check_eigen(rng: &mut ChaCha8Rng, n: usize) -> Result<CheckRow> {
    let mut acc = Acc::new("eigen_solver", 1e-12);
    for _ in 0..n {
        let scale = log_uniform(rng, 1e3, 1e12);
        let omega_r = scale * log_uniform(rng, 1e-3, 1e3);
        let delta = scale * rng.gen_range(-1e3..1e3);
        let (ep, em) = eigenenergies(omega_r, delta)?;
        let sys = DressedSystem::new(omega_r, delta)?;
        let eig = SymmetricEigen::new(hamiltonian_matrix(&sys)).eigenvalues;
        let (lo, hi) = (eig[0].min(eig[1]), eig[0].max(eig[1]));
        let norm = lo.abs().max(hi.abs());
        let err = (ep / HBAR - hi).abs().max((em / HBAR - lo).abs());
        acc.add(err / norm);
    }
    Ok(acc.finish())
}

fn check_pipeline(rng: &mut ChaCha8Rng, n: usize, variant: Variant) -> Result<CheckRow> {
    let mut acc = Acc::new("rabi_pipeline_equality", 1e-12);
    for _ in 0..n {
        let scn = random_scenario(rng, false)?;
        let closed = rabi_contributions(&scn, variant)?;
        let piped = rabi_contributions_from_couplings(&scn, variant)?;
        let u = scn.rabi_unit();
        for (x, y) in [
            (closed.omega2_a, piped.omega2_a),
            (closed.omega2_b, piped.omega2_b),
            (closed.omega2_ab, piped.omega2_ab),
            (closed.omega2_total, piped.omega2_total),
        ] {
            acc.add((x - y).abs() / u);
        }
    }
    Ok(acc.finish())
}

fn check_weak_force(rng: &mut ChaCha8Rng, n: usize, cfg: &RunConfig) -> Result<CheckRow> {
    let ctl = gradient_control(cfg);
    let mut acc = Acc::new("weak_theta_force_vs_gradient", cfg.tolerances.gradient_rel);
    for _ in 0..n {
        let scn = random_scenario(rng, true)?;
        let theta = rng.gen_range(0.0..PI);
        let atom = if rng.gen_bool(0.5) { Atom::A } else { Atom::B };
        let delta = scn.delta();
        let omega_r = rabi(&scn)?;
        let g = grad_rabi(&scn, atom, &ctl)?.value;
        let f = weak_theta_force(theta, omega_r, &g, delta)?.z;
        let du = fd_z(&scn, atom, |s| weak_theta_potential(theta, rabi(s)?, delta))?;
        let scale = (HBAR * omega_r * omega_r / (2.0 * delta.abs() * scn.cavity().d())).max(du.abs());
        acc.add((f + du).abs() / scale);
    }
    Ok(acc.finish())
}

/// `∇Ω = sin 2θ_c·∇Ω_R` and `∇θ_c = cos 2θ_c·∇Ω_R/(2Ω)`.
fn check_identities(rng: &mut ChaCha8Rng, n: usize, cfg: &RunConfig) -> Result<CheckRow> {
    let ctl = gradient_control(cfg);
    let mut acc = Acc::new("gradient_identities", cfg.tolerances.gradient_rel);
    for _ in 0..n {
        let scn = random_scenario(rng, true)?;
        let atom = if rng.gen_bool(0.5) { Atom::A } else { Atom::B };
        let sys = scn.dressed_system()?;
        let g = grad_rabi(&scn, atom, &ctl)?.value.z;
        let d_omega = fd_z(&scn, atom, |s| Ok(s.dressed_system()?.generalized_rabi()))?;
        let d_theta = fd_z(&scn, atom, |s| Ok(s.dressed_system()?.coupling_angle()))?;
        let scale = g.abs().max(sys.rabi() / scn.cavity().d());
        acc.add((d_omega - sys.sin_2theta_c() * g).abs() / scale);
        let scale_theta = scale / (2.0 * sys.generalized_rabi());
        acc.add((d_theta - sys.cos_2theta_c() * g / (2.0 * sys.generalized_rabi())).abs() / scale_theta);
    }
    Ok(acc.finish())
}

/// Every check, in a fixed order.
pub fn all_checks(cfg: &RunConfig) -> Result<Vec<CheckRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.xcheck.seed);
    let n = cfg.xcheck.samples;
    let mut rows = vec![check_free_space(&mut rng, n)?];
    rows.extend(check_forces(&mut rng, n, cfg)?);
    rows.push(check_strong_weak(&mut rng, n)?);
    rows.extend(check_kk(&mut rng, n, cfg)?);
    rows.push(check_eigen(&mut rng, n)?);
    rows.push(check_pipeline(&mut rng, n, Variant::Corrected)?);
    rows.push(check_weak_force(&mut rng, n, cfg)?);
    rows.push(check_identities(&mut rng, n, cfg)?);
    Ok(rows)
}

/// The report table and the number of failed checks.
pub fn run_checks(cfg: &RunConfig) -> Result<(Table, usize)> {
    let rows = all_checks(cfg)?;
    let mut t = Table::new(["check", "samples", "max_error", "tolerance", "passed"]);
    let mut failed = 0;
    for r in &rows {
        if !r.passed() {
            failed += 1;
            log::warn!("{} failed: {:e} > {:e}", r.check, r.max_error, r.tolerance);
        }
        t.push(vec![
            r.check.into(),
            r.samples.into(),
            r.max_error.into(),
            r.tolerance.into(),
            r.passed().into(),
        ]);
    }
    Ok((t, failed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let cfg = RunConfig::default_config().unwrap();
        for r in all_checks(&cfg).unwrap() {
            assert!(r.passed(), "{r:?}");
            assert!(r.samples > 0);
        }
    }

    #[test]
    fn nan_counts_as_failure() {
        let mut acc = Acc::new("x", 1.0);
        acc.add(0.5);
        acc.add(f64::NAN);
        assert!(!acc.finish().passed());
    }
}
