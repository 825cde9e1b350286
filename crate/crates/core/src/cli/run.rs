use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::{Mode, RunConfig, ScenarioKind, Source, SweepKind};
use super::table::{write_file, Cell, Format, Table};
use super::xcheck;
use crate::constants::{self, EPSILON_0, HBAR};
use crate::dressed::{
    force_eigenstate, force_theta, Atom, Branch, DressedSystem, GradientControl, RabiLandscape, SuperpositionAngle,
};
use crate::error::{Error, Result};
use crate::greens::{kk_real_from_imag, FreeSpace, SpectralFunction, Vec3};
use crate::modecoupling::{AtomPair, AtomSpec};
use crate::planarcavity::{scan_rabi, uniform_grid, PlanarScenario, Sweep};
use crate::quad::QuadControl;
use crate::weakfield::{
    eigenstate_shift, free_space_resonant_potential, narrow_mode_real_contraction, resonant_potential,
    weak_limit_potentials, weak_theta_force,
};

/// A named normalization constant for the dimensionless columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Normalization {
    pub name: String,
    pub value: f64,
    pub meaning: String,
}

/// Everything needed to reproduce a table. No timestamps, so identical
/// configurations give identical bytes.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub mode: &'static str,
    pub config_sha256: String,
    pub variant: &'static str,
    pub constants: BTreeMap<&'static str, f64>,
    pub tolerances: BTreeMap<&'static str, f64>,
    pub normalization: Vec<Normalization>,
    pub provenance: BTreeMap<String, Source>,
    pub config: RunConfig,
    pub rows: usize,
    pub columns: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub table: Table,
    pub manifest: Manifest,
    /// Number of failed checks; only `xcheck` sets this.
    pub failed_checks: usize,
}

impl RunOutput {
    /// Writes the table to `path` and the manifest next to it.
    pub fn write(&self, path: &Path, format: Format) -> Result<PathBuf> {
        self.table.export(path, format)?;
        let mpath = manifest_path(path);
        let mut bytes = serde_json::to_vec_pretty(&self.manifest).expect("manifest serializes");
        bytes.push(b'\n');
        write_file(&mpath, &bytes)?;
        Ok(mpath)
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

pub(crate) fn config_error(key: &str, msg: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        msg: msg.into(),
    }
}

pub fn config_hash(cfg: &RunConfig) -> String {
    let bytes = serde_json::to_vec(cfg).expect("config serializes");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub(crate) fn quad_control(cfg: &RunConfig) -> QuadControl {
    QuadControl::default().with_rel_tol(cfg.tolerances.quad_rel)
}

pub(crate) fn gradient_control(cfg: &RunConfig) -> GradientControl {
    GradientControl {
        rel_tol: cfg.tolerances.gradient_rel,
        ..GradientControl::default()
    }
}

/// Runs `mode` on a validated configuration.
pub fn run(cfg: &RunConfig, mode: Mode) -> Result<RunOutput> {
    let mut cfg = cfg.clone();
    cfg.mode = Some(mode);
    cfg.validate()?;
    check_mode(&cfg, mode)?;

    let (table, normalization, failed_checks) = match mode {
        Mode::ScanRabi => with_planar(&cfg, |s| mode_scan_rabi(&cfg, s))?,
        Mode::Dressed => with_planar(&cfg, |s| mode_dressed(&cfg, s))?,
        Mode::Potential => match cfg.scenario {
            ScenarioKind::Planar => with_planar(&cfg, |s| mode_potential_planar(&cfg, s))?,
            ScenarioKind::FreeSpace => {
                let (t, n) = mode_potential_free(&cfg)?;
                (t, n, 0)
            }
        },
        Mode::Force => with_planar(&cfg, |s| mode_force(&cfg, s))?,
        Mode::WeakLimit => with_planar(&cfg, |s| mode_weak_limit(&cfg, s))?,
        Mode::KkCheck => with_planar(&cfg, |s| mode_kk_check(&cfg, s))?,
        Mode::Xcheck => {
            let (t, failed) = xcheck::run_checks(&cfg)?;
            (t, Vec::new(), failed)
        }
    };

    let tolerances = BTreeMap::from([
        ("gradient_rel", cfg.tolerances.gradient_rel),
        ("quad_rel", cfg.tolerances.quad_rel),
    ]);
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        mode: mode.as_str(),
        config_sha256: config_hash(&cfg),
        variant: cfg.variant.as_str(),
        constants: constants::table().into_iter().collect(),
        tolerances,
        normalization,
        provenance: cfg.provenance.clone(),
        rows: table.len(),
        columns: table.columns().to_vec(),
        config: cfg,
    };
    Ok(RunOutput {
        table,
        manifest,
        failed_checks,
    })
}

fn check_mode(cfg: &RunConfig, mode: Mode) -> Result<()> {
    let planar_only = !matches!(mode, Mode::Potential | Mode::Xcheck);
    if planar_only && cfg.scenario != ScenarioKind::Planar {
        return Err(config_error(
            "scenario",
            format!("mode {} needs the planar scenario", mode.as_str()),
        ));
    }
    if cfg.scenario == ScenarioKind::Planar && mode != Mode::Xcheck {
        let cav = cfg.cavity()?;
        let delta = cfg.atoms.detuning;
        let gamma = cav.mode_width();
        if delta.abs() > 1e3 * gamma {
            return Err(config_error(
                "atoms.detuning",
                format!(
                    "|Δ| = {:.3e}·γ_ν lies outside the single-mode window of 1e3 linewidths",
                    delta.abs() / gamma
                ),
            ));
        }
        if mode == Mode::ScanRabi && delta != 0.0 {
            return Err(config_error(
                "atoms.detuning",
                "scan-rabi evaluates the resonant Rabi contributions and needs zero detuning",
            ));
        }
        if mode == Mode::WeakLimit && delta == 0.0 {
            return Err(config_error("atoms.detuning", "weak-limit needs a non-zero detuning"));
        }
    }
    Ok(())
}

type ModeResult = (Table, Vec<Normalization>, usize);

fn with_planar(
    cfg: &RunConfig,
    f: impl FnOnce(&PlanarScenario) -> Result<(Table, Vec<Normalization>)>,
) -> Result<ModeResult> {
    let scn = scenario(cfg)?;
    let (t, n) = f(&scn)?;
    Ok((t, n, 0))
}

fn scenario(cfg: &RunConfig) -> Result<PlanarScenario> {
    if cfg.provenance.get("atoms.omega_10") == Some(&Source::User) {
        log::warn!("atoms.omega_10 is ignored in the planar scenario; ω₁₀ = ω_ν − atoms.detuning");
    }
    PlanarScenario::detuned(
        cfg.cavity()?,
        cfg.atoms.z_a,
        cfg.atoms.z_b,
        cfg.atoms.dipole,
        cfg.atoms.detuning,
    )
}

fn sweep(cfg: &RunConfig) -> Sweep {
    match cfg.sweep.kind {
        SweepKind::AtomA => Sweep::AtomA { z_b: cfg.atoms.z_b },
        SweepKind::AtomB => Sweep::AtomB { z_a: cfg.atoms.z_a },
        _ => Sweep::Joint,
    }
}

/// Scenarios along the configured sweep, in grid order.
fn planar_points(cfg: &RunConfig, scn: &PlanarScenario) -> Result<Vec<PlanarScenario>> {
    let grid = uniform_grid(scn.cavity().d(), cfg.sweep.points);
    grid.iter()
        .map(|&z| match sweep(cfg) {
            Sweep::Joint => scn.with_positions(z, z),
            Sweep::AtomA { z_b } => scn.with_positions(z, z_b),
            Sweep::AtomB { z_a } => scn.with_positions(z_a, z),
        })
        .collect()
}

fn rabi_unit_norm(scn: &PlanarScenario) -> Vec<Normalization> {
    let u = scn.rabi_unit();
    vec![
        Normalization {
            name: "rabi_unit".into(),
            value: u,
            meaning: "cΓ₀/d in (rad/s)²; squared frequencies are divided by it".into(),
        },
        Normalization {
            name: "frequency_unit".into(),
            value: u.sqrt(),
            meaning: "√(cΓ₀/d) in rad/s; frequencies are divided by it".into(),
        },
        Normalization {
            name: "energy_unit".into(),
            value: HBAR * u.sqrt(),
            meaning: "ħ√(cΓ₀/d) in J; energies are divided by it".into(),
        },
        Normalization {
            name: "force_unit".into(),
            value: HBAR * u.sqrt() / scn.cavity().d(),
            meaning: "ħ√(cΓ₀/d)/d in N; forces are divided by it".into(),
        },
        Normalization {
            name: "decay_rate".into(),
            value: scn.decay_rate(),
            meaning: "free-space Γ₀ at ω_ν in 1/s".into(),
        },
        Normalization {
            name: "mode_width".into(),
            value: scn.cavity().mode_width(),
            meaning: "γ_ν = 2cδ/d in rad/s".into(),
        },
    ]
}

fn mode_scan_rabi(cfg: &RunConfig, scn: &PlanarScenario) -> Result<(Table, Vec<Normalization>)> {
    let grid = uniform_grid(scn.cavity().d(), cfg.sweep.points);
    let rows = scan_rabi(scn, sweep(cfg), &grid, cfg.variant)?;
    let mut t = Table::new([
        "z_a",
        "z_b",
        "omega2_a",
        "omega2_b",
        "omega2_ab",
        "omega2_total",
        "omega2_a_dimless",
        "omega2_b_dimless",
        "omega2_ab_dimless",
        "omega2_total_dimless",
    ]);
    for r in rows {
        t.push(vec![
            r.z_a.into(),
            r.z_b.into(),
            r.si.omega2_a.into(),
            r.si.omega2_b.into(),
            r.si.omega2_ab.into(),
            r.si.omega2_total.into(),
            r.dimensionless.omega2_a.into(),
            r.dimensionless.omega2_b.into(),
            r.dimensionless.omega2_ab.into(),
            r.dimensionless.omega2_total.into(),
        ]);
    }
    Ok((t, rabi_unit_norm(scn)))
}

fn mode_dressed(cfg: &RunConfig, scn: &PlanarScenario) -> Result<(Table, Vec<Normalization>)> {
    let f = scn.rabi_unit().sqrt();
    let e = HBAR * f;
    let mut t = Table::new([
        "z_a",
        "z_b",
        "omega_r",
        "delta",
        "omega",
        "theta_c",
        "sin_2theta_c",
        "cos_2theta_c",
        "e_plus",
        "e_minus",
        "omega_r_dimless",
        "delta_dimless",
        "e_plus_dimless",
        "e_minus_dimless",
    ]);
    for p in planar_points(cfg, scn)? {
        let sys = p.dressed_system()?;
        let (ep, em) = sys.eigenenergies();
        t.push(vec![
            p.z_a().into(),
            p.z_b().into(),
            sys.rabi().into(),
            sys.detuning().into(),
            sys.generalized_rabi().into(),
            sys.coupling_angle().into(),
            sys.sin_2theta_c().into(),
            sys.cos_2theta_c().into(),
            ep.into(),
            em.into(),
            (sys.rabi() / f).into(),
            (sys.detuning() / f).into(),
            (ep / e).into(),
            (em / e).into(),
        ]);
    }
    Ok((t, rabi_unit_norm(scn)))
}

/// `U_θ − U_θ,ref = (ħ/2)·sin 2θ·(Ω_R − Ω_R,ref)`, from
/// `U_θ = (ħ/2)(Ω_R sin 2θ − Δ cos 2θ)`.
fn theta_shift(theta: SuperpositionAngle, omega_r: f64, omega_r_ref: f64) -> f64 {
    0.5 * HBAR * (2.0 * theta.value()).sin() * (omega_r - omega_r_ref)
}

fn mode_potential_planar(cfg: &RunConfig, scn: &PlanarScenario) -> Result<(Table, Vec<Normalization>)> {
    let e = HBAR * scn.rabi_unit().sqrt();
    let theta = SuperpositionAngle::new(cfg.theta)?;
    let reference = scn.reference_rabi();
    let mut t = Table::new([
        "z_a",
        "z_b",
        "omega_r",
        "u_plus",
        "u_minus",
        "u_theta",
        "u_plus_dimless",
        "u_minus_dimless",
        "u_theta_dimless",
    ]);
    for p in planar_points(cfg, scn)? {
        let (ra, rb) = p.positions();
        let omega_r = p.rabi_at(&ra, &rb)?;
        let (up, um) = eigenstate_shift(omega_r, reference, p.delta());
        let ut = theta_shift(theta, omega_r, reference);
        t.push(vec![
            p.z_a().into(),
            p.z_b().into(),
            omega_r.into(),
            up.into(),
            um.into(),
            ut.into(),
            (up / e).into(),
            (um / e).into(),
            (ut / e).into(),
        ]);
    }
    let mut norm = rabi_unit_norm(scn);
    norm.push(Normalization {
        name: "reference_rabi".into(),
        value: reference,
        meaning: "Ω_R with both atoms on nodes; potentials are measured from this configuration".into(),
    });
    Ok((t, norm))
}

fn unit(v: [f64; 3]) -> Vec3 {
    let v = Vec3::from(v);
    v / v.norm()
}

fn mode_potential_free(cfg: &RunConfig) -> Result<(Table, Vec<Normalization>)> {
    let a = &cfg.atoms;
    let dip = unit(a.orientation) * a.dipole;
    let dir = unit(a.direction);
    let k = a.omega_10 / constants::C;
    let atom_a = AtomSpec::new(Vec3::zeros(), a.omega_10, dip)?;
    let n = cfg.sweep.points;
    let (lo, hi) = (cfg.sweep.r_min, cfg.sweep.r_max);
    let scale = a.dipole * a.dipole * k.powi(3) / (4.0 * PI * EPSILON_0);
    let mut t = Table::new(["r", "kr", "u_interaction", "u_closed_form", "u_interaction_dimless"]);
    for i in 0..n {
        let r = if n == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        };
        let pair = AtomPair::new(atom_a, atom_a.at(dir * r))?;
        let u = resonant_potential(&pair, &FreeSpace)?.interaction;
        let closed = free_space_resonant_potential(&dip, &dip, k, &(dir * r))?;
        t.push(vec![
            r.into(),
            (k * r).into(),
            u.into(),
            closed.into(),
            (u / scale).into(),
        ]);
    }
    let norm = vec![
        Normalization {
            name: "wavenumber".into(),
            value: k,
            meaning: "k = ω₁₀/c in 1/m".into(),
        },
        Normalization {
            name: "energy_unit".into(),
            value: scale,
            meaning: "|d|²k³/(4πε₀) in J; energies are divided by it".into(),
        },
    ];
    Ok((t, norm))
}

fn mode_force(cfg: &RunConfig, scn: &PlanarScenario) -> Result<(Table, Vec<Normalization>)> {
    let fu = HBAR * scn.rabi_unit().sqrt() / scn.cavity().d();
    let theta = SuperpositionAngle::new(cfg.theta)?;
    let ctl = gradient_control(cfg);
    let mut t = Table::new([
        "z_a",
        "z_b",
        "f_plus_a",
        "f_minus_a",
        "f_theta_a",
        "f_plus_b",
        "f_minus_b",
        "f_theta_b",
        "f_plus_a_dimless",
        "f_minus_a_dimless",
        "f_theta_a_dimless",
        "f_plus_b_dimless",
        "f_minus_b_dimless",
        "f_theta_b_dimless",
    ]);
    for p in planar_points(cfg, scn)? {
        let mut si = Vec::with_capacity(6);
        for atom in [Atom::A, Atom::B] {
            si.push(force_eigenstate(&p, Branch::Plus, atom, &ctl)?.z);
            si.push(force_eigenstate(&p, Branch::Minus, atom, &ctl)?.z);
            si.push(force_theta(&p, theta, atom, cfg.variant, &ctl)?.z);
        }
        let mut row: Vec<Cell> = vec![p.z_a().into(), p.z_b().into()];
        row.extend(si.iter().map(|&v| Cell::from(v)));
        row.extend(si.iter().map(|&v| Cell::from(v / fu)));
        t.push(row);
    }
    Ok((t, rabi_unit_norm(scn)))
}

/// Shift of the dressed branch that the weak-limit `U₋ = −ħΩ_R²/(4Δ)`
/// continues: `|−⟩` for `Δ > 0`, `|+⟩` for `Δ < 0`.
pub(crate) fn weak_partner_shift(omega_r: f64, omega_r_ref: f64, delta: f64) -> f64 {
    let (plus, minus) = eigenstate_shift(omega_r, omega_r_ref, delta);
    if delta > 0.0 {
        minus
    } else {
        plus
    }
}

fn mode_weak_limit(cfg: &RunConfig, scn: &PlanarScenario) -> Result<(Table, Vec<Normalization>)> {
    let e = HBAR * scn.rabi_unit().sqrt();
    let fu = e / scn.cavity().d();
    let gamma = scn.cavity().mode_width();
    let delta = scn.delta();
    let theta = SuperpositionAngle::new(cfg.theta)?;
    let ctl = gradient_control(cfg);
    let reference = scn.reference_rabi();
    let (_, weak_ref) = weak_limit_potentials(gamma, reference * reference / (gamma * PI), delta)?;
    let moving = match cfg.sweep.kind {
        SweepKind::AtomA => Atom::A,
        _ => Atom::B,
    };
    let mut t = Table::new([
        "z_a",
        "z_b",
        "omega_r",
        "delta_over_omega_r",
        "u_minus_dressed",
        "u_minus_weak",
        "u_minus_rel_error",
        "f_theta_dressed",
        "f_theta_weak",
        "u_minus_dressed_dimless",
        "u_minus_weak_dimless",
        "f_theta_dressed_dimless",
        "f_theta_weak_dimless",
    ]);
    for p in planar_points(cfg, scn)? {
        let (ra, rb) = p.positions();
        let omega_r = p.rabi_at(&ra, &rb)?;
        let dressed = weak_partner_shift(omega_r, reference, delta);
        let (_, weak) = weak_limit_potentials(gamma, omega_r * omega_r / (gamma * PI), delta)?;
        let weak = weak - weak_ref;
        let rel = if weak != 0.0 {
            ((dressed - weak) / weak).abs()
        } else {
            (dressed - weak).abs()
        };
        let grad = crate::dressed::grad_rabi(&p, moving, &ctl)?;
        let f_weak = weak_theta_force(theta.value(), omega_r, &grad.value, delta)?.z;
        let f_dressed = weak_theta_strong(&p, theta, moving, &ctl)?;
        t.push(vec![
            p.z_a().into(),
            p.z_b().into(),
            omega_r.into(),
            (delta / omega_r).into(),
            dressed.into(),
            weak.into(),
            rel.into(),
            f_dressed.into(),
            f_weak.into(),
            (dressed / e).into(),
            (weak / e).into(),
            (f_dressed / fu).into(),
            (f_weak / fu).into(),
        ]);
    }
    Ok((t, rabi_unit_norm(scn)))
}

/// Dressed counterpart of the weak-field superposition force. The weak
/// state `cos²θ·U₋ + sin²θ·U₊` maps onto the dressed branches, swapped
/// when `Δ < 0`, and `∇U_± = ±(ħ/2)·sin 2θ_c·∇Ω_R`.
fn weak_theta_strong(p: &PlanarScenario, theta: SuperpositionAngle, atom: Atom, ctl: &GradientControl) -> Result<f64> {
    let sys: DressedSystem = p.dressed_system()?;
    let g = crate::dressed::grad_rabi(p, atom, ctl)?;
    let s = if p.delta() > 0.0 { 1.0 } else { -1.0 };
    Ok(s * 0.5 * HBAR * (2.0 * theta.value()).cos() * sys.sin_2theta_c() * g.value.z)
}

fn mode_kk_check(cfg: &RunConfig, scn: &PlanarScenario) -> Result<(Table, Vec<Normalization>)> {
    let cav = scn.cavity();
    let (w0, gamma) = (cav.resonance_frequency(), cav.mode_width());
    let lor = SpectralFunction::lorentzian(w0, gamma)?;
    let quad = quad_control(cfg);
    let mut t = Table::new([
        "offset_linewidths",
        "omega",
        "pv_over_pi",
        "exact_over_pi",
        "narrow_mode",
        "rel_error_exact",
        "rel_error_narrow_mode",
    ]);
    for &off in &cfg.kk_offsets {
        let w = w0 + off * gamma;
        let pv = kk_real_from_imag(&lor, w, &quad)? / PI;
        let det = w0 - w;
        let exact = 0.5 * gamma * det / (det * det + 0.25 * gamma * gamma);
        let narrow = narrow_mode_real_contraction(1.0, gamma, w0, w)?;
        t.push(vec![
            off.into(),
            w.into(),
            pv.into(),
            exact.into(),
            narrow.into(),
            ((pv - exact) / exact).abs().into(),
            ((pv - narrow) / narrow).abs().into(),
        ]);
    }
    let norm = vec![
        Normalization {
            name: "mode_width".into(),
            value: gamma,
            meaning: "γ_ν in rad/s; offsets are in these units".into(),
        },
        Normalization {
            name: "lorentzian_peak".into(),
            value: 1.0,
            meaning: "the transformed Lorentzian has unit peak".into(),
        },
    ];
    Ok((t, norm))
}
