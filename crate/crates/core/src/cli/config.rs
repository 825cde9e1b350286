//! TOML run configuration.
//!
//! ```toml
//! scenario = "planar"        # or "free-space"
//! variant = "corrected"      # or "as-printed"
//!
//! [cavity]
//! d = 1e-6                   # m
//! delta = 1e-3
//! nu = 1
//!
//! [atoms]
//! z_a = 5e-7                 # m, planar
//! z_b = 5e-7
//! dipole = 1e-29             # C·m
//! detuning = 0.0             # rad/s, ω_ν − ω₁₀
//!
//! [sweep]
//! kind = "joint"             # "atom-a", "atom-b", "separation"
//! points = 200
//! ```
//!
//! Every resolved value records whether it came from the file, a default
//! or a command-line flag.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::table::Format;
use crate::constants::C;
use crate::error::{Error, Result};
use crate::greens::planar::MAX_DELTA;
use crate::greens::PlanarCavity;
use crate::Variant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Planar,
    FreeSpace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    ScanRabi,
    Dressed,
    Potential,
    Force,
    WeakLimit,
    KkCheck,
    Xcheck,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::ScanRabi => "scan-rabi",
            Mode::Dressed => "dressed",
            Mode::Potential => "potential",
            Mode::Force => "force",
            Mode::WeakLimit => "weak-limit",
            Mode::KkCheck => "kk-check",
            Mode::Xcheck => "xcheck",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    Joint,
    AtomA,
    AtomB,
    Separation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    User,
    Default,
    Cli,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Option<ScenarioKind>,
    mode: Option<Mode>,
    variant: Option<Variant>,
    cavity: Option<RawCavity>,
    atoms: Option<RawAtoms>,
    sweep: Option<RawSweep>,
    states: Option<RawStates>,
    kk: Option<RawKk>,
    tolerances: Option<RawTolerances>,
    xcheck: Option<RawXcheck>,
    output: Option<RawOutput>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCavity {
    d: Option<f64>,
    delta: Option<f64>,
    nu: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAtoms {
    z_a: Option<f64>,
    z_b: Option<f64>,
    dipole: Option<f64>,
    orientation: Option<[f64; 3]>,
    detuning: Option<f64>,
    omega_10: Option<f64>,
    direction: Option<[f64; 3]>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    kind: Option<SweepKind>,
    points: Option<usize>,
    r_min: Option<f64>,
    r_max: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStates {
    theta: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawKk {
    offsets: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    quad_rel: Option<f64>,
    gradient_rel: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawXcheck {
    seed: Option<u64>,
    samples: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<PathBuf>,
    format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CavityConfig {
    pub d: f64,
    pub delta: f64,
    pub nu: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomsConfig {
    pub z_a: f64,
    pub z_b: f64,
    pub dipole: f64,
    pub orientation: [f64; 3],
    pub detuning: f64,
    pub omega_10: f64,
    pub direction: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub kind: SweepKind,
    pub points: usize,
    pub r_min: f64,
    pub r_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    pub quad_rel: f64,
    pub gradient_rel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XcheckConfig {
    pub seed: u64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: Format,
}

/// A validated configuration with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub scenario: ScenarioKind,
    pub mode: Option<Mode>,
    pub variant: Variant,
    pub cavity: CavityConfig,
    pub atoms: AtomsConfig,
    pub sweep: SweepConfig,
    pub theta: f64,
    pub kk_offsets: Vec<f64>,
    pub tolerances: Tolerances,
    pub xcheck: XcheckConfig,
    pub output: OutputConfig,
    #[serde(skip)]
    pub provenance: BTreeMap<String, Source>,
}

struct Resolver {
    provenance: BTreeMap<String, Source>,
}

impl Resolver {
    fn take<T>(&mut self, key: &str, value: Option<T>, default: impl FnOnce() -> T) -> T {
        let (v, src) = match value {
            Some(v) => (v, Source::User),
            None => (default(), Source::Default),
        };
        self.provenance.insert(key.to_string(), src);
        v
    }
}

fn config_error(key: &str, msg: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        msg: msg.into(),
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

const SCHEMA: &[(&str, &[&str])] = &[
    ("cavity", &["d", "delta", "nu"]),
    (
        "atoms",
        &[
            "z_a",
            "z_b",
            "dipole",
            "orientation",
            "detuning",
            "omega_10",
            "direction",
        ],
    ),
    ("sweep", &["kind", "points", "r_min", "r_max"]),
    ("states", &["theta"]),
    ("kk", &["offsets"]),
    ("tolerances", &["quad_rel", "gradient_rel"]),
    ("xcheck", &["seed", "samples"]),
    ("output", &["path", "format"]),
];
const TOP_LEVEL: &[&str] = &["scenario", "mode", "variant"];

fn check_keys(table: &toml::Table) -> Result<()> {
    for (key, value) in table {
        if TOP_LEVEL.contains(&key.as_str()) {
            continue;
        }
        let Some((_, fields)) = SCHEMA.iter().find(|(s, _)| *s == key) else {
            return Err(config_error(key, "unknown key"));
        };
        if let toml::Value::Table(inner) = value {
            if let Some(bad) = inner.keys().find(|k| !fields.contains(&k.as_str())) {
                return Err(config_error(&format!("{key}.{bad}"), "unknown key"));
            }
        }
    }
    Ok(())
}

impl RunConfig {
    /// Defaults only.
    pub fn default_config() -> Result<Self> {
        Self::from_raw(RawConfig::default())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
            let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
            Error::Parse {
                line,
                column,
                msg: e.message().to_string(),
            }
        })?;
        check_keys(&table)?;
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
            Error::Parse {
                line,
                column,
                msg: e.message().to_string(),
            }
        })?;
        Self::from_raw(raw)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    fn from_raw(raw: RawConfig) -> Result<Self> {
        let mut r = Resolver {
            provenance: BTreeMap::new(),
        };
        let scenario = r.take("scenario", raw.scenario, || ScenarioKind::Planar);
        let mode = raw.mode;
        if mode.is_some() {
            r.provenance.insert("mode".into(), Source::User);
        }
        let variant = r.take("variant", raw.variant, Variant::default);

        let cav = raw.cavity.unwrap_or_default();
        let d = r.take("cavity.d", cav.d, || 1e-6);
        let delta = r.take("cavity.delta", cav.delta, || 1e-3);
        let nu = r.take("cavity.nu", cav.nu, || 1);

        let at = raw.atoms.unwrap_or_default();
        let z_a = r.take("atoms.z_a", at.z_a, || 0.5 * d);
        let z_b = r.take("atoms.z_b", at.z_b, || 0.5 * d);
        let dipole = r.take("atoms.dipole", at.dipole, || 1e-29);
        let orientation = r.take("atoms.orientation", at.orientation, || [1.0, 0.0, 0.0]);
        let detuning = r.take("atoms.detuning", at.detuning, || 0.0);
        let omega_10 = r.take("atoms.omega_10", at.omega_10, || 2.0 * std::f64::consts::PI * C / 1e-6);
        let direction = r.take("atoms.direction", at.direction, || [0.0, 1.0, 0.0]);

        let sw = raw.sweep.unwrap_or_default();
        let default_kind = match scenario {
            ScenarioKind::Planar => SweepKind::Joint,
            ScenarioKind::FreeSpace => SweepKind::Separation,
        };
        let kind = r.take("sweep.kind", sw.kind, || default_kind);
        let points = r.take("sweep.points", sw.points, || 200);
        let r_min = r.take("sweep.r_min", sw.r_min, || 1e-8);
        let r_max = r.take("sweep.r_max", sw.r_max, || 2e-6);

        let theta = r.take("states.theta", raw.states.unwrap_or_default().theta, || {
            std::f64::consts::PI / 8.0
        });
        let kk_offsets = r.take("kk.offsets", raw.kk.unwrap_or_default().offsets, || {
            vec![-1000.0, -300.0, -100.0, 100.0, 300.0, 1000.0]
        });
        let tol = raw.tolerances.unwrap_or_default();
        let quad_rel = r.take("tolerances.quad_rel", tol.quad_rel, || 1e-8);
        let gradient_rel = r.take("tolerances.gradient_rel", tol.gradient_rel, || 1e-6);
        let xc = raw.xcheck.unwrap_or_default();
        let seed = r.take("xcheck.seed", xc.seed, || 20_240_601);
        let samples = r.take("xcheck.samples", xc.samples, || 100);
        let out = raw.output.unwrap_or_default();
        let path = out.path;
        if path.is_some() {
            r.provenance.insert("output.path".into(), Source::User);
        }
        let format = r.take("output.format", out.format, Format::default);

        let cfg = RunConfig {
            scenario,
            mode,
            variant,
            cavity: CavityConfig { d, delta, nu },
            atoms: AtomsConfig {
                z_a,
                z_b,
                dipole,
                orientation,
                detuning,
                omega_10,
                direction,
            },
            sweep: SweepConfig {
                kind,
                points,
                r_min,
                r_max,
            },
            theta,
            kk_offsets,
            tolerances: Tolerances { quad_rel, gradient_rel },
            xcheck: XcheckConfig { seed, samples },
            output: OutputConfig { path, format },
            provenance: r.provenance,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks that do not depend on the mode.
    pub fn validate(&self) -> Result<()> {
        let c = &self.cavity;
        if !(c.d > 0.0 && c.d.is_finite()) {
            return Err(config_error("cavity.d", format!("must be positive, got {}", c.d)));
        }
        if !(c.delta > 0.0 && c.delta < MAX_DELTA) {
            return Err(config_error(
                "cavity.delta",
                format!(
                    "must lie in (0, {MAX_DELTA}) for almost perfectly reflecting plates, got {}",
                    c.delta
                ),
            ));
        }
        if c.nu == 0 {
            return Err(config_error("cavity.nu", "must be at least 1"));
        }
        let a = &self.atoms;
        for (key, z) in [("atoms.z_a", a.z_a), ("atoms.z_b", a.z_b)] {
            if !(z >= 0.0 && z <= c.d) {
                return Err(config_error(
                    key,
                    format!("must lie in [0, d] = [0, {:e}], got {z:e}", c.d),
                ));
            }
        }
        if !(a.dipole > 0.0 && a.dipole.is_finite()) {
            return Err(config_error("atoms.dipole", "must be positive"));
        }
        if !(a.omega_10 > 0.0 && a.omega_10.is_finite()) {
            return Err(config_error("atoms.omega_10", "must be positive"));
        }
        for (key, v) in [("atoms.orientation", a.orientation), ("atoms.direction", a.direction)] {
            if !v.iter().all(|x| x.is_finite()) || v.iter().all(|x| *x == 0.0) {
                return Err(config_error(key, "must be a finite non-zero vector"));
            }
        }
        let w_nu = self.cavity()?.resonance_frequency();
        if !(a.detuning.is_finite() && a.detuning < w_nu) {
            return Err(config_error(
                "atoms.detuning",
                "must be finite and below the mode frequency",
            ));
        }
        let s = &self.sweep;
        if s.points == 0 {
            return Err(config_error("sweep.points", "must be at least 1"));
        }
        if !(s.r_min > 0.0 && s.r_max > s.r_min) {
            return Err(config_error("sweep.r_max", "need 0 < r_min < r_max"));
        }
        match (self.scenario, s.kind) {
            (ScenarioKind::Planar, SweepKind::Separation) => {
                return Err(config_error("sweep.kind", "separation sweeps apply to free space only"))
            }
            (ScenarioKind::FreeSpace, k) if k != SweepKind::Separation => {
                return Err(config_error("sweep.kind", "free space supports only separation sweeps"))
            }
            _ => {}
        }
        if !self.theta.is_finite() {
            return Err(config_error("states.theta", "must be finite"));
        }
        if self.kk_offsets.is_empty() {
            return Err(config_error("kk.offsets", "must not be empty"));
        }
        if let Some(o) = self.kk_offsets.iter().find(|o| !(o.abs() >= 100.0 && o.abs() <= 1e3)) {
            return Err(config_error(
                "kk.offsets",
                format!("offsets are in linewidths and must satisfy 100 ≤ |offset| ≤ 1000, got {o}"),
            ));
        }
        let t = &self.tolerances;
        if !(t.quad_rel > 0.0 && t.quad_rel < 1e-1) {
            return Err(config_error("tolerances.quad_rel", "must lie in (0, 0.1)"));
        }
        if !(t.gradient_rel > 0.0 && t.gradient_rel < 1e-1) {
            return Err(config_error("tolerances.gradient_rel", "must lie in (0, 0.1)"));
        }
        if self.xcheck.samples == 0 {
            return Err(config_error("xcheck.samples", "must be at least 1"));
        }
        Ok(())
    }

    pub fn cavity(&self) -> Result<PlanarCavity> {
        PlanarCavity::new(self.cavity.d, self.cavity.delta, self.cavity.nu)
            .map_err(|e| config_error("cavity", e.to_string()))
    }

    pub fn set_cli<T>(&mut self, key: &str, apply: impl FnOnce(&mut Self) -> T) -> T {
        let v = apply(self);
        self.provenance.insert(key.to_string(), Source::Cli);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "scenario = \"planar\"\n[cavity]\nd = 1e-6\ndelta = 1e-3\nnu = 1\n";

    #[test]
    fn minimal_config_fills_defaults() {
        let c = RunConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(c.atoms.z_a, 0.5e-6);
        assert_eq!(c.provenance["cavity.d"], Source::User);
        assert_eq!(c.provenance["atoms.z_a"], Source::Default);
        assert_eq!(c.sweep.points, 200);
    }

    #[test]
    fn unknown_key_named() {
        let text = format!("{MINIMAL}gamma_nu = 3.0\n");
        match RunConfig::from_toml_str(&text) {
            Err(Error::Config { key, .. }) => assert_eq!(key, "cavity.gamma_nu"),
            other => panic!("{other:?}"),
        }
        match RunConfig::from_toml_str("gamma_nu = 1.0\n") {
            Err(Error::Config { key, .. }) => assert_eq!(key, "gamma_nu"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn delta_bound_enforced() {
        let text = MINIMAL.replace("delta = 1e-3", "delta = 0.5");
        match RunConfig::from_toml_str(&text) {
            Err(Error::Config { key, .. }) => assert_eq!(key, "cavity.delta"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_error_has_position() {
        match RunConfig::from_toml_str("scenario = \"planar\"\n[cavity\nd = 1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match RunConfig::from_toml_str("[cavity]\nd = \"wide\"\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 5)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sweep_kind_matches_scenario() {
        let text = "scenario = \"free-space\"\n[sweep]\nkind = \"joint\"\n";
        assert!(matches!(RunConfig::from_toml_str(text), Err(Error::Config { .. })));
        let c = RunConfig::from_toml_str("scenario = \"free-space\"\n").unwrap();
        assert_eq!(c.sweep.kind, SweepKind::Separation);
    }
}
