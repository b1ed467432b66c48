//! JSON run configuration.
//!
//! Every section and key is optional and falls back to the defaults below;
//! unknown keys are rejected. Errors carry the 1-based line of the offending
//! key so they can be reported as `path:line: message`.

use serde::Deserialize;

use crate::charge::ChargeProfile;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::hamiltonian::Model;
use crate::init::{FieldInit, ParticleInit};
use crate::integrator::RunConfig;
use crate::Vec3;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    #[serde(rename = "L")]
    pub len: f64,
    #[serde(rename = "N")]
    pub n: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { len: 16.0, n: 48 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChargeSection {
    #[serde(rename = "R_rho")]
    pub radius: f64,
    #[serde(rename = "Q")]
    pub charge: f64,
}

impl Default for ChargeSection {
    fn default() -> Self {
        Self { radius: 2.0, charge: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParticleSection {
    pub m: f64,
    #[serde(rename = "I")]
    pub inertia: f64,
    pub q0: [f64; 3],
    pub p0: [f64; 3],
    pub pi0: [f64; 3],
}

impl Default for ParticleSection {
    fn default() -> Self {
        Self { m: 1.0, inertia: 1.0, q0: [0.0; 3], p0: [0.1, 0.05, 0.0], pi0: [0.0, 0.0, 0.5] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitKind {
    Zero,
    SolitonGuess,
    RandomLocalized,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldsSection {
    pub init: InitKind,
    pub seed: u64,
    pub envelope_radius: f64,
    /// Peak `|A|` and `|Π|` of the random packets.
    pub amplitude: f64,
}

impl Default for FieldsSection {
    fn default() -> Self {
        Self { init: InitKind::RandomLocalized, seed: 1, envelope_radius: 4.0, amplitude: 0.01 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    /// Defaults to `0.1 h`.
    pub dt: Option<f64>,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub observe_every: usize,
    pub reproject_gauge: bool,
    /// Write a snapshot every this many steps (and at the end); 0 disables.
    pub snapshot_every: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        Self { dt: None, t_final: 5.0, observe_every: 1, reproject_gauge: false, snapshot_every: 0 }
    }
}

/// Pass thresholds for `mlspin check`, one per residual.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub skew_symmetry: f64,
    pub gradient: f64,
    pub form_equivalence: f64,
    pub canonical_transform: f64,
    pub momentum_map: f64,
    pub momentum_map_fd: f64,
    pub rotation_invariance: f64,
    pub linear_momentum_identity: f64,
    pub angular_momentum_identity: f64,
    pub lie_derivative: f64,
    pub newton_lorentz: f64,
    pub gauss: f64,
    pub gauge: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            skew_symmetry: 1e-12,
            gradient: 1e-6,
            form_equivalence: 1e-10,
            canonical_transform: 1e-10,
            momentum_map: 1e-8,
            momentum_map_fd: 1e-8,
            rotation_invariance: 1e-11,
            linear_momentum_identity: 1e-6,
            angular_momentum_identity: 1e-6,
            lie_derivative: 1e-7,
            newton_lorentz: 1e-9,
            gauss: 1e-10,
            gauge: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub grid: GridSection,
    pub charge: ChargeSection,
    pub particle: ParticleSection,
    pub fields: FieldsSection,
    pub run: RunSection,
    pub checks: Tolerances,
}

impl SimConfig {
    /// Parse and validate.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SimConfig =
            serde_json::from_str(text).map_err(|e| Error::Config { line: e.line(), message: e.to_string() })?;
        cfg.validate(text)?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    fn validate(&self, text: &str) -> Result<()> {
        let fail = |path: &[&str], message: String| Err(Error::Config { line: locate(text, path), message });
        let finite3 = |v: &[f64; 3]| v.iter().all(|x| x.is_finite());

        if let Err(e) = GridSpec::new(self.grid.len, self.grid.n) {
            let key = if self.grid.len.is_finite() && self.grid.len > 0.0 { "N" } else { "L" };
            return fail(&["grid", key], e.to_string());
        }
        let h = self.grid.len / self.grid.n as f64;
        if !(self.charge.radius.is_finite() && self.charge.radius > 0.0) {
            return fail(&["charge", "R_rho"], format!("R_rho must be positive, got {}", self.charge.radius));
        }
        if 2.0 * self.charge.radius >= 0.5 * self.grid.len {
            return fail(
                &["charge", "R_rho"],
                format!("charge support exceeds box margin: 2·R_rho = {} must be < L/2", 2.0 * self.charge.radius),
            );
        }
        if !self.charge.charge.is_finite() {
            return fail(&["charge", "Q"], "Q must be finite".into());
        }
        if !(self.particle.m.is_finite() && self.particle.m > 0.0) {
            return fail(&["particle", "m"], format!("m must be positive, got {}", self.particle.m));
        }
        if !(self.particle.inertia.is_finite() && self.particle.inertia > 0.0) {
            return fail(&["particle", "I"], format!("I must be positive, got {}", self.particle.inertia));
        }
        for (key, v) in [("q0", &self.particle.q0), ("p0", &self.particle.p0), ("pi0", &self.particle.pi0)] {
            if !finite3(v) {
                return fail(&["particle", key], format!("{key} must be finite"));
            }
        }
        if self.fields.init == InitKind::RandomLocalized {
            let r = self.fields.envelope_radius;
            if !(r.is_finite() && r > 0.0) {
                return fail(&["fields", "envelope_radius"], format!("envelope_radius must be positive, got {r}"));
            }
            let limit = 0.5 * self.grid.len - 2.0 * h;
            if r + self.charge.radius >= limit {
                return fail(
                    &["fields", "envelope_radius"],
                    format!("envelope_radius + R_rho = {} must be < L/2 - 2h = {limit}", r + self.charge.radius),
                );
            }
            if !(self.fields.amplitude.is_finite() && self.fields.amplitude >= 0.0) {
                return fail(&["fields", "amplitude"], "amplitude must be finite and >= 0".into());
            }
        }
        if let Some(dt) = self.run.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return fail(&["run", "dt"], format!("dt must be positive, got {dt}"));
            }
        }
        if !(self.run.t_final.is_finite() && self.run.t_final >= 0.0) {
            return fail(&["run", "T"], format!("T must be >= 0, got {}", self.run.t_final));
        }
        if self.run.observe_every == 0 {
            return fail(&["run", "observe_every"], "observe_every must be >= 1".into());
        }
        let t = &self.checks;
        let tolerances = [
            ("skew_symmetry", t.skew_symmetry),
            ("gradient", t.gradient),
            ("form_equivalence", t.form_equivalence),
            ("canonical_transform", t.canonical_transform),
            ("momentum_map", t.momentum_map),
            ("momentum_map_fd", t.momentum_map_fd),
            ("rotation_invariance", t.rotation_invariance),
            ("linear_momentum_identity", t.linear_momentum_identity),
            ("angular_momentum_identity", t.angular_momentum_identity),
            ("lie_derivative", t.lie_derivative),
            ("newton_lorentz", t.newton_lorentz),
            ("gauss", t.gauss),
            ("gauge", t.gauge),
        ];
        for (key, v) in tolerances {
            if !(v.is_finite() && v >= 0.0) {
                return fail(&["checks", key], format!("tolerance {key} must be finite and >= 0"));
            }
        }
        Ok(())
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        GridSpec::new(self.grid.len, self.grid.n)
    }

    pub fn model(&self) -> Result<Model> {
        let g = self.grid_spec()?;
        let profile = ChargeProfile::new(self.charge.radius, self.charge.charge, g)?;
        Model::new(profile, self.particle.m, self.particle.inertia)
    }

    pub fn particle_init(&self) -> ParticleInit {
        ParticleInit {
            q0: Vec3::from(self.particle.q0),
            p0: Vec3::from(self.particle.p0),
            pi0: Vec3::from(self.particle.pi0),
        }
    }

    pub fn field_init(&self) -> FieldInit {
        match self.fields.init {
            InitKind::Zero => FieldInit::Zero,
            InitKind::SolitonGuess => FieldInit::SolitonGuess,
            InitKind::RandomLocalized => FieldInit::RandomLocalized {
                seed: self.fields.seed,
                envelope_radius: self.fields.envelope_radius,
                amplitude: self.fields.amplitude,
            },
        }
    }

    pub fn run_config(&self) -> Result<RunConfig> {
        let g = self.grid_spec()?;
        Ok(RunConfig {
            dt: self.run.dt.unwrap_or(0.1 * g.spacing()),
            t_final: self.run.t_final,
            observe_every: self.run.observe_every,
            reproject_gauge: self.run.reproject_gauge,
        })
    }
}

/// 1-based line of the key at `path`, found by walking the quoted keys in
/// order; falls back to the deepest key found, then to line 1.
fn locate(text: &str, path: &[&str]) -> usize {
    let mut from = 0;
    let mut found = None;
    for key in path {
        let needle = format!("\"{key}\"");
        match text[from..].find(&needle) {
            Some(off) => {
                from += off;
                found = Some(from);
                from += needle.len();
            }
            None => break,
        }
    }
    found.map(|pos| text[..pos].matches('\n').count() + 1).unwrap_or(1)
}
