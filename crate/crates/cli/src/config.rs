//! Scenario file: nested TOML tables, every field optional.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use torus_dirac::fields::{AuProfile, AxProfile, FermiVelocity, GaugeField};
use torus_dirac::{TorusParams, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub torus: TorusSection,
    pub field: FieldSection,
    pub fermi: FermiSection,
    pub quantum: QuantumSection,
    pub grid: GridSection,
    pub case: Case,
    pub case1: Case1Section,
    pub case2: Case2Section,
    pub outputs: Vec<Artifact>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TorusSection {
    pub a: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxKind {
    Zero,
    Hermitizing,
    Sinusoidal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuKind {
    Zero,
    /// `C₂ R² - k/(ae)` with `C₂` on the constrained branch.
    Constrained,
    Quadratic,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldSection {
    pub charge: f64,
    pub ax: AxKind,
    /// `[re, im]` amplitude for `ax = "sinusoidal"`.
    pub ax_amplitude: [f64; 2],
    pub au: AuKind,
    pub c2: [f64; 2],
    pub c3: [f64; 2],
    pub a2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FermiKind {
    Constant,
    Cosine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FermiSection {
    pub kind: FermiKind,
    pub v_f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuantumSection {
    pub k: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    ConstantVf,
    Pdfv,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Case1Section {
    pub alpha: f64,
    pub levels: usize,
    pub c1: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Case2Section {
    pub alpha: f64,
    pub c1: f64,
    pub levels: usize,
    pub delta: f64,
    pub n_grid: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum Artifact {
    Table,
    Series,
    Report,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            torus: TorusSection::default(),
            field: FieldSection::default(),
            fermi: FermiSection::default(),
            quantum: QuantumSection::default(),
            grid: GridSection::default(),
            case: Case::ConstantVf,
            case1: Case1Section::default(),
            case2: Case2Section::default(),
            outputs: vec![Artifact::Table, Artifact::Series, Artifact::Report],
        }
    }
}

impl Default for TorusSection {
    fn default() -> Self {
        Self { a: 0.5, c: 2.0 }
    }
}

impl Default for FieldSection {
    fn default() -> Self {
        Self { charge: 1.0, ax: AxKind::Hermitizing, ax_amplitude: [0.0, 0.0], au: AuKind::Constrained, c2: [0.0, 0.0], c3: [0.0, 0.0], a2: 0.0 }
    }
}

impl Default for FermiSection {
    fn default() -> Self {
        Self { kind: FermiKind::Constant, v_f: 1.0 }
    }
}

impl Default for QuantumSection {
    fn default() -> Self {
        Self { k: 1 }
    }
}

impl Default for GridSection {
    fn default() -> Self {
        Self { n: 1024 }
    }
}

impl Default for Case1Section {
    fn default() -> Self {
        Self { alpha: 1.0, levels: 2, c1: 0.0, t_min: -4.0, t_max: 60.0, steps: 16_000 }
    }
}

impl Default for Case2Section {
    fn default() -> Self {
        Self { alpha: 0.0, c1: -0.25, levels: 4, delta: 1e-3, n_grid: 8000 }
    }
}

fn c64(v: [f64; 2]) -> C64 {
    C64::new(v[0], v[1])
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: Self = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.torus;
        if !(t.a.is_finite() && t.a > 0.0) {
            bail!("torus.a: tube radius must be positive and finite, got {}", t.a);
        }
        if !(t.c.is_finite() && t.c > 0.0) {
            bail!("torus.c: central radius must be positive and finite, got {}", t.c);
        }
        if t.a == t.c {
            bail!("torus.c: c ≠ a is required, got c = a = {}", t.a);
        }
        if self.field.charge == 0.0 || !self.field.charge.is_finite() {
            bail!("field.charge: must be nonzero and finite, got {}", self.field.charge);
        }
        if self.fermi.kind == FermiKind::Constant && !(self.fermi.v_f > 0.0) {
            bail!("fermi.v_f: must be positive, got {}", self.fermi.v_f);
        }
        if self.case == Case::Pdfv && self.fermi.kind == FermiKind::Constant && self.fermi.v_f != 1.0 {
            bail!("fermi.kind: case = \"pdfv\" needs kind = \"cosine\" (or the unit constant override)");
        }
        if self.grid.n < 16 {
            bail!("grid.n: need at least 16 points, got {}", self.grid.n);
        }
        if !(self.case1.alpha > 0.0) {
            bail!("case1.alpha: must be positive, got {}", self.case1.alpha);
        }
        if self.case1.t_min >= self.case1.t_max || self.case1.steps < 100 {
            bail!("case1: need t_min < t_max and steps >= 100");
        }
        if !(self.case2.delta > 0.0 && self.case2.delta < 1.0) {
            bail!("case2.delta: must lie in (0, 1), got {}", self.case2.delta);
        }
        if self.case2.n_grid < 16 {
            bail!("case2.n_grid: need at least 16 points, got {}", self.case2.n_grid);
        }
        if self.outputs.is_empty() {
            bail!("outputs: at least one artifact (table, series, report) must be requested");
        }
        Ok(())
    }

    pub fn torus(&self) -> Result<TorusParams> {
        TorusParams::new(self.torus.a, self.torus.c).context("torus")
    }

    /// Torus on the constrained branch `c = a²/(2√(1-a))` used by the
    /// constant-velocity chain.
    pub fn constrained_torus(&self) -> Result<TorusParams> {
        constrained_torus(self.torus.a)
    }

    pub fn gauge_field(&self) -> Result<GaugeField> {
        let p = self.torus()?;
        let f = &self.field;
        let e = f.charge;
        let k = self.quantum.k;
        let ax = match f.ax {
            AxKind::Zero => AxProfile::Zero,
            AxKind::Hermitizing => AxProfile::Hermitizing,
            AxKind::Sinusoidal => AxProfile::Sinusoidal { amplitude: c64(f.ax_amplitude) },
        };
        let field = match f.au {
            AuKind::Zero => GaugeField::zero(),
            AuKind::Constrained => {
                GaugeField::quadratic_au(&p, e, torus_dirac::pseudoherm::sqrt_a_minus_1(p.a) / (p.a.powi(4) * e), k)
            }
            AuKind::Quadratic => {
                GaugeField::new(e, AxProfile::Zero, AuProfile::Quadratic { c2: c64(f.c2), c3: c64(f.c3), rotated: false })
            }
            AuKind::Linear => GaugeField::linear_au(e, f.a2, k),
        };
        let mut field = field.with_ax(ax);
        field.charge = e;
        Ok(field)
    }

    pub fn fermi_velocity(&self) -> FermiVelocity {
        match self.fermi.kind {
            FermiKind::Constant => FermiVelocity::Constant { v_f: self.fermi.v_f },
            FermiKind::Cosine => FermiVelocity::Cosine,
        }
    }

    /// Overwrites one named scalar, for sweeps.
    pub fn set_parameter(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "a" => self.torus.a = value,
            "c" => self.torus.c = value,
            "e" => self.field.charge = value,
            "k" => {
                if value.fract() != 0.0 {
                    bail!("k must be an integer, got {value}");
                }
                self.quantum.k = value as i32
            }
            "a2" => self.field.a2 = value,
            "C2" => self.field.c2 = [value, 0.0],
            "alpha" => match self.case {
                Case::ConstantVf => self.case1.alpha = value,
                Case::Pdfv => self.case2.alpha = value,
            },
            "C1" => match self.case {
                Case::ConstantVf => self.case1.c1 = value,
                Case::Pdfv => self.case2.c1 = value,
            },
            other => bail!("unknown parameter {other:?}; expected one of a, c, e, k, a2, C2, alpha, C1"),
        }
        Ok(())
    }
}

pub fn constrained_radius(a: f64) -> f64 {
    a * a / (2.0 * (1.0 - a).sqrt())
}

pub fn constrained_torus(a: f64) -> Result<TorusParams> {
    if !(a > 0.0 && a < 1.0) {
        bail!("the constrained branch needs 0 < a < 1, got a = {a}");
    }
    TorusParams::new(a, constrained_radius(a)).context("constrained torus")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = ScenarioConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        let back: ScenarioConfig = toml::from_str(&text).unwrap();
        assert_eq!(cfg, back);
        cfg.validate().unwrap();
    }

    #[test]
    fn equal_radii_message() {
        let mut cfg = ScenarioConfig::default();
        cfg.torus.c = cfg.torus.a;
        let msg = cfg.validate().unwrap_err().to_string();
        assert!(msg.contains("c ≠ a"), "{msg}");
    }

    #[test]
    fn unknown_key_reports_location() {
        let err = toml::from_str::<ScenarioConfig>("[torus]\na = 0.5\nradius = 3\n").unwrap_err().to_string();
        assert!(err.contains("radius") && err.contains("line 3"), "{err}");
    }

    #[test]
    fn sweep_parameter_names() {
        let mut cfg = ScenarioConfig::default();
        cfg.set_parameter("alpha", 0.7).unwrap();
        assert_eq!(cfg.case1.alpha, 0.7);
        assert!(cfg.set_parameter("beta", 1.0).is_err());
        assert!(cfg.set_parameter("k", 1.5).is_err());
    }
}
