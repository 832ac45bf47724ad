//! Run configuration: a strict JSON schema covering metric, group, split,
//! oracle, spiral, verification, and export settings. The effective (fully
//! defaulted) config is echoed into every report so runs are reproducible
//! documents.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exprlang;
use crate::group::{rational_from_f64, BieberbachElement, SymmetryGroup};
use crate::linalg::SymMat;
use crate::metric::MetricField;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    #[serde(default)]
    pub metric: MetricConfig,
    #[serde(default)]
    pub group: GroupConfig,
    #[serde(default)]
    pub split: SplitConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub spiral: SpiralConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub export: ExportConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricFamily {
    Identity,
    Constant,
    ConformalFlat,
    Revolution,
    Expression,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricConfig {
    pub family: MetricFamily,
    /// Constant family: the full symmetric matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    /// Conformal-flat family: the exponent f in e^{2f}·I.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<String>,
    /// Revolution family: ring radius R (major) and tube radius ρ (minor).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub major: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minor: Option<f64>,
    /// Expression family: upper-triangle entries in exprlang syntax.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<String>>,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig { family: MetricFamily::Identity, matrix: None, factor: None, major: None, minor: None, entries: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    /// Built-in name: "torus" (or "torus-N"), "pg", "pgg".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Explicit generators as (A, v) pairs; v entries must be small
    /// rationals (binary fractions are exact).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<GeneratorConfig>>,
}

impl Default for GroupConfig {
    fn default() -> Self {
        GroupConfig { name: Some("torus".to_string()), generators: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub a: Vec<Vec<i64>>,
    pub v: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitMode {
    /// Resolve to `fraction`, or to `metric-is-q1` when the oracle is the
    /// revolution family (its closed form realizes the declared metric
    /// itself, not a shifted copy).
    Auto,
    /// c = fraction × (grid minimum eigenvalue of the declared metric g̃).
    Fraction,
    /// The declared metric is taken as Q1 and g̃ = Q1 + c·I is assembled
    /// around it.
    MetricIsQ1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    #[serde(default = "default_fraction")]
    pub fraction: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(default = "default_split_mode")]
    pub mode: SplitMode,
}

fn default_fraction() -> f64 {
    0.5
}

fn default_split_mode() -> SplitMode {
    SplitMode::Auto
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig { fraction: 0.5, resolution: None, mode: SplitMode::Auto }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleKindConfig {
    Clifford,
    Revolution,
    Expression,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub kind: OracleKindConfig,
    /// Expression oracle: component maps in exprlang syntax.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<String>>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { kind: OracleKindConfig::Clifford, components: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpiralConfig {
    #[serde(default = "default_r_in")]
    pub r_in: f64,
    #[serde(default = "default_r_out")]
    pub r_out: f64,
    #[serde(default = "default_k")]
    pub k: f64,
    #[serde(default = "default_spiral_tol")]
    pub tol: f64,
}

fn default_r_in() -> f64 {
    1.0
}
fn default_r_out() -> f64 {
    2.0
}
fn default_k() -> f64 {
    1.0
}
fn default_spiral_tol() -> f64 {
    1e-10
}

impl Default for SpiralConfig {
    fn default() -> Self {
        SpiralConfig { r_in: 1.0, r_out: 2.0, k: 1.0, tol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default = "default_window")]
    pub window: f64,
    #[serde(default = "default_boundedness_samples")]
    pub boundedness_samples: u64,
    #[serde(default = "default_boundedness_window")]
    pub boundedness_window: f64,
    #[serde(default = "default_translations")]
    pub translations: u64,
    #[serde(default = "default_shift_radius")]
    pub shift_radius: i64,
    #[serde(default = "default_fd_samples")]
    pub fd_samples: u64,
    #[serde(default = "default_injectivity_pairs")]
    pub injectivity_pairs: u64,
    #[serde(default = "default_domain_floor")]
    pub domain_floor: f64,
    #[serde(default = "default_image_floor")]
    pub image_floor: f64,
    /// Analytic pullback residual tolerance.
    #[serde(default = "default_tol_pullback")]
    pub tol_pullback: f64,
    /// Finite-difference pullback tolerance (scaled by the metric magnitude).
    #[serde(default = "default_tol_pullback_fd")]
    pub tol_pullback_fd: f64,
    #[serde(default = "default_tol_equivariance")]
    pub tol_equivariance: f64,
    #[serde(default = "default_tol_periodicity")]
    pub tol_periodicity: f64,
}

fn default_samples() -> u64 {
    1000
}
fn default_window() -> f64 {
    5.0
}
fn default_boundedness_samples() -> u64 {
    10_000
}
fn default_boundedness_window() -> f64 {
    1e3
}
fn default_translations() -> u64 {
    100
}
fn default_shift_radius() -> i64 {
    10
}
fn default_fd_samples() -> u64 {
    100
}
fn default_injectivity_pairs() -> u64 {
    10_000
}
fn default_domain_floor() -> f64 {
    0.1
}
fn default_image_floor() -> f64 {
    1e-4
}
fn default_tol_pullback() -> f64 {
    1e-8
}
fn default_tol_pullback_fd() -> f64 {
    1e-6
}
fn default_tol_equivariance() -> f64 {
    1e-9
}
fn default_tol_periodicity() -> f64 {
    1e-12
}

impl Default for VerifyConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields defaulted")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportConfig {
    #[serde(default = "default_export_window")]
    pub window: f64,
    #[serde(default = "default_mesh_resolution")]
    pub mesh_resolution: usize,
    #[serde(default = "default_export_samples")]
    pub samples: u64,
    /// Which three image coordinates go into OBJ vertices.
    #[serde(default = "default_coords")]
    pub coords: [usize; 3],
}

fn default_export_window() -> f64 {
    2.0
}
fn default_mesh_resolution() -> usize {
    128
}
fn default_export_samples() -> u64 {
    1000
}
fn default_coords() -> [usize; 3] {
    [0, 1, 2]
}

impl Default for ExportConfig {
    fn default() -> Self {
        ExportConfig { window: 2.0, mesh_resolution: 128, samples: 1000, coords: [0, 1, 2] }
    }
}

impl RunConfig {
    /// Minimal default: identity metric on the 2-torus, Clifford oracle.
    pub fn default_for_n(n: usize) -> Self {
        RunConfig {
            n,
            metric: MetricConfig::default(),
            group: GroupConfig::default(),
            split: SplitConfig::default(),
            oracle: OracleConfig::default(),
            spiral: SpiralConfig::default(),
            verify: VerifyConfig::default(),
            export: ExportConfig::default(),
        }
    }

    /// Parses and validates, returning the effective config with all
    /// defaults and `auto` choices resolved.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("schema violation: {e}")))?;
        cfg.effective()
    }

    /// Default grid resolution per dimension: 256 for n ≤ 2, 64 for n = 3.
    fn default_resolution(n: usize) -> usize {
        match n {
            0..=2 => 256,
            3 => 64,
            _ => 16,
        }
    }

    /// Validates cross-references and resolves `auto`/absent fields.
    pub fn effective(&self) -> Result<Self> {
        let mut cfg = self.clone();
        let n = cfg.n;
        if !(1..=4).contains(&n) {
            return Err(Error::Config(format!("n must be in 1..=4, got {n}")));
        }

        cfg.validate_metric()?;
        cfg.validate_group()?;
        cfg.validate_oracle()?;

        if !(cfg.split.fraction > 0.0 && cfg.split.fraction < 1.0) {
            return Err(Error::Config(format!(
                "split.fraction must lie in (0,1), got {}",
                cfg.split.fraction
            )));
        }
        if cfg.split.resolution.is_none() {
            cfg.split.resolution = Some(Self::default_resolution(n));
        }
        if cfg.split.mode == SplitMode::Auto {
            cfg.split.mode = if cfg.oracle.kind == OracleKindConfig::Revolution {
                SplitMode::MetricIsQ1
            } else {
                SplitMode::Fraction
            };
        }

        let s = &cfg.spiral;
        if !(s.r_in > 0.0 && s.r_out > s.r_in && s.k > 0.0 && s.tol > 0.0) {
            return Err(Error::Config("spiral parameters out of range".into()));
        }

        let coords = cfg.export.coords;
        if coords[0] == coords[1] || coords[1] == coords[2] || coords[0] == coords[2] {
            return Err(Error::Config("export.coords must name three distinct coordinates".into()));
        }
        Ok(cfg)
    }

    fn validate_metric(&self) -> Result<()> {
        let n = self.n;
        let m = &self.metric;
        let fail = |msg: String| Err(Error::Config(msg));
        let forbid = |cond: bool, what: &str| {
            if cond {
                Err(Error::Config(format!(
                    "metric.{what} is not a field of the `{:?}` family",
                    m.family
                )))
            } else {
                Ok(())
            }
        };
        match m.family {
            MetricFamily::Identity => {
                forbid(m.matrix.is_some(), "matrix")?;
                forbid(m.factor.is_some(), "factor")?;
                forbid(m.major.is_some() || m.minor.is_some(), "major/minor")?;
                forbid(m.entries.is_some(), "entries")?;
            }
            MetricFamily::Constant => {
                let matrix = match &m.matrix {
                    Some(x) => x,
                    None => return fail("metric.matrix required for the constant family".into()),
                };
                if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
                    return fail(format!("metric.matrix must be {n}x{n}"));
                }
                for i in 0..n {
                    for j in 0..n {
                        if matrix[i][j] != matrix[j][i] {
                            return fail("metric.matrix must be symmetric".into());
                        }
                    }
                }
                forbid(m.factor.is_some(), "factor")?;
                forbid(m.major.is_some() || m.minor.is_some(), "major/minor")?;
                forbid(m.entries.is_some(), "entries")?;
            }
            MetricFamily::ConformalFlat => {
                let factor = match &m.factor {
                    Some(x) => x,
                    None => return fail("metric.factor required for the conformal-flat family".into()),
                };
                exprlang::parse(factor, n)?;
                forbid(m.matrix.is_some(), "matrix")?;
                forbid(m.major.is_some() || m.minor.is_some(), "major/minor")?;
                forbid(m.entries.is_some(), "entries")?;
            }
            MetricFamily::Revolution => {
                if n != 2 {
                    return fail("the revolution family requires n = 2".into());
                }
                let (major, minor) = match (m.major, m.minor) {
                    (Some(a), Some(b)) => (a, b),
                    _ => return fail("metric.major and metric.minor required for revolution".into()),
                };
                if !(minor > 0.0 && major > minor) {
                    return fail(format!(
                        "revolution family needs major > minor > 0, got major={major}, minor={minor}"
                    ));
                }
                forbid(m.matrix.is_some(), "matrix")?;
                forbid(m.factor.is_some(), "factor")?;
                forbid(m.entries.is_some(), "entries")?;
            }
            MetricFamily::Expression => {
                let entries = match &m.entries {
                    Some(x) => x,
                    None => return fail("metric.entries required for the expression family".into()),
                };
                if entries.len() != n * (n + 1) / 2 {
                    return fail(format!(
                        "metric.entries must list the {} upper-triangle entries",
                        n * (n + 1) / 2
                    ));
                }
                for e in entries {
                    exprlang::parse(e, n)?;
                }
                forbid(m.matrix.is_some(), "matrix")?;
                forbid(m.factor.is_some(), "factor")?;
                forbid(m.major.is_some() || m.minor.is_some(), "major/minor")?;
            }
        }
        Ok(())
    }

    fn validate_group(&self) -> Result<()> {
        let g = &self.group;
        match (&g.name, &g.generators) {
            (Some(_), Some(_)) => {
                Err(Error::Config("group: give either a name or generators, not both".into()))
            }
            (None, None) => Err(Error::Config("group: missing name or generators".into())),
            (Some(name), None) => {
                let n = self.n;
                match name.as_str() {
                    "torus" => Ok(()),
                    "pg" | "pgg" if n == 2 => Ok(()),
                    "pg" | "pgg" => {
                        Err(Error::Config(format!("group `{name}` requires n = 2, got n = {n}")))
                    }
                    other => {
                        if let Some(suffix) = other.strip_prefix("torus-") {
                            match suffix.parse::<usize>() {
                                Ok(m) if m == n => Ok(()),
                                Ok(m) => Err(Error::Config(format!(
                                    "group `torus-{m}` does not match n = {n}"
                                ))),
                                Err(_) => Err(Error::Config(format!("unknown group `{other}`"))),
                            }
                        } else {
                            Err(Error::Config(format!("unknown group `{other}`")))
                        }
                    }
                }
            }
            (None, Some(gens)) => {
                if gens.is_empty() {
                    return Err(Error::Config("group.generators must not be empty".into()));
                }
                for gc in gens {
                    self.build_generator(gc)?;
                }
                Ok(())
            }
        }
    }

    fn build_generator(&self, gc: &GeneratorConfig) -> Result<BieberbachElement> {
        if gc.a.len() != self.n || gc.v.len() != self.n {
            return Err(Error::Config(format!(
                "group generator must be {0}x{0} with a length-{0} translation",
                self.n
            )));
        }
        let v = gc.v.iter().map(|&x| rational_from_f64(x)).collect::<Result<Vec<_>>>()?;
        BieberbachElement::new(gc.a.clone(), v)
    }

    fn validate_oracle(&self) -> Result<()> {
        match self.oracle.kind {
            OracleKindConfig::Clifford => {
                if self.oracle.components.is_some() {
                    return Err(Error::Config(
                        "oracle.components only applies to the expression oracle".into(),
                    ));
                }
                Ok(())
            }
            OracleKindConfig::Revolution => {
                if self.oracle.components.is_some() {
                    return Err(Error::Config(
                        "oracle.components only applies to the expression oracle".into(),
                    ));
                }
                if self.n != 2 || self.metric.family != MetricFamily::Revolution {
                    return Err(Error::Config(
                        "oracle.kind = revolution requires the revolution metric family with n = 2"
                            .into(),
                    ));
                }
                Ok(())
            }
            OracleKindConfig::Expression => {
                let comps = self
                    .oracle
                    .components
                    .as_ref()
                    .ok_or_else(|| Error::Config("oracle.components required".into()))?;
                if comps.is_empty() {
                    return Err(Error::Config("oracle.components must not be empty".into()));
                }
                for c in comps {
                    exprlang::parse(c, self.n)?;
                }
                Ok(())
            }
        }
    }

    pub fn build_group(&self) -> Result<SymmetryGroup> {
        let n = self.n;
        match (&self.group.name, &self.group.generators) {
            (Some(name), None) => match name.as_str() {
                "torus" => Ok(SymmetryGroup::torus(n)),
                "pg" => Ok(SymmetryGroup::pg()),
                "pgg" => Ok(SymmetryGroup::pgg()),
                other if other.starts_with("torus-") => Ok(SymmetryGroup::torus(n)),
                other => Err(Error::Config(format!("unknown group `{other}`"))),
            },
            (None, Some(gens)) => {
                let elements =
                    gens.iter().map(|gc| self.build_generator(gc)).collect::<Result<Vec<_>>>()?;
                SymmetryGroup::from_generators("custom", n, elements)
            }
            _ => Err(Error::Config("group: give either a name or generators".into())),
        }
    }

    pub fn build_metric(&self) -> Result<MetricField<f64>> {
        let n = self.n;
        let group = self.build_group()?;
        match self.metric.family {
            MetricFamily::Identity => MetricField::identity(n, group),
            MetricFamily::Constant => {
                let rows = self.metric.matrix.as_ref().expect("validated");
                let mut m = SymMat::zeros(n);
                for i in 0..n {
                    for j in i..n {
                        m.set(i, j, rows[i][j]);
                    }
                }
                MetricField::constant(m, group)
            }
            MetricFamily::ConformalFlat => {
                let factor = exprlang::parse(self.metric.factor.as_ref().expect("validated"), n)?;
                MetricField::conformal_flat(n, factor, group)
            }
            MetricFamily::Revolution => MetricField::revolution(
                self.metric.major.expect("validated"),
                self.metric.minor.expect("validated"),
                group,
            ),
            MetricFamily::Expression => {
                let entries = self
                    .metric
                    .entries
                    .as_ref()
                    .expect("validated")
                    .iter()
                    .map(|t| exprlang::parse(t, n))
                    .collect::<Result<Vec<_>>>()?;
                MetricField::from_expressions(n, entries, group)
            }
        }
    }

    /// SHA-256 of the serialized effective config.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(json.as_bytes());
        hex::encode(hasher.finalize())
    }
}
