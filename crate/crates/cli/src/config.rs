//! Run configuration: a TOML file with one section per command, overridden by
//! `--set section.key=value` flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub kernel: KernelConfig,
    pub norms: NormsConfig,
    pub commutators: CommutatorsConfig,
    pub pohozaev: PohozaevConfig,
    pub stereo: StereoConfig,
    pub flow: FlowConfig,
    pub bubble: BubbleConfig,
    pub counterexample: CounterexampleConfig,
    pub selftest: SelftestConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelConfig {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub half_width: f64,
    pub n_points: usize,
    pub tolerance: f64,
    pub transform_tolerance: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            t: vec![0.5, 1.0, 2.0],
            x: vec![-2.0, -1.0, 0.0, 1.0, 2.0],
            half_width: 1e3,
            n_points: 1 << 16,
            tolerance: 1e-9,
            transform_tolerance: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormsConfig {
    /// `indicator`, `power` or `file`.
    pub preset: String,
    /// Field file (CSV, or binary when the extension is `.bin`), used when
    /// `preset = "file"`.
    pub input: Option<PathBuf>,
    pub half_width: f64,
    pub n_points: usize,
    pub length: f64,
    pub inner: f64,
    pub outer: Vec<f64>,
    pub tolerance: f64,
}

impl Default for NormsConfig {
    fn default() -> Self {
        Self {
            preset: "indicator".into(),
            input: None,
            half_width: 8.0,
            n_points: 1 << 12,
            length: 1.0,
            inner: 1.0,
            outer: vec![10.0, 100.0, 1000.0],
            tolerance: 0.05,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommutatorsConfig {
    pub n_points: usize,
    /// Number of random trigonometric input pairs.
    pub samples: usize,
    pub max_mode: usize,
    pub tolerance: f64,
}

impl Default for CommutatorsConfig {
    fn default() -> Self {
        Self { n_points: 256, samples: 4, max_mode: 8, tolerance: 1e-10 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PohozaevConfig {
    /// `identity-map`, `z-squared` or `mobius`.
    pub preset: String,
    pub t: Vec<f64>,
    pub circle_points: usize,
    pub mobius_a: f64,
    pub plane_half_width: f64,
    pub plane_points: usize,
    /// Heat times for the plane identity; the window must exceed 6√t.
    pub plane_t: Vec<f64>,
    pub tolerance: Option<f64>,
}

impl Default for PohozaevConfig {
    fn default() -> Self {
        Self {
            preset: "identity-map".into(),
            t: vec![0.5, 1.0, 2.0, 5.0],
            circle_points: 256,
            mobius_a: 0.6,
            plane_half_width: 8.0,
            plane_points: 512,
            plane_t: vec![1.0],
            tolerance: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StereoConfig {
    pub circle_points: usize,
    pub excluded_arc: f64,
    pub tolerance: f64,
    pub random_tolerance: f64,
    pub random_terms: usize,
}

impl Default for StereoConfig {
    fn default() -> Self {
        Self { circle_points: 1024, excluded_arc: 0.2, tolerance: 1e-6, random_tolerance: 1e-3, random_terms: 3 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowConfig {
    pub n_points: usize,
    pub perturbation: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub energy_tolerance: f64,
    /// Per-iteration history as CSV.
    pub history_csv: Option<PathBuf>,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            n_points: 128,
            perturbation: 0.05,
            tolerance: 1e-6,
            max_iterations: 50_000,
            energy_tolerance: 1e-4,
            history_csv: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BubbleConfig {
    pub a: Vec<f64>,
    pub big_r: f64,
    pub necks: Vec<f64>,
    pub gate: f64,
    pub exponent_tolerance: f64,
    /// One row per (a, neck) as CSV.
    pub csv: Option<PathBuf>,
}

impl Default for BubbleConfig {
    fn default() -> Self {
        Self {
            a: vec![0.9, 0.99, 0.999, 0.9999],
            big_r: 4.0,
            necks: vec![2.0],
            gate: 0.1,
            exponent_tolerance: 0.15,
            csv: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CounterexampleConfig {
    pub ns: Vec<f64>,
    pub radii: Vec<f64>,
    pub slope_lo: f64,
    pub slope_hi: f64,
    pub slope_samples: usize,
    pub slope_tolerance: f64,
    pub neck_tolerance: f64,
    pub csv: Option<PathBuf>,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        Self {
            ns: vec![1e2, 1e4, 1e6],
            radii: vec![4.0, 16.0, 64.0, 256.0],
            slope_lo: 10.0,
            slope_hi: 1e3,
            slope_samples: 41,
            slope_tolerance: 0.05,
            neck_tolerance: 0.1,
            csv: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelftestConfig {
    pub criteria: Vec<u8>,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        Self { criteria: (1..=15).collect() }
    }
}

/// Reads `path` (if any), applies `key=value` overrides and validates.
pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig, String> {
    let mut table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
            text.parse::<toml::Table>().map_err(|e| format!("malformed config {}: {e}", p.display()))?
        }
        None => toml::Table::new(),
    };
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let config: RunConfig = toml::Value::Table(table).try_into().map_err(|e| format!("invalid config: {e}"))?;
    config.validate()?;
    Ok(config)
}

fn apply_override(table: &mut toml::Table, spec: &str) -> Result<(), String> {
    let (key, raw) = spec.split_once('=').ok_or_else(|| format!("override `{spec}` is not key=value"))?;
    let value = parse_value(raw.trim());
    let mut parts: Vec<&str> = key.trim().split('.').collect();
    let last = parts.pop().filter(|k| !k.is_empty()).ok_or_else(|| format!("override `{spec}` has an empty key"))?;
    let mut node = table;
    for p in parts {
        let entry = node.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = entry.as_table_mut().ok_or_else(|| format!("override `{spec}`: `{p}` is not a section"))?;
    }
    node.insert(last.to_string(), value);
    Ok(())
}

/// Parses a TOML value, falling back to a bare string.
fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn positive(name: &str, v: f64) -> Result<(), String> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(format!("{name} must be positive and finite, got {v}"))
    }
}

fn writable(name: &str, p: &Option<PathBuf>) -> Result<(), String> {
    let Some(p) = p else { return Ok(()) };
    let parent = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    if parent.is_dir() {
        Ok(())
    } else {
        Err(format!("{name}: directory {} does not exist", parent.display()))
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        let k = &self.kernel;
        positive("kernel.tolerance", k.tolerance)?;
        positive("kernel.transform_tolerance", k.transform_tolerance)?;
        positive("kernel.half_width", k.half_width)?;
        k.t.iter().try_for_each(|&t| positive("kernel.t", t))?;

        let n = &self.norms;
        positive("norms.tolerance", n.tolerance)?;
        positive("norms.half_width", n.half_width)?;
        positive("norms.length", n.length)?;
        positive("norms.inner", n.inner)?;
        match n.preset.as_str() {
            "indicator" | "power" => {}
            "file" => match &n.input {
                Some(p) if p.is_file() => {}
                Some(p) => return Err(format!("norms.input: {} is not a file", p.display())),
                None => return Err("norms.preset = \"file\" needs norms.input".into()),
            },
            other => return Err(format!("norms.preset: unknown preset `{other}`")),
        }
        if n.outer.iter().any(|&r| r <= n.inner) {
            return Err("norms.outer radii must exceed norms.inner".into());
        }

        let c = &self.commutators;
        positive("commutators.tolerance", c.tolerance)?;
        if c.max_mode == 0 || 4 * c.max_mode >= c.n_points {
            return Err("commutators.max_mode must be positive and below n_points / 4".into());
        }

        let p = &self.pohozaev;
        if !matches!(p.preset.as_str(), "identity-map" | "z-squared" | "mobius") {
            return Err(format!("pohozaev.preset: unknown preset `{}`", p.preset));
        }
        p.t.iter().try_for_each(|&t| positive("pohozaev.t", t))?;
        p.plane_t.iter().try_for_each(|&t| positive("pohozaev.plane_t", t))?;
        if let Some(tol) = p.tolerance {
            positive("pohozaev.tolerance", tol)?;
        }
        if !(p.mobius_a.abs() < 1.0) {
            return Err(format!("pohozaev.mobius_a must lie in (-1, 1), got {}", p.mobius_a));
        }
        positive("pohozaev.plane_half_width", p.plane_half_width)?;

        let s = &self.stereo;
        positive("stereo.tolerance", s.tolerance)?;
        positive("stereo.random_tolerance", s.random_tolerance)?;
        positive("stereo.excluded_arc", s.excluded_arc)?;

        let f = &self.flow;
        positive("flow.tolerance", f.tolerance)?;
        positive("flow.energy_tolerance", f.energy_tolerance)?;
        if !(0.0..0.5).contains(&f.perturbation) {
            return Err(format!("flow.perturbation must lie in [0, 0.5), got {}", f.perturbation));
        }
        writable("flow.history_csv", &f.history_csv)?;

        let b = &self.bubble;
        positive("bubble.exponent_tolerance", b.exponent_tolerance)?;
        positive("bubble.gate", b.gate)?;
        positive("bubble.big_r", b.big_r)?;
        if b.a.iter().any(|a| !(0.0..1.0).contains(a)) {
            return Err("bubble.a values must lie in [0, 1)".into());
        }
        if b.necks.iter().any(|&l| l <= 1.0) {
            return Err("bubble.necks must exceed 1".into());
        }
        writable("bubble.csv", &b.csv)?;

        let x = &self.counterexample;
        positive("counterexample.slope_tolerance", x.slope_tolerance)?;
        positive("counterexample.neck_tolerance", x.neck_tolerance)?;
        if !(x.slope_lo > 0.0 && x.slope_hi > x.slope_lo) {
            return Err("counterexample slope window must satisfy 0 < slope_lo < slope_hi".into());
        }
        if x.ns.iter().any(|&n| n < 1.0) || x.radii.iter().any(|&r| r <= 1.0) {
            return Err("counterexample.ns must be ≥ 1 and radii > 1".into());
        }
        writable("counterexample.csv", &x.csv)?;

        if self.selftest.criteria.iter().any(|&c| !(1..=15).contains(&c)) {
            return Err("selftest.criteria must lie in 1..=15".into());
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form of the resolved configuration.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&json);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
