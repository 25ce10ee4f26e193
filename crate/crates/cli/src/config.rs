//! Scenario configuration: one strict JSON document, every section optional.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use tzlab::{Direction, DriftSpec, PegSpec, ProcessParams, TabulatedDrift, TargetZone};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub zone: ZoneConfig,
    pub drift: DriftConfig,
    pub process: ProcessConfig,
    pub peg: PegConfig,
    pub eigen: EigenConfig,
    pub map: MapConfig,
    pub pricing: PricingConfig,
    pub output: OutputConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            zone: ZoneConfig::default(),
            drift: DriftConfig::default(),
            process: ProcessConfig::default(),
            peg: PegConfig::default(),
            eigen: EigenConfig::default(),
            map: MapConfig::default(),
            pricing: PricingConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ZoneConfig {
    pub s_minus: f64,
    pub s_plus: f64,
    pub s_star: f64,
    pub half_width: f64,
}

impl Default for ZoneConfig {
    fn default() -> Self {
        Self {
            s_minus: 7.75,
            s_plus: 7.85,
            s_star: 7.80,
            half_width: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftKind {
    Zero,
    Linear,
    Sign,
    Tanh,
    Tan,
    Intervention,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftTable {
    pub x: Vec<f64>,
    pub mu: Vec<f64>,
}

/// `nu_over_l` is `nu L`; `epsilon` is +1 for momentum, -1 for mean reversion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriftConfig {
    pub kind: DriftKind,
    pub epsilon: i64,
    pub alpha: f64,
    pub nu_over_l: f64,
    pub xi: f64,
    pub table: Option<DriftTable>,
}

impl Default for DriftConfig {
    fn default() -> Self {
        Self {
            kind: DriftKind::Zero,
            epsilon: 1,
            alpha: 0.0,
            nu_over_l: 0.0,
            xi: 0.0,
            table: None,
        }
    }
}

impl DriftConfig {
    /// The swept parameter of this family, if it has one.
    pub fn parameter(&self) -> Option<(&'static str, f64)> {
        match self.kind {
            DriftKind::Linear => Some(("alpha", self.alpha)),
            DriftKind::Sign | DriftKind::Tanh | DriftKind::Tan => Some(("nu_over_l", self.nu_over_l)),
            DriftKind::Intervention => Some(("xi", self.xi)),
            DriftKind::Zero | DriftKind::Tabulated => None,
        }
    }

    pub fn with_parameter(&self, value: f64) -> Self {
        let mut d = self.clone();
        match d.kind {
            DriftKind::Linear => d.alpha = value,
            DriftKind::Sign | DriftKind::Tanh | DriftKind::Tan => d.nu_over_l = value,
            DriftKind::Intervention => d.xi = value,
            DriftKind::Zero | DriftKind::Tabulated => {}
        }
        d
    }

    pub fn direction(&self) -> Result<Direction, tzlab::Error> {
        Direction::from_sign(self.epsilon)
    }

    /// Core drift for band half-width `l`.
    pub fn to_spec(&self, l: f64) -> Result<DriftSpec, tzlab::Error> {
        let nu = self.nu_over_l / l;
        let spec = match self.kind {
            DriftKind::Zero => DriftSpec::Zero,
            DriftKind::Linear => DriftSpec::Linear {
                alpha: self.alpha,
                direction: self.direction()?,
            },
            DriftKind::Sign => DriftSpec::Sign {
                nu,
                direction: self.direction()?,
            },
            DriftKind::Tanh => DriftSpec::Tanh { nu },
            DriftKind::Tan => DriftSpec::Tan { nu },
            DriftKind::Intervention => DriftSpec::InterventionStep { xi: self.xi, barrier: l },
            DriftKind::Tabulated => {
                let t = self.table.as_ref().ok_or_else(|| tzlab::Error::InvalidParameter {
                    name: "drift.table",
                    reason: "required for a tabulated drift".into(),
                })?;
                DriftSpec::Tabulated(TabulatedDrift::new(t.x.clone(), t.mu.clone())?)
            }
        };
        spec.validate(l)?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProcessConfig {
    pub sigma: f64,
    pub dt: f64,
    pub horizon: f64,
    pub n_paths: usize,
    pub seed: u64,
    /// Start of every path in band coordinates.
    pub x0: f64,
}

impl Default for ProcessConfig {
    fn default() -> Self {
        Self {
            sigma: 1.0,
            dt: 1e-3,
            horizon: 1.0,
            n_paths: 1000,
            seed: 42,
            x0: 0.0,
        }
    }
}

impl ProcessConfig {
    pub fn params(&self) -> Result<ProcessParams, tzlab::Error> {
        ProcessParams::new(self.sigma, self.dt, self.horizon, self.n_paths, self.seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PegChoice {
    NoArbitrage,
    Linear,
}

/// A linear peg takes either an absolute `r_star_star` or `r_star_fraction`,
/// a multiple of the UIRP scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PegConfig {
    pub kind: PegChoice,
    pub r_star_star: Option<f64>,
    pub r_star_fraction: Option<f64>,
}

impl Default for PegConfig {
    fn default() -> Self {
        Self {
            kind: PegChoice::NoArbitrage,
            r_star_star: None,
            r_star_fraction: None,
        }
    }
}

impl PegConfig {
    /// Peg scale `r_**` given the UIRP scale, `None` for the no-arbitrage peg.
    pub fn scale(&self, r_star: f64) -> Option<f64> {
        match self.kind {
            PegChoice::NoArbitrage => None,
            PegChoice::Linear => self.r_star_star.or(self.r_star_fraction.map(|k| k * r_star)),
        }
    }

    pub fn to_spec(&self, zone: &TargetZone, r_star: f64) -> Result<PegSpec, tzlab::Error> {
        match self.scale(r_star) {
            None => Ok(PegSpec::no_arbitrage(zone)),
            Some(r) => PegSpec::linear(zone, r),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EigenConfig {
    pub nodes: usize,
    /// Values of the drift family's parameter; empty means the configured one.
    pub sweep: Vec<f64>,
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self {
            nodes: tzlab::eigen::DEFAULT_NODES,
            sweep: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MapConfig {
    pub nonlinear: bool,
}

impl Default for MapConfig {
    fn default() -> Self {
        Self { nonlinear: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimKind {
    UnitBond,
    Forward,
    /// `(S_T / S_*)^2`.
    RateSquared,
}

impl ClaimKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClaimKind::UnitBond => "unit_bond",
            ClaimKind::Forward => "forward",
            ClaimKind::RateSquared => "rate_squared",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PricingConfig {
    pub r_domestic: f64,
    pub maturity: f64,
    pub nx: usize,
    pub nt: usize,
    pub rannacher: bool,
    pub claims: Vec<ClaimKind>,
    /// Monte Carlo paths for the cross-check, 0 to skip it.
    pub mc_paths: usize,
    /// Keep every `surface_stride`-th node and slice in the surface dump.
    pub surface_stride: usize,
}

impl Default for PricingConfig {
    fn default() -> Self {
        Self {
            r_domestic: 0.02,
            maturity: 1.0,
            nx: 1001,
            nt: 1000,
            rannacher: true,
            claims: vec![ClaimKind::UnitBond, ClaimKind::Forward],
            mc_paths: 10_000,
            surface_stride: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: String,
    /// Paths written to `paths.csv` by `simulate`.
    pub paths_csv: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: "tzlab-out".into(),
            paths_csv: 10,
        }
    }
}

impl ScenarioConfig {
    /// Merges `--override key=value` pairs into a raw document, rejects unknown
    /// keys and checks every invariant, reporting all violations at once.
    pub fn resolve(raw: Option<Value>, overrides: &[String]) -> Result<Self, CliError> {
        let mut doc = raw.unwrap_or_else(|| Value::Object(Default::default()));
        let mut violations = Vec::new();
        if !doc.is_object() {
            return Err(CliError::config(vec!["config root must be a JSON object".into()]));
        }
        for item in overrides {
            if let Err(e) = apply_override(&mut doc, item) {
                violations.push(e);
            }
        }
        let template = serde_json::to_value(Self::default()).expect("default config serializes");
        unknown_keys(&doc, &template, "", &mut violations);
        if !violations.is_empty() {
            return Err(CliError::config(violations));
        }
        let cfg: Self = serde_json::from_value(doc).map_err(|e| CliError::config(vec![e.to_string()]))?;
        let violations = cfg.violations();
        if violations.is_empty() {
            Ok(cfg)
        } else {
            Err(CliError::config(violations))
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let z = &self.zone;
        let zone = TargetZone::new(z.s_minus, z.s_plus, z.s_star, z.half_width);
        if let Err(e) = &zone {
            v.push(format!("zone: {e}"));
        }
        if z.half_width.is_finite() && z.half_width > 0.0 {
            // a sweep replaces the family parameter, so only the swept values must be valid
            let points = if self.eigen.sweep.is_empty() || self.drift.parameter().is_none() {
                vec![self.drift.clone()]
            } else {
                self.eigen.sweep.iter().map(|&p| self.drift.with_parameter(p)).collect()
            };
            for d in points {
                if let Err(e) = d.to_spec(z.half_width) {
                    v.push(format!("drift: {e}"));
                }
            }
        }
        if let Err(e) = self.process.params() {
            v.push(format!("process: {e}"));
        }
        if !self.process.x0.is_finite() || self.process.x0.abs() > z.half_width {
            v.push(format!("process: x0 = {} must lie in [-L, L]", self.process.x0));
        }
        match self.peg.kind {
            PegChoice::NoArbitrage => {
                if self.peg.r_star_star.is_some() || self.peg.r_star_fraction.is_some() {
                    v.push("peg: no_arbitrage takes neither r_star_star nor r_star_fraction".into());
                }
            }
            PegChoice::Linear => match (self.peg.r_star_star, self.peg.r_star_fraction) {
                (Some(r), None) | (None, Some(r)) if r.is_finite() => {}
                (Some(_), Some(_)) => v.push("peg: give r_star_star or r_star_fraction, not both".into()),
                (None, None) => v.push("peg: linear needs r_star_star or r_star_fraction".into()),
                _ => v.push("peg: scale must be finite".into()),
            },
        }
        if self.eigen.nodes < 5 || self.eigen.nodes % 2 == 0 {
            v.push(format!("eigen: nodes must be odd and at least 5, got {}", self.eigen.nodes));
        }
        if self.eigen.sweep.iter().any(|p| !p.is_finite()) {
            v.push("eigen: sweep values must be finite".into());
        }
        if !self.eigen.sweep.is_empty() && self.drift.parameter().is_none() {
            v.push(format!("eigen: drift kind {:?} has no parameter to sweep", self.drift.kind));
        }
        let p = &self.pricing;
        if !p.r_domestic.is_finite() {
            v.push("pricing: r_domestic must be finite".into());
        }
        if !(p.maturity.is_finite() && p.maturity > 0.0) {
            v.push(format!("pricing: maturity must be positive, got {}", p.maturity));
        }
        if p.nx < 3 || p.nx % 2 == 0 {
            v.push(format!("pricing: nx must be odd and at least 3, got {}", p.nx));
        }
        if p.nt == 0 {
            v.push("pricing: nt must be at least 1".into());
        }
        if p.surface_stride == 0 {
            v.push("pricing: surface_stride must be at least 1".into());
        }
        if self.output.dir.is_empty() {
            v.push("output: dir must not be empty".into());
        }
        v
    }

    pub fn zone(&self) -> Result<TargetZone, tzlab::Error> {
        let z = &self.zone;
        TargetZone::new(z.s_minus, z.s_plus, z.s_star, z.half_width)
    }
}

fn apply_override(doc: &mut Value, item: &str) -> Result<(), String> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| format!("override `{item}` is not of the form key=value"))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(format!("override key `{key}` has an empty segment"));
    }
    let mut node = doc;
    for part in &parts[..parts.len() - 1] {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| format!("override `{key}`: `{part}` is not inside an object"))?;
        node = obj.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    let obj = node
        .as_object_mut()
        .ok_or_else(|| format!("override `{key}`: parent is not an object"))?;
    obj.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

/// Every key of `doc` absent from `template`, descending only into sections
/// whose template is itself an object.
fn unknown_keys(doc: &Value, template: &Value, prefix: &str, out: &mut Vec<String>) {
    let (Some(d), Some(t)) = (doc.as_object(), template.as_object()) else {
        return;
    };
    for (k, v) in d {
        let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match t.get(k) {
            None => out.push(format!("unknown key `{path}`")),
            Some(tv) if tv.is_object() => unknown_keys(v, tv, &path, out),
            Some(_) => {}
        }
    }
}
