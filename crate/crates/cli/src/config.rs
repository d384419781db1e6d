//! Experiment configuration: a key = value file, overridden by CLI flags,
//! validated against the target operation's preconditions before any
//! compute starts.

use consensus_lab::dynamics::InfluenceFunction;
use consensus_lab::network::{ControlShape, FamilySpec};
use consensus_lab::profile::Profile;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Experiment {
    Build,
    Spectrum,
    GapStudy,
    Simulate,
    ControlCost,
    GraphLimit,
    MeanField,
    Subordination,
}

impl Experiment {
    pub fn from_subcommand(name: &str) -> Option<Experiment> {
        Some(match name {
            "build" => Experiment::Build,
            "spectrum" => Experiment::Spectrum,
            "gap-study" => Experiment::GapStudy,
            "simulate" => Experiment::Simulate,
            "control-cost" => Experiment::ControlCost,
            "graph-limit" => Experiment::GraphLimit,
            "mean-field" => Experiment::MeanField,
            "subordination" => Experiment::Subordination,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Build => "build",
            Experiment::Spectrum => "spectrum",
            Experiment::GapStudy => "gap-study",
            Experiment::Simulate => "simulate",
            Experiment::ControlCost => "control-cost",
            Experiment::GraphLimit => "graph-limit",
            Experiment::MeanField => "mean-field",
            Experiment::Subordination => "subordination",
        }
    }
}

/// Raw key-value configuration plus the experiment selector.
#[derive(Clone, Debug)]
pub struct Config {
    pub experiment: Experiment,
    pub entries: BTreeMap<String, String>,
}

impl Config {
    pub fn new(experiment: Experiment) -> Self {
        Config {
            experiment,
            entries: BTreeMap::new(),
        }
    }

    /// Loads `key = value` lines; `#` starts a comment.
    pub fn merge_file(&mut self, content: &str) -> Result<(), String> {
        for (lineno, raw) in content.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", lineno + 1))?;
            self.entries
                .insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut map = self.entries.clone();
        map.insert("experiment".into(), self.experiment.name().into());
        map
    }

    // --- typed getters -----------------------------------------------------

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, String> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| format!("{key}: not an integer: {v}")),
        }
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, String> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| format!("{key}: not a number: {v}")),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, String> {
        match self.get(key) {
            None => Ok(default),
            Some("true") | Some("1") => Ok(true),
            Some("false") | Some("0") => Ok(false),
            Some(v) => Err(format!("{key}: not a boolean: {v}")),
        }
    }

    pub fn usize_list(&self, key: &str) -> Result<Vec<usize>, String> {
        match self.get(key) {
            None => Ok(Vec::new()),
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| format!("{key}: bad list entry: {s}"))
                })
                .collect(),
        }
    }

    pub fn u32_list(&self, key: &str) -> Result<Vec<u32>, String> {
        match self.get(key) {
            None => Ok(Vec::new()),
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<u32>()
                        .map_err(|_| format!("{key}: bad list entry: {s}"))
                })
                .collect(),
        }
    }

    pub fn family_spec(&self) -> Result<FamilySpec, String> {
        let scaled = self.bool_or("scaled", false)?;
        match self.get("family") {
            Some("path") => Ok(FamilySpec::Path { scaled }),
            Some("grid2d") => Ok(FamilySpec::Grid2D { scaled }),
            Some("dense-periodic") => {
                let r = self.f64_or("r", f64::NAN)?;
                if r.is_nan() {
                    return Err("dense-periodic family requires r".into());
                }
                Ok(FamilySpec::DensePeriodic { r, scaled })
            }
            Some("fractional") => {
                let alpha = self.f64_or("alpha", f64::NAN)?;
                if alpha.is_nan() {
                    return Err("fractional family requires alpha".into());
                }
                let c_alpha = self.f64_or("c-alpha", 1.0)?;
                Ok(FamilySpec::Fractional {
                    alpha,
                    c_alpha,
                    scaled,
                })
            }
            Some(other) => Err(format!("unknown family: {other}")),
            None => Err("missing family (path | grid2d | dense-periodic | fractional)".into()),
        }
    }

    pub fn profile(&self) -> Result<Profile, String> {
        match self.get("profile").unwrap_or("sin") {
            "sin" => Ok(Profile::Sin),
            "linear" => Ok(Profile::Linear),
            spec if spec.starts_with("const:") => spec[6..]
                .parse()
                .map(Profile::Constant)
                .map_err(|_| format!("bad constant profile: {spec}")),
            spec if spec.starts_with("seeded:") => {
                let parts: Vec<&str> = spec[7..].split(':').collect();
                if parts.len() != 2 {
                    return Err("seeded profile needs seeded:<lo>:<hi>".into());
                }
                let lo = parts[0].parse().map_err(|_| "bad seeded lo".to_string())?;
                let hi = parts[1].parse().map_err(|_| "bad seeded hi".to_string())?;
                let seed = self
                    .get("seed")
                    .ok_or("seed is mandatory for randomized initial data")?
                    .parse()
                    .map_err(|_| "seed: not an integer".to_string())?;
                Ok(Profile::SeededUniform { lo, hi, seed })
            }
            other => Err(format!("unknown profile: {other}")),
        }
    }

    pub fn influence(&self) -> Result<InfluenceFunction, String> {
        match self.get("influence").unwrap_or("const:1") {
            spec if spec.starts_with("const:") => spec[6..]
                .parse()
                .map(InfluenceFunction::Constant)
                .map_err(|_| format!("bad influence constant: {spec}")),
            spec if spec.starts_with("rational:") => spec[9..]
                .parse()
                .map(|beta| InfluenceFunction::RationalDecay { beta })
                .map_err(|_| format!("bad rational decay: {spec}")),
            spec if spec.starts_with("indicator:") => spec[10..]
                .parse()
                .map(|radius| InfluenceFunction::Indicator { radius })
                .map_err(|_| format!("bad indicator radius: {spec}")),
            other => Err(format!("unknown influence: {other}")),
        }
    }

    pub fn control_shape(&self) -> Result<ControlShape, String> {
        match self.get("control").unwrap_or("single:0") {
            spec if spec.starts_with("single:") => spec[7..]
                .parse()
                .map(ControlShape::SingleNode)
                .map_err(|_| format!("bad control index: {spec}")),
            spec if spec.starts_with("strip:") => {
                let parts: Vec<&str> = spec[6..].split(':').collect();
                if parts.len() != 2 {
                    return Err("strip control needs strip:<a>:<b>".into());
                }
                let a = parts[0].parse().map_err(|_| "bad strip a".to_string())?;
                let b = parts[1].parse().map_err(|_| "bad strip b".to_string())?;
                Ok(ControlShape::InteriorStrip { a, b })
            }
            "side" => Ok(ControlShape::GridSide),
            other => Err(format!("unknown control shape: {other}")),
        }
    }

    /// Precondition checks for the selected experiment; empty list means a
    /// later `run` will not hit a validation failure.
    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        let mut need_family = || {
            if let Err(e) = self.family_spec() {
                violations.push(e);
                return false;
            }
            true
        };
        match self.experiment {
            Experiment::Build | Experiment::Spectrum | Experiment::GapStudy => {
                need_family();
            }
            Experiment::ControlCost => {
                need_family();
                if let Err(e) = self.control_shape() {
                    violations.push(e);
                }
            }
            Experiment::Simulate => match self.get("kind").unwrap_or("linear") {
                "linear" | "second-order" => {
                    need_family();
                }
                "alignment" | "second-order-alignment" => {
                    if let Err(e) = self.influence() {
                        violations.push(e);
                    }
                }
                other => violations.push(format!("unknown simulate kind: {other}")),
            },
            Experiment::GraphLimit => {
                if self.get("family") == Some("dense-periodic") || self.get("family").is_none() {
                    if let Err(e) = self.f64_or("r", 0.25) {
                        violations.push(e);
                    }
                }
                if let (Ok(sizes), Ok(m_quad)) =
                    (self.usize_list("n-list"), self.usize_or("m-quad", 0))
                {
                    if m_quad > 0 {
                        for n in sizes {
                            if !m_quad.is_multiple_of(n) {
                                violations.push(format!(
                                    "m-quad = {m_quad} must be a multiple of every N (violated by {n})"
                                ));
                            }
                        }
                    }
                }
            }
            Experiment::MeanField | Experiment::Subordination => {
                if let Err(e) = self.influence() {
                    violations.push(e);
                }
            }
        }
        // family-parameter ranges
        if let Ok(r) = self.f64_or("r", 0.25) {
            if self.get("r").is_some() && !(0.0..=0.5).contains(&r) {
                violations.push(format!("r > 1/2 (got {r})"));
            }
            if self.get("r").is_some() && (0.0..=0.5).contains(&r) {
                if let Ok(n) = self.usize_or("n", 0) {
                    if n > 0 && (r * n as f64 + 0.5).floor() < 1.0 {
                        violations.push(format!(
                            "radius r = {r} rounds to zero neighbors at N = {n}"
                        ));
                    }
                }
            }
        }
        if let Ok(alpha) = self.f64_or("alpha", 0.5) {
            if self.get("alpha").is_some() && !(alpha > 0.0 && alpha < 1.0) {
                violations.push(format!("alpha outside (0, 1) (got {alpha})"));
            }
        }
        match self.f64_or("t", 1.0) {
            Ok(t) if t <= 0.0 => violations.push(format!("horizon t must be positive (got {t})")),
            Err(e) => violations.push(e),
            _ => {}
        }
        // step-size stability pre-check with a suggestion
        if matches!(self.experiment, Experiment::Simulate) {
            if let (Ok(dt), Ok(spec)) = (self.f64_or("dt", 0.01), self.family_spec()) {
                if let Ok(n) = self.usize_or("n", 16) {
                    if let Ok(model) = spec.build::<f64>(n) {
                        let bound = model.laplacian().gershgorin_bound();
                        let dt_max = 1.8 / bound.max(1e-300);
                        if dt > dt_max {
                            violations.push(format!(
                                "dt = {dt} exceeds the stability bound 1.8/lambda_max; suggested dt <= {dt_max:.3e}"
                            ));
                        }
                    }
                }
            }
        }
        if self.get("profile").map(|p| p.starts_with("seeded")) == Some(true)
            && self.get("seed").is_none()
        {
            violations.push("seed is mandatory for randomized initial data".into());
        }
        violations
    }
}
