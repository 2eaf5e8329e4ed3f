//! Experiment configuration.
//!
//! Configs are flat `key = value` text grouped under `[section]` headers,
//! with `#` starting a comment line. `[experiment]` holds the kind, seed,
//! and output directory; one further section, named after the kind, holds
//! that experiment's parameters. Unknown sections and keys are rejected.
//! Every run serializes the fully resolved config (defaults filled in,
//! keys sorted) and hashes that text, so two runs agree on their config
//! hash exactly when every effective parameter agrees.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::CliError;
use sopkit::projection::ProjectionBounds;

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Experiment selector; each kind maps one-to-one onto a subcommand and a
/// config section of the same name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    SopTable,
    CountEigs,
    Project,
    JlTail,
    Train,
    Possim,
    ComplexityTable,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::SopTable,
        ExperimentKind::CountEigs,
        ExperimentKind::Project,
        ExperimentKind::JlTail,
        ExperimentKind::Train,
        ExperimentKind::Possim,
        ExperimentKind::ComplexityTable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::SopTable => "sop-table",
            ExperimentKind::CountEigs => "count-eigs",
            ExperimentKind::Project => "project",
            ExperimentKind::JlTail => "jl-tail",
            ExperimentKind::Train => "train",
            ExperimentKind::Possim => "possim",
            ExperimentKind::ComplexityTable => "complexity-table",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

/// Secrecy-outage bound table: one row per (intensity, correlation) cell.
#[derive(Debug, Clone)]
pub struct SopTableParams {
    pub intensities: Vec<f64>,
    pub rhos: Vec<f64>,
    pub samples: usize,
    pub eve_offset: f64,
    pub power: f64,
    pub noise: f64,
}

impl Default for SopTableParams {
    fn default() -> Self {
        Self {
            intensities: vec![0.0, 0.5, 1.0],
            rhos: vec![0.1, 0.2],
            samples: 20_000,
            eve_offset: 200.0,
            power: 1e7,
            noise: 1.0,
        }
    }
}

impl SopTableParams {
    fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "intensities" => self.intensities = parse_list_f64(key, value)?,
            "rhos" => self.rhos = parse_list_f64(key, value)?,
            "samples" => self.samples = parse_usize(key, value)?,
            "eve_offset" => self.eve_offset = parse_f64(key, value)?,
            "power" => self.power = parse_f64(key, value)?,
            "noise" => self.noise = parse_f64(key, value)?,
            _ => return Err(unknown_key("sop-table", key)),
        }
        Ok(())
    }

    fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("eve_offset", self.eve_offset.to_string()),
            ("intensities", join_f64(&self.intensities)),
            ("noise", self.noise.to_string()),
            ("power", self.power.to_string()),
            ("rhos", join_f64(&self.rhos)),
            ("samples", self.samples.to_string()),
        ]
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.samples == 0 {
            return Err(bad("sop-table: samples must be >= 1"));
        }
        if self.intensities.is_empty() || self.rhos.is_empty() {
            return Err(bad("sop-table: intensities and rhos must be non-empty"));
        }
        if self.intensities.iter().any(|v| *v < 0.0) {
            return Err(bad("sop-table: intensities must be non-negative"));
        }
        if self.rhos.iter().any(|v| *v < 0.0) {
            return Err(bad("sop-table: rhos must be non-negative"));
        }
        if !(self.eve_offset > 0.0) || !(self.power > 0.0) || !(self.noise > 0.0) {
            return Err(bad("sop-table: eve_offset, power, and noise must be positive"));
        }
        Ok(())
    }
}

/// Contour eigenvalue count on one circle; the pencil is either the
/// built-in diag(0.5, 2) against the identity or read from a text file.
#[derive(Debug, Clone)]
pub struct CountEigsParams {
    pub radius: f64,
    pub center_re: f64,
    pub center_im: f64,
    pub nodes: usize,
    /// Path to a pencil file; empty selects the built-in example pencil.
    pub pencil_file: String,
}

impl Default for CountEigsParams {
    fn default() -> Self {
        Self { radius: 1.0, center_re: 0.0, center_im: 0.0, nodes: 256, pencil_file: String::new() }
    }
}

impl CountEigsParams {
    fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "radius" => self.radius = parse_f64(key, value)?,
            "center_re" => self.center_re = parse_f64(key, value)?,
            "center_im" => self.center_im = parse_f64(key, value)?,
            "nodes" => self.nodes = parse_usize(key, value)?,
            "pencil_file" => self.pencil_file = value.to_string(),
            _ => return Err(unknown_key("count-eigs", key)),
        }
        Ok(())
    }

    fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("center_im", self.center_im.to_string()),
            ("center_re", self.center_re.to_string()),
            ("nodes", self.nodes.to_string()),
            ("pencil_file", self.pencil_file.clone()),
            ("radius", self.radius.to_string()),
        ]
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.radius > 0.0) {
            return Err(bad("count-eigs: radius must be positive"));
        }
        if self.nodes < 16 {
            return Err(bad("count-eigs: nodes must be >= 16"));
        }
        Ok(())
    }
}

/// Margin-function and projected-update table over a parameter grid.
#[derive(Debug, Clone)]
pub struct ProjectParams {
    pub theta_min: f64,
    pub theta_max: f64,
    pub eta: f64,
    pub steps: usize,
    pub update: f64,
}

impl Default for ProjectParams {
    fn default() -> Self {
        Self { theta_min: -1.0, theta_max: 1.0, eta: 0.1, steps: 21, update: 1.0 }
    }
}

impl ProjectParams {
    fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "theta_min" => self.theta_min = parse_f64(key, value)?,
            "theta_max" => self.theta_max = parse_f64(key, value)?,
            "eta" => self.eta = parse_f64(key, value)?,
            "steps" => self.steps = parse_usize(key, value)?,
            "update" => self.update = parse_f64(key, value)?,
            _ => return Err(unknown_key("project", key)),
        }
        Ok(())
    }

    fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("eta", self.eta.to_string()),
            ("steps", self.steps.to_string()),
            ("theta_max", self.theta_max.to_string()),
            ("theta_min", self.theta_min.to_string()),
            ("update", self.update.to_string()),
        ]
    }

    fn validate(&self) -> Result<(), CliError> {
        ProjectionBounds::new(self.theta_min, self.theta_max, self.eta)
            .map_err(|e| bad(format!("project: {e}")))?;
        if self.steps < 2 {
            return Err(bad("project: steps must be >= 2"));
        }
        if !(self.update != 0.0) || !self.update.is_finite() {
            return Err(bad("project: update must be finite and non-zero"));
        }
        Ok(())
    }
}

/// Random-projection tail frequencies against the analytic bound on a
/// (subspace dimension, shrinkage threshold) grid.
#[derive(Debug, Clone)]
pub struct JlTailParams {
    pub n: usize,
    pub ks: Vec<usize>,
    pub tau2s: Vec<f64>,
    pub trials: usize,
}

impl Default for JlTailParams {
    fn default() -> Self {
        Self { n: 64, ks: vec![5, 10, 20, 40], tau2s: vec![0.2, 0.5, 0.8], trials: 100_000 }
    }
}

impl JlTailParams {
    fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "n" => self.n = parse_usize(key, value)?,
            "ks" => self.ks = parse_list_usize(key, value)?,
            "tau2s" => self.tau2s = parse_list_f64(key, value)?,
            "trials" => self.trials = parse_usize(key, value)?,
            _ => return Err(unknown_key("jl-tail", key)),
        }
        Ok(())
    }

    fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("ks", join_usize(&self.ks)),
            ("n", self.n.to_string()),
            ("tau2s", join_f64(&self.tau2s)),
            ("trials", self.trials.to_string()),
        ]
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.trials < 10_000 {
            return Err(bad("jl-tail: trials must be >= 10000 for a stable tail estimate"));
        }
        if self.ks.is_empty() || self.tau2s.is_empty() {
            return Err(bad("jl-tail: ks and tau2s must be non-empty"));
        }
        if self.ks.iter().any(|&k| k == 0 || k >= self.n) {
            return Err(bad("jl-tail: every k must satisfy 1 <= k < n"));
        }
        if self.tau2s.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
            return Err(bad("jl-tail: every tau2 must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Actor-critic training on the eigenvalue-ensemble environment.
#[derive(Debug, Clone)]
pub struct TrainParams {
    pub steps: usize,
    pub discount: f64,
    pub u0: usize,
    pub v0: usize,
    pub ensemble_beta: f64,
    /// `diminishing` or `constant`; the constant rates below apply only
    /// to the latter but are always part of the resolved config.
    pub schedule: String,
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
}

impl Default for TrainParams {
    fn default() -> Self {
        Self {
            steps: 5000,
            discount: 0.9,
            u0: 5,
            v0: 7,
            ensemble_beta: 2.0,
            schedule: "diminishing".to_string(),
            alpha: 0.05,
            beta: 0.05,
            epsilon: 0.1,
        }
    }
}

impl TrainParams {
    fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "steps" => self.steps = parse_usize(key, value)?,
            "discount" => self.discount = parse_f64(key, value)?,
            "u0" => self.u0 = parse_usize(key, value)?,
            "v0" => self.v0 = parse_usize(key, value)?,
            "ensemble_beta" => self.ensemble_beta = parse_f64(key, value)?,
            "schedule" => self.schedule = value.to_string(),
            "alpha" => self.alpha = parse_f64(key, value)?,
            "beta" => self.beta = parse_f64(key, value)?,
            "epsilon" => self.epsilon = parse_f64(key, value)?,
            _ => return Err(unknown_key("train", key)),
        }
        Ok(())
    }

    fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("alpha", self.alpha.to_string()),
            ("beta", self.beta.to_string()),
            ("discount", self.discount.to_string()),
            ("ensemble_beta", self.ensemble_beta.to_string()),
            ("epsilon", self.epsilon.to_string()),
            ("schedule", self.schedule.clone()),
            ("steps", self.steps.to_string()),
            ("u0", self.u0.to_string()),
            ("v0", self.v0.to_string()),
        ]
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.discount > 0.0 && self.discount < 1.0) {
            return Err(bad("train: discount must lie in (0, 1)"));
        }
        if self.u0 == 0 || self.v0 == 0 {
            return Err(bad("train: u0 and v0 must be >= 1"));
        }
        if !(self.ensemble_beta > 0.0) {
            return Err(bad("train: ensemble_beta must be positive"));
        }
        match self.schedule.as_str() {
            "diminishing" | "constant" => {}
            other => {
                return Err(bad(format!(
                    "train: schedule must be diminishing or constant, got {other:?}"
                )))
            }
        }
        if !(self.alpha >= 0.0) || !(self.beta >= 0.0) {
            return Err(bad("train: alpha and beta must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(bad("train: epsilon must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Two-mode semi-Markov switching simulation with scalar plants.
#[derive(Debug, Clone)]
pub struct PossimParams {
    pub jumps: usize,
    pub stable_a: f64,
    pub unstable_a: f64,
    pub hold_mean: f64,
    /// Possibility of switching modes; staying put always has grade 1.
    pub cross: f64,
    pub noise: f64,
}

impl Default for PossimParams {
    fn default() -> Self {
        Self { jumps: 10, stable_a: 0.8, unstable_a: 1.2, hold_mean: 3.0, cross: 0.7, noise: 0.01 }
    }
}

impl PossimParams {
    fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "jumps" => self.jumps = parse_usize(key, value)?,
            "stable_a" => self.stable_a = parse_f64(key, value)?,
            "unstable_a" => self.unstable_a = parse_f64(key, value)?,
            "hold_mean" => self.hold_mean = parse_f64(key, value)?,
            "cross" => self.cross = parse_f64(key, value)?,
            "noise" => self.noise = parse_f64(key, value)?,
            _ => return Err(unknown_key("possim", key)),
        }
        Ok(())
    }

    fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("cross", self.cross.to_string()),
            ("hold_mean", self.hold_mean.to_string()),
            ("jumps", self.jumps.to_string()),
            ("noise", self.noise.to_string()),
            ("stable_a", self.stable_a.to_string()),
            ("unstable_a", self.unstable_a.to_string()),
        ]
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.jumps == 0 {
            return Err(bad("possim: jumps must be >= 1"));
        }
        if !(self.stable_a.abs() <= 1.0) {
            return Err(bad("possim: stable_a must satisfy |a| <= 1"));
        }
        if !(self.unstable_a.abs() > 1.0) {
            return Err(bad("possim: unstable_a must satisfy |a| > 1"));
        }
        if !(self.hold_mean > 0.0) {
            return Err(bad("possim: hold_mean must be positive"));
        }
        if !(0.0..=1.0).contains(&self.cross) {
            return Err(bad("possim: cross must lie in [0, 1]"));
        }
        if !(self.noise >= 0.0) {
            return Err(bad("possim: noise must be non-negative"));
        }
        Ok(())
    }
}

/// Greedy threshold search run under both objectives, reported as
/// checkpointed complexity and accuracy ratios.
#[derive(Debug, Clone)]
pub struct ComplexityParams {
    pub samples: usize,
    pub sigma: f64,
    pub thresholds: usize,
    pub checkpoints: Vec<usize>,
}

impl Default for ComplexityParams {
    fn default() -> Self {
        Self { samples: 4000, sigma: 1.0, thresholds: 8, checkpoints: vec![0, 50, 100] }
    }
}

impl ComplexityParams {
    fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "samples" => self.samples = parse_usize(key, value)?,
            "sigma" => self.sigma = parse_f64(key, value)?,
            "thresholds" => self.thresholds = parse_usize(key, value)?,
            "checkpoints" => self.checkpoints = parse_list_usize(key, value)?,
            _ => return Err(unknown_key("complexity-table", key)),
        }
        Ok(())
    }

    fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("checkpoints", join_usize(&self.checkpoints)),
            ("samples", self.samples.to_string()),
            ("sigma", self.sigma.to_string()),
            ("thresholds", self.thresholds.to_string()),
        ]
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.samples < 100 {
            return Err(bad("complexity-table: samples must be >= 100"));
        }
        if !(self.sigma > 0.0) {
            return Err(bad("complexity-table: sigma must be positive"));
        }
        if self.thresholds == 0 {
            return Err(bad("complexity-table: thresholds must be >= 1"));
        }
        if self.checkpoints.is_empty() {
            return Err(bad("complexity-table: checkpoints must be non-empty"));
        }
        Ok(())
    }
}

/// Per-kind parameter block.
#[derive(Debug, Clone)]
pub enum Params {
    SopTable(SopTableParams),
    CountEigs(CountEigsParams),
    Project(ProjectParams),
    JlTail(JlTailParams),
    Train(TrainParams),
    Possim(PossimParams),
    ComplexityTable(ComplexityParams),
}

impl Params {
    fn defaults_for(kind: ExperimentKind) -> Self {
        match kind {
            ExperimentKind::SopTable => Params::SopTable(SopTableParams::default()),
            ExperimentKind::CountEigs => Params::CountEigs(CountEigsParams::default()),
            ExperimentKind::Project => Params::Project(ProjectParams::default()),
            ExperimentKind::JlTail => Params::JlTail(JlTailParams::default()),
            ExperimentKind::Train => Params::Train(TrainParams::default()),
            ExperimentKind::Possim => Params::Possim(PossimParams::default()),
            ExperimentKind::ComplexityTable => Params::ComplexityTable(ComplexityParams::default()),
        }
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match self {
            Params::SopTable(p) => p.set(key, value),
            Params::CountEigs(p) => p.set(key, value),
            Params::Project(p) => p.set(key, value),
            Params::JlTail(p) => p.set(key, value),
            Params::Train(p) => p.set(key, value),
            Params::Possim(p) => p.set(key, value),
            Params::ComplexityTable(p) => p.set(key, value),
        }
    }

    fn entries(&self) -> Vec<(&'static str, String)> {
        match self {
            Params::SopTable(p) => p.entries(),
            Params::CountEigs(p) => p.entries(),
            Params::Project(p) => p.entries(),
            Params::JlTail(p) => p.entries(),
            Params::Train(p) => p.entries(),
            Params::Possim(p) => p.entries(),
            Params::ComplexityTable(p) => p.entries(),
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        match self {
            Params::SopTable(p) => p.validate(),
            Params::CountEigs(p) => p.validate(),
            Params::Project(p) => p.validate(),
            Params::JlTail(p) => p.validate(),
            Params::Train(p) => p.validate(),
            Params::Possim(p) => p.validate(),
            Params::ComplexityTable(p) => p.validate(),
        }
    }
}

/// A fully resolved run request: kind, seed, output directory, and the
/// kind's parameters with defaults applied.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub out: PathBuf,
    pub params: Params,
}

impl ExperimentConfig {
    /// Canonical text form: `[experiment]` first, then the kind section,
    /// keys sorted within each. This is the text that gets hashed.
    pub fn resolved_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[experiment]");
        let _ = writeln!(s, "kind = {}", self.kind.name());
        let _ = writeln!(s, "out = {}", self.out.display());
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s);
        let _ = writeln!(s, "[{}]", self.kind.name());
        for (k, v) in self.params.entries() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}

type RawSections = BTreeMap<String, Vec<(String, String)>>;

/// Parses section-grouped `key = value` text, keeping insertion order per
/// section. Duplicate sections and duplicate keys are rejected.
pub fn parse_raw(text: &str) -> Result<RawSections, CliError> {
    let mut sections: RawSections = BTreeMap::new();
    let mut current: Option<String> = None;
    for (lineno, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| bad(format!("line {}: unterminated section header", lineno + 1)))?
                .trim();
            if name.is_empty() {
                return Err(bad(format!("line {}: empty section name", lineno + 1)));
            }
            if sections.contains_key(name) {
                return Err(bad(format!("line {}: duplicate section [{name}]", lineno + 1)));
            }
            sections.insert(name.to_string(), Vec::new());
            current = Some(name.to_string());
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(bad(format!("line {}: expected key = value, got {line:?}", lineno + 1)));
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(bad(format!("line {}: empty key", lineno + 1)));
        }
        let Some(section) = &current else {
            return Err(bad(format!("line {}: key {key:?} appears before any [section]", lineno + 1)));
        };
        let entries = sections.get_mut(section).expect("current section exists");
        if entries.iter().any(|(k, _)| k == key) {
            return Err(bad(format!("line {}: duplicate key {key:?} in [{section}]", lineno + 1)));
        }
        entries.push((key.to_string(), value.to_string()));
    }
    Ok(sections)
}

/// Builds the resolved config from parsed text plus command-line
/// overrides; `forced_kind` comes from the subcommand.
pub fn build(
    raw: &RawSections,
    forced_kind: Option<ExperimentKind>,
    seed_flag: Option<u64>,
    out_flag: Option<PathBuf>,
) -> Result<ExperimentConfig, CliError> {
    let mut kind = forced_kind;
    let mut seed: u64 = 0;
    let mut out = PathBuf::from("sopkit-out");

    if let Some(entries) = raw.get("experiment") {
        for (key, value) in entries {
            match key.as_str() {
                "kind" => {
                    let named = ExperimentKind::from_name(value)
                        .ok_or_else(|| bad(format!("unknown experiment kind {value:?}")))?;
                    if let Some(forced) = forced_kind {
                        if forced != named {
                            return Err(bad(format!(
                                "config kind {:?} does not match the {:?} subcommand",
                                named.name(),
                                forced.name()
                            )));
                        }
                    }
                    kind = Some(named);
                }
                "seed" => seed = parse_u64("seed", value)?,
                "out" => out = PathBuf::from(value),
                other => return Err(unknown_key("experiment", other)),
            }
        }
    }

    let kind = kind.ok_or_else(|| bad("no experiment kind: pass a subcommand or set [experiment] kind"))?;

    let mut params = Params::defaults_for(kind);
    for (name, entries) in raw {
        if name == "experiment" {
            continue;
        }
        if name != kind.name() {
            return Err(bad(format!("unknown section [{name}] for a {} run", kind.name())));
        }
        for (key, value) in entries {
            params.set(key, value)?;
        }
    }

    if let Some(s) = seed_flag {
        seed = s;
    }
    if let Some(o) = out_flag {
        out = o;
    }

    params.validate()?;
    Ok(ExperimentConfig { kind, seed, out, params })
}

/// Reads (optionally) a config file and applies overrides.
pub fn load(
    path: Option<&Path>,
    forced_kind: Option<ExperimentKind>,
    seed_flag: Option<u64>,
    out_flag: Option<PathBuf>,
) -> Result<ExperimentConfig, CliError> {
    let raw = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| bad(format!("cannot read config {}: {e}", p.display())))?;
            parse_raw(&text)?
        }
        None => RawSections::new(),
    };
    build(&raw, forced_kind, seed_flag, out_flag)
}

fn unknown_key(section: &str, key: &str) -> CliError {
    bad(format!("unknown key {key:?} in [{section}]"))
}

fn parse_f64(key: &str, value: &str) -> Result<f64, CliError> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| bad(format!("{key}: expected a finite number, got {value:?}")))
}

fn parse_u64(key: &str, value: &str) -> Result<u64, CliError> {
    value
        .parse::<u64>()
        .map_err(|_| bad(format!("{key}: expected an unsigned integer, got {value:?}")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize, CliError> {
    value
        .parse::<usize>()
        .map_err(|_| bad(format!("{key}: expected an unsigned integer, got {value:?}")))
}

fn parse_list_f64(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    value.split(',').map(|tok| parse_f64(key, tok.trim())).collect()
}

fn parse_list_usize(key: &str, value: &str) -> Result<Vec<usize>, CliError> {
    value.split(',').map(|tok| parse_usize(key, tok.trim())).collect()
}

fn join_f64(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn join_usize(values: &[usize]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve_for_every_kind() {
        for kind in ExperimentKind::ALL {
            let cfg = build(&RawSections::new(), Some(kind), None, None).unwrap();
            assert_eq!(cfg.kind, kind);
            assert_eq!(cfg.seed, 0);
            let text = cfg.resolved_text();
            assert!(text.starts_with("[experiment]\n"));
            assert!(text.contains(&format!("kind = {}", kind.name())));
        }
    }

    #[test]
    fn kind_names_roundtrip() {
        for kind in ExperimentKind::ALL {
            assert_eq!(ExperimentKind::from_name(kind.name()), Some(kind));
        }
        assert_eq!(ExperimentKind::from_name("nope"), None);
    }

    #[test]
    fn file_values_and_flags_take_effect() {
        let raw = parse_raw(
            "# comment\n[experiment]\nkind = train\nseed = 9\nout = somewhere\n\n[train]\nsteps = 12\ndiscount = 0.5\n",
        )
        .unwrap();
        let cfg = build(&raw, None, Some(33), Some(PathBuf::from("elsewhere"))).unwrap();
        assert_eq!(cfg.kind, ExperimentKind::Train);
        assert_eq!(cfg.seed, 33);
        assert_eq!(cfg.out, PathBuf::from("elsewhere"));
        let Params::Train(p) = &cfg.params else { panic!("wrong params") };
        assert_eq!(p.steps, 12);
        assert_eq!(p.discount, 0.5);
        assert_eq!(p.u0, 5);
    }

    #[test]
    fn unknown_keys_sections_and_kinds_are_rejected() {
        let raw = parse_raw("[experiment]\nkind = train\n\n[train]\nbogus = 1\n").unwrap();
        assert!(matches!(build(&raw, None, None, None), Err(CliError::Config(_))));

        let raw = parse_raw("[experiment]\nkind = train\n\n[volume]\nsamples = 10\n").unwrap();
        assert!(matches!(build(&raw, None, None, None), Err(CliError::Config(_))));

        let raw = parse_raw("[experiment]\nkind = warp\n").unwrap();
        assert!(matches!(build(&raw, None, None, None), Err(CliError::Config(_))));

        let raw = parse_raw("[experiment]\nkind = train\n").unwrap();
        let err = build(&raw, Some(ExperimentKind::Possim), None, None);
        assert!(matches!(err, Err(CliError::Config(_))));
    }

    #[test]
    fn parser_rejects_malformed_text() {
        assert!(parse_raw("key = 1\n").is_err());
        assert!(parse_raw("[a\nk = 1\n").is_err());
        assert!(parse_raw("[a]\nnot a pair\n").is_err());
        assert!(parse_raw("[a]\nk = 1\nk = 2\n").is_err());
        assert!(parse_raw("[a]\n[a]\n").is_err());
        assert!(parse_raw("[]\n").is_err());
    }

    #[test]
    fn resolved_text_is_stable_and_complete() {
        let cfg = build(&RawSections::new(), Some(ExperimentKind::JlTail), Some(7), None).unwrap();
        let text = cfg.resolved_text();
        let reparsed = parse_raw(&text).unwrap();
        let rebuilt = build(&reparsed, None, None, None).unwrap();
        assert_eq!(rebuilt.resolved_text(), text);
        assert!(text.contains("ks = 5,10,20,40"));
        assert!(text.contains("tau2s = 0.2,0.5,0.8"));
        assert!(text.contains("seed = 7"));
    }

    #[test]
    fn bad_parameter_values_are_config_errors() {
        let cases = [
            ("jl-tail", "trials = 100"),
            ("jl-tail", "ks = 0,5"),
            ("jl-tail", "tau2s = 1.5"),
            ("project", "eta = 2"),
            ("project", "steps = 1"),
            ("train", "discount = 1"),
            ("train", "schedule = sometimes"),
            ("possim", "stable_a = 1.5"),
            ("possim", "unstable_a = 0.5"),
            ("complexity-table", "samples = 10"),
            ("sop-table", "samples = 0"),
            ("count-eigs", "radius = -1"),
        ];
        for (kind, line) in cases {
            let text = format!("[experiment]\nkind = {kind}\n\n[{kind}]\n{line}\n");
            let raw = parse_raw(&text).unwrap();
            assert!(
                matches!(build(&raw, None, None, None), Err(CliError::Config(_))),
                "{kind}: {line} should be rejected"
            );
        }
    }
}
