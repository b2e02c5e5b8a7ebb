//! Run configuration: a sectioned key-value text format and builders for the
//! core objects.
//!
//! ```text
//! [field]
//! n = 5
//! bump = 0.5 0 0 0 0 -0.3 0.25    # center (n coords), amplitude, width
//!
//! [integrator]
//! tol = 1e-8
//! pert = exp_decay 0.1 1.0
//! ```
//!
//! Unknown keys are rejected. Every scenario has a complete default
//! configuration, so a config file only needs the keys it changes.

use shadowflow_core::chart::{self, Point};
use shadowflow_core::coeffs::{make_coefficients, CoefficientOverrides, CoefficientSet};
use shadowflow_core::field::{Bump, CurvatureField};
use shadowflow_core::integrator::{PertFamily, PerturbationModel, SignPolicy, TargetChannels};
use shadowflow_core::kernel::GreenKernelModel;
use shadowflow_core::modification::ModificationConfig;
use std::collections::BTreeSet;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("[{section}] {key}: {msg}")]
    BadValue {
        section: &'static str,
        key: String,
        msg: String,
    },
    #[error("unknown scenario '{0}' (expected divergence, compactified, mixed, off_max or tower)")]
    UnknownScenario(String),
    #[error("{0}")]
    Build(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    Divergence,
    Compactified,
    Mixed,
    OffMax,
    Tower,
}

impl Scenario {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "divergence" => Ok(Scenario::Divergence),
            "compactified" => Ok(Scenario::Compactified),
            "mixed" => Ok(Scenario::Mixed),
            "off_max" => Ok(Scenario::OffMax),
            "tower" => Ok(Scenario::Tower),
            other => Err(ConfigError::UnknownScenario(other.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Divergence => "divergence",
            Scenario::Compactified => "compactified",
            Scenario::Mixed => "mixed",
            Scenario::OffMax => "off_max",
            Scenario::Tower => "tower",
        }
    }
}

#[derive(Clone, Debug)]
pub struct FieldConfig {
    pub n: usize,
    pub chart_radius: f64,
    pub quartic_form: bool,
    /// Per bump: center coordinates (n of them), amplitude, width.
    pub bumps: Vec<(Point, f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct KernelConfig {
    pub h0: f64,
    pub h_table: Option<Vec<(f64, f64)>>,
}

#[derive(Clone, Debug)]
pub struct ModConfig {
    pub eps_strength: f64,
    pub eps_inner: f64,
}

#[derive(Clone, Debug)]
pub struct PertConfig {
    pub family: PertFamily,
    pub adversarial: bool,
    pub seed: u64,
    pub channels: TargetChannels,
}

#[derive(Clone, Debug)]
pub struct IntegratorConfig {
    pub tol: f64,
    /// `None` means scenario-adaptive horizon.
    pub t_end: Option<f64>,
    pub max_steps: usize,
    pub lambda_max_factor: f64,
    pub lambda_min_factor: f64,
    pub collision_eps: f64,
    pub pert: PertConfig,
}

#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    /// Use the compactified field in zero-weak-limit scenarios.
    pub modified: bool,
    pub seed: u64,
    pub weight_base: f64,
    /// Neighborhood scale of the divergence hypotheses.
    pub eps0: f64,
    pub lambdas: Vec<f64>,
    pub centers: Vec<Point>,
    pub omega: Vec<f64>,
    pub global_alpha: f64,
    pub growth_target: f64,
    pub theta_eps: f64,
    pub wall_budget_secs: f64,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub field: FieldConfig,
    pub kernel: KernelConfig,
    pub coefficients: CoefficientOverrides,
    pub modification: ModConfig,
    pub integrator: IntegratorConfig,
    pub scenario: ScenarioConfig,
}

impl RunConfig {
    /// Complete defaults for a scenario.
    pub fn default_for(scenario: Scenario) -> Self {
        let mut cfg = RunConfig {
            field: FieldConfig {
                n: 5,
                chart_radius: 1.0,
                quartic_form: true,
                bumps: Vec::new(),
            },
            kernel: KernelConfig {
                h0: 0.5,
                h_table: None,
            },
            coefficients: CoefficientOverrides::default(),
            modification: ModConfig {
                eps_strength: 0.1,
                eps_inner: 0.0125,
            },
            integrator: IntegratorConfig {
                tol: 1e-8,
                t_end: None,
                max_steps: 2_000_000,
                lambda_max_factor: 1e3,
                lambda_min_factor: 1e-2,
                collision_eps: 0.25,
                pert: PertConfig {
                    family: PertFamily::Off,
                    adversarial: true,
                    seed: 0,
                    channels: TargetChannels {
                        log_lambda: true,
                        ..Default::default()
                    },
                },
            },
            scenario: ScenarioConfig {
                scenario,
                modified: scenario == Scenario::Compactified,
                seed: 1,
                weight_base: 10.0,
                eps0: 0.05,
                lambdas: vec![1e4],
                centers: vec![chart::from_coords(&[0.05])],
                omega: vec![1.0],
                global_alpha: 1.0,
                growth_target: 10.0,
                theta_eps: 1e-4,
                wall_budget_secs: 60.0,
            },
        };
        match scenario {
            Scenario::Divergence | Scenario::Compactified => {}
            Scenario::Mixed => {
                cfg.scenario.lambdas = vec![100.0];
                cfg.scenario.centers = vec![chart::ZERO];
                cfg.integrator.t_end = Some(60.0);
            }
            Scenario::OffMax => {
                cfg.field.bumps = vec![(chart::from_coords(&[0.5]), -0.3, 0.25)];
                cfg.scenario.lambdas = vec![100.0];
                // Placed at the bump's critical point by the runner.
                cfg.scenario.centers = vec![chart::from_coords(&[0.5])];
                cfg.integrator.t_end = Some(5.0);
            }
            Scenario::Tower => {
                cfg.scenario.lambdas = vec![1e4, 1e5];
                cfg.scenario.centers =
                    vec![chart::from_coords(&[0.02]), chart::from_coords(&[-0.02])];
                cfg.scenario.theta_eps = 1.5e-4;
                cfg.integrator.t_end = Some(3e7);
            }
        }
        cfg
    }

    /// Parses a config text on top of the scenario defaults. The scenario can
    /// come from the file (`[scenario] name = ...`) or the caller.
    pub fn parse(text: &str, fallback: Option<Scenario>) -> Result<Self, ConfigError> {
        let raw = parse_sections(text)?;
        let mut scenario = fallback;
        for (section, key, value, line) in &raw {
            if section == "scenario" && key == "name" {
                scenario = Some(Scenario::parse(value).map_err(|e| ConfigError::Parse {
                    line: *line,
                    msg: e.to_string(),
                })?);
            }
        }
        let scenario = scenario.ok_or(ConfigError::Parse {
            line: 0,
            msg: "no scenario given (set [scenario] name or pass one on the command line)"
                .to_string(),
        })?;
        let mut cfg = RunConfig::default_for(scenario);
        cfg.apply(&raw)?;
        Ok(cfg)
    }

    fn apply(&mut self, raw: &[(String, String, String, usize)]) -> Result<(), ConfigError> {
        // Lists replace the defaults wholesale on first occurrence.
        let mut cleared = BTreeSet::new();
        for (section, key, value, line) in raw {
            self.apply_one(section, key, value, &mut cleared)
                .map_err(|msg| ConfigError::Parse {
                    line: *line,
                    msg: format!("[{section}] {key}: {msg}"),
                })?;
        }
        Ok(())
    }

    /// Applies one key (also the entry point for `sweep --param`).
    pub fn set(&mut self, dotted: &str, value: &str) -> Result<(), ConfigError> {
        let (section, key) = dotted.split_once('.').ok_or_else(|| {
            ConfigError::Build(format!("parameter '{dotted}' must be written section.key"))
        })?;
        let mut cleared = BTreeSet::new();
        self.apply_one(section, key, value, &mut cleared)
            .map_err(|msg| ConfigError::Build(format!("[{section}] {key}: {msg}")))
    }

    fn apply_one(
        &mut self,
        section: &str,
        key: &str,
        value: &str,
        cleared: &mut BTreeSet<String>,
    ) -> Result<(), String> {
        match (section, key) {
            ("field", "n") => self.field.n = parse_num(value)? as usize,
            ("field", "chart_radius") => self.field.chart_radius = parse_num(value)?,
            ("field", "quartic_form") => self.field.quartic_form = parse_bool(value)?,
            ("field", "bump") => {
                if cleared.insert("field.bump".to_string()) {
                    self.field.bumps.clear();
                }
                let v = parse_nums(value)?;
                if v.len() != self.field.n + 2 {
                    return Err(format!(
                        "expected {} numbers (center, amplitude, width)",
                        self.field.n + 2
                    ));
                }
                let center = chart::from_coords(&v[..self.field.n]);
                self.field
                    .bumps
                    .push((center, v[self.field.n], v[self.field.n + 1]));
            }
            ("kernel", "h0") => self.kernel.h0 = parse_num(value)?,
            ("kernel", "h_table") => {
                let v = parse_nums(value)?;
                if v.len() < 4 || v.len() % 2 != 0 {
                    return Err("expected radius/value pairs".to_string());
                }
                let table: Vec<(f64, f64)> = v.chunks(2).map(|c| (c[0], c[1])).collect();
                if table.iter().any(|&(_, h)| h <= 0.0) {
                    return Err("regular-part values must be positive".to_string());
                }
                self.kernel.h_table = Some(table);
            }
            ("coefficients", "gamma1") => self.coefficients.gamma1 = Some(parse_num(value)?),
            ("coefficients", "gamma2") => self.coefficients.gamma2 = Some(parse_num(value)?),
            ("coefficients", "gamma3") => self.coefficients.gamma3 = Some(parse_num(value)?),
            ("coefficients", "gamma4") => self.coefficients.gamma4 = Some(parse_num(value)?),
            ("coefficients", "gamma_nabla_lap") => {
                self.coefficients.gamma_nabla_lap = Some(parse_num(value)?)
            }
            ("coefficients", "b_lambda") => self.coefficients.b_lambda = Some(parse_num(value)?),
            ("coefficients", "b_a") => self.coefficients.b_a = Some(parse_num(value)?),
            ("coefficients", "kappa") => self.coefficients.kappa = Some(parse_num(value)?),
            ("modification", "eps_strength") => self.modification.eps_strength = parse_num(value)?,
            ("modification", "eps_inner") => self.modification.eps_inner = parse_num(value)?,
            ("integrator", "tol") => self.integrator.tol = parse_num(value)?,
            ("integrator", "t_end") => {
                self.integrator.t_end = if value == "auto" {
                    None
                } else {
                    Some(parse_num(value)?)
                }
            }
            ("integrator", "max_steps") => self.integrator.max_steps = parse_num(value)? as usize,
            ("integrator", "lambda_max_factor") => {
                self.integrator.lambda_max_factor = parse_num(value)?
            }
            ("integrator", "lambda_min_factor") => {
                self.integrator.lambda_min_factor = parse_num(value)?
            }
            ("integrator", "collision_eps") => self.integrator.collision_eps = parse_num(value)?,
            ("integrator", "pert") => {
                let parts: Vec<&str> = value.split_whitespace().collect();
                self.integrator.pert.family = match parts.as_slice() {
                    ["off"] => PertFamily::Off,
                    ["exp_decay", c, b] => PertFamily::ExpDecay {
                        c: parse_num(c)?,
                        beta: parse_num(b)?,
                    },
                    ["power", c, s] => PertFamily::Power {
                        c: parse_num(c)?,
                        s: parse_num(s)?,
                    },
                    ["nonintegrable", c] => PertFamily::NonIntegrable { c: parse_num(c)? },
                    _ => {
                        return Err(
                            "expected off | exp_decay c beta | power c s | nonintegrable c"
                                .to_string(),
                        )
                    }
                };
            }
            ("integrator", "pert_sign") => {
                self.integrator.pert.adversarial = match value {
                    "adversarial" => true,
                    "random" => false,
                    _ => return Err("expected adversarial | random".to_string()),
                }
            }
            ("integrator", "pert_seed") => self.integrator.pert.seed = parse_num(value)? as u64,
            ("integrator", "pert_channels") => {
                let mut ch = TargetChannels::default();
                for c in value.split(',').map(str::trim) {
                    match c {
                        "log_alpha" => ch.log_alpha = true,
                        "log_lambda" => ch.log_lambda = true,
                        "position" => ch.position = true,
                        _ => return Err(format!("unknown channel '{c}'")),
                    }
                }
                self.integrator.pert.channels = ch;
            }
            ("scenario", "name") => {
                self.scenario.scenario = Scenario::parse(value).map_err(|e| e.to_string())?
            }
            ("scenario", "modified") => self.scenario.modified = parse_bool(value)?,
            ("scenario", "seed") => self.scenario.seed = parse_num(value)? as u64,
            ("scenario", "weight_base") => self.scenario.weight_base = parse_num(value)?,
            ("scenario", "eps0") => self.scenario.eps0 = parse_num(value)?,
            ("scenario", "lambda") => self.scenario.lambdas = parse_nums(value)?,
            ("scenario", "omega") => self.scenario.omega = parse_nums(value)?,
            ("scenario", "global_alpha") => self.scenario.global_alpha = parse_num(value)?,
            ("scenario", "growth_target") => self.scenario.growth_target = parse_num(value)?,
            ("scenario", "theta_eps") => self.scenario.theta_eps = parse_num(value)?,
            ("scenario", "wall_budget_secs") => self.scenario.wall_budget_secs = parse_num(value)?,
            ("scenario", k) if k.starts_with("center") => {
                let idx: usize = k["center".len()..]
                    .parse()
                    .map_err(|_| format!("bad center index in '{k}'"))?;
                if idx == 0 {
                    return Err("center indices are 1-based".to_string());
                }
                let v = parse_nums(value)?;
                if v.len() != self.field.n {
                    return Err(format!("expected {} coordinates", self.field.n));
                }
                if cleared.insert("scenario.center".to_string()) {
                    self.scenario.centers.clear();
                }
                if self.scenario.centers.len() < idx {
                    self.scenario.centers.resize(idx, chart::ZERO);
                }
                self.scenario.centers[idx - 1] = chart::from_coords(&v);
            }
            _ => return Err("unknown key".to_string()),
        }
        Ok(())
    }

    pub fn build_field(&self) -> Result<CurvatureField, ConfigError> {
        let bumps = self
            .field
            .bumps
            .iter()
            .map(|&(center, amplitude, width)| Bump {
                center,
                amplitude,
                width,
            })
            .collect();
        CurvatureField::new(
            self.field.n,
            self.field.chart_radius,
            self.field.quartic_form,
            bumps,
        )
        .map_err(|e| ConfigError::Build(e.to_string()))
    }

    pub fn build_kernel(&self) -> GreenKernelModel {
        match &self.kernel.h_table {
            Some(table) => {
                GreenKernelModel::with_regular_table(self.field.n, self.kernel.h0, table.clone())
            }
            None => GreenKernelModel::new(self.field.n, self.kernel.h0),
        }
    }

    pub fn build_coeffs(&self) -> Result<CoefficientSet, ConfigError> {
        make_coefficients(self.field.n, &self.coefficients)
            .map_err(|e| ConfigError::Build(e.to_string()))
    }

    pub fn build_mconf(&self) -> Result<ModificationConfig, ConfigError> {
        ModificationConfig::new(self.modification.eps_strength, self.modification.eps_inner)
            .map_err(|e| ConfigError::Build(e.to_string()))
    }

    pub fn build_pert(&self, adversarial_sign: f64) -> PerturbationModel {
        PerturbationModel {
            family: self.integrator.pert.family,
            sign: if self.integrator.pert.adversarial {
                SignPolicy::Adversarial {
                    sign: adversarial_sign,
                }
            } else {
                SignPolicy::Random {
                    seed: self.integrator.pert.seed ^ self.scenario.seed,
                }
            },
            channels: self.integrator.pert.channels,
        }
    }

    /// Canonical text form of the effective configuration.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[field]");
        let _ = writeln!(s, "n = {}", self.field.n);
        let _ = writeln!(s, "chart_radius = {}", self.field.chart_radius);
        let _ = writeln!(s, "quartic_form = {}", self.field.quartic_form);
        for (c, a, w) in &self.field.bumps {
            let coords: Vec<String> = c[..self.field.n].iter().map(f64::to_string).collect();
            let _ = writeln!(s, "bump = {} {} {}", coords.join(" "), a, w);
        }
        let _ = writeln!(s, "[kernel]");
        let _ = writeln!(s, "h0 = {}", self.kernel.h0);
        if let Some(t) = &self.kernel.h_table {
            let flat: Vec<String> = t
                .iter()
                .flat_map(|&(r, h)| [r.to_string(), h.to_string()])
                .collect();
            let _ = writeln!(s, "h_table = {}", flat.join(" "));
        }
        let _ = writeln!(s, "[coefficients]");
        let ov = &self.coefficients;
        for (name, v) in [
            ("gamma1", ov.gamma1),
            ("gamma2", ov.gamma2),
            ("gamma3", ov.gamma3),
            ("gamma4", ov.gamma4),
            ("gamma_nabla_lap", ov.gamma_nabla_lap),
            ("b_lambda", ov.b_lambda),
            ("b_a", ov.b_a),
            ("kappa", ov.kappa),
        ] {
            if let Some(v) = v {
                let _ = writeln!(s, "{name} = {v}");
            }
        }
        let _ = writeln!(s, "[modification]");
        let _ = writeln!(s, "eps_strength = {}", self.modification.eps_strength);
        let _ = writeln!(s, "eps_inner = {}", self.modification.eps_inner);
        let _ = writeln!(s, "[integrator]");
        let _ = writeln!(s, "tol = {}", self.integrator.tol);
        match self.integrator.t_end {
            Some(t) => {
                let _ = writeln!(s, "t_end = {t}");
            }
            None => {
                let _ = writeln!(s, "t_end = auto");
            }
        }
        let _ = writeln!(s, "max_steps = {}", self.integrator.max_steps);
        let _ = writeln!(
            s,
            "lambda_max_factor = {}",
            self.integrator.lambda_max_factor
        );
        let _ = writeln!(
            s,
            "lambda_min_factor = {}",
            self.integrator.lambda_min_factor
        );
        let _ = writeln!(s, "collision_eps = {}", self.integrator.collision_eps);
        let pert = &self.integrator.pert;
        let fam = match pert.family {
            PertFamily::Off => "off".to_string(),
            PertFamily::ExpDecay { c, beta } => format!("exp_decay {c} {beta}"),
            PertFamily::Power { c, s } => format!("power {c} {s}"),
            PertFamily::NonIntegrable { c } => format!("nonintegrable {c}"),
        };
        let _ = writeln!(s, "pert = {fam}");
        let _ = writeln!(
            s,
            "pert_sign = {}",
            if pert.adversarial {
                "adversarial"
            } else {
                "random"
            }
        );
        let mut chs = Vec::new();
        if pert.channels.log_alpha {
            chs.push("log_alpha");
        }
        if pert.channels.log_lambda {
            chs.push("log_lambda");
        }
        if pert.channels.position {
            chs.push("position");
        }
        let _ = writeln!(s, "pert_channels = {}", chs.join(","));
        let _ = writeln!(s, "[scenario]");
        let sc = &self.scenario;
        let _ = writeln!(s, "name = {}", sc.scenario.name());
        let _ = writeln!(s, "modified = {}", sc.modified);
        let _ = writeln!(s, "seed = {}", sc.seed);
        let _ = writeln!(s, "weight_base = {}", sc.weight_base);
        let _ = writeln!(s, "eps0 = {}", sc.eps0);
        let lam: Vec<String> = sc.lambdas.iter().map(f64::to_string).collect();
        let _ = writeln!(s, "lambda = {}", lam.join(" "));
        for (i, c) in sc.centers.iter().enumerate() {
            let coords: Vec<String> = c[..self.field.n].iter().map(f64::to_string).collect();
            let _ = writeln!(s, "center{} = {}", i + 1, coords.join(" "));
        }
        let om: Vec<String> = sc.omega.iter().map(f64::to_string).collect();
        let _ = writeln!(s, "omega = {}", om.join(" "));
        let _ = writeln!(s, "global_alpha = {}", sc.global_alpha);
        let _ = writeln!(s, "growth_target = {}", sc.growth_target);
        let _ = writeln!(s, "theta_eps = {}", sc.theta_eps);
        let _ = writeln!(s, "wall_budget_secs = {}", sc.wall_budget_secs);
        s
    }
}

fn parse_num(v: &str) -> Result<f64, String> {
    v.parse::<f64>().map_err(|_| format!("not a number: '{v}'"))
}

fn parse_nums(v: &str) -> Result<Vec<f64>, String> {
    v.split_whitespace().map(parse_num).collect()
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(format!("not a boolean: '{v}'")),
    }
}

/// Splits the text into `(section, key, value, line)` tuples.
fn parse_sections(text: &str) -> Result<Vec<(String, String, String, usize)>, ConfigError> {
    let mut out = Vec::new();
    let mut section = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or(ConfigError::Parse {
                line: lineno + 1,
                msg: "unterminated section header".to_string(),
            })?;
            section = name.trim().to_string();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(ConfigError::Parse {
            line: lineno + 1,
            msg: "expected key = value".to_string(),
        })?;
        if section.is_empty() {
            return Err(ConfigError::Parse {
                line: lineno + 1,
                msg: "key outside any [section]".to_string(),
            });
        }
        out.push((
            section.clone(),
            key.trim().to_string(),
            value.trim().to_string(),
            lineno + 1,
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_echo() {
        for sc in [
            Scenario::Divergence,
            Scenario::Compactified,
            Scenario::Mixed,
            Scenario::OffMax,
            Scenario::Tower,
        ] {
            let cfg = RunConfig::default_for(sc);
            let echo = cfg.echo();
            let back = RunConfig::parse(&echo, None).unwrap();
            assert_eq!(back.echo(), echo, "{sc:?}");
        }
    }

    #[test]
    fn overrides_apply() {
        let text = "\
[scenario]
name = divergence
seed = 7
lambda = 2e4
center1 = 0.04 0 0 0 0

[integrator]
tol = 1e-9
pert = exp_decay 0.1 1.0
";
        let cfg = RunConfig::parse(text, None).unwrap();
        assert_eq!(cfg.scenario.seed, 7);
        assert_eq!(cfg.scenario.lambdas, vec![2e4]);
        assert_eq!(cfg.scenario.centers.len(), 1);
        assert_eq!(cfg.scenario.centers[0][0], 0.04);
        assert_eq!(cfg.integrator.tol, 1e-9);
        assert_eq!(
            cfg.integrator.pert.family,
            PertFamily::ExpDecay { c: 0.1, beta: 1.0 }
        );
    }

    #[test]
    fn unknown_key_rejected() {
        let text = "[scenario]\nname = divergence\ntypo_key = 3\n";
        assert!(RunConfig::parse(text, None).is_err());
    }

    #[test]
    fn bump_list_replaces_defaults() {
        let text = "\
[scenario]
name = off_max

[field]
bump = 0.4 0 0 0 0 -0.2 0.2
bump = -0.4 0 0 0 0 -0.2 0.2
";
        let cfg = RunConfig::parse(text, None).unwrap();
        assert_eq!(cfg.field.bumps.len(), 2);
        assert_eq!(cfg.field.bumps[0].0[0], 0.4);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

        /// The echoed form of any config built from valid numeric overrides
        /// is a fixed point of parse -> echo.
        #[test]
        fn echo_parse_fixed_point(
            g2 in 1e-3f64..1e3,
            g4 in 1e-3f64..1e3,
            tol in 1e-12f64..1e-4,
            lambda0 in 1e2f64..1e8,
            seed in 0u64..1_000_000,
        ) {
            let mut cfg = RunConfig::default_for(Scenario::Divergence);
            cfg.coefficients.gamma2 = Some(g2);
            cfg.coefficients.gamma4 = Some(g4);
            cfg.integrator.tol = tol;
            cfg.scenario.lambdas = vec![lambda0];
            cfg.scenario.seed = seed;
            let echo = cfg.echo();
            let back = RunConfig::parse(&echo, None).unwrap();
            proptest::prop_assert_eq!(back.echo(), echo);
        }
    }

    #[test]
    fn dotted_setter() {
        let mut cfg = RunConfig::default_for(Scenario::Divergence);
        cfg.set("coefficients.gamma4", "0.5").unwrap();
        assert_eq!(cfg.coefficients.gamma4, Some(0.5));
        assert!(cfg.set("integrator.nope", "1").is_err());
    }
}
