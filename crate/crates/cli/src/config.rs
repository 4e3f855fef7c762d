//! TOML study configurations, built-in presets and their resolution into
//! simulation scenarios.
//!
//! Values given on the command line win over values in a scenario table,
//! which win over top-level keys, which win over built-in defaults.

use serde::Deserialize;

use robust_ancova::simulation::STANDARD_GROUP_SIZES;
use robust_ancova::{ErrorDistribution, HcFlavor, Scale, SimulationScenario, VarianceScenario};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct ConfigError {
    /// Key path of the offending entry, e.g. `scenario[2].group_sizes`.
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError { path: path.into(), message: message.into() }
    }
}

/// Settings supplied on the command line.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub alpha: Option<f64>,
    pub flavor: Option<HcFlavor>,
    pub scale: Option<Scale>,
}

/// One scenario as written in a configuration file; every key is optional so
/// that tables can inherit from each other.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioTable {
    pub group_sizes: Option<Vec<usize>>,
    pub distribution: Option<String>,
    pub variance_scenario: Option<String>,
    pub variances: Option<Vec<f64>>,
    pub mu: Option<Vec<f64>>,
    pub coefficients: Option<Vec<f64>>,
    pub flavor: Option<String>,
    pub n_sim: Option<usize>,
    pub n_boot: Option<usize>,
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
}

impl ScenarioTable {
    /// Field-wise `self` if set, else `fallback`.
    fn or(self, fallback: &ScenarioTable) -> ScenarioTable {
        let f = fallback.clone();
        ScenarioTable {
            group_sizes: self.group_sizes.or(f.group_sizes),
            distribution: self.distribution.or(f.distribution),
            variance_scenario: self.variance_scenario.or(f.variance_scenario),
            variances: self.variances.or(f.variances),
            mu: self.mu.or(f.mu),
            coefficients: self.coefficients.or(f.coefficients),
            flavor: self.flavor.or(f.flavor),
            n_sim: self.n_sim.or(f.n_sim),
            n_boot: self.n_boot.or(f.n_boot),
            alpha: self.alpha.or(f.alpha),
            seed: self.seed.or(f.seed),
        }
    }

    fn resolve(&self, path: &str, ov: &Overrides) -> Result<SimulationScenario, ConfigError> {
        let key = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
        let group_sizes = self.group_sizes.clone().ok_or_else(|| ConfigError::new(key("group_sizes"), "missing"))?;
        let a = group_sizes.len();
        let distribution = match &self.distribution {
            Some(s) => s.parse::<ErrorDistribution>().map_err(|e| ConfigError::new(key("distribution"), e.to_string()))?,
            None => return Err(ConfigError::new(key("distribution"), "missing")),
        };
        let variances = match (&self.variance_scenario, &self.variances) {
            (Some(_), Some(_)) => {
                return Err(ConfigError::new(key("variances"), "give either variance_scenario or variances, not both"))
            }
            (Some(s), None) => {
                s.parse::<VarianceScenario>().map_err(|e| ConfigError::new(key("variance_scenario"), e.to_string()))?
            }
            (None, Some(v)) => VarianceScenario::Custom(v.clone()),
            (None, None) => return Err(ConfigError::new(key("variance_scenario"), "missing")),
        };
        let flavor = match (ov.flavor, &self.flavor) {
            (Some(f), _) => f,
            (None, Some(s)) => s.parse::<HcFlavor>().map_err(|e| ConfigError::new(key("flavor"), e))?,
            (None, None) => HcFlavor::HC2,
        };
        let (n_sim, n_boot) = match ov.scale {
            Some(scale) => (scale.n_sim(), scale.n_boot()),
            None => (
                self.n_sim.unwrap_or(Scale::Desk.n_sim()),
                self.n_boot.unwrap_or(Scale::Desk.n_boot()),
            ),
        };
        let scenario = SimulationScenario {
            mu: self.mu.clone().unwrap_or_else(|| vec![0.0; a]),
            coefficients: self.coefficients.clone().unwrap_or_else(|| robust_ancova::simulation::DEFAULT_COEFFICIENTS.to_vec()),
            group_sizes,
            distribution,
            variances,
            n_sim,
            n_boot,
            alpha: ov.alpha.or(self.alpha).unwrap_or(0.05),
            flavor,
            seed: ov.seed.or(self.seed).unwrap_or(0),
        };
        scenario.validate().map_err(|e| ConfigError::new(if path.is_empty() { "config" } else { path }, e.to_string()))?;
        Ok(scenario)
    }
}

fn parse_table(text: &str) -> Result<toml::Table, ConfigError> {
    text.parse::<toml::Table>().map_err(|e| ConfigError::new("config", e.message().to_string() + &location(text, e.span())))
}

fn location(text: &str, span: Option<std::ops::Range<usize>>) -> String {
    match span {
        Some(r) => format!(" (line {})", text[..r.start.min(text.len())].matches('\n').count() + 1),
        None => String::new(),
    }
}

fn take_string(table: &mut toml::Table, key: &str) -> Result<Option<String>, ConfigError> {
    match table.remove(key) {
        None => Ok(None),
        Some(toml::Value::String(s)) => Ok(Some(s)),
        Some(other) => Err(ConfigError::new(key, format!("expected a string, found {}", other.type_str()))),
    }
}

fn scenario_table(value: toml::Value, path: &str) -> Result<ScenarioTable, ConfigError> {
    ScenarioTable::deserialize(value).map_err(|e| ConfigError::new(if path.is_empty() { "config" } else { path }, e.message()))
}

fn scenario_list(table: &mut toml::Table) -> Result<Vec<ScenarioTable>, ConfigError> {
    match table.remove("scenario") {
        None => Ok(Vec::new()),
        Some(toml::Value::Array(items)) => items
            .into_iter()
            .enumerate()
            .map(|(i, v)| scenario_table(v, &format!("scenario[{i}]")))
            .collect(),
        Some(other) => Err(ConfigError::new("scenario", format!("expected an array of tables, found {}", other.type_str()))),
    }
}

const TABLE_SIZE_LABELS: [&str; 5] = ["n1", "n2", "n3", "n4", "n5"];

fn table_rows(distributions: &[ErrorDistribution], flavor: Option<HcFlavor>) -> Vec<ScenarioTable> {
    let mut rows = Vec::new();
    for variance in ["I", "II", "III"] {
        for sizes in STANDARD_GROUP_SIZES {
            for d in distributions {
                rows.push(ScenarioTable {
                    group_sizes: Some(sizes.to_vec()),
                    distribution: Some(d.name().to_string()),
                    variance_scenario: Some(variance.to_string()),
                    flavor: flavor.map(|f| f.name().to_string()),
                    ..ScenarioTable::default()
                });
            }
        }
    }
    rows
}

/// Names accepted by `simulate --preset` and `preset = "..."`.
pub const SIMULATE_PRESETS: [&str; 3] = ["paper_table1", "paper_table2", "paper_table3"];

/// Scenario tables of a built-in simulation preset.
pub fn simulate_preset(name: &str) -> Option<Vec<ScenarioTable>> {
    use ErrorDistribution::*;
    match name {
        // HC2; normal, lognormal and double exponential errors
        "paper_table1" => Some(table_rows(&[StandardNormal, Lognormal, DoubleExponential], None)),
        // HC2; chi-squared errors
        "paper_table2" => Some(table_rows(&[ChiSquared5], None)),
        // HC0; all four error distributions
        "paper_table3" => Some(table_rows(&ErrorDistribution::ALL, Some(HcFlavor::HC0))),
        _ => None,
    }
}

/// Label `n1`..`n5` of a standard group-size vector, if it is one.
pub fn size_label(sizes: &[usize]) -> Option<&'static str> {
    STANDARD_GROUP_SIZES.iter().position(|s| s.as_slice() == sizes).map(|i| TABLE_SIZE_LABELS[i])
}

/// Scenarios of a `simulate` configuration.
pub fn parse_simulate(text: &str, ov: &Overrides) -> Result<Vec<SimulationScenario>, ConfigError> {
    let mut table = parse_table(text)?;
    let preset = take_string(&mut table, "preset")?;
    let list = scenario_list(&mut table)?;
    let defaults = scenario_table(toml::Value::Table(table), "")?;
    let rows: Vec<(String, ScenarioTable)> = match preset {
        Some(name) => {
            if !list.is_empty() {
                return Err(ConfigError::new("scenario", "cannot be combined with a preset"));
            }
            let rows = simulate_preset(&name).ok_or_else(|| {
                ConfigError::new("preset", format!("unknown preset `{name}` (expected one of {})", SIMULATE_PRESETS.join(", ")))
            })?;
            rows.into_iter().enumerate().map(|(i, r)| (format!("preset {name} row {}", i + 1), r.or(&defaults))).collect()
        }
        None if list.is_empty() => vec![(String::new(), defaults)],
        None => list.into_iter().enumerate().map(|(i, r)| (format!("scenario[{i}]"), r.or(&defaults))).collect(),
    };
    rows.iter().map(|(path, row)| row.resolve(path, ov)).collect()
}

/// Equally spaced grid from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl DeltaGrid {
    pub fn points(&self) -> Result<Vec<f64>, String> {
        let DeltaGrid { start, stop, step } = *self;
        if !(start.is_finite() && stop.is_finite() && step > 0.0 && step.is_finite()) {
            return Err("start and stop must be finite and step positive".into());
        }
        if stop < start {
            return Err("stop must not be below start".into());
        }
        let intervals = ((stop - start) / step).round();
        if (start + intervals * step - stop).abs() > 1e-9 * step.max(stop.abs()) {
            return Err("stop - start must be a multiple of step".into());
        }
        Ok((0..=intervals as usize).map(|k| start + k as f64 * step).collect())
    }
}

/// A power study: delta grid plus a two-group base scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerRequest {
    pub deltas: Vec<f64>,
    pub base: SimulationScenario,
}

pub const POWER_PRESETS: [&str; 1] = ["paper_figure1"];

fn power_defaults() -> ScenarioTable {
    ScenarioTable {
        group_sizes: Some(vec![15, 15]),
        distribution: Some("normal".into()),
        variances: Some(vec![1.0, 1.0]),
        ..ScenarioTable::default()
    }
}

pub fn parse_power(text: &str, ov: &Overrides) -> Result<PowerRequest, ConfigError> {
    let mut table = parse_table(text)?;
    let preset = take_string(&mut table, "preset")?;
    let deltas = table.remove("deltas");
    let grid = table.remove("delta_grid");
    let own = scenario_table(toml::Value::Table(table), "")?;
    if own.mu.is_some() {
        return Err(ConfigError::new("mu", "group means are set by the delta grid"));
    }
    let mut defaults = power_defaults();
    if own.variance_scenario.is_some() {
        defaults.variances = None;
    }
    let grid_points = |v: toml::Value| -> Result<Vec<f64>, ConfigError> {
        let g = DeltaGrid::deserialize(v).map_err(|e| ConfigError::new("delta_grid", e.message()))?;
        g.points().map_err(|m| ConfigError::new("delta_grid", m))
    };
    let deltas = match (deltas, grid) {
        (Some(_), Some(_)) => return Err(ConfigError::new("deltas", "give either deltas or delta_grid, not both")),
        (Some(v), None) => Vec::<f64>::deserialize(v).map_err(|e| ConfigError::new("deltas", e.message()))?,
        (None, Some(v)) => grid_points(v)?,
        (None, None) => match preset.as_deref() {
            Some("paper_figure1") => DeltaGrid { start: 0.0, stop: 3.0, step: 0.1 }.points().expect("valid grid"),
            _ => return Err(ConfigError::new("deltas", "missing (give deltas or delta_grid)")),
        },
    };
    if let Some(name) = &preset {
        if !POWER_PRESETS.contains(&name.as_str()) {
            return Err(ConfigError::new(
                "preset",
                format!("unknown preset `{name}` (expected one of {})", POWER_PRESETS.join(", ")),
            ));
        }
    }
    if deltas.is_empty() {
        return Err(ConfigError::new("deltas", "empty"));
    }
    if let Some(d) = deltas.iter().find(|d| !d.is_finite()) {
        return Err(ConfigError::new("deltas", format!("non-finite value {d}")));
    }
    let base = own.or(&defaults).resolve("", ov)?;
    if base.group_sizes.len() != 2 {
        return Err(ConfigError::new("group_sizes", "a power study needs exactly two groups"));
    }
    Ok(PowerRequest { deltas, base })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_scenario() {
        let text = r#"
            group_sizes = [5, 10, 20, 25]
            distribution = "lognormal"
            variance_scenario = "II"
            flavor = "hc0"
            n_sim = 10
            n_boot = 20
            alpha = 0.1
            seed = 9
        "#;
        let s = parse_simulate(text, &Overrides::default()).unwrap();
        assert_eq!(s.len(), 1);
        let s = &s[0];
        assert_eq!(s.group_sizes, vec![5, 10, 20, 25]);
        assert_eq!(s.distribution, ErrorDistribution::Lognormal);
        assert_eq!(s.variances, VarianceScenario::II);
        assert_eq!((s.flavor, s.n_sim, s.n_boot, s.alpha, s.seed), (HcFlavor::HC0, 10, 20, 0.1, 9));
        assert_eq!(s.mu, vec![0.0; 4]);
    }

    #[test]
    fn command_line_wins() {
        let text = "group_sizes = [3, 3]\ndistribution = \"normal\"\nvariance_scenario = \"I\"\nseed = 4\nn_sim = 7\n";
        let ov = Overrides { seed: Some(11), scale: Some(Scale::Paper), flavor: Some(HcFlavor::HC0), alpha: None };
        let s = &parse_simulate(text, &ov).unwrap()[0];
        assert_eq!((s.seed, s.n_sim, s.n_boot, s.flavor), (11, 5000, 5000, HcFlavor::HC0));
    }

    #[test]
    fn unknown_keys_are_rejected_with_their_path() {
        let err = parse_simulate("grup_sizes = [3, 3]\n", &Overrides::default()).unwrap_err();
        assert_eq!(err.path, "config");
        assert!(err.message.contains("grup_sizes"), "{err}");
        let text = "distribution = \"normal\"\nvariance_scenario = \"I\"\n[[scenario]]\ngroup_sizes = [2, 2]\n[[scenario]]\ngroup_size = [2]\n";
        let err = parse_simulate(text, &Overrides::default()).unwrap_err();
        assert_eq!(err.path, "scenario[1]");
    }

    #[test]
    fn invalid_values_name_their_key() {
        let base = "group_sizes = [3, 3]\nvariance_scenario = \"I\"\n";
        let err = parse_simulate(&format!("{base}distribution = \"cauchy\"\n"), &Overrides::default()).unwrap_err();
        assert_eq!(err.path, "distribution");
        let err = parse_simulate(&format!("{base}distribution = \"normal\"\nalpha = 1.5\n"), &Overrides::default())
            .unwrap_err();
        assert_eq!(err.path, "config");
        let err = parse_simulate("group_sizes = 3\n", &Overrides::default()).unwrap_err();
        assert!(err.message.contains("sequence") || err.message.contains("array"), "{err}");
        assert!(parse_simulate("x = [", &Overrides::default()).is_err());
    }

    #[test]
    fn scenario_list_inherits_top_level_keys() {
        let text = "distribution = \"normal\"\nvariance_scenario = \"II\"\nn_sim = 3\n[[scenario]]\ngroup_sizes = [2, 2]\n[[scenario]]\ngroup_sizes = [3, 4]\nvariance_scenario = \"III\"\n";
        let s = parse_simulate(text, &Overrides::default()).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].variances, VarianceScenario::II);
        assert_eq!(s[1].variances, VarianceScenario::III);
        assert_eq!(s[1].n_sim, 3);
    }

    #[test]
    fn table_presets_have_expected_sizes() {
        let ov = Overrides { scale: Some(Scale::Desk), ..Overrides::default() };
        assert_eq!(parse_simulate("preset = \"paper_table1\"", &ov).unwrap().len(), 45);
        assert_eq!(parse_simulate("preset = \"paper_table2\"", &ov).unwrap().len(), 15);
        let t3 = parse_simulate("preset = \"paper_table3\"", &ov).unwrap();
        assert_eq!(t3.len(), 60);
        assert!(t3.iter().all(|s| s.flavor == HcFlavor::HC0));
        assert!(parse_simulate("preset = \"table9\"", &ov).is_err());
        assert_eq!(size_label(&[25, 20, 10, 5]), Some("n5"));
    }

    #[test]
    fn delta_grids() {
        let g = DeltaGrid { start: 0.0, stop: 3.0, step: 0.1 }.points().unwrap();
        assert_eq!(g.len(), 31);
        assert!((g[30] - 3.0).abs() < 1e-12);
        assert!(DeltaGrid { start: 0.0, stop: 1.0, step: 0.3 }.points().is_err());
        assert!(DeltaGrid { start: 0.0, stop: 1.0, step: 0.0 }.points().is_err());
    }

    #[test]
    fn power_configs() {
        let r = parse_power("preset = \"paper_figure1\"", &Overrides::default()).unwrap();
        assert_eq!(r.deltas.len(), 31);
        assert_eq!(r.base.group_sizes, vec![15, 15]);
        assert_eq!(r.base.variances, VarianceScenario::Custom(vec![1.0, 1.0]));
        let r = parse_power("deltas = [0.0, 1.5]\ngroup_sizes = [10, 12]\ndistribution = \"chisq5\"\n", &Overrides::default())
            .unwrap();
        assert_eq!(r.deltas, vec![0.0, 1.5]);
        assert_eq!(r.base.distribution, ErrorDistribution::ChiSquared5);
        let r = parse_power("delta_grid = { start = 0.0, stop = 1.0, step = 0.5 }\nvariance_scenario = \"II\"\n", &Overrides::default())
            .unwrap();
        assert_eq!(r.deltas, vec![0.0, 0.5, 1.0]);
        assert_eq!(r.base.variances, VarianceScenario::II);
        assert_eq!(parse_power("group_sizes = [2, 2]\n", &Overrides::default()).unwrap_err().path, "deltas");
        assert_eq!(parse_power("deltas = [0.0]\nmu = [0.0, 1.0]\n", &Overrides::default()).unwrap_err().path, "mu");
        assert_eq!(
            parse_power("deltas = [0.0]\ngroup_sizes = [2, 2, 2]\nvariance_scenario = \"I\"\n", &Overrides::default())
                .unwrap_err()
                .path,
            "group_sizes"
        );
    }
}
