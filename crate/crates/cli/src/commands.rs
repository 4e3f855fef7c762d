//! The `test`, `simulate` and `power` commands.

use std::path::Path;

use robust_ancova::{
    classical_f_test, equal_means_contrast, fit_ols, nested_projection, run_power_study, run_type1_study,
    twoway_projection, white_test, wild_bootstrap_test, BootstrapConfig, CrossedEffect, Error, HcFlavor,
    HypothesisSpec, NestedEffect, Scale,
};

use crate::config::{parse_power, parse_simulate, size_label, Overrides};
use crate::ingest::{ingest_csv, Ingested};
use crate::output::{Cell, Table};

/// Failure of a command, classified by exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed input, configuration or flags (exit 2).
    #[error("{0}")]
    Input(String),
    /// The data are numerically unsuitable, e.g. rank deficient (exit 3).
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

/// Hypothesis selected with `--hypothesis`.
#[derive(Debug, Clone, PartialEq)]
pub enum HypothesisChoice {
    OneWay,
    TwoWay { b: usize, c: usize, effect: CrossedEffect },
    Nested { c_per: Vec<usize>, effect: NestedEffect },
}

impl std::str::FromStr for HypothesisChoice {
    type Err = String;

    /// `oneway`, `twoway:BxC:{main_b,main_c,interaction}` or
    /// `nested:C1,C2,...:{category,subcategory}`.
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["oneway"] => Ok(HypothesisChoice::OneWay),
            ["twoway", dims, effect] => {
                let (b, c) = dims
                    .split_once(['x', 'X'])
                    .and_then(|(b, c)| Some((b.parse().ok()?, c.parse().ok()?)))
                    .ok_or_else(|| format!("bad crossed layout `{dims}` (expected BxC, e.g. 2x3)"))?;
                let effect = match *effect {
                    "main_b" => CrossedEffect::MainB,
                    "main_c" => CrossedEffect::MainC,
                    "interaction" => CrossedEffect::Interaction,
                    other => return Err(format!("unknown crossed effect `{other}` (expected main_b, main_c or interaction)")),
                };
                Ok(HypothesisChoice::TwoWay { b, c, effect })
            }
            ["nested", counts, effect] => {
                let c_per = counts
                    .split(',')
                    .map(|c| c.trim().parse::<usize>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| format!("bad sub-category counts `{counts}` (expected e.g. 2,3)"))?;
                let effect = match *effect {
                    "category" => NestedEffect::Category,
                    "subcategory" => NestedEffect::Subcategory,
                    other => return Err(format!("unknown nested effect `{other}` (expected category or subcategory)")),
                };
                Ok(HypothesisChoice::Nested { c_per, effect })
            }
            _ => Err(format!("unknown hypothesis `{s}` (expected oneway, twoway:BxC:EFFECT or nested:C1,C2,...:EFFECT)")),
        }
    }
}

impl HypothesisChoice {
    pub fn build(&self, a: usize, r: usize) -> Result<HypothesisSpec<f64>, String> {
        let spec = match self {
            HypothesisChoice::OneWay => equal_means_contrast(a, r),
            HypothesisChoice::TwoWay { b, c, effect } => {
                if b * c != a {
                    return Err(format!("crossed layout {b}x{c} has {} cells but the data have {a} groups", b * c));
                }
                twoway_projection(*b, *c, *effect, r)
            }
            HypothesisChoice::Nested { c_per, effect } => {
                let cells: usize = c_per.iter().sum();
                if cells != a {
                    return Err(format!("nested layout has {cells} cells but the data have {a} groups"));
                }
                nested_projection(c_per.len(), c_per, *effect, r)
            }
        };
        spec.map_err(|e| e.to_string())
    }
}

fn describe_numerical(e: &Error, data: Option<&Ingested>) -> String {
    match (e, data) {
        (Error::RankDeficient { column }, Some(d)) => format!(
            "rank-deficient design: {} is a linear combination of the preceding columns",
            d.design_column_name(*column)
        ),
        (Error::LeverageOne { index }, Some(d)) => format!(
            "leverage one: data row {} (group `{}`) is fitted exactly, so the HC2 and bootstrap weights are undefined",
            index + 1,
            d.labels[d.data.group_of()[*index] - 1]
        ),
        (Error::SingularWaldCore, _) => "singular Wald core: H Sigma H' is not invertible for this hypothesis".into(),
        _ => e.to_string(),
    }
}

fn classify(e: Error, data: Option<&Ingested>) -> CliError {
    if e.is_numerical() {
        CliError::Numerical(describe_numerical(&e, data))
    } else {
        CliError::Input(e.to_string())
    }
}

/// Settings shared by all commands.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Settings {
    pub seed: Option<u64>,
    pub scale: Option<Scale>,
    pub alpha: Option<f64>,
    pub flavor: Option<HcFlavor>,
}

impl Settings {
    fn overrides(&self) -> Overrides {
        Overrides { seed: self.seed, alpha: self.alpha, flavor: self.flavor, scale: self.scale }
    }

    fn check(&self) -> Result<(), CliError> {
        match self.alpha {
            Some(a) if !(a > 0.0 && a < 1.0) => Err(CliError::Input(format!("--alpha {a} outside (0, 1)"))),
            _ => Ok(()),
        }
    }
}

pub const TEST_COLUMNS: [&str; 9] =
    ["method", "flavor", "statistic", "df1", "df2", "p_value", "reject", "replications", "degenerate"];

/// Runs the F, White and wild-bootstrap tests on a CSV dataset.
pub fn cmd_test(
    input: &Path,
    hypothesis: &HypothesisChoice,
    boot: Option<usize>,
    settings: &Settings,
) -> Result<Table, CliError> {
    settings.check()?;
    let ingested = ingest_csv(input).map_err(|e| CliError::Input(e.to_string()))?;
    let data = &ingested.data;
    let hyp = hypothesis.build(data.n_groups(), data.n_covariates()).map_err(CliError::Input)?;
    let flavor = settings.flavor.unwrap_or_default();
    let alpha = settings.alpha.unwrap_or(0.05);
    let replications = boot.unwrap_or_else(|| settings.scale.unwrap_or_default().n_boot());
    if replications == 0 {
        return Err(CliError::Input("--boot must be positive".into()));
    }
    let numeric = |e| classify(e, Some(&ingested));
    let fit = fit_ols(data).map_err(numeric)?;
    let f = classical_f_test(&fit, &hyp).map_err(numeric)?;
    let white = white_test(&fit, &hyp, flavor).map_err(numeric)?;
    let cfg = BootstrapConfig::new(replications, flavor, settings.seed.unwrap_or(0));
    let wb = wild_bootstrap_test(&fit, &hyp, &cfg).map_err(numeric)?;

    let reject = |p: f64| Cell::from(if p <= alpha { "yes" } else { "no" });
    let mut table = Table::new(&TEST_COLUMNS);
    table.push(vec![
        f.method.name().into(),
        Cell::Missing,
        f.statistic.into(),
        f.df.0.into(),
        f.df.1.into(),
        f.p_value.into(),
        reject(f.p_value),
        Cell::Missing,
        Cell::Missing,
    ]);
    table.push(vec![
        white.method.name().into(),
        flavor.name().into(),
        white.statistic.into(),
        white.df.0.into(),
        Cell::Missing,
        white.p_value.into(),
        reject(white.p_value),
        Cell::Missing,
        Cell::Missing,
    ]);
    table.push(vec![
        "wild_bootstrap".into(),
        flavor.name().into(),
        wb.observed.into(),
        hyp.rank().into(),
        Cell::Missing,
        wb.p_value.into(),
        reject(wb.p_value),
        replications.into(),
        wb.degenerate_count.into(),
    ]);
    Ok(table)
}

pub const SIMULATE_COLUMNS: [&str; 16] = [
    "variance",
    "sizes",
    "group_sizes",
    "distribution",
    "flavor",
    "n_sim",
    "n_boot",
    "alpha",
    "seed",
    "f_rate",
    "f_se",
    "white_rate",
    "white_se",
    "wb_rate",
    "wb_se",
    "n_sim_effective",
];

fn read_config(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

/// Type-I-error study for every scenario of a config file or preset.
pub fn cmd_simulate(config: Option<&Path>, preset: Option<&str>, settings: &Settings) -> Result<Table, CliError> {
    settings.check()?;
    let text = match (config, preset) {
        (Some(_), Some(_)) => return Err(CliError::Input("give either a config file or --preset, not both".into())),
        (Some(path), None) => read_config(path)?,
        (None, Some(name)) => format!("preset = {}", toml::Value::String(name.to_string())),
        (None, None) => return Err(CliError::Input("simulate needs a config file or --preset".into())),
    };
    let scenarios = parse_simulate(&text, &settings.overrides()).map_err(|e| CliError::Input(e.to_string()))?;
    let mut table = Table::new(&SIMULATE_COLUMNS);
    for scenario in &scenarios {
        let report = run_type1_study(scenario).map_err(|e| classify(e, None))?;
        let sizes: Vec<String> = scenario.group_sizes.iter().map(|n| n.to_string()).collect();
        table.push(vec![
            scenario.variances.name().into(),
            size_label(&scenario.group_sizes).unwrap_or("custom").into(),
            sizes.join(" ").into(),
            scenario.distribution.name().into(),
            scenario.flavor.name().into(),
            scenario.n_sim.into(),
            scenario.n_boot.into(),
            scenario.alpha.into(),
            scenario.seed.into(),
            report.f_test.rate.into(),
            report.f_test.monte_carlo_se.into(),
            report.white.rate.into(),
            report.white.monte_carlo_se.into(),
            report.wild_bootstrap.rate.into(),
            report.wild_bootstrap.monte_carlo_se.into(),
            report.n_sim_effective.into(),
        ]);
    }
    Ok(table)
}

pub const POWER_COLUMNS: [&str; 5] = ["delta", "power_f", "se_f", "power_wb", "se_wb"];

/// Power curve of the F and wild-bootstrap tests over a delta grid.
pub fn cmd_power(config: Option<&Path>, preset: Option<&str>, settings: &Settings) -> Result<Table, CliError> {
    settings.check()?;
    let text = match (config, preset) {
        (Some(_), Some(_)) => return Err(CliError::Input("give either a config file or --preset, not both".into())),
        (Some(path), None) => read_config(path)?,
        (None, Some(name)) => format!("preset = {}", toml::Value::String(name.to_string())),
        (None, None) => return Err(CliError::Input("power needs a config file or --preset".into())),
    };
    let request = parse_power(&text, &settings.overrides()).map_err(|e| CliError::Input(e.to_string()))?;
    let points = run_power_study(&request.deltas, &request.base).map_err(|e| classify(e, None))?;
    let mut table = Table::new(&POWER_COLUMNS);
    for p in points {
        table.push(vec![
            p.delta.into(),
            p.power_f.rate.into(),
            p.power_f.monte_carlo_se.into(),
            p.power_wb.rate.into(),
            p.power_wb.monte_carlo_se.into(),
        ]);
    }
    Ok(table)
}
