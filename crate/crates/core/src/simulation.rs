//! Monte Carlo engine for type-I-error and power studies of the three tests.
//!
//! Observations follow `Y_ij = mu_i + z_ij' nu + sigma_ij e_ij` with fixed
//! covariates, standardized errors and group-wise variance patterns. Each
//! replicate draws its errors and bootstrap multipliers from its own
//! counter-addressed streams, so a report depends only on the scenario.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::bootstrap::{wild_bootstrap_test, BootstrapConfig};
use crate::error::{Error, Result};
use crate::hypotheses::equal_means_contrast;
use crate::inference::{classical_f_test, white_test, HcFlavor};
use crate::linalg::{Matrix, Vector};
use crate::model::{fit_ols, Dataset};
use crate::rng::{derive_seed, CounterRng, StreamRole};

/// Group sizes used throughout the type-I-error tables.
pub const STANDARD_GROUP_SIZES: [[usize; 4]; 5] =
    [[40, 40, 40, 40], [15, 15, 15, 15], [5, 5, 5, 5], [5, 10, 20, 25], [25, 20, 10, 5]];

/// Covariate slopes of the data-generating model.
pub const DEFAULT_COEFFICIENTS: [f64; 2] = [-0.5, 1.5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorDistribution {
    StandardNormal,
    Lognormal,
    DoubleExponential,
    ChiSquared5,
}

impl ErrorDistribution {
    pub const ALL: [ErrorDistribution; 4] = [
        ErrorDistribution::StandardNormal,
        ErrorDistribution::Lognormal,
        ErrorDistribution::DoubleExponential,
        ErrorDistribution::ChiSquared5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ErrorDistribution::StandardNormal => "normal",
            ErrorDistribution::Lognormal => "lognormal",
            ErrorDistribution::DoubleExponential => "double_exponential",
            ErrorDistribution::ChiSquared5 => "chisq5",
        }
    }

    /// Analytic mean and standard deviation of the raw draws.
    pub fn moments(self) -> (f64, f64) {
        let e = std::f64::consts::E;
        match self {
            ErrorDistribution::StandardNormal => (0.0, 1.0),
            ErrorDistribution::Lognormal => (e.sqrt(), ((e - 1.0) * e).sqrt()),
            ErrorDistribution::DoubleExponential => (0.0, 2f64.sqrt()),
            ErrorDistribution::ChiSquared5 => (5.0, 10f64.sqrt()),
        }
    }

    /// One raw (unstandardized) draw.
    pub fn sample(self, rng: &mut CounterRng) -> f64 {
        match self {
            ErrorDistribution::StandardNormal => rng.standard_normal(),
            ErrorDistribution::Lognormal => rng.standard_normal().exp(),
            ErrorDistribution::DoubleExponential => {
                let u = rng.uniform_open();
                if u < 0.5 {
                    (2.0 * u).ln()
                } else {
                    -(2.0 * (1.0 - u)).ln()
                }
            }
            ErrorDistribution::ChiSquared5 => (0..5).map(|_| rng.standard_normal().powi(2)).sum(),
        }
    }
}

impl fmt::Display for ErrorDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ErrorDistribution {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "normal" | "standard_normal" => Ok(ErrorDistribution::StandardNormal),
            "lognormal" => Ok(ErrorDistribution::Lognormal),
            "double_exponential" | "laplace" => Ok(ErrorDistribution::DoubleExponential),
            "chisq5" | "chi_squared_5" => Ok(ErrorDistribution::ChiSquared5),
            _ => Err(Error::UnknownDistribution(s.to_string())),
        }
    }
}

/// Group-wise error variance patterns.
#[derive(Debug, Clone, PartialEq)]
pub enum VarianceScenario {
    /// All variances one.
    I,
    /// `sigma_i^2 = i`.
    II,
    /// First `floor(n_1 / 2)` subjects of group 1 have variance one and the rest
    /// of group 1 variance two; group `i >= 2` has `sigma_i^2 = i + 1`.
    III,
    /// Explicit per-group variances.
    Custom(Vec<f64>),
}

impl VarianceScenario {
    pub fn name(&self) -> String {
        match self {
            VarianceScenario::I => "I".into(),
            VarianceScenario::II => "II".into(),
            VarianceScenario::III => "III".into(),
            VarianceScenario::Custom(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                format!("custom({})", parts.join(";"))
            }
        }
    }

    /// Error standard deviation of every observation in group-major order.
    pub fn per_observation_sd(&self, group_sizes: &[usize]) -> Result<Vec<f64>> {
        let mut sds = Vec::with_capacity(group_sizes.iter().sum());
        for (g, &n) in group_sizes.iter().enumerate() {
            let i = (g + 1) as f64;
            match self {
                VarianceScenario::I => sds.extend(std::iter::repeat_n(1.0, n)),
                VarianceScenario::II => sds.extend(std::iter::repeat_n(i.sqrt(), n)),
                VarianceScenario::III if g == 0 => {
                    let low = n / 2;
                    sds.extend(std::iter::repeat_n(1.0, low));
                    sds.extend(std::iter::repeat_n(2f64.sqrt(), n - low));
                }
                VarianceScenario::III => sds.extend(std::iter::repeat_n((i + 1.0).sqrt(), n)),
                VarianceScenario::Custom(v) => {
                    let var = *v.get(g).ok_or_else(|| {
                        Error::InvalidScenario(format!("{} variances for {} groups", v.len(), group_sizes.len()))
                    })?;
                    if !(var > 0.0 && var.is_finite()) {
                        return Err(Error::InvalidScenario(format!("variance {var} must be positive")));
                    }
                    sds.extend(std::iter::repeat_n(var.sqrt(), n));
                }
            }
        }
        Ok(sds)
    }
}

impl FromStr for VarianceScenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(VarianceScenario::I),
            "II" | "2" => Ok(VarianceScenario::II),
            "III" | "3" => Ok(VarianceScenario::III),
            other => Err(Error::InvalidScenario(format!("unknown variance scenario `{other}`"))),
        }
    }
}

/// Replicate counts of a study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scale {
    /// 2000 datasets, 1000 bootstrap draws each.
    #[default]
    Desk,
    /// 5000 datasets, 5000 bootstrap draws each.
    Paper,
}

impl Scale {
    pub fn n_sim(self) -> usize {
        match self {
            Scale::Desk => 2000,
            Scale::Paper => 5000,
        }
    }

    pub fn n_boot(self) -> usize {
        match self {
            Scale::Desk => 1000,
            Scale::Paper => 5000,
        }
    }
}

impl FromStr for Scale {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "desk" => Ok(Scale::Desk),
            "paper" => Ok(Scale::Paper),
            other => Err(format!("unknown scale `{other}` (expected desk or paper)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationScenario {
    pub group_sizes: Vec<usize>,
    pub distribution: ErrorDistribution,
    pub variances: VarianceScenario,
    /// Group means; all zero for a type-I-error study.
    pub mu: Vec<f64>,
    /// Covariate slopes; at most two, matched to the columns of [`paper_covariates`].
    pub coefficients: Vec<f64>,
    pub n_sim: usize,
    pub n_boot: usize,
    pub alpha: f64,
    pub flavor: HcFlavor,
    pub seed: u64,
}

impl SimulationScenario {
    /// Null scenario with the default covariate slopes at the given scale.
    pub fn null(
        group_sizes: &[usize],
        distribution: ErrorDistribution,
        variances: VarianceScenario,
        flavor: HcFlavor,
        scale: Scale,
        seed: u64,
    ) -> Self {
        SimulationScenario {
            group_sizes: group_sizes.to_vec(),
            distribution,
            variances,
            mu: vec![0.0; group_sizes.len()],
            coefficients: DEFAULT_COEFFICIENTS.to_vec(),
            n_sim: scale.n_sim(),
            n_boot: scale.n_boot(),
            alpha: 0.05,
            flavor,
            seed,
        }
    }

    pub fn n_total(&self) -> usize {
        self.group_sizes.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        let a = self.group_sizes.len();
        if a < 2 {
            return Err(Error::InvalidScenario(format!("need at least two groups, got {a}")));
        }
        if self.group_sizes.contains(&0) {
            return Err(Error::InvalidScenario("group sizes must be positive".into()));
        }
        if self.mu.len() != a {
            return Err(Error::InvalidScenario(format!("{} group means for {a} groups", self.mu.len())));
        }
        if self.coefficients.len() > 2 {
            return Err(Error::InvalidScenario("at most two covariate slopes are supported".into()));
        }
        if self.n_total() < 2 {
            return Err(Error::InvalidScenario("need at least two observations".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidScenario(format!("alpha {} outside (0, 1)", self.alpha)));
        }
        if self.n_sim == 0 || self.n_boot == 0 {
            return Err(Error::InvalidScenario("n_sim and n_boot must be positive".into()));
        }
        if self.mu.iter().chain(&self.coefficients).any(|x| !x.is_finite()) {
            return Err(Error::InvalidScenario("non-finite mean or slope".into()));
        }
        self.variances.per_observation_sd(&self.group_sizes)?;
        Ok(())
    }

    /// Short human-readable description used in error contexts.
    pub fn label(&self) -> String {
        let sizes: Vec<String> = self.group_sizes.iter().map(|n| n.to_string()).collect();
        format!(
            "n=({}) {} var={} {} seed={}",
            sizes.join(","),
            self.distribution,
            self.variances.name(),
            self.flavor,
            self.seed
        )
    }
}

/// Rejection rate of one method with its Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RejectionRate {
    pub rate: f64,
    pub monte_carlo_se: f64,
}

impl RejectionRate {
    pub fn from_count(rejections: usize, n: usize) -> Self {
        let rate = rejections as f64 / n as f64;
        RejectionRate { rate, monte_carlo_se: (rate * (1.0 - rate) / n as f64).sqrt() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub f_test: RejectionRate,
    pub white: RejectionRate,
    pub wild_bootstrap: RejectionRate,
    pub n_sim_effective: usize,
    pub scenario: SimulationScenario,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPoint {
    pub delta: f64,
    pub power_f: RejectionRate,
    pub power_wb: RejectionRate,
}

fn spaced_descending(hi: f64, lo: f64, k: usize) -> impl Iterator<Item = f64> {
    (0..k).map(move |j| if k == 1 { hi } else { hi - (hi - lo) * j as f64 / (k - 1) as f64 })
}

/// Fixed `N x 2` covariates: `z1` equally spaced on `[-10, 10]`; `z2` has its
/// first `ceil(N/2)` entries equally spaced from 5 down to 0 and the rest from
/// -1 down to -2 (a single entry in a half takes the upper endpoint).
pub fn paper_covariates(n: usize) -> Result<Matrix<f64>> {
    if n < 2 {
        return Err(Error::InvalidArity(format!("covariates need N >= 2, got {n}")));
    }
    let z1 = (0..n).map(|i| -10.0 + 20.0 * i as f64 / (n - 1) as f64);
    let upper = n.div_ceil(2);
    let z2: Vec<f64> = spaced_descending(5.0, 0.0, upper).chain(spaced_descending(-1.0, -2.0, n - upper)).collect();
    let data = z1.zip(z2).flat_map(|(a, b)| [a, b]).collect();
    Matrix::from_row_major(n, 2, data)
}

/// `sd_i (raw_i - m) / s` with the distribution's analytic moments `(m, s)`.
pub fn standardize_and_scale(raw: &[f64], sds: &[f64], distribution: ErrorDistribution) -> Result<Vec<f64>> {
    if raw.len() != sds.len() {
        return Err(Error::DimensionMismatch(format!("{} draws for {} scales", raw.len(), sds.len())));
    }
    let (m, s) = distribution.moments();
    Ok(raw.iter().zip(sds).map(|(&x, &sd)| sd * (x - m) / s).collect())
}

/// Everything about a scenario that is fixed across replicates.
#[derive(Debug, Clone)]
pub struct ScenarioDesign {
    groups: Vec<usize>,
    covariates: Matrix<f64>,
    /// `mu_i + z' nu` per observation.
    mean: Vec<f64>,
    sds: Vec<f64>,
    distribution: ErrorDistribution,
}

impl ScenarioDesign {
    pub fn new(scenario: &SimulationScenario) -> Result<Self> {
        scenario.validate()?;
        let n = scenario.n_total();
        let r = scenario.coefficients.len();
        let all = paper_covariates(n)?;
        let covariates = Matrix::from_fn(n, r, |i, j| all[(i, j)]);
        let groups: Vec<usize> = scenario
            .group_sizes
            .iter()
            .enumerate()
            .flat_map(|(g, &size)| std::iter::repeat_n(g + 1, size))
            .collect();
        let mean = (0..n)
            .map(|i| {
                let slope: f64 = covariates.row(i).iter().zip(&scenario.coefficients).map(|(z, b)| z * b).sum();
                scenario.mu[groups[i] - 1] + slope
            })
            .collect();
        let sds = scenario.variances.per_observation_sd(&scenario.group_sizes)?;
        Ok(ScenarioDesign { groups, covariates, mean, sds, distribution: scenario.distribution })
    }

    pub fn covariates(&self) -> &Matrix<f64> {
        &self.covariates
    }

    /// Dataset whose errors are `errors` (already on the variance scale).
    pub fn dataset_with_errors(&self, errors: &[f64]) -> Result<Dataset<f64>> {
        if errors.len() != self.mean.len() {
            return Err(Error::DimensionMismatch("error vector has wrong length".into()));
        }
        let y = self.mean.iter().zip(errors).map(|(m, e)| m + e).collect();
        Dataset::new(Vector::from_vec(y)?, self.groups.clone(), self.covariates.clone())
    }

    /// Draws standardized, variance-scaled errors from `rng`.
    pub fn draw_errors(&self, rng: &mut CounterRng) -> Vec<f64> {
        let raw: Vec<f64> = (0..self.mean.len()).map(|_| self.distribution.sample(rng)).collect();
        standardize_and_scale(&raw, &self.sds, self.distribution).expect("lengths match")
    }

    pub fn generate(&self, rng: &mut CounterRng) -> Result<Dataset<f64>> {
        let errors = self.draw_errors(rng);
        self.dataset_with_errors(&errors)
    }
}

/// One simulated dataset of `scenario`, drawn from `rng`.
pub fn generate_dataset(scenario: &SimulationScenario, rng: &mut CounterRng) -> Result<Dataset<f64>> {
    ScenarioDesign::new(scenario)?.generate(rng)
}

/// Rejection decisions of one replicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReplicateOutcome {
    pub f_test: bool,
    pub white: bool,
    pub wild_bootstrap: bool,
}

fn run_replicate(
    scenario: &SimulationScenario,
    design: &ScenarioDesign,
    replicate: usize,
    with_white: bool,
) -> Result<ReplicateOutcome> {
    let error_seed = derive_seed(scenario.seed, replicate as u64, StreamRole::Errors);
    let data = design.generate(&mut CounterRng::new(error_seed, 0))?;
    let fit = fit_ols(&data)?;
    let hyp = equal_means_contrast(scenario.group_sizes.len(), scenario.coefficients.len())?;
    let f = classical_f_test(&fit, &hyp)?;
    let white = if with_white {
        white_test(&fit, &hyp, scenario.flavor)?.p_value <= scenario.alpha
    } else {
        false
    };
    let boot_seed = derive_seed(scenario.seed, replicate as u64, StreamRole::Bootstrap);
    let cfg = BootstrapConfig::new(scenario.n_boot, scenario.flavor, boot_seed);
    let wb = wild_bootstrap_test(&fit, &hyp, &cfg)?;
    Ok(ReplicateOutcome {
        f_test: f.p_value <= scenario.alpha,
        white,
        wild_bootstrap: wb.p_value <= scenario.alpha,
    })
}

fn run_replicates(scenario: &SimulationScenario, with_white: bool) -> Result<Vec<ReplicateOutcome>> {
    let design = ScenarioDesign::new(scenario)?;
    let outcomes: Vec<Result<ReplicateOutcome>> = (0..scenario.n_sim)
        .into_par_iter()
        .map(|k| run_replicate(scenario, &design, k, with_white))
        .collect();
    outcomes
        .into_iter()
        .enumerate()
        .map(|(k, r)| {
            r.map_err(|e| Error::Replicate {
                scenario: scenario.label(),
                replicate: k,
                seed: scenario.seed,
                source: Box::new(e),
            })
        })
        .collect()
}

fn count(outcomes: &[ReplicateOutcome], pick: impl Fn(&ReplicateOutcome) -> bool) -> RejectionRate {
    RejectionRate::from_count(outcomes.iter().filter(|o| pick(o)).count(), outcomes.len())
}

/// Rejection rates of the F, White and wild-bootstrap tests of equal adjusted
/// means over `n_sim` simulated datasets.
pub fn run_type1_study(scenario: &SimulationScenario) -> Result<SimulationReport> {
    let outcomes = run_replicates(scenario, true)?;
    Ok(SimulationReport {
        f_test: count(&outcomes, |o| o.f_test),
        white: count(&outcomes, |o| o.white),
        wild_bootstrap: count(&outcomes, |o| o.wild_bootstrap),
        n_sim_effective: outcomes.len(),
        scenario: scenario.clone(),
    })
}

/// Power of the F and wild-bootstrap tests for `mu = (0, delta)` in a two-group
/// scenario. Every delta reuses the same random streams.
pub fn run_power_study(deltas: &[f64], base: &SimulationScenario) -> Result<Vec<PowerPoint>> {
    if base.group_sizes.len() != 2 {
        return Err(Error::InvalidScenario(format!(
            "power study needs two groups, got {}",
            base.group_sizes.len()
        )));
    }
    deltas
        .iter()
        .map(|&delta| {
            let scenario = SimulationScenario { mu: vec![0.0, delta], ..base.clone() };
            let outcomes = run_replicates(&scenario, false)?;
            Ok(PowerPoint {
                delta,
                power_f: count(&outcomes, |o| o.f_test),
                power_wb: count(&outcomes, |o| o.wild_bootstrap),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covariate_endpoints() {
        let z = paper_covariates(2).unwrap();
        assert_eq!(z.column(0), vec![-10.0, 10.0]);
        let z = paper_covariates(3).unwrap();
        assert_eq!(z.column(0), vec![-10.0, 0.0, 10.0]);
        let z = paper_covariates(4).unwrap();
        assert_eq!(z.column(1), vec![5.0, 0.0, -1.0, -2.0]);
        assert!(paper_covariates(1).is_err());
    }

    #[test]
    fn second_covariate_halves() {
        let z = paper_covariates(7).unwrap().column(1);
        // ceil(7/2) = 4 upper values, 3 lower values
        let expected = [5.0, 5.0 - 5.0 / 3.0, 5.0 - 10.0 / 3.0, 0.0, -1.0, -1.5, -2.0];
        for (a, b) in z.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn standardization() {
        let raw = [0.3, -1.2, 2.0];
        let out = standardize_and_scale(&raw, &[1.0; 3], ErrorDistribution::StandardNormal).unwrap();
        assert_eq!(out, raw.to_vec());
        let out = standardize_and_scale(&[5.0, 5.0], &[1.0, 3.0], ErrorDistribution::ChiSquared5).unwrap();
        assert_eq!(out, vec![0.0, 0.0]);
        assert!(standardize_and_scale(&[1.0], &[1.0, 2.0], ErrorDistribution::Lognormal).is_err());
    }

    #[test]
    fn distribution_names_round_trip() {
        for d in ErrorDistribution::ALL {
            assert_eq!(d.name().parse::<ErrorDistribution>().unwrap(), d);
        }
        assert_eq!("cauchy".parse::<ErrorDistribution>().unwrap_err(), Error::UnknownDistribution("cauchy".into()));
    }

    #[test]
    fn variance_patterns() {
        let sizes = [5, 2, 2, 1];
        let sq = |v: Vec<f64>| v.into_iter().map(|s| s * s).collect::<Vec<_>>();
        let close = |a: Vec<f64>, b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12);
        assert!(close(sq(VarianceScenario::I.per_observation_sd(&sizes).unwrap()), &[1.0; 10]));
        let ii = sq(VarianceScenario::II.per_observation_sd(&sizes).unwrap());
        assert!(close(ii, &[1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0, 4.0]));
        let iii = sq(VarianceScenario::III.per_observation_sd(&sizes).unwrap());
        assert!(close(iii, &[1.0, 1.0, 2.0, 2.0, 2.0, 3.0, 3.0, 4.0, 4.0, 5.0]));
        assert!(VarianceScenario::Custom(vec![1.0]).per_observation_sd(&sizes).is_err());
    }

    #[test]
    fn noise_free_dataset_is_exact_model() {
        let scenario = SimulationScenario::null(
            &[3, 4],
            ErrorDistribution::StandardNormal,
            VarianceScenario::I,
            HcFlavor::HC2,
            Scale::Desk,
            0,
        );
        let scenario = SimulationScenario { mu: vec![1.0, -2.0], ..scenario };
        let design = ScenarioDesign::new(&scenario).unwrap();
        let data = design.dataset_with_errors(&[0.0; 7]).unwrap();
        let z = paper_covariates(7).unwrap();
        for i in 0..7 {
            let mu = if i < 3 { 1.0 } else { -2.0 };
            let expected = mu - 0.5 * z[(i, 0)] + 1.5 * z[(i, 1)];
            assert!((data.response()[i] - expected).abs() < 1e-14);
        }
        assert_eq!(data.group_sizes(), vec![3, 4]);
    }

    #[test]
    fn scenario_validation() {
        let ok = SimulationScenario::null(
            &[5, 5],
            ErrorDistribution::StandardNormal,
            VarianceScenario::I,
            HcFlavor::HC2,
            Scale::Desk,
            0,
        );
        assert!(ok.validate().is_ok());
        assert!(SimulationScenario { alpha: 1.5, ..ok.clone() }.validate().is_err());
        assert!(SimulationScenario { mu: vec![0.0], ..ok.clone() }.validate().is_err());
        assert!(SimulationScenario { group_sizes: vec![5], mu: vec![0.0], ..ok.clone() }.validate().is_err());
        assert!(SimulationScenario { coefficients: vec![1.0; 3], ..ok.clone() }.validate().is_err());
        assert!(SimulationScenario { n_boot: 0, ..ok }.validate().is_err());
    }

    #[test]
    fn small_study_is_deterministic() {
        let scenario = SimulationScenario {
            n_sim: 40,
            n_boot: 99,
            ..SimulationScenario::null(
                &[6, 6, 6],
                ErrorDistribution::DoubleExponential,
                VarianceScenario::II,
                HcFlavor::HC2,
                Scale::Desk,
                11,
            )
        };
        let a = run_type1_study(&scenario).unwrap();
        let b = run_type1_study(&scenario).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n_sim_effective, 40);
        for r in [a.f_test, a.white, a.wild_bootstrap] {
            assert!((0.0..=1.0).contains(&r.rate));
            assert!((r.monte_carlo_se - (r.rate * (1.0 - r.rate) / 40.0).sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn power_study_needs_two_groups() {
        let base = SimulationScenario::null(
            &[5, 5, 5],
            ErrorDistribution::StandardNormal,
            VarianceScenario::I,
            HcFlavor::HC2,
            Scale::Desk,
            0,
        );
        assert!(run_power_study(&[0.0], &base).is_err());
    }
}
