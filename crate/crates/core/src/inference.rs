//! Heteroskedasticity-consistent covariance estimation and the Wald-type tests
//! built on it, plus the classical F test used as a comparator.

use std::fmt;

use crate::distributions::{chisq_sf, f_sf};
use crate::error::{Error, Result};
use crate::hypotheses::{HypothesisKind, HypothesisSpec};
use crate::linalg::{pseudoinverse, Cholesky, Matrix};
use crate::model::FittedModel;
use crate::scalar::Scalar;

/// Observations with leverage at or above `1 - LEVERAGE_GUARD` are rejected
/// wherever a `1 / (1 - p_ii)` factor is needed.
pub const LEVERAGE_GUARD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum HcFlavor {
    /// Squared residuals as weights.
    HC0,
    /// Squared residuals divided by `1 - p_ii`.
    #[default]
    HC2,
}

impl HcFlavor {
    pub fn name(self) -> &'static str {
        match self {
            HcFlavor::HC0 => "hc0",
            HcFlavor::HC2 => "hc2",
        }
    }
}

impl fmt::Display for HcFlavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for HcFlavor {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "hc0" => Ok(HcFlavor::HC0),
            "hc2" => Ok(HcFlavor::HC2),
            other => Err(format!("unknown covariance flavor `{other}` (expected hc0 or hc2)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    WhiteAsymptotic,
    ClassicalF,
    WildBootstrap,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::WhiteAsymptotic => "white",
            Method::ClassicalF => "f_test",
            Method::WildBootstrap => "wild_bootstrap",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Estimate of `Cov(sqrt(N) beta_hat)`.
#[derive(Debug, Clone)]
pub struct SandwichEstimate<T> {
    pub flavor: HcFlavor,
    pub matrix: Matrix<T>,
    pub n_total: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub method: Method,
    pub statistic: f64,
    pub df: (usize, Option<usize>),
    pub p_value: f64,
    pub flavor: Option<HcFlavor>,
}

pub(crate) fn check_leverages<T: Scalar>(leverages: &[T]) -> Result<()> {
    let limit = T::one() - T::lit(LEVERAGE_GUARD);
    match leverages.iter().position(|&p| p >= limit) {
        Some(index) => Err(Error::LeverageOne { index }),
        None => Ok(()),
    }
}

/// Per-observation weights of the sandwich meat.
pub(crate) fn hc_weights<T: Scalar>(residuals: &[T], leverages: &[T], flavor: HcFlavor) -> Vec<T> {
    match flavor {
        HcFlavor::HC0 => residuals.iter().map(|&u| u * u).collect(),
        HcFlavor::HC2 => residuals
            .iter()
            .zip(leverages)
            .map(|(&u, &p)| u * u / (T::one() - p))
            .collect(),
    }
}

/// `N (X'X)^-1 X' diag(w) X (X'X)^-1`.
pub(crate) fn sandwich_from_weights<T: Scalar>(
    design: &Matrix<T>,
    gram_inverse: &Matrix<T>,
    weights: &[T],
) -> Matrix<T> {
    let (n, c) = design.shape();
    let mut meat = Matrix::zeros(c, c);
    for (i, &w) in weights.iter().enumerate() {
        if w == T::zero() {
            continue;
        }
        let x = design.row(i);
        for j in 0..c {
            let wx = w * x[j];
            for k in j..c {
                meat[(j, k)] = meat[(j, k)] + wx * x[k];
            }
        }
    }
    for j in 0..c {
        for k in 0..j {
            meat[(j, k)] = meat[(k, j)];
        }
    }
    let mut out = gram_inverse
        .matmul(&meat)
        .and_then(|m| m.matmul(gram_inverse))
        .expect("conformable")
        .scale(T::from_count(n));
    out.symmetrize();
    out
}

/// HC0 or HC2 sandwich estimate of `Cov(sqrt(N) beta_hat)`.
pub fn sandwich<T: Scalar>(model: &FittedModel<T>, flavor: HcFlavor) -> Result<SandwichEstimate<T>> {
    if flavor == HcFlavor::HC2 {
        check_leverages(model.leverages())?;
    }
    let weights = hc_weights(model.residuals(), model.leverages(), flavor);
    let matrix = sandwich_from_weights(model.design(), model.gram_inverse(), &weights);
    Ok(SandwichEstimate { flavor, matrix, n_total: model.n_total() })
}

fn check_dims<T: Scalar>(model: &FittedModel<T>, hyp: &HypothesisSpec<T>) -> Result<()> {
    if hyp.n_params() != model.n_params() {
        return Err(Error::DimensionMismatch(format!(
            "hypothesis has {} columns but the model has {} parameters",
            hyp.n_params(),
            model.n_params()
        )));
    }
    Ok(())
}

/// `d' M^-1 d` for a contrast hypothesis (ordinary inverse, failing loudly) or
/// `d' M^+ d` for a projection hypothesis.
pub(crate) fn quadratic_form<T: Scalar>(kind: HypothesisKind, core: &Matrix<T>, d: &[T]) -> Result<T> {
    match kind {
        HypothesisKind::Contrast => {
            let chol = Cholesky::new(core).map_err(|_| Error::SingularWaldCore)?;
            // d' (L L')^-1 d = |L^-1 d|^2
            let l = chol.factor();
            let mut z = d.to_vec();
            for i in 0..z.len() {
                let mut s = z[i];
                for k in 0..i {
                    s = s - l[(i, k)] * z[k];
                }
                z[i] = s / l[(i, i)];
            }
            Ok(z.iter().map(|&v| v * v).sum())
        }
        HypothesisKind::Projection => {
            let pinv = pseudoinverse(core);
            let pd = pinv.mul_vec(d)?;
            Ok(crate::linalg::dot(d, &pd).max(T::zero()))
        }
    }
}

/// `L S L'`.
pub(crate) fn congruence<T: Scalar>(l: &Matrix<T>, s: &Matrix<T>) -> Matrix<T> {
    let mut out = l.matmul(s).and_then(|m| m.matmul(&l.transpose())).expect("conformable");
    out.symmetrize();
    out
}

/// Wald statistic `N (H b)' (H S H')^-1 (H b)` for a given sandwich `S`.
pub fn wald_statistic<T: Scalar>(
    hyp: &HypothesisSpec<T>,
    beta: &[T],
    sandwich: &Matrix<T>,
    n_total: usize,
) -> Result<T> {
    let h = hyp.matrix();
    let d = h.mul_vec(beta)?;
    let core = congruence(h, sandwich);
    Ok(T::from_count(n_total) * quadratic_form(hyp.kind(), &core, &d)?)
}

/// White-type Wald test of `H beta = 0` against the chi-squared limit.
pub fn white_test<T: Scalar>(
    model: &FittedModel<T>,
    hyp: &HypothesisSpec<T>,
    flavor: HcFlavor,
) -> Result<TestResult> {
    check_dims(model, hyp)?;
    let sigma = sandwich(model, flavor)?;
    let stat = wald_statistic(hyp, model.beta_hat(), &sigma.matrix, model.n_total())?.to_f64_lossy();
    let q = hyp.rank();
    Ok(TestResult {
        method: Method::WhiteAsymptotic,
        statistic: stat,
        df: (q, None),
        p_value: chisq_sf(stat, q).clamp(0.0, 1.0),
        flavor: Some(flavor),
    })
}

/// Classical ANCOVA F test assuming homoskedastic normal errors.
pub fn classical_f_test<T: Scalar>(model: &FittedModel<T>, hyp: &HypothesisSpec<T>) -> Result<TestResult> {
    check_dims(model, hyp)?;
    let (n, c) = (model.n_total(), model.n_params());
    if n <= c {
        return Err(Error::InvalidArity(format!("F test needs N > c, got N = {n}, c = {c}")));
    }
    let h = hyp.matrix();
    let d = h.mul_vec(model.beta_hat())?;
    let core = congruence(h, model.gram_inverse());
    let numerator = quadratic_form(hyp.kind(), &core, &d).map_err(|e| match e {
        Error::SingularWaldCore => Error::SingularMatrix { pivot: 0 },
        e => e,
    })?;
    let q = hyp.rank();
    let df2 = n - c;
    let mse = model.residual_sum_of_squares() / T::from_count(df2);
    let stat = if numerator == T::zero() {
        0.0
    } else {
        (numerator / T::from_count(q) / mse).to_f64_lossy()
    };
    let stat = if stat.is_nan() { f64::INFINITY } else { stat };
    Ok(TestResult {
        method: Method::ClassicalF,
        statistic: stat,
        df: (q, Some(df2)),
        p_value: f_sf(stat, q, df2).clamp(0.0, 1.0),
        flavor: None,
    })
}
