//! Wild bootstrap of the heteroskedasticity-consistent Wald statistic.
//!
//! Bootstrap responses are `Y* = X beta_hat + e*` with
//! `e*_i = u_i (1 - p_ii)^{-1/2} T_i` and i.i.d. multipliers `T_i`. Since the
//! design is fixed, `beta* - beta_hat = (X'X)^-1 X' e*` and
//! `H Sigma* H' = N A diag(w*) A'` with `A = H (X'X)^-1 X'`, so a replicate
//! costs `O(N (c + q^2))` after a one-off setup.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hypotheses::{HypothesisKind, HypothesisSpec};
use crate::inference::{check_leverages, quadratic_form, sandwich, wald_statistic, HcFlavor};
use crate::linalg::{dot, Matrix};
use crate::model::FittedModel;
use crate::rng::CounterRng;
use crate::scalar::Scalar;

/// Distribution of the wild-bootstrap multipliers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Multiplier {
    /// +1 or -1 with probability 1/2 each.
    #[default]
    Rademacher,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BootstrapConfig {
    pub replications: usize,
    pub flavor: HcFlavor,
    pub multiplier: Multiplier,
    pub seed: u64,
}

impl BootstrapConfig {
    pub fn new(replications: usize, flavor: HcFlavor, seed: u64) -> Self {
        BootstrapConfig { replications, flavor, multiplier: Multiplier::Rademacher, seed }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapResult {
    /// Wald statistic of the original data.
    pub observed: f64,
    /// Bootstrap statistics sorted ascending; degenerate replicates are `+inf`.
    pub draws: Vec<f64>,
    pub p_value: f64,
    pub degenerate_count: usize,
}

/// One bootstrap replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateDraw<T> {
    /// `T*(H)`, or `None` when `H Sigma* H'` was singular.
    pub statistic: Option<T>,
    /// `H (beta* - beta_hat)`.
    pub shift: Vec<T>,
}

/// Precomputed state shared by all replicates of one dataset.
pub struct WildBootstrap<'a, T> {
    model: &'a FittedModel<T>,
    kind: HypothesisKind,
    flavor: HcFlavor,
    /// `e_i = u_i / sqrt(1 - p_ii)`.
    scaled_residuals: Vec<T>,
    /// `(X'X)^-1 X'`, `c x N`.
    projector: Matrix<T>,
    /// `H (X'X)^-1 X'`, `q x N`.
    hyp_projector: Matrix<T>,
    /// `1 / (1 - p_ii)` for HC2, ones for HC0.
    leverage_scale: Vec<T>,
}

#[derive(Default)]
struct Scratch<T> {
    multipliers: Vec<T>,
    errors: Vec<T>,
    weights: Vec<T>,
}

impl<T: Scalar> Scratch<T> {
    fn fill_rademacher(&mut self, seed: u64, b: usize, signs: &mut [i8]) {
        CounterRng::new(seed, b as u64).fill_rademacher(signs);
        self.multipliers.clear();
        self.multipliers.extend(signs.iter().map(|&s| if s > 0 { T::one() } else { -T::one() }));
    }
}

impl<'a, T: Scalar> WildBootstrap<'a, T> {
    pub fn new(model: &'a FittedModel<T>, hyp: &HypothesisSpec<T>, flavor: HcFlavor) -> Result<Self> {
        if hyp.n_params() != model.n_params() {
            return Err(Error::DimensionMismatch(format!(
                "hypothesis has {} columns but the model has {} parameters",
                hyp.n_params(),
                model.n_params()
            )));
        }
        check_leverages(model.leverages())?;
        let scaled_residuals = model
            .residuals()
            .iter()
            .zip(model.leverages().iter())
            .map(|(&u, &p)| u / (T::one() - p).sqrt())
            .collect();
        let projector = model.gram_inverse().matmul(&model.design().transpose())?;
        let hyp_projector = hyp.matrix().matmul(&projector)?;
        let leverage_scale = match flavor {
            HcFlavor::HC0 => vec![T::one(); model.n_total()],
            HcFlavor::HC2 => model.leverages().iter().map(|&p| T::one() / (T::one() - p)).collect(),
        };
        Ok(WildBootstrap {
            model,
            kind: hyp.kind(),
            flavor,
            scaled_residuals,
            projector,
            hyp_projector,
            leverage_scale,
        })
    }

    pub fn flavor(&self) -> HcFlavor {
        self.flavor
    }

    /// Evaluates one replicate for the given multipliers (length `N`).
    pub fn replicate(&self, multipliers: &[T]) -> ReplicateDraw<T> {
        let mut scratch = Scratch::default();
        scratch.multipliers.extend_from_slice(multipliers);
        self.replicate_with(&mut scratch)
    }

    fn replicate_with(&self, scratch: &mut Scratch<T>) -> ReplicateDraw<T> {
        let n = self.model.n_total();
        let design = self.model.design();
        scratch.errors.clear();
        scratch.errors.extend(self.scaled_residuals.iter().zip(&scratch.multipliers).map(|(&e, &t)| e * t));
        let errors = &scratch.errors;
        // beta* - beta_hat
        let delta: Vec<T> = (0..self.projector.rows()).map(|j| dot(self.projector.row(j), errors)).collect();
        let shift: Vec<T> = (0..self.hyp_projector.rows()).map(|j| dot(self.hyp_projector.row(j), errors)).collect();
        // u* = e* - X (beta* - beta_hat)
        scratch.weights.clear();
        for i in 0..n {
            let u = errors[i] - dot(design.row(i), &delta);
            scratch.weights.push(u * u * self.leverage_scale[i]);
        }
        // A diag(w) A'
        let q = self.hyp_projector.rows();
        let mut core = Matrix::zeros(q, q);
        for j in 0..q {
            let aj = self.hyp_projector.row(j);
            for k in j..q {
                let ak = self.hyp_projector.row(k);
                let mut s = T::zero();
                for i in 0..n {
                    s = s + aj[i] * scratch.weights[i] * ak[i];
                }
                core[(j, k)] = s;
                core[(k, j)] = s;
            }
        }
        let statistic = quadratic_form(self.kind, &core, &shift).ok();
        ReplicateDraw { statistic, shift }
    }

    /// Replicate `b` with Rademacher signs from stream `b` of `seed`.
    pub fn rademacher_replicate(&self, seed: u64, b: usize) -> ReplicateDraw<T> {
        let mut scratch = Scratch::default();
        let mut signs = vec![0i8; self.model.n_total()];
        scratch.fill_rademacher(seed, b, &mut signs);
        self.replicate_with(&mut scratch)
    }

    /// Runs `replications` replicates; `draw(b, buf)` fills the multipliers of
    /// replicate `b`. Draws come back in replicate order.
    pub fn run_with<F>(&self, replications: usize, draw: F) -> Vec<Option<T>>
    where
        F: Fn(usize, &mut [T]) + Sync,
    {
        let n = self.model.n_total();
        (0..replications)
            .into_par_iter()
            .with_min_len(32)
            .map_init(Scratch::default, |scratch, b| {
                scratch.multipliers.resize(n, T::zero());
                draw(b, &mut scratch.multipliers);
                self.replicate_with(scratch).statistic
            })
            .collect()
    }

    pub fn run(&self, cfg: &BootstrapConfig) -> Vec<Option<T>> {
        match cfg.multiplier {
            Multiplier::Rademacher => {
                let n = self.model.n_total();
                (0..cfg.replications)
                    .into_par_iter()
                    .with_min_len(32)
                    .map_init(
                        || (Scratch::default(), vec![0i8; n]),
                        |(scratch, signs), b| {
                            scratch.fill_rademacher(cfg.seed, b, signs);
                            self.replicate_with(scratch).statistic
                        },
                    )
                    .collect()
            }
        }
    }
}

/// `(1 + #{draws >= observed}) / (B + 1)`.
pub fn bootstrap_p_value(observed: f64, draws: &[f64]) -> f64 {
    let exceed = draws.iter().filter(|&&d| d >= observed).count();
    (1 + exceed) as f64 / (draws.len() + 1) as f64
}

fn summarize<T: Scalar>(observed: f64, raw: Vec<Option<T>>) -> BootstrapResult {
    let degenerate_count = raw.iter().filter(|d| d.is_none()).count();
    let mut draws: Vec<f64> = raw.into_iter().map(|d| d.map_or(f64::INFINITY, |t| t.to_f64_lossy())).collect();
    draws.sort_by(|a, b| a.total_cmp(b));
    let p_value = bootstrap_p_value(observed, &draws);
    BootstrapResult { observed, draws, p_value, degenerate_count }
}

fn observed_statistic<T: Scalar>(model: &FittedModel<T>, hyp: &HypothesisSpec<T>, flavor: HcFlavor) -> Result<f64> {
    let sigma = sandwich(model, flavor)?;
    Ok(wald_statistic(hyp, model.beta_hat(), &sigma.matrix, model.n_total())?.to_f64_lossy())
}

/// Wild-bootstrap test of `H beta = 0`.
pub fn wild_bootstrap_test<T: Scalar>(
    model: &FittedModel<T>,
    hyp: &HypothesisSpec<T>,
    cfg: &BootstrapConfig,
) -> Result<BootstrapResult> {
    if cfg.replications == 0 {
        return Err(Error::InvalidArity("bootstrap needs at least one replication".into()));
    }
    let engine = WildBootstrap::new(model, hyp, cfg.flavor)?;
    let observed = observed_statistic(model, hyp, cfg.flavor)?;
    Ok(summarize(observed, engine.run(cfg)))
}

/// Same as [`wild_bootstrap_test`] with caller-supplied multipliers.
pub fn wild_bootstrap_with<T, F>(
    model: &FittedModel<T>,
    hyp: &HypothesisSpec<T>,
    cfg: &BootstrapConfig,
    draw: F,
) -> Result<BootstrapResult>
where
    T: Scalar,
    F: Fn(usize, &mut [T]) + Sync,
{
    if cfg.replications == 0 {
        return Err(Error::InvalidArity("bootstrap needs at least one replication".into()));
    }
    let engine = WildBootstrap::new(model, hyp, cfg.flavor)?;
    let observed = observed_statistic(model, hyp, cfg.flavor)?;
    Ok(summarize(observed, engine.run_with(cfg.replications, draw)))
}
