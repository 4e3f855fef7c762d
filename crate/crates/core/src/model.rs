//! ANCOVA design matrices in cell-means coding and their OLS fit.

use crate::error::{Error, Result};
use crate::linalg::{Cholesky, Matrix, Vector};
use crate::scalar::Scalar;

/// Observations of a one-way ANCOVA layout.
///
/// Group labels are 1-based; every label in `1..=a` must occur. Rows keep the
/// order in which they were supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    response: Vector<T>,
    group_of: Vec<usize>,
    covariates: Matrix<T>,
    n_groups: usize,
}

impl<T: Scalar> Dataset<T> {
    /// `covariates` is `N x r` (use `Matrix::zeros(N, 0)` for none). The number of
    /// groups is the largest label.
    pub fn new(response: Vector<T>, group_of: Vec<usize>, covariates: Matrix<T>) -> Result<Self> {
        let n_groups = group_of.iter().copied().max().unwrap_or(0);
        Self::with_groups(response, group_of, covariates, n_groups)
    }

    pub fn with_groups(
        response: Vector<T>,
        group_of: Vec<usize>,
        covariates: Matrix<T>,
        n_groups: usize,
    ) -> Result<Self> {
        let n = response.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("empty dataset".into()));
        }
        if group_of.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} group labels for {n} responses",
                group_of.len()
            )));
        }
        if covariates.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "covariate matrix has {} rows for {n} responses",
                covariates.rows()
            )));
        }
        if let Some(&bad) = group_of.iter().find(|&&g| g == 0 || g > n_groups) {
            return Err(Error::InvalidArity(format!("group label {bad} outside 1..={n_groups}")));
        }
        let mut sizes = vec![0usize; n_groups];
        for &g in &group_of {
            sizes[g - 1] += 1;
        }
        if let Some(i) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::EmptyGroup { group: i + 1 });
        }
        Ok(Dataset { response, group_of, covariates, n_groups })
    }

    pub fn response(&self) -> &Vector<T> {
        &self.response
    }

    pub fn group_of(&self) -> &[usize] {
        &self.group_of
    }

    pub fn covariates(&self) -> &Matrix<T> {
        &self.covariates
    }

    pub fn n_groups(&self) -> usize {
        self.n_groups
    }

    pub fn n_covariates(&self) -> usize {
        self.covariates.cols()
    }

    pub fn len(&self) -> usize {
        self.response.len()
    }

    pub fn is_empty(&self) -> bool {
        self.response.is_empty()
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_groups];
        for &g in &self.group_of {
            sizes[g - 1] += 1;
        }
        sizes
    }

    /// Same groups and covariates with a different response vector.
    pub fn with_response(&self, response: Vector<T>) -> Result<Self> {
        if response.len() != self.len() {
            return Err(Error::DimensionMismatch("replacement response has wrong length".into()));
        }
        Ok(Dataset { response, ..self.clone() })
    }
}

/// `N x (a + r)` design: group indicators followed by the covariates.
pub fn build_design<T: Scalar>(data: &Dataset<T>) -> Matrix<T> {
    let a = data.n_groups;
    let r = data.n_covariates();
    Matrix::from_fn(data.len(), a + r, |i, j| {
        if j < a {
            if data.group_of[i] == j + 1 {
                T::one()
            } else {
                T::zero()
            }
        } else {
            data.covariates[(i, j - a)]
        }
    })
}

/// Least-squares fit of `Y = X beta + eps` with everything the tests reuse.
#[derive(Debug, Clone)]
pub struct FittedModel<T> {
    design: Matrix<T>,
    response: Vector<T>,
    beta_hat: Vector<T>,
    residuals: Vector<T>,
    leverages: Vector<T>,
    gram_inverse: Matrix<T>,
}

impl<T: Scalar> FittedModel<T> {
    /// Fits an arbitrary full-column-rank linear model.
    pub fn from_design(design: Matrix<T>, response: Vector<T>) -> Result<Self> {
        let (n, c) = design.shape();
        if response.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "design has {n} rows but response has length {}",
                response.len()
            )));
        }
        if c == 0 {
            return Err(Error::DimensionMismatch("design has no columns".into()));
        }
        let gram = design.transpose().matmul(&design)?;
        let gram = match Cholesky::new(&gram) {
            Ok(ch) => ch,
            Err(Error::SingularMatrix { pivot }) => return Err(Error::RankDeficient { column: pivot }),
            Err(e) => return Err(e),
        };
        let xty = design.tr_mul_vec(&response)?;
        let beta_hat = gram.solve_vec(&xty);
        let fitted = design.mul_vec(&beta_hat)?;
        let residuals: Vec<T> = response.iter().zip(&fitted).map(|(&y, &f)| y - f).collect();
        let gram_inverse = gram.inverse();
        let leverages = (0..n)
            .map(|i| {
                let x = design.row(i);
                let gx = gram_inverse.mul_vec(x).expect("conformable");
                crate::linalg::dot(x, &gx)
            })
            .collect();
        Ok(FittedModel {
            design,
            response,
            beta_hat: Vector::from_vec_unchecked(beta_hat),
            residuals: Vector::from_vec_unchecked(residuals),
            leverages: Vector::from_vec_unchecked(leverages),
            gram_inverse,
        })
    }

    pub fn design(&self) -> &Matrix<T> {
        &self.design
    }

    pub fn response(&self) -> &Vector<T> {
        &self.response
    }

    /// Coefficients ordered as group means followed by covariate slopes.
    pub fn beta_hat(&self) -> &Vector<T> {
        &self.beta_hat
    }

    pub fn residuals(&self) -> &Vector<T> {
        &self.residuals
    }

    /// Diagonal of the hat matrix `X (X'X)^-1 X'`.
    pub fn leverages(&self) -> &Vector<T> {
        &self.leverages
    }

    /// `(X'X)^-1`.
    pub fn gram_inverse(&self) -> &Matrix<T> {
        &self.gram_inverse
    }

    pub fn n_total(&self) -> usize {
        self.design.rows()
    }

    pub fn n_params(&self) -> usize {
        self.design.cols()
    }

    pub fn fitted_values(&self) -> Vec<T> {
        self.response.iter().zip(self.residuals.iter()).map(|(&y, &u)| y - u).collect()
    }

    pub fn residual_sum_of_squares(&self) -> T {
        self.residuals.dot(&self.residuals)
    }
}

/// Builds the cell-means design and fits it by OLS.
pub fn fit_ols<T: Scalar>(data: &Dataset<T>) -> Result<FittedModel<T>> {
    FittedModel::from_design(build_design(data), data.response.clone())
}
