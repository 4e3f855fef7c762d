//! Hypothesis matrices for factorial ANCOVA layouts.
//!
//! A hypothesis `H beta = 0` is carried either as a full-row-rank contrast
//! matrix `H` or as the orthogonal projection `T` onto the row space of `H`.
//! Projections for the factorial part are padded with an `r x r` zero block
//! for the covariate slopes.

use crate::error::{Error, Result};
use crate::linalg::{block_diag, kronecker, pseudoinverse, singular_values, Matrix};
use crate::scalar::Scalar;

const CONTRAST_RANK_TOLERANCE: f64 = 1e-10;
const PROJECTION_TOLERANCE: f64 = 1e-10;
const INTEGRAL_RANK_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypothesisKind {
    Contrast,
    Projection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossedEffect {
    MainB,
    MainC,
    Interaction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NestedEffect {
    Category,
    Subcategory,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisSpec<T> {
    kind: HypothesisKind,
    matrix: Matrix<T>,
    rank: usize,
}

impl<T: Scalar> HypothesisSpec<T> {
    /// Wraps a contrast matrix after checking that it has full row rank.
    pub fn contrast(matrix: Matrix<T>) -> Result<Self> {
        if matrix.rows() == 0 || matrix.rows() > matrix.cols() {
            return Err(Error::InvalidHypothesis(format!(
                "contrast: {}x{} cannot have full row rank",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let hht = matrix.matmul(&matrix.transpose())?;
        let sv = singular_values(&hht);
        let (largest, smallest) = (sv[0], sv[sv.len() - 1]);
        if !(smallest > T::lit(CONTRAST_RANK_TOLERANCE) * largest) {
            return Err(Error::InvalidHypothesis("contrast: matrix is not of full row rank".into()));
        }
        let rank = matrix.rows();
        Ok(HypothesisSpec { kind: HypothesisKind::Contrast, matrix, rank })
    }

    /// Wraps a symmetric idempotent matrix; the rank is its rounded trace.
    pub fn projection(matrix: Matrix<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidHypothesis("projection: matrix is not square".into()));
        }
        let tol = T::lit(PROJECTION_TOLERANCE);
        if matrix.max_asymmetry() > tol {
            return Err(Error::InvalidHypothesis("projection: matrix is not symmetric".into()));
        }
        if matrix.matmul(&matrix)?.max_abs_diff(&matrix) > tol {
            return Err(Error::InvalidHypothesis("projection: matrix is not idempotent".into()));
        }
        let trace = matrix.trace().to_f64_lossy();
        let rank = trace.round();
        if (trace - rank).abs() > INTEGRAL_RANK_TOLERANCE || rank < 1.0 {
            return Err(Error::InvalidHypothesis(format!("projection: trace {trace} is not a positive integer")));
        }
        Ok(HypothesisSpec { kind: HypothesisKind::Projection, matrix, rank: rank as usize })
    }

    pub fn kind(&self) -> HypothesisKind {
        self.kind
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    /// Degrees of freedom `q`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of model parameters the hypothesis applies to.
    pub fn n_params(&self) -> usize {
        self.matrix.cols()
    }
}

/// `(a-1) x (a+r)` contrast `(1, -I, 0)` for equal adjusted group means.
pub fn equal_means_contrast<T: Scalar>(a: usize, r: usize) -> Result<HypothesisSpec<T>> {
    if a < 2 {
        return Err(Error::InvalidArity(format!("equal-means hypothesis needs a >= 2 groups, got {a}")));
    }
    let h = Matrix::from_fn(a - 1, a + r, |i, j| {
        if j == 0 {
            T::one()
        } else if j == i + 1 {
            -T::one()
        } else {
            T::zero()
        }
    });
    HypothesisSpec::contrast(h)
}

/// `T = H'(HH')^-1 H`.
pub fn contrast_to_projection<T: Scalar>(h: &HypothesisSpec<T>) -> Result<HypothesisSpec<T>> {
    if h.kind != HypothesisKind::Contrast {
        return Err(Error::InvalidHypothesis("expected a contrast".into()));
    }
    let hm = &h.matrix;
    let hht = hm.matmul(&hm.transpose())?;
    let inner = crate::linalg::solve_spd(&hht, hm)?;
    let mut t = hm.transpose().matmul(&inner)?;
    t.symmetrize();
    HypothesisSpec::projection(t)
}

/// Centering matrix `P_a = I_a - J_a / a`.
pub fn centering<T: Scalar>(a: usize) -> Matrix<T> {
    let inv = T::one() / T::from_count(a.max(1));
    Matrix::from_fn(a, a, |i, j| if i == j { T::one() - inv } else { -inv })
}

fn averaging<T: Scalar>(n: usize) -> Matrix<T> {
    Matrix::ones(n, n).scale(T::one() / T::from_count(n))
}

fn pad_covariates<T: Scalar>(factorial: Matrix<T>, r: usize) -> Result<HypothesisSpec<T>> {
    let zero = Matrix::zeros(r, r);
    let mut t = block_diag(&[&factorial, &zero]);
    t.symmetrize();
    HypothesisSpec::projection(t)
}

/// `diag(P_a, 0_r)`: no difference between the adjusted group means.
pub fn oneway_projection<T: Scalar>(a: usize, r: usize) -> Result<HypothesisSpec<T>> {
    if a < 2 {
        return Err(Error::InvalidArity(format!("one-way hypothesis needs a >= 2 groups, got {a}")));
    }
    pad_covariates(centering(a), r)
}

/// Crossed `b x c` layout with cells ordered `(1,1), (1,2), ..., (b,c)`.
pub fn twoway_projection<T: Scalar>(
    b: usize,
    c: usize,
    effect: CrossedEffect,
    r: usize,
) -> Result<HypothesisSpec<T>> {
    if b < 2 || c < 2 {
        return Err(Error::InvalidArity(format!("crossed layout needs b, c >= 2, got {b}x{c}")));
    }
    let tf = match effect {
        CrossedEffect::MainB => kronecker(&centering(b), &averaging(c)),
        CrossedEffect::MainC => kronecker(&averaging(b), &centering(c)),
        CrossedEffect::Interaction => kronecker(&centering(b), &centering(c)),
    };
    pad_covariates(tf, r)
}

/// Nested layout: `c_per[i]` sub-categories under category `i`, cells ordered
/// category-major.
///
/// The category effect compares the unweighted sub-category averages of each
/// category. Its projection is the orthogonal projector onto the row space of
/// `P_b W`, where row `i` of `W` averages the cells of category `i`; with equal
/// `c_i` this is `P_b (x) J_c / c`.
pub fn nested_projection<T: Scalar>(
    b: usize,
    c_per: &[usize],
    effect: NestedEffect,
    r: usize,
) -> Result<HypothesisSpec<T>> {
    if b < 2 {
        return Err(Error::InvalidArity(format!("nested layout needs b >= 2 categories, got {b}")));
    }
    if c_per.len() != b {
        return Err(Error::InvalidArity(format!(
            "{} sub-category counts given for {b} categories",
            c_per.len()
        )));
    }
    if let Some(i) = c_per.iter().position(|&c| c == 0) {
        return Err(Error::InvalidArity(format!("category {} has no sub-categories", i + 1)));
    }
    let tf = match effect {
        NestedEffect::Subcategory => {
            let blocks: Vec<Matrix<T>> = c_per.iter().map(|&c| centering(c)).collect();
            let refs: Vec<&Matrix<T>> = blocks.iter().collect();
            block_diag(&refs)
        }
        NestedEffect::Category => {
            let total: usize = c_per.iter().sum();
            let mut category_of = Vec::with_capacity(total);
            for (i, &c) in c_per.iter().enumerate() {
                category_of.extend(std::iter::repeat_n(i, c));
            }
            let w = Matrix::from_fn(b, total, |i, j| {
                if category_of[j] == i {
                    T::one() / T::from_count(c_per[i])
                } else {
                    T::zero()
                }
            });
            let k = centering(b).matmul(&w)?;
            let kkt = k.matmul(&k.transpose())?;
            k.transpose().matmul(&pseudoinverse(&kkt))?.matmul(&k)?
        }
    };
    pad_covariates(tf, r)
}
