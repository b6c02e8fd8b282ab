//! Binary logistic regression fitted by iteratively reweighted least
//! squares (Newton-Raphson on the binomial log-likelihood).

use nalgebra::{DMatrix, DVector};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

pub const INTERCEPT: &str = "(intercept)";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub intercept: bool,
    pub max_iter: usize,
    /// Convergence threshold on the max-norm of the score vector.
    pub tol: f64,
    /// Coefficient norm at which the fit is abandoned as diverging.
    pub norm_guard: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            intercept: true,
            max_iter: 100,
            tol: 1e-8,
            norm_guard: 1e6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFit {
    /// Coefficient names; the intercept, when fitted, comes first.
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub z_scores: Vec<f64>,
    pub p_values: Vec<f64>,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Set when the coefficients ran away (complete or quasi-complete
    /// separation) and the fit was stopped.
    pub norm_guard_triggered: bool,
    pub gradient_max_norm: f64,
    pub has_intercept: bool,
}

impl ModelFit {
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.coefficients[i])
    }

    pub fn intercept(&self) -> f64 {
        if self.has_intercept {
            self.coefficients[0]
        } else {
            0.0
        }
    }

    /// Linear predictor for one row of feature values (no intercept entry).
    pub fn linear_predictor(&self, row: &[f64]) -> f64 {
        let slopes = &self.coefficients[usize::from(self.has_intercept)..];
        self.intercept() + slopes.iter().zip(row).map(|(w, x)| w * x).sum::<f64>()
    }

    /// Class 1 when the fitted probability is at least one half.
    pub fn predict(&self, row: &[f64]) -> u8 {
        u8::from(self.linear_predictor(row) >= 0.0)
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^x) without overflow.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn log_likelihood(eta: &DVector<f64>, y: &DVector<f64>) -> f64 {
    eta.iter()
        .zip(y.iter())
        .map(|(&e, &yi)| yi * e - softplus(e))
        .sum()
}

/// Modified Gram-Schmidt; returns the first column that lies (numerically)
/// in the span of the earlier ones.
fn first_collinear_column(x: &DMatrix<f64>) -> Option<usize> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for j in 0..x.ncols() {
        let col = x.column(j).into_owned();
        let norm0 = col.norm();
        let mut v = col;
        for q in &basis {
            let proj = q.dot(&v);
            v -= q * proj;
        }
        let norm = v.norm();
        if norm0 == 0.0 || norm <= 1e-10 * norm0 {
            return Some(j);
        }
        basis.push(v / norm);
    }
    None
}

/// Fit `P(label = 1) = sigmoid(b0 + w . x)` by maximum likelihood.
///
/// `columns` holds named feature columns of equal length. Columns are used
/// as given; standardize beforehand if wanted.
pub fn fit_logistic(
    columns: &[(&str, &[f64])],
    labels: &[u8],
    opts: FitOptions,
) -> Result<ModelFit> {
    let n = labels.len();
    if n < 2 {
        return Err(Error::domain("logistic regression needs at least two rows"));
    }
    if let Some((name, _)) = columns.iter().find(|(_, c)| c.len() != n) {
        return Err(Error::domain(format!(
            "column `{name}` length differs from labels"
        )));
    }
    if labels.iter().any(|&y| y > 1) {
        return Err(Error::domain("labels must be 0 or 1"));
    }

    let mut names: Vec<String> = Vec::new();
    if opts.intercept {
        names.push(INTERCEPT.to_string());
    }
    names.extend(columns.iter().map(|(name, _)| name.to_string()));
    let p = names.len();
    if p == 0 {
        return Err(Error::domain("model has no parameters"));
    }

    let offset = usize::from(opts.intercept);
    let x = DMatrix::from_fn(n, p, |i, j| {
        if opts.intercept && j == 0 {
            1.0
        } else {
            columns[j - offset].1[i]
        }
    });
    if let Some(j) = first_collinear_column(&x) {
        return Err(Error::RankDeficient(names[j].clone()));
    }
    let y = DVector::from_iterator(n, labels.iter().map(|&l| f64::from(l)));

    let mut beta = DVector::<f64>::zeros(p);
    let mut converged = false;
    let mut guard = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        let eta = &x * &beta;
        let (grad, hess) = score_and_information(&x, &y, &eta);
        let gmax = grad.amax();

        let Some(chol) = hess.clone().cholesky() else {
            // Information matrix collapsed: fitted probabilities are all
            // saturated at 0 or 1.
            guard = true;
            break;
        };
        let step = chol.solve(&grad);

        if gmax < opts.tol {
            // A genuine optimum has a vanishing Newton step too; a large step
            // with a vanishing score means the likelihood keeps rising
            // towards infinity.
            if step.amax() <= 1e-6 * (1.0 + beta.amax()) {
                converged = true;
            } else {
                guard = true;
            }
            break;
        }

        // Step halving keeps the iteration monotone.
        let ll = log_likelihood(&eta, &y);
        let mut scale = 1.0;
        let mut candidate = &beta + &step;
        for _ in 0..30 {
            if log_likelihood(&(&x * &candidate), &y) >= ll - 1e-12 * ll.abs().max(1.0) {
                break;
            }
            scale *= 0.5;
            candidate = &beta + &step * scale;
        }
        beta = candidate;

        let norm = beta.norm();
        if norm > opts.norm_guard {
            beta *= opts.norm_guard / norm;
            guard = true;
            break;
        }
    }

    let eta = &x * &beta;
    let (grad, hess) = score_and_information(&x, &y, &eta);
    let covariance = hess.try_inverse();
    let std_errors: Vec<f64> = (0..p)
        .map(|j| match &covariance {
            Some(c) if c[(j, j)] > 0.0 => c[(j, j)].sqrt(),
            _ => f64::NAN,
        })
        .collect();
    let coefficients: Vec<f64> = beta.iter().copied().collect();
    let z_scores: Vec<f64> = coefficients
        .iter()
        .zip(&std_errors)
        .map(|(b, s)| b / s)
        .collect();
    let p_values = z_scores
        .iter()
        .map(|z| {
            if z.is_nan() {
                f64::NAN
            } else {
                erfc(z.abs() / std::f64::consts::SQRT_2)
            }
        })
        .collect();
    if !converged {
        log::warn!(
            "logistic fit did not converge after {iterations} iterations (norm guard: {guard})"
        );
    }

    Ok(ModelFit {
        names,
        coefficients,
        std_errors,
        z_scores,
        p_values,
        log_likelihood: log_likelihood(&eta, &y),
        iterations,
        converged,
        norm_guard_triggered: guard,
        gradient_max_norm: grad.amax(),
        has_intercept: opts.intercept,
    })
}

/// Score vector X'(y - p) and Fisher information X'WX at `eta`.
fn score_and_information(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    eta: &DVector<f64>,
) -> (DVector<f64>, DMatrix<f64>) {
    let p = x.ncols();
    let mut grad = DVector::zeros(p);
    let mut hess = DMatrix::zeros(p, p);
    for i in 0..x.nrows() {
        let e = eta[i];
        let prob = sigmoid(e);
        let w = prob * sigmoid(-e);
        // y - p computed without cancellation when p is close to 1
        let resid = if y[i] > 0.5 { sigmoid(-e) } else { -prob };
        for a in 0..p {
            let xa = x[(i, a)];
            grad[a] += xa * resid;
            for b in 0..=a {
                hess[(a, b)] += w * xa * x[(i, b)];
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            hess[(b, a)] = hess[(a, b)];
        }
    }
    (grad, hess)
}
