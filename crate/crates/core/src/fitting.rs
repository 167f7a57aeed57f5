//! Weighted nonlinear least squares for the scaling-law families
//!
//! ```text
//! PowerOffset    p + q L^(-r)
//! ExpSaturation  p − q exp(−L/r)
//! PowerLaw       b L^(-a)
//! ```
//!
//! using Levenberg–Marquardt steps with Marquardt's diagonal scaling.
//! Parameter errors come from the pseudo-inverse of the Gauss–Newton normal
//! matrix scaled by the reduced chi-square, so they do not depend on the
//! overall scale of the supplied sigmas.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    PowerOffset,
    ExpSaturation,
    PowerLaw,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::PowerOffset, Family::ExpSaturation, Family::PowerLaw];

    pub fn n_params(self) -> usize {
        match self {
            Family::PowerLaw => 2,
            _ => 3,
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::PowerOffset | Family::ExpSaturation => &["p", "q", "r"],
            Family::PowerLaw => &["b", "a"],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::PowerOffset => "power_offset",
            Family::ExpSaturation => "exp_saturation",
            Family::PowerLaw => "power_law",
        }
    }

    pub fn eval<T: Real>(self, params: &[T], l: T) -> T {
        match self {
            Family::PowerOffset => params[0] + params[1] * l.powf(-params[2]),
            Family::ExpSaturation => params[0] - params[1] * (-l / params[2]).exp(),
            Family::PowerLaw => params[0] * l.powf(-params[1]),
        }
    }

    /// Partial derivatives with respect to each parameter.
    pub fn gradient<T: Real>(self, params: &[T], l: T) -> Vec<T> {
        match self {
            Family::PowerOffset => {
                let t = l.powf(-params[2]);
                vec![T::one(), t, -params[1] * l.ln() * t]
            }
            Family::ExpSaturation => {
                let r = params[2];
                let e = (-l / r).exp();
                vec![T::one(), -e, -params[1] * e * l / (r * r)]
            }
            Family::PowerLaw => {
                let t = l.powf(-params[1]);
                vec![t, -params[0] * l.ln() * t]
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_iter: usize,
    /// Stop when the step is below `xtol` relative to the parameters.
    pub xtol: f64,
    pub lambda0: f64,
    /// Points with smaller `L` are dropped by [`scaling_pipeline`].
    pub l_min: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iter: 200,
            xtol: 1e-10,
            lambda0: 1e-3,
            l_min: 8.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataPoint<T = f64> {
    pub x: T,
    pub y: T,
    pub sigma: Option<T>,
}

impl<T> DataPoint<T> {
    pub fn new(x: T, y: T) -> Self {
        DataPoint { x, y, sigma: None }
    }

    pub fn with_sigma(x: T, y: T, sigma: T) -> Self {
        DataPoint { x, y, sigma: Some(sigma) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult<T = f64> {
    pub family: Family,
    pub parameter_names: Vec<String>,
    pub parameters: Vec<T>,
    pub errors: Vec<T>,
    /// Weighted residual sum of squares (weights normalized to max 1).
    pub rss: T,
    pub weighted: bool,
    pub converged: bool,
    pub iterations: usize,
    pub n_points: usize,
    pub l_min: Option<f64>,
    /// RSS after the initial guess and after every accepted step.
    pub rss_history: Vec<T>,
}

impl<T: Real + Serialize> FitResult<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fit result serializes")
    }
}

impl<T: Real> FitResult<T> {
    pub fn param(&self, name: &str) -> Option<(T, T)> {
        let k = self.parameter_names.iter().position(|n| n == name)?;
        Some((self.parameters[k], self.errors[k]))
    }

    pub fn predict(&self, l: T) -> T {
        self.family.eval(&self.parameters, l)
    }
}

struct Problem<T> {
    family: Family,
    x: Vec<T>,
    y: Vec<T>,
    w: Vec<T>,
}

impl<T: Real> Problem<T> {
    fn rss(&self, params: &[T]) -> T {
        let mut s = T::zero();
        for k in 0..self.x.len() {
            let r = self.y[k] - self.family.eval(params, self.x[k]);
            s += self.w[k] * r * r;
        }
        s
    }

    /// Normal matrix `JᵀWJ` and `JᵀW r`.
    fn normal(&self, params: &[T]) -> (DMatrix<T>, DVector<T>) {
        let p = params.len();
        let mut a = DMatrix::zeros(p, p);
        let mut g = DVector::zeros(p);
        for k in 0..self.x.len() {
            let grad = self.family.gradient(params, self.x[k]);
            let r = self.y[k] - self.family.eval(params, self.x[k]);
            for i in 0..p {
                g[i] += self.w[k] * grad[i] * r;
                for j in 0..p {
                    a[(i, j)] += self.w[k] * grad[i] * grad[j];
                }
            }
        }
        (a, g)
    }

    /// Weighted linear least squares of `y` on the columns `1` and `basis`.
    fn linear_pair(&self, basis: impl Fn(T) -> T) -> Option<(T, T)> {
        let (mut s00, mut s01, mut s11, mut t0, mut t1) = (T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
        for k in 0..self.x.len() {
            let (w, b, y) = (self.w[k], basis(self.x[k]), self.y[k]);
            s00 += w;
            s01 += w * b;
            s11 += w * b * b;
            t0 += w * y;
            t1 += w * b * y;
        }
        let det = s00 * s11 - s01 * s01;
        if !det.is_finite() || det.abs() <= T::default_epsilon() * s00 * s11 {
            return None;
        }
        Some(((s11 * t0 - s01 * t1) / det, (s00 * t1 - s01 * t0) / det))
    }

    fn initial_guess(&self) -> Vec<T> {
        match self.family {
            Family::PowerLaw => self.power_law_guess(),
            Family::PowerOffset => self.grid_guess(|r, l| l.powf(-r), false),
            Family::ExpSaturation => self.grid_guess(|r, l| -(-l / r).exp(), true),
        }
    }

    /// Log–log regression; falls back to `b = mean, a = 1` for data that is
    /// not strictly positive.
    fn power_law_guess(&self) -> Vec<T> {
        let n = T::of_usize(self.x.len());
        if self.y.iter().any(|&y| y <= T::zero()) {
            let mean = self.y.iter().fold(T::zero(), |s, &y| s + y) / n;
            return vec![mean, T::one()];
        }
        let lx: Vec<T> = self.x.iter().map(|x| x.ln()).collect();
        let ly: Vec<T> = self.y.iter().map(|y| y.ln()).collect();
        let mx = lx.iter().fold(T::zero(), |s, &v| s + v) / n;
        let my = ly.iter().fold(T::zero(), |s, &v| s + v) / n;
        let mut sxy = T::zero();
        let mut sxx = T::zero();
        for k in 0..lx.len() {
            sxy += (lx[k] - mx) * (ly[k] - my);
            sxx += (lx[k] - mx) * (lx[k] - mx);
        }
        let slope = if sxx > T::zero() { sxy / sxx } else { -T::one() };
        vec![(my - slope * mx).exp(), -slope]
    }

    /// Scan the nonlinear scale `r` over a geometric grid, solving the
    /// linear pair `(p, q)` exactly at each trial value. For the exponential
    /// family the grid is relative to the largest `L`.
    fn grid_guess(&self, basis: impl Fn(T, T) -> T, relative: bool) -> Vec<T> {
        let lmax = self.x.iter().fold(T::zero(), |m, &x| m.max(x));
        let unit = if relative { lmax } else { T::one() };
        let mut best: Option<(T, Vec<T>)> = None;
        for k in 0..121 {
            // 10^-2 .. 10^2 relative to the unit
            let r = unit * T::of(10f64.powf(-2.0 + k as f64 / 30.0));
            let Some((p, q)) = self.linear_pair(|l| basis(r, l)) else {
                continue;
            };
            let params = vec![p, q, r];
            let rss = self.rss(&params);
            if rss.is_finite() && best.as_ref().is_none_or(|(b, _)| rss < *b) {
                best = Some((rss, params));
            }
        }
        best.map(|(_, p)| p).unwrap_or_else(|| {
            let last = self.y[self.y.len() - 1];
            vec![last, T::zero(), unit]
        })
    }
}

/// Least-squares fit of `family` to `data`. Either every point carries a
/// positive sigma (weighted fit) or none does.
pub fn fit<T: Real>(family: Family, data: &[DataPoint<T>], opts: &FitOptions) -> Result<FitResult<T>> {
    fit_from(family, data, None, opts)
}

/// As [`fit`], starting from `initial` instead of the built-in guess.
pub fn fit_from<T: Real>(
    family: Family,
    data: &[DataPoint<T>],
    initial: Option<&[T]>,
    opts: &FitOptions,
) -> Result<FitResult<T>> {
    let np = family.n_params();
    if data.len() <= np {
        return Err(Error::InvalidFitInput(format!(
            "{} points for {np} parameters",
            data.len()
        )));
    }
    let weighted = data[0].sigma.is_some();
    if data.iter().any(|d| d.sigma.is_some() != weighted) {
        return Err(Error::InvalidFitInput("sigmas must be given for all points or none".into()));
    }
    if data.iter().any(|d| !d.x.is_finite() || !d.y.is_finite() || d.x <= T::zero()) {
        return Err(Error::InvalidFitInput("points need finite values and positive L".into()));
    }
    let mut w: Vec<T> = Vec::with_capacity(data.len());
    for d in data {
        match d.sigma {
            Some(s) if s > T::zero() && s.is_finite() => w.push(T::one() / (s * s)),
            Some(_) => return Err(Error::InvalidFitInput("sigmas must be positive".into())),
            None => w.push(T::one()),
        }
    }
    let wmax = w.iter().fold(T::zero(), |m, &v| m.max(v));
    w.iter_mut().for_each(|v| *v /= wmax);
    let problem = Problem {
        family,
        x: data.iter().map(|d| d.x).collect(),
        y: data.iter().map(|d| d.y).collect(),
        w,
    };

    let mut params = match initial {
        Some(p) if p.len() == np => p.to_vec(),
        Some(p) => {
            return Err(Error::InvalidFitInput(format!(
                "{} initial values for {np} parameters",
                p.len()
            )))
        }
        None => problem.initial_guess(),
    };
    let mut rss = problem.rss(&params);
    if !rss.is_finite() {
        return Err(Error::InvalidFitInput("model is not finite at the initial guess".into()));
    }
    let mut history = vec![rss];
    let mut lambda = T::of(opts.lambda0);
    let xtol = T::of(opts.xtol);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        if rss == T::zero() {
            converged = true;
            break;
        }
        let (a, g) = problem.normal(&params);
        let dmax = a.diagonal().iter().fold(T::zero(), |m, &v| m.max(v));
        if dmax <= T::zero() || a.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularNormalMatrix);
        }
        let floor = dmax * T::of(1e-12);
        let scale: Vec<T> = a.diagonal().iter().map(|&d| d.max(floor)).collect();
        let mut accepted = false;
        while lambda < T::of(1e16) {
            let mut damped = a.clone();
            for i in 0..np {
                damped[(i, i)] += lambda * scale[i];
            }
            let step = damped.cholesky().map(|c| c.solve(&g));
            let Some(step) = step else {
                lambda *= T::of(10.0);
                continue;
            };
            let trial: Vec<T> = params.iter().zip(step.iter()).map(|(&p, &d)| p + d).collect();
            let trial_rss = problem.rss(&trial);
            if trial_rss.is_finite() && trial_rss < rss {
                let pnorm = params.iter().fold(T::zero(), |s, &p| s + p * p).sqrt();
                let small = step.norm() <= xtol * (pnorm + xtol);
                params = trial;
                rss = trial_rss;
                history.push(rss);
                lambda = (lambda / T::of(10.0)).max(T::of(1e-15));
                accepted = true;
                if small {
                    converged = true;
                }
                break;
            }
            lambda *= T::of(10.0);
        }
        if !accepted {
            // no descent direction left at machine precision
            converged = true;
        }
        if converged {
            break;
        }
    }

    let (a, _) = problem.normal(&params);
    let dof = T::of_usize(data.len() - np);
    let errors = match a.clone().pseudo_inverse(T::default_epsilon() * T::of(64.0)) {
        Ok(cov) => (0..np).map(|i| (cov[(i, i)] * rss / dof).max(T::zero()).sqrt()).collect(),
        Err(_) => return Err(Error::SingularNormalMatrix),
    };
    Ok(FitResult {
        family,
        parameter_names: family.param_names().iter().map(|s| s.to_string()).collect(),
        parameters: params,
        errors,
        rss,
        weighted,
        converged,
        iterations,
        n_points: data.len(),
        l_min: None,
        rss_history: history,
    })
}

/// One value of a curve in `L` with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub l: f64,
    pub value: f64,
    pub stderr: f64,
}

/// Weighted and unweighted fits of the same curve. The weighted fit is
/// absent when some standard error is zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFits {
    pub family: Family,
    pub weighted: Option<FitResult<f64>>,
    pub unweighted: FitResult<f64>,
}

/// Drops points below `opts.l_min` and fits both ways.
pub fn scaling_pipeline(curve: &[CurvePoint], family: Family, opts: &FitOptions) -> Result<ScalingFits> {
    let kept: Vec<&CurvePoint> = curve.iter().filter(|p| p.l >= opts.l_min).collect();
    let mut ls: Vec<f64> = kept.iter().map(|p| p.l).collect();
    ls.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if ls.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidFitInput("one value per L expected".into()));
    }
    let plain: Vec<DataPoint<f64>> = kept.iter().map(|p| DataPoint::new(p.l, p.value)).collect();
    let mut unweighted = fit(family, &plain, opts)?;
    unweighted.l_min = Some(opts.l_min);
    let weighted = if kept.iter().all(|p| p.stderr > 0.0) {
        let data: Vec<DataPoint<f64>> = kept.iter().map(|p| DataPoint::with_sigma(p.l, p.value, p.stderr)).collect();
        let mut w = fit(family, &data, opts)?;
        w.l_min = Some(opts.l_min);
        Some(w)
    } else {
        None
    };
    Ok(ScalingFits {
        family,
        weighted,
        unweighted,
    })
}
