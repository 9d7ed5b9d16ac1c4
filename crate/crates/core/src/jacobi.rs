//! Jacobi functions, elementary spherical functions and the Plancherel density.
//!
//! `φ_μ^{(α,β)}(r) = ₂F₁((ρ+iμ)/2, (ρ−iμ)/2; α+1; −sinh²r)` with `ρ = α+β+1`.
//! Near the origin it is summed as a hypergeometric series after the Pfaff
//! transformation
//!
//! ```text
//! φ = cosh(r)^{-(ρ+iμ)} ₂F₁((ρ+iμ)/2, (α−β+1+iμ)/2; α+1; tanh²r),
//! ```
//!
//! which converges for every `r`; past the switchover radius (or once `μr`
//! makes the series cancel badly) the value is continued with the Jacobi
//! differential equation, see [`crate::ode`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gamma::{ln_abs_gamma_ratio, ln_gamma_real};
use crate::ode::{propagate, JacobiOde};
use crate::params::DrParams;
use crate::report::{CheckReport, Hypothesis, Verdict};

/// Default series/ODE switchover radius in the Jacobi variable `r`.
pub const DEFAULT_SWITCH_RADIUS: f64 = 1.0;

/// Largest `μ r` summed by the series; beyond it cancellation costs digits.
const SERIES_MU_R: f64 = 8.0;

const MAX_TERMS: usize = 4000;

/// Below this the density is continued by its `λ²` law.
pub const LAMBDA_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMethod {
    Series,
    OdeContinuation,
}

/// One evaluation of `φ_λ(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalEval {
    pub lambda: f64,
    pub t: f64,
    pub value: f64,
    pub method: EvalMethod,
    pub est_error: f64,
}

/// Sum of the Pfaff-transformed series; returns `(value, error estimate)`.
fn pfaff_series(alpha: f64, beta: f64, mu: f64, r: f64) -> Result<(f64, f64)> {
    if r == 0.0 {
        return Ok((1.0, 0.0));
    }
    let rho = alpha + beta + 1.0;
    let a = Complex64::new(0.5 * rho, 0.5 * mu);
    let b = Complex64::new(0.5 * (alpha - beta + 1.0), 0.5 * mu);
    let c = alpha + 1.0;
    let x = r.tanh().powi(2);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut biggest = 1.0f64;
    let mut quiet = 0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * x;
        sum += term;
        let t = term.norm();
        biggest = biggest.max(t);
        if t <= 1e-17 * sum.norm() && nf > mu * r.sinh() {
            quiet += 1;
            if quiet >= 3 {
                let prefactor = (-Complex64::new(rho, mu) * r.cosh().ln()).exp();
                let v = prefactor * sum;
                let scale = prefactor.norm();
                let est = scale * (biggest * 4.0 * f64::EPSILON * (n as f64).sqrt() + t);
                return Ok((v.re, est + v.im.abs()));
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::SeriesNonConvergence {
        terms: MAX_TERMS,
        last_term: term.norm(),
        partial_sum: sum.norm(),
    })
}

/// Series value and `r`-derivative (via the index-shift identity
/// `φ' = −E sinh(2r)/(4(α+1)) · φ^{(α+1,β+1)}`).
fn series_with_derivative(alpha: f64, beta: f64, mu: f64, r: f64) -> Result<(f64, f64, f64)> {
    let (v, e1) = pfaff_series(alpha, beta, mu, r)?;
    let (shifted, e2) = pfaff_series(alpha + 1.0, beta + 1.0, mu, r)?;
    let rho = alpha + beta + 1.0;
    let energy = mu * mu + rho * rho;
    let k = -energy * (2.0 * r).sinh() / (4.0 * (alpha + 1.0));
    Ok((v, k * shifted, e1 + (k * e2).abs()))
}

/// Evaluator for `φ_μ^{(α,β)}` with a configurable switchover radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiFunction {
    pub alpha: f64,
    pub beta: f64,
    pub switch_radius: f64,
}

impl JacobiFunction {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > beta && beta > -0.5) {
            return Err(invalid(
                "jacobi indices",
                format!("need alpha > beta > -1/2, got alpha={alpha}, beta={beta}"),
            ));
        }
        Ok(Self {
            alpha,
            beta,
            switch_radius: DEFAULT_SWITCH_RADIUS,
        })
    }

    /// Constructor without the `α > β > −1/2` check, for degenerate cases
    /// (closed-form oracles at half-integer indices).
    pub fn unchecked(alpha: f64, beta: f64) -> Self {
        Self {
            alpha,
            beta,
            switch_radius: DEFAULT_SWITCH_RADIUS,
        }
    }

    pub fn with_switch_radius(mut self, r: f64) -> Self {
        self.switch_radius = r;
        self
    }

    pub fn rho(&self) -> f64 {
        self.alpha + self.beta + 1.0
    }

    fn series_limit(&self, mu: f64) -> f64 {
        if mu > 0.0 {
            self.switch_radius.min(SERIES_MU_R / mu)
        } else {
            self.switch_radius
        }
    }

    /// `φ_μ(r)` with its method and error estimate.
    pub fn eval(&self, mu: f64, r: f64) -> Result<(f64, EvalMethod, f64)> {
        if !(r >= 0.0) || !r.is_finite() || !mu.is_finite() {
            return Err(invalid("r", format!("need finite r >= 0, got {r}")));
        }
        let mu = mu.abs();
        let rs = self.series_limit(mu);
        if r <= rs {
            let (v, e) = pfaff_series(self.alpha, self.beta, mu, r)?;
            return Ok((v, EvalMethod::Series, e));
        }
        let (y0, dy0, e0) = series_with_derivative(self.alpha, self.beta, mu, rs)?;
        let ode = JacobiOde::new(self.alpha, self.beta, mu);
        let p = propagate(&ode, rs, y0, dy0, &[r])?;
        Ok((
            p.values[0],
            EvalMethod::OdeContinuation,
            e0 + p.est_error + 1e-14,
        ))
    }

    pub fn value(&self, mu: f64, r: f64) -> Result<f64> {
        self.eval(mu, r).map(|e| e.0)
    }

    /// `φ_μ` at every point of the ascending, nonnegative `rs` in one sweep.
    pub fn sweep(&self, mu: f64, rs: &[f64]) -> Result<Vec<f64>> {
        if rs.windows(2).any(|w| w[1] < w[0]) || rs.first().is_some_and(|&r| r < 0.0) {
            return Err(Error::InvalidGrid(
                "sweep radii must be ascending and nonnegative".into(),
            ));
        }
        let mu = mu.abs();
        let rs_lim = self.series_limit(mu);
        let split = rs.partition_point(|&r| r <= rs_lim);
        let mut out = Vec::with_capacity(rs.len());
        for &r in &rs[..split] {
            out.push(pfaff_series(self.alpha, self.beta, mu, r)?.0);
        }
        if split < rs.len() {
            let (y0, dy0, _) = series_with_derivative(self.alpha, self.beta, mu, rs_lim)?;
            let ode = JacobiOde::new(self.alpha, self.beta, mu);
            out.extend(propagate(&ode, rs_lim, y0, dy0, &rs[split..])?.values);
        }
        Ok(out)
    }

    /// Series-only value (the small-`r` regime), with its error estimate.
    pub fn series_value(&self, mu: f64, r: f64) -> Result<(f64, f64)> {
        pfaff_series(self.alpha, self.beta, mu.abs(), r)
    }

    /// ODE-only value: the equation is started at a tiny radius from its
    /// two-term Taylor expansion `1 + a₁r² + a₂r⁴` and integrated outwards,
    /// never touching the hypergeometric series.
    pub fn ode_value(&self, mu: f64, r: f64) -> Result<f64> {
        let ode = JacobiOde::new(self.alpha, self.beta, mu);
        let e = ode.energy();
        let (a, b) = (2.0 * self.alpha + 1.0, 2.0 * self.beta + 1.0);
        let a1 = -e / (4.0 * (self.alpha + 1.0));
        let a2 = -a1 * (e + 2.0 * a / 3.0 + 2.0 * b) / (8.0 * (self.alpha + 2.0));
        let r0 = (1e-3 / e).sqrt().min(1e-2).min(r);
        if r0 == 0.0 {
            return Ok(1.0);
        }
        let y0 = 1.0 + a1 * r0 * r0 + a2 * r0.powi(4);
        let dy0 = 2.0 * a1 * r0 + 4.0 * a2 * r0.powi(3);
        Ok(propagate(&ode, r0, y0, dy0, &[r])?.values[0])
    }
}

/// `φ_lam^{(α,β)}(r)`.
pub fn jacobi_phi(alpha: f64, beta: f64, lam: f64, r: f64) -> Result<f64> {
    JacobiFunction::new(alpha, beta)?.value(lam, r)
}

/// Elementary spherical function `φ_λ(t) = φ_{2λ}^{(α,β)}(t/2)`.
pub fn spherical_phi(params: &DrParams, lam: f64, t: f64) -> Result<SphericalEval> {
    let (value, method, est_error) = params.jacobi().eval(2.0 * lam, 0.5 * t)?;
    Ok(SphericalEval {
        lambda: lam,
        t,
        value: if t == 0.0 { 1.0 } else { value },
        method,
        est_error,
    })
}

/// `φ_λ` on ascending `ts`.
pub fn spherical_sweep(params: &DrParams, lam: f64, ts: &[f64]) -> Result<Vec<f64>> {
    let rs: Vec<f64> = ts.iter().map(|t| 0.5 * t).collect();
    params.jacobi().sweep(2.0 * lam, &rs)
}

/// `ln |c(μ)|` for the Jacobi c-function
/// `c(μ) = 2^{ρ−iμ} Γ(α+1) Γ(iμ) / (Γ((ρ+iμ)/2) Γ((α−β+1+iμ)/2))`.
pub fn ln_abs_c_function(alpha: f64, beta: f64, mu: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::GammaPole { lambda: mu });
    }
    let rho = alpha + beta + 1.0;
    // Γ(iμ) = 2^{iμ−1} π^{−1/2} Γ(iμ/2) Γ(1/2 + iμ/2) pairs each factor with one
    // of equal imaginary part
    let y = 0.5 * mu;
    Ok((rho - 1.0) * std::f64::consts::LN_2 - 0.5 * std::f64::consts::PI.ln()
        + ln_gamma_real(alpha + 1.0)
        + ln_abs_gamma_ratio(0.0, 0.5 * rho, y)
        + ln_abs_gamma_ratio(0.5, 0.5 * (alpha - beta + 1.0), y))
}

/// Spectral-variable convention linking `λ` to the Jacobi parameter `μ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralScaling {
    /// `μ = 2λ`, matching `φ_λ(t) = φ_{2λ}(t/2)`.
    Doubled,
    /// `μ = λ`.
    Unit,
}

impl SpectralScaling {
    pub fn factor(self) -> f64 {
        match self {
            SpectralScaling::Doubled => 2.0,
            SpectralScaling::Unit => 1.0,
        }
    }
}

/// Uncalibrated `|c(sλ)|⁻²` for the given scaling `s`.
pub fn raw_density(alpha: f64, beta: f64, scaling: SpectralScaling, lam: f64) -> Result<f64> {
    if !(lam >= 0.0) || !lam.is_finite() {
        return Err(Error::GammaPole { lambda: lam });
    }
    if lam == 0.0 {
        return Ok(0.0);
    }
    let s = scaling.factor();
    if lam < LAMBDA_FLOOR {
        let at_floor = (-2.0 * ln_abs_c_function(alpha, beta, s * LAMBDA_FLOOR)?).exp();
        return Ok(at_floor * (lam / LAMBDA_FLOOR).powi(2));
    }
    Ok((-2.0 * ln_abs_c_function(alpha, beta, s * lam)?).exp())
}

/// Calibrated Plancherel density `|c(λ)|⁻²`: `∫|f|²A dt = ∫|f̂|² density dλ`.
pub fn plancherel_density(params: &DrParams, lam: f64) -> Result<f64> {
    let cal = params.plancherel();
    Ok(cal.constant * raw_density(params.alpha(), params.beta(), cal.scaling, lam)?)
}

/// Rigorous comparison constants between the density and `λ^{d−1}` on `[1, ∞)`:
/// `lower·λ^{d−1} ≤ density(λ) ≤ upper·λ^{d−1}` (sampled on a log grid
/// up to `1e8`, where the ratio has settled).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityComparison {
    pub lower: f64,
    pub upper: f64,
}

pub fn density_comparison(params: &DrParams) -> Result<DensityComparison> {
    let d1 = params.d() as f64 - 1.0;
    let mut lower = f64::INFINITY;
    let mut upper = 0.0f64;
    for i in 0..=400 {
        let lam = 10f64.powf(8.0 * i as f64 / 400.0);
        let ratio = plancherel_density(params, lam)? / lam.powf(d1);
        lower = lower.min(ratio);
        upper = upper.max(ratio);
    }
    Ok(DensityComparison { lower, upper })
}

/// Normalized ratios used by the asymptotics checks.
pub fn density_small_ratio(params: &DrParams, lam: f64) -> Result<f64> {
    Ok(plancherel_density(params, lam)? / (lam * lam))
}

pub fn density_large_ratio(params: &DrParams, lam: f64) -> Result<f64> {
    Ok(plancherel_density(params, lam)? / lam.powi(params.d() as i32 - 1))
}

/// `rad Δ_S` applied by five-point central differences, for a profile
/// `g` sampled at `t-2h, t-h, t, t+h, t+2h`.
fn rad_laplacian_stencil(m: u32, k: u32, t: f64, h: f64, g: &[f64; 5]) -> f64 {
    let d1 = (-g[4] + 8.0 * g[3] - 8.0 * g[1] + g[0]) / (12.0 * h);
    let d2 = (-g[4] + 16.0 * g[3] - 30.0 * g[2] + 16.0 * g[1] - g[0]) / (12.0 * h * h);
    let drift = 0.5 * (m + k) as f64 / (0.5 * t).tanh() + 0.5 * k as f64 * (0.5 * t).tanh();
    d2 + drift * d1
}

/// `|rad Δ_S φ + (λ² + Q²/4) φ|` where `φ(t) = φ_{2λ}^{(α,β)}(t/2)` for the
/// candidate indices and `rad Δ_S` is the radial Laplacian of the `(m, k)`
/// space. The step is selected by a halving study (the step whose residual
/// changes least under halving).
pub fn eigen_residual(m: u32, k: u32, jf: &JacobiFunction, lam: f64, t: f64) -> Result<f64> {
    let q = 0.5 * m as f64 + k as f64;
    let eig = lam * lam + 0.25 * q * q;
    let mut steps = Vec::new();
    let mut h = (2e-3f64).min(0.2 * t);
    for _ in 0..4 {
        let rs: Vec<f64> = (-2..=2).map(|i| 0.5 * (t + i as f64 * h)).collect();
        let v = jf.sweep(2.0 * lam, &rs)?;
        let g = [v[0], v[1], v[2], v[3], v[4]];
        steps.push((rad_laplacian_stencil(m, k, t, h, &g) + eig * g[2]).abs());
        h *= 0.5;
    }
    let best = (0..steps.len() - 1)
        .min_by(|&i, &j| {
            (steps[i] - steps[i + 1])
                .abs()
                .total_cmp(&(steps[j] - steps[j + 1]).abs())
        })
        .unwrap();
    Ok(steps[best + 1])
}

/// Which audit [`phi_bounds_audit`] runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditMode {
    /// The three pointwise bounds on `φ_λ`.
    LemmaBounds,
    /// Eigenfunction residual against the radial Laplacian.
    Eigen,
}

/// Slack below which a bound counts as violated.
pub const BOUND_SLACK: f64 = 1e-10;

/// Pointwise audit of `|φ_λ(t)| ≤ 1`, `|1−φ_λ(t)| ≤ t²/2·(4λ²+Q²/4)` and the
/// positive lower bound of `|1−φ_λ(t)|` on `λt ≥ 1` (mode `LemmaBounds`), or
/// of the eigen-residual (mode `Eigen`, tolerance `1e-4(1+λ²)`).
///
/// Rows are indexed by `t` (outer) and `λ` (inner); `lhs` holds the bounded
/// quantity, `rhs` the bound.
pub fn phi_bounds_audit(
    params: &DrParams,
    lambda_grid: &[f64],
    t_grid: &[f64],
    mode: AuditMode,
) -> Result<CheckReport> {
    if lambda_grid.iter().chain(t_grid).any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::InvalidGrid(
            "audit grids must be positive and finite".into(),
        ));
    }
    let mut ts: Vec<f64> = t_grid.to_vec();
    ts.sort_by(f64::total_cmp);
    let q = params.q();
    let jf = params.jacobi();
    let columns: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        lambda_grid
            .par_iter()
            .map(|&lam| match mode {
                AuditMode::LemmaBounds => spherical_sweep(params, lam, &ts),
                AuditMode::Eigen => ts
                    .iter()
                    .map(|&t| eigen_residual(params.m(), params.k(), &jf, lam, t))
                    .collect(),
            })
            .collect::<Result<Vec<_>>>()?
    };
    let mut report = CheckReport::new(
        match mode {
            AuditMode::LemmaBounds => "lemma-phi-bounds",
            AuditMode::Eigen => "phi-eigen-residual",
        },
        params,
    );
    match mode {
        AuditMode::LemmaBounds => {
            let mut worst_unit = f64::INFINITY;
            let mut worst_quad = f64::INFINITY;
            let mut lower_inf = f64::INFINITY;
            for (ti, &t) in ts.iter().enumerate() {
                for (li, &lam) in lambda_grid.iter().enumerate() {
                    let phi = columns[li][ti];
                    let dev = (1.0 - phi).abs();
                    let bound = 0.5 * t * t * (4.0 * lam * lam + 0.25 * q * q);
                    worst_unit = worst_unit.min(1.0 - phi.abs());
                    worst_quad = worst_quad.min(bound - dev);
                    if lam * t >= 1.0 {
                        lower_inf = lower_inf.min(dev);
                    }
                    report.push_row(t, dev, bound);
                }
            }
            report.hypotheses.push(Hypothesis::new(
                "abs_phi_le_one",
                worst_unit >= -BOUND_SLACK,
                worst_unit,
            ));
            report.hypotheses.push(Hypothesis::new(
                "quadratic_bound",
                worst_quad >= -BOUND_SLACK,
                worst_quad,
            ));
            report.hypotheses.push(Hypothesis::new(
                "lower_bound_positive",
                lower_inf.is_finite() && lower_inf > 0.0,
                lower_inf,
            ));
            report.summary.insert("worst_slack_unit".into(), worst_unit);
            report.summary.insert("worst_slack_quadratic".into(), worst_quad);
            report.summary.insert("lower_bound_constant".into(), lower_inf);
            report.tolerances.insert("slack".into(), BOUND_SLACK);
        }
        AuditMode::Eigen => {
            let mut worst = 0.0f64;
            for (ti, &t) in ts.iter().enumerate() {
                for (li, &lam) in lambda_grid.iter().enumerate() {
                    let tol = 1e-4 * (1.0 + lam * lam);
                    let res = columns[li][ti];
                    worst = worst.max(res / tol);
                    report.push_row(t, res, tol);
                }
            }
            report.hypotheses.push(Hypothesis::new(
                "eigen_residual",
                worst <= 1.0,
                worst,
            ));
            report.summary.insert("worst_normalized_residual".into(), worst);
            report.tolerances.insert("residual_per_1_plus_lambda2".into(), 1e-4);
        }
    }
    report.finish(|r| {
        if r.hypotheses.iter().all(|h| h.pass) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    });
    Ok(report)
}

/// Empirical `inf |1 − φ_λ(t)|` over `{λt ≥ 1}` on a grid of `(0, λ_max] × (0, t_max]`
/// that is refined along the hyperbola `λt = 1`.
pub fn lower_bound_constant(params: &DrParams, lambda_max: f64, t_max: f64) -> Result<f64> {
    lower_bound_constant_with(params, lambda_max, t_max, 120)
}

/// As [`lower_bound_constant`] with `n` λ-samples (and `n` samples per λ in `t`).
pub fn lower_bound_constant_with(
    params: &DrParams,
    lambda_max: f64,
    t_max: f64,
    n: usize,
) -> Result<f64> {
    if !(lambda_max >= 1.0 && t_max >= 1.0) {
        return Err(invalid(
            "lambda_max/t_max",
            "both must be at least 1 for the region λt ≥ 1 to be meaningful",
        ));
    }
    use rayon::prelude::*;
    let lam_min = 1.0 / t_max;
    let lams: Vec<f64> = (0..n)
        .map(|i| lam_min * (lambda_max / lam_min).powf(i as f64 / (n - 1) as f64))
        .collect();
    let infs = lams
        .par_iter()
        .map(|&lam| {
            let t0 = 1.0 / lam;
            // dense near λt = 1, geometric beyond
            let ts: Vec<f64> = (0..n)
                .map(|j| t0 * (t_max / t0).powf((j as f64 / (n - 1) as f64).powi(2)))
                .collect();
            let vals = spherical_sweep(params, lam, &ts)?;
            Ok(vals.iter().fold(f64::INFINITY, |m, v| m.min((1.0 - v).abs())))
        })
        .collect::<Result<Vec<f64>>>()?;
    let inf = infs.into_iter().fold(f64::INFINITY, f64::min);
    if !(inf >= 1e-6) {
        return Err(Error::DegenerateLowerBound {
            value: inf,
            floor: 1e-6,
        });
    }
    Ok(inf)
}
