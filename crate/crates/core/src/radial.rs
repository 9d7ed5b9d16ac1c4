//! Radial profiles, the spherical transform pair and the spherical mean.
//!
//! A radial function `f(t)` lives on a composite Gauss grid over `[0, T_max]`
//! and is integrated against the volume density `A(t)`; its transform
//! `f̂(λ) = ∫ f(t) φ_λ(t) A(t) dt` lives on a composite grid over
//! `[0, Λ_max]`, optionally extended by a power/log tail model.

use std::fmt;
use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::jacobi::{plancherel_density, raw_density, spherical_phi, spherical_sweep, SpectralScaling};
use crate::params::{volume_density, DrParams, PlancherelCalibration};
use crate::quadrature::{dyadic_edges, gauss_panel, integrate_edges, PanelGrid};

/// A real function of one variable, shareable across threads.
pub type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Default geodesic cutoff.
pub const DEFAULT_T_MAX: f64 = 12.0;
/// Default spectral cutoff.
pub const DEFAULT_LAMBDA_MAX: f64 = 1e3;
/// Spectral integrals of `|1−φ_λ(t)|²` are resolved numerically up to `λt = K`.
pub const LIP_NUMERIC_CUTOFF: f64 = 16.0;

const ORDER: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothnessHint {
    Smooth,
    CompactlySupported,
    GaussianLike,
}

impl SmoothnessHint {
    pub fn as_str(self) -> &'static str {
        match self {
            SmoothnessHint::Smooth => "smooth",
            SmoothnessHint::CompactlySupported => "compactly_supported",
            SmoothnessHint::GaussianLike => "gaussian_like",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "smooth" => Ok(SmoothnessHint::Smooth),
            "compactly_supported" => Ok(SmoothnessHint::CompactlySupported),
            "gaussian_like" => Ok(SmoothnessHint::GaussianLike),
            _ => Err(Error::Format(format!("unknown smoothness hint `{s}`"))),
        }
    }
}

/// Samples of a radial profile at the nodes of a composite Gauss grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFunction {
    grid: PanelGrid,
    values: Vec<f64>,
    hint: SmoothnessHint,
    energy: f64,
}

/// Uniform quarter-width panels over `[0, t_max]`.
pub fn radial_grid(t_max: f64) -> Result<PanelGrid> {
    PanelGrid::uniform(0.0, t_max, (4.0 * t_max).ceil().max(1.0) as usize, ORDER)
}

/// Dyadic spectral grid over `[0, lambda_max]` (geometrically refined near 0).
pub fn spectral_grid(lambda_max: f64, max_width: f64) -> Result<PanelGrid> {
    PanelGrid::dyadic(0.0, lambda_max, max_width, ORDER)
}

impl RadialFunction {
    pub fn new(
        params: &DrParams,
        grid: PanelGrid,
        values: Vec<f64>,
        hint: SmoothnessHint,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for {} grid nodes",
                values.len(),
                grid.len()
            )));
        }
        if grid.lower() != 0.0 {
            return Err(Error::InvalidGrid("radial grids start at t = 0".into()));
        }
        let weighted: Vec<f64> = grid
            .nodes()
            .iter()
            .zip(&values)
            .map(|(&t, v)| v * v * volume_density(params, t))
            .collect();
        let energy = grid.integrate(&weighted);
        if !energy.is_finite() {
            return Err(Error::InsufficientDecay(
                "radial profile is not square integrable against A(t)".into(),
            ));
        }
        Ok(Self {
            grid,
            values,
            hint,
            energy,
        })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(
        params: &DrParams,
        grid: PanelGrid,
        f: F,
        hint: SmoothnessHint,
    ) -> Result<Self> {
        let values = grid.sample(f);
        Self::new(params, grid, values, hint)
    }

    pub fn grid(&self) -> &PanelGrid {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn nodes(&self) -> &[f64] {
        self.grid.nodes()
    }
    pub fn t_max(&self) -> f64 {
        self.grid.upper()
    }
    pub fn hint(&self) -> SmoothnessHint {
        self.hint
    }
    /// `∫ |f|² A dt`.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Interpolated value; zero beyond `T_max`.
    pub fn value_at(&self, t: f64) -> f64 {
        self.grid.interpolate(&self.values, t).unwrap_or(0.0)
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `c·f`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
            hint: self.hint,
            energy: c * c * self.energy,
        }
    }

    /// `f − g` on a shared grid.
    pub fn difference(&self, params: &DrParams, g: &RadialFunction) -> Result<Self> {
        if self.grid != g.grid {
            return Err(Error::InvalidGrid("difference needs a shared grid".into()));
        }
        let values = self.values.iter().zip(&g.values).map(|(a, b)| a - b).collect();
        Self::new(params, self.grid.clone(), values, self.hint)
    }

    /// Largest absolute pointwise difference on a shared grid.
    pub fn sup_distance(&self, g: &RadialFunction) -> f64 {
        self.values
            .iter()
            .zip(&g.values)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// `|f̂(λ)| ≈ amplitude · λ^{−gamma} (ln λ)^{−log_power}` beyond `Λ_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailModel {
    pub amplitude: f64,
    pub gamma: f64,
    pub log_power: f64,
}

impl TailModel {
    pub fn power(amplitude: f64, gamma: f64) -> Self {
        Self {
            amplitude,
            gamma,
            log_power: 0.0,
        }
    }

    pub fn eval(&self, lam: f64) -> f64 {
        let mut v = self.amplitude * lam.powf(-self.gamma);
        if self.log_power != 0.0 {
            v *= lam.ln().powf(-self.log_power);
        }
        v
    }
}

/// Samples of a spherical transform, with an optional exact closure (used
/// on the grid range instead of interpolation) and an optional tail model
/// beyond it. Without a tail model the function vanishes past `Λ_max`.
#[derive(Clone)]
pub struct SpectralFunction {
    grid: PanelGrid,
    values: Vec<f64>,
    tail: Option<TailModel>,
    exact: Option<Profile>,
    quadrature_error: f64,
}

impl fmt::Debug for SpectralFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralFunction")
            .field("lambda_max", &self.lambda_max())
            .field("nodes", &self.values.len())
            .field("tail", &self.tail)
            .field("exact", &self.exact.is_some())
            .field("quadrature_error", &self.quadrature_error)
            .finish()
    }
}

fn check_tail_fit(grid: &PanelGrid, values: &[f64], tail: &TailModel) -> Result<()> {
    let top = grid.upper();
    if tail.log_power != 0.0 && top <= 10.0 {
        return Err(invalid(
            "tail_model",
            "a log factor needs the grid to extend past λ = 10",
        ));
    }
    let mut worst = 0.0f64;
    for (&lam, &v) in grid.nodes().iter().zip(values) {
        if lam >= 0.1 * top {
            let model = tail.eval(lam);
            worst = worst.max(((v - model) / model).abs());
        }
    }
    if !(worst <= 0.1) {
        return Err(invalid(
            "tail_model",
            format!("last-decade samples deviate from the tail model by {worst:.3e} (limit 0.1)"),
        ));
    }
    Ok(())
}

impl SpectralFunction {
    pub fn from_samples(grid: PanelGrid, values: Vec<f64>, tail: Option<TailModel>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for {} grid nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("non-finite spectral sample".into()));
        }
        if let Some(t) = &tail {
            check_tail_fit(&grid, &values, t)?;
        }
        Ok(Self {
            grid,
            values,
            tail,
            exact: None,
            quadrature_error: 0.0,
        })
    }

    /// Samples `f` on `grid` and keeps `f` for off-grid evaluation.
    pub fn from_fn(grid: PanelGrid, f: Profile, tail: Option<TailModel>) -> Result<Self> {
        let values = grid.sample(|x| f(x));
        let mut s = Self::from_samples(grid, values, tail)?;
        s.exact = Some(f);
        Ok(s)
    }

    pub fn zero(grid: PanelGrid) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![0.0; n],
            tail: None,
            exact: None,
            quadrature_error: 0.0,
        }
    }

    pub fn grid(&self) -> &PanelGrid {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn tail(&self) -> Option<&TailModel> {
        self.tail.as_ref()
    }
    pub fn lambda_max(&self) -> f64 {
        self.grid.upper()
    }
    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }
    /// Truncation indicator of the forward quadrature (0 for prescribed spectra).
    pub fn quadrature_error(&self) -> f64 {
        self.quadrature_error
    }
    /// True when the forward quadrature indicator exceeds `1e-8`.
    pub fn flagged(&self) -> bool {
        self.quadrature_error > 1e-8
    }

    /// `f̂(λ)`: the exact closure or interpolant on the grid, the tail model
    /// beyond it (zero without one).
    pub fn eval(&self, lam: f64) -> f64 {
        let lam = lam.abs();
        if lam <= self.lambda_max() {
            if let Some(f) = &self.exact {
                return f(lam);
            }
            return self.grid.interpolate(&self.values, lam).unwrap_or(0.0);
        }
        self.tail.map_or(0.0, |t| t.eval(lam))
    }

    /// Pointwise product with `m(λ)`; keeps only samples (the tail is dropped).
    pub fn multiplied<F: Fn(f64) -> f64 + Sync>(&self, m: F) -> Self {
        let values = self
            .grid
            .nodes()
            .par_iter()
            .zip(self.values.par_iter())
            .map(|(&l, &v)| v * m(l))
            .collect();
        Self {
            grid: self.grid.clone(),
            values,
            tail: None,
            exact: None,
            quadrature_error: self.quadrature_error,
        }
    }

    /// `c·f̂`, including closure and tail.
    pub fn scaled(&self, c: f64) -> Self {
        let exact = self.exact.clone().map(|f| Arc::new(move |x| c * f(x)) as Profile);
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
            tail: self.tail.map(|t| TailModel {
                amplitude: c * t.amplitude,
                ..t
            }),
            exact,
            quadrature_error: self.quadrature_error,
        }
    }
}

/// `φ_λ(t_i)` for every `λ` (rows) and the ascending `ts` (columns).
fn phi_rows(params: &DrParams, lams: &[f64], ts: &[f64]) -> Result<Vec<Vec<f64>>> {
    lams.par_iter()
        .map(|&lam| spherical_sweep(params, lam, ts))
        .collect()
}

/// `f̂(λ) = ∫ f(t) φ_λ(t) A(t) dt` at the nodes of `lambda_grid`.
pub fn spherical_transform(
    params: &DrParams,
    f: &RadialFunction,
    lambda_grid: &PanelGrid,
) -> Result<SpectralFunction> {
    let ts = f.nodes();
    let last = f.values.iter().rposition(|&v| v != 0.0);
    let Some(last) = last else {
        return Ok(SpectralFunction::zero(lambda_grid.clone()));
    };
    let ts = &ts[..=last];
    let wfa: Vec<f64> = ts
        .iter()
        .zip(f.grid.weights())
        .zip(&f.values)
        .map(|((&t, w), v)| w * v * volume_density(params, t))
        .collect();
    // nodes of the last occupied panel, for the truncation indicator
    let last_panel_start = {
        let p = f.grid.panel_of(ts[last]);
        f.grid.edges()[p]
    };
    let tail_from = ts.partition_point(|&t| t < last_panel_start);
    let rows = phi_rows(params, lambda_grid.nodes(), ts)?;
    let mut values = Vec::with_capacity(rows.len());
    let mut tail_mass = 0.0f64;
    for row in &rows {
        let v: f64 = row.iter().zip(&wfa).map(|(p, w)| p * w).sum();
        let t: f64 = row[tail_from..]
            .iter()
            .zip(&wfa[tail_from..])
            .map(|(p, w)| (p * w).abs())
            .sum();
        tail_mass = tail_mass.max(t);
        values.push(v);
    }
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut out = SpectralFunction::from_samples(lambda_grid.clone(), values, None)?;
    out.quadrature_error = if peak > 0.0 { tail_mass / peak } else { 0.0 };
    Ok(out)
}

/// `f(t) = ∫ g(λ) φ_λ(t) density(λ) dλ` at the nodes of `t_grid`.
///
/// The integral runs over the sampled range of `g`; a tail model must decay
/// faster than `λ^{−d/2}`.
pub fn inverse_transform(
    params: &DrParams,
    g: &SpectralFunction,
    t_grid: &PanelGrid,
) -> Result<RadialFunction> {
    let half_d = 0.5 * params.d() as f64;
    if let Some(tail) = g.tail() {
        if !(tail.gamma > half_d) {
            return Err(Error::InsufficientDecay(format!(
                "inverse transform needs a tail exponent above d/2 = {half_d}, got {}",
                tail.gamma
            )));
        }
    }
    let lams = g.grid.nodes();
    let coef: Vec<f64> = lams
        .iter()
        .zip(g.grid.weights())
        .zip(&g.values)
        .map(|((&l, w), v)| Ok(w * v * plancherel_density(params, l)?))
        .collect::<Result<_>>()?;
    let active: Vec<usize> = (0..lams.len()).filter(|&j| coef[j] != 0.0).collect();
    let active_lams: Vec<f64> = active.iter().map(|&j| lams[j]).collect();
    let ts = t_grid.nodes();
    let rows = phi_rows(params, &active_lams, ts)?;
    let mut values = vec![0.0; ts.len()];
    for (row, &j) in rows.iter().zip(&active) {
        for (v, p) in values.iter_mut().zip(row) {
            *v += coef[j] * p;
        }
    }
    RadialFunction::new(params, t_grid.clone(), values, SmoothnessHint::Smooth)
}

/// `(∫ |f|^p A dt)^{1/p}`.
pub fn lp_norm(params: &DrParams, f: &RadialFunction, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(invalid("p", format!("need p >= 1, got {p}")));
    }
    let integrand: Vec<f64> = f
        .nodes()
        .iter()
        .zip(&f.values)
        .map(|(&t, v)| v.abs().powf(p) * volume_density(params, t))
        .collect();
    Ok(f.grid.integrate(&integrand).powf(1.0 / p))
}

/// `M_t f`, computed on `f`'s grid as the inverse transform of `f̂(λ)φ_λ(t)`.
pub fn spherical_mean(
    params: &DrParams,
    f: &RadialFunction,
    t: f64,
    lambda_grid: &PanelGrid,
) -> Result<RadialFunction> {
    let fhat = spherical_transform(params, f, lambda_grid)?;
    spectral_mean(params, &fhat, t, f.grid())
}

/// `M_t f` from the transform, on `t_grid`.
pub fn spectral_mean(
    params: &DrParams,
    fhat: &SpectralFunction,
    t: f64,
    t_grid: &PanelGrid,
) -> Result<RadialFunction> {
    if !(t >= 0.0) {
        return Err(invalid("t", format!("need t >= 0, got {t}")));
    }
    let mult = fhat.grid.nodes().par_iter().map(|&l| Ok(spherical_phi(params, l, t)?.value));
    let phis: Vec<f64> = mult.collect::<Result<_>>()?;
    let values = fhat.values.iter().zip(&phis).map(|(v, p)| v * p).collect();
    let g = SpectralFunction::from_samples(fhat.grid.clone(), values, None)?;
    inverse_transform(params, &g, t_grid)
}

/// Weight `λ^power`, times the Plancherel density when `plancherel` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralWeight {
    pub power: f64,
    pub plancherel: bool,
}

impl SpectralWeight {
    pub const FLAT: Self = Self {
        power: 0.0,
        plancherel: false,
    };
    pub const PLANCHEREL: Self = Self {
        power: 0.0,
        plancherel: true,
    };

    pub fn power(p: f64) -> Self {
        Self {
            power: p,
            plancherel: false,
        }
    }

    fn eval(&self, params: &DrParams, lam: f64) -> Result<f64> {
        let mut w = if self.power == 0.0 { 1.0 } else { lam.powf(self.power) };
        if self.plancherel {
            w *= plancherel_density(params, lam)?;
        }
        Ok(w)
    }
}

/// `∫_a^b λ^{−p} (ln λ)^{−q} dλ` for `1 ≤ a < b ≤ ∞` (`a > 1` when `q ≠ 0`).
pub fn power_log_integral(p: f64, q: f64, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b >= a) {
        return Err(invalid("range", format!("need 0 < a <= b, got [{a}, {b}]")));
    }
    if q != 0.0 && !(a > 1.0) {
        return Err(invalid("range", format!("a log factor needs a > 1, got {a}")));
    }
    if a == b {
        return Ok(0.0);
    }
    if b.is_finite() {
        // u = ln λ
        let (ua, ub) = (a.ln(), b.ln());
        let width = (1.0 / (1.0 - p).abs().max(1e-300)).min(1.0);
        let n = ((ub - ua) / width).ceil().max(1.0) as usize;
        let edges: Vec<f64> = (0..=n).map(|i| ua + (ub - ua) * i as f64 / n as f64).collect();
        return Ok(integrate_edges(
            |u| ((1.0 - p) * u).exp() * if q == 0.0 { 1.0 } else { u.powf(-q) },
            &edges,
            ORDER,
        ));
    }
    let s = p - 1.0;
    if s.abs() < 1e-12 {
        if q > 1.0 {
            return Ok(a.ln().powf(1.0 - q) / (q - 1.0));
        }
        return Err(Error::DivergentTail(format!(
            "∫ λ^-1 (ln λ)^-q converges only for q > 1, got q = {q}"
        )));
    }
    if s < 0.0 {
        return Err(Error::DivergentTail(format!(
            "∫ λ^-p (ln λ)^-q converges only for p > 1, got p = {p}"
        )));
    }
    if q == 0.0 {
        return Ok(a.powf(-s) / s);
    }
    // v = s ln λ: s^{q−1} ∫_{v0}^∞ e^{−v} v^{−q} dv
    let v0 = s * a.ln();
    let mut edges = vec![v0];
    let mut x = v0;
    while x < 1.0 {
        x = (2.0 * x).min(1.0);
        edges.push(x);
    }
    let top = v0.max(1.0) + 60.0 + q.max(0.0) * 4.0;
    while x < top {
        x += 1.0;
        edges.push(x);
    }
    let v = integrate_edges(|v| (-v).exp() * v.powf(-q), &edges, ORDER);
    Ok(s.powf(q - 1.0) * v)
}

/// `∫_a^b g(λ) dλ` on unit panels in `ln λ`.
fn log_panels<F: Fn(f64) -> f64>(g: F, a: f64, b: f64) -> f64 {
    let (ua, ub) = (a.ln(), b.ln());
    let n = (ub - ua).ceil().max(1.0) as usize;
    (0..n)
        .map(|i| {
            let lo = ua + (ub - ua) * i as f64 / n as f64;
            let hi = ua + (ub - ua) * (i + 1) as f64 / n as f64;
            gauss_panel(
                |u| {
                    let x = u.exp();
                    g(x) * x
                },
                lo,
                hi,
                ORDER,
            )
        })
        .sum()
}

/// `∫_lo^hi |f̂(λ)|² w(λ) dλ`, `hi` possibly infinite. Tail-model regions are
/// integrated in closed form (or through the log substitution).
pub fn spectral_energy(
    params: &DrParams,
    fhat: &SpectralFunction,
    lo: f64,
    hi: f64,
    weight: SpectralWeight,
) -> Result<f64> {
    if !(lo >= 0.0 && hi >= lo) {
        return Err(invalid("range", format!("need 0 <= lo <= hi, got [{lo}, {hi}]")));
    }
    let top = fhat.lambda_max();
    let mut total = 0.0;
    let mid = hi.min(top);
    if lo < mid {
        let mut edges = vec![lo];
        edges.extend(fhat.grid.edges().iter().copied().filter(|&e| e > lo && e < mid));
        edges.push(mid);
        let vals: Vec<(f64, f64)> = edges
            .windows(2)
            .flat_map(|e| {
                let (nodes, weights) = crate::quadrature::reference_rule(ORDER);
                let (h, c) = (0.5 * (e[1] - e[0]), 0.5 * (e[0] + e[1]));
                nodes
                    .iter()
                    .zip(weights)
                    .map(move |(x, w)| (c + h * x, h * w))
                    .collect::<Vec<_>>()
            })
            .collect();
        let parts: Vec<f64> = vals
            .par_iter()
            .map(|&(l, w)| {
                let v = fhat.eval(l);
                if v == 0.0 {
                    Ok(0.0)
                } else {
                    Ok(w * v * v * weight.eval(params, l)?)
                }
            })
            .collect::<Result<_>>()?;
        total += parts.iter().sum::<f64>();
    }
    if hi > top {
        let a = lo.max(top);
        total += beyond_grid(params, fhat, a, hi, weight)?;
    }
    Ok(total)
}

fn beyond_grid(
    params: &DrParams,
    fhat: &SpectralFunction,
    a: f64,
    b: f64,
    weight: SpectralWeight,
) -> Result<f64> {
    let integrand = |l: f64| -> f64 {
        let v = fhat.eval(l);
        v * v * weight.eval(params, l).unwrap_or(f64::NAN)
    };
    match fhat.tail {
        Some(t) => {
            let amp2 = t.amplitude * t.amplitude;
            let p = 2.0 * t.gamma - weight.power;
            let q = 2.0 * t.log_power;
            if !weight.plancherel {
                return Ok(amp2 * power_log_integral(p, q, a, b)?);
            }
            // density ~ c λ^{d−1} far out; integrate numerically until it has settled
            let d1 = params.d() as f64 - 1.0;
            let settle = (1e3 * a).max(1e6);
            if b <= settle {
                return Ok(log_panels(integrand, a, b));
            }
            let near = log_panels(integrand, a, settle);
            let c = plancherel_density(params, settle)? / settle.powf(d1);
            Ok(near + c * amp2 * power_log_integral(p - d1, q, settle, b)?)
        }
        None => Ok(0.0),
    }
}

/// `‖M_t f − f‖` with the interval implied by the modeled tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipDeviation {
    /// Point estimate (`|1−φ|² ≈ 1` on the far tail for `p = 2`).
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    /// Spectral cutoff of the numerically resolved part (`∞` for the direct route).
    pub numeric_cutoff: f64,
}

/// `‖M_t f − f‖_p`. For `p = 2` this is the spectral integral
/// `(∫ |1−φ_λ(t)|² |f̂|² density dλ)^{1/2}`; other `p` use the direct-space
/// route on the grid of `f`, which must then be supplied.
pub fn lip_deviation(
    params: &DrParams,
    fhat: &SpectralFunction,
    t: f64,
    p: f64,
    f: Option<&RadialFunction>,
) -> Result<LipDeviation> {
    if p == 2.0 {
        return lip_deviation_spectral(params, fhat, t, LIP_NUMERIC_CUTOFF);
    }
    let f = f.ok_or_else(|| {
        Error::Unsupported(format!(
            "p = {p} needs the direct-space route; supply the radial function"
        ))
    })?;
    let v = lip_deviation_direct(params, fhat, t, p, f.grid())?;
    Ok(LipDeviation {
        value: v,
        lower: v,
        upper: v,
        numeric_cutoff: f64::INFINITY,
    })
}

/// Direct-space `‖M_t f − f‖_p` with `M_t f − f` rebuilt on `t_grid`.
pub fn lip_deviation_direct(
    params: &DrParams,
    fhat: &SpectralFunction,
    t: f64,
    p: f64,
    t_grid: &PanelGrid,
) -> Result<f64> {
    let phis: Vec<f64> = fhat
        .grid
        .nodes()
        .par_iter()
        .map(|&l| Ok(spherical_phi(params, l, t)?.value))
        .collect::<Result<_>>()?;
    let values = fhat.values.iter().zip(&phis).map(|(v, ph)| v * (ph - 1.0)).collect();
    let g = SpectralFunction::from_samples(fhat.grid.clone(), values, None)?;
    let h = inverse_transform(params, &g, t_grid)?;
    lp_norm(params, &h, p)
}

/// `∫_0^cut |1−φ_λ(t)|² |f̂(λ)|² density dλ`.
pub fn deviation_energy(params: &DrParams, fhat: &SpectralFunction, t: f64, cut: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("need t > 0, got {t}")));
    }
    if !(cut > 0.0) {
        return Ok(0.0);
    }
    let mut edges = dyadic_edges(0.0, cut, 2.0 / t);
    edges.extend(
        fhat.grid
            .edges()
            .iter()
            .copied()
            .filter(|&e| e > 0.0 && e < cut),
    );
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let (nodes, weights) = crate::quadrature::reference_rule(ORDER);
    let pts: Vec<(f64, f64)> = edges
        .windows(2)
        .flat_map(|e| {
            let (h, c) = (0.5 * (e[1] - e[0]), 0.5 * (e[0] + e[1]));
            nodes.iter().zip(weights).map(move |(x, w)| (c + h * x, h * w))
        })
        .collect();
    let parts: Vec<f64> = pts
        .par_iter()
        .map(|&(l, w)| {
            let v = fhat.eval(l);
            if v == 0.0 {
                return Ok(0.0);
            }
            let dev = 1.0 - spherical_phi(params, l, t)?.value;
            Ok(w * dev * dev * v * v * plancherel_density(params, l)?)
        })
        .collect::<Result<_>>()?;
    Ok(parts.iter().sum())
}

/// Spectral `‖M_t f − f‖₂` resolved numerically on `λ ≤ K/t`.
pub fn lip_deviation_spectral(
    params: &DrParams,
    fhat: &SpectralFunction,
    t: f64,
    k: f64,
) -> Result<LipDeviation> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("need t > 0, got {t}")));
    }
    let cut = k / t;
    let numeric = deviation_energy(params, fhat, t, cut)?;
    let tail = spectral_energy(params, fhat, cut, f64::INFINITY, SpectralWeight::PLANCHEREL)?;
    let b = if tail > 0.0 {
        let mut b = 0.0f64;
        for i in 0..=32 {
            let l = cut * 8f64.powf(i as f64 / 32.0);
            b = b.max(spherical_phi(params, l, t)?.value.abs());
        }
        b
    } else {
        0.0
    };
    let low_factor = (1.0 - b).max(0.0).powi(2);
    Ok(LipDeviation {
        value: (numeric + tail).sqrt(),
        lower: (numeric + low_factor * tail).sqrt(),
        upper: (numeric + 4.0 * tail).sqrt(),
        numeric_cutoff: cut,
    })
}

/// A held-out or reference profile of the calibration family.
pub struct TestProfile {
    pub name: &'static str,
    pub f: fn(f64) -> f64,
    pub support: f64,
    pub hint: SmoothnessHint,
}

fn gauss1(t: f64) -> f64 {
    (-t * t).exp()
}
fn gauss2(t: f64) -> f64 {
    (-2.0 * t * t).exp()
}
fn shifted_gauss(t: f64) -> f64 {
    t * t * (-t * t).exp()
}
fn bump(t: f64) -> f64 {
    if t < 2.0 {
        (1.0 - 0.25 * t * t).powi(6)
    } else {
        0.0
    }
}

/// Reference profile used to fix the Plancherel constant.
pub const REFERENCE_PROFILE: TestProfile = TestProfile {
    name: "gauss",
    f: gauss1,
    support: 8.0,
    hint: SmoothnessHint::GaussianLike,
};

/// Profiles not used by the calibration.
pub const HELD_OUT_PROFILES: [TestProfile; 3] = [
    TestProfile {
        name: "gauss_narrow",
        f: gauss2,
        support: 8.0,
        hint: SmoothnessHint::GaussianLike,
    },
    TestProfile {
        name: "t2_gauss",
        f: shifted_gauss,
        support: 8.0,
        hint: SmoothnessHint::GaussianLike,
    },
    TestProfile {
        name: "bump6",
        f: bump,
        support: 2.0,
        hint: SmoothnessHint::CompactlySupported,
    },
];

/// Spectral cutoff adequate for the calibration family.
pub const CALIBRATION_LAMBDA_MAX: f64 = 24.0;

impl TestProfile {
    pub fn radial(&self, params: &DrParams) -> Result<RadialFunction> {
        RadialFunction::from_fn(params, radial_grid(self.support)?, self.f, self.hint)
    }
}

pub fn calibration_lambda_grid() -> Result<PanelGrid> {
    spectral_grid(CALIBRATION_LAMBDA_MAX, 0.5)
}

/// `(∫|f|²A dt, ∫|f̂|² |c(sλ)|⁻² dλ)` per scaling `s`, uncalibrated.
fn parseval_sides(
    params: &DrParams,
    p: &TestProfile,
    lgrid: &PanelGrid,
) -> Result<(f64, [f64; 2])> {
    let f = p.radial(params)?;
    let fhat = spherical_transform(params, &f, lgrid)?;
    let mut sides = [0.0; 2];
    for (i, s) in [SpectralScaling::Doubled, SpectralScaling::Unit].iter().enumerate() {
        let integrand: Vec<f64> = lgrid
            .nodes()
            .iter()
            .zip(fhat.values())
            .map(|(&l, v)| Ok(v * v * raw_density(params.alpha(), params.beta(), *s, l)?))
            .collect::<Result<_>>()?;
        sides[i] = lgrid.integrate(&integrand);
    }
    Ok((f.energy(), sides))
}

/// Fixes the Plancherel constant on the reference profile for each spectral
/// scaling, and keeps the scaling whose constant closes Parseval best on the
/// held-out profiles.
pub fn calibrate_plancherel(params: &DrParams) -> Result<PlancherelCalibration> {
    let lgrid = calibration_lambda_grid()?;
    let (ref_norm, ref_sides) = parseval_sides(params, &REFERENCE_PROFILE, &lgrid)?;
    let held: Vec<(f64, [f64; 2])> = HELD_OUT_PROFILES
        .iter()
        .map(|p| parseval_sides(params, p, &lgrid))
        .collect::<Result<_>>()?;
    let mut tried = Vec::new();
    for (i, s) in [SpectralScaling::Doubled, SpectralScaling::Unit].iter().enumerate() {
        let c = ref_norm / ref_sides[i];
        let err = held
            .iter()
            .map(|(n, sides)| ((c * sides[i] - n) / n).abs())
            .fold(0.0f64, f64::max);
        tried.push((*s, c, err));
    }
    let best = tried
        .iter()
        .min_by(|a, b| a.2.total_cmp(&b.2))
        .copied()
        .unwrap();
    Ok(PlancherelCalibration {
        constant: best.1,
        scaling: best.0,
        held_out_error: best.2,
        tried,
    })
}

/// Relative Parseval defect `|∫|f̂|² density − ∫|f|²A| / ∫|f|²A` with the
/// calibrated density.
pub fn parseval_defect(params: &DrParams, f: &RadialFunction, lambda_grid: &PanelGrid) -> Result<f64> {
    let fhat = spherical_transform(params, f, lambda_grid)?;
    let spec = spectral_energy(params, &fhat, 0.0, lambda_grid.upper(), SpectralWeight::PLANCHEREL)?;
    Ok(((spec - f.energy()) / f.energy()).abs())
}

fn write_edges(s: &mut String, grid: &PanelGrid) {
    let edges: Vec<String> = grid.edges().iter().map(|e| format!("{e:e}")).collect();
    let _ = write!(s, " order={} edges={}", grid.order(), edges.join(","));
}

/// Two-column text export; the header carries the space and the grid so the
/// import reproduces the samples bit for bit.
pub fn export_radial(params: &DrParams, f: &RadialFunction) -> String {
    let mut s = format!(
        "# drharmonic radial m={} k={} hint={}",
        params.m(),
        params.k(),
        f.hint.as_str()
    );
    write_edges(&mut s, &f.grid);
    s.push('\n');
    for (t, v) in f.nodes().iter().zip(&f.values) {
        let _ = writeln!(s, "{t:e} {v:e}");
    }
    s
}

pub fn export_spectral(params: &DrParams, g: &SpectralFunction) -> String {
    let mut s = format!("# drharmonic spectral m={} k={}", params.m(), params.k());
    match g.tail {
        Some(t) => {
            let _ = write!(s, " tail={:e},{:e},{:e}", t.amplitude, t.gamma, t.log_power);
        }
        None => s.push_str(" tail=none"),
    }
    write_edges(&mut s, &g.grid);
    s.push('\n');
    for (l, v) in g.grid.nodes().iter().zip(&g.values) {
        let _ = writeln!(s, "{l:e} {v:e}");
    }
    s
}

struct Parsed {
    kind: String,
    keys: Vec<(String, String)>,
    grid: PanelGrid,
    values: Vec<f64>,
}

fn parse_num(s: &str, line: usize) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::Format(format!("line {line}: bad number `{s}`")))
}

fn parse_profile(params: &DrParams, text: &str) -> Result<Parsed> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty profile".into()))?;
    let mut words = header.split_whitespace();
    if words.next() != Some("#") || words.next() != Some("drharmonic") {
        return Err(Error::Format("line 1: missing `# drharmonic` header".into()));
    }
    let kind = words
        .next()
        .ok_or_else(|| Error::Format("line 1: missing profile kind".into()))?
        .to_string();
    let keys: Vec<(String, String)> = words
        .map(|w| {
            w.split_once('=')
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .ok_or_else(|| Error::Format(format!("line 1: expected key=value, got `{w}`")))
        })
        .collect::<Result<_>>()?;
    let get = |k: &str| {
        keys.iter()
            .find(|(a, _)| a == k)
            .map(|(_, b)| b.as_str())
            .ok_or_else(|| Error::Format(format!("line 1: missing `{k}`")))
    };
    let (m, k): (u32, u32) = (
        get("m")?.parse().map_err(|_| Error::Format("line 1: bad m".into()))?,
        get("k")?.parse().map_err(|_| Error::Format("line 1: bad k".into()))?,
    );
    if (m, k) != (params.m(), params.k()) {
        return Err(Error::Format(format!(
            "profile was written for (m, k) = ({m}, {k}), not ({}, {})",
            params.m(),
            params.k()
        )));
    }
    let order: usize = get("order")?
        .parse()
        .map_err(|_| Error::Format("line 1: bad order".into()))?;
    let edges = get("edges")?
        .split(',')
        .map(|e| parse_num(e, 1))
        .collect::<Result<Vec<f64>>>()?;
    let grid = PanelGrid::from_edges(edges, order)?;
    let mut values = Vec::with_capacity(grid.len());
    for (i, line) in lines.enumerate() {
        let n = i + 2;
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split_whitespace();
        let (Some(x), Some(v), None) = (cols.next(), cols.next(), cols.next()) else {
            return Err(Error::Format(format!("line {n}: expected two columns")));
        };
        let (x, v) = (parse_num(x, n)?, parse_num(v, n)?);
        match grid.nodes().get(values.len()) {
            Some(&node) if node == x => values.push(v),
            _ => {
                return Err(Error::Format(format!(
                    "line {n}: grid point {x:e} does not match the header grid"
                )))
            }
        }
    }
    if values.len() != grid.len() {
        return Err(Error::Format(format!(
            "expected {} samples, found {}",
            grid.len(),
            values.len()
        )));
    }
    Ok(Parsed {
        kind,
        keys,
        grid,
        values,
    })
}

pub fn import_radial(params: &DrParams, text: &str) -> Result<RadialFunction> {
    let p = parse_profile(params, text)?;
    if p.kind != "radial" {
        return Err(Error::Format(format!("expected a radial profile, got `{}`", p.kind)));
    }
    let hint = p
        .keys
        .iter()
        .find(|(k, _)| k == "hint")
        .map(|(_, v)| SmoothnessHint::parse(v))
        .transpose()?
        .unwrap_or(SmoothnessHint::Smooth);
    RadialFunction::new(params, p.grid, p.values, hint)
}

pub fn import_spectral(params: &DrParams, text: &str) -> Result<SpectralFunction> {
    let p = parse_profile(params, text)?;
    if p.kind != "spectral" {
        return Err(Error::Format(format!("expected a spectral profile, got `{}`", p.kind)));
    }
    let tail = match p.keys.iter().find(|(k, _)| k == "tail").map(|(_, v)| v.as_str()) {
        None | Some("none") => None,
        Some(v) => {
            let parts = v
                .split(',')
                .map(|x| parse_num(x, 1))
                .collect::<Result<Vec<f64>>>()?;
            let [amplitude, gamma, log_power] = parts[..] else {
                return Err(Error::Format("line 1: tail needs three numbers".into()));
            };
            Some(TailModel {
                amplitude,
                gamma,
                log_power,
            })
        }
    };
    SpectralFunction::from_samples(p.grid, p.values, tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::derive_params;

    #[test]
    fn calibration_closes_parseval_on_held_out_profiles() {
        for (m, k) in [(2, 1), (4, 3)] {
            let p = derive_params(m, k).unwrap();
            let cal = p.plancherel();
            eprintln!("({m},{k}) {cal:?} 2pi*C = {}", cal.constant * 2.0 * std::f64::consts::PI);
            assert_eq!(cal.scaling, SpectralScaling::Doubled);
            assert!(cal.held_out_error < 1e-3, "{cal:?}");
        }
    }

    fn gaussian(p: &DrParams) -> RadialFunction {
        REFERENCE_PROFILE.radial(p).unwrap()
    }

    #[test]
    fn transform_is_linear() {
        let p = derive_params(2, 1).unwrap();
        let grid = radial_grid(6.0).unwrap();
        let lg = spectral_grid(16.0, 1.0).unwrap();
        let f = RadialFunction::from_fn(&p, grid.clone(), |t| (-t * t).exp(), SmoothnessHint::GaussianLike).unwrap();
        let g = RadialFunction::from_fn(&p, grid.clone(), |t| (-(t - 1.0).powi(2)).exp(), SmoothnessHint::Smooth).unwrap();
        let h = RadialFunction::from_fn(
            &p,
            grid,
            |t| 2.0 * (-t * t).exp() - 3.0 * (-(t - 1.0).powi(2)).exp(),
            SmoothnessHint::Smooth,
        )
        .unwrap();
        let (fh, gh, hh) = (
            spherical_transform(&p, &f, &lg).unwrap(),
            spherical_transform(&p, &g, &lg).unwrap(),
            spherical_transform(&p, &h, &lg).unwrap(),
        );
        for i in 0..lg.len() {
            let want = 2.0 * fh.values()[i] - 3.0 * gh.values()[i];
            assert!((hh.values()[i] - want).abs() < 1e-12 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn round_trip_on_compact_bump() {
        let p = derive_params(2, 1).unwrap();
        let f = HELD_OUT_PROFILES[2].radial(&p).unwrap();
        let fh = spherical_transform(&p, &f, &calibration_lambda_grid().unwrap()).unwrap();
        let back = inverse_transform(&p, &fh, f.grid()).unwrap();
        assert!(back.sup_distance(&f) < 1e-3 * f.peak(), "{}", back.sup_distance(&f));
        assert!(((back.energy() - f.energy()) / f.energy()).abs() < 1e-3);
    }

    #[test]
    fn spherical_mean_at_zero_is_identity() {
        let p = derive_params(2, 1).unwrap();
        let f = gaussian(&p);
        let m0 = spherical_mean(&p, &f, 0.0, &calibration_lambda_grid().unwrap()).unwrap();
        assert!(m0.sup_distance(&f) < 1e-6 * f.peak());
    }

    #[test]
    fn spherical_mean_contracts_and_converges() {
        let p = derive_params(2, 1).unwrap();
        let f = gaussian(&p);
        let lg = calibration_lambda_grid().unwrap();
        let fh = spherical_transform(&p, &f, &lg).unwrap();
        let norm = lp_norm(&p, &f, 2.0).unwrap();
        let mut prev = f64::INFINITY;
        for t in [0.2, 0.1, 0.05, 0.025] {
            let mt = spectral_mean(&p, &fh, t, f.grid()).unwrap();
            assert!(lp_norm(&p, &mt, 2.0).unwrap() <= norm + 1e-6);
            let dev = lp_norm(&p, &mt.difference(&p, &f).unwrap(), 2.0).unwrap();
            assert!(dev <= prev + 1e-6, "t={t}: {dev} > {prev}");
            prev = dev;
        }
    }

    #[test]
    fn multiplier_identity() {
        let p = derive_params(2, 1).unwrap();
        let f = gaussian(&p);
        let lg = calibration_lambda_grid().unwrap();
        let fh = spherical_transform(&p, &f, &lg).unwrap();
        let t = 0.3;
        let mt = spectral_mean(&p, &fh, t, f.grid()).unwrap();
        let mth = spherical_transform(&p, &mt, &lg).unwrap();
        for (i, &l) in lg.nodes().iter().enumerate() {
            let want = spherical_phi(&p, l, t).unwrap().value * fh.values()[i];
            assert!((mth.values()[i] - want).abs() < 1e-6, "λ={l}");
        }
    }

    #[test]
    fn spectral_and_direct_lip_deviation_agree() {
        let p = derive_params(2, 1).unwrap();
        let f = HELD_OUT_PROFILES[0].radial(&p).unwrap();
        let fh = spherical_transform(&p, &f, &calibration_lambda_grid().unwrap()).unwrap();
        let spectral = lip_deviation(&p, &fh, 0.1, 2.0, None).unwrap();
        let direct = lip_deviation_direct(&p, &fh, 0.1, 2.0, f.grid()).unwrap();
        assert!(((spectral.value - direct) / direct).abs() < 1e-3, "{spectral:?} vs {direct}");
        assert!(spectral.lower <= spectral.value && spectral.value <= spectral.upper);
        // p ≠ 2 needs the radial function
        assert!(lip_deviation(&p, &fh, 0.1, 1.5, None).is_err());
        let v = lip_deviation(&p, &fh, 0.1, 1.5, Some(&f)).unwrap();
        assert!(v.value > 0.0 && v.value.is_finite());
    }

    #[test]
    fn band_limited_deviation_obeys_quadratic_bound() {
        let p = derive_params(2, 1).unwrap();
        let l0 = 3.0;
        let fh = SpectralFunction::from_fn(
            spectral_grid(l0, 0.5).unwrap(),
            Arc::new(|l: f64| (1.0 - l / 3.0).powi(2) * (1.0 + l)),
            None,
        )
        .unwrap();
        let norm = spectral_energy(&p, &fh, 0.0, f64::INFINITY, SpectralWeight::PLANCHEREL)
            .unwrap()
            .sqrt();
        let q = p.q();
        for t in [0.01, 0.1, 0.5] {
            let dev = lip_deviation(&p, &fh, t, 2.0, None).unwrap();
            let bound = 0.5 * t * t * (4.0 * l0 * l0 + 0.25 * q * q) * norm;
            assert!(dev.upper <= bound, "t={t}: {dev:?} > {bound}");
        }
        assert!(lip_deviation(&p, &fh, 1e-9, 2.0, None).unwrap().value < 1e-12);
    }

    #[test]
    fn power_log_closed_forms() {
        let v = power_log_integral(3.0, 0.0, 2.0, f64::INFINITY).unwrap();
        assert!((v - 0.125).abs() < 1e-15);
        // ∫_e^∞ λ^-1 (ln λ)^-2 = 1
        let v = power_log_integral(1.0, 2.0, std::f64::consts::E, f64::INFINITY).unwrap();
        assert!((v - 1.0).abs() < 1e-13);
        // finite range agrees with the difference of tails
        let a = power_log_integral(2.5, 1.0, 3.0, f64::INFINITY).unwrap();
        let b = power_log_integral(2.5, 1.0, 50.0, f64::INFINITY).unwrap();
        let mid = power_log_integral(2.5, 1.0, 3.0, 50.0).unwrap();
        assert!(((a - b) - mid).abs() < 1e-12 * a);
        assert!(matches!(
            power_log_integral(0.5, 0.0, 2.0, f64::INFINITY),
            Err(Error::DivergentTail(_))
        ));
    }

    #[test]
    fn zero_profile_transforms_to_zero() {
        let p = derive_params(2, 1).unwrap();
        let f = RadialFunction::from_fn(&p, radial_grid(4.0).unwrap(), |_| 0.0, SmoothnessHint::Smooth)
            .unwrap();
        let g = spherical_transform(&p, &f, &spectral_grid(8.0, 1.0).unwrap()).unwrap();
        assert!(g.values().iter().all(|&v| v == 0.0));
        assert_eq!(lp_norm(&p, &f, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn export_import_round_trip_is_exact() {
        let p = derive_params(2, 1).unwrap();
        let f = REFERENCE_PROFILE.radial(&p).unwrap();
        let back = import_radial(&p, &export_radial(&p, &f)).unwrap();
        assert_eq!(back, f);
        let g = SpectralFunction::from_fn(
            spectral_grid(64.0, 4.0).unwrap(),
            Arc::new(|l: f64| 1.0 / (1.0 + l).powi(4)),
            None,
        )
        .unwrap();
        let text = export_spectral(&p, &g);
        let back = import_spectral(&p, &text).unwrap();
        assert_eq!(back.values(), g.values());
        assert_eq!(export_spectral(&p, &back), text);
    }

    #[test]
    fn import_rejects_mismatched_space() {
        let p = derive_params(2, 1).unwrap();
        let q = derive_params(4, 3).unwrap();
        let f = REFERENCE_PROFILE.radial(&p).unwrap();
        assert!(matches!(import_radial(&q, &export_radial(&p, &f)), Err(Error::Format(_))));
    }

    #[test]
    fn tail_model_must_fit_last_decade() {
        let grid = spectral_grid(100.0, 4.0).unwrap();
        let f: Profile = Arc::new(|l: f64| l.powf(-3.0));
        assert!(SpectralFunction::from_fn(grid.clone(), f.clone(), Some(TailModel::power(1.0, 3.0))).is_ok());
        assert!(SpectralFunction::from_fn(grid, f, Some(TailModel::power(2.0, 3.0))).is_err());
    }

    #[test]
    fn inverse_rejects_slow_tails() {
        let p = derive_params(2, 1).unwrap();
        let grid = spectral_grid(100.0, 4.0).unwrap();
        let g = SpectralFunction::from_fn(
            grid,
            Arc::new(|l: f64| if l > 1.0 { l.powf(-1.5) } else { 0.0 }),
            Some(TailModel::power(1.0, 1.5)),
        )
        .unwrap();
        let err = inverse_transform(&p, &g, &radial_grid(2.0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::InsufficientDecay(ref s) if s.contains("d/2 = 2")), "{err}");
    }
}
