//! Numerical audits of the Titchmarsh-type theorems: both sides of each
//! inequality over a `t` grid, plus the constants they imply.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::jacobi::{density_comparison, lower_bound_constant, plancherel_density, spherical_sweep};
use crate::moduli::{
    audit_grid, dyadic_sum_bound, mo_lower_index, monotonicity_audit,
    tail_lower_bound, tail_t5_integral, zygmund_z0, zygmund_zk, Modulus,
};
use crate::params::DrParams;
use crate::quadrature::{gauss_panel, PanelGrid};
use crate::radial::{
    deviation_energy, lip_deviation_spectral, spectral_energy, SpectralFunction, SpectralWeight,
    TailModel, LIP_NUMERIC_CUTOFF,
};
use crate::report::{CheckReport, Hypothesis, Verdict};

pub const SMALL_T_MIN: f64 = 1e-3;
pub const SMALL_T_MAX: f64 = 1e-1;
pub const DEFAULT_T_POINTS: usize = 32;
/// Two consecutive relative increments below this declare a truncation stable.
pub const STABILITY_TOL: f64 = 1e-3;
pub const FUBINI_TOL: f64 = 1e-6;
/// Relative slack allowed on inequalities between computed quantities.
pub const INEQUALITY_SLACK: f64 = 1e-9;
/// Largest growth of a premise sup, from the grid to the grid one decade down,
/// still read as a finite constant.
pub const PREMISE_GROWTH: f64 = 2.0;

/// Decision tolerances of the checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub stability: f64,
    pub fubini: f64,
    pub relative_slack: f64,
    pub shell_slack: f64,
    pub premise_growth: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            stability: STABILITY_TOL,
            fubini: FUBINI_TOL,
            relative_slack: INEQUALITY_SLACK,
            shell_slack: 1e-12,
            premise_growth: PREMISE_GROWTH,
        }
    }
}

impl Tolerances {
    /// Every tolerance multiplied by `x` (the premise growth through its excess over 1).
    pub fn scaled(&self, x: f64) -> Self {
        Self {
            stability: self.stability * x,
            fubini: self.fubini * x,
            relative_slack: self.relative_slack * x,
            shell_slack: self.shell_slack * x,
            premise_growth: 1.0 + (self.premise_growth - 1.0) * x,
        }
    }
}

const ORDER: usize = 20;

/// `n` log-spaced points on `[lo, hi]`.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

/// The "small t" grid: 32 log-spaced points on `[1e-3, 1e-1]`.
pub fn default_t_grid() -> Vec<f64> {
    log_spaced(SMALL_T_MIN, SMALL_T_MAX, DEFAULT_T_POINTS)
}

fn validate_t_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::InvalidGrid("empty t grid".into()));
    }
    if let Some(t) = t_grid.iter().find(|&&t| !(t > 0.0 && t < 1.0)) {
        return Err(Error::InvalidGrid(format!("t grid must lie in (0, 1), found {t}")));
    }
    Ok(())
}

/// True when the last two relative increments of a nondecreasing sequence
/// are below [`STABILITY_TOL`].
pub fn stabilizes(seq: &[f64]) -> bool {
    stabilizes_within(seq, STABILITY_TOL)
}

pub fn stabilizes_within(seq: &[f64], tol: f64) -> bool {
    let n = seq.len();
    if n < 3 || !seq.iter().all(|v| v.is_finite()) {
        return false;
    }
    let inc = |i: usize| {
        if seq[i] == 0.0 {
            0.0
        } else {
            ((seq[i] - seq[i - 1]) / seq[i]).abs()
        }
    };
    inc(n - 1) < tol && inc(n - 2) < tol
}

// ---------------------------------------------------------------------------
// profiles

/// `C∞` step from 0 on `λ ≤ 1` to 1 on `λ ≥ 2`.
pub fn smooth_onset(lam: f64) -> f64 {
    if lam <= 1.0 {
        return 0.0;
    }
    if lam >= 2.0 {
        return 1.0;
    }
    let x = lam - 1.0;
    let a = (-1.0 / x).exp();
    let b = (-1.0 / (1.0 - x)).exp();
    a / (a + b)
}

/// Spectral grid for the synthetic profiles: eighth panels on `[0, 2]`, then
/// octaves up to `lambda_max`.
pub fn profile_grid(lambda_max: f64) -> Result<PanelGrid> {
    if !(lambda_max > 2.0) {
        return Err(invalid("lambda_max", "must exceed 2"));
    }
    let mut edges: Vec<f64> = (0..=16).map(|i| i as f64 / 8.0).collect();
    let mut x = 2.0;
    while 2.0 * x < lambda_max {
        x *= 2.0;
        edges.push(x);
    }
    edges.push(lambda_max);
    PanelGrid::from_edges(edges, ORDER)
}

const PROFILE_LAMBDA_MAX: f64 = 1024.0;

/// `f̂(λ) = χ(λ) λ^{−(α+d/2)} (ln λ)^γ` with `χ` = [`smooth_onset`]; the flat
/// tail integral then behaves like `t^{2α+d−1} (ln 1/t)^{2γ}`.
pub fn recipe_profile(params: &DrParams, alpha: f64, gamma: f64) -> Result<SpectralFunction> {
    if !(alpha > 0.0 && alpha.is_finite() && gamma.is_finite()) {
        return Err(invalid("alpha", format!("need a finite alpha > 0, got {alpha}")));
    }
    let p = alpha + 0.5 * params.d() as f64;
    let f = move |l: f64| {
        let c = smooth_onset(l);
        if c == 0.0 {
            0.0
        } else {
            c * l.powf(-p) * l.ln().powf(gamma)
        }
    };
    SpectralFunction::from_fn(
        profile_grid(PROFILE_LAMBDA_MAX)?,
        Arc::new(f),
        Some(TailModel {
            amplitude: 1.0,
            gamma: p,
            log_power: -gamma,
        }),
    )
}

/// `f̂(λ) = λ^{−(α+d/2)}` for `λ ≥ onset`, zero below.
pub fn power_profile(params: &DrParams, alpha: f64, onset: f64) -> Result<SpectralFunction> {
    if !(onset >= 1.0 && onset < PROFILE_LAMBDA_MAX) {
        return Err(invalid("onset", format!("need 1 <= onset < {PROFILE_LAMBDA_MAX}")));
    }
    let p = alpha + 0.5 * params.d() as f64;
    let grid = profile_grid(PROFILE_LAMBDA_MAX)?;
    let mut edges = grid.edges().to_vec();
    if !edges.contains(&onset) {
        edges.push(onset);
        edges.sort_by(f64::total_cmp);
    }
    SpectralFunction::from_fn(
        PanelGrid::from_edges(edges, ORDER)?,
        Arc::new(move |l: f64| if l >= onset { l.powf(-p) } else { 0.0 }),
        Some(TailModel::power(1.0, p)),
    )
}

/// `f̂(λ) = (1 − (λ/λ₀)²)⁴` on `[0, λ₀]`, zero beyond.
pub fn band_limited_profile(lambda0: f64) -> Result<SpectralFunction> {
    if !(lambda0 > 0.0 && lambda0.is_finite()) {
        return Err(invalid("lambda0", "must be positive"));
    }
    let grid = PanelGrid::uniform(0.0, lambda0, 8, ORDER)?;
    SpectralFunction::from_fn(
        grid,
        Arc::new(move |l: f64| {
            if l >= lambda0 {
                0.0
            } else {
                (1.0 - (l / lambda0).powi(2)).powi(4)
            }
        }),
        None,
    )
}

/// `∫_a^b g(λ, f̂(λ)) dλ` for finite `b`: grid panels below `Λ_max`, unit
/// `ln λ` panels beyond.
fn integrate_spectral<G>(fhat: &SpectralFunction, a: f64, b: f64, g: G) -> f64
where
    G: Fn(f64, f64) -> f64 + Sync,
{
    if !(b > a) {
        return 0.0;
    }
    let top = fhat.lambda_max();
    let mut panels: Vec<(f64, f64, bool)> = Vec::new();
    let mid = b.min(top);
    if a < mid {
        let mut edges = vec![a];
        edges.extend(fhat.grid().edges().iter().copied().filter(|&e| e > a && e < mid));
        edges.push(mid);
        panels.extend(edges.windows(2).map(|e| (e[0], e[1], false)));
    }
    if b > top {
        let lo = a.max(top);
        let (ua, ub) = (lo.ln(), b.ln());
        let n = (ub - ua).ceil().max(1.0) as usize;
        panels.extend((0..n).map(|i| {
            (
                ua + (ub - ua) * i as f64 / n as f64,
                ua + (ub - ua) * (i + 1) as f64 / n as f64,
                true,
            )
        }));
    }
    panels
        .par_iter()
        .map(|&(lo, hi, log)| {
            if log {
                gauss_panel(
                    |u| {
                        let l = u.exp();
                        g(l, fhat.eval(l)) * l
                    },
                    lo,
                    hi,
                    ORDER,
                )
            } else {
                gauss_panel(|l| g(l, fhat.eval(l)), lo, hi, ORDER)
            }
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum()
}

fn density(params: &DrParams, l: f64) -> f64 {
    plancherel_density(params, l).unwrap_or(f64::NAN)
}

// ---------------------------------------------------------------------------
// constants shared by the theorem chains

/// Empirical constants of the spherical-function and density audits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainConstants {
    /// `inf |1 − φ_λ(t)|` over `λt ≥ 1`.
    pub c1: f64,
    /// `sup (λt)⁴ / |1 − φ_λ(t)|²` over `λ ≥ 1`, `λt < 1`, `t ≤ 1`.
    pub c_quad: f64,
    pub density_lower: f64,
    pub density_upper: f64,
}

impl ChainConstants {
    /// `min{1, (λt)⁴} ≤ c_k |1 − φ_λ(t)|²`.
    pub fn c_k(&self) -> f64 {
        self.c_quad.max(1.0 / (self.c1 * self.c1))
    }
}

fn quadratic_constant(params: &DrParams) -> Result<f64> {
    let lams = log_spaced(1.0, 1e3, 48);
    let sups = lams
        .par_iter()
        .map(|&lam| {
            let ts: Vec<f64> = log_spaced(1e-3, 0.999, 48)
                .into_iter()
                .map(|p| p / lam)
                .collect();
            let vals = spherical_sweep(params, lam, &ts)?;
            Ok(ts
                .iter()
                .zip(vals)
                .map(|(t, v)| (lam * t).powi(4) / (1.0 - v).powi(2))
                .fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(sups.into_iter().fold(0.0, f64::max))
}

/// Memoized per space.
pub fn chain_constants(params: &DrParams) -> Result<ChainConstants> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), ChainConstants>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (params.m(), params.k());
    if let Some(c) = cache.lock().unwrap().get(&key) {
        return Ok(*c);
    }
    let dc = density_comparison(params)?;
    let c = ChainConstants {
        c1: lower_bound_constant(params, 1e3, 10.0)?,
        c_quad: quadratic_constant(params)?,
        density_lower: dc.lower,
        density_upper: dc.upper,
    };
    cache.lock().unwrap().insert(key, c);
    Ok(c)
}

// ---------------------------------------------------------------------------
// tail energies

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailWeight {
    Flat,
    PowerDMinus1,
    Plancherel,
}

impl TailWeight {
    fn spectral(self, params: &DrParams) -> SpectralWeight {
        match self {
            TailWeight::Flat => SpectralWeight::FLAT,
            TailWeight::PowerDMinus1 => SpectralWeight::power(params.d() as f64 - 1.0),
            TailWeight::Plancherel => SpectralWeight::PLANCHEREL,
        }
    }
}

/// `∫_s^∞ |f̂(λ)|² w(λ) dλ`.
pub fn tail_energy(
    params: &DrParams,
    fhat: &SpectralFunction,
    s: f64,
    weight: TailWeight,
) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(invalid("s", format!("need s > 0, got {s}")));
    }
    spectral_energy(params, fhat, s, f64::INFINITY, weight.spectral(params))
}

fn lip_value(params: &DrParams, fhat: &SpectralFunction, t: f64) -> Result<f64> {
    Ok(lip_deviation_spectral(params, fhat, t, LIP_NUMERIC_CUTOFF)?.value)
}

// ---------------------------------------------------------------------------
// forward direction

/// `∫_{1/t}^∞ |f̂|² ≤ κ L² t^{d−1} ω(t)²` with `L = sup ‖M_t f − f‖/ω(t)` and
/// `κ = 1/(C₁² D_low)`.
pub fn forward_titchmarsh(
    params: &DrParams,
    fhat: &SpectralFunction,
    w: &Modulus,
    t_grid: &[f64],
) -> Result<CheckReport> {
    forward_titchmarsh_with(params, fhat, w, t_grid, &Tolerances::default())
}

pub fn forward_titchmarsh_with(
    params: &DrParams,
    fhat: &SpectralFunction,
    w: &Modulus,
    t_grid: &[f64],
    tol: &Tolerances,
) -> Result<CheckReport> {
    validate_t_grid(t_grid)?;
    let cc = chain_constants(params)?;
    let d1 = params.d() as f64 - 1.0;
    let rows = t_grid
        .par_iter()
        .map(|&t| {
            let lhs = tail_energy(params, fhat, 1.0 / t, TailWeight::Flat)?;
            let wt = w.eval(t);
            Ok((t, lhs, t.powf(d1) * wt * wt, lip_value(params, fhat, t)? / wt))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut r = CheckReport::new("thm-forward", params);
    let mut lip = 0.0f64;
    for &(t, lhs, rhs, l) in &rows {
        r.push_row(t, lhs, rhs);
        lip = lip.max(l);
    }
    let kappa = 1.0 / (cc.c1 * cc.c1 * cc.density_lower);
    r.hypotheses.push(Hypothesis::new("lower_bound_constant", cc.c1 > 0.0, cc.c1));
    r.hypotheses.push(Hypothesis::new(
        "density_lower",
        cc.density_lower > 0.0,
        cc.density_lower,
    ));
    r.hypotheses.push(Hypothesis::new("lip_constant_finite", lip.is_finite(), lip));
    r.summary.insert("lip_constant".into(), lip);
    r.summary.insert("kappa".into(), kappa);
    r.summary.insert("bound".into(), kappa * lip * lip);
    r.tolerances.insert("relative_slack".into(), tol.relative_slack);
    r.finish(|r| {
        if r.ratio_sup <= kappa * lip * lip * (1.0 + tol.relative_slack) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    });
    Ok(r)
}

// ---------------------------------------------------------------------------
// dyadic shells

/// Full weighted tail against `S·C_μ²ω(t)²/(1 − 2^{−2μ})`, where `S` is the sup of
/// `shell/ω²` over the shells at `t/2^i` and `μ = 0.9·m(ω)`.
pub fn dyadic_shell_equiv(
    params: &DrParams,
    fhat: &SpectralFunction,
    w: &Modulus,
    t_grid: &[f64],
) -> Result<CheckReport> {
    dyadic_shell_equiv_with(params, fhat, w, t_grid, &Tolerances::default())
}

pub fn dyadic_shell_equiv_with(
    params: &DrParams,
    fhat: &SpectralFunction,
    w: &Modulus,
    t_grid: &[f64],
    tol: &Tolerances,
) -> Result<CheckReport> {
    validate_t_grid(t_grid)?;
    let z0 = zygmund_z0(w)?;
    let idx = mo_lower_index(w)
        .map_err(|e| Error::InvalidModulus(format!("cannot select μ: {e}")))?;
    let mu = 0.9 * (idx.value - idx.error);
    if !(mu > 0.0) {
        return Err(Error::InvalidModulus(format!(
            "cannot select μ: lower index {:.4} ± {:.1e} is not positive",
            idx.value, idx.error
        )));
    }
    let weight = TailWeight::PowerDMinus1.spectral(params);
    let rows = t_grid
        .par_iter()
        .map(|&t| {
            let tail = tail_energy(params, fhat, 1.0 / t, TailWeight::PowerDMinus1)?;
            let mut acc = 0.0;
            let mut sup = 0.0f64;
            let mut first = 0.0;
            for i in 0..400 {
                let lo = 2f64.powi(i) / t;
                let shell = spectral_energy(params, fhat, lo, 2.0 * lo, weight)?;
                if i == 0 {
                    first = shell;
                }
                acc += shell;
                let wi = w.eval(t * 2f64.powi(-i));
                if shell > 0.0 {
                    sup = sup.max(shell / (wi * wi));
                }
                if acc >= (1.0 - 1e-12) * tail {
                    break;
                }
            }
            let ds = dyadic_sum_bound(w, t, mu)?;
            let wt = w.eval(t);
            Ok((t, tail, first, sup, ds.bound, ds.bound / (wt * wt)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut r = CheckReport::new("lem-dyadic", params);
    let (mut slack, mut s_all, mut empirical, mut proof) = (f64::INFINITY, 0.0f64, 0.0f64, 0.0f64);
    for &(t, tail, first, sup, bound, g) in &rows {
        s_all = s_all.max(sup);
        r.push_row(t, tail, sup * bound);
        if tail > 0.0 {
            slack = slack.min((tail - first) / tail);
            let wt = w.eval(t);
            empirical = empirical.max(tail / (sup * wt * wt));
        } else {
            slack = slack.min(0.0);
        }
        proof = proof.max(g);
    }
    r.hypotheses.push(Hypothesis::new("zygmund_z0", z0.member, z0.constant));
    r.hypotheses.push(Hypothesis::new("mo_index_positive", idx.value > 0.0, idx.value));
    r.hypotheses.push(Hypothesis::new("shell_le_tail", slack >= -tol.shell_slack, slack));
    r.summary.insert("mu".into(), mu);
    r.summary.insert("shell_sup".into(), s_all);
    r.summary.insert("empirical_constant".into(), empirical);
    r.summary.insert("proof_constant".into(), proof);
    r.tolerances.insert("shell_slack".into(), tol.shell_slack);
    r.tolerances.insert("relative_slack".into(), tol.relative_slack);
    r.finish(|r| {
        if r.ratio_sup <= 1.0 + tol.relative_slack {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    });
    Ok(r)
}

// ---------------------------------------------------------------------------
// converse direction

/// The five hypotheses on `ω` of the converse theorem, each with its constant.
pub fn converse_hypotheses(params: &DrParams, w: &Modulus) -> Result<CheckReport> {
    let mut r = CheckReport::new("converse-hypotheses", params);
    let k = w.order_k();
    r.hypotheses.push(Hypothesis::new("order_k_le_2", k <= 2.0, k));
    let (z0, z0c) = match zygmund_z0(w) {
        Ok(z) => (z.member, z.constant),
        Err(_) => (false, f64::INFINITY),
    };
    r.hypotheses.push(Hypothesis::new("zygmund_z0", z0, z0c));
    let (zk, zkc) = match zygmund_zk(w) {
        Ok(z) => (z.member, z.constant),
        Err(_) => (false, f64::INFINITY),
    };
    r.hypotheses.push(Hypothesis::new("zygmund_zk", zk, zkc));
    let (below, inf) = tail_lower_bound(w);
    r.hypotheses.push(Hypothesis::new("tail_bounded_below", below, inf));
    let t5 = tail_t5_integral(w).unwrap_or(f64::INFINITY);
    r.hypotheses.push(Hypothesis::new("tail_t5_integrable", t5.is_finite(), t5));
    r.finish(|r| {
        if r.hypotheses_hold() {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    });
    Ok(r)
}

/// `‖M_t f − f‖² = I₁ + I₂` against the proof's majorant and its `C′ω(t)²` bound.
/// Rows hold the direct `‖M_t f − f‖²` and `C′ω(t)²`.
pub fn converse_titchmarsh(
    params: &DrParams,
    fhat: &SpectralFunction,
    w: &Modulus,
    t_grid: &[f64],
) -> Result<CheckReport> {
    converse_titchmarsh_with(params, fhat, w, t_grid, &Tolerances::default())
}

pub fn converse_titchmarsh_with(
    params: &DrParams,
    fhat: &SpectralFunction,
    w: &Modulus,
    t_grid: &[f64],
    tol: &Tolerances,
) -> Result<CheckReport> {
    validate_t_grid(t_grid)?;
    let mut r = CheckReport::new("thm-converse", params);
    let hyps = converse_hypotheses(params, w)?;
    r.hypotheses = hyps.hypotheses.clone();
    let d1 = params.d() as f64 - 1.0;
    let premise_on = |ts: &[f64]| -> Result<f64> {
        Ok(ts
            .par_iter()
            .map(|&t| {
                let wt = w.eval(t);
                Ok(tail_energy(params, fhat, 1.0 / t, TailWeight::Flat)? / (t.powf(d1) * wt * wt))
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max))
    };
    // a sup over a finite grid is always finite: it must also not grow one decade down
    let premise = premise_on(t_grid)?;
    let refined: Vec<f64> = t_grid.iter().map(|t| 0.1 * t).collect();
    let premise_refined = premise_on(&refined)?.max(premise);
    let holds = premise.is_finite() && premise_refined <= tol.premise_growth * premise.max(1e-300);
    r.hypotheses.push(Hypothesis::new("premise", holds || premise_refined == 0.0, premise));
    r.summary.insert("premise_constant_refined".into(), premise_refined);
    r.summary.insert("premise_constant".into(), premise);
    if !r.hypotheses_hold() {
        r.finish(|_| Verdict::Inconclusive);
        return Ok(r);
    }
    if let Some(t) = t_grid.iter().find(|&&t| t > w.delta0()) {
        return Err(Error::InvalidGrid(format!("t = {t} exceeds δ₀ = {}", w.delta0())));
    }

    let cc = chain_constants(params)?;
    let dup = cc.density_upper;
    let c_zk = hyps.hypothesis("zygmund_zk").map_or(f64::INFINITY, |h| h.constant);
    let t5 = hyps.hypothesis("tail_t5_integrable").map_or(f64::INFINITY, |h| h.constant);
    let c_dec = monotonicity_audit(w, &audit_grid(w))?.c_decr;
    let t_min = t_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let wd = w.eval(w.delta0());

    // ψ(s) = ∫_s^∞ |f̂|² λ^{d−1}; C₃ = sup ψ(s)/ω(1/s)² on [1, 1/t_min]
    let mut s_grid = log_spaced(1.0, 1.0 / t_min, 96);
    s_grid.extend(t_grid.iter().map(|t| 1.0 / t));
    let c3 = s_grid
        .par_iter()
        .map(|&s| {
            let ws = w.eval(1.0 / s);
            Ok(tail_energy(params, fhat, s, TailWeight::PowerDMinus1)? / (ws * ws))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let psi1 = tail_energy(params, fhat, 1.0, TailWeight::PowerDMinus1)?;
    let e01 = spectral_energy(params, fhat, 0.0, 1.0, SpectralWeight::PLANCHEREL)?;
    let norm2 = spectral_energy(params, fhat, 0.0, f64::INFINITY, SpectralWeight::PLANCHEREL)?;
    let q4 = params.q().powi(4);
    let k4 = 8.0 * e01 + 8.0 * dup * psi1 + 32.0 * dup * c3 * t5 + q4 * norm2 / 32.0;
    // t⁴ ≤ C_dec² δ₀⁴ ω(t)²/ω(δ₀)² for t ≤ δ₀ and k ≤ 2
    let t4_const = (c_dec * w.delta0().powi(2) / wd).powi(2);
    let c_prime = 32.0 * dup * c3 * c_dec * c_zk + k4 * t4_const + 4.0 * dup * c3;

    let rows = t_grid
        .par_iter()
        .map(|&t| {
            let s = 1.0 / t;
            let i1 = deviation_energy(params, fhat, t, s)?;
            let direct = lip_value(params, fhat, t)?.powi(2);
            let i2 = (direct - i1).max(0.0);
            let m = |p: f64| {
                spectral_energy(params, fhat, 0.0, s, SpectralWeight { power: p, plancherel: true })
            };
            let maj1 = t.powi(4) * (8.0 * m(4.0)? + q4 / 32.0 * m(0.0)?);
            let maj2 = 4.0 * tail_energy(params, fhat, s, TailWeight::Plancherel)?;
            let wt = w.eval(t);
            Ok((t, direct, i1, i2, maj1 + maj2, c_prime * wt * wt))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut dominated = true;
    let mut lip = 0.0f64;
    let mut i1_sup = 0.0f64;
    let mut i2_sup = 0.0f64;
    for &(t, direct, i1, i2, maj, chain) in &rows {
        let wt = w.eval(t);
        dominated &= direct <= maj * (1.0 + tol.relative_slack) + 1e-300;
        lip = lip.max(direct.sqrt() / wt);
        i1_sup = i1_sup.max(i1 / (wt * wt));
        i2_sup = i2_sup.max(i2 / (wt * wt));
        r.push_row(t, maj, chain);
    }
    r.hypotheses.push(Hypothesis::new("direct_le_majorant", dominated, 0.0));
    r.summary.insert("lip_constant".into(), lip);
    r.summary.insert("i1_over_omega2".into(), i1_sup);
    r.summary.insert("i2_over_omega2".into(), i2_sup);
    r.summary.insert("c3".into(), c3);
    r.summary.insert("c_dec".into(), c_dec);
    r.summary.insert("c_zk".into(), c_zk);
    r.summary.insert("t5".into(), t5);
    r.summary.insert("c_prime".into(), c_prime);
    r.summary.insert("density_upper".into(), dup);
    r.tolerances.insert("relative_slack".into(), tol.relative_slack);
    r.finish(|r| {
        if r.ratio_sup <= 1.0 + tol.relative_slack {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    });
    Ok(r)
}

// ---------------------------------------------------------------------------
// two-sided power-log corollary

/// Both directions for `f̂ = χ λ^{−(α+d/2)} (ln λ)^γ`: rows are
/// `‖M_t f − f‖` against `t^α (ln 1/t)^γ`; the tail side is summarized.
pub fn lipcor_two_sided(
    params: &DrParams,
    alpha: f64,
    gamma: f64,
    t_grid: &[f64],
) -> Result<CheckReport> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(invalid("alpha", format!("must lie in (0, 2), got {alpha}")));
    }
    validate_t_grid(t_grid)?;
    let fhat = recipe_profile(params, alpha, gamma)?;
    let e = 2.0 * alpha + params.d() as f64 - 1.0;
    let rows = t_grid
        .par_iter()
        .map(|&t| {
            let lt = (1.0 / t).ln();
            let lip = lip_value(params, &fhat, t)?;
            let tail = tail_energy(params, &fhat, 1.0 / t, TailWeight::Flat)?;
            Ok((t, lip, t.powf(alpha) * lt.powf(gamma), tail, t.powf(e) * lt.powf(2.0 * gamma)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut r = CheckReport::new("cor-lipcor", params);
    let (mut tsup, mut tinf, mut closed) = (0.0f64, f64::INFINITY, 0.0f64);
    for &(t, lip, norm, tail, tnorm) in &rows {
        r.push_row(t, lip, norm);
        tsup = tsup.max(tail / tnorm);
        tinf = tinf.min(tail / tnorm);
        if gamma == 0.0 {
            let exact = tnorm / e;
            closed = closed.max(((tail - exact) / exact).abs());
        }
    }
    r.summary.insert("tail_sup".into(), tsup);
    r.summary.insert("tail_inf".into(), tinf);
    r.summary.insert("tail_spread".into(), tsup / tinf);
    if gamma == 0.0 {
        r.summary.insert("tail_closed_form_error".into(), closed);
    }
    r.finish(|r| {
        let ok = |a: f64, b: f64| a.is_finite() && b > 0.0 && a >= b;
        if ok(r.ratio_sup, r.ratio_inf) && ok(tsup, tinf) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    });
    let lip_spread = r.ratio_sup / r.ratio_inf;
    r.summary.insert("lip_sup".into(), r.ratio_sup);
    r.summary.insert("lip_inf".into(), r.ratio_inf);
    r.summary.insert("lip_spread".into(), lip_spread);
    Ok(r)
}

// ---------------------------------------------------------------------------
// Besov-type equivalence

/// Truncations: `ε = 2^{−j}` and `Λ = 2^j` for `j ≤ halvings`; the Fubini
/// identity is checked at `fubini_lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovTruncations {
    pub halvings: usize,
    pub fubini_lambda: f64,
}

impl Default for BesovTruncations {
    fn default() -> Self {
        Self {
            halvings: 100,
            fubini_lambda: 64.0,
        }
    }
}

const BESOV_NODES: usize = 8;

/// `∫_ε^1 (‖M_t f − f‖/t^α)² dt/t` at `ε = 2^{−j}`, `j = 0..=n`.
fn besov_lhs(params: &DrParams, fhat: &SpectralFunction, alpha: f64, n: usize) -> Result<Vec<f64>> {
    let (x, wq) = crate::quadrature::reference_rule(BESOV_NODES);
    let ln2 = std::f64::consts::LN_2;
    let nodes: Vec<(usize, f64, f64)> = (0..n)
        .flat_map(|j| {
            let (hi, lo) = (-(j as f64) * ln2, -((j + 1) as f64) * ln2);
            let (h, c) = (0.5 * (hi - lo), 0.5 * (hi + lo));
            x.iter().zip(wq).map(move |(xi, wi)| (j, c + h * xi, h * wi))
        })
        .collect();
    let vals = nodes
        .par_iter()
        .map(|&(_, u, wt)| {
            let t = u.exp();
            Ok(wt * (lip_value(params, fhat, t)? / t.powf(alpha)).powi(2))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut panel = vec![0.0; n];
    for (&(j, _, _), v) in nodes.iter().zip(vals) {
        panel[j] += v;
    }
    let mut out = vec![0.0];
    for p in panel {
        out.push(out.last().unwrap() + p);
    }
    Ok(out)
}

/// `Σ_{t dyadic} ∫ dt/t ∫_t^{2t} g` as the proof splits it, at truncation `Λ`.
fn besov_rhs_direct<G>(fhat: &SpectralFunction, lambda: f64, g: &G) -> f64
where
    G: Fn(f64, f64) -> f64 + Sync,
{
    let inner = |a: f64| integrate_spectral(fhat, a, 2.0 * a, g);
    let outer = |lo: f64, hi: f64, extra: &[f64], h: &dyn Fn(f64) -> f64| {
        let mut edges: Vec<f64> = vec![lo, hi];
        let mut x = hi;
        while x > lo * 1.0000001 {
            x *= 0.5;
            if x > lo {
                edges.push(x);
            }
        }
        edges.extend(extra.iter().copied().filter(|&e| e > lo && e < hi));
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        let logs: Vec<f64> = edges.iter().map(|e| e.ln()).collect();
        logs.windows(2)
            .map(|p| gauss_panel(|u| h(u.exp()), p[0], p[1], ORDER))
            .sum::<f64>()
    };
    let grid_edges: Vec<f64> = fhat.grid().edges().iter().copied().filter(|&e| e > 0.0).collect();
    // I₁: t ≤ 1/2
    let brk1: Vec<f64> = grid_edges.iter().flat_map(|&e| [e, 0.5 * e]).collect();
    let i1 = outer(2f64.powi(-60), 0.5, &brk1, &|t| inner(t));
    // I₂: t = 1/(2s), s ∈ [1/(2Λ), 1]
    let brk2: Vec<f64> = grid_edges.iter().flat_map(|&e| [1.0 / e, 0.5 / e]).collect();
    let i2 = outer(0.5 / lambda, 1.0, &brk2, &|s| inner(0.5 / s));
    i1 + i2
}

/// `ln2 ∫_0^Λ g + ∫_Λ^{2Λ} ln(2Λ/λ) g`.
fn besov_rhs_fubini<G>(fhat: &SpectralFunction, lambda: f64, g: &G) -> f64
where
    G: Fn(f64, f64) -> f64 + Sync,
{
    let ln2 = std::f64::consts::LN_2;
    ln2 * integrate_spectral(fhat, 0.0, lambda, g)
        + integrate_spectral(fhat, lambda, 2.0 * lambda, |l, v| {
            (2.0 * lambda / l).ln() * g(l, v)
        })
}

/// LHS(ε) against RHS(Λ) under ε-halving and Λ-doubling, plus the radial
/// Fubini identity.
pub fn besov_check(
    params: &DrParams,
    fhat: &SpectralFunction,
    alpha: f64,
    trunc: BesovTruncations,
) -> Result<CheckReport> {
    besov_check_with(params, fhat, alpha, trunc, &Tolerances::default())
}

pub fn besov_check_with(
    params: &DrParams,
    fhat: &SpectralFunction,
    alpha: f64,
    trunc: BesovTruncations,
    tol: &Tolerances,
) -> Result<CheckReport> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(invalid("alpha", format!("must be positive, got {alpha}")));
    }
    if trunc.halvings < 3 {
        return Err(invalid("halvings", "need at least 3 truncation levels"));
    }
    let n = trunc.halvings;
    let g = |l: f64, v: f64| {
        if v == 0.0 {
            0.0
        } else {
            v * v * l.powf(2.0 * alpha) * density(params, l)
        }
    };
    let lhs = besov_lhs(params, fhat, alpha, n)?;
    let ln2 = std::f64::consts::LN_2;
    let mut energy = ln2 * integrate_spectral(fhat, 0.0, 1.0, g);
    let mut rhs = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let lam = 2f64.powi(j as i32);
        if j > 0 {
            energy += ln2 * integrate_spectral(fhat, 0.5 * lam, lam, g);
        }
        rhs.push(energy + integrate_spectral(fhat, lam, 2.0 * lam, |l, v| (2.0 * lam / l).ln() * g(l, v)));
    }
    let fub = besov_rhs_fubini(fhat, trunc.fubini_lambda, &g);
    let direct = besov_rhs_direct(fhat, trunc.fubini_lambda, &g);
    let fub_err = if fub == 0.0 { direct.abs() } else { ((direct - fub) / fub).abs() };

    let mut r = CheckReport::new("thm-besov", params);
    for j in 0..=n {
        r.push_row(2f64.powi(-(j as i32)), lhs[j], rhs[j]);
    }
    let (ls, rs) = (stabilizes_within(&lhs, tol.stability), stabilizes_within(&rhs, tol.stability));
    r.hypotheses.push(Hypothesis::new("fubini_identity", fub_err <= tol.fubini, fub_err));
    r.summary.insert("lhs_limit".into(), lhs[n]);
    r.summary.insert("rhs_limit".into(), rhs[n]);
    r.summary.insert("lhs_stable".into(), ls as u8 as f64);
    r.summary.insert("rhs_stable".into(), rs as u8 as f64);
    r.summary.insert("fubini_direct".into(), direct);
    r.summary.insert("fubini_closed".into(), fub);
    r.tolerances.insert("stability".into(), tol.stability);
    r.tolerances.insert("fubini".into(), tol.fubini);
    r.finish(|r| match (ls, rs) {
        (true, true) => Verdict::Pass,
        (true, false) => Verdict::Fail,
        (false, _) if r.hypotheses_hold() => Verdict::Inconclusive,
        _ => Verdict::Fail,
    });
    Ok(r)
}

// ---------------------------------------------------------------------------
// Hölder-type integrability

/// Exponents of the integrability theorem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderParams {
    pub alpha: f64,
    pub p: f64,
    pub p_prime: f64,
    pub q: f64,
    pub gamma_q: f64,
    pub beta_exp: f64,
}

impl HolderParams {
    pub fn new(alpha: f64, p: f64, q: f64, beta_exp: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(invalid("alpha", format!("must lie in (0, 1], got {alpha}")));
        }
        if !(p > 1.0 && p <= 2.0) {
            return Err(invalid("p", format!("must lie in (1, 2], got {p}")));
        }
        let p_prime = p / (p - 1.0);
        if !(q >= p && q <= p_prime) {
            return Err(invalid("q", format!("must lie in [{p}, {p_prime}], got {q}")));
        }
        if !(beta_exp > 0.0 && beta_exp <= p_prime) {
            return Err(invalid("beta_exp", format!("must lie in (0, {p_prime}], got {beta_exp}")));
        }
        Ok(Self {
            alpha,
            p,
            p_prime,
            q,
            gamma_q: 2.0 / q - 1.0,
            beta_exp,
        })
    }

    /// `d p′ / (d + α p′)`.
    pub fn threshold(&self, d: u32) -> f64 {
        let d = d as f64;
        d * self.p_prime / (d + self.alpha * self.p_prime)
    }

    pub fn admissible(&self, d: u32) -> bool {
        self.beta_exp > self.threshold(d) && self.beta_exp <= self.p_prime
    }
}

const HOLDER_DOUBLINGS: usize = 48;

/// `I(β, 2^j) = ∫_0^{2^j} F^β density`, `j = 0..=HOLDER_DOUBLINGS`.
fn holder_truncations(params: &DrParams, fhat: &SpectralFunction, beta: f64) -> Vec<f64> {
    let g = |l: f64, v: f64| {
        if v == 0.0 {
            0.0
        } else {
            v.abs().powf(beta) * density(params, l)
        }
    };
    let mut acc = integrate_spectral(fhat, 0.0, 1.0, g);
    let mut out = vec![acc];
    for j in 1..=HOLDER_DOUBLINGS {
        let hi = 2f64.powi(j as i32);
        acc += integrate_spectral(fhat, 0.5 * hi, hi, g);
        out.push(acc);
    }
    out
}

/// `log₂` of the ratio of the last two increments of a truncation sequence.
fn growth_exponent(seq: &[f64]) -> f64 {
    let n = seq.len();
    ((seq[n - 1] - seq[n - 2]) / (seq[n - 2] - seq[n - 3])).log2()
}

/// Truncation study of `∫ F^β density` for each tested `β` (`F = |f̂|`, `p = 2`),
/// sharpness on the extremal profile below the threshold, and the majorant
/// `φ(s) = ∫_1^s λ^{2β} F^β density ≤ C s^{(2−α)β + d(1−β/2)}` on `s ∈ [1, 1e3]`.
pub fn holder_integrability(
    params: &DrParams,
    fhat: &SpectralFunction,
    hp: &HolderParams,
    betas: &[f64],
) -> Result<CheckReport> {
    holder_integrability_with(params, fhat, hp, betas, &Tolerances::default())
}

pub fn holder_integrability_with(
    params: &DrParams,
    fhat: &SpectralFunction,
    hp: &HolderParams,
    betas: &[f64],
    tol: &Tolerances,
) -> Result<CheckReport> {
    if hp.p != 2.0 {
        return Err(Error::Unsupported(format!(
            "p = {}: the transform-side conclusion needs the nonradial Fourier transform; only p = 2 is supported",
            hp.p
        )));
    }
    let mut betas = betas.to_vec();
    if betas.is_empty() {
        betas.push(hp.beta_exp);
    }
    if let Some(b) = betas.iter().find(|&&b| !(b > 0.0 && b <= hp.p_prime)) {
        return Err(invalid("beta", format!("tested exponents must lie in (0, 2], got {b}")));
    }
    let d = params.d();
    let threshold = hp.threshold(d);
    let alpha = hp.alpha;
    let mut r = CheckReport::new("thm-holder", params);

    // premise on t ∈ [1e-3, 1]
    let t_lip = log_spaced(1e-3, 1.0, 25);
    let lip = t_lip
        .par_iter()
        .map(|&t| Ok(lip_value(params, fhat, t)? / t.powf(alpha)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    r.hypotheses.push(Hypothesis::new("lip_premise", lip.is_finite(), lip));
    r.summary.insert("lip_constant".into(), lip);
    r.summary.insert("threshold".into(), threshold);

    let extremal = power_profile(params, alpha, 1.0)?;
    let cc = chain_constants(params)?;
    let s_grid = log_spaced(1.0, 1e3, 25);
    for &beta in &betas {
        let tag = format!("beta={beta}");
        if beta > threshold {
            let seq = holder_truncations(params, fhat, beta);
            let stable = stabilizes_within(&seq, tol.stability);
            r.hypotheses.push(Hypothesis::new(
                format!("integrable[{tag}]"),
                stable,
                *seq.last().unwrap(),
            ));
        } else {
            let seq = holder_truncations(params, &extremal, beta);
            let growth = growth_exponent(&seq);
            r.hypotheses.push(Hypothesis::new(
                format!("extremal_grows[{tag}]"),
                !stabilizes_within(&seq, tol.stability) && growth > 0.0,
                growth,
            ));
        }
        if beta < hp.p_prime {
            let e = (2.0 - alpha) * beta + d as f64 * (1.0 - beta / 2.0);
            let c = (cc.c_k() * lip * lip).powf(beta / 2.0)
                * (cc.density_upper / d as f64).powf(1.0 - beta / 2.0);
            let g = |l: f64, v: f64| {
                if v == 0.0 {
                    0.0
                } else {
                    l.powf(2.0 * beta) * v.abs().powf(beta) * density(params, l)
                }
            };
            let mut phi = 0.0;
            let mut prev = 1.0;
            let mut worst = 0.0f64;
            for &s in &s_grid {
                phi += integrate_spectral(fhat, prev, s, g);
                prev = s;
                let maj = c * s.powf(e);
                worst = worst.max(if phi == 0.0 { 0.0 } else { phi / maj });
                if beta == hp.beta_exp {
                    r.push_row(s, phi, maj);
                }
            }
            r.hypotheses.push(Hypothesis::new(
                format!("phi_majorant[{tag}]"),
                worst <= 1.0 + tol.relative_slack,
                c,
            ));
            r.summary.insert(format!("phi_ratio_sup[{tag}]"), worst);
        }
    }
    r.tolerances.insert("stability".into(), tol.stability);
    r.finish(|r| {
        if r.hypotheses_hold() {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    });
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moduli::{standard_modulus, ModulusKind, ModulusTail};
    use crate::params::derive_params;

    fn space() -> DrParams {
        derive_params(2, 1).unwrap()
    }

    fn root_modulus() -> Modulus {
        standard_modulus(ModulusKind::Power, 0.5, 0.0, 1.0, 0.5).unwrap()
    }

    #[test]
    fn tail_energy_closed_form_and_monotone() {
        let p = space();
        let f = power_profile(&p, 0.5, 1.0).unwrap();
        let e = 2.0 * 0.5 + p.d() as f64 - 1.0;
        let mut prev = f64::INFINITY;
        for s in [2.0, 10.0, 100.0, 1e4, 1e7] {
            let v = tail_energy(&p, &f, s, TailWeight::Flat).unwrap();
            let exact = s.powf(-e) / e;
            assert!(((v - exact) / exact).abs() < 1e-10, "s={s}: {v} vs {exact}");
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn weighted_tail_is_flat_tail_of_rescaled_profile() {
        let p = space();
        let f = recipe_profile(&p, 0.7, 0.5).unwrap();
        let h = 0.5 * (p.d() as f64 - 1.0);
        let g = SpectralFunction::from_fn(
            f.grid().clone(),
            Arc::new({
                let f = f.clone();
                move |l: f64| f.eval(l) * l.powf(h)
            }),
            f.tail().map(|t| TailModel {
                gamma: t.gamma - h,
                ..*t
            }),
        )
        .unwrap();
        let a = tail_energy(&p, &f, 10.0, TailWeight::PowerDMinus1).unwrap();
        let b = tail_energy(&p, &g, 10.0, TailWeight::Flat).unwrap();
        assert!(((a - b) / a).abs() < 1e-10, "{a} vs {b}");
    }

    #[test]
    fn divergent_tail_reports_exponent() {
        let p = space();
        let f = SpectralFunction::from_fn(
            profile_grid(64.0).unwrap(),
            Arc::new(|l: f64| smooth_onset(l) * l.powf(-0.4)),
            Some(TailModel::power(1.0, 0.4)),
        )
        .unwrap();
        match tail_energy(&p, &f, 100.0, TailWeight::Flat) {
            Err(Error::DivergentTail(msg)) => assert!(msg.contains("p > 1"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn forward_band_limited_and_homogeneous() {
        let p = space();
        let w = root_modulus();
        let tg = log_spaced(1e-3, 0.5, 8);
        let f = band_limited_profile(1.0).unwrap();
        let r = forward_titchmarsh(&p, &f, &w, &tg).unwrap();
        assert!(r.lhs.iter().all(|&v| v == 0.0));
        assert_eq!(r.verdict, Verdict::Pass);

        let f = power_profile(&p, 0.5, 1.0).unwrap();
        let r1 = forward_titchmarsh(&p, &f, &w, &tg).unwrap();
        let r2 = forward_titchmarsh(&p, &f.scaled(2.0), &w, &tg).unwrap();
        assert_eq!(r1.verdict, Verdict::Pass);
        let (l1, l2) = (r1.summary["lip_constant"], r2.summary["lip_constant"]);
        assert!((l2 / l1 - 2.0).abs() < 1e-10);
        let inv = |r: &CheckReport, l: f64| r.ratio_sup / (l * l);
        assert!((inv(&r1, l1) / inv(&r2, l2) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pure_power_shells_give_geometric_constant() {
        let p = space();
        let alpha = 0.5;
        let r = dyadic_shell_equiv(&p, &power_profile(&p, alpha, 1.0).unwrap(), &root_modulus(), &default_t_grid())
            .unwrap();
        let exact = 1.0 / (1.0 - 2f64.powf(-2.0 * alpha));
        assert!((r.summary["empirical_constant"] - exact).abs() < 1e-9);
        assert!(r.summary["empirical_constant"] <= r.summary["proof_constant"]);
        assert!(r.hypothesis("shell_le_tail").unwrap().pass);
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn converse_hypotheses_examples() {
        let p = space();
        let r = converse_hypotheses(&p, &root_modulus()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        let sq = Modulus::new(2.0, 0.5, Arc::new(|t: f64| t * t), ModulusTail::ConstantExtension, "t^2")
            .unwrap();
        let r = converse_hypotheses(&p, &sq).unwrap();
        assert!(!r.hypothesis("zygmund_zk").unwrap().pass);
        assert_eq!(r.verdict, Verdict::Fail);
        let pl = standard_modulus(ModulusKind::PowerLog, 1.5, 1.0, 2.0, 0.5).unwrap();
        assert_eq!(converse_hypotheses(&p, &pl).unwrap().verdict, Verdict::Pass);
    }

    #[test]
    fn converse_zero_band_limited_and_failed_premise() {
        let p = space();
        let w = root_modulus();
        let tg = log_spaced(1e-3, 1e-1, 6);
        let zero = SpectralFunction::zero(profile_grid(16.0).unwrap());
        let r = converse_titchmarsh(&p, &zero, &w, &tg).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.lhs.iter().all(|&v| v == 0.0));

        let f = band_limited_profile(4.0).unwrap();
        let r = converse_titchmarsh(&p, &f, &w, &tg).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.summary["i2_over_omega2"], 0.0);

        // ω decays faster than the profile allows
        let fast = standard_modulus(ModulusKind::Power, 1.5, 0.0, 2.0, 0.5).unwrap();
        let r = converse_titchmarsh(&p, &power_profile(&p, 0.5, 1.0).unwrap(), &fast, &tg).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn lipcor_recipe_rejected_outside_range() {
        let p = space();
        assert!(lipcor_two_sided(&p, 2.0, 0.0, &default_t_grid()).is_err());
        assert!(lipcor_two_sided(&p, 0.0, 0.0, &default_t_grid()).is_err());
    }

    #[test]
    fn besov_compact_profile_is_finite() {
        let p = space();
        let f = band_limited_profile(3.0).unwrap();
        let r = besov_check(
            &p,
            &f,
            0.5,
            BesovTruncations {
                halvings: 30,
                fubini_lambda: 16.0,
            },
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.hypothesis("fubini_identity").unwrap().constant < FUBINI_TOL);
    }

    #[test]
    fn holder_threshold_and_scope() {
        let hp = HolderParams::new(0.5, 2.0, 2.0, 1.8).unwrap();
        assert!((hp.threshold(4) - 1.6).abs() < 1e-15);
        assert!(hp.admissible(4));
        assert_eq!(hp.gamma_q, 0.0);
        let p = space();
        let f = power_profile(&p, 0.5, 1.0).unwrap();
        let hp = HolderParams::new(0.5, 1.5, 2.0, 1.8).unwrap();
        assert!(matches!(
            holder_integrability(&p, &f, &hp, &[]),
            Err(Error::Unsupported(_))
        ));
        assert!(HolderParams::new(0.5, 2.0, 3.0, 1.8).is_err());
    }

    #[test]
    fn stability_rule() {
        assert!(stabilizes(&[1.0, 1.0005, 1.0006]));
        assert!(!stabilizes(&[1.0, 1.01, 1.0101]));
        assert!(stabilizes(&[0.0, 0.0, 0.0]));
    }
}
