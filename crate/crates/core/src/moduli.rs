//! Moduli of continuity of order `k` and their classifications.
//!
//! A modulus is a core `ω` on `[0, δ₀]` plus an explicit extension to
//! `[δ₀, ∞)`. Membership in the Zygmund classes is decided empirically:
//! sups over log-spaced grids reaching further and further towards 0 must
//! settle.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_panel, integrate_log_tail};
use crate::radial::Profile;

/// Largest almost-monotonicity constant accepted.
pub const MAX_MONOTONE_CONSTANT: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusKind {
    /// `t^α`
    Power,
    /// `t^α (ln 1/t)^γ`
    PowerLog,
    /// `t^α (ln ln 1/t)^γ`
    PowerLoglog,
}

/// Extension of a modulus to `[δ₀, ∞)`.
#[derive(Clone)]
pub enum ModulusTail {
    /// `ω(t) = ω(δ₀)`.
    ConstantExtension,
    /// `ω(t) = b`.
    BoundedBelow(f64),
    Custom(Profile),
}

impl fmt::Debug for ModulusTail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModulusTail::ConstantExtension => write!(f, "ConstantExtension"),
            ModulusTail::BoundedBelow(b) => write!(f, "BoundedBelow({b})"),
            ModulusTail::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

#[derive(Clone)]
pub struct Modulus {
    order_k: f64,
    delta0: f64,
    core: Profile,
    tail: ModulusTail,
    label: String,
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Modulus")
            .field("label", &self.label)
            .field("order_k", &self.order_k)
            .field("delta0", &self.delta0)
            .field("tail", &self.tail)
            .finish()
    }
}

impl Modulus {
    /// Validates `core(0) = 0` and positivity/finiteness on `(0, δ₀]`.
    pub fn new(
        order_k: f64,
        delta0: f64,
        core: Profile,
        tail: ModulusTail,
        label: impl Into<String>,
    ) -> Result<Self> {
        if !(order_k > 0.0 && order_k.is_finite()) {
            return Err(Error::InvalidModulus(format!("order must be positive, got {order_k}")));
        }
        if !(delta0 > 0.0 && delta0.is_finite()) {
            return Err(Error::InvalidModulus(format!("delta0 must be positive, got {delta0}")));
        }
        if core(0.0) != 0.0 {
            return Err(Error::InvalidModulus("core must vanish at 0".into()));
        }
        for i in 0..=200 {
            let t = delta0 * (-(i as f64) * 0.25).exp();
            let v = core(t);
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidModulus(format!(
                    "core must be positive and finite on (0, delta0], got ω({t:e}) = {v}"
                )));
            }
        }
        if let ModulusTail::BoundedBelow(b) = tail {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::InvalidModulus(format!("tail bound must be positive, got {b}")));
            }
        }
        Ok(Self {
            order_k,
            delta0,
            core,
            tail,
            label: label.into(),
        })
    }

    pub fn order_k(&self) -> f64 {
        self.order_k
    }
    pub fn delta0(&self) -> f64 {
        self.delta0
    }
    pub fn label(&self) -> &str {
        &self.label
    }
    pub fn tail(&self) -> &ModulusTail {
        &self.tail
    }

    /// The same core and tail read as a modulus of another order.
    pub fn with_order(&self, order_k: f64) -> Result<Self> {
        Self::new(order_k, self.delta0, self.core.clone(), self.tail.clone(), self.label.clone())
    }

    /// The same core with another extension past `δ₀`.
    pub fn with_tail(&self, tail: ModulusTail) -> Result<Self> {
        Self::new(self.order_k, self.delta0, self.core.clone(), tail, self.label.clone())
    }

    /// `ω(t)` on `[0, ∞)`.
    pub fn eval(&self, t: f64) -> f64 {
        if t <= self.delta0 {
            return (self.core)(t);
        }
        match &self.tail {
            ModulusTail::ConstantExtension => (self.core)(self.delta0),
            ModulusTail::BoundedBelow(b) => *b,
            ModulusTail::Custom(f) => f(t),
        }
    }

    /// `c·ω`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let core = self.core.clone();
        let tail = match &self.tail {
            ModulusTail::Custom(f) => {
                let f = f.clone();
                ModulusTail::Custom(Arc::new(move |t| c * f(t)))
            }
            ModulusTail::BoundedBelow(b) => ModulusTail::BoundedBelow(c * b),
            ModulusTail::ConstantExtension => ModulusTail::ConstantExtension,
        };
        Self::new(
            self.order_k,
            self.delta0,
            Arc::new(move |t| c * core(t)),
            tail,
            format!("{c}·{}", self.label),
        )
    }
}

/// One of the classical moduli with constant extension past `δ₀`.
pub fn standard_modulus(
    kind: ModulusKind,
    alpha: f64,
    gamma: f64,
    k: f64,
    delta0: f64,
) -> Result<Modulus> {
    if !(alpha > 0.0 && alpha < k) {
        return Err(Error::InvalidModulus(format!(
            "alpha must lie in (0, k) = (0, {k}), got {alpha}"
        )));
    }
    let (core, label): (Profile, String) = match kind {
        ModulusKind::Power => (
            Arc::new(move |t: f64| if t == 0.0 { 0.0 } else { t.powf(alpha) }),
            format!("t^{alpha}"),
        ),
        ModulusKind::PowerLog => {
            if !(delta0 < 1.0) {
                return Err(Error::InvalidModulus(format!(
                    "power_log needs delta0 < 1 so that ln(1/t) > 0, got {delta0}"
                )));
            }
            (
                Arc::new(move |t: f64| {
                    if t == 0.0 {
                        0.0
                    } else {
                        t.powf(alpha) * (-t.ln()).powf(gamma)
                    }
                }),
                format!("t^{alpha}(ln 1/t)^{gamma}"),
            )
        }
        ModulusKind::PowerLoglog => {
            if !(delta0 < (-1.0f64).exp()) {
                return Err(Error::InvalidModulus(format!(
                    "power_loglog needs delta0 < 1/e so that ln ln(1/t) > 0, got {delta0}"
                )));
            }
            (
                Arc::new(move |t: f64| {
                    if t == 0.0 {
                        0.0
                    } else {
                        t.powf(alpha) * (-t.ln()).ln().powf(gamma)
                    }
                }),
                format!("t^{alpha}(ln ln 1/t)^{gamma}"),
            )
        }
    };
    Modulus::new(k, delta0, core, ModulusTail::ConstantExtension, label)
}

/// `n` log-spaced points over `[δ₀ e^{−span}, δ₀]`, ascending.
pub fn log_grid(delta0: f64, span: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| delta0 * (-span * (1.0 - i as f64 / (n - 1) as f64)).exp())
        .collect()
}

/// Smallest `C ≥ 1` with `g(t) ≤ C g(s)` for all grid pairs `t ≤ s`.
pub fn almost_increasing_constant(values_ascending_grid: &[f64]) -> f64 {
    let mut run_max = 0.0f64;
    let mut c = 1.0f64;
    for &v in values_ascending_grid {
        run_max = run_max.max(v);
        c = c.max(run_max / v);
    }
    c
}

/// Smallest `C ≥ 1` with `g(s) ≤ C g(t)` for all grid pairs `t ≤ s`.
pub fn almost_decreasing_constant(values_ascending_grid: &[f64]) -> f64 {
    let mut run_max = 0.0f64;
    let mut c = 1.0f64;
    for &v in values_ascending_grid.iter().rev() {
        run_max = run_max.max(v);
        c = c.max(run_max / v);
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityConstants {
    pub c_incr: f64,
    pub c_decr: f64,
}

/// Empirical constants making `ω` almost increasing and `ω/t^k` almost
/// decreasing over all pairs of `grid ⊂ (0, δ₀]`.
pub fn monotonicity_audit(w: &Modulus, grid: &[f64]) -> Result<MonotonicityConstants> {
    monotonicity_audit_at(w, grid, w.order_k)
}

/// As [`monotonicity_audit`] with `ω/t^order` in place of `ω/t^k`.
pub fn monotonicity_audit_at(
    w: &Modulus,
    grid: &[f64],
    order: f64,
) -> Result<MonotonicityConstants> {
    if grid.iter().any(|&t| !(t > 0.0 && t <= w.delta0)) {
        return Err(Error::InvalidGrid(format!(
            "audit grid must lie in (0, {}]",
            w.delta0
        )));
    }
    let mut g: Vec<f64> = grid.to_vec();
    g.sort_by(f64::total_cmp);
    let vals: Vec<f64> = g.iter().map(|&t| w.eval(t)).collect();
    let scaled: Vec<f64> = g.iter().zip(&vals).map(|(&t, v)| v / t.powf(order)).collect();
    let c = MonotonicityConstants {
        c_incr: almost_increasing_constant(&vals),
        c_decr: almost_decreasing_constant(&scaled),
    };
    if !(c.c_incr <= MAX_MONOTONE_CONSTANT && c.c_decr <= MAX_MONOTONE_CONSTANT) {
        return Err(Error::InvalidModulus(format!(
            "{}: almost-monotonicity constants ({:e}, {:e}) exceed {:e}",
            w.label, c.c_incr, c.c_decr, MAX_MONOTONE_CONSTANT
        )));
    }
    Ok(c)
}

/// Default audit grid: 400 log-spaced points over twelve decades below `δ₀`.
pub fn audit_grid(w: &Modulus) -> Vec<f64> {
    log_grid(w.delta0, 12.0 * std::f64::consts::LN_10, 400)
}

/// Decision of a Zygmund-class test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZygmundResult {
    pub member: bool,
    /// Extrapolated sup (or the last sup for non-members).
    pub constant: f64,
    /// Sups over `[δ₀e^{−L}, δ₀]`, `[δ₀e^{−2L}, δ₀]`, `[δ₀e^{−4L}, δ₀]`.
    pub sups: [f64; 3],
}

/// Log-range `L` (in e-folds) of the shortest window.
pub const ZYGMUND_SPAN: f64 = 40.0;
/// Default grid density (points per e-fold).
pub const ZYGMUND_DENSITY: usize = 16;

fn decide(sups: [f64; 3]) -> ZygmundResult {
    let d1 = sups[1] - sups[0];
    let d2 = sups[2] - sups[1];
    let scale = sups[2].abs().max(1e-300);
    if !sups.iter().all(|s| s.is_finite()) {
        return ZygmundResult {
            member: false,
            constant: f64::INFINITY,
            sups,
        };
    }
    if d2 <= 1e-12 * scale {
        return ZygmundResult {
            member: true,
            constant: sups[2],
            sups,
        };
    }
    let r = d2 / d1;
    if d1 > 0.0 && r < 0.9 {
        ZygmundResult {
            member: true,
            constant: sups[2] + d2 * r / (1.0 - r),
            sups,
        }
    } else {
        ZygmundResult {
            member: false,
            constant: sups[2],
            sups,
        }
    }
}

/// Local log-slope `d ln ω / d ln t` at `t`.
fn local_exponent(w: &Modulus, t: f64) -> f64 {
    (w.eval(t) / w.eval(0.5 * t)).ln() / std::f64::consts::LN_2
}

/// `∫_{u_a}^{u_b} g(e^u) du` on one Gauss panel.
fn log_piece<F: Fn(f64) -> f64>(g: &F, ua: f64, ub: f64) -> f64 {
    gauss_panel(|u| g(u.exp()), ua, ub, 10)
}

/// Membership in `𝒵⁰`: `∫₀^t ω(s)/s ds ≤ C ω(t)`.
pub fn zygmund_z0(w: &Modulus) -> Result<ZygmundResult> {
    zygmund_z0_with(w, ZYGMUND_SPAN, ZYGMUND_DENSITY)
}

/// [`zygmund_z0`] with window `span` and `density` points per e-fold.
pub fn zygmund_z0_with(w: &Modulus, span: f64, density: usize) -> Result<ZygmundResult> {
    let d0 = w.delta0;
    let n = (4.0 * span + 20.0) as usize * density;
    let du = (4.0 * span + 20.0) / n as f64;
    let u_top = d0.ln();
    let u0 = u_top - n as f64 * du;
    let t0 = u0.exp();
    let mu = local_exponent(w, t0);
    if !(mu > 0.0) {
        return Err(Error::InvalidModulus(format!(
            "{}: near-zero integral ∫₀ ω(s)/s ds does not converge (local exponent {mu:.3e})",
            w.label
        )));
    }
    // ω(s) ≈ ω(t₀)(s/t₀)^μ on the first panel
    let mut integral = w.eval(t0) / mu;
    let mut sups = [0.0f64; 3];
    let g = |s: f64| w.eval(s);
    for i in 1..=n {
        let (ua, ub) = (u0 + (i - 1) as f64 * du, u0 + i as f64 * du);
        integral += log_piece(&g, ua, ub);
        let depth = u_top - ub;
        let ratio = integral / w.eval(ub.exp());
        for (j, s) in sups.iter_mut().enumerate() {
            if depth <= span * (1 << j) as f64 + 1e-9 {
                *s = s.max(ratio);
            }
        }
    }
    Ok(decide(sups))
}

/// Membership in `𝒵_k`: `∫_t^{δ₀} ω(s)/s^{1+k} ds ≤ C ω(t)/t^k`.
pub fn zygmund_zk(w: &Modulus) -> Result<ZygmundResult> {
    zygmund_zk_with(w, ZYGMUND_SPAN, ZYGMUND_DENSITY)
}

pub fn zygmund_zk_with(w: &Modulus, span: f64, density: usize) -> Result<ZygmundResult> {
    let k = w.order_k;
    let n = (4.0 * span) as usize * density;
    let du = 4.0 * span / n as f64;
    let u_top = w.delta0.ln();
    let g = |s: f64| w.eval(s) * s.powf(-k);
    let mut integral = 0.0;
    let mut sups = [0.0f64; 3];
    for i in 1..=n {
        let (ub, ua) = (u_top - (i - 1) as f64 * du, u_top - i as f64 * du);
        integral += log_piece(&g, ua, ub);
        let t = ua.exp();
        let ratio = integral * t.powf(k) / w.eval(t);
        let depth = u_top - ua;
        for (j, s) in sups.iter_mut().enumerate() {
            if depth <= span * (1 << j) as f64 + 1e-9 {
                *s = s.max(ratio);
            }
        }
    }
    Ok(decide(sups))
}

/// Lower Matuszewska–Orlicz index with an error bar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoIndex {
    pub value: f64,
    pub error: f64,
    /// Per-`h` estimates for `h = 1/2, 1/4, 1/8`.
    pub per_h: [f64; 3],
}

/// `m(ω) = lim_{h→0} ln(liminf_{t→0} ω(ht)/ω(t)) / ln h`, from samples at
/// `t = 10^{−20j}` extrapolated linearly in `1/ln(1/t)`; only `(0, δ₀]` is used.
pub fn mo_lower_index(w: &Modulus) -> Result<MoIndex> {
    let hs = [0.5, 0.25, 0.125];
    let mut ts = Vec::new();
    let mut t = w.delta0.min(1e-2);
    while ts.len() < 16 {
        t *= 1e-20;
        let v = w.eval(0.125 * t);
        if !(v > 1e-290 && 0.125 * t > 1e-290) {
            break;
        }
        ts.push(t);
    }
    if ts.len() < 4 {
        return Err(Error::InvalidModulus(format!(
            "{}: too few representable samples near 0 for the index",
            w.label
        )));
    }
    let mut per_h = [0.0; 3];
    let mut fit_err = 0.0f64;
    for (hi, &h) in hs.iter().enumerate() {
        let pts: Vec<(f64, f64)> = ts
            .iter()
            .map(|&t| {
                let g = (w.eval(h * t) / w.eval(t)).ln() / h.ln();
                (1.0 / (-t.ln()), g)
            })
            .collect();
        let tail = &pts[pts.len() - 4..];
        let (n, sx, sy) = (
            tail.len() as f64,
            tail.iter().map(|p| p.0).sum::<f64>(),
            tail.iter().map(|p| p.1).sum::<f64>(),
        );
        let sxx: f64 = tail.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = tail.iter().map(|p| p.0 * p.1).sum();
        let den = n * sxx - sx * sx;
        let slope = if den.abs() > 0.0 { (n * sxy - sx * sy) / den } else { 0.0 };
        let icept = (sy - slope * sx) / n;
        per_h[hi] = icept;
        let resid = tail
            .iter()
            .map(|p| (p.1 - icept - slope * p.0).abs())
            .fold(0.0, f64::max);
        fit_err = fit_err.max(resid).max((icept - tail[3].1).abs() * 0.1);
    }
    let mean = per_h.iter().sum::<f64>() / 3.0;
    let spread = per_h.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    if !(mean.is_finite()) || spread > 0.05 {
        return Err(Error::InvalidModulus(format!(
            "{}: index extrapolation does not stabilize (estimates {per_h:?})",
            w.label
        )));
    }
    Ok(MoIndex {
        value: per_h[2],
        error: spread + fit_err,
        per_h,
    })
}

/// Partial sum of `Σ ω(t/2^i)²` against the bound `C_μ² ω(t)² / (1 − 2^{−2μ})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicSum {
    pub sum: f64,
    pub bound: f64,
    /// Almost-increasing constant of `ω(s)/s^μ` on `(0, t]`.
    pub c_mu: f64,
    pub terms: usize,
}

/// Geometric constant `1/(1 − 2^{−2μ})`.
pub fn geometric_constant(mu: f64) -> f64 {
    1.0 / (1.0 - 2f64.powf(-2.0 * mu))
}

pub fn dyadic_sum_bound(w: &Modulus, t: f64, mu: f64) -> Result<DyadicSum> {
    let idx = mo_lower_index(w)?;
    if !(mu > 0.0 && mu < idx.value) {
        return Err(Error::InvalidModulus(format!(
            "mu = {mu} must lie in (0, m(ω) = {:.6})",
            idx.value
        )));
    }
    let w0 = w.eval(t);
    let mut sum = 0.0;
    let mut terms = 0;
    loop {
        let v = w.eval(t * 2f64.powi(-(terms as i32)));
        let inc = v * v;
        sum += inc;
        terms += 1;
        if inc < 1e-10 * sum || inc == 0.0 {
            break;
        }
        if terms > 4000 {
            return Err(Error::DivergentTail(format!(
                "Σ ω(t/2^i)² did not converge after {terms} terms"
            )));
        }
    }
    let per_octave = 32;
    let samples: Vec<f64> = (0..=terms * per_octave)
        .rev()
        .map(|j| {
            let s = t * 2f64.powf(-(j as f64) / per_octave as f64);
            w.eval(s) / s.powf(mu)
        })
        .collect();
    let c_mu = almost_increasing_constant(&samples);
    Ok(DyadicSum {
        sum,
        bound: c_mu * c_mu * w0 * w0 * geometric_constant(mu),
        c_mu,
        terms,
    })
}

/// `(bounded below on [δ₀, ∞), inf)`; custom tails are sampled over six decades.
pub fn tail_lower_bound(w: &Modulus) -> (bool, f64) {
    let inf = match &w.tail {
        ModulusTail::ConstantExtension => w.eval(w.delta0),
        ModulusTail::BoundedBelow(b) => *b,
        ModulusTail::Custom(f) => (0..=600)
            .map(|i| f(w.delta0 * 10f64.powf(i as f64 / 100.0)))
            .fold(f64::INFINITY, f64::min),
    };
    (inf > 0.0 && inf.is_finite(), inf)
}

/// `∫_{δ₀}^∞ ω(t)² t^{−5} dt`.
pub fn tail_t5_integral(w: &Modulus) -> Result<f64> {
    let d = w.delta0;
    match &w.tail {
        ModulusTail::ConstantExtension => {
            let v = w.eval(d);
            Ok(v * v / (4.0 * d.powi(4)))
        }
        ModulusTail::BoundedBelow(b) => Ok(b * b / (4.0 * d.powi(4))),
        ModulusTail::Custom(f) => integrate_log_tail(|t| f(t).powi(2) * t.powi(-5), d, 16)
            .map_err(|_| Error::DivergentTail("ω(t)²/t⁵ is not integrable on [δ₀, ∞)".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(alpha: f64, k: f64) -> Modulus {
        standard_modulus(ModulusKind::Power, alpha, 0.0, k, 0.5).unwrap()
    }

    #[test]
    fn standard_examples() {
        let w = power(0.5, 1.0);
        assert_eq!(w.eval(0.25), 0.5);
        assert_eq!(w.eval(4.0), 0.5f64.sqrt());
        let w = standard_modulus(ModulusKind::PowerLog, 0.5, 1.0, 2.0, 0.1).unwrap();
        let t: f64 = 0.01;
        assert!((w.eval(t) - t.sqrt() * (1.0 / t).ln()).abs() < 1e-15);
        assert!(standard_modulus(ModulusKind::Power, 1.5, 0.0, 1.0, 0.5).is_err());
        assert!(standard_modulus(ModulusKind::PowerLoglog, 0.5, 1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn monotonicity_constants() {
        let w = power(0.5, 1.0);
        let c = monotonicity_audit(&w, &audit_grid(&w)).unwrap();
        assert_eq!((c.c_incr, c.c_decr), (1.0, 1.0));
        let w = standard_modulus(ModulusKind::PowerLog, 0.5, 1.0, 1.0, 0.5).unwrap();
        let c = monotonicity_audit(&w, &audit_grid(&w)).unwrap();
        // t^{1/2} ln(1/t) peaks at e^{-2}
        assert!(c.c_incr > 1.0 && c.c_incr < 2.0, "{c:?}");
        let below: Vec<f64> = audit_grid(&w).into_iter().filter(|&t| t <= (-2.0f64).exp()).collect();
        let c = monotonicity_audit(&w, &below).unwrap();
        assert!(c.c_incr < 1.0 + 1e-12);
    }

    #[test]
    fn higher_order_acceptance() {
        let w = power(0.5, 1.0);
        let w2 = w.with_order(2.0).unwrap();
        let c = monotonicity_audit(&w2, &audit_grid(&w2)).unwrap();
        assert!(c.c_decr.is_finite());
    }

    #[test]
    fn z0_closed_forms() {
        let r = zygmund_z0(&power(0.5, 1.0)).unwrap();
        assert!(r.member && (r.constant - 2.0).abs() < 1e-9, "{r:?}");
        let r = zygmund_z0(&power(0.3, 1.0)).unwrap();
        assert!(r.member && (r.constant - 1.0 / 0.3).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn z0_power_log_is_refinement_stable() {
        let w = standard_modulus(ModulusKind::PowerLog, 0.5, 1.0, 1.0, 0.5).unwrap();
        let a = zygmund_z0_with(&w, ZYGMUND_SPAN, 16).unwrap();
        let b = zygmund_z0_with(&w, ZYGMUND_SPAN, 32).unwrap();
        assert!(a.member && b.member);
        assert!((a.constant - b.constant).abs() < 5e-3, "{a:?} {b:?}");
    }

    #[test]
    fn zk_closed_forms() {
        let r = zygmund_zk(&power(0.5, 1.0)).unwrap();
        assert!(r.member && (r.constant - 2.0).abs() < 1e-6, "{r:?}");
        let w = standard_modulus(ModulusKind::Power, 1.9, 0.0, 2.0, 0.5).unwrap();
        let r = zygmund_zk(&w).unwrap();
        assert!(r.member && (r.constant - 10.0).abs() < 0.5, "{r:?}");
        // ω = t^k: the ratio grows like ln(δ₀/t)
        let w = Modulus::new(
            2.0,
            0.5,
            Arc::new(|t: f64| t * t),
            ModulusTail::ConstantExtension,
            "t^2",
        )
        .unwrap();
        assert!(!zygmund_zk(&w).unwrap().member);
    }

    #[test]
    fn mo_index_of_powers_and_logs() {
        for a in [0.3, 0.5, 1.5] {
            let i = mo_lower_index(&power(a, 2.0)).unwrap();
            assert!((i.value - a).abs() < 1e-3 && i.error < 1e-3, "{i:?}");
        }
        let w = standard_modulus(ModulusKind::PowerLog, 0.5, 2.0, 1.0, 0.1).unwrap();
        let i = mo_lower_index(&w).unwrap();
        assert!((i.value - 0.5).abs() < 1e-2, "{i:?}");
    }

    #[test]
    fn dyadic_sum_geometric_case() {
        let w = power(0.5, 1.0);
        let s = dyadic_sum_bound(&w, 0.1, 0.4).unwrap();
        let exact = 0.1 / (1.0 - 0.5);
        assert!((s.sum - exact).abs() < 1e-10 * exact);
        assert!(s.sum <= s.bound);
        let s2 = dyadic_sum_bound(&w, 0.2, 0.4).unwrap();
        assert!(s2.sum > s.sum);
        assert!(dyadic_sum_bound(&w, 0.1, 0.6).is_err());
    }

    #[test]
    fn dyadic_sum_power_log_within_bound() {
        let w = standard_modulus(ModulusKind::PowerLog, 0.5, 1.0, 1.0, 0.3).unwrap();
        let s = dyadic_sum_bound(&w, 0.05, 0.3).unwrap();
        assert!(s.sum.is_finite() && s.sum <= s.bound, "{s:?}");
    }

    #[test]
    fn tail_hypotheses() {
        let w = power(0.5, 1.0);
        let (ok, inf) = tail_lower_bound(&w);
        assert!(ok && (inf - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((tail_t5_integral(&w).unwrap() - 0.5 / (4.0 * 0.0625)).abs() < 1e-14);
        let custom = Modulus::new(
            1.0,
            0.5,
            Arc::new(|t: f64| t.sqrt()),
            ModulusTail::Custom(Arc::new(|t: f64| t.sqrt())),
            "sqrt",
        )
        .unwrap();
        // ∫_{1/2}^∞ t^{-4} dt = 8/3
        assert!((tail_t5_integral(&custom).unwrap() - 8.0 / 3.0).abs() < 1e-10);
    }
}
