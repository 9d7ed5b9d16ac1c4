//! Continuation of the Jacobi differential equation
//!
//! ```text
//! y'' + ((2α+1) coth r + (2β+1) tanh r) y' + E y = 0,   E = μ² + (α+β+1)²
//! ```
//!
//! by adaptive Chebyshev collocation: each panel is solved as a linear
//! initial value problem on Chebyshev–Lobatto points, accepted when the
//! trailing Chebyshev coefficients are below tolerance and halved otherwise.
//! Values at interior targets come from barycentric interpolation of the
//! panel polynomial.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const N: usize = 28;
const NP: usize = N + 1;
const PANEL_TOL: f64 = 2e-14;

struct Cheb {
    x: [f64; NP],
    d: Vec<[f64; NP]>,
    d2: Vec<[f64; NP]>,
    bary: [f64; NP],
}

fn cheb() -> &'static Cheb {
    static CHEB: OnceLock<Cheb> = OnceLock::new();
    CHEB.get_or_init(|| {
        let mut x = [0.0; NP];
        for (j, xj) in x.iter_mut().enumerate() {
            *xj = (PI * j as f64 / N as f64).cos();
        }
        let c = |i: usize| {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            if i == 0 || i == N {
                2.0 * s
            } else {
                s
            }
        };
        let mut d = vec![[0.0; NP]; NP];
        for i in 0..NP {
            let mut diag = 0.0;
            for j in 0..NP {
                if i != j {
                    d[i][j] = c(i) / c(j) / (x[i] - x[j]);
                    diag += d[i][j];
                }
            }
            d[i][i] = -diag;
        }
        let mut d2 = vec![[0.0; NP]; NP];
        for i in 0..NP {
            for j in 0..NP {
                d2[i][j] = (0..NP).map(|l| d[i][l] * d[l][j]).sum();
            }
        }
        let mut bary = [0.0; NP];
        for (j, b) in bary.iter_mut().enumerate() {
            let s = if j % 2 == 0 { 1.0 } else { -1.0 };
            *b = if j == 0 || j == N { 0.5 * s } else { s };
        }
        Cheb { x, d, d2, bary }
    })
}

/// The Jacobi equation with indices `(α, β)` and spectral parameter `μ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiOde {
    coth_coef: f64,
    tanh_coef: f64,
    energy: f64,
    mu: f64,
}

impl JacobiOde {
    pub fn new(alpha: f64, beta: f64, mu: f64) -> Self {
        let rho = alpha + beta + 1.0;
        Self {
            coth_coef: 2.0 * alpha + 1.0,
            tanh_coef: 2.0 * beta + 1.0,
            energy: mu * mu + rho * rho,
            mu: mu.abs(),
        }
    }

    /// First-order coefficient at `r > 0`.
    pub fn drift(&self, r: f64) -> f64 {
        let th = r.tanh();
        self.coth_coef / th + self.tanh_coef * th
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    fn nominal_width(&self, r: f64) -> f64 {
        let osc = 10.0 / self.mu.max(1e-300);
        0.75f64.min(r).min(osc)
    }
}

/// Values and derivatives at requested points.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagation {
    pub values: Vec<f64>,
    pub derivatives: Vec<f64>,
    /// Accumulated per-panel truncation estimate, relative to the panel scale.
    pub est_error: f64,
    pub panels: usize,
}

/// Integrates from `(r0, y0, dy0)` through the ascending `targets` (all `>= r0 > 0`).
pub fn propagate(
    ode: &JacobiOde,
    r0: f64,
    y0: f64,
    dy0: f64,
    targets: &[f64],
) -> Result<Propagation> {
    if !(r0 > 0.0) {
        return Err(Error::InvalidGrid(format!(
            "ODE start must be positive, got {r0}"
        )));
    }
    if targets.windows(2).any(|w| w[1] < w[0]) || targets.first().is_some_and(|&t| t < r0) {
        return Err(Error::InvalidGrid(
            "ODE targets must be ascending and not below the start".into(),
        ));
    }
    let mut out = Propagation {
        values: Vec::with_capacity(targets.len()),
        derivatives: Vec::with_capacity(targets.len()),
        est_error: 0.0,
        panels: 0,
    };
    let mut r = r0;
    let (mut y, mut dy) = (y0, dy0);
    let mut idx = 0;
    while idx < targets.len() && targets[idx] <= r {
        out.values.push(y);
        out.derivatives.push(dy);
        idx += 1;
    }
    let end = match targets.last() {
        Some(&e) => e,
        None => return Ok(out),
    };
    let mut width = ode.nominal_width(r);
    let mut panel = Panel::default();
    while r < end {
        width = width.min(ode.nominal_width(r)).min(end - r);
        loop {
            if width < 1e-14 * r.max(1e-300) {
                return Err(Error::StepUnderflow { r, step: width });
            }
            let b = if end - r - width < 1e-12 * width {
                end
            } else {
                r + width
            };
            let est = panel.solve(ode, r, b, y, dy);
            if est <= PANEL_TOL {
                out.est_error += est;
                out.panels += 1;
                while idx < targets.len() && targets[idx] <= b {
                    let (v, dv) = panel.eval(targets[idx]);
                    out.values.push(v);
                    out.derivatives.push(dv);
                    idx += 1;
                }
                y = panel.y[N];
                dy = panel.dy_end;
                r = b;
                // grow back after a successful panel
                width = (width * 1.5).min(ode.nominal_width(r));
                break;
            }
            width *= 0.5;
        }
    }
    Ok(out)
}

#[derive(Default)]
struct Panel {
    a: f64,
    b: f64,
    y: [f64; NP],
    dy: [f64; NP],
    dy_end: f64,
}

impl Panel {
    /// Solves the panel IVP; returns the relative spectral-tail estimate.
    fn solve(&mut self, ode: &JacobiOde, a: f64, b: f64, y0: f64, dy0: f64) -> f64 {
        let ch = cheb();
        let h = b - a;
        let sd = -2.0 / h;
        let sd2 = 4.0 / (h * h);
        let mut m = [[0.0f64; NP]; NP];
        let mut rhs = [0.0f64; NP];
        m[0][0] = 1.0;
        rhs[0] = y0;
        for j in 0..NP {
            m[1][j] = sd * ch.d[0][j];
        }
        rhs[1] = dy0;
        for i in 1..N {
            let r = a + 0.5 * (1.0 - ch.x[i]) * h;
            let p = ode.drift(r);
            let row = &mut m[i + 1];
            for j in 0..NP {
                row[j] = sd2 * ch.d2[i][j] + p * sd * ch.d[i][j];
            }
            row[i] += ode.energy;
        }
        solve_dense(&mut m, &mut rhs);
        self.a = a;
        self.b = b;
        self.y = rhs;
        for i in 0..NP {
            self.dy[i] = sd * (0..NP).map(|j| ch.d[i][j] * self.y[j]).sum::<f64>();
        }
        self.dy_end = self.dy[N];
        // trailing Chebyshev coefficients
        let scale = self.y.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(1e-300);
        let coef = |k: usize| {
            let mut s = 0.0;
            for j in 0..NP {
                let w = if j == 0 || j == N { 0.5 } else { 1.0 };
                s += w * self.y[j] * (PI * (j * k) as f64 / N as f64).cos();
            }
            (2.0 / N as f64) * s
        };
        let tail = coef(N - 2).abs().max(coef(N - 1).abs()).max(0.5 * coef(N).abs());
        if !tail.is_finite() {
            return f64::INFINITY;
        }
        tail / scale
    }

    fn eval(&self, r: f64) -> (f64, f64) {
        let ch = cheb();
        let x = 1.0 - 2.0 * (r - self.a) / (self.b - self.a);
        let mut num = 0.0;
        let mut dnum = 0.0;
        let mut den = 0.0;
        for j in 0..NP {
            let d = x - ch.x[j];
            if d.abs() < 1e-15 {
                return (self.y[j], self.dy[j]);
            }
            let c = ch.bary[j] / d;
            num += c * self.y[j];
            dnum += c * self.dy[j];
            den += c;
        }
        (num / den, dnum / den)
    }
}

/// Gaussian elimination with partial pivoting; solution left in `rhs`.
fn solve_dense(m: &mut [[f64; NP]; NP], rhs: &mut [f64; NP]) {
    for col in 0..NP {
        let piv = (col..NP)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if piv != col {
            m.swap(piv, col);
            rhs.swap(piv, col);
        }
        let p = m[col][col];
        for row in col + 1..NP {
            let f = m[row][col] / p;
            if f != 0.0 {
                for k in col..NP {
                    m[row][k] -= f * m[col][k];
                }
                rhs[row] -= f * rhs[col];
            }
        }
    }
    for col in (0..NP).rev() {
        let s: f64 = (col + 1..NP).map(|k| m[col][k] * rhs[k]).sum();
        rhs[col] = (rhs[col] - s) / m[col][col];
    }
}
