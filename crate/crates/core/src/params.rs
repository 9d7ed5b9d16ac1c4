//! Structural constants of a Damek–Ricci space `S = N ⋉ A`.
//!
//! `m = dim 𝔳` (always even), `k = dim 𝔷` (the center; some texts call it `l`).
//! Everything downstream reads its constants from a [`DrParams`], including
//! the two normalizations that are fixed numerically once per space: the
//! Poisson kernel constant and the Plancherel constant.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gamma::ln_gamma_real;
use crate::jacobi::{eigen_residual, JacobiFunction, SpectralScaling};
use crate::quadrature::integrate_edges;

/// Spectral and radial samples used to select the Jacobi indices.
const RESOLVE_LAMBDAS: [f64; 3] = [0.5, 1.0, 2.0];
const RESOLVE_TS: [f64; 4] = [0.2, 0.7, 1.6, 3.0];

/// Outcome of the Jacobi index selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiResolution {
    /// `((m+k+1)/2, (k−1)/2)`.
    pub literal: (f64, f64),
    /// `((m+k−1)/2, (k−1)/2)`, the pair with `α+β+1 = Q`.
    pub consistent: (f64, f64),
    /// Worst eigen-residual divided by `1e-4(1+λ²)`, per candidate.
    pub literal_residual: f64,
    pub consistent_residual: f64,
    pub chosen: (f64, f64),
}

/// Numerically fixed Plancherel normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlancherelCalibration {
    pub constant: f64,
    pub scaling: SpectralScaling,
    /// Worst relative Parseval error on the held-out profiles.
    pub held_out_error: f64,
    /// Every convention tried: `(scaling, constant, held-out error)`.
    pub tried: Vec<(SpectralScaling, f64, f64)>,
}

impl PlancherelCalibration {
    pub(crate) fn provisional(scaling: SpectralScaling) -> Self {
        Self {
            constant: 1.0,
            scaling,
            held_out_error: f64::NAN,
            tried: Vec::new(),
        }
    }
}

/// Immutable description of the space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrParams {
    m: u32,
    k: u32,
    alpha2: u32,
    beta2: u32,
    poisson_c: f64,
    plancherel: PlancherelCalibration,
    resolution: JacobiResolution,
}

/// A point `n = (X, Z)` of the nilpotent group `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct NPoint {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
}

impl NPoint {
    pub fn origin(params: &DrParams) -> Self {
        Self {
            x: vec![0.0; params.m as usize],
            z: vec![0.0; params.k as usize],
        }
    }
}

fn validate(m: u32, k: u32) -> Result<()> {
    if m < 2 {
        return Err(invalid("m", format!("dim v must be at least 2, got {m}")));
    }
    if m % 2 != 0 {
        return Err(invalid("m", format!("dim v must be even, got {m}")));
    }
    if k < 1 {
        return Err(invalid("k", format!("dim z must be at least 1, got {k}")));
    }
    Ok(())
}

impl DrParams {
    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn k(&self) -> u32 {
        self.k
    }
    /// Homogeneous dimension `m/2 + k` (an integer since `m` is even).
    pub fn q(&self) -> f64 {
        (self.m / 2 + self.k) as f64
    }
    pub fn rho(&self) -> f64 {
        0.5 * self.q()
    }
    /// `dim S = m + k + 1`.
    pub fn d(&self) -> u32 {
        self.m + self.k + 1
    }
    pub fn alpha(&self) -> f64 {
        0.5 * self.alpha2 as f64
    }
    pub fn beta(&self) -> f64 {
        0.5 * self.beta2 as f64
    }
    /// `2α` and `2β`, exact.
    pub fn doubled_indices(&self) -> (u32, u32) {
        (self.alpha2, self.beta2)
    }
    pub fn poisson_constant(&self) -> f64 {
        self.poisson_c
    }
    pub fn plancherel(&self) -> &PlancherelCalibration {
        &self.plancherel
    }
    pub fn resolution(&self) -> &JacobiResolution {
        &self.resolution
    }
    pub fn jacobi(&self) -> JacobiFunction {
        JacobiFunction::unchecked(self.alpha(), self.beta())
    }

    /// Validated structure with resolved indices but provisional normalizations.
    pub(crate) fn structural(m: u32, k: u32) -> Result<Self> {
        validate(m, k)?;
        let resolution = resolve_jacobi_indices(m, k)?;
        let (a, b) = resolution.chosen;
        Ok(Self {
            m,
            k,
            alpha2: (2.0 * a).round() as u32,
            beta2: (2.0 * b).round() as u32,
            poisson_c: 1.0,
            plancherel: PlancherelCalibration::provisional(SpectralScaling::Doubled),
            resolution,
        })
    }

}

/// Derives every constant of the `(m, k)` space, calibrating the Poisson and
/// Plancherel normalizations. Results are memoized per `(m, k)`.
pub fn derive_params(m: u32, k: u32) -> Result<DrParams> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), DrParams>>> = OnceLock::new();
    validate(m, k)?;
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&(m, k)) {
        return Ok(p.clone());
    }
    let mut params = DrParams::structural(m, k)?;
    params.poisson_c = poisson_normalization_constant(&params)?;
    let cal = crate::radial::calibrate_plancherel(&params)?;
    params.plancherel = cal;
    cache.lock().unwrap().insert((m, k), params.clone());
    Ok(params)
}

/// Selects `(α, β)` by the eigen-residual of `φ_λ(t) = φ_{2λ}^{(α,β)}(t/2)`
/// under the radial Laplacian of the `(m, k)` space; both the literal
/// `α = (m+k+1)/2` and the consistent `α = (m+k−1)/2` are evaluated.
pub fn resolve_jacobi_indices(m: u32, k: u32) -> Result<JacobiResolution> {
    validate(m, k)?;
    let beta = 0.5 * (k as f64 - 1.0);
    let literal = (0.5 * (m + k + 1) as f64, beta);
    let consistent = (0.5 * (m + k - 1) as f64, beta);
    let worst = |(a, b): (f64, f64)| -> Result<f64> {
        let jf = JacobiFunction::new(a, b)?;
        let mut w = 0.0f64;
        for &lam in &RESOLVE_LAMBDAS {
            for &t in &RESOLVE_TS {
                let r = eigen_residual(m, k, &jf, lam, t)?;
                w = w.max(r / (1e-4 * (1.0 + lam * lam)));
            }
        }
        Ok(w)
    };
    let literal_residual = worst(literal)?;
    let consistent_residual = worst(consistent)?;
    let chosen = match (consistent_residual <= 1.0, literal_residual <= 1.0) {
        (true, _) => consistent,
        (false, true) => literal,
        (false, false) => {
            return Err(Error::JacobiResolution {
                residuals: vec![literal_residual, consistent_residual],
                tolerance: 1.0,
            })
        }
    };
    Ok(JacobiResolution {
        literal,
        consistent,
        literal_residual,
        consistent_residual,
        chosen,
    })
}

/// `P_{a_t}(X, Z) = C a_t^Q ((a_t + |X|²/4)² + |Z|²)^{−Q}` with `a_t = e^t`.
pub fn poisson_kernel(params: &DrParams, t: f64, n: &NPoint, c: f64) -> f64 {
    let q = params.q();
    let a = t.exp();
    let x2: f64 = n.x.iter().map(|v| v * v).sum();
    let z2: f64 = n.z.iter().map(|v| v * v).sum();
    c * a.powf(q) * ((a + 0.25 * x2).powi(2) + z2).powf(-q)
}

/// Surface area of the unit sphere in `R^n`.
fn sphere_area(n: u32) -> f64 {
    2.0 * PI.powf(0.5 * n as f64) / ln_gamma_real(0.5 * n as f64).exp()
}

fn geometric_edges(scale: f64, cutoff: f64) -> Vec<f64> {
    let mut e = vec![0.0];
    let mut x = scale / 16.0;
    while x < scale * cutoff {
        e.push(x);
        x *= 2.0;
    }
    e.push(scale * cutoff);
    e
}

/// `∫_N P_{a_t}(n) dn` for the normalization `c`, reduced to a double integral
/// over `(|X|, |Z|)` with sphere-area weights; both radii are truncated at
/// `cutoff` times their natural scale.
pub fn poisson_mass(params: &DrParams, t: f64, c: f64, cutoff: f64) -> f64 {
    let q = params.q();
    let (m, k) = (params.m as i32, params.k as i32);
    let a = t.exp();
    let outer_edges = geometric_edges(a.sqrt(), cutoff);
    let mass = integrate_edges(
        |x| {
            let s = a + 0.25 * x * x;
            let inner_edges = geometric_edges(s, cutoff);
            let inner = integrate_edges(
                |z| z.powi(k - 1) * (s * s + z * z).powf(-q),
                &inner_edges,
                20,
            );
            x.powi(m - 1) * inner
        },
        &outer_edges,
        20,
    );
    c * a.powf(q) * sphere_area(params.m) * sphere_area(params.k) * mass
}

/// The constant `C` making `∫_N P_1(n) dn = 1`.
pub fn poisson_normalization_constant(params: &DrParams) -> Result<f64> {
    let coarse = poisson_mass(params, 0.0, 1.0, 2f64.powi(13));
    let fine = poisson_mass(params, 0.0, 1.0, 2f64.powi(14));
    let err = ((fine - coarse) / fine).abs();
    if !(err < 1e-8) {
        return Err(Error::QuadratureNonConvergence {
            achieved: err,
            target: 1e-8,
        });
    }
    Ok(1.0 / fine)
}

/// Radial volume density `A(t) = (2 sinh(t/2))^{m+k} (2 cosh(t/2))^k`.
pub fn volume_density(params: &DrParams, t: f64) -> f64 {
    (2.0 * (0.5 * t).sinh()).powi((params.m + params.k) as i32)
        * (2.0 * (0.5 * t).cosh()).powi(params.k as i32)
}

/// `d/dt log A(t)`, the drift of the radial Laplacian.
pub fn radial_drift(params: &DrParams, t: f64) -> f64 {
    let th = (0.5 * t).tanh();
    0.5 * (params.m + params.k) as f64 / th + 0.5 * params.k as f64 * th
}
