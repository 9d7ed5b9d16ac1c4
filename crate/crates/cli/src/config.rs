//! Declarative run configuration (TOML).

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use drharmonic::checks::{
    band_limited_profile, log_spaced, power_profile, recipe_profile, BesovTruncations,
    HolderParams, Tolerances,
};
use drharmonic::moduli::standard_modulus;
use drharmonic::radial::import_spectral;
use drharmonic::{derive_params, DrParams, Modulus, ModulusKind, ModulusTail, SpectralFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::registry::CheckName;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid `{key}`: {constraint}")]
    Invalid { key: String, constraint: String },
}

fn invalid(key: &str, constraint: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        constraint: constraint.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub m: u32,
    pub k: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TGridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for TGridSpec {
    fn default() -> Self {
        Self {
            min: drharmonic::checks::SMALL_T_MIN,
            max: drharmonic::checks::SMALL_T_MAX,
            points: drharmonic::checks::DEFAULT_T_POINTS,
        }
    }
}

/// `t_max`, `lambda_max` and `lambda_panel_width` drive the `transform`
/// subcommand and the `lemma-phi-bounds` audit, which samples
/// `audit_points` equispaced values of each of `t` and `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub t_max: f64,
    pub lambda_max: f64,
    pub lambda_panel_width: f64,
    pub audit_points: usize,
    pub t_grid: TGridSpec,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            t_max: 10.0,
            lambda_max: 10.0,
            lambda_panel_width: 0.5,
            audit_points: 100,
            t_grid: TGridSpec::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    /// `λ^{−(α+d/2)}` past `onset`, smooth below.
    Power,
    /// `χ(λ) λ^{−(α+d/2)} (ln λ)^γ`.
    Recipe,
    /// `(1 − (λ/λ₀)²)⁴` on `[0, λ₀]`.
    BandLimited,
    /// Spectral samples in the exchange format.
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProfileSpec {
    pub kind: ProfileKind,
    pub alpha: f64,
    pub gamma: f64,
    pub onset: f64,
    pub lambda0: f64,
    pub path: Option<PathBuf>,
}

impl Default for ProfileSpec {
    fn default() -> Self {
        Self {
            kind: ProfileKind::Power,
            alpha: 0.5,
            gamma: 0.0,
            onset: 1.0,
            lambda0: 10.0,
            path: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusSpecKind {
    Power,
    PowerLog,
    PowerLoglog,
    /// `t^α` with no restriction tying `α` to the order.
    Monomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailSpec {
    ConstantExtension,
    BoundedBelow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModulusSpec {
    pub kind: ModulusSpecKind,
    pub alpha: f64,
    pub gamma: f64,
    pub order_k: f64,
    pub delta0: f64,
    pub tail: TailSpec,
    /// Value past `δ₀` when `tail = "bounded_below"`.
    pub tail_bound: Option<f64>,
}

impl Default for ModulusSpec {
    fn default() -> Self {
        Self {
            kind: ModulusSpecKind::Power,
            alpha: 0.5,
            gamma: 0.0,
            order_k: 1.0,
            delta0: 0.5,
            tail: TailSpec::ConstantExtension,
            tail_bound: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HolderSpec {
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    /// Exponent whose `φ(s)` majorant is tabulated.
    pub beta: f64,
    pub betas: Vec<f64>,
}

impl Default for HolderSpec {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            p: 2.0,
            q: 2.0,
            beta: 1.8,
            betas: vec![1.4, 1.8, 2.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BesovSpec {
    pub alpha: f64,
    pub halvings: usize,
    pub fubini_lambda: f64,
}

impl Default for BesovSpec {
    fn default() -> Self {
        let t = BesovTruncations::default();
        Self {
            alpha: 0.5,
            halvings: t.halvings,
            fubini_lambda: t.fubini_lambda,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LipcorSpec {
    pub alpha: f64,
    pub gamma: f64,
}

impl Default for LipcorSpec {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            gamma: 0.0,
        }
    }
}

/// The file as written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub space: SpaceSpec,
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Jitters the interior of the `t` grid when set.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub grids: GridSpec,
    #[serde(default)]
    pub profile: ProfileSpec,
    #[serde(default)]
    pub modulus: ModulusSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub holder: HolderSpec,
    #[serde(default)]
    pub besov: BesovSpec,
    #[serde(default)]
    pub lipcor: LipcorSpec,
}

/// A validated configuration with everything the checks consume built.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub file: ConfigFile,
    pub params: DrParams,
    pub checks: Vec<CheckName>,
    pub fhat: SpectralFunction,
    pub modulus: Modulus,
    pub t_grid: Vec<f64>,
    pub holder: HolderParams,
}

impl RunConfig {
    pub fn besov_truncations(&self) -> BesovTruncations {
        BesovTruncations {
            halvings: self.file.besov.halvings,
            fubini_lambda: self.file.besov.fubini_lambda,
        }
    }

    /// Equispaced audit grid on `(0, max]`.
    pub fn audit_grid(&self, max: f64) -> Vec<f64> {
        let n = self.file.grids.audit_points;
        (1..=n).map(|i| max * i as f64 / n as f64).collect()
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config(&text, base).map_err(|e| match e {
        ConfigError::Parse { message, .. } => ConfigError::Parse {
            path: path.to_path_buf(),
            message,
        },
        e => e,
    })
}

/// Relative profile paths resolve against `base`.
pub fn parse_config(text: &str, base: &Path) -> Result<RunConfig, ConfigError> {
    let mut file: ConfigFile = toml::from_str(text).map_err(|e| ConfigError::Parse {
        path: PathBuf::from("<config>"),
        message: e.to_string(),
    })?;
    if let Some(p) = &file.profile.path {
        if p.is_relative() {
            file.profile.path = Some(base.join(p));
        }
    }
    validate(file)
}

fn positive(key: &str, x: f64) -> Result<(), ConfigError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(key, format!("must be positive and finite, got {x}")))
    }
}

fn validate(file: ConfigFile) -> Result<RunConfig, ConfigError> {
    let params = derive_params(file.space.m, file.space.k).map_err(|e| {
        invalid(
            "space",
            format!("(m, k) = ({}, {}) is not a valid space: {e}", file.space.m, file.space.k),
        )
    })?;

    let mut checks = Vec::with_capacity(file.checks.len());
    for (i, name) in file.checks.iter().enumerate() {
        let c = CheckName::parse(name).ok_or_else(|| {
            invalid(
                &format!("checks[{i}]"),
                format!("unknown check `{name}`; known: {}", CheckName::known().join(", ")),
            )
        })?;
        if checks.contains(&c) {
            return Err(invalid(&format!("checks[{i}]"), format!("`{name}` is listed twice")));
        }
        checks.push(c);
    }

    let g = &file.grids;
    positive("grids.t_max", g.t_max)?;
    positive("grids.lambda_max", g.lambda_max)?;
    positive("grids.lambda_panel_width", g.lambda_panel_width)?;
    if g.audit_points == 0 {
        return Err(invalid("grids.audit_points", "must be at least 1"));
    }
    let tg = &g.t_grid;
    if !(tg.min > 0.0 && tg.min < tg.max && tg.max < 1.0) {
        return Err(invalid(
            "grids.t_grid",
            format!("need 0 < min < max < 1, got min = {}, max = {}", tg.min, tg.max),
        ));
    }
    if tg.points < 2 {
        return Err(invalid("grids.t_grid.points", format!("must be at least 2, got {}", tg.points)));
    }
    let t_grid = jitter(log_spaced(tg.min, tg.max, tg.points), file.seed);

    let tol = &file.tolerances;
    positive("tolerances.stability", tol.stability)?;
    positive("tolerances.fubini", tol.fubini)?;
    positive("tolerances.relative_slack", tol.relative_slack)?;
    positive("tolerances.shell_slack", tol.shell_slack)?;
    if !(tol.premise_growth > 1.0 && tol.premise_growth.is_finite()) {
        return Err(invalid(
            "tolerances.premise_growth",
            format!("must exceed 1, got {}", tol.premise_growth),
        ));
    }

    let fhat = build_profile(&params, &file.profile)?;
    let modulus = build_modulus(&file.modulus)?;

    let h = &file.holder;
    let holder = HolderParams::new(h.alpha, h.p, h.q, h.beta)
        .map_err(|e| invalid("holder", e.to_string()))?;
    for (i, &b) in h.betas.iter().enumerate() {
        positive(&format!("holder.betas[{i}]"), b)?;
    }
    positive("besov.alpha", file.besov.alpha)?;
    positive("besov.fubini_lambda", file.besov.fubini_lambda)?;
    if file.besov.halvings < 2 {
        return Err(invalid("besov.halvings", "must be at least 2"));
    }
    if !(file.lipcor.alpha > 0.0 && file.lipcor.alpha < 2.0) {
        return Err(invalid(
            "lipcor.alpha",
            format!("must lie in (0, 2), got {}", file.lipcor.alpha),
        ));
    }
    if !file.lipcor.gamma.is_finite() {
        return Err(invalid("lipcor.gamma", "must be finite"));
    }

    Ok(RunConfig {
        file,
        params,
        checks,
        fhat,
        modulus,
        t_grid,
        holder,
    })
}

/// Moves each interior point by up to a quarter of the local log spacing.
fn jitter(mut ts: Vec<f64>, seed: Option<u64>) -> Vec<f64> {
    let Some(seed) = seed else {
        return ts;
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = (ts[1] / ts[0]).ln();
    let n = ts.len();
    for t in &mut ts[1..n - 1] {
        let u: f64 = rng.gen_range(-0.25..0.25);
        *t *= (u * h).exp();
    }
    ts
}

pub fn build_profile(params: &DrParams, p: &ProfileSpec) -> Result<SpectralFunction, ConfigError> {
    let built = match p.kind {
        ProfileKind::Power => {
            positive("profile.onset", p.onset)?;
            power_profile(params, p.alpha, p.onset)
        }
        ProfileKind::Recipe => recipe_profile(params, p.alpha, p.gamma),
        ProfileKind::BandLimited => {
            positive("profile.lambda0", p.lambda0)?;
            band_limited_profile(p.lambda0)
        }
        ProfileKind::File => {
            let path = p
                .path
                .as_ref()
                .ok_or_else(|| invalid("profile.path", "required when kind = \"file\""))?;
            let text = fs::read_to_string(path).map_err(|e| {
                invalid("profile.path", format!("cannot read {}: {e}", path.display()))
            })?;
            import_spectral(params, &text)
        }
    };
    built.map_err(|e| invalid("profile", e.to_string()))
}

pub fn build_modulus(s: &ModulusSpec) -> Result<Modulus, ConfigError> {
    let w = match s.kind {
        ModulusSpecKind::Monomial => {
            positive("modulus.alpha", s.alpha)?;
            let a = s.alpha;
            Modulus::new(
                s.order_k,
                s.delta0,
                Arc::new(move |t: f64| if t == 0.0 { 0.0 } else { t.powf(a) }),
                ModulusTail::ConstantExtension,
                format!("t^{a}"),
            )
        }
        kind => {
            let kind = match kind {
                ModulusSpecKind::Power => ModulusKind::Power,
                ModulusSpecKind::PowerLog => ModulusKind::PowerLog,
                _ => ModulusKind::PowerLoglog,
            };
            standard_modulus(kind, s.alpha, s.gamma, s.order_k, s.delta0)
        }
    }
    .map_err(|e| invalid("modulus", e.to_string()))?;
    match (s.tail, s.tail_bound) {
        (TailSpec::ConstantExtension, None) => Ok(w),
        (TailSpec::ConstantExtension, Some(_)) => Err(invalid(
            "modulus.tail_bound",
            "only meaningful with tail = \"bounded_below\"",
        )),
        (TailSpec::BoundedBelow, None) => Err(invalid(
            "modulus.tail_bound",
            "required with tail = \"bounded_below\"",
        )),
        (TailSpec::BoundedBelow, Some(b)) => w
            .with_tail(ModulusTail::BoundedBelow(b))
            .map_err(|e| invalid("modulus.tail_bound", e.to_string())),
    }
}
