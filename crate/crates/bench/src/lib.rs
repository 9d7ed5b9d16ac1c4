//! Shared inputs for the benchmarks.

use drharmonic::checks::{power_profile, DEFAULT_T_POINTS, SMALL_T_MAX, SMALL_T_MIN};
use drharmonic::checks::log_spaced;
use drharmonic::radial::{calibration_lambda_grid, REFERENCE_PROFILE};
use drharmonic::{derive_params, DrParams, PanelGrid, RadialFunction, SpectralFunction};

pub struct Fixture {
    pub params: DrParams,
    pub gauss: RadialFunction,
    pub lambda_grid: PanelGrid,
    pub power: SpectralFunction,
    pub t_grid: Vec<f64>,
}

pub fn fixture(m: u32, k: u32) -> Fixture {
    let params = derive_params(m, k).expect("valid space");
    let gauss = REFERENCE_PROFILE.radial(&params).expect("reference profile");
    let power = power_profile(&params, 0.5, 1.0).expect("power profile");
    Fixture {
        gauss,
        lambda_grid: calibration_lambda_grid().expect("grid"),
        power,
        t_grid: log_spaced(SMALL_T_MIN, SMALL_T_MAX, DEFAULT_T_POINTS),
        params,
    }
}
