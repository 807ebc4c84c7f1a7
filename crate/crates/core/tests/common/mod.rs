#![allow(dead_code)]

use h2flow::constitutive::{Capillarity, MediumParams, Params};
use h2flow::statevars::{total_density_x, PhaseValue, PrimaryState};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const ORACLE_CSV: &str = include_str!("../data/constitutive_oracle.csv");

/// Rows `(s_g, p_c, kr_l, kr_g)` evaluated with 50-digit arithmetic.
pub fn oracle_rows() -> Vec<[f64; 4]> {
    ORACLE_CSV
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            [v[0], v[1], v[2], v[3]]
        })
        .collect()
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// An admissible `(p_l, X)` with `S_g` drawn log-uniformly when saturated.
pub fn random_state(rng: &mut StdRng, params: &Params) -> PrimaryState {
    let p_l = 10f64.powf(rng.gen_range(5.0..7.0));
    let c = &params.consts;
    let m = &params.medium;
    if rng.gen_bool(0.5) {
        let s_g = if rng.gen_bool(0.5) {
            10f64.powf(rng.gen_range(-10.0..-1.0))
        } else {
            rng.gen_range(0.01..m.sg_max() - 1e-4)
        };
        let x = total_density_x(p_l, PhaseValue::Saturated { s_g }, c, m).unwrap();
        PrimaryState::new(p_l, x)
    } else {
        let limit = c.c_h * (p_l + m.capillary_pressure(0.0).unwrap());
        PrimaryState::new(p_l, rng.gen_range(0.0..1.0) * limit)
    }
}

pub fn nocap_params() -> Params {
    let mut medium = MediumParams::reference();
    medium.capillarity = Capillarity::Zero;
    Params::new(medium, Params::reference().fluid).unwrap()
}
