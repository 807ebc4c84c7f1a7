//! Pointwise flux coefficients of the `(p_l, X)` system.
//!
//! The water, hydrogen and total fluxes are written as
//! `phi^w = -(Ã11 ∇p_l + Ã12 ∇X + B̃1)`,
//! `phi^h = -(A21 ∇p_l + A22 ∇X + B2)` and
//! `phi_tot = G phi^w + phi^h = -(A11 ∇p_l + A12 ∇X + B1)`.

use crate::constitutive::{DerivedConstants, FluidParams, MediumParams};
use crate::error::{Error, Result};
use crate::statevars::{secondary_state_nocap, SecondaryState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSet {
    pub at11: f64,
    pub at12: f64,
    pub a21: f64,
    pub a22: f64,
    pub a11: f64,
    pub a12: f64,
    pub bt1: [f64; 2],
    pub b2: [f64; 2],
    pub b1: [f64; 2],
}

fn scale(v: [f64; 2], s: f64) -> [f64; 2] {
    [v[0] * s, v[1] * s]
}

/// Evaluates every coefficient at one state.
///
/// `A11`, `A12` and `B1` use their reduced closed forms; the sum identities
/// `A1j = G Ãj + A2j` are checked by the tests rather than used here.
pub fn assemble_coefficients(
    sec: &SecondaryState,
    medium: &MediumParams,
    fluid: &FluidParams,
    consts: &DerivedConstants,
) -> CoefficientSet {
    let k = medium.k;
    let (kr_l, kr_g) = medium.rel_perms(sec.s_g);
    let lam_l = kr_l / fluid.mu_l;
    let lam_g = kr_g / fluid.mu_g;
    let DerivedConstants { c_h, c_v, f, g, .. } = *consts;
    let n = sec.n_aux;
    let a = sec.a;
    let r_s = sec.r_s;
    let p_g = sec.p_g;

    // Φ (1 - S_g) F / (R_s + F) · D_l^h · C_h
    let diff = medium.phi * (1.0 - sec.s_g) * f / (r_s + f) * fluid.d_l_h * c_h;
    let one_minus_n_over_a = (1.0 - n) / a;
    let rho_l = fluid.rho_l_std + r_s * fluid.rho_g_std;
    let gas_gravity = k * lam_g * c_v * c_v * fluid.rho_g_std * p_g * p_g;

    let at11 = k * lam_l - diff * n / g;
    let at12 = -diff * one_minus_n_over_a / g;
    let a21 = k * lam_l * r_s + k * lam_g * c_v * p_g * n + diff * n;
    let a22 = k * lam_g * one_minus_n_over_a * c_v * p_g + diff * one_minus_n_over_a;
    let bt1 = scale(fluid.gravity, -k * lam_l * rho_l);
    let b2 = scale(fluid.gravity, -k * lam_l * r_s * rho_l - gas_gravity);

    let a11 = k * lam_l * (g + r_s) + k * lam_g * c_v * p_g * n;
    let a12 = k * lam_g * one_minus_n_over_a * c_v * p_g;
    let b1 = scale(fluid.gravity, -k * lam_l * (g + r_s) * rho_l - gas_gravity);

    CoefficientSet {
        at11,
        at12,
        a21,
        a22,
        a11,
        a12,
        bt1,
        b2,
        b1,
    }
}

/// Mobilities of the no-capillarity, no-diffusion, no-gravity limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalFlow {
    pub lambda_tot: f64,
    pub lambda_h: f64,
    pub f_h: f64,
}

impl FractionalFlow {
    /// Builds the fractional flow from phase mobilities at pressure `p`.
    pub fn from_mobilities(
        lambda_l: f64,
        lambda_g: f64,
        r_s: f64,
        p: f64,
        consts: &DerivedConstants,
    ) -> Result<Self> {
        let gas = lambda_g * consts.c_v * p;
        let lambda_tot = lambda_l * (consts.g + r_s) + gas;
        let lambda_h = lambda_l * r_s + gas;
        if !(lambda_tot > 0.0) {
            return Err(Error::OutOfRange(format!(
                "total mobility vanishes (lambda_l = {lambda_l:e}, lambda_g = {lambda_g:e})"
            )));
        }
        Ok(FractionalFlow {
            lambda_tot,
            lambda_h,
            f_h: lambda_h / lambda_tot,
        })
    }
}

pub fn fractional_flow(
    p: f64,
    x: f64,
    consts: &DerivedConstants,
    medium: &MediumParams,
    fluid: &FluidParams,
) -> Result<FractionalFlow> {
    let sec = secondary_state_nocap(p, x, consts, medium.sg_max())?;
    let (kr_l, kr_g) = medium.rel_perms(sec.s_g);
    FractionalFlow::from_mobilities(kr_l / fluid.mu_l, kr_g / fluid.mu_g, sec.r_s, p, consts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::Params;
    use crate::statevars::invert_saturation;

    #[test]
    fn unsaturated_a22_is_fickian() {
        let p = Params::reference();
        let sec = invert_saturation(1e6, 0.1, &p.consts, &p.medium).unwrap();
        let c = assemble_coefficients(&sec, &p.medium, &p.fluid, &p.consts);
        let expect = 0.15 * 2500.0 / 2500.1 * 3e-9;
        assert!((c.a22 - expect).abs() <= 1e-12 * expect);
        assert!((c.a22 - 4.4998e-10).abs() < 1e-14);
        assert_eq!(c.a12, 0.0);
    }

    #[test]
    fn zero_gravity_has_no_gravity_vectors() {
        let p = Params::reference();
        let sec = invert_saturation(1e6, 0.5, &p.consts, &p.medium).unwrap();
        let c = assemble_coefficients(&sec, &p.medium, &p.fluid, &p.consts);
        assert_eq!(c.bt1, [0.0, 0.0]);
        assert_eq!(c.b2, [0.0, 0.0]);
        assert_eq!(c.b1, [0.0, 0.0]);
    }

    #[test]
    fn pure_water_has_no_hydrogen_flow() {
        let p = Params::reference();
        let ff = fractional_flow(1e6, 0.0, &p.consts, &p.medium, &p.fluid).unwrap();
        assert_eq!(ff.f_h, 0.0);
    }

    #[test]
    fn immobile_liquid_gives_unit_fraction() {
        let p = Params::reference();
        let ff = FractionalFlow::from_mobilities(0.0, 1e5, 0.19, 1e6, &p.consts).unwrap();
        assert_eq!(ff.f_h, 1.0);
        assert!(FractionalFlow::from_mobilities(0.0, 0.0, 0.0, 1e6, &p.consts).is_err());
    }
}
