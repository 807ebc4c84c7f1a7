use crate::constitutive::Params;
use crate::error::Result;
use crate::statevars::{invert_saturation, PrimaryState, SecondaryState};

/// Everything a face flux needs from one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellState {
    pub primary: PrimaryState,
    pub sec: SecondaryState,
    pub lam_l: f64,
    pub lam_g: f64,
    /// Liquid density `rho_l_std + R_s rho_g_std` (kg/m³).
    pub rho_l: f64,
    /// Gas density `C_v rho_g_std p_g` (kg/m³).
    pub rho_g: f64,
    /// Dissolved-hydrogen diffusion coefficient `Φ (1 - S_g) F/(R_s + F) D_l^h` (m²/s).
    pub diff: f64,
}

impl CellState {
    pub fn new(primary: PrimaryState, params: &Params) -> Result<Self> {
        let sec = invert_saturation(primary.p_l, primary.x, &params.consts, &params.medium)?;
        Ok(Self::from_secondary(primary, sec, params))
    }

    pub fn from_secondary(primary: PrimaryState, sec: SecondaryState, params: &Params) -> Self {
        let (lam_l, lam_g) = params.mobilities(sec.s_g);
        let fluid = &params.fluid;
        let c = &params.consts;
        CellState {
            primary,
            sec,
            lam_l,
            lam_g,
            rho_l: fluid.rho_l_std + sec.r_s * fluid.rho_g_std,
            rho_g: c.c_v * fluid.rho_g_std * sec.p_g,
            diff: params.medium.phi * (1.0 - sec.s_g) * c.f / (sec.r_s + c.f) * fluid.d_l_h,
        }
    }
}

/// Geometry of one face seen from its left cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceGeometry {
    pub area: f64,
    /// Distance between the two points where the states live (m).
    pub distance: f64,
    /// Unit normal pointing from left to right.
    pub normal: [f64; 2],
    /// Face permeability (m²).
    pub k: f64,
}

/// Normalized volumetric rates (m³/s) through a face, positive from left
/// to right.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FaceFlux {
    pub tot: f64,
    pub h: f64,
}

impl std::ops::Neg for FaceFlux {
    type Output = FaceFlux;
    fn neg(self) -> FaceFlux {
        FaceFlux {
            tot: -self.tot,
            h: -self.h,
        }
    }
}

pub fn harmonic_mean(a: f64, b: f64) -> f64 {
    if a + b == 0.0 {
        0.0
    } else {
        2.0 * a * b / (a + b)
    }
}

/// Two-point flux of the total and hydrogen equations.
///
/// Phase Darcy fluxes are upwinded on their own potential drop, which
/// includes gravity; everything a phase carries (mobility, dissolved ratio,
/// gas density) is taken from the donor cell. Dissolved-hydrogen diffusion
/// uses the arithmetic mean of the two cell coefficients and cancels out of
/// the total flux.
pub fn face_flux(
    left: &CellState,
    right: &CellState,
    geom: &FaceGeometry,
    params: &Params,
) -> FaceFlux {
    let g_n = params.fluid.gravity[0] * geom.normal[0] + params.fluid.gravity[1] * geom.normal[1];
    let d = geom.distance;
    let c = &params.consts;

    let dpot_l = (right.primary.p_l - left.primary.p_l) - 0.5 * (left.rho_l + right.rho_l) * g_n * d;
    let up_l = if dpot_l <= 0.0 { left } else { right };
    let q_l = -geom.k * up_l.lam_l * dpot_l / d;

    let dpot_g = (right.sec.p_g - left.sec.p_g) - 0.5 * (left.rho_g + right.rho_g) * g_n * d;
    let up_g = if dpot_g <= 0.0 { left } else { right };
    let q_g = -geom.k * up_g.lam_g * dpot_g / d;
    let gas_h = c.c_v * up_g.sec.p_g * q_g;

    let diffusion = -0.5 * (left.diff + right.diff) * (right.sec.r_s - left.sec.r_s) / d;

    FaceFlux {
        tot: geom.area * ((c.g + up_l.sec.r_s) * q_l + gas_h),
        h: geom.area * (up_l.sec.r_s * q_l + gas_h + diffusion),
    }
}
