//! The persistent-variable transform.
//!
//! Each cell carries `(p_l, X)` where `X` is the total hydrogen mass per
//! pore volume normalized by the standard gas density. It is well defined
//! whether or not a gas phase is present: in unsaturated cells `X` is the
//! dissolved ratio `R_s`, in saturated cells `X = a(S_g) (p_l + p_c(S_g))`
//! with `a(S) = C_h (1 - S) + C_v S`. This module inverts that relation and
//! provides the derivatives the flux coefficients need.

use crate::constitutive::{DerivedConstants, MediumParams};
use crate::error::{Error, Result};

const THRESHOLD_RTOL: f64 = 1e-14;
const PSI_RTOL: f64 = 1e-12;
const MAX_ROOT_ITER: usize = 400;
const POLISH_STEPS: usize = 5;

/// Primary unknowns of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PrimaryState {
    /// Liquid pressure (Pa).
    pub p_l: f64,
    /// Normalized total hydrogen mass density.
    pub x: f64,
}

impl PrimaryState {
    pub fn new(p_l: f64, x: f64) -> Self {
        PrimaryState { p_l, x }
    }
}

/// Quantities derived from a [`PrimaryState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondaryState {
    pub s_g: f64,
    /// Gas pressure `p_l + p_c(S_g)` (Pa).
    pub p_g: f64,
    /// Dissolved hydrogen ratio.
    pub r_s: f64,
    /// Whether the cell lies in the two-phase region.
    pub saturated: bool,
    /// Auxiliary function `N` (1 in the saturated no-capillarity limit).
    pub n_aux: f64,
    /// `∂S_g/∂p_l` (1/Pa).
    pub dsg_dpl: f64,
    /// `∂S_g/∂X`.
    pub dsg_dx: f64,
    /// `a(S_g) = C_h (1 - S_g) + C_v S_g` (1/Pa).
    pub a: f64,
}

impl SecondaryState {
    /// Indicator of the two-phase region as a number.
    pub fn chi(&self) -> f64 {
        if self.saturated {
            1.0
        } else {
            0.0
        }
    }

    fn unsaturated(p_g: f64, x: f64, consts: &DerivedConstants) -> Self {
        SecondaryState {
            s_g: 0.0,
            p_g,
            r_s: x.min(consts.c_h * p_g),
            saturated: false,
            n_aux: 0.0,
            dsg_dpl: 0.0,
            dsg_dx: 0.0,
            a: consts.c_h,
        }
    }
}

/// Branch selector for [`total_density_x`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseValue {
    Saturated { s_g: f64 },
    Unsaturated { r_s: f64 },
}

fn a_of(s_g: f64, consts: &DerivedConstants) -> f64 {
    consts.c_h * (1.0 - s_g) + consts.c_v * s_g
}

/// Forward map from a saturation (or dissolved ratio) to `X`.
pub fn total_density_x(
    p_l: f64,
    value: PhaseValue,
    consts: &DerivedConstants,
    medium: &MediumParams,
) -> Result<f64> {
    match value {
        PhaseValue::Saturated { s_g } => {
            if !(s_g > 0.0 && s_g < medium.sg_max()) {
                return Err(Error::OutOfRange(format!(
                    "saturated branch needs 0 < S_g < {}, got {s_g}",
                    medium.sg_max()
                )));
            }
            Ok(a_of(s_g, consts) * (p_l + medium.capillary_pressure(s_g)?))
        }
        PhaseValue::Unsaturated { r_s } => {
            let limit = consts.c_h * (p_l + medium.capillary_pressure(0.0)?);
            if !(r_s >= 0.0 && r_s <= limit * (1.0 + THRESHOLD_RTOL)) {
                return Err(Error::OutOfRange(format!(
                    "unsaturated branch needs 0 <= R_s <= {limit:e}, got {r_s:e}"
                )));
            }
            Ok(r_s)
        }
    }
}

fn check_primary(p_l: f64, x: f64) -> Result<()> {
    if !(p_l > 0.0) || !p_l.is_finite() {
        return Err(Error::OutOfRange(format!("liquid pressure must be positive, got {p_l:e}")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::OutOfRange(format!("X must be non-negative, got {x:e}")));
    }
    Ok(())
}

/// Whether `(p_l, X)` lies in the two-phase region, given `p_g` at `S_g = 0`.
fn is_saturated(x: f64, p_g0: f64, consts: &DerivedConstants) -> bool {
    let threshold = consts.c_h * p_g0;
    x > threshold + THRESHOLD_RTOL * x.max(threshold)
}

/// Recovers `S_g` and the derived quantities from `(p_l, X)`.
pub fn invert_saturation(
    p_l: f64,
    x: f64,
    consts: &DerivedConstants,
    medium: &MediumParams,
) -> Result<SecondaryState> {
    check_primary(p_l, x)?;
    let p_g0 = p_l + medium.capillary_pressure(0.0)?;
    if !is_saturated(x, p_g0, consts) {
        return Ok(SecondaryState::unsaturated(p_g0, x, consts));
    }

    let s_g = solve_saturation(p_l, x, consts, medium)?;
    let p_c = medium.capillary_pressure(s_g)?;
    let dpc = medium.capillary_pressure_deriv(s_g)?;
    let a = a_of(s_g, consts);
    let p_g = p_l + p_c;
    // An infinite dpc sends all three ratios to zero.
    let denom = consts.c_delta * x + a * a * dpc;
    Ok(SecondaryState {
        s_g,
        p_g,
        r_s: consts.c_h * p_g,
        saturated: true,
        n_aux: consts.c_delta * x / denom,
        dsg_dpl: -a * a / denom,
        dsg_dx: a / denom,
        a,
    })
}

/// Root of `psi(S) = a(S) (p_l + p_c(S)) - X` on `(0, S_g_max)`.
///
/// Safeguarded Newton: every iterate stays inside a shrinking sign-change
/// bracket and falls back to bisection when the Newton step leaves it.
fn solve_saturation(
    p_l: f64,
    x: f64,
    consts: &DerivedConstants,
    medium: &MediumParams,
) -> Result<f64> {
    let psi = |s: f64| -> Result<(f64, f64)> {
        let a = a_of(s, consts);
        let pc = medium.capillary_pressure(s)?;
        let dpc = medium.capillary_pressure_deriv(s)?;
        Ok((a * (p_l + pc) - x, consts.c_delta * (p_l + pc) + a * dpc))
    };

    let s_max = medium.sg_max();
    let (psi_max, _) = psi(s_max)?;
    if psi_max <= 0.0 {
        return Err(Error::LiquidDepletion {
            p_l,
            x,
            x_max: psi_max + x,
        });
    }
    let tol = PSI_RTOL * x.max(1.0);

    // p_c >= 0 puts the root at or below the zero-capillarity saturation.
    let s_nocap = (x / p_l - consts.c_h) / consts.c_delta;
    let mut lo = 0.0;
    let mut hi = s_max;
    if s_nocap > 0.0 && s_nocap < s_max {
        let (v, _) = psi(s_nocap)?;
        if v >= 0.0 {
            hi = s_nocap;
        } else {
            lo = s_nocap;
        }
    }

    let mut s = 0.5 * (lo + hi);
    let mut converged = false;
    for _ in 0..MAX_ROOT_ITER {
        let (v, dv) = psi(s)?;
        if v.abs() <= tol {
            converged = true;
            break;
        }
        if v > 0.0 {
            hi = s;
        } else {
            lo = s;
        }
        let newton = s - v / dv;
        s = if dv.is_finite() && dv > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * hi {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoBracket(format!(
            "saturation root at p_l = {p_l:e}, X = {x:e} not resolved in [{lo:e}, {hi:e}]"
        )));
    }

    let (mut v, _) = psi(s)?;
    for _ in 0..POLISH_STEPS {
        let (_, dv) = psi(s)?;
        if !(dv.is_finite() && dv > 0.0) {
            break;
        }
        let trial = s - v / dv;
        if !(trial > 0.0 && trial < s_max) || trial == s {
            break;
        }
        let (vt, _) = psi(trial)?;
        if vt.abs() >= v.abs() {
            break;
        }
        s = trial;
        v = vt;
    }
    Ok(s)
}

/// Closed-form inversion when capillary pressure is neglected (`p_g = p_l = p`).
pub fn secondary_state_nocap(
    p: f64,
    x: f64,
    consts: &DerivedConstants,
    sg_max: f64,
) -> Result<SecondaryState> {
    check_primary(p, x)?;
    if !is_saturated(x, p, consts) {
        return Ok(SecondaryState::unsaturated(p, x, consts));
    }
    let s_g = (x / p - consts.c_h) / consts.c_delta;
    if s_g >= sg_max {
        return Err(Error::LiquidDepletion {
            p_l: p,
            x,
            x_max: a_of(sg_max, consts) * p,
        });
    }
    Ok(SecondaryState {
        s_g,
        p_g: p,
        r_s: consts.c_h * p,
        saturated: true,
        n_aux: 1.0,
        dsg_dpl: -x / (consts.c_delta * p * p),
        dsg_dx: 1.0 / (consts.c_delta * p),
        a: a_of(s_g, consts),
    })
}
