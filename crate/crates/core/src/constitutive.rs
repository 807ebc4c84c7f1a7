//! Pointwise constitutive laws.
//!
//! Van Genuchten capillary pressure, van Genuchten–Mualem relative
//! permeabilities, the Henry/ideal-gas slopes that drive dissolution, the
//! Black-oil factors they induce, and the Henry–Raoult partial pressure
//! equilibrium. Everything here is a pure function of its inputs.

use crate::error::{Error, Result};

/// Margin kept between the gas saturation and the residual-liquid limit.
pub const SG_MARGIN: f64 = 1e-6;

/// Below this distance from the entry point the capillary derivative is
/// evaluated through its leading power-law term.
const PC_ASYMPTOTIC_BELOW: f64 = 1e-12;

/// Liquid relative permeability curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LiquidRelPerm {
    /// `sqrt(S_le) * (1 - (1 - S_le^(1/m))^m)^2`
    #[default]
    Mualem,
    /// `sqrt(S_le) * (1 - (1 - S_le^(1/m)))^2`, which collapses to
    /// `sqrt(S_le) * S_le^(2/m)`. Kept for comparison runs only.
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Capillarity {
    #[default]
    VanGenuchten,
    /// `p_c ≡ 0`; gas and liquid share one pressure.
    Zero,
}

/// Petrophysical parameters of a homogeneous isotropic medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumParams {
    /// Absolute permeability (m²).
    pub k: f64,
    /// Porosity.
    pub phi: f64,
    /// Van Genuchten pressure scale (Pa).
    pub p_r: f64,
    /// Van Genuchten exponent, `n > 1`.
    pub n: f64,
    /// Residual liquid saturation.
    pub s_lr: f64,
    /// Residual gas saturation.
    pub s_gr: f64,
    pub liquid_rel_perm: LiquidRelPerm,
    pub capillarity: Capillarity,
}

impl MediumParams {
    /// Clay-like host rock used by both benchmark scenarios.
    pub fn reference() -> Self {
        MediumParams {
            k: 5e-20,
            phi: 0.15,
            p_r: 2e6,
            n: 1.49,
            s_lr: 0.4,
            s_gr: 0.0,
            liquid_rel_perm: LiquidRelPerm::Mualem,
            capillarity: Capillarity::VanGenuchten,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::invalid("k", "permeability must be positive"));
        }
        if !(self.phi > 0.0 && self.phi <= 1.0) {
            return Err(Error::invalid("phi", "porosity must lie in (0, 1]"));
        }
        if !(self.p_r > 0.0 && self.p_r.is_finite()) {
            return Err(Error::invalid("p_r", "pressure scale must be positive"));
        }
        if !(self.n > 1.0 && self.n.is_finite()) {
            return Err(Error::invalid("n", "van Genuchten exponent must satisfy n > 1"));
        }
        if !(self.s_lr >= 0.0 && self.s_gr >= 0.0) {
            return Err(Error::invalid("s_lr", "residual saturations must be non-negative"));
        }
        if self.s_lr + self.s_gr >= 1.0 {
            return Err(Error::invalid("s_lr", "residual saturations must satisfy s_lr + s_gr < 1"));
        }
        Ok(())
    }

    /// `m = 1 - 1/n`.
    pub fn m(&self) -> f64 {
        1.0 - 1.0 / self.n
    }

    fn mobile_range(&self) -> f64 {
        1.0 - self.s_lr - self.s_gr
    }

    /// Largest admissible gas saturation.
    pub fn sg_max(&self) -> f64 {
        1.0 - self.s_lr - SG_MARGIN
    }

    /// Effective liquid saturation, clamped to `[0, 1]`.
    pub fn effective_saturation(&self, s_g: f64) -> f64 {
        ((1.0 - s_g - self.s_lr) / self.mobile_range()).clamp(0.0, 1.0)
    }

    /// `(ln S_le, 1 - S_le)` evaluated without cancellation near `S_le = 1`.
    fn log_effective_saturation(&self, s_g: f64) -> (f64, f64) {
        let u = ((s_g - self.s_gr) / self.mobile_range()).clamp(0.0, 1.0);
        let ln_sle = if u < 0.5 {
            (-u).ln_1p()
        } else {
            self.effective_saturation(s_g).ln()
        };
        (ln_sle, u)
    }

    fn check_capillary_range(&self, s_g: f64) -> Result<()> {
        if !(s_g >= 0.0) || s_g >= 1.0 - self.s_lr {
            return Err(Error::OutOfRange(format!(
                "capillary pressure undefined at S_g = {s_g} (liquid at residual {})",
                self.s_lr
            )));
        }
        Ok(())
    }

    /// Capillary pressure `p_c(S_g) = P_r (S_le^{-1/m} - 1)^{1/n}` (Pa).
    pub fn capillary_pressure(&self, s_g: f64) -> Result<f64> {
        self.check_capillary_range(s_g)?;
        if self.capillarity == Capillarity::Zero {
            return Ok(0.0);
        }
        let (ln_sle, u) = self.log_effective_saturation(s_g);
        if u == 0.0 {
            return Ok(0.0);
        }
        let w = (-ln_sle / self.m()).exp_m1();
        Ok(self.p_r * w.powf(1.0 / self.n))
    }

    /// `dp_c/dS_g` (Pa). Infinite at the entry point `S_g = S_gr`, zero on
    /// the flat part `S_g < S_gr`.
    pub fn capillary_pressure_deriv(&self, s_g: f64) -> Result<f64> {
        self.check_capillary_range(s_g)?;
        if self.capillarity == Capillarity::Zero {
            return Ok(0.0);
        }
        let m = self.m();
        let n = self.n;
        let scale = self.p_r / (n * m * self.mobile_range());
        let (ln_sle, u) = self.log_effective_saturation(s_g);
        if u == 0.0 {
            return Ok(if s_g < self.s_gr { 0.0 } else { f64::INFINITY });
        }
        if u < PC_ASYMPTOTIC_BELOW {
            // S_le^{-1/m} - 1 ~ u/m and S_le^{-1/m-1} ~ 1
            return Ok(scale * (u / m).powf(1.0 / n - 1.0));
        }
        let w = (-ln_sle / m).exp_m1();
        Ok(scale * w.powf(1.0 / n - 1.0) * (-(1.0 / m + 1.0) * ln_sle).exp())
    }

    /// Relative permeabilities `(kr_l, kr_g)`.
    pub fn rel_perms(&self, s_g: f64) -> (f64, f64) {
        let m = self.m();
        let s_le = self.effective_saturation(s_g);
        if s_le <= 0.0 {
            return (0.0, 1.0);
        }
        if s_le >= 1.0 {
            return (1.0, 0.0);
        }
        let (ln_sle, u) = self.log_effective_saturation(s_g);
        // 1 - S_le^{1/m}
        let one_minus = -(ln_sle / m).exp_m1();
        let kr_l = match self.liquid_rel_perm {
            // 1 - (1 - y)^m with y = S_le^{1/m}, kept accurate for small y
            LiquidRelPerm::Mualem => {
                let y = (ln_sle / m).exp();
                s_le.sqrt() * (m * (-y).ln_1p()).exp_m1().powi(2)
            }
            LiquidRelPerm::Printed => s_le.sqrt() * (2.0 * ln_sle / m).exp(),
        };
        let kr_g = u.sqrt() * one_minus.powf(2.0 * m);
        (kr_l.clamp(0.0, 1.0), kr_g.clamp(0.0, 1.0))
    }
}

/// Fluid constants. Temperature is fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidParams {
    /// Liquid viscosity (Pa·s).
    pub mu_l: f64,
    /// Gas viscosity (Pa·s).
    pub mu_g: f64,
    /// Diffusion coefficient of hydrogen in the liquid (m²/s).
    pub d_l_h: f64,
    /// Water molar mass (kg/mol).
    pub m_w: f64,
    /// Hydrogen molar mass (kg/mol).
    pub m_h: f64,
    /// Liquid density at standard conditions (kg/m³).
    pub rho_l_std: f64,
    /// Gas density at standard conditions (kg/m³).
    pub rho_g_std: f64,
    /// Henry constant (mol/Pa/m³).
    pub henry: f64,
    /// Temperature (K).
    pub temperature: f64,
    /// Universal gas constant (J/mol/K).
    pub r_gas: f64,
    /// Gravity acceleration in grid coordinates (m/s²).
    pub gravity: [f64; 2],
    /// Pure-water vapor pressure (Pa); zero without vaporization.
    pub p_vap_ref: f64,
}

impl FluidParams {
    /// Water/hydrogen at 303 K.
    pub fn reference() -> Self {
        FluidParams {
            mu_l: 1e-3,
            mu_g: 9e-6,
            d_l_h: 3e-9,
            m_w: 1e-2,
            m_h: 2e-3,
            rho_l_std: 1e3,
            rho_g_std: 8e-2,
            henry: 7.65e-6,
            temperature: 303.0,
            r_gas: 8.314,
            gravity: [0.0, 0.0],
            p_vap_ref: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive: [(&'static str, f64); 10] = [
            ("mu_l", self.mu_l),
            ("mu_g", self.mu_g),
            ("d_l_h", self.d_l_h),
            ("m_w", self.m_w),
            ("m_h", self.m_h),
            ("rho_l_std", self.rho_l_std),
            ("rho_g_std", self.rho_g_std),
            ("temperature", self.temperature),
            ("r_gas", self.r_gas),
            ("henry", self.henry.max(f64::MIN_POSITIVE)),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        if !(self.henry >= 0.0) {
            return Err(Error::invalid("henry", "Henry constant must be non-negative"));
        }
        if !(self.p_vap_ref >= 0.0) {
            return Err(Error::invalid("p_vap_ref", "vapor pressure must be non-negative"));
        }
        if self.gravity.iter().any(|g| !g.is_finite()) {
            return Err(Error::invalid("gravity", "gravity must be finite"));
        }
        Ok(())
    }

    /// Water diffusion coefficient in the liquid from `M^h D^h = M^w D^w`.
    pub fn d_l_w(&self) -> f64 {
        self.m_h * self.d_l_h / self.m_w
    }
}

/// Slopes and ratios computed once from the fluid constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    /// Henry slope `H M_h / rho_g_std` (1/Pa).
    pub c_h: f64,
    /// Ideal-gas slope `M_h / (R T rho_g_std)` (1/Pa).
    pub c_v: f64,
    /// `c_v - c_h` (1/Pa).
    pub c_delta: f64,
    /// Molar density ratio `M_h rho_l_std / (M_w rho_g_std)`.
    pub f: f64,
    /// Standard density ratio `rho_l_std / rho_g_std`.
    pub g: f64,
}

impl DerivedConstants {
    pub fn new(fluid: &FluidParams) -> Result<Self> {
        let c_h = fluid.henry * fluid.m_h / fluid.rho_g_std;
        let c_v = fluid.m_h / (fluid.r_gas * fluid.temperature * fluid.rho_g_std);
        if !(c_v > c_h) {
            return Err(Error::invalid(
                "henry",
                format!("ideal-gas slope C_v = {c_v:e} must exceed Henry slope C_h = {c_h:e}"),
            ));
        }
        Ok(DerivedConstants {
            c_h,
            c_v,
            c_delta: c_v - c_h,
            f: fluid.m_h * fluid.rho_l_std / (fluid.m_w * fluid.rho_g_std),
            g: fluid.rho_l_std / fluid.rho_g_std,
        })
    }
}

/// Validated medium, fluid, and derived constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub medium: MediumParams,
    pub fluid: FluidParams,
    pub consts: DerivedConstants,
}

impl Params {
    pub fn new(medium: MediumParams, fluid: FluidParams) -> Result<Self> {
        medium.validate()?;
        fluid.validate()?;
        let consts = DerivedConstants::new(&fluid)?;
        Ok(Params {
            medium,
            fluid,
            consts,
        })
    }

    pub fn reference() -> Self {
        Self::new(MediumParams::reference(), FluidParams::reference())
            .expect("reference parameters are valid")
    }

    /// Phase mobilities `(kr_l/mu_l, kr_g/mu_g)`.
    pub fn mobilities(&self, s_g: f64) -> (f64, f64) {
        let (kr_l, kr_g) = self.medium.rel_perms(s_g);
        (kr_l / self.fluid.mu_l, kr_g / self.fluid.mu_g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlackOilFactors {
    /// Solution gas/liquid ratio.
    pub r_s: f64,
    /// Gas formation volume factor.
    pub b_g: f64,
    /// Vapor water/gas ratio.
    pub r_v: f64,
}

/// Black-oil factors induced by Henry–Raoult equilibrium with constant
/// vapor pressure and incompressible water (`B_l ≡ 1`).
pub fn blackoil_factors(
    _p_l: f64,
    p_g: f64,
    fluid: &FluidParams,
    consts: &DerivedConstants,
) -> Result<BlackOilFactors> {
    let excess = p_g - fluid.p_vap_ref;
    if !(excess > 0.0) {
        return Err(Error::OutOfRange(format!(
            "gas pressure {p_g:e} Pa must exceed the vapor pressure {:e} Pa",
            fluid.p_vap_ref
        )));
    }
    let b_l = 1.0;
    Ok(BlackOilFactors {
        r_s: b_l * consts.c_h * excess,
        b_g: fluid.r_gas * fluid.temperature * fluid.rho_g_std / (fluid.m_h * excess),
        r_v: fluid.p_vap_ref / (consts.f * excess),
    })
}

/// Solves Henry + Raoult–Kelvin + Dalton for the partial pressures
/// `(p_g^w, p_g^h)` of water vapor and hydrogen in the gas phase.
///
/// `rho_l_w` is the water mass density in the liquid (kg/m³). The hydrogen
/// partial pressure is bracketed in `[0, p_g]` and bisected to `1e-10 p_g`.
pub fn equilibrium_partial_pressures(
    p_l: f64,
    p_g: f64,
    rho_l_w: f64,
    fluid: &FluidParams,
) -> Result<(f64, f64)> {
    let p_hat = fluid.p_vap_ref;
    if !(p_g >= p_hat) || !(rho_l_w > 0.0) {
        return Err(Error::OutOfRange(format!(
            "partial pressure equilibrium needs p_g >= {p_hat:e} and rho_l_w > 0, got p_g = {p_g:e}, rho_l_w = {rho_l_w:e}"
        )));
    }
    if p_hat == 0.0 {
        return Ok((0.0, p_g));
    }
    let rt = fluid.r_gas * fluid.temperature;
    let vapor = |p_h: f64| {
        let rho_l = rho_l_w + fluid.m_h * fluid.henry * p_h;
        p_hat * rho_l_w / (rho_l_w + fluid.m_w * fluid.henry * p_h)
            * (-fluid.m_w * (p_g - p_l) / (rt * rho_l)).exp()
    };
    // g(p_h) = vapor(p_h) + p_h - p_g, non-positive at 0 and non-negative at p_g
    let g = |p_h: f64| vapor(p_h) + p_h - p_g;
    let (mut lo, mut hi) = (0.0, p_g);
    let (g_lo, g_hi) = (g(lo), g(hi));
    if g_lo > 0.0 || g_hi < 0.0 {
        return Err(Error::NoBracket(format!(
            "hydrogen partial pressure: g(0) = {g_lo:e}, g(p_g) = {g_hi:e}"
        )));
    }
    let tol = 1e-10 * p_g;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if g(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p_h = 0.5 * (lo + hi);
    Ok((p_g - p_h, p_h))
}

/// Converts a hydrogen mass fraction to molar fractions `(X_h, X_w)`.
pub fn mass_to_molar_fractions(omega_h: f64, m_w: f64, m_h: f64) -> (f64, f64) {
    let x_h = if omega_h <= 0.0 {
        0.0
    } else {
        omega_h / (omega_h + (m_h / m_w) * (1.0 - omega_h))
    };
    (x_h, 1.0 - x_h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn reference_constants() {
        let c = DerivedConstants::new(&FluidParams::reference()).unwrap();
        assert!(rel(c.c_h, 1.9125e-7) < 1e-14);
        assert!(rel(c.c_v, 9.9243e-6) < 1e-4);
        assert!(rel(c.f, 2500.0) < 1e-14);
        assert!(rel(c.g, 12500.0) < 1e-14);
        assert_eq!(c.c_delta, c.c_v - c.c_h);
    }

    #[test]
    fn zero_henry_constant() {
        let mut fluid = FluidParams::reference();
        fluid.henry = 0.0;
        fluid.validate().unwrap();
        assert_eq!(DerivedConstants::new(&fluid).unwrap().c_h, 0.0);
    }

    #[test]
    fn rejects_henry_slope_above_gas_slope() {
        let mut fluid = FluidParams::reference();
        fluid.henry = 1.0;
        assert!(matches!(
            DerivedConstants::new(&fluid),
            Err(Error::InvalidParameter { name: "henry", .. })
        ));
    }

    #[test]
    fn effective_saturation_examples() {
        let m = MediumParams::reference();
        assert_eq!(m.effective_saturation(0.0), 1.0);
        assert!(m.effective_saturation(0.6).abs() < 1e-15);
        assert!((m.effective_saturation(0.3) - 0.5).abs() < 1e-15);
        assert_eq!(m.effective_saturation(0.9), 0.0);
    }

    #[test]
    fn capillary_pressure_examples() {
        let m = MediumParams::reference();
        assert_eq!(m.capillary_pressure(0.0).unwrap(), 0.0);
        assert!(rel(m.capillary_pressure(0.3).unwrap(), 7.545e6) < 1e-3);
        assert!(m.capillary_pressure_deriv(0.0).unwrap().is_infinite());
        assert!(m.capillary_pressure(0.6).is_err());
        assert!(m.capillary_pressure(-0.1).is_err());
    }

    #[test]
    fn capillary_derivative_power_law_near_entry() {
        let m = MediumParams::reference();
        let ds: Vec<f64> = [1e-3, 1e-4, 1e-5]
            .iter()
            .map(|&s| m.capillary_pressure_deriv(s).unwrap())
            .collect();
        assert!(ds[0] < ds[1] && ds[1] < ds[2]);
        // ratio per decade ~ 10^(1 - 1/n)
        let expect = 10f64.powf(1.0 - 1.0 / m.n);
        assert!(rel(ds[2] / ds[1], expect) < 1e-3);
    }

    #[test]
    fn asymptotic_branch_is_continuous() {
        let m = MediumParams::reference();
        let below = m.capillary_pressure_deriv(PC_ASYMPTOTIC_BELOW * 0.6 * 0.999999).unwrap();
        let above = m.capillary_pressure_deriv(PC_ASYMPTOTIC_BELOW * 0.6 * 1.000001).unwrap();
        assert!(rel(below, above) < 1e-5);
    }

    #[test]
    fn rel_perm_endpoints() {
        let m = MediumParams::reference();
        assert_eq!(m.rel_perms(0.0), (1.0, 0.0));
        assert_eq!(m.rel_perms(0.6), (0.0, 1.0));
        let (kl, kg) = m.rel_perms(0.3);
        assert!(rel(kl, 1.23e-3) < 5e-3, "kr_l = {kl}");
        assert!(kg > 0.6 && kg < 0.7, "kr_g = {kg}");
    }

    #[test]
    fn printed_liquid_curve_differs() {
        let mut m = MediumParams::reference();
        m.liquid_rel_perm = LiquidRelPerm::Printed;
        let (kl, _) = m.rel_perms(0.3);
        let expect = 0.5f64.sqrt() * 0.5f64.powf(2.0 / m.m());
        assert!(rel(kl, expect) < 1e-12);
    }

    #[test]
    fn zero_capillarity_medium() {
        let mut m = MediumParams::reference();
        m.capillarity = Capillarity::Zero;
        assert_eq!(m.capillary_pressure(0.3).unwrap(), 0.0);
        assert_eq!(m.capillary_pressure_deriv(0.0).unwrap(), 0.0);
    }

    #[test]
    fn medium_validation() {
        let mut m = MediumParams::reference();
        m.n = 1.0;
        assert!(matches!(m.validate(), Err(Error::InvalidParameter { name: "n", .. })));
        let mut m = MediumParams::reference();
        m.s_lr = 0.7;
        m.s_gr = 0.3;
        assert!(m.validate().is_err());
        let mut m = MediumParams::reference();
        m.phi = 0.0;
        assert!(m.validate().is_err());
    }

    #[test]
    fn blackoil_reduced_model() {
        let fluid = FluidParams::reference();
        let c = DerivedConstants::new(&fluid).unwrap();
        let f = blackoil_factors(1e6, 1e6, &fluid, &c).unwrap();
        assert!(rel(f.r_s, 0.19125) < 1e-14);
        assert!(rel(1.0 / f.b_g, 9.9243) < 1e-4);
        assert!(rel(1.0 / f.b_g, c.c_v * 1e6) < 1e-14);
        assert_eq!(f.r_v, 0.0);
    }

    #[test]
    fn blackoil_with_vapor() {
        let mut fluid = FluidParams::reference();
        fluid.p_vap_ref = 0.1e6;
        let c = DerivedConstants::new(&fluid).unwrap();
        let f = blackoil_factors(1.0e6, 1.1e6, &fluid, &c).unwrap();
        assert!(rel(f.r_v, 1e5 / (2500.0 * 1e6)) < 1e-14);
        assert!(rel(f.r_s, c.c_h * 1e6) < 1e-14);
        assert!(blackoil_factors(1e6, 0.05e6, &fluid, &c).is_err());
    }

    #[test]
    fn partial_pressures_without_vapor() {
        let fluid = FluidParams::reference();
        assert_eq!(equilibrium_partial_pressures(1e6, 2e6, 1e3, &fluid).unwrap(), (0.0, 2e6));
    }

    #[test]
    fn partial_pressures_raoult_limit() {
        let mut fluid = FluidParams::reference();
        fluid.henry = 0.0;
        fluid.p_vap_ref = 4246.0;
        let (pw, ph) = equilibrium_partial_pressures(1e6, 1e6, 1e3, &fluid).unwrap();
        assert!((pw - 4246.0).abs() <= 1e-9 * 1e6);
        assert!((ph - (1e6 - 4246.0)).abs() <= 1e-9 * 1e6);
    }

    #[test]
    fn partial_pressures_reject_low_gas_pressure() {
        let mut fluid = FluidParams::reference();
        fluid.p_vap_ref = 4246.0;
        assert!(equilibrium_partial_pressures(1e3, 1e3, 1e3, &fluid).is_err());
    }

    #[test]
    fn molar_fraction_examples() {
        assert_eq!(mass_to_molar_fractions(0.0, 1e-2, 2e-3), (0.0, 1.0));
        assert_eq!(mass_to_molar_fractions(1.0, 1e-2, 2e-3), (1.0, 0.0));
        let (xh, xw) = mass_to_molar_fractions(0.5, 1e-2, 2e-3);
        assert!(rel(xh, 0.5 / 0.6) < 1e-15);
        assert_eq!(xh + xw, 1.0);
    }

    #[test]
    fn binary_diffusion_identity() {
        let fluid = FluidParams::reference();
        let c = DerivedConstants::new(&fluid).unwrap();
        assert!(rel(fluid.m_h * fluid.d_l_h, fluid.m_w * fluid.d_l_w()) < 1e-15);
        assert!(rel(c.f * fluid.d_l_h, c.g * fluid.d_l_w()) < 1e-14);
    }
}
