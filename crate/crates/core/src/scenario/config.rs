use serde::{Deserialize, Serialize};

use crate::constitutive::{Capillarity, FluidParams, LiquidRelPerm, MediumParams, Params};
use crate::discretization::{BoundaryCondition, BoundarySpec, Problem, SourceField, StructuredGrid};
use crate::error::{Error, Result};
use crate::solver::{NewtonOptions, SimulationOptions, TimeStepControl};
use crate::statevars::PrimaryState;

use super::units::*;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub grid: GridConfig,
    #[serde(default)]
    pub medium: MediumConfig,
    #[serde(default)]
    pub fluid: FluidConfig,
    pub boundary: BoundaryConfig,
    #[serde(default)]
    pub sources: Vec<SourceRegion>,
    pub initial: InitialConfig,
    pub time: TimeConfig,
    #[serde(default)]
    pub newton: NewtonConfig,
    #[serde(default)]
    pub flags: Flags,
}

/// `ny = 1` gives a one-dimensional strip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub nx: usize,
    pub ny: usize,
    pub x_min: Quantity<Length>,
    pub x_max: Quantity<Length>,
    pub y_min: Quantity<Length>,
    pub y_max: Quantity<Length>,
    /// Height of the line cut written to the records.
    #[serde(default = "zero_length")]
    pub line_cut_y: Quantity<Length>,
}

fn zero_length() -> Quantity<Length> {
    Quantity::si(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumConfig {
    pub permeability: Quantity<Permeability>,
    pub porosity: f64,
    pub p_r: Quantity<Pressure>,
    pub n: f64,
    pub s_lr: f64,
    pub s_gr: f64,
}

impl Default for MediumConfig {
    fn default() -> Self {
        let m = MediumParams::reference();
        MediumConfig {
            permeability: Quantity::si(m.k),
            porosity: m.phi,
            p_r: Quantity::si(m.p_r),
            n: m.n,
            s_lr: m.s_lr,
            s_gr: m.s_gr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidConfig {
    pub mu_l: Quantity<Viscosity>,
    pub mu_g: Quantity<Viscosity>,
    pub d_l_h: Quantity<Diffusivity>,
    pub m_w: Quantity<MolarMass>,
    pub m_h: Quantity<MolarMass>,
    pub rho_l_std: Quantity<Density>,
    pub rho_g_std: Quantity<Density>,
    pub henry: Quantity<HenryConstant>,
    pub temperature: Quantity<Temperature>,
    pub r_gas: Quantity<GasConstant>,
    /// Magnitude, acting along `-y` when `flags.gravity_on` is set.
    pub gravity: Quantity<Acceleration>,
}

impl Default for FluidConfig {
    fn default() -> Self {
        let f = FluidParams::reference();
        FluidConfig {
            mu_l: Quantity::si(f.mu_l),
            mu_g: Quantity::si(f.mu_g),
            d_l_h: Quantity::si(f.d_l_h),
            m_w: Quantity::si(f.m_w),
            m_h: Quantity::si(f.m_h),
            rho_l_std: Quantity::si(f.rho_l_std),
            rho_g_std: Quantity::si(f.rho_g_std),
            henry: Quantity::si(f.henry),
            temperature: Quantity::si(f.temperature),
            r_gas: Quantity::si(f.r_gas),
            gravity: Quantity::si(9.81),
        }
    }
}

/// Condition applied along a whole side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SideCondition {
    Impervious,
    /// Normalized hydrogen injection rate `Q_d^h`.
    InflowGas { q: Quantity<Velocity> },
    Outflow { p_l: Quantity<Pressure>, x: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    pub west: SideCondition,
    pub east: SideCondition,
    pub south: SideCondition,
    pub north: SideCondition,
}

/// Constant mass sources on the cells whose centers lie in a box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceRegion {
    pub x_min: Quantity<Length>,
    pub x_max: Quantity<Length>,
    pub y_min: Quantity<Length>,
    pub y_max: Quantity<Length>,
    pub hydrogen: Quantity<MassRate>,
    #[serde(default = "zero_rate")]
    pub water: Quantity<MassRate>,
}

fn zero_rate() -> Quantity<MassRate> {
    Quantity::si(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub p_l: Quantity<Pressure>,
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_end: Quantity<Time>,
    pub output_times: Vec<Quantity<Time>>,
    pub dt_init: Quantity<Time>,
    pub dt_min: Quantity<Time>,
    pub dt_max: Quantity<Time>,
    #[serde(default = "default_grow")]
    pub grow_factor: f64,
    #[serde(default = "default_cut")]
    pub cut_factor: f64,
    #[serde(default = "default_target")]
    pub target_newton_iters: usize,
    /// Per-step change limit on `X`; 0 disables it.
    #[serde(default)]
    pub max_dx: f64,
    /// Per-step change limit on `S_g`; 0 disables it.
    #[serde(default)]
    pub max_dsg: f64,
}

fn default_grow() -> f64 {
    1.5
}
fn default_cut() -> f64 {
    0.5
}
fn default_target() -> usize {
    6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewtonConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iter: usize,
    pub fd_eps: f64,
    pub damping: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        let n = NewtonOptions::default();
        NewtonConfig {
            abs_tol: n.abs_tol,
            rel_tol: n.rel_tol,
            max_iter: n.max_iter,
            fd_eps: n.fd_eps,
            damping: n.damping,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Flags {
    pub use_printed_krl: bool,
    pub no_capillarity: bool,
    pub gravity_on: bool,
    /// Outflow sides keep `p_l` but take a zero normal gradient of `X`.
    pub outflow_zero_gradient: bool,
}

/// A configuration turned into solver inputs.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub problem: Problem,
    pub initial: Vec<PrimaryState>,
    pub options: SimulationOptions,
    /// Cells along the line cut, west to east.
    pub line_cut: Vec<usize>,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn params(&self) -> Result<Params> {
        let m = &self.medium;
        let f = &self.fluid;
        let medium = MediumParams {
            k: m.permeability.value(),
            phi: m.porosity,
            p_r: m.p_r.value(),
            n: m.n,
            s_lr: m.s_lr,
            s_gr: m.s_gr,
            liquid_rel_perm: if self.flags.use_printed_krl {
                LiquidRelPerm::Printed
            } else {
                LiquidRelPerm::Mualem
            },
            capillarity: if self.flags.no_capillarity {
                Capillarity::Zero
            } else {
                Capillarity::VanGenuchten
            },
        };
        let fluid = FluidParams {
            mu_l: f.mu_l.value(),
            mu_g: f.mu_g.value(),
            d_l_h: f.d_l_h.value(),
            m_w: f.m_w.value(),
            m_h: f.m_h.value(),
            rho_l_std: f.rho_l_std.value(),
            rho_g_std: f.rho_g_std.value(),
            henry: f.henry.value(),
            temperature: f.temperature.value(),
            r_gas: f.r_gas.value(),
            gravity: if self.flags.gravity_on {
                [0.0, -f.gravity.value()]
            } else {
                [0.0, 0.0]
            },
            p_vap_ref: 0.0,
        };
        Params::new(medium, fluid)
    }

    fn grid(&self) -> Result<StructuredGrid> {
        let g = &self.grid;
        let (x0, x1) = (g.x_min.value(), g.x_max.value());
        let (y0, y1) = (g.y_min.value(), g.y_max.value());
        StructuredGrid::new(g.nx, g.ny, [x0, y0], [x1 - x0, y1 - y0])
    }

    fn side(&self, c: SideCondition) -> Result<BoundaryCondition> {
        Ok(match c {
            SideCondition::Impervious => BoundaryCondition::Impervious,
            SideCondition::InflowGas { q } => BoundaryCondition::InflowGas { q: q.value() },
            SideCondition::Outflow { p_l, x } => {
                if !(p_l.value() > 0.0) || !(x >= 0.0) {
                    return Err(Error::invalid("boundary", "outflow needs p_l > 0 and x >= 0"));
                }
                if self.flags.outflow_zero_gradient {
                    BoundaryCondition::OutflowZeroGradient { p_l: p_l.value() }
                } else {
                    BoundaryCondition::OutflowDirichlet { p_l: p_l.value(), x }
                }
            }
        })
    }

    pub fn time_options(&self) -> Result<SimulationOptions> {
        let t = &self.time;
        let n = &self.newton;
        let opts = SimulationOptions {
            newton: NewtonOptions {
                abs_tol: n.abs_tol,
                rel_tol: n.rel_tol,
                max_iter: n.max_iter,
                fd_eps: n.fd_eps,
                damping: n.damping,
                ..NewtonOptions::default()
            },
            time: TimeStepControl {
                dt_init: t.dt_init.value(),
                dt_min: t.dt_min.value(),
                dt_max: t.dt_max.value(),
                grow_factor: t.grow_factor,
                cut_factor: t.cut_factor,
                target_newton_iters: t.target_newton_iters,
                max_dx: t.max_dx,
                max_dsg: t.max_dsg,
            },
            t_end: t.t_end.value(),
            output_times: t.output_times.iter().map(|q| q.value()).collect(),
        };
        opts.validate()?;
        Ok(opts)
    }

    /// Checks every invariant and builds the solver inputs.
    pub fn build(&self) -> Result<Scenario> {
        let params = self.params()?;
        let grid = self.grid()?;
        let b = &self.boundary;
        let boundary = BoundarySpec::by_side(
            &grid,
            self.side(b.west)?,
            self.side(b.east)?,
            self.side(b.south)?,
            self.side(b.north)?,
        );

        let n = grid.n_cells();
        let mut sources = SourceField::zero(n);
        let (lo, hi) = (grid.origin, [grid.origin[0] + grid.size[0], grid.origin[1] + grid.size[1]]);
        for (k, s) in self.sources.iter().enumerate() {
            let (a, b) = ([s.x_min.value(), s.y_min.value()], [s.x_max.value(), s.y_max.value()]);
            if !(a[0] < b[0] && a[1] < b[1]) {
                return Err(Error::Config(format!("source region {k} is empty")));
            }
            if a[0] < lo[0] || a[1] < lo[1] || b[0] > hi[0] || b[1] > hi[1] {
                return Err(Error::Config(format!("source region {k} extends outside the domain")));
            }
            let cells = grid.cells_in_box(a, b);
            if cells.is_empty() {
                return Err(Error::Config(format!("source region {k} contains no cell center")));
            }
            for c in cells {
                sources.hydrogen[c] += s.hydrogen.value() / params.fluid.rho_g_std;
                sources.water[c] += s.water.value() / params.fluid.rho_l_std;
            }
        }

        let y_cut = self.grid.line_cut_y.value();
        if !(y_cut >= lo[1] && y_cut <= hi[1]) {
            return Err(Error::Config("line_cut_y lies outside the domain".into()));
        }
        let line_cut = grid.line_cut(y_cut);

        let init = PrimaryState::new(self.initial.p_l.value(), self.initial.x);
        crate::statevars::invert_saturation(init.p_l, init.x, &params.consts, &params.medium)?;
        let options = self.time_options()?;
        let problem = Problem::new(grid, params, boundary, sources)?;
        Ok(Scenario {
            name: self.name.clone(),
            initial: vec![init; problem.n_cells()],
            problem,
            options,
            line_cut,
        })
    }
}
