use crate::discretization::{BoundaryCondition, Problem, Side};
use crate::error::{Error, Result};
use crate::statevars::PrimaryState;

use super::newton::{NewtonOptions, NewtonSolver};

/// Gas saturation above which a cell counts as two-phase.
pub const GAS_APPEARANCE_SG: f64 = 1e-9;
/// Relative rate threshold of the stationarity criterion.
pub const STATIONARITY_RATE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeStepControl {
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub grow_factor: f64,
    pub cut_factor: f64,
    pub target_newton_iters: usize,
    /// Largest change of `X` in any cell per step; `0` disables the limit.
    pub max_dx: f64,
    /// Largest change of `S_g` in any cell per step; `0` disables the limit.
    pub max_dsg: f64,
}

impl TimeStepControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt_min > 0.0 && self.dt_min <= self.dt_init && self.dt_init <= self.dt_max) {
            return Err(Error::invalid("time_step", "need 0 < dt_min <= dt_init <= dt_max"));
        }
        if !(self.grow_factor > 1.0 && self.cut_factor > 0.0 && self.cut_factor < 1.0) {
            return Err(Error::invalid("time_step", "need grow_factor > 1 > cut_factor > 0"));
        }
        if !(self.max_dx >= 0.0 && self.max_dsg >= 0.0) {
            return Err(Error::invalid("time_step", "change limits must be non-negative"));
        }
        Ok(())
    }

    /// Next step after an accepted one.
    fn next(&self, dt: f64, iterations: usize, dx: f64, dsg: f64) -> f64 {
        let mut factor = if iterations <= self.target_newton_iters {
            self.grow_factor
        } else {
            1.0
        };
        for (limit, change) in [(self.max_dx, dx), (self.max_dsg, dsg)] {
            if limit > 0.0 && change > 0.0 {
                factor = factor.min(limit / change);
            }
        }
        (dt * factor.clamp(self.cut_factor, self.grow_factor)).clamp(self.dt_min, self.dt_max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOptions {
    pub newton: NewtonOptions,
    pub time: TimeStepControl,
    pub t_end: f64,
    /// Snapshot times (s), ascending, each ≤ `t_end`.
    pub output_times: Vec<f64>,
}

impl SimulationOptions {
    pub fn validate(&self) -> Result<()> {
        self.newton.validate()?;
        self.time.validate()?;
        if !(self.t_end > 0.0) {
            return Err(Error::invalid("t_end", "end time must be positive"));
        }
        if self.output_times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("output_times", "output times must be strictly ascending"));
        }
        if self.output_times.iter().any(|&t| !(t > 0.0 && t <= self.t_end)) {
            return Err(Error::invalid("output_times", "output times must lie in (0, t_end]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub t: f64,
    pub dt: f64,
    pub max_p_l: f64,
    pub max_s_g: f64,
    /// Hydrogen in place (kg).
    pub hydrogen_mass: f64,
    pub newton_iterations: usize,
}

/// Cumulative hydrogen accounting (kg).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MassBalance {
    pub initial: f64,
    pub final_mass: f64,
    /// Mass added by volume sources and gas-inflow faces.
    pub injected: f64,
    /// Net mass leaving through the remaining boundary faces.
    pub outflow: f64,
}

impl MassBalance {
    /// `final - initial - (injected - outflow)`
    pub fn error(&self) -> f64 {
        self.final_mass - self.initial - (self.injected - self.outflow)
    }

    pub fn relative_error(&self) -> f64 {
        if self.injected == 0.0 {
            self.error().abs()
        } else {
            self.error().abs() / self.injected.abs()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunSummary {
    /// Gas appearance time (s).
    pub t1: Option<f64>,
    /// Time of the largest liquid pressure (s).
    pub t2: Option<f64>,
    /// Stationarity time (s).
    pub t3: Option<f64>,
    pub series: Vec<SeriesPoint>,
    pub mass_balance: MassBalance,
    pub steps: usize,
    pub rejected_steps: usize,
    pub newton_iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub state: Vec<PrimaryState>,
    pub s_g: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub summary: RunSummary,
    pub snapshots: Vec<Snapshot>,
    pub final_state: Vec<PrimaryState>,
}

fn inflow_rate(problem: &Problem) -> f64 {
    let grid = &problem.grid;
    Side::ALL
        .iter()
        .map(|&side| {
            let (area, _) = grid.face_metrics(side);
            problem
                .boundary
                .side(side)
                .iter()
                .map(|bc| match bc {
                    BoundaryCondition::InflowGas { q } => q * area,
                    _ => 0.0,
                })
                .sum::<f64>()
        })
        .sum()
}

/// Marches `initial` from 0 to `t_end` with adaptive implicit steps.
pub fn run_simulation(
    problem: &Problem,
    initial: Vec<PrimaryState>,
    opts: &SimulationOptions,
) -> Result<RunOutput> {
    opts.validate()?;
    if initial.len() != problem.n_cells() {
        return Err(Error::invalid("initial", "one initial state per cell is required"));
    }
    let rho = problem.params.fluid.rho_g_std;
    let ctl = opts.time;
    let mut newton = NewtonSolver::new(problem, opts.newton)?;
    let injection = problem.hydrogen_source_rate() + inflow_rate(problem);

    let mut states = problem.cell_states(&initial)?;
    let mut u = initial;
    let mut summary = RunSummary::default();
    let initial_mass = rho * problem.hydrogen_in_place(&u);
    summary.mass_balance.initial = initial_mass;
    let mut snapshots = Vec::with_capacity(opts.output_times.len());
    let mut next_output = 0;
    let mut best_p: Option<f64> = None;

    let mut t = 0.0;
    let mut dt = ctl.dt_init;
    while t < opts.t_end {
        let target = opts
            .output_times
            .get(next_output)
            .copied()
            .unwrap_or(opts.t_end)
            .min(opts.t_end);
        let remaining = target - t;
        let mut step = dt.min(remaining);
        if remaining > step && remaining < 2.0 * step {
            step = 0.5 * remaining;
        }

        let report = match newton.solve(problem, &u, step) {
            Ok(rep) => rep,
            Err(e @ (Error::NewtonDivergence(_) | Error::LiquidDepletion { .. } | Error::SingularMatrix(_)
            | Error::OutOfRange(_))) => {
                summary.rejected_steps += 1;
                if step <= ctl.dt_min {
                    let cause = e.to_string();
                    return Err(Error::TimeStepTooSmall {
                        t,
                        dt_min: ctl.dt_min,
                        cause,
                    });
                }
                dt = (step * ctl.cut_factor).max(ctl.dt_min);
                continue;
            }
            Err(e) => return Err(e),
        };

        let new_states = problem.cell_states(&report.state)?;
        let outflow = problem.boundary_hydrogen_outflow(&new_states)? + inflow_rate(problem);
        summary.mass_balance.injected += rho * injection * step;
        summary.mass_balance.outflow += rho * outflow * step;

        let mut dx: f64 = 0.0;
        let mut dsg: f64 = 0.0;
        for (a, b) in states.iter().zip(&new_states) {
            dx = dx.max((b.primary.x - a.primary.x).abs());
            dsg = dsg.max((b.sec.s_g - a.sec.s_g).abs());
        }
        let t_new = if step == remaining { target } else { t + step };

        let max_p_l = new_states.iter().fold(f64::NEG_INFINITY, |m, s| m.max(s.primary.p_l));
        let max_s_g = new_states.iter().fold(0.0_f64, |m, s| m.max(s.sec.s_g));
        let max_x = new_states.iter().fold(0.0_f64, |m, s| m.max(s.primary.x));
        if summary.t1.is_none() && max_s_g > GAS_APPEARANCE_SG {
            summary.t1 = Some(t_new);
        }
        if best_p.map_or(true, |b| max_p_l > b) {
            best_p = Some(max_p_l);
            summary.t2 = Some(t_new);
        }
        if summary.t3.is_none() && dx / step <= STATIONARITY_RATE * max_x / opts.t_end {
            summary.t3 = Some(t_new);
        }
        let mass = rho * problem.hydrogen_in_place(&report.state);
        summary.series.push(SeriesPoint {
            t: t_new,
            dt: step,
            max_p_l,
            max_s_g,
            hydrogen_mass: mass,
            newton_iterations: report.iterations,
        });
        summary.steps += 1;
        summary.newton_iterations += report.iterations;

        t = t_new;
        u = report.state;
        states = new_states;
        if next_output < opts.output_times.len() && t == opts.output_times[next_output] {
            snapshots.push(Snapshot {
                time: t,
                state: u.clone(),
                s_g: states.iter().map(|s| s.sec.s_g).collect(),
            });
            next_output += 1;
        }
        dt = ctl.next(dt.max(step), report.iterations, dx, dsg);
    }
    summary.mass_balance.final_mass = rho * problem.hydrogen_in_place(&u);
    Ok(RunOutput {
        summary,
        snapshots,
        final_state: u,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::Params;
    use crate::discretization::{BoundarySpec, SourceField, StructuredGrid};

    fn control() -> TimeStepControl {
        TimeStepControl {
            dt_init: 1e8,
            dt_min: 1.0,
            dt_max: 1e10,
            grow_factor: 1.5,
            cut_factor: 0.5,
            target_newton_iters: 6,
            max_dx: 0.02,
            max_dsg: 0.02,
        }
    }

    #[test]
    fn quiescent_run() {
        let grid = StructuredGrid::new(5, 1, [0.0, 0.0], [5.0, 1.0]).unwrap();
        let imp = BoundaryCondition::Impervious;
        let bc = BoundarySpec::by_side(&grid, imp, imp, imp, imp);
        let p = Problem::new(grid, Params::reference(), bc, SourceField::zero(5)).unwrap();
        let u = vec![PrimaryState::new(1e6, 0.0); 5];
        let opts = SimulationOptions {
            newton: NewtonOptions::default(),
            time: control(),
            t_end: 1e9,
            output_times: vec![3e8, 1e9],
        };
        let out = run_simulation(&p, u.clone(), &opts).unwrap();
        assert_eq!(out.summary.t1, None);
        assert_eq!(out.summary.t3, Some(out.summary.series[0].t));
        assert_eq!(out.final_state, u);
        assert_eq!(out.snapshots.iter().map(|s| s.time).collect::<Vec<_>>(), vec![3e8, 1e9]);
    }

    #[test]
    fn dt_stays_in_bounds() {
        let c = control();
        assert_eq!(c.next(9e9, 1, 0.0, 0.0), 1e10);
        assert_eq!(c.next(1.5, 1, 1.0, 0.0), 1.0);
        assert_eq!(c.next(1e6, 1, 0.04, 0.0), 5e5);
    }
}
