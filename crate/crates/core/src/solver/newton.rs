use crate::discretization::{CellState, Problem, Side, Storage};
use crate::error::{Error, Result};
use crate::statevars::PrimaryState;

use super::linear::{LinearSolver, LinearSolverKind, SparseMatrix};

/// Pressure scale used in FD steps and in column scaling (Pa).
const P_SCALE: f64 = 1e3;
/// Scale of `X` below which FD steps stop shrinking.
const X_SCALE: f64 = 1e-3;
/// Column scale of the pressure unknowns.
const P_COLUMN: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Absolute tolerance on the scaled residual.
    pub abs_tol: f64,
    /// Tolerance relative to the residual at the initial guess.
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Relative finite-difference step.
    pub fd_eps: f64,
    /// Backtracking factor of the line search.
    pub damping: f64,
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            abs_tol: 1e-9,
            rel_tol: 1e-12,
            max_iter: 12,
            fd_eps: 1e-7,
            damping: 0.5,
            max_halvings: 8,
        }
    }
}

impl NewtonOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::invalid("newton", "tolerances must be positive"));
        }
        if self.max_iter < 1 {
            return Err(Error::invalid("newton", "max_iter must be at least 1"));
        }
        if !(self.fd_eps > 0.0 && self.fd_eps < 1e-2) {
            return Err(Error::invalid("newton", "fd_eps must lie in (0, 1e-2)"));
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(Error::invalid("newton", "damping must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonReport {
    pub state: Vec<PrimaryState>,
    pub iterations: usize,
    /// Final scaled residual norm.
    pub residual_norm: f64,
}

/// Row scaling that makes the residual dimensionless: `dt / (Φ V)` on the
/// hydrogen rows, with an extra `1/G` on the total rows.
pub fn residual_scaling(problem: &Problem, dt: f64) -> Vec<f64> {
    let pv = problem.params.medium.phi * problem.grid.cell_volume();
    let s = dt / pv;
    let g = problem.params.consts.g;
    (0..problem.n_cells()).flat_map(|_| [s / g, s]).collect()
}

pub fn scaled_norm(r: &[f64], scale: &[f64]) -> f64 {
    r.iter().zip(scale).fold(0.0, |m, (v, s)| m.max((v * s).abs()))
}

/// Cell colors such that no two cells of one color share a neighbour.
pub fn cell_coloring(problem: &Problem) -> Vec<Vec<usize>> {
    let grid = &problem.grid;
    let (n_colors, color): (usize, Box<dyn Fn(usize, usize) -> usize>) = if grid.ny == 1 {
        (3, Box::new(|i, _| i % 3))
    } else if grid.nx == 1 {
        (3, Box::new(|_, j| j % 3))
    } else {
        (5, Box::new(|i, j| (i + 2 * j) % 5))
    };
    let mut colors = vec![Vec::new(); n_colors];
    for c in 0..grid.n_cells() {
        let (i, j) = grid.ij(c);
        colors[color(i, j)].push(c);
    }
    colors.retain(|v| !v.is_empty());
    colors
}

fn stencil(problem: &Problem, c: usize) -> impl Iterator<Item = usize> + '_ {
    std::iter::once(c).chain(Side::ALL.into_iter().filter_map(move |s| problem.grid.neighbor(c, s)))
}

/// Perturbed copy of `u` in component `k` (0: `p_l`, 1: `X`).
///
/// The sign keeps the cell on its current phase branch: saturated cells move
/// towards more gas, unsaturated ones towards less.
fn perturb(u: PrimaryState, k: usize, saturated: bool, fd_eps: f64) -> (PrimaryState, f64) {
    let mut v = u;
    let h = if k == 0 {
        let h = fd_eps * u.p_l.abs().max(P_SCALE);
        if saturated {
            -h
        } else {
            h
        }
    } else {
        let h = fd_eps * u.x.abs().max(X_SCALE);
        if saturated || u.x < h {
            h
        } else {
            -h
        }
    };
    if k == 0 {
        v.p_l += h;
    } else {
        v.x += h;
    }
    (v, h)
}

/// Finite-difference Jacobian of the raw residual, one column group per color.
///
/// Columns are interleaved `(p_l, X)` per cell like the residual rows.
pub fn fd_jacobian(
    problem: &Problem,
    states: &[CellState],
    old: &[Storage],
    dt: f64,
    base: &[f64],
    colors: &[Vec<usize>],
    fd_eps: f64,
) -> Result<SparseMatrix> {
    let n = states.len();
    let mut jac = SparseMatrix::with_capacity(2 * n, 20 * n);
    let mut work = states.to_vec();
    let mut steps = vec![0.0; n];
    for color in colors {
        for k in 0..2 {
            for &c in color {
                let s = &states[c];
                let (v, h) = perturb(s.primary, k, s.sec.saturated, fd_eps);
                work[c] = match CellState::new(v, &problem.params) {
                    Ok(st) => {
                        steps[c] = h;
                        st
                    }
                    Err(_) => {
                        // flip to the other side, e.g. at the depletion limit
                        let mut w = s.primary;
                        if k == 0 {
                            w.p_l -= h;
                        } else {
                            w.x = (w.x - h).max(0.0);
                        }
                        steps[c] = if k == 0 { w.p_l - s.primary.p_l } else { w.x - s.primary.x };
                        CellState::new(w, &problem.params)?
                    }
                };
            }
            for &c in color {
                for r in stencil(problem, c) {
                    let res = problem.cell_residual(r, &work, old, dt)?;
                    for (comp, val) in res.iter().enumerate() {
                        let d = (val - base[2 * r + comp]) / steps[c];
                        jac.push(2 * r + comp, 2 * c + k, d);
                    }
                }
            }
            for &c in color {
                work[c] = states[c];
            }
        }
    }
    Ok(jac)
}

/// Newton solver for one implicit time step, reusing its linear solver
/// (and the sparse symbolic factorization) across calls.
#[derive(Debug)]
pub struct NewtonSolver {
    pub opts: NewtonOptions,
    linear: LinearSolver,
    colors: Vec<Vec<usize>>,
}

impl NewtonSolver {
    pub fn new(problem: &Problem, opts: NewtonOptions) -> Result<Self> {
        opts.validate()?;
        let kind = if problem.grid.dimension() == 1 || problem.grid.nx == 1 {
            LinearSolverKind::Banded
        } else {
            LinearSolverKind::Sparse
        };
        Ok(NewtonSolver {
            opts,
            linear: LinearSolver::new(kind),
            colors: cell_coloring(problem),
        })
    }

    /// Solves `R(u) = 0` for the state after one step of length `dt`,
    /// starting from `state_old`.
    pub fn solve(
        &mut self,
        problem: &Problem,
        state_old: &[PrimaryState],
        dt: f64,
    ) -> Result<NewtonReport> {
        if !(dt > 0.0) {
            return Err(Error::invalid("dt", "time step must be positive"));
        }
        let opts = self.opts;
        let n = problem.n_cells();
        let scale = residual_scaling(problem, dt);
        let col_scale: Vec<f64> = (0..n).flat_map(|_| [P_COLUMN, 1.0]).collect();

        let old_states = problem.cell_states(state_old)?;
        let old = problem.storage(&old_states);
        let mut u = state_old.to_vec();
        let mut states = old_states;
        let mut r = problem.residual_from_states(&states, &old, dt)?;
        let mut norm = scaled_norm(&r, &scale);
        let tol = opts.abs_tol.max(opts.rel_tol * norm);
        if norm <= tol {
            return Ok(NewtonReport {
                state: u,
                iterations: 0,
                residual_norm: norm,
            });
        }

        for it in 1..=opts.max_iter {
            let mut jac = fd_jacobian(problem, &states, &old, dt, &r, &self.colors, opts.fd_eps)?;
            jac.scale(&scale, &col_scale);
            // e.g. the pressure level of a closed single-phase region
            jac.fix_empty_columns();
            let rhs: Vec<f64> = r.iter().zip(&scale).map(|(v, s)| v * s).collect();
            let y = self.linear.solve(&jac, &rhs)?;
            let delta: Vec<f64> = y.iter().zip(&col_scale).map(|(v, s)| v * s).collect();

            let mut lambda = 1.0;
            let mut accepted = None;
            let mut last_err = None;
            for _ in 0..=opts.max_halvings {
                let trial: Vec<PrimaryState> = u
                    .iter()
                    .enumerate()
                    .map(|(c, s)| PrimaryState {
                        p_l: s.p_l - lambda * delta[2 * c],
                        x: (s.x - lambda * delta[2 * c + 1]).max(0.0),
                    })
                    .collect();
                let attempt = if trial.iter().all(|s| s.p_l > 0.0 && s.p_l.is_finite() && s.x.is_finite()) {
                    problem.cell_states(&trial).and_then(|st| {
                        let rt = problem.residual_from_states(&st, &old, dt)?;
                        Ok((st, rt))
                    })
                } else {
                    Err(Error::OutOfRange("non-positive liquid pressure in trial state".into()))
                };
                match attempt {
                    Ok((st, rt)) => {
                        let nt = scaled_norm(&rt, &scale);
                        if nt < norm {
                            accepted = Some((trial, st, rt, nt));
                            break;
                        }
                    }
                    Err(e) => last_err = Some(e),
                }
                lambda *= opts.damping;
            }
            let Some((trial, st, rt, nt)) = accepted else {
                return Err(match last_err {
                    Some(e @ Error::LiquidDepletion { .. }) => e,
                    _ => Error::NewtonDivergence(format!(
                        "line search failed at iteration {it} (residual {norm:e})"
                    )),
                });
            };
            u = trial;
            states = st;
            r = rt;
            norm = nt;
            if norm <= tol {
                return Ok(NewtonReport {
                    state: u,
                    iterations: it,
                    residual_norm: norm,
                });
            }
        }
        Err(Error::NewtonDivergence(format!(
            "no convergence in {} iterations (residual {norm:e}, tolerance {tol:e})",
            opts.max_iter
        )))
    }
}

/// One implicit step with a fresh solver.
pub fn newton_solve(
    problem: &Problem,
    state_old: &[PrimaryState],
    dt: f64,
    opts: &NewtonOptions,
) -> Result<NewtonReport> {
    NewtonSolver::new(problem, *opts)?.solve(problem, state_old, dt)
}
