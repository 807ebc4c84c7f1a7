//! Cell-centered finite volumes on a structured grid, implicit Euler in time.
//!
//! Per cell the residual has two components, the total (water + hydrogen)
//! balance and the hydrogen balance:
//!
//! ```text
//! R_tot = Φ V [(X - G S_g)^{n+1} - (X - G S_g)^n] / dt + Σ_faces phi_tot·n A - V (G s_w + s_h)
//! R_h   = Φ V [X^{n+1} - X^n] / dt                     + Σ_faces phi_h·n A   - V s_h
//! ```
//!
//! where `s_w`, `s_h` are the normalized source rates. Fluxes are evaluated
//! at the new state.

mod flux;
mod grid;

pub use flux::{face_flux, harmonic_mean, CellState, FaceFlux, FaceGeometry};
pub use grid::{Side, StructuredGrid};

use crate::constitutive::Params;
use crate::error::{Error, Result};
use crate::statevars::PrimaryState;

/// Condition on one boundary face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    /// No flux of either component.
    Impervious,
    /// Pure gas injection: `phi_tot·ν = phi_h·ν = -q` with `q` the normalized
    /// hydrogen rate (m/s), water flux zero.
    InflowGas { q: f64 },
    /// Prescribed liquid pressure and hydrogen density at the face.
    OutflowDirichlet { p_l: f64, x: f64 },
    /// Prescribed liquid pressure, zero normal gradient of `X`.
    OutflowZeroGradient { p_l: f64 },
}

/// One condition per boundary face, listed along each side.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySpec {
    pub west: Vec<BoundaryCondition>,
    pub east: Vec<BoundaryCondition>,
    pub south: Vec<BoundaryCondition>,
    pub north: Vec<BoundaryCondition>,
}

impl BoundarySpec {
    /// Same condition along each whole side.
    pub fn by_side(
        grid: &StructuredGrid,
        west: BoundaryCondition,
        east: BoundaryCondition,
        south: BoundaryCondition,
        north: BoundaryCondition,
    ) -> Self {
        BoundarySpec {
            west: vec![west; grid.ny],
            east: vec![east; grid.ny],
            south: vec![south; grid.nx],
            north: vec![north; grid.nx],
        }
    }

    pub fn impervious(grid: &StructuredGrid) -> Self {
        let imp = BoundaryCondition::Impervious;
        Self::by_side(grid, imp, imp, imp, imp)
    }

    pub fn side(&self, side: Side) -> &[BoundaryCondition] {
        match side {
            Side::West => &self.west,
            Side::East => &self.east,
            Side::South => &self.south,
            Side::North => &self.north,
        }
    }

    fn validate(&self, grid: &StructuredGrid) -> Result<()> {
        let ok = self.west.len() == grid.ny
            && self.east.len() == grid.ny
            && self.south.len() == grid.nx
            && self.north.len() == grid.nx;
        if !ok {
            return Err(Error::invalid("boundary", "one condition per boundary face is required"));
        }
        for bc in Side::ALL.iter().flat_map(|&s| self.side(s)) {
            match *bc {
                BoundaryCondition::InflowGas { q } if !q.is_finite() => {
                    return Err(Error::invalid("boundary", "inflow rate must be finite"));
                }
                BoundaryCondition::OutflowDirichlet { p_l, x } if !(p_l > 0.0 && x >= 0.0) => {
                    return Err(Error::invalid("boundary", "outflow needs p_l > 0 and X >= 0"));
                }
                BoundaryCondition::OutflowZeroGradient { p_l } if !(p_l > 0.0) => {
                    return Err(Error::invalid("boundary", "outflow needs p_l > 0"));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Normalized source rates per cell (1/s): `F_w / rho_l_std` and `F_h / rho_g_std`.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceField {
    pub water: Vec<f64>,
    pub hydrogen: Vec<f64>,
}

impl SourceField {
    pub fn zero(n: usize) -> Self {
        SourceField {
            water: vec![0.0; n],
            hydrogen: vec![0.0; n],
        }
    }
}

/// Per-cell storage terms of the previous time level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Storage {
    /// `X - G S_g`
    pub tot: f64,
    /// `X`
    pub h: f64,
}

impl Storage {
    pub fn of(state: &CellState, params: &Params) -> Self {
        Storage {
            tot: state.primary.x - params.consts.g * state.sec.s_g,
            h: state.primary.x,
        }
    }
}

/// A discretized problem: grid, data, and boundary conditions.
#[derive(Debug, Clone)]
pub struct Problem {
    pub grid: StructuredGrid,
    pub params: Params,
    pub boundary: BoundarySpec,
    pub sources: SourceField,
    /// Cell permeabilities (m²), harmonically averaged on faces.
    pub permeability: Vec<f64>,
}

impl Problem {
    pub fn new(
        grid: StructuredGrid,
        params: Params,
        boundary: BoundarySpec,
        sources: SourceField,
    ) -> Result<Self> {
        boundary.validate(&grid)?;
        let n = grid.n_cells();
        if sources.water.len() != n || sources.hydrogen.len() != n {
            return Err(Error::invalid("sources", "one source value per cell is required"));
        }
        if sources.water.iter().chain(&sources.hydrogen).any(|v| !v.is_finite()) {
            return Err(Error::invalid("sources", "source rates must be finite"));
        }
        let permeability = vec![params.medium.k; n];
        Ok(Problem {
            grid,
            params,
            boundary,
            sources,
            permeability,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.grid.n_cells()
    }

    pub fn cell_states(&self, u: &[PrimaryState]) -> Result<Vec<CellState>> {
        u.iter().map(|&p| CellState::new(p, &self.params)).collect()
    }

    pub fn storage(&self, states: &[CellState]) -> Vec<Storage> {
        states.iter().map(|s| Storage::of(s, &self.params)).collect()
    }

    fn interior_geometry(&self, left: usize, right: usize, side: Side) -> FaceGeometry {
        let (area, distance) = self.grid.face_metrics(side);
        FaceGeometry {
            area,
            distance,
            normal: side.normal(),
            k: harmonic_mean(self.permeability[left], self.permeability[right]),
        }
    }

    /// Flux through the face on `side` of cell `c`, positive out of `c`.
    ///
    /// Interior faces are always evaluated with the lower-indexed cell on the
    /// left so both neighbours see bit-identical values.
    pub fn face_flux_out(&self, c: usize, side: Side, states: &[CellState]) -> Result<FaceFlux> {
        match self.grid.neighbor(c, side) {
            Some(nb) => {
                let flux = match side {
                    Side::East | Side::North => {
                        face_flux(&states[c], &states[nb], &self.interior_geometry(c, nb, side), &self.params)
                    }
                    Side::West => -face_flux(
                        &states[nb],
                        &states[c],
                        &self.interior_geometry(nb, c, Side::East),
                        &self.params,
                    ),
                    Side::South => -face_flux(
                        &states[nb],
                        &states[c],
                        &self.interior_geometry(nb, c, Side::North),
                        &self.params,
                    ),
                };
                Ok(flux)
            }
            None => {
                let bc = self.boundary.side(side)[self.grid.boundary_position(c, side)];
                self.boundary_flux(c, side, bc, &states[c])
            }
        }
    }

    fn boundary_flux(
        &self,
        c: usize,
        side: Side,
        bc: BoundaryCondition,
        cell: &CellState,
    ) -> Result<FaceFlux> {
        let (area, distance) = self.grid.face_metrics(side);
        let ghost = match bc {
            BoundaryCondition::Impervious => return Ok(FaceFlux::default()),
            BoundaryCondition::InflowGas { q } => {
                return Ok(FaceFlux {
                    tot: -q * area,
                    h: -q * area,
                })
            }
            BoundaryCondition::OutflowDirichlet { p_l, x } => PrimaryState::new(p_l, x),
            BoundaryCondition::OutflowZeroGradient { p_l } => PrimaryState::new(p_l, cell.primary.x),
        };
        let ghost = CellState::new(ghost, &self.params)?;
        let geom = FaceGeometry {
            area,
            distance: 0.5 * distance,
            normal: side.normal(),
            k: self.permeability[c],
        };
        Ok(face_flux(cell, &ghost, &geom, &self.params))
    }

    /// Both residual components of cell `c`.
    pub fn cell_residual(
        &self,
        c: usize,
        states: &[CellState],
        old: &[Storage],
        dt: f64,
    ) -> Result<[f64; 2]> {
        let vol = self.grid.cell_volume();
        let pv = self.params.medium.phi * vol / dt;
        let now = Storage::of(&states[c], &self.params);
        let mut r_tot = pv * (now.tot - old[c].tot);
        let mut r_h = pv * (now.h - old[c].h);
        for side in Side::ALL {
            let f = self.face_flux_out(c, side, states)?;
            r_tot += f.tot;
            r_h += f.h;
        }
        let s_w = self.sources.water[c];
        let s_h = self.sources.hydrogen[c];
        r_tot -= vol * (self.params.consts.g * s_w + s_h);
        r_h -= vol * s_h;
        Ok([r_tot, r_h])
    }

    /// Residual of the whole grid from precomputed cell states; entries are
    /// interleaved `(R_tot, R_h)` per cell.
    pub fn residual_from_states(
        &self,
        states: &[CellState],
        old: &[Storage],
        dt: f64,
    ) -> Result<Vec<f64>> {
        let mut r = Vec::with_capacity(2 * states.len());
        for c in 0..states.len() {
            r.extend_from_slice(&self.cell_residual(c, states, old, dt)?);
        }
        Ok(r)
    }

    /// Fully implicit residual of one time step (m³/s).
    pub fn assemble_residual(
        &self,
        state_new: &[PrimaryState],
        state_old: &[PrimaryState],
        dt: f64,
    ) -> Result<Vec<f64>> {
        if !(dt > 0.0) {
            return Err(Error::invalid("dt", "time step must be positive"));
        }
        let old = self.storage(&self.cell_states(state_old)?);
        let states = self.cell_states(state_new)?;
        self.residual_from_states(&states, &old, dt)
    }

    /// Net hydrogen rate leaving through the boundary (normalized m³/s).
    pub fn boundary_hydrogen_outflow(&self, states: &[CellState]) -> Result<f64> {
        let mut total = 0.0;
        for c in 0..self.n_cells() {
            for side in Side::ALL {
                if self.grid.neighbor(c, side).is_none() {
                    total += self.face_flux_out(c, side, states)?.h;
                }
            }
        }
        Ok(total)
    }

    /// Hydrogen source rate over the domain (normalized m³/s).
    pub fn hydrogen_source_rate(&self) -> f64 {
        self.grid.cell_volume() * self.sources.hydrogen.iter().sum::<f64>()
    }

    /// Hydrogen in place, `Σ Φ V X` (normalized m³).
    pub fn hydrogen_in_place(&self, u: &[PrimaryState]) -> f64 {
        self.params.medium.phi * self.grid.cell_volume() * u.iter().map(|s| s.x).sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strip(n: usize, bc_west: BoundaryCondition, bc_east: BoundaryCondition) -> Problem {
        let grid = StructuredGrid::new(n, 1, [0.0, 0.0], [10.0, 1.0]).unwrap();
        let imp = BoundaryCondition::Impervious;
        let bc = BoundarySpec::by_side(&grid, bc_west, bc_east, imp, imp);
        Problem::new(grid, Params::reference(), bc, SourceField::zero(n)).unwrap()
    }

    #[test]
    fn uniform_state_zero_residual() {
        let imp = BoundaryCondition::Impervious;
        let p = strip(5, imp, imp);
        let u = vec![PrimaryState::new(1e6, 0.4); 5];
        let r = p.assemble_residual(&u, &u, 100.0).unwrap();
        assert!(r.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn interior_faces_cancel() {
        let imp = BoundaryCondition::Impervious;
        let p = strip(6, imp, imp);
        let u: Vec<_> = (0..6)
            .map(|i| PrimaryState::new(1e6 + 1e4 * i as f64, 0.1 * i as f64))
            .collect();
        let states = p.cell_states(&u).unwrap();
        let mut net = FaceFlux::default();
        for c in 0..6 {
            for side in Side::ALL {
                let f = p.face_flux_out(c, side, &states).unwrap();
                net.tot += f.tot;
                net.h += f.h;
            }
        }
        let scale = p.face_flux_out(2, Side::East, &states).unwrap();
        assert!(net.tot.abs() <= 1e-15 * scale.tot.abs());
        assert!(net.h.abs() <= 1e-15 * scale.h.abs());
        assert_eq!(
            p.face_flux_out(2, Side::East, &states).unwrap(),
            -p.face_flux_out(3, Side::West, &states).unwrap()
        );
    }

    #[test]
    fn inflow_face_carries_rate() {
        let q = 4.756e-13;
        let p = strip(3, BoundaryCondition::InflowGas { q }, BoundaryCondition::Impervious);
        let u = vec![PrimaryState::new(1e6, 0.0); 3];
        let states = p.cell_states(&u).unwrap();
        let f = p.face_flux_out(0, Side::West, &states).unwrap();
        assert_eq!(f.tot, -q * 1.0);
        assert_eq!(f.h, -q * 1.0);
        assert_eq!(p.boundary_hydrogen_outflow(&states).unwrap(), -q);
    }

    #[test]
    fn dirichlet_face_uses_half_cell() {
        let p = strip(
            2,
            BoundaryCondition::Impervious,
            BoundaryCondition::OutflowDirichlet { p_l: 1e6, x: 0.0 },
        );
        let u = vec![PrimaryState::new(1e6, 0.1); 2];
        let states = p.cell_states(&u).unwrap();
        let f = p.face_flux_out(1, Side::East, &states).unwrap();
        let coef = |x: f64| 0.15 * 2500.0 / (x + 2500.0) * 3e-9;
        let expect = 0.5 * (coef(0.1) + coef(0.0)) * 0.1 / 2.5;
        assert!((f.h - expect).abs() <= 1e-14 * expect);
    }

    #[test]
    fn rejects_mismatched_inputs() {
        let grid = StructuredGrid::new(3, 1, [0.0, 0.0], [1.0, 1.0]).unwrap();
        let bc = BoundarySpec::impervious(&grid);
        assert!(Problem::new(grid.clone(), Params::reference(), bc.clone(), SourceField::zero(2)).is_err());
        let mut short = bc;
        short.west.clear();
        assert!(Problem::new(grid, Params::reference(), short, SourceField::zero(3)).is_err());
    }
}
