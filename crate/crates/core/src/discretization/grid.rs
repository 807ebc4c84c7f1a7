use crate::error::{Error, Result};

/// Uniform Cartesian grid of `nx × ny` cells, row-major (`c = j nx + i`).
///
/// A grid with `ny == 1` is one-dimensional: its south and north sides are
/// boundary faces and `size[1]` only sets the cross-section. Cells have unit
/// thickness.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredGrid {
    pub nx: usize,
    pub ny: usize,
    pub origin: [f64; 2],
    pub size: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    West,
    East,
    South,
    North,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::West, Side::East, Side::South, Side::North];

    /// Outward unit normal.
    pub fn normal(self) -> [f64; 2] {
        match self {
            Side::West => [-1.0, 0.0],
            Side::East => [1.0, 0.0],
            Side::South => [0.0, -1.0],
            Side::North => [0.0, 1.0],
        }
    }
}

impl StructuredGrid {
    pub fn new(nx: usize, ny: usize, origin: [f64; 2], size: [f64; 2]) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::invalid("grid", "cell counts must be positive"));
        }
        if !(size[0] > 0.0 && size[1] > 0.0) {
            return Err(Error::invalid("grid", "domain extents must be positive"));
        }
        Ok(StructuredGrid {
            nx,
            ny,
            origin,
            size,
        })
    }

    pub fn dimension(&self) -> usize {
        if self.ny == 1 {
            1
        } else {
            2
        }
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn dx(&self) -> f64 {
        self.size[0] / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.size[1] / self.ny as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn ij(&self, c: usize) -> (usize, usize) {
        (c % self.nx, c / self.nx)
    }

    pub fn cell_center(&self, c: usize) -> [f64; 2] {
        let (i, j) = self.ij(c);
        [
            self.origin[0] + (i as f64 + 0.5) * self.dx(),
            self.origin[1] + (j as f64 + 0.5) * self.dy(),
        ]
    }

    /// Cell across `side`, if any.
    pub fn neighbor(&self, c: usize, side: Side) -> Option<usize> {
        let (i, j) = self.ij(c);
        match side {
            Side::West if i > 0 => Some(c - 1),
            Side::East if i + 1 < self.nx => Some(c + 1),
            Side::South if j > 0 => Some(c - self.nx),
            Side::North if j + 1 < self.ny => Some(c + self.nx),
            _ => None,
        }
    }

    /// Area of a face on `side` of a cell, and the center-to-center distance
    /// across it.
    pub fn face_metrics(&self, side: Side) -> (f64, f64) {
        match side {
            Side::West | Side::East => (self.dy(), self.dx()),
            Side::South | Side::North => (self.dx(), self.dy()),
        }
    }

    /// Index of the cell along a boundary side (`j` on west/east, `i` on
    /// south/north).
    pub fn boundary_position(&self, c: usize, side: Side) -> usize {
        let (i, j) = self.ij(c);
        match side {
            Side::West | Side::East => j,
            Side::South | Side::North => i,
        }
    }

    /// Cells whose centers lie inside `[x0, x1] × [y0, y1]`.
    pub fn cells_in_box(&self, lower: [f64; 2], upper: [f64; 2]) -> Vec<usize> {
        (0..self.n_cells())
            .filter(|&c| {
                let p = self.cell_center(c);
                p[0] >= lower[0] && p[0] <= upper[0] && p[1] >= lower[1] && p[1] <= upper[1]
            })
            .collect()
    }

    /// Row of cells closest to the horizontal line `y = y_cut`.
    pub fn line_cut(&self, y_cut: f64) -> Vec<usize> {
        let j = (((y_cut - self.origin[1]) / self.dy() - 0.5).round().max(0.0) as usize)
            .min(self.ny - 1);
        (0..self.nx).map(|i| self.index(i, j)).collect()
    }
}
