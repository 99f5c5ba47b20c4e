use rand::Rng;

use crate::error::{Error, Result};
use crate::pyramid::LevelId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub x: usize,
    pub y: usize,
}

impl Cell {
    pub fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

/// One toroidal grid shared by every sub-population, with per-level occupancy.
#[derive(Debug, Clone, PartialEq)]
pub struct ToroidalGrid {
    width: usize,
    height: usize,
    /// `occupancy[level][cell index]` lists agent indices placed there.
    occupancy: Vec<Vec<Vec<usize>>>,
}

impl ToroidalGrid {
    pub fn new(width: usize, height: usize, levels: usize) -> Self {
        assert!(width > 0 && height > 0, "grid dimensions must be positive");
        Self { width, height, occupancy: vec![vec![Vec::new(); width * height]; levels] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cell_count(&self) -> usize {
        self.width * self.height
    }

    fn index(&self, cell: Cell) -> usize {
        (cell.y % self.height) * self.width + cell.x % self.width
    }

    pub fn cell_at(&self, index: usize) -> Cell {
        Cell::new(index % self.width, index / self.width % self.height)
    }

    /// Even spread of a level's agents: one per cell at most while they fit,
    /// round-robin once the level outnumbers the cells.
    pub fn initial_cell(&self, agent: usize, capacity: usize) -> Cell {
        let cells = self.cell_count();
        if capacity <= cells {
            self.cell_at(agent * cells / capacity.max(1))
        } else {
            self.cell_at(agent % cells)
        }
    }

    /// The cell shifted by `(dx, dy)` with wraparound.
    pub fn offset(&self, cell: Cell, dx: isize, dy: isize) -> Cell {
        let wrap = |v: usize, d: isize, m: usize| (v as isize + d).rem_euclid(m as isize) as usize;
        Cell::new(wrap(cell.x, dx, self.width), wrap(cell.y, dy, self.height))
    }

    /// The eight surrounding cells, deduplicated on grids narrower than three.
    pub fn neighbours(&self, cell: Cell) -> Vec<Cell> {
        self.ring(cell, 1)
    }

    /// Cells at Chebyshev distance exactly `radius`, wrapped and deduplicated.
    pub fn ring(&self, cell: Cell, radius: usize) -> Vec<Cell> {
        let r = radius as isize;
        let home = self.index(cell);
        let mut out: Vec<Cell> = Vec::new();
        for dy in -r..=r {
            for dx in -r..=r {
                if dx.abs().max(dy.abs()) != r {
                    continue;
                }
                let c = self.offset(cell, dx, dy);
                if self.index(c) != home && !out.contains(&c) {
                    out.push(c);
                }
            }
        }
        out
    }

    pub fn clear_level(&mut self, level: LevelId) {
        for cell in &mut self.occupancy[level] {
            cell.clear();
        }
    }

    pub fn place(&mut self, level: LevelId, agent: usize, cell: Cell) {
        let idx = self.index(cell);
        self.occupancy[level][idx].push(agent);
    }

    pub fn agents_at(&self, level: LevelId, cell: Cell) -> &[usize] {
        &self.occupancy[level][self.index(cell)]
    }

    pub fn covers_level(&self, level: LevelId) -> bool {
        level < self.occupancy.len()
    }
}

/// Partner at the same cell of `level`, else among the eight neighbouring cells.
pub fn pick_partner_d<R: Rng + ?Sized>(cell: Cell, level: LevelId, grid: &ToroidalGrid, rng: &mut R) -> Result<usize> {
    if !grid.covers_level(level) {
        return Err(Error::MissingGrid);
    }
    let here = grid.agents_at(level, cell);
    if !here.is_empty() {
        return Ok(here[rng.gen_range(0..here.len())]);
    }
    let around: Vec<usize> = grid
        .neighbours(cell)
        .into_iter()
        .flat_map(|c| grid.agents_at(level, c).iter().copied())
        .collect();
    if around.is_empty() {
        return Err(Error::SparseGrid(cell.x, cell.y));
    }
    Ok(around[rng.gen_range(0..around.len())])
}

/// Like [`pick_partner_d`], but when the cell and its neighbourhood are empty
/// keeps widening the ring until an agent of `level` is found.
pub fn pick_partner_d_widening<R: Rng + ?Sized>(
    cell: Cell,
    level: LevelId,
    grid: &ToroidalGrid,
    rng: &mut R,
) -> Result<usize> {
    match pick_partner_d(cell, level, grid, rng) {
        Err(Error::SparseGrid(..)) => {}
        other => return other,
    }
    let max_radius = grid.width().max(grid.height()) / 2 + 1;
    for radius in 2..=max_radius {
        let found: Vec<usize> = grid
            .ring(cell, radius)
            .into_iter()
            .flat_map(|c| grid.agents_at(level, c).iter().copied())
            .collect();
        if !found.is_empty() {
            return Ok(found[rng.gen_range(0..found.len())]);
        }
    }
    Err(Error::EmptyPartnerPool)
}

/// Cell for a child: uniform among the eight neighbours of its parent's cell.
pub fn grid_insert_child<R: Rng + ?Sized>(parent: Cell, grid: &ToroidalGrid, rng: &mut R) -> Cell {
    let around = grid.neighbours(parent);
    if around.is_empty() {
        return parent;
    }
    around[rng.gen_range(0..around.len())]
}
