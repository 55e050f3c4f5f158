use super::spec::{FiberCache, PerturbationSpec};
use crate::dynsys::{SuspensionPoint, ZExtension};
use crate::error::{Error, Result};

/// Piece of slow time `[t0, t1]` spent in one roof fiber.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Segment {
    pub t0: f64,
    pub t1: f64,
    /// Fast time at which the fiber was entered.
    pub fiber_start: f64,
    pub cache: FiberCache,
    /// Set when `t1` is the grid time with this index.
    pub grid_index: Option<usize>,
}

/// Walks the fast orbit from `start` and reports the slow-time pieces cut at
/// fiber boundaries and at the grid times, in order.
pub(crate) fn for_each_segment<Z: ZExtension>(
    spec: &PerturbationSpec,
    model: &Z,
    start: &SuspensionPoint<Z::Point>,
    eps: f64,
    grid: &[f64],
    mut visit: impl FnMut(&Segment) -> Result<()>,
) -> Result<()> {
    check_grid(grid)?;
    let mut walk = crate::dynsys::FiberWalk::new(model, start);
    let mut gi = 0;
    let mut t = 0.0;
    while gi < grid.len() {
        let fiber = walk.next()?;
        let cache = spec.fiber(model.coord(&fiber.base), fiber.cell, fiber.roof);
        let end = eps * fiber.end();
        let mut seg = Segment { t0: t, t1: t, fiber_start: fiber.start, cache, grid_index: None };
        while gi < grid.len() && grid[gi] <= end {
            seg.t0 = t;
            seg.t1 = grid[gi];
            seg.grid_index = Some(gi);
            visit(&seg)?;
            t = grid[gi];
            gi += 1;
        }
        if gi < grid.len() {
            seg.t0 = t;
            seg.t1 = end;
            seg.grid_index = None;
            visit(&seg)?;
            t = end;
        }
    }
    Ok(())
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::GridMismatch("empty grid".into()));
    }
    if !(grid[0] >= 0.0) {
        return Err(Error::GridMismatch(format!("grid starts at {} < 0", grid[0])));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::GridMismatch("grid not strictly increasing".into()));
    }
    Ok(())
}
