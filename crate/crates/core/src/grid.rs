//! Discretized periodic box in dimension 1 or 2 with Lebesgue measure:
//! grid points, balls, integrals and means over balls.
//!
//! The box is `[-L/2, L/2)^n` with periodic identification, sampled at
//! `N` points per side (`N` a power of two), spacing `h = L/N`. The
//! discrete measure of a set of grid points is `count * h^n`. Ball
//! membership uses the strict inequality `d(x, c) < r` in the periodic
//! Euclidean metric; ties are excluded, which keeps membership
//! deterministic.

use std::io::{BufRead, BufWriter, Read, Write};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Uniform periodic grid over `[-L/2, L/2)^n`, `n = 1` or `2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: usize,
    side_length: f64,
    points_per_side: usize,
    spacing: f64,
}

/// Lower bound on ball radii: a ball must hold more than its center cell.
pub const MIN_RADIUS_SPACINGS: f64 = 2.0;
/// Radius cap as a fraction of the side length, guarding against
/// wrap-around artifacts in kernels and menus.
pub const MAX_RADIUS_FRACTION: f64 = 1.0 / 8.0;

impl Grid {
    /// Build a grid. `points_per_side` must be a power of two `>= 16` and
    /// `side_length` positive.
    pub fn new(dim: usize, side_length: f64, points_per_side: usize) -> Result<Arc<Grid>> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!("dim must be 1 or 2, got {dim}")));
        }
        if !(side_length > 0.0) || !side_length.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "side_length must be positive and finite, got {side_length}"
            )));
        }
        if points_per_side < 16 || !points_per_side.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points_per_side must be a power of two >= 16, got {points_per_side}"
            )));
        }
        Ok(Arc::new(Grid {
            dim,
            side_length,
            points_per_side,
            spacing: side_length / points_per_side as f64,
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side_length(&self) -> f64 {
        self.side_length
    }

    pub fn points_per_side(&self) -> usize {
        self.points_per_side
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Total number of grid points (`N^n`).
    pub fn len(&self) -> usize {
        match self.dim {
            1 => self.points_per_side,
            _ => self.points_per_side * self.points_per_side,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Measure element `h^n`.
    pub fn cell_measure(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    /// Total measure `L^n`.
    pub fn total_measure(&self) -> f64 {
        self.side_length.powi(self.dim as i32)
    }

    /// Coordinates of the grid point with flat index `idx`. The second
    /// component is 0 in dimension 1.
    pub fn coords(&self, idx: usize) -> [f64; 2] {
        let n = self.points_per_side;
        let half = 0.5 * self.side_length;
        match self.dim {
            1 => [idx as f64 * self.spacing - half, 0.0],
            _ => {
                let i = idx / n;
                let j = idx % n;
                [
                    i as f64 * self.spacing - half,
                    j as f64 * self.spacing - half,
                ]
            }
        }
    }

    /// Flat index of the grid point nearest to `x` (periodic).
    pub fn nearest_index(&self, x: [f64; 2]) -> usize {
        let n = self.points_per_side as i64;
        let half = 0.5 * self.side_length;
        let snap = |v: f64| -> usize {
            let k = ((v + half) / self.spacing).round() as i64;
            k.rem_euclid(n) as usize
        };
        match self.dim {
            1 => snap(x[0]),
            _ => snap(x[0]) * self.points_per_side + snap(x[1]),
        }
    }

    /// Per-axis periodic displacement reduced to `[-L/2, L/2)`.
    fn wrap_delta(&self, d: f64) -> f64 {
        let l = self.side_length;
        let mut d = d % l;
        if d < -0.5 * l {
            d += l;
        } else if d >= 0.5 * l {
            d -= l;
        }
        d
    }

    /// Squared periodic Euclidean distance between two coordinate pairs.
    pub fn periodic_dist2(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        let dx = self.wrap_delta(a[0] - b[0]);
        match self.dim {
            1 => dx * dx,
            _ => {
                let dy = self.wrap_delta(a[1] - b[1]);
                dx * dx + dy * dy
            }
        }
    }

    /// Largest integer `k >= 0` with `(k h)^2 < r^2`, capped at `N/2`.
    fn max_axis_offset(&self, radius: f64) -> i64 {
        let mut k = (radius / self.spacing).ceil() as i64;
        while k > 0 && (k as f64 * self.spacing).powi(2) >= radius * radius {
            k -= 1;
        }
        k.min(self.points_per_side as i64 / 2)
    }

    /// Flat indices of all grid points strictly inside the periodic ball
    /// `B(center, radius)`. Deterministic order (axis offsets ascending).
    pub fn ball_points(&self, ball: &Ball) -> Vec<usize> {
        let n = self.points_per_side as i64;
        let c = ball.center_index as i64;
        let kmax = self.max_axis_offset(ball.radius);
        let r2 = ball.radius * ball.radius;
        let h = self.spacing;
        match self.dim {
            1 => (-kmax..=kmax)
                .map(|k| (c + k).rem_euclid(n) as usize)
                .collect(),
            _ => {
                let ci = c / n;
                let cj = c % n;
                let mut out = Vec::new();
                for di in -kmax..=kmax {
                    let x2 = (di as f64 * h).powi(2);
                    for dj in -kmax..=kmax {
                        let y2 = (dj as f64 * h).powi(2);
                        if x2 + y2 < r2 {
                            let i = (ci + di).rem_euclid(n) as usize;
                            let j = (cj + dj).rem_euclid(n) as usize;
                            out.push(i * self.points_per_side + j);
                        }
                    }
                }
                out
            }
        }
    }

    /// Number of grid points in a periodic ball of the given radius. This
    /// is translation invariant on the lattice, so no center is needed.
    pub fn ball_point_count(&self, radius: f64) -> usize {
        let kmax = self.max_axis_offset(radius);
        match self.dim {
            1 => {
                let full = self.points_per_side;
                ((2 * kmax + 1) as usize).min(full)
            }
            _ => {
                let h = self.spacing;
                let r2 = radius * radius;
                let mut count = 0usize;
                for di in -kmax..=kmax {
                    let x2 = (di as f64 * h).powi(2);
                    for dj in -kmax..=kmax {
                        if x2 + (dj as f64 * h).powi(2) < r2 {
                            count += 1;
                        }
                    }
                }
                count.min(self.len())
            }
        }
    }

    /// Measure of a periodic ball of arbitrary radius, with no radius
    /// guard; capped at the total measure. Used by size/admissibility
    /// integrals which probe radii beyond the `Ball` invariant range.
    pub fn raw_ball_measure(&self, radius: f64) -> f64 {
        if radius <= 0.0 {
            return 0.0;
        }
        let half_diag = 0.5 * self.side_length * (self.dim as f64).sqrt();
        if radius > half_diag + self.spacing {
            return self.total_measure();
        }
        self.ball_point_count(radius) as f64 * self.cell_measure()
    }
}

/// Periodic Euclidean ball, centered at a grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center_index: usize,
    pub radius: f64,
}

impl Ball {
    /// Ball centered at grid point `center_index`. The radius must satisfy
    /// `2h <= r <= L/8`.
    pub fn new(grid: &Grid, center_index: usize, radius: f64) -> Result<Ball> {
        if center_index >= grid.len() {
            return Err(Error::InvalidBall(format!(
                "center index {center_index} out of range (grid has {} points)",
                grid.len()
            )));
        }
        if !(radius >= MIN_RADIUS_SPACINGS * grid.spacing()) {
            return Err(Error::InvalidBall(format!(
                "radius {radius} below {MIN_RADIUS_SPACINGS} grid spacings ({:e})",
                MIN_RADIUS_SPACINGS * grid.spacing()
            )));
        }
        if !(radius <= MAX_RADIUS_FRACTION * grid.side_length()) {
            return Err(Error::InvalidBall(format!(
                "radius {radius} exceeds L/8 = {:e}",
                MAX_RADIUS_FRACTION * grid.side_length()
            )));
        }
        Ok(Ball {
            center_index,
            radius,
        })
    }

    pub fn center(&self, grid: &Grid) -> [f64; 2] {
        grid.coords(self.center_index)
    }

    /// The ball translated by whole lattice steps along each axis.
    pub fn translated(&self, grid: &Grid, shift: [i64; 2]) -> Ball {
        let n = grid.points_per_side() as i64;
        let c = self.center_index as i64;
        let center_index = match grid.dim() {
            1 => (c + shift[0]).rem_euclid(n) as usize,
            _ => {
                let i = (c / n + shift[0]).rem_euclid(n);
                let j = (c % n + shift[1]).rem_euclid(n);
                (i * n + j) as usize
            }
        };
        Ball {
            center_index,
            radius: self.radius,
        }
    }

    /// True if `other` is concentric-or-not contained in `self` on the
    /// sampled grid: every point of `other` is a point of `self`. Cheap
    /// sufficient test via center distance + radii.
    pub fn contains(&self, grid: &Grid, other: &Ball) -> bool {
        let d2 = grid.periodic_dist2(self.center(grid), other.center(grid));
        let slack = d2.sqrt() + other.radius;
        slack <= self.radius
    }
}

/// Measure of the ball: point count times `h^n`.
pub fn ball_measure(grid: &Grid, ball: &Ball) -> Result<f64> {
    // Re-validate the radius guard so stale balls from another grid fail.
    if ball.radius < MIN_RADIUS_SPACINGS * grid.spacing() {
        return Err(Error::InvalidBall(format!(
            "radius {} below {MIN_RADIUS_SPACINGS} grid spacings",
            ball.radius
        )));
    }
    Ok(grid.ball_point_count(ball.radius) as f64 * grid.cell_measure())
}

/// Sampled real-valued function on a grid.
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<GridFunction> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "value count {} != grid point count {}",
                values.len(),
                grid.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid function contains non-finite value {v}"
            )));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn constant(grid: Arc<Grid>, c: f64) -> Result<GridFunction> {
        GridFunction::new(grid.clone(), vec![c; grid.len()])
    }

    /// Sample a coordinate function pointwise.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn([f64; 2]) -> f64) -> Result<GridFunction> {
        let values = (0..grid.len()).map(|i| f(grid.coords(i))).collect();
        GridFunction::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    /// Discrete integral over the whole torus: `sum * h^n`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_measure()
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_measure()).sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.grid.cell_measure()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<GridFunction> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch("zip of functions on different grids".into()));
        }
        Ok(GridFunction {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Cyclic translation by whole lattice steps along each axis:
    /// `g(x) = f(x - shift * h)`.
    pub fn translate(&self, shift: [i64; 2]) -> GridFunction {
        let n = self.grid.points_per_side() as i64;
        let mut values = vec![0.0; self.values.len()];
        match self.grid.dim() {
            1 => {
                for (i, v) in values.iter_mut().enumerate() {
                    let src = (i as i64 - shift[0]).rem_euclid(n) as usize;
                    *v = self.values[src];
                }
            }
            _ => {
                for i in 0..n {
                    for j in 0..n {
                        let si = (i - shift[0]).rem_euclid(n);
                        let sj = (j - shift[1]).rem_euclid(n);
                        values[(i * n + j) as usize] = self.values[(si * n + sj) as usize];
                    }
                }
            }
        }
        GridFunction {
            grid: self.grid.clone(),
            values,
        }
    }

    /// Write as CSV: a header row (dim, side_length, points_per_side)
    /// followed by one value per row, shortest round-trip float formatting.
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut w = BufWriter::new(w);
        writeln!(
            w,
            "dim,side_length,points_per_side\n{},{},{}",
            self.grid.dim(),
            self.grid.side_length(),
            self.grid.points_per_side()
        )?;
        writeln!(w, "value")?;
        for v in &self.values {
            writeln!(w, "{v}")?;
        }
        Ok(())
    }

    pub fn read_csv(r: impl Read) -> Result<GridFunction> {
        let reader = std::io::BufReader::new(r);
        let mut lines = reader.lines();
        let header = lines.next().ok_or_else(|| Error::Config("empty csv".into()))??;
        if header.trim() != "dim,side_length,points_per_side" {
            return Err(Error::Config(format!("unexpected csv header: {header}")));
        }
        let meta = lines.next().ok_or_else(|| Error::Config("missing csv meta row".into()))??;
        let parts: Vec<&str> = meta.trim().split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!("bad csv meta row: {meta}")));
        }
        let dim: usize = parts[0].parse().map_err(|e| Error::Config(format!("dim: {e}")))?;
        let l: f64 = parts[1].parse().map_err(|e| Error::Config(format!("side_length: {e}")))?;
        let n: usize = parts[2].parse().map_err(|e| Error::Config(format!("points_per_side: {e}")))?;
        let grid = Grid::new(dim, l, n)?;
        let mut values = Vec::with_capacity(grid.len());
        for line in lines {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t == "value" {
                continue;
            }
            values.push(t.parse::<f64>().map_err(|e| Error::Config(format!("value: {e}")))?);
        }
        GridFunction::new(grid, values)
    }

    /// Binary format, little-endian throughout: magic `GFN1`, then
    /// u32 dim, f64 side_length, u64 points_per_side, u64 value count,
    /// then the values as f64.
    pub fn write_binary(&self, w: impl Write) -> Result<()> {
        let mut w = BufWriter::new(w);
        w.write_all(b"GFN1")?;
        w.write_all(&(self.grid.dim() as u32).to_le_bytes())?;
        w.write_all(&self.grid.side_length().to_le_bytes())?;
        w.write_all(&(self.grid.points_per_side() as u64).to_le_bytes())?;
        w.write_all(&(self.values.len() as u64).to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(mut r: impl Read) -> Result<GridFunction> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != b"GFN1" {
            return Err(Error::Config("bad magic in binary grid function".into()));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b4)?;
        let dim = u32::from_le_bytes(b4) as usize;
        r.read_exact(&mut b8)?;
        let l = f64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        let n = u64::from_le_bytes(b8) as usize;
        r.read_exact(&mut b8)?;
        let count = u64::from_le_bytes(b8) as usize;
        let grid = Grid::new(dim, l, n)?;
        if count != grid.len() {
            return Err(Error::Config(format!(
                "binary value count {count} does not match grid size {}",
                grid.len()
            )));
        }
        let mut values = Vec::with_capacity(count);
        for _ in 0..count {
            r.read_exact(&mut b8)?;
            values.push(f64::from_le_bytes(b8));
        }
        GridFunction::new(grid, values)
    }
}

/// Mean of `f` over the points of `ball`.
pub fn mean_on_ball(f: &GridFunction, ball: &Ball) -> Result<f64> {
    let grid = f.grid();
    if ball.center_index >= grid.len() {
        return Err(Error::GridMismatch("ball center outside grid".into()));
    }
    let pts = grid.ball_points(ball);
    if pts.is_empty() {
        return Err(Error::InvalidBall("empty discrete ball".into()));
    }
    let sum: f64 = pts.iter().map(|&i| f.values()[i]).sum();
    Ok(sum / pts.len() as f64)
}

/// Finite sampled family of balls over which suprema are estimated.
#[derive(Debug, Clone)]
pub struct BallMenu {
    balls: Vec<Ball>,
    center_stride: usize,
    radii: Vec<f64>,
}

impl BallMenu {
    /// Centers on the stride sublattice crossed with the radius ladder,
    /// radius-major order (all centers of the largest radius first).
    pub fn new(grid: &Grid, center_stride: usize, radii: &[f64]) -> Result<BallMenu> {
        if center_stride == 0 {
            return Err(Error::InvalidParameter("center_stride must be >= 1".into()));
        }
        if radii.is_empty() {
            return Err(Error::InvalidParameter("radius ladder is empty".into()));
        }
        let n = grid.points_per_side();
        let centers_1d: Vec<usize> = (0..n).step_by(center_stride).collect();
        let mut balls = Vec::new();
        for &r in radii {
            match grid.dim() {
                1 => {
                    for &c in &centers_1d {
                        balls.push(Ball::new(grid, c, r)?);
                    }
                }
                _ => {
                    for &ci in &centers_1d {
                        for &cj in &centers_1d {
                            balls.push(Ball::new(grid, ci * n + cj, r)?);
                        }
                    }
                }
            }
        }
        Ok(BallMenu {
            balls,
            center_stride,
            radii: radii.to_vec(),
        })
    }

    /// Menu from an explicit ball list (already validated `Ball`s).
    pub fn from_balls(balls: Vec<Ball>) -> Result<BallMenu> {
        if balls.is_empty() {
            return Err(Error::InvalidParameter("empty ball menu".into()));
        }
        let mut radii: Vec<f64> = balls.iter().map(|b| b.radius).collect();
        radii.sort_by(|a, b| b.partial_cmp(a).unwrap());
        radii.dedup();
        Ok(BallMenu {
            balls,
            center_stride: 0,
            radii,
        })
    }

    /// The standard ladder: radii `L/8, L/16, ...` down to `4h`, and a
    /// center stride that keeps the menu around `max_centers` per side.
    pub fn standard(grid: &Grid, max_centers: usize) -> Result<BallMenu> {
        let stride = (grid.points_per_side() / max_centers.max(1)).max(1);
        BallMenu::new(grid, stride, &standard_radii(grid))
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn center_stride(&self) -> usize {
        self.center_stride
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Concentric nested pairs `(inner, outer)` from the menu: same center,
    /// inner radius strictly smaller.
    pub fn nested_pairs(&self) -> Vec<(Ball, Ball)> {
        let mut out = Vec::new();
        for outer in &self.balls {
            for inner in &self.balls {
                if inner.center_index == outer.center_index && inner.radius < outer.radius {
                    out.push((inner.clone(), outer.clone()));
                }
            }
        }
        out
    }
}

/// Geometric radius ladder `L/8, L/16, ...` truncated at `4h`.
pub fn standard_radii(grid: &Grid) -> Vec<f64> {
    let mut out = Vec::new();
    let mut r = grid.side_length() * MAX_RADIUS_FRACTION;
    while r >= 4.0 * grid.spacing() {
        out.push(r);
        r *= 0.5;
    }
    if out.is_empty() {
        out.push(grid.side_length() * MAX_RADIUS_FRACTION);
    }
    out
}
