use crate::error::{Result, SpectralError};

/// Uniform periodic grid on a 1- or 2-torus. Both axes share the same point
/// count and period.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: usize,
    points_per_axis: usize,
    period: f64,
}

impl Grid {
    pub fn new(dim: usize, points_per_axis: usize, period: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(SpectralError::InvalidArgument(format!(
                "dim must be 1 or 2, got {dim}"
            )));
        }
        if points_per_axis < 16 || !points_per_axis.is_power_of_two() {
            return Err(SpectralError::InvalidArgument(format!(
                "points_per_axis must be a power of two >= 16, got {points_per_axis}"
            )));
        }
        if !(period > 0.0) || !period.is_finite() {
            return Err(SpectralError::InvalidArgument(format!(
                "period must be positive and finite, got {period}"
            )));
        }
        Ok(Grid { dim, points_per_axis, period })
    }

    /// 2π-periodic grid, the default geometry.
    pub fn standard(dim: usize, points_per_axis: usize) -> Result<Self> {
        Grid::new(dim, points_per_axis, std::f64::consts::TAU)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.points_per_axis as f64
    }

    /// Total number of nodes (n in 1-D, n² in 2-D).
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Volume of the torus (period^dim).
    pub fn volume(&self) -> f64 {
        self.period.powi(self.dim as i32)
    }

    /// Quadrature weight of one node for the flat measure (spacing^dim);
    /// the trapezoid rule on a periodic grid.
    pub fn node_weight(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Coordinate of node `i` along one axis.
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    /// Flattened node coordinates; row-major `(x, y)` pairs in 2-D.
    pub fn node(&self, idx: usize) -> [f64; 2] {
        match self.dim {
            1 => [self.coord(idx), 0.0],
            _ => {
                let n = self.points_per_axis;
                [self.coord(idx / n), self.coord(idx % n)]
            }
        }
    }

    /// Signed integer frequency of Fourier index `k` on one axis
    /// (`0..n` maps to `0..n/2, -n/2..-1`).
    pub fn signed_index(&self, k: usize) -> i64 {
        let n = self.points_per_axis as i64;
        let k = k as i64;
        if k <= n / 2 {
            k
        } else {
            k - n
        }
    }

    /// Angular wavenumber ξ = 2π·k_signed / period for Fourier index `k`.
    pub fn wavenumber(&self, k: usize) -> f64 {
        std::f64::consts::TAU * self.signed_index(k) as f64 / self.period
    }

    /// Minimal-image distance between two points of the torus.
    pub fn periodic_distance(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        let wrap = |d: f64| {
            let l = self.period;
            let d = (d % l + l) % l;
            d.min(l - d)
        };
        match self.dim {
            1 => wrap(a[0] - b[0]),
            _ => {
                let dx = wrap(a[0] - b[0]);
                let dy = wrap(a[1] - b[1]);
                dx.hypot(dy)
            }
        }
    }
}
