//! Immutable kernel tables: b(x,y;t) for all node pairs at a set of times.

use nalgebra::DMatrix;

use bflab_spectral::Grid;

use crate::error::{KernelError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    Flat,
    Perturbed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    Spectral,
    Parametrix,
    MatrixExponential,
}

#[derive(Debug, Clone)]
enum TableData {
    /// b(x,y) = f(y − x): one displacement row per time (translation-invariant).
    Translation(Vec<Vec<f64>>),
    /// Full (x,y) matrix per time.
    Dense(Vec<DMatrix<f64>>),
}

#[derive(Debug, Clone)]
pub struct KernelTable {
    grid: Grid,
    times: Vec<f64>,
    weights: Vec<f64>,
    data: TableData,
    operator: Operator,
    construction: Construction,
}

impl KernelTable {
    pub(crate) fn from_translation_rows(
        grid: Grid,
        times: Vec<f64>,
        rows: Vec<Vec<f64>>,
        operator: Operator,
        construction: Construction,
    ) -> Result<Self> {
        let weights = vec![grid.node_weight(); grid.len()];
        validate_times(&times)?;
        if rows.len() != times.len() || rows.iter().any(|r| r.len() != grid.len()) {
            return Err(KernelError::InvalidArgument("row shape does not match grid/times".into()));
        }
        Ok(KernelTable { grid, times, weights, data: TableData::Translation(rows), operator, construction })
    }

    /// Assembles a table from dense per-time matrices produced outside this
    /// crate (e.g. the Levi parametrix route). `weights` is the volume
    /// element dV at each node; matrices are indexed `(x, y)`.
    pub fn from_parts(
        grid: Grid,
        times: Vec<f64>,
        weights: Vec<f64>,
        matrices: Vec<DMatrix<f64>>,
        operator: Operator,
        construction: Construction,
    ) -> Result<Self> {
        Self::from_dense(grid, times, weights, matrices, operator, construction)
    }

    pub(crate) fn from_dense(
        grid: Grid,
        times: Vec<f64>,
        weights: Vec<f64>,
        matrices: Vec<DMatrix<f64>>,
        operator: Operator,
        construction: Construction,
    ) -> Result<Self> {
        validate_times(&times)?;
        let n = grid.len();
        if weights.len() != n
            || matrices.len() != times.len()
            || matrices.iter().any(|m| m.nrows() != n || m.ncols() != n)
        {
            return Err(KernelError::InvalidArgument("matrix shape does not match grid/times".into()));
        }
        Ok(KernelTable { grid, times, weights, data: TableData::Dense(matrices), operator, construction })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Volume weight dV at each node.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn operator(&self) -> Operator {
        self.operator
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    /// Displacement index of y relative to x (row-major, per axis modulo n).
    fn displacement(&self, x_idx: usize, y_idx: usize) -> usize {
        let n = self.grid.points_per_axis();
        match self.grid.dim() {
            1 => (y_idx + self.grid.len() - x_idx) % self.grid.len(),
            _ => {
                let (xi, xj) = (x_idx / n, x_idx % n);
                let (yi, yj) = (y_idx / n, y_idx % n);
                ((yi + n - xi) % n) * n + (yj + n - xj) % n
            }
        }
    }

    pub fn value(&self, x_idx: usize, y_idx: usize, t_idx: usize) -> f64 {
        match &self.data {
            TableData::Translation(rows) => rows[t_idx][self.displacement(x_idx, y_idx)],
            TableData::Dense(mats) => mats[t_idx][(x_idx, y_idx)],
        }
    }

    /// b(x, ·; t) as a vector over y.
    pub fn row(&self, x_idx: usize, t_idx: usize) -> Vec<f64> {
        (0..self.grid.len()).map(|y| self.value(x_idx, y, t_idx)).collect()
    }

    /// ∫ b(x, y; t) dV(y).
    pub fn row_mass(&self, x_idx: usize, t_idx: usize) -> f64 {
        (0..self.grid.len())
            .map(|y| self.value(x_idx, y, t_idx) * self.weights[y])
            .sum()
    }

    /// max over rows and times of |row mass − 1|.
    pub fn mass_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for t_idx in 0..self.times.len() {
            match &self.data {
                // Uniform weights make every row mass identical.
                TableData::Translation(_) => {
                    worst = worst.max((self.row_mass(0, t_idx) - 1.0).abs());
                }
                TableData::Dense(_) => {
                    for x in 0..self.grid.len() {
                        worst = worst.max((self.row_mass(x, t_idx) - 1.0).abs());
                    }
                }
            }
        }
        worst
    }

    /// max |b(x,y;t) − b(y,x;t)| over pairs and times.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.grid.len();
        let mut worst = 0.0f64;
        for t_idx in 0..self.times.len() {
            match &self.data {
                TableData::Translation(rows) => {
                    // f(d) vs f(−d).
                    for d in 0..n {
                        let neg = self.displacement(d, 0);
                        worst = worst.max((rows[t_idx][d] - rows[t_idx][neg]).abs());
                    }
                }
                TableData::Dense(mats) => {
                    let m = &mats[t_idx];
                    for i in 0..n {
                        for j in (i + 1)..n {
                            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
                        }
                    }
                }
            }
        }
        worst
    }

    /// Full matrix for one time slice.
    pub fn dense_slice(&self, t_idx: usize) -> DMatrix<f64> {
        let n = self.grid.len();
        match &self.data {
            TableData::Dense(mats) => mats[t_idx].clone(),
            TableData::Translation(_) => {
                DMatrix::from_fn(n, n, |i, j| self.value(i, j, t_idx))
            }
        }
    }

    /// Discrete kernel composition Σ_y b(x,y;t_i) b(y,z;t_j) dV(y); equals the
    /// slice at t_i + t_j when the semigroup property holds.
    pub fn compose(&self, t_idx_a: usize, t_idx_b: usize) -> Result<DMatrix<f64>> {
        if t_idx_a >= self.times.len() || t_idx_b >= self.times.len() {
            return Err(KernelError::InvalidArgument("time index out of range".into()));
        }
        let a = self.dense_slice(t_idx_a);
        let mut b = self.dense_slice(t_idx_b);
        // Fold the volume weights into the left factor's columns.
        for (j, w) in self.weights.iter().enumerate() {
            let mut col = b.row_mut(j);
            col *= *w;
        }
        Ok(a * b)
    }

    pub fn write_csv<W: std::io::Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "x_index,y_index,t,value")?;
        for (t_idx, &t) in self.times.iter().enumerate() {
            for x in 0..self.grid.len() {
                for y in 0..self.grid.len() {
                    writeln!(out, "{x},{y},{t:.16e},{:.16e}", self.value(x, y, t_idx))?;
                }
            }
        }
        Ok(())
    }
}

fn validate_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(KernelError::InvalidArgument("at least one time required".into()));
    }
    if times.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
        return Err(KernelError::InvalidArgument(format!("times must be positive: {times:?}")));
    }
    Ok(())
}
