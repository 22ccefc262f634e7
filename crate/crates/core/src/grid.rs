//! Uniform periodic grids, nodal fields, quadrature and radial profiles.
//!
//! A [`Grid2D`] with `n` nodes per axis covers the box `[-L/2, L/2)²` with
//! nodes at `-L/2 + i·L/n`; for even `n` node `n/2` sits at the origin.
//! Field values are stored row-major: `values[i * n + j]` is the sample at
//! `(x_i, y_j)`.
//!
//! Reductions sum each row left to right and then add the row totals in
//! increasing row order, so results are bitwise reproducible.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    n: usize,
    box_length: f64,
}

pub fn make_grid(n: usize, box_length: f64) -> Result<Grid2D> {
    Grid2D::new(n, box_length)
}

impl Grid2D {
    pub fn new(n: usize, box_length: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidGridSize(n));
        }
        if !(box_length > 0.0) || !box_length.is_finite() {
            return Err(Error::NonPositiveLength(box_length));
        }
        Ok(Self { n, box_length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.n as f64
    }

    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    /// Coordinate of node index `i` along either axis.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        -0.5 * self.box_length + i as f64 * self.spacing()
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        (self.coord(i), self.coord(j))
    }

    #[inline]
    pub fn radius(&self, i: usize, j: usize) -> f64 {
        let (x, y) = self.node(i, j);
        x.hypot(y)
    }

    /// Signed mode number of FFT storage index `m`, in `[-n/2, n/2)`.
    #[inline]
    pub fn mode(&self, m: usize) -> i64 {
        let n = self.n as i64;
        let m = m as i64;
        if m < n / 2 {
            m
        } else {
            m - n
        }
    }

    /// Wavenumber 2π·mode/L of FFT storage index `m`.
    #[inline]
    pub fn wavenumber(&self, m: usize) -> f64 {
        2.0 * PI * self.mode(m) as f64 / self.box_length
    }

    /// Per-axis wavenumbers in FFT storage order (0, 1, …, n/2-1, -n/2, …, -1).
    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|m| self.wavenumber(m)).collect()
    }

    pub fn ensure_same(&self, other: &Grid2D) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left_n: self.n,
                left_l: self.box_length,
                right_n: other.n,
                right_l: other.box_length,
            })
        }
    }
}

/// Real samples on the nodes of a [`Grid2D`]. All values are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid2D,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::FieldLength {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(idx));
        }
        Ok(Self { grid, values })
    }

    /// Builds a field without the finiteness scan; callers guarantee it.
    pub(crate) fn from_vec_unchecked(grid: Grid2D, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: Grid2D, value: f64) -> Result<Self> {
        Self::new(grid, vec![value; grid.len()])
    }

    /// Samples `f(x, y)` at every node.
    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(f64, f64) -> f64) -> Result<Self> {
        let n = grid.n();
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..n {
            let x = grid.coord(i);
            for j in 0..n {
                values.push(f(x, grid.coord(j)));
            }
        }
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.n() + j]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Field {
        Field::from_vec_unchecked(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Field, mut f: impl FnMut(f64, f64) -> f64) -> Result<Field> {
        self.grid.ensure_same(&other.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Field::from_vec_unchecked(self.grid, values))
    }

    /// `alpha·self + beta·other`.
    pub fn lincomb(&self, alpha: f64, other: &Field, beta: f64) -> Result<Field> {
        self.zip_map(other, |a, b| alpha * a + beta * b)
    }

    pub fn scaled(&self, alpha: f64) -> Field {
        self.map(|v| alpha * v)
    }

    /// Writes `x,y,value` rows in row-major node order.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = csv::Writer::from_writer(BufWriter::new(file));
        let csv_err = |e: csv::Error| Error::format(path, e.to_string());
        w.write_record(["x", "y", "value"]).map_err(csv_err)?;
        let n = self.grid.n();
        for i in 0..n {
            for j in 0..n {
                let (x, y) = self.grid.node(i, j);
                w.write_record(&[
                    format!("{x:e}"),
                    format!("{y:e}"),
                    format!("{:e}", self.values[i * n + j]),
                ])
                .map_err(csv_err)?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Binary dump: `n` as u64, `L` as f64, then the n² values, all little-endian.
    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let mut put = |bytes: &[u8]| w.write_all(bytes).map_err(|e| Error::io(path, e));
        put(&(self.grid.n() as u64).to_le_bytes())?;
        put(&self.grid.box_length().to_le_bytes())?;
        for v in &self.values {
            put(&v.to_le_bytes())?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read_binary(path: &Path) -> Result<Field> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = BufReader::new(file);
        let mut word = [0u8; 8];
        let mut take = |r: &mut BufReader<File>| -> Result<[u8; 8]> {
            r.read_exact(&mut word)
                .map_err(|_| Error::format(path, "truncated field dump"))?;
            Ok(word)
        };
        let n = u64::from_le_bytes(take(&mut r)?) as usize;
        let box_length = f64::from_le_bytes(take(&mut r)?);
        let grid = Grid2D::new(n, box_length)?;
        let mut values = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            values.push(f64::from_le_bytes(take(&mut r)?));
        }
        let mut rest = Vec::new();
        r.read_to_end(&mut rest).map_err(|e| Error::io(path, e))?;
        if !rest.is_empty() {
            return Err(Error::format(path, "trailing bytes after field values"));
        }
        Field::new(grid, values)
    }
}

/// Midpoint-rule integral Σ values · cell_area.
pub fn integrate(f: &Field) -> f64 {
    sum_rows(f.values(), f.grid().n()) * f.grid().cell_area()
}

/// ∫ f·g over the box.
pub fn inner(f: &Field, g: &Field) -> Result<f64> {
    f.grid().ensure_same(g.grid())?;
    let n = f.grid().n();
    let total: f64 = f
        .values()
        .chunks_exact(n)
        .zip(g.values().chunks_exact(n))
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>())
        .sum();
    Ok(total * f.grid().cell_area())
}

pub(crate) fn sum_rows(values: &[f64], n: usize) -> f64 {
    values
        .chunks_exact(n)
        .map(|row| row.iter().sum::<f64>())
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub radii: Vec<f64>,
    pub means: Vec<f64>,
    pub counts: Vec<usize>,
}

impl RadialProfile {
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// CSV with the given header for the mean column, e.g. `r,rho_mean,count`.
    pub fn write_csv(&self, path: &Path, value_column: &str) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = csv::Writer::from_writer(BufWriter::new(file));
        let csv_err = |e: csv::Error| Error::format(path, e.to_string());
        w.write_record(["r", value_column, "count"]).map_err(csv_err)?;
        for ((r, m), c) in self.radii.iter().zip(&self.means).zip(&self.counts) {
            w.write_record(&[format!("{r:e}"), format!("{m:e}"), c.to_string()])
                .map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Averages a field over `n_bins` equal-width shells covering `[0, L/2)`.
/// Shells without nodes are dropped.
pub fn radial_profile(f: &Field, n_bins: usize) -> Result<RadialProfile> {
    if n_bins < 2 {
        return Err(Error::Precondition(format!(
            "radial_profile needs at least 2 bins, got {n_bins}"
        )));
    }
    let grid = f.grid();
    let n = grid.n();
    let r_max = 0.5 * grid.box_length();
    let width = r_max / n_bins as f64;
    let mut sums = vec![0.0; n_bins];
    let mut counts = vec![0usize; n_bins];
    for i in 0..n {
        for j in 0..n {
            let r = grid.radius(i, j);
            if r >= r_max {
                continue;
            }
            let b = ((r / width) as usize).min(n_bins - 1);
            sums[b] += f.values()[i * n + j];
            counts[b] += 1;
        }
    }
    let mut profile = RadialProfile {
        radii: Vec::new(),
        means: Vec::new(),
        counts: Vec::new(),
    };
    for b in 0..n_bins {
        if counts[b] > 0 {
            profile.radii.push((b as f64 + 0.5) * width);
            profile.means.push(sums[b] / counts[b] as f64);
            profile.counts.push(counts[b]);
        }
    }
    Ok(profile)
}
