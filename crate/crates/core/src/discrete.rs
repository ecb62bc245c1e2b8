//! Grid functions, derivative stencils and a small sparse operator type.
//!
//! Dirichlet grids keep their endpoints in every vector; operators pin the
//! endpoint rows and columns to zero so boundary samples never contribute.

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::geometry::Grid;

/// How `d/dx` is discretized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiffScheme {
    /// Second-order central differences.
    #[default]
    Central,
    /// Fourier differentiation; periodic grids only.
    Spectral,
}

/// Complex samples on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: Grid,
    pub values: Vec<C64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::GridMismatch(format!("{} values on a {}-point grid", values.len(), grid.n)));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidParameter("grid function has non-finite samples".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> C64) -> Self {
        let values = grid.points().into_iter().map(f).collect();
        Self { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![C64::new(0.0, 0.0); grid.n] }
    }

    /// Flat discrete L² norm `sqrt(h Σ |f_i|²)`.
    pub fn norm(&self) -> f64 {
        l2_norm(&self.values, self.grid.spacing())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn same_grid(&self, other: &GridFunction) -> Result<()> {
        check_grid(&self.grid, &other.grid)
    }
}

pub(crate) fn check_grid(a: &Grid, b: &Grid) -> Result<()> {
    if a != b {
        return Err(Error::GridMismatch(format!("{a:?} vs {b:?}")));
    }
    Ok(())
}

pub fn l2_norm(v: &[C64], h: f64) -> f64 {
    (h * v.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
}

pub fn inner(f: &[C64], g: &[C64], h: f64) -> C64 {
    f.iter().zip(g).map(|(a, b)| a.conj() * b).sum::<C64>() * h
}

/// First derivative of grid samples.
pub fn derivative(values: &[C64], grid: &Grid, scheme: DiffScheme) -> Result<Vec<C64>> {
    derivative_n(values, grid, scheme, 1)
}

pub fn second_derivative(values: &[C64], grid: &Grid, scheme: DiffScheme) -> Result<Vec<C64>> {
    derivative_n(values, grid, scheme, 2)
}

fn derivative_n(values: &[C64], grid: &Grid, scheme: DiffScheme, order: u32) -> Result<Vec<C64>> {
    if values.len() != grid.n {
        return Err(Error::GridMismatch(format!("{} values on a {}-point grid", values.len(), grid.n)));
    }
    match scheme {
        DiffScheme::Central => Ok(central(values, grid, order)),
        DiffScheme::Spectral => {
            if !grid.is_periodic() {
                return Err(Error::GridMismatch("spectral differentiation needs a periodic grid".into()));
            }
            Ok(spectral(values, order))
        }
    }
}

fn central(v: &[C64], grid: &Grid, order: u32) -> Vec<C64> {
    let n = v.len();
    let h = grid.spacing();
    let periodic = grid.is_periodic();
    let at = |i: isize| -> C64 {
        if periodic {
            v[i.rem_euclid(n as isize) as usize]
        } else if i <= 0 || i >= n as isize - 1 {
            C64::new(0.0, 0.0)
        } else {
            v[i as usize]
        }
    };
    (0..n)
        .map(|i| {
            if !periodic && (i == 0 || i == n - 1) {
                return C64::new(0.0, 0.0);
            }
            let i = i as isize;
            match order {
                1 => (at(i + 1) - at(i - 1)) / (2.0 * h),
                _ => (at(i + 1) - at(i) * 2.0 + at(i - 1)) / (h * h),
            }
        })
        .collect()
}

fn spectral(v: &[C64], order: u32) -> Vec<C64> {
    let n = v.len();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut buf = v.to_vec();
    fwd.process(&mut buf);
    for (j, c) in buf.iter_mut().enumerate() {
        let m = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
        // the Nyquist mode has no well-defined odd derivative
        if n % 2 == 0 && j == n / 2 && order % 2 == 1 {
            *c = C64::new(0.0, 0.0);
            continue;
        }
        let ik = C64::new(0.0, m);
        *c *= ik.powu(order);
    }
    inv.process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.into_iter().map(|c| c * scale).collect()
}

/// A potential sampled on a grid, with a free-text label saying where it
/// came from.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialForm {
    pub grid: Grid,
    pub v: Vec<C64>,
    pub label: String,
}

impl PotentialForm {
    pub fn new(grid: Grid, v: Vec<C64>, label: impl Into<String>) -> Result<Self> {
        if v.len() != grid.n {
            return Err(Error::GridMismatch(format!("{} samples on a {}-point grid", v.len(), grid.n)));
        }
        Ok(Self { grid, v, label: label.into() })
    }

    pub fn from_fn(grid: Grid, label: impl Into<String>, f: impl Fn(f64) -> C64) -> Self {
        Self { grid, v: grid.points().into_iter().map(f).collect(), label: label.into() }
    }

    pub fn from_real_fn(grid: Grid, label: impl Into<String>, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, label, |x| C64::new(f(x), 0.0))
    }

    /// Indices that enter a discretization: all points for periodic grids,
    /// interior points otherwise.
    pub fn active_range(&self) -> std::ops::Range<usize> {
        if self.grid.is_periodic() {
            0..self.grid.n
        } else {
            1..self.grid.n - 1
        }
    }

    pub fn max_abs_diff(&self, other: &PotentialForm) -> Result<f64> {
        check_grid(&self.grid, &other.grid)?;
        Ok(self
            .active_range()
            .map(|i| (self.v[i] - other.v[i]).norm())
            .fold(0.0, f64::max))
    }
}

/// Row-compressed sparse complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    pub n: usize,
    rows: Vec<Vec<(usize, C64)>>,
}

impl SparseOp {
    pub fn zeros(n: usize) -> Self {
        Self { n, rows: vec![Vec::new(); n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![C64::new(1.0, 0.0); n])
    }

    pub fn diagonal(d: &[C64]) -> Self {
        Self { n: d.len(), rows: d.iter().enumerate().map(|(i, &v)| vec![(i, v)]).collect() }
    }

    pub fn push(&mut self, i: usize, j: usize, v: C64) {
        if v == C64::new(0.0, 0.0) {
            return;
        }
        match self.rows[i].iter_mut().find(|(c, _)| *c == j) {
            Some((_, w)) => *w += v,
            None => self.rows[i].push((j, v)),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.rows[i].iter().find(|(c, _)| *c == j).map(|(_, v)| *v).unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |&(j, v)| (i, j, v)))
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.n, "operator/vector size mismatch");
        self.rows.iter().map(|r| r.iter().map(|&(j, v)| v * x[j]).sum()).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.n);
        for (i, j, v) in self.entries() {
            out.push(j, i, v.conj());
        }
        out
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = Self::zeros(self.n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(k, a) in row {
                for &(j, b) in &other.rows[k] {
                    out.push(i, j, a * b);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(C64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(C64::new(-1.0, 0.0), other)
    }

    fn axpy(&self, alpha: C64, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (i, j, v) in other.entries() {
            out.push(i, j, alpha * v);
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        let rows = self.rows.iter().map(|r| r.iter().map(|&(j, v)| (j, v * s)).collect()).collect();
        Self { n: self.n, rows }
    }

    /// Multiply rows by `w_i` and columns by `1/w_j`: `W A W⁻¹`.
    pub fn similarity_by_weights(&self, w: &[f64]) -> Self {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().map(|&(j, v)| (j, v * (w[i] / w[j]))).collect())
            .collect();
        Self { n: self.n, rows }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().map(|(_, _, v)| v.norm()).fold(0.0, f64::max)
    }

    /// Zero the endpoint rows/columns of a Dirichlet grid.
    pub fn pin_boundary(&mut self, grid: &Grid) {
        if grid.is_periodic() {
            return;
        }
        let last = self.n - 1;
        self.rows[0].clear();
        self.rows[last].clear();
        for r in &mut self.rows {
            r.retain(|&(j, _)| j != 0 && j != last);
        }
    }
}

/// Central-difference `d/dx` as a sparse matrix.
pub fn first_derivative_op(grid: &Grid) -> SparseOp {
    let n = grid.n;
    let h = grid.spacing();
    let mut op = SparseOp::zeros(n);
    let c = C64::new(1.0 / (2.0 * h), 0.0);
    for i in 0..n {
        let (l, r) = neighbours(grid, i);
        if let Some(r) = r {
            op.push(i, r, c);
        }
        if let Some(l) = l {
            op.push(i, l, -c);
        }
    }
    op.pin_boundary(grid);
    op
}

/// Central-difference `d²/dx²` as a sparse matrix.
pub fn second_derivative_op(grid: &Grid) -> SparseOp {
    let n = grid.n;
    let h2 = grid.spacing().powi(2);
    let mut op = SparseOp::zeros(n);
    for i in 0..n {
        let (l, r) = neighbours(grid, i);
        op.push(i, i, C64::new(-2.0 / h2, 0.0));
        if let Some(r) = r {
            op.push(i, r, C64::new(1.0 / h2, 0.0));
        }
        if let Some(l) = l {
            op.push(i, l, C64::new(1.0 / h2, 0.0));
        }
    }
    op.pin_boundary(grid);
    op
}

fn neighbours(grid: &Grid, i: usize) -> (Option<usize>, Option<usize>) {
    let n = grid.n;
    if grid.is_periodic() {
        (Some((i + n - 1) % n), Some((i + 1) % n))
    } else {
        (i.checked_sub(1), (i + 1 < n).then_some(i + 1))
    }
}
