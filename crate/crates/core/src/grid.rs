//! Periodic cubic grid, real fields sampled on it, and the spectral vector
//! calculus used everywhere else.
//!
//! Nodes sit at `x_i = -L/2 + i h`, stored x-fastest. Derivatives are Fourier
//! multipliers `i k` with the Nyquist wavenumber set to zero, so `∂` is exactly
//! skew-adjoint for the grid inner product `h³ Σ`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::ops::{Index, IndexMut};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::Vec3;

/// Box geometry and resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    len: f64,
    n: usize,
}

impl GridSpec {
    pub fn new(len: f64, n: usize) -> Result<Self> {
        if !(len.is_finite() && len > 0.0) {
            return Err(Error::InvalidGrid(format!("box length must be positive, got {len}")));
        }
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("points per axis must be even and >= 8, got {n}")));
        }
        Ok(Self { len, n })
    }

    pub fn len(&self) -> f64 {
        self.len
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.len / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    pub fn volume(&self) -> f64 {
        self.len.powi(3)
    }

    pub fn node_count(&self) -> usize {
        self.n * self.n * self.n
    }

    /// Coordinate of node `i` along any axis.
    pub fn coord(&self, i: usize) -> f64 {
        -0.5 * self.len + i as f64 * self.spacing()
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        ix + self.n * (iy + self.n * iz)
    }

    #[inline]
    pub fn unindex(&self, idx: usize) -> (usize, usize, usize) {
        let n = self.n;
        (idx % n, (idx / n) % n, idx / (n * n))
    }

    pub fn node(&self, idx: usize) -> Vec3 {
        let (ix, iy, iz) = self.unindex(idx);
        Vec3::new(self.coord(ix), self.coord(iy), self.coord(iz))
    }

    /// Signed integer mode number of FFT index `i`, in `[-N/2, N/2)`.
    pub fn mode(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    pub fn is_nyquist(&self, i: usize) -> bool {
        i == self.n / 2
    }

    /// Wavenumber used by differentiation: `2π m / L`, zero at Nyquist.
    pub fn wavenumber(&self, i: usize) -> f64 {
        if self.is_nyquist(i) {
            0.0
        } else {
            2.0 * PI / self.len * self.mode(i) as f64
        }
    }

    pub(crate) fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.wavenumber(i)).collect()
    }

    /// Map `x` into the half-open interval `[-L/2, L/2)`.
    pub fn wrap(&self, x: f64) -> f64 {
        let l = self.len;
        let w = x - l * ((x + 0.5 * l) / l).floor();
        // floor can land exactly on the upper edge through rounding
        if w >= 0.5 * l {
            w - l
        } else {
            w
        }
    }

    fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// Real samples of a scalar function at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, values: vec![0.0; grid.node_count()] }
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        Self { grid, values: vec![c; grid.node_count()] }
    }

    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::InvalidGrid(format!("expected {} samples, got {}", grid.node_count(), values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("scalar field"));
        }
        Ok(Self { grid, values })
    }

    /// Sample `f` at every node.
    pub fn from_fn(grid: GridSpec, f: impl Fn(Vec3) -> f64 + Sync) -> Self {
        let values = (0..grid.node_count()).into_par_iter().map(|i| f(grid.node(i))).collect();
        Self { grid, values }
    }

    pub(crate) fn from_raw(grid: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.node_count());
        Self { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
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

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `h³ Σ f g`.
    pub fn inner(&self, other: &ScalarField) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        Ok(self.grid.cell_volume() * dot(&self.values, &other.values))
    }

    /// `h³ Σ f`.
    pub fn integral(&self) -> f64 {
        self.grid.cell_volume() * self.values.iter().sum::<f64>()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::from_raw(self.grid, self.values.iter().map(|v| v * s).collect())
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &ScalarField, s: f64) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self::from_raw(self.grid, self.values.iter().zip(&other.values).map(|(a, b)| a + s * b).collect()))
    }

    pub fn mul(&self, other: &ScalarField) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self::from_raw(self.grid, self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect()))
    }

    pub(crate) fn spectrum(&self) -> Spectrum {
        Spectrum::forward(self)
    }
}

impl Index<usize> for ScalarField {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

impl IndexMut<usize> for ScalarField {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.values[i]
    }
}

/// Three scalar components on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField3 {
    grid: GridSpec,
    components: [ScalarField; 3],
}

impl VectorField3 {
    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, components: [ScalarField::zeros(grid), ScalarField::zeros(grid), ScalarField::zeros(grid)] }
    }

    pub fn constant(grid: GridSpec, c: Vec3) -> Self {
        Self {
            grid,
            components: [
                ScalarField::constant(grid, c.x),
                ScalarField::constant(grid, c.y),
                ScalarField::constant(grid, c.z),
            ],
        }
    }

    pub fn from_components(components: [ScalarField; 3]) -> Result<Self> {
        let grid = components[0].grid;
        if components.iter().any(|c| c.grid != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, components })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(Vec3) -> Vec3 + Sync) -> Self {
        let vals: Vec<Vec3> = (0..grid.node_count()).into_par_iter().map(|i| f(grid.node(i))).collect();
        let comp = |j: usize| ScalarField::from_raw(grid, vals.iter().map(|v| v[j]).collect());
        Self { grid, components: [comp(0), comp(1), comp(2)] }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn components(&self) -> &[ScalarField; 3] {
        &self.components
    }

    pub fn into_components(self) -> [ScalarField; 3] {
        self.components
    }

    pub fn at(&self, idx: usize) -> Vec3 {
        Vec3::new(self.components[0][idx], self.components[1][idx], self.components[2][idx])
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(ScalarField::is_finite)
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().fold(0.0, |m, c| m.max(c.max_abs()))
    }

    pub fn norm(&self) -> f64 {
        inner_product(self, self).map(f64::sqrt).unwrap_or(0.0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map_components(|c| c.scaled(s))
    }

    pub fn add_scaled(&self, other: &VectorField3, s: f64) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            components: [
                self.components[0].add_scaled(&other.components[0], s)?,
                self.components[1].add_scaled(&other.components[1], s)?,
                self.components[2].add_scaled(&other.components[2], s)?,
            ],
        })
    }

    /// Pointwise product with a scalar field.
    pub fn mul_scalar_field(&self, f: &ScalarField) -> Result<Self> {
        Ok(Self {
            grid: self.grid,
            components: [self.components[0].mul(f)?, self.components[1].mul(f)?, self.components[2].mul(f)?],
        })
    }

    /// Pointwise cross product `self ∧ other`.
    pub fn cross(&self, other: &VectorField3) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self::from_indexed(self.grid, |i| self.at(i).cross(&other.at(i))))
    }

    /// Pointwise `c ∧ self` for a constant vector.
    pub fn const_cross(&self, c: &Vec3) -> Self {
        Self::from_indexed(self.grid, |i| c.cross(&self.at(i)))
    }

    pub(crate) fn from_indexed(grid: GridSpec, f: impl Fn(usize) -> Vec3 + Sync) -> Self {
        let vals: Vec<Vec3> = (0..grid.node_count()).into_par_iter().map(&f).collect();
        let comp = |j: usize| ScalarField::from_raw(grid, vals.iter().map(|v| v[j]).collect());
        Self { grid, components: [comp(0), comp(1), comp(2)] }
    }

    pub(crate) fn map_components(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self { grid: self.grid, components: [f(&self.components[0]), f(&self.components[1]), f(&self.components[2])] }
    }

    pub(crate) fn spectra(&self) -> [Spectrum; 3] {
        [self.components[0].spectrum(), self.components[1].spectrum(), self.components[2].spectrum()]
    }

    pub(crate) fn from_spectra(s: [Spectrum; 3]) -> Self {
        let [a, b, c] = s;
        let grid = a.grid;
        Self { grid, components: [a.into_real(), b.into_real(), c.into_real()] }
    }
}

impl Index<usize> for VectorField3 {
    type Output = ScalarField;
    fn index(&self, j: usize) -> &ScalarField {
        &self.components[j]
    }
}

impl IndexMut<usize> for VectorField3 {
    fn index_mut(&mut self, j: usize) -> &mut ScalarField {
        &mut self.components[j]
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    // fixed-order summation keeps results independent of the thread pool
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `⟨F, G⟩ = h³ Σ_nodes Σ_j F_j G_j`.
pub fn inner_product(f: &VectorField3, g: &VectorField3) -> Result<f64> {
    f.grid.check_same(&g.grid)?;
    let mut s = 0.0;
    for j in 0..3 {
        s += dot(f.components[j].values(), g.components[j].values());
    }
    Ok(f.grid.cell_volume() * s)
}

pub fn curl(f: &VectorField3) -> VectorField3 {
    let fh = f.spectra();
    VectorField3::from_spectra(curl_hat(&fh))
}

pub fn divergence(f: &VectorField3) -> ScalarField {
    let fh = f.spectra();
    let g = f.grid;
    let k = g.wavenumbers();
    let mut out = Spectrum::zeros(g);
    for (idx, o) in out.data.iter_mut().enumerate() {
        let (ix, iy, iz) = g.unindex(idx);
        let kv = [k[ix], k[iy], k[iz]];
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..3 {
            acc += Complex64::new(0.0, kv[j]) * fh[j].data[idx];
        }
        *o = acc;
    }
    out.into_real()
}

pub fn gradient(f: &ScalarField) -> VectorField3 {
    let fh = f.spectrum();
    VectorField3::from_spectra(gradient_hat(&fh))
}

/// Partial derivative along axis `axis`.
pub fn partial(f: &ScalarField, axis: usize) -> ScalarField {
    let mut s = f.spectrum();
    s.apply_derivative(axis);
    s.into_real()
}

/// Spectral Laplacian (Nyquist-zeroed wavenumbers).
pub fn laplacian(f: &ScalarField) -> ScalarField {
    let mut s = f.spectrum();
    let g = f.grid;
    let k = g.wavenumbers();
    for (idx, v) in s.data.iter_mut().enumerate() {
        let (ix, iy, iz) = g.unindex(idx);
        *v *= -(k[ix] * k[ix] + k[iy] * k[iy] + k[iz] * k[iz]);
    }
    s.into_real()
}

pub fn vector_laplacian(f: &VectorField3) -> VectorField3 {
    f.map_components(laplacian)
}

/// Solve `Δg = f - mean(f)` with `mean(g) = 0`.
pub fn laplacian_inverse(f: &ScalarField) -> ScalarField {
    let mut s = f.spectrum();
    s.apply_inverse_laplacian();
    s.into_real()
}

/// Leray projection onto divergence-free fields: `F̂ - k (k·F̂)/|k|²`, with
/// `k = 0` passed through.
pub fn leray_project(f: &VectorField3) -> VectorField3 {
    let mut fh = f.spectra();
    leray_hat(&mut fh);
    VectorField3::from_spectra(fh)
}

/// Component `j` is `wrap(x_j - q_j)` into `[-L/2, L/2)`.
pub fn centered_coordinate(grid: &GridSpec, q: &Vec3) -> VectorField3 {
    let g = *grid;
    let q = *q;
    VectorField3::from_fn(g, move |x| Vec3::new(g.wrap(x.x - q.x), g.wrap(x.y - q.y), g.wrap(x.z - q.z)))
}

/// Spectral translation: returns `f(· - d)`. Exact for band-limited data; the
/// Nyquist plane is dropped so that translations compose.
pub fn translate(f: &ScalarField, d: &Vec3) -> ScalarField {
    let mut s = f.spectrum();
    s.apply_shift(d);
    s.into_real()
}

pub fn translate_vector(f: &VectorField3, d: &Vec3) -> VectorField3 {
    f.map_components(|c| translate(c, d))
}

/// Drop every mode on a Nyquist plane, leaving the part of `f` that all
/// spectral operators (translations included) treat consistently.
pub fn band_limit(f: &VectorField3) -> VectorField3 {
    translate_vector(f, &Vec3::zeros())
}

// ---------------------------------------------------------------------------
// Spectral representation

/// Full complex DFT of a real field, index-ordered like the grid.
#[derive(Debug, Clone)]
pub(crate) struct Spectrum {
    pub(crate) grid: GridSpec,
    pub(crate) data: Vec<Complex64>,
}

impl Spectrum {
    pub(crate) fn zeros(grid: GridSpec) -> Self {
        Self { grid, data: vec![Complex64::new(0.0, 0.0); grid.node_count()] }
    }

    pub(crate) fn forward(f: &ScalarField) -> Self {
        let mut data: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft3(f.grid.n, &mut data, false);
        Self { grid: f.grid, data }
    }

    pub(crate) fn into_real(mut self) -> ScalarField {
        fft3(self.grid.n, &mut self.data, true);
        let values = self.data.iter().map(|c| c.re).collect();
        ScalarField::from_raw(self.grid, values)
    }

    pub(crate) fn apply_derivative(&mut self, axis: usize) {
        let g = self.grid;
        let k = g.wavenumbers();
        for (idx, v) in self.data.iter_mut().enumerate() {
            let (ix, iy, iz) = g.unindex(idx);
            let kk = [k[ix], k[iy], k[iz]][axis];
            *v *= Complex64::new(0.0, kk);
        }
    }

    pub(crate) fn apply_inverse_laplacian(&mut self) {
        let g = self.grid;
        let k = g.wavenumbers();
        for (idx, v) in self.data.iter_mut().enumerate() {
            let (ix, iy, iz) = g.unindex(idx);
            let k2 = k[ix] * k[ix] + k[iy] * k[iy] + k[iz] * k[iz];
            if k2 == 0.0 {
                *v = Complex64::new(0.0, 0.0);
            } else {
                *v /= -k2;
            }
        }
    }

    /// Multiply by `e^{-i k·d}`, i.e. translate by `d`.
    pub(crate) fn apply_shift(&mut self, d: &Vec3) {
        let g = self.grid;
        let px = phase_table(&g, d.x);
        let py = phase_table(&g, d.y);
        let pz = phase_table(&g, d.z);
        for (idx, v) in self.data.iter_mut().enumerate() {
            let (ix, iy, iz) = g.unindex(idx);
            *v *= px[ix] * py[iy] * pz[iz];
        }
    }
}

/// Per-axis factors `e^{-i k d}` with the Nyquist entry zeroed.
pub(crate) fn phase_table(g: &GridSpec, d: f64) -> Vec<Complex64> {
    (0..g.n)
        .map(
            |i| {
                if g.is_nyquist(i) {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::from_polar(1.0, -g.wavenumber(i) * d)
                }
            },
        )
        .collect()
}

pub(crate) fn curl_hat(fh: &[Spectrum; 3]) -> [Spectrum; 3] {
    let g = fh[0].grid;
    let k = g.wavenumbers();
    let mut out = [Spectrum::zeros(g), Spectrum::zeros(g), Spectrum::zeros(g)];
    let i = Complex64::new(0.0, 1.0);
    for idx in 0..g.node_count() {
        let (ix, iy, iz) = g.unindex(idx);
        let (kx, ky, kz) = (k[ix], k[iy], k[iz]);
        let (fx, fy, fz) = (fh[0].data[idx], fh[1].data[idx], fh[2].data[idx]);
        out[0].data[idx] = i * (ky * fz - kz * fy);
        out[1].data[idx] = i * (kz * fx - kx * fz);
        out[2].data[idx] = i * (kx * fy - ky * fx);
    }
    out
}

pub(crate) fn gradient_hat(fh: &Spectrum) -> [Spectrum; 3] {
    let mut out = [fh.clone(), fh.clone(), fh.clone()];
    for (axis, s) in out.iter_mut().enumerate() {
        s.apply_derivative(axis);
    }
    out
}

pub(crate) fn leray_hat(fh: &mut [Spectrum; 3]) {
    let g = fh[0].grid;
    let k = g.wavenumbers();
    for idx in 0..g.node_count() {
        let (ix, iy, iz) = g.unindex(idx);
        let kv = [k[ix], k[iy], k[iz]];
        let k2 = kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2];
        if k2 == 0.0 {
            continue;
        }
        let kf = (kv[0] * fh[0].data[idx] + kv[1] * fh[1].data[idx] + kv[2] * fh[2].data[idx]) / k2;
        for j in 0..3 {
            fh[j].data[idx] -= kv[j] * kf;
        }
    }
}

/// `h³ Σ_x F(x) G(x)` evaluated from spectra (Parseval).
pub(crate) fn parseval(a: &Spectrum, b: &Spectrum) -> f64 {
    let g = a.grid;
    let s: f64 = a.data.iter().zip(&b.data).map(|(x, y)| (x * y.conj()).re).sum();
    g.cell_volume() * s / g.node_count() as f64
}

// ---------------------------------------------------------------------------
// FFT

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plans(n: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("fft plan cache poisoned");
    map.entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans { forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) })
        })
        .clone()
}

const LINES_PER_TASK: usize = 64;

fn fft_lines(fft: &Arc<dyn Fft<f64>>, n: usize, data: &mut [Complex64]) {
    data.par_chunks_mut(n * LINES_PER_TASK).for_each(|chunk| {
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(chunk, &mut scratch);
    });
}

/// In-place 3D DFT over x-fastest data; the inverse is normalized by `1/N³`.
fn fft3(n: usize, data: &mut [Complex64], inverse: bool) {
    let p = plans(n);
    let fft = if inverse { &p.inverse } else { &p.forward };
    let nn = n * n;

    // x lines are contiguous
    fft_lines(fft, n, data);

    // y lines: gather into line-contiguous buffer indexed by (ix + n*iz)
    let mut tmp = vec![Complex64::new(0.0, 0.0); data.len()];
    {
        let src: &[Complex64] = data;
        tmp.par_chunks_mut(n).enumerate().for_each(|(line, out)| {
            let (ix, iz) = (line % n, line / n);
            for (iy, o) in out.iter_mut().enumerate() {
                *o = src[ix + n * iy + nn * iz];
            }
        });
    }
    fft_lines(fft, n, &mut tmp);
    {
        let src: &[Complex64] = &tmp;
        data.par_chunks_mut(nn).enumerate().for_each(|(iz, plane)| {
            for iy in 0..n {
                for ix in 0..n {
                    plane[ix + n * iy] = src[(ix + n * iz) * n + iy];
                }
            }
        });
    }

    // z lines: indexed by (ix + n*iy)
    {
        let src: &[Complex64] = data;
        tmp.par_chunks_mut(n).enumerate().for_each(|(line, out)| {
            for (iz, o) in out.iter_mut().enumerate() {
                *o = src[line + nn * iz];
            }
        });
    }
    fft_lines(fft, n, &mut tmp);
    {
        let src: &[Complex64] = &tmp;
        data.par_chunks_mut(nn).enumerate().for_each(|(iz, plane)| {
            for (line, v) in plane.iter_mut().enumerate() {
                *v = src[line * n + iz];
            }
        });
    }

    if inverse {
        let s = 1.0 / (n * nn) as f64;
        data.par_iter_mut().for_each(|v| *v *= s);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid(l: f64, n: usize) -> GridSpec {
        GridSpec::new(l, n).unwrap()
    }

    fn sin_x(g: GridSpec) -> ScalarField {
        let l = g.len();
        ScalarField::from_fn(g, move |x| (2.0 * PI * x.x / l).sin())
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(1.0, 7).is_err());
        assert!(GridSpec::new(1.0, 6).is_err());
        assert!(GridSpec::new(0.0, 8).is_err());
        assert!(GridSpec::new(f64::NAN, 8).is_err());
    }

    #[test]
    fn node_layout() {
        let g = grid(2.0, 8);
        assert_eq!(g.coord(0), -1.0);
        assert_eq!(g.index(1, 2, 3), 1 + 8 * 2 + 64 * 3);
        assert_eq!(g.unindex(g.index(5, 6, 7)), (5, 6, 7));
        assert_eq!(g.wavenumber(4), 0.0);
        assert_eq!(g.mode(5), -3);
    }

    #[test]
    fn inner_product_of_constants() {
        let g = grid(2.0, 8);
        let f = VectorField3::constant(g, Vec3::new(1.0, 0.0, 0.0));
        let h = VectorField3::constant(g, Vec3::new(2.0, 0.0, 0.0));
        assert_relative_eq!(inner_product(&f, &h).unwrap(), 16.0, epsilon = 1e-13);
        let z = VectorField3::zeros(g);
        assert_eq!(inner_product(&z, &z).unwrap(), 0.0);
    }

    #[test]
    fn inner_product_of_sine() {
        let l = 3.7;
        let g = grid(l, 16);
        let s = sin_x(g);
        let f = VectorField3::from_components([s, ScalarField::zeros(g), ScalarField::zeros(g)]).unwrap();
        assert_relative_eq!(inner_product(&f, &f).unwrap(), l.powi(3) / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let a = VectorField3::zeros(grid(2.0, 8));
        let b = VectorField3::zeros(grid(2.0, 10));
        assert!(matches!(inner_product(&a, &b), Err(Error::GridMismatch)));
    }

    #[test]
    fn curl_of_single_mode() {
        let g = grid(5.0, 16);
        let l = g.len();
        let f = VectorField3::from_components([ScalarField::zeros(g), ScalarField::zeros(g), sin_x(g)]).unwrap();
        let c = curl(&f);
        let expect = ScalarField::from_fn(g, move |x| -(2.0 * PI / l) * (2.0 * PI * x.x / l).cos());
        assert!(c[0].max_abs() < 1e-13);
        assert!(c[2].max_abs() < 1e-13);
        assert!(c[1].add_scaled(&expect, -1.0).unwrap().max_abs() < 1e-13);
        let k = VectorField3::constant(g, Vec3::new(1.0, 2.0, 3.0));
        assert!(curl(&k).max_abs() < 1e-13);
    }

    #[test]
    fn divergence_and_gradient_of_single_mode() {
        let g = grid(5.0, 16);
        let l = g.len();
        let s = sin_x(g);
        let cosx = ScalarField::from_fn(g, move |x| (2.0 * PI / l) * (2.0 * PI * x.x / l).cos());
        let f = VectorField3::from_components([s.clone(), ScalarField::zeros(g), ScalarField::zeros(g)]).unwrap();
        assert!(divergence(&f).add_scaled(&cosx, -1.0).unwrap().max_abs() < 1e-13);
        let gr = gradient(&s);
        assert!(gr[0].add_scaled(&cosx, -1.0).unwrap().max_abs() < 1e-13);
        assert!(gr[1].max_abs() < 1e-13 && gr[2].max_abs() < 1e-13);
        assert!(gradient(&ScalarField::constant(g, 4.0)).max_abs() < 1e-13);
        assert!(divergence(&VectorField3::constant(g, Vec3::new(1.0, 1.0, 1.0))).max_abs() < 1e-13);
    }

    #[test]
    fn inverse_laplacian_of_single_mode() {
        let g = grid(5.0, 16);
        let l = g.len();
        let s = sin_x(g);
        let out = laplacian_inverse(&s);
        let c = (l / (2.0 * PI)).powi(2);
        assert!(out.add_scaled(&s, c).unwrap().max_abs() < 1e-13);
        assert!(laplacian_inverse(&ScalarField::constant(g, 3.0)).max_abs() < 1e-14);
    }

    #[test]
    fn wrap_is_half_open() {
        let g = grid(4.0, 8);
        assert_eq!(g.wrap(2.0), -2.0);
        assert_eq!(g.wrap(-2.0), -2.0);
        assert_relative_eq!(g.wrap(4.5), 0.5);
        let h = g.spacing();
        let q0 = centered_coordinate(&g, &Vec3::zeros());
        let ql = centered_coordinate(&g, &Vec3::new(4.0, 0.0, 0.0));
        let idx = g.index(5, 4, 4); // node (h, 0, 0)
        assert_relative_eq!(q0.at(idx).x, h);
        assert_eq!(q0.at(idx).y, 0.0);
        assert_eq!(q0, ql);
    }

    #[test]
    fn translate_by_grid_vector_permutes_samples() {
        let g = grid(4.0, 8);
        let f = ScalarField::from_fn(g, |x| (-(x.norm_squared())).exp());
        let h = g.spacing();
        let t = translate(&f, &Vec3::new(h, 0.0, 0.0));
        // f(x - h) at node i equals f at node i-1 up to the dropped Nyquist plane
        let band = translate(&f, &Vec3::zeros());
        for iz in 0..8 {
            for iy in 0..8 {
                for ix in 1..8 {
                    let a = t[g.index(ix, iy, iz)];
                    let b = band[g.index(ix - 1, iy, iz)];
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }
}
