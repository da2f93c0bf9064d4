//! Sampled complex fields on a periodic square box, their spectra, norms and
//! pairings, and the DLF2 binary format.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{tables, Tables};
use crate::sum::pairwise_map;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const MAGIC: &[u8; 4] = b"DLF2";

/// An `n × n` periodic grid on `[−L/2, L/2)²` with the origin at node
/// `(n/2, n/2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid2D {
    n: usize,
    box_size: f64,
}

impl Grid2D {
    pub fn new(n: usize, box_size: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n must be a power of two ≥ 16, got {n}"
            )));
        }
        if !(box_size > 0.0) || !box_size.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "box size must be positive and finite, got {box_size}"
            )));
        }
        Ok(Grid2D { n, box_size })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_size(&self) -> f64 {
        self.box_size
    }

    pub fn spacing(&self) -> f64 {
        self.box_size / self.n as f64
    }

    /// Area of one cell, `h²`.
    pub fn cell(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn origin_index(&self) -> usize {
        (self.n / 2) * self.n + self.n / 2
    }

    /// Coordinates `(x, y)` of the node stored at `idx`.
    pub fn coords(&self, idx: usize) -> (f64, f64) {
        let h = self.spacing();
        let half = (self.n / 2) as f64;
        let (j, k) = (idx / self.n, idx % self.n);
        ((j as f64 - half) * h, (k as f64 - half) * h)
    }

    pub fn radius(&self, idx: usize) -> f64 {
        let (x, y) = self.coords(idx);
        x.hypot(y)
    }

    /// Radius with the half-cell floor `max(r, h/2)` used for profiles that
    /// are singular at the origin.
    pub fn effective_radius(&self, idx: usize) -> f64 {
        self.radius(idx).max(0.5 * self.spacing())
    }

    /// Lattice wavenumber unit `2π/L`.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.box_size
    }

    /// Frequency vector `(ξ₁, ξ₂)` of spectral node `idx`.
    pub fn frequency(&self, idx: usize) -> (f64, f64) {
        let t = self.tables();
        let dk = self.dk();
        (
            dk * t.kint[idx / self.n] as f64,
            dk * t.kint[idx % self.n] as f64,
        )
    }

    /// Largest resolved wavenumber `π/h`.
    pub fn band_limit(&self) -> f64 {
        PI / self.spacing()
    }

    pub(crate) fn tables(&self) -> Arc<Tables> {
        tables(self.n)
    }

    /// `|ξ|²` for every slot, i.e. every distinct lattice radius.
    pub(crate) fn slot_xi2(&self) -> Vec<f64> {
        let dk2 = self.dk() * self.dk();
        self.tables().distinct.iter().map(|&d| dk2 * d as f64).collect()
    }

    /// Effective radius `max(r, h/2)` for every slot.
    pub(crate) fn slot_radii(&self) -> Vec<f64> {
        let h = self.spacing();
        self.tables()
            .distinct
            .iter()
            .map(|&d| (h * (d as f64).sqrt()).max(0.5 * h))
            .collect()
    }

    fn check_same(&self, other: &Grid2D) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// A complex function sampled at the nodes of a [`Grid2D`].
#[derive(Clone, Debug, PartialEq)]
pub struct Field2D {
    grid: Grid2D,
    values: Vec<Complex64>,
}

/// Raw (unnormalized, origin-unshifted) DFT coefficients of a field.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    grid: Grid2D,
    coeffs: Vec<Complex64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NormKind {
    Lebesgue,
    WeakLebesgue,
    Sobolev1p,
    H1Alpha,
    Strichartz,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormReport {
    pub kind: NormKind,
    pub p: f64,
    pub value: f64,
}

impl NormReport {
    pub fn new(kind: NormKind, p: f64, value: f64) -> Result<Self> {
        if !(value >= 0.0) || !value.is_finite() {
            return Err(Error::NonFinite("norm value"));
        }
        Ok(NormReport { kind, p, value })
    }
}

impl Field2D {
    pub fn new(grid: Grid2D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("field samples"));
        }
        Ok(Field2D { grid, values })
    }

    pub(crate) fn from_vec_unchecked(grid: Grid2D, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Field2D { grid, values }
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Field2D {
            grid,
            values: vec![ZERO; grid.len()],
        }
    }

    pub fn constant(grid: Grid2D, value: Complex64) -> Self {
        Field2D {
            grid,
            values: vec![value; grid.len()],
        }
    }

    /// Samples `f(x, y)` at every node.
    pub fn from_fn<F: Fn(f64, f64) -> Complex64>(grid: Grid2D, f: F) -> Result<Self> {
        let values = (0..grid.len())
            .map(|i| {
                let (x, y) = grid.coords(i);
                f(x, y)
            })
            .collect();
        Self::new(grid, values)
    }

    /// Samples a radial profile at `max(|x|, h/2)`. The profile is evaluated
    /// once per distinct lattice radius.
    pub fn from_radial<F: Fn(f64) -> f64>(grid: Grid2D, profile: F) -> Result<Self> {
        let per_slot: Vec<Complex64> = grid
            .slot_radii()
            .into_iter()
            .map(|r| Complex64::new(profile(r), 0.0))
            .collect();
        Self::new(grid, scatter_space(&grid, &per_slot))
    }

    pub(crate) fn from_slot_values(grid: Grid2D, per_slot: &[Complex64]) -> Self {
        Field2D {
            grid,
            values: scatter_space(&grid, per_slot),
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Sample at the origin node.
    pub fn at_origin(&self) -> Complex64 {
        self.values[self.grid.origin_index()]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == ZERO)
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Field2D {
        Field2D {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Field2D {
        self.map(|v| v * c)
    }

    pub fn scale_real(&self, c: f64) -> Field2D {
        self.map(|v| v * c)
    }

    /// `a·self + b·other`.
    pub fn lincomb(&self, a: Complex64, other: &Field2D, b: Complex64) -> Result<Field2D> {
        self.grid.check_same(&other.grid)?;
        Ok(Field2D {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&x, &y)| a * x + b * y)
                .collect(),
        })
    }

    pub fn add(&self, other: &Field2D) -> Result<Field2D> {
        self.lincomb(Complex64::new(1.0, 0.0), other, Complex64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Field2D) -> Result<Field2D> {
        self.lincomb(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    pub fn spectrum(&self) -> Spectrum {
        let mut coeffs = self.values.clone();
        self.grid.tables().forward(&mut coeffs);
        Spectrum {
            grid: self.grid,
            coeffs,
        }
    }

    /// Applies the multiplier `m(ξ₁, ξ₂)` on the discrete frequency lattice.
    pub fn fourier_multiplier<M: Fn(f64, f64) -> Complex64>(&self, m: M) -> Result<Field2D> {
        let mut s = self.spectrum();
        for (idx, c) in s.coeffs.iter_mut().enumerate() {
            let (a, b) = self.grid.frequency(idx);
            let factor = m(a, b);
            if !factor.is_finite() {
                return Err(Error::NonFinite("multiplier"));
            }
            *c *= factor;
        }
        Ok(s.to_field())
    }

    /// Spectral partial derivatives `(∂ₓf, ∂ᵧf)`, with the Nyquist mode
    /// dropped so that real fields stay real.
    pub fn gradient(&self) -> (Field2D, Field2D) {
        self.spectrum().gradient()
    }

    /// `(h² Σ|f|^p)^{1/p}`, or `max|f|` for `p = ∞`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        assert!(p >= 1.0, "lp_norm needs p ≥ 1, got {p}");
        if p.is_infinite() {
            return self.values.iter().fold(0.0, |m, v| m.max(v.norm()));
        }
        let cell = self.grid.cell();
        if p == 2.0 {
            let s = pairwise_map(self.values.len(), |i| self.values[i].norm_sqr());
            return (cell * s).sqrt();
        }
        let peak = self.values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        if peak == 0.0 {
            return 0.0;
        }
        let s = pairwise_map(self.values.len(), |i| (self.values[i].norm() / peak).powf(p));
        peak * (cell * s).powf(1.0 / p)
    }

    /// Discrete decreasing-rearrangement quasinorm `sup_k (k·h²)^{1/p}·a_k`.
    pub fn weak_lp_quasinorm(&self, p: f64) -> f64 {
        assert!(p > 1.0 && p.is_finite(), "weak_lp_quasinorm needs 1 < p < ∞, got {p}");
        let mut mags: Vec<f64> = self.values.iter().map(|v| v.norm()).collect();
        mags.sort_unstable_by(|a, b| b.total_cmp(a));
        let cell = self.grid.cell();
        mags.iter()
            .enumerate()
            .map(|(k, a)| ((k + 1) as f64 * cell).powf(1.0 / p) * a)
            .fold(0.0, f64::max)
    }

    /// `‖f‖_p + ‖∂ₓf‖_p + ‖∂ᵧf‖_p`.
    pub fn sobolev_norm_1p(&self, p: f64) -> f64 {
        let (dx, dy) = self.gradient();
        self.lp_norm(p) + dx.lp_norm(p) + dy.lp_norm(p)
    }

    /// `h² Σ a·conj(b)`.
    pub fn pairing(&self, other: &Field2D) -> Result<Complex64> {
        self.grid.check_same(&other.grid)?;
        let s = pairwise_map(self.values.len(), |i| self.values[i] * other.values[i].conj());
        Ok(s * self.grid.cell())
    }

    /// `h² Σ a·b` without conjugation.
    pub fn bilinear_pairing(&self, other: &Field2D) -> Result<Complex64> {
        self.grid.check_same(&other.grid)?;
        let s = pairwise_map(self.values.len(), |i| self.values[i] * other.values[i]);
        Ok(s * self.grid.cell())
    }

    pub fn norm(&self, kind: NormKind, p: f64) -> Result<NormReport> {
        let value = match kind {
            NormKind::Lebesgue => self.lp_norm(p),
            NormKind::WeakLebesgue => self.weak_lp_quasinorm(p),
            NormKind::Sobolev1p => self.sobolev_norm_1p(p),
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "{kind:?} is not a norm of a single plain field"
                )))
            }
        };
        NormReport::new(kind, p, value)
    }

    /// Writes the DLF2 record: magic, `u32 n`, `f64 L`, then `(re, im)` pairs.
    pub fn write_dlf2<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.grid.n as u32).to_le_bytes())?;
        w.write_all(&self.grid.box_size.to_le_bytes())?;
        let mut buf = Vec::with_capacity(16 * self.values.len());
        for v in &self.values {
            buf.extend_from_slice(&v.re.to_le_bytes());
            buf.extend_from_slice(&v.im.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_dlf2<R: Read>(mut r: R) -> Result<Self> {
        let mut head = [0u8; 16];
        r.read_exact(&mut head)?;
        if &head[..4] != MAGIC {
            return Err(Error::Format("bad magic, expected DLF2".into()));
        }
        let n = u32::from_le_bytes(head[4..8].try_into().unwrap()) as usize;
        let box_size = f64::from_le_bytes(head[8..16].try_into().unwrap());
        let grid = Grid2D::new(n, box_size).map_err(|e| Error::Format(e.to_string()))?;
        let mut buf = vec![0u8; 16 * grid.len()];
        r.read_exact(&mut buf)?;
        let values = buf
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect();
        Field2D::new(grid, values)
    }
}

/// Writes a sequence of DLF2 records, each followed by its `f64` time stamp.
pub fn write_frames<W: Write>(mut w: W, frames: &[Field2D], times: &[f64]) -> Result<()> {
    if frames.len() != times.len() {
        return Err(Error::InvalidParameter(
            "one time stamp per frame is required".into(),
        ));
    }
    for (f, t) in frames.iter().zip(times) {
        f.write_dlf2(&mut w)?;
        w.write_all(&t.to_le_bytes())?;
    }
    Ok(())
}

/// Reads frames written by [`write_frames`] until the stream ends.
pub fn read_frames<R: Read>(mut r: R) -> Result<(Vec<Field2D>, Vec<f64>)> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let mut cursor = &bytes[..];
    let (mut frames, mut times) = (Vec::new(), Vec::new());
    while !cursor.is_empty() {
        frames.push(Field2D::read_dlf2(&mut cursor)?);
        let mut t = [0u8; 8];
        cursor
            .read_exact(&mut t)
            .map_err(|_| Error::Format("frame is missing its time stamp".into()))?;
        times.push(f64::from_le_bytes(t));
    }
    Ok((frames, times))
}

fn scatter_space(grid: &Grid2D, per_slot: &[Complex64]) -> Vec<Complex64> {
    grid.tables()
        .slot_space
        .iter()
        .map(|&s| per_slot[s as usize])
        .collect()
}

impl Spectrum {
    pub(crate) fn from_coeffs(grid: Grid2D, coeffs: Vec<Complex64>) -> Self {
        Spectrum { grid, coeffs }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn to_field(&self) -> Field2D {
        let mut values = self.coeffs.clone();
        self.grid.tables().inverse(&mut values);
        Field2D::from_vec_unchecked(self.grid, values)
    }

    /// Value of the represented field at the origin node.
    pub fn origin_value(&self) -> Complex64 {
        let t = self.grid.tables();
        let n2 = self.coeffs.len() as f64;
        pairwise_map(self.coeffs.len(), |i| self.coeffs[i] * t.parity(i)) / n2
    }

    /// Parity-weighted sums of the coefficients over each slot. With these,
    /// `h²Σ f·G` for any radial multiplier `G` reduces to one short sum.
    pub(crate) fn slot_sums(&self) -> Vec<Complex64> {
        let t = self.grid.tables();
        t.bin(&t.slot_freq, |i| self.coeffs[i] * t.parity(i))
    }

    /// Multiplies by a radial symbol given per slot.
    pub(crate) fn apply_slot_multiplier(&self, per_slot: &[Complex64]) -> Spectrum {
        let t = self.grid.tables();
        Spectrum {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&t.slot_freq)
                .map(|(c, &s)| c * per_slot[s as usize])
                .collect(),
        }
    }

    /// Multiplies by the radial symbol `m(|ξ|²)`, evaluated once per slot.
    pub fn radial_multiply<M: Fn(f64) -> Complex64>(&self, m: M) -> Spectrum {
        let per_slot: Vec<Complex64> = self.grid.slot_xi2().into_iter().map(m).collect();
        self.apply_slot_multiplier(&per_slot)
    }

    pub fn scale(&self, c: Complex64) -> Spectrum {
        Spectrum {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
        }
    }

    pub fn lincomb(&self, a: Complex64, other: &Spectrum, b: Complex64) -> Spectrum {
        debug_assert_eq!(self.grid, other.grid);
        Spectrum {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&x, &y)| a * x + b * y)
                .collect(),
        }
    }

    pub fn gradient(&self) -> (Field2D, Field2D) {
        let t = self.grid.tables();
        let n = self.grid.n;
        let nyq = -((n / 2) as i64);
        let dk = self.grid.dk();
        let factor = |k: i64| {
            if k == nyq {
                ZERO
            } else {
                Complex64::new(0.0, dk * k as f64)
            }
        };
        let mut dx = self.coeffs.clone();
        let mut dy = self.coeffs.clone();
        for i in 0..n {
            let fx = factor(t.kint[i]);
            for j in 0..n {
                dx[i * n + j] *= fx;
                dy[i * n + j] *= factor(t.kint[j]);
            }
        }
        t.inverse(&mut dx);
        t.inverse(&mut dy);
        (
            Field2D::from_vec_unchecked(self.grid, dx),
            Field2D::from_vec_unchecked(self.grid, dy),
        )
    }

    /// `h²·Σ|∇f|²`, the Dirichlet form, computed from the coefficients.
    pub fn dirichlet_form(&self) -> f64 {
        let t = self.grid.tables();
        let dk2 = self.grid.dk().powi(2);
        let n2 = self.coeffs.len() as f64;
        let s = pairwise_map(self.coeffs.len(), |i| {
            self.coeffs[i].norm_sqr() * t.distinct[t.slot_freq[i] as usize] as f64
        });
        self.grid.cell() * dk2 * s / n2
    }
}
