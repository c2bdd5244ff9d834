//! Periodic square grid on the torus `[0, 2π)²` and its 2D real-to-complex transform.
//!
//! Samples are stored row-major with `x₁` fastest: `values[j * n + i]` holds the
//! sample at `(x₁, x₂) = (i h, j h)`. The half spectrum keeps `k₁ ∈ [0, n/2]` and
//! the full `k₂` range; coefficient `(k₁ index a, k₂ index b)` lives at `a * n + b`,
//! so each `k₁` column is contiguous in `k₂`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::SpectralError;

struct Plans {
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

fn plans_for(n: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("plan cache poisoned");
    map.entry(n)
        .or_insert_with(|| {
            let mut real = RealFftPlanner::<f64>::new();
            let mut cplx = FftPlanner::<f64>::new();
            Arc::new(Plans {
                r2c: real.plan_fft_forward(n),
                c2r: real.plan_fft_inverse(n),
                fwd: cplx.plan_fft_forward(n),
                inv: cplx.plan_fft_inverse(n),
            })
        })
        .clone()
}

/// Uniform `n × n` periodic grid.
#[derive(Clone)]
pub struct Grid {
    n: usize,
    plans: Arc<Plans>,
}

impl Grid {
    /// `n` must be a power of two, at least 8.
    pub fn new(n: usize) -> Result<Self, SpectralError> {
        if n < 8 || !n.is_power_of_two() {
            return Err(SpectralError::InvalidGrid(n));
        }
        Ok(Self { n, plans: plans_for(n) })
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

    /// Grid spacing `2π/n`. Exact for power-of-two `n`.
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    /// Quadrature weight of one cell, `h²`.
    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    /// Number of stored `k₁` columns in the half spectrum.
    pub fn half_len(&self) -> usize {
        self.n / 2 + 1
    }

    pub fn spectral_len(&self) -> usize {
        self.half_len() * self.n
    }

    /// Signed wavenumber for a stored `k₂` index, in `[−n/2, n/2)`.
    #[inline]
    pub fn k2_of(&self, b: usize) -> i64 {
        if b < self.n / 2 {
            b as i64
        } else {
            b as i64 - self.n as i64
        }
    }

    /// Coordinates `(x₁, x₂)` of sample `idx`.
    #[inline]
    pub fn coords(&self, idx: usize) -> (f64, f64) {
        let h = self.spacing();
        ((idx % self.n) as f64 * h, (idx / self.n) as f64 * h)
    }

    /// Samples an analytic function on the grid.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64 + Sync) -> Vec<f64> {
        (0..self.len())
            .into_par_iter()
            .map(|idx| {
                let (x1, x2) = self.coords(idx);
                f(x1, x2)
            })
            .collect()
    }

    /// Unnormalized forward transform of a real sample array into the half spectrum.
    pub(crate) fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let n = self.n;
        let m = self.half_len();
        debug_assert_eq!(values.len(), n * n);
        let mut rows = vec![Complex64::new(0.0, 0.0); n * m];
        rows.par_chunks_mut(m)
            .zip(values.par_chunks(n))
            .for_each_init(
                || (vec![0.0; n], self.plans.r2c.make_scratch_vec()),
                |(input, scratch), (out, row)| {
                    input.copy_from_slice(row);
                    self.plans
                        .r2c
                        .process_with_scratch(input, out, scratch)
                        .expect("r2c sizes match plan");
                },
            );
        let mut cols = vec![Complex64::new(0.0, 0.0); m * n];
        for (j, row) in rows.chunks(m).enumerate() {
            for (a, c) in row.iter().enumerate() {
                cols[a * n + j] = *c;
            }
        }
        cols.par_chunks_mut(n).for_each_init(
            || vec![Complex64::new(0.0, 0.0); self.plans.fwd.get_inplace_scratch_len()],
            |scratch, col| self.plans.fwd.process_with_scratch(col, scratch),
        );
        cols
    }

    /// Inverse of [`Grid::forward`], including the `1/n²` normalization.
    pub(crate) fn inverse(&self, spectrum: &[Complex64]) -> Vec<f64> {
        let n = self.n;
        let m = self.half_len();
        debug_assert_eq!(spectrum.len(), n * m);
        let mut cols = spectrum.to_vec();
        cols.par_chunks_mut(n).for_each_init(
            || vec![Complex64::new(0.0, 0.0); self.plans.inv.get_inplace_scratch_len()],
            |scratch, col| self.plans.inv.process_with_scratch(col, scratch),
        );
        let mut rows = vec![Complex64::new(0.0, 0.0); n * m];
        for (a, col) in cols.chunks(n).enumerate() {
            for (j, c) in col.iter().enumerate() {
                rows[j * m + a] = *c;
            }
        }
        let scale = 1.0 / (n * n) as f64;
        let mut values = vec![0.0; n * n];
        values
            .par_chunks_mut(n)
            .zip(rows.par_chunks_mut(m))
            .for_each_init(
                || self.plans.c2r.make_scratch_vec(),
                |scratch, (out, row)| {
                    // c2r ignores these in exact arithmetic; pin them so the call never rejects.
                    row[0].im = 0.0;
                    row[m - 1].im = 0.0;
                    self.plans
                        .c2r
                        .process_with_scratch(row, out, scratch)
                        .expect("c2r sizes match plan");
                    for v in out.iter_mut() {
                        *v *= scale;
                    }
                },
            );
        values
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

impl Eq for Grid {}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("n", &self.n).finish()
    }
}
