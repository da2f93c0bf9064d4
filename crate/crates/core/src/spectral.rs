//! FFT plans and index tables shared by every field on an `n × n` grid.
//!
//! Fields are stored row-major with the origin at node `(n/2, n/2)`. The raw
//! DFT of such an array differs from the origin-centred transform by the
//! parity factor `(−1)^{k₁+k₂}`; multipliers commute with it, so only point
//! evaluations at the origin need it explicitly.
//!
//! Integer frequencies are `k = i` for `i < n/2` and `k = i − n` otherwise,
//! so the Nyquist row carries `k = −n/2`. Spatial offsets `j − n/2` span the
//! same range, which lets one table of distinct `k₁² + k₂²` values ("slots")
//! serve both radial multipliers and radial profiles.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub(crate) struct Tables {
    pub n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// Signed integer frequency of each FFT index.
    pub kint: Vec<i64>,
    /// Slot of each frequency node (row-major).
    pub slot_freq: Vec<u32>,
    /// Slot of each spatial node (row-major).
    pub slot_space: Vec<u32>,
    /// Distinct values of `k₁² + k₂²`, increasing.
    pub distinct: Vec<u64>,
    /// Number of lattice points in each slot.
    pub counts: Vec<u32>,
}

impl Tables {
    fn build(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let half = (n / 2) as i64;
        let kint: Vec<i64> = (0..n as i64)
            .map(|i| if i < half { i } else { i - n as i64 })
            .collect();

        let max_d = 2 * (half * half) as usize;
        let mut present = vec![false; max_d + 1];
        for a in -half..half {
            for b in -half..half {
                present[(a * a + b * b) as usize] = true;
            }
        }
        let mut lookup = vec![u32::MAX; max_d + 1];
        let mut distinct = Vec::new();
        for (d, &p) in present.iter().enumerate() {
            if p {
                lookup[d] = distinct.len() as u32;
                distinct.push(d as u64);
            }
        }
        let mut counts = vec![0u32; distinct.len()];
        let mut slot_freq = Vec::with_capacity(n * n);
        for &k1 in &kint {
            for &k2 in &kint {
                let s = lookup[(k1 * k1 + k2 * k2) as usize];
                counts[s as usize] += 1;
                slot_freq.push(s);
            }
        }
        let mut slot_space = Vec::with_capacity(n * n);
        for j in 0..n as i64 {
            for k in 0..n as i64 {
                let (a, b) = (j - half, k - half);
                slot_space.push(lookup[(a * a + b * b) as usize]);
            }
        }
        Tables {
            n,
            fwd,
            inv,
            kint,
            slot_freq,
            slot_space,
            distinct,
            counts,
        }
    }

    /// `(−1)^{k₁+k₂}` for frequency node `idx`.
    #[inline]
    pub fn parity(&self, idx: usize) -> f64 {
        let (i, j) = (idx / self.n, idx % self.n);
        if (self.kint[i] + self.kint[j]) & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Unnormalized forward 2D DFT in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.fwd);
    }

    /// Inverse 2D DFT in place, including the `1/n²` factor.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inv);
        let scale = 1.0 / (self.n * self.n) as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        debug_assert_eq!(data.len(), self.n * self.n);
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(data, &mut scratch);
        transpose(data, self.n);
        plan.process_with_scratch(data, &mut scratch);
        transpose(data, self.n);
    }

    /// Sums `values[node]` into the slot of each node.
    pub fn bin<F: Fn(usize) -> Complex64>(&self, slots: &[u32], value: F) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.distinct.len()];
        for (idx, &s) in slots.iter().enumerate() {
            out[s as usize] += value(idx);
        }
        out
    }
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

pub(crate) fn tables(n: usize) -> Arc<Tables> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Tables>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(Tables::build(n)))
        .clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slots_cover_every_node() {
        let t = tables(16);
        let total: u32 = t.counts.iter().sum();
        assert_eq!(total as usize, 256);
        assert_eq!(t.distinct[0], 0);
        assert_eq!(t.kint[8], -8);
        let mut space_counts = vec![0u32; t.distinct.len()];
        for &s in &t.slot_space {
            space_counts[s as usize] += 1;
        }
        assert_eq!(space_counts, t.counts);
    }

    #[test]
    fn round_trip() {
        let t = tables(16);
        let orig: Vec<Complex64> = (0..256)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos()))
            .collect();
        let mut d = orig.clone();
        t.forward(&mut d);
        t.inverse(&mut d);
        for (a, b) in d.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
