//! Cached 2D FFT plans over square row-major buffers.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

struct PlanPair {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plan_pair(n: usize) -> Arc<PlanPair> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<PlanPair>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(PlanPair {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

/// Unnormalized 2D transform engine for one grid size.
///
/// Owns its scratch space, so one instance per thread.
pub struct Fft2 {
    n: usize,
    plans: Arc<PlanPair>,
    scratch: Vec<Complex64>,
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let plans = plan_pair(n);
        let len = plans
            .forward
            .get_inplace_scratch_len()
            .max(plans.inverse.get_inplace_scratch_len());
        Self {
            n,
            plans,
            scratch: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// `Σ f(x) e^{-2πi k·j/N}` in place.
    pub fn forward(&mut self, data: &mut [Complex64]) {
        let fft = self.plans.forward.clone();
        self.run(data, fft.as_ref());
    }

    /// `Σ c(k) e^{+2πi k·j/N}` in place (no `1/N²`).
    pub fn inverse(&mut self, data: &mut [Complex64]) {
        let fft = self.plans.inverse.clone();
        self.run(data, fft.as_ref());
    }

    fn run(&mut self, data: &mut [Complex64], fft: &dyn Fft<f64>) {
        assert_eq!(data.len(), self.n * self.n, "buffer is not n×n");
        fft.process_with_scratch(data, &mut self.scratch);
        transpose_square(data, self.n);
        fft.process_with_scratch(data, &mut self.scratch);
        transpose_square(data, self.n);
    }
}

fn transpose_square(data: &mut [Complex64], n: usize) {
    const BLOCK: usize = 16;
    for bi in (0..n).step_by(BLOCK) {
        for bj in (bi..n).step_by(BLOCK) {
            for i in bi..(bi + BLOCK).min(n) {
                let start = if bi == bj { i + 1 } else { bj };
                for j in start..(bj + BLOCK).min(n) {
                    data.swap(i * n + j, j * n + i);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transpose_is_involution() {
        let n = 40;
        let orig: Vec<Complex64> = (0..n * n).map(|k| Complex64::new(k as f64, 0.0)).collect();
        let mut d = orig.clone();
        transpose_square(&mut d, n);
        assert_eq!(d[1], orig[n]);
        assert_eq!(d[3 * n + 7], orig[7 * n + 3]);
        transpose_square(&mut d, n);
        assert_eq!(d, orig);
    }

    #[test]
    fn forward_matches_naive_dft() {
        let n = 8;
        let data: Vec<Complex64> = (0..n * n)
            .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
            .collect();
        let mut fast = data.clone();
        Fft2::new(n).forward(&mut fast);
        for k1 in 0..n {
            for k2 in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for j1 in 0..n {
                    for j2 in 0..n {
                        let phase = -2.0 * std::f64::consts::PI * ((k1 * j1 + k2 * j2) as f64)
                            / n as f64;
                        acc += data[j1 * n + j2] * Complex64::from_polar(1.0, phase);
                    }
                }
                assert!((acc - fast[k1 * n + k2]).norm() < 1e-10);
            }
        }
    }
}
