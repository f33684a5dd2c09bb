use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::Mode;
use crate::{Complex64, Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;

/// One Fourier coefficient `c · e^{ik·x}`; `c` is stored as `[re, im]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigTerm {
    pub k: [i64; 2],
    pub c: [f64; 2],
}

/// `g(x) = Σ c_k e^{ik·x}` over a finite set of `k ∈ ℤ²`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigPoly {
    pub coeffs: Vec<TrigTerm>,
}

impl TrigPoly {
    pub fn new(coeffs: impl IntoIterator<Item = ([i64; 2], Complex64)>) -> Self {
        Self {
            coeffs: coeffs.into_iter().map(|(k, c)| TrigTerm { k, c: [c.re, c.im] }).collect(),
        }
    }

    pub fn constant(c0: f64) -> Self {
        Self::new([([0, 0], Complex64::new(c0, 0.0))])
    }

    /// `amplitude · cos(k·x)`.
    pub fn cosine(k: [i64; 2], amplitude: f64) -> Self {
        Self::constant(0.0).plus_cosine(k, amplitude)
    }

    /// Adds `amplitude · cos(k·x)` by splitting the amplitude over `±k`.
    pub fn plus_cosine(mut self, k: [i64; 2], amplitude: f64) -> Self {
        self.add_to([k[0], k[1]], Complex64::new(amplitude / 2.0, 0.0));
        self.add_to([-k[0], -k[1]], Complex64::new(amplitude / 2.0, 0.0));
        self
    }

    pub fn plus_constant(mut self, c0: f64) -> Self {
        self.add_to([0, 0], Complex64::new(c0, 0.0));
        self
    }

    fn add_to(&mut self, k: [i64; 2], c: Complex64) {
        match self.coeffs.iter_mut().find(|t| t.k == k) {
            Some(t) => {
                t.c[0] += c.re;
                t.c[1] += c.im;
            }
            None => self.coeffs.push(TrigTerm { k, c: [c.re, c.im] }),
        }
    }

    pub fn coefficient(&self, k: [i64; 2]) -> Complex64 {
        self.coeffs
            .iter()
            .find(|t| t.k == k)
            .map(|t| Complex64::new(t.c[0], t.c[1]))
            .unwrap_or_default()
    }

    pub fn validate(&self) -> Result<()> {
        let terms: Vec<(Vec<i64>, Complex64)> = self
            .coeffs
            .iter()
            .map(|t| (t.k.to_vec(), Complex64::new(t.c[0], t.c[1])))
            .collect();
        validate_hermitian(&terms)
    }

    pub fn mean(&self) -> f64 {
        self.coefficient([0, 0]).re
    }

    pub(crate) fn modes(&self) -> Vec<Mode> {
        self.coeffs
            .iter()
            .filter(|t| t.c != [0.0, 0.0])
            .map(|t| Mode {
                omega: [t.k[0] as f64, t.k[1] as f64],
                c: Complex64::new(t.c[0], t.c[1]),
            })
            .collect()
    }
}

/// Coefficient of `G` on the `d`-torus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuasiTerm {
    pub k: Vec<i64>,
    pub c: [f64; 2],
}

/// `g(x) = G(Ax)` with `G` a trigonometric polynomial on `ℤ^d` and `A` a `d×2` matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuasiPeriodic {
    pub coeffs: Vec<QuasiTerm>,
    pub a: Vec<[f64; 2]>,
}

impl QuasiPeriodic {
    pub fn dimension(&self) -> usize {
        self.a.len()
    }

    fn frequency(&self, k: &[i64]) -> [f64; 2] {
        let mut w = [0.0; 2];
        for (kj, row) in k.iter().zip(&self.a) {
            w[0] += *kj as f64 * row[0];
            w[1] += *kj as f64 * row[1];
        }
        w
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dimension();
        if d == 0 {
            return Err(Error::InvalidSpec("quasi-periodic matrix A has no rows".into()));
        }
        if self.a.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("matrix A has non-finite entries".into()));
        }
        if let Some(t) = self.coeffs.iter().find(|t| t.k.len() != d) {
            return Err(Error::InvalidSpec(format!(
                "frequency {:?} has length {}, expected {d}",
                t.k,
                t.k.len()
            )));
        }
        let terms: Vec<(Vec<i64>, Complex64)> = self
            .coeffs
            .iter()
            .map(|t| (t.k.clone(), Complex64::new(t.c[0], t.c[1])))
            .collect();
        validate_hermitian(&terms)?;

        let scale = self.a.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
        for t in &self.coeffs {
            if t.k.iter().all(|&v| v == 0) || t.c == [0.0, 0.0] {
                continue;
            }
            let w = self.frequency(&t.k);
            let norm = w[0].hypot(w[1]);
            let kmax = t.k.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0) as f64;
            if norm <= 1e-12 * scale * kmax {
                return Err(Error::InvalidSpec(format!(
                    "k = {:?} gives k·A = 0; rows of A are dependent over the integers",
                    t.k
                )));
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        self.coeffs
            .iter()
            .filter(|t| t.k.iter().all(|&v| v == 0))
            .map(|t| t.c[0])
            .sum()
    }

    pub(crate) fn modes(&self) -> Vec<Mode> {
        self.coeffs
            .iter()
            .filter(|t| t.c != [0.0, 0.0])
            .map(|t| Mode { omega: self.frequency(&t.k), c: Complex64::new(t.c[0], t.c[1]) })
            .collect()
    }
}

/// Real samples of a `2π`-periodic function on the uniform `M×M` lattice of `[0, 2π)²`.
///
/// `samples[a][b]` is the value at `(2πa/M, 2πb/M)`. Off-lattice values come from the
/// trigonometric interpolant; for even `M` the Nyquist coefficient is split evenly
/// between `±M/2` so the interpolant stays real.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodicSampled {
    pub samples: Vec<Vec<f64>>,
}

impl PeriodicSampled {
    pub fn size(&self) -> usize {
        self.samples.len()
    }

    /// Rows of comma-separated numbers, no header.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut samples = Vec::new();
        for record in reader.records() {
            let record = record?;
            let row = record
                .iter()
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|e| Error::InvalidSpec(format!("bad sample {s:?}: {e}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            if !row.is_empty() {
                samples.push(row);
            }
        }
        let spec = Self { samples };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_csv_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.size();
        if m < 2 {
            return Err(Error::InvalidSpec("periodic samples need at least a 2x2 lattice".into()));
        }
        if self.samples.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidSpec(format!("periodic samples must form an {m}x{m} square")));
        }
        if self.samples.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("periodic samples contain non-finite values".into()));
        }
        if self.mean() < 0.0 {
            return Err(Error::InvalidSpec(format!(
                "periodic sample mean {} is negative",
                self.mean()
            )));
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        let m = self.size();
        self.samples.iter().flatten().sum::<f64>() / (m * m) as f64
    }

    pub fn sup(&self) -> f64 {
        self.samples.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Discrete Fourier coefficients `ĝ(k)`, `k ∈ {0..M-1}²`.
    fn dft(&self) -> Vec<Vec<Complex64>> {
        let m = self.size();
        let tw: Vec<Complex64> = (0..m)
            .map(|j| Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * j as f64 / m as f64))
            .collect();
        // transform along b, then along a
        let mut half = vec![vec![Complex64::default(); m]; m];
        for a in 0..m {
            for k2 in 0..m {
                let mut s = Complex64::default();
                for b in 0..m {
                    s += tw[(k2 * b) % m] * self.samples[a][b];
                }
                half[a][k2] = s;
            }
        }
        let mut out = vec![vec![Complex64::default(); m]; m];
        let norm = 1.0 / (m * m) as f64;
        for k1 in 0..m {
            for k2 in 0..m {
                let mut s = Complex64::default();
                for (a, row) in half.iter().enumerate() {
                    s += tw[(k1 * a) % m] * row[k2];
                }
                out[k1][k2] = s * norm;
            }
        }
        out
    }

    /// Terms of the real trigonometric interpolant.
    pub(crate) fn modes(&self) -> Vec<Mode> {
        let m = self.size();
        let coef = self.dft();
        let peak = coef.iter().flatten().fold(0.0_f64, |p, c| p.max(c.norm()));
        let half = (m / 2) as i64;
        let range: Vec<i64> = (-half..=half).collect();
        let weight = |k: i64| if m % 2 == 0 && k.abs() == half { 0.5 } else { 1.0 };
        let mut modes = Vec::new();
        for &k1 in &range {
            for &k2 in &range {
                let c = coef[k1.rem_euclid(m as i64) as usize][k2.rem_euclid(m as i64) as usize]
                    * (weight(k1) * weight(k2));
                if c.norm() > 1e-15 * peak {
                    modes.push(Mode { omega: [k1 as f64, k2 as f64], c });
                }
            }
        }
        modes
    }

    /// Number of Fourier modes of the sample lattice above round-off.
    pub fn nonzero_modes(&self) -> usize {
        let coef = self.dft();
        let peak = coef.iter().flatten().fold(0.0_f64, |p, c| p.max(c.norm()));
        coef.iter().flatten().filter(|c| c.norm() > 1e-12 * peak).count()
    }
}

fn validate_hermitian(terms: &[(Vec<i64>, Complex64)]) -> Result<()> {
    let mut map: HashMap<&[i64], Complex64> = HashMap::with_capacity(terms.len());
    for (k, c) in terms {
        if !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::InvalidSpec(format!("coefficient at {k:?} is not finite")));
        }
        if map.insert(k.as_slice(), *c).is_some() {
            return Err(Error::InvalidSpec(format!("frequency {k:?} listed twice")));
        }
    }
    for (k, c) in terms {
        let neg: Vec<i64> = k.iter().map(|v| -v).collect();
        let partner = map.get(neg.as_slice()).copied().unwrap_or_default();
        if (partner - c.conj()).norm() > HERMITIAN_TOL * c.norm().max(1.0) {
            return Err(Error::InvalidSpec(format!(
                "coefficients at {k:?} and {neg:?} are not complex conjugates; g must be real"
            )));
        }
        if k.iter().all(|&v| v == 0) && c.re < 0.0 {
            return Err(Error::InvalidSpec(format!("mean coefficient {} is negative", c.re)));
        }
    }
    Ok(())
}
