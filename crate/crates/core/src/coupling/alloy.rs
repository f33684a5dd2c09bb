use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::spectral::{ComplexField, Grid2D};
use crate::{Complex64, Error, Result};

/// Largest lattice-sum tail (over sites beyond the cutoff) tolerated by evaluation.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// Radial shape of the single-site bump `φ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum BumpProfile {
    /// `exp(1 − 1/(1 − |x|²/R²))` inside `|x| < R`, zero outside; peak value 1.
    Compact { radius: f64 },
    /// `⟨x⟩^{−decay}`; needs `decay > 2`.
    Algebraic { decay: f64 },
}

/// Declared decay envelope `|φ(x)| ≤ C⟨x⟩^{−(2+ε)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Envelope {
    pub constant: f64,
    pub epsilon: f64,
}

impl Envelope {
    pub fn bound(&self, r: f64) -> f64 {
        self.constant * (1.0 + r * r).powf(-(2.0 + self.epsilon) / 2.0)
    }

    /// Upper bound on `Σ_{|k−y|>ρ} C|k−y|^{−(2+ε)}` over the unit lattice, uniform in `y`.
    /// Each site is charged the envelope integral over its own cell, which lies inside
    /// `|z − y| > ρ − 1`.
    pub fn tail_bound(&self, rho: f64) -> f64 {
        if rho <= 2.0 {
            return f64::INFINITY;
        }
        let e = self.epsilon;
        let s = rho - 2.0;
        2.0 * std::f64::consts::PI * self.constant * (s.powf(-e) / e + s.powf(-1.0 - e) / (1.0 + e))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlloyBump {
    pub profile: BumpProfile,
    pub amplitude: f64,
    pub envelope: Envelope,
    /// Lattice truncation radius; derived from the profile and envelope when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
}

impl Default for AlloyBump {
    /// Compact bump of radius 1/2 and unit height.
    fn default() -> Self {
        Self::compact(0.5, 1.0)
    }
}

impl AlloyBump {
    /// Compact bump with the tightest `ε = 1` envelope constant.
    pub fn compact(radius: f64, amplitude: f64) -> Self {
        let constant = amplitude.abs() * (1.0 + radius * radius).powf(1.5);
        Self {
            profile: BumpProfile::Compact { radius },
            amplitude,
            envelope: Envelope { constant, epsilon: 1.0 },
            cutoff: None,
        }
    }

    pub fn algebraic(decay: f64, amplitude: f64) -> Self {
        Self {
            profile: BumpProfile::Algebraic { decay },
            amplitude,
            envelope: Envelope { constant: amplitude.abs(), epsilon: decay - 2.0 },
            cutoff: None,
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        match self.profile {
            BumpProfile::Compact { radius } => {
                let s = r / radius;
                if s >= 1.0 {
                    0.0
                } else {
                    self.amplitude * (1.0 - 1.0 / (1.0 - s * s)).exp()
                }
            }
            BumpProfile::Algebraic { decay } => self.amplitude * (1.0 + r * r).powf(-decay / 2.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if !self.amplitude.is_finite() {
            return bad("bump amplitude must be finite".into());
        }
        let Envelope { constant, epsilon } = self.envelope;
        if !(constant.is_finite() && constant > 0.0 && epsilon.is_finite() && epsilon > 0.0) {
            return bad(format!("envelope needs C > 0 and ε > 0, got C = {constant}, ε = {epsilon}"));
        }
        match self.profile {
            BumpProfile::Compact { radius } => {
                if !(radius.is_finite() && radius > 0.0) {
                    return bad(format!("bump radius must be positive, got {radius}"));
                }
            }
            BumpProfile::Algebraic { decay } => {
                if !(decay.is_finite() && decay > 2.0) {
                    return bad(format!("algebraic decay must exceed 2, got {decay}"));
                }
                if decay < 2.0 + epsilon {
                    return bad(format!(
                        "profile decays like |x|^-{decay}, slower than the declared envelope exponent {}",
                        2.0 + epsilon
                    ));
                }
            }
        }
        let reach = match self.profile {
            BumpProfile::Compact { radius } => radius,
            BumpProfile::Algebraic { .. } => 1e3,
        };
        for i in 0..=4000 {
            let r = reach * i as f64 / 4000.0;
            let v = self.value(r).abs();
            if v > self.envelope.bound(r) * (1.0 + 1e-12) {
                return bad(format!(
                    "|φ({r})| = {v} exceeds the declared envelope {}",
                    self.envelope.bound(r)
                ));
            }
        }
        let needed = self.required_cutoff();
        if let Some(c) = self.cutoff {
            if !(c.is_finite() && c >= needed) {
                return bad(format!("cutoff {c} is below the radius {needed} needed for the tail tolerance"));
            }
        }
        Ok(())
    }

    /// Smallest truncation radius whose neglected lattice tail is below [`TAIL_TOLERANCE`].
    pub fn required_cutoff(&self) -> f64 {
        match self.profile {
            BumpProfile::Compact { radius } => radius,
            BumpProfile::Algebraic { .. } => {
                let env = self.envelope;
                let mut hi = 4.0;
                while env.tail_bound(hi) > TAIL_TOLERANCE && hi < 1e12 {
                    hi *= 2.0;
                }
                let mut lo = 2.0;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if env.tail_bound(mid) > TAIL_TOLERANCE {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hi
            }
        }
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff.unwrap_or_else(|| self.required_cutoff())
    }

    /// `∫φ` over the plane.
    pub fn integral(&self) -> f64 {
        use std::f64::consts::PI;
        match self.profile {
            // with v = 1 − s², ∫_{|y|<1} e^{1−1/(1−|y|²)} dy = π ∫₀¹ e^{1−1/v} dv
            BumpProfile::Compact { radius } => {
                let unit = simpson(|v| if v <= 0.0 { 0.0 } else { (1.0 - 1.0 / v).exp() }, 0.0, 1.0, 20_000);
                self.amplitude * radius * radius * PI * unit
            }
            BumpProfile::Algebraic { decay } => self.amplitude * 2.0 * PI / (decay - 2.0),
        }
    }

    /// Radial Fourier transform `Φ(η) = ∫ φ(x) e^{−iη·x} dx` of the truncated profile.
    pub fn fourier(&self, eta: f64) -> f64 {
        let reach = match self.profile {
            BumpProfile::Compact { radius } => radius,
            BumpProfile::Algebraic { .. } => self.cutoff(),
        };
        let intervals = match self.profile {
            BumpProfile::Compact { .. } => 800,
            BumpProfile::Algebraic { .. } => 8000,
        };
        2.0 * std::f64::consts::PI
            * simpson(|r| self.value(r) * bessel_j0(eta * r) * r, 0.0, reach, intervals)
    }

    /// Frequency beyond which `|Φ|` stays below about 1% of `Φ(0)`.
    pub fn bandwidth(&self) -> f64 {
        match self.profile {
            BumpProfile::Compact { radius } => 13.0 / radius,
            BumpProfile::Algebraic { .. } => 8.0,
        }
    }

    /// `C · sup_y Σ_k ⟨k − y⟩^{−(2+ε)}`, an upper bound for `sup |Σ_k X_k φ(x−k)|` when `|X_k| ≤ 1`.
    pub fn sup_bound(&self) -> f64 {
        // y may be taken in the centred unit cell, so |k − y| ≥ |k| − √2/2
        let reach = 400_i64;
        let half_diag = std::f64::consts::FRAC_1_SQRT_2;
        let mut s = 0.0;
        for k1 in -reach..=reach {
            for k2 in -reach..=reach {
                let r = ((k1 * k1 + k2 * k2) as f64).sqrt();
                if r <= reach as f64 {
                    s += self.envelope.bound((r - half_diag).max(0.0));
                }
            }
        }
        s + self.envelope.tail_bound(reach as f64 - half_diag)
    }
}

/// Law of the i.i.d. site variables `X_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlloyLaw {
    /// `±1` with equal probability.
    Rademacher,
    Uniform { low: f64, high: f64 },
}

impl AlloyLaw {
    pub fn validate(&self) -> Result<()> {
        if let AlloyLaw::Uniform { low, high } = *self {
            if !(low.is_finite() && high.is_finite() && low < high) {
                return Err(Error::InvalidSpec(format!("uniform law needs low < high, got [{low}, {high}]")));
            }
            if self.mean() < 0.0 {
                return Err(Error::InvalidSpec(format!("site law mean {} is negative", self.mean())));
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        match *self {
            AlloyLaw::Rademacher => 0.0,
            AlloyLaw::Uniform { low, high } => 0.5 * (low + high),
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            AlloyLaw::Rademacher => 1.0,
            AlloyLaw::Uniform { low, high } => (high - low).powi(2) / 12.0,
        }
    }

    pub fn sup(&self) -> f64 {
        match *self {
            AlloyLaw::Rademacher => 1.0,
            AlloyLaw::Uniform { low, high } => low.abs().max(high.abs()),
        }
    }

    pub(crate) fn from_word(&self, w: u64) -> f64 {
        match *self {
            AlloyLaw::Rademacher => {
                if w >> 63 == 1 {
                    1.0
                } else {
                    -1.0
                }
            }
            AlloyLaw::Uniform { low, high } => {
                let u = (w >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
                low + (high - low) * u
            }
        }
    }
}

/// Site-indexed draws: ChaCha8 keyed by the seed, one stream per lattice site, first word used.
#[derive(Clone, Debug)]
pub struct SiteRng {
    base: ChaCha8Rng,
}

impl SiteRng {
    pub fn new(seed: u64) -> Self {
        Self { base: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn word(&self, k: [i64; 2]) -> u64 {
        let mut rng = self.base.clone();
        rng.set_stream(site_stream(k));
        rng.next_u64()
    }
}

fn site_stream(k: [i64; 2]) -> u64 {
    ((k[0] as i32 as u32 as u64) << 32) | (k[1] as i32 as u32 as u64)
}

/// Seed of the `trial`-th independent realization drawn from a master seed.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    let mut z = seed ^ trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Half-open lattice box `[min, max)` in both coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeBox {
    pub min: [i64; 2],
    pub max: [i64; 2],
}

impl LatticeBox {
    pub fn new(min: [i64; 2], max: [i64; 2]) -> Result<Self> {
        let limit = i32::MAX as i64;
        if min[0] >= max[0] || min[1] >= max[1] {
            return Err(Error::arg(format!("empty lattice box {min:?}..{max:?}")));
        }
        if min.iter().chain(&max).any(|v| v.abs() > limit) {
            return Err(Error::arg("lattice box exceeds the 32-bit site index range"));
        }
        Ok(Self { min, max })
    }

    pub fn square(side: i64) -> Result<Self> {
        Self::new([0, 0], [side, side])
    }

    pub fn shape(&self) -> [usize; 2] {
        [(self.max[0] - self.min[0]) as usize, (self.max[1] - self.min[1]) as usize]
    }

    pub fn len(&self) -> usize {
        let [a, b] = self.shape();
        a * b
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One realization of `{X_k}` over a lattice box, row-major in `(k₁, k₂)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlloyRealization {
    pub region: LatticeBox,
    pub values: Vec<f64>,
}

impl AlloyRealization {
    pub fn get(&self, k: [i64; 2]) -> f64 {
        let w = self.region.shape()[1];
        let i = (k[0] - self.region.min[0]) as usize;
        let j = (k[1] - self.region.min[1]) as usize;
        self.values[i * w + j]
    }
}

pub fn sample_alloy(law: &AlloyLaw, seed: u64, region: LatticeBox) -> AlloyRealization {
    let rng = SiteRng::new(seed);
    let mut values = Vec::with_capacity(region.len());
    for k1 in region.min[0]..region.max[0] {
        for k2 in region.min[1]..region.max[1] {
            values.push(law.from_word(rng.word([k1, k2])));
        }
    }
    AlloyRealization { region, values }
}

/// `g(x) = Σ_k X_k φ(x − k)` with seeded site variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlloySpec {
    #[serde(default)]
    pub bump: AlloyBump,
    pub law: AlloyLaw,
    pub seed: u64,
}

impl AlloySpec {
    pub fn validate(&self) -> Result<()> {
        self.bump.validate()?;
        self.law.validate()?;
        if self.law.mean() > 0.0 && self.bump.integral() < 0.0 {
            return Err(Error::InvalidSpec("a law with positive mean needs ∫φ ≥ 0".into()));
        }
        Ok(())
    }

    /// `μ · ∫φ`.
    pub fn mean(&self) -> f64 {
        self.law.mean() * self.bump.integral()
    }

    pub fn sample(&self, region: LatticeBox) -> AlloyRealization {
        sample_alloy(&self.law, self.seed, region)
    }

    /// Samples of `g(n·x)` on the grid; sites farther than the cutoff from `n·x` are dropped.
    pub(crate) fn evaluate(&self, n: u32, grid: &Grid2D) -> Result<ComplexField> {
        let cut = self.bump.cutoff();
        let nf = n as f64;
        let size = grid.points_per_axis();
        let lo = nf * grid.coordinate(0);
        let hi = nf * grid.coordinate(size - 1);
        let region = LatticeBox::new(
            [(lo - cut).floor() as i64; 2],
            [(hi + cut).ceil() as i64 + 1; 2],
        )?;
        let x = self.sample(region);
        let coords: Vec<f64> = (0..size).map(|i| nf * grid.coordinate(i)).collect();
        let mut values = Vec::with_capacity(grid.len());
        for &y1 in &coords {
            for &y2 in &coords {
                let mut s = 0.0;
                for k1 in (y1 - cut).ceil() as i64..=(y1 + cut).floor() as i64 {
                    let d1 = y1 - k1 as f64;
                    let rem = (cut * cut - d1 * d1).max(0.0).sqrt();
                    for k2 in (y2 - rem).ceil() as i64..=(y2 + rem).floor() as i64 {
                        let d2 = y2 - k2 as f64;
                        let v = self.bump.value(d1.hypot(d2));
                        if v != 0.0 {
                            s += x.get([k1, k2]) * v;
                        }
                    }
                }
                values.push(Complex64::new(s, 0.0));
            }
        }
        ComplexField::from_values(*grid, values)
    }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let m = intervals + intervals % 2;
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// `J₀(z) = π⁻¹ ∫₀^π cos(z sin θ) dθ`; the trapezoid rule on this periodic integrand
/// converges geometrically once the node count exceeds `|z|`.
fn bessel_j0(z: f64) -> f64 {
    let m = 32 + z.abs().ceil() as usize;
    let mut s = 0.0;
    for j in 0..m {
        s += (z * (std::f64::consts::PI * j as f64 / m as f64).sin()).cos();
    }
    s / m as f64
}
