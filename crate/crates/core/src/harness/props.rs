//! Property suites runnable from the CLI (`props`), grouped by tag.

use std::f64::consts::PI;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{run_homogenization_sweep, SimTemplate, SweepConfig};
use crate::coupling::{convex_combine, evaluate, CouplingSpec, TrigPoly};
use crate::norms::{l4_spacetime, mixed_norm, AdmissiblePair};
use crate::resonance::resonance_sup_norm;
use crate::solver::{strang_step, Trajectory};
use crate::spectral::{
    bernstein_ratio, decay_samples, forward_transform, helmholtz_product_identity_residual, inverse_transform,
    lp_decay_check, lp_project_high, lp_project_low, spectrum_from_values, ComplexField, Grid2D,
};
use crate::{Complex64, Result};

pub const TAGS: [&str; 6] = ["spectral", "coupling", "resonance", "solver", "norms", "harness"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub tag: String,
    pub name: String,
    pub passed: bool,
    /// Measured value and the threshold it was held to.
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PropertyLedger {
    pub checks: Vec<PropertyCheck>,
}

impl PropertyLedger {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["tag", "name", "passed", "detail"])?;
        for c in &self.checks {
            out.write_record([c.tag.as_str(), c.name.as_str(), if c.passed { "true" } else { "false" }, &c.detail])?;
        }
        out.flush().map_err(|e| crate::Error::io("<csv>", e))
    }

    fn push(&mut self, tag: &str, name: &str, outcome: Result<(bool, String)>) {
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        self.checks.push(PropertyCheck { tag: tag.into(), name: name.into(), passed, detail });
    }
}

fn at_most(value: f64, limit: f64) -> (bool, String) {
    (value <= limit, format!("{value:.3e} <= {limit:.1e}"))
}

/// Random field with coefficients on `|k_j| <= kmax` (signed indices), decaying with `|k|`.
fn random_band_limited(grid: Grid2D, kmax: i64, rng: &mut ChaCha8Rng) -> Result<ComplexField> {
    let n = grid.points_per_axis();
    let mut coef = vec![Complex64::default(); grid.len()];
    for a in 0..n {
        for b in 0..n {
            let (k1, k2) = (grid.signed_index(a), grid.signed_index(b));
            if k1.abs() <= kmax && k2.abs() <= kmax {
                let w = 1.0 / (1.0 + (k1 * k1 + k2 * k2) as f64);
                coef[a * n + b] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * w;
            }
        }
    }
    Ok(inverse_transform(&spectrum_from_values(grid, coef)?))
}

fn random_field(grid: Grid2D, rng: &mut ChaCha8Rng) -> ComplexField {
    ComplexField::from_fn(grid, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn spectral(ledger: &mut PropertyLedger, rng: &mut ChaCha8Rng) {
    let grid = Grid2D::new(128, 16.0 * PI).expect("grid");
    let samples: Vec<ComplexField> = (0..4).map(|_| random_field(grid, rng)).collect();

    // ‖P_{≤N}f‖_∞ ≤ N π^{-1/2} ‖f‖_2 from |supp m| ≤ 4π, interpolated with L²
    let bernstein = || -> Result<(bool, String)> {
        let mut worst = 0.0_f64;
        for f in samples.iter().chain([&ComplexField::gaussian(grid, 1.0, 0.3)]) {
            for cutoff in [1.0, 2.0, 4.0, 8.0] {
                worst = worst.max(bernstein_ratio(f, cutoff, 2.0, 4.0)?);
            }
        }
        Ok(at_most(worst, 1.05 * PI.powf(-0.25)))
    };
    ledger.push("spectral", "bernstein_ratio_bounded_over_N", bernstein());

    let partition = || -> Result<(bool, String)> {
        let mut worst = 0.0_f64;
        for f in &samples {
            for cutoff in [0.5, 1.0, 2.0, 4.0, 8.0] {
                let sum = lp_project_low(f, cutoff)?.add(&lp_project_high(f, cutoff)?)?;
                worst = worst.max(sum.max_abs_diff(f)? / f.sup_norm());
            }
        }
        Ok(at_most(worst, 1e-12))
    };
    ledger.push("spectral", "lp_partition_of_unity", partition());

    let mut identity = || -> Result<(bool, String)> {
        let limit = (grid.points_per_axis() / 4 - 1) as i64;
        let mut worst = 0.0_f64;
        for _ in 0..10 {
            let f = random_band_limited(grid, rng.gen_range(1..limit), rng)?;
            let g = random_band_limited(grid, rng.gen_range(1..limit), rng)?;
            worst = worst.max(helmholtz_product_identity_residual(&f, &g)?);
        }
        Ok(at_most(worst, 1e-10))
    };
    ledger.push("spectral", "helmholtz_product_identity", identity());

    // 2N must stay below the Nyquist limit for every N, hence the finer grid
    let decay = || -> Result<(bool, String)> {
        let grid = Grid2D::new(256, 16.0 * PI)?;
        let bump = ComplexField::from_real_fn(grid, |x1, x2| {
            let r2 = x1 * x1 + x2 * x2;
            if r2 < 1.0 {
                (1.0 - 1.0 / (1.0 - r2)).exp()
            } else {
                0.0
            }
        });
        let pts = decay_samples(&grid, 1.0);
        let v: Vec<f64> =
            [2.0, 4.0, 8.0].iter().map(|&n| lp_decay_check(&bump, 1.0, n, 4.0, 5.0, &pts)).collect::<Result<_>>()?;
        let growth = v.iter().fold(0.0_f64, |a, &b| a.max(b)) / v[0];
        Ok(at_most(growth, 2.0))
    };
    ledger.push("spectral", "lp_decay_bounded_over_N", decay());

    let parseval = || -> Result<(bool, String)> {
        let f = &samples[0];
        let energy = forward_transform(f).energy() * grid.side_length().powi(2);
        Ok(at_most((energy - f.mass()).abs() / f.mass(), 1e-12))
    };
    ledger.push("spectral", "parseval", parseval());
}

fn coupling(ledger: &mut PropertyLedger, rng: &mut ChaCha8Rng) {
    let grid = Grid2D::new(64, 8.0 * PI).expect("grid");
    let a: CouplingSpec = TrigPoly::cosine([1, 0], 0.8).plus_constant(1.0).into();
    let b: CouplingSpec = TrigPoly::cosine([1, 2], 0.3).plus_cosine([0, 1], 0.2).plus_constant(0.5).into();
    let w = rng.gen_range(0.1..0.9);

    let linear = || -> Result<(bool, String)> {
        let c = convex_combine([(w, a.clone()), (1.0 - w, b.clone())])?;
        let mut worst = 0.0_f64;
        for n in [1, 2, 3] {
            let direct = evaluate(&a, n, &grid)?.scale_real(w).add(&evaluate(&b, n, &grid)?.scale_real(1.0 - w))?;
            worst = worst.max(evaluate(&c, n, &grid)?.max_abs_diff(&direct)?);
        }
        let mean = (c.mean_value() - (w * a.mean_value() + (1.0 - w) * b.mean_value())).abs();
        Ok(at_most(worst.max(mean), 1e-12))
    };
    ledger.push("coupling", "convex_combination_linearity", linear());

    let real = || -> Result<(bool, String)> { Ok(at_most(evaluate(&b, 3, &grid)?.max_imag(), 0.0)) };
    ledger.push("coupling", "evaluate_is_real", real());
}

fn resonance(ledger: &mut PropertyLedger, _rng: &mut ChaCha8Rng) {
    let grid = Grid2D::new(128, 8.0 * PI).expect("grid");
    let plane = || -> Result<(bool, String)> {
        let mut worst = 0.0_f64;
        for k in [[1, 0], [1, 1]] {
            let spec: CouplingSpec = TrigPoly::cosine(k, 1.0).into();
            for n in [1u32, 2, 4, 8] {
                let (sup, _) = resonance_sup_norm(&spec, n, 2.0 * PI, &grid)?;
                let k2 = ((k[0] * k[0] + k[1] * k[1]) as u32 * n * n) as f64;
                worst = worst.max((sup - 1.0 / (k2 + 1.0)).abs());
            }
        }
        Ok(at_most(worst, 1e-8))
    };
    ledger.push("resonance", "plane_wave_formula", plane());

    let convex = || -> Result<(bool, String)> {
        let a: CouplingSpec = TrigPoly::cosine([1, 0], 1.0).plus_constant(1.0).into();
        let b: CouplingSpec = TrigPoly::cosine([0, 2], 0.5).plus_cosine([1, 1], 0.5).plus_constant(1.0).into();
        let c = convex_combine([(0.3, a.clone()), (0.7, b.clone())])?;
        let mut excess = f64::NEG_INFINITY;
        for n in [1, 2, 4] {
            let (rc, _) = resonance_sup_norm(&c, n, 6.0, &grid)?;
            let (ra, _) = resonance_sup_norm(&a, n, 6.0, &grid)?;
            let (rb, _) = resonance_sup_norm(&b, n, 6.0, &grid)?;
            excess = excess.max(rc - (0.3 * ra + 0.7 * rb));
        }
        Ok(at_most(excess, 1e-12))
    };
    ledger.push("resonance", "convex_subadditivity", convex());
}

fn solver(ledger: &mut PropertyLedger, rng: &mut ChaCha8Rng) {
    let grid = Grid2D::new(64, 8.0 * PI).expect("grid");
    let u = random_band_limited(grid, 10, rng).expect("field").scale_real(20.0);
    let g = evaluate(&TrigPoly::cosine([1, 0], 1.0).plus_constant(1.0).into(), 2, &grid).expect("coupling");

    let mass = || -> Result<(bool, String)> {
        let v = strang_step(&u, 1e-2, &g)?;
        Ok(at_most((v.mass() - u.mass()).abs() / u.mass(), 1e-12))
    };
    ledger.push("solver", "step_conserves_mass", mass());

    let reversal = || -> Result<(bool, String)> {
        let back = strang_step(&strang_step(&u, 1e-2, &g)?, -1e-2, &g)?;
        Ok(at_most(back.max_abs_diff(&u)?, 1e-10))
    };
    ledger.push("solver", "time_reversal", reversal());

    let gauge = || -> Result<(bool, String)> {
        let phase = Complex64::from_polar(1.0, 0.7);
        let a = strang_step(&u.scale(phase), 1e-2, &g)?;
        let b = strang_step(&u, 1e-2, &g)?.scale(phase);
        Ok(at_most(a.max_abs_diff(&b)? / u.sup_norm(), 1e-12))
    };
    ledger.push("solver", "gauge_covariance", gauge());
}

fn norms(ledger: &mut PropertyLedger, rng: &mut ChaCha8Rng) {
    let grid = Grid2D::new(32, 8.0).expect("grid");
    let traj = |rng: &mut ChaCha8Rng| {
        Trajectory::from_samples((0..5).map(|_| random_field(grid, rng)).collect(), 0.1).expect("trajectory")
    };
    let (a, b) = (traj(rng), traj(rng));
    let sum = Trajectory::from_samples(
        a.fields().iter().zip(b.fields()).map(|(x, y)| x.add(y).expect("grid")).collect(),
        0.1,
    )
    .expect("trajectory");
    let pairs = [AdmissiblePair::new(f64::INFINITY, 2.0), AdmissiblePair::new(4.0, 4.0)];

    let axioms = || -> Result<(bool, String)> {
        let mut worst = 0.0_f64;
        let c = -2.5;
        let scaled = a.scaled(c);
        let zero = Trajectory::from_samples(vec![ComplexField::zeros(grid); 5], 0.1)?;
        let (la, lb, ls) = (l4_spacetime(&a)?, l4_spacetime(&b)?, l4_spacetime(&sum)?);
        worst = worst.max((l4_spacetime(&scaled)? - c.abs() * la).abs() / la);
        worst = worst.max((ls - (la + lb)).max(0.0));
        worst = worst.max(l4_spacetime(&zero)?);
        for p in pairs {
            let p = p?;
            let (ma, mb, ms) = (mixed_norm(&a, p)?, mixed_norm(&b, p)?, mixed_norm(&sum, p)?);
            worst = worst.max((mixed_norm(&scaled, p)? - c.abs() * ma).abs() / ma);
            worst = worst.max((ms - (ma + mb)).max(0.0));
            worst = worst.max(mixed_norm(&zero, p)?);
        }
        Ok(at_most(worst, 1e-12))
    };
    ledger.push("norms", "norm_axioms", axioms());
}

fn harness(ledger: &mut PropertyLedger, _rng: &mut ChaCha8Rng) {
    let determinism = || -> Result<(bool, String)> {
        let grid = Grid2D::new(32, 4.0 * PI)?;
        let sim = SimTemplate { grid, dt: 0.01, horizon: 0.2, store_every: 4, dealias: false };
        let cfg = SweepConfig::new(TrigPoly::cosine([1, 0], 1.0).plus_constant(1.0).into(), vec![1, 2, 3, 4], sim);
        let mut outputs = Vec::new();
        for threads in [1, 3] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| crate::Error::arg(e.to_string()))?;
            for _ in 0..2 {
                let r = pool.install(|| run_homogenization_sweep(&cfg))?;
                let mut buf = Vec::new();
                r.write_csv(&mut buf)?;
                outputs.push(buf);
            }
        }
        let same = outputs.windows(2).all(|w| w[0] == w[1]);
        Ok((same, format!("{} runs identical: {same}", outputs.len())))
    };
    ledger.push("harness", "sweep_bit_reproducible", determinism());
}

/// Runs the suites named in `tags` (all of them when empty) with inputs drawn from `seed`.
pub fn run_property_suite(tags: &[&str], seed: u64) -> Result<PropertyLedger> {
    for t in tags {
        if !TAGS.contains(t) {
            return Err(crate::Error::Config(format!("unknown property tag {t:?}; known: {TAGS:?}")));
        }
    }
    let mut ledger = PropertyLedger::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let suites: [(&str, fn(&mut PropertyLedger, &mut ChaCha8Rng)); 6] = [
        ("spectral", spectral),
        ("coupling", coupling),
        ("resonance", resonance),
        ("solver", solver),
        ("norms", norms),
        ("harness", harness),
    ];
    for (tag, suite) in suites {
        if tags.is_empty() || tags.contains(&tag) {
            suite(&mut ledger, &mut rng);
        }
    }
    Ok(ledger)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_suite_is_green() {
        let ledger = run_property_suite(&["spectral"], 0).unwrap();
        assert!(ledger.all_passed(), "{:?}", ledger.failures().collect::<Vec<_>>());
        assert!(ledger.checks.iter().all(|c| c.tag == "spectral"));
    }

    #[test]
    fn unknown_tag_is_a_config_error() {
        assert!(matches!(run_property_suite(&["spectra"], 0), Err(crate::Error::Config(_))));
    }
}
