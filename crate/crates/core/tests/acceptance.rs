//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line; the test
//! fails if any criterion does. Run with `--nocapture` to see the lines.

use std::f64::consts::PI;
use std::time::Instant;

use nls_homog::coupling::{evaluate, AlloyBump, AlloyLaw, CouplingSpec, PeriodicSampled, TrigPoly};
use nls_homog::harness::{run_alloy_mc, run_homogenization_sweep, run_property_suite};
use nls_homog::harness::{AlloyMcConfig, SimTemplate, SweepConfig, SCHEMA_VERSION};
use nls_homog::resonance::{decay_fit, resonance_sup_norm};
use nls_homog::solver::{evolve, evolve_final, scaling_symmetry_check, SimConfig};
use nls_homog::spectral::{
    decay_samples, helmholtz_product_identity_residual, inverse_transform, lp_decay_check, spectrum_from_values,
    ComplexField, Grid2D,
};
use nls_homog::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), nls_homog::Error>;

fn cos_plus_one() -> CouplingSpec {
    TrigPoly::cosine([1, 0], 1.0).plus_constant(1.0).into()
}

fn plane_wave_resonance() -> Outcome {
    let grid = Grid2D::new(256, 8.0 * PI)?;
    let mut worst = 0.0_f64;
    for k in [[1i64, 0], [1, 1]] {
        let spec: CouplingSpec = TrigPoly::cosine(k, 1.0).into();
        let k2 = (k[0] * k[0] + k[1] * k[1]) as f64;
        for n in [1u32, 2, 4, 8, 16] {
            let (sup, _) = resonance_sup_norm(&spec, n, 2.0 * PI, &grid)?;
            let nf = n as f64;
            worst = worst.max((sup - 1.0 / (nf * nf * k2 + 1.0)).abs());
        }
    }
    Ok((worst <= 1e-8, format!("max |sup - 1/(n²|k|²+1)| = {worst:.2e} (tol 1e-8)")))
}

fn periodic_decay() -> Outcome {
    let m = 6;
    let samples: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let (x, y) = (2.0 * PI * i as f64 / m as f64, 2.0 * PI * j as f64 / m as f64);
                    1.5 + 0.6 * x.cos() + 0.3 * (2.0 * y).sin() + 0.2 * (x + y).cos() + 0.15 * (x - 2.0 * y).sin()
                })
                .collect()
        })
        .collect();
    let sampled = PeriodicSampled { samples };
    let modes = sampled.nonzero_modes();
    let spec: CouplingSpec = sampled.into();
    let grid = Grid2D::new(256, 4.0 * PI)?;
    let pairs = [2u32, 4, 8, 16]
        .iter()
        .map(|&n| Ok((n as f64, resonance_sup_norm(&spec, n, PI, &grid)?.0)))
        .collect::<Result<Vec<_>, nls_homog::Error>>()?;
    let slope = decay_fit(&pairs)?.slope;
    let ok = modes >= 5 && slope > -2.3 && slope < -1.7;
    Ok((ok, format!("{modes} nonzero modes, slope {slope:.4} (want (-2.3, -1.7))")))
}

fn solver_correctness() -> Outcome {
    let grid = Grid2D::new(256, 16.0 * PI)?;
    let g = evaluate(&cos_plus_one(), 2, &grid)?;
    let u0 = ComplexField::gaussian(grid, 1.0, 1.0);

    let traj = evolve(&u0, &SimConfig::new(grid, 1e-3, 1.0, 100, &g)?)?;
    let m0 = u0.mass();
    let drift = traj.fields().iter().map(|f| ((f.mass() - m0) / m0).abs()).fold(0.0, f64::max);

    let run = |dt: f64| -> Result<ComplexField, nls_homog::Error> {
        let steps = (0.5 / dt).round() as usize;
        evolve_final(&u0, &SimConfig::new(grid, dt, 0.5, steps, &g)?)
    };
    let (a, b, c) = (run(0.02)?, run(0.01)?, run(0.005)?);
    let ratio = a.sub(&b)?.l2_norm() / b.sub(&c)?.l2_norm();

    let k = [2.0 * PI * 3.0 / grid.side_length(), 2.0 * PI * -2.0 / grid.side_length()];
    let wave = ComplexField::plane_wave(grid, k[0], k[1]);
    let end = evolve_final(&wave, &SimConfig::homogeneous(grid, 1e-3, 1.0, 1000, 1.0)?)?;
    let omega = k[0] * k[0] + k[1] * k[1] + 1.0;
    let exact = ComplexField::plane_wave(grid, k[0], k[1]).scale(Complex64::from_polar(1.0, -omega));
    let wave_err = end.max_abs_diff(&exact)?;

    let ok = drift <= 1e-10 && ratio > 3.5 && ratio < 4.5 && wave_err <= 1e-4;
    Ok((
        ok,
        format!("mass drift {drift:.2e} (<=1e-10), self-convergence {ratio:.3} (3.5..4.5), plane wave {wave_err:.2e} (<=1e-4)"),
    ))
}

fn band_limited(grid: Grid2D, kmax: i64, rng: &mut ChaCha8Rng) -> Result<ComplexField, nls_homog::Error> {
    let n = grid.points_per_axis();
    let mut coef = vec![Complex64::default(); grid.len()];
    for a in 0..n {
        for b in 0..n {
            let (k1, k2) = (grid.signed_index(a), grid.signed_index(b));
            if k1 * k1 + k2 * k2 <= kmax * kmax {
                coef[a * n + b] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
    }
    Ok(inverse_transform(&spectrum_from_values(grid, coef)?))
}

fn product_identity() -> Outcome {
    let grid = Grid2D::new(64, 8.0 * PI)?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0_f64;
    for _ in 0..50 {
        let (kf, kg) = (rng.gen_range(1..16), rng.gen_range(1..16));
        let f = band_limited(grid, kf, &mut rng)?;
        let g = band_limited(grid, kg, &mut rng)?;
        worst = worst.max(helmholtz_product_identity_residual(&f, &g)?);
    }
    Ok((worst <= 1e-10, format!("max residual over 50 pairs {worst:.2e} (<=1e-10)")))
}

fn lp_decay() -> Outcome {
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
    let v = [2.0, 4.0, 8.0]
        .iter()
        .map(|&n| lp_decay_check(&bump, 1.0, n, 4.0, 5.0, &pts))
        .collect::<Result<Vec<_>, _>>()?;
    // growth from any N to any larger N
    let growth = (0..v.len()).flat_map(|i| (i + 1..v.len()).map(move |j| (i, j))).map(|(i, j)| v[j] / v[i]);
    let worst = growth.fold(0.0, f64::max);
    Ok((worst <= 2.0, format!("V(N=2,4,8) = {}, worst growth {worst:.3} (<=2)", list(&v))))
}

fn sweep_config() -> Result<SweepConfig, nls_homog::Error> {
    let grid = Grid2D::new(256, 16.0 * PI)?;
    let sim = SimTemplate { grid, dt: 1e-3, horizon: 1.0, store_every: 10, dealias: false };
    Ok(SweepConfig::new(cos_plus_one(), vec![2, 4, 8, 16], sim))
}

fn list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", items.join(", "))
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn homogenization_and_duhamel() -> Result<((bool, String), (bool, String)), nls_homog::Error> {
    let r = run_homogenization_sweep(&sweep_config()?)?;
    let l4 = r.l4_diffs().ok_or_else(|| nls_homog::Error::Config("a sweep row failed".into()))?;
    let duh = r.duhamel_errors().ok_or_else(|| nls_homog::Error::Config("a sweep row failed".into()))?;
    let ratio = l4[3] / l4[0];
    let six = (strictly_decreasing(&l4) && ratio <= 0.3, format!("l4 diffs {}, n=16/n=2 = {ratio:.3} (<=0.3)", list(&l4)));
    let seven = (strictly_decreasing(&duh), format!("duhamel errors {}", list(&duh)));
    Ok((six, seven))
}

fn scaling_symmetry() -> Outcome {
    let grid = Grid2D::new(256, 16.0 * PI)?;
    let spec = cos_plus_one();
    let g = evaluate(&spec, 1, &grid)?;
    let v = evolve(&ComplexField::gaussian(grid, 1.0, 1.0), &SimConfig::new(grid, 1e-4, 0.5, 5000, &g)?)?;
    let defect = scaling_symmetry_check(&v, 2, 1.0, &spec)?;
    Ok((defect <= 1e-3, format!("relative defect {defect:.2e} (<=1e-3)")))
}

fn alloy_moments() -> Outcome {
    let cfg = AlloyMcConfig {
        schema_version: SCHEMA_VERSION,
        bump: AlloyBump::default(),
        law: AlloyLaw::Rademacher,
        cutoff: 2.0,
        n_values: vec![2, 4, 8],
        trials: 400,
        seed: 2024,
        grid: Grid2D::new(256, 32.0)?,
        outputs: None,
    };
    let t = run_alloy_mc(&cfg)?;
    let slope = t.fit.map(|f| f.slope).unwrap_or(f64::NAN);
    let ok = t.all_within_bound() && slope > -4.8 && slope < -3.2;
    let rows: Vec<String> =
        t.rows.iter().map(|r| format!("n={} {:.3e}±{:.1e} / bound {:.3e}", r.n, r.estimate, r.stderr, r.bound)).collect();
    Ok((ok, format!("{}; slope {slope:.3} (want (-4.8, -3.2))", rows.join(", "))))
}

fn property_suites() -> Outcome {
    let ledger = run_property_suite(&[], 0)?;
    let failed: Vec<String> = ledger.failures().map(|c| format!("{}/{}", c.tag, c.name)).collect();
    Ok((failed.is_empty(), format!("{} checks, failures: {failed:?}", ledger.checks.len())))
}

#[test]
fn acceptance() {
    let mut all = true;
    let mut line = |id: u32, name: &str, outcome: Outcome, seconds: f64| {
        let (ok, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        all &= ok;
        println!("criterion {id:>2} {} {name}: {detail} [{seconds:.1}s]", if ok { "PASS" } else { "FAIL" });
    };
    let timed = |f: fn() -> Outcome| {
        let t = Instant::now();
        let r = f();
        (r, t.elapsed().as_secs_f64())
    };

    let (r, s) = timed(plane_wave_resonance);
    line(1, "plane-wave resonance", r, s);
    let (r, s) = timed(periodic_decay);
    line(2, "periodic decay rate", r, s);
    let (r, s) = timed(solver_correctness);
    line(3, "solver correctness", r, s);
    let (r, s) = timed(product_identity);
    line(4, "resolvent product identity", r, s);
    let (r, s) = timed(lp_decay);
    line(5, "low-frequency decay", r, s);
    let t = Instant::now();
    let (six, seven) = match homogenization_and_duhamel() {
        Ok((a, b)) => (Ok(a), Ok(b)),
        Err(e) => (Err(nls_homog::Error::Config(e.to_string())), Err(e)),
    };
    let s = t.elapsed().as_secs_f64();
    line(6, "homogenization trend", six, s);
    line(7, "Duhamel functional trend", seven, 0.0);
    let (r, s) = timed(scaling_symmetry);
    line(8, "scaling symmetry", r, s);
    let (r, s) = timed(alloy_moments);
    line(9, "alloy moment bound", r, s);
    let (r, s) = timed(property_suites);
    line(10, "property suites", r, s);
    assert!(all, "some acceptance criteria failed");
}
