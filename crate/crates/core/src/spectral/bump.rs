//! The radial Littlewood-Paley cutoff `m`.
//!
//! `m(r) = 1` for `r <= 1`, `m(r) = 0` for `r >= 2`, and on `(1, 2)`
//!
//! ```text
//!     m(r) = ψ(2 - r) / (ψ(2 - r) + ψ(r - 1)),    ψ(t) = exp(-1/t)
//! ```
//!
//! which is C^∞ at both junctions, so the kernel `m̌` is Schwartz.

/// `exp(-1/t)` for `t > 0`, zero otherwise.
fn psi(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Evaluates the cutoff at radius `r = |ξ|/N`.
pub fn lp_bump(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let a = psi(2.0 - r);
        let b = psi(r - 1.0);
        a / (a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_and_support() {
        assert_eq!(lp_bump(0.0), 1.0);
        assert_eq!(lp_bump(1.0), 1.0);
        assert_eq!(lp_bump(2.0), 0.0);
        assert_eq!(lp_bump(7.0), 0.0);
        assert!((lp_bump(1.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn monotone_ramp() {
        let mut last = 1.0;
        for i in 1..1000 {
            let v = lp_bump(1.0 + i as f64 / 1000.0);
            assert!(v <= last && (0.0..=1.0).contains(&v));
            last = v;
        }
    }

    #[test]
    fn flat_at_junctions() {
        // all finite differences vanish to high order at r = 1 and r = 2
        let h = 1e-2;
        assert!(1.0 - lp_bump(1.0 + h) < 1e-40);
        assert!(lp_bump(2.0 - h) < 1e-40);
    }
}
