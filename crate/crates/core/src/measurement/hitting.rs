use serde::{Deserialize, Serialize};

use crate::error::{ensure, ensure_positive, Error, Result};
use crate::noise::{substream, IncrementSource, StreamingIncrements};
use crate::stats::{run_ensemble, Accumulator};

/// Largest accepted s-clock step.
pub const MAX_DS: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HittingOutcome {
    Plus,
    Minus,
}

impl HittingOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Plus => "plus",
            Self::Minus => "minus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HittingResult {
    pub outcome: HittingOutcome,
    /// First-passage value of the s-clock.
    pub s_col: f64,
    /// Steps taken.
    pub steps: usize,
}

/// Gamma_0 = ln|c+| - ln|c-| = (1/2) ln(|c+|^2 / |c-|^2).
pub fn gamma0_from_amplitudes(p_plus: f64, p_minus: f64) -> Result<f64> {
    ensure(p_plus > 0.0 && p_minus > 0.0, || {
        format!("both amplitudes must be nonzero (got |c+|^2 = {p_plus}, |c-|^2 = {p_minus})")
    })?;
    Ok(0.5 * (p_plus / p_minus).ln())
}

/// P(+) and P(-) for dGamma = tanh(Gamma) ds + dW started at `gamma0` and
/// stopped at +-b: P(+-) = (tanh b +- tanh Gamma_0) / (2 tanh b).
pub fn collapse_probability(gamma0: f64, b: f64) -> Result<(f64, f64)> {
    ensure_positive("b", b)?;
    ensure(gamma0.abs() < b, || format!("|gamma0| = {} must be below b = {b}", gamma0.abs()))?;
    let tb = b.tanh();
    let tg = gamma0.tanh();
    let p_plus = (tb + tg) / (2.0 * tb);
    Ok((p_plus, 1.0 - p_plus))
}

/// Mean first-passage value of the s-clock started from Gamma_0 = 0:
/// E[S] = b tanh b.
pub fn expected_collapse_s(b: f64) -> Result<f64> {
    expected_collapse_s_from(0.0, b)
}

/// Mean first-passage value started from `gamma0`:
/// E[S] = b tanh b - Gamma_0 tanh Gamma_0.
pub fn expected_collapse_s_from(gamma0: f64, b: f64) -> Result<f64> {
    ensure_positive("b", b)?;
    ensure(gamma0.abs() < b, || format!("|gamma0| = {} must be below b = {b}", gamma0.abs()))?;
    Ok(b * b.tanh() - gamma0 * gamma0.tanh())
}

/// Euler–Maruyama for dGamma = tanh(Gamma) ds + dW until |Gamma| >= b. The
/// crossing point is located by linear interpolation within the last step.
/// Gives up with [`Error::Runaway`] after `max_steps`.
pub fn simulate_hitting(
    gamma0: f64,
    b: f64,
    noise: &mut impl IncrementSource,
    max_steps: usize,
) -> Result<HittingResult> {
    ensure_positive("b", b)?;
    ensure(gamma0.abs() < b, || format!("|gamma0| = {} must be below b = {b}", gamma0.abs()))?;
    let ds = noise.dt();
    ensure(ds > 0.0 && ds <= MAX_DS, || format!("ds = {ds} must lie in (0, {MAX_DS}]"))?;
    let mut g = gamma0;
    for step in 0..max_steps {
        let dw = noise.next_increment().ok_or(Error::NoiseExhausted(step))?;
        let next = g + g.tanh() * ds + dw;
        if next.abs() >= b {
            let target = b.copysign(next);
            let frac = (target - g) / (next - g);
            let outcome = if next > 0.0 {
                HittingOutcome::Plus
            } else {
                HittingOutcome::Minus
            };
            return Ok(HittingResult {
                outcome,
                s_col: (step as f64 + frac.clamp(0.0, 1.0)) * ds,
                steps: step + 1,
            });
        }
        g = next;
    }
    Err(Error::Runaway {
        steps: max_steps,
        last: g.abs(),
    })
}

/// Step budget that makes a runaway negligible: fifty times the mean
/// passage time from the origin, plus a floor.
pub fn default_step_budget(b: f64, ds: f64) -> usize {
    ((50.0 * b * b.tanh() + 100.0) / ds).ceil() as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct HittingEnsemble {
    pub results: Vec<HittingResult>,
    pub p_plus: f64,
    pub mean_s: f64,
    pub std_s: f64,
}

/// Runs `n` independent passages; trajectory `i` draws its increments
/// from substream `i` of `seed`.
pub fn run_hitting_ensemble(gamma0: f64, b: f64, ds: f64, n: usize, seed: u64) -> Result<HittingEnsemble> {
    ensure(n > 0, || "ensemble needs at least one trajectory".into())?;
    let budget = default_step_budget(b, ds);
    let results = run_ensemble(n, |i| {
        let mut noise = StreamingIncrements::new(seed, substream(i, 0), ds)?;
        simulate_hitting(gamma0, b, &mut noise, budget)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let plus = results.iter().filter(|r| r.outcome == HittingOutcome::Plus).count();
    let acc: Accumulator = results.iter().map(|r| r.s_col).collect();
    Ok(HittingEnsemble {
        p_plus: plus as f64 / n as f64,
        mean_s: acc.mean(),
        std_s: acc.std_dev(),
        results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::NoisePath;
    use crate::stats::binomial_sigma;
    use proptest::prelude::*;

    #[test]
    fn probabilities() {
        assert_eq!(collapse_probability(0.0, 10.0).unwrap(), (0.5, 0.5));
        let g = gamma0_from_amplitudes(0.3, 0.7).unwrap();
        assert!((g.tanh() + 0.4).abs() < 1e-15);
        let (p, _) = collapse_probability(g, 20.0).unwrap();
        assert!((p - 0.3).abs() < 1e-8);
        assert!(collapse_probability(11.0, 10.0).is_err());
        assert!(gamma0_from_amplitudes(0.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn probabilities_sum_to_one(b in 0.5f64..60.0, f in -0.99f64..0.99) {
            let (p, m) = collapse_probability(f * b, b).unwrap();
            prop_assert!((p + m - 1.0).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }

    /// Backward-Kolmogorov oracle: P(+) and E[S] solve
    /// u'' / 2 + tanh(x) u' = 0 (resp. = -1) on (-b, b). Solved here by a
    /// shooting-free finite-difference linear system.
    fn kolmogorov(b: f64, rhs: f64, left: f64, right: f64, n: usize) -> Vec<f64> {
        let h = 2.0 * b / n as f64;
        let m = n - 1;
        let (mut lo, mut di, mut up, mut r) = (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
        for i in 0..m {
            let x = -b + (i + 1) as f64 * h;
            let d = x.tanh();
            lo[i] = 0.5 / (h * h) - d / (2.0 * h);
            di[i] = -1.0 / (h * h);
            up[i] = 0.5 / (h * h) + d / (2.0 * h);
            r[i] = -rhs;
        }
        r[0] -= lo[0] * left;
        r[m - 1] -= up[m - 1] * right;
        // Thomas algorithm
        for i in 1..m {
            let w = lo[i] / di[i - 1];
            di[i] -= w * up[i - 1];
            r[i] -= w * r[i - 1];
        }
        let mut u = vec![0.0; m];
        u[m - 1] = r[m - 1] / di[m - 1];
        for i in (0..m - 1).rev() {
            u[i] = (r[i] - up[i] * u[i + 1]) / di[i];
        }
        u
    }

    #[test]
    fn analytic_values_match_kolmogorov_oracle() {
        let b = 4.0;
        let n = 4000;
        let p = kolmogorov(b, 0.0, 0.0, 1.0, n);
        let s = kolmogorov(b, 1.0, 0.0, 0.0, n);
        let h = 2.0 * b / n as f64;
        for &x in &[-2.0, 0.0, 1.5] {
            let i = ((x + b) / h).round() as usize - 1;
            let (pp, _) = collapse_probability(x, b).unwrap();
            assert!((p[i] - pp).abs() < 1e-5, "{} vs {pp}", p[i]);
            let es = expected_collapse_s_from(x, b).unwrap();
            assert!((s[i] / es - 1.0).abs() < 1e-5, "{} vs {es}", s[i]);
        }
        let mid = n / 2 - 1;
        assert!((s[mid] / expected_collapse_s(b).unwrap() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn interpolated_crossing() {
        let path = NoisePath::from_increments(0.01, vec![0.0, 0.0, 6.0]).unwrap();
        let mut c = path.cursor();
        let r = simulate_hitting(0.0, 5.0, &mut c, 10).unwrap();
        assert_eq!(r.outcome, HittingOutcome::Plus);
        assert_eq!(r.steps, 3);
        assert!((r.s_col - (2.0 + 5.0 / 6.0) * 0.01).abs() < 1e-12);
    }

    #[test]
    fn runaway_and_exhaustion() {
        let path = NoisePath::from_increments(0.01, vec![0.0; 10]).unwrap();
        assert!(matches!(simulate_hitting(0.0, 5.0, &mut path.cursor(), 5), Err(Error::Runaway { .. })));
        assert!(matches!(simulate_hitting(0.0, 5.0, &mut path.cursor(), 50), Err(Error::NoiseExhausted(10))));
        let coarse = NoisePath::from_increments(0.1, vec![0.0; 10]).unwrap();
        assert!(simulate_hitting(0.0, 5.0, &mut coarse.cursor(), 5).is_err());
    }

    #[test]
    fn symmetric_ensemble() {
        let b = 5.0;
        let e = run_hitting_ensemble(0.0, b, 1e-2, 2000, 11).unwrap();
        assert!((e.p_plus - 0.5).abs() < 3.0 * binomial_sigma(0.5, 2000));
        let exact = expected_collapse_s(b).unwrap();
        assert!((e.mean_s - exact).abs() < 3.0 * e.std_s / (2000f64).sqrt() + 0.02 * exact);
    }

    #[test]
    fn ensemble_is_reproducible() {
        let a = run_hitting_ensemble(0.2, 5.0, 1e-2, 50, 3).unwrap();
        let b = run_hitting_ensemble(0.2, 5.0, 1e-2, 50, 3).unwrap();
        assert_eq!(a, b);
    }
}
