//! Seeded generation of test signals and frequency sets, and the small
//! statistics used by the scaling harnesses.
//!
//! Trial `t` of a scan uses a seed deterministically derived from the base
//! seed, so parallel and serial runs produce identical output.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::grid::{FrequencySet, SampledSignal};
use crate::Result;

/// RNG for trial `t` under a base seed (splitmix-style mixing).
pub fn trial_rng(base_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut z = base_seed
        .wrapping_add(trial.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(0x2545_f491_4f6c_dd1d);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

/// A mixture of Gaussian bumps and modulated bumps on `[x0, x0 + len·dx)`,
/// normalized to unit `L¹` mass.
pub fn random_signal<R: Rng>(rng: &mut R, len: usize, x0: f64, dx: f64) -> Result<SampledSignal> {
    let domain_len = len as f64 * dx;
    let bumps = rng.gen_range(2..=5);
    let mut params = Vec::with_capacity(bumps);
    for _ in 0..bumps {
        let center = x0 + rng.gen_range(0.15..0.85) * domain_len;
        let width = rng.gen_range(0.005..0.05) * domain_len;
        let amp = rng.gen_range(0.2..1.0);
        let modulation = if rng.gen_bool(0.5) {
            rng.gen_range(-32.0..32.0)
        } else {
            0.0
        };
        params.push((center, width, amp, modulation));
    }
    let mut f = SampledSignal::from_fn(len, x0, dx, |x| {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(c, w, a, nu) in &params {
            let t = (x - c) / w;
            let envelope = a * (-t * t).exp();
            acc += envelope
                * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * nu * (x - c));
        }
        acc
    })?;
    let mass = f.l1();
    if mass > 0.0 {
        let inv = Complex64::new(1.0 / mass, 0.0);
        for s in f.samples_mut() {
            *s *= inv;
        }
    }
    Ok(f)
}

/// `n` frequencies in `[lo, hi]` with every gap at least `min_gap`.
///
/// Gaps are drawn directly (minimum plus a share of the slack), so the
/// construction never rejects; requires `hi - lo > n·min_gap`.
pub fn random_frequencies<R: Rng>(
    rng: &mut R,
    n: usize,
    lo: f64,
    hi: f64,
    min_gap: f64,
) -> Result<FrequencySet> {
    assert!(hi - lo > n as f64 * min_gap, "range too small for gap");
    let slack = (hi - lo) - (n.saturating_sub(1)) as f64 * min_gap;
    let mut weights: Vec<f64> = (0..=n).map(|_| rng.gen_range(0.0f64..1.0)).collect();
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w *= slack / total;
    }
    let mut xi = Vec::with_capacity(n);
    let mut x = lo + weights[0];
    xi.push(x);
    for w in weights.iter().take(n).skip(1) {
        x += min_gap + w;
        xi.push(x);
    }
    FrequencySet::new(xi)
}

/// Least-squares slope and intercept of `log y` against `log x`.
/// `None` when fewer than two usable (positive) points remain.
pub fn loglog_fit(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let sx: f64 = logs.iter().map(|p| p.0).sum();
    let sy: f64 = logs.iter().map(|p| p.1).sum();
    let sxx: f64 = logs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = logs.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return None;
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    Some((slope, intercept))
}
