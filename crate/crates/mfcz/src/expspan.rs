//! Finite spans of complex exponentials on an interval: Gram matrices,
//! minimal-norm moment matching, and the normalized evaluation-kernel bound.
//!
//! The span used for projection is `span{e^{-2πiξ_j y}}` on `L²(J)`: the
//! matched moments `∫ f e^{2πiξ_j y} dy` are unconjugated, and with the
//! conjugate span the Gram system `B c = m` is exactly the optimality
//! condition of the constrained norm minimization.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::grid::{FrequencySet, Interval, SampledSignal};
use crate::{Error, Result};

/// Gram solves with condition number above this fall back to a spectral
/// pseudo-inverse and are flagged as regularized.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Relative eigenvalue cutoff of the regularized solve.
pub const EIGENVALUE_CUTOFF: f64 = 1e-12;

fn check_gap(j: &Interval, xi: &FrequencySet) -> Result<()> {
    let threshold = 1e-9 / j.len();
    let gap = xi.min_gap();
    if xi.len() > 1 && gap < threshold {
        return Err(Error::NearCoincidentFrequencies { gap, threshold });
    }
    Ok(())
}

/// The closed-form Gram matrix `B_{jl} = ∫_J e^{2πi(ξ_j - ξ_l) y} dy`.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub interval: Interval,
    matrix: DMatrix<Complex64>,
}

impl GramMatrix {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }
}

/// Closed-form entries: `(e^{2πiδb} - e^{2πiδa})/(2πiδ)` off the diagonal,
/// `|J|` on it. Hermitian by construction.
pub fn gram(j: &Interval, xi: &FrequencySet) -> Result<GramMatrix> {
    check_gap(j, xi)?;
    let n = xi.len();
    let f = xi.values();
    let mut matrix = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for row in 0..n {
        for col in 0..n {
            matrix[(row, col)] = if row == col {
                Complex64::new(j.len(), 0.0)
            } else {
                let delta = f[row] - f[col];
                let two_pi_i_delta = Complex64::new(0.0, 2.0 * PI * delta);
                ((two_pi_i_delta * j.b).exp() - (two_pi_i_delta * j.a).exp()) / two_pi_i_delta
            };
        }
    }
    Ok(GramMatrix {
        interval: *j,
        matrix,
    })
}

/// The Gram of the same inner products under the grid's rectangle rule:
/// `B_{jl} = dx·Σ_{x_i ∈ J} e^{2πi(ξ_j - ξ_l) x_i}`.
///
/// This is the matrix the projection solves against, so that the vanishing
/// moments of `b_I = f_I - g_I` are exact identities on the grid.
pub fn discrete_gram(template: &SampledSignal, j: &Interval, xi: &FrequencySet) -> Result<GramMatrix> {
    check_gap(j, xi)?;
    let n = xi.len();
    let f = xi.values();
    let range = template.index_range(j);
    let mut matrix = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for row in 0..n {
        for col in row..n {
            let delta = f[row] - f[col];
            let mut acc = Complex64::new(0.0, 0.0);
            if row == col {
                acc = Complex64::new(range.len() as f64, 0.0);
            } else {
                for i in range.clone() {
                    let x = template.point(i);
                    acc += Complex64::from_polar(1.0, 2.0 * PI * delta * x);
                }
            }
            matrix[(row, col)] = acc * template.dx;
            matrix[(col, row)] = (acc * template.dx).conj();
        }
    }
    Ok(GramMatrix {
        interval: *j,
        matrix,
    })
}

/// Rectangle-rule moments `m_j = ∫_J f(y) e^{2πiξ_j y} dy`.
pub fn moments(f: &SampledSignal, j: &Interval, xi: &FrequencySet) -> Vec<Complex64> {
    let range = f.index_range(j);
    xi.values()
        .iter()
        .map(|&freq| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in range.clone() {
                acc += f.samples()[i] * Complex64::from_polar(1.0, 2.0 * PI * freq * f.point(i));
            }
            acc * f.dx
        })
        .collect()
}

/// Outcome of a Hermitian Gram solve.
#[derive(Debug, Clone)]
struct HermitianSolve {
    solution: DVector<Complex64>,
    condition: f64,
    regularized: bool,
}

/// Solve `B x = rhs` for Hermitian positive (semi)definite `B` via
/// eigendecomposition; eigenvalues below the relative cutoff are dropped
/// when the condition number exceeds [`CONDITION_LIMIT`].
fn solve_hermitian(b: &DMatrix<Complex64>, rhs: &DVector<Complex64>) -> HermitianSolve {
    let eigen = b.clone().symmetric_eigen();
    let max_ev = eigen.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let min_ev = eigen
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let condition = if min_ev > 0.0 {
        max_ev / min_ev
    } else {
        f64::INFINITY
    };
    let regularized = condition > CONDITION_LIMIT;
    let cutoff = EIGENVALUE_CUTOFF * max_ev;
    let projected = eigen.eigenvectors.adjoint() * rhs;
    let mut scaled = projected;
    for (i, v) in scaled.iter_mut().enumerate() {
        let ev = eigen.eigenvalues[i];
        if regularized && ev < cutoff {
            *v = Complex64::new(0.0, 0.0);
        } else {
            *v /= Complex64::new(ev, 0.0);
        }
    }
    HermitianSolve {
        solution: &eigen.eigenvectors * scaled,
        condition,
        regularized,
    }
}

/// The minimal-norm moment-matching projection `g_I`.
#[derive(Debug, Clone)]
pub struct RieszProjection {
    /// `g_I` on the grid of the input signal, zero outside `J`.
    pub signal: SampledSignal,
    /// Coefficients of `g_I = Σ_l c_l e^{-2πiξ_l y}` on `J`.
    pub coefficients: Vec<Complex64>,
    /// Max moment mismatch relative to `1 + ‖f_I‖_{L¹}`.
    pub moment_residual: f64,
    /// Condition number of the Gram solve.
    pub condition: f64,
    /// True when the solve fell back to the spectral pseudo-inverse.
    pub regularized: bool,
}

/// Project `f_I` onto the exponential span over `J`: returns the unique
/// minimal-`L²(J)`-norm function of the span whose rectangle-rule moments
/// against every `e^{2πiξ_j y}` match those of `f_I`.
pub fn riesz_project(
    f_i: &SampledSignal,
    j: &Interval,
    xi: &FrequencySet,
) -> Result<RieszProjection> {
    let b = discrete_gram(f_i, j, xi)?;
    let m = moments(f_i, j, xi);
    let rhs = DVector::from_vec(m.clone());
    let solve = solve_hermitian(b.matrix(), &rhs);
    let coefficients: Vec<Complex64> = solve.solution.iter().cloned().collect();

    let range = f_i.index_range(j);
    let mut signal = SampledSignal::zeros(f_i.len(), f_i.x0, f_i.dx)?;
    for i in range {
        let x = signal.point(i);
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, &freq) in coefficients.iter().zip(xi.values()) {
            acc += c * Complex64::from_polar(1.0, -2.0 * PI * freq * x);
        }
        signal.samples_mut()[i] = acc;
    }

    let achieved = moments(&signal, j, xi);
    let scale = 1.0 + f_i.l1();
    let moment_residual = achieved
        .iter()
        .zip(&m)
        .map(|(a, want)| (a - want).norm())
        .fold(0.0, f64::max)
        / scale;

    Ok(RieszProjection {
        signal,
        coefficients,
        moment_residual,
        condition: solve.condition,
        regularized: solve.regularized,
    })
}

/// Result of the normalized evaluation-kernel scan.
#[derive(Debug, Clone, Copy)]
pub struct BeRatio {
    pub value: f64,
    pub regularized: bool,
}

/// Max over equispaced `x ∈ I` of `√(e(x)ᴴ B⁻¹ e(x)) · √(|I|/N)` with
/// `B = gram(3I, ξ)` and `e(x)_j = e^{-2πiξ_j x}`.
///
/// This is `sup_v |v(x)|/‖v‖_{L²(3I)}` over the span, divided by the
/// Borwein–Erdélyi bound `√(N/|I|)`, so it must be ≤ 1 up to conditioning.
pub fn be_ratio(i: &Interval, xi: &FrequencySet, eval_points: usize) -> Result<BeRatio> {
    if eval_points < 64 {
        return Err(Error::InvalidParameter(format!(
            "be_ratio requires at least 64 evaluation points, got {eval_points}"
        )));
    }
    let triple = i.dilate(3.0);
    let b = gram(&triple, xi)?;
    let n = xi.len();
    let eigen = b.matrix().clone().symmetric_eigen();
    let max_ev = eigen.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let min_ev = eigen
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let condition = if min_ev > 0.0 {
        max_ev / min_ev
    } else {
        f64::INFINITY
    };
    let regularized = condition > CONDITION_LIMIT;
    let cutoff = EIGENVALUE_CUTOFF * max_ev;

    let mut kernel_max = 0.0f64;
    for t in 0..eval_points {
        let x = i.a + (t as f64 + 0.5) * i.len() / eval_points as f64;
        // For the span of b_j(y) = e^{-2πiξ_j y} with ‖Σc_j b_j‖² = cᴴBc,
        // the kernel diagonal is sup_c |Σc_j b_j(x)|²/cᴴBc = ē(x)ᴴB⁻¹ē(x)
        // with ē(x)_j = conj(b_j(x)) = e^{+2πiξ_j x}.
        let e = DVector::from_iterator(
            n,
            xi.values()
                .iter()
                .map(|&f| Complex64::from_polar(1.0, 2.0 * PI * f * x)),
        );
        let projected = eigen.eigenvectors.adjoint() * e;
        let mut k = 0.0f64;
        for (idx, v) in projected.iter().enumerate() {
            let ev = eigen.eigenvalues[idx];
            if regularized && ev < cutoff {
                continue;
            }
            k += v.norm_sqr() / ev;
        }
        kernel_max = kernel_max.max(k);
    }
    Ok(BeRatio {
        value: (kernel_max * i.len() / n as f64).sqrt(),
        regularized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    fn xs(v: &[f64]) -> FrequencySet {
        FrequencySet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn gram_single_frequency() {
        let g = gram(&iv(2.0, 4.5), &xs(&[1.7])).unwrap();
        assert_eq!(g.matrix().nrows(), 1);
        assert!((g.matrix()[(0, 0)].re - 2.5).abs() < 1e-14);
        assert!(g.matrix()[(0, 0)].im.abs() < 1e-14);
    }

    #[test]
    fn gram_orthogonal_pair() {
        // Off-diagonal integral of e^{±2πiy/3} over a full period vanishes.
        let g = gram(&iv(0.0, 3.0), &xs(&[0.0, 1.0 / 3.0])).unwrap();
        for row in 0..2 {
            for col in 0..2 {
                let want = if row == col { 3.0 } else { 0.0 };
                assert!((g.matrix()[(row, col)] - Complex64::new(want, 0.0)).norm() < 1e-13);
            }
        }
    }

    /// Simpson-rule quadrature oracle for a Gram entry (the rectangle rule
    /// only converges at first order, far too slow to check closed forms).
    fn simpson_gram_entry(j: &Interval, delta: f64, panels: usize) -> Complex64 {
        let h = j.len() / panels as f64;
        let f = |y: f64| Complex64::from_polar(1.0, 2.0 * PI * delta * y);
        let mut acc = f(j.a) + f(j.b);
        for t in 1..panels {
            let w = if t % 2 == 0 { 2.0 } else { 4.0 };
            acc += f(j.a + t as f64 * h) * w;
        }
        acc * h / 3.0
    }

    #[test]
    fn gram_matches_quadrature_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = rng.gen_range(-2.0..2.0);
            let j = iv(a, a + rng.gen_range(0.5..4.0));
            let mut f: Vec<f64> = (0..4).map(|_| rng.gen_range(-8.0..8.0)).collect();
            f.sort_by(|x, y| x.partial_cmp(y).unwrap());
            if f.windows(2).any(|w| w[1] - w[0] < 1e-3) {
                continue;
            }
            let set = xs(&f);
            let g = gram(&j, &set).unwrap();
            for row in 0..4 {
                for col in 0..4 {
                    let oracle = simpson_gram_entry(&j, f[row] - f[col], 4096);
                    assert!(
                        (g.matrix()[(row, col)] - oracle).norm() < 1e-8,
                        "entry ({row},{col})"
                    );
                }
            }
        }
    }

    #[test]
    fn moments_examples() {
        let n = 3 << 12;
        let dx = 3.0 / n as f64;
        let zero = SampledSignal::zeros(n, 0.0, dx).unwrap();
        let m = moments(&zero, &iv(0.0, 3.0), &xs(&[0.0, 0.4]));
        assert!(m.iter().all(|z| z.norm() == 0.0));

        let ind = SampledSignal::from_fn(n, 0.0, dx, |x| {
            if (1.0..2.0).contains(&x) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .unwrap();
        let m = moments(&ind, &iv(1.0, 2.0), &xs(&[0.0]));
        assert!((m[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);

        let m = moments(&ind, &iv(1.0, 2.0), &xs(&[1.0 / 3.0]));
        let want = -3.0 * 3f64.sqrt() / (2.0 * PI);
        assert!((m[0].re - want).abs() < 1e-3, "re = {}", m[0].re);
        assert!(m[0].im.abs() < 1e-3);
    }

    #[test]
    fn moments_bounded_by_l1() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 1 << 10;
        let f = SampledSignal::from_fn(n, -1.0, 2.0 / n as f64, |_| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
        .unwrap();
        let j = f.domain();
        let set = xs(&[-3.2, 0.0, 5.5]);
        let l1 = f.l1();
        for m in moments(&f, &j, &set) {
            assert!(m.norm() <= l1 + 1e-12);
        }
    }

    #[test]
    fn riesz_project_zero_input() {
        let f = SampledSignal::zeros(256, 0.0, 1.0 / 64.0).unwrap();
        let p = riesz_project(&f, &iv(0.0, 3.0), &xs(&[0.0, 0.5])).unwrap();
        assert!(p.signal.samples().iter().all(|s| s.norm() < 1e-14));
        assert!(!p.regularized);
    }

    #[test]
    fn riesz_project_constant_span() {
        // N = 1, ξ = 0, I = [-1/2, 1/2), J = 3I: g is the mean over J.
        let n = 4 << 10;
        let dx = 4.0 / n as f64;
        let f = SampledSignal::from_fn(n, -2.0, dx, |x| {
            if (-0.5..0.5).contains(&x) {
                Complex64::new(x + 1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .unwrap();
        let i = iv(-0.5, 0.5);
        let j = i.dilate(3.0);
        let p = riesz_project(&f, &j, &xs(&[0.0])).unwrap();
        let mean = f.integrate(&i) / 3.0;
        for idx in p.signal.index_range(&j) {
            assert!((p.signal.samples()[idx] - mean).norm() < 1e-10);
        }
        assert!(p.moment_residual < 1e-10);
    }

    #[test]
    fn riesz_project_two_frequency_example() {
        let n = 3 << 12;
        let dx = 3.0 / n as f64;
        let f = SampledSignal::from_fn(n, 0.0, dx, |x| {
            if (1.0..2.0).contains(&x) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .unwrap();
        let j = iv(0.0, 3.0);
        let set = xs(&[0.0, 1.0 / 3.0]);
        let p = riesz_project(&f, &j, &set).unwrap();
        let m = -3.0 * 3f64.sqrt() / (2.0 * PI);
        assert!((p.coefficients[0] - Complex64::new(1.0 / 3.0, 0.0)).norm() < 1e-3);
        assert!((p.coefficients[1] - Complex64::new(m / 3.0, 0.0)).norm() < 1e-3);
        let norm = p.signal.lp_norm(&j, 2.0).unwrap();
        assert!((norm - 0.7492).abs() < 1e-3, "norm = {norm}");
        assert!(norm <= 2f64.sqrt());
        assert!(p.moment_residual < 1e-12);
    }

    #[test]
    fn riesz_project_residual_is_tiny_for_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10 {
            let n = 1 << 11;
            let dx = 6.0 / n as f64;
            let f = SampledSignal::from_fn(n, -3.0, dx, |x| {
                if (-0.5..0.5).contains(&x) {
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .unwrap();
            let i = iv(-0.5, 0.5);
            let j = i.dilate(3.0);
            let mut freqs: Vec<f64> = (0..6).map(|_| rng.gen_range(0.0..20.0)).collect();
            freqs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if freqs.windows(2).any(|w| w[1] - w[0] < 0.05) {
                continue;
            }
            let set = xs(&freqs);
            let p = riesz_project(&f, &j, &set).unwrap();
            assert!(p.moment_residual < 1e-8, "residual = {}", p.moment_residual);
            // Projection bound with discrete norms.
            let lhs = p.signal.lp_norm(&j, 2.0).unwrap();
            let rhs = (set.len() as f64 / i.len()).sqrt() * f.l1();
            assert!(lhs <= rhs * (1.0 + 1e-9), "lhs = {lhs}, rhs = {rhs}");
        }
    }

    #[test]
    fn be_ratio_single_frequency() {
        let r = be_ratio(&iv(-2.0, 1.5), &xs(&[0.77]), 256).unwrap();
        assert!((r.value - 1.0 / 3f64.sqrt()).abs() < 1e-10);
        assert!(!r.regularized);
    }

    #[test]
    fn be_ratio_orthogonal_pair() {
        let r = be_ratio(&iv(1.0, 2.0), &xs(&[0.0, 1.0 / 3.0]), 512).unwrap();
        assert!((r.value - 1.0 / 3f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn be_ratio_dilation_invariance() {
        let set = xs(&[0.3, 1.9, 4.4]);
        let base = be_ratio(&iv(1.0, 2.0), &set, 512).unwrap().value;
        for s in [2.0, 0.25] {
            let i = iv(1.0 * s, 2.0 * s);
            let scaled = set.scaled(1.0 / s).unwrap();
            let v = be_ratio(&i, &scaled, 512).unwrap().value;
            assert!((v - base).abs() < 1e-10, "s = {s}: {v} vs {base}");
        }
    }

    #[test]
    fn near_coincident_frequencies_rejected() {
        let set = FrequencySet::new(vec![1.0, 1.0 + 1e-13]).unwrap();
        assert!(gram(&iv(0.0, 1.0), &set).is_err());
    }
}
