//! Exact r-variation norms of vector-valued sequences, the greedy λ-jump
//! cover, the recursive parent function built on it, and the dyadic
//! left-child index blocks.
//!
//! The variation seminorm is a supremum over all strictly increasing index
//! subsequences; because the objective is additive in consecutive pairs it
//! is computed exactly by a maximum-weight-path dynamic program over ordered
//! key pairs, O(M²) pair evaluations. This is exact for every `r > 0`, not
//! just convex exponents.

use num_complex::Complex64;

use crate::{Error, Result};

/// Longest sequence accepted by the brute-force oracle.
pub const BRUTE_FORCE_MAX: usize = 14;

/// A finite sequence of vectors in ℂ^d indexed by strictly increasing
/// integer keys, measured in the l² norm on ℂ^d.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSequence {
    keys: Vec<i64>,
    values: Vec<Vec<Complex64>>,
    dim: usize,
}

impl VectorSequence {
    pub fn new(keys: Vec<i64>, values: Vec<Vec<Complex64>>) -> Result<Self> {
        if keys.is_empty() {
            return Err(Error::EmptySequence);
        }
        if keys.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "{} keys but {} values",
                keys.len(),
                values.len()
            )));
        }
        for w in keys.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidParameter(
                    "keys must be strictly increasing".into(),
                ));
            }
        }
        let dim = values[0].len();
        if dim == 0 || values.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidParameter(
                "all values must share one dimension d >= 1".into(),
            ));
        }
        if values
            .iter()
            .flatten()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidParameter("non-finite entry".into()));
        }
        Ok(Self { keys, values, dim })
    }

    pub fn scalar(keys: Vec<i64>, values: Vec<Complex64>) -> Result<Self> {
        Self::new(keys, values.into_iter().map(|v| vec![v]).collect())
    }

    pub fn scalar_real(values: &[f64]) -> Result<Self> {
        Self::scalar(
            (0..values.len() as i64).collect(),
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn keys(&self) -> &[i64] {
        &self.keys
    }

    pub fn value(&self, pos: usize) -> &[Complex64] {
        &self.values[pos]
    }

    /// l² distance between the values at two positions.
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.values[i]
            .iter()
            .zip(&self.values[j])
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn value_norm(&self, pos: usize) -> f64 {
        self.values[pos]
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        (0..self.len()).map(|i| self.value_norm(i)).fold(0.0, f64::max)
    }

    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                d = d.max(self.dist(i, j));
            }
        }
        d
    }

    /// Minimal l² distance between distinct values, `∞` if all values agree.
    pub fn min_distinct_distance(&self) -> f64 {
        let mut m = f64::INFINITY;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let d = self.dist(i, j);
                if d > 0.0 {
                    m = m.min(d);
                }
            }
        }
        m
    }
}

fn check_r(r: f64) -> Result<()> {
    if r.is_nan() || r <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "variation exponent must satisfy r > 0, got {r}"
        )));
    }
    Ok(())
}

/// The Ṽ^r seminorm: sup over increasing subsequences of
/// `(Σ ‖c_{k_j} - c_{k_{j-1}}‖^r)^{1/r}`; for `r = ∞` the max pairwise gap.
pub fn tilde_variation(s: &VectorSequence, r: f64) -> Result<f64> {
    check_r(r)?;
    let m = s.len();
    if r.is_infinite() {
        let mut best = 0.0f64;
        for i in 0..m {
            for j in i + 1..m {
                best = best.max(s.dist(i, j));
            }
        }
        return Ok(best);
    }
    // best[j] = max weight of an admissible path ending at j.
    let mut best = vec![0.0f64; m];
    let mut answer = 0.0f64;
    for j in 1..m {
        for i in 0..j {
            let w = best[i] + s.dist(i, j).powf(r);
            if w > best[j] {
                best[j] = w;
            }
        }
        answer = answer.max(best[j]);
    }
    Ok(answer.powf(1.0 / r))
}

/// The full V^r norm: `sup_k ‖c_k‖ + Ṽ^r`.
pub fn variation(s: &VectorSequence, r: f64) -> Result<f64> {
    Ok(s.sup_norm() + tilde_variation(s, r)?)
}

/// Exhaustive-enumeration oracle for [`tilde_variation`], exponential in the
/// sequence length and therefore capped at [`BRUTE_FORCE_MAX`] entries.
pub fn tilde_variation_bruteforce(s: &VectorSequence, r: f64) -> Result<f64> {
    check_r(r)?;
    let m = s.len();
    if m > BRUTE_FORCE_MAX {
        return Err(Error::TooLongForBruteForce {
            len: m,
            max: BRUTE_FORCE_MAX,
        });
    }
    let mut best = 0.0f64;
    for mask in 0u32..(1 << m) {
        if mask.count_ones() < 2 {
            continue;
        }
        let picked: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let value = if r.is_infinite() {
            picked
                .windows(2)
                .map(|w| s.dist(w[0], w[1]))
                .fold(0.0, f64::max)
        } else {
            picked
                .windows(2)
                .map(|w| s.dist(w[0], w[1]).powf(r))
                .sum::<f64>()
                .powf(1.0 / r)
        };
        best = best.max(value);
    }
    Ok(best)
}

/// Ṽ^r of a scalar complex sequence over its natural index order, without
/// building a [`VectorSequence`]. Used in per-grid-point inner loops.
pub fn scalar_tilde_variation(values: &[Complex64], r: f64) -> Result<f64> {
    check_r(r)?;
    if values.is_empty() {
        return Err(Error::EmptySequence);
    }
    let m = values.len();
    if r.is_infinite() {
        let mut best = 0.0f64;
        for i in 0..m {
            for j in i + 1..m {
                best = best.max((values[j] - values[i]).norm());
            }
        }
        return Ok(best);
    }
    let mut best = vec![0.0f64; m];
    let mut answer = 0.0f64;
    for j in 1..m {
        for i in 0..j {
            let w = best[i] + (values[j] - values[i]).norm().powf(r);
            if w > best[j] {
                best[j] = w;
            }
        }
        answer = answer.max(best[j]);
    }
    Ok(answer.powf(1.0 / r))
}

/// V^r of a scalar complex sequence: `sup |·| + Ṽ^r`.
pub fn scalar_variation_norm(values: &[Complex64], r: f64) -> Result<f64> {
    let sup = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(sup + scalar_tilde_variation(values, r)?)
}

/// The greedy λ-jump cover: anchor positions where the sequence first leaves
/// the closed λ-ball around the previous anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpCover {
    pub lambda: f64,
    /// Anchor positions (0-based indices into the sequence), increasing.
    pub positions: Vec<usize>,
}

impl JumpCover {
    /// `L_λ`, the number of selected anchors.
    pub fn count(&self) -> usize {
        self.positions.len()
    }
}

/// Greedy cover with respect to λ-jumps. Membership in the closed ball is
/// `dist ≤ λ`; the cover advances only on a strict excess `dist > λ`.
pub fn jump_cover(s: &VectorSequence, lambda: f64) -> Result<JumpCover> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "jump cover requires lambda > 0, got {lambda}"
        )));
    }
    let mut positions = vec![0];
    let mut anchor = 0;
    for pos in 1..s.len() {
        if s.dist(anchor, pos) > lambda {
            positions.push(pos);
            anchor = pos;
        }
    }
    Ok(JumpCover { lambda, positions })
}

/// The recursive parent function ρ(n, k) built from the covers at
/// `λ = 2^n λ0`, tabulated for `n = -1 … n_max`.
#[derive(Debug, Clone)]
pub struct ParentTable {
    pub lambda0: f64,
    pub n_max: i32,
    /// Row `t` holds ρ(t-1, ·) as positions into the sequence.
    rows: Vec<Vec<usize>>,
}

impl ParentTable {
    /// ρ(n, pos) for `n ∈ [-1, n_max]`, as a position into the sequence.
    pub fn rho(&self, n: i32, pos: usize) -> usize {
        assert!(n >= -1 && n <= self.n_max, "n = {n} out of table range");
        self.rows[(n + 1) as usize][pos]
    }
}

/// Build the parent table. Requires `0 < λ0 <` the minimal distance between
/// distinct values, so that the λ0-cover anchors every distinct value run.
pub fn parent_table(s: &VectorSequence, lambda0: f64) -> Result<ParentTable> {
    let min_distance = s.min_distinct_distance();
    if !(lambda0 > 0.0) || !(lambda0 < min_distance) {
        return Err(Error::Lambda0OutOfRange {
            lambda0,
            min_distance,
        });
    }
    let diameter = s.diameter();
    let mut n_max = 0i32;
    while (n_max as f64).exp2() * lambda0 < diameter {
        n_max += 1;
    }

    let m = s.len();
    let mut rows: Vec<Vec<usize>> = Vec::with_capacity(n_max as usize + 2);
    rows.push((0..m).collect()); // rho(-1, k) = k
    for n in 0..=n_max {
        let cover = jump_cover(s, (n as f64).exp2() * lambda0)?;
        let prev = rows.last().expect("rows nonempty");
        let row = prev
            .iter()
            .map(|&p| {
                // Last anchor position <= p.
                let idx = match cover.positions.binary_search(&p) {
                    Ok(i) => i,
                    Err(i) => i - 1,
                };
                cover.positions[idx]
            })
            .collect();
        rows.push(row);
    }
    Ok(ParentTable {
        lambda0,
        n_max,
        rows,
    })
}

/// The Rademacher–Menshov index block β_{l,m}: empty when `l` lies in the
/// left child of its dyadic parent of length `2^{m+1}`, otherwise that left
/// child. For `0 ≤ l < 2^M` the blocks over `m = 0…M-1` partition `[0, l)`.
pub fn rm_block(l: u64, m: u32) -> std::ops::Range<u64> {
    if l & (1 << m) == 0 {
        return 0..0;
    }
    let base = (l >> (m + 1)) << (m + 1);
    base..base + (1 << m)
}
