//! Deterministic reductions.

use serde::{Deserialize, Serialize};

use crate::Real;

/// Sum by a fixed binary tree over indices, independent of thread count.
pub fn pairwise_sum<T: Real>(xs: &[T]) -> T {
    const LEAF: usize = 16;
    if xs.len() <= LEAF {
        return xs.iter().fold(T::zero(), |acc, &x| acc + x);
    }
    let (lo, hi) = xs.split_at(xs.len() / 2);
    pairwise_sum(lo) + pairwise_sum(hi)
}

/// Sample mean with standard error `stdev / sqrt(n)` (unbiased stdev).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

pub fn mean_stderr<T: Real>(xs: &[T]) -> MeanEstimate {
    let n = xs.len();
    if n == 0 {
        return MeanEstimate {
            mean: f64::NAN,
            stderr: f64::NAN,
            n,
        };
    }
    let mean = pairwise_sum(xs) / T::of_usize(n);
    let stderr = if n > 1 {
        let dev: Vec<T> = xs.iter().map(|&x| (x - mean) * (x - mean)).collect();
        (pairwise_sum(&dev) / T::of_usize(n - 1) / T::of_usize(n)).sqrt()
    } else {
        T::zero()
    };
    MeanEstimate {
        mean: mean.to_f64(),
        stderr: stderr.to_f64(),
        n,
    }
}

pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
