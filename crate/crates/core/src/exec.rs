//! Execution strategy and deterministic reductions.
//!
//! Monte Carlo loops map a pure function over sample indices. With the
//! `parallel` feature the map runs on the current rayon pool; without it the
//! same map runs sequentially. Results are collected in index order and
//! reduced by a fixed pairwise tree, so the outcome is bit-identical for any
//! thread count and for the sequential build.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..n`, collecting results in index order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Sequential twin of [`map_indexed`], available in every build (used by the
/// benchmark suite to compare execution strategies).
pub fn map_indexed_seq<T>(n: usize, mut f: impl FnMut(usize) -> T) -> Vec<T> {
    (0..n).map(&mut f).collect()
}

/// Run `f` on a dedicated pool of `threads` workers (`None` = current pool).
/// The sequential build accepts and ignores the thread count.
#[cfg(feature = "parallel")]
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match threads {
        None => f(),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .expect("failed to build thread pool")
            .install(f),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    let _ = threads;
    f()
}

/// Sum by a fixed pairwise tree: deterministic and accurate to
/// O(log n) rounding growth regardless of how the values were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Sample moments of a Monte Carlo batch, with standard errors for both the
/// mean and the (unbiased) variance.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct SampleMoments {
    pub n: u64,
    pub mean: f64,
    /// Unbiased sample variance (n-1 denominator).
    pub variance: f64,
    /// Standard error of the mean.
    pub se_mean: f64,
    /// Standard error of the sample variance, from the fourth central moment.
    pub se_variance: f64,
}

pub fn moments(xs: &[f64]) -> SampleMoments {
    let n = xs.len();
    assert!(n >= 2, "moments need at least two samples");
    let nf = n as f64;
    let mean = pairwise_sum(xs) / nf;
    let dev2: Vec<f64> = xs.iter().map(|&x| (x - mean) * (x - mean)).collect();
    let m2 = pairwise_sum(&dev2) / nf;
    let dev4: Vec<f64> = dev2.iter().map(|&d| d * d).collect();
    let m4 = pairwise_sum(&dev4) / nf;
    let variance = m2 * nf / (nf - 1.0);
    // Var(s^2) = (m4 - m2^2 (n-3)/(n-1)) / n, the standard large-sample form.
    let var_of_var = ((m4 - m2 * m2 * (nf - 3.0) / (nf - 1.0)) / nf).max(0.0);
    SampleMoments {
        n: n as u64,
        mean,
        variance,
        se_mean: (variance / nf).sqrt(),
        se_variance: var_of_var.sqrt(),
    }
}
