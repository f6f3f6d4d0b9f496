//! Execution policy for the data-parallel loops.
//!
//! With the `parallel` feature (default) the [`Execution::Parallel`] policy
//! dispatches to rayon; without it every policy runs sequentially. Only
//! element-wise maps are parallelized, so results never depend on the policy.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// True when this policy will actually run on the thread pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Evaluates `f(0..n)` and returns the results in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Runs `f(offset, chunk)` over disjoint chunks of `out`.
    pub fn for_chunks<F>(self, out: &mut [f64], chunk_len: usize, f: F)
    where
        F: Fn(usize, &mut [f64]) + Sync + Send,
    {
        let chunk_len = chunk_len.max(1);
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            out.par_chunks_mut(chunk_len)
                .enumerate()
                .for_each(|(k, c)| f(k * chunk_len, c));
            return;
        }
        for (k, c) in out.chunks_mut(chunk_len).enumerate() {
            f(k * chunk_len, c);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policies_agree() {
        let f = |i: usize| (i as f64).sqrt().sin();
        assert_eq!(Execution::Sequential.map(1000, f), Execution::Parallel.map(1000, f));

        let mut a = vec![0.0; 1037];
        let mut b = vec![0.0; 1037];
        let fill = |off: usize, c: &mut [f64]| {
            for (j, v) in c.iter_mut().enumerate() {
                *v = ((off + j) as f64).cos();
            }
        };
        Execution::Sequential.for_chunks(&mut a, 100, fill);
        Execution::Parallel.for_chunks(&mut b, 100, fill);
        assert_eq!(a, b);
    }
}
