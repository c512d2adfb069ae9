//! Small shared helpers.

/// Map fixed-size chunks of `items` through `f` and collect the partial
/// results in chunk order. With the `parallel` feature the chunks run on the
/// rayon pool; chunk boundaries and the reduction order are identical either
/// way, so results are bit-identical regardless of thread count.
pub(crate) fn chunked_map<T, R, F>(items: &[T], chunk_size: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&[T]) -> R + Sync,
{
    debug_assert!(chunk_size > 0);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_chunks(chunk_size).map(&f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.chunks(chunk_size).map(|c| f(c)).collect()
    }
}

/// log(exp(a) + exp(b)) without overflow.
pub(crate) fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunked_map_preserves_order() {
        let items: Vec<u32> = (0..1000).collect();
        let sums = chunked_map(&items, 64, |c| c.iter().sum::<u32>());
        let total: u32 = sums.iter().sum();
        assert_eq!(total, 999 * 1000 / 2);
        assert_eq!(sums[0], (0..64).sum::<u32>());
    }

    #[test]
    fn log_add_matches_direct() {
        let got = log_add(0.5f64.ln(), 0.25f64.ln());
        assert!((got - 0.75f64.ln()).abs() < 1e-12);
        assert_eq!(log_add(f64::NEG_INFINITY, -1.0), -1.0);
    }
}
