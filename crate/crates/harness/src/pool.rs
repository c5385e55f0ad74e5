use rayon::prelude::*;

/// Runs `f(0..count)` on `workers` threads (0 = one per core) and returns the
/// results in index order.
pub fn run_indexed<T, F>(count: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("worker pool");
    pool.install(|| (0..count).into_par_iter().map(&f).collect())
}

/// Per-item seed: a splitmix64 step over the base seed and the index.
pub fn item_seed(base: u64, index: usize) -> u64 {
    let mut z = base.wrapping_add((index as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A density in `[lo, hi)` derived from a seed.
pub fn density(seed: u64, lo: f64, hi: f64) -> f64 {
    let unit = (item_seed(seed, 7) >> 11) as f64 / (1u64 << 53) as f64;
    // two decimals keep reports readable
    ((lo + (hi - lo) * unit) * 100.0).floor() / 100.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_come_back_in_index_order() {
        let out = run_indexed(200, 4, |i| i * i);
        assert_eq!(out, (0..200).map(|i| i * i).collect::<Vec<_>>());
    }

    #[test]
    fn seeds_differ_and_repeat() {
        assert_ne!(item_seed(1, 0), item_seed(1, 1));
        assert_eq!(item_seed(9, 5), item_seed(9, 5));
        let p = density(3, 0.1, 0.6);
        assert!((0.1..0.6).contains(&p));
    }
}
