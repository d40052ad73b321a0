//! Ratio-fixed balanced mini-batch schedules.
//!
//! Every batch holds exactly `live_k` live and `spoof_k` spoof samples,
//! with `live_k : spoof_k` equal to the requested ratio. Each pool is
//! consumed cyclically from a seeded shuffle; when a pool runs out it is
//! reshuffled and consumed again, so no sample appears twice before its
//! pool has been exhausted once.

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::metrics::Truth;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum ScheduleError {
    #[error("batch size is not divisible into the requested live:spoof ratio")]
    IndivisibleRatio,
    #[error("both the live and spoof pools must be non-empty")]
    EmptyPool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchSchedule {
    /// Ordered batches of (sample_id, truth).
    pub batches: Vec<Vec<(String, Truth)>>,
    /// (live_k, spoof_k) per batch.
    pub ratio: (usize, usize),
    pub batch_size: usize,
}

/// Cyclic, reshuffling sampler over one pool.
struct PoolSampler<'a> {
    ids: Vec<&'a str>,
    pos: usize,
    rng: ChaCha12Rng,
}

impl<'a> PoolSampler<'a> {
    fn new(ids: &'a [String], rng: ChaCha12Rng) -> Self {
        let mut s = PoolSampler {
            ids: ids.iter().map(String::as_str).collect(),
            pos: 0,
            rng,
        };
        s.ids.shuffle(&mut s.rng);
        s
    }

    fn next(&mut self) -> &'a str {
        if self.pos == self.ids.len() {
            self.ids.shuffle(&mut self.rng);
            self.pos = 0;
        }
        let id = self.ids[self.pos];
        self.pos += 1;
        id
    }
}

/// Build a deterministic schedule of `epochs` epochs. Per epoch, the
/// number of batches is the smallest count that consumes the more
/// demanding pool at least once; the other pool is oversampled by
/// reshuffled repetition.
pub fn make_schedule(
    live_ids: &[String],
    spoof_ids: &[String],
    batch_size: usize,
    ratio: (usize, usize),
    epochs: usize,
    seed: u64,
) -> Result<BatchSchedule, ScheduleError> {
    let (rl, rs) = ratio;
    if rl == 0 || rs == 0 || batch_size * rl % (rl + rs) != 0 || batch_size * rs % (rl + rs) != 0 {
        return Err(ScheduleError::IndivisibleRatio);
    }
    if live_ids.is_empty() || spoof_ids.is_empty() {
        return Err(ScheduleError::EmptyPool);
    }
    let live_k = batch_size * rl / (rl + rs);
    let spoof_k = batch_size - live_k;

    let mut live = PoolSampler::new(live_ids, ChaCha12Rng::seed_from_u64(seed ^ 0x6c69_7665));
    let mut spoof = PoolSampler::new(spoof_ids, ChaCha12Rng::seed_from_u64(seed ^ 0x7370_6f6f));

    let per_epoch = live_ids
        .len()
        .div_ceil(live_k)
        .max(spoof_ids.len().div_ceil(spoof_k));
    let mut batches = Vec::with_capacity(per_epoch * epochs);
    for _ in 0..epochs {
        for _ in 0..per_epoch {
            let mut batch = Vec::with_capacity(batch_size);
            for _ in 0..live_k {
                batch.push((String::from(live.next()), Truth::Live));
            }
            for _ in 0..spoof_k {
                batch.push((String::from(spoof.next()), Truth::Spoof));
            }
            batches.push(batch);
        }
    }
    Ok(BatchSchedule {
        batches,
        ratio: (live_k, spoof_k),
        batch_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::vec::Vec;

    fn ids(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    #[test]
    fn batch_64_ratio_1_3_gives_16_48() {
        let s = make_schedule(&ids("l", 240), &ids("s", 720), 64, (1, 3), 10, 7).unwrap();
        assert_eq!(s.ratio, (16, 48));
        for b in &s.batches {
            assert_eq!(b.len(), 64);
            assert_eq!(b.iter().filter(|(_, t)| *t == Truth::Live).count(), 16);
            assert_eq!(b.iter().filter(|(_, t)| *t == Truth::Spoof).count(), 48);
        }
    }

    #[test]
    fn minimal_batch() {
        let s = make_schedule(&ids("l", 3), &ids("s", 9), 4, (1, 3), 1, 0).unwrap();
        assert_eq!(s.ratio, (1, 3));
    }

    #[test]
    fn indivisible_ratio_rejected() {
        assert_eq!(
            make_schedule(&ids("l", 10), &ids("s", 10), 64, (1, 5), 1, 0),
            Err(ScheduleError::IndivisibleRatio)
        );
    }

    #[test]
    fn empty_pool_rejected() {
        assert_eq!(
            make_schedule(&[], &ids("s", 10), 4, (1, 3), 1, 0),
            Err(ScheduleError::EmptyPool)
        );
    }

    #[test]
    fn same_seed_same_schedule() {
        let a = make_schedule(&ids("l", 20), &ids("s", 77), 8, (1, 3), 3, 42).unwrap();
        let b = make_schedule(&ids("l", 20), &ids("s", 77), 8, (1, 3), 3, 42).unwrap();
        assert_eq!(a, b);
        let c = make_schedule(&ids("l", 20), &ids("s", 77), 8, (1, 3), 3, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn oversampling_exhausts_pool_before_repeating() {
        // tiny live pool: within any window of consecutive draws of pool
        // length, all ids are distinct
        let live = ids("l", 5);
        let s = make_schedule(&live, &ids("s", 60), 4, (1, 3), 2, 9).unwrap();
        let drawn: Vec<String> = s
            .batches
            .iter()
            .flat_map(|b| b.iter().filter(|(_, t)| *t == Truth::Live).map(|(id, _)| id.clone()))
            .collect();
        for chunk in drawn.chunks(5) {
            let mut uniq: Vec<_> = chunk.to_vec();
            uniq.sort();
            uniq.dedup();
            assert_eq!(uniq.len(), chunk.len(), "repeat before exhaustion");
        }
    }
}
