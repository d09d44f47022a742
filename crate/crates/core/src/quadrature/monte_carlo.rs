use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::NumericsConfig;
use crate::error::Result;

const CHUNK: usize = 4096;

/// Something that can draw i.i.d. samples.
pub trait Sampler: Sync {
    type Item;
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Item;
}

/// Adapts a closure `Fn(&mut dyn RngCore) -> T` into a [`Sampler`].
pub struct FnSampler<F>(pub F);

impl<T, F> Sampler for FnSampler<F>
where
    F: Fn(&mut dyn rand::RngCore) -> T + Sync,
{
    type Item = T;
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        let mut r = RngRef(rng);
        (self.0)(&mut r)
    }
}

struct RngRef<'a, R: ?Sized>(&'a mut R);

impl<R: Rng + ?Sized> rand::RngCore for RngRef<'_, R> {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

/// Two independent draws from the same sampler.
pub struct PairSampler<S>(pub S);

impl<S: Sampler> Sampler for PairSampler<S> {
    type Item = (S::Item, S::Item);
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Item {
        let a = self.0.draw(rng);
        let b = self.0.draw(rng);
        (a, b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

#[derive(Clone, Copy)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn merge(self, o: Moments) -> Moments {
        if self.n == 0.0 {
            return o;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n / n,
            m2: self.m2 + o.m2 + d * d * self.n * o.n / n,
        }
    }
}

/// Sample mean of `g` under `sampler` with its standard error.
///
/// Samples are drawn in fixed-size chunks; chunk `k` uses ChaCha8 stream
/// `k` of the configured seed, and chunk summaries are merged in index
/// order. The result is therefore bit-identical for a given seed regardless
/// of the number of worker threads.
pub fn mc_expect<S, G>(g: G, sampler: &S, cfg: &NumericsConfig) -> Result<McEstimate>
where
    S: Sampler,
    G: Fn(&S::Item) -> f64 + Sync,
{
    cfg.validate()?;
    let n = cfg.mc_samples;
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
            rng.set_stream(k as u64);
            let len = CHUNK.min(n - k * CHUNK);
            let mut m = Moments {
                n: 0.0,
                mean: 0.0,
                m2: 0.0,
            };
            for _ in 0..len {
                let x = g(&sampler.draw(&mut rng));
                m.n += 1.0;
                let d = x - m.mean;
                m.mean += d / m.n;
                m.m2 += d * (x - m.mean);
            }
            m
        })
        .collect();
    let total = parts.into_iter().fold(
        Moments {
            n: 0.0,
            mean: 0.0,
            m2: 0.0,
        },
        Moments::merge,
    );
    let var = if total.n > 1.0 { total.m2 / (total.n - 1.0) } else { 0.0 };
    Ok(McEstimate {
        mean: total.mean,
        std_error: (var / total.n).sqrt(),
        samples: n,
    })
}
