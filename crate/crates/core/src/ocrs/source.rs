//! Forward-only sources of training samples.
//!
//! A source hands out each sample at most once, so a decomposition that
//! draws per layer can never reuse a sample across layers.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::rng::{StreamRng, Streams};
use crate::set::ElementSet;

use super::measure::{sample_product, Histogram};

/// Samples per random stream inside one draw.
pub const DRAW_CHUNK: usize = 4096;

pub trait SampleSource {
    fn universe(&self) -> usize;

    /// The next `count` samples, aggregated.
    fn draw(&mut self, count: usize) -> Result<Histogram>;

    /// Samples handed out so far.
    fn drawn(&self) -> usize;
}

/// A fixed list consumed front to back.
#[derive(Clone, Debug)]
pub struct SampleList {
    universe: usize,
    samples: Vec<ElementSet>,
    cursor: usize,
}

impl SampleList {
    pub fn new(universe: usize, samples: Vec<ElementSet>) -> Self {
        Self {
            universe,
            samples,
            cursor: 0,
        }
    }
}

impl SampleSource for SampleList {
    fn universe(&self) -> usize {
        self.universe
    }

    fn draw(&mut self, count: usize) -> Result<Histogram> {
        if self.cursor + count > self.samples.len() {
            return invalid(format!(
                "sample source exhausted: {count} requested, {} left",
                self.samples.len() - self.cursor
            ));
        }
        let mut h = Histogram::new(self.universe);
        for s in &self.samples[self.cursor..self.cursor + count] {
            h.add(s);
        }
        self.cursor += count;
        Ok(h)
    }

    fn drawn(&self) -> usize {
        self.cursor
    }
}

/// Samples generated by a function of a random stream.
///
/// Draw `t` splits its samples into chunks of [`DRAW_CHUNK`]; chunk `c` uses
/// stream `c` under the node `(draw, t)`. The result depends only on the
/// seed and the sequence of draw sizes, never on thread count.
pub struct StreamSource<F> {
    universe: usize,
    streams: Streams,
    generate: F,
    calls: u64,
    drawn: usize,
}

impl<F> StreamSource<F>
where
    F: Fn(&mut StreamRng) -> ElementSet + Sync,
{
    pub fn new(universe: usize, streams: Streams, generate: F) -> Self {
        Self {
            universe,
            streams,
            generate,
            calls: 0,
            drawn: 0,
        }
    }
}

impl<F> SampleSource for StreamSource<F>
where
    F: Fn(&mut StreamRng) -> ElementSet + Sync,
{
    fn universe(&self) -> usize {
        self.universe
    }

    fn draw(&mut self, count: usize) -> Result<Histogram> {
        let node = self.streams.indexed("draw", self.calls);
        let chunks = count.div_ceil(DRAW_CHUNK);
        let parts: Vec<Histogram> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = node.rng(c as u64);
                let mut h = Histogram::new(self.universe);
                for _ in 0..DRAW_CHUNK.min(count - c * DRAW_CHUNK) {
                    h.add(&(self.generate)(&mut rng));
                }
                h
            })
            .collect();
        let mut total = Histogram::new(self.universe);
        for p in &parts {
            total.merge(p);
        }
        self.calls += 1;
        self.drawn += count;
        Ok(total)
    }

    fn drawn(&self) -> usize {
        self.drawn
    }
}

/// Keeps each element of `active` independently with probability `b`.
pub fn shrink<R: Rng + ?Sized>(active: &ElementSet, b: f64, rng: &mut R) -> ElementSet {
    let mut kept = ElementSet::empty(active.universe());
    for e in active {
        if rng.random::<f64>() < b {
            kept.insert(e);
        }
    }
    kept
}

/// Draws of `R(x)` thinned by `b`, i.e. exact draws of `R(b x)`.
pub fn shrunk_product_source(
    x: Vec<f64>,
    b: f64,
    streams: Streams,
) -> StreamSource<impl Fn(&mut StreamRng) -> ElementSet + Sync> {
    let n = x.len();
    StreamSource::new(n, streams, move |rng: &mut StreamRng| {
        let active = sample_product(&x, rng);
        shrink(&active, b, rng)
    })
}
