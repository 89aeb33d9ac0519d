//! Compensated accumulation and order-fixed parallel reductions.
//!
//! Every parallel sum in the crate splits its index range into chunks of a
//! fixed size (independent of the thread count), sums each chunk with a
//! Neumaier accumulator, and combines the chunk totals with a fixed pairwise
//! tree. The result is bit-identical for any number of worker threads.

use num_complex::Complex64;
use rayon::prelude::*;
use std::ops::Range;

/// Chunk length used by [`par_sum_real`] and [`par_sum_complex`].
pub const CHUNK: usize = 1024;

/// Neumaier (improved Kahan–Babuška) running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Componentwise Neumaier sum of complex values.
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexNeumaier {
    re: Neumaier,
    im: Neumaier,
}

impl ComplexNeumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl FromIterator<Complex64> for ComplexNeumaier {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = ComplexNeumaier::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

/// Pairwise sum with a tree shape that depends only on `xs.len()`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

pub fn pairwise_sum_complex(xs: &[Complex64]) -> Complex64 {
    match xs.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => xs[0],
        n => {
            let mid = n / 2;
            pairwise_sum_complex(&xs[..mid]) + pairwise_sum_complex(&xs[mid..])
        }
    }
}

fn chunks(range: Range<u64>, chunk: usize) -> Vec<Range<u64>> {
    let chunk = chunk.max(1) as u64;
    let mut out = Vec::new();
    let mut lo = range.start;
    while lo < range.end {
        let hi = (lo + chunk).min(range.end);
        out.push(lo..hi);
        lo = hi;
    }
    out
}

/// Deterministic parallel compensated sum of `f(i)` over `range`.
pub fn par_sum_real<F>(range: Range<u64>, chunk: usize, f: F) -> f64
where
    F: Fn(u64) -> f64 + Sync,
{
    let partial: Vec<f64> = chunks(range, chunk)
        .into_par_iter()
        .map(|r| r.map(&f).collect::<Neumaier>().value())
        .collect();
    pairwise_sum(&partial)
}

/// Deterministic parallel compensated sum of complex `f(i)` over `range`.
pub fn par_sum_complex<F>(range: Range<u64>, chunk: usize, f: F) -> Complex64
where
    F: Fn(u64) -> Complex64 + Sync,
{
    let partial: Vec<Complex64> = chunks(range, chunk)
        .into_par_iter()
        .map(|r| r.map(&f).collect::<ComplexNeumaier>().value())
        .collect();
    pairwise_sum_complex(&partial)
}
