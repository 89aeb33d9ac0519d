//! Sieved divisor functions `d(n)`, `d_3(n)`, the shifted coefficient
//! `h(n, U) = n^{-iU} sum_{delta | n} d(delta) delta^{iU}`, and prefix sums of
//! `d_3(n)^2`.

use crate::error::{Error, Result};
use crate::ComplexValue;
use serde::Serialize;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

/// Largest table the sieve will build.
pub const MAX_BOUND: u64 = 100_000_000;
/// Largest argument accepted by [`d3_bruteforce`].
pub const BRUTEFORCE_MAX: u64 = 1_000_000;

const CACHE_MAGIC: &[u8; 8] = b"D3SIEVE1";

/// `d`, `d_3` and `sum_{m <= n} d_3(m)^2` for `1 <= n <= bound`.
///
/// Arrays are indexed by `n` directly; slot 0 holds zero.
#[derive(Clone, Debug, PartialEq)]
pub struct DivisorTable {
    bound: u64,
    d: Vec<u32>,
    d3: Vec<u32>,
    d3sq_prefix: Vec<u64>,
    spf: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShiftedCoefficient {
    pub n: u64,
    pub u: f64,
    pub value: ComplexValue,
}

fn alloc<T: Clone>(len: usize, fill: T) -> Result<Vec<T>> {
    let mut v = Vec::new();
    v.try_reserve_exact(len)
        .map_err(|e| Error::Resource(format!("cannot allocate {len} table entries: {e}")))?;
    v.resize(len, fill);
    Ok(v)
}

fn check_bound(n: u64) -> Result<()> {
    if !(1..=MAX_BOUND).contains(&n) {
        return Err(Error::OutOfRange {
            what: "sieve bound",
            detail: format!("{n} not in [1, {MAX_BOUND}]"),
        });
    }
    Ok(())
}

fn smallest_prime_factors(n: usize) -> Result<Vec<u32>> {
    let mut spf = alloc(n + 1, 0u32)?;
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    if n >= 1 {
        spf[1] = 1;
    }
    Ok(spf)
}

fn prefix_of_squares(d3: &[u32]) -> Result<Vec<u64>> {
    let mut prefix = alloc(d3.len(), 0u64)?;
    let mut acc = 0u64;
    for (p, &v) in prefix.iter_mut().zip(d3).skip(1) {
        acc += u64::from(v) * u64::from(v);
        *p = acc;
    }
    Ok(prefix)
}

/// Sieve `d = 1 * 1` and `d_3 = d * 1` up to `n`.
pub fn build_divisor_table(n: u64) -> Result<DivisorTable> {
    check_bound(n)?;
    let len = n as usize;
    let mut d = alloc(len + 1, 0u32)?;
    for i in 1..=len {
        for j in (i..=len).step_by(i) {
            d[j] += 1;
        }
    }
    let mut d3 = alloc(len + 1, 0u32)?;
    for i in 1..=len {
        let di = d[i];
        for j in (i..=len).step_by(i) {
            d3[j] += di;
        }
    }
    let d3sq_prefix = prefix_of_squares(&d3)?;
    let spf = smallest_prime_factors(len)?;
    Ok(DivisorTable {
        bound: n,
        d,
        d3,
        d3sq_prefix,
        spf,
    })
}

/// Number of ordered triples `(k, l, m)` with `klm = n`, by direct search.
pub fn d3_bruteforce(n: u64) -> Result<u64> {
    if !(1..=BRUTEFORCE_MAX).contains(&n) {
        return Err(Error::OutOfRange {
            what: "n",
            detail: format!("{n} not in [1, {BRUTEFORCE_MAX}]"),
        });
    }
    let mut count = 0;
    for k in 1..=n {
        if n % k != 0 {
            continue;
        }
        let rest = n / k;
        for l in 1..=rest {
            if rest % l == 0 {
                count += 1;
            }
        }
    }
    Ok(count)
}

impl DivisorTable {
    pub fn bound(&self) -> u64 {
        self.bound
    }

    fn check(&self, n: u64) -> Result<usize> {
        if n > self.bound {
            return Err(Error::TableTooSmall {
                bound: self.bound,
                requested: n,
            });
        }
        if n == 0 {
            return Err(Error::OutOfRange {
                what: "n",
                detail: "n must be >= 1".into(),
            });
        }
        Ok(n as usize)
    }

    pub fn d(&self, n: u64) -> Result<u32> {
        Ok(self.d[self.check(n)?])
    }

    pub fn d3(&self, n: u64) -> Result<u32> {
        Ok(self.d3[self.check(n)?])
    }

    /// `d_3(1..=bound)` with a leading zero at index 0.
    pub fn d3_slice(&self) -> &[u32] {
        &self.d3
    }

    pub fn d_slice(&self) -> &[u32] {
        &self.d
    }

    pub fn d3sq_prefix(&self) -> &[u64] {
        &self.d3sq_prefix
    }

    /// Prime factorization `[(p, e), ...]` with increasing `p`.
    pub fn factorize(&self, n: u64) -> Result<Vec<(u64, u32)>> {
        let mut m = self.check(n)?;
        let mut out: Vec<(u64, u32)> = Vec::new();
        while m > 1 {
            let p = self.spf[m] as usize;
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        Ok(out)
    }

    /// All divisors of `n` paired with their divisor counts, unsorted.
    pub fn divisors_with_counts(&self, n: u64) -> Result<Vec<(u64, u32)>> {
        let mut out = vec![(1u64, 1u32)];
        for (p, e) in self.factorize(n)? {
            let prev = out.len();
            let mut pk = 1u64;
            for k in 1..=e {
                pk *= p;
                for i in 0..prev {
                    let (delta, dd) = out[i];
                    // d is multiplicative and d(p^k) = k + 1
                    out.push((delta * pk, dd * (k + 1)));
                }
            }
        }
        Ok(out)
    }

    /// `h(n, U) = sum_{delta | n} d(delta) (n / delta)^{-iU}`.
    pub fn h_shift(&self, n: u64, u: f64) -> Result<ShiftedCoefficient> {
        self.shifted_sum(n, u)
            .map(|value| ShiftedCoefficient { n, u, value })
    }

    /// `g(n, U) = sum_{delta | n} d(delta) delta^{-iU}`, the coefficient of the
    /// conjugate sum.
    pub fn g_shift(&self, n: u64, u: f64) -> Result<ComplexValue> {
        if !u.is_finite() {
            return Err(Error::NonFinite("U"));
        }
        let mut re = 0.0;
        let mut im = 0.0;
        for (delta, dd) in self.divisors_with_counts(n)? {
            let (s, c) = (u * (delta as f64).ln()).sin_cos();
            re += f64::from(dd) * c;
            im -= f64::from(dd) * s;
        }
        Ok(ComplexValue::new(re, im))
    }

    fn shifted_sum(&self, n: u64, u: f64) -> Result<ComplexValue> {
        if !u.is_finite() {
            return Err(Error::NonFinite("U"));
        }
        let mut re = 0.0;
        let mut im = 0.0;
        for (delta, dd) in self.divisors_with_counts(n)? {
            // phase uses the complementary divisor, an exact integer
            let (s, c) = (u * ((n / delta) as f64).ln()).sin_cos();
            re += f64::from(dd) * c;
            im -= f64::from(dd) * s;
        }
        Ok(ComplexValue::new(re, im))
    }

    /// Exact `sum_{n <= x} d_3(n)^2`; zero for `x = 0`.
    pub fn sum_d3_squared(&self, x: u64) -> Result<u64> {
        if x > self.bound {
            return Err(Error::TableTooSmall {
                bound: self.bound,
                requested: x,
            });
        }
        Ok(self.d3sq_prefix[x as usize])
    }

    /// `sum_{n <= x} d_3(n)^2 / (x log^8 x)`.
    pub fn d3_squared_ratio(&self, x: u64) -> Result<f64> {
        if x < 2 {
            return Err(Error::OutOfRange {
                what: "x",
                detail: "ratio needs x >= 2".into(),
            });
        }
        let s = self.sum_d3_squared(x)? as f64;
        let xf = x as f64;
        Ok(s / (xf * xf.ln().powi(8)))
    }

    /// Write the table in the little-endian cache format.
    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let tmp = path.with_extension("tmp");
        {
            let mut w = BufWriter::new(File::create(&tmp)?);
            w.write_all(CACHE_MAGIC)?;
            w.write_all(&self.bound.to_le_bytes())?;
            for v in &self.d[1..] {
                w.write_all(&v.to_le_bytes())?;
            }
            for v in &self.d3[1..] {
                w.write_all(&v.to_le_bytes())?;
            }
            for v in &self.d3sq_prefix[1..] {
                w.write_all(&v.to_le_bytes())?;
            }
            w.flush()?;
        }
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Read a table written by [`DivisorTable::save`].
    pub fn load(path: &Path) -> Result<DivisorTable> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::BadCache(format!("{}: wrong magic", path.display())));
        }
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let bound = u64::from_le_bytes(b8);
        check_bound(bound)
            .map_err(|_| Error::BadCache(format!("{}: bound {bound}", path.display())))?;
        let expected = 16 + bound * 16;
        let actual = std::fs::metadata(path)?.len();
        if actual != expected {
            return Err(Error::BadCache(format!(
                "{}: length {actual}, expected {expected}",
                path.display()
            )));
        }
        let len = bound as usize;
        let read_u32 = |r: &mut BufReader<File>| -> Result<Vec<u32>> {
            let mut v = alloc(len + 1, 0u32)?;
            let mut b = [0u8; 4];
            for x in v.iter_mut().skip(1) {
                r.read_exact(&mut b)?;
                *x = u32::from_le_bytes(b);
            }
            Ok(v)
        };
        let d = read_u32(&mut r)?;
        let d3 = read_u32(&mut r)?;
        let mut d3sq_prefix = alloc(len + 1, 0u64)?;
        for x in d3sq_prefix.iter_mut().skip(1) {
            r.read_exact(&mut b8)?;
            *x = u64::from_le_bytes(b8);
        }
        if d[1] != 1 || d3[1] != 1 || d3sq_prefix[1] != 1 {
            return Err(Error::BadCache(format!(
                "{}: d(1) or d3(1) is not 1",
                path.display()
            )));
        }
        let spf = smallest_prime_factors(len)?;
        Ok(DivisorTable {
            bound,
            d,
            d3,
            d3sq_prefix,
            spf,
        })
    }
}

/// Cache directory from `HARDY_CACHE_DIR`, default `./cache`.
pub fn cache_dir() -> PathBuf {
    std::env::var_os("HARDY_CACHE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("cache"))
}

pub fn cache_path(dir: &Path, bound: u64) -> PathBuf {
    dir.join(format!("d3sieve_{bound}.bin"))
}

/// Load the table for `bound` from `dir`, or build and store it.
///
/// A malformed cache file is rebuilt and overwritten.
pub fn load_or_build(bound: u64, dir: &Path) -> Result<DivisorTable> {
    let path = cache_path(dir, bound);
    if path.exists() {
        match DivisorTable::load(&path) {
            Ok(t) if t.bound == bound => return Ok(t),
            Ok(_) | Err(Error::BadCache(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let table = build_divisor_table(bound)?;
    table.save(&path)?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        let t = build_divisor_table(100).unwrap();
        assert_eq!((t.d(1).unwrap(), t.d3(1).unwrap()), (1, 1));
        for p in [2, 3, 5, 7] {
            assert_eq!(t.d3(p).unwrap(), 3);
        }
        assert_eq!(t.d3(4).unwrap(), 6);
        assert_eq!(t.d3(8).unwrap(), 10);
        assert_eq!(t.d3(6).unwrap(), 9);
        assert_eq!(t.d3(9).unwrap(), 6);
        assert_eq!(t.sum_d3_squared(10).unwrap(), 371);
        assert_eq!(t.sum_d3_squared(1).unwrap(), 1);
        assert!(t.d3(101).is_err());
    }

    #[test]
    fn bruteforce_values() {
        assert_eq!(d3_bruteforce(1).unwrap(), 1);
        assert_eq!(d3_bruteforce(6).unwrap(), 9);
        assert_eq!(d3_bruteforce(9).unwrap(), 6);
        assert!(d3_bruteforce(0).is_err());
        assert!(d3_bruteforce(BRUTEFORCE_MAX + 1).is_err());
    }

    #[test]
    fn bound_guard() {
        assert!(build_divisor_table(0).is_err());
        assert!(build_divisor_table(MAX_BOUND + 1).is_err());
    }

    #[test]
    fn divisor_enumeration_matches_d() {
        let t = build_divisor_table(2000).unwrap();
        for n in 1..=2000u64 {
            let divs = t.divisors_with_counts(n).unwrap();
            assert_eq!(divs.len() as u32, t.d(n).unwrap());
            for (delta, dd) in divs {
                assert_eq!(n % delta, 0);
                assert_eq!(dd, t.d(delta).unwrap(), "n={n} delta={delta}");
            }
        }
    }

    #[test]
    fn h_special_cases() {
        let t = build_divisor_table(1000).unwrap();
        for u in [0.0, 0.3, 7.0] {
            assert!((t.h_shift(1, u).unwrap().value - 1.0).norm() < 1e-15);
            let want = 2.0 + ComplexValue::from_polar(1.0, -u * 2f64.ln());
            assert!((t.h_shift(2, u).unwrap().value - want).norm() < 1e-14);
        }
        for n in 1..=1000u64 {
            let h = t.h_shift(n, 0.0).unwrap().value;
            assert_eq!(h.re, f64::from(t.d3(n).unwrap()));
            assert_eq!(h.im, 0.0);
        }
    }

    #[test]
    fn g_is_conjugate_shifted_h() {
        // g(n, U) = n^{-iU} conj(h(n, U))
        let t = build_divisor_table(500).unwrap();
        for n in [1u64, 12, 360, 499] {
            let u = 1.7;
            let h = t.h_shift(n, u).unwrap().value;
            let g = t.g_shift(n, u).unwrap();
            let want = ComplexValue::from_polar(1.0, -u * (n as f64).ln()) * h.conj();
            assert!((g - want).norm() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn cache_round_trip_and_rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let t = build_divisor_table(5000).unwrap();
        let p = cache_path(dir.path(), 5000);
        t.save(&p).unwrap();
        assert_eq!(DivisorTable::load(&p).unwrap(), t);
        assert_eq!(load_or_build(5000, dir.path()).unwrap(), t);

        std::fs::write(&p, b"not a sieve").unwrap();
        assert!(matches!(DivisorTable::load(&p), Err(Error::BadCache(_))));
        assert_eq!(load_or_build(5000, dir.path()).unwrap(), t);
    }
}
