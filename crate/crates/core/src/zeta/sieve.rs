use std::io::{Read, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};

pub const MAX_SIEVE: u64 = 1_000_000_000;
const SEGMENT: u64 = 1 << 18;

/// All primes up to `cutoff`, in increasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeTable {
    pub cutoff: u64,
    pub primes: Vec<u32>,
}

impl PrimeTable {
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }
}

fn small_sieve(limit: u64) -> Vec<u32> {
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            out.push(i as u32);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Segmented sieve of Eratosthenes. Segments are sieved in parallel and concatenated in order.
pub fn sieve_primes(cutoff: u64) -> Result<PrimeTable> {
    if cutoff < 2 {
        return Err(Error::Domain("cutoff must be at least 2".into()));
    }
    if cutoff > MAX_SIEVE {
        return Err(Error::Capacity(format!(
            "sieve limited to {MAX_SIEVE}, requested {cutoff}"
        )));
    }
    let root = (cutoff as f64).sqrt() as u64 + 1;
    let base = small_sieve(root);
    let segments = cutoff / SEGMENT + 1;
    let parts: Vec<Vec<u32>> = (0..segments)
        .into_par_iter()
        .map(|s| {
            let lo = s * SEGMENT;
            let hi = (lo + SEGMENT).min(cutoff + 1);
            let mut composite = vec![false; (hi - lo) as usize];
            for &p in &base {
                let p = p as u64;
                if p * p >= hi {
                    break;
                }
                let start = (p * p).max(lo.div_ceil(p) * p);
                let mut m = start;
                while m < hi {
                    composite[(m - lo) as usize] = true;
                    m += p;
                }
            }
            (lo.max(2)..hi)
                .filter(|&k| !composite[(k - lo) as usize])
                .map(|k| k as u32)
                .collect()
        })
        .collect();
    Ok(PrimeTable {
        cutoff,
        primes: parts.concat(),
    })
}

const CACHE_MAGIC: &[u8; 8] = b"LCPRIME1";

/// Cache format: magic, cutoff (u64 LE), count (u64 LE), then the gaps between consecutive
/// primes (the first measured from 0) as LEB128 varints.
pub fn write_cache<W: Write>(table: &PrimeTable, mut w: W) -> Result<()> {
    w.write_all(CACHE_MAGIC)?;
    w.write_all(&table.cutoff.to_le_bytes())?;
    w.write_all(&(table.primes.len() as u64).to_le_bytes())?;
    let mut prev = 0u32;
    let mut buf = Vec::with_capacity(table.primes.len() * 2);
    for &p in &table.primes {
        let mut gap = p - prev;
        prev = p;
        loop {
            let byte = (gap & 0x7f) as u8;
            gap >>= 7;
            if gap == 0 {
                buf.push(byte);
                break;
            }
            buf.push(byte | 0x80);
        }
    }
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

pub fn read_cache<R: Read>(mut r: R) -> Result<PrimeTable> {
    let mut head = [0u8; 24];
    r.read_exact(&mut head)?;
    if &head[..8] != CACHE_MAGIC {
        return Err(Error::Format("not a prime table cache".into()));
    }
    let cutoff = u64::from_le_bytes(head[8..16].try_into().expect("8 bytes"));
    let count = u64::from_le_bytes(head[16..24].try_into().expect("8 bytes")) as usize;
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    let mut primes = Vec::with_capacity(count);
    let (mut acc, mut shift, mut prev) = (0u32, 0u32, 0u32);
    for b in body {
        acc |= ((b & 0x7f) as u32) << shift;
        if b & 0x80 == 0 {
            prev += acc;
            primes.push(prev);
            acc = 0;
            shift = 0;
        } else {
            shift += 7;
            if shift > 28 {
                return Err(Error::Format("varint too long".into()));
            }
        }
    }
    if primes.len() != count || shift != 0 {
        return Err(Error::Format(format!(
            "cache holds {} primes, header says {count}",
            primes.len()
        )));
    }
    Ok(PrimeTable { cutoff, primes })
}
